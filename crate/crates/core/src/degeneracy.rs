//! Degeneracy orderings, certificates, and greedy coloring.
//!
//! The degeneracy of a graph is the largest minimum degree over all induced
//! subgraphs; equivalently, the smallest d such that some vertex ordering has
//! every vertex preceded by at most d of its neighbors when read right to
//! left. Coloring greedily in reverse removal order therefore needs at most
//! degeneracy + 1 colors.

use std::collections::BTreeSet;

use crate::graph::{Color, Coloring, Graph, GraphError, VertexId};

/// A vertex elimination order together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    /// `order[i]` is the i-th vertex removed.
    pub order: Vec<VertexId>,
    /// `position[v]` is the index of v in `order`.
    pub position: Vec<u32>,
}

impl Ordering {
    pub fn new(order: Vec<VertexId>) -> Result<Self, GraphError> {
        let n = order.len();
        let mut position = vec![u32::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v as usize >= n || position[v as usize] != u32::MAX {
                return Err(GraphError::BadOrdering);
            }
            position[v as usize] = i as u32;
        }
        Ok(Ordering { order, position })
    }

    fn is_permutation_of(&self, n: usize) -> bool {
        self.order.len() == n
            && self.position.len() == n
            && self
                .order
                .iter()
                .enumerate()
                .all(|(i, &v)| (v as usize) < n && self.position[v as usize] == i as u32)
    }
}

/// Output of [`degeneracy_ordering`]: the order, the degeneracy it certifies,
/// and the largest number of later neighbors any vertex has under it. The two
/// numbers are always equal; keeping both makes the certificate self-checking.
#[derive(Clone, Debug)]
pub struct DegeneracyCertificate {
    pub ordering: Ordering,
    pub kappa: usize,
    pub max_ordered_degree: usize,
}

/// Bucketed min-degree removal. Ties break toward the smallest vertex id so
/// the result is a pure function of the graph.
pub fn degeneracy_ordering(g: &Graph) -> DegeneracyCertificate {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); max_deg + 1];
    for v in 0..n {
        buckets[deg[v]].insert(v as u32);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut kappa = 0usize;
    let mut cur = 0usize;
    for _ in 0..n {
        while buckets[cur].is_empty() {
            cur += 1;
        }
        let v = *buckets[cur].iter().next().unwrap();
        buckets[cur].remove(&v);
        removed[v as usize] = true;
        kappa = kappa.max(cur);
        order.push(v);
        for &w in g.neighbors(v) {
            let wi = w as usize;
            if !removed[wi] {
                buckets[deg[wi]].remove(&w);
                deg[wi] -= 1;
                buckets[deg[wi]].insert(w);
            }
        }
        cur = cur.saturating_sub(1);
    }
    let ordering = Ordering::new(order).expect("removal order is a permutation");
    let max_od = max_ordered_degree(g, &ordering);
    debug_assert_eq!(max_od, kappa);
    DegeneracyCertificate {
        ordering,
        kappa,
        max_ordered_degree: max_od,
    }
}

/// Largest count, over vertices v, of neighbors of v that come after v in the
/// ordering. A graph is d-degenerate iff some ordering keeps this at most d.
pub fn max_ordered_degree(g: &Graph, ord: &Ordering) -> usize {
    (0..g.n() as u32)
        .map(|v| {
            let pv = ord.position[v as usize];
            g.neighbors(v)
                .iter()
                .filter(|&&w| ord.position[w as usize] > pv)
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Greedy coloring in reverse order of `cert.ordering`, first-fit on slots.
/// Every color carries `palette_tag`, so colorings of disjoint blocks built
/// with distinct tags never share colors. Uses at most `cert.kappa + 1` slots.
pub fn greedy_color(
    g: &Graph,
    cert: &DegeneracyCertificate,
    palette_tag: u32,
) -> Result<Coloring, GraphError> {
    if !cert.ordering.is_permutation_of(g.n()) {
        return Err(GraphError::BadOrdering);
    }
    let n = g.n();
    let mut slot = vec![u32::MAX; n];
    // stamp[s] == v+1 means slot s is taken by a neighbor of the current v
    let mut stamp: Vec<u64> = vec![0; n + 1];
    for (i, &v) in cert.ordering.order.iter().enumerate().rev() {
        let me = (n - i) as u64; // distinct nonzero stamp per vertex
        for &w in g.neighbors(v) {
            let s = slot[w as usize];
            if s != u32::MAX {
                stamp[s as usize] = me;
            }
        }
        let mut s = 0u32;
        while stamp[s as usize] == me {
            s += 1;
        }
        slot[v as usize] = s;
    }
    Ok(Coloring::new(
        slot.into_iter()
            .map(|s| Color {
                tag: palette_tag,
                slot: s,
            })
            .collect(),
    ))
}

/// Independent oracle: repeated minimum-degree peeling with a plain degree
/// scan, tracking the largest degree seen at removal time. Quadratic and
/// deliberately unsophisticated; used to cross-check [`degeneracy_ordering`].
pub fn exact_degeneracy(g: &Graph) -> usize {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut kappa = 0;
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut who = 0;
        for v in 0..n {
            if alive[v] && deg[v] < best {
                best = deg[v];
                who = v;
            }
        }
        alive[who] = false;
        kappa = kappa.max(best);
        for &w in g.neighbors(who as u32) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    kappa
}

/// Bounds on arboricity implied by degeneracy: arboricity <= degeneracy
/// <= 2*arboricity - 1, so arboricity lies in [ceil((kappa+1)/2), kappa].
pub fn arboricity_bounds_from_kappa(kappa: usize) -> (usize, usize) {
    if kappa == 0 {
        return (0, 0);
    }
    ((kappa + 1).div_ceil(2), kappa)
}
