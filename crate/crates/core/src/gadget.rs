//! Adversarial instance generators with machine-checkable certificates, plus
//! the random-list-coloring experiment apparatus.
//!
//! Layout convention for every composite construction: the named vertex
//! groups are laid out in declaration order (L, R, then extras, then C), and
//! blowing up by lambda maps base vertex v to the consecutive ids
//! [v*lambda, (v+1)*lambda). Certificates name concrete vertex ids under
//! this layout. Indices (y, z) and matrix entries are 0-based throughout.

use serde::{Deserialize, Serialize};

use crate::degeneracy::{max_ordered_degree, Ordering};
use crate::exact::list_coloring_solve;
use crate::graph::{Graph, GraphError, VertexId};
use crate::rng::{stream_rng, uniform_below};

/// Square 0/1 matrix; entry (i, j) read as "left i sees right j".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    p: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(p: usize) -> Self {
        BitMatrix {
            p,
            bits: vec![false; p * p],
        }
    }

    pub fn ones(p: usize) -> Self {
        BitMatrix {
            p,
            bits: vec![true; p * p],
        }
    }

    pub fn identity(p: usize) -> Self {
        Self::from_fn(p, |i, j| i == j)
    }

    /// All zeros except entry (y, z).
    pub fn single(p: usize, y: usize, z: usize) -> Self {
        Self::from_fn(p, |i, j| (i, j) == (y, z))
    }

    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in 0..p {
                m.bits[i * p + j] = f(i, j);
            }
        }
        m
    }

    pub fn random(p: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, "gadget-bitmatrix", 0);
        Self::from_fn(p, |_, _| uniform_below(&mut rng, 2) == 1)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.p + j]
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.bits[i * self.p + j] = b;
    }

    pub fn complement(&self) -> Self {
        BitMatrix {
            p: self.p,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }
}

/// One-sided claims about an instance, with a witness the exact oracles can
/// check. A clique witness certifies the lower bounds; an elimination-order
/// witness certifies a degeneracy upper bound. Tests close the other side
/// with the exact solvers at small sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Exact(usize),
    AtMost(usize),
    AtLeast(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Clique(Vec<VertexId>),
    EliminationOrder(Vec<VertexId>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCertificate {
    pub expected_kappa: Option<Bound>,
    pub expected_chi_lower: Option<usize>,
    pub witness: Option<Witness>,
}

/// Check the witness against the graph and the sides of the claims it can
/// cover: cliques must be real and large enough for any lower bounds,
/// elimination orders must realize any degeneracy upper bound.
pub fn verify_certificate(g: &Graph, cert: &GadgetCertificate) -> bool {
    match &cert.witness {
        None => true,
        Some(Witness::Clique(vs)) => {
            let mut sorted = vs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != vs.len() {
                return false;
            }
            for (i, &u) in vs.iter().enumerate() {
                for &v in &vs[i + 1..] {
                    if !g.has_edge(u, v) {
                        return false;
                    }
                }
            }
            if let Some(chi) = cert.expected_chi_lower {
                if vs.len() < chi {
                    return false;
                }
            }
            match cert.expected_kappa {
                Some(Bound::Exact(k)) | Some(Bound::AtLeast(k)) => vs.len() >= k + 1,
                _ => true,
            }
        }
        Some(Witness::EliminationOrder(order)) => {
            let ord = match Ordering::new(order.clone()) {
                Ok(o) => o,
                Err(_) => return false,
            };
            if ord.order.len() != g.n() {
                return false;
            }
            match cert.expected_kappa {
                Some(Bound::Exact(k)) | Some(Bound::AtMost(k)) => max_ordered_degree(g, &ord) <= k,
                _ => true,
            }
        }
    }
}

/// Lexicographic product with a clique: each vertex becomes a lambda-clique,
/// each edge a complete join between the two cliques. Degeneracy satisfies
/// kappa(out) <= (kappa(g)+1)*lambda - 1, with equality when g carries a
/// (kappa+1)-clique.
pub fn blow_up(g: &Graph, lambda: usize) -> Graph {
    assert!(lambda >= 1, "lambda must be at least 1");
    let n = g.n();
    let mut edges = Vec::with_capacity(n * lambda * (lambda - 1) / 2 + g.edge_count() * lambda * lambda);
    let id = |v: VertexId, s: usize| v * lambda as u32 + s as u32;
    for v in 0..n as VertexId {
        for s in 0..lambda {
            for t in s + 1..lambda {
                edges.push((id(v, s), id(v, t)));
            }
        }
    }
    for (u, v) in g.edges() {
        for s in 0..lambda {
            for t in 0..lambda {
                edges.push((id(u, s), id(v, t)));
            }
        }
    }
    Graph::from_edges(n * lambda, edges).expect("blow-up ids are in range")
}

/// Edges {left[i], right[j]} for every set bit x[i][j].
pub fn bipartite_gadget(
    x: &BitMatrix,
    left: &[VertexId],
    right: &[VertexId],
) -> Vec<(VertexId, VertexId)> {
    let p = x.p();
    assert_eq!(left.len(), p);
    assert_eq!(right.len(), p);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if x.get(i, j) {
                edges.push((left[i], right[j]));
            }
        }
    }
    edges
}

fn expand_order(base: &[VertexId], lambda: usize) -> Vec<VertexId> {
    base.iter()
        .flat_map(|&v| (0..lambda as u32).map(move |s| v * lambda as u32 + s))
        .collect()
}

fn expand_set(base: &[VertexId], lambda: usize) -> Vec<VertexId> {
    expand_order(base, lambda)
}

/// The blown-up one-bit-distinguishing instance on 3*lambda*p vertices:
/// the bipartite gadget for x on L and R, plus a clique on C u {l_y, r_z}
/// minus that one pair. If x[y][z] = 1 the pair closes a (p+2)-clique and
/// chi >= (p+2)*lambda; otherwise degeneracy stays below (p+1)*lambda.
pub fn dist_instance(
    p: usize,
    lambda: usize,
    x: &BitMatrix,
    y: usize,
    z: usize,
) -> (Graph, GadgetCertificate) {
    assert!(p >= 1 && lambda >= 1);
    assert_eq!(x.p(), p);
    assert!(y < p && z < p);
    let left: Vec<VertexId> = (0..p as u32).collect();
    let right: Vec<VertexId> = (p as u32..2 * p as u32).collect();
    let c: Vec<VertexId> = (2 * p as u32..3 * p as u32).collect();
    let ell_y = left[y];
    let r_z = right[z];

    let mut edges = bipartite_gadget(x, &left, &right);
    let mut hub: Vec<VertexId> = c.clone();
    hub.push(ell_y);
    hub.push(r_z);
    for (i, &u) in hub.iter().enumerate() {
        for &v in &hub[i + 1..] {
            if (u.min(v), u.max(v)) == (ell_y.min(r_z), ell_y.max(r_z)) {
                continue;
            }
            edges.push((u, v));
        }
    }
    let base = Graph::from_edges(3 * p, edges).expect("layout ids are in range");
    let g = blow_up(&base, lambda);

    let cert = if x.get(y, z) {
        GadgetCertificate {
            expected_kappa: None,
            expected_chi_lower: Some((p + 2) * lambda),
            witness: Some(Witness::Clique(expand_set(&hub, lambda))),
        }
    } else {
        // L u R minus {l_y, r_z}, then l_y, then r_z, then C: every vertex
        // sees at most p later neighbors, and the blow-up multiplies that
        // into (p+1)*lambda - 1.
        let mut order: Vec<VertexId> = (0..2 * p as u32)
            .filter(|&v| v != ell_y && v != r_z)
            .collect();
        order.push(ell_y);
        order.push(r_z);
        order.extend(&c);
        GadgetCertificate {
            expected_kappa: Some(Bound::AtMost((p + 1) * lambda - 1)),
            expected_chi_lower: None,
            witness: Some(Witness::EliminationOrder(expand_order(&order, lambda))),
        }
    };
    (g, cert)
}

/// The blown-up fixed-degeneracy instance on 5*lambda*p vertices: gadgets
/// for x on (L, R) and for its complement on (L-bar, R-bar), plus a clique
/// on S = C u {l_y, r_z, lbar_y, rbar_z} minus the pairs {l_y, r_z} and
/// {lbar_y, rbar_z}. Exactly one of those pairs is re-closed by its gadget,
/// so degeneracy lands on (p+3)*lambda - 1 for both bit values and any
/// (kappa+lambda)-coloring must repeat a color precisely on the open pair.
pub fn known_kappa_instance(
    p: usize,
    lambda: usize,
    x: &BitMatrix,
    y: usize,
    z: usize,
) -> (Graph, GadgetCertificate) {
    assert!(p >= 1 && lambda >= 1);
    assert_eq!(x.p(), p);
    assert!(y < p && z < p);
    let base_id = |group: usize, i: usize| (group * p + i) as VertexId;
    let left: Vec<VertexId> = (0..p).map(|i| base_id(0, i)).collect();
    let right: Vec<VertexId> = (0..p).map(|i| base_id(1, i)).collect();
    let left_bar: Vec<VertexId> = (0..p).map(|i| base_id(2, i)).collect();
    let right_bar: Vec<VertexId> = (0..p).map(|i| base_id(3, i)).collect();
    let c: Vec<VertexId> = (0..p).map(|i| base_id(4, i)).collect();

    let mut edges = bipartite_gadget(x, &left, &right);
    edges.extend(bipartite_gadget(&x.complement(), &left_bar, &right_bar));
    let open_pairs = [
        (left[y].min(right[z]), left[y].max(right[z])),
        (left_bar[y].min(right_bar[z]), left_bar[y].max(right_bar[z])),
    ];
    let mut s: Vec<VertexId> = c.clone();
    s.extend([left[y], right[z], left_bar[y], right_bar[z]]);
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if open_pairs.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            edges.push((u, v));
        }
    }
    let base = Graph::from_edges(5 * p, edges).expect("layout ids are in range");
    let g = blow_up(&base, lambda);

    // the gadget closes {l_y, r_z} when the bit is set, else the bar pair
    let mut clique: Vec<VertexId> = c.clone();
    if x.get(y, z) {
        clique.extend([left[y], right[z], left_bar[y]]);
    } else {
        clique.extend([left_bar[y], right_bar[z], left[y]]);
    }
    let cert = GadgetCertificate {
        expected_kappa: Some(Bound::Exact((p + 3) * lambda - 1)),
        expected_chi_lower: None,
        witness: Some(Witness::Clique(expand_set(&clique, lambda))),
    };
    (g, cert)
}

/// Complete graph minus the single edge {h, k}; degeneracy n-2, and any
/// (n-1)-coloring can repeat a color only on that pair.
pub fn multipass_instance(n: usize, h: VertexId, k: VertexId) -> Graph {
    assert!(h != k && (h as usize) < n && (k as usize) < n);
    let skip = (h.min(k), h.max(k));
    let mut edges = Vec::with_capacity(n * (n - 1) / 2 - 1);
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if (u, v) != skip {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryGadgetVariant {
    /// Disjoint cliques on A (size p+1) and B (size p).
    TwoCliques,
    /// Swap edges {a_i, a_j}, {b_i, b_j} for the cross pairs {a_i, b_j},
    /// {a_j, b_i}; indices 0-based with i < j.
    EdgeSwap(usize, usize),
}

/// Vertex ids: a_1..a_p are 0..p-1, the untouched apex a_{p+1} is p, and
/// b_1..b_p are p+1..2p.
pub fn query_gadget(p: usize, variant: QueryGadgetVariant) -> (Graph, GadgetCertificate) {
    assert!(p >= 2);
    let a = |i: usize| i as VertexId; // 0-based, a(p) is the apex
    let b = |i: usize| (p + 1 + i) as VertexId;
    let mut edges = Vec::new();
    for i in 0..=p {
        for j in i + 1..=p {
            edges.push((a(i), a(j)));
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            edges.push((b(i), b(j)));
        }
    }
    let cert = match variant {
        QueryGadgetVariant::TwoCliques => GadgetCertificate {
            expected_kappa: Some(Bound::Exact(p)),
            expected_chi_lower: Some(p + 1),
            witness: Some(Witness::Clique((0..=p as u32).collect())),
        },
        QueryGadgetVariant::EdgeSwap(i, j) => {
            assert!(i < j && j < p, "need 0 <= i < j < p");
            edges.retain(|&e| e != (a(i), a(j)) && e != (b(i), b(j)));
            edges.push((a(i), b(j)));
            edges.push((a(j), b(i)));
            // B first, then a_i (whose remaining A-neighbors number p-1),
            // then the p-clique A minus a_i
            let mut order: Vec<VertexId> = (0..p).map(b).collect();
            order.push(a(i));
            order.extend((0..=p).filter(|&q| q != i).map(a));
            GadgetCertificate {
                expected_kappa: Some(Bound::Exact(p - 1)),
                expected_chi_lower: None,
                witness: Some(Witness::EliminationOrder(order)),
            }
        }
    };
    let g = Graph::from_edges(2 * p + 1, edges).expect("ids in range");
    (g, cert)
}

/// Implicit oracle for the blown-up query gadgets: answers are computed from
/// (p, variant, lambda) on demand, no adjacency ever materialized. Copy s of
/// base vertex v has id v*lambda + s; a copy's neighbor list enumerates its
/// lambda-1 siblings first, then each base neighbor's copies in base order.
pub struct ImplicitQueryGadget {
    p: usize,
    variant: QueryGadgetVariant,
    lambda: usize,
}

impl ImplicitQueryGadget {
    pub fn new(p: usize, variant: QueryGadgetVariant, lambda: usize) -> Self {
        assert!(p >= 2 && lambda >= 1);
        if let QueryGadgetVariant::EdgeSwap(i, j) = variant {
            assert!(i < j && j < p, "need 0 <= i < j < p");
        }
        ImplicitQueryGadget { p, variant, lambda }
    }

    fn bit(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        match self.variant {
            QueryGadgetVariant::TwoCliques => false,
            QueryGadgetVariant::EdgeSwap(a, b) => (i.min(j), i.max(j)) == (a, b),
        }
    }

    /// Base-graph Pair answer; u, v in 0..2p+1 with the query_gadget layout.
    fn base_pair(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let p = self.p;
        let (u, v) = (u.min(v), u.max(v));
        if v == p {
            return true; // apex sees all of A
        }
        if u == p {
            return false; // apex sees none of B
        }
        match (u <= p, v <= p) {
            (true, true) => !self.bit(u, v),
            (false, false) => !self.bit(u - p - 1, v - p - 1),
            _ => {
                let (ai, bj) = (u, v - p - 1);
                self.bit(ai, bj)
            }
        }
    }

    /// Base-graph Nbr answer for 0-based slot d.
    fn base_nbr(&self, v: usize, d: usize) -> Option<usize> {
        let p = self.p;
        if v == p {
            // apex: neighbors are a_1..a_p in index order
            return (d < p).then_some(d);
        }
        if v < p {
            // a_v: p-1 slots walk [p] minus v, last slot is the apex
            if d < p - 1 {
                let j = if d < v { d } else { d + 1 };
                return Some(if self.bit(v, j) { p + 1 + j } else { j });
            }
            return (d == p - 1).then_some(p);
        }
        let i = v - p - 1; // b_i: p-1 slots, same index walk
        if d < p - 1 {
            let j = if d < i { d } else { d + 1 };
            return Some(if self.bit(i, j) { j } else { p + 1 + j });
        }
        None
    }
}

impl crate::query::OracleBackend for ImplicitQueryGadget {
    fn n(&self) -> usize {
        (2 * self.p + 1) * self.lambda
    }

    fn pair(&self, u: VertexId, v: VertexId) -> bool {
        let (bu, su) = (u as usize / self.lambda, u as usize % self.lambda);
        let (bv, sv) = (v as usize / self.lambda, v as usize % self.lambda);
        if bu == bv {
            return su != sv;
        }
        self.base_pair(bu, bv)
    }

    fn nbr(&self, u: VertexId, j: u64) -> Option<VertexId> {
        if j == 0 {
            return None; // slots are 1-based
        }
        let (bv, s) = (u as usize / self.lambda, u as usize % self.lambda);
        let d = (j - 1) as usize;
        if d < self.lambda - 1 {
            let sib = if d < s { d } else { d + 1 };
            return Some((bv * self.lambda + sib) as VertexId);
        }
        let rest = d - (self.lambda - 1);
        let (slot, copy) = (rest / self.lambda, rest % self.lambda);
        self.base_nbr(bv, slot)
            .map(|w| (w * self.lambda + copy) as VertexId)
    }
}

/// Counting oracle over the implicit gadget.
pub fn gadget_oracle(
    p: usize,
    variant: QueryGadgetVariant,
    lambda: usize,
) -> crate::query::QueryOracle {
    crate::query::QueryOracle::new(Box::new(ImplicitQueryGadget::new(p, variant, lambda)))
}

/// Join of a t-clique with an independent set of n-t vertices; degeneracy t.
/// Clique ids 0..t, independent ids t..n.
pub fn join_graph(n: usize, t: usize) -> Graph {
    assert!(0 < t && t < n);
    let mut edges = Vec::with_capacity(t * (t - 1) / 2 + t * (n - t));
    for u in 0..t as VertexId {
        for v in u + 1..n as VertexId {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RlcReport {
    pub trials: u64,
    pub successes: u64,
    /// Trials dropped because the list solver hit its node budget; these are
    /// excluded from the rate.
    pub budget_skipped: u64,
    pub success_rate: f64,
}

/// Sample r colors per vertex uniformly without replacement from [ell]
/// (partial Fisher-Yates), then decide list-colorability exactly. Each trial
/// derives its own rng stream from (seed, trial index).
pub fn rlc_experiment(g: &Graph, ell: usize, r: usize, trials: u64, seed: u64) -> RlcReport {
    assert!(r >= 1 && r <= ell, "need 1 <= r <= ell");
    assert!(ell <= 128, "list solver palette cap");
    assert!(trials >= 1);
    let n = g.n();
    let mut successes = 0u64;
    let mut budget_skipped = 0u64;
    for trial in 0..trials {
        let mut rng = stream_rng(seed, "rlc-trial", trial);
        let mut lists = Vec::with_capacity(n);
        let mut pool: Vec<u32> = (0..ell as u32).collect();
        for _ in 0..n {
            for i in 0..r {
                let j = i + uniform_below(&mut rng, (ell - i) as u64) as usize;
                pool.swap(i, j);
            }
            lists.push(pool[..r].to_vec());
        }
        match list_coloring_solve(g, &lists, 20_000_000) {
            Ok(Some(_)) => successes += 1,
            Ok(None) => {}
            Err(GraphError::SearchBudgetExceeded(_)) => budget_skipped += 1,
            Err(e) => unreachable!("list solver rejected gadget input: {e}"),
        }
    }
    let decided = trials - budget_skipped;
    RlcReport {
        trials,
        successes,
        budget_skipped,
        success_rate: if decided == 0 {
            0.0
        } else {
            successes as f64 / decided as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneracy::{degeneracy_ordering, exact_degeneracy, greedy_color};
    use crate::exact::{exact_chromatic_number, max_clique};
    use crate::query::{OracleBackend, QueryOracle};

    fn random_graph(n: usize, seed: u64) -> Graph {
        let mut rng = stream_rng(seed, "gadget-test-graph", 0);
        let mut edges = Vec::new();
        for u in 0..n as VertexId {
            for v in u + 1..n as VertexId {
                if uniform_below(&mut rng, 2) == 1 {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn blow_up_identity_and_k2() {
        let g = random_graph(7, 3);
        let same = blow_up(&g, 1);
        assert_eq!(same.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        let k2 = Graph::from_edges(2, vec![(0, 1)]).unwrap();
        let k4 = blow_up(&k2, 2);
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(exact_degeneracy(&k4), 3);
    }

    #[test]
    fn blow_up_degeneracy_bound_random() {
        for trial in 0..200u64 {
            let n = 2 + (trial % 9) as usize;
            let lambda = 1 + (trial % 3) as usize;
            let g = random_graph(n, 1000 + trial);
            let big = blow_up(&g, lambda);
            let kappa = exact_degeneracy(&g);
            assert!(
                exact_degeneracy(&big) <= (kappa + 1) * lambda - 1,
                "n {n} lambda {lambda} trial {trial}"
            );
            // a c-clique blows up into a c*lambda-clique
            let clique = max_clique(&g);
            let lifted: Vec<VertexId> = clique
                .iter()
                .flat_map(|&v| (0..lambda as u32).map(move |s| v * lambda as u32 + s))
                .collect();
            for (i, &u) in lifted.iter().enumerate() {
                for &v in &lifted[i + 1..] {
                    assert!(big.has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn bipartite_gadget_shapes() {
        let left: Vec<VertexId> = (0..4).collect();
        let right: Vec<VertexId> = (4..8).collect();
        assert!(bipartite_gadget(&BitMatrix::zeros(4), &left, &right).is_empty());
        assert_eq!(bipartite_gadget(&BitMatrix::ones(4), &left, &right).len(), 16);
        let matching = bipartite_gadget(&BitMatrix::identity(4), &left, &right);
        assert_eq!(matching, vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
    }

    #[test]
    fn dist_instance_case_split() {
        let p = 4;
        // bit set: chi at least p+2 (certificate clique is real)
        let x = BitMatrix::single(p, 1, 2);
        let (g, cert) = dist_instance(p, 1, &x, 1, 2);
        assert_eq!(g.n(), 3 * p);
        assert!(verify_certificate(&g, &cert));
        assert_eq!(cert.expected_chi_lower, Some(p + 2));
        assert!(exact_chromatic_number(&g, 64).unwrap() >= p + 2);

        // bit clear: degeneracy at most p, witnessed by the ordering
        let (g0, cert0) = dist_instance(p, 1, &BitMatrix::zeros(p), 1, 2);
        assert!(verify_certificate(&g0, &cert0));
        assert_eq!(cert0.expected_kappa, Some(Bound::AtMost(p)));
        assert!(exact_degeneracy(&g0) <= p);

        let (g2, cert2) = dist_instance(p, 2, &BitMatrix::zeros(p), 1, 2);
        assert_eq!(g2.n(), 6 * p);
        assert!(verify_certificate(&g2, &cert2));
        assert!(exact_degeneracy(&g2) <= (p + 1) * 2 - 1);
    }

    #[test]
    fn known_kappa_instance_is_exact() {
        let p = 4;
        for (x, y, z) in [
            (BitMatrix::identity(p), 1, 1), // bit set
            (BitMatrix::identity(p), 1, 2), // bit clear
        ] {
            let (g, cert) = known_kappa_instance(p, 1, &x, y, z);
            assert_eq!(g.n(), 5 * p);
            assert!(verify_certificate(&g, &cert));
            assert_eq!(cert.expected_kappa, Some(Bound::Exact(p + 2)));
            assert_eq!(exact_degeneracy(&g), p + 2);
        }
        let (g, cert) = known_kappa_instance(3, 2, &BitMatrix::identity(3), 0, 1);
        assert_eq!(g.n(), 30);
        assert!(verify_certificate(&g, &cert));
        assert_eq!(exact_degeneracy(&g), 11);
    }

    #[test]
    fn known_kappa_repetition_localizes() {
        let p = 4;
        let (y, z) = (1, 2);
        let x = BitMatrix::identity(p); // x[1][2] = 0: open pair is (l_y, r_z)
        let (g, _) = known_kappa_instance(p, 1, &x, y, z);
        let kappa = p + 2;
        let lists = vec![(0..(kappa + 1) as u32).collect::<Vec<u32>>(); g.n()];
        let coloring = list_coloring_solve(&g, &lists, 50_000_000)
            .unwrap()
            .expect("kappa+1 colors always suffice");
        // S = C and the four distinguished vertices; the only same-colored
        // pair inside S must be the open pair (l_y, r_z)
        let mut s: Vec<VertexId> = (4 * p as u32..5 * p as u32).collect();
        s.extend([
            y as VertexId,
            (p + z) as VertexId,
            (2 * p + y) as VertexId,
            (3 * p + z) as VertexId,
        ]);
        let mut repeats = Vec::new();
        for (i, &u) in s.iter().enumerate() {
            for &v in &s[i + 1..] {
                if coloring.of(u) == coloring.of(v) {
                    repeats.push((u, v));
                }
            }
        }
        assert_eq!(repeats, vec![(y as VertexId, (p + z) as VertexId)]);
    }

    #[test]
    fn multipass_instance_shape() {
        let g = multipass_instance(5, 1, 3);
        assert_eq!(exact_degeneracy(&g), 3);
        assert_eq!(g.edge_count(), 9);
        let path = multipass_instance(3, 0, 1);
        assert_eq!(exact_degeneracy(&path), 1);

        // greedy n-1 coloring repeats exactly at the missing edge
        let g = multipass_instance(8, 2, 6);
        let cert = degeneracy_ordering(&g);
        assert_eq!(cert.kappa, 6);
        let coloring = greedy_color(&g, &cert, 0).unwrap();
        assert!(coloring.palette_size() <= 7);
        let mut repeats = Vec::new();
        for u in 0..8u32 {
            for v in u + 1..8u32 {
                if coloring.of(u) == coloring.of(v) {
                    repeats.push((u, v));
                }
            }
        }
        assert_eq!(repeats, vec![(2, 6)]);
    }

    #[test]
    fn query_gadget_certificates() {
        let (h, cert) = query_gadget(5, QueryGadgetVariant::TwoCliques);
        assert_eq!(h.n(), 11);
        assert!(verify_certificate(&h, &cert));
        assert_eq!(exact_chromatic_number(&h, 64).unwrap(), 6);
        assert_eq!(exact_degeneracy(&h), 5);

        let (hij, cert) = query_gadget(5, QueryGadgetVariant::EdgeSwap(0, 2));
        assert!(verify_certificate(&hij, &cert));
        assert_eq!(exact_degeneracy(&hij), 4);
        // the apex keeps its full A-side adjacency and ignores B
        let apex = 5u32;
        for i in 0..5u32 {
            assert!(hij.has_edge(apex, i));
            assert!(!hij.has_edge(apex, 6 + i));
        }
    }

    #[test]
    fn implicit_oracle_answers_match_table() {
        let p = 5;
        let imp = ImplicitQueryGadget::new(p, QueryGadgetVariant::TwoCliques, 1);
        for i in 0..p as u32 {
            for j in 0..p as u32 {
                assert!(!imp.pair(i, p as u32 + 1 + j), "A-B pair in two-cliques");
            }
        }
        let imp = ImplicitQueryGadget::new(p, QueryGadgetVariant::EdgeSwap(0, 2), 1);
        assert!(imp.pair(0, p as u32 + 1 + 2));
        assert!(imp.pair(2, p as u32 + 1));
        assert!(!imp.pair(0, 2), "swapped-out A edge");
        // first neighbor of a_1 walks to a_2 (ids 0 and 1; slots 1-based)
        assert_eq!(imp.nbr(0, 1), Some(1));
        // slot p is the apex
        assert_eq!(imp.nbr(0, p as u64), Some(p as u32));
        assert_eq!(imp.nbr(p as u32, 3), Some(2));
        // b_i has p-1 slots, then bottom
        assert!(imp.nbr(p as u32 + 1, (p - 1) as u64).is_some());
        assert_eq!(imp.nbr(p as u32 + 1, p as u64), None);
        assert_eq!(imp.nbr(0, 0), None);
    }

    #[test]
    fn implicit_oracle_matches_materialized() {
        for (variant, lambda) in [
            (QueryGadgetVariant::TwoCliques, 1),
            (QueryGadgetVariant::EdgeSwap(1, 3), 1),
            (QueryGadgetVariant::EdgeSwap(0, 2), 2),
        ] {
            let p = 4;
            let imp = ImplicitQueryGadget::new(p, variant, lambda);
            let n = imp.n();
            // materialize adjacency in the implicit oracle's slot order
            let mut adj = Vec::with_capacity(n);
            for v in 0..n as u32 {
                let mut row = Vec::new();
                let mut d = 1u64;
                while let Some(w) = imp.nbr(v, d) {
                    row.push(w);
                    d += 1;
                }
                adj.push(row);
            }
            let mut explicit = QueryOracle::from_adjacency(adj).unwrap();
            // full transcript equivalence: every Nbr slot and every pair
            for v in 0..n as u32 {
                let mut d = 1u64;
                loop {
                    let a = imp.nbr(v, d);
                    let b = explicit.nbr(v, d);
                    assert_eq!(a, b, "v {v} slot {d} {variant:?} x{lambda}");
                    if a.is_none() {
                        break;
                    }
                    d += 1;
                }
                for w in 0..n as u32 {
                    if v != w {
                        assert_eq!(imp.pair(v, w), explicit.pair(v, w));
                    }
                }
            }
            // and the implicit graph is exactly the blown-up gadget
            let (base, _) = query_gadget(p, variant);
            let big = blow_up(&base, lambda);
            let mut edges_imp: Vec<(u32, u32)> = Vec::new();
            for v in 0..n as u32 {
                for w in v + 1..n as u32 {
                    if imp.pair(v, w) {
                        edges_imp.push((v, w));
                    }
                }
            }
            assert_eq!(edges_imp, big.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn join_graph_shape() {
        let g = join_graph(10, 3);
        assert_eq!(exact_degeneracy(&g), 3);
        assert_eq!(g.edge_count(), 24);
        let star = join_graph(8, 1);
        assert_eq!(exact_degeneracy(&star), 1);
        let kn = join_graph(6, 5);
        assert_eq!(g.n(), 10);
        assert_eq!(kn.edge_count(), 15);
        assert_eq!(exact_degeneracy(&kn), 5);
    }

    #[test]
    fn rlc_full_lists_always_succeed() {
        let g = join_graph(9, 3); // chromatic number 4
        let rep = rlc_experiment(&g, 4, 4, 20, 1);
        assert_eq!(rep.successes, 20);
        assert_eq!(rep.budget_skipped, 0);
        assert_eq!(rep.success_rate, 1.0);
    }

    #[test]
    fn rlc_single_edge_collides_half_the_time() {
        let k2 = Graph::from_edges(2, vec![(0, 1)]).unwrap();
        let rep = rlc_experiment(&k2, 2, 1, 400, 7);
        // exact rate is 1/2; 3 sigma at 400 trials is 0.075
        assert!((rep.success_rate - 0.5).abs() < 0.075, "{}", rep.success_rate);
    }
}
