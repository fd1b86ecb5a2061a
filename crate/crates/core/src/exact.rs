//! Small-instance exact oracles: maximum clique, chromatic number, list
//! coloring, independence number, and Nash-Williams arboricity.
//!
//! These exist to validate the scalable algorithms and the gadget
//! certificates; they are exponential-time searches guarded by size limits
//! and node budgets.

use crate::degeneracy::{degeneracy_ordering, greedy_color};
use crate::graph::{Color, Coloring, Graph, GraphError, VertexId};

/// Default vertex-count guard for [`exact_chromatic_number`].
pub const EXACT_CHI_DEFAULT_LIMIT: usize = 20;
/// Default backtracking-node budget for [`list_coloring_solve`].
pub const LIST_SOLVE_DEFAULT_BUDGET: u64 = 1_000_000;

fn neighbor_masks(g: &Graph) -> Vec<u64> {
    let n = g.n();
    assert!(n <= 64);
    let mut mask = vec![0u64; n];
    for (u, v) in g.edges() {
        mask[u as usize] |= 1 << v;
        mask[v as usize] |= 1 << u;
    }
    mask
}

/// Maximum clique via Bron-Kerbosch with pivoting. Requires n <= 64.
pub fn max_clique(g: &Graph) -> Vec<VertexId> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let nb = neighbor_masks(g);
    let mut best: u64 = 0;
    let all: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    fn expand(nb: &[u64], best: &mut u64, r: u64, mut p: u64, mut x: u64) {
        if p == 0 && x == 0 {
            if r.count_ones() > best.count_ones() {
                *best = r;
            }
            return;
        }
        if (r | p).count_ones() <= best.count_ones() {
            return;
        }
        // pivot: vertex of P|X covering the most of P
        let mut pivot = u32::MAX;
        let mut cover = 0u32;
        let mut scan = p | x;
        while scan != 0 {
            let v = scan.trailing_zeros();
            scan &= scan - 1;
            let c = (p & nb[v as usize]).count_ones();
            if pivot == u32::MAX || c > cover {
                pivot = v;
                cover = c;
            }
        }
        let mut cands = p & !nb[pivot as usize];
        while cands != 0 {
            let v = cands.trailing_zeros();
            cands &= cands - 1;
            let bit = 1u64 << v;
            expand(nb, best, r | bit, p & nb[v as usize], x & nb[v as usize]);
            p &= !bit;
            x |= bit;
        }
    }
    expand(&nb, &mut best, 0, all, 0);
    let mut out = Vec::new();
    for v in 0..n as u32 {
        if best >> v & 1 == 1 {
            out.push(v);
        }
    }
    out
}

/// Independence number (maximum independent set size) via clique search on
/// the complement. Requires n <= 64.
pub fn independence_number(g: &Graph) -> usize {
    max_clique(&g.complement()).len()
}

/// Nash-Williams arboricity: max over vertex subsets S with |S| >= 2 of
/// ceil(m(S) / (|S| - 1)). Exhaustive over subsets; requires n <= 20.
pub fn exact_arboricity(g: &Graph) -> Result<usize, GraphError> {
    let n = g.n();
    if n > 20 {
        return Err(GraphError::TooLargeForExact { n, limit: 20 });
    }
    if g.edge_count() == 0 {
        return Ok(0);
    }
    let nb = neighbor_masks(g);
    let mut best = 1usize;
    for s in 1u64..(1u64 << n) {
        let size = s.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let mut m = 0usize;
        let mut scan = s;
        while scan != 0 {
            let v = scan.trailing_zeros();
            scan &= scan - 1;
            m += (nb[v as usize] & s).count_ones() as usize;
        }
        m /= 2;
        best = best.max(m.div_ceil(size - 1));
    }
    Ok(best)
}

struct KColorSearch<'a> {
    g: &'a Graph,
    k: u32,
    assigned: Vec<u32>,
    // forbidden[v]: bitmask of colors used by neighbors (k <= 64 always here)
    forbidden: Vec<u64>,
    uncolored: u64,
    nodes: u64,
    budget: u64,
}

impl KColorSearch<'_> {
    fn solve(&mut self, max_used: u32) -> Result<bool, GraphError> {
        if self.uncolored == 0 {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GraphError::SearchBudgetExceeded(self.budget));
        }
        // most-constrained vertex: fewest allowed colors
        let mut pick = u32::MAX;
        let mut pick_avail = u32::MAX;
        let cap = (max_used + 1).min(self.k); // new colors beyond one fresh slot are symmetric
        let mut scan = self.uncolored;
        while scan != 0 {
            let v = scan.trailing_zeros();
            scan &= scan - 1;
            let avail = cap - (self.forbidden[v as usize] & ((1u64 << cap) - 1)).count_ones();
            if avail == 0 {
                return Ok(false);
            }
            if avail < pick_avail {
                pick_avail = avail;
                pick = v;
            }
        }
        let v = pick;
        self.uncolored &= !(1u64 << v);
        for c in 0..cap {
            if self.forbidden[v as usize] >> c & 1 == 1 {
                continue;
            }
            self.assigned[v as usize] = c;
            let mut touched: Vec<u32> = Vec::new();
            for &w in self.g.neighbors(v) {
                if self.uncolored >> w & 1 == 1 && self.forbidden[w as usize] >> c & 1 == 0 {
                    self.forbidden[w as usize] |= 1 << c;
                    touched.push(w);
                }
            }
            if self.solve(max_used.max(c + 1))? {
                return Ok(true);
            }
            for w in touched {
                self.forbidden[w as usize] &= !(1u64 << c);
            }
        }
        self.uncolored |= 1 << v;
        Ok(false)
    }
}

fn k_colorable(g: &Graph, k: u32, seed_clique: &[VertexId], budget: u64) -> Result<bool, GraphError> {
    if (seed_clique.len() as u32) > k {
        return Ok(false);
    }
    let n = g.n();
    let mut search = KColorSearch {
        g,
        k,
        assigned: vec![u32::MAX; n],
        forbidden: vec![0u64; n],
        uncolored: if n == 64 { !0 } else { (1u64 << n) - 1 },
        nodes: 0,
        budget,
    };
    // pin a maximum clique to colors 0..|C| to kill color symmetry
    let mut used = 0u32;
    for (c, &v) in seed_clique.iter().enumerate() {
        search.assigned[v as usize] = c as u32;
        search.uncolored &= !(1u64 << v);
        for &w in g.neighbors(v) {
            search.forbidden[w as usize] |= 1 << c;
        }
        used += 1;
    }
    search.solve(used.max(1))
}

/// Exact chromatic number by branch and bound: a maximum clique gives the
/// lower bound and is pre-colored, greedy-on-degeneracy gives the upper
/// bound, and k-colorability is tested upward from the clique size.
pub fn exact_chromatic_number(g: &Graph, limit: usize) -> Result<usize, GraphError> {
    let n = g.n();
    if n > limit || n > 64 {
        return Err(GraphError::TooLargeForExact {
            n,
            limit: limit.min(64),
        });
    }
    if n == 0 {
        return Ok(0);
    }
    if g.edge_count() == 0 {
        return Ok(1);
    }
    let clique = max_clique(g);
    let cert = degeneracy_ordering(g);
    let upper = greedy_color(g, &cert, 0)?.palette_size();
    for k in clique.len()..upper {
        if k_colorable(g, k as u32, &clique, 200_000_000)? {
            return Ok(k);
        }
    }
    Ok(upper)
}

/// Backtracking list-coloring solver: most-constrained vertex first with
/// forward checking. `lists[v]` is the set of colors vertex v may take
/// (duplicates ignored). At most 128 distinct colors across all lists.
/// Returns Ok(None) when no proper choice exists, and an error if the search
/// visits more than `budget` nodes.
pub fn list_coloring_solve(
    g: &Graph,
    lists: &[Vec<u32>],
    budget: u64,
) -> Result<Option<Coloring>, GraphError> {
    let n = g.n();
    assert_eq!(lists.len(), n, "one color list per vertex");
    if n == 0 {
        return Ok(Some(Coloring::new(Vec::new())));
    }
    // dense-map the palette
    let mut palette: Vec<u32> = lists.iter().flatten().copied().collect();
    palette.sort_unstable();
    palette.dedup();
    if palette.len() > 128 {
        return Err(GraphError::TooManyListColors(palette.len()));
    }
    let idx_of = |c: u32| palette.binary_search(&c).unwrap() as u32;
    let mut allowed: Vec<u128> = vec![0; n];
    for (v, l) in lists.iter().enumerate() {
        for &c in l {
            allowed[v] |= 1u128 << idx_of(c);
        }
    }

    struct S<'a> {
        g: &'a Graph,
        allowed: Vec<u128>,
        chosen: Vec<u32>,
        done: Vec<bool>,
        left: usize,
        nodes: u64,
        budget: u64,
    }
    impl S<'_> {
        fn solve(&mut self) -> Result<bool, GraphError> {
            if self.left == 0 {
                return Ok(true);
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(GraphError::SearchBudgetExceeded(self.budget));
            }
            let mut pick = usize::MAX;
            let mut best = u32::MAX;
            for v in 0..self.g.n() {
                if !self.done[v] {
                    let c = self.allowed[v].count_ones();
                    if c == 0 {
                        return Ok(false);
                    }
                    if c < best {
                        best = c;
                        pick = v;
                    }
                }
            }
            let v = pick;
            self.done[v] = true;
            self.left -= 1;
            let mut opts = self.allowed[v];
            while opts != 0 {
                let c = opts.trailing_zeros();
                opts &= opts - 1;
                self.chosen[v] = c;
                let bit = 1u128 << c;
                let mut touched: Vec<u32> = Vec::new();
                let mut dead = false;
                for &w in self.g.neighbors(v as u32) {
                    let wi = w as usize;
                    if !self.done[wi] && self.allowed[wi] & bit != 0 {
                        self.allowed[wi] &= !bit;
                        touched.push(w);
                        if self.allowed[wi] == 0 {
                            dead = true;
                        }
                    }
                }
                if !dead && self.solve()? {
                    return Ok(true);
                }
                for w in touched {
                    self.allowed[w as usize] |= bit;
                }
            }
            self.done[v] = false;
            self.left += 1;
            Ok(false)
        }
    }

    let mut s = S {
        g,
        allowed,
        chosen: vec![u32::MAX; n],
        done: vec![false; n],
        left: n,
        nodes: 0,
        budget,
    };
    if s.solve()? {
        let colors = s
            .chosen
            .iter()
            .map(|&c| Color {
                tag: 0,
                slot: palette[c as usize],
            })
            .collect();
        Ok(Some(Coloring::new(colors)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::verify_proper;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32).map(|i| (i, (i + 1) % n as u32))).unwrap()
    }

    fn clique(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, e).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = vec![];
        for i in 0..5u32 {
            e.push((i, (i + 1) % 5)); // outer cycle
            e.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
            e.push((i, i + 5)); // spokes
        }
        Graph::from_edges(10, e).unwrap()
    }

    #[test]
    fn clique_oracle() {
        assert_eq!(max_clique(&clique(5)).len(), 5);
        assert_eq!(max_clique(&cycle(5)).len(), 2);
        assert_eq!(max_clique(&petersen()).len(), 2);
        assert_eq!(max_clique(&Graph::empty(3)).len(), 1);
        assert_eq!(max_clique(&Graph::empty(0)).len(), 0);
    }

    #[test]
    fn chromatic_known_values() {
        assert_eq!(exact_chromatic_number(&cycle(5), 20).unwrap(), 3);
        assert_eq!(exact_chromatic_number(&cycle(6), 20).unwrap(), 2);
        assert_eq!(exact_chromatic_number(&clique(4), 20).unwrap(), 4);
        assert_eq!(exact_chromatic_number(&petersen(), 20).unwrap(), 3);
        assert_eq!(exact_chromatic_number(&Graph::empty(5), 20).unwrap(), 1);
        let k33 = Graph::from_edges(
            6,
            vec![(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        )
        .unwrap();
        assert_eq!(exact_chromatic_number(&k33, 20).unwrap(), 2);
    }

    #[test]
    fn chromatic_respects_limit() {
        assert!(matches!(
            exact_chromatic_number(&clique(21), 20),
            Err(GraphError::TooLargeForExact { .. })
        ));
    }

    #[test]
    fn independence_oracle() {
        assert_eq!(independence_number(&cycle(5)), 2);
        assert_eq!(independence_number(&clique(6)), 1);
        assert_eq!(independence_number(&petersen()), 4);
    }

    #[test]
    fn arboricity_oracle() {
        assert_eq!(exact_arboricity(&cycle(5)).unwrap(), 2);
        assert_eq!(exact_arboricity(&clique(4)).unwrap(), 2);
        // a tree
        let t = Graph::from_edges(5, vec![(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(exact_arboricity(&t).unwrap(), 1);
        assert_eq!(exact_arboricity(&Graph::empty(3)).unwrap(), 0);
    }

    #[test]
    fn list_solver_basics() {
        let k2 = Graph::from_edges(2, vec![(0, 1)]).unwrap();
        assert!(list_coloring_solve(&k2, &[vec![0], vec![0]], 1000)
            .unwrap()
            .is_none());
        let c = list_coloring_solve(&k2, &[vec![0], vec![1]], 1000)
            .unwrap()
            .unwrap();
        assert!(verify_proper(&k2, &c));
        assert_eq!(c.of(0).slot, 0);
        assert_eq!(c.of(1).slot, 1);
        // triangle with lists sized two: 3 distinct colors needed -> depends
        let k3 = clique(3);
        assert!(list_coloring_solve(&k3, &[vec![0, 1], vec![0, 1], vec![0, 1]], 1000)
            .unwrap()
            .is_none());
        let c = list_coloring_solve(&k3, &[vec![0, 1], vec![1, 2], vec![0, 2]], 1000)
            .unwrap()
            .unwrap();
        assert!(verify_proper(&k3, &c));
    }

    #[test]
    fn list_solver_budget() {
        // An unsatisfiable instance engineered to branch: K4 where all lists
        // are the same 3 colors, with budget 1.
        let k4 = clique(4);
        let lists = vec![vec![0, 1, 2]; 4];
        assert!(matches!(
            list_coloring_solve(&k4, &lists, 1),
            Err(GraphError::SearchBudgetExceeded(1))
        ));
        assert!(list_coloring_solve(&k4, &lists, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn list_solver_respects_lists() {
        let p3 = Graph::from_edges(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = list_coloring_solve(&p3, &[vec![5], vec![5, 9], vec![9, 5]], 1000)
            .unwrap()
            .unwrap();
        assert!(verify_proper(&p3, &c));
        assert_eq!(c.of(0).slot, 5);
        assert_eq!(c.of(1).slot, 9);
    }
}
