//! Simple undirected graphs on dense vertex ids `0..n`, plus colorings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} out of range for n = {1}")]
    VertexOutOfRange(VertexId, usize),
    #[error("ordering is not a permutation of the vertex set")]
    BadOrdering,
    #[error("coloring covers {got} vertices, graph has {want}")]
    ColoringSizeMismatch { got: usize, want: usize },
    #[error("graph too large for exact search: n = {n}, limit = {limit}")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("exact search exceeded its node budget of {0}")]
    SearchBudgetExceeded(u64),
    #[error("color lists use {0} distinct colors, limit 128")]
    TooManyListColors(usize),
}

/// Undirected simple graph; adjacency lists are sorted and deduplicated.
/// Duplicate input edges collapse silently; self-loops are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<VertexId>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange(w, n));
                }
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut m = 0;
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
            m += l.len();
        }
        Ok(Graph { adj, m: m / 2 })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as canonical pairs (u < v), ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, l)| {
            let u = u as VertexId;
            l.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `verts`; vertex i of the result is `verts[i]`.
    /// `verts` must be sorted and duplicate-free.
    pub fn induced(&self, verts: &[VertexId]) -> Graph {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![u32::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); verts.len()];
        let mut m = 0;
        for (i, &v) in verts.iter().enumerate() {
            for &w in self.neighbors(v) {
                let lw = local[w as usize];
                if lw != u32::MAX {
                    adj[i].push(lw);
                }
            }
            adj[i].sort_unstable();
            m += adj[i].len();
        }
        Graph { adj, m: m / 2 }
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v && !self.has_edge(u, v) {
                    adj[u as usize].push(v);
                }
            }
        }
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, m }
    }
}

/// A color is a (palette tag, slot) pair; distinct tags never collide, which
/// lets per-block colorings use disjoint palettes by construction.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Color {
    pub tag: u32,
    pub slot: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<Color>,
    palette_size: usize,
}

impl Coloring {
    pub fn new(colors: Vec<Color>) -> Self {
        let mut distinct = colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        Coloring {
            colors,
            palette_size: distinct.len(),
        }
    }

    pub fn of(&self, v: VertexId) -> Color {
        self.colors[v as usize]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    /// Number of distinct colors actually used.
    pub fn palette_size(&self) -> usize {
        self.palette_size
    }
}

/// True iff `c` assigns a color to every vertex and no edge is monochromatic.
pub fn verify_proper(g: &Graph, c: &Coloring) -> bool {
    if c.len() != g.n() {
        return false;
    }
    g.edges().all(|(u, v)| c.of(u) != c.of(v))
}
