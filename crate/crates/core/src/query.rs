//! Coloring with oracle access only: the hidden graph is reachable solely
//! through Pair (adjacency) and Nbr (indexed neighbor) queries, and an
//! instrumented oracle counts every call.
//!
//! The algorithm runs two stages. Stage 1 walks every adjacency list until
//! the bottom marker and greedy-colors the fully recovered graph; it gives
//! up once it has spent floor(3 * n^1.5) queries, which it only does when
//! the degeneracy exceeds sqrt(n). Stage 2 falls back to the partition
//! route with guess k = ceil(sqrt(n)): draw psi, ask Pair for every
//! same-block pair in canonical order, and greedy-color blocks with
//! disjoint palettes.

use crate::degeneracy::{degeneracy_ordering, greedy_color};
use crate::graph::{Coloring, Graph, GraphError, VertexId};
use crate::ldp::{block_count, color_blocks, Block, LdpError, VertexPartition};
use crate::rng::stream_rng;
use crate::stream::sketch_budget;
use rand::seq::SliceRandom;
use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("stage-2 pair queries ({issued}) exceeded cap {cap}")]
    BudgetExceeded { issued: u64, cap: u64 },
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("adjacency lists are not a simple undirected graph: {0}")]
    InconsistentAdjacency(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ldp(#[from] LdpError),
}

/// Answer source behind the oracle. `nbr` is 1-indexed and must present
/// each vertex's neighbors in a fixed order, None past the degree.
pub trait OracleBackend {
    fn n(&self) -> usize;
    fn pair(&self, u: VertexId, v: VertexId) -> bool;
    fn nbr(&self, u: VertexId, j: u64) -> Option<VertexId>;
}

/// Counting wrapper; the only way algorithms get at a graph in this model.
pub struct QueryOracle {
    backend: Box<dyn OracleBackend>,
    pair_queries: u64,
    nbr_queries: u64,
}

struct GraphBackend {
    g: Graph,
    order: Vec<Vec<VertexId>>,
}

impl OracleBackend for GraphBackend {
    fn n(&self) -> usize {
        self.g.n()
    }

    fn pair(&self, u: VertexId, v: VertexId) -> bool {
        self.g.has_edge(u, v)
    }

    fn nbr(&self, u: VertexId, j: u64) -> Option<VertexId> {
        if j == 0 {
            return None;
        }
        self.order[u as usize].get(j as usize - 1).copied()
    }
}

impl QueryOracle {
    pub fn new(backend: Box<dyn OracleBackend>) -> Self {
        QueryOracle {
            backend,
            pair_queries: 0,
            nbr_queries: 0,
        }
    }

    /// Oracle over a materialized graph; each adjacency list gets an
    /// independent seeded random order, fixed for the oracle's lifetime.
    pub fn from_graph(g: Graph, seed: u64) -> Self {
        let order = (0..g.n())
            .map(|v| {
                let mut list: Vec<VertexId> = g.neighbors(v as VertexId).to_vec();
                list.shuffle(&mut stream_rng(seed, "oracle-adj", v as u64));
                list
            })
            .collect();
        QueryOracle::new(Box::new(GraphBackend { g, order }))
    }

    /// Oracle with an explicit adjacency order, validated to describe a
    /// simple undirected graph.
    pub fn from_adjacency(adj: Vec<Vec<VertexId>>) -> Result<Self, QueryError> {
        let n = adj.len();
        let mut edges = Vec::new();
        for (v, list) in adj.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for &w in list {
                if w as usize >= n {
                    return Err(QueryError::InconsistentAdjacency(format!(
                        "vertex {v} lists out-of-range neighbor {w}"
                    )));
                }
                if !seen.insert(w) {
                    return Err(QueryError::InconsistentAdjacency(format!(
                        "vertex {v} lists {w} twice"
                    )));
                }
                if !adj[w as usize].contains(&(v as VertexId)) {
                    return Err(QueryError::InconsistentAdjacency(format!(
                        "{v} lists {w} but not vice versa"
                    )));
                }
                edges.push((v as VertexId, w));
            }
        }
        let g = Graph::from_edges(n, edges)?;
        Ok(QueryOracle::new(Box::new(GraphBackend { g, order: adj })))
    }

    pub fn n(&self) -> usize {
        self.backend.n()
    }

    pub fn pair(&mut self, u: VertexId, v: VertexId) -> bool {
        self.pair_queries += 1;
        self.backend.pair(u, v)
    }

    pub fn nbr(&mut self, u: VertexId, j: u64) -> Option<VertexId> {
        self.nbr_queries += 1;
        self.backend.nbr(u, j)
    }

    pub fn pair_queries(&self) -> u64 {
        self.pair_queries
    }

    pub fn nbr_queries(&self) -> u64 {
        self.nbr_queries
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryBudgetReport {
    pub stage1_queries: u64,
    pub stage2_queries: u64,
    pub total: u64,
    pub stage1_completed: bool,
    pub stage1_threshold: u64,
    /// Stage-2 parameters, populated only when stage 2 ran.
    pub stage2_cap: Option<u64>,
    pub k: Option<usize>,
    pub ell: Option<usize>,
    pub s: Option<u64>,
    pub epsilon: Option<f64>,
}

pub fn stage1_threshold(n: usize) -> u64 {
    (3.0 * (n as f64).powf(1.5)).floor() as u64
}

fn stage2_cap(n: usize, s: u64, k: usize) -> u64 {
    (4 * (n as u128 * s as u128).div_ceil(2 * k as u128)) as u64
}

/// Two-stage oracle coloring. `epsilon` defaults to 1/log2 n, the value
/// that keeps the stage-2 palette within (1+o(1)) of the degeneracy.
pub fn query_color(
    oracle: &mut QueryOracle,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<(Coloring, QueryBudgetReport), QueryError> {
    let n = oracle.n();
    let threshold = stage1_threshold(n);

    let mut stage1_queries = 0u64;
    let mut found: Vec<(VertexId, VertexId)> = Vec::new();
    let mut completed = true;
    'walk: for v in 0..n as VertexId {
        let mut j = 1u64;
        loop {
            if stage1_queries == threshold {
                completed = false;
                break 'walk;
            }
            stage1_queries += 1;
            match oracle.nbr(v, j) {
                Some(w) => {
                    found.push((v, w));
                    j += 1;
                }
                None => break,
            }
        }
    }

    if completed {
        let g = Graph::from_edges(n, found)?;
        let cert = degeneracy_ordering(&g);
        let coloring = greedy_color(&g, &cert, 0)?;
        return Ok((
            coloring,
            QueryBudgetReport {
                stage1_queries,
                stage2_queries: 0,
                total: stage1_queries,
                stage1_completed: true,
                stage1_threshold: threshold,
                stage2_cap: None,
                k: None,
                ell: None,
                s: None,
                epsilon: None,
            },
        ));
    }
    drop(found);

    let k = (n as f64).sqrt().ceil() as usize;
    let eps = epsilon.unwrap_or(1.0 / (n.max(2) as f64).log2());
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(QueryError::BadEpsilon(eps));
    }
    let s = sketch_budget(n, eps);
    let ell = block_count(n, k.min(n), s);
    let part = VertexPartition::draw(
        n,
        ell,
        stream_rng(seed, "query-psi", 0).next_u64(),
    );
    let cap = stage2_cap(n, s, k);

    let lists = part.block_vertex_lists();
    let mut stage2_queries = 0u64;
    let mut blocks = Vec::with_capacity(lists.len());
    for vertices in lists {
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                stage2_queries += 1;
                if stage2_queries > cap {
                    return Err(QueryError::BudgetExceeded {
                        issued: stage2_queries,
                        cap,
                    });
                }
                if oracle.pair(vertices[i], vertices[j]) {
                    edges.push((i as VertexId, j as VertexId));
                }
            }
        }
        let graph = Graph::from_edges(vertices.len(), edges)?;
        blocks.push(Block { graph, vertices });
    }
    let coloring = color_blocks(n, &blocks)?;
    Ok((
        coloring,
        QueryBudgetReport {
            stage1_queries,
            stage2_queries,
            total: stage1_queries + stage2_queries,
            stage1_completed: false,
            stage1_threshold: threshold,
            stage2_cap: Some(cap),
            k: Some(k),
            ell: Some(ell),
            s: Some(s),
            epsilon: Some(eps),
        },
    ))
}
