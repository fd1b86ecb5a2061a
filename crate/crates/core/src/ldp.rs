//! Low-degeneracy partition: split the vertex set into `ell` uniform random
//! blocks so that, for a graph of degeneracy kappa and a guess k with
//! kappa <= k <= 2*kappa, each block w.h.p. has degeneracy at most
//! (kappa + lambda)/ell, at most 2n/ell vertices, and at most s
//! monochromatic edges in total, where lambda = 3*sqrt(kappa*ell*log2 n).
//! Coloring each block greedily with its own palette then needs at most
//! kappa + lambda + ell colors overall.

use serde::Serialize;
use thiserror::Error;

use crate::degeneracy::{degeneracy_ordering, greedy_color};
use crate::graph::{Coloring, Graph, VertexId};
use crate::rng::{stream_rng, uniform_below};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LdpError {
    #[error("guess k = {k} outside [1, n] for n = {n}")]
    GuessOutOfRange { k: usize, n: usize },
    #[error("sketch budget s must be positive")]
    ZeroBudget,
    #[error("empty vertex set")]
    EmptyGraph,
    #[error("partition has {got} vertices, graph has {want}")]
    PartitionSizeMismatch { got: usize, want: usize },
}

/// Number of blocks: ceil(2nk/s), clamped to [1, n].
pub fn block_count(n: usize, k: usize, s: u64) -> usize {
    assert!(s > 0 && n > 0);
    let num = 2u128 * n as u128 * k as u128;
    let ell = num.div_ceil(s as u128).max(1);
    ell.min(n as u128) as usize
}

/// lambda = 3 * sqrt(kappa * ell * log2 n); the degeneracy slack term.
pub fn lambda(kappa: usize, ell: usize, n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    3.0 * ((kappa as f64) * (ell as f64) * (n as f64).log2()).sqrt()
}

/// Parameters for a low-degeneracy partition of an n-vertex graph under
/// degeneracy guess k with space budget s.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LdpParams {
    pub n: usize,
    pub k: usize,
    pub s: u64,
    pub ell: usize,
    /// Constant in the sparsity prerequisite s >= c * n * log2 n.
    pub c_sparsity: f64,
}

pub const DEFAULT_SPARSITY_CONSTANT: f64 = 48.0;

pub fn ldp_params(n: usize, k: usize, s: u64) -> Result<LdpParams, LdpError> {
    ldp_params_with_constant(n, k, s, DEFAULT_SPARSITY_CONSTANT)
}

pub fn ldp_params_with_constant(
    n: usize,
    k: usize,
    s: u64,
    c_sparsity: f64,
) -> Result<LdpParams, LdpError> {
    if n == 0 {
        return Err(LdpError::EmptyGraph);
    }
    if k < 1 || k > n {
        return Err(LdpError::GuessOutOfRange { k, n });
    }
    if s == 0 {
        return Err(LdpError::ZeroBudget);
    }
    Ok(LdpParams {
        n,
        k,
        s,
        ell: block_count(n, k, s),
        c_sparsity,
    })
}

impl LdpParams {
    /// Whether s clears the c * n * log2 n floor the guarantees assume.
    pub fn meets_sparsity_floor(&self) -> bool {
        self.s as f64 >= self.c_sparsity * self.n as f64 * (self.n.max(2) as f64).log2()
    }
}

/// A block assignment psi: V -> [ell], drawn uniformly and independently
/// per vertex. Reconstructible from (n, ell, seed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    pub ell: usize,
    pub psi: Vec<u32>,
    pub seed: u64,
}

impl VertexPartition {
    pub fn draw(n: usize, ell: usize, seed: u64) -> Self {
        assert!(ell >= 1);
        let mut rng = stream_rng(seed, "ldp-psi", 0);
        let psi = (0..n)
            .map(|_| uniform_below(&mut rng, ell as u64) as u32)
            .collect();
        VertexPartition { ell, psi, seed }
    }

    pub fn block_of(&self, v: VertexId) -> u32 {
        self.psi[v as usize]
    }

    /// Vertex lists per block, ascending within each block.
    pub fn block_vertex_lists(&self) -> Vec<Vec<VertexId>> {
        let mut lists = vec![Vec::new(); self.ell];
        for (v, &b) in self.psi.iter().enumerate() {
            lists[b as usize].push(v as VertexId);
        }
        lists
    }
}

pub fn random_partition(params: &LdpParams, seed: u64) -> VertexPartition {
    VertexPartition::draw(params.n, params.ell, seed)
}

/// One block of a partitioned graph: the induced subgraph plus the map from
/// block-local ids back to the original vertex ids.
#[derive(Clone, Debug)]
pub struct Block {
    pub graph: Graph,
    pub vertices: Vec<VertexId>,
}

/// Induced subgraphs per block. Every vertex of `g` lands in exactly one
/// block, so the blocks partition the vertex set (some may be empty).
pub fn blocks(g: &Graph, part: &VertexPartition) -> Result<Vec<Block>, LdpError> {
    if part.psi.len() != g.n() {
        return Err(LdpError::PartitionSizeMismatch {
            got: part.psi.len(),
            want: g.n(),
        });
    }
    Ok(part
        .block_vertex_lists()
        .into_iter()
        .map(|verts| Block {
            graph: g.induced(&verts),
            vertices: verts,
        })
        .collect())
}

/// Measured outcome of one partition draw against the three guarantees.
#[derive(Clone, Debug, Serialize)]
pub struct LdpReport {
    pub kappa: usize,
    pub ell: usize,
    pub s: u64,
    pub lambda: f64,
    pub block_sizes: Vec<usize>,
    pub block_kappas: Vec<usize>,
    pub monochromatic_edges: u64,
    /// (i) every block's degeneracy is at most (kappa + lambda)/ell
    pub degeneracy_ok: bool,
    /// (ii) every block has at most 2n/ell vertices
    pub size_ok: bool,
    /// (iii) at most s monochromatic edges in total
    pub sparsity_ok: bool,
}

/// Audits a drawn partition against the three guarantees, measuring the true
/// degeneracy of `g` and of every block.
pub fn verify_ldp(g: &Graph, part: &VertexPartition, params: &LdpParams) -> Result<LdpReport, LdpError> {
    let bl = blocks(g, part)?;
    let kappa = degeneracy_ordering(g).kappa;
    let lam = lambda(kappa, part.ell, g.n());
    let block_sizes: Vec<usize> = bl.iter().map(|b| b.graph.n()).collect();
    let block_kappas: Vec<usize> = bl
        .iter()
        .map(|b| degeneracy_ordering(&b.graph).kappa)
        .collect();
    let mono: u64 = bl.iter().map(|b| b.graph.edge_count() as u64).sum();
    let degeneracy_bound = (kappa as f64 + lam) / part.ell as f64;
    let size_bound = 2.0 * g.n() as f64 / part.ell as f64;
    Ok(LdpReport {
        kappa,
        ell: part.ell,
        s: params.s,
        lambda: lam,
        degeneracy_ok: block_kappas.iter().all(|&k| k as f64 <= degeneracy_bound),
        size_ok: block_sizes.iter().all(|&z| z as f64 <= size_bound),
        sparsity_ok: mono <= params.s,
        block_sizes,
        block_kappas,
        monochromatic_edges: mono,
    })
}

/// Colors each block greedily along its own degeneracy ordering, tagging
/// palettes by block id, and stitches the result back onto `g`'s vertices.
/// Cross-block edges are bichromatic because tags differ; the total palette
/// is the sum of per-block palettes.
pub fn color_via_ldp(g: &Graph, part: &VertexPartition) -> Result<Coloring, LdpError> {
    let bl = blocks(g, part)?;
    color_blocks(g.n(), &bl)
}

/// Shared with the streaming/query/distributed paths: greedy-color a list of
/// blocks with disjoint palettes and assemble a full-graph coloring.
pub fn color_blocks(n: usize, blocks: &[Block]) -> Result<Coloring, LdpError> {
    let mut colors = vec![crate::graph::Color { tag: 0, slot: 0 }; n];
    let mut seen = vec![false; n];
    for (i, b) in blocks.iter().enumerate() {
        let cert = degeneracy_ordering(&b.graph);
        let c = greedy_color(&b.graph, &cert, i as u32).expect("fresh certificate");
        for (local, &orig) in b.vertices.iter().enumerate() {
            colors[orig as usize] = c.of(local as u32);
            seen[orig as usize] = true;
        }
    }
    let covered = seen.iter().filter(|&&s| s).count();
    if covered != n {
        return Err(LdpError::PartitionSizeMismatch { got: covered, want: n });
    }
    Ok(Coloring::new(colors))
}
