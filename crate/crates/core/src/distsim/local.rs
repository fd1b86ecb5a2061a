//! LOCAL-model coloring: one silent round to draw block colors, one round of
//! neighbor exchange so every vertex knows which incident edges stay inside
//! its block, then a pluggable per-block subroutine.
//!
//! The driver only charges rounds and audits locality; the subroutine runs
//! centrally and reports how many rounds the distributed version would take.
//! The stand-in greedy routine answers with the ruling-set style bound
//! ceil(log_t n_b) + log* n_b for a block of n_b vertices.

use super::{DistError, Verdict};
use crate::degeneracy::{degeneracy_ordering, greedy_color};
use crate::graph::{Color, Coloring, Graph, VertexId};
use crate::ldp::{block_count, lambda, VertexPartition, DEFAULT_SPARSITY_CONSTANT};

#[derive(Clone, Copy, Debug)]
pub struct LocalConfig {
    /// Estimate (upper bound works) of the arboricity.
    pub alpha_estimate: usize,
    /// Speed/palette trade-off knob; must satisfy 2 < t <= sqrt(n / log2 n).
    pub t: f64,
    pub c_sparsity: f64,
}

impl LocalConfig {
    pub fn new(alpha_estimate: usize, t: f64) -> Self {
        LocalConfig {
            alpha_estimate,
            t,
            c_sparsity: DEFAULT_SPARSITY_CONSTANT,
        }
    }
}

/// Per-block coloring plugin. Gets the block graph, the degeneracy budget b
/// the driver promises for the block, and the trade-off knob t; returns the
/// coloring and the number of LOCAL rounds it charges.
pub trait BlockColoringRoutine {
    fn color_block(&self, block: &Graph, b: usize, t: f64) -> (Coloring, u64);
}

/// Centralized stand-in for the distributed low-degeneracy subroutine:
/// colors by the degeneracy order and charges ceil(log_t n_b) + log*2(n_b)
/// rounds, the cost profile the palette contract is priced against.
pub struct GreedyBlockRoutine;

fn log_star2(x: f64) -> u64 {
    let mut v = x;
    let mut c = 0;
    while v > 1.0 {
        v = v.log2();
        c += 1;
    }
    c
}

impl BlockColoringRoutine for GreedyBlockRoutine {
    fn color_block(&self, block: &Graph, _b: usize, t: f64) -> (Coloring, u64) {
        let cert = degeneracy_ordering(block);
        let coloring = greedy_color(block, &cert, 0).expect("certificate is fresh");
        let nb = block.n() as f64;
        let rounds = if block.n() <= 1 {
            0
        } else {
            ((nb.log2() / t.log2()) - 1e-9).ceil().max(0.0) as u64 + log_star2(nb)
        };
        (coloring, rounds)
    }
}

#[derive(Clone, Debug)]
pub struct LocalTranscript {
    /// Directed round-1 messages; locality audits check each is an edge.
    pub exchanges: Vec<(VertexId, VertexId)>,
    pub bits_per_message: u64,
    pub subroutine_rounds: u64,
    pub total_rounds: u64,
}

impl LocalTranscript {
    /// Every message must travel along an edge of g (1-hop locality).
    pub fn locality_audit(&self, g: &Graph) -> Verdict {
        if self
            .exchanges
            .iter()
            .all(|&(src, dst)| g.has_edge(src, dst))
        {
            Verdict::Conforming
        } else {
            Verdict::Nonconforming
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalOutcome {
    pub coloring: Coloring,
    pub k: usize,
    pub ell: usize,
    /// Degeneracy budget promised to each block.
    pub block_bound: usize,
    /// Palette contract per block: ceil(t * b^2).
    pub palette_cap: usize,
    pub transcript: LocalTranscript,
}

pub fn local_color(g: &Graph, cfg: LocalConfig, seed: u64) -> Result<LocalOutcome, DistError> {
    local_color_with(g, cfg, seed, &GreedyBlockRoutine)
}

pub fn local_color_with(
    g: &Graph,
    cfg: LocalConfig,
    seed: u64,
    routine: &dyn BlockColoringRoutine,
) -> Result<LocalOutcome, DistError> {
    let n = g.n();
    if n == 0 {
        return Err(DistError::BadParameter("graph has no vertices".into()));
    }
    if cfg.alpha_estimate == 0 {
        return Err(DistError::BadParameter(
            "arboricity estimate must be positive".into(),
        ));
    }
    let logn = (n.max(2) as f64).log2();
    let t_max = (n as f64 / logn).sqrt();
    if !(cfg.t > 2.0 && cfg.t <= t_max) {
        return Err(DistError::BadParameter(format!(
            "t must lie in (2, {t_max:.3}], got {}",
            cfg.t
        )));
    }
    if cfg.c_sparsity <= 0.0 {
        return Err(DistError::BadParameter(
            "sparsity constant must be positive".into(),
        ));
    }

    // alpha <= kappa <= 2 alpha - 1, so guess k = 2 alpha.
    let k = (2 * cfg.alpha_estimate).clamp(1, n);
    let s = (cfg.c_sparsity * n as f64 * logn).ceil().max(1.0) as u64;
    let ell = block_count(n, k, s);

    // Round 0: silent random draw. Round 1: tell every neighbor your block.
    let part = VertexPartition::draw(n, ell, seed);
    let bits_per_message = if ell > 1 {
        (64 - (ell as u64 - 1).leading_zeros()) as u64
    } else {
        0
    };
    let mut exchanges = Vec::with_capacity(2 * g.edge_count());
    for (u, v) in g.edges() {
        exchanges.push((u, v));
        exchanges.push((v, u));
    }

    let b = ((k as f64 + lambda(k, ell, n)) / ell as f64).ceil() as usize;
    let palette_cap = (cfg.t * (b as f64) * (b as f64)).ceil() as usize;

    let mut colors = vec![Color { tag: 0, slot: 0 }; n];
    let mut subroutine_rounds = 0u64;
    for (b_idx, members) in part.block_vertex_lists().into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let block = g.induced(&members);
        let (block_coloring, rounds) = routine.color_block(&block, b, cfg.t);
        if block_coloring.palette_size() > palette_cap {
            return Err(DistError::ContractViolation {
                got: block_coloring.palette_size(),
                bound: palette_cap,
            });
        }
        subroutine_rounds = subroutine_rounds.max(rounds);
        for (i, &v) in members.iter().enumerate() {
            colors[v as usize] = Color {
                tag: b_idx as u32,
                slot: block_coloring.of(i as VertexId).slot,
            };
        }
    }

    Ok(LocalOutcome {
        coloring: Coloring::new(colors),
        k,
        ell,
        block_bound: b,
        palette_cap,
        transcript: LocalTranscript {
            exchanges,
            bits_per_message,
            subroutine_rounds,
            total_rounds: 2 + subroutine_rounds,
        },
    })
}
