//! One-pass coloring of a turnstile edge stream.
//!
//! The driver runs a ladder of geometric degeneracy guesses k = 2, 4, 8, …
//! ≤ 2n. Each guess draws its own random vertex partition into
//! ell = block_count(n, k, s) blocks and feeds only monochromatic updates
//! (both endpoints in one block) into a t-sparse recovery sketch (t = 2s)
//! and a support-size estimator. After the pass, a run aborts when the
//! estimated monochromatic support exceeds 5s/4; otherwise the sketch is
//! decoded and the blocks greedy-colored with disjoint palettes. The output
//! is the coloring from the non-aborting, successfully decoded run with the
//! smallest guess.
//!
//! The insertion-only variant stores monochromatic edges verbatim and
//! aborts past s of them; with a shared master seed it draws identical
//! partitions, so both paths give identical colorings whenever decoding
//! succeeds.

use crate::graph::{Coloring, Graph, VertexId};
use crate::ldp::{block_count, color_blocks, lambda, Block, VertexPartition};
use crate::rng::stream_rng;
use crate::sketch::{EdgeIndex, L0Sketch, SparseRecoverySketch};
use rand::RngCore;
use std::collections::HashMap;
use std::io::BufRead;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UpdateToken {
    pub u: VertexId,
    pub v: VertexId,
    /// +1 inserts the edge, -1 deletes it.
    pub delta: i8,
}

impl UpdateToken {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        UpdateToken { u, v, delta: 1 }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        UpdateToken { u, v, delta: -1 }
    }
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop update on vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: VertexId, n: usize },
    #[error("update delta must be +1 or -1, got {0}")]
    BadDelta(i8),
    #[error("running multiplicity of ({u}, {v}) reached {value}; simple streams stay within [-1, 1]")]
    MultiplicityViolation { u: VertexId, v: VertexId, value: i64 },
    #[error("final multiplicity of ({u}, {v}) is {value}; a simple graph needs 0 or 1")]
    FinalMultiplicity { u: VertexId, v: VertexId, value: i64 },
    #[error("insertion-only stream may not delete ({u}, {v})")]
    DeletionInInsertionOnly { u: VertexId, v: VertexId },
    #[error("duplicate insertion of ({u}, {v})")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("vertex count must be positive")]
    EmptyVertexSet,
    #[error("every guess run aborted or failed to decode")]
    AllRunsAborted,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Ldp(#[from] crate::ldp::LdpError),
    #[error("stream read failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// Winner: smallest non-aborting guess whose sketch decoded.
    Colored,
    /// Estimated monochromatic support above 5s/4 (or stored edges above s).
    Aborted,
    /// Attempted after smaller guesses failed, but the sketch would not peel.
    DecodeFailed,
    /// Larger guess than the winner; never post-processed.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct GuessRunSummary {
    pub k: usize,
    pub ell: usize,
    /// Deviation slack this guess promises: 3 * sqrt(k * ell * log2 n).
    pub lambda_at_guess: f64,
    pub status: RunStatus,
    pub l0_estimate: u64,
    pub mono_tokens: u64,
    pub sketch_cell_writes: u64,
    pub serialized_bits: u64,
}

/// Measured space: serialized sketch blobs (or stored edge lists) plus the
/// 64-bit partition seed, per guess run. Sums of recorded parts, never
/// formulas.
#[derive(Clone, Debug)]
pub struct SpaceLedger {
    pub bits_per_run: Vec<u64>,
    pub total_bits: u64,
}

impl SpaceLedger {
    fn new(bits_per_run: Vec<u64>) -> Self {
        let total_bits = bits_per_run.iter().sum();
        SpaceLedger {
            bits_per_run,
            total_bits,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StreamOutcome {
    pub coloring: Coloring,
    pub chosen_k: usize,
    pub ledger: SpaceLedger,
    pub runs: Vec<GuessRunSummary>,
    pub n: usize,
    pub epsilon: f64,
    /// Sketch budget s = ceil(epsilon^-2 * n * log2 n).
    pub s: u64,
    pub tokens: u64,
}

/// Guesses 2, 4, 8, … up to the largest power of two at most 2n.
pub fn guess_ladder(n: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    let mut k = 2usize;
    while k <= 2 * n {
        ks.push(k);
        k *= 2;
    }
    ks
}

/// s = ceil(epsilon^-2 * n * log2 n), floored at 1 so degenerate inputs
/// stay well-defined.
pub fn sketch_budget(n: usize, epsilon: f64) -> u64 {
    let raw = epsilon.powi(-2) * n as f64 * (n.max(2) as f64).log2();
    (raw.ceil() as u64).max(1)
}

fn derive_seed(master: u64, domain: &str, k: usize) -> u64 {
    stream_rng(master, domain, k as u64).next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Turnstile { multigraph: bool },
    InsertionOnly,
}

enum RunState {
    Sketched {
        sr: SparseRecoverySketch,
        l0: L0Sketch,
    },
    Stored {
        edges: Vec<EdgeIndex>,
        peak: u64,
        overflow: bool,
    },
}

struct GuessRun {
    k: usize,
    ell: usize,
    part: VertexPartition,
    mono_tokens: u64,
    state: RunState,
}

impl GuessRun {
    fn new(n: usize, k: usize, s: u64, master_seed: u64, mode: Mode) -> Self {
        let ell = block_count(n, k.min(n), s);
        let part = VertexPartition::draw(n, ell, derive_seed(master_seed, "stream-psi", k));
        let state = match mode {
            Mode::Turnstile { .. } => RunState::Sketched {
                sr: SparseRecoverySketch::new(n, 2 * s, derive_seed(master_seed, "stream-sr", k)),
                l0: L0Sketch::new(
                    0.25,
                    1.0 / (n.max(2) as f64),
                    n,
                    derive_seed(master_seed, "stream-l0", k),
                ),
            },
            Mode::InsertionOnly => RunState::Stored {
                edges: Vec::new(),
                peak: 0,
                overflow: false,
            },
        };
        GuessRun {
            k,
            ell,
            part,
            mono_tokens: 0,
            state,
        }
    }

    fn absorb(&mut self, e: EdgeIndex, u: VertexId, v: VertexId, delta: i64, s: u64) {
        if self.part.block_of(u) != self.part.block_of(v) {
            return;
        }
        self.mono_tokens += 1;
        match &mut self.state {
            RunState::Sketched { sr, l0 } => {
                sr.update(e, delta);
                l0.update(e, delta);
            }
            RunState::Stored {
                edges,
                peak,
                overflow,
            } => {
                if *overflow {
                    return;
                }
                if edges.len() as u64 + 1 > s {
                    *overflow = true;
                    edges.clear();
                    edges.shrink_to_fit();
                } else {
                    edges.push(e);
                    *peak = (*peak).max(edges.len() as u64);
                }
            }
        }
    }
}

/// Partition the decoded monochromatic edges into their blocks and
/// greedy-color every block with its own palette. Returns None when an edge
/// straddles blocks, which can only come from a corrupted decode.
fn color_mono_edges(
    n: usize,
    part: &VertexPartition,
    edges: &[EdgeIndex],
) -> Result<Option<Coloring>, StreamError> {
    let lists = part.block_vertex_lists();
    let mut local = vec![0u32; n];
    for list in &lists {
        for (i, &v) in list.iter().enumerate() {
            local[v as usize] = i as u32;
        }
    }
    let mut block_edges: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); lists.len()];
    for &e in edges {
        let (u, v) = e.endpoints();
        if v as usize >= n || part.block_of(u) != part.block_of(v) {
            return Ok(None);
        }
        block_edges[part.block_of(u) as usize].push((local[u as usize], local[v as usize]));
    }
    let mut blocks = Vec::with_capacity(lists.len());
    for (vertices, edges) in lists.into_iter().zip(block_edges) {
        let graph = Graph::from_edges(vertices.len(), edges)?;
        blocks.push(Block { graph, vertices });
    }
    Ok(Some(color_blocks(n, &blocks)?))
}

fn post_process(
    runs: Vec<GuessRun>,
    n: usize,
    s: u64,
) -> Result<(Coloring, usize, SpaceLedger, Vec<GuessRunSummary>), StreamError> {
    let mut bits_per_run = Vec::with_capacity(runs.len());
    let mut summaries = Vec::with_capacity(runs.len());
    let mut winner: Option<(usize, Coloring)> = None;
    for run in runs {
        const SEED_BITS: u64 = 64;
        let GuessRun {
            k,
            ell,
            part,
            mono_tokens,
            state,
        } = run;
        let (serialized_bits, l0_estimate, cell_writes, aborted) = match &state {
            RunState::Sketched { sr, l0 } => {
                let est = l0.estimate();
                (
                    sr.serialized_bits() + l0.serialized_bits() + SEED_BITS,
                    est,
                    sr.update_ops() * sr.rows() as u64 + l0.bucket_writes(),
                    est * 4 > 5 * s,
                )
            }
            RunState::Stored { peak, overflow, .. } => {
                (SEED_BITS + 64 * peak, *peak, *peak, *overflow)
            }
        };
        let status = if aborted {
            RunStatus::Aborted
        } else if winner.is_some() {
            RunStatus::Skipped
        } else {
            let colored = match state {
                RunState::Sketched { sr, .. } => match sr.into_decoded() {
                    Some(items) => {
                        let edges: Vec<EdgeIndex> = items.into_iter().map(|(e, _)| e).collect();
                        color_mono_edges(n, &part, &edges)?
                    }
                    None => None,
                },
                RunState::Stored { edges, .. } => color_mono_edges(n, &part, &edges)?,
            };
            match colored {
                Some(c) => {
                    winner = Some((k, c));
                    RunStatus::Colored
                }
                None => RunStatus::DecodeFailed,
            }
        };
        bits_per_run.push(serialized_bits);
        summaries.push(GuessRunSummary {
            k,
            ell,
            lambda_at_guess: lambda(k, ell, n),
            status,
            l0_estimate,
            mono_tokens,
            sketch_cell_writes: cell_writes,
            serialized_bits,
        });
    }
    let (chosen_k, coloring) = winner.ok_or(StreamError::AllRunsAborted)?;
    Ok((coloring, chosen_k, SpaceLedger::new(bits_per_run), summaries))
}

/// Validates one token and tracks running multiplicity; the multiplicity
/// map is harness-side state, never counted against the space budget.
fn check_token(
    t: &UpdateToken,
    n: usize,
    mode: Mode,
    mult: &mut HashMap<u64, i64>,
) -> Result<EdgeIndex, StreamError> {
    if t.u == t.v {
        return Err(StreamError::SelfLoop(t.u));
    }
    for w in [t.u, t.v] {
        if w as usize >= n {
            return Err(StreamError::VertexOutOfRange { v: w, n });
        }
    }
    if t.delta != 1 && t.delta != -1 {
        return Err(StreamError::BadDelta(t.delta));
    }
    let e = EdgeIndex::of(t.u, t.v);
    let x = mult.entry(e.0).or_insert(0);
    match mode {
        Mode::Turnstile { multigraph: false } => {
            *x += t.delta as i64;
            if x.abs() > 1 {
                return Err(StreamError::MultiplicityViolation {
                    u: t.u,
                    v: t.v,
                    value: *x,
                });
            }
        }
        Mode::Turnstile { multigraph: true } => {
            *x += t.delta as i64;
        }
        Mode::InsertionOnly => {
            if t.delta != 1 {
                return Err(StreamError::DeletionInInsertionOnly { u: t.u, v: t.v });
            }
            if *x != 0 {
                return Err(StreamError::DuplicateEdge { u: t.u, v: t.v });
            }
            *x = 1;
        }
    }
    Ok(e)
}

fn drive<I>(tokens: I, n: usize, epsilon: f64, seed: u64, mode: Mode) -> Result<StreamOutcome, StreamError>
where
    I: IntoIterator<Item = Result<UpdateToken, StreamError>>,
{
    if n == 0 {
        return Err(StreamError::EmptyVertexSet);
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(StreamError::BadEpsilon(epsilon));
    }
    let s = sketch_budget(n, epsilon);
    let mut runs: Vec<GuessRun> = guess_ladder(n)
        .into_iter()
        .map(|k| GuessRun::new(n, k, s, seed, mode))
        .collect();
    // Harness-side legality checker; not part of the algorithm's state and
    // never counted in the ledger.
    let mut mult: HashMap<u64, i64> = HashMap::new();
    let mut token_count = 0u64;
    let mut staged: Vec<UpdateToken> = Vec::new();
    match mode {
        Mode::InsertionOnly => {
            for token in tokens {
                let t = token?;
                let e = check_token(&t, n, mode, &mut mult)?;
                token_count += 1;
                for run in runs.iter_mut() {
                    run.absorb(e, t.u, t.v, t.delta as i64, s);
                }
            }
        }
        Mode::Turnstile { .. } => {
            // Stage the checked tokens and feed the runs one at a time, so
            // a single run's sketch tables are hot at once instead of every
            // run's competing per token. Harness-side staging only: the
            // sketch states, and with them the ledger, come out identical
            // to the interleaved order because the sketches are linear.
            for token in tokens {
                let t = token?;
                check_token(&t, n, mode, &mut mult)?;
                token_count += 1;
                staged.push(t);
            }
        }
    }
    if mode == (Mode::Turnstile { multigraph: false }) {
        for (&flat, &value) in mult.iter() {
            if value != 0 && value != 1 {
                let (u, v) = EdgeIndex(flat).endpoints();
                return Err(StreamError::FinalMultiplicity { u, v, value });
            }
        }
    }
    if mode != Mode::InsertionOnly {
        // The legality map already holds every edge's net multiplicity, and
        // the recovery sketch is linear, so one update per net-nonzero edge
        // lands it in the same state as the token-by-token order — cells the
        // raw order would only touch and cancel stay empty, which nonzero-
        // cell serialization never sees. The l0 sketch is cheap enough to
        // keep on the raw tokens, so its write counter reflects the stream
        // as received.
        let mut canon: Vec<(u32, u32, EdgeIndex, i64)> = mult
            .iter()
            .filter(|&(_, &m)| m != 0)
            .map(|(&flat, &m)| {
                let (u, v) = EdgeIndex(flat).endpoints();
                (u, v, EdgeIndex(flat), m)
            })
            .collect();
        canon.sort_unstable_by_key(|&(_, _, e, _)| e.0);
        let mut mono: Vec<(EdgeIndex, i64)> = Vec::new();
        for run in runs.iter_mut() {
            let part = &run.part;
            let mut raw = 0u64;
            if let RunState::Sketched { sr, l0 } = &mut run.state {
                for t in &staged {
                    if part.block_of(t.u) == part.block_of(t.v) {
                        raw += 1;
                        l0.update(EdgeIndex::of(t.u, t.v), t.delta as i64);
                    }
                }
                mono.clear();
                for &(u, v, e, m) in &canon {
                    if part.block_of(u) == part.block_of(v) {
                        mono.push((e, m));
                    }
                }
                sr.update_batch(&mono);
            }
            run.mono_tokens = raw;
        }
    }
    drop(mult);
    let (coloring, chosen_k, ledger, summaries) = post_process(runs, n, s)?;
    Ok(StreamOutcome {
        coloring,
        chosen_k,
        ledger,
        runs: summaries,
        n,
        epsilon,
        s,
        tokens: token_count,
    })
}

/// One-pass turnstile coloring; the final multiplicities must describe a
/// simple graph.
pub fn stream_color<I>(tokens: I, n: usize, epsilon: f64, seed: u64) -> Result<StreamOutcome, StreamError>
where
    I: IntoIterator<Item = Result<UpdateToken, StreamError>>,
{
    drive(tokens, n, epsilon, seed, Mode::Turnstile { multigraph: false })
}

/// Turnstile coloring of the simple graph underlying the nonzero
/// multiplicities; repeated insertions are legal and the support estimator
/// counts distinct pairs.
pub fn stream_color_multigraph<I>(
    tokens: I,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<StreamOutcome, StreamError>
where
    I: IntoIterator<Item = Result<UpdateToken, StreamError>>,
{
    drive(tokens, n, epsilon, seed, Mode::Turnstile { multigraph: true })
}

/// Insertion-only variant: stores monochromatic edges outright instead of
/// sketching, aborting a run past s stored edges.
pub fn stream_color_insertion_only<I>(
    tokens: I,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<StreamOutcome, StreamError>
where
    I: IntoIterator<Item = Result<UpdateToken, StreamError>>,
{
    drive(tokens, n, epsilon, seed, Mode::InsertionOnly)
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<UpdateToken>, StreamError> {
    let body = line.split('#').next().unwrap_or("");
    let mut fields = body.split_whitespace();
    let Some(u) = fields.next() else {
        return Ok(None);
    };
    let bad = |msg: String| StreamError::Parse { line: line_no, msg };
    let (v, sign) = match (fields.next(), fields.next(), fields.next()) {
        (Some(v), Some(sign), None) => (v, sign),
        _ => return Err(bad("expected \"u v +\" or \"u v -\"".into())),
    };
    let u: VertexId = u.parse().map_err(|_| bad(format!("bad vertex id {u:?}")))?;
    let v: VertexId = v.parse().map_err(|_| bad(format!("bad vertex id {v:?}")))?;
    let delta = match sign {
        "+" => 1,
        "-" => -1,
        other => return Err(bad(format!("bad sign {other:?}, expected + or -"))),
    };
    Ok(Some(UpdateToken { u, v, delta }))
}

/// Token iterator over "u v +" / "u v -" lines; '#' starts a comment and
/// blank lines are skipped.
pub struct TokenReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Iterator for TokenReader<R> {
    type Item = Result<UpdateToken, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line_no += 1;
            match self.lines.next()? {
                Err(e) => return Some(Err(e.into())),
                Ok(line) => match parse_line(&line, self.line_no) {
                    Err(e) => return Some(Err(e)),
                    Ok(Some(tok)) => return Some(Ok(tok)),
                    Ok(None) => continue,
                },
            }
        }
    }
}

pub fn replay_reader<R: BufRead>(reader: R) -> TokenReader<R> {
    TokenReader {
        lines: reader.lines(),
        line_no: 0,
    }
}

pub fn replay_file(path: &std::path::Path) -> Result<TokenReader<std::io::BufReader<std::fs::File>>, StreamError> {
    Ok(replay_reader(std::io::BufReader::new(std::fs::File::open(
        path,
    )?)))
}

/// Wrap a plain edge list as an insertion stream.
pub fn insertion_stream(
    edges: Vec<(VertexId, VertexId)>,
) -> impl Iterator<Item = Result<UpdateToken, StreamError>> {
    edges
        .into_iter()
        .map(|(u, v)| Ok(UpdateToken::insert(u, v)))
}
