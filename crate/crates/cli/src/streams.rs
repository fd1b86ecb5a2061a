//! Turnstile stream synthesis: randomly ordered edge inserts with optional
//! insert-then-delete noise edges that cancel before the stream ends.

use std::collections::HashSet;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Result;
use degcolor_core::rng::{stream_rng, uniform_below};
use degcolor_core::stream::UpdateToken;
use degcolor_core::{Graph, VertexId};
use rand::RngCore;

/// Tokens for g in random order. `noise` is the fraction of extra non-edges
/// (relative to the edge count) that get inserted and later deleted, so the
/// final support is exactly g.
pub fn turnstile_tokens(g: &Graph, noise: f64, seed: u64) -> Vec<UpdateToken> {
    assert!((0.0..=1.0).contains(&noise));
    let n = g.n();
    let mut rng = stream_rng(seed, "cli-turnstile", 0);
    let mut keyed: Vec<(u64, UpdateToken)> = Vec::new();
    for (u, v) in g.edges() {
        keyed.push((rng.next_u64(), UpdateToken::insert(u, v)));
    }
    let extra = (g.edge_count() as f64 * noise).round() as usize;
    let mut used: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut added = 0;
    // planted-style inputs are sparse, so rejection sampling terminates fast
    while added < extra && n >= 2 {
        let u = uniform_below(&mut rng, n as u64) as VertexId;
        let v = uniform_below(&mut rng, n as u64) as VertexId;
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if g.has_edge(u, v) || !used.insert(key) {
            continue;
        }
        let (mut a, mut b) = (rng.next_u64(), rng.next_u64());
        while a == b {
            b = rng.next_u64();
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        keyed.push((a, UpdateToken::insert(key.0, key.1)));
        keyed.push((b, UpdateToken::delete(key.0, key.1)));
        added += 1;
    }
    keyed.sort_by_key(|&(k, _)| k);
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// Insert-only tokens in random order.
pub fn insertion_tokens(g: &Graph, seed: u64) -> Vec<UpdateToken> {
    turnstile_tokens(g, 0.0, seed)
}

/// "u v +" / "u v -" lines, the format `replay_file` reads back.
pub fn write_tokens(path: &Path, tokens: &[UpdateToken]) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for t in tokens {
        writeln!(out, "{} {} {}", t.u, t.v, if t.delta > 0 { '+' } else { '-' })?;
    }
    Ok(())
}
