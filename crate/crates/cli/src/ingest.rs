//! Edge-list files and output writers.
//!
//! Input format: whitespace-separated "u v" per line; '#' or '%' starts a
//! comment (whole-line or trailing). Vertex labels are arbitrary tokens
//! (1-indexed corpora work unchanged): they are remapped to dense 0-based
//! ids in order of first appearance and the map is saved next to outputs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use degcolor_core::{Color, Coloring, Graph, VertexId};

pub struct LoadedGraph {
    pub graph: Graph,
    /// labels[dense id] = original token from the file.
    pub labels: Vec<String>,
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', '%']) {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn load_edge_list(path: &Path) -> Result<LoadedGraph> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> VertexId {
        *ids.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            (labels.len() - 1) as VertexId
        })
    };
    for (no, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let body = strip_comment(&line);
        let mut fields = body.split_whitespace();
        let Some(u) = fields.next() else { continue };
        let (Some(v), None) = (fields.next(), fields.next()) else {
            bail!("{}:{}: expected \"u v\"", path.display(), no + 1);
        };
        if u == v {
            bail!("{}:{}: self-loop {u}", path.display(), no + 1);
        }
        let ui = intern(u, &mut labels);
        let vi = intern(v, &mut labels);
        edges.push((ui, vi));
    }
    let graph = Graph::from_edges(labels.len(), edges)?;
    Ok(LoadedGraph { graph, labels })
}

/// "label color" per line; colors are densely renumbered for output.
pub fn write_coloring(path: &Path, coloring: &Coloring, labels: &[String]) -> Result<()> {
    let mut distinct: Vec<Color> = (0..coloring.len() as VertexId)
        .map(|v| coloring.of(v))
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    let index: HashMap<Color, usize> = distinct.into_iter().zip(0..).collect();
    let mut out = BufWriter::new(File::create(path)?);
    for v in 0..coloring.len() {
        let c = index[&coloring.of(v as VertexId)];
        match labels.get(v) {
            Some(label) => writeln!(out, "{label} {c}")?,
            None => writeln!(out, "{v} {c}")?,
        }
    }
    Ok(())
}

/// "dense_id original_label" per line.
pub fn write_label_map(path: &Path, labels: &[String]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (i, label) in labels.iter().enumerate() {
        writeln!(out, "{i} {label}")?;
    }
    Ok(())
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
