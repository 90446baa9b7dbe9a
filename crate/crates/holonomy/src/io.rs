//! Graph and log files (JSON) and table exports (CSV).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use holonomy_core::construction::BuildLog;
use holonomy_core::typespace::TypeTable;
use holonomy_core::{Color, ColorAdjacency, ColoredGraph, VertexMeta};
use serde::{Deserialize, Serialize};

/// Provenance of one vertex as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaEntry {
    pub stage: u32,
    pub role: String,
}

/// On-disk graph: edges `[u, v, color]` with `u < v`, sorted, each once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: u32,
    pub edges: Vec<(u32, u32, Color)>,
    pub meta: Vec<MetaEntry>,
}

impl GraphFile {
    pub fn from_graph(g: &ColoredGraph) -> Self {
        let mut edges: Vec<(u32, u32, Color)> = g.edges().map(|(u, v, c)| (u.min(v), u.max(v), c)).collect();
        edges.sort_unstable();
        GraphFile {
            vertices: g.vertex_count() as u32,
            edges,
            meta: g.metas().iter().map(|m| MetaEntry { stage: m.stage, role: m.to_string() }).collect(),
        }
    }

    /// Rebuilds the graph; a repeated color at a vertex surfaces as
    /// [`holonomy_core::Error::ColorOccupied`].
    pub fn to_graph(&self) -> Result<ColoredGraph> {
        let n = self.vertices as usize;
        anyhow::ensure!(self.meta.len() == n, "meta has {} entries for {n} vertices", self.meta.len());
        let mut g = ColoredGraph::with_vertices(n);
        for (v, m) in self.meta.iter().enumerate() {
            let meta = VertexMeta::parse(m.stage, &m.role).with_context(|| format!("bad role {:?} at vertex {v}", m.role))?;
            g.set_meta(v as u32, meta);
        }
        for &(u, v, c) in &self.edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_graph(path: &Path, g: &ColoredGraph) -> Result<()> {
    write_json(path, &GraphFile::from_graph(g))
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    read_json(path)
}

pub fn write_log(path: &Path, log: &BuildLog) -> Result<()> {
    write_json_pretty(path, log)
}

pub fn read_log(path: &Path) -> Result<BuildLog> {
    read_json(path)
}

/// Rows `(r, fingerprint, count, root_degree, parent)`.
pub fn write_type_table(path: &Path, table: &TypeTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r", "fingerprint", "count", "root_degree", "parent"])?;
    for level in &table.levels {
        for (fp, stats) in &level.stats {
            let parent = level.parent.get(fp).map(|p| p.to_string()).unwrap_or_default();
            w.write_record([level.radius.to_string(), fp.to_string(), stats.count.to_string(), stats.root_degree.to_string(), parent])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyRow {
    pub r: u32,
    pub fingerprint: String,
    pub count: u64,
    pub m_alpha: u32,
}

pub fn write_holonomy(path: &Path, rows: &[HolonomyRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
