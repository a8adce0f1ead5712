//! Measurement rows and their CSV form.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use bits_kdtree::VisitStats;

pub const COLUMNS: [&str; 16] = [
    "engine",
    "dist",
    "n",
    "k",
    "phase",
    "id",
    "results",
    "tree_nodes",
    "descents",
    "trie_nodes",
    "threads",
    "cross_links",
    "trie_lookups",
    "level_candidates",
    "touches",
    "wall_ns",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Bits,
    KdTree,
    BruteForce,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Bits => "bits",
            Engine::KdTree => "kdtree",
            Engine::BruteForce => "brute",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Build,
    Insert,
    Query,
    Delete,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Build => "build",
            Phase::Insert => "insert",
            Phase::Query => "query",
            Phase::Delete => "delete",
        })
    }
}

/// One measurement. Counters that do not apply to an engine stay zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub engine: Engine,
    pub dist: String,
    pub n: usize,
    pub k: usize,
    pub phase: Phase,
    pub id: usize,
    pub results: u64,
    /// Tree nodes examined for the tree engines, points scanned for brute
    /// force.
    pub tree_nodes: u64,
    /// Child links followed while stepping to an inorder successor.
    pub descents: u64,
    pub trie_nodes: u64,
    pub threads: u64,
    pub cross_links: u64,
    pub trie_lookups: u64,
    pub level_candidates: Vec<u64>,
    pub touches: u64,
    pub wall_ns: u64,
}

impl Row {
    pub fn new(engine: Engine, phase: Phase, dist: &str, n: usize, k: usize, id: usize) -> Self {
        Row {
            engine,
            dist: dist.to_string(),
            n,
            k,
            phase,
            id,
            results: 0,
            tree_nodes: 0,
            descents: 0,
            trie_nodes: 0,
            threads: 0,
            cross_links: 0,
            trie_lookups: 0,
            level_candidates: Vec::new(),
            touches: 0,
            wall_ns: 0,
        }
    }

    pub fn with_stats(mut self, stats: &VisitStats) -> Self {
        self.tree_nodes = stats.tree_nodes_visited;
        self.descents = stats.descent_steps;
        self.trie_nodes = stats.trie_nodes_visited;
        self.threads = stats.threads_followed;
        self.cross_links = stats.cross_links_followed;
        self.trie_lookups = stats.trie_lookups;
        self.level_candidates = stats.per_level_candidates.clone();
        self
    }

    fn record(&self) -> [String; 16] {
        let candidates: Vec<String> = self.level_candidates.iter().map(u64::to_string).collect();
        [
            self.engine.to_string(),
            self.dist.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.phase.to_string(),
            self.id.to_string(),
            self.results.to_string(),
            self.tree_nodes.to_string(),
            self.descents.to_string(),
            self.trie_nodes.to_string(),
            self.threads.to_string(),
            self.cross_links.to_string(),
            self.trie_lookups.to_string(),
            candidates.join(";"),
            self.touches.to_string(),
            self.wall_ns.to_string(),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    /// Comment lines written above the column header, `#` included.
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    /// Findings appended below the rows.
    pub notes: Vec<String>,
}

impl Report {
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        for line in &self.header {
            writeln!(w, "{line}")?;
        }
        let mut wtr = csv::Writer::from_writer(&mut w);
        wtr.write_record(COLUMNS)?;
        for row in &self.rows {
            wtr.write_record(row.record())?;
        }
        wtr.flush()?;
        drop(wtr);
        for line in self.summary() {
            writeln!(w, "{line}")?;
        }
        for note in &self.notes {
            writeln!(w, "# note {note}")?;
        }
        Ok(())
    }

    /// Percentiles of node visits, touches and wall time per engine, phase
    /// and size.
    pub fn summary(&self) -> Vec<String> {
        let mut groups: BTreeMap<(usize, Phase, Engine), Vec<&Row>> = BTreeMap::new();
        for row in &self.rows {
            groups
                .entry((row.n, row.phase, row.engine))
                .or_default()
                .push(row);
        }
        groups
            .into_iter()
            .map(|((n, phase, engine), rows)| {
                let pick = |f: fn(&Row) -> u64| {
                    let mut v: Vec<u64> = rows.iter().map(|r| f(r)).collect();
                    v.sort_unstable();
                    format!(
                        "p50={} p90={} p99={}",
                        percentile(&v, 0.5),
                        percentile(&v, 0.9),
                        percentile(&v, 0.99)
                    )
                };
                format!(
                    "# summary engine={engine} phase={phase} n={n} rows={} tree_nodes[{}] touches[{}] wall_ns[{}]",
                    rows.len(),
                    pick(|r| r.tree_nodes),
                    pick(|r| r.touches),
                    pick(|r| r.wall_ns),
                )
            })
            .collect()
    }
}

/// Nearest-rank percentile of sorted values.
pub fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
