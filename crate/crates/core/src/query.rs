//! Orthogonal range search over a [`BitsKdTree`].

use crate::index::{BitsKdTree, Point};
use crate::tree::NodeId;
use crate::{Coord, Error, Result};

/// Axis-aligned box with inclusive bounds, one `(lo, hi)` per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QueryWindow {
    ranges: Vec<(Coord, Coord)>,
}

impl QueryWindow {
    pub fn new(ranges: Vec<(Coord, Coord)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::Config(
                "a window needs at least one dimension".into(),
            ));
        }
        for (dim, &(lo, hi)) in ranges.iter().enumerate() {
            if lo > hi {
                return Err(Error::Window { dim, lo, hi });
            }
        }
        Ok(QueryWindow { ranges })
    }

    /// The box covering `[0, universe)` in every dimension.
    pub fn full(dims: usize, universe: u64) -> Self {
        let hi = (universe.saturating_sub(1)).min(Coord::MAX as u64) as Coord;
        QueryWindow {
            ranges: vec![(0, hi); dims],
        }
    }

    pub fn ranges(&self) -> &[(Coord, Coord)] {
        &self.ranges
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    pub fn contains(&self, p: &[Coord]) -> bool {
        p.len() == self.ranges.len()
            && p.iter()
                .zip(&self.ranges)
                .all(|(&x, &(lo, hi))| lo <= x && x <= hi)
    }
}

/// Work done by one query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VisitStats {
    /// Level-tree nodes examined by the group walks, including the one probe
    /// per walk that ends it.
    pub tree_nodes_visited: u64,
    /// Trie nodes entered by lookups.
    pub trie_nodes_visited: u64,
    pub trie_lookups: u64,
    /// Successor steps taken along a right thread.
    pub threads_followed: u64,
    /// Child links descended while stepping to a successor.
    pub descent_steps: u64,
    pub cross_links_followed: u64,
    pub group_walks: u64,
    /// Matching nodes found at each level.
    pub per_level_candidates: Vec<u64>,
}

impl VisitStats {
    /// Candidates over every level except the last.
    pub fn inner_candidates(&self) -> u64 {
        let n = self.per_level_candidates.len().saturating_sub(1);
        self.per_level_candidates[..n].iter().sum()
    }

    pub fn add(&mut self, other: &VisitStats) {
        self.tree_nodes_visited += other.tree_nodes_visited;
        self.trie_nodes_visited += other.trie_nodes_visited;
        self.trie_lookups += other.trie_lookups;
        self.threads_followed += other.threads_followed;
        self.descent_steps += other.descent_steps;
        self.cross_links_followed += other.cross_links_followed;
        self.group_walks += other.group_walks;
        if self.per_level_candidates.len() < other.per_level_candidates.len() {
            self.per_level_candidates
                .resize(other.per_level_candidates.len(), 0);
        }
        for (a, b) in self
            .per_level_candidates
            .iter_mut()
            .zip(&other.per_level_candidates)
        {
            *a += b;
        }
    }
}

impl BitsKdTree {
    fn check_window(&self, window: &QueryWindow) -> Result<()> {
        let config = self.config();
        if window.dims() != config.dims() {
            return Err(Error::Dimension {
                expected: config.dims(),
                got: window.dims(),
            });
        }
        let universe = config.universe();
        for &(_, hi) in window.ranges() {
            if hi as u64 >= universe {
                return Err(Error::Domain {
                    value: hi as u64,
                    universe,
                });
            }
        }
        Ok(())
    }

    /// All stored points inside `window`, in lexicographic order.
    pub fn window_query(&self, window: &QueryWindow) -> Result<(Vec<Point>, VisitStats)> {
        self.check_window(window)?;
        let k = self.dims();
        let mut stats = VisitStats {
            per_level_candidates: vec![0; k],
            ..VisitStats::default()
        };
        let first = self.level(0).first_node();
        if first.is_dummy() {
            return Ok((Vec::new(), stats));
        }
        let (lo, hi) = window.ranges()[0];
        let mut frontier = Vec::new();
        self.walk_group(0, first, lo, hi, &mut stats, &mut frontier);
        for level in 1..k {
            let (lo, hi) = window.ranges()[level];
            let mut next = Vec::new();
            for &node in &frontier {
                stats.cross_links_followed += 1;
                let head = self
                    .level(level - 1)
                    .payload(node)
                    .cross
                    .expect("non-final level node has a cross link");
                self.walk_group(level, head, lo, hi, &mut stats, &mut next);
            }
            frontier = next;
        }
        let last = self.level(k - 1);
        let points = frontier
            .into_iter()
            .map(|id| Point::from(last.key(id)))
            .collect();
        Ok((points, stats))
    }

    /// Members of the group headed by `head` in `level` whose value in that
    /// dimension lies in `[lo, hi]`, in order.
    pub fn level_candidates(
        &self,
        level: usize,
        head: NodeId,
        lo: Coord,
        hi: Coord,
        stats: &mut VisitStats,
    ) -> Vec<NodeId> {
        if stats.per_level_candidates.len() <= level {
            stats.per_level_candidates.resize(level + 1, 0);
        }
        let mut out = Vec::new();
        self.walk_group(level, head, lo, hi, stats, &mut out);
        out
    }

    fn walk_group(
        &self,
        level: usize,
        head: NodeId,
        lo: Coord,
        hi: Coord,
        stats: &mut VisitStats,
        out: &mut Vec<NodeId>,
    ) {
        let tree = self.level(level);
        let head_value = tree.key(head)[level];
        if head_value > hi {
            return;
        }
        let start = if head_value >= lo {
            head
        } else {
            stats.trie_lookups += 1;
            let trie = self.head_trie(level, head);
            match trie.succ_geq_counted(lo, &mut stats.trie_nodes_visited) {
                Some(d) if d.key() <= hi => d.target(),
                _ => return,
            }
        };
        stats.group_walks += 1;
        let prefix = &tree.key(head)[..level];
        let mut at = start;
        while !at.is_dummy() {
            stats.tree_nodes_visited += 1;
            let key = tree.key(at);
            if &key[..level] != prefix || key[level] > hi {
                break;
            }
            out.push(at);
            stats.per_level_candidates[level] += 1;
            let right = tree.right(at);
            if right.is_thread() {
                stats.threads_followed += 1;
                at = right.target();
            } else {
                let mut next = right.target();
                stats.descent_steps += 1;
                while let Some(l) = tree.left(next).as_child() {
                    stats.descent_steps += 1;
                    next = l;
                }
                at = next;
            }
        }
    }
}
