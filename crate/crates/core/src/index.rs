//! The multi-level index: one threaded tree per dimension, cross links
//! between consecutive levels and a threaded trie on every cross-link node.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::tree::{NodeId, Tree, TreeViolation};
use crate::trie::{ThreadedTrie, TrieConfig, TrieViolation};
use crate::{Coord, Error, Meter, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexConfig {
    dims: usize,
    trie: TrieConfig,
}

impl IndexConfig {
    /// `dims` dimensions, every coordinate written as `width` digits in
    /// base `radix`.
    pub fn new(dims: usize, radix: u32, width: u32) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Config("at least one dimension is required".into()));
        }
        Ok(IndexConfig {
            dims,
            trie: TrieConfig::new(radix, width)?,
        })
    }

    /// Radix 16 and the smallest width covering `[0, bound)`.
    pub fn for_bound(dims: usize, bound: u64) -> Result<Self> {
        Self::with_radix(dims, 16, bound)
    }

    pub fn with_radix(dims: usize, radix: u32, bound: u64) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Config("at least one dimension is required".into()));
        }
        Ok(IndexConfig {
            dims,
            trie: TrieConfig::for_bound(radix, bound)?,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn radix(&self) -> u32 {
        self.trie.radix()
    }

    pub fn width(&self) -> u32 {
        self.trie.width()
    }

    pub fn universe(&self) -> u64 {
        self.trie.universe()
    }

    pub fn trie_config(&self) -> TrieConfig {
        self.trie
    }

    pub(crate) fn check_coords(&self, coords: &[Coord]) -> Result<()> {
        if coords.len() != self.dims {
            return Err(Error::Dimension {
                expected: self.dims,
                got: coords.len(),
            });
        }
        let universe = self.universe();
        match coords.iter().find(|&&c| c as u64 >= universe) {
            Some(&c) => Err(Error::Domain {
                value: c as u64,
                universe,
            }),
            None => Ok(()),
        }
    }
}

/// A point with unsigned integer coordinates. Ordering is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<Coord>);

impl Point {
    pub fn new(coords: Vec<Coord>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    /// First `l` coordinates.
    pub fn head(&self, l: usize) -> &[Coord] {
        &self.0[..l]
    }

    pub fn into_inner(self) -> Vec<Coord> {
        self.0
    }
}

impl From<Vec<Coord>> for Point {
    fn from(coords: Vec<Coord>) -> Self {
        Point(coords)
    }
}

impl From<&[Coord]> for Point {
    fn from(coords: &[Coord]) -> Self {
        Point(coords.to_vec())
    }
}

impl Deref for Point {
    type Target = [Coord];

    fn deref(&self) -> &[Coord] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Slot of a level's trie table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrieId(u32);

/// Per-node extras carried by every level tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelLinks {
    /// Smallest node of this node's group in the next level.
    pub cross: Option<NodeId>,
    /// Present exactly on cross-link nodes.
    pub trie: Option<TrieId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Level {
    tree: Tree<LevelLinks>,
    tries: Vec<Option<ThreadedTrie<NodeId>>>,
    free_tries: Vec<u32>,
}

impl Level {
    fn trie(&self, id: TrieId) -> &ThreadedTrie<NodeId> {
        self.tries[id.0 as usize]
            .as_ref()
            .expect("trie handle refers to a live trie")
    }

    fn trie_mut(&mut self, id: TrieId) -> &mut ThreadedTrie<NodeId> {
        self.tries[id.0 as usize]
            .as_mut()
            .expect("trie handle refers to a live trie")
    }

    fn add_trie(&mut self, trie: ThreadedTrie<NodeId>) -> TrieId {
        match self.free_tries.pop() {
            Some(i) => {
                self.tries[i as usize] = Some(trie);
                TrieId(i)
            }
            None => {
                self.tries.push(Some(trie));
                TrieId(self.tries.len() as u32 - 1)
            }
        }
    }

    fn drop_trie(&mut self, id: TrieId) {
        self.tries[id.0 as usize] = None;
        self.free_tries.push(id.0);
    }

    fn head_trie(&self, head: NodeId) -> TrieId {
        self.tree
            .payload(head)
            .trie
            .expect("group head carries a trie")
    }
}

/// BITS kd-tree over a set of distinct k-dimensional points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitsKdTree {
    config: IndexConfig,
    levels: Vec<Level>,
    len: usize,
}

impl BitsKdTree {
    pub fn new(config: IndexConfig) -> Self {
        let levels = (1..=config.dims)
            .map(|key_len| Level {
                tree: Tree::new(key_len),
                tries: Vec::new(),
                free_tries: Vec::new(),
            })
            .collect();
        BitsKdTree {
            config,
            levels,
            len: 0,
        }
    }

    /// Builds the index by repeated insertion; duplicates are ignored.
    pub fn build<I>(config: IndexConfig, points: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Deref<Target = [Coord]>,
    {
        let mut index = Self::new(config);
        for p in points {
            index.insert(&p)?;
        }
        Ok(index)
    }

    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn dims(&self) -> usize {
        self.config.dims
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Tree `T_{level+1}` (levels are 0-based here).
    pub fn level(&self, level: usize) -> &Tree<LevelLinks> {
        &self.levels[level].tree
    }

    /// The trie owned by a cross-link node of `level`, if it has one.
    pub fn trie_at(&self, level: usize, node: NodeId) -> Option<&ThreadedTrie<NodeId>> {
        let lvl = &self.levels[level];
        lvl.tree.payload(node).trie.map(|id| lvl.trie(id))
    }

    /// Stored points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let last = &self.levels[self.config.dims - 1].tree;
        last.iter().map(move |id| Point::from(last.key(id)))
    }

    /// Inorder key sequence of one level.
    pub fn level_keys(&self, level: usize) -> Vec<Vec<Coord>> {
        let tree = &self.levels[level].tree;
        tree.iter().map(|id| tree.key(id).to_vec()).collect()
    }

    /// `(node key, cross-link target key)` for every node of `level`.
    pub fn cross_links(&self, level: usize) -> Vec<(Vec<Coord>, Option<Vec<Coord>>)> {
        let tree = &self.levels[level].tree;
        let next = self.levels.get(level + 1).map(|l| &l.tree);
        tree.iter()
            .map(|id| {
                let target = tree
                    .payload(id)
                    .cross
                    .zip(next)
                    .map(|(c, t)| t.key(c).to_vec());
                (tree.key(id).to_vec(), target)
            })
            .collect()
    }

    /// Node holding exactly `prefix` in level `prefix.len() - 1`, found by
    /// trie descent through the levels above it.
    pub fn find_prefix(&self, prefix: &[Coord]) -> Option<NodeId> {
        let mut visits = 0;
        self.locate(prefix, &mut visits).ok()?.last().copied()
    }

    /// First node of the group under `parent` (`None` for level 0); the dummy
    /// when level 0 is empty.
    pub(crate) fn group_head(&self, level: usize, parent: Option<NodeId>) -> NodeId {
        match parent {
            None => self.levels[level].tree.first_node(),
            Some(p) => self.levels[level - 1]
                .tree
                .payload(p)
                .cross
                .expect("non-final level node has a cross link"),
        }
    }

    pub(crate) fn head_trie(&self, level: usize, head: NodeId) -> &ThreadedTrie<NodeId> {
        let lvl = &self.levels[level];
        lvl.trie(lvl.head_trie(head))
    }

    /// Nodes matching `prefix` level by level; `Err(level)` at the first
    /// level without a match.
    fn locate(
        &self,
        prefix: &[Coord],
        visits: &mut u64,
    ) -> std::result::Result<Vec<NodeId>, usize> {
        let mut path = Vec::with_capacity(prefix.len());
        let mut parent = None;
        for (level, &x) in prefix.iter().enumerate() {
            let head = self.group_head(level, parent);
            if head.is_dummy() {
                return Err(level);
            }
            match self.head_trie(level, head).succ_geq_counted(x, visits) {
                Some(d) if d.key() == x => {
                    path.push(d.target());
                    parent = Some(d.target());
                }
                _ => return Err(level),
            }
        }
        Ok(path)
    }

    pub fn contains(&self, p: &[Coord]) -> Result<bool> {
        self.contains_counted(p, &mut 0)
    }

    /// Membership test; adds the trie nodes visited to `trie_nodes`.
    pub fn contains_counted(&self, p: &[Coord], trie_nodes: &mut u64) -> Result<bool> {
        self.config.check_coords(p)?;
        Ok(self.locate(p, trie_nodes).is_ok())
    }

    /// Adds `p`; returns `false` (and changes nothing) if already stored.
    pub fn insert(&mut self, p: &[Coord]) -> Result<bool> {
        self.insert_metered(p, &mut Meter::default())
    }

    pub fn insert_metered(&mut self, p: &[Coord], meter: &mut Meter) -> Result<bool> {
        self.config.check_coords(p)?;
        let mut parent = None;
        for level in 0..self.config.dims {
            let head = self.group_head(level, parent);
            if head.is_dummy() {
                let node =
                    self.levels[0]
                        .tree
                        .insert_after_metered(NodeId::DUMMY, &p[..1], meter)?;
                meter.levels_altered += 1;
                self.attach_new_trie(0, p[0], node, meter)?;
                self.extend_chain(0, node, p, meter)?;
                self.len += 1;
                return Ok(true);
            }

            let x = p[level];
            let tid = self.levels[level].head_trie(head);
            let mut visits = 0;
            let hit = self.levels[level]
                .trie(tid)
                .succ_geq_counted(x, &mut visits)
                .map(|d| (d.key(), d.target()));
            meter.trie_touches += visits;
            if let Some((key, node)) = hit {
                if key == x {
                    parent = Some(node);
                    continue;
                }
            }

            // First altered level: the new node goes right before the trie
            // successor inside the group, or right before the next group.
            let succ = hit.map(|(_, node)| node);
            let before = match (succ, parent) {
                (Some(s), _) => s,
                (None, None) => NodeId::DUMMY,
                (None, Some(par)) => self.next_group_head(level - 1, par, meter),
            };
            let node =
                self.levels[level]
                    .tree
                    .insert_before_metered(before, &p[..=level], meter)?;
            meter.levels_altered += 1;
            let lvl = &mut self.levels[level];
            lvl.trie_mut(tid).insert_metered(x, node, meter)?;
            if succ == Some(head) {
                lvl.tree.payload_mut(head).trie = None;
                lvl.tree.payload_mut(node).trie = Some(tid);
                if let Some(par) = parent {
                    self.levels[level - 1].tree.payload_mut(par).cross = Some(node);
                }
            }
            self.extend_chain(level, node, p, meter)?;
            self.len += 1;
            return Ok(true);
        }
        Ok(false)
    }

    /// Head of the group following `node`'s group in `level + 1`, or the
    /// dummy if `node` is the last node of `level`.
    fn next_group_head(&self, level: usize, node: NodeId, meter: &mut Meter) -> NodeId {
        let tree = &self.levels[level].tree;
        let succ = tree.in_succ_metered(node, meter);
        if succ.is_dummy() {
            NodeId::DUMMY
        } else {
            tree.payload(succ)
                .cross
                .expect("non-final level node has a cross link")
        }
    }

    /// Creates the singleton groups below a freshly inserted `node`.
    fn extend_chain(
        &mut self,
        mut level: usize,
        mut node: NodeId,
        p: &[Coord],
        meter: &mut Meter,
    ) -> Result<()> {
        while level + 1 < self.config.dims {
            let before = self.next_group_head(level, node, meter);
            let child = self.levels[level + 1].tree.insert_before_metered(
                before,
                &p[..=level + 1],
                meter,
            )?;
            meter.levels_altered += 1;
            self.attach_new_trie(level + 1, p[level + 1], child, meter)?;
            self.levels[level].tree.payload_mut(node).cross = Some(child);
            level += 1;
            node = child;
        }
        Ok(())
    }

    fn attach_new_trie(
        &mut self,
        level: usize,
        key: Coord,
        node: NodeId,
        meter: &mut Meter,
    ) -> Result<()> {
        let mut trie = ThreadedTrie::new(self.config.trie);
        trie.insert_metered(key, node, meter)?;
        let lvl = &mut self.levels[level];
        let tid = lvl.add_trie(trie);
        lvl.tree.payload_mut(node).trie = Some(tid);
        Ok(())
    }

    /// Removes `p`; returns `false` if it was not stored.
    pub fn delete(&mut self, p: &[Coord]) -> Result<bool> {
        self.delete_metered(p, &mut Meter::default())
    }

    pub fn delete_metered(&mut self, p: &[Coord], meter: &mut Meter) -> Result<bool> {
        self.config.check_coords(p)?;
        let mut visits = 0;
        let located = self.locate(p, &mut visits);
        meter.trie_touches += visits;
        let Ok(path) = located else {
            return Ok(false);
        };

        for level in (0..self.config.dims).rev() {
            let node = path[level];
            let head = self.group_head(level, level.checked_sub(1).map(|l| path[l]));
            let lvl = &mut self.levels[level];
            let tid = lvl.head_trie(head);
            lvl.trie_mut(tid).delete_metered(p[level], meter)?;
            meter.levels_altered += 1;
            if lvl.trie(tid).is_empty() {
                // The group vanished, so the parent prefix goes too.
                lvl.tree.payload_mut(head).trie = None;
                lvl.drop_trie(tid);
                lvl.tree.delete_node_metered(node, meter)?;
                continue;
            }
            if node == head {
                let new_head = lvl
                    .trie(tid)
                    .min_metered(meter)
                    .expect("non-empty trie has a minimum")
                    .target();
                lvl.tree.payload_mut(node).trie = None;
                lvl.tree.payload_mut(new_head).trie = Some(tid);
                if level > 0 {
                    self.levels[level - 1]
                        .tree
                        .payload_mut(path[level - 1])
                        .cross = Some(new_head);
                }
            }
            self.levels[level].tree.delete_node_metered(node, meter)?;
            break;
        }
        self.len -= 1;
        Ok(true)
    }

    /// Checks every structural invariant of the index; empty means valid.
    pub fn validate_index(&self) -> Vec<IndexViolation> {
        let mut out = Vec::new();
        for (level, lvl) in self.levels.iter().enumerate() {
            out.extend(
                lvl.tree
                    .validate()
                    .into_iter()
                    .map(|violation| IndexViolation::Tree { level, violation }),
            );
        }
        if !out.is_empty() {
            // Walks below assume well-formed trees.
            return out;
        }

        let k = self.config.dims;
        let stored = self.level_keys(k - 1);
        if stored.len() != self.len {
            out.push(IndexViolation::Size {
                expected: self.len,
                found: stored.len(),
            });
        }
        for level in 0..k {
            let mut expected: Vec<&[Coord]> = stored.iter().map(|p| &p[..=level]).collect();
            expected.dedup();
            let tree = &self.levels[level].tree;
            let found: Vec<&[Coord]> = tree.iter().map(|id| tree.key(id)).collect();
            if found != expected {
                out.push(IndexViolation::PrefixSet {
                    level,
                    expected: expected.len(),
                    found: found.len(),
                });
            }
        }

        // Group heads per level, derived from keys alone.
        let heads: Vec<HashMap<Vec<Coord>, NodeId>> = (0..k)
            .map(|level| {
                let tree = &self.levels[level].tree;
                let mut map = HashMap::new();
                for id in tree.iter() {
                    map.entry(tree.key(id)[..level].to_vec()).or_insert(id);
                }
                map
            })
            .collect();

        for level in 0..k {
            let tree = &self.levels[level].tree;
            for id in tree.iter() {
                let found = tree.payload(id).cross;
                let expected = heads
                    .get(level + 1)
                    .and_then(|h| h.get(tree.key(id)).copied());
                if found != expected {
                    out.push(IndexViolation::MinRule {
                        level,
                        node: id,
                        expected,
                        found,
                    });
                }
            }
        }

        for level in 0..k {
            let lvl = &self.levels[level];
            let tree = &lvl.tree;
            let mut group_values: HashMap<NodeId, Vec<(Coord, NodeId)>> = HashMap::new();
            for id in tree.iter() {
                let key = tree.key(id);
                let head = heads[level][&key[..level]];
                group_values.entry(head).or_default().push((key[level], id));
                let is_head = head == id;
                let has_trie = tree.payload(id).trie.is_some();
                if is_head != has_trie {
                    out.push(IndexViolation::TriePlacement {
                        level,
                        node: id,
                        has_trie,
                    });
                }
            }
            let mut live = 0;
            for (head, members) in &group_values {
                let Some(tid) = tree.payload(*head).trie else {
                    continue;
                };
                live += 1;
                let Some(trie) = lvl.tries.get(tid.0 as usize).and_then(Option::as_ref) else {
                    out.push(IndexViolation::TrieGroup { level, node: *head });
                    continue;
                };
                out.extend(
                    trie.validate()
                        .into_iter()
                        .map(|violation| IndexViolation::Trie {
                            level,
                            node: *head,
                            violation,
                        }),
                );
                if !trie.iter().eq(members.iter().copied()) {
                    out.push(IndexViolation::TrieGroup { level, node: *head });
                }
            }
            let allocated = lvl.tries.iter().filter(|t| t.is_some()).count();
            if allocated != live {
                out.push(IndexViolation::TrieLeak {
                    level,
                    allocated,
                    owned: live,
                });
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn set_cross_link(&mut self, level: usize, node: NodeId, target: NodeId) {
        self.levels[level].tree.payload_mut(node).cross = Some(target);
    }
}

/// A broken index invariant, as reported by [`BitsKdTree::validate_index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexViolation {
    Tree {
        level: usize,
        violation: TreeViolation,
    },
    Trie {
        level: usize,
        node: NodeId,
        violation: TrieViolation,
    },
    Size {
        expected: usize,
        found: usize,
    },
    /// Keys of a level differ from the distinct prefixes of the stored points.
    PrefixSet {
        level: usize,
        expected: usize,
        found: usize,
    },
    /// A cross link does not name its group's smallest node.
    MinRule {
        level: usize,
        node: NodeId,
        expected: Option<NodeId>,
        found: Option<NodeId>,
    },
    /// A trie on a node that is not a cross-link node, or a missing one.
    TriePlacement {
        level: usize,
        node: NodeId,
        has_trie: bool,
    },
    /// Trie keys or trie links disagree with the group's members.
    TrieGroup {
        level: usize,
        node: NodeId,
    },
    TrieLeak {
        level: usize,
        allocated: usize,
        owned: usize,
    },
}

impl fmt::Display for IndexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexViolation::Tree { level, violation } => write!(f, "T{}: {violation}", level + 1),
            IndexViolation::Trie {
                level,
                node,
                violation,
            } => write!(f, "T{} trie at {node:?}: {violation}", level + 1),
            IndexViolation::Size { expected, found } => {
                write!(f, "index size {expected}, last level holds {found}")
            }
            IndexViolation::PrefixSet {
                level,
                expected,
                found,
            } => write!(
                f,
                "T{} holds {found} keys, expected the {expected} distinct prefixes",
                level + 1
            ),
            IndexViolation::MinRule {
                level,
                node,
                expected,
                found,
            } => write!(
                f,
                "T{} node {node:?} cross links {found:?}, group minimum is {expected:?}",
                level + 1
            ),
            IndexViolation::TriePlacement {
                level,
                node,
                has_trie,
            } => {
                if *has_trie {
                    write!(
                        f,
                        "T{} node {node:?} has a trie but is not a cross-link node",
                        level + 1
                    )
                } else {
                    write!(f, "T{} cross-link node {node:?} has no trie", level + 1)
                }
            }
            IndexViolation::TrieGroup { level, node } => write!(
                f,
                "T{} trie at {node:?} disagrees with its group",
                level + 1
            ),
            IndexViolation::TrieLeak {
                level,
                allocated,
                owned,
            } => write!(
                f,
                "T{}: {allocated} tries allocated, {owned} owned",
                level + 1
            ),
        }
    }
}
