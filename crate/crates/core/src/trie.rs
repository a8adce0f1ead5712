//! Fixed-width radix trie with threads in place of empty slots.
//!
//! Every key is read as exactly `W` base-`R` digits, so all data nodes sit at
//! depth `W` and a lookup touches at most `W` trie nodes regardless of how
//! many keys are stored. An empty slot is a thread to the data node holding
//! the smallest key above every key that slot could have covered (or to
//! nothing). `succ_geq` therefore stops at the first thread it meets.
//!
//! Inserting or deleting a key only retargets threads along two root-to-leaf
//! paths: the key's own path, and the trailing edge of its predecessor's
//! path. Both are bounded by `R * W` slots.

use std::fmt;

use crate::{Coord, Error, Meter, Result};

/// Radix and digit count shared by every key of a trie.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrieConfig {
    radix: u32,
    width: u32,
}

impl TrieConfig {
    pub fn new(radix: u32, width: u32) -> Result<Self> {
        if radix < 2 {
            return Err(Error::Config(format!(
                "radix must be at least 2, got {radix}"
            )));
        }
        if width < 1 {
            return Err(Error::Config("width must be at least 1".into()));
        }
        let universe = (radix as u64).checked_pow(width);
        match universe {
            Some(u) if u <= 1 << 32 => Ok(TrieConfig { radix, width }),
            _ => Err(Error::Config(format!(
                "{radix}^{width} does not fit the 32-bit coordinate range"
            ))),
        }
    }

    /// Smallest width for which every coordinate below `bound` fits.
    pub fn for_bound(radix: u32, bound: u64) -> Result<Self> {
        if radix < 2 {
            return Err(Error::Config(format!(
                "radix must be at least 2, got {radix}"
            )));
        }
        let mut width = 1;
        let mut universe = radix as u64;
        while universe < bound {
            universe = universe.saturating_mul(radix as u64);
            width += 1;
        }
        Self::new(radix, width)
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// `R^W`; every key lies in `[0, universe)`.
    pub fn universe(&self) -> u64 {
        (self.radix as u64).pow(self.width)
    }

    /// Digit of `key` at `depth`, most significant first.
    fn digit(&self, key: Coord, depth: usize) -> usize {
        let shift = (self.radix as u64).pow(self.width - 1 - depth as u32);
        ((key as u64 / shift) % self.radix as u64) as usize
    }

    /// Number of keys below one slot at `depth`.
    fn span(&self, depth: usize) -> u64 {
        (self.radix as u64).pow(self.width - 1 - depth as u32)
    }

    fn check(&self, key: Coord) -> Result<()> {
        if key as u64 >= self.universe() {
            return Err(Error::Domain {
                value: key as u64,
                universe: self.universe(),
            });
        }
        Ok(())
    }
}

const THREAD: u32 = 1 << 31;
const NONE: u32 = THREAD - 1;

/// Tagged slot: a valid child (trie node, or data node at the last level) or
/// a thread to a data node.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Slot(u32);

impl Slot {
    fn child(index: u32) -> Self {
        Slot(index)
    }

    fn thread(data: Option<u32>) -> Self {
        Slot(THREAD | data.unwrap_or(NONE))
    }

    fn is_thread(self) -> bool {
        self.0 & THREAD != 0
    }

    fn index(self) -> u32 {
        self.0 & !THREAD
    }

    fn as_child(self) -> Option<u32> {
        (!self.is_thread()).then_some(self.0)
    }

    fn thread_target(self) -> Option<u32> {
        debug_assert!(self.is_thread());
        let i = self.index();
        (i != NONE).then_some(i)
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_thread() {
            write!(f, "T{:?}", self.thread_target())
        } else {
            write!(f, "C{}", self.0)
        }
    }
}

/// Leaf of a trie: a key and its trie link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieDataNode<T> {
    key: Coord,
    target: T,
    live: bool,
}

impl<T: Copy> TrieDataNode<T> {
    pub fn key(&self) -> Coord {
        self.key
    }

    pub fn target(&self) -> T {
        self.target
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadedTrie<T> {
    config: TrieConfig,
    /// `radix` consecutive slots per trie node; node 0 is the root.
    slots: Vec<Slot>,
    free_nodes: Vec<u32>,
    data: Vec<TrieDataNode<T>>,
    free_data: Vec<u32>,
    len: usize,
}

impl<T: Copy> ThreadedTrie<T> {
    pub fn new(config: TrieConfig) -> Self {
        ThreadedTrie {
            config,
            slots: vec![Slot::thread(None); config.radix as usize],
            free_nodes: Vec::new(),
            data: Vec::new(),
            free_data: Vec::new(),
            len: 0,
        }
    }

    pub fn config(&self) -> TrieConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Trie nodes currently in use, root included.
    pub fn node_count(&self) -> usize {
        self.slots.len() / self.config.radix as usize - self.free_nodes.len()
    }

    fn slot(&self, node: u32, digit: usize) -> Slot {
        self.slots[node as usize * self.config.radix as usize + digit]
    }

    fn set_slot(&mut self, node: u32, digit: usize, slot: Slot) {
        self.slots[node as usize * self.config.radix as usize + digit] = slot;
    }

    fn alloc_node(&mut self, fill: Slot) -> u32 {
        let r = self.config.radix as usize;
        match self.free_nodes.pop() {
            Some(i) => {
                self.slots[i as usize * r..(i as usize + 1) * r].fill(fill);
                i
            }
            None => {
                let i = (self.slots.len() / r) as u32;
                assert!(i < NONE, "trie node arena exhausted");
                self.slots.extend(std::iter::repeat_n(fill, r));
                i
            }
        }
    }

    fn alloc_data(&mut self, key: Coord, target: T) -> u32 {
        let node = TrieDataNode {
            key,
            target,
            live: true,
        };
        match self.free_data.pop() {
            Some(i) => {
                self.data[i as usize] = node;
                i
            }
            None => {
                let i = self.data.len() as u32;
                assert!(i < NONE, "trie data arena exhausted");
                self.data.push(node);
                i
            }
        }
    }

    fn has_child(&self, node: u32) -> bool {
        (0..self.config.radix as usize).any(|d| !self.slot(node, d).is_thread())
    }

    /// Data index of the smallest key `>= x`; counts trie nodes visited.
    fn lookup(&self, x: Coord, visits: &mut u64) -> Option<u32> {
        let width = self.config.width as usize;
        let mut node = 0;
        for depth in 0..width {
            *visits += 1;
            let slot = self.slot(node, self.config.digit(x, depth));
            match slot.as_child() {
                None => return slot.thread_target(),
                Some(c) if depth + 1 == width => return Some(c),
                Some(c) => node = c,
            }
        }
        unreachable!("descent always ends at depth W")
    }

    /// Data node with the smallest key `>= x`, or `None` if every key is
    /// smaller. Visits at most `W` trie nodes.
    pub fn succ_geq(&self, x: Coord) -> Option<&TrieDataNode<T>> {
        self.succ_geq_counted(x, &mut 0)
    }

    pub fn succ_geq_counted(&self, x: Coord, visits: &mut u64) -> Option<&TrieDataNode<T>> {
        if x as u64 >= self.config.universe() {
            return None;
        }
        self.lookup(x, visits).map(|d| &self.data[d as usize])
    }

    pub fn min(&self) -> Option<&TrieDataNode<T>> {
        self.succ_geq(0)
    }

    pub(crate) fn min_metered(&self, meter: &mut Meter) -> Option<&TrieDataNode<T>> {
        let mut visits = 0;
        let found = self.lookup(0, &mut visits).map(|d| &self.data[d as usize]);
        meter.trie_touches += visits;
        found
    }

    /// Trie link stored for exactly `key`.
    pub fn get(&self, key: Coord) -> Option<T> {
        self.succ_geq(key)
            .filter(|d| d.key == key)
            .map(|d| d.target)
    }

    /// Keys with their trie links, in increasing key order.
    pub fn iter(&self) -> impl Iterator<Item = (Coord, T)> + '_ {
        let mut next = self.min();
        std::iter::from_fn(move || {
            let at = next?;
            next = at.key.checked_add(1).and_then(|k| self.succ_geq(k));
            Some((at.key, at.target))
        })
    }

    pub fn insert(&mut self, key: Coord, target: T) -> Result<()> {
        self.insert_metered(key, target, &mut Meter::default())
    }

    pub fn insert_metered(&mut self, key: Coord, target: T, meter: &mut Meter) -> Result<()> {
        self.config.check(key)?;
        let mut visits = 0;
        let succ = self.lookup(key, &mut visits);
        meter.trie_touches += visits;
        if let Some(d) = succ {
            if self.data[d as usize].key == key {
                return Err(Error::DuplicateKey(key));
            }
        }

        let width = self.config.width as usize;
        let fill = Slot::thread(succ);
        let mut path = Vec::with_capacity(width);
        let mut node = 0;
        let mut leaf = 0;
        for depth in 0..width {
            meter.trie();
            path.push(node);
            let digit = self.config.digit(key, depth);
            if depth + 1 == width {
                leaf = self.alloc_data(key, target);
                self.set_slot(node, digit, Slot::child(leaf));
            } else {
                node = match self.slot(node, digit).as_child() {
                    Some(c) => c,
                    None => {
                        let c = self.alloc_node(fill);
                        self.set_slot(node, digit, Slot::child(c));
                        c
                    }
                };
            }
        }
        self.retarget_left(&path, key, width - 1, Slot::thread(Some(leaf)), meter);
        self.len += 1;
        Ok(())
    }

    /// Removes `key`, pruning trie nodes left without children. Returns the
    /// trie link the key carried.
    pub fn delete(&mut self, key: Coord) -> Result<T> {
        self.delete_metered(key, &mut Meter::default())
    }

    pub fn delete_metered(&mut self, key: Coord, meter: &mut Meter) -> Result<T> {
        self.config.check(key)?;
        let width = self.config.width as usize;
        let mut path = Vec::with_capacity(width);
        let mut node = 0;
        let mut leaf = None;
        for depth in 0..width {
            meter.trie();
            path.push(node);
            match self.slot(node, self.config.digit(key, depth)).as_child() {
                None => break,
                Some(c) if depth + 1 == width => leaf = Some(c),
                Some(c) => node = c,
            }
        }
        let leaf = leaf.ok_or(Error::NotFound(key))?;
        debug_assert_eq!(self.data[leaf as usize].key, key);

        let succ = match key.checked_add(1) {
            Some(next) if (next as u64) < self.config.universe() => {
                let mut visits = 0;
                let s = self.lookup(next, &mut visits);
                meter.trie_touches += visits;
                s
            }
            _ => None,
        };
        let value = Slot::thread(succ);

        let mut deepest = width - 1;
        self.set_slot(path[deepest], self.config.digit(key, deepest), value);
        let target = self.data[leaf as usize].target;
        self.data[leaf as usize].live = false;
        self.free_data.push(leaf);
        while deepest > 0 && !self.has_child(path[deepest]) {
            meter.trie();
            self.free_nodes.push(path[deepest]);
            deepest -= 1;
            self.set_slot(path[deepest], self.config.digit(key, deepest), value);
        }
        self.retarget_left(&path, key, deepest, value, meter);
        self.len -= 1;
        Ok(target)
    }

    /// Points every thread that now resolves to `value` at it: empty slots
    /// left of `key`'s path up to the nearest smaller key, plus the trailing
    /// slots along that smaller key's path.
    fn retarget_left(
        &mut self,
        path: &[u32],
        key: Coord,
        from_depth: usize,
        value: Slot,
        meter: &mut Meter,
    ) {
        for depth in (0..=from_depth).rev() {
            let node = path[depth];
            for s in (0..self.config.digit(key, depth)).rev() {
                match self.slot(node, s).as_child() {
                    None => self.set_slot(node, s, value),
                    Some(c) => {
                        self.retarget_trailing(c, depth + 1, value, meter);
                        return;
                    }
                }
            }
        }
    }

    fn retarget_trailing(
        &mut self,
        mut node: u32,
        mut depth: usize,
        value: Slot,
        meter: &mut Meter,
    ) {
        let width = self.config.width as usize;
        'descend: while depth < width {
            meter.trie();
            for s in (0..self.config.radix as usize).rev() {
                match self.slot(node, s).as_child() {
                    None => self.set_slot(node, s, value),
                    Some(c) => {
                        node = c;
                        depth += 1;
                        continue 'descend;
                    }
                }
            }
            return;
        }
    }

    /// Checks depth, key order, pruning and every thread against a sorted
    /// list of the stored keys.
    pub fn validate(&self) -> Vec<TrieViolation> {
        let mut out = Vec::new();
        let mut keys = Vec::with_capacity(self.len);
        // (highest key the slot covers, thread target)
        let mut threads: Vec<(u64, Option<u32>)> = Vec::new();
        self.walk(0, 0, 0, &mut keys, &mut threads, &mut out);

        if keys.len() != self.len {
            out.push(TrieViolation::Length {
                expected: self.len,
                found: keys.len(),
            });
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            out.push(TrieViolation::Unordered);
        }
        for (hi, found) in threads {
            let expected = keys.iter().copied().find(|&k| k as u64 > hi);
            let found_key = found.map(|d| &self.data[d as usize]);
            match found_key {
                Some(d) if !d.live => out.push(TrieViolation::DeadData { key: d.key }),
                _ => {
                    let found = found_key.map(|d| d.key);
                    if found != expected {
                        out.push(TrieViolation::Thread {
                            covers_up_to: hi,
                            expected,
                            found,
                        });
                    }
                }
            }
        }
        out
    }

    fn walk(
        &self,
        node: u32,
        depth: usize,
        base: u64,
        keys: &mut Vec<Coord>,
        threads: &mut Vec<(u64, Option<u32>)>,
        out: &mut Vec<TrieViolation>,
    ) {
        let width = self.config.width as usize;
        let span = self.config.span(depth);
        for s in 0..self.config.radix as usize {
            let lo = base + s as u64 * span;
            let slot = self.slot(node, s);
            match slot.as_child() {
                None => threads.push((lo + span - 1, slot.thread_target())),
                Some(d) if depth + 1 == width => {
                    let data = &self.data[d as usize];
                    if !data.live {
                        out.push(TrieViolation::DeadData { key: data.key });
                    } else if data.key as u64 != lo {
                        out.push(TrieViolation::DataKey {
                            expected: lo,
                            found: data.key,
                        });
                    }
                    keys.push(data.key);
                }
                Some(c) => {
                    if !self.has_child(c) {
                        out.push(TrieViolation::EmptyNode { depth: depth + 1 });
                    }
                    self.walk(c, depth + 1, lo, keys, threads, out);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrieViolation {
    Length {
        expected: usize,
        found: usize,
    },
    Unordered,
    DataKey {
        expected: u64,
        found: Coord,
    },
    DeadData {
        key: Coord,
    },
    EmptyNode {
        depth: usize,
    },
    Thread {
        covers_up_to: u64,
        expected: Option<Coord>,
        found: Option<Coord>,
    },
}

impl fmt::Display for TrieViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrieViolation::Length { expected, found } => {
                write!(f, "trie length {expected}, {found} data nodes reachable")
            }
            TrieViolation::Unordered => f.write_str("data nodes out of key order"),
            TrieViolation::DataKey { expected, found } => {
                write!(f, "data node at position {expected} holds key {found}")
            }
            TrieViolation::DeadData { key } => write!(f, "freed data node {key} is reachable"),
            TrieViolation::EmptyNode { depth } => write!(f, "empty trie node at depth {depth}"),
            TrieViolation::Thread {
                covers_up_to,
                expected,
                found,
            } => write!(
                f,
                "thread past {covers_up_to} names {found:?}, next key is {expected:?}"
            ),
        }
    }
}
