/// Work counters accumulated by mutating operations.
///
/// `touches` counts every tree or trie node read or written while locating,
/// linking, retracing and rotating. The remaining counters break out the
/// rebalancing work so that rotation claims can be reported separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Meter {
    pub tree_touches: u64,
    pub trie_touches: u64,
    /// Single rotations performed.
    pub rotations: u64,
    /// Rebalancing events; a double rotation counts once.
    pub rebalances: u64,
    /// Internal-node removals resolved through the inorder successor.
    pub replacements: u64,
    /// Levels whose tree gained or lost a node.
    pub levels_altered: u64,
}

impl Meter {
    pub fn touches(&self) -> u64 {
        self.tree_touches + self.trie_touches
    }

    pub(crate) fn tree(&mut self) {
        self.tree_touches += 1;
    }

    pub(crate) fn trie(&mut self) {
        self.trie_touches += 1;
    }

    pub fn add(&mut self, other: &Meter) {
        self.tree_touches += other.tree_touches;
        self.trie_touches += other.trie_touches;
        self.rotations += other.rotations;
        self.rebalances += other.rebalances;
        self.replacements += other.replacements;
        self.levels_altered += other.levels_altered;
    }
}
