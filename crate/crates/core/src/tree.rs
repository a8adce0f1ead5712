//! Height-balanced binary search tree with two-way inorder threads.
//!
//! Nodes live in an arena addressed by [`NodeId`]; slot 0 is the dummy node.
//! Empty child slots hold threads: a left thread names the inorder
//! predecessor, a right thread the inorder successor, and the first and last
//! nodes thread to the dummy. There are no parent pointers. The parent of a
//! node is recovered from the threads hanging off its subtree (see
//! [`Tree::parent_of`]), which costs the height of that subtree.
//!
//! Keys are fixed-length coordinate prefixes stored flat in one buffer and
//! compared lexicographically. The tree never searches by key: insertions are
//! positioned by the caller relative to an existing node.

use std::fmt;

use crate::{Coord, Error, Meter, Result};

/// Handle of a node in a [`Tree`] arena.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    /// The boundary node: inorder predecessor of the first node and successor
    /// of the last.
    pub const DUMMY: NodeId = NodeId(0);

    pub fn is_dummy(self) -> bool {
        self == Self::DUMMY
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dummy() {
            f.write_str("D")
        } else {
            write!(f, "#{}", self.0)
        }
    }
}

const THREAD_BIT: u32 = 1 << 31;

/// A child slot: either a child reference or an inorder thread, distinguished
/// by one tag bit.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Link(u32);

impl Link {
    fn child(id: NodeId) -> Self {
        Link(id.0)
    }

    fn thread(id: NodeId) -> Self {
        Link(id.0 | THREAD_BIT)
    }

    pub fn is_thread(self) -> bool {
        self.0 & THREAD_BIT != 0
    }

    pub fn target(self) -> NodeId {
        NodeId(self.0 & !THREAD_BIT)
    }

    pub fn as_child(self) -> Option<NodeId> {
        (!self.is_thread()).then(|| self.target())
    }
}

impl fmt::Debug for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_thread() {
            write!(f, "Thread({:?})", self.target())
        } else {
            write!(f, "Child({:?})", self.target())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node<T> {
    left: Link,
    right: Link,
    /// height(right) - height(left)
    balance: i8,
    live: bool,
    payload: T,
}

/// Inorder-threaded AVL tree over fixed-length coordinate prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree<T> {
    key_len: usize,
    nodes: Vec<Node<T>>,
    keys: Vec<Coord>,
    free: Vec<NodeId>,
    len: usize,
    first: NodeId,
    last: NodeId,
}

impl<T: Clone + Default> Tree<T> {
    pub fn new(key_len: usize) -> Self {
        assert!(key_len > 0, "prefix length must be at least 1");
        let dummy = Node {
            left: Link::thread(NodeId::DUMMY),
            right: Link::thread(NodeId::DUMMY),
            balance: 0,
            live: true,
            payload: T::default(),
        };
        Tree {
            key_len,
            nodes: vec![dummy],
            keys: vec![0; key_len],
            free: Vec::new(),
            len: 0,
            first: NodeId::DUMMY,
            last: NodeId::DUMMY,
        }
    }

    fn alloc(&mut self, key: &[Coord]) -> NodeId {
        let node = Node {
            left: Link::thread(NodeId::DUMMY),
            right: Link::thread(NodeId::DUMMY),
            balance: 0,
            live: true,
            payload: T::default(),
        };
        if let Some(id) = self.free.pop() {
            self.nodes[id.index()] = node;
            let at = id.index() * self.key_len;
            self.keys[at..at + self.key_len].copy_from_slice(key);
            id
        } else {
            let id = NodeId(u32::try_from(self.nodes.len()).expect("tree arena exhausted"));
            assert!(id.0 & THREAD_BIT == 0, "tree arena exhausted");
            self.nodes.push(node);
            self.keys.extend_from_slice(key);
            id
        }
    }

    fn release(&mut self, id: NodeId) {
        let node = &mut self.nodes[id.index()];
        node.live = false;
        node.payload = T::default();
        self.free.push(id);
    }

    /// Inserts `key` immediately after `position` in inorder (`DUMMY` means
    /// "as the new first node").
    pub fn insert_after(&mut self, position: NodeId, key: &[Coord]) -> Result<NodeId> {
        self.insert_after_metered(position, key, &mut Meter::default())
    }

    pub fn insert_after_metered(
        &mut self,
        position: NodeId,
        key: &[Coord],
        meter: &mut Meter,
    ) -> Result<NodeId> {
        self.check_position(position)?;
        let succ = self.in_succ_metered(position, meter);
        self.insert_between(position, succ, key, meter)
    }

    /// Inserts `key` immediately before `position` in inorder (`DUMMY` means
    /// "as the new last node").
    pub fn insert_before(&mut self, position: NodeId, key: &[Coord]) -> Result<NodeId> {
        self.insert_before_metered(position, key, &mut Meter::default())
    }

    pub fn insert_before_metered(
        &mut self,
        position: NodeId,
        key: &[Coord],
        meter: &mut Meter,
    ) -> Result<NodeId> {
        self.check_position(position)?;
        let pred = self.in_pred_metered(position, meter);
        self.insert_between(pred, position, key, meter)
    }

    fn check_position(&self, position: NodeId) -> Result<()> {
        if position.index() >= self.nodes.len() || !self.nodes[position.index()].live {
            return Err(Error::InvalidTarget);
        }
        Ok(())
    }

    fn insert_between(
        &mut self,
        pred: NodeId,
        succ: NodeId,
        key: &[Coord],
        meter: &mut Meter,
    ) -> Result<NodeId> {
        if key.len() != self.key_len {
            return Err(Error::Dimension {
                expected: self.key_len,
                got: key.len(),
            });
        }
        let after_pred = pred.is_dummy() || self.key(pred) < key;
        let before_succ = succ.is_dummy() || key < self.key(succ);
        if !(after_pred && before_succ) {
            return Err(Error::OrderingViolation { key: key.to_vec() });
        }

        let new = self.alloc(key);
        meter.tree();
        self.len += 1;
        if pred.is_dummy() {
            self.first = new;
        }
        if succ.is_dummy() {
            self.last = new;
        }
        if self.len == 1 {
            let node = &mut self.nodes[new.index()];
            node.left = Link::thread(NodeId::DUMMY);
            node.right = Link::thread(NodeId::DUMMY);
            self.nodes[0].left = Link::child(new);
            return Ok(new);
        }

        // Exactly one of pred.right / succ.left is a thread between the two.
        meter.tree();
        let parent = if !pred.is_dummy() && self.nodes[pred.index()].right.is_thread() {
            let inherited = self.nodes[pred.index()].right;
            let node = &mut self.nodes[new.index()];
            node.left = Link::thread(pred);
            node.right = inherited;
            self.nodes[pred.index()].right = Link::child(new);
            pred
        } else {
            meter.tree();
            debug_assert!(self.nodes[succ.index()].left.is_thread());
            let inherited = self.nodes[succ.index()].left;
            let node = &mut self.nodes[new.index()];
            node.left = inherited;
            node.right = Link::thread(succ);
            self.nodes[succ.index()].left = Link::child(new);
            succ
        };
        self.retrace_insert(parent, new, meter);
        Ok(new)
    }

    fn retrace_insert(&mut self, mut node: NodeId, mut child: NodeId, meter: &mut Meter) {
        loop {
            meter.tree();
            let from_left = self.nodes[node.index()].left == Link::child(child);
            let balance = self.nodes[node.index()].balance + if from_left { -1 } else { 1 };
            self.nodes[node.index()].balance = balance;
            match balance {
                0 => return,
                -1 | 1 => {
                    let parent = self.parent_of_metered(node, meter);
                    if parent.is_dummy() {
                        return;
                    }
                    child = node;
                    node = parent;
                }
                _ => {
                    let parent = self.parent_of_metered(node, meter);
                    let top = self.rebalance(node, meter);
                    self.replace_child(parent, node, top);
                    return;
                }
            }
        }
    }

    /// Removes `node`. An internal node is replaced by its inorder successor;
    /// balance is then restored on the way back to the root.
    pub fn delete_node(&mut self, node: NodeId) -> Result<()> {
        self.delete_node_metered(node, &mut Meter::default())
    }

    pub fn delete_node_metered(&mut self, z: NodeId, meter: &mut Meter) -> Result<()> {
        if z.is_dummy() || z.index() >= self.nodes.len() || !self.nodes[z.index()].live {
            return Err(Error::InvalidTarget);
        }
        meter.tree();
        if z == self.first {
            self.first = self.in_succ_metered(z, meter);
        }
        if z == self.last {
            self.last = self.in_pred_metered(z, meter);
        }
        let parent = self.parent_of_metered(z, meter);
        let side = self.side_of(parent, z);
        let Node { left, right, .. } = self.nodes[z.index()].clone();

        let (start, shrunk) = match (left.as_child(), right.as_child()) {
            (Some(l), Some(r)) => {
                meter.replacements += 1;
                let mut sp = z;
                let mut s = r;
                meter.tree();
                while let Some(c) = self.nodes[s.index()].left.as_child() {
                    meter.tree();
                    sp = s;
                    s = c;
                }
                let pred = self.rightmost(l, meter);
                self.nodes[pred.index()].right = Link::thread(s);
                let balance = self.nodes[z.index()].balance;
                let outcome = if sp == z {
                    self.nodes[s.index()].left = Link::child(l);
                    (s, Side::Right)
                } else {
                    let spliced = match self.nodes[s.index()].right.as_child() {
                        Some(sr) => Link::child(sr),
                        None => Link::thread(s),
                    };
                    self.nodes[sp.index()].left = spliced;
                    let sn = &mut self.nodes[s.index()];
                    sn.left = Link::child(l);
                    sn.right = Link::child(r);
                    (sp, Side::Left)
                };
                self.nodes[s.index()].balance = balance;
                self.replace_child(parent, z, s);
                outcome
            }
            (Some(l), None) => {
                let pred = self.rightmost(l, meter);
                self.nodes[pred.index()].right = right;
                self.replace_child(parent, z, l);
                (parent, side)
            }
            (None, Some(r)) => {
                let succ = self.leftmost(r, meter);
                self.nodes[succ.index()].left = left;
                self.replace_child(parent, z, r);
                (parent, side)
            }
            (None, None) => {
                if parent.is_dummy() {
                    self.nodes[0].left = Link::thread(NodeId::DUMMY);
                } else if side == Side::Left {
                    self.nodes[parent.index()].left = left;
                } else {
                    self.nodes[parent.index()].right = right;
                }
                (parent, side)
            }
        };
        self.len -= 1;
        self.release(z);
        self.retrace_delete(start, shrunk, meter);
        Ok(())
    }

    fn retrace_delete(&mut self, mut node: NodeId, mut shrunk: Side, meter: &mut Meter) {
        while !node.is_dummy() {
            meter.tree();
            let balance =
                self.nodes[node.index()].balance + if shrunk == Side::Left { 1 } else { -1 };
            self.nodes[node.index()].balance = balance;
            match balance {
                -1 | 1 => return,
                0 => {
                    let parent = self.parent_of_metered(node, meter);
                    shrunk = self.side_of(parent, node);
                    node = parent;
                }
                _ => {
                    let parent = self.parent_of_metered(node, meter);
                    let side = self.side_of(parent, node);
                    let top = self.rebalance(node, meter);
                    self.replace_child(parent, node, top);
                    if self.nodes[top.index()].balance != 0 {
                        return;
                    }
                    shrunk = side;
                    node = parent;
                }
            }
        }
    }

    fn side_of(&self, parent: NodeId, child: NodeId) -> Side {
        if parent.is_dummy() || self.nodes[parent.index()].left == Link::child(child) {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn replace_child(&mut self, parent: NodeId, old: NodeId, new: NodeId) {
        let p = &mut self.nodes[parent.index()];
        if parent.is_dummy() || p.left == Link::child(old) {
            p.left = Link::child(new);
        } else {
            debug_assert_eq!(p.right, Link::child(old));
            p.right = Link::child(new);
        }
    }

    /// Restores balance at `x` (|balance| == 2); returns the new subtree root.
    fn rebalance(&mut self, x: NodeId, meter: &mut Meter) -> NodeId {
        meter.rebalances += 1;
        if self.nodes[x.index()].balance > 0 {
            let y = self.nodes[x.index()].right.target();
            meter.tree();
            if self.nodes[y.index()].balance < 0 {
                let top = self.rotate_right(y, meter);
                self.nodes[x.index()].right = Link::child(top);
            }
            self.rotate_left(x, meter)
        } else {
            let y = self.nodes[x.index()].left.target();
            meter.tree();
            if self.nodes[y.index()].balance > 0 {
                let top = self.rotate_left(y, meter);
                self.nodes[x.index()].left = Link::child(top);
            }
            self.rotate_right(x, meter)
        }
    }

    fn rotate_left(&mut self, x: NodeId, meter: &mut Meter) -> NodeId {
        meter.rotations += 1;
        meter.tree();
        let y = self.nodes[x.index()].right.target();
        let inner = self.nodes[y.index()].left;
        self.nodes[x.index()].right = match inner.as_child() {
            Some(b) => Link::child(b),
            None => Link::thread(y),
        };
        self.nodes[y.index()].left = Link::child(x);
        let (xb, yb) = (self.nodes[x.index()].balance, self.nodes[y.index()].balance);
        let xb = xb - 1 - yb.max(0);
        let yb = yb - 1 + xb.min(0);
        self.nodes[x.index()].balance = xb;
        self.nodes[y.index()].balance = yb;
        y
    }

    fn rotate_right(&mut self, x: NodeId, meter: &mut Meter) -> NodeId {
        meter.rotations += 1;
        meter.tree();
        let y = self.nodes[x.index()].left.target();
        let inner = self.nodes[y.index()].right;
        self.nodes[x.index()].left = match inner.as_child() {
            Some(b) => Link::child(b),
            None => Link::thread(y),
        };
        self.nodes[y.index()].right = Link::child(x);
        let (xb, yb) = (self.nodes[x.index()].balance, self.nodes[y.index()].balance);
        let xb = xb + 1 - yb.min(0);
        let yb = yb + 1 + xb.max(0);
        self.nodes[x.index()].balance = xb;
        self.nodes[y.index()].balance = yb;
        y
    }
}

impl<T> Tree<T> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn root(&self) -> Option<NodeId> {
        self.nodes[0].left.as_child()
    }

    pub fn is_live(&self, id: NodeId) -> bool {
        !id.is_dummy() && id.index() < self.nodes.len() && self.nodes[id.index()].live
    }

    /// The key of a real node; the dummy has no key and yields an empty slice.
    pub fn key(&self, id: NodeId) -> &[Coord] {
        if id.is_dummy() {
            return &[];
        }
        let at = id.index() * self.key_len;
        &self.keys[at..at + self.key_len]
    }

    pub fn payload(&self, id: NodeId) -> &T {
        &self.nodes[id.index()].payload
    }

    pub fn payload_mut(&mut self, id: NodeId) -> &mut T {
        &mut self.nodes[id.index()].payload
    }

    pub fn left(&self, id: NodeId) -> Link {
        self.nodes[id.index()].left
    }

    pub fn right(&self, id: NodeId) -> Link {
        self.nodes[id.index()].right
    }

    pub fn balance(&self, id: NodeId) -> i8 {
        self.nodes[id.index()].balance
    }

    /// Inorder-first node, or the dummy when empty.
    pub fn first_node(&self) -> NodeId {
        self.first
    }

    /// Inorder-last node, or the dummy when empty.
    pub fn last_node(&self) -> NodeId {
        self.last
    }

    pub fn in_succ(&self, id: NodeId) -> NodeId {
        self.in_succ_metered(id, &mut Meter::default())
    }

    pub fn in_pred(&self, id: NodeId) -> NodeId {
        self.in_pred_metered(id, &mut Meter::default())
    }

    pub fn in_succ_metered(&self, id: NodeId, meter: &mut Meter) -> NodeId {
        if id.is_dummy() {
            return self.first;
        }
        meter.tree();
        let right = self.nodes[id.index()].right;
        match right.as_child() {
            Some(c) => self.leftmost(c, meter),
            None => right.target(),
        }
    }

    pub fn in_pred_metered(&self, id: NodeId, meter: &mut Meter) -> NodeId {
        if id.is_dummy() {
            return self.last;
        }
        meter.tree();
        let left = self.nodes[id.index()].left;
        match left.as_child() {
            Some(c) => self.rightmost(c, meter),
            None => left.target(),
        }
    }

    fn leftmost(&self, mut id: NodeId, meter: &mut Meter) -> NodeId {
        meter.tree();
        while let Some(c) = self.nodes[id.index()].left.as_child() {
            meter.tree();
            id = c;
        }
        id
    }

    fn rightmost(&self, mut id: NodeId, meter: &mut Meter) -> NodeId {
        meter.tree();
        while let Some(c) = self.nodes[id.index()].right.as_child() {
            meter.tree();
            id = c;
        }
        id
    }

    /// Parent of a real node (the dummy for the root).
    ///
    /// The right thread leaving the rightmost node of `id`'s subtree reaches
    /// the nearest ancestor holding that subtree on its left; the left thread
    /// leaving the leftmost node reaches the nearest ancestor holding it on its
    /// right. One of the two is the parent.
    pub fn parent_of(&self, id: NodeId) -> NodeId {
        self.parent_of_metered(id, &mut Meter::default())
    }

    fn parent_of_metered(&self, id: NodeId, meter: &mut Meter) -> NodeId {
        if self.nodes[0].left == Link::child(id) {
            return NodeId::DUMMY;
        }
        let above = self.nodes[self.rightmost(id, meter).index()].right.target();
        meter.tree();
        if !above.is_dummy() && self.nodes[above.index()].left == Link::child(id) {
            return above;
        }
        let below = self.nodes[self.leftmost(id, meter).index()].left.target();
        debug_assert_eq!(self.nodes[below.index()].right, Link::child(id));
        below
    }

    /// Height of the tree (0 when empty).
    pub fn height(&self) -> usize {
        fn go<T>(t: &Tree<T>, id: Option<NodeId>) -> usize {
            match id {
                None => 0,
                Some(id) => {
                    let n = &t.nodes[id.index()];
                    1 + go(t, n.left.as_child()).max(go(t, n.right.as_child()))
                }
            }
        }
        go(self, self.root())
    }

    /// Walks the inorder sequence by threads, from the first node to the last.
    pub fn iter(&self) -> Iter<'_, T> {
        Iter {
            tree: self,
            next: self.first,
        }
    }

    /// Checks balance factors, thread consistency, key order and the dummy
    /// boundary. An empty result means the tree is valid.
    pub fn validate(&self) -> Vec<TreeViolation> {
        let mut out = Vec::new();
        if !self.nodes[0].right.is_thread() || self.nodes[0].right.target() != NodeId::DUMMY {
            out.push(TreeViolation::DummyLink);
        }
        if self.nodes[0].left.is_thread() && self.nodes[0].left.target() != NodeId::DUMMY {
            out.push(TreeViolation::DummyLink);
        }

        // Recursive inorder over child links only.
        let mut order = Vec::with_capacity(self.len);
        let mut seen = vec![false; self.nodes.len()];
        let height = match self.root() {
            Some(root) => self.collect(root, &mut order, &mut seen, &mut out),
            None => 0,
        };
        if order.len() != self.len {
            out.push(TreeViolation::Size {
                expected: self.len,
                found: order.len(),
            });
        }
        for &id in &order {
            if !self.nodes[id.index()].live {
                out.push(TreeViolation::DeadNode { node: id });
            }
        }
        for pair in order.windows(2) {
            if self.key(pair[0]) >= self.key(pair[1]) {
                out.push(TreeViolation::Order {
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }

        let mut thread_errors = 0;
        for (i, &id) in order.iter().enumerate() {
            let pred = if i == 0 { NodeId::DUMMY } else { order[i - 1] };
            let succ = order.get(i + 1).copied().unwrap_or(NodeId::DUMMY);
            let node = &self.nodes[id.index()];
            if node.left.is_thread() && node.left.target() != pred {
                thread_errors += 1;
                out.push(TreeViolation::Thread {
                    node: id,
                    side: Side::Left,
                    expected: pred,
                    found: node.left.target(),
                });
            }
            if node.right.is_thread() && node.right.target() != succ {
                thread_errors += 1;
                out.push(TreeViolation::Thread {
                    node: id,
                    side: Side::Right,
                    expected: succ,
                    found: node.right.target(),
                });
            }
        }

        let first = order.first().copied().unwrap_or(NodeId::DUMMY);
        let last = order.last().copied().unwrap_or(NodeId::DUMMY);
        if self.first != first {
            out.push(TreeViolation::Boundary {
                which: "first",
                expected: first,
                found: self.first,
            });
        }
        if self.last != last {
            out.push(TreeViolation::Boundary {
                which: "last",
                expected: last,
                found: self.last,
            });
        }

        // The thread walk is only meaningful once every slot checks out.
        if thread_errors == 0 && out.is_empty() {
            let mut meter = Meter::default();
            let mut at = self.in_succ_metered(NodeId::DUMMY, &mut meter);
            for (position, &expected) in order.iter().enumerate() {
                if at != expected {
                    out.push(TreeViolation::WalkMismatch { position });
                    break;
                }
                at = self.in_succ_metered(at, &mut meter);
            }
            if out.is_empty() && !at.is_dummy() {
                out.push(TreeViolation::WalkMismatch {
                    position: order.len(),
                });
            }
            if out.is_empty() && self.in_pred(first) != NodeId::DUMMY {
                out.push(TreeViolation::WalkMismatch { position: 0 });
            }
        }

        let bound = 1.45 * ((self.len + 2) as f64).log2();
        if height as f64 > bound {
            out.push(TreeViolation::Height {
                height,
                size: self.len,
            });
        }
        out
    }

    /// Inorder collection with height and balance checks; returns the height.
    fn collect(
        &self,
        id: NodeId,
        order: &mut Vec<NodeId>,
        seen: &mut [bool],
        out: &mut Vec<TreeViolation>,
    ) -> usize {
        if id.is_dummy() || id.index() >= self.nodes.len() || seen[id.index()] {
            out.push(TreeViolation::Cycle { node: id });
            return 0;
        }
        seen[id.index()] = true;
        let node = &self.nodes[id.index()];
        let lh = match node.left.as_child() {
            Some(c) => self.collect(c, order, seen, out),
            None => 0,
        };
        order.push(id);
        let rh = match node.right.as_child() {
            Some(c) => self.collect(c, order, seen, out),
            None => 0,
        };
        let actual = rh as i64 - lh as i64;
        if actual != node.balance as i64 {
            out.push(TreeViolation::Balance {
                node: id,
                stored: node.balance,
                actual,
            });
        }
        if actual.abs() > 1 {
            out.push(TreeViolation::Unbalanced {
                node: id,
                balance: actual,
            });
        }
        1 + lh.max(rh)
    }
}

/// Inorder iterator following threads.
pub struct Iter<'a, T> {
    tree: &'a Tree<T>,
    next: NodeId,
}

impl<T> Iterator for Iter<'_, T> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.next.is_dummy() {
            return None;
        }
        let at = self.next;
        self.next = self.tree.in_succ(at);
        Some(at)
    }
}

/// A broken tree invariant, as reported by [`Tree::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    DummyLink,
    Cycle {
        node: NodeId,
    },
    DeadNode {
        node: NodeId,
    },
    Size {
        expected: usize,
        found: usize,
    },
    Order {
        prev: NodeId,
        next: NodeId,
    },
    Balance {
        node: NodeId,
        stored: i8,
        actual: i64,
    },
    Unbalanced {
        node: NodeId,
        balance: i64,
    },
    Thread {
        node: NodeId,
        side: Side,
        expected: NodeId,
        found: NodeId,
    },
    Boundary {
        which: &'static str,
        expected: NodeId,
        found: NodeId,
    },
    WalkMismatch {
        position: usize,
    },
    Height {
        height: usize,
        size: usize,
    },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::DummyLink => f.write_str("dummy links are inconsistent"),
            TreeViolation::Cycle { node } => write!(f, "child links revisit {node:?}"),
            TreeViolation::DeadNode { node } => write!(f, "freed node {node:?} is reachable"),
            TreeViolation::Size { expected, found } => {
                write!(f, "size is {expected} but {found} nodes are reachable")
            }
            TreeViolation::Order { prev, next } => {
                write!(
                    f,
                    "keys of {prev:?} and {next:?} are not strictly increasing"
                )
            }
            TreeViolation::Balance {
                node,
                stored,
                actual,
            } => write!(f, "{node:?} stores balance {stored}, actual {actual}"),
            TreeViolation::Unbalanced { node, balance } => {
                write!(f, "{node:?} has balance {balance}")
            }
            TreeViolation::Thread {
                node,
                side,
                expected,
                found,
            } => write!(
                f,
                "{side:?} thread of {node:?} names {found:?}, inorder neighbour is {expected:?}"
            ),
            TreeViolation::Boundary {
                which,
                expected,
                found,
            } => write!(f, "{which} node is {found:?}, expected {expected:?}"),
            TreeViolation::WalkMismatch { position } => {
                write!(
                    f,
                    "thread walk diverges from inorder at position {position}"
                )
            }
            TreeViolation::Height { height, size } => {
                write!(f, "height {height} exceeds the AVL bound for {size} nodes")
            }
        }
    }
}
