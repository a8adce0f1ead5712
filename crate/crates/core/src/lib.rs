//! BITS kd-tree: orthogonal range search over k-dimensional integer points.
//!
//! The index keeps one height-balanced, two-way inorder-threaded tree per
//! dimension. Level `j` stores the distinct `j`-coordinate prefixes of the
//! point set in lexicographic order. Every level-`j` node carries a cross link
//! to the smallest node of its group in level `j + 1`, and every such
//! cross-link node owns a threaded trie that jumps to the first group member
//! whose last coordinate is at least a given value.
//!
//! ```
//! use bits_kdtree::{BitsKdTree, IndexConfig, Point, QueryWindow};
//!
//! let config = IndexConfig::new(2, 10, 2).unwrap();
//! let points = [[2, 2], [2, 6], [6, 2], [6, 6], [8, 10]].map(|p| Point::from(p.to_vec()));
//! let index = BitsKdTree::build(config, points).unwrap();
//!
//! let window = QueryWindow::new(vec![(1, 8), (5, 7)]).unwrap();
//! let (found, stats) = index.window_query(&window).unwrap();
//! assert_eq!(found, vec![Point::from(vec![2, 6]), Point::from(vec![6, 6])]);
//! assert_eq!(stats.per_level_candidates, vec![3, 2]);
//! ```

pub mod baseline;
mod error;
pub mod index;
mod meter;
pub mod query;
pub mod tree;
pub mod trie;

pub use baseline::{brute_force_query, NaiveKdTree, PointSet};
pub use error::{Error, Result};
pub use index::{BitsKdTree, IndexConfig, IndexViolation, LevelLinks, Point};
pub use meter::Meter;
pub use query::{QueryWindow, VisitStats};
pub use tree::{Link, NodeId, Side, Tree, TreeViolation};
pub use trie::{ThreadedTrie, TrieConfig, TrieDataNode, TrieViolation};

/// A single coordinate value; every coordinate lives in `[0, R^W)`.
pub type Coord = u32;
