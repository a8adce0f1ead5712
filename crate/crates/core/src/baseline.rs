//! Reference answers: a brute-force filter and a classical kd-tree.

use std::collections::HashSet;

use crate::index::Point;
use crate::query::QueryWindow;
use crate::Coord;

/// Points in ingestion order with duplicates dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new<I>(points: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Point>,
    {
        let mut seen = HashSet::new();
        let points = points
            .into_iter()
            .map(Into::into)
            .filter(|p: &Point| seen.insert(p.clone()))
            .collect();
        PointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

/// Sorted points of `set` inside `window`.
pub fn brute_force_query(set: &PointSet, window: &QueryWindow) -> Vec<Point> {
    let mut out: Vec<Point> = set.iter().filter(|p| window.contains(p)).cloned().collect();
    out.sort();
    out
}

#[derive(Clone, Debug)]
struct KdNode {
    point: Point,
    left: Option<u32>,
    right: Option<u32>,
}

/// Unbalanced kd-tree built by sequential insertion, splitting on
/// coordinate `depth % k`. Smaller values go left.
#[derive(Clone, Debug)]
pub struct NaiveKdTree {
    dims: usize,
    nodes: Vec<KdNode>,
}

impl NaiveKdTree {
    pub fn new(dims: usize) -> Self {
        NaiveKdTree {
            dims,
            nodes: Vec::new(),
        }
    }

    pub fn build(dims: usize, set: &PointSet) -> Self {
        let mut tree = Self::new(dims);
        for p in set.iter() {
            tree.insert(p.clone());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Returns `false` if the point is already present.
    pub fn insert(&mut self, point: Point) -> bool {
        assert_eq!(point.len(), self.dims, "point dimension");
        if self.nodes.is_empty() {
            self.nodes.push(KdNode {
                point,
                left: None,
                right: None,
            });
            return true;
        }
        let mut at = 0usize;
        let mut depth = 0;
        loop {
            let node = &self.nodes[at];
            if node.point == point {
                return false;
            }
            let d = depth % self.dims;
            let go_left = point[d] < node.point[d];
            let next = if go_left { node.left } else { node.right };
            match next {
                Some(n) => at = n as usize,
                None => {
                    let id = self.nodes.len() as u32;
                    self.nodes.push(KdNode {
                        point,
                        left: None,
                        right: None,
                    });
                    let node = &mut self.nodes[at];
                    if go_left {
                        node.left = Some(id);
                    } else {
                        node.right = Some(id);
                    }
                    return true;
                }
            }
            depth += 1;
        }
    }

    /// Sorted matches and the number of nodes visited.
    pub fn query(&self, window: &QueryWindow) -> (Vec<Point>, u64) {
        let mut out = Vec::new();
        let mut visited = 0;
        let mut stack: Vec<(u32, usize)> = Vec::new();
        if !self.nodes.is_empty() {
            stack.push((0, 0));
        }
        let ranges = window.ranges();
        while let Some((id, depth)) = stack.pop() {
            visited += 1;
            let node = &self.nodes[id as usize];
            if window.contains(&node.point) {
                out.push(node.point.clone());
            }
            let d = depth % self.dims;
            let (lo, hi): (Coord, Coord) = ranges[d];
            let split = node.point[d];
            if let Some(r) = node.right {
                if hi >= split {
                    stack.push((r, depth + 1));
                }
            }
            if let Some(l) = node.left {
                if lo < split {
                    stack.push((l, depth + 1));
                }
            }
        }
        out.sort();
        (out, visited)
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn dedup_keeps_first_occurrence_order() {
        let set = PointSet::new(vec![vec![3, 1], vec![1, 1], vec![3, 1]]);
        assert_eq!(
            set.points(),
            &[Point::from(vec![3, 1]), Point::from(vec![1, 1])]
        );
    }

    #[test]
    fn example_queries() {
        let set = PointSet::new([[2, 2], [2, 6], [6, 2], [6, 6], [8, 10]].map(|p| p.to_vec()));
        let w = QueryWindow::new(vec![(1, 8), (5, 7)]).unwrap();
        let expected = vec![Point::from(vec![2, 6]), Point::from(vec![6, 6])];
        assert_eq!(brute_force_query(&set, &w), expected);
        let kd = NaiveKdTree::build(2, &set);
        assert_eq!(kd.query(&w).0, expected);
    }

    #[test]
    fn kd_tree_agrees_with_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = PointSet::new((0..2000).map(|_| {
            (0..3)
                .map(|_| rng.random_range(0..50))
                .collect::<Vec<Coord>>()
        }));
        let kd = NaiveKdTree::build(3, &set);
        assert_eq!(kd.len(), set.len());
        for _ in 0..200 {
            let ranges = (0..3)
                .map(|_| {
                    let a = rng.random_range(0..50);
                    let b = rng.random_range(0..50);
                    (a.min(b), a.max(b))
                })
                .collect();
            let w = QueryWindow::new(ranges).unwrap();
            let (got, visited) = kd.query(&w);
            assert_eq!(got, brute_force_query(&set, &w));
            assert!(visited as usize <= kd.len());
        }
    }

    #[test]
    fn duplicate_kd_insert() {
        let mut kd = NaiveKdTree::new(2);
        assert!(kd.insert(Point::from(vec![1, 2])));
        assert!(!kd.insert(Point::from(vec![1, 2])));
        assert_eq!(kd.len(), 1);
    }
}
