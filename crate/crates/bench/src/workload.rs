//! Reproducible point sets and query windows.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use bits_kdtree::{Coord, QueryWindow};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    Uniform,
    Clustered,
}

impl FromStr for Distribution {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clustered" => Ok(Distribution::Clustered),
            other => Err(BenchError::Usage(format!(
                "unknown distribution {other:?}, expected uniform or clustered"
            ))),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Clustered => "clustered",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetSpec {
    pub n: usize,
    pub k: usize,
    pub dist: Distribution,
    pub seed: u64,
    /// Coordinates are drawn from `[0, bound)`.
    pub bound: u64,
}

impl DatasetSpec {
    /// Number of distinct points the universe can hold, saturating.
    pub fn capacity(&self) -> u128 {
        (0..self.k).fold(1u128, |acc, _| acc.saturating_mul(self.bound as u128))
    }
}

/// `spec.n` distinct points. Same spec, same points.
pub fn generate_points(spec: &DatasetSpec) -> Result<Vec<Vec<Coord>>, BenchError> {
    if spec.k == 0 {
        return Err(BenchError::Generation("k must be at least 1".into()));
    }
    if spec.bound == 0 || spec.bound > Coord::MAX as u64 + 1 {
        return Err(BenchError::Generation(format!(
            "bound {} outside 1..=2^32",
            spec.bound
        )));
    }
    if spec.n as u128 > spec.capacity() {
        return Err(BenchError::Generation(format!(
            "{} distinct points do not fit in a universe of {}^{}",
            spec.n, spec.bound, spec.k
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.dist {
        Distribution::Uniform => Ok(uniform(spec, &mut rng)),
        Distribution::Clustered => clustered(spec, &mut rng),
    }
}

fn uniform(spec: &DatasetSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Coord>> {
    let capacity = spec.capacity();
    if capacity <= 4 * spec.n as u128 {
        // Dense: sample cell numbers without replacement.
        return index::sample(rng, capacity as usize, spec.n)
            .into_iter()
            .map(|mut cell| {
                let mut p = vec![0; spec.k];
                for c in p.iter_mut().rev() {
                    *c = (cell as u64 % spec.bound) as Coord;
                    cell = (cell as u64 / spec.bound) as usize;
                }
                p
            })
            .collect();
    }
    let mut seen = HashSet::with_capacity(spec.n);
    let mut out = Vec::with_capacity(spec.n);
    while out.len() < spec.n {
        let p: Vec<Coord> = (0..spec.k)
            .map(|_| rng.random_range(0..spec.bound) as Coord)
            .collect();
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

fn clustered(spec: &DatasetSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Coord>>, BenchError> {
    let bound = spec.bound as f64;
    let sigma = (bound / 64.0).max(1.0);
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    let center = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..spec.k).map(|_| rng.random_range(0.0..bound)).collect()
    };
    let mut centers: Vec<Vec<f64>> = (0..(spec.n / 500).clamp(1, 16))
        .map(|_| center(rng))
        .collect();

    let mut seen = HashSet::with_capacity(spec.n);
    let mut out = Vec::with_capacity(spec.n);
    let mut misses = 0u32;
    let mut attempts = 0u64;
    let max_attempts = 1000 * spec.n as u64 + 10_000;
    while out.len() < spec.n {
        attempts += 1;
        if attempts > max_attempts {
            return Err(BenchError::Generation(format!(
                "gave up after {max_attempts} draws with {} of {} points",
                out.len(),
                spec.n
            )));
        }
        // A cluster that keeps producing rejects is saturated.
        if misses > 64 {
            centers.push(center(rng));
            misses = 0;
        }
        let c = &centers[rng.random_range(0..centers.len())];
        let p: Option<Vec<Coord>> = c
            .iter()
            .map(|&m| {
                let x = (m + normal.sample(rng)).round();
                (x >= 0.0 && x < bound).then_some(x as Coord)
            })
            .collect();
        match p {
            Some(p) if seen.insert(p.clone()) => {
                out.push(p);
                misses = 0;
            }
            _ => misses += 1,
        }
    }
    Ok(out)
}

/// Windows whose volume is about `selectivity` of the universe, placed
/// uniformly.
pub fn generate_windows(
    rng: &mut impl Rng,
    k: usize,
    bound: u64,
    count: usize,
    selectivity: f64,
) -> Vec<QueryWindow> {
    let side = ((bound as f64) * selectivity.clamp(0.0, 1.0).powf(1.0 / k as f64)).round();
    let side = (side as u64).clamp(1, bound);
    (0..count)
        .map(|_| {
            let ranges = (0..k)
                .map(|_| {
                    let lo = rng.random_range(0..=bound - side);
                    (lo as Coord, (lo + side - 1) as Coord)
                })
                .collect();
            QueryWindow::new(ranges).expect("lo <= hi by construction")
        })
        .collect()
}

/// Windows with independent random endpoints per dimension.
pub fn random_windows(rng: &mut impl Rng, k: usize, bound: u64, count: usize) -> Vec<QueryWindow> {
    (0..count)
        .map(|_| {
            let ranges = (0..k)
                .map(|_| {
                    let a = rng.random_range(0..bound) as Coord;
                    let b = rng.random_range(0..bound) as Coord;
                    (a.min(b), a.max(b))
                })
                .collect();
            QueryWindow::new(ranges).expect("lo <= hi by construction")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, k: usize, dist: Distribution, bound: u64) -> DatasetSpec {
        DatasetSpec {
            n,
            k,
            dist,
            seed: 7,
            bound,
        }
    }

    fn distinct_in_range(points: &[Vec<Coord>], k: usize, bound: u64) {
        let set: HashSet<_> = points.iter().collect();
        assert_eq!(set.len(), points.len());
        assert!(points
            .iter()
            .all(|p| p.len() == k && p.iter().all(|&c| (c as u64) < bound)));
    }

    #[test]
    fn uniform_is_deterministic_and_distinct() {
        let s = spec(10_000, 3, Distribution::Uniform, 64);
        let a = generate_points(&s).unwrap();
        assert_eq!(a, generate_points(&s).unwrap());
        assert_eq!(a.len(), 10_000);
        distinct_in_range(&a, 3, 64);
    }

    #[test]
    fn dense_universe_is_filled_exactly() {
        let s = spec(16, 2, Distribution::Uniform, 4);
        let mut a = generate_points(&s).unwrap();
        a.sort();
        let all: Vec<Vec<Coord>> = (0..4)
            .flat_map(|x| (0..4).map(move |y| vec![x, y]))
            .collect();
        assert_eq!(a, all);
    }

    #[test]
    fn too_many_points() {
        let s = spec(17, 2, Distribution::Uniform, 4);
        assert!(matches!(
            generate_points(&s),
            Err(BenchError::Generation(_))
        ));
    }

    #[test]
    fn clustered_points() {
        for (k, bound) in [(1, 1 << 16), (2, 1 << 10), (4, 32)] {
            let s = spec(10_000, k, Distribution::Clustered, bound);
            let a = generate_points(&s).unwrap();
            assert_eq!(a, generate_points(&s).unwrap());
            assert_eq!(a.len(), 10_000);
            distinct_in_range(&a, k, bound);
        }
    }

    #[test]
    fn empty_dataset() {
        assert!(generate_points(&spec(0, 2, Distribution::Clustered, 10))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn window_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ws = generate_windows(&mut rng, 2, 1000, 50, 0.01);
        for w in ws {
            for &(lo, hi) in w.ranges() {
                assert_eq!(hi - lo + 1, 100);
                assert!(hi < 1000);
            }
        }
    }

    #[test]
    fn distribution_names() {
        assert_eq!(
            "clustered".parse::<Distribution>().unwrap(),
            Distribution::Clustered
        );
        assert!("gaussian".parse::<Distribution>().is_err());
    }
}
