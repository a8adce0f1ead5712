//! Affine mapping of signed or fractional input onto the integer universe.

use bits_kdtree::{Coord, QueryWindow};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub offset: f64,
    pub scale: f64,
}

impl Affine {
    fn apply(&self, x: f64) -> f64 {
        ((x - self.offset) * self.scale).round()
    }
}

/// Per-dimension mapping. Dimensions whose raw values are already integers
/// in `[0, bound)` pass through untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantizer {
    bound: u64,
    dims: Vec<Option<Affine>>,
}

impl Quantizer {
    pub fn identity(k: usize, bound: u64) -> Self {
        Quantizer {
            bound,
            dims: vec![None; k],
        }
    }

    /// Chooses a mapping from the raw points: a dimension holding any
    /// negative, fractional or out-of-range value is stretched so its
    /// minimum lands on 0 and its maximum on `bound - 1`.
    pub fn fit(points: &[Vec<f64>], k: usize, bound: u64) -> Self {
        let top = (bound - 1) as f64;
        let dims = (0..k)
            .map(|d| {
                let values = points.iter().map(|p| p[d]);
                let exact = values
                    .clone()
                    .all(|x| x >= 0.0 && x.fract() == 0.0 && x <= top);
                if exact {
                    return None;
                }
                let min = values.clone().fold(f64::INFINITY, f64::min);
                let max = values.fold(f64::NEG_INFINITY, f64::max);
                let scale = if max > min { top / (max - min) } else { 1.0 };
                Some(Affine { offset: min, scale })
            })
            .collect();
        Quantizer { bound, dims }
    }

    pub fn is_identity(&self) -> bool {
        self.dims.iter().all(Option::is_none)
    }

    pub fn dims(&self) -> &[Option<Affine>] {
        &self.dims
    }

    pub fn map_point(&self, raw: &[f64]) -> Vec<Coord> {
        let top = (self.bound - 1) as f64;
        raw.iter()
            .zip(&self.dims)
            .map(|(&x, a)| match a {
                Some(a) => a.apply(x).clamp(0.0, top) as Coord,
                None => x as Coord,
            })
            .collect()
    }

    /// Maps raw inclusive ranges; `Ok(None)` when the window misses the
    /// universe entirely.
    pub fn map_window(&self, raw: &[(f64, f64)]) -> Result<Option<QueryWindow>, BenchError> {
        let top = (self.bound - 1) as f64;
        let mut ranges = Vec::with_capacity(raw.len());
        for (&(lo, hi), a) in raw.iter().zip(&self.dims) {
            let (lo, hi) = match a {
                Some(a) => (a.apply(lo), a.apply(hi)),
                None => (lo.ceil(), hi.floor()),
            };
            if lo > top || hi < 0.0 || lo > hi {
                return Ok(None);
            }
            ranges.push((lo.max(0.0) as Coord, hi.min(top) as Coord));
        }
        Ok(Some(QueryWindow::new(ranges)?))
    }

    /// One comment line per dimension, for report headers.
    pub fn describe(&self) -> Vec<String> {
        if self.is_identity() {
            return vec!["# quantize none".to_string()];
        }
        self.dims
            .iter()
            .enumerate()
            .map(|(d, a)| match a {
                Some(a) => format!(
                    "# quantize dim={} q=round((x - {}) * {}) clamped to [0, {}]",
                    d + 1,
                    a.offset,
                    a.scale,
                    self.bound - 1
                ),
                None => format!("# quantize dim={} identity", d + 1),
            })
            .collect()
    }
}
