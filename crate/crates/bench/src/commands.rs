//! The generate, verify and bench commands, minus argument parsing.

use std::time::Instant;

use bits_kdtree::{
    brute_force_query, BitsKdTree, Coord, IndexConfig, Meter, NaiveKdTree, Point, PointSet,
    QueryWindow, VisitStats,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::files::PointsFile;
use crate::quantize::Quantizer;
use crate::report::{Engine, Phase, Report, Row};
use crate::workload::{generate_points, generate_windows, DatasetSpec, Distribution};
use crate::BenchError;

pub const DEFAULT_RADIX: u32 = 16;

/// Index parameters for coordinates in `[0, bound)`. Without an explicit
/// width the smallest sufficient one is used.
pub fn index_config(
    k: usize,
    bound: u64,
    radix: u32,
    width: Option<u32>,
) -> Result<IndexConfig, BenchError> {
    match width {
        None => Ok(IndexConfig::with_radix(k, radix, bound)?),
        Some(w) => {
            let config = IndexConfig::new(k, radix, w)?;
            if config.universe() < bound {
                return Err(BenchError::Usage(format!(
                    "radix {radix} width {w} covers {} values, bound is {bound}",
                    config.universe()
                )));
            }
            Ok(config)
        }
    }
}

/// The counter identities every query must satisfy.
pub fn accounting_holds(stats: &VisitStats) -> bool {
    let inner = stats.inner_candidates();
    stats.trie_lookups <= 1 + inner && stats.cross_links_followed == inner
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub points: Vec<Vec<Coord>>,
    pub windows: Vec<QueryWindow>,
}

/// Points for `spec` plus `windows` query windows of the given selectivity.
pub fn generate(
    spec: &DatasetSpec,
    windows: usize,
    selectivity: f64,
) -> Result<Generated, BenchError> {
    let points = generate_points(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9E37_79B9_7F4A_7C15);
    let windows = generate_windows(&mut rng, spec.k, spec.bound, windows, selectivity);
    Ok(Generated { points, windows })
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub mismatches: usize,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.violations.is_empty()
    }
}

struct Engines {
    set: PointSet,
    index: BitsKdTree,
    kd: NaiveKdTree,
}

/// Runs every window on all three engines, appending one row per engine
/// and query. Returns the number of disagreements.
fn run_queries(
    engines: &Engines,
    windows: &[Option<QueryWindow>],
    dist: &str,
    report: &mut Report,
) -> Result<usize, BenchError> {
    let k = engines.index.dims();
    let n = engines.set.len();
    let mut mismatches = 0;
    for (id, window) in windows.iter().enumerate() {
        let row = |engine| Row::new(engine, Phase::Query, dist, n, k, id);
        let Some(w) = window else {
            // Window outside the universe: nothing to run, nothing found.
            for engine in [Engine::Bits, Engine::KdTree, Engine::BruteForce] {
                let mut r = row(engine);
                r.level_candidates = vec![0; if engine == Engine::Bits { k } else { 0 }];
                report.rows.push(r);
            }
            continue;
        };

        let start = Instant::now();
        let (bits, stats) = engines.index.window_query(w)?;
        let bits_ns = start.elapsed().as_nanos() as u64;
        let start = Instant::now();
        let (kd, kd_visited) = engines.kd.query(w);
        let kd_ns = start.elapsed().as_nanos() as u64;
        let start = Instant::now();
        let brute = brute_force_query(&engines.set, w);
        let brute_ns = start.elapsed().as_nanos() as u64;

        if bits != brute || kd != brute {
            mismatches += 1;
            report.notes.push(format!(
                "mismatch query={id} bits={} kdtree={} brute={}",
                bits.len(),
                kd.len(),
                brute.len()
            ));
        }
        if !accounting_holds(&stats) {
            mismatches += 1;
            report.notes.push(format!(
                "accounting query={id} trie_lookups={} cross_links={} candidates={:?}",
                stats.trie_lookups, stats.cross_links_followed, stats.per_level_candidates
            ));
        }

        let mut r = row(Engine::Bits).with_stats(&stats);
        r.results = bits.len() as u64;
        r.wall_ns = bits_ns;
        report.rows.push(r);
        let mut r = row(Engine::KdTree);
        r.results = kd.len() as u64;
        r.tree_nodes = kd_visited;
        r.wall_ns = kd_ns;
        report.rows.push(r);
        let mut r = row(Engine::BruteForce);
        r.results = brute.len() as u64;
        r.tree_nodes = n as u64;
        r.wall_ns = brute_ns;
        report.rows.push(r);
    }
    Ok(mismatches)
}

fn config_line(config: &IndexConfig, bound: u64) -> String {
    format!(
        "# index k={} bound={bound} radix={} width={}",
        config.dims(),
        config.radix(),
        config.width()
    )
}

/// Builds the index from a points file, checks its invariants and compares
/// every query against both baselines.
pub fn verify(
    points: &PointsFile,
    queries: &[Vec<(f64, f64)>],
    radix: u32,
    width: Option<u32>,
) -> Result<Outcome, BenchError> {
    let config = index_config(points.k, points.bound, radix, width)?;
    let quantizer = Quantizer::fit(&points.raw, points.k, points.bound);
    let set = PointSet::new(
        points
            .raw
            .iter()
            .map(|p| Point::from(quantizer.map_point(p))),
    );
    let index = BitsKdTree::build(config, set.iter().map(|p| p.coords()))?;
    let kd = NaiveKdTree::build(points.k, &set);
    let violations: Vec<String> = index
        .validate_index()
        .iter()
        .map(ToString::to_string)
        .collect();

    let windows = queries
        .iter()
        .map(|q| quantizer.map_window(q))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Report {
        header: vec![config_line(&config, points.bound)],
        ..Report::default()
    };
    report.header.extend(quantizer.describe());
    if set.len() != points.raw.len() {
        report.header.push(format!(
            "# duplicates dropped={}",
            points.raw.len() - set.len()
        ));
    }
    let engines = Engines { set, index, kd };
    let mismatches = run_queries(&engines, &windows, "file", &mut report)?;
    report
        .notes
        .extend(violations.iter().map(|v| format!("violation {v}")));
    Ok(Outcome {
        report,
        mismatches,
        violations,
    })
}

#[derive(Clone, Debug)]
pub struct BenchParams {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub dist: Distribution,
    pub seed: u64,
    pub bound: u64,
    pub radix: u32,
    pub width: Option<u32>,
    pub queries: usize,
    pub selectivity: f64,
    /// Share of the points deleted after the query phase.
    pub delete_fraction: f64,
}

/// A dataset to measure: generated from parameters or read from a file.
pub enum Dataset<'a> {
    Generated(&'a BenchParams),
    File {
        points: &'a PointsFile,
        queries: Option<&'a [Vec<(f64, f64)>]>,
        params: &'a BenchParams,
    },
}

/// Measures insertion, queries and deletion on each dataset size.
pub fn bench(dataset: Dataset<'_>) -> Result<Outcome, BenchError> {
    let mut report = Report::default();
    let mut mismatches = 0;
    let mut violations = Vec::new();
    match dataset {
        Dataset::Generated(params) => {
            report.header.push(format!(
                "# bench dist={} seed={} queries={} selectivity={} delete_fraction={}",
                params.dist,
                params.seed,
                params.queries,
                params.selectivity,
                params.delete_fraction
            ));
            report.header.push("# quantize none".into());
            for &n in &params.sizes {
                let spec = DatasetSpec {
                    n,
                    k: params.k,
                    dist: params.dist,
                    seed: params.seed,
                    bound: params.bound,
                };
                let generated = generate(&spec, params.queries, params.selectivity)?;
                let windows: Vec<_> = generated.windows.into_iter().map(Some).collect();
                let dist = params.dist.to_string();
                let (m, v) = bench_one(
                    generated.points,
                    &windows,
                    params,
                    params.bound,
                    &dist,
                    &mut report,
                )?;
                mismatches += m;
                violations.extend(v);
            }
        }
        Dataset::File {
            points,
            queries,
            params,
        } => {
            let quantizer = Quantizer::fit(&points.raw, points.k, points.bound);
            report.header.push(format!(
                "# bench file queries={} delete_fraction={}",
                queries.map_or(params.queries, <[_]>::len),
                params.delete_fraction
            ));
            report.header.extend(quantizer.describe());
            let pts: Vec<Vec<Coord>> = points.raw.iter().map(|p| quantizer.map_point(p)).collect();
            let windows = match queries {
                Some(q) => q
                    .iter()
                    .map(|q| quantizer.map_window(q))
                    .collect::<Result<Vec<_>, _>>()?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                    generate_windows(
                        &mut rng,
                        points.k,
                        points.bound,
                        params.queries,
                        params.selectivity,
                    )
                    .into_iter()
                    .map(Some)
                    .collect()
                }
            };
            let params = BenchParams {
                k: points.k,
                ..params.clone()
            };
            let (m, v) = bench_one(pts, &windows, &params, points.bound, "file", &mut report)?;
            mismatches += m;
            violations.extend(v);
        }
    }
    Ok(Outcome {
        report,
        mismatches,
        violations,
    })
}

fn bench_one(
    points: Vec<Vec<Coord>>,
    windows: &[Option<QueryWindow>],
    params: &BenchParams,
    bound: u64,
    dist: &str,
    report: &mut Report,
) -> Result<(usize, Vec<String>), BenchError> {
    let k = params.k;
    let config = index_config(k, bound, params.radix, params.width)?;
    if !report.header.iter().any(|l| l.starts_with("# index")) {
        report.header.insert(0, config_line(&config, bound));
    }
    let set = PointSet::new(points.into_iter().map(Point::from));
    let n = set.len();

    let mut index = BitsKdTree::new(config);
    let build_start = Instant::now();
    for (id, p) in set.iter().enumerate() {
        let mut meter = Meter::default();
        let start = Instant::now();
        index.insert_metered(p, &mut meter)?;
        let mut r = Row::new(Engine::Bits, Phase::Insert, dist, n, k, id);
        r.wall_ns = start.elapsed().as_nanos() as u64;
        r.touches = meter.touches();
        r.tree_nodes = meter.tree_touches;
        r.trie_nodes = meter.trie_touches;
        report.rows.push(r);
    }
    let mut r = Row::new(Engine::Bits, Phase::Build, dist, n, k, 0);
    r.results = n as u64;
    r.wall_ns = build_start.elapsed().as_nanos() as u64;
    report.rows.push(r);

    let start = Instant::now();
    let kd = NaiveKdTree::build(k, &set);
    let mut r = Row::new(Engine::KdTree, Phase::Build, dist, n, k, 0);
    r.results = kd.len() as u64;
    r.wall_ns = start.elapsed().as_nanos() as u64;
    report.rows.push(r);

    let violations: Vec<String> = index
        .validate_index()
        .iter()
        .map(ToString::to_string)
        .collect();
    let engines = Engines { set, index, kd };
    let mismatches = run_queries(&engines, windows, dist, report)?;

    let Engines { set, mut index, .. } = engines;
    let mut order: Vec<&Point> = set.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(
        params.seed.wrapping_add(n as u64),
    ));
    let deletes = ((n as f64) * params.delete_fraction.clamp(0.0, 1.0)).round() as usize;
    for (id, p) in order.into_iter().take(deletes).enumerate() {
        let mut meter = Meter::default();
        let start = Instant::now();
        index.delete_metered(p, &mut meter)?;
        let mut r = Row::new(Engine::Bits, Phase::Delete, dist, n, k, id);
        r.wall_ns = start.elapsed().as_nanos() as u64;
        r.touches = meter.touches();
        r.tree_nodes = meter.tree_touches;
        r.trie_nodes = meter.trie_touches;
        report.rows.push(r);
    }
    Ok((mismatches, violations))
}
