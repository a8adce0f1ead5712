//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use bits_bench::commands::{self, accounting_holds, BenchParams, Dataset};
use bits_bench::report::{Engine, Phase};
use bits_bench::workload::{
    generate_points, generate_windows, random_windows, DatasetSpec, Distribution,
};
use bits_kdtree::{
    brute_force_query, BitsKdTree, Coord, IndexConfig, Meter, NaiveKdTree, Point, PointSet,
    QueryWindow, ThreadedTrie, TrieConfig, VisitStats,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Counter identities checked on every query the run executes.
#[derive(Default)]
struct Accounting {
    queries: u64,
    failures: u64,
}

impl Accounting {
    fn check(&mut self, stats: &VisitStats) {
        self.queries += 1;
        if !accounting_holds(stats) {
            self.failures += 1;
        }
    }
}

fn points_of(spec: &DatasetSpec) -> Vec<Vec<Coord>> {
    generate_points(spec).expect("workload fits its universe")
}

fn build(k: usize, bound: u64, points: &[Vec<Coord>]) -> BitsKdTree {
    let config = IndexConfig::for_bound(k, bound).unwrap();
    BitsKdTree::build(config, points.iter().map(Vec::as_slice)).unwrap()
}

fn worked_example() -> Verdict {
    let start = Instant::now();
    let config = IndexConfig::new(2, 10, 2).unwrap();
    let pts = [[2, 2], [2, 6], [6, 2], [6, 6], [8, 10]].map(|p| p.to_vec());
    let index = BitsKdTree::build(config, pts).unwrap();
    let q = |r: Vec<(Coord, Coord)>| index.window_query(&QueryWindow::new(r).unwrap()).unwrap().0;

    let q1 = q(vec![(1, 8), (5, 7)]);
    let q2 = q(vec![(5, 8), (12, 14)]);
    let mut stats = VisitStats::default();
    let first = index.level(0).first_node();
    let level1: Vec<Coord> = index
        .level_candidates(0, first, 1, 8, &mut stats)
        .into_iter()
        .map(|id| index.level(0).key(id)[0])
        .collect();
    let targets: Vec<Vec<Coord>> = index
        .cross_links(0)
        .into_iter()
        .filter_map(|(_, t)| t)
        .collect();
    let elapsed = start.elapsed();

    let pass = q1 == vec![Point::from(vec![2, 6]), Point::from(vec![6, 6])]
        && q2.is_empty()
        && level1 == vec![2, 6, 8]
        && targets == vec![vec![2, 2], vec![6, 2], vec![8, 10]]
        && elapsed.as_secs_f64() < 1.0;
    let show = |v: &[Point]| {
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    Verdict {
        name: "worked example",
        pass,
        detail: format!(
            "Q1 -> {{{}}}, Q2 -> {{{}}}, level-1 candidates {level1:?}, cross links {targets:?}, {elapsed:?}",
            show(&q1),
            show(&q2)
        ),
    }
}

fn oracle_equivalence(acct: &mut Accounting) -> Verdict {
    let start = Instant::now();
    let mut instances = 0;
    let mut bits_bad = 0;
    let mut kd_bad = 0;
    let mut queries = 0;
    for k in 1..=4 {
        let bound: u64 = [1 << 16, 1 << 10, 64, 32][k - 1];
        for n in [100, 1_000, 10_000] {
            for dist in [Distribution::Uniform, Distribution::Clustered] {
                let seed = (k * 1_000_003 + n) as u64;
                let pts = points_of(&DatasetSpec {
                    n,
                    k,
                    dist,
                    seed,
                    bound,
                });
                let index = build(k, bound, &pts);
                let set = PointSet::new(pts);
                let kd = NaiveKdTree::build(k, &set);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
                let mut windows = random_windows(&mut rng, k, bound, 400);
                for s in [0.0001, 0.001, 0.01, 0.1] {
                    windows.extend(generate_windows(&mut rng, k, bound, 150, s));
                }
                for w in &windows {
                    let expected = brute_force_query(&set, w);
                    let (got, stats) = index.window_query(w).unwrap();
                    acct.check(&stats);
                    bits_bad += usize::from(got != expected);
                    kd_bad += usize::from(kd.query(w).0 != expected);
                    queries += 1;
                }
                instances += 1;
            }
        }
    }
    Verdict {
        name: "oracle equivalence",
        pass: bits_bad == 0 && kd_bad == 0,
        detail: format!(
            "{instances} instances, {queries} windows, {bits_bad} index mismatches, {kd_bad} kd-tree mismatches, {:?}",
            start.elapsed()
        ),
    }
}

fn structural_invariants() -> Verdict {
    let mut steps = 0;
    let mut violations = 0;
    let mut first_bad = String::new();
    for (k, radix, width, side, seed) in [(3, 2, 3, 8, 11u64), (2, 4, 2, 16, 12)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut index = BitsKdTree::new(IndexConfig::new(k, radix, width).unwrap());
        let mut oracle = BTreeSet::new();
        for _ in 0..10_000 {
            let p: Vec<Coord> = (0..k).map(|_| rng.random_range(0..side)).collect();
            let ok = if rng.random_bool(0.55) {
                index.insert(&p).unwrap() == oracle.insert(p)
            } else {
                index.delete(&p).unwrap() == oracle.remove(&p)
            };
            let v = index.validate_index();
            if !ok || !v.is_empty() || index.len() != oracle.len() {
                violations += v.len().max(1);
                if first_bad.is_empty() {
                    first_bad = format!(" first: step {steps} {v:?}");
                }
            }
            steps += 1;
        }
    }
    Verdict {
        name: "structural invariants",
        pass: violations == 0,
        detail: format!("{steps} operations validated, {violations} violations{first_bad}"),
    }
}

fn trie_oracle() -> Verdict {
    let mut mismatches = 0u64;
    let mut detail = Vec::new();
    for (radix, width) in [(10, 2), (16, 4), (2, 12)] {
        let config = TrieConfig::new(radix, width).unwrap();
        let u = config.universe();
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from(radix * 100 + width));
        let mut local = 0u64;
        for _ in 0..1_000 {
            let mut trie = ThreadedTrie::new(config);
            let mut keys = BTreeSet::new();
            let size = rng.random_range(0..=(u as usize).min(300));
            // Keys cluster sometimes, so shared prefixes and dense nodes occur.
            let span = if rng.random_bool(0.5) {
                u
            } else {
                (u / 16).max(size as u64 + 1).min(u)
            };
            let base = rng.random_range(0..=u - span);
            for _ in 0..size {
                let key = (base + rng.random_range(0..span)) as Coord;
                if keys.insert(key) {
                    trie.insert(key, key).unwrap();
                }
            }
            let drop: Vec<Coord> = keys
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.3))
                .collect();
            for key in drop {
                keys.remove(&key);
                trie.delete(key).unwrap();
            }
            for _ in 0..100 {
                let probe = if !keys.is_empty() && rng.random_bool(0.3) {
                    let key = *keys.iter().nth(rng.random_range(0..keys.len())).unwrap();
                    key.saturating_add(rng.random_range(0..2))
                        .min((u - 1) as Coord)
                } else {
                    rng.random_range(0..u) as Coord
                };
                let got = trie.succ_geq(probe).map(|d| (d.key(), d.target()));
                let want = keys.range(probe..).next().map(|&k| (k, k));
                if got != want {
                    mismatches += 1;
                }
                local += 1;
            }
        }
        detail.push(format!("({radix},{width}): {local} pairs"));
    }
    Verdict {
        name: "trie oracle",
        pass: mismatches == 0,
        detail: format!("{}; {mismatches} mismatches", detail.join(", ")),
    }
}

fn visit_accounting(acct: &mut Accounting) -> Verdict {
    let mut bench_queries = 0;
    let mut bench_failures = 0;
    for (k, dist) in [
        (2, Distribution::Uniform),
        (2, Distribution::Clustered),
        (3, Distribution::Uniform),
        (4, Distribution::Clustered),
    ] {
        let params = BenchParams {
            k,
            sizes: vec![1_000, 10_000, 100_000],
            dist,
            seed: 17,
            bound: 1 << 16,
            radix: 16,
            width: None,
            queries: 200,
            selectivity: 0.001,
            delete_fraction: 0.0,
        };
        let outcome = commands::bench(Dataset::Generated(&params)).unwrap();
        for row in outcome
            .report
            .rows
            .iter()
            .filter(|r| r.engine == Engine::Bits && r.phase == Phase::Query)
        {
            bench_queries += 1;
            let inner: u64 = row.level_candidates[..k - 1].iter().sum();
            if !(row.trie_lookups <= 1 + inner && row.cross_links == inner) {
                bench_failures += 1;
            }
        }
    }
    let failures = bench_failures + acct.failures;
    Verdict {
        name: "visit accounting",
        pass: failures == 0,
        detail: format!(
            "{bench_queries} benchmark queries and {} other queries checked, {failures} violations",
            acct.queries
        ),
    }
}

/// Points of `[0, bound)^k` not in `taken`.
fn fresh_points(
    rng: &mut ChaCha8Rng,
    k: usize,
    bound: u64,
    taken: &BTreeSet<Vec<Coord>>,
    count: usize,
) -> Vec<Vec<Coord>> {
    let mut out = BTreeSet::new();
    while out.len() < count {
        let p: Vec<Coord> = (0..k)
            .map(|_| rng.random_range(0..bound) as Coord)
            .collect();
        if !taken.contains(&p) {
            out.insert(p);
        }
    }
    let mut out: Vec<_> = out.into_iter().collect();
    out.shuffle(rng);
    out
}

/// Mean touches of inserting a fresh point into an index of `n` points;
/// each probe is removed again so the size stays `n`.
fn insert_touches(n: usize, bound: u64, probes: usize) -> f64 {
    let pts = points_of(&DatasetSpec {
        n,
        k: 2,
        dist: Distribution::Uniform,
        seed: 31 + n as u64,
        bound,
    });
    let mut index = build(2, bound, &pts);
    let taken: BTreeSet<_> = pts.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut total = 0;
    for p in fresh_points(&mut rng, 2, bound, &taken, probes) {
        let mut meter = Meter::default();
        assert!(index.insert_metered(&p, &mut meter).unwrap());
        total += meter.touches();
        index.delete(&p).unwrap();
    }
    total as f64 / probes as f64
}

/// Mean touches of deleting a stored point from an index of `n` points;
/// each victim is put back so the size stays `n`.
fn delete_touches(n: usize, bound: u64, probes: usize) -> f64 {
    let pts = points_of(&DatasetSpec {
        n,
        k: 2,
        dist: Distribution::Uniform,
        seed: 37 + n as u64,
        bound,
    });
    let mut index = build(2, bound, &pts);
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64 + 1);
    let mut total = 0;
    for _ in 0..probes {
        let p = &pts[rng.random_range(0..pts.len())];
        let mut meter = Meter::default();
        assert!(index.delete_metered(p, &mut meter).unwrap());
        total += meter.touches();
        index.insert(p).unwrap();
    }
    total as f64 / probes as f64
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Square windows around random stored points, each grown until it holds at
/// least `t` points. Returns mean tree visits, mean result count and mean
/// candidate sum.
fn fixed_result_queries(
    index: &BitsKdTree,
    pts: &[Vec<Coord>],
    bound: u64,
    t: usize,
    count: usize,
    seed: u64,
    acct: &mut Accounting,
) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (bound - 1) as Coord;
    let window = |c: &[Coord], h: Coord| {
        QueryWindow::new(
            c.iter()
                .map(|&x| (x.saturating_sub(h), x.saturating_add(h).min(top)))
                .collect(),
        )
        .unwrap()
    };
    let (mut visits, mut results, mut candidates) = (0u64, 0u64, 0u64);
    for _ in 0..count {
        let c = &pts[rng.random_range(0..pts.len())];
        let (mut lo, mut hi) = (0, top);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if index.window_query(&window(c, mid)).unwrap().0.len() >= t {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (found, stats) = index.window_query(&window(c, lo)).unwrap();
        acct.check(&stats);
        visits += stats.tree_nodes_visited;
        results += found.len() as u64;
        candidates += stats.per_level_candidates.iter().sum::<u64>();
    }
    let m = count as f64;
    (visits as f64 / m, results as f64 / m, candidates as f64 / m)
}

fn scaling(acct: &mut Accounting) -> (Verdict, Verdict, Verdict, Vec<String>) {
    let mut findings = Vec::new();

    // Insertion at fixed k = 2 over a 2^16 universe.
    let small = insert_touches(1_000, 1 << 16, 2_000);
    let large = insert_touches(1_000_000, 1 << 16, 2_000);
    let ratio = small.max(large) / small.min(large);
    let a = Verdict {
        name: "scaling (a) insertion",
        pass: ratio < 1.5,
        detail: format!(
            "mean touches per insert {small:.2} at n=10^3, {large:.2} at n=10^6, ratio {ratio:.3} (limit 1.5)"
        ),
    };

    // Deletion over n = 10^3 .. 10^6.
    let sizes = [1_000usize, 10_000, 100_000, 1_000_000];
    let means: Vec<f64> = sizes
        .iter()
        .map(|&n| delete_touches(n, 1 << 16, 2_000))
        .collect();
    let logs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let exponent = log_log_slope(&logs, &means);
    let b = Verdict {
        name: "scaling (b) deletion",
        pass: (0.5..=2.0).contains(&exponent),
        detail: format!(
            "mean touches per delete {} for n={sizes:?}; fitted exponent vs log n {exponent:.3} (range [0.5, 2.0])",
            means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(", ")
        ),
    };

    // Queries with a fixed result count on a dense 1024 x 1024 universe.
    let t = 100;
    let bound = 1024;
    let run = |n: usize, seed: u64, acct: &mut Accounting, bound: u64| {
        let pts = points_of(&DatasetSpec {
            n,
            k: 2,
            dist: Distribution::Uniform,
            seed,
            bound,
        });
        let index = build(2, bound, &pts);
        fixed_result_queries(&index, &pts, bound, t, 200, seed, acct)
    };
    let (v1, r1, c1) = run(100_000, 41, acct, bound);
    let (v2, r2, c2) = run(1_000_000, 43, acct, bound);
    let ratio = v1.max(v2) / v1.min(v2);
    let c = Verdict {
        name: "scaling (c) query",
        pass: ratio < 2.0,
        detail: format!(
            "t~{t}, universe 1024^2: n=10^5 visits {v1:.1} (t {r1:.1}, sum t_j {c1:.1}); n=10^6 visits {v2:.1} (t {r2:.1}, sum t_j {c2:.1}); ratio {ratio:.3} (limit 2)"
        ),
    };

    // Sparse universe: most prefixes hold a single point, so sum t_j >> t.
    let (s1, sr1, sc1) = run(10_000, 47, acct, 1 << 16);
    let (s2, sr2, sc2) = run(100_000, 53, acct, 1 << 16);
    let sratio = s1.max(s2) / s1.min(s2);
    findings.push(format!(
        "scaling (c) sparse 65536^2 universe: n=10^4 visits {s1:.1} (t {sr1:.1}, sum t_j {sc1:.1}); n=10^5 visits {s2:.1} (t {sr2:.1}, sum t_j {sc2:.1}); ratio {sratio:.3}{}",
        if sratio < 2.0 { "" } else { " -- exceeds 2x because sum t_j grows with n while t is fixed" }
    ));
    (a, b, c, findings)
}

struct Comparison {
    share: f64,
    bits_mean: f64,
    descent_mean: f64,
    kd_mean: f64,
    disagreements: usize,
}

/// Node visits of the index against the kd-tree on uniform data over
/// `[0, bound)^2`.
fn compare_with_kd(bound: u64, selectivity: f64, acct: &mut Accounting) -> Comparison {
    let pts = points_of(&DatasetSpec {
        n: 100_000,
        k: 2,
        dist: Distribution::Uniform,
        seed: 59,
        bound,
    });
    let index = build(2, bound, &pts);
    let set = PointSet::new(pts);
    let kd = NaiveKdTree::build(2, &set);
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let windows = generate_windows(&mut rng, 2, bound, 1_000, selectivity);
    let mut fewer = 0;
    let mut disagreements = 0;
    let (mut bits, mut descents, mut kd_total) = (0u64, 0u64, 0u64);
    for w in &windows {
        let (got, stats) = index.window_query(w).unwrap();
        acct.check(&stats);
        let (kd_got, kd_visits) = kd.query(w);
        disagreements += usize::from(got != kd_got);
        bits += stats.tree_nodes_visited;
        descents += stats.descent_steps;
        kd_total += kd_visits;
        fewer += usize::from(stats.tree_nodes_visited < kd_visits);
    }
    let m = windows.len() as f64;
    Comparison {
        share: fewer as f64 / m,
        bits_mean: bits as f64 / m,
        descent_mean: descents as f64 / m,
        kd_mean: kd_total as f64 / m,
        disagreements,
    }
}

fn baseline_sanity(acct: &mut Accounting) -> (Verdict, Vec<String>) {
    // Kd-tree agreement on the fuzz instances is part of oracle equivalence;
    // this is the directional visit comparison.
    let describe = |bound: u64, sel: f64, c: &Comparison| {
        format!(
            "n=10^5 uniform on {bound}^2, selectivity {sel}: index visits fewer nodes on {:.1}% of 1000 windows (mean {:.1} plus {:.1} descents vs {:.1}), {} disagreements",
            100.0 * c.share,
            c.bits_mean,
            c.descent_mean,
            c.kd_mean,
            c.disagreements
        )
    };
    let main = compare_with_kd(1024, 0.001, acct);
    let verdict = Verdict {
        name: "baseline sanity",
        pass: main.share >= 0.9 && main.disagreements == 0,
        detail: describe(1024, 0.001, &main),
    };
    let mut notes = Vec::new();
    for (bound, sel) in [
        (512, 0.001),
        (1024, 0.0001),
        (4096, 0.001),
        (1 << 16, 0.001),
    ] {
        let c = compare_with_kd(bound, sel, acct);
        notes.push(format!("baseline sweep: {}", describe(bound, sel, &c)));
    }
    (verdict, notes)
}

fn main() -> ExitCode {
    let mut acct = Accounting::default();
    let mut verdicts = vec![
        worked_example(),
        oracle_equivalence(&mut acct),
        structural_invariants(),
        trie_oracle(),
    ];
    let (a, b, c, mut findings) = scaling(&mut acct);
    let (baseline, sweep) = baseline_sanity(&mut acct);
    findings.extend(sweep);
    verdicts.push(visit_accounting(&mut acct));
    verdicts.extend([a, b, c, baseline]);

    for v in &verdicts {
        println!(
            "{} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    for f in &findings {
        println!("NOTE {f}");
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        verdicts.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
