//! Acceptance checks on the reference three-server instance. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use netreserve::ew_policy::{default_eta, ExpWeights};
use netreserve::harness::{
    first_sustained_crossing, regret_bound, EvaluatorKind, Experiment, PolicySpec, RunRecord,
    ScenarioKind,
};
use netreserve::model::three_server_instance;
use netreserve::rl_policy::SoftmaxBandit;
use netreserve::transfer::{brute_force_transfer, solve_transfer, DEFAULT_ORACLE_LIMIT};
use netreserve::{Distribution, RequestVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HORIZON: usize = 10_000;
const SEEDS: u64 = 100;
const DELTA: f64 = 0.05;
const THRESHOLD: f64 = 1e-3;
const WINDOW: usize = 100;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {name}: {detail}");
        if !ok {
            self.failed += 1;
        }
    }
}

fn experiment() -> Experiment {
    let (space, bounds, model) = three_server_instance();
    // The request vector is redrawn uniformly every 2000 slots.
    let kind = ScenarioKind::PiecewiseConstant { period: 2000, blocks: vec![] };
    Experiment::new(space, bounds, model, kind, HORIZON).unwrap()
}

fn transfer_exactness(report: &mut Report) {
    let (space, bounds, model) = three_server_instance();
    let grid = bounds.grid().unwrap();
    let (mut pairs, mut mismatches, mut worst) = (0usize, 0usize, 0.0f64);
    let start = Instant::now();
    for a in space.actions() {
        for b in grid.iter() {
            let b = RequestVector(b);
            let fast = solve_transfer(&a, &b, &model);
            let slow = brute_force_transfer(&a, &b, &model, DEFAULT_ORACLE_LIMIT).unwrap();
            let gap = (fast.objective - slow.objective).abs();
            worst = worst.max(gap);
            if gap > 1e-9 || fast.plan.flattened() != slow.plan.flattened() {
                mismatches += 1;
            }
            pairs += 1;
        }
    }
    report.check(
        1,
        "transfer solver matches brute force",
        pairs == 125 * 125 && mismatches == 0,
        format!(
            "{pairs} pairs, {mismatches} mismatches, max objective gap {worst:e}, {:.2?}",
            start.elapsed()
        ),
    );
}

struct SeedResult {
    ew: RunRecord,
    ew_clock: f64,
    rl: RunRecord,
    explore: Vec<(usize, RunRecord, f64)>,
}

fn timed(exp: &Experiment, spec: &PolicySpec, seed: u64) -> (RunRecord, f64) {
    let start = Instant::now();
    let run = exp.run(spec, seed, EvaluatorKind::Solve).unwrap();
    (run, start.elapsed().as_secs_f64())
}

fn seeded_runs(exp: &Experiment) -> Vec<SeedResult> {
    let eta = default_eta(exp.space_size(), HORIZON);
    let rl = PolicySpec::RlBandit { beta: 0.1, tau: 0.005, q_init: 0.0 };
    // Sequential on purpose: wall-clock comparisons need an unloaded machine.
    (0..SEEDS)
        .map(|seed| {
            let (ew, ew_clock) = timed(exp, &PolicySpec::EwFull { eta }, seed);
            let explore = [5, 10, 20]
                .into_iter()
                .map(|budget| {
                    let spec = PolicySpec::EwExplore { eta, budget, placeholder_redraw: false };
                    let (run, clock) = timed(exp, &spec, seed);
                    (budget, run, clock)
                })
                .collect();
            let rl = exp.run(&rl, seed, EvaluatorKind::Table).unwrap();
            SeedResult { ew, ew_clock, rl, explore }
        })
        .collect()
}

fn regret_criteria(report: &mut Report, exp: &Experiment, runs: &[SeedResult]) {
    let bound = regret_bound(HORIZON, exp.theta(), exp.space_size(), DELTA).unwrap();
    println!(
        "theta = {}, |A| = {}, eta = {}, regret bound = {bound}",
        exp.theta(),
        exp.space_size(),
        default_eta(exp.space_size(), HORIZON)
    );

    let within = runs.iter().filter(|r| r.ew.final_regret() <= bound).count();
    let worst = runs.iter().map(|r| r.ew.final_regret()).fold(f64::MIN, f64::max);
    report.check(
        2,
        "ew_full regret within the high-probability bound",
        within >= 95,
        format!("{within}/{SEEDS} runs within {bound:.1}, largest R_T {worst:.1}"),
    );

    let sublinear = runs
        .iter()
        .filter(|r| {
            let early = r.ew.regret_at(1000).unwrap() / 1000.0;
            r.ew.final_regret() / (HORIZON as f64) < early
        })
        .count();
    report.check(
        3,
        "average regret falls between T=1000 and T=10000",
        sublinear == runs.len(),
        format!("{sublinear}/{SEEDS} runs"),
    );

    let crossing = |r: &RunRecord| first_sustained_crossing(&r.p_dists(), THRESHOLD, WINDOW);
    let mut ordered = 0;
    let mut ew_steps = Vec::new();
    for r in runs {
        let ew = crossing(&r.ew);
        let rl = crossing(&r.rl);
        if let Some(e) = ew {
            ew_steps.push(e);
            // A bandit that never settles counts as slower.
            if e < 500 && rl.is_none_or(|c| c > e) {
                ordered += 1;
            }
        }
    }
    ew_steps.sort_unstable();
    let median = ew_steps.get(ew_steps.len() / 2).copied();
    report.check(
        4,
        "ew_full settles before 500 steps and before rl_bandit",
        ordered >= 90,
        format!("{ordered}/{SEEDS} seeds, median ew crossing {median:?}"),
    );

    let wins = runs
        .iter()
        .filter(|r| k(r, 20).1.final_regret() <= k(r, 5).1.final_regret())
        .count();
    let faster = runs
        .iter()
        .filter(|r| r.explore.iter().all(|(_, _, clock)| *clock < r.ew_clock))
        .count();
    let mean_clock = |f: &dyn Fn(&SeedResult) -> f64| runs.iter().map(f).sum::<f64>() / runs.len() as f64;
    report.check(
        5,
        "larger exploration budget helps and exploration is cheaper",
        wins >= 70 && faster == runs.len(),
        format!(
            "K=20 <= K=5 on {wins}/{SEEDS} seeds; explore faster on {faster}/{SEEDS} seeds \
             (mean s: full {:.3}, K5 {:.3}, K10 {:.3}, K20 {:.3})",
            mean_clock(&|r| r.ew_clock),
            mean_clock(&|r| k(r, 5).2),
            mean_clock(&|r| k(r, 10).2),
            mean_clock(&|r| k(r, 20).2),
        ),
    );
}

fn k(r: &SeedResult, budget: usize) -> &(usize, RunRecord, f64) {
    r.explore.iter().find(|(b, _, _)| *b == budget).unwrap()
}

fn numerical_invariants(report: &mut Report, runs: &[SeedResult]) {
    let mass = runs
        .iter()
        .flat_map(|r| {
            std::iter::once(&r.ew)
                .chain(std::iter::once(&r.rl))
                .chain(r.explore.iter().map(|(_, run, _)| run))
        })
        .map(|r| r.max_mass_error)
        .fold(0.0f64, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut recursion = 0.0f64;
    for discount in [1.0, 0.5] {
        for _ in 0..50 {
            let n = 6;
            let eta = rng.gen_range(0.01..1.0);
            let mut w = ExpWeights::new(n, eta, discount).unwrap();
            let history: Vec<Vec<f64>> = (0..100)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..112.5)).collect())
                .collect();
            for c in &history {
                w.update(c).unwrap();
            }
            let t = history.len() + 1;
            for a in 0..n {
                let direct: f64 = history
                    .iter()
                    .enumerate()
                    .map(|(i, c)| discount.powi((t - (i + 1)) as i32) * c[a])
                    .sum();
                recursion = recursion.max((w.log_weights()[a] + eta * direct).abs());
            }
        }
    }
    report.check(
        6,
        "normalization and weight recursion",
        mass <= 1e-9 && recursion <= 1e-9,
        format!("max |sum p - 1| {mass:e}, max recursion gap {recursion:e}"),
    );
}

fn closed_forms(report: &mut Report) {
    let mut w = ExpWeights::new(2, 1.0, 1.0).unwrap();
    w.update(&[0.0, 1.0]).unwrap();
    let p = w.distribution();
    let e = (-1.0f64).exp();
    let hedge = [1.0 / (1.0 + e), e / (1.0 + e)];

    let mut bandit = SoftmaxBandit::new(2, 1.0, 0.005, 0.0).unwrap();
    bandit.update(1, -0.01).unwrap();
    let q = bandit.distribution();
    let softmax = 1.0 / (1.0 + (-2.0f64).exp());

    let direct = Distribution::from_log_weights(&[0.0, -1.0]);
    let gaps = [
        (p.probs()[0] - 0.7311).abs(),
        (p.probs()[1] - 0.2689).abs(),
        (p.probs()[0] - hedge[0]).abs(),
        (p.probs()[1] - hedge[1]).abs(),
        (direct.probs()[0] - 0.7311).abs(),
        (q.probs()[0] - softmax).abs(),
        (q.probs()[0] - 0.8808).abs(),
    ];
    let worst = gaps.iter().copied().fold(0.0f64, f64::max);
    report.check(
        7,
        "two-action closed forms",
        worst <= 1e-4,
        format!(
            "hedge ({:.6}, {:.6}), softmax P(a0) {:.6}, max gap {worst:e}",
            p.probs()[0],
            p.probs()[1],
            q.probs()[0]
        ),
    );
}

fn csv_bodies(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn reproducibility(report: &mut Report) {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml");
    let scratch = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = scratch.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_netreserve"))
            .arg("run")
            .arg(&config)
            .args(["--seed", "3", "--outdir"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        csv_bodies(&out)
    };
    let first = run("first");
    let second = run("second");
    let same = first.len() == 5 && first == second;
    report.check(
        8,
        "repeated executions write identical CSVs",
        same,
        format!("{} files compared", first.len()),
    );
}

fn main() {
    let mut report = Report { failed: 0 };
    transfer_exactness(&mut report);
    closed_forms(&mut report);
    reproducibility(&mut report);

    let exp = experiment();
    exp.cost_table().unwrap();
    let start = Instant::now();
    let runs = seeded_runs(&exp);
    println!("{} seeds simulated in {:.1?}", runs.len(), start.elapsed());
    regret_criteria(&mut report, &exp, &runs);
    numerical_invariants(&mut report, &runs);

    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
