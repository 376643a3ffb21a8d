//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero when any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mimo_sched::baselines::exhaustive_search;
use mimo_sched::channel::{ChannelModel, NORMALIZED_NOISE};
use mimo_sched::eval::stats::{bootstrap_not_better, Direction};
use mimo_sched::eval::{achievable_rate, MetricAccumulator, Modulation, ModulationKind, TrialRecord};
use mimo_sched::experiment::{run_experiment, ExperimentConfig};
use mimo_sched::model::is_feasible;
use mimo_sched::objectives::{self, ObjectiveKind, ObjectiveSpec};
use mimo_sched::projection::{project_intersection, project_simplex, DrsConfig, SimplexSpec};
use mimo_sched::solver::{quantize, schedule, FbsConfig};
use mimo_sched::{CMatrix, ChannelSet, ConstraintBox, Objective, SchedulingMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name, time limit and check of one criterion.
type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_cmatrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
}

/// Central difference with one Richardson extrapolation step.
fn derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn gradient_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    let mut worst = [0.0f64; 4];
    for _ in 0..50 {
        let u = rng.random_range(1..=6);
        let b = rng.random_range(1..=8);
        let t = rng.random_range(1..=3);
        let n0 = rng.random_range(0.2..2.0);
        let hhat = random_cmatrix(&mut rng, b, u);
        let gamma: Vec<f64> = (0..u).map(|_| rng.random_range(0.0..0.5)).collect();
        let channel = ChannelSet::from_estimate(hhat.clone(), hhat, gamma).unwrap();
        let c = DMatrix::from_fn(u, t, |_, _| rng.random_range(0.1..0.9));
        let alpha = rng.random_range(0.1..5.0);
        for (slot, kind) in ObjectiveKind::ALL.into_iter().enumerate() {
            let spec = ObjectiveSpec::new(kind, alpha, n0).unwrap();
            let analytic = mimo_sched::Objective::gradient(&spec, &c, &channel).unwrap();
            for idx in 0..c.len() {
                let f = |x: f64| {
                    let mut cc = c.clone();
                    cc[idx] = x;
                    mimo_sched::Objective::cost(&spec, &cc, &channel).unwrap()
                };
                let fd = derivative(&f, c[idx], 1e-3);
                worst[slot] = worst[slot].max(relative_error(analytic[idx], fd));
            }
        }
        let analytic = objectives::grad_regularizer(&c, alpha);
        for idx in 0..c.len() {
            let f = |x: f64| {
                let mut cc = c.clone();
                cc[idx] = x;
                objectives::regularizer(&cc, alpha)
            };
            worst[3] = worst[3].max(relative_error(analytic[idx], derivative(&f, c[idx], 1e-3)));
        }
    }
    let pass = worst[0] < 1e-5 && worst[1] < 1e-5 && worst[2] < 1e-4 && worst[3] < 1e-5;
    Outcome {
        pass,
        detail: format!(
            "max rel. err mse {:.1e}, capacity {:.1e}, sum-rate {:.1e}, regularizer {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

/// Relative error with an absolute floor for entries whose derivative vanishes.
fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

fn clip_sum(q: &[f64], lambda: f64) -> f64 {
    q.iter().map(|x| (x + lambda).clamp(0.0, 1.0)).sum()
}

/// Grid search over the shift `λ` in steps of 1e-7. The sum of
/// `clip(q + λ)` is nondecreasing in `λ`, so the grid cell containing the
/// target sum is located by halving the index range; within one cell the sum
/// is linear and the crossing is interpolated.
fn grid_lambda(q: &[f64], target: f64) -> f64 {
    const STEP: f64 = 1e-7;
    let lo = -q.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - 1.0;
    let hi = 1.0 - q.iter().fold(f64::INFINITY, |a, &b| a.min(b)) + 1.0;
    let (mut a, mut b) = (0u64, ((hi - lo) / STEP).ceil() as u64);
    let at = |k: u64| lo + k as f64 * STEP;
    while b - a > 1 {
        let m = (a + b) / 2;
        if clip_sum(q, at(m)) < target {
            a = m;
        } else {
            b = m;
        }
    }
    let (sa, sb) = (clip_sum(q, at(a)), clip_sum(q, at(b)));
    if sb == sa {
        return at(b);
    }
    at(a) + (target - sa) / (sb - sa) * STEP
}

fn grid_oracle(q: &[f64], lower: f64, upper: f64) -> Vec<f64> {
    let s0 = clip_sum(q, 0.0);
    let lambda = if s0 < lower {
        grid_lambda(q, lower)
    } else if s0 > upper {
        grid_lambda(q, upper)
    } else {
        0.0
    };
    q.iter().map(|x| (x + lambda).clamp(0.0, 1.0)).collect()
}

fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn simplex_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7369_6d70);
    let (mut worst_feas, mut worst_kkt, mut worst_obj) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..10_000 {
        let m = rng.random_range(1..=16);
        let q: Vec<f64> = (0..m).map(|_| rng.random_range(-1.5..2.5)).collect();
        let (lower, upper) = if case % 2 == 0 {
            let a = rng.random_range(0..=m);
            (a as f64, rng.random_range(a..=m) as f64)
        } else {
            let a = rng.random_range(0.0..m as f64);
            (a, rng.random_range(a..=m as f64))
        };
        let spec = SimplexSpec::new(m, lower, upper).unwrap();
        let (p, cert) = project_simplex(&q, &spec).unwrap();
        let sum: f64 = p.iter().sum();
        let box_violation = p.iter().map(|&x| (-x).max(x - 1.0)).fold(0.0, f64::max);
        worst_feas = worst_feas.max(box_violation).max(lower - sum).max(sum - upper);
        worst_kkt = worst_kkt.max(cert.residual(&q, &p, &spec));
        let oracle = grid_oracle(&q, lower, upper);
        worst_obj = worst_obj.max((distance2(&p, &q) - distance2(&oracle, &q)).abs());
    }
    Outcome {
        pass: worst_feas <= 1e-9 && worst_kkt <= 1e-9 && worst_obj <= 1e-10,
        detail: format!("constraint violation {worst_feas:.1e}, KKT residual {worst_kkt:.1e}, objective gap {worst_obj:.1e}"),
    }
}

/// Projection onto `{x ∈ [0,1]^n : lower ≤ Σx ≤ upper}` by bisection on the shift.
fn bisection_simplex(q: &[f64], lower: f64, upper: f64) -> Vec<f64> {
    let s0 = clip_sum(q, 0.0);
    let target = if s0 < lower {
        lower
    } else if s0 > upper {
        upper
    } else {
        return q.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    };
    let (mut a, mut b) = (-q.iter().fold(f64::NEG_INFINITY, |x, &y| x.max(y)) - 1.0, 2.0 - q.iter().fold(f64::INFINITY, |x, &y| x.min(y)));
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if clip_sum(q, m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    q.iter().map(|x| (x + 0.5 * (a + b)).clamp(0.0, 1.0)).collect()
}

fn project_rows(x: &DMatrix<f64>, bounds: &ConstraintBox) -> DMatrix<f64> {
    let mut out = x.clone();
    for u in 0..x.nrows() {
        let row: Vec<f64> = x.row(u).iter().copied().collect();
        for (t, v) in bisection_simplex(&row, bounds.slot_min as f64, bounds.slot_max as f64).into_iter().enumerate() {
            out[(u, t)] = v;
        }
    }
    out
}

fn project_columns(x: &DMatrix<f64>, bounds: &ConstraintBox) -> DMatrix<f64> {
    let mut out = x.clone();
    for t in 0..x.ncols() {
        let col: Vec<f64> = x.column(t).iter().copied().collect();
        for (u, v) in bisection_simplex(&col, bounds.ue_min as f64, bounds.ue_max as f64).into_iter().enumerate() {
            out[(u, t)] = v;
        }
    }
    out
}

/// Dykstra's alternating projections, which converge to the projection onto
/// the intersection rather than to an arbitrary point in it. The iterate can
/// stall while the corrections still move, so the stop test covers all three.
fn dykstra(z: &DMatrix<f64>, bounds: &ConstraintBox) -> DMatrix<f64> {
    let mut x = z.clone();
    let mut p = DMatrix::zeros(z.nrows(), z.ncols());
    let mut q = DMatrix::zeros(z.nrows(), z.ncols());
    for _ in 0..1_000_000 {
        let y = project_rows(&(&x + &p), bounds);
        let p_next = &x + &p - &y;
        let next = project_columns(&(&y + &q), bounds);
        let q_next = &y + &q - &next;
        let change = (&next - &x).norm() + (&p_next - &p).norm() + (&q_next - &q).norm();
        (x, p, q) = (next, p_next, q_next);
        if change < 1e-12 {
            break;
        }
    }
    x
}

fn random_box(rng: &mut ChaCha8Rng, ues: usize, slots: usize) -> ConstraintBox {
    loop {
        let ue_min = rng.random_range(0..=ues);
        let ue_max = rng.random_range(ue_min..=ues);
        let slot_min = rng.random_range(0..=slots);
        let slot_max = rng.random_range(slot_min..=slots);
        let b = ConstraintBox::new(ue_min, ue_max, slot_min, slot_max).unwrap();
        if b.validate_for(ues, slots).is_ok() {
            return b;
        }
    }
}

fn box_violation(x: &DMatrix<f64>, b: &ConstraintBox) -> f64 {
    let mut worst = x.iter().map(|&v| (-v).max(v - 1.0)).fold(0.0, f64::max);
    for u in 0..x.nrows() {
        let s = x.row(u).sum();
        worst = worst.max(b.slot_min as f64 - s).max(s - b.slot_max as f64);
    }
    for t in 0..x.ncols() {
        let s = x.column(t).sum();
        worst = worst.max(b.ue_min as f64 - s).max(s - b.ue_max as f64);
    }
    worst
}

fn intersection_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6472_7300);
    let cfg = DrsConfig { beta: 1.0, max_iter: 2000, tol: 1e-8 };
    let (mut worst_dist, mut worst_feas) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (u, t) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let bounds = random_box(&mut rng, u, t);
        let z = DMatrix::from_fn(u, t, |_, _| rng.random_range(-1.0..2.0));
        let v = project_intersection(&z, &bounds, &cfg).unwrap().v;
        worst_dist = worst_dist.max((&v - dykstra(&z, &bounds)).norm());
        worst_feas = worst_feas.max(box_violation(&v, &bounds));
    }
    Outcome {
        pass: worst_dist <= 1e-4 && worst_feas <= 1e-6,
        detail: format!("max distance to oracle {worst_dist:.1e}, max infeasibility {worst_feas:.1e}"),
    }
}

fn es_dominance() -> Outcome {
    let preset = ExperimentConfig::preset("s1-desk").unwrap();
    let mut scenario = preset.scenario();
    scenario.antennas = 6;
    scenario.antennas_per_ap = 6;
    scenario.ues = 6;
    scenario.slots = 2;
    let model = ChannelModel::for_kind(preset.channel_model);
    let bounds = ConstraintBox::new(3, 3, 1, 1).unwrap();
    let cfg = FbsConfig { restarts: 20, ..preset.solver };
    let mut pass = true;
    let mut details = Vec::new();
    for kind in ObjectiveKind::ALL {
        let objective = ObjectiveSpec::new(kind, preset.alpha[kind.name()], NORMALIZED_NOISE).unwrap();
        let plain = ObjectiveSpec::new(kind, 0.0, NORMALIZED_NOISE).unwrap();
        let (mut near, mut violations, mut worst) = (0, 0, 0.0f64);
        for r in 0..50u64 {
            let channel = ChannelSet::realize(&model, &scenario, 0x6573_0000 + r).unwrap();
            let es = exhaustive_search(&plain, &channel, &bounds, 2, 1_000_000).unwrap();
            let ours = schedule(&objective, &channel, &bounds, 2, &cfg, r).unwrap();
            let cost = plain.cost(ours.binary.entries(), &channel).unwrap();
            if cost < es.cost {
                violations += 1;
            }
            let gap = (cost - es.cost) / es.cost.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(gap);
            if gap <= 0.05 {
                near += 1;
            }
        }
        pass &= violations == 0 && near >= 45;
        details.push(format!("{kind}: {near}/50 within 5%, {violations} below ES, worst gap {:.1}%", 100.0 * worst));
    }
    Outcome { pass, detail: details.join("; ") }
}

fn quantizer_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7175_616e);
    let (mut infeasible, mut changed) = (0, 0);
    for case in 0..1000 {
        let (u, t) = (rng.random_range(1..=8), rng.random_range(1..=4));
        let bounds = random_box(&mut rng, u, t);
        let b = rng.random_range(1..=8);
        let hhat = random_cmatrix(&mut rng, b, u);
        let channel = ChannelSet::perfect(hhat);
        let kind = ObjectiveKind::ALL[case % 3];
        let objective = ObjectiveSpec::new(kind, 1.0, NORMALIZED_NOISE).unwrap();
        let relaxed = SchedulingMatrix::relaxed(DMatrix::from_fn(u, t, |_, _| rng.random::<f64>())).unwrap();
        let out = quantize(&relaxed, &objective, &channel, &bounds).unwrap().binary;
        if !out.is_binary() || !is_feasible(&out, &bounds) {
            infeasible += 1;
        }
        let again = quantize(&out, &objective, &channel, &bounds).unwrap().binary;
        if again.entries() != out.entries() {
            changed += 1;
        }
    }
    Outcome {
        pass: infeasible == 0 && changed == 0,
        detail: format!("{infeasible} infeasible outputs, {changed} binary feasible inputs altered"),
    }
}

/// A single-UE trial in which symbol `sent` is detected as `detected`.
fn record(sent: usize, detected: usize, modulation: &Modulation) -> TrialRecord {
    TrialRecord {
        trial: 0,
        slot: 0,
        ues: vec![0],
        sent: vec![sent],
        detected: vec![detected],
        symbols: vec![modulation.symbol(sent)],
        estimates: vec![modulation.symbol(detected)],
    }
}

fn metric_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_7472);
    let mut pass = true;
    let mut details = Vec::new();
    for kind in [ModulationKind::Qpsk, ModulationKind::Qam16, ModulationKind::Qam64] {
        let modulation = Modulation::new(kind);
        let q = modulation.bits_per_symbol();
        let symbols = 100_000 / q + 1;
        let (mut exact, mut flip) = (MetricAccumulator::new(1, q), MetricAccumulator::new(1, q));
        for _ in 0..symbols {
            let s = rng.random_range(0..modulation.order());
            exact.add(&record(s, s, &modulation), &modulation);
            let guess = rng.random_range(0..modulation.order());
            flip.add(&record(s, guess, &modulation), &modulation);
        }
        let (ber0, hmi0) = (exact.ber(0).unwrap(), exact.hmi(0).unwrap());
        let (ber1, hmi1) = (flip.ber(0).unwrap(), flip.hmi(0).unwrap());
        pass &= ber0 == 0.0 && hmi0 == q as f64 && (ber1 - 0.5).abs() <= 0.02 && hmi1 <= 0.05;
        details.push(format!("{kind}: exact BER {ber0} HMI {hmi0}, coin-flip BER {ber1:.4} HMI {hmi1:.4}"));
    }
    let channel = ChannelSet::perfect(CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
    let rate = achievable_rate(&channel, &SchedulingMatrix::ones(1, 1)).unwrap()[0];
    pass &= (rate - 1.0).abs() <= 1e-12;
    details.push(format!("scalar rate {rate}"));
    Outcome { pass, detail: details.join("; ") }
}

fn qualitative_ordering() -> Outcome {
    let cfg = ExperimentConfig::preset("s1-desk").unwrap();
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let mse = |m: &str| report.samples_by_realization(m, |r| r.mse_db);
    let ber = |m: &str| report.samples_by_realization(m, |r| r.ber);
    let p_mse = bootstrap_not_better(&mse("mse-lmmse"), &mse("random"), Direction::Cdf, 2000, cfg.seed);
    let mut pass = p_mse < 0.05 && !report.has_failures();
    let mut details = vec![format!("mse-lmmse vs random MSE p={p_mse:.3}")];
    for other in cfg.methods.iter().filter(|m| *m != "aua") {
        let p = bootstrap_not_better(&ber(other), &ber("aua"), Direction::Cdf, 2000, cfg.seed);
        pass &= p < 0.05;
        details.push(format!("{other} vs aua BER p={p:.3}"));
    }
    let table: Vec<String> = report
        .summary
        .methods
        .iter()
        .map(|m| format!("{} BER90 {:.4} MSE90 {:.2} dB", m.method, m.ber_cdf90.unwrap_or(f64::NAN), m.mse_db_cdf90.unwrap_or(f64::NAN)))
        .collect();
    details.push(table.join(", "));
    Outcome { pass, detail: details.join("; ") }
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::preset("s1-desk").unwrap();
    cfg.realizations = 3;
    cfg.trials = 500;
    let dir = std::env::temp_dir().join(format!("mimo-sched-determinism-{}", std::process::id()));
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(run.to_string());
        let written = run_experiment(&cfg).and_then(|r| r.write(&out));
        if let Err(e) = written {
            return Outcome { pass: false, detail: e.to_string() };
        }
        outputs.push(std::fs::read(out.join("metrics.csv")).unwrap_or_default());
    }
    let _ = std::fs::remove_dir_all(&dir);
    let pass = !outputs[0].is_empty() && outputs[0] == outputs[1];
    Outcome { pass, detail: format!("{} CSV bytes per run, identical: {}", outputs[0].len(), outputs[0] == outputs[1]) }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1 gradient suite", Duration::from_secs(60), gradient_suite),
        ("2 simplex projection", Duration::from_secs(60), simplex_projection),
        ("3 intersection projection", Duration::MAX, intersection_projection),
        ("4 ES dominance", Duration::from_secs(600), es_dominance),
        ("5 quantizer contract", Duration::MAX, quantizer_contract),
        ("6 metric sanity", Duration::MAX, metric_sanity),
        ("7 qualitative ordering", Duration::from_secs(1800), qualitative_ordering),
        ("8 determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        let limit = if budget == Duration::MAX { "no time limit".to_string() } else { format!("limit {}s", budget.as_secs()) };
        println!(
            "criterion {name}: {} ({}; {:.1}s, {limit})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
