//! One pass/fail line per acceptance criterion. Pass criterion numbers as
//! arguments to run a subset.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lcdo::diffuse::{moment_axes, sphericity, total_energy, DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{frank_density_raw, ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField, VectorField};
use lcdo::init::{perturb_director, smoothed_ball, smoothed_ellipsoid};
use lcdo::io::{csv, Checkpoint, RunConfig};
use lcdo::optimizer::{minimize_director_only, minimize_full, tangential_continuation, Mode, Progress, Schedule, Solver};
use lcdo::oracles::{ball_energy_closed_form, crossover_radius, reference_field, FieldKind};
use lcdo::validate;

const SEED: u64 = 20_240_601;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line { passed, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn ball_state(grid: GridSpec, radius: f64, kind: &FieldKind) -> FieldState {
    let eps = 2.0 * grid.max_spacing();
    let n = reference_field(kind, grid).expect("reference field").field;
    FieldState::new(n, smoothed_ball(grid, radius, [0.0; 3], eps), ScalarField::constant(grid, 1.0)).expect("valid state")
}

fn model(grid: GridSpec, k: ElasticConstants, gamma: f64, lambda: f64) -> Model {
    let eps = 2.0 * grid.max_spacing();
    Model::new(k, SurfaceParams::new(gamma, lambda).expect("anchoring"), DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).expect("widths"))
        .expect("model")
}

fn suite(r: validate::SuiteResult) -> Line {
    line(r.passed, r.detail)
}

fn convexity() -> Line {
    suite(validate::convexity_suite(100_000, SEED))
}

fn kernel_identities() -> Line {
    let parts = [
        validate::frame_indifference_suite(frank_density_raw, 1000, SEED),
        validate::evenness_suite(frank_density_raw, 1000, SEED),
        validate::one_constant_suite(frank_density_raw, 1000, SEED),
    ];
    let detail = parts.iter().map(|r| format!("{}: {}", r.name, r.detail)).collect::<Vec<_>>().join("; ");
    line(parts.iter().all(|r| r.passed), detail)
}

fn coercivity() -> Line {
    suite(validate::coercivity_suite(10_000, SEED))
}

fn calibration() -> Line {
    suite(validate::calibration_suite(64))
}

/// Closed-form totals at 64³, and the observed order of the dominant error,
/// the hedgehog bulk, from a least-squares fit of log error against log h.
fn analytic_droplets() -> Line {
    let radius = 0.8;
    let k = ElasticConstants::one_constant(1.0);
    let s = SurfaceParams::new(1.0, 0.5).expect("anchoring");
    let uniform = FieldKind::Uniform { axis: [0.0, 0.0, 1.0] };
    let hedgehog = FieldKind::Hedgehog { center: [0.0; 3] };
    let exact_u = ball_energy_closed_form(&uniform, radius, &k, &s).expect("closed form");
    let exact_h = ball_energy_closed_form(&hedgehog, radius, &k, &s).expect("closed form");
    let mut ok = true;
    let mut detail = String::new();
    let mut points = Vec::new();
    for n in [48, 64, 96, 128] {
        let grid = GridSpec::cube(n, 2.0).expect("grid");
        let m = model(grid, k, 1.0, 0.5);
        let eu = total_energy(&ball_state(grid, radius, &uniform), &m);
        let eh = total_energy(&ball_state(grid, radius, &hedgehog), &m);
        let errs = [eu.e_bulk.abs(), rel(eu.surface(), exact_u.surface), rel(eh.e_bulk, exact_h.bulk), rel(eh.surface(), exact_h.surface)];
        ok &= errs[0] == 0.0 && (n < 64 || errs[1..].iter().all(|&e| e <= 0.05));
        if n == 64 {
            detail += &format!("64³: uniform bulk {:.1e} surface {:.2}%, hedgehog bulk {:.2}% surface {:.2}%; ", errs[0], 100.0 * errs[1], 100.0 * errs[2], 100.0 * errs[3]);
        }
        points.push((grid.max_spacing().ln(), errs[2].ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let order = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
    ok &= decreasing && order >= 1.0;
    line(ok, format!("{detail}hedgehog bulk order {order:.2} over 48..128"))
}

fn gradients() -> Line {
    suite(validate::gradient_suite(50, SEED))
}

/// Where the h-weighted director average points, and its radial alignment.
fn director_character(state: &FieldState) -> (f64, f64) {
    let (mut mean, mut radial, mut w) = ([0.0; 3], 0.0, 0.0);
    for idx in 0..state.grid().len() {
        let p = state.phi.data[idx];
        let h = p * p * (3.0 - 2.0 * p);
        let n = state.n.data[idx];
        let x = state.grid().center(idx);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().max(1e-12);
        let dot = (n[0] * x[0] + n[1] * x[1] + n[2] * x[2]) / r;
        for c in 0..3 {
            mean[c] += h * n[c] * n[2].signum();
        }
        radial += h * dot.abs();
        w += h;
    }
    let m = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt() / w;
    (m, radial / w)
}

/// Director-only relaxation from uniform and hedgehog starts; the lower final
/// energy is the selected state.
fn crossover() -> Line {
    let (k, gamma, lambda) = (1.0, 1.0, -0.5);
    let r_star = crossover_radius(k, gamma, lambda).expect("crossover");
    let kc = ElasticConstants::one_constant(k);
    let s = SurfaceParams::new(gamma, lambda).expect("anchoring");
    let schedule = Schedule { max_outer_iters: 3000, tol_rel_energy: 1e-8, update_phi: false, update_v: false, ..Schedule::default() };
    let mut ok = (r_star - 3.0).abs() < 1e-12;
    let mut detail = format!("R* = {r_star}; ");
    for (radius, expect_uniform) in [(r_star / 4.0, true), (4.0 * r_star, false)] {
        let t = Instant::now();
        // the droplet fills the box as a ball of radius 0.8 fills [-1,1]³
        let grid = GridSpec::cube(48, 2.0 * radius / 0.8).expect("grid");
        let m = model(grid, kc, gamma, lambda);
        let mut best: Option<(f64, FieldState, &str)> = None;
        for (name, kind) in [("uniform", FieldKind::Uniform { axis: [0.0, 0.0, 1.0] }), ("hedgehog", FieldKind::Hedgehog { center: [0.0; 3] })] {
            let (report, state) = minimize_director_only(ball_state(grid, radius, &kind), &m, &schedule).expect("relaxation");
            let e = report.final_energy().e_total;
            if best.as_ref().is_none_or(|b| e < b.0) {
                best = Some((e, state, name));
            }
        }
        let (e, state, start) = best.expect("two runs");
        let (uniformity, radiality) = director_character(&state);
        let kind = if expect_uniform { FieldKind::Uniform { axis: [0.0, 0.0, 1.0] } } else { FieldKind::Hedgehog { center: [0.0; 3] } };
        let exact = ball_energy_closed_form(&kind, radius, &kc, &s).expect("closed form").total;
        let character = if expect_uniform { uniformity > 0.9 } else { radiality > 0.9 };
        let took = t.elapsed();
        ok &= character && rel(e, exact) <= 0.10 && took <= Duration::from_secs(300);
        detail += &format!(
            "R={radius}: {start} start wins, ⟨n⟩ {uniformity:.3}, ⟨|n·r̂|⟩ {radiality:.3}, E {e:.4} vs {exact:.4} ({:.2}%), {:.0}s; ",
            100.0 * (e / exact - 1.0),
            took.as_secs_f64()
        );
    }
    line(ok, detail.trim_end_matches("; "))
}

fn shape_optimality() -> Line {
    let grid = GridSpec::cube(48, 2.0).expect("grid");
    let axes = [0.8, 0.5, 0.5];
    let volume = 4.0 / 3.0 * PI * axes[0] * axes[1] * axes[2];
    let m = model(grid, ElasticConstants::one_constant(1.0), 1.0, 0.0);
    let schedule = Schedule { max_outer_iters: 4000, tol_rel_energy: 1e-7, update_v: false, ..Schedule::default() };
    let eps0 = schedule.eps_ladder[0] * m.diffuse.eps_phi;
    let state = FieldState::new(
        VectorField::constant(grid, [0.0, 0.0, 1.0]),
        smoothed_ellipsoid(grid, axes, [0.0; 3], eps0),
        ScalarField::constant(grid, 1.0),
    )
    .expect("state");
    let before = moment_axes(&state.phi);
    let (report, state) = minimize_full(state, volume, &m, &schedule).expect("minimization");
    let e = report.final_energy().e_total;
    let sph = sphericity(&state.phi, &m.diffuse);
    let bound = (36.0 * PI).cbrt() * volume.powf(2.0 / 3.0);
    let after = moment_axes(&state.phi);
    let ok = sph >= 0.95 && e >= 0.9 * bound && report.wall_clock <= Duration::from_secs(600);
    line(
        ok,
        format!(
            "sphericity {sph:.4}, E {e:.4} vs isoperimetric {bound:.4}, axes {:.3}/{:.3} -> {:.3}/{:.3}, {} after {} iterations, {:.0}s",
            before[0],
            before[1],
            after[0],
            after[1],
            report.termination.as_str(),
            report.trace.len(),
            report.wall_clock.as_secs_f64()
        ),
    )
}

/// The pullback by `x -> x/η` keeps every cell value and scales the grid and
/// both widths by `η`.
fn rescaling() -> Line {
    let grid = GridSpec::cube(32, 2.0).expect("grid");
    let k = ElasticConstants::new(1.0, 2.0, 3.0, 0.5, 0.0);
    let m = model(grid, k, 1.0, 0.5);
    let start = FieldState::new(
        perturb_director(&VectorField::constant(grid, [0.0, 0.0, 1.0]), 0.5, SEED),
        smoothed_ball(grid, 0.7, [0.0; 3], m.diffuse.eps_phi),
        ScalarField::from_fn(grid, |x| 1.0 - 0.5 * (-10.0 * x[2] * x[2]).exp()),
    )
    .expect("state");
    let schedule = Schedule { max_outer_iters: 50, update_phi: false, ..Schedule::default() };
    let (_, state) = minimize_director_only(start, &m, &schedule).expect("relaxation");
    let e = total_energy(&state, &m).e_total;
    let mut ok = true;
    let mut detail = format!("E {e:.5}; ");
    for eta in [0.5, 0.8, 1.25, 2.0] {
        let g = GridSpec::new(grid.dims, grid.lengths.map(|l| eta * l)).expect("grid");
        let pulled = FieldState::new(
            VectorField { grid: g, data: state.n.data.clone() },
            ScalarField { grid: g, data: state.phi.data.clone() },
            ScalarField { grid: g, data: state.v.data.clone() },
        )
        .expect("state");
        let d = m.diffuse.with_widths(eta * m.diffuse.eps_phi, eta * m.diffuse.eps_v);
        let e_eta = total_energy(&pulled, &Model { diffuse: d, ..m }).e_total;
        let (lo, hi) = (eta.min(eta * eta) * e, eta.max(eta * eta) * e);
        ok &= e_eta >= lo * 0.95 && e_eta <= hi * 1.05;
        detail += &format!("η={eta}: {lo:.4} <= {e_eta:.4} <= {hi:.4}; ");
    }
    line(ok, detail.trim_end_matches("; "))
}

fn tangential_limit() -> Line {
    let grid = GridSpec::cube(48, 2.0).expect("grid");
    let m = model(grid, ElasticConstants::one_constant(1.0), 1.0, 0.0);
    let state = ball_state(grid, 0.6, &FieldKind::Uniform { axis: [0.0, 0.0, 1.0] });
    let schedule = Schedule {
        max_outer_iters: 3000,
        tol_rel_energy: 1e-8,
        update_phi: false,
        update_v: false,
        mode: Mode::TangentialProjection,
        ..Schedule::default()
    };
    let t = Instant::now();
    let volume = state.volume();
    let mut solver = Solver::new(m, schedule.clone(), volume, state.clone()).expect("solver");
    let projected = solver.run().expect("projection run");
    let e_tg = projected.final_energy().e_total;
    let ladder = [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0];
    let (report, _) = tangential_continuation(state, volume, &m, &Schedule { mode: Mode::TangentialContinuation, ..schedule }, &ladder).expect("continuation");
    let last = report.rows.last().expect("ladder rows");
    let gap = (last.energy.e_total - e_tg).abs() / e_tg;
    let took = t.elapsed();
    let ok = report.is_monotone() && gap <= 0.05 && last.residual < 0.05 && took <= Duration::from_secs(900);
    let energies = report.rows.iter().map(|r| format!("{:.4}", r.energy.e_total)).collect::<Vec<_>>().join(", ");
    line(
        ok,
        format!(
            "E(λ) = [{energies}], E_tg {e_tg:.4}, gap {:.2}%, max|n·ν| {:.4}, limit estimate {:.4}, {:.0}s",
            100.0 * gap,
            last.residual,
            report.limit_estimate,
            took.as_secs_f64()
        ),
    )
}

fn traced(config: &RunConfig) -> (String, FieldState, Progress) {
    let mut solver = Solver::new(config.model().expect("model"), config.schedule.clone(), config.volume, config.initial_state().expect("state")).expect("solver");
    let report = solver.run().expect("run");
    let progress = solver.progress();
    (csv::trace(&report.trace), solver.into_state(), progress)
}

/// Repeated runs, also under different thread counts, and a checkpoint
/// round trip through bytes and through a file.
fn determinism() -> Line {
    let mut config = RunConfig::parse(
        "grid.nx = 20\ngrid.ny = 20\ngrid.nz = 20\ndiffuse.eps_phi = 0.2\ndiffuse.eps_v = 0.2\nsurface.lambda = 0.5\n\
         opt.max_outer_iters = 60\nopt.eps_ladder = 2, 1\nopt.rung_iters = 20, 40\ninit.shape = ellipsoid(0.7, 0.5, 0.5)\ninit.director = random\n",
    )
    .expect("config");
    config.volume = 4.0 / 3.0 * PI * 0.7 * 0.5 * 0.5;
    config.seed = SEED;
    let (a, state, progress) = traced(&config);
    let (b, _, _) = traced(&config);
    let pool = |n: usize| rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("pool");
    let (c, _, _) = pool(1).install(|| traced(&config));
    let (d, _, _) = pool(3).install(|| traced(&config));
    let same_trace = a == b && a == c && a == d;
    let m = config.model().expect("model");
    let e = total_energy(&state, &m).e_total;
    let ckpt = Checkpoint { config: config.clone(), progress, state };
    let from_bytes = Checkpoint::from_bytes(&ckpt.to_bytes()).expect("decode");
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("final.ckpt");
    ckpt.save(&path).expect("save");
    let from_file = Checkpoint::load(&path).expect("load");
    let bits = |c: &Checkpoint| total_energy(&c.state, &m).e_total.to_bits();
    let same_energy = bits(&from_bytes) == e.to_bits() && bits(&from_file) == e.to_bits() && from_file == ckpt;
    line(same_trace && same_energy, format!("{} trace rows identical across 4 runs: {same_trace}; checkpoint energy {e:e} bit-identical: {same_energy}", a.lines().count() - 1))
}

type Criterion = (u32, &'static str, fn() -> Line, Option<Duration>);

const CRITERIA: [Criterion; 11] = [
    (1, "surface-density convexity", convexity, Some(Duration::from_secs(10))),
    (2, "energy-kernel identities", kernel_identities, Some(Duration::from_secs(10))),
    (3, "coercivity", coercivity, Some(Duration::from_secs(10))),
    (4, "diffuse-geometry calibration", calibration, Some(Duration::from_secs(60))),
    (5, "analytic droplet energies", analytic_droplets, None),
    (6, "gradient correctness", gradients, Some(Duration::from_secs(120))),
    (7, "director-only crossover", crossover, None),
    (8, "shape optimality", shape_optimality, None),
    (9, "rescaling sandwich", rescaling, Some(Duration::from_secs(120))),
    (10, "tangential limit", tangential_limit, None),
    (11, "determinism and persistence", determinism, None),
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run, budget) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let mut result = run();
        let took = t.elapsed();
        if let Some(b) = budget {
            if took > b {
                result.passed = false;
                result.detail += &format!("; over the {}s budget", b.as_secs());
            }
        }
        failed += usize::from(!result.passed);
        println!("{} {id:>2} {name} [{:.1}s]: {}", if result.passed { "PASS" } else { "FAIL" }, took.as_secs_f64(), result.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
