//! Property and oracle-certification suites behind `lcdo validate`.
//!
//! Suites that exercise the bulk density take it as a [`Density`] argument so
//! a deliberately broken kernel can be fed through them.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diffuse::{
    anchoring_outer, modica_mortola_constant, perimeter_energy, total_energy, variational_gradients, DiffuseParams,
    InnerAnchoring, Model,
};
use crate::energy::{coercivity_check, frank_density_raw, g_hat, ElasticConstants, SurfaceParams};
use crate::grid::{volume_of, FieldState, GridSpec, ScalarField, VectorField};
use crate::init::{ball_volume, smoothed_ball};
use crate::linalg::{dot, frobenius_sq, matmul, matvec, norm, scale, transpose, Mat3, Vec3, ZERO33};
use crate::oracles::{ball_energy_closed_form, crossover_radius, quadrature_oracle, FieldKind, Region};

/// Bulk density `W(K, n, G)`.
pub type Density = fn(&ElasticConstants, &Vec3, &Mat3) -> f64;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> SuiteResult {
    let t = Instant::now();
    let (passed, detail) = f();
    SuiteResult { name, passed, detail, elapsed: t.elapsed() }
}

fn gaussian_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

fn unit_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = gaussian_vec(rng);
        let l = norm(&v);
        if l > 1e-3 {
            return scale(&v, 1.0 / l);
        }
    }
}

fn gaussian_mat(rng: &mut ChaCha8Rng) -> Mat3 {
    [gaussian_vec(rng), gaussian_vec(rng), gaussian_vec(rng)]
}

/// `(I - n̂n̂ᵀ)A`, so that `Mᵀn = 0`.
fn unit_consistent(n: &Vec3, a: &Mat3) -> Mat3 {
    let u = scale(n, 1.0 / norm(n));
    let mut p = ZERO33;
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = f64::from(u8::from(i == j)) - u[i] * u[j];
        }
    }
    matmul(&p, a)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    crate::linalg::rotation(&unit_vec(rng), rng.gen_range(0.0..2.0 * PI))
}

pub const CONVEX_LAMBDAS: [f64; 5] = [-0.5, -0.25, 0.0, 0.5, 1.0];

/// Largest midpoint-convexity defect `ĝ(v,(p+q)/2) - (ĝ(v,p)+ĝ(v,q))/2`
/// over random triples, scaled by `1 + |rhs|`.
pub fn midpoint_defect(s: &SurfaceParams, triples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..triples {
        let v = gaussian_vec(&mut rng);
        let p = gaussian_vec(&mut rng);
        let q = gaussian_vec(&mut rng);
        let mid = scale(&crate::linalg::add(&p, &q), 0.5);
        let rhs = 0.5 * (g_hat(s, &v, &p) + g_hat(s, &v, &q));
        worst = worst.max((g_hat(s, &v, &mid) - rhs) / (1.0 + rhs.abs()));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessFamily {
    /// `p` near `v`, perturbed orthogonally to `v`; fails for `λ > 1`.
    AlongV,
    /// `p` orthogonal to `v`, perturbed along `v`; fails for `λ < -1/2`.
    AcrossV,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityWitness {
    pub v: Vec3,
    pub p: Vec3,
    pub q: Vec3,
    pub defect: f64,
}

/// Random search for a midpoint-convexity violation of `ĝ(v,·)`.
pub fn convexity_witness(s: &SurfaceParams, family: WitnessFamily, tries: usize, seed: u64) -> Option<ConvexityWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..tries {
        let v = unit_vec(&mut rng);
        let w = unit_consistent(&v, &[unit_vec(&mut rng), [0.0; 3], [0.0; 3]]);
        let mut ortho = [w[0][0], w[1][0], w[2][0]];
        let l = norm(&ortho);
        if l < 1e-6 {
            continue;
        }
        ortho = scale(&ortho, 1.0 / l);
        let (base, dir) = match family {
            WitnessFamily::AlongV => (v, ortho),
            WitnessFamily::AcrossV => (ortho, v),
        };
        let t = rng.gen_range(0.05..0.5);
        let jitter = scale(&gaussian_vec(&mut rng), 0.02);
        let center = crate::linalg::add(&base, &jitter);
        let p = crate::linalg::add(&center, &scale(&dir, t));
        let q = crate::linalg::sub(&center, &scale(&dir, t));
        let mid = scale(&crate::linalg::add(&p, &q), 0.5);
        let defect = g_hat(s, &v, &mid) - 0.5 * (g_hat(s, &v, &p) + g_hat(s, &v, &q));
        if defect > 1e-9 {
            return Some(ConvexityWitness { v, p, q, defect });
        }
    }
    None
}

pub fn convexity_suite(triples: usize, seed: u64) -> SuiteResult {
    timed("surface convexity", || {
        let mut ok = true;
        let mut detail = String::new();
        for (i, &lambda) in CONVEX_LAMBDAS.iter().enumerate() {
            let s = SurfaceParams::new(1.0, lambda).expect("valid anchoring");
            let d = midpoint_defect(&s, triples, seed + i as u64);
            ok &= d <= 1e-12;
            let _ = write!(detail, "λ={lambda}: defect {d:.1e}; ");
        }
        for (lambda, family) in [(1.5, WitnessFamily::AlongV), (-0.8, WitnessFamily::AcrossV)] {
            let s = SurfaceParams::new(1.0, lambda).expect("valid anchoring");
            let w = convexity_witness(&s, family, 10_000, seed);
            ok &= w.is_some();
            match w {
                Some(w) => {
                    let _ = write!(detail, "λ={lambda}: witness {:.2e}; ", w.defect);
                }
                None => {
                    let _ = write!(detail, "λ={lambda}: no witness; ");
                }
            }
        }
        (ok, detail.trim_end_matches("; ").to_string())
    })
}

const KERNEL_SETS: [ElasticConstants; 3] = [
    ElasticConstants { k11: 1.0, k22: 1.0, k33: 1.0, k24: 0.5, q0: 0.0 },
    ElasticConstants { k11: 1.0, k22: 2.0, k33: 3.0, k24: 0.5, q0: 1.0 },
    ElasticConstants { k11: 1.5, k22: 0.8, k33: 2.0, k24: 0.3, q0: -0.5 },
];

/// `W(Rn, RGRᵀ) = W(n, G)` for proper rotations `R`.
pub fn frame_indifference_suite(density: Density, rotations: usize, seed: u64) -> SuiteResult {
    timed("frame indifference", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for i in 0..rotations {
            let k = &KERNEL_SETS[i % KERNEL_SETS.len()];
            let n = unit_vec(&mut rng);
            let g = gaussian_mat(&mut rng);
            let r = random_rotation(&mut rng);
            let w = density(k, &n, &g);
            let wr = density(k, &matvec(&r, &n), &matmul(&matmul(&r, &g), &transpose(&r)));
            worst = worst.max((wr - w).abs() / (1.0 + w.abs()));
        }
        (worst <= 1e-10, format!("{rotations} rotations, worst relative change {worst:.1e}"))
    })
}

/// `W(-n, -G) = W(n, G)` bit for bit.
pub fn evenness_suite(density: Density, samples: usize, seed: u64) -> SuiteResult {
    timed("evenness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        for i in 0..samples {
            let k = &KERNEL_SETS[i % KERNEL_SETS.len()];
            let n = unit_vec(&mut rng);
            let g = gaussian_mat(&mut rng);
            let neg = g.map(|row| row.map(|x| -x));
            if density(k, &scale(&n, -1.0), &neg) != density(k, &n, &g) {
                failures += 1;
            }
        }
        (failures == 0, format!("{samples} samples, {failures} not exactly even"))
    })
}

/// With all four constants equal to `k`, `W = (k/2)|G|²` whenever `Gᵀn = 0`.
pub fn one_constant_suite(density: Density, samples: usize, seed: u64) -> SuiteResult {
    timed("one-constant identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let k = rng.gen_range(0.1..3.0);
            let n = unit_vec(&mut rng);
            let g = unit_consistent(&n, &gaussian_mat(&mut rng));
            let expect = 0.5 * k * frobenius_sq(&g);
            let w = density(&ElasticConstants::one_constant(k), &n, &g);
            worst = worst.max((w - expect).abs() / (1.0 + expect));
        }
        (worst <= 1e-10, format!("{samples} samples, worst relative error {worst:.1e}"))
    })
}

/// Samples `(s, M)` with `|s| ∈ [1/2, 2]` and `Mᵀs = 0`.
pub fn coercivity_samples(count: usize, seed: u64) -> Vec<(Vec3, Mat3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = scale(&unit_vec(&mut rng), rng.gen_range(0.5..2.0));
            let m = unit_consistent(&s, &scale_mat(&gaussian_mat(&mut rng), rng.gen_range(0.0..3.0)));
            (s, m)
        })
        .collect()
}

fn scale_mat(m: &Mat3, f: f64) -> Mat3 {
    m.map(|row| row.map(|x| x * f))
}

pub fn coercivity_suite(samples: usize, seed: u64) -> SuiteResult {
    timed("coercivity", || {
        let mut ok = true;
        let mut detail = String::new();
        for (i, k) in KERNEL_SETS.iter().enumerate() {
            let data = coercivity_samples(samples, seed + i as u64);
            match coercivity_check(k, &data) {
                Ok(fit) => {
                    let escaped = data.iter().filter(|(s, m)| !fit.holds_for(k, s, m)).count();
                    ok &= fit.passed() && escaped == 0;
                    let _ = write!(
                        detail,
                        "K{}: c=({:.3},{:.3},{:.3},{:.3}) escaped {escaped}; ",
                        i + 1,
                        fit.c1,
                        fit.c2,
                        fit.c3,
                        fit.c4
                    );
                }
                Err(e) => {
                    ok = false;
                    let _ = write!(detail, "K{}: {e}; ", i + 1);
                }
            }
        }
        (ok, detail.trim_end_matches("; ").to_string())
    })
}

/// Hedgehog `x/|x|` and its symbolic gradient `(I - nnᵀ)/r`.
pub fn hedgehog_point(x: &Vec3) -> (Vec3, Mat3) {
    let r = norm(x);
    let n = scale(x, 1.0 / r);
    let mut g = ZERO33;
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (f64::from(u8::from(i == j)) - n[i] * n[j]) / r;
        }
    }
    (n, g)
}

fn hedgehog_fd(x: &Vec3, h: f64) -> Mat3 {
    let f = |p: &Vec3| scale(p, 1.0 / norm(p));
    let mut g = ZERO33;
    for k in 0..3 {
        let (mut xp, mut xm) = (*x, *x);
        xp[k] += h;
        xm[k] -= h;
        let (a, b) = (f(&xp), f(&xm));
        for i in 0..3 {
            g[i][k] = (a[i] - b[i]) / (2.0 * h);
        }
    }
    g
}

struct Check {
    what: &'static str,
    got: f64,
    want: f64,
    tol: f64,
}

impl Check {
    fn rel(&self) -> f64 {
        (self.got - self.want).abs() / self.want.abs().max(1e-300)
    }
}

/// Recomputes the closed-form reference values by quadrature or central
/// differences. The failure detail names each mismatching value and the
/// independent computation it was checked against.
pub fn oracle_suite(density: Density) -> SuiteResult {
    timed("oracle certification", || {
        let mut checks = Vec::new();
        let mut errors = Vec::new();
        let mut quad = |f: &dyn Fn(Vec3) -> f64, region: Region, ladder: &[usize]| match quadrature_oracle(f, &region, ladder) {
            Ok(r) => r.value,
            Err(e) => {
                errors.push(e.to_string());
                f64::NAN
            }
        };

        let logistic = |s: f64| 1.0 / (1.0 + s.exp());
        let mm = quad(&|x| 2.0 * (logistic(x[0]) * (1.0 - logistic(x[0]))).powi(2), Region::Interval { a: -40.0, b: 40.0 }, &[400, 800, 1600]);
        checks.push(Check { what: "MM constant vs interval quadrature", got: modica_mortola_constant(), want: mm, tol: 1e-10 });
        checks.push(Check { what: "MM constant vs 1/3", got: modica_mortola_constant(), want: 1.0 / 3.0, tol: 1e-10 });

        let cos2 = quad(&|x| x[2] * x[2], Region::Sphere { radius: 1.0 }, &[64, 128, 256]) / (4.0 * PI);
        checks.push(Check { what: "sphere mean of (e3·ν)²", got: cos2, want: 1.0 / 3.0, tol: 1e-6 });
        let inv_r2 = quad(&|x| 1.0 / dot(&x, &x), Region::Ball { radius: 1.0 }, &[8, 16, 32]);
        checks.push(Check { what: "∫ball 1/r²", got: inv_r2, want: 4.0 * PI, tol: 1e-4 });
        let vol = quad(&|_| 1.0, Region::Ball { radius: 1.0 }, &[16, 32, 64]);
        checks.push(Check { what: "ball volume", got: vol, want: ball_volume(1.0), tol: 1e-4 });

        let one = ElasticConstants::one_constant(1.0);
        let hedgehog = FieldKind::Hedgehog { center: [0.0; 3] };
        let uniform = FieldKind::Uniform { axis: [0.0, 0.0, 1.0] };
        let flat = SurfaceParams::new(1.0, 0.0).expect("valid anchoring");
        let bulk = quad(
            &|x| {
                let (n, g) = hedgehog_point(&x);
                density(&one, &n, &g)
            },
            Region::Ball { radius: 1.0 },
            &[8, 16, 32],
        );
        let closed = ball_energy_closed_form(&hedgehog, 1.0, &one, &flat).expect("closed form");
        checks.push(Check { what: "hedgehog bulk 4πkR (R=1)", got: closed.bulk, want: bulk, tol: 1e-4 });
        checks.push(Check { what: "hedgehog total 4π+4π (R=1)", got: closed.total, want: 8.0 * PI, tol: 1e-12 });

        let s = SurfaceParams::new(2.0, 0.9).expect("valid anchoring");
        let surf = quad(&|x| s.gamma * (1.0 + s.lambda * x[2] * x[2] / 0.25), Region::Sphere { radius: 0.5 }, &[16, 32, 64]);
        let closed = ball_energy_closed_form(&uniform, 0.5, &one, &s).expect("closed form");
        checks.push(Check { what: "uniform surface 4πγR²(1+λ/3)", got: closed.surface, want: surf, tol: 1e-6 });
        checks.push(Check { what: "uniform surface 2π·1.3", got: closed.surface, want: 2.0 * PI * 1.3, tol: 1e-12 });
        let surf = quad(&|_| s.gamma * (1.0 + s.lambda), Region::Sphere { radius: 0.5 }, &[16, 32, 64]);
        let closed = ball_energy_closed_form(&hedgehog, 0.5, &one, &s).expect("closed form");
        checks.push(Check { what: "hedgehog surface 4πγR²(1+λ)", got: closed.surface, want: surf, tol: 1e-6 });

        let homeo = SurfaceParams::new(1.0, -0.5).expect("valid anchoring");
        let r_star = crossover_radius(1.0, 1.0, -0.5).expect("crossover");
        checks.push(Check { what: "crossover radius 3k/(2γ|λ|)", got: r_star, want: 3.0, tol: 1e-12 });
        let eu = ball_energy_closed_form(&uniform, r_star, &one, &homeo).expect("closed form").total;
        let eh = ball_energy_closed_form(&hedgehog, r_star, &one, &homeo).expect("closed form").total;
        checks.push(Check { what: "closed forms equal at the crossover", got: eh, want: eu, tol: 1e-12 });

        let k = ElasticConstants::new(1.0, 1.0, 1.0, 0.5, 0.0);
        let x = scale(&[1.0, 1.0, 1.0], 2.0 / 3f64.sqrt());
        let (n, g) = hedgehog_point(&x);
        checks.push(Check { what: "hedgehog density at r=2", got: density(&k, &n, &g), want: 0.375, tol: 1e-12 });
        checks.push(Check { what: "hedgehog density, FD gradient", got: density(&k, &n, &hedgehog_fd(&x, 1e-5)), want: 0.375, tol: 1e-8 });
        let (q, z) = (2.0f64, 0.3f64);
        let mut g = ZERO33;
        g[0][2] = -q * (q * z).sin();
        g[1][2] = q * (q * z).cos();
        let n = [(q * z).cos(), (q * z).sin(), 0.0];
        checks.push(Check { what: "twist density q=2", got: density(&one, &n, &g), want: 2.0, tol: 1e-12 });

        let mut detail = String::new();
        let mut ok = errors.is_empty();
        for e in &errors {
            let _ = write!(detail, "oracle failure: {e}; ");
        }
        for c in &checks {
            if !(c.rel() <= c.tol) {
                ok = false;
                let _ = write!(detail, "{}: {} vs oracle {} (rel {:.1e} > {:.0e}); ", c.what, c.got, c.want, c.rel(), c.tol);
            }
        }
        if ok {
            detail = format!("{} values certified", checks.len());
        }
        (ok, detail.trim_end_matches("; ").to_string())
    })
}

/// Diffuse volume, perimeter and outer anchoring of a smoothed ball with a
/// uniform director, next to their sharp values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallCalibration {
    pub volume: f64,
    pub perimeter: f64,
    pub anchoring: f64,
    pub exact_volume: f64,
    pub exact_perimeter: f64,
    pub exact_anchoring: f64,
}

impl BallCalibration {
    pub fn errors(&self) -> [f64; 3] {
        [
            (self.volume / self.exact_volume - 1.0).abs(),
            (self.perimeter / self.exact_perimeter - 1.0).abs(),
            (self.anchoring / self.exact_anchoring - 1.0).abs(),
        ]
    }
}

/// Ball of `radius` in the box `[-1,1]³` on `n³` cells with `ε = 2h`.
pub fn ball_calibration(n: usize, radius: f64, lambda: f64) -> BallCalibration {
    let grid = GridSpec::cube(n, 2.0).expect("valid grid");
    let eps = 2.0 * grid.max_spacing();
    let s = SurfaceParams::new(1.0, lambda).expect("valid anchoring");
    let d = DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).expect("valid widths");
    let state = FieldState::new(
        VectorField::constant(grid, [0.0, 0.0, 1.0]),
        smoothed_ball(grid, radius, [0.0; 3], eps),
        ScalarField::constant(grid, 1.0),
    )
    .expect("valid state");
    let area = 4.0 * PI * radius * radius;
    BallCalibration {
        volume: volume_of(&state.phi),
        perimeter: perimeter_energy(&state.phi, &s, &d),
        anchoring: anchoring_outer(&state, &s, &d),
        exact_volume: ball_volume(radius),
        exact_perimeter: s.gamma * area,
        exact_anchoring: s.gamma * s.lambda * area / 3.0,
    }
}

pub const CALIBRATION_TOLERANCES: [f64; 3] = [0.01, 0.03, 0.05];

pub fn calibration_suite(n: usize) -> SuiteResult {
    timed("diffuse calibration", || {
        let c = ball_calibration(n, 0.8, 0.5);
        let e = c.errors();
        let ok = e.iter().zip(CALIBRATION_TOLERANCES).all(|(e, t)| *e <= t);
        (ok, format!("ball R=0.8 at {n}³: volume {:.2}%, perimeter {:.2}%, anchoring {:.2}%", 100.0 * e[0], 100.0 * e[1], 100.0 * e[2]))
    })
}

/// Seeded state with every field away from its bounds, suitable for
/// finite-difference checks.
pub fn random_state(grid: GridSpec, seed: u64) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (0..grid.len()).map(|_| unit_vec(&mut rng)).collect();
    let phi = (0..grid.len()).map(|_| rng.gen_range(0.05..0.95)).collect();
    let v = (0..grid.len()).map(|_| rng.gen_range(0.05..0.95)).collect();
    FieldState { n: VectorField { grid, data: n }, phi: ScalarField { grid, data: phi }, v: ScalarField { grid, data: v } }
}

pub const FD_STEPS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// Worst relative mismatch between the analytic directional derivative and
/// central differences of the total energy over `directions` random
/// directions. Directions cycle through `n` only, `φ` only, `v` only and
/// all three; for each one the best step of [`FD_STEPS`] is kept.
pub fn gradient_check(state: &FieldState, model: &Model, directions: usize, seed: u64) -> f64 {
    let grid = *state.grid();
    let (_, g) = variational_gradients(state, model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for d in 0..directions {
        let kind = d % 4;
        let mut dn = vec![[0.0; 3]; grid.len()];
        let mut dp = vec![0.0; grid.len()];
        let mut dv = vec![0.0; grid.len()];
        for c in 0..grid.len() {
            if kind == 0 || kind == 3 {
                dn[c] = gaussian_vec(&mut rng);
            }
            if kind == 1 || kind == 3 {
                dp[c] = rng.sample(StandardNormal);
            }
            if kind == 2 || kind == 3 {
                dv[c] = rng.sample(StandardNormal);
            }
        }
        let terms: Vec<f64> = (0..grid.len()).map(|c| dot(&g.n[c], &dn[c]) + g.phi[c] * dp[c] + g.v[c] * dv[c]).collect();
        let analytic = crate::grid::pairwise_sum(&terms) * grid.cell_volume();
        let energy = |t: f64| {
            let mut s = state.clone();
            for c in 0..grid.len() {
                for i in 0..3 {
                    s.n.data[c][i] += t * dn[c][i];
                }
                s.phi.data[c] += t * dp[c];
                s.v.data[c] += t * dv[c];
            }
            total_energy(&s, model).e_total
        };
        let best = FD_STEPS
            .iter()
            .map(|&h| {
                let fd = (energy(h) - energy(-h)) / (2.0 * h);
                (fd - analytic).abs() / analytic.abs().max(1e-12)
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

pub fn gradient_suite(directions: usize, seed: u64) -> SuiteResult {
    timed("gradient check", || {
        let grid = GridSpec::new([8, 9, 10], [1.0, 1.1, 1.2]).expect("valid grid");
        let model = Model::new(
            ElasticConstants::new(1.2, 0.8, 1.5, 0.4, 0.7),
            SurfaceParams::new(0.9, 0.6).expect("valid anchoring"),
            DiffuseParams::new(0.3, 0.25, 1e-2, InnerAnchoring::Penalized).expect("valid widths"),
        )
        .expect("valid model");
        let worst = gradient_check(&random_state(grid, seed), &model, directions, seed + 1);
        (worst <= 1e-5, format!("{directions} directions, worst relative error {worst:.1e}"))
    })
}

/// Every suite run by `lcdo validate`.
pub fn run_all(density: Density, seed: u64) -> Vec<SuiteResult> {
    vec![
        oracle_suite(density),
        convexity_suite(100_000, seed),
        frame_indifference_suite(density, 1000, seed),
        evenness_suite(density, 1000, seed),
        one_constant_suite(density, 1000, seed),
        coercivity_suite(10_000, seed),
        calibration_suite(64),
        gradient_suite(12, seed),
    ]
}

pub fn table(results: &[SuiteResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        let _ = writeln!(
            s,
            "{} {:width$}  {:>8.3}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed.as_secs_f64(),
            r.detail
        );
    }
    s
}

/// The density with the saddle-splay sign flipped; `lcdo validate` must
/// reject it.
pub fn flipped_saddle_splay(k: &ElasticConstants, n: &Vec3, g: &Mat3) -> f64 {
    let div = crate::linalg::trace(g);
    frank_density_raw(k, n, g) - k.k24 * (crate::linalg::trace_sq(g) - div * div)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_kernel_passes_the_identity_suites() {
        assert!(frame_indifference_suite(frank_density_raw, 200, 1).passed);
        assert!(evenness_suite(frank_density_raw, 200, 1).passed);
        assert!(one_constant_suite(frank_density_raw, 200, 1).passed);
        let r = oracle_suite(frank_density_raw);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn flipped_saddle_splay_fails_the_one_constant_suite() {
        let r = one_constant_suite(flipped_saddle_splay, 200, 1);
        assert!(!r.passed, "{}", r.detail);
        // the mutant is still frame indifferent and even
        assert!(frame_indifference_suite(flipped_saddle_splay, 200, 1).passed);
        assert!(evenness_suite(flipped_saddle_splay, 200, 1).passed);
    }

    #[test]
    fn convexity_holds_only_in_the_safe_range() {
        let r = convexity_suite(2000, 3);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn coercivity_fit_is_finite() {
        let r = coercivity_suite(2000, 5);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn small_gradient_check_passes() {
        let r = gradient_suite(8, 2);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn unit_consistent_samples_annihilate_the_director() {
        for (s, m) in coercivity_samples(50, 9) {
            assert!(norm(&matvec(&transpose(&m), &s)) < 1e-12 * (1.0 + frobenius_sq(&m).sqrt()) * norm(&s));
        }
    }
}
