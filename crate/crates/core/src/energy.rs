//! Pointwise energy densities: Frank–Oseen bulk density with chirality,
//! Rapini–Papoular anchoring and its one-homogeneous extension.

use std::fmt;

use crate::linalg::{cross, curl_of, dot, frobenius_sq, matvec, norm, trace, trace_sq, transpose, Mat3, Vec3, ZERO33};
use crate::{Error, Result};

const UNIT_TOL_CONSTRUCTION: f64 = 1e-12;
const UNIT_TOL_BOUNDARY: f64 = 1e-9;

/// Frank elastic constants and natural twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    pub k11: f64,
    pub k22: f64,
    pub k33: f64,
    pub k24: f64,
    pub q0: f64,
}

impl ElasticConstants {
    pub fn new(k11: f64, k22: f64, k33: f64, k24: f64, q0: f64) -> Self {
        Self { k11, k22, k33, k24, q0 }
    }

    /// All four constants equal to `k`, no natural twist.
    pub fn one_constant(k: f64) -> Self {
        Self::new(k, k, k, k, 0.0)
    }

    pub fn with_q0(mut self, q0: f64) -> Self {
        self.q0 = q0;
        self
    }

    pub fn is_one_constant(&self) -> bool {
        self.k11 == self.k22 && self.k22 == self.k33 && self.k33 == self.k24 && self.k11 > 0.0
    }

    /// Accepts constants satisfying Ericksen's strict inequalities, plus the
    /// one-constant limit `k11 = k22 = k33 = k24 > 0`, whose density reduces to
    /// `(k/2)|∇n|²` and is nonnegative although two inequalities hold only as
    /// equalities.
    pub fn check_admissible(&self) -> Result<()> {
        match validate_ericksen(self)? {
            Ericksen::Satisfied => Ok(()),
            Ericksen::Violated(_) if self.is_one_constant() => Ok(()),
            Ericksen::Violated(v) => Err(Error::Ericksen(v)),
        }
    }
}

/// A single failed strict inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EricksenViolation {
    SplayMinusSaddleSplay,
    TwistMinusSaddleSplay,
    Bend,
    SaddleSplay,
}

impl fmt::Display for EricksenViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SplayMinusSaddleSplay => "k11-k24>0",
            Self::TwistMinusSaddleSplay => "k22-k24>0",
            Self::Bend => "k33>0",
            Self::SaddleSplay => "k24>0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ericksen {
    Satisfied,
    Violated(Vec<EricksenViolation>),
}

impl Ericksen {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Ericksen::Satisfied)
    }
}

pub fn validate_ericksen(k: &ElasticConstants) -> Result<Ericksen> {
    let all = [k.k11, k.k22, k.k33, k.k24, k.q0];
    if all.iter().any(|x| !x.is_finite()) {
        return Err(Error::MalformedParameter(format!("non-finite elastic constant in {k:?}")));
    }
    let mut violated = Vec::new();
    if !(k.k11 - k.k24 > 0.0) {
        violated.push(EricksenViolation::SplayMinusSaddleSplay);
    }
    if !(k.k22 - k.k24 > 0.0) {
        violated.push(EricksenViolation::TwistMinusSaddleSplay);
    }
    if !(k.k33 > 0.0) {
        violated.push(EricksenViolation::Bend);
    }
    if !(k.k24 > 0.0) {
        violated.push(EricksenViolation::SaddleSplay);
    }
    Ok(if violated.is_empty() { Ericksen::Satisfied } else { Ericksen::Violated(violated) })
}

/// Isotropic surface tension `gamma` and anchoring strength `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceParams {
    pub gamma: f64,
    pub lambda: f64,
}

impl SurfaceParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !gamma.is_finite() || !lambda.is_finite() {
            return Err(Error::MalformedParameter("non-finite surface parameter".into()));
        }
        if gamma <= 0.0 {
            return Err(Error::MalformedParameter(format!("gamma must be positive, got {gamma}")));
        }
        if lambda <= -1.0 {
            return Err(Error::MalformedParameter(format!("lambda must exceed -1, got {lambda}")));
        }
        Ok(Self { gamma, lambda })
    }

    /// `-1/2 <= lambda <= 1`: the range where the extended surface density is
    /// convex in the normal.
    pub fn convexity_safe(&self) -> bool {
        (-0.5..=1.0).contains(&self.lambda)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.gamma, lambda)
    }
}

/// Director value and gradient at a point, `g[i][k] = ∂n_i/∂x_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDirector {
    n: Vec3,
    g: Mat3,
}

impl PointDirector {
    pub fn new(n: Vec3, g: Mat3) -> Result<Self> {
        let len = norm(&n);
        if !(len - 1.0).abs().le(&UNIT_TOL_CONSTRUCTION) {
            return Err(Error::Consistency(format!("director is not unit: |n| = {len}")));
        }
        if g.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::MalformedParameter("non-finite director gradient".into()));
        }
        Ok(Self { n, g })
    }

    pub fn uniform(n: Vec3) -> Result<Self> {
        Self::new(n, ZERO33)
    }

    pub fn n(&self) -> Vec3 {
        self.n
    }

    pub fn g(&self) -> &Mat3 {
        &self.g
    }

    /// `|Gᵀ n|`, which vanishes for gradients of unit fields.
    pub fn unit_consistency_residual(&self) -> f64 {
        norm(&matvec(&transpose(&self.g), &self.n))
    }
}

/// Frank–Oseen density for a (not necessarily unit) director value and gradient.
pub fn frank_density_raw(k: &ElasticConstants, n: &Vec3, g: &Mat3) -> f64 {
    let div = trace(g);
    let curl = curl_of(g);
    let twist = dot(n, &curl) + k.q0;
    let bend = cross(n, &curl);
    0.5 * k.k11 * div * div
        + 0.5 * k.k22 * twist * twist
        + 0.5 * k.k33 * dot(&bend, &bend)
        + 0.5 * k.k24 * (trace_sq(g) - div * div)
}

pub fn frank_density(k: &ElasticConstants, p: &PointDirector) -> f64 {
    frank_density_raw(k, &p.n, &p.g)
}

/// Density together with its partial derivatives in `n` and in `G`.
pub fn frank_partials(k: &ElasticConstants, n: &Vec3, g: &Mat3) -> (f64, Vec3, Mat3) {
    let div = trace(g);
    let curl = curl_of(g);
    let n_dot_c = dot(n, &curl);
    let twist = n_dot_c + k.q0;
    let nn = dot(n, n);
    let cc = dot(&curl, &curl);
    let bend_sq = nn * cc - n_dot_c * n_dot_c;
    let w = 0.5 * k.k11 * div * div
        + 0.5 * k.k22 * twist * twist
        + 0.5 * k.k33 * bend_sq
        + 0.5 * k.k24 * (trace_sq(g) - div * div);

    let mut dn = [0.0; 3];
    // cotangent of the curl
    let mut dc = [0.0; 3];
    for i in 0..3 {
        dn[i] = k.k22 * twist * curl[i] + k.k33 * (cc * n[i] - n_dot_c * curl[i]);
        dc[i] = k.k22 * twist * n[i] + k.k33 * (nn * curl[i] - n_dot_c * n[i]);
    }

    let mut dg = ZERO33;
    for a in 0..3 {
        for b in 0..3 {
            dg[a][b] = k.k24 * g[b][a];
        }
        dg[a][a] += (k.k11 - k.k24) * div;
    }
    // curl = (g21 - g12, g02 - g20, g10 - g01)
    dg[2][1] += dc[0];
    dg[1][2] -= dc[0];
    dg[0][2] += dc[1];
    dg[2][0] -= dc[1];
    dg[1][0] += dc[2];
    dg[0][1] -= dc[2];
    (w, dn, dg)
}

/// `(k/2)|G|²`, the equal-constant reduction of [`frank_density`] for unit fields.
pub fn one_constant_density(k: f64, p: &PointDirector) -> Result<f64> {
    let scale = 1.0 + frobenius_sq(&p.g).sqrt();
    let residual = p.unit_consistency_residual();
    if residual > UNIT_TOL_BOUNDARY * scale {
        return Err(Error::Consistency(format!("gradient not tangent to the unit sphere: |Gᵀn| = {residual:e}")));
    }
    Ok(0.5 * k * frobenius_sq(&p.g))
}

fn check_unit(v: &Vec3, name: &str) -> Result<()> {
    let len = norm(v);
    if (len - 1.0).abs() > UNIT_TOL_BOUNDARY {
        return Err(Error::Consistency(format!("{name} is not unit: |{name}| = {len}")));
    }
    Ok(())
}

/// `γ(1 + λ(n·ν)²)`.
pub fn rapini_papoular(s: &SurfaceParams, n: &Vec3, nu: &Vec3) -> Result<f64> {
    check_unit(n, "n")?;
    check_unit(nu, "nu")?;
    let c = dot(n, nu);
    Ok(s.gamma * (1.0 + s.lambda * c * c))
}

/// Positively one-homogeneous extension of the anchoring density in `p`:
/// `γ(|p||v|² + λ(v·p)²/|p|)`, zero at `p = 0`.
pub fn g_hat(s: &SurfaceParams, v: &Vec3, p: &Vec3) -> f64 {
    let pn = norm(p);
    if pn == 0.0 {
        return 0.0;
    }
    let vp = dot(v, p);
    s.gamma * (pn * dot(v, v) + s.lambda * vp * vp / pn)
}

/// Empirical constants of the two-sided bound
/// `c1 min(|s|²,1)|M|² - c2 <= W(s,M) <= c3 max(1,|s|²)|M|² + c4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityFit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Largest violation of either bound over the sample (≤ 0 when it holds).
    pub worst_excess: f64,
}

impl CoercivityFit {
    pub fn passed(&self) -> bool {
        self.c1 > 0.0
            && [self.c1, self.c2, self.c3, self.c4].iter().all(|c| c.is_finite())
            && self.worst_excess <= 0.0
    }

    pub fn holds_for(&self, k: &ElasticConstants, s: &Vec3, m: &Mat3) -> bool {
        let w = frank_density_raw(k, s, m);
        let (lo, hi) = bound_weights(s, m);
        let tol = 1e-12 * (1.0 + w.abs() + hi);
        w >= self.c1 * lo - self.c2 - tol && w <= self.c3 * hi + self.c4 + tol
    }
}

fn bound_weights(s: &Vec3, m: &Mat3) -> (f64, f64) {
    let ss = dot(s, s);
    let mm = frobenius_sq(m);
    (ss.min(1.0) * mm, ss.max(1.0) * mm)
}

/// Fits the coercivity/growth constants over `samples`.
///
/// The quadratic moduli `c1`, `c3` are the extreme ratios of the twist-free
/// density to the bound weights; `c2`, `c4` are then the smallest offsets that
/// make every sample satisfy the corresponding bound.
pub fn coercivity_check(k: &ElasticConstants, samples: &[(Vec3, Mat3)]) -> Result<CoercivityFit> {
    if samples.is_empty() {
        return Err(Error::Argument("coercivity check needs at least one sample".into()));
    }
    k.check_admissible()?;
    let untwisted = k.with_q0(0.0);
    let mut c1 = f64::INFINITY;
    let mut c3: f64 = 0.0;
    for (s, m) in samples {
        let q = frank_density_raw(&untwisted, s, m);
        let (lo, hi) = bound_weights(s, m);
        if lo > 0.0 {
            c1 = c1.min(q / lo);
        }
        if hi > 0.0 {
            c3 = c3.max(q / hi);
        }
    }
    if !c1.is_finite() {
        // every sample had M = 0: any modulus works
        c1 = 1.0;
    }
    let mut c2: f64 = 0.0;
    let mut c4: f64 = 0.0;
    for (s, m) in samples {
        let w = frank_density_raw(k, s, m);
        let (lo, hi) = bound_weights(s, m);
        c2 = c2.max(c1 * lo - w);
        c4 = c4.max(w - c3 * hi);
    }
    let mut fit = CoercivityFit { c1, c2, c3, c4, worst_excess: 0.0 };
    let mut worst = f64::NEG_INFINITY;
    for (s, m) in samples {
        let w = frank_density_raw(k, s, m);
        let (lo, hi) = bound_weights(s, m);
        worst = worst.max(c1 * lo - c2 - w).max(w - c3 * hi - c4);
    }
    // rounding of the offsets themselves
    fit.worst_excess = if worst <= 1e-12 * (1.0 + c2 + c4) { 0.0 } else { worst };
    Ok(fit)
}
