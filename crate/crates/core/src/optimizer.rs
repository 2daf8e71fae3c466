//! Alternating projected-gradient minimization.
//!
//! One outer iteration performs a director step, an Ambrosio–Tortorelli step
//! and a shape step, each a projected gradient step with Armijo backtracking
//! on its own persistent step size. The shape step keeps the droplet volume
//! fixed by a clip-and-shift projection whose shift is found by bisection.
//! Diffuse widths are annealed along a ladder of factors applied to the
//! configured widths.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::diffuse::{variational_gradients, total_energy, EnergyBreakdown, Model};
use crate::grid::{gradient_fd, normalize_vec, pairwise_sum, smooth_heaviside, FieldState, GridSpec, ScalarField, VectorField};
use crate::linalg::{dot, norm, Vec3};
use crate::{Error, Result};

/// Step sizes below this are reported as a stall.
pub const TAU_MIN: f64 = 1e-14;
const ARMIJO: f64 = 1e-4;
const TAU_GROWTH: f64 = 1.2;
/// Cells fixed at `φ = 0` along each face in free-space modes.
pub const FREE_MARGIN: usize = 3;
/// Interface band on which the tangential residual is measured: the cells
/// where `φ(1-φ)`, and with it the anchoring weight `|∇φ|`, is at least
/// three quarters of its peak.
pub const INTERFACE_BAND: (f64, f64) = (0.25, 0.75);
/// Cells where the tangential projection is applied.
const PROJECTION_BAND: (f64, f64) = (1e-3, 1.0 - 1e-3);
const DEGENERATE_TANGENT: f64 = 1e-8;


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Free,
    Box,
    TangentialProjection,
    TangentialContinuation,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Box => "box",
            Self::TangentialProjection => "tangential-projection",
            Self::TangentialContinuation => "tangential-continuation",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Self::Free),
            "box" => Ok(Self::Box),
            "tangential-projection" => Ok(Self::TangentialProjection),
            "tangential-continuation" => Ok(Self::TangentialContinuation),
            other => Err(Error::Argument(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub max_outer_iters: usize,
    pub tol_rel_energy: f64,
    /// Initial step sizes for `n`, `φ`, `v`.
    pub tau: [f64; 3],
    pub backtrack: f64,
    /// Factors applied to the configured `eps_phi` and `eps_v`, decreasing.
    pub eps_ladder: Vec<f64>,
    /// Iteration budget of each ladder rung.
    pub rung_iters: Vec<usize>,
    pub lambda_ladder: Vec<f64>,
    pub update_phi: bool,
    pub update_v: bool,
    pub mode: Mode,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            max_outer_iters: 2000,
            tol_rel_energy: 1e-7,
            tau: [1e-3, 1e-3, 1e-3],
            backtrack: 0.5,
            eps_ladder: vec![4.0, 2.0, 1.0],
            rung_iters: vec![200, 200, 2000],
            lambda_ladder: vec![1.0, 4.0, 16.0, 64.0, 256.0, 1024.0],
            update_phi: true,
            update_v: true,
            mode: Mode::Free,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedParameter(m));
        if self.tau.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad(format!("step sizes must be positive, got {:?}", self.tau));
        }
        if !(self.tol_rel_energy.is_finite() && self.tol_rel_energy > 0.0) {
            return bad(format!("tol_rel_energy must be positive, got {}", self.tol_rel_energy));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad(format!("backtrack must lie in (0,1), got {}", self.backtrack));
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters must be positive".into());
        }
        if self.eps_ladder.is_empty() || self.eps_ladder.iter().any(|f| !(f.is_finite() && *f >= 1.0)) {
            return bad(format!("eps_ladder factors must be >= 1, got {:?}", self.eps_ladder));
        }
        if self.eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("eps_ladder must be strictly decreasing, got {:?}", self.eps_ladder));
        }
        if self.rung_iters.len() != self.eps_ladder.len() || self.rung_iters.contains(&0) {
            return bad("rung_iters needs one positive budget per eps_ladder rung".into());
        }
        check_lambda_ladder(&self.lambda_ladder)
    }

    /// Rungs actually used: width factors with their budgets. A frozen shape
    /// runs at the configured widths only.
    fn rungs(&self, anneal: bool) -> Vec<(f64, usize)> {
        if anneal && self.update_phi {
            self.eps_ladder.iter().copied().zip(self.rung_iters.iter().copied()).collect()
        } else {
            vec![(1.0, self.max_outer_iters)]
        }
    }
}

pub fn check_lambda_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() || ladder.iter().any(|l| !(l.is_finite() && *l > -1.0)) {
        return Err(Error::MalformedParameter(format!("lambda ladder values must exceed -1, got {ladder:?}")));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MalformedParameter(format!("lambda ladder must be strictly increasing, got {ladder:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    /// Every updated field stalled in the same iteration.
    Stationary,
    Budget,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::Stationary => "stationary",
            Self::Budget => "budget",
        }
    }

    pub fn is_budget(&self) -> bool {
        *self == Self::Budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: EnergyBreakdown,
    pub volume: f64,
    pub grad_norm: [f64; 3],
    pub tau: [f64; 3],
    pub eps_phi: f64,
    pub eps_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub initial: EnergyBreakdown,
    pub trace: Vec<TraceRow>,
    pub termination: Termination,
    pub wall_clock: Duration,
    /// Sup of `|n·ν|` over the interface band, in tangential modes.
    pub residual: Option<f64>,
}

impl RunReport {
    pub fn final_energy(&self) -> EnergyBreakdown {
        self.trace.last().map_or(self.initial, |r| r.energy)
    }
}

/// Resumable solver position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub iter: usize,
    pub rung: usize,
    pub rung_iter: usize,
    pub tau: [f64; 3],
    /// Energy at the end of the previous iteration, `NaN` before the first.
    pub last_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepStatus {
    Accepted { tau: f64 },
    /// The projected step is a no-op: the field sits at a fixed point.
    Unchanged,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub status: StepStatus,
    pub energy: EnergyBreakdown,
    pub grad_norm: f64,
}

impl StepOutcome {
    /// No progress was made, either at a fixed point or after backtracking
    /// ran out.
    pub fn no_progress(&self) -> bool {
        !matches!(self.status, StepStatus::Accepted { .. })
    }
}

/// Which cells the shape step may change.
pub fn free_mask(grid: &GridSpec, mode: Mode) -> Vec<bool> {
    let margin = if mode == Mode::Box { 1 } else { FREE_MARGIN };
    (0..grid.len()).map(|c| grid.face_distance(c) >= margin).collect()
}

fn weighted_norm(sq: f64, grid: &GridSpec) -> f64 {
    (sq * grid.cell_volume()).sqrt()
}

/// Backtracking driver shared by the three steps. `trial` builds the
/// candidate for a step size and returns it with the predicted decrease
/// `Σ g·(u - u_new) dV`.
fn backtrack<T>(
    e0: &EnergyBreakdown,
    tau0: f64,
    beta: f64,
    mut trial: impl FnMut(f64) -> Result<Option<(T, f64)>>,
    energy_of: impl Fn(&T) -> EnergyBreakdown,
) -> Result<Option<(T, f64, EnergyBreakdown)>> {
    let mut tau = tau0;
    while tau >= TAU_MIN {
        if let Some((cand, decrease)) = trial(tau)? {
            if decrease == 0.0 {
                return Ok(Some((cand, 0.0, *e0)));
            }
            let e = energy_of(&cand);
            if e.e_total <= e0.e_total - ARMIJO * decrease.max(0.0) {
                return Ok(Some((cand, tau, e)));
            }
        }
        tau *= beta;
    }
    Ok(None)
}

/// Unit normal `∇φ/|∇φ|` per cell, `None` where the gradient vanishes.
fn unit_normals(phi: &ScalarField) -> Vec<Option<Vec3>> {
    gradient_fd(phi)
        .data
        .into_iter()
        .map(|g| {
            let l = norm(&g);
            (l > 0.0).then(|| [g[0] / l, g[1] / l, g[2] / l])
        })
        .collect()
}

#[inline]
fn project_cell(n: &Vec3, nu: &Vec3) -> Vec3 {
    let c = dot(n, nu);
    let t = [n[0] - c * nu[0], n[1] - c * nu[1], n[2] - c * nu[2]];
    if norm(&t) > DEGENERATE_TANGENT {
        return normalize_vec(&t);
    }
    // n ∥ ν: take the coordinate axis least aligned with ν
    let k = (0..3).fold(0, |k, a| if nu[a].abs() < nu[k].abs() { a } else { k });
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let c = nu[k];
    normalize_vec(&[e[0] - c * nu[0], e[1] - c * nu[1], e[2] - c * nu[2]])
}

/// Removes the normal component of `n` on the interface band of `φ`.
pub fn project_tangential(n: &VectorField, phi: &ScalarField) -> VectorField {
    let normals = unit_normals(phi);
    let data = n
        .data
        .par_iter()
        .zip(phi.data.par_iter())
        .zip(normals.par_iter())
        .map(|((x, &p), nu)| match nu {
            Some(nu) if p >= PROJECTION_BAND.0 && p <= PROJECTION_BAND.1 => project_cell(x, nu),
            _ => *x,
        })
        .collect();
    VectorField { grid: n.grid, data }
}

/// `sup |n·ν|` over cells with `φ` inside [`INTERFACE_BAND`].
pub fn tangential_residual(n: &VectorField, phi: &ScalarField) -> f64 {
    let normals = unit_normals(phi);
    n.data
        .iter()
        .zip(&phi.data)
        .zip(&normals)
        .filter(|((_, &p), _)| p >= INTERFACE_BAND.0 && p <= INTERFACE_BAND.1)
        .filter_map(|((x, _), nu)| nu.map(|nu| dot(x, &nu).abs()))
        .fold(0.0, f64::max)
}

/// `n ← normalize(n - τ P_n δE/δn)` with `P_n` the tangent projection at `n`.
pub fn director_step(state: &mut FieldState, model: &Model, tau: f64, beta: f64, tangential: bool) -> Result<StepOutcome> {
    let grid = *state.grid();
    let (e0, g) = variational_gradients(state, model);
    let gt: Vec<Vec3> = state
        .n
        .data
        .par_iter()
        .zip(g.n.par_iter())
        .map(|(n, g)| {
            let c = dot(g, n);
            [g[0] - c * n[0], g[1] - c * n[1], g[2] - c * n[2]]
        })
        .collect();
    let sq: f64 = pairwise_sum(&gt.iter().map(|x| dot(x, x)).collect::<Vec<_>>());
    let grad_norm = weighted_norm(sq, &grid);
    let dv = grid.cell_volume();
    let old = state.clone();
    let result = backtrack(
        &e0,
        tau,
        beta,
        |t| {
            let data: Vec<Vec3> = old
                .n
                .data
                .par_iter()
                .zip(gt.par_iter())
                .map(|(n, g)| normalize_vec(&[n[0] - t * g[0], n[1] - t * g[1], n[2] - t * g[2]]))
                .collect();
            let mut n = VectorField { grid, data };
            if tangential {
                n = project_tangential(&n, &old.phi);
            }
            let terms: Vec<f64> = n
                .data
                .par_iter()
                .zip(old.n.data.par_iter())
                .zip(g.n.par_iter())
                .map(|((new, o), g)| dot(g, &[o[0] - new[0], o[1] - new[1], o[2] - new[2]]))
                .collect();
            let dec = pairwise_sum(&terms) * dv;
            let changed = n.data != old.n.data;
            let cand = FieldState { n, phi: old.phi.clone(), v: old.v.clone() };
            Ok(Some((cand, if changed { dec.max(f64::MIN_POSITIVE) } else { 0.0 })))
        },
        |s| total_energy(s, model),
    )?;
    Ok(finish(state, result, e0, grad_norm))
}

/// `v ← clip_[0,1](v - τ δE/δv)`.
pub fn at_step(state: &mut FieldState, model: &Model, tau: f64, beta: f64) -> Result<StepOutcome> {
    let grid = *state.grid();
    let (e0, g) = variational_gradients(state, model);
    let grad_norm = weighted_norm(pairwise_sum(&g.v.iter().map(|x| x * x).collect::<Vec<_>>()), &grid);
    let dv = grid.cell_volume();
    let old = state.clone();
    let result = backtrack(
        &e0,
        tau,
        beta,
        |t| {
            let data: Vec<f64> = old.v.data.iter().zip(&g.v).map(|(v, g)| (v - t * g).clamp(0.0, 1.0)).collect();
            let terms: Vec<f64> = data.iter().zip(&old.v.data).zip(&g.v).map(|((new, o), g)| g * (o - new)).collect();
            let changed = data != old.v.data;
            let dec = pairwise_sum(&terms) * dv;
            let cand = FieldState { n: old.n.clone(), phi: old.phi.clone(), v: ScalarField { grid, data } };
            Ok(Some((cand, if changed { dec.max(f64::MIN_POSITIVE) } else { 0.0 })))
        },
        |s| total_energy(s, model),
    )?;
    Ok(finish(state, result, e0, grad_norm))
}

/// Shift weight `4φ(1-φ)`: proportional to `h'(φ)`, so the shift acts in
/// the direction that changes the volume and leaves both wells alone.
#[inline]
pub fn shift_weight(phi: f64) -> f64 {
    4.0 * phi * (1.0 - phi)
}

/// Clip-and-shift projection: returns `clip_[0,1](ψ + μ w)` on free cells
/// (zero elsewhere) with `μ` chosen by bisection so that `∫ h` equals
/// `target` within `1e-12·target`.
pub fn volume_projection(psi: &[f64], weight: &[f64], free: &[bool], cell_volume: f64, target: f64) -> Result<(Vec<f64>, f64)> {
    let apply = |mu: f64| -> Vec<f64> {
        psi.iter()
            .zip(weight)
            .zip(free)
            .map(|((p, w), &f)| if f { (p + mu * w).clamp(0.0, 1.0) } else { 0.0 })
            .collect()
    };
    let volume = |x: &[f64]| pairwise_sum(&x.iter().map(|&p| smooth_heaviside(p)).collect::<Vec<_>>()) * cell_volume;
    let capacity = free.iter().filter(|&&f| f).count() as f64 * cell_volume;
    if !(target > 0.0 && target < capacity) {
        return Err(Error::Projection(format!("target volume {target} outside (0, {capacity})")));
    }
    let wmin = weight.iter().zip(free).filter(|(w, &f)| f && **w > 0.0).map(|(w, _)| *w).fold(f64::INFINITY, f64::min);
    if !wmin.is_finite() {
        return Err(Error::Projection("no cell can carry the volume shift".into()));
    }
    let reach = (1.0 + psi.iter().fold(0.0f64, |a, p| a.max(p.abs()))) / wmin;
    let (mut lo, mut hi) = (-reach, reach);
    let (vlo, vhi) = (volume(&apply(lo)), volume(&apply(hi)));
    if !(vlo <= target && target <= vhi) {
        return Err(Error::Projection(format!("target volume {target} outside reachable [{vlo}, {vhi}]")));
    }
    let tol = 1e-12 * target;
    let mut best = (f64::INFINITY, 0.0);
    for _ in 0..200 {
        let mu = 0.5 * (lo + hi);
        let x = apply(mu);
        let err = volume(&x) - target;
        if err.abs() < best.0 {
            best = (err.abs(), mu);
        }
        if err.abs() <= tol {
            return Ok((x, mu));
        }
        if err < 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        if hi <= lo {
            break;
        }
    }
    let (err, mu) = best;
    if err <= 1e-10 * target {
        Ok((apply(mu), mu))
    } else {
        Err(Error::Projection(format!("bisection stopped {err} away from target {target}")))
    }
}

/// `φ ← clip_[0,1](φ - τ δE/δφ + μ w(φ))` on free cells at fixed volume.
pub fn shape_step(
    state: &mut FieldState,
    model: &Model,
    tau: f64,
    beta: f64,
    target: f64,
    free: &[bool],
) -> Result<StepOutcome> {
    let grid = *state.grid();
    let (e0, g) = variational_gradients(state, model);
    let weight: Vec<f64> = state.phi.data.iter().map(|&p| shift_weight(p)).collect();
    // gradient with its volume-changing component removed
    let dot_w = |a: &[f64], b: &[f64]| pairwise_sum(&a.iter().zip(b).zip(free).map(|((x, y), &f)| if f { x * y } else { 0.0 }).collect::<Vec<_>>());
    let ww = dot_w(&weight, &weight);
    let c = if ww > 0.0 { dot_w(&g.phi, &weight) / ww } else { 0.0 };
    let reduced: Vec<f64> = g.phi.iter().zip(&weight).map(|(g, w)| g - c * w).collect();
    let grad_norm = weighted_norm(dot_w(&reduced, &reduced), &grid);
    let dv = grid.cell_volume();
    let old = state.clone();
    let result = backtrack(
        &e0,
        tau,
        beta,
        |t| {
            let psi: Vec<f64> = old.phi.data.iter().zip(&g.phi).map(|(p, g)| p - t * g).collect();
            let data = match volume_projection(&psi, &weight, free, dv, target) {
                Ok((x, _)) => x,
                Err(_) => return Ok(None),
            };
            let terms: Vec<f64> = data.iter().zip(&old.phi.data).zip(&g.phi).map(|((new, o), g)| g * (o - new)).collect();
            let changed = data != old.phi.data;
            let dec = pairwise_sum(&terms) * dv;
            let cand = FieldState { n: old.n.clone(), phi: ScalarField { grid, data }, v: old.v.clone() };
            Ok(Some((cand, if changed { dec.max(f64::MIN_POSITIVE) } else { 0.0 })))
        },
        |s| total_energy(s, model),
    )?;
    Ok(finish(state, result, e0, grad_norm))
}

fn finish(
    state: &mut FieldState,
    result: Option<(FieldState, f64, EnergyBreakdown)>,
    e0: EnergyBreakdown,
    grad_norm: f64,
) -> StepOutcome {
    match result {
        Some((_, tau, e)) if tau == 0.0 => StepOutcome { status: StepStatus::Unchanged, energy: e, grad_norm },
        Some((s, tau, e)) => {
            *state = s;
            StepOutcome { status: StepStatus::Accepted { tau }, energy: e, grad_norm }
        }
        None => StepOutcome { status: StepStatus::Stalled, energy: e0, grad_norm },
    }
}

/// Owns a state and advances it one outer iteration at a time.
pub struct Solver {
    model: Model,
    schedule: Schedule,
    target: f64,
    rungs: Vec<(f64, usize)>,
    free: Vec<bool>,
    state: FieldState,
    progress: Progress,
}

impl Solver {
    /// Prepares a fresh run: projects the initial `φ` onto the target volume
    /// (when the shape is free) and the director onto tangent fields in
    /// projection mode.
    pub fn new(model: Model, schedule: Schedule, target: f64, state: FieldState) -> Result<Self> {
        Self::new_with_anneal(model, schedule, target, state, true)
    }

    fn new_with_anneal(model: Model, schedule: Schedule, target: f64, mut state: FieldState, anneal: bool) -> Result<Self> {
        schedule.validate()?;
        let grid = *state.grid();
        model.diffuse.check_resolution(&grid)?;
        let free = free_mask(&grid, schedule.mode);
        if schedule.update_phi {
            let weight: Vec<f64> = state.phi.data.iter().map(|&p| shift_weight(p)).collect();
            let (phi, _) = volume_projection(&state.phi.data, &weight, &free, grid.cell_volume(), target)?;
            state.phi.data = phi;
        }
        if schedule.mode == Mode::TangentialProjection {
            state.n = project_tangential(&state.n, &state.phi);
        }
        let rungs = schedule.rungs(anneal);
        let progress = Progress { iter: 0, rung: 0, rung_iter: 0, tau: schedule.tau, last_energy: f64::NAN };
        Ok(Self { model, schedule, target, rungs, free, state, progress })
    }

    /// Continues from a saved position; the state is used as is.
    pub fn resume(model: Model, schedule: Schedule, target: f64, state: FieldState, progress: Progress) -> Result<Self> {
        Self::resume_with_anneal(model, schedule, target, state, progress, true)
    }

    fn resume_with_anneal(
        model: Model,
        schedule: Schedule,
        target: f64,
        state: FieldState,
        progress: Progress,
        anneal: bool,
    ) -> Result<Self> {
        schedule.validate()?;
        let grid = *state.grid();
        model.diffuse.check_resolution(&grid)?;
        let rungs = schedule.rungs(anneal);
        if progress.rung >= rungs.len() {
            return Err(Error::Argument(format!("resume rung {} out of range", progress.rung)));
        }
        let free = free_mask(&grid, schedule.mode);
        Ok(Self { model, schedule, target, rungs, free, state, progress })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn into_state(self) -> FieldState {
        self.state
    }

    pub fn progress(&self) -> Progress {
        self.progress
    }

    /// Model at the widths of the current rung.
    pub fn current_model(&self) -> Model {
        let f = self.rungs[self.progress.rung].0;
        let d = self.model.diffuse;
        Model { diffuse: d.with_widths(f * d.eps_phi, f * d.eps_v), ..self.model }
    }

    pub fn energy(&self) -> EnergyBreakdown {
        total_energy(&self.state, &self.current_model())
    }

    /// One outer iteration; returns its trace row and, when the run ends
    /// with this iteration, the termination reason.
    pub fn iterate(&mut self) -> Result<(TraceRow, Option<Termination>)> {
        let model = self.current_model();
        let beta = self.schedule.backtrack;
        let tangential = self.schedule.mode == Mode::TangentialProjection;
        let mut stalls = Vec::new();
        let mut grad_norm = [0.0; 3];

        let out = director_step(&mut self.state, &model, self.progress.tau[0], beta, tangential)?;
        self.update_tau(0, &out);
        stalls.push(out.no_progress());
        grad_norm[0] = out.grad_norm;
        let mut energy = out.energy;

        if self.schedule.update_v {
            let out = at_step(&mut self.state, &model, self.progress.tau[2], beta)?;
            self.update_tau(2, &out);
            stalls.push(out.no_progress());
            grad_norm[2] = out.grad_norm;
            energy = out.energy;
        }
        if self.schedule.update_phi {
            let out = shape_step(&mut self.state, &model, self.progress.tau[1], beta, self.target, &self.free)?;
            self.update_tau(1, &out);
            stalls.push(out.no_progress());
            grad_norm[1] = out.grad_norm;
            energy = out.energy;
        }

        self.progress.iter += 1;
        self.progress.rung_iter += 1;
        let row = TraceRow {
            iter: self.progress.iter,
            energy,
            volume: self.state.volume(),
            grad_norm,
            tau: self.progress.tau,
            eps_phi: model.diffuse.eps_phi,
            eps_v: model.diffuse.eps_v,
        };

        let prev = self.progress.last_energy;
        self.progress.last_energy = energy.e_total;
        let rel = (prev - energy.e_total).abs() / energy.e_total.abs().max(f64::MIN_POSITIVE);
        let converged = prev.is_finite() && rel < self.schedule.tol_rel_energy;
        let stationary = stalls.iter().all(|&s| s);
        let last_rung = self.progress.rung + 1 == self.rungs.len();
        let rung_done = self.progress.rung_iter >= self.rungs[self.progress.rung].1;

        let mut end = None;
        if stationary && last_rung {
            end = Some(Termination::Stationary);
        } else if converged && last_rung {
            end = Some(Termination::Converged);
        } else if (converged || stationary || rung_done) && !last_rung {
            self.progress.rung += 1;
            self.progress.rung_iter = 0;
            self.progress.last_energy = f64::NAN;
        } else if rung_done {
            end = Some(Termination::Budget);
        }
        if end.is_none() && self.progress.iter >= self.schedule.max_outer_iters {
            end = Some(Termination::Budget);
        }
        Ok((row, end))
    }

    fn update_tau(&mut self, k: usize, out: &StepOutcome) {
        if let StepStatus::Accepted { tau } = out.status {
            self.progress.tau[k] = tau * TAU_GROWTH;
        }
    }

    /// Iterates until termination; `on_row` sees every trace row.
    pub fn run_with(&mut self, mut on_row: impl FnMut(&TraceRow, &Solver) -> Result<()>) -> Result<RunReport> {
        let start = Instant::now();
        let initial = self.energy();
        let mut trace = Vec::new();
        let termination = loop {
            let (row, end) = self.iterate()?;
            on_row(&row, self)?;
            trace.push(row);
            if let Some(t) = end {
                break t;
            }
        };
        let residual = matches!(self.schedule.mode, Mode::TangentialProjection | Mode::TangentialContinuation)
            .then(|| tangential_residual(&self.state.n, &self.state.phi));
        Ok(RunReport { initial, trace, termination, wall_clock: start.elapsed(), residual })
    }

    pub fn run(&mut self) -> Result<RunReport> {
        self.run_with(|_, _| Ok(()))
    }
}

/// Relaxes the director (and `v` when `schedule.update_v`) with `φ` frozen.
pub fn minimize_director_only(state: FieldState, model: &Model, schedule: &Schedule) -> Result<(RunReport, FieldState)> {
    let schedule = Schedule { update_phi: false, ..schedule.clone() };
    let volume = state.volume();
    let mut solver = Solver::new(*model, schedule, volume, state)?;
    let report = solver.run()?;
    Ok((report, solver.into_state()))
}

/// Alternating minimization of the full energy at volume `target`.
pub fn minimize_full(state: FieldState, target: f64, model: &Model, schedule: &Schedule) -> Result<(RunReport, FieldState)> {
    let mut solver = Solver::new(*model, schedule.clone(), target, state)?;
    let report = solver.run()?;
    Ok((report, solver.into_state()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationReport {
    pub rows: Vec<SweepRow>,
    /// Full trace across the ladder with a running iteration count.
    pub trace: Vec<TraceRow>,
    /// Extrapolation of the final energies to `λ → ∞` from the last two rungs.
    pub limit_estimate: f64,
    pub wall_clock: Duration,
}

impl ContinuationReport {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].energy.e_total >= w[0].energy.e_total)
    }

    pub fn any_budget(&self) -> bool {
        self.rows.iter().any(|r| r.termination.is_budget())
    }
}

/// Richardson extrapolation in `1/λ` from the last two ladder values.
pub fn limit_estimate(rows: &[SweepRow]) -> f64 {
    match rows {
        [] => f64::NAN,
        [one] => one.energy.e_total,
        [.., a, b] => (b.lambda * b.energy.e_total - a.lambda * a.energy.e_total) / (b.lambda - a.lambda),
    }
}

/// Runs [`minimize_full`] along the ladder, warm-starting each value of `λ`
/// from the previous minimizer. Width annealing, when the shape is free,
/// happens on the first rung only.
pub fn tangential_continuation(
    state: FieldState,
    target: f64,
    model: &Model,
    schedule: &Schedule,
    ladder: &[f64],
) -> Result<(ContinuationReport, FieldState)> {
    check_lambda_ladder(ladder)?;
    let start = Instant::now();
    let mut state = state;
    let mut rows = Vec::new();
    let mut trace = Vec::new();
    let mut offset = 0;
    for (k, &lambda) in ladder.iter().enumerate() {
        let m = model.with_lambda(lambda)?;
        let sched = Schedule { mode: Mode::TangentialContinuation, ..schedule.clone() };
        let target_k = if sched.update_phi { target } else { state.volume() };
        let mut solver = Solver::new_with_anneal(m, sched, target_k, state, k == 0)?;
        let report = solver.run()?;
        state = solver.into_state();
        trace.extend(report.trace.iter().map(|r| TraceRow { iter: r.iter + offset, ..*r }));
        offset += report.trace.len();
        rows.push(SweepRow {
            lambda,
            energy: report.final_energy(),
            residual: report.residual.unwrap_or(f64::NAN),
            iterations: report.trace.len(),
            termination: report.termination,
        });
    }
    let limit = limit_estimate(&rows);
    Ok((ContinuationReport { rows, trace, limit_estimate: limit, wall_clock: start.elapsed() }, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffuse::{DiffuseParams, InnerAnchoring};
    use crate::energy::{ElasticConstants, SurfaceParams};
    use crate::init::{random_director, smoothed_ball};

    fn ball_state(n: usize, radius: f64) -> (FieldState, Model) {
        let grid = GridSpec::cube(n, 2.0).unwrap();
        let eps = 2.0 * grid.max_spacing();
        let phi = smoothed_ball(grid, radius, [0.0; 3], eps);
        let state = FieldState::new(VectorField::constant(grid, [0.0, 0.0, 1.0]), phi, ScalarField::constant(grid, 1.0)).unwrap();
        let d = DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).unwrap();
        let model = Model::new(ElasticConstants::one_constant(1.0), SurfaceParams::new(1.0, 0.0).unwrap(), d).unwrap();
        (state, model)
    }

    #[test]
    fn uniform_director_is_a_fixed_point() {
        let (mut state, model) = ball_state(16, 0.5);
        let before = state.clone();
        let out = director_step(&mut state, &model, 1e-2, 0.5, false).unwrap();
        assert_eq!(out.status, StepStatus::Unchanged);
        assert_eq!(state, before);
    }

    #[test]
    fn director_descent_decreases_energy() {
        let (mut state, model) = ball_state(16, 0.6);
        state.n = random_director(*state.grid(), 3);
        let mut e = total_energy(&state, &model).e_total;
        let mut tau = 1e-2;
        for _ in 0..100 {
            let out = director_step(&mut state, &model, tau, 0.5, false).unwrap();
            if let StepStatus::Accepted { tau: t } = out.status {
                tau = t * TAU_GROWTH;
            }
            assert!(out.energy.e_total < e, "{} !< {e}", out.energy.e_total);
            e = out.energy.e_total;
            let worst = state.n.data.iter().map(|x| (norm(x) - 1.0).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-12);
        }
    }

    #[test]
    fn bisection_matches_closed_form_shift() {
        let grid = GridSpec::cube(12, 1.0).unwrap();
        let free = free_mask(&grid, Mode::Free);
        let dv = grid.cell_volume();
        let phi: Vec<f64> = free.iter().map(|&f| if f { 0.5 } else { 0.0 }).collect();
        let target = crate::grid::volume_of(&ScalarField { grid, data: phi.clone() });
        let (tau, c) = (0.01, 3.0);
        let psi: Vec<f64> = phi.iter().map(|p| p - tau * c).collect();
        let weight: Vec<f64> = phi.iter().map(|&p| shift_weight(p)).collect();
        let (x, mu) = volume_projection(&psi, &weight, &free, dv, target).unwrap();
        assert!((mu - tau * c).abs() < 1e-10, "{mu}");
        assert!(x.iter().zip(&phi).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn bisection_rejects_unreachable_volume() {
        let grid = GridSpec::cube(10, 1.0).unwrap();
        let free = free_mask(&grid, Mode::Free);
        let psi = vec![0.5; grid.len()];
        let w = vec![1.0; grid.len()];
        assert!(volume_projection(&psi, &w, &free, grid.cell_volume(), 0.9).is_err());
        assert!(volume_projection(&psi, &w, &free, grid.cell_volume(), 0.0).is_err());
        assert!(volume_projection(&psi, &vec![0.0; grid.len()], &free, grid.cell_volume(), 0.1).is_err());
    }

    #[test]
    fn optimal_ball_keeps_volume_and_energy() {
        let (mut state, model) = ball_state(20, 0.5);
        let free = free_mask(state.grid(), Mode::Free);
        let target = state.volume();
        let e0 = total_energy(&state, &model).e_total;
        let out = shape_step(&mut state, &model, 1e-3, 0.5, target, &free).unwrap();
        assert!(out.energy.e_total <= e0);
        assert!((state.volume() - target).abs() <= 1e-10 * target);
    }

    #[test]
    fn v_closes_without_elastic_incentive() {
        let (mut state, model) = ball_state(16, 0.5);
        state.v = ScalarField::constant(*state.grid(), 0.3);
        let mut tau = 1e-3;
        for _ in 0..1500 {
            let out = at_step(&mut state, &model, tau, 0.5).unwrap();
            if let StepStatus::Accepted { tau: t } = out.status {
                tau = t * TAU_GROWTH;
            }
        }
        assert!(state.v.min_max().0 > 0.99, "{:?}", state.v.min_max());
    }

    #[test]
    fn projection_leaves_a_tangent_field() {
        let (state, _) = ball_state(24, 0.6);
        let n = project_tangential(&random_director(*state.grid(), 5), &state.phi);
        assert!(tangential_residual(&n, &state.phi) <= 1e-6);
        // a field parallel to the normal hits the degenerate branch
        let radial = VectorField::from_fn(*state.grid(), |x| normalize_vec(&x));
        let p = project_tangential(&radial, &state.phi);
        assert!(tangential_residual(&p, &state.phi) <= 1e-6);
        assert!(p.data.iter().all(|x| (norm(x) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::default().validate().is_ok());
        let bad = Schedule { eps_ladder: vec![1.0, 2.0], rung_iters: vec![1, 1], ..Schedule::default() };
        assert!(bad.validate().is_err());
        let bad = Schedule { lambda_ladder: vec![4.0, 1.0], ..Schedule::default() };
        assert!(bad.validate().is_err());
        let bad = Schedule { backtrack: 1.0, ..Schedule::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn limit_estimate_extrapolates_inverse_lambda() {
        let row = |lambda: f64| SweepRow {
            lambda,
            energy: EnergyBreakdown { e_total: 5.0 - 2.0 / lambda, ..Default::default() },
            residual: 0.0,
            iterations: 1,
            termination: Termination::Converged,
        };
        let est = limit_estimate(&[row(1.0), row(4.0), row(16.0)]);
        assert!((est - 5.0).abs() < 1e-12);
    }
}
