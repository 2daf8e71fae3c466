//! Diffuse-interface assembly of the droplet energy.
//!
//! The droplet `Ω` is represented by a phase field `φ ∈ [0,1]` whose
//! Modica–Mortola energy approximates its perimeter, and the inner boundary
//! `Γ` by an Ambrosio–Tortorelli field `v ∈ [0,1]` that releases the bulk
//! energy where it drops to zero. Per cell:
//!
//! ```text
//! bulk         h(φ) v² W(n, ∇n)
//! perimeter    (γ/c) (ε_φ|∇φ|² + φ²(1-φ)²/ε_φ)
//! outer anchor (γλ/c) (n·ν_φ)² (ε_φ|∇φ|² + φ²(1-φ)²/ε_φ)
//! inner iso    2γ (ε_v|∇v|² + (1-v)²/(4ε_v))
//! inner anchor 2γλ (n·ν_v)² (1-v)²/(4ε_v)        (penalized mode only)
//! ```
//!
//! with `ν_φ = -∇φ/(|∇φ|+η)`, `ν_v = ∇v/(|∇v|+η)`, `c` the Modica–Mortola
//! constant of the double well and `h(φ) = 3φ² - 2φ³` the smooth Heaviside
//! that also measures the volume. `h` vanishes to second order at `φ = 0`
//! and is odd about `φ = 1/2`, so across a symmetric profile it carries no
//! first-order width bias, unlike `φ²` which loses `ε` per unit area.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::energy::{frank_partials, ElasticConstants, SurfaceParams};
use crate::grid::{derivative, pairwise_sum, smooth_heaviside, volume_of, FieldState, GridSpec, ScalarField, Stencils};
use crate::linalg::{dot, norm, Mat3, Vec3, ZERO3, ZERO33};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerAnchoring {
    /// Only the isotropic part `2γ|Γ|` is charged on the inner boundary.
    IsotropicOnly,
    /// Adds `2γλ(n·ν_v)²` on the inner boundary; the two one-sided traces are
    /// not distinguished.
    Penalized,
}

impl InnerAnchoring {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IsotropicOnly => "isotropic-only",
            Self::Penalized => "penalized",
        }
    }
}

impl std::str::FromStr for InnerAnchoring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic-only" => Ok(Self::IsotropicOnly),
            "penalized" => Ok(Self::Penalized),
            other => Err(Error::Argument(format!("unknown inner anchoring mode `{other}`"))),
        }
    }
}

/// `∫ (|φ'|² + φ²(1-φ)²) ds` for the optimal unit-width profile
/// `φ(s) = 1/(1+eˢ)`, by composite Simpson quadrature.
pub fn modica_mortola_constant() -> f64 {
    let (a, b, n) = (-40.0f64, 40.0f64, 16_000usize);
    let h = (b - a) / n as f64;
    let f = |s: f64| {
        let p = 1.0 / (1.0 + s.exp());
        let w = p * (1.0 - p);
        2.0 * w * w
    };
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseParams {
    pub eps_phi: f64,
    pub eps_v: f64,
    pub eta: f64,
    pub c_mm: f64,
    pub inner: InnerAnchoring,
}

impl DiffuseParams {
    pub fn new(eps_phi: f64, eps_v: f64, eta: f64, inner: InnerAnchoring) -> Result<Self> {
        for (name, x) in [("eps_phi", eps_phi), ("eps_v", eps_v), ("eta", eta)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::MalformedParameter(format!("{name} must be positive, got {x}")));
            }
        }
        Ok(Self { eps_phi, eps_v, eta, c_mm: modica_mortola_constant(), inner })
    }

    /// Both widths must span at least two cells.
    pub fn check_resolution(&self, grid: &GridSpec) -> Result<()> {
        let h = grid.max_spacing();
        let min = 2.0 * h * (1.0 - 1e-12);
        if self.eps_phi < min || self.eps_v < min {
            return Err(Error::MalformedParameter(format!(
                "diffuse widths ({}, {}) must be at least 2h = {}",
                self.eps_phi,
                self.eps_v,
                2.0 * h
            )));
        }
        Ok(())
    }

    pub fn with_widths(&self, eps_phi: f64, eps_v: f64) -> Self {
        Self { eps_phi, eps_v, ..*self }
    }
}

/// Energy model: material constants and diffuse-interface parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub elastic: ElasticConstants,
    pub surface: SurfaceParams,
    pub diffuse: DiffuseParams,
}

impl Model {
    pub fn new(elastic: ElasticConstants, surface: SurfaceParams, diffuse: DiffuseParams) -> Result<Self> {
        elastic.check_admissible()?;
        Ok(Self { elastic, surface, diffuse })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(Self { surface: self.surface.with_lambda(lambda)?, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub e_bulk: f64,
    pub e_perimeter: f64,
    pub e_anchor_outer: f64,
    pub e_inner_isotropic: f64,
    pub e_inner_anchor: f64,
    pub e_total: f64,
}

impl EnergyBreakdown {
    fn from_parts(parts: [f64; 5]) -> Self {
        let [e_bulk, e_perimeter, e_anchor_outer, e_inner_isotropic, e_inner_anchor] = parts;
        Self {
            e_bulk,
            e_perimeter,
            e_anchor_outer,
            e_inner_isotropic,
            e_inner_anchor,
            e_total: e_bulk + e_perimeter + e_anchor_outer + e_inner_isotropic + e_inner_anchor,
        }
    }

    /// Outer surface energy `F_s` on `∂Ω`.
    pub fn outer_surface(&self) -> f64 {
        self.e_perimeter + self.e_anchor_outer
    }

    /// Everything except the bulk term.
    pub fn surface(&self) -> f64 {
        self.e_total - self.e_bulk
    }

    pub fn parts(&self) -> [f64; 5] {
        [self.e_bulk, self.e_perimeter, self.e_anchor_outer, self.e_inner_isotropic, self.e_inner_anchor]
    }
}

impl fmt::Display for EnergyBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "e_bulk            {:.10e}", self.e_bulk)?;
        writeln!(f, "e_perimeter       {:.10e}", self.e_perimeter)?;
        writeln!(f, "e_anchor_outer    {:.10e}", self.e_anchor_outer)?;
        writeln!(f, "e_inner_isotropic {:.10e}", self.e_inner_isotropic)?;
        writeln!(f, "e_inner_anchor    {:.10e}", self.e_inner_anchor)?;
        write!(f, "e_total           {:.10e}", self.e_total)
    }
}

/// L² gradients (per unit volume) of the discrete energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub n: Vec<Vec3>,
    pub phi: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Copy)]
struct CellPartials {
    n: Vec3,
    g: Mat3,
    phi: f64,
    gphi: Vec3,
    v: f64,
    gv: Vec3,
}

const NO_PARTIALS: CellPartials = CellPartials { n: ZERO3, g: ZERO33, phi: 0.0, gphi: ZERO3, v: 0.0, gv: ZERO3 };

/// `A = (n·g)²/(|g|+η)²` with its partials in `n` and `g`.
#[inline]
fn alignment(n: &Vec3, g: &Vec3, eta: f64) -> (f64, Vec3, Vec3) {
    let gn = norm(g);
    let d = gn + eta;
    let c = dot(n, g);
    let a = c * c / (d * d);
    let s = 2.0 * c / (d * d);
    let dn = [s * g[0], s * g[1], s * g[2]];
    let radial = if gn > 0.0 { 2.0 * a / (d * gn) } else { 0.0 };
    let dg = [s * n[0] - radial * g[0], s * n[1] - radial * g[1], s * n[2] - radial * g[2]];
    (a, dn, dg)
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn cell_terms(
    m: &Model,
    n: &Vec3,
    g: &Mat3,
    phi: f64,
    gphi: &Vec3,
    v: f64,
    gv: &Vec3,
    want: bool,
) -> ([f64; 5], CellPartials) {
    let k = &m.elastic;
    let (gamma, lambda) = (m.surface.gamma, m.surface.lambda);
    let d = &m.diffuse;
    let mut p = NO_PARTIALS;

    // bulk
    let hphi = smooth_heaviside(phi);
    let weight = hphi * v * v;
    let (w, dwn, dwg) = if weight != 0.0 || want {
        frank_partials(k, n, g)
    } else {
        (0.0, ZERO3, ZERO33)
    };
    let e_bulk = weight * w;

    // Modica–Mortola density and anchoring on ∂Ω
    let (ep, c) = (d.eps_phi, d.c_mm);
    let gphi2 = dot(gphi, gphi);
    let well = phi * phi * (1.0 - phi) * (1.0 - phi);
    let rho = ep * gphi2 + well / ep;
    let e_perim = gamma / c * rho;
    let (a_out, da_out_n, da_out_g) = alignment(n, gphi, d.eta);
    let e_anchor = gamma * lambda / c * a_out * rho;

    // Ambrosio–Tortorelli
    let ev = d.eps_v;
    let one_v = 1.0 - v;
    let gv2 = dot(gv, gv);
    let jump = one_v * one_v / (4.0 * ev);
    let e_inner = 2.0 * gamma * (ev * gv2 + jump);
    let penalized = d.inner == InnerAnchoring::Penalized;
    let (a_in, da_in_n, da_in_g) = if penalized { alignment(n, gv, d.eta) } else { (0.0, ZERO3, ZERO3) };
    let e_inner_anchor = 2.0 * gamma * lambda * a_in * jump;

    if want {
        let dwell = 2.0 * phi * (1.0 - phi) * (1.0 - 2.0 * phi);
        let anch = gamma * lambda / c;
        let inner_a = 2.0 * gamma * lambda;
        for i in 0..3 {
            p.n[i] = weight * dwn[i] + anch * rho * da_out_n[i] + inner_a * jump * da_in_n[i];
            for j in 0..3 {
                p.g[i][j] = weight * dwg[i][j];
            }
            p.gphi[i] = gamma / c * 2.0 * ep * gphi[i] + anch * (da_out_g[i] * rho + a_out * 2.0 * ep * gphi[i]);
            p.gv[i] = 4.0 * gamma * ev * gv[i] + inner_a * jump * da_in_g[i];
        }
        p.phi = 6.0 * phi * (1.0 - phi) * v * v * w + (gamma / c + anch * a_out) * dwell / ep;
        p.v = 2.0 * v * hphi * w - gamma * one_v / ev - inner_a * a_in * one_v / (2.0 * ev);
    }
    ([e_bulk, e_perim, e_anchor, e_inner, e_inner_anchor], p)
}

/// Director gradient, `∇φ` and `∇v` at one cell.
#[inline]
fn local_derivatives(st: &Stencils, state: &FieldState, c: usize, ijk: &[usize; 3]) -> (Mat3, Vec3, Vec3) {
    let mut g = ZERO33;
    let mut gphi = ZERO3;
    let mut gv = ZERO3;
    for axis in 0..3 {
        let dn = st.derivative_at(c, ijk, axis, |x| state.n.data[x]);
        for i in 0..3 {
            g[i][axis] = dn[i];
        }
        gphi[axis] = st.derivative_at(c, ijk, axis, |x| [state.phi.data[x]])[0];
        gv[axis] = st.derivative_at(c, ijk, axis, |x| [state.v.data[x]])[0];
    }
    (g, gphi, gv)
}

fn assemble(state: &FieldState, model: &Model, want: bool) -> (EnergyBreakdown, Option<Gradients>) {
    let grid = *state.grid();
    let st = Stencils::new(&grid);
    let cell = |c: usize| {
        let ijk = grid.ijk(c);
        let (g, gphi, gv) = local_derivatives(&st, state, c, &ijk);
        cell_terms(model, &state.n.data[c], &g, state.phi.data[c], &gphi, state.v.data[c], &gv, want)
    };
    let (energies, partials): (Vec<[f64; 5]>, Vec<CellPartials>) = if want {
        (0..grid.len()).into_par_iter().map(cell).unzip()
    } else {
        ((0..grid.len()).into_par_iter().map(|c| cell(c).0).collect(), Vec::new())
    };
    let dv = grid.cell_volume();
    let mut parts = [0.0; 5];
    let mut column = vec![0.0; grid.len()];
    for (t, part) in parts.iter_mut().enumerate() {
        column.par_iter_mut().zip(energies.par_iter()).for_each(|(x, e)| *x = e[t]);
        *part = pairwise_sum(&column) * dv;
    }
    let breakdown = EnergyBreakdown::from_parts(parts);
    if !want {
        return (breakdown, None);
    }

    let p = &partials;
    let grads: Vec<(Vec3, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let ijk = grid.ijk(c);
            let mut gn = p[c].n;
            let mut gphi = p[c].phi;
            let mut gv = p[c].v;
            for axis in 0..3 {
                let an = st.adjoint_at(c, &ijk, axis, |x| [p[x].g[0][axis], p[x].g[1][axis], p[x].g[2][axis]]);
                for i in 0..3 {
                    gn[i] += an[i];
                }
                gphi += st.adjoint_at(c, &ijk, axis, |x| [p[x].gphi[axis]])[0];
                gv += st.adjoint_at(c, &ijk, axis, |x| [p[x].gv[axis]])[0];
            }
            (gn, gphi, gv)
        })
        .collect();
    let gradients = Gradients {
        n: grads.iter().map(|g| g.0).collect(),
        phi: grads.iter().map(|g| g.1).collect(),
        v: grads.iter().map(|g| g.2).collect(),
    };
    (breakdown, Some(gradients))
}

pub fn total_energy(state: &FieldState, model: &Model) -> EnergyBreakdown {
    assemble(state, model, false).0
}

pub fn variational_gradients(state: &FieldState, model: &Model) -> (EnergyBreakdown, Gradients) {
    let (e, g) = assemble(state, model, true);
    (e, g.expect("gradients requested"))
}

/// `∫ h(φ) v² W(n, ∇n)`.
pub fn bulk_energy(state: &FieldState, k: &ElasticConstants) -> Result<f64> {
    k.check_admissible()?;
    let grid = state.grid();
    let st = Stencils::new(grid);
    let dens: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let (phi, v) = (state.phi.data[c], state.v.data[c]);
            let w = smooth_heaviside(phi) * v * v;
            if w == 0.0 {
                0.0
            } else {
                let (g, _, _) = local_derivatives(&st, state, c, &grid.ijk(c));
                w * crate::energy::frank_density_raw(k, &state.n.data[c], &g)
            }
        })
        .collect();
    Ok(pairwise_sum(&dens) * grid.cell_volume())
}

fn surface_only(state: &FieldState, s: &SurfaceParams, d: &DiffuseParams) -> EnergyBreakdown {
    // the bulk constants are irrelevant here; zero bulk weight is simplest
    let model = Model { elastic: ElasticConstants::one_constant(1.0), surface: *s, diffuse: *d };
    let mut e = total_energy(state, &model);
    e.e_total -= e.e_bulk;
    e.e_bulk = 0.0;
    e
}

/// Modica–Mortola perimeter energy `γ·P_ε(φ)`.
pub fn perimeter_energy(phi: &ScalarField, s: &SurfaceParams, d: &DiffuseParams) -> f64 {
    let grid = &phi.grid;
    let g = (0..3).map(|a| derivative(grid, &phi.data, 1, a)).collect::<Vec<_>>();
    let dens: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let p = phi.data[c];
            let g2 = g[0][c] * g[0][c] + g[1][c] * g[1][c] + g[2][c] * g[2][c];
            d.eps_phi * g2 + p * p * (1.0 - p) * (1.0 - p) / d.eps_phi
        })
        .collect();
    s.gamma / d.c_mm * pairwise_sum(&dens) * grid.cell_volume()
}

pub fn anchoring_outer(state: &FieldState, s: &SurfaceParams, d: &DiffuseParams) -> f64 {
    surface_only(state, s, d).e_anchor_outer
}

/// `(isotropic part, anchoring part)` of the inner-boundary energy.
pub fn inner_boundary_energy(state: &FieldState, s: &SurfaceParams, d: &DiffuseParams) -> (f64, f64) {
    let e = surface_only(state, s, d);
    (e.e_inner_isotropic, e.e_inner_anchor)
}

/// `(36π)^{1/3} |Ω|^{2/3} / P`, equal to one for a ball.
pub fn sphericity(phi: &ScalarField, d: &DiffuseParams) -> f64 {
    let unit = SurfaceParams { gamma: 1.0, lambda: 0.0 };
    let p = perimeter_energy(phi, &unit, d);
    (36.0 * PI).cbrt() * volume_of(phi).powf(2.0 / 3.0) / p
}

/// Semi-axes `sqrt(5⟨(x_i - x̄_i)²⟩)` of the `h(φ)`-weighted second moments
/// along the coordinate axes; exact for a sharp axis-aligned ellipsoid. A
/// diffuse profile inflates every axis by the same `O((ε/a)²)` factor.
pub fn moment_axes(phi: &ScalarField) -> Vec3 {
    let grid = phi.grid;
    let w: Vec<f64> = phi.data.iter().map(|&p| smooth_heaviside(p)).collect();
    let mass = pairwise_sum(&w);
    let mut axes = ZERO3;
    for (i, axis) in axes.iter_mut().enumerate() {
        let first: Vec<f64> = (0..grid.len()).map(|c| w[c] * grid.center(c)[i]).collect();
        let mean = pairwise_sum(&first) / mass;
        let second: Vec<f64> = (0..grid.len()).map(|c| w[c] * (grid.center(c)[i] - mean).powi(2)).collect();
        *axis = (5.0 * pairwise_sum(&second) / mass).sqrt();
    }
    axes
}

/// Isoperimetric lower bound `γ(1 + min(0,λ)) (36π)^{1/3} m^{2/3}`.
pub fn isoperimetric_bound(s: &SurfaceParams, volume: f64) -> f64 {
    s.gamma * (1.0 + s.lambda.min(0.0)) * (36.0 * PI).cbrt() * volume.powf(2.0 / 3.0)
}

/// Plain L² norm `sqrt(Σ|x|² dV)`.
pub fn l2_norm(values: &[f64], grid: &GridSpec) -> f64 {
    (values.iter().map(|x| x * x).sum::<f64>() * grid.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::VectorField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mm_constant_is_one_third() {
        assert!((modica_mortola_constant() - 1.0 / 3.0).abs() < 1e-12);
    }

    fn random_state(grid: GridSpec, seed: u64) -> FieldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = VectorField {
            grid,
            data: (0..grid.len())
                .map(|_| crate::grid::normalize_vec(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
                .collect(),
        };
        let phi = ScalarField { grid, data: (0..grid.len()).map(|_| rng.gen_range(0.05..0.95)).collect() };
        let v = ScalarField { grid, data: (0..grid.len()).map(|_| rng.gen_range(0.05..0.95)).collect() };
        FieldState { n, phi, v }
    }

    #[test]
    fn gradient_matches_directional_difference() {
        let grid = GridSpec::new([8, 9, 10], [1.0, 1.1, 1.2]).unwrap();
        let state = random_state(grid, 3);
        let model = Model::new(
            ElasticConstants::new(1.2, 0.8, 1.5, 0.4, 0.7),
            SurfaceParams::new(0.9, 0.6).unwrap(),
            DiffuseParams::new(0.3, 0.25, 1e-2, InnerAnchoring::Penalized).unwrap(),
        )
        .unwrap();
        let (e0, g) = variational_gradients(&state, &model);
        assert!((e0.e_total - total_energy(&state, &model).e_total).abs() < 1e-12 * e0.e_total.abs());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dn: Vec<Vec3> = (0..grid.len()).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let dp: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dvv: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let analytic = grid.cell_volume()
            * (0..grid.len())
                .map(|c| dot(&g.n[c], &dn[c]) + g.phi[c] * dp[c] + g.v[c] * dvv[c])
                .sum::<f64>();
        let shifted = |t: f64| {
            let mut s = state.clone();
            for c in 0..grid.len() {
                for i in 0..3 {
                    s.n.data[c][i] += t * dn[c][i];
                }
                s.phi.data[c] += t * dp[c];
                s.v.data[c] += t * dvv[c];
            }
            total_energy(&s, &model).e_total
        };
        let h = 1e-5;
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        assert!((fd - analytic).abs() < 1e-6 * analytic.abs().max(1.0), "{fd} vs {analytic}");
    }

    fn ball(radius: f64, director: VectorField) -> FieldState {
        let grid = director.grid;
        let eps = 2.0 * grid.max_spacing();
        FieldState::new(director, crate::init::smoothed_ball(grid, radius, [0.0; 3], eps), ScalarField::constant(grid, 1.0)).unwrap()
    }

    #[test]
    fn hedgehog_bulk_matches_4_pi_k_r() {
        let grid = GridSpec::cube(64, 2.0).unwrap();
        let n = crate::oracles::reference_field(&crate::oracles::FieldKind::Hedgehog { center: [0.0; 3] }, grid).unwrap().field;
        let e = bulk_energy(&ball(0.8, n), &ElasticConstants::one_constant(1.0)).unwrap();
        let exact = 4.0 * PI * 0.8;
        assert!((e / exact - 1.0).abs() < 0.05, "{e} vs {exact}");
    }

    #[test]
    fn uniform_twist_bulk_is_density_times_volume() {
        let grid = GridSpec::cube(64, 2.0).unwrap();
        let q = 2.0;
        let k = ElasticConstants::new(1.0, 0.7, 1.0, 0.3, q);
        let e = bulk_energy(&ball(0.8, VectorField::constant(grid, [0.0, 0.0, 1.0])), &k).unwrap();
        let exact = 0.5 * 0.7 * q * q * crate::init::ball_volume(0.8);
        assert!((e / exact - 1.0).abs() < 0.03, "{e} vs {exact}");
        assert_eq!(bulk_energy(&ball(0.8, VectorField::constant(grid, [0.0, 0.0, 1.0])), &k.with_q0(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn moment_axes_of_an_ellipsoid() {
        let grid = GridSpec::cube(64, 2.0).unwrap();
        let phi = crate::init::smoothed_ellipsoid(grid, [0.8, 0.5, 0.4], [0.0; 3], 2.0 * grid.max_spacing());
        let a = moment_axes(&phi);
        for (got, want) in a.iter().zip([0.8, 0.5, 0.4]) {
            assert!((got - want).abs() < 0.05 * want, "{a:?}");
        }
        assert!((a[0] / a[1] - 1.6).abs() < 0.01 && (a[1] / a[2] - 1.25).abs() < 0.01, "{a:?}");
    }

    #[test]
    fn wells_have_no_perimeter() {
        let grid = GridSpec::cube(8, 1.0).unwrap();
        let s = SurfaceParams::new(1.0, 0.0).unwrap();
        let d = DiffuseParams::new(0.25, 0.25, 1e-3, InnerAnchoring::IsotropicOnly).unwrap();
        assert_eq!(perimeter_energy(&ScalarField::constant(grid, 0.0), &s, &d), 0.0);
        assert_eq!(perimeter_energy(&ScalarField::constant(grid, 1.0), &s, &d), 0.0);
    }

    #[test]
    fn resolution_rule() {
        let grid = GridSpec::cube(16, 1.0).unwrap();
        let d = DiffuseParams::new(0.125, 0.125, 1e-3, InnerAnchoring::IsotropicOnly).unwrap();
        assert!(d.check_resolution(&grid).is_ok());
        assert!(d.with_widths(0.1, 0.125).check_resolution(&grid).is_err());
    }
}
