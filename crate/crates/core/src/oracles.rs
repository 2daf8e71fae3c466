//! Closed-form reference fields and droplet energies, and an independent
//! quadrature integrator used to certify them.
//!
//! Nothing here depends on the diffuse assembly or the optimizer.

use std::f64::consts::PI;

use crate::energy::{ElasticConstants, SurfaceParams};
use crate::grid::{GridSpec, VectorField};
use crate::linalg::{norm, scale, sub, Vec3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    Uniform { axis: Vec3 },
    Hedgehog { center: Vec3 },
    /// Helix `(cos qz, sin qz, 0)` rotating about coordinate `axis`.
    Twist { q: f64, axis: usize },
    /// Tangential two-pole field `(x-p₊)/|x-p₊|² - (x-p₋)/|x-p₋|²`, tangent to
    /// every sphere through both poles when they are antipodal.
    Bipolar { poles: [Vec3; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceField {
    pub field: VectorField,
    /// Cells whose center sits on a singular point; their vectors are set to
    /// the fallback axis.
    pub singular: Vec<usize>,
}

const SINGULAR_RADIUS: f64 = 1e-12;

pub fn reference_field(kind: &FieldKind, grid: GridSpec) -> Result<ReferenceField> {
    let mut singular = Vec::new();
    let mut data = Vec::with_capacity(grid.len());
    match kind {
        FieldKind::Uniform { axis } => {
            let l = norm(axis);
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Argument("uniform axis must be a nonzero vector".into()));
            }
            data.resize(grid.len(), scale(axis, 1.0 / l));
        }
        FieldKind::Twist { q, axis } => {
            if *axis > 2 || !q.is_finite() {
                return Err(Error::Argument(format!("invalid twist parameters q={q}, axis={axis}")));
            }
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            for idx in 0..grid.len() {
                let x = grid.center(idx);
                let t = q * x[*axis];
                let mut n = [0.0; 3];
                n[a] = t.cos();
                n[b] = t.sin();
                data.push(n);
            }
        }
        FieldKind::Hedgehog { center } => {
            for idx in 0..grid.len() {
                let d = sub(&grid.center(idx), center);
                let r = norm(&d);
                if r < SINGULAR_RADIUS {
                    singular.push(idx);
                    data.push(crate::grid::FALLBACK_AXIS);
                } else {
                    data.push(scale(&d, 1.0 / r));
                }
            }
        }
        FieldKind::Bipolar { poles } => {
            if norm(&sub(&poles[0], &poles[1])) == 0.0 {
                return Err(Error::Argument("bipolar poles must differ".into()));
            }
            for idx in 0..grid.len() {
                let x = grid.center(idx);
                let a = sub(&x, &poles[0]);
                let b = sub(&x, &poles[1]);
                let (ra, rb) = (norm(&a), norm(&b));
                if ra < SINGULAR_RADIUS || rb < SINGULAR_RADIUS {
                    singular.push(idx);
                    data.push(crate::grid::FALLBACK_AXIS);
                    continue;
                }
                let f = sub(&scale(&a, 1.0 / (ra * ra)), &scale(&b, 1.0 / (rb * rb)));
                let l = norm(&f);
                if l < SINGULAR_RADIUS {
                    singular.push(idx);
                    data.push(crate::grid::FALLBACK_AXIS);
                } else {
                    data.push(scale(&f, 1.0 / l));
                }
            }
        }
    }
    Ok(ReferenceField { field: VectorField { grid, data }, singular })
}

/// Bulk and surface energy of a closed-form director on a ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEnergy {
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
}

/// Exact energy of the uniform or hedgehog director on a sharp ball.
///
/// Uniform: bulk `½k22q0²|B|`, surface `4πγR²(1+λ/3)` (the mean of `(e·ν)²`
/// over the sphere is `1/3`). Hedgehog: bulk `(2k11-k24)4πR + ½k22q0²|B|`,
/// surface `4πγR²(1+λ)`.
pub fn ball_energy_closed_form(ansatz: &FieldKind, radius: f64, k: &ElasticConstants, s: &SurfaceParams) -> Result<BallEnergy> {
    if !(radius > 0.0) {
        return Err(Error::Argument(format!("radius must be positive, got {radius}")));
    }
    let volume = 4.0 * PI * radius.powi(3) / 3.0;
    let area = 4.0 * PI * radius * radius;
    let twist = 0.5 * k.k22 * k.q0 * k.q0 * volume;
    let (bulk, surface) = match ansatz {
        FieldKind::Uniform { .. } => (twist, s.gamma * area * (1.0 + s.lambda / 3.0)),
        FieldKind::Hedgehog { .. } => ((2.0 * k.k11 - k.k24) * 4.0 * PI * radius + twist, s.gamma * area * (1.0 + s.lambda)),
        other => return Err(Error::Argument(format!("no closed-form ball energy for {other:?}"))),
    };
    Ok(BallEnergy { bulk, surface, total: bulk + surface })
}

/// Radius at which the one-constant uniform and hedgehog ball energies cross,
/// `3k/(2γ|λ|)`; only homeotropic-favoring anchoring (`λ < 0`) has one.
pub fn crossover_radius(k: f64, gamma: f64, lambda: f64) -> Result<f64> {
    if !(lambda < 0.0) {
        return Err(Error::Argument(format!("no crossover for lambda = {lambda} >= 0")));
    }
    if !(k > 0.0 && gamma > 0.0) {
        return Err(Error::Argument("k and gamma must be positive".into()));
    }
    Ok(3.0 * k / (2.0 * gamma * lambda.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Interval { a: f64, b: f64 },
    /// Solid ball about the origin; integrand in Cartesian coordinates.
    Ball { radius: f64 },
    /// Sphere about the origin; the integrand receives the point on the sphere.
    Sphere { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    /// Raw rule values, one per ladder rung.
    pub values: Vec<f64>,
    /// Observed order from the last three rungs (`∞` when they agree exactly).
    pub order: f64,
    /// Richardson-extrapolated value.
    pub value: f64,
}

fn midpoint_rule(f: &dyn Fn(Vec3) -> f64, region: &Region, n: usize) -> f64 {
    match *region {
        Region::Interval { a, b } => {
            let h = (b - a) / n as f64;
            (0..n).map(|i| f([a + (i as f64 + 0.5) * h, 0.0, 0.0])).sum::<f64>() * h
        }
        Region::Sphere { radius } => {
            let (nt, np) = (n, 2 * n);
            let (ht, hp) = (PI / nt as f64, 2.0 * PI / np as f64);
            let mut acc = 0.0;
            for i in 0..nt {
                let t = (i as f64 + 0.5) * ht;
                let (st, ct) = t.sin_cos();
                let mut ring = 0.0;
                for j in 0..np {
                    let p = j as f64 * hp;
                    let (sp, cp) = p.sin_cos();
                    ring += f([radius * st * cp, radius * st * sp, radius * ct]);
                }
                acc += ring * st;
            }
            acc * ht * hp * radius * radius
        }
        Region::Ball { radius } => {
            let hr = radius / n as f64;
            (0..n)
                .map(|i| {
                    let r = (i as f64 + 0.5) * hr;
                    let shell = midpoint_rule(f, &Region::Sphere { radius: r }, n);
                    shell * hr
                })
                .sum()
        }
    }
}

/// Midpoint-rule integral over `region` along a resolution ladder, with the
/// Richardson order estimate. Fails when the ladder does not converge at
/// order at least one.
pub fn quadrature_oracle(f: &dyn Fn(Vec3) -> f64, region: &Region, ladder: &[usize]) -> Result<QuadratureReport> {
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Argument("ladder needs at least three rungs, each doubling the previous".into()));
    }
    let values: Vec<f64> = ladder.iter().map(|&n| midpoint_rule(f, region, n)).collect();
    let k = values.len();
    let (a, b, c) = (values[k - 3], values[k - 2], values[k - 1]);
    let (d1, d2) = ((b - a).abs(), (c - b).abs());
    let floor = 1e-13 * c.abs().max(1.0);
    let (order, value) = if d2 <= floor && d1 <= floor {
        (f64::INFINITY, c)
    } else if d2 <= floor {
        (f64::INFINITY, c)
    } else {
        let p = (d1 / d2).log2();
        (p, c + (c - b) / (2f64.powf(p) - 1.0))
    };
    if order < 1.0 {
        return Err(Error::Consistency(format!("quadrature ladder not converging: order {order:.3}, values {values:?}")));
    }
    Ok(QuadratureReport { values, order, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    #[test]
    fn reference_fields() {
        let grid = GridSpec::cube(9, 1.0).unwrap();
        let u = reference_field(&FieldKind::Uniform { axis: [0.0, 0.0, 2.0] }, grid).unwrap();
        assert!(u.field.data.iter().all(|n| *n == [0.0, 0.0, 1.0]));
        // odd grid: a cell center sits on the origin
        let h = reference_field(&FieldKind::Hedgehog { center: [0.0; 3] }, grid).unwrap();
        assert_eq!(h.singular, vec![grid.index(4, 4, 4)]);
        let even = GridSpec::cube(10, 1.0).unwrap();
        assert!(reference_field(&FieldKind::Hedgehog { center: [0.0; 3] }, even).unwrap().singular.is_empty());
        // off-node center on an odd grid
        assert!(reference_field(&FieldKind::Hedgehog { center: [0.01, 0.0, 0.0] }, grid).unwrap().singular.is_empty());
    }

    #[test]
    fn bipolar_is_tangent_to_the_pole_sphere() {
        let grid = GridSpec::cube(16, 2.0).unwrap();
        let r = 0.7;
        let b = reference_field(&FieldKind::Bipolar { poles: [[0.0, 0.0, r], [0.0, 0.0, -r]] }, grid).unwrap();
        // check on exact sphere points rather than cell centers
        let pole = [[0.0, 0.0, r], [0.0, 0.0, -r]];
        for (t, p) in [(0.4f64, 0.3f64), (1.2, 2.0), (2.5, -1.0)] {
            let x = [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()];
            let a = sub(&x, &pole[0]);
            let c = sub(&x, &pole[1]);
            let f = sub(&scale(&a, 1.0 / dot(&a, &a)), &scale(&c, 1.0 / dot(&c, &c)));
            assert!(dot(&f, &x).abs() < 1e-12);
        }
        assert!(b.singular.is_empty());
    }

    #[test]
    fn twist_has_constant_twist_in_closed_form() {
        // n = (cos qz, sin qz, 0): curl n = -q n, so n·curl n = -q
        let q = 3.0f64;
        for z in [0.0f64, 0.4, 1.3] {
            let n: Vec3 = [(q * z).cos(), (q * z).sin(), 0.0];
            let curl = [-q * (q * z).cos(), -q * (q * z).sin(), 0.0];
            assert!((dot(&n, &curl) + q).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_forms() {
        let s = SurfaceParams::new(1.0, 0.0).unwrap();
        let k = ElasticConstants::one_constant(1.0);
        let u = ball_energy_closed_form(&FieldKind::Uniform { axis: [0.0, 0.0, 1.0] }, 1.0, &k, &s).unwrap();
        assert!((u.total - 4.0 * PI).abs() < 1e-14);
        let h = ball_energy_closed_form(&FieldKind::Hedgehog { center: [0.0; 3] }, 1.0, &k, &s).unwrap();
        assert!((h.total - 8.0 * PI).abs() < 1e-13);
        let s = SurfaceParams::new(2.0, 0.9).unwrap();
        let u = ball_energy_closed_form(&FieldKind::Uniform { axis: [0.0, 0.0, 1.0] }, 0.5, &k, &s).unwrap();
        assert!((u.surface - 2.0 * PI * 1.3).abs() < 1e-13);
        assert!(ball_energy_closed_form(&FieldKind::Twist { q: 1.0, axis: 2 }, 1.0, &k, &s).is_err());
    }

    #[test]
    fn crossover() {
        assert!((crossover_radius(1.0, 1.0, -0.5).unwrap() - 3.0).abs() < 1e-15);
        assert!((crossover_radius(2.0, 1.0, -0.5).unwrap() - 6.0).abs() < 1e-15);
        assert!(crossover_radius(1.0, 1.0, 0.0).is_err());
        let r = crossover_radius(1.0, 1.0, -0.5).unwrap();
        let k = ElasticConstants::one_constant(1.0);
        let s = SurfaceParams::new(1.0, -0.5).unwrap();
        let u = ball_energy_closed_form(&FieldKind::Uniform { axis: [0.0, 0.0, 1.0] }, r, &k, &s).unwrap();
        let h = ball_energy_closed_form(&FieldKind::Hedgehog { center: [0.0; 3] }, r, &k, &s).unwrap();
        assert!((u.total - h.total).abs() / u.total < 1e-12);
    }

    #[test]
    fn quadrature_certifies_the_closed_forms() {
        let e3_mean = quadrature_oracle(&|x: Vec3| (x[2] / norm(&x)).powi(2), &Region::Sphere { radius: 1.0 }, &[128, 256, 512]).unwrap();
        assert!((e3_mean.value / (4.0 * PI) - 1.0 / 3.0).abs() < 1e-6);
        let inv_r2 = quadrature_oracle(&|x: Vec3| 1.0 / dot(&x, &x), &Region::Ball { radius: 1.0 }, &[16, 32, 64]).unwrap();
        assert!((inv_r2.value - 4.0 * PI).abs() < 1e-4);
        let vol = quadrature_oracle(&|_| 1.0, &Region::Ball { radius: 1.0 }, &[16, 32, 64]).unwrap();
        assert!((vol.value - 4.0 * PI / 3.0).abs() < 1e-6);
        assert!(vol.order > 1.9);
        assert!(quadrature_oracle(&|_| 1.0, &Region::Ball { radius: 1.0 }, &[16, 32]).is_err());
    }

    #[test]
    fn quadrature_rejects_non_convergent_ladders() {
        // 1/sqrt(x) on (0,1] converges at order 1/2 under the midpoint rule
        let r = quadrature_oracle(&|x: Vec3| 1.0 / x[0].sqrt(), &Region::Interval { a: 0.0, b: 1.0 }, &[64, 128, 256]);
        assert!(r.is_err());
    }
}
