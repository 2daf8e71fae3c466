//! Initial shapes and director fields.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::{normalize_vec, GridSpec, ScalarField, VectorField};
use crate::linalg::{dot, norm, sub, Vec3};
use crate::oracles::{reference_field, FieldKind};
use crate::Result;

/// Optimal Modica–Mortola profile of width `eps`, `1` inside.
#[inline]
pub fn mm_profile(signed_distance: f64, eps: f64) -> f64 {
    0.5 * (1.0 - (signed_distance / (2.0 * eps)).tanh())
}

/// Smoothed ball indicator.
///
/// The profile is laid out in the variable `(r³ - R³)/(3R²)`, which agrees
/// with the signed distance to first order at the sphere and makes `∫φ`
/// equal to the sharp ball volume up to the exponentially small tails.
pub fn smoothed_ball(grid: GridSpec, radius: f64, center: Vec3, eps: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        let r = norm(&sub(&x, &center));
        mm_profile((r.powi(3) - radius.powi(3)) / (3.0 * radius * radius), eps)
    })
}

/// Smoothed ellipsoid with semi-axes `(a, b, c)` along the coordinate axes;
/// same volume-preserving layout as [`smoothed_ball`].
pub fn smoothed_ellipsoid(grid: GridSpec, axes: Vec3, center: Vec3, eps: f64) -> ScalarField {
    let mean = (axes[0] * axes[1] * axes[2]).cbrt();
    ScalarField::from_fn(grid, |x| {
        let d = sub(&x, &center);
        let rho = norm(&[d[0] / axes[0], d[1] / axes[1], d[2] / axes[2]]);
        mm_profile((rho.powi(3) - 1.0) * mean / 3.0, eps)
    })
}

/// Seeded star-shaped blob of mean radius `radius` around the box center.
pub fn random_blob(grid: GridSpec, radius: f64, eps: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(Vec3, f64)> = (0..4)
        .map(|_| {
            let d: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
            (normalize_vec(&d), rng.gen_range(-0.15..0.15))
        })
        .collect();
    ScalarField::from_fn(grid, |x| {
        let r = norm(&x);
        let dir = if r > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { [0.0, 0.0, 1.0] };
        let bump: f64 = modes.iter().map(|(d, a)| a * (3.0 * dot(d, &dir) * dot(d, &dir) - 1.0)).sum();
        let local = radius * (1.0 + bump);
        mm_profile(r - local, eps)
    })
}

/// Ambrosio–Tortorelli optimal profile `1 - exp(-|d|/(2ε))` around a planar
/// sheet `x_axis = offset`, clipped to the disc `|x_⊥| <= disc_radius`
/// (`f64::INFINITY` for a full plane).
pub fn at_sheet(grid: GridSpec, axis: usize, offset: f64, disc_radius: f64, eps_v: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        let d = x[axis] - offset;
        let mut perp = x;
        perp[axis] = 0.0;
        let rho = norm(&perp);
        let dist = if rho <= disc_radius { d.abs() } else { norm(&[d, rho - disc_radius, 0.0]) };
        1.0 - (-dist / (2.0 * eps_v)).exp()
    })
}

/// How a director is seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectorInit {
    Uniform(Vec3),
    Hedgehog,
    Twist(f64),
    Random,
}

/// Builds the initial director; `random` draws are reproducible from `seed`.
pub fn director(grid: GridSpec, init: &DirectorInit, seed: u64) -> Result<VectorField> {
    Ok(match *init {
        DirectorInit::Uniform(axis) => reference_field(&FieldKind::Uniform { axis }, grid)?.field,
        DirectorInit::Hedgehog => reference_field(&FieldKind::Hedgehog { center: [0.0; 3] }, grid)?.field,
        DirectorInit::Twist(q) => reference_field(&FieldKind::Twist { q, axis: 2 }, grid)?.field,
        DirectorInit::Random => random_director(grid, seed),
    })
}

pub fn random_director(grid: GridSpec, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.len())
        .map(|_| normalize_vec(&[rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]))
        .collect();
    VectorField { grid, data }
}

/// Adds seeded Gaussian noise of size `amplitude` and renormalizes.
pub fn perturb_director(n: &VectorField, amplitude: f64, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = n
        .data
        .iter()
        .map(|x| {
            let d: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
            normalize_vec(&[x[0] + amplitude * d[0], x[1] + amplitude * d[1], x[2] + amplitude * d[2]])
        })
        .collect();
    VectorField { grid: n.grid, data }
}

pub fn ball_volume(radius: f64) -> f64 {
    4.0 * PI * radius.powi(3) / 3.0
}
