// Volume-constrained shape flow of an elongated droplet under pure
// surface tension.

use lcdo::diffuse::{isoperimetric_bound, moment_axes, DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField, VectorField};
use lcdo::init::smoothed_ellipsoid;
use lcdo::optimizer::{minimize_full, Schedule};

pub fn run_example() -> lcdo::Result<()> {
    let grid = GridSpec::cube(24, 2.0)?;
    let eps = 2.0 * grid.max_spacing();
    let axes = [0.8, 0.55, 0.55];
    let phi = smoothed_ellipsoid(grid, axes, [0.0; 3], 1.5 * eps);
    let state = FieldState::new(VectorField::constant(grid, [0.0, 0.0, 1.0]), phi, ScalarField::constant(grid, 1.0))?;
    let target = 4.0 / 3.0 * std::f64::consts::PI * axes[0] * axes[1] * axes[2];
    let surface = SurfaceParams::new(1.0, 0.0)?;
    let model = Model::new(ElasticConstants::one_constant(1.0), surface, DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly)?)?;
    let schedule = Schedule {
        eps_ladder: vec![1.5, 1.0],
        rung_iters: vec![60, 200],
        max_outer_iters: 260,
        update_v: false,
        ..Schedule::default()
    };
    let aspect = |s: &FieldState| {
        let a = moment_axes(&s.phi);
        a[0] / a[1]
    };
    let before = aspect(&state);
    let (report, state) = minimize_full(state, target, &model, &schedule)?;
    let after = aspect(&state);
    println!("aspect ratio {before:.3} -> {after:.3} after {} iterations ({})", report.trace.len(), report.termination.as_str());
    println!("energy {:.4}, isoperimetric bound {:.4}", report.final_energy().e_total, isoperimetric_bound(&surface, target));
    println!("volume {:.6} (target {target:.6})", state.volume());
    assert!(after < before);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
