// Warm-started anchoring continuation towards tangential anchoring on a
// frozen droplet.

use lcdo::diffuse::{DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField, VectorField};
use lcdo::init::smoothed_ball;
use lcdo::io::csv;
use lcdo::optimizer::{tangential_continuation, Schedule};

pub fn run_example() -> lcdo::Result<()> {
    let grid = GridSpec::cube(20, 2.0)?;
    let eps = 2.0 * grid.max_spacing();
    let phi = smoothed_ball(grid, 0.6, [0.0; 3], eps);
    let state = FieldState::new(VectorField::constant(grid, [0.0, 0.0, 1.0]), phi, ScalarField::constant(grid, 1.0))?;
    let model = Model::new(
        ElasticConstants::one_constant(1.0),
        SurfaceParams::new(1.0, 0.0)?,
        DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly)?,
    )?;
    let schedule = Schedule { max_outer_iters: 150, update_phi: false, update_v: false, ..Schedule::default() };
    let target = state.volume();
    let (report, _) = tangential_continuation(state, target, &model, &schedule, &[1.0, 4.0, 16.0])?;
    print!("{}", csv::sweep(&report.rows));
    println!("monotone: {}, extrapolated limit {:.4}", report.is_monotone(), report.limit_estimate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
