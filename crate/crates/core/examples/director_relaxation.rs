// Director-only relaxation of a random field inside a fixed ball.

use lcdo::diffuse::{DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField};
use lcdo::init::{random_director, smoothed_ball};
use lcdo::optimizer::{minimize_director_only, Schedule};

pub fn run_example() -> lcdo::Result<()> {
    let grid = GridSpec::cube(20, 2.0)?;
    let eps = 2.0 * grid.max_spacing();
    let state = FieldState::new(random_director(grid, 1), smoothed_ball(grid, 0.6, [0.0; 3], eps), ScalarField::constant(grid, 1.0))?;
    let model = Model::new(
        ElasticConstants::one_constant(1.0),
        SurfaceParams::new(1.0, 0.0)?,
        DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly)?,
    )?;
    let schedule = Schedule { max_outer_iters: 100, ..Schedule::default() };
    let (report, _) = minimize_director_only(state, &model, &schedule)?;
    let first = report.initial.e_total;
    let last = report.final_energy().e_total;
    println!("bulk + surface: {first:.4} -> {last:.4} in {} iterations ({})", report.trace.len(), report.termination.as_str());
    assert!(last < first);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
