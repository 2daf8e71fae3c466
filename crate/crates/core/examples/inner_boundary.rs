// An Ambrosio–Tortorelli inner boundary opening along a frozen director jump.

use lcdo::diffuse::{total_energy, DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField, VectorField};
use lcdo::optimizer::{at_step, StepStatus};

pub fn run_example() -> lcdo::Result<()> {
    let grid = GridSpec::cube(16, 2.0)?;
    let eps = 2.0 * grid.max_spacing();
    // director turns by 90° across the plane z = 0
    let n = VectorField::from_fn(grid, |x| if x[2] < 0.0 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] });
    let mut state = FieldState::new(n, ScalarField::constant(grid, 1.0), ScalarField::constant(grid, 1.0))?;
    let model = Model::new(
        ElasticConstants::one_constant(1.0),
        SurfaceParams::new(0.2, 0.0)?,
        DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly)?,
    )?;
    let e0 = total_energy(&state, &model);
    let mut tau = 1e-2;
    for _ in 0..400 {
        match at_step(&mut state, &model, tau, 0.5)?.status {
            StepStatus::Accepted { tau: t } => tau = 1.2 * t,
            StepStatus::Unchanged => {}
            StepStatus::Stalled => break,
        }
    }
    let e1 = total_energy(&state, &model);
    let (vmin, _) = state.v.min_max();
    println!("bulk {:.4} -> {:.4}, inner boundary {:.4} -> {:.4}", e0.e_bulk, e1.e_bulk, e0.e_inner_isotropic, e1.e_inner_isotropic);
    println!("min v = {vmin:.3}");
    assert!(vmin < 0.2);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
