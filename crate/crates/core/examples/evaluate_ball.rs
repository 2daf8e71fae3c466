// Diffuse energy breakdown of uniform and hedgehog directors on a smoothed
// ball, next to the sharp-interface closed forms.

use lcdo::diffuse::{total_energy, DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField};
use lcdo::init::smoothed_ball;
use lcdo::oracles::{ball_energy_closed_form, reference_field, FieldKind};

pub fn run_example() -> lcdo::Result<()> {
    let grid = GridSpec::cube(32, 2.0)?;
    let (radius, eps) = (0.6, 2.0 * grid.max_spacing());
    let k = ElasticConstants::one_constant(1.0);
    let s = SurfaceParams::new(1.0, 0.5)?;
    let model = Model::new(k, s, DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly)?)?;
    let phi = smoothed_ball(grid, radius, [0.0; 3], eps);
    for kind in [FieldKind::Uniform { axis: [0.0, 0.0, 1.0] }, FieldKind::Hedgehog { center: [0.0; 3] }] {
        let n = reference_field(&kind, grid)?.field;
        let state = FieldState::new(n, phi.clone(), ScalarField::constant(grid, 1.0))?;
        let e = total_energy(&state, &model);
        let exact = ball_energy_closed_form(&kind, radius, &k, &s)?;
        println!("{kind:?}\n{e}");
        println!("sharp: bulk {:.4}, surface {:.4}, total {:.4}\n", exact.bulk, exact.surface, exact.total);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
