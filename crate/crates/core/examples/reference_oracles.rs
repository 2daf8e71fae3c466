// Closed-form droplet energies and the quadrature oracle that certifies them.

use std::f64::consts::PI;

use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::oracles::{ball_energy_closed_form, crossover_radius, quadrature_oracle, FieldKind, Region};

pub fn run_example() -> lcdo::Result<()> {
    let k = ElasticConstants::one_constant(1.0);
    let s = SurfaceParams::new(1.0, -0.5)?;
    let uniform = FieldKind::Uniform { axis: [0.0, 0.0, 1.0] };
    let hedgehog = FieldKind::Hedgehog { center: [0.0; 3] };
    let r_star = crossover_radius(1.0, 1.0, -0.5)?;
    println!("crossover radius R* = {r_star}");
    for r in [0.75, r_star, 12.0] {
        let eu = ball_energy_closed_form(&uniform, r, &k, &s)?.total;
        let eh = ball_energy_closed_form(&hedgehog, r, &k, &s)?.total;
        println!("R = {r:>5}: uniform {eu:>10.4}, hedgehog {eh:>10.4}");
    }

    let mean = quadrature_oracle(&|x| x[2] * x[2], &Region::Sphere { radius: 1.0 }, &[32, 64, 128])?;
    println!("sphere mean of (e3·ν)²: {:.9} (order {:.2})", mean.value / (4.0 * PI), mean.order);
    let bulk = quadrature_oracle(&|x| 1.0 / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), &Region::Ball { radius: 1.0 }, &[8, 16, 32])?;
    println!("hedgehog bulk ∫(k/2)(2/r²) on the unit ball: {:.9} vs 4π = {:.9}", bulk.value, 4.0 * PI);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
