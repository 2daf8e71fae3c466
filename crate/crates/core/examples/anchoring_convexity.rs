// Rapini–Papoular anchoring and the convexity of its one-homogeneous
// extension in the normal variable.

use lcdo::energy::{g_hat, rapini_papoular, SurfaceParams};
use lcdo::validate::{convexity_witness, midpoint_defect, WitnessFamily, CONVEX_LAMBDAS};

pub fn run_example() -> lcdo::Result<()> {
    let s = SurfaceParams::new(1.0, 0.5)?;
    let e1 = [1.0, 0.0, 0.0];
    let e2 = [0.0, 1.0, 0.0];
    println!("homeotropic cost {}, planar cost {}", rapini_papoular(&s, &e1, &e1)?, rapini_papoular(&s, &e1, &e2)?);
    println!("g_hat is one-homogeneous: {} = 2 × {}", g_hat(&s, &e1, &[2.0, 0.0, 0.0]), g_hat(&s, &e1, &e1));

    for lambda in CONVEX_LAMBDAS {
        let d = midpoint_defect(&SurfaceParams::new(1.0, lambda)?, 20_000, 7);
        println!("λ = {lambda:>5}: worst midpoint defect {d:.2e}");
        assert!(d <= 1e-12);
    }
    for (lambda, family) in [(1.5, WitnessFamily::AlongV), (-0.8, WitnessFamily::AcrossV)] {
        let s = SurfaceParams::new(1.0, lambda)?;
        println!("λ = {lambda}: convexity-safe {}", s.convexity_safe());
        let w = convexity_witness(&s, family, 10_000, 7).expect("a witness exists outside [-1/2, 1]");
        println!("  witness p = {:.3?}, q = {:.3?}, defect {:.3e}", w.p, w.q, w.defect);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
