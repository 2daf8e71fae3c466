// Pointwise Frank–Oseen density, its one-constant reduction and the
// Ericksen admissibility check.

use lcdo::energy::{frank_density, one_constant_density, validate_ericksen, ElasticConstants, PointDirector};
use lcdo::linalg::ZERO33;
use lcdo::validate::hedgehog_point;

pub fn run_example() -> lcdo::Result<()> {
    let k = ElasticConstants::new(1.0, 1.0, 1.0, 0.5, 0.0);
    println!("K = {k:?}: {:?}", validate_ericksen(&k)?);

    // hedgehog x/|x| at r = 2: (2k11 - k24)/r² = 0.375
    let x = [2.0 / 3f64.sqrt(); 3];
    let (n, g) = hedgehog_point(&x);
    let p = PointDirector::new(n, g)?;
    let w = frank_density(&k, &p);
    println!("hedgehog at r = 2: W = {w}");
    assert!((w - 0.375).abs() < 1e-12);

    // twist (cos qz, sin qz, 0) with q = 2: one-constant density (k/2)|G|² = 2
    let (q, z) = (2.0f64, 0.3f64);
    let mut g = ZERO33;
    g[0][2] = -q * (q * z).sin();
    g[1][2] = q * (q * z).cos();
    let p = PointDirector::new([(q * z).cos(), (q * z).sin(), 0.0], g)?;
    let one = ElasticConstants::one_constant(1.0);
    println!("twist q = 2: (k/2)|G|² = {}, full density = {}", one_constant_density(1.0, &p)?, frank_density(&one, &p));

    let bad = ElasticConstants::new(1.0, 1.0, 1.0, 1.5, 0.0);
    println!("K24 > K11: {:?}", validate_ericksen(&bad)?);
    assert!(bad.check_admissible().is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
