use std::f64::consts::PI;

use lcdo::diffuse::{total_energy, DiffuseParams, InnerAnchoring, Model};
use lcdo::energy::{ElasticConstants, SurfaceParams};
use lcdo::grid::{FieldState, GridSpec, ScalarField, VectorField};
use lcdo::init::perturb_director;
use lcdo::optimizer::{at_step, minimize_director_only, Mode, Schedule, StepStatus};

/// Mean of `n·curl n` over cells at least two away from every face.
fn mean_twist(n: &VectorField) -> f64 {
    let g = n.grid;
    let [nx, ny, nz] = g.dims;
    let h = g.spacing();
    let d = |c: usize, ax: usize, i: usize, j: usize, k: usize| {
        let (mut lo, mut hi) = ([i, j, k], [i, j, k]);
        lo[ax] -= 1;
        hi[ax] += 1;
        (n.data[g.index(hi[0], hi[1], hi[2])][c] - n.data[g.index(lo[0], lo[1], lo[2])][c]) / (2.0 * h[ax])
    };
    let (mut sum, mut count) = (0.0, 0.0);
    for k in 2..nz - 2 {
        for j in 2..ny - 2 {
            for i in 2..nx - 2 {
                let m = n.data[g.index(i, j, k)];
                let curl = [d(2, 1, i, j, k) - d(1, 2, i, j, k), d(0, 2, i, j, k) - d(2, 0, i, j, k), d(1, 0, i, j, k) - d(0, 1, i, j, k)];
                sum += m[0] * curl[0] + m[1] * curl[1] + m[2] * curl[2];
                count += 1.0;
            }
        }
    }
    sum / count
}

#[test]
fn cholesteric_slab_relaxes_to_its_natural_twist() {
    let q0 = PI;
    let grid = GridSpec::new([8, 8, 40], [0.4, 0.4, 2.0]).unwrap();
    let n = perturb_director(&VectorField::constant(grid, [1.0, 0.0, 0.0]), 0.3, 11);
    let state = FieldState::new(n, ScalarField::constant(grid, 1.0), ScalarField::constant(grid, 1.0)).unwrap();
    let eps = 2.0 * grid.max_spacing();
    // weak saddle-splay, so the free faces do not favour double twist
    let k = ElasticConstants { k24: 0.01, q0, ..ElasticConstants::one_constant(1.0) };
    let model = Model::new(k, SurfaceParams::new(1.0, 0.0).unwrap(), DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).unwrap()).unwrap();
    let schedule = Schedule { max_outer_iters: 20_000, tol_rel_energy: 1e-10, update_v: false, mode: Mode::Box, eps_ladder: vec![1.0], rung_iters: vec![20_000], ..Schedule::default() };
    let before = mean_twist(&state.n);
    let (report, relaxed) = minimize_director_only(state, &model, &schedule).unwrap();
    let after = mean_twist(&relaxed.n);
    assert!((before + q0).abs() / q0 > 0.5, "start {before}");
    assert!((after + q0).abs() / q0 < 0.1, "n·curl n = {after} after {} iterations, target {}", report.trace.len(), -q0);
}

#[test]
fn inner_boundary_opens_only_along_the_jump() {
    let grid = GridSpec::cube(32, 2.0).unwrap();
    let eps = 2.0 * grid.max_spacing();
    let n = VectorField::from_fn(grid, |x| if x[2] < 0.0 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] });
    let mut state = FieldState::new(n, ScalarField::constant(grid, 1.0), ScalarField::constant(grid, 1.0)).unwrap();
    let model = Model::new(
        ElasticConstants::one_constant(1.0),
        SurfaceParams::new(0.2, 0.0).unwrap(),
        DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).unwrap(),
    )
    .unwrap();
    let e0 = total_energy(&state, &model).e_total;
    let mut tau = 1e-2;
    for _ in 0..400 {
        match at_step(&mut state, &model, tau, 0.5).unwrap().status {
            StepStatus::Accepted { tau: t } => tau = 1.2 * t,
            StepStatus::Unchanged => {}
            StepStatus::Stalled => break,
        }
    }
    assert!(total_energy(&state, &model).e_total < e0);
    let (vmin, _) = state.v.min_max();
    assert!(vmin < 0.2, "min v = {vmin}");
    for idx in 0..grid.len() {
        let z = grid.center(idx)[2].abs();
        let v = state.v.data[idx];
        if v < 0.5 {
            assert!(z < 2.0 * eps, "v = {v} at |z| = {z}");
        }
        // the optimal profile decays like exp(-|z| / 2ε)
        if z > 6.0 * eps {
            assert!(v > 0.9, "v = {v} at |z| = {z}");
        }
    }
}

#[test]
fn uniform_director_closes_the_inner_boundary() {
    let grid = GridSpec::cube(12, 2.0).unwrap();
    let eps = 2.0 * grid.max_spacing();
    let v = ScalarField::from_fn(grid, |x| 0.3 + 0.2 * (3.0 * x[0]).sin());
    let mut state = FieldState::new(VectorField::constant(grid, [0.0, 0.0, 1.0]), ScalarField::constant(grid, 1.0), v).unwrap();
    let model = Model::new(
        ElasticConstants::one_constant(1.0),
        SurfaceParams::new(1.0, 0.0).unwrap(),
        DiffuseParams::new(eps, eps, 1e-3, InnerAnchoring::IsotropicOnly).unwrap(),
    )
    .unwrap();
    let mut tau = 1e-3;
    for _ in 0..2000 {
        match at_step(&mut state, &model, tau, 0.5).unwrap().status {
            StepStatus::Accepted { tau: t } => tau = 1.2 * t,
            StepStatus::Unchanged => {}
            StepStatus::Stalled => break,
        }
    }
    let (vmin, _) = state.v.min_max();
    assert!(vmin > 0.95, "min v = {vmin}");
}
