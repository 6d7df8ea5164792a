use std::f64::consts::PI;

use proptest::prelude::*;
use rcd_core::gas::{mat_mul, rotation_pair, Mat4};
use rcd_core::grid::BoundaryCondition;
use rcd_core::solver::{llf_flux_angle, tvd_rk3};
use rcd_core::weno::{reconstruct_cell, weno_scalar, ReconstructionStats, GAUSS_OFFSET};
use rcd_core::*;

fn gas() -> GasModel {
    GasModel::default()
}

fn primitive() -> impl Strategy<Value = Primitive> {
    (0.1..10.0f64, -5.0..5.0f64, -5.0..5.0f64, 0.1..100.0f64).prop_map(|(r, u, v, p)| Primitive::new(r, u, v, p))
}

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn scale(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn flat(m: &Mat4) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

fn with_lambda(right: &Mat4, lambdas: &[f64; 4], left: &Mat4) -> Mat4 {
    let mut rl = *right;
    for row in rl.iter_mut() {
        for (k, x) in row.iter_mut().enumerate() {
            *x *= lambdas[k];
        }
    }
    mat_mul(&rl, left)
}

fn modes() -> [DecompositionMode; 6] {
    [
        DecompositionMode::Ncd,
        DecompositionMode::Scd,
        DecompositionMode::Rcd,
        DecompositionMode::FixedAngle(0.0),
        DecompositionMode::FixedAngle(PI / 2.0),
        DecompositionMode::FixedAngle(0.7),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn primitive_round_trip(w in primitive()) {
        let g = gas();
        let back = g.primitive_from_conserved(&g.conserved_from_primitive(&w)).unwrap();
        let (a, b) = ([w.rho, w.u, w.v, w.p], [back.rho, back.u, back.v, back.p]);
        prop_assert!(max_diff(&a, &b) <= 1e-14 * scale(&a), "{a:?} vs {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rotational_invariance(w in primitive(), theta in angle()) {
        let g = gas();
        let q = g.conserved_from_primitive(&w);
        let direct = g.rotated_flux(&q, theta).unwrap();
        let rotated = g.rotated_flux_via_rotation(&q, theta).unwrap();
        prop_assert!(max_diff(&direct.0, &rotated.0) <= 1e-13 * scale(&direct.0));
    }

    #[test]
    fn eigenvectors_invert(w in primitive(), theta in angle()) {
        let g = gas();
        let e = g.eigensystem(&g.conserved_from_primitive(&w), theta).unwrap();
        let id = mat_mul(&e.right, &e.left);
        for (r, row) in id.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                let want = if r == c { 1.0 } else { 0.0 };
                prop_assert!((x - want).abs() <= 1e-12, "({r},{c}) = {x}");
            }
        }
    }

    #[test]
    fn eigenvalues_ordered(w in primitive(), theta in angle()) {
        let g = gas();
        let q = g.conserved_from_primitive(&w);
        let e = g.eigensystem(&q, theta).unwrap();
        let qn = w.u * theta.cos() + w.v * theta.sin();
        let a = g.sound_speed(&w);
        let want = [qn - a, qn, qn, qn + a];
        prop_assert!(max_diff(&e.lambdas, &want) <= 1e-13 * scale(&want));
        let s = g.max_signal_speed(&q, theta).unwrap();
        prop_assert!(e.lambdas.iter().all(|l| l.abs() <= s * (1.0 + 1e-15)));
    }

    #[test]
    fn eigen_decomposition_matches_analytic_jacobian(w in primitive(), theta in angle()) {
        let g = gas();
        let q = g.conserved_from_primitive(&w);
        let e = g.eigensystem(&q, theta).unwrap();
        let a = flat(&g.rotated_flux_jacobian(&q, theta).unwrap());
        let b = flat(&with_lambda(&e.right, &e.lambdas, &e.left));
        prop_assert!(max_diff(&a, &b) <= 1e-10 * scale(&a));
    }

    #[test]
    fn eigen_decomposition_matches_finite_differences(w in primitive(), theta in angle()) {
        let g = gas();
        let q = g.conserved_from_primitive(&w);
        let e = g.eigensystem(&q, theta).unwrap();
        let h = 1e-6 * scale(&q.0);
        let mut fd = [[0.0; 4]; 4];
        for c in 0..4 {
            let (mut up, mut dn) = (q, q);
            up.0[c] += h;
            dn.0[c] -= h;
            let (fu, fdn) = (g.rotated_flux(&up, theta).unwrap(), g.rotated_flux(&dn, theta).unwrap());
            for r in 0..4 {
                fd[r][c] = (fu[r] - fdn[r]) / (2.0 * h);
            }
        }
        let a = flat(&fd);
        let b = flat(&with_lambda(&e.right, &e.lambdas, &e.left));
        prop_assert!(max_diff(&a, &b) <= 1e-5 * scale(&a), "{:e}", max_diff(&a, &b));
    }

    #[test]
    fn jacobian_is_directional_derivative(w in primitive(), d in prop::array::uniform4(-1.0..1.0f64)) {
        let g = gas();
        let q = g.conserved_from_primitive(&w);
        let a = g.flux_jacobian(&q).unwrap();
        let h = 1e-6;
        let dq: [f64; 4] = core::array::from_fn(|k| d[k] * scale(&q.0));
        let up = Conserved(core::array::from_fn(|k| q[k] + h * dq[k]));
        let dn = Conserved(core::array::from_fn(|k| q[k] - h * dq[k]));
        let (fu, fdn) = (g.physical_flux(&up, Axis::X).unwrap(), g.physical_flux(&dn, Axis::X).unwrap());
        let fd: Vec<f64> = (0..4).map(|r| (fu[r] - fdn[r]) / (2.0 * h)).collect();
        let av: Vec<f64> = (0..4).map(|r| (0..4).map(|c| a[r][c] * dq[c]).sum()).collect();
        prop_assert!(max_diff(&fd, &av) <= 1e-5 * scale(&av));
    }

    #[test]
    fn rotations_compose(t1 in angle(), t2 in angle()) {
        let a = mat_mul(&rotation_pair(t1).forward, &rotation_pair(t2).forward);
        let b = rotation_pair(t1 + t2).forward;
        prop_assert!(max_diff(&flat(&a), &flat(&b)) <= 1e-15 * 4.0);
        let id = mat_mul(&rotation_pair(t1).forward, &rotation_pair(t1).inverse);
        prop_assert!(max_diff(&flat(&id), &flat(&rotation_pair(0.0).forward)) <= 1e-15);
    }

    #[test]
    fn llf_consistent_and_antisymmetric(a in primitive(), b in primitive(), theta in angle()) {
        let g = gas();
        let (ql, qr) = (g.conserved_from_primitive(&a), g.conserved_from_primitive(&b));
        let same = llf_flux_angle(&ql, &ql, theta, &g).unwrap();
        prop_assert_eq!(same.0, g.rotated_flux(&ql, theta).unwrap().0);
        let f = llf_flux_angle(&ql, &qr, theta, &g).unwrap();
        let back = llf_flux_angle(&qr, &ql, theta + PI, &g).unwrap();
        let neg: Vec<f64> = back.0.iter().map(|x| -x).collect();
        prop_assert!(max_diff(&f.0, &neg) <= 1e-13 * scale(&f.0));
    }

    #[test]
    fn quadratics_reconstructed_exactly(
        c in prop::array::uniform6(-10.0..10.0f64),
        h in 0.01..1.0f64,
        k in 0.01..1.0f64,
        at in prop::array::uniform2(-0.5..0.5f64),
    ) {
        // Cell (0, 0) centred at the origin; exact averages of the quadratic.
        let avg = |x: f64, y: f64| {
            c[0] + c[1] * x + c[2] * y + c[3] * (x * x + h * h / 12.0) + c[4] * (y * y + k * k / 12.0) + c[5] * x * y
        };
        let window: [[f64; 5]; 5] =
            core::array::from_fn(|a| core::array::from_fn(|b| avg((a as f64 - 2.0) * h, (b as f64 - 2.0) * k)));
        let p = weno_scalar(&window, &ReconstructionSettings::default());
        let (x, y) = (at[0] * h, at[1] * k);
        let exact = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * y * y + c[5] * x * y;
        let got = p.evaluate(at[0], at[1])[0];
        prop_assert!((got - exact).abs() <= 1e-12 * scale(&c), "{got} vs {exact}");
    }
}

/// Random physical field on a small periodic grid.
fn random_field(grid: &CartesianGrid, base: Primitive, noise: &[f64]) -> CellField {
    let g = gas();
    CellField::from_fn(grid, |i, j| {
        let n = &noise[4 * (j * grid.nx + i)..];
        g.conserved_from_primitive(&Primitive::new(
            base.rho * (1.0 + 0.5 * n[0]),
            base.u + n[1],
            base.v + n[2],
            base.p * (1.0 + 0.5 * n[3]),
        ))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn freestream_preserved(w in primitive(), mode_ix in 0usize..6) {
        let grid = CartesianGrid::new(0.0, 1.0, 0.0, 2.0, 8, 6).unwrap();
        let mut field = CellField::uniform(&grid, gas().conserved_from_primitive(&w));
        let cfg = SolverConfig { mode: modes()[mode_ix], ..Default::default() };
        let mut solver = Solver::new(grid, BoundarySpec::periodic(), cfg).unwrap();
        let rhs = solver.compute_rhs(&mut field, 0.0).unwrap();
        let worst = rhs.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(worst <= 1e-13, "{worst:e}");
    }

    #[test]
    fn discrete_conservation(
        w in primitive(),
        noise in prop::collection::vec(-0.5..0.5f64, 4 * 9 * 7),
        mode_ix in 0usize..6,
    ) {
        let grid = CartesianGrid::new(0.0, 1.0, 0.0, 1.0, 9, 7).unwrap();
        let mut field = random_field(&grid, w, &noise);
        let cfg = SolverConfig { mode: modes()[mode_ix], cfl: 0.4, t_end: 1.0, ..Default::default() };
        let mut solver = Solver::new(grid, BoundarySpec::periodic(), cfg).unwrap();
        let before = field.total();
        let area = grid.cell_area();
        let rhs = solver.compute_rhs(&mut field, 0.0).unwrap().to_vec();
        let flux_scale = rhs.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for k in 0..4 {
            let s: f64 = rhs.iter().map(|r| r[k] * area).sum();
            prop_assert!(s.abs() <= 1e-12 * flux_scale, "component {k}: {s:e}");
        }
        let mut t = 0.0;
        for _ in 0..5 {
            let dt = solver.compute_dt(&field).unwrap();
            solver.rk3_step(&mut field, t, dt).unwrap();
            t += dt;
        }
        let after = field.total();
        for k in 0..4 {
            let tol = 1e-11 * before[k].abs().max(scale(&before));
            prop_assert!((after[k] - before[k]).abs() <= tol, "component {k}: {} vs {}", after[k], before[k]);
        }
    }

    #[test]
    fn reconstruction_keeps_cell_mean(
        w in primitive(),
        noise in prop::collection::vec(-0.5..0.5f64, 4 * 25),
        mode_ix in 0usize..6,
    ) {
        let g = gas();
        let grid = CartesianGrid::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        let field = random_field(&grid, w, &noise);
        let s = ReconstructionSettings::default();
        let mut stats = ReconstructionStats::default();
        let r = reconstruct_cell(&field, 2, 2, modes()[mode_ix], None, GradientScalar::Density, &g, &s, &mut stats).unwrap();
        let center = field.get(2, 2).0;
        for p in [r.x_polynomial(), r.y_polynomial()] {
            // The 2x2 Gauss rule integrates quadratics exactly.
            let mut mean = [0.0; 4];
            for a in [-GAUSS_OFFSET, GAUSS_OFFSET] {
                for b in [-GAUSS_OFFSET, GAUSS_OFFSET] {
                    let v = p.evaluate(a, b);
                    for k in 0..4 {
                        mean[k] += 0.25 * v[k];
                    }
                }
            }
            prop_assert!(max_diff(&mean, &center) <= 1e-13 * scale(&center), "{mean:?} vs {center:?}");
        }
    }

    #[test]
    fn modes_agree_on_quadratic_data(
        c in prop::array::uniform6(-0.05..0.05f64),
        w in primitive(),
        mode_ix in 0usize..6,
    ) {
        // Every component varies as the same quadratic; all reconstructions are
        // exact there, so each mode must return the exact face values.
        let g = gas();
        let grid = CartesianGrid::new(-1.0, 1.0, -1.0, 1.0, 5, 5).unwrap();
        let base = g.conserved_from_primitive(&w);
        let (h, k) = (grid.dx, grid.dy);
        let bump = |x: f64, y: f64| c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * y * y + c[5] * x * y;
        let bump_avg = |x: f64, y: f64| bump(x, y) + c[3] * h * h / 12.0 + c[4] * k * k / 12.0;
        let field = CellField::from_fn(&grid, |i, j| {
            let (x, y) = grid.center(i as isize, j as isize);
            Conserved(core::array::from_fn(|m| base[m] * (1.0 + bump_avg(x, y))))
        });
        let mut stats = ReconstructionStats::default();
        let r = reconstruct_cell(
            &field, 2, 2, modes()[mode_ix], None, GradientScalar::Density, &g, &ReconstructionSettings::default(), &mut stats,
        )
        .unwrap();
        let t = r.traces();
        let (xc, yc) = grid.center(2, 2);
        let gq = GAUSS_OFFSET;
        let faces = [
            (t.west, [(-0.5, -gq), (-0.5, gq)]),
            (t.east, [(0.5, -gq), (0.5, gq)]),
            (t.south, [(-gq, -0.5), (gq, -0.5)]),
            (t.north, [(-gq, 0.5), (gq, 0.5)]),
        ];
        for (vals, pts) in faces {
            for (v, (a, b)) in vals.iter().zip(pts) {
                let f = bump(xc + a * h, yc + b * k);
                let want: Vec<f64> = (0..4).map(|m| base[m] * (1.0 + f)).collect();
                prop_assert!(max_diff(v, &want) <= 1e-10 * scale(&base.0), "{v:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn reflective_box_conserves_mass_and_energy() {
    let g = gas();
    let grid = CartesianGrid::new(0.0, 1.0, 0.0, 1.0, 12, 12).unwrap();
    let mut field = CellField::from_fn(&grid, |i, j| {
        let (x, y) = grid.center(i as isize, j as isize);
        let r2 = (x - 0.4).powi(2) + (y - 0.55).powi(2);
        g.conserved_from_primitive(&Primitive::new(1.0 + 0.3 * (-20.0 * r2).exp(), 0.0, 0.0, 1.0 + (-30.0 * r2).exp()))
    });
    let bc = BoundarySpec::all(BoundaryCondition::Reflective);
    let mut solver = Solver::new(grid, bc, SolverConfig { mode: DecompositionMode::Rcd, ..Default::default() }).unwrap();
    let before = field.total();
    let mut t = 0.0;
    for _ in 0..20 {
        let dt = solver.compute_dt(&field).unwrap();
        solver.rk3_step(&mut field, t, dt).unwrap();
        t += dt;
    }
    let after = field.total();
    assert!((after[0] - before[0]).abs() <= 1e-12 * before[0]);
    assert!((after[3] - before[3]).abs() <= 1e-12 * before[3]);
}

#[test]
fn rk3_reproduces_cubic_taylor_polynomial() {
    let lambda = -1.3;
    let mut prev: Option<f64> = None;
    for n in 0..5 {
        let dt = 0.2 / f64::from(1 << n);
        let z = lambda * dt;
        let [u] = tvd_rk3([1.0], 0.0, dt, |u, _| [lambda * u[0]]);
        let taylor = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
        assert!((u - taylor).abs() <= 1e-15, "{u} vs {taylor}");
        let err = (u - z.exp()).abs();
        if let Some(p) = prev {
            let order = (p / err).log2();
            assert!((3.8..4.2).contains(&order), "local order {order}");
        }
        prev = Some(err);
    }
}

#[test]
fn rk3_stage_times_integrate_quadratics_exactly() {
    let (t0, dt) = (0.7, 0.3);
    let [u] = tvd_rk3([0.0], t0, dt, |_, t| [t * t]);
    let exact = ((t0 + dt).powi(3) - t0.powi(3)) / 3.0;
    assert!((u - exact).abs() <= 1e-15, "{u} vs {exact}");
}
