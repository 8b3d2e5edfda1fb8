use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use ndarray::Array2;
use pressure_lab::elliptic::*;
use pressure_lab::fields::*;
use pressure_lab::geometry::{CurvePreset, Domain};
use proptest::prelude::*;

fn disk(nr: usize, np: usize) -> Arc<InteriorGrid> {
    InteriorGrid::new(Domain::unit_disk(), nr, np).unwrap()
}

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn max_err(f: &GridField, exact: impl Fn([f64; 2]) -> f64) -> f64 {
    let g = f.chart().interior().unwrap().clone();
    let e = sample_scalar(&g, exact);
    f.sub(&e).unwrap().sup_norm()
}

fn neumann_disk_error(n: usize, m: usize) -> f64 {
    let g = disk(n, m);
    let f = sample_scalar(&g, |_| 4.0);
    let (p, rep) = solve_neumann(&f, &vec![2.0; m], 0.0, &settings()).unwrap();
    assert!(rep.residual <= 1e-10);
    assert!(rep.mean.abs() < 1e-12);
    max_err(&p, |x| 0.5 - x[0] * x[0] - x[1] * x[1])
}

#[test]
fn neumann_manufactured_is_second_order() {
    let e1 = neumann_disk_error(64, 64);
    let e2 = neumann_disk_error(128, 128);
    let ratio = e1 / e2;
    assert!(e2 < 1e-3, "{e2}");
    assert!((3.5..=4.5).contains(&ratio), "{e1} {e2} {ratio}");
}

#[test]
fn neumann_zero_data() {
    let g = disk(16, 32);
    let f = sample_scalar(&g, |_| 0.0);
    let (p, rep) = solve_neumann(&f, &[0.0; 32], 0.0, &settings()).unwrap();
    assert_eq!(p.sup_norm(), 0.0);
    assert_eq!(rep.iterations, 0);
}

#[test]
fn rigid_rotation_data() {
    let g = disk(64, 128);
    let f = sample_scalar(&g, |_| -2.0);
    let (p, rep) = solve_neumann(&f, &[-1.0; 128], 0.0, &settings()).unwrap();
    assert!(rep.compatibility_defect.unwrap().abs() < 1e-12);
    let e = max_err(&p, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.25);
    assert!(e < 2e-3, "{e}");
}

#[test]
fn incompatible_data() {
    let g = disk(16, 32);
    let f = sample_scalar(&g, |_| 4.0);
    assert!(matches!(solve_neumann(&f, &[0.0; 32], 0.0, &settings()), Err(pressure_lab::Error::Compatibility { .. })));
    let (_, rep) = solve_neumann(&f, &[2.0 + 1e-5; 32], 0.0, &settings()).unwrap();
    let d = rep.compatibility_defect.unwrap();
    assert!((d + 1e-5 * TAU).abs() < 1e-9, "{d}");
}

#[test]
fn neumann_uniqueness_from_different_starts() {
    let g = disk(48, 96);
    let f = sample_scalar(&g, |x| 4.0 + 3.0 * x[0] * x[1] - 0.5 * x[0]);
    let op = InteriorOperator::new(g.clone(), WallCondition::Neumann, settings()).unwrap();
    let vol: f64 = op.volumes().iter().sum();
    let fint: f64 = op.volumes().iter().zip(f.comp(0).iter()).map(|(v, f)| v * f).sum();
    let wall: f64 = op.wall_lengths().iter().sum();
    let gv = vec![fint / wall; 96];
    let mut seed = 7u64;
    let x0 = Array2::from_shape_fn(g.shape(), |_| {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        (seed >> 11) as f64 / (1u64 << 53) as f64 * 10.0
    });
    let x0 = GridField::scalar(Chart::Interior(g.clone()), x0).unwrap();
    let (a, _) = op.solve_neumann(&f, &gv, 0.0, None).unwrap();
    let (b, _) = op.solve_neumann(&f, &gv, 0.0, Some(&x0)).unwrap();
    let (c, _) = solve_neumann_from(&f, &gv, 0.0, &x0, &settings()).unwrap();
    assert!(a.sub(&b).unwrap().sup_norm() <= 1e-8);
    assert!(a.sub(&c).unwrap().sup_norm() <= 1e-8);
    assert!(vol > 3.0);
}

#[test]
fn preconditioners_agree() {
    let g = disk(32, 64);
    let f = sample_scalar(&g, |x| 4.0 + x[0]);
    let jac = SolverSettings { preconditioner: PreconditionerKind::Jacobi, ..settings() };
    let (a, ra) = solve_neumann(&f, &[2.0; 64], 0.0, &settings()).unwrap();
    let (b, rb) = solve_neumann(&f, &[2.0; 64], 0.0, &jac).unwrap();
    assert!(a.sub(&b).unwrap().sup_norm() < 1e-7);
    assert!(ra.iterations < rb.iterations);
}

fn ellipse_neumann_error(n: usize, m: usize) -> f64 {
    let dom = Domain::new(CurvePreset::Ellipse { a: 2.0, b: 1.0 }, 512, 0.5).unwrap();
    let g = InteriorGrid::new(dom, n, m).unwrap();
    let exact = |x: [f64; 2]| (0.5 * x[0]).sin() * x[1] + x[0] * x[0] + 2.0 * x[1] * x[1];
    let grad = |x: [f64; 2]| [0.5 * (0.5 * x[0]).cos() * x[1] + 2.0 * x[0], (0.5 * x[0]).sin() + 4.0 * x[1]];
    let f = sample_scalar(&g, |x| 0.25 * (0.5 * x[0]).sin() * x[1] - 6.0);
    let gv: Vec<f64> = (0..m)
        .map(|j| {
            let w = g.node(n - 1, j).x;
            let c = g.wall(j);
            let d = grad(w);
            d[0] * c.n[0] + d[1] * c.n[1]
        })
        .collect();
    let op = InteriorOperator::new(g.clone(), WallCondition::Neumann, settings()).unwrap();
    let (p, _) = op.solve_neumann(&f, &gv, 0.0, None).unwrap();
    let e = sample_scalar(&g, exact);
    let shift = op.mean(e.comp(0));
    max_err(&p, |x| exact(x) - shift)
}

#[test]
fn ellipse_neumann_converges() {
    let e1 = ellipse_neumann_error(48, 96);
    let e2 = ellipse_neumann_error(96, 192);
    let ratio = e1 / e2;
    assert!((3.0..=5.0).contains(&ratio), "{e1} {e2} {ratio}");
}

#[test]
fn dirichlet_examples() {
    let g = disk(32, 64);
    let (psi, _) = solve_dirichlet_stream(&sample_scalar(&g, |_| 0.0), &settings()).unwrap();
    assert_eq!(psi.field().sup_norm(), 0.0);
    let (psi, rep) = solve_dirichlet_stream(&sample_scalar(&g, |_| 2.0), &settings()).unwrap();
    assert!(rep.residual <= 1e-10);
    assert!(psi.values().row(31).iter().all(|&v| v == 0.0));
    let e = max_err(psi.field(), |x| 0.5 * (1.0 - x[0] * x[0] - x[1] * x[1]));
    assert!(e < 1e-3, "{e}");
}

fn dirichlet_error(n: usize, m: usize) -> f64 {
    let g = disk(n, m);
    let (psi, _) = solve_dirichlet_stream(&sample_scalar(&g, |x| 8.0 * x[0] + 4.0), &settings()).unwrap();
    max_err(psi.field(), |x| {
        let q = 1.0 - x[0] * x[0] - x[1] * x[1];
        q * x[0] + q
    })
}

#[test]
fn dirichlet_is_second_order() {
    let ratio = dirichlet_error(64, 64) / dirichlet_error(128, 128);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn dirichlet_reproduces_smooth_velocity() {
    let g = disk(96, 192);
    let psi0 = sample_scalar(&g, |x| {
        let q = 1.0 - x[0] * x[0] - x[1] * x[1];
        q * (2.0 * x[0] + x[1]).sin()
    });
    let psi0 = StreamFunction::new(psi0, 1e-12).unwrap();
    let u = stream_to_velocity(&psi0);
    // curl ∇⊥ψ = Δψ with ∇⊥ = (−∂₂, ∂₁).
    let omega = curl(&u).unwrap().scaled(-1.0);
    let (psi, _) = solve_dirichlet_stream(&omega, &settings()).unwrap();
    let err = psi.field().sub(psi0.field()).unwrap().sup_norm();
    assert!(err < 1e-3, "{err}");
}

fn flat(ns: usize, m: usize, depth: f64) -> Arc<CollarGrid> {
    CollarGrid::flat(TAU, depth, ns, m).unwrap()
}

fn collar_field(c: &Arc<CollarGrid>, f: impl Fn(f64, f64) -> f64) -> GridField {
    let v = Array2::from_shape_fn(c.shape(), |(i, j)| f(c.s(i), c.theta(j)));
    GridField::scalar(Chart::Collar(c.clone()), v).unwrap()
}

fn rel_err(a: &GridField, b: &GridField) -> f64 {
    a.sub(b).unwrap().sup_norm() / b.sup_norm()
}

#[test]
fn slab_constant_source() {
    let d = 0.4;
    let c = flat(256, 256, d);
    let (w, rep) = solve_slab_mixed(&collar_field(&c, |_, _| 1.0), &settings()).unwrap();
    assert!(rep.residual <= 1e-10);
    assert!(rel_err(&w, &collar_field(&c, |s, _| 0.5 * (d * d - s * s))) <= 1e-6);
    let (z, _) = solve_slab_mixed(&collar_field(&c, |_, _| 0.0), &settings()).unwrap();
    assert_eq!(z.sup_norm(), 0.0);
}

/// Per-mode tridiagonal solve of the same discretization.
fn mode_oracle(c: &Arc<CollarGrid>, mode: usize) -> GridField {
    let (ns, m) = c.shape();
    let (hs, ht) = (c.h_s(), c.h_theta());
    let sym = (2.0 - 2.0 * (TAU * mode as f64 / m as f64).cos()) / (ht * ht);
    let rows = ns - 1;
    let mut a = vec![[0.0; 3]; rows];
    let mut b = vec![0.0; rows];
    for i in 0..rows {
        let hgt = if i == 0 { 0.5 } else { 1.0 };
        let up = 1.0 / (hs * hs);
        a[i][1] = hgt * sym + up + if i > 0 { up } else { 0.0 };
        a[i][0] = if i > 0 { -up } else { 0.0 };
        a[i][2] = if i + 1 < rows { -up } else { 0.0 };
        b[i] = hgt;
    }
    for i in 1..rows {
        let r = a[i][0] / a[i - 1][1];
        a[i][1] -= r * a[i - 1][2];
        b[i] -= r * b[i - 1];
    }
    let mut x = vec![0.0; ns];
    for i in (0..rows).rev() {
        x[i] = (b[i] - a[i][2] * x[i + 1]) / a[i][1];
    }
    let k = TAU * mode as f64 / c.length();
    collar_field(c, |s, t| x[(s / hs).round() as usize] * (k * t).sin())
}

#[test]
fn slab_matches_mode_oracle() {
    let c = flat(256, 256, 0.5);
    for mode in [1, 2, 4, 8] {
        let k = mode as f64;
        let (w, _) = solve_slab_mixed(&collar_field(&c, |_, t| (k * t).sin()), &settings()).unwrap();
        let e = rel_err(&w, &mode_oracle(&c, mode));
        assert!(e <= 1e-6, "mode {mode}: {e}");
    }
}

fn slab_mode_error(ns: usize, m: usize) -> f64 {
    let d = 0.5;
    let k = 3.0;
    let c = flat(ns, m, d);
    let (w, _) = solve_slab_mixed(&collar_field(&c, |_, t| (k * t).sin()), &settings()).unwrap();
    let exact = collar_field(&c, |s, t| (1.0 - (k * s).cosh() / (k * d).cosh()) * (k * t).sin() / (k * k));
    w.sub(&exact).unwrap().sup_norm()
}

#[test]
fn slab_flat_is_second_order() {
    let ratio = slab_mode_error(65, 64) / slab_mode_error(129, 128);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

fn curved_slab_error(ns: usize, m: usize) -> f64 {
    let d = 0.4;
    let c = CollarGrid::new(Domain::unit_disk(), d, ns, m).unwrap();
    let q = FRAC_PI_2 / d;
    let ang = |t: f64| 1.0 + 0.3 * (2.0 * t).cos();
    let f = collar_field(&c, |s, t| {
        let j = 1.0 - s;
        let radial = q * q * (q * s).cos() - q * (q * s).sin() / j;
        radial * ang(t) + 4.0 * 0.3 * (2.0 * t).cos() * (q * s).cos() / (j * j)
    });
    let (w, _) = solve_slab_mixed(&f, &settings()).unwrap();
    w.sub(&collar_field(&c, |s, t| (q * s).cos() * ang(t))).unwrap().sup_norm()
}

#[test]
fn curved_slab_is_second_order() {
    let ratio = curved_slab_error(33, 64) / curved_slab_error(65, 128);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn slab_wall_flux() {
    let d = 0.5;
    let c = flat(129, 64, d);
    let op = SlabOperator::new(c.clone(), settings()).unwrap();
    // w = (s − d)·cos θ: ∂_s w(0) = cos θ, −Δw = (s − d) cos θ.
    let f = collar_field(&c, |s, t| (s - d) * t.cos());
    let g: Vec<f64> = (0..64).map(|j| c.theta(j).cos()).collect();
    let (w, _) = op.solve_with_flux(&f, Some(&g)).unwrap();
    let e = w.sub(&collar_field(&c, |s, t| (s - d) * t.cos())).unwrap().sup_norm();
    assert!(e < 1e-3, "{e}");
}

#[test]
fn green_reciprocity() {
    let c = CollarGrid::new(Domain::unit_disk(), 0.3, 25, 64).unwrap();
    let op = SlabOperator::new(c, settings()).unwrap();
    let pts = [(0usize, 3usize), (5, 40), (12, 17)];
    for &(a, b) in &pts {
        for &(p, q) in &pts {
            let ga = op.green_column(a, b).unwrap();
            let gp = op.green_column(p, q).unwrap();
            let x = ga.comp(0)[[p, q]];
            let y = gp.comp(0)[[a, b]];
            assert!((x - y).abs() <= 1e-8 * x.abs().max(y.abs()), "{x} {y}");
        }
    }
    assert!(op.green_column(24, 0).is_err());
}

#[test]
fn green_column_tracks_image_kernel() {
    // Differences of the discrete Green function between two targets match
    // those of the image kernel up to the smooth remainder.
    let c = flat(161, 512, 1.0);
    let op = SlabOperator::new(c.clone(), settings()).unwrap();
    let g = op.green_column(0, 0).unwrap();
    let hs = c.h_s();
    let near = g.comp(0)[[4, 0]] - g.comp(0)[[16, 0]];
    let kern = green_kernel_image(4.0 * hs, 0.0, 0.0, 0.0).unwrap() - green_kernel_image(16.0 * hs, 0.0, 0.0, 0.0).unwrap();
    assert!((near - kern).abs() < 0.05 * kern.abs(), "{near} {kern}");
}

#[test]
fn image_kernel_examples() {
    let (s, t, t1) = (0.3, 0.7, 0.2);
    let v = green_kernel_image(s, t, 0.0, t1).unwrap();
    let merged = (1.0 / ((t - t1).powi(2) + s * s)).ln() / (2.0 * PI);
    assert!((v - merged).abs() < 1e-14);
    let a = green_kernel_image(0.1, 0.4, 0.25, 1.1).unwrap();
    let b = green_kernel_image(0.25, 1.1, 0.1, 0.4).unwrap();
    assert!((a - b).abs() < 1e-15);
    let c = green_kernel_image(0.1, 2.4, 0.25, 3.1).unwrap();
    assert!((a - c).abs() < 1e-12);
    assert!(matches!(green_kernel_image(0.2, 1.0, 0.2, 1.0), Err(pressure_lab::Error::Singular)));
}

#[test]
fn report_history_csv() {
    let g = disk(16, 32);
    let (_, rep) = solve_neumann(&sample_scalar(&g, |_| 4.0), &[2.0; 32], 0.0, &settings()).unwrap();
    let mut out = Vec::new();
    rep.write_history_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("iteration,residual\n"));
    assert_eq!(text.lines().count(), rep.history.len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn operators_are_symmetric_semidefinite(n in 4usize..12, m in 2usize..6, b in 0.5f64..1.5, seed in 0u64..100) {
        let m = 4 * m;
        let dom = Domain::new(CurvePreset::Ellipse { a: 1.0, b }, 128, 0.5).unwrap();
        let g = InteriorGrid::new(dom, n, m).unwrap();
        let op = InteriorOperator::new(g, WallCondition::Neumann, settings()).unwrap();
        let a = op.matrix();
        prop_assert!(a.asymmetry() < 1e-12);
        let ones = vec![1.0; a.n()];
        let mut y = vec![0.0; a.n()];
        a.apply(&ones, &mut y);
        prop_assert!(y.iter().all(|v| v.abs() < 1e-10));
        let mut s = seed;
        let x: Vec<f64> = (0..a.n()).map(|_| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5 }).collect();
        a.apply(&x, &mut y);
        let q: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(q >= -1e-12);
    }
}

fn flux_load_error(dom: &Arc<Domain>, n: usize, m: usize) -> f64 {
    let g = InteriorGrid::new(dom.clone(), n, m).unwrap();
    let exact = |x: [f64; 2]| (0.5 * x[0]).sin() * x[1] + x[0] * x[0] * x[1];
    let w = sample_vector(&g, |x| [-(0.5 * (0.5 * x[0]).cos() * x[1] + 2.0 * x[0] * x[1]), -((0.5 * x[0]).sin() + x[0] * x[0])]);
    let op = InteriorOperator::new(g.clone(), WallCondition::Neumann, settings()).unwrap();
    let (p, rep) = op.solve_neumann_load(op.flux_load(&w).unwrap(), 0.0, None).unwrap();
    assert!(rep.compatibility_defect.unwrap().abs() < 1e-12);
    let e = sample_scalar(&g, exact);
    let shift = op.mean(e.comp(0));
    max_err(&p, |x| exact(x) - shift)
}

#[test]
fn flux_load_recovers_gradient_potential() {
    for dom in [Domain::unit_disk(), Domain::new(CurvePreset::Ellipse { a: 2.0, b: 1.0 }, 512, 0.5).unwrap()] {
        let (a, b) = (flux_load_error(&dom, 32, 64), flux_load_error(&dom, 64, 128));
        assert!(b < 5e-3 && (3.0..5.0).contains(&(a / b)), "{a} {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn flux_load_telescopes(k1 in -3.0f64..3.0, k2 in -3.0f64..3.0, c in -2.0f64..2.0) {
        let g = disk(12, 16);
        let w = sample_vector(&g, |x| [(k1 * x[0] + x[1]).sin() + c, (k2 * x[1]).cos() * x[0]]);
        let op = InteriorOperator::new(g, WallCondition::Neumann, settings()).unwrap();
        let b = op.flux_load(&w).unwrap();
        let scale: f64 = b.iter().map(|v| v.abs()).sum();
        prop_assert!(b.iter().sum::<f64>().abs() <= 1e-13 * scale.max(1.0));
    }
}
