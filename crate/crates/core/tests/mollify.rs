use std::f64::consts::TAU;
use std::sync::Arc;

use ndarray::Array2;
use pressure_lab::fields::*;
use pressure_lab::geometry::{CutoffProfile, Domain};
use pressure_lab::mollify::*;
use pressure_lab::norms::{c0_distance, holder_norm_with, PairPlan};
use pressure_lab::quadrature::integrate;
use proptest::prelude::*;

fn disk(nr: usize, np: usize) -> Arc<InteriorGrid> {
    InteriorGrid::new(Domain::unit_disk(), nr, np).unwrap()
}

fn cutoffs() -> CutoffProfile {
    CutoffProfile::new(0.45, 0.12, 0.01, 0.14, 0.05).unwrap()
}

#[test]
fn kernel_is_normalized_and_radial() {
    let k = MollifierKernel::new(0.03).unwrap();
    assert!((k.mass() - 1.0).abs() < 1e-12);
    assert!(k.taps().iter().all(|(o, _)| o[0].hypot(o[1]) < 0.03));
    for (o, w) in k.taps() {
        let mirror = k.taps().iter().find(|(p, _)| (p[0] + o[1]).abs() < 1e-15 && (p[1] - o[0]).abs() < 1e-15).unwrap();
        assert!((mirror.1 - w).abs() < 1e-16);
    }
    // continuous normalization: ∫ρ_η = 1
    let eta = 0.03;
    let total = TAU * integrate(|r| r * k.value([r, 0.0]), 0.0, eta, 64, 16);
    assert!((total - 1.0).abs() < 1e-12, "{total}");
    assert_eq!(k.value([eta, 0.0]), 0.0);
    let y = [0.011, -0.007];
    let g = k.gradient(y);
    let d = 1e-7;
    let fd = [(k.value([y[0] + d, y[1]]) - k.value([y[0] - d, y[1]])) / (2.0 * d), (k.value([y[0], y[1] + d]) - k.value([y[0], y[1] - d])) / (2.0 * d)];
    assert!((g[0] - fd[0]).abs() < 1e-5 * g[0].abs() && (g[1] - fd[1]).abs() < 1e-5 * g[1].abs());
    assert!(MollifierKernel::new(0.0).is_err());
}

#[test]
fn recover_rigid_rotation() {
    let g = disk(32, 64);
    let u = sample_vector(&g, |x| [-x[1], x[0]]);
    let rec = recover_stream(&u).unwrap();
    let exact = sample_scalar(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.5);
    assert!(rec.psi.field().sub(&exact).unwrap().sup_norm() < 1e-12);
    assert!(rec.round_trip < 1e-10);
    let zero = recover_stream(&sample_vector(&g, |_| [0.0, 0.0])).unwrap();
    assert_eq!(zero.psi.field().sup_norm(), 0.0);
    assert!(recover_stream(&sample_vector(&g, |_| [1.0, 0.0])).is_err());
}

#[test]
fn recover_rough_stream_round_trip() {
    let g = disk(96, 192);
    let spec = RoughSpec { alpha: 1.0 / 3.0, seed: 4, j_max: RoughSpec::max_resolved_scales(&g) };
    let psi0 = make_rough_stream(&g, &spec).unwrap();
    let u = stream_to_velocity(&psi0);
    let rec = recover_stream(&u).unwrap();
    assert!(rec.psi.field().sub(psi0.field()).unwrap().sup_norm() < 1e-10);
    assert!(rec.round_trip < 1e-10);
}

fn stream(g: &Arc<InteriorGrid>, f: impl Fn([f64; 2]) -> f64) -> StreamFunction {
    StreamFunction::new(sample_scalar(g, f), 1e-12).unwrap()
}

#[test]
fn split_partition_and_supports() {
    let g = disk(64, 128);
    let c = cutoffs();
    let collar = mollifier_collar(&g, &c, 0.03).unwrap();
    let psi = stream(&g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        (1.0 - r2) * (3.0 * x[0] - x[1]).sin()
    });
    let sp = split_stream(&psi, &c, &collar).unwrap();
    let sum = sp.boundary_nodes.add(&sp.interior).unwrap();
    assert!(sum.sub(psi.field()).unwrap().sup_norm() < 1e-10);
    // resampled collar part agrees with φψ on the overlap
    let back = resample_to_interior(&sp.boundary, &g, 0.0).unwrap();
    assert!(back.sub(&sp.boundary_nodes).unwrap().sup_norm() < 1e-6);

    let deep = stream(&g, |x| bump_of(x[0].hypot(x[1]) / 0.4));
    let sp = split_stream(&deep, &c, &collar).unwrap();
    assert_eq!(sp.boundary.sup_norm(), 0.0);
    assert_eq!(sp.boundary_nodes.sup_norm(), 0.0);

    let shallow = stream(&g, |x| {
        let r = x[0].hypot(x[1]);
        (1.0 - r * r) * bump_of((1.0 - r) / 0.3)
    });
    let sp = split_stream(&shallow, &c, &collar).unwrap();
    assert_eq!(sp.interior.sup_norm(), 0.0);
}

fn bump_of(r: f64) -> f64 {
    bump(r)
}

#[test]
fn odd_extension_examples() {
    let collar = CollarGrid::new(Domain::unit_disk(), 0.4, 17, 32).unwrap();
    let field = |f: &dyn Fn(f64) -> f64| {
        let v = Array2::from_shape_fn(collar.shape(), |(i, _)| f(collar.s(i)));
        GridField::scalar(Chart::Collar(collar.clone()), v).unwrap()
    };
    let lin = odd_extend(&field(&|s| s)).unwrap();
    for k in 0..lin.values().nrows() {
        assert!((lin.values()[[k, 3]] - lin.s(k)).abs() < 1e-15);
    }
    let sq = odd_extend(&field(&|s| s * s)).unwrap();
    for k in 0..sq.values().nrows() {
        let s = sq.s(k);
        assert!((sq.values()[[k, 5]] - s * s.abs()).abs() < 1e-15);
    }
    assert!(sq.values().row(16).iter().all(|&v| v == 0.0));
    assert!((lin.at(0.123, 1.0) - 0.123).abs() < 1e-12);
    assert!((lin.at(-0.123, 1.0) + 0.123).abs() < 1e-12);
    assert!(odd_extend(&field(&|s| s + 1.0)).is_err());
}

#[test]
fn zero_field_and_guards() {
    let g = disk(144, 256);
    let c = cutoffs();
    let u = sample_vector(&g, |_| [0.0, 0.0]);
    let r = mollify_velocity(&u, 0.03, &c).unwrap();
    assert_eq!(r.u_eta.sup_norm(), 0.0);
    assert!(mollify_velocity(&u, 0.031, &c).is_err());
    assert!(mollify_velocity(&u, 0.01, &c).is_err());
    assert_eq!(eta_sweep(&g, &c), vec![0.03, 0.015]);
}

fn smooth_case() -> (Arc<InteriorGrid>, CutoffProfile, StreamFunction) {
    let g = disk(208, 384);
    let c = CutoffProfile::new(0.45, 0.16, 0.01, 0.2, 0.05).unwrap();
    let psi = stream(&g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        (1.0 - r2) * (2.0 * x[0] + x[1]).sin()
    });
    (g, c, psi)
}

#[test]
fn smooth_mode_converges() {
    let (_, c, psi) = smooth_case();
    let u = stream_to_velocity(&psi);
    let mut stream_err = Vec::new();
    let mut vel_err = Vec::new();
    for eta in [0.04, 0.02, 0.01] {
        let r = mollify_velocity(&u, eta, &c).unwrap();
        stream_err.push(c0_distance(r.psi_eta.field(), psi.field()).unwrap());
        vel_err.push(c0_distance(&r.u_eta, &u).unwrap());
    }
    for k in 0..2 {
        let ratio = stream_err[k] / stream_err[k + 1];
        assert!((3.0..=5.0).contains(&ratio), "{stream_err:?}");
        assert!(vel_err[k + 1] < vel_err[k], "{vel_err:?}");
    }
}

#[test]
fn rough_fields_keep_invariants() {
    let g = disk(144, 256);
    let c = cutoffs();
    let pairs = PairPlan::default().resolve(&Chart::Interior(g.clone())).unwrap();
    for (alpha, seed) in [(1.0 / 3.0, 1u64), (0.75, 2)] {
        let spec = RoughSpec { alpha, seed, j_max: RoughSpec::max_resolved_scales(&g) };
        let u = stream_to_velocity(&make_rough_stream(&g, &spec).unwrap());
        let base = holder_norm_with(&u, alpha, &pairs).unwrap().norm();
        let mut last = f64::INFINITY;
        for eta in eta_sweep(&g, &c) {
            let r = mollify_velocity(&u, eta, &c).unwrap();
            let d = r.diagnostics;
            assert!(d.trace_residual <= 1e-10, "{d:?}");
            assert!(d.divergence_max <= 1e-8, "{d:?}");
            assert!(d.normal_max <= 1e-8, "{d:?}");
            let ratio = holder_norm_with(&r.u_eta, alpha, &pairs).unwrap().norm() / base;
            assert!(ratio <= 5.0, "{ratio}");
            let dist = c0_distance(&r.u_eta, &u).unwrap();
            assert!(dist < last);
            last = dist;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn kernel_mass_is_one(eta in 1e-3f64..0.5, m in 2usize..10) {
        let k = MollifierKernel::with_lattice(eta, m).unwrap();
        prop_assert!((k.mass() - 1.0).abs() < 1e-12);
        prop_assert!(k.taps().iter().all(|(o, _)| o[0].hypot(o[1]) < eta));
    }

    #[test]
    fn odd_extension_is_odd(vals in prop::collection::vec(-1.0f64..1.0, 16 * 8)) {
        let collar = CollarGrid::new(Domain::unit_disk(), 0.3, 16, 8).unwrap();
        let mut v = Array2::from_shape_vec((16, 8), vals).unwrap();
        v.row_mut(0).fill(0.0);
        let e = odd_extend(&GridField::scalar(Chart::Collar(collar), v.clone()).unwrap()).unwrap();
        for k in 0..16 {
            for j in 0..8 {
                prop_assert_eq!(e.values()[[15 + k, j]], v[[k, j]]);
                prop_assert_eq!(e.values()[[15 - k, j]], -v[[k, j]]);
            }
        }
    }
}
