use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use ndarray::Array2;
use pressure_lab::fields::*;
use pressure_lab::geometry::Domain;
use pressure_lab::norms::*;
use proptest::prelude::*;

fn disk(nr: usize, np: usize) -> Arc<InteriorGrid> {
    InteriorGrid::new(Domain::unit_disk(), nr, np).unwrap()
}

#[test]
fn constant_field() {
    let g = disk(16, 32);
    let f = sample_scalar(&g, |_| 5.0);
    let h = holder_norm(&f, 0.5, &PairPlan::default()).unwrap();
    assert_eq!(h.sup_norm, 5.0);
    assert_eq!(h.seminorm, 0.0);
    assert_eq!(h.norm(), 5.0);
}

fn brute_force(f: &GridField, alpha: f64, min_dist: f64) -> f64 {
    let pos = f.chart().positions();
    let v = f.comp(0).as_slice().unwrap();
    let mut best: f64 = 0.0;
    for a in 0..pos.len() {
        for b in a + 1..pos.len() {
            let d = (pos[a][0] - pos[b][0]).hypot(pos[a][1] - pos[b][1]);
            if d >= min_dist {
                best = best.max((v[a] - v[b]).abs() / d.powf(alpha));
            }
        }
    }
    best
}

#[test]
fn power_of_distance_to_boundary_point() {
    let g = disk(32, 32);
    let f = sample_scalar(&g, |x| ((x[0] - 1.0).hypot(x[1])).sqrt());
    let est = holder_norm(&f, 0.5, &PairPlan::default()).unwrap();
    let brute = brute_force(&f, 0.5, f.chart().cell_size() * (1.0 - 1e-9));
    assert!(est.seminorm <= brute + 1e-12);
    assert!((0.9..=1.0 + 1e-12).contains(&est.seminorm), "{}", est.seminorm);
}

#[test]
fn linear_field_matches_pairwise_maximum() {
    let g = disk(24, 48);
    let grad = [0.6, -0.8];
    let f = sample_scalar(&g, |x| grad[0] * x[0] + grad[1] * x[1]);
    let plan = PairPlan::default();
    let pairs = plan.resolve(f.chart()).unwrap();
    let est = holder_norm_with(&f, 0.5, &pairs).unwrap();
    let pos = f.chart().positions();
    let mut oracle: f64 = 0.0;
    let mut max_sep: f64 = 0.0;
    for &(a, b) in pairs.pairs() {
        let (p, q) = (pos[a as usize], pos[b as usize]);
        let d = (p[0] - q[0]).hypot(p[1] - q[1]);
        let df = (grad[0] * (p[0] - q[0]) + grad[1] * (p[1] - q[1])).abs();
        oracle = oracle.max(df / d.sqrt());
        max_sep = max_sep.max(d);
    }
    assert!((est.seminorm - oracle).abs() < 1e-12);
    assert!(est.seminorm <= max_sep.sqrt() + 1e-12);
    assert!(est.seminorm >= 0.9 * max_sep.sqrt());
}

#[test]
fn cos_h_minus2() {
    let n = 256;
    let v: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).cos()).collect();
    let h = h_minus2_norm(&v, TAU).unwrap();
    assert!((h - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
    assert_eq!(h_minus2_norm(&vec![0.0; 64], TAU).unwrap(), 0.0);
    assert!((h_minus2_norm(&vec![-3.0; 64], TAU).unwrap() - 3.0).abs() < 1e-14);
    assert!(h_minus2_norm(&vec![1.0; 48], TAU).is_err());
}

#[test]
fn c0_distance_examples() {
    let g = disk(8, 16);
    let f = sample_scalar(&g, |x| x[0]);
    assert_eq!(c0_distance(&f, &f).unwrap(), 0.0);
    let f1 = f.map(|v| v + 1.0);
    assert!((c0_distance(&f1, &f).unwrap() - 1.0).abs() < 1e-15);
    let other = sample_scalar(&disk(8, 32), |x| x[0]);
    assert!(c0_distance(&f, &other).is_err());
}

#[test]
fn plan_is_deterministic() {
    let g = disk(16, 32);
    let chart = Chart::Interior(g);
    let a = PairPlan::default().resolve(&chart).unwrap();
    let b = PairPlan::default().resolve(&chart).unwrap();
    assert_eq!(a.pairs(), b.pairs());
    let c = PairPlan { seed: 9, ..PairPlan::default() }.resolve(&chart).unwrap();
    assert_ne!(a.pairs(), c.pairs());
}

#[test]
fn vector_differences_use_euclidean_norm() {
    let g = disk(8, 16);
    let u = sample_vector(&g, |x| [x[0], x[1]]);
    let h = holder_norm(&u, 0.5, &PairPlan::default()).unwrap();
    let pairs = PairPlan::default().resolve(u.chart()).unwrap();
    let m = pairs.distances().iter().fold(0.0f64, |a, &d| a.max(d.sqrt()));
    assert!((h.seminorm - m).abs() < 1e-12);
}

fn rough(seed: u64) -> GridField {
    let g = disk(12, 24);
    let mut s = seed;
    let vals = Array2::from_shape_fn(g.shape(), |_| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    GridField::scalar(Chart::Interior(g), vals).unwrap()
}

proptest! {
    #[test]
    fn enlarging_the_plan_never_decreases(seed in 0u64..1000, m1 in 0usize..2000, extra in 0usize..2000) {
        let f = rough(seed);
        let small = PairPlan { seed, random_pairs: m1, dyadic: false };
        let large = PairPlan { random_pairs: m1 + extra + 1, ..small };
        let a = holder_norm(&f, 0.4, &small);
        let b = holder_norm(&f, 0.4, &large).unwrap();
        if let Ok(a) = a {
            prop_assert!(b.seminorm >= a.seminorm);
        }
    }

    #[test]
    fn holder_norm_is_homogeneous(seed in 0u64..1000, k in -6i32..6, c in -10.0f64..10.0) {
        let f = rough(seed);
        let plan = PairPlan { random_pairs: 500, ..PairPlan::default() };
        let base = holder_norm(&f, 0.3, &plan).unwrap();
        let two = 2f64.powi(k);
        let exact = holder_norm(&f.scaled(-two), 0.3, &plan).unwrap();
        prop_assert_eq!(exact.seminorm, two * base.seminorm);
        prop_assert_eq!(exact.sup_norm, two * base.sup_norm);
        let scaled = holder_norm(&f.scaled(c), 0.3, &plan).unwrap();
        prop_assert!((scaled.norm() - c.abs() * base.norm()).abs() <= 1e-12 * (1.0 + c.abs() * base.norm()));
    }

    #[test]
    fn h_minus2_is_below_l2(v in prop::collection::vec(-5.0f64..5.0, 64)) {
        let h = h_minus2_norm(&v, 2.0 * PI).unwrap();
        let l2 = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
        prop_assert!(h <= l2 * (1.0 + 1e-12));
    }
}
