use std::f64::consts::{PI, TAU};

use pressure_lab::geometry::{reach_estimate, BoundaryCurve, CurvePreset, CutoffProfile, GeodesicChart};
use proptest::prelude::*;

fn circle(r: f64, n: usize) -> BoundaryCurve {
    BoundaryCurve::build(CurvePreset::Circle { radius: r }, n).unwrap()
}

fn ellipse(n: usize) -> BoundaryCurve {
    BoundaryCurve::build(CurvePreset::Ellipse { a: 2.0, b: 1.0 }, n).unwrap()
}

#[test]
fn unit_circle_length_and_curvature() {
    let c = circle(1.0, 256);
    assert!((c.length() - TAU).abs() < 1e-12);
    for p in c.nodes() {
        assert!((p.gamma + 1.0).abs() < 1e-12);
    }
    assert!((c.curvature(1.234) + 1.0).abs() < 1e-12);
    let p0 = c.nodes()[0];
    assert!((p0.n[0] + 1.0).abs() < 1e-14 && p0.n[1].abs() < 1e-14);
}

#[test]
fn circle_of_radius_two_has_curvature_minus_half() {
    let c = circle(2.0, 128);
    assert!((c.curvature(3.0) + 0.5).abs() < 1e-12);
}

#[test]
fn ellipse_curvature_at_axes() {
    let c = ellipse(512);
    let p = c.nodes()[0];
    assert!((p.x[0] - 2.0).abs() < 1e-12);
    assert!((p.gamma + 2.0).abs() < 1e-10);
    // (0, 1) sits a quarter of the way round
    let q = c.point_at(0.25 * c.length()).unwrap();
    assert!(q.x[0].abs() < 1e-10 && (q.x[1] - 1.0).abs() < 1e-10);
    assert!((c.curvature(0.25 * c.length()) + 0.25).abs() < 1e-9);
}

#[test]
fn ellipse_perimeter_matches_series() {
    // Ramanujan II is accurate to ~1e-5 relative for a/b = 2
    let (a, b) = (2.0f64, 1.0f64);
    let h = ((a - b) / (a + b)).powi(2);
    let approx = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
    let c = ellipse(64);
    assert!((c.length() - approx).abs() < 1e-4);
    let fine = pressure_lab::quadrature::integrate(
        |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(),
        0.0,
        TAU,
        64,
        20,
    );
    assert!((c.length() - fine).abs() < 1e-12);
}

#[test]
fn frames_are_unit_and_arclength_speed_is_one() {
    for c in [circle(1.0, 512), ellipse(512)] {
        for p in c.nodes() {
            assert!((p.tau[0].hypot(p.tau[1]) - 1.0).abs() < 1e-10);
            assert!((p.n[0].hypot(p.n[1]) - 1.0).abs() < 1e-10);
        }
        assert!(c.speed_residual() < 1e-10, "{}", c.speed_residual());
        assert!(c.frenet_residual() < 1e-6);
    }
}

#[test]
fn interpolated_second_derivative_gives_gamma() {
    let c = ellipse(512);
    for th in [0.3, 2.0, 5.1] {
        let [_, d1, d2] = c.interpolated(th);
        let g = d2[0] * d1[1] - d1[0] * d2[1];
        assert!((g - c.curvature(th)).abs() < 1e-8);
    }
}

#[test]
fn star_curve_is_built() {
    let preset = CurvePreset::Star {
        r0: 1.0,
        cos: vec![0.0, 0.0, 0.0, 0.1],
        sin: vec![],
    };
    let c = BoundaryCurve::build(preset, 256).unwrap();
    assert!(c.speed_residual() < 1e-10);
    assert!(c.frenet_residual() < 1e-6);
}

#[test]
fn invalid_presets_are_rejected() {
    assert!(BoundaryCurve::build(CurvePreset::Circle { radius: -1.0 }, 64).is_err());
    assert!(BoundaryCurve::build(CurvePreset::unit_circle(), 15).is_err());
    let bad = CurvePreset::Star {
        r0: 1.0,
        cos: vec![1.5],
        sin: vec![],
    };
    assert!(BoundaryCurve::build(bad, 64).is_err());
}

#[test]
fn chart_forward_examples() {
    let chart = GeodesicChart::new(circle(1.0, 256), 0.5).unwrap();
    let x = chart.forward(0.25, 0.0).unwrap();
    assert!((x[0] - 0.75).abs() < 1e-14 && x[1].abs() < 1e-14);
    for th in [0.0, 1.0, 4.0] {
        let x = chart.forward(0.25, th).unwrap();
        assert!((x[0].hypot(x[1]) - 0.75).abs() < 1e-13);
    }
    assert!(chart.forward(0.6, 0.0).is_err());
}

#[test]
fn closest_point_examples() {
    let chart = GeodesicChart::new(circle(1.0, 256), 0.6).unwrap();
    let (s, th) = chart.closest_point([0.5, 0.0]).unwrap();
    assert!((s - 0.5).abs() < 1e-12 && th.abs() < 1e-12);
    let node = chart.curve().nodes()[17];
    let (s, th) = chart.closest_point(node.x).unwrap();
    assert!(s.abs() < 1e-12 && (th - node.theta).abs() < 1e-10);
    assert!(chart.closest_point([0.1, 0.0]).is_err());
    assert!(chart.closest_point([1.1, 0.0]).is_err());

    // J vanishes at depth 1/2 under the vertex (2, 0), so the deepest admissible
    // collar is slightly thinner than the distance from (0, 0.5)
    assert!(GeodesicChart::new(ellipse(512), 0.5).is_err());
    let e = GeodesicChart::new(ellipse(512), 0.45).unwrap();
    let (s, th) = e.closest_point([0.0, 0.6]).unwrap();
    let foot = e.curve().point_at(th).unwrap();
    assert!((s - 0.4).abs() < 1e-10);
    assert!(foot.x[0].abs() < 1e-10 && (foot.x[1] - 1.0).abs() < 1e-10);
}

#[test]
fn metric_residuals_on_collar_grid() {
    for c in [circle(1.0, 512), ellipse(512)] {
        let delta = 0.9 * reach_estimate(&c, 0.5);
        let chart = GeodesicChart::new(c, delta).unwrap();
        let l = chart.curve().length();
        let (ns, nt) = (9, 512);
        let ht = l / nt as f64;
        let hs = delta / (ns - 1) as f64;
        let mut worst: f64 = 0.0;
        for i in 1..ns - 1 {
            let s = i as f64 * hs;
            for j in 0..nt {
                let th = j as f64 * ht;
                let xp = chart.forward(s, th + ht).unwrap();
                let xm = chart.forward(s, th - ht).unwrap();
                let dth = ((xp[0] - xm[0]) / (2.0 * ht)).hypot((xp[1] - xm[1]) / (2.0 * ht));
                worst = worst.max((dth - chart.jacobian(s, th)).abs());
                let sp = chart.forward(s + hs, th).unwrap();
                let sm = chart.forward(s - hs, th).unwrap();
                let n = chart.curve().point_at(th).unwrap().n;
                let ds = [(sp[0] - sm[0]) / (2.0 * hs) - n[0], (sp[1] - sm[1]) / (2.0 * hs) - n[1]];
                worst = worst.max(ds[0].hypot(ds[1]));
            }
        }
        assert!(worst < 1e-3, "metric residual {worst}");
        assert!(chart.metric_residual(33) < 1e-6);
    }
}

#[test]
fn reach_examples() {
    let r1 = reach_estimate(&circle(1.0, 512), 0.5);
    assert!((0.5 - 1e-12..=1.0).contains(&r1));
    assert!(reach_estimate(&circle(2.0, 512), 0.5) >= 1.0 - 1e-12);
    assert!(reach_estimate(&ellipse(512), 0.5) <= 0.5);
}

#[test]
fn node_table_csv_has_header_and_rows() {
    let c = circle(1.0, 16);
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta,x1,x2,tau1,tau2,n1,n2,gamma");
    assert_eq!(lines.count(), 16);
}

fn cutoffs() -> impl Strategy<Value = CutoffProfile> {
    (0.1f64..1.0, 0.02f64..0.2, 0.05f64..0.9, 0.05f64..0.9, 0.05f64..0.9).prop_filter_map(
        "chain",
        |(d, e, a, b, c)| {
            let e = e * d;
            let d1 = a * 0.2 * d;
            let d2 = d1 + e + b * 0.2 * d;
            let d3 = d2 - e + c * (d - 2.0 * e - (d2 - e));
            CutoffProfile::new(d, e, d1, d2, d3).ok()
        },
    )
}

proptest! {
    #[test]
    fn cutoff_identities(c in cutoffs(), u in prop::collection::vec(0.0f64..1.0, 200)) {
        for w in u.windows(2) {
            let (s, t) = (w[0].min(w[1]) * 1.2 * c.delta, w[0].max(w[1]) * 1.2 * c.delta);
            prop_assert_eq!(c.phi_b(s) * c.phi(s), c.phi_b(s));
            prop_assert!(c.phi(t) <= c.phi(s));
            prop_assert!(c.phi_b(t) <= c.phi_b(s));
            prop_assert!(c.phi_i(t) >= c.phi_i(s));
            prop_assert!(c.phi_b(s) == 1.0 || c.phi_i(s) == 1.0);
        }
    }

    #[test]
    fn closest_point_inverts_forward(s in 0.0f64..0.45, th in 0.0f64..9.6) {
        let chart = GeodesicChart::new(ellipse(256), 0.45).unwrap();
        let th = th.rem_euclid(chart.curve().length());
        let x = chart.forward(s, th).unwrap();
        let (s2, th2) = chart.closest_point(x).unwrap();
        prop_assert!((s2 - s).abs() < 1e-8);
        let l = chart.curve().length();
        let d = (th2 - th).rem_euclid(l);
        prop_assert!(d.min(l - d) < 1e-8);
    }
}
