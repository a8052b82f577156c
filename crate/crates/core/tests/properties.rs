//! Randomized invariants across modules.

use proptest::prelude::*;

use hypflow::diagnostics::h_convexity_margin;
use hypflow::flow::{self, FlowConfig, FlowState};
use hypflow::integrals::{averaged_mean_curvature, enclosed_volume};
use hypflow::io::{self, Snapshot};
use hypflow::{Grid, LambdaParams, RadialGraph, Topology};

/// `r0 + Σ a_k cos(kθ) + b_k sin(kθ)` for k = 1..=coeffs.len().
fn trig_poly(r0: f64, coeffs: &[(f64, f64)], t: f64) -> f64 {
    r0 + coeffs
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let k = (i + 1) as f64;
            a * (k * t).cos() + b * (k * t).sin()
        })
        .sum::<f64>()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.05f64..0.05, -0.05f64..0.05), 1..4)
}

fn circle_graph(m: usize, r0: f64, c: &[(f64, f64)], lambda: f64) -> RadialGraph {
    let grid = Grid::new(Topology::Circle, 1, m).unwrap();
    let rho = grid.field_from_fn(|t| trig_poly(r0, c, t)).unwrap();
    RadialGraph::new(grid, rho, LambdaParams::new(lambda).unwrap()).unwrap()
}

fn axisymmetric_graph(n: usize, m: usize, r0: f64, c: &[(f64, f64)]) -> RadialGraph {
    let grid = Grid::new(Topology::Axisymmetric, n, m).unwrap();
    // Even in θ so the poles are regular.
    let rho = grid
        .field_from_fn(|t| trig_poly(r0, &c.iter().map(|&(a, _)| (a, 0.0)).collect::<Vec<_>>(), t))
        .unwrap();
    RadialGraph::new(grid, rho, LambdaParams::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_commute_with_rotation(r0 in 0.5f64..2.0, c in coeffs(), k in 0usize..64) {
        let grid = Grid::new(Topology::Circle, 1, 64).unwrap();
        let f = grid.field_from_fn(|t| trig_poly(r0, &c, t)).unwrap();
        let g = f.shifted(k);
        for (a, b) in [
            (grid.laplacian(&g), grid.laplacian(&f)),
            (grid.gradient_sq(&g), grid.gradient_sq(&f)),
            (grid.hessian_grad_grad(&g), grid.hessian_grad_grad(&f)),
        ] {
            prop_assert_eq!(a, b.shifted(k));
        }
    }

    #[test]
    fn principal_curvatures_trace_to_mean_curvature(
        r0 in 0.5f64..2.0, c in coeffs(), n in 1usize..4
    ) {
        let g = if n == 1 { circle_graph(96, r0, &c, -1.0) } else { axisymmetric_graph(n, 65, r0, &c) };
        let f = g.geometry();
        for (h, sum) in f.mean_curvature.iter().zip(f.principal_sum(n)) {
            prop_assert!((h - sum).abs() <= 1e-10 * h.abs().max(1.0), "{} vs {}", h, sum);
        }
    }

    #[test]
    fn averaged_curvature_lies_between_extremes(
        r0 in 0.3f64..2.5, c in coeffs(), lambda in -4.0f64..-0.25
    ) {
        let g = circle_graph(64, r0, &c, lambda);
        let h = g.geometry().mean_curvature;
        let h_bar = averaged_mean_curvature(&g);
        let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= h_bar && h_bar <= hi);
    }

    #[test]
    fn support_bound_on_h_convex_graphs(r0 in 0.3f64..2.0, c in coeffs(), lambda in -4.0f64..-0.25) {
        let g = circle_graph(128, r0, &c, lambda);
        prop_assume!(h_convexity_margin(&g) >= 0.0);
        let p = g.params();
        let bound = p.sqrt_abs_lambda() * p.ta(g.rho().min()) - 5e-3;
        prop_assert!(g.geometry().support_cos.iter().all(|&s| s >= bound));
    }

    #[test]
    fn xi_of_psi_is_below_psi(v in 1e-3f64..50.0, n in 1usize..4, lambda in -4.0f64..-0.25) {
        let p = LambdaParams::new(lambda).unwrap();
        let psi = p.psi(v, n).unwrap();
        prop_assert!(p.xi(psi).unwrap() <= psi);
    }

    #[test]
    fn snapshot_round_trip_is_lossless(
        rho in prop::collection::vec(1e-6f64..1e3, 8..40), t in 0.0f64..100.0, lambda in -10.0f64..-1e-3
    ) {
        let m = rho.len();
        let grid = Grid::new(Topology::Circle, 1, m).unwrap();
        let g = RadialGraph::from_values(grid, rho.clone(), LambdaParams::new(lambda).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        io::write_snapshot(&path, &FlowState::new(g, t), None).unwrap();
        let back: Snapshot = io::read_snapshot(&path).unwrap();
        prop_assert_eq!(back.rho, rho);
        prop_assert_eq!(back.t, t);
        prop_assert_eq!(back.lambda, lambda);
    }

    #[test]
    fn offset_volume_is_isometry_invariant(r in 0.5f64..1.5, zx in -0.3f64..0.3, zy in -0.3f64..0.3) {
        let grid = Grid::new(Topology::Circle, 1, 256).unwrap();
        let p = LambdaParams::default();
        let g = hypflow::geometry::offset_sphere_graph(&grid, p, r, 0.0, &[zx, zy]).unwrap();
        let exact = p.ball_volume(r, 1);
        prop_assert!((enclosed_volume(&g) - exact).abs() <= 5e-4 * exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn flow_commutes_with_rotation(c in coeffs(), k in 1usize..48) {
        let g = circle_graph(48, 1.0, &c, -1.0);
        let config = FlowConfig { t_max: 0.05, cadence: 0.01, ..Default::default() };
        let a = flow::run(g.clone(), &config).unwrap();
        let b = flow::run(g.shifted(k), &config).unwrap();
        prop_assert_eq!(&a.rows, &b.rows);
        for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
            let rotated = x.graph.shifted(k);
            prop_assert_eq!(rotated.rho(), y.graph.rho());
        }
    }
}

#[test]
fn volume_drift_without_renormalization() {
    let grid = Grid::new(Topology::Circle, 1, 256).unwrap();
    let rho = grid.field_from_fn(|t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
    let g = RadialGraph::new(grid, rho, LambdaParams::default()).unwrap();
    let config = FlowConfig {
        renormalize_volume: false,
        ..Default::default()
    };
    let traj = flow::run(g, &config).unwrap();
    let v0 = traj.initial_volume;
    let drift = traj
        .rows
        .iter()
        .map(|r| (r.volume - v0).abs() / v0)
        .fold(0.0, f64::max);
    assert!(drift <= 1e-4, "{drift}");
    // sup|H − H̄| decreases monotonically once the transient has passed.
    let tail: Vec<f64> = traj
        .rows
        .iter()
        .filter(|r| r.t >= 1.0)
        .map(|r| r.sup_dev)
        .collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0]));
}
