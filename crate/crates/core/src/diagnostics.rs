//! Empirical checks along trajectories: h-convexity margin, inradius and
//! support bounds for h-convex domains, exponential rate fits, and an
//! independent curvature oracle built on the hyperboloid model.
//!
//! The coordinate origin of the radial graph stands in for the center of
//! an inball: `min ρ` is used as the inradius and `max ρ` as the maximal
//! distance from the center to the boundary. For near-spherical graphs
//! these bracket the true values, and every bound carries a slack of
//! [`BOUND_SLACK`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::RadialGraph;
use crate::grid::Topology;

pub const BOUND_SLACK: f64 = 5e-3;

/// Curvature margin below which the h-convexity hypothesis is considered
/// violated and the bounds are not evaluated.
pub const CONVEXITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub area: f64,
    pub volume: f64,
    pub h_bar: f64,
    pub sup_dev: f64,
    pub kappa_margin: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `ξ(ψ(V0))`
    pub inradius_lower: f64,
    /// `ψ(V0)`
    pub inradius_upper: f64,
    pub renorm_delta: f64,
}

impl DiagnosticsRow {
    pub fn from_state(state: &FlowState, initial_volume: f64) -> Self {
        let p = state.graph.params();
        let upper = p.psi(initial_volume, state.graph.n()).unwrap_or(f64::NAN);
        let lower = p.xi(upper).unwrap_or(f64::NAN);
        Self {
            t: state.t,
            area: state.area,
            volume: state.volume,
            h_bar: state.h_bar,
            sup_dev: state.sup_dev,
            kappa_margin: state.kappa_margin,
            rho_min: state.graph.rho().min(),
            rho_max: state.graph.rho().max(),
            inradius_lower: lower,
            inradius_upper: upper,
            renorm_delta: state.renorm_delta,
        }
    }
}

/// `min κ − √|λ|`; positive iff the graph is strictly h-convex at grid
/// resolution.
pub fn h_convexity_margin(g: &RadialGraph) -> f64 {
    let kmin = g
        .geometry()
        .kappa_min
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    kmin - g.params().sqrt_abs_lambda()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One inequality `lhs ≤ rhs` (with slack).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub status: BoundStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub t: f64,
    pub checks: Vec<BoundCheck>,
    pub warnings: Vec<String>,
}

impl BoundsReport {
    /// No check failed (not-applicable checks count as passing).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != BoundStatus::Fail)
    }

    pub fn applicable(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.status != BoundStatus::NotApplicable)
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates the h-convex inradius, maximal-distance, support and diameter
/// bounds on one output row.
pub fn check_bounds(row: &DiagnosticsRow, g: &RadialGraph, initial_volume: f64) -> BoundsReport {
    let p = g.params();
    let k = p.sqrt_abs_lambda();
    let n = g.n();
    let fields = g.geometry();
    let rho_min = g.rho().min();
    let rho_max = g.rho().max();
    let min_support = fields
        .support_cos
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let psi = p.psi(initial_volume, n).unwrap_or(f64::NAN);
    let xi_psi = p.xi(psi).unwrap_or(f64::NAN);

    let mut warnings = Vec::new();
    if (p.lambda() + 1.0).abs() > 1e-12 {
        warnings.push(format!(
            "lambda = {}: the maximal-distance and diameter bounds use the additive constant \
             sqrt|lambda| * ln(...) literally, which is only scale-consistent at lambda = -1",
            p.lambda()
        ));
    }

    let tau = p.ta(0.5 * rho_min);
    let root = tau.sqrt();
    let maxd_bound = rho_min + k * ((1.0 + root).powi(2) / (1.0 + tau)).ln();

    // (name, lhs, rhs): lhs ≤ rhs is the claim.
    let raw = [
        ("inradius_lower", xi_psi, rho_min),
        ("inradius_upper", rho_min, psi),
        ("maxd", rho_max, maxd_bound),
        ("support", k * p.ta(rho_min), min_support),
        (
            "diameter",
            2.0 * rho_max,
            2.0 * (psi + k * std::f64::consts::LN_2),
        ),
    ];
    let applicable = row.kappa_margin >= -CONVEXITY_TOLERANCE;
    let checks = raw
        .into_iter()
        .map(|(name, lhs, rhs)| {
            let status = if !applicable {
                BoundStatus::NotApplicable
            } else if lhs <= rhs + BOUND_SLACK {
                BoundStatus::Pass
            } else {
                BoundStatus::Fail
            };
            BoundCheck {
                name,
                lhs,
                rhs,
                status,
            }
        })
        .collect();
    BoundsReport {
        t: row.t,
        checks,
        warnings,
    }
}

/// Least-squares fit of `y ≈ K e^{−ω t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub omega: f64,
    pub amplitude: f64,
    /// Coefficient of determination of the log-linear fit; 0 for constant
    /// series.
    pub r_squared: f64,
    pub window: (f64, f64),
}

pub const MIN_FIT_SAMPLES: usize = 8;

/// Fits `ln y = ln K − ω t` over samples with `t` in `window`; by default
/// the trailing half of the series' time span.
pub fn fit_exponential_rate(series: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<RateFit> {
    if series.is_empty() {
        return Err(Error::Domain("empty series".into()));
    }
    let window = window.unwrap_or_else(|| {
        let (first, last) = (series[0].0, series[series.len() - 1].0);
        (0.5 * (first + last), last)
    });
    let samples: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::Domain(format!(
            "rate fit needs at least {MIN_FIT_SAMPLES} samples in the window, got {}",
            samples.len()
        )));
    }
    if let Some(&(t, y)) = samples.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(Error::Domain(format!(
            "rate fit needs positive values, got {y} at t = {t}"
        )));
    }

    let logs: Vec<(f64, f64)> = samples.iter().map(|&(t, y)| (t, y.ln())).collect();
    if logs.iter().all(|&(_, l)| l == logs[0].1) {
        return Ok(RateFit {
            omega: 0.0,
            amplitude: samples[0].1,
            r_squared: 0.0,
            window,
        });
    }
    let count = logs.len() as f64;
    let t_mean = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let l_mean = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut stt, mut stl, mut sll) = (0.0, 0.0, 0.0);
    for &(t, l) in &logs {
        stt += (t - t_mean) * (t - t_mean);
        stl += (t - t_mean) * (l - l_mean);
        sll += (l - l_mean) * (l - l_mean);
    }
    let slope = stl / stt;
    let intercept = l_mean - slope * t_mean;
    let ss_res: f64 = logs
        .iter()
        .map(|&(t, l)| (l - intercept - slope * t).powi(2))
        .sum();
    let r_squared = if sll > 0.0 {
        (1.0 - ss_res / sll).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(RateFit {
        omega: -slope,
        amplitude: intercept.exp(),
        r_squared,
        window,
    })
}

/// Minkowski inner product `−a₀b₀ + a₁b₁ + a₂b₂`.
fn minkowski(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Geodesic curvature of a closed radial curve computed in the hyperboloid
/// model `{x : ⟨x, x⟩ = −1/|λ|, x₀ > 0}` of the hyperbolic plane.
///
/// The curve is embedded as `(c(ρ)/√|λ|, s(ρ) cos θ, s(ρ) sin θ)`; tangent
/// and acceleration come from central differences of the embedding, and
/// the sign is fixed by the outward normal (positive radial component).
pub fn hyperboloid_curvature_oracle(g: &RadialGraph) -> Result<Vec<f64>> {
    Ok(hyperboloid_frames(g)?
        .into_iter()
        .map(|(kappa, _)| kappa)
        .collect())
}

/// `σ = s(ρ) ⟨N, ∂_r⟩` from the same embedding as
/// [`hyperboloid_curvature_oracle`].
pub fn hyperboloid_support_oracle(g: &RadialGraph) -> Result<Vec<f64>> {
    let p = *g.params();
    Ok(hyperboloid_frames(g)?
        .into_iter()
        .zip(g.rho().values())
        .map(|((_, cos), &r)| p.s(r) * cos)
        .collect())
}

/// `(κ, ⟨N, ∂_r⟩)` per node.
fn hyperboloid_frames(g: &RadialGraph) -> Result<Vec<(f64, f64)>> {
    if g.grid().topology() != Topology::Circle {
        return Err(Error::Unsupported(
            "the hyperboloid oracle needs a circle grid".into(),
        ));
    }
    let p = g.params();
    let k = p.sqrt_abs_lambda();
    let grid = g.grid();
    let h = grid.spacing();
    let rho = g.rho().values();
    let m = rho.len();

    let embed: Vec<[f64; 3]> = rho
        .iter()
        .zip(grid.nodes())
        .map(|(&r, &t)| {
            let (s, c) = (p.s(r), p.c(r));
            [c / k, s * t.cos(), s * t.sin()]
        })
        .collect();

    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let (a, x, b) = (&embed[(j + m - 1) % m], &embed[j], &embed[(j + 1) % m]);
        let vel = [
            (b[0] - a[0]) / (2.0 * h),
            (b[1] - a[1]) / (2.0 * h),
            (b[2] - a[2]) / (2.0 * h),
        ];
        let acc = [
            (b[0] - 2.0 * x[0] + a[0]) / (h * h),
            (b[1] - 2.0 * x[1] + a[1]) / (h * h),
            (b[2] - 2.0 * x[2] + a[2]) / (h * h),
        ];
        // Project the velocity onto T_x: v + |λ| ⟨v, x⟩ x.
        let vx = minkowski(&vel, x) * k * k;
        let tangent = [vel[0] + vx * x[0], vel[1] + vx * x[1], vel[2] + vx * x[2]];
        let speed2 = minkowski(&tangent, &tangent);

        // Unit radial direction ∂_r at x, orthogonalized against the tangent.
        let t = grid.nodes()[j];
        let (s, c) = (p.s(rho[j]), p.c(rho[j]));
        let radial = [k * s, c * t.cos(), c * t.sin()];
        let proj = minkowski(&radial, &tangent) / speed2;
        let normal = [
            radial[0] - proj * tangent[0],
            radial[1] - proj * tangent[1],
            radial[2] - proj * tangent[2],
        ];
        let normal_len = minkowski(&normal, &normal).sqrt();
        let kappa = -minkowski(&acc, &normal) / (normal_len * speed2);
        let support = minkowski(&normal, &radial) / normal_len;
        out.push((kappa, support));
    }
    Ok(out)
}
