//! Time integration of the radial-graph form of mean curvature flow (MCF)
//! and volume-preserving mean curvature flow (VPMCF).
//!
//! For a radial graph the normal-speed law `⟨∂_t X, N⟩ = H̄ − H` becomes
//!
//! ```text
//! ∂_t ρ = s^{−2}(ρ) (Δ_S ρ − ∇²ρ(grad ρ, grad ρ)/|ξ|²)
//!         − co(ρ) (n + |grad ρ|²/|ξ|²) + s^{−1}(ρ) H̄ |ξ|
//! ```
//!
//! and MCF drops the `H̄` term. The default scheme is Heun's method (explicit
//! RK2) under the parabolic step limit `dt = cfl · h² · s²(min ρ)`; a
//! first-order IMEX scheme treating `s^{−2} Δ_S ρ` implicitly with frozen
//! coefficients is available for long runs.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::geometry::{GeometryFields, RadialGraph};
use crate::grid::{Grid, ScalarField, Topology};
use crate::hyptrig::LambdaParams;
use crate::integrals::{self, enclosed_volume_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowMode {
    Mcf,
    Vpmcf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Rk2,
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeStep {
    /// Constant step.
    Fixed(f64),
    /// `dt = cfl · h² · s²(min ρ)`, recomputed every step.
    Cfl(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub mode: FlowMode,
    pub scheme: Scheme,
    pub time_step: TimeStep,
    pub t_max: f64,
    /// Restores the target volume after each VPMCF step; ignored for MCF.
    pub renormalize_volume: bool,
    /// Volume enforced by renormalization; the initial volume when unset.
    pub target_volume: Option<f64>,
    /// VPMCF stops once `sup|H − H̄|` is at or below this value.
    pub stop_tolerance: Option<f64>,
    /// Output interval.
    pub cadence: f64,
    /// Adaptive steps below this size are reported as a singularity.
    pub min_dt: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            mode: FlowMode::Vpmcf,
            scheme: Scheme::Rk2,
            time_step: TimeStep::Cfl(0.25),
            t_max: 10.0,
            renormalize_volume: true,
            target_volume: None,
            stop_tolerance: None,
            cadence: 0.1,
            min_dt: 1e-12,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Config(format!("dt must be positive, got {dt}")))
            }
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 0.5) => {
                return Err(Error::Config(format!("cfl must lie in (0, 0.5], got {c}")))
            }
            _ => {}
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if !(self.cadence > 0.0 && self.cadence.is_finite()) {
            return Err(Error::Config(format!(
                "cadence must be positive, got {}",
                self.cadence
            )));
        }
        if let Some(v) = self.target_volume {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "target volume must be positive, got {v}"
                )));
            }
        }
        if let Some(tol) = self.stop_tolerance {
            if !(tol >= 0.0) {
                return Err(Error::Config(format!(
                    "stop tolerance must be >= 0, got {tol}"
                )));
            }
        }
        if !(self.min_dt > 0.0) {
            return Err(Error::Config("min_dt must be positive".into()));
        }
        Ok(())
    }

    /// Step size for the given state.
    pub fn step_size(&self, graph: &RadialGraph) -> f64 {
        match self.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(cfl) => {
                let h = graph.grid().spacing();
                let s = graph.params().s(graph.rho().min());
                // The pole rows of the axisymmetric Laplacian scale with n.
                let dim = (2.0 / graph.n() as f64).min(1.0);
                cfl * h * h * s * s * dim
            }
        }
    }
}

/// A time-stamped graph with cached integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub graph: RadialGraph,
    pub area: f64,
    pub volume: f64,
    pub h_bar: f64,
    /// `sup |H − H̄|`
    pub sup_dev: f64,
    /// `min κ − √|λ|`
    pub kappa_margin: f64,
    /// Uniform radial shift applied by the last volume renormalization.
    pub renorm_delta: f64,
}

impl FlowState {
    pub fn new(graph: RadialGraph, t: f64) -> Self {
        let fields = graph.geometry();
        Self::with_fields(graph, &fields, t, 0.0)
    }

    fn with_fields(graph: RadialGraph, fields: &GeometryFields, t: f64, renorm_delta: f64) -> Self {
        let h_bar = integrals::averaged_mean_curvature_from(graph.grid(), fields);
        let sup_dev = fields
            .mean_curvature
            .iter()
            .map(|h| (h - h_bar).abs())
            .fold(0.0, f64::max);
        let kappa_min = fields
            .kappa_min
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let kappa_margin = kappa_min - graph.params().sqrt_abs_lambda();
        Self {
            t,
            area: integrals::surface_area_from(&graph, fields),
            volume: integrals::enclosed_volume(&graph),
            h_bar,
            sup_dev,
            kappa_margin,
            renorm_delta,
            graph,
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TimeLimit,
    Converged,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// States at the output times.
    pub snapshots: Vec<FlowState>,
    pub rows: Vec<DiagnosticsRow>,
    pub final_state: FlowState,
    pub initial_volume: f64,
    pub steps: usize,
    /// Largest per-step increase of the area (negative if area always fell).
    pub max_area_increase: f64,
    pub max_renorm_delta: f64,
    pub termination: Termination,
}

fn check_values(values: &[f64], t: f64) -> Result<()> {
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Singularity {
            t,
            reason: format!("non-finite radius at node {j}"),
        });
    }
    if let Some(j) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Singularity {
            t,
            reason: format!("radius {} at node {j} is not positive", values[j]),
        });
    }
    Ok(())
}

/// Right-hand side of the graph equation from precomputed geometry.
fn rhs_from(graph: &RadialGraph, fields: &GeometryFields, mode: FlowMode) -> Vec<f64> {
    let p = graph.params();
    let nf = graph.n() as f64;
    let h_bar = match mode {
        FlowMode::Mcf => 0.0,
        FlowMode::Vpmcf => integrals::averaged_mean_curvature_from(graph.grid(), fields),
    };
    graph
        .rho()
        .values()
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let (s, c) = (p.s(r), p.c(r));
            let xi = fields.xi_norm[j];
            let xi2 = xi * xi;
            (fields.laplacian[j] - fields.hessian_gg[j] / xi2) / (s * s)
                - c / s * (nf + fields.grad_sq[j] / xi2)
                + h_bar * xi / s
        })
        .collect()
}

/// `∂ρ/∂t` for the given mode.
pub fn rhs(graph: &RadialGraph, mode: FlowMode) -> ScalarField {
    let fields = graph.geometry();
    let values = rhs_from(graph, &fields, mode);
    graph
        .grid()
        .field(values)
        .expect("rhs of a valid graph is finite")
}

/// Uniform radial shift `δ` with `vol(ρ + δ) = target`.
pub fn renormalize_volume(graph: &RadialGraph, target: f64) -> Result<(RadialGraph, f64)> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::Domain(format!(
            "target volume must be positive, got {target}"
        )));
    }
    let (grid, p) = (graph.grid(), graph.params());
    let rho = graph.rho().values();
    let n = grid.n();
    let rule = integrals::QuadratureRule::new(grid);
    let shifted = |d: f64| -> Vec<f64> { rho.iter().map(|r| r + d).collect() };
    let residual = |d: f64| enclosed_volume_of(grid, p, &shifted(d)) - target;

    let r0 = residual(0.0);
    if r0 == 0.0 {
        return Ok((graph.clone(), 0.0));
    }
    if (r0 / target).abs() > 0.5 {
        return Err(Error::Divergence(format!(
            "volume {} is more than 50% away from the target {target}",
            r0 + target
        )));
    }

    // Safeguarded Newton on a bracket; vol is increasing in d.
    let min_rho = graph.rho().min();
    let (mut lo, mut hi) = (-min_rho, f64::INFINITY);
    let mut d = 0.0;
    let mut res = r0;
    for _ in 0..100 {
        if res < 0.0 {
            lo = lo.max(d);
        } else {
            hi = hi.min(d);
        }
        let deriv: Vec<f64> = shifted(d).iter().map(|&r| p.s(r).powi(n as i32)).collect();
        let slope = rule.integrate(&deriv);
        let mut next = d - res / slope;
        if !(next > lo && next < hi) {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                d + 2.0 * (d - lo).abs().max(1e-3)
            };
        }
        if next == d {
            break;
        }
        d = next;
        res = residual(d);
        if res.abs() <= 4.0 * f64::EPSILON * target {
            break;
        }
    }
    let out = graph
        .with_values(shifted(d))
        .map_err(|e| Error::Divergence(e.to_string()))?;
    Ok((out, d))
}

/// Radius at time `t` of a geodesic sphere of initial radius `r0` moving by
/// MCF: `c(r(t)) = e^{λ n t} c(r0)`.
pub fn exact_mcf_sphere(r0: f64, t: f64, n: usize, params: &LambdaParams) -> Result<f64> {
    let t_star = mcf_extinction_time(r0, n, params);
    if t >= t_star {
        return Err(Error::Extinction { t, t_star });
    }
    params.c_inverse((params.lambda() * n as f64 * t).exp() * params.c(r0))
}

/// `ln c(r0) / (−λ n)`
pub fn mcf_extinction_time(r0: f64, n: usize, params: &LambdaParams) -> f64 {
    params.c(r0).ln() / (-params.lambda() * n as f64)
}

/// Advances `state` by `dt`.
pub fn step(state: &FlowState, dt: f64, config: &FlowConfig) -> Result<FlowState> {
    let graph = &state.graph;
    let t_new = state.t + dt;
    let rho = graph.rho().values();
    let fields = graph.geometry();
    let k1 = rhs_from(graph, &fields, config.mode);

    let values: Vec<f64> = match config.scheme {
        Scheme::Rk2 => {
            let stage: Vec<f64> = rho.iter().zip(&k1).map(|(r, k)| r + dt * k).collect();
            check_values(&stage, t_new)?;
            let stage_graph = graph.with_values(stage.clone())?;
            let k2 = rhs_from(&stage_graph, &stage_graph.geometry(), config.mode);
            rho.iter()
                .zip(k1.iter().zip(&k2))
                .map(|(r, (a, b))| r + 0.5 * dt * (a + b))
                .collect()
        }
        Scheme::SemiImplicit => semi_implicit_update(graph, &fields, &k1, dt),
    };
    check_values(&values, t_new)?;
    let mut next = graph.with_values(values)?;

    let mut delta = 0.0;
    if config.renormalize_volume && config.mode == FlowMode::Vpmcf {
        let target = config.target_volume.unwrap_or(state.volume);
        let (g, d) = renormalize_volume(&next, target).map_err(|e| match e {
            Error::Divergence(msg) => Error::Singularity {
                t: t_new,
                reason: msg,
            },
            other => other,
        })?;
        next = g;
        delta = d;
    }
    let fields = next.geometry();
    Ok(FlowState::with_fields(next, &fields, t_new, delta))
}

/// `(I − dt A L) ρ⁺ = ρ + dt (f(ρ) − A L ρ)` with `A = s^{−2}(ρ)` and `L`
/// the discrete sphere Laplacian.
fn semi_implicit_update(
    graph: &RadialGraph,
    fields: &GeometryFields,
    f: &[f64],
    dt: f64,
) -> Vec<f64> {
    let grid = graph.grid();
    let p = graph.params();
    let rho = graph.rho().values();
    let m = rho.len();
    let a: Vec<f64> = rho.iter().map(|&r| 1.0 / p.s(r).powi(2)).collect();
    let (lower, diag, upper) = laplacian_bands(grid);

    let rhs: Vec<f64> = (0..m)
        .map(|j| rho[j] + dt * (f[j] - a[j] * fields.laplacian[j]))
        .collect();
    let lo: Vec<f64> = (0..m).map(|j| -dt * a[j] * lower[j]).collect();
    let di: Vec<f64> = (0..m).map(|j| 1.0 - dt * a[j] * diag[j]).collect();
    let up: Vec<f64> = (0..m).map(|j| -dt * a[j] * upper[j]).collect();
    match grid.topology() {
        Topology::Circle => solve_cyclic_tridiagonal(&lo, &di, &up, &rhs),
        Topology::Axisymmetric => solve_tridiagonal(&lo, &di, &up, &rhs),
    }
}

/// Bands of the discrete Laplacian; on circle grids `lower[0]` and
/// `upper[m−1]` are the periodic corner entries.
fn laplacian_bands(grid: &Grid) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = grid.len();
    let h = grid.spacing();
    let inv = 1.0 / (h * h);
    match grid.topology() {
        Topology::Circle => (vec![inv; m], vec![-2.0 * inv; m], vec![inv; m]),
        Topology::Axisymmetric => {
            let nf = grid.n() as f64;
            let mut lower = vec![0.0; m];
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            diag[0] = -2.0 * nf * inv;
            upper[0] = 2.0 * nf * inv;
            diag[m - 1] = -2.0 * nf * inv;
            lower[m - 1] = 2.0 * nf * inv;
            for j in 1..m - 1 {
                let q = (nf - 1.0) * grid.cot(j) / (2.0 * h);
                lower[j] = inv - q;
                diag[j] = -2.0 * inv;
                upper[j] = inv + q;
            }
            (lower, diag, upper)
        }
    }
}

/// Thomas algorithm; `lower[0]` and `upper[m−1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for j in 1..m {
        let denom = diag[j] - lower[j] * c[j - 1];
        c[j] = if j + 1 < m { upper[j] / denom } else { 0.0 };
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for j in (0..m - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    x
}

/// Periodic tridiagonal system via Sherman-Morrison.
fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let (alpha, beta) = (upper[m - 1], lower[0]);
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[m - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(lower, &b, upper, rhs);
    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = alpha;
    let z = solve_tridiagonal(lower, &b, upper, &u);
    let fact = (x[0] + beta * x[m - 1] / gamma) / (1.0 + z[0] + beta * z[m - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

/// Runs the flow from `initial` at `t = 0`.
pub fn run(initial: RadialGraph, config: &FlowConfig) -> Result<Trajectory> {
    run_from(FlowState::new(initial, 0.0), config)
}

/// Runs the flow from an existing state until `config.t_max`.
///
/// Output times are the multiples of `config.cadence` up to `t_max`; steps
/// are shortened to land on them exactly, so a run resumed from a recorded
/// state reproduces the original trajectory bit for bit.
pub fn run_from(start: FlowState, config: &FlowConfig) -> Result<Trajectory> {
    config.validate()?;
    let mut config = config.clone();
    let initial_volume = config.target_volume.unwrap_or(start.volume);
    config.target_volume = Some(initial_volume);

    let ticks = (config.t_max / config.cadence + 1e-9).floor() as u64;
    let tick_time = |k: u64| (k as f64 * config.cadence).min(config.t_max);
    let mut next_tick = (start.t / config.cadence + 1e-9).floor() as u64 + 1;

    let mut state = start;
    let mut snapshots = vec![state.clone()];
    let mut rows = vec![DiagnosticsRow::from_state(&state, initial_volume)];
    let mut steps = 0usize;
    let mut max_area_increase = f64::NEG_INFINITY;
    let mut max_renorm_delta: f64 = 0.0;

    let converged = |s: &FlowState| {
        config.mode == FlowMode::Vpmcf && config.stop_tolerance.is_some_and(|tol| s.sup_dev <= tol)
    };

    let termination = loop {
        if converged(&state) {
            if snapshots.last().map(|s| s.t) != Some(state.t) {
                rows.push(DiagnosticsRow::from_state(&state, initial_volume));
                snapshots.push(state.clone());
            }
            break Termination::Converged;
        }
        if state.t >= config.t_max {
            break Termination::TimeLimit;
        }
        let target = if next_tick <= ticks {
            tick_time(next_tick)
        } else {
            config.t_max
        };
        let mut dt = config.step_size(&state.graph);
        if matches!(config.time_step, TimeStep::Cfl(_)) && dt < config.min_dt {
            return Err(Error::Singularity {
                t: state.t,
                reason: format!("step size {dt:e} fell below {:e}", config.min_dt),
            });
        }
        let landing = state.t + dt >= target;
        if landing {
            dt = target - state.t;
        }
        let mut next = step(&state, dt, &config)?;
        if landing {
            next.t = target;
        }
        steps += 1;
        max_area_increase = max_area_increase.max(next.area - state.area);
        max_renorm_delta = max_renorm_delta.max(next.renorm_delta.abs());
        state = next;

        if landing && next_tick <= ticks && target == tick_time(next_tick) {
            rows.push(DiagnosticsRow::from_state(&state, initial_volume));
            snapshots.push(state.clone());
            next_tick += 1;
        }
    };

    Ok(Trajectory {
        snapshots,
        rows,
        final_state: state,
        initial_volume,
        steps,
        max_area_increase,
        max_renorm_delta,
        termination,
    })
}

impl Trajectory {
    /// `(t, sup|H − H̄|)` at the output times.
    pub fn sup_dev_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.sup_dev)).collect()
    }

    pub fn check_bounds(&self) -> Vec<diagnostics::BoundsReport> {
        self.snapshots
            .iter()
            .zip(&self.rows)
            .map(|(s, r)| diagnostics::check_bounds(r, &s.graph, self.initial_volume))
            .collect()
    }
}
