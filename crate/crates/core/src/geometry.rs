//! Extrinsic geometry of radial graphs `u ↦ exp_p(ρ(u) u)`.
//!
//! In an orthonormal frame `{e_i}` of `S^n` the induced metric, unit normal
//! and second fundamental form of the graph are
//!
//! ```text
//! g_ij = e_i(ρ) e_j(ρ) + s²(ρ) δ_ij
//! N    = (s(ρ) ∂_r − Σ e_i(ρ) τ e_i) / |ξ|,   |ξ| = √(s²(ρ) + |grad ρ|²)
//! α_ij = −(s(ρ) ∇²ρ − s²(ρ) c(ρ) g_S − 2 c(ρ) dρ⊗dρ)(e_i, e_j) / |ξ|
//! ```
//!
//! (`s`, `c` are the curvature-scaled hyperbolic sine and cosine). The mean
//! curvature is the trace `g^{ij} α_ij`, positive on round spheres.

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, Topology};
use crate::hyptrig::LambdaParams;

/// A star-shaped hypersurface given by its positive radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph {
    grid: Grid,
    rho: ScalarField,
    params: LambdaParams,
}

impl RadialGraph {
    pub fn new(grid: Grid, rho: ScalarField, params: LambdaParams) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::Config(
                "radial function and grid sizes differ".into(),
            ));
        }
        if let Some(j) = rho.values().iter().position(|&r| !(r > 0.0)) {
            return Err(Error::Domain(format!(
                "radial function must be positive, got {} at node {j}",
                rho.values()[j]
            )));
        }
        Ok(Self { grid, rho, params })
    }

    pub fn from_values(grid: Grid, values: Vec<f64>, params: LambdaParams) -> Result<Self> {
        let rho = grid.field(values)?;
        Self::new(grid, rho, params)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn params(&self) -> &LambdaParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Same grid and curvature, new radial values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::from_values(self.grid.clone(), values, self.params)
    }

    /// Cyclic node shift (circle grids).
    pub fn shifted(&self, k: usize) -> Self {
        Self {
            grid: self.grid.clone(),
            rho: self.rho.shifted(k),
            params: self.params,
        }
    }

    pub fn geometry(&self) -> GeometryFields {
        GeometryFields::compute(self)
    }
}

/// Per-node geometric quantities of a radial graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields {
    /// `|grad_S ρ|²`
    pub grad_sq: Vec<f64>,
    pub laplacian: Vec<f64>,
    /// `∇²ρ(grad ρ, grad ρ)`
    pub hessian_gg: Vec<f64>,
    /// `|ξ| = √(s²(ρ) + |grad ρ|²)`
    pub xi_norm: Vec<f64>,
    /// `⟨N, ∂_r⟩ = s(ρ)/|ξ|`
    pub support_cos: Vec<f64>,
    /// `σ = s(ρ) ⟨N, ∂_r⟩`
    pub sigma: Vec<f64>,
    pub mean_curvature: Vec<f64>,
    /// Principal curvature along the meridian (the only one when `n = 1`).
    pub kappa_meridional: Vec<f64>,
    /// Principal curvature of multiplicity `n − 1` along the parallels;
    /// empty on circle grids.
    pub kappa_azimuthal: Vec<f64>,
    pub kappa_min: Vec<f64>,
    pub kappa_max: Vec<f64>,
    /// `s^{n−1}(ρ) |ξ|`, the density of the area form w.r.t. `S^n`.
    pub area_element: Vec<f64>,
}

impl GeometryFields {
    pub fn compute(g: &RadialGraph) -> Self {
        let grid = g.grid();
        let p = g.params();
        let n = grid.n();
        let nf = n as f64;
        let rho = g.rho().values();
        let d1 = grid.first_derivative(rho);
        let d2 = grid.second_derivative(rho);
        let laplacian = grid.laplacian_from(&d1, &d2);
        let m = rho.len();

        let mut out = Self {
            grad_sq: Vec::with_capacity(m),
            laplacian,
            hessian_gg: Vec::with_capacity(m),
            xi_norm: Vec::with_capacity(m),
            support_cos: Vec::with_capacity(m),
            sigma: Vec::with_capacity(m),
            mean_curvature: Vec::with_capacity(m),
            kappa_meridional: Vec::with_capacity(m),
            kappa_azimuthal: Vec::new(),
            kappa_min: Vec::with_capacity(m),
            kappa_max: Vec::with_capacity(m),
            area_element: Vec::with_capacity(m),
        };
        let axisymmetric = grid.topology() == Topology::Axisymmetric;
        if axisymmetric {
            out.kappa_azimuthal.reserve(m);
        }

        for j in 0..m {
            let (s, c) = (p.s(rho[j]), p.c(rho[j]));
            let grad_sq = d1[j] * d1[j];
            let hess = d2[j] * grad_sq;
            let xi2 = s * s + grad_sq;
            let xi = xi2.sqrt();

            let h = -(out.laplacian[j] - hess / xi2) / (s * xi) + c / xi * (nf + grad_sq / xi2);
            // α(e_θ, e_θ) / g(e_θ, e_θ), with g_θθ = |ξ|².
            let k_mer = -(s * d2[j] - s * s * c - 2.0 * c * grad_sq) / (xi2 * xi);

            let (kmin, kmax) = if axisymmetric {
                // ∇²ρ on unit vectors along the parallels: cot θ ρ', or ρ'' at a pole.
                let hess_az = if grid.is_pole(j) {
                    d2[j]
                } else {
                    grid.cot(j) * d1[j]
                };
                let k_az = -(s * hess_az - s * s * c) / (xi * s * s);
                out.kappa_azimuthal.push(k_az);
                (k_mer.min(k_az), k_mer.max(k_az))
            } else {
                (k_mer, k_mer)
            };

            out.grad_sq.push(grad_sq);
            out.hessian_gg.push(hess);
            out.xi_norm.push(xi);
            out.support_cos.push(s / xi);
            out.sigma.push(s * s / xi);
            out.mean_curvature.push(h);
            out.kappa_meridional.push(k_mer);
            out.kappa_min.push(kmin);
            out.kappa_max.push(kmax);
            out.area_element.push(s.powi(n as i32 - 1) * xi);
        }
        out
    }

    /// Sum of the principal curvatures with multiplicity.
    pub fn principal_sum(&self, n: usize) -> Vec<f64> {
        if self.kappa_azimuthal.is_empty() {
            return self.kappa_meridional.clone();
        }
        let mult = (n - 1) as f64;
        self.kappa_meridional
            .iter()
            .zip(&self.kappa_azimuthal)
            .map(|(a, b)| a + mult * b)
            .collect()
    }
}

pub fn mean_curvature(g: &RadialGraph) -> Vec<f64> {
    GeometryFields::compute(g).mean_curvature
}

/// `(κ_min, κ_max)` per node.
pub fn principal_curvatures(g: &RadialGraph) -> (Vec<f64>, Vec<f64>) {
    let f = GeometryFields::compute(g);
    (f.kappa_min, f.kappa_max)
}

/// `(|ξ|, ⟨N, ∂_r⟩, σ)` per node.
pub fn xi_and_support(g: &RadialGraph) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let f = GeometryFields::compute(g);
    (f.xi_norm, f.support_cos, f.sigma)
}

pub fn area_element(g: &RadialGraph) -> Vec<f64> {
    GeometryFields::compute(g).area_element
}

/// Unit direction `u ∈ S^n ⊂ R^{n+1}` of grid node `j`, truncated to the
/// plane containing the symmetry axis (axisymmetric grids use the first
/// coordinate as the axis).
fn node_direction(grid: &Grid, j: usize) -> [f64; 2] {
    let t = grid.nodes()[j];
    [t.cos(), t.sin()]
}

/// Radial graph of the geodesic sphere of radius `r_s + z0` whose center has
/// normal coordinates `z` about the grid origin.
///
/// `z` has `n + 1` components; on axisymmetric grids only the axial
/// component (the first) may be nonzero.
pub fn offset_sphere_graph(
    grid: &Grid,
    params: LambdaParams,
    r_s: f64,
    z0: f64,
    z: &[f64],
) -> Result<RadialGraph> {
    if z.len() != grid.n() + 1 {
        return Err(Error::Config(format!(
            "center offset needs {} components, got {}",
            grid.n() + 1,
            z.len()
        )));
    }
    if grid.topology() == Topology::Axisymmetric && z[1..].iter().any(|&v| v != 0.0) {
        return Err(Error::Config(
            "axisymmetric offsets must lie along the axis".into(),
        ));
    }
    let radius = r_s + z0;
    let dist = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(radius > dist) || !radius.is_finite() {
        return Err(Error::Config(format!(
            "offset sphere of radius {radius} does not contain the origin (|z| = {dist})"
        )));
    }

    if dist == 0.0 {
        return RadialGraph::from_values(grid.clone(), vec![radius; grid.len()], params);
    }

    let lambda = params.lambda();
    let c_z = params.c(dist);
    let s_ratio = params.s(dist) / dist;
    let target = params.c(radius);

    let mut values = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let u = node_direction(grid, j);
        let q = s_ratio * (u[0] * z[0] + u[1] * z.get(1).copied().unwrap_or(0.0));
        let f = |r: f64| params.c(r) * c_z + lambda * params.s(r) * q - target;
        let df = |r: f64| -lambda * params.s(r) * c_z + lambda * params.c(r) * q;

        let (mut lo, mut hi) = (0.0_f64, radius + dist);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo < 1e-13 * hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d = df(r);
            if d == 0.0 {
                break;
            }
            let next = r - f(r) / d;
            if !(next > 0.0 && next.is_finite()) {
                break;
            }
            r = next;
        }
        values.push(r);
    }
    RadialGraph::from_values(grid.clone(), values, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(m: usize) -> Grid {
        Grid::new(Topology::Circle, 1, m).unwrap()
    }

    fn unit() -> LambdaParams {
        LambdaParams::default()
    }

    fn constant(grid: Grid, r: f64, p: LambdaParams) -> RadialGraph {
        let m = grid.len();
        RadialGraph::from_values(grid, vec![r; m], p).unwrap()
    }

    fn perturbed(m: usize) -> RadialGraph {
        let g = circle(m);
        let rho = g.field_from_fn(|t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
        RadialGraph::new(g, rho, unit()).unwrap()
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let g = circle(16);
        let mut v = vec![1.0; 16];
        v[4] = 0.0;
        assert!(matches!(
            RadialGraph::from_values(g.clone(), v, unit()),
            Err(Error::Domain(_))
        ));
        let mut v = vec![1.0; 16];
        v[2] = -0.5;
        assert!(RadialGraph::from_values(g, v, unit()).is_err());
    }

    #[test]
    fn centered_sphere_closed_forms() {
        let sinh1 = 1.0_f64.sinh();
        let coth1 = 1.0 / 1.0_f64.tanh();
        let f = constant(circle(64), 1.0, unit()).geometry();
        for j in 0..64 {
            assert!((f.xi_norm[j] - sinh1).abs() < 1e-12);
            assert_eq!(f.support_cos[j], 1.0);
            assert!((f.sigma[j] - sinh1).abs() < 1e-12);
            assert!((f.mean_curvature[j] - coth1).abs() < 1e-12);
            assert!((f.kappa_min[j] - coth1).abs() < 1e-12);
            assert!((f.kappa_max[j] - coth1).abs() < 1e-12);
            assert!((f.area_element[j] - sinh1).abs() < 1e-12);
        }
        assert!((coth1 - 1.313_035).abs() < 1e-6);

        for (n, r0, lambda) in [(2, 1.0, -1.0), (3, 0.4, -2.5), (5, 2.0, -0.3)] {
            let p = LambdaParams::new(lambda).unwrap();
            let grid = Grid::new(Topology::Axisymmetric, n, 33).unwrap();
            let f = constant(grid, r0, p).geometry();
            let co = p.co(r0).unwrap();
            for j in 0..33 {
                assert!((f.mean_curvature[j] - n as f64 * co).abs() < 1e-12 * co * n as f64);
                assert!((f.kappa_min[j] - co).abs() < 1e-12 * co);
                assert!((f.kappa_max[j] - co).abs() < 1e-12 * co);
                assert_eq!(f.support_cos[j], 1.0);
                let ae = p.s(r0).powi(n as i32);
                assert!((f.area_element[j] - ae).abs() < 1e-12 * ae);
            }
        }
    }

    #[test]
    fn support_is_one_for_any_constant_radius() {
        for r0 in [0.01, 0.3, 2.0, 7.5] {
            let f = constant(circle(32), r0, unit()).geometry();
            assert!(f.support_cos.iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn horosphere_limit() {
        let f = constant(circle(32), 20.0, unit()).geometry();
        assert!(f.mean_curvature.iter().all(|&h| (h - 1.0).abs() < 1e-8));
        let p = LambdaParams::new(-4.0).unwrap();
        let mut last = f64::INFINITY;
        for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let k = constant(circle(16), r, p).geometry().kappa_min[0];
            assert!(k > 2.0 && k < last);
            last = k;
        }
    }

    #[test]
    fn trace_consistency() {
        let f = perturbed(256).geometry();
        for (h, k) in f.mean_curvature.iter().zip(f.principal_sum(1)) {
            assert!((h - k).abs() < 1e-10);
        }
        for n in [2, 3, 4] {
            let grid = Grid::new(Topology::Axisymmetric, n, 65).unwrap();
            let rho = grid
                .field_from_fn(|t| 0.8 + 0.15 * t.cos() + 0.05 * (3.0 * t.cos().powi(2) - 1.0))
                .unwrap();
            let f = RadialGraph::new(grid, rho, unit()).unwrap().geometry();
            for (j, (h, k)) in f.mean_curvature.iter().zip(f.principal_sum(n)).enumerate() {
                assert!((h - k).abs() < 1e-10, "n={n} node {j}: {h} vs {k}");
                assert!(f.kappa_min[j] <= h / n as f64 + 1e-12);
                assert!(h / n as f64 <= f.kappa_max[j] + 1e-12);
            }
        }
    }

    #[test]
    fn area_element_axisymmetric_sphere() {
        let grid = Grid::new(Topology::Axisymmetric, 2, 129).unwrap();
        let f = constant(grid, 1.0, unit()).geometry();
        let s2 = 1.0_f64.sinh().powi(2);
        assert!(f.area_element.iter().all(|a| (a - s2).abs() < 1e-12));
    }

    #[test]
    fn xi_dominates_sinh() {
        let g = perturbed(128);
        let f = g.geometry();
        for (j, &r) in g.rho().values().iter().enumerate() {
            assert!(f.xi_norm[j] >= unit().s(r));
            assert!(f.support_cos[j] > 0.0 && f.support_cos[j] <= 1.0);
        }
    }

    #[test]
    fn offset_sphere_degenerate_is_centered() {
        let g = circle(64);
        let graph = offset_sphere_graph(&g, unit(), 1.3, 0.0, &[0.0, 0.0]).unwrap();
        assert!(graph
            .rho()
            .values()
            .iter()
            .all(|&r| (r - 1.3).abs() < 1e-14));
        let graph = offset_sphere_graph(&g, unit(), 1.0, 0.25, &[0.0, 0.0]).unwrap();
        assert!(graph
            .rho()
            .values()
            .iter()
            .all(|&r| (r - 1.25).abs() < 1e-14));
    }

    #[test]
    fn offset_sphere_rejects_exterior_center() {
        let g = circle(64);
        assert!(offset_sphere_graph(&g, unit(), 1.0, 0.0, &[1.0, 0.0]).is_err());
        assert!(offset_sphere_graph(&g, unit(), 1.0, 0.0, &[0.8, 0.8]).is_err());
        assert!(offset_sphere_graph(&g, unit(), 1.0, 0.0, &[0.1]).is_err());
        let a = Grid::new(Topology::Axisymmetric, 2, 33).unwrap();
        assert!(offset_sphere_graph(&a, unit(), 1.0, 0.0, &[0.0, 0.2, 0.0]).is_err());
        assert!(offset_sphere_graph(&a, unit(), 1.0, 0.0, &[0.2, 0.0, 0.0]).is_ok());
    }

    /// Geodesic distance between `exp(ρ u)` and `exp(z)` via the hyperboloid
    /// model, used to check the solved radii independently.
    fn hyperboloid_distance(p: &LambdaParams, rho: f64, theta: f64, z: [f64; 2]) -> f64 {
        let k = p.sqrt_abs_lambda();
        let point = |r: f64, dir: [f64; 2]| {
            [
                (k * r).cosh() / k,
                (k * r).sinh() / k * dir[0],
                (k * r).sinh() / k * dir[1],
            ]
        };
        let a = point(rho, [theta.cos(), theta.sin()]);
        let zn = (z[0] * z[0] + z[1] * z[1]).sqrt();
        let b = if zn > 0.0 {
            point(zn, [z[0] / zn, z[1] / zn])
        } else {
            point(0.0, [1.0, 0.0])
        };
        let inner = a[0] * b[0] - a[1] * b[1] - a[2] * b[2];
        (k * k * inner).max(1.0).acosh() / k
    }

    #[test]
    fn offset_sphere_points_are_equidistant_from_center() {
        for lambda in [-1.0, -3.0] {
            let p = LambdaParams::new(lambda).unwrap();
            let g = circle(64);
            let z = [0.2, -0.1];
            let graph = offset_sphere_graph(&g, p, 1.0, 0.2, &z).unwrap();
            for (j, &r) in graph.rho().values().iter().enumerate() {
                let d = hyperboloid_distance(&p, r, g.nodes()[j], z);
                assert!((d - 1.2).abs() < 1e-9, "node {j}: distance {d}");
            }
        }
    }

    #[test]
    fn offset_sphere_derivatives_at_origin() {
        let g = circle(32);
        let step = 1e-5;
        let solve = |z0: f64, z: [f64; 2]| {
            offset_sphere_graph(&g, unit(), 1.0, z0, &z)
                .unwrap()
                .rho()
                .values()
                .to_vec()
        };
        let (plus, minus) = (solve(step, [0.0, 0.0]), solve(-step, [0.0, 0.0]));
        for j in 0..32 {
            assert!(((plus[j] - minus[j]) / (2.0 * step) - 1.0).abs() < 1e-6);
        }
        for i in 0..2 {
            let mut zp = [0.0; 2];
            zp[i] = step;
            let mut zm = [0.0; 2];
            zm[i] = -step;
            let (plus, minus) = (solve(0.0, zp), solve(0.0, zm));
            for j in 0..32 {
                let u = [g.nodes()[j].cos(), g.nodes()[j].sin()];
                assert!(((plus[j] - minus[j]) / (2.0 * step) - u[i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn offset_sphere_has_constant_mean_curvature() {
        let g = circle(256);
        let graph = offset_sphere_graph(
            &g,
            unit(),
            1.0,
            0.2,
            &[0.3 / 2f64.sqrt(), 0.3 / 2f64.sqrt()],
        )
        .unwrap();
        let target = unit().co(1.2).unwrap();
        let h = mean_curvature(&graph);
        let dev = h.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
        assert!(dev < 5e-3, "deviation {dev}");

        let axis = Grid::new(Topology::Axisymmetric, 2, 257).unwrap();
        let graph = offset_sphere_graph(&axis, unit(), 1.0, 0.2, &[0.3, 0.0, 0.0]).unwrap();
        let h = mean_curvature(&graph);
        let dev = h
            .iter()
            .map(|v| (v - 2.0 * target).abs())
            .fold(0.0, f64::max);
        assert!(dev < 5e-3, "axisymmetric deviation {dev}");
    }

    #[test]
    fn rotation_equivariance_is_exact() {
        let g = perturbed(128);
        let base = g.geometry();
        for k in [1, 7, 64] {
            let shifted = g.shifted(k).geometry();
            let rot = |v: &Vec<f64>| {
                let mut w = v.clone();
                w.rotate_right(k);
                w
            };
            assert_eq!(shifted.mean_curvature, rot(&base.mean_curvature));
            assert_eq!(shifted.kappa_min, rot(&base.kappa_min));
            assert_eq!(shifted.sigma, rot(&base.sigma));
            assert_eq!(shifted.area_element, rot(&base.area_element));
        }
    }

    #[test]
    fn quarter_turn_values() {
        // ρ(θ) = 1 + 0.1 cos 2θ: symmetric nodes share curvatures.
        let f = perturbed(256).geometry();
        assert!((f.mean_curvature[0] - f.mean_curvature[128]).abs() < 1e-12);
        assert!((f.mean_curvature[64] - f.mean_curvature[192]).abs() < 1e-12);
    }
}
