//! Quadrature over the parameter sphere: surface area, enclosed volume and
//! the averaged mean curvature.
//!
//! Sums are taken over node values sorted in a fixed total order, so every integral is invariant (bit for bit) under permutations
//! of the nodes. On circle grids this makes all integrals exactly
//! equivariant under cyclic shifts.

use crate::geometry::{GeometryFields, RadialGraph};
use crate::grid::{Grid, Topology};
use crate::hyptrig::sphere_volume;

/// Trapezoid weights on the parameter sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Circle: uniform `h`. Axisymmetric: `h vol(S^{n−1}) sin^{n−1} θ_j` with
    /// halved end weights, rescaled so the weights sum to `vol(S^n)`.
    pub fn new(grid: &Grid) -> Self {
        let h = grid.spacing();
        let weights = match grid.topology() {
            Topology::Circle => vec![h; grid.len()],
            Topology::Axisymmetric => {
                let n = grid.n();
                let last = grid.len() - 1;
                let base = h * sphere_volume(n - 1);
                let raw: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .enumerate()
                    .map(|(j, t)| {
                        let end = if j == 0 || j == last { 0.5 } else { 1.0 };
                        end * base * t.sin().abs().powi(n as i32 - 1)
                    })
                    .collect();
                let scale = sphere_volume(n) / invariant_sum(raw.iter().copied());
                raw.into_iter().map(|w| w * scale).collect()
            }
        };
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_j f_j`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(
            values.len(),
            self.weights.len(),
            "field and rule sizes differ"
        );
        invariant_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }
}

/// Compensated sum over values in sorted order; the result does not depend
/// on the order of the input.
pub fn invariant_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_unstable_by(f64::total_cmp);
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn surface_area(g: &RadialGraph) -> f64 {
    surface_area_from(g, &g.geometry())
}

pub fn surface_area_from(g: &RadialGraph, fields: &GeometryFields) -> f64 {
    QuadratureRule::new(g.grid()).integrate(&fields.area_element)
}

/// `∫_{S^n} ∫_0^{ρ(u)} s^n(t) dt du`, the inner integral in closed form.
pub fn enclosed_volume(g: &RadialGraph) -> f64 {
    enclosed_volume_of(g.grid(), g.params(), g.rho().values())
}

pub(crate) fn enclosed_volume_of(
    grid: &Grid,
    params: &crate::hyptrig::LambdaParams,
    rho: &[f64],
) -> f64 {
    let n = grid.n();
    let radial: Vec<f64> = rho.iter().map(|&r| params.radial_volume(r, n)).collect();
    QuadratureRule::new(grid).integrate(&radial)
}

/// Area-weighted mean of the mean curvature, clamped to `[min H, max H]`.
/// Non-finite curvature yields NaN.
pub fn averaged_mean_curvature(g: &RadialGraph) -> f64 {
    averaged_mean_curvature_from(g.grid(), &g.geometry())
}

pub fn averaged_mean_curvature_from(grid: &Grid, fields: &GeometryFields) -> f64 {
    let rule = QuadratureRule::new(grid);
    let weighted: Vec<f64> = fields
        .mean_curvature
        .iter()
        .zip(&fields.area_element)
        .map(|(h, a)| h * a)
        .collect();
    let mean = rule.integrate(&weighted) / rule.integrate(&fields.area_element);
    let lo = fields
        .mean_curvature
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = fields
        .mean_curvature
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(lo <= hi) || !mean.is_finite() {
        return f64::NAN;
    }
    mean.clamp(lo, hi)
}
