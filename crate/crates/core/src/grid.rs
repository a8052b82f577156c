//! Uniform discretizations of the parameter sphere `S^n` and second-order
//! finite-difference operators on sampled functions.
//!
//! Two topologies are supported:
//! - [`Topology::Circle`]: `S^1` with `m` periodic nodes `θ_j = 2πj/m`;
//! - [`Topology::Axisymmetric`]: functions on `S^n` (`n ≥ 2`) depending only
//!   on the polar angle, sampled at `θ_j = jπ/(m−1)` including both poles.
//!
//! On axisymmetric grids the poles are removable singularities of the
//! Laplace-Beltrami operator: there `∂_θ f = 0` and `Δ f = n ∂_θ² f`, with
//! `∂_θ² f` taken from the even reflection of `f` across the pole.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Circle,
    Axisymmetric,
}

impl Topology {
    /// Circle for curves, axisymmetric otherwise.
    pub fn for_dim(n: usize) -> Self {
        if n == 1 {
            Topology::Circle
        } else {
            Topology::Axisymmetric
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    topology: Topology,
    n: usize,
    nodes: Vec<f64>,
    h: f64,
}

/// Node values of a function on a [`Grid`]; always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at node {j}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cyclic shift by `k` cells: `out[j] = self[j − k mod m]`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_right(k % self.values.len().max(1));
        Self { values }
    }
}

impl Grid {
    pub fn new(topology: Topology, n: usize, m: usize) -> Result<Self> {
        if m < MIN_NODES {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_NODES} nodes, got {m}"
            )));
        }
        let (nodes, h) = match topology {
            Topology::Circle => {
                if n != 1 {
                    return Err(Error::Config(format!(
                        "circle grids need n = 1, got n = {n}"
                    )));
                }
                let h = 2.0 * PI / m as f64;
                ((0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect(), h)
            }
            Topology::Axisymmetric => {
                if n < 2 {
                    return Err(Error::Config(format!(
                        "axisymmetric grids need n >= 2, got n = {n}"
                    )));
                }
                let last = (m - 1) as f64;
                let mut nodes: Vec<f64> = (0..m).map(|j| j as f64 * PI / last).collect();
                nodes[m - 1] = PI;
                (nodes, PI / last)
            }
        };
        Ok(Self {
            topology,
            n,
            nodes,
            h,
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Dimension of the hypersurface (the parameter sphere is `S^n`).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn field(&self, values: Vec<f64>) -> Result<ScalarField> {
        ScalarField::new(self, values)
    }

    pub fn field_from_fn(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        self.field(self.nodes.iter().map(|&t| f(t)).collect())
    }

    /// Whether node `j` is a pole of an axisymmetric grid.
    #[inline]
    pub fn is_pole(&self, j: usize) -> bool {
        self.topology == Topology::Axisymmetric && (j == 0 || j + 1 == self.len())
    }

    /// `cot θ_j` at interior axisymmetric nodes.
    #[inline]
    pub(crate) fn cot(&self, j: usize) -> f64 {
        let t = self.nodes[j];
        t.cos() / t.sin()
    }

    /// First derivative along the parameter angle; zero at poles.
    pub fn first_derivative(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.len(), "field and grid sizes differ");
        let m = f.len();
        let inv = 0.5 / self.h;
        match self.topology {
            Topology::Circle => (0..m)
                .map(|j| {
                    let (prev, next) = ((j + m - 1) % m, (j + 1) % m);
                    (f[next] - f[prev]) * inv
                })
                .collect(),
            Topology::Axisymmetric => (0..m)
                .map(|j| {
                    if self.is_pole(j) {
                        0.0
                    } else {
                        (f[j + 1] - f[j - 1]) * inv
                    }
                })
                .collect(),
        }
    }

    /// Second derivative along the parameter angle. At poles the stencil
    /// uses the even reflection `f(−h) = f(h)`.
    pub fn second_derivative(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.len(), "field and grid sizes differ");
        let m = f.len();
        let inv = 1.0 / (self.h * self.h);
        match self.topology {
            Topology::Circle => (0..m)
                .map(|j| {
                    let (prev, next) = ((j + m - 1) % m, (j + 1) % m);
                    (f[next] - 2.0 * f[j] + f[prev]) * inv
                })
                .collect(),
            Topology::Axisymmetric => (0..m)
                .map(|j| {
                    if j == 0 {
                        2.0 * (f[1] - f[0]) * inv
                    } else if j + 1 == m {
                        2.0 * (f[m - 2] - f[m - 1]) * inv
                    } else {
                        (f[j + 1] - 2.0 * f[j] + f[j - 1]) * inv
                    }
                })
                .collect(),
        }
    }

    /// Laplace-Beltrami operator of `S^n` from precomputed angular
    /// derivatives.
    pub(crate) fn laplacian_from(&self, d1: &[f64], d2: &[f64]) -> Vec<f64> {
        match self.topology {
            Topology::Circle => d2.to_vec(),
            Topology::Axisymmetric => {
                let nm1 = (self.n - 1) as f64;
                (0..self.len())
                    .map(|j| {
                        if self.is_pole(j) {
                            self.n as f64 * d2[j]
                        } else {
                            d2[j] + nm1 * self.cot(j) * d1[j]
                        }
                    })
                    .collect()
            }
        }
    }

    /// `|grad_{S^n} f|²`.
    pub fn gradient_sq(&self, f: &ScalarField) -> ScalarField {
        let values = self
            .first_derivative(f.values())
            .into_iter()
            .map(|d| d * d)
            .collect();
        ScalarField { values }
    }

    /// `Δ_{S^n} f`.
    pub fn laplacian(&self, f: &ScalarField) -> ScalarField {
        let d1 = self.first_derivative(f.values());
        let d2 = self.second_derivative(f.values());
        ScalarField {
            values: self.laplacian_from(&d1, &d2),
        }
    }

    /// `∇² f(grad f, grad f)`. For functions of one angle the gradient is
    /// meridional, so this is `∂_θ² f · (∂_θ f)²`.
    pub fn hessian_grad_grad(&self, f: &ScalarField) -> ScalarField {
        let d1 = self.first_derivative(f.values());
        let d2 = self.second_derivative(f.values());
        let values = d1.iter().zip(&d2).map(|(a, b)| b * a * a).collect();
        ScalarField { values }
    }
}
