//! Hyperbolic trigonometry scaled to ambient curvature `λ < 0`.
//!
//! With `k = √|λ|`:
//!
//! ```text
//! s_λ(t) = sinh(k t) / k,   c_λ = s_λ',   ta_λ = s_λ / c_λ,   co_λ = c_λ / s_λ
//! ```
//!
//! These satisfy `c_λ² + λ s_λ² = 1`, `c_{4λ} = c_λ² − λ s_λ²` and
//! `s_{4λ} = s_λ c_λ`. The module also provides the volume of geodesic balls
//! and the two inverse functions `ψ` (radius of the ball of a given volume)
//! and `ξ` (lower inradius bound) used by the diagnostics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient sectional curvature `λ < 0` and the derived `√|λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LambdaParams {
    lambda: f64,
    sqrt_abs_lambda: f64,
}

impl TryFrom<f64> for LambdaParams {
    type Error = Error;

    fn try_from(lambda: f64) -> Result<Self> {
        Self::new(lambda)
    }
}

impl From<LambdaParams> for f64 {
    fn from(p: LambdaParams) -> f64 {
        p.lambda
    }
}

impl Default for LambdaParams {
    fn default() -> Self {
        Self {
            lambda: -1.0,
            sqrt_abs_lambda: 1.0,
        }
    }
}

/// `s_λ`, `c_λ` and `ta_λ` evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigValues {
    pub s: f64,
    pub c: f64,
    pub ta: f64,
}

impl TrigValues {
    /// `co_λ = c_λ / s_λ`; singular where `s_λ` vanishes (`t = 0`).
    pub fn co(&self) -> Result<f64> {
        if self.s == 0.0 {
            return Err(Error::Pole(0.0));
        }
        Ok(self.c / self.s)
    }
}

impl LambdaParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda < 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "ambient curvature must be finite and negative, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            sqrt_abs_lambda: (-lambda).sqrt(),
        })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `√|λ|`, the normal curvature of a horosphere.
    #[inline]
    pub fn sqrt_abs_lambda(&self) -> f64 {
        self.sqrt_abs_lambda
    }

    #[inline]
    pub fn s(&self, t: f64) -> f64 {
        let k = self.sqrt_abs_lambda;
        (k * t).sinh() / k
    }

    #[inline]
    pub fn c(&self, t: f64) -> f64 {
        (self.sqrt_abs_lambda * t).cosh()
    }

    #[inline]
    pub fn ta(&self, t: f64) -> f64 {
        let k = self.sqrt_abs_lambda;
        (k * t).tanh() / k
    }

    pub fn co(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::Pole(t));
        }
        let k = self.sqrt_abs_lambda;
        Ok(k / (k * t).tanh())
    }

    pub fn trig(&self, t: f64) -> TrigValues {
        TrigValues {
            s: self.s(t),
            c: self.c(t),
            ta: self.ta(t),
        }
    }

    /// Inverse of `c_λ` on `[1, ∞)`.
    pub fn c_inverse(&self, c: f64) -> Result<f64> {
        if !(c >= 1.0) {
            return Err(Error::Domain(format!(
                "c_lambda inverse needs c >= 1, got {c}"
            )));
        }
        // acosh(c) = 2 asinh(sqrt((c - 1) / 2)) keeps precision near c = 1.
        Ok(2.0 * ((c - 1.0) / 2.0).sqrt().asinh() / self.sqrt_abs_lambda)
    }

    /// `B(ℓ) = ∫_0^ℓ s_λ^n(t) dt`, the radial factor of the volume of a
    /// geodesic ball of radius `ℓ` in dimension `n + 1`.
    pub fn radial_volume(&self, ell: f64, n: usize) -> f64 {
        let k = self.sqrt_abs_lambda;
        let u = k * ell;
        sinh_power_integral(u, n) / k.powi(n as i32 + 1)
    }

    /// Volume of the geodesic ball of radius `r` in the `(n+1)`-dimensional
    /// space form.
    pub fn ball_volume(&self, r: f64, n: usize) -> f64 {
        sphere_volume(n) * self.radial_volume(r, n)
    }

    /// `ψ(V0)`: radius of the geodesic ball of volume `V0`.
    pub fn psi(&self, volume: f64, n: usize) -> Result<f64> {
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::Domain(format!(
                "psi needs a positive volume, got {volume}"
            )));
        }
        if n == 0 {
            return Err(Error::Domain("psi needs dimension n >= 1".into()));
        }
        let k = self.sqrt_abs_lambda;
        if n == 1 {
            // 2π (c_λ(r) − 1)/|λ| = V0, with c − 1 = 2 sinh²(k r / 2).
            let half = (-self.lambda * volume / (4.0 * PI)).sqrt();
            return Ok(2.0 * half.asinh() / k);
        }

        let f = |r: f64| self.ball_volume(r, n) - volume;
        let mut hi = 1.0 / k;
        while f(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Domain(format!("psi: volume {volume} out of range")));
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let area = sphere_volume(n);
        let mut r = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = area * self.s(r).powi(n as i32);
            if d <= 0.0 {
                break;
            }
            let next = r - f(r) / d;
            if !(next > lo && next < hi) {
                break;
            }
            r = next;
        }
        Ok(r)
    }

    /// The map `x ↦ x + √|λ| ln((1 + √τ)² / (1 + τ))`, `τ = ta_λ(x/2)`,
    /// whose inverse is [`LambdaParams::xi`].
    pub fn xi_forward(&self, x: f64) -> f64 {
        let tau = self.ta(0.5 * x);
        let root = tau.sqrt();
        // (1 + √τ)² / (1 + τ) = 1 + 2√τ / (1 + τ)
        x + self.sqrt_abs_lambda * (2.0 * root / (1.0 + tau)).ln_1p()
    }

    /// `ξ(s)`: the unique `x ∈ [0, s]` with `xi_forward(x) = s`.
    pub fn xi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("xi needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0_f64, s);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.xi_forward(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// `vol(S^n)`, the area of the unit `n`-sphere.
pub fn sphere_volume(n: usize) -> f64 {
    // vol(S^k) = 2π / (k − 1) · vol(S^{k−2}), vol(S^0) = 2, vol(S^1) = 2π.
    let mut v = if n.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut k = if n.is_multiple_of(2) { 0 } else { 1 };
    while k < n {
        k += 2;
        v *= 2.0 * PI / (k - 1) as f64;
    }
    v
}

/// `∫_0^u sinh^n(x) dx` for `u ≥ 0`.
fn sinh_power_integral(u: f64, n: usize) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u < 0.5 {
        return sinh_power_integral_series(u, n);
    }
    // J_n = sinh^{n−1}(u) cosh(u) / n − (n − 1)/n · J_{n−2}
    let (sh, ch) = (u.sinh(), u.cosh());
    let mut prev2 = u; // J_0
    let mut prev1 = 2.0 * (0.5 * u).sinh().powi(2); // J_1 = cosh u − 1
    if n == 0 {
        return prev2;
    }
    for j in 2..=n {
        let jf = j as f64;
        let next = sh.powi(j as i32 - 1) * ch / jf - (jf - 1.0) / jf * prev2;
        prev2 = prev1;
        prev1 = next;
    }
    prev1
}

/// Power series of `∫_0^u sinh^n`, accurate for small `u` where the
/// reduction formula cancels.
fn sinh_power_integral_series(u: f64, n: usize) -> f64 {
    const TERMS: usize = 16;
    // sinh(x)/x = Σ x^{2i} / (2i + 1)!
    let mut base = [0.0; TERMS];
    let mut fact = 1.0;
    for (i, b) in base.iter_mut().enumerate() {
        if i > 0 {
            fact *= (2 * i) as f64 * (2 * i + 1) as f64;
        }
        *b = 1.0 / fact;
    }
    let mut power = [0.0; TERMS];
    power[0] = 1.0;
    for _ in 0..n {
        let mut next = [0.0; TERMS];
        for i in 0..TERMS {
            for j in 0..TERMS - i {
                next[i + j] += power[i] * base[j];
            }
        }
        power = next;
    }
    let u2 = u * u;
    let mut upow = u.powi(n as i32 + 1);
    let mut sum = 0.0;
    for (j, a) in power.iter().enumerate() {
        sum += a * upow / (n + 2 * j + 1) as f64;
        upow *= u2;
    }
    sum
}
