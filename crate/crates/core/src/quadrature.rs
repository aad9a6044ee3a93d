//! Uniform ρ-grids, the midpoint-shifted trapezoid rule, estimation of the
//! asymptotic constant `F̃_ℓ` and the closed-form tail integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::pochhammer;
use std::f64::consts::PI;

/// Uniform grid on `(0, rho_max]` whose nodes sit at `(k + 1/2)·step`.
///
/// The grid never includes `ρ = 0`; the integration domain is
/// `[0, len·step]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoGrid {
    pub rho_max: f64,
    pub step: f64,
}

impl RhoGrid {
    pub fn new(rho_max: f64, step: f64) -> Result<Self> {
        if !(rho_max > 0.0 && step > 0.0 && step <= rho_max) || !rho_max.is_finite() {
            return Err(Error::Domain(format!(
                "grid needs 0 < step <= rho_max, got step = {step}, rho_max = {rho_max}"
            )));
        }
        Ok(Self { rho_max, step })
    }

    pub fn len(&self) -> usize {
        (self.rho_max / self.step + 1e-9).floor() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.step
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    /// Right end of the integration domain.
    pub fn upper(&self) -> f64 {
        self.len() as f64 * self.step
    }
}

/// Composite trapezoid over the nodes, closed at `0` and at the upper end by
/// half-panels that carry the first and last node values.
///
/// With midpoint-shifted nodes this is `h Σ f_k`.
pub fn trapezoid(samples: &[f64], grid: &RhoGrid) -> Result<f64> {
    let n = grid.len();
    if samples.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: samples.len() });
    }
    Ok(grid.step * samples.iter().sum::<f64>())
}

/// Indices of the top `window` fraction of the grid.
fn window_range(grid: &RhoGrid, window: f64) -> Result<std::ops::Range<usize>> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Domain(format!("window fraction {window} outside (0, 1]")));
    }
    let n = grid.len();
    let count = ((n as f64) * window).round() as usize;
    if count == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(n - count..n)
}

/// Mean of `ρ²(|F_ℓ(ρ)|⁻² − 1)` over the top `window` fraction of the grid.
pub fn estimate_f_tilde(jost_moduli: &[f64], grid: &RhoGrid, window: f64) -> Result<f64> {
    if jost_moduli.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: jost_moduli.len() });
    }
    let range = window_range(grid, window)?;
    let count = range.len() as f64;
    let sum: f64 = range
        .map(|k| {
            let rho = grid.node(k);
            let f = jost_moduli[k];
            rho * rho * (1.0 / (f * f) - 1.0)
        })
        .sum();
    Ok(sum / count)
}

/// Least-squares fit of `c₁/ρ + F̃/ρ²` to `|F_ℓ(ρ)|⁻² − 1` over the top
/// window, for data whose weight decays like `1/ρ`. Returns `(c₁, F̃)`.
///
/// This is an extrapolation device, not a closed-form result: it only
/// serves to split off the bounded `ρ²`-part before the `F̃` tail step.
pub fn fit_inverse_linear_tail(jost_moduli: &[f64], grid: &RhoGrid, window: f64) -> Result<(f64, f64)> {
    if jost_moduli.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: jost_moduli.len() });
    }
    let range = window_range(grid, window)?;
    if range.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    // Normal equations in the scaled basis u = ρ₀/ρ, v = (ρ₀/ρ)².
    let rho0 = grid.node(range.start);
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in range {
        let rho = grid.node(k);
        let f = jost_moduli[k];
        let y = 1.0 / (f * f) - 1.0;
        let u = rho0 / rho;
        let v = u * u;
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        r1 += u * y;
        r2 += v * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(Error::EmptyWindow);
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    Ok((a * rho0, b * rho0 * rho0))
}

/// `∫₀^∞ j_{ℓ+2n+1}(ρx) j_{ℓ+2m+1}(ρx) ρ⁻² dρ` in closed form.
///
/// Obtained from the Weber–Schafheitlin integral for `∫ J_μ J_ν t⁻³ dt`;
/// the orders differ by an even integer, so only `|n − m| ≤ 1` survives.
pub fn tail_a(ell: f64, n: usize, m: usize, x: f64) -> Result<f64> {
    if ell == -0.5 && n == 0 && m == 0 {
        return Err(Error::Domain("tail integral diverges at the origin for ell = -1/2, n = m = 0".into()));
    }
    Ok(if n == m {
        PI * x / (8.0 * pochhammer(ell + 2.0 * n as f64 + 0.5, 3))
    } else if n.abs_diff(m) == 1 {
        PI * x / (16.0 * pochhammer(ell + (n + m) as f64 + 0.5, 3))
    } else {
        0.0
    })
}

/// `∫₀^∞ b_ℓ(ρx) j_{ℓ+2m+1}(ρx) ρ⁻² dρ` in closed form.
pub fn tail_b(ell: f64, m: usize, x: f64) -> Result<f64> {
    if ell == -0.5 && m == 0 {
        return Err(Error::Domain("tail integral diverges at the origin for ell = -1/2, m = 0".into()));
    }
    Ok(if m == 0 { PI * x / (8.0 * pochhammer(ell + 0.5, 2)) } else { 0.0 })
}
