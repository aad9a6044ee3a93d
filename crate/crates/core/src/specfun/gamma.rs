//! Gamma-family helpers: complex log-gamma, Pochhammer symbols and the
//! gamma-function extension of the odd double factorial.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal-branch `ln Γ(z)` for complex `z`.
///
/// Uses the Lanczos approximation (g = 7) on `Re z >= 1/2` and the reflection
/// formula elsewhere. Only `exp` of the result is unambiguous; the imaginary
/// part may differ from the analytic continuation by a multiple of 2π on the
/// reflected half-plane.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1 − z)
        let reflected = ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z);
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }
    Ok(ln_gamma_lanczos(z))
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln sin(πz)` that stays finite when `|Im z|` is large.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = Complex64::i();
    if w.im > 20.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) / (-2i)
        -i * w + (Complex64::new(1.0, 0.0) - (2.0 * i * w).exp()).ln() - (-2.0 * i).ln()
    } else if w.im < -20.0 {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + (Complex64::new(1.0, 0.0) - (-2.0 * i * w).exp()).ln() - (2.0 * i).ln()
    } else {
        w.sin().ln()
    }
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma_lanczos(Complex64::new(x, 0.0)).re
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// Odd double factorial extended to real order:
/// `(2ℓ+1)!! = 2^{ℓ+1} Γ(ℓ+3/2) / √π`.
///
/// Defined for `ℓ > -3/2`; at `ℓ = -1/2` it equals 1 and it reproduces the
/// integer double factorial for `ℓ = 0, 1, 2, ...`.
pub fn odd_double_factorial(ell: f64) -> f64 {
    ((ell + 1.0) * std::f64::consts::LN_2 + ln_gamma(ell + 1.5) - 0.5 * PI.ln()).exp()
}
