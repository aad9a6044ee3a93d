//! Helpers shared by the integration tests: Gauss–Legendre rules and
//! elementary closed forms used as independent oracles.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`, by Newton iteration on
/// `P_n` from the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out.push((0.5 * (b - a) * z + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

/// Composite Gauss–Legendre quadrature of `f` on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let rule = gauss_legendre(order, 0.0, 1.0);
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(t, w) in &rule {
            s += w * h * f(lo + t * h);
        }
    }
    s
}

/// `j_2(z)`: ascending series below 0.5, elementary closed form above.
pub fn sph_j2(z: f64) -> f64 {
    if z < 0.5 {
        let z2 = z * z;
        let mut term = z2 / 15.0;
        let mut sum = term;
        for k in 1..20 {
            term *= -z2 / (2.0 * k as f64 * (2 * k + 5) as f64);
            sum += term;
        }
        sum
    } else {
        (3.0 / (z * z * z) - 1.0 / z) * z.sin() - 3.0 * z.cos() / (z * z)
    }
}
