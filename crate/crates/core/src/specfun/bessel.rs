//! Spherical Bessel functions `j_ν(z)` of real order `ν >= -1/2` and their
//! modified (imaginary-argument) counterparts.
//!
//! Everything is built on the cylinder function `J_μ` with `μ = ν + 1/2`:
//! the ascending series for small arguments, the Hankel expansion for large
//! ones, and Steed's method (CF1 + CF2 with the Wronskian) in between.
//! Ladders of orders come from recurrence normalized against one robustly
//! evaluated pair of low orders.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::gamma::ln_gamma;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_CF_ITER: usize = 1_000_000;

fn check_domain(nu: f64, z: f64) -> Result<()> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(Error::Domain(format!("order {nu} below -1/2")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("argument {z} must be positive")));
    }
    Ok(())
}

#[inline]
fn series_applies(mu: f64, z: f64) -> bool {
    z <= 2.0 || z * z <= 2.0 * (mu + 1.0)
}

/// Ascending series of `J_μ(z)`, `μ >= 0`.
fn bessel_j_series(mu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let lead = (mu * half.ln() - ln_gamma(mu + 1.0)).exp();
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let k_f = k as f64;
        term *= q / (k_f * (k_f + mu));
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Hankel asymptotic expansion; `None` when it has not converged to full
/// precision before the terms start to grow.
fn bessel_j_asymptotic(mu: f64, z: f64) -> Option<f64> {
    let four_mu2 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(μ) / z^k
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        a *= (four_mu2 - odd * odd) / (8.0 * k as f64 * z);
        let mag = a.abs();
        if mag == 0.0 {
            converged = true;
            break;
        }
        if mag > prev {
            break;
        }
        prev = mag;
        // P = Σ (−1)^j a_{2j}, Q = Σ (−1)^j a_{2j+1}
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if mag < 1e-17 * p.abs().max(q.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let chi = z - (0.5 * mu + 0.25) * PI;
    Some((2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// Continued fraction for `J_{μ+1}(z) / J_μ(z)` (modified Lentz).
fn ratio_cf1(mu: f64, z: f64) -> f64 {
    // J_{μ+1}/J_μ = 1 / (b_1 − 1 / (b_2 − ...)), b_k = 2(μ+k)/z
    let mut f = FPMIN;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..MAX_CF_ITER {
        let b = 2.0 * (mu + k as f64) / z;
        let a = if k == 1 { 1.0 } else { -1.0 };
        d = b + a * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + a / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    f
}

/// Steed's method for `(J_μ(z), J'_μ(z))`, valid for `z >= 2`.
fn bessel_j_steed(mu: f64, z: f64) -> (f64, f64) {
    let nl = ((mu - z + 1.5).floor()).max(0.0) as usize;
    let xmu = mu - nl as f64;
    let xi = 1.0 / z;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f = J'_μ / J_μ, tracking the sign of J_μ through the denominators.
    let mut isign = 1.0;
    let mut h = (mu * xi).max(FPMIN);
    let mut b = xi2 * mu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_CF_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = mu * xi;
    for _ in 0..nl {
        let tmp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * tmp - rjl;
        rjl = tmp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J' + iY') / (J + iY) at order xmu.
    let mut a = 0.25 - xmu * xmu;
    let mut pq = Complex64::new(-0.5 * xi, 1.0);
    let br = Complex64::new(2.0 * z, 2.0);
    let mut bb = br;
    let fact0 = a * xi / pq.norm_sqr();
    let mut cc = bb + Complex64::new(pq.im, pq.re) * fact0;
    let mut dd = bb.inv();
    let dl = cc * dd;
    pq *= dl;
    for i in 2..MAX_CF_ITER {
        a += 2.0 * (i - 1) as f64;
        bb.im += 2.0;
        dd = dd * a + bb;
        if dd.re.abs() + dd.im.abs() < FPMIN {
            dd.re = FPMIN;
        }
        let fct = a / cc.norm_sqr();
        cc = Complex64::new(bb.re + cc.re * fct, bb.im - cc.im * fct);
        if cc.re.abs() + cc.im.abs() < FPMIN {
            cc.re = FPMIN;
        }
        dd = dd.inv();
        let dl = cc * dd;
        pq *= dl;
        if (dl.re - 1.0).abs() + dl.im.abs() < EPS {
            break;
        }
    }
    let (p, q) = (pq.re, pq.im);
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let scale = rjmu / rjl;
    (rjl1 * scale, rjp1 * scale)
}

/// Cylinder function `J_μ(z)` for `μ >= 0`, `z > 0`.
pub(crate) fn bessel_j(mu: f64, z: f64) -> f64 {
    if series_applies(mu, z) {
        return bessel_j_series(mu, z);
    }
    if z > 17.0 + 0.5 * mu * mu {
        if let Some(v) = bessel_j_asymptotic(mu, z) {
            return v;
        }
    }
    bessel_j_steed(mu, z).0
}

/// `(J_μ(z), J_{μ+1}(z))`, each robustly evaluated.
fn bessel_j_pair(mu: f64, z: f64) -> (f64, f64) {
    if series_applies(mu, z) {
        return (bessel_j_series(mu, z), bessel_j_series(mu + 1.0, z));
    }
    if z > 17.0 + 0.5 * (mu + 1.0) * (mu + 1.0) {
        if let (Some(a), Some(b)) = (bessel_j_asymptotic(mu, z), bessel_j_asymptotic(mu + 1.0, z)) {
            return (a, b);
        }
    }
    let (j, jp) = bessel_j_steed(mu, z);
    (j, mu / z * j - jp)
}

/// Spherical Bessel function of the first kind, `j_ν(z) = √(π/2z) J_{ν+1/2}(z)`.
pub fn sph_bessel_j(nu: f64, z: f64) -> Result<f64> {
    check_domain(nu, z)?;
    Ok((FRAC_PI_2 / z).sqrt() * bessel_j(nu + 0.5, z))
}

/// Values of `j_{ℓ+k}(z)` for `k = 0..=2M+1` at one argument.
///
/// The orders needed by the linear system are `ℓ` and `ℓ+2n+1`; the even
/// offsets are kept so the whole ladder can be checked against the
/// three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselOrderLadder {
    pub ell: f64,
    pub z: f64,
    values: Vec<f64>,
}

impl BesselOrderLadder {
    /// Number of odd-offset orders, `M + 1`.
    pub fn count(&self) -> usize {
        self.values.len() / 2
    }

    /// `j_ℓ(z)`.
    pub fn base(&self) -> f64 {
        self.values[0]
    }

    /// `j_{ℓ+2n+1}(z)`.
    pub fn odd(&self, n: usize) -> f64 {
        self.values[2 * n + 1]
    }

    /// `b_ℓ(z) = z j_ℓ(z)`.
    pub fn riccati_base(&self) -> f64 {
        self.z * self.values[0]
    }

    /// All consecutive orders `j_{ℓ+k}(z)`, `k = 0..=2M+1`.
    pub fn consecutive(&self) -> &[f64] {
        &self.values
    }
}

/// Evaluates the ladder `j_ℓ(z), j_{ℓ+1}(z), ..., j_{ℓ+2M+1}(z)`.
pub fn bessel_ladder(ell: f64, max_index: usize, z: f64) -> Result<BesselOrderLadder> {
    check_domain(ell, z)?;
    let mu = ell + 0.5;
    let top = 2 * max_index + 1;
    let mut values = vec![0.0; top + 1];

    if z <= 2.0 {
        for (k, v) in values.iter_mut().enumerate() {
            *v = bessel_j_series(mu + k as f64, z);
        }
    } else {
        let (j0, j1) = bessel_j_pair(mu, z);
        values[0] = j0;
        values[1] = j1;
        if mu + top as f64 <= z {
            for k in 1..top {
                let nu = mu + k as f64;
                values[k + 1] = 2.0 * nu / z * values[k] - values[k - 1];
            }
        } else {
            fill_downward(&mut values, mu, z);
            let (d0, d1) = (values[0], values[1]);
            let scale = (d0 * j0 + d1 * j1) / (d0 * d0 + d1 * d1);
            for v in values.iter_mut() {
                *v *= scale;
            }
            values[0] = j0;
            values[1] = j1;
        }
    }

    let pref = (FRAC_PI_2 / z).sqrt();
    for v in values.iter_mut() {
        *v *= pref;
    }
    Ok(BesselOrderLadder { ell, z, values })
}

/// Unnormalized downward recurrence of `J_{μ+k}` seeded at the top order by
/// the CF1 ratio.
fn fill_downward(values: &mut [f64], mu: f64, z: f64) {
    let top = values.len() - 1;
    let ratio = ratio_cf1(mu + top as f64, z);
    let mut upper = ratio; // J_{top+1}, relative
    values[top] = 1.0;
    for k in (1..=top).rev() {
        let nu = mu + k as f64;
        let lower = 2.0 * nu / z * values[k] - upper;
        upper = values[k];
        values[k - 1] = lower;
        if lower.abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            upper *= 1e-250;
        }
    }
}

/// `ln(√(π/2z) I_{ν+1/2}(z))`, the log of the modified spherical Bessel
/// function `i_ν(z) = (−i)^ν j_ν(iz)`.
///
/// The ascending series has only positive terms, so it is evaluated
/// directly with running rescaling and never overflows.
pub fn ln_sph_bessel_i(nu: f64, z: f64) -> Result<f64> {
    check_domain(nu, z)?;
    let mu = nu + 0.5;
    let half = 0.5 * z;
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_offset = 0.0;
    let mut k = 1usize;
    loop {
        let k_f = k as f64;
        term *= q / (k_f * (k_f + mu));
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            ln_offset += 280.0 * std::f64::consts::LN_10;
        }
        // Terms decrease once k exceeds about z/2.
        if k_f > half && term < EPS * sum {
            break;
        }
        k += 1;
        if k > 10_000_000 {
            return Err(Error::Overflow(format!("modified Bessel series at z = {z}")));
        }
    }
    let ln_i = mu * half.ln() - ln_gamma(mu + 1.0) + sum.ln() + ln_offset;
    Ok(0.5 * (FRAC_PI_2 / z).ln() + ln_i)
}

/// Real value of `j_{ℓ+2n+1}(iτx) · g(iτx) / (iτ)^{2ℓ+2}` with
/// `g = b_ℓ` or `g = j_{ℓ+2m+1}` depending on `partner`.
///
/// Using `j_ν(iz) = i^ν i_ν(z)` the powers of `i` collapse to `(−1)^{n+m}`
/// (or `(−1)^n` for `b_ℓ`), so the result is computed entirely in the log
/// domain from modified spherical Bessel functions.
pub fn modified_product(ell: f64, n: usize, partner: ProductPartner, tau: f64, x: f64) -> Result<f64> {
    if !(tau > 0.0) || !(x > 0.0) {
        return Err(Error::Domain(format!("tau = {tau}, x = {x} must be positive")));
    }
    let z = tau * x;
    let ln_a = ln_sph_bessel_i(ell + (2 * n + 1) as f64, z)?;
    let (ln_b, sign_exp) = match partner {
        ProductPartner::RiccatiBase => (z.ln() + ln_sph_bessel_i(ell, z)?, n),
        ProductPartner::Odd(m) => (ln_sph_bessel_i(ell + (2 * m + 1) as f64, z)?, n + m),
    };
    combine_modified(ln_a + ln_b, sign_exp, ell, tau)
}

/// Second factor of [`modified_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductPartner {
    /// `b_ℓ(iτx)`
    RiccatiBase,
    /// `j_{ℓ+2m+1}(iτx)`
    Odd(usize),
}

pub(crate) fn combine_modified(ln_product: f64, sign_exp: usize, ell: f64, tau: f64) -> Result<f64> {
    let ln_val = ln_product - (2.0 * ell + 2.0) * tau.ln();
    if ln_val > 709.0 {
        return Err(Error::Overflow(format!("bound-state product e^{ln_val:.1} exceeds f64 range")));
    }
    let v = ln_val.exp();
    Ok(if sign_exp.is_multiple_of(2) { v } else { -v })
}

/// Log-values `ln i_{ℓ+k}(z)` for `k = 0..=2M+1`, the modified analogue of
/// [`bessel_ladder`].
pub fn ln_modified_ladder(ell: f64, max_index: usize, z: f64) -> Result<Vec<f64>> {
    (0..=2 * max_index + 1).map(|k| ln_sph_bessel_i(ell + k as f64, z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Double-double accumulator for the independent series oracle.
    #[derive(Clone, Copy)]
    struct Dd(f64, f64);

    impl Dd {
        fn from(a: f64) -> Self {
            Dd(a, 0.0)
        }
        fn add(self, o: Dd) -> Dd {
            let s = self.0 + o.0;
            let bb = s - self.0;
            let err = (self.0 - (s - bb)) + (o.0 - bb);
            let lo = err + self.1 + o.1;
            let hi = s + lo;
            Dd(hi, lo - (hi - s))
        }
        fn mul(self, o: Dd) -> Dd {
            let p = self.0 * o.0;
            let err = self.0.mul_add(o.0, -p);
            let lo = err + self.0 * o.1 + self.1 * o.0;
            let hi = p + lo;
            Dd(hi, lo - (hi - p))
        }
        fn div_f(self, d: f64) -> Dd {
            let q = self.0 / d;
            let r = Dd(self.0, self.1).add(Dd::from(q).mul(Dd::from(-d)));
            let q2 = r.0 / d;
            Dd::from(q).add(Dd::from(q2))
        }
    }

    /// 60-term series of the integer-order `J_n(z)` in double-double.
    fn j_integer_order_oracle(n: u32, z: f64) -> f64 {
        let half = Dd::from(z / 2.0);
        let q = half.mul(half);
        let mut lead = Dd::from(1.0);
        for i in 1..=n {
            lead = lead.mul(half).div_f(i as f64);
        }
        let mut term = lead;
        let mut sum = lead;
        for k in 1..60u32 {
            term = term.mul(q).div_f(-((k * (k + n)) as f64));
            sum = sum.add(term);
        }
        sum.0 + sum.1
    }

    #[test]
    fn order_zero_at_half_pi() {
        assert_relative_eq!(sph_bessel_j(0.0, FRAC_PI_2).unwrap(), 2.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn order_one_small_argument() {
        let z = 1e-4;
        assert!((sph_bessel_j(1.0, z).unwrap() / z - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn order_two_and_a_half_against_series_oracle() {
        // j_{2.5}(z) = √(π/2z) J_3(z)
        let z = 3.7;
        let oracle = (FRAC_PI_2 / z).sqrt() * j_integer_order_oracle(3, z);
        assert_relative_eq!(sph_bessel_j(2.5, z).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn closed_forms_across_regimes() {
        for &z in &[0.3f64, 1.9, 2.5, 7.3, 19.0, 48.0, 333.3, 2_500.0, 9_999.0] {
            let j0 = z.sin() / z;
            let j1 = z.sin() / (z * z) - z.cos() / z;
            let j2 = (3.0 / (z * z) - 1.0) * z.sin() / z - 3.0 * z.cos() / (z * z);
            assert_relative_eq!(sph_bessel_j(0.0, z).unwrap(), j0, max_relative = 1e-11);
            assert_relative_eq!(sph_bessel_j(1.0, z).unwrap(), j1, max_relative = 1e-11);
            assert_relative_eq!(sph_bessel_j(2.0, z).unwrap(), j2, max_relative = 1e-10);
        }
    }

    #[test]
    fn minus_half_order_is_cos_over_sqrt() {
        // J_{-1/2} is not reachable (μ >= 0); j_{-1/2} uses J_0. Check
        // J_0 against its integer-order series oracle.
        for &z in &[0.5, 3.0, 6.5] {
            let oracle = (FRAC_PI_2 / z).sqrt() * j_integer_order_oracle(0, z);
            assert_relative_eq!(sph_bessel_j(-0.5, z).unwrap(), oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn small_argument_leading_power() {
        for &nu in &[-0.5, 1.0 / 3.0, 2.0, std::f64::consts::E.powi(3)] {
            let z: f64 = 1e-4;
            let dfact = super::super::gamma::odd_double_factorial(nu);
            let ratio = sph_bessel_j(nu, z).unwrap() * dfact / z.powf(nu);
            assert!((ratio - 1.0).abs() < 1e-6, "nu = {nu}, ratio = {ratio}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(sph_bessel_j(-0.6, 1.0).is_err());
        assert!(sph_bessel_j(1.0, 0.0).is_err());
        assert!(sph_bessel_j(1.0, -2.0).is_err());
    }

    #[test]
    fn ladder_at_pi() {
        let lad = bessel_ladder(0.0, 1, PI).unwrap();
        assert!(lad.base().abs() < 1e-12);
        assert_relative_eq!(lad.odd(0), 1.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn ladder_matches_single_order_calls() {
        let lad = bessel_ladder(2.0, 4, 5.0).unwrap();
        assert_relative_eq!(lad.base(), sph_bessel_j(2.0, 5.0).unwrap(), max_relative = 1e-10);
        for n in 0..=4 {
            let direct = sph_bessel_j(2.0 + (2 * n + 1) as f64, 5.0).unwrap();
            assert_relative_eq!(lad.odd(n), direct, max_relative = 1e-10);
        }
    }

    #[test]
    fn modified_ell_zero_closed_form() {
        // b_0(i) j_1(i) / i^2 = sinh 1 (cosh 1 − sinh 1)
        let expected = 1f64.sinh() * (1f64.cosh() - 1f64.sinh());
        let v = modified_product(0.0, 0, ProductPartner::RiccatiBase, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-13);
    }

    #[test]
    fn modified_small_tau_limit() {
        // τ → 0: x^{2ℓ+2} / ((2ℓ+1)!! (2ℓ+3)!!) for n = 0 with b_ℓ.
        let ell = 1.0 / 3.0;
        let x: f64 = 1.7;
        let df = super::super::gamma::odd_double_factorial;
        let limit = x.powf(2.0 * ell + 2.0) / (df(ell) * df(ell + 1.0));
        let v = modified_product(ell, 0, ProductPartner::RiccatiBase, 1e-5, x).unwrap();
        assert_relative_eq!(v, limit, max_relative = 1e-8);
    }

    #[test]
    fn modified_overflow_reported() {
        let r = modified_product(0.0, 0, ProductPartner::Odd(0), 1.0, 800.0);
        assert!(matches!(r, Err(Error::Overflow(_))));
    }
}
