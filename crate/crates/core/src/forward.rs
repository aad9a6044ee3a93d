//! Exact scattering data for two benchmark potentials.
//!
//! The square well has a Jost function built from matching interior and
//! exterior solutions at the wall. The Hulthén effective potential has a
//! closed-form Jost function in terms of gamma functions, explicitly known
//! bound states, and eigenfunctions given by a terminating Gauss series.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::RhoGrid;
use crate::specfun::{hyp2f1_terminating, ln_gamma, ln_gamma_complex, odd_double_factorial, sph_bessel_j};

/// Benchmark potentials with known scattering data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum PotentialModel {
    /// `q = −Q²` on `[0, R]`, zero beyond.
    SquareWell { q: f64, r: f64, ell: u32 },
    /// Hulthén effective potential with screening `δ ∈ (0, 1)`.
    Hulthen { delta: f64, ell: f64 },
}

impl PotentialModel {
    pub fn ell(&self) -> f64 {
        match *self {
            PotentialModel::SquareWell { ell, .. } => ell as f64,
            PotentialModel::Hulthen { ell, .. } => ell,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialModel::SquareWell { q, r, .. } => {
                if !(q > 0.0 && q.is_finite()) || !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "square well needs Q > 0 and R > 0, got Q = {q}, R = {r}"
                    )));
                }
            }
            PotentialModel::Hulthen { delta, ell } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::InvalidModel(format!(
                        "Hulthen screening must satisfy 0 < delta < 1, got {delta}"
                    )));
                }
                if !(ell >= -0.5) || !ell.is_finite() {
                    return Err(Error::InvalidModel(format!("ell must be >= -1/2, got {ell}")));
                }
                if (2.0 * ell).fract() == 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "Hulthen model requires 2*ell to be a non-integer, got ell = {ell}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub tau: f64,
    pub c: f64,
}

/// `ρ₁²` for the square well `Q = 1, R = π/2` at `ℓ = −1/2`, computed by an
/// external method; the generator here cannot produce half-integer wells.
pub const HALF_INTEGER_WELL_RHO_SQ: f64 = -0.258265599397038;
/// Norming constant paired with [`HALF_INTEGER_WELL_RHO_SQ`].
pub const HALF_INTEGER_WELL_NORMING: f64 = 0.469060824384319;

/// The stored bound state of the `ℓ = −1/2` square well.
pub fn half_integer_well_bound_state() -> BoundState {
    BoundState { tau: (-HALF_INTEGER_WELL_RHO_SQ).sqrt(), c: HALF_INTEGER_WELL_NORMING }
}

/// Jost-function samples on a ρ-grid plus the discrete spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub ell: f64,
    pub bound_states: Vec<BoundState>,
    pub grid: RhoGrid,
    pub jost: Vec<Complex64>,
}

impl ScatteringData {
    /// Structural checks: sample count, positive moduli, sorted spectrum.
    pub fn validate(&self) -> Result<()> {
        if self.jost.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: self.jost.len() });
        }
        if let Some(k) = self.jost.iter().position(|f| !(f.norm() > 0.0) || !f.is_finite()) {
            return Err(Error::InvalidData(format!("Jost sample {k} is zero or not finite")));
        }
        for bs in &self.bound_states {
            if !(bs.tau > 0.0 && bs.c > 0.0) {
                return Err(Error::InvalidData(format!(
                    "bound state needs tau > 0 and c > 0, got tau = {}, c = {}",
                    bs.tau, bs.c
                )));
            }
        }
        if self.bound_states.windows(2).any(|w| w[0].tau < w[1].tau) {
            return Err(Error::InvalidData("bound states must be sorted by decreasing tau".into()));
        }
        Ok(())
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.jost.iter().map(|f| f.norm()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let data: Self = serde_json::from_str(text)?;
        data.validate()?;
        Ok(data)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let data: Self = serde_json::from_reader(reader)?;
        data.validate()?;
        Ok(data)
    }

    /// Writes `rho,re,im` rows, one per node.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "rho,re_F,im_F")?;
        for (rho, f) in self.grid.nodes().zip(&self.jost) {
            writeln!(writer, "{rho},{},{}", f.re, f.im)?;
        }
        Ok(())
    }
}

/// Spherical Hankel function `h_ℓ⁽¹⁾(z)` of integer order for real `z ≠ 0`.
fn sph_hankel1(ell: u32, z: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ik = Complex64::new(1.0, 0.0);
    let mut coef = 1.0;
    for k in 0..=ell {
        if k > 0 {
            // (ℓ+k)!/(k!(ℓ−k)!) from its predecessor
            coef *= ((ell + k) * (ell - k + 1)) as f64 / (k as f64 * 2.0 * z);
            ik *= Complex64::i();
        }
        sum += ik * coef;
    }
    let phase = Complex64::from_polar(1.0, z - (ell + 1) as f64 * PI / 2.0);
    phase * sum / z
}

/// Jost function of the square well for integer `ℓ` and real `ρ ≠ 0`.
pub fn square_well_jost(q: f64, r: f64, ell: u32, rho: f64) -> Result<Complex64> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::Domain(format!("square-well Jost function needs rho != 0, got {rho}")));
    }
    let l = ell as f64;
    let omega = (rho * rho + q * q).sqrt();
    let (wr, pr) = (omega * r, rho * r);

    let j0 = sph_bessel_j(l, wr)?;
    let j1 = sph_bessel_j(l + 1.0, wr)?;
    let hw0 = sph_hankel1(ell, wr);
    let hw1 = sph_hankel1(ell + 1, wr);
    let hp0 = sph_hankel1(ell, pr);
    let hp1 = sph_hankel1(ell + 1, pr);

    let sign = if ell.is_multiple_of(2) { 1.0 } else { -1.0 };
    let outer = Complex64::i() * sign * rho;

    // a·b_ℓ(ωR) + b·ωR h_ℓ(ωR) = (−1)^ℓ iρR h_ℓ(ρR), and the derivative row
    let a11 = Complex64::from(wr * j0);
    let a12 = hw0 * wr;
    let a21 = Complex64::from(omega * ((l + 1.0) * j0 - wr * j1));
    let a22 = (hw0 * (l + 1.0) - hw1 * wr) * omega;
    let r1 = outer * r * hp0;
    let r2 = outer * (hp0 * (l + 1.0) - hp1 * pr);

    let det = a11 * a22 - a12 * a21;
    if det.norm() == 0.0 {
        return Err(Error::Singular(0));
    }
    let b = (a11 * r2 - a21 * r1) / det;
    Ok(-sign * Complex64::i() * b * (rho / omega).powi(ell as i32))
}

/// Jost function of the Hulthén effective potential on the real axis.
pub fn hulthen_jost(delta: f64, ell: f64, rho: f64) -> Result<Complex64> {
    hulthen_jost_complex(delta, ell, Complex64::from(rho))
}

/// Hulthén Jost function in the closed upper half-plane.
///
/// The power `(−ρ/δ)^ℓ` is continued from the positive imaginary axis, so
/// that `arg(−ρ) = arg ρ − π`; with this choice `F_ℓ(ρ) → 1` as `ρ → +∞`
/// and `F_ℓ(−ρ) = conj F_ℓ(ρ)` on the real line.
pub fn hulthen_jost_complex(delta: f64, ell: f64, rho: Complex64) -> Result<Complex64> {
    if rho.im < 0.0 || rho.norm() == 0.0 {
        return Err(Error::Domain(format!("Hulthen Jost function is evaluated for Im rho >= 0, rho != 0; got {rho}")));
    }
    let i = Complex64::i();
    let a = i * rho / delta;
    let s = (Complex64::from(2.0 * delta) - rho * rho).sqrt() / delta;

    let mut ln_den = Complex64::new(0.0, 0.0);
    for arg in [Complex64::from(ell + 1.0) - a + s, Complex64::from(ell + 1.0) - a - s] {
        match ln_gamma_complex(arg) {
            Ok(v) => ln_den += v,
            Err(Error::Pole(_)) => return Ok(Complex64::new(0.0, 0.0)),
            Err(e) => return Err(e),
        }
    }
    let ln_num = ln_gamma_complex(Complex64::from(1.0) - 2.0 * a)? + ln_gamma(2.0 * ell + 1.0);

    let arg_minus_rho = rho.arg() - PI;
    let ln_power = ell * Complex64::new((rho.norm() / delta).ln(), arg_minus_rho);

    let ln_f = i * (PI * ell / 2.0) - odd_double_factorial(ell - 1.0).ln() + ln_num - ln_den + ln_power;
    Ok(ln_f.exp())
}

/// `τ_j = 1/(ℓ+j) − δ(ℓ+j)/2` for `j = 1..⌊√(2/δ) − ℓ⌋`, decreasing in `j`.
pub fn hulthen_bound_states(delta: f64, ell: f64) -> Vec<f64> {
    let count = ((2.0 / delta).sqrt() - ell).floor();
    if count < 1.0 {
        return Vec::new();
    }
    (1..=count as u32)
        .map(|j| {
            let lj = ell + j as f64;
            1.0 / lj - delta * lj / 2.0
        })
        .filter(|&tau| tau > 0.0)
        .collect()
}

/// Regular solution `φ_ℓ(iτ_j, x)` of the Hulthén problem at its `j`-th
/// eigenvalue (1-based), normalised as `x^{ℓ+1}/(2ℓ+1)!!` at the origin.
pub fn hulthen_eigenfunction(delta: f64, ell: f64, j: usize, x: f64) -> Result<f64> {
    let taus = hulthen_bound_states(delta, ell);
    if j == 0 || j > taus.len() {
        return Err(Error::OutOfRange(format!("bound state index {j} outside 1..={}", taus.len())));
    }
    let tau = taus[j - 1];
    let y = -(-delta * x).exp_m1();
    let b = ell + 1.0 + 2.0 / (delta * (ell + j as f64));
    let poly = hyp2f1_terminating((j - 1) as u32, b, 2.0 * ell + 2.0, y)?;
    let lead = ((ell + 1.0) * (y / delta).ln() - tau * x).exp() / odd_double_factorial(ell);
    Ok(lead * poly)
}

/// Norming constant `c_j = 1/∫₀^∞ φ_ℓ(iτ_j, x)² dx` (1-based `j`).
pub fn hulthen_norming_constant(delta: f64, ell: f64, j: usize) -> Result<f64> {
    norming_integral(delta, ell, j, 1.0).map(|v| 1.0 / v)
}

fn norming_integral(delta: f64, ell: f64, j: usize, span_factor: f64) -> Result<f64> {
    let taus = hulthen_bound_states(delta, ell);
    if j == 0 || j > taus.len() {
        return Err(Error::OutOfRange(format!("bound state index {j} outside 1..={}", taus.len())));
    }
    let tau = taus[j - 1];
    // e^{−2τx} falls below 1e−16 after 18.4/τ; the polynomial and the
    // prefactor grow algebraically, so leave generous room.
    let x_max = span_factor * (40.0 / tau).max(40.0 / delta);
    let panels = 200_000usize;
    let h = x_max / panels as f64;
    let mut sum = 0.0;
    for k in 1..panels {
        let phi = hulthen_eigenfunction(delta, ell, j, k as f64 * h)?;
        sum += phi * phi;
    }
    let end = hulthen_eigenfunction(delta, ell, j, x_max)?;
    Ok(h * (sum + 0.5 * end * end))
}

/// Samples the model's Jost function on every grid node and attaches its
/// bound states.
pub fn generate_data(model: &PotentialModel, grid: &RhoGrid) -> Result<ScatteringData> {
    model.validate()?;
    let (jost, bound_states) = match *model {
        PotentialModel::SquareWell { q, r, ell } => {
            let jost = grid.nodes().map(|rho| square_well_jost(q, r, ell, rho)).collect::<Result<_>>()?;
            (jost, Vec::new())
        }
        PotentialModel::Hulthen { delta, ell } => {
            let jost = grid.nodes().map(|rho| hulthen_jost(delta, ell, rho)).collect::<Result<_>>()?;
            let states = hulthen_bound_states(delta, ell)
                .into_iter()
                .enumerate()
                .map(|(k, tau)| Ok(BoundState { tau, c: hulthen_norming_constant(delta, ell, k + 1)? }))
                .collect::<Result<_>>()?;
            (jost, states)
        }
    };
    let data = ScatteringData { ell: model.ell(), bound_states, grid: *grid, jost };
    data.validate()?;
    Ok(data)
}

/// Multiplies every `τ_j`, `c_j` and both parts of every Jost sample by an
/// independent factor `1 + level·u`, `u ~ U[−1, 1]`, drawn from a ChaCha8
/// stream seeded with `seed`.
pub fn add_noise(data: &ScatteringData, level: f64, seed: u64) -> Result<ScatteringData> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Domain(format!("noise level must lie in [0, 1), got {level}")));
    }
    let mut out = data.clone();
    if level == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factor = || 1.0 + level * rng.random_range(-1.0..=1.0);
    for bs in &mut out.bound_states {
        bs.tau *= factor();
        bs.c *= factor();
    }
    for f in &mut out.jost {
        f.re *= factor();
        f.im *= factor();
    }
    // Noise can reorder nearly degenerate eigenvalues.
    out.bound_states.sort_by(|a, b| b.tau.total_cmp(&a.tau));
    Ok(out)
}

/// Exact potential `q(x)` for error reports.
pub fn true_potential(model: &PotentialModel, x: f64) -> f64 {
    match *model {
        PotentialModel::SquareWell { q, r, .. } => {
            if x <= r {
                -q * q
            } else {
                0.0
            }
        }
        PotentialModel::Hulthen { delta, ell } => {
            let y = delta * x;
            // δ²/(4 sinh²(δx/2)) − 1/x², with the cancellation removed near 0
            let centrifugal = if y < 1e-2 {
                let y2 = y * y;
                delta * delta * (-1.0 / 12.0 + y2 / 240.0 - y2 * y2 / 6048.0)
            } else {
                let s = (y / 2.0).sinh();
                delta * delta / (4.0 * s * s) - 1.0 / (x * x)
            };
            ell * (ell + 1.0) * centrifugal - 2.0 * delta / y.exp_m1()
        }
    }
}
