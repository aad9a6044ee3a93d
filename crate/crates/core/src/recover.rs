//! From `β₀(x)` to the potential: `u_{ℓ,0} = (β₀/(2ℓ+3) + 1) x^{ℓ+1}` solves
//! the zero-energy equation, which gives
//!
//! ```text
//! q = (x β₀″ + 2(ℓ+1) β₀′) / (x (β₀ + 2ℓ + 3))
//! ```
//!
//! The derivatives come from an interpolating cubic spline of the computed
//! `β₀` samples, optionally split at user-given breakpoints so that a jump in
//! `q` does not leak into neighbouring segments. A segment may instead spline
//! `u_{ℓ,0}` itself; see [`Route`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{true_potential, PotentialModel};
use crate::inverse::BetaProfile;

/// Which function the spline interpolates before differentiating.
///
/// `Beta` splines `β₀` and applies the quotient above. `ParticularSolution`
/// splines `u_{ℓ,0}` and uses `q = u″/u − ℓ(ℓ+1)/x²`. The second one wins
/// where `u_{ℓ,0}` is close to a low-degree polynomial (outside a compactly
/// supported well `u_{ℓ,0} = A x^{ℓ+1} + B x^{−ℓ}`), but loses near the
/// origin when `ℓ` is not an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    #[default]
    Beta,
    ParticularSolution,
}

/// Smallest admissible `β₀ + 2ℓ + 3`.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

/// Interpolating cubic spline with not-a-knot end conditions, stored as
/// node values and node slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if y.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: y.len() });
        }
        if n < 4 {
            return Err(Error::TooFewNodes { needed: 4, got: n });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("spline nodes must be strictly increasing".into()));
        }
        let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / dx[i]).collect();

        // Tridiagonal system for the slopes: lower[i] m[i−1] + diag[i] m[i] + upper[i] m[i+1] = rhs[i]
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];

        let d0 = x[2] - x[0];
        diag[0] = dx[1];
        upper[0] = d0;
        rhs[0] = ((dx[0] + 2.0 * d0) * dx[1] * s[0] + dx[0] * dx[0] * s[1]) / d0;
        for i in 1..n - 1 {
            lower[i] = dx[i];
            diag[i] = 2.0 * (dx[i - 1] + dx[i]);
            upper[i] = dx[i - 1];
            rhs[i] = 3.0 * (dx[i] * s[i - 1] + dx[i - 1] * s[i]);
        }
        let dn = x[n - 1] - x[n - 3];
        lower[n - 1] = dn;
        diag[n - 1] = dx[n - 3];
        rhs[n - 1] = (dx[n - 2] * dx[n - 2] * s[n - 3] + (2.0 * dn + dx[n - 2]) * dx[n - 3] * s[n - 2]) / dn;

        // Thomas elimination
        for i in 1..n {
            let f = lower[i] / diag[i - 1];
            diag[i] -= f * upper[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        let mut slope = vec![0.0; n];
        slope[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            slope[i] = (rhs[i] - upper[i] * slope[i + 1]) / diag[i];
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), slope })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// Polynomial coefficients on the interval containing `t`, and `t − x_i`.
    fn local(&self, t: f64) -> ([f64; 4], f64) {
        let n = self.x.len();
        let i = self.x.partition_point(|&k| k <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (self.y[i + 1] - self.y[i]) / h;
        let (m0, m1) = (self.slope[i], self.slope[i + 1]);
        let c2 = (3.0 * s - 2.0 * m0 - m1) / h;
        let c3 = (m0 + m1 - 2.0 * s) / (h * h);
        ([self.y[i], m0, c2, c3], t - self.x[i])
    }

    pub fn value(&self, t: f64) -> f64 {
        let (c, d) = self.local(t);
        c[0] + d * (c[1] + d * (c[2] + d * c[3]))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (c, d) = self.local(t);
        c[1] + d * (2.0 * c[2] + 3.0 * d * c[3])
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let (c, d) = self.local(t);
        2.0 * c[2] + 6.0 * d * c[3]
    }
}

/// Independent splines on the pieces between breakpoints. A node equal to a
/// breakpoint belongs to the left piece.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedSpline {
    breakpoints: Vec<f64>,
    pieces: Vec<CubicSpline>,
}

impl SegmentedSpline {
    pub fn new(x: &[f64], y: &[f64], breakpoints: &[f64]) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
        }
        let mut bps: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| x.first().is_some_and(|&lo| *b > lo) && x.last().is_some_and(|&hi| *b < hi))
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        let mut start = 0;
        for end_bp in bps.iter().map(Some).chain(std::iter::once(None)) {
            let end = match end_bp {
                Some(&b) => x.partition_point(|&v| v <= b),
                None => x.len(),
            };
            pieces.push(CubicSpline::new(&x[start..end], &y[start..end])?);
            start = end;
        }
        Ok(Self { breakpoints: bps, pieces })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segment_count(&self) -> usize {
        self.pieces.len()
    }

    /// Index of the piece that evaluates `t`.
    pub fn segment_of(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < t)
    }

    fn piece(&self, t: f64) -> &CubicSpline {
        &self.pieces[self.segment_of(t)]
    }

    pub fn value(&self, t: f64) -> f64 {
        self.piece(t).value(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.piece(t).derivative(t)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.piece(t).second_derivative(t)
    }
}

/// Fits `β₀` samples; `breakpoints` may be empty.
pub fn spline_fit(x_nodes: &[f64], values: &[f64], breakpoints: &[f64]) -> Result<SegmentedSpline> {
    SegmentedSpline::new(x_nodes, values, breakpoints)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredPotential {
    pub ell: f64,
    /// Nodes where `q` could be evaluated.
    pub x_nodes: Vec<f64>,
    pub q: Vec<f64>,
    pub u0: Vec<f64>,
    pub breakpoints: Vec<f64>,
    /// Nodes dropped by the denominator guard.
    pub flagged: Vec<f64>,
}

pub fn q_from_beta0(ell: f64, spline: &SegmentedSpline, x_nodes: &[f64]) -> RecoveredPotential {
    evaluate(ell, x_nodes, spline.breakpoints(), |_| (Route::Beta, spline))
}

/// Same as [`q_from_beta0`] but from a spline of `u_{ℓ,0}` samples.
pub fn q_from_u0(ell: f64, spline: &SegmentedSpline, x_nodes: &[f64]) -> RecoveredPotential {
    evaluate(ell, x_nodes, spline.breakpoints(), |_| (Route::ParticularSolution, spline))
}

fn evaluate<'s>(
    ell: f64,
    x_nodes: &[f64],
    breakpoints: &[f64],
    pick: impl Fn(f64) -> (Route, &'s SegmentedSpline),
) -> RecoveredPotential {
    let mut out = RecoveredPotential {
        ell,
        x_nodes: Vec::with_capacity(x_nodes.len()),
        q: Vec::with_capacity(x_nodes.len()),
        u0: Vec::with_capacity(x_nodes.len()),
        breakpoints: breakpoints.to_vec(),
        flagged: Vec::new(),
    };
    let c = 2.0 * ell + 3.0;
    for &x in x_nodes {
        let (route, spline) = pick(x);
        let (q, b) = match route {
            Route::Beta => {
                let b = spline.value(x);
                if b + c < DENOMINATOR_GUARD {
                    out.flagged.push(x);
                    continue;
                }
                let num = x * spline.second_derivative(x) + 2.0 * (ell + 1.0) * spline.derivative(x);
                (num / (x * (b + c)), b)
            }
            Route::ParticularSolution => {
                let u = spline.value(x);
                let b = c * (u / x.powf(ell + 1.0) - 1.0);
                if b + c < DENOMINATOR_GUARD {
                    out.flagged.push(x);
                    continue;
                }
                (spline.second_derivative(x) / u - ell * (ell + 1.0) / (x * x), b)
            }
        };
        out.x_nodes.push(x);
        out.q.push(q);
        out.u0.push(u0_at(ell, b, x));
    }
    out
}

fn u0_at(ell: f64, beta0: f64, x: f64) -> f64 {
    (beta0 / (2.0 * ell + 3.0) + 1.0) * x.powf(ell + 1.0)
}

/// `u_{ℓ,0}(x) = (β₀/(2ℓ+3) + 1) x^{ℓ+1}` per node.
pub fn u0_from_beta0(ell: f64, beta0: &[f64], x_nodes: &[f64]) -> Result<Vec<f64>> {
    if beta0.len() != x_nodes.len() {
        return Err(Error::LengthMismatch { expected: x_nodes.len(), got: beta0.len() });
    }
    Ok(beta0.iter().zip(x_nodes).map(|(&b, &x)| u0_at(ell, b, x)).collect())
}

/// Inverse of [`u0_from_beta0`].
pub fn beta0_from_u0(ell: f64, u0: &[f64], x_nodes: &[f64]) -> Result<Vec<f64>> {
    if u0.len() != x_nodes.len() {
        return Err(Error::LengthMismatch { expected: x_nodes.len(), got: u0.len() });
    }
    Ok(u0.iter().zip(x_nodes).map(|(&u, &x)| (2.0 * ell + 3.0) * (u / x.powf(ell + 1.0) - 1.0)).collect())
}

/// Spline-differentiates a β₀ profile at its own nodes.
pub fn recover_potential(profile: &BetaProfile, ell: f64, breakpoints: &[f64]) -> Result<RecoveredPotential> {
    let spline = spline_fit(&profile.x_nodes, &profile.beta0, breakpoints)?;
    Ok(q_from_beta0(ell, &spline, &profile.x_nodes))
}

/// Like [`recover_potential`] with a differentiation route per segment.
/// A single route applies to every segment.
pub fn recover_potential_with(
    profile: &BetaProfile,
    ell: f64,
    breakpoints: &[f64],
    routes: &[Route],
) -> Result<RecoveredPotential> {
    let xs = &profile.x_nodes;
    let beta = spline_fit(xs, &profile.beta0, breakpoints)?;
    if routes.len() != 1 && routes.len() != beta.segment_count() {
        return Err(Error::LengthMismatch { expected: beta.segment_count(), got: routes.len() });
    }
    let u = spline_fit(xs, &u0_from_beta0(ell, &profile.beta0, xs)?, breakpoints)?;
    let route_of = |x: f64| routes[if routes.len() == 1 { 0 } else { beta.segment_of(x) }];
    Ok(evaluate(ell, xs, beta.breakpoints(), |x| match route_of(x) {
        Route::Beta => (Route::Beta, &beta),
        Route::ParticularSolution => (Route::ParticularSolution, &u),
    }))
}

/// Which nodes an error summary ignores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Exclusions {
    /// Open intervals `(a, b)`.
    pub intervals: Vec<(f64, f64)>,
    /// Number of nodes dropped at each end of the node list.
    pub end_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeError {
    pub x: f64,
    pub q_recovered: f64,
    pub q_true: f64,
    pub abs_error: f64,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub nodes: Vec<NodeError>,
    pub max_abs: f64,
    /// `(Σ err² Δx)^{1/2}` over included nodes, each weighted by its cell
    /// width (half the distance to each neighbour).
    pub l2: f64,
    pub included: usize,
}

pub fn error_report(recovered: &RecoveredPotential, model: &PotentialModel, exclusions: &Exclusions) -> ErrorReport {
    let xs = &recovered.x_nodes;
    let n = xs.len();
    let mut nodes = Vec::with_capacity(n);
    let (mut max_abs, mut sq, mut included) = (0.0f64, 0.0, 0);
    for (i, (&x, &q)) in xs.iter().zip(&recovered.q).enumerate() {
        let qt = true_potential(model, x);
        let err = (q - qt).abs();
        let excluded = i < exclusions.end_nodes
            || i + exclusions.end_nodes >= n
            || exclusions.intervals.iter().any(|&(a, b)| x > a && x < b);
        if !excluded {
            max_abs = max_abs.max(err);
            let left = if i > 0 { 0.5 * (x - xs[i - 1]) } else { 0.0 };
            let right = if i + 1 < n { 0.5 * (xs[i + 1] - x) } else { 0.0 };
            sq += err * err * (left + right);
            included += 1;
        }
        nodes.push(NodeError { x, q_recovered: q, q_true: qt, abs_error: err, excluded });
    }
    ErrorReport { nodes, max_abs, l2: sq.sqrt(), included }
}

impl ErrorReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,q_recovered,q_true,abs_error")?;
        for e in &self.nodes {
            writeln!(w, "{},{},{},{}", e.x, e.q_recovered, e.q_true, e.abs_error)?;
        }
        Ok(())
    }
}

impl RecoveredPotential {
    /// Writes `x,q_recovered` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,q_recovered")?;
        for (x, q) in self.x_nodes.iter().zip(&self.q) {
            writeln!(w, "{x},{q}")?;
        }
        Ok(())
    }
}
