//! Truncated Gelfand–Levitan system for the Fourier–Jacobi coefficients.
//!
//! At every `x` the coefficients `β_n(x)` of the transmutation kernel satisfy
//!
//! ```text
//! β_m / ((4m+2ℓ+3)x) + Σ_n A_{m,n}(x) β_n = B_m(x),   m = 0..=M
//! ```
//!
//! with `A` and `B` built from the bound states and from ρ-integrals of
//! `|F_ℓ(ρ)|⁻² − 1` against spherical Bessel functions. The system is solved
//! in the symmetric form `(I + L) ξ = b`, `ξ_m = β_m / (√(4m+2ℓ+3) √x)`,
//! whose condition number stays bounded in `M`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::ScatteringData;
use crate::quadrature::{estimate_f_tilde, fit_inverse_linear_tail, tail_a, tail_b, RhoGrid};
use crate::specfun::{bessel_ladder, combine_modified, ln_modified_ladder};

/// Decay model for `|F_ℓ(ρ)|⁻² − 1` used to split off the quadrature tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    /// `F̃/ρ²` plus oscillation; `F̃` is the window mean of `ρ²(|F|⁻² − 1)`.
    #[default]
    InverseSquare,
    /// `c₁/ρ + F̃/ρ²`, fitted jointly; only the `F̃` part gets a closed-form
    /// tail, the `c₁/ρ` part stays inside the finite-grid quadrature.
    InverseLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightOptions {
    pub tail_model: TailModel,
    /// Fraction of top grid nodes used to estimate the tail constants.
    pub window: f64,
}

impl Default for WeightOptions {
    fn default() -> Self {
        Self { tail_model: TailModel::InverseSquare, window: 0.2 }
    }
}

/// Per-node integrand weight of the ρ-integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct GLWeight {
    pub grid: RhoGrid,
    /// `|F_ℓ(ρ_k)|⁻² − 1`.
    pub raw: Vec<f64>,
    /// `raw − F̃/ρ²`; the part integrated numerically.
    pub corrected: Vec<f64>,
    pub f_tilde: f64,
    /// Coefficient of the `1/ρ` term, zero for [`TailModel::InverseSquare`].
    pub c1: f64,
}

pub fn build_gl_weight(data: &ScatteringData, options: &WeightOptions) -> Result<GLWeight> {
    let grid = data.grid;
    if grid.is_empty() {
        return Err(Error::InvalidData("empty rho grid".into()));
    }
    if data.jost.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: data.jost.len() });
    }
    let moduli = data.moduli();
    if let Some(k) = moduli.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidData(format!("|F| = {} at node {k}", moduli[k])));
    }
    let (f_tilde, c1) = match options.tail_model {
        TailModel::InverseSquare => (estimate_f_tilde(&moduli, &grid, options.window)?, 0.0),
        TailModel::InverseLinear => {
            let (c1, f) = fit_inverse_linear_tail(&moduli, &grid, options.window)?;
            (f, c1)
        }
    };
    let raw: Vec<f64> = moduli.iter().map(|m| 1.0 / (m * m) - 1.0).collect();
    let corrected = raw.iter().zip(grid.nodes()).map(|(y, rho)| y - f_tilde / (rho * rho)).collect();
    Ok(GLWeight { grid, raw, corrected, f_tilde, c1 })
}

/// `ℓ = −1/2` makes the `n = m = 0` tail integrals diverge at the origin;
/// those entries are integrated directly from the raw weight.
fn uses_raw_weight(ell: f64, n: usize, m: usize) -> bool {
    ell == -0.5 && n == 0 && m == 0
}

/// The matrix `A` and vector `B` for indices `0..=max_index`.
fn assemble(
    data: &ScatteringData,
    weight: &GLWeight,
    x: f64,
    max_index: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let ell = data.ell;
    let size = max_index + 1;
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut b = DVector::<f64>::zeros(size);

    // One Bessel ladder per ρ-node serves every (m, n).
    let grid = &weight.grid;
    let mut odd = vec![0.0; size];
    for k in 0..grid.len() {
        let z = grid.node(k) * x;
        let ladder = bessel_ladder(ell, max_index, z)?;
        for (n, v) in odd.iter_mut().enumerate() {
            *v = ladder.odd(n);
        }
        let base = ladder.riccati_base();
        let (w, w_raw) = (weight.corrected[k], weight.raw[k]);
        for n in 0..size {
            for m in n..size {
                let wk = if uses_raw_weight(ell, n, m) { w_raw } else { w };
                a[(n, m)] += odd[n] * odd[m] * wk;
            }
            let wk = if uses_raw_weight(ell, 0, n) { w_raw } else { w };
            b[n] += base * odd[n] * wk;
        }
    }

    let h = grid.step;
    let scale = 2.0 / PI;
    for n in 0..size {
        for m in n..size {
            let tail = if uses_raw_weight(ell, n, m) { 0.0 } else { weight.f_tilde * tail_a(ell, n, m, x)? };
            a[(n, m)] = scale * (h * a[(n, m)] + tail);
        }
        let tail = if uses_raw_weight(ell, 0, n) { 0.0 } else { weight.f_tilde * tail_b(ell, n, x)? };
        b[n] = -scale * (h * b[n] + tail);
    }

    // C_j = c_j / (iτ_j)^{2ℓ+2}; the i-powers are absorbed analytically.
    for bs in &data.bound_states {
        let z = bs.tau * x;
        let ln_i = ln_modified_ladder(ell, max_index, z)?;
        let ln_base = z.ln() + ln_i[0];
        for n in 0..size {
            for m in n..size {
                let p = combine_modified(ln_i[2 * n + 1] + ln_i[2 * m + 1], n + m, ell, bs.tau)?;
                a[(n, m)] += bs.c * p;
            }
            b[n] -= bs.c * combine_modified(ln_base + ln_i[2 * n + 1], n, ell, bs.tau)?;
        }
    }

    for n in 0..size {
        for m in 0..n {
            a[(n, m)] = a[(m, n)];
        }
    }
    Ok((a, b))
}

/// `A_{m,n}(x)`.
pub fn assemble_entry_a(m: usize, n: usize, x: f64, data: &ScatteringData, weight: &GLWeight) -> Result<f64> {
    let (a, _) = assemble(data, weight, x, m.max(n))?;
    Ok(a[(m, n)])
}

/// `B_m(x)`.
pub fn assemble_entry_b(m: usize, x: f64, data: &ScatteringData, weight: &GLWeight) -> Result<f64> {
    let (_, b) = assemble(data, weight, x, m)?;
    Ok(b[m])
}

/// Systems whose scaled condition number reaches this are rejected.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSystem {
    pub ell: f64,
    pub x: f64,
    /// Rows `m`, columns `n`: `δ_{mn}/((4m+2ℓ+3)x) + A_{m,n}`.
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// `I + L` with `L_{mn} = √(4m+2ℓ+3) √(4n+2ℓ+3) x A_{m,n}`.
    pub scaled_matrix: DMatrix<f64>,
    pub scaled_rhs: DVector<f64>,
    /// 2-norm condition number of `scaled_matrix`.
    pub cond: f64,
}

impl TruncatedSystem {
    /// Builds the system from assembled `A` and `B`.
    pub fn from_parts(ell: f64, x: f64, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let size = b.len();
        if a.nrows() != size || a.ncols() != size {
            return Err(Error::LengthMismatch { expected: size, got: a.nrows() });
        }
        let s: Vec<f64> = (0..size).map(|m| (4.0 * m as f64 + 2.0 * ell + 3.0).sqrt()).collect();
        let mut matrix = a.clone();
        let mut scaled_matrix = a;
        for m in 0..size {
            matrix[(m, m)] += 1.0 / ((4.0 * m as f64 + 2.0 * ell + 3.0) * x);
            for n in 0..size {
                scaled_matrix[(m, n)] *= s[m] * s[n] * x;
            }
            scaled_matrix[(m, m)] += 1.0;
        }
        let scaled_rhs = DVector::from_iterator(size, (0..size).map(|m| s[m] * x.sqrt() * b[m]));
        let sv = scaled_matrix.clone().singular_values();
        let cond = sv.max() / sv.min();
        Ok(Self { ell, x, matrix, rhs: b, scaled_matrix, scaled_rhs, cond })
    }

    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    /// The system for a smaller truncation index: entries and scale factors
    /// depend only on their own indices, so this is the leading block.
    pub fn leading(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.size() {
            return Err(Error::OutOfRange(format!("leading block {size} of a {}-system", self.size())));
        }
        let scaled_matrix = self.scaled_matrix.view((0, 0), (size, size)).into_owned();
        let sv = scaled_matrix.clone().singular_values();
        Ok(Self {
            ell: self.ell,
            x: self.x,
            matrix: self.matrix.view((0, 0), (size, size)).into_owned(),
            rhs: self.rhs.rows(0, size).into_owned(),
            scaled_matrix,
            scaled_rhs: self.scaled_rhs.rows(0, size).into_owned(),
            cond: sv.max() / sv.min(),
        })
    }

    /// Smallest and largest eigenvalue of the symmetric `I + L`.
    pub fn eigen_extremes(&self) -> (f64, f64) {
        let sym = (&self.scaled_matrix + self.scaled_matrix.transpose()) * 0.5;
        let ev = sym.symmetric_eigenvalues();
        (ev.min(), ev.max())
    }

    fn unscale(&self, xi: &DVector<f64>) -> Vec<f64> {
        let rx = self.x.sqrt();
        xi.iter().enumerate().map(|(m, v)| v * (4.0 * m as f64 + 2.0 * self.ell + 3.0).sqrt() * rx).collect()
    }
}

pub fn build_system(x: f64, max_index: usize, data: &ScatteringData, weight: &GLWeight) -> Result<TruncatedSystem> {
    let (a, b) = assemble(data, weight, x, max_index)?;
    TruncatedSystem::from_parts(data.ell, x, a, b)
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let n = rhs.len();
    let mut a = matrix.clone();
    let mut b = rhs.clone();
    for col in 0..n {
        let (pivot, _) =
            (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if a[(pivot, col)] == 0.0 {
            return Err(Error::Singular(col));
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            b.swap_rows(pivot, col);
        }
        let d = a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[(r, c)] -= f * a[(col, c)];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = DVector::<f64>::zeros(n);
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[(r, c)] * x[c]).sum();
        x[r] = (b[r] - s) / a[(r, r)];
    }
    Ok(x)
}

/// Solves the scaled system and returns `β_0..β_M`.
pub fn solve_system(sys: &TruncatedSystem) -> Result<Vec<f64>> {
    if !(sys.cond < COND_LIMIT) {
        return Err(Error::IllConditioned { cond: sys.cond });
    }
    let xi = gauss_solve(&sys.scaled_matrix, &sys.scaled_rhs)?;
    let beta = sys.unscale(&xi);

    let bv = DVector::from_column_slice(&beta);
    let residual = (&sys.matrix * &bv - &sys.rhs).norm();
    let bound = sys.matrix.norm() * bv.norm() + sys.rhs.norm();
    if residual > 1e-10 * bound {
        return Err(Error::Residual { ratio: residual / bound });
    }
    Ok(beta)
}

/// Result at one `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSolution {
    pub x: f64,
    pub beta: Vec<f64>,
    pub cond: f64,
}

/// Read-only state shared by every `x` of a profile: the dataset and its
/// weight. It is `Sync`, so callers may dispatch nodes to worker threads.
#[derive(Debug, Clone)]
pub struct BetaSolver<'a> {
    data: &'a ScatteringData,
    weight: GLWeight,
    max_index: usize,
}

impl<'a> BetaSolver<'a> {
    pub fn new(data: &'a ScatteringData, max_index: usize, options: &WeightOptions) -> Result<Self> {
        data.validate()?;
        let weight = build_gl_weight(data, options)?;
        Ok(Self { data, weight, max_index })
    }

    pub fn weight(&self) -> &GLWeight {
        &self.weight
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn system_at(&self, x: f64) -> Result<TruncatedSystem> {
        build_system(x, self.max_index, self.data, &self.weight)
    }

    pub fn solve_at(&self, x: f64) -> Result<NodeSolution> {
        let sys = self.system_at(x)?;
        let beta = solve_system(&sys)?;
        Ok(NodeSolution { x, beta, cond: sys.cond })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFailure {
    pub x: f64,
    pub reason: String,
}

/// `β` at a set of `x`-nodes. Failed nodes are dropped from `x_nodes` and
/// listed in `failures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaProfile {
    pub max_index: usize,
    pub x_nodes: Vec<f64>,
    pub beta0: Vec<f64>,
    pub all_beta: Vec<Vec<f64>>,
    pub cond_per_node: Vec<f64>,
    pub failures: Vec<NodeFailure>,
}

impl BetaProfile {
    /// Collects per-node outcomes given in node order.
    pub fn from_results(max_index: usize, results: Vec<(f64, Result<NodeSolution>)>) -> Self {
        let mut p = BetaProfile {
            max_index,
            x_nodes: Vec::new(),
            beta0: Vec::new(),
            all_beta: Vec::new(),
            cond_per_node: Vec::new(),
            failures: Vec::new(),
        };
        for (x, r) in results {
            match r {
                Ok(s) => {
                    p.x_nodes.push(s.x);
                    p.beta0.push(s.beta[0]);
                    p.cond_per_node.push(s.cond);
                    p.all_beta.push(s.beta);
                }
                Err(e) => p.failures.push(NodeFailure { x, reason: e.to_string() }),
            }
        }
        p
    }

    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    /// Structural checks for profiles read from disk.
    pub fn validate(&self) -> Result<()> {
        let n = self.x_nodes.len();
        for len in [self.beta0.len(), self.all_beta.len(), self.cond_per_node.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, got: len });
            }
        }
        check_nodes(&self.x_nodes)?;
        for (b, b0) in self.all_beta.iter().zip(&self.beta0) {
            if b.len() != self.max_index + 1 {
                return Err(Error::LengthMismatch { expected: self.max_index + 1, got: b.len() });
            }
            if b[0] != *b0 {
                return Err(Error::InvalidData("beta0 disagrees with all_beta".into()));
            }
        }
        if self.beta0.iter().chain(&self.cond_per_node).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite profile value".into()));
        }
        Ok(())
    }
}

fn check_nodes(x_nodes: &[f64]) -> Result<()> {
    if x_nodes.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain("x nodes must be positive and finite".into()));
    }
    if x_nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("x nodes must be strictly ascending".into()));
    }
    Ok(())
}

/// Solves the truncated system at every node, sequentially.
pub fn beta_profile(
    data: &ScatteringData,
    x_nodes: &[f64],
    max_index: usize,
    options: &WeightOptions,
) -> Result<BetaProfile> {
    check_nodes(x_nodes)?;
    let solver = BetaSolver::new(data, max_index, options)?;
    let results = x_nodes.iter().map(|&x| (x, solver.solve_at(x))).collect();
    Ok(BetaProfile::from_results(max_index, results))
}

/// Public form of the node check, for callers that drive [`BetaSolver`]
/// themselves.
pub fn validate_nodes(x_nodes: &[f64]) -> Result<()> {
    check_nodes(x_nodes)
}
