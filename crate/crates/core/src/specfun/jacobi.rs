//! Jacobi polynomials `P_n^{(α,0)}`.

/// `P_n^{(α,0)}(u)` for `n = 0..=max_degree`, by the three-term recurrence
/// in `u`. Requires `α > -1`.
pub fn jacobi_p_seq(max_degree: usize, alpha: f64, u: f64) -> Vec<f64> {
    debug_assert!(alpha > -1.0);
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    out.push((alpha + 1.0) + (alpha + 2.0) * (u - 1.0) / 2.0);
    for n in 2..=max_degree {
        let n_f = n as f64;
        let s = 2.0 * n_f + alpha; // 2n + α + β with β = 0
        let a1 = 2.0 * n_f * (n_f + alpha) * (s - 2.0);
        let a2 = (s - 1.0) * alpha * alpha;
        let a3 = (s - 2.0) * (s - 1.0) * s;
        let a4 = 2.0 * (n_f + alpha - 1.0) * (n_f - 1.0) * s;
        let next = ((a2 + a3 * u) * out[n - 1] - a4 * out[n - 2]) / a1;
        out.push(next);
    }
    out
}
