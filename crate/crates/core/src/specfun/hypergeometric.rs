use crate::error::{Error, Result};

/// Terminating Gauss series `₂F₁(−k, b; c; y)`, summed exactly as `k + 1`
/// terms.
pub fn hyp2f1_terminating(k: u32, b: f64, c: f64, y: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 0..k {
        let i_f = i as f64;
        let denom = (c + i_f) * (i_f + 1.0);
        if c + i_f == 0.0 {
            return Err(Error::ZeroDenominator(i as usize));
        }
        term *= (i_f - k as f64) * (b + i_f) * y / denom;
        sum += term;
    }
    Ok(sum)
}
