use crate::error::{Error, Result};

/// `(L1, L∞)` of the difference; L1 is scaled by the cell measure.
pub fn error_norms(numeric: &[f64], exact: &[f64], cell: f64) -> Result<(f64, f64)> {
    if numeric.len() != exact.len() {
        return Err(Error::Shape { expected: exact.len(), got: numeric.len() });
    }
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in numeric.iter().zip(exact) {
        let d = (a - b).abs();
        l1 += d;
        linf = linf.max(d);
    }
    Ok((l1 * cell, linf))
}

/// `log2(e_coarse / e_fine)`.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Observed order between two rows with an arbitrary refinement ratio.
pub fn observed_order_ratio(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    (e_coarse / e_fine).ln() / ratio.ln()
}
