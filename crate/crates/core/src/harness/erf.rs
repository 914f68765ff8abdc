//! Error function to about 1e-15.
//!
//! Below |x| = 3 the series `erf(x) = 2x/√π e^{-x²} Σ (2x²)^n / (2n+1)!!`
//! (positive terms, no cancellation); above, the continued fraction for
//! `erfc`.

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let r = if a < 3.0 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    r.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x >= 3.0 {
        erfc_cf(x)
    } else {
        1.0 - erf(x)
    }
}

fn erf_series(a: f64) -> f64 {
    let x2 = a * a;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * a * (-x2).exp() * sum
}

fn erfc_cf(a: f64) -> f64 {
    let mut t = a;
    for k in (1..=80).rev() {
        t = a + (k as f64 * 0.5) / t;
    }
    0.5 * FRAC_2_SQRT_PI * (-a * a).exp() / t
}
