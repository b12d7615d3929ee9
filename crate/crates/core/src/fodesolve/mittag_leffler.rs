use crate::{Error, Result};

/// Largest `t^q` for which the alternating series is evaluated.
pub const ML_SAFE_ARGUMENT: f64 = 5.0;

pub const ML_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the first neglected term.
    pub remainder_bound: f64,
}

/// `E_q(-t^q) = Σ_k (-t^q)^k / Γ(qk + 1)`, truncated after `terms` terms.
///
/// Terms are formed in log space and accumulated with Neumaier compensation.
pub fn ml_reference(q: f64, t: f64, terms: usize) -> Result<SeriesValue> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1], got {q}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if terms == 0 || terms > ML_MAX_TERMS {
        return Err(Error::Domain(format!("terms must lie in 1..={ML_MAX_TERMS}, got {terms}")));
    }
    let x = t.powf(q);
    if x > ML_SAFE_ARGUMENT {
        return Err(Error::Domain(format!(
            "t^q = {x} is beyond the safe series radius {ML_SAFE_ARGUMENT}"
        )));
    }
    if x == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            remainder_bound: 0.0,
        });
    }
    let ln_x = x.ln();
    let term = |k: usize| {
        let mag = (k as f64 * ln_x - libm::lgamma(q * k as f64 + 1.0)).exp();
        if k % 2 == 0 {
            mag
        } else {
            -mag
        }
    };
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 0..terms {
        let v = term(k);
        let s = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - s) + v
        } else {
            (v - s) + sum
        };
        sum = s;
    }
    Ok(SeriesValue {
        value: sum + comp,
        remainder_bound: term(terms).abs(),
    })
}
