//! Random-access-code scores for prepare-and-measure data.

use crate::{BellError, Result};
use dilab_hilbert::{Ket, Measurement};

/// Average success probability of an n-dit random access code: Alice encodes
/// a string x of n base-d digits into `states[x]`, Bob measures
/// `measurements[y]` and must output digit `x_y`.
///
/// Strings are indexed most significant digit first: digit y of x is
/// `(x / d^(n-1-y)) mod d`. The average runs uniformly over all d^n strings
/// and n positions, so the prefactor is 1/(n d^n); for n = 2 this matches
/// the usual 1/(2 d^n) normalization.
pub fn rac_score(
    states: &[Ket],
    measurements: &[Measurement],
    n: usize,
    d: usize,
) -> Result<f64> {
    if n == 0 || d == 0 {
        return Err(BellError::Shape("empty game: need n, d >= 1".into()));
    }
    let strings = (d as u64).checked_pow(n as u32).ok_or_else(|| {
        BellError::Shape(format!("d^n overflows for d = {d}, n = {n}"))
    })? as usize;
    if states.len() != strings {
        return Err(BellError::Shape(format!(
            "expected {strings} preparations (d^n), got {}",
            states.len()
        )));
    }
    if measurements.len() != n {
        return Err(BellError::Shape(format!(
            "expected {n} measurements (one per position), got {}",
            measurements.len()
        )));
    }
    let dim = states[0].dim();
    for m in measurements {
        if m.num_outcomes() != d {
            return Err(BellError::Shape(format!(
                "measurement has {} outcomes, expected {d}",
                m.num_outcomes()
            )));
        }
        if m.dim() != dim {
            return Err(BellError::Shape(
                "measurement and preparation dimensions differ".into(),
            ));
        }
    }
    if states.iter().any(|s| s.dim() != dim) {
        return Err(BellError::Shape("preparations have mixed dimensions".into()));
    }

    let mut total = 0.0;
    for (x, psi) in states.iter().enumerate() {
        for (y, m) in measurements.iter().enumerate() {
            let digit = (x / d.pow((n - 1 - y) as u32)) % d;
            total += psi.expect(m.effect(digit)).re;
        }
    }
    Ok(total / (n as f64 * strings as f64))
}
