//! Seeded random states, unitaries, and measurements for property tests.

use crate::cmat::CMat;
use crate::ket::Ket;
use crate::measurement::{Measurement, MeasurementKind};
use crate::realization::{Realization, State};
use crate::{c, Result};
use num_complex::Complex64;
use rand::Rng;

fn gaussian_pair(rng: &mut impl Rng) -> (f64, f64) {
    // Box-Muller transform; the uniform draw is bounded away from zero.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    let (re, im) = gaussian_pair(rng);
    c(re, im)
}

/// Haar-distributed random unitary via QR of a Ginibre matrix, with the
/// R-diagonal phases absorbed so the distribution is exactly Haar.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian_complex(rng)).collect())
        .collect();
    // Modified Gram-Schmidt.
    for k in 0..dim {
        for j in 0..k {
            let ip: Complex64 = cols[j]
                .iter()
                .zip(&cols[k])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..dim {
                let sub = cols[j][i] * ip;
                cols[k][i] -= sub;
            }
        }
        let norm: f64 = cols[k].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut cols[k] {
            *a /= norm;
        }
    }
    CMat::from_fn(dim, dim, |r, c_| cols[c_][r])
}

/// Haar-random pure state.
pub fn random_ket(dim: usize, rng: &mut impl Rng) -> Ket {
    let amps: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    Ket::new_unnormalized(amps)
        .and_then(|k| k.normalize())
        .expect("gaussian vector is nonzero almost surely")
}

/// Random projective measurement: a Haar unitary's columns partitioned into
/// `outcomes` groups of near-equal size, each group summed into a projector.
pub fn random_projective_measurement(
    dim: usize,
    outcomes: usize,
    rng: &mut impl Rng,
) -> Result<Measurement> {
    assert!(outcomes >= 1 && outcomes <= dim, "need 1 <= outcomes <= dim");
    let u = random_unitary(dim, rng);
    let base = dim / outcomes;
    let extra = dim % outcomes;
    let mut effects = Vec::with_capacity(outcomes);
    let mut col = 0usize;
    for k in 0..outcomes {
        let size = base + usize::from(k < extra);
        let mut eff = CMat::zeros(dim, dim);
        for _ in 0..size {
            for r in 0..dim {
                for s in 0..dim {
                    eff[(r, s)] += u[(r, col)] * u[(s, col)].conj();
                }
            }
            col += 1;
        }
        effects.push(eff);
    }
    Measurement::new(effects, MeasurementKind::Projective)
}

/// Random ±1 qubit observable cos(θ)σz + sin(θ)cos(φ)σx + sin(θ)sin(φ)σy
/// with a Haar-uniform axis.
pub fn random_qubit_observable(rng: &mut impl Rng) -> CMat {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let s = (1.0 - z * z).sqrt();
    let (x, y) = (s * phi.cos(), s * phi.sin());
    CMat::from_rows(&[vec![c(z, 0.0), c(x, -y)], vec![c(x, y), c(-z, 0.0)]])
}

/// Random realization: Haar state on the listed local dimensions, and for
/// each party the requested number of random projective measurements with the
/// given outcome count.
pub fn random_realization(
    local_dims: &[usize],
    settings: usize,
    outcomes: usize,
    rng: &mut impl Rng,
) -> Result<Realization> {
    let total: usize = local_dims.iter().product();
    let psi = random_ket(total, rng);
    let mut measurements = Vec::with_capacity(local_dims.len());
    for &d in local_dims {
        let per_party: Result<Vec<Measurement>> = (0..settings)
            .map(|_| random_projective_measurement(d, outcomes, rng))
            .collect();
        measurements.push(per_party?);
    }
    Realization::new(local_dims.to_vec(), State::Ket(psi), measurements)
}

/// Random two-qubit realization with two binary projective measurements per
/// party, the shape used throughout the self-testing suites.
pub fn random_two_qubit_projective_realization(rng: &mut impl Rng) -> Result<Realization> {
    random_realization(&[2, 2], 2, 2, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            assert!(u.is_unitary(1e-12), "dim {dim}");
        }
    }

    #[test]
    fn ket_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_ket(6, &mut rng);
        assert!((k.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_projective_measurement(4, 3, &mut rng).unwrap();
        assert_eq!(m.num_outcomes(), 3);
        // Same seed reproduces the same effects.
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let m2 = random_projective_measurement(4, 3, &mut rng2).unwrap();
        for (a, b) in m.outcomes().iter().zip(m2.outcomes()) {
            assert!(crate::cmat::approx_eq(a, b, 0.0));
        }
    }

    #[test]
    fn qubit_observable_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let a = random_qubit_observable(&mut rng);
            assert!(a.involution_residual() < 1e-12);
        }
    }

    #[test]
    fn realization_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_two_qubit_projective_realization(&mut rng).unwrap();
        assert_eq!(r.parties(), 2);
        assert!(crate::realization::born_correlations(&r).is_ok());
    }
}
