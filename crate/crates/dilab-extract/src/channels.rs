//! Local dephasing channels for analytic robustness bounds, and the
//! prepare-and-discard channel that sets the trivial fidelity floor.
//!
//! The dephasing channel for a party whose Jordan angle is `a` mixes the
//! identity with conjugation by a fixed binary observable G:
//!
//!   L(rho) = (1 + g)/2 rho + (1 - g)/2 G rho G,
//!
//! where g(a) = (1 + sqrt(2)) (sin a + cos a - 1). At a = pi/4 the channel
//! is the identity; at the ends of [0, pi/2] it dephases completely. The
//! dephasing axis follows the measurement frame of each party: Alice's
//! frame is rotated half way between the computational axes, Bob's is not.

use crate::report::trivial_fidelity;
use crate::{ExtractError, Result};
use dilab_hilbert::{
    fidelity_and_distance, pauli, schmidt_decompose, CMat, Complex64, HilbertError, Ket,
};

/// Mixing weight g of the dephasing channel at Jordan angle `angle`.
pub fn dephasing_weight(angle: f64) -> Result<f64> {
    check_angle(angle)?;
    Ok((1.0 + std::f64::consts::SQRT_2) * (angle.sin() + angle.cos() - 1.0))
}

/// Dephasing axes for the two parties at Jordan angles (alpha, beta).
/// Alice dephases toward the closer of (sx + sz)/sqrt(2) and
/// (sx - sz)/sqrt(2); Bob toward the closer of sx and sz.
pub fn dephasing_axes(alpha: f64, beta: f64) -> Result<(CMat, CMat)> {
    check_angle(alpha)?;
    check_angle(beta)?;
    let quarter = std::f64::consts::FRAC_PI_4;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e1 = pauli::sx().add(&pauli::sz()).scale_re(s);
    let e2 = pauli::sx().sub(&pauli::sz()).scale_re(s);
    let gamma_a = if alpha <= quarter { e1 } else { e2 };
    let gamma_b = if beta <= quarter {
        pauli::sx()
    } else {
        pauli::sz()
    };
    Ok((gamma_a, gamma_b))
}

fn check_angle(angle: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) || !angle.is_finite() {
        return Err(ExtractError::AngleOutOfRange { angle });
    }
    Ok(())
}

fn check_two_qubit_density(rho: &CMat) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(HilbertError::DimMismatch {
            expected: 4,
            got: rho.rows(),
        }
        .into());
    }
    if rho.hermitian_residual() > 1e-8 {
        return Err(HilbertError::NotHermitian {
            residual: rho.hermitian_residual(),
        }
        .into());
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(ExtractError::Shape(format!(
            "density matrix trace {} deviates from 1",
            tr.re
        )));
    }
    Ok(())
}

/// Apply the two local dephasing channels at angles (alpha, beta) to a
/// two-qubit density matrix.
pub fn apply_dephasing(rho: &CMat, alpha: f64, beta: f64) -> Result<CMat> {
    check_two_qubit_density(rho)?;
    let (gamma_a, gamma_b) = dephasing_axes(alpha, beta)?;
    let ga = dephasing_weight(alpha)?;
    let gb = dephasing_weight(beta)?;
    let one = CMat::identity(2);
    let step = |state: &CMat, gamma: &CMat, g: f64, party: usize| -> CMat {
        let big = if party == 0 {
            gamma.kron(&one)
        } else {
            one.kron(gamma)
        };
        let flipped = big.matmul(state).matmul(&big);
        state
            .scale_re((1.0 + g) / 2.0)
            .add(&flipped.scale_re((1.0 - g) / 2.0))
    };
    let after_a = step(rho, &gamma_a, ga, 0);
    Ok(step(&after_a, &gamma_b, gb, 1))
}

/// Fidelity of the dephased state with the maximally entangled state: the
/// quantity that analytic robustness lines bound from below.
pub fn dephasing_extraction(rho: &CMat, alpha: f64, beta: f64) -> Result<f64> {
    let out = apply_dephasing(rho, alpha, beta)?;
    let (f, _) = fidelity_and_distance(&Ket::phi_plus(), &out)?;
    Ok(f)
}

/// The channel that ignores the devices entirely: discard the state and
/// prepare the best product approximation of the target. Returns the
/// fidelity it achieves (the square of the target's largest Schmidt
/// coefficient) together with the prepared state.
pub fn prepare_and_discard_fidelity(target: &Ket) -> Result<(f64, Ket)> {
    let f = trivial_fidelity(target)?;
    let d = (target.dim() as f64).sqrt().round() as usize;
    let (coeffs, basis_a, basis_b) = schmidt_decompose(target, [d, d])?;
    let top = coeffs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite coefficients"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut amps = vec![Complex64::default(); d * d];
    for i in 0..d {
        for j in 0..d {
            amps[i * d + j] = basis_a[(i, top)] * basis_b[(j, top)];
        }
    }
    let prepared = Ket::new(amps)?;
    Ok((f, prepared))
}
