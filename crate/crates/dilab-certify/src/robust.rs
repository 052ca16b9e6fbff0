//! Certified lower bounds on extraction fidelity as a line in the violation.
//!
//! For a fixed extraction channel the claim "output fidelity with the
//! maximally entangled state is at least s beta + mu whenever the CHSH value
//! is beta" reduces, over the two-parameter family of binary qubit
//! measurements that covers every nondegenerate pair up to local isometries,
//! to an operator inequality per parameter cell: the channel's fidelity
//! operator minus s times the CHSH block minus mu must be positive
//! semidefinite. Scanning the cells and recording the worst eigenvalue
//! certifies the line or exposes where it fails.

use crate::{CertifyError, Result};
use dilab_hilbert::{pauli, CMat, Ket};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

/// Minimum eigenvalues this close to zero or better still count as
/// certified, absorbing roundoff in the eigensolver and grid operators.
const CERTIFY_TOL: f64 = 1e-7;

/// The extraction map whose output fidelity the line bounds.
#[derive(Clone, Debug)]
pub enum ExtractionChannel {
    /// Measurement-adapted dephasing toward the axis shared by the party's
    /// two observables, at a strength that grows with their spread. The
    /// identity at maximal spread, full dephasing for coinciding settings.
    Dephasing,
    /// Discard the state and prepare the given two-qubit state. Its fidelity
    /// operator is a multiple of the identity, which certifies exactly the
    /// trivial singlet-fraction floor.
    Prepare(Ket),
}

impl ExtractionChannel {
    /// The operator K whose expectation in the measured state equals the
    /// fidelity of the channel output with the maximally entangled state,
    /// at the given measurement angles.
    pub fn fidelity_operator(&self, alpha: f64, beta: f64) -> Result<CMat> {
        check_angle(alpha)?;
        check_angle(beta)?;
        match self {
            // The dephasing Kraus operators are Hermitian, so the dual map
            // equals the map itself and K is the dephased target projector.
            ExtractionChannel::Dephasing => Ok(dephased_reference(alpha, beta)),
            // Dual of rho -> tr(rho) |chi><chi| applied to the projector.
            ExtractionChannel::Prepare(chi) => {
                if chi.dim() != 4 {
                    return Err(CertifyError::Shape(format!(
                        "prepared state must live on two qubits, got dimension {}",
                        chi.dim()
                    )));
                }
                let overlap = chi.inner(&Ket::phi_plus()).norm_sqr();
                Ok(CMat::identity(4).scale_re(overlap))
            }
        }
    }
}

/// Outcome of scanning one candidate fidelity line over the full
/// measurement-parameter grid.
#[derive(Clone, Debug)]
pub struct RobustLine {
    pub s: f64,
    pub mu: f64,
    pub certified: bool,
    /// Smallest eigenvalue encountered across all grid cells.
    pub worst_min_eigenvalue: f64,
    pub grid_resolution: usize,
}

/// Scan the inequality K - s B - mu over a grid_n by grid_n grid of
/// measurement angles covering both parties' quarter turn, and report
/// whether the line s beta + mu is certified for the channel.
pub fn operator_inequality_certify(
    s: f64,
    mu: f64,
    channel: &ExtractionChannel,
    grid_n: usize,
) -> Result<RobustLine> {
    if grid_n < 2 {
        return Err(CertifyError::Shape(format!(
            "grid resolution {grid_n} is too coarse, need at least 2 points per axis"
        )));
    }
    if !s.is_finite() || !mu.is_finite() {
        return Err(CertifyError::Shape(
            "line coefficients must be finite".into(),
        ));
    }
    let step = FRAC_PI_2 / (grid_n - 1) as f64;
    let mut worst = f64::INFINITY;
    for i in 0..grid_n {
        let alpha = step * i as f64;
        for j in 0..grid_n {
            let beta = step * j as f64;
            let k = channel.fidelity_operator(alpha, beta)?;
            let bell = chsh_block(alpha, beta);
            let m = k
                .sub(&bell.scale_re(s))
                .sub(&CMat::identity(4).scale_re(mu));
            let min = m.min_eigenvalue()?;
            if min < worst {
                worst = min;
            }
        }
    }
    Ok(RobustLine {
        s,
        mu,
        certified: worst >= -CERTIFY_TOL,
        worst_min_eigenvalue: worst,
        grid_resolution: grid_n,
    })
}

/// Evaluate a certified line at a CHSH value, clamped below by the trivial
/// fidelity 1/2 that discarding and repreparing always achieves.
pub fn fidelity_lower_line(beta: f64, line: &RobustLine) -> Result<f64> {
    if !line.certified {
        return Err(CertifyError::Uncertified {
            s: line.s,
            mu: line.mu,
        });
    }
    Ok((line.s * beta + line.mu).max(0.5))
}

/// Coefficients of the steepest line the dephasing channel certifies: it
/// reaches fidelity one at the maximal violation 2 sqrt(2) and crosses the
/// trivial floor 1/2 exactly at the nontrivial violation threshold.
pub fn default_line_coefficients() -> (f64, f64) {
    ((5.0 * SQRT_2 + 4.0) / 16.0, -(1.0 + 2.0 * SQRT_2) / 4.0)
}

/// A shallower certified line with the same intercept, kept as a cross
/// check: its grid scan stays comfortably positive but it no longer reaches
/// fidelity one at the maximal violation.
pub fn conservative_line_coefficients() -> (f64, f64) {
    ((2.0 + SQRT_2) / 8.0, -(1.0 + 2.0 * SQRT_2) / 4.0)
}

/// The CHSH value at which the default certified line crosses the trivial
/// fidelity 1/2. Below it the violation certifies nothing beyond discard
/// and reprepare.
pub fn nontrivial_violation_threshold() -> f64 {
    (16.0 + 14.0 * SQRT_2) / 17.0
}

fn check_angle(angle: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&angle) {
        return Err(CertifyError::Shape(format!(
            "measurement angle {angle} outside the quarter turn"
        )));
    }
    Ok(())
}

fn frame_plus() -> CMat {
    pauli::sx().add(&pauli::sz()).scale_re(std::f64::consts::FRAC_1_SQRT_2)
}

fn frame_minus() -> CMat {
    pauli::sx().sub(&pauli::sz()).scale_re(std::f64::consts::FRAC_1_SQRT_2)
}

/// The CHSH operator for the canonical one-angle-per-party measurement
/// family. The parties use rotated frames so that the quarter-turn square
/// covers every binary pair, and at both angles equal to an eighth turn the
/// four observables are the reference CHSH ones.
fn chsh_block(alpha: f64, beta: f64) -> CMat {
    let a = |sign: f64| {
        frame_plus()
            .scale_re(alpha.cos())
            .add(&frame_minus().scale_re(sign * alpha.sin()))
    };
    let b = |sign: f64| {
        pauli::sx()
            .scale_re(beta.cos())
            .add(&pauli::sz().scale_re(sign * beta.sin()))
    };
    let (a0, a1) = (a(1.0), a(-1.0));
    let (b0, b1) = (b(1.0), b(-1.0));
    a0.kron(&b0)
        .add(&a0.kron(&b1))
        .add(&a1.kron(&b0))
        .sub(&a1.kron(&b1))
}

/// Dephasing strength at one party's angle: zero for coinciding settings,
/// one at the maximally spread eighth turn, symmetric about it.
fn dephasing_weight(angle: f64) -> f64 {
    (1.0 + SQRT_2) * (angle.sin() + angle.cos() - 1.0)
}

/// The dephasing channel applied to the maximally entangled projector. Each
/// party dephases toward the axis its two observables share, which switches
/// frames at the eighth turn.
fn dephased_reference(alpha: f64, beta: f64) -> CMat {
    let gamma_a = if alpha <= FRAC_PI_4 {
        frame_plus()
    } else {
        frame_minus()
    };
    let gamma_b = if beta <= FRAC_PI_4 {
        pauli::sx()
    } else {
        pauli::sz()
    };
    let one = CMat::identity(2);
    let step = |rho: &CMat, gamma: &CMat, g: f64| {
        rho.scale_re((1.0 + g) / 2.0)
            .add(&gamma.matmul(rho).matmul(gamma).scale_re((1.0 - g) / 2.0))
    };
    let phi = Ket::phi_plus().projector();
    let after_a = step(&phi, &gamma_a.kron(&one), dephasing_weight(alpha));
    step(&after_a, &one.kron(&gamma_b), dephasing_weight(beta))
}
