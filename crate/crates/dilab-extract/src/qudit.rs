//! The d-level generalization of the swap isometry.
//!
//! Each party supplies one clock-like unitary Zbar, whose d eigenvalues are
//! the d-th roots of unity, and a family of d shift alternatives Xbar^(k).
//! Writing P_k for the Zbar eigenspace projector with eigenvalue
//! omega^k, the circuit routes P_k to ancilla level k and applies
//! Xbar^(k), so each party's system operators are Xbar^(k) P_k. Before
//! extracting, two conditions on the state are checked: the two parties'
//! spectral projectors must agree on the state, and the shift alternatives
//! must move Schmidt weight coherently between levels.

use crate::regularize::embed_local;
use crate::report::ExtractionReport;
use crate::swap::{assemble_core, fill_actions, Isometry};
use crate::{ExtractError, Result};
use dilab_hilbert::{purification, CMat, Complex64, HilbertError, Ket, Realization, State};

/// Clock and shift data for a d-level swap, one clock and d shift
/// alternatives per party.
#[derive(Clone, Debug)]
pub struct QuditSwapOperators {
    pub d: usize,
    pub z_a: CMat,
    pub x_a: Vec<CMat>,
    pub z_b: CMat,
    pub x_b: Vec<CMat>,
}

impl QuditSwapOperators {
    /// Validate unitarity of every building block and that each party has
    /// exactly d shift alternatives.
    pub fn new(d: usize, z_a: CMat, x_a: Vec<CMat>, z_b: CMat, x_b: Vec<CMat>) -> Result<Self> {
        if d < 2 {
            return Err(ExtractError::Shape(format!(
                "level count {d} must be at least 2"
            )));
        }
        if x_a.len() != d || x_b.len() != d {
            return Err(ExtractError::Shape(format!(
                "need {d} shift alternatives per party, got {} and {}",
                x_a.len(),
                x_b.len()
            )));
        }
        for op in [&z_a, &z_b].into_iter().chain(&x_a).chain(&x_b) {
            if !op.is_square() || !op.is_unitary(1e-8) {
                let res = op
                    .dagger()
                    .matmul(op)
                    .sub(&CMat::identity(op.rows()))
                    .op_norm();
                return Err(ExtractError::NotUnitary { residual: res });
            }
        }
        for (z, x) in [(&z_a, &x_a), (&z_b, &x_b)] {
            for xk in x {
                if xk.rows() != z.rows() {
                    return Err(HilbertError::DimMismatch {
                        expected: z.rows(),
                        got: xk.rows(),
                    }
                    .into());
                }
            }
        }
        Ok(Self { d, z_a, x_a, z_b, x_b })
    }
}

/// The ideal clock: diag(1, omega, ..., omega^{d-1}).
pub fn ideal_clock(d: usize) -> CMat {
    CMat::from_fn(d, d, |r, c| {
        if r != c {
            return Complex64::default();
        }
        let phi = 2.0 * std::f64::consts::PI * r as f64 / d as f64;
        Complex64::new(phi.cos(), phi.sin())
    })
}

/// The ideal shift alternatives: Xbar^(k) |m⟩ = |m - k mod d⟩.
pub fn ideal_shift_family(d: usize) -> Vec<CMat> {
    (0..d)
        .map(|k| {
            CMat::from_fn(d, d, |r, c| {
                if r == (c + d - k) % d {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            })
        })
        .collect()
}

/// Spectral projectors of a clock-like unitary from Fourier sums of its
/// powers: P_k = (1/d) sum_j omega^{-jk} Z^j. Fails when Z's spectrum is
/// not the d-th roots of unity, because the sums are then not projectors.
fn clock_projectors(z: &CMat, d: usize) -> Result<Vec<CMat>> {
    let n = z.rows();
    let mut powers = Vec::with_capacity(d);
    let mut acc = CMat::identity(n);
    for _ in 0..d {
        powers.push(acc.clone());
        acc = acc.matmul(z);
    }
    let mut projectors = Vec::with_capacity(d);
    for k in 0..d {
        let mut p = CMat::zeros(n, n);
        for (j, zj) in powers.iter().enumerate() {
            let phi = -2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
            p = p.add(&zj.scale(Complex64::new(phi.cos() / d as f64, phi.sin() / d as f64)));
        }
        let herm = p.hermitian_residual();
        let idem = p.matmul(&p).sub(&p).op_norm();
        if herm > 1e-8 || idem > 1e-8 {
            return Err(ExtractError::Shape(format!(
                "clock operator spectrum is not the {d}-th roots of unity \
                 (projector residual {:.3e})",
                herm.max(idem)
            )));
        }
        projectors.push(p.hermitize());
    }
    Ok(projectors)
}

/// Tolerance for the two state conditions the clock and shift families must
/// satisfy before the extraction is meaningful.
const CONDITION_TOL: f64 = 1e-8;

/// Run the d-level swap isometry and report the extracted state against the
/// maximally entangled state of two d-level systems.
pub fn qudit_swap_extract(r: &Realization, ops: &QuditSwapOperators) -> Result<ExtractionReport> {
    if r.local_dims.len() != 2 {
        return Err(ExtractError::Shape(format!(
            "swap extraction needs two parties, got {}",
            r.local_dims.len()
        )));
    }
    let (da, db) = (r.local_dims[0], r.local_dims[1]);
    if ops.z_a.rows() != da || ops.z_b.rows() != db {
        return Err(HilbertError::DimMismatch {
            expected: da,
            got: ops.z_a.rows(),
        }
        .into());
    }
    let d = ops.d;
    let pa = clock_projectors(&ops.z_a, d)?;
    let pb = clock_projectors(&ops.z_b, d)?;

    let (psi, dp) = match &r.state {
        State::Ket(k) => (k.clone(), 1usize),
        State::Density(rho) => purification(rho)?,
    };
    let dims = [da, db, dp];
    let apply = |a: Option<&CMat>, b: Option<&CMat>, v: &Ket| -> Result<Ket> {
        let mut out = v.clone();
        if let Some(op) = a {
            out = out.apply(&embed_local(op, &dims, 0)?);
        }
        if let Some(op) = b {
            out = out.apply(&embed_local(op, &dims, 1)?);
        }
        Ok(out)
    };

    // Condition 1: the two parties' spectral projectors act identically on
    // the state.
    for k in 0..d {
        let left = apply(Some(&pa[k]), None, &psi)?;
        let right = apply(None, Some(&pb[k]), &psi)?;
        let res: f64 = left
            .amps()
            .iter()
            .zip(right.amps())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res > CONDITION_TOL {
            return Err(ExtractError::SwapCondition {
                condition: 1,
                index: k,
                residual: res,
            });
        }
    }

    // Schmidt weights of the output, read off through Alice's projectors.
    let lambdas: Vec<f64> = (0..d)
        .map(|k| apply(Some(&pa[k]), None, &psi).map(|v| v.norm()))
        .collect::<Result<_>>()?;

    // Condition 2: each shift alternative moves weight between level k and
    // level 0 coherently across the two parties.
    for k in 0..d {
        let left = apply(Some(&ops.x_a[k]), Some(&pb[k]), &psi)?.scale(Complex64::new(
            lambdas[0],
            0.0,
        ));
        let right = apply(Some(&pa[0]), Some(&ops.x_b[k].dagger()), &psi)?
            .scale(Complex64::new(lambdas[k], 0.0));
        let res: f64 = left
            .amps()
            .iter()
            .zip(right.amps())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res > CONDITION_TOL {
            return Err(ExtractError::SwapCondition {
                condition: 2,
                index: k,
                residual: res,
            });
        }
    }

    let f_a: Vec<CMat> = (0..d).map(|k| ops.x_a[k].matmul(&pa[k])).collect();
    let f_b: Vec<CMat> = (0..d).map(|k| ops.x_b[k].matmul(&pb[k])).collect();
    let iso = Isometry::build(r, f_a, f_b, d)?;
    let vs = iso.images(None)?;
    let mut report = assemble_core(&vs, d, iso.pure_input);
    fill_actions(&iso, r, &mut report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swap::{chsh_swap_operators, swap_extract};
    use dilab_bell::chsh_reference;
    use dilab_hilbert::{approx_eq, cr, Measurement};

    fn max_entangled_realization(d: usize) -> Realization {
        let mut amps = vec![cr(0.0); d * d];
        let s = 1.0 / (d as f64).sqrt();
        for k in 0..d {
            amps[k * d + k] = cr(s);
        }
        Realization::new(
            vec![d, d],
            State::Ket(Ket::new(amps).unwrap()),
            vec![
                vec![Measurement::computational(d)],
                vec![Measurement::computational(d)],
            ],
        )
        .unwrap()
    }

    fn ideal_ops(d: usize) -> QuditSwapOperators {
        QuditSwapOperators::new(
            d,
            ideal_clock(d),
            ideal_shift_family(d),
            ideal_clock(d),
            ideal_shift_family(d),
        )
        .unwrap()
    }

    #[test]
    fn ideal_qutrit_extraction_is_exact() {
        let r = max_entangled_realization(3);
        let report = qudit_swap_extract(&r, &ideal_ops(3)).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-8);
        assert!((report.junk_norm - 1.0).abs() < 1e-9);
        report.validate().unwrap();
    }

    #[test]
    fn two_level_case_reduces_to_the_qubit_swap() {
        let r = chsh_reference().realization;
        let qubit_ops = chsh_swap_operators(&r).unwrap();
        let one = CMat::identity(2);
        let ops = QuditSwapOperators::new(
            2,
            qubit_ops.z_a.clone(),
            vec![one.clone(), qubit_ops.x_a.clone()],
            qubit_ops.z_b.clone(),
            vec![one, qubit_ops.x_b.clone()],
        )
        .unwrap();
        let a = swap_extract(&r, &qubit_ops).unwrap();
        let b = qudit_swap_extract(&r, &ops).unwrap();
        assert!(approx_eq(&a.extracted_state, &b.extracted_state, 1e-9));
        assert!((a.fidelity - b.fidelity).abs() < 1e-9);
    }

    #[test]
    fn identity_shifts_fail_the_second_condition() {
        let d = 3;
        let r = max_entangled_realization(d);
        let ops = QuditSwapOperators::new(
            d,
            ideal_clock(d),
            vec![CMat::identity(d); d],
            ideal_clock(d),
            vec![CMat::identity(d); d],
        )
        .unwrap();
        let err = qudit_swap_extract(&r, &ops);
        assert!(matches!(
            err,
            Err(ExtractError::SwapCondition { condition: 2, .. })
        ));
    }

    #[test]
    fn non_root_spectrum_is_rejected() {
        let d = 3;
        let r = max_entangled_realization(d);
        let bad = CMat::from_fn(3, 3, |row, c| {
            if row != c {
                return Complex64::default();
            }
            let phi = 0.4 * row as f64;
            Complex64::new(phi.cos(), phi.sin())
        });
        let ops = QuditSwapOperators::new(
            d,
            bad,
            ideal_shift_family(d),
            ideal_clock(d),
            ideal_shift_family(d),
        )
        .unwrap();
        assert!(matches!(
            qudit_swap_extract(&r, &ops),
            Err(ExtractError::Shape(_))
        ));
    }
}
