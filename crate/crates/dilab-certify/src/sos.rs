//! Sum-of-squares certificates for quantum bounds.
//!
//! A certificate rewrites the shifted Bell operator beta_Q - B as a sum of
//! squared polynomials in the parties' binary observables. Instantiating
//! both sides on a realization turns the algebraic identity into a matrix
//! equation whose residual can be measured, and a near-maximal violation
//! forces each polynomial to nearly annihilate the state: summing the
//! squared norms gives exactly beta_Q minus the achieved value.

use crate::{CertifyError, Result};
use dilab_bell::{bell_operator, bundled, chsh_reference, evaluate, BellFunctional};
use dilab_hilbert::{
    born_correlations, observable_from_measurement, tensor_product, CMat, Realization, State,
};

/// A polynomial in the parties' binary observables: a formal sum of real
/// coefficients times ordered words, each word a list of (party, setting)
/// letters multiplied left to right. The empty word is the identity.
#[derive(Clone, Debug)]
pub struct OperatorPolynomial {
    pub terms: Vec<(f64, Vec<(usize, usize)>)>,
}

impl OperatorPolynomial {
    /// Instantiate the polynomial on a realization as a matrix on the joint
    /// Hilbert space.
    pub fn instantiate(&self, r: &Realization) -> Result<CMat> {
        let dim = r.total_dim();
        let mut acc = CMat::zeros(dim, dim);
        for (coeff, word) in &self.terms {
            let mut m = CMat::identity(dim);
            for &(party, setting) in word {
                m = m.matmul(&embedded_observable(r, party, setting)?);
            }
            acc = acc.add(&m.scale_re(*coeff));
        }
        Ok(acc)
    }
}

fn embedded_observable(r: &Realization, party: usize, setting: usize) -> Result<CMat> {
    if party >= r.measurements.len() || setting >= r.measurements[party].len() {
        return Err(CertifyError::InvalidWord { party, setting });
    }
    let obs = observable_from_measurement(&r.measurements[party][setting])?;
    let factors: Vec<CMat> = r
        .local_dims
        .iter()
        .enumerate()
        .map(|(p, &d)| {
            if p == party {
                obs.clone()
            } else {
                CMat::identity(d)
            }
        })
        .collect();
    Ok(tensor_product(&factors)?)
}

/// A verified sum-of-squares decomposition of a shifted Bell operator.
#[derive(Clone, Debug)]
pub struct SosCertificate {
    pub functional: BellFunctional,
    pub quantum_bound: f64,
    pub polynomials: Vec<OperatorPolynomial>,
    /// Residual recorded on the realization the certificate was checked
    /// against when it was built.
    pub reconstruction_residual: f64,
}

/// Residual norms of a certificate's polynomials on one realization.
#[derive(Clone, Debug)]
pub struct SosResiduals {
    /// Gap between the quantum bound and the achieved value.
    pub epsilon: f64,
    /// One norm ||P state|| per polynomial.
    pub norms: Vec<f64>,
    /// Whether each norm is within the sqrt(epsilon) budget the
    /// decomposition guarantees.
    pub within_bound: Vec<bool>,
}

/// Operator-norm residual of the certificate identity
/// beta_Q - B = sum P'P instantiated on a realization. Zero (up to floating
/// point) for a valid certificate, for any realization whose observables
/// square to the identity.
pub fn sos_verify(cert: &SosCertificate, r: &Realization) -> Result<f64> {
    let b = bell_operator(&cert.functional, r)?;
    let dim = r.total_dim();
    let mut shifted = CMat::identity(dim).scale_re(cert.quantum_bound).sub(&b);
    for p in &cert.polynomials {
        let m = p.instantiate(r)?;
        shifted = shifted.sub(&m.dagger().matmul(&m));
    }
    Ok(shifted.op_norm())
}

/// Norms ||P state|| for every certificate polynomial, together with the
/// violation gap epsilon they must collectively account for. Fails when the
/// realization's value exceeds the certified quantum bound.
pub fn sos_residuals(cert: &SosCertificate, r: &Realization) -> Result<SosResiduals> {
    let value = evaluate(&cert.functional, &born_correlations(r)?)?;
    let epsilon = cert.quantum_bound - value;
    if epsilon < -1e-9 {
        return Err(CertifyError::AboveQuantumBound {
            value,
            bound: cert.quantum_bound,
        });
    }
    let epsilon = epsilon.max(0.0);
    let budget = epsilon.sqrt() + 1e-9;
    let mut norms = Vec::with_capacity(cert.polynomials.len());
    for p in &cert.polynomials {
        let m = p.instantiate(r)?;
        let norm = match &r.state {
            State::Ket(psi) => psi.apply(&m).norm(),
            State::Density(rho) => m
                .dagger()
                .matmul(&m)
                .matmul(rho)
                .trace()
                .re
                .max(0.0)
                .sqrt(),
        };
        norms.push(norm);
    }
    let within_bound = norms.iter().map(|&n| n <= budget).collect();
    Ok(SosResiduals {
        epsilon,
        norms,
        within_bound,
    })
}

/// The degree-one certificate for the CHSH functional: two polynomials
/// proportional to (A0 + A1)/sqrt(2) - B0 and (A0 - A1)/sqrt(2) - B1, scaled
/// by 2^(-1/4) so their squares sum to the shifted operator exactly.
pub fn chsh_sos() -> Result<SosCertificate> {
    let functional = bundled("chsh")?;
    let quantum_bound = functional.quantum_bound.ok_or_else(|| {
        CertifyError::Shape("bundled chsh functional lacks a quantum bound".into())
    })?;
    let q = 2f64.powf(-0.25);
    let c = q * std::f64::consts::FRAC_1_SQRT_2;
    let polynomials = vec![
        OperatorPolynomial {
            terms: vec![
                (c, vec![(0, 0)]),
                (c, vec![(0, 1)]),
                (-q, vec![(1, 0)]),
            ],
        },
        OperatorPolynomial {
            terms: vec![
                (c, vec![(0, 0)]),
                (-c, vec![(0, 1)]),
                (-q, vec![(1, 1)]),
            ],
        },
    ];
    let mut cert = SosCertificate {
        functional,
        quantum_bound,
        polynomials,
        reconstruction_residual: f64::NAN,
    };
    cert.reconstruction_residual = sos_verify(&cert, &chsh_reference().realization)?;
    Ok(cert)
}
