//! Incompatibility certificates from measured commutators.
//!
//! Two binary observables generate usable randomness and self-testing power
//! only to the extent that they fail to commute on the state actually
//! prepared. The certificate below quantifies that: it is half the
//! expectation of the absolute value of the commutator in the party's
//! reduced state, ranging from zero for compatible pairs to one for a
//! maximally incompatible pair measured on any state.

use crate::{CertifyError, Result};
use dilab_hilbert::{eigh, observable_from_measurement, CMat, Complex64, Realization, State};

/// Half the expectation of |[O_i, O_j]| in the reduced state of one party,
/// where O_i and O_j are the binary observables of the two given settings.
pub fn commutation_certificate(
    r: &Realization,
    party: usize,
    settings: (usize, usize),
) -> Result<f64> {
    for setting in [settings.0, settings.1] {
        if party >= r.measurements.len() || setting >= r.measurements[party].len() {
            return Err(CertifyError::InvalidWord { party, setting });
        }
    }
    let o_i = observable_from_measurement(&r.measurements[party][settings.0])?;
    let o_j = observable_from_measurement(&r.measurements[party][settings.1])?;
    let comm = o_i.matmul(&o_j).sub(&o_j.matmul(&o_i));
    // The commutator of Hermitian matrices is anti-Hermitian, so i times it
    // is Hermitian and |C| follows from its spectrum.
    let herm = comm.scale(Complex64::new(0.0, 1.0)).hermitize();
    let abs = eigh(&herm)?.apply_spectrum(f64::abs);
    let rho = reduced_state(r, party)?;
    Ok(0.5 * abs.matmul(&rho).trace().re)
}

fn reduced_state(r: &Realization, party: usize) -> Result<CMat> {
    let full = match &r.state {
        State::Ket(psi) => psi.projector(),
        State::Density(rho) => rho.clone(),
    };
    Ok(full.partial_trace(&r.local_dims, &[party])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilab_bell::chsh_reference;
    use dilab_hilbert::{effects_from_observable, pauli, Ket, Realization, State};

    fn pair_realization(a0: CMat, a1: CMat, state: State) -> Realization {
        let m0 = effects_from_observable(&a0).unwrap();
        let m1 = effects_from_observable(&a1).unwrap();
        let bob = effects_from_observable(&pauli::sz()).unwrap();
        Realization::new(vec![2, 2], state, vec![vec![m0, m1], vec![bob.clone(), bob]]).unwrap()
    }

    #[test]
    fn reference_pair_is_maximally_incompatible() {
        let r = chsh_reference().realization;
        let t = commutation_certificate(&r, 0, (0, 1)).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_setting_certifies_nothing() {
        let r = pair_realization(pauli::sz(), pauli::sz(), State::Ket(Ket::phi_plus()));
        let t = commutation_certificate(&r, 0, (0, 1)).unwrap();
        assert!(t.abs() < 1e-12);
    }

    #[test]
    fn tilted_pair_on_the_maximally_mixed_state_gives_the_sine() {
        let angle = std::f64::consts::FRAC_PI_3;
        let a1 = pauli::sz()
            .scale_re(angle.cos())
            .add(&pauli::sx().scale_re(angle.sin()));
        let rho = CMat::identity(4).scale_re(0.25);
        let r = pair_realization(pauli::sz(), a1, State::Density(rho));
        let t = commutation_certificate(&r, 0, (0, 1)).unwrap();
        assert!((t - angle.sin()).abs() < 1e-9);
    }

    #[test]
    fn settings_outside_the_realization_are_rejected() {
        let r = chsh_reference().realization;
        assert!(matches!(
            commutation_certificate(&r, 0, (0, 3)),
            Err(CertifyError::InvalidWord { party: 0, setting: 3 })
        ));
        assert!(matches!(
            commutation_certificate(&r, 2, (0, 1)),
            Err(CertifyError::InvalidWord { party: 2, .. })
        ));
    }

    #[test]
    fn non_binary_settings_are_rejected() {
        let m = dilab_hilbert::Measurement::computational(3);
        let state = State::Ket(Ket::basis(9, 0));
        let r = Realization::new(vec![3, 3], state, vec![vec![m.clone(), m.clone()], vec![m]])
            .unwrap();
        assert!(matches!(
            commutation_certificate(&r, 0, (0, 1)),
            Err(CertifyError::Hilbert(_))
        ));
    }
}
