//! Reference realizations: the ideal experiments whose statistics the
//! self-testing machinery certifies.

use crate::functional::{evaluate, BellFunctional};
use crate::{bundled, BellError, Result};
use dilab_hilbert::{
    born_correlations, cr, effects_from_observable, pauli, CMat, Ket, Measurement, Realization,
    Scenario, State,
};

/// An ideal realization together with the functional value it is supposed to
/// reach. Constructors validate the value through the Born rule.
#[derive(Clone, Debug)]
pub struct ReferenceRealization {
    pub realization: Realization,
    pub expected_value: f64,
}

impl ReferenceRealization {
    /// Build and check: the Born-rule table of `realization`, evaluated on
    /// `functional`, must match `expected_value` within `tol`.
    pub fn checked(
        realization: Realization,
        functional: &BellFunctional,
        expected_value: f64,
        tol: f64,
    ) -> Result<Self> {
        let table = born_correlations(&realization)?;
        let got = evaluate(functional, &table)?;
        if (got - expected_value).abs() > tol {
            return Err(BellError::Shape(format!(
                "reference realization evaluates to {got}, expected {expected_value}"
            )));
        }
        Ok(Self {
            realization,
            expected_value,
        })
    }
}

fn binary_measurement(observable: &CMat) -> Measurement {
    effects_from_observable(observable).expect("reference observables are involutions")
}

/// The ideal CHSH experiment: A0 = sx, A1 = sz, B0 = (sz + sx)/sqrt(2),
/// B1 = (sx - sz)/sqrt(2) on the maximally entangled state, reaching
/// 2*sqrt(2).
pub fn chsh_reference() -> ReferenceRealization {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let b0 = pauli::sz().add(&pauli::sx()).scale_re(r);
    let b1 = pauli::sx().sub(&pauli::sz()).scale_re(r);
    let realization = Realization::new(
        vec![2, 2],
        State::Ket(Ket::phi_plus()),
        vec![
            vec![
                binary_measurement(&pauli::sx()),
                binary_measurement(&pauli::sz()),
            ],
            vec![binary_measurement(&b0), binary_measurement(&b1)],
        ],
    )
    .expect("reference realization is valid");
    let functional = bundled("chsh").expect("bundled chsh loads");
    ReferenceRealization::checked(
        realization,
        &functional,
        2.0 * std::f64::consts::SQRT_2,
        1e-9,
    )
    .expect("reference value matches")
}

/// The tilted CHSH family: functional alpha<A0> + CHSH with local bound
/// 2 + alpha and quantum bound sqrt(8 + 2 alpha^2), together with its ideal
/// realization cos(theta)|00> + sin(theta)|11>, A0 = sz, A1 = sx and Bob
/// measurements cos(mu) sz +/- sin(mu) sx, where tan(2 theta) =
/// sqrt(2/alpha^2 - 1/2) and tan(mu) = sin(2 theta).
pub fn tilted_chsh_family(alpha: f64) -> Result<(BellFunctional, ReferenceRealization)> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(BellError::AlphaOutOfRange(alpha));
    }
    let scenario = Scenario::uniform(2, 2, 2);
    let mut coeffs = Vec::new();
    for setting in scenario.joint_settings() {
        let (x, y) = (setting[0], setting[1]);
        let corr_sign = if (x, y) == (1, 1) { -1.0 } else { 1.0 };
        let mut row = Vec::new();
        for outcome in scenario.joint_outcomes(&setting) {
            let (a, b) = (outcome[0], outcome[1]);
            let corr = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
            let mut w = corr_sign * corr;
            // The marginal term alpha<A0>, attached to the y = 0 rows (any
            // fixed partner setting works by no-signalling).
            if x == 0 && y == 0 {
                w += alpha * if a == 0 { 1.0 } else { -1.0 };
            }
            row.push(w);
        }
        coeffs.push(row);
    }
    let quantum_bound = (8.0 + 2.0 * alpha * alpha).sqrt();
    let functional = BellFunctional::new(
        format!("tilted-chsh({alpha})"),
        scenario,
        coeffs,
        Some(2.0 + alpha),
        Some(quantum_bound),
    )?;

    let theta = if alpha == 0.0 {
        std::f64::consts::FRAC_PI_4
    } else {
        0.5 * (2.0 / (alpha * alpha) - 0.5).sqrt().atan()
    };
    let mu = (2.0 * theta).sin().atan();
    let mut amps = vec![cr(0.0); 4];
    amps[0] = cr(theta.cos());
    amps[3] = cr(theta.sin());
    let state = Ket::new(amps)?;
    let b0 = pauli::sz().scale_re(mu.cos()).add(&pauli::sx().scale_re(mu.sin()));
    let b1 = pauli::sz().scale_re(mu.cos()).sub(&pauli::sx().scale_re(mu.sin()));
    let realization = Realization::new(
        vec![2, 2],
        State::Ket(state),
        vec![
            vec![
                binary_measurement(&pauli::sz()),
                binary_measurement(&pauli::sx()),
            ],
            vec![binary_measurement(&b0), binary_measurement(&b1)],
        ],
    )?;
    let reference = ReferenceRealization::checked(realization, &functional, quantum_bound, 1e-8)?;
    Ok((functional, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilab_hilbert::approx_eq;

    #[test]
    fn chsh_reference_reaches_tsirelson() {
        let r = chsh_reference();
        assert!((r.expected_value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn chsh_reference_bob_observables_anticommute() {
        let r = chsh_reference().realization;
        let b0 = dilab_hilbert::observable_from_measurement(&r.measurements[1][0]).unwrap();
        let b1 = dilab_hilbert::observable_from_measurement(&r.measurements[1][1]).unwrap();
        let anti = b0.matmul(&b1).add(&b1.matmul(&b0));
        // <psi| {B0, B1} tensor 1 |psi> = 0 and the operator itself vanishes.
        assert!(anti.norm_fro() < 1e-12);
    }

    #[test]
    fn tilted_alpha_zero_is_chsh() {
        let (f, r) = tilted_chsh_family(0.0).unwrap();
        assert!((f.local_bound.unwrap() - 2.0).abs() < 1e-12);
        let table = born_correlations(&r.realization).unwrap();
        let reference = born_correlations(&chsh_reference().realization).unwrap();
        // Identical correlation tables, setting by setting.
        for (a, b) in table.rows().iter().zip(reference.rows()) {
            for (pa, pb) in a.iter().zip(b) {
                assert!((pa - pb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tilted_alpha_one_reaches_sqrt_ten() {
        let (_, r) = tilted_chsh_family(1.0).unwrap();
        assert!((r.expected_value - 10.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        assert!(tilted_chsh_family(2.0).is_err());
        assert!(tilted_chsh_family(-0.1).is_err());
    }

    #[test]
    fn tilted_state_angle_shrinks_with_alpha() {
        let (_, r1) = tilted_chsh_family(0.5).unwrap();
        let (_, r2) = tilted_chsh_family(1.5).unwrap();
        let overlap = |r: &ReferenceRealization| match &r.realization.state {
            State::Ket(k) => k.amps()[0].re,
            _ => unreachable!(),
        };
        // cos(theta) grows toward 1 as the tilt pushes the state to product.
        assert!(overlap(&r2) > overlap(&r1));
        assert!(overlap(&r1) > std::f64::consts::FRAC_1_SQRT_2 - 1e-12);
    }

    #[test]
    fn phi_plus_projector_sanity() {
        let p = Ket::phi_plus().projector();
        assert!(approx_eq(&p, &p.matmul(&p), 1e-12));
    }
}
