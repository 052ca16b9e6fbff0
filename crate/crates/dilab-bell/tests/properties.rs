//! Structural properties of functional evaluation and classical bounds,
//! checked on seeded random instances: no deterministic strategy beats the
//! reported classical bound, the Bell operator's top eigenvalue dominates
//! every state's value, bounds are invariant under relabeling, and the value
//! is affine in the state.

use dilab_bell::{
    bell_operator, bundled, chsh_reference, classical_bound, deterministic_table, evaluate,
    tilted_chsh_family, BellFunctional,
};
use dilab_hilbert::{
    approx_eq, born_correlations, effects_from_observable, pauli, random_ket,
    random_two_qubit_projective_realization, Realization, Scenario, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_functional(rng: &mut ChaCha8Rng) -> BellFunctional {
    let settings = vec![rng.gen_range(2..=3), rng.gen_range(2..=3)];
    let outcomes: Vec<Vec<usize>> = settings
        .iter()
        .map(|&s| (0..s).map(|_| rng.gen_range(2..=3)).collect())
        .collect();
    let scenario = Scenario::new(settings, outcomes).unwrap();
    let coeffs = scenario
        .joint_settings()
        .iter()
        .map(|setting| {
            scenario
                .joint_outcomes(setting)
                .iter()
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect();
    BellFunctional::new("random", scenario, coeffs, None, None).unwrap()
}

/// Visit every deterministic strategy of a (small) scenario.
fn for_each_strategy(scenario: &Scenario, mut visit: impl FnMut(&Vec<Vec<usize>>)) {
    let mut radices = Vec::new();
    for (p, &s) in scenario.settings.iter().enumerate() {
        for x in 0..s {
            radices.push(scenario.outcomes[p][x]);
        }
    }
    let mut digits = vec![0usize; radices.len()];
    loop {
        let mut strategy = Vec::with_capacity(scenario.settings.len());
        let mut k = 0;
        for &s in &scenario.settings {
            strategy.push(digits[k..k + s].to_vec());
            k += s;
        }
        visit(&strategy);
        let mut i = digits.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[test]
fn classical_bound_is_tight_and_never_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let f = random_functional(&mut rng);
        let (bound, best) = classical_bound(&f).unwrap();
        let best_table = deterministic_table(&f.scenario, &best).unwrap();
        assert!((evaluate(&f, &best_table).unwrap() - bound).abs() < 1e-12);
        for_each_strategy(&f.scenario, |strategy| {
            let table = deterministic_table(&f.scenario, strategy).unwrap();
            assert!(evaluate(&f, &table).unwrap() <= bound + 1e-12);
        });
    }
}

#[test]
fn classical_bound_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..8 {
        let f = random_functional(&mut rng);
        let (bound, _) = classical_bound(&f).unwrap();

        // Random setting permutation per party and outcome permutation per
        // (party, setting), applied to the coefficient table.
        let scenario = &f.scenario;
        let setting_perm: Vec<Vec<usize>> = scenario
            .settings
            .iter()
            .map(|&s| random_permutation(s, &mut rng))
            .collect();
        let outcome_perm: Vec<Vec<Vec<usize>>> = scenario
            .settings
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                (0..s)
                    .map(|x| random_permutation(scenario.outcomes[p][x], &mut rng))
                    .collect()
            })
            .collect();

        // The relabeled scenario must keep outcome counts aligned with the
        // permuted settings.
        let new_outcomes: Vec<Vec<usize>> = scenario
            .settings
            .iter()
            .enumerate()
            .map(|(p, &s)| (0..s).map(|x| scenario.outcomes[p][setting_perm[p][x]]).collect())
            .collect();
        let new_scenario = Scenario::new(scenario.settings.clone(), new_outcomes).unwrap();

        let joint = new_scenario.joint_settings();
        let mut new_coeffs = Vec::with_capacity(joint.len());
        for setting in &joint {
            let old_setting: Vec<usize> = setting
                .iter()
                .enumerate()
                .map(|(p, &x)| setting_perm[p][x])
                .collect();
            let row: Vec<f64> = new_scenario
                .joint_outcomes(setting)
                .iter()
                .map(|outcome| {
                    let old_outcome: Vec<usize> = outcome
                        .iter()
                        .enumerate()
                        .map(|(p, &a)| outcome_perm[p][old_setting[p]][a])
                        .collect();
                    lookup(&f, &old_setting, &old_outcome)
                })
                .collect();
            new_coeffs.push(row);
        }
        let g = BellFunctional::new("relabeled", new_scenario, new_coeffs, None, None).unwrap();
        let (relabeled_bound, _) = classical_bound(&g).unwrap();
        assert!(
            (relabeled_bound - bound).abs() < 1e-12,
            "relabeling moved the classical bound: {bound} -> {relabeled_bound}"
        );
    }
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

fn lookup(f: &BellFunctional, setting: &[usize], outcome: &[usize]) -> f64 {
    let joint = f.scenario.joint_settings();
    let si = joint.iter().position(|s| s == setting).unwrap();
    let outs = f.scenario.joint_outcomes(setting);
    let oi = outs.iter().position(|o| o == outcome).unwrap();
    f.coeffs[si][oi]
}

#[test]
fn bell_operator_eigenvalue_dominates_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let f = bundled("chsh").unwrap();
    let reference = chsh_reference();
    let top = bell_operator(&f, &reference.realization)
        .unwrap()
        .max_eigenvalue()
        .unwrap();
    for _ in 0..30 {
        let psi = random_ket(4, &mut rng);
        let r = Realization::new(
            vec![2, 2],
            State::Ket(psi),
            reference.realization.measurements.clone(),
        )
        .unwrap();
        let value = evaluate(&f, &born_correlations(&r).unwrap()).unwrap();
        assert!(value <= top + 1e-10);
    }
}

#[test]
fn evaluate_agrees_with_operator_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let f = bundled("chsh").unwrap();
    for _ in 0..20 {
        let r = random_two_qubit_projective_realization(&mut rng).unwrap();
        let value = evaluate(&f, &born_correlations(&r).unwrap()).unwrap();
        let op = bell_operator(&f, &r).unwrap();
        let psi = match &r.state {
            State::Ket(k) => k.clone(),
            State::Density(_) => unreachable!("random realizations carry kets"),
        };
        assert!((value - psi.expect(&op).re).abs() < 1e-10);
    }
}

#[test]
fn chsh_operator_with_reference_measurements_reaches_tsirelson() {
    let f = bundled("chsh").unwrap();
    let top = bell_operator(&f, &chsh_reference().realization)
        .unwrap()
        .max_eigenvalue()
        .unwrap();
    assert!((top - 2.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn chsh_operator_with_commuting_measurements_stays_classical() {
    let f = bundled("chsh").unwrap();
    let party = || {
        vec![
            effects_from_observable(&pauli::sz()).unwrap(),
            effects_from_observable(&pauli::sz()).unwrap(),
        ]
    };
    let r = Realization::new(
        vec![2, 2],
        State::Ket(dilab_hilbert::Ket::phi_plus()),
        vec![party(), party()],
    )
    .unwrap();
    let op = bell_operator(&f, &r).unwrap();
    // A0 = A1 = B0 = B1 = sigma_z collapses the combination to 2 sz (x) sz.
    let expected = pauli::sz().kron(&pauli::sz()).scale_re(2.0);
    assert!(approx_eq(&op, &expected, 1e-12));
    assert!((op.max_eigenvalue().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn tilted_family_at_zero_matches_untilted_reference() {
    let (f, tilted_ref) = tilted_chsh_family(0.0).unwrap();
    let reference = chsh_reference();
    let tilted_table = born_correlations(&tilted_ref.realization).unwrap();
    let chsh_table = born_correlations(&reference.realization).unwrap();
    for (row_t, row_c) in tilted_table.rows().iter().zip(chsh_table.rows()) {
        for (p, q) in row_t.iter().zip(row_c) {
            assert!((p - q).abs() < 1e-10);
        }
    }
    let value = evaluate(&f, &tilted_table).unwrap();
    assert!((value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn value_is_affine_in_the_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let f = bundled("chsh").unwrap();
    let measurements = chsh_reference().realization.measurements.clone();
    for _ in 0..10 {
        let rho1 = random_ket(4, &mut rng).projector();
        let rho2 = random_ket(4, &mut rng).projector();
        let p = rng.gen_range(0.0..1.0);
        let mix = rho1.scale_re(p).add(&rho2.scale_re(1.0 - p));
        let value_at = |rho: dilab_hilbert::CMat| {
            let r = Realization::new(vec![2, 2], State::Density(rho), measurements.clone())
                .unwrap();
            evaluate(&f, &born_correlations(&r).unwrap()).unwrap()
        };
        let mixed = value_at(mix);
        let split = p * value_at(rho1) + (1.0 - p) * value_at(rho2);
        assert!((mixed - split).abs() < 1e-10);
    }
}
