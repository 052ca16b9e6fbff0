//! Moment relaxations checked against known quantum values and against
//! explicit realizations.

use dilab_bell::{bundled, bundled_names, classical_bound};
use dilab_hilbert::{random_two_qubit_projective_realization, Scenario};
use dilab_sdp::{
    moment_values, npa_moment_matrix, npa_upper_bound, MomentRegistry, SolveOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ROOT2: f64 = std::f64::consts::SQRT_2;

#[test]
fn chsh_level_two_meets_the_known_quantum_maximum() {
    let chsh = bundled("chsh").unwrap();
    let bound = npa_upper_bound(&chsh, 2, &SolveOptions::default()).unwrap();
    assert!(
        (bound - 2.0 * ROOT2).abs() < 1e-4,
        "level-2 bound {bound} should match 2*sqrt(2)"
    );
}

#[test]
fn chsh_level_one_is_already_tight() {
    let chsh = bundled("chsh").unwrap();
    let bound = npa_upper_bound(&chsh, 1, &SolveOptions::default()).unwrap();
    assert!(
        (bound - 2.0 * ROOT2).abs() < 1e-3,
        "level-1 bound {bound} should match 2*sqrt(2)"
    );
}

#[test]
fn relaxation_sandwich_for_every_bundled_functional() {
    for name in bundled_names() {
        let f = bundled(name).unwrap();
        let classical = classical_bound(&f).unwrap();
        let level1 = npa_upper_bound(&f, 1, &SolveOptions::default()).unwrap();
        let level2 = npa_upper_bound(&f, 2, &SolveOptions::default()).unwrap();
        assert!(
            classical <= level2 + 1e-4,
            "{name}: classical bound {classical} above level-2 bound {level2}"
        );
        assert!(
            level2 <= level1 + 1e-4,
            "{name}: level-2 bound {level2} above level-1 bound {level1}"
        );
        if let Some(quantum) = f.quantum_bound {
            assert!(
                quantum <= level2 + 1e-3,
                "{name}: declared quantum bound {quantum} above level-2 bound {level2}"
            );
            assert!(
                quantum <= level1 + 1e-3,
                "{name}: declared quantum bound {quantum} above level-1 bound {level1}"
            );
        }
    }
}

#[test]
fn random_realizations_live_inside_the_level_two_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let scenario = Scenario::uniform(2, 2, 2);
    let mut registry = MomentRegistry::new();
    let mm = npa_moment_matrix(&scenario, 2, &[], &mut registry).unwrap();
    for round in 0..50 {
        let r = random_two_qubit_projective_realization(&mut rng).unwrap();
        let values = moment_values(&registry, &r).unwrap();
        let gamma = mm.evaluate(&values);
        assert!(
            gamma.hermitian_residual() < 1e-9,
            "round {round}: moment matrix should be Hermitian"
        );
        let min_eig = gamma.hermitize().min_eigenvalue().unwrap();
        assert!(
            min_eig > -1e-9,
            "round {round}: moment matrix has negative eigenvalue {min_eig}"
        );
        let identity_value = values[mm
            .terms(0, 0)
            .first()
            .expect("identity entry has a class")
            .1];
        assert!((identity_value.re - 1.0).abs() < 1e-9);
        assert!(identity_value.im.abs() < 1e-12);
    }
}
