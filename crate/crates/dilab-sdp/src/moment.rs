//! Moment matrices over operator words and their semidefinite relaxations.
//!
//! A moment matrix at level k is indexed by the canonical words of length
//! at most k; entry (i, j) refers to the moment of the canonical product
//! basis[i]' basis[j] (primes denoting conjugates). Conjugate words share
//! one class, so each entry is a class id plus a conjugation flag, and each
//! class carries one real variable plus one imaginary variable unless the
//! class is Hermitian. The relaxation then asks for a positive semidefinite
//! assignment with the identity moment pinned to one, which yields certified
//! upper bounds on quantum values of Bell functionals.

use crate::solver::{BlockMap, EqRow, SdpProblem, SolveOptions};
use crate::word::{effect_letters, words_up_to_level, Symbol, Word};
use crate::{Result, SdpError};
use dilab_bell::BellFunctional;
use dilab_hilbert::{tensor_product, CMat, Complex64, Realization, Scenario};
use std::collections::BTreeMap;

/// One additive contribution to a matrix entry: `coeff` times the moment of
/// `class`, conjugated first when `conj` is set.
pub type MomentTerm = (f64, usize, bool);

/// Interns canonical words into moment classes. A word and its conjugate
/// share a class; lookups report which of the two was presented.
#[derive(Clone, Debug, Default)]
pub struct MomentRegistry {
    words: Vec<Word>,
    hermitian: Vec<bool>,
    index: BTreeMap<Word, usize>,
}

impl MomentRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Class id and conjugation flag for a word, interning it if new.
    /// The zero word has no moment and maps to None.
    pub fn intern(&mut self, w: &Word) -> Option<(usize, bool)> {
        if w.is_zero() {
            return None;
        }
        let (rep, conj) = w.conjugate_class();
        let next = self.words.len();
        let id = *self.index.entry(rep.clone()).or_insert(next);
        if id == next {
            self.hermitian.push(rep.is_hermitian());
            self.words.push(rep);
        }
        Some((id, conj))
    }

    /// Lookup without interning; None when the class is absent. Callers
    /// must handle the zero word themselves (it has no class at all).
    pub fn get(&self, w: &Word) -> Option<(usize, bool)> {
        if w.is_zero() {
            return None;
        }
        let (rep, conj) = w.conjugate_class();
        self.index.get(&rep).map(|&id| (id, conj))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, class: usize) -> &Word {
        &self.words[class]
    }

    /// Hermitian classes have real moments.
    pub fn is_hermitian(&self, class: usize) -> bool {
        self.hermitian[class]
    }
}

/// A moment or localizing block: a word basis and, per entry, the linear
/// combination of class moments that the entry stands for. Plain moment
/// matrices have exactly one unit-coefficient term per entry; localizing
/// blocks may combine several.
#[derive(Clone, Debug)]
pub struct MomentMatrix {
    basis: Vec<Word>,
    level: usize,
    entries: Vec<Vec<Vec<MomentTerm>>>,
}

impl MomentMatrix {
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The moment terms entry (i, j) stands for.
    pub fn terms(&self, i: usize, j: usize) -> &[MomentTerm] {
        &self.entries[i][j]
    }

    /// Numeric matrix obtained by substituting one complex value per class.
    pub fn evaluate(&self, values: &[Complex64]) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |i, j| {
            self.entries[i][j]
                .iter()
                .map(|&(c, k, conj)| {
                    let v = if conj { values[k].conj() } else { values[k] };
                    v * c
                })
                .sum()
        })
    }
}

/// The moment matrix over all canonical words of length at most `level`,
/// using one effect letter per outcome except the last for every setting,
/// plus `aux[p]` auxiliary involution letters for party p. Classes are
/// interned into `registry` so further blocks can share variables.
pub fn npa_moment_matrix(
    scenario: &Scenario,
    level: usize,
    aux: &[usize],
    registry: &mut MomentRegistry,
) -> Result<MomentMatrix> {
    if level == 0 {
        return Err(SdpError::Level {
            level,
            reason: "moment matrices start at level 1".into(),
        });
    }
    let parties = scenario.parties();
    let letters: Vec<Vec<Symbol>> = (0..parties)
        .map(|p| {
            let mut ls = effect_letters(scenario, p);
            for index in 0..aux.get(p).copied().unwrap_or(0) {
                ls.push(Symbol::Involution { index });
            }
            ls
        })
        .collect();
    let basis = words_up_to_level(&letters, level);
    let entries = product_entries(&basis, registry);
    Ok(MomentMatrix {
        basis,
        level,
        entries,
    })
}

fn product_entries(basis: &[Word], registry: &mut MomentRegistry) -> Vec<Vec<Vec<MomentTerm>>> {
    let n = basis.len();
    let mut entries = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        let left = basis[i].dagger();
        for j in 0..n {
            if let Some((k, conj)) = registry.intern(&left.mul(&basis[j])) {
                entries[i][j].push((1.0, k, conj));
            }
        }
    }
    entries
}

/// The localizing block of a Hermitian word polynomial `g` over the word
/// basis `base`: entry (i, j) stands for the moment of base[i]' g base[j].
///
/// The polynomial is split into its Hermitian and skew parts. The block is
/// built from the Hermitian part, which makes it symmetric under conjugate
/// transposition by construction, and the skew part is returned as a list
/// of moment-term rows that must each vanish; together the two pieces are
/// equivalent to requiring the unsymmetrized block to be Hermitian and
/// positive semidefinite. A polynomial with no Hermitian part at all cannot
/// localize anything and is rejected.
pub fn localizing_matrix(
    base: &[Word],
    g: &[(f64, Word)],
    registry: &mut MomentRegistry,
) -> Result<(MomentMatrix, Vec<Vec<MomentTerm>>)> {
    if base.is_empty() {
        return Err(SdpError::Shape("empty localizing basis".into()));
    }
    if g.is_empty() {
        return Err(SdpError::Shape("empty localizing polynomial".into()));
    }
    let parties = base[0].parties();
    if base.iter().any(|w| w.parties() != parties)
        || g.iter().any(|(_, w)| w.parties() != parties)
    {
        return Err(SdpError::Shape(
            "localizing basis and polynomial disagree on the party count".into(),
        ));
    }
    let mut herm: BTreeMap<Word, f64> = BTreeMap::new();
    let mut skew: BTreeMap<Word, f64> = BTreeMap::new();
    for (c, w) in g {
        if !c.is_finite() {
            return Err(SdpError::Shape("non-finite localizing coefficient".into()));
        }
        if w.is_zero() {
            continue;
        }
        *herm.entry(w.clone()).or_insert(0.0) += 0.5 * c;
        *herm.entry(w.dagger()).or_insert(0.0) += 0.5 * c;
        *skew.entry(w.clone()).or_insert(0.0) += 0.5 * c;
        *skew.entry(w.dagger()).or_insert(0.0) -= 0.5 * c;
    }
    herm.retain(|_, c| c.abs() > 1e-14);
    skew.retain(|_, c| c.abs() > 1e-14);
    if herm.is_empty() {
        return Err(SdpError::Shape(
            "localizing polynomial has no Hermitian part".into(),
        ));
    }

    let n = base.len();
    let mut entries = vec![vec![Vec::new(); n]; n];
    let mut rows = Vec::new();
    for i in 0..n {
        let left = base[i].dagger();
        for j in 0..n {
            for (w, &c) in &herm {
                if let Some((k, conj)) = registry.intern(&left.mul(w).mul(&base[j])) {
                    entries[i][j].push((c, k, conj));
                }
            }
            if j >= i && !skew.is_empty() {
                let mut row = Vec::new();
                for (w, &c) in &skew {
                    if let Some((k, conj)) = registry.intern(&left.mul(w).mul(&base[j])) {
                        row.push((c, k, conj));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    Ok((
        MomentMatrix {
            basis: base.to_vec(),
            level: base.iter().map(Word::len).max().unwrap_or(0),
            entries,
        },
        rows,
    ))
}

/// A Bell functional's moment relaxation packaged for the solver, keeping
/// the symbolic side available for inspection.
#[derive(Clone, Debug)]
pub struct NpaRelaxation {
    pub problem: SdpProblem,
    pub matrix: MomentMatrix,
    pub registry: MomentRegistry,
    /// Real-part variable per class.
    pub re_var: Vec<usize>,
    /// Imaginary-part variable per class; None for Hermitian classes.
    pub im_var: Vec<Option<usize>>,
}

/// Build the level-`level` moment relaxation of a Bell functional. The
/// solver minimizes the negated functional value, so the certified bound of
/// the solution, negated back, is a certified upper bound on the quantum
/// value.
pub fn npa_problem(functional: &BellFunctional, level: usize) -> Result<NpaRelaxation> {
    let scenario = &functional.scenario;
    let mut registry = MomentRegistry::new();
    let matrix = npa_moment_matrix(scenario, level, &[], &mut registry)?;

    let n_classes = registry.len();
    let mut re_var = Vec::with_capacity(n_classes);
    let mut im_var = Vec::with_capacity(n_classes);
    let mut n_vars = 0;
    for k in 0..n_classes {
        re_var.push(n_vars);
        n_vars += 1;
        if registry.is_hermitian(k) {
            im_var.push(None);
        } else {
            im_var.push(Some(n_vars));
            n_vars += 1;
        }
    }

    let block = doubled_block(&matrix, &re_var, &im_var);

    let identity_class = registry
        .get(&Word::identity(scenario.parties()))
        .expect("identity class is always interned")
        .0;
    let equalities = vec![EqRow {
        coeffs: vec![(re_var[identity_class], 1.0)],
        rhs: 1.0,
    }];

    // Expand the functional over moment classes; every word that appears is
    // a product of at most one effect per party, hence Hermitian, so only
    // real variables are touched. The solver minimizes, so the value gets
    // negated.
    let mut obj: BTreeMap<usize, f64> = BTreeMap::new();
    for (s, joint_setting) in scenario.joint_settings().iter().enumerate() {
        for (o, joint_outcome) in scenario.joint_outcomes(joint_setting).iter().enumerate() {
            let c = functional.coeffs[s][o];
            if c == 0.0 {
                continue;
            }
            for (wc, w) in outcome_words(scenario, joint_setting, joint_outcome) {
                let (k, _) = registry
                    .get(&w)
                    .ok_or_else(|| SdpError::Shape("probability word outside level".into()))?;
                *obj.entry(re_var[k]).or_insert(0.0) += -c * wc;
            }
        }
    }
    let objective: Vec<(usize, f64)> = obj.into_iter().filter(|&(_, c)| c != 0.0).collect();

    let trace_bound = 2.0 * matrix.dim() as f64;
    Ok(NpaRelaxation {
        problem: SdpProblem {
            n_vars,
            blocks: vec![block],
            equalities,
            objective,
            trace_bound,
        },
        matrix,
        registry,
        re_var,
        im_var,
    })
}

/// Real symmetric encoding of the Hermitian moment matrix: for M = R + iI
/// the block is [[R, -I], [I, R]], positive semidefinite exactly when M is.
fn doubled_block(matrix: &MomentMatrix, re_var: &[usize], im_var: &[Option<usize>]) -> BlockMap {
    let n = matrix.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            for &(c, k, conj) in matrix.terms(i, j) {
                entries.push((i, j, re_var[k], c));
                entries.push((n + i, n + j, re_var[k], c));
                if let Some(iv) = im_var[k] {
                    let sign = if conj { -1.0 } else { 1.0 };
                    // Off-diagonal quadrant holds -I; its mirror cell
                    // (j, n+i) holds +I by antisymmetry.
                    entries.push((i, n + j, iv, -c * sign));
                    if i != j {
                        entries.push((j, n + i, iv, c * sign));
                    }
                }
            }
        }
    }
    BlockMap {
        dim: 2 * n,
        entries,
    }
}

/// The words whose moments sum to the probability of `joint_outcome` under
/// `joint_setting`, using completeness to eliminate each setting's last
/// effect.
fn outcome_words(
    scenario: &Scenario,
    joint_setting: &[usize],
    joint_outcome: &[usize],
) -> Vec<(f64, Word)> {
    let parties = scenario.parties();
    let mut terms = vec![(1.0, Word::identity(parties))];
    for p in 0..parties {
        let x = joint_setting[p];
        let a = joint_outcome[p];
        let n_out = scenario.outcomes[p][x];
        if a + 1 < n_out {
            let e = Word::single(parties, p, Symbol::Effect {
                setting: x,
                outcome: a,
            });
            for t in &mut terms {
                t.1 = t.1.mul(&e);
            }
        } else {
            let mut next = Vec::with_capacity(terms.len() * n_out);
            for (c, w) in terms {
                next.push((c, w.clone()));
                for a_other in 0..n_out - 1 {
                    let e = Word::single(parties, p, Symbol::Effect {
                        setting: x,
                        outcome: a_other,
                    });
                    next.push((-c, w.mul(&e)));
                }
            }
            terms = next;
        }
    }
    terms
}

/// Certified upper bound on the quantum value of a Bell functional from its
/// level-`level` moment relaxation.
pub fn npa_upper_bound(
    functional: &BellFunctional,
    level: usize,
    opts: &SolveOptions,
) -> Result<f64> {
    let relaxation = npa_problem(functional, level)?;
    let sol = crate::solver::solve_sdp(&relaxation.problem, opts)?;
    match sol.status {
        crate::solver::SolveStatus::Converged | crate::solver::SolveStatus::IterationCap => {
            Ok(-sol.certified_bound)
        }
        other => Err(SdpError::Solver(format!(
            "moment relaxation ended with status {other:?}"
        ))),
    }
}

/// Evaluate every registered moment class on an explicit realization.
/// Effect letters become the realization's projectors; auxiliary
/// involutions have no realization and are rejected.
pub fn moment_values(registry: &MomentRegistry, r: &Realization) -> Result<Vec<Complex64>> {
    let rho = r.state.density();
    let mut values = Vec::with_capacity(registry.len());
    for k in 0..registry.len() {
        let w = registry.word(k);
        if w.parties() != r.parties() {
            return Err(SdpError::Shape(
                "word and realization disagree on the party count".into(),
            ));
        }
        let mut locals = Vec::with_capacity(r.parties());
        for p in 0..r.parties() {
            let mut local = CMat::identity(r.local_dims[p]);
            for &s in w.block(p) {
                match s {
                    Symbol::Effect { setting, outcome } => {
                        let ms = &r.measurements[p];
                        if setting >= ms.len() || outcome >= ms[setting].outcomes().len() {
                            return Err(SdpError::Shape(format!(
                                "effect ({setting}, {outcome}) outside party {p}'s measurements"
                            )));
                        }
                        local = local.matmul(ms[setting].effect(outcome));
                    }
                    Symbol::Involution { .. } => {
                        return Err(SdpError::Shape(
                            "auxiliary involutions have no realization to evaluate".into(),
                        ));
                    }
                }
            }
            locals.push(local);
        }
        let op = tensor_product(&locals)?;
        values.push(op.matmul(&rho).trace());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn chsh_scenario() -> Scenario {
        Scenario::uniform(2, 2, 2)
    }

    fn find(basis: &[Word], w: &Word) -> usize {
        basis.iter().position(|b| b == w).expect("word in basis")
    }

    #[test]
    fn level_one_basis_holds_one_effect_per_setting() {
        let mut reg = MomentRegistry::new();
        let mm = npa_moment_matrix(&chsh_scenario(), 1, &[], &mut reg).unwrap();
        assert_eq!(mm.dim(), 5);
        assert!(mm.basis()[0].is_identity());
    }

    #[test]
    fn idempotence_merges_diagonal_and_first_row_variables() {
        let mut reg = MomentRegistry::new();
        let mm = npa_moment_matrix(&chsh_scenario(), 1, &[], &mut reg).unwrap();
        let a00 = Word::single(2, 0, Symbol::Effect {
            setting: 0,
            outcome: 0,
        });
        let i = find(mm.basis(), &a00);
        let diag = mm.terms(i, i)[0].1;
        let row = mm.terms(0, i)[0].1;
        assert_eq!(diag, row);
    }

    #[test]
    fn cross_party_products_share_a_real_class() {
        let mut reg = MomentRegistry::new();
        let mm = npa_moment_matrix(&chsh_scenario(), 1, &[], &mut reg).unwrap();
        let a00 = Word::single(2, 0, Symbol::Effect {
            setting: 0,
            outcome: 0,
        });
        let b00 = Word::single(2, 1, Symbol::Effect {
            setting: 0,
            outcome: 0,
        });
        let i = find(mm.basis(), &a00);
        let j = find(mm.basis(), &b00);
        let (c_ij, k_ij, conj_ij) = mm.terms(i, j)[0];
        let (c_ji, k_ji, conj_ji) = mm.terms(j, i)[0];
        assert_eq!(c_ij, 1.0);
        assert_eq!(c_ji, 1.0);
        assert_eq!(k_ij, k_ji);
        assert_eq!(conj_ij, conj_ji);
        assert!(reg.is_hermitian(k_ij));
    }

    #[test]
    fn localizing_with_identity_reduces_to_the_moment_matrix() {
        let mut reg = MomentRegistry::new();
        let mm = npa_moment_matrix(&chsh_scenario(), 1, &[], &mut reg).unwrap();
        let g = vec![(1.0, Word::identity(2))];
        let (loc, rows) = localizing_matrix(mm.basis(), &g, &mut reg).unwrap();
        assert!(rows.is_empty());
        for i in 0..mm.dim() {
            for j in 0..mm.dim() {
                assert_eq!(loc.terms(i, j), mm.terms(i, j));
            }
        }
    }

    #[test]
    fn involution_product_localizer_builds_the_square_block() {
        // Basis {1, A0, A1, A2} of involution words, localizing
        // (A2 A0 + A2 A1) / sqrt(2); the Hermitian part spreads across
        // four words and the skew part produces vanishing rows.
        let inv = |i: usize| Word::single(1, 0, Symbol::Involution { index: i });
        let base = vec![Word::identity(1), inv(0), inv(1), inv(2)];
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let g = vec![
            (c, inv(2).mul(&inv(0))),
            (c, inv(2).mul(&inv(1))),
        ];
        let mut reg = MomentRegistry::new();
        let (loc, rows) = localizing_matrix(&base, &g, &mut reg).unwrap();
        assert_eq!(loc.dim(), 4);
        assert!(!rows.is_empty());
        // Entry (0, 0) is the Hermitian average of the polynomial itself.
        let total: f64 = loc.terms(0, 0).iter().map(|t| t.0.abs()).sum();
        assert!((total - 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn antihermitian_localizers_are_rejected() {
        let inv = |i: usize| Word::single(1, 0, Symbol::Involution { index: i });
        let g = vec![
            (1.0, inv(0).mul(&inv(1))),
            (-1.0, inv(1).mul(&inv(0))),
        ];
        let mut reg = MomentRegistry::new();
        let err = localizing_matrix(&[Word::identity(1)], &g, &mut reg);
        assert!(matches!(err, Err(SdpError::Shape(_))));
    }

    #[test]
    fn probability_words_sum_to_one_over_outcomes() {
        // For any joint setting the outcome expansions over words must sum
        // to the identity word with coefficient one.
        let scenario = Scenario::uniform(2, 2, 3);
        let js = vec![1, 0];
        let mut total: BTreeMap<Word, f64> = BTreeMap::new();
        for jo in scenario.joint_outcomes(&js) {
            for (c, w) in outcome_words(&scenario, &js, &jo) {
                *total.entry(w).or_insert(0.0) += c;
            }
        }
        total.retain(|_, c| c.abs() > 1e-12);
        assert_eq!(total.len(), 1);
        let (w, c) = total.iter().next().unwrap();
        assert!(w.is_identity());
        assert!((c - 1.0).abs() < 1e-12);
    }
}
