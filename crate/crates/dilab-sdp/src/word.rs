//! Words in the operator algebra generated by the parties' measurements.
//!
//! A word is a product of party-local symbols. Factors belonging to
//! different parties commute, so a word decomposes into one ordered block
//! per party. Within a block two symbol kinds occur: projective measurement
//! effects, which are idempotent and annihilate against a different outcome
//! of the same setting, and auxiliary involutions (dichotomic observables or
//! unitary stand-ins), which square to the identity. Canonicalization
//! applies those rewrite rules exhaustively; the rewrite system is confluent
//! so the result does not depend on the order in which rules fire.

use dilab_hilbert::Scenario;

/// One letter of a word, local to a party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// The projector onto `outcome` of measurement `setting`.
    Effect { setting: usize, outcome: usize },
    /// An auxiliary Hermitian involution.
    Involution { index: usize },
}

/// A canonical word: per-party symbol blocks, or the zero element of the
/// algebra when two orthogonal effects have met.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    zero: bool,
    blocks: Vec<Vec<Symbol>>,
}

impl Word {
    pub fn identity(parties: usize) -> Self {
        Word {
            zero: false,
            blocks: vec![Vec::new(); parties],
        }
    }

    pub fn zero(parties: usize) -> Self {
        Word {
            zero: true,
            blocks: vec![Vec::new(); parties],
        }
    }

    /// The word consisting of one symbol at one party.
    pub fn single(parties: usize, party: usize, symbol: Symbol) -> Self {
        let mut blocks = vec![Vec::new(); parties];
        blocks[party].push(symbol);
        Word {
            zero: false,
            blocks,
        }
    }

    /// Build a word from explicit per-party sequences, canonicalizing.
    pub fn from_blocks(blocks: Vec<Vec<Symbol>>) -> Self {
        let parties = blocks.len();
        let mut reduced = Vec::with_capacity(parties);
        for block in blocks {
            match reduce_block(&block) {
                Some(b) => reduced.push(b),
                None => return Word::zero(parties),
            }
        }
        Word {
            zero: false,
            blocks: reduced,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_identity(&self) -> bool {
        !self.zero && self.blocks.iter().all(|b| b.is_empty())
    }

    pub fn parties(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, party: usize) -> &[Symbol] {
        &self.blocks[party]
    }

    /// Total number of letters across all parties.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Product of two words, canonicalized.
    pub fn mul(&self, other: &Word) -> Word {
        debug_assert_eq!(self.parties(), other.parties());
        if self.zero || other.zero {
            return Word::zero(self.parties());
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let mut seq = Vec::with_capacity(a.len() + b.len());
                seq.extend_from_slice(a);
                seq.extend_from_slice(b);
                seq
            })
            .collect();
        Word::from_blocks(blocks)
    }

    /// Hermitian conjugate: every symbol is self-adjoint, so each block
    /// simply reverses.
    pub fn dagger(&self) -> Word {
        Word {
            zero: self.zero,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// The representative shared by this word and its conjugate (the
    /// lexicographically smaller of the two) and whether this word is the
    /// conjugate of that representative.
    pub fn conjugate_class(&self) -> (Word, bool) {
        let dag = self.dagger();
        if dag < *self {
            (dag, true)
        } else {
            (self.clone(), false)
        }
    }

    /// Whether the word equals its own conjugate, which forces its moment
    /// to be real.
    pub fn is_hermitian(&self) -> bool {
        *self == self.dagger()
    }
}

/// Apply the local rewrite rules to one party block with a left-to-right
/// stack scan. Returns None when the block annihilates.
fn reduce_block(seq: &[Symbol]) -> Option<Vec<Symbol>> {
    let mut out: Vec<Symbol> = Vec::with_capacity(seq.len());
    for &s in seq {
        match (out.last().copied(), s) {
            (Some(Symbol::Involution { index: a }), Symbol::Involution { index: b })
                if a == b =>
            {
                out.pop();
            }
            (
                Some(Symbol::Effect {
                    setting: x1,
                    outcome: a1,
                }),
                Symbol::Effect {
                    setting: x2,
                    outcome: a2,
                },
            ) if x1 == x2 => {
                if a1 != a2 {
                    return None;
                }
                // Idempotent: keep the single copy already on the stack.
            }
            _ => out.push(s),
        }
    }
    Some(out)
}

/// The effect letters used for moment bases: all-but-one outcome per
/// setting, since the last effect is linearly dependent through
/// completeness.
pub fn effect_letters(scenario: &Scenario, party: usize) -> Vec<Symbol> {
    let mut letters = Vec::new();
    for setting in 0..scenario.settings[party] {
        for outcome in 0..scenario.outcomes[party][setting].saturating_sub(1) {
            letters.push(Symbol::Effect { setting, outcome });
        }
    }
    letters
}

/// Canonical words of length at most `level` in the given per-party letter
/// sets, identity first, then grouped by the length at which they first
/// appear and sorted within each group.
pub fn words_up_to_level(per_party_letters: &[Vec<Symbol>], level: usize) -> Vec<Word> {
    let parties = per_party_letters.len();
    let identity = Word::identity(parties);
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(identity.clone());
    let mut basis = vec![identity.clone()];
    let mut frontier = vec![identity];
    for _ in 0..level {
        let mut next = std::collections::BTreeSet::new();
        for w in &frontier {
            for (party, letters) in per_party_letters.iter().enumerate() {
                for &letter in letters {
                    let extended = w.mul(&Word::single(parties, party, letter));
                    if !extended.is_zero() && !seen.contains(&extended) {
                        next.insert(extended);
                    }
                }
            }
        }
        frontier = next.into_iter().collect();
        for w in &frontier {
            seen.insert(w.clone());
            basis.push(w.clone());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eff(setting: usize, outcome: usize) -> Symbol {
        Symbol::Effect { setting, outcome }
    }

    fn inv(index: usize) -> Symbol {
        Symbol::Involution { index }
    }

    #[test]
    fn idempotence_and_orthogonality() {
        let w = Word::from_blocks(vec![vec![eff(0, 0), eff(0, 0), eff(0, 0)]]);
        assert_eq!(w, Word::single(1, 0, eff(0, 0)));
        let z = Word::from_blocks(vec![vec![eff(0, 0), eff(0, 1)]]);
        assert!(z.is_zero());
        // An involution pair in the middle cancels and exposes the
        // orthogonal effects.
        let hidden = Word::from_blocks(vec![vec![eff(0, 0), inv(0), inv(0), eff(0, 1)]]);
        assert!(hidden.is_zero());
    }

    #[test]
    fn involutions_cancel_in_cascades() {
        let w = Word::from_blocks(vec![vec![inv(0), inv(1), inv(1), inv(0)]]);
        assert!(w.is_identity());
    }

    #[test]
    fn cross_party_blocks_stay_put() {
        let a = Word::single(2, 0, eff(0, 0));
        let b = Word::single(2, 1, eff(1, 0));
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.block(0), &[eff(0, 0)]);
        assert_eq!(ab.block(1), &[eff(1, 0)]);
    }

    #[test]
    fn conjugate_classes_pair_a_word_with_its_reverse() {
        let w = Word::from_blocks(vec![vec![eff(0, 0), eff(1, 0)]]);
        let (rep, conj) = w.conjugate_class();
        let (rep_dag, conj_dag) = w.dagger().conjugate_class();
        assert_eq!(rep, rep_dag);
        assert_ne!(conj, conj_dag);
        assert!(Word::single(1, 0, eff(0, 0)).is_hermitian());
        assert!(!w.is_hermitian());
    }

    #[test]
    fn chsh_level_bases_have_the_expected_sizes() {
        let scenario = Scenario::uniform(2, 2, 2);
        let letters: Vec<Vec<Symbol>> = (0..2).map(|p| effect_letters(&scenario, p)).collect();
        assert_eq!(words_up_to_level(&letters, 1).len(), 5);
        assert_eq!(words_up_to_level(&letters, 2).len(), 13);
    }
}
