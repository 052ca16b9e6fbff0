//! Measurement scenarios and conditional probability tables.

use crate::{HilbertError, Result, TOL_PROB};
use serde::{Deserialize, Serialize};

/// A Bell scenario: how many parties there are, how many measurement settings
/// each party has, and how many outcomes each setting produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    /// Settings per party; `settings.len()` is the number of parties.
    pub settings: Vec<usize>,
    /// Outcomes per party per setting, indexed `[party][setting]`.
    pub outcomes: Vec<Vec<usize>>,
}

impl Scenario {
    pub fn new(settings: Vec<usize>, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        let s = Self { settings, outcomes };
        s.validate()?;
        Ok(s)
    }

    /// The n-party scenario with the same number of settings and outcomes for
    /// every party.
    pub fn uniform(parties: usize, settings: usize, outcomes: usize) -> Self {
        Self {
            settings: vec![settings; parties],
            outcomes: vec![vec![outcomes; settings]; parties],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.settings.is_empty() {
            return Err(HilbertError::Invalid("scenario with no parties".into()));
        }
        if self.outcomes.len() != self.settings.len() {
            return Err(HilbertError::Invalid(
                "outcome table does not match party count".into(),
            ));
        }
        for (p, (&s, outs)) in self.settings.iter().zip(&self.outcomes).enumerate() {
            if s == 0 {
                return Err(HilbertError::Invalid(format!(
                    "party {p} has zero settings"
                )));
            }
            if outs.len() != s {
                return Err(HilbertError::Invalid(format!(
                    "party {p} outcome list does not match its setting count"
                )));
            }
            if outs.iter().any(|&o| o == 0) {
                return Err(HilbertError::Invalid(format!(
                    "party {p} has a setting with zero outcomes"
                )));
            }
        }
        Ok(())
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    /// Iterate over all joint settings (one index per party).
    pub fn joint_settings(&self) -> Vec<Vec<usize>> {
        cartesian(&self.settings)
    }

    /// All joint outcomes for a given joint setting.
    pub fn joint_outcomes(&self, setting: &[usize]) -> Vec<Vec<usize>> {
        let counts: Vec<usize> = setting
            .iter()
            .enumerate()
            .map(|(p, &x)| self.outcomes[p][x])
            .collect();
        cartesian(&counts)
    }
}

fn cartesian(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in counts {
        let mut next = Vec::with_capacity(out.len() * c);
        for prefix in &out {
            for v in 0..c {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// A dense table of conditional probabilities p(a, b, ... | x, y, ...).
/// Entries are stored per joint setting, outcomes in row-major order over the
/// parties. Construction validates normalization, entry range, and
/// no-signalling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub scenario: Scenario,
    /// `probabilities[flat_setting][flat_outcome]`, both indices row-major
    /// over parties.
    probabilities: Vec<Vec<f64>>,
}

impl CorrelationTable {
    pub fn new(scenario: Scenario, probabilities: Vec<Vec<f64>>) -> Result<Self> {
        scenario.validate()?;
        let t = Self {
            scenario,
            probabilities,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let settings = self.scenario.joint_settings();
        if self.probabilities.len() != settings.len() {
            return Err(HilbertError::Invalid(format!(
                "expected {} joint settings, got {}",
                settings.len(),
                self.probabilities.len()
            )));
        }
        for (si, setting) in settings.iter().enumerate() {
            let outs = self.scenario.joint_outcomes(setting);
            let row = &self.probabilities[si];
            if row.len() != outs.len() {
                return Err(HilbertError::Invalid(format!(
                    "setting {setting:?} expects {} outcomes, got {}",
                    outs.len(),
                    row.len()
                )));
            }
            let mut total = 0.0;
            for &p in row {
                if !p.is_finite() {
                    return Err(HilbertError::NonFinite);
                }
                if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                    return Err(HilbertError::Invalid(format!(
                        "probability {p} outside [0, 1] at setting {setting:?}"
                    )));
                }
                total += p;
            }
            if (total - 1.0).abs() > TOL_PROB {
                return Err(HilbertError::Invalid(format!(
                    "distribution at setting {setting:?} sums to {total}"
                )));
            }
        }
        self.check_no_signalling()?;
        Ok(())
    }

    /// Marginals of each party must not depend on the other parties'
    /// settings.
    fn check_no_signalling(&self) -> Result<()> {
        let parties = self.scenario.parties();
        if parties < 2 {
            return Ok(());
        }
        for p in 0..parties {
            for x in 0..self.scenario.settings[p] {
                let n_out = self.scenario.outcomes[p][x];
                // Marginal of party p at setting x, for every completion of
                // the other parties' settings; all must agree.
                let mut reference: Option<Vec<f64>> = None;
                for setting in self.scenario.joint_settings() {
                    if setting[p] != x {
                        continue;
                    }
                    let mut marg = vec![0.0; n_out];
                    for (oi, outcome) in self.scenario.joint_outcomes(&setting).iter().enumerate()
                    {
                        marg[outcome[p]] += self.prob_by_flat(&setting, oi);
                    }
                    match &reference {
                        None => reference = Some(marg),
                        Some(r) => {
                            let dev = r
                                .iter()
                                .zip(&marg)
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0f64, f64::max);
                            if dev > TOL_PROB {
                                return Err(HilbertError::Invalid(format!(
                                    "signalling detected for party {p} setting {x}: marginal deviation {dev:.3e}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn setting_index(&self, setting: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &x) in setting.iter().enumerate() {
            idx = idx * self.scenario.settings[p] + x;
        }
        idx
    }

    fn prob_by_flat(&self, setting: &[usize], flat_outcome: usize) -> f64 {
        self.probabilities[self.setting_index(setting)][flat_outcome]
    }

    /// p(outcome | setting) with one index per party in each.
    pub fn prob(&self, setting: &[usize], outcome: &[usize]) -> f64 {
        let mut idx = 0;
        for (p, (&x, &a)) in setting.iter().zip(outcome).enumerate() {
            idx = idx * self.scenario.outcomes[p][x] + a;
        }
        self.probabilities[self.setting_index(setting)][idx]
    }

    /// Two-party binary correlator ⟨A_x B_y⟩ = Σ (−1)^(a+b) p(ab|xy),
    /// with outcome 0 read as +1.
    pub fn correlator(&self, setting: &[usize]) -> Result<f64> {
        for (p, &x) in setting.iter().enumerate() {
            if self.scenario.outcomes[p][x] != 2 {
                return Err(HilbertError::Invalid(format!(
                    "correlator requires binary outcomes, party {p} setting {x} has {}",
                    self.scenario.outcomes[p][x]
                )));
            }
        }
        let mut acc = 0.0;
        for (oi, outcome) in self.scenario.joint_outcomes(setting).iter().enumerate() {
            let parity: usize = outcome.iter().sum();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * self.prob_by_flat(setting, oi);
        }
        Ok(acc)
    }

    /// Marginal correlator of a single party's binary setting, with every
    /// other party's outcome summed over: ⟨A_x⟩ for the two-party case.
    pub fn marginal_correlator(&self, party: usize, setting: usize) -> Result<f64> {
        if self.scenario.outcomes[party][setting] != 2 {
            return Err(HilbertError::Invalid(format!(
                "marginal correlator requires binary outcomes, got {}",
                self.scenario.outcomes[party][setting]
            )));
        }
        // Any completion of the other parties' settings gives the same value
        // by no-signalling; use all-zeros.
        let mut joint: Vec<usize> = vec![0; self.scenario.parties()];
        joint[party] = setting;
        let mut acc = 0.0;
        for (oi, outcome) in self.scenario.joint_outcomes(&joint).iter().enumerate() {
            let sign = if outcome[party] % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * self.prob_by_flat(&joint, oi);
        }
        Ok(acc)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probabilities
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh_scenario() -> Scenario {
        Scenario::uniform(2, 2, 2)
    }

    #[test]
    fn uniform_table_valid() {
        let rows = vec![vec![0.25; 4]; 4];
        let t = CorrelationTable::new(chsh_scenario(), rows).unwrap();
        assert!(t.correlator(&[0, 0]).unwrap().abs() < 1e-15);
        assert!(t.marginal_correlator(0, 1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn signalling_rejected() {
        // Alice's marginal depends on Bob's setting.
        let rows = vec![
            vec![0.5, 0.0, 0.0, 0.5],
            vec![0.0, 0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.0, 0.5],
            vec![0.0, 0.5, 0.5, 0.0],
        ];
        // These rows are non-signalling (both marginals uniform); perturb one.
        let mut bad = rows;
        bad[1] = vec![0.9, 0.0, 0.1, 0.0];
        assert!(CorrelationTable::new(chsh_scenario(), bad).is_err());
    }

    #[test]
    fn perfect_correlation_correlator() {
        let corr = vec![0.5, 0.0, 0.0, 0.5];
        let rows = vec![corr.clone(), corr.clone(), corr.clone(), corr];
        let t = CorrelationTable::new(chsh_scenario(), rows).unwrap();
        for s in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert!((t.correlator(&s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unnormalized_rejected() {
        let rows = vec![vec![0.3; 4]; 4];
        assert!(CorrelationTable::new(chsh_scenario(), rows).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(vec![], vec![]).is_err());
        assert!(Scenario::new(vec![2], vec![vec![2, 0]]).is_err());
        assert!(Scenario::new(vec![2, 2], vec![vec![2, 2], vec![2, 2]]).is_ok());
    }
}
