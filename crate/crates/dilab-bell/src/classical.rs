//! Exact classical bounds by deterministic-strategy enumeration.

use crate::{BellError, BellFunctional, Result};
use dilab_hilbert::{CorrelationTable, Scenario};

/// Strategy enumeration guard: the number of deterministic strategies may
/// not exceed this.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// A deterministic local strategy: `strategy[party][setting]` is the fixed
/// outcome that party announces for that setting.
pub type Strategy = Vec<Vec<usize>>;

/// The exact maximum of a functional over deterministic local strategies,
/// together with the maximizing strategy. Ties are broken toward the
/// lexicographically smallest strategy (party-major, then setting-major
/// outcome digits), so the result is reproducible.
pub fn classical_bound(f: &BellFunctional) -> Result<(f64, Strategy)> {
    f.validate()?;
    let scenario = &f.scenario;
    let mut count: u128 = 1;
    for (p, &s) in scenario.settings.iter().enumerate() {
        for x in 0..s {
            count = count.saturating_mul(scenario.outcomes[p][x] as u128);
            if count > ENUMERATION_GUARD {
                return Err(BellError::EnumerationGuard {
                    count,
                    guard: ENUMERATION_GUARD,
                });
            }
        }
    }

    // Mixed-radix digits: one digit per (party, setting), most significant
    // first, so plain counting visits strategies in lexicographic order.
    let mut radices = Vec::new();
    for (p, &s) in scenario.settings.iter().enumerate() {
        for x in 0..s {
            radices.push(scenario.outcomes[p][x]);
        }
    }
    let joint_settings = scenario.joint_settings();
    // Flat outcome index per joint setting, given outcomes per party.
    let outcome_index = |setting: &[usize], outs: &[usize]| -> usize {
        let mut oi = 0;
        for (p, (&x, &a)) in setting.iter().zip(outs).enumerate() {
            oi = oi * scenario.outcomes[p][x] + a;
        }
        oi
    };

    let mut digits = vec![0usize; radices.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        // Value of this strategy.
        let mut val = 0.0;
        for (si, setting) in joint_settings.iter().enumerate() {
            let mut outs = Vec::with_capacity(setting.len());
            let mut base = 0usize;
            for (p, &x) in setting.iter().enumerate() {
                outs.push(digits[base + x]);
                base += scenario.settings[p];
            }
            val += f.coeffs[si][outcome_index(setting, &outs)];
        }
        match &best {
            Some((b, _)) if val <= *b => {}
            _ => best = Some((val, digits.clone())),
        }
        // Increment the mixed-radix counter.
        let mut k = radices.len();
        loop {
            if k == 0 {
                let (value, flat) = best.expect("at least one strategy");
                let mut strategy = Vec::new();
                let mut base = 0usize;
                for &s in &scenario.settings {
                    strategy.push(flat[base..base + s].to_vec());
                    base += s;
                }
                return Ok((value, strategy));
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// The 0/1 correlation table of a deterministic strategy, for property tests
/// and bound cross-checks.
pub fn deterministic_table(scenario: &Scenario, strategy: &Strategy) -> Result<CorrelationTable> {
    if strategy.len() != scenario.parties() {
        return Err(BellError::Shape(
            "strategy party count does not match scenario".into(),
        ));
    }
    for (p, per_party) in strategy.iter().enumerate() {
        if per_party.len() != scenario.settings[p] {
            return Err(BellError::Shape(format!(
                "strategy for party {p} does not cover its settings"
            )));
        }
        for (x, &a) in per_party.iter().enumerate() {
            if a >= scenario.outcomes[p][x] {
                return Err(BellError::Shape(format!(
                    "strategy outcome {a} out of range for party {p} setting {x}"
                )));
            }
        }
    }
    let mut rows = Vec::new();
    for setting in scenario.joint_settings() {
        let chosen: Vec<usize> = setting
            .iter()
            .enumerate()
            .map(|(p, &x)| strategy[p][x])
            .collect();
        let row: Vec<f64> = scenario
            .joint_outcomes(&setting)
            .iter()
            .map(|outs| if *outs == chosen { 1.0 } else { 0.0 })
            .collect();
        rows.push(row);
    }
    Ok(CorrelationTable::new(scenario.clone(), rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{bundled, evaluate};

    #[test]
    fn chsh_bound_is_two() {
        let f = bundled("chsh").unwrap();
        let (value, strategy) = classical_bound(&f).unwrap();
        assert!((value - 2.0).abs() < 1e-12);
        // Lexicographically smallest maximizer: all outcomes 0.
        assert_eq!(strategy, vec![vec![0, 0], vec![0, 0]]);
        // The strategy's table reproduces the bound.
        let table = deterministic_table(&f.scenario, &strategy).unwrap();
        assert!((evaluate(&f, &table).unwrap() - value).abs() < 1e-12);
    }

    #[test]
    fn zero_functional_bound_is_zero() {
        let sc = dilab_hilbert::Scenario::uniform(2, 2, 2);
        let f = BellFunctional::new("zero", sc, vec![vec![0.0; 4]; 4], None, None).unwrap();
        let (value, _) = classical_bound(&f).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn guard_triggers_on_huge_scenarios() {
        // 8 outcomes ^ 9 settings per party, squared, blows past 1e7.
        let sc = dilab_hilbert::Scenario::uniform(2, 9, 8);
        let rows = sc.joint_settings().len();
        let cols = 64;
        let f = BellFunctional::new("big", sc, vec![vec![0.0; cols]; rows], None, None).unwrap();
        assert!(matches!(
            classical_bound(&f),
            Err(BellError::EnumerationGuard { .. })
        ));
    }
}
