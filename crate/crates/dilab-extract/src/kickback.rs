//! Phase kickback: extending the swap isometry with a second ancilla pair
//! that resolves the complex-conjugation ambiguity of a third measurement.
//!
//! Three pairwise anticommuting binary observables O0, O1, O2 on a party
//! make the product T = i O2 O1 O0 unitary, and T commutes with O0 and O1,
//! so the branch operators Q_s = (1 + (-1)^s T)/2 split the swap output
//! into an unconjugated branch (s = 0) and a conjugated one (s = 1) without
//! disturbing the extracted state. The weight left in the doubly conjugated
//! branch measures how much of the realization behaves like the transpose
//! of the reference rather than the reference itself.

use crate::regularize::embed_local;
use crate::report::ExtractionReport;
use crate::swap::{assemble_core, fill_actions, qubit_isometry, Isometry, SwapOperators};
use crate::{ExtractError, Result};
use dilab_hilbert::{
    observable_from_measurement, purification, CMat, Complex64, Ket, Realization, State,
};

/// Residual allowed in the pairwise anticommutators on the state.
const ANTICOMMUTE_TOL: f64 = 1e-6;

struct KickbackIsometry {
    iso: Isometry,
    q_a: [CMat; 2],
    q_b: [CMat; 2],
}

impl KickbackIsometry {
    fn build(r: &Realization) -> Result<Self> {
        if r.local_dims.len() != 2 {
            return Err(ExtractError::Shape(format!(
                "phase kickback needs two parties, got {}",
                r.local_dims.len()
            )));
        }
        let mut obs: Vec<Vec<CMat>> = Vec::with_capacity(2);
        for party in 0..2 {
            if r.measurements[party].len() < 3 {
                return Err(ExtractError::Shape(format!(
                    "party {party} needs at least three binary settings, got {}",
                    r.measurements[party].len()
                )));
            }
            let trio = (0..3)
                .map(|s| observable_from_measurement(&r.measurements[party][s]))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            obs.push(trio);
        }
        let (da, db) = (r.local_dims[0], r.local_dims[1]);
        let (psi, dp) = match &r.state {
            State::Ket(k) => (k.clone(), 1usize),
            State::Density(rho) => purification(rho)?,
        };
        let dims = [da, db, dp];
        for party in 0..2 {
            for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let anti = obs[party][i]
                    .matmul(&obs[party][j])
                    .add(&obs[party][j].matmul(&obs[party][i]));
                let residual = psi.apply(&embed_local(&anti, &dims, party)?).norm();
                if residual > ANTICOMMUTE_TOL {
                    return Err(ExtractError::Anticommutation {
                        party,
                        first: i,
                        second: j,
                        residual,
                    });
                }
            }
        }
        let ops = SwapOperators::new(
            obs[0][0].clone(),
            obs[0][1].clone(),
            obs[1][0].clone(),
            obs[1][1].clone(),
        )?;
        let iso = qubit_isometry(r, &ops)?;
        let dims = [iso.dims.0, iso.dims.1, iso.dims.2];
        let branch_pair = |o: &[CMat]| -> (CMat, CMat) {
            let t = o[2]
                .matmul(&o[1])
                .matmul(&o[0])
                .scale(Complex64::new(0.0, 1.0));
            let one = CMat::identity(t.rows());
            (one.add(&t).scale_re(0.5), one.sub(&t).scale_re(0.5))
        };
        let (qa0, qa1) = branch_pair(&obs[0]);
        let (qb0, qb1) = branch_pair(&obs[1]);
        let q_a = [
            embed_local(&qa0, &dims, 0)?,
            embed_local(&qa1, &dims, 0)?,
        ];
        let q_b = [
            embed_local(&qb0, &dims, 1)?,
            embed_local(&qb1, &dims, 1)?,
        ];
        Ok(Self { iso, q_a, q_b })
    }

    /// Split each image into the four conjugation branches, indexed by
    /// s * 2 + t with s for the first party.
    fn branch_split(&self, vs: &[Ket]) -> Vec<Vec<Ket>> {
        let mut out = Vec::with_capacity(4);
        for s in 0..2 {
            for t in 0..2 {
                out.push(
                    vs.iter()
                        .map(|v| v.apply(&self.q_a[s]).apply(&self.q_b[t]))
                        .collect(),
                );
            }
        }
        out
    }
}

/// Stack the branch-resolved images so the conjugation registers join the
/// junk space: entry kl holds the four branches of v_kl back to back.
fn stack_branches(branches: &[Vec<Ket>]) -> Vec<Ket> {
    let n = branches[0].len();
    let dj = branches[0][0].dim();
    (0..n)
        .map(|kl| {
            let mut amps = Vec::with_capacity(4 * dj);
            for branch in branches {
                amps.extend_from_slice(branch[kl].amps());
            }
            Ket::new_unnormalized(amps).expect("finite branch amplitudes")
        })
        .collect()
}

/// Run the phase-kickback isometry on a realization with three binary
/// settings per party. The extracted state and fidelity coincide with the
/// plain swap built from the first two settings; on top of that the report
/// carries the weight of each conjugation branch, with `conjugation_weight`
/// the doubly conjugated one.
pub fn phase_kickback_extract(r: &Realization) -> Result<ExtractionReport> {
    let kb = KickbackIsometry::build(r)?;
    let vs = kb.iso.images(None)?;
    let branches = kb.branch_split(&vs);
    let stacked = stack_branches(&branches);
    let mut report = assemble_core(&stacked, kb.iso.d_out, kb.iso.pure_input);
    let mut weights = [0.0f64; 4];
    for (slot, branch) in branches.iter().enumerate() {
        weights[slot] = branch
            .iter()
            .map(|v| {
                let n = v.norm();
                n * n
            })
            .sum();
    }
    report.conjugation_weight = Some(weights[3]);
    report.branch_weights = Some(weights);
    fill_actions(&kb.iso, r, &mut report)?;
    Ok(report)
}

/// Image of a local operator under the phase-kickback isometry, ordered as
/// reference registers, then conjugation registers, then junk. `op` = None
/// gives the image of the state itself.
pub fn phase_kickback_image(r: &Realization, op: Option<(usize, &CMat)>) -> Result<Ket> {
    let kb = KickbackIsometry::build(r)?;
    let vs = kb.iso.images(op)?;
    let branches = kb.branch_split(&vs);
    let stacked = stack_branches(&branches);
    let dim = stacked.len() * stacked[0].dim();
    let mut amps = Vec::with_capacity(dim);
    for v in &stacked {
        amps.extend_from_slice(v.amps());
    }
    Ok(Ket::new_unnormalized(amps)?)
}
