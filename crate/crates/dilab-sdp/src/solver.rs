//! A small dense semidefinite solver based on Douglas-Rachford splitting.
//!
//! The problem class is: minimize a linear functional of the variable
//! vector x subject to affine equality constraints and the requirement that
//! a family of symmetric matrices, each depending linearly on x, is positive
//! semidefinite. The iteration alternates projection onto the affine
//! subspace (a single KKT factorization reused every step) with projection
//! onto the PSD cone (one eigendecomposition per block), with
//! over-relaxation. A dual certificate turns the final iterate into a
//! rigorous lower bound on the optimum: the dual slack is projected back to
//! the affine-orthogonal subspace and any residual negative eigenvalue is
//! charged against a caller-supplied trace bound on the feasible set.
//!
//! Everything is deterministic: fixed iteration schedule, fixed
//! factorization pivoting, and a fixed probe vector for the factorization
//! quality check.

use crate::{Result, SdpError};
use nalgebra::{DMatrix, DVector};

/// A symmetric matrix depending linearly on the variable vector: cell
/// (p, q) with p <= q holds the sum of `coeff * x[var]` over the listed
/// entries, mirrored to (q, p).
#[derive(Clone, Debug)]
pub struct BlockMap {
    pub dim: usize,
    /// Entries (p, q, var, coeff) with p <= q.
    pub entries: Vec<(usize, usize, usize, f64)>,
}

/// One affine equality row: sum of `coeff * x[var]` equals `rhs`.
#[derive(Clone, Debug)]
pub struct EqRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A dense semidefinite program in the solver's native form.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub n_vars: usize,
    pub blocks: Vec<BlockMap>,
    pub equalities: Vec<EqRow>,
    /// Linear objective, minimized.
    pub objective: Vec<(usize, f64)>,
    /// An upper bound on the total trace of the block tuple over the
    /// feasible set; the dual certificate charges negative slack
    /// eigenvalues against it.
    pub trace_bound: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Target for the splitting residual (distance between the affine and
    /// PSD iterates).
    pub tol: f64,
    /// Target for the primal-dual objective gap.
    pub gap_tol: f64,
    pub over_relaxation: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 100_000,
            tol: 1e-6,
            gap_tol: 1e-5,
            over_relaxation: 1.8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Residual and gap targets both met.
    Converged,
    /// The iteration locked onto a positive residual: the affine and PSD
    /// sets do not intersect.
    Infeasible,
    /// The objective ran away along an unconstrained direction.
    Unbounded,
    /// Iteration cap reached before the targets were met.
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Objective value at the last affine iterate.
    pub primal_value: f64,
    /// Certified lower bound on the optimum from the dual construction.
    pub certified_bound: f64,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Variable vector at the last affine iterate, in the problem's
    /// original indexing.
    pub x: Vec<f64>,
}

/// Largest allowed sum of block dimensions; this solver targets desk-scale
/// problems and refuses anything bigger.
pub const TOTAL_DIM_CAP: usize = 200;

struct Maps {
    dims: Vec<usize>,
    entries: Vec<Vec<(usize, usize, usize, f64)>>,
}

impl Maps {
    fn apply(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.dims
            .iter()
            .zip(&self.entries)
            .map(|(&d, list)| {
                let mut m = DMatrix::zeros(d, d);
                for &(p, q, v, c) in list {
                    m[(p, q)] += c * x[v];
                }
                for p in 0..d {
                    for q in (p + 1)..d {
                        m[(q, p)] = m[(p, q)];
                    }
                }
                m
            })
            .collect()
    }

    fn apply_transpose(&self, ms: &[DMatrix<f64>], n_vars: usize) -> DVector<f64> {
        let mut x = DVector::zeros(n_vars);
        for (list, m) in self.entries.iter().zip(ms) {
            for &(p, q, v, c) in list {
                if p == q {
                    x[v] += c * m[(p, p)];
                } else {
                    x[v] += c * (m[(p, q)] + m[(q, p)]);
                }
            }
        }
        x
    }

    fn gram(&self, n_vars: usize) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(n_vars, n_vars);
        for list in &self.entries {
            let mut cells: std::collections::BTreeMap<(usize, usize), Vec<(usize, f64)>> =
                std::collections::BTreeMap::new();
            for &(p, q, v, c) in list {
                cells.entry((p, q)).or_default().push((v, c));
            }
            for ((p, q), vars) in cells {
                let weight = if p == q { 1.0 } else { 2.0 };
                for &(v1, c1) in &vars {
                    for &(v2, c2) in &vars {
                        g[(v1, v2)] += weight * c1 * c2;
                    }
                }
            }
        }
        g
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn psd_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = symmetrize(m).symmetric_eigen();
    let d = m.nrows();
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k];
        if lam > 0.0 {
            let v = eig.eigenvectors.column(k);
            for p in 0..d {
                for q in 0..d {
                    out[(p, q)] += lam * v[p] * v[q];
                }
            }
        }
    }
    out
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetrize(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Deterministic pseudo-random probe vector for the factorization quality
/// check (splitmix64 driving uniform [-1, 1] entries).
fn probe_vector(len: usize) -> DVector<f64> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    DVector::from_iterator(
        len,
        (0..len).map(|_| (next() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0),
    )
}

enum KktSolver {
    Lu(nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
    Pinv(DMatrix<f64>),
}

impl KktSolver {
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match self {
            KktSolver::Lu(lu) => lu.solve(rhs).expect("factorized KKT system must solve"),
            KktSolver::Pinv(pinv) => pinv * rhs,
        }
    }
}

fn pseudo_inverse(m: &DMatrix<f64>, rcond: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cut = rcond * smax;
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let mut si = DMatrix::zeros(vt.nrows(), u.ncols());
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s > cut {
            si[(k, k)] = 1.0 / s;
        }
    }
    vt.transpose() * si * u.transpose()
}

fn validate(problem: &SdpProblem) -> Result<()> {
    if problem.blocks.is_empty() {
        return Err(SdpError::Shape("problem has no PSD blocks".into()));
    }
    let total: usize = problem.blocks.iter().map(|b| b.dim).sum();
    if total > TOTAL_DIM_CAP {
        return Err(SdpError::DimCap {
            dim: total,
            cap: TOTAL_DIM_CAP,
        });
    }
    for b in &problem.blocks {
        if b.dim == 0 {
            return Err(SdpError::Shape("zero-dimensional block".into()));
        }
        for &(p, q, v, c) in &b.entries {
            if p > q || q >= b.dim || v >= problem.n_vars || !c.is_finite() {
                return Err(SdpError::Shape(format!(
                    "bad block entry (p={p}, q={q}, var={v}, coeff={c})"
                )));
            }
        }
    }
    for row in &problem.equalities {
        if !row.rhs.is_finite() {
            return Err(SdpError::Shape("non-finite equality rhs".into()));
        }
        for &(v, c) in &row.coeffs {
            if v >= problem.n_vars || !c.is_finite() {
                return Err(SdpError::Shape(format!(
                    "bad equality entry (var={v}, coeff={c})"
                )));
            }
        }
    }
    for &(v, c) in &problem.objective {
        if v >= problem.n_vars || !c.is_finite() {
            return Err(SdpError::Shape(format!(
                "bad objective entry (var={v}, coeff={c})"
            )));
        }
    }
    if !(problem.trace_bound.is_finite() && problem.trace_bound > 0.0) {
        return Err(SdpError::Shape(
            "trace bound must be positive and finite".into(),
        ));
    }
    Ok(())
}

/// Minimize the problem's objective over its feasible set. Returns the last
/// iterate's objective value together with a certified lower bound on the
/// true optimum; see [`SolveStatus`] for how termination is classified.
pub fn solve_sdp(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    validate(problem)?;

    // Keep only variables that actually appear in a block or an equality;
    // an objective variable outside that set is unconstrained, which makes
    // the minimization unbounded.
    let mut used = vec![false; problem.n_vars];
    for b in &problem.blocks {
        for &(_, _, v, _) in &b.entries {
            used[v] = true;
        }
    }
    for row in &problem.equalities {
        for &(v, _) in &row.coeffs {
            used[v] = true;
        }
    }
    for &(v, c) in &problem.objective {
        if !used[v] && c != 0.0 {
            return Ok(SdpSolution {
                primal_value: f64::NEG_INFINITY,
                certified_bound: f64::NEG_INFINITY,
                gap: f64::INFINITY,
                residual: f64::INFINITY,
                iterations: 0,
                status: SolveStatus::Unbounded,
                x: vec![0.0; problem.n_vars],
            });
        }
    }
    let mut remap = vec![usize::MAX; problem.n_vars];
    let mut nv = 0;
    for (v, &u) in used.iter().enumerate() {
        if u {
            remap[v] = nv;
            nv += 1;
        }
    }

    let maps = Maps {
        dims: problem.blocks.iter().map(|b| b.dim).collect(),
        entries: problem
            .blocks
            .iter()
            .map(|b| {
                b.entries
                    .iter()
                    .map(|&(p, q, v, c)| (p, q, remap[v], c))
                    .collect()
            })
            .collect(),
    };
    let n_blocks = maps.dims.len();

    // Equality system with SVD-based row reduction of [E | -f]; this
    // deduplicates dependent rows and exposes inconsistency.
    let rows = &problem.equalities;
    let mut m_ext = DMatrix::zeros(rows.len().max(1), nv + 1);
    for (r, row) in rows.iter().enumerate() {
        for &(v, c) in &row.coeffs {
            m_ext[(r, remap[v])] += c;
        }
        m_ext[(r, nv)] = -row.rhs;
    }
    let svd = m_ext.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count();
    // Rank comparison detects inconsistent equalities outright: appending
    // the right-hand side column must not enlarge the row space.
    let e_only = m_ext.columns(0, nv).into_owned();
    let sv_e = e_only.singular_values();
    let smax_e = sv_e.iter().fold(0.0f64, |a, &b| a.max(b));
    let rank_e = sv_e.iter().filter(|&&s| s > 1e-10 * smax_e).count();
    if rank > rank_e {
        return Ok(SdpSolution {
            primal_value: f64::NAN,
            certified_bound: f64::NAN,
            gap: f64::INFINITY,
            residual: f64::INFINITY,
            iterations: 0,
            status: SolveStatus::Infeasible,
            x: vec![0.0; problem.n_vars],
        });
    }
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let mut e_mat = DMatrix::zeros(rank, nv);
    let mut f_vec = DVector::zeros(rank);
    for r in 0..rank {
        for v in 0..nv {
            e_mat[(r, v)] = vt[(r, v)];
        }
        f_vec[r] = -vt[(r, nv)];
    }
    let m = rank;

    // One KKT factorization serves every affine projection. A probe solve
    // guards against ill-conditioning; the fallback is a pseudoinverse.
    let gram = maps.gram(nv);
    let mut kkt = DMatrix::zeros(nv + m, nv + m);
    kkt.view_mut((0, 0), (nv, nv)).copy_from(&gram);
    kkt.view_mut((0, nv), (nv, m)).copy_from(&e_mat.transpose());
    kkt.view_mut((nv, 0), (m, nv)).copy_from(&e_mat);
    let solver = {
        let lu = nalgebra::linalg::LU::new(kkt.clone());
        let probe = probe_vector(nv + m);
        match lu.solve(&probe) {
            Some(sol)
                if sol.iter().all(|t| t.is_finite())
                    && (&kkt * &sol - &probe).norm() <= 1e-6 * probe.norm() =>
            {
                KktSolver::Lu(lu)
            }
            _ => KktSolver::Pinv(pseudo_inverse(&kkt, 1e-12)),
        }
    };

    let proj_affine = |ms: &[DMatrix<f64>]| -> (DVector<f64>, Vec<DMatrix<f64>>) {
        let top = maps.apply_transpose(ms, nv);
        let mut rhs = DVector::zeros(nv + m);
        rhs.rows_mut(0, nv).copy_from(&top);
        rhs.rows_mut(nv, m).copy_from(&f_vec);
        let sol = solver.solve(&rhs);
        let xv = DVector::from_iterator(nv, (0..nv).map(|i| sol[i]));
        let out = maps.apply(&xv);
        (xv, out)
    };
    let proj_affine_zero = |ms: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> {
        let top = maps.apply_transpose(ms, nv);
        let mut rhs = DVector::zeros(nv + m);
        rhs.rows_mut(0, nv).copy_from(&top);
        let sol = solver.solve(&rhs);
        let xv = DVector::from_iterator(nv, (0..nv).map(|i| sol[i]));
        maps.apply(&xv)
    };

    let mut c_vec = DVector::zeros(nv);
    for &(v, c) in &problem.objective {
        if used[v] {
            c_vec[remap[v]] += c;
        }
    }
    let c_mat = maps.apply(&(pseudo_inverse(&gram, 1e-12) * &c_vec));
    let c_norm = c_mat
        .iter()
        .map(|mtx| mtx.iter().map(|t| t * t).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let gamma = 1.0 / c_norm.max(1e-12);

    let zero_ms: Vec<DMatrix<f64>> = maps.dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    let (_, x_feas) = proj_affine(&zero_ms);
    let tau = problem.trace_bound;

    let dual_bound = |z: &[DMatrix<f64>], x: &[DMatrix<f64>]| -> f64 {
        let d: Vec<DMatrix<f64>> = (0..n_blocks)
            .map(|b| &c_mat[b] - (&z[b] - &x[b]) / gamma)
            .collect();
        let p0 = proj_affine_zero(&d);
        let dp: Vec<DMatrix<f64>> = (0..n_blocks).map(|b| &d[b] - &p0[b]).collect();
        let lmin = (0..n_blocks)
            .map(|b| min_eigenvalue(&(&c_mat[b] - &dp[b])))
            .fold(f64::INFINITY, f64::min);
        let d0: f64 = (0..n_blocks)
            .map(|b| frobenius_inner(&dp[b], &x_feas[b]))
            .sum();
        d0 + lmin.min(0.0) * tau
    };

    let lam = opts.over_relaxation;
    let mut z = zero_ms.clone();
    let mut best = SdpSolution {
        primal_value: f64::NAN,
        certified_bound: f64::NEG_INFINITY,
        gap: f64::INFINITY,
        residual: f64::INFINITY,
        iterations: 0,
        status: SolveStatus::IterationCap,
        x: vec![0.0; problem.n_vars],
    };
    let mut plateau_prev = f64::INFINITY;
    let mut plateau_hits = 0;
    let mut last_x = DVector::zeros(nv);
    let mut primal = f64::NAN;
    let mut iter_done = 0;

    for it in 0..opts.max_iters {
        iter_done = it + 1;
        let shifted: Vec<DMatrix<f64>> =
            (0..n_blocks).map(|b| &z[b] - &c_mat[b] * gamma).collect();
        let (xv, x_aff) = proj_affine(&shifted);
        let y: Vec<DMatrix<f64>> = (0..n_blocks)
            .map(|b| psd_project(&(&x_aff[b] * 2.0 - &z[b])))
            .collect();
        let res = (0..n_blocks)
            .map(|b| {
                let diff = &x_aff[b] - &y[b];
                diff.iter().map(|t| t * t).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt();
        for b in 0..n_blocks {
            z[b] += (&y[b] - &x_aff[b]) * lam;
        }
        primal = c_vec.dot(&xv);
        last_x = xv;

        if !primal.is_finite() || primal.abs() > 1e12 {
            best.status = SolveStatus::Unbounded;
            best.primal_value = primal;
            best.residual = res;
            best.iterations = iter_done;
            return Ok(best);
        }

        let checkpoint = it > 0 && it % 1000 == 0;
        if checkpoint || res < opts.tol {
            let db = dual_bound(&z, &x_aff);
            let gap = (primal - db).abs();
            if db > best.certified_bound {
                best.certified_bound = db;
            }
            best.gap = gap;
            best.residual = res;
            if res < opts.tol && gap < opts.gap_tol {
                best.status = SolveStatus::Converged;
                break;
            }
        }
        if checkpoint {
            // An essentially frozen residual far above tolerance means the
            // affine set and the PSD cone do not meet.
            if res > 100.0 * opts.tol && (res - plateau_prev).abs() < 1e-12 * plateau_prev.max(1.0)
            {
                plateau_hits += 1;
                if plateau_hits >= 3 {
                    best.status = SolveStatus::Infeasible;
                    best.residual = res;
                    best.iterations = iter_done;
                    best.primal_value = primal;
                    return Ok(best);
                }
            } else {
                plateau_hits = 0;
            }
            plateau_prev = res;
        }
    }

    best.primal_value = primal;
    best.iterations = iter_done;
    let mut x_full = vec![0.0; problem.n_vars];
    for (v, &u) in used.iter().enumerate() {
        if u {
            x_full[v] = last_x[remap[v]];
        }
    }
    best.x = x_full;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Smallest nontrivial instance: a single 2x2 block
    // [[x, 1/2], [1/2, y]] >= 0 with x + y = 2, minimizing x. Positivity
    // means x y >= 1/4, so x (2 - x) >= 1/4 and the minimum is
    // x = 1 - sqrt(3)/2, with a strictly feasible point at x = y = 1.
    fn tiny_problem() -> SdpProblem {
        SdpProblem {
            n_vars: 3,
            blocks: vec![BlockMap {
                dim: 2,
                entries: vec![(0, 0, 0, 1.0), (0, 1, 2, 1.0), (1, 1, 1, 1.0)],
            }],
            equalities: vec![
                EqRow {
                    coeffs: vec![(0, 1.0), (1, 1.0)],
                    rhs: 2.0,
                },
                EqRow {
                    coeffs: vec![(2, 1.0)],
                    rhs: 0.5,
                },
            ],
            objective: vec![(0, 1.0)],
            trace_bound: 4.0,
        }
    }

    #[test]
    fn symmetric_two_by_two_minimum() {
        let target = 1.0 - 0.75f64.sqrt();
        let sol = solve_sdp(&tiny_problem(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!(
            (sol.primal_value - target).abs() < 1e-5,
            "{}",
            sol.primal_value
        );
        assert!(sol.certified_bound <= sol.primal_value + 1e-5);
        assert!((sol.certified_bound - target).abs() < 1e-4);
    }

    #[test]
    fn zero_objective_feasible_problem_reports_zero() {
        let mut p = tiny_problem();
        p.objective = vec![];
        let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!(sol.primal_value.abs() < 1e-8);
        assert!(sol.certified_bound.abs() < 1e-6);
    }

    #[test]
    fn conflicting_scalar_bounds_are_flagged_infeasible() {
        // x >= 1 and x <= 0 through two slack variables pinned by
        // equalities; the PSD cone and the affine set never meet.
        let p = SdpProblem {
            n_vars: 3,
            blocks: vec![
                BlockMap {
                    dim: 1,
                    entries: vec![(0, 0, 1, 1.0)],
                },
                BlockMap {
                    dim: 1,
                    entries: vec![(0, 0, 2, 1.0)],
                },
            ],
            equalities: vec![
                EqRow {
                    coeffs: vec![(1, 1.0), (0, -1.0)],
                    rhs: -1.0,
                },
                EqRow {
                    coeffs: vec![(2, 1.0), (0, 1.0)],
                    rhs: 0.0,
                },
            ],
            objective: vec![(0, 1.0)],
            trace_bound: 4.0,
        };
        let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn inconsistent_equalities_are_flagged_immediately() {
        let mut p = tiny_problem();
        p.equalities.push(EqRow {
            coeffs: vec![(0, 1.0), (1, 1.0)],
            rhs: 3.0,
        });
        let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn unconstrained_objective_directions_are_unbounded() {
        let mut p = tiny_problem();
        p.n_vars = 4;
        p.objective = vec![(3, 1.0)];
        let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn oversized_problems_are_rejected() {
        let p = SdpProblem {
            n_vars: 1,
            blocks: vec![BlockMap {
                dim: 201,
                entries: vec![(0, 0, 0, 1.0)],
            }],
            equalities: vec![],
            objective: vec![],
            trace_bound: 1.0,
        };
        assert!(matches!(
            solve_sdp(&p, &SolveOptions::default()),
            Err(SdpError::DimCap { .. })
        ));
    }

    #[test]
    fn identical_inputs_give_identical_outputs() {
        let a = solve_sdp(&tiny_problem(), &SolveOptions::default()).unwrap();
        let b = solve_sdp(&tiny_problem(), &SolveOptions::default()).unwrap();
        assert_eq!(a.primal_value.to_bits(), b.primal_value.to_bits());
        assert_eq!(a.certified_bound.to_bits(), b.certified_bound.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }
}
