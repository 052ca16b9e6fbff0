//! Cyclic Jacobi eigendecomposition for Hermitian matrices.
//!
//! A single spectral routine backs every predicate in the crate. Jacobi
//! iteration is slower than Householder tridiagonalization but it is simple,
//! numerically robust, and at the crate's dimension cap (64) the cost is
//! negligible. Off-diagonal mass converges quadratically once rotations get
//! small; a fixed sweep cap guards against pathological non-convergence.

use crate::cmat::CMat;
use crate::{HilbertError, Result};
use num_complex::Complex64;

/// Result of a Hermitian eigendecomposition: `H = V diag(eigenvalues) V^dagger`
/// with eigenvalues ascending and eigenvectors as the columns of `V`.
pub struct Eigh {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl Eigh {
    /// Reassemble `V diag(f(lambda)) V^dagger`, the standard functional
    /// calculus on the spectrum.
    pub fn apply_spectrum(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            let lk = f(self.eigenvalues[k]);
            if lk == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)];
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj() * lk;
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 60;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian within a loose gate (1e-8 in operator-norm
/// scale); the iteration then runs on the exactly Hermitian part, so the
/// returned decomposition always satisfies the reconstruction identity to
/// near machine precision.
pub fn eigh(h: &CMat) -> Result<Eigh> {
    if !h.is_square() {
        return Err(HilbertError::DimMismatch {
            expected: h.rows(),
            got: h.cols(),
        });
    }
    if !h.is_finite() {
        return Err(HilbertError::NonFinite);
    }
    let n = h.rows();
    if n == 0 {
        return Ok(Eigh {
            eigenvalues: vec![],
            eigenvectors: CMat::zeros(0, 0),
        });
    }
    // Cheap entrywise Hermiticity gate (the full operator-norm check would
    // recurse into this routine).
    let mut herm_res = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            herm_res = herm_res.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    let scale = h.norm_fro().max(1.0);
    if herm_res > 1e-8 * scale {
        return Err(HilbertError::NotHermitian { residual: herm_res });
    }

    let mut a = h.hermitize();
    let mut v = CMat::identity(n);
    let tol = 1e-14 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Zero the (p,q) element: rotation angle from
                // tan(2 theta) = 2|a_pq| / (a_pp - a_qq), smaller root.
                let tau = (app - aqq) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // Column update A <- A J with the rotation in columns (p, q):
                // J[p][p] = c, J[q][p] = s conj(phase), J[p][q] = -s phase,
                // J[q][q] = c.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cth + akq * sth * phase.conj();
                    a[(k, q)] = akq * cth - akp * sth * phase;
                }
                // Row update A <- J^dagger A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cth + aqk * sth * phase;
                    a[(q, k)] = aqk * cth - apk * sth * phase.conj();
                }
                // Accumulate eigenvectors V <- V J.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cth + vkq * sth * phase.conj();
                    v[(k, q)] = vkq * cth - vkp * sth * phase;
                }
                // Clean up the zeroed pair against round-off drift.
                a[(p, q)] = Complex64::default();
                a[(q, p)] = Complex64::default();
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigh {
        eigenvalues,
        eigenvectors,
    })
}
