//! Simultaneous block decomposition of two binary observables.
//!
//! Any two Hermitian involutions decompose into common 1- and 2-dimensional
//! invariant blocks. In each 2-dimensional block the pair can be rotated to
//! the symmetric form (cos(a) sx + sin(a) sz, cos(a) sx - sin(a) sz) for a
//! single angle a in (0, pi/2); 1-dimensional blocks carry a pair of signs
//! and sit at a = 0 (equal signs) or a = pi/2 (opposite signs).

use crate::{ExtractError, Result};
use dilab_hilbert::{cr, eigh, pauli, CMat, Complex64, HilbertError};

/// One invariant block of a pair of binary observables, stored in the basis
/// given by the matching columns of `JordanBlocks::basis_change`.
#[derive(Clone, Debug)]
pub struct JordanBlock {
    /// Angle of the symmetric form; 0 or pi/2 for 1-dimensional blocks.
    pub angle: f64,
    pub a0: CMat,
    pub a1: CMat,
}

impl JordanBlock {
    pub fn dim(&self) -> usize {
        self.a0.rows()
    }
}

/// Joint block decomposition: `basis_change` is unitary with columns grouped
/// per block, so conjugating either observable by it produces the direct sum
/// of the stored blocks.
#[derive(Clone, Debug)]
pub struct JordanBlocks {
    pub basis_change: CMat,
    pub blocks: Vec<JordanBlock>,
}

impl JordanBlocks {
    pub fn angles(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.angle).collect()
    }

    /// Rebuild observable 0 or 1 from the stored blocks and basis.
    pub fn reconstruct(&self, which: usize) -> CMat {
        let parts: Vec<&CMat> = self
            .blocks
            .iter()
            .map(|b| if which == 0 { &b.a0 } else { &b.a1 })
            .collect();
        let d = block_diag(&parts);
        self.basis_change
            .matmul(&d)
            .matmul(&self.basis_change.dagger())
    }
}

pub(crate) fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                out[(off + r, off + c)] = b[(r, c)];
            }
        }
        off += b.rows();
    }
    out
}

fn columns(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(m.rows(), idx.len(), |r, c| m[(r, idx[c])])
}

fn column(m: &CMat, c: usize) -> Vec<Complex64> {
    (0..m.rows()).map(|r| m[(r, c)]).collect()
}

fn mul_col(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    m.mul_vec(v)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Symmetric-form pair at angle `a`.
fn symmetric_pair(a: f64) -> (CMat, CMat) {
    let sx = pauli::sx();
    let sz = pauli::sz();
    (
        sx.scale_re(a.cos()).add(&sz.scale_re(a.sin())),
        sx.scale_re(a.cos()).sub(&sz.scale_re(a.sin())),
    )
}

/// Threshold below which a coupling singular value counts as zero, leaving
/// the directions unpaired.
const PAIR_CUT: f64 = 1e-8;
/// Width for grouping nearly equal singular values before the degenerate
/// rediagonalization.
const GROUP_TOL: f64 = 1e-7;

/// Decompose two binary observables into joint blocks. Both inputs must be
/// Hermitian involutions of the same dimension.
pub fn jordan_block_decompose(a0: &CMat, a1: &CMat) -> Result<JordanBlocks> {
    a0.expect_observable()?;
    a1.expect_observable()?;
    if a0.rows() != a1.rows() {
        return Err(HilbertError::DimMismatch {
            expected: a0.rows(),
            got: a1.rows(),
        }
        .into());
    }
    let n = a0.rows();
    let e0 = eigh(a0)?;
    let plus: Vec<usize> = (0..n).filter(|&i| e0.eigenvalues[i] > 0.0).collect();
    let minus: Vec<usize> = (0..n).filter(|&i| e0.eigenvalues[i] <= 0.0).collect();
    let vp = columns(&e0.eigenvectors, &plus);
    let vm = columns(&e0.eigenvectors, &minus);
    let (np, nm) = (plus.len(), minus.len());

    // Coupling of A1 across the two A0 eigenspaces, and its restrictions
    // inside them.
    let coupling = vp.dagger().matmul(a1).matmul(&vm);
    let dp = vp.dagger().matmul(a1).matmul(&vp);
    let dm = vm.dagger().matmul(a1).matmul(&vm);

    // Singular pairs of the coupling from the spectral decomposition of
    // C^dagger C, largest first.
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::new();
    if np > 0 && nm > 0 {
        let gram = coupling.dagger().matmul(&coupling);
        let eg = eigh(&gram)?;
        for i in (0..nm).rev() {
            let s2 = eg.eigenvalues[i].max(0.0);
            let s = s2.sqrt();
            if s > PAIR_CUT {
                pairs.push((s, column(&eg.eigenvectors, i)));
            }
        }
    }

    let mut blocks = Vec::new();
    let mut basis_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut used_u: Vec<Vec<Complex64>> = Vec::new();
    let mut used_v: Vec<Vec<Complex64>> = Vec::new();

    // Walk the singular pairs in groups of nearly equal value; inside each
    // group A1's restriction to the plus side is rediagonalized, which fixes
    // the pairing direction whenever singular values are degenerate.
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && (pairs[j].0 - pairs[i].0).abs() <= GROUP_TOL {
            j += 1;
        }
        let group: Vec<(Vec<Complex64>, Vec<Complex64>)> = pairs[i..j]
            .iter()
            .map(|(s, v)| {
                let u_raw = mul_col(&coupling, v);
                let u: Vec<Complex64> = u_raw.iter().map(|x| x / *s).collect();
                (u, v.clone())
            })
            .collect();
        let g = group.len();
        let restricted = CMat::from_fn(g, g, |r, c| {
            dot(&group[r].0, &mul_col(&dp, &group[c].0))
        });
        let er = eigh(&restricted)?;
        for k in 0..g {
            let mut u = vec![Complex64::default(); np];
            let mut v = vec![Complex64::default(); nm];
            for m in 0..g {
                let w = er.eigenvectors[(m, k)];
                for t in 0..np {
                    u[t] += group[m].0[t] * w;
                }
                for t in 0..nm {
                    v[t] += group[m].1[t] * w;
                }
            }
            let p = mul_col(&vp, &u);
            let mut q = mul_col(&vm, &v);
            // Make the off-diagonal coupling of the stored block real and
            // positive by adjusting the phase of the minus-side direction.
            let s_actual = dot(&p, &mul_col(a1, &q));
            let s_mag = s_actual.norm();
            if s_mag > 0.0 {
                let phase = s_actual.conj() / s_mag;
                for t in q.iter_mut() {
                    *t = *t * phase;
                }
            }
            let d_actual = dot(&p, &mul_col(a1, &p)).re;
            let angle = 0.5 * s_mag.atan2(d_actual);
            // Rotate (p, q) so the stored block takes the symmetric form:
            // conjugation by this plane rotation shifts the Bloch angle of
            // every operator in the block by (pi/2 - angle).
            let half = 0.5 * (angle - std::f64::consts::FRAC_PI_2);
            let (wc, ws) = (half.cos(), half.sin());
            let mut c1 = vec![Complex64::default(); n];
            let mut c2 = vec![Complex64::default(); n];
            for t in 0..n {
                c1[t] = p[t] * cr(wc) + q[t] * cr(ws);
                c2[t] = p[t] * cr(-ws) + q[t] * cr(wc);
            }
            let (s0, s1) = symmetric_pair(angle);
            blocks.push(JordanBlock {
                angle,
                a0: s0,
                a1: s1,
            });
            basis_cols.push(c1);
            basis_cols.push(c2);
            used_u.push(u);
            used_v.push(v);
        }
        i = j;
    }

    // Directions not coupled across the eigenspaces give 1-dimensional
    // blocks; A1 restricted there is again an involution, so its
    // eigenvalues are signs.
    let lone = |basis: &CMat,
                dim: usize,
                used: &[Vec<Complex64>],
                restr: &CMat,
                a0_sign: f64|
     -> Result<Vec<(JordanBlock, Vec<Complex64>)>> {
        let mut out = Vec::new();
        if dim == 0 {
            return Ok(out);
        }
        let r = used.len();
        if r == dim {
            return Ok(out);
        }
        // Orthonormal complement of the paired directions.
        let mut proj = CMat::identity(dim);
        for u in used {
            for a in 0..dim {
                for b in 0..dim {
                    proj[(a, b)] -= u[a] * u[b].conj();
                }
            }
        }
        let ep = eigh(&proj)?;
        let keep: Vec<usize> = (0..dim).filter(|&k| ep.eigenvalues[k] > 0.5).collect();
        let w = columns(&ep.eigenvectors, &keep);
        let restricted = w.dagger().matmul(restr).matmul(&w);
        let er = eigh(&restricted)?;
        for k in 0..keep.len() {
            let sign = if er.eigenvalues[k] > 0.0 { 1.0 } else { -1.0 };
            let dir_small = mul_col(&w, &column(&er.eigenvectors, k));
            let dir = mul_col(basis, &dir_small);
            let angle = if (sign - a0_sign).abs() < 1e-9 {
                0.0
            } else {
                std::f64::consts::FRAC_PI_2
            };
            out.push((
                JordanBlock {
                    angle,
                    a0: CMat::diag(&[cr(a0_sign)]),
                    a1: CMat::diag(&[cr(sign)]),
                },
                dir,
            ));
        }
        Ok(out)
    };

    for (block, dir) in lone(&vp, np, &used_u, &dp, 1.0)? {
        blocks.push(block);
        basis_cols.push(dir);
    }
    for (block, dir) in lone(&vm, nm, &used_v, &dm, -1.0)? {
        blocks.push(block);
        basis_cols.push(dir);
    }

    let basis_change = CMat::from_fn(n, n, |r, c| basis_cols[c][r]);
    let unit_res = basis_change
        .dagger()
        .matmul(&basis_change)
        .sub(&CMat::identity(n))
        .op_norm();
    if unit_res > 1e-8 {
        return Err(ExtractError::NotUnitary { residual: unit_res });
    }
    Ok(JordanBlocks {
        basis_change,
        blocks,
    })
}
