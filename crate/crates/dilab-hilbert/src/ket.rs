//! State vectors.

use crate::cmat::CMat;
use crate::{HilbertError, Result, TOL_STATE};
use num_complex::Complex64;

/// A pure state vector. Construction through [`Ket::new`] enforces unit norm;
/// the unnormalized constructor exists for extraction internals that build
/// subnormalized branch vectors and is flagged as such.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
    normalized: bool,
}

impl Ket {
    /// A unit-norm state vector. Errors when the Euclidean norm deviates from
    /// one by more than the state tolerance or when the amplitudes are not
    /// finite.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(HilbertError::Invalid("empty state vector".into()));
        }
        if !amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL_STATE {
            return Err(HilbertError::NotNormalized {
                deviation: (norm - 1.0).abs(),
            });
        }
        Ok(Self {
            amps,
            normalized: true,
        })
    }

    /// A possibly subnormalized vector, for intermediate branch states inside
    /// extraction routines. Not a valid physical state on its own.
    pub fn new_unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(HilbertError::Invalid("empty state vector".into()));
        }
        if !amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        Ok(Self {
            amps,
            normalized: false,
        })
    }

    /// The computational basis state |i⟩ in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dim {dim}");
        let mut amps = vec![Complex64::default(); dim];
        amps[i] = Complex64::new(1.0, 0.0);
        Self {
            amps,
            normalized: true,
        }
    }

    /// The maximally entangled two-qubit state (|00⟩ + |11⟩)/√2.
    pub fn phi_plus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: vec![
                Complex64::new(r, 0.0),
                Complex64::default(),
                Complex64::default(),
                Complex64::new(r, 0.0),
            ],
            normalized: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Whether the vector passed unit-norm validation at construction.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dim mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rescale to unit norm. Errors on the zero vector.
    pub fn normalize(&self) -> Result<Ket> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(HilbertError::NotNormalized { deviation: 1.0 });
        }
        Ok(Ket {
            amps: self.amps.iter().map(|a| a / n).collect(),
            normalized: true,
        })
    }

    pub fn scale(&self, s: Complex64) -> Ket {
        Ket {
            amps: self.amps.iter().map(|a| a * s).collect(),
            normalized: false,
        }
    }

    pub fn add(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim(), "ket addition dim mismatch");
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
            normalized: false,
        }
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim(), "ket subtraction dim mismatch");
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
            normalized: false,
        }
    }

    /// Kronecker product |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket {
            amps,
            normalized: self.normalized && other.normalized,
        }
    }

    /// The rank-one operator |self⟩⟨self|.
    pub fn projector(&self) -> CMat {
        CMat::from_fn(self.dim(), self.dim(), |r, c| {
            self.amps[r] * self.amps[c].conj()
        })
    }

    /// The operator |self⟩⟨other|.
    pub fn outer(&self, other: &Ket) -> CMat {
        CMat::from_fn(self.dim(), other.dim(), |r, c| {
            self.amps[r] * other.amps[c].conj()
        })
    }

    /// Apply a matrix: `m |self⟩`. The result is generally unnormalized.
    pub fn apply(&self, m: &CMat) -> Ket {
        assert_eq!(m.cols(), self.dim(), "operator application dim mismatch");
        Ket {
            amps: m.mul_vec(&self.amps),
            normalized: false,
        }
    }

    /// Expectation value ⟨self|m|self⟩.
    pub fn expect(&self, m: &CMat) -> Complex64 {
        self.inner(&self.apply(m))
    }
}

/// Schmidt decomposition of a bipartite ket with local dimensions
/// `dims = [d_a, d_b]`: coefficients in descending order together with the
/// matching orthonormal local bases (as columns).
pub fn schmidt_decompose(psi: &Ket, dims: [usize; 2]) -> Result<(Vec<f64>, CMat, CMat)> {
    let (da, db) = (dims[0], dims[1]);
    if da * db != psi.dim() || da == 0 || db == 0 {
        return Err(HilbertError::DimMismatch {
            expected: da * db,
            got: psi.dim(),
        });
    }
    if !psi.is_normalized() {
        return Err(HilbertError::NotNormalized {
            deviation: (psi.norm() - 1.0).abs(),
        });
    }
    // Coefficient matrix C with psi = sum_ij C[i][j] |i⟩|j⟩. The Schmidt data
    // is the SVD of C, obtained from the spectral decompositions of C C† and
    // C† C with phases aligned through C itself.
    let cm = CMat::from_fn(da, db, |i, j| psi.amps[i * db + j]);
    let gram_a = cm.matmul(&cm.dagger());
    let ea = crate::eig::eigh(&gram_a)?;
    // Descending by eigenvalue.
    let mut order: Vec<usize> = (0..da).collect();
    order.sort_by(|&i, &j| {
        ea.eigenvalues[j]
            .partial_cmp(&ea.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    let rank = da.min(db);
    let mut coeffs = Vec::with_capacity(rank);
    let mut basis_a = CMat::zeros(da, rank);
    let mut basis_b = CMat::zeros(db, rank);
    for (k, &src) in order.iter().take(rank).enumerate() {
        let lam = ea.eigenvalues[src].max(0.0);
        let s = lam.sqrt();
        coeffs.push(s);
        let ua: Vec<Complex64> = (0..da).map(|r| ea.eigenvectors[(r, src)]).collect();
        for r in 0..da {
            basis_a[(r, k)] = ua[r];
        }
        if s > 1e-12 {
            // |v_k⟩ = C† |u_k⟩ / s.
            for r in 0..db {
                let mut acc = Complex64::default();
                for i in 0..da {
                    acc += cm[(i, r)].conj() * ua[i];
                }
                basis_b[(r, k)] = acc.conj() / s;
            }
        } else {
            // Zero Schmidt weight: complete with any unit vector orthogonal to
            // the columns already placed.
            let mut v = vec![Complex64::default(); db];
            'fill: for cand in 0..db {
                let mut trial = vec![Complex64::default(); db];
                trial[cand] = Complex64::new(1.0, 0.0);
                for prev in 0..k {
                    let ip: Complex64 = (0..db)
                        .map(|r| basis_b[(r, prev)].conj() * trial[r])
                        .sum();
                    for r in 0..db {
                        let sub = basis_b[(r, prev)] * ip;
                        trial[r] -= sub;
                    }
                }
                let n: f64 = trial.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if n > 1e-6 {
                    for x in &mut trial {
                        *x /= n;
                    }
                    v = trial;
                    break 'fill;
                }
            }
            for r in 0..db {
                basis_b[(r, k)] = v[r];
            }
        }
    }
    let total: f64 = coeffs.iter().map(|s| s * s).sum();
    if (total - 1.0).abs() > crate::TOL_STATE.max(1e-10) {
        return Err(HilbertError::NotNormalized {
            deviation: (total - 1.0).abs(),
        });
    }
    Ok((coeffs, basis_a, basis_b))
}

/// Fidelity F = ⟨target|rho|target⟩ of a density matrix to a pure target,
/// together with the trace-distance upper bound √(1−F).
pub fn fidelity_and_distance(target: &Ket, rho: &CMat) -> Result<(f64, f64)> {
    if rho.rows() != target.dim() || rho.cols() != target.dim() {
        return Err(HilbertError::DimMismatch {
            expected: target.dim(),
            got: rho.rows(),
        });
    }
    if !rho.is_psd(crate::TOL_SPECTRAL * 100.0) {
        return Err(HilbertError::NotPsd {
            index: 0,
            min_eig: rho.min_eigenvalue()?,
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(HilbertError::Invalid(format!(
            "density matrix trace {} is not 1",
            tr.re
        )));
    }
    let f = target.expect(rho).re.clamp(0.0, 1.0);
    Ok((f, (1.0 - f).sqrt()))
}
