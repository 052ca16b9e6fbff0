//! The swap isometry: local circuits that move the certified reference state
//! from the physical devices onto fresh registers.
//!
//! Each party attaches an ancilla in |0⟩ and runs controlled gates built
//! from two binary observables Z and X. Writing P0 = (1 + Z)/2 and
//! P1 = X (1 - Z)/2, the combined isometry acts as
//!
//!   Phi |w⟩ = sum_{k,l} |kl⟩ ⊗ (P_k ⊗ P_l) |w⟩,
//!
//! with the reference registers leading. The reduced state on those
//! registers is the extracted state; for an ideal realization it is the
//! maximally entangled state exactly.

use crate::regularize::{embed_local, regularize};
use crate::report::{ActionFit, ExtractedAction, ExtractionReport};
use crate::{ExtractError, Result};
use dilab_hilbert::{
    eigh, observable_from_measurement, purification, CMat, Complex64, HilbertError, Ket,
    Realization, State,
};

/// The four binary observables controlling the two local swap circuits.
#[derive(Clone, Debug)]
pub struct SwapOperators {
    pub z_a: CMat,
    pub x_a: CMat,
    pub z_b: CMat,
    pub x_b: CMat,
}

impl SwapOperators {
    /// Validate that every building block is a binary observable (Hermitian
    /// and squaring to the identity), which is what the controlled gates
    /// need to be unitary.
    pub fn new(z_a: CMat, x_a: CMat, z_b: CMat, x_b: CMat) -> Result<Self> {
        for op in [&z_a, &x_a, &z_b, &x_b] {
            let residual = op.hermitian_residual().max(op.involution_residual());
            if !op.is_square() || residual > 1e-8 {
                return Err(ExtractError::NotUnitary { residual });
            }
        }
        if z_a.rows() != x_a.rows() || z_b.rows() != x_b.rows() {
            return Err(HilbertError::DimMismatch {
                expected: z_a.rows(),
                got: x_a.rows(),
            }
            .into());
        }
        Ok(Self { z_a, x_a, z_b, x_b })
    }

    /// Local dimensions the two circuits act on.
    pub fn dims(&self) -> (usize, usize) {
        (self.z_a.rows(), self.z_b.rows())
    }
}

/// Swap operators for a CHSH-certified realization: Z and X for Alice are
/// the regularized sum and difference (A0 +/- A1)/sqrt(2), while Bob's
/// settings are used directly.
pub fn chsh_swap_operators(r: &Realization) -> Result<SwapOperators> {
    let [a0, a1, b0, b1] = binary_observables(r)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z_a = regularize(&a0.add(&a1).scale_re(s), None)?.regularized;
    let x_a = regularize(&a0.sub(&a1).scale_re(s), None)?.regularized;
    SwapOperators::new(z_a, x_a, b0, b1)
}

/// Swap operators for the tilted CHSH family at tilt `alpha`: Alice's
/// settings are used directly, Bob's are combined through the measurement
/// angle mu of the ideal realization, with tan(mu) = sin(2 theta) and
/// tan(2 theta) = sqrt(2/alpha^2 - 1/2).
pub fn tilted_swap_operators(r: &Realization, alpha: f64) -> Result<SwapOperators> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(ExtractError::Shape(format!(
            "tilt {alpha} outside [0, 2)"
        )));
    }
    let [a0, a1, b0, b1] = binary_observables(r)?;
    let theta = if alpha == 0.0 {
        std::f64::consts::FRAC_PI_4
    } else {
        0.5 * (2.0 / (alpha * alpha) - 0.5).sqrt().atan()
    };
    let mu = (2.0 * theta).sin().atan();
    let z_b = regularize(&b0.add(&b1).scale_re(0.5 / mu.cos()), None)?.regularized;
    let x_b = regularize(&b0.sub(&b1).scale_re(0.5 / mu.sin()), None)?.regularized;
    SwapOperators::new(a0, a1, z_b, x_b)
}

fn binary_observables(r: &Realization) -> Result<[CMat; 4]> {
    if r.local_dims.len() != 2 {
        return Err(ExtractError::Shape(format!(
            "swap extraction needs two parties, got {}",
            r.local_dims.len()
        )));
    }
    for party in 0..2 {
        if r.measurements[party].len() < 2 {
            return Err(ExtractError::Shape(format!(
                "party {party} needs at least two settings"
            )));
        }
    }
    Ok([
        observable_from_measurement(&r.measurements[0][0])?,
        observable_from_measurement(&r.measurements[0][1])?,
        observable_from_measurement(&r.measurements[1][0])?,
        observable_from_measurement(&r.measurements[1][1])?,
    ])
}

/// Block-diagonal controlled gate sum_k |k⟩⟨k| ⊗ ops[k] with the control
/// register leading.
pub(crate) fn controlled(ops: &[CMat]) -> CMat {
    let d = ops.len();
    let ds = ops[0].rows();
    CMat::from_fn(d * ds, d * ds, |r, c| {
        let (kr, sr) = (r / ds, r % ds);
        let (kc, sc) = (c / ds, c % ds);
        if kr == kc {
            ops[kr][(sr, sc)]
        } else {
            Complex64::default()
        }
    })
}

/// Discrete Fourier gate of dimension d.
pub(crate) fn fourier(d: usize) -> CMat {
    let s = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |r, c| {
        let phi = 2.0 * std::f64::consts::PI * (r * c) as f64 / d as f64;
        Complex64::new(phi.cos() * s, phi.sin() * s)
    })
}

/// One party's swap circuit on ancilla ⊗ system (ancilla leading):
/// controlled-X after a Fourier-conjugated controlled-Z. `zbar_powers`
/// holds Z^0 .. Z^{d-1} and `xbar_family` the controlled X alternatives;
/// the inverse Fourier gate routes each Z eigenspace to its ancilla level.
pub(crate) fn generic_party_circuit(zbar_powers: &[CMat], xbar_family: &[CMat]) -> CMat {
    let d = zbar_powers.len();
    let ds = zbar_powers[0].rows();
    let f = fourier(d).kron(&CMat::identity(ds));
    let cz = controlled(zbar_powers);
    let cx = controlled(xbar_family);
    cx.matmul(&f.dagger()).matmul(&cz).matmul(&f)
}

/// The qubit swap circuit for one party, a unitary on ancilla ⊗ system.
pub fn party_circuit(z: &CMat, x: &CMat) -> CMat {
    let one = CMat::identity(z.rows());
    generic_party_circuit(&[one.clone(), z.clone()], &[one, x.clone()])
}

/// The qubit swap circuit preceded by the extra ancilla-controlled gate
/// that a full swap needs when the ancilla does not start in |0⟩.
pub fn full_party_circuit(z: &CMat, x: &CMat) -> CMat {
    let one = CMat::identity(z.rows());
    let pre = controlled(&[one, x.clone()]);
    party_circuit(z, x).matmul(&pre)
}

/// Sub-block (k, m) of a circuit on ancilla ⊗ system: the operator the
/// circuit applies to the system when the ancilla goes from |m⟩ to |k⟩.
pub(crate) fn circuit_block(u: &CMat, k: usize, m: usize, ds: usize) -> CMat {
    CMat::from_fn(ds, ds, |r, c| u[(k * ds + r, m * ds + c)])
}

/// Everything needed to apply one swap isometry: the per-party system
/// operators routed to each ancilla level, and the (purified) state.
pub(crate) struct Isometry {
    big_a: Vec<CMat>,
    big_b: Vec<CMat>,
    psi: Ket,
    pub d_out: usize,
    pub dims: (usize, usize, usize),
    pub pure_input: bool,
}

impl Isometry {
    pub fn build(
        r: &Realization,
        f_a: Vec<CMat>,
        f_b: Vec<CMat>,
        d_out: usize,
    ) -> Result<Isometry> {
        if r.local_dims.len() != 2 {
            return Err(ExtractError::Shape(format!(
                "swap extraction needs two parties, got {}",
                r.local_dims.len()
            )));
        }
        let (da, db) = (r.local_dims[0], r.local_dims[1]);
        if f_a[0].rows() != da || f_b[0].rows() != db {
            return Err(HilbertError::DimMismatch {
                expected: da,
                got: f_a[0].rows(),
            }
            .into());
        }
        let (psi, dims, pure_input) = match &r.state {
            State::Ket(k) => (k.clone(), (da, db, 1usize), true),
            State::Density(rho) => {
                let (pure, rank) = purification(rho)?;
                (pure, (da, db, rank), false)
            }
        };
        let tail = CMat::identity(db * dims.2);
        let big_a: Vec<CMat> = f_a.iter().map(|f| f.kron(&tail)).collect();
        let head = CMat::identity(da);
        let tail_p = CMat::identity(dims.2);
        let big_b: Vec<CMat> = f_b
            .iter()
            .map(|f| head.kron(&f.kron(&tail_p)))
            .collect();
        Ok(Isometry {
            big_a,
            big_b,
            psi,
            d_out,
            dims,
            pure_input,
        })
    }

    /// Images v_kl of (op applied to the state) under the isometry, indexed
    /// by k * d_out + l. `op` is a local operator for one party; None means
    /// the identity.
    pub fn images(&self, op: Option<(usize, &CMat)>) -> Result<Vec<Ket>> {
        let w = match op {
            None => self.psi.clone(),
            Some((party, local)) => {
                let dims = [self.dims.0, self.dims.1, self.dims.2];
                let emb = embed_local(local, &dims, party)?;
                self.psi.apply(&emb)
            }
        };
        let mut out = Vec::with_capacity(self.d_out * self.d_out);
        for fa in &self.big_a {
            let wa = w.apply(fa);
            for fb in &self.big_b {
                out.push(wa.apply(fb));
            }
        }
        Ok(out)
    }

    /// The full output vector sum_kl |kl⟩ ⊗ v_kl, reference registers
    /// leading.
    pub fn output(&self, op: Option<(usize, &CMat)>) -> Result<Ket> {
        let vs = self.images(op)?;
        Ok(stack_images(&vs))
    }
}

pub(crate) fn stack_images(vs: &[Ket]) -> Ket {
    let mut amps = Vec::with_capacity(vs.len() * vs[0].dim());
    for v in vs {
        amps.extend_from_slice(v.amps());
    }
    Ket::new_unnormalized(amps).expect("finite image amplitudes")
}

/// Maximally entangled state of two d-level registers.
pub(crate) fn max_entangled(d: usize) -> Ket {
    let mut amps = vec![Complex64::default(); d * d];
    let s = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        amps[k * d + k] = Complex64::new(s, 0.0);
    }
    Ket::new_unnormalized(amps).expect("unit amplitudes")
}

/// Core report fields shared by all swap variants.
pub(crate) fn assemble_core(vs: &[Ket], d_out: usize, pure_input: bool) -> ExtractionReport {
    let n = d_out * d_out;
    let extracted_state = CMat::from_fn(n, n, |row, col| vs[col].inner(&vs[row]));
    let junk_norm = extracted_state.trace().re.max(0.0).sqrt();
    let phi = max_entangled(d_out);
    let fidelity = phi.expect(&extracted_state).re.clamp(0.0, 1.0);
    let vector_distance = if pure_input {
        let mut overlap = 0.0f64;
        let w = contract_reference(vs, &phi);
        for a in w.amps() {
            overlap += a.norm_sqr();
        }
        Some((2.0 - 2.0 * overlap.sqrt()).max(0.0).sqrt())
    } else {
        None
    };
    ExtractionReport {
        extracted_state,
        junk_norm,
        fidelity,
        vector_distance,
        per_measurement_actions: Vec::new(),
        conjugation_weight: None,
        branch_weights: None,
    }
}

/// Junk-space vector ⟨reference| applied to the stacked output:
/// sum_kl conj(reference_kl) v_kl.
pub(crate) fn contract_reference(vs: &[Ket], reference: &Ket) -> Ket {
    let dim = vs[0].dim();
    let mut amps = vec![Complex64::default(); dim];
    for (idx, v) in vs.iter().enumerate() {
        let coeff = reference.amps()[idx].conj();
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        for (t, a) in v.amps().iter().enumerate() {
            amps[t] += coeff * a;
        }
    }
    Ket::new_unnormalized(amps).expect("finite contraction")
}

/// The reference-register vector and unit junk vector that best factor the
/// isometry output, from the top eigenvector of the extracted state.
pub(crate) fn reference_split(rho: &CMat, vs: &[Ket]) -> Option<(Ket, Ket)> {
    let eig = eigh(rho).ok()?;
    let n = rho.rows();
    let top = n - 1;
    let amps: Vec<Complex64> = (0..n).map(|r| eig.eigenvectors[(r, top)]).collect();
    let reference = Ket::new_unnormalized(amps).ok()?.normalize().ok()?;
    let junk = contract_reference(vs, &reference);
    if junk.norm() < 1e-12 {
        return None;
    }
    Some((reference, junk.normalize().ok()?))
}

fn pinv_solve(g: &CMat, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let eig = eigh(g)?;
    let n = rhs.len();
    let cut = 1e-12
        * eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()))
            .max(1e-300);
    let mut out = vec![Complex64::default(); n];
    for k in 0..n {
        let l = eig.eigenvalues[k];
        if l.abs() <= cut {
            continue;
        }
        let mut ip = Complex64::default();
        for r in 0..n {
            ip += eig.eigenvectors[(r, k)].conj() * rhs[r];
        }
        let w = ip / l;
        for r in 0..n {
            out[r] += eig.eigenvectors[(r, k)] * w;
        }
    }
    Ok(out)
}

/// Least-squares fit of images u_kl against (R ⊗ 1) reference ⊗ junk (side
/// 0) or (1 ⊗ R) reference ⊗ junk (side 1), over all d_out x d_out matrices
/// R on the fitted party's reference register.
pub(crate) fn fit_reference_operator(
    images: &[Ket],
    reference: &Ket,
    junk: &Ket,
    side: usize,
    d_out: usize,
) -> Result<ActionFit> {
    let d = d_out;
    // Amplitude pattern of (E_mn acting on `side`) applied to the reference.
    let pattern = |m: usize, n: usize, k: usize, l: usize| -> Complex64 {
        if side == 0 {
            if k == m {
                reference.amps()[n * d + l]
            } else {
                Complex64::default()
            }
        } else if l == m {
            reference.amps()[k * d + n]
        } else {
            Complex64::default()
        }
    };
    let nb = d * d;
    let gram = CMat::from_fn(nb, nb, |row, colu| {
        let (m1, n1) = (row / d, row % d);
        let (m2, n2) = (colu / d, colu % d);
        let mut acc = Complex64::default();
        for k in 0..d {
            for l in 0..d {
                acc += pattern(m1, n1, k, l).conj() * pattern(m2, n2, k, l);
            }
        }
        acc
    });
    let mut rhs = vec![Complex64::default(); nb];
    let mut junk_overlaps = vec![Complex64::default(); d * d];
    for (idx, u) in images.iter().enumerate() {
        junk_overlaps[idx] = junk.inner(u);
    }
    for (slot, r) in rhs.iter_mut().enumerate() {
        let (m, n) = (slot / d, slot % d);
        let mut acc = Complex64::default();
        for k in 0..d {
            for l in 0..d {
                acc += pattern(m, n, k, l).conj() * junk_overlaps[k * d + l];
            }
        }
        *r = acc;
    }
    let coeffs = pinv_solve(&gram, &rhs)?;
    let operator = CMat::from_fn(d, d, |m, n| coeffs[m * d + n]);
    // Residual of the explained image against the actual one.
    let mut res_sq = 0.0f64;
    for k in 0..d {
        for l in 0..d {
            let mut target_coeff = Complex64::default();
            for m in 0..d {
                for n in 0..d {
                    target_coeff += coeffs[m * d + n] * pattern(m, n, k, l);
                }
            }
            let u = &images[k * d + l];
            let mut diff_sq = 0.0f64;
            for (t, a) in u.amps().iter().enumerate() {
                diff_sq += (a - target_coeff * junk.amps()[t]).norm_sqr();
            }
            res_sq += diff_sq;
        }
    }
    Ok(ActionFit {
        operator,
        residual: res_sq.max(0.0).sqrt(),
    })
}

pub(crate) fn qubit_isometry(r: &Realization, ops: &SwapOperators) -> Result<Isometry> {
    let (da, db) = ops.dims();
    if da != r.local_dims[0] || db != r.local_dims[1] {
        return Err(HilbertError::DimMismatch {
            expected: r.local_dims[0],
            got: da,
        }
        .into());
    }
    let ua = party_circuit(&ops.z_a, &ops.x_a);
    let ub = party_circuit(&ops.z_b, &ops.x_b);
    let f_a = vec![circuit_block(&ua, 0, 0, da), circuit_block(&ua, 1, 0, da)];
    let f_b = vec![circuit_block(&ub, 0, 0, db), circuit_block(&ub, 1, 0, db)];
    Isometry::build(r, f_a, f_b, 2)
}

fn action_for_setting(
    iso: &Isometry,
    r: &Realization,
    reference: &Ket,
    junk: &Ket,
    party: usize,
    setting: usize,
) -> Result<ExtractedAction> {
    let m = &r.measurements[party][setting];
    let mut outcome_fits = Vec::with_capacity(m.num_outcomes());
    for effect in m.outcomes() {
        let images = iso.images(Some((party, effect)))?;
        outcome_fits.push(fit_reference_operator(
            &images,
            reference,
            junk,
            party,
            iso.d_out,
        )?);
    }
    let observable_fit = if m.num_outcomes() == 2 {
        let obs = observable_from_measurement(m)?;
        let images = iso.images(Some((party, &obs)))?;
        Some(fit_reference_operator(
            &images,
            reference,
            junk,
            party,
            iso.d_out,
        )?)
    } else {
        None
    };
    Ok(ExtractedAction {
        party,
        setting,
        outcome_fits,
        observable_fit,
    })
}

pub(crate) fn fill_actions(
    iso: &Isometry,
    r: &Realization,
    report: &mut ExtractionReport,
) -> Result<()> {
    let vs = iso.images(None)?;
    let Some((reference, junk)) = reference_split(&report.extracted_state, &vs) else {
        return Ok(());
    };
    for party in 0..2 {
        for setting in 0..r.measurements[party].len() {
            report.per_measurement_actions.push(action_for_setting(
                iso, r, &reference, &junk, party, setting,
            )?);
        }
    }
    Ok(())
}

/// Run the swap isometry built from `ops` on a realization and report the
/// extracted state, its overlap with the maximally entangled state, and the
/// best-fit images of every measurement.
pub fn swap_extract(r: &Realization, ops: &SwapOperators) -> Result<ExtractionReport> {
    let iso = qubit_isometry(r, ops)?;
    let vs = iso.images(None)?;
    let mut report = assemble_core(&vs, iso.d_out, iso.pure_input);
    fill_actions(&iso, r, &mut report)?;
    Ok(report)
}

/// Swap extraction through the full swap gates, which work for arbitrary
/// ancilla start states by prepending one ancilla-controlled gate per party.
pub fn swap_extract_with_ancillas(
    r: &Realization,
    ops: &SwapOperators,
    ancilla_a: &Ket,
    ancilla_b: &Ket,
) -> Result<ExtractionReport> {
    if ancilla_a.dim() != 2 || ancilla_b.dim() != 2 {
        return Err(ExtractError::Shape(
            "qubit swap ancillas must be two-dimensional".into(),
        ));
    }
    for anc in [ancilla_a, ancilla_b] {
        if (anc.norm() - 1.0).abs() > 1e-9 {
            return Err(HilbertError::NotNormalized {
                deviation: (anc.norm() - 1.0).abs(),
            }
            .into());
        }
    }
    let (da, db) = ops.dims();
    let ua = full_party_circuit(&ops.z_a, &ops.x_a);
    let ub = full_party_circuit(&ops.z_b, &ops.x_b);
    let with_anc = |u: &CMat, anc: &Ket, ds: usize, k: usize| -> CMat {
        let mut acc = CMat::zeros(ds, ds);
        for (m, c) in anc.amps().iter().enumerate() {
            acc = acc.add(&circuit_block(u, k, m, ds).scale(*c));
        }
        acc
    };
    let f_a = vec![
        with_anc(&ua, ancilla_a, da, 0),
        with_anc(&ua, ancilla_a, da, 1),
    ];
    let f_b = vec![
        with_anc(&ub, ancilla_b, db, 0),
        with_anc(&ub, ancilla_b, db, 1),
    ];
    let iso = Isometry::build(r, f_a, f_b, 2)?;
    let vs = iso.images(None)?;
    let mut report = assemble_core(&vs, iso.d_out, iso.pure_input);
    fill_actions(&iso, r, &mut report)?;
    Ok(report)
}

/// Image of a local operator under the swap isometry, as a vector on
/// reference ⊗ junk with the reference registers leading. `op` = None gives
/// the image of the state itself.
pub fn swap_image(
    r: &Realization,
    ops: &SwapOperators,
    op: Option<(usize, &CMat)>,
) -> Result<Ket> {
    let iso = qubit_isometry(r, ops)?;
    iso.output(op)
}

/// Best-fit reference action of one measurement setting, recomputed on its
/// own. `swap_extract` already records this for every setting.
pub fn extract_measurement_action(
    r: &Realization,
    ops: &SwapOperators,
    party: usize,
    setting: usize,
) -> Result<ExtractedAction> {
    if party >= r.measurements.len() || setting >= r.measurements[party].len() {
        return Err(ExtractError::Shape(format!(
            "no measurement at party {party}, setting {setting}"
        )));
    }
    let iso = qubit_isometry(r, ops)?;
    let vs = iso.images(None)?;
    let core = assemble_core(&vs, iso.d_out, iso.pure_input);
    let Some((reference, junk)) = reference_split(&core.extracted_state, &vs) else {
        return Err(ExtractError::Shape(
            "isometry output does not factor against any reference vector".into(),
        ));
    };
    action_for_setting(&iso, r, &reference, &junk, party, setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilab_bell::chsh_reference;
    use dilab_hilbert::{approx_eq, apply_werner_noise, cr, pauli, Ket, Realization, State};

    fn ideal() -> (Realization, SwapOperators) {
        let r = chsh_reference().realization;
        let ops = chsh_swap_operators(&r).unwrap();
        (r, ops)
    }

    #[test]
    fn party_circuits_are_unitary() {
        let (_, ops) = ideal();
        assert!(party_circuit(&ops.z_a, &ops.x_a).is_unitary(1e-10));
        assert!(party_circuit(&ops.z_b, &ops.x_b).is_unitary(1e-10));
        assert!(full_party_circuit(&ops.z_a, &ops.x_a).is_unitary(1e-10));
    }

    #[test]
    fn ideal_chsh_extraction_is_exact() {
        let (r, ops) = ideal();
        let report = swap_extract(&r, &ops).unwrap();
        report.validate().unwrap();
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert!((report.junk_norm - 1.0).abs() < 1e-9);
        assert!(report.vector_distance.unwrap() < 1e-7);
        assert!(approx_eq(
            &report.extracted_state,
            &Ket::phi_plus().projector(),
            1e-9
        ));
    }

    #[test]
    fn ideal_branch_vectors_cancel_and_match() {
        // On the ideal state the cross images vanish and the two diagonal
        // images coincide, which is what makes the output a product.
        let (r, ops) = ideal();
        let out = swap_image(&r, &ops, None).unwrap();
        let dim = out.dim() / 4;
        let block = |idx: usize| -> Vec<Complex64> {
            out.amps()[idx * dim..(idx + 1) * dim].to_vec()
        };
        let norm = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm(&block(1)) < 1e-10);
        assert!(norm(&block(2)) < 1e-10);
        let d00 = block(0);
        let d11 = block(3);
        let diff: f64 = d00
            .iter()
            .zip(&d11)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10);
    }

    #[test]
    fn werner_noise_degrades_fidelity_linearly() {
        // The whole chain is linear in the input density matrix and sends
        // the maximally mixed state to the maximally mixed state, so the
        // Werner fidelity is v + (1 - v)/4.
        let v = std::f64::consts::FRAC_1_SQRT_2;
        let rho = apply_werner_noise(&Ket::phi_plus(), v).unwrap();
        let ideal_r = chsh_reference().realization;
        let r = Realization::new(
            vec![2, 2],
            State::Density(rho),
            ideal_r.measurements.clone(),
        )
        .unwrap();
        let ops = chsh_swap_operators(&r).unwrap();
        let report = swap_extract(&r, &ops).unwrap();
        let want = v + (1.0 - v) / 4.0;
        assert!((report.fidelity - want).abs() < 1e-9);
        assert!(report.fidelity > 0.5 + 1e-3 && report.fidelity < 1.0 - 1e-3);
        assert!(report.vector_distance.is_none());
        report.validate().unwrap();
    }

    #[test]
    fn product_state_extracts_itself() {
        let mut amps = vec![cr(0.0); 4];
        amps[0] = cr(1.0);
        let psi = Ket::new(amps).unwrap();
        let meas = |o: &CMat| dilab_hilbert::effects_from_observable(o).unwrap();
        let r = Realization::new(
            vec![2, 2],
            State::Ket(psi.clone()),
            vec![
                vec![meas(&pauli::sz()), meas(&pauli::sx())],
                vec![meas(&pauli::sz()), meas(&pauli::sx())],
            ],
        )
        .unwrap();
        let ops = SwapOperators::new(pauli::sz(), pauli::sx(), pauli::sz(), pauli::sx()).unwrap();
        let report = swap_extract(&r, &ops).unwrap();
        assert!(approx_eq(&report.extracted_state, &psi.projector(), 1e-10));
        assert!((report.fidelity - 0.5).abs() < 1e-9);
    }

    #[test]
    fn full_gate_matches_partial_gate_on_zero_ancillas() {
        let (r, ops) = ideal();
        let zero = Ket::basis(2, 0);
        let a = swap_extract(&r, &ops).unwrap();
        let b = swap_extract_with_ancillas(&r, &ops, &zero, &zero).unwrap();
        assert!(approx_eq(&a.extracted_state, &b.extracted_state, 1e-12));
    }

    #[test]
    fn full_gate_extracts_through_arbitrary_ancillas() {
        let (r, ops) = ideal();
        let anc = Ket::new(vec![cr(0.6), cr(0.8)]).unwrap();
        let report = swap_extract_with_ancillas(&r, &ops, &anc, &anc).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert!((report.junk_norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_unitary_building_blocks() {
        let half = pauli::sz().scale_re(0.5);
        let err = SwapOperators::new(half, pauli::sx(), pauli::sz(), pauli::sx());
        assert!(matches!(err, Err(ExtractError::NotUnitary { .. })));
    }
}
