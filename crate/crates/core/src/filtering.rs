//! Local filtering, the Bell-diagonal normal form and hidden correlations.
//!
//! The spectrum `ν₀ ≥ ν₁ ≥ ν₂ ≥ ν₃` of `ηRηRᵀ`, `η = diag(1, −1, −1, −1)`,
//! is invariant up to a common factor under invertible local filters. The
//! ratios `ν̃ᵢ = νᵢ/ν₀` fix the normal form `T = −diag(√ν̃₁, √ν̃₂, √ν̃₃)` and
//! every hidden measure is the standard measure of that normal form.

use nalgebra::{Matrix3, Matrix4, Rotation3, UnitQuaternion};

use crate::correlations::{self, check_family, normalize_chsh, normalize_f3};
use crate::linalg::{self, inv_sqrt_psd2, kron, Mat2, Mat4};
use crate::qstate::random::su2_from_quaternion;
use crate::qstate::{
    from_r_picture, reduced_state, to_r_picture, LocalOperatorPair, RPicture, Subsystem,
    TwoQubitDensityMatrix, XParams,
};
use crate::{Error, Result};

/// Below this `ν₀` the normal form does not exist.
pub const NU0_EXISTENCE: f64 = 1e-10;
/// Filters with a smaller success probability are rejected.
pub const MIN_SUCCESS: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

const NU_CLAMP: f64 = -1e-10;
const NU_IMAG_ABS: f64 = 1e-10;
// defective (degenerate) spectra split by O(√eps) under roundoff
const NU_IMAG_REL: f64 = 1e-6;
const PRECONDITION_ROUNDS: usize = 40;
const PRECONDITION_TARGET: f64 = 0.999;
const SINGULAR_MARGINAL: f64 = 1e-200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuSpectrum {
    pub nu0: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl NuSpectrum {
    pub fn to_array(self) -> [f64; 4] {
        [self.nu0, self.nu1, self.nu2, self.nu3]
    }

    /// `νᵢ/ν₀` for `i = 1, 2, 3`, clamped to `[0, 1]`; zeros when `ν₀` vanishes.
    pub fn ratios(self) -> [f64; 3] {
        if !(self.nu0 > 0.0) {
            return [0.0; 3];
        }
        [self.nu1, self.nu2, self.nu3].map(|x| (x / self.nu0).clamp(0.0, 1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HiddenReport {
    pub hb: f64,
    pub hbf3: f64,
    pub hd: f64,
    /// Maximum extractable concurrence, identical to `hd`.
    pub mec: f64,
    pub normal_form_exists: bool,
    /// Spectrum of the state as given.
    pub nu: NuSpectrum,
    /// `ν̃₁, ν̃₂, ν̃₃` of the normal form.
    pub nu_ratios: [f64; 3],
}

impl HiddenReport {
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("HB", self.hb),
            ("HBF3", self.hbf3),
            ("HD", self.hd),
            ("MEC", self.mec),
            ("nu0", self.nu.nu0),
            ("nu1", self.nu.nu1),
            ("nu2", self.nu.nu2),
            ("nu3", self.nu.nu3),
        ]
    }
}

fn eta_r_eta_rt(r: &Matrix4<f64>) -> Matrix4<f64> {
    let eta = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0));
    eta * r * eta * r.transpose()
}

fn spectrum_of(rho: &Mat4) -> Result<NuSpectrum> {
    let state = TwoQubitDensityMatrix::new_unchecked(*rho);
    let m = eta_r_eta_rt(&to_r_picture(&state).full_matrix());
    let ev = m.complex_eigenvalues();
    let tol = NU_IMAG_ABS + NU_IMAG_REL * m.norm();
    let mut nu = [0.0; 4];
    for (dst, z) in nu.iter_mut().zip(ev.iter()) {
        if z.im.abs() > tol {
            return Err(Error::Numerical(format!(
                "eta R eta R^T has a complex eigenvalue {z}"
            )));
        }
        *dst = z.re;
    }
    nu.sort_by(|a, b| b.total_cmp(a));
    let [nu0, nu1, nu2, nu3] = nu.map(|x| if (NU_CLAMP..0.0).contains(&x) { 0.0 } else { x });
    if nu3 < NU_CLAMP {
        return Err(Error::Numerical(format!(
            "eta R eta R^T has a negative eigenvalue {nu3:e}"
        )));
    }
    Ok(NuSpectrum { nu0, nu1, nu2, nu3 })
}

/// Eigenvalues of `ηRηRᵀ`, decreasing.
pub fn nu_spectrum(rho: &TwoQubitDensityMatrix) -> Result<NuSpectrum> {
    spectrum_of(rho.matrix())
}

fn trace_normalize(m: Mat4) -> Option<Mat4> {
    let tr = linalg::trace4(&m).re;
    (tr.is_finite() && tr > 0.0).then(|| linalg::hermitian_part4(&m).unscale(tr))
}

fn marginal(m: &Mat4, side: Subsystem) -> Mat2 {
    Mat2::from_fn(|r, c| match side {
        Subsystem::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
        Subsystem::B => m[(r, c)] + m[(2 + r, 2 + c)],
    })
}

fn filter_side(m: &Mat4, f: &Mat2, side: Subsystem) -> Mat4 {
    let k = match side {
        Subsystem::A => kron(f, &Mat2::identity()),
        Subsystem::B => kron(&Mat2::identity(), f),
    };
    k * m * k.adjoint()
}

/// Spectrum of a locally whitened representative of the SLOCC orbit.
///
/// The ratios `νᵢ/ν₀` are orbit invariants, but computing them on a state
/// near a product state loses every digit. A few whitening rounds bring `ν₀`
/// to order one. Sides with a singular marginal are left alone.
fn conditioned_spectrum(rho: &TwoQubitDensityMatrix) -> Result<NuSpectrum> {
    let mut m = *rho.matrix();
    let mut best = spectrum_of(&m)?;
    for _ in 0..PRECONDITION_ROUNDS {
        if best.nu0 >= PRECONDITION_TARGET {
            break;
        }
        let mut moved = false;
        for side in [Subsystem::A, Subsystem::B] {
            let w = marginal(&m, side).scale(2.0);
            if let Some(f) = inv_sqrt_psd2(&w, SINGULAR_MARGINAL) {
                if let Some(next) = trace_normalize(filter_side(&m, &f, side)) {
                    m = next;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
        let s = spectrum_of(&m)?;
        if s.nu0 > best.nu0 {
            best = s;
        }
    }
    Ok(best)
}

fn measures_from_ratios(nt: [f64; 3]) -> (f64, f64, f64) {
    let hb = (nt[0] + nt[1] - 1.0).clamp(0.0, 1.0);
    let hbf3 = (0.5 * (nt.iter().sum::<f64>() - 1.0)).clamp(0.0, 1.0);
    let hd = (0.5 * (nt.iter().map(|x| x.sqrt()).sum::<f64>() - 1.0)).clamp(0.0, 1.0);
    (hb, hbf3, hd)
}

fn normal_form_ratios(rho: &TwoQubitDensityMatrix) -> Result<[f64; 3]> {
    let s = conditioned_spectrum(rho)?;
    if s.nu0 < NU0_EXISTENCE {
        return Err(Error::NormalFormMissing { nu0: s.nu0 });
    }
    Ok(s.ratios())
}

/// Correlation picture of the Bell-diagonal normal form.
pub fn normal_form_r(rho: &TwoQubitDensityMatrix) -> Result<RPicture> {
    let nt = normal_form_ratios(rho)?;
    Ok(RPicture::bell_diagonal(nt.map(|x| -x.sqrt())))
}

/// Hidden measures; all zero when the normal form does not exist.
pub fn hidden_measures(rho: &TwoQubitDensityMatrix) -> Result<HiddenReport> {
    let nu = nu_spectrum(rho)?;
    let (exists, nu_ratios) = match normal_form_ratios(rho) {
        Ok(nt) => (true, nt),
        Err(Error::NormalFormMissing { .. }) => (false, [0.0; 3]),
        Err(e) => return Err(e),
    };
    let (hb, hbf3, hd) = if exists {
        measures_from_ratios(nu_ratios)
    } else {
        (0.0, 0.0, 0.0)
    };
    Ok(HiddenReport {
        hb,
        hbf3,
        hd,
        mec: hd,
        normal_form_exists: exists,
        nu,
        nu_ratios,
    })
}

/// Hidden-measure closed forms on the symmetric family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HiddenClosedForms {
    pub f_plus: f64,
    pub f_minus: f64,
    /// `max{0, (Ϝ₋² + |z|²)/Ϝ₊² − 1}` as tabulated; exact only while
    /// `|Ϝ₋| ≥ |z|`.
    pub hb_table: f64,
    /// CHSH measure of the normal form on the whole family,
    /// `max{0, (max{Ϝ₋², |z|²} + |z|²)/Ϝ₊² − 1}`.
    pub hb: f64,
    pub hbf3: f64,
    pub hd: f64,
}

impl HiddenClosedForms {
    pub fn hb_regime_holds(&self, z: f64) -> bool {
        self.f_minus.abs() >= z.abs()
    }
}

pub fn closed_forms_hidden(x: &XParams) -> Result<HiddenClosedForms> {
    check_family(x)?;
    let std = correlations::closed_forms_standard(x)?;
    let (fp, fm) = (std.f_plus, std.f_minus);
    let z = x.z.norm();
    if fp < NU0_EXISTENCE {
        return Ok(HiddenClosedForms {
            f_plus: fp,
            f_minus: fm,
            hb_table: 0.0,
            hb: 0.0,
            hbf3: 0.0,
            hd: 0.0,
        });
    }
    let (fp2, fm2, z2) = (fp * fp, fm * fm, z * z);
    let sad = (x.a * x.d).max(0.0).sqrt();
    Ok(HiddenClosedForms {
        f_plus: fp,
        f_minus: fm,
        hb_table: ((fm2 + z2) / fp2 - 1.0).max(0.0),
        hb: ((fm2.max(z2) + z2) / fp2 - 1.0).max(0.0),
        hbf3: (0.5 * ((fm2 + 2.0 * z2) / fp2 - 1.0)).max(0.0),
        hd: ((z - sad) / fp).max(0.0),
    })
}

/// `(f_A ⊗ f_B) ρ (f_A ⊗ f_B)† / p_succ` and `p_succ`.
pub fn apply_filter(
    rho: &TwoQubitDensityMatrix,
    fp: &LocalOperatorPair,
) -> Result<(TwoQubitDensityMatrix, f64)> {
    let k = fp.kron();
    let m = k * rho.matrix() * k.adjoint();
    let p = linalg::trace4(&m).re;
    if !(p >= MIN_SUCCESS) {
        return Err(Error::FilterAnnihilates { p_succ: p });
    }
    let out = TwoQubitDensityMatrix::new(linalg::hermitian_part4(&m).unscale(p))
        .map_err(|e| e.context("filtered state"))?;
    Ok((out, p.min(1.0)))
}

/// One step of the marginal-whitening iteration.
#[derive(Clone, Debug)]
pub struct Iterate {
    pub filters: LocalOperatorPair,
    pub state: TwoQubitDensityMatrix,
    pub p_succ: f64,
    /// Largest entry of `|ρ_A − 𝟙/2|` and `|ρ_B − 𝟙/2|`.
    pub deviation: f64,
}

/// Alternating marginal whitening started from the identity filters. Each
/// item is recomputed from the original state with the accumulated filters.
/// The iterator ends when a marginal becomes singular or the success
/// probability underflows.
pub struct Whitening<'a> {
    rho: &'a TwoQubitDensityMatrix,
    f_a: Mat2,
    f_b: Mat2,
    done: bool,
}

impl<'a> Whitening<'a> {
    pub fn new(rho: &'a TwoQubitDensityMatrix) -> Self {
        Self {
            rho,
            f_a: Mat2::identity(),
            f_b: Mat2::identity(),
            done: false,
        }
    }

    fn evaluate(&self) -> Option<Iterate> {
        let filters = LocalOperatorPair::rescaled(self.f_a, self.f_b).ok()?;
        let (state, p_succ) = apply_filter(self.rho, &filters).ok()?;
        let half = Mat2::identity().scale(0.5);
        let dev = |s| {
            (reduced_state(&state, s) - half)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        };
        let deviation = dev(Subsystem::A).max(dev(Subsystem::B));
        Some(Iterate {
            filters,
            state,
            p_succ,
            deviation,
        })
    }

    fn whiten(&mut self, side: Subsystem) -> Option<()> {
        let filters = LocalOperatorPair::rescaled(self.f_a, self.f_b).ok()?;
        let (state, _) = apply_filter(self.rho, &filters).ok()?;
        let g = inv_sqrt_psd2(&reduced_state(&state, side).scale(2.0), 0.0)?;
        let f = match side {
            Subsystem::A => &mut self.f_a,
            Subsystem::B => &mut self.f_b,
        };
        let next = g * *f;
        let n = linalg::spectral_norm2(&next);
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        *f = next.unscale(n);
        Some(())
    }
}

impl Iterator for Whitening<'_> {
    type Item = Iterate;

    fn next(&mut self) -> Option<Iterate> {
        if self.done {
            return None;
        }
        let out = self.evaluate();
        if out.is_none()
            || self.whiten(Subsystem::A).is_none()
            || self.whiten(Subsystem::B).is_none()
        {
            self.done = true;
        }
        out
    }
}

/// Result of [`compute_normal_form_filters`].
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub filters: LocalOperatorPair,
    pub rho_normal: TwoQubitDensityMatrix,
    pub p_succ: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Local unitaries taking the correlation matrix to diagonal form with
/// non-positive entries. When `det T > 0` the smallest entry stays positive.
fn diagonalizing_unitaries(t: &Matrix3<f64>) -> (Mat2, Mat2) {
    let svd = t.svd(true, true);
    let mut u = svd.u.expect("u requested");
    let mut v_t = svd.v_t.expect("v_t requested");
    if u.determinant() < 0.0 {
        u.column_mut(2).neg_mut();
    }
    if v_t.determinant() < 0.0 {
        v_t.row_mut(2).neg_mut();
    }
    // now T = U diag(s1, s2, ±s3) Vᵀ with proper rotations; a half turn
    // about z flips the first two signs
    let flip = Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, -1.0, 1.0));
    let o_a = flip * u.transpose();
    let o_b = v_t;
    let lift = |o: Matrix3<f64>| {
        let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(o));
        su2_from_quaternion(q.w, q.i, q.j, q.k)
    };
    (lift(o_a), lift(o_b))
}

/// Local filters taking `rho` to its Bell-diagonal normal form.
pub fn compute_normal_form_filters(
    rho: &TwoQubitDensityMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<NormalForm> {
    if !(tol > 0.0) {
        return Err(Error::validation(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::validation("max_iter must be at least 1"));
    }
    let mut last = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in Whitening::new(rho).take(max_iter) {
        iterations += 1;
        let done = it.deviation <= tol;
        last = Some(it);
        if done {
            converged = true;
            break;
        }
    }
    let it = last.ok_or(Error::FilterAnnihilates { p_succ: 0.0 })?;
    let (u_a, u_b) = diagonalizing_unitaries(&to_r_picture(&it.state).t);
    let filters = LocalOperatorPair::rescaled(u_a * it.filters.f_a, u_b * it.filters.f_b)?;
    let (rho_normal, p_succ) = apply_filter(rho, &filters)?;
    Ok(NormalForm {
        filters,
        rho_normal,
        p_succ,
        converged,
        iterations,
    })
}

/// Standard measures of the reconstructed normal form, a cross-check for
/// [`hidden_measures`].
pub fn normal_form_state(rho: &TwoQubitDensityMatrix) -> Result<TwoQubitDensityMatrix> {
    from_r_picture(&normal_form_r(rho)?)
}

/// `(HB, HBF₃)` from the standard measures of a state already in normal form.
pub fn standard_of_normal(rho_normal: &TwoQubitDensityMatrix) -> (f64, f64) {
    let s = correlations::t_singular_values(&to_r_picture(rho_normal));
    (
        normalize_chsh(correlations::chsh_quantity(s)),
        normalize_f3(correlations::f3_quantity(s)),
    )
}
