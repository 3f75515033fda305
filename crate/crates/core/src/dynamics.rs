//! Two qubits coupled to a common reservoir.
//!
//! The master equation is
//!
//! ```text
//! dρ/dt = i[ρ, H] − Σ_ij (Γ_ij / 2) ({ρ, σ₊⁽ⁱ⁾σ₋⁽ʲ⁾} − 2 σ₋⁽ⁱ⁾ ρ σ₊⁽ʲ⁾)
//! H     = −(ω₁/2) σ_z⊗𝟙 − (ω₂/2) 𝟙⊗σ_z + (V/2)(σ_x⊗σ_x + σ_y⊗σ_y)
//! ```
//!
//! with `Γ_ii = Γ` and `Γ_12 = Γ_21 = γ = kΓ`. Three propagators are
//! provided: a fixed-step RK4 integrator valid for any parameters, the
//! closed-form X-state solution (equal qubit frequencies, `|k| < 1`), and
//! the reduced symmetric family started from a Werner state.

use nalgebra::SMatrix;

use crate::linalg::{kron, pauli, Mat2, Mat4, C64, I, ONE, ZERO};
use crate::qstate::{werner_params, TwoQubitDensityMatrix, XParams};
use crate::{Error, Result};

/// Closed-form propagators refuse `|k|` this close to one.
pub const K_SINGULAR_MARGIN: f64 = 1e-6;
pub const DEFAULT_STEP: f64 = 1e-3;
/// Samples with a minimum eigenvalue below this abort the integration.
pub const POSITIVITY_FAILURE: f64 = -1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Dipole-dipole coupling.
    pub v: f64,
    /// Single-qubit emission rate; sets the time unit.
    pub gamma: f64,
    /// Collective damping ratio, `γ = k Γ`.
    pub k: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega1: 0.0,
            omega2: 0.0,
            v: 0.0,
            gamma: 1.0,
            k: 0.5,
        }
    }
}

impl SystemParams {
    pub fn new(omega1: f64, omega2: f64, v: f64, k: f64) -> Result<Self> {
        let sp = Self {
            omega1,
            omega2,
            v,
            gamma: 1.0,
            k,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("V", self.v),
            ("Gamma", self.gamma),
            ("k", self.k),
        ] {
            if !x.is_finite() {
                return Err(Error::validation(format!("{name} must be finite")));
            }
        }
        if self.gamma <= 0.0 {
            return Err(Error::validation("Gamma must be positive"));
        }
        if self.k.abs() > 1.0 {
            return Err(Error::validation(format!(
                "|k| = {} exceeds 1: the dissipator would not be positive",
                self.k.abs()
            )));
        }
        Ok(())
    }

    /// Collective damping rate `γ = kΓ`.
    pub fn collective(&self) -> f64 {
        self.k * self.gamma
    }

    pub fn hamiltonian(&self) -> Mat4 {
        let id = pauli(0);
        let (sx, sy, sz) = (pauli(1), pauli(2), pauli(3));
        kron(&sz, &id).scale(-0.5 * self.omega1)
            + kron(&id, &sz).scale(-0.5 * self.omega2)
            + (kron(&sx, &sx) + kron(&sy, &sy)).scale(0.5 * self.v)
    }
}

/// Sampled solution of the master equation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<TwoQubitDensityMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &TwoQubitDensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// `|0⟩⟨1|` on a single qubit.
fn lowering() -> Mat2 {
    Mat2::new(ZERO, ONE, ZERO, ZERO)
}

/// Lowering operators of qubit 1 and qubit 2 on the pair.
fn lowering_ops() -> [Mat4; 2] {
    let id = pauli(0);
    [kron(&lowering(), &id), kron(&id, &lowering())]
}

/// Right-hand side of the master equation for an arbitrary 4×4 matrix
/// (linear in `m`, so it also serves to build the Liouvillian).
pub fn lindblad_rhs_matrix(m: &Mat4, sp: &SystemParams) -> Mat4 {
    let h = sp.hamiltonian();
    let mut out = (m * h - h * m) * I;
    let lower = lowering_ops();
    let rates = [[sp.gamma, sp.collective()], [sp.collective(), sp.gamma]];
    for i in 0..2 {
        for j in 0..2 {
            let rate = rates[i][j];
            if rate == 0.0 {
                continue;
            }
            let raise_i = lower[i].adjoint();
            let raise_j = lower[j].adjoint();
            let jump = raise_i * lower[j];
            let anti = m * jump + jump * m;
            out -= (anti - (lower[i] * m * raise_j).scale(2.0)).scale(0.5 * rate);
        }
    }
    out
}

pub fn lindblad_rhs(rho: &TwoQubitDensityMatrix, sp: &SystemParams) -> Mat4 {
    lindblad_rhs_matrix(rho.matrix(), sp)
}

type Super = SMatrix<C64, 16, 16>;
type SVec = SMatrix<C64, 16, 1>;

fn liouvillian(sp: &SystemParams) -> Super {
    let mut l = Super::zeros();
    for col in 0..16 {
        let mut e = Mat4::zeros();
        e[col] = ONE;
        let image = lindblad_rhs_matrix(&e, sp);
        l.set_column(col, &SVec::from_column_slice(image.as_slice()));
    }
    l
}

/// One classical RK4 step for the linear, autonomous system `v' = L v`,
/// which collapses to the fixed polynomial
/// `𝟙 + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`.
fn rk4_step_matrix(l: &Super, h: f64) -> Super {
    let hl = l.scale(h);
    let mut term = Super::identity();
    let mut step = Super::identity();
    for n in 1..=4 {
        term = term * hl / C64::from(n as f64);
        step += &term;
    }
    step
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::validation("time grid is empty"));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::validation(format!(
            "time grid must start at 0, got {}",
            t_grid[0]
        )));
    }
    for pair in t_grid.windows(2) {
        if !(pair[1] > pair[0]) || !pair[1].is_finite() {
            return Err(Error::validation(
                "time grid must be strictly increasing and finite",
            ));
        }
    }
    Ok(())
}

/// Integrates the master equation with fixed-step RK4, sampling on `t_grid`.
///
/// Each interval between samples is split into equal steps no longer than
/// `step`. Samples are Hermitized before storage and checked for positivity.
pub fn evolve_numeric(
    rho0: &TwoQubitDensityMatrix,
    sp: &SystemParams,
    t_grid: &[f64],
    step: f64,
) -> Result<Trajectory> {
    sp.validate()?;
    validate_grid(t_grid)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::validation(format!(
            "step must be positive, got {step}"
        )));
    }
    let l = liouvillian(sp);
    let mut cache: Option<(f64, Super)> = None;

    let mut v = SVec::from_column_slice(rho0.matrix().as_slice());
    let mut times = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    times.push(0.0);
    states.push(rho0.clone());

    for pair in t_grid.windows(2) {
        let span = pair[1] - pair[0];
        let n = (span / step - 1e-9).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let prop = match &cache {
            Some((h_cached, p)) if *h_cached == h => p,
            _ => {
                cache = Some((h, rk4_step_matrix(&l, h)));
                &cache.as_ref().unwrap().1
            }
        };
        for _ in 0..n {
            v = prop * v;
        }
        let m = Mat4::from_column_slice(v.as_slice());
        let m = (m + m.adjoint()).scale(0.5);
        v = SVec::from_column_slice(m.as_slice());
        let state = TwoQubitDensityMatrix::new(m).map_err(|e| {
            Error::Numerical(format!("integration failed at tau = {}: {e}", pair[1]))
        })?;
        let min_ev = state.min_eigenvalue();
        if min_ev < POSITIVITY_FAILURE {
            return Err(Error::Numerical(format!(
                "positivity lost at tau = {}: minimum eigenvalue {min_ev:e}",
                pair[1]
            )));
        }
        times.push(pair[1]);
        states.push(state);
    }
    Ok(Trajectory { times, states })
}

fn check_analytic_k(k: f64) -> Result<()> {
    if k.abs() >= 1.0 - K_SINGULAR_MARGIN {
        return Err(Error::validation(format!(
            "closed-form solution is singular at |k| = 1 (got k = {k}); use the numeric integrator"
        )));
    }
    Ok(())
}

/// Closed-form evolution of an X state.
///
/// Requires equal qubit frequencies (the solution carries no detuning term)
/// and `|k| < 1`.
pub fn evolve_analytic_x(x0: &XParams, sp: &SystemParams, tau: f64) -> Result<XParams> {
    sp.validate()?;
    x0.validate()?;
    check_analytic_k(sp.k)?;
    if (sp.omega1 - sp.omega2).abs() > 1e-12 {
        return Err(Error::validation(
            "closed-form solution requires omega1 == omega2; use the numeric integrator",
        ));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::validation(format!("tau must be >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(*x0);
    }
    let XParams { b, c, d, z, w, .. } = *x0;
    let a0 = x0.a;
    let big = sp.gamma;
    let g = sp.collective();
    let t = tau;
    let v = sp.v;
    let e = f64::exp;
    let gp = g + big;
    let gm = g - big;
    let diff_sq = g * g - big * big;

    // Every exponential below is the printed one multiplied through by its
    // decaying prefactor, so nothing overflows at large tau.
    let a = {
        let growth = e(t * gm);
        let decay = e(-t * gp);
        let pops = (b + c) * (-diff_sq) * (growth - 2.0 + decay);
        let dd = 2.0
            * d
            * (gm * gm * growth - (3.0 * g * g + big * big) * e(-2.0 * big * t) + gp * gp * decay);
        let coh = -2.0 * (-diff_sq) * z.re * (growth - decay);
        (2.0 * (a0 + d) * diff_sq + pops + dd + coh) / (2.0 * diff_sq)
    };

    let d_block = 2.0
        * d
        * (-2.0 * (g * g + big * big) * e(-2.0 * big * t)
            + gm * gm * e(t * gm)
            + gp * gp * e(-t * gp));
    let (ch, sh) = ((g * t).cosh(), (g * t).sinh());
    let (cv, sv) = ((2.0 * t * v).cos(), (2.0 * t * v).sin());
    let central = |s: f64| {
        let inner = -s * (b + c) * ch - (b - c) * cv + 2.0 * z.im * sv + s * 2.0 * z.re * sh;
        (d_block + s * 2.0 * diff_sq * e(-big * t) * inner) / (4.0 * (big * big - g * g))
    };
    let b_t = central(1.0);
    let c_t = central(-1.0);

    let z_t = {
        let dz = 2.0
            * d
            * (gm * gm * e(t * gm) - gp * gp * e(-t * gp) + 4.0 * g * big * e(-2.0 * big * t));
        let inner =
            C64::from(-(b + c) * sh + 2.0 * z.re * ch) + I * ((b - c) * sv + 2.0 * z.im * cv);
        (C64::from(dz) + inner * (2.0 * diff_sq * e(-big * t))) / (4.0 * diff_sq)
    };

    let omega0 = 0.5 * (sp.omega1 + sp.omega2);
    let w_t = w * C64::new(-big * t, 2.0 * omega0 * t).exp();

    Ok(XParams {
        a,
        b: b_t,
        c: c_t,
        d: d * e(-2.0 * big * t),
        z: z_t,
        w: w_t,
    })
}

/// Closed-form evolution of the symmetric family started from the Werner
/// state with mixing `p_mix`, in units where `Γ = 1`.
pub fn evolve_reduced_family(p_mix: f64, k: f64, tau: f64) -> Result<XParams> {
    werner_params(p_mix)?;
    if !(k > -K_SINGULAR_MARGIN) || !(k < 1.0 - K_SINGULAR_MARGIN) {
        return Err(Error::validation(format!(
            "reduced family requires k in (0, 1), got {k}"
        )));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::validation(format!("tau must be >= 0, got {tau}")));
    }
    let p = p_mix;
    let t = tau;
    let k2 = k * k;
    let (ch, sh) = ((k * t).cosh(), (k * t).sinh());
    let e1 = (-t).exp();
    let e2 = (-2.0 * t).exp();

    let d = 0.25 * (1.0 - p) * e2;
    let b = (2.0 * e1 * ((p * (k2 + k - 1.0) - k) * sh + (1.0 - k2 * p) * ch)
        - e2 * (1.0 + k2) * (1.0 - p))
        / (4.0 * (1.0 - k2));
    let z = (e1 * ((p * (1.0 - k2) + (1.0 - p) * k) * ch - (1.0 - k2 * p) * sh) + e2 * (k * p - k))
        / (2.0 * (1.0 - k2));
    let a = 1.0 - 2.0 * b - d;
    Ok(XParams::real(a, b, b, d, z, 0.0))
}

/// Uniform grid of `samples` points on `[0, tau_max]`.
pub fn uniform_grid(tau_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::validation("need at least 2 samples"));
    }
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(Error::validation(format!(
            "tau_max must be positive, got {tau_max}"
        )));
    }
    let n = (samples - 1) as f64;
    Ok((0..samples).map(|i| tau_max * i as f64 / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff4, trace4};
    use crate::qstate::{basis_state, make_x_state, random, werner_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ground_state_is_stationary() {
        let sp = SystemParams::new(2.0, 3.0, 1.5, 0.4).unwrap();
        let rhs = lindblad_rhs(&basis_state(0), &sp);
        assert!(rhs.norm() < 1e-15);
    }

    #[test]
    fn doubly_excited_population_decays_at_two_gamma() {
        let sp = SystemParams::new(1.0, 1.0, 0.7, 0.5).unwrap();
        let rhs = lindblad_rhs(&basis_state(3), &sp);
        assert_abs_diff_eq!(rhs[(3, 3)].re, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rhs[(3, 3)].im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rhs_traceless_and_hermitian() {
        let mut rng = random::seeded(1);
        for _ in 0..200 {
            let rho = random::random_state(&mut rng);
            let sp = SystemParams::new(1.3, -0.4, 2.2, -0.7).unwrap();
            let rhs = lindblad_rhs(&rho, &sp);
            assert!(trace4(&rhs).norm() < 1e-12);
            assert!(max_abs_diff4(&rhs, &rhs.adjoint()) < 1e-12);
        }
    }

    #[test]
    fn analytic_identity_at_zero() {
        let mut rng = random::seeded(2);
        let x = random::random_x_params(&mut rng);
        let sp = SystemParams::new(2.0, 2.0, 1.0, 0.3).unwrap();
        assert_eq!(evolve_analytic_x(&x, &sp, 0.0).unwrap(), x);
    }

    #[test]
    fn analytic_d_decay() {
        let x = XParams::real(0.25, 0.25, 0.25, 0.25, 0.0, 0.0);
        let sp = SystemParams::new(0.0, 0.0, 0.0, 0.5).unwrap();
        let out = evolve_analytic_x(&x, &sp, 1.0).unwrap();
        assert_abs_diff_eq!(out.d, 0.25 * (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.d, 0.0338338208091532, epsilon = 1e-12);
    }

    #[test]
    fn analytic_w_modulus_independent_of_v_and_k() {
        let x = XParams {
            w: C64::new(0.1, 0.05),
            ..XParams::real(0.3, 0.2, 0.2, 0.3, 0.05, 0.0)
        };
        for (v, k) in [(0.0, 0.1), (3.0, -0.6), (9.0, 0.9)] {
            let sp = SystemParams::new(4.0, 4.0, v, k).unwrap();
            let out = evolve_analytic_x(&x, &sp, 1.7).unwrap();
            assert_abs_diff_eq!(out.w.norm(), x.w.norm() * (-1.7f64).exp(), epsilon = 1e-15);
        }
    }

    #[test]
    fn analytic_rejects_singular_and_detuned() {
        let x = XParams::real(0.25, 0.25, 0.25, 0.25, 0.0, 0.0);
        let sp = SystemParams::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!(evolve_analytic_x(&x, &sp, 1.0).is_err());
        let sp = SystemParams::new(1.0, 2.0, 0.0, 0.5).unwrap();
        let err = evolve_analytic_x(&x, &sp, 1.0).unwrap_err();
        assert!(err.to_string().contains("numeric"));
    }

    #[test]
    fn reduced_family_at_zero_is_werner() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let x = evolve_reduced_family(p, 0.5, 0.0).unwrap();
            let w = werner_params(p).unwrap();
            assert!(x.max_abs_diff(&w) < 1e-15, "p = {p}: {x:?}");
        }
    }

    #[test]
    fn reduced_family_reference_point() {
        // p = 0, k = 1/2, tau = 3; full precision from the closed form.
        let x = evolve_reduced_family(0.0, 0.5, 3.0).unwrap();
        assert_abs_diff_eq!(x.a, 0.9159602221820031, epsilon = 1e-13);
        assert_abs_diff_eq!(x.b, 0.04171004488691514, epsilon = 1e-13);
        assert_abs_diff_eq!(x.c, x.b);
        assert_abs_diff_eq!(x.d, 0.0006196880441665896, epsilon = 1e-13);
        assert_abs_diff_eq!(x.z.re, -0.0324601124811726, epsilon = 1e-13);
    }

    #[test]
    fn reduced_family_asymptotic_coherence_ratio() {
        let x = evolve_reduced_family(0.0, 0.5, 20.0).unwrap();
        let ratio = x.z.norm() / x.b;
        assert!((0.999..=1.0).contains(&ratio), "{ratio}");
        assert!(x.z.re < 0.0);
    }

    #[test]
    fn reduced_family_matches_general_closed_form() {
        for &(p, k) in &[(0.0, 0.5), (0.3, 0.25), (0.9, 0.75), (1.0, 0.1)] {
            let sp = SystemParams::new(3.0, 3.0, 4.0, k).unwrap();
            let w = werner_params(p).unwrap();
            for i in 0..=60 {
                let tau = i as f64 * 0.5;
                let r = evolve_reduced_family(p, k, tau).unwrap();
                let g = evolve_analytic_x(&w, &sp, tau).unwrap();
                assert!(r.max_abs_diff(&g) < 1e-12, "p={p} k={k} tau={tau}");
            }
        }
    }

    #[test]
    fn numeric_ground_state_constant() {
        let sp = SystemParams::new(1.0, 2.0, 3.0, 0.5).unwrap();
        let grid = uniform_grid(2.0, 5).unwrap();
        let traj = evolve_numeric(&basis_state(0), &sp, &grid, DEFAULT_STEP).unwrap();
        for (_, s) in traj.iter() {
            assert!(max_abs_diff4(s.matrix(), basis_state(0).matrix()) < 1e-15);
        }
    }

    #[test]
    fn numeric_matches_analytic_on_werner() {
        let sp = SystemParams::new(5.0, 5.0, 3.0, 0.5).unwrap();
        let w = werner_params(0.4).unwrap();
        let grid = uniform_grid(5.0, 51).unwrap();
        let traj = evolve_numeric(&werner_state(0.4).unwrap(), &sp, &grid, DEFAULT_STEP).unwrap();
        for (tau, s) in traj.iter() {
            let exact = make_x_state(&evolve_analytic_x(&w, &sp, tau).unwrap()).unwrap();
            assert!(
                max_abs_diff4(s.matrix(), exact.matrix()) < 1e-8,
                "tau = {tau}"
            );
        }
    }

    #[test]
    fn numeric_uneven_grid_uses_short_steps() {
        let sp = SystemParams::new(1.0, 1.0, 0.5, 0.3).unwrap();
        let rho = werner_state(0.7).unwrap();
        let grid = [0.0, 0.00037, 0.5, 1.2345];
        let traj = evolve_numeric(&rho, &sp, &grid, DEFAULT_STEP).unwrap();
        let w = werner_params(0.7).unwrap();
        for (tau, s) in traj.iter() {
            let exact = make_x_state(&evolve_analytic_x(&w, &sp, tau).unwrap()).unwrap();
            assert!(max_abs_diff4(s.matrix(), exact.matrix()) < 1e-10);
        }
    }

    #[test]
    fn grid_validation() {
        let sp = SystemParams::default();
        let rho = werner_state(0.1).unwrap();
        assert!(evolve_numeric(&rho, &sp, &[0.5, 1.0], 1e-3).is_err());
        assert!(evolve_numeric(&rho, &sp, &[0.0, 1.0, 1.0], 1e-3).is_err());
        assert!(evolve_numeric(&rho, &sp, &[0.0, 1.0], 0.0).is_err());
        assert!(SystemParams::new(0.0, 0.0, 0.0, 1.2).is_err());
    }
}
