//! Standard two-qubit correlation measures, each renormalized to `[0, 1]`
//! with 0 for states lacking the property and 1 on Bell states:
//!
//! | measure | raw quantity                    | normalized            |
//! |---------|---------------------------------|-----------------------|
//! | B       | `M = s₁² + s₂²` (CHSH)          | `max{0, M − 1}`       |
//! | BF₃     | `F₃ = s₁² + s₂² + s₃²`          | `max{0, (F₃ − 1)/2}`  |
//! | D       | `N = s₁ + s₂ − χ s₃`            | `max{0, (N − 1)/2}`   |
//! | C       | `λ₁ − λ₂ − λ₃ − λ₄` (Wootters)  | `max{0, ·}`           |
//!
//! `s_i` are the singular values of the correlation matrix `T`, `χ` the
//! sign of `det T`.

use std::fmt::Write as _;

use nalgebra::SymmetricEigen;

use crate::linalg::{self, kron, pauli, Mat4, C64};
use crate::qstate::{to_r_picture, RPicture, TwoQubitDensityMatrix, XParams};
use crate::{Error, Result};

/// `|det T|` below this has chirality 0.
pub const CHIRALITY_TOL: f64 = 1e-12;
const CONCURRENCE_CLAMP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub chi: i8,
    pub lambda: [f64; 4],
    /// CHSH quantity `s₁² + s₂²`.
    pub m: f64,
    pub f3: f64,
    /// Teleportation quantity `s₁ + s₂ − χ s₃`.
    pub n: f64,
    /// Singlet fraction.
    pub f: f64,
    /// Teleportation fidelity.
    pub fidelity: f64,
    pub b: f64,
    pub bf3: f64,
    pub d: f64,
    pub c: f64,
}

impl CorrelationReport {
    pub fn of(rho: &TwoQubitDensityMatrix) -> Self {
        let r = to_r_picture(rho);
        Self::from_parts(&r, concurrence_spectrum(rho))
    }

    fn from_parts(r: &RPicture, lambda: [f64; 4]) -> Self {
        let [s1, s2, s3] = t_singular_values(r);
        let chi = chirality(r);
        let m = chsh_quantity([s1, s2, s3]);
        let f3 = f3_quantity([s1, s2, s3]);
        let n = teleportation_quantity([s1, s2, s3], chi);
        Self {
            s1,
            s2,
            s3,
            chi,
            lambda,
            m,
            f3,
            n,
            f: singlet_fraction(n),
            fidelity: teleportation_fidelity(n),
            b: normalize_chsh(m),
            bf3: normalize_f3(f3),
            d: normalize_teleportation(n),
            c: concurrence_from_spectrum(lambda),
        }
    }

    /// `(name, value)` pairs in report order.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("s1", self.s1),
            ("s2", self.s2),
            ("s3", self.s3),
            ("chi", f64::from(self.chi)),
            ("lambda1", self.lambda[0]),
            ("lambda2", self.lambda[1]),
            ("lambda3", self.lambda[2]),
            ("lambda4", self.lambda[3]),
            ("M", self.m),
            ("F3", self.f3),
            ("N", self.n),
            ("f", self.f),
            ("F", self.fidelity),
            ("B", self.b),
            ("BF3", self.bf3),
            ("D", self.d),
            ("C", self.c),
        ]
    }

    /// `name=value` lines, one per field.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (name, v) in self.fields() {
            if name == "chi" {
                let _ = writeln!(out, "chi={}", self.chi);
            } else {
                let _ = writeln!(out, "{name}={}", crate::io::fmt_f64(v));
            }
        }
        out
    }
}

/// Singular values of `T`, decreasing.
pub fn t_singular_values(r: &RPicture) -> [f64; 3] {
    let sv = r.t.singular_values();
    let mut s = [sv[0], sv[1], sv[2]];
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Sign of `det T`, or 0 when `|det T| < 1e-12`.
pub fn chirality(r: &RPicture) -> i8 {
    let det = r.t.determinant();
    if det.abs() < CHIRALITY_TOL {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

pub fn chsh_quantity(s: [f64; 3]) -> f64 {
    s[0] * s[0] + s[1] * s[1]
}

pub fn f3_quantity(s: [f64; 3]) -> f64 {
    s.iter().map(|x| x * x).sum()
}

pub fn teleportation_quantity(s: [f64; 3], chi: i8) -> f64 {
    s[0].abs() + s[1].abs() - f64::from(chi) * s[2].abs()
}

pub fn singlet_fraction(n: f64) -> f64 {
    0.25 * (1.0 + n)
}

pub fn teleportation_fidelity(n: f64) -> f64 {
    0.5 * (n / 3.0 + 1.0)
}

pub fn normalize_chsh(m: f64) -> f64 {
    (m - 1.0).max(0.0)
}

pub fn normalize_f3(f3: f64) -> f64 {
    (0.5 * (f3 - 1.0)).max(0.0)
}

pub fn normalize_teleportation(n: f64) -> f64 {
    (0.5 * (n - 1.0)).max(0.0)
}

/// Square roots of the eigenvalues of `ρ ρ̂`, `ρ̂ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`,
/// in decreasing order.
///
/// With `ρ = G G†` these are the singular values of `Gᵀ (σ_y⊗σ_y) G`, which
/// avoids square roots of eigenvalues that are zero up to roundoff.
pub fn concurrence_spectrum(rho: &TwoQubitDensityMatrix) -> [f64; 4] {
    let m = rho.matrix();
    let yy = kron(&pauli(2), &pauli(2));
    let eig = SymmetricEigen::new(linalg::hermitian_part4(m));
    let scale = eig.eigenvalues.map(|x| {
        let x = if x < 0.0 && x > -CONCURRENCE_CLAMP {
            0.0
        } else {
            x
        };
        C64::from(x.max(0.0).sqrt())
    });
    let g: Mat4 = eig.eigenvectors * Mat4::from_diagonal(&scale);
    let sv = (g.transpose() * yy * g).singular_values();
    let mut lambda = [sv[0], sv[1], sv[2], sv[3]];
    lambda.sort_by(|a, b| b.total_cmp(a));
    lambda
}

pub fn concurrence_from_spectrum(lambda: [f64; 4]) -> f64 {
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0)
}

pub fn concurrence(rho: &TwoQubitDensityMatrix) -> f64 {
    concurrence_from_spectrum(concurrence_spectrum(rho))
}

/// Normalized CHSH measure and the raw `M`.
pub fn chsh_b(rho: &TwoQubitDensityMatrix) -> (f64, f64) {
    let m = chsh_quantity(t_singular_values(&to_r_picture(rho)));
    (normalize_chsh(m), m)
}

/// Normalized F₃-steering measure and the raw `F₃`.
pub fn f3_bf3(rho: &TwoQubitDensityMatrix) -> (f64, f64) {
    let f3 = f3_quantity(t_singular_values(&to_r_picture(rho)));
    (normalize_f3(f3), f3)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Teleportation {
    pub d: f64,
    pub n: f64,
    pub singlet_fraction: f64,
    pub fidelity: f64,
}

pub fn teleportation_d(rho: &TwoQubitDensityMatrix) -> Teleportation {
    let r = to_r_picture(rho);
    let n = teleportation_quantity(t_singular_values(&r), chirality(&r));
    Teleportation {
        d: normalize_teleportation(n),
        n,
        singlet_fraction: singlet_fraction(n),
        fidelity: teleportation_fidelity(n),
    }
}

/// Closed forms on the symmetric family (`w = 0`, `b = c`, real `z`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardClosedForms {
    /// `a + d − b − c`.
    pub epsilon: f64,
    /// `√(bc) + √(ad)`.
    pub f_plus: f64,
    /// `√(bc) − √(ad)`.
    pub f_minus: f64,
    /// `max{0, ε² + 4|z|² − 1}`; exact only while `|ε| ≥ 2|z|`.
    pub b: f64,
    pub bf3: f64,
    /// Teleportation measure as tabulated, `2 max{0, |z| − (b+c)/2}`.
    pub d_table: f64,
    /// Teleportation measure reduced from the general definition on this
    /// family, `2 max{0, |z| − (a+d)/2}`.
    pub d_family: f64,
    pub c: f64,
}

impl StandardClosedForms {
    /// The tabulated CHSH closed form holds in this regime.
    pub fn b_regime_holds(&self, z: f64) -> bool {
        self.epsilon.abs() >= 2.0 * z.abs()
    }

    /// The two teleportation readings differ.
    pub fn d_disagrees(&self) -> bool {
        (self.d_table - self.d_family).abs() > 1e-12
    }
}

pub(crate) fn check_family(x: &XParams) -> Result<()> {
    x.validate()?;
    if !x.is_symmetric_family(1e-12) {
        return Err(Error::validation(
            "closed forms need the symmetric family: w = 0, b = c, Im z = 0",
        ));
    }
    Ok(())
}

pub fn closed_forms_standard(x: &XParams) -> Result<StandardClosedForms> {
    check_family(x)?;
    let XParams { a, b, c, d, z, .. } = *x;
    let z = z.norm();
    let epsilon = a + d - b - c;
    let sbc = (b * c).max(0.0).sqrt();
    let sad = (a * d).max(0.0).sqrt();
    Ok(StandardClosedForms {
        epsilon,
        f_plus: sbc + sad,
        f_minus: sbc - sad,
        b: (epsilon * epsilon + 4.0 * z * z - 1.0).max(0.0),
        bf3: (0.5 * (epsilon * epsilon + 8.0 * z * z - 1.0)).max(0.0),
        d_table: 2.0 * (z - 0.5 * (b + c)).max(0.0),
        d_family: 2.0 * (z - 0.5 * (a + d)).max(0.0),
        c: 2.0 * (z - sad).max(0.0),
    })
}
