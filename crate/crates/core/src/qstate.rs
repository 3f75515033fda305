//! Two-qubit states and their real R-picture.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with σ_z|0⟩ = +|0⟩, so that
//! σ₋ = |0⟩⟨1| lowers and |00⟩ is the ground state.

use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::linalg::{self, kron, pauli, trace4, Mat2, Mat4, C64, ONE, ZERO};
use crate::{Error, Result};

pub mod random;

/// Tolerance on Hermiticity and unit trace.
pub const STATE_TOL: f64 = 1e-12;
/// Minimum eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// A valid two-qubit density matrix. Construction checks Hermiticity, unit
/// trace and positivity, so every value of this type is a physical state.
#[derive(Clone, PartialEq)]
pub struct TwoQubitDensityMatrix {
    m: Mat4,
}

impl fmt::Debug for TwoQubitDensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoQubitDensityMatrix")
            .field("entries", &self.m)
            .finish()
    }
}

impl TwoQubitDensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let herm = linalg::max_abs_diff4(&m, &m.adjoint());
        if herm > STATE_TOL {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = trace4(&m);
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::validation(format!("trace is {tr}, expected 1")));
        }
        let min_eigenvalue = linalg::eigvals_hermitian4(&m)[0];
        if min_eigenvalue < PSD_TOL {
            return Err(Error::NotAState { min_eigenvalue });
        }
        Ok(Self {
            m: linalg::hermitian_part4(&m),
        })
    }

    /// Divides by the trace, then validates.
    pub fn normalized(m: Mat4) -> Result<Self> {
        let tr = trace4(&m).re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::validation(format!("cannot normalize, trace {tr}")));
        }
        Self::new(linalg::hermitian_part4(&m).unscale(tr))
    }

    /// Wraps a Hermitian matrix without validation, for intermediate
    /// representatives that are only defined up to normalization.
    pub(crate) fn new_unchecked(m: Mat4) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::eigvals_hermitian4(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Partial transpose on qubit B.
    pub fn partial_transpose(&self) -> Mat4 {
        Mat4::from_fn(|r, c| {
            let (a, b) = (r / 2, r % 2);
            let (a2, b2) = (c / 2, c % 2);
            self.m[(2 * a + b2, 2 * a2 + b)]
        })
    }

    /// Positive partial transpose within [`PSD_TOL`].
    pub fn is_ppt(&self) -> bool {
        linalg::eigvals_hermitian4(&self.partial_transpose())[0] >= PSD_TOL
    }

    /// Largest modulus among entries outside the diagonal and anti-diagonal.
    pub fn off_x_magnitude(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                if r != c && r + c != 3 {
                    worst = worst.max(self.m[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Reads the X-state parameters, ignoring entries off the X.
    pub fn x_params(&self) -> XParams {
        XParams {
            a: self.m[(0, 0)].re,
            b: self.m[(1, 1)].re,
            c: self.m[(2, 2)].re,
            d: self.m[(3, 3)].re,
            z: self.m[(1, 2)],
            w: self.m[(0, 3)],
        }
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = self.m - other.m;
        0.5 * linalg::eigvals_hermitian4(&diff)
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    }
}

/// Entries of an X-shaped state:
///
/// ```text
/// ⎡ a  0  0  w ⎤
/// ⎢ 0  b  z  0 ⎥
/// ⎢ 0  z* c  0 ⎥
/// ⎣ w* 0  0  d ⎦
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub z: C64,
    pub w: C64,
}

impl XParams {
    pub fn real(a: f64, b: f64, c: f64, d: f64, z: f64, w: f64) -> Self {
        Self {
            a,
            b,
            c,
            d,
            z: C64::from(z),
            w: C64::from(w),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, d, z, w } = *self;
        let vals = [a, b, c, d, z.re, z.im, w.re, w.im];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("X parameters must be finite"));
        }
        let tr = a + b + c + d;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!(
                "trace a+b+c+d = {tr}, expected 1"
            )));
        }
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if v < PSD_TOL {
                return Err(Error::validation(format!(
                    "population {name} = {v} is negative"
                )));
            }
        }
        if z.norm_sqr() - b * c > -PSD_TOL {
            return Err(Error::validation(format!(
                "coherence bound |z|^2 <= b*c violated ({} > {})",
                z.norm_sqr(),
                b * c
            )));
        }
        if w.norm_sqr() - a * d > -PSD_TOL {
            return Err(Error::validation(format!(
                "coherence bound |w|^2 <= a*d violated ({} > {})",
                w.norm_sqr(),
                a * d
            )));
        }
        Ok(())
    }

    /// True when the parameters belong to the symmetric family evolved in
    /// closed form: w = 0, b = c and real z.
    pub fn is_symmetric_family(&self, tol: f64) -> bool {
        self.w.norm() <= tol && (self.b - self.c).abs() <= tol && self.z.im.abs() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.a - other.a).abs(),
            (self.b - other.b).abs(),
            (self.c - other.c).abs(),
            (self.d - other.d).abs(),
            (self.z - other.z).norm(),
            (self.w - other.w).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Bloch vectors and correlation matrix, `R_ij = Tr[(σ_i ⊗ σ_j) ρ]`.
/// `R_00 = 1` is implicit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RPicture {
    pub bloch_a: Vector3<f64>,
    pub bloch_b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl RPicture {
    pub fn bell_diagonal(t: [f64; 3]) -> Self {
        Self {
            bloch_a: Vector3::zeros(),
            bloch_b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::from(t)),
        }
    }

    /// Full 4×4 real matrix with first row `(1, b^T)` and first column `(1, a)`.
    pub fn full_matrix(&self) -> nalgebra::Matrix4<f64> {
        let mut r = nalgebra::Matrix4::zeros();
        r[(0, 0)] = 1.0;
        for i in 0..3 {
            r[(0, i + 1)] = self.bloch_b[i];
            r[(i + 1, 0)] = self.bloch_a[i];
            for j in 0..3 {
                r[(i + 1, j + 1)] = self.t[(i, j)];
            }
        }
        r
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.full_matrix() - other.full_matrix()).amax()
    }
}

/// Subsystem selector for partial traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A pair of local filters `f_A ⊗ f_B` with `f†f ≤ 𝟙` on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperatorPair {
    pub f_a: Mat2,
    pub f_b: Mat2,
}

impl LocalOperatorPair {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(f_a: Mat2, f_b: Mat2) -> Result<Self> {
        for (name, f) in [("f_A", &f_a), ("f_B", &f_b)] {
            if f.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::validation(format!("{name} has non-finite entries")));
            }
            let s = linalg::spectral_norm2(f);
            if s > 1.0 + Self::NORM_TOL {
                return Err(Error::validation(format!(
                    "{name} has largest singular value {s}, must be <= 1"
                )));
            }
        }
        Ok(Self { f_a, f_b })
    }

    pub fn identity() -> Self {
        Self {
            f_a: Mat2::identity(),
            f_b: Mat2::identity(),
        }
    }

    /// Scales each factor so that its largest singular value is one.
    pub fn rescaled(f_a: Mat2, f_b: Mat2) -> Result<Self> {
        let na = linalg::spectral_norm2(&f_a);
        let nb = linalg::spectral_norm2(&f_b);
        if !(na > 0.0) || !(nb > 0.0) {
            return Err(Error::validation("filter is identically zero"));
        }
        Self::new(f_a.unscale(na), f_b.unscale(nb))
    }

    pub fn kron(&self) -> Mat4 {
        kron(&self.f_a, &self.f_b)
    }
}

pub fn make_x_state(p: &XParams) -> Result<TwoQubitDensityMatrix> {
    p.validate()?;
    let mut m = Mat4::zeros();
    m[(0, 0)] = C64::from(p.a);
    m[(1, 1)] = C64::from(p.b);
    m[(2, 2)] = C64::from(p.c);
    m[(3, 3)] = C64::from(p.d);
    m[(1, 2)] = p.z;
    m[(2, 1)] = p.z.conj();
    m[(0, 3)] = p.w;
    m[(3, 0)] = p.w.conj();
    TwoQubitDensityMatrix::new(m)
}

/// X parameters of `p |ψ⁺⟩⟨ψ⁺| + (1 − p) 𝟙/4`.
pub fn werner_params(p_mix: f64) -> Result<XParams> {
    if !(0.0..=1.0).contains(&p_mix) {
        return Err(Error::validation(format!(
            "mixing parameter p = {p_mix} outside [0, 1]"
        )));
    }
    let outer = 0.25 * (1.0 - p_mix);
    let inner = 0.25 * (1.0 + p_mix);
    Ok(XParams::real(outer, inner, inner, outer, 0.5 * p_mix, 0.0))
}

/// `p |ψ⁺⟩⟨ψ⁺| + (1 − p) 𝟙/4` with `|ψ⁺⟩ = (|01⟩ + |10⟩)/√2`.
pub fn werner_state(p_mix: f64) -> Result<TwoQubitDensityMatrix> {
    make_x_state(&werner_params(p_mix)?)
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn state(self) -> TwoQubitDensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v: [f64; 4] = match self {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        };
        pure_state(&v.map(C64::from)).expect("Bell states are normalized")
    }
}

pub fn singlet() -> TwoQubitDensityMatrix {
    Bell::PsiMinus.state()
}

/// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
pub fn pure_state(amplitudes: &[C64; 4]) -> Result<TwoQubitDensityMatrix> {
    let v = nalgebra::Vector4::from_column_slice(amplitudes);
    TwoQubitDensityMatrix::new(v * v.adjoint())
}

/// Computational basis projector `|ij⟩⟨ij|` with `index = 2i + j`.
pub fn basis_state(index: usize) -> TwoQubitDensityMatrix {
    let mut v = [ZERO; 4];
    v[index] = ONE;
    pure_state(&v).expect("basis state")
}

/// `ρ_A ⊗ ρ_B` for two single-qubit density matrices.
pub fn product_state(rho_a: &Mat2, rho_b: &Mat2) -> Result<TwoQubitDensityMatrix> {
    TwoQubitDensityMatrix::new(kron(rho_a, rho_b))
}

pub fn to_r_picture(rho: &TwoQubitDensityMatrix) -> RPicture {
    let m = rho.matrix();
    let expect = |i: usize, j: usize| -> f64 {
        let v = trace4(&(kron(&pauli(i), &pauli(j)) * m));
        debug_assert!(v.im.abs() <= 1e-12, "imaginary Pauli expectation {v}");
        v.re
    };
    let mut out = RPicture {
        bloch_a: Vector3::zeros(),
        bloch_b: Vector3::zeros(),
        t: Matrix3::zeros(),
    };
    for i in 0..3 {
        out.bloch_a[i] = expect(i + 1, 0);
        out.bloch_b[i] = expect(0, i + 1);
        for j in 0..3 {
            out.t[(i, j)] = expect(i + 1, j + 1);
        }
    }
    out
}

/// `ρ = ¼ Σ R_ij σ_i ⊗ σ_j`; fails with [`Error::NotAState`] when the result
/// is not positive semidefinite.
pub fn from_r_picture(r: &RPicture) -> Result<TwoQubitDensityMatrix> {
    let full = r.full_matrix();
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let coeff = full[(i, j)];
            if coeff != 0.0 {
                m += kron(&pauli(i), &pauli(j)).scale(0.25 * coeff);
            }
        }
    }
    TwoQubitDensityMatrix::new(m)
}

/// Partial trace over the complementary qubit.
pub fn reduced_state(rho: &TwoQubitDensityMatrix, keep: Subsystem) -> Mat2 {
    let m = rho.matrix();
    Mat2::from_fn(|r, c| match keep {
        Subsystem::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
        Subsystem::B => m[(r, c)] + m[(2 + r, 2 + c)],
    })
}
