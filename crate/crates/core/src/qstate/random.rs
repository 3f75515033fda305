//! Seeded random states, unitaries and filters for property tests and
//! randomized checks.

use nalgebra::{Quaternion, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{product_state, LocalOperatorPair, TwoQubitDensityMatrix, XParams};
use crate::linalg::{Mat2, Mat4, C64, ONE, ZERO};

pub type StateRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Full-rank mixed state `G G† / Tr[G G†]` with a complex Ginibre `G`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitDensityMatrix {
    let g = Mat4::from_fn(|_, _| gaussian_c64(rng));
    TwoQubitDensityMatrix::normalized(g * g.adjoint()).expect("Ginibre state is valid")
}

pub fn random_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let g = Mat2::from_fn(|_, _| gaussian_c64(rng));
    let m = g * g.adjoint();
    let tr = (m[(0, 0)] + m[(1, 1)]).re;
    m.unscale(tr)
}

/// Haar-random element of SU(2) from a uniformly random unit quaternion.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let v = Vector4::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
    let q = Quaternion::from(v.normalize());
    su2_from_quaternion(q.w, q.i, q.j, q.k)
}

/// `w 𝟙 − i (x σ_x + y σ_y + z σ_z)` for a unit quaternion.
pub(crate) fn su2_from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Mat2 {
    Mat2::new(
        C64::new(w, -z),
        C64::new(-y, -x),
        C64::new(y, -x),
        C64::new(w, z),
    )
}

pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitDensityMatrix {
    product_state(&random_qubit_state(rng), &random_qubit_state(rng)).expect("product of states")
}

/// Convex mixture of between one and four random product states.
pub fn random_separable_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitDensityMatrix {
    let n = rng.random_range(1..=4);
    let mut m = Mat4::zeros();
    for _ in 0..n {
        let w: f64 = rng.random::<f64>() + 1e-3;
        m += random_product_state(rng).matrix().scale(w);
    }
    TwoQubitDensityMatrix::normalized(m).expect("mixture of states")
}

/// Random valid X parameters with every block strictly inside its
/// positivity bound.
pub fn random_x_params<R: Rng + ?Sized>(rng: &mut R) -> XParams {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let s: f64 = raw.iter().sum();
    let [a, b, c, d] = raw.map(|x| x / s);
    let phase = |rng: &mut R| {
        let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        C64::from_polar(1.0, t)
    };
    let z = phase(rng) * (b * c).sqrt() * rng.random::<f64>();
    let w = phase(rng) * (a * d).sqrt() * rng.random::<f64>();
    // renormalize away the roundoff in a + b + c + d
    let a = 1.0 - b - c - d;
    XParams { a, b, c, d, z, w }
}

/// Random invertible local filter pair whose factors have condition number
/// at most `max_condition`, rescaled to unit spectral norm.
pub fn random_invertible_filters<R: Rng + ?Sized>(
    rng: &mut R,
    max_condition: f64,
) -> LocalOperatorPair {
    let side = |rng: &mut R| {
        let u = random_unitary(rng);
        let v = random_unitary(rng);
        let log_cond: f64 = rng.random::<f64>() * max_condition.ln();
        let s = Mat2::new(ONE, ZERO, ZERO, C64::from((-log_cond).exp()));
        u * s * v
    };
    let f_a = side(rng);
    let f_b = side(rng);
    LocalOperatorPair::rescaled(f_a, f_b).expect("invertible filters")
}

/// Random product of local unitaries `U_A ⊗ U_B`, returned as a filter pair.
pub fn random_local_unitaries<R: Rng + ?Sized>(rng: &mut R) -> LocalOperatorPair {
    LocalOperatorPair::new(random_unitary(rng), random_unitary(rng)).expect("unitaries")
}
