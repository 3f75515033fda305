use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrices, index 0 is the identity.
pub(crate) fn pauli(i: usize) -> Mat2 {
    match i {
        0 => Mat2::new(ONE, ZERO, ZERO, ONE),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {i} out of range"),
    }
}

pub(crate) fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub(crate) fn hermitian_part4(m: &Mat4) -> Mat4 {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn trace4(m: &Mat4) -> C64 {
    (0..4).map(|i| m[(i, i)]).sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn eigvals_hermitian4(m: &Mat4) -> [f64; 4] {
    let eig = SymmetricEigen::new(hermitian_part4(m));
    let mut v = [0.0; 4];
    for (dst, src) in v.iter_mut().zip(eig.eigenvalues.iter()) {
        *dst = *src;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// `m^{-1/2}` for a Hermitian 2×2 matrix, or `None` when an eigenvalue is
/// not safely positive.
pub(crate) fn inv_sqrt_psd2(m: &Mat2, floor: f64) -> Option<Mat2> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    if eig.eigenvalues.iter().any(|&x| !(x > floor)) {
        return None;
    }
    let q = &eig.eigenvectors;
    let d = Mat2::from_diagonal(&eig.eigenvalues.map(|x| C64::from(1.0 / x.sqrt())));
    Some(q * d * q.adjoint())
}

/// Largest singular value of a 2×2 complex matrix (closed form).
pub(crate) fn spectral_norm2(m: &Mat2) -> f64 {
    let g = m.adjoint() * m;
    let tr = (g[(0, 0)] + g[(1, 1)]).re;
    let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr + disc).max(0.0).sqrt()
}

pub(crate) fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli(1), pauli(2), pauli(3));
        assert!(((x * y) - z.scale(1.0) * I).norm() < 1e-15);
        for i in 1..4 {
            let p = pauli(i);
            assert!((p * p - pauli(0)).norm() < 1e-15);
        }
    }

    #[test]
    fn spectral_norm_matches_diag() {
        let m = Mat2::new(C64::from(0.3), ZERO, ZERO, C64::new(0.0, -2.0));
        assert!((spectral_norm2(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_rejects_singular() {
        let m = Mat2::new(ONE, ZERO, ZERO, ZERO);
        assert!(inv_sqrt_psd2(&m, 0.0).is_none());
        let m = Mat2::new(C64::from(4.0), ZERO, ZERO, C64::from(0.25));
        let r = inv_sqrt_psd2(&m, 0.0).unwrap();
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-14 && (r[(1, 1)].re - 2.0).abs() < 1e-14);
    }
}
