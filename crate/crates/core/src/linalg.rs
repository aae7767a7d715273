//! 2×2 helpers. Everything in the modal picture decouples into 2×2 blocks, so
//! closed forms beat a general linear-algebra dependency here.

use num_complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];
pub type CMat2 = [[Complex64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn apply(a: &Mat2, x: [Complex64; 2]) -> [Complex64; 2] {
    [x[0] * a[0][0] + x[1] * a[0][1], x[0] * a[1][0] + x[1] * a[1][1]]
}

/// Largest singular value from the Gram matrix `[[p, q], [q̄, r]] = AᴴA`.
///
/// The eigenvalue gap `√((p − r)² + 4|q|²)` is formed directly, so nearly
/// unitary matrices keep full relative accuracy.
fn sigma_max(p: f64, r: f64, q_abs: f64) -> f64 {
    let gap = (p - r).hypot(2.0 * q_abs);
    ((p + r + gap) / 2.0).sqrt()
}

/// Spectral norm of a real 2×2 matrix.
pub fn norm2(a: &Mat2) -> f64 {
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let r = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let q = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    sigma_max(p, r, q.abs())
}

/// Spectral norm of a complex 2×2 matrix.
pub fn cnorm2(a: &CMat2) -> f64 {
    let p = a[0][0].norm_sqr() + a[1][0].norm_sqr();
    let r = a[0][1].norm_sqr() + a[1][1].norm_sqr();
    let q = a[0][0].conj() * a[0][1] + a[1][0].conj() * a[1][1];
    sigma_max(p, r, q.norm())
}

/// Neumaier-compensated sum, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_simple_matrices() {
        assert!((norm2(&IDENTITY) - 1.0).abs() < 1e-15);
        assert!((norm2(&[[3.0, 0.0], [0.0, -5.0]]) - 5.0).abs() < 1e-15);
        // golden ratio: [[1,1],[1,0]]
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((norm2(&[[1.0, 1.0], [1.0, 0.0]]) - phi).abs() < 1e-15);
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        assert!((cnorm2(&[[i, z], [z, i * 2.0]]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        assert!((compensated_sum(xs) - 4e-16).abs() < 1e-30);
    }
}
