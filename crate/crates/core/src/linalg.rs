//! Small dense 2x2 complex algebra shared by the bench and the solvers.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Pauli sigma_x, also the parity operator on the two-beam position basis.
pub fn sigma_x() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_finite(m: &Mat2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `M^dagger M = I` within `tol` entrywise.
pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    max_abs_diff(&(m.adjoint() * m), &identity()) <= tol
}

fn one_norm(m: &Mat2) -> f64 {
    (0..2)
        .map(|j| m[(0, j)].norm() + m[(1, j)].norm())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled until its 1-norm is at most 1/2, where 24 Taylor
/// terms are far below double precision, then squared back. Valid for any
/// 2x2 matrix, including defective ones at an exceptional point.
pub fn expm(m: &Mat2) -> Mat2 {
    let norm = one_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.unscale(2f64.powi(squarings));

    let mut sum = identity();
    let mut term = identity();
    for k in 1..=24 {
        term *= scaled.unscale(k as f64);
        sum += term;
        if one_norm(&term) < 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigenvalues of a general 2x2 complex matrix from its characteristic
/// polynomial, ordered so that the first has the larger real part.
pub fn eigenvalues(m: &Mat2) -> (Complex64, Complex64) {
    let half_trace = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let half_gap = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let disc = (half_gap * half_gap + m[(0, 1)] * m[(1, 0)]).sqrt();
    let (a, b) = (half_trace + disc, half_trace - disc);
    if a.re >= b.re {
        (a, b)
    } else {
        (b, a)
    }
}
