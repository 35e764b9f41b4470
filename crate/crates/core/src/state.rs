//! The polarization/position product space and the linear elements that act
//! on one factor of it.
//!
//! A field `sum_{n,m} c[n][m] E_n(r) sigma_m` is stored as the 2x2 amplitude
//! tensor `c`, rows indexing the beam (upper, lower) and columns the circular
//! polarization (sigma+, sigma-). Circular basis vectors are normalized,
//! `sigma_pm = (e_h +- i e_v)/sqrt(2)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::linalg::{self, c, cis, Mat2};

pub const UPPER: usize = 0;
pub const LOWER: usize = 1;
pub const PLUS: usize = 0;
pub const MINUS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolPosState {
    pub amps: Mat2,
}

impl PolPosState {
    pub fn new(amps: Mat2) -> Self {
        PolPosState { amps }
    }

    /// `E_u sigma+ + E_l sigma-`: unit amplitude on (u,+) and (l,-).
    pub fn initial() -> Self {
        PolPosState {
            amps: Mat2::identity(),
        }
    }

    pub fn total_intensity(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        linalg::is_finite(&self.amps)
    }

    /// Determinant of the amplitude tensor; nonzero iff the state does not
    /// factor into a polarization vector times a position vector.
    pub fn determinant(&self) -> Complex64 {
        self.amps.determinant()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        PolPosState {
            amps: self.amps * factor,
        }
    }

    pub fn apply_position(&self, op: &PositionOperator) -> Self {
        PolPosState {
            amps: op.mat * self.amps,
        }
    }

    pub fn apply_polarization(&self, op: &PolarizationOperator) -> Self {
        PolPosState {
            amps: self.amps * op.mat.transpose(),
        }
    }
}

pub fn initial_state() -> PolPosState {
    PolPosState::initial()
}

pub fn apply_position_op(s: &PolPosState, op: &PositionOperator) -> PolPosState {
    s.apply_position(op)
}

pub fn apply_polarization_op(s: &PolPosState, op: &PolarizationOperator) -> PolPosState {
    s.apply_polarization(op)
}

/// A 2x2 operator on the beam (row) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionOperator {
    pub mat: Mat2,
    pub lossless: bool,
}

impl PositionOperator {
    pub fn new(mat: Mat2) -> Self {
        PositionOperator {
            mat,
            lossless: false,
        }
    }

    pub fn identity() -> Self {
        PositionOperator {
            mat: Mat2::identity(),
            lossless: true,
        }
    }

    pub fn then(&self, next: &PositionOperator) -> PositionOperator {
        PositionOperator {
            mat: next.mat * self.mat,
            lossless: self.lossless && next.lossless,
        }
    }
}

/// A 2x2 operator on the circular-polarization (column) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationOperator {
    pub mat: Mat2,
}

impl PolarizationOperator {
    pub fn identity() -> Self {
        PolarizationOperator {
            mat: Mat2::identity(),
        }
    }

    /// The same operator expressed in the linear `{e_h, e_v}` basis.
    pub fn linear_matrix(&self) -> Mat2 {
        let u = circular_to_linear_basis();
        u * self.mat * u.adjoint()
    }
}

/// Columns are `sigma+` and `sigma-` written in `{e_h, e_v}` coordinates.
fn circular_to_linear_basis() -> Mat2 {
    let s = FRAC_1_SQRT_2;
    Mat2::new(c(s, 0.0), c(s, 0.0), c(0.0, s), c(0.0, -s))
}

/// Beam splitter phases `theta1..theta4` of
/// `[[r e^{i th1}, t e^{i th2}], [t e^{i th3}, r e^{i th4}]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterPhases(pub [f64; 4]);

impl Default for BeamSplitterPhases {
    /// `theta2 = theta3 = 0`, `theta1 = theta4 = -pi/2`.
    fn default() -> Self {
        BeamSplitterPhases([-FRAC_PI_2, 0.0, 0.0, -FRAC_PI_2])
    }
}

impl BeamSplitterPhases {
    pub fn is_default(&self) -> bool {
        *self == BeamSplitterPhases::default()
    }

    /// `theta2 - theta1 + theta3 - theta4`.
    pub fn lossless_combination(&self) -> f64 {
        let [t1, t2, t3, t4] = self.0;
        t2 - t1 + t3 - t4
    }

    pub fn satisfy_lossless(&self) -> bool {
        let d = (self.lossless_combination() - PI).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= 1e-12
    }
}

fn splitter_matrix(r: f64, t: f64, phases: &BeamSplitterPhases) -> Mat2 {
    let [t1, t2, t3, t4] = phases.0;
    Mat2::new(cis(t1) * r, cis(t2) * t, cis(t3) * t, cis(t4) * r)
}

/// Beam splitter with reflection coefficient `r` and `t = sqrt(1 - r^2)`.
///
/// With `require_lossless` the phases must satisfy
/// `theta2 - theta1 + theta3 - theta4 = pi (mod 2pi)`.
pub fn beam_splitter(
    r: f64,
    phases: &BeamSplitterPhases,
    require_lossless: bool,
) -> Result<PositionOperator> {
    if !(0.0..=1.0).contains(&r) {
        return Err(BenchError::ReflectivityOutOfRange(r));
    }
    let lossless = phases.satisfy_lossless();
    if require_lossless && !lossless {
        return Err(BenchError::LossyPhases(phases.lossless_combination()));
    }
    let t = (1.0 - r * r).max(0.0).sqrt();
    Ok(PositionOperator {
        mat: splitter_matrix(r, t, phases),
        lossless,
    })
}

/// Beam splitter parameterised by an angle, `r = sin(phi)`, `t = cos(phi)`.
///
/// Angles outside `[0, pi/2]` give signed coefficients; the matrix stays
/// unitary whenever the phases satisfy the lossless constraint.
pub fn beam_splitter_from_angle(phi: f64, phases: &BeamSplitterPhases) -> PositionOperator {
    PositionOperator {
        mat: splitter_matrix(phi.sin(), phi.cos(), phases),
        lossless: phases.satisfy_lossless(),
    }
}

/// Polarization rotation by `beta`: `e_h -> cos(b) e_h - sin(b) e_v`,
/// `e_v -> sin(b) e_h + cos(b) e_v`. Diagonal in the circular basis.
pub fn hwp_rotation(beta: f64) -> PolarizationOperator {
    PolarizationOperator {
        mat: Mat2::new(cis(beta), c(0.0, 0.0), c(0.0, 0.0), cis(-beta)),
    }
}

/// Beam interchange after the medium; equal to the parity operator on the
/// position basis.
pub fn mirror_swap() -> PositionOperator {
    PositionOperator {
        mat: linalg::sigma_x(),
        lossless: true,
    }
}

/// Circular `(c+, c-)` to linear `(a_h, a_v)` amplitudes.
#[inline]
pub fn circular_to_linear(plus: Complex64, minus: Complex64) -> (Complex64, Complex64) {
    (
        (plus + minus) * FRAC_1_SQRT_2,
        (plus - minus) * c(0.0, FRAC_1_SQRT_2),
    )
}

#[inline]
pub fn linear_to_circular(h: Complex64, v: Complex64) -> (Complex64, Complex64) {
    let iv = v * c(0.0, 1.0);
    ((h - iv) * FRAC_1_SQRT_2, (h + iv) * FRAC_1_SQRT_2)
}

/// Intensities at the four detector ports (beam x linear polarization).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub w_uh: f64,
    pub w_uv: f64,
    pub w_lh: f64,
    pub w_lv: f64,
}

impl DetectionRecord {
    pub fn new(w_uh: f64, w_uv: f64, w_lh: f64, w_lv: f64) -> Self {
        DetectionRecord {
            w_uh,
            w_uv,
            w_lh,
            w_lv,
        }
    }

    pub fn total(&self) -> f64 {
        self.w_uh + self.w_uv + self.w_lh + self.w_lv
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.w_uh, self.w_uv, self.w_lh, self.w_lv]
    }
}

/// Polarizing beam splitters on both beams: project each row onto `e_h` and
/// `e_v` and record `|a|^2`.
pub fn pbs_intensities(s: &PolPosState) -> DetectionRecord {
    let row = |n: usize| {
        let (h, v) = circular_to_linear(s.amps[(n, PLUS)], s.amps[(n, MINUS)]);
        (h.norm_sqr(), v.norm_sqr())
    };
    let (w_uh, w_uv) = row(UPPER);
    let (w_lh, w_lv) = row(LOWER);
    DetectionRecord {
        w_uh,
        w_uv,
        w_lh,
        w_lv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        max_abs_diff(a, b) <= tol
    }

    fn arb_state() -> impl Strategy<Value = PolPosState> {
        proptest::collection::vec(-3.0f64..3.0, 8).prop_map(|v| {
            PolPosState::new(Mat2::new(
                c(v[0], v[1]),
                c(v[2], v[3]),
                c(v[4], v[5]),
                c(v[6], v[7]),
            ))
        })
    }

    #[test]
    fn initial_state_is_identity_and_inseparable() {
        let s = initial_state();
        assert_eq!(s.amps, Mat2::identity());
        assert_eq!(s.total_intensity(), 2.0);
        assert!((s.determinant().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_state_splits_evenly_at_the_pbs() {
        let w = pbs_intensities(&initial_state());
        for x in w.as_array() {
            assert!((x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn swap_on_initial_state() {
        let s = apply_position_op(&initial_state(), &mirror_swap());
        assert_eq!(s.amps, linalg::sigma_x());
    }

    #[test]
    fn balanced_splitter_on_initial_state() {
        let bs = beam_splitter(FRAC_1_SQRT_2, &BeamSplitterPhases::default(), true).unwrap();
        let s = apply_position_op(&initial_state(), &bs);
        let h = FRAC_1_SQRT_2;
        let want = Mat2::new(c(0.0, -h), c(h, 0.0), c(h, 0.0), c(0.0, -h));
        assert!(close(&s.amps, &want, 1e-15));
    }

    #[test]
    fn splitter_limits() {
        let p = BeamSplitterPhases::default();
        let full = beam_splitter(1.0, &p, true).unwrap();
        let want = Mat2::new(c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
        assert!(close(&full.mat, &want, 1e-15));
        let none = beam_splitter(0.0, &p, true).unwrap();
        assert!(close(&none.mat, &linalg::sigma_x(), 1e-15));
    }

    #[test]
    fn splitter_rejects_bad_input() {
        let p = BeamSplitterPhases::default();
        assert_eq!(
            beam_splitter(1.2, &p, false),
            Err(BenchError::ReflectivityOutOfRange(1.2))
        );
        assert!(beam_splitter(-0.1, &p, false).is_err());
        let lossy = BeamSplitterPhases([0.0; 4]);
        assert!(matches!(
            beam_splitter(0.5, &lossy, true),
            Err(BenchError::LossyPhases(_))
        ));
        let op = beam_splitter(0.5, &lossy, false).unwrap();
        assert!(!op.lossless);
    }

    #[test]
    fn lossless_constraint_modulo_two_pi() {
        assert!(BeamSplitterPhases([0.0, PI, 2.0 * PI, 0.0]).satisfy_lossless());
        assert!(BeamSplitterPhases([0.0, -PI, 0.0, 0.0]).satisfy_lossless());
    }

    #[test]
    fn hwp_values() {
        assert!(close(&hwp_rotation(0.0).mat, &Mat2::identity(), 0.0));
        let q = hwp_rotation(FRAC_PI_2).mat;
        let want = Mat2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
        assert!(close(&q, &want, 1e-15));
        let s = apply_polarization_op(&initial_state(), &hwp_rotation(0.3));
        assert!(close(&s.amps, &hwp_rotation(0.3).mat, 1e-15));
    }

    #[test]
    fn hwp_in_linear_basis_is_the_stated_rotation() {
        for beta in [0.0, 0.2, FRAC_PI_4, 1.0, 2.5, -0.7] {
            let (s, co) = beta.sin_cos();
            // Columns are the images of e_h and e_v.
            let want = Mat2::new(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0));
            assert!(close(&hwp_rotation(beta).linear_matrix(), &want, 1e-12));
        }
    }

    #[test]
    fn pure_horizontal_on_upper_beam() {
        let h = FRAC_1_SQRT_2;
        let s = PolPosState::new(Mat2::new(c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        let w = pbs_intensities(&s);
        assert!((w.w_uh - 1.0).abs() < 1e-15);
        assert!(w.w_uv.abs() < 1e-15 && w.w_lh == 0.0 && w.w_lv == 0.0);
    }

    #[test]
    fn circular_upper_only() {
        let s = PolPosState::new(Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        let w = pbs_intensities(&s);
        assert!((w.w_uh - 0.5).abs() < 1e-15 && (w.w_uv - 0.5).abs() < 1e-15);
        assert_eq!((w.w_lh, w.w_lv), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn pbs_conserves_intensity(s in arb_state()) {
            let w = pbs_intensities(&s);
            prop_assert!((w.total() - s.total_intensity()).abs() <= 1e-12 * s.total_intensity().max(1.0));
        }

        #[test]
        fn basis_round_trip(re1 in -5.0f64..5.0, im1 in -5.0f64..5.0, re2 in -5.0f64..5.0, im2 in -5.0f64..5.0) {
            let (p, m) = (c(re1, im1), c(re2, im2));
            let (h, v) = circular_to_linear(p, m);
            let (p2, m2) = linear_to_circular(h, v);
            prop_assert!((p - p2).norm() < 1e-12 && (m - m2).norm() < 1e-12);
        }

        #[test]
        fn splitter_is_unitary(r in 0.0f64..=1.0) {
            let bs = beam_splitter(r, &BeamSplitterPhases::default(), true).unwrap();
            prop_assert!(linalg::is_unitary(&bs.mat, 1e-12));
        }

        #[test]
        fn angle_splitter_is_unitary(phi in -7.0f64..7.0) {
            let bs = beam_splitter_from_angle(phi, &BeamSplitterPhases::default());
            prop_assert!(bs.lossless && linalg::is_unitary(&bs.mat, 1e-12));
        }

        #[test]
        fn rotations_compose(b1 in -4.0f64..4.0, b2 in -4.0f64..4.0, s in arb_state()) {
            let two = s.apply_polarization(&hwp_rotation(b1)).apply_polarization(&hwp_rotation(b2));
            let one = s.apply_polarization(&hwp_rotation(b1 + b2));
            prop_assert!(close(&two.amps, &one.amps, 1e-12));
        }

        #[test]
        fn polarization_and_position_ops_commute(
            b in -4.0f64..4.0, r in 0.0f64..=1.0, s in arb_state()
        ) {
            let bs = beam_splitter(r, &BeamSplitterPhases::default(), true).unwrap();
            let rot = hwp_rotation(b);
            let a = s.apply_position(&bs).apply_polarization(&rot);
            let z = s.apply_polarization(&rot).apply_position(&bs);
            prop_assert!(close(&a.amps, &z.amps, 1e-12));
        }
    }

    #[test]
    fn identity_ops_leave_state_unchanged() {
        let s = PolPosState::new(Mat2::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.0), c(0.0, -4.0)));
        assert_eq!(s.apply_position(&PositionOperator::identity()), s);
        assert_eq!(s.apply_polarization(&PolarizationOperator::identity()), s);
    }

    #[test]
    fn swap_twice_is_identity() {
        let sw = mirror_swap();
        assert_eq!(sw.then(&sw).mat, Mat2::identity());
    }
}
