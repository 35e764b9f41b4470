//! The local PT-symmetric medium acting on the two-beam position space.
//!
//! The coupling Hamiltonian (diffraction excluded) is
//!
//! ```text
//! H = [[eta1 e^{i phi1},  eta2 e^{i phi2}],
//!      [eta2 e^{-i phi2}, eta1 e^{-i phi1}]]
//! ```
//!
//! which is Hermitian only for `phi1 = 0 (mod pi)` but always invariant under
//! parity (beam swap) combined with complex conjugation. While
//! `eta2 > eta1 |sin phi1|` its spectrum is real and the propagator over the
//! length `L = pi / (2 eta2 cos alpha)` has a simple closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::linalg::{self, c, cis, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PTMediumParams {
    pub eta1: f64,
    pub phi1: f64,
    pub eta2: f64,
    pub phi2: f64,
}

impl PTMediumParams {
    /// Validates magnitudes and wraps both phases into `[0, 2pi)`. The
    /// PT phase is not checked here; see [`PTMediumParams::is_unbroken`].
    pub fn new(eta1: f64, phi1: f64, eta2: f64, phi2: f64) -> Result<Self> {
        if ![eta1, phi1, eta2, phi2].iter().all(|x| x.is_finite()) {
            return Err(BenchError::InvalidMedium("non-finite parameter".into()));
        }
        if eta1 < 0.0 {
            return Err(BenchError::InvalidMedium(format!("eta1 = {eta1} < 0")));
        }
        if eta2 <= 0.0 {
            return Err(BenchError::InvalidMedium(format!("eta2 = {eta2} <= 0")));
        }
        Ok(PTMediumParams {
            eta1,
            phi1: wrap_phase(phi1),
            eta2,
            phi2: wrap_phase(phi2),
        })
    }

    /// Effective medium constants of the two-species rubidium vapour
    /// realisation: `eta1 = 1.91, phi1 = 0.84 pi, eta2 = 36.5, phi2 = 0`.
    pub fn fig2() -> Self {
        PTMediumParams {
            eta1: 1.91,
            phi1: 0.84 * PI,
            eta2: 36.5,
            phi2: 0.0,
        }
    }

    /// No coupling at all. Outside the validated constructor's domain
    /// (`eta2 = 0`); only meaningful for the numerical propagators, e.g. free
    /// diffraction.
    pub fn vacuum() -> Self {
        PTMediumParams {
            eta1: 0.0,
            phi1: 0.0,
            eta2: 0.0,
            phi2: 0.0,
        }
    }

    /// A medium with `sin(alpha) = sin_alpha`, built as
    /// `eta1 = sin_alpha * eta2`, `phi1 = pi/2`.
    pub fn with_sin_alpha(sin_alpha: f64, eta2: f64, phi2: f64) -> Result<Self> {
        if sin_alpha < 0.0 {
            // sin(3pi/2) = -1 keeps eta1 nonnegative.
            Self::new(-sin_alpha * eta2, 1.5 * PI, eta2, phi2)
        } else {
            Self::new(sin_alpha * eta2, 0.5 * PI, eta2, phi2)
        }
    }

    pub fn is_unbroken(&self) -> bool {
        self.eta2 > self.eta1 * self.phi1.sin().abs()
    }

    pub fn is_hermitian(&self) -> bool {
        hamiltonian(self).adjoint() == hamiltonian(self)
    }

    fn broken(&self) -> BenchError {
        BenchError::BrokenPhase {
            eta1: self.eta1,
            phi1: self.phi1,
            eta2: self.eta2,
        }
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs.
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedMedium {
    /// `sin(alpha) = eta1 sin(phi1) / eta2`, `alpha` in `(-pi/2, pi/2)`.
    pub alpha: f64,
    /// Medium length `pi / (2 eta2 cos alpha)`.
    pub length: f64,
    /// `-eta1 cos(phi1) L`.
    pub global_phase: f64,
}

impl DerivedMedium {
    pub fn sin_alpha(&self) -> f64 {
        self.alpha.sin()
    }
}

pub fn hamiltonian(p: &PTMediumParams) -> Mat2 {
    Mat2::new(
        cis(p.phi1) * p.eta1,
        cis(p.phi2) * p.eta2,
        cis(-p.phi2) * p.eta2,
        cis(-p.phi1) * p.eta1,
    )
}

/// `sigma_x conj(H) sigma_x == H` within `1e-12` (scaled by the entry size).
pub fn is_pt_symmetric(h: &Mat2) -> bool {
    let sx = linalg::sigma_x();
    let pt = sx * h.map(|z| z.conj()) * sx;
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    linalg::max_abs_diff(&pt, h) <= 1e-12 * scale
}

pub fn derive(p: &PTMediumParams) -> Result<DerivedMedium> {
    if !p.is_unbroken() {
        return Err(p.broken());
    }
    let alpha = (p.eta1 * p.phi1.sin() / p.eta2).asin();
    let length = PI / (2.0 * p.eta2 * alpha.cos());
    Ok(DerivedMedium {
        alpha,
        length,
        global_phase: -p.eta1 * p.phi1.cos() * length,
    })
}

/// Eigenvalues of the coupling Hamiltonian, solved numerically.
pub fn spectrum(p: &PTMediumParams) -> (Complex64, Complex64) {
    linalg::eigenvalues(&hamiltonian(p))
}

/// `eta1 cos(phi1) +- eta2 cos(alpha)` in the unbroken phase.
pub fn spectrum_closed_form(p: &PTMediumParams) -> Result<(f64, f64)> {
    let d = derive(p)?;
    let centre = p.eta1 * p.phi1.cos();
    let half_gap = p.eta2 * d.alpha.cos();
    Ok((centre + half_gap, centre - half_gap))
}

/// Closed-form propagator `exp(-i H L)` over the medium length.
pub fn m_opt_analytic(p: &PTMediumParams) -> Result<Mat2> {
    let d = derive(p)?;
    let s = d.alpha.sin();
    let pref = cis(d.global_phase) / d.alpha.cos();
    let m = Mat2::new(
        c(s, 0.0),
        cis(p.phi2) * c(0.0, -1.0),
        cis(-p.phi2) * c(0.0, -1.0),
        c(-s, 0.0),
    );
    Ok(m * pref)
}

/// `exp(-i H z)` by scaling and squaring. Defined in either PT phase.
pub fn m_opt_numeric(p: &PTMediumParams, z: f64) -> Mat2 {
    linalg::expm(&(hamiltonian(p) * c(0.0, -z)))
}
