//! Split-step Fourier solver for the coupled paraxial equations
//!
//! ```text
//! i dE_u/dz = -(1/2k) d^2E_u/dx^2 + eta1 e^{ i phi1} E_u + eta2 e^{ i phi2} E_l
//! i dE_l/dz = -(1/2k) d^2E_l/dx^2 + eta1 e^{-i phi1} E_l + eta2 e^{-i phi2} E_u
//! ```
//!
//! on a periodic 1-D transverse grid. Each step is a symmetric (Strang)
//! splitting: half a diffraction step in the spectral domain, the full local
//! coupling step `exp(-i H dz)` applied pointwise, and another half
//! diffraction step.
//!
//! Inside the medium both channels share the same transverse coordinate; the
//! displaced Gaussians of [`gaussian_profiles`] only serve to check the
//! orthogonality and parity constructions of the two-beam basis.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::bench::{self, ExperimentSettings, MediumPosition, ProbabilityTable};
use crate::error::{BenchError, Result};
use crate::linalg::{c, Mat2};
use crate::medium::{self, PTMediumParams};
use crate::output;
use crate::state::{
    beam_splitter_from_angle, circular_to_linear, hwp_rotation, mirror_swap, PositionOperator,
    DetectionRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseGrid {
    pub n: usize,
    pub half_width: f64,
}

impl TransverseGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(BenchError::InvalidGrid(format!(
                "N = {n} must be a power of two >= 64"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(BenchError::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        Ok(TransverseGrid { n, half_width })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// `x_j = (j - N/2) dx`, so that `x_{N-j} = -x_j` exactly.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Index of `-x_j` under periodic wrap.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Angular spatial frequency of FFT bin `j`.
    pub fn kx(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let j = j as i64;
        let m = if j < n / 2 { j } else { j - n };
        2.0 * PI * m as f64 / (self.n as f64 * self.dx())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransverseField {
    pub e_u: Vec<Complex64>,
    pub e_l: Vec<Complex64>,
}

impl TransverseField {
    pub fn new(e_u: Vec<Complex64>, e_l: Vec<Complex64>) -> Result<Self> {
        if e_u.len() != e_l.len() {
            return Err(BenchError::LengthMismatch(e_u.len(), e_l.len()));
        }
        Ok(TransverseField { e_u, e_l })
    }

    /// Both channels carry `profile`, scaled by the amplitudes `(a_u, a_l)`.
    pub fn from_profile(profile: &[Complex64], a_u: Complex64, a_l: Complex64) -> Self {
        TransverseField {
            e_u: profile.iter().map(|p| p * a_u).collect(),
            e_l: profile.iter().map(|p| p * a_l).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.e_u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_u.is_empty()
    }

    pub fn swapped(&self) -> Self {
        TransverseField {
            e_u: self.e_l.clone(),
            e_l: self.e_u.clone(),
        }
    }

    /// Applies a 2x2 channel operator at every grid point.
    pub fn apply_channel_op(&mut self, m: &Mat2) {
        for (u, l) in self.e_u.iter_mut().zip(self.e_l.iter_mut()) {
            let (a, b) = (*u, *l);
            *u = m[(0, 0)] * a + m[(0, 1)] * b;
            *l = m[(1, 0)] * a + m[(1, 1)] * b;
        }
    }
}

fn gaussian(x: f64, centre: f64, w: f64) -> f64 {
    (-((x - centre) / w).powi(2)).exp()
}

/// `E_u = exp(-(x - x0)^2/w^2)`, `E_l = exp(-(x + x0)^2/w^2)`.
///
/// Both channels are divided by the same factor, the root mean of their two
/// discrete norms, so that `E_u(-x_j) = E_l(x_j)` holds bit for bit. Each
/// then has unit norm up to the single unpaired endpoint sample.
pub fn gaussian_profiles(x0: f64, w: f64, grid: &TransverseGrid) -> Result<TransverseField> {
    if !(w > 0.0) {
        return Err(BenchError::InvalidGrid(format!("beam waist {w} must be positive")));
    }
    let needed = 3.0 * (x0.abs() + w);
    if !(needed < grid.half_width) {
        return Err(BenchError::DomainTooSmall {
            needed,
            half_width: grid.half_width,
        });
    }
    let xs = grid.xs();
    let e_u: Vec<f64> = xs.iter().map(|&x| gaussian(x, x0, w)).collect();
    let e_l: Vec<f64> = xs.iter().map(|&x| gaussian(x, -x0, w)).collect();
    let norm2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>() * grid.dx();
    let scale = ((norm2(&e_u) + norm2(&e_l)) / 2.0).sqrt();
    let to_c = |v: Vec<f64>| v.into_iter().map(|a| c(a / scale, 0.0)).collect();
    Ok(TransverseField {
        e_u: to_c(e_u),
        e_l: to_c(e_l),
    })
}

/// Unit-norm Gaussian `exp(-x^2/w^2)` centred on the grid.
pub fn centred_gaussian(w: f64, grid: &TransverseGrid) -> Result<Vec<Complex64>> {
    Ok(gaussian_profiles(0.0, w, grid)?.e_u)
}

/// `sum conj(a) b dx`.
pub fn overlap(a: &[Complex64], b: &[Complex64], grid: &TransverseGrid) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(BenchError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * grid.dx())
}

pub fn norm_sqr(a: &[Complex64], grid: &TransverseGrid) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx()
}

/// Per-channel intensities `(I_u, I_l)`.
pub fn aggregate_channels(f: &TransverseField, grid: &TransverseGrid) -> (f64, f64) {
    (norm_sqr(&f.e_u, grid), norm_sqr(&f.e_l, grid))
}

/// `2 sqrt(<(x - <x>)^2>)` of `|a|^2`; equals `w` for `exp(-x^2/w^2)`.
pub fn rms_width(a: &[Complex64], grid: &TransverseGrid) -> f64 {
    let weights: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let xs = grid.xs();
    let mean = weights.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / total;
    let var = weights
        .iter()
        .zip(&xs)
        .map(|(w, x)| w * (x - mean).powi(2))
        .sum::<f64>()
        / total;
    2.0 * var.sqrt()
}

/// Width of a free Gaussian beam `exp(-x^2/w^2)` after distance `z`.
pub fn free_gaussian_width(w: f64, k: f64, z: f64) -> f64 {
    w * (1.0 + (2.0 * z / (k * w * w)).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// Wave number.
    pub k: f64,
    /// Longest allowed step; the actual step divides the distance evenly.
    pub dz: f64,
    pub medium: PTMediumParams,
    pub include_diffraction: bool,
}

impl PropagationConfig {
    pub fn new(k: f64, dz: f64, medium: PTMediumParams, include_diffraction: bool) -> Self {
        PropagationConfig {
            k,
            dz,
            medium,
            include_diffraction,
        }
    }

    /// Step `L/1000` for the medium's length; requires the unbroken phase.
    pub fn for_medium(k: f64, medium: PTMediumParams, include_diffraction: bool) -> Result<Self> {
        let length = medium::derive(&medium)?.length;
        Ok(Self::new(k, length / 1000.0, medium, include_diffraction))
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(BenchError::InvalidPropagation(format!("k = {} must be positive", self.k)));
        }
        if !(self.dz > 0.0) || !self.dz.is_finite() {
            return Err(BenchError::InvalidPropagation(format!("dz = {} must be positive", self.dz)));
        }
        Ok(())
    }
}

/// Split-step propagator with FFT plans and spectral multipliers prepared
/// for one grid and configuration.
pub struct SplitStep {
    grid: TransverseGrid,
    cfg: PropagationConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitStep {
    pub fn new(grid: TransverseGrid, cfg: PropagationConfig) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(SplitStep {
            grid,
            cfg,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
        })
    }

    /// `exp(-i kx^2 dz / (2k))` per FFT bin, with the inverse FFT's 1/N folded in.
    fn diffraction_multiplier(&self, dz: f64) -> Vec<Complex64> {
        let inv_n = 1.0 / self.grid.n as f64;
        (0..self.grid.n)
            .map(|j| {
                let kx = self.grid.kx(j);
                Complex64::from_polar(inv_n, -kx * kx * dz / (2.0 * self.cfg.k))
            })
            .collect()
    }

    fn diffract(&mut self, channel: &mut [Complex64], multiplier: &[Complex64]) {
        self.forward.process_with_scratch(channel, &mut self.scratch);
        for (a, m) in channel.iter_mut().zip(multiplier) {
            *a *= m;
        }
        self.inverse.process_with_scratch(channel, &mut self.scratch);
    }

    fn diffract_both(&mut self, f: &mut TransverseField, multiplier: &[Complex64]) {
        self.diffract(&mut f.e_u, multiplier);
        self.diffract(&mut f.e_l, multiplier);
    }

    /// Propagates `f` over distance `z` in `ceil(z/dz)` equal Strang steps.
    pub fn propagate(&mut self, f: &TransverseField, z: f64) -> Result<TransverseField> {
        if f.len() != self.grid.n {
            return Err(BenchError::LengthMismatch(f.len(), self.grid.n));
        }
        if !(z >= 0.0) {
            return Err(BenchError::InvalidPropagation(format!("z = {z} must be >= 0")));
        }
        let mut out = f.clone();
        if z == 0.0 {
            return Ok(out);
        }
        let steps = (z / self.cfg.dz).ceil().max(1.0) as usize;
        let h = z / steps as f64;
        let coupling = medium::m_opt_numeric(&self.cfg.medium, h);

        if !self.cfg.include_diffraction {
            for _ in 0..steps {
                out.apply_channel_op(&coupling);
            }
            return Ok(out);
        }

        // Adjacent half steps of consecutive Strang steps merge into full steps.
        let half = self.diffraction_multiplier(h / 2.0);
        let full = self.diffraction_multiplier(h);
        self.diffract_both(&mut out, &half);
        for step in 0..steps {
            out.apply_channel_op(&coupling);
            let last = step + 1 == steps;
            self.diffract_both(&mut out, if last { &half } else { &full });
        }
        Ok(out)
    }
}

pub fn split_step_propagate(
    f: &TransverseField,
    cfg: &PropagationConfig,
    grid: &TransverseGrid,
    z: f64,
) -> Result<TransverseField> {
    SplitStep::new(*grid, *cfg)?.propagate(f, z)
}

/// Field snapshot as CSV: `x,re_eu,im_eu,re_el,im_el`.
pub fn write_field_csv<W: Write>(
    out: &mut W,
    f: &TransverseField,
    grid: &TransverseGrid,
) -> io::Result<()> {
    output::write_row(out, &["x", "re_eu", "im_eu", "re_el", "im_el"])?;
    for j in 0..f.len() {
        output::write_numeric_row(
            out,
            &[grid.x(j), f.e_u[j].re, f.e_u[j].im, f.e_l[j].re, f.e_l[j].im],
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Diffraction strength as `k w^2 / L`; large values mean weak diffraction.
    pub kw2_over_l: f64,
    pub beam_waist: f64,
    pub include_diffraction: bool,
    /// Strang steps across the medium.
    pub steps: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            kw2_over_l: 1e3,
            beam_waist: 1.0,
            include_diffraction: true,
            steps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixModelReport {
    pub options: ValidationOptions,
    pub grid: TransverseGrid,
    pub matrix_model: ProbabilityTable,
    pub paraxial: ProbabilityTable,
    /// Largest `|P(n,j)|` difference between the two routes.
    pub max_discrepancy: f64,
}

/// Grid wide enough for the beam after diffraction over `length`, with at
/// least eight samples per waist.
pub fn validation_grid(w: f64, k: f64, length: f64) -> Result<TransverseGrid> {
    let w_out = free_gaussian_width(w, k, length);
    let half_width = 12.0 * w_out.max(w);
    let min_n = (2.0 * half_width / (w / 8.0)).ceil() as usize;
    let n = min_n.next_power_of_two().clamp(64, 1 << 20);
    TransverseGrid::new(n, half_width)
}

/// Transverse fields after the medium (and the position elements that follow
/// it), one per circular polarization column of the bench state.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedColumns {
    pub grid: TransverseGrid,
    pub plus: TransverseField,
    pub minus: TransverseField,
}

/// Replaces the closed-form medium step of the bench by paraxial propagation
/// of a centred Gaussian of waist `opts.beam_waist` over the medium length.
pub fn propagate_bench_columns(
    settings: &ExperimentSettings,
    opts: &ValidationOptions,
) -> Result<PropagatedColumns> {
    let length = medium::derive(&settings.medium)?.length;
    if opts.steps == 0 {
        return Err(BenchError::InvalidPropagation("steps must be >= 1".into()));
    }
    if !(opts.kw2_over_l > 0.0) || !(opts.beam_waist > 0.0) {
        return Err(BenchError::InvalidPropagation(
            "kw2_over_l and beam_waist must be positive".into(),
        ));
    }
    let w = opts.beam_waist;
    let k = opts.kw2_over_l * length / (w * w);
    let grid = validation_grid(w, k, length)?;
    let profile = centred_gaussian(w, &grid)?;
    let cfg = PropagationConfig {
        k,
        dz: length / opts.steps as f64,
        medium: settings.medium,
        include_diffraction: opts.include_diffraction,
    };

    let bs = beam_splitter_from_angle(settings.bs_angle, &settings.bs_phases);
    let swap = if settings.mirror_swap {
        mirror_swap()
    } else {
        PositionOperator::identity()
    };
    let (pre, post) = match settings.medium_position {
        MediumPosition::AfterBs => (bs, swap),
        MediumPosition::BeforeBs => (PositionOperator::identity(), swap.then(&bs)),
    };
    let amps = pre.mat;

    let mut solver = SplitStep::new(grid, cfg)?;
    let mut column = |m: usize| -> Result<TransverseField> {
        let f = TransverseField::from_profile(&profile, amps[(0, m)], amps[(1, m)]);
        let mut out = solver.propagate(&f, length)?;
        out.apply_channel_op(&post.mat);
        Ok(out)
    };
    let plus = column(0)?;
    let minus = column(1)?;
    Ok(PropagatedColumns { grid, plus, minus })
}

/// Polarization rotation and four-port detection, each port integrated over `x`.
pub fn detect_columns(cols: &PropagatedColumns, hwp_angle: f64) -> DetectionRecord {
    let rot = hwp_rotation(hwp_angle).mat;
    let (rp, rm) = (rot[(0, 0)], rot[(1, 1)]);
    let mut ports = [0.0f64; 4];
    for j in 0..cols.grid.n {
        let rows = [
            (cols.plus.e_u[j], cols.minus.e_u[j]),
            (cols.plus.e_l[j], cols.minus.e_l[j]),
        ];
        for (row, (plus, minus)) in rows.into_iter().enumerate() {
            let (h, v) = circular_to_linear(plus * rp, minus * rm);
            ports[2 * row] += h.norm_sqr();
            ports[2 * row + 1] += v.norm_sqr();
        }
    }
    let dx = cols.grid.dx();
    DetectionRecord::new(ports[0] * dx, ports[1] * dx, ports[2] * dx, ports[3] * dx)
}

/// Runs the bench once with the closed-form medium operator and once with
/// the medium replaced by paraxial propagation of a transverse Gaussian,
/// integrating each detector port over `x` before normalising.
pub fn validate_matrix_model(
    settings: &ExperimentSettings,
    opts: &ValidationOptions,
) -> Result<MatrixModelReport> {
    let cols = propagate_bench_columns(settings, opts)?;
    let paraxial = bench::probabilities(&detect_columns(&cols, settings.hwp_angle))?;
    let matrix_model = bench::bench_probabilities(settings)?;
    let max_discrepancy = matrix_model
        .joint()
        .iter()
        .zip(paraxial.joint())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(MatrixModelReport {
        options: *opts,
        grid: cols.grid,
        matrix_model,
        paraxial,
        max_discrepancy,
    })
}

/// Channel-amplitude agreement between diffraction-free split-step
/// propagation and the closed-form propagator: returns the largest pointwise
/// deviation of `(E_u, E_l)` from `M_opt(L) (a_u, a_l) g(x)`.
pub fn matrix_model_pointwise_error(
    medium: &PTMediumParams,
    amplitudes: (Complex64, Complex64),
    grid: &TransverseGrid,
    w: f64,
) -> Result<f64> {
    let m = medium::m_opt_analytic(medium)?;
    let length = medium::derive(medium)?.length;
    let profile = centred_gaussian(w, grid)?;
    let f = TransverseField::from_profile(&profile, amplitudes.0, amplitudes.1);
    let cfg = PropagationConfig::for_medium(1.0, *medium, false)?;
    let out = split_step_propagate(&f, &cfg, grid, length)?;
    let mut expect = f;
    expect.apply_channel_op(&m);
    let err = out
        .e_u
        .iter()
        .zip(&expect.e_u)
        .chain(out.e_l.iter().zip(&expect.e_l))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(err)
}

/// `(I_u + I_l)` predicted by the 2x2 model for the canonical input after the
/// splitter: `2 (1 + sin^2 a) / cos^2 a` in units of the input per channel.
pub fn canonical_total_gain(medium: &PTMediumParams) -> Result<f64> {
    let s = medium::derive(medium)?.alpha.sin();
    Ok(2.0 * (1.0 + s * s) / (1.0 - s * s))
}
