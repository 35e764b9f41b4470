//! The composed bench: inseparable source, beam splitter, PT medium, beam
//! swap, polarization rotation and four-port detection.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::medium::{self, PTMediumParams};
use crate::optimize::{self, AscentOptions};
use crate::state::{
    beam_splitter_from_angle, hwp_rotation, mirror_swap, pbs_intensities, BeamSplitterPhases,
    PolPosState, PositionOperator,
};

pub use crate::state::DetectionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumPosition {
    #[default]
    AfterBs,
    /// Medium (and swap) placed in front of the beam splitter.
    BeforeBs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Beam splitter angle: `r = sin(bs_angle)`, `t = cos(bs_angle)`.
    pub bs_angle: f64,
    pub bs_phases: BeamSplitterPhases,
    /// Polarization rotation angle beta.
    pub hwp_angle: f64,
    pub medium: PTMediumParams,
    pub medium_position: MediumPosition,
    /// Beam interchange after the medium.
    pub mirror_swap: bool,
}

impl ExperimentSettings {
    pub fn new(medium: PTMediumParams, bs_angle: f64, hwp_angle: f64) -> Self {
        ExperimentSettings {
            bs_angle,
            bs_phases: BeamSplitterPhases::default(),
            hwp_angle,
            medium,
            medium_position: MediumPosition::AfterBs,
            mirror_swap: true,
        }
    }

    /// Settings with reflection coefficient `r` in `[0, 1]`.
    pub fn with_reflectivity(medium: PTMediumParams, r: f64, hwp_angle: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(BenchError::ReflectivityOutOfRange(r));
        }
        Ok(Self::new(medium, r.asin(), hwp_angle))
    }

    pub fn reflectivity(&self) -> f64 {
        self.bs_angle.sin()
    }

    pub fn transmissivity(&self) -> f64 {
        self.bs_angle.cos()
    }

    fn with_bs_angle(&self, bs_angle: f64) -> Self {
        ExperimentSettings { bs_angle, ..*self }
    }

    fn with_hwp_angle(&self, hwp_angle: f64) -> Self {
        ExperimentSettings { hwp_angle, ..*self }
    }
}

/// `sigma_x M_opt(L)` (or just `M_opt(L)` with the swap disabled).
fn medium_operator(s: &ExperimentSettings) -> Result<PositionOperator> {
    let m = PositionOperator::new(medium::m_opt_analytic(&s.medium)?);
    Ok(if s.mirror_swap { m.then(&mirror_swap()) } else { m })
}

/// Runs the bench on an arbitrary input state.
pub fn run_bench_from(input: &PolPosState, s: &ExperimentSettings) -> Result<DetectionRecord> {
    let bs = beam_splitter_from_angle(s.bs_angle, &s.bs_phases);
    let med = medium_operator(s)?;
    let position = match s.medium_position {
        MediumPosition::AfterBs => bs.then(&med),
        MediumPosition::BeforeBs => med.then(&bs),
    };
    let out = input
        .apply_position(&position)
        .apply_polarization(&hwp_rotation(s.hwp_angle));
    Ok(pbs_intensities(&out))
}

pub fn run_bench(s: &ExperimentSettings) -> Result<DetectionRecord> {
    run_bench_from(&PolPosState::initial(), s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub p_uh: f64,
    pub p_uv: f64,
    pub p_lh: f64,
    pub p_lv: f64,
    /// Polarization marginals.
    pub pa_h: f64,
    pub pa_v: f64,
    /// Position marginals.
    pub pb_u: f64,
    pub pb_l: f64,
}

impl ProbabilityTable {
    pub fn joint(&self) -> [f64; 4] {
        [self.p_uh, self.p_uv, self.p_lh, self.p_lv]
    }

    /// `P(u,h) - P(u,v) - P(l,h) + P(l,v)`.
    pub fn correlation(&self) -> f64 {
        self.p_uh - self.p_uv - self.p_lh + self.p_lv
    }
}

pub fn probabilities(d: &DetectionRecord) -> Result<ProbabilityTable> {
    let total = d.total();
    if !(total > 0.0) {
        return Err(BenchError::ZeroIntensity);
    }
    let (p_uh, p_uv, p_lh, p_lv) = (d.w_uh / total, d.w_uv / total, d.w_lh / total, d.w_lv / total);
    Ok(ProbabilityTable {
        p_uh,
        p_uv,
        p_lh,
        p_lv,
        pa_h: p_uh + p_lh,
        pa_v: p_uv + p_lv,
        pb_u: p_uh + p_uv,
        pb_l: p_lh + p_lv,
    })
}

pub fn bench_probabilities(s: &ExperimentSettings) -> Result<ProbabilityTable> {
    probabilities(&run_bench(s)?)
}

/// Closed-form polarization marginals `(P_A(h), P_A(v))`:
///
/// `P_A(h) = 1/2 - sin(a) [r^2 sin(2b - phi2) - t^2 sin(2b + phi2)] / (1 + sin^2 a)`.
///
/// Only valid for the default splitter phases with the medium after the
/// splitter.
pub fn p_single_closed_form(s: &ExperimentSettings) -> Result<(f64, f64)> {
    if !s.bs_phases.is_default() {
        return Err(BenchError::ClosedFormInapplicable(
            "non-default beam splitter phases",
        ));
    }
    if s.medium_position != MediumPosition::AfterBs {
        return Err(BenchError::ClosedFormInapplicable("medium before the splitter"));
    }
    let sa = medium::derive(&s.medium)?.alpha.sin();
    let (r2, t2) = (s.reflectivity().powi(2), s.transmissivity().powi(2));
    let two_beta = 2.0 * s.hwp_angle;
    let phi2 = s.medium.phi2;
    let bracket = r2 * (two_beta - phi2).sin() - t2 * (two_beta + phi2).sin();
    let pa_h = 0.5 - sa * bracket / (1.0 + sa * sa);
    Ok((pa_h, 1.0 - pa_h))
}

/// Detector intensities as printed alongside the marginal formula, in the
/// unnormalised circular basis:
/// `W = (1 + sin^2 a)/cos^2 a -+ r t sin(2b) -+ I`, ordered (uh, uv, lh, lv).
pub fn printed_intensities(s: &ExperimentSettings) -> Result<DetectionRecord> {
    let sa = medium::derive(&s.medium)?.alpha.sin();
    let ca2 = 1.0 - sa * sa;
    let (r, t) = (s.reflectivity(), s.transmissivity());
    let two_beta = 2.0 * s.hwp_angle;
    let phi2 = s.medium.phi2;
    let base = (1.0 + sa * sa) / ca2;
    let rt = r * t * two_beta.sin();
    let cross = sa * (r * r * (two_beta - phi2).sin() - t * t * (two_beta + phi2).sin()) / ca2;
    Ok(DetectionRecord::new(
        base + rt - cross,
        base - rt + cross,
        base - rt - cross,
        base + rt + cross,
    ))
}

/// `|P_A(h; phi_a) - P_A(h; phi_b)|` from the full pipeline, the other
/// settings taken from `template`.
pub fn signaling_delta_in(template: &ExperimentSettings, phi_a: f64, phi_b: f64) -> Result<f64> {
    let a = bench_probabilities(&template.with_bs_angle(phi_a))?;
    let b = bench_probabilities(&template.with_bs_angle(phi_b))?;
    Ok((a.pa_h - b.pa_h).abs())
}

/// Change of the polarization marginal between two beam splitter angles.
pub fn signaling_delta(medium: &PTMediumParams, beta: f64, phi_a: f64, phi_b: f64) -> Result<f64> {
    signaling_delta_in(&ExperimentSettings::new(*medium, 0.0, beta), phi_a, phi_b)
}

pub fn chsh_c_in(template: &ExperimentSettings, phi: f64, beta: f64) -> Result<f64> {
    let s = template.with_bs_angle(phi).with_hwp_angle(beta);
    Ok(bench_probabilities(&s)?.correlation())
}

/// Correlation `C(phi, beta)` for splitter angle `phi` and rotation `beta`.
pub fn chsh_c(phi: f64, beta: f64, medium: &PTMediumParams) -> Result<f64> {
    chsh_c_in(&ExperimentSettings::new(*medium, 0.0, 0.0), phi, beta)
}

fn s_combination(c11: f64, c12: f64, c21: f64, c22: f64) -> f64 {
    (c11 + c12 + c21 - c22).abs()
}

pub fn chsh_s_in(template: &ExperimentSettings, angles: [f64; 4]) -> Result<f64> {
    let [phi1, beta1, phi2, beta2] = angles;
    let c = |p, b| chsh_c_in(template, p, b);
    Ok(s_combination(
        c(phi1, beta1)?,
        c(phi1, beta2)?,
        c(phi2, beta1)?,
        c(phi2, beta2)?,
    ))
}

/// `|C(phi1,beta1) + C(phi1,beta2) + C(phi2,beta1) - C(phi2,beta2)|`.
///
/// `phi1`, `phi2` are splitter angles, not medium phases.
pub fn chsh_s(phi1: f64, beta1: f64, phi2: f64, beta2: f64, medium: &PTMediumParams) -> Result<f64> {
    chsh_s_in(
        &ExperimentSettings::new(*medium, 0.0, 0.0),
        [phi1, beta1, phi2, beta2],
    )
}

/// `2 cos^2(a) / (1 + sin^2(a))`.
pub fn chsh_bound(medium: &PTMediumParams) -> Result<f64> {
    let sa = medium::derive(medium)?.alpha.sin();
    Ok(2.0 * (1.0 - sa * sa) / (1.0 + sa * sa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshMax {
    pub s_max: f64,
    /// `[phi1, beta1, phi2, beta2]` at the maximum.
    pub settings: [f64; 4],
    /// Best value on the coarse grid before refinement.
    pub grid_s_max: f64,
}

pub const DEFAULT_RESOLUTION: usize = 50;

/// Grid search over `[0, pi)^4` followed by coordinate-ascent refinement.
pub fn max_chsh_in(template: &ExperimentSettings, resolution: usize) -> Result<ChshMax> {
    medium::derive(&template.medium)?;
    let n = resolution.max(2);
    let angles = optimize::grid(0.0, PI, n, false);

    // Correlation table c[i][j] = C(angles[i], angles[j]).
    let table: Vec<Vec<f64>> = angles
        .par_iter()
        .map(|&phi| {
            angles
                .iter()
                .map(|&beta| chsh_c_in(template, phi, beta))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // Best (value, flat index) per phi1 row, reduced in index order.
    let row_best: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = s_combination(table[i][j], table[i][l], table[k][j], table[k][l]);
                        if v > best.0 {
                            best = (v, ((i * n + j) * n + k) * n + l);
                        }
                    }
                }
            }
            best
        })
        .collect();
    let (grid_s_max, flat) = row_best
        .iter()
        .fold((f64::NEG_INFINITY, 0), |acc, &b| if b.0 > acc.0 { b } else { acc });
    let idx = [flat / (n * n * n), (flat / (n * n)) % n, (flat / n) % n, flat % n];
    let start: Vec<f64> = idx.iter().map(|&i| angles[i]).collect();

    let step = PI / n as f64;
    let opts = AscentOptions {
        bracket: step,
        ..AscentOptions::default()
    };
    let objective = |x: &[f64]| {
        chsh_s_in(template, [x[0], x[1], x[2], x[3]]).unwrap_or(f64::NEG_INFINITY)
    };
    let (x, s_max) = optimize::coordinate_ascent(objective, &start, &opts);
    Ok(ChshMax {
        s_max,
        settings: [
            x[0].rem_euclid(PI),
            x[1].rem_euclid(PI),
            x[2].rem_euclid(PI),
            x[3].rem_euclid(PI),
        ],
        grid_s_max,
    })
}

pub fn max_chsh(medium: &PTMediumParams, resolution: usize) -> Result<ChshMax> {
    max_chsh_in(&ExperimentSettings::new(*medium, 0.0, 0.0), resolution)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationMax {
    pub delta: f64,
    pub beta: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

/// Largest signaling delta over the rotation angle and pairs of splitter
/// angles in `[0, pi/2]` (all reflectivities in `[0, 1]`).
pub fn max_violation_in(template: &ExperimentSettings, resolution: usize) -> Result<ViolationMax> {
    medium::derive(&template.medium)?;
    let n = resolution.max(2);
    let betas = optimize::grid(0.0, PI, n, false);
    let phis = optimize::grid(0.0, FRAC_PI_2, n, true);

    let per_beta: Vec<(f64, usize, usize)> = betas
        .par_iter()
        .map(|&beta| {
            let s = template.with_hwp_angle(beta);
            let pa: Vec<f64> = phis
                .iter()
                .map(|&phi| bench_probabilities(&s.with_bs_angle(phi)).map(|p| p.pa_h))
                .collect::<Result<_>>()?;
            let hi = optimize::argmax(&pa).unwrap_or(0);
            let neg: Vec<f64> = pa.iter().map(|x| -x).collect();
            let lo = optimize::argmax(&neg).unwrap_or(0);
            Ok((pa[hi] - pa[lo], hi.min(lo), hi.max(lo)))
        })
        .collect::<Result<_>>()?;
    let best_beta = optimize::argmax(&per_beta.iter().map(|b| b.0).collect::<Vec<_>>()).unwrap_or(0);
    let (_, ia, ib) = per_beta[best_beta];

    let opts = AscentOptions {
        bracket: PI / n as f64,
        ..AscentOptions::default()
    };
    let objective = |x: &[f64]| {
        signaling_delta_in(&template.with_hwp_angle(x[0]), x[1], x[2]).unwrap_or(f64::NEG_INFINITY)
    };
    let (x, delta) =
        optimize::coordinate_ascent(objective, &[betas[best_beta], phis[ia], phis[ib]], &opts);
    Ok(ViolationMax {
        delta,
        beta: x[0].rem_euclid(PI),
        phi_a: x[1],
        phi_b: x[2],
    })
}

pub fn max_violation(medium: &PTMediumParams, resolution: usize) -> Result<ViolationMax> {
    max_violation_in(&ExperimentSettings::new(*medium, 0.0, 0.0), resolution)
}
