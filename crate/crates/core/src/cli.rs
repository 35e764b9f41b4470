//! Command-line front end for the `ptbench` binary.
//!
//! Every invocation runs exactly one command. Settings come from an optional
//! JSON file (`--config`) overridden by flags; `--dump-config` prints the
//! merged configuration instead of running it. Exit codes: 0 on success, 1
//! on configuration or I/O errors, 2 when the medium is in the broken PT
//! phase.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{self, ExperimentSettings, MediumPosition, DEFAULT_RESOLUTION};
use crate::error::BenchError;
use crate::medium::{self, PTMediumParams};
use crate::optimize;
use crate::output::{fmt_g, write_numeric_row, write_row};
use crate::paraxial::{self, ValidationOptions};
use crate::state::BeamSplitterPhases;

pub const THREADS_ENV: &str = "PTBENCH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[default]
    Bench,
    Scan,
    Chsh,
    Paraxial,
    Preset,
}

/// Inclusive linear range with `steps` samples; a single sample sits at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn single(v: f64) -> Self {
        Range {
            start: v,
            stop: v,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        optimize::grid(self.start, self.stop, self.steps, true)
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        if self.steps < 1 {
            return Err(CliError::Config(format!("{name}: steps must be >= 1")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!("{name}: range must be finite")));
        }
        Ok(())
    }

    fn scaled(self, f: f64) -> Self {
        Range {
            start: self.start * f,
            stop: self.stop * f,
            steps: self.steps,
        }
    }
}

impl FromStr for Range {
    type Err = String;

    /// `value` or `start:stop:steps`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        match parts.as_slice() {
            [v] => Ok(Range::single(num(v)?)),
            [a, b, n] => Ok(Range {
                start: num(a)?,
                stop: num(b)?,
                steps: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
            }),
            _ => Err(format!("expected VALUE or START:STOP:STEPS, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub sin_alpha: Range,
    pub beta: Range,
    pub phi2: Range,
    /// Coupling strength of the scanned media (`eta1 = sin_alpha * eta2`, `phi1 = pi/2`).
    pub eta2: f64,
    /// The two beam splitter angles compared by the signaling delta.
    pub setting_a: f64,
    pub setting_b: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            sin_alpha: Range {
                start: 0.0,
                stop: 0.9,
                steps: 10,
            },
            beta: Range::single(FRAC_PI_4),
            phi2: Range::single(0.0),
            eta2: 1.0,
            setting_a: FRAC_PI_2,
            setting_b: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParaxialConfig {
    pub kw2_over_l: Vec<f64>,
    pub beam_waist: f64,
    pub include_diffraction: bool,
    pub steps: usize,
    /// Optional CSV dump of the sigma+ column field for the first regime.
    pub snapshot: Option<PathBuf>,
}

impl Default for ParaxialConfig {
    fn default() -> Self {
        ParaxialConfig {
            kw2_over_l: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            beam_waist: 1.0,
            include_diffraction: true,
            steps: 1000,
            snapshot: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Command,
    /// Named medium preset; only `fig2` is known. Overrides the eta/phi
    /// values in the same config; medium flags on the command line replace
    /// the preset.
    pub preset: Option<String>,
    pub eta1: f64,
    pub phi1: f64,
    pub eta2: f64,
    pub phi2: f64,
    /// Beam splitter angle, `r = sin(bs_angle)`.
    pub bs_angle: f64,
    pub bs_phases: BeamSplitterPhases,
    pub beta: f64,
    pub medium_position: MediumPosition,
    pub mirror_swap: bool,
    pub grid_resolution: usize,
    pub scan: ScanConfig,
    pub paraxial: ParaxialConfig,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Bench,
            preset: None,
            eta1: 0.5,
            phi1: FRAC_PI_2,
            eta2: 1.0,
            phi2: 0.0,
            bs_angle: FRAC_PI_2,
            bs_phases: BeamSplitterPhases::default(),
            beta: FRAC_PI_4,
            medium_position: MediumPosition::AfterBs,
            mirror_swap: true,
            grid_resolution: DEFAULT_RESOLUTION,
            scan: ScanConfig::default(),
            paraxial: ParaxialConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn medium(&self) -> Result<PTMediumParams, CliError> {
        match self.preset.as_deref() {
            Some(name) => preset_medium(name),
            None => Ok(PTMediumParams::new(self.eta1, self.phi1, self.eta2, self.phi2)?),
        }
    }

    pub fn settings(&self) -> Result<ExperimentSettings, CliError> {
        Ok(ExperimentSettings {
            bs_angle: self.bs_angle,
            bs_phases: self.bs_phases,
            hwp_angle: self.beta,
            medium: self.medium()?,
            medium_position: self.medium_position,
            mirror_swap: self.mirror_swap,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.scan.sin_alpha.validate("sin_alpha")?;
        self.scan.beta.validate("beta")?;
        self.scan.phi2.validate("phi2")?;
        if self.grid_resolution < 2 {
            return Err(CliError::Config("grid_resolution must be >= 2".into()));
        }
        if self.paraxial.steps < 1 {
            return Err(CliError::Config("paraxial steps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bench(BenchError::BrokenPhase { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ptbench", version, about = "Classical PT-symmetric optical bench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Single bench run: intensities, probabilities, marginals, closed-form check.
    Bench(Flags),
    /// Signaling delta over a (sin_alpha, beta, phi2) grid, as CSV.
    Scan(Flags),
    /// Maximise the CHSH-like quantity over all four settings.
    Chsh(Flags),
    /// Compare paraxial propagation with the 2x2 matrix model across diffraction regimes.
    Paraxial(Flags),
    /// Medium constants of the rubidium vapour preset and derived figures.
    Preset(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the merged config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Interpret angle flags in degrees.
    #[arg(long)]
    pub deg: bool,
    /// Named medium preset (`fig2`); explicit medium flags still override it.
    #[arg(long)]
    pub preset: Option<String>,
    /// Diagonal coupling magnitude.
    #[arg(long, allow_hyphen_values = true)]
    pub eta1: Option<f64>,
    /// Diagonal coupling phase (gain/loss for sin(phi1) != 0).
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    /// Off-diagonal coupling magnitude.
    #[arg(long, allow_hyphen_values = true)]
    pub eta2: Option<f64>,
    /// Off-diagonal coupling phase.
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    /// Reflection coefficient in [0, 1]; sets the splitter angle to asin(r).
    #[arg(long, conflicts_with = "bs_angle")]
    pub r: Option<f64>,
    /// Splitter angle phi, r = sin(phi), t = cos(phi).
    #[arg(long, allow_hyphen_values = true)]
    pub bs_angle: Option<f64>,
    /// Four comma-separated splitter phases theta1..theta4.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bs_phases: Option<Vec<f64>>,
    /// Polarization rotation angle.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Medium placement relative to the beam splitter.
    #[arg(long, value_parser = ["after-bs", "before-bs"])]
    pub medium_position: Option<String>,
    /// Skip the beam interchange after the medium.
    #[arg(long)]
    pub no_swap: bool,
    /// Grid points per angle for the CHSH and violation searches.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Scan range for sin(alpha): VALUE or START:STOP:STEPS.
    #[arg(long, allow_hyphen_values = true)]
    pub sin_alpha: Option<Range>,
    /// Scan range for beta.
    #[arg(long, allow_hyphen_values = true)]
    pub scan_beta: Option<Range>,
    /// Scan range for the medium phase phi2.
    #[arg(long, allow_hyphen_values = true)]
    pub scan_phi2: Option<Range>,
    /// First splitter angle compared by the scan.
    #[arg(long, allow_hyphen_values = true)]
    pub setting_a: Option<f64>,
    /// Second splitter angle compared by the scan.
    #[arg(long, allow_hyphen_values = true)]
    pub setting_b: Option<f64>,
    /// Comma-separated k w^2 / L values for the paraxial sweep.
    #[arg(long, value_delimiter = ',')]
    pub kw2_over_l: Option<Vec<f64>>,
    /// Gaussian waist w for the paraxial sweep.
    #[arg(long)]
    pub beam_waist: Option<f64>,
    /// Split-step count over the medium length.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Neglect diffraction in the paraxial solver.
    #[arg(long)]
    pub no_diffraction: bool,
    /// Write a transverse field snapshot CSV.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Bench(f) => (Command::Bench, f),
            CliCommand::Scan(f) => (Command::Scan, f),
            CliCommand::Chsh(f) => (Command::Chsh, f),
            CliCommand::Paraxial(f) => (Command::Paraxial, f),
            CliCommand::Preset(f) => (Command::Preset, f),
        }
    }
}

pub fn preset_medium(name: &str) -> Result<PTMediumParams, CliError> {
    match name {
        "fig2" => Ok(PTMediumParams::fig2()),
        other => Err(CliError::Config(format!("unknown preset {other:?}"))),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Overlays command-line flags on `base`.
pub fn merge_flags(mut cfg: RunConfig, command: Command, f: &Flags) -> Result<RunConfig, CliError> {
    let angle = if f.deg { 1f64.to_radians() } else { 1.0 };
    cfg.command = command;
    if let Some(p) = &f.preset {
        cfg.preset = Some(p.clone());
    }
    if f.eta1.is_some() || f.phi1.is_some() || f.eta2.is_some() || f.phi2.is_some() {
        if let Some(name) = cfg.preset.take() {
            let m = preset_medium(&name)?;
            (cfg.eta1, cfg.phi1, cfg.eta2, cfg.phi2) = (m.eta1, m.phi1, m.eta2, m.phi2);
        }
    }
    if let Some(v) = f.eta1 {
        cfg.eta1 = v;
    }
    if let Some(v) = f.phi1 {
        cfg.phi1 = v * angle;
    }
    if let Some(v) = f.eta2 {
        cfg.eta2 = v;
    }
    if let Some(v) = f.phi2 {
        cfg.phi2 = v * angle;
    }
    if let Some(r) = f.r {
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Config(format!("--r {r} outside [0, 1]")));
        }
        cfg.bs_angle = r.asin();
    }
    if let Some(v) = f.bs_angle {
        cfg.bs_angle = v * angle;
    }
    if let Some(v) = &f.bs_phases {
        if v.len() != 4 {
            return Err(CliError::Config(format!("--bs-phases needs 4 values, got {}", v.len())));
        }
        cfg.bs_phases = BeamSplitterPhases([v[0] * angle, v[1] * angle, v[2] * angle, v[3] * angle]);
    }
    if let Some(v) = f.beta {
        cfg.beta = v * angle;
    }
    if let Some(p) = &f.medium_position {
        cfg.medium_position = match p.as_str() {
            "before-bs" => MediumPosition::BeforeBs,
            _ => MediumPosition::AfterBs,
        };
    }
    if f.no_swap {
        cfg.mirror_swap = false;
    }
    if let Some(v) = f.resolution {
        cfg.grid_resolution = v;
    }
    if let Some(v) = f.sin_alpha {
        cfg.scan.sin_alpha = v;
    }
    if let Some(v) = f.scan_beta {
        cfg.scan.beta = v.scaled(angle);
    }
    if let Some(v) = f.scan_phi2 {
        cfg.scan.phi2 = v.scaled(angle);
    }
    if let Some(v) = f.setting_a {
        cfg.scan.setting_a = v * angle;
    }
    if let Some(v) = f.setting_b {
        cfg.scan.setting_b = v * angle;
    }
    if let Some(v) = f.eta2 {
        cfg.scan.eta2 = v;
    }
    if let Some(v) = &f.kw2_over_l {
        cfg.paraxial.kw2_over_l = v.clone();
    }
    if let Some(v) = f.beam_waist {
        cfg.paraxial.beam_waist = v;
    }
    if let Some(v) = f.steps {
        cfg.paraxial.steps = v;
    }
    if f.no_diffraction {
        cfg.paraxial.include_diffraction = false;
    }
    if let Some(v) = &f.snapshot {
        cfg.paraxial.snapshot = Some(v.clone());
    }
    if let Some(v) = &f.output {
        cfg.output = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn kv<W: Write>(out: &mut W, key: &str, value: f64) -> io::Result<()> {
    write_row(out, &[key, &fmt_g(value)])
}

/// Intensities, probabilities, marginals and the closed-form residual.
pub fn cmd_bench<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let s = cfg.settings()?;
    let derived = medium::derive(&s.medium)?;
    let w = bench::run_bench(&s)?;
    let p = bench::probabilities(&w)?;
    write_row(out, &["quantity", "value"])?;
    kv(out, "sin_alpha", derived.alpha.sin())?;
    kv(out, "length", derived.length)?;
    kv(out, "r", s.reflectivity())?;
    kv(out, "t", s.transmissivity())?;
    kv(out, "beta", s.hwp_angle)?;
    kv(out, "W_uh", w.w_uh)?;
    kv(out, "W_uv", w.w_uv)?;
    kv(out, "W_lh", w.w_lh)?;
    kv(out, "W_lv", w.w_lv)?;
    kv(out, "P_uh", p.p_uh)?;
    kv(out, "P_uv", p.p_uv)?;
    kv(out, "P_lh", p.p_lh)?;
    kv(out, "P_lv", p.p_lv)?;
    kv(out, "P_A_h", p.pa_h)?;
    kv(out, "P_A_v", p.pa_v)?;
    kv(out, "P_B_u", p.pb_u)?;
    kv(out, "P_B_l", p.pb_l)?;
    match bench::p_single_closed_form(&s) {
        Ok((h, _)) => {
            kv(out, "P_A_h_closed_form", h)?;
            kv(out, "closed_form_residual", (h - p.pa_h).abs())?;
        }
        Err(BenchError::ClosedFormInapplicable(_)) => {
            write_row(out, &["P_A_h_closed_form", "n/a"])?;
            write_row(out, &["closed_form_residual", "n/a"])?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

/// CSV rows `sin_alpha,beta,phi2,delta` in lexicographic index order.
pub fn cmd_scan<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let sc = &cfg.scan;
    let (sas, betas, phis) = (sc.sin_alpha.values(), sc.beta.values(), sc.phi2.values());
    let mut points = Vec::with_capacity(sas.len() * betas.len() * phis.len());
    for &sa in &sas {
        for &beta in &betas {
            for &phi2 in &phis {
                points.push((sa, beta, phi2));
            }
        }
    }
    let template = cfg.settings()?;
    let rows: Vec<[f64; 4]> = points
        .par_iter()
        .map(|&(sa, beta, phi2)| {
            let medium = PTMediumParams::with_sin_alpha(sa, sc.eta2, phi2)?;
            let s = ExperimentSettings {
                medium,
                hwp_angle: beta,
                ..template
            };
            let d = bench::signaling_delta_in(&s, sc.setting_a, sc.setting_b)?;
            Ok([sa, beta, phi2, d])
        })
        .collect::<Result<_, BenchError>>()?;
    write_row(out, &["sin_alpha", "beta", "phi2", "delta"])?;
    for row in rows {
        write_numeric_row(out, &row)?;
    }
    Ok(())
}

/// `S_max`, its settings and the comparison with `2 cos^2 a / (1 + sin^2 a)`.
pub fn cmd_chsh<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let s = cfg.settings()?;
    let sa = medium::derive(&s.medium)?.alpha.sin();
    let m = bench::max_chsh_in(&s, cfg.grid_resolution)?;
    let bound = bench::chsh_bound(&s.medium)?;
    write_row(out, &["quantity", "value"])?;
    kv(out, "sin_alpha", sa)?;
    kv(out, "S_max", m.s_max)?;
    kv(out, "grid_S_max", m.grid_s_max)?;
    kv(out, "bs_angle_1", m.settings[0])?;
    kv(out, "beta_1", m.settings[1])?;
    kv(out, "bs_angle_2", m.settings[2])?;
    kv(out, "beta_2", m.settings[3])?;
    kv(out, "closed_form_bound", bound)?;
    kv(out, "bound_residual", (m.s_max - bound).abs())?;
    let verdict = if m.s_max <= 2.0 + 1e-9 { "PASS" } else { "FAIL" };
    write_row(out, &["classical_bound_2", verdict])?;
    Ok(())
}

/// One CSV row per diffraction regime.
pub fn cmd_paraxial<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let s = cfg.settings()?;
    medium::derive(&s.medium)?;
    let pc = &cfg.paraxial;
    let opts: Vec<ValidationOptions> = pc
        .kw2_over_l
        .iter()
        .map(|&r| ValidationOptions {
            kw2_over_l: r,
            beam_waist: pc.beam_waist,
            include_diffraction: pc.include_diffraction,
            steps: pc.steps,
        })
        .collect();
    let reports = opts
        .par_iter()
        .map(|o| paraxial::validate_matrix_model(&s, o))
        .collect::<Result<Vec<_>, _>>()?;
    write_row(
        out,
        &[
            "kw2_over_l",
            "include_diffraction",
            "grid_n",
            "p_uh",
            "p_uv",
            "p_lh",
            "p_lv",
            "max_discrepancy",
        ],
    )?;
    for rep in &reports {
        let p = rep.paraxial;
        write_row(
            out,
            &[
                fmt_g(rep.options.kw2_over_l),
                rep.options.include_diffraction.to_string(),
                rep.grid.n.to_string(),
                fmt_g(p.p_uh),
                fmt_g(p.p_uv),
                fmt_g(p.p_lh),
                fmt_g(p.p_lv),
                fmt_g(rep.max_discrepancy),
            ],
        )?;
    }
    if let (Some(path), Some(first)) = (&pc.snapshot, opts.first()) {
        let cols = paraxial::propagate_bench_columns(&s, first)?;
        let mut f = BufWriter::new(File::create(path)?);
        paraxial::write_field_csv(&mut f, &cols.plus, &cols.grid)?;
        f.flush()?;
    }
    Ok(())
}

/// Preset constants, derived quantities and the pipeline's extremal values.
pub fn cmd_preset<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let m = match cfg.preset.as_deref() {
        None => PTMediumParams::fig2(),
        Some(_) => cfg.medium()?,
    };
    let d = medium::derive(&m)?;
    let sa = d.alpha.sin();
    let template = ExperimentSettings {
        medium: m,
        ..cfg.settings().unwrap_or(ExperimentSettings::new(m, 0.0, 0.0))
    };
    let viol = bench::max_violation_in(&template, cfg.grid_resolution)?;
    let chsh = bench::max_chsh_in(&template, cfg.grid_resolution)?;
    write_row(out, &["quantity", "value"])?;
    kv(out, "eta1", m.eta1)?;
    kv(out, "phi1", m.phi1)?;
    kv(out, "eta2", m.eta2)?;
    kv(out, "phi2", m.phi2)?;
    kv(out, "sin_alpha", sa)?;
    kv(out, "alpha", d.alpha)?;
    kv(out, "length", d.length)?;
    kv(out, "global_phase", d.global_phase)?;
    kv(out, "max_violation", viol.delta)?;
    kv(out, "max_violation_closed_form", 2.0 * sa.abs() / (1.0 + sa * sa))?;
    kv(out, "S_max", chsh.s_max)?;
    kv(out, "S_closed_form", bench::chsh_bound(&m)?)?;
    Ok(())
}

pub fn execute<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    match cfg.command {
        Command::Bench => cmd_bench(cfg, out),
        Command::Scan => cmd_scan(cfg, out),
        Command::Chsh => cmd_chsh(cfg, out),
        Command::Paraxial => cmd_paraxial(cfg, out),
        Command::Preset => cmd_preset(cfg, out),
    }
}

fn resolve(cli: Cli) -> Result<(RunConfig, bool), CliError> {
    let (command, flags) = cli.command.split();
    let base = match &flags.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    Ok((merge_flags(base, command, &flags)?, flags.dump_config))
}

fn run_resolved<W: Write>(cfg: &RunConfig, dump: bool, stdout: &mut W) -> Result<(), CliError> {
    if dump {
        let text = serde_json::to_string_pretty(cfg)
            .map_err(|e| CliError::Config(e.to_string()))?;
        stdout.write_all(text.as_bytes())?;
        stdout.write_all(b"\n")?;
        return Ok(());
    }
    match &cfg.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            execute(cfg, &mut f)?;
            f.flush()?;
            Ok(())
        }
        None => execute(cfg, stdout),
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `stderr`.
pub fn run<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write + Send,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = resolve(cli).and_then(|(cfg, dump)| match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| run_resolved(&cfg, dump, stdout)),
        None => run_resolved(&cfg, dump, stdout),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
