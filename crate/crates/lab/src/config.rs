//! Run configuration as read from JSON.

use std::path::{Path, PathBuf};

use perpetuity_core::counterexample::CounterexampleParams;
use perpetuity_core::diagnostics::{FitMode, Verdict, DONEY_DELTAS, X_LADDER};
use perpetuity_core::model::catalog;
use perpetuity_core::model::{base_from_tilted, BLaw, BaseFamily, RightKind, TailSpec, TiltedLaw};
use perpetuity_core::renewal::ImplicitParams;
use perpetuity_core::sampler::{GoldieVariant, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveKappa,
    BuildModel,
    Simulate,
    TailTable,
    GoldieConstant,
    RenewalCheck,
    SrtCheck,
    ImplicitCheck,
    DoneyCheck,
    SubexpCheck,
    Counterexample,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveKappa => "solve-kappa",
            Command::BuildModel => "build-model",
            Command::Simulate => "simulate",
            Command::TailTable => "tail-table",
            Command::GoldieConstant => "goldie-constant",
            Command::RenewalCheck => "renewal-check",
            Command::SrtCheck => "srt-check",
            Command::ImplicitCheck => "implicit-check",
            Command::DoneyCheck => "doney-check",
            Command::SubexpCheck => "subexp-check",
            Command::Counterexample => "counterexample",
        }
    }
}

/// How the multiplier law (or, for the tail diagnostics, a bare tail law) is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDesc {
    /// A named entry of the built-in catalog.
    Catalog { name: String },
    /// Reflected-exponential left part plus `right`, tuned to `E A^kappa = theta`.
    Mixture { right: RightKind, kappa: f64, theta: f64 },
    /// `F_kappa` given directly; `theta` follows from it.
    Tilted { kappa: f64, fkappa: TailSpec },
    /// `A = a` almost surely.
    Constant { a: f64 },
    /// Law of `log A` under `P`; only `solve-kappa` accepts it.
    Base { base: BaseFamily },
    /// A bare distribution for the tail diagnostics; the renewal commands
    /// take it as `F_kappa` with `theta = 1`.
    Tail { spec: TailSpec },
}

impl ModelDesc {
    pub fn tilted_law(&self) -> Result<TiltedLaw, LabError> {
        match self {
            ModelDesc::Catalog { name } => catalog::by_name(name)
                .ok_or_else(|| LabError::config(format!("unknown catalog model '{name}'"))),
            ModelDesc::Mixture { right, kappa, theta } => Ok(catalog::mixture(*right, *kappa, *theta)?),
            ModelDesc::Tilted { kappa, fkappa } => {
                fkappa.validate()?;
                Ok(base_from_tilted(*fkappa, *kappa)?)
            }
            ModelDesc::Constant { a } => Ok(catalog::constant(*a)?),
            ModelDesc::Base { .. } | ModelDesc::Tail { .. } => Err(LabError::config(
                "this command needs a multiplier law (catalog, mixture, tilted or constant)",
            )),
        }
    }

    /// The distribution examined by the tail diagnostics: the bare law for
    /// `tail`, `F_kappa` otherwise.
    pub fn tail_spec(&self) -> Result<TailSpec, LabError> {
        match self {
            ModelDesc::Tail { spec } => {
                spec.validate()?;
                Ok(*spec)
            }
            _ => Ok(self.tilted_law()?.fkappa),
        }
    }
}

/// Renewal grid settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
    /// Width of the reported increments `U(x, x + report_step]`.
    pub report_step: f64,
    pub tol: f64,
    pub n_max: usize,
    /// Evaluation points of `srt-check`; empty means 25, 50, ..., 250.
    pub ladder: Vec<f64>,
    /// Point at which `renewal-check` compares increments with `1/mean`.
    pub blackwell_x: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            x_min: -10.0,
            x_max: 40.0,
            h: 0.01,
            report_step: 1.0,
            tol: 1e-10,
            n_max: 1 << 26,
            ladder: Vec::new(),
            blackwell_x: 30.0,
        }
    }
}

impl GridParams {
    pub fn srt_ladder(&self) -> Vec<f64> {
        if self.ladder.is_empty() {
            (1..=10).map(|i| 25.0 * i as f64).collect()
        } else {
            self.ladder.clone()
        }
    }
}

/// What `simulate` and `tail-table` draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `X = AX + B`.
    Perpetuity,
    /// `X = AX v B`.
    MaxEquation,
    /// `M = max(0, S_1, ...)` by plain simulation under `P`.
    WalkMaximum,
    /// `P{M > x}` by importance sampling under `P_kappa`; thresholds are on the log scale.
    WalkMaximumIs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailParams {
    pub target: Target,
    /// Ascending thresholds; empty means 41 points log-spaced over `[1, 1e5]`.
    pub thresholds: Vec<f64>,
    /// Normalization of the fit; chosen from the model case when absent.
    pub fit: Option<FitMode>,
    /// Pairs for the tail constant compared with the fitted plateau; 0 skips it.
    pub goldie_pairs: usize,
    pub goldie_variant: GoldieVariant,
    /// Also write every draw to `samples.csv`.
    pub dump_samples: bool,
}

impl Default for TailParams {
    fn default() -> Self {
        TailParams {
            target: Target::Perpetuity,
            thresholds: Vec::new(),
            fit: None,
            goldie_pairs: 0,
            goldie_variant: GoldieVariant::Plus,
            dump_samples: false,
        }
    }
}

impl TailParams {
    pub fn threshold_ladder(&self) -> Vec<f64> {
        if self.thresholds.is_empty() {
            (0..=40).map(|i| 10f64.powf(0.125 * i as f64)).collect()
        } else {
            self.thresholds.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagParams {
    pub xs: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Window width of the subexponential check.
    pub t: f64,
}

impl Default for DiagParams {
    fn default() -> Self {
        DiagParams {
            xs: X_LADDER.to_vec(),
            deltas: DONEY_DELTAS.to_vec(),
            t: 1.0,
        }
    }
}

/// Pass thresholds. Defaults mirror the acceptance targets of the project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// `|log E A^kappa|` at the solved root.
    pub kappa_residual: f64,
    /// Optional known value of `kappa` and the tolerance against it.
    pub kappa_expected: Option<f64>,
    pub kappa_tol: f64,
    /// `|theta int e^{-kappa y} F_kappa(dy) - 1|` and the re-tilting round trip.
    pub tilt_tol: f64,
    /// Half-width of the band around `1/mean` for the renewal increments.
    pub blackwell_band: f64,
    /// Half-width of the band around 1 for the local renewal ratio.
    pub srt_band: f64,
    pub geometric_mass_tol: f64,
    pub smoothing_rel_tol: f64,
    /// Largest admissible `|slope|` of a normalized tail in log-log scale.
    pub slope_tol: f64,
    /// Relative slack added to the combined intervals when comparing a tail
    /// plateau with its predicted constant.
    pub constant_slack: f64,
    /// Number of interval half-widths for zero and oracle checks.
    pub ci_multiplier: f64,
    pub implicit_gap: f64,
    pub doney_exponent: Option<f64>,
    pub doney_exponent_tol: f64,
    pub counterexample_slope: f64,
    pub counterexample_slope_tol: f64,
    /// Expected verdict of `doney-check` or `subexp-check`; when absent,
    /// consistent passes, inconsistent fails and inconclusive stays inconclusive.
    pub expected_verdict: Option<Verdict>,
    /// Treat INCONCLUSIVE as failure for the exit code.
    pub inconclusive_fails: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            kappa_residual: 1e-10,
            kappa_expected: None,
            kappa_tol: 1e-10,
            tilt_tol: 1e-8,
            blackwell_band: 0.02,
            srt_band: 0.05,
            geometric_mass_tol: 1e-6,
            smoothing_rel_tol: 1e-6,
            slope_tol: 0.1,
            constant_slack: 0.15,
            ci_multiplier: 3.0,
            implicit_gap: 0.15,
            doney_exponent: None,
            doney_exponent_tol: 0.1,
            counterexample_slope: 0.1,
            counterexample_slope_tol: 0.05,
            expected_verdict: None,
            inconclusive_fails: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub model: Option<ModelDesc>,
    #[serde(default)]
    pub blaw: Option<BLaw>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub tail: TailParams,
    #[serde(default)]
    pub diagnostics: DiagParams,
    #[serde(default)]
    pub implicit: ImplicitParams,
    #[serde(default)]
    pub counterexample: CounterexampleParams,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            model: None,
            blaw: None,
            sim: SimConfig::default(),
            grid: GridParams::default(),
            tail: TailParams::default(),
            diagnostics: DiagParams::default(),
            implicit: ImplicitParams::default(),
            counterexample: CounterexampleParams::default(),
            checks: Checks::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| LabError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Replace every seed in the config by one derived from `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.sim.seed = seed;
        self.implicit.seed = seed.wrapping_add(1);
    }

    pub fn model(&self) -> Result<&ModelDesc, LabError> {
        self.model
            .as_ref()
            .ok_or_else(|| LabError::config(format!("command {} needs a model", self.command.name())))
    }

    pub fn blaw(&self) -> Result<&BLaw, LabError> {
        self.blaw
            .as_ref()
            .ok_or_else(|| LabError::config(format!("command {} needs blaw", self.command.name())))
    }

    /// Command-specific checks that need no computation.
    pub fn validate(&self) -> Result<(), LabError> {
        use Command::*;
        let needs_model = !matches!(self.command, Counterexample);
        if needs_model {
            self.model()?;
        }
        if matches!(self.command, Simulate | GoldieConstant | ImplicitCheck)
            || (self.command == TailTable && self.tail.target != Target::WalkMaximum && self.tail.target != Target::WalkMaximumIs)
        {
            self.blaw()?.validate()?;
        }
        if matches!(self.command, Simulate | TailTable | GoldieConstant | ImplicitCheck) {
            self.sim.validate()?;
        }
        if let Some(ModelDesc::Base { .. }) = &self.model {
            if self.command != SolveKappa {
                return Err(LabError::config("a base-family model is only accepted by solve-kappa"));
            }
        }
        if let Some(ModelDesc::Tail { .. }) = &self.model {
            if !matches!(self.command, DoneyCheck | SubexpCheck | RenewalCheck | SrtCheck) {
                return Err(LabError::config(
                    "a bare tail model is only accepted by the renewal and tail diagnostic commands",
                ));
            }
        }
        let th = self.tail.threshold_ladder();
        if th.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LabError::config("tail.thresholds must be strictly ascending"));
        }
        if !(self.grid.h > 0.0 && self.grid.x_min < self.grid.x_max && self.grid.report_step > 0.0) {
            return Err(LabError::config("grid needs h > 0, x_min < x_max and report_step > 0"));
        }
        Ok(())
    }
}
