use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::units::{FrequencyUnit, TimeUnit};

pub const DEFAULT_N_MAX: usize = 10;
/// Dense-only solver: 4 * (n_max + 1) <= 64.
pub const MAX_N_MAX: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    SpectrumScan,
    UnitaryDynamics,
    EffectiveDynamics,
    MasterDynamics,
    ParameterSweep,
    PhysicalUnits,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::SpectrumScan => "spectrum_scan",
            Kind::UnitaryDynamics => "unitary_dynamics",
            Kind::EffectiveDynamics => "effective_dynamics",
            Kind::MasterDynamics => "master_dynamics",
            Kind::ParameterSweep => "parameter_sweep",
            Kind::PhysicalUnits => "physical_units",
        }
    }
}

/// delta_2 is either a literal value or the string "resonant", meaning it is
/// computed from the Stark-shift balance at load time.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Delta2 {
    Value(f64),
    Rule(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub g1: f64,
    pub g2: f64,
    pub delta_1: f64,
    pub delta_2: Delta2,
    #[serde(default)]
    pub theta_p: f64,
    // Exactly one squeeze parameterization: (delta_c, omega_p) or (r_p, delta_s).
    pub delta_c: Option<f64>,
    pub omega_p: Option<f64>,
    pub r_p: Option<f64>,
    pub delta_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantConfig {
    ThermalLab,
    SqueezedFrameThermal,
    SqueezedReservoirLab,
    SqueezedFrameSqueezedReservoir,
    MatchedLindblad,
}

impl VariantConfig {
    pub fn label(self) -> &'static str {
        match self {
            VariantConfig::ThermalLab => "thermal_lab",
            VariantConfig::SqueezedFrameThermal => "squeezed_frame_thermal",
            VariantConfig::SqueezedReservoirLab => "squeezed_reservoir_lab",
            VariantConfig::SqueezedFrameSqueezedReservoir => "squeezed_frame_squeezed_reservoir",
            VariantConfig::MatchedLindblad => "matched_lindblad",
        }
    }

    pub fn needs_drive(self) -> bool {
        !matches!(
            self,
            VariantConfig::ThermalLab | VariantConfig::SqueezedFrameThermal
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
    pub variant: VariantConfig,
    pub r_e: Option<f64>,
    pub theta_e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    /// One of "g1g2", "g1e2", "e1g2", "e1e2".
    pub atoms: String,
    #[serde(default)]
    pub photons: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    pub t_max: f64,
    pub n_points: usize,
}

/// delta_2 grid for spectrum scans.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepObservable {
    /// Re-run the base dynamics scenario per grid value; long-format rows.
    Dynamics,
    /// Solve the resonance condition per r_p (delta_s scaled as cosh(r_p)
    /// from its base value) and report g_eff and its growth over r_p = 0.
    ResonantEnhancement,
    /// Closed-form detuning-policy curves: delta_s(r_p) and the coupling
    /// growth factor under the selected policy.
    Enhancement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    FixedDeltaC,
    ScaledDeltaS,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path of the swept field: "reservoir.r_e", "reservoir.theta_e",
    /// "system.delta_2", or "system.r_p".
    pub parameter: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub n_points: Option<usize>,
    /// Explicit grid, mutually exclusive with min/max/n_points.
    pub values: Option<Vec<f64>>,
    #[serde(default = "default_observable")]
    pub observable: SweepObservable,
    pub policy: Option<PolicyConfig>,
}

fn default_observable() -> SweepObservable {
    SweepObservable::Dynamics
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        if let Some(values) = &self.values {
            return values.clone();
        }
        let (min, max, n) = (
            self.min.unwrap_or(0.0),
            self.max.unwrap_or(0.0),
            self.n_points.unwrap_or(0),
        );
        linspace(min, max, n)
    }
}

pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    (0..n)
        .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    pub csv: String,
    pub plot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: Kind,
    pub frequency_unit: String,
    pub time_unit: Option<String>,
    pub n_max: Option<usize>,
    pub system: SystemConfig,
    pub reservoir: Option<ReservoirConfig>,
    pub initial_state: Option<InitialStateConfig>,
    pub time_grid: Option<TimeGridConfig>,
    pub scan: Option<ScanConfig>,
    pub sweep: Option<SweepConfig>,
    pub outputs: OutputsConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn frequency_unit(&self) -> Result<FrequencyUnit> {
        FrequencyUnit::parse(&self.frequency_unit)
    }

    pub fn time_unit(&self) -> Result<Option<TimeUnit>> {
        self.time_unit.as_deref().map(TimeUnit::parse).transpose()
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(DEFAULT_N_MAX)
    }

    fn is_dynamics(&self) -> bool {
        matches!(
            self.kind,
            Kind::UnitaryDynamics
                | Kind::EffectiveDynamics
                | Kind::MasterDynamics
                | Kind::PhysicalUnits
        )
    }

    pub fn validate(&self) -> Result<()> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));

        if self.name.is_empty() {
            return err("name", "must be non-empty");
        }
        let funit = self.frequency_unit()?;
        match (self.kind, funit) {
            (Kind::PhysicalUnits, FrequencyUnit::MegaHertz) => {}
            (Kind::PhysicalUnits, _) => {
                return err("frequency_unit", "physical_units configs must use \"MHz\"")
            }
            (_, FrequencyUnit::G1) => {}
            (_, _) => return err("frequency_unit", "dimensionless configs must use \"g1\""),
        }

        let n_max = self.n_max();
        if n_max < 1 || n_max > MAX_N_MAX {
            return err("n_max", &format!("must be in 1..={MAX_N_MAX}"));
        }

        self.validate_system()?;
        self.validate_kind_shape()?;
        if let Some(grid) = &self.time_grid {
            if grid.n_points < 2 {
                return err("time_grid.n_points", "needs at least 2 points");
            }
            if !(grid.t_max > 0.0) {
                return err("time_grid.t_max", "must be positive");
            }
        }
        if let Some(init) = &self.initial_state {
            if !["g1g2", "g1e2", "e1g2", "e1e2"].contains(&init.atoms.as_str()) {
                return err(
                    "initial_state.atoms",
                    "expected one of g1g2, g1e2, e1g2, e1e2",
                );
            }
            if init.photons > n_max {
                return err("initial_state.photons", "exceeds n_max");
            }
            if self.kind == Kind::EffectiveDynamics && init.photons != 0 {
                return err(
                    "initial_state.photons",
                    "effective dynamics is atoms-only; photons must be 0",
                );
            }
        }
        if let Some(res) = &self.reservoir {
            self.validate_reservoir(res)?;
        }
        if self.outputs.csv.is_empty() {
            return err("outputs.csv", "must be non-empty");
        }
        Ok(())
    }

    fn validate_system(&self) -> Result<()> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));
        let s = &self.system;
        if !(s.g1 > 0.0) {
            return err("system.g1", "must be positive");
        }
        if !(s.g2 > 0.0) {
            return err("system.g2", "must be positive");
        }
        let pump = (s.delta_c.is_some(), s.omega_p.is_some());
        let squeeze = (s.r_p.is_some(), s.delta_s.is_some());
        match (pump, squeeze) {
            ((true, true), (false, false)) | ((false, false), (true, true)) => {}
            _ => {
                return err(
                    "system",
                    "exactly one parameterization: (delta_c, omega_p) or (r_p, delta_s)",
                )
            }
        }
        if let Delta2::Rule(rule) = &s.delta_2 {
            if rule != "resonant" {
                return err("system.delta_2", "the only supported rule is \"resonant\"");
            }
        }
        Ok(())
    }

    fn validate_reservoir(&self, res: &ReservoirConfig) -> Result<()> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));
        for (v, path) in [
            (res.kappa, "reservoir.kappa"),
            (res.gamma, "reservoir.gamma"),
            (res.n_th, "reservoir.n_th"),
        ] {
            if !(v >= 0.0) {
                return err(path, "must be non-negative");
            }
        }
        if res.variant.needs_drive() && (res.r_e.is_none() || res.theta_e.is_none()) {
            return err(
                "reservoir",
                &format!("variant {} requires r_e and theta_e", res.variant.label()),
            );
        }
        Ok(())
    }

    fn validate_kind_shape(&self) -> Result<()> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));
        // The sweep block exists exactly for parameter sweeps; the scan block
        // exactly for spectrum scans.
        if (self.kind == Kind::ParameterSweep) != self.sweep.is_some() {
            return err("sweep", "present if and only if kind = parameter_sweep");
        }
        if (self.kind == Kind::SpectrumScan) != self.scan.is_some() {
            return err("scan", "present if and only if kind = spectrum_scan");
        }

        match self.kind {
            Kind::SpectrumScan => {
                let scan = self.scan.as_ref().unwrap();
                if scan.n_points < 3 {
                    return err("scan.n_points", "needs at least 3 points");
                }
                if !(scan.max > scan.min) {
                    return err("scan.max", "must exceed scan.min");
                }
                if self.reservoir.is_some() {
                    return err("reservoir", "not used by spectrum_scan");
                }
                if self.time_grid.is_some() || self.initial_state.is_some() {
                    return err("time_grid", "not used by spectrum_scan");
                }
            }
            Kind::UnitaryDynamics | Kind::EffectiveDynamics => {
                if self.reservoir.is_some() {
                    return err("reservoir", "closed-system dynamics takes no reservoir");
                }
                self.require_grid_and_state()?;
            }
            Kind::MasterDynamics => {
                if self.reservoir.is_none() {
                    return err("reservoir", "master_dynamics requires a reservoir");
                }
                self.require_grid_and_state()?;
            }
            Kind::PhysicalUnits => {
                let res = self
                    .reservoir
                    .as_ref()
                    .ok_or_else(|| CliError::config("reservoir", "physical_units requires one"))?;
                if res.variant != VariantConfig::MatchedLindblad {
                    return err("reservoir.variant", "physical_units runs matched_lindblad");
                }
                match self.time_unit()? {
                    Some(TimeUnit::Microseconds) => {}
                    _ => return err("time_unit", "physical_units configs must use \"us\""),
                }
                self.require_grid_and_state()?;
            }
            Kind::ParameterSweep => {
                let sweep = self.sweep.as_ref().unwrap();
                self.validate_sweep(sweep)?;
            }
        }

        if self.is_dynamics() && self.kind != Kind::PhysicalUnits {
            match self.time_unit()? {
                Some(TimeUnit::InverseG1) => {}
                _ => return err("time_unit", "dimensionless dynamics must use \"1/g1\""),
            }
        }
        Ok(())
    }

    fn validate_sweep(&self, sweep: &SweepConfig) -> Result<()> {
        let err = |path: &str, msg: &str| Err(CliError::config(path, msg));
        const PATHS: [&str; 4] = [
            "reservoir.r_e",
            "reservoir.theta_e",
            "system.delta_2",
            "system.r_p",
        ];
        if !PATHS.contains(&sweep.parameter.as_str()) {
            return err(
                "sweep.parameter",
                &format!("expected one of {}", PATHS.join(", ")),
            );
        }
        let ranged = sweep.min.is_some() || sweep.max.is_some() || sweep.n_points.is_some();
        match (&sweep.values, ranged) {
            (Some(values), false) => {
                if values.is_empty() {
                    return err("sweep.values", "must be non-empty");
                }
            }
            (None, true) => {
                let (Some(min), Some(max), Some(n)) = (sweep.min, sweep.max, sweep.n_points)
                else {
                    return err("sweep", "ranged grid needs min, max and n_points");
                };
                if n < 2 {
                    return err("sweep.n_points", "needs at least 2 points");
                }
                if !(max > min) {
                    return err("sweep.max", "must exceed sweep.min");
                }
            }
            _ => return err("sweep", "give either values or (min, max, n_points)"),
        }

        match sweep.observable {
            SweepObservable::Dynamics => {
                self.require_grid_and_state()?;
                if sweep.parameter.starts_with("reservoir.") && self.reservoir.is_none() {
                    return err("reservoir", "swept reservoir parameter needs a reservoir");
                }
                if sweep.policy.is_some() {
                    return err("sweep.policy", "only used by the enhancement observable");
                }
            }
            SweepObservable::ResonantEnhancement | SweepObservable::Enhancement => {
                if sweep.parameter != "system.r_p" {
                    return err("sweep.parameter", "scalar observables sweep system.r_p");
                }
                if self.time_grid.is_some() || self.initial_state.is_some() {
                    return err("time_grid", "scalar sweeps take no time grid");
                }
                if self.reservoir.is_some() {
                    return err("reservoir", "scalar sweeps take no reservoir");
                }
                match sweep.observable {
                    SweepObservable::Enhancement => {
                        if sweep.policy.is_none() {
                            return err("sweep.policy", "enhancement sweep needs a policy");
                        }
                    }
                    _ => {
                        if sweep.policy.is_some() {
                            return err("sweep.policy", "only used by the enhancement observable");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn require_grid_and_state(&self) -> Result<()> {
        if self.time_grid.is_none() {
            return Err(CliError::config("time_grid", "required for dynamics"));
        }
        if self.initial_state.is_none() {
            return Err(CliError::config("initial_state", "required for dynamics"));
        }
        Ok(())
    }

    /// The output time grid, in the config's own time unit.
    pub fn times(&self) -> Vec<f64> {
        match &self.time_grid {
            Some(grid) => linspace(0.0, grid.t_max, grid.n_points),
            None => Vec::new(),
        }
    }
}
