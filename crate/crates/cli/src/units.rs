use crate::error::{CliError, Result};

/// Unit system a config's frequency fields are written in. Dimensionless
/// configs quote every rate and detuning in units of g1; lab configs quote
/// them in MHz (as nu = omega/2pi, so ratios to g1 are unit-free).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    G1,
    MegaHertz,
}

impl FrequencyUnit {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(FrequencyUnit::G1),
            "MHz" => Ok(FrequencyUnit::MegaHertz),
            other => Err(CliError::config(
                "frequency_unit",
                format!("expected \"g1\" or \"MHz\", got \"{other}\""),
            )),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FrequencyUnit::G1 => "g1",
            FrequencyUnit::MegaHertz => "MHz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    /// Dimensionless time, in units of 1/g1.
    InverseG1,
    Microseconds,
}

impl TimeUnit {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1/g1" => Ok(TimeUnit::InverseG1),
            "us" => Ok(TimeUnit::Microseconds),
            other => Err(CliError::config(
                "time_unit",
                format!("expected \"1/g1\" or \"us\", got \"{other}\""),
            )),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeUnit::InverseG1 => "1/g1",
            TimeUnit::Microseconds => "us",
        }
    }
}

/// g1 quoted as nu = omega/2pi in MHz corresponds to an angular rate of
/// 2\pi g1 rad/us, so dimensionless time tau (units of 1/g1) maps to
/// t = tau / (2\pi g1_MHz) microseconds.
pub fn tau_to_us(tau: f64, g1_mhz: f64) -> f64 {
    tau / (2.0 * std::f64::consts::PI * g1_mhz)
}

pub fn us_to_tau(t_us: f64, g1_mhz: f64) -> f64 {
    t_us * 2.0 * std::f64::consts::PI * g1_mhz
}
