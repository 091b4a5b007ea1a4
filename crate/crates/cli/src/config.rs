//! Experiment files: a strict top-level envelope plus one typed model per kind.

use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use qthermo_core::baths::{BathSpec, FormFactor, Statistics};
use qthermo_core::opcore::Operator;
use qthermo_core::random::{random_hermitian, SeededRng};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config<M> {
    pub experiment: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub model: M,
}

/// Threshold overrides; unset entries fall back to the per-kind defaults.
#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_law: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_law: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete_positivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gibbs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eth_gap_fraction: Option<f64>,
}

#[derive(Deserialize)]
struct Envelope {
    experiment: Option<String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reads the experiment kind without validating the rest.
pub fn experiment_kind(text: &str) -> Result<String, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError("config file is empty".into()));
    }
    let env: Envelope = serde_json::from_str(text).map_err(|e| ConfigError(format!("malformed config: {e}")))?;
    env.experiment.ok_or_else(|| ConfigError("missing key 'experiment'".into()))
}

/// Strict parse; errors name the offending key path and the line.
pub fn parse<M: DeserializeOwned + Default>(text: &str) -> Result<Config<M>, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: Config<M> = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError(format!("schema error at '{path}': {}", e.into_inner()))
    })?;
    de.end().map_err(|e| ConfigError(format!("trailing content: {e}")))?;
    Ok(cfg)
}

/// Non-negative temperature; `"inf"` selects the infinite-temperature bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Temperature(pub f64);

impl Serialize for Temperature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Temperature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let t = match Raw::deserialize(d)? {
            Raw::Number(x) => x,
            Raw::Text(s) if s == "inf" || s == "infinity" => f64::INFINITY,
            Raw::Text(s) => return Err(serde::de::Error::custom(format!("expected a number or \"inf\", got \"{s}\""))),
        };
        if !(t >= 0.0) {
            return Err(serde::de::Error::custom(format!("temperature must be non-negative, got {t}")));
        }
        Ok(Temperature(t))
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsConfig {
    #[default]
    Bose,
    Fermi,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormConfig {
    Flat { strength: f64, cutoff: f64 },
    Ohmic { strength: f64, cutoff: f64 },
    PowerLaw { strength: f64, exponent: f64, cutoff: f64 },
    Band { strength: f64, low: f64, high: f64 },
}

impl FormConfig {
    fn build(self) -> FormFactor<f64> {
        match self {
            FormConfig::Flat { strength, cutoff } => FormFactor::Flat { strength, cutoff },
            FormConfig::Ohmic { strength, cutoff } => FormFactor::Ohmic { strength, cutoff },
            FormConfig::PowerLaw { strength, exponent, cutoff } => FormFactor::PowerLaw { strength, exponent, cutoff },
            FormConfig::Band { strength, low, high } => FormFactor::Band { strength, low, high },
        }
    }
}

fn one() -> f64 {
    1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// Bath without a temperature, for sweeps that set it per point.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BathShape {
    pub label: String,
    #[serde(default)]
    pub statistics: StatisticsConfig,
    pub form: FormConfig,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub chemical_potential: f64,
    /// Multiplies absorption rates only; any value other than 1 breaks detailed balance.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub absorption_scale: f64,
}

impl BathShape {
    pub fn new(label: &str, form: FormConfig) -> Self {
        Self { label: label.into(), statistics: StatisticsConfig::Bose, form, chemical_potential: 0.0, absorption_scale: 1.0 }
    }

    pub fn at(&self, temperature: f64) -> qthermo_core::Result<BathSpec<f64>> {
        let stats = match self.statistics {
            StatisticsConfig::Bose => Statistics::Bose,
            StatisticsConfig::Fermi => Statistics::Fermi,
        };
        Ok(BathSpec::new(self.label.clone(), temperature, stats, self.form.build())?
            .with_chemical_potential(self.chemical_potential)
            .with_absorption_scale(self.absorption_scale))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub label: String,
    pub temperature: Temperature,
    #[serde(default)]
    pub statistics: StatisticsConfig,
    pub form: FormConfig,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub chemical_potential: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub absorption_scale: f64,
}

impl BathConfig {
    pub fn new(label: &str, temperature: f64, form: FormConfig) -> Self {
        Self {
            label: label.into(),
            temperature: Temperature(temperature),
            statistics: StatisticsConfig::Bose,
            form,
            chemical_potential: 0.0,
            absorption_scale: 1.0,
        }
    }

    pub fn build(&self) -> qthermo_core::Result<BathSpec<f64>> {
        let shape = BathShape {
            label: self.label.clone(),
            statistics: self.statistics,
            form: self.form,
            chemical_potential: self.chemical_potential,
            absorption_scale: self.absorption_scale,
        };
        shape.at(self.temperature.0)
    }
}

/// System Hamiltonian for the generator-level experiments.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `omega sigma_z / 2`; basis state 0 is the excited state.
    Qubit { omega: f64 },
    /// `omega n` on the lowest `levels` Fock states.
    Oscillator { omega: f64, levels: usize },
    /// Seeded random Hermitian matrix.
    Random { dim: usize },
}

/// Named system operators.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OperatorName {
    SigmaX,
    SigmaY,
    SigmaZ,
    /// `a + a^dagger`.
    Position,
    Number,
    /// Seeded random Hermitian matrix of the system dimension.
    Random,
}

impl SystemConfig {
    pub fn dim(&self) -> usize {
        match *self {
            SystemConfig::Qubit { .. } => 2,
            SystemConfig::Oscillator { levels, .. } => levels,
            SystemConfig::Random { dim } => dim,
        }
    }

    pub fn hamiltonian(&self, rng: &mut SeededRng) -> Result<Operator<f64>, ConfigError> {
        match *self {
            SystemConfig::Qubit { omega } => Ok(Operator::pauli_z().scale(0.5 * omega)),
            SystemConfig::Oscillator { omega, levels } if levels >= 2 => Ok(Operator::number(levels).scale(omega)),
            SystemConfig::Random { dim } if dim >= 2 => Ok(random_hermitian(dim, rng)),
            _ => Err(ConfigError("system dimension must be at least 2".into())),
        }
    }

    pub fn operator(&self, name: OperatorName, rng: &mut SeededRng) -> Result<Operator<f64>, ConfigError> {
        let d = self.dim();
        let qubit = matches!(self, SystemConfig::Qubit { .. });
        let op = match name {
            OperatorName::Random => return Ok(random_hermitian(d, rng)),
            OperatorName::SigmaX if qubit => Operator::pauli_x(),
            OperatorName::SigmaY if qubit => Operator::pauli_y(),
            OperatorName::SigmaZ if qubit => Operator::pauli_z(),
            OperatorName::Position if !qubit => {
                let a = Operator::annihilation(d);
                &a + &a.adjoint()
            }
            OperatorName::Number if !qubit => Operator::number(d),
            _ => return Err(ConfigError(format!("operator {name:?} is not defined for system {self:?}"))),
        };
        Ok(op)
    }
}

/// A bath attached through one system operator.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub operator: OperatorName,
    pub bath: BathConfig,
}
