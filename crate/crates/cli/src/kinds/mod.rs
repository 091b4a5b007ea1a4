//! The nine experiment kinds and their dispatch table.

mod davies;
mod floquet;
mod otto;
mod spectra;
mod tricycle;

use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::certificate::Certificate;
use crate::config::{self, Config, ConfigError, Tolerances};

/// Default thresholds shared by the kinds.
pub const SECOND_LAW_TOL: f64 = 1e-9;
pub const CP_TOL: f64 = 1e-9;
pub const GIBBS_TOL: f64 = 1e-9;
pub const KMS_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(qthermo_core::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Model(e) => write!(f, "model error: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<qthermo_core::Error> for RunError {
    fn from(e: qthermo_core::Error) -> Self {
        RunError::Model(e)
    }
}

pub fn invalid(msg: impl Into<String>) -> RunError {
    RunError::Config(ConfigError(msg.into()))
}

/// Artifacts of one run, in write order.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(&'static str, String)>,
    pub certificate: Certificate,
    pub summary: Vec<String>,
}

/// The four generic law checks shared by most kinds.
pub fn law_checks(cert: &mut Certificate, tol: &Tolerances, first_law: (f64, f64), second_margin: f64, min_choi: f64, gibbs: f64) {
    cert.at_most("first_law_residual", first_law.0, tol.first_law.unwrap_or(first_law.1));
    cert.at_least("second_law_min_margin", second_margin, -tol.second_law.unwrap_or(SECOND_LAW_TOL));
    cert.at_least("cp_min_choi_eig", min_choi, -tol.complete_positivity.unwrap_or(CP_TOL));
    cert.at_most("gibbs_residual", gibbs, tol.gibbs.unwrap_or(GIBBS_TOL));
}

pub trait Experiment: DeserializeOwned + Serialize + Default {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError>;
}

pub struct Kind {
    pub name: &'static str,
    pub summary: &'static str,
    pub run: fn(&str) -> Result<(PathBuf, Outcome), RunError>,
    pub describe: fn() -> String,
}

fn run_typed<E: Experiment>(text: &str) -> Result<(PathBuf, Outcome), RunError> {
    let cfg: Config<E> = config::parse(text)?;
    let out = cfg.model.run(cfg.seed, &cfg.tolerances)?;
    Ok((cfg.output_dir, out))
}

fn describe_typed<E: Experiment, const I: usize>() -> String {
    let cfg = Config { experiment: KINDS[I].name.to_string(), seed: 7, output_dir: PathBuf::from("out"), tolerances: Tolerances::default(), model: E::default() };
    serde_json::to_string_pretty(&cfg).expect("defaults serialize")
}

pub static KINDS: [Kind; 9] = [
    Kind {
        name: "evolve",
        summary: "Davies dynamics from an initial state; thermodynamic ledger over time",
        run: run_typed::<davies::Evolve>,
        describe: describe_typed::<davies::Evolve, 0>,
    },
    Kind {
        name: "davies-audit",
        summary: "jump channels and rates of a Davies generator with detailed-balance and steady-state checks",
        run: run_typed::<davies::Audit>,
        describe: describe_typed::<davies::Audit, 1>,
    },
    Kind {
        name: "otto",
        summary: "four-stroke Otto engine or refrigerator at its limit cycle",
        run: run_typed::<otto::Otto>,
        describe: describe_typed::<otto::Otto, 2>,
    },
    Kind {
        name: "otto-optimize",
        summary: "Otto cycle power maximized over frequencies or stroke durations",
        run: run_typed::<otto::Optimize>,
        describe: describe_typed::<otto::Optimize, 3>,
    },
    Kind {
        name: "tricycle",
        summary: "steady state of the three-mode absorption refrigerator",
        run: run_typed::<tricycle::Tricycle>,
        describe: describe_typed::<tricycle::Tricycle, 4>,
    },
    Kind {
        name: "third-law-sweep",
        summary: "optimal cold current of the tricycle along a falling cold temperature",
        run: run_typed::<tricycle::Sweep>,
        describe: describe_typed::<tricycle::Sweep, 5>,
    },
    Kind {
        name: "floquet",
        summary: "periodically driven qubit between baths; steady currents over drive frequencies",
        run: run_typed::<floquet::Floquet>,
        describe: describe_typed::<floquet::Floquet, 6>,
    },
    Kind {
        name: "eth-check",
        summary: "diagonal ensemble against microcanonical average on a disordered spin chain",
        run: run_typed::<spectra::Eth>,
        describe: describe_typed::<spectra::Eth, 7>,
    },
    Kind {
        name: "correlations",
        summary: "thermal two-point function of a finite system with the KMS check",
        run: run_typed::<spectra::Correlations>,
        describe: describe_typed::<spectra::Correlations, 8>,
    },
];

pub fn find(name: &str) -> Option<&'static Kind> {
    KINDS.iter().find(|k| k.name == name)
}
