use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qthermo_core::floquet::{build_floquet_generator, floquet_decompose, floquet_heat_currents, limit_cycle_csv, CircularDrive, FloquetCurrents, HarmonicDrive};
use qthermo_core::gkls::{build_davies, fmt_sig, stationary_state, Coupling};
use qthermo_core::opcore::{propagator, Operator};
use qthermo_core::random::seeded;

use super::{invalid, law_checks, Experiment, Outcome, RunError};
use crate::config::{BathConfig, CouplingConfig, FormConfig, OperatorName, SystemConfig, Tolerances};

const FIRST_LAW_TOL: f64 = 1e-8;
const CP_TIME: f64 = 10.0;

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveConfig {
    /// `omega0 sigma_z / 2` plus a field of strength `amplitude` rotating in the x-y plane.
    Circular { omega0: f64, amplitude: f64, phase: f64 },
    /// `sigma_z (omega0 + amplitude cos(W t + phase)) / 2`.
    Modulated { omega0: f64, amplitude: f64, phase: f64 },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Floquet {
    pub drive: DriveConfig,
    pub drive_frequencies: Vec<f64>,
    pub couplings: Vec<CouplingConfig>,
    /// Largest harmonic index kept in the jump decomposition.
    pub harmonics: usize,
    /// Time steps per period for the periodic propagator.
    pub grid_points: usize,
}

impl Default for Floquet {
    fn default() -> Self {
        let ohmic = FormConfig::Ohmic { strength: 0.05, cutoff: 20.0 };
        Self {
            drive: DriveConfig::Circular { omega0: 1.0, amplitude: 0.3, phase: 0.0 },
            drive_frequencies: vec![0.6, 0.8, 0.9, 1.2, 1.5],
            couplings: vec![
                CouplingConfig { operator: OperatorName::SigmaX, bath: BathConfig::new("h", 2.0, ohmic) },
                CouplingConfig { operator: OperatorName::SigmaX, bath: BathConfig::new("c", 0.3, ohmic) },
            ],
            harmonics: 5,
            grid_points: 64,
        }
    }
}

struct Point {
    currents: FloquetCurrents<f64>,
    choi: f64,
    labels: Vec<String>,
}

impl Floquet {
    fn omega0(&self) -> f64 {
        match self.drive {
            DriveConfig::Circular { omega0, .. } | DriveConfig::Modulated { omega0, .. } => omega0,
        }
    }

    fn point(&self, w: f64, couplings: &[Coupling<f64>]) -> Result<Point, RunError> {
        let dec = match self.drive {
            DriveConfig::Circular { omega0, amplitude, phase } => {
                floquet_decompose(&CircularDrive { omega0, amplitude, drive_frequency: w, phase }, self.grid_points)?
            }
            DriveConfig::Modulated { omega0, amplitude, phase } => {
                let drive = HarmonicDrive { h0: Operator::pauli_z().scale(0.5 * omega0), v: Operator::pauli_z().scale(0.5 * amplitude), drive_frequency: w, phase };
                floquet_decompose(&drive, self.grid_points)?
            }
        };
        let fg = build_floquet_generator(&dec, couplings, self.harmonics)?;
        let st = stationary_state(&fg.generator)?;
        let choi = propagator(fg.generator.liouvillian(), CP_TIME)?.choi_min_eigenvalue();
        Ok(Point { currents: floquet_heat_currents(&fg, &st), choi, labels: fg.labels })
    }
}

impl Experiment for Floquet {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if self.drive_frequencies.is_empty() || self.couplings.is_empty() {
            return Err(invalid("need at least one drive frequency and one coupling"));
        }
        let system = SystemConfig::Qubit { omega: self.omega0() };
        let mut rng = seeded(seed);
        let mut couplings = Vec::with_capacity(self.couplings.len());
        for c in &self.couplings {
            couplings.push(Coupling::new(system.operator(c.operator, &mut rng)?, c.bath.build()?));
        }
        let points = self.drive_frequencies.par_iter().map(|&w| self.point(w, &couplings)).collect::<Result<Vec<_>, _>>()?;
        let undriven = build_davies(&system.hamiltonian(&mut rng)?, &couplings)?;
        let first = points.iter().map(|p| p.currents.first_law_residual).fold(0.0, f64::max);
        let margin = points.iter().map(|p| -p.currents.second_law_value).fold(f64::INFINITY, f64::min);
        let choi = points.iter().map(|p| p.choi).fold(f64::INFINITY, f64::min);
        let mut out = Outcome::default();
        law_checks(&mut out.certificate, tol, (first, FIRST_LAW_TOL), margin, choi, undriven.gibbs_residual()?);
        for (w, p) in self.drive_frequencies.iter().zip(&points) {
            out.summary.push(format!("drive frequency {}: {} with power {}", fmt_sig(*w), p.currents.regime, fmt_sig(p.currents.power)));
        }
        let labels = points[0].labels.clone();
        let rows: Vec<(f64, FloquetCurrents<f64>)> = self.drive_frequencies.iter().copied().zip(points.into_iter().map(|p| p.currents)).collect();
        out.files.push(("limit_cycle.csv", limit_cycle_csv(&labels, &rows)));
        Ok(out)
    }
}
