use serde::{Deserialize, Serialize};

use qthermo_core::gkls::fmt_sig;
use qthermo_core::opcore::{embed, Operator};
use qthermo_core::random::seeded;
use qthermo_core::states::{correlation_function, diagonal_vs_microcanonical, heisenberg_chain, kms_check, neel_state};

use super::{invalid, Experiment, Outcome, RunError, KMS_TOL};
use crate::config::{OperatorName, SystemConfig, Temperature, Tolerances};

const ETH_GAP_FRACTION: f64 = 0.1;

/// Disordered Heisenberg chain started in the Néel state; the observable is
/// `sigma_z` on one site. The config seed draws the random fields.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Eth {
    pub sites: usize,
    pub field_width: f64,
    pub site: usize,
    /// Width of the microcanonical energy window.
    pub window: f64,
}

impl Default for Eth {
    fn default() -> Self {
        Self { sites: 8, field_width: 1.0, site: 4, window: 1.0 }
    }
}

impl Experiment for Eth {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if self.site >= self.sites {
            return Err(invalid(format!("site {} is outside a chain of {} sites", self.site, self.sites)));
        }
        let h = heisenberg_chain::<f64>(self.sites, self.field_width, seed)?;
        let a = embed(&Operator::pauli_z(), self.site, &vec![2; self.sites])?;
        let cmp = diagonal_vs_microcanonical(&h, &neel_state::<f64>(self.sites), &a, self.window)?;
        let fraction = cmp.gap / cmp.observable_range;
        let mut out = Outcome::default();
        out.certificate.at_most("eth_gap_fraction", fraction, tol.eth_gap_fraction.unwrap_or(ETH_GAP_FRACTION));
        let csv = format!(
            "energy,diagonal_average,microcanonical_average,gap,observable_range,window_states\n{},{},{},{},{},{}\n",
            fmt_sig(cmp.energy),
            fmt_sig(cmp.diagonal_average),
            fmt_sig(cmp.microcanonical_average),
            fmt_sig(cmp.gap),
            fmt_sig(cmp.observable_range),
            cmp.window_states
        );
        out.summary.push(format!("gap {} over {} states in the window", fmt_sig(cmp.gap), cmp.window_states));
        out.files.push(("eth.csv", csv));
        Ok(out)
    }
}

/// `F_AB(t) = Tr(rho_beta A(t) B)` on a uniform time grid.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Correlations {
    pub system: SystemConfig,
    pub temperature: Temperature,
    pub a: OperatorName,
    pub b: OperatorName,
    pub t_max: f64,
    pub points: usize,
}

impl Default for Correlations {
    fn default() -> Self {
        Self {
            system: SystemConfig::Random { dim: 4 },
            temperature: Temperature(1.0),
            a: OperatorName::Random,
            b: OperatorName::Random,
            t_max: 20.0,
            points: 201,
        }
    }
}

impl Experiment for Correlations {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if !(self.t_max > 0.0) || self.points < 2 {
            return Err(invalid("need t_max > 0 and at least two points"));
        }
        if !(self.temperature.0 > 0.0) {
            return Err(invalid("correlations need a positive temperature"));
        }
        let mut rng = seeded(seed);
        let h = self.system.hamiltonian(&mut rng)?;
        let a = self.system.operator(self.a, &mut rng)?;
        let b = self.system.operator(self.b, &mut rng)?;
        let beta = 1.0 / self.temperature.0;
        let mut csv = String::from("t,re,im\n");
        let dt = self.t_max / (self.points - 1) as f64;
        for k in 0..self.points {
            let t = k as f64 * dt;
            let f = correlation_function(&h, beta, &a, &b, t)?;
            csv.push_str(&format!("{},{},{}\n", fmt_sig(t), fmt_sig(f.re), fmt_sig(f.im)));
        }
        let mut out = Outcome::default();
        out.certificate.at_most("kms_residual", kms_check(&h, beta, &a, &b)?, tol.kms.unwrap_or(KMS_TOL));
        out.files.push(("correlations.csv", csv));
        Ok(out)
    }
}
