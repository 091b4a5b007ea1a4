use serde::{Deserialize, Serialize};

use qthermo_core::gkls::{build_davies, fmt_sig, stationary_state, trajectory, Coupling, GklsGenerator};
use qthermo_core::opcore::{eig_hermitian, propagator, DensityMatrix};
use qthermo_core::random::{random_density, seeded, SeededRng};
use qthermo_core::scalar::CVector;

use super::{invalid, law_checks, Experiment, Outcome, RunError, KMS_TOL};
use crate::config::{BathConfig, CouplingConfig, FormConfig, OperatorName, SystemConfig, Tolerances};

fn default_system() -> SystemConfig {
    SystemConfig::Qubit { omega: 1.0 }
}

fn default_couplings() -> Vec<CouplingConfig> {
    vec![CouplingConfig { operator: OperatorName::SigmaX, bath: BathConfig::new("b", 1.0, FormConfig::Flat { strength: 0.1, cutoff: 50.0 }) }]
}

fn generator(system: &SystemConfig, couplings: &[CouplingConfig], rng: &mut SeededRng) -> Result<GklsGenerator<f64>, RunError> {
    if couplings.is_empty() {
        return Err(invalid("at least one coupling is required"));
    }
    let h = system.hamiltonian(rng)?;
    let mut cs = Vec::with_capacity(couplings.len());
    for c in couplings {
        cs.push(Coupling::new(system.operator(c.operator, rng)?, c.bath.build()?));
    }
    Ok(build_davies(&h, &cs)?)
}

fn gibbs_at_own_temperature(gen: &GklsGenerator<f64>) -> Result<f64, RunError> {
    Ok(gen.gibbs_residual()?)
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    #[default]
    Ground,
    Excited,
    MaximallyMixed,
    Random,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Evolve {
    pub system: SystemConfig,
    pub couplings: Vec<CouplingConfig>,
    pub initial: Initial,
    pub t_max: f64,
    pub points: usize,
}

impl Default for Evolve {
    fn default() -> Self {
        Self { system: default_system(), couplings: default_couplings(), initial: Initial::Ground, t_max: 50.0, points: 101 }
    }
}

fn eigenstate(gen: &GklsGenerator<f64>, highest: bool) -> Result<DensityMatrix<f64>, RunError> {
    let eig = eig_hermitian(gen.hamiltonian())?;
    let k = if highest { eig.dim() - 1 } else { 0 };
    let v: CVector<f64> = eig.vectors.column(k).into_owned();
    Ok(DensityMatrix::pure(&v)?)
}

impl Experiment for Evolve {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if !(self.t_max > 0.0) || self.points < 2 {
            return Err(invalid("need t_max > 0 and at least two points"));
        }
        let mut rng = seeded(seed);
        let gen = generator(&self.system, &self.couplings, &mut rng)?;
        let rho0 = match self.initial {
            Initial::Ground => eigenstate(&gen, false)?,
            Initial::Excited => eigenstate(&gen, true)?,
            Initial::MaximallyMixed => DensityMatrix::maximally_mixed(gen.dim()),
            Initial::Random => random_density(gen.dim(), &mut rng),
        };
        let dt = self.t_max / (self.points - 1) as f64;
        let grid: Vec<f64> = (0..self.points).map(|k| k as f64 * dt).collect();
        let ledger = trajectory(&gen, &rho0, &grid)?;
        let choi = [dt, self.t_max].iter().map(|&t| propagator(gen.liouvillian(), t).map(|m| m.choi_min_eigenvalue())).collect::<Result<Vec<_>, _>>()?;
        let mut out = Outcome::default();
        law_checks(
            &mut out.certificate,
            tol,
            (ledger.first_law_residual(), 1e-6),
            ledger.min_entropy_production(),
            choi.into_iter().fold(f64::INFINITY, f64::min),
            gibbs_at_own_temperature(&gen)?,
        );
        out.certificate.at_most("kms_residual", gen.detailed_balance_residual()?, tol.kms.unwrap_or(KMS_TOL));
        let last = ledger.rows.last().expect("grid is non-empty");
        out.summary.push(format!("final energy {} at t = {}", fmt_sig(last.energy), fmt_sig(last.t)));
        out.summary.extend(ledger.warnings.iter().cloned());
        out.files.push(("ledger.csv", ledger.to_csv()));
        Ok(out)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Audit {
    pub system: SystemConfig,
    pub couplings: Vec<CouplingConfig>,
    /// Times at which the propagator is checked for complete positivity.
    pub cp_times: Vec<f64>,
}

impl Default for Audit {
    fn default() -> Self {
        let mut couplings = default_couplings();
        couplings.push(CouplingConfig { operator: OperatorName::SigmaX, bath: BathConfig::new("c", 0.3, FormConfig::Ohmic { strength: 0.05, cutoff: 20.0 }) });
        Self { system: default_system(), couplings, cp_times: vec![0.1, 1.0, 10.0, 100.0] }
    }
}

impl Experiment for Audit {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        let mut rng = seeded(seed);
        let gen = generator(&self.system, &self.couplings, &mut rng)?;
        let mut rates = String::from("bath,coupling,frequency,rate\n");
        for ch in gen.channels() {
            rates.push_str(&format!("{},{},{},{}\n", gen.baths()[ch.bath].label, ch.coupling, fmt_sig(ch.frequency), fmt_sig(ch.rate)));
        }
        let st = stationary_state(&gen)?;
        let j = gen.heat_currents(st.matrix());
        let jsum: f64 = j.iter().sum();
        let scale = j.iter().fold(f64::EPSILON, |a, x| a.max(x.abs()));
        let mut production = 0.0;
        for (b, &jk) in gen.baths().iter().zip(&j) {
            production -= b.beta.unwrap_or(0.0) * jk;
        }
        let mut choi = f64::INFINITY;
        for &t in &self.cp_times {
            choi = choi.min(propagator(gen.liouvillian(), t)?.choi_min_eigenvalue());
        }
        let mut out = Outcome::default();
        law_checks(&mut out.certificate, tol, (jsum.abs() / scale, 1e-8), production, choi, gibbs_at_own_temperature(&gen)?);
        out.certificate.at_most("kms_residual", gen.detailed_balance_residual()?, tol.kms.unwrap_or(KMS_TOL));
        out.summary.push(format!("{} channels; steady heat currents {}", gen.channels().len(), j.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(" ")));
        out.files.push(("rates.csv", rates));
        Ok(out)
    }
}
