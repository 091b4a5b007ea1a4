use serde::{Deserialize, Serialize};

use qthermo_core::gkls::{build_davies, fmt_sig, Coupling};
use qthermo_core::machines::{
    optimize_power, run_otto, Bound, CycleReport, CycleSpec, FreeParameter, OptimizerOptions, OttoDurations, Protocol, WorkingMedium,
};

use super::{invalid, law_checks, Experiment, Outcome, RunError, KMS_TOL};
use crate::config::{BathConfig, FormConfig, StatisticsConfig, Tolerances};

const CARNOT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumConfig {
    /// `omega S_z + transverse S_x`.
    Qubit { transverse: f64 },
    Oscillator { levels: usize },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineConfig {
    #[default]
    Engine,
    Refrigerator,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolConfig {
    #[default]
    Adiabatic,
    LinearRamp,
    Sudden,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DurationsConfig {
    pub hot: f64,
    pub expansion: f64,
    pub cold: f64,
    pub compression: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Otto {
    pub medium: MediumConfig,
    pub machine: MachineConfig,
    pub omega_h: f64,
    pub omega_c: f64,
    pub hot: BathConfig,
    pub cold: BathConfig,
    pub durations: DurationsConfig,
    pub protocol: ProtocolConfig,
    /// Strength of an energy-basis dephasing stroke after each adiabat.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<f64>,
    /// Iterations reported in `cycle.csv`, starting from the maximally mixed state.
    pub cycles: usize,
}

impl Default for Otto {
    fn default() -> Self {
        let ohmic = FormConfig::Ohmic { strength: 0.1, cutoff: 20.0 };
        Self {
            medium: MediumConfig::Qubit { transverse: 0.0 },
            machine: MachineConfig::Engine,
            omega_h: 2.0,
            omega_c: 1.0,
            hot: BathConfig::new("h", 2.0, ohmic),
            cold: BathConfig::new("c", 0.5, ohmic),
            durations: DurationsConfig { hot: 3.0, expansion: 1.0, cold: 3.0, compression: 1.0 },
            protocol: ProtocolConfig::Adiabatic,
            dephasing: None,
            cycles: 20,
        }
    }
}

impl Otto {
    fn medium(&self) -> WorkingMedium<f64> {
        match self.medium {
            MediumConfig::Qubit { transverse } => WorkingMedium::Qubit { transverse },
            MediumConfig::Oscillator { levels } => WorkingMedium::Oscillator { levels },
        }
    }

    fn spec(&self) -> Result<CycleSpec<f64>, RunError> {
        if let MediumConfig::Oscillator { levels } = self.medium {
            if levels < 2 {
                return Err(invalid("oscillator needs at least two levels"));
            }
        }
        let d = self.durations;
        let durations = OttoDurations { hot: d.hot, expansion: d.expansion, cold: d.cold, compression: d.compression };
        let protocol = match self.protocol {
            ProtocolConfig::Adiabatic => Protocol::Adiabatic,
            ProtocolConfig::LinearRamp => Protocol::LinearRamp,
            ProtocolConfig::Sudden => Protocol::Sudden,
        };
        let (hot, cold) = (self.hot.build()?, self.cold.build()?);
        let spec = match self.machine {
            MachineConfig::Engine => CycleSpec::otto(self.medium(), self.omega_h, self.omega_c, hot, cold, durations, protocol),
            MachineConfig::Refrigerator => CycleSpec::otto_refrigerator(self.medium(), self.omega_h, self.omega_c, hot, cold, durations, protocol),
        };
        Ok(match self.dephasing {
            Some(s) => spec.with_dephasing_after_adiabats(s),
            None => spec,
        })
    }
}

/// Largest Gibbs and detailed-balance residuals of the two isochore generators.
fn isochore_residuals(spec: &CycleSpec<f64>) -> Result<(f64, f64), RunError> {
    let (mut gibbs, mut kms) = (0.0f64, 0.0f64);
    for (omega, bath) in [(spec.omega_h, &spec.hot), (spec.omega_c, &spec.cold)] {
        let gen = build_davies(&spec.medium.hamiltonian(omega), &[Coupling::new(spec.medium.coupling(), bath.clone())])?;
        gibbs = gibbs.max(gen.gibbs_residual()?);
        kms = kms.max(gen.detailed_balance_residual()?);
    }
    Ok((gibbs, kms))
}

fn certify(spec: &CycleSpec<f64>, report: &CycleReport<f64>, tol: &Tolerances, out: &mut Outcome) -> Result<(), RunError> {
    let (gibbs, kms) = isochore_residuals(spec)?;
    law_checks(&mut out.certificate, tol, (report.first_law_residual, 1e-8), report.entropy_production, report.min_choi, gibbs);
    out.certificate.at_most("kms_residual", kms, tol.kms.unwrap_or(KMS_TOL));
    if let Some(eta) = report.efficiency {
        out.certificate.at_least("carnot_margin", report.carnot_efficiency - eta, -CARNOT_TOL);
    } else if let Some(cop) = report.cop {
        out.certificate.at_least("carnot_margin", report.carnot_cop - cop, -CARNOT_TOL);
    }
    out.summary.push(format!(
        "limit cycle: W = {}, Q_h = {}, Q_c = {}, efficiency {}, COP {}",
        fmt_sig(report.work),
        fmt_sig(report.q_h),
        fmt_sig(report.q_c),
        report.efficiency.map_or("-".into(), fmt_sig),
        report.cop.map_or("-".into(), fmt_sig)
    ));
    out.summary.extend(report.warnings.iter().cloned());
    Ok(())
}

impl Experiment for Otto {
    fn run(&self, _seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if self.cycles == 0 {
            return Err(invalid("cycles must be at least 1"));
        }
        let spec = self.spec()?;
        let report = run_otto(&spec, self.cycles)?;
        let mut out = Outcome::default();
        certify(&spec, &report, tol, &mut out)?;
        out.files.push(("cycle.csv", report.to_csv()));
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ParameterName {
    OmegaHot,
    OmegaCold,
    Duration,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub param: ParameterName,
    /// Stroke index, required for `duration`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stroke: Option<usize>,
    pub lower: f64,
    pub upper: f64,
}

impl BoundConfig {
    fn build(&self) -> Result<Bound<f64>, RunError> {
        let param = match (self.param, self.stroke) {
            (ParameterName::OmegaHot, None) => FreeParameter::OmegaHot,
            (ParameterName::OmegaCold, None) => FreeParameter::OmegaCold,
            (ParameterName::Duration, Some(k)) => FreeParameter::Duration(k),
            (ParameterName::Duration, None) => return Err(invalid("a duration bound needs 'stroke'")),
            (_, Some(_)) => return Err(invalid("'stroke' applies only to duration bounds")),
        };
        Ok(Bound { param, lower: self.lower, upper: self.upper })
    }

    fn label(&self) -> String {
        match (self.param, self.stroke) {
            (ParameterName::OmegaHot, _) => "omega_h".into(),
            (ParameterName::OmegaCold, _) => "omega_c".into(),
            (ParameterName::Duration, k) => format!("duration_{}", k.unwrap_or(0)),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Optimize {
    pub cycle: Otto,
    pub bounds: Vec<BoundConfig>,
    pub restarts: usize,
    pub max_evaluations: usize,
}

impl Default for Optimize {
    fn default() -> Self {
        let fermi = |label: &str, t: f64| BathConfig {
            statistics: StatisticsConfig::Fermi,
            ..BathConfig::new(label, t, FormConfig::Flat { strength: 0.5, cutoff: 100.0 })
        };
        let cycle = Otto {
            omega_h: 4.0,
            omega_c: 2.0,
            hot: fermi("h", 4.0),
            cold: fermi("c", 1.0),
            durations: DurationsConfig { hot: 1.0, expansion: 0.0, cold: 1.0, compression: 0.0 },
            cycles: 1,
            ..Otto::default()
        };
        let w = |param| BoundConfig { param, stroke: None, lower: 0.1, upper: 30.0 };
        let opts = OptimizerOptions::default();
        Self { cycle, bounds: vec![w(ParameterName::OmegaHot), w(ParameterName::OmegaCold)], restarts: opts.restarts, max_evaluations: opts.max_evaluations }
    }
}

impl Experiment for Optimize {
    fn run(&self, seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if self.bounds.is_empty() {
            return Err(invalid("at least one bound is required"));
        }
        let spec = self.cycle.spec()?;
        let bounds = self.bounds.iter().map(BoundConfig::build).collect::<Result<Vec<_>, _>>()?;
        let opts = OptimizerOptions { restarts: self.restarts, max_evaluations: self.max_evaluations, seed, ..OptimizerOptions::default() };
        let opt = optimize_power(&spec, &bounds, &opts)?;
        let best = qthermo_core::machines::apply_parameters(&spec, &bounds, &opt.values)?;
        let report = run_otto(&best, self.cycle.cycles.max(1))?;
        let mut csv = String::from("quantity,value\n");
        for (b, v) in self.bounds.iter().zip(&opt.values) {
            csv.push_str(&format!("{},{}\n", b.label(), fmt_sig(*v)));
        }
        for (name, v) in [("max_power", opt.max_power), ("efficiency", opt.efficiency.unwrap_or(f64::NAN)), ("eta_ca", opt.eta_ca), ("eta_c", opt.eta_c)] {
            csv.push_str(&format!("{name},{}\n", fmt_sig(v)));
        }
        csv.push_str(&format!("evaluations,{}\nconverged,{}\n", opt.evaluations, opt.converged));
        let mut out = Outcome::default();
        certify(&best, &report, tol, &mut out)?;
        out.summary.push(format!(
            "max power {} at efficiency {} (eta_ca {}, eta_c {})",
            fmt_sig(opt.max_power),
            opt.efficiency.map_or("-".into(), fmt_sig),
            fmt_sig(opt.eta_ca),
            fmt_sig(opt.eta_c)
        ));
        out.summary.extend(opt.warnings.iter().cloned());
        out.files.push(("optimum.csv", csv));
        out.files.push(("cycle.csv", report.to_csv()));
        Ok(out)
    }
}
