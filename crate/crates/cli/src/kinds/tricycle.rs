use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qthermo_core::gkls::fmt_sig;
use qthermo_core::machines::{
    build_tricycle, third_law_sweep, tricycle_steady, FilterCoupling, SweepPolicy, TricycleRepresentation, TricycleSpec, DEFAULT_EPSILON,
};
use qthermo_core::opcore::propagator;

use super::{invalid, law_checks, Experiment, Outcome, RunError, KMS_TOL};
use crate::config::{BathConfig, BathShape, FormConfig, Temperature, Tolerances};

const FIRST_LAW_TOL: f64 = 1e-9;
/// Time at which the steady-state propagator is checked for complete positivity.
const CP_TIME: f64 = 100.0;

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepresentationConfig {
    #[default]
    Qubits,
    Oscillators { levels: usize },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterConfig {
    #[default]
    Quadrature,
    Bare,
}

fn device(
    omega_h: f64,
    omega_c: f64,
    epsilon: f64,
    baths: [qthermo_core::baths::BathSpec<f64>; 3],
    rep: RepresentationConfig,
    filter: FilterConfig,
) -> TricycleSpec<f64> {
    let [hot, cold, work] = baths;
    let mut s = TricycleSpec::new(omega_h, omega_c, hot, cold, work).with_epsilon(epsilon);
    s.representation = match rep {
        RepresentationConfig::Qubits => TricycleRepresentation::Qubits,
        RepresentationConfig::Oscillators { levels } => TricycleRepresentation::Oscillators { levels },
    };
    s.filter = match filter {
        FilterConfig::Quadrature => FilterCoupling::Quadrature,
        FilterConfig::Bare => FilterCoupling::Bare,
    };
    s
}

/// Law quantities of one tricycle operating point.
struct PointLaws {
    first: f64,
    second_margin: f64,
    choi: f64,
    gibbs: f64,
    kms: f64,
}

fn point_laws(spec: &TricycleSpec<f64>) -> Result<(PointLaws, qthermo_core::machines::TricycleSteady<f64>), RunError> {
    let st = tricycle_steady(spec)?;
    let gen = build_tricycle(spec)?;
    let laws = PointLaws {
        first: st.first_law_residual,
        second_margin: -st.second_law_value,
        choi: propagator(gen.liouvillian(), CP_TIME)?.choi_min_eigenvalue(),
        gibbs: gen.gibbs_residual()?,
        kms: gen.detailed_balance_residual()?,
    };
    Ok((laws, st))
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tricycle {
    pub omega_h: f64,
    pub omega_c: f64,
    /// Work filter frequency; resonant `omega_h - omega_c` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_w: Option<f64>,
    pub epsilon: f64,
    pub hot: BathConfig,
    pub cold: BathConfig,
    pub work: BathConfig,
    pub representation: RepresentationConfig,
    pub filter: FilterConfig,
}

impl Default for Tricycle {
    fn default() -> Self {
        let flat = FormConfig::Flat { strength: 0.05, cutoff: 50.0 };
        Self {
            omega_h: 1.0,
            omega_c: 0.4,
            omega_w: None,
            epsilon: DEFAULT_EPSILON,
            hot: BathConfig::new("h", 1.0, flat),
            cold: BathConfig::new("c", 0.5, flat),
            work: BathConfig { temperature: Temperature(f64::INFINITY), ..BathConfig::new("w", 1.0, flat) },
            representation: RepresentationConfig::Qubits,
            filter: FilterConfig::Quadrature,
        }
    }
}

impl Experiment for Tricycle {
    fn run(&self, _seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        let baths = [self.hot.build()?, self.cold.build()?, self.work.build()?];
        let mut spec = device(self.omega_h, self.omega_c, self.epsilon, baths, self.representation, self.filter);
        if let Some(w) = self.omega_w {
            spec.omega_w = w;
        }
        let (laws, st) = point_laws(&spec)?;
        let mut out = Outcome::default();
        law_checks(&mut out.certificate, tol, (laws.first, FIRST_LAW_TOL), laws.second_margin, laws.choi, laws.gibbs);
        out.certificate.at_most("kms_residual", laws.kms, tol.kms.unwrap_or(KMS_TOL));
        let mut csv = String::from("bath,temperature,J\n");
        for (b, j) in [&self.hot, &self.cold, &self.work].iter().zip(st.heat) {
            csv.push_str(&format!("{},{},{}\n", b.label, fmt_sig(b.temperature.0), fmt_sig(j)));
        }
        let mode = if st.heat[1] > 0.0 { "cooling" } else { "not cooling" };
        out.summary.push(format!("J_c = {} ({mode}), gain {}", fmt_sig(st.heat[1]), fmt_sig(st.gain)));
        out.files.push(("steady.csv", csv));
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub omega_c_max: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub omega_h: f64,
    pub epsilon: f64,
    pub hot: BathConfig,
    /// Cold bath; its temperature runs over `t_c`.
    pub cold: BathShape,
    pub work: BathConfig,
    pub representation: RepresentationConfig,
    pub filter: FilterConfig,
    pub t_c: Vec<f64>,
    pub policy: PolicyConfig,
}

impl Default for Sweep {
    fn default() -> Self {
        let flat = FormConfig::Flat { strength: 0.01, cutoff: 50.0 };
        Self {
            omega_h: 1.0,
            epsilon: 1e-5,
            hot: BathConfig::new("h", 1.0, FormConfig::Ohmic { strength: 0.01, cutoff: 20.0 }),
            cold: BathShape::new("c", FormConfig::PowerLaw { strength: 0.01, exponent: 3.0, cutoff: 20.0 }),
            work: BathConfig { temperature: Temperature(f64::INFINITY), ..BathConfig::new("w", 1.0, flat) },
            representation: RepresentationConfig::Qubits,
            filter: FilterConfig::Quadrature,
            t_c: vec![0.16, 0.08, 0.04, 0.02, 0.01],
            policy: PolicyConfig { ratio_lo: 0.2, ratio_hi: 8.0, omega_c_max: 0.95, tol: 1e-4 },
        }
    }
}

impl Experiment for Sweep {
    fn run(&self, _seed: u64, tol: &Tolerances) -> Result<Outcome, RunError> {
        if self.t_c.len() < 2 {
            return Err(invalid("t_c needs at least two temperatures"));
        }
        let family = |t_c: f64, omega_c: f64| -> qthermo_core::Result<TricycleSpec<f64>> {
            Ok(device(self.omega_h, omega_c, self.epsilon, [self.hot.build()?, self.cold.at(t_c)?, self.work.build()?], self.representation, self.filter))
        };
        let p = self.policy;
        let sweep = third_law_sweep(&family, &self.t_c, SweepPolicy { ratio_lo: p.ratio_lo, ratio_hi: p.ratio_hi, omega_c_max: p.omega_c_max, tol: p.tol })?;
        let laws = sweep
            .rows
            .par_iter()
            .map(|r| Ok(point_laws(&family(r.t_c, r.omega_c_star)?)?.0))
            .collect::<Result<Vec<PointLaws>, RunError>>()?;
        let fold = |f: fn(&PointLaws) -> f64, init: f64, pick: fn(f64, f64) -> f64| laws.iter().map(f).fold(init, pick);
        let mut out = Outcome::default();
        law_checks(
            &mut out.certificate,
            tol,
            (fold(|l| l.first, 0.0, f64::max), FIRST_LAW_TOL),
            fold(|l| l.second_margin, f64::INFINITY, f64::min),
            fold(|l| l.choi, f64::INFINITY, f64::min),
            fold(|l| l.gibbs, 0.0, f64::max),
        );
        out.certificate.at_most("kms_residual", fold(|l| l.kms, 0.0, f64::max), tol.kms.unwrap_or(KMS_TOL));
        out.certificate.at_least("third_law_monotone", if sweep.monotone { 1.0 } else { 0.0 }, 1.0);
        out.summary.push(format!(
            "exponent {}, omega_c*/T_c mean {} (CV {})",
            sweep.exponent.map_or("-".into(), fmt_sig),
            fmt_sig(sweep.ratio_mean),
            fmt_sig(sweep.ratio_cv)
        ));
        for r in sweep.rows.iter().filter(|r| !r.cooling) {
            out.summary.push(format!("no cooling at T_c = {}", fmt_sig(r.t_c)));
        }
        out.files.push(("sweep.csv", sweep.to_csv()));
        Ok(out)
    }
}
