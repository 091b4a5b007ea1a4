use std::fmt::Write;

use crate::opcore::DensityMatrix;
use crate::scalar::{fmax, Real};

/// Thermodynamic quantities at one instant.
#[derive(Clone, Debug)]
pub struct LedgerRow<T: Real> {
    pub t: T,
    /// `E = Tr(rho H)`.
    pub energy: T,
    /// Power delivered by the system, `P = -Tr(rho dH/dt)`.
    pub power: T,
    pub entropy: T,
    /// Entropy production rate.
    pub sigma: T,
    /// Heat currents into the system, one per bath.
    pub heat: Vec<T>,
    /// `dE/dt = Tr(rho dH/dt) + Tr(H L rho)` from the assembled Liouvillian.
    pub energy_rate: T,
}

/// Time series of energy, power, entropy and heat currents along a trajectory.
#[derive(Clone, Debug)]
pub struct ThermoLedger<T: Real> {
    pub bath_labels: Vec<String>,
    pub rows: Vec<LedgerRow<T>>,
    pub states: Vec<DensityMatrix<T>>,
    pub warnings: Vec<String>,
    /// Largest `|L_k(t) rho_k(t)|` over the instantaneous generators.
    pub max_gibbs_residual: Option<T>,
}

/// Formats with 12 significant digits; negative zero prints as zero.
pub fn fmt_sig<T: Real>(x: T) -> String {
    let v = x.to_f64_lossy() + 0.0;
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

impl<T: Real> ThermoLedger<T> {
    /// Largest `|dE/dt - (sum_k J_k - P)|` relative to the largest of
    /// `|dE/dt|`, `|sum J|`, `|P|` over the run (absolute if all vanish).
    pub fn first_law_residual(&self) -> T {
        let mut worst = T::zero();
        let mut scale = T::zero();
        for r in &self.rows {
            let jsum = r.heat.iter().fold(T::zero(), |a, &b| a + b);
            worst = fmax(worst, (r.energy_rate - (jsum - r.power)).abs());
            scale = fmax(scale, fmax(r.energy_rate.abs(), fmax(jsum.abs(), r.power.abs())));
        }
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }

    /// Integrated check `E(t_n) - E(t_0)` against the trapezoidal integral
    /// of `sum J - P`, relative to the integral of `|sum J| + |P|`.
    pub fn integrated_first_law_residual(&self) -> T {
        let mut acc = T::zero();
        let mut mag = T::zero();
        let mut worst = T::zero();
        let half = T::of(0.5);
        for w in self.rows.windows(2) {
            let f = |r: &LedgerRow<T>| r.heat.iter().fold(T::zero(), |a, &b| a + b) - r.power;
            let g = |r: &LedgerRow<T>| r.heat.iter().fold(T::zero(), |a, &b| a + b.abs()) + r.power.abs();
            let dt = w[1].t - w[0].t;
            acc += half * dt * (f(&w[0]) + f(&w[1]));
            mag += half * dt * (g(&w[0]) + g(&w[1]));
            let de = w[1].energy - self.rows[0].energy;
            worst = fmax(worst, (de - acc).abs());
        }
        if mag > T::zero() {
            worst / mag
        } else {
            worst
        }
    }

    /// Smallest entropy production rate along the run.
    pub fn min_entropy_production(&self) -> T {
        self.rows.iter().fold(T::infinity(), |a, r| if r.sigma < a { r.sigma } else { a })
    }

    pub fn final_state(&self) -> Option<&DensityMatrix<T>> {
        self.states.last()
    }

    /// `t,E,P,S_vn,sigma,J_<bath>...`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,E,P,S_vn,sigma");
        for l in &self.bath_labels {
            let _ = write!(s, ",J_{l}");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{},{}", fmt_sig(r.t), fmt_sig(r.energy), fmt_sig(r.power), fmt_sig(r.entropy), fmt_sig(r.sigma));
            for j in &r.heat {
                let _ = write!(s, ",{}", fmt_sig(*j));
            }
            s.push('\n');
        }
        s
    }
}
