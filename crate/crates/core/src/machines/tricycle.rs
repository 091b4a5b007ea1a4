use rayon::prelude::*;

use super::trotter::fit_slope;
use crate::baths::BathSpec;
use crate::error::{Error, Result};
use crate::gkls::{build_davies, fmt_sig, stationary_state, Coupling, GklsGenerator};
use crate::opcore::{embed, DensityMatrix, Operator};
use crate::scalar::{fmax, Real};

/// Hilbert space of the three filter modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TricycleRepresentation {
    Qubits,
    Oscillators { levels: usize },
}

/// How each filter mode couples to its bath.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterCoupling {
    /// Field quadrature `x_k / sqrt(2 omega_k)`.
    Quadrature,
    /// `x_k` itself (`sigma_x` or `a + a^dagger`).
    Bare,
}

/// Continuous absorption refrigerator: hot, cold and work filter modes with
/// `omega_w = omega_h - omega_c` and the three-body exchange
/// `eps (a_h a_c^dagger a_w^dagger + h.c.)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TricycleSpec<T: Real> {
    pub omega_h: T,
    pub omega_c: T,
    pub omega_w: T,
    pub epsilon: T,
    pub hot: BathSpec<T>,
    pub cold: BathSpec<T>,
    pub work: BathSpec<T>,
    pub representation: TricycleRepresentation,
    pub filter: FilterCoupling,
}

/// Default three-body coupling.
pub const DEFAULT_EPSILON: f64 = 1e-3;

impl<T: Real> TricycleSpec<T> {
    /// Resonant three-qubit tricycle with quadrature filter coupling.
    pub fn new(omega_h: T, omega_c: T, hot: BathSpec<T>, cold: BathSpec<T>, work: BathSpec<T>) -> Self {
        Self {
            omega_h,
            omega_c,
            omega_w: omega_h - omega_c,
            epsilon: T::of(DEFAULT_EPSILON),
            hot,
            cold,
            work,
            representation: TricycleRepresentation::Qubits,
            filter: FilterCoupling::Quadrature,
        }
    }

    pub fn with_epsilon(mut self, eps: T) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > T::zero()) || !(self.omega_w > T::zero()) || !(self.omega_h > T::zero()) {
            return Err(Error::InvalidParameter("filter frequencies must be positive".into()));
        }
        let expected = self.omega_h - self.omega_c;
        if (self.omega_w - expected).abs() > T::of(1e-12) * fmax(T::one(), self.omega_h) {
            return Err(Error::OffResonance { omega_w: self.omega_w.to_f64_lossy(), expected: expected.to_f64_lossy() });
        }
        if !(self.epsilon >= T::zero()) {
            return Err(Error::InvalidParameter("epsilon must be non-negative".into()));
        }
        if let TricycleRepresentation::Oscillators { levels } = self.representation {
            if levels < 2 {
                return Err(Error::InvalidParameter("oscillator truncation needs at least two levels".into()));
            }
        }
        Ok(())
    }

    fn mode_dim(&self) -> usize {
        match self.representation {
            TricycleRepresentation::Qubits => 2,
            TricycleRepresentation::Oscillators { levels } => levels,
        }
    }

    /// Free Hamiltonian plus exchange term.
    pub fn hamiltonian(&self) -> Result<Operator<T>> {
        let d = self.mode_dim();
        let dims = [d, d, d];
        let (lower, number) = match self.representation {
            TricycleRepresentation::Qubits => (Operator::sigma_minus(), &Operator::sigma_plus() * &Operator::sigma_minus()),
            TricycleRepresentation::Oscillators { levels } => (Operator::annihilation(levels), Operator::number(levels)),
        };
        let mut h = Operator::zeros(d * d * d);
        for (k, w) in [self.omega_h, self.omega_c, self.omega_w].into_iter().enumerate() {
            h = &h + &embed(&number, k, &dims)?.scale(w);
        }
        let ah = embed(&lower, 0, &dims)?;
        let ac = embed(&lower, 1, &dims)?;
        let aw = embed(&lower, 2, &dims)?;
        let x = &(&ah * &ac.adjoint()) * &aw.adjoint();
        let hi = (&x + &x.adjoint()).scale(self.epsilon);
        Operator::hermitian((&h + &hi).into_matrix())
    }

    fn coupling_ops(&self) -> Result<[Operator<T>; 3]> {
        let d = self.mode_dim();
        let dims = [d, d, d];
        let x = match self.representation {
            TricycleRepresentation::Qubits => Operator::pauli_x(),
            TricycleRepresentation::Oscillators { levels } => {
                let a = Operator::annihilation(levels);
                Operator::hermitian((&a + &a.adjoint()).into_matrix())?
            }
        };
        let mut out = Vec::with_capacity(3);
        for (k, w) in [self.omega_h, self.omega_c, self.omega_w].into_iter().enumerate() {
            let op = embed(&x, k, &dims)?;
            out.push(match self.filter {
                FilterCoupling::Quadrature => op.scale(T::one() / (T::of(2.0) * w).sqrt()),
                FilterCoupling::Bare => op,
            });
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    }
}

/// Global Davies generator of the interacting tricycle; baths in the order
/// hot, cold, work.
pub fn build_tricycle<T: Real>(spec: &TricycleSpec<T>) -> Result<GklsGenerator<T>> {
    spec.validate()?;
    let h = spec.hamiltonian()?;
    let [xh, xc, xw] = spec.coupling_ops()?;
    build_davies(
        &h,
        &[Coupling::new(xh, spec.hot.clone()), Coupling::new(xc, spec.cold.clone()), Coupling::new(xw, spec.work.clone())],
    )
}

/// Population gain `p_2 - p_1` of the three-level reduction with the hot
/// transition at `omega_h` and the cold one at `omega_c`.
pub fn gain<T: Real>(omega_h: T, omega_c: T, t_h: T, t_c: T) -> T {
    let boltz = |w: T, t: T| if t == T::zero() { T::zero() } else { (-w / t).exp() };
    let (x2, x1) = (boltz(omega_h, t_h), boltz(omega_c, t_c));
    (x2 - x1) / (T::one() + x1 + x2)
}

/// Steady-state currents of the tricycle.
#[derive(Clone, Debug)]
pub struct TricycleSteady<T: Real> {
    /// `[J_h, J_c, J_w]`, positive into the device.
    pub heat: [T; 3],
    /// `sum_k J_k / T_k` (should be `<= 0`).
    pub second_law_value: T,
    /// `|J_h + J_c + J_w|`.
    pub first_law_residual: T,
    pub gain: T,
    pub state: DensityMatrix<T>,
}

pub fn tricycle_steady<T: Real>(spec: &TricycleSpec<T>) -> Result<TricycleSteady<T>> {
    let gen = build_tricycle(spec)?;
    let state = stationary_state(&gen)?;
    let j = gen.heat_currents(state.matrix());
    let betas = [spec.hot.beta(), spec.cold.beta(), spec.work.beta()];
    let mut second = T::zero();
    for k in 0..3 {
        if betas[k] != T::zero() && j[k] != T::zero() {
            second += betas[k] * j[k];
        }
    }
    Ok(TricycleSteady {
        heat: [j[0], j[1], j[2]],
        second_law_value: second,
        first_law_residual: (j[0] + j[1] + j[2]).abs(),
        gain: gain(spec.omega_h, spec.omega_c, spec.hot.temperature(), spec.cold.temperature()),
        state,
    })
}

/// Search window for the cold filter frequency at each `T_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPolicy<T: Real> {
    /// Bracket on `omega_c / T_c`.
    pub ratio_lo: T,
    pub ratio_hi: T,
    /// Upper limit on `omega_c` itself (the work mode needs `omega_c < omega_h`).
    pub omega_c_max: T,
    /// Relative bracket width at which the golden-section search stops.
    pub tol: T,
}

/// One row of the third-law sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow<T: Real> {
    pub t_c: T,
    pub omega_c_star: T,
    pub j_c: T,
    /// `J_c / (omega_c G)`.
    pub k: T,
    /// Refrigerator gain `p_1 - p_2`.
    pub g: T,
    pub cooling: bool,
}

#[derive(Clone, Debug)]
pub struct ThirdLawSweep<T: Real> {
    /// Rows in the order of the input grid.
    pub rows: Vec<SweepRow<T>>,
    /// Fitted exponent of `J_c` against `T_c` over cooling rows.
    pub exponent: Option<T>,
    /// Mean and coefficient of variation of `omega_c* / T_c`.
    pub ratio_mean: T,
    pub ratio_cv: T,
    /// `J_c` strictly decreases as `T_c` decreases.
    pub monotone: bool,
}

impl<T: Real> ThirdLawSweep<T> {
    /// `T_c,omega_c_star,J_c,K,G`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("T_c,omega_c_star,J_c,K,G\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", fmt_sig(r.t_c), fmt_sig(r.omega_c_star), fmt_sig(r.j_c), fmt_sig(r.k), fmt_sig(r.g)));
        }
        s
    }
}

const GOLDEN_ITERATIONS: usize = 200;

fn golden_max<T: Real>(f: &dyn Fn(T) -> Result<T>, mut a: T, mut b: T, tol: T) -> Result<(T, T)> {
    let r = T::of((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a) <= tol * (a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// For each `T_c` maximizes the cold current over `omega_c = x T_c` with
/// `x` in the policy bracket. `family(T_c, omega_c)` builds the device.
/// Grid points run in parallel; rows keep the grid order.
pub fn third_law_sweep<T, F>(family: F, t_c_grid: &[T], policy: SweepPolicy<T>) -> Result<ThirdLawSweep<T>>
where
    T: Real,
    F: Fn(T, T) -> Result<TricycleSpec<T>> + Sync,
{
    if t_c_grid.iter().any(|&t| !(t >= T::of(1e-3))) {
        return Err(Error::InvalidParameter("cold temperatures must be at least 1e-3".into()));
    }
    if !(policy.ratio_lo > T::zero()) || !(policy.ratio_hi > policy.ratio_lo) {
        return Err(Error::InvalidParameter("ratio bracket must satisfy 0 < lo < hi".into()));
    }
    let rows = t_c_grid
        .par_iter()
        .map(|&t_c| -> Result<SweepRow<T>> {
            let jc = |x: T| -> Result<T> { Ok(tricycle_steady(&family(t_c, x * t_c)?)?.heat[1]) };
            let hi = crate::scalar::fmin(policy.ratio_hi, policy.omega_c_max / t_c);
            if !(hi > policy.ratio_lo) {
                return Err(Error::InvalidParameter(format!("empty ratio bracket at T_c = {}", t_c.to_f64_lossy())));
            }
            let (x, j) = golden_max(&jc, policy.ratio_lo, hi, policy.tol)?;
            let spec = family(t_c, x * t_c)?;
            let g = -gain(spec.omega_h, spec.omega_c, spec.hot.temperature(), t_c);
            let omega_c = x * t_c;
            Ok(SweepRow { t_c, omega_c_star: omega_c, j_c: j, k: j / (omega_c * g), g, cooling: j > T::zero() })
        })
        .collect::<Result<Vec<_>>>()?;
    let cooling: Vec<&SweepRow<T>> = rows.iter().filter(|r| r.cooling).collect();
    let exponent = fit_slope(cooling.iter().map(|r| (r.t_c, r.j_c)));
    let ratios: Vec<f64> = cooling.iter().map(|r| (r.omega_c_star / r.t_c).to_f64_lossy()).collect();
    let (mean, cv) = if ratios.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let n = ratios.len() as f64;
        let m = ratios.iter().sum::<f64>() / n;
        let var = ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / n;
        (m, var.sqrt() / m)
    };
    let mut by_t: Vec<&SweepRow<T>> = rows.iter().collect();
    by_t.sort_by(|a, b| b.t_c.partial_cmp(&a.t_c).expect("finite temperatures"));
    let monotone = by_t.windows(2).all(|w| w[1].j_c < w[0].j_c);
    Ok(ThirdLawSweep { rows, exponent, ratio_mean: T::of(mean), ratio_cv: T::of(cv), monotone })
}
