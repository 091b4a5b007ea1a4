use super::cycle::{compose_cycle, cycle_energetics, find_limit_cycle, CycleSpec};
use super::stroke::StrokeSpec;
use crate::error::{Error, Result};
use crate::random::{seeded, uniform, SeededRng};
use crate::scalar::Real;

/// Quantity varied by the power optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeParameter {
    /// Duration of the stroke at this index.
    Duration(usize),
    OmegaHot,
    OmegaCold,
}

/// Search interval for one free parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound<T: Real> {
    pub param: FreeParameter,
    pub lower: T,
    pub upper: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerOptions {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_evaluations: usize,
    pub seed: u64,
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
    /// Stop when the simplex objective spread falls below this.
    pub tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { restarts: 3, max_evaluations: 200, seed: 0, initial_step: 0.2, tol: 1e-12 }
    }
}

/// Result of a bounded simplex minimization on the unit cube.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Smooth periodic map of the real line onto `[0, 1]`.
fn to_box(y: &[f64]) -> Vec<f64> {
    y.iter().map(|v| 0.5 * (1.0 - (std::f64::consts::PI * v).cos())).collect()
}

fn from_box(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| (1.0 - 2.0 * v.clamp(0.0, 1.0)).acos() / std::f64::consts::PI).collect()
}

/// Nelder-Mead on `[0, 1]^n`. The simplex lives in unconstrained
/// coordinates `y` with `x = (1 - cos(pi y)) / 2`, so faces of the box are
/// reachable without the simplex collapsing onto them.
pub fn nelder_mead_unit_box(f: &mut dyn FnMut(&[f64]) -> f64, start: &[f64], step: f64, max_evaluations: usize, tol: f64) -> SimplexResult {
    let n = start.len();
    let mut evals = 0usize;
    let mut eval = |y: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(&to_box(y));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let y0 = from_box(start);
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(y0.clone());
    for i in 0..n {
        let mut p = y0.clone();
        p[i] += if y0[i] < 0.5 { step } else { -step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let mut converged = false;
    while evals < max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if (vals[n] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (pts[n][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[n] {
            let x = along(-0.5);
            let v = eval(&x, &mut evals);
            (x, v, v <= fr)
        } else {
            let x = along(0.5);
            let v = eval(&x, &mut evals);
            (x, v, v < vals[n])
        };
        if accept {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = (0..n).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty simplex");
    SimplexResult { x: to_box(&pts[best]), value: vals[best], evaluations: evals, converged }
}

/// Power-optimal operating point.
#[derive(Clone, Debug)]
pub struct PowerOptimum<T: Real> {
    /// Values of the free parameters, in the order of the bounds.
    pub values: Vec<T>,
    pub max_power: T,
    /// `W / Q_h` at the optimum, if the cycle is an engine there.
    pub efficiency: Option<T>,
    /// `1 - sqrt(T_c / T_h)`.
    pub eta_ca: T,
    pub eta_c: T,
    /// Best value found by each restart.
    pub restart_powers: Vec<T>,
    pub evaluations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Returns `spec` with the free parameters set to `values`.
pub fn apply_parameters<T: Real>(spec: &CycleSpec<T>, bounds: &[Bound<T>], values: &[T]) -> Result<CycleSpec<T>> {
    let mut s = spec.clone();
    for (b, &v) in bounds.iter().zip(values) {
        match b.param {
            FreeParameter::OmegaHot => s.omega_h = v,
            FreeParameter::OmegaCold => s.omega_c = v,
            FreeParameter::Duration(i) => {
                let st = s.strokes.get_mut(i).ok_or_else(|| Error::InvalidParameter(format!("no stroke at index {i}")))?;
                match st {
                    StrokeSpec::Isochore { duration, .. } | StrokeSpec::Adiabat { duration, .. } => *duration = v,
                    StrokeSpec::Dephase { .. } => {
                        return Err(Error::InvalidParameter(format!("stroke {i} has no duration")));
                    }
                }
            }
        }
    }
    Ok(s)
}

/// Limit-cycle work and heat of `spec`, returning `(W / tau, W / Q_h)`.
fn power_and_efficiency<T: Real>(spec: &CycleSpec<T>) -> Result<(T, Option<T>)> {
    let cycle = compose_cycle(spec)?;
    let lc = find_limit_cycle(&cycle.map, None, 0)?;
    let e = cycle_energetics(&cycle, &lc.state)?;
    let tau = cycle.cycle_time();
    if !(tau > T::zero()) {
        return Err(Error::InvalidParameter("cycle time must be positive to define power".into()));
    }
    let eff = (e.work > T::zero() && e.heat[0] > T::zero()).then(|| e.work / e.heat[0]);
    Ok((e.work / tau, eff))
}

/// Maximizes limit-cycle power `W / tau_cycle` over the free parameters
/// with a bounded simplex search and seeded restarts.
pub fn optimize_power<T: Real>(spec: &CycleSpec<T>, bounds: &[Bound<T>], opts: &OptimizerOptions) -> Result<PowerOptimum<T>> {
    for b in bounds {
        if !(b.upper >= b.lower) || !b.lower.is_finite() || !b.upper.is_finite() {
            return Err(Error::InvalidParameter("each bound needs finite lower <= upper".into()));
        }
    }
    let free: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i].upper > bounds[i].lower).collect();
    let to_values = |u: &[f64]| -> Vec<T> {
        let mut v: Vec<T> = bounds.iter().map(|b| b.lower).collect();
        for (k, &i) in free.iter().enumerate() {
            v[i] = bounds[i].lower + (bounds[i].upper - bounds[i].lower) * T::of(u[k]);
        }
        v
    };
    let mut objective = |u: &[f64]| -> f64 {
        match apply_parameters(spec, bounds, &to_values(u)).and_then(|s| power_and_efficiency(&s)) {
            Ok((p, _)) => -p.to_f64_lossy(),
            Err(_) => f64::INFINITY,
        }
    };
    let mut rng: SeededRng = seeded(opts.seed);
    let mut best: Option<SimplexResult> = None;
    let mut restart_powers = Vec::new();
    let mut evaluations = 0;
    let mut converged = true;
    if free.is_empty() {
        let v = objective(&[]);
        evaluations = 1;
        best = Some(SimplexResult { x: vec![], value: v, evaluations: 1, converged: true });
        restart_powers.push(T::of(-v));
    } else {
        for _ in 0..opts.restarts.max(1) {
            let start: Vec<f64> = free.iter().map(|_| uniform::<f64>(0.0, 1.0, &mut rng)).collect();
            let r = nelder_mead_unit_box(&mut objective, &start, opts.initial_step, opts.max_evaluations, opts.tol);
            evaluations += r.evaluations;
            converged &= r.converged;
            restart_powers.push(T::of(-r.value));
            if best.as_ref().map_or(true, |b| r.value < b.value) {
                best = Some(r);
            }
        }
    }
    let best = best.expect("at least one evaluation");
    if !best.value.is_finite() {
        return Err(Error::Numerical("no feasible operating point in the search box".into()));
    }
    let values = to_values(&best.x);
    let (max_power, efficiency) = power_and_efficiency(&apply_parameters(spec, bounds, &values)?)?;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push("simplex search hit the evaluation cap before converging".to_string());
    }
    let ratio = spec.cold.temperature() / spec.hot.temperature();
    Ok(PowerOptimum {
        values,
        max_power,
        efficiency,
        eta_ca: T::one() - ratio.sqrt(),
        eta_c: T::one() - ratio,
        restart_powers,
        evaluations,
        converged,
        warnings,
    })
}
