//! Bath specifications and their Fourier-transformed correlation functions.
//!
//! For a bath at inverse temperature `beta` and chemical potential `mu`,
//! the one-sided rate at frequency `omega` is
//! `R(omega) = J(omega) (1 ± n(omega))` for `omega > 0` (emission into the
//! bath) and `R(-omega) = J(omega) n(omega)` (absorption), so that
//! `R(-omega) = exp(-beta (omega - mu)) R(omega)`.

use crate::error::{Error, Result};
use crate::scalar::{fmax, Real};

/// Particle statistics of the bath modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    Bose,
    Fermi,
}

/// Spectral form factor `J(omega)` for `omega >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormFactor<T: Real> {
    /// `strength` up to a hard cutoff, zero above it.
    Flat { strength: T, cutoff: T },
    /// `strength * omega * exp(-omega / cutoff)`.
    Ohmic { strength: T, cutoff: T },
    /// `strength * omega^exponent * exp(-omega / cutoff)`.
    PowerLaw { strength: T, exponent: T, cutoff: T },
    /// `strength` on the band `low <= omega <= high`, zero outside.
    Band { strength: T, low: T, high: T },
}

impl<T: Real> FormFactor<T> {
    pub fn value(&self, omega: T) -> T {
        match *self {
            FormFactor::Flat { strength, cutoff } => {
                if omega <= cutoff {
                    strength
                } else {
                    T::zero()
                }
            }
            FormFactor::Ohmic { strength, cutoff } => strength * omega * (-omega / cutoff).exp(),
            FormFactor::Band { strength, low, high } => {
                if omega >= low && omega <= high {
                    strength
                } else {
                    T::zero()
                }
            }
            FormFactor::PowerLaw { strength, exponent, cutoff } => {
                if omega == T::zero() {
                    T::zero()
                } else {
                    strength * omega.powf(exponent) * (-omega / cutoff).exp()
                }
            }
        }
    }

    /// `lim_{omega -> 0} J(omega) / omega`, `None` when it diverges.
    fn slope_at_zero(&self) -> Option<T> {
        match *self {
            FormFactor::Flat { strength, .. } => (strength == T::zero()).then(T::zero),
            FormFactor::Ohmic { strength, .. } => Some(strength),
            FormFactor::Band { strength, low, .. } => (strength == T::zero() || low > T::zero()).then(T::zero),
            FormFactor::PowerLaw { strength, exponent, .. } => {
                if exponent > T::one() {
                    Some(T::zero())
                } else if exponent == T::one() {
                    Some(strength)
                } else {
                    None
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (s, c) = match *self {
            FormFactor::Flat { strength, cutoff } => (strength, cutoff),
            FormFactor::Ohmic { strength, cutoff } => (strength, cutoff),
            FormFactor::Band { strength, low, high } => {
                if !(low >= T::zero()) || !(high > low) {
                    return Err(Error::InvalidParameter("band edges must satisfy 0 <= low < high".into()));
                }
                (strength, high)
            }
            FormFactor::PowerLaw { strength, exponent, cutoff } => {
                if !(exponent > T::zero()) || !exponent.is_finite() {
                    return Err(Error::InvalidParameter("power-law exponent must be positive".into()));
                }
                (strength, cutoff)
            }
        };
        if !(s >= T::zero()) || !s.is_finite() {
            return Err(Error::InvalidParameter("form-factor strength must be non-negative".into()));
        }
        if !(c > T::zero()) {
            return Err(Error::InvalidParameter("form-factor cutoff must be positive".into()));
        }
        Ok(())
    }
}

/// Thermal reservoir coupled through one or more system operators.
#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec<T: Real> {
    label: String,
    beta: T,
    mu: T,
    statistics: Statistics,
    form: FormFactor<T>,
    coupling: T,
    absorption_scale: T,
}

impl<T: Real> BathSpec<T> {
    /// Bath at `temperature` (`0` and `inf` allowed).
    pub fn new(label: impl Into<String>, temperature: T, statistics: Statistics, form: FormFactor<T>) -> Result<Self> {
        if !(temperature >= T::zero()) {
            return Err(Error::NegativeBeta(temperature.to_f64_lossy()));
        }
        let beta = if temperature == T::zero() {
            T::infinity()
        } else if !temperature.is_finite() {
            T::zero()
        } else {
            T::one() / temperature
        };
        Self::from_beta(label, beta, statistics, form)
    }

    pub fn from_beta(label: impl Into<String>, beta: T, statistics: Statistics, form: FormFactor<T>) -> Result<Self> {
        if !(beta >= T::zero()) {
            return Err(Error::NegativeBeta(beta.to_f64_lossy()));
        }
        form.validate()?;
        Ok(Self {
            label: label.into(),
            beta,
            mu: T::zero(),
            statistics,
            form,
            coupling: T::one(),
            absorption_scale: T::one(),
        })
    }

    pub fn with_chemical_potential(mut self, mu: T) -> Self {
        self.mu = mu;
        self
    }

    /// Overall multiplier of the rates (squared coupling strength).
    pub fn with_coupling(mut self, g: T) -> Self {
        self.coupling = g;
        self
    }

    /// Multiplies the absorption side only. Any value other than one breaks
    /// detailed balance; used to inject faults into consistency checks.
    pub fn with_absorption_scale(mut self, s: T) -> Self {
        self.absorption_scale = s;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn temperature(&self) -> T {
        if self.beta == T::zero() {
            T::infinity()
        } else {
            T::one() / self.beta
        }
    }

    pub fn chemical_potential(&self) -> T {
        self.mu
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn form_factor(&self) -> FormFactor<T> {
        self.form
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    pub fn absorption_scale(&self) -> T {
        self.absorption_scale
    }

    /// Mean occupation of a mode at energy `x`.
    pub fn occupation(&self, x: T) -> Result<T> {
        let dx = x - self.mu;
        match self.statistics {
            Statistics::Bose => {
                if !(dx > T::zero()) {
                    return Err(Error::BosePole { energy: x.to_f64_lossy(), mu: self.mu.to_f64_lossy() });
                }
                if self.beta == T::zero() {
                    return Ok(T::infinity());
                }
                if !self.beta.is_finite() {
                    return Ok(T::zero());
                }
                Ok(T::one() / (self.beta * dx).exp_m1())
            }
            Statistics::Fermi => {
                if self.beta == T::zero() {
                    return Ok(T::of(0.5));
                }
                if !self.beta.is_finite() {
                    return Ok(if dx < T::zero() {
                        T::one()
                    } else if dx > T::zero() {
                        T::zero()
                    } else {
                        T::of(0.5)
                    });
                }
                let e = self.beta * dx;
                Ok(if e > T::zero() {
                    let q = (-e).exp();
                    q / (T::one() + q)
                } else {
                    T::one() / (T::one() + e.exp())
                })
            }
        }
    }

    /// Rate `R(omega)`: emission for `omega > 0`, absorption for `omega < 0`.
    pub fn spectral_density(&self, omega: T) -> Result<T> {
        if !omega.is_finite() {
            return Err(Error::OutOfDomain(omega.to_f64_lossy()));
        }
        let w = omega.abs();
        let j = self.form.value(w) * self.coupling;
        if omega == T::zero() {
            return self.zero_frequency_rate().map(|r| r * self.coupling);
        }
        if j == T::zero() {
            return Ok(T::zero());
        }
        let hot = self.beta == T::zero();
        let r = match (self.statistics, omega > T::zero()) {
            (Statistics::Bose, _) if hot => {
                if w <= self.mu {
                    return Err(Error::BosePole { energy: w.to_f64_lossy(), mu: self.mu.to_f64_lossy() });
                }
                j
            }
            (Statistics::Bose, true) => j * (T::one() + self.occupation(w)?),
            (Statistics::Fermi, true) => j * (T::one() - self.occupation(w)?),
            (_, false) => j * self.occupation(w)?,
        };
        Ok(if omega < T::zero() { r * self.absorption_scale } else { r })
    }

    fn zero_frequency_rate(&self) -> Result<T> {
        let j0 = self.form.value(T::zero());
        match self.statistics {
            Statistics::Fermi => Ok(j0 * (T::one() - self.occupation(T::zero())?)),
            Statistics::Bose => {
                if self.mu < T::zero() {
                    return Ok(j0 * (T::one() + self.occupation(T::zero())?));
                }
                if self.mu > T::zero() {
                    return Err(Error::BosePole { energy: 0.0, mu: self.mu.to_f64_lossy() });
                }
                if self.beta == T::zero() || !self.beta.is_finite() {
                    return Ok(j0);
                }
                // J(w)(1 + n(w)) -> J'(0) / beta
                match self.form.slope_at_zero() {
                    Some(s) => Ok(s / self.beta),
                    None => Err(Error::BosePole { energy: 0.0, mu: 0.0 }),
                }
            }
        }
    }
}

/// Largest relative detailed-balance defect
/// `|R(-w) - e^{-beta(w-mu)} R(w)| / (e^{-beta(w-mu)} R(w))` over `|omegas|`.
pub fn verify_kms_ratio<T: Real>(spec: &BathSpec<T>, omegas: &[T]) -> Result<T> {
    let mut worst = T::zero();
    for &o in omegas {
        let w = o.abs();
        if w == T::zero() {
            continue;
        }
        let em = spec.spectral_density(w)?;
        let ab = spec.spectral_density(-w)?;
        let expected = if spec.beta().is_finite() { (-spec.beta() * (w - spec.chemical_potential())).exp() * em } else { T::zero() };
        let diff = (ab - expected).abs();
        if diff == T::zero() {
            continue;
        }
        let r = diff / fmax(expected, T::of(f64::MIN_POSITIVE));
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ohmic(t: f64) -> BathSpec<f64> {
        BathSpec::new("b", t, Statistics::Bose, FormFactor::Ohmic { strength: 0.1, cutoff: 10.0 }).unwrap()
    }

    #[test]
    fn bose_rates_by_hand() {
        let b = ohmic(0.5);
        let w = 1.2;
        let n = 1.0 / ((w / 0.5f64).exp() - 1.0);
        let j = 0.1 * w * (-w / 10.0f64).exp();
        assert!((b.spectral_density(w).unwrap() - j * (1.0 + n)).abs() < 1e-15);
        assert!((b.spectral_density(-w).unwrap() - j * n).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_has_no_absorption() {
        let b = ohmic(0.0);
        assert_eq!(b.spectral_density(-1.0).unwrap(), 0.0);
        assert!(b.spectral_density(1.0).unwrap() > 0.0);
        assert!(verify_kms_ratio(&b, &[0.5, 1.0, 3.0]).unwrap() == 0.0);
    }

    #[test]
    fn infinite_temperature_is_symmetric() {
        let b = ohmic(f64::INFINITY);
        assert_eq!(b.spectral_density(-0.7).unwrap(), b.spectral_density(0.7).unwrap());
        assert_eq!(b.beta(), 0.0);
    }

    #[test]
    fn absorption_fault_is_detected() {
        let b = ohmic(0.8).with_absorption_scale(1.1);
        let r = verify_kms_ratio(&b, &[0.3, 1.0, 2.0]).unwrap();
        assert!((r - 0.1).abs() < 1e-12, "{r}");
    }

    #[test]
    fn bose_pole_and_domain_errors() {
        let flat = BathSpec::new("f", 1.0, Statistics::Bose, FormFactor::Flat { strength: 1.0, cutoff: 5.0 }).unwrap();
        assert!(matches!(flat.spectral_density(0.0), Err(Error::BosePole { .. })));
        let mu = ohmic(1.0).with_chemical_potential(0.5);
        assert!(matches!(mu.spectral_density(0.3), Err(Error::BosePole { .. })));
        assert!(matches!(ohmic(1.0).spectral_density(f64::NAN), Err(Error::OutOfDomain(_))));
        assert!((ohmic(2.0).spectral_density(0.0).unwrap() - 0.1 * 2.0).abs() < 1e-15);
        assert!(matches!(BathSpec::new("x", -1.0, Statistics::Bose, FormFactor::Ohmic { strength: 1.0, cutoff: 1.0 }), Err(Error::NegativeBeta(_))));
    }

    #[test]
    fn flat_cutoff_is_hard() {
        let b = BathSpec::new("f", 1.0, Statistics::Fermi, FormFactor::Flat { strength: 0.3, cutoff: 2.0 }).unwrap();
        assert_eq!(b.spectral_density(2.5).unwrap(), 0.0);
        assert!((b.spectral_density(1.0).unwrap() + b.spectral_density(-1.0).unwrap() - 0.3f64).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn kms_ratio_holds(t in 0.01f64..20.0, w in 1e-3f64..30.0, fermi in any::<bool>(), mu in -2.0f64..0.0) {
            let stats = if fermi { Statistics::Fermi } else { Statistics::Bose };
            let b = BathSpec::new("b", t, stats, FormFactor::PowerLaw { strength: 0.2, exponent: 1.5, cutoff: 8.0 })
                .unwrap()
                .with_chemical_potential(mu);
            prop_assert!(verify_kms_ratio(&b, &[w]).unwrap() <= 1e-10);
        }

        #[test]
        fn rates_are_nonnegative(t in 0.0f64..10.0, w in -20.0f64..20.0) {
            prop_assert!(ohmic(t).spectral_density(w).unwrap() >= 0.0);
        }
    }
}
