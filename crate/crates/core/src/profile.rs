//! Time-dependent dispersion `alpha(t)` and dissipation `beta(t)` profiles.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LpgError, Result};

const DOMAIN_SLACK: f64 = 1e-12;

/// Which coefficient a named profile describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficient {
    Alpha,
    Beta,
}

/// Piecewise-linear profile through `(times[i], values[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedProfile {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(LpgError::Config(
                "tabulated profile needs at least two (time, value) pairs of equal length".into(),
            ));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(LpgError::Config("tabulated profile times must be strictly increasing".into()));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(LpgError::Config("tabulated profile contains non-finite entries".into()));
        }
        Ok(Self { times, values })
    }

    fn domain(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn evaluate(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// A single evaluatable coefficient `t -> value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoefficientProfile {
    Constant(f64),
    /// `alpha = 5 cos(pi t / 4)`, `beta = 1 / cos(pi t / 4)` on `[0, 1]`.
    Case1(Coefficient),
    /// `alpha = (t + 1)^2`, `beta = 0.5 / (t + 1)` on `[0, 1]`.
    Case2(Coefficient),
    Tabulated(TabulatedProfile),
}

impl CoefficientProfile {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            CoefficientProfile::Constant(_) => (f64::NEG_INFINITY, f64::INFINITY),
            CoefficientProfile::Case1(_) | CoefficientProfile::Case2(_) => (0.0, 1.0),
            CoefficientProfile::Tabulated(tab) => tab.domain(),
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo - DOMAIN_SLACK && t <= hi + DOMAIN_SLACK) {
            return Err(LpgError::ProfileDomain { t, lo, hi });
        }
        Ok(match self {
            CoefficientProfile::Constant(v) => *v,
            CoefficientProfile::Case1(Coefficient::Alpha) => 5.0 * (PI * t / 4.0).cos(),
            CoefficientProfile::Case1(Coefficient::Beta) => 1.0 / (PI * t / 4.0).cos(),
            CoefficientProfile::Case2(Coefficient::Alpha) => (t + 1.0).powi(2),
            CoefficientProfile::Case2(Coefficient::Beta) => 0.5 / (t + 1.0),
            CoefficientProfile::Tabulated(tab) => tab.evaluate(t),
        })
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            CoefficientProfile::Constant(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for CoefficientProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientProfile::Constant(v) => write!(f, "constant({v})"),
            CoefficientProfile::Case1(_) => write!(f, "case1"),
            CoefficientProfile::Case2(_) => write!(f, "case2"),
            CoefficientProfile::Tabulated(tab) => write!(f, "tabulated({} points)", tab.times.len()),
        }
    }
}

/// The `(alpha, beta)` pair driving one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub alpha: CoefficientProfile,
    pub beta: CoefficientProfile,
}

impl Coefficients {
    /// Pairs two profiles. The named case profiles are only defined jointly,
    /// so a case profile on one side requires the same case on the other.
    pub fn new(alpha: CoefficientProfile, beta: CoefficientProfile) -> Result<Self> {
        use CoefficientProfile::*;
        let ok = match (&alpha, &beta) {
            (Case1(Coefficient::Alpha), Case1(Coefficient::Beta)) => true,
            (Case2(Coefficient::Alpha), Case2(Coefficient::Beta)) => true,
            (Case1(_) | Case2(_), _) | (_, Case1(_) | Case2(_)) => false,
            _ => true,
        };
        if !ok {
            return Err(LpgError::Config(format!(
                "alpha = {alpha} and beta = {beta}: case profiles must be set for both coefficients"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn constant(alpha: f64, beta: f64) -> Self {
        Self { alpha: CoefficientProfile::Constant(alpha), beta: CoefficientProfile::Constant(beta) }
    }

    pub fn case1() -> Self {
        Self {
            alpha: CoefficientProfile::Case1(Coefficient::Alpha),
            beta: CoefficientProfile::Case1(Coefficient::Beta),
        }
    }

    pub fn case2() -> Self {
        Self {
            alpha: CoefficientProfile::Case2(Coefficient::Alpha),
            beta: CoefficientProfile::Case2(Coefficient::Beta),
        }
    }

    pub fn at(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.alpha.evaluate(t)?, self.beta.evaluate(t)?))
    }

    pub fn is_constant(&self) -> bool {
        self.alpha.constant_value().is_some() && self.beta.constant_value().is_some()
    }
}
