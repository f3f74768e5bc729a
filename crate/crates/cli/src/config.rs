//! Flat `key = value` run configuration with dotted keys.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lpg_core::profile::{Coefficient, CoefficientProfile, Coefficients};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Constant,
    Case1,
    Case2,
}

impl ProfileKind {
    fn parse(key: &str, s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "case1" => Ok(Self::Case1),
            "case2" => Ok(Self::Case2),
            other => Err(invalid(key, format!("expected constant, case1 or case2, got `{other}`"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Case1 => "case1",
            Self::Case2 => "case2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub p: f64,
    pub alpha_kind: ProfileKind,
    pub alpha: f64,
    pub beta_kind: ProfileKind,
    pub beta: f64,
    pub quadrature_order: Option<usize>,
    /// Keep every `stride`-th state in trajectory exports.
    pub stride: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            degree: 32,
            dt: 1e-4,
            t_final: 2.0,
            p: 2.0,
            alpha_kind: ProfileKind::Constant,
            alpha: 1.0,
            beta_kind: ProfileKind::Constant,
            beta: 0.0,
            quadrature_order: None,
            stride: 1,
            seed: 0,
            output_dir: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "n",
    "dt",
    "t_final",
    "p",
    "alpha.kind",
    "alpha.value",
    "beta.kind",
    "beta.value",
    "quadrature.order",
    "output.stride",
    "output.dir",
    "seed",
];

fn invalid(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Invalid { key: key.to_string(), msg: msg.into() }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<()> {
        match key {
            "n" => self.degree = number(key, value)?,
            "dt" => self.dt = number(key, value)?,
            "t_final" => self.t_final = number(key, value)?,
            "p" => self.p = number(key, value)?,
            "alpha.kind" => self.alpha_kind = ProfileKind::parse(key, value)?,
            "alpha.value" => self.alpha = number(key, value)?,
            "beta.kind" => self.beta_kind = ProfileKind::parse(key, value)?,
            "beta.value" => self.beta = number(key, value)?,
            "quadrature.order" => self.quadrature_order = Some(number(key, value)?),
            "output.stride" => self.stride = number(key, value)?,
            "output.dir" => self.output_dir = Some(PathBuf::from(value)),
            "seed" => self.seed = number(key, value)?,
            _ => return Err(CliError::UnknownKey { key: key.to_string(), origin: origin.to_string() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 3 {
            return Err(invalid("n", format!("need n >= 3, got {}", self.degree)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("need dt > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", format!("need t_final >= 0, got {}", self.t_final)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid("p", format!("need p >= 1, got {}", self.p)));
        }
        for (key, v) in [("alpha.value", self.alpha), ("beta.value", self.beta)] {
            if !v.is_finite() {
                return Err(invalid(key, "must be finite"));
            }
        }
        if self.stride == 0 {
            return Err(invalid("output.stride", "must be at least 1"));
        }
        if let Some(q) = self.quadrature_order {
            if q == 0 {
                return Err(invalid("quadrature.order", "must be positive"));
            }
        }
        self.coefficients()?;
        Ok(())
    }

    pub fn coefficients(&self) -> Result<Coefficients> {
        let profile = |kind, value, which| match kind {
            ProfileKind::Constant => CoefficientProfile::Constant(value),
            ProfileKind::Case1 => CoefficientProfile::Case1(which),
            ProfileKind::Case2 => CoefficientProfile::Case2(which),
        };
        let alpha = profile(self.alpha_kind, self.alpha, Coefficient::Alpha);
        let beta = profile(self.beta_kind, self.beta, Coefficient::Beta);
        Coefficients::new(alpha, beta).map_err(|e| invalid("beta.kind", e.to_string()))
    }

    /// Stable text form used for hashing; independent of key order in the file.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "n={};dt={:e};t_final={:e};p={:e};alpha.kind={};alpha.value={:e};beta.kind={};beta.value={:e};quadrature.order={:?};output.stride={};seed={}",
            self.degree,
            self.dt,
            self.t_final,
            self.p,
            self.alpha_kind.as_str(),
            self.alpha,
            self.beta_kind.as_str(),
            self.beta,
            self.quadrature_order,
            self.stride,
            self.seed
        );
        s
    }
}

/// Parses `key = value` lines (`#` starts a comment), then applies
/// `key=value` overrides in order, then validates.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = format!("line {}", i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Parse { origin: origin.clone(), msg: format!("expected `key = value`, got `{line}`") })?;
        cfg.set(key.trim(), value.trim(), &origin)?;
    }
    for (i, ov) in overrides.iter().enumerate() {
        let origin = format!("override {}", i + 1);
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| CliError::Parse { origin: origin.clone(), msg: format!("expected `key=value`, got `{ov}`") })?;
        cfg.set(key.trim(), value.trim(), &origin)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| CliError::MissingConfig { path: p.to_path_buf(), source })?,
        None => String::new(),
    };
    parse_config_str(&text, overrides)
}
