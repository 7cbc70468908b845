//! Run configuration: defaults, overlaid by an optional key = value file,
//! overlaid by command-line flags.
//!
//! The file format is line oriented: blank lines and lines starting with
//! `#` are ignored, every other line must read `key = value`. Keys may
//! appear at most once, and unknown keys are rejected so that a typo
//! cannot silently fall back to a default.

use std::collections::HashSet;
use std::path::Path;

use clgpn::dataset::ParseOptions;
use clgpn::error::{Error, Result};
use clgpn::mcmc::{ChainConfig, Priors};
use clgpn::params::Variant;

/// Effective settings for a model run.
///
/// `chain.stream` is not configurable: commands assign streams so that
/// parallel chains (and the internal masking pass of `score`) draw from
/// disjoint portions of the generator keyed by one seed.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub chain: ChainConfig,
    pub priors: Priors,
    pub parse: ParseOptions,
    /// Independent chains to run (distinct streams, shared seed).
    pub chains: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            chain: ChainConfig::default(),
            priors: Priors::default(),
            parse: ParseOptions::default(),
            chains: 1,
        }
    }
}

impl RunSettings {
    /// Overlay settings from a configuration file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::invalid(format!(
                "cannot read configuration {}: {e}",
                path.display()
            ))
        })?;
        self.apply_str(&text, &path.display().to_string())
    }

    /// Overlay settings from configuration text (`origin` names the source
    /// in error messages).
    pub fn apply_str(&mut self, text: &str, origin: &str) -> Result<()> {
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!(
                    "{origin}:{line_no}: expected key = value, got {line:?}"
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::invalid(format!(
                    "{origin}:{line_no}: duplicate key {key:?}"
                )));
            }
            self.set(key, value)
                .map_err(|msg| Error::invalid(format!("{origin}:{line_no}: {msg}")))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(
            key: &str,
            value: &str,
        ) -> std::result::Result<T, String> {
            value
                .parse::<T>()
                .map_err(|_| format!("key {key} has unreadable value {value:?}"))
        }
        fn flag(key: &str, value: &str) -> std::result::Result<bool, String> {
            match value {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(format!("key {key} expects true or false, got {value:?}")),
            }
        }
        match key {
            "iterations" => self.chain.iterations = num(key, value)?,
            "burnin" => self.chain.burnin = num(key, value)?,
            "thin" => self.chain.thin = num(key, value)?,
            "seed" => self.chain.seed = num(key, value)?,
            "k" => self.chain.k = num(key, value)?,
            "variant" => {
                self.chain.variant = Variant::parse(value).map_err(|e| e.to_string())?
            }
            "adapt_window" => self.chain.adapt_window = num(key, value)?,
            "target_accept" => self.chain.target_accept = num(key, value)?,
            "target_accept_radius" => {
                self.chain.target_accept_radius = num(key, value)?
            }
            "exact_radius" => self.chain.exact_radius = flag(key, value)?,
            "chains" => self.chains = num(key, value)?,
            "mu_mean" => self.priors.mu_mean = num(key, value)?,
            "mu_var" => self.priors.mu_var = num(key, value)?,
            "gamma_mean" => self.priors.gamma_mean = num(key, value)?,
            "gamma_var" => self.priors.gamma_var = num(key, value)?,
            "rho_mean" => self.priors.rho_mean = num(key, value)?,
            "rho_var" => self.priors.rho_var = num(key, value)?,
            "ig_shape" => self.priors.ig_shape = num(key, value)?,
            "ig_rate" => self.priors.ig_rate = num(key, value)?,
            "beta" => self.priors.beta = num(key, value)?,
            "degrees" => self.parse.degrees = flag(key, value)?,
            "log_linear" => self.parse.log_linear = flag(key, value)?,
            "missing_token" => self.parse.missing_token = value.to_string(),
            other => return Err(format!("unknown configuration key {other:?}")),
        }
        Ok(())
    }

    /// Validate the combined settings before running anything.
    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        self.priors.validate()?;
        if self.chains == 0 {
            return Err(Error::invalid("chains must be at least 1"));
        }
        if self.chains > 64 {
            return Err(Error::invalid(format!(
                "chains must be at most 64, got {}",
                self.chains
            )));
        }
        validate_missing_token(&self.parse.missing_token)
    }

    /// The effective configuration as ordered key = value pairs, written
    /// into run manifests so every output can be reproduced.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        vec![
            ("iterations", self.chain.iterations.to_string()),
            ("burnin", self.chain.burnin.to_string()),
            ("thin", self.chain.thin.to_string()),
            ("seed", self.chain.seed.to_string()),
            ("chains", self.chains.to_string()),
            ("k", self.chain.k.to_string()),
            ("variant", self.chain.variant.to_string()),
            ("exact_radius", self.chain.exact_radius.to_string()),
            ("adapt_window", self.chain.adapt_window.to_string()),
            ("target_accept", self.chain.target_accept.to_string()),
            (
                "target_accept_radius",
                self.chain.target_accept_radius.to_string(),
            ),
            ("mu_mean", self.priors.mu_mean.to_string()),
            ("mu_var", self.priors.mu_var.to_string()),
            ("gamma_mean", self.priors.gamma_mean.to_string()),
            ("gamma_var", self.priors.gamma_var.to_string()),
            ("rho_mean", self.priors.rho_mean.to_string()),
            ("rho_var", self.priors.rho_var.to_string()),
            ("ig_shape", self.priors.ig_shape.to_string()),
            ("ig_rate", self.priors.ig_rate.to_string()),
            ("beta", self.priors.beta.to_string()),
            ("degrees", self.parse.degrees.to_string()),
            ("log_linear", self.parse.log_linear.to_string()),
            ("missing_token", self.parse.missing_token.clone()),
        ]
    }
}

/// A missing-value token must survive a CSV round trip: non-empty, free of
/// separators, and not itself readable as a number.
pub fn validate_missing_token(token: &str) -> Result<()> {
    if token.is_empty() {
        return Err(Error::invalid("missing_token must not be empty"));
    }
    if token.contains(',') || token.contains('\n') || token.contains('\r') {
        return Err(Error::invalid(
            "missing_token must not contain commas or line breaks",
        ));
    }
    if token.parse::<f64>().is_ok() {
        return Err(Error::invalid(format!(
            "missing_token {token:?} reads as a number and would swallow data"
        )));
    }
    Ok(())
}
