//! Chain checkpointing: serialise a [`Sampler`]'s complete mutable state to
//! a line-oriented `key=value` text and restore it bit-exactly.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so a
//! parse of the rendered text reproduces every bit; the generator state is
//! captured as (seed, stream, word position). A chain advanced `a + b`
//! sweeps in one process is therefore indistinguishable from one advanced
//! `a` sweeps, checkpointed, restored, and advanced `b` more.

use crate::dataset::Observation;
use crate::error::{Error, Result};
use crate::hmm::HyperBeta;
use crate::mcmc::{Priors, Sampler};
use crate::params::{RegimeParams, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt::Write as _;

const FORMAT_TAG: &str = "chain-checkpoint-v1";

fn join<T: ToString>(vals: impl IntoIterator<Item = T>) -> String {
    vals.into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Serialise the sampler's full mutable state.
pub fn checkpoint_text(s: &Sampler) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    line("format", FORMAT_TAG.into());
    line("k", s.k.to_string());
    line("variant", s.variant.to_string());
    line("t_len", s.obs.len().to_string());
    line("burnin", s.burnin.to_string());
    line("adapt_window", s.adapt_window.to_string());
    line("target_accept", s.target_accept.to_string());
    line("target_accept_radius", s.target_accept_radius.to_string());
    line("exact_radius", s.exact_radius.to_string());
    line("sweep_index", s.sweep_index.to_string());
    line("batches_done", s.batches_done.to_string());
    let seed_hex: String = s.rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
    line("rng_seed", seed_hex);
    line("rng_stream", s.rng.get_stream().to_string());
    line("rng_word_pos", s.rng.get_word_pos().to_string());
    line("labels", join(s.labels.iter()));
    line("x", join(s.x.iter()));
    line("y", join(s.y.iter()));
    line("r", join(s.r.iter()));
    let params = s
        .params
        .iter()
        .map(|p| join(p.as_vector()))
        .collect::<Vec<_>>()
        .join(";");
    line("params", params);
    line("log_step_sigma_rho", join(s.log_step_sigma_rho.iter()));
    line("log_step_radius", join(s.log_step_radius.iter()));
    line("win_acc_sigma_rho", join(s.win_acc_sigma_rho.iter()));
    line("win_acc_radius", join(s.win_acc_radius.iter()));
    line("acc_sigma_rho", join(s.acc_sigma_rho.iter()));
    line("prop_sigma_rho", join(s.prop_sigma_rho.iter()));
    line("acc_radius", s.acc_radius.to_string());
    line("prop_radius", s.prop_radius.to_string());
    out
}

struct Fields(HashMap<String, String>);

impl Fields {
    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::data(format!("checkpoint is missing field '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| Error::data(format!("checkpoint field '{key}' failed to parse")))
    }

    fn parse_vec<T: std::str::FromStr>(&self, key: &str, want_len: usize) -> Result<Vec<T>> {
        let raw = self.get(key)?;
        let vals: Vec<T> = if raw.is_empty() {
            Vec::new()
        } else {
            raw.split(',')
                .map(|v| {
                    v.parse().map_err(|_| {
                        Error::data(format!("checkpoint field '{key}' has a bad entry: '{v}'"))
                    })
                })
                .collect::<Result<_>>()?
        };
        if vals.len() != want_len {
            return Err(Error::data(format!(
                "checkpoint field '{key}' has {} entries, expected {want_len}",
                vals.len()
            )));
        }
        Ok(vals)
    }
}

/// Restore a sampler from checkpoint text. The observations and priors are
/// not serialised and must be resupplied; observed coordinates are checked
/// against the stored working arrays so a checkpoint cannot silently be
/// applied to different data.
pub fn restore_text(text: &str, obs: &[Observation], priors: &Priors) -> Result<Sampler> {
    priors.validate()?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::data(format!("checkpoint line {} is not key=value", i + 1))
        })?;
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::data(format!("checkpoint repeats field '{k}'")));
        }
    }
    let f = Fields(map);
    if f.get("format")? != FORMAT_TAG {
        return Err(Error::data(format!(
            "unsupported checkpoint format '{}'",
            f.get("format")?
        )));
    }
    let k: usize = f.parse("k")?;
    let variant = Variant::parse(f.get("variant")?)?;
    let t_len: usize = f.parse("t_len")?;
    if obs.len() != t_len {
        return Err(Error::data(format!(
            "checkpoint was taken on a series of length {t_len}, got {}",
            obs.len()
        )));
    }
    if k < 1 || k > 6 {
        return Err(Error::data(format!("checkpoint regime count {k} out of range")));
    }

    let seed_hex = f.get("rng_seed")?;
    if seed_hex.len() != 64 {
        return Err(Error::data("checkpoint rng_seed must be 64 hex digits"));
    }
    let mut seed = [0u8; 32];
    for (i, chunk) in seed_hex.as_bytes().chunks(2).enumerate() {
        let s = std::str::from_utf8(chunk).map_err(|_| Error::data("rng_seed is not ASCII"))?;
        seed[i] = u8::from_str_radix(s, 16)
            .map_err(|_| Error::data(format!("rng_seed has a bad byte: '{s}'")))?;
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(f.parse("rng_stream")?);
    rng.set_word_pos(f.parse::<u128>("rng_word_pos")?);

    let labels: Vec<usize> = f.parse_vec("labels", t_len + 1)?;
    if labels.iter().any(|&l| l >= k) {
        return Err(Error::data("checkpoint label out of range"));
    }
    let x: Vec<f64> = f.parse_vec("x", t_len)?;
    let y: Vec<f64> = f.parse_vec("y", t_len)?;
    let r: Vec<f64> = f.parse_vec("r", t_len)?;
    for (i, o) in obs.iter().enumerate() {
        if let Some(ox) = o.x {
            if ox.to_bits() != x[i].to_bits() {
                return Err(Error::data(format!(
                    "observed direction at index {i} does not match the checkpoint"
                )));
            }
        }
        if let Some(oy) = o.y {
            if oy.to_bits() != y[i].to_bits() {
                return Err(Error::data(format!(
                    "observed linear value at index {i} does not match the checkpoint"
                )));
            }
        }
        if !(r[i] > 0.0) {
            return Err(Error::data(format!("checkpoint radius at index {i} not positive")));
        }
    }

    let params: Vec<RegimeParams> = f
        .get("params")?
        .split(';')
        .map(|group| {
            let vals: Vec<f64> = group
                .split(',')
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::data(format!("bad parameter entry '{v}'")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 8 {
                return Err(Error::data(format!(
                    "each regime needs 8 parameter entries, got {}",
                    vals.len()
                )));
            }
            let p = RegimeParams {
                mu: [vals[0], vals[1]],
                sigma1_sq: vals[2],
                rho: vals[3],
                gamma: [vals[4], vals[5], vals[6]],
                sigma_y_sq: vals[7],
            };
            p.validate(variant)?;
            Ok(p)
        })
        .collect::<Result<_>>()?;
    if params.len() != k {
        return Err(Error::data(format!(
            "checkpoint stores {} regimes, expected {k}",
            params.len()
        )));
    }

    Ok(Sampler {
        k,
        variant,
        priors: *priors,
        hb: HyperBeta::new(priors.beta)?,
        obs: obs.to_vec(),
        burnin: f.parse("burnin")?,
        adapt_window: f.parse("adapt_window")?,
        target_accept: f.parse("target_accept")?,
        target_accept_radius: f.parse("target_accept_radius")?,
        exact_radius: f.parse("exact_radius")?,
        x,
        y,
        r,
        labels,
        params,
        sweep_index: f.parse("sweep_index")?,
        log_step_sigma_rho: f.parse_vec("log_step_sigma_rho", k)?,
        log_step_radius: f.parse_vec("log_step_radius", t_len)?,
        win_acc_sigma_rho: f.parse_vec("win_acc_sigma_rho", k)?,
        win_acc_radius: f.parse_vec("win_acc_radius", t_len)?,
        batches_done: f.parse("batches_done")?,
        acc_sigma_rho: f.parse_vec("acc_sigma_rho", k)?,
        prop_sigma_rho: f.parse_vec("prop_sigma_rho", k)?,
        acc_radius: f.parse("acc_radius")?,
        prop_radius: f.parse("prop_radius")?,
        rng,
    })
}
