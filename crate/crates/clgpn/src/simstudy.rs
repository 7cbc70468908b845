//! Data generators for the three simulation designs, the missing-data
//! experiment, and a replication runner that fits a grid of models and
//! tabulates which number of regimes each criterion selects.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Observation;
use crate::density;
use crate::error::{Error, Result};
use crate::hmm::HyperBeta;
use crate::mcmc::{run_chain, ChainConfig, Priors};
use crate::params::{RegimeParams, Variant};
use crate::scoring::{self, CriterionReport};

/// The three data-generating designs. All share a three-regime Markov
/// chain started in the first regime with transition matrix diagonal 0.8
/// and off-diagonal 0.1; they differ in the regime emission parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Bimodal regime circular distributions, well-separated linear ones.
    A,
    /// Circular part as in A; overlapping linear distributions.
    B,
    /// Linear part as in B; unimodal, nearly uniform circular
    /// distributions satisfying the constrained-variant restrictions
    /// (unit latent variance, zero latent correlation) exactly.
    C,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Scheme::A),
            "b" => Ok(Scheme::B),
            "c" => Ok(Scheme::C),
            other => Err(Error::invalid(format!(
                "unknown scheme {other:?}; expected a, b, or c"
            ))),
        }
    }

    /// The three regime parameter sets of this design.
    pub fn params(self) -> Vec<RegimeParams> {
        match self {
            Scheme::A => vec![
                RegimeParams {
                    mu: [0.1, 0.1],
                    sigma1_sq: 1.0,
                    rho: 0.9,
                    gamma: [5.0, 1.0, 0.0],
                    sigma_y_sq: 0.1,
                },
                RegimeParams {
                    mu: [0.1, -1.0],
                    sigma1_sq: 2.0,
                    rho: -0.9,
                    gamma: [0.0, 0.0, -1.0],
                    sigma_y_sq: 0.2,
                },
                RegimeParams {
                    mu: [0.0, -0.1],
                    sigma1_sq: 0.1,
                    rho: 0.2,
                    gamma: [-5.0, 1.0, 1.0],
                    sigma_y_sq: 0.5,
                },
            ],
            Scheme::B => vec![
                RegimeParams {
                    mu: [0.1, 0.1],
                    sigma1_sq: 1.0,
                    rho: 0.9,
                    gamma: [1.0, 1.0, 0.0],
                    sigma_y_sq: 0.1,
                },
                RegimeParams {
                    mu: [0.1, -1.0],
                    sigma1_sq: 2.0,
                    rho: -0.9,
                    gamma: [0.0, 0.0, -1.0],
                    sigma_y_sq: 0.2,
                },
                RegimeParams {
                    mu: [0.0, -0.1],
                    sigma1_sq: 0.1,
                    rho: 0.2,
                    gamma: [-1.0, 1.0, 1.0],
                    sigma_y_sq: 0.5,
                },
            ],
            Scheme::C => vec![
                RegimeParams {
                    mu: [0.1, 0.1],
                    sigma1_sq: 1.0,
                    rho: 0.0,
                    gamma: [1.0, 1.0, 0.0],
                    sigma_y_sq: 0.1,
                },
                RegimeParams {
                    mu: [0.1, -0.1],
                    sigma1_sq: 1.0,
                    rho: 0.0,
                    gamma: [0.0, 0.0, -1.0],
                    sigma_y_sq: 0.2,
                },
                RegimeParams {
                    mu: [0.0, -0.1],
                    sigma1_sq: 1.0,
                    rho: 0.0,
                    gamma: [-1.0, 1.0, 1.0],
                    sigma_y_sq: 0.5,
                },
            ],
        }
    }

    /// Transition matrix shared by all designs.
    pub fn transition(self) -> [[f64; 3]; 3] {
        let mut pi = [[0.1; 3]; 3];
        for (j, row) in pi.iter_mut().enumerate() {
            row[j] = 0.8;
        }
        pi
    }

    /// The chain starts in the first regime (index 0).
    pub fn initial_state(self) -> usize {
        0
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::A => "a",
            Scheme::B => "b",
            Scheme::C => "c",
        })
    }
}

/// A simulated series together with the regime path that generated it.
#[derive(Clone, Debug)]
pub struct SimData {
    /// Fully observed circular–linear pairs, one per time point.
    pub obs: Vec<Observation>,
    /// True regime path of length `T + 1`: `states[0]` is the initial
    /// label, `states[t]` generated observation `t - 1`.
    pub states: Vec<usize>,
}

/// Simulate a series of length `t_len` from the scheme. Bit-reproducible
/// for a fixed seed.
pub fn generate(scheme: Scheme, t_len: usize, seed: u64) -> Result<SimData> {
    if t_len == 0 {
        return Err(Error::invalid("need a positive series length"));
    }
    let params = scheme.params();
    let pi = scheme.transition();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(t_len + 1);
    states.push(scheme.initial_state());
    let mut obs = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let next = sample_transition(&pi[states[t]], &mut rng);
        states.push(next);
        let draw = density::sample_clgpn(&params[next], &mut rng)?;
        obs.push(Observation::new(Some(draw.x), Some(draw.y)));
    }
    Ok(SimData { obs, states })
}

fn sample_transition<R: Rng + ?Sized>(row: &[f64; 3], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    row.len() - 1
}

/// Drop whole `(x, y)` pairs at a `fraction` of uniformly random time
/// points (the count is the fraction of the length rounded to nearest).
/// Returns the masked series and the sorted dropped indices; reproducible
/// by seed.
pub fn apply_missing(
    obs: &[Observation],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<Observation>, Vec<usize>)> {
    validate_fraction(fraction)?;
    if obs.is_empty() {
        return Err(Error::invalid("cannot drop values from an empty series"));
    }
    let count = (fraction * obs.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = sample_without_replacement(obs.len(), count, &mut rng);
    let mut out = obs.to_vec();
    for &i in &mask {
        out[i] = Observation::new(None, None);
    }
    Ok((out, mask))
}

/// Which coordinate of a time point a single drop removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    Circular,
    Linear,
}

/// Alternative missingness granularity: drop individual coordinates
/// (angle or linear value separately) at a `fraction` of the `2T`
/// coordinate slots, rounded to nearest. Returns the masked series and
/// the sorted dropped `(index, coordinate)` slots.
pub fn apply_missing_coordinates(
    obs: &[Observation],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<Observation>, Vec<(usize, Coordinate)>)> {
    validate_fraction(fraction)?;
    if obs.is_empty() {
        return Err(Error::invalid("cannot drop values from an empty series"));
    }
    let slots = 2 * obs.len();
    let count = (fraction * slots as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = sample_without_replacement(slots, count, &mut rng);
    let mut out = obs.to_vec();
    let mut mask = Vec::with_capacity(count);
    for &s in &chosen {
        let (i, coord) = (s / 2, if s % 2 == 0 { Coordinate::Circular } else { Coordinate::Linear });
        match coord {
            Coordinate::Circular => out[i].x = None,
            Coordinate::Linear => out[i].y = None,
        }
        mask.push((i, coord));
    }
    Ok((out, mask))
}

fn validate_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "missing fraction must lie strictly between 0 and 1, got {fraction}"
        )));
    }
    Ok(())
}

/// First `count` entries of a seeded partial Fisher–Yates shuffle of
/// `0..n`, returned sorted.
fn sample_without_replacement<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let count = count.min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut mask = idx[..count].to_vec();
    mask.sort_unstable();
    mask
}

/// Configuration of a replication study: fit every `(variant, k)` pair on
/// each replicate dataset and record the selection criteria.
#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub scheme: Scheme,
    pub t_len: usize,
    pub replicates: usize,
    /// Candidate regime counts, strictly increasing (typically `2..=6`).
    pub k_values: Vec<usize>,
    pub variants: Vec<Variant>,
    /// Chain template; `k`, `variant`, `seed`, and `stream` are overridden
    /// per job.
    pub chain: ChainConfig,
    pub seed: u64,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("need at least one replicate"));
        }
        if self.t_len == 0 {
            return Err(Error::invalid("need a positive series length"));
        }
        if self.k_values.is_empty() {
            return Err(Error::invalid("need at least one candidate regime count"));
        }
        if !self.k_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid(
                "candidate regime counts must be strictly increasing",
            ));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("need at least one model variant"));
        }
        // Probe the template with the first grid cell so misconfigured
        // sampler settings fail before any work is scheduled.
        let probe = ChainConfig {
            k: self.k_values[0],
            variant: self.variants[0],
            ..self.chain
        };
        probe.validate()
    }
}

/// One fitted grid cell: the criteria of the `(variant, k)` fit on one
/// replicate.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub replicate: usize,
    pub variant: Variant,
    pub k: usize,
    pub report: CriterionReport,
}

/// A grid cell whose fit failed; recorded, never silently dropped.
#[derive(Clone, Debug)]
pub struct StudyFailure {
    pub replicate: usize,
    pub variant: Variant,
    pub k: usize,
    pub reason: String,
}

/// Names of the selection criteria, in the order used by frequency rows.
pub const CRITERION_NAMES: [&str; 3] = ["aic", "bic", "icl"];

fn criterion_value(report: &CriterionReport, criterion: usize) -> f64 {
    match criterion {
        0 => report.aic,
        1 => report.bic,
        2 => report.icl,
        _ => unreachable!("criterion index out of range"),
    }
}

/// How often one criterion selected each candidate `k` for one variant.
#[derive(Clone, Debug)]
pub struct FrequencyRow {
    pub variant: Variant,
    pub criterion: &'static str,
    /// Selection counts aligned with the study's `k_values`.
    pub counts: Vec<usize>,
    /// Number of replicates entering the tally: only replicates whose
    /// whole `k` sweep succeeded for this variant are counted.
    pub total: usize,
}

/// Everything a replication study produced: the long-format criterion
/// values, the failures, and the selection frequency table.
#[derive(Clone, Debug)]
pub struct StudyResult {
    pub k_values: Vec<usize>,
    pub rows: Vec<StudyRow>,
    pub failures: Vec<StudyFailure>,
    pub table: Vec<FrequencyRow>,
}

/// Run the full replication study. Replicate data are generated
/// deterministically from the study seed; each grid cell runs its own
/// chain on a distinct RNG stream. Jobs execute on the global worker pool
/// and results are merged in job order, so the output is independent of
/// scheduling.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let priors = Priors::default();
    let hb = HyperBeta::new(priors.beta)?;
    let data: Vec<SimData> = (0..cfg.replicates)
        .map(|r| generate(cfg.scheme, cfg.t_len, cfg.seed.wrapping_add(r as u64)))
        .collect::<Result<_>>()?;

    struct Job {
        replicate: usize,
        vi: usize,
        k: usize,
    }
    let mut jobs = Vec::new();
    for replicate in 0..cfg.replicates {
        for vi in 0..cfg.variants.len() {
            for &k in &cfg.k_values {
                jobs.push(Job { replicate, vi, k });
            }
        }
    }

    let outcomes: Vec<std::result::Result<StudyRow, StudyFailure>> = jobs
        .par_iter()
        .map(|job| {
            let variant = cfg.variants[job.vi];
            let chain_cfg = ChainConfig {
                k: job.k,
                variant,
                seed: cfg.seed.wrapping_add(job.replicate as u64),
                // Streams start at 1: stream 0 with the same seed would
                // replay the data-generation randomness.
                stream: 1 + (job.vi * 8 + job.k) as u64,
                ..cfg.chain
            };
            let obs = &data[job.replicate].obs;
            run_chain(obs, &chain_cfg, &priors)
                .and_then(|out| {
                    let map = &out.draws[out.map_index];
                    scoring::criteria(&map.params, &map.labels, obs, variant, hb)
                })
                .map(|report| StudyRow {
                    replicate: job.replicate,
                    variant,
                    k: job.k,
                    report,
                })
                .map_err(|e| StudyFailure {
                    replicate: job.replicate,
                    variant,
                    k: job.k,
                    reason: e.to_string(),
                })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    let table = tabulate(&cfg.variants, &cfg.k_values, cfg.replicates, &rows);
    Ok(StudyResult {
        k_values: cfg.k_values.clone(),
        rows,
        failures,
        table,
    })
}

/// Tally which `k` each criterion selects (smallest criterion value; ties
/// go to the smaller `k`). A replicate enters a variant's tally only if
/// every `k` fit succeeded, so partial sweeps never bias the selection.
fn tabulate(
    variants: &[Variant],
    k_values: &[usize],
    replicates: usize,
    rows: &[StudyRow],
) -> Vec<FrequencyRow> {
    let mut table = Vec::new();
    for &variant in variants {
        let mut counts = vec![vec![0usize; k_values.len()]; CRITERION_NAMES.len()];
        let mut total = 0usize;
        for replicate in 0..replicates {
            let mut sweep: Vec<Option<&CriterionReport>> = vec![None; k_values.len()];
            for row in rows {
                if row.replicate == replicate && row.variant == variant {
                    if let Some(pos) = k_values.iter().position(|&k| k == row.k) {
                        sweep[pos] = Some(&row.report);
                    }
                }
            }
            if sweep.iter().any(|s| s.is_none()) {
                continue;
            }
            total += 1;
            for (ci, cell) in counts.iter_mut().enumerate() {
                let best = (0..k_values.len())
                    .min_by(|&a, &b| {
                        let va = criterion_value(sweep[a].unwrap(), ci);
                        let vb = criterion_value(sweep[b].unwrap(), ci);
                        va.partial_cmp(&vb).unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .expect("candidate list is nonempty");
                cell[best] += 1;
            }
        }
        for (ci, name) in CRITERION_NAMES.iter().enumerate() {
            table.push(FrequencyRow {
                variant,
                criterion: name,
                counts: counts[ci].clone(),
                total,
            });
        }
    }
    table
}

/// Long-format CSV of the criterion values: one row per
/// replicate × variant × k × criterion.
pub fn rows_csv(res: &StudyResult) -> String {
    let mut out = String::from("replicate,variant,k,criterion,value\n");
    for row in &res.rows {
        for (ci, name) in CRITERION_NAMES.iter().enumerate() {
            let value = criterion_value(&row.report, ci);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.replicate, row.variant, row.k, name, value
            ));
        }
    }
    out
}

/// Human-readable selection-frequency table: one line per
/// variant × criterion with the relative frequency of each candidate `k`.
pub fn frequency_summary(res: &StudyResult) -> String {
    let mut out = String::new();
    out.push_str("variant    criterion");
    for &k in &res.k_values {
        out.push_str(&format!("  {:>8}", format!("K={k}")));
    }
    out.push_str("  replicates\n");
    for row in &res.table {
        out.push_str(&format!("{:<10} {:<9}", row.variant.to_string(), row.criterion));
        for &c in &row.counts {
            let freq = if row.total == 0 {
                0.0
            } else {
                c as f64 / row.total as f64
            };
            out.push_str(&format!("  {freq:>8.2}"));
        }
        out.push_str(&format!("  {:>10}\n", row.total));
    }
    if !res.failures.is_empty() {
        out.push_str("\nfailed fits (excluded from the tally):\n");
        for f in &res.failures {
            out.push_str(&format!(
                "  replicate {} variant {} k {}: {}\n",
                f.replicate, f.variant, f.k, f.reason
            ));
        }
    }
    out
}
