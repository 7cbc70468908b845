//! Successive-conditional prior reproduction: a joint-distribution test of
//! the whole sweep kernel.
//!
//! Alternating (a) data regeneration from the emission model given the
//! current parameters and labels with (b) one full posterior sweep given
//! the regenerated data yields a Markov chain whose marginal law for the
//! parameters is exactly their prior — if and only if every conditional
//! update is correct. Comparing the recorded parameter marginals against
//! the analytic priors at fixed quantiles therefore probes the label sweep,
//! the radius move, the conjugate draws, and the covariance Metropolis step
//! all at once; a bias in any of them shows up as a systematic quantile
//! shift far outside Monte Carlo noise.

use crate::dataset::Observation;
use crate::density::sample_clgpn;
use crate::diagnostics::ess;
use crate::error::{Error, Result};
use crate::mcmc::{updates, ChainConfig, Priors, Sampler};
use crate::params::Variant;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use statrs::distribution::{ContinuousCDF, InverseGamma, Normal};

/// Settings of one prior-reproduction run.
#[derive(Clone, Copy, Debug)]
pub struct PriorReproductionConfig {
    pub k: usize,
    pub t_len: usize,
    /// Regenerate–sweep cycles to run.
    pub cycles: usize,
    /// Record the monitored scalars every this many cycles.
    pub record_every: usize,
    pub seed: u64,
    pub variant: Variant,
    pub exact_radius: bool,
}

impl Default for PriorReproductionConfig {
    fn default() -> Self {
        PriorReproductionConfig {
            k: 2,
            t_len: 30,
            cycles: 20_000,
            record_every: 2,
            seed: 1,
            variant: Variant::ClGpn,
            exact_radius: false,
        }
    }
}

/// The analytic marginal a monitored scalar must reproduce.
#[derive(Clone, Copy, Debug)]
pub enum Marginal {
    Normal { mean: f64, var: f64 },
    InverseGamma { shape: f64, rate: f64 },
    TruncatedNormal { mean: f64, var: f64, lo: f64, hi: f64 },
}

impl Marginal {
    /// Exact quantile of the marginal.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match *self {
            Marginal::Normal { mean, var } => {
                let d = Normal::new(mean, var.sqrt())
                    .map_err(|e| Error::invalid(format!("bad normal marginal: {e}")))?;
                Ok(d.inverse_cdf(p))
            }
            Marginal::InverseGamma { shape, rate } => {
                let d = InverseGamma::new(shape, rate)
                    .map_err(|e| Error::invalid(format!("bad inverse-gamma marginal: {e}")))?;
                Ok(d.inverse_cdf(p))
            }
            Marginal::TruncatedNormal { mean, var, lo, hi } => {
                updates::truncated_normal_quantile(p, mean, var, lo, hi)
            }
        }
    }
}

/// One monitored scalar with its recorded draws and target marginal.
#[derive(Clone, Debug)]
pub struct MonitoredSeries {
    pub name: String,
    pub marginal: Marginal,
    pub values: Vec<f64>,
}

/// Draw a probability vector from a symmetric Dirichlet.
fn sample_symmetric_dirichlet<R: Rng + ?Sized>(k: usize, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    let g = Gamma::new(beta, 1.0)
        .map_err(|e| Error::invalid(format!("dirichlet concentration rejected: {e}")))?;
    let mut w: Vec<f64> = (0..k).map(|_| g.sample(rng).max(1e-300)) .collect();
    let s: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= s;
    }
    Ok(w)
}

/// Run the successive-conditional chain and return the recorded parameter
/// marginals (one series per free parameter per regime).
pub fn run_prior_reproduction(
    cfg: &PriorReproductionConfig,
    priors: &Priors,
) -> Result<Vec<MonitoredSeries>> {
    priors.validate()?;
    if cfg.k < 1 || cfg.k > 6 || cfg.t_len < 2 || cfg.cycles < 1 || cfg.record_every < 1 {
        return Err(Error::invalid("bad prior-reproduction settings"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Initial (parameters, labels) from their exact priors.
    let mut params: Vec<_> = (0..cfg.k)
        .map(|_| updates::sample_regime_from_priors(priors, cfg.variant, &mut rng))
        .collect::<Result<_>>()?;
    let pi0 = sample_symmetric_dirichlet(cfg.k, priors.beta, &mut rng)?;
    let rows: Vec<Vec<f64>> = (0..cfg.k)
        .map(|_| sample_symmetric_dirichlet(cfg.k, priors.beta, &mut rng))
        .collect::<Result<_>>()?;
    let pick = |w: &[f64], u: f64| -> usize {
        let mut acc = 0.0;
        for (i, &p) in w.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        w.len() - 1
    };
    let mut labels = Vec::with_capacity(cfg.t_len + 1);
    labels.push(pick(&pi0, rng.random()));
    for t in 0..cfg.t_len {
        labels.push(pick(&rows[labels[t]], rng.random()));
    }

    // Initial data given (parameters, labels).
    let mut xs = vec![0.0; cfg.t_len];
    let mut ys = vec![0.0; cfg.t_len];
    let mut rs = vec![0.0; cfg.t_len];
    let regenerate = |params: &[crate::params::RegimeParams],
                          labels: &[usize],
                          xs: &mut [f64],
                          ys: &mut [f64],
                          rs: &mut [f64],
                          rng: &mut ChaCha8Rng|
     -> Result<()> {
        for t in 0..xs.len() {
            let d = sample_clgpn(&params[labels[t + 1]], rng)?;
            xs[t] = d.x;
            ys[t] = d.y;
            rs[t] = d.r;
        }
        Ok(())
    };
    regenerate(&params, &labels, &mut xs, &mut ys, &mut rs, &mut rng)?;

    // The sweeps run on a sampler with adaptation disabled (burnin = 0),
    // so the kernel is exactly invariant from the first cycle.
    let obs: Vec<Observation> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| Observation::new(Some(x), Some(y)))
        .collect();
    let chain_cfg = ChainConfig {
        iterations: 1,
        burnin: 0,
        thin: 1,
        seed: cfg.seed.wrapping_add(1),
        stream: 7,
        k: cfg.k,
        variant: cfg.variant,
        exact_radius: cfg.exact_radius,
        ..ChainConfig::default()
    };
    let mut sampler = Sampler::new(&obs, &chain_cfg, priors)?;
    sampler.set_params(params.clone())?;
    sampler.set_labels(labels.clone())?;
    sampler.replace_data(xs.clone(), ys.clone(), rs.clone())?;

    let mut series = monitored_names(cfg.k, cfg.variant, priors);
    for cycle in 1..=cfg.cycles {
        // (a) fresh data from the emission model at the current state;
        params = sampler.params().to_vec();
        labels = sampler.labels().to_vec();
        regenerate(&params, &labels, &mut xs, &mut ys, &mut rs, &mut rng)?;
        // Observed coordinates live in the working arrays, so wholesale
        // replacement is the data swap.
        sampler.replace_data(xs.clone(), ys.clone(), rs.clone())?;
        // (b) one full posterior sweep.
        sampler.step()?;
        if cycle % cfg.record_every == 0 {
            record(&mut series, sampler.params(), cfg.variant);
        }
    }
    Ok(series)
}

/// The free parameters a variant monitors, with their prior marginals.
fn monitored_names(k: usize, variant: Variant, priors: &Priors) -> Vec<MonitoredSeries> {
    let normal = |mean: f64, var: f64| Marginal::Normal { mean, var };
    let mut out = Vec::new();
    for j in 0..k {
        let mut push = |field: &str, marginal: Marginal| {
            out.push(MonitoredSeries {
                name: format!("regime{j}.{field}"),
                marginal,
                values: Vec::new(),
            });
        };
        push("mu1", normal(priors.mu_mean, priors.mu_var));
        push("mu2", normal(priors.mu_mean, priors.mu_var));
        push("gamma0", normal(priors.gamma_mean, priors.gamma_var));
        if variant != Variant::IndClGpn {
            push("gamma1", normal(priors.gamma_mean, priors.gamma_var));
            push("gamma2", normal(priors.gamma_mean, priors.gamma_var));
        }
        push(
            "sigma_y_sq",
            Marginal::InverseGamma {
                shape: priors.ig_shape,
                rate: priors.ig_rate,
            },
        );
        if variant != Variant::ClDpn {
            push(
                "sigma1_sq",
                Marginal::InverseGamma {
                    shape: priors.ig_shape,
                    rate: priors.ig_rate,
                },
            );
            push(
                "rho",
                Marginal::TruncatedNormal {
                    mean: priors.rho_mean,
                    var: priors.rho_var,
                    lo: -1.0,
                    hi: 1.0,
                },
            );
        }
    }
    out
}

fn record(series: &mut [MonitoredSeries], params: &[crate::params::RegimeParams], variant: Variant) {
    let mut idx = 0;
    for p in params {
        let mut push = |v: f64| {
            series[idx].values.push(v);
            idx += 1;
        };
        push(p.mu[0]);
        push(p.mu[1]);
        push(p.gamma[0]);
        if variant != Variant::IndClGpn {
            push(p.gamma[1]);
            push(p.gamma[2]);
        }
        push(p.sigma_y_sq);
        if variant != Variant::ClDpn {
            push(p.sigma1_sq);
            push(p.rho);
        }
    }
}

/// One quantile comparison: the empirical CDF of a recorded series at an
/// exact prior quantile, standardised by Monte Carlo error.
#[derive(Clone, Debug)]
pub struct QuantileCheck {
    pub series: String,
    pub level: f64,
    pub observed: f64,
    /// `(observed - level) / se`, where the standard error uses the
    /// indicator series' effective sample size.
    pub z: f64,
}

/// Compare every monitored series against its analytic prior at the
/// deciles.
pub fn check_quantiles(series: &[MonitoredSeries]) -> Result<Vec<QuantileCheck>> {
    let mut out = Vec::new();
    for s in series {
        if s.values.is_empty() {
            return Err(Error::invalid(format!("series {} recorded no values", s.name)));
        }
        for d in 1..10 {
            let p = d as f64 / 10.0;
            let q = s.marginal.quantile(p)?;
            let indicator: Vec<f64> = s
                .values
                .iter()
                .map(|&v| if v <= q { 1.0 } else { 0.0 })
                .collect();
            let observed = indicator.iter().sum::<f64>() / indicator.len() as f64;
            let n_eff = ess(&indicator);
            let se = (p * (1.0 - p) / n_eff).sqrt();
            out.push(QuantileCheck {
                series: s.name.clone(),
                level: p,
                observed,
                z: (observed - p) / se,
            });
        }
    }
    Ok(out)
}

/// Largest |z| across a set of quantile checks.
pub fn max_abs_z(checks: &[QuantileCheck]) -> f64 {
    checks.iter().map(|c| c.z.abs()).fold(0.0, f64::max)
}
