//! Markov chain Monte Carlo for the hidden Markov model with
//! circular–linear projected-normal emissions.
//!
//! The transition matrix is integrated out under row-wise Dirichlet priors,
//! so one sweep updates, in order: the hidden labels (collapsed Gibbs, one
//! position at a time), the latent radii (adaptive Metropolis on the log
//! scale, or an exact inverse-CDF draw), imputations for missing
//! coordinates, and then each regime's emission parameters — conjugate
//! normal draws for the latent mean and the regression coefficients, a
//! conjugate inverse-gamma draw for the response variance, and a joint
//! adaptive Metropolis move on the transformed latent covariance pair
//! `(ln σ₁², atanh ρ)` where the variant leaves it free.
//!
//! Proposal scales adapt in batches during burn-in only (so the post
//! burn-in kernel is fixed), with per-regime scales for the covariance
//! move and per-time-point scales for the radii.

pub mod checkpoint;
pub mod geweke;
pub mod relabel;
pub mod updates;

use crate::dataset::Observation;
use crate::density::{joint_xyr_log_density, log_normal1, radius_terms};
use crate::error::{Error, Result};
use crate::hmm::{collapsed_log_prior, sample_state_sweep, HyperBeta};
use crate::params::{RegimeParams, Variant};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Hyperparameters of the independent parameter priors and the Dirichlet
/// concentration of the (integrated-out) transition rows.
///
/// Latent means and regression coefficients get `N(mean, var)` priors per
/// coordinate; both variances share one inverse-gamma `IG(shape, rate)`
/// prior; the latent correlation gets a normal prior truncated to
/// `(-1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Priors {
    pub mu_mean: f64,
    pub mu_var: f64,
    pub gamma_mean: f64,
    pub gamma_var: f64,
    pub rho_mean: f64,
    pub rho_var: f64,
    pub ig_shape: f64,
    pub ig_rate: f64,
    pub beta: f64,
}

impl Default for Priors {
    fn default() -> Self {
        Priors {
            mu_mean: 0.0,
            mu_var: 5.0,
            gamma_mean: 0.0,
            gamma_var: 5.0,
            rho_mean: 0.0,
            rho_var: 5.0,
            ig_shape: 2.0,
            ig_rate: 1.0,
            beta: 1.0,
        }
    }
}

impl Priors {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu_mean,
            self.mu_var,
            self.gamma_mean,
            self.gamma_var,
            self.rho_mean,
            self.rho_var,
            self.ig_shape,
            self.ig_rate,
            self.beta,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("prior hyperparameters must be finite"));
        }
        for (name, v) in [
            ("mu_var", self.mu_var),
            ("gamma_var", self.gamma_var),
            ("rho_var", self.rho_var),
            ("ig_shape", self.ig_shape),
            ("ig_rate", self.ig_rate),
            ("beta", self.beta),
        ] {
            if !(v > 0.0) {
                return Err(Error::invalid(format!("prior {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Run-length, thinning, and kernel settings for one chain.
///
/// Recorded draws are the sweeps `burnin < s ≤ iterations` with
/// `(s - burnin)` divisible by `thin`, so a run keeps exactly
/// `(iterations - burnin) / thin` draws. `stream` selects a disjoint
/// pseudorandom stream for parallel chains sharing one seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub stream: u64,
    pub k: usize,
    pub variant: Variant,
    /// Sweeps per proposal-scale adaptation batch (burn-in only).
    pub adapt_window: usize,
    /// Target acceptance rate of the 2-d covariance move.
    pub target_accept: f64,
    /// Target acceptance rate of the per-time radius move.
    pub target_accept_radius: f64,
    /// Replace the Metropolis radius move with an exact inverse-CDF draw.
    pub exact_radius: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 50_000,
            burnin: 20_000,
            thin: 10,
            seed: 1,
            stream: 0,
            k: 1,
            variant: Variant::ClGpn,
            adapt_window: 50,
            target_accept: 0.35,
            target_accept_radius: 0.44,
            exact_radius: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > 6 {
            return Err(Error::invalid(format!(
                "number of regimes must be between 1 and 6, got {}",
                self.k
            )));
        }
        if self.iterations <= self.burnin {
            return Err(Error::invalid(format!(
                "iterations ({}) must exceed burnin ({})",
                self.iterations, self.burnin
            )));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        if self.adapt_window == 0 {
            return Err(Error::invalid("adapt_window must be at least 1"));
        }
        for (name, v) in [
            ("target_accept", self.target_accept),
            ("target_accept_radius", self.target_accept_radius),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!(
                    "{name} must lie strictly inside (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Number of draws a run with this configuration records.
    pub fn kept_draws(&self) -> usize {
        (self.iterations - self.burnin) / self.thin
    }
}

/// Imputed values for one time point (only the missing coordinates are set).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImputedValue {
    /// 0-based index into the observation sequence.
    pub index: usize,
    pub x: Option<f64>,
    pub y: Option<f64>,
}

/// One recorded posterior draw.
#[derive(Clone, Debug)]
pub struct Draw {
    pub params: Vec<RegimeParams>,
    /// Hidden labels for positions `0..=T` (position 0 is the pre-sample
    /// seed state).
    pub labels: Vec<usize>,
    /// Latent radii for the `T` observations.
    pub radii: Vec<f64>,
    /// Current imputations for every missing coordinate.
    pub imputed: Vec<ImputedValue>,
    /// Log joint posterior density (up to a constant) of this draw.
    pub log_post: f64,
}

/// A finished chain: recorded draws plus acceptance bookkeeping.
#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub k: usize,
    pub variant: Variant,
    pub draws: Vec<Draw>,
    /// Index into `draws` of the highest-posterior draw (earliest on ties).
    pub map_index: usize,
    /// Post burn-in acceptance rate of the covariance move, per regime
    /// (absent for variants with a fixed latent covariance).
    pub accept_sigma_rho: Option<Vec<f64>>,
    /// Post burn-in acceptance rate of the radius move, pooled over time
    /// points (absent when the exact radius draw is configured).
    pub accept_radius: Option<f64>,
}

/// Bounds for the adapted log proposal scales: e⁻⁷ ≈ 9·10⁻⁴ to e³ ≈ 20.
const LOG_STEP_MIN: f64 = -7.0;
const LOG_STEP_MAX: f64 = 3.0;
const INIT_LOG_STEP_SIGMA_RHO: f64 = -1.2; // scale ≈ 0.30
const INIT_LOG_STEP_RADIUS: f64 = -0.7; // scale ≈ 0.50

/// The mutable state of one chain, advanced one sweep at a time.
///
/// The original observations are kept only for their missingness pattern
/// and initial values; the working arrays `x`, `y`, `r` always hold
/// complete data (missing coordinates carry their current imputation).
#[derive(Clone, Debug)]
pub struct Sampler {
    // Fixed problem description.
    k: usize,
    variant: Variant,
    priors: Priors,
    hb: HyperBeta,
    obs: Vec<Observation>,
    burnin: usize,
    adapt_window: usize,
    target_accept: f64,
    target_accept_radius: f64,
    exact_radius: bool,
    // Current state.
    x: Vec<f64>,
    y: Vec<f64>,
    r: Vec<f64>,
    labels: Vec<usize>,
    params: Vec<RegimeParams>,
    sweep_index: usize,
    // Adaptation state.
    log_step_sigma_rho: Vec<f64>,
    log_step_radius: Vec<f64>,
    win_acc_sigma_rho: Vec<u32>,
    win_acc_radius: Vec<u32>,
    batches_done: usize,
    // Post burn-in acceptance bookkeeping.
    acc_sigma_rho: Vec<u64>,
    prop_sigma_rho: Vec<u64>,
    acc_radius: u64,
    prop_radius: u64,
    rng: ChaCha8Rng,
}

impl Sampler {
    /// Initialise a chain: parameters drawn from their priors, labels from
    /// quantile binning of the observed linear values (missing-`y` points
    /// striped across regimes, seed state copying position 1), radii at 1,
    /// and one imputation pass to complete the data.
    pub fn new(obs: &[Observation], cfg: &ChainConfig, priors: &Priors) -> Result<Self> {
        cfg.validate()?;
        priors.validate()?;
        let t_len = obs.len();
        if t_len == 0 {
            return Err(Error::invalid("cannot sample from an empty series"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(cfg.stream);

        let params: Vec<RegimeParams> = (0..cfg.k)
            .map(|_| updates::sample_regime_from_priors(priors, cfg.variant, &mut rng))
            .collect::<Result<_>>()?;

        let mut labels = vec![0usize; t_len + 1];
        let mut with_y: Vec<(usize, f64)> = obs
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.y.map(|y| (i, y)))
            .collect();
        with_y.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let n_y = with_y.len();
        for (rank, (i, _)) in with_y.iter().enumerate() {
            labels[i + 1] = rank * cfg.k / n_y.max(1);
        }
        for (i, o) in obs.iter().enumerate() {
            if o.y.is_none() {
                labels[i + 1] = i % cfg.k;
            }
        }
        labels[0] = labels[1];

        let x: Vec<f64> = obs.iter().map(|o| o.x.unwrap_or(0.0)).collect();
        let y: Vec<f64> = obs.iter().map(|o| o.y.unwrap_or(0.0)).collect();
        let r = vec![1.0; t_len];

        let mut s = Sampler {
            k: cfg.k,
            variant: cfg.variant,
            priors: *priors,
            hb: HyperBeta::new(priors.beta)?,
            obs: obs.to_vec(),
            burnin: cfg.burnin,
            adapt_window: cfg.adapt_window,
            target_accept: cfg.target_accept,
            target_accept_radius: cfg.target_accept_radius,
            exact_radius: cfg.exact_radius,
            x,
            y,
            r,
            labels,
            params,
            sweep_index: 0,
            log_step_sigma_rho: vec![INIT_LOG_STEP_SIGMA_RHO; cfg.k],
            log_step_radius: vec![INIT_LOG_STEP_RADIUS; t_len],
            win_acc_sigma_rho: vec![0; cfg.k],
            win_acc_radius: vec![0; t_len],
            batches_done: 0,
            acc_sigma_rho: vec![0; cfg.k],
            prop_sigma_rho: vec![0; cfg.k],
            acc_radius: 0,
            prop_radius: 0,
            rng,
        };
        s.impute_missing()?;
        Ok(s)
    }

    pub fn sweep_index(&self) -> usize {
        self.sweep_index
    }

    pub fn n_states(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &[RegimeParams] {
        &self.params
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Working complete-data arrays `(x, y, r)`.
    pub fn data(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.x, &self.y, &self.r)
    }

    /// Overwrite the regime parameters (validated against the variant).
    pub fn set_params(&mut self, params: Vec<RegimeParams>) -> Result<()> {
        if params.len() != self.k {
            return Err(Error::invalid(format!(
                "expected {} regimes, got {}",
                self.k,
                params.len()
            )));
        }
        for p in &params {
            p.validate(self.variant)?;
        }
        self.params = params;
        Ok(())
    }

    /// Overwrite the hidden labels (length `T + 1`, entries `< k`).
    pub fn set_labels(&mut self, labels: Vec<usize>) -> Result<()> {
        if labels.len() != self.x.len() + 1 {
            return Err(Error::invalid(format!(
                "expected {} labels, got {}",
                self.x.len() + 1,
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l >= self.k) {
            return Err(Error::invalid("label out of range"));
        }
        self.labels = labels;
        Ok(())
    }

    /// Replace the complete-data arrays wholesale while keeping the
    /// missingness pattern (used by the prior-reproduction harness, which
    /// regenerates the data between sweeps).
    pub fn replace_data(&mut self, x: Vec<f64>, y: Vec<f64>, r: Vec<f64>) -> Result<()> {
        let t_len = self.obs.len();
        if x.len() != t_len || y.len() != t_len || r.len() != t_len {
            return Err(Error::invalid("replacement arrays must match the series length"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) || r.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::invalid(
                "replacement data must be finite with positive radii",
            ));
        }
        self.x = x;
        self.y = y;
        self.r = r;
        Ok(())
    }

    /// Advance the chain by one full sweep.
    pub fn step(&mut self) -> Result<()> {
        self.update_labels()?;
        self.update_radii()?;
        self.impute_missing()?;
        self.update_params()?;
        self.finish_sweep();
        Ok(())
    }

    fn update_labels(&mut self) -> Result<()> {
        let k = self.k;
        let hb = self.hb;
        let Sampler {
            labels,
            x,
            y,
            r,
            params,
            rng,
            ..
        } = self;
        sample_state_sweep(
            labels,
            k,
            hb,
            |pos, buf| {
                let i = pos - 1;
                for (state, slot) in buf.iter_mut().enumerate() {
                    *slot = joint_xyr_log_density(x[i], y[i], r[i], &params[state]);
                }
            },
            rng,
        )
    }

    fn update_radii(&mut self) -> Result<()> {
        let adapting = self.sweep_index < self.burnin;
        for i in 0..self.obs.len() {
            if self.obs[i].fully_missing() {
                continue; // refreshed jointly by the imputation pass
            }
            let p = &self.params[self.labels[i + 1]];
            let rt = radius_terms(self.x[i], Some(self.y[i]), p);
            if self.exact_radius {
                self.r[i] = updates::sample_radius_exact(rt.m, rt.v, &mut self.rng)?;
                continue;
            }
            let step = self.log_step_radius[i].exp();
            let lam = self.r[i].ln();
            let eps: f64 = self.rng.sample(StandardNormal);
            let lam_new = lam + step * eps;
            let delta = updates::radius_log_target(lam_new, rt.m, rt.v)
                - updates::radius_log_target(lam, rt.m, rt.v);
            let accept = lam_new.is_finite()
                && (delta >= 0.0 || self.rng.random::<f64>() < delta.exp());
            if accept {
                self.r[i] = lam_new.exp();
            }
            if adapting {
                self.win_acc_radius[i] += u32::from(accept);
            } else {
                self.acc_radius += u64::from(accept);
                self.prop_radius += 1;
            }
        }
        Ok(())
    }

    /// Redraw every missing coordinate from its conditional given the
    /// current regime parameters and the observed coordinate (if any).
    fn impute_missing(&mut self) -> Result<()> {
        for i in 0..self.obs.len() {
            let o = self.obs[i];
            if o.fully_observed() {
                continue;
            }
            let p = self.params[self.labels[i + 1]];
            match (o.x, o.y) {
                (None, None) => {
                    let d = crate::density::sample_clgpn(&p, &mut self.rng)?;
                    self.x[i] = d.x;
                    self.y[i] = d.y;
                    self.r[i] = d.r;
                }
                (Some(_), None) => {
                    // y | z is normal around the regression at z = r·(cos x, sin x).
                    let w = [self.x[i].cos(), self.x[i].sin()];
                    let c = p.gamma[1] * w[0] + p.gamma[2] * w[1];
                    let eps: f64 = self.rng.sample(StandardNormal);
                    self.y[i] = p.gamma[0] + c * self.r[i] + p.sigma_y_sq.sqrt() * eps;
                }
                (None, Some(_)) => {
                    let (mean, cov) = updates::conditional_z_given_y(&p, self.y[i]);
                    let mut z = updates::sample_mvn(&mean, &cov, &mut self.rng)?;
                    while z[0] == 0.0 && z[1] == 0.0 {
                        z = updates::sample_mvn(&mean, &cov, &mut self.rng)?;
                    }
                    self.x[i] = crate::angle::atan2_wrapped(z[0], z[1])?;
                    self.r[i] = z[0].hypot(z[1]);
                }
                (Some(_), Some(_)) => unreachable!(),
            }
        }
        Ok(())
    }

    fn update_params(&mut self) -> Result<()> {
        let adapting = self.sweep_index < self.burnin;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for i in 0..self.obs.len() {
            members[self.labels[i + 1]].push(i);
        }
        for state in 0..self.k {
            let zs: Vec<[f64; 2]> = members[state]
                .iter()
                .map(|&i| {
                    let (c, s) = (self.x[i].cos(), self.x[i].sin());
                    [self.r[i] * c, self.r[i] * s]
                })
                .collect();
            let ys: Vec<f64> = members[state].iter().map(|&i| self.y[i]).collect();

            // Latent mean: conjugate bivariate normal.
            let cov = self.params[state].cov();
            let (mean, pcov) =
                updates::mu_posterior(&zs, &cov, self.priors.mu_mean, self.priors.mu_var)?;
            self.params[state].mu = updates::sample_mvn(&mean, &pcov, &mut self.rng)?;

            // Regression coefficients: conjugate normal (intercept only for
            // the variant that cuts the latent vector out of the response).
            match self.variant {
                Variant::IndClGpn => {
                    let sum: f64 = ys.iter().sum();
                    let (m, v) = updates::scalar_normal_posterior(
                        sum,
                        ys.len(),
                        self.params[state].sigma_y_sq,
                        self.priors.gamma_mean,
                        self.priors.gamma_var,
                    );
                    let eps: f64 = self.rng.sample(StandardNormal);
                    self.params[state].gamma = [m + v.sqrt() * eps, 0.0, 0.0];
                }
                _ => {
                    let rows: Vec<([f64; 2], f64)> =
                        zs.iter().copied().zip(ys.iter().copied()).collect();
                    let (gm, gcov) = updates::gamma_posterior(
                        &rows,
                        self.params[state].sigma_y_sq,
                        self.priors.gamma_mean,
                        self.priors.gamma_var,
                    )?;
                    self.params[state].gamma = updates::sample_mvn(&gm, &gcov, &mut self.rng)?;
                }
            }

            // Response variance: conjugate inverse gamma.
            let g = self.params[state].gamma;
            let rss: f64 = zs
                .iter()
                .zip(&ys)
                .map(|(z, &yv)| {
                    let d = yv - g[0] - g[1] * z[0] - g[2] * z[1];
                    d * d
                })
                .sum();
            let (shape, rate) =
                updates::ig_posterior(self.priors.ig_shape, self.priors.ig_rate, ys.len(), rss);
            self.params[state].sigma_y_sq =
                updates::sample_inverse_gamma(shape, rate, &mut self.rng)?;

            // Latent covariance pair: joint Metropolis on (ln σ₁², atanh ρ).
            if self.variant != Variant::ClDpn {
                let cur = &self.params[state];
                let u = cur.sigma1_sq.ln();
                let w = cur.rho.atanh();
                let step = self.log_step_sigma_rho[state].exp();
                let e1: f64 = self.rng.sample(StandardNormal);
                let e2: f64 = self.rng.sample(StandardNormal);
                let (u_new, w_new) = (u + step * e1, w + step * e2);
                let (s_new, rho_new) = (u_new.exp(), w_new.tanh());
                // Proposals that collapse onto the parameter boundary in
                // floating point are rejected outright.
                let proposal_ok =
                    s_new.is_finite() && s_new > 0.0 && rho_new.abs() < 1.0;
                let accept = if proposal_ok {
                    let lp_cur = updates::sigma_rho_log_target(
                        &zs,
                        &cur.mu,
                        cur.sigma1_sq,
                        cur.rho,
                        &self.priors,
                    )? + u + (1.0 - cur.rho * cur.rho).ln();
                    let lp_new = updates::sigma_rho_log_target(
                        &zs,
                        &cur.mu,
                        s_new,
                        rho_new,
                        &self.priors,
                    )
                    .unwrap_or(f64::NEG_INFINITY)
                        + u_new
                        + (1.0 - rho_new * rho_new).ln();
                    let delta = lp_new - lp_cur;
                    delta >= 0.0 || self.rng.random::<f64>() < delta.exp()
                } else {
                    false
                };
                if accept {
                    self.params[state].sigma1_sq = s_new;
                    self.params[state].rho = rho_new;
                }
                if adapting {
                    self.win_acc_sigma_rho[state] += u32::from(accept);
                } else {
                    self.acc_sigma_rho[state] += u64::from(accept);
                    self.prop_sigma_rho[state] += 1;
                }
            }
        }
        Ok(())
    }

    /// Advance the sweep counter and, at the end of each burn-in adaptation
    /// window, nudge every log proposal scale toward its target acceptance
    /// rate with a diminishing gain.
    fn finish_sweep(&mut self) {
        let adapting = self.sweep_index < self.burnin;
        self.sweep_index += 1;
        if !adapting || self.sweep_index % self.adapt_window != 0 {
            return;
        }
        self.batches_done += 1;
        let gain = 1.0_f64.min(2.0 / (self.batches_done as f64).sqrt());
        let window = self.adapt_window as f64;
        if self.variant != Variant::ClDpn {
            for state in 0..self.k {
                let rate = f64::from(self.win_acc_sigma_rho[state]) / window;
                let s = &mut self.log_step_sigma_rho[state];
                *s = (*s + gain * (rate - self.target_accept)).clamp(LOG_STEP_MIN, LOG_STEP_MAX);
                self.win_acc_sigma_rho[state] = 0;
            }
        }
        if !self.exact_radius {
            for i in 0..self.obs.len() {
                if self.obs[i].fully_missing() {
                    continue;
                }
                let rate = f64::from(self.win_acc_radius[i]) / window;
                let s = &mut self.log_step_radius[i];
                *s = (*s + gain * (rate - self.target_accept_radius))
                    .clamp(LOG_STEP_MIN, LOG_STEP_MAX);
                self.win_acc_radius[i] = 0;
            }
        }
    }

    /// Log joint posterior density of the current state, up to an additive
    /// constant: complete-data emission terms, the collapsed label prior,
    /// and the parameter priors.
    pub fn log_posterior(&self) -> Result<f64> {
        let mut lp = collapsed_log_prior(&self.labels, self.k, self.hb)?;
        for i in 0..self.obs.len() {
            lp += joint_xyr_log_density(
                self.x[i],
                self.y[i],
                self.r[i],
                &self.params[self.labels[i + 1]],
            );
        }
        for p in &self.params {
            lp += log_param_prior(p, &self.priors, self.variant);
        }
        Ok(lp)
    }

    /// Record the current state as a draw. A non-finite posterior density
    /// aborts the run with a diagnostic dump of the offending state.
    pub fn snapshot(&self) -> Result<Draw> {
        let log_post = self.log_posterior()?;
        if !log_post.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite log posterior ({log_post}) at sweep {}; params: {:?}; first labels: {:?}",
                self.sweep_index,
                self.params,
                &self.labels[..self.labels.len().min(12)],
            )));
        }
        let imputed = self
            .obs
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.fully_observed())
            .map(|(i, o)| ImputedValue {
                index: i,
                x: o.x.is_none().then(|| self.x[i]),
                y: o.y.is_none().then(|| self.y[i]),
            })
            .collect();
        Ok(Draw {
            params: self.params.clone(),
            labels: self.labels.clone(),
            radii: self.r.clone(),
            imputed,
            log_post,
        })
    }

    /// Post burn-in acceptance rates (covariance move per regime, radius
    /// move pooled), where those moves ran.
    fn acceptance(&self) -> (Option<Vec<f64>>, Option<f64>) {
        let sr = (self.variant != Variant::ClDpn && self.prop_sigma_rho.iter().any(|&p| p > 0))
            .then(|| {
                self.acc_sigma_rho
                    .iter()
                    .zip(&self.prop_sigma_rho)
                    .map(|(&a, &p)| if p == 0 { f64::NAN } else { a as f64 / p as f64 })
                    .collect()
            });
        let rad = (!self.exact_radius && self.prop_radius > 0)
            .then(|| self.acc_radius as f64 / self.prop_radius as f64);
        (sr, rad)
    }
}

/// Log prior density of one regime's parameters (truncation constant of the
/// correlation prior included; only the variant's free parameters count).
fn log_param_prior(p: &RegimeParams, priors: &Priors, variant: Variant) -> f64 {
    let mut lp = log_normal1(p.mu[0], priors.mu_mean, priors.mu_var)
        + log_normal1(p.mu[1], priors.mu_mean, priors.mu_var)
        + log_normal1(p.gamma[0], priors.gamma_mean, priors.gamma_var)
        + updates::log_inverse_gamma(p.sigma_y_sq, priors.ig_shape, priors.ig_rate);
    if variant != Variant::IndClGpn {
        lp += log_normal1(p.gamma[1], priors.gamma_mean, priors.gamma_var)
            + log_normal1(p.gamma[2], priors.gamma_mean, priors.gamma_var);
    }
    if variant != Variant::ClDpn {
        lp += updates::log_inverse_gamma(p.sigma1_sq, priors.ig_shape, priors.ig_rate)
            + updates::log_truncated_normal(p.rho, priors.rho_mean, priors.rho_var, -1.0, 1.0);
    }
    lp
}

/// Run one chain to completion.
pub fn run_chain(obs: &[Observation], cfg: &ChainConfig, priors: &Priors) -> Result<ChainOutput> {
    let mut sampler = Sampler::new(obs, cfg, priors)?;
    let mut draws = Vec::with_capacity(cfg.kept_draws());
    for sweep in 1..=cfg.iterations {
        sampler.step()?;
        if sweep > cfg.burnin && (sweep - cfg.burnin) % cfg.thin == 0 {
            draws.push(sampler.snapshot()?);
        }
    }
    let map_index = relabel::map_index(&draws).ok_or_else(|| {
        Error::invalid("chain configuration records zero draws")
    })?;
    let (accept_sigma_rho, accept_radius) = sampler.acceptance();
    Ok(ChainOutput {
        k: cfg.k,
        variant: cfg.variant,
        draws,
        map_index,
        accept_sigma_rho,
        accept_radius,
    })
}
