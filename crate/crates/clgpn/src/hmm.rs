//! Hidden-label machinery with the transition matrix integrated out.
//!
//! Labels live at positions `0..=T`; position 0 is non-emitting (it only
//! seeds the first transition) and position `t ≥ 1` emits observation `t-1`.
//! With a uniform initial state and independent symmetric `Dirichlet(β)`
//! priors on the transition rows, the transition matrix integrates out:
//!
//! ```text
//! f(ξ) = (1/K) · Γ(Kβ)^K / Γ(β)^{K²}
//!        · ∏_{k,h} Γ(n_{k,h} + β) / ∏_k Γ(n_k − 1{ξ_T = k} + Kβ),
//! ```
//!
//! where `n_{k,h}` counts transitions `k → h` and `n_k` counts occupancy over
//! all positions (so `n_k − 1{ξ_T=k}` is the number of transitions leaving
//! `k`). Single-site conditionals follow from ratios of this expression and
//! drive the collapsed Gibbs sweep; sampled transition matrices can be
//! recovered afterwards from their Dirichlet full conditional.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

/// Concentration of the symmetric Dirichlet prior on each transition row.
#[derive(Clone, Copy, Debug)]
pub struct HyperBeta {
    beta: f64,
}

impl HyperBeta {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!(
                "Dirichlet concentration must be positive and finite, got {beta}"
            )));
        }
        Ok(HyperBeta { beta })
    }

    pub fn get(self) -> f64 {
        self.beta
    }
}

/// Transition-pair and occupancy counts of a label sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionCounts {
    k: usize,
    pair: Vec<u32>,      // row-major k×k: pair[from*k + to]
    occupancy: Vec<u32>, // over positions 0..=T
}

impl TransitionCounts {
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        validate_labels(labels, k)?;
        let mut c = TransitionCounts {
            k,
            pair: vec![0; k * k],
            occupancy: vec![0; k],
        };
        for t in 0..labels.len() {
            c.occupancy[labels[t]] += 1;
            if t > 0 {
                c.pair[labels[t - 1] * k + labels[t]] += 1;
            }
        }
        Ok(c)
    }

    pub fn n_states(&self) -> usize {
        self.k
    }

    /// Count of transitions `from → to`.
    pub fn pair(&self, from: usize, to: usize) -> u32 {
        self.pair[from * self.k + to]
    }

    /// Occupancy of state `s` over positions `0..=T`.
    pub fn occupancy(&self, s: usize) -> u32 {
        self.occupancy[s]
    }

    /// Remove position `t`'s contributions (its occupancy and the one or two
    /// pairs touching it), given the full label sequence.
    fn remove_position(&mut self, labels: &[usize], t: usize) {
        let last = labels.len() - 1;
        self.occupancy[labels[t]] -= 1;
        if t > 0 {
            self.pair[labels[t - 1] * self.k + labels[t]] -= 1;
        }
        if t < last {
            self.pair[labels[t] * self.k + labels[t + 1]] -= 1;
        }
    }

    /// Reinsert position `t` (inverse of [`Self::remove_position`], after the
    /// label at `t` may have changed).
    fn insert_position(&mut self, labels: &[usize], t: usize) {
        let last = labels.len() - 1;
        self.occupancy[labels[t]] += 1;
        if t > 0 {
            self.pair[labels[t - 1] * self.k + labels[t]] += 1;
        }
        if t < last {
            self.pair[labels[t] * self.k + labels[t + 1]] += 1;
        }
    }
}

fn validate_labels(labels: &[usize], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("state count must be positive"));
    }
    if labels.is_empty() {
        return Err(Error::invalid("label sequence must be non-empty"));
    }
    if let Some(&bad) = labels.iter().find(|&&s| s >= k) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {k} states"
        )));
    }
    Ok(())
}

/// Log prior probability of a label sequence with the transition matrix
/// integrated out (uniform initial state included).
pub fn collapsed_log_prior(labels: &[usize], k: usize, hb: HyperBeta) -> Result<f64> {
    let counts = TransitionCounts::from_labels(labels, k)?;
    Ok(collapsed_log_prior_from_counts(
        &counts,
        labels[labels.len() - 1],
        hb.get(),
    ))
}

pub(crate) fn collapsed_log_prior_from_counts(
    counts: &TransitionCounts,
    last: usize,
    beta: f64,
) -> f64 {
    let k = counts.k;
    let kf = k as f64;
    let mut lp = -kf.ln() + kf * ln_gamma(kf * beta) - kf * kf * ln_gamma(beta);
    for from in 0..k {
        for to in 0..k {
            lp += ln_gamma(counts.pair(from, to) as f64 + beta);
        }
        let leaving = counts.occupancy(from) - u32::from(from == last);
        lp -= ln_gamma(leaving as f64 + kf * beta);
    }
    lp
}

/// Full-conditional probabilities of the label at position `t` given all
/// other labels, marginal over the transition matrix.
///
/// `emission_ll[k]` is the log emission density of the observation at
/// position `t` under regime `k`; it must be `None` exactly when `t = 0`
/// (the non-emitting seed position).
pub fn state_conditional_weights(
    labels: &[usize],
    t: usize,
    k: usize,
    hb: HyperBeta,
    emission_ll: Option<&[f64]>,
) -> Result<Vec<f64>> {
    validate_labels(labels, k)?;
    let last_pos = labels.len() - 1;
    if t > last_pos {
        return Err(Error::invalid(format!(
            "position {t} out of range for sequence of length {}",
            labels.len()
        )));
    }
    match (t == 0, emission_ll) {
        (true, Some(_)) => {
            return Err(Error::invalid(
                "position 0 is non-emitting; no emission vector applies",
            ))
        }
        (false, None) => {
            return Err(Error::invalid(format!(
                "position {t} emits; an emission vector is required"
            )))
        }
        (false, Some(e)) if e.len() != k => {
            return Err(Error::invalid(format!(
                "emission vector has length {}, expected {k}",
                e.len()
            )))
        }
        _ => {}
    }
    if last_pos == 0 {
        // Lone seed position: uniform over states.
        return Ok(vec![1.0 / k as f64; k]);
    }
    let mut counts = TransitionCounts::from_labels(labels, k)?;
    counts.remove_position(labels, t);
    let mut buf = vec![0.0; k];
    conditional_weights_core(&counts, labels, t, hb.get(), emission_ll, &mut buf);
    Ok(buf)
}

/// Core weight computation. `counts` must already exclude position `t`.
/// Writes normalized probabilities into `out`.
fn conditional_weights_core(
    counts: &TransitionCounts,
    labels: &[usize],
    t: usize,
    beta: f64,
    emission_ll: Option<&[f64]>,
    out: &mut [f64],
) {
    let k = counts.k;
    let kf = k as f64;
    let last_pos = labels.len() - 1;
    let prev = (t > 0).then(|| labels[t - 1]);
    let next = (t < last_pos).then(|| labels[t + 1]);
    let final_label = labels[last_pos]; // fixed whenever t < last_pos
    for (cand, w) in out.iter_mut().enumerate() {
        let mut lw = 0.0;
        if let Some(p) = prev {
            // +1 when both added transitions land in the same (cand, cand) cell.
            let a = f64::from(next == Some(cand) && p == cand);
            lw += (counts.pair(p, cand) as f64 + beta + a).ln();
        }
        if let Some(n) = next {
            lw += (counts.pair(cand, n) as f64 + beta).ln();
            // The occupancy denominator varies over candidates only when the
            // final label stays fixed, i.e. for t < last_pos.
            let leaving = counts.occupancy(cand) - u32::from(final_label == cand && t != last_pos);
            lw -= (leaving as f64 + kf * beta).ln();
        }
        if let Some(e) = emission_ll {
            lw += e[cand];
        }
        *w = lw;
    }
    normalize_log_weights(out);
}

/// In-place softmax with max subtraction.
pub(crate) fn normalize_log_weights(w: &mut [f64]) {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in w.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
}

/// Draw an index from normalized probabilities.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// One systematic single-site Gibbs sweep over all label positions.
///
/// `emission_ll(t, buf)` must fill `buf[k]` with the log emission density of
/// the observation at position `t ≥ 1` under each regime.
pub fn sample_state_sweep<R, F>(
    labels: &mut [usize],
    k: usize,
    hb: HyperBeta,
    mut emission_ll: F,
    rng: &mut R,
) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &mut [f64]),
{
    validate_labels(labels, k)?;
    let beta = hb.get();
    let last_pos = labels.len() - 1;
    if last_pos == 0 {
        labels[0] = rng.random_range(0..k);
        return Ok(());
    }
    let mut counts = TransitionCounts::from_labels(labels, k)?;
    let mut weights = vec![0.0; k];
    let mut emis = vec![0.0; k];
    for t in 0..=last_pos {
        counts.remove_position(labels, t);
        let emis_opt = if t >= 1 {
            emission_ll(t, &mut emis);
            Some(emis.as_slice())
        } else {
            None
        };
        conditional_weights_core(&counts, labels, t, beta, emis_opt, &mut weights);
        labels[t] = sample_categorical(&weights, rng);
        counts.insert_position(labels, t);
    }
    Ok(())
}

/// Draw a transition matrix and initial distribution from their posterior
/// given a label sequence: rows `π_k ~ Dirichlet(β + n_{k,·})` and
/// `π₀ ~ Dirichlet(β + 1{ξ₀ = ·})`.
pub fn recover_transition<R: Rng + ?Sized>(
    labels: &[usize],
    k: usize,
    hb: HyperBeta,
    rng: &mut R,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let counts = TransitionCounts::from_labels(labels, k)?;
    let beta = hb.get();
    let mut pi = Vec::with_capacity(k);
    for from in 0..k {
        let alphas: Vec<f64> = (0..k).map(|to| beta + counts.pair(from, to) as f64).collect();
        pi.push(sample_dirichlet(&alphas, rng)?);
    }
    let alphas0: Vec<f64> = (0..k)
        .map(|s| beta + f64::from(labels[0] == s))
        .collect();
    let pi0 = sample_dirichlet(&alphas0, rng)?;
    Ok((pi, pi0))
}

/// Posterior-mean transition matrix and initial distribution given a label
/// sequence (the deterministic Dirichlet means of [`recover_transition`]).
pub fn posterior_mean_transition(
    labels: &[usize],
    k: usize,
    hb: HyperBeta,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let counts = TransitionCounts::from_labels(labels, k)?;
    let beta = hb.get();
    let kf = k as f64;
    let last = labels[labels.len() - 1];
    let mut pi = Vec::with_capacity(k);
    for from in 0..k {
        let leaving = (counts.occupancy(from) - u32::from(from == last)) as f64;
        let row: Vec<f64> = (0..k)
            .map(|to| (counts.pair(from, to) as f64 + beta) / (leaving + kf * beta))
            .collect();
        pi.push(row);
    }
    let pi0: Vec<f64> = (0..k)
        .map(|s| (beta + f64::from(labels[0] == s)) / (1.0 + kf * beta))
        .collect();
    Ok((pi, pi0))
}

fn sample_dirichlet<R: Rng + ?Sized>(alphas: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let mut draws = Vec::with_capacity(alphas.len());
    let mut sum = 0.0;
    for &a in alphas {
        let g = Gamma::new(a, 1.0)
            .map_err(|e| Error::invalid(format!("bad Dirichlet concentration {a}: {e}")))?;
        let v: f64 = g.sample(rng);
        // Shape < 1 can underflow to exactly 0; nudge to keep the simplex open.
        let v = v.max(1e-300);
        draws.push(v);
        sum += v;
    }
    for v in &mut draws {
        *v /= sum;
    }
    Ok(draws)
}

/// Log likelihood of the observed series with the labels summed out by the
/// scaled forward recursion. `emission_ll[t][k]` is the log emission density
/// of observation `t` (position `t+1`) under regime `k`; the seed position
/// contributes no emission, so the recursion first propagates `pi0` through
/// one transition step.
pub fn forward_loglik(
    emission_ll: &[Vec<f64>],
    pi: &[Vec<f64>],
    pi0: &[f64],
) -> Result<f64> {
    let k = pi0.len();
    validate_stochastic(pi, pi0, k)?;
    if emission_ll.is_empty() {
        return Err(Error::invalid("need at least one observation"));
    }
    let mut alpha = vec![0.0_f64; k];
    // Position 1 occupancy: pi0 propagated one step.
    for (j, a) in alpha.iter_mut().enumerate() {
        *a = (0..k).map(|i| pi0[i] * pi[i][j]).sum();
    }
    let mut ll = 0.0;
    let mut next = vec![0.0_f64; k];
    for (t, emis) in emission_ll.iter().enumerate() {
        if emis.len() != k {
            return Err(Error::invalid(format!(
                "emission row {t} has length {}, expected {k}",
                emis.len()
            )));
        }
        let max = emis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite emission log density at observation {t}"
            )));
        }
        let mut scale = 0.0;
        for j in 0..k {
            alpha[j] *= (emis[j] - max).exp();
            scale += alpha[j];
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::numerical(format!(
                "forward recursion underflowed at observation {t}"
            )));
        }
        ll += max + scale.ln();
        if t + 1 < emission_ll.len() {
            for j in 0..k {
                next[j] = (0..k).map(|i| alpha[i] * pi[i][j]).sum::<f64>() / scale;
            }
            std::mem::swap(&mut alpha, &mut next);
        }
    }
    Ok(ll)
}

fn validate_stochastic(pi: &[Vec<f64>], pi0: &[f64], k: usize) -> Result<()> {
    if k == 0 || pi.len() != k {
        return Err(Error::invalid(format!(
            "transition matrix has {} rows, expected {k}",
            pi.len()
        )));
    }
    let check_row = |row: &[f64], what: &str| -> Result<()> {
        if row.len() != k {
            return Err(Error::invalid(format!("{what} has wrong length")));
        }
        if row.iter().any(|&p| !(0.0..=1.0 + 1e-8).contains(&p)) {
            return Err(Error::invalid(format!("{what} has entries outside [0, 1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!("{what} sums to {s}, expected 1")));
        }
        Ok(())
    };
    check_row(pi0, "initial distribution")?;
    for (i, row) in pi.iter().enumerate() {
        check_row(row, &format!("transition row {i}"))?;
    }
    Ok(())
}
