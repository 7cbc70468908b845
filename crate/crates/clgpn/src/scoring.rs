//! Model-selection criteria evaluated at the maximum-a-posteriori draw,
//! probabilistic scores for imputed values, and interpretable per-regime
//! summaries of a fitted model.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::angle::{arc_distance, atan2_wrapped};
use crate::dataset::Observation;
use crate::density;
use crate::error::{Error, Result};
use crate::hmm::{self, HyperBeta};
use crate::params::{RegimeParams, Variant};

/// Number of free parameters of a `k`-regime model: the per-regime emission
/// parameters plus `k(k-1)` transition and `k-1` initial-distribution
/// degrees of freedom.
///
/// Panics if `k == 0`.
pub fn param_count(variant: Variant, k: usize) -> usize {
    assert!(k >= 1, "param_count needs at least one regime");
    variant.free_params_per_regime() * k + k * (k - 1) + (k - 1)
}

/// Log density of a possibly partially observed point under one regime,
/// with missing coordinates marginalized out analytically: the circular
/// marginal is projected-normal, the linear marginal is Gaussian with the
/// moments of `RegimeParams::linear_marginal`, and a fully missing pair
/// contributes `log 1 = 0`.
pub fn observed_log_density(o: &Observation, p: &RegimeParams) -> f64 {
    match (o.x, o.y) {
        (Some(x), Some(y)) => density::clgpn_log_density(x, y, p),
        (Some(x), None) => density::pn_log_density(x, p),
        (None, Some(y)) => {
            let (mean, var) = p.linear_marginal();
            density::log_normal1(y, mean, var)
        }
        (None, None) => 0.0,
    }
}

/// Model-selection criteria at the maximum-a-posteriori draw. All three are
/// on the "smaller is better" deviance scale.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub aic: f64,
    pub bic: f64,
    pub icl: f64,
    pub param_count: usize,
    /// Label-marginalized log likelihood of the observed series at the
    /// map parameters (forward recursion with the posterior-mean
    /// transition probabilities plugged in).
    pub map_loglik: f64,
    /// Log likelihood with each observation classified to its map regime.
    pub classified_loglik: f64,
}

/// Evaluate AIC, BIC, and ICL at the maximum-a-posteriori draw.
///
/// `map_labels` is the full label sequence (length `T + 1`, including the
/// seed position that precedes the first observation). The transition
/// probabilities entering the forward recursion are the deterministic
/// Dirichlet posterior means given `map_labels`; ICL replaces the
/// marginalized likelihood with the classified one plus the collapsed log
/// prior of the label sequence:
///
/// - `AIC = -2 * map_loglik + 2p`
/// - `BIC = -2 * map_loglik + p * ln T`
/// - `ICL = -2 * classified_loglik - 2 * collapsed_log_prior + p * ln T`
pub fn criteria(
    map_params: &[RegimeParams],
    map_labels: &[usize],
    obs: &[Observation],
    variant: Variant,
    hb: HyperBeta,
) -> Result<CriterionReport> {
    let k = map_params.len();
    if k == 0 {
        return Err(Error::invalid("criteria need at least one regime"));
    }
    if obs.is_empty() {
        return Err(Error::invalid("criteria need at least one observation"));
    }
    if map_labels.len() != obs.len() + 1 {
        return Err(Error::invalid(format!(
            "label sequence must have length T+1 = {}, got {}",
            obs.len() + 1,
            map_labels.len()
        )));
    }
    if let Some(&bad) = map_labels.iter().find(|&&l| l >= k) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {k} regimes"
        )));
    }
    let (pi, pi0) = hmm::posterior_mean_transition(map_labels, k, hb)?;
    let emission_ll: Vec<Vec<f64>> = obs
        .iter()
        .map(|o| map_params.iter().map(|p| observed_log_density(o, p)).collect())
        .collect();
    let map_loglik = hmm::forward_loglik(&emission_ll, &pi, &pi0)?;
    let classified_loglik: f64 = emission_ll
        .iter()
        .zip(&map_labels[1..])
        .map(|(row, &l)| row[l])
        .sum();
    let p = param_count(variant, k);
    let pf = p as f64;
    let log_t = (obs.len() as f64).ln();
    let log_prior = hmm::collapsed_log_prior(map_labels, k, hb)?;
    Ok(CriterionReport {
        aic: -2.0 * map_loglik + 2.0 * pf,
        bic: -2.0 * map_loglik + pf * log_t,
        icl: -2.0 * classified_loglik - 2.0 * log_prior + pf * log_t,
        param_count: p,
        map_loglik,
        classified_loglik,
    })
}

/// Sample-based continuous ranked probability score for a linear variable:
/// `mean |X - y| - 0.5 * mean |X - X'|` with the pair mean over all ordered
/// sample pairs.
pub fn crps_linear(samples: &[f64], y: f64) -> Result<f64> {
    crps_with(samples, y, |a, b| (a - b).abs())
}

/// Sample-based CRPS for a circular variable, using the shortest-arc
/// distance (radians) in the energy form of the score.
pub fn crps_circular(samples: &[f64], x: f64) -> Result<f64> {
    crps_with(samples, x, arc_distance)
}

fn crps_with(samples: &[f64], truth: f64, d: impl Fn(f64, f64) -> f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::invalid(
            "CRPS needs at least two predictive samples",
        ));
    }
    let n = samples.len() as f64;
    let to_truth: f64 = samples.iter().map(|&s| d(s, truth)).sum::<f64>() / n;
    let mut pair_sum = 0.0;
    // The distance is symmetric with zero diagonal: sum unordered pairs once
    // and double, which already equals the ordered-pair total.
    for (i, &a) in samples.iter().enumerate() {
        for &b in &samples[i + 1..] {
            pair_sum += d(a, b);
        }
    }
    Ok(to_truth - pair_sum / (n * n))
}

/// Mean shortest-arc distance between predictive samples and the true angle.
pub fn ape(samples: &[f64], x: f64) -> Result<f64> {
    mean_over_samples(samples, |s| arc_distance(s, x))
}

/// Mean squared error of predictive samples against the true linear value.
pub fn mse(samples: &[f64], y: f64) -> Result<f64> {
    mean_over_samples(samples, |s| (s - y) * (s - y))
}

fn mean_over_samples(samples: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("need at least one predictive sample"));
    }
    Ok(samples.iter().map(|&s| f(s)).sum::<f64>() / samples.len() as f64)
}

/// Posterior predictive samples for one held-out coordinate together with
/// the value that was actually observed before it was held out.
#[derive(Clone, Debug)]
pub struct SitePrediction {
    pub samples: Vec<f64>,
    pub truth: f64,
}

/// Predictive scores averaged over held-out coordinates: CRPS and mean arc
/// prediction error over the circular sites, CRPS and mean squared error
/// over the linear sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    pub crps_circular: f64,
    pub crps_linear: f64,
    pub ape: f64,
    pub mse: f64,
}

/// Average the per-site scores over all held-out coordinates.
pub fn score_report(
    circular: &[SitePrediction],
    linear: &[SitePrediction],
) -> Result<ScoreReport> {
    if circular.is_empty() || linear.is_empty() {
        return Err(Error::invalid(
            "scoring needs at least one circular and one linear held-out site",
        ));
    }
    fn mean_over(
        sites: &[SitePrediction],
        f: impl Fn(&SitePrediction) -> Result<f64>,
    ) -> Result<f64> {
        let mut acc = 0.0;
        for s in sites {
            acc += f(s)?;
        }
        Ok(acc / sites.len() as f64)
    }
    Ok(ScoreReport {
        crps_circular: mean_over(circular, |s| crps_circular(&s.samples, s.truth))?,
        crps_linear: mean_over(linear, |s| crps_linear(&s.samples, s.truth))?,
        ape: mean_over(circular, |s| ape(&s.samples, s.truth))?,
        mse: mean_over(linear, |s| mse(&s.samples, s.truth))?,
    })
}

/// Group a chain's imputed values into per-site predictive samples, paired
/// with the pre-drop truth. `original` is the series before values were
/// dropped, `masked` the series the chain actually saw. A site is scored
/// when `masked` is missing a coordinate that `original` has; each retained
/// draw must impute every such site.
pub fn imputation_predictions(
    draws: &[crate::mcmc::Draw],
    original: &[Observation],
    masked: &[Observation],
) -> Result<(Vec<SitePrediction>, Vec<SitePrediction>)> {
    if draws.is_empty() {
        return Err(Error::invalid("need at least one retained draw"));
    }
    if original.len() != masked.len() {
        return Err(Error::invalid(format!(
            "original and masked series lengths differ: {} vs {}",
            original.len(),
            masked.len()
        )));
    }
    let t = original.len();
    let mut circ_pos = vec![None; t];
    let mut lin_pos = vec![None; t];
    let mut circular = Vec::new();
    let mut linear = Vec::new();
    for i in 0..t {
        if masked[i].x.is_none() {
            if let Some(truth) = original[i].x {
                circ_pos[i] = Some(circular.len());
                circular.push(SitePrediction { samples: Vec::with_capacity(draws.len()), truth });
            }
        }
        if masked[i].y.is_none() {
            if let Some(truth) = original[i].y {
                lin_pos[i] = Some(linear.len());
                linear.push(SitePrediction { samples: Vec::with_capacity(draws.len()), truth });
            }
        }
    }
    for draw in draws {
        for iv in &draw.imputed {
            if iv.index >= t {
                return Err(Error::invalid(format!(
                    "imputed index {} outside the series of length {t}",
                    iv.index
                )));
            }
            if let (Some(pos), Some(x)) = (circ_pos[iv.index], iv.x) {
                circular[pos].samples.push(x);
            }
            if let (Some(pos), Some(y)) = (lin_pos[iv.index], iv.y) {
                linear[pos].samples.push(y);
            }
        }
    }
    for site in circular.iter().chain(&linear) {
        if site.samples.len() != draws.len() {
            return Err(Error::invalid(format!(
                "a held-out site received {} imputations from {} draws",
                site.samples.len(),
                draws.len()
            )));
        }
    }
    Ok((circular, linear))
}

/// Interpretable features of one fitted regime: circular mean direction and
/// mean resultant length (Monte Carlo), analytic linear mean and variance,
/// and the squared circular–linear correlation of the data classified to
/// the regime with its association test statistic. The correlation fields
/// are absent when fewer than four points are classified to the regime or
/// the classified data are degenerate.
#[derive(Clone, Debug)]
pub struct RegimeSummary {
    pub circ_mean: f64,
    pub concentration: f64,
    pub lin_mean: f64,
    pub lin_var: f64,
    pub cl_corr_sq: Option<f64>,
    pub f_stat: Option<f64>,
}

/// Summarize one regime. `classified` holds the fully observed `(x, y)`
/// pairs classified to this regime by the map label sequence; `mc_draws`
/// (at least 10⁴) controls the Monte Carlo estimate of the circular mean
/// and concentration.
pub fn regime_summary<R: Rng + ?Sized>(
    p: &RegimeParams,
    classified: &[(f64, f64)],
    mc_draws: usize,
    rng: &mut R,
) -> Result<RegimeSummary> {
    if mc_draws < 10_000 {
        return Err(Error::invalid(format!(
            "circular moments need at least 10000 Monte Carlo draws, got {mc_draws}"
        )));
    }
    let (lin_mean, lin_var) = p.linear_marginal();
    let mut sum_c = 0.0;
    let mut sum_s = 0.0;
    for _ in 0..mc_draws {
        let z = density::sample_latent(p, rng);
        let norm = z[0].hypot(z[1]);
        if norm > 0.0 {
            sum_c += z[0] / norm;
            sum_s += z[1] / norm;
        }
    }
    let n = mc_draws as f64;
    let concentration = (sum_c / n).hypot(sum_s / n);
    let circ_mean = atan2_wrapped(sum_c, sum_s)?;
    let (cl_corr_sq, f_stat) = match circular_linear_corr_sq(classified) {
        Some(r2) => (Some(r2), Some(mardia_f_stat(r2, classified.len()))),
        None => (None, None),
    };
    Ok(RegimeSummary {
        circ_mean,
        concentration,
        lin_mean,
        lin_var,
        cl_corr_sq,
        f_stat,
    })
}

/// Squared circular–linear correlation between angles and a linear variable
/// (the R² of regressing the linear values on the cosine and sine of the
/// angle):
///
/// `rho² = (r²_yc + r²_ys - 2 r_yc r_ys r_cs) / (1 - r²_cs)`
///
/// with `r_yc = corr(y, cos x)`, `r_ys = corr(y, sin x)`, and
/// `r_cs = corr(cos x, sin x)`. Returns `None` for fewer than four points
/// or degenerate marginals (constant `y`, constant angle, or collinear
/// cosine/sine).
pub fn circular_linear_corr_sq(data: &[(f64, f64)]) -> Option<f64> {
    if data.len() < 4 {
        return None;
    }
    let n = data.len() as f64;
    let (mut my, mut mc, mut ms) = (0.0, 0.0, 0.0);
    for &(x, y) in data {
        my += y;
        mc += x.cos();
        ms += x.sin();
    }
    my /= n;
    mc /= n;
    ms /= n;
    let (mut vy, mut vc, mut vs) = (0.0, 0.0, 0.0);
    let (mut cyc, mut cys, mut ccs) = (0.0, 0.0, 0.0);
    for &(x, y) in data {
        let dy = y - my;
        let dc = x.cos() - mc;
        let ds = x.sin() - ms;
        vy += dy * dy;
        vc += dc * dc;
        vs += ds * ds;
        cyc += dy * dc;
        cys += dy * ds;
        ccs += dc * ds;
    }
    if vy <= 0.0 || vc <= 0.0 || vs <= 0.0 {
        return None;
    }
    let r_yc = cyc / (vy * vc).sqrt();
    let r_ys = cys / (vy * vs).sqrt();
    let r_cs = ccs / (vc * vs).sqrt();
    let denom = 1.0 - r_cs * r_cs;
    if denom <= f64::EPSILON {
        return None;
    }
    let r2 = (r_yc * r_yc + r_ys * r_ys - 2.0 * r_yc * r_ys * r_cs) / denom;
    Some(r2.clamp(0.0, 1.0))
}

/// Association test statistic `rho² (n - 1) / (1 - rho²)`, distributed as
/// F(2, n-3) under no circular–linear association.
pub fn mardia_f_stat(corr_sq: f64, n: usize) -> f64 {
    corr_sq * (n as f64 - 1.0) / (1.0 - corr_sq)
}

/// 95th percentile of the F(2, n-3) reference distribution for the
/// association statistic; needs `n >= 4`.
pub fn f_threshold_95(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::invalid(format!(
            "the association test needs at least 4 points, got {n}"
        )));
    }
    let f = FisherSnedecor::new(2.0, (n - 3) as f64)
        .map_err(|e| Error::invalid(format!("bad F distribution: {e}")))?;
    Ok(f.inverse_cdf(0.95))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::wrap;
    use crate::quad;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn regime_a() -> RegimeParams {
        RegimeParams {
            mu: [1.0, 0.6],
            sigma1_sq: 1.5,
            rho: 0.4,
            gamma: [0.5, 1.0, -0.7],
            sigma_y_sq: 0.3,
        }
    }

    fn regime_b() -> RegimeParams {
        RegimeParams {
            mu: [-0.4, 1.2],
            sigma1_sq: 0.8,
            rho: -0.3,
            gamma: [2.0, -0.5, 0.3],
            sigma_y_sq: 0.6,
        }
    }

    #[test]
    fn param_count_follows_the_counting_convention() {
        assert_eq!(param_count(Variant::ClGpn, 3), 32);
        assert_eq!(param_count(Variant::ClDpn, 1), 6);
        assert_eq!(param_count(Variant::IndClGpn, 2), 15);
        assert_eq!(param_count(Variant::ClGpn, 1), 8);
        assert_eq!(param_count(Variant::ClDpn, 3), 26);
    }

    #[test]
    fn linear_crps_matches_hand_computed_values() {
        assert_abs_diff_eq!(
            crps_linear(&[0.0, 2.0], 1.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            crps_linear(&[1.0, 1.0, 1.0], 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(crps_linear(&[1.5, 1.5, 1.5], 1.5).unwrap(), 0.0);
        assert!(crps_linear(&[1.0], 0.0).is_err());
    }

    #[test]
    fn circular_crps_matches_hand_computed_values_and_rotates_freely() {
        assert_abs_diff_eq!(
            crps_circular(&[0.0, PI], PI / 2.0).unwrap(),
            PI / 4.0,
            epsilon = 1e-15
        );
        assert_eq!(crps_circular(&[2.0, 2.0], 2.0).unwrap(), 0.0);
        assert!(crps_circular(&[0.5], 0.5).is_err());
        // Rotating every angle by a common offset (with wrap-around) leaves
        // the score unchanged.
        let samples = [0.3, 5.9, 2.2, 3.7];
        let x = 1.0;
        let base = crps_circular(&samples, x).unwrap();
        for off in [0.7, 2.5, 4.9] {
            let rotated: Vec<f64> = samples.iter().map(|&s| wrap(s + off)).collect();
            let v = crps_circular(&rotated, wrap(x + off)).unwrap();
            assert_abs_diff_eq!(v, base, epsilon = 1e-12);
        }
    }

    #[test]
    fn prediction_error_and_squared_error_match_hand_values() {
        assert_abs_diff_eq!(ape(&[0.0, PI], 0.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mse(&[0.0, 2.0], 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(ape(&[1.2, 1.2], 1.2).unwrap(), 0.0);
        assert_eq!(mse(&[0.4], 0.4).unwrap(), 0.0);
        assert!(ape(&[], 0.0).is_err());
        assert!(mse(&[], 0.0).is_err());
    }

    #[test]
    fn score_report_averages_per_site_scores() {
        let circ = [
            SitePrediction { samples: vec![0.0, PI], truth: PI / 2.0 },
            SitePrediction { samples: vec![1.0, 1.0], truth: 1.0 },
        ];
        let lin = [
            SitePrediction { samples: vec![0.0, 2.0], truth: 1.0 },
            SitePrediction { samples: vec![3.0, 3.0], truth: 3.0 },
        ];
        let r = score_report(&circ, &lin).unwrap();
        assert_abs_diff_eq!(r.crps_circular, PI / 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.ape, PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.crps_linear, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(r.mse, 0.5, epsilon = 1e-14);
        assert!(score_report(&[], &lin).is_err());
        assert!(score_report(&circ, &[]).is_err());
    }

    #[test]
    fn imputed_draws_group_into_per_site_predictions() {
        use crate::mcmc::{Draw, ImputedValue};
        let original = vec![
            Observation::new(Some(1.0), Some(2.0)),
            Observation::new(Some(3.0), Some(4.0)),
            Observation::new(Some(5.0), Some(6.0)),
            Observation::new(Some(0.5), None), // missing in the original too
        ];
        let masked = vec![
            Observation::new(None, Some(2.0)),       // x held out
            Observation::new(Some(3.0), None),       // y held out
            Observation::new(None, None),            // both held out
            Observation::new(Some(0.5), None),       // not scoreable: no truth
        ];
        let mk_draw = |offset: f64| Draw {
            params: vec![regime_a()],
            labels: vec![0; 5],
            radii: vec![1.0; 4],
            imputed: vec![
                ImputedValue { index: 0, x: Some(0.1 + offset), y: None },
                ImputedValue { index: 1, x: None, y: Some(4.5 + offset) },
                ImputedValue { index: 2, x: Some(1.5 + offset), y: Some(6.5 + offset) },
                ImputedValue { index: 3, x: None, y: Some(9.0 + offset) },
            ],
            log_post: 0.0,
        };
        let draws = vec![mk_draw(0.0), mk_draw(0.2)];
        let (circ, lin) = imputation_predictions(&draws, &original, &masked).unwrap();
        assert_eq!(circ.len(), 2);
        assert_eq!(lin.len(), 2);
        assert_eq!(circ[0].truth, 1.0);
        assert_eq!(circ[0].samples, vec![0.1, 0.30000000000000004]);
        assert_eq!(circ[1].truth, 5.0);
        assert_eq!(lin[0].truth, 4.0);
        assert_eq!(lin[1].truth, 6.0);
        assert_eq!(lin[1].samples, vec![6.5, 6.7]);

        // A draw that skips a held-out site is rejected.
        let mut bad = mk_draw(0.0);
        bad.imputed.remove(0);
        assert!(imputation_predictions(&[bad], &original, &masked).is_err());
        assert!(imputation_predictions(&[], &original, &masked).is_err());
        assert!(imputation_predictions(&draws, &original[..3], &masked).is_err());
    }

    #[test]
    fn fully_missing_and_partially_missing_densities_marginalize_correctly() {
        let p = regime_a();
        let both_missing = Observation::new(None, None);
        assert_eq!(observed_log_density(&both_missing, &p), 0.0);

        // Integrating the joint over the angle must reproduce the Gaussian
        // linear marginal.
        for y in [-0.5, 0.8, 2.0] {
            let o = Observation::new(None, Some(y));
            let direct = observed_log_density(&o, &p).exp();
            let quadr = quad::integrate(
                |x| density::clgpn_log_density(x, y, &p).exp(),
                0.0,
                2.0 * PI,
                1e-12,
            )
            .unwrap();
            assert_abs_diff_eq!(direct, quadr, epsilon = 1e-8);
        }

        let o = Observation::new(Some(1.1), None);
        assert_eq!(
            observed_log_density(&o, &p),
            density::pn_log_density(1.1, &p)
        );
        let o = Observation::new(Some(0.3), Some(1.4));
        assert_eq!(
            observed_log_density(&o, &p),
            density::clgpn_log_density(0.3, 1.4, &p)
        );
    }

    fn small_case() -> (Vec<RegimeParams>, Vec<Observation>, Vec<usize>) {
        let params = vec![regime_a(), regime_b()];
        let obs = vec![
            Observation::new(Some(0.4), Some(1.0)),
            Observation::new(Some(2.8), None),
            Observation::new(None, Some(2.3)),
            Observation::new(None, None),
            Observation::new(Some(5.7), Some(0.2)),
            Observation::new(Some(1.9), Some(1.7)),
        ];
        let labels = vec![0, 0, 1, 1, 0, 0, 1];
        (params, obs, labels)
    }

    #[test]
    fn criteria_match_their_defining_formulas() {
        let (params, obs, labels) = small_case();
        let hb = HyperBeta::new(1.0).unwrap();
        let rep = criteria(&params, &labels, &obs, Variant::ClGpn, hb).unwrap();
        let p = param_count(Variant::ClGpn, 2) as f64;
        let t = obs.len() as f64;

        // AIC - BIC = p (2 - ln T), an algebraic identity.
        assert_abs_diff_eq!(rep.aic - rep.bic, p * (2.0 - t.ln()), epsilon = 1e-10);

        // The marginalized likelihood equals a forward pass over an
        // independently assembled emission table with the posterior-mean
        // transition probabilities.
        let (pi, pi0) = hmm::posterior_mean_transition(&labels, 2, hb).unwrap();
        let table: Vec<Vec<f64>> = obs
            .iter()
            .map(|o| params.iter().map(|p| observed_log_density(o, p)).collect())
            .collect();
        let want = hmm::forward_loglik(&table, &pi, &pi0).unwrap();
        assert_abs_diff_eq!(rep.map_loglik, want, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.aic, -2.0 * want + 2.0 * p, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.bic, -2.0 * want + p * t.ln(), epsilon = 1e-10);

        // The classified likelihood sums the per-point densities at the
        // labeled regimes, and ICL assembles it with the collapsed prior.
        let classified: f64 = obs
            .iter()
            .zip(&labels[1..])
            .map(|(o, &l)| observed_log_density(o, &params[l]))
            .sum();
        assert_abs_diff_eq!(rep.classified_loglik, classified, epsilon = 1e-12);
        let prior = hmm::collapsed_log_prior(&labels, 2, hb).unwrap();
        assert_abs_diff_eq!(
            rep.icl,
            -2.0 * classified - 2.0 * prior + p * t.ln(),
            epsilon = 1e-10
        );
        for v in [rep.aic, rep.bic, rep.icl] {
            assert!(v.is_finite());
        }
    }

    #[test]
    fn criteria_are_invariant_under_regime_relabeling() {
        let (params, obs, labels) = small_case();
        let hb = HyperBeta::new(1.0).unwrap();
        let rep = criteria(&params, &labels, &obs, Variant::ClGpn, hb).unwrap();

        let swapped_params = vec![params[1].clone(), params[0].clone()];
        let swapped_labels: Vec<usize> = labels.iter().map(|&l| 1 - l).collect();
        let rep2 =
            criteria(&swapped_params, &swapped_labels, &obs, Variant::ClGpn, hb).unwrap();
        assert_abs_diff_eq!(rep.aic, rep2.aic, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.bic, rep2.bic, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.icl, rep2.icl, epsilon = 1e-9);
    }

    #[test]
    fn criteria_reject_malformed_inputs() {
        let (params, obs, labels) = small_case();
        let hb = HyperBeta::new(1.0).unwrap();
        assert!(criteria(&[], &labels, &obs, Variant::ClGpn, hb).is_err());
        assert!(criteria(&params, &labels[..3], &obs, Variant::ClGpn, hb).is_err());
        assert!(criteria(&params, &labels, &[], Variant::ClGpn, hb).is_err());
        let bad = vec![0, 0, 2, 1, 0, 0, 1];
        assert!(criteria(&params, &bad, &obs, Variant::ClGpn, hb).is_err());
    }

    #[test]
    fn mardia_correlation_is_one_for_an_exact_cosine_sine_fit() {
        // On a full-period grid the cosine and sine columns are orthogonal,
        // so a linear value built exactly from them has R-squared one.
        let data: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / 8.0;
                (x, 2.0 * x.cos() + 3.0 * x.sin() + 7.0)
            })
            .collect();
        let r2 = circular_linear_corr_sq(&data).unwrap();
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mardia_correlation_is_affine_invariant_and_bounded() {
        let data: Vec<(f64, f64)> = (0..24)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / 24.0;
                // A structured signal plus a deterministic "noise" wiggle
                // that the cosine/sine regression cannot absorb.
                (x, x.cos() + 0.5 * x.sin() + 0.3 * (5.0 * x).sin())
            })
            .collect();
        let r2 = circular_linear_corr_sq(&data).unwrap();
        assert!(r2 > 0.0 && r2 < 1.0, "r2 = {r2}");
        let shifted: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (x, 3.0 * y - 11.0)).collect();
        let r2_shifted = circular_linear_corr_sq(&shifted).unwrap();
        assert_abs_diff_eq!(r2, r2_shifted, epsilon = 1e-12);
    }

    #[test]
    fn association_statistic_matches_formula_and_reference_threshold() {
        assert_abs_diff_eq!(
            mardia_f_stat(0.05, 100),
            5.2105263157894735,
            epsilon = 1e-12
        );
        // Monotone in the correlation for fixed n.
        assert!(mardia_f_stat(0.2, 50) > mardia_f_stat(0.1, 50));
        // 95th percentile of F(2, 1497).
        let thr = f_threshold_95(1500).unwrap();
        assert_abs_diff_eq!(thr, 3.00, epsilon = 0.01);
        assert!(f_threshold_95(3).is_err());
    }

    #[test]
    fn regime_summary_reports_analytic_linear_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = RegimeParams {
            gamma: [2.5, 0.0, 0.0],
            ..regime_a()
        };
        let s = regime_summary(&p, &[], 10_000, &mut rng).unwrap();
        assert_eq!(s.lin_mean, 2.5);
        assert_eq!(s.lin_var, p.sigma_y_sq);
        assert!(s.cl_corr_sq.is_none() && s.f_stat.is_none());
        assert!(regime_summary(&p, &[], 9_999, &mut rng).is_err());
    }

    #[test]
    fn analytic_linear_moments_match_monte_carlo_within_four_standard_errors() {
        let p = regime_a();
        let (lin_mean, lin_var) = p.linear_marginal();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 20_000;
        let ys: Vec<f64> = (0..n)
            .map(|_| density::sample_clgpn(&p, &mut rng).unwrap().y)
            .collect();
        let nf = n as f64;
        let mean = ys.iter().sum::<f64>() / nf;
        let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (nf - 1.0);
        let se_mean = (lin_var / nf).sqrt();
        let se_var = lin_var * (2.0 / (nf - 1.0)).sqrt();
        assert_abs_diff_eq!(mean, lin_mean, epsilon = 4.0 * se_mean);
        assert_abs_diff_eq!(var, lin_var, epsilon = 4.0 * se_var);
    }

    #[test]
    fn concentrated_regime_has_tight_circular_summary() {
        // The latent Gaussian sits far along the positive first axis, so
        // the projected angle concentrates near zero.
        let p = RegimeParams {
            mu: [4.0, 0.0],
            sigma1_sq: 0.5,
            rho: 0.0,
            gamma: [0.0, 0.0, 0.0],
            sigma_y_sq: 1.0,
        };
        let classified: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = 0.05 * (i as f64 - 15.0) / 15.0;
                // Deterministic jitter keeps the cosine/sine fit imperfect,
                // so the correlation stays strictly inside (0, 1).
                let jitter = 0.05 * ((i * 37 % 11) as f64 - 5.0);
                (wrap(x), 1.0 + 0.4 * x.cos() + jitter)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = regime_summary(&p, &classified, 20_000, &mut rng).unwrap();
        assert!(arc_distance(s.circ_mean, 0.0) < 0.05, "mean {}", s.circ_mean);
        assert!(s.concentration > 0.9, "concentration {}", s.concentration);
        let r2 = s.cl_corr_sq.unwrap();
        assert!((0.0..=1.0).contains(&r2));
        assert_abs_diff_eq!(
            s.f_stat.unwrap(),
            mardia_f_stat(r2, classified.len()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_classified_data_reports_no_correlation() {
        assert!(circular_linear_corr_sq(&[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0)]).is_none());
        // Constant linear values.
        let const_y: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 5.0)).collect();
        assert!(circular_linear_corr_sq(&const_y).is_none());
        // Constant angle.
        let const_x: Vec<(f64, f64)> = (0..6).map(|i| (1.3, i as f64)).collect();
        assert!(circular_linear_corr_sq(&const_x).is_none());
    }
}
