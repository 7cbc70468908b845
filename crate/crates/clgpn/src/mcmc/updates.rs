//! Building blocks of the parameter and latent-variable updates: conjugate
//! posterior computations, prior samplers, the radius conditional, and the
//! latent-vector imputation conditional. Everything here is a pure function
//! of explicit inputs so the algebra can be tested against independent
//! oracles (normal-equation identities, quadrature, and density
//! proportionality).

use crate::error::{Error, Result};
use crate::linalg::{cholesky, chol_solve, mvn_from_std};
use crate::mcmc::Priors;
use crate::params::{Cov2, RegimeParams, Variant};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, InverseGamma, Normal};

/// Posterior mean and covariance of a bivariate normal mean `μ` under
/// likelihood `z_i ~ N₂(μ, Σ)` and prior `μ_j ~ N(m₀, v₀)` iid:
/// precision `Λ = nΣ⁻¹ + I/v₀`, mean `Λ⁻¹(Σ⁻¹ Σᵢzᵢ + m₀/v₀ · 1)`.
pub fn mu_posterior(
    zs: &[[f64; 2]],
    cov: &Cov2,
    prior_mean: f64,
    prior_var: f64,
) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let n = zs.len() as f64;
    let e0 = [1.0, 0.0];
    let e1 = [0.0, 1.0];
    let p00 = cov.inv_quad(&e0);
    let p01 = cov.inv_bilinear(&e0, &e1);
    let p11 = cov.inv_quad(&e1);
    let prec = [
        [n * p00 + 1.0 / prior_var, n * p01],
        [n * p01, n * p11 + 1.0 / prior_var],
    ];
    let zsum = zs.iter().fold([0.0f64; 2], |a, z| [a[0] + z[0], a[1] + z[1]]);
    let rhs = [
        p00 * zsum[0] + p01 * zsum[1] + prior_mean / prior_var,
        p01 * zsum[0] + p11 * zsum[1] + prior_mean / prior_var,
    ];
    solve_gaussian_system(&prec, &rhs)
}

/// Posterior mean and covariance of regression coefficients `γ` under
/// `y_i ~ N(γ₀ + γ₁z_{i1} + γ₂z_{i2}, σ²_y)` with iid `N(m₀, v₀)` priors.
/// `rows` holds `(z_i, y_i)` pairs.
pub fn gamma_posterior(
    rows: &[([f64; 2], f64)],
    sigma_y_sq: f64,
    prior_mean: f64,
    prior_var: f64,
) -> Result<([f64; 3], [[f64; 3]; 3])> {
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for (z, y) in rows {
        let u = [1.0, z[0], z[1]];
        for a in 0..3 {
            xty[a] += u[a] * y;
            for b in 0..3 {
                xtx[a][b] += u[a] * u[b];
            }
        }
    }
    let mut prec = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for a in 0..3 {
        rhs[a] = xty[a] / sigma_y_sq + prior_mean / prior_var;
        for b in 0..3 {
            prec[a][b] = xtx[a][b] / sigma_y_sq;
        }
        prec[a][a] += 1.0 / prior_var;
    }
    solve_gaussian_system(&prec, &rhs)
}

/// Posterior `(mean, variance)` of a scalar normal mean with known
/// observation variance: `y_i ~ N(θ, σ²)`, `θ ~ N(m₀, v₀)`.
pub fn scalar_normal_posterior(
    sum_y: f64,
    n: usize,
    obs_var: f64,
    prior_mean: f64,
    prior_var: f64,
) -> (f64, f64) {
    let prec = n as f64 / obs_var + 1.0 / prior_var;
    let mean = (sum_y / obs_var + prior_mean / prior_var) / prec;
    (mean, 1.0 / prec)
}

/// Posterior `(shape, rate)` of a normal variance under an
/// inverse-gamma prior: `IG(shape₀ + n/2, rate₀ + rss/2)`.
pub fn ig_posterior(shape0: f64, rate0: f64, n: usize, rss: f64) -> (f64, f64) {
    (shape0 + n as f64 / 2.0, rate0 + rss / 2.0)
}

/// Turn a precision matrix and right-hand side into posterior mean and
/// covariance: `mean = Λ⁻¹ rhs`, `cov = Λ⁻¹`.
fn solve_gaussian_system<const N: usize>(
    prec: &[[f64; N]; N],
    rhs: &[f64; N],
) -> Result<([f64; N], [[f64; N]; N])> {
    let l = cholesky(prec)?;
    let mean = chol_solve(&l, rhs);
    let mut cov = [[0.0; N]; N];
    for j in 0..N {
        let mut e = [0.0; N];
        e[j] = 1.0;
        let col = chol_solve(&l, &e);
        for i in 0..N {
            cov[i][j] = col[i];
        }
    }
    // Symmetrise against round-off so the Cholesky of the covariance is
    // well posed downstream.
    for i in 0..N {
        for j in 0..i {
            let s = 0.5 * (cov[i][j] + cov[j][i]);
            cov[i][j] = s;
            cov[j][i] = s;
        }
    }
    Ok((mean, cov))
}

/// Draw from `N(mean, cov)`.
pub fn sample_mvn<const N: usize, R: Rng + ?Sized>(
    mean: &[f64; N],
    cov: &[[f64; N]; N],
    rng: &mut R,
) -> Result<[f64; N]> {
    let l = cholesky(cov)?;
    let mut eps = [0.0f64; N];
    for e in eps.iter_mut() {
        *e = rng.sample(StandardNormal);
    }
    Ok(mvn_from_std(mean, &l, &eps))
}

/// Draw from the inverse gamma with the given shape and rate (density
/// `∝ x^{-shape-1} e^{-rate/x}`), via the reciprocal of a gamma draw.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::invalid(format!(
            "inverse gamma needs positive shape and rate, got ({shape}, {rate})"
        )));
    }
    let g = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::invalid(format!("gamma sampler rejected parameters: {e}")))?;
    for _ in 0..64 {
        let draw = g.sample(rng);
        if draw > 0.0 && draw.is_finite() {
            return Ok(1.0 / draw);
        }
    }
    Err(Error::numerical(format!(
        "gamma sampler kept returning degenerate draws for shape {shape}, rate {rate}"
    )))
}

fn std_normal_dist() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal is a valid distribution")
}

/// Inverse-CDF draw from `N(mean, var)` truncated to the open interval
/// `(lo, hi)`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    mean: f64,
    var: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64> {
    let u: f64 = rng.random();
    truncated_normal_quantile(u, mean, var, lo, hi)
}

/// Quantile function of `N(mean, var)` truncated to `(lo, hi)`. The result
/// is nudged strictly inside the interval so boundary values can never leak
/// out of floating-point rounding.
pub fn truncated_normal_quantile(p: f64, mean: f64, var: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(var > 0.0 && lo < hi) {
        return Err(Error::invalid(
            "truncated normal needs positive variance and an ordered interval",
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile level {p} outside [0, 1]")));
    }
    let sd = var.sqrt();
    let n = std_normal_dist();
    let pa = n.cdf((lo - mean) / sd);
    let pb = n.cdf((hi - mean) / sd);
    if !(pb > pa) {
        return Err(Error::numerical(format!(
            "truncation interval ({lo}, {hi}) carries no mass under N({mean}, {var})"
        )));
    }
    let q = (pa + p * (pb - pa)).clamp(pa, pb);
    let x = mean + sd * n.inverse_cdf(q);
    let width = hi - lo;
    Ok(x.clamp(lo + 1e-14 * width, hi - 1e-14 * width))
}

/// Log density of `N(mean, var)` truncated to `(lo, hi)`, normaliser
/// included; `-inf` outside the interval.
pub fn log_truncated_normal(x: f64, mean: f64, var: f64, lo: f64, hi: f64) -> f64 {
    if !(x > lo && x < hi) {
        return f64::NEG_INFINITY;
    }
    let sd = var.sqrt();
    let n = std_normal_dist();
    let z = n.cdf((hi - mean) / sd) - n.cdf((lo - mean) / sd);
    crate::density::log_normal1(x, mean, var) - z.ln()
}

/// Log density of the inverse gamma with the given shape and rate.
pub fn log_inverse_gamma(x: f64, shape: f64, rate: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    InverseGamma::new(shape, rate)
        .map(|d| d.ln_pdf(x))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Log full-conditional density of the log radius `λ = ln r` given
/// location/scale `(m, v)` of the radius conditional: the `r φ₁(r | m, v)`
/// kernel plus the log-scale Jacobian, up to a constant.
pub fn radius_log_target(lambda: f64, m: f64, v: f64) -> f64 {
    let r = lambda.exp();
    let d = r - m;
    2.0 * lambda - d * d / (2.0 * v)
}

/// Normalised CDF of the radius conditional `p(r) ∝ r φ₁(r | m, v)` on
/// `(0, ∞)`.
///
/// Written in the survival form `m[Φ(a) - Φ(-z_r)] + s[φ(a) - φ(z_r)]`
/// over `m Φ(a) + s φ(a)` (with `a = m/√v`, `z_r = (r-m)/√v`) so that for
/// `m < 0` every normal CDF argument is negative: the naive
/// `Φ(z_r) - Φ(-a)` form subtracts numbers within an ulp of 1 and
/// collapses to rounding noise once `a ≲ -8`. The remaining benign
/// cancellation amplifies relative error by about `a²`, so with a few-ulp
/// CDF the result holds to ~14 digits even at `a = -30`, where the exact
/// sampler switches to rejection anyway.
pub fn radius_cdf(r: f64, m: f64, v: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let s = v.sqrt();
    let a = m / s;
    let zr = (r - m) / s;
    let cdf = crate::density::std_normal_cdf;
    let pdf = crate::density::std_normal_pdf;
    let num = m * (cdf(a) - cdf(-zr)) + s * (pdf(a) - pdf(zr));
    let den = m * cdf(a) + s * pdf(a);
    (num / den).clamp(0.0, 1.0)
}

/// How far into the left tail `m/√v` may go before the closed-form CDF
/// risks underflow (`φ(m/√v)` nears the smallest normal double around
/// `m/√v ≈ -37`) and the exact draw switches to rejection sampling.
const RADIUS_TAIL_SWITCH: f64 = -30.0;

/// Exact draw from the radius conditional `p(r) ∝ r φ₁(r | m, v)` by CDF
/// inversion, with a gamma-envelope rejection sampler in the far left tail
/// where the CDF ratio degenerates.
pub fn sample_radius_exact<R: Rng + ?Sized>(m: f64, v: f64, rng: &mut R) -> Result<f64> {
    if !(v > 0.0 && v.is_finite() && m.is_finite()) {
        return Err(Error::invalid(format!(
            "radius conditional needs finite m and positive v, got ({m}, {v})"
        )));
    }
    let s = v.sqrt();
    if m / s < RADIUS_TAIL_SWITCH {
        // p(r) ∝ r e^{-|m|r/v} · e^{-r²/(2v)}: the first factor is a
        // Gamma(2, |m|/v) kernel dominating the target, the second the
        // acceptance probability (≤ 1, and ≈ 1 where the mass sits).
        let g = Gamma::new(2.0, v / m.abs())
            .map_err(|e| Error::invalid(format!("gamma envelope rejected: {e}")))?;
        for _ in 0..10_000 {
            let r = g.sample(rng);
            if r > 0.0 && rng.random::<f64>() < (-r * r / (2.0 * v)).exp() {
                return Ok(r);
            }
        }
        return Err(Error::numerical(format!(
            "radius rejection sampler failed to accept for (m, v) = ({m}, {v})"
        )));
    }
    let u: f64 = rng.random::<f64>().max(1e-300);
    // Bracket the quantile, then bisect. The CDF is smooth and strictly
    // increasing, so plain bisection to relative machine width is robust.
    let mut lo = 0.0f64;
    let mut hi = m.max(0.0) + s;
    let mut guard = 0;
    while radius_cdf(hi, m, v) < u {
        hi = hi * 2.0 + s;
        guard += 1;
        if guard > 200 {
            return Err(Error::numerical(format!(
                "radius quantile bracket failed for (m, v) = ({m}, {v}), u = {u}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if radius_cdf(mid, m, v) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).max(1e-300))
}

/// Mean and covariance of the latent vector given the linear response:
/// under `Z ~ N₂(μ, Σ)`, `Y | Z ~ N(γ₀ + γ_zᵀZ, σ²_y)` the conditional is
/// `Z | y ~ N₂(μ + Σγ_z (y - γ₀ - γ_zᵀμ)/v_y, Σ - Σγ_z γ_zᵀΣ / v_y)` with
/// `v_y = γ_zᵀΣγ_z + σ²_y`.
pub fn conditional_z_given_y(p: &RegimeParams, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let cov = p.cov();
    let gz = [p.gamma[1], p.gamma[2]];
    let sg = cov.mul(&gz);
    let vy = gz[0] * sg[0] + gz[1] * sg[1] + p.sigma_y_sq;
    let resid = y - p.gamma[0] - gz[0] * p.mu[0] - gz[1] * p.mu[1];
    let mean = [p.mu[0] + sg[0] * resid / vy, p.mu[1] + sg[1] * resid / vy];
    let cmat = [
        [cov.s11 - sg[0] * sg[0] / vy, cov.s12 - sg[0] * sg[1] / vy],
        [cov.s12 - sg[0] * sg[1] / vy, cov.s22 - sg[1] * sg[1] / vy],
    ];
    (mean, cmat)
}

/// Log target of the latent covariance pair at `(σ₁², ρ)` given the
/// regime's latent vectors: Gaussian log likelihood of the `z`s plus the
/// two untransformed priors (correlation truncation constant omitted — it
/// cancels in Metropolis ratios). The caller adds the change-of-variable
/// terms for the `(ln σ₁², atanh ρ)` parameterisation.
pub fn sigma_rho_log_target(
    zs: &[[f64; 2]],
    mu: &[f64; 2],
    sigma1_sq: f64,
    rho: f64,
    priors: &Priors,
) -> Result<f64> {
    let cov = Cov2::new(sigma1_sq, sigma1_sq.sqrt() * rho, 1.0)?;
    let mut lp = zs.iter().map(|z| cov.log_normal2(z, mu)).sum::<f64>();
    lp += log_inverse_gamma(sigma1_sq, priors.ig_shape, priors.ig_rate);
    let d = rho - priors.rho_mean;
    lp -= 0.5 * d * d / priors.rho_var;
    Ok(lp)
}

/// Draw one regime's parameters from the priors, honouring the variant's
/// equality constraints.
pub fn sample_regime_from_priors<R: Rng + ?Sized>(
    priors: &Priors,
    variant: Variant,
    rng: &mut R,
) -> Result<RegimeParams> {
    let mut normal = |mean: f64, var: f64| -> f64 {
        let e: f64 = rng.sample(StandardNormal);
        mean + var.sqrt() * e
    };
    let mu = [
        normal(priors.mu_mean, priors.mu_var),
        normal(priors.mu_mean, priors.mu_var),
    ];
    let gamma = match variant {
        Variant::IndClGpn => [normal(priors.gamma_mean, priors.gamma_var), 0.0, 0.0],
        _ => [
            normal(priors.gamma_mean, priors.gamma_var),
            normal(priors.gamma_mean, priors.gamma_var),
            normal(priors.gamma_mean, priors.gamma_var),
        ],
    };
    let sigma_y_sq = sample_inverse_gamma(priors.ig_shape, priors.ig_rate, rng)?;
    let (sigma1_sq, rho) = match variant {
        Variant::ClDpn => (1.0, 0.0),
        _ => (
            sample_inverse_gamma(priors.ig_shape, priors.ig_rate, rng)?,
            sample_truncated_normal(priors.rho_mean, priors.rho_var, -1.0, 1.0, rng)?,
        ),
    };
    let p = RegimeParams {
        mu,
        sigma1_sq,
        rho,
        gamma,
        sigma_y_sq,
    };
    p.validate(variant)?;
    Ok(p)
}
