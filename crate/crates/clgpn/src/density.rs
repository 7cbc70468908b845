//! Emission densities and samplers for the circular–linear projected-normal
//! family.
//!
//! Latent construction per regime: `Z ~ N₂(μ, Σ)` with `Var(Z₂) = 1`,
//! direction `X = angle(Z) ∈ [0, 2π)`, radius `R = |Z|`, and linear response
//! `Y | Z ~ N(γ₀ + γ₁Z₁ + γ₂Z₂, σ²_y)`. Writing `w = (cos x, sin x)` and
//! `c = γ₁ cos x + γ₂ sin x`, the augmented joint in `(x, y, r)` is
//!
//! ```text
//! f(x, y, r) = φ₂(r·w | μ, Σ) · r · φ₁(y | γ₀ + c·r, σ²_y),   r > 0,
//! ```
//!
//! and the radius integrates out in closed form. With
//! `1/v = c²/σ²_y + wᵀΣ⁻¹w` and `m = v·(c (y−γ₀)/σ²_y + wᵀΣ⁻¹μ)`:
//!
//! ```text
//! f(x, y) = φ₁(y | γ₀, σ²_y) · φ₂(μ | 0, Σ)
//!           · [ v·φ₁(m | 0, v) + m·Φ(m/√v) ] / φ₁(m | 0, v).
//! ```
//!
//! Note the factor `v` on the `φ₁(m|0,v)` term in the bracket — equivalently
//! the bracket is `√v·φ(m/√v) + m·Φ(m/√v)`, the partial first moment
//! `∫₀^∞ r φ₁(r|m,v) dr`. The same kernel with the `y` terms removed gives
//! the circular marginal (the projected-normal density). Everything is
//! evaluated in log space; the far left tail of the partial moment uses an
//! asymptotic expansion so the density stays finite deep in the tails.

use crate::angle::atan2_wrapped;
use crate::error::Result;
use crate::params::{Cov2, RegimeParams};
use crate::LN_2PI;
use rand::Rng;
use rand_distr::StandardNormal;

/// Standard normal density.
#[inline]
pub(crate) fn std_normal_pdf(a: f64) -> f64 {
    (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF. Built on `libm::erfc` (few-ulp accuracy) rather than
/// a rational approximation: the partial moment below amplifies CDF error by
/// `a²`, so tail accuracy here is load-bearing.
#[inline]
pub(crate) fn std_normal_cdf(a: f64) -> f64 {
    0.5 * libm::erfc(-a / std::f64::consts::SQRT_2)
}

/// Switch point between the direct evaluation of the partial moment and the
/// continued-fraction tail. Below it, `a·Φ(a) + φ(a)` cancels to `φ(a)/a²`
/// scale and the direct form loses about `2·log₁₀|a|` digits on top of the
/// CDF's own tail inaccuracy; above it, the continued fraction converges
/// more slowly. At −5 both sides are accurate to ~1e-13 or better.
const PARTIAL_MOMENT_TAIL_SWITCH: f64 = -5.0;

/// Log of `g(a) = a·Φ(a) + φ(a) = E[max(a + N(0,1), 0)]`, the partial first
/// moment of a unit-variance normal. Positive for all `a`; `≈ a` for large
/// `a` and `≈ φ(a)/a²` deep in the left tail, where the direct expression
/// cancels catastrophically and a continued fraction is used instead.
pub(crate) fn log_partial_moment(a: f64) -> f64 {
    if a >= PARTIAL_MOMENT_TAIL_SWITCH {
        (a * std_normal_cdf(a) + std_normal_pdf(a)).ln()
    } else {
        let b = -a;
        let s = mills_tail_cf(b);
        -0.5 * b * b - 0.5 * LN_2PI + (s / (b + s)).ln()
    }
}

/// Tail `S` of the Laplace continued fraction for the Gaussian Mills ratio,
/// `Φ(-b)/φ(b) = 1/(b + S)` with `S = 1/(b + 2/(b + 3/(b + ...)))`, for
/// `b > 0`. Substituting it into the partial moment gives
/// `g(-b) = φ(b)·(1 - b·Φ(-b)/φ(b)) = φ(b)·S/(b + S)` with no subtraction,
/// so the tail branch keeps full relative accuracy however deep `b` goes.
fn mills_tail_cf(b: f64) -> f64 {
    // Modified Lentz evaluation of S = a₁/(b + a₂/(b + ...)), aₙ = n.
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..400u32 {
        let num = n as f64; // numerators 1, 2, 3, ...
        d = b + num * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + num / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Conditional location/scale of the latent radius.
///
/// The augmented joint at fixed `(x, y)` is proportional in `r` to
/// `r · φ₁(r | m, v)`; `c = γ₁ cos x + γ₂ sin x` is the linear slope along
/// the direction `w`. When `y` is `None` the linear factor drops and the
/// terms describe the circular marginal instead.
#[derive(Clone, Copy, Debug)]
pub struct RadiusTerms {
    pub m: f64,
    pub v: f64,
    pub c: f64,
}

pub fn radius_terms(x: f64, y: Option<f64>, p: &RegimeParams) -> RadiusTerms {
    let cov = p.cov();
    radius_terms_general(x, y, &p.mu, &cov, &p.gamma, p.sigma_y_sq)
}

/// As [`radius_terms`] for an arbitrary latent covariance.
pub fn radius_terms_general(
    x: f64,
    y: Option<f64>,
    mu: &[f64; 2],
    cov: &Cov2,
    gamma: &[f64; 3],
    sigma_y_sq: f64,
) -> RadiusTerms {
    let w = [x.cos(), x.sin()];
    let c = gamma[1] * w[0] + gamma[2] * w[1];
    let mut prec = cov.inv_quad(&w);
    let mut lin = cov.inv_bilinear(&w, mu);
    if let Some(y) = y {
        prec += c * c / sigma_y_sq;
        lin += c * (y - gamma[0]) / sigma_y_sq;
    }
    let v = 1.0 / prec;
    RadiusTerms { m: v * lin, v, c }
}

/// `log [ √(2πv) · e^{m²/(2v)} · ∫₀^∞ r φ₁(r|m,v) dr ]` — the factor the
/// radius integration contributes to both marginal densities. In the far
/// left tail the exponential blow-up and the partial moment's decay cancel
/// analytically, which this evaluation exploits.
pub(crate) fn log_radial_kernel(m: f64, v: f64) -> f64 {
    let a = m / v.sqrt();
    if a >= PARTIAL_MOMENT_TAIL_SWITCH {
        0.5 * (LN_2PI + v.ln()) + 0.5 * a * a + 0.5 * v.ln() + log_partial_moment(a)
    } else {
        // The m²/(2v) growth cancels the partial moment's -b²/2 exactly,
        // leaving ln[v·S/(b + S)].
        let b = -a;
        let s = mills_tail_cf(b);
        v.ln() + (s / (b + s)).ln()
    }
}

/// Log density of the direction alone under an arbitrary latent Gaussian
/// (radius integrated out). The regime-level wrapper applies the
/// `Var(Z₂) = 1` identifiability constraint; this general form exists
/// because the projection is scale invariant (`(μ, Σ) ↦ (cμ, c²Σ)` leaves
/// it unchanged), which the tests exercise directly.
pub fn pn_log_density_general(x: f64, mu: &[f64; 2], cov: &Cov2) -> f64 {
    let rt = radius_terms_general(x, None, mu, cov, &[0.0; 3], 1.0);
    cov.log_normal2(mu, &[0.0, 0.0]) + log_radial_kernel(rt.m, rt.v)
}

/// Log density of the circular coordinate under a regime.
pub fn pn_log_density(x: f64, p: &RegimeParams) -> f64 {
    pn_log_density_general(x, &p.mu, &p.cov())
}

/// Log joint density of one cylindrical observation `(x, y)` under a regime,
/// latent radius integrated out.
pub fn clgpn_log_density(x: f64, y: f64, p: &RegimeParams) -> f64 {
    let rt = radius_terms(x, Some(y), p);
    let cov = p.cov();
    log_normal1(y, p.gamma[0], p.sigma_y_sq)
        + cov.log_normal2(&p.mu, &[0.0, 0.0])
        + log_radial_kernel(rt.m, rt.v)
}

/// Log density of the radius-augmented triple `(x, y, r)` under a regime.
/// Zero density (`-inf`) for `r ≤ 0`.
pub fn joint_xyr_log_density(x: f64, y: f64, r: f64, p: &RegimeParams) -> f64 {
    if !(r > 0.0) {
        return f64::NEG_INFINITY;
    }
    let cov = p.cov();
    let w = [x.cos(), x.sin()];
    let z = [r * w[0], r * w[1]];
    let c = p.gamma[1] * w[0] + p.gamma[2] * w[1];
    cov.log_normal2(&z, &p.mu) + r.ln() + log_normal1(y, p.gamma[0] + c * r, p.sigma_y_sq)
}

/// Univariate normal log density.
#[inline]
pub(crate) fn log_normal1(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + var.ln()) - 0.5 * d * d / var
}

/// One simulated observation with its latent radius.
#[derive(Clone, Copy, Debug)]
pub struct CylindricalDraw {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

/// Draw the latent bivariate normal vector of a regime.
pub fn sample_latent<R: Rng + ?Sized>(p: &RegimeParams, rng: &mut R) -> [f64; 2] {
    let l = p.cov().chol();
    let e1: f64 = rng.sample(StandardNormal);
    let e2: f64 = rng.sample(StandardNormal);
    [
        p.mu[0] + l[0][0] * e1,
        p.mu[1] + l[1][0] * e1 + l[1][1] * e2,
    ]
}

/// Draw one cylindrical observation `(x, y, r)` from a regime.
pub fn sample_clgpn<R: Rng + ?Sized>(p: &RegimeParams, rng: &mut R) -> Result<CylindricalDraw> {
    let mut z = sample_latent(p, rng);
    while z[0] == 0.0 && z[1] == 0.0 {
        z = sample_latent(p, rng); // measure-zero corner: redraw
    }
    let x = atan2_wrapped(z[0], z[1])?;
    let r = z[0].hypot(z[1]);
    let eps: f64 = rng.sample(StandardNormal);
    let y = p.gamma[0] + p.gamma[1] * z[0] + p.gamma[2] * z[1] + p.sigma_y_sq.sqrt() * eps;
    Ok(CylindricalDraw { x, y, r })
}
