//! Regime-level parameters, model variants, and the constrained latent
//! covariance.

use crate::error::{Error, Result};
use crate::LN_2PI;
use std::fmt;

/// Emission family fitted to each regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Full circular–linear general projected normal: free `sigma1_sq`, `rho`.
    ClGpn,
    /// Decoupled circular part: latent covariance pinned at the identity
    /// (`sigma1_sq = 1`, `rho = 0`).
    ClDpn,
    /// Independent circular and linear components: `gamma1 = gamma2 = 0`.
    IndClGpn,
}

impl Variant {
    /// Parse the command-line spelling of a variant.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "clgpn" => Ok(Variant::ClGpn),
            "cldpn" => Ok(Variant::ClDpn),
            "ind" => Ok(Variant::IndClGpn),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?}; expected one of clgpn, cldpn, ind"
            ))),
        }
    }

    /// Number of free emission parameters per regime.
    pub fn free_params_per_regime(self) -> usize {
        match self {
            Variant::ClGpn => 8,
            // ClDpn drops (sigma1_sq, rho); IndClGpn drops (gamma1, gamma2).
            Variant::ClDpn | Variant::IndClGpn => 6,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::ClGpn => "clgpn",
            Variant::ClDpn => "cldpn",
            Variant::IndClGpn => "ind",
        };
        f.write_str(s)
    }
}

/// Symmetric positive-definite 2x2 covariance with cached inverse and
/// log-determinant. Used both for the constrained latent covariance (second
/// variance = 1) and for general covariances in conditional calculations.
#[derive(Clone, Copy, Debug)]
pub struct Cov2 {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
    inv11: f64,
    inv12: f64,
    inv22: f64,
    log_det: f64,
}

impl Cov2 {
    pub fn new(s11: f64, s12: f64, s22: f64) -> Result<Self> {
        let det = s11 * s22 - s12 * s12;
        if !(s11 > 0.0 && s22 > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(Error::invalid(format!(
                "covariance [[{s11}, {s12}], [{s12}, {s22}]] is not positive definite"
            )));
        }
        Ok(Cov2 {
            s11,
            s12,
            s22,
            inv11: s22 / det,
            inv12: -s12 / det,
            inv22: s11 / det,
            log_det: det.ln(),
        })
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `aᵀ Σ⁻¹ b`.
    pub fn inv_bilinear(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        a[0] * (self.inv11 * b[0] + self.inv12 * b[1])
            + a[1] * (self.inv12 * b[0] + self.inv22 * b[1])
    }

    /// `aᵀ Σ⁻¹ a`.
    pub fn inv_quad(&self, a: &[f64; 2]) -> f64 {
        self.inv_bilinear(a, a)
    }

    /// `Σ a` (matrix-vector product with the covariance itself).
    pub fn mul(&self, a: &[f64; 2]) -> [f64; 2] {
        [
            self.s11 * a[0] + self.s12 * a[1],
            self.s12 * a[0] + self.s22 * a[1],
        ]
    }

    /// Log density of `z` under `N₂(mean, Σ)`.
    pub fn log_normal2(&self, z: &[f64; 2], mean: &[f64; 2]) -> f64 {
        let d = [z[0] - mean[0], z[1] - mean[1]];
        -LN_2PI - 0.5 * self.log_det - 0.5 * self.inv_quad(&d)
    }

    /// Lower Cholesky factor.
    pub fn chol(&self) -> [[f64; 2]; 2] {
        let l11 = self.s11.sqrt();
        let l21 = self.s12 / l11;
        let l22 = (self.s22 - l21 * l21).sqrt();
        [[l11, 0.0], [l21, l22]]
    }
}

/// Parameters of one regime's circular–linear emission distribution.
///
/// Latent construction: `Z ~ N₂(mu, Σ)` with
/// `Σ = [[sigma1_sq, sqrt(sigma1_sq) rho], [sqrt(sigma1_sq) rho, 1]]`;
/// the direction is `X = angle(Z)`, the radius `R = |Z|`, and the linear
/// response is `Y | Z ~ N(gamma[0] + gamma[1] Z₁ + gamma[2] Z₂, sigma_y_sq)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeParams {
    pub mu: [f64; 2],
    pub sigma1_sq: f64,
    pub rho: f64,
    pub gamma: [f64; 3],
    pub sigma_y_sq: f64,
}

impl RegimeParams {
    /// Check finiteness, positivity, `|rho| < 1`, and the variant's equality
    /// constraints.
    pub fn validate(&self, variant: Variant) -> Result<()> {
        let finite = self.mu.iter().chain(self.gamma.iter()).all(|v| v.is_finite())
            && self.sigma1_sq.is_finite()
            && self.rho.is_finite()
            && self.sigma_y_sq.is_finite();
        if !finite {
            return Err(Error::invalid("regime parameters must be finite"));
        }
        if !(self.sigma1_sq > 0.0) {
            return Err(Error::invalid(format!(
                "sigma1_sq must be positive, got {}",
                self.sigma1_sq
            )));
        }
        if !(self.sigma_y_sq > 0.0) {
            return Err(Error::invalid(format!(
                "sigma_y_sq must be positive, got {}",
                self.sigma_y_sq
            )));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::invalid(format!(
                "rho must lie strictly inside (-1, 1), got {}",
                self.rho
            )));
        }
        match variant {
            Variant::ClGpn => {}
            Variant::ClDpn => {
                if self.sigma1_sq != 1.0 || self.rho != 0.0 {
                    return Err(Error::invalid(
                        "cldpn requires sigma1_sq = 1 and rho = 0",
                    ));
                }
            }
            Variant::IndClGpn => {
                if self.gamma[1] != 0.0 || self.gamma[2] != 0.0 {
                    return Err(Error::invalid("ind requires gamma1 = gamma2 = 0"));
                }
            }
        }
        Ok(())
    }

    /// The constrained latent covariance (second variance pinned at 1).
    pub fn cov(&self) -> Cov2 {
        let s1 = self.sigma1_sq.sqrt();
        // Guaranteed positive definite when sigma1_sq > 0 and |rho| < 1.
        Cov2::new(self.sigma1_sq, s1 * self.rho, 1.0)
            .expect("constrained covariance is positive definite")
    }

    /// Flat parameter vector used for relabeling distances and CSV output,
    /// ordered (mu1, mu2, sigma1_sq, rho, gamma0, gamma1, gamma2, sigma_y_sq).
    pub fn as_vector(&self) -> [f64; 8] {
        [
            self.mu[0],
            self.mu[1],
            self.sigma1_sq,
            self.rho,
            self.gamma[0],
            self.gamma[1],
            self.gamma[2],
            self.sigma_y_sq,
        ]
    }

    /// Column names matching [`RegimeParams::as_vector`].
    pub const VECTOR_NAMES: [&'static str; 8] = [
        "mu1",
        "mu2",
        "sigma1_sq",
        "rho",
        "gamma0",
        "gamma1",
        "gamma2",
        "sigma_y_sq",
    ];

    /// Mean and variance of the marginal linear response under this regime:
    /// `Y = gamma0 + gammaᵀZ + ε` with `Z ~ N₂(mu, Σ)` gives
    /// `E[Y] = gamma0 + gammaᵀ mu` and `Var[Y] = gammaᵀ Σ gamma + sigma_y_sq`.
    pub fn linear_marginal(&self) -> (f64, f64) {
        let cov = self.cov();
        let g = [self.gamma[1], self.gamma[2]];
        let mean = self.gamma[0] + g[0] * self.mu[0] + g[1] * self.mu[1];
        let sg = cov.mul(&g);
        let var = g[0] * sg[0] + g[1] * sg[1] + self.sigma_y_sq;
        (mean, var)
    }
}
