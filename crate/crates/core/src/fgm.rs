//! Morgenstern (FGM) copula with gamma margins, and the EBB samplers built on it.
//!
//! Draws follow the conditional-inverse construction: `U₂` and `V` are iid
//! uniform, `U₁` solves `C(u₁ | u₂) = V`, and the margins are obtained by
//! gamma quantile inversion. `Z = X / (X + Y)` is then an EBB draw.
//!
//! All randomness comes from ChaCha20 keyed by [`RngSeed`]: the 64-bit seed
//! expands to the key and `stream_id` selects an independent stream, so
//! replicate `j` of a study always sees the same numbers.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dist::EbbParams;
use crate::error::{domain, finite, invalid, Result};
use crate::specfun::{inv_reg_lower_inc_gamma, lgamma, reg_lower_inc_gamma};

// below this |c| the conditional copula CDF is the identity to double precision
const LINEAR_LIMIT: f64 = 1e-8;

/// Seed and stream selector for the ChaCha20 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Same seed, different stream.
    pub fn stream(&self, stream_id: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// A uniform draw on the open interval (0, 1).
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn check_unit(name: &str, v: f64, closed: bool) -> Result<()> {
    finite(name, v)?;
    let ok = if closed {
        (0.0..=1.0).contains(&v)
    } else {
        v > 0.0 && v < 1.0
    };
    if !ok {
        let range = if closed { "[0, 1]" } else { "(0, 1)" };
        return Err(domain(format!("{name} must lie in {range}, got {v}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    finite("rho", rho)?;
    if !(-1.0..=1.0).contains(&rho) {
        return Err(domain(format!("rho must lie in [-1, 1], got {rho}")));
    }
    Ok(())
}

/// FGM copula `C(u₁, u₂) = u₁u₂[1 + ρ(1−u₁)(1−u₂)]`.
pub fn copula_cdf(rho: f64, u1: f64, u2: f64) -> Result<f64> {
    check_rho(rho)?;
    check_unit("u1", u1, true)?;
    check_unit("u2", u2, true)?;
    Ok(u1 * u2 * (1.0 + rho * (1.0 - u1) * (1.0 - u2)))
}

/// Solves `u₁[1 + c(1 − u₁)] = v` for `u₁ ∈ (0, 1)`, `c = ρ(1 − 2u₂)`.
///
/// The left side is `∂C/∂u₂`, the conditional CDF of `U₁` given `U₂ = u₂`.
/// The admissible root is the smaller one; it is computed in the
/// rationalized form `2v / [(1+c) + √((1+c)² − 4cv)]`, which equals
/// `[(1+c) − √(…)] / (2c)` without the cancellation.
pub fn conditional_inverse(rho: f64, u2: f64, v: f64) -> Result<f64> {
    check_rho(rho)?;
    check_unit("u2", u2, false)?;
    check_unit("v", v, false)?;
    let c = rho * (1.0 - 2.0 * u2);
    if c.abs() <= LINEAR_LIMIT {
        return Ok(v);
    }
    let b = 1.0 + c;
    let disc = (b * b - 4.0 * c * v).max(0.0);
    Ok(2.0 * v / (b + disc.sqrt()))
}

/// Bivariate gamma law with common rate `theta` and FGM dependence `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivGammaFgm {
    alpha: f64,
    beta: f64,
    theta: f64,
    rho: f64,
    ln_gamma_alpha: f64,
    ln_gamma_beta: f64,
}

impl BivGammaFgm {
    pub fn new(alpha: f64, beta: f64, theta: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("theta", theta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be a positive finite number, got {v}")));
            }
        }
        if !(rho.is_finite() && (-1.0..=1.0).contains(&rho)) {
            return Err(invalid(format!("rho must lie in [-1, 1], got {rho}")));
        }
        Ok(Self {
            alpha,
            beta,
            theta,
            rho,
            ln_gamma_alpha: lgamma(alpha),
            ln_gamma_beta: lgamma(beta),
        })
    }

    /// The pair behind `EbbParams` at rate `theta`.
    pub fn from_params(p: &EbbParams, theta: f64) -> Result<Self> {
        Self::new(p.alpha(), p.beta(), theta, p.rho())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn gamma_pdf(&self, shape: f64, ln_g: f64, x: f64) -> f64 {
        let t = self.theta;
        ((shape - 1.0) * (t * x).ln() - t * x - ln_g).exp() * t
    }

    pub fn marginal_pdf_x(&self, x: f64) -> Result<f64> {
        positive_point("x", x)?;
        Ok(self.gamma_pdf(self.alpha, self.ln_gamma_alpha, x))
    }

    pub fn marginal_pdf_y(&self, y: f64) -> Result<f64> {
        positive_point("y", y)?;
        Ok(self.gamma_pdf(self.beta, self.ln_gamma_beta, y))
    }

    pub fn marginal_cdf_x(&self, x: f64) -> Result<f64> {
        positive_point("x", x)?;
        reg_lower_inc_gamma(self.alpha, self.theta * x)
    }

    pub fn marginal_cdf_y(&self, y: f64) -> Result<f64> {
        positive_point("y", y)?;
        reg_lower_inc_gamma(self.beta, self.theta * y)
    }

    /// `f_X(x) f_Y(y) [1 + ρ(2F_X(x) − 1)(2F_Y(y) − 1)]`.
    pub fn joint_pdf(&self, x: f64, y: f64) -> Result<f64> {
        let fx = self.marginal_pdf_x(x)?;
        let fy = self.marginal_pdf_y(y)?;
        let gx = 2.0 * self.marginal_cdf_x(x)? - 1.0;
        let gy = 2.0 * self.marginal_cdf_y(y)? - 1.0;
        Ok(fx * fy * (1.0 + self.rho * gx * gy))
    }

    /// `C(F_X(x), F_Y(y))`.
    pub fn joint_cdf(&self, x: f64, y: f64) -> Result<f64> {
        copula_cdf(self.rho, self.marginal_cdf_x(x)?, self.marginal_cdf_y(y)?)
    }

    /// Copula layer: `(U₁, U₂)` with joint CDF `C`.
    pub fn sample_uniforms<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        let u2 = open_uniform(rng);
        let v = open_uniform(rng);
        Ok((conditional_inverse(self.rho, u2, v)?, u2))
    }

    /// `(X, Y) = (F_X⁻¹(U₁), F_Y⁻¹(U₂))`.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        let (u1, u2) = self.sample_uniforms(rng)?;
        Ok((
            inv_reg_lower_inc_gamma(self.alpha, u1)? / self.theta,
            inv_reg_lower_inc_gamma(self.beta, u2)? / self.theta,
        ))
    }

    /// `n` pairs from one stream.
    pub fn sample_pairs(&self, n: usize, seed: RngSeed) -> Result<Vec<(f64, f64)>> {
        let mut rng = seed.rng();
        (0..n).map(|_| self.sample_pair(&mut rng)).collect()
    }
}

fn positive_point(name: &str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v <= 0.0 {
        return Err(domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `x / (x + y)` kept strictly inside (0, 1).
fn ratio(x: f64, y: f64) -> f64 {
    let z = x / (x + y);
    z.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// `n` EBB draws; the margins use rate 1 since `Z` does not depend on it.
pub fn sample_z(p: &EbbParams, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    sample_z_with_theta(p, 1.0, n, seed)
}

/// `n` EBB draws through margins with rate `theta`.
pub fn sample_z_with_theta(p: &EbbParams, theta: f64, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let d = BivGammaFgm::from_params(p, theta)?;
    let mut rng = seed.rng();
    (0..n)
        .map(|_| {
            let (x, y) = d.sample_pair(&mut rng)?;
            Ok(ratio(x, y))
        })
        .collect()
}

/// `n` draws from mixture component `i ∈ {2, 3, 4}`.
///
/// Component 2 replaces `X` by the larger of two iid Gamma(α) draws,
/// component 3 does the same for `Y`, component 4 for both; the remaining
/// variables are independent Gamma draws with no copula.
pub fn sample_component(p: &EbbParams, i: usize, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
    if !(2..=4).contains(&i) {
        return Err(invalid(format!("sampled component must be 2, 3 or 4, got {i}")));
    }
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let mut rng = seed.rng();
    let draw = |shape: f64, doubled: bool, rng: &mut ChaCha20Rng| -> Result<f64> {
        let g = inv_reg_lower_inc_gamma(shape, open_uniform(rng))?;
        if doubled {
            Ok(g.max(inv_reg_lower_inc_gamma(shape, open_uniform(rng))?))
        } else {
            Ok(g)
        }
    };
    (0..n)
        .map(|_| {
            let x = draw(p.alpha(), i != 3, &mut rng)?;
            let y = draw(p.beta(), i != 2, &mut rng)?;
            Ok(ratio(x, y))
        })
        .collect()
}
