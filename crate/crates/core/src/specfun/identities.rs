//! Closed forms for integrals of lower incomplete gamma functions, each paired
//! with a quadrature evaluation of the defining integral.
//!
//! These identities are what turn the ratio-of-gammas integrals into the
//! `2F1` and `F2` terms of the EBB density, so they double as test oracles.

use crate::error::{domain, finite, Result};

use super::gamma::{lgamma, reg_lower_inc_gamma};
use super::hypergeometric::{appell_f2_scaled, gauss_2f1_scaled};
use super::quadrature::{integrate, integrate_semi_infinite};
use super::{QuadratureControl, SeriesControl};

/// Both sides of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// Quadrature of the defining integral.
    pub lhs: f64,
    /// Closed-form side.
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn rel_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    finite(name, v)?;
    if v <= 0.0 {
        return Err(domain(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

/// Lower incomplete gamma `γ(a, x)` (unregularized).
fn lower_gamma(a: f64, x: f64) -> Result<f64> {
    Ok(reg_lower_inc_gamma(a, x)? * lgamma(a).exp())
}

/// `∫₀ˣ y^{β−1} e^{−θy} γ(β, θy) dy` against the closed form
/// `(Γ(β)/θ^β) [γ(β, θx) − Γ(β)/2]`.
///
/// The closed form is the `x → ∞` value of the integral and agrees with it
/// only when `γ(β, θx)` has saturated at `Γ(β)`; for finite `x` the exact
/// value is [`lower_gamma_partial_exact`].
pub fn identity_lower_gamma_partial(
    beta: f64,
    theta: f64,
    x: f64,
    qctl: &QuadratureControl,
) -> Result<IdentityCheck> {
    positive("beta", beta)?;
    positive("theta", theta)?;
    positive("x", x)?;
    let lhs = integrate(
        |y| Ok(y.powf(beta - 1.0) * (-theta * y).exp() * lower_gamma(beta, theta * y)?),
        0.0,
        x,
        qctl,
    )?
    .value;
    let g = lgamma(beta).exp();
    let rhs = g / theta.powf(beta) * (lower_gamma(beta, theta * x)? - 0.5 * g);
    Ok(IdentityCheck { lhs, rhs })
}

/// Exact value of `∫₀ˣ y^{β−1} e^{−θy} γ(β, θy) dy = γ(β, θx)² / (2 θ^β)`.
pub fn lower_gamma_partial_exact(beta: f64, theta: f64, x: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("theta", theta)?;
    positive("x", x)?;
    let g = lower_gamma(beta, theta * x)?;
    Ok(g * g / (2.0 * theta.powf(beta)))
}

/// `∫₀^∞ x^{a−1} e^{−sx} γ(b, θx) γ(c, ξx) dx` against
/// `θ^b ξ^c Γ(a+b+c) / (b c S^{a+b+c}) · F2(a+b+c, 1, 1; b+1, c+1; θ/S, ξ/S)`,
/// `S = s + θ + ξ`.
#[allow(clippy::too_many_arguments)]
pub fn identity_lower_gamma_pair(
    a: f64,
    b: f64,
    c: f64,
    s: f64,
    theta: f64,
    xi: f64,
    qctl: &QuadratureControl,
    sctl: &SeriesControl,
) -> Result<IdentityCheck> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("s", s), ("theta", theta), ("xi", xi)] {
        positive(name, v)?;
    }
    // integrate in units of the mode scale of x^{a+b+c-1} e^{-sx}
    let scale = (a + b + c) / s;
    let lhs = scale
        * integrate_semi_infinite(
            |w| {
                let x = scale * w;
                Ok(((a - 1.0) * x.ln() - s * x).exp()
                    * lower_gamma(b, theta * x)?
                    * lower_gamma(c, xi * x)?)
            },
            0.0,
            qctl,
        )?
        .value;
    let big_s = s + theta + xi;
    let abc = a + b + c;
    let f2 = appell_f2_scaled(abc, 1.0, 1.0, b + 1.0, c + 1.0, theta / big_s, xi / big_s, sctl)?;
    let ln_rhs = b * theta.ln() + c * xi.ln() + lgamma(abc) - (b * c).ln() - abc * big_s.ln()
        + f2.ln_abs();
    Ok(IdentityCheck {
        lhs,
        rhs: f2.signum() * ln_rhs.exp(),
    })
}

/// `∫₀^∞ x^{a−1} e^{−sx} γ(b, θx) dx` against
/// `θ^b Γ(a+b) / (b (s+θ)^{a+b}) · 2F1(a+b, 1; b+1; θ/(s+θ))`.
pub fn identity_lower_gamma_single(
    a: f64,
    s: f64,
    theta: f64,
    b: f64,
    qctl: &QuadratureControl,
    sctl: &SeriesControl,
) -> Result<IdentityCheck> {
    for (name, v) in [("a", a), ("s", s), ("theta", theta), ("b", b)] {
        positive(name, v)?;
    }
    let scale = (a + b) / s;
    let lhs = scale
        * integrate_semi_infinite(
            |w| {
                let x = scale * w;
                Ok(((a - 1.0) * x.ln() - s * x).exp() * lower_gamma(b, theta * x)?)
            },
            0.0,
            qctl,
        )?
        .value;
    let f = gauss_2f1_scaled(a + b, 1.0, b + 1.0, theta / (s + theta), sctl)?;
    let ln_rhs = b * theta.ln() + lgamma(a + b) - b.ln() - (a + b) * (s + theta).ln() + f.ln_abs();
    Ok(IdentityCheck {
        lhs,
        rhs: f.signum() * ln_rhs.exp(),
    })
}
