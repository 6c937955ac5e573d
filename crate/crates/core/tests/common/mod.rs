#![allow(dead_code)]

use ebb::specfun::{integrate, integrate_semi_infinite};
use ebb::QuadratureControl;
use statrs::function::gamma::ln_gamma;

pub fn oracle_quad() -> QuadratureControl {
    QuadratureControl::new(1e-11, 1e-15, 4000, 1e-12).unwrap()
}

/// `P(a, x)` as the quadrature `(x^a / a) ∫₀¹ e^{−x u^{1/a}} du / Γ(a)`.
pub fn gamma_cdf_by_quadrature(a: f64, x: f64) -> f64 {
    let inner = integrate(|u| Ok((-x * u.powf(1.0 / a)).exp()), 0.0, 1.0, &oracle_quad())
        .unwrap()
        .value;
    (a * x.ln() - a.ln() - ln_gamma(a)).exp() * inner
}

fn ln_gamma_pdf(a: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() - x - ln_gamma(a)
}

/// Density of `X/(X+Y)` from the FGM-gamma joint law with unit rate, as the
/// Jacobian integral `∫₀^∞ s h(zs, (1−z)s) ds` with both marginal CDFs
/// themselves taken by quadrature.
pub fn ratio_density_oracle(alpha: f64, beta: f64, rho: f64, z: f64) -> f64 {
    let w = 1.0 - z;
    let scale = (alpha + beta) / 1.0;
    let q = oracle_quad();
    scale
        * integrate_semi_infinite(
            |t| {
                let s = scale * t;
                if s == 0.0 {
                    return Ok(0.0);
                }
                let (x, y) = (z * s, w * s);
                let base = (s.ln() + ln_gamma_pdf(alpha, x) + ln_gamma_pdf(beta, y)).exp();
                if base == 0.0 {
                    return Ok(0.0);
                }
                let fx = gamma_cdf_by_quadrature(alpha, x);
                let fy = gamma_cdf_by_quadrature(beta, y);
                Ok(base * (1.0 + rho * (2.0 * fx - 1.0) * (2.0 * fy - 1.0)))
            },
            0.0,
            &q,
        )
        .unwrap()
        .value
}

pub fn beta_density(a: f64, b: f64, z: f64) -> f64 {
    ((a - 1.0) * z.ln() + (b - 1.0) * (1.0 - z).ln() - statrs::function::beta::ln_beta(a, b)).exp()
}

/// `∫₀¹ f` split at ½ with `z = ½v²` near each end, which absorbs
/// endpoint singularities no stronger than `z^{−1/2}`.
pub fn unit_integral<F: FnMut(f64) -> f64>(mut f: F, q: &QuadratureControl) -> f64 {
    let left = integrate(|v| Ok(f(0.5 * v * v) * v), 0.0, 1.0, q).unwrap().value;
    let right = integrate(|v| Ok(f(1.0 - 0.5 * v * v) * v), 0.0, 1.0, q).unwrap().value;
    left + right
}

/// `k/(n+1)` for `k = 1..=n`.
pub fn interior_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}
