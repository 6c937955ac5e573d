use crate::error::{domain, finite, Error, Result};

use super::gamma::lgamma;

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    lgamma(a) + lgamma(b) - lgamma(a + b)
}

const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(z: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        what: "incomplete beta continued fraction",
        limit: CF_MAX_ITER,
    })
}

/// Regularized incomplete beta `I_z(a, b)`, the Beta(a, b) CDF at `z`.
pub fn reg_inc_beta(z: f64, a: f64, b: f64) -> Result<f64> {
    finite("z", z)?;
    finite("a", a)?;
    finite("b", b)?;
    if !(0.0..=1.0).contains(&z) {
        return Err(domain(format!("reg_inc_beta requires 0 <= z <= 1, got {z}")));
    }
    if a <= 0.0 || b <= 0.0 {
        return Err(domain(format!(
            "reg_inc_beta requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    let w = 1.0 - z;
    let ln_front = a * z.ln() + b * w.ln() - ln_beta(a, b);
    if z < (a + 1.0) / (a + b + 2.0) {
        Ok(((ln_front).exp() * beta_cf(z, a, b)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - (ln_front).exp() * beta_cf(w, b, a)? / b).clamp(0.0, 1.0))
    }
}
