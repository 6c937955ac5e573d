//! Special-function kernel.
//!
//! Every function here is a pure function of its arguments plus an explicit
//! [`SeriesControl`] or [`QuadratureControl`] policy. Inputs that are NaN or
//! infinite are rejected with [`Error::Domain`](crate::Error::Domain).

mod beta;
mod gamma;
mod hypergeometric;
mod identities;
mod quadrature;

pub use beta::{ln_beta, reg_inc_beta};
pub use gamma::{
    digamma, inv_reg_lower_inc_gamma, ln_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma,
    trigamma,
};
pub use hypergeometric::{appell_f2, appell_f2_scaled, gauss_2f1, gauss_2f1_scaled, Scaled};
pub use identities::{
    identity_lower_gamma_pair, identity_lower_gamma_partial, identity_lower_gamma_single,
    lower_gamma_partial_exact, IdentityCheck,
};
pub use quadrature::{integrate, integrate_semi_infinite, Integral};

pub(crate) use gamma::lgamma;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Truncation policy for every infinite-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Relative tolerance on the estimated truncation error.
    pub rel_tol: f64,
    /// Term cap per summation index.
    pub max_terms: usize,
    /// Number of successive below-tolerance terms required to stop.
    pub consecutive_small: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 20_000,
            consecutive_small: 3,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize, consecutive_small: usize) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            max_terms,
            consecutive_small,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid(format!(
                "series rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 100 {
            return Err(invalid(format!(
                "series max_terms must be at least 100, got {}",
                self.max_terms
            )));
        }
        if self.consecutive_small == 0 {
            return Err(invalid("series consecutive_small must be positive"));
        }
        Ok(())
    }
}

/// Accuracy policy for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Distance kept from the ends of open intervals such as (0, 1).
    pub endpoint_inset: f64,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            endpoint_inset: 1e-10,
        }
    }
}

impl QuadratureControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize, endpoint_inset: f64) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            endpoint_inset,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.endpoint_inset > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if self.endpoint_inset >= 1e-3 {
            return Err(invalid(format!(
                "endpoint_inset must be below 1e-3, got {}",
                self.endpoint_inset
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be positive"));
        }
        Ok(())
    }

    /// Same policy with tighter tolerances, used by oracles.
    pub fn tight() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_subdivisions: 5000,
            endpoint_inset: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_defaults_validate() {
        SeriesControl::default().validate().unwrap();
        QuadratureControl::default().validate().unwrap();
        QuadratureControl::tight().validate().unwrap();
    }

    #[test]
    fn control_rejects_bad_values() {
        assert!(SeriesControl::new(0.0, 1000, 3).is_err());
        assert!(SeriesControl::new(1.0, 1000, 3).is_err());
        assert!(SeriesControl::new(1e-12, 99, 3).is_err());
        assert!(QuadratureControl::new(1e-9, 1e-12, 100, 1e-3).is_err());
        assert!(QuadratureControl::new(-1e-9, 1e-12, 100, 1e-10).is_err());
    }
}
