//! The extended bimodal beta (EBB) distribution.
//!
//! The EBB law is the distribution of `X / (X + Y)` where `(X, Y)` has gamma
//! margins with a common rate and a Farlie–Gumbel–Morgenstern copula with
//! dependence parameter `rho`. At `rho = 0` it is the Beta(alpha, beta) law.
//!
//! Layout:
//!
//! * [`specfun`]: gamma, incomplete gamma/beta, Gauss `2F1`, Appell `F2`,
//!   adaptive quadrature and the incomplete-gamma integral identities.
//! * [`dist`]: [`EbbParams`] and the density, CDF, quantile, moments and MGF.
//! * [`fgm`]: the Morgenstern copula with gamma margins and the samplers.
//! * [`estimation`]: Beta, Kumaraswamy and EBB fits, AIC/BIC and the LR test.
//! * [`montecarlo`]: relative bias / RMSE studies of the EBB estimator.
//! * [`stats`]: descriptive statistics and the Kolmogorov–Smirnov statistic.

// Published approximation coefficients keep all their digits; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod error;
pub mod estimation;
pub mod fgm;
pub mod montecarlo;
pub mod specfun;
pub mod stats;

pub use dist::{EbbParams, SignedComponent};
pub use error::{Error, Result};
pub use fgm::{BivGammaFgm, RngSeed};
pub use specfun::{QuadratureControl, SeriesControl};
