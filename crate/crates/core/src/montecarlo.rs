//! Monte Carlo evaluation of the EBB estimators: relative bias and (as
//! conventionally printed) mean squared error per parameter and sample size.
//!
//! Replicate `j` at the `k`-th sample size draws from stream
//! `master.stream_id + (k << 32) + j`, so every replicate is reproducible in
//! isolation and the reduction is independent of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::EbbParams;
use crate::error::{invalid, Error, Result};
use crate::estimation::{fit_ebb_joint, fit_ebb_profile, FitResult};
use crate::fgm::{sample_z, RngSeed};
use crate::specfun::SeriesControl;
use crate::stats::{compensated_sum, skewness};

/// Fraction of failed replicates above which a scenario is an error.
pub const MAX_FAILURE_FRACTION: f64 = 0.2;

const PARAM_NAMES: [&str; 3] = ["alpha", "beta", "rho"];

/// Which EBB estimator a study evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Beta-fit shapes, then the profile maximizer of `ρ`.
    Profile,
    /// Full three-parameter maximum likelihood.
    #[default]
    Joint,
}

impl Estimator {
    pub fn fit(&self, z: &[f64], ctl: &SeriesControl) -> Result<FitResult> {
        match self {
            Estimator::Profile => fit_ebb_profile(z, ctl),
            Estimator::Joint => fit_ebb_joint(z, ctl),
        }
    }
}

/// One simulation design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McScenario {
    pub params: EbbParams,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: RngSeed,
    #[serde(default)]
    pub estimator: Estimator,
}

impl McScenario {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(invalid("at least one sample size is required"));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 3) {
            return Err(invalid(format!("sample sizes must be at least 3, got {n}")));
        }
        Ok(())
    }

    pub fn replicate_seed(&self, size_index: usize, j: usize) -> RngSeed {
        let offset = ((size_index as u64) << 32).wrapping_add(j as u64);
        self.master_seed.stream(self.master_seed.stream_id.wrapping_add(offset))
    }
}

/// Error summaries for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub truth: f64,
    /// `(1/N) Σ (θ̂ − θ)/θ`; absent when `θ = 0`.
    pub rb: Option<f64>,
    /// `(1/N) Σ (θ̂ − θ)`, reported in place of `rb` when `θ = 0`.
    pub abs_bias: Option<f64>,
    /// `(1/N) Σ (θ̂ − θ)²`, the quantity conventionally printed as RMSE.
    pub rmse: f64,
    /// `√rmse`.
    pub root_mse: f64,
}

/// Results for one `(scenario, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n: usize,
    pub replications: usize,
    pub failure_count: usize,
    pub params: Vec<ParamSummary>,
    /// Successful estimates `(α̂, β̂, ρ̂)` in replicate order.
    pub estimates: Vec<[f64; 3]>,
}

impl McSummary {
    pub fn param(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Column `k` of the estimate matrix.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.estimates.iter().map(|e| e[k]).collect()
    }
}

/// Relative bias `(1/N) Σ (θ̂ − θ)/θ`.
pub fn rb(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("relative bias of an empty set of estimates"));
    }
    if truth == 0.0 {
        return Err(invalid("relative bias is undefined for a true value of 0"));
    }
    Ok(compensated_sum(estimates.iter().map(|e| (e - truth) / truth)) / estimates.len() as f64)
}

/// `(1/N) Σ (θ̂ − θ)²`.
pub fn rmse(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("RMSE of an empty set of estimates"));
    }
    Ok(compensated_sum(estimates.iter().map(|e| (e - truth) * (e - truth))) / estimates.len() as f64)
}

/// `(1/N) Σ (θ̂ − θ)`.
pub fn abs_bias(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("bias of an empty set of estimates"));
    }
    Ok(compensated_sum(estimates.iter().map(|e| e - truth)) / estimates.len() as f64)
}

/// Summarizes a set of successful estimates against the truth.
pub fn summarize(n: usize, replications: usize, truth: [f64; 3], estimates: Vec<[f64; 3]>) -> Result<McSummary> {
    let failure_count = replications - estimates.len();
    let mut params = Vec::with_capacity(3);
    for (k, name) in PARAM_NAMES.iter().enumerate() {
        let col: Vec<f64> = estimates.iter().map(|e| e[k]).collect();
        let t = truth[k];
        let m = rmse(&col, t)?;
        params.push(ParamSummary {
            name: name.to_string(),
            truth: t,
            rb: if t != 0.0 { Some(rb(&col, t)?) } else { None },
            abs_bias: if t == 0.0 { Some(abs_bias(&col, t)?) } else { None },
            rmse: m,
            root_mse: m.sqrt(),
        });
    }
    Ok(McSummary {
        n,
        replications,
        failure_count,
        params,
        estimates,
    })
}

/// Runs the study with the scenario's estimator.
pub fn run_scenario(s: &McScenario, ctl: &SeriesControl) -> Result<Vec<McSummary>> {
    let est = s.estimator;
    run_scenario_with(s, |z| est.fit(z, ctl))
}

/// Runs the study with an arbitrary estimator.
///
/// A replicate fails when sampling or fitting errors or the fit reports no
/// convergence; failures are counted and excluded. More than
/// [`MAX_FAILURE_FRACTION`] failures at any sample size is an error.
pub fn run_scenario_with<F>(s: &McScenario, fit: F) -> Result<Vec<McSummary>>
where
    F: Fn(&[f64]) -> Result<FitResult> + Sync,
{
    s.validate()?;
    let truth = [s.params.alpha(), s.params.beta(), s.params.rho()];
    let mut out = Vec::with_capacity(s.sample_sizes.len());
    for (k, &n) in s.sample_sizes.iter().enumerate() {
        let results: Vec<Option<[f64; 3]>> = (0..s.replications)
            .into_par_iter()
            .map(|j| {
                let z = sample_z(&s.params, n, s.replicate_seed(k, j)).ok()?;
                let f = fit(&z).ok()?;
                (f.converged && f.params.len() == 3).then(|| [f.params[0], f.params[1], f.params[2]])
            })
            .collect();
        let estimates: Vec<[f64; 3]> = results.into_iter().flatten().collect();
        let failures = s.replications - estimates.len();
        if estimates.is_empty() || failures as f64 > MAX_FAILURE_FRACTION * s.replications as f64 {
            return Err(Error::Convergence {
                what: "Monte Carlo scenario (too many failed replicates)",
                limit: s.replications,
            });
        }
        out.push(summarize(n, s.replications, truth, estimates)?);
    }
    Ok(out)
}

/// Equal-width histogram of one parameter's estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub param: String,
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Moment skewness of the estimates; absent for fewer than 3 values or
    /// constant estimates.
    pub skewness: Option<f64>,
}

/// Per-parameter histograms of the estimate matrix.
pub fn emit_histogram_data(summary: &McSummary, bins: usize) -> Result<Vec<Histogram>> {
    if bins == 0 {
        return Err(invalid("histogram needs at least one bin"));
    }
    if summary.estimates.is_empty() {
        return Err(invalid("no successful replicates to bin"));
    }
    Ok(PARAM_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let col = summary.column(k);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
            let w = (hi - lo) / bins as f64;
            let edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
            let mut counts = vec![0usize; bins];
            for v in &col {
                let i = (((v - lo) / w) as usize).min(bins - 1);
                counts[i] += 1;
            }
            Histogram {
                param: name.to_string(),
                edges,
                counts,
                skewness: skewness(&col).ok(),
            }
        })
        .collect())
}
