//! Maximum-likelihood fits of the Beta, Kumaraswamy and EBB models, model
//! comparison by AIC/BIC, the likelihood-ratio test of `ρ = 0`, and the
//! moment estimator of `ρ` from paired gamma data.
//!
//! The EBB log-likelihood is linear in `ρ` inside the logarithm:
//! `f = f₁ (1 + ρ r)` with `r = 1 − f₂/f₁ − f₃/f₁ + f₄/f₁`, so for fixed
//! shapes `ℓ(ρ) = Σ ln f₁ + Σ ln(1 + ρ rᵢ)` is concave and the component
//! densities only need evaluating once per `(α, β)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{ComponentKernel, EbbParams};
use crate::error::{invalid, Error, Result};
use crate::specfun::{
    digamma, integrate_semi_infinite, ln_beta, reg_lower_inc_gamma, reg_upper_inc_gamma, trigamma,
    QuadratureControl, SeriesControl,
};
use crate::stats::{compensated_sum, correlation, mean, std_dev};

const NEWTON_MAX_ITER: usize = 200;
const GOLDEN_TOL: f64 = 1e-10;

/// Model family of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Beta,
    Kumaraswamy,
    Ebb,
}

impl Model {
    pub fn n_params(&self) -> usize {
        match self {
            Model::Beta | Model::Kumaraswamy => 2,
            Model::Ebb => 3,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Model::Beta | Model::Kumaraswamy => &["alpha", "beta"],
            Model::Ebb => &["alpha", "beta", "rho"],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Beta => "beta",
            Model::Kumaraswamy => "kumaraswamy",
            Model::Ebb => "ebb",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "beta" => Ok(Model::Beta),
            "kumaraswamy" | "kw" => Ok(Model::Kumaraswamy),
            "ebb" => Ok(Model::Ebb),
            other => Err(invalid(format!("unknown model '{other}'"))),
        }
    }
}

/// `−2ℓ + 2k`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    -2.0 * loglik + 2.0 * k as f64
}

/// `−2ℓ + k ln n`.
pub fn bic(loglik: f64, k: usize, n: usize) -> f64 {
    -2.0 * loglik + k as f64 * (n as f64).ln()
}

/// Outcome of one maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    /// `(α, β)` or `(α, β, ρ)`.
    pub params: Vec<f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn new(model: Model, params: Vec<f64>, loglik: f64, n: usize, converged: bool, iterations: usize) -> Self {
        let k = model.n_params();
        debug_assert_eq!(params.len(), k);
        Self {
            model,
            params,
            loglik,
            aic: aic(loglik, k),
            bic: bic(loglik, k, n),
            n,
            converged,
            iterations,
        }
    }

    /// EBB parameters of an EBB fit.
    pub fn ebb_params(&self) -> Result<EbbParams> {
        if self.model != Model::Ebb {
            return Err(invalid(format!("{} fit has no EBB parameters", self.model)));
        }
        EbbParams::new(self.params[0], self.params[1], self.params[2])
    }
}

/// Likelihood-ratio test of `ρ = 0` against the EBB alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrTestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn check_unit_sample(z: &[f64]) -> Result<()> {
    if z.len() < 3 {
        return Err(invalid(format!("need at least 3 observations, got {}", z.len())));
    }
    if let Some((i, v)) = z.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v < 1.0)) {
        return Err(invalid(format!("observation {i} = {v} is not in (0, 1)")));
    }
    Ok(())
}

fn check_positive_sample(name: &str, x: &[f64]) -> Result<()> {
    if x.len() < 3 {
        return Err(invalid(format!("{name}: need at least 3 observations, got {}", x.len())));
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
        return Err(invalid(format!("{name}: observation {i} = {v} is not positive")));
    }
    Ok(())
}

/// Beta log-likelihood from the sufficient statistics.
fn beta_loglik(a: f64, b: f64, s1: f64, s2: f64, n: f64) -> f64 {
    (a - 1.0) * s1 + (b - 1.0) * s2 - n * ln_beta(a, b)
}

/// Beta ML fit: method-of-moments start, then Newton on the concave log-likelihood.
pub fn fit_beta(z: &[f64]) -> Result<FitResult> {
    check_unit_sample(z)?;
    let n = z.len() as f64;
    let m = mean(z)?;
    if z.iter().all(|&v| v == z[0]) {
        return Err(invalid("sample has zero variance"));
    }
    let sd = std_dev(z)?;
    let s1 = compensated_sum(z.iter().map(|v| v.ln()));
    let s2 = compensated_sum(z.iter().map(|v| (-v).ln_1p()));
    let common = m * (1.0 - m) / (sd * sd) - 1.0;
    let (mut a, mut b) = if common > 0.0 {
        (m * common, (1.0 - m) * common)
    } else {
        (1.0, 1.0)
    };
    let mut ll = beta_loglik(a, b, s1, s2, n);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=NEWTON_MAX_ITER {
        iterations = it;
        let psab = digamma(a + b);
        let g = [s1 - n * (digamma(a) - psab), s2 - n * (digamma(b) - psab)];
        let tab = trigamma(a + b);
        // negative Hessian, positive definite
        let h = [
            n * (trigamma(a) - tab),
            -n * tab,
            n * (trigamma(b) - tab),
        ];
        let det = h[0] * h[2] - h[1] * h[1];
        let da = (h[2] * g[0] - h[1] * g[1]) / det;
        let db = (h[0] * g[1] - h[1] * g[0]) / det;
        let mut t = 1.0;
        let (na, nb, nll) = loop {
            let (na, nb) = (a + t * da, b + t * db);
            if na > 0.0 && nb > 0.0 {
                let nll = beta_loglik(na, nb, s1, s2, n);
                if nll >= ll - 1e-12 * ll.abs() {
                    break (na, nb, nll);
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                break (a, b, ll);
            }
        };
        let step = ((na - a) / a).abs().max(((nb - b) / b).abs());
        a = na;
        b = nb;
        ll = nll;
        if step < 1e-12 || (g[0].abs() + g[1].abs()) < 1e-10 * n {
            converged = true;
            break;
        }
    }
    Ok(FitResult::new(Model::Beta, vec![a, b], ll, z.len(), converged, iterations))
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, usize) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evals = 2;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 >= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}

/// Kumaraswamy profile log-likelihood in `a` and the matching `b̂(a)`.
fn kumaraswamy_profile(z: &[f64], s1: f64, a: f64) -> (f64, f64) {
    let n = z.len() as f64;
    let t = compensated_sum(z.iter().map(|v| (-(a * v.ln()).exp()).ln_1p()));
    if !(t < 0.0) || !t.is_finite() {
        return (f64::NEG_INFINITY, f64::NAN);
    }
    let b = -n / t;
    let ll = n * a.ln() + n * b.ln() + (a - 1.0) * s1 + (b - 1.0) * t;
    (if ll.is_finite() { ll } else { f64::NEG_INFINITY }, b)
}

/// Kumaraswamy ML fit: `b̂(a) = −n / Σ ln(1 − zᵢᵃ)` profiled out, then a
/// grid plus golden-section search over `ln a`.
pub fn fit_kumaraswamy(z: &[f64]) -> Result<FitResult> {
    check_unit_sample(z)?;
    if std_dev(z)? == 0.0 {
        return Err(invalid("sample has zero variance"));
    }
    let s1 = compensated_sum(z.iter().map(|v| v.ln()));
    let prof = |la: f64| kumaraswamy_profile(z, s1, la.exp()).0;
    let grid: Vec<f64> = (0..=56).map(|k| -7.0 + 0.25 * k as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&g| prof(g)).collect();
    let best = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    if !vals[best].is_finite() {
        return Err(Error::Convergence {
            what: "Kumaraswamy profile search",
            limit: grid.len(),
        });
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (la, ll, evals) = golden_max(prof, lo, hi, 1e-12);
    let a = la.exp();
    let b = kumaraswamy_profile(z, s1, a).1;
    // an optimum on the edge of the grid is not an interior maximum
    let converged = best > 0 && best < grid.len() - 1;
    Ok(FitResult::new(
        Model::Kumaraswamy,
        vec![a, b],
        ll,
        z.len(),
        converged,
        grid.len() + evals,
    ))
}

/// `Σ ln f(zᵢ)`; a failing term reports its index.
pub fn ebb_loglik(p: &EbbParams, z: &[f64], ctl: &SeriesControl) -> Result<f64> {
    let mut s = crate::stats::CompensatedSum::new();
    for (i, &v) in z.iter().enumerate() {
        let l = p.log_pdf(v, ctl).map_err(|e| Error::Observation {
            index: i,
            source: Box::new(e),
        })?;
        s.add(l);
    }
    Ok(s.value())
}

/// Per-observation pieces of the EBB likelihood at fixed shapes.
#[derive(Debug, Clone)]
pub struct RhoProfile {
    /// `Σ ln f₁(zᵢ)`.
    base: f64,
    /// `rᵢ = (f₁ − f₂ − f₃ + f₄) / f₁`.
    r: Vec<f64>,
}

impl RhoProfile {
    pub fn new(alpha: f64, beta: f64, z: &[f64], ctl: &SeriesControl) -> Result<Self> {
        let k = ComponentKernel::new(alpha, beta)?;
        let mut base = crate::stats::CompensatedSum::new();
        let mut r = Vec::with_capacity(z.len());
        for (i, &v) in z.iter().enumerate() {
            let obs = |e| Error::Observation {
                index: i,
                source: Box::new(e),
            };
            let l1 = k.ln_component(1, v, ctl).map_err(obs)?;
            let l2 = k.ln_component(2, v, ctl).map_err(obs)?;
            let l3 = k.ln_component(3, v, ctl).map_err(obs)?;
            let l4 = k.ln_component(4, v, ctl).map_err(obs)?;
            base.add(l1);
            r.push(1.0 - (l2 - l1).exp() - (l3 - l1).exp() + (l4 - l1).exp());
        }
        Ok(Self { base: base.value(), r })
    }

    /// `ℓ(ρ)`; `−∞` where some `1 + ρ rᵢ ≤ 0`.
    pub fn loglik(&self, rho: f64) -> f64 {
        let mut s = crate::stats::CompensatedSum::new();
        for &r in &self.r {
            let t = rho * r;
            if !(t > -1.0) {
                return f64::NEG_INFINITY;
            }
            s.add(t.ln_1p());
        }
        self.base + s.value()
    }

    /// Golden-section search on each of `[−1, −½], [−½, 0], [0, ½], [½, 1]`;
    /// the best candidate wins, ties going to the smaller `|ρ|`.
    pub fn maximize_golden(&self) -> (f64, f64, usize) {
        let knots = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let mut cands: Vec<(f64, f64)> = knots.iter().map(|&k| (k, self.loglik(k))).collect();
        let mut evals = knots.len();
        for w in knots.windows(2) {
            let (x, f, e) = golden_max(|r| self.loglik(r), w[0], w[1], GOLDEN_TOL);
            cands.push((x, f));
            evals += e;
        }
        let best = pick_best(&cands);
        (best.0, best.1, evals)
    }

    /// Exact maximizer via the decreasing score `Σ rᵢ / (1 + ρ rᵢ)`:
    /// safeguarded Newton inside the feasible part of `[−1, 1]`.
    pub fn maximize_score(&self) -> (f64, f64, usize) {
        let score = |rho: f64| -> (f64, f64) {
            let (mut g, mut h) = (0.0, 0.0);
            for &r in &self.r {
                let q = r / (1.0 + rho * r);
                g += q;
                h -= q * q;
            }
            (g, h)
        };
        // feasible open interval for 1 + ρ r > 0
        let mut lo = -1.0_f64;
        let mut hi = 1.0_f64;
        for &r in &self.r {
            if r > 0.0 {
                lo = lo.max(-1.0 / r);
            } else if r < 0.0 {
                hi = hi.min(-1.0 / r);
            }
        }
        let (lo_open, hi_open) = (lo > -1.0, hi < 1.0);
        if !lo_open && score(lo).0 <= 0.0 {
            return (lo, self.loglik(lo), 1);
        }
        if !hi_open && score(hi).0 >= 0.0 {
            return (hi, self.loglik(hi), 2);
        }
        let (mut a, mut b) = (lo, hi);
        let mut x = 0.0_f64.clamp(a + 0.5 * (b - a) * 1e-3, b - 0.5 * (b - a) * 1e-3);
        let mut iters = 0;
        for it in 1..=NEWTON_MAX_ITER {
            iters = it;
            let (g, h) = score(x);
            if g > 0.0 {
                a = x;
            } else {
                b = x;
            }
            let mut nx = x - g / h;
            if !(nx > a && nx < b) {
                nx = 0.5 * (a + b);
            }
            if (nx - x).abs() < 1e-14 || b - a < 1e-14 {
                x = nx;
                break;
            }
            x = nx;
        }
        (x, self.loglik(x), iters)
    }
}

fn pick_best(cands: &[(f64, f64)]) -> (f64, f64) {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &(x, f) in cands {
        let better = f > best.1 || (f == best.1 && x.abs() < best.0.abs());
        if better || best.0.is_nan() {
            best = (x, f);
        }
    }
    best
}

/// Two-stage EBB fit: `(α̂, β̂)` from the Beta fit, then `ρ̂` maximizing the
/// profile log-likelihood over `[−1, 1]`.
pub fn fit_ebb_profile(z: &[f64], ctl: &SeriesControl) -> Result<FitResult> {
    let stage1 = fit_beta(z)?;
    let (a, b) = (stage1.params[0], stage1.params[1]);
    let prof = RhoProfile::new(a, b, z, ctl)?;
    let (rho, ll, evals) = prof.maximize_golden();
    Ok(FitResult::new(
        Model::Ebb,
        vec![a, b, rho],
        ll,
        z.len(),
        stage1.converged && ll.is_finite(),
        stage1.iterations + evals,
    ))
}

/// Joint three-parameter EBB fit: Nelder–Mead over `(ln α, ln β)` started
/// at the two-stage estimate, with `ρ` profiled exactly at each vertex.
pub fn fit_ebb_joint(z: &[f64], ctl: &SeriesControl) -> Result<FitResult> {
    let start = fit_ebb_profile(z, ctl)?;
    let objective = |v: &[f64; 2]| -> f64 {
        match RhoProfile::new(v[0].exp(), v[1].exp(), z, ctl) {
            Ok(p) => {
                let (_, ll, _) = p.maximize_score();
                if ll.is_finite() {
                    -ll
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    };
    let x0 = [start.params[0].ln(), start.params[1].ln()];
    let nm = nelder_mead(objective, x0, 0.1, 1e-9, 1e-7, 600);
    let (a, b) = (nm.x[0].exp(), nm.x[1].exp());
    let prof = RhoProfile::new(a, b, z, ctl)?;
    let (rho, ll, _) = prof.maximize_score();
    if ll < start.loglik {
        return Ok(FitResult {
            converged: false,
            iterations: start.iterations + nm.evaluations,
            ..start
        });
    }
    Ok(FitResult::new(
        Model::Ebb,
        vec![a, b, rho],
        ll,
        z.len(),
        nm.converged,
        start.iterations + nm.evaluations,
    ))
}

struct Simplex {
    x: [f64; 2],
    converged: bool,
    evaluations: usize,
}

/// Two-dimensional Nelder–Mead with standard coefficients.
fn nelder_mead<F: FnMut(&[f64; 2]) -> f64>(
    mut f: F,
    x0: [f64; 2],
    step: f64,
    ftol: f64,
    xtol: f64,
    max_evals: usize,
) -> Simplex {
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = pts.map(|p| f(&p));
    let mut evals = 3;
    let comb = |a: &[f64; 2], b: &[f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let mut converged = false;
    while evals < max_evals {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        let size = (1..3)
            .map(|i| (pts[i][0] - pts[0][0]).abs().max((pts[i][1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if (vals[2] - vals[0]).abs() <= ftol * (1.0 + vals[0].abs()) && size <= xtol {
            converged = true;
            break;
        }
        let centroid = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let xr = comb(&centroid, &pts[2], -1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = comb(&centroid, &pts[2], -2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let xc = comb(&centroid, &xr, 0.5);
                (xc, f(&xc))
            } else {
                let xc = comb(&centroid, &pts[2], 0.5);
                (xc, f(&xc))
            };
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = comb(&pts[0], &pts[i], 0.5);
                    vals[i] = f(&pts[i]);
                }
                evals += 2;
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("three vertices");
    Simplex {
        x: pts[best],
        converged,
        evaluations: evals,
    }
}

/// Gamma ML fit `(shape, rate)`: Newton on `ln k − ψ(k) = ln x̄ − mean(ln x)`.
pub fn fit_gamma_shape(x: &[f64]) -> Result<(f64, f64)> {
    check_positive_sample("x", x)?;
    let m = mean(x)?;
    let s = m.ln() - compensated_sum(x.iter().map(|v| v.ln())) / x.len() as f64;
    if !(s > 0.0) {
        return Err(invalid("gamma fit needs a sample with positive variance"));
    }
    let mut k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..NEWTON_MAX_ITER {
        let g = k.ln() - digamma(k) - s;
        let h = 1.0 / k - trigamma(k);
        let mut nk = k - g / h;
        if !(nk > 0.0) {
            nk = 0.5 * k;
        }
        if ((nk - k) / k).abs() < 1e-14 {
            k = nk;
            return Ok((k, k / m));
        }
        k = nk;
    }
    Err(Error::Convergence {
        what: "gamma shape Newton iteration",
        limit: NEWTON_MAX_ITER,
    })
}

/// `∫₀^∞ G(x)(1 − G(x)) dx` for the Gamma(shape, 1) CDF `G`.
pub fn gamma_gini_integral(shape: f64, qctl: &QuadratureControl) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(invalid(format!("shape must be positive, got {shape}")));
    }
    let r = integrate_semi_infinite(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            Ok(reg_lower_inc_gamma(shape, x)? * reg_upper_inc_gamma(shape, x)?)
        },
        0.0,
        qctl,
    )?;
    Ok(r.value)
}

/// Moment estimate of `ρ` from paired data with gamma margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoMoment {
    /// Estimate after clipping to `[−1, 1]`.
    pub rho: f64,
    /// Estimate before clipping.
    pub raw: f64,
    pub clipped: bool,
    pub correlation: f64,
    pub sd_x: f64,
    pub sd_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
}

/// `ρ̂ = corr(X, Y) σ̂_x σ̂_y / (β̂_x β̂_y)`.
///
/// Each margin is rescaled to unit rate (`x ↦ α̂ x / x̄`) before the standard
/// deviations are taken; `β̂_x` is the Gini-type integral of Gamma(α̂, 1).
pub fn estimate_rho_moment(
    x: &[f64],
    y: &[f64],
    alpha_hat: f64,
    beta_hat: f64,
    qctl: &QuadratureControl,
) -> Result<RhoMoment> {
    check_positive_sample("x", x)?;
    check_positive_sample("y", y)?;
    if x.len() != y.len() {
        return Err(invalid(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let xs: Vec<f64> = x.iter().map(|v| alpha_hat * v / mx).collect();
    let ys: Vec<f64> = y.iter().map(|v| beta_hat * v / my).collect();
    let (sd_x, sd_y) = (std_dev(&xs)?, std_dev(&ys)?);
    if sd_x == 0.0 || sd_y == 0.0 {
        return Err(invalid("zero-variance margin"));
    }
    let corr = correlation(&xs, &ys)?;
    let bx = gamma_gini_integral(alpha_hat, qctl)?;
    let by = gamma_gini_integral(beta_hat, qctl)?;
    let raw = corr * sd_x * sd_y / (bx * by);
    let rho = raw.clamp(-1.0, 1.0);
    Ok(RhoMoment {
        rho,
        raw,
        clipped: rho != raw,
        correlation: corr,
        sd_x,
        sd_y,
        beta_x: bx,
        beta_y: by,
    })
}

/// Gamma fits of both margins plus the moment estimate of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginFit {
    pub shape_x: f64,
    pub rate_x: f64,
    pub shape_y: f64,
    pub rate_y: f64,
    pub rho: RhoMoment,
}

pub fn fit_margins(x: &[f64], y: &[f64], qctl: &QuadratureControl) -> Result<MarginFit> {
    let (shape_x, rate_x) = fit_gamma_shape(x)?;
    let (shape_y, rate_y) = fit_gamma_shape(y)?;
    let rho = estimate_rho_moment(x, y, shape_x, shape_y, qctl)?;
    Ok(MarginFit {
        shape_x,
        rate_x,
        shape_y,
        rate_y,
        rho,
    })
}

/// Fits of all three models, best AIC first, with per-model failures kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub fits: Vec<FitResult>,
    pub failures: Vec<(Model, Error)>,
}

/// Fits Beta, Kumaraswamy and the two-stage EBB model and orders them by AIC.
pub fn compare_models(z: &[f64], ctl: &SeriesControl) -> Result<Comparison> {
    check_unit_sample(z)?;
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (model, r) in [
        (Model::Beta, fit_beta(z)),
        (Model::Kumaraswamy, fit_kumaraswamy(z)),
        (Model::Ebb, fit_ebb_profile(z, ctl)),
    ] {
        match r {
            Ok(f) => fits.push(f),
            Err(e) => failures.push((model, e)),
        }
    }
    fits.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(Comparison { fits, failures })
}

/// Upper tail of the chi-square(1) law.
pub fn chi_square1_sf(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    reg_upper_inc_gamma(0.5, 0.5 * x)
}

/// LR statistic from two maximized log-likelihoods.
pub fn lr_from_logliks(ll_ebb: f64, ll_beta: f64) -> Result<LrTestResult> {
    let statistic = (2.0 * (ll_ebb - ll_beta)).max(0.0);
    Ok(LrTestResult {
        statistic,
        df: 1,
        p_value: chi_square1_sf(statistic)?,
    })
}

/// `2(ℓ_EBB − ℓ_Beta)` with the two-stage EBB fit, referred to chi-square(1).
pub fn lr_test(z: &[f64], ctl: &SeriesControl) -> Result<LrTestResult> {
    let beta = fit_beta(z)?;
    let ebb = fit_ebb_profile(z, ctl)?;
    lr_from_logliks(ebb.loglik, beta.loglik)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn information_criteria() {
        assert!((aic(7922.92, 3) + 15839.84).abs() < 1e-9);
        assert!((bic(7922.92, 3, 7957) + 15818.90).abs() < 0.02);
    }

    #[test]
    fn model_names_round_trip() {
        for m in [Model::Beta, Model::Kumaraswamy, Model::Ebb] {
            assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
        }
        assert!("gamma".parse::<Model>().is_err());
    }

    #[test]
    fn chi_square_tail() {
        assert_eq!(chi_square1_sf(0.0).unwrap(), 1.0);
        // 3.841459 is the 95% point
        assert!((chi_square1_sf(3.841_458_820_694_124).unwrap() - 0.05).abs() < 1e-12);
        assert!((chi_square1_sf(6.634_896_601_021_214).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_max() {
        let (x, f, _) = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let r = nelder_mead(
            |v| (1.0 - v[0]).powi(2) + 100.0 * (v[1] - v[0] * v[0]).powi(2),
            [-1.2, 1.0],
            0.5,
            1e-14,
            1e-10,
            5000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn gini_integral_of_exponential() {
        let v = gamma_gini_integral(1.0, &QuadratureControl::tight()).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn tie_break_prefers_small_rho() {
        assert_eq!(pick_best(&[(0.5, 1.0), (-0.2, 1.0), (0.9, 0.5)]), (-0.2, 1.0));
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(fit_beta(&[0.2, 0.3]).is_err());
        assert!(fit_beta(&[0.2, 0.3, 1.0]).is_err());
        assert!(fit_beta(&[0.4, 0.4, 0.4]).is_err());
        assert!(fit_kumaraswamy(&[0.0, 0.3, 0.5]).is_err());
    }
}
