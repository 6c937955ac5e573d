//! Descriptive statistics, compensated summation and the Kolmogorov–Smirnov statistic.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Combines two partial sums.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut s = CompensatedSum::new();
    values.into_iter().for_each(|v| s.add(v));
    s.value()
}

pub fn mean(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(invalid("mean of an empty sample"));
    }
    Ok(compensated_sum(x.iter().copied()) / x.len() as f64)
}

/// Central moments `(m2, m3, m4)` with divisor `n`.
fn central_moments(x: &[f64], m: f64) -> (f64, f64, f64) {
    let (mut s2, mut s3, mut s4) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for &v in x {
        let d = v - m;
        let d2 = d * d;
        s2.add(d2);
        s3.add(d2 * d);
        s4.add(d2 * d2);
    }
    let n = x.len() as f64;
    (s2.value() / n, s3.value() / n, s4.value() / n)
}

/// Sample standard deviation with divisor `n − 1`.
pub fn std_dev(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(invalid("standard deviation needs at least 2 values"));
    }
    let m = mean(x)?;
    let (m2, _, _) = central_moments(x, m);
    Ok((m2 * x.len() as f64 / (x.len() as f64 - 1.0)).sqrt())
}

/// Moment coefficient of skewness `m3 / m2^{3/2}`.
pub fn skewness(x: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(invalid("skewness needs at least 3 values"));
    }
    let (m2, m3, _) = central_moments(x, mean(x)?);
    if m2 == 0.0 {
        return Err(invalid("skewness of a constant sample"));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Moment coefficient of kurtosis `m4 / m2²` (3 for a normal law).
pub fn kurtosis(x: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(invalid("kurtosis needs at least 4 values"));
    }
    let (m2, _, m4) = central_moments(x, mean(x)?);
    if m2 == 0.0 {
        return Err(invalid("kurtosis of a constant sample"));
    }
    Ok(m4 / (m2 * m2))
}

/// Sample Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("correlation needs two samples of equal length >= 2"));
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let (mut sxy, mut sxx, mut syy) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    let den = (sxx.value() * syy.value()).sqrt();
    if den == 0.0 {
        return Err(invalid("correlation of a constant sample"));
    }
    Ok(sxy.value() / den)
}

/// Quantile of a sorted sample by linear interpolation between order
/// statistics (`h = (n − 1) p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("quantile level must lie in [0, 1], got {p}")));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Summary in the usual order: n, min, quartiles, mean, max, sd, skewness, kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl Descriptive {
    pub fn from_sample(x: &[f64]) -> Result<Self> {
        if x.len() < 4 {
            return Err(invalid("descriptive statistics need at least 4 values"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sample contains non-finite values"));
        }
        let mut s = x.to_vec();
        s.sort_by(f64::total_cmp);
        Ok(Self {
            n: x.len(),
            min: s[0],
            q1: quantile_sorted(&s, 0.25)?,
            median: quantile_sorted(&s, 0.5)?,
            mean: mean(x)?,
            q3: quantile_sorted(&s, 0.75)?,
            max: s[s.len() - 1],
            sd: std_dev(x)?,
            skewness: skewness(x)?,
            kurtosis: kurtosis(x)?,
        })
    }
}

/// `sup |F_n − F|` for a sample against a CDF.
pub fn ks_statistic<F>(sample: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if sample.is_empty() {
        return Err(invalid("KS statistic of an empty sample"));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Asymptotic 1% critical value of the one-sample KS statistic, `1.6276 / √n`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
        let mut a = CompensatedSum::new();
        let mut b = CompensatedSum::new();
        a.add(1e16);
        a.add(1.0);
        b.add(-1e16);
        b.add(1.0);
        a.merge(&b);
        assert_eq!(a.value(), 2.0);
    }

    #[test]
    fn quartiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.25).unwrap(), 1.75);
        assert_eq!(quantile_sorted(&s, 0.5).unwrap(), 2.5);
        assert_eq!(quantile_sorted(&s, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn shape_coefficients() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(skewness(&x).unwrap().abs() < 1e-15);
        // m2 = 2, m4 = 6.8
        assert!((kurtosis(&x).unwrap() - 1.7).abs() < 1e-14);
        assert!((std_dev(&x).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        let y = [1.0, 1.0, 1.0, 10.0];
        assert!(skewness(&y).unwrap() > 0.0);
        assert!(skewness(&[2.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn correlation_extremes() {
        let x = [1.0, 2.0, 3.0];
        assert!((correlation(&x, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation(&x, &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let s: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_statistic(&s, Ok).unwrap();
        assert!((d - 0.05).abs() < 1e-15);
    }
}
