//! Gauss `2F1` and Appell `F2` by direct series summation.
//!
//! Both series are summed with a running logarithmic scale so that large
//! upper parameters (the EBB density uses `a = 2α + 2β`) cannot overflow.

use crate::error::{domain, finite, Error, Result};

use super::SeriesControl;

/// A real number stored as `mantissa · exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn one() -> Self {
        Self {
            mantissa: 1.0,
            ln_scale: 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa.signum() * (self.mantissa.abs().ln() + self.ln_scale).exp()
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }
}

/// Signed sum of terms supplied as `(sign, ln |term|)`.
#[cfg(test)]
struct LogAccumulator {
    sum: f64,
    ln_scale: f64,
}

#[cfg(test)]
impl LogAccumulator {
    fn new(ln_first: f64) -> Self {
        Self {
            sum: 0.0,
            ln_scale: ln_first,
        }
    }

    fn add(&mut self, sign: f64, ln_mag: f64) {
        if ln_mag - self.ln_scale > 300.0 {
            self.sum *= (self.ln_scale - ln_mag).exp();
            self.ln_scale = ln_mag;
        }
        self.sum += sign * (ln_mag - self.ln_scale).exp();
    }

    fn finish(self) -> Scaled {
        Scaled {
            mantissa: self.sum,
            ln_scale: self.ln_scale,
        }
    }
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c == c.round()
}

const RESCALE_AT: f64 = 1e250;

/// `2F1(a, b; c; x)` for `|x| < 1` by forward recurrence on the term ratio.
pub fn gauss_2f1_scaled(a: f64, b: f64, c: f64, x: f64, ctl: &SeriesControl) -> Result<Scaled> {
    finite("a", a)?;
    finite("b", b)?;
    finite("c", c)?;
    finite("x", x)?;
    if is_nonpositive_integer(c) {
        return Err(domain(format!("2F1 lower parameter c={c} is a nonpositive integer")));
    }
    if x.abs() >= 1.0 {
        return Err(domain(format!("2F1 series requires |x| < 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(Scaled::one());
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut ln_scale = 0.0_f64;
    let mut small = 0usize;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) * x / ((c + nf) * (nf + 1.0));
        if ratio == 0.0 {
            // terminating series
            return Ok(Scaled {
                mantissa: sum,
                ln_scale,
            });
        }
        term *= ratio;
        sum += term;
        if sum.abs() > RESCALE_AT {
            sum /= RESCALE_AT;
            term /= RESCALE_AT;
            ln_scale += RESCALE_AT.ln();
        }
        let next_ratio = ((a + nf + 1.0) * (b + nf + 1.0) * x / ((c + nf + 1.0) * (nf + 2.0))).abs();
        let bound = next_ratio.max(x.abs());
        let tail = if bound < 1.0 {
            term.abs() * bound / (1.0 - bound)
        } else {
            f64::INFINITY
        };
        if tail <= ctl.rel_tol * sum.abs() {
            small += 1;
            if small >= ctl.consecutive_small {
                return Ok(Scaled {
                    mantissa: sum,
                    ln_scale,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        what: "Gauss 2F1 series",
        limit: ctl.max_terms,
    })
}

/// `2F1(a, b; c; x)`; see [`gauss_2f1_scaled`].
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    gauss_2f1_scaled(a, b, c, x, ctl).map(|s| s.value())
}

// below this y the contiguous recurrence loses its dominance margin
const RECURRENCE_MIN_Y: f64 = 0.05;

/// The sequence `2F1(a + m, b; c; y)`, `m = 0, 1, …`.
///
/// For `y ≥ RECURRENCE_MIN_Y` and `a > 0` the values follow from the upward
/// contiguous relation
/// `a(1−y) F(a+1) = (c−a) F(a−1) + (2a − c + (b−a) y) F(a)`,
/// whose growing solution is `F` itself; otherwise each value is summed.
struct ShiftedGauss {
    a: f64,
    b: f64,
    c: f64,
    y: f64,
    m: usize,
    recur: bool,
    prev: f64,
    cur: f64,
    ln_scale: f64,
}

impl ShiftedGauss {
    fn new(a: f64, b: f64, c: f64, y: f64, ctl: &SeriesControl) -> Result<Self> {
        let f0 = gauss_2f1_scaled(a, b, c, y, ctl)?;
        Ok(Self {
            a,
            b,
            c,
            y,
            m: 0,
            recur: false,
            prev: 0.0,
            cur: f0.mantissa,
            ln_scale: f0.ln_scale,
        })
    }

    fn current(&self) -> Scaled {
        Scaled {
            mantissa: self.cur,
            ln_scale: self.ln_scale,
        }
    }

    fn advance(&mut self, ctl: &SeriesControl) -> Result<Scaled> {
        let am = self.a + self.m as f64;
        self.m += 1;
        if self.recur {
            let (a, b, c, y) = (am, self.b, self.c, self.y);
            let next = ((c - a) * self.prev + (2.0 * a - c + (b - a) * y) * self.cur) / (a * (1.0 - y));
            self.prev = self.cur;
            self.cur = next;
            if next.abs() > RESCALE_AT {
                self.prev /= RESCALE_AT;
                self.cur /= RESCALE_AT;
                self.ln_scale += RESCALE_AT.ln();
            }
            if self.cur.is_finite() {
                return Ok(self.current());
            }
        }
        let next = gauss_2f1_scaled(am + 1.0, self.b, self.c, self.y, ctl)?;
        if self.y >= RECURRENCE_MIN_Y && am > 0.0 && next.mantissa != 0.0 {
            // bring the previous value onto the new scale
            self.prev = self.cur * (self.ln_scale - next.ln_scale).exp();
            self.recur = self.prev.is_finite() && self.prev != 0.0;
        }
        self.cur = next.mantissa;
        self.ln_scale = next.ln_scale;
        Ok(self.current())
    }
}

/// Appell `F2(a; b1, b2; c1, c2; x, y)` for `|x| + |y| < 1`.
///
/// Summed as an outer series over `m` whose inner sums over `n` are
/// `2F1(a + m, b2; c2; y)`:
///
/// `F2 = Σ_m (a)_m (b1)_m / ((c1)_m m!) x^m · 2F1(a + m, b2; c2; y)`,
///
/// with the inner values generated by the contiguous recurrence in `a`.
#[allow(clippy::too_many_arguments)]
pub fn appell_f2_scaled(
    a: f64,
    b1: f64,
    b2: f64,
    c1: f64,
    c2: f64,
    x: f64,
    y: f64,
    ctl: &SeriesControl,
) -> Result<Scaled> {
    for (name, v) in [("a", a), ("b1", b1), ("b2", b2), ("c1", c1), ("c2", c2), ("x", x), ("y", y)] {
        finite(name, v)?;
    }
    if is_nonpositive_integer(c1) || is_nonpositive_integer(c2) {
        return Err(domain(format!(
            "F2 lower parameters must not be nonpositive integers, got c1={c1}, c2={c2}"
        )));
    }
    if x.abs() + y.abs() >= 1.0 {
        return Err(domain(format!(
            "F2 series requires |x| + |y| < 1, got x={x}, y={y}"
        )));
    }
    if x.abs() > y.abs() {
        // the outer sum converges like |x| / (1 − |y|); keep the smaller argument outside
        return appell_f2_scaled(a, b2, b1, c2, c1, y, x, ctl);
    }
    let mut inner_seq = ShiftedGauss::new(a, b2, c2, y, ctl)?;
    let inner0 = inner_seq.current();
    if x == 0.0 {
        return Ok(inner0);
    }
    // value = sum · e^{scale}; the outer coefficient is coef · e^{coef_ln}
    let mut sum = inner0.mantissa;
    let mut scale = inner0.ln_scale;
    let mut coef = 1.0_f64;
    let mut coef_ln = 0.0_f64;
    let mut offset = f64::NAN;
    let mut factor = 1.0_f64;
    let mut prev_term = sum;
    let asymptotic = x.abs() / (1.0 - y.abs());
    let mut small = 0usize;
    for m in 0..ctl.max_terms {
        let mf = m as f64;
        let ratio = (a + mf) * (b1 + mf) * x / ((c1 + mf) * (mf + 1.0));
        if ratio == 0.0 {
            return Ok(Scaled { mantissa: sum, ln_scale: scale });
        }
        coef *= ratio;
        if coef.abs() > RESCALE_AT || coef.abs() < 1.0 / RESCALE_AT {
            let shift = coef.abs().ln();
            coef /= shift.exp();
            coef_ln += shift;
        }
        let inner = inner_seq.advance(ctl)?;
        let off = coef_ln + inner.ln_scale - scale;
        if off != offset {
            offset = off;
            factor = off.exp();
        }
        let mut term = coef * inner.mantissa * factor;
        if !term.is_finite() || term.abs() > RESCALE_AT {
            // move the running sum onto the scale of the new term
            let shift = off + (coef * inner.mantissa).abs().ln();
            sum *= (-shift).exp();
            prev_term *= (-shift).exp();
            scale += shift;
            offset = coef_ln + inner.ln_scale - scale;
            factor = offset.exp();
            term = coef * inner.mantissa * factor;
        }
        sum += term;
        let observed = if prev_term != 0.0 { (term / prev_term).abs() } else { 0.0 };
        prev_term = term;
        let bound = observed.max(asymptotic);
        if bound < 1.0 && term.abs() * bound / (1.0 - bound) <= ctl.rel_tol * sum.abs() {
            small += 1;
            if small >= ctl.consecutive_small {
                return Ok(Scaled { mantissa: sum, ln_scale: scale });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        what: "Appell F2 outer series",
        limit: ctl.max_terms,
    })
}

/// Appell `F2`; see [`appell_f2_scaled`].
#[allow(clippy::too_many_arguments)]
pub fn appell_f2(
    a: f64,
    b1: f64,
    b2: f64,
    c1: f64,
    c2: f64,
    x: f64,
    y: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    appell_f2_scaled(a, b1, b2, c1, c2, x, y, ctl).map(|s| s.value())
}
