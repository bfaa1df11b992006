//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant through `(x[i], y[i])`; `x` must be strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Domain("monotone cubic needs >= 2 matching knots".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("monotone cubic knots must be strictly increasing".into()));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    // weighted harmonic mean keeps the interpolant monotone
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Overrides the slope at the last knot (used to make a clamped tail C¹).
    pub fn with_last_slope(mut self, slope: f64) -> Self {
        let n = self.d.len();
        self.d[n - 1] = slope;
        self
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value at `t`; linear extrapolation outside the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (t - self.x[n - 1]);
        }
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(s);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    /// First derivative at `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.d[0];
        }
        if t >= self.x[n - 1] {
            return self.d[n - 1];
        }
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let dh00 = 6.0 * s * s - 6.0 * s;
        let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * s * s - 2.0 * s;
        (dh00 * self.y[i] + dh01 * self.y[i + 1]) / h + dh10 * self.d[i] + dh11 * self.d[i + 1]
    }

    /// Exact integral of the interpolant over `[x[0], t]` for `t` inside the knot range.
    pub fn integral_from_start(&self, t: f64) -> f64 {
        let t = t.clamp(self.x[0], *self.x.last().unwrap());
        let i_end = self.interval(t);
        let mut total = 0.0;
        for i in 0..i_end {
            let h = self.x[i + 1] - self.x[i];
            total += h * (self.y[i] + self.y[i + 1]) / 2.0 + h * h * (self.d[i] - self.d[i + 1]) / 12.0;
        }
        let h = self.x[i_end + 1] - self.x[i_end];
        let s = (t - self.x[i_end]) / h;
        // antiderivatives of the Hermite basis on [0, s]
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let i00 = s4 / 2.0 - s3 + s;
        let i10 = s4 / 4.0 - 2.0 * s3 / 3.0 + s2 / 2.0;
        let i01 = -s4 / 2.0 + s3;
        let i11 = s4 / 4.0 - s3 / 3.0;
        total
            + h * (i00 * self.y[i_end] + i10 * h * self.d[i_end] + i01 * self.y[i_end + 1] + i11 * h * self.d[i_end + 1])
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
}

// Three-point end slope with the usual shape-preserving limiter.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_stays_monotone() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| (t * 1.7).tanh()).collect();
        let c = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((c.eval(*xi) - yi).abs() < 1e-15);
        }
        let mut prev = c.eval(0.0);
        for k in 1..=300 {
            let v = c.eval(2.7 * k as f64 / 300.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let x: Vec<f64> = (0..7).map(|i| (i as f64).powf(1.3)).collect();
        let y: Vec<f64> = x.iter().map(|t| (-t).exp()).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        for &t in &[0.5f64, 2.2, 4.0, 9.0] {
            let q = crate::quadrature::integrate(|s| c.eval(s), 0.0, t, 1e-14, 1e-14).unwrap();
            assert!((c.integral_from_start(t) - q).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let x = vec![0.0, 0.4, 1.0, 1.9, 3.0];
        let y = vec![1.0, 0.8, 0.3, 0.1, 0.0];
        let c = MonotoneCubic::new(x, y).unwrap();
        for &t in &[0.1, 0.7, 1.5, 2.5] {
            let h = 1e-6;
            let fd = (c.eval(t + h) - c.eval(t - h)) / (2.0 * h);
            assert!((fd - c.deriv(t)).abs() < 1e-7);
        }
    }
}
