//! Monotone cubic interpolation (Fritsch-Carlson), plus a log-log wrapper
//! for positive functions with power-law tails.

use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes.
/// Preserves monotonicity of the data between knots; no overshoot.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    /// if true, evaluation outside [x0, xn] extends linearly with the
    /// endpoint slope; otherwise it clamps to the endpoint value
    extrapolate: bool,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>, extrapolate: bool) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::InvalidParameter(
                "interpolation needs at least 3 matched knots".into(),
            ));
        }
        for i in 1..n {
            if !(x[i] > x[i - 1]) {
                return Err(Error::InvalidParameter(
                    "interpolation knots must be strictly increasing".into(),
                ));
            }
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "interpolation knots must be finite".into(),
            ));
        }

        let mut h = vec![0.0; n - 1];
        let mut d = vec![0.0; n - 1];
        for i in 0..n - 1 {
            h[i] = x[i + 1] - x[i];
            d[i] = (y[i + 1] - y[i]) / h[i];
        }

        let mut m = vec![0.0; n];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m[0] = edge_slope(h[0], h[1], d[0], d[1]);
        m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);

        Ok(Self { x, y, m, extrapolate })
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return if self.extrapolate {
                self.y[0] + self.m[0] * (xq - self.x[0])
            } else {
                self.y[0]
            };
        }
        if xq >= self.x[n - 1] {
            return if self.extrapolate {
                self.y[n - 1] + self.m[n - 1] * (xq - self.x[n - 1])
            } else {
                self.y[n - 1]
            };
        }
        // partition_point returns the first index with x > xq
        let j = self.x.partition_point(|&v| v <= xq) - 1;
        let h = self.x[j + 1] - self.x[j];
        let t = (xq - self.x[j]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[j] + h10 * h * self.m[j] + h01 * self.y[j + 1] + h11 * h * self.m[j + 1]
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }
}

/// Three-point one-sided slope with the usual monotonicity clamps.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        m = 0.0;
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        m = 3.0 * d0;
    }
    m
}

/// Interpolant of a positive function on a log-spaced grid, stored as
/// log y against log x. Outside the grid it extends the endpoint
/// log-log slope, which is exact for power-law tails.
#[derive(Debug, Clone)]
pub struct LogLogInterp {
    inner: Pchip,
}

impl LogLogInterp {
    /// `x` strictly increasing and positive; `y` strictly positive.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "log-log interpolation needs strictly positive finite values".into(),
            ));
        }
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter(
                "log-log interpolation needs positive abscissae".into(),
            ));
        }
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        Ok(Self {
            inner: Pchip::new(lx, ly, true)?,
        })
    }

    pub fn eval(&self, xq: f64) -> f64 {
        debug_assert!(xq > 0.0);
        self.inner.eval(xq.ln()).exp()
    }
}
