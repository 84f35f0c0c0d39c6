use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("need at least two sample points, got {0}")]
    TooFew(usize),
    #[error("abscissae and values must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("abscissae must be finite and strictly increasing")]
    BadAbscissae,
    #[error("sample values must be finite")]
    BadValues,
}

/// Shape-preserving C1 cubic interpolant (Fritsch-Carlson tangent limiting).
/// Monotone data produces a monotone interpolant. Outside the sample range
/// the curve continues linearly with the end tangent.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        if xs.len() != ys.len() {
            return Err(InterpError::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() < 2 {
            return Err(InterpError::TooFew(xs.len()));
        }
        if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(InterpError::BadAbscissae);
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(InterpError::BadValues);
        }
        let n = xs.len();
        let d: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut ms = vec![0.0; n];
        ms[0] = d[0];
        ms[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            ms[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                0.5 * (d[i - 1] + d[i])
            };
        }
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                ms[i] = 0.0;
                ms[i + 1] = 0.0;
                continue;
            }
            let a = ms[i] / d[i];
            let b = ms[i + 1] / d[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                ms[i] = tau * a * d[i];
                ms[i + 1] = tau * b * d[i];
            }
        }
        Ok(Self { xs, ys, ms })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn segment(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.clamp(1, self.xs.len() - 1) - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo {
            return self.ys[0] + self.ms[0] * (x - lo);
        }
        if x > hi {
            let n = self.xs.len() - 1;
            return self.ys[n] + self.ms[n] * (x - hi);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.ys[i] * h00 + h * self.ms[i] * h10 + self.ys[i + 1] * h01 + h * self.ms[i + 1] * h11
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo {
            return self.ms[0];
        }
        if x > hi {
            return *self.ms.last().unwrap();
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        self.ys[i] * d00 + self.ms[i] * d10 + self.ys[i + 1] * d01 + self.ms[i + 1] * d11
    }

    /// Second derivative of the interpolant (piecewise linear, discontinuous
    /// at the knots; zero outside the sample range).
    pub fn deriv2(&self, x: f64) -> f64 {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let s00 = (12.0 * t - 6.0) / (h * h);
        let s10 = (6.0 * t - 4.0) / h;
        let s01 = (-12.0 * t + 6.0) / (h * h);
        let s11 = (6.0 * t - 2.0) / h;
        self.ys[i] * s00 + self.ms[i] * s10 + self.ys[i + 1] * s01 + self.ms[i + 1] * s11
    }
}
