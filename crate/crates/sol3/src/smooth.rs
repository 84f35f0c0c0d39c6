//! A uniform handle for a scalar function of one variable carrying its first
//! and second derivatives. Profile functions reach the geometry through this
//! type whether they started as closures, parsed expressions, or tabulated
//! samples.

use crate::expr::Expr;
use crate::numerics::{InterpError, MonotoneCubic};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Scalar function with two derivatives. Expression-backed instances report
/// domain violations as NaN, which every numeric consumer (quadrature, ODE
/// stepping, verification) rejects loudly rather than propagating.
#[derive(Clone)]
pub struct SmoothFn {
    f: ScalarFn,
    df: ScalarFn,
    d2f: ScalarFn,
}

impl std::fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothFn").finish_non_exhaustive()
    }
}

impl SmoothFn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0, |_| 0.0)
    }

    /// t -> intercept + slope * t
    pub fn linear(intercept: f64, slope: f64) -> Self {
        Self::new(move |t| intercept + slope * t, move |_| slope, |_| 0.0)
    }

    /// Derivatives come from symbolic differentiation, not finite differences.
    pub fn from_expr(e: &Expr) -> Self {
        let d = e.diff();
        let d2 = d.diff();
        let (e, d) = (e.clone(), d);
        Self::new(
            move |t| e.eval(t).unwrap_or(f64::NAN),
            move |t| d.eval(t).unwrap_or(f64::NAN),
            move |t| d2.eval(t).unwrap_or(f64::NAN),
        )
    }

    /// Shape-preserving interpolant through the samples; derivatives are the
    /// interpolant's own (exact for the spline, approximate for the data).
    pub fn from_table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        let spline = MonotoneCubic::new(xs, ys)?;
        let s1 = spline.clone();
        let s2 = spline.clone();
        Ok(Self::new(
            move |t| spline.eval(t),
            move |t| s1.deriv(t),
            move |t| s2.deriv2(t),
        ))
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.df)(t)
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        (self.d2f)(t)
    }
}
