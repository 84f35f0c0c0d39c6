use std::sync::Arc;
use thiserror::Error;

/// Tolerances for adaptive integration. `max_subdivisions` caps the recursion
/// depth of the panel bisection, so the worst-case panel width is
/// `(b - a) / 2^max_subdivisions`.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 48,
        }
    }
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("integrand returned a non-finite value at t = {at}")]
    NonFinite { at: f64 },
    #[error("tolerance not reached within {0} subdivision levels")]
    MaxSubdivisions(u32),
    #[error("integration bounds must be finite, got [{0}, {1}]")]
    BadBounds(f64, f64),
}

/// Integral value together with an accumulated absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// Reversed bounds negate the result. The reported `error` is the sum of the
/// Richardson terms of all accepted panels and in practice bounds the true
/// error comfortably for smooth integrands.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature, QuadError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BadBounds(a, b));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
        });
    }
    if b < a {
        let q = integrate(f, b, a, cfg)?;
        return Ok(Quadrature {
            value: -q.value,
            error: q.error,
        });
    }
    let eval = |t: f64| -> Result<f64, QuadError> {
        let y = f(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: t })
        }
    };
    let m = 0.5 * (a + b);
    let fa = eval(a)?;
    let fm = eval(m)?;
    let fb = eval(b)?;
    let whole = simpson(a, b, fa, fm, fb);
    let tol = cfg
        .abs_tol
        .max(cfg.rel_tol * whole.abs())
        .max(f64::EPSILON * (b - a));
    let mut acc = Quadrature {
        value: 0.0,
        error: 0.0,
    };
    refine(
        &eval,
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            estimate: whole,
        },
        tol,
        cfg.max_subdivisions,
        &mut acc,
    )
    .map_err(|e| match e {
        RefineStop::Eval(e) => e,
        RefineStop::Depth => QuadError::MaxSubdivisions(cfg.max_subdivisions),
    })?;
    acc.error = acc.error.max(f64::EPSILON * acc.value.abs());
    Ok(acc)
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    estimate: f64,
}

enum RefineStop {
    Eval(QuadError),
    Depth,
}

fn refine<E>(eval: &E, p: Panel, tol: f64, depth: u32, acc: &mut Quadrature) -> Result<(), RefineStop>
where
    E: Fn(f64) -> Result<f64, QuadError>,
{
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(lm).map_err(RefineStop::Eval)?;
    let frm = eval(rm).map_err(RefineStop::Eval)?;
    let sl = simpson(p.a, m, p.fa, flm, p.fm);
    let sr = simpson(m, p.b, p.fm, frm, p.fb);
    let d = sl + sr - p.estimate;
    if d.abs() <= 15.0 * tol {
        acc.value += sl + sr + d / 15.0;
        acc.error += d.abs() / 15.0;
        return Ok(());
    }
    if depth == 0 {
        return Err(RefineStop::Depth);
    }
    let half_tol = 0.5 * tol;
    refine(
        eval,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            estimate: sl,
        },
        half_tol,
        depth - 1,
        acc,
    )?;
    refine(
        eval,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            estimate: sr,
        },
        half_tol,
        depth - 1,
        acc,
    )
}

/// Composite 5-point Gauss-Legendre rule over `panels` equal subintervals.
///
/// Nodes and weights are in closed form, so this needs no tables and serves
/// as an independent reference for the adaptive routine in tests.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let s1 = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let s2 = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let w0 = 128.0 / 225.0;
    let w1 = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let w2 = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    let nodes = [
        (0.0, w0),
        (s1, w1),
        (-s1, w1),
        (s2, w2),
        (-s2, w2),
    ];
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut panel = 0.0;
        for (x, w) in nodes {
            panel += w * f(mid + half * x);
        }
        total += panel * half;
    }
    total
}

/// Primitive function t -> integral of `integrand` from `baseline` to t,
/// backed by a table of knot values. Evaluation between knots integrates the
/// short remaining stretch adaptively, so accuracy does not depend on the
/// knot spacing.
#[derive(Clone)]
pub struct CumulativePrimitive {
    integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    baseline: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
    cfg: QuadratureConfig,
}

impl CumulativePrimitive {
    /// Tabulates the primitive on the hull of `range` and `baseline` with
    /// `knot_count` equally spaced knots (the baseline is always a knot).
    pub fn new(
        integrand: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        range: (f64, f64),
        baseline: f64,
        knot_count: usize,
        cfg: QuadratureConfig,
    ) -> Result<Self, QuadError> {
        if !range.0.is_finite() || !range.1.is_finite() || !baseline.is_finite() {
            return Err(QuadError::BadBounds(range.0, range.1));
        }
        let lo = range.0.min(range.1).min(baseline);
        let hi = range.0.max(range.1).max(baseline);
        let n = knot_count.max(2);
        let mut knots: Vec<f64> = if hi > lo {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        } else {
            vec![lo]
        };
        let pos = knots.partition_point(|&k| k < baseline);
        if pos == knots.len() || knots[pos] != baseline {
            knots.insert(pos, baseline);
        }
        let base_idx = knots.iter().position(|&k| k == baseline).expect("baseline knot");
        let mut values = vec![0.0; knots.len()];
        for i in base_idx + 1..knots.len() {
            let seg = integrate(&*integrand, knots[i - 1], knots[i], &cfg)?;
            values[i] = values[i - 1] + seg.value;
        }
        for i in (0..base_idx).rev() {
            let seg = integrate(&*integrand, knots[i], knots[i + 1], &cfg)?;
            values[i] = values[i + 1] - seg.value;
        }
        Ok(Self {
            integrand,
            baseline,
            knots,
            values,
            cfg,
        })
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Integral of the integrand from the baseline to `t`. Points outside the
    /// tabulated range are reached by integrating from the nearest end knot.
    pub fn eval(&self, t: f64) -> Result<f64, QuadError> {
        if !t.is_finite() {
            return Err(QuadError::NonFinite { at: t });
        }
        let idx = self.knots.partition_point(|&k| k <= t);
        let i = if idx == 0 { 0 } else { idx - 1 };
        if self.knots[i] == t {
            return Ok(self.values[i]);
        }
        let tail = integrate(&*self.integrand, self.knots[i], t, &self.cfg)?;
        Ok(self.values[i] + tail.value)
    }

    /// The integrand at `t`, i.e. the derivative of this primitive.
    pub fn integrand(&self, t: f64) -> f64 {
        (self.integrand)(t)
    }
}

impl std::fmt::Debug for CumulativePrimitive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CumulativePrimitive")
            .field("baseline", &self.baseline)
            .field("knots", &self.knots.len())
            .finish()
    }
}
