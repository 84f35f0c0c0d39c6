use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("state became non-finite at t = {t} (step {step})")]
    NonFinite { t: f64, step: usize },
    #[error("step count must be positive")]
    ZeroSteps,
}

/// Classical fixed-step fourth-order Runge-Kutta for a scalar ODE y' = f(t, y).
///
/// Returns the whole trajectory including the initial point. `t1 < t0` runs
/// the integration backwards. Used as an independent oracle against closed
/// form solutions, so it deliberately has no adaptivity to hide behind.
pub fn ode_rk4<F: Fn(f64, f64) -> f64>(
    f: F,
    t0: f64,
    y0: f64,
    t1: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>, OdeError> {
    if steps == 0 {
        return Err(OdeError::ZeroSteps);
    }
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((t0, y0));
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_next = t0 + (i + 1) as f64 * h;
        if !y.is_finite() {
            return Err(OdeError::NonFinite {
                t: t_next,
                step: i + 1,
            });
        }
        out.push((t_next, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rhs_stays_put() {
        let traj = ode_rk4(|_, _| 0.0, 0.0, 3.5, 1.0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        for (_, y) in traj {
            assert_eq!(y, 3.5);
        }
    }

    #[test]
    fn exponential_growth() {
        let traj = ode_rk4(|_, y| y, 0.0, 1.0, 1.0, 1000).unwrap();
        let (_, y_end) = *traj.last().unwrap();
        assert!((y_end - 1.0f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn backwards_integration() {
        let traj = ode_rk4(|_, y| y, 1.0, 1.0f64.exp(), 0.0, 1000).unwrap();
        let (_, y_end) = *traj.last().unwrap();
        assert!((y_end - 1.0).abs() < 1e-8);
    }

    #[test]
    fn measured_convergence_order_is_four() {
        // y' = cos(t) y, y(0) = 1, exact y = exp(sin t)
        let exact = |t: f64| t.sin().exp();
        let err = |steps: usize| -> f64 {
            let traj = ode_rk4(|t, y| t.cos() * y, 0.0, 1.0, 5.0, steps).unwrap();
            (traj.last().unwrap().1 - exact(5.0)).abs()
        };
        let e1 = err(40);
        let e2 = err(80);
        let order = (e1 / e2).log2();
        assert!(
            (3.8..=4.2).contains(&order),
            "measured order {order}, errors {e1:e} {e2:e}"
        );
    }

    #[test]
    fn blowup_is_an_error() {
        let res = ode_rk4(|_, y| y * y, 0.0, 1.0, 2.0, 100);
        assert!(matches!(res, Err(OdeError::NonFinite { .. })));
    }
}
