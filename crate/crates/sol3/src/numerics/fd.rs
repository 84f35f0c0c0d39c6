/// Stencil order for the central finite-difference helpers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

/// Central finite-difference first derivative of `f` at `t`.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, t: f64, h: f64, order: FdOrder) -> f64 {
    match order {
        FdOrder::Two => (f(t + h) - f(t - h)) / (2.0 * h),
        FdOrder::Four => {
            (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
        }
    }
}

/// Central finite-difference second derivative of `f` at `t`.
pub fn fd_second<F: Fn(f64) -> f64>(f: F, t: f64, h: f64, order: FdOrder) -> f64 {
    match order {
        FdOrder::Two => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
        FdOrder::Four => {
            (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h)
                - f(t - 2.0 * h))
                / (12.0 * h * h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let d = fd_derivative(|t| t * t, 1.0, 1e-5, FdOrder::Two);
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gudermannian_slope() {
        // d/du arcsin(tanh(2 u cos(theta))) = 2 cos(theta) / cosh(2 u cos(theta))
        let theta: f64 = 0.9;
        let c = theta.cos();
        let f = |u: f64| (2.0 * u * c).tanh().asin();
        for &u in &[-0.7, 0.0, 0.31, 1.2] {
            let d = fd_derivative(f, u, 1e-5, FdOrder::Two);
            let expected = 2.0 * c / (2.0 * u * c).cosh();
            assert!((d - expected).abs() < 1e-8, "u = {u}");
        }
    }

    #[test]
    fn order_four_beats_order_two_on_smooth_functions() {
        let h = 1e-2;
        for &t in &[0.3, 1.1, 2.0] {
            let e2 = (fd_derivative(f64::exp, t, h, FdOrder::Two) - t.exp()).abs();
            let e4 = (fd_derivative(f64::exp, t, h, FdOrder::Four) - t.exp()).abs();
            assert!(e4 < e2 / 100.0, "t = {t}: order4 {e4:e} vs order2 {e2:e}");
        }
    }

    #[test]
    fn second_derivative_stencils() {
        let f = |t: f64| (2.0 * t).sin();
        let exact = |t: f64| -4.0 * (2.0 * t).sin();
        let e2 = (fd_second(f, 0.4, 1e-4, FdOrder::Two) - exact(0.4)).abs();
        let e4 = (fd_second(f, 0.4, 1e-2, FdOrder::Four) - exact(0.4)).abs();
        assert!(e2 < 1e-6);
        assert!(e4 < 1e-8);
    }
}
