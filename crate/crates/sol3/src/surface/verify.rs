//! Grid verification of surface invariants, built around two independent
//! curvature computations: the structural route in [`super::gauss_curvature`]
//! (ambient sectional curvature plus shape-operator determinant, needs the
//! full 2-jet and the connection) and the Brioschi formula (intrinsic, needs
//! only the first fundamental form and its parameter derivatives). The two
//! share almost no code, so agreement on a grid is strong evidence both are
//! right.

use super::{
    angle_cosine, first_form, gauss_curvature, mean_curvature, normal, shape_apply,
    tangential_e1, Jet2, JetMode, ParamSurface, SurfaceError,
};
use crate::numerics::{fd_derivative, fd_second, FdOrder};

/// Intrinsic Gauss curvature at (u, v) from the first fundamental form
/// alone, by the Brioschi determinant formula. The form coefficients are
/// sampled through `mode` and differentiated in parameter space with
/// fourth-order stencils of width `step`.
pub fn brioschi_curvature(
    surface: &ParamSurface,
    u: f64,
    v: f64,
    step: f64,
    mode: JetMode,
) -> Result<f64, SurfaceError> {
    // sample the three coefficients anywhere in parameter space
    let form = |uu: f64, vv: f64| -> Result<(f64, f64, f64), SurfaceError> {
        let jet = surface.jet(uu, vv, mode)?;
        let i = first_form(&jet);
        Ok((i.e, i.f, i.g))
    };

    // validate once at the center; the stencil samples trust the map
    let (e0, f0, g0) = form(u, v)?;
    let det = e0 * g0 - f0 * f0;
    if !(det > 1e-12 * e0 * g0) {
        return Err(SurfaceError::Degenerate { u, v, det });
    }

    let fo = FdOrder::Four;
    let e_of_u = |t: f64| form(t, v).map(|x| x.0).unwrap_or(f64::NAN);
    let e_of_v = |t: f64| form(u, t).map(|x| x.0).unwrap_or(f64::NAN);
    let f_of_u = |t: f64| form(t, v).map(|x| x.1).unwrap_or(f64::NAN);
    let f_of_v = |t: f64| form(u, t).map(|x| x.1).unwrap_or(f64::NAN);
    let g_of_u = |t: f64| form(t, v).map(|x| x.2).unwrap_or(f64::NAN);
    let g_of_v = |t: f64| form(u, t).map(|x| x.2).unwrap_or(f64::NAN);

    let e_u = fd_derivative(e_of_u, u, step, fo);
    let e_v = fd_derivative(e_of_v, v, step, fo);
    let e_vv = fd_second(e_of_v, v, step, fo);
    let f_u = fd_derivative(f_of_u, u, step, fo);
    let f_v = fd_derivative(f_of_v, v, step, fo);
    let g_u = fd_derivative(g_of_u, u, step, fo);
    let g_v = fd_derivative(g_of_v, v, step, fo);
    let g_uu = fd_second(g_of_u, u, step, fo);

    // mixed derivative of F: Richardson-extrapolated cross stencil
    let cross = |h: f64| -> Result<f64, SurfaceError> {
        Ok(
            (form(u + h, v + h)?.1 - form(u + h, v - h)?.1 - form(u - h, v + h)?.1
                + form(u - h, v - h)?.1)
                / (4.0 * h * h),
        )
    };
    let f_uv = (16.0 * cross(step / 2.0)? - cross(step)?) / 15.0;

    let m1 = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, e0, f0],
        [0.5 * g_v, f0, g0],
    ];
    let m2 = [
        [0.0, 0.5 * e_v, 0.5 * g_u],
        [0.5 * e_v, e0, f0],
        [0.5 * g_u, f0, g0],
    ];
    let k = (det3(&m1) - det3(&m2)) / (det * det);
    if !k.is_finite() {
        return Err(SurfaceError::NonFiniteJet { u, v });
    }
    Ok(k)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Sample grid (points along u, points along v).
    pub grid: (usize, usize),
    pub jet_mode: JetMode,
    /// When set, the normal-angle check compares against this cosine;
    /// otherwise against the grid mean.
    pub expected_angle_cos: Option<f64>,
    /// When set, check the Gauss curvature against this constant.
    pub expected_gauss: Option<f64>,
    /// When set, check the mean curvature against this constant.
    pub expected_mean: Option<f64>,
    /// Tolerance for angle-constancy deviations.
    pub angle_tol: f64,
    /// Tolerance for the two-route curvature cross-check and the expected-
    /// value checks.
    pub curvature_tol: f64,
    /// Tolerance for the two consequences of a constant angle: the tangent
    /// projection of e1 has squared length sin^2(theta) and is a principal
    /// direction with eigenvalue -<N, e3>. Checked only when
    /// `expected_angle_cos` is set, since both presuppose constancy.
    pub projection_tol: f64,
    /// Parameter-space stencil width for the Brioschi route.
    pub brioschi_step: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid: (25, 25),
            jet_mode: JetMode::Auto,
            expected_angle_cos: None,
            expected_gauss: None,
            expected_mean: None,
            angle_tol: 1e-8,
            curvature_tol: 1e-5,
            projection_tol: 1e-8,
            brioschi_step: 1e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    /// Worst absolute deviation found on the grid.
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    /// Parameter point where the worst deviation occurred.
    pub worst_at: (f64, f64),
}

impl CheckResult {
    fn from_samples(name: &str, samples: &[(f64, (f64, f64))], tol: f64) -> Self {
        let first = samples.first().map_or((f64::NAN, f64::NAN), |s| s.1);
        let (worst, worst_at) = samples.iter().fold((0.0_f64, first), |acc, (d, at)| {
            if *d > acc.0 {
                (*d, *at)
            } else {
                acc
            }
        });
        CheckResult {
            name: name.to_string(),
            worst,
            tol,
            passed: worst <= tol,
            worst_at,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{}  {}: worst {:.3e} (tol {:.1e}) at ({:.4}, {:.4})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.worst,
                c.tol,
                c.worst_at.0,
                c.worst_at.1,
            )?;
        }
        Ok(())
    }
}

/// Run the verification battery over the surface's domain grid.
///
/// Always checked: jets are finite and nondegenerate, the normal angle is
/// constant, and the two curvature routes agree. When the surface carries
/// closed-form partials, they are also compared against finite differences
/// of the position map. Expected-value checks run when requested in the
/// options.
pub fn verify_surface(
    surface: &ParamSurface,
    opts: &VerifyOptions,
) -> Result<VerificationReport, SurfaceError> {
    let grid = surface.domain().grid(opts.grid.0, opts.grid.1);
    let mut checks = Vec::new();

    // gather jets once
    let mut jets: Vec<Jet2> = Vec::with_capacity(grid.len());
    for &(u, v) in &grid {
        jets.push(surface.jet(u, v, opts.jet_mode)?);
    }

    // normal-angle constancy
    let mut cosines = Vec::with_capacity(jets.len());
    for jet in &jets {
        cosines.push((angle_cosine(jet)?, (jet.u, jet.v)));
    }
    let reference = opts.expected_angle_cos.unwrap_or_else(|| {
        cosines.iter().map(|(c, _)| c).sum::<f64>() / cosines.len() as f64
    });
    let name = if opts.expected_angle_cos.is_some() {
        "normal angle matches expected"
    } else {
        "normal angle is constant"
    };
    let deviations: Vec<(f64, (f64, f64))> = cosines
        .iter()
        .map(|(c, at)| ((c - reference).abs(), *at))
        .collect();
    checks.push(CheckResult::from_samples(name, &deviations, opts.angle_tol));

    // a claimed constant angle forces the tangent projection T of e1 to have
    // squared length sin^2(theta) and to be a principal direction with
    // eigenvalue -<N, e3>; both identities are orientation-insensitive
    if let Some(cos_theta) = opts.expected_angle_cos {
        let sin_sq = 1.0 - cos_theta * cos_theta;
        let mut len_devs = Vec::with_capacity(jets.len());
        let mut prin_devs = Vec::with_capacity(jets.len());
        for jet in &jets {
            let t = tangential_e1(jet)?;
            len_devs.push(((t.dot(&t) - sin_sq).abs(), (jet.u, jet.v)));
            let n3 = normal(jet)?.c3;
            let residual = shape_apply(jet, &t)?.add(&t.scale(n3));
            prin_devs.push((residual.norm(), (jet.u, jet.v)));
        }
        checks.push(CheckResult::from_samples(
            "tangent projection of e1 has length sin(theta)",
            &len_devs,
            opts.projection_tol,
        ));
        checks.push(CheckResult::from_samples(
            "tangent projection of e1 is principal",
            &prin_devs,
            opts.projection_tol,
        ));
    }

    // two independent curvature routes agree
    let mut kdiffs = Vec::with_capacity(jets.len());
    for jet in &jets {
        let k_structural = gauss_curvature(jet)?;
        let k_intrinsic =
            brioschi_curvature(surface, jet.u, jet.v, opts.brioschi_step, opts.jet_mode)?;
        kdiffs.push(((k_structural - k_intrinsic).abs(), (jet.u, jet.v)));
    }
    checks.push(CheckResult::from_samples(
        "curvature routes agree",
        &kdiffs,
        opts.curvature_tol,
    ));

    if let Some(expected) = opts.expected_gauss {
        let devs: Vec<(f64, (f64, f64))> = jets
            .iter()
            .map(|jet| {
                gauss_curvature(jet).map(|k| ((k - expected).abs(), (jet.u, jet.v)))
            })
            .collect::<Result<_, _>>()?;
        checks.push(CheckResult::from_samples(
            "gauss curvature matches expected",
            &devs,
            opts.curvature_tol,
        ));
    }

    if let Some(expected) = opts.expected_mean {
        let devs: Vec<(f64, (f64, f64))> = jets
            .iter()
            .map(|jet| {
                mean_curvature(jet).map(|h| ((h - expected).abs(), (jet.u, jet.v)))
            })
            .collect::<Result<_, _>>()?;
        checks.push(CheckResult::from_samples(
            "mean curvature matches expected",
            &devs,
            opts.curvature_tol,
        ));
    }

    // closed-form partials against finite differences of the map
    if surface.has_analytic_jets() {
        let mut devs = Vec::with_capacity(grid.len());
        for &(u, v) in &grid {
            let a = surface.jet(u, v, JetMode::Analytic)?;
            let n = surface.jet(u, v, JetMode::Richardson { step: 1e-3 })?;
            let mut worst = 0.0_f64;
            for (da, dn) in [
                (a.fu, n.fu),
                (a.fv, n.fv),
                (a.fuu, n.fuu),
                (a.fuv, n.fuv),
                (a.fvv, n.fvv),
            ] {
                for k in 0..3 {
                    let scale = 1.0 + da[k].abs();
                    worst = worst.max((da[k] - dn[k]).abs() / scale);
                }
            }
            devs.push((worst, (u, v)));
        }
        checks.push(CheckResult::from_samples(
            "closed-form partials match finite differences",
            &devs,
            1e-6,
        ));
    }

    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Point3;
    use crate::surface::Domain;

    #[test]
    fn brioschi_on_flat_induced_metric() {
        // z = 0 plane: induced metric is dx^2 + dy^2, so K = 0
        let surf = ParamSurface::new(
            |u, v| Point3::new(u, v, 0.0),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        let k = brioschi_curvature(&surf, 0.2, -0.3, 1e-2, JetMode::Auto).unwrap();
        assert!(k.abs() < 1e-8, "K = {k}");
    }

    #[test]
    fn brioschi_on_hyperbolic_induced_metric() {
        // y = 0 plane parametrized by (x, z): induced metric e^{2v} du^2 + dv^2
        // has constant curvature -1
        let surf = ParamSurface::new(
            |u, v| Point3::new(u, 0.0, v),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        for (u, v) in [(0.0, 0.0), (0.7, -0.4), (-0.9, 0.8)] {
            let k = brioschi_curvature(&surf, u, v, 1e-2, JetMode::Auto).unwrap();
            assert!((k + 1.0).abs() < 1e-7, "K = {k} at ({u}, {v})");
        }
    }

    #[test]
    fn brioschi_agrees_with_structural_route_on_generic_graph() {
        // a bent graph with nothing constant anywhere
        let surf = ParamSurface::new(
            |u: f64, v: f64| Point3::new(u, v, 0.4 * (u + 0.3 * v).sin() + 0.2 * v * v),
            Domain::new((-0.8, 0.8), (-0.8, 0.8)),
        );
        for (u, v) in [(0.0, 0.0), (0.5, -0.5), (-0.6, 0.3), (0.44, 0.71)] {
            let jet = surf.jet(u, v, JetMode::Auto).unwrap();
            let k1 = gauss_curvature(&jet).unwrap();
            let k2 = brioschi_curvature(&surf, u, v, 1e-2, JetMode::Auto).unwrap();
            assert!((k1 - k2).abs() < 1e-5, "{k1} vs {k2} at ({u}, {v})");
        }
    }

    #[test]
    fn verify_passes_on_vertical_plane() {
        // totally geodesic, normal constantly -e2, K = -1, H = 0
        let surf = ParamSurface::new(
            |u, v| Point3::new(u, 0.0, v),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        let opts = VerifyOptions {
            grid: (9, 9),
            expected_angle_cos: Some(0.0),
            expected_gauss: Some(-1.0),
            expected_mean: Some(0.0),
            ..VerifyOptions::default()
        };
        let report = verify_surface(&surf, &opts).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 6);
    }

    #[test]
    fn verify_flags_wrong_expectations() {
        let surf = ParamSurface::new(
            |u, v| Point3::new(u, 0.0, v),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        let opts = VerifyOptions {
            grid: (5, 5),
            expected_gauss: Some(0.5),
            ..VerifyOptions::default()
        };
        let report = verify_surface(&surf, &opts).unwrap();
        assert!(!report.passed());
        let failing: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert_eq!(failing.len(), 1);
        assert!(failing[0].name.contains("gauss"));
        assert!((failing[0].worst - 1.5).abs() < 1e-6);
    }

    #[test]
    fn verify_flags_non_constant_angle() {
        // a graph whose normal wobbles
        let surf = ParamSurface::new(
            |u: f64, v: f64| Point3::new(u, v, 0.3 * u.sin()),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        let report = verify_surface(&surf, &VerifyOptions::default()).unwrap();
        let angle = &report.checks[0];
        assert!(!angle.passed, "angle check unexpectedly passed: {report}");
    }
}
