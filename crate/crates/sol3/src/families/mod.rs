//! Constructors for the constant-angle surface families, the frame adapted
//! to them, and the pointwise classification data.
//!
//! Four families, by the angle theta between the unit normal and e1:
//!
//! - theta = 0: the vertical leaf x = x0 ([`leaf`]), totally geodesic;
//! - theta = pi/2: cylinders over a profile curve in the (y, z)-plane,
//!   ruled by x-lines ([`cylinder`]); the profile is the angle function
//!   alpha(u) of [`AlphaProfile`];
//! - theta strictly between, normal direction frozen along the surface:
//!   the exponential slant graph ([`slant`]), the only minimal surface
//!   among the tilted families;
//! - theta strictly between, generic: the two-curve product family in
//!   [`general`].

use crate::ambient::{FrameVec, Point3};
use crate::expr::{Expr, ParseError};
use crate::numerics::{CumulativePrimitive, InterpError, QuadError, QuadratureConfig};
use crate::smooth::SmoothFn;
use crate::surface::{mean_curvature, Domain, Jet2, JetMode, ParamSurface, SurfaceError};
use std::sync::Arc;
use thiserror::Error;

pub mod general;

pub use general::{ChainPoint, ChainResiduals, FieldResiduals, GeneralFamily, GeneralParams, PBranch};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("tilt angle must lie strictly between 0 and pi/2, got {0}")]
    AngleOutOfRange(f64),
    #[error("arccos profile is only defined on [-1, 1], u-range is [{0}, {1}]")]
    ProfileDomain(f64, f64),
    #[error("cannot parse '{0}' as a number")]
    BadNumber(String),
    #[error("profile expression: {0}")]
    ProfileParse(#[from] ParseError),
    #[error("profile table: {0}")]
    Interpolation(#[from] InterpError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("surface evaluation failed: {0}")]
    Surface(#[from] SurfaceError),
    #[error("denominator '{what}' vanishes at (u, v) = ({u}, {v})")]
    SingularDenominator { u: f64, v: f64, what: &'static str },
}

/// Knot count for the cumulative quadrature tables backing the family
/// constructors. Evaluation between knots re-integrates the short tail, so
/// this only tunes speed, not accuracy.
const PRIMITIVE_KNOTS: usize = 512;

/// Profile angle alpha(u) for the horizontal-normal cylinders: a handful of
/// named shapes, a parsed expression, or sampled data.
#[derive(Debug, Clone)]
pub enum AlphaProfile {
    /// alpha(s) = a0
    Constant(f64),
    /// alpha(s) = s
    Linear,
    /// alpha(s) = s^2
    Quadratic,
    /// alpha(s) = arccos(s), defined on s in [-1, 1]
    Arccos,
    /// alpha(s) = 2 arctan(e^{2s}); satisfies alpha' = 2 sin(alpha), which
    /// makes the two principal curvatures equal everywhere
    Umbilic,
    /// single-variable expression, differentiated symbolically
    Expression(Expr),
    /// samples (s_i, alpha_i) joined by a monotone cubic
    Table { s: Vec<f64>, alpha: Vec<f64> },
}

impl AlphaProfile {
    /// The profile with its two derivatives attached.
    pub fn smooth(&self) -> Result<SmoothFn, FamilyError> {
        Ok(match self {
            AlphaProfile::Constant(a0) => SmoothFn::constant(*a0),
            AlphaProfile::Linear => SmoothFn::linear(0.0, 1.0),
            AlphaProfile::Quadratic => SmoothFn::new(|s| s * s, |s| 2.0 * s, |_| 2.0),
            AlphaProfile::Arccos => SmoothFn::new(
                |s: f64| s.clamp(-1.0, 1.0).acos(),
                |s: f64| -1.0 / (1.0 - s * s).sqrt(),
                |s: f64| -s / (1.0 - s * s).powf(1.5),
            ),
            AlphaProfile::Umbilic => SmoothFn::new(
                |s: f64| 2.0 * (2.0 * s).exp().atan(),
                |s: f64| 2.0 / (2.0 * s).cosh(),
                |s: f64| -4.0 * (2.0 * s).tanh() / (2.0 * s).cosh(),
            ),
            AlphaProfile::Expression(e) => SmoothFn::from_expr(e),
            AlphaProfile::Table { s, alpha } => SmoothFn::from_table(s.clone(), alpha.clone())?,
        })
    }
}

impl std::str::FromStr for AlphaProfile {
    type Err = FamilyError;

    /// "linear" | "quadratic" | "arccos" | "umbilic" | "constant:<number>",
    /// anything else is parsed as an expression in one variable.
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("constant:") {
            let a0: f64 = rest
                .trim()
                .parse()
                .map_err(|_| FamilyError::BadNumber(rest.trim().to_string()))?;
            return Ok(AlphaProfile::Constant(a0));
        }
        Ok(match t {
            "linear" => AlphaProfile::Linear,
            "quadratic" => AlphaProfile::Quadratic,
            "arccos" => AlphaProfile::Arccos,
            "umbilic" => AlphaProfile::Umbilic,
            _ => AlphaProfile::Expression(crate::expr::parse(t)?),
        })
    }
}

/// The vertical leaf x = x0, parametrized by (y, z). Normal e1, angle 0,
/// totally geodesic, intrinsic curvature -1.
pub fn leaf(x0: f64, domain: Domain) -> ParamSurface {
    ParamSurface::with_jets(
        move |u, v| Point3::new(x0, u, v),
        move |u, v| Jet2 {
            u,
            v,
            point: Point3::new(x0, u, v),
            fu: [0.0, 1.0, 0.0],
            fv: [0.0, 0.0, 1.0],
            fuu: [0.0; 3],
            fuv: [0.0; 3],
            fvv: [0.0; 3],
        },
        domain,
    )
}

/// Cylinder (v, phi(u), chi(u)) over the curve u -> (0, phi(u), chi(u)),
/// ruled by x-lines; the normal stays horizontal, so the angle is pi/2.
///
/// chi' = cos(alpha) and phi' = sin(alpha) e^{chi}, both primitives anchored
/// to 0 at the left end of the u-range. Equivalently the surface is the
/// group product of v -> (v, 0, 0) with the profile curve.
pub fn cylinder(profile: &AlphaProfile, domain: Domain) -> Result<ParamSurface, FamilyError> {
    if matches!(profile, AlphaProfile::Arccos) && (domain.u.0 < -1.0 || domain.u.1 > 1.0) {
        return Err(FamilyError::ProfileDomain(domain.u.0, domain.u.1));
    }
    let alpha = profile.smooth()?;
    let base = domain.u.0;
    let cfg = QuadratureConfig::default();
    let chi = {
        let alpha = alpha.clone();
        CumulativePrimitive::new(
            Arc::new(move |t: f64| alpha.value(t).cos()),
            domain.u,
            base,
            PRIMITIVE_KNOTS,
            cfg.clone(),
        )?
    };
    let phi = {
        let alpha = alpha.clone();
        let chi = chi.clone();
        CumulativePrimitive::new(
            Arc::new(move |t: f64| {
                let height = chi.eval(t).unwrap_or(f64::NAN);
                alpha.value(t).sin() * height.exp()
            }),
            domain.u,
            base,
            PRIMITIVE_KNOTS,
            cfg,
        )?
    };
    let map = {
        let (chi, phi) = (chi.clone(), phi.clone());
        move |u: f64, v: f64| {
            Point3::new(
                v,
                phi.eval(u).unwrap_or(f64::NAN),
                chi.eval(u).unwrap_or(f64::NAN),
            )
        }
    };
    let jets = move |u: f64, v: f64| {
        let height = chi.eval(u).unwrap_or(f64::NAN);
        let swept = phi.eval(u).unwrap_or(f64::NAN);
        let (sa, ca) = alpha.value(u).sin_cos();
        let da = alpha.deriv(u);
        let ex = height.exp();
        Jet2 {
            u,
            v,
            point: Point3::new(v, swept, height),
            fu: [0.0, sa * ex, ca],
            fv: [1.0, 0.0, 0.0],
            fuu: [0.0, ex * ca * (da + sa), -da * sa],
            fuv: [0.0; 3],
            fvv: [0.0; 3],
        }
    };
    Ok(ParamSurface::with_jets(map, jets, domain))
}

/// Second principal curvature of a cylinder, along the profile direction,
/// w.r.t. the adapted normal (0, -cos alpha, sin alpha):
/// sigma = sin(alpha) - alpha'. The other principal curvature is -sin(alpha),
/// so the cylinder is minimal iff alpha' = 0 and umbilical iff alpha' = 2 sin(alpha).
pub fn cylinder_sigma(profile: &SmoothFn, u: f64) -> f64 {
    profile.value(u).sin() - profile.deriv(u)
}

/// The exponential slant graph
/// F(u, v) = (tan(theta) e^{u cos theta}, v, -u cos theta):
/// constant angle theta in (0, pi/2), minimal, intrinsic curvature
/// -cos^2(theta). u is arclength of the generating curve.
pub fn slant(theta: f64, domain: Domain) -> Result<ParamSurface, FamilyError> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(FamilyError::AngleOutOfRange(theta));
    }
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    Ok(ParamSurface::with_jets(
        move |u: f64, v: f64| Point3::new(tt * (u * ct).exp(), v, -u * ct),
        move |u: f64, v: f64| {
            let ex = (u * ct).exp();
            Jet2 {
                u,
                v,
                point: Point3::new(tt * ex, v, -u * ct),
                fu: [st * ex, 0.0, -ct],
                fv: [0.0, 1.0, 0.0],
                fuu: [st * ct * ex, 0.0, 0.0],
                fuv: [0.0; 3],
                fvv: [0.0; 3],
            }
        },
        domain,
    ))
}

/// Orthonormal frame adapted to a constant-angle surface: E1 spans the
/// tangent projection of e1, E2 completes the tangent basis, N is the
/// normal. (E1, E2, N) is positively oriented, like (e1, e2, e3).
#[derive(Debug, Clone, Copy)]
pub struct AdaptedFrame {
    pub theta: f64,
    pub alpha: f64,
    pub e1: FrameVec,
    pub e2: FrameVec,
    pub n: FrameVec,
}

impl AdaptedFrame {
    /// Assemble the frame from the two angles:
    ///
    /// ```text
    /// E1 = (sin t,  cos t cos a, -cos t sin a)
    /// E2 = (0,      sin a,        cos a)
    /// N  = (cos t, -sin t cos a,  sin t sin a)
    /// ```
    pub fn from_angles(theta: f64, alpha: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = alpha.sin_cos();
        AdaptedFrame {
            theta,
            alpha,
            e1: FrameVec::new(st, ct * ca, -ct * sa),
            e2: FrameVec::new(0.0, sa, ca),
            n: FrameVec::new(ct, -st * ca, st * sa),
        }
    }
}

/// Outcome of scanning |H| over a grid.
#[derive(Debug, Clone, Copy)]
pub struct MinimalVerdict {
    pub minimal: bool,
    pub max_abs_mean_curvature: f64,
}

/// Scan the mean curvature over a grid and report whether its largest
/// magnitude stays below `tol`. Among the constant-angle families this holds
/// exactly for the leaf, cylinders with constant profile, and the slant
/// graphs; the general family is never minimal.
pub fn classify_minimal(
    surface: &ParamSurface,
    grid: (usize, usize),
    tol: f64,
) -> Result<MinimalVerdict, SurfaceError> {
    let mut worst = 0.0_f64;
    for (u, v) in surface.domain().grid(grid.0, grid.1) {
        let jet = surface.jet(u, v, JetMode::Auto)?;
        worst = worst.max(mean_curvature(&jet)?.abs());
    }
    Ok(MinimalVerdict {
        minimal: worst <= tol,
        max_abs_mean_curvature: worst,
    })
}
