//! Parametrized surfaces in Sol3 and their differential invariants: the two
//! fundamental forms, shape operator, mean and Gauss curvature, and the angle
//! the normal makes with the distinguished horizontal direction e1.
//!
//! Curvature conventions. The Gauss curvature returned by
//! [`gauss_curvature`] is the intrinsic curvature of the induced metric,
//! computed through the structural identity
//!
//! ```text
//! K = K_amb(T Sigma) + det A
//! ```
//!
//! where K_amb is the ambient sectional curvature of the tangent plane and A
//! the shape operator. [`verify::brioschi_curvature`] recomputes K from the
//! first fundamental form alone and serves as an independent cross-check.

pub mod verify;

pub use verify::{
    brioschi_curvature, verify_surface, CheckResult, VerificationReport, VerifyOptions,
};

use crate::ambient::{
    christoffel_apply, frame_at, sectional, FrameVec, Point3, TangentVec,
};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("surface carries no analytic jets")]
    NoAnalyticJets,
    #[error("jet at ({u}, {v}) contains non-finite entries")]
    NonFiniteJet { u: f64, v: f64 },
    #[error("parametrization degenerates at ({u}, {v}): EG - F^2 = {det:e}")]
    Degenerate { u: f64, v: f64, det: f64 },
}

/// Full second-order data of the parametrization at one parameter point:
/// position and the five partial derivatives, in coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub u: f64,
    pub v: f64,
    pub point: Point3,
    pub fu: [f64; 3],
    pub fv: [f64; 3],
    pub fuu: [f64; 3],
    pub fuv: [f64; 3],
    pub fvv: [f64; 3],
}

impl Jet2 {
    pub fn is_finite(&self) -> bool {
        let p = self.point;
        [p.x, p.y, p.z].iter().all(|c| c.is_finite())
            && [self.fu, self.fv, self.fuu, self.fuv, self.fvv]
                .iter()
                .all(|d| d.iter().all(|c| c.is_finite()))
    }

    pub fn fu_frame(&self) -> FrameVec {
        TangentVec::new(self.point, self.fu[0], self.fu[1], self.fu[2]).to_frame()
    }

    pub fn fv_frame(&self) -> FrameVec {
        TangentVec::new(self.point, self.fv[0], self.fv[1], self.fv[2]).to_frame()
    }
}

/// How second-order data is obtained from a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetMode {
    /// Use the closed-form partials the surface was built with; error if absent.
    Analytic,
    /// Central differences of the position map, second order in `step`.
    Fd { step: f64 },
    /// Two second-order stencils at `step` and `step / 2`, extrapolated to
    /// fourth order. The default when nothing analytic is available.
    Richardson { step: f64 },
    /// Analytic when present, otherwise Richardson at a step chosen for
    /// mixed truncation/roundoff error.
    Auto,
}

impl Default for JetMode {
    fn default() -> Self {
        JetMode::Auto
    }
}

const RICHARDSON_DEFAULT_STEP: f64 = 1e-3;

type MapFn = Arc<dyn Fn(f64, f64) -> Point3 + Send + Sync>;
type JetFn = Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>;

/// Rectangle in parameter space: u and v ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Domain {
    pub fn new(u: (f64, f64), v: (f64, f64)) -> Self {
        Self { u, v }
    }

    /// Evenly spaced nu x nv grid covering the rectangle, corners included.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<(f64, f64)> {
        let nu = nu.max(2);
        let nv = nv.max(2);
        let mut pts = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let u = self.u.0 + (self.u.1 - self.u.0) * i as f64 / (nu - 1) as f64;
            for j in 0..nv {
                let v = self.v.0 + (self.v.1 - self.v.0) * j as f64 / (nv - 1) as f64;
                pts.push((u, v));
            }
        }
        pts
    }
}

/// A parametrized surface patch in Sol3. The position map is mandatory;
/// closed-form partial derivatives are optional and used when present.
#[derive(Clone)]
pub struct ParamSurface {
    map: MapFn,
    analytic: Option<JetFn>,
    domain: Domain,
}

impl std::fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSurface")
            .field("analytic", &self.analytic.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl ParamSurface {
    pub fn new(map: impl Fn(f64, f64) -> Point3 + Send + Sync + 'static, domain: Domain) -> Self {
        Self {
            map: Arc::new(map),
            analytic: None,
            domain,
        }
    }

    pub fn with_jets(
        map: impl Fn(f64, f64) -> Point3 + Send + Sync + 'static,
        jets: impl Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
        domain: Domain,
    ) -> Self {
        Self {
            map: Arc::new(map),
            analytic: Some(Arc::new(jets)),
            domain,
        }
    }

    pub fn map(&self, u: f64, v: f64) -> Point3 {
        (self.map)(u, v)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn has_analytic_jets(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn jet(&self, u: f64, v: f64, mode: JetMode) -> Result<Jet2, SurfaceError> {
        let jet = match mode {
            JetMode::Analytic => match &self.analytic {
                Some(j) => j(u, v),
                None => return Err(SurfaceError::NoAnalyticJets),
            },
            JetMode::Auto => match &self.analytic {
                Some(j) => j(u, v),
                None => self.fd_jet_richardson(u, v, RICHARDSON_DEFAULT_STEP),
            },
            JetMode::Fd { step } => self.fd_jet(u, v, step),
            JetMode::Richardson { step } => self.fd_jet_richardson(u, v, step),
        };
        if !jet.is_finite() {
            return Err(SurfaceError::NonFiniteJet { u, v });
        }
        Ok(jet)
    }

    /// Second-order central stencils on each coordinate of the map.
    fn fd_jet(&self, u: f64, v: f64, h: f64) -> Jet2 {
        let f = |du: f64, dv: f64| {
            let p = (self.map)(u + du, v + dv);
            [p.x, p.y, p.z]
        };
        let c = f(0.0, 0.0);
        let (up, um) = (f(h, 0.0), f(-h, 0.0));
        let (vp, vm) = (f(0.0, h), f(0.0, -h));
        let (pp, pm) = (f(h, h), f(h, -h));
        let (mp, mm) = (f(-h, h), f(-h, -h));
        let mut jet = Jet2 {
            u,
            v,
            point: Point3::new(c[0], c[1], c[2]),
            fu: [0.0; 3],
            fv: [0.0; 3],
            fuu: [0.0; 3],
            fuv: [0.0; 3],
            fvv: [0.0; 3],
        };
        for k in 0..3 {
            jet.fu[k] = (up[k] - um[k]) / (2.0 * h);
            jet.fv[k] = (vp[k] - vm[k]) / (2.0 * h);
            jet.fuu[k] = (up[k] - 2.0 * c[k] + um[k]) / (h * h);
            jet.fvv[k] = (vp[k] - 2.0 * c[k] + vm[k]) / (h * h);
            jet.fuv[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
        }
        jet
    }

    /// Richardson extrapolation of the second-order stencils: two evaluations
    /// at h and h/2 combine to a fourth-order result.
    fn fd_jet_richardson(&self, u: f64, v: f64, h: f64) -> Jet2 {
        let coarse = self.fd_jet(u, v, h);
        let fine = self.fd_jet(u, v, h / 2.0);
        let ext = |c: [f64; 3], f: [f64; 3]| {
            [
                (4.0 * f[0] - c[0]) / 3.0,
                (4.0 * f[1] - c[1]) / 3.0,
                (4.0 * f[2] - c[2]) / 3.0,
            ]
        };
        Jet2 {
            u,
            v,
            point: coarse.point,
            fu: ext(coarse.fu, fine.fu),
            fv: ext(coarse.fv, fine.fv),
            fuu: ext(coarse.fuu, fine.fuu),
            fuv: ext(coarse.fuv, fine.fuv),
            fvv: ext(coarse.fvv, fine.fvv),
        }
    }

    /// The same surface with the height coordinate perturbed by
    /// eps * sin(u). Closed-form jets are adjusted, not discarded.
    pub fn with_z_perturbation(&self, eps: f64) -> ParamSurface {
        let base_map = self.map.clone();
        let map = move |u: f64, v: f64| {
            let p = base_map(u, v);
            Point3::new(p.x, p.y, p.z + eps * u.sin())
        };
        let analytic = self.analytic.clone().map(|jets| {
            let jetfn = move |u: f64, v: f64| {
                let mut j = jets(u, v);
                j.point.z += eps * u.sin();
                j.fu[2] += eps * u.cos();
                j.fuu[2] -= eps * u.sin();
                j
            };
            Arc::new(jetfn) as JetFn
        });
        ParamSurface {
            map: Arc::new(map),
            analytic,
            domain: self.domain,
        }
    }
}

/// Coefficients of the induced metric E du^2 + 2F du dv + G dv^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl FirstForm {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

/// Coefficients of the second fundamental form L du^2 + 2M du dv + N dv^2
/// with respect to [`normal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondForm {
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

/// Shape operator in the (Fu, Fv) basis: rows and columns index that basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOperator(pub [[f64; 2]; 2]);

impl ShapeOperator {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

pub fn first_form(jet: &Jet2) -> FirstForm {
    let fu = jet.fu_frame();
    let fv = jet.fv_frame();
    FirstForm {
        e: fu.dot(&fu),
        f: fu.dot(&fv),
        g: fv.dot(&fv),
    }
}

fn check_nondegenerate(jet: &Jet2, i: &FirstForm) -> Result<(), SurfaceError> {
    // det / (E G) = sin^2 of the angle between Fu and Fv; reject collapsed
    // parallelograms and zero vectors alike
    if !(i.det() > 1e-12 * i.e * i.g) || i.det() == 0.0 {
        return Err(SurfaceError::Degenerate {
            u: jet.u,
            v: jet.v,
            det: i.det(),
        });
    }
    Ok(())
}

/// Unit normal in frame components, oriented so that (Fu, Fv, N) is a
/// positively oriented basis. The orthonormal frame is positively oriented
/// for the volume form dx ^ dy ^ dz, so the frame-component cross product is
/// the metric cross product.
pub fn normal(jet: &Jet2) -> Result<FrameVec, SurfaceError> {
    let i = first_form(jet);
    check_nondegenerate(jet, &i)?;
    let n = jet.fu_frame().cross(&jet.fv_frame());
    Ok(n.scale(1.0 / n.norm()))
}

/// Covariant derivative of Fu along Fu (and friends) in coordinate
/// components: second partials corrected by the connection.
fn covariant_second(jet: &Jet2) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let p = &jet.point;
    let corr_uu = christoffel_apply(p, jet.fu, jet.fu);
    let corr_uv = christoffel_apply(p, jet.fu, jet.fv);
    let corr_vv = christoffel_apply(p, jet.fv, jet.fv);
    let mut duu = [0.0; 3];
    let mut duv = [0.0; 3];
    let mut dvv = [0.0; 3];
    for k in 0..3 {
        duu[k] = jet.fuu[k] + corr_uu[k];
        duv[k] = jet.fuv[k] + corr_uv[k];
        dvv[k] = jet.fvv[k] + corr_vv[k];
    }
    (duu, duv, dvv)
}

pub fn second_form(jet: &Jet2) -> Result<SecondForm, SurfaceError> {
    let n = normal(jet)?;
    let p = jet.point;
    let (duu, duv, dvv) = covariant_second(jet);
    let to_frame = |d: [f64; 3]| TangentVec::new(p, d[0], d[1], d[2]).to_frame();
    Ok(SecondForm {
        l: to_frame(duu).dot(&n),
        m: to_frame(duv).dot(&n),
        n: to_frame(dvv).dot(&n),
    })
}

/// Shape operator A = I^{-1} II in the (Fu, Fv) basis.
pub fn shape_operator(jet: &Jet2) -> Result<ShapeOperator, SurfaceError> {
    let i = first_form(jet);
    check_nondegenerate(jet, &i)?;
    let ii = second_form(jet)?;
    let det = i.det();
    // I^{-1} = (1/det) [[G, -F], [-F, E]]
    let a11 = (i.g * ii.l - i.f * ii.m) / det;
    let a12 = (i.g * ii.m - i.f * ii.n) / det;
    let a21 = (i.e * ii.m - i.f * ii.l) / det;
    let a22 = (i.e * ii.n - i.f * ii.m) / det;
    Ok(ShapeOperator([[a11, a12], [a21, a22]]))
}

pub fn mean_curvature(jet: &Jet2) -> Result<f64, SurfaceError> {
    Ok(shape_operator(jet)?.trace() / 2.0)
}

/// Ambient sectional curvature of the tangent plane.
pub fn tangent_plane_sectional(jet: &Jet2) -> Result<f64, SurfaceError> {
    let i = first_form(jet);
    check_nondegenerate(jet, &i)?;
    sectional(&jet.fu_frame(), &jet.fv_frame()).map_err(|_| SurfaceError::Degenerate {
        u: jet.u,
        v: jet.v,
        det: i.det(),
    })
}

/// Intrinsic Gauss curvature of the induced metric, through the ambient
/// sectional curvature plus the shape-operator determinant.
pub fn gauss_curvature(jet: &Jet2) -> Result<f64, SurfaceError> {
    Ok(tangent_plane_sectional(jet)? + shape_operator(jet)?.det())
}

/// Cosine of the angle between the unit normal and the horizontal frame
/// direction e1. The families in [`crate::families`] keep this constant.
pub fn angle_cosine(jet: &Jet2) -> Result<f64, SurfaceError> {
    Ok(normal(jet)?.c1)
}

/// Projection of e1 onto the tangent plane, in frame components. Zero
/// exactly where the surface is orthogonal to e1.
pub fn tangential_e1(jet: &Jet2) -> Result<FrameVec, SurfaceError> {
    let n = normal(jet)?;
    let (e1, _, _) = frame_at(&jet.point);
    let e1f = e1.to_frame();
    Ok(e1f.sub(&n.scale(e1f.dot(&n))))
}

/// [`tangential_e1`] as a based tangent vector at the surface point.
pub fn tangent_projection(jet: &Jet2) -> Result<TangentVec, SurfaceError> {
    Ok(TangentVec::from_frame(jet.point, tangential_e1(jet)?))
}

/// Angle between the unit normal and e1: arccos of the clamped cosine.
/// Values lie in [0, pi); the antipodal orientation (cosine exactly -1)
/// reports 0, staying inside the half-open convention.
pub fn normal_angle(jet: &Jet2) -> Result<f64, SurfaceError> {
    let c = angle_cosine(jet)?.clamp(-1.0, 1.0);
    if c == -1.0 {
        return Ok(0.0);
    }
    Ok(c.acos())
}

/// Coordinates of a frame vector in the (Fu, Fv) tangent basis, through the
/// first-form Gram system. Only meaningful for vectors in the tangent plane;
/// a normal component is silently dropped.
pub fn tangent_coords(jet: &Jet2, x: &FrameVec) -> Result<[f64; 2], SurfaceError> {
    let i = first_form(jet);
    check_nondegenerate(jet, &i)?;
    let bu = x.dot(&jet.fu_frame());
    let bv = x.dot(&jet.fv_frame());
    let det = i.det();
    Ok([(i.g * bu - i.f * bv) / det, (i.e * bv - i.f * bu) / det])
}

/// Second fundamental form against an explicitly supplied unit normal.
/// [`second_form`] is the special case n = [`normal`]; passing the opposite
/// normal negates every coefficient.
pub fn second_form_with_normal(jet: &Jet2, n: &FrameVec) -> SecondForm {
    let p = jet.point;
    let (duu, duv, dvv) = covariant_second(jet);
    let to_frame = |d: [f64; 3]| TangentVec::new(p, d[0], d[1], d[2]).to_frame();
    SecondForm {
        l: to_frame(duu).dot(n),
        m: to_frame(duv).dot(n),
        n: to_frame(dvv).dot(n),
    }
}

/// h(x, y) against the supplied unit normal, for tangent frame vectors.
pub fn second_form_on(
    jet: &Jet2,
    x: &FrameVec,
    y: &FrameVec,
    n: &FrameVec,
) -> Result<f64, SurfaceError> {
    let cx = tangent_coords(jet, x)?;
    let cy = tangent_coords(jet, y)?;
    let ii = second_form_with_normal(jet, n);
    Ok(ii.l * cx[0] * cy[0] + ii.m * (cx[0] * cy[1] + cx[1] * cy[0]) + ii.n * cx[1] * cy[1])
}

/// A x for a tangent frame vector x, w.r.t. the oriented normal.
pub fn shape_apply(jet: &Jet2, x: &FrameVec) -> Result<FrameVec, SurfaceError> {
    let c = tangent_coords(jet, x)?;
    let a = shape_operator(jet)?;
    let out = [
        a.0[0][0] * c[0] + a.0[0][1] * c[1],
        a.0[1][0] * c[0] + a.0[1][1] * c[1],
    ];
    Ok(jet
        .fu_frame()
        .scale(out[0])
        .add(&jet.fv_frame().scale(out[1])))
}

/// Principal curvatures: eigenvalues of the shape operator, ascending.
/// Self-adjointness w.r.t. the first form keeps them real; a tiny negative
/// discriminant from roundoff is clamped to zero.
pub fn principal_curvatures(jet: &Jet2) -> Result<(f64, f64), SurfaceError> {
    let a = shape_operator(jet)?;
    let h = a.trace() / 2.0;
    let r = (h * h - a.det()).max(0.0).sqrt();
    Ok((h - r, h + r))
}
