//! The generic constant-angle family: the group product of a profile curve
//! gamma1(v) with a fixed unit-speed curve gamma2(u).
//!
//! Data: a tilt angle theta in (0, pi/2), a phase psi0, two profile
//! functions zeta(v) (height of the v-curve) and xi(v) (its horizontal
//! speed), and a sign flag. Writing ubar = 2 u cos(theta) + psi0 and
//! C = cosh(ubar), the two curves are
//!
//! ```text
//! gamma1(v) = (sin t . P1(v),   s cos t . P2(v),   zeta(v))
//! gamma2(u) = (sin t . I(u),    s cos t . J(u),   -log(C)/2)
//! ```
//!
//! with P1 = int xi e^{-zeta}, P2 = int xi e^{zeta} (from v = 0), and
//! I = int sqrt(C), J = int C^{-3/2} (from the u where ubar = 0). The sign
//! flag s picks one of two congruent mirror branches; it equals the sign of
//! cos(alpha), where alpha is the second frame angle, sin(alpha) = tanh(ubar).
//!
//! Everything downstream is written against this parametrization: u is
//! arclength of gamma2, F_u is the unit direction E1, and F_v = a E1 + b E2
//! with the coefficients in [`GeneralFamily::coeffs_ab`].

use super::{AdaptedFrame, FamilyError, PRIMITIVE_KNOTS};
use crate::ambient::{group_mul, Point3, Sign};
use crate::numerics::{fd_derivative, CumulativePrimitive, FdOrder, QuadratureConfig};
use crate::smooth::SmoothFn;
use crate::surface::{normal, second_form_with_normal, Domain, Jet2, ParamSurface};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Parameters of the generic family.
#[derive(Debug, Clone)]
pub struct GeneralParams {
    /// tilt angle between the normal and e1, strictly inside (0, pi/2)
    pub theta: f64,
    /// phase in ubar = 2 u cos(theta) + psi0
    pub psi0: f64,
    /// height profile of the v-curve
    pub zeta: SmoothFn,
    /// horizontal speed profile of the v-curve
    pub xi: SmoothFn,
    /// mirror branch: the sign of cos(alpha)
    pub sign: Sign,
    pub domain: Domain,
}

struct Tables {
    /// int sqrt(cosh ubar) du, anchored where ubar = 0
    prim_i: CumulativePrimitive,
    /// int cosh(ubar)^{-3/2} du, anchored where ubar = 0
    prim_j: CumulativePrimitive,
    /// int xi e^{-zeta} dv, anchored at v = 0
    prim_p1: CumulativePrimitive,
    /// int xi e^{zeta} dv, anchored at v = 0
    prim_p2: CumulativePrimitive,
}

/// A member of the generic family with its quadrature tables built once.
/// Cloning shares the tables.
#[derive(Clone)]
pub struct GeneralFamily {
    params: GeneralParams,
    tables: Arc<Tables>,
}

/// Branch selector for the closed-form tangency coefficient ratio p = a/b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PBranch {
    /// p = s / (cos(theta) sinh(ubar)); the branch where the profile height
    /// is constant. Singular exactly at ubar = 0.
    Rational,
    /// p = s / (cos(theta) sinh(ubar) + cosh(ubar)^{3/2} / (Lambda(v) - I(u)))
    Full,
}

/// Residuals of the first-order structure equations at one point, evaluated
/// order-4 finite differences in u against geometric data where a second
/// route exists. All are zero (to FD accuracy) on an honest member.
#[derive(Debug, Clone, Copy)]
pub struct FieldResiduals {
    /// d(alpha)/du - 2 cos(t) cos(a)
    pub alpha_u: f64,
    /// E2(alpha) - sin(a) + sigma / sin(t), with sigma measured from the jet
    pub alpha_e2: f64,
    /// E1(sigma) + sigma cos(t) sin(a) + sigma^2 cot(t) - 2 sin(t) cos(t) sin^2(a)
    pub sigma_pde: f64,
    /// d(sigma)/du + cot(t) (sigma + 2 sin(a) sin(t)) (sigma - sin(a) sin(t))
    pub sigma_u: f64,
    /// dp/du + cos(a) + p cos(t) sin(a) + 2 p^2 cos^2(t) cos(a)
    pub p_u: f64,
    /// da/du + b cos(a)
    pub mix_a: f64,
    /// db/du - b sigma cot(t), with sigma measured from the jet
    pub mix_b: f64,
}

/// Values of the solution chain at one point. The sign flag is divided out
/// of q up front (the two branches are mirror-congruent), so the chain below
/// is branch independent and q equals b/a = 1/p on the positive branch.
#[derive(Debug, Clone, Copy)]
pub struct ChainPoint {
    /// s b / a
    pub q: f64,
    /// A = q - cos(theta) sinh(ubar); equals zeta' C / a
    pub cap_a: f64,
    /// B = A cosh(ubar)^{-3/2}; equals zeta' / (xi - zeta' I)
    pub cap_b: f64,
    /// Lambda = xi / zeta' where zeta' != 0
    pub lambda: Option<f64>,
}

/// Residuals of the three substitution steps that linearize the tangency
/// ratio, plus the reconstruction of p from the end of the chain.
#[derive(Debug, Clone, Copy)]
pub struct ChainResiduals {
    /// q_u - q^2 / C - q cos(t) tanh(ubar) - 2 cos^2(t) / C
    pub q_riccati: f64,
    /// A_u - 3 A cos(t) tanh(ubar) - A^2 / C
    pub a_sub: f64,
    /// B_u - B^2 sqrt(C)
    pub b_sub: f64,
    /// 1/B - (Lambda - I), defined when zeta' != 0 and B is not tiny
    pub lambda_link: Option<f64>,
    /// p rebuilt from B against a/b, when neither side is singular
    pub p_roundtrip: Option<f64>,
}

impl GeneralFamily {
    pub fn new(params: GeneralParams) -> Result<Self, FamilyError> {
        if !(params.theta > 0.0 && params.theta < FRAC_PI_2) {
            return Err(FamilyError::AngleOutOfRange(params.theta));
        }
        let ct = params.theta.cos();
        let u_star = -params.psi0 / (2.0 * ct);
        let cfg = QuadratureConfig::default();
        let prim_i = {
            let (ct, psi0) = (ct, params.psi0);
            CumulativePrimitive::new(
                Arc::new(move |t: f64| (2.0 * t * ct + psi0).cosh().sqrt()),
                params.domain.u,
                u_star,
                PRIMITIVE_KNOTS,
                cfg.clone(),
            )?
        };
        let prim_j = {
            let (ct, psi0) = (ct, params.psi0);
            CumulativePrimitive::new(
                Arc::new(move |t: f64| (2.0 * t * ct + psi0).cosh().powf(-1.5)),
                params.domain.u,
                u_star,
                PRIMITIVE_KNOTS,
                cfg.clone(),
            )?
        };
        let prim_p1 = {
            let (zeta, xi) = (params.zeta.clone(), params.xi.clone());
            CumulativePrimitive::new(
                Arc::new(move |t: f64| xi.value(t) * (-zeta.value(t)).exp()),
                params.domain.v,
                0.0,
                PRIMITIVE_KNOTS,
                cfg.clone(),
            )?
        };
        let prim_p2 = {
            let (zeta, xi) = (params.zeta.clone(), params.xi.clone());
            CumulativePrimitive::new(
                Arc::new(move |t: f64| xi.value(t) * zeta.value(t).exp()),
                params.domain.v,
                0.0,
                PRIMITIVE_KNOTS,
                cfg,
            )?
        };
        Ok(GeneralFamily {
            params,
            tables: Arc::new(Tables {
                prim_i,
                prim_j,
                prim_p1,
                prim_p2,
            }),
        })
    }

    pub fn params(&self) -> &GeneralParams {
        &self.params
    }

    /// ubar = 2 u cos(theta) + psi0
    pub fn ubar(&self, u: f64) -> f64 {
        2.0 * u * self.params.theta.cos() + self.params.psi0
    }

    /// (sin alpha, cos alpha) = (tanh(ubar), s / cosh(ubar)). The hyperbolic
    /// form keeps |sin| < 1 automatically; the other root branch (cotangent
    /// in place of tangent) would force |sin| > 1 and is never produced.
    pub fn alpha_sincos(&self, u: f64) -> (f64, f64) {
        let ub = self.ubar(u);
        (ub.tanh(), self.params.sign.as_f64() / ub.cosh())
    }

    /// The frame angle itself, continuous in u: arcsin(tanh ubar) on the
    /// positive branch, pi minus that on the negative one.
    pub fn alpha(&self, u: f64) -> f64 {
        let base = self.ubar(u).tanh().asin();
        match self.params.sign {
            Sign::Plus => base,
            Sign::Minus => PI - base,
        }
    }

    /// I(u) = int_{ubar=0}^{u} sqrt(cosh ubar)
    pub fn primitive_i(&self, u: f64) -> Result<f64, FamilyError> {
        Ok(self.tables.prim_i.eval(u)?)
    }

    /// J(u) = int_{ubar=0}^{u} cosh(ubar)^{-3/2}
    pub fn primitive_j(&self, u: f64) -> Result<f64, FamilyError> {
        Ok(self.tables.prim_j.eval(u)?)
    }

    /// The v-curve.
    pub fn gamma1(&self, v: f64) -> Result<Point3, FamilyError> {
        let p = &self.params;
        let (st, ct) = p.theta.sin_cos();
        let s = p.sign.as_f64();
        Ok(Point3::new(
            st * self.tables.prim_p1.eval(v)?,
            s * ct * self.tables.prim_p2.eval(v)?,
            p.zeta.value(v),
        ))
    }

    /// The fixed unit-speed u-curve.
    pub fn gamma2(&self, u: f64) -> Result<Point3, FamilyError> {
        let p = &self.params;
        let (st, ct) = p.theta.sin_cos();
        let s = p.sign.as_f64();
        Ok(Point3::new(
            st * self.primitive_i(u)?,
            s * ct * self.primitive_j(u)?,
            -0.5 * self.ubar(u).cosh().ln(),
        ))
    }

    /// Coordinate velocity of gamma2, in closed form. Its length in the
    /// ambient metric is identically 1.
    pub fn gamma2_deriv(&self, u: f64) -> [f64; 3] {
        let p = &self.params;
        let (st, ct) = p.theta.sin_cos();
        let s = p.sign.as_f64();
        let ub = self.ubar(u);
        let c = ub.cosh();
        [st * c.sqrt(), s * ct / (c * c.sqrt()), -ct * ub.tanh()]
    }

    /// The surface F(u, v) = gamma1(v) * gamma2(u) (group product), with all
    /// five partials supplied in closed form.
    pub fn surface(&self) -> ParamSurface {
        let map_fam = self.clone();
        let jet_fam = self.clone();
        ParamSurface::with_jets(
            move |u, v| match (map_fam.gamma1(v), map_fam.gamma2(u)) {
                (Ok(g1), Ok(g2)) => group_mul(&g1, &g2),
                _ => Point3::new(f64::NAN, f64::NAN, f64::NAN),
            },
            move |u, v| jet_fam.jet_at(u, v),
            self.params.domain,
        )
    }

    /// All partials at (u, v). Quadrature failures surface as NaN entries,
    /// which the jet consumers reject.
    fn jet_at(&self, u: f64, v: f64) -> Jet2 {
        let p = &self.params;
        let (st, ct) = p.theta.sin_cos();
        let s = p.sign.as_f64();
        let ub = self.ubar(u);
        let c = ub.cosh();
        let sh = ub.sinh();
        let th = ub.tanh();
        let sqc = c.sqrt();
        let z = p.zeta.value(v);
        let dz = p.zeta.deriv(v);
        let d2z = p.zeta.deriv2(v);
        let xi = p.xi.value(v);
        let dxi = p.xi.deriv(v);
        let emz = (-z).exp();
        let epz = z.exp();
        let big_i = self.tables.prim_i.eval(u).unwrap_or(f64::NAN);
        let big_j = self.tables.prim_j.eval(u).unwrap_or(f64::NAN);
        let p1 = self.tables.prim_p1.eval(v).unwrap_or(f64::NAN);
        let p2 = self.tables.prim_p2.eval(v).unwrap_or(f64::NAN);
        Jet2 {
            u,
            v,
            point: Point3::new(
                st * (p1 + emz * big_i),
                s * ct * (p2 + epz * big_j),
                z - 0.5 * c.ln(),
            ),
            fu: [st * emz * sqc, s * ct * epz / (c * sqc), -ct * th],
            fv: [
                st * emz * (xi - dz * big_i),
                s * ct * epz * (xi + dz * big_j),
                dz,
            ],
            fuu: [
                st * emz * ct * sh / sqc,
                -3.0 * s * ct * ct * epz * sh / (c * c * sqc),
                -2.0 * ct * ct / (c * c),
            ],
            fuv: [-dz * st * emz * sqc, s * ct * dz * epz / (c * sqc), 0.0],
            fvv: [
                st * emz * ((dz * dz - d2z) * big_i + dxi - dz * xi),
                s * ct * epz * ((d2z + dz * dz) * big_j + dxi + dz * xi),
                d2z,
            ],
        }
    }

    /// Components of F_v in the adapted tangent frame: F_v = a E1 + b E2,
    /// a = (xi - zeta' I) / sqrt(C), b = s (a cos(t) sinh(ubar) + zeta' C).
    pub fn coeffs_ab(&self, u: f64, v: f64) -> Result<(f64, f64), FamilyError> {
        let p = &self.params;
        let ct = p.theta.cos();
        let ub = self.ubar(u);
        let c = ub.cosh();
        let a = (p.xi.value(v) - p.zeta.deriv(v) * self.primitive_i(u)?) / c.sqrt();
        let b = p.sign.as_f64() * (a * ct * ub.sinh() + p.zeta.deriv(v) * c);
        Ok((a, b))
    }

    /// u-derivatives of a and b in closed form:
    /// a_u = -zeta' - a cos(t) tanh(ubar),
    /// b_u = s (zeta' cos(t) sinh(ubar) + a cos^2(t) (C^2 + 1) / C).
    pub fn coeffs_ab_du(&self, u: f64, v: f64) -> Result<(f64, f64), FamilyError> {
        let p = &self.params;
        let ct = p.theta.cos();
        let ub = self.ubar(u);
        let c = ub.cosh();
        let dz = p.zeta.deriv(v);
        let (a, _) = self.coeffs_ab(u, v)?;
        let a_u = -dz - a * ct * ub.tanh();
        let b_u = p.sign.as_f64() * (dz * ct * ub.sinh() + a * ct * ct * (c * c + 1.0) / c);
        Ok((a_u, b_u))
    }

    /// p = a / b.
    pub fn p_closed(&self, u: f64, v: f64) -> Result<f64, FamilyError> {
        let (a, b) = self.coeffs_ab(u, v)?;
        let p = a / b;
        if !p.is_finite() {
            return Err(FamilyError::SingularDenominator { u, v, what: "b" });
        }
        Ok(p)
    }

    /// sigma from the tangency ratio:
    /// sigma = sin(t) sin(a) + p sin(2t) cos(a).
    pub fn sigma_closed(&self, u: f64, v: f64) -> Result<f64, FamilyError> {
        let (st, ct) = self.params.theta.sin_cos();
        let (sa, ca) = self.alpha_sincos(u);
        Ok(st * sa + self.p_closed(u, v)? * 2.0 * st * ct * ca)
    }

    /// The closed-form tangency ratio on one of its two solution branches.
    /// For `Full` with `lambda: None` the profile link Lambda = xi / zeta'
    /// is used, which reproduces a/b exactly.
    pub fn p_solution(
        &self,
        branch: PBranch,
        lambda: Option<&SmoothFn>,
        u: f64,
        v: f64,
    ) -> Result<f64, FamilyError> {
        let p = &self.params;
        let ct = p.theta.cos();
        let ub = self.ubar(u);
        let denom = match branch {
            PBranch::Rational => ct * ub.sinh(),
            PBranch::Full => {
                let lam = match lambda {
                    Some(f) => f.value(v),
                    None => {
                        let dz = p.zeta.deriv(v);
                        if dz.abs() < 1e-14 {
                            return Err(FamilyError::SingularDenominator { u, v, what: "zeta'" });
                        }
                        p.xi.value(v) / dz
                    }
                };
                let gap = lam - self.primitive_i(u)?;
                if gap == 0.0 {
                    return Err(FamilyError::SingularDenominator {
                        u,
                        v,
                        what: "Lambda - I",
                    });
                }
                ct * ub.sinh() + ub.cosh().powf(1.5) / gap
            }
        };
        if denom == 0.0 || !denom.is_finite() {
            return Err(FamilyError::SingularDenominator {
                u,
                v,
                what: "p denominator",
            });
        }
        Ok(p.sign.as_f64() / denom)
    }

    /// The adapted frame at parameter u (it does not depend on v).
    pub fn adapted_frame(&self, u: f64) -> AdaptedFrame {
        AdaptedFrame::from_angles(self.params.theta, self.alpha(u))
    }

    /// sigma measured from the jet: the second fundamental form on (E2, E2)
    /// w.r.t. the normal oriented to agree with the adapted frame, which is
    /// sign(b) times the mesh normal. Independent route from [`Self::sigma_closed`].
    pub fn sigma_geometric(&self, u: f64, v: f64) -> Result<f64, FamilyError> {
        let val = self.sigma_geom_raw(u, v);
        if !val.is_finite() {
            return Err(FamilyError::SingularDenominator { u, v, what: "b" });
        }
        Ok(val)
    }

    fn sigma_geom_raw(&self, u: f64, v: f64) -> f64 {
        let jet = self.jet_at(u, v);
        if !jet.is_finite() {
            return f64::NAN;
        }
        let (a, b) = match self.coeffs_ab(u, v) {
            Ok(ab) => ab,
            Err(_) => return f64::NAN,
        };
        if b == 0.0 || !b.is_finite() {
            return f64::NAN;
        }
        let n = match normal(&jet) {
            Ok(n) => n.scale(b.signum()),
            Err(_) => return f64::NAN,
        };
        // E2 = (F_v - a F_u) / b, so its (u, v)-coordinates are (-a/b, 1/b)
        let ii = second_form_with_normal(&jet, &n);
        let cu = -a / b;
        let cv = 1.0 / b;
        ii.l * cu * cu + 2.0 * ii.m * cu * cv + ii.n * cv * cv
    }

    fn a_raw(&self, u: f64, v: f64) -> f64 {
        self.coeffs_ab(u, v).map(|(a, _)| a).unwrap_or(f64::NAN)
    }

    fn b_raw(&self, u: f64, v: f64) -> f64 {
        self.coeffs_ab(u, v).map(|(_, b)| b).unwrap_or(f64::NAN)
    }

    /// Residuals of the structure equations at (u, v), with u-derivatives
    /// taken by order-4 differences of step h. sigma enters through the jet
    /// (not its closed form), so these genuinely cross-check the geometry.
    pub fn field_residuals(&self, u: f64, v: f64, h: f64) -> Result<FieldResiduals, FamilyError> {
        let p = &self.params;
        let (st, ct) = p.theta.sin_cos();
        let cot = ct / st;
        let (sa, ca) = self.alpha_sincos(u);

        let alpha_du = fd_derivative(|t| self.alpha(t), u, h, FdOrder::Four);
        let sigma = self.sigma_geom_raw(u, v);
        let sigma_du = fd_derivative(|t| self.sigma_geom_raw(t, v), u, h, FdOrder::Four);
        let pval = self.a_raw(u, v) / self.b_raw(u, v);
        let p_du = fd_derivative(|t| self.a_raw(t, v) / self.b_raw(t, v), u, h, FdOrder::Four);
        let bval = self.b_raw(u, v);
        let a_du = fd_derivative(|t| self.a_raw(t, v), u, h, FdOrder::Four);
        let b_du = fd_derivative(|t| self.b_raw(t, v), u, h, FdOrder::Four);

        let res = FieldResiduals {
            alpha_u: alpha_du - 2.0 * ct * ca,
            // alpha depends on u alone, so E2(alpha) = -(a/b) alpha_u
            alpha_e2: -pval * alpha_du - sa + sigma / st,
            sigma_pde: sigma_du + sigma * ct * sa + sigma * sigma * cot - 2.0 * st * ct * sa * sa,
            sigma_u: sigma_du + cot * (sigma + 2.0 * sa * st) * (sigma - sa * st),
            p_u: p_du + ca + pval * ct * sa + 2.0 * pval * pval * ct * ct * ca,
            mix_a: a_du + bval * ca,
            mix_b: b_du - bval * sigma * cot,
        };
        let all = [
            res.alpha_u,
            res.alpha_e2,
            res.sigma_pde,
            res.sigma_u,
            res.p_u,
            res.mix_a,
            res.mix_b,
        ];
        if all.iter().any(|r| !r.is_finite()) {
            return Err(FamilyError::SingularDenominator {
                u,
                v,
                what: "field residual stencil",
            });
        }
        Ok(res)
    }

    /// The chain variables at (u, v). Errors when a = 0 (q undefined).
    pub fn chain_point(&self, u: f64, v: f64) -> Result<ChainPoint, FamilyError> {
        let (a, b) = self.coeffs_ab(u, v)?;
        let q = self.params.sign.as_f64() * b / a;
        if !q.is_finite() {
            return Err(FamilyError::SingularDenominator { u, v, what: "a" });
        }
        let ct = self.params.theta.cos();
        let ub = self.ubar(u);
        let c = ub.cosh();
        let cap_a = q - ct * ub.sinh();
        let cap_b = cap_a / (c * c.sqrt());
        let dz = self.params.zeta.deriv(v);
        let lambda = if dz.abs() > 1e-12 {
            Some(self.params.xi.value(v) / dz)
        } else {
            None
        };
        Ok(ChainPoint {
            q,
            cap_a,
            cap_b,
            lambda,
        })
    }

    /// Residuals of the substitution chain at (u, v), u-derivatives by
    /// order-4 differences of step h.
    pub fn chain_residuals(&self, u: f64, v: f64, h: f64) -> Result<ChainResiduals, FamilyError> {
        let ct = self.params.theta.cos();
        let s = self.params.sign.as_f64();
        let point = self.chain_point(u, v)?;
        let ub = self.ubar(u);
        let c = ub.cosh();
        let th = ub.tanh();

        let q_at = |t: f64| s * self.b_raw(t, v) / self.a_raw(t, v);
        let a_at = |t: f64| q_at(t) - ct * self.ubar(t).sinh();
        let b_at = |t: f64| {
            let cb = self.ubar(t).cosh();
            a_at(t) / (cb * cb.sqrt())
        };
        let q_du = fd_derivative(q_at, u, h, FdOrder::Four);
        let a_du = fd_derivative(a_at, u, h, FdOrder::Four);
        let b_du = fd_derivative(b_at, u, h, FdOrder::Four);

        let q_riccati = q_du - point.q * point.q / c - point.q * ct * th - 2.0 * ct * ct / c;
        let a_sub = a_du - 3.0 * point.cap_a * ct * th - point.cap_a * point.cap_a / c;
        let b_sub = b_du - point.cap_b * point.cap_b * c.sqrt();
        if !(q_riccati.is_finite() && a_sub.is_finite() && b_sub.is_finite()) {
            return Err(FamilyError::SingularDenominator {
                u,
                v,
                what: "chain stencil",
            });
        }

        let lambda_link = match point.lambda {
            Some(lam) if point.cap_b.abs() > 1e-12 => {
                Some(1.0 / point.cap_b - (lam - self.primitive_i(u)?))
            }
            _ => None,
        };

        let p_roundtrip = {
            let denom = ct * ub.sinh() + point.cap_b * c * c.sqrt();
            let rebuilt = s / denom;
            let direct = self.a_raw(u, v) / self.b_raw(u, v);
            if rebuilt.is_finite() && direct.is_finite() {
                Some(rebuilt - direct)
            } else {
                None
            }
        };

        Ok(ChainResiduals {
            q_riccati,
            a_sub,
            b_sub,
            lambda_link,
            p_roundtrip,
        })
    }
}
