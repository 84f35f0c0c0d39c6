//! The ambient space: the solvable Lie group Sol3, realized on coordinates
//! (x, y, z) with the left-invariant metric
//!
//! ```text
//! g = e^{2z} dx^2 + e^{-2z} dy^2 + dz^2
//! ```
//!
//! and group law (x, y, z) * (x', y', z') = (x + e^{-z} x', y + e^{z} y', z + z').
//! The orthonormal left-invariant frame is
//!
//! ```text
//! e1 = e^{-z} d/dx,   e2 = e^{z} d/dy,   e3 = d/dz.
//! ```
//!
//! Everything downstream (surface calculus, the constant-angle families)
//! measures lengths and angles through this module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("tangent vectors are based at different points: {0:?} vs {1:?}")]
    MismatchedBase(Point3, Point3),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
}

/// A point of Sol3 in global exponential coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Components of a vector in the orthonormal frame {e1, e2, e3}. The metric
/// in these components is the Euclidean dot product, which is what makes the
/// frame worth carrying around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVec {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl FrameVec {
    pub const ZERO: FrameVec = FrameVec {
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
    };

    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn dot(&self, other: &FrameVec) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn cross(&self, other: &FrameVec) -> FrameVec {
        FrameVec {
            c1: self.c2 * other.c3 - self.c3 * other.c2,
            c2: self.c3 * other.c1 - self.c1 * other.c3,
            c3: self.c1 * other.c2 - self.c2 * other.c1,
        }
    }

    pub fn scale(&self, s: f64) -> FrameVec {
        FrameVec {
            c1: s * self.c1,
            c2: s * self.c2,
            c3: s * self.c3,
        }
    }

    pub fn add(&self, other: &FrameVec) -> FrameVec {
        FrameVec {
            c1: self.c1 + other.c1,
            c2: self.c2 + other.c2,
            c3: self.c3 + other.c3,
        }
    }

    pub fn sub(&self, other: &FrameVec) -> FrameVec {
        FrameVec {
            c1: self.c1 - other.c1,
            c2: self.c2 - other.c2,
            c3: self.c3 - other.c3,
        }
    }
}

/// A tangent vector with coordinate components (cx, cy, cz) at a base point.
/// All norms and inner products go through the metric at that base; there is
/// deliberately no operation mixing vectors at different points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVec {
    pub base: Point3,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl TangentVec {
    pub fn new(base: Point3, cx: f64, cy: f64, cz: f64) -> Self {
        Self { base, cx, cy, cz }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.cx, self.cy, self.cz]
    }

    /// Frame components at the base point: c1 = e^{z} cx, c2 = e^{-z} cy, c3 = cz.
    pub fn to_frame(&self) -> FrameVec {
        FrameVec {
            c1: self.base.z.exp() * self.cx,
            c2: (-self.base.z).exp() * self.cy,
            c3: self.cz,
        }
    }

    pub fn from_frame(base: Point3, f: FrameVec) -> Self {
        TangentVec {
            base,
            cx: (-base.z).exp() * f.c1,
            cy: base.z.exp() * f.c2,
            cz: f.c3,
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_frame().norm()
    }

    pub fn scale(&self, s: f64) -> TangentVec {
        TangentVec {
            base: self.base,
            cx: s * self.cx,
            cy: s * self.cy,
            cz: s * self.cz,
        }
    }

    pub fn add(&self, other: &TangentVec) -> Result<TangentVec, AmbientError> {
        if self.base != other.base {
            return Err(AmbientError::MismatchedBase(self.base, other.base));
        }
        Ok(TangentVec {
            base: self.base,
            cx: self.cx + other.cx,
            cy: self.cy + other.cy,
            cz: self.cz + other.cz,
        })
    }
}

/// Group multiplication p * q.
pub fn group_mul(p: &Point3, q: &Point3) -> Point3 {
    Point3 {
        x: p.x + (-p.z).exp() * q.x,
        y: p.y + p.z.exp() * q.y,
        z: p.z + q.z,
    }
}

/// Group inverse: p^{-1} = (-e^{z} x, -e^{-z} y, -z).
pub fn group_inverse(p: &Point3) -> Point3 {
    Point3 {
        x: -p.z.exp() * p.x,
        y: -(-p.z).exp() * p.y,
        z: -p.z,
    }
}

/// Metric tensor at p as a symmetric 3x3 matrix in coordinate basis order
/// (x, y, z): diag(e^{2z}, e^{-2z}, 1).
pub fn metric_at(p: &Point3) -> [[f64; 3]; 3] {
    let e2z = (2.0 * p.z).exp();
    [
        [e2z, 0.0, 0.0],
        [0.0, 1.0 / e2z, 0.0],
        [0.0, 0.0, 1.0],
    ]
}

/// Inner product of two tangent vectors; they must share a base point.
pub fn inner(u: &TangentVec, v: &TangentVec) -> Result<f64, AmbientError> {
    if u.base != v.base {
        return Err(AmbientError::MismatchedBase(u.base, v.base));
    }
    Ok(u.to_frame().dot(&v.to_frame()))
}

/// The orthonormal left-invariant frame (e1, e2, e3) at p, as tangent vectors.
pub fn frame_at(p: &Point3) -> (TangentVec, TangentVec, TangentVec) {
    let emz = (-p.z).exp();
    let epz = p.z.exp();
    (
        TangentVec::new(*p, emz, 0.0, 0.0),
        TangentVec::new(*p, 0.0, epz, 0.0),
        TangentVec::new(*p, 0.0, 0.0, 1.0),
    )
}

/// Index into the orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameAxis {
    E1,
    E2,
    E3,
}

impl FrameAxis {
    pub const ALL: [FrameAxis; 3] = [FrameAxis::E1, FrameAxis::E2, FrameAxis::E3];

    pub fn index(self) -> usize {
        match self {
            FrameAxis::E1 => 0,
            FrameAxis::E2 => 1,
            FrameAxis::E3 => 2,
        }
    }

    pub fn unit(self) -> FrameVec {
        match self {
            FrameAxis::E1 => FrameVec::new(1.0, 0.0, 0.0),
            FrameAxis::E2 => FrameVec::new(0.0, 1.0, 0.0),
            FrameAxis::E3 => FrameVec::new(0.0, 0.0, 1.0),
        }
    }
}

/// Covariant derivative table of the frame: nabla_{e_i} e_j, constant over
/// the whole group. The nonzero entries are
///
///   nabla_{e1} e1 = -e3,  nabla_{e1} e3 = e1,
///   nabla_{e2} e2 =  e3,  nabla_{e2} e3 = -e2,
///
/// and every derivative along e3 vanishes.
pub fn nabla_frame(i: FrameAxis, j: FrameAxis) -> FrameVec {
    use FrameAxis::*;
    match (i, j) {
        (E1, E1) => FrameVec::new(0.0, 0.0, -1.0),
        (E1, E3) => FrameVec::new(1.0, 0.0, 0.0),
        (E2, E2) => FrameVec::new(0.0, 0.0, 1.0),
        (E2, E3) => FrameVec::new(0.0, -1.0, 0.0),
        _ => FrameVec::ZERO,
    }
}

/// Christoffel symbols of the coordinate chart at p, indexed [k][i][j] for
/// Gamma^k_{ij} with coordinate order (x, y, z). Nonzero entries:
/// Gamma^x_{xz} = Gamma^x_{zx} = 1, Gamma^z_{xx} = -e^{2z},
/// Gamma^y_{yz} = Gamma^y_{zy} = -1, Gamma^z_{yy} = e^{-2z}.
pub fn christoffel(p: &Point3) -> [[[f64; 3]; 3]; 3] {
    let e2z = (2.0 * p.z).exp();
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][0][2] = 1.0;
    g[0][2][0] = 1.0;
    g[2][0][0] = -e2z;
    g[1][1][2] = -1.0;
    g[1][2][1] = -1.0;
    g[2][1][1] = 1.0 / e2z;
    g
}

/// Contraction Gamma^k_{ij} u^i v^j at p, returned as coordinate components.
pub fn christoffel_apply(p: &Point3, u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    let e2z = (2.0 * p.z).exp();
    [
        u[0] * v[2] + u[2] * v[0],
        -(u[1] * v[2] + u[2] * v[1]),
        -e2z * u[0] * v[0] + u[1] * v[1] / e2z,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// An element of the isometry group of Sol3 (identity component plus the
/// discrete part). Without the swap it acts as
///
/// ```text
/// (x, y, z) -> (sx e^{-c} x + a, sy e^{c} y + b, z + c)
/// ```
///
/// and with `swap` set it exchanges the roles of x and y while reflecting z:
///
/// ```text
/// (x, y, z) -> (sx e^{-c} y + a, sy e^{c} x + b, -z + c)
/// ```
///
/// The z-reflection in the swapped form is forced by the metric: it is what
/// makes the pullback land back on g (checked numerically in the tests).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryElem {
    pub swap: bool,
    pub sx: Sign,
    pub sy: Sign,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl IsometryElem {
    pub fn identity() -> Self {
        Self {
            swap: false,
            sx: Sign::Plus,
            sy: Sign::Plus,
            a: 0.0,
            b: 0.0,
            c: 0.0,
        }
    }

    /// Left translation by p as an isometry element.
    pub fn left_translation(p: &Point3) -> Self {
        Self {
            swap: false,
            sx: Sign::Plus,
            sy: Sign::Plus,
            a: p.x,
            b: p.y,
            c: p.z,
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        let emc = (-self.c).exp();
        let epc = self.c.exp();
        if self.swap {
            Point3 {
                x: self.sx.as_f64() * emc * p.y + self.a,
                y: self.sy.as_f64() * epc * p.x + self.b,
                z: -p.z + self.c,
            }
        } else {
            Point3 {
                x: self.sx.as_f64() * emc * p.x + self.a,
                y: self.sy.as_f64() * epc * p.y + self.b,
                z: p.z + self.c,
            }
        }
    }

    /// Jacobian of the action; constant over the group because the maps are
    /// affine in the coordinates.
    pub fn differential(&self) -> [[f64; 3]; 3] {
        let emc = (-self.c).exp();
        let epc = self.c.exp();
        if self.swap {
            [
                [0.0, self.sx.as_f64() * emc, 0.0],
                [self.sy.as_f64() * epc, 0.0, 0.0],
                [0.0, 0.0, -1.0],
            ]
        } else {
            [
                [self.sx.as_f64() * emc, 0.0, 0.0],
                [0.0, self.sy.as_f64() * epc, 0.0],
                [0.0, 0.0, 1.0],
            ]
        }
    }

    /// Pushforward of a tangent vector.
    pub fn push(&self, v: &TangentVec) -> TangentVec {
        let d = self.differential();
        let c = v.components();
        let mut out = [0.0; 3];
        for (r, row) in d.iter().enumerate() {
            out[r] = row[0] * c[0] + row[1] * c[1] + row[2] * c[2];
        }
        TangentVec::new(self.apply(&v.base), out[0], out[1], out[2])
    }

    /// Composition self after inner: (self.compose(&g)).apply(p) = self.apply(&g.apply(p)).
    /// How the outer map sees the inner one depends only on whether the outer
    /// map swaps; the resulting swap flag is the XOR of the two.
    pub fn compose(&self, inner: &IsometryElem) -> IsometryElem {
        let o = self;
        let g = inner;
        IsometryElem {
            swap: o.swap != g.swap,
            sx: o.sx.mul(if o.swap { g.sy } else { g.sx }),
            sy: o.sy.mul(if o.swap { g.sx } else { g.sy }),
            a: o.a + o.sx.as_f64() * (-o.c).exp() * (if o.swap { g.b } else { g.a }),
            b: o.b + o.sy.as_f64() * o.c.exp() * (if o.swap { g.a } else { g.b }),
            c: if o.swap { o.c - g.c } else { o.c + g.c },
        }
    }

    pub fn inverse(&self) -> IsometryElem {
        if !self.swap {
            // x -> sx e^{c}(x - a), z -> z - c
            IsometryElem {
                swap: false,
                sx: self.sx,
                sy: self.sy,
                a: -self.sx.as_f64() * self.c.exp() * self.a,
                b: -self.sy.as_f64() * (-self.c).exp() * self.b,
                c: -self.c,
            }
        } else {
            // inverse of a swap is a swap with the same c
            IsometryElem {
                swap: true,
                sx: self.sy,
                sy: self.sx,
                a: -self.sy.as_f64() * (-self.c).exp() * self.b,
                b: -self.sx.as_f64() * self.c.exp() * self.a,
                c: self.c,
            }
        }
    }
}

/// Apply an isometry to a point.
pub fn isometry_apply(g: &IsometryElem, p: &Point3) -> Point3 {
    g.apply(p)
}

/// The eight isometries fixing the origin: (x, y, z) -> (±x, ±y, z) and
/// (x, y, z) -> (±y, ±x, -z), a dihedral group of order 8.
pub fn isotropy_group() -> Vec<IsometryElem> {
    let mut out = Vec::with_capacity(8);
    for swap in [false, true] {
        for sx in [Sign::Plus, Sign::Minus] {
            for sy in [Sign::Plus, Sign::Minus] {
                out.push(IsometryElem {
                    swap,
                    sx,
                    sy,
                    a: 0.0,
                    b: 0.0,
                    c: 0.0,
                });
            }
        }
    }
    out
}

/// Curvature operator on frame components: R(x, y) w with
/// R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z.
/// The frame table is constant, so this is a fixed trilinear map. Kept
/// crate-internal: it exists to power the intrinsic-curvature cross-check,
/// not as a public feature.
pub(crate) fn curvature_op(x: &FrameVec, y: &FrameVec, w: &FrameVec) -> FrameVec {
    // nonzero components R(e_i,e_j)e_k in the frame, from the table above:
    //   R(e1,e2)e1 = -e2, R(e1,e2)e2 = e1
    //   R(e1,e3)e1 =  e3, R(e1,e3)e3 = -e1
    //   R(e2,e3)e2 =  e3, R(e2,e3)e3 = -e2
    let xi = [x.c1, x.c2, x.c3];
    let yi = [y.c1, y.c2, y.c3];
    let wi = [w.c1, w.c2, w.c3];
    // antisymmetrized coefficients of the bivector x ^ y
    let b12 = xi[0] * yi[1] - xi[1] * yi[0];
    let b13 = xi[0] * yi[2] - xi[2] * yi[0];
    let b23 = xi[1] * yi[2] - xi[2] * yi[1];
    let mut out = FrameVec::ZERO;
    // R(e1,e2): e1 -> -e2, e2 -> e1
    out.c2 += b12 * (-wi[0]);
    out.c1 += b12 * wi[1];
    // R(e1,e3): e1 -> e3, e3 -> -e1
    out.c3 += b13 * wi[0];
    out.c1 += b13 * (-wi[2]);
    // R(e2,e3): e2 -> e3, e3 -> -e2
    out.c3 += b23 * wi[1];
    out.c2 += b23 * (-wi[2]);
    out
}

/// Sectional curvature of the plane spanned by (not necessarily orthonormal)
/// frame vectors x, y.
pub(crate) fn sectional(x: &FrameVec, y: &FrameVec) -> Result<f64, AmbientError> {
    let rxyy = curvature_op(x, y, y);
    let num = rxyy.dot(x);
    let den = x.dot(x) * y.dot(y) - x.dot(y) * x.dot(y);
    if den <= 0.0 || !den.is_finite() {
        return Err(AmbientError::ZeroVector);
    }
    Ok(num / den)
}

/// Small deterministic generator (splitmix64). Used for the random-sample
/// battery below and for test points; not a public RNG.
pub(crate) struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn point(&mut self, span: f64) -> Point3 {
        Point3::new(
            self.uniform(-span, span),
            self.uniform(-span, span),
            self.uniform(-span, span),
        )
    }
}

/// One named residual from the random-sample battery.
#[derive(Debug, Clone)]
pub struct AmbientCheck {
    pub name: &'static str,
    /// Worst absolute deviation over all samples.
    pub worst: f64,
}

/// Deterministic random-sample battery over the group axioms, the
/// left-invariant frame, both connection tables, and the isometry action.
/// Returns the worst deviation per named check; on a correct implementation
/// every value sits at machine-precision scale, far under 1e-10.
pub fn invariant_battery(samples: usize, seed: u64) -> Vec<AmbientCheck> {
    let mut rng = SplitMix64(seed);
    let mut assoc: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let mut translation: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    let mut frame_table: f64 = 0.0;
    let mut isotropy: f64 = 0.0;

    let isotropy_elems = isotropy_group();
    for _ in 0..samples {
        let p = rng.point(1.5);
        let q = rng.point(1.5);
        let r = rng.point(1.5);

        let lhs = group_mul(&group_mul(&p, &q), &r);
        let rhs = group_mul(&p, &group_mul(&q, &r));
        for k in 0..3 {
            assoc = assoc.max((lhs.coords()[k] - rhs.coords()[k]).abs());
        }

        let e = group_mul(&p, &group_inverse(&p));
        for k in 0..3 {
            inverse = inverse.max(e.coords()[k].abs());
        }

        let u = TangentVec::new(
            p,
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
        );
        let v = TangentVec::new(
            p,
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
        );
        let before = u.to_frame().dot(&v.to_frame());

        let l = IsometryElem::left_translation(&q);
        let after = l.push(&u).to_frame().dot(&l.push(&v).to_frame());
        translation = translation.max((before - after).abs());

        let g = &isotropy_elems[(rng.next_u64() % 8) as usize];
        let after = g.push(&u).to_frame().dot(&g.push(&v).to_frame());
        isotropy = isotropy.max((before - after).abs());

        // closed-form contraction against the full symbol table
        let a = u.components();
        let b = v.components();
        let fast = christoffel_apply(&p, a, b);
        let gamma = christoffel(&p);
        for k in 0..3 {
            let mut slow = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    slow += gamma[k][i][j] * a[i] * b[j];
                }
            }
            contraction = contraction.max((fast[k] - slow).abs());
        }

        // the constant frame table nabla_{e_i} e_j must match the coordinate
        // formula (nabla_u V)^k = u^l d_l V^k + Gamma^k_{lm} u^l V^m applied
        // to the frame fields, whose components depend on z alone
        let emz = (-p.z).exp();
        let epz = p.z.exp();
        let fields = [[emz, 0.0, 0.0], [0.0, epz, 0.0], [0.0, 0.0, 1.0]];
        let dz_fields = [[-emz, 0.0, 0.0], [0.0, epz, 0.0], [0.0, 0.0, 0.0]];
        for i in FrameAxis::ALL {
            for j in FrameAxis::ALL {
                let dir = fields[i.index()];
                let val = fields[j.index()];
                let gm = christoffel_apply(&p, dir, val);
                let want =
                    TangentVec::from_frame(p, nabla_frame(i, j)).components();
                for k in 0..3 {
                    let got = dir[2] * dz_fields[j.index()][k] + gm[k];
                    frame_table = frame_table.max((got - want[k]).abs());
                }
            }
        }
    }

    vec![
        AmbientCheck {
            name: "group product is associative",
            worst: assoc,
        },
        AmbientCheck {
            name: "inverse lands on the identity",
            worst: inverse,
        },
        AmbientCheck {
            name: "left translation preserves inner products",
            worst: translation,
        },
        AmbientCheck {
            name: "symbol contraction matches the full table",
            worst: contraction,
        },
        AmbientCheck {
            name: "frame derivatives match the coordinate symbols",
            worst: frame_table,
        },
        AmbientCheck {
            name: "origin-fixing isometries preserve inner products",
            worst: isotropy,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fd_derivative, FdOrder};

    const E: f64 = std::f64::consts::E;

    #[test]
    fn identity_element() {
        let p = Point3::new(0.3, -1.2, 0.7);
        assert_eq!(group_mul(&Point3::ORIGIN, &p), p);
        assert_eq!(group_mul(&p, &Point3::ORIGIN), p);
    }

    #[test]
    fn product_with_height_shift() {
        let p = Point3::new(0.0, 0.0, 1.0);
        let q = Point3::new(1.0, 1.0, 0.0);
        let r = group_mul(&p, &q);
        assert!((r.x - (-1.0f64).exp()).abs() < 1e-15);
        assert!((r.y - E).abs() < 1e-15);
        assert!((r.z - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverses() {
        assert_eq!(group_inverse(&Point3::ORIGIN), Point3::ORIGIN);
        let i = group_inverse(&Point3::new(1.0, 0.0, 0.0));
        assert_eq!(i, Point3::new(-1.0, 0.0, 0.0));
        let j = group_inverse(&Point3::new(1.0, 1.0, 1.0));
        assert!((j.x + E).abs() < 1e-15);
        assert!((j.y + 1.0 / E).abs() < 1e-15);
        assert!((j.z + 1.0).abs() < 1e-15);
        let mut rng = SplitMix64(7);
        for _ in 0..50 {
            let p = rng.point(1.5);
            let e = group_mul(&p, &group_inverse(&p));
            assert!(e.x.abs() < 1e-13 && e.y.abs() < 1e-13 && e.z.abs() < 1e-13);
            let e2 = group_mul(&group_inverse(&p), &p);
            assert!(e2.x.abs() < 1e-13 && e2.y.abs() < 1e-13 && e2.z.abs() < 1e-13);
        }
    }

    #[test]
    fn associativity() {
        let mut rng = SplitMix64(11);
        for _ in 0..100 {
            let (p, q, r) = (rng.point(1.5), rng.point(1.5), rng.point(1.5));
            let lhs = group_mul(&group_mul(&p, &q), &r);
            let rhs = group_mul(&p, &group_mul(&q, &r));
            assert!((lhs.x - rhs.x).abs() < 1e-12);
            assert!((lhs.y - rhs.y).abs() < 1e-12);
            assert!((lhs.z - rhs.z).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_values() {
        let g0 = metric_at(&Point3::ORIGIN);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g0[i][j], want);
            }
        }
        let g1 = metric_at(&Point3::new(0.0, 0.0, 1.0));
        assert!((g1[0][0] - (2.0f64).exp()).abs() < 1e-15);
        assert!((g1[1][1] - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(g1[2][2], 1.0);
        let gm = metric_at(&Point3::new(3.0, -4.0, -1.0));
        assert!((gm[0][0] - (-2.0f64).exp()).abs() < 1e-15);
        assert!((gm[1][1] - (2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn inner_products_and_base_mismatch() {
        let p = Point3::ORIGIN;
        let dx = TangentVec::new(p, 1.0, 0.0, 0.0);
        assert_eq!(inner(&dx, &dx).unwrap(), 1.0);
        let q = Point3::new(0.0, 0.0, 1.0);
        let dxq = TangentVec::new(q, 1.0, 0.0, 0.0);
        assert!(matches!(
            inner(&dx, &dxq),
            Err(AmbientError::MismatchedBase(_, _))
        ));
        let mut rng = SplitMix64(23);
        for _ in 0..50 {
            let p = rng.point(2.0);
            let (e1, e2, e3) = frame_at(&p);
            assert!((inner(&e1, &e1).unwrap() - 1.0).abs() < 1e-13);
            assert!((inner(&e2, &e2).unwrap() - 1.0).abs() < 1e-13);
            assert!((inner(&e3, &e3).unwrap() - 1.0).abs() < 1e-13);
            assert!(inner(&e1, &e2).unwrap().abs() < 1e-13);
            assert!(inner(&e1, &e3).unwrap().abs() < 1e-13);
            assert!(inner(&e2, &e3).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn frame_components() {
        let (e1, e2, e3) = frame_at(&Point3::ORIGIN);
        assert_eq!(e1.components(), [1.0, 0.0, 0.0]);
        assert_eq!(e2.components(), [0.0, 1.0, 0.0]);
        assert_eq!(e3.components(), [0.0, 0.0, 1.0]);
        let (e1, _, _) = frame_at(&Point3::new(5.0, 7.0, 1.0));
        assert!((e1.cx - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn frame_is_left_invariant() {
        // the differential of L_p maps the frame at the origin to the frame
        // at p; L_p is affine in q, so central differences are exact
        let mut rng = SplitMix64(31);
        for _ in 0..20 {
            let p = rng.point(1.5);
            let l = IsometryElem::left_translation(&p);
            let (f1, f2, f3) = frame_at(&Point3::ORIGIN);
            let (g1, g2, g3) = frame_at(&p);
            for (v0, vp) in [(f1, g1), (f2, g2), (f3, g3)] {
                let pushed = push_numeric(&l, &v0);
                for k in 0..3 {
                    assert!(
                        (pushed[k] - vp.components()[k]).abs() < 1e-10,
                        "component {k}"
                    );
                }
            }
        }
    }

    /// Numeric-Jacobian pushforward. The isometries are affine in each
    /// coordinate, so a wide central difference has no truncation error.
    fn push_numeric(g: &IsometryElem, v: &TangentVec) -> [f64; 3] {
        let h = 0.25;
        let p = v.base;
        let c = v.components();
        let mut out = [0.0; 3];
        for (j, cj) in c.iter().enumerate() {
            if *cj == 0.0 {
                continue;
            }
            let mut plus = p;
            let mut minus = p;
            match j {
                0 => {
                    plus.x += h;
                    minus.x -= h;
                }
                1 => {
                    plus.y += h;
                    minus.y -= h;
                }
                _ => {
                    plus.z += h;
                    minus.z -= h;
                }
            }
            let fp = g.apply(&plus);
            let fm = g.apply(&minus);
            out[0] += cj * (fp.x - fm.x) / (2.0 * h);
            out[1] += cj * (fp.y - fm.y) / (2.0 * h);
            out[2] += cj * (fp.z - fm.z) / (2.0 * h);
        }
        out
    }

    #[test]
    fn connection_table() {
        use FrameAxis::*;
        assert_eq!(nabla_frame(E1, E1), FrameVec::new(0.0, 0.0, -1.0));
        assert_eq!(nabla_frame(E1, E2), FrameVec::ZERO);
        assert_eq!(nabla_frame(E1, E3), FrameVec::new(1.0, 0.0, 0.0));
        assert_eq!(nabla_frame(E2, E2), FrameVec::new(0.0, 0.0, 1.0));
        assert_eq!(nabla_frame(E2, E3), FrameVec::new(0.0, -1.0, 0.0));
        for j in FrameAxis::ALL {
            assert_eq!(nabla_frame(E3, j), FrameVec::ZERO);
        }
    }

    #[test]
    fn christoffel_at_origin() {
        let g = christoffel(&Point3::ORIGIN);
        assert_eq!(g[2][0][0], -1.0); // Gamma^z_xx at z = 0
        assert_eq!(g[0][0][2], 1.0);
        assert_eq!(g[0][2][0], 1.0);
        assert_eq!(g[1][1][2], -1.0);
        assert_eq!(g[2][1][1], 1.0);
    }

    #[test]
    fn christoffel_matches_metric_derivatives() {
        // Gamma^k_{ij} = (1/2) g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}),
        // with the metric derivatives taken by order-4 finite differences
        let mut rng = SplitMix64(41);
        for _ in 0..12 {
            let p = rng.point(1.0);
            let h = 1e-3;
            let mut dg = [[[0.0; 3]; 3]; 3]; // dg[l][i][j] = d_l g_ij
            for l in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        dg[l][i][j] = fd_derivative(
                            |t| {
                                let mut q = p;
                                match l {
                                    0 => q.x = t,
                                    1 => q.y = t,
                                    _ => q.z = t,
                                }
                                metric_at(&q)[i][j]
                            },
                            [p.x, p.y, p.z][l],
                            h,
                            FdOrder::Four,
                        );
                    }
                }
            }
            let g = metric_at(&p);
            let ginv = [
                [1.0 / g[0][0], 0.0, 0.0],
                [0.0, 1.0 / g[1][1], 0.0],
                [0.0, 0.0, 1.0],
            ];
            let gamma = christoffel(&p);
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut want = 0.0;
                        for l in 0..3 {
                            want += 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                        }
                        assert!(
                            (gamma[k][i][j] - want).abs() < 1e-9,
                            "Gamma^{k}_{i}{j} at {p:?}: {} vs {}",
                            gamma[k][i][j],
                            want
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn connection_is_metric_compatible() {
        // d_k g_ij = Gamma^l_{ki} g_lj + Gamma^l_{kj} g_il
        let mut rng = SplitMix64(43);
        for _ in 0..12 {
            let p = rng.point(1.0);
            let g = metric_at(&p);
            let gamma = christoffel(&p);
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let dg = fd_derivative(
                            |t| {
                                let mut q = p;
                                match k {
                                    0 => q.x = t,
                                    1 => q.y = t,
                                    _ => q.z = t,
                                }
                                metric_at(&q)[i][j]
                            },
                            [p.x, p.y, p.z][k],
                            1e-3,
                            FdOrder::Four,
                        );
                        let mut rhs = 0.0;
                        for l in 0..3 {
                            rhs += gamma[l][k][i] * g[l][j] + gamma[l][k][j] * g[i][l];
                        }
                        assert!((dg - rhs).abs() < 1e-10, "k={k} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_apply_agrees_with_table() {
        let mut rng = SplitMix64(47);
        for _ in 0..20 {
            let p = rng.point(1.2);
            let u = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let v = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let fast = christoffel_apply(&p, u, v);
            let gamma = christoffel(&p);
            for k in 0..3 {
                let mut slow = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        slow += gamma[k][i][j] * u[i] * v[j];
                    }
                }
                assert!((fast[k] - slow).abs() < 1e-13);
            }
        }
    }

    /// Pullback of the metric under g, via the analytic differential, must
    /// reproduce the metric: J^T g(f(p)) J = g(p).
    fn pullback_residual(g: &IsometryElem, p: &Point3) -> f64 {
        let d = g.differential();
        let gm = metric_at(&g.apply(p));
        let want = metric_at(p);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        acc += d[k][i] * gm[k][l] * d[l][j];
                    }
                }
                worst = worst.max((acc - want[i][j]).abs());
            }
        }
        worst
    }

    #[test]
    fn isometries_preserve_metric() {
        let mut rng = SplitMix64(53);
        for _ in 0..40 {
            let g = IsometryElem {
                swap: rng.next_u64() % 2 == 0,
                sx: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                sy: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                a: rng.uniform(-2.0, 2.0),
                b: rng.uniform(-2.0, 2.0),
                c: rng.uniform(-1.5, 1.5),
            };
            for _ in 0..5 {
                let p = rng.point(1.5);
                assert!(pullback_residual(&g, &p) < 1e-12, "{g:?} at {p:?}");
            }
        }
    }

    #[test]
    fn isometries_preserve_inner_products() {
        let mut rng = SplitMix64(59);
        for _ in 0..40 {
            let g = IsometryElem {
                swap: rng.next_u64() % 2 == 0,
                sx: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                sy: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                a: rng.uniform(-2.0, 2.0),
                b: rng.uniform(-2.0, 2.0),
                c: rng.uniform(-1.5, 1.5),
            };
            let p = rng.point(1.5);
            let u = TangentVec::new(p, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            let v = TangentVec::new(p, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            let before = inner(&u, &v).unwrap();
            let after = inner(&g.push(&u), &g.push(&v)).unwrap();
            assert!((before - after).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_isometry_fixes_points() {
        let mut rng = SplitMix64(61);
        for _ in 0..10 {
            let p = rng.point(2.0);
            assert_eq!(isometry_apply(&IsometryElem::identity(), &p), p);
        }
    }

    #[test]
    fn isotropy_group_contains_quarter_turn() {
        // (x, y, z) -> (y, -x, -z) must be one of the eight elements
        let target = |p: &Point3| Point3::new(p.y, -p.x, -p.z);
        let mut rng = SplitMix64(67);
        let probes: Vec<Point3> = (0..6).map(|_| rng.point(1.0)).collect();
        let found = isotropy_group().into_iter().any(|g| {
            probes
                .iter()
                .all(|p| {
                    let got = g.apply(p);
                    let want = target(p);
                    (got.x - want.x).abs() < 1e-14
                        && (got.y - want.y).abs() < 1e-14
                        && (got.z - want.z).abs() < 1e-14
                })
        });
        assert!(found);
    }

    #[test]
    fn isotropy_group_is_closed() {
        let elems = isotropy_group();
        assert_eq!(elems.len(), 8);
        let mut rng = SplitMix64(71);
        let probes: Vec<Point3> = (0..5).map(|_| rng.point(1.0)).collect();
        let same = |g: &IsometryElem, h: &IsometryElem| {
            probes.iter().all(|p| {
                let a = g.apply(p);
                let b = h.apply(p);
                (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12 && (a.z - b.z).abs() < 1e-12
            })
        };
        for g in &elems {
            for h in &elems {
                let gh = g.compose(h);
                assert!(
                    elems.iter().any(|e| same(e, &gh)),
                    "composition left the set: {g:?} * {h:?}"
                );
            }
            // each element preserves the metric
            for p in &probes {
                assert!(pullback_residual(g, p) < 1e-12);
            }
            // and has an inverse in the set
            let ginv = g.inverse();
            assert!(same(&g.compose(&ginv), &IsometryElem::identity()));
            assert!(same(&ginv.compose(g), &IsometryElem::identity()));
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = SplitMix64(73);
        for _ in 0..60 {
            let mk = |rng: &mut SplitMix64| IsometryElem {
                swap: rng.next_u64() % 2 == 0,
                sx: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                sy: if rng.next_u64() % 2 == 0 { Sign::Plus } else { Sign::Minus },
                a: rng.uniform(-1.5, 1.5),
                b: rng.uniform(-1.5, 1.5),
                c: rng.uniform(-1.2, 1.2),
            };
            let g = mk(&mut rng);
            let h = mk(&mut rng);
            let p = rng.point(1.5);
            let a = g.compose(&h).apply(&p);
            let b = g.apply(&h.apply(&p));
            assert!((a.x - b.x).abs() < 1e-12);
            assert!((a.y - b.y).abs() < 1e-12);
            assert!((a.z - b.z).abs() < 1e-12);
        }
    }

    #[test]
    fn sectional_curvatures_of_frame_planes() {
        let e1 = FrameAxis::E1.unit();
        let e2 = FrameAxis::E2.unit();
        let e3 = FrameAxis::E3.unit();
        assert!((sectional(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        assert!((sectional(&e1, &e3).unwrap() + 1.0).abs() < 1e-15);
        assert!((sectional(&e2, &e3).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_op_symmetries() {
        // antisymmetry in the first two slots and first Bianchi identity
        let mut rng = SplitMix64(79);
        for _ in 0..30 {
            let v = |rng: &mut SplitMix64| {
                FrameVec::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            };
            let (x, y, w) = (v(&mut rng), v(&mut rng), v(&mut rng));
            let a = curvature_op(&x, &y, &w);
            let b = curvature_op(&y, &x, &w);
            assert!(a.add(&b).norm() < 1e-13);
            let bianchi = curvature_op(&x, &y, &w)
                .add(&curvature_op(&y, &w, &x))
                .add(&curvature_op(&w, &x, &y));
            assert!(bianchi.norm() < 1e-13);
        }
    }

    #[test]
    fn tangent_frame_round_trip() {
        let mut rng = SplitMix64(83);
        for _ in 0..30 {
            let p = rng.point(2.0);
            let v = TangentVec::new(p, rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
            let back = TangentVec::from_frame(p, v.to_frame());
            for k in 0..3 {
                assert!((back.components()[k] - v.components()[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn battery_is_tight_and_deterministic() {
        let checks = invariant_battery(500, 7);
        assert_eq!(checks.len(), 6);
        for c in &checks {
            assert!(c.worst <= 1e-10, "{}: {}", c.name, c.worst);
        }
        let again = invariant_battery(500, 7);
        for (a, b) in checks.iter().zip(&again) {
            assert_eq!(a.worst.to_bits(), b.worst.to_bits());
        }
    }
}
