//! Upper half-plane geometry: points, PSL(2,R) isometries, oriented geodesics
//! with arc-length coordinates, and signed orthogonal projection.
//!
//! Conventions fixed here and relied on everywhere else:
//! - the positive side of an oriented geodesic is the left of travel
//!   (rotate the forward tangent by +π/2);
//! - isometries are det-1 matrices with projective sign chosen so the first
//!   entry of (a, b, c) that is not numerically zero is positive;
//! - geodesics carry an anchor point (parameter t = 0) on the curve.

use crate::error::{Error, Result};
use crate::numeric::acosh1p;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Interior point of the upper half-plane, y > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        debug_assert!(y > 0.0, "half-plane point needs y > 0, got y = {y}");
        Point { x, y }
    }

    /// Checked constructor for deserialized input.
    pub fn try_new(x: f64, y: f64) -> Result<Point> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(Error::InvalidParam(format!(
                "half-plane point needs finite x and y > 0, got ({x}, {y})"
            )));
        }
        Ok(Point { x, y })
    }

    pub const I: Point = Point { x: 0.0, y: 1.0 };
}

/// Hyperbolic distance. Stable down to y values near the underflow threshold:
/// everything is expressed through B = |p − q| / sqrt(y_p y_q) rather than the
/// textbook cosh form, so points deep in a cusp-like corner still compare.
pub fn dist(p: Point, q: Point) -> f64 {
    let b = (p.x - q.x).hypot(p.y - q.y) / (p.y.sqrt() * q.y.sqrt());
    if b > 1e8 {
        // cosh d = 1 + B²/2 ~ B²/2; relative error O(1/B²), and B² would
        // overflow once B passes 1e154.
        2.0 * b.ln()
    } else {
        acosh1p(0.5 * b * b)
    }
}

/// Ideal boundary point of the half-plane: a real number or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(self) -> Option<f64> {
        match self {
            BoundaryPoint::Finite(v) => Some(v),
            BoundaryPoint::Infinity => None,
        }
    }

    pub fn approx_eq(self, other: BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            _ => false,
        }
    }
}

/// Element of PSL(2,R) stored as a det-1 matrix with canonical projective sign.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds from raw entries, renormalizing the determinant to 1 and fixing
    /// the projective sign. Rejects orientation-reversing or singular input.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Isometry> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "matrix must have positive finite determinant, got {det}"
            )));
        }
        let s = det.sqrt().recip();
        Ok(Isometry { a: a * s, b: b * s, c: c * s, d: d * s }.canonical())
    }

    /// Projective sign normalization: first entry of (a, b, c) that stands
    /// clear of rounding noise decides. The noise threshold is relative to the
    /// matrix norm so entries that are "zero up to drift" never flip the sign
    /// between two floating-point routes to the same group element.
    fn canonical(self) -> Isometry {
        let norm = self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs());
        let cut = 1e-9 * norm;
        let lead = if self.a.abs() > cut {
            self.a
        } else if self.b.abs() > cut {
            self.b
        } else {
            self.c
        };
        if lead < 0.0 {
            Isometry { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Matrix product (self ∘ other as maps), renormalized against drift.
    /// ad − bc cancels catastrophically once the entry products outgrow the
    /// float mantissa, while normalized factors keep the true determinant at
    /// 1 up to multiplicative drift, so the correction only applies while
    /// the determinant is still readable.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let (p, q) = (a * d, b * c);
        let det = p - q;
        if det > 0.0 && p.abs().max(q.abs()) < 1e6 {
            let s = det.sqrt().recip();
            Isometry { a: a * s, b: b * s, c: c * s, d: d * s }.canonical()
        } else {
            Isometry { a, b, c, d }.canonical()
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Möbius action on the interior.
    pub fn apply(&self, p: Point) -> Point {
        let (x, y) = (p.x, p.y);
        let u = self.c * x + self.d;
        let den = u * u + (self.c * y) * (self.c * y);
        let nx = self.a * self.c * (x * x + y * y) + (self.a * self.d + self.b * self.c) * x
            + self.b * self.d;
        Point::new(nx / den, y / den)
    }

    /// Action on ideal points.
    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(v) => {
                let den = self.c * v + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * v + self.b) / den)
                }
            }
        }
    }

    /// How an isometry turns tangent directions: the argument of the complex
    /// derivative at p, in (−π, π].
    pub fn rotation_at(&self, p: Point) -> f64 {
        // g'(z) = 1/(cz+d)²  =>  arg g'(z) = −2 arg(cz + d)
        let re = self.c * p.x + self.d;
        let im = self.c * p.y;
        -2.0 * im.atan2(re)
    }

    /// Max entry distance to the identity after canonicalization.
    pub fn identity_defect(&self) -> f64 {
        let m = self.canonical();
        (m.a - 1.0)
            .abs()
            .max(m.b.abs())
            .max(m.c.abs())
            .max((m.d - 1.0).abs())
    }

    /// Max entry distance between two elements as projective classes.
    pub fn proj_dist(&self, other: &Isometry) -> f64 {
        let p = self.canonical();
        let q = other.canonical();
        (p.a - q.a)
            .abs()
            .max((p.b - q.b).abs())
            .max((p.c - q.c).abs())
            .max((p.d - q.d).abs())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Unit tangent vector: base point plus direction angle in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    pub base: Point,
    pub direction: f64,
}

impl UnitTangent {
    pub fn new(base: Point, direction: f64) -> UnitTangent {
        UnitTangent { base, direction: direction.rem_euclid(TAU) }
    }

    /// Direction at p of the geodesic running from p to q.
    pub fn towards(p: Point, q: Point) -> UnitTangent {
        let scale = 1e-14 * (p.x.abs() + q.x.abs() + 1.0);
        if (q.x - p.x).abs() <= scale {
            let dir = if q.y >= p.y { FRAC_PI_2 } else { -FRAC_PI_2 };
            return UnitTangent::new(p, dir);
        }
        // Center of the orthogonal half-circle through p and q.
        let c = ((q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y)) / (2.0 * (q.x - p.x));
        // Tangent along the circle at p with positive x-component.
        let (mut tx, mut ty) = (p.y, c - p.x);
        if q.x < p.x {
            tx = -tx;
            ty = -ty;
        }
        UnitTangent::new(p, ty.atan2(tx))
    }

    pub fn reversed(&self) -> UnitTangent {
        UnitTangent::new(self.base, self.direction + PI)
    }
}

/// Unique orientation-preserving isometry sending tangent u to tangent v.
pub fn isometry_mapping_tangent(u: UnitTangent, v: UnitTangent) -> Isometry {
    frame(v).compose(&frame(u).inverse())
}

/// Isometry carrying the upward tangent at i to the given tangent.
fn frame(w: UnitTangent) -> Isometry {
    let (x, y) = (w.base.x, w.base.y);
    let sy = y.sqrt();
    let translate = Isometry { a: sy, b: x / sy, c: 0.0, d: 1.0 / sy };
    // A rotation by φ about i turns tangents at i by 2φ.
    let phi = 0.5 * (w.direction - FRAC_PI_2);
    let (s, c) = phi.sin_cos();
    let rotate = Isometry { a: c, b: s, c: -s, d: c };
    translate.compose(&rotate)
}

/// Oriented geodesic with an arc-length origin.
///
/// `canon` maps the curve onto the upward imaginary axis (alpha to 0, omega to
/// infinity); projections and parametrization all route through it, which
/// keeps the formulas exact even for points with y near the underflow range.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OrientedGeodesic {
    pub alpha: BoundaryPoint,
    pub omega: BoundaryPoint,
    pub anchor: Point,
    canon: Isometry,
    anchor_log: f64,
}

impl OrientedGeodesic {
    pub fn new(alpha: BoundaryPoint, omega: BoundaryPoint, anchor: Point) -> Result<OrientedGeodesic> {
        if alpha.approx_eq(omega, 1e-14) {
            return Err(Error::InvalidParam(format!(
                "geodesic endpoints must differ, got {alpha:?} and {omega:?}"
            )));
        }
        let canon = match (alpha, omega) {
            (BoundaryPoint::Finite(al), BoundaryPoint::Finite(om)) => {
                // z -> ±(z−alpha)/(z−omega), sign chosen to keep det positive.
                let k = if al > om { 1.0 } else { -1.0 };
                Isometry::new(k, -k * al, 1.0, -om)?
            }
            (BoundaryPoint::Finite(al), BoundaryPoint::Infinity) => {
                Isometry { a: 1.0, b: -al, c: 0.0, d: 1.0 }
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(om)) => {
                Isometry { a: 0.0, b: -1.0, c: 1.0, d: -om }
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => unreachable!(),
        };
        let w = canon.apply(anchor);
        let r = w.x.hypot(w.y);
        // The log of the modulus is the foot parameter, so an anchor within
        // transport drift of the curve snaps on with only second-order
        // parameter error; the gate exists to reject genuinely off-curve
        // input, not float noise from chained isometries.
        if w.x.abs() > 1e-6 * r {
            return Err(Error::InvalidParam(format!(
                "anchor ({}, {}) does not lie on the geodesic (off-axis ratio {:.3e})",
                anchor.x,
                anchor.y,
                w.x.abs() / r
            )));
        }
        Ok(OrientedGeodesic { alpha, omega, anchor, canon, anchor_log: r.ln() })
    }

    /// Geodesic determined by a unit tangent; anchor = the base point.
    pub fn from_tangent(v: UnitTangent) -> OrientedGeodesic {
        let (x, y) = (v.base.x, v.base.y);
        let (s, c) = v.direction.sin_cos();
        let (alpha, omega) = if c.abs() < 1e-15 {
            if s > 0.0 {
                (BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
            } else {
                (BoundaryPoint::Infinity, BoundaryPoint::Finite(x))
            }
        } else {
            let center = x + y * s / c;
            let r = y / c.abs();
            if c > 0.0 {
                (BoundaryPoint::Finite(center - r), BoundaryPoint::Finite(center + r))
            } else {
                (BoundaryPoint::Finite(center + r), BoundaryPoint::Finite(center - r))
            }
        };
        OrientedGeodesic::new(alpha, omega, v.base)
            .expect("tangent base lies on its own geodesic by construction")
    }

    /// Arc-length coordinate and signed normal distance of z.
    ///
    /// t grows toward omega; s > 0 on the left of travel. On the canonical
    /// axis the pair is read off directly: t from the log of the modulus,
    /// s from asinh(Re/Im), which stays accurate for points nearly on the
    /// curve and for points with tiny Im.
    pub fn project(&self, z: Point) -> (f64, f64) {
        let w = self.canon.apply(z);
        let t = w.x.hypot(w.y).ln() - self.anchor_log;
        let s = -(w.x / w.y).asinh();
        (t, s)
    }

    /// Point at arc-length parameter t.
    pub fn point_at(&self, t: f64) -> Point {
        let w = Point::new(0.0, (self.anchor_log + t).exp());
        self.canon.inverse().apply(w)
    }

    /// Forward unit tangent at parameter t.
    pub fn tangent_at(&self, t: f64) -> UnitTangent {
        let inv = self.canon.inverse();
        let w = Point::new(0.0, (self.anchor_log + t).exp());
        let dir = FRAC_PI_2 + inv.rotation_at(w);
        UnitTangent::new(inv.apply(w), dir)
    }

    /// Same curve, opposite orientation, same anchor. Coordinates transform
    /// as (t, s) -> (−t, −s).
    pub fn reversed(&self) -> OrientedGeodesic {
        OrientedGeodesic::new(self.omega, self.alpha, self.anchor)
            .expect("reversal preserves the on-curve anchor")
    }

    /// Anchor moved to the point at parameter dt (coordinates shift by −dt).
    pub fn shifted(&self, dt: f64) -> OrientedGeodesic {
        OrientedGeodesic::new(self.alpha, self.omega, self.point_at(dt))
            .expect("shifted anchor stays on the curve")
    }

    /// Image geodesic g·self with the anchor transported by g.
    pub fn transported(&self, g: &Isometry) -> Result<OrientedGeodesic> {
        OrientedGeodesic::new(
            g.apply_boundary(self.alpha),
            g.apply_boundary(self.omega),
            g.apply(self.anchor),
        )
    }

    /// Distance from z to the full curve.
    pub fn dist_to(&self, z: Point) -> f64 {
        self.project(z).1.abs()
    }

    /// Distance from z to the segment between parameters t0 and t1.
    pub fn dist_to_segment(&self, z: Point, t0: f64, t1: f64) -> f64 {
        let (t, s) = self.project(z);
        if t >= t0 && t <= t1 {
            s.abs()
        } else {
            let tc = t.clamp(t0, t1);
            dist(z, self.point_at(tc))
        }
    }
}

/// Translation axis and length of a hyperbolic isometry.
///
/// The axis is oriented so g translates toward omega by the returned length.
/// Anchor: top of the half-circle, or height 1 on a vertical axis.
pub fn axis_and_length(g: &Isometry) -> Result<(OrientedGeodesic, f64)> {
    let tr = g.trace();
    if tr.abs() <= 2.0 + 1e-10 {
        return Err(Error::NonHyperbolicElement { trace_abs: tr.abs() });
    }
    let length = 2.0 * acosh1p(tr.abs() / 2.0 - 1.0);
    let disc = (tr * tr - 4.0).sqrt();
    // Eigenvalue of larger modulus attracts; its fixed point is omega.
    let lam_att = 0.5 * (tr + tr.signum() * disc);
    let lam_rep = 0.5 * (tr - tr.signum() * disc);
    let (alpha, omega);
    if g.c != 0.0 {
        omega = BoundaryPoint::Finite(fixed_point(g, lam_att));
        alpha = BoundaryPoint::Finite(fixed_point(g, lam_rep));
    } else {
        // Fixed points are ∞ and b/(d−a); ∞ attracts when |a| > |d|.
        let finite = BoundaryPoint::Finite(g.b / (g.d - g.a));
        if g.a.abs() > g.d.abs() {
            alpha = finite;
            omega = BoundaryPoint::Infinity;
        } else {
            alpha = BoundaryPoint::Infinity;
            omega = finite;
        }
    }
    let anchor = match (alpha, omega) {
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            Point::new(0.5 * (p + q), 0.5 * (p - q).abs())
        }
        (BoundaryPoint::Finite(p), _) | (_, BoundaryPoint::Finite(p)) => Point::new(p, 1.0),
        _ => unreachable!(),
    };
    Ok((OrientedGeodesic::new(alpha, omega, anchor)?, length))
}

/// Fixed point on the boundary for eigenvalue lam, using whichever of the two
/// equivalent expressions is better conditioned.
fn fixed_point(g: &Isometry, lam: f64) -> f64 {
    // (lam − a)(lam − d) = bc, so (lam − d)/c = b/(lam − a).
    if (lam - g.d).abs() >= (lam - g.a).abs() {
        (lam - g.d) / g.c
    } else {
        g.b / (lam - g.a)
    }
}

/// Cayley map to the Poincaré disk, z -> i(z−i)/(z+i): i goes to the center,
/// the upward imaginary axis to the upward vertical diameter.
pub fn to_disk(p: Point) -> (f64, f64) {
    let (x, y) = (p.x, p.y);
    let den = x * x + (y + 1.0) * (y + 1.0);
    (2.0 * x / den, (x * x + y * y - 1.0) / den)
}

/// Inverse of `to_disk`; defined for u² + v² < 1.
pub fn from_disk(u: f64, v: f64) -> Result<Point> {
    let r2 = u * u + v * v;
    if r2 >= 1.0 {
        return Err(Error::InvalidParam(format!(
            "disk point must satisfy u²+v² < 1, got {r2}"
        )));
    }
    let den = u * u + (v - 1.0) * (v - 1.0);
    Point::try_new(2.0 * u / den, (1.0 - r2) / den)
}
