//! Deterministic SVG emission: Poincaré-disk scenes (polygon arcs, tube
//! band, orbit and projection dots) and one-dimensional tick plots.

use crate::schema::{PointSetDoc, WindowDoc};
use delone_core::hyperbolic::{OrientedGeodesic, Point, UnitTangent};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

/// Half-plane to unit-disk coordinates, y already flipped for SVG.
fn disk_xy(p: Point) -> (f64, f64) {
    let d = p.x * p.x + (p.y + 1.0) * (p.y + 1.0);
    let u = (p.x * p.x + p.y * p.y - 1.0) / d;
    let v = 2.0 * p.x / d;
    (u, -v)
}

fn fmt(v: f64) -> String {
    // Fixed short decimals keep the output byte-stable across runs.
    format!("{v:.6}")
}

/// Geodesic arc between two interior points as an SVG path segment. The
/// supporting circle is orthogonal to the unit circle; near-diameters fall
/// back to a straight line.
fn arc_path(p: Point, q: Point) -> String {
    let (pu, pv) = disk_xy(p);
    let (qu, qv) = disk_xy(q);
    // Center c of the orthocircle: 2 c·x = |x|² + 1 for both endpoints.
    let det = 4.0 * (pu * qv - pv * qu);
    if det.abs() < 1e-9 {
        return format!("M {} {} L {} {}", fmt(pu), fmt(pv), fmt(qu), fmt(qv));
    }
    let rp = pu * pu + pv * pv + 1.0;
    let rq = qu * qu + qv * qv + 1.0;
    let cx = (rp * 2.0 * qv - rq * 2.0 * pv) / det;
    let cy = (2.0 * pu * rq - 2.0 * qu * rp) / det;
    let r = (cx * cx + cy * cy - 1.0).max(0.0).sqrt();
    let cross = (pu - cx) * (qv - cy) - (pv - cy) * (qu - cx);
    let sweep = if cross > 0.0 { 1 } else { 0 };
    format!(
        "M {} {} A {} {} 0 0 {sweep} {} {}",
        fmt(pu),
        fmt(pv),
        fmt(r),
        fmt(r),
        fmt(qu),
        fmt(qv)
    )
}

/// Point at Fermi coordinates (t, s) of the geodesic: flow the left normal.
fn offset_point(ell: &OrientedGeodesic, t: f64, s: f64) -> Point {
    let tangent = ell.tangent_at(t);
    let normal = UnitTangent::new(tangent.base, tangent.direction + FRAC_PI_2);
    OrientedGeodesic::from_tangent(normal).point_at(s)
}

pub struct TubeBand {
    pub ell: OrientedGeodesic,
    pub rho: f64,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Default)]
pub struct DiskScene {
    /// Polygon vertex loop; consecutive pairs become geodesic edge arcs.
    pub polygon: Vec<Point>,
    pub tube: Option<TubeBand>,
    pub orbit_dots: Vec<Point>,
    /// Points on the tube geodesic (projected set pulled back to the curve).
    pub geodesic_dots: Vec<Point>,
}

pub fn render_disk(scene: &DiskScene) -> String {
    let mut svg = String::new();
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"640\" height=\"640\">\n",
    );
    svg.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#222222\" stroke-width=\"0.008\"/>\n");

    if let Some(band) = &scene.tube {
        let n = 96;
        let mut d = String::new();
        for i in 0..=n {
            let t = band.t0 + (band.t1 - band.t0) * i as f64 / n as f64;
            let (u, v) = disk_xy(offset_point(&band.ell, t, band.rho));
            let _ = write!(d, "{} {} {} ", if i == 0 { "M" } else { "L" }, fmt(u), fmt(v));
        }
        for i in (0..=n).rev() {
            let t = band.t0 + (band.t1 - band.t0) * i as f64 / n as f64;
            let (u, v) = disk_xy(offset_point(&band.ell, t, -band.rho));
            let _ = write!(d, "L {} {} ", fmt(u), fmt(v));
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            "<path d=\"{d}\" fill=\"#4477cc\" fill-opacity=\"0.35\" stroke=\"none\"/>"
        );
    }

    for (i, &p) in scene.polygon.iter().enumerate() {
        let q = scene.polygon[(i + 1) % scene.polygon.len()];
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"0.006\"/>",
            arc_path(p, q)
        );
    }

    for &p in &scene.orbit_dots {
        let (u, v) = disk_xy(p);
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"0.010\" fill=\"#555555\"/>",
            fmt(u),
            fmt(v)
        );
    }
    for &p in &scene.geodesic_dots {
        let (u, v) = disk_xy(p);
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"0.014\" fill=\"#cc3333\"/>",
            fmt(u),
            fmt(v)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Tick plot of a one-dimensional document; flagged points draw taller and
/// red. Torus windows plot the canonical representatives.
pub fn render_line(doc: &PointSetDoc) -> String {
    let (lo, hi) = match &doc.window {
        WindowDoc::Box { lo, hi } => (lo[0], hi[0]),
        WindowDoc::Torus { side } => (-side[0] / 2.0, side[0] / 2.0),
    };
    let (w, h, pad) = (800.0, 64.0, 20.0);
    let map = |t: f64| pad + (t - lo) / (hi - lo) * (w - 2.0 * pad);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">"
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"32\" x2=\"{}\" y2=\"32\" stroke=\"#222222\" stroke-width=\"1\"/>",
        fmt(pad),
        fmt(w - pad)
    );
    for (i, row) in doc.coords.iter().enumerate() {
        let x = map(row[0]);
        let flagged = doc.flags.get(i).copied().unwrap_or(false);
        let (y0, y1, color) = if flagged { (14.0, 50.0, "#cc3333") } else { (20.0, 44.0, "#2255aa") };
        let _ = writeln!(
            svg,
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            x = fmt(x)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
