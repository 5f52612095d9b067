//! Tube acceptance windows over a geodesic: project the group orbit onto
//! arc-length coordinates, keep the points whose signed normal distance fits
//! the configured tube mode, and flag anything too close to the boundary for
//! floating point to call.

use crate::error::{Error, Result};
use crate::hyperbolic::{dist, BoundaryPoint, OrientedGeodesic, Point};
use crate::surface::{EnumerationBudget, OrbitPoint, SurfaceGroup};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeMode {
    /// Open tube: |s| < ρ.
    StrictInterior,
    /// Open tube plus the positively oriented boundary component only.
    PlusBoundary,
    /// Closed tube, for diagnostics: |s| ≤ ρ (inflated by the tolerance).
    Closed,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TubeConfig {
    pub rho: f64,
    pub mode: TubeMode,
    /// Band half-width inside which |s| = ρ is treated as undecidable.
    pub boundary_tol: f64,
}

impl TubeConfig {
    pub fn new(rho: f64, mode: TubeMode) -> Result<TubeConfig> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParam(format!("tube radius must be positive, got {rho}")));
        }
        Ok(TubeConfig { rho, mode, boundary_tol: 1e-9 })
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> Result<TubeConfig> {
        if tol < 0.0 {
            return Err(Error::InvalidParam(format!("boundary tolerance must be ≥ 0, got {tol}")));
        }
        self.boundary_tol = tol;
        Ok(self)
    }
}

/// Sorted arc-length coordinates of the projected tube points, with parallel
/// boundary flags and full orbit-point provenance per coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectedSet {
    pub coords: Vec<f64>,
    pub boundary_flags: Vec<bool>,
    pub window: (f64, f64),
    pub provenance: Vec<Vec<OrbitPoint>>,
}

impl ProjectedSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn boundary_flag_count(&self) -> usize {
        self.boundary_flags.iter().filter(|&&f| f).count()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.coords.windows(2).map(|w| w[1] - w[0]).min_by(f64::total_cmp)
    }

    pub fn max_gap(&self) -> Option<f64> {
        self.coords.windows(2).map(|w| w[1] - w[0]).max_by(f64::total_cmp)
    }

    /// Restriction to a subwindow; exact, no recomputation.
    pub fn restricted(&self, lo: f64, hi: f64) -> ProjectedSet {
        let mut out = ProjectedSet {
            coords: Vec::new(),
            boundary_flags: Vec::new(),
            window: (lo.max(self.window.0), hi.min(self.window.1)),
            provenance: Vec::new(),
        };
        for (i, &t) in self.coords.iter().enumerate() {
            if t >= out.window.0 && t <= out.window.1 {
                out.coords.push(t);
                out.boundary_flags.push(self.boundary_flags[i]);
                out.provenance.push(self.provenance[i].clone());
            }
        }
        out
    }

    /// Every coordinate and the window translated by da.
    pub fn shifted(&self, da: f64) -> ProjectedSet {
        ProjectedSet {
            coords: self.coords.iter().map(|t| t + da).collect(),
            boundary_flags: self.boundary_flags.clone(),
            window: (self.window.0 + da, self.window.1 + da),
            provenance: self.provenance.clone(),
        }
    }

    /// The set as seen from the reversed geodesic: coordinates negate and the
    /// order flips.
    pub fn reflected(&self) -> ProjectedSet {
        let mut coords: Vec<f64> = self.coords.iter().map(|t| -t).collect();
        coords.reverse();
        let mut boundary_flags = self.boundary_flags.clone();
        boundary_flags.reverse();
        let mut provenance = self.provenance.clone();
        provenance.reverse();
        ProjectedSet {
            coords,
            boundary_flags,
            window: (-self.window.1, -self.window.0),
            provenance,
        }
    }
}

/// Computes the projected tube set over the window.
///
/// Enumeration is delegated to the tube walk with a small margin past ρ so
/// boundary-band points are seen; admission and flagging happen here.
///
/// Long windows are walked in short chunks with the frame folded back to
/// the base tile between chunks: group elements preserve the orbit and the
/// Fermi coordinates, so per-chunk projection plus parameter bookkeeping
/// reproduces the global coordinates while every matrix stays at a norm
/// where float arithmetic is exact to working precision. Provenance points
/// from far chunks are therefore recorded in their folded frame.
pub fn cut_project(
    group: &SurfaceGroup,
    ell: &OrientedGeodesic,
    cfg: &TubeConfig,
    window: (f64, f64),
    budget: &EnumerationBudget,
) -> Result<ProjectedSet> {
    if window.0 >= window.1 {
        return Err(Error::ParamOrder(format!(
            "window needs lo < hi, got [{}, {}]",
            window.0, window.1
        )));
    }
    let margin = cfg.boundary_tol + 1e-6;
    let (lo, hi) = window;

    let mut hits: Vec<(f64, bool, OrbitPoint)> = Vec::new();
    let mut admit = |t: f64, s: f64, op: OrbitPoint| {
        if t < lo || t > hi {
            return;
        }
        let admitted = match cfg.mode {
            TubeMode::StrictInterior => s.abs() < cfg.rho,
            TubeMode::PlusBoundary => {
                s.abs() < cfg.rho || (s - cfg.rho).abs() <= cfg.boundary_tol
            }
            TubeMode::Closed => s.abs() <= cfg.rho + cfg.boundary_tol,
        };
        if admitted {
            let flag = (s.abs() - cfg.rho).abs() <= cfg.boundary_tol;
            hits.push((t, flag, op));
        }
    };

    if lo.abs().max(hi.abs()) <= 12.0 {
        for op in group.orbit_near_segment(ell, lo, hi, cfg.rho + margin, budget)? {
            let (t, s) = ell.project(op.point);
            admit(t, s, op);
        }
    } else {
        const CHUNK: f64 = 8.0;
        let fold_reach = group.circumradius + 0.5;
        // Upward over chunks [t0, t0 + CHUNK), downward over [t0 - CHUNK, t0);
        // each point belongs to exactly one chunk, so seams never double up.
        for dir in [1.0f64, -1.0] {
            let mut geo = *ell;
            let mut t0 = 0.0f64;
            loop {
                let anchor = geo.point_at(0.0);
                if dist(anchor, group.base_point) > fold_reach {
                    let (w, _) = group.locate(anchor)?;
                    geo = geo.transported(&w)?;
                }
                let (own_lo, own_hi) =
                    if dir > 0.0 { (t0, t0 + CHUNK) } else { (t0 - CHUNK, t0) };
                if dir > 0.0 && own_lo > hi || dir < 0.0 && own_hi < lo {
                    break;
                }
                let (seg_lo, seg_hi) = (own_lo.max(lo) - t0, own_hi.min(hi) - t0);
                if seg_hi - seg_lo > 1e-9 {
                    for op in
                        group.orbit_near_segment(&geo, seg_lo, seg_hi, cfg.rho + margin, budget)?
                    {
                        let (t_loc, s) = geo.project(op.point);
                        let t = t0 + t_loc;
                        // Half-open ownership, except that a window edge
                        // sitting exactly on a seam stays with the chunk
                        // that enumerated it.
                        if (t >= own_lo && t < own_hi) || (t == hi && own_hi == hi) {
                            admit(t, s, op);
                        }
                    }
                }
                geo = geo.shifted(dir * CHUNK);
                t0 += dir * CHUNK;
            }
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Coordinates within the merge scale are one projected point seen through
    // several orbit points; flags accumulate, provenance concatenates.
    let mut out = ProjectedSet {
        coords: Vec::new(),
        boundary_flags: Vec::new(),
        window,
        provenance: Vec::new(),
    };
    for (t, flag, op) in hits {
        match out.coords.last() {
            Some(&last) if t - last <= 1e-12 => {
                *out.boundary_flags.last_mut().unwrap() |= flag;
                out.provenance.last_mut().unwrap().push(op);
            }
            _ => {
                out.coords.push(t);
                out.boundary_flags.push(flag);
                out.provenance.push(vec![op]);
            }
        }
    }
    Ok(out)
}

/// Replaces each close pair of coordinates by its midpoint. Refuses when
/// three points fall pairwise within the threshold, since the midpoint rule
/// is then order-dependent.
pub fn merge_close_pairs(ps: &ProjectedSet, threshold: f64) -> Result<ProjectedSet> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParam(format!("threshold must be positive, got {threshold}")));
    }
    let c = &ps.coords;
    for w in c.windows(3) {
        if w[2] - w[0] < threshold {
            return Err(Error::TripleCluster { threshold, first: w[0] });
        }
    }
    let mut out = ProjectedSet {
        coords: Vec::new(),
        boundary_flags: Vec::new(),
        window: ps.window,
        provenance: Vec::new(),
    };
    let mut i = 0;
    while i < c.len() {
        if i + 1 < c.len() && c[i + 1] - c[i] < threshold {
            out.coords.push(0.5 * (c[i] + c[i + 1]));
            out.boundary_flags.push(ps.boundary_flags[i] || ps.boundary_flags[i + 1]);
            let mut prov = ps.provenance[i].clone();
            prov.extend(ps.provenance[i + 1].iter().cloned());
            out.provenance.push(prov);
            i += 2;
        } else {
            out.coords.push(c[i]);
            out.boundary_flags.push(ps.boundary_flags[i]);
            out.provenance.push(ps.provenance[i].clone());
            i += 1;
        }
    }
    Ok(out)
}

/// Pseudo-random geodesic with ideal endpoints straddling the origin and the
/// anchor at the foot of the perpendicular from the base point i. Seeds are
/// reproducible across runs and platforms.
pub fn seeded_geodesic(seed: u64) -> OrientedGeodesic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.gen_range(-2.5..-0.4);
    let omega = rng.gen_range(0.4..2.5);
    let top = Point::new(0.5 * (alpha + omega), 0.5 * (omega - alpha));
    let raw = OrientedGeodesic::new(
        BoundaryPoint::Finite(alpha),
        BoundaryPoint::Finite(omega),
        top,
    )
    .expect("circle top lies on the curve");
    let (foot, _) = raw.project(Point::I);
    raw.shifted(foot)
}
