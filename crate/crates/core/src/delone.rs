//! Delone-property measurement and the local-rubber entourage calculus on
//! windowed point sets.

use crate::cutproject::ProjectedSet;
use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;
use crate::window::{Coord, Entourage, Shape, Window, WindowedPointSet};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Measured separation and density of a windowed set.
///
/// `min_gap` is the smallest pairwise distance. In dimension 1, `max_gap` is
/// the largest consecutive coordinate gap (cyclic on tori); in higher
/// dimension it is twice the covering radius seen from a probe grid over the
/// margin-shrunk window. Density is only asserted on the margin-shrunk
/// window, so edge truncation never produces false negatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeloneReport {
    pub min_gap: f64,
    pub max_gap: f64,
    pub separated_ok: bool,
    pub dense_ok: bool,
    pub margin: f64,
    pub boundary_flag_count: usize,
}

const GAP_TOL: f64 = 1e-9;
const PROBE_DIVISIONS: f64 = 10.0;
const MAX_PROBES: usize = 30_000_000;

pub fn check_delone(s: &WindowedPointSet, epsilon: f64, delta: f64) -> Result<DeloneReport> {
    check_delone_flagged(s, epsilon, delta, 0)
}

/// As `check_delone`, carrying the projection's boundary-flag count into the
/// report so near-boundary admissions stay visible.
pub fn check_delone_projected(ps: &ProjectedSet, epsilon: f64, delta: f64) -> Result<DeloneReport> {
    let s = WindowedPointSet::from_projected(ps)?;
    check_delone_flagged(&s, epsilon, delta, ps.boundary_flag_count())
}

fn check_delone_flagged(
    s: &WindowedPointSet,
    epsilon: f64,
    delta: f64,
    boundary_flag_count: usize,
) -> Result<DeloneReport> {
    if !(epsilon > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidParam(format!(
            "epsilon and delta must be positive, got ({epsilon}, {delta})"
        )));
    }
    for a in 0..s.dim {
        let side = match s.window {
            Window::Box { lo, hi } => hi[a] - lo[a],
            Window::Torus { side } => side[a],
        };
        if side <= 2.0 * epsilon {
            return Err(Error::WindowTooSmall(format!(
                "axis {a} has extent {side}, need more than 2·epsilon = {}",
                2.0 * epsilon
            )));
        }
    }

    let (min_gap, max_gap, cover) = if s.dim == 1 {
        gaps_line(s, epsilon)
    } else {
        gaps_grid(s, epsilon)?
    };
    Ok(DeloneReport {
        min_gap,
        max_gap,
        separated_ok: min_gap >= delta - GAP_TOL,
        dense_ok: cover <= epsilon + GAP_TOL,
        margin: epsilon,
        boundary_flag_count,
    })
}

/// Exact gap analysis on a line: (min_gap, max_gap, covering radius).
fn gaps_line(s: &WindowedPointSet, epsilon: f64) -> (f64, f64, f64) {
    let xs: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
    match s.window {
        Window::Box { lo, hi } => {
            let (a, b) = (lo[0] + epsilon, hi[0] - epsilon);
            if xs.is_empty() {
                return (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            }
            let mut min_gap = f64::INFINITY;
            let mut max_gap = 0.0f64;
            let mut cover = nearest_on_line(&xs, a).max(nearest_on_line(&xs, b));
            for w in xs.windows(2) {
                let gap = w[1] - w[0];
                min_gap = min_gap.min(gap);
                max_gap = max_gap.max(gap);
                let mid = (0.5 * (w[0] + w[1])).clamp(a, b);
                cover = cover.max(nearest_on_line(&xs, mid));
            }
            if xs.len() < 2 {
                max_gap = 2.0 * cover;
            }
            (min_gap, max_gap, cover)
        }
        Window::Torus { side } => {
            let ell = side[0];
            if xs.is_empty() {
                return (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            }
            if xs.len() == 1 {
                return (f64::INFINITY, ell, ell / 2.0);
            }
            let mut min_gap = f64::INFINITY;
            let mut max_gap = 0.0f64;
            for i in 0..xs.len() {
                let next = if i + 1 < xs.len() { xs[i + 1] } else { xs[0] + ell };
                let gap = next - xs[i];
                min_gap = min_gap.min(gap);
                max_gap = max_gap.max(gap);
            }
            (min_gap, max_gap, max_gap / 2.0)
        }
    }
}

/// Distance from x to the nearest coordinate in sorted xs.
fn nearest_on_line(xs: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&p| p < x);
    let mut best = f64::INFINITY;
    if i < xs.len() {
        best = best.min(xs[i] - x);
    }
    if i > 0 {
        best = best.min(x - xs[i - 1]);
    }
    best
}

/// Probe-grid analysis for dim ≥ 2: (min_gap, 2·cover, cover). The probe
/// spacing is epsilon/10, fine enough that a missed uncovered spot would
/// have clearance within probe resolution of epsilon.
fn gaps_grid(s: &WindowedPointSet, epsilon: f64) -> Result<(f64, f64, f64)> {
    let h = epsilon / PROBE_DIVISIONS;
    let mut axes: Vec<Vec<f64>> = Vec::new();
    let mut total = 1usize;
    for a in 0..s.dim {
        let (start, len) = match s.window {
            Window::Box { lo, hi } => (lo[a] + epsilon, hi[a] - lo[a] - 2.0 * epsilon),
            Window::Torus { side } => (-side[a] / 2.0, side[a]),
        };
        let steps = (len / h).ceil() as usize + 1;
        let mut ticks: Vec<f64> = (0..steps).map(|k| start + k as f64 * h).collect();
        if let Window::Box { hi, .. } = s.window {
            for t in &mut ticks {
                *t = t.min(hi[a] - epsilon);
            }
            ticks.dedup();
        }
        total = total.saturating_mul(ticks.len());
        axes.push(ticks);
    }
    if total > MAX_PROBES {
        return Err(Error::InvalidParam(format!(
            "density probe grid would need {total} samples; shrink the window or raise epsilon"
        )));
    }

    let torus = matches!(s.window, Window::Torus { .. });
    let index = if torus { None } else { Some(GridIndex::build(&s.points, s.dim, epsilon)) };
    let max_ring = match s.window {
        Window::Box { lo, hi } => {
            let diam = (0..s.dim).map(|a| hi[a] - lo[a]).fold(0.0f64, f64::max);
            (diam / epsilon).ceil() as i64 + 2
        }
        Window::Torus { .. } => 0,
    };

    let nearest = |x: &Coord| -> f64 {
        match &index {
            Some(ix) => ix.nearest(&s.points, x, None, max_ring),
            None => s
                .points
                .iter()
                .map(|p| s.dist(p, x))
                .fold(f64::INFINITY, f64::min),
        }
    };

    let mut cover = 0.0f64;
    let mut probe = [0.0f64; 3];
    let mut idx = vec![0usize; s.dim];
    'outer: loop {
        for a in 0..s.dim {
            probe[a] = axes[a][idx[a]];
        }
        cover = cover.max(nearest(&probe));
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == s.dim {
                break 'outer;
            }
        }
    }

    let mut min_gap = f64::INFINITY;
    match &index {
        Some(ix) => {
            for (i, p) in s.points.iter().enumerate() {
                min_gap = min_gap.min(ix.nearest(&s.points, p, Some(i), max_ring));
            }
        }
        None => {
            for i in 0..s.points.len() {
                for j in i + 1..s.points.len() {
                    min_gap = min_gap.min(s.dist(&s.points[i], &s.points[j]));
                }
            }
        }
    }
    Ok((min_gap, 2.0 * cover, cover))
}

/// Cell-bucket index over box-window points for nearest queries.
struct GridIndex {
    cell: f64,
    dim: usize,
    map: HashMap<[i64; 3], Vec<usize>>,
}

impl GridIndex {
    fn build(points: &[Coord], dim: usize, cell: f64) -> GridIndex {
        let mut map: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            map.entry(Self::key(p, cell, dim)).or_default().push(i);
        }
        GridIndex { cell, dim, map }
    }

    fn key(p: &Coord, cell: f64, dim: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        for a in 0..dim {
            k[a] = (p[a] / cell).floor() as i64;
        }
        k
    }

    /// Expanding Chebyshev ring scan; after finishing ring r every unseen
    /// point is at least r·cell away, so the first satisfied bound is exact.
    fn nearest(&self, points: &[Coord], x: &Coord, skip: Option<usize>, max_ring: i64) -> f64 {
        let k0 = Self::key(x, self.cell, self.dim);
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            let ys: Vec<i64> =
                if self.dim >= 2 { (-ring..=ring).collect() } else { vec![0] };
            let zs: Vec<i64> =
                if self.dim >= 3 { (-ring..=ring).collect() } else { vec![0] };
            for dx in -ring..=ring {
                for &dy in &ys {
                    for &dz in &zs {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        let key = [k0[0] + dx, k0[1] + dy, k0[2] + dz];
                        if let Some(bucket) = self.map.get(&key) {
                            for &i in bucket {
                                if skip == Some(i) {
                                    continue;
                                }
                                let mut d2 = 0.0;
                                for a in 0..self.dim {
                                    let t = points[i][a] - x[a];
                                    d2 += t * t;
                                }
                                best = best.min(d2.sqrt());
                            }
                        }
                    }
                }
            }
            if best <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

fn compatible(s: &WindowedPointSet, s2: &WindowedPointSet) -> Result<()> {
    if s.dim != s2.dim {
        return Err(Error::InvalidParam(format!(
            "dimension mismatch: {} vs {}",
            s.dim, s2.dim
        )));
    }
    match (&s.window, &s2.window) {
        (Window::Box { .. }, Window::Box { .. }) => Ok(()),
        (Window::Torus { side: a }, Window::Torus { side: b }) => {
            if (0..s.dim).all(|i| (a[i] - b[i]).abs() < 1e-12) {
                Ok(())
            } else {
                Err(Error::InvalidParam("torus sides differ".into()))
            }
        }
        _ => Err(Error::InvalidParam("cannot compare a box window with a torus".into())),
    }
}

fn require_coverage(s: &WindowedPointSet, s2: &WindowedPointSet, u: &Shape) -> Result<()> {
    let ext: Vec<f64> = (0..s.dim).map(|a| u.extent(a)).collect();
    if !s.window_covers(&ext) || !s2.window_covers(&ext) {
        return Err(Error::WindowTooSmall(format!(
            "both windows must contain the inner region (extent {ext:?})"
        )));
    }
    Ok(())
}

fn one_sided(
    src: &WindowedPointSet,
    dst: &WindowedPointSet,
    in_u: &dyn Fn(&Coord) -> bool,
    in_up: &dyn Fn(&Coord) -> bool,
) -> bool {
    src.points
        .iter()
        .filter(|p| in_u(p))
        .all(|p| dst.points.iter().any(|q| in_up(&src.diff(p, q))))
}

/// Whether (s, s2) lies in the entourage: s ∩ U ⊂ s2 + U′ and vice versa,
/// with closed shapes inflated by the policy's entourage tolerance. Closed
/// semantics keep shorthand membership exactly antitone in r.
pub fn entourage_member(
    s: &WindowedPointSet,
    s2: &WindowedPointSet,
    e: &Entourage,
    policy: &NumericPolicy,
) -> Result<bool> {
    compatible(s, s2)?;
    let (u, up) = e.resolve();
    require_coverage(s, s2, &u)?;
    let tol = policy.entourage_tol;
    let dim = s.dim;
    let in_u = move |p: &Coord| u.contains(p, dim, tol);
    let in_up = move |v: &Coord| up.contains(v, dim, tol);
    Ok(one_sided(s, s2, &in_u, &in_up) && one_sided(s2, s, &in_u, &in_up))
}

/// sup { r ≤ r_max : (s, s2) ∈ N_r }, located by bisection to 1e-6.
/// Returns r_max when membership holds there, and 0.0 when membership
/// already fails at negligible scale.
pub fn rubber_proximity(
    s: &WindowedPointSet,
    s2: &WindowedPointSet,
    r_max: f64,
    policy: &NumericPolicy,
) -> Result<f64> {
    if !(r_max > 0.0) {
        return Err(Error::InvalidParam(format!("r_max must be positive, got {r_max}")));
    }
    compatible(s, s2)?;
    require_coverage(s, s2, &Shape::Ball { radius: r_max })?;
    let member = |r: f64| -> Result<bool> {
        entourage_member(s, s2, &Entourage::Shorthand { r }, policy)
    };
    if member(r_max)? {
        return Ok(r_max);
    }
    let mut lo = 1e-9_f64.min(r_max / 2.0);
    if !member(lo)? {
        return Ok(0.0);
    }
    let mut hi = r_max;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if member(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Translation periods of a one-dimensional box-window set, up to the given
/// entourage. Candidates come from the positive difference multiset,
/// coalesced at the policy's coalescence width, restricted to
/// [p_min, p_max]; each is accepted iff (s, s − p) lies in the entourage.
pub fn find_periods(
    s: &WindowedPointSet,
    e: &Entourage,
    p_min: f64,
    p_max: f64,
    policy: &NumericPolicy,
) -> Result<Vec<f64>> {
    if s.dim != 1 {
        return Err(Error::InvalidParam("period scan supports dimension 1 only".into()));
    }
    let (lo, hi) = match s.window {
        Window::Box { lo, hi } => (lo[0], hi[0]),
        Window::Torus { .. } => {
            return Err(Error::InvalidParam("period scan needs a box window".into()))
        }
    };
    if !(0.0 < p_min && p_min <= p_max) {
        return Err(Error::ParamOrder(format!(
            "need 0 < p_min ≤ p_max, got ({p_min}, {p_max})"
        )));
    }
    let (u, _) = e.resolve();
    let r0 = u.extent(0);
    if lo > -r0 || hi < r0 + p_max {
        return Err(Error::WindowTooSmall(format!(
            "window [{lo}, {hi}] must cover [-{r0}, {}] for the shifted comparison",
            r0 + p_max
        )));
    }

    let w = policy.coalesce;
    let mut diffs: Vec<f64> = Vec::new();
    let xs: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = xs[j] - xs[i];
            if d >= p_min - w && d <= p_max + w {
                diffs.push(d);
            }
        }
    }
    diffs.sort_by(f64::total_cmp);
    let mut candidates: Vec<f64> = Vec::new();
    let mut k = 0;
    while k < diffs.len() {
        let mut end = k + 1;
        while end < diffs.len() && diffs[end] - diffs[end - 1] <= w {
            end += 1;
        }
        let mean = diffs[k..end].iter().sum::<f64>() / (end - k) as f64;
        if mean >= p_min - GAP_TOL && mean <= p_max + GAP_TOL {
            candidates.push(mean);
        }
        k = end;
    }

    let mut periods = Vec::new();
    for p in candidates {
        let shifted = s.translated(&[-p, 0.0, 0.0]);
        if entourage_member(s, &shifted, e, policy)? {
            periods.push(p);
        }
    }
    Ok(periods)
}

/// Outcome of the entourage composition law for centered boxes: if
/// (s1, s2) ∈ N_{A+B, B} and (s2, s3) ∈ N_{C+D, D} then
/// (s1, s3) ∈ N_{A∩C, 2(B∪C)}, where 2(B∪C) = 2B ∪ (B+C) ∪ 2C.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionReport {
    pub premise_fine: bool,
    pub premise_coarse: bool,
    pub conclusion: bool,
    pub implication: bool,
}

pub fn composition_check(
    s1: &WindowedPointSet,
    s2: &WindowedPointSet,
    s3: &WindowedPointSet,
    a: Coord,
    b: Coord,
    c: Coord,
    d: Coord,
    policy: &NumericPolicy,
) -> Result<CompositionReport> {
    compatible(s1, s2)?;
    compatible(s2, s3)?;
    let dim = s1.dim;
    for hw in [&a, &b, &c, &d] {
        for i in 0..dim {
            if !(hw[i] > 0.0) {
                return Err(Error::InvalidParam("box half-widths must be positive".into()));
            }
        }
    }
    let sum = |x: &Coord, y: &Coord| {
        let mut z = [0.0; 3];
        for i in 0..dim {
            z[i] = x[i] + y[i];
        }
        z
    };

    let e12 = Entourage::General {
        u: Shape::Box { half_widths: sum(&a, &b) },
        u_prime: Shape::Box { half_widths: b },
    };
    let e23 = Entourage::General {
        u: Shape::Box { half_widths: sum(&c, &d) },
        u_prime: Shape::Box { half_widths: d },
    };
    let premise_fine = entourage_member(s1, s2, &e12, policy)?;
    let premise_coarse = entourage_member(s2, s3, &e23, policy)?;

    let mut meet = [0.0; 3];
    for i in 0..dim {
        meet[i] = a[i].min(c[i]);
    }
    let u_out = Shape::Box { half_widths: meet };
    require_coverage(s1, s3, &u_out)?;
    let tol = policy.entourage_tol;
    let in_u = |p: &Coord| u_out.contains(p, dim, tol);
    let in_union = |v: &Coord| {
        let within = |hw: &dyn Fn(usize) -> f64| (0..dim).all(|i| v[i].abs() <= hw(i) + tol);
        within(&|i| 2.0 * b[i]) || within(&|i| b[i] + c[i]) || within(&|i| 2.0 * c[i])
    };
    let conclusion = one_sided(s1, s3, &in_u, &in_union) && one_sided(s3, s1, &in_u, &in_union);
    let implication = !(premise_fine && premise_coarse) || conclusion;
    Ok(CompositionReport { premise_fine, premise_coarse, conclusion, implication })
}
