//! Constructive extension and gluing of Delone sets in flat space, the
//! punctured-disk and almost-periodicity genericity certificates, and the
//! chaotification pipeline built from them.
//!
//! All completions are lexicographic greedy scans over a δ/2 candidate
//! grid. On a bounded region greedy-maximal equals maximal, and the fixed
//! scan order makes every output reproducible.

use crate::delone::entourage_member;
use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;
use crate::window::{canonical_rep, lex_cmp, norm, Coord, Entourage, Window, WindowedPointSet};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

const TOL: f64 = 1e-9;

/// Union of axis-aligned boxes inside a box or torus ambient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub dim: usize,
    pub shape: Vec<(Coord, Coord)>,
    pub ambient: Window,
}

impl Region {
    pub fn new(dim: usize, shape: Vec<(Coord, Coord)>, ambient: Window) -> Result<Region> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParam(format!("region dimension {dim} out of range")));
        }
        for (lo, hi) in &shape {
            for a in 0..dim {
                if lo[a] > hi[a] {
                    return Err(Error::InvalidParam(format!(
                        "region box has lo > hi on axis {a}"
                    )));
                }
                let inside = match ambient {
                    Window::Box { lo: alo, hi: ahi } => {
                        lo[a] >= alo[a] - TOL && hi[a] <= ahi[a] + TOL
                    }
                    Window::Torus { side } => {
                        lo[a] >= -side[a] / 2.0 - TOL && hi[a] <= side[a] / 2.0 + TOL
                    }
                };
                if !inside {
                    return Err(Error::InvalidParam(format!(
                        "region box leaves the ambient on axis {a}"
                    )));
                }
            }
        }
        Ok(Region { dim, shape, ambient })
    }

    pub fn single_box(dim: usize, lo: Coord, hi: Coord, ambient: Window) -> Result<Region> {
        Region::new(dim, vec![(lo, hi)], ambient)
    }

    pub fn contains(&self, p: &Coord) -> bool {
        self.shape.iter().any(|(lo, hi)| {
            (0..self.dim).all(|a| p[a] >= lo[a] - TOL && p[a] <= hi[a] + TOL)
        })
    }

    /// Whether a closed ball of the given radius around p fits inside one
    /// box of the shape. For a single box this is exactly the inner-region
    /// membership; for unions it is the box-wise (conservative) reading.
    pub fn contains_ball(&self, p: &Coord, radius: f64) -> bool {
        self.shape.iter().any(|(lo, hi)| {
            (0..self.dim)
                .all(|a| p[a] >= lo[a] + radius - TOL && p[a] <= hi[a] - radius + TOL)
        })
    }

    pub fn bounding_box(&self) -> Option<(Coord, Coord)> {
        let mut it = self.shape.iter();
        let first = it.next()?;
        let mut lo = first.0;
        let mut hi = first.1;
        for (blo, bhi) in it {
            for a in 0..self.dim {
                lo[a] = lo[a].min(blo[a]);
                hi[a] = hi[a].max(bhi[a]);
            }
        }
        Some((lo, hi))
    }
}

/// Separation index: bucketed for box windows, linear with wrap metric on
/// tori (torus instances stay small).
struct SepIndex {
    dim: usize,
    cell: f64,
    torus: Option<Coord>,
    map: HashMap<[i64; 3], Vec<Coord>>,
    flat: Vec<Coord>,
}

impl SepIndex {
    fn new(dim: usize, cell: f64, window: &Window) -> SepIndex {
        let torus = match window {
            Window::Torus { side } => Some(*side),
            Window::Box { .. } => None,
        };
        SepIndex { dim, cell, torus, map: HashMap::new(), flat: Vec::new() }
    }

    fn key(&self, p: &Coord) -> [i64; 3] {
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = (p[a] / self.cell).floor() as i64;
        }
        k
    }

    fn insert(&mut self, p: Coord) {
        match self.torus {
            Some(_) => self.flat.push(p),
            None => self.map.entry(self.key(&p)).or_default().push(p),
        }
    }

    fn dist(&self, p: &Coord, q: &Coord) -> f64 {
        let mut d2 = 0.0;
        for a in 0..self.dim {
            let mut t = p[a] - q[a];
            if let Some(side) = self.torus {
                t = canonical_rep(t, side[a]);
            }
            d2 += t * t;
        }
        d2.sqrt()
    }

    /// Any stored point strictly closer than delta (up to tolerance)?
    fn blocked(&self, p: &Coord, delta: f64) -> bool {
        match self.torus {
            Some(_) => self.flat.iter().any(|q| self.dist(p, q) < delta - TOL),
            None => {
                let k0 = self.key(p);
                // delta never exceeds the cell size, so ring 1 is complete.
                for dx in -1..=1i64 {
                    for dy in if self.dim >= 2 { -1..=1i64 } else { 0..=0 } {
                        for dz in if self.dim >= 3 { -1..=1i64 } else { 0..=0 } {
                            let key = [k0[0] + dx, k0[1] + dy, k0[2] + dz];
                            if let Some(b) = self.map.get(&key) {
                                if b.iter().any(|q| self.dist(p, q) < delta - TOL) {
                                    return true;
                                }
                            }
                        }
                    }
                }
                false
            }
        }
    }

    /// Distance to the nearest stored point, capped: returns INFINITY when
    /// nothing lies within reach.
    fn nearest_within(&self, p: &Coord, reach: f64) -> f64 {
        match self.torus {
            Some(_) => self
                .flat
                .iter()
                .map(|q| self.dist(p, q))
                .fold(f64::INFINITY, f64::min),
            None => {
                let k0 = self.key(p);
                let max_ring = (reach / self.cell).ceil() as i64 + 1;
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
                                if let Some(b) = self.map.get(&key) {
                                    for q in b {
                                        best = best.min(self.dist(p, q));
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
    }
}

/// Grid candidates of spacing h over the region's boxes, anchored at each
/// box's lower corner, in global lexicographic order.
fn grid_candidates(region: &Region, h: f64) -> Vec<Coord> {
    let mut out = Vec::new();
    for (lo, hi) in &region.shape {
        let mut ticks: Vec<Vec<f64>> = Vec::new();
        for a in 0..region.dim {
            let steps = ((hi[a] - lo[a]) / h).floor() as usize + 1;
            ticks.push((0..steps).map(|k| lo[a] + k as f64 * h).collect());
        }
        let mut idx = vec![0usize; region.dim];
        'boxes: loop {
            let mut p = [0.0; 3];
            for a in 0..region.dim {
                p[a] = ticks[a][idx[a]];
            }
            out.push(p);
            let mut a = region.dim;
            loop {
                if a == 0 {
                    break 'boxes;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < ticks[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
    out.sort_by(lex_cmp);
    out.dedup_by(|a, b| (0..region.dim).all(|i| (a[i] - b[i]).abs() <= 1e-9));
    out
}

fn windows_match(a: &Window, b: &Window, dim: usize) -> bool {
    match (a, b) {
        (Window::Box { lo: l1, hi: h1 }, Window::Box { lo: l2, hi: h2 }) => {
            (0..dim).all(|i| (l1[i] - l2[i]).abs() < 1e-12 && (h1[i] - h2[i]).abs() < 1e-12)
        }
        (Window::Torus { side: s1 }, Window::Torus { side: s2 }) => {
            (0..dim).all(|i| (s1[i] - s2[i]).abs() < 1e-12)
        }
        _ => false,
    }
}

/// Greedy δ-separated completion of S against the region's δ/2 grid. The
/// input points all stay; a candidate joins when it keeps δ-separation
/// against everything accepted so far.
pub fn greedy_separated_complete(
    s: &WindowedPointSet,
    delta: f64,
    region: &Region,
) -> Result<WindowedPointSet> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParam(format!("delta must be positive, got {delta}")));
    }
    if region.dim != s.dim || !windows_match(&region.ambient, &s.window, s.dim) {
        return Err(Error::InvalidParam("region ambient must match the set's window".into()));
    }
    let mut index = SepIndex::new(s.dim, delta, &s.window);
    for p in &s.points {
        if region.contains(p) && index.blocked(p, delta) {
            let found = s
                .min_pairwise_dist()
                .unwrap_or(f64::INFINITY);
            return Err(Error::NotSeparatedInput { delta, found });
        }
        index.insert(*p);
    }
    let mut points = s.points.clone();
    for c in grid_candidates(region, delta / 2.0) {
        if !index.blocked(&c, delta) {
            index.insert(c);
            points.push(c);
        }
    }
    let mut out = s.clone();
    out.points = points;
    out.points.sort_by(lex_cmp);
    Ok(out)
}

/// Restriction of S to A extended to a set Delone on all of A: the inner
/// region A_eps = {x : D(x, eps) fits in A} keeps exactly S's points, and
/// the greedy fill only touches A minus A_eps.
pub fn inner_extend(
    s: &WindowedPointSet,
    a: &Region,
    epsilon: f64,
    delta: f64,
) -> Result<WindowedPointSet> {
    if epsilon < delta {
        return Err(Error::ParamOrder(format!(
            "inner extension needs epsilon ≥ delta, got ({epsilon}, {delta})"
        )));
    }
    if a.dim != s.dim {
        return Err(Error::InvalidParam("region dimension mismatch".into()));
    }
    let (blo, bhi) = a
        .bounding_box()
        .ok_or_else(|| Error::InvalidParam("inner extension needs a nonempty region".into()))?;
    match s.window {
        Window::Box { lo, hi } => {
            for ax in 0..s.dim {
                if lo[ax] > blo[ax] - epsilon + TOL || hi[ax] < bhi[ax] + epsilon - TOL {
                    return Err(Error::WindowTooSmall(format!(
                        "the set's window must contain the region inflated by epsilon on axis {ax}"
                    )));
                }
            }
        }
        Window::Torus { .. } => {
            return Err(Error::InvalidParam("inner extension expects a box window".into()))
        }
    }

    let window = Window::Box { lo: blo, hi: bhi };
    let mut index = SepIndex::new(s.dim, delta, &window);
    let mut points: Vec<Coord> = Vec::new();
    for p in &s.points {
        if a.contains(p) {
            points.push(*p);
            index.insert(*p);
        }
    }
    for c in grid_candidates(a, delta / 2.0) {
        if a.contains_ball(&c, epsilon) {
            continue;
        }
        if !index.blocked(&c, delta) {
            index.insert(c);
            points.push(c);
        }
    }
    points.sort_by(lex_cmp);
    Ok(WindowedPointSet { dim: s.dim, points, window, params: None })
}

/// Extension of a set N, Delone in the region A, to a set Delone on the
/// whole ambient with output ∩ A = N. N's density over A is checked on the
/// ε-shrunk boxes (the margin convention of the Delone report), which is
/// what restrictions of Delone sets actually satisfy.
pub fn glue_extend(
    n: &WindowedPointSet,
    a: &Region,
    epsilon: f64,
    delta: f64,
) -> Result<WindowedPointSet> {
    if epsilon < delta {
        return Err(Error::ParamOrder(format!(
            "gluing needs epsilon ≥ delta, got ({epsilon}, {delta})"
        )));
    }
    if a.dim != n.dim || !windows_match(&a.ambient, &n.window, n.dim) {
        return Err(Error::InvalidParam("region ambient must match the set's window".into()));
    }
    for p in &n.points {
        if !a.contains(p) {
            return Err(Error::NotDeloneOnA(format!("point {p:?} lies outside the region")));
        }
    }
    let mut index = SepIndex::new(n.dim, delta, &n.window);
    for p in &n.points {
        if index.blocked(p, delta) {
            return Err(Error::NotDeloneOnA(format!(
                "separation below {delta} near {p:?}"
            )));
        }
        index.insert(*p);
    }
    // Density precondition over each ε-shrunk box.
    let h = epsilon / 10.0;
    for (lo, hi) in &a.shape {
        let mut shrunk_ok = true;
        for ax in 0..a.dim {
            if hi[ax] - lo[ax] <= 2.0 * epsilon {
                shrunk_ok = false;
            }
        }
        if !shrunk_ok {
            continue;
        }
        let mut ticks: Vec<Vec<f64>> = Vec::new();
        for ax in 0..a.dim {
            let (s0, s1) = (lo[ax] + epsilon, hi[ax] - epsilon);
            let steps = ((s1 - s0) / h).ceil() as usize + 1;
            let mut t: Vec<f64> = (0..steps).map(|k| (s0 + k as f64 * h).min(s1)).collect();
            t.dedup();
            ticks.push(t);
        }
        let mut idx = vec![0usize; a.dim];
        'probe: loop {
            let mut p = [0.0; 3];
            for ax in 0..a.dim {
                p[ax] = ticks[ax][idx[ax]];
            }
            if index.nearest_within(&p, epsilon + TOL) > epsilon + TOL {
                return Err(Error::NotDeloneOnA(format!(
                    "no point within {epsilon} of {p:?}"
                )));
            }
            let mut ax = a.dim;
            loop {
                if ax == 0 {
                    break 'probe;
                }
                ax -= 1;
                idx[ax] += 1;
                if idx[ax] < ticks[ax].len() {
                    break;
                }
                idx[ax] = 0;
            }
        }
    }

    let full = match n.window {
        Window::Box { lo, hi } => Region::single_box(n.dim, lo, hi, n.window)?,
        Window::Torus { side } => {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for ax in 0..n.dim {
                lo[ax] = -side[ax] / 2.0;
                hi[ax] = side[ax] / 2.0 - 1e-9;
            }
            Region::single_box(n.dim, lo, hi, n.window)?
        }
    };
    let mut points = n.points.clone();
    for c in grid_candidates(&full, delta / 2.0) {
        if a.contains(&c) {
            continue;
        }
        if !index.blocked(&c, delta) {
            index.insert(c);
            points.push(c);
        }
    }
    points.sort_by(lex_cmp);
    Ok(WindowedPointSet { dim: n.dim, points, window: n.window, params: None })
}

/// Punctured-disk certificate parameters: the disk D(x − q, alpha) around
/// the shifted witness must miss the set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqParams {
    pub dim: usize,
    pub q: Coord,
    pub alpha: f64,
}

impl VqParams {
    pub fn new(dim: usize, q: Coord, alpha: f64) -> Result<VqParams> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParam(format!("dimension {dim} out of range")));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidParam(format!("alpha must be positive, got {alpha}")));
        }
        Ok(VqParams { dim, q, alpha })
    }
}

fn sub(dim: usize, a: &Coord, b: &Coord) -> Coord {
    let mut d = [0.0; 3];
    for i in 0..dim {
        d[i] = a[i] - b[i];
    }
    d
}

/// Candidates ordered by distance from the origin, ties lexicographic, so
/// reported witnesses are the most central ones.
fn central_order(dim: usize, pts: &mut [Coord]) {
    pts.sort_by(|a, b| norm(a, dim).total_cmp(&norm(b, dim)).then(lex_cmp(a, b)));
}

/// Searches S for a witness x whose shifted closed disk D(x − q, alpha)
/// contains no point of S. Only witnesses whose disk fits inside the
/// window are considered.
pub fn vq_member(s: &WindowedPointSet, p: &VqParams) -> Result<(bool, Option<Coord>)> {
    if p.dim != s.dim {
        return Err(Error::InvalidParam("dimension mismatch".into()));
    }
    let (lo, hi) = match s.window {
        Window::Box { lo, hi } => (lo, hi),
        Window::Torus { .. } => {
            return Err(Error::InvalidParam("disk certificate expects a box window".into()))
        }
    };
    let admissible = |x: &Coord| {
        (0..s.dim).all(|a| {
            let c = x[a] - p.q[a];
            c - p.alpha >= lo[a] - TOL && c + p.alpha <= hi[a] + TOL
        })
    };
    let mut candidates: Vec<Coord> = s.points.iter().copied().filter(|x| admissible(x)).collect();
    if candidates.is_empty() {
        return Err(Error::WindowTooSmall(
            "no set point has its shifted disk inside the window".into(),
        ));
    }
    central_order(s.dim, &mut candidates);
    for x in candidates {
        let center = sub(s.dim, &x, &p.q);
        let clear = s
            .points
            .iter()
            .all(|z| norm(&sub(s.dim, z, &center), s.dim) > p.alpha + TOL);
        if clear {
            return Ok((true, Some(x)));
        }
    }
    Ok((false, None))
}

/// Builds a (δ,δ)-Delone set through the origin certified by vq_member with
/// witness 0. Guard points at ±(q + 2α·q/|q|) keep the punctured disks on
/// both sides of the origin clear, so the certificate holds under either
/// sign convention for the shift.
pub fn vq_construct(p: &VqParams, epsilon: f64, delta: f64) -> Result<WindowedPointSet> {
    if epsilon < delta {
        return Err(Error::ParamOrder(format!(
            "need epsilon ≥ delta, got ({epsilon}, {delta})"
        )));
    }
    if !(p.alpha > 0.0 && p.alpha < delta / 4.0) {
        return Err(Error::ParamOrder(format!(
            "need 0 < alpha < delta/4, got alpha = {}, delta = {delta}",
            p.alpha
        )));
    }
    let qn = norm(&p.q, p.dim);
    if qn <= p.alpha + TOL {
        return Err(Error::InvalidParam(
            "the shift must exceed alpha, or the origin witness sits inside its own disk".into(),
        ));
    }
    let reach = qn + p.alpha + 2.0 * epsilon + 2.0;
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..p.dim {
        lo[a] = -reach;
        hi[a] = reach;
    }
    let mut seeds: Vec<Coord> = vec![[0.0; 3]];
    if qn + p.alpha >= delta {
        let scale = (qn + 2.0 * p.alpha) / qn;
        let mut y = [0.0; 3];
        let mut y_neg = [0.0; 3];
        for a in 0..p.dim {
            y[a] = scale * p.q[a];
            y_neg[a] = -scale * p.q[a];
        }
        seeds.push(y);
        seeds.push(y_neg);
    }
    let window = Window::Box { lo, hi };
    let base = WindowedPointSet { dim: p.dim, points: seeds, window, params: None };
    let region = Region::single_box(p.dim, lo, hi, window)?;
    greedy_separated_complete(&base, delta, &region)
}

/// Almost-periodicity witness: x makes S look m-close to itself, and the
/// x-shifted picture repeats along the grid of period `grid_period` out to
/// multiplicity m′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WWitness {
    pub m: u32,
    pub m_prime: u32,
    pub x: Coord,
    pub grid_period: f64,
}

/// Scans search_box at resolution 1/(4m′), plus the box centre, for a grid
/// almost-periodicity witness.
pub fn w_member(
    s: &WindowedPointSet,
    m: u32,
    m_prime: u32,
    grid_period: f64,
    search_box: (Coord, Coord),
    policy: &NumericPolicy,
) -> Result<(bool, Option<WWitness>)> {
    if m == 0 || m_prime == 0 {
        return Err(Error::InvalidParam("m and m′ must be at least 1".into()));
    }
    if !(grid_period > 0.0) {
        return Err(Error::InvalidParam("grid period must be positive".into()));
    }
    let (slo, shi) = search_box;
    let (lo, hi) = match s.window {
        Window::Box { lo, hi } => (lo, hi),
        Window::Torus { .. } => {
            return Err(Error::InvalidParam("witness scan expects a box window".into()))
        }
    };
    let reach = m_prime as f64 * grid_period + m as f64;
    for a in 0..s.dim {
        if lo[a] > slo[a] - reach + TOL || hi[a] < shi[a] + reach - TOL {
            return Err(Error::WindowTooSmall(format!(
                "window must cover the search box inflated by {reach} on axis {a}"
            )));
        }
    }

    let h = 1.0 / (4.0 * m_prime as f64);
    let mut ticks: Vec<Vec<f64>> = Vec::new();
    for a in 0..s.dim {
        let steps = ((shi[a] - slo[a]) / h).floor() as usize + 1;
        let mut t: Vec<f64> = (0..steps).map(|k| slo[a] + k as f64 * h).collect();
        t.push(0.5 * (slo[a] + shi[a]));
        t.sort_by(f64::total_cmp);
        t.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        ticks.push(t);
    }
    let mut candidates: Vec<Coord> = Vec::new();
    let mut idx = vec![0usize; s.dim];
    'gen: loop {
        let mut x = [0.0; 3];
        for a in 0..s.dim {
            x[a] = ticks[a][idx[a]];
        }
        candidates.push(x);
        let mut a = s.dim;
        loop {
            if a == 0 {
                break 'gen;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < ticks[a].len() {
                break;
            }
            idx[a] = 0;
        }
    }
    central_order(s.dim, &mut candidates);

    // Comparisons only see points near the origin; dropping the rest keeps
    // the scan fast without changing any verdict.
    let keep = m_prime as f64 * grid_period + (m.max(m_prime) as f64) + 2.0;
    let restrict = |set: &WindowedPointSet| -> WindowedPointSet {
        let mut out = set.clone();
        out.points.retain(|p| (0..set.dim).all(|a| p[a].abs() <= keep));
        out
    };
    let e_m = Entourage::Shorthand { r: m as f64 };
    let e_mp = Entourage::Shorthand { r: m_prime as f64 };
    let s_near = restrict(s);

    let mp = m_prime as i64;
    let mut shifts: Vec<Coord> = Vec::new();
    let mut a_vec = vec![-mp; s.dim];
    'shifts: loop {
        let mut v = [0.0; 3];
        for (ax, &coef) in a_vec.iter().enumerate() {
            v[ax] = -(coef as f64) * grid_period;
        }
        shifts.push(v);
        let mut ax = 0;
        loop {
            a_vec[ax] += 1;
            if a_vec[ax] <= mp {
                break;
            }
            a_vec[ax] = -mp;
            ax += 1;
            if ax == s.dim {
                break 'shifts;
            }
        }
    }

    for x in candidates {
        let mut neg_x = [0.0; 3];
        for a in 0..s.dim {
            neg_x[a] = -x[a];
        }
        let sx = restrict(&s.translated(&neg_x));
        if !entourage_member(&s_near, &sx, &e_m, policy)? {
            continue;
        }
        let mut all = true;
        for v in &shifts {
            let moved = sx.translated(v);
            if !entourage_member(&sx, &moved, &e_mp, policy)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok((true, Some(WWitness { m, m_prime, x, grid_period })));
        }
    }
    Ok((false, None))
}

/// Output of the chaotification pipeline, with the intermediate stages for
/// provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChaotifyResult {
    pub s_hat: WindowedPointSet,
    pub witness: WWitness,
    pub inner: WindowedPointSet,
    pub torus: WindowedPointSet,
}

/// Rebuilds S into a set that agrees with it on [−l, l]ⁿ yet carries an
/// exactly grid-periodic block far out along the first axis:
/// (1) extend S ∩ [−m−ε, m+ε]ⁿ to a Delone set of that box fixing [−m,m]ⁿ,
/// (2) glue its torus projection into a Delone set of the torus of side
///     L = 2(m+δ+ε),
/// (3) unroll the torus set over a grid of square blocks around
///     x₀·e₁, padded one ring beyond multiplicity m′,
/// (4) glue the kept part of S and the block into the full window.
pub fn chaotify(
    s: &WindowedPointSet,
    m: u32,
    m_prime: u32,
    l: f64,
    epsilon: f64,
    delta: f64,
) -> Result<ChaotifyResult> {
    if epsilon < delta {
        return Err(Error::ParamOrder(format!(
            "need epsilon ≥ delta, got ({epsilon}, {delta})"
        )));
    }
    if m == 0 || m_prime == 0 {
        return Err(Error::InvalidParam("m and m′ must be at least 1".into()));
    }
    if l < 0.0 {
        return Err(Error::InvalidParam(format!("l must be nonnegative, got {l}")));
    }
    let mf = m as f64;
    let f = l.max(mf);
    let need = (mf + 2.0 * epsilon).max(mf + epsilon + 1.0).max(f + 2.0 * epsilon + 1.0);
    let (wlo, whi) = match s.window {
        Window::Box { lo, hi } => (lo, hi),
        Window::Torus { .. } => {
            return Err(Error::InvalidParam("chaotification expects a box window".into()))
        }
    };
    for a in 0..s.dim {
        if wlo[a] > -need || whi[a] < need {
            return Err(Error::WindowTooSmall(format!(
                "window must cover [-{need}, {need}] on every axis"
            )));
        }
    }

    // Stage 1: Delone set of the box [−m−ε, m+ε]ⁿ agreeing with S on [−m,m]ⁿ.
    let mut a1lo = [0.0; 3];
    let mut a1hi = [0.0; 3];
    for a in 0..s.dim {
        a1lo[a] = -(mf + epsilon);
        a1hi[a] = mf + epsilon;
    }
    let a1 = Region::single_box(s.dim, a1lo, a1hi, s.window)?;
    let inner = inner_extend(s, &a1, epsilon, delta)?;

    // Stage 2: glue the projection into the torus of side 2(m+δ+ε). The
    // box sits strictly inside the fundamental square, so representatives
    // are unchanged.
    let period = 2.0 * (mf + delta + epsilon);
    let mut side = [0.0; 3];
    for a in 0..s.dim {
        side[a] = period;
    }
    let torus_window = Window::Torus { side };
    let n2 = WindowedPointSet::torus(s.dim, inner.points.clone(), side)?;
    let a2 = Region::single_box(s.dim, a1lo, a1hi, torus_window)?;
    let torus_set = glue_extend(&n2, &a2, epsilon, delta)?;

    // Stage 3: unroll over blocks; one padding ring past m′ keeps every
    // compared neighbourhood inside exactly copied territory.
    let pad = ((m_prime as f64 / period - 0.5).ceil().max(1.0)) as i64;
    let rings = m_prime as i64 + pad;
    let extent = (rings as f64 + 0.5) * period;
    let x0 = f + epsilon + extent + epsilon + 2.0;
    debug_assert!(x0 > l + (m_prime as f64 + 1.0) * period + epsilon + 1.0);

    let mut block: Vec<Coord> = Vec::new();
    let mut cell = vec![-rings; s.dim];
    'cells: loop {
        for v in &torus_set.points {
            let mut p = [0.0; 3];
            for a in 0..s.dim {
                p[a] = v[a] + cell[a] as f64 * period;
            }
            p[0] += x0;
            block.push(p);
        }
        let mut ax = 0;
        loop {
            cell[ax] += 1;
            if cell[ax] <= rings {
                break;
            }
            cell[ax] = -rings;
            ax += 1;
            if ax == s.dim {
                break 'cells;
            }
        }
    }

    // Stage 4: glue kept data and block into the final window.
    let mut flo = [0.0; 3];
    let mut fhi = [0.0; 3];
    flo[0] = -(x0 + extent + epsilon + 2.0);
    fhi[0] = x0 + extent + epsilon + 2.0;
    for a in 1..s.dim {
        let r = (f + epsilon).max(extent) + epsilon + 2.0;
        flo[a] = -r;
        fhi[a] = r;
    }
    let final_window = Window::Box { lo: flo, hi: fhi };

    let mut keep_lo = [0.0; 3];
    let mut keep_hi = [0.0; 3];
    let mut blk_lo = [0.0; 3];
    let mut blk_hi = [0.0; 3];
    for a in 0..s.dim {
        keep_lo[a] = -(f + epsilon);
        keep_hi[a] = f + epsilon;
        blk_lo[a] = -extent;
        blk_hi[a] = extent;
    }
    blk_lo[0] += x0;
    blk_hi[0] += x0;
    let a4 = Region::new(
        s.dim,
        vec![(keep_lo, keep_hi), (blk_lo, blk_hi)],
        final_window,
    )?;
    let mut seeds: Vec<Coord> = s
        .points
        .iter()
        .copied()
        .filter(|p| (0..s.dim).all(|a| p[a].abs() <= f + epsilon + TOL))
        .collect();
    seeds.extend(block);
    let n4 = WindowedPointSet { dim: s.dim, points: seeds, window: final_window, params: None };
    let s_hat = glue_extend(&n4, &a4, epsilon, delta)?;

    let mut x = [0.0; 3];
    x[0] = x0;
    Ok(ChaotifyResult {
        s_hat,
        witness: WWitness { m, m_prime, x, grid_period: period },
        inner,
        torus: torus_set,
    })
}
