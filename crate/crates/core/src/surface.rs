//! The genus-2 example surface: a regular-in-pairs 12-gon with alternating
//! interior angles, side pairings carrying directed sides onto reversed
//! partner sides, vertex-cycle validation, and orbit enumeration with
//! geometric pruning.

use crate::error::{Error, Result};
use crate::hyperbolic::{
    dist, from_disk, isometry_mapping_tangent, Isometry, OrientedGeodesic, Point, UnitTangent,
};
use crate::numeric::acosh_stable;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::f64::consts::{PI, TAU};

/// Combinatorial description of the polygon: vertex count, interior angles in
/// vertex order, and the side-identification labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub vertex_count: usize,
    pub angle_pattern: Vec<f64>,
    pub pairing_pattern: Vec<char>,
}

impl PolygonSpec {
    /// The 12-gon with angles alternating 2π/3 (even vertices) and π/3 (odd
    /// vertices) and pairing A,B,C,A,D,C,E,D,F,E,B,F. The angle parity is
    /// forced: the pairing's vertex orbits have sizes 3, 3, 6, and only the
    /// size-3 orbits can carry 2π/3 corners if every orbit is to close up to
    /// a full turn.
    pub fn standard() -> PolygonSpec {
        PolygonSpec {
            vertex_count: 12,
            angle_pattern: (0..12)
                .map(|k| if k % 2 == 0 { 2.0 * PI / 3.0 } else { PI / 3.0 })
                .collect(),
            pairing_pattern: "ABCADCEDFEBF".chars().collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertex_count;
        if n < 6 || n % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "vertex count must be even and at least 6, got {n}"
            )));
        }
        if self.angle_pattern.len() != n || self.pairing_pattern.len() != n {
            return Err(Error::InvalidParam(format!(
                "angle and pairing patterns must both have length {n}"
            )));
        }
        for (k, &a) in self.angle_pattern.iter().enumerate() {
            if !(a > 0.0 && a < PI) {
                return Err(Error::InvalidParam(format!(
                    "interior angle {k} out of range (0, π): {a}"
                )));
            }
            if (a - self.angle_pattern[k % 2]).abs() > 1e-12 {
                return Err(Error::NoSolution(
                    "only alternating two-angle patterns are supported".into(),
                ));
            }
        }
        let mut counts: HashMap<char, usize> = HashMap::new();
        for &c in &self.pairing_pattern {
            *counts.entry(c).or_insert(0) += 1;
        }
        if counts.values().any(|&c| c != 2) {
            return Err(Error::InvalidParam(
                "every pairing label must appear exactly twice".into(),
            ));
        }
        Ok(())
    }

    /// Partner side of side k under the labeling.
    pub fn pair_of(&self, k: usize) -> usize {
        let label = self.pairing_pattern[k];
        self.pairing_pattern
            .iter()
            .enumerate()
            .position(|(i, &c)| c == label && i != k)
            .expect("validated patterns pair every label")
    }
}

/// Metric realization of the polygon, centered at i in the half-plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolvedPolygon {
    pub vertices: Vec<Point>,
    pub side_length: f64,
    /// Center-to-vertex distance at the smaller interior angle.
    pub radius_sharp: f64,
    /// Center-to-vertex distance at the larger interior angle.
    pub radius_obtuse: f64,
    pub apothem: f64,
}

impl SolvedPolygon {
    pub fn center(&self) -> Point {
        Point::I
    }

    /// Interior angle measured from the realized vertices.
    pub fn interior_angle(&self, k: usize) -> f64 {
        let n = self.vertices.len();
        let v = self.vertices[k];
        let prev = self.vertices[(k + n - 1) % n];
        let next = self.vertices[(k + 1) % n];
        angle_between(
            UnitTangent::towards(v, prev).direction,
            UnitTangent::towards(v, next).direction,
        )
    }

    /// Oriented geodesic along side k, running from vertex k to vertex k+1.
    pub fn side_geodesic(&self, k: usize) -> OrientedGeodesic {
        let n = self.vertices.len();
        OrientedGeodesic::from_tangent(UnitTangent::towards(
            self.vertices[k],
            self.vertices[(k + 1) % n],
        ))
    }

    /// Hyperbolic area via the angle deficit.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let total: f64 = (0..n).map(|k| self.interior_angle(k)).sum();
        (n as f64 - 2.0) * PI - total
    }
}

fn angle_between(t1: f64, t2: f64) -> f64 {
    let mut d = (t1 - t2).rem_euclid(TAU);
    if d > PI {
        d = TAU - d;
    }
    d
}

/// Solves the central triangle of the dihedrally symmetric polygon in closed
/// form and places the vertices on alternating radii.
pub fn solve_polygon(spec: &PolygonSpec) -> Result<SolvedPolygon> {
    spec.validate()?;
    let n = spec.vertex_count;
    let central = TAU / n as f64;
    // Half-angles: each interior angle is split evenly between the two
    // central triangles meeting at that vertex.
    let he = 0.5 * spec.angle_pattern[0];
    let ho = 0.5 * spec.angle_pattern[1];
    if central + he + ho >= PI - 1e-12 {
        return Err(Error::NoSolution(format!(
            "central triangle angle sum {} is not hyperbolic",
            central + he + ho
        )));
    }
    // Angle law of cosines in the triangle (center, even vertex, odd vertex).
    let cosh_r_even = (ho.cos() + central.cos() * he.cos()) / (central.sin() * he.sin());
    let cosh_r_odd = (he.cos() + central.cos() * ho.cos()) / (central.sin() * ho.sin());
    let cosh_side = (central.cos() + he.cos() * ho.cos()) / (he.sin() * ho.sin());
    for (name, v) in [("even radius", cosh_r_even), ("odd radius", cosh_r_odd), ("side", cosh_side)]
    {
        if !(v > 1.0) {
            return Err(Error::NoSolution(format!("cosh of {name} must exceed 1, got {v}")));
        }
    }
    let r_even = acosh_stable(cosh_r_even);
    let r_odd = acosh_stable(cosh_r_odd);
    let side_length = acosh_stable(cosh_side);
    let sinh_from_cosh = |c: f64| ((c - 1.0) * (c + 1.0)).sqrt();
    let apothem = (sinh_from_cosh(cosh_r_even) * he.sin()).asinh();
    let cross = (sinh_from_cosh(cosh_r_odd) * ho.sin()).asinh();
    if (apothem - cross).abs() > 1e-12 * apothem {
        return Err(Error::NoSolution(format!(
            "apothem mismatch between vertex classes: {apothem} vs {cross}"
        )));
    }

    let mut vertices = Vec::with_capacity(n);
    for k in 0..n {
        let r = if k % 2 == 0 { r_even } else { r_odd };
        let e = (0.5 * r).tanh();
        let phi = central * k as f64;
        vertices.push(from_disk(e * phi.cos(), e * phi.sin())?);
    }

    let poly = SolvedPolygon {
        vertices,
        side_length,
        radius_sharp: if spec.angle_pattern[0] < spec.angle_pattern[1] { r_even } else { r_odd },
        radius_obtuse: if spec.angle_pattern[0] < spec.angle_pattern[1] { r_odd } else { r_even },
        apothem,
    };

    // Realization must reproduce the solved lengths and the input angles.
    for k in 0..n {
        let d = dist(poly.vertices[k], poly.vertices[(k + 1) % n]);
        if (d - side_length).abs() > 1e-10 {
            return Err(Error::NoSolution(format!(
                "side {k} length {d} differs from solved {side_length}"
            )));
        }
        let a = poly.interior_angle(k);
        if (a - spec.angle_pattern[k]).abs() > 1e-10 {
            return Err(Error::NoSolution(format!(
                "vertex {k} angle {a} differs from pattern {}",
                spec.angle_pattern[k]
            )));
        }
        let gap = poly.side_geodesic(k).dist_to(poly.center());
        if (gap - apothem).abs() > 1e-10 {
            return Err(Error::NoSolution(format!(
                "side {k} sits at distance {gap}, apothem says {apothem}"
            )));
        }
    }
    Ok(poly)
}

/// One identified vertex class: the polygon vertices in cycle order, the side
/// maps applied while walking around the class, the total turning angle, and
/// how far the holonomy word is from the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexCycle {
    pub vertices: Vec<usize>,
    pub word: Vec<usize>,
    pub angle_sum: f64,
    pub residual: f64,
}

/// Orbit element: the group element, where it sends the base point, and the
/// BFS depth at which it was first reached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub point: Point,
    pub element: Isometry,
    pub word_length: usize,
}

/// Cap on distinct elements any one enumeration may visit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_elements: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_elements: 2_000_000 }
    }
}

/// The surface group: polygon, side-pairing maps, validated vertex cycles,
/// and the injectivity radius at the base point.
#[derive(Debug, Clone)]
pub struct SurfaceGroup {
    pub spec: PolygonSpec,
    pub polygon: SolvedPolygon,
    /// Map for each directed side k, carrying side k onto reversed side pair(k).
    pub side_maps: Vec<Isometry>,
    /// One labeled generator per pairing label, in label order.
    pub generators: Vec<(char, Isometry)>,
    pub base_point: Point,
    pub vertex_cycles: Vec<VertexCycle>,
    pub injectivity_radius_at_base: f64,
    pub circumradius: f64,
    pair: Vec<usize>,
    side_geodesics: Vec<OrientedGeodesic>,
    interior_signs: Vec<f64>,
}

/// Builds the group from a solved polygon: pairing isometries, vertex-cycle
/// validation, and the injectivity radius scan.
pub fn build_side_pairings(poly: &SolvedPolygon, spec: &PolygonSpec) -> Result<SurfaceGroup> {
    spec.validate()?;
    let n = spec.vertex_count;
    let mut first: HashMap<char, usize> = HashMap::new();
    let mut pair = vec![usize::MAX; n];
    for (k, &label) in spec.pairing_pattern.iter().enumerate() {
        match first.get(&label) {
            None => {
                first.insert(label, k);
            }
            Some(&i) => {
                pair[i] = k;
                pair[k] = i;
            }
        }
    }

    let mut side_maps = vec![Isometry::IDENTITY; n];
    let mut generators = Vec::new();
    for (k, &label) in spec.pairing_pattern.iter().enumerate() {
        let j = pair[k];
        if k > j {
            continue;
        }
        let u = UnitTangent::towards(poly.vertices[k], poly.vertices[(k + 1) % n]);
        let w = UnitTangent::towards(poly.vertices[(j + 1) % n], poly.vertices[j]);
        let g = isometry_mapping_tangent(u, w);
        // The sides have equal length, so matching the start tangents carries
        // the whole directed side k onto reversed side j; check the far end.
        let err = dist(g.apply(poly.vertices[(k + 1) % n]), poly.vertices[j]);
        if err > 1e-9 {
            return Err(Error::VertexCycleFailure(format!(
                "pairing {label} misses the far endpoint by {err}"
            )));
        }
        if g.trace().abs() <= 2.0 + 1e-10 {
            return Err(Error::VertexCycleFailure(format!(
                "pairing {label} is not hyperbolic: |trace| = {}",
                g.trace().abs()
            )));
        }
        side_maps[k] = g;
        side_maps[j] = g.inverse();
        generators.push((label, g));
    }
    generators.sort_by_key(|&(label, _)| label);

    // Walk each identified vertex class: side_maps[k] sends vertex k to
    // vertex pair(k)+1, and the closed walk must be the identity with a full
    // 2π of interior angle.
    let mut cycles = Vec::new();
    let mut seen = vec![false; n];
    for k0 in 0..n {
        if seen[k0] {
            continue;
        }
        let mut vertices = Vec::new();
        let mut word = Vec::new();
        let mut angle_sum = 0.0;
        let mut h = Isometry::IDENTITY;
        let mut k = k0;
        loop {
            seen[k] = true;
            vertices.push(k);
            word.push(k);
            angle_sum += poly.interior_angle(k);
            h = side_maps[k].compose(&h);
            k = (pair[k] + 1) % n;
            if k == k0 {
                break;
            }
        }
        let residual = h.identity_defect();
        if residual > 1e-8 {
            return Err(Error::VertexCycleFailure(format!(
                "cycle through vertex {k0} has holonomy defect {residual:.3e}"
            )));
        }
        if (angle_sum - TAU).abs() > 1e-9 {
            return Err(Error::VertexCycleFailure(format!(
                "cycle through vertex {k0} has angle sum {angle_sum}, want 2π"
            )));
        }
        cycles.push(VertexCycle { vertices, word, angle_sum, residual });
    }

    let side_geodesics: Vec<OrientedGeodesic> = (0..n).map(|k| poly.side_geodesic(k)).collect();
    let center = poly.center();
    let interior_signs: Vec<f64> =
        side_geodesics.iter().map(|g| g.project(center).1.signum()).collect();

    let mut group = SurfaceGroup {
        spec: spec.clone(),
        polygon: poly.clone(),
        side_maps,
        generators,
        base_point: center,
        vertex_cycles: cycles,
        injectivity_radius_at_base: f64::NAN,
        circumradius: poly.radius_sharp.max(poly.radius_obtuse),
        pair,
        side_geodesics,
        interior_signs,
    };
    group.injectivity_radius_at_base =
        group.injectivity_radius(4.0 * poly.apothem, &EnumerationBudget::default())?;
    Ok(group)
}

impl SurfaceGroup {
    /// The standard genus-2 surface, with its vertex-orbit structure checked.
    pub fn standard() -> Result<SurfaceGroup> {
        let spec = PolygonSpec::standard();
        let poly = solve_polygon(&spec)?;
        let group = build_side_pairings(&poly, &spec)?;
        let mut sizes: Vec<usize> =
            group.vertex_cycles.iter().map(|c| c.vertices.len()).collect();
        sizes.sort_unstable();
        if sizes != [3, 3, 6] {
            return Err(Error::VertexCycleFailure(format!(
                "standard pairing should give vertex orbits of sizes 3, 3, 6, got {sizes:?}"
            )));
        }
        Ok(group)
    }

    pub fn pair_of(&self, side: usize) -> usize {
        self.pair[side]
    }

    /// Signed slack of z against side k: positive inside the polygon's
    /// half-plane, negative beyond it.
    fn side_margin(&self, k: usize, z: Point) -> f64 {
        self.side_geodesics[k].project(z).1 * self.interior_signs[k]
    }

    /// Whether z lies in the (tol-inflated) closed polygon.
    pub fn contains(&self, z: Point, tol: f64) -> bool {
        (0..self.spec.vertex_count).all(|k| self.side_margin(k, z) >= -tol)
    }

    /// Folds z into the fundamental polygon: returns (g, g·z) with g·z inside.
    ///
    /// Repeatedly crosses the most-violated side. The polygon is the
    /// Dirichlet domain of the base point, so each crossing strictly shrinks
    /// the distance to the center and the walk terminates.
    pub fn locate(&self, z: Point) -> Result<(Isometry, Point)> {
        let mut g = Isometry::IDENTITY;
        let mut p = z;
        for _ in 0..100_000 {
            let worst = (0..self.spec.vertex_count)
                .map(|k| (k, self.side_margin(k, p)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("polygon has sides");
            if worst.1 >= -1e-9 {
                return Ok((g, p));
            }
            g = self.side_maps[worst.0].compose(&g);
            p = self.side_maps[worst.0].apply(p);
        }
        Err(Error::NotFoundWithinBudget(format!(
            "point ({}, {}) did not fold into the polygon within 100000 steps",
            z.x, z.y
        )))
    }

    /// Half the minimal displacement of the base point over elements found in
    /// a scan ball. The exploration bound shrinks as better candidates
    /// appear, so large scan radii stay cheap once the true minimum is seen.
    pub fn injectivity_radius(&self, scan_radius: f64, budget: &EnumerationBudget) -> Result<f64> {
        if scan_radius <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "scan radius must be positive, got {scan_radius}"
            )));
        }
        let slack = 2.0 * self.circumradius + 0.1;
        let mut best = scan_radius;
        let mut set = IsometrySet::new(1e-6);
        let mut queue = VecDeque::new();
        set.insert_if_absent(&Isometry::IDENTITY);
        queue.push_back(Isometry::IDENTITY);
        while let Some(g) = queue.pop_front() {
            for m in &self.side_maps {
                let h = g.compose(m);
                let d = dist(h.apply(self.base_point), self.base_point);
                if d <= best + slack && set.insert_if_absent(&h) {
                    if set.len() > budget.max_elements {
                        return Err(Error::BudgetExceeded {
                            kept: set.len(),
                            cap: budget.max_elements,
                        });
                    }
                    if d > 1e-9 && d < best {
                        best = d;
                    }
                    queue.push_back(h);
                }
            }
        }
        Ok(0.5 * best)
    }

    /// All distinct elements moving the base point at most `radius`, sorted
    /// by (displacement, matrix entries). Exploration is pruned at
    /// radius + one circumradius: every tile crossed by a geodesic from the
    /// base to a qualifying orbit point has its center that close, so the
    /// breadth-first chain to each output never leaves the pruned ball.
    pub fn group_ball(&self, radius: f64, budget: &EnumerationBudget) -> Result<Vec<OrbitPoint>> {
        if radius <= 0.0 {
            return Err(Error::InvalidParam(format!("radius must be positive, got {radius}")));
        }
        let explore = radius + self.circumradius + 0.1;
        let mut set = IsometrySet::new(1e-6);
        let mut queue = VecDeque::new();
        let mut out: Vec<(f64, OrbitPoint)> = Vec::new();
        set.insert_if_absent(&Isometry::IDENTITY);
        queue.push_back((Isometry::IDENTITY, 0usize));
        out.push((
            0.0,
            OrbitPoint { point: self.base_point, element: Isometry::IDENTITY, word_length: 0 },
        ));
        while let Some((g, wl)) = queue.pop_front() {
            for m in &self.side_maps {
                let h = g.compose(m);
                let p = h.apply(self.base_point);
                let d = dist(p, self.base_point);
                if d <= explore && set.insert_if_absent(&h) {
                    if set.len() > budget.max_elements {
                        return Err(Error::BudgetExceeded {
                            kept: out.len(),
                            cap: budget.max_elements,
                        });
                    }
                    if d <= radius {
                        out.push((d, OrbitPoint { point: p, element: h, word_length: wl + 1 }));
                    }
                    queue.push_back((h, wl + 1));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.total_cmp(&b.0).then_with(|| {
                let ea = a.1.element.entries();
                let eb = b.1.element.entries();
                ea.iter()
                    .zip(eb.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        Ok(out.into_iter().map(|(_, op)| op).collect())
    }

    /// Every orbit point within `rho` of the geodesic segment ell([t0, t1]),
    /// reached by a breadth-first walk over tiles meeting the inflated tube
    /// plus a bridge corridor from the base tile. Output sorted by the
    /// projected coordinates (t, s).
    pub fn orbit_near_segment(
        &self,
        ell: &OrientedGeodesic,
        t0: f64,
        t1: f64,
        rho: f64,
        budget: &EnumerationBudget,
    ) -> Result<Vec<OrbitPoint>> {
        if t0 >= t1 {
            return Err(Error::ParamOrder(format!("segment needs t0 < t1, got [{t0}, {t1}]")));
        }
        if rho <= 0.0 {
            return Err(Error::InvalidParam(format!("tube radius must be positive, got {rho}")));
        }
        let slack = 2.0 * self.circumradius + 0.1;
        let explore_rho = rho + slack;
        // Corridor from the base tile to the tube, so the walk stays
        // connected even when the base sits far from the segment.
        let (tb, _) = ell.project(self.base_point);
        let foot = ell.point_at(tb.clamp(t0, t1));
        let bridge_len = dist(self.base_point, foot);
        let bridge = if bridge_len > 1e-9 {
            Some(OrientedGeodesic::from_tangent(UnitTangent::towards(self.base_point, foot)))
        } else {
            None
        };
        let in_scope = |p: Point| -> bool {
            if ell.dist_to_segment(p, t0, t1) <= explore_rho {
                return true;
            }
            match &bridge {
                Some(br) => br.dist_to_segment(p, 0.0, bridge_len) <= slack,
                None => dist(p, self.base_point) <= slack,
            }
        };

        let mut set = FermiSet::new();
        let mut queue = VecDeque::new();
        let mut out: Vec<(f64, f64, OrbitPoint)> = Vec::new();
        let (t_id, s_id) = ell.project(self.base_point);
        set.insert_if_absent(t_id, s_id, self.base_point);
        queue.push_back((Isometry::IDENTITY, 0usize));
        if ell.dist_to_segment(self.base_point, t0, t1) <= rho {
            out.push((
                t_id,
                s_id,
                OrbitPoint { point: self.base_point, element: Isometry::IDENTITY, word_length: 0 },
            ));
        }
        while let Some((g, wl)) = queue.pop_front() {
            for m in &self.side_maps {
                let h = g.compose(m);
                let p = h.apply(self.base_point);
                if !in_scope(p) {
                    continue;
                }
                let (t, s) = ell.project(p);
                if set.insert_if_absent(t, s, p) {
                    if set.len() > budget.max_elements {
                        return Err(Error::BudgetExceeded {
                            kept: out.len(),
                            cap: budget.max_elements,
                        });
                    }
                    if ell.dist_to_segment(p, t0, t1) <= rho {
                        out.push((t, s, OrbitPoint { point: p, element: h, word_length: wl + 1 }));
                    }
                    queue.push_back((h, wl + 1));
                }
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Ok(out.into_iter().map(|(_, _, op)| op).collect())
    }
}

/// Dedup set for group elements keyed by quantized matrix entries. Distinct
/// elements of a cocompact torsion-free group differ by a definite
/// displacement, which at ball scale is far above floating-point drift, so a
/// per-entry tolerance match is unambiguous.
struct IsometrySet {
    grid: f64,
    map: HashMap<[i128; 4], Vec<Isometry>>,
    len: usize,
}

impl IsometrySet {
    fn new(grid: f64) -> IsometrySet {
        IsometrySet { grid, map: HashMap::new(), len: 0 }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn primary_key(&self, g: &Isometry) -> [i128; 4] {
        let e = g.entries();
        [0, 1, 2, 3].map(|i| (e[i] / self.grid).round() as i128)
    }

    /// Cells to probe: the rounded cell, plus the neighbor for any entry
    /// sitting close to a cell boundary.
    fn probe_keys(&self, g: &Isometry) -> Vec<[i128; 4]> {
        let e = g.entries();
        let mut options: [(i128, Option<i128>); 4] = [(0, None); 4];
        for i in 0..4 {
            let q = e[i] / self.grid;
            let k = q.round();
            let frac = q - k;
            options[i] = (k as i128, (frac.abs() > 0.5 - 1e-3).then(|| (k + frac.signum()) as i128));
        }
        let mut keys = Vec::with_capacity(4);
        let choices =
            |o: (i128, Option<i128>)| -> Vec<i128> { std::iter::once(o.0).chain(o.1).collect() };
        for a in choices(options[0]) {
            for b in choices(options[1]) {
                for c in choices(options[2]) {
                    for d in choices(options[3]) {
                        keys.push([a, b, c, d]);
                    }
                }
            }
        }
        keys
    }

    fn insert_if_absent(&mut self, g: &Isometry) -> bool {
        for key in self.probe_keys(g) {
            if let Some(v) = self.map.get(&key) {
                if v.iter().any(|m| m.proj_dist(g) <= self.grid) {
                    return false;
                }
            }
        }
        self.map.entry(self.primary_key(g)).or_default().push(*g);
        self.len += 1;
        true
    }
}

/// Dedup set for orbit points keyed by their coordinates along a fixed
/// geodesic. Used for long-tube walks where matrix entries grow too large to
/// quantize; a coordinate match is confirmed by an exact point-distance check
/// so no false merges can happen regardless of how far the tube reaches.
struct FermiSet {
    map: HashMap<i64, Vec<(f64, f64, Point)>>,
    len: usize,
}

const FERMI_BUCKET: f64 = 1e-3;
const FERMI_TOL: f64 = 1e-6;

impl FermiSet {
    fn new() -> FermiSet {
        FermiSet { map: HashMap::new(), len: 0 }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn insert_if_absent(&mut self, t: f64, s: f64, p: Point) -> bool {
        let k = (t / FERMI_BUCKET).floor() as i64;
        for key in [k - 1, k, k + 1] {
            if let Some(v) = self.map.get(&key) {
                for &(tt, ss, pp) in v {
                    if (tt - t).abs() <= FERMI_TOL
                        && (ss - s).abs() <= FERMI_TOL
                        && dist(p, pp) <= FERMI_TOL
                    {
                        return false;
                    }
                }
            }
        }
        self.map.entry(k).or_default().push((t, s, p));
        self.len += 1;
        true
    }
}
