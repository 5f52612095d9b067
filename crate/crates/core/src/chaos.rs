//! Closed-geodesic diagnostics: class enumeration and length spectrum,
//! periodic approximation of tube sets, first-entry time sampling for the
//! disk-coverage condition, and the arithmetic-spectrum scan.

use crate::cutproject::{cut_project, TubeConfig};
use crate::delone::entourage_member;
use crate::error::{Error, Result};
use crate::hyperbolic::{
    axis_and_length, dist, isometry_mapping_tangent, from_disk, Isometry, OrientedGeodesic,
    Point, UnitTangent,
};
use crate::numeric::{acosh_stable, NumericPolicy};
use crate::surface::{EnumerationBudget, SurfaceGroup};
use crate::window::{Entourage, WindowedPointSet};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;

/// A conjugacy class of closed geodesics: a primitive hyperbolic
/// representative, its translation length, and its oriented axis. The
/// element translates the axis by +length.
#[derive(Debug, Clone)]
pub struct ClosedGeodesic {
    pub element: Isometry,
    pub length: f64,
    pub axis: OrientedGeodesic,
    pub word_length: usize,
}

/// Distinct primitive class lengths up to the enumeration cutoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LengthSpectrum {
    pub lengths: Vec<f64>,
    pub cutoff: f64,
}

impl LengthSpectrum {
    pub fn from_classes(
        classes: &[ClosedGeodesic],
        cutoff: f64,
        policy: &NumericPolicy,
    ) -> LengthSpectrum {
        let mut lengths: Vec<f64> = classes.iter().map(|c| c.length).collect();
        lengths.sort_by(f64::total_cmp);
        lengths.dedup_by(|a, b| (*a - *b).abs() <= policy.coalesce);
        LengthSpectrum { lengths, cutoff }
    }

    pub fn systole(&self) -> Option<f64> {
        self.lengths.first().copied()
    }
}

fn quantize(g: &Isometry, tol: f64) -> [i64; 4] {
    let e = g.entries();
    let mut k = [0i64; 4];
    for (i, v) in e.iter().enumerate() {
        k[i] = (v / tol).round() as i64;
    }
    k
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }
    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[ri.max(rj)] = ri.min(rj);
        }
    }
}

/// One representative per detected conjugacy class of closed geodesics with
/// translation length at most the cutoff.
///
/// Candidates come from the element ball that displacement bounds force on
/// classes whose axis meets the base tile. Proper powers drop out because
/// the stabilizer of an axis is cyclic: any longer element on an already
/// seen oriented axis is a power of the shortest one. Conjugacy collapses
/// by hashing conjugates over a bounded conjugator ball; conjugators
/// outside the ball can split one class into two listed representatives,
/// so counts may over-state, never under-state, the classes found.
pub fn enumerate_closed(
    group: &SurfaceGroup,
    length_cutoff: f64,
    budget: &EnumerationBudget,
    policy: &NumericPolicy,
) -> Result<Vec<ClosedGeodesic>> {
    if !(length_cutoff > 0.0) {
        return Err(Error::InvalidParam(format!(
            "length cutoff must be positive, got {length_cutoff}"
        )));
    }
    let r_near = group.circumradius + 0.05;
    // cosh(d(p, g·p)/2) = cosh(len/2)·cosh(dist(p, axis)) bounds the
    // displacement of any sought representative at the base point.
    let reach = 2.0 * acosh_stable((length_cutoff / 2.0).cosh() * r_near.cosh()) + 0.05;
    let ball = group.group_ball(reach, budget)?;

    struct Cand {
        element: Isometry,
        length: f64,
        axis: OrientedGeodesic,
        word_length: usize,
    }
    let mut cands: Vec<Cand> = Vec::new();
    for op in &ball {
        if op.word_length == 0 {
            continue;
        }
        let Ok((axis, length)) = axis_and_length(&op.element) else { continue };
        if length > length_cutoff + 1e-9 || axis.dist_to(group.base_point) > r_near {
            continue;
        }
        cands.push(Cand { element: op.element, length, axis, word_length: op.word_length });
    }

    let same_axis = |a: &OrientedGeodesic, b: &OrientedGeodesic| {
        a.alpha.approx_eq(b.alpha, 1e-8) && a.omega.approx_eq(b.omega, 1e-8)
    };
    let mut primitive = vec![true; cands.len()];
    for i in 0..cands.len() {
        for j in 0..cands.len() {
            if i != j
                && cands[i].length > cands[j].length + 1e-6
                && same_axis(&cands[i].axis, &cands[j].axis)
            {
                primitive[i] = false;
                break;
            }
        }
    }

    let conj_reach = 2.0 * group.circumradius + 1.0;
    let conjugators = group.group_ball(conj_reach, budget)?;
    let mut uf = UnionFind::new(cands.len());
    let mut seen: HashMap<[i64; 4], usize> = HashMap::new();
    for (i, cand) in cands.iter().enumerate() {
        if !primitive[i] {
            continue;
        }
        for c in &conjugators {
            let h = c.element.compose(&cand.element).compose(&c.element.inverse());
            match seen.entry(quantize(&h, policy.matrix_dedup)) {
                std::collections::hash_map::Entry::Occupied(e) => uf.union(i, *e.get()),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(i);
                }
            }
        }
    }

    let mut best: HashMap<usize, usize> = HashMap::new();
    for i in 0..cands.len() {
        if !primitive[i] {
            continue;
        }
        let root = uf.find(i);
        let better = match best.get(&root) {
            None => true,
            Some(&j) => {
                let (a, b) = (&cands[i], &cands[j]);
                (a.word_length, a.length) < (b.word_length, b.length)
            }
        };
        if better {
            best.insert(root, i);
        }
    }
    let mut out: Vec<ClosedGeodesic> = best
        .into_values()
        .map(|i| {
            let c = &cands[i];
            ClosedGeodesic {
                element: c.element,
                length: c.length,
                axis: c.axis.clone(),
                word_length: c.word_length,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.length.total_cmp(&b.length).then_with(|| {
            a.element
                .entries()
                .iter()
                .zip(b.element.entries().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(out)
}

/// Reduces a hyperbolic element to the primitive root it is a power of, by
/// testing axis translations of length/k for group membership.
fn primitive_root(group: &SurfaceGroup, h: &Isometry, length: f64) -> Result<(Isometry, f64)> {
    let (axis, _) = axis_and_length(h)?;
    let mut cur = *h;
    let mut cur_len = length;
    'reduce: loop {
        let max_k = ((cur_len / 0.4).floor() as usize).min(24);
        for k in 2..=max_k.max(1) {
            let lam = cur_len / k as f64;
            let root = isometry_mapping_tangent(axis.tangent_at(0.0), axis.tangent_at(lam));
            let mut p = Isometry::IDENTITY;
            for _ in 0..k {
                p = p.compose(&root);
            }
            if p.proj_dist(&cur) > 1e-6 {
                continue;
            }
            // Membership: fold root·base back; the locating element must
            // invert root exactly, since only the base itself sits in the
            // base tile's orbit.
            let (w, _) = group.locate(root.apply(group.base_point))?;
            if w.compose(&root).identity_defect() <= 1e-6 {
                cur = root;
                cur_len = lam;
                continue 'reduce;
            }
        }
        return Ok((cur, cur_len));
    }
}

/// A closed geodesic approximating a given one at entourage scale r.
#[derive(Debug, Clone)]
pub struct ClosedApprox {
    pub class: ClosedGeodesic,
    pub reversed_matched: bool,
    pub verified: bool,
}

/// Finds a closed geodesic whose tube set matches the one of `ell` at scale
/// N_r, by closing longer and longer corridor segments of `ell` into group
/// elements and testing their axes. The matched axis is taken with reversed
/// orientation (tangent near the reversal of ell's tangent at 0) and the
/// comparison reflects its coordinates accordingly.
pub fn approx_by_closed(
    group: &SurfaceGroup,
    ell: &OrientedGeodesic,
    r: f64,
    cfg: &TubeConfig,
    max_word: usize,
    budget: &EnumerationBudget,
    policy: &NumericPolicy,
) -> Result<ClosedApprox> {
    if !(r > 0.0) {
        return Err(Error::InvalidParam(format!("entourage scale must be positive, got {r}")));
    }
    let w = r + 1.0 / r + 2.0;
    let s_ell = cut_project(group, ell, cfg, (-w, w), budget)?;
    let lhs = WindowedPointSet::from_projected(&s_ell)?;
    let e = Entourage::shorthand(r)?;

    let span_max = 24.0;
    let corridor_rho = group.circumradius + 0.2;
    let corridor =
        group.orbit_near_segment(ell, -span_max / 2.0 - 2.0, span_max / 2.0 + 2.0, corridor_rho, budget)?;
    let mut tiles: Vec<(f64, usize)> = corridor
        .iter()
        .enumerate()
        .map(|(i, op)| (ell.project(op.point).0, i))
        .collect();
    tiles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nearest = |target: f64| -> Option<&crate::surface::OrbitPoint> {
        tiles
            .iter()
            .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
            .map(|&(_, i)| &corridor[i])
    };

    let mut span = 6.0;
    while span <= span_max {
        let (Some(plus), Some(minus)) = (nearest(span / 2.0), nearest(-span / 2.0)) else {
            break;
        };
        let wl = plus.word_length + minus.word_length;
        if wl > max_word {
            break;
        }
        span += 2.0;
        let h = plus.element.compose(&minus.element.inverse());
        let Ok((axis, length)) = axis_and_length(&h) else { continue };
        let (tf, sf) = axis.project(ell.point_at(0.0));
        if sf.abs() > 0.6 {
            continue;
        }
        let (prim, prim_len) = primitive_root(group, &h, length)?;
        let anchored = axis.shifted(tf);
        let k_rev = anchored.reversed();
        let s_k = cut_project(group, &k_rev, cfg, (-w, w), budget)?;
        let rhs = WindowedPointSet::from_projected(&s_k.reflected())?;
        if entourage_member(&lhs, &rhs, &e, policy)? {
            return Ok(ClosedApprox {
                class: ClosedGeodesic {
                    element: prim.inverse(),
                    length: prim_len,
                    axis: k_rev,
                    word_length: wl,
                },
                reversed_matched: true,
                verified: true,
            });
        }
    }
    Err(Error::NotFoundWithinBudget(format!(
        "no closed geodesic matched at scale {r} within word length {max_word}"
    )))
}

/// Finds a translation a with (tube set of ell) − a matching the tube set
/// of the target at scale N_s. Candidates are coordinate differences,
/// scanned from the smallest magnitude outward.
pub fn translate_match(
    group: &SurfaceGroup,
    ell: &OrientedGeodesic,
    k_target: &OrientedGeodesic,
    s: f64,
    window: f64,
    cfg: &TubeConfig,
    budget: &EnumerationBudget,
    policy: &NumericPolicy,
) -> Result<(f64, bool)> {
    if !(s > 0.0) {
        return Err(Error::InvalidParam(format!("entourage scale must be positive, got {s}")));
    }
    let w_k = s + 1.0 / s + 2.0;
    if window / 2.0 <= w_k + 1.0 {
        return Err(Error::WindowTooSmall(format!(
            "window {window} cannot host a scale-{s} comparison"
        )));
    }
    let s_k = cut_project(group, k_target, cfg, (-w_k, w_k), budget)?;
    let half = window / 2.0;
    let s_ell = cut_project(group, ell, cfg, (-half, half), budget)?;
    let rhs = WindowedPointSet::from_projected(&s_k)?;
    let e = Entourage::shorthand(s)?;

    let a_cap = half - w_k - 1e-9;
    let mut cands: Vec<f64> = Vec::new();
    for &tl in &s_ell.coords {
        for &tk in &s_k.coords {
            let a = tl - tk;
            if a.abs() <= a_cap {
                cands.push(a);
            }
        }
    }
    cands.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
    cands.dedup_by(|x, y| (*x - *y).abs() <= 1e-6);
    for a in cands {
        let lhs = WindowedPointSet::from_projected(&s_ell.shifted(-a))?;
        if entourage_member(&lhs, &rhs, &e, policy)? {
            return Ok((a, true));
        }
    }
    Err(Error::NotFoundWithinBudget(format!(
        "no translate matched at scale {s} over window {window}"
    )))
}

/// First-entry statistics of sampled geodesics into the ρ-disk system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauSupReport {
    pub sup_estimate: f64,
    pub tangency_suspects: usize,
    pub truncated_samples: usize,
    pub samples: usize,
}

/// Samples unit tangents (base points on a golden-angle spiral folded into
/// the fundamental tile, evenly spread directions) and flows each until it
/// enters an open ρ-disk around an orbit point, truncating at the horizon.
/// Returns the largest entry time seen, the number of grazing passes
/// (approach within 1e−4 of ρ that recedes again), and the truncation
/// count.
pub fn tau_sup_estimate(
    group: &SurfaceGroup,
    rho: f64,
    sample_grid: (usize, usize),
    horizon: f64,
    budget: &EnumerationBudget,
) -> Result<TauSupReport> {
    if !(rho > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidParam(
            "tube radius and horizon must be positive".into(),
        ));
    }
    let (n_base, n_dir) = sample_grid;
    if n_base == 0 || n_dir == 0 {
        return Err(Error::InvalidParam("sample grid must be nonempty".into()));
    }
    // Flow state stays within one tile of the base; orbit points this far
    // out decide every clearance the capped step can reach.
    let orbit: Vec<Point> = group
        .group_ball(group.circumradius + rho + 1.5, budget)?
        .iter()
        .map(|op| op.point)
        .collect();
    let clearance = |z: Point| -> f64 {
        orbit.iter().map(|p| dist(z, *p)).fold(f64::INFINITY, f64::min) - rho
    };

    let golden = TAU * (1.0 - 0.5 * (5.0_f64.sqrt() - 1.0));
    let mut bases: Vec<Point> = Vec::with_capacity(n_base);
    for b in 0..n_base {
        let frac = (b as f64 + 0.5) / n_base as f64;
        let r_h = group.circumradius * frac.sqrt();
        let theta = b as f64 * golden;
        let r_e = (r_h / 2.0).tanh();
        let p = from_disk(r_e * theta.cos(), r_e * theta.sin())?;
        let (_, folded) = group.locate(p)?;
        bases.push(folded);
    }

    let mut sup = 0.0_f64;
    let mut suspects = 0usize;
    let mut truncated = 0usize;
    const ENTER: f64 = 1e-9;
    const GRAZE_IN: f64 = 1e-4;
    const GRAZE_OUT: f64 = 1e-3;

    for &p in &bases {
        for j in 0..n_dir {
            let dir = TAU * j as f64 / n_dir as f64 + 0.017;
            let mut geo = OrientedGeodesic::from_tangent(UnitTangent::new(p, dir));
            let mut t_loc = 0.0_f64;
            let mut t_global = 0.0_f64;
            let mut low_mark = false;
            let mut grazed = false;
            let tau;
            loop {
                let z = geo.point_at(t_loc);
                let c = clearance(z);
                if c <= ENTER {
                    if t_global == 0.0 {
                        tau = 0.0;
                        break;
                    }
                    // Refine the crossing inside the last step.
                    let step_back = t_loc;
                    let mut lo = 0.0_f64;
                    let mut hi = step_back;
                    for _ in 0..50 {
                        let mid = 0.5 * (lo + hi);
                        if clearance(geo.point_at(mid)) <= ENTER {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                        if hi - lo < 1e-7 {
                            break;
                        }
                    }
                    tau = t_global - step_back + hi;
                    break;
                }
                if c <= GRAZE_IN {
                    low_mark = true;
                } else if low_mark && c >= GRAZE_OUT {
                    grazed = true;
                    low_mark = false;
                }
                if t_global >= horizon {
                    tau = horizon;
                    truncated += 1;
                    break;
                }
                let step = (0.9 * c).clamp(1e-3, 0.5);
                // Re-anchor so the crossing refinement always looks back
                // from the current anchor, and fold stray points home.
                geo = geo.shifted(t_loc);
                t_loc = step;
                t_global += step;
                let znew = geo.point_at(t_loc);
                if dist(znew, group.base_point) > group.circumradius + 0.3 {
                    let (fold, _) = group.locate(znew)?;
                    geo = geo.transported(&fold)?;
                }
            }
            sup = sup.max(tau);
            if grazed {
                suspects += 1;
            }
        }
    }
    Ok(TauSupReport {
        sup_estimate: sup,
        tangency_suspects: suspects,
        truncated_samples: truncated,
        samples: n_base * n_dir,
    })
}

/// Scans for a common quantum ω putting every spectrum length on the grid
/// ωℕ within the tolerance. Candidates are the divisors of the listed
/// lengths with a micro-grid around each; the largest passing ω wins.
pub fn dalbo_check(
    spectrum: &LengthSpectrum,
    omega_min: f64,
    tol: f64,
) -> Result<(bool, Option<f64>)> {
    if spectrum.lengths.is_empty() {
        return Err(Error::InvalidParam("spectrum must be nonempty".into()));
    }
    if !(omega_min > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParam("omega_min and tol must be positive".into()));
    }
    let l_min = spectrum.lengths[0];
    let passes = |omega: f64| {
        spectrum.lengths.iter().all(|&l| {
            let n = (l / omega).round().max(1.0);
            (l - omega * n).abs() <= tol
        })
    };
    // Exact divisors first so a clean common quantum is reported as such;
    // the perturbed grid only catches quanta the divisors straddle.
    let mut exact: Vec<f64> = Vec::new();
    let mut fuzzed: Vec<f64> = Vec::new();
    for &l in &spectrum.lengths {
        let k_max = (l / omega_min).floor() as usize;
        for k in 1..=k_max.max(1) {
            let base = l / k as f64;
            for off in [-tol, -0.5 * tol, 0.0, 0.5 * tol, tol] {
                let omega = base + off;
                if omega >= omega_min && omega <= l_min + tol {
                    if off == 0.0 {
                        exact.push(omega);
                    } else {
                        fuzzed.push(omega);
                    }
                }
            }
        }
    }
    for tier in [&mut exact, &mut fuzzed] {
        tier.sort_by(|a, b| b.total_cmp(a));
        tier.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        for &mut omega in tier {
            if passes(omega) {
                return Ok((true, Some(omega)));
            }
        }
    }
    Ok((false, None))
}

/// Verdict on the two usability conditions of a tube radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    Pass,
    FailRadius,
    CoverageUnverified,
    CoverageSuspect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rho: f64,
    pub injectivity_radius: f64,
    pub radius_ok: bool,
    pub tau: TauSupReport,
    pub verdict: ConditionVerdict,
}

/// Checks the radius bound exactly and the disk-coverage condition
/// empirically: truncated first-entry samples leave coverage unverified,
/// grazing samples mark suspected tangencies.
pub fn condition_check(
    group: &SurfaceGroup,
    rho: f64,
    sample_grid: (usize, usize),
    horizon: f64,
    budget: &EnumerationBudget,
) -> Result<ConditionReport> {
    let inj = group.injectivity_radius_at_base;
    let radius_ok = rho < inj;
    let tau = tau_sup_estimate(group, rho, sample_grid, horizon, budget)?;
    let verdict = if !radius_ok {
        ConditionVerdict::FailRadius
    } else if tau.truncated_samples > 0 {
        ConditionVerdict::CoverageUnverified
    } else if tau.tangency_suspects > 0 {
        ConditionVerdict::CoverageSuspect
    } else {
        ConditionVerdict::Pass
    };
    Ok(ConditionReport { rho, injectivity_radius: inj, radius_ok, tau, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::TubeMode;
    use crate::delone::find_periods;
    use crate::window::Shape;

    fn group() -> SurfaceGroup {
        SurfaceGroup::standard().unwrap()
    }

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    fn generator_length(g: &Isometry) -> f64 {
        2.0 * crate::numeric::acosh_stable(g.trace().abs() / 2.0)
    }

    #[test]
    fn generator_classes_present() {
        let grp = group();
        let cutoff = grp
            .generators
            .iter()
            .map(|(_, g)| generator_length(g))
            .fold(0.0_f64, f64::max)
            + 0.1;
        let classes = enumerate_closed(&grp, cutoff, &budget(), &policy()).unwrap();
        assert!(!classes.is_empty());
        for (label, g) in &grp.generators {
            let len = generator_length(g);
            assert!(
                classes.iter().any(|c| (c.length - len).abs() < 1e-8),
                "no class at the length of generator {label}"
            );
        }
    }

    #[test]
    fn enumeration_empty_below_systole() {
        let grp = group();
        let classes = enumerate_closed(&grp, 3.4, &budget(), &policy()).unwrap();
        let systole = classes.iter().map(|c| c.length).fold(f64::INFINITY, f64::min);
        assert!(systole.is_finite());
        let below = enumerate_closed(&grp, 0.7 * systole, &budget(), &policy()).unwrap();
        assert!(below.is_empty());
    }

    #[test]
    fn class_lengths_monotone_in_cutoff() {
        let grp = group();
        let small = enumerate_closed(&grp, 3.5, &budget(), &policy()).unwrap();
        let large = enumerate_closed(&grp, 4.2, &budget(), &policy()).unwrap();
        assert!(small.len() <= large.len());
        for c in &small {
            assert!(
                large.iter().any(|d| (d.length - c.length).abs() < 1e-9),
                "class of length {} lost at larger cutoff",
                c.length
            );
        }
    }

    #[test]
    fn classes_translate_their_axes() {
        let grp = group();
        for c in enumerate_closed(&grp, 3.6, &budget(), &policy()).unwrap() {
            let moved = c.element.apply(c.axis.point_at(0.0));
            let target = c.axis.point_at(c.length);
            assert!(dist(moved, target) < 1e-8);
        }
    }

    #[test]
    fn power_lengths_are_multiples() {
        let grp = group();
        let (_, g) = grp.generators[0];
        let (_, len) = axis_and_length(&g).unwrap();
        let g2 = g.compose(&g);
        let g3 = g2.compose(&g);
        let (_, len2) = axis_and_length(&g2).unwrap();
        let (_, len3) = axis_and_length(&g3).unwrap();
        assert!((len2 - 2.0 * len).abs() < 1e-8);
        assert!((len3 - 3.0 * len).abs() < 1e-8);
    }

    #[test]
    fn lengths_survive_conjugation() {
        let grp = group();
        let classes = enumerate_closed(&grp, 3.6, &budget(), &policy()).unwrap();
        let conj = isometry_mapping_tangent(
            UnitTangent::new(Point::new(0.0, 1.0), 0.3),
            UnitTangent::new(Point::new(1.3, 0.6), 1.2),
        );
        for c in &classes {
            let moved = conj.compose(&c.element).compose(&conj.inverse());
            let (_, len) = axis_and_length(&moved).unwrap();
            assert!((len - c.length).abs() < 1e-7);
        }
        let spec = LengthSpectrum::from_classes(&classes, 3.6, &policy());
        let moved: Vec<ClosedGeodesic> = classes
            .iter()
            .map(|c| {
                let m = conj.compose(&c.element).compose(&conj.inverse());
                let (axis, length) = axis_and_length(&m).unwrap();
                ClosedGeodesic { element: m, length, axis, word_length: c.word_length }
            })
            .collect();
        let spec2 = LengthSpectrum::from_classes(&moved, 3.6, &policy());
        assert_eq!(spec.lengths.len(), spec2.lengths.len());
        for (a, b) in spec.lengths.iter().zip(spec2.lengths.iter()) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn closed_tube_set_is_periodic() {
        let grp = group();
        let (_, g) = grp.generators[0];
        let (axis, len) = axis_and_length(&g).unwrap();
        let rho = 0.8 * grp.injectivity_radius_at_base;
        let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary).unwrap();
        let w = 5.0 + 1.2 * len + 1.0;
        let ps = cut_project(&grp, &axis, &cfg, (-w, w), &budget()).unwrap();
        let s = WindowedPointSet::from_projected(&ps).unwrap();
        let e = Entourage::General {
            u: Shape::Ball { radius: 5.0 },
            u_prime: Shape::Ball { radius: 1e-3 },
        };
        let periods =
            find_periods(&s, &e, 0.4, 1.2 * len, &policy()).unwrap();
        assert!(!periods.is_empty(), "closed-axis tube set shows no period");
        let divides = periods.iter().any(|p| {
            let m = len / p;
            (m - m.round()).abs() < 1e-3 && m.round() >= 1.0
        });
        assert!(divides, "periods {periods:?} do not divide the class length {len}");
    }

    #[test]
    fn approx_recovers_closed_axis() {
        let grp = group();
        let (_, g) = grp.generators[0];
        let (axis, _) = axis_and_length(&g).unwrap();
        let rho = 0.8 * grp.injectivity_radius_at_base;
        let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary).unwrap();
        let res = approx_by_closed(&grp, &axis, 1.0, &cfg, 14, &budget(), &policy()).unwrap();
        assert!(res.verified);
        assert!(res.reversed_matched);
        assert!(res.class.length > 0.0);
        // Independent re-check of the verified membership.
        let w = 1.0 + 1.0 / 1.0 + 2.0;
        let lhs = WindowedPointSet::from_projected(
            &cut_project(&grp, &axis, &cfg, (-w, w), &budget()).unwrap(),
        )
        .unwrap();
        let rhs = WindowedPointSet::from_projected(
            &cut_project(&grp, &res.class.axis, &cfg, (-w, w), &budget())
                .unwrap()
                .reflected(),
        )
        .unwrap();
        let e = Entourage::shorthand(1.0).unwrap();
        assert!(entourage_member(&lhs, &rhs, &e, &policy()).unwrap());
        // The returned element really closes up: it translates its own
        // axis by its recorded length.
        let moved = res.class.element.apply(res.class.axis.point_at(0.0));
        assert!(dist(moved, res.class.axis.point_at(res.class.length)) < 1e-8);
    }

    #[test]
    fn approx_matches_generic_geodesic_coarsely() {
        let grp = group();
        let ell = crate::cutproject::seeded_geodesic(3);
        let rho = 0.95 * grp.injectivity_radius_at_base;
        let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary).unwrap();
        let res = approx_by_closed(&grp, &ell, 1.0, &cfg, 12, &budget(), &policy()).unwrap();
        assert!(res.verified);
    }

    #[test]
    fn translate_identity_and_shift() {
        let grp = group();
        // A seeded geodesic: generic, so its tube set has no period to
        // alias the expected translation.
        let ell = crate::cutproject::seeded_geodesic(11);
        let rho = 0.8 * grp.injectivity_radius_at_base;
        let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary).unwrap();
        let (a, ok) =
            translate_match(&grp, &ell, &ell, 2.0, 60.0, &cfg, &budget(), &policy()).unwrap();
        assert!(ok);
        assert!(a.abs() < 1e-9);
        let shifted = ell.shifted(2.0);
        let (a, ok) =
            translate_match(&grp, &ell, &shifted, 4.0, 60.0, &cfg, &budget(), &policy())
                .unwrap();
        assert!(ok);
        assert!((a - 2.0).abs() < 1e-6);
    }

    #[test]
    fn tau_zero_when_disks_cover() {
        let grp = group();
        let rho = grp.circumradius * 1.001;
        let rep = tau_sup_estimate(&grp, rho, (8, 8), 10.0, &budget()).unwrap();
        assert_eq!(rep.sup_estimate, 0.0);
        assert_eq!(rep.truncated_samples, 0);
    }

    #[test]
    fn tau_bounded_at_working_radius() {
        let grp = group();
        let rho = 0.95 * grp.injectivity_radius_at_base;
        let rep = tau_sup_estimate(&grp, rho, (16, 16), 40.0, &budget()).unwrap();
        assert!(rep.sup_estimate < 40.0, "sup {}", rep.sup_estimate);
        assert_eq!(rep.truncated_samples, 0);
    }

    #[test]
    fn tau_nonincreasing_in_rho() {
        let grp = group();
        let mu = grp.injectivity_radius_at_base;
        let small = tau_sup_estimate(&grp, 0.6 * mu, (8, 8), 20.0, &budget()).unwrap();
        let large = tau_sup_estimate(&grp, 0.9 * mu, (8, 8), 20.0, &budget()).unwrap();
        assert!(small.sup_estimate + 1e-3 >= large.sup_estimate);
    }

    #[test]
    fn dalbo_examples() {
        let spec = LengthSpectrum { lengths: vec![1.0, 2.0, 3.0], cutoff: 3.0 };
        let (ok, omega) = dalbo_check(&spec, 0.01, 1e-6).unwrap();
        assert!(ok);
        assert_eq!(omega.unwrap(), 1.0);

        let spec = LengthSpectrum { lengths: vec![1.0, 2.0_f64.sqrt()], cutoff: 2.0 };
        let (ok, omega) = dalbo_check(&spec, 0.01, 1e-6).unwrap();
        assert!(!ok);
        assert!(omega.is_none());

        let spec = LengthSpectrum { lengths: vec![2.5], cutoff: 3.0 };
        let (ok, omega) = dalbo_check(&spec, 0.01, 1e-6).unwrap();
        assert!(ok);
        assert_eq!(omega.unwrap(), 2.5);
    }

    #[test]
    fn condition_verdicts() {
        let grp = group();
        let mu = grp.injectivity_radius_at_base;
        let fail = condition_check(&grp, 1.05 * mu, (4, 4), 5.0, &budget()).unwrap();
        assert_eq!(fail.verdict, ConditionVerdict::FailRadius);
        assert!(!fail.radius_ok);

        let tiny = condition_check(&grp, 0.05, (8, 8), 10.0, &budget()).unwrap();
        assert_eq!(tiny.verdict, ConditionVerdict::CoverageUnverified);
        assert!(tiny.tau.truncated_samples > 0);
    }
}
