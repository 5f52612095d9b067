//! Finite point sets with a declared validity window, in flat boxes or on
//! tori, and the entourage shapes of the local-rubber calculus.

use crate::cutproject::ProjectedSet;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Coordinates are fixed-width triples; axes past `dim` are zero.
pub type Coord = [f64; 3];

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Box { lo: Coord, hi: Coord },
    Torus { side: Coord },
}

/// Point set in ℝⁿ (n ≤ 3) or on a torus, with optional asserted (ε, δ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedPointSet {
    pub dim: usize,
    pub points: Vec<Coord>,
    pub window: Window,
    /// (epsilon, delta) when the set claims to be an (ε, δ)-Delone set.
    pub params: Option<(f64, f64)>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidParam(format!("dimension must be 1 to {MAX_DIM}, got {dim}")));
    }
    Ok(())
}

pub fn lex_cmp(a: &Coord, b: &Coord) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

impl WindowedPointSet {
    pub fn boxed(dim: usize, mut points: Vec<Coord>, lo: Coord, hi: Coord) -> Result<Self> {
        check_dim(dim)?;
        for a in 0..dim {
            if !(lo[a] < hi[a]) {
                return Err(Error::InvalidParam(format!(
                    "window axis {a} needs lo < hi, got [{}, {}]",
                    lo[a], hi[a]
                )));
            }
        }
        for p in &points {
            for a in 0..dim {
                if p[a] < lo[a] - 1e-9 || p[a] > hi[a] + 1e-9 {
                    return Err(Error::InvalidParam(format!(
                        "point {p:?} lies outside the window on axis {a}"
                    )));
                }
            }
        }
        points.sort_by(lex_cmp);
        Ok(WindowedPointSet { dim, points, window: Window::Box { lo, hi }, params: None })
    }

    pub fn torus(dim: usize, points: Vec<Coord>, side: Coord) -> Result<Self> {
        check_dim(dim)?;
        for a in 0..dim {
            if !(side[a] > 0.0) {
                return Err(Error::InvalidParam(format!(
                    "torus side on axis {a} must be positive, got {}",
                    side[a]
                )));
            }
        }
        let mut reps: Vec<Coord> = points
            .into_iter()
            .map(|p| {
                let mut q = [0.0; 3];
                for a in 0..dim {
                    q[a] = canonical_rep(p[a], side[a]);
                }
                q
            })
            .collect();
        reps.sort_by(lex_cmp);
        Ok(WindowedPointSet { dim, points: reps, window: Window::Torus { side }, params: None })
    }

    /// One-dimensional box set from raw coordinates.
    pub fn line(coords: &[f64], lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(
            1,
            coords.iter().map(|&t| [t, 0.0, 0.0]).collect(),
            [lo, 0.0, 0.0],
            [hi, 0.0, 0.0],
        )
    }

    pub fn from_projected(ps: &ProjectedSet) -> Result<Self> {
        Self::line(&ps.coords, ps.window.0, ps.window.1)
    }

    pub fn with_params(mut self, epsilon: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && epsilon >= delta) {
            return Err(Error::ParamOrder(format!(
                "need epsilon ≥ delta > 0, got epsilon = {epsilon}, delta = {delta}"
            )));
        }
        self.params = Some((epsilon, delta));
        Ok(self)
    }

    /// Difference q − p as the displacement vector, wrapped on tori.
    pub fn diff(&self, q: &Coord, p: &Coord) -> Coord {
        let mut d = [0.0; 3];
        for a in 0..self.dim {
            d[a] = q[a] - p[a];
            if let Window::Torus { side } = self.window {
                d[a] = wrap_diff(d[a], side[a]);
            }
        }
        d
    }

    pub fn dist(&self, p: &Coord, q: &Coord) -> f64 {
        let d = self.diff(q, p);
        norm(&d, self.dim)
    }

    /// The set translated by v (window moves with it; torus reps re-canonicalize).
    pub fn translated(&self, v: &Coord) -> WindowedPointSet {
        let mut out = self.clone();
        match &mut out.window {
            Window::Box { lo, hi } => {
                for a in 0..self.dim {
                    lo[a] += v[a];
                    hi[a] += v[a];
                }
                for p in &mut out.points {
                    for a in 0..self.dim {
                        p[a] += v[a];
                    }
                }
            }
            Window::Torus { side } => {
                let side = *side;
                for p in &mut out.points {
                    for a in 0..self.dim {
                        p[a] = canonical_rep(p[a] + v[a], side[a]);
                    }
                }
            }
        }
        out.points.sort_by(lex_cmp);
        out
    }

    /// Whether the window contains a centered region with the given per-axis
    /// extents (torus: the region must fit without wrapping onto itself).
    pub fn window_covers(&self, extent: &[f64]) -> bool {
        match &self.window {
            Window::Box { lo, hi } => {
                (0..self.dim).all(|a| lo[a] <= -extent[a] && hi[a] >= extent[a])
            }
            Window::Torus { side } => (0..self.dim).all(|a| side[a] >= 2.0 * extent[a]),
        }
    }

    pub fn min_pairwise_dist(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.dist(&self.points[i], &self.points[j]);
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }
}

pub fn norm(v: &Coord, dim: usize) -> f64 {
    v[..dim].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Representative of x in [−L/2, L/2).
pub fn canonical_rep(x: f64, side: f64) -> f64 {
    let mut r = x - side * (x / side).round();
    if r >= side / 2.0 {
        r -= side;
    }
    if r < -side / 2.0 {
        r += side;
    }
    r
}

/// Wrapped difference in [−L/2, L/2).
pub fn wrap_diff(d: f64, side: f64) -> f64 {
    canonical_rep(d, side)
}

/// Centered neighborhood shape for entourages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Ball { radius: f64 },
    Box { half_widths: Coord },
}

impl Shape {
    pub fn contains(&self, v: &Coord, dim: usize, tol: f64) -> bool {
        match self {
            Shape::Ball { radius } => norm(v, dim) <= radius + tol,
            Shape::Box { half_widths } => {
                (0..dim).all(|a| v[a].abs() <= half_widths[a] + tol)
            }
        }
    }

    pub fn extent(&self, axis: usize) -> f64 {
        match self {
            Shape::Ball { radius } => *radius,
            Shape::Box { half_widths } => half_widths[axis],
        }
    }
}

/// Local-rubber entourage: the shorthand N_r = N_{B(0,r), B(0,1/r)} or an
/// explicit (U, U′) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entourage {
    Shorthand { r: f64 },
    General { u: Shape, u_prime: Shape },
}

impl Entourage {
    pub fn shorthand(r: f64) -> Result<Entourage> {
        if !(r > 0.0) {
            return Err(Error::InvalidParam(format!("entourage scale must be positive, got {r}")));
        }
        Ok(Entourage::Shorthand { r })
    }

    /// The (U, U′) pair this entourage denotes.
    pub fn resolve(&self) -> (Shape, Shape) {
        match self {
            Entourage::Shorthand { r } => {
                (Shape::Ball { radius: *r }, Shape::Ball { radius: 1.0 / r })
            }
            Entourage::General { u, u_prime } => (u.clone(), u_prime.clone()),
        }
    }
}
