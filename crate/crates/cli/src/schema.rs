//! JSON documents for point sets, surfaces, and reports.
//!
//! All reals are written with 17 significant digits, which pins the exact
//! f64 bit pattern through a parse; object keys are emitted sorted, so equal
//! values always produce byte-identical documents.

use anyhow::{bail, Context, Result};
use delone_core::cutproject::ProjectedSet;
use delone_core::surface::SurfaceGroup;
use delone_core::window::{Coord, Window, WindowedPointSet};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Serializes any value through a JSON tree with fixed float formatting.
pub fn to_json_string<T: Serialize>(x: &T) -> Result<String> {
    let v = serde_json::to_value(x).context("value does not serialize to JSON")?;
    let mut out = String::new();
    write_value(&v, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                let f = n.as_f64().expect("JSON number is u64, i64, or f64");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("strings always serialize"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowDoc {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Torus { side: Vec<f64> },
}

/// The point-set document: coordinates are dim-length rows; flags, when
/// present, run parallel to the rows (tube boundary markers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetDoc {
    pub dim: usize,
    pub window: WindowDoc,
    pub params: Option<(f64, f64)>,
    pub coords: Vec<Vec<f64>>,
    pub flags: Vec<bool>,
}

fn pad(row: &[f64]) -> Coord {
    let mut c = [0.0; 3];
    for (i, &v) in row.iter().take(3).enumerate() {
        c[i] = v;
    }
    c
}

impl PointSetDoc {
    pub fn from_windowed(s: &WindowedPointSet) -> PointSetDoc {
        let window = match &s.window {
            Window::Box { lo, hi } => WindowDoc::Box {
                lo: lo[..s.dim].to_vec(),
                hi: hi[..s.dim].to_vec(),
            },
            Window::Torus { side } => WindowDoc::Torus { side: side[..s.dim].to_vec() },
        };
        PointSetDoc {
            dim: s.dim,
            window,
            params: s.params,
            coords: s.points.iter().map(|p| p[..s.dim].to_vec()).collect(),
            flags: Vec::new(),
        }
    }

    pub fn from_projected(ps: &ProjectedSet) -> PointSetDoc {
        PointSetDoc {
            dim: 1,
            window: WindowDoc::Box { lo: vec![ps.window.0], hi: vec![ps.window.1] },
            params: None,
            coords: ps.coords.iter().map(|&t| vec![t]).collect(),
            flags: ps.boundary_flags.clone(),
        }
    }

    pub fn to_windowed(&self) -> Result<WindowedPointSet> {
        for (i, row) in self.coords.iter().enumerate() {
            if row.len() != self.dim {
                bail!("coordinate row {i} has {} entries, expected {}", row.len(), self.dim);
            }
        }
        let points: Vec<Coord> = self.coords.iter().map(|r| pad(r)).collect();
        let set = match &self.window {
            WindowDoc::Box { lo, hi } => {
                if lo.len() != self.dim || hi.len() != self.dim {
                    bail!("box window does not match dimension {}", self.dim);
                }
                WindowedPointSet::boxed(self.dim, points, pad(lo), pad(hi))?
            }
            WindowDoc::Torus { side } => {
                if side.len() != self.dim {
                    bail!("torus window does not match dimension {}", self.dim);
                }
                WindowedPointSet::torus(self.dim, points, pad(side))?
            }
        };
        match self.params {
            Some((e, d)) => Ok(set.with_params(e, d)?),
            None => Ok(set),
        }
    }

    pub fn to_projected(&self) -> Result<ProjectedSet> {
        if self.dim != 1 {
            bail!("projected sets are one-dimensional, document has dim {}", self.dim);
        }
        let WindowDoc::Box { lo, hi } = &self.window else {
            bail!("projected sets use a box window");
        };
        if lo.len() != 1 || hi.len() != 1 {
            bail!("box window does not match dimension 1");
        }
        let coords: Vec<f64> = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() == 1 {
                    Ok(row[0])
                } else {
                    bail!("coordinate row {i} has {} entries, expected 1", row.len())
                }
            })
            .collect::<Result<_>>()?;
        let n = coords.len();
        let flags = if self.flags.is_empty() {
            vec![false; n]
        } else if self.flags.len() == n {
            self.flags.clone()
        } else {
            bail!("flags length {} does not match {} points", self.flags.len(), n);
        };
        Ok(ProjectedSet {
            coords,
            boundary_flags: flags,
            window: (lo[0], hi[0]),
            provenance: vec![Vec::new(); n],
        })
    }

    pub fn load(path: &std::path::Path) -> Result<PointSetDoc> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a point-set document", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleDoc {
    pub vertices: Vec<usize>,
    pub angle_sum: f64,
    pub residual: f64,
}

/// Surface document: polygon vertices in the half-plane, one generator per
/// pairing label as matrix rows, vertex cycles, and the injectivity radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub vertices: Vec<[f64; 2]>,
    pub generators: Vec<[f64; 4]>,
    pub cycles: Vec<CycleDoc>,
    pub mu: f64,
}

impl SurfaceDoc {
    pub fn from_group(g: &SurfaceGroup) -> SurfaceDoc {
        SurfaceDoc {
            vertices: g.polygon.vertices.iter().map(|v| [v.x, v.y]).collect(),
            generators: g.generators.iter().map(|(_, m)| m.entries()).collect(),
            cycles: g
                .vertex_cycles
                .iter()
                .map(|c| CycleDoc {
                    vertices: c.vertices.clone(),
                    angle_sum: c.angle_sum,
                    residual: c.residual,
                })
                .collect(),
            mu: g.injectivity_radius_at_base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use delone_core::cutproject::{cut_project, seeded_geodesic, TubeConfig, TubeMode};
    use delone_core::surface::EnumerationBudget;

    #[test]
    fn floats_round_trip_bit_exact() {
        let values = [0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 1e300, -0.0, 6.02e23];
        for &v in &values {
            let s = format!("{v:.16e}");
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} reprinted as {s}");
        }
    }

    #[test]
    fn projected_set_round_trip() {
        let g = SurfaceGroup::standard().unwrap();
        let ell = seeded_geodesic(1);
        let cfg = TubeConfig::new(1.5, TubeMode::PlusBoundary).unwrap();
        let ps = cut_project(&g, &ell, &cfg, (-8.0, 8.0), &EnumerationBudget::default()).unwrap();
        let doc = PointSetDoc::from_projected(&ps);
        let text = to_json_string(&doc).unwrap();
        let doc2: PointSetDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, doc2);
        let ps2 = doc2.to_projected().unwrap();
        assert_eq!(ps.coords.len(), ps2.coords.len());
        for (a, b) in ps.coords.iter().zip(ps2.coords.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(ps.boundary_flags, ps2.boundary_flags);
        assert_eq!(ps.window.0.to_bits(), ps2.window.0.to_bits());
        assert_eq!(ps.window.1.to_bits(), ps2.window.1.to_bits());
    }

    #[test]
    fn empty_set_is_a_valid_document() {
        let doc = PointSetDoc {
            dim: 1,
            window: WindowDoc::Box { lo: vec![-1.0], hi: vec![1.0] },
            params: None,
            coords: vec![],
            flags: vec![],
        };
        let text = to_json_string(&doc).unwrap();
        let back: PointSetDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, back);
        assert!(back.to_windowed().unwrap().points.is_empty());
    }

    #[test]
    fn surface_round_trip_preserves_mu() {
        let g = SurfaceGroup::standard().unwrap();
        let doc = SurfaceDoc::from_group(&g);
        let text = to_json_string(&doc).unwrap();
        let back: SurfaceDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.mu.to_bits(), back.mu.to_bits());
        assert_eq!(doc, back);
    }

    #[test]
    fn windowed_set_documents_are_stable() {
        let s = WindowedPointSet::boxed(
            2,
            vec![[0.5, -0.25, 0.0], [-1.0, 1.0, 0.0]],
            [-2.0, -2.0, 0.0],
            [2.0, 2.0, 0.0],
        )
        .unwrap();
        let doc = PointSetDoc::from_windowed(&s);
        let text = to_json_string(&doc).unwrap();
        let doc2: PointSetDoc = serde_json::from_str(&text).unwrap();
        let text2 = to_json_string(&doc2).unwrap();
        assert_eq!(text, text2);
        let s2 = doc2.to_windowed().unwrap();
        assert_eq!(s.points, s2.points);
        assert_eq!(s.window, s2.window);
    }
}

