//! Command-line front end. Every subcommand writes one JSON (or SVG)
//! document and exits 0 on contract satisfaction, 1 on malformed input,
//! 2 on a verified contract violation, 3 on budget exhaustion.

mod render;
mod schema;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use delone_core::chaos::{
    approx_by_closed, condition_check, dalbo_check, enumerate_closed, tau_sup_estimate,
    translate_match, ConditionVerdict, LengthSpectrum,
};
use delone_core::cutproject::{cut_project, seeded_geodesic, TubeConfig, TubeMode};
use delone_core::delone::{
    check_delone, check_delone_projected, composition_check, find_periods, rubber_proximity,
};
use delone_core::error::Error as CoreError;
use delone_core::euclid::{
    chaotify, glue_extend, greedy_separated_complete, inner_extend, vq_construct, vq_member,
    w_member, Region, VqParams,
};
use delone_core::numeric::NumericPolicy;
use delone_core::surface::{EnumerationBudget, SurfaceGroup};
use delone_core::window::{Coord, Entourage, Window, WindowedPointSet};
use schema::{to_json_string, PointSetDoc, SurfaceDoc};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "delone",
    version,
    about = "Chaotic Delone sets from hyperbolic cut-and-project, plus Euclidean genericity tools"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for any pseudo-random construction (geodesics, jitter).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on enumerated group elements.
    #[arg(long, global = true)]
    budget_elements: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hyperbolic 12-gon surface: metric solve and validation.
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Group-orbit enumeration around the base point.
    Orbit {
        #[command(subcommand)]
        cmd: OrbitCmd,
    },
    /// Cut-and-project a tube set onto geodesic coordinates.
    Cutproject {
        #[command(subcommand)]
        cmd: CutprojectCmd,
    },
    /// Delone, period, proximity, and composition analysis of point sets.
    Analyze {
        #[command(subcommand)]
        cmd: AnalyzeCmd,
    },
    /// Closed-geodesic diagnostics and chaos criteria.
    Chaos {
        #[command(subcommand)]
        cmd: ChaosCmd,
    },
    /// Euclidean genericity constructions.
    Euclid {
        #[command(subcommand)]
        cmd: EuclidCmd,
    },
    /// SVG figures: Poincaré-disk scenes and 1D tick plots.
    Render {
        #[command(subcommand)]
        cmd: RenderCmd,
    },
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Solve the polygon and emit the surface document.
    Solve,
    /// Re-derive all invariants and report residuals; exits 2 on failure.
    Validate,
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// All orbit points within a hyperbolic radius of the base point.
    Ball {
        #[arg(long)]
        radius: f64,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Strict,
    Plus,
    Closed,
}

impl From<ModeArg> for TubeMode {
    fn from(m: ModeArg) -> TubeMode {
        match m {
            ModeArg::Strict => TubeMode::StrictInterior,
            ModeArg::Plus => TubeMode::PlusBoundary,
            ModeArg::Closed => TubeMode::Closed,
        }
    }
}

#[derive(Subcommand)]
enum CutprojectCmd {
    /// Project the tube set of a seeded geodesic over (−window, window).
    Run {
        #[arg(long)]
        rho: f64,
        /// Half-width: the projection window is (−window, window).
        #[arg(long, default_value_t = 20.0)]
        window: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Plus)]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Check the (ε, δ)-Delone property; exits 2 when it fails.
    Delone {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Scan for translation periods at entourage scale r.
    Periods {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.01)]
        pmin: f64,
        #[arg(long, default_value_t = 10.0)]
        pmax: f64,
    },
    /// Largest entourage scale at which two sets are mutually close.
    Rubber {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input2: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        rmax: f64,
    },
    /// Entourage composition law over three sets and box parameters.
    Compose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input2: PathBuf,
        #[arg(long)]
        input3: PathBuf,
        /// Comma-separated per-axis half-widths, e.g. "1.0,1.0".
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
}

#[derive(Subcommand)]
enum ChaosCmd {
    /// One representative per closed-geodesic class up to the length cutoff.
    Closed {
        #[arg(long)]
        cutoff: f64,
    },
    /// Distinct class lengths up to the cutoff.
    Spectrum {
        #[arg(long)]
        cutoff: f64,
    },
    /// Find a closed geodesic matching a seeded geodesic's tube set at N_r.
    Approx {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 16)]
        max_word: usize,
    },
    /// Find the translation aligning a seeded tube set with its shift.
    Match {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        shift: f64,
        /// Full comparison window width for the source set.
        #[arg(long, default_value_t = 60.0)]
        window: f64,
    },
    /// First-entry times of sampled geodesics into the ρ-disk system.
    Tau {
        #[arg(long)]
        rho: f64,
        /// Sample grid "bases x directions", e.g. "16x16".
        #[arg(long, default_value = "16x16")]
        grid: String,
        #[arg(long, default_value_t = 40.0)]
        horizon: f64,
    },
    /// Scan the length spectrum for a common quantum.
    Dalbo {
        #[arg(long)]
        cutoff: f64,
        #[arg(long, default_value_t = 0.01)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Radius and disk-coverage conditions; exits 2 on a radius violation,
    /// 3 when coverage sampling truncated.
    Conditions {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "16x16")]
        grid: String,
        #[arg(long, default_value_t = 40.0)]
        horizon: f64,
    },
}

#[derive(Subcommand)]
enum EuclidCmd {
    /// Greedily extend a separated set to a maximal one over its window.
    Complete {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        delta: f64,
    },
    /// Extend inside a region, keeping the input exactly.
    Inner {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Region boxes: axes "lo:hi" joined by ";", boxes joined by "+".
        #[arg(long, allow_hyphen_values = true)]
        region: String,
    },
    /// Glue a set defined on a region into a Delone set on the window.
    Glue {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        region: String,
    },
    /// Punctured-disk visibility: membership test (with --input) or
    /// constructive witness set.
    Vq {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated center, e.g. "2.0,0.0".
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Periodic-block wildness test over a search box.
    W {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        m_prime: u32,
        #[arg(long)]
        period: f64,
        /// Search box: axes "lo:hi" joined by ";".
        #[arg(long, allow_hyphen_values = true)]
        search: String,
    },
    /// Plant a periodic block into a set so the W-condition holds.
    Chaotify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        m_prime: u32,
        #[arg(long)]
        l: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Subcommand)]
enum RenderCmd {
    /// Poincaré-disk view of the surface, optionally with a tube scene.
    Disk {
        /// Draw only the unit circle.
        #[arg(long)]
        empty: bool,
        /// Add the tube band and point dots for a seeded geodesic.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        window: f64,
    },
    /// Tick plot of a one-dimensional point-set document.
    Line {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok((text, code)) => {
            if let Err(e) = emit(&out, &text) {
                eprintln!("error: {e:#}");
                std::process::exit(1);
            }
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(classify(&e));
        }
    }
}

fn classify(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::BudgetExceeded { .. } | CoreError::NotFoundWithinBudget(_)) => 3,
        Some(
            CoreError::NotSeparatedInput { .. }
            | CoreError::NotDeloneOnA(_)
            | CoreError::TripleCluster { .. }
            | CoreError::VertexCycleFailure(_),
        ) => 2,
        _ => 1,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn policy() -> Result<NumericPolicy> {
    match std::env::var("DELONE_POLICY") {
        Ok(text) => serde_json::from_str(&text)
            .context("DELONE_POLICY must be a numeric-policy JSON object"),
        Err(_) => Ok(NumericPolicy::default()),
    }
}

fn budget(cap: Option<usize>) -> EnumerationBudget {
    match cap {
        Some(max_elements) => EnumerationBudget { max_elements },
        None => EnumerationBudget::default(),
    }
}

fn parse_coord(text: &str) -> Result<(Coord, usize)> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}")))
        .collect::<Result<_>>()?;
    if vals.is_empty() || vals.len() > 3 {
        bail!("expected 1 to 3 comma-separated numbers, got {}", vals.len());
    }
    let mut c = [0.0; 3];
    c[..vals.len()].copy_from_slice(&vals);
    Ok((c, vals.len()))
}

fn parse_box(text: &str, dim: usize) -> Result<(Coord, Coord)> {
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let axes: Vec<&str> = text.split(';').collect();
    if axes.len() != dim {
        bail!("box {text:?} has {} axes, expected {dim}", axes.len());
    }
    for (a, pair) in axes.iter().enumerate() {
        let (l, h) = pair
            .split_once(':')
            .with_context(|| format!("axis {a} needs the form lo:hi, got {pair:?}"))?;
        lo[a] = l.trim().parse().with_context(|| format!("bad number {l:?}"))?;
        hi[a] = h.trim().parse().with_context(|| format!("bad number {h:?}"))?;
    }
    Ok((lo, hi))
}

fn parse_region(text: &str, set: &WindowedPointSet) -> Result<Region> {
    let boxes: Vec<(Coord, Coord)> = text
        .split('+')
        .map(|b| parse_box(b, set.dim))
        .collect::<Result<_>>()?;
    Ok(Region::new(set.dim, boxes, set.window)?)
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once('x')
        .with_context(|| format!("grid needs the form NxM, got {text:?}"))?;
    Ok((
        a.trim().parse().with_context(|| format!("bad count {a:?}"))?,
        b.trim().parse().with_context(|| format!("bad count {b:?}"))?,
    ))
}

fn load_windowed(path: &Path) -> Result<WindowedPointSet> {
    PointSetDoc::load(path)?.to_windowed()
}

#[derive(Serialize)]
struct SurfaceValidation {
    residual_max: f64,
    orbit_sizes: Vec<usize>,
    area: f64,
    area_error: f64,
    side_length: f64,
    mu: f64,
    ok: bool,
}

#[derive(Serialize)]
struct ClassDoc {
    length: f64,
    word_length: usize,
    trace: f64,
}

fn run(cli: Cli) -> Result<(String, i32)> {
    let pol = policy()?;
    let bud = budget(cli.budget_elements);
    let seed = cli.seed;

    match cli.cmd {
        Cmd::Surface { cmd } => {
            let group = SurfaceGroup::standard()?;
            match cmd {
                SurfaceCmd::Solve => Ok((to_json_string(&SurfaceDoc::from_group(&group))?, 0)),
                SurfaceCmd::Validate => {
                    let residual_max = group
                        .vertex_cycles
                        .iter()
                        .map(|c| c.residual)
                        .fold(0.0, f64::max);
                    let mut orbit_sizes: Vec<usize> =
                        group.vertex_cycles.iter().map(|c| c.vertices.len()).collect();
                    orbit_sizes.sort_unstable();
                    let area = group.polygon.area();
                    let area_error = (area - 4.0 * std::f64::consts::PI).abs();
                    let ok = residual_max < 1e-8
                        && orbit_sizes == vec![3, 3, 6]
                        && area_error < 1e-8;
                    let doc = SurfaceValidation {
                        residual_max,
                        orbit_sizes,
                        area,
                        area_error,
                        side_length: group.polygon.side_length,
                        mu: group.injectivity_radius_at_base,
                        ok,
                    };
                    Ok((to_json_string(&doc)?, if ok { 0 } else { 2 }))
                }
            }
        }
        Cmd::Orbit { cmd } => match cmd {
            OrbitCmd::Ball { radius } => {
                let group = SurfaceGroup::standard()?;
                let ball = group.group_ball(radius, &bud)?;
                let points: Vec<Coord> = ball.iter().map(|op| [op.point.x, op.point.y, 0.0]).collect();
                let r = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
                let set = WindowedPointSet::boxed(
                    2,
                    points,
                    [-r - 1.0, 0.0, 0.0],
                    [r + 1.0, r + 1.0, 0.0],
                )?;
                Ok((to_json_string(&PointSetDoc::from_windowed(&set))?, 0))
            }
        },
        Cmd::Cutproject { cmd } => match cmd {
            CutprojectCmd::Run { rho, window, mode } => {
                let group = SurfaceGroup::standard()?;
                let ell = seeded_geodesic(seed);
                let cfg = TubeConfig::new(rho, mode.into())?
                    .with_boundary_tol(pol.boundary_tol)?;
                let ps = cut_project(&group, &ell, &cfg, (-window, window), &bud)?;
                Ok((to_json_string(&PointSetDoc::from_projected(&ps))?, 0))
            }
        },
        Cmd::Analyze { cmd } => match cmd {
            AnalyzeCmd::Delone { input, eps, delta } => {
                // 1-D box documents go through the projected path so their
                // boundary flags survive into the report.
                let doc = PointSetDoc::load(&input)?;
                let projected = doc.dim == 1 && matches!(doc.window, schema::WindowDoc::Box { .. });
                let report = if projected {
                    check_delone_projected(&doc.to_projected()?, eps, delta)?
                } else {
                    check_delone(&doc.to_windowed()?, eps, delta)?
                };
                let ok = report.separated_ok && report.dense_ok;
                Ok((to_json_string(&report)?, if ok { 0 } else { 2 }))
            }
            AnalyzeCmd::Periods { input, r, pmin, pmax } => {
                let s = load_windowed(&input)?;
                let e = Entourage::shorthand(r)?;
                let periods = find_periods(&s, &e, pmin, pmax, &pol)?;
                #[derive(Serialize)]
                struct PeriodsDoc {
                    r: f64,
                    periods: Vec<f64>,
                }
                Ok((to_json_string(&PeriodsDoc { r, periods })?, 0))
            }
            AnalyzeCmd::Rubber { input, input2, rmax } => {
                let s = load_windowed(&input)?;
                let s2 = load_windowed(&input2)?;
                let proximity = rubber_proximity(&s, &s2, rmax, &pol)?;
                #[derive(Serialize)]
                struct RubberDoc {
                    r_max: f64,
                    proximity: f64,
                }
                Ok((to_json_string(&RubberDoc { r_max: rmax, proximity })?, 0))
            }
            AnalyzeCmd::Compose { input, input2, input3, a, b, c, d } => {
                let s1 = load_windowed(&input)?;
                let s2 = load_windowed(&input2)?;
                let s3 = load_windowed(&input3)?;
                let (a, _) = parse_coord(&a)?;
                let (b, _) = parse_coord(&b)?;
                let (c, _) = parse_coord(&c)?;
                let (d, _) = parse_coord(&d)?;
                let report = composition_check(&s1, &s2, &s3, a, b, c, d, &pol)?;
                let code = if report.implication { 0 } else { 2 };
                Ok((to_json_string(&report)?, code))
            }
        },
        Cmd::Chaos { cmd } => {
            let group = SurfaceGroup::standard()?;
            match cmd {
                ChaosCmd::Closed { cutoff } => {
                    let classes = enumerate_closed(&group, cutoff, &bud, &pol)?;
                    #[derive(Serialize)]
                    struct ClosedDoc {
                        cutoff: f64,
                        classes: Vec<ClassDoc>,
                    }
                    let doc = ClosedDoc {
                        cutoff,
                        classes: classes
                            .iter()
                            .map(|c| ClassDoc {
                                length: c.length,
                                word_length: c.word_length,
                                trace: c.element.trace(),
                            })
                            .collect(),
                    };
                    Ok((to_json_string(&doc)?, 0))
                }
                ChaosCmd::Spectrum { cutoff } => {
                    let classes = enumerate_closed(&group, cutoff, &bud, &pol)?;
                    let spec = LengthSpectrum::from_classes(&classes, cutoff, &pol);
                    Ok((to_json_string(&spec)?, 0))
                }
                ChaosCmd::Approx { rho, r, max_word } => {
                    let ell = seeded_geodesic(seed);
                    let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary)?
                        .with_boundary_tol(pol.boundary_tol)?;
                    let res = approx_by_closed(&group, &ell, r, &cfg, max_word, &bud, &pol)?;
                    #[derive(Serialize)]
                    struct ApproxDoc {
                        length: f64,
                        word_length: usize,
                        reversed_matched: bool,
                        verified: bool,
                    }
                    let doc = ApproxDoc {
                        length: res.class.length,
                        word_length: res.class.word_length,
                        reversed_matched: res.reversed_matched,
                        verified: res.verified,
                    };
                    Ok((to_json_string(&doc)?, 0))
                }
                ChaosCmd::Match { rho, r, shift, window } => {
                    let ell = seeded_geodesic(seed);
                    let target = ell.shifted(shift);
                    let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary)?
                        .with_boundary_tol(pol.boundary_tol)?;
                    let (a, verified) =
                        translate_match(&group, &ell, &target, r, window, &cfg, &bud, &pol)?;
                    #[derive(Serialize)]
                    struct MatchDoc {
                        a: f64,
                        verified: bool,
                    }
                    Ok((to_json_string(&MatchDoc { a, verified })?, 0))
                }
                ChaosCmd::Tau { rho, grid, horizon } => {
                    let g = parse_grid(&grid)?;
                    let report = tau_sup_estimate(&group, rho, g, horizon, &bud)?;
                    Ok((to_json_string(&report)?, 0))
                }
                ChaosCmd::Dalbo { cutoff, omega_min, tol } => {
                    let classes = enumerate_closed(&group, cutoff, &bud, &pol)?;
                    let spec = LengthSpectrum::from_classes(&classes, cutoff, &pol);
                    let (arithmetic_like, witness) = dalbo_check(&spec, omega_min, tol)?;
                    #[derive(Serialize)]
                    struct DalboDoc {
                        arithmetic_like: bool,
                        witness: Option<f64>,
                        lengths: Vec<f64>,
                    }
                    let doc = DalboDoc { arithmetic_like, witness, lengths: spec.lengths };
                    Ok((to_json_string(&doc)?, 0))
                }
                ChaosCmd::Conditions { rho, grid, horizon } => {
                    let g = parse_grid(&grid)?;
                    let report = condition_check(&group, rho, g, horizon, &bud)?;
                    let code = match report.verdict {
                        ConditionVerdict::Pass | ConditionVerdict::CoverageSuspect => 0,
                        ConditionVerdict::FailRadius => 2,
                        ConditionVerdict::CoverageUnverified => 3,
                    };
                    Ok((to_json_string(&report)?, code))
                }
            }
        }
        Cmd::Euclid { cmd } => match cmd {
            EuclidCmd::Complete { input, delta } => {
                let s = load_windowed(&input)?;
                let (lo, hi) = match s.window {
                    Window::Box { lo, hi } => (lo, hi),
                    Window::Torus { side } => {
                        let mut lo = [0.0; 3];
                        let mut hi = [0.0; 3];
                        for a in 0..s.dim {
                            lo[a] = -side[a] / 2.0;
                            hi[a] = side[a] / 2.0;
                        }
                        (lo, hi)
                    }
                };
                let region = Region::single_box(s.dim, lo, hi, s.window)?;
                let out = greedy_separated_complete(&s, delta, &region)?;
                Ok((to_json_string(&PointSetDoc::from_windowed(&out))?, 0))
            }
            EuclidCmd::Inner { input, eps, delta, region } => {
                let s = load_windowed(&input)?;
                let a = parse_region(&region, &s)?;
                let out = inner_extend(&s, &a, eps, delta)?;
                Ok((to_json_string(&PointSetDoc::from_windowed(&out))?, 0))
            }
            EuclidCmd::Glue { input, eps, delta, region } => {
                let s = load_windowed(&input)?;
                let a = parse_region(&region, &s)?;
                let out = glue_extend(&s, &a, eps, delta)?;
                Ok((to_json_string(&PointSetDoc::from_windowed(&out))?, 0))
            }
            EuclidCmd::Vq { input, q, alpha, eps, delta } => {
                let (qc, qdim) = parse_coord(&q)?;
                match input {
                    Some(path) => {
                        let s = load_windowed(&path)?;
                        if s.dim != qdim {
                            bail!("set has dim {}, center has dim {qdim}", s.dim);
                        }
                        let params = VqParams::new(s.dim, qc, alpha)?;
                        let (is_member, witness) = vq_member(&s, &params)?;
                        #[derive(Serialize)]
                        struct VqDoc {
                            is_member: bool,
                            witness: Option<Vec<f64>>,
                        }
                        let doc = VqDoc {
                            is_member,
                            witness: witness.map(|w| w[..s.dim].to_vec()),
                        };
                        Ok((to_json_string(&doc)?, 0))
                    }
                    None => {
                        let params = VqParams::new(qdim, qc, alpha)?;
                        let out = vq_construct(&params, eps, delta)?;
                        Ok((to_json_string(&PointSetDoc::from_windowed(&out))?, 0))
                    }
                }
            }
            EuclidCmd::W { input, m, m_prime, period, search } => {
                let s = load_windowed(&input)?;
                let search_box = parse_box(&search, s.dim)?;
                let (is_member, witness) = w_member(&s, m, m_prime, period, search_box, &pol)?;
                #[derive(Serialize)]
                struct WDoc {
                    is_member: bool,
                    witness: Option<delone_core::euclid::WWitness>,
                }
                Ok((to_json_string(&WDoc { is_member, witness })?, 0))
            }
            EuclidCmd::Chaotify { input, m, m_prime, l, eps, delta } => {
                let s = load_windowed(&input)?;
                let res = chaotify(&s, m, m_prime, l, eps, delta)?;
                #[derive(Serialize)]
                struct ChaotifyDoc {
                    witness: delone_core::euclid::WWitness,
                    s_hat: PointSetDoc,
                    inner: PointSetDoc,
                    torus: PointSetDoc,
                }
                let doc = ChaotifyDoc {
                    witness: res.witness,
                    s_hat: PointSetDoc::from_windowed(&res.s_hat),
                    inner: PointSetDoc::from_windowed(&res.inner),
                    torus: PointSetDoc::from_windowed(&res.torus),
                };
                Ok((to_json_string(&doc)?, 0))
            }
        },
        Cmd::Render { cmd } => match cmd {
            RenderCmd::Disk { empty, rho, window } => {
                let mut scene = render::DiskScene::default();
                if !empty {
                    let group = SurfaceGroup::standard()?;
                    scene.polygon = group.polygon.vertices.clone();
                    if let Some(rho) = rho {
                        // Folded provenance frames are meaningless to draw,
                        // so the rendered tube stays in single-shot range.
                        let w = window.min(12.0);
                        let ell = seeded_geodesic(seed);
                        let cfg = TubeConfig::new(rho, TubeMode::PlusBoundary)?
                            .with_boundary_tol(pol.boundary_tol)?;
                        let ps = cut_project(&group, &ell, &cfg, (-w, w), &bud)?;
                        scene.geodesic_dots =
                            ps.coords.iter().map(|&t| ell.point_at(t)).collect();
                        scene.orbit_dots = ps
                            .provenance
                            .iter()
                            .flatten()
                            .map(|op| op.point)
                            .collect();
                        scene.tube = Some(render::TubeBand { ell, rho, t0: -w, t1: w });
                    }
                }
                Ok((render::render_disk(&scene), 0))
            }
            RenderCmd::Line { input } => {
                let doc = PointSetDoc::load(&input)?;
                if doc.dim != 1 {
                    bail!("line plots need a one-dimensional document");
                }
                Ok((render::render_line(&doc), 0))
            }
        },
    }
}
