//! Dispatch: load the complex, run one operation, render the report.

use std::fmt::Write as _;

use serde::Serialize;

use cat0lab::boundary::{
    build_fan, check_quantized, detect_branch_ray, grow_flat_sector, polygon_limit_length, quantization_modulus,
    tits_distance_gb, FanOptions, SectorOutcome,
};
use cat0lab::geodesy::{
    classify_geodesic, default_schedule, distance, tits_angle_estimate, trace_ray, DistanceStatus, GeodesicTrace,
    TitsStatus, TITS_TOL,
};
use cat0lab::link::{
    build_link, check_cat0, epsilons, simple_loops, Cat0Status, LinkError, LinkOptions, DEFAULT_LOOP_CAP,
};
use cat0lab::pingpong::{
    alpha_class, perp_angle_bound, pingpong_window_check, AlphaClass, AxisWindow, PingPongOptions, PingPongVerdict,
};
use cat0lab::{build_complex, Angle, Complex, PointRef, RawComplex};

use crate::exit::{Failure, CHECK_FAILED, LIMIT, OK};
use crate::{spec, Cli, Command, Global};

#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

const LOWER_BOUND: &str = " (lower bound; budget exhausted)";

fn emit<T: Serialize>(g: &Global, record: &T, human: String, code: u8) -> Output {
    let text = if g.json {
        serde_json::to_string_pretty(record).expect("reports serialize") + "\n"
    } else {
        human
    };
    Output { text, code }
}

fn load(path: &str, g: &Global) -> Result<Complex, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read `{path}`: {e}")))?;
    let mut raw = RawComplex::from_json(&text)?;
    if g.approx {
        for c in &mut raw.cells {
            for a in &mut c.angles {
                *a = a.approx();
            }
        }
        if let Some(m) = &mut raw.meta {
            m.exact_angles = false;
        }
    }
    Ok(build_complex(&raw)?)
}

/// A point in command-line syntax.
fn show_point(cx: &Complex, p: &PointRef) -> String {
    match *p {
        PointRef::Vertex { vertex } => format!("v:{}", cx.vertex_name(vertex)),
        PointRef::Edge { edge, t } => format!("e:{}@{t:.6}", cx.edge(edge).name),
        PointRef::Cell { cell, x, y } => format!("c:{}@{x:.6},{y:.6}", cx.cell(cell).name),
    }
}

fn trace(cx: &Complex, g: &Global, s: &str) -> Result<GeodesicTrace, Failure> {
    let r = spec::ray(cx, s)?;
    Ok(trace_ray(cx, r.start, r.dir, r.length, g.policy)?)
}

fn fan_opts(g: &Global, cap: f64, via: usize) -> Result<FanOptions, Failure> {
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Failure::input(format!("cap must be positive, got {cap}")));
    }
    Ok(FanOptions {
        cap,
        via,
        budget: g.budget,
    })
}

#[derive(Serialize)]
struct LinkRecord {
    vertex: String,
    nodes: Vec<NodeRecord>,
    arcs: Vec<ArcRecord>,
    total: Angle,
    girth: Option<Angle>,
}

#[derive(Serialize)]
struct NodeRecord {
    edge: String,
    toward: String,
}

#[derive(Serialize)]
struct ArcRecord {
    cell: String,
    from: usize,
    to: usize,
    weight: Angle,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    class: String,
    trace: &'a GeodesicTrace,
}

#[derive(Serialize)]
struct TitsDistanceRecord {
    fan_angle: Angle,
    excess: Angle,
    tits_distance: Angle,
    interior: usize,
    boundary: usize,
    on_cap: Vec<String>,
}

#[derive(Serialize)]
struct QuantizeRecord {
    m: i64,
    angles: Vec<Angle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<cat0lab::boundary::QuantizedCheck>,
}

fn count(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

pub fn run(cli: &Cli, threads: usize) -> Result<Output, Failure> {
    let g = &cli.global;
    if !(g.budget > 0) {
        return Err(Failure::input("budget must be positive"));
    }
    if g.tol.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
        return Err(Failure::input("tolerance must be a nonnegative number"));
    }
    let link_opts = LinkOptions {
        loop_cap: DEFAULT_LOOP_CAP,
        threads,
    };
    match &cli.command {
        Command::Validate { file } => {
            let cx = load(file, g)?;
            let r = cx.report();
            let worst = r.closure_residuals.iter().map(|(_, x)| *x).fold(0.0, f64::max);
            let mode = if r.exact_angles { "exact" } else { "approximate" };
            let human = format!(
                "valid: {} vertices, {} edges, {} cells, {mode} angles, max closure residual {worst:e}\n",
                r.vertices, r.edges, r.cells
            );
            Ok(emit(g, &r, human, OK))
        }
        Command::CheckCat0 { file } => {
            let cx = load(file, g)?;
            let cert = check_cat0(&cx, &link_opts)?;
            let (human, code) = match cert.status {
                Cat0Status::Pass => (format!("PASS, min girth {}\n", cert.min_girth), OK),
                Cat0Status::Fail => {
                    let v = cert.failing_vertex.as_deref().unwrap_or_default();
                    let w = cert
                        .vertices
                        .iter()
                        .find(|x| x.id == v)
                        .and_then(|x| x.witness.as_ref())
                        .expect("failing vertex has a witness");
                    (
                        format!(
                            "FAIL at vertex `{v}`: link loop of length {} < 2π through cells {}\n",
                            w.length,
                            w.cells.join(", ")
                        ),
                        CHECK_FAILED,
                    )
                }
            };
            Ok(emit(g, &cert, human, code))
        }
        Command::Link { file, vertex } => {
            let cx = load(file, g)?;
            let v = cx
                .vertex_id(vertex)
                .ok_or_else(|| Failure::input(format!("unknown vertex `{vertex}`")))?;
            let link = build_link(&cx, v);
            let loops = simple_loops(&link, DEFAULT_LOOP_CAP).map_err(|cap| LinkError::ExplosionGuard {
                vertex: vertex.clone(),
                cap,
            })?;
            let rec = LinkRecord {
                vertex: vertex.clone(),
                nodes: link
                    .nodes
                    .iter()
                    .map(|n| NodeRecord {
                        edge: cx.edge(n.edge).name.clone(),
                        toward: cx.vertex_name(n.toward).to_string(),
                    })
                    .collect(),
                arcs: link
                    .arcs
                    .iter()
                    .map(|a| ArcRecord {
                        cell: cx.cell(a.cell).name.clone(),
                        from: a.from,
                        to: a.to,
                        weight: a.weight,
                    })
                    .collect(),
                total: link.total_length(),
                girth: loops.first().map(|l| l.length),
            };
            let mut human = format!(
                "link of `{vertex}`: {} nodes, {} arcs, total length {}\n",
                rec.nodes.len(),
                rec.arcs.len(),
                rec.total
            );
            for (i, n) in rec.nodes.iter().enumerate() {
                let _ = writeln!(human, "  node {i}: edge {} toward {}", n.edge, n.toward);
            }
            for (i, a) in rec.arcs.iter().enumerate() {
                let _ = writeln!(human, "  arc {i}: {} -- {} in {} ({})", a.from, a.to, a.cell, a.weight);
            }
            let _ = match rec.girth {
                Some(x) => writeln!(human, "girth {x}"),
                None => writeln!(human, "girth ∞ (no loops)"),
            };
            Ok(emit(g, &rec, human, OK))
        }
        Command::Epsilons { file } => {
            let cx = load(file, g)?;
            let r = epsilons(&cx, &link_opts)?;
            let mut human = format!("ε₁ = {}\nε₂ = {}\n", r.epsilon1, r.epsilon2);
            if let (Some(v), Some(w)) = (&r.witness_vertex, &r.witness) {
                let _ = writeln!(human, "attained at `{v}` by a loop of length {}", w.length);
            }
            Ok(emit(g, &r, human, OK))
        }
        Command::Distance { file, p, q } => {
            let cx = load(file, g)?;
            let (x, y) = (spec::point(&cx, p)?, spec::point(&cx, q)?);
            let d = distance(&cx, x, y, g.budget)?;
            let (suffix, code) = match d.status {
                DistanceStatus::Exact => ("", OK),
                DistanceStatus::UpperBound => (" (upper bound; budget exhausted)", LIMIT),
            };
            let human = format!(
                "d = {:.12}{suffix}\n{}, {}\n",
                d.length,
                count(d.trace.segments.len(), "segment"),
                count(d.trace.breakpoints.len(), "breakpoint")
            );
            Ok(emit(g, &d, human, code))
        }
        Command::Trace { file, point, dir, len } => {
            let cx = load(file, g)?;
            let t = trace(&cx, g, &format!("{point};{dir};{len}"))?;
            let class = classify_geodesic(&t);
            let mut human = format!(
                "{class}, length {:.12}, {}, ends at {}\n",
                t.length,
                count(t.segments.len(), "segment"),
                show_point(&cx, &t.end())
            );
            for b in &t.breakpoints {
                let _ = writeln!(
                    human,
                    "  {} link distance {}",
                    show_point(&cx, &b.point),
                    b.link_distance
                );
            }
            let rec = TraceRecord {
                class: class.to_string(),
                trace: &t,
            };
            Ok(emit(g, &rec, human, OK))
        }
        Command::TitsAngle {
            file,
            ray1,
            ray2,
            steps,
        } => {
            let cx = load(file, g)?;
            if *steps == 0 {
                return Err(Failure::input("steps must be positive"));
            }
            let (r1, r2) = (trace(&cx, g, ray1)?, trace(&cx, g, ray2)?);
            let schedule = default_schedule(r1.length.min(r2.length), *steps);
            let est = tits_angle_estimate(&cx, &r1, &r2, &schedule, g.tol.unwrap_or(TITS_TOL), g.budget)?;
            let (suffix, code) = match est.status {
                TitsStatus::Converged => ("", OK),
                TitsStatus::LowerBoundOnly if est.schedule.len() < schedule.len() => (LOWER_BOUND, LIMIT),
                TitsStatus::LowerBoundOnly => (" (lower bound; not converged)", OK),
            };
            let mut human = String::new();
            for (t, v) in est.schedule.iter().zip(&est.values) {
                let _ = writeln!(human, "  t = {t}: {v}");
            }
            let _ = match est.value() {
                Some(v) => writeln!(human, "Tits angle ≈ {v}{suffix}"),
                None => writeln!(human, "no estimate{suffix}"),
            };
            Ok(emit(g, &est, human, code))
        }
        Command::TitsDistance { file, fan, cap, via } => {
            let cx = load(file, g)?;
            let f = spec::fan(&cx, fan)?;
            let region = build_fan(&cx, f.base, f.dirs[0], f.dirs[1], &fan_opts(g, *cap, *via)?)?;
            let d = tits_distance_gb(&region)?;
            let rec = TitsDistanceRecord {
                fan_angle: region.fan_angle,
                excess: region.fan_angle - d,
                tits_distance: d,
                interior: region.interior.len(),
                boundary: region.boundary.len(),
                on_cap: region.on_cap.clone(),
            };
            let human = format!(
                "d_T = {d} (fan angle {}, excess {}, {} interior and {} boundary vertices)\n",
                rec.fan_angle, rec.excess, rec.interior, rec.boundary
            );
            Ok(emit(g, &rec, human, OK))
        }
        Command::PolygonLength { angles } => {
            let a: Vec<Angle> = angles.iter().map(|s| spec::angle(s)).collect::<Result<_, _>>()?;
            let a: Vec<Angle> = if g.approx {
                a.iter().map(Angle::approx).collect()
            } else {
                a
            };
            let v = polygon_limit_length(&a)?;
            Ok(emit(g, &v, format!("{v}\n"), OK))
        }
        Command::FlatSector { file, fan, cap, via } => {
            let cx = load(file, g)?;
            let f = spec::fan(&cx, fan)?;
            let out = grow_flat_sector(&cx, f.base, f.dirs[0], f.dirs[1], &fan_opts(g, *cap, *via)?)?;
            let (human, code) = match &out {
                SectorOutcome::Flat { region } => (
                    format!(
                        "FLAT to radius {}: fan angle {}, excess 0\n",
                        region.cap, region.fan_angle
                    ),
                    OK,
                ),
                SectorOutcome::Obstruction {
                    vertex,
                    deficiency,
                    distance,
                } => (
                    format!("OBSTRUCTION at `{vertex}` (deficiency {deficiency}, distance {distance:.6})\n"),
                    CHECK_FAILED,
                ),
            };
            Ok(emit(g, &out, human, code))
        }
        Command::Branch { file, ray, cap } => {
            let cx = load(file, g)?;
            let t = trace(&cx, g, ray)?;
            let r = detect_branch_ray(&cx, &t, *cap)?;
            let verdict = if r.branch { "branch ray" } else { "not a branch ray" };
            let human = format!("{verdict}: {}\n", r.reason);
            Ok(emit(g, &r, human, OK))
        }
        Command::Quantize { file, value } => {
            let cx = load(file, g)?;
            let q = quantization_modulus(&cx)?;
            let check = match value {
                Some(v) => Some(check_quantized(spec::angle(v)?, q.m, g.tol.unwrap_or(1e-9))),
                None => None,
            };
            let list: Vec<String> = q.angles.iter().map(Angle::render).collect();
            let mut human = format!("m = {} (angles {})\n", q.m, list.join(", "));
            let mut code = OK;
            if let Some(c) = &check {
                let verdict = if c.quantized { "quantized" } else { "NOT quantized" };
                let _ = writeln!(
                    human,
                    "{verdict}: nearest {}, residual {}",
                    Angle::pi_frac(c.k, q.m),
                    c.residual
                );
                if !c.quantized {
                    code = CHECK_FAILED;
                }
            }
            let rec = QuantizeRecord {
                m: q.m,
                angles: q.angles,
                check,
            };
            Ok(emit(g, &rec, human, code))
        }
        Command::Alpha { file, trace: t, m } => {
            let cx = load(file, g)?;
            let m = match m {
                Some(m) => *m,
                None => quantization_modulus(&cx)?.m,
            };
            let tr = trace(&cx, g, t)?;
            let a = alpha_class(&cx, &tr, m)?;
            Ok(emit(g, &a, format!("α = {} (m = {})\n", a.alpha, a.m), OK))
        }
        Command::PerpBound { a1, a2, m } => {
            let c1 = AlphaClass::new(spec::angle(a1)?, *m)?;
            let c2 = AlphaClass::new(spec::angle(a2)?, *m)?;
            let b = perp_angle_bound(c1, c2)?;
            Ok(emit(g, &b, format!("{b}\n"), OK))
        }
        Command::Pingpong {
            file,
            axis1,
            axis2,
            t,
            samples,
            m,
        } => {
            let cx = load(file, g)?;
            let window = |s: &str| -> Result<AxisWindow, Failure> {
                let (r, origin) = spec::axis(&cx, s)?;
                let tr = trace_ray(&cx, r.start, r.dir, r.length, g.policy)?;
                Ok(AxisWindow::new(tr, origin, *t)?)
            };
            let (w1, w2) = (window(axis1)?, window(axis2)?);
            let opts = PingPongOptions {
                samples: *samples,
                threads,
                budget: g.budget,
                m: *m,
            };
            let r = pingpong_window_check(&cx, &w1, &w2, &opts)?;
            let mut human = match r.verdict {
                PingPongVerdict::DisjointOnWindow => format!("DISJOINT-ON-WINDOW over {} samples", r.samples),
                PingPongVerdict::Intersects => "INTERSECTS".to_string(),
            };
            if let (Some(margin), Some(th)) = (r.min_margin, r.threshold) {
                let _ = write!(human, ", margin {margin:.6} (threshold {th})");
            }
            if let Some(w) = &r.witness {
                let _ = write!(
                    human,
                    ", witness {} with parameters {:.6}, {:.6}",
                    show_point(&cx, &w.point),
                    w.params[0],
                    w.params[1]
                );
            }
            human.push('\n');
            let code = match r.verdict {
                PingPongVerdict::DisjointOnWindow => OK,
                PingPongVerdict::Intersects => CHECK_FAILED,
            };
            Ok(emit(g, &r, human, code))
        }
    }
}
