use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use vecopt::approximation::SolveReport;
use vecopt::{Halfspace, Polyhedron};

use crate::{read_file, write_file, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Svg,
    Off,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// report.json written by `solve --out`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub format: Format,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_export(args: &ExportArgs) -> CliResult<()> {
    let report = SolveReport::from_json(&read_file(&args.report)?)?;
    let text = match args.format {
        Format::Svg => to_svg(&report)?,
        Format::Off => to_off(&report)?,
    };
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Halfspaces that cut the unbounded directions off, plus a description.
/// The slab bound is used when the run had one, otherwise a box twice the
/// size of the bounding box of `points` around its center.
pub fn truncation(report: &SolveReport, points: &[Vec<f64>]) -> CliResult<(Vec<Halfspace>, String)> {
    if let Some(slab) = &report.slab {
        return Ok((vec![slab.halfspace()?], format!("slab w_bar.y <= {}", slab.bound())));
    }
    let q = report.outer.dim();
    let mut lo = vec![f64::INFINITY; q];
    let mut hi = vec![f64::NEG_INFINITY; q];
    for p in points {
        for i in 0..q {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut hs = Vec::with_capacity(2 * q);
    let mut desc = String::from("box");
    for i in 0..q {
        let (c, half) = if lo[i].is_finite() { (0.5 * (lo[i] + hi[i]), (0.5 * (hi[i] - lo[i])).max(0.5)) } else { (0.0, 1.0) };
        let mut e = vec![0.0; q];
        e[i] = 1.0;
        hs.push(Halfspace::new(e.clone(), c - 2.0 * half)?);
        e[i] = -1.0;
        hs.push(Halfspace::new(e, -(c + 2.0 * half))?);
        let _ = write!(desc, " [{}, {}]", c - 2.0 * half, c + 2.0 * half);
    }
    Ok((hs, desc))
}

fn truncate(poly: &Polyhedron, cap: &[Halfspace]) -> CliResult<Polyhedron> {
    let mut p = poly.clone();
    for h in cap {
        p = p.add_halfspace(h.clone())?.polyhedron;
    }
    Ok(p)
}

fn cross(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain).
fn hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Sutherland–Hodgman clip of a polygon by `normal·y ≥ offset`.
fn clip(poly: &[[f64; 2]], h: &Halfspace) -> Vec<[f64; 2]> {
    let s = |p: &[f64; 2]| h.slack(p);
    let mut out = Vec::new();
    for (i, a) in poly.iter().enumerate() {
        let b = &poly[(i + 1) % poly.len()];
        let (sa, sb) = (s(a), s(b));
        if sa >= 0.0 {
            out.push(*a);
        }
        if (sa >= 0.0) != (sb >= 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn polygon_attr(poly: &[[f64; 2]]) -> String {
    poly.iter().map(|p| format!("{:.6},{:.6}", p[0], p[1])).collect::<Vec<_>>().join(" ")
}

pub fn to_svg(report: &SolveReport) -> CliResult<String> {
    let q = report.outer.dim();
    if q != 2 {
        return Err(CliError::DimensionUnsupported { format: "svg", q, supported: 2 });
    }
    let mut anchors = report.outer.vertices().to_vec();
    anchors.extend(report.inner.vertices.iter().cloned());
    let (cap, _) = truncation(report, &anchors)?;
    let outer = truncate(&report.outer, &cap)?;
    let outer_poly = hull(outer.vertices().iter().map(|v| [v[0], v[1]]).collect());

    // Far enough along every ray to leave the truncated region.
    let reach = outer
        .vertices()
        .iter()
        .chain(&report.inner.vertices)
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(1.0, f64::max)
        * 10.0;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for p in &report.inner.vertices {
        pts.push([p[0], p[1]]);
        for r in &report.inner.rays {
            pts.push([p[0] + reach * r[0], p[1] + reach * r[1]]);
        }
    }
    let mut inner_poly = hull(pts);
    for h in &cap {
        inner_poly = clip(&inner_poly, h);
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in outer_poly.iter().chain(&inner_poly) {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let r = 0.006 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="600" height="{:.0}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        600.0 * h / w,
        lo[0] - pad,
        -(hi[1] + pad),
        w,
        h
    );
    let _ = writeln!(s, r#"<title>{} eps={} p={}</title>"#, report.problem, report.config.epsilon, report.config.norm);
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" stroke-width="{:.6}">"#, r / 2.0);
    let _ = writeln!(s, r##"<polygon class="outer" fill="#dde8f5" stroke="#2b5c8a" points="{}"/>"##, polygon_attr(&outer_poly));
    let _ = writeln!(s, r##"<polygon class="inner" fill="#f5dede" stroke="#8a2b2b" points="{}"/>"##, polygon_attr(&inner_poly));
    for v in report.outer.vertices() {
        let _ = writeln!(s, r##"<circle class="outer-vertex" cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="#2b5c8a"/>"##, v[0], v[1]);
    }
    for v in &report.inner.vertices {
        let _ = writeln!(s, r##"<circle class="inner-generator" cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="#8a2b2b"/>"##, v[0], v[1]);
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: &[f64; 3], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Faces of a bounded 3-polytope as vertex loops, counter-clockwise seen from outside.
pub fn faces(poly: &Polyhedron) -> Vec<Vec<usize>> {
    let verts = poly.vertices();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, h) in poly.halfspaces().iter().enumerate() {
        let mut ids: Vec<usize> = (0..verts.len()).filter(|&i| poly.vertex_incidence()[i].contains(&k)).collect();
        if ids.len() < 3 {
            continue;
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if out.iter().any(|f| {
            let mut g = f.clone();
            g.sort_unstable();
            g == sorted
        }) {
            continue;
        }
        let n = h.normal();
        let outward = [-n[0], -n[1], -n[2]];
        let mut c = [0.0; 3];
        for &i in &ids {
            for j in 0..3 {
                c[j] += verts[i][j] / ids.len() as f64;
            }
        }
        let u = sub3(&verts[ids[0]], &c);
        let v = cross3(&outward, &u);
        ids.sort_by(|&a, &b| {
            let da = sub3(&verts[a], &c);
            let db = sub3(&verts[b], &c);
            let ta = dot3(&v, &da).atan2(dot3(&u, &da));
            let tb = dot3(&v, &db).atan2(dot3(&u, &db));
            ta.total_cmp(&tb)
        });
        out.push(ids);
    }
    out
}

/// `V − E + F`, counting each edge from both of its faces.
pub fn euler_characteristic(num_vertices: usize, faces: &[Vec<usize>]) -> Option<i64> {
    let half_edges: usize = faces.iter().map(Vec::len).sum();
    (half_edges % 2 == 0).then(|| num_vertices as i64 - (half_edges / 2) as i64 + faces.len() as i64)
}

pub fn to_off(report: &SolveReport) -> CliResult<String> {
    let q = report.outer.dim();
    if q != 3 {
        return Err(CliError::DimensionUnsupported { format: "off", q, supported: 3 });
    }
    let (cap, desc) = truncation(report, report.outer.vertices())?;
    let poly = truncate(&report.outer, &cap)?;
    if !poly.recession_rays().is_empty() {
        return Err(CliError::Other("truncated outer set is still unbounded".into()));
    }
    let fs = faces(&poly);
    let nv = poly.vertices().len();
    if euler_characteristic(nv, &fs) != Some(2) {
        return Err(CliError::Other(format!("mesh fails the Euler check: V={nv}, F={}", fs.len())));
    }
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "# outer approximation of {}, truncated at {desc}", report.problem);
    let half_edges: usize = fs.iter().map(Vec::len).sum();
    let _ = writeln!(s, "{nv} {} {}", fs.len(), half_edges / 2);
    for v in poly.vertices() {
        let _ = writeln!(s, "{:.9} {:.9} {:.9}", v[0], v[1], v[2]);
    }
    for f in &fs {
        let ids: Vec<String> = f.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{} {}", f.len(), ids.join(" "));
    }
    Ok(s)
}

/// Reads back an OFF file: vertex count, faces.
pub fn parse_off(text: &str) -> Option<(usize, Vec<Vec<usize>>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next()? != "OFF" {
        return None;
    }
    let counts: Vec<usize> = lines.next()?.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
    let (nv, nf) = (*counts.first()?, *counts.get(1)?);
    for _ in 0..nv {
        lines.next()?;
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let ids: Vec<usize> = lines.next()?.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
        let (k, rest) = ids.split_first()?;
        if *k != rest.len() {
            return None;
        }
        faces.push(rest.to_vec());
    }
    Some((nv, faces))
}

#[doc(hidden)]
pub fn export_file(report: &Path, format: Format) -> CliResult<String> {
    let report = SolveReport::from_json(&read_file(report)?)?;
    match format {
        Format::Svg => to_svg(&report),
        Format::Off => to_off(&report),
    }
}
