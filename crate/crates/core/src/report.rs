//! The analysis pipeline and its versioned, byte-stable report.
//!
//! validate -> singular points -> lines -> per-line profiles -> line graph
//! -> bound audits -> (for catalog surfaces) recorded facts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{is_symmetry, CatalogEntry, Expected, LineClaim, StarClaim};
use crate::gf3::{make_field, Embedding, FieldCtx, FieldElement};
use crate::graph::{
    audit_surface, build_graph, completely_reducible_planes, find_triangles_stars, LineGraph, PlaneRecord, TrianglesStars,
};
use crate::line_analysis::{audit_bounds, BoundCheck, Fibration, FiberRecord, Kind, KnownLines, LineProfile, ProfileContext};
use crate::poly::multi::MultiPoly;
use crate::proj::{field_degree_of, parse_line, parse_plane, parse_point, Line, Plane, ProjPoint};
use crate::surface::{lines_exact_adaptive, QuarticSurface, SurfaceError};

pub const SCHEMA: &str = "k3lines.report/1";

/// Largest number of lines on a quartic K3 surface in characteristic 3.
pub const MAX_LINES: usize = 112;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("{0}")]
    NotK3(SurfaceError),
    #[error("{0}")]
    Failed(String),
}

impl From<SurfaceError> for AnalyzeError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::NotQuartic | SurfaceError::NotK3(_) => AnalyzeError::NotK3(e),
            other => AnalyzeError::Failed(other.to_string()),
        }
    }
}

/// How the line list is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineMethod {
    /// Lines rational over GF(3^k), by enumeration of all lines.
    Brute(u32),
    /// All lines, by elimination.
    Exact,
    /// Exact enumeration checked against brute force over GF(3^k).
    Both(u32),
}

impl fmt::Display for LineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineMethod::Brute(k) => write!(f, "brute:{k}"),
            LineMethod::Exact => f.write_str("exact"),
            LineMethod::Both(k) => write!(f, "both:{k}"),
        }
    }
}

impl FromStr for LineMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let k = |v: &str| -> Result<u32, String> {
            match v.parse::<u32>() {
                Ok(k) if (1..=crate::gf3::MAX_DEGREE).contains(&k) => Ok(k),
                _ => Err(format!("bad extension degree `{v}` (expected 1..={})", crate::gf3::MAX_DEGREE)),
            }
        };
        match s.split_once(':') {
            None if s == "exact" => Ok(LineMethod::Exact),
            None if s == "both" => Ok(LineMethod::Both(2)),
            Some(("brute", v)) => Ok(LineMethod::Brute(k(v)?)),
            Some(("both", v)) => Ok(LineMethod::Both(k(v)?)),
            _ => Err(format!("bad line method `{s}` (expected brute:k, exact or both[:k])")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub lines: LineMethod,
    pub max_ext: u32,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            lines: LineMethod::Exact,
            max_ext: crate::gf3::MAX_DEGREE,
            seed: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// report types

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub input: InputEcho,
    pub options: OptionsEcho,
    pub validation: Validation,
    pub work_field: String,
    pub singular_points: Vec<PointOut>,
    pub lines: LinesOut,
    pub profiles: Vec<ProfileOut>,
    pub graph: GraphOut,
    pub audits: AuditsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claims: Option<Vec<ClaimCheck>>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogEcho>,
    pub field: String,
    pub form: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEcho {
    pub name: &'static str,
    pub description: &'static str,
    pub source: &'static str,
    pub params: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptionsEcho {
    pub lines: String,
    pub max_ext: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Validation {
    pub quartic: bool,
    pub finite_singular_locus: bool,
    pub rdp_unverified: bool,
    pub triple_points: usize,
    pub unresolved_singular_points: usize,
}

/// A point written over its field of definition GF(3^field).
#[derive(Clone, Debug, Serialize)]
pub struct PointOut {
    pub point: String,
    pub field: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineOut {
    pub index: usize,
    /// Equations over the field of definition.
    pub equations: String,
    /// Reduced row-echelon basis over the field of definition.
    pub basis: [String; 2],
    pub field: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinesOut {
    pub method: String,
    pub count: usize,
    /// The list contains every line of the surface.
    pub complete: bool,
    /// Degrees of factors carrying lines beyond the largest work field.
    pub residual: Vec<usize>,
    pub list: Vec<LineOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleOut {
    pub k: u32,
    pub brute_force: usize,
    pub exact_rational: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamOut {
    pub point: PointOut,
    pub index: usize,
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberLineOut {
    pub line: String,
    pub field: u32,
    pub multiplicity: usize,
    pub meets_at: PointOut,
    pub smooth: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberOut {
    /// Pencil parameter in the normalized chart over GF(3^work_field).
    pub t: String,
    pub work_field: u32,
    pub plane: String,
    pub splitting: &'static str,
    pub lines: Vec<FiberLineOut>,
    pub base_in_residual: usize,
    pub conjugate_lines: usize,
    pub local_valency: usize,
    pub unresolved: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<&'static str>,
    pub through_singular_point: bool,
    /// Number of Galois-conjugate fibers this record stands for.
    pub orbit_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValencyOut {
    pub value: Option<usize>,
    pub geometric: Option<usize>,
    pub geometric_complete: bool,
    pub fiberwise: usize,
    pub fiberwise_complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileOut {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<ProfileData>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileData {
    pub work_field: u32,
    pub degree: usize,
    pub separable: Option<bool>,
    pub kind: Option<Kind>,
    pub singularity: usize,
    pub singular_points: Vec<PointOut>,
    pub ramification: Vec<RamOut>,
    pub ramification_symbol: Option<String>,
    pub ramification_unresolved: usize,
    pub fibration: Fibration,
    pub fibration_crosscheck: bool,
    pub cuspidal: bool,
    pub family_c: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<String>>,
    pub pq: (usize, usize),
    pub valency: ValencyOut,
    pub fibers: Vec<FiberOut>,
    pub singular_fiber_unresolved: Vec<usize>,
    pub meet_unresolved: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarOut {
    pub point: PointOut,
    pub plane: String,
    pub lines: [usize; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneOut {
    pub plane: String,
    pub field: u32,
    /// (line index, multiplicity)
    pub lines: Vec<(usize, usize)>,
    pub label: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphOut {
    /// degree -> number of lines
    pub degrees: BTreeMap<usize, usize>,
    pub edges: usize,
    pub singular_meetings: usize,
    pub triangles: usize,
    pub noncoplanar_triangles: usize,
    pub stars: Vec<StarOut>,
    pub planes: Vec<PlaneOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditRecord {
    /// `surface` or `line <index>`.
    pub scope: String,
    pub rule: String,
    pub source: &'static str,
    pub value: usize,
    pub bound: usize,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditsOut {
    pub checks: Vec<AuditRecord>,
    /// Audits that could not run, with the reason.
    pub skipped: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimCheck {
    pub source: &'static str,
    pub subject: String,
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub lines: usize,
    pub lines_complete: bool,
    pub singular_points: usize,
    pub stars: usize,
    pub triangles: usize,
    /// "(p, q)" -> number of lines, suffixed `Q` for quasi-elliptic and `C`
    /// for cuspidal lines.
    pub types: BTreeMap<String, usize>,
    pub incomplete_profiles: usize,
    pub audit_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claims: Option<BTreeMap<Status, usize>>,
}

impl Report {
    pub fn audit_failed(&self) -> bool {
        self.summary.audit_failures > 0
    }

    pub fn claim_count(&self, s: Status) -> usize {
        self.claims.iter().flatten().filter(|c| c.status == s).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        render_text(&v, 0, &mut out);
        out
    }
}

/// Indented key/value rendering of a JSON value, in field order.
pub fn render_text(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = "  ".repeat(depth);
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let inline = |v: &Value| match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array() || x.as_array().is_some_and(|y| y.iter().all(|z| !z.is_object() && !z.is_array()))),
        Value::Object(_) => false,
        _ => true,
    };
    let show = |v: &Value| match v {
        Value::Array(a) => format!(
            "[{}]",
            a.iter()
                .map(|x| match x {
                    Value::Array(y) => format!("({})", y.iter().map(scalar).collect::<Vec<_>>().join(", ")),
                    other => scalar(other),
                })
                .collect::<Vec<_>>()
                .join(", ")
        ),
        other => scalar(other),
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if inline(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", show(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if inline(x) {
                    out.push_str(&format!("{pad}- {}\n", show(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, depth + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", show(other))),
    }
}

// ---------------------------------------------------------------------------
// literals over fields of definition

fn down(ctx: &FieldCtx, xs: &[FieldElement]) -> (FieldCtx, Vec<FieldElement>) {
    let d = field_degree_of(ctx, xs);
    let small = make_field(d).expect("subfield degree is supported");
    let emb = Embedding::new(&small, ctx).expect("subfield");
    let v = xs.iter().map(|&c| emb.preimage(c).expect("entries lie in the subfield")).collect();
    (small, v)
}

pub fn point_out(p: &ProjPoint) -> PointOut {
    let (small, v) = down(p.ctx(), p.coords());
    let q = ProjPoint::new(&small, &v).expect("nonzero");
    PointOut {
        point: q.to_literal(),
        field: small.degree(),
    }
}

fn plane_min(h: &Plane) -> Plane {
    let (small, v) = down(h.ctx(), h.coeffs());
    Plane::new(&small, &v).expect("nonzero")
}

fn line_min(l: &Line) -> Line {
    l.transfer(&make_field(l.field_degree()).expect("supported degree")).expect("field of definition")
}

fn line_equations(l: &Line) -> String {
    l.equations()
        .iter()
        .map(|e| Plane::new(l.ctx(), e).expect("nonzero").to_literal())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn line_out(index: usize, l: &Line) -> LineOut {
    let m = line_min(l);
    LineOut {
        index,
        equations: line_equations(&m),
        basis: m.to_literal(),
        field: m.ctx().degree(),
    }
}

/// Coordinates read over `src`, moved to `dst` through their field of
/// definition.
fn move_coords(src: &FieldCtx, dst: &FieldCtx, xs: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let (small, v) = down(src, xs);
    let emb = Embedding::new(&small, dst).ok()?;
    Some(v.iter().map(|&c| emb.map(c)).collect())
}

// ---------------------------------------------------------------------------
// pipeline

/// Where the analyzed form came from.
#[derive(Clone, Debug)]
pub struct Source<'a> {
    pub entry: Option<&'a CatalogEntry>,
    /// Field in which literals of the recorded facts are read.
    pub literal_field: FieldCtx,
}

struct Analysis {
    y: QuarticSurface,
    lines: Vec<Line>,
    complete: bool,
    profiles: Vec<Result<LineProfile, String>>,
    graph: LineGraph,
    ts: TrianglesStars,
    planes: Vec<PlaneRecord>,
}

impl Analysis {
    fn valency(&self, i: usize) -> Option<usize> {
        self.profiles[i].as_ref().ok().filter(|p| p.valency.is_complete()).map(|p| p.valency.value())
    }

    fn profile(&self, i: usize) -> Option<&LineProfile> {
        self.profiles[i].as_ref().ok().filter(|p| p.valency.is_complete())
    }

    fn index_of(&self, l: &Line) -> Option<usize> {
        let m = l.transfer(self.y.work_field())?;
        self.lines.iter().position(|x| *x == m)
    }
}

/// Runs the full pipeline on a quartic form.
pub fn analyze(form: &MultiPoly, source: &Source<'_>, opts: &AnalyzeOptions) -> Result<Report, AnalyzeError> {
    let x = QuarticSurface::new(form)?;
    let (y, lines, complete, residual, oracle) = match opts.lines {
        LineMethod::Exact | LineMethod::Both(_) => {
            let (y, ex) = lines_exact_adaptive(&x, opts.seed, opts.max_ext)?;
            let complete = ex.is_complete();
            let oracle = match opts.lines {
                LineMethod::Both(k) => Some(oracle(&y, &ex.lines, k)?),
                _ => None,
            };
            (y, ex.lines, complete, ex.residual, oracle)
        }
        LineMethod::Brute(k) => {
            let lines = x.lines_bruteforce(k)?;
            let m = lines.first().map_or(x.work_field().degree(), |l| l.ctx().degree());
            let y = if m == x.work_field().degree() { x.clone() } else { x.rebased(m)? };
            let complete = lines.len() == MAX_LINES;
            (y, lines, complete, Vec::new(), None)
        }
    };
    let known = KnownLines { lines: &lines, complete };
    let pc = ProfileContext::new(&y, Some(known), opts.max_ext).map_err(|e| AnalyzeError::Failed(e.to_string()))?;
    let profiles: Vec<Result<LineProfile, String>> =
        lines.par_iter().map(|l| pc.profile(l, true, opts.seed).map_err(|e| e.to_string())).collect();
    let graph = build_graph(&y, &lines).map_err(|e| AnalyzeError::Failed(e.to_string()))?;
    let ts = find_triangles_stars(&graph);
    let planes = completely_reducible_planes(&y, &graph);
    let a = Analysis {
        y,
        lines,
        complete,
        profiles,
        graph,
        ts,
        planes,
    };
    let audits = run_audits(&a);
    let claims = source.entry.map(|e| check_expected(&a, &x, e, &source.literal_field));
    Ok(build_report(&a, &x, source, opts, residual, oracle, audits, claims))
}

fn oracle(y: &QuarticSurface, exact: &[Line], k: u32) -> Result<OracleOut, AnalyzeError> {
    let brute = y.lines_bruteforce(k)?;
    let rational: Vec<&Line> = exact.iter().filter(|l| k % l.field_degree() == 0).collect();
    let mut moved: Vec<Line> = brute.iter().filter_map(|l| l.transfer(y.work_field())).collect();
    let representable = moved.len() == brute.len();
    moved.sort();
    let mut r: Vec<Line> = rational.iter().map(|l| (*l).clone()).collect();
    r.sort();
    Ok(OracleOut {
        k,
        brute_force: brute.len(),
        exact_rational: r.len(),
        agree: representable && moved == r,
    })
}

fn run_audits(a: &Analysis) -> AuditsOut {
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let rec = |scope: String, c: BoundCheck| AuditRecord {
        scope,
        rule: c.rule,
        source: c.source,
        value: c.value,
        bound: c.bound,
        status: if c.ok { Status::Pass } else { Status::Fail },
    };
    for (i, p) in a.profiles.iter().enumerate() {
        let scope = format!("line {i}");
        match p {
            Ok(p) => match audit_bounds(p) {
                Ok(cs) => checks.extend(cs.into_iter().map(|c| rec(scope.clone(), c))),
                Err(e) => skipped.push((scope, e.to_string())),
            },
            Err(e) => skipped.push((scope, e.clone())),
        }
    }
    if a.complete {
        let valencies: Vec<Option<usize>> = (0..a.lines.len()).map(|i| a.valency(i)).collect();
        match audit_surface(&a.y, &a.graph, &a.ts, &a.planes, &valencies) {
            Ok(cs) => checks.extend(cs.into_iter().map(|c| rec("surface".into(), c))),
            Err(e) => skipped.push(("surface".into(), e.to_string())),
        }
    } else {
        skipped.push(("surface".into(), "line list incomplete".into()));
    }
    AuditsOut { checks, skipped }
}

fn type_key(p: &LineProfile) -> String {
    format!(
        "({}, {}){}{}",
        p.pq.0,
        p.pq.1,
        if p.fibration == Fibration::QuasiElliptic { "Q" } else { "" },
        if p.cuspidal { "C" } else { "" }
    )
}

fn fiber_out(f: &FiberRecord) -> FiberOut {
    let ctx = f.plane.ctx();
    FiberOut {
        t: f.t.format(ctx),
        work_field: f.work_degree,
        plane: plane_min(&f.plane).to_literal(),
        splitting: f.splitting.as_str(),
        lines: f
            .lines
            .iter()
            .map(|(l, m, p, s)| {
                let lm = line_min(l);
                FiberLineOut {
                    line: line_equations(&lm),
                    field: lm.ctx().degree(),
                    multiplicity: *m,
                    meets_at: point_out(p),
                    smooth: *s,
                }
            })
            .collect(),
        base_in_residual: f.base_in_residual,
        conjugate_lines: f.conjugate_lines,
        local_valency: f.local_valency,
        unresolved: f.unresolved,
        label: f.config_label,
        through_singular_point: f.through_singular_point,
        orbit_size: f.orbit_size,
    }
}

fn profile_data(p: &LineProfile) -> ProfileData {
    let ctx = p.line.ctx();
    ProfileData {
        work_field: p.work_degree,
        degree: p.degree,
        separable: p.separable,
        kind: p.kind,
        singularity: p.singularity,
        singular_points: p.singular_points.iter().map(point_out).collect(),
        ramification: p
            .ramification
            .iter()
            .map(|(pt, index, length)| RamOut {
                point: point_out(pt),
                index: *index,
                length: *length,
            })
            .collect(),
        ramification_symbol: p.ramification_symbol.clone(),
        ramification_unresolved: p.ramification_unresolved,
        fibration: p.fibration,
        fibration_crosscheck: p.fibration_crosscheck,
        cuspidal: p.cuspidal,
        family_c: p.family_c,
        phi: p.phi.as_ref().map(|v| v.iter().map(|&c| ctx.format(c)).collect()),
        pq: p.pq,
        valency: ValencyOut {
            value: p.valency.is_complete().then(|| p.valency.value()),
            geometric: p.valency.geometric,
            geometric_complete: p.valency.geometric_complete,
            fiberwise: p.valency.fiberwise,
            fiberwise_complete: p.valency.fiberwise_complete,
        },
        fibers: p.fibers.iter().map(fiber_out).collect(),
        singular_fiber_unresolved: p.singular_fiber_unresolved.clone(),
        meet_unresolved: p.meet_unresolved,
    }
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    a: &Analysis,
    x: &QuarticSurface,
    source: &Source<'_>,
    opts: &AnalyzeOptions,
    residual: Vec<usize>,
    oracle: Option<OracleOut>,
    audits: AuditsOut,
    claims: Option<Vec<ClaimCheck>>,
) -> Report {
    let cert = x.certificate();
    let profiles: Vec<ProfileOut> = a
        .profiles
        .iter()
        .enumerate()
        .map(|(index, p)| match p {
            Ok(p) => ProfileOut {
                index,
                error: None,
                data: Some(profile_data(p)),
            },
            Err(e) => ProfileOut {
                index,
                error: Some(e.clone()),
                data: None,
            },
        })
        .collect();
    let mut degrees = BTreeMap::new();
    for d in a.graph.degree_sequence() {
        *degrees.entry(d).or_insert(0) += 1;
    }
    let graph = GraphOut {
        degrees,
        edges: a.graph.meets.iter().filter(|m| m.smooth).count(),
        singular_meetings: a.graph.meets.iter().filter(|m| !m.smooth).count(),
        triangles: a.ts.triangles.len(),
        noncoplanar_triangles: a.ts.noncoplanar,
        stars: a
            .ts
            .stars
            .iter()
            .map(|s| StarOut {
                point: point_out(&s.point),
                plane: plane_min(&s.plane).to_literal(),
                lines: s.lines,
            })
            .collect(),
        planes: a
            .planes
            .iter()
            .map(|r| {
                let h = plane_min(&r.plane);
                PlaneOut {
                    plane: h.to_literal(),
                    field: h.ctx().degree(),
                    lines: r.lines.clone(),
                    label: r.label,
                }
            })
            .collect(),
    };
    let mut types = BTreeMap::new();
    for p in a.profiles.iter().flatten() {
        *types.entry(type_key(p)).or_insert(0) += 1;
    }
    let incomplete_profiles = (0..a.lines.len()).filter(|&i| a.profile(i).is_none()).count();
    let audit_failures = audits.checks.iter().filter(|c| c.status == Status::Fail).count();
    let claim_summary = claims.as_ref().map(|cs| {
        let mut m = BTreeMap::new();
        for c in cs {
            *m.entry(c.status).or_insert(0) += 1;
        }
        m
    });
    Report {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        seed: opts.seed,
        input: InputEcho {
            catalog: source.entry.map(|e| CatalogEcho {
                name: e.name,
                description: e.description,
                source: e.expected.source,
                params: e.params.clone(),
                degenerate: e.degenerate.clone(),
            }),
            field: format!("3^{}", x.base_field().degree()),
            form: crate::families::format_form(x.form()),
        },
        options: OptionsEcho {
            lines: opts.lines.to_string(),
            max_ext: opts.max_ext,
        },
        validation: Validation {
            quartic: cert.quartic,
            finite_singular_locus: cert.finite_singular_locus,
            rdp_unverified: cert.rdp_unverified,
            triple_points: cert.triple_points,
            unresolved_singular_points: cert.unresolved_singular_points,
        },
        work_field: format!("3^{}", a.y.work_field().degree()),
        singular_points: a.y.singular_points().iter().map(point_out).collect(),
        lines: LinesOut {
            method: opts.lines.to_string(),
            count: a.lines.len(),
            complete: a.complete,
            residual,
            list: a.lines.iter().enumerate().map(|(i, l)| line_out(i, l)).collect(),
            oracle,
        },
        profiles,
        summary: Summary {
            lines: a.lines.len(),
            lines_complete: a.complete,
            singular_points: a.y.singular_points().len(),
            stars: graph.stars.len(),
            triangles: graph.triangles,
            types,
            incomplete_profiles,
            audit_failures,
            claims: claim_summary,
        },
        graph,
        audits,
        claims,
    }
}

// ---------------------------------------------------------------------------
// recorded facts

struct Checker<'a> {
    a: &'a Analysis,
    lit: &'a FieldCtx,
    out: Vec<ClaimCheck>,
}

impl Checker<'_> {
    fn push(&mut self, source: &'static str, subject: &str, claim: &str, expected: String, observed: String, status: Status) {
        self.out.push(ClaimCheck {
            source,
            subject: subject.to_string(),
            claim: claim.to_string(),
            expected,
            observed,
            status,
        });
    }

    /// Equality claim; `decided` is false when the observation may still
    /// change with more data.
    fn eq<T: PartialEq + fmt::Debug>(&mut self, source: &'static str, subject: &str, claim: &str, want: T, got: Option<T>) {
        let (obs, status) = match got {
            Some(g) => (format!("{g:?}"), if g == want { Status::Pass } else { Status::Fail }),
            None => ("undetermined".into(), Status::Undecided),
        };
        self.push(source, subject, claim, format!("{want:?}"), obs, status);
    }

    fn plane(&self, s: &str) -> Option<Plane> {
        let h = parse_plane(self.lit, s).ok()?;
        let v = move_coords(self.lit, self.a.y.work_field(), h.coeffs())?;
        Plane::new(self.a.y.work_field(), &v).ok()
    }

    fn point_in(&self, s: &str, ctx: &FieldCtx) -> Option<Vec<FieldElement>> {
        let p = parse_point(self.lit, s).ok()?;
        move_coords(self.lit, ctx, p.coords())
    }

    fn line_claim(&mut self, c: &LineClaim) {
        let targets: Vec<(String, Option<usize>)> = match c.line {
            Some(lit) => {
                let idx = parse_line(self.lit, lit).ok().and_then(|l| self.a.index_of(&l));
                vec![(format!("line {lit}"), idx)]
            }
            None => (0..self.a.lines.len()).map(|i| (format!("line {i}"), Some(i))).collect(),
        };
        if c.line.is_none() && !self.a.complete {
            self.push(c.source, "every line", "claims hold for every line", "complete list".into(), "line list incomplete".into(), Status::Undecided);
        }
        if c.line.is_none() {
            // one aggregated row per property
            let mut rows: BTreeMap<&'static str, (String, Vec<Status>, Vec<String>)> = BTreeMap::new();
            for (_, idx) in &targets {
                for (name, want, got, st) in self.line_properties(c, *idx) {
                    let e = rows.entry(name).or_insert((want, Vec::new(), Vec::new()));
                    e.1.push(st);
                    if st != Status::Pass {
                        e.2.push(format!("line {}: {got}", idx.unwrap_or(0)));
                    }
                }
            }
            for (name, (want, sts, bad)) in rows {
                let status = sts.iter().copied().max().unwrap_or(Status::Undecided);
                let obs = if bad.is_empty() { format!("all {} lines", sts.len()) } else { bad.join("; ") };
                self.push(c.source, "every line", name, want, obs, status);
            }
            return;
        }
        for (subject, idx) in targets {
            if idx.is_none() {
                self.push(c.source, &subject, "line lies on the surface and is listed", "listed".into(), "not found".into(), Status::Fail);
                continue;
            }
            for (name, want, got, st) in self.line_properties(c, idx) {
                self.push(c.source, &subject, name, want, got, st);
            }
        }
    }

    fn line_properties(&self, c: &LineClaim, idx: Option<usize>) -> Vec<(&'static str, String, String, Status)> {
        let p = idx.and_then(|i| self.a.profiles[i].as_ref().ok());
        let complete = idx.and_then(|i| self.a.profile(i));
        let mut out = Vec::new();
        let mut add = |name: &'static str, want: String, got: Option<String>, decided: bool| {
            let st = match &got {
                Some(g) if decided => {
                    if *g == want {
                        Status::Pass
                    } else {
                        Status::Fail
                    }
                }
                _ => Status::Undecided,
            };
            out.push((name, want, got.unwrap_or_else(|| "undetermined".into()), st));
        };
        if let Some(d) = c.degree {
            add("degree", d.to_string(), p.map(|p| p.degree.to_string()), true);
        }
        if let Some(s) = c.separable {
            add("separable", s.to_string(), p.map(|p| p.separable.map_or("undetermined".into(), |v| v.to_string())), true);
        }
        if let Some(k) = c.second_kind {
            add("second kind", k.to_string(), p.map(|p| (p.kind == Some(Kind::Second)).to_string()), true);
        }
        if let Some(q) = c.quasi_elliptic {
            add("quasi-elliptic", q.to_string(), p.map(|p| (p.fibration == Fibration::QuasiElliptic).to_string()), true);
        }
        if let Some(q) = c.cuspidal {
            add("cuspidal", q.to_string(), p.map(|p| p.cuspidal.to_string()), true);
        }
        if let Some(r) = c.ramification {
            add("ramification", r.to_string(), p.and_then(|p| p.ramification_symbol.clone()), true);
        }
        if let Some(pq) = c.pq {
            add("type (p, q)", format!("{pq:?}"), complete.map(|p| format!("{:?}", p.pq)), true);
        }
        if let Some(v) = c.valency {
            add("valency", v.to_string(), complete.map(|p| p.valency.value().to_string()), true);
        }
        for (tag, n) in &c.fibers {
            let got = complete.map(|p| p.fibers.iter().filter(|f| f.splitting == *tag).map(|f| f.orbit_size).sum::<usize>());
            let st = match got {
                Some(g) if g >= *n => Status::Pass,
                Some(_) => Status::Fail,
                None => Status::Undecided,
            };
            out.push(("fibers", format!("at least {n} {}", tag.as_str()), got.map_or("undetermined".into(), |g| format!("{g} {}", tag.as_str())), st));
        }
        for lit in &c.fiber_plane_through {
            let got = complete.map(|p| {
                p.fibers.iter().any(|f| self.point_in(lit, f.plane.ctx()).is_some_and(|v| f.plane.contains_point(&v)))
            });
            let st = match got {
                Some(true) => Status::Pass,
                Some(false) => Status::Fail,
                None => Status::Undecided,
            };
            out.push(("fiber plane through point", format!("some fiber plane contains {lit}"), got.map_or("undetermined".into(), |g| g.to_string()), st));
        }
        out
    }

    fn star_claim(&mut self, c: &StarClaim) {
        let subject = format!("star plane {}", c.plane);
        let Some(h) = self.plane(c.plane) else {
            self.push(c.source, &subject, "plane literal", c.plane.into(), "unreadable".into(), Status::Fail);
            return;
        };
        let star = self.a.ts.stars.iter().find(|s| s.plane == h);
        let Some(star) = star else {
            let st = if self.a.complete { Status::Fail } else { Status::Undecided };
            self.push(c.source, &subject, "plane contains a star", "star".into(), "no star".into(), st);
            return;
        };
        self.push(c.source, &subject, "plane contains a star", "star".into(), "star".into(), Status::Pass);
        let profs: Option<Vec<&LineProfile>> = star.lines.iter().map(|&i| self.a.profile(i)).collect();
        if let Some(v) = c.valencies {
            let got = profs.as_ref().map(|ps| {
                let mut v: Vec<usize> = ps.iter().map(|p| p.valency.value()).collect();
                v.sort();
                v
            });
            self.eq(c.source, &subject, "valencies of the star lines", v.to_vec(), got);
        }
        if let Some(n) = c.cuspidal {
            let got = profs.as_ref().map(|ps| ps.iter().filter(|p| p.cuspidal).count());
            self.eq(c.source, &subject, "cuspidal star lines", n, got);
        }
        if let Some(n) = c.quasi_elliptic {
            let got = profs.as_ref().map(|ps| ps.iter().filter(|p| p.fibration == Fibration::QuasiElliptic).count());
            self.eq(c.source, &subject, "quasi-elliptic star lines", n, got);
        }
        for (pq, n) in &c.types {
            let got = profs.as_ref().map(|ps| ps.iter().filter(|p| p.pq == *pq).count());
            self.eq(c.source, &subject, &format!("star lines of type {pq:?}"), *n, got);
        }
    }
}

/// Compares the analysis with the facts recorded for a catalog surface.
fn check_expected(a: &Analysis, x: &QuarticSurface, entry: &CatalogEntry, lit: &FieldCtx) -> Vec<ClaimCheck> {
    let e: &Expected = &entry.expected;
    let src = e.source;
    let mut ck = Checker { a, lit, out: Vec::new() };
    let all_profiles: Option<Vec<&LineProfile>> = a.complete.then(|| (0..a.lines.len()).map(|i| a.profile(i)).collect()).flatten();
    if let Some(n) = e.lines {
        let got = a.lines.len();
        let status = if a.complete {
            if got == n {
                Status::Pass
            } else {
                Status::Fail
            }
        } else if got > n {
            Status::Fail
        } else {
            Status::Undecided
        };
        let obs = if a.complete { got.to_string() } else { format!("at least {got}") };
        ck.push(src, "surface", "number of lines", n.to_string(), obs, status);
    }
    if let Some(n) = e.singular_points {
        let resolved = x.certificate().unresolved_singular_points == 0;
        ck.eq(src, "surface", "number of singular points", n, resolved.then(|| a.y.singular_points().len()));
    }
    for lit in &e.singular_at {
        let got = ck
            .point_in(lit, a.y.work_field())
            .map(|v| a.y.singular_points().iter().any(|p| ProjPoint::new(a.y.work_field(), &v).is_ok_and(|q| q == *p)));
        ck.eq(src, "surface", &format!("singular point at {lit}"), true, got);
    }
    if let Some(n) = e.stars {
        ck.eq(src, "surface", "number of stars", n, a.complete.then_some(a.ts.stars.len()));
    }
    for c in &e.star_claims {
        ck.star_claim(c);
    }
    for t in &e.types {
        let got = all_profiles.as_ref().map(|ps| ps.iter().filter(|p| p.pq == t.pq).count());
        if t.exact {
            ck.eq(src, "surface", &format!("lines of type {:?}", t.pq), t.count, got);
        } else {
            let st = match got {
                Some(g) if g >= t.count => Status::Pass,
                Some(_) => Status::Fail,
                None => Status::Undecided,
            };
            ck.push(src, "surface", &format!("lines of type {:?}", t.pq), format!("at least {}", t.count), got.map_or("undetermined".into(), |g| g.to_string()), st);
        }
    }
    if let Some(want) = e.all_elliptic {
        let got = all_profiles.as_ref().map(|ps| ps.iter().all(|p| p.fibration == Fibration::Elliptic));
        ck.eq(src, "surface", "all lines elliptic", want, got);
    }
    for c in &e.line_claims {
        ck.line_claim(c);
    }
    for s in &e.symmetries {
        let got = is_symmetry(x.form(), s).ok();
        ck.eq(src, "surface", &format!("symmetry [{}]", s.join(":")), true, got);
    }
    for s in &e.symmetry_errata {
        let got = is_symmetry(x.form(), s).ok();
        ck.eq(src, "surface", &format!("stated symmetry [{}] does not fix the printed form (erratum)", s.join(":")), false, got);
    }
    ck.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_methods_parse() {
        assert_eq!("exact".parse::<LineMethod>(), Ok(LineMethod::Exact));
        assert_eq!("brute:2".parse::<LineMethod>(), Ok(LineMethod::Brute(2)));
        assert_eq!("both".parse::<LineMethod>(), Ok(LineMethod::Both(2)));
        assert_eq!("both:4".parse::<LineMethod>(), Ok(LineMethod::Both(4)));
        assert!("brute:9".parse::<LineMethod>().is_err());
        assert!("fast".parse::<LineMethod>().is_err());
        for m in [LineMethod::Exact, LineMethod::Brute(3), LineMethod::Both(2)] {
            assert_eq!(m.to_string().parse::<LineMethod>(), Ok(m));
        }
    }

    #[test]
    fn text_rendering_nests() {
        let v = serde_json::json!({"a": 1, "b": {"c": [1, 2]}, "d": [{"e": "x"}]});
        let mut s = String::new();
        render_text(&v, 0, &mut s);
        assert_eq!(s, "a: 1\nb:\n  c: [1, 2]\nd:\n  -\n    e: x\n");
    }
}
