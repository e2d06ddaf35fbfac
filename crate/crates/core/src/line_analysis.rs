//! Per-line invariants: the pencil of residual cubics through a line, its
//! degree and separability, ramification, kind, singular and reducible
//! fibers, the quasi-elliptic and cuspidal tests, type (p, q) and valency.
//!
//! Everything is computed in a chart where the line is x0 = x1 = 0. The
//! plane x0 = t x1 is the fiber over t, and t = inf is the plane x1 = 0.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf3::{make_field, Embedding, FieldCtx, FieldElement};
use crate::linalg::Matrix;
use crate::poly::binary::{div_forms, gcd_forms, wronskian, P1};
use crate::poly::multi::{symbolic_det, Mono};
use crate::poly::univariate::{interpolate, padded, roots, sylvester_resultant};
use crate::poly::{split_ternary_cubic, BinaryForm, MultiPoly, SplittingTag, UPoly};
use crate::proj::{lines_meet, plane_through, Line, Plane, ProjMap, ProjPoint};
use crate::solve::{change_coords, random_element, random_invertible};
use crate::surface::{lines_through_point, NormalizedLineChart, QuarticSurface, SurfaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LineError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("line of degree 0")]
    DegreeZeroLine,
    #[error("inseparable line")]
    InseparableLine,
    #[error("normalization impossible: {0}")]
    NormalizationImpossible(String),
    #[error("incomplete profile: {0}")]
    IncompleteProfile(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
}

/// A parameter of the pencil of planes through the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Finite(FieldElement),
    Infinity,
}

impl Param {
    pub fn format(&self, ctx: &FieldCtx) -> String {
        match self {
            Param::Finite(a) => ctx.format(*a),
            Param::Infinity => "inf".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fibration {
    Elliptic,
    QuasiElliptic,
}

pub fn pencil_vars() -> Vec<String> {
    ["t", "x1", "x2", "x3"].iter().map(|s| s.to_string()).collect()
}

fn plane_vars() -> Vec<String> {
    ["y0", "y1", "y2"].iter().map(|s| s.to_string()).collect()
}

/// g(t; x1, x2, x3) = F(t x1, x1, x2, x3) / x1 together with the binary
/// cubics alpha, beta in (x2, x3) with g(t; 0, x2, x3) = t alpha + beta.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub g: MultiPoly,
    pub alpha: BinaryForm,
    pub beta: BinaryForm,
}

pub fn pencil_forms(chart: &NormalizedLineChart) -> Pencil {
    let f = &chart.form;
    let ctx = f.ctx();
    let mut g = MultiPoly::zero(ctx, pencil_vars());
    let mut alpha = BinaryForm::zero(3);
    let mut beta = BinaryForm::zero(3);
    for (m, &c) in f.terms() {
        let e = &m.0;
        assert!(e[0] + e[1] >= 1, "line not on the surface");
        g.add_term(Mono(vec![e[0], e[0] + e[1] - 1, e[2], e[3]]), c);
        if e[0] == 1 && e[1] == 0 {
            alpha.c[e[2] as usize] = c;
        }
        if e[0] == 0 && e[1] == 1 {
            beta.c[e[2] as usize] = c;
        }
    }
    Pencil { g, alpha, beta }
}

/// Residual cubic of the chart form in the plane over t, in coordinates
/// (y0, y1, y2): the plane point is (t y0, y0, y1, y2), or (y0, 0, y1, y2)
/// for t = inf. The line itself is y0 = 0 in both cases.
pub fn residual_cubic(form: &MultiPoly, t: Param) -> MultiPoly {
    let ctx = form.ctx();
    let mut c = MultiPoly::zero(ctx, plane_vars());
    for (m, &a) in form.terms() {
        let e = &m.0;
        match t {
            Param::Finite(t) => {
                let coef = ctx.mul(a, ctx.pow(t, e[0] as u64));
                c.add_term(Mono(vec![e[0] + e[1] - 1, e[2], e[3]]), coef);
            }
            Param::Infinity => {
                if e[1] == 0 {
                    c.add_term(Mono(vec![e[0] - 1, e[2], e[3]]), a);
                }
            }
        }
    }
    c
}

fn plane_point(ctx: &FieldCtx, t: Param, y: &[FieldElement]) -> Vec<FieldElement> {
    match t {
        Param::Finite(t) => vec![ctx.mul(t, y[0]), y[0], y[1], y[2]],
        Param::Infinity => vec![y[0], FieldElement::ZERO, y[1], y[2]],
    }
}

/// The line l0 y0 + l1 y1 + l2 y2 = 0 of the plane over t, in chart
/// coordinates.
fn plane_line(ctx: &FieldCtx, t: Param, l: &[FieldElement]) -> Line {
    let (e1, e2) = match t {
        Param::Finite(t) => (
            vec![FieldElement::ONE, ctx.neg(t), FieldElement::ZERO, FieldElement::ZERO],
            vec![FieldElement::ZERO, l[0], l[1], l[2]],
        ),
        Param::Infinity => (
            vec![FieldElement::ZERO, FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO],
            vec![l[0], FieldElement::ZERO, l[1], l[2]],
        ),
    };
    Line::from_equations(ctx, &e1, &e2).expect("independent equations")
}

/// Pencil parameter of the plane spanned by the base line and a point off it.
fn param_of_point(ctx: &FieldCtx, p: &[FieldElement]) -> Param {
    if p[1].is_zero() {
        Param::Infinity
    } else {
        Param::Finite(ctx.div(p[0], p[1]).unwrap())
    }
}

fn param_of_line(ctx: &FieldCtx, m: &Line) -> Option<Param> {
    let r = m.rows();
    r.iter()
        .find(|row| !row[0].is_zero() || !row[1].is_zero())
        .map(|row| param_of_point(ctx, row))
}

fn base_line(ctx: &FieldCtx) -> Line {
    let e = |i: usize| {
        let mut v = vec![FieldElement::ZERO; 4];
        v[i] = FieldElement::ONE;
        v
    };
    Line::from_equations(ctx, &e(0), &e(1)).unwrap()
}

fn point_on_base(p: P1) -> Vec<FieldElement> {
    vec![FieldElement::ZERO, FieldElement::ZERO, p.0, p.1]
}

fn is_smooth_in(form: &MultiPoly, p: &[FieldElement]) -> bool {
    (0..4).any(|i| !form.partial(i).eval(p).is_zero())
}

// ---------------------------------------------------------------------------
// degree, separability, ramification

#[derive(Clone, Debug)]
pub struct DegreeInfo {
    pub degree: usize,
    /// None for degree 0.
    pub separable: Option<bool>,
    /// Common roots of alpha and beta over the work field, with multiplicity.
    pub base_points: Vec<(P1, usize)>,
    /// Degrees of base-locus factors not split over the work field.
    pub base_unresolved: Vec<usize>,
    /// Distinct base points over the algebraic closure.
    pub singularity: usize,
    /// The gcd-free pair defining the map to the pencil.
    pub reduced: (BinaryForm, BinaryForm),
}

pub fn degree_and_separability(ctx: &FieldCtx, alpha: &BinaryForm, beta: &BinaryForm) -> DegreeInfo {
    assert!(!(alpha.is_zero() && beta.is_zero()), "both pencil forms vanish");
    let proportional = alpha.is_zero()
        || beta.is_zero()
        || (0..=3).all(|i| (0..=3).all(|j| ctx.mul(alpha.c[i], beta.c[j]) == ctx.mul(alpha.c[j], beta.c[i])));
    let gcd = if proportional {
        if alpha.is_zero() { beta.normalized(ctx) } else { alpha.normalized(ctx) }
    } else {
        gcd_forms(ctx, alpha, beta)
    };
    let degree = 3 - gcd.deg;
    let (pts, residual) = if gcd.deg == 0 { (Vec::new(), Vec::new()) } else { gcd.roots(ctx) };
    let singularity = pts.len() + residual.iter().map(|r| r.0).sum::<usize>();
    let reduced = if degree == 0 {
        (BinaryForm::zero(0), BinaryForm::zero(0))
    } else {
        (div_forms(ctx, alpha, &gcd), div_forms(ctx, beta, &gcd))
    };
    let separable = (degree > 0).then(|| !wronskian(ctx, &reduced.0.dehomogenize(), &reduced.1.dehomogenize()).is_zero());
    DegreeInfo {
        degree,
        separable,
        base_points: pts,
        base_unresolved: residual.iter().map(|r| r.0).collect(),
        singularity,
        reduced,
    }
}

fn mult_at(ctx: &FieldCtx, f: &BinaryForm, p: P1) -> usize {
    assert!(!f.is_zero());
    if p.1.is_zero() {
        return f.infinity_multiplicity();
    }
    let lin = UPoly::linear_root(ctx, p.0);
    let mut u = f.dehomogenize();
    let mut k = 0;
    loop {
        let (q, r) = u.divrem(ctx, &lin);
        if !r.is_zero() {
            return k;
        }
        u = q;
        k += 1;
    }
}

/// A ramified point of the map from the line to the pencil.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamPoint {
    /// On x0 = x1 = 0 in chart coordinates, as (x2 : x3).
    pub point: P1,
    pub index: usize,
    pub length: usize,
}

/// Ramified points (index n from the local equation of the fiber, length m
/// from the Wronskian of the gcd-free pair) and the number of ramified
/// points not defined over the work field.
pub fn ramification_profile(ctx: &FieldCtx, info: &DegreeInfo) -> Result<(Vec<RamPoint>, usize), LineError> {
    if info.separable != Some(true) {
        return Err(LineError::InseparableLine);
    }
    let d = info.degree;
    let (a, b) = &info.reduced;
    let w = wronskian(ctx, &a.dehomogenize(), &b.dehomogenize());
    let wh = BinaryForm::from_upoly(&w, 2 * d - 2);
    if wh.deg == 0 {
        return Ok((Vec::new(), 0));
    }
    let (pts, residual) = wh.roots(ctx);
    let mut out = Vec::new();
    for (p, m) in pts {
        let av = a.eval(ctx, p);
        let n = if av.is_zero() {
            mult_at(ctx, a, p)
        } else {
            let t0 = ctx.neg(ctx.div(b.eval(ctx, p), av).unwrap());
            mult_at(ctx, &a.scale(ctx, t0).add(ctx, b), p)
        };
        out.push(RamPoint { point: p, index: n, length: m });
    }
    Ok((out, residual.iter().map(|r| r.0).sum()))
}

/// Symbol such as "2_1^4", "2_1 3_3" or "3_4".
pub fn ramification_symbol(points: &[RamPoint]) -> String {
    let mut keys: Vec<(usize, usize)> = points.iter().map(|p| (p.index, p.length)).collect();
    keys.sort();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let j = keys[i..].iter().take_while(|k| **k == keys[i]).count();
        let base = format!("{}_{}", keys[i].0, keys[i].1);
        parts.push(if j > 1 { format!("{base}^{j}") } else { base });
        i += j;
    }
    parts.join(" ")
}

// ---------------------------------------------------------------------------
// kind

#[derive(Clone, Debug)]
pub struct KindData {
    /// Hessian determinant of g restricted to x1 = 0, in (t, x2, x3).
    pub hessian: MultiPoly,
    /// Resultant in t of t alpha + beta and the hessian, in (x2, x3).
    pub resultant: MultiPoly,
    pub kind: Kind,
}

pub fn line_resultant(p: &Pencil) -> Result<KindData, LineError> {
    let ctx = p.g.ctx();
    if degree_and_separability(ctx, &p.alpha, &p.beta).degree == 0 {
        return Err(LineError::DegreeZeroLine);
    }
    let m: Vec<Vec<MultiPoly>> = (1..4)
        .map(|i| (1..4).map(|j| p.g.partial(i).partial(j)).collect())
        .collect();
    let h = symbolic_det(&m);
    let tv: Vec<String> = ["t", "x2", "x3"].iter().map(|s| s.to_string()).collect();
    let mut hr = MultiPoly::zero(ctx, tv.clone());
    for (mo, &c) in h.terms() {
        if mo.0[1] == 0 {
            hr.add_term(Mono(vec![mo.0[0], mo.0[2], mo.0[3]]), c);
        }
    }
    let alpha = p.alpha.to_poly(ctx, tv.clone(), 1, 2);
    let nbeta = p.beta.to_poly(ctx, tv.clone(), 1, 2).neg();
    let mut r = MultiPoly::zero(ctx, tv.clone());
    if !hr.is_zero() {
        let hk = hr.coefficients_in(0);
        let e = hk.len() - 1;
        for (k, h) in hk.iter().enumerate() {
            r = r.add(&h.mul(&nbeta.pow(k as u32)).mul(&alpha.pow((e - k) as u32)));
        }
    }
    let xv: Vec<String> = tv[1..].to_vec();
    let resultant = r.trim_vars(&xv);
    let kind = if resultant.is_zero() { Kind::Second } else { Kind::First };
    Ok(KindData { hessian: hr, resultant, kind })
}

// ---------------------------------------------------------------------------
// fibers

fn linear_substitution(f: &MultiPoly, idx: &[usize], a: &Matrix) -> MultiPoly {
    let ctx = f.ctx();
    let vars = f.vars().to_vec();
    let n = vars.len();
    let binds: Vec<(String, MultiPoly)> = idx
        .iter()
        .enumerate()
        .map(|(i, &vi)| {
            let img = MultiPoly::from_terms(
                ctx,
                vars.clone(),
                idx.iter().enumerate().map(|(j, &vj)| {
                    let mut e = vec![0u16; n];
                    e[vj] = 1;
                    (e, a.get(i, j))
                }),
            );
            (vars[vi].clone(), img)
        })
        .collect();
    let refs: Vec<(&str, MultiPoly)> = binds.iter().map(|(v, p)| (v.as_str(), p.clone())).collect();
    f.substitute_simultaneous(&refs)
}

fn coeff_list(f: &MultiPoly, v: usize, formal: usize) -> Vec<MultiPoly> {
    let mut c = f.coefficients_in(v);
    assert!(c.len() <= formal + 1, "formal degree bound violated");
    c.resize(formal + 1, MultiPoly::zero(f.ctx(), f.vars().to_vec()));
    c
}

/// Source of the random data of an elimination: the whole work field, or a
/// subfield so that the eliminant has coefficients in that subfield.
#[derive(Clone, Copy)]
pub enum Sampler<'a> {
    Full,
    Sub(&'a Embedding),
}

impl Sampler<'_> {
    fn element(&self, ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FieldElement {
        match self {
            Sampler::Full => random_element(ctx, rng),
            Sampler::Sub(e) => e.map(random_element(e.source(), rng)),
        }
    }

    fn invertible(&self, ctx: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        match self {
            Sampler::Full => random_invertible(ctx, n, rng),
            Sampler::Sub(e) => {
                let m = random_invertible(e.source(), n, rng);
                let mut out = Matrix::zero(n, n);
                for i in 0..n {
                    for j in 0..n {
                        out.set(i, j, e.map(m.get(i, j)));
                    }
                }
                out
            }
        }
    }

    /// Attempts before giving up: small subfields degenerate more often.
    fn attempts(&self) -> usize {
        match self {
            Sampler::Sub(e) if e.source().size() < 27 => 24,
            _ => 8,
        }
    }
}

/// Formal degree in t of the singular-fiber eliminant.
const D_DEG: usize = 176;

/// Univariate polynomial in t vanishing at every t whose residual cubic is
/// singular; None when it vanishes identically (every fiber singular).
/// Built from the cubic and its three partials (the partials alone are not
/// enough in characteristic 3, where the Euler relation degenerates), by
/// iterated resultants in random coordinates, gcd over three trials.
pub fn singular_fiber_poly(g: &MultiPoly, rng: &mut ChaCha8Rng) -> Option<UPoly> {
    singular_fiber_poly_with(g, rng, Sampler::Full)
}

/// As [`singular_fiber_poly`] with the random data drawn from `sampler`;
/// stops after three nonzero trials.
pub fn singular_fiber_poly_with(g: &MultiPoly, rng: &mut ChaCha8Rng, sampler: Sampler<'_>) -> Option<UPoly> {
    let ctx = g.ctx();
    assert!(ctx.size() as usize > D_DEG, "work field too small");
    let nodes: Vec<FieldElement> = (0..=D_DEG).map(|i| ctx.element(i)).collect();
    let xs: Vec<FieldElement> = (0..7).map(|i| ctx.element(i)).collect();
    let mut acc: Option<UPoly> = None;
    let trials = if matches!(sampler, Sampler::Full) { 3 } else { sampler.attempts() };
    let mut nonzero = 0;
    for _ in 0..trials {
        if nonzero == 3 {
            break;
        }
        let a = sampler.invertible(ctx, 3, rng);
        let h = linear_substitution(g, &[1, 2, 3], &a);
        let d: Vec<MultiPoly> = (1..4).map(|v| h.partial(v)).collect();
        let comb = |rng: &mut ChaCha8Rng| {
            let c: Vec<FieldElement> = (0..3).map(|_| sampler.element(ctx, rng)).collect();
            d[0].scale(c[0]).add(&d[1].scale(c[1])).add(&d[2].scale(c[2]))
        };
        let p = comb(rng);
        let q = comb(rng);
        let lin = MultiPoly::from_terms(
            ctx,
            h.vars().to_vec(),
            (1..4).map(|j| {
                let mut e = vec![0u16; 4];
                e[j] = 1;
                (e, sampler.element(ctx, rng))
            }),
        );
        let r = h.add(&lin.mul(&comb(rng)));
        let pc = coeff_list(&p, 3, 2);
        let qc = coeff_list(&q, 3, 2);
        let rc = coeff_list(&r, 3, 3);
        let vals: Vec<FieldElement> = nodes
            .iter()
            .map(|&t0| {
                let ev = |cs: &[MultiPoly], x1: FieldElement| -> Vec<FieldElement> {
                    cs.iter().map(|c| c.eval(&[t0, x1, FieldElement::ONE, FieldElement::ZERO])).collect()
                };
                let pq: Vec<FieldElement> = xs.iter().map(|&x| sylvester_resultant(ctx, &ev(&pc, x), &ev(&qc, x))).collect();
                let pr: Vec<FieldElement> = xs.iter().map(|&x| sylvester_resultant(ctx, &ev(&pc, x), &ev(&rc, x))).collect();
                let a = interpolate(ctx, &xs, &pq);
                let b = interpolate(ctx, &xs, &pr);
                sylvester_resultant(ctx, &padded(&a, 4), &padded(&b, 6))
            })
            .collect();
        let dp = interpolate(ctx, &nodes, &vals);
        if !dp.is_zero() {
            nonzero += 1;
            acc = Some(match acc {
                None => dp.monic(ctx),
                Some(x) => x.gcd(ctx, &dp),
            });
        }
    }
    acc
}

/// Pairs of conditions eliminated against each other.
const U_PAIRS: [(usize, usize); 3] = [(2, 3), (2, 4), (3, 4)];

/// Polynomial in the pencil parameter vanishing at the tangent planes at
/// the smooth points of the base line through which another line of the
/// surface may pass, two planes outside the chart of the elimination, and
/// the one point of the base line (chart coordinates) outside it.
struct MeetScan {
    point: Vec<FieldElement>,
    tpoly: UPoly,
    extra: Vec<Param>,
}

fn meeting_points(form: &MultiPoly, rng: &mut ChaCha8Rng, sampler: Sampler<'_>) -> Result<MeetScan, LineError> {
    let ctx = form.ctx();
    let uv: Vec<String> = ["u", "b", "c", "s"].iter().map(|s| s.to_string()).collect();
    let var = |i: usize| MultiPoly::var(ctx, uv.clone(), i);
    for _ in 0..sampler.attempts() {
        // x = M y with M preserving {x0 = x1 = 0}
        let a = sampler.invertible(ctx, 2, rng);
        let c = sampler.invertible(ctx, 2, rng);
        let mut m = Matrix::zero(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, a.get(i, j));
                m.set(i + 2, j + 2, c.get(i, j));
                m.set(i + 2, j, sampler.element(ctx, rng));
            }
        }
        let fy = change_coords(form, &m);
        let one = MultiPoly::constant(ctx, uv.clone(), FieldElement::ONE);
        let binds = [
            ("x0", var(3)),
            ("x1", var(1).mul(&var(3))),
            ("x2", var(0).add(&var(2).mul(&var(3)))),
            ("x3", one),
        ];
        let h = fy.substitute_simultaneous(&binds).trim_vars(&uv);
        let mut ds = h.coefficients_in(3);
        ds.resize(5, MultiPoly::zero(ctx, uv.clone()));
        let d1 = ds[1].coefficients_in(1);
        let alpha = d1[0].clone();
        let beta = d1.get(1).cloned().unwrap_or_else(|| MultiPoly::zero(ctx, uv.clone()));
        let nalpha = alpha.neg();
        let q: Vec<Vec<MultiPoly>> = (0..5)
            .map(|k| {
                if k < 2 {
                    return Vec::new();
                }
                let mut acc = MultiPoly::zero(ctx, uv.clone());
                for (j, cj) in ds[k].coefficients_in(1).iter().enumerate() {
                    acc = acc.add(&cj.mul(&nalpha.pow(j as u32)).mul(&beta.pow((k - j) as u32)));
                }
                coeff_list(&acc, 2, k)
            })
            .collect();
        // true c-degrees: in characteristic 3 the leading terms often vanish
        // identically, which would kill the formal resultant
        let trimmed: Vec<Vec<MultiPoly>> = q
            .iter()
            .map(|cs| {
                let mut v = cs.clone();
                while v.last().is_some_and(|c| c.is_zero()) {
                    v.pop();
                }
                v
            })
            .collect();
        let udeg = |cs: &[MultiPoly]| cs.iter().map(|c| c.degree_in(0) as usize).max().unwrap_or(0);
        let mut u = UPoly::zero();
        for &(i, j) in &U_PAIRS {
            let (qi, qj) = (&trimmed[i], &trimmed[j]);
            if qi.is_empty() || qj.is_empty() {
                continue;
            }
            let (di, dj) = (qi.len() - 1, qj.len() - 1);
            let (ci, cj) = if di == 0 && dj == 0 { (qi, qi) } else { (qi, qj) };
            let deg = if di == 0 && dj == 0 { udeg(qi) } else { dj * udeg(qi) + di * udeg(qj) };
            if deg + 1 > ctx.size() as usize {
                return Err(LineError::Elimination(format!("work field too small for {} nodes", deg + 1)));
            }
            let nodes: Vec<FieldElement> = (0..=deg).map(|n| ctx.element(n)).collect();
            let vals: Vec<FieldElement> = nodes
                .iter()
                .map(|&u0| {
                    let pt = [u0, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO];
                    let pi: Vec<FieldElement> = ci.iter().map(|x| x.eval(&pt)).collect();
                    if di == 0 && dj == 0 {
                        return pi[0];
                    }
                    let pj: Vec<FieldElement> = cj.iter().map(|x| x.eval(&pt)).collect();
                    sylvester_resultant(ctx, &pi, &pj)
                })
                .collect();
            let r = interpolate(ctx, &nodes, &vals);
            if !r.is_zero() {
                u = if u.is_zero() { r.monic(ctx) } else { u.gcd(ctx, &r) };
            }
        }
        if u.is_zero() {
            continue;
        }
        // drop the base points, where the tangent plane is undefined
        let ab = alpha.coefficients_in(0);
        let bb = beta.coefficients_in(0);
        let uni = |cs: &[MultiPoly]| UPoly::from_coeffs(cs.iter().map(|c| c.eval(&[FieldElement::ZERO; 4])).collect());
        let (au, bu) = (uni(&ab), uni(&bb));
        let base = au.gcd(ctx, &bu);
        if !base.is_zero() && base.deg() > 0 {
            loop {
                let g = u.gcd(ctx, &base);
                if g.deg() == 0 {
                    break;
                }
                u = u.div_exact(ctx, &g);
            }
        }
        // tangent planes y0 = tau*y1 at the meeting points: tau*alpha + beta = 0
        let n = u.deg();
        if n + 1 > ctx.size() as usize {
            return Err(LineError::Elimination("work field too small for the tangent-plane eliminant".into()));
        }
        let taus: Vec<FieldElement> = (0..=n).map(|i| ctx.element(i)).collect();
        let uc = padded(&u, n);
        let vals: Vec<FieldElement> = taus
            .iter()
            .map(|&tau| {
                let lin = au.scale(ctx, tau).add(ctx, &bu);
                sylvester_resultant(ctx, &uc, &padded(&lin, 3))
            })
            .collect();
        let tau_poly = interpolate(ctx, &taus, &vals);
        if tau_poly.is_zero() {
            return Err(LineError::Elimination("tangent-plane eliminant vanishes".into()));
        }
        // back to the chart parameter: x0 = t x1 with (x0, x1) = A (tau, 1)
        let (a00, a01, a10, a11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let num = UPoly::from_coeffs(vec![ctx.neg(a01), a11]);
        let den = UPoly::from_coeffs(vec![a00, ctx.neg(a10)]);
        let mut tpoly = UPoly::zero();
        for (k, &c) in tau_poly.coeffs().iter().enumerate() {
            let term = num.pow(ctx, k).mul(ctx, &den.pow(ctx, n - k)).scale(ctx, c);
            tpoly = tpoly.add(ctx, &term);
        }
        let lift = |y: [FieldElement; 4]| m.mul_vec(ctx, &y);
        let to_param = |y0: FieldElement, y1: FieldElement| param_of_point(ctx, &lift([y0, y1, FieldElement::ZERO, FieldElement::ZERO]));
        let extra = vec![to_param(FieldElement::ONE, FieldElement::ZERO), to_param(FieldElement::ZERO, FieldElement::ONE)];
        let point = lift([FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE, FieldElement::ZERO]);
        return Ok(MeetScan { point, tpoly, extra });
    }
    Err(LineError::Elimination("no admissible coordinates for the meeting-point eliminant".into()))
}

/// A singular or reducible fiber.
#[derive(Clone, Debug)]
pub struct FiberRecord {
    pub t: Param,
    /// The plane through the base line, in surface coordinates.
    pub plane: Plane,
    pub splitting: SplittingTag,
    /// Line components other than the base line, in surface coordinates,
    /// with multiplicity, the point where each meets the base line and
    /// whether that point is smooth on the surface.
    pub lines: Vec<(Line, usize, ProjPoint, bool)>,
    /// Multiplicity of the base line inside the residual cubic.
    pub base_in_residual: usize,
    pub local_valency: usize,
    /// Singular points or components of the residual cubic not defined over
    /// the work field and not accounted for.
    pub unresolved: usize,
    /// Component lines not defined over the work field, counted through
    /// their meeting points with the base line.
    pub conjugate_lines: usize,
    pub config_label: Option<&'static str>,
    /// The plane passes through a singular point of the surface off the
    /// base line.
    pub through_singular_point: bool,
    /// Number of conjugate fibers this record stands for.
    pub orbit_size: usize,
    /// Degree over GF(3) of the field in which `t` and `lines` live.
    pub work_degree: u32,
}

impl FiberRecord {
    pub fn is_three_fiber(&self) -> bool {
        self.splitting.line_count() == 3
    }

    pub fn is_one_fiber(&self) -> bool {
        matches!(self.splitting, SplittingTag::ConicPlusTransverseLine | SplittingTag::ConicPlusTangentLine)
    }
}

/// For a residual cubic made of lines, some not defined over the work
/// field: the number of those lines and how many of them meet the base line
/// at a singular point of the surface. The unresolved lines are distinct
/// conjugates, meeting the base line {y0 = 0} at the roots of the cubic
/// restricted to it once the resolved components are divided out; the
/// singular points of the surface on the base line are the roots of
/// `base_locus`.
fn conjugate_meets(
    cubic: &MultiPoly,
    base_in_residual: usize,
    components: &[(MultiPoly, usize)],
    base_locus: &BinaryForm,
) -> Option<(usize, usize)> {
    let ctx = cubic.ctx();
    let y0 = MultiPoly::var(ctx, cubic.vars().to_vec(), 0);
    let mut c = cubic.clone();
    for _ in 0..base_in_residual {
        c = c.div_exact(&y0)?;
    }
    let deg = 3 - base_in_residual;
    let restricted = MultiPoly::from_terms(
        ctx,
        c.vars().to_vec(),
        c.terms().filter(|(m, _)| m.0[0] == 0).map(|(m, &v)| (m.0.to_vec(), v)),
    );
    let mut r = BinaryForm::from_poly(&restricted, 1, 2, deg);
    if r.is_zero() {
        return None;
    }
    for (comp, mult) in components {
        if comp.total_degree() != Some(1) {
            continue;
        }
        let e = |i: usize| {
            let mut v = vec![0u16; 3];
            v[i] = 1;
            comp.coeff(&v)
        };
        if e(1).is_zero() && e(2).is_zero() {
            continue;
        }
        let lin = BinaryForm::new(1, vec![e(2), e(1)]);
        for _ in 0..*mult {
            if gcd_forms(ctx, &r, &lin).deg == 0 {
                return None;
            }
            r = div_forms(ctx, &r, &lin);
        }
    }
    let u = r.deg;
    let mut singular = 0;
    if base_locus.deg > 0 {
        loop {
            let g = gcd_forms(ctx, &r, base_locus);
            if g.deg == 0 {
                break;
            }
            singular += g.deg;
            r = div_forms(ctx, &r, &g);
        }
    }
    Some((u, singular))
}

fn analyze_fiber(
    x: &QuarticSurface,
    chart: &NormalizedLineChart,
    base: &Line,
    base_locus: &BinaryForm,
    t: Param,
) -> Result<(FiberRecord, Vec<FieldElement>), LineError> {
    let form = &chart.form;
    let ctx = form.ctx();
    let back = chart.map.inverse();
    let cubic = residual_cubic(form, t);
    let s = split_ternary_cubic(&cubic).map_err(SurfaceError::from)?;
    let mut lines = Vec::new();
    let mut base_in_residual = 0;
    let mut plane_lines: Vec<(Line, usize)> = Vec::new();
    for (comp, mult) in &s.components {
        if comp.total_degree() != Some(1) {
            continue;
        }
        let l: Vec<FieldElement> = (0..3)
            .map(|i| {
                let mut e = vec![0u16; 3];
                e[i] = 1;
                comp.coeff(&e)
            })
            .collect();
        if l[1].is_zero() && l[2].is_zero() {
            base_in_residual = *mult;
            continue;
        }
        let meet = vec![FieldElement::ZERO, FieldElement::ZERO, l[2], ctx.neg(l[1])];
        let smooth = is_smooth_in(form, &meet);
        let chart_line = plane_line(ctx, t, &l);
        let orig = back.apply_line(&chart_line);
        debug_assert!(x.contains_line(&orig));
        plane_lines.push((chart_line, *mult));
        lines.push((orig, *mult, ProjPoint::new(ctx, &back.apply_vec(&meet)).unwrap(), smooth));
    }
    lines.sort_by(|a, b| a.0.cmp(&b.0));
    let mut local_valency = lines.iter().filter(|l| l.3).count();
    let mut unresolved = s.unresolved;
    let mut conjugate_lines = 0;
    if s.tag.line_count() == 3 && s.unresolved > 0 {
        if let Some((u, singular)) = conjugate_meets(&cubic, base_in_residual, &s.components, base_locus) {
            conjugate_lines = u;
            local_valency += u - singular;
            unresolved = 0;
        }
    }
    let mut config_label = None;
    if s.tag.line_count() == 3 && s.unresolved == 0 {
        plane_lines.push((base.clone(), 1 + base_in_residual));
        config_label = crate::graph::classify_configuration(&plane_lines, |p| is_smooth_in(form, p.coords()));
    }
    let sample = plane_point(ctx, t, &[FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO]);
    let plane = plane_through(&back.apply_line(base), &back.apply_vec(&sample))
        .ok_or_else(|| LineError::Elimination("fiber plane is degenerate".into()))?;
    Ok((
        FiberRecord {
            t,
            plane,
            splitting: s.tag,
            lines,
            base_in_residual,
            local_valency,
            unresolved,
            conjugate_lines,
            config_label,
            through_singular_point: false,
            orbit_size: 1,
            work_degree: ctx.degree(),
        },
        sample,
    ))
}

#[derive(Clone, Debug)]
pub struct FiberScan {
    /// Singular fibers (elliptic case) or reducible fibers and fibers through
    /// singular points (quasi-elliptic case), sorted by parameter.
    pub fibers: Vec<FiberRecord>,
    pub fibration: Fibration,
    /// Degrees of factors of the singular-fiber eliminant without roots in
    /// the work field (elliptic case).
    pub singular_unresolved: Vec<usize>,
    /// Points of the base line carrying other lines that are not defined
    /// over the work field.
    pub meet_unresolved: usize,
    /// Sampled fibers outside the candidate set behave as the fibration
    /// class predicts (all singular when quasi-elliptic, all smooth
    /// otherwise).
    pub crosscheck: bool,
}

impl FiberScan {
    /// Every reducible fiber is found and counted. In the elliptic case
    /// the reducible fibers are among the roots of the singular-fiber
    /// eliminant; otherwise they are found through the meeting points.
    pub fn is_complete(&self) -> bool {
        let found = match self.fibration {
            Fibration::Elliptic => self.singular_unresolved.is_empty(),
            Fibration::QuasiElliptic => self.meet_unresolved == 0,
        };
        found && self.fibers.iter().all(|f| f.unresolved == 0)
    }
}

pub fn reducible_fibers(
    x: &QuarticSurface,
    chart: &NormalizedLineChart,
    pencil: &Pencil,
    seed: u64,
) -> Result<FiberScan, LineError> {
    let form = &chart.form;
    let ctx = form.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = base_line(ctx);
    let dpoly = singular_fiber_poly(&pencil.g, &mut rng);
    let fibration = if dpoly.is_none() { Fibration::QuasiElliptic } else { Fibration::Elliptic };
    let mut cands: Vec<Param> = vec![Param::Infinity];
    let mut singular_unresolved = Vec::new();
    if let Some(d) = &dpoly {
        let rs = roots(ctx, d);
        cands.extend(rs.roots.iter().map(|r| Param::Finite(r.0)));
        singular_unresolved = rs.residual.iter().map(|r| r.0).collect();
    }
    let scan = meeting_points(form, &mut rng, Sampler::Full)?;
    cands.extend(scan.extra.iter().copied());
    let rs = roots(ctx, &scan.tpoly);
    cands.extend(rs.roots.iter().map(|r| Param::Finite(r.0)));
    let mut meet_unresolved: usize = rs.residual.iter().map(|r| r.0).sum();
    let mut pts = vec![scan.point];
    let info = degree_and_separability(ctx, &pencil.alpha, &pencil.beta);
    let base_locus = gcd_forms(ctx, &pencil.alpha, &pencil.beta);
    meet_unresolved += info.base_unresolved.iter().sum::<usize>();
    pts.extend(info.base_points.iter().map(|(p, _)| point_on_base(*p)));
    for p in &pts {
        if !form.eval(p).is_zero() {
            continue;
        }
        let (ls, unres) = lines_through_point(form, p)?;
        meet_unresolved += unres;
        for m in ls {
            if m != base {
                cands.extend(param_of_line(ctx, &m));
            }
        }
    }
    let to_chart = &chart.map;
    let mut sing_params = Vec::new();
    for s in x.singular_points() {
        let q = to_chart.apply_vec(s.coords());
        if !(q[0].is_zero() && q[1].is_zero()) {
            sing_params.push(param_of_point(ctx, &q));
        }
    }
    cands.extend(sing_params.iter().copied());
    cands.sort();
    cands.dedup();
    let mut fibers = Vec::new();
    for &t in &cands {
        let (mut f, _) = analyze_fiber(x, chart, &base, &base_locus, t)?;
        f.through_singular_point = sing_params.contains(&t);
        let keep = match fibration {
            Fibration::Elliptic => f.splitting != SplittingTag::Smooth,
            Fibration::QuasiElliptic => f.splitting.is_reducible() || f.through_singular_point,
        };
        if keep {
            fibers.push(f);
        }
    }
    let mut sampled = 0;
    let mut agree = true;
    for i in 0..ctx.size() as usize {
        if sampled == 20 {
            break;
        }
        let t = Param::Finite(ctx.element(i));
        if cands.binary_search(&t).is_ok() {
            continue;
        }
        sampled += 1;
        let tag = split_ternary_cubic(&residual_cubic(form, t)).map_err(SurfaceError::from)?.tag;
        let singular = tag != SplittingTag::Smooth;
        agree &= singular == (fibration == Fibration::QuasiElliptic);
    }
    Ok(FiberScan {
        fibers,
        fibration,
        singular_unresolved,
        meet_unresolved,
        crosscheck: agree,
    })
}

// ---------------------------------------------------------------------------
// Galois orbits of fibers

/// Orbit of a pencil parameter under the Frobenius of the field F0 over
/// which the surface and the line are defined: infinity, or the monic
/// minimal polynomial over F0 (coefficients lowest first, in F0).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Orbit {
    Infinity,
    Poly(Vec<FieldElement>),
}

impl Orbit {
    fn size(&self) -> usize {
        match self {
            Orbit::Infinity => 1,
            Orbit::Poly(c) => c.len() - 1,
        }
    }
}

/// `emb` embeds F0 into the work field of `t`.
fn orbit_of(emb: &Embedding, t: Param) -> Orbit {
    let Param::Finite(a) = t else { return Orbit::Infinity };
    let w = emb.target();
    let f0 = emb.source().degree();
    let mut p = UPoly::linear_root(w, a);
    let mut c = w.frobenius(a, f0);
    while c != a {
        p = p.mul(w, &UPoly::linear_root(w, c));
        c = w.frobenius(c, f0);
    }
    Orbit::Poly(p.coeffs().iter().map(|&x| emb.preimage(x).expect("conjugate product lies over F0")).collect())
}

/// Irreducible factors over F0 of a polynomial with coefficients in F0.
fn orbits_of_poly(emb: &Embedding, f: &UPoly) -> Option<Vec<Orbit>> {
    let f0 = emb.source();
    let c: Option<Vec<FieldElement>> = f.coeffs().iter().map(|&x| emb.preimage(x)).collect();
    let g = UPoly::from_coeffs(c?);
    if g.deg() == 0 {
        return Some(Vec::new());
    }
    let (_, fs) = crate::poly::univariate::factor(f0, &g);
    Some(fs.into_iter().map(|(h, _)| Orbit::Poly(h.monic(f0).coeffs().to_vec())).collect())
}

/// A representative parameter of the orbit in the given work field.
fn orbit_root(emb: &Embedding, o: &Orbit) -> Option<Param> {
    match o {
        Orbit::Infinity => Some(Param::Infinity),
        Orbit::Poly(c) => {
            let w = emb.target();
            if w.degree() % (emb.source().degree() * (c.len() as u32 - 1)) != 0 {
                return None;
            }
            let p = UPoly::from_coeffs(c.iter().map(|&x| emb.map(x)).collect());
            roots(w, &p).roots.iter().map(|r| r.0).min_by_key(|&r| w.ordinal(r)).map(Param::Finite)
        }
    }
}

struct OrbitChart<'a> {
    x: &'a QuarticSurface,
    chart: NormalizedLineChart,
    pencil: Pencil,
    info: DegreeInfo,
    base_locus: BinaryForm,
    emb: Embedding,
}

/// Fibers grouped into Galois orbits, each analyzed in a work field
/// containing it.
struct OrbitScan {
    fibers: Vec<FiberRecord>,
    complete: bool,
}

fn orbit_scan(charts: &[(&QuarticSurface, Line)], fibration: Fibration, seed: u64) -> Result<OrbitScan, LineError> {
    let Some((x0, l0)) = charts.first() else {
        return Ok(OrbitScan { fibers: Vec::new(), complete: false });
    };
    let f0 = lcm(x0.base_field().degree(), l0.field_degree());
    let small = make_field(f0).map_err(|e| LineError::Elimination(e.to_string()))?;
    let mut ocs = Vec::new();
    for (x, l) in charts {
        if x.work_field().degree() % f0 != 0 {
            continue;
        }
        let chart = x.normalize_to_standard(l)?;
        let ctx = chart.form.ctx().clone();
        let pencil = pencil_forms(&chart);
        let info = degree_and_separability(&ctx, &pencil.alpha, &pencil.beta);
        let base_locus = gcd_forms(&ctx, &pencil.alpha, &pencil.beta);
        let emb = Embedding::new(&small, &ctx).map_err(|e| LineError::Elimination(e.to_string()))?;
        ocs.push(OrbitChart { x, chart, pencil, info, base_locus, emb });
    }
    let Some(primary) = ocs.first() else {
        return Ok(OrbitScan { fibers: Vec::new(), complete: false });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_6269_7473);
    // Every reducible fiber contains a line other than the base line (the
    // residual cubic restricts to t*alpha + beta on it, never zero for
    // degree >= 1), meeting it at a smooth point (a root of the
    // tangent-plane eliminant) or at a singular point. Those orbits are
    // required; the other singular fibers are listed when representable.
    let mut orbits: BTreeMap<Orbit, bool> = BTreeMap::new();
    let mut add = |o: Orbit, required: bool| *orbits.entry(o).or_insert(false) |= required;
    add(Orbit::Infinity, true);
    let mut blocked = false;
    let mut sing = Vec::new();
    for oc in &ocs {
        let ctx = oc.chart.form.ctx();
        for p in oc.x.singular_points() {
            let q = oc.chart.map.apply_vec(p.coords());
            if !(q[0].is_zero() && q[1].is_zero()) {
                sing.push(orbit_of(&oc.emb, param_of_point(ctx, &q)));
            }
        }
    }
    for o in &sing {
        add(o.clone(), false);
    }
    if fibration == Fibration::Elliptic {
        if let Some(d) = singular_fiber_poly_with(&primary.pencil.g, &mut rng, Sampler::Sub(&primary.emb)) {
            for o in orbits_of_poly(&primary.emb, &d).unwrap_or_default() {
                add(o, false);
            }
        }
    }
    match meeting_points(&primary.chart.form, &mut rng, Sampler::Sub(&primary.emb)) {
        Ok(scan) => {
            match orbits_of_poly(&primary.emb, &scan.tpoly) {
                Some(os) => os.into_iter().for_each(|o| add(o, true)),
                None => blocked = true,
            }
            for &t in &scan.extra {
                add(orbit_of(&primary.emb, t), true);
            }
            let pt: Option<Vec<FieldElement>> = scan.point.iter().map(|&c| primary.emb.preimage(c)).collect();
            // lines through the extra point and the singular points on the
            // base line, collected over all charts
            let mut through: BTreeMap<(u32, Vec<u16>), (usize, BTreeSet<(u32, Vec<u16>)>)> = BTreeMap::new();
            let mut done = pt.is_some();
            if let Some(pt) = pt {
                for oc in &ocs {
                    if !oc.info.base_unresolved.is_empty() {
                        continue;
                    }
                    let ctx = oc.chart.form.ctx();
                    let base = base_line(ctx);
                    let mut pts = vec![pt.iter().map(|&c| oc.emb.map(c)).collect::<Vec<_>>()];
                    pts.extend(oc.info.base_points.iter().map(|(p, _)| point_on_base(*p)));
                    for p in &pts {
                        if !oc.chart.form.eval(p).is_zero() {
                            continue;
                        }
                        let (ls, unres) = lines_through_point(&oc.chart.form, p)?;
                        let Some(key) = point_key(ctx, p) else {
                            done = false;
                            continue;
                        };
                        let entry = through.entry(key).or_default();
                        entry.0 = entry.0.max(ls.len() + unres);
                        for m in &ls {
                            if let Some(k) = line_key(m) {
                                entry.1.insert(k);
                            }
                            if *m != base {
                                if let Some(t) = param_of_line(ctx, m) {
                                    add(orbit_of(&oc.emb, t), true);
                                }
                            }
                        }
                    }
                }
            }
            done &= !through.is_empty() && through.values().all(|(n, found)| found.len() >= *n);
            blocked |= !done;
        }
        Err(_) => blocked = true,
    }
    let mut fibers = Vec::new();
    let mut unresolved = false;
    for (o, required) in &orbits {
        let mut settled = false;
        for oc in &ocs {
            let Some(t) = orbit_root(&oc.emb, o) else { continue };
            let base = base_line(oc.chart.form.ctx());
            let (mut f, _) = analyze_fiber(oc.x, &oc.chart, &base, &oc.base_locus, t)?;
            if f.unresolved > 0 {
                continue;
            }
            f.through_singular_point = sing.contains(o);
            f.orbit_size = o.size();
            let keep = match fibration {
                Fibration::Elliptic => f.splitting != SplittingTag::Smooth,
                Fibration::QuasiElliptic => f.splitting.is_reducible() || f.through_singular_point,
            };
            if keep {
                fibers.push(f);
            }
            settled = true;
            break;
        }
        unresolved |= *required && !settled;
    }
    Ok(OrbitScan {
        fibers,
        complete: !blocked && !unresolved,
    })
}

/// A point in its field of definition.
fn point_key(ctx: &FieldCtx, p: &[FieldElement]) -> Option<(u32, Vec<u16>)> {
    let q = ProjPoint::new(ctx, p).ok()?;
    let d = q.field_degree();
    let small = make_field(d).ok()?;
    let emb = Embedding::new(&small, ctx).ok()?;
    let v: Option<Vec<u16>> = q.coords().iter().map(|&c| emb.preimage(c).map(|x| x.packed())).collect();
    Some((d, v?))
}

/// A line in its field of definition.
fn line_key(m: &Line) -> Option<(u32, Vec<u16>)> {
    let d = m.field_degree();
    let down = m.transfer(&make_field(d).ok()?)?;
    Some((d, down.rows().iter().flatten().map(|c| c.packed()).collect()))
}

fn lcm(a: u32, b: u32) -> u32 {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

// ---------------------------------------------------------------------------
// cuspidal lines

#[derive(Clone, Debug)]
pub struct CuspidalData {
    /// Coefficients of phi(s), from s^8 down to s^0, in the normalized chart.
    pub phi: Vec<FieldElement>,
    pub cuspidal: bool,
    /// The normalized form has the shape
    /// x0 x3^3 - x1 x2^3 + x2 q3 + x3 q3' + q4.
    pub family_c: bool,
    /// The normalized form.
    pub normalized: MultiPoly,
}

/// Exponents (i0, i1, i2, i3) read for the coefficients of phi.
pub const PHI_EXPONENTS: [[u16; 4]; 9] = [
    [2, 0, 2, 0],
    [2, 0, 1, 1],
    [2, 0, 0, 2],
    [1, 1, 2, 0],
    [1, 1, 1, 1],
    [1, 1, 0, 2],
    [0, 2, 2, 0],
    [0, 2, 1, 1],
    [0, 2, 0, 2],
];

/// None for lines that are not inseparable of degree 3 (these are never
/// cuspidal).
pub fn cuspidal_test(chart: &NormalizedLineChart, pencil: &Pencil) -> Result<Option<CuspidalData>, LineError> {
    let ctx = chart.form.ctx();
    let info = degree_and_separability(ctx, &pencil.alpha, &pencil.beta);
    if info.degree != 3 || info.separable != Some(false) {
        return Ok(None);
    }
    let (a, b) = (&pencil.alpha, &pencil.beta);
    if [1, 2].iter().any(|&i| !a.c[i].is_zero() || !b.c[i].is_zero()) {
        return Err(LineError::NormalizationImpossible("pencil forms are not cubes".into()));
    }
    let cbrt = |v: FieldElement| ctx.frobenius(v, ctx.degree() - 1);
    let z = FieldElement::ZERO;
    let o = FieldElement::ONE;
    let n = Matrix::from_rows(&[
        vec![o, z, z, z],
        vec![z, ctx.neg(o), z, z],
        vec![z, z, cbrt(b.c[3]), cbrt(b.c[0])],
        vec![z, z, cbrt(a.c[3]), cbrt(a.c[0])],
    ]);
    let ninv = n
        .inverse(ctx)
        .ok_or_else(|| LineError::NormalizationImpossible("intersection points coincide".into()))?;
    let f = change_coords(&chart.form, &ninv);
    if f.coeff(&[1, 0, 0, 3]) != o || f.coeff(&[0, 1, 3, 0]) != ctx.neg(o) {
        return Err(LineError::NormalizationImpossible("a1003 or a0130 vanishes".into()));
    }
    let phi: Vec<FieldElement> = PHI_EXPONENTS.iter().map(|e| f.coeff(e)).collect();
    let cuspidal = phi.iter().all(|c| c.is_zero());
    let family_c = f.terms().all(|(m, _)| {
        let e = &m.0;
        e[0] + e[1] >= 3 || e[..] == [1, 0, 0, 3] || e[..] == [0, 1, 3, 0]
    });
    Ok(Some(CuspidalData { phi, cuspidal, family_c, normalized: f }))
}

// ---------------------------------------------------------------------------
// profile

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valency {
    /// Lines of a known list meeting the line at smooth points.
    pub geometric: Option<usize>,
    pub geometric_complete: bool,
    /// Sum of local valencies over the fibers.
    pub fiberwise: usize,
    pub fiberwise_complete: bool,
}

impl Valency {
    pub fn is_complete(&self) -> bool {
        self.geometric_complete || self.fiberwise_complete
    }

    pub fn value(&self) -> usize {
        match self.geometric {
            Some(v) if self.geometric_complete => v,
            _ => self.fiberwise,
        }
    }
}

/// A list of lines on the surface and whether it is known to be complete.
#[derive(Clone, Copy, Debug)]
pub struct KnownLines<'a> {
    pub lines: &'a [Line],
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct LineProfile {
    pub line: Line,
    /// Degree over GF(3) of the field the profile was computed in.
    pub work_degree: u32,
    pub degree: usize,
    /// Singular points of the surface on the line, over the closure.
    pub singularity: usize,
    pub singular_points: Vec<ProjPoint>,
    pub base_multiplicity: usize,
    pub separable: Option<bool>,
    pub kind: Option<Kind>,
    /// Ramified points in surface coordinates with (index, length).
    pub ramification: Vec<(ProjPoint, usize, usize)>,
    pub ramification_unresolved: usize,
    pub ramification_symbol: Option<String>,
    pub fibration: Fibration,
    pub fibration_crosscheck: bool,
    pub cuspidal: bool,
    pub family_c: bool,
    pub phi: Option<Vec<FieldElement>>,
    pub pq: (usize, usize),
    pub fibers: Vec<FiberRecord>,
    pub singular_fiber_unresolved: Vec<usize>,
    pub meet_unresolved: usize,
    pub valency: Valency,
}

pub fn line_profile(
    x: &QuarticSurface,
    l: &Line,
    known: Option<KnownLines<'_>>,
    seed: u64,
) -> Result<LineProfile, LineError> {
    let chart = x.normalize_to_standard(l)?;
    let ctx = chart.form.ctx().clone();
    let back: ProjMap = chart.map.inverse();
    let to_orig = |p: &[FieldElement]| ProjPoint::new(&ctx, &back.apply_vec(p)).unwrap();
    let pencil = pencil_forms(&chart);
    let info = degree_and_separability(&ctx, &pencil.alpha, &pencil.beta);
    let singular_points: Vec<ProjPoint> = info.base_points.iter().map(|(p, _)| to_orig(&point_on_base(*p))).collect();
    let kind = if info.degree > 0 { Some(line_resultant(&pencil)?.kind) } else { None };
    let (ramification, ramification_unresolved, ramification_symbol) = if info.separable == Some(true) {
        let (pts, unres) = ramification_profile(&ctx, &info)?;
        let sym = (unres == 0).then(|| ramification_symbol(&pts));
        let pts = pts.iter().map(|r| (to_orig(&point_on_base(r.point)), r.index, r.length)).collect();
        (pts, unres, sym)
    } else {
        (Vec::new(), 0, None)
    };
    let scan = reducible_fibers(x, &chart, &pencil, seed)?;
    let cusp = if scan.fibration == Fibration::QuasiElliptic { cuspidal_test(&chart, &pencil)? } else { None };
    let p = scan.fibers.iter().filter(|f| f.is_three_fiber()).count();
    let q = scan.fibers.iter().filter(|f| f.is_one_fiber()).count();
    let fiberwise = scan.fibers.iter().map(|f| f.local_valency).sum();
    let (geometric, geometric_complete) = match known {
        None => (None, false),
        Some(k) => {
            let mut v = 0;
            for m in k.lines.iter().filter(|m| *m != l) {
                if let Some(pt) = lines_meet(l, m).map_err(|e| SurfaceError::Unsupported(e.to_string()))? {
                    if x.is_smooth_point(&pt)? {
                        v += 1;
                    }
                }
            }
            (Some(v), k.complete)
        }
    };
    Ok(LineProfile {
        line: l.clone(),
        work_degree: ctx.degree(),
        degree: info.degree,
        singularity: info.singularity,
        singular_points,
        base_multiplicity: 3 - info.degree,
        separable: info.separable,
        kind,
        ramification,
        ramification_unresolved,
        ramification_symbol,
        fibration: scan.fibration,
        fibration_crosscheck: scan.crosscheck,
        cuspidal: cusp.as_ref().is_some_and(|c| c.cuspidal),
        family_c: cusp.as_ref().is_some_and(|c| c.family_c),
        phi: cusp.map(|c| c.phi),
        pq: (p, q),
        valency: Valency {
            geometric,
            geometric_complete,
            fiberwise,
            fiberwise_complete: scan.is_complete(),
        },
        fibers: scan.fibers,
        singular_fiber_unresolved: scan.singular_unresolved,
        meet_unresolved: scan.meet_unresolved,
    })
}

/// Surfaces over the work fields tried by [`ProfileContext::profile`], each
/// with the known lines it can represent.
pub struct ProfileContext {
    charts: Vec<(QuarticSurface, Vec<Line>, bool)>,
}

impl ProfileContext {
    /// Work fields: the surface's own first, then the other extensions of
    /// the base field of degree at most `max_ext` large enough for the
    /// eliminants, largest first.
    pub fn new(x: &QuarticSurface, known: Option<KnownLines<'_>>, max_ext: u32) -> Result<ProfileContext, LineError> {
        let base = x.base_field().degree();
        let own = x.work_field().degree();
        let mut degrees = vec![own];
        for m in (base..=max_ext.min(crate::gf3::MAX_DEGREE)).rev() {
            if m % base == 0 && m != own && 3usize.pow(m) > D_DEG {
                degrees.push(m);
            }
        }
        let charts = degrees
            .into_iter()
            .map(|m| {
                let y = x.rebased(m)?;
                let (lines, complete) = match known {
                    None => (Vec::new(), false),
                    Some(k) => {
                        let moved: Vec<Line> = k.lines.iter().filter_map(|l| l.transfer(y.work_field())).collect();
                        let all = moved.len() == k.lines.len();
                        (moved, k.complete && all)
                    }
                };
                Ok((y, lines, complete))
            })
            .collect::<Result<Vec<_>, SurfaceError>>()?;
        Ok(ProfileContext { charts })
    }

    /// Profile over the first work field in which every fiber through the
    /// line is resolved; otherwise the profile over the first field that
    /// succeeded.
    pub fn profile(&self, l: &Line, with_known: bool, seed: u64) -> Result<LineProfile, LineError> {
        let mut fallback: Option<Result<LineProfile, LineError>> = None;
        let mut moved = Vec::new();
        for (y, lines, complete) in &self.charts {
            let Some(m) = l.transfer(y.work_field()) else { continue };
            moved.push((y, m.clone()));
            let known = with_known.then_some(KnownLines { lines, complete: *complete });
            let r = line_profile(y, &m, known, seed);
            if matches!(&r, Ok(p) if p.valency.fiberwise_complete) {
                return r;
            }
            if !matches!(fallback, Some(Ok(_))) {
                fallback = Some(r);
            }
        }
        let mut p = match fallback {
            Some(Ok(p)) => p,
            Some(Err(e)) => return Err(e),
            None => return Err(LineError::Elimination("no work field contains the line".into())),
        };
        let scan = orbit_scan(&moved, p.fibration, seed)?;
        if scan.complete {
            let weight = |pred: &dyn Fn(&FiberRecord) -> bool| scan.fibers.iter().filter(|f| pred(f)).map(|f| f.orbit_size).sum::<usize>();
            p.pq = (weight(&|f| f.is_three_fiber()), weight(&|f| f.is_one_fiber()));
            p.valency.fiberwise = scan.fibers.iter().map(|f| f.local_valency * f.orbit_size).sum();
            p.valency.fiberwise_complete = true;
            p.fibers = scan.fibers;
            p.singular_fiber_unresolved.clear();
            p.meet_unresolved = 0;
        }
        Ok(p)
    }
}

// ---------------------------------------------------------------------------
// bound audit

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub rule: String,
    pub source: &'static str,
    pub value: usize,
    pub bound: usize,
    pub ok: bool,
}

fn check(rule: impl Into<String>, source: &'static str, value: usize, bound: usize) -> BoundCheck {
    BoundCheck { rule: rule.into(), source, value, bound, ok: value <= bound }
}

/// Valency bounds applicable to the profile.
pub fn audit_bounds(p: &LineProfile) -> Result<Vec<BoundCheck>, LineError> {
    if !p.valency.is_complete() {
        return Err(LineError::IncompleteProfile("valency not complete".into()));
    }
    let v = p.valency.value();
    let d = p.degree;
    let (pp, qq) = p.pq;
    let mut out = Vec::new();
    // for degree 0 one fiber contains the line again and the bound is the
    // degree-0 row below
    if p.valency.fiberwise_complete && d > 0 {
        out.push(check("v <= d*p + q", "§2", v, d * pp + qq));
    }
    if p.valency.geometric_complete && p.valency.fiberwise_complete {
        let g = p.valency.geometric.unwrap_or(0);
        out.push(BoundCheck {
            rule: "geometric valency = sum of local valencies".into(),
            source: "§2",
            value: g,
            bound: p.valency.fiberwise,
            ok: g == p.valency.fiberwise,
        });
    }
    if d == 0 {
        out.push(check("degree 0: v <= 2", "Table 1", v, 2));
        return Ok(out);
    }
    let qe = p.fibration == Fibration::QuasiElliptic;
    if p.kind == Some(Kind::First) {
        out.push(check("first kind: v <= 3 + 5d", "Prop. 2.13", v, 3 + 5 * d));
    }
    if p.separable == Some(true) && !qe {
        let bound = match (p.kind, d, p.singularity) {
            (Some(Kind::First), 3, _) => 18,
            (Some(Kind::First), 2, _) => 13,
            (Some(Kind::First), _, _) => 8,
            (_, 3, _) => 21,
            (_, 2, _) => 14,
            (_, _, 2) => 9,
            _ => 11,
        };
        out.push(check(format!("separable elliptic, {:?} kind, degree {d}", p.kind.unwrap()).to_lowercase(), "Table 1", v, bound));
        if d == 3 && p.kind == Some(Kind::Second) {
            if let Some(sym) = &p.ramification_symbol {
                let b = if sym == "2_1^4" { 12 } else { 21 };
                out.push(check(format!("second kind, ramification {sym}"), "§3", v, b));
            }
        }
    }
    if p.separable == Some(true) && d == 3 {
        if let Some(sym) = &p.ramification_symbol {
            let ok = ["2_1^4", "2_1 3_3", "3_4"].contains(&sym.as_str());
            out.push(BoundCheck {
                rule: format!("degree-3 ramification {sym} is 2_1^4, 2_1 3_3 or 3_4"),
                source: "§3",
                value: usize::from(!ok),
                bound: 0,
                ok,
            });
        }
    }
    if qe {
        let bound = match d {
            3 if p.cuspidal => 30,
            3 => 21,
            2 => 14,
            _ => 10,
        };
        out.push(check(format!("quasi-elliptic, degree {d}{}", if p.cuspidal { ", cuspidal" } else { "" }), "Table 2", v, bound));
        out.push(check("quasi-elliptic: at most 10 reducible fibers", "§4", pp + qq, 10));
    }
    if p.separable == Some(false) && !p.cuspidal {
        out.push(check("inseparable, not cuspidal: v <= 12", "§4", v, 12));
    }
    if p.cuspidal {
        let bad = p
            .fibers
            .iter()
            .filter(|f| f.splitting.is_reducible())
            .filter(|f| !matches!(f.splitting, SplittingTag::ThreeLinesConcurrent | SplittingTag::TripleLine))
            .count();
        out.push(check("cuspidal: reducible fibers are concurrent triples or triple lines", "§4", bad, 0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use crate::poly::parse::parse_poly;

    const X: [&str; 4] = ["x0", "x1", "x2", "x3"];

    fn surface(k: u32, s: &str) -> QuarticSurface {
        let f = make_field(k).unwrap();
        QuarticSurface::new(&parse_poly(&f, s, &X).unwrap()).unwrap()
    }

    fn std_line(x: &QuarticSurface) -> Line {
        base_line(x.work_field())
    }

    fn bf(ctx: &FieldCtx, c: &[i64]) -> BinaryForm {
        BinaryForm::new(3, c.iter().map(|&v| ctx.from_int(v)).collect())
    }

    #[test]
    fn degree_examples() {
        let f = make_field(1).unwrap();
        // alpha = x3^2 (x2 + x3), beta = x2^3
        let i = degree_and_separability(&f, &bf(&f, &[1, 1, 0, 0]), &bf(&f, &[0, 0, 0, 1]));
        assert_eq!((i.degree, i.separable), (3, Some(true)));
        let i = degree_and_separability(&f, &bf(&f, &[1, 0, 0, 0]), &bf(&f, &[0, 0, 0, -1]));
        assert_eq!((i.degree, i.separable), (3, Some(false)));
        let i = degree_and_separability(&f, &bf(&f, &[1, 1, 0, 0]), &bf(&f, &[1, 1, 0, 0]));
        assert_eq!((i.degree, i.separable), (0, None));
        // common factor x3: degree 2 with one singular point
        let i = degree_and_separability(&f, &bf(&f, &[0, 1, 0, 0]), &bf(&f, &[0, 0, 0, 1]));
        assert_eq!(i.degree, 2);
        assert_eq!(i.singularity, 1);
    }

    #[test]
    fn pencil_of_first_valency_21_example() {
        let x = surface(
            1,
            "x0^4 + x0^2*x1*x2 - x1^3*x2 + x0*x1*x2^2 + x1*x2^3 + x0^2*x1*x3 + x1^2*x3^2 + x0*x2*x3^2 + x0*x3^3",
        );
        let chart = x.normalize_to_standard(&std_line(&x)).unwrap();
        let p = pencil_forms(&chart);
        let ctx = x.work_field();
        let info = degree_and_separability(ctx, &p.alpha, &p.beta);
        assert_eq!(info.degree, 3);
        assert_eq!(info.separable, Some(true));
        let (pts, unres) = ramification_profile(ctx, &info).unwrap();
        assert_eq!(unres, 0);
        assert_eq!(ramification_symbol(&pts), "2_1 3_3");
        assert_eq!(line_resultant(&p).unwrap().kind, Kind::Second);
    }

    #[test]
    fn residual_cubic_matches_pencil() {
        let x = surface(2, "x0^4 + x1^4 + x2^4 + x3^4");
        let l = x.lines_bruteforce(2).unwrap()[0].clone();
        let chart = x.normalize_to_standard(&l).unwrap();
        let p = pencil_forms(&chart);
        let ctx = x.work_field();
        let t = ctx.element(5);
        let c = residual_cubic(&chart.form, Param::Finite(t));
        for i in 0..10 {
            let y = [ctx.element(i), ctx.element(i + 3), ctx.element(2 * i + 1)];
            assert_eq!(c.eval(&y), p.g.eval(&[t, y[0], y[1], y[2]]));
        }
    }

    #[test]
    fn fermat_line_profile() {
        let x = surface(2, "x0^4 + x1^4 + x2^4 + x3^4");
        let lines = x.lines_bruteforce(2).unwrap();
        let prof = line_profile(&x, &lines[7], Some(KnownLines { lines: &lines, complete: true }), 0).unwrap();
        assert_eq!(prof.degree, 3);
        assert_eq!(prof.separable, Some(false));
        assert_eq!(prof.fibration, Fibration::QuasiElliptic);
        assert!(prof.fibration_crosscheck);
        assert!(prof.cuspidal && prof.family_c);
        assert_eq!(prof.pq, (10, 0));
        assert!(prof.fibers.iter().all(|f| f.splitting == SplittingTag::ThreeLinesConcurrent));
        assert_eq!(prof.valency.geometric, Some(30));
        assert_eq!(prof.valency.fiberwise, 30);
        assert!(prof.valency.fiberwise_complete);
        assert!(prof.fibers.iter().all(|f| f.config_label == Some("C0")));
        let audit = audit_bounds(&prof).unwrap();
        assert!(audit.iter().all(|c| c.ok), "{audit:?}");
    }

    #[test]
    fn cuspidal_family_member() {
        let x = surface(1, "x0*x3^3 - x1*x2^3 + x2*x0^3 + x3*x1^3 + x0^3*x1");
        let chart = x.normalize_to_standard(&std_line(&x)).unwrap();
        let p = pencil_forms(&chart);
        let c = cuspidal_test(&chart, &p).unwrap().unwrap();
        assert!(c.cuspidal && c.family_c);
        // perturbation by x0^2 x1 x2 gives phi = s^8 a2110-type single term
        let y = surface(1, "x0*x3^3 - x1*x2^3 + x2*x0^3 + x3*x1^3 + x0^3*x1 + x0^2*x2^2");
        let chart = y.normalize_to_standard(&std_line(&y)).unwrap();
        let c = cuspidal_test(&chart, &pencil_forms(&chart)).unwrap().unwrap();
        assert!(!c.cuspidal);
        assert_eq!(c.phi.iter().filter(|v| !v.is_zero()).count(), 1);
        assert!(!c.phi[0].is_zero());
    }

    #[test]
    fn separable_line_is_never_cuspidal() {
        let x = surface(
            1,
            "x0^4 + x0^2*x1*x2 - x1^3*x2 + x0*x1*x2^2 + x1*x2^3 + x0^2*x1*x3 + x1^2*x3^2 + x0*x2*x3^2 + x0*x3^3",
        );
        let chart = x.normalize_to_standard(&std_line(&x)).unwrap();
        assert!(cuspidal_test(&chart, &pencil_forms(&chart)).unwrap().is_none());
    }

    #[test]
    fn symbols() {
        let r = |n, m| RamPoint { point: (FieldElement::ZERO, FieldElement::ONE), index: n, length: m };
        assert_eq!(ramification_symbol(&[r(2, 1), r(2, 1), r(2, 1), r(2, 1)]), "2_1^4");
        assert_eq!(ramification_symbol(&[r(3, 3), r(2, 1)]), "2_1 3_3");
        assert_eq!(ramification_symbol(&[r(3, 4)]), "3_4");
    }
}
