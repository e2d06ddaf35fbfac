//! Points, lines and planes of P^3, projective maps, and the stream of all
//! lines over a finite field.
//!
//! A line is stored by a 2x4 basis in reduced row-echelon form; this form
//! is unique, so equality and ordering are exact.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::gf3::{Embedding, FieldCtx, FieldElement};
use crate::linalg::Matrix;
use crate::poly::multi::MultiPoly;
use crate::poly::parse::{parse_element, parse_poly};
use crate::solve::change_coords;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("the spanning points coincide")]
    DegenerateSpan,
    #[error("the two lines are equal")]
    SameLine,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("zero vector is not a projective point")]
    ZeroVector,
    #[error("objects live over incompatible fields")]
    FieldMismatch,
    #[error("bad literal `{0}`: {1}")]
    Literal(String, String),
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Degree over GF(3) of the smallest field containing all entries.
pub fn field_degree_of(ctx: &FieldCtx, xs: &[FieldElement]) -> u32 {
    xs.iter().fold(1, |acc, &x| lcm(acc, ctx.element_degree(x)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    ctx: FieldCtx,
    coords: [FieldElement; 4],
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, v: &[FieldElement]) -> Result<ProjPoint, ProjError> {
        assert_eq!(v.len(), 4);
        let lead = *v.iter().find(|c| !c.is_zero()).ok_or(ProjError::ZeroVector)?;
        let inv = ctx.inv(lead).unwrap();
        let mut coords = [FieldElement::ZERO; 4];
        for i in 0..4 {
            coords[i] = ctx.mul(v[i], inv);
        }
        Ok(ProjPoint { ctx: ctx.clone(), coords })
    }

    pub fn from_ints(ctx: &FieldCtx, v: [i64; 4]) -> Result<ProjPoint, ProjError> {
        let c: Vec<FieldElement> = v.iter().map(|&x| ctx.from_int(x)).collect();
        ProjPoint::new(ctx, &c)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coords(&self) -> &[FieldElement; 4] {
        &self.coords
    }

    pub fn field_degree(&self) -> u32 {
        field_degree_of(&self.ctx, &self.coords)
    }

    pub fn embed(&self, emb: &Embedding) -> ProjPoint {
        assert!(*emb.source() == self.ctx);
        let v: Vec<FieldElement> = self.coords.iter().map(|&c| emb.map(c)).collect();
        ProjPoint::new(emb.target(), &v).unwrap()
    }

    pub fn frobenius(&self) -> ProjPoint {
        let v: Vec<FieldElement> = self.coords.iter().map(|&c| self.ctx.frobenius(c, 1)).collect();
        ProjPoint::new(&self.ctx, &v).unwrap()
    }

    fn key(&self) -> [usize; 4] {
        let mut k = [0; 4];
        for i in 0..4 {
            k[i] = self.ctx.ordinal(self.coords[i]);
        }
        k
    }

    pub fn to_literal(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(|&c| self.ctx.format(c)).collect();
        format!("[{}]", parts.join(":"))
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// A plane, stored by its normalized linear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plane {
    ctx: FieldCtx,
    coeffs: [FieldElement; 4],
}

impl Plane {
    pub fn new(ctx: &FieldCtx, v: &[FieldElement]) -> Result<Plane, ProjError> {
        let p = ProjPoint::new(ctx, v)?;
        Ok(Plane { ctx: ctx.clone(), coeffs: p.coords })
    }

    pub fn coeffs(&self) -> &[FieldElement; 4] {
        &self.coeffs
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn contains_point(&self, p: &[FieldElement]) -> bool {
        dot(&self.ctx, &self.coeffs, p).is_zero()
    }

    pub fn contains_line(&self, l: &Line) -> bool {
        self.contains_point(&l.rows[0]) && self.contains_point(&l.rows[1])
    }

    pub fn form(&self, vars: &[String]) -> MultiPoly {
        MultiPoly::from_terms(
            &self.ctx,
            vars.to_vec(),
            (0..4).map(|i| {
                let mut e = vec![0u16; 4];
                e[i] = 1;
                (e, self.coeffs[i])
            }),
        )
    }

    /// Equation literal such as `x0 - x1 + (g)*x3 = 0`.
    pub fn to_literal(&self) -> String {
        let minus_one = self.ctx.neg(FieldElement::ONE);
        let mut out = String::new();
        for i in (0..4).filter(|&i| !self.coeffs[i].is_zero()) {
            let c = self.coeffs[i];
            let (sign, body) = if c == FieldElement::ONE {
                ("+", format!("x{i}"))
            } else if c == minus_one {
                ("-", format!("x{i}"))
            } else {
                ("+", format!("({})*x{i}", self.ctx.format(c)))
            };
            if out.is_empty() {
                out = if sign == "-" { format!("-{body}") } else { body };
            } else {
                out.push_str(&format!(" {sign} {body}"));
            }
        }
        out.push_str(" = 0");
        out
    }

    fn key(&self) -> [usize; 4] {
        let mut k = [0; 4];
        for i in 0..4 {
            k[i] = self.ctx.ordinal(self.coeffs[i]);
        }
        k
    }
}

impl Ord for Plane {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Plane {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn dot(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter().zip(b).fold(FieldElement::ZERO, |acc, (&x, &y)| ctx.add(acc, ctx.mul(x, y)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    ctx: FieldCtx,
    rows: [[FieldElement; 4]; 2],
}

impl Line {
    /// Canonical line spanned by two vectors (rows of any rank-2 matrix).
    pub fn from_rows(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Result<Line, ProjError> {
        let mut m = Matrix::from_rows(&[a.to_vec(), b.to_vec()]);
        let piv = m.rref(ctx);
        if piv.len() < 2 {
            return Err(ProjError::DegenerateSpan);
        }
        let mut rows = [[FieldElement::ZERO; 4]; 2];
        for i in 0..2 {
            for j in 0..4 {
                rows[i][j] = m.get(i, j);
            }
        }
        Ok(Line { ctx: ctx.clone(), rows })
    }

    /// The line cut out by two independent linear forms (coefficient vectors).
    pub fn from_equations(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Result<Line, ProjError> {
        let m = Matrix::from_rows(&[a.to_vec(), b.to_vec()]);
        let k = m.kernel(ctx);
        if k.len() != 2 {
            return Err(ProjError::DegenerateSpan);
        }
        Line::from_rows(ctx, &k[0], &k[1])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn rows(&self) -> &[[FieldElement; 4]; 2] {
        &self.rows
    }

    pub fn pivots(&self) -> (usize, usize) {
        let p = |r: &[FieldElement; 4]| r.iter().position(|c| !c.is_zero()).unwrap();
        (p(&self.rows[0]), p(&self.rows[1]))
    }

    /// s * row0 + u * row1.
    pub fn point_at(&self, s: FieldElement, u: FieldElement) -> Vec<FieldElement> {
        let c = &self.ctx;
        (0..4)
            .map(|j| c.add(c.mul(s, self.rows[0][j]), c.mul(u, self.rows[1][j])))
            .collect()
    }

    /// Two linear forms cutting out the line (a basis of the annihilator).
    pub fn equations(&self) -> Vec<Vec<FieldElement>> {
        let m = Matrix::from_rows(&[self.rows[0].to_vec(), self.rows[1].to_vec()]);
        let mut k = Matrix::from_rows(&m.kernel(&self.ctx));
        k.rref(&self.ctx);
        (0..2).map(|i| k.row(i).to_vec()).collect()
    }

    pub fn contains_point(&self, p: &[FieldElement]) -> bool {
        let m = Matrix::from_rows(&[self.rows[0].to_vec(), self.rows[1].to_vec(), p.to_vec()]);
        m.rank(&self.ctx) == 2
    }

    pub fn field_degree(&self) -> u32 {
        field_degree_of(&self.ctx, &[self.rows[0], self.rows[1]].concat())
    }

    pub fn embed(&self, emb: &Embedding) -> Line {
        assert!(*emb.source() == self.ctx);
        let a: Vec<FieldElement> = self.rows[0].iter().map(|&c| emb.map(c)).collect();
        let b: Vec<FieldElement> = self.rows[1].iter().map(|&c| emb.map(c)).collect();
        Line::from_rows(emb.target(), &a, &b).unwrap()
    }

    /// The same line over a subfield containing its entries.
    pub fn pull_back(&self, emb: &Embedding) -> Option<Line> {
        let a: Option<Vec<FieldElement>> = self.rows[0].iter().map(|&c| emb.preimage(c)).collect();
        let b: Option<Vec<FieldElement>> = self.rows[1].iter().map(|&c| emb.preimage(c)).collect();
        Some(Line::from_rows(emb.source(), &a?, &b?).unwrap())
    }

    /// The same line over another field, when that field contains its
    /// field of definition.
    pub fn transfer(&self, dst: &FieldCtx) -> Option<Line> {
        let d = self.field_degree();
        if dst.degree() % d != 0 {
            return None;
        }
        let small = crate::gf3::make_field(d).ok()?;
        let down = self.pull_back(&Embedding::new(&small, &self.ctx).ok()?)?;
        Some(down.embed(&Embedding::new(&small, dst).ok()?))
    }

    pub fn frobenius(&self) -> Line {
        let f = |r: &[FieldElement; 4]| -> Vec<FieldElement> { r.iter().map(|&c| self.ctx.frobenius(c, 1)).collect() };
        Line::from_rows(&self.ctx, &f(&self.rows[0]), &f(&self.rows[1])).unwrap()
    }

    fn key(&self) -> ((usize, usize), [usize; 8]) {
        let mut k = [0; 8];
        for i in 0..2 {
            for j in 0..4 {
                k[4 * i + j] = self.ctx.ordinal(self.rows[i][j]);
            }
        }
        (self.pivots(), k)
    }

    /// Canonical basis rows in field literal syntax.
    pub fn to_literal(&self) -> [String; 2] {
        let f = |r: &[FieldElement; 4]| {
            let parts: Vec<String> = r.iter().map(|&c| self.ctx.format(c)).collect();
            format!("({})", parts.join(","))
        };
        [f(&self.rows[0]), f(&self.rows[1])]
    }
}

impl Ord for Line {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Line {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.to_literal();
        write!(f, "<{a}, {b}>")
    }
}

pub fn canonical_line(p: &ProjPoint, q: &ProjPoint) -> Result<Line, ProjError> {
    if p.ctx != q.ctx {
        return Err(ProjError::FieldMismatch);
    }
    Line::from_rows(&p.ctx, &p.coords, &q.coords)
}

/// Intersection point of two distinct lines, if they meet.
pub fn lines_meet(l1: &Line, l2: &Line) -> Result<Option<ProjPoint>, ProjError> {
    if l1.ctx != l2.ctx {
        return Err(ProjError::FieldMismatch);
    }
    let ctx = &l1.ctx;
    // columns r1, r2, s1, s2
    let mut m = Matrix::zero(4, 4);
    let vecs = [l1.rows[0], l1.rows[1], l2.rows[0], l2.rows[1]];
    for (j, v) in vecs.iter().enumerate() {
        for i in 0..4 {
            m.set(i, j, v[i]);
        }
    }
    match m.rank(ctx) {
        4 => Ok(None),
        2 => Err(ProjError::SameLine),
        _ => {
            let k = m.kernel(ctx);
            let (a, b) = (k[0][0], k[0][1]);
            Ok(Some(ProjPoint::new(ctx, &l1.point_at(a, b))?))
        }
    }
}

/// The plane spanned by two distinct meeting lines.
pub fn plane_of(l1: &Line, l2: &Line) -> Option<Plane> {
    let m = Matrix::from_rows(&[
        l1.rows[0].to_vec(),
        l1.rows[1].to_vec(),
        l2.rows[0].to_vec(),
        l2.rows[1].to_vec(),
    ]);
    let k = m.kernel(&l1.ctx);
    if k.len() != 1 {
        return None;
    }
    Plane::new(&l1.ctx, &k[0]).ok()
}

/// The plane spanned by a line and a point off it.
pub fn plane_through(l: &Line, p: &[FieldElement]) -> Option<Plane> {
    let m = Matrix::from_rows(&[l.rows[0].to_vec(), l.rows[1].to_vec(), p.to_vec()]);
    let k = m.kernel(&l.ctx);
    if k.len() != 1 {
        return None;
    }
    Plane::new(&l.ctx, &k[0]).ok()
}

/// An invertible projective transformation x -> M x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjMap {
    ctx: FieldCtx,
    m: Matrix,
    inv: Matrix,
}

impl ProjMap {
    pub fn new(ctx: &FieldCtx, m: Matrix) -> Result<ProjMap, ProjError> {
        let inv = m.inverse(ctx).ok_or(ProjError::SingularMatrix)?;
        Ok(ProjMap { ctx: ctx.clone(), m, inv })
    }

    pub fn identity(ctx: &FieldCtx) -> ProjMap {
        ProjMap::new(ctx, Matrix::identity(4)).unwrap()
    }

    /// Sends coordinate i to coordinate perm[i].
    pub fn permutation(ctx: &FieldCtx, perm: [usize; 4]) -> ProjMap {
        let mut m = Matrix::zero(4, 4);
        for (i, &j) in perm.iter().enumerate() {
            m.set(j, i, FieldElement::ONE);
        }
        ProjMap::new(ctx, m).unwrap()
    }

    pub fn diagonal(ctx: &FieldCtx, d: [FieldElement; 4]) -> Result<ProjMap, ProjError> {
        let mut m = Matrix::zero(4, 4);
        for i in 0..4 {
            m.set(i, i, d[i]);
        }
        ProjMap::new(ctx, m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn inverse(&self) -> ProjMap {
        ProjMap {
            ctx: self.ctx.clone(),
            m: self.inv.clone(),
            inv: self.m.clone(),
        }
    }

    /// self after other.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        ProjMap::new(&self.ctx, self.m.mul(&self.ctx, &other.m)).unwrap()
    }

    pub fn apply_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.m.mul_vec(&self.ctx, v)
    }

    pub fn apply_point(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(&self.ctx, &self.apply_vec(&p.coords)).unwrap()
    }

    pub fn apply_line(&self, l: &Line) -> Line {
        Line::from_rows(&self.ctx, &self.apply_vec(&l.rows[0]), &self.apply_vec(&l.rows[1])).unwrap()
    }

    /// The plane T(H): coefficient vector a -> a M^-1.
    pub fn apply_plane(&self, h: &Plane) -> Plane {
        let t = self.inv.transpose();
        Plane::new(&self.ctx, &t.mul_vec(&self.ctx, &h.coeffs)).unwrap()
    }

    /// f o T^-1, which vanishes exactly on T(V(f)).
    pub fn apply_form(&self, f: &MultiPoly) -> MultiPoly {
        change_coords(f, &self.inv)
    }
}

/// Pivot columns of the six RREF cells, in canonical order.
pub const PATTERNS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Free positions (row, column) of the RREF cell with the given pivots.
pub fn free_positions(p: (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in p.0 + 1..4 {
        if j != p.1 {
            out.push((0, j));
        }
    }
    for j in p.1 + 1..4 {
        out.push((1, j));
    }
    out
}

/// (q^2 + 1)(q^2 + q + 1).
pub fn line_count(ctx: &FieldCtx) -> u64 {
    let q = ctx.size() as u64;
    (q * q + 1) * (q * q + q + 1)
}

/// The line with the given index in canonical order.
pub fn line_by_index(ctx: &FieldCtx, mut idx: u64) -> Line {
    let q = ctx.size() as u64;
    for p in PATTERNS {
        let free = free_positions(p);
        let cell = q.pow(free.len() as u32);
        if idx >= cell {
            idx -= cell;
            continue;
        }
        let mut rows = [[FieldElement::ZERO; 4]; 2];
        rows[0][p.0] = FieldElement::ONE;
        rows[1][p.1] = FieldElement::ONE;
        for &(r, c) in free.iter().rev() {
            rows[r][c] = ctx.element((idx % q) as usize);
            idx /= q;
        }
        return Line { ctx: ctx.clone(), rows };
    }
    panic!("line index out of range");
}

/// Every line of P^3 over ctx exactly once, in canonical order.
pub fn all_lines(ctx: &FieldCtx) -> impl Iterator<Item = Line> + '_ {
    (0..line_count(ctx)).map(move |i| line_by_index(ctx, i))
}

/// Contiguous index ranges covering all lines, for parallel sweeps.
pub fn line_chunks(ctx: &FieldCtx, chunk: u64) -> Vec<std::ops::Range<u64>> {
    let n = line_count(ctx);
    (0..n.div_ceil(chunk)).map(|i| i * chunk..((i + 1) * chunk).min(n)).collect()
}

// ---------------------------------------------------------------------------
// literals

fn literal_err(s: &str, msg: impl Into<String>) -> ProjError {
    ProjError::Literal(s.to_string(), msg.into())
}

/// Reads a point such as `[0:0:0:1]` or `[-1:1:g:0]`.
pub fn parse_point(ctx: &FieldCtx, s: &str) -> Result<ProjPoint, ProjError> {
    let body = s
        .trim()
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| literal_err(s, "expected [a:b:c:d]"))?;
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 4 {
        return Err(literal_err(s, "expected four coordinates"));
    }
    let v = parts
        .iter()
        .map(|p| parse_element(ctx, p).map_err(|e| literal_err(s, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    ProjPoint::new(ctx, &v)
}

/// Coefficient vectors of the equations in a chain `A = B = ... = C` of
/// linear forms in x0..x3, one per `=`.
fn linear_chain(ctx: &FieldCtx, s: &str) -> Result<Vec<Vec<FieldElement>>, ProjError> {
    let vars = ["x0", "x1", "x2", "x3"];
    let sides = s
        .split('=')
        .map(|side| {
            let f = parse_poly(ctx, side, &vars).map_err(|e| literal_err(s, e.to_string()))?;
            if !f.is_zero() && (!f.is_homogeneous() || f.total_degree() != Some(1)) {
                return Err(literal_err(s, "expected linear forms"));
            }
            Ok((0..4)
                .map(|i| {
                    let mut e = [0u16; 4];
                    e[i] = 1;
                    f.coeff(&e)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if sides.len() < 2 {
        return Err(literal_err(s, "expected an equation"));
    }
    Ok(sides
        .windows(2)
        .map(|w| (0..4).map(|i| ctx.sub(w[0][i], w[1][i])).collect())
        .collect())
}

/// Reads a plane such as `x0-x1-x2+x3=0` or `x0+x3=x1+x2`.
pub fn parse_plane(ctx: &FieldCtx, s: &str) -> Result<Plane, ProjError> {
    let eqs = linear_chain(ctx, s)?;
    let k = Matrix::from_rows(&eqs).kernel(ctx);
    if k.len() != 3 {
        return Err(literal_err(s, "expected one independent equation"));
    }
    Plane::new(ctx, &eqs.into_iter().find(|e| e.iter().any(|c| !c.is_zero())).unwrap())
}

/// Reads a line such as `x0=x1=0` or `x0=0, x1=x2`.
pub fn parse_line(ctx: &FieldCtx, s: &str) -> Result<Line, ProjError> {
    let mut eqs = Vec::new();
    for part in s.split(',') {
        eqs.extend(linear_chain(ctx, part)?);
    }
    let k = Matrix::from_rows(&eqs).kernel(ctx);
    if k.len() != 2 {
        return Err(literal_err(s, "expected two independent equations"));
    }
    Line::from_rows(ctx, &k[0], &k[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use std::collections::HashSet;

    fn pt(ctx: &FieldCtx, v: [i64; 4]) -> ProjPoint {
        ProjPoint::from_ints(ctx, v).unwrap()
    }

    #[test]
    fn canonical_form_of_span() {
        let f = make_field(1).unwrap();
        let l = canonical_line(&pt(&f, [0, 0, 1, 0]), &pt(&f, [0, 0, 0, 1])).unwrap();
        assert_eq!(l.rows()[0], [f.zero(), f.zero(), f.one(), f.zero()]);
        assert_eq!(l.rows()[1], [f.zero(), f.zero(), f.zero(), f.one()]);
        let l2 = canonical_line(&pt(&f, [0, 0, 1, 1]), &pt(&f, [0, 0, 1, 2])).unwrap();
        assert_eq!(l, l2);
        assert_eq!(
            canonical_line(&pt(&f, [1, 0, 0, 0]), &pt(&f, [1, 0, 0, 0])),
            Err(ProjError::DegenerateSpan)
        );
    }

    #[test]
    fn meeting_lines() {
        let f = make_field(1).unwrap();
        let (o, z) = (f.one(), f.zero());
        let l01 = Line::from_equations(&f, &[o, z, z, z], &[z, o, z, z]).unwrap();
        let l02 = Line::from_equations(&f, &[o, z, z, z], &[z, z, o, z]).unwrap();
        let l23 = Line::from_equations(&f, &[z, z, o, z], &[z, z, z, o]).unwrap();
        assert_eq!(lines_meet(&l01, &l02).unwrap(), Some(pt(&f, [0, 0, 0, 1])));
        assert_eq!(lines_meet(&l02, &l01).unwrap(), Some(pt(&f, [0, 0, 0, 1])));
        assert_eq!(lines_meet(&l01, &l23).unwrap(), None);
        assert_eq!(lines_meet(&l01, &l01), Err(ProjError::SameLine));
        let h = plane_of(&l01, &l02).unwrap();
        assert_eq!(h.coeffs(), &[o, z, z, z]);
    }

    #[test]
    fn maps_act_consistently() {
        let f = make_field(1).unwrap();
        let (o, z) = (f.one(), f.zero());
        let id = ProjMap::identity(&f);
        let l02 = Line::from_equations(&f, &[o, z, z, z], &[z, z, o, z]).unwrap();
        assert_eq!(id.apply_line(&l02), l02);
        let swap = ProjMap::permutation(&f, [1, 0, 2, 3]);
        let l12 = Line::from_equations(&f, &[z, o, z, z], &[z, z, o, z]).unwrap();
        assert_eq!(swap.apply_line(&l02), l12);
        let vars: Vec<String> = (0..4).map(|i| format!("x{i}")).collect();
        let h = Plane::new(&f, &[o, z, z, z]).unwrap();
        let img = swap.apply_form(&h.form(&vars));
        assert_eq!(img, swap.apply_plane(&h).form(&vars));
        assert!(swap.apply_plane(&h).contains_line(&l12));
    }

    #[test]
    fn line_stream_counts() {
        for k in 1..=2 {
            let f = make_field(k).unwrap();
            let all: Vec<Line> = all_lines(&f).collect();
            assert_eq!(all.len() as u64, line_count(&f));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            let set: HashSet<Line> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            for l in all.iter().step_by(97) {
                let again = Line::from_rows(&f, &l.rows()[0], &l.rows()[1]).unwrap();
                assert_eq!(&again, l);
            }
        }
        assert_eq!(line_count(&make_field(1).unwrap()), 130);
        assert_eq!(line_count(&make_field(2).unwrap()), 7462);
    }

    #[test]
    fn literals_round_trip() {
        let f = make_field(2).unwrap();
        let p = parse_point(&f, "[-1:1:g:0]").unwrap();
        assert_eq!(parse_point(&f, &p.to_literal()).unwrap(), p);
        let h = parse_plane(&f, "x0+x3=x1+x2").unwrap();
        assert_eq!(h, parse_plane(&f, "x0-x1-x2+x3=0").unwrap());
        assert_eq!(parse_plane(&f, &h.to_literal()).unwrap(), h);
        let l = parse_line(&f, "x0=x1=0").unwrap();
        assert_eq!(l, Line::from_rows(&f, &[0, 0, 1, 0].map(|c| f.from_int(c)), &[0, 0, 0, 1].map(|c| f.from_int(c))).unwrap());
        assert_eq!(parse_line(&f, "x0=0, x1=0").unwrap(), l);
        assert!(parse_line(&f, "x0=0").is_err());
        assert!(parse_plane(&f, "x0^2=0").is_err());
        assert!(parse_point(&f, "[1:2:3]").is_err());
    }
}
