//! Validated quartic surfaces: singular locus, line membership and the two
//! line enumerators.
//!
//! All geometric computations run in the work field W, the largest
//! supported field containing the field of definition of the surface.
//! Points and lines returned by this module live over W.

mod exact;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf3::{make_field, work_field, Embedding, FieldCtx, FieldElement};
use crate::linalg::Matrix;
use crate::poly::multi::{Mono, MultiPoly};
use crate::poly::PolyError;
use crate::proj::{free_positions, Line, ProjMap, ProjPoint, PATTERNS};
use crate::solve::{restrict_to_line, solve_p2, solve_p3, SolveError};

pub use exact::{candidate_work_degrees, lines_exact, lines_exact_adaptive, ExactLines};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("not a quartic form in four variables")]
    NotQuartic,
    #[error("not a K3 quartic: {0}")]
    NotK3(String),
    #[error("point is not on the surface")]
    NotOnSurface,
    #[error("line is not on the surface")]
    LineNotOnSurface,
    #[error("infinitely many lines through a point")]
    InfinitelyManyLines,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub fn coordinate_names() -> Vec<String> {
    (0..4).map(|i| format!("x{i}")).collect()
}

/// Fast evaluation of a quartic form at many points.
#[derive(Clone, Debug)]
pub struct QuarticEval {
    terms: Vec<([u8; 4], FieldElement)>,
}

impl QuarticEval {
    pub fn new(f: &MultiPoly) -> QuarticEval {
        let terms = f
            .terms()
            .map(|(m, &c)| ([m.0[0] as u8, m.0[1] as u8, m.0[2] as u8, m.0[3] as u8], c))
            .collect();
        QuarticEval { terms }
    }

    pub fn eval(&self, ctx: &FieldCtx, p: &[FieldElement]) -> FieldElement {
        let mut pw = [[FieldElement::ONE; 5]; 4];
        for i in 0..4 {
            for e in 1..5 {
                pw[i][e] = ctx.mul(pw[i][e - 1], p[i]);
            }
        }
        let mut acc = FieldElement::ZERO;
        for (e, c) in &self.terms {
            let t = ctx.mul(
                ctx.mul(*c, ctx.mul(pw[0][e[0] as usize], pw[1][e[1] as usize])),
                ctx.mul(pw[2][e[2] as usize], pw[3][e[3] as usize]),
            );
            acc = ctx.add(acc, t);
        }
        acc
    }
}

/// Checks passed during validation.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct K3Certificate {
    pub quartic: bool,
    pub finite_singular_locus: bool,
    /// Rational double point property of the singular points is assumed,
    /// not certified.
    pub rdp_unverified: bool,
    /// Singular points of multiplicity at least three (never rational
    /// double points).
    pub triple_points: usize,
    /// Singular points not defined over the work field.
    pub unresolved_singular_points: usize,
}

#[derive(Clone, Debug)]
pub struct QuarticSurface {
    base: FieldCtx,
    form: MultiPoly,
    work: FieldCtx,
    form_w: MultiPoly,
    eval_w: QuarticEval,
    sing: Vec<ProjPoint>,
    cert: K3Certificate,
}

/// Rewrites a form in four variables over the names x0..x3.
fn rename(form: &MultiPoly) -> MultiPoly {
    MultiPoly::from_terms(form.ctx(), coordinate_names(), form.terms().map(|(m, &c)| (m.0.clone(), c)))
}

pub fn new_surface(form: &MultiPoly, ctx: &FieldCtx) -> Result<QuarticSurface, SurfaceError> {
    let form = if form.ctx() == ctx {
        form.clone()
    } else {
        let emb = Embedding::new(form.ctx(), ctx).map_err(|e| SurfaceError::Unsupported(e.to_string()))?;
        form.map_field(&emb)
    };
    QuarticSurface::new(&form)
}

impl QuarticSurface {
    pub fn new(form: &MultiPoly) -> Result<QuarticSurface, SurfaceError> {
        let m = work_field(form.ctx().degree()).expect("supported degree").degree();
        QuarticSurface::with_work_degree(form, m)
    }

    /// Like [`QuarticSurface::new`] with the work field GF(3^m), which must
    /// contain the field of the form.
    pub fn with_work_degree(form: &MultiPoly, m: u32) -> Result<QuarticSurface, SurfaceError> {
        if form.vars().len() != 4 || form.is_zero() || !form.is_homogeneous() || form.total_degree() != Some(4) {
            return Err(SurfaceError::NotQuartic);
        }
        let form = rename(form);
        let base = form.ctx().clone();
        if m % base.degree() != 0 {
            return Err(SurfaceError::Unsupported(format!(
                "GF(3^{m}) does not contain GF(3^{})",
                base.degree()
            )));
        }
        let work = make_field(m).map_err(|e| SurfaceError::Unsupported(e.to_string()))?;
        let form_w = if work == base {
            form.clone()
        } else {
            form.map_field(&Embedding::new(&base, &work).expect("subfield"))
        };
        // the form lies in the ideal of its partials since 4 = 1
        let partials: Vec<MultiPoly> = (0..4).map(|i| form_w.partial(i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x4b33_5f73);
        let sol = match solve_p3(&work, &partials, &mut rng) {
            Ok(s) => s,
            Err(SolveError::PositiveDimensional) => {
                return Err(SurfaceError::NotK3("singular locus is positive dimensional".into()))
            }
            Err(e) => return Err(SurfaceError::Unsupported(e.to_string())),
        };
        let sing: Vec<ProjPoint> = sol.points.iter().map(|p| ProjPoint::new(&work, p).unwrap()).collect();
        let second: Vec<MultiPoly> = partials
            .iter()
            .flat_map(|p| (0..4).map(move |j| p.partial(j)))
            .collect();
        let triple_points = sing
            .iter()
            .filter(|p| second.iter().all(|h| h.eval(p.coords()).is_zero()))
            .count();
        let cert = K3Certificate {
            quartic: true,
            finite_singular_locus: true,
            rdp_unverified: !sing.is_empty() || sol.unresolved > 0,
            triple_points,
            unresolved_singular_points: sol.unresolved,
        };
        Ok(QuarticSurface {
            base,
            eval_w: QuarticEval::new(&form_w),
            form,
            work,
            form_w,
            sing,
            cert,
        })
    }

    pub fn base_field(&self) -> &FieldCtx {
        &self.base
    }

    pub fn work_field(&self) -> &FieldCtx {
        &self.work
    }

    /// The same surface with another work field.
    pub fn rebased(&self, m: u32) -> Result<QuarticSurface, SurfaceError> {
        if m == self.work.degree() {
            return Ok(self.clone());
        }
        QuarticSurface::with_work_degree(&self.form, m)
    }

    pub fn form(&self) -> &MultiPoly {
        &self.form
    }

    /// The form over the work field.
    pub fn form_w(&self) -> &MultiPoly {
        &self.form_w
    }

    pub fn certificate(&self) -> &K3Certificate {
        &self.cert
    }

    /// Singular points over the work field, sorted.
    pub fn singular_points(&self) -> &[ProjPoint] {
        &self.sing
    }

    pub fn eval(&self, p: &[FieldElement]) -> FieldElement {
        self.eval_w.eval(&self.work, p)
    }

    pub fn contains_point(&self, p: &[FieldElement]) -> bool {
        self.eval(p).is_zero()
    }

    pub fn is_singular_point(&self, p: &[FieldElement]) -> bool {
        self.sing.iter().any(|s| s.coords()[..] == ProjPoint::new(&self.work, p).unwrap().coords()[..])
    }

    pub fn is_smooth_point(&self, p: &ProjPoint) -> Result<bool, SurfaceError> {
        if !self.contains_point(p.coords()) {
            return Err(SurfaceError::NotOnSurface);
        }
        Ok((0..4).any(|i| !self.form_w.partial(i).eval(p.coords()).is_zero()))
    }

    pub fn contains_line(&self, l: &Line) -> bool {
        assert!(*l.ctx() == self.work, "line must live over the work field");
        let ctx = &self.work;
        let r = l.rows();
        if !self.contains_point(&r[0]) || !self.contains_point(&r[1]) {
            return false;
        }
        // three more points of the line
        (1..4).all(|i| self.contains_point(&l.point_at(FieldElement::ONE, ctx.element(i))))
    }

    /// Lines on the surface through a point of it.
    pub fn lines_through_point(&self, p: &[FieldElement]) -> Result<(Vec<Line>, usize), SurfaceError> {
        lines_through_point(&self.form_w, p)
    }

    /// All lines over GF(3^k), sorted. The lines are returned over the work
    /// field when it contains GF(3^k), and over GF(3^lcm) otherwise.
    pub fn lines_bruteforce(&self, k: u32) -> Result<Vec<Line>, SurfaceError> {
        let fk = make_field(k).map_err(|e| SurfaceError::Unsupported(e.to_string()))?;
        let kb = self.base.degree();
        let m = k / gcd(k, kb) * kb;
        let target = if self.work.degree() % k == 0 {
            self.work.clone()
        } else {
            work_field(m).map_err(|_| SurfaceError::Unsupported(format!("GF(3^{k}) and GF(3^{kb}) have no common supported extension")))?
        };
        let form_t = if target == self.base {
            self.form.clone()
        } else {
            self.form.map_field(&Embedding::new(&self.base, &target).unwrap())
        };
        let ev = QuarticEval::new(&form_t);
        let emb = Embedding::new(&fk, &target).unwrap();
        let q = fk.size() as u64;
        let tctx = &target;
        let mut found: Vec<Line> = Vec::new();
        for pat in PATTERNS {
            let free = free_positions(pat);
            let f0: Vec<usize> = free.iter().filter(|x| x.0 == 0).map(|x| x.1).collect();
            let f1: Vec<usize> = free.iter().filter(|x| x.0 == 1).map(|x| x.1).collect();
            let n0 = q.pow(f0.len() as u32);
            let n1 = q.pow(f1.len() as u32);
            let build = |pivot: usize, cols: &[usize], mut idx: u64| {
                let mut r = [FieldElement::ZERO; 4];
                r[pivot] = FieldElement::ONE;
                for &c in cols.iter().rev() {
                    r[c] = emb.map(fk.element((idx % q) as usize));
                    idx /= q;
                }
                r
            };
            let part: Vec<Vec<Line>> = (0..n0)
                .into_par_iter()
                .map(|i0| {
                    let r0 = build(pat.0, &f0, i0);
                    let mut out = Vec::new();
                    if !ev.eval(tctx, &r0).is_zero() {
                        return out;
                    }
                    for i1 in 0..n1 {
                        let r1 = build(pat.1, &f1, i1);
                        if !ev.eval(tctx, &r1).is_zero() {
                            continue;
                        }
                        let on = (1..4).all(|i| {
                            let t = tctx.element(i);
                            let p: Vec<FieldElement> = (0..4).map(|j| tctx.add(r0[j], tctx.mul(t, r1[j]))).collect();
                            ev.eval(tctx, &p).is_zero()
                        });
                        if on {
                            out.push(Line::from_rows(tctx, &r0, &r1).unwrap());
                        }
                    }
                    out
                })
                .collect();
            found.extend(part.into_iter().flatten());
        }
        found.sort();
        Ok(found)
    }

    /// Moves a line on the surface to x0 = x1 = 0.
    pub fn normalize_to_standard(&self, l: &Line) -> Result<NormalizedLineChart, SurfaceError> {
        if !self.contains_line(l) {
            return Err(SurfaceError::LineNotOnSurface);
        }
        let ctx = &self.work;
        let rows = l.rows();
        let mut cols: Vec<Vec<FieldElement>> = Vec::new();
        for i in 0..4 {
            if cols.len() == 2 {
                break;
            }
            let mut e = vec![FieldElement::ZERO; 4];
            e[i] = FieldElement::ONE;
            let mut trial = cols.clone();
            trial.push(e.clone());
            trial.push(rows[0].to_vec());
            trial.push(rows[1].to_vec());
            if Matrix::from_rows(&trial).rank(ctx) == trial.len() {
                cols.push(e);
            }
        }
        cols.push(rows[0].to_vec());
        cols.push(rows[1].to_vec());
        let b = Matrix::from_rows(&cols).transpose();
        let to_std = ProjMap::new(ctx, b.inverse(ctx).unwrap()).unwrap();
        let form = to_std.apply_form(&self.form_w);
        Ok(NormalizedLineChart { map: to_std, form })
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A coordinate system in which a given line is x0 = x1 = 0.
#[derive(Clone, Debug)]
pub struct NormalizedLineChart {
    /// Sends the line to x0 = x1 = 0.
    pub map: ProjMap,
    /// The transformed form.
    pub form: MultiPoly,
}

impl NormalizedLineChart {
    pub fn coeff(&self, e: [u16; 4]) -> FieldElement {
        self.form.coeff(&e)
    }
}

/// F(s P + u w) = sum_k D_k(w) s^(4-k) u^k for directions w with w_j = 0,
/// where j is the first nonzero coordinate of P; D_k is returned as a
/// ternary form in the remaining coordinates.
fn direction_forms(form: &MultiPoly, p: &[FieldElement]) -> (usize, Vec<MultiPoly>) {
    let ctx = form.ctx();
    let j = p.iter().position(|c| !c.is_zero()).unwrap();
    let others: Vec<usize> = (0..4).filter(|&i| i != j).collect();
    let vars: Vec<String> = vec!["w0".into(), "w1".into(), "w2".into(), "t".into()];
    let bindings: Vec<(String, MultiPoly)> = (0..4)
        .map(|i| {
            let mut img = MultiPoly::constant(ctx, vars.clone(), p[i]);
            if let Some(k) = others.iter().position(|&o| o == i) {
                let mut e = vec![0u16; 4];
                e[k] = 1;
                e[3] = 1;
                img.add_term(Mono(e), FieldElement::ONE);
            }
            (format!("x{i}"), img)
        })
        .collect();
    let refs: Vec<(&str, MultiPoly)> = bindings.iter().map(|(v, f)| (v.as_str(), f.clone())).collect();
    let g = form.substitute_simultaneous(&refs).trim_vars(&vars);
    let mut ds = g.coefficients_in(3);
    ds.resize(5, MultiPoly::zero(ctx, vars.clone()));
    let keep: Vec<String> = vars[..3].to_vec();
    (j, ds.iter().map(|d| d.trim_vars(&keep)).collect())
}

/// Lines on V(form) through the point p of it, with the number of such
/// lines not defined over the field of the form.
pub fn lines_through_point(form: &MultiPoly, p: &[FieldElement]) -> Result<(Vec<Line>, usize), SurfaceError> {
    let ctx = form.ctx();
    let (j, ds) = direction_forms(form, p);
    if !ds[0].is_zero() {
        return Err(SurfaceError::NotOnSurface);
    }
    let others: Vec<usize> = (0..4).filter(|&i| i != j).collect();
    let lift = |w: &[FieldElement]| {
        let mut v = vec![FieldElement::ZERO; 4];
        for (k, &o) in others.iter().enumerate() {
            v[o] = w[k];
        }
        Line::from_rows(ctx, p, &v).unwrap()
    };
    let mut lines = Vec::new();
    let mut unresolved = 0;
    if !ds[1].is_zero() {
        let l: Vec<FieldElement> = (0..3)
            .map(|i| {
                let mut e = vec![0u16; 3];
                e[i] = 1;
                ds[1].coeff(&e)
            })
            .collect();
        let ker = Matrix::from_rows(&[l]).kernel(ctx);
        let mut acc = crate::poly::BinaryForm::zero(0);
        for d in &ds[2..] {
            let b = restrict_to_line(ctx, d, &ker[0], &ker[1]);
            acc = crate::poly::binary::gcd_forms(ctx, &acc, &b);
        }
        if acc.is_zero() {
            return Err(SurfaceError::InfinitelyManyLines);
        }
        let (roots, residual) = acc.roots(ctx);
        unresolved += residual.iter().map(|r| r.0).sum::<usize>();
        for ((s, u), _) in roots {
            let w: Vec<FieldElement> = (0..3).map(|i| ctx.add(ctx.mul(s, ker[0][i]), ctx.mul(u, ker[1][i]))).collect();
            lines.push(lift(&w));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7074);
        match solve_p2(ctx, &ds[2..], &mut rng) {
            Ok(sol) => {
                unresolved += sol.unresolved;
                for w in &sol.points {
                    lines.push(lift(w));
                }
            }
            Err(SolveError::PositiveDimensional) => return Err(SurfaceError::InfinitelyManyLines),
            Err(e) => return Err(SurfaceError::Unsupported(e.to_string())),
        }
    }
    lines.sort();
    lines.dedup();
    Ok((lines, unresolved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse_poly;

    fn surface(k: u32, s: &str) -> Result<QuarticSurface, SurfaceError> {
        let f = make_field(k).unwrap();
        QuarticSurface::new(&parse_poly(&f, s, &["x0", "x1", "x2", "x3"]).unwrap())
    }

    #[test]
    fn fermat_is_smooth_and_has_112_rational_lines_over_gf9() {
        let x = surface(2, "x0^4 + x1^4 + x2^4 + x3^4").unwrap();
        assert!(x.singular_points().is_empty());
        assert!(!x.certificate().rdp_unverified);
        let lines = x.lines_bruteforce(2).unwrap();
        assert_eq!(lines.len(), 112);
        assert!(lines.iter().all(|l| x.contains_line(l)));
    }

    #[test]
    fn rejects_non_quartics_and_reducible_quartics() {
        assert_eq!(surface(1, "x0^3 + x1^3").unwrap_err(), SurfaceError::NotQuartic);
        assert!(matches!(surface(1, "(x0^2 + x1^2 + x2^2 + x3^2)^2"), Err(SurfaceError::NotK3(_))));
        assert!(matches!(surface(1, "x0*(x0^3 + x1^3 + x2^3 + x3^3 + x1*x2*x3)"), Err(SurfaceError::NotK3(_))));
    }

    #[test]
    fn singular_points_of_two_point_example() {
        let x = surface(
            1,
            "x0^4 + x0^3*x1 + x0*x1^3 + x1*x2^3 + x0*x1*x3^2 + x1^2*x3^2 + x0*x2*x3^2",
        )
        .unwrap();
        let w = x.work_field().clone();
        let expect = vec![ProjPoint::from_ints(&w, [0, 0, 0, 1]).unwrap(), ProjPoint::from_ints(&w, [-1, 1, 1, 0]).unwrap()];
        let mut got = x.singular_points().to_vec();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        assert!(!x.is_smooth_point(&expect[0]).unwrap());
        let off = ProjPoint::from_ints(&w, [1, 0, 0, 0]).unwrap();
        assert_eq!(x.is_smooth_point(&off), Err(SurfaceError::NotOnSurface));
    }

    #[test]
    fn standard_chart_kills_line_coefficients() {
        let x = surface(2, "x0^4 + x1^4 + x2^4 + x3^4").unwrap();
        for l in x.lines_bruteforce(2).unwrap().iter().step_by(11) {
            let ch = x.normalize_to_standard(l).unwrap();
            for i in 0..=4u16 {
                assert!(ch.coeff([0, 0, i, 4 - i]).is_zero());
            }
        }
    }

    #[test]
    fn lines_through_fermat_point() {
        let x = surface(2, "x0^4 + x1^4 + x2^4 + x3^4").unwrap();
        let lines = x.lines_bruteforce(2).unwrap();
        let l = &lines[0];
        let p = l.rows()[0];
        let (through, unresolved) = x.lines_through_point(&p).unwrap();
        assert_eq!(unresolved, 0);
        let expected: Vec<&Line> = lines.iter().filter(|m| m.contains_point(&p)).collect();
        assert_eq!(through.len(), expected.len());
        assert!(through.contains(l));
    }
}
