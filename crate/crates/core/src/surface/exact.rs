//! Lines over the algebraic closure by elimination.
//!
//! In random coordinates y = M^-1 x, a line not meeting L0 = {y2 = y3 = 0}
//! is spanned by p = (a, b, 1, 0) and v = (c, d, 0, 1). Writing
//! F(s p + u v) = sum_k C_k s^(4-k) u^k, the line lies on the surface iff
//! C_0 = ... = C_4 = 0. C_1 = c F_0(p) + d F_1(p) + F_3(p) is linear in
//! (c, d); solving it for d (or for c) and clearing denominators leaves
//! q_2, q_3, q_4 in (a, b, c). Eliminating c and then b against C_0 gives
//! univariate polynomials in a whose gcd vanishes at the a-coordinate of
//! every such line. Each root is lifted to points p on the surface, and
//! the lines through p are found directly. Lines meeting L0 pass through
//! one of the four points of the surface on L0, which are required to be
//! rational over the work field. All resultants are computed by
//! evaluation and interpolation at formal degrees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{lines_through_point, QuarticSurface, SurfaceError};
use crate::gf3::{FieldCtx, FieldElement};
use crate::poly::binary::BinaryForm;
use crate::poly::multi::MultiPoly;
use crate::poly::univariate::{interpolate, padded, roots, sylvester_resultant, UPoly};
use crate::proj::Line;
use crate::solve::{change_coords, random_invertible};

/// Pairs (i, j) of the q's eliminated against each other.
const PAIRS: [(usize, usize); 3] = [(2, 3), (2, 4), (3, 4)];
/// Formal degrees in (a, b) of Res(q_i, q_j) for the pairs above.
const R_DEG: [usize; 3] = [44, 56, 76];
/// Formal degrees in a of the final eliminants.
const U_DEG: [usize; 3] = [176, 224, 304];
/// Number of eliminants: two ways of solving C_1, three pairs each.
const NE: usize = 6;

#[derive(Clone, Debug)]
pub struct ExactLines {
    /// Lines defined over the work field, sorted.
    pub lines: Vec<Line>,
    /// Degrees (over the work field) of irreducible factors carrying lines
    /// that could not be lifted; empty when the list is complete.
    pub residual: Vec<usize>,
    /// Random coordinate systems tried.
    pub attempts: usize,
}

impl ExactLines {
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Terms of C_k grouped by the monomial in (c, d): entries
/// (ec, ed, [(ea, eb, coeff)]).
type Grouped = Vec<(usize, usize, Vec<(u16, u16, FieldElement)>)>;

struct Chart {
    ctx: FieldCtx,
    groups: Vec<Grouped>,
}

impl Chart {
    fn new(fp: &MultiPoly) -> Chart {
        let ctx = fp.ctx().clone();
        let vars: Vec<String> = ["a", "b", "c", "d", "u"].iter().map(|s| s.to_string()).collect();
        let v = |i: usize| MultiPoly::var(&ctx, vars.clone(), i);
        let one = MultiPoly::constant(&ctx, vars.clone(), FieldElement::ONE);
        let images = [v(0).add(&v(4).mul(&v(2))), v(1).add(&v(4).mul(&v(3))), one, v(4)];
        let bind: Vec<(&str, MultiPoly)> = ["x0", "x1", "x2", "x3"].iter().copied().zip(images).collect();
        let g = fp.substitute_simultaneous(&bind).trim_vars(&vars);
        let mut cs = g.coefficients_in(4);
        cs.resize(5, MultiPoly::zero(&ctx, vars.clone()));
        let groups = cs
            .iter()
            .map(|ck| {
                let mut out: Grouped = Vec::new();
                for (m, &c) in ck.terms() {
                    let (ec, ed) = (m.0[2] as usize, m.0[3] as usize);
                    match out.iter_mut().find(|g| g.0 == ec && g.1 == ed) {
                        Some(g) => g.2.push((m.0[0], m.0[1], c)),
                        None => out.push((ec, ed, vec![(m.0[0], m.0[1], c)])),
                    }
                }
                out
            })
            .collect();
        Chart { ctx, groups }
    }

    /// C_k at (a, b) as dense arrays indexed [ec][ed].
    fn at(&self, a: FieldElement, b: FieldElement) -> Vec<[[FieldElement; 5]; 5]> {
        let ctx = &self.ctx;
        let mut pa = [FieldElement::ONE; 5];
        let mut pb = [FieldElement::ONE; 5];
        for e in 1..5 {
            pa[e] = ctx.mul(pa[e - 1], a);
            pb[e] = ctx.mul(pb[e - 1], b);
        }
        self.groups
            .iter()
            .map(|gk| {
                let mut m = [[FieldElement::ZERO; 5]; 5];
                for (ec, ed, ts) in gk {
                    m[*ec][*ed] = ts.iter().fold(FieldElement::ZERO, |acc, &(ea, eb, c)| {
                        ctx.add(acc, ctx.mul(c, ctx.mul(pa[ea as usize], pb[eb as usize])))
                    });
                }
                m
            })
            .collect()
    }

    /// E0(a, b) = C_0 as a polynomial in b.
    fn e0(&self, a: FieldElement) -> UPoly {
        let ctx = &self.ctx;
        let mut c = vec![FieldElement::ZERO; 5];
        for (_, _, ts) in &self.groups[0] {
            for &(ea, eb, x) in ts {
                c[eb as usize] = ctx.add(c[eb as usize], ctx.mul(x, ctx.pow(a, ea as u64)));
            }
        }
        UPoly::from_coeffs(c)
    }

    /// The eliminants at (a, b): for each way of solving C_1 (for d, then
    /// for c), Res(q_i, q_j) over the pairs. The q_2 row can vanish
    /// identically (it does for Hermitian-like quartics, as 6 = 0).
    fn eliminants(&self, a: FieldElement, b: FieldElement) -> [FieldElement; NE] {
        let ctx = &self.ctx;
        let cm = self.at(a, b);
        let (f0, f1, f3) = (cm[1][1][0], cm[1][0][1], cm[1][0][0]);
        let mut out = [FieldElement::ZERO; NE];
        for variant in 0..2 {
            // solve for the second unknown: w = n(z) / den
            let (den, lin) = if variant == 0 { (f1, f0) } else { (f0, f1) };
            let n = UPoly::from_coeffs(vec![ctx.neg(f3), ctx.neg(lin)]);
            let q: Vec<UPoly> = (2..5)
                .map(|k| {
                    let mut acc = UPoly::zero();
                    let mut npow = UPoly::one();
                    for j in 0..=k {
                        // coefficient of w^j as a polynomial in z
                        let coeffs: Vec<FieldElement> = (0..=k - j)
                            .map(|i| if variant == 0 { cm[k][i][j] } else { cm[k][j][i] })
                            .collect();
                        let t = UPoly::from_coeffs(coeffs)
                            .mul(ctx, &npow)
                            .scale(ctx, ctx.pow(den, (k - j) as u64));
                        acc = acc.add(ctx, &t);
                        npow = npow.mul(ctx, &n);
                    }
                    acc
                })
                .collect();
            for (pi, &(i, j)) in PAIRS.iter().enumerate() {
                out[3 * variant + pi] = sylvester_resultant(ctx, &padded(&q[i - 2], i), &padded(&q[j - 2], j));
            }
        }
        out
    }

    /// The eliminants at fixed a as polynomials in b.
    fn eliminants_in_b(&self, a: FieldElement) -> [UPoly; NE] {
        let ctx = &self.ctx;
        let nb = R_DEG[2] + 1;
        let bs = &ctx.elements()[..nb];
        let vals: Vec<[FieldElement; NE]> = bs.iter().map(|&b| self.eliminants(a, b)).collect();
        std::array::from_fn(|i| {
            let ys: Vec<FieldElement> = vals.iter().map(|v| v[i]).collect();
            interpolate(ctx, bs, &ys)
        })
    }
}

/// gcd of the univariate eliminants in a (zero if all vanish).
fn eliminant_in_a(chart: &Chart) -> UPoly {
    let ctx = &chart.ctx;
    let na = U_DEG[2] + 1;
    let as_: Vec<FieldElement> = ctx.elements()[..na].to_vec();
    let vals: Vec<[FieldElement; NE]> = as_
        .par_iter()
        .map(|&a| {
            let e0 = padded(&chart.e0(a), 4);
            let rs = chart.eliminants_in_b(a);
            std::array::from_fn(|i| sylvester_resultant(ctx, &e0, &padded(&rs[i], R_DEG[i % 3])))
        })
        .collect();
    let mut g = UPoly::zero();
    for i in 0..NE {
        let ys: Vec<FieldElement> = vals.iter().map(|v| v[i]).collect();
        let u = interpolate(ctx, &as_, &ys);
        debug_assert!(u.is_zero() || u.deg() <= U_DEG[i % 3]);
        g = if g.is_zero() { u } else if u.is_zero() { g } else { g.gcd(ctx, &u) };
    }
    g
}

pub fn lines_exact(x: &QuarticSurface, seed: u64) -> Result<ExactLines, SurfaceError> {
    let ctx = x.work_field().clone();
    if (ctx.size() as usize) <= U_DEG[2] {
        return Err(SurfaceError::Unsupported(format!(
            "work field GF(3^{}) is too small for exact enumeration",
            ctx.degree()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c69_6e65);
    let mut attempt = 0;
    for _ in 0..2000 {
        if attempt == 8 {
            break;
        }
        let m = random_invertible(&ctx, 4, &mut rng);
        let fp = change_coords(x.form_w(), &m);
        // the surface must meet L0 in four points over the work field
        let on_l0 = BinaryForm::new(4, (0..5).map(|i| fp.coeff(&[i as u16, 4 - i as u16, 0, 0])).collect());
        if on_l0.is_zero() {
            continue;
        }
        let (l0_roots, l0_res) = on_l0.roots(&ctx);
        if !l0_res.is_empty() {
            continue;
        }
        attempt += 1;
        let chart = Chart::new(&fp);
        let u = eliminant_in_a(&chart);
        if u.is_zero() {
            continue;
        }
        let rs = roots(&ctx, &u);
        let mut residual: Vec<usize> = rs.residual.iter().map(|r| r.0).collect();
        let mut points: Vec<Vec<FieldElement>> = Vec::new();
        for &((s, t), _) in &l0_roots {
            points.push(vec![s, t, FieldElement::ZERO, FieldElement::ZERO]);
        }
        let lifted: Vec<(Vec<Vec<FieldElement>>, Vec<usize>)> = rs
            .roots
            .par_iter()
            .map(|&(a0, _)| {
                let mut g = chart.e0(a0);
                for r in chart.eliminants_in_b(a0) {
                    if !r.is_zero() {
                        g = g.gcd(&ctx, &r);
                    }
                }
                let mut pts = Vec::new();
                let mut res = Vec::new();
                if g.deg() > 0 {
                    let br = roots(&ctx, &g);
                    res.extend(br.residual.iter().map(|r| r.0));
                    for (b0, _) in br.roots {
                        pts.push(vec![a0, b0, FieldElement::ONE, FieldElement::ZERO]);
                    }
                }
                (pts, res)
            })
            .collect();
        for (pts, res) in lifted {
            points.extend(pts);
            residual.extend(res);
        }
        let found: Vec<Result<(Vec<Line>, usize), SurfaceError>> =
            points.par_iter().map(|p| lines_through_point(&fp, p)).collect();
        let mut lines: Vec<Line> = Vec::new();
        for f in found {
            let (ls, unresolved) = f?;
            if unresolved > 0 {
                residual.push(unresolved);
            }
            for l in ls {
                let r = l.rows();
                let back = Line::from_rows(&ctx, &m.mul_vec(&ctx, &r[0]), &m.mul_vec(&ctx, &r[1])).unwrap();
                lines.push(back);
            }
        }
        for p in x.singular_points() {
            let (ls, unresolved) = x.lines_through_point(p.coords())?;
            if unresolved > 0 {
                residual.push(unresolved);
            }
            lines.extend(ls);
        }
        lines.sort();
        lines.dedup();
        assert!(lines.iter().all(|l| x.contains_line(l)), "lifted line is not on the surface");
        residual.sort();
        return Ok(ExactLines { lines, residual, attempts: attempt });
    }
    Err(SurfaceError::Unsupported("no admissible coordinate system found".into()))
}

/// Work-field degrees tried by [`lines_exact_adaptive`]: the default work
/// field first, then the other admissible extensions of the base field up
/// to `max_ext`, largest first.
pub fn candidate_work_degrees(base: u32, max_ext: u32) -> Vec<u32> {
    let default = crate::gf3::work_field(base).map(|f| f.degree()).unwrap_or(base);
    let big_enough = |m: u32| 3usize.pow(m) > U_DEG[2];
    let mut out = Vec::new();
    if default <= max_ext && big_enough(default) {
        out.push(default);
    }
    for m in (base..=max_ext.min(crate::gf3::MAX_DEGREE)).rev() {
        if m % base == 0 && m != default && big_enough(m) {
            out.push(m);
        }
    }
    out
}

/// Runs [`lines_exact`] over successive work fields until the list is
/// complete. Returns the surface over the chosen work field with its lines;
/// when no candidate is complete, the result over the default work field.
pub fn lines_exact_adaptive(
    x: &QuarticSurface,
    seed: u64,
    max_ext: u32,
) -> Result<(QuarticSurface, ExactLines), SurfaceError> {
    let mut first: Option<(QuarticSurface, ExactLines)> = None;
    for m in candidate_work_degrees(x.base_field().degree(), max_ext) {
        let y = x.rebased(m)?;
        let e = lines_exact(&y, seed)?;
        if e.is_complete() {
            return Ok((y, e));
        }
        if first.is_none() {
            first = Some((y, e));
        }
    }
    first.ok_or_else(|| {
        SurfaceError::Unsupported(format!(
            "no work field of degree at most {max_ext} is large enough for exact enumeration"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use crate::poly::parse::parse_poly;

    #[test]
    fn fermat_exact_matches_brute_force() {
        let f = make_field(2).unwrap();
        let x = QuarticSurface::new(&parse_poly(&f, "x0^4 + x1^4 + x2^4 + x3^4", &["x0", "x1", "x2", "x3"]).unwrap()).unwrap();
        let ex = lines_exact(&x, 0).unwrap();
        assert!(ex.is_complete(), "{:?}", ex.residual);
        assert_eq!(ex.lines, x.lines_bruteforce(2).unwrap());
    }
}
