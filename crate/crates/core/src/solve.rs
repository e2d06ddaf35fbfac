//! Finite projective systems over a finite field by randomized elimination.
//!
//! A system of homogeneous forms is put in random coordinates, replaced by
//! random combinations of common degree, and the last coordinate is
//! eliminated with Sylvester resultants computed by evaluation and
//! interpolation. Roots of the eliminant are lifted back by gcds on the
//! fibers of the projection and every lifted point satisfies all input
//! forms by construction. Solutions not defined over the field are counted
//! but not returned.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf3::{FieldCtx, FieldElement};
use crate::linalg::Matrix;
use crate::poly::binary::{gcd_forms, BinaryForm};
use crate::poly::multi::{Mono, MultiPoly};
use crate::poly::univariate::{interpolate, sylvester_resultant, UPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("solution set is positive dimensional")]
    PositiveDimensional,
    #[error("field too small for interpolation ({needed} nodes needed)")]
    FieldTooSmall { needed: usize },
}

/// Solutions of a projective system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjSolutions {
    /// Normalized points (first nonzero coordinate 1), sorted.
    pub points: Vec<Vec<FieldElement>>,
    /// Solutions over the algebraic closure that are not defined over the
    /// field (a lower estimate).
    pub unresolved: usize,
}

impl ProjSolutions {
    pub fn is_complete(&self) -> bool {
        self.unresolved == 0
    }
}

pub fn random_element(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FieldElement {
    ctx.element(rng.gen_range(0..ctx.size() as usize))
}

pub fn random_nonzero(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FieldElement {
    ctx.element(rng.gen_range(1..ctx.size() as usize))
}

pub fn random_invertible(ctx: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, random_element(ctx, rng));
            }
        }
        if !m.det(ctx).is_zero() {
            return m;
        }
    }
}

pub fn normalize_point(ctx: &FieldCtx, p: &[FieldElement]) -> Vec<FieldElement> {
    let lead = *p.iter().find(|c| !c.is_zero()).expect("zero vector is not a projective point");
    let inv = ctx.inv(lead).unwrap();
    p.iter().map(|&c| ctx.mul(c, inv)).collect()
}

/// f(A y) for a form f in n variables.
pub fn change_coords(f: &MultiPoly, a: &Matrix) -> MultiPoly {
    let ctx = f.ctx();
    let vars = f.vars().to_vec();
    let n = vars.len();
    let bindings: Vec<(String, MultiPoly)> = (0..n)
        .map(|i| {
            let img = MultiPoly::from_terms(
                ctx,
                vars.clone(),
                (0..n).map(|j| {
                    let mut e = vec![0u16; n];
                    e[j] = 1;
                    (e, a.get(i, j))
                }),
            );
            (vars[i].clone(), img)
        })
        .collect();
    let refs: Vec<(&str, MultiPoly)> = bindings.iter().map(|(v, p)| (v.as_str(), p.clone())).collect();
    f.substitute_simultaneous(&refs)
}

pub fn random_form(ctx: &FieldCtx, vars: &[String], deg: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let n = vars.len();
    let mut p = MultiPoly::zero(ctx, vars.to_vec());
    let mut e = vec![0u16; n];
    fn rec(
        i: usize,
        left: u32,
        e: &mut Vec<u16>,
        p: &mut MultiPoly,
        ctx: &FieldCtx,
        rng: &mut ChaCha8Rng,
    ) {
        if i + 1 == e.len() {
            e[i] = left as u16;
            p.add_term(Mono(e.clone()), random_element(ctx, rng));
            return;
        }
        for k in 0..=left {
            e[i] = k as u16;
            rec(i + 1, left - k, e, p, ctx, rng);
        }
    }
    rec(0, deg, &mut e, &mut p, ctx, rng);
    p
}

/// Terms grouped by the exponent of variable `v`.
struct Sliced {
    v: usize,
    groups: Vec<Vec<(Vec<u16>, FieldElement)>>,
}

impl Sliced {
    fn new(f: &MultiPoly, v: usize, deg: usize) -> Sliced {
        let mut groups = vec![Vec::new(); deg + 1];
        for (m, &c) in f.terms() {
            groups[m.0[v] as usize].push((m.0.clone(), c));
        }
        Sliced { v, groups }
    }

    /// Coefficients in v (formal degree `deg`) at a point for the other
    /// variables (the entry for v is ignored).
    fn at(&self, ctx: &FieldCtx, point: &[FieldElement]) -> Vec<FieldElement> {
        self.groups
            .iter()
            .map(|g| {
                g.iter().fold(FieldElement::ZERO, |acc, (e, c)| {
                    let mut t = *c;
                    for (i, &k) in e.iter().enumerate() {
                        if i != self.v && k > 0 {
                            t = ctx.mul(t, ctx.pow(point[i], k as u64));
                        }
                    }
                    ctx.add(acc, t)
                })
            })
            .collect()
    }
}

/// f(s p + u q) as a binary form in (s, u), coefficient i on s^i u^(d-i).
pub fn restrict_to_line(ctx: &FieldCtx, f: &MultiPoly, p: &[FieldElement], q: &[FieldElement]) -> BinaryForm {
    let d = f.total_degree().unwrap_or(0) as usize;
    let xs: Vec<FieldElement> = ctx.elements()[..d + 1].to_vec();
    let ys: Vec<FieldElement> = xs
        .iter()
        .map(|&s| {
            let pt: Vec<FieldElement> = p.iter().zip(q).map(|(&a, &b)| ctx.add(ctx.mul(s, a), b)).collect();
            f.eval(&pt)
        })
        .collect();
    BinaryForm::from_upoly(&interpolate(ctx, &xs, &ys), d)
}

fn combos(
    ctx: &FieldCtx,
    forms: &[MultiPoly],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> (u32, Vec<MultiPoly>) {
    let d = forms.iter().map(|f| f.total_degree().unwrap()).max().unwrap();
    let vars = forms[0].vars().to_vec();
    let out = (0..count)
        .map(|_| {
            let mut acc = MultiPoly::zero(ctx, vars.clone());
            for f in forms {
                let m = random_form(ctx, &vars, d - f.total_degree().unwrap(), rng);
                acc = acc.add(&f.mul(&m));
            }
            acc
        })
        .collect();
    (d, out)
}

fn prepare(forms: &[MultiPoly]) -> Result<Option<Vec<MultiPoly>>, SolveError> {
    let nz: Vec<MultiPoly> = forms.iter().filter(|f| !f.is_zero()).cloned().collect();
    if nz.is_empty() {
        return Err(SolveError::PositiveDimensional);
    }
    if nz.iter().any(|f| f.total_degree() == Some(0)) {
        return Ok(None);
    }
    if nz.len() == 1 {
        return Err(SolveError::PositiveDimensional);
    }
    Ok(Some(nz))
}

/// Resultant in the last variable of two ternary forms of degree d, as a
/// binary form of degree d^2 in the first two variables.
fn eliminant_p2(ctx: &FieldCtx, g: &MultiPoly, h: &MultiPoly, d: usize) -> Result<BinaryForm, SolveError> {
    let n = d * d;
    if ctx.size() as usize <= n {
        return Err(SolveError::FieldTooSmall { needed: n + 1 });
    }
    let sg = Sliced::new(g, 2, d);
    let sh = Sliced::new(h, 2, d);
    let xs: Vec<FieldElement> = ctx.elements()[..n + 1].to_vec();
    let ys: Vec<FieldElement> = xs
        .iter()
        .map(|&x| {
            let pt = [x, FieldElement::ONE, FieldElement::ZERO];
            sylvester_resultant(ctx, &sg.at(ctx, &pt), &sh.at(ctx, &pt))
        })
        .collect();
    Ok(BinaryForm::from_upoly(&interpolate(ctx, &xs, &ys), n))
}

/// All common zeros in P^2 of homogeneous forms in three variables.
pub fn solve_p2(ctx: &FieldCtx, forms: &[MultiPoly], rng: &mut ChaCha8Rng) -> Result<ProjSolutions, SolveError> {
    let Some(forms) = prepare(forms)? else {
        return Ok(ProjSolutions::default());
    };
    for _attempt in 0..8 {
        let a = random_invertible(ctx, 3, rng);
        let moved: Vec<MultiPoly> = forms.iter().map(|f| change_coords(f, &a)).collect();
        let (d, cs) = combos(ctx, &moved, 3, rng);
        let d = d as usize;
        // leading coefficient in the eliminated variable must be a unit
        if cs[0].eval(&[FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE]).is_zero() {
            continue;
        }
        let r1 = eliminant_p2(ctx, &cs[0], &cs[1], d)?;
        let r2 = eliminant_p2(ctx, &cs[0], &cs[2], d)?;
        if r1.is_zero() || r2.is_zero() {
            continue;
        }
        let r = gcd_forms(ctx, &r1, &r2);
        let mut sol = ProjSolutions::default();
        if r.deg == 0 {
            return Ok(sol);
        }
        let (roots, residual) = r.roots(ctx);
        sol.unresolved += residual.iter().map(|x| x.0).sum::<usize>();
        let apex = [FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE];
        let mut degenerate = false;
        for ((x, y), _) in roots {
            let base = [x, y, FieldElement::ZERO];
            let mut acc: Option<BinaryForm> = None;
            for f in &moved {
                let b = restrict_to_line(ctx, f, &base, &apex);
                acc = Some(match acc {
                    None => b.normalized(ctx),
                    Some(prev) => gcd_forms(ctx, &prev, &b),
                });
            }
            let acc = acc.unwrap();
            if acc.is_zero() {
                degenerate = true;
                break;
            }
            if acc.deg == 0 {
                continue;
            }
            let (pts, res) = acc.roots(ctx);
            sol.unresolved += res.iter().map(|x| x.0).sum::<usize>();
            for ((s, u), _) in pts {
                let y: Vec<FieldElement> =
                    (0..3).map(|i| ctx.add(ctx.mul(s, base[i]), ctx.mul(u, apex[i]))).collect();
                sol.points.push(normalize_point(ctx, &a.mul_vec(ctx, &y)));
            }
        }
        if degenerate {
            continue;
        }
        sol.points.sort_by_key(|p| p.iter().map(|&c| ctx.ordinal(c)).collect::<Vec<_>>());
        sol.points.dedup();
        return Ok(sol);
    }
    Err(SolveError::PositiveDimensional)
}

/// Resultant in the last variable of two quaternary forms of degree d, as
/// a ternary form of degree d^2 in the first three variables.
fn eliminant_p3(
    ctx: &FieldCtx,
    g: &MultiPoly,
    h: &MultiPoly,
    d: usize,
    vars3: &[String],
) -> Result<MultiPoly, SolveError> {
    let n = d * d;
    if ctx.size() as usize <= n {
        return Err(SolveError::FieldTooSmall { needed: n + 1 });
    }
    let sg = Sliced::new(g, 3, d);
    let sh = Sliced::new(h, 3, d);
    let nodes: Vec<FieldElement> = ctx.elements()[..n + 1].to_vec();
    // rows[i] = polynomial in x1 for x0 = nodes[i]
    let rows: Vec<UPoly> = nodes
        .iter()
        .map(|&x0| {
            let vals: Vec<FieldElement> = nodes
                .iter()
                .map(|&x1| {
                    let pt = [x0, x1, FieldElement::ONE, FieldElement::ZERO];
                    sylvester_resultant(ctx, &sg.at(ctx, &pt), &sh.at(ctx, &pt))
                })
                .collect();
            interpolate(ctx, &nodes, &vals)
        })
        .collect();
    let mut out = MultiPoly::zero(ctx, vars3.to_vec());
    for j in 0..=n {
        let vals: Vec<FieldElement> = rows.iter().map(|r| r.coeff(j)).collect();
        let col = interpolate(ctx, &nodes, &vals);
        for (i, &c) in col.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            assert!(i + j <= n, "eliminant exceeds its degree bound");
            out.add_term(Mono(vec![i as u16, j as u16, (n - i - j) as u16]), c);
        }
    }
    Ok(out)
}

/// All common zeros in P^3 of homogeneous forms in four variables.
pub fn solve_p3(ctx: &FieldCtx, forms: &[MultiPoly], rng: &mut ChaCha8Rng) -> Result<ProjSolutions, SolveError> {
    let Some(forms) = prepare(forms)? else {
        return Ok(ProjSolutions::default());
    };
    if forms.len() < 3 {
        return Err(SolveError::PositiveDimensional);
    }
    let vars3: Vec<String> = vec!["y0".into(), "y1".into(), "y2".into()];
    let apex = [FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE];
    for _attempt in 0..6 {
        let a = random_invertible(ctx, 4, rng);
        let moved: Vec<MultiPoly> = forms.iter().map(|f| change_coords(f, &a)).collect();
        let (d, cs) = combos(ctx, &moved, 4, rng);
        let d = d as usize;
        if cs[0].eval(&apex).is_zero() {
            continue;
        }
        let mut elim = Vec::new();
        for h in &cs[1..] {
            elim.push(eliminant_p3(ctx, &cs[0], h, d, &vars3)?);
        }
        if elim.iter().any(|e| e.is_zero()) {
            continue;
        }
        let proj = match solve_p2(ctx, &elim, rng) {
            Ok(p) => p,
            Err(SolveError::PositiveDimensional) => continue,
            Err(e) => return Err(e),
        };
        let mut sol = ProjSolutions {
            points: Vec::new(),
            unresolved: proj.unresolved,
        };
        let mut degenerate = false;
        for q in &proj.points {
            let base = [q[0], q[1], q[2], FieldElement::ZERO];
            let mut acc: Option<BinaryForm> = None;
            for f in &moved {
                let b = restrict_to_line(ctx, f, &base, &apex);
                acc = Some(match acc {
                    None => b.normalized(ctx),
                    Some(prev) => gcd_forms(ctx, &prev, &b),
                });
            }
            let acc = acc.unwrap();
            if acc.is_zero() {
                degenerate = true;
                break;
            }
            if acc.deg == 0 {
                continue;
            }
            let (pts, res) = acc.roots(ctx);
            sol.unresolved += res.iter().map(|x| x.0).sum::<usize>();
            for ((s, u), _) in pts {
                let y: Vec<FieldElement> =
                    (0..4).map(|i| ctx.add(ctx.mul(s, base[i]), ctx.mul(u, apex[i]))).collect();
                sol.points.push(normalize_point(ctx, &a.mul_vec(ctx, &y)));
            }
        }
        if degenerate {
            continue;
        }
        sol.points.sort_by_key(|p| p.iter().map(|&c| ctx.ordinal(c)).collect::<Vec<_>>());
        sol.points.dedup();
        return Ok(sol);
    }
    Err(SolveError::PositiveDimensional)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use crate::poly::parse::parse_poly;
    use rand::SeedableRng;

    #[test]
    fn conic_and_line_meet_in_two_points() {
        let f = make_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = ["x", "y", "z"];
        let conic = parse_poly(&f, "x^2 + y^2 - z^2", &v).unwrap();
        let line = parse_poly(&f, "y", &v).unwrap();
        let s = solve_p2(&f, &[conic, line], &mut rng).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!(s.is_complete());
    }

    #[test]
    fn cuspidal_cubic_singular_point() {
        let f = make_field(1).unwrap();
        let f9 = make_field(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = ["x1", "x2", "x3"];
        let c = parse_poly(&f, "x3*x2^2 + x1^3", &v).unwrap();
        let emb = crate::gf3::Embedding::new(&f, &f9).unwrap();
        let c = c.map_field(&emb);
        let mut forms = vec![c.clone()];
        forms.extend((0..3).map(|i| c.partial(i)));
        let s = solve_p2(&f9, &forms, &mut rng).unwrap();
        assert_eq!(s.points, vec![vec![f9.zero(), f9.zero(), f9.one()]]);
    }

    #[test]
    fn common_component_is_positive_dimensional() {
        let f = make_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = ["x", "y", "z"];
        let a = parse_poly(&f, "x*y", &v).unwrap();
        let b = parse_poly(&f, "x*z", &v).unwrap();
        assert_eq!(solve_p2(&f, &[a, b], &mut rng), Err(SolveError::PositiveDimensional));
    }

    #[test]
    fn fermat_partials_have_no_common_zero() {
        let f = make_field(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = ["x0", "x1", "x2", "x3"];
        let q = parse_poly(&f, "x0^4 + x1^4 + x2^4 + x3^4", &v).unwrap();
        let forms: Vec<_> = (0..4).map(|i| q.partial(i)).collect();
        let s = solve_p3(&f, &forms, &mut rng).unwrap();
        assert!(s.points.is_empty() && s.is_complete());
    }
}
