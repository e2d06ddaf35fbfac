//! Splitting type of a plane cubic curve.
//!
//! The classification is read off the singular locus: its dimension, its
//! size over the algebraic closure and, for a single singular point, the
//! tangent cone. Components are returned when they are defined over the
//! field in which the computation runs (the input field, enlarged to the
//! largest supported field containing it).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gf3::{work_field, Embedding, FieldCtx, FieldElement};
use crate::linalg::Matrix;
use crate::poly::binary::BinaryForm;
use crate::poly::multi::MultiPoly;
use crate::poly::PolyError;
use crate::solve::{change_coords, random_element, restrict_to_line, solve_p2, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingTag {
    Smooth,
    IrreducibleNodal,
    IrreducibleCuspidal,
    ConicPlusTransverseLine,
    ConicPlusTangentLine,
    ThreeLinesTriangle,
    ThreeLinesConcurrent,
    DoubleLinePlusLine,
    TripleLine,
}

impl SplittingTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplittingTag::Smooth => "smooth",
            SplittingTag::IrreducibleNodal => "irreducible-nodal",
            SplittingTag::IrreducibleCuspidal => "irreducible-cuspidal",
            SplittingTag::ConicPlusTransverseLine => "conic-plus-transverse-line",
            SplittingTag::ConicPlusTangentLine => "conic-plus-tangent-line",
            SplittingTag::ThreeLinesTriangle => "three-lines-triangle",
            SplittingTag::ThreeLinesConcurrent => "three-lines-concurrent",
            SplittingTag::DoubleLinePlusLine => "double-line-plus-line",
            SplittingTag::TripleLine => "triple-line",
        }
    }

    /// Number of line components counted with multiplicity.
    pub fn line_count(self) -> usize {
        match self {
            SplittingTag::ConicPlusTransverseLine | SplittingTag::ConicPlusTangentLine => 1,
            SplittingTag::ThreeLinesTriangle
            | SplittingTag::ThreeLinesConcurrent
            | SplittingTag::DoubleLinePlusLine
            | SplittingTag::TripleLine => 3,
            _ => 0,
        }
    }

    pub fn is_reducible(self) -> bool {
        !matches!(
            self,
            SplittingTag::Smooth | SplittingTag::IrreducibleNodal | SplittingTag::IrreducibleCuspidal
        )
    }
}

#[derive(Clone, Debug)]
pub struct SplittingType {
    pub tag: SplittingTag,
    /// Irreducible components with multiplicities, over the working field.
    pub components: Vec<(MultiPoly, usize)>,
    /// Singular points defined over the working field (empty when the
    /// singular locus is a curve).
    pub singular_points: Vec<Vec<FieldElement>>,
    /// Singular points or components not defined over the working field.
    pub unresolved: usize,
}

fn line_through(ctx: &FieldCtx, p: &[FieldElement], q: &[FieldElement]) -> [FieldElement; 3] {
    let c = |i: usize, j: usize| ctx.sub(ctx.mul(p[i], q[j]), ctx.mul(p[j], q[i]));
    [c(1, 2), c(2, 0), c(0, 1)]
}

fn linear_form(ctx: &FieldCtx, vars: &[String], l: &[FieldElement]) -> MultiPoly {
    MultiPoly::from_terms(
        ctx,
        vars.to_vec(),
        (0..3).map(|i| {
            let mut e = vec![0u16; 3];
            e[i] = 1;
            (e, l[i])
        }),
    )
    .normalized()
}

fn cube_root(ctx: &FieldCtx, a: FieldElement) -> FieldElement {
    ctx.frobenius(a, ctx.degree() - 1)
}

fn random_point(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    loop {
        let p: Vec<FieldElement> = (0..3).map(|_| random_element(ctx, rng)).collect();
        if p.iter().any(|c| !c.is_zero()) {
            return p;
        }
    }
}

/// Point of multiplicity at least two on a random line, for C = L^2 M.
fn point_on_double_line(ctx: &FieldCtx, c: &MultiPoly, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    loop {
        let p = random_point(ctx, rng);
        let q = random_point(ctx, rng);
        if line_through(ctx, &p, &q).iter().all(|x| x.is_zero()) {
            continue;
        }
        let b = restrict_to_line(ctx, c, &p, &q);
        if b.is_zero() {
            continue;
        }
        let (roots, _) = b.roots(ctx);
        if let Some(((s, u), _)) = roots.into_iter().find(|r| r.1 >= 2) {
            return (0..3).map(|i| ctx.add(ctx.mul(s, p[i]), ctx.mul(u, q[i]))).collect();
        }
    }
}

/// Classifies the plane cubic `c` (a homogeneous cubic in three variables).
pub fn split_ternary_cubic(c: &MultiPoly) -> Result<SplittingType, PolyError> {
    if c.vars().len() != 3 || !c.is_homogeneous() || c.total_degree() != Some(3) {
        return Err(PolyError::NotCubic);
    }
    let wf = work_field(c.ctx().degree()).expect("supported degree");
    let c = if wf == *c.ctx() {
        c.clone()
    } else {
        c.map_field(&Embedding::new(c.ctx(), &wf).expect("subfield"))
    };
    let ctx = &wf;
    let vars = c.vars().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6375_6269);
    let partials: Vec<MultiPoly> = (0..3).map(|i| c.partial(i)).collect();

    if partials.iter().all(|p| p.is_zero()) {
        // only cubes of the variables occur
        let l: Vec<FieldElement> = (0..3)
            .map(|i| {
                let mut e = vec![0u16; 3];
                e[i] = 3;
                cube_root(ctx, c.coeff(&e))
            })
            .collect();
        return Ok(SplittingType {
            tag: SplittingTag::TripleLine,
            components: vec![(linear_form(ctx, &vars, &l), 3)],
            singular_points: Vec::new(),
            unresolved: 0,
        });
    }

    let mut system = vec![c.clone()];
    system.extend(partials.iter().cloned());
    let sing = match solve_p2(ctx, &system, &mut rng) {
        Ok(s) => s,
        Err(SolveError::PositiveDimensional) => {
            let p = point_on_double_line(ctx, &c, &mut rng);
            let q = loop {
                let q = point_on_double_line(ctx, &c, &mut rng);
                if line_through(ctx, &p, &q).iter().any(|x| !x.is_zero()) {
                    break q;
                }
            };
            let l = linear_form(ctx, &vars, &line_through(ctx, &p, &q));
            let m = c.div_exact(&l.mul(&l)).expect("double line divides the cubic").normalized();
            return Ok(SplittingType {
                tag: SplittingTag::DoubleLinePlusLine,
                components: vec![(l, 2), (m, 1)],
                singular_points: Vec::new(),
                unresolved: 0,
            });
        }
        Err(SolveError::FieldTooSmall { needed }) => {
            unreachable!("working field has fewer than {needed} elements")
        }
    };
    let total = sing.points.len() + sing.unresolved;
    let pts = sing.points.clone();
    let mut out = SplittingType {
        tag: SplittingTag::Smooth,
        components: vec![(c.normalized(), 1)],
        singular_points: pts.clone(),
        unresolved: sing.unresolved,
    };
    match total {
        0 => {}
        1 => {
            let p = &pts[0];
            // basis with p as last column
            let mut b = Matrix::zero(3, 3);
            let mut col = 0;
            for e in 0..3 {
                if col == 2 {
                    break;
                }
                let mut m = Matrix::zero(3, 3);
                let mut cand = vec![FieldElement::ZERO; 3];
                cand[e] = FieldElement::ONE;
                for i in 0..3 {
                    for j in 0..col {
                        m.set(i, j, b.get(i, j));
                    }
                    m.set(i, col, cand[i]);
                    m.set(i, 2, p[i]);
                }
                if m.rank(ctx) == col + 2 {
                    for i in 0..3 {
                        b.set(i, col, cand[i]);
                    }
                    col += 1;
                }
            }
            for i in 0..3 {
                b.set(i, 2, p[i]);
            }
            let g = change_coords(&c, &b);
            // g = y2 q(y0, y1) + k(y0, y1)
            let mut q = BinaryForm::zero(2);
            let mut k = BinaryForm::zero(3);
            for (m, &a) in g.terms() {
                match m.0[2] {
                    0 => k.c[m.0[0] as usize] = a,
                    1 => q.c[m.0[0] as usize] = a,
                    _ => unreachable!("singular point has multiplicity at least two"),
                }
            }
            let binv = b.inverse(ctx).expect("invertible");
            let back = |f: &MultiPoly| change_coords(f, &binv).normalized();
            let lin = |x: FieldElement, y: FieldElement| {
                // linear form vanishing at (y0:y1) = (x:y), in y coordinates
                MultiPoly::from_terms(
                    ctx,
                    vars.clone(),
                    [(vec![1, 0, 0], y), (vec![0, 1, 0], ctx.neg(x))],
                )
            };
            if q.is_zero() {
                out.tag = SplittingTag::ThreeLinesConcurrent;
                let (roots, residual) = k.roots(ctx);
                out.unresolved += residual.iter().map(|r| r.0).sum::<usize>();
                out.components = roots.iter().map(|&((x, y), m)| (back(&lin(x, y)), m)).collect();
            } else {
                let h = crate::poly::binary::gcd_forms(ctx, &q, &k);
                if h.deg == 1 {
                    out.tag = SplittingTag::ConicPlusTangentLine;
                    let (roots, _) = h.roots(ctx);
                    let ((x, y), _) = roots[0];
                    let l = back(&lin(x, y));
                    let conic = c.div_exact(&l).expect("line component").normalized();
                    out.components = vec![(conic, 1), (l, 1)];
                } else {
                    let (a0, a1, a2) = (q.c[0], q.c[1], q.c[2]);
                    let disc = ctx.sub(ctx.mul(a1, a1), ctx.mul(a0, a2));
                    out.tag = if disc.is_zero() {
                        SplittingTag::IrreducibleCuspidal
                    } else {
                        SplittingTag::IrreducibleNodal
                    };
                }
            }
        }
        2 => {
            out.tag = SplittingTag::ConicPlusTransverseLine;
            if pts.len() == 2 {
                let l = linear_form(ctx, &vars, &line_through(ctx, &pts[0], &pts[1]));
                let conic = c.div_exact(&l).expect("line component").normalized();
                out.components = vec![(conic, 1), (l, 1)];
            }
        }
        3 => {
            out.tag = SplittingTag::ThreeLinesTriangle;
            if pts.len() == 3 {
                out.components = [(0, 1), (1, 2), (0, 2)]
                    .iter()
                    .map(|&(i, j)| (linear_form(ctx, &vars, &line_through(ctx, &pts[i], &pts[j])), 1))
                    .collect();
            }
        }
        _ => unreachable!("reduced plane cubic with {total} singular points"),
    }
    out.components.sort_by(|a, b| a.0.to_string().cmp(&b.0.to_string()));
    Ok(out)
}

/// Product of the components, for reconstruction checks.
pub fn recombine(s: &SplittingType) -> Option<MultiPoly> {
    let mut it = s.components.iter();
    let (first, m) = it.next()?;
    let mut acc = first.pow(*m as u32);
    for (f, m) in it {
        acc = acc.mul(&f.pow(*m as u32));
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use crate::poly::parse::parse_poly;

    fn tag(s: &str) -> SplittingTag {
        let f = make_field(1).unwrap();
        let c = parse_poly(&f, s, &["x1", "x2", "x3"]).unwrap();
        let out = split_ternary_cubic(&c).unwrap();
        if out.unresolved == 0 && out.tag.is_reducible() {
            let w = out.components[0].0.ctx().clone();
            let emb = Embedding::new(&f, &w).unwrap();
            assert!(recombine(&out).unwrap().proportional(&c.map_field(&emb)), "{s}");
        }
        out.tag
    }

    #[test]
    fn named_examples() {
        assert_eq!(tag("x1*x2*x3"), SplittingTag::ThreeLinesTriangle);
        assert_eq!(tag("x1^2*x2"), SplittingTag::DoubleLinePlusLine);
        assert_eq!(tag("x3*x2^2 + x1^3"), SplittingTag::IrreducibleCuspidal);
        assert_eq!(tag("x1*(x1+x2)*(x1-x2)"), SplittingTag::ThreeLinesConcurrent);
        assert_eq!(tag("(x1+x2+x3)^3"), SplittingTag::TripleLine);
        assert_eq!(tag("x2^2*x3 - x1^3 - x1^2*x3"), SplittingTag::IrreducibleNodal);
        assert_eq!(tag("x2*(x1*x3 - x2^2)"), SplittingTag::ConicPlusTransverseLine);
        assert_eq!(tag("x3*(x1*x3 - x2^2)"), SplittingTag::ConicPlusTangentLine);
        assert_eq!(tag("x2^2*x3 - x1^3 + x1*x3^2"), SplittingTag::Smooth);
    }

    #[test]
    fn rejects_non_cubics() {
        let f = make_field(1).unwrap();
        let c = parse_poly(&f, "x1^2", &["x1", "x2", "x3"]).unwrap();
        assert_eq!(split_ternary_cubic(&c).unwrap_err(), PolyError::NotCubic);
    }
}
