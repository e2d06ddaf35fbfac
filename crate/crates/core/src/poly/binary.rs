//! Binary forms f(x, y) = sum c_i x^i y^(d-i) and their roots on P^1.

use crate::gf3::{FieldCtx, FieldElement};
use crate::poly::multi::MultiPoly;
use crate::poly::univariate::{self, RootSet, UPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    pub deg: usize,
    /// c[i] is the coefficient of x^i y^(deg - i).
    pub c: Vec<FieldElement>,
}

/// A point of P^1, normalized to [r : 1] or [1 : 0].
pub type P1 = (FieldElement, FieldElement);

impl BinaryForm {
    pub fn zero(deg: usize) -> BinaryForm {
        BinaryForm {
            deg,
            c: vec![FieldElement::ZERO; deg + 1],
        }
    }

    pub fn new(deg: usize, mut c: Vec<FieldElement>) -> BinaryForm {
        assert!(c.len() <= deg + 1);
        c.resize(deg + 1, FieldElement::ZERO);
        BinaryForm { deg, c }
    }

    /// From a homogeneous polynomial in the two given variables (all other
    /// variables must be absent).
    pub fn from_poly(p: &MultiPoly, x: usize, y: usize, deg: usize) -> BinaryForm {
        let mut f = BinaryForm::zero(deg);
        for (m, &c) in p.terms() {
            assert!(
                m.0.iter().enumerate().all(|(i, &e)| i == x || i == y || e == 0),
                "extra variables in binary form"
            );
            assert_eq!(m.degree() as usize, deg, "inhomogeneous binary form");
            f.c[m.0[x] as usize] = c;
        }
        f
    }

    pub fn to_poly(&self, ctx: &FieldCtx, vars: Vec<String>, x: usize, y: usize) -> MultiPoly {
        let n = vars.len();
        let d = self.deg;
        MultiPoly::from_terms(
            ctx,
            vars,
            self.c.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0u16; n];
                e[x] += i as u16;
                e[y] += (d - i) as u16;
                (e, c)
            }),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    /// f(x, 1).
    pub fn dehomogenize(&self) -> UPoly {
        UPoly::from_coeffs(self.c.clone())
    }

    pub fn from_upoly(p: &UPoly, deg: usize) -> BinaryForm {
        BinaryForm::new(deg, p.coeffs().to_vec())
    }

    /// Multiplicity of the root [1 : 0].
    pub fn infinity_multiplicity(&self) -> usize {
        match self.dehomogenize().degree() {
            None => usize::MAX,
            Some(d) => self.deg - d,
        }
    }

    pub fn eval(&self, ctx: &FieldCtx, p: P1) -> FieldElement {
        let (x, y) = p;
        self.c.iter().enumerate().fold(FieldElement::ZERO, |acc, (i, &c)| {
            ctx.add(acc, ctx.mul(c, ctx.mul(ctx.pow(x, i as u64), ctx.pow(y, (self.deg - i) as u64))))
        })
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &BinaryForm) -> BinaryForm {
        let p = self.dehomogenize().mul(ctx, &o.dehomogenize());
        BinaryForm::from_upoly(&p, self.deg + o.deg)
    }

    pub fn add(&self, ctx: &FieldCtx, o: &BinaryForm) -> BinaryForm {
        assert_eq!(self.deg, o.deg);
        BinaryForm::new(self.deg, self.c.iter().zip(&o.c).map(|(&a, &b)| ctx.add(a, b)).collect())
    }

    pub fn scale(&self, ctx: &FieldCtx, a: FieldElement) -> BinaryForm {
        BinaryForm::new(self.deg, self.c.iter().map(|&x| ctx.mul(x, a)).collect())
    }

    /// Scales so that the coefficient of the highest power of x is 1.
    pub fn normalized(&self, ctx: &FieldCtx) -> BinaryForm {
        match self.c.iter().rev().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(&l) => self.scale(ctx, ctx.inv(l).unwrap()),
        }
    }

    /// Roots on P^1 over ctx with multiplicities; panics on the zero form.
    pub fn roots(&self, ctx: &FieldCtx) -> (Vec<(P1, usize)>, Vec<(usize, usize)>) {
        assert!(!self.is_zero(), "roots of the zero form");
        let u = self.dehomogenize();
        let RootSet { roots, residual } = univariate::roots(ctx, &u);
        let mut out: Vec<(P1, usize)> = roots.into_iter().map(|(r, m)| ((r, FieldElement::ONE), m)).collect();
        let inf = self.deg - u.deg();
        if inf > 0 {
            out.push(((FieldElement::ONE, FieldElement::ZERO), inf));
        }
        (out, residual)
    }
}

/// Normalized greatest common divisor of two binary forms; gcd(f, 0) is f
/// normalized.
pub fn gcd_forms(ctx: &FieldCtx, f: &BinaryForm, g: &BinaryForm) -> BinaryForm {
    if f.is_zero() {
        return g.normalized(ctx);
    }
    if g.is_zero() {
        return f.normalized(ctx);
    }
    let u = f.dehomogenize().gcd(ctx, &g.dehomogenize());
    let inf = f.infinity_multiplicity().min(g.infinity_multiplicity());
    BinaryForm::from_upoly(&u, u.deg() + inf)
}

/// Exact quotient of binary forms.
pub fn div_forms(ctx: &FieldCtx, f: &BinaryForm, g: &BinaryForm) -> BinaryForm {
    let q = f.dehomogenize().div_exact(ctx, &g.dehomogenize());
    BinaryForm::from_upoly(&q, f.deg - g.deg)
}

/// Affine Wronskian of f(x,1), g(x,1): f g' - f' g.
pub fn wronskian(ctx: &FieldCtx, f: &UPoly, g: &UPoly) -> UPoly {
    f.mul(ctx, &g.derivative(ctx)).sub(ctx, &f.derivative(ctx).mul(ctx, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;

    fn bf(ctx: &FieldCtx, deg: usize, c: &[i64]) -> BinaryForm {
        BinaryForm::new(deg, c.iter().map(|&x| ctx.from_int(x)).collect())
    }

    #[test]
    fn gcd_examples() {
        let f = make_field(1).unwrap();
        // x^2 y and x y^2
        let a = bf(&f, 3, &[0, 0, 1, 0]);
        let b = bf(&f, 3, &[0, 1, 0, 0]);
        assert_eq!(gcd_forms(&f, &a, &b), bf(&f, 2, &[0, 1, 0]));
        // y^2 (x + y) and x^3
        let c = bf(&f, 3, &[1, 1, 0, 0]);
        let d = bf(&f, 3, &[0, 0, 0, 1]);
        assert_eq!(gcd_forms(&f, &c, &d), bf(&f, 0, &[1]));
        let e = bf(&f, 2, &[0, 0, 2]);
        assert_eq!(gcd_forms(&f, &e, &BinaryForm::zero(2)), bf(&f, 2, &[0, 0, 1]));
    }

    #[test]
    fn roots_include_infinity() {
        let f = make_field(1).unwrap();
        // x y^2 : roots [0:1] and [1:0] twice
        let a = bf(&f, 3, &[0, 1, 0, 0]);
        let (r, res) = a.roots(&f);
        assert!(res.is_empty());
        assert!(r.contains(&((f.zero(), f.one()), 1)));
        assert!(r.contains(&((f.one(), f.zero()), 2)));
    }
}
