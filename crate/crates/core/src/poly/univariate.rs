//! Dense univariate polynomials over GF(3^k): Euclidean arithmetic,
//! squarefree decomposition with p-th root descent, distinct-degree and
//! equal-degree factorization, root finding and interpolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf3::{FieldCtx, FieldElement};
use crate::linalg::det_in_place;

/// Coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct UPoly {
    c: Vec<FieldElement>,
}

impl UPoly {
    pub fn zero() -> UPoly {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> UPoly {
        UPoly::constant(FieldElement::ONE)
    }

    pub fn x() -> UPoly {
        UPoly::monomial(FieldElement::ONE, 1)
    }

    pub fn constant(a: FieldElement) -> UPoly {
        UPoly::from_coeffs(vec![a])
    }

    pub fn monomial(a: FieldElement, n: usize) -> UPoly {
        let mut c = vec![FieldElement::ZERO; n + 1];
        c[n] = a;
        UPoly::from_coeffs(c)
    }

    /// x - a
    pub fn linear_root(ctx: &FieldCtx, a: FieldElement) -> UPoly {
        UPoly::from_coeffs(vec![ctx.neg(a), FieldElement::ONE])
    }

    pub fn from_coeffs(mut c: Vec<FieldElement>) -> UPoly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.c.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == FieldElement::ONE
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree, with -1 for the zero polynomial folded to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> FieldElement {
        self.c.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn add(&self, ctx: &FieldCtx, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::from_coeffs((0..n).map(|i| ctx.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, ctx: &FieldCtx, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::from_coeffs((0..n).map(|i| ctx.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, ctx: &FieldCtx) -> UPoly {
        UPoly::from_coeffs(self.c.iter().map(|&a| ctx.neg(a)).collect())
    }

    pub fn scale(&self, ctx: &FieldCtx, a: FieldElement) -> UPoly {
        UPoly::from_coeffs(self.c.iter().map(|&x| ctx.mul(x, a)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        UPoly::from_coeffs(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, e: usize) -> UPoly {
        let mut acc = UPoly::one();
        for _ in 0..e {
            acc = acc.mul(ctx, self);
        }
        acc
    }

    pub fn divrem(&self, ctx: &FieldCtx, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let inv = ctx.inv(d.lead()).expect("nonzero lead");
        let mut r = self.c.clone();
        let dn = d.c.len() - 1;
        let mut q = vec![FieldElement::ZERO; r.len() - dn];
        for i in (0..q.len()).rev() {
            let f = ctx.mul(r[i + dn], inv);
            q[i] = f;
            if f.is_zero() {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = ctx.sub(r[i + j], ctx.mul(f, b));
            }
        }
        r.truncate(dn);
        (UPoly::from_coeffs(q), UPoly::from_coeffs(r))
    }

    pub fn rem(&self, ctx: &FieldCtx, d: &UPoly) -> UPoly {
        self.divrem(ctx, d).1
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, ctx: &FieldCtx, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(ctx, d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, ctx: &FieldCtx) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let inv = ctx.inv(self.lead()).expect("nonzero lead");
        self.scale(ctx, inv)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, ctx: &FieldCtx, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(ctx, &b);
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> UPoly {
        UPoly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| ctx.mul(a, FieldElement::from_int(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
        self.c.iter().rev().fold(FieldElement::ZERO, |acc, &a| ctx.add(ctx.mul(acc, x), a))
    }

    /// self^e mod m.
    pub fn pow_mod(&self, ctx: &FieldCtx, mut e: u64, m: &UPoly) -> UPoly {
        let mut base = self.rem(ctx, m);
        let mut acc = UPoly::one().rem(ctx, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base).rem(ctx, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ctx, &base).rem(ctx, m);
            }
        }
        acc
    }

    /// Polynomial in x^(1/3): requires every exponent to be a multiple of 3.
    fn cube_root(&self, ctx: &FieldCtx) -> UPoly {
        let k = ctx.degree();
        UPoly::from_coeffs(
            self.c
                .iter()
                .step_by(3)
                .map(|&a| ctx.frobenius(a, k - 1))
                .collect(),
        )
    }

    /// Applies a field map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(FieldElement) -> FieldElement) -> UPoly {
        UPoly::from_coeffs(self.c.iter().map(|&a| f(a)).collect())
    }

    /// Composition self(other).
    pub fn compose(&self, ctx: &FieldCtx, other: &UPoly) -> UPoly {
        self.c.iter().rev().fold(UPoly::zero(), |acc, &a| acc.mul(ctx, other).add(ctx, &UPoly::constant(a)))
    }
}

/// Squarefree decomposition: monic pairwise coprime squarefree factors with
/// multiplicities, product equal to f up to its leading coefficient.
pub fn squarefree(ctx: &FieldCtx, f: &UPoly) -> Vec<(UPoly, usize)> {
    assert!(!f.is_zero());
    let f = f.monic(ctx);
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let d = f.derivative(ctx);
    let mut c = f.gcd(ctx, &d);
    let mut w = f.div_exact(ctx, &c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(ctx, &c);
        let fac = w.div_exact(ctx, &y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(ctx, &w);
        i += 1;
    }
    if !c.is_one() {
        let root = c.cube_root(ctx);
        for (g, m) in squarefree(ctx, &root) {
            if let Some(e) = out.iter_mut().find(|(h, _)| *h == g) {
                e.1 += 3 * m;
            } else {
                out.push((g, 3 * m));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs
/// (product of all irreducible factors of degree d, d).
pub fn distinct_degree(ctx: &FieldCtx, f: &UPoly) -> Vec<(UPoly, usize)> {
    let q = ctx.size() as u64;
    let mut out = Vec::new();
    let mut rest = f.monic(ctx);
    let x = UPoly::x();
    let mut h = x.rem(ctx, &rest);
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.pow_mod(ctx, q, &rest);
        let g = rest.gcd(ctx, &h.sub(ctx, &x));
        if !g.is_one() {
            rest = rest.div_exact(ctx, &g);
            h = h.rem(ctx, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let n = rest.deg();
        out.push((rest, n));
    }
    out
}

fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha8Rng, n: usize) -> UPoly {
    let q = ctx.size() as usize;
    UPoly::from_coeffs((0..n).map(|_| ctx.element(rng.gen_range(0..q))).collect())
}

/// Equal-degree splitting of a monic squarefree product of irreducibles of
/// degree d (odd characteristic Cantor-Zassenhaus).
pub fn equal_degree(ctx: &FieldCtx, f: &UPoly, d: usize) -> Vec<UPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.monic(ctx)];
    }
    let q = ctx.size() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b33_6c69 ^ n as u64);
    loop {
        let r = random_poly(ctx, &mut rng, n);
        if r.deg() == 0 {
            continue;
        }
        // r^((q^d - 1)/2) = (r^(1 + q + ... + q^(d-1)))^((q - 1)/2)
        let mut s = r.rem(ctx, f);
        let mut acc = s.clone();
        for _ in 1..d {
            s = s.pow_mod(ctx, q, f);
            acc = acc.mul(ctx, &s).rem(ctx, f);
        }
        let t = acc.pow_mod(ctx, (q - 1) / 2, f);
        let g = f.gcd(ctx, &t.sub(ctx, &UPoly::one()));
        if g.deg() > 0 && g.deg() < n {
            let h = f.div_exact(ctx, &g);
            let mut out = equal_degree(ctx, &g, d);
            out.extend(equal_degree(ctx, &h, d));
            out.sort();
            return out;
        }
    }
}

/// Complete factorization: (leading coefficient, monic irreducible factors
/// with multiplicities) sorted by degree, then coefficients.
pub fn factor(ctx: &FieldCtx, f: &UPoly) -> (FieldElement, Vec<(UPoly, usize)>) {
    assert!(!f.is_zero());
    let mut out = Vec::new();
    for (g, m) in squarefree(ctx, f) {
        for (h, d) in distinct_degree(ctx, &g) {
            for p in equal_degree(ctx, &h, d) {
                out.push((p, m));
            }
        }
    }
    out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    (f.lead(), out)
}

/// Roots of f lying in ctx, with multiplicities, plus the irreducible
/// factors of degree > 1 (as (degree, multiplicity) pairs) that carry the
/// remaining roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootSet {
    pub roots: Vec<(FieldElement, usize)>,
    pub residual: Vec<(usize, usize)>,
}

impl RootSet {
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }

    /// Number of distinct roots over the algebraic closure.
    pub fn distinct_closure(&self) -> usize {
        self.roots.len() + self.residual.iter().map(|r| r.0).sum::<usize>()
    }
}

pub fn roots(ctx: &FieldCtx, f: &UPoly) -> RootSet {
    let mut set = RootSet::default();
    if f.deg() == 0 {
        return set;
    }
    let q = ctx.size() as u64;
    for (g, m) in squarefree(ctx, f) {
        let xq = UPoly::x().pow_mod(ctx, q, &g);
        let lin = g.gcd(ctx, &xq.sub(ctx, &UPoly::x()));
        if lin.deg() > 0 {
            for p in equal_degree(ctx, &lin, 1) {
                set.roots.push((ctx.neg(p.coeff(0)), m));
            }
        }
        let rest = g.div_exact(ctx, &lin);
        if rest.deg() > 0 {
            for (h, d) in distinct_degree(ctx, &rest) {
                for _ in 0..h.deg() / d {
                    set.residual.push((d, m));
                }
            }
        }
    }
    set.roots.sort_by_key(|r| ctx.ordinal(r.0));
    set.residual.sort();
    set
}

/// Newton interpolation through (xs[i], ys[i]) with distinct xs.
pub fn interpolate(ctx: &FieldCtx, xs: &[FieldElement], ys: &[FieldElement]) -> UPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = ctx.sub(dd[i], dd[i - 1]);
            let den = ctx.sub(xs[i], xs[i - j]);
            dd[i] = ctx.div(num, den).expect("distinct nodes");
        }
    }
    let mut p = UPoly::zero();
    for i in (0..n).rev() {
        p = p.mul(ctx, &UPoly::linear_root(ctx, xs[i])).add(ctx, &UPoly::constant(dd[i]));
    }
    p
}

/// Determinant of the Sylvester matrix of p (formal degree m = p.len()-1)
/// and q (formal degree n = q.len()-1); coefficients are given lowest
/// first and may have vanishing leading terms. The rows of p come first.
pub fn sylvester_resultant(ctx: &FieldCtx, p: &[FieldElement], q: &[FieldElement]) -> FieldElement {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    if size == 0 {
        return FieldElement::ONE;
    }
    let mut a = vec![FieldElement::ZERO; size * size];
    for i in 0..n {
        for (j, &c) in p.iter().rev().enumerate() {
            a[i * size + i + j] = c;
        }
    }
    for i in 0..m {
        for (j, &c) in q.iter().rev().enumerate() {
            a[(n + i) * size + i + j] = c;
        }
    }
    det_in_place(ctx, &mut a, size)
}

/// Coefficient vector of f padded to formal degree d.
pub fn padded(f: &UPoly, d: usize) -> Vec<FieldElement> {
    assert!(f.c.len() <= d + 1, "formal degree bound violated");
    let mut v = f.c.clone();
    v.resize(d + 1, FieldElement::ZERO);
    v
}

pub fn resultant(ctx: &FieldCtx, p: &UPoly, q: &UPoly) -> FieldElement {
    sylvester_resultant(ctx, &padded(p, p.deg()), &padded(q, q.deg()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;

    fn p(ctx: &FieldCtx, c: &[i64]) -> UPoly {
        UPoly::from_coeffs(c.iter().map(|&x| ctx.from_int(x)).collect())
    }

    #[test]
    fn t_squared_plus_one_splits_in_gf9() {
        let f3 = make_field(1).unwrap();
        let f9 = make_field(2).unwrap();
        let f = p(&f3, &[1, 0, 1]);
        let over3 = roots(&f3, &f);
        assert!(over3.roots.is_empty());
        assert_eq!(over3.residual, vec![(2, 1)]);
        let over9 = roots(&f9, &f);
        let g = f9.generator();
        assert_eq!(over9.roots, {
            let mut v = vec![(g, 1), (f9.neg(g), 1)];
            v.sort_by_key(|r| f9.ordinal(r.0));
            v
        });
    }

    #[test]
    fn eighth_power() {
        let f = make_field(2).unwrap();
        let t8 = UPoly::monomial(f.one(), 8);
        let r = roots(&f, &t8);
        assert_eq!(r.roots, vec![(f.zero(), 8)]);
        assert!(r.is_complete());
    }

    #[test]
    fn squarefree_handles_cubes() {
        let f = make_field(1).unwrap();
        // (x+1)^3 (x-1)^2 x
        let a = p(&f, &[1, 1]).pow(&f, 3);
        let b = p(&f, &[-1, 1]).pow(&f, 2);
        let poly = a.mul(&f, &b).mul(&f, &UPoly::x());
        let sq = squarefree(&f, &poly);
        assert_eq!(sq.len(), 3);
        assert!(sq.contains(&(p(&f, &[1, 1]), 3)));
        assert!(sq.contains(&(p(&f, &[-1, 1]), 2)));
        assert!(sq.contains(&(UPoly::x(), 1)));
    }

    #[test]
    fn factor_reconstructs() {
        let f = make_field(2).unwrap();
        let poly = p(&f, &[2, 1, 0, 1, 1, 0, 2, 1]);
        let (lead, facs) = factor(&f, &poly);
        let mut prod = UPoly::constant(lead);
        for (g, m) in &facs {
            prod = prod.mul(&f, &g.pow(&f, *m));
        }
        assert_eq!(prod, poly);
        let total: usize = facs.iter().map(|(g, m)| g.deg() * m).sum();
        assert_eq!(total, poly.deg());
    }

    #[test]
    fn resultant_examples() {
        let f3 = make_field(1).unwrap();
        assert_eq!(resultant(&f3, &p(&f3, &[-1, 1]), &p(&f3, &[-2, 1])), f3.from_int(2));
        let f9 = make_field(2).unwrap();
        let g = f9.generator();
        let a = p(&f9, &[1, 0, 1]);
        let b = UPoly::linear_root(&f9, g);
        assert_eq!(resultant(&f9, &a, &b), f9.zero());
    }

    #[test]
    fn interpolation_round_trip() {
        let f = make_field(3).unwrap();
        let poly = p(&f, &[1, 2, 0, 1, 2]);
        let xs: Vec<_> = f.elements()[..5].to_vec();
        let ys: Vec<_> = xs.iter().map(|&x| poly.eval(&f, x)).collect();
        assert_eq!(interpolate(&f, &xs, &ys), poly);
    }
}
