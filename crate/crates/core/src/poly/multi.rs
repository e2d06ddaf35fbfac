//! Sparse multivariate polynomials over GF(3^k).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::gf3::{Embedding, FieldCtx, FieldElement};
use crate::poly::univariate::UPoly;
use crate::poly::PolyError;

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    ctx: FieldCtx,
    vars: Vec<String>,
    terms: BTreeMap<Mono, FieldElement>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.vars == other.vars && self.terms == other.terms
    }
}
impl Eq for MultiPoly {}

impl std::hash::Hash for MultiPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vars.hash(state);
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl MultiPoly {
    pub fn zero(ctx: &FieldCtx, vars: Vec<String>) -> MultiPoly {
        MultiPoly {
            ctx: ctx.clone(),
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &FieldCtx, vars: Vec<String>, c: FieldElement) -> MultiPoly {
        let n = vars.len();
        let mut p = MultiPoly::zero(ctx, vars);
        p.add_term(Mono(vec![0; n]), c);
        p
    }

    pub fn var(ctx: &FieldCtx, vars: Vec<String>, i: usize) -> MultiPoly {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = MultiPoly::zero(ctx, vars);
        p.add_term(Mono(e), FieldElement::ONE);
        p
    }

    pub fn from_terms(
        ctx: &FieldCtx,
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (Vec<u16>, FieldElement)>,
    ) -> MultiPoly {
        let mut p = MultiPoly::zero(ctx, vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent arity");
            p.add_term(Mono(e), c);
        }
        p
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u16]) -> FieldElement {
        self.terms.get(&Mono(e.to_vec())).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn add_term(&mut self, m: Mono, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let ctx = &self.ctx;
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = ctx.add(*v, c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v] as u32).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    fn check_compat(&self, o: &MultiPoly) {
        assert!(self.ctx == o.ctx, "field mismatch");
        assert_eq!(self.vars, o.vars, "variable list mismatch");
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        self.check_compat(o);
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn neg(&self) -> MultiPoly {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = self.ctx.neg(*c);
        }
        r
    }

    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: FieldElement) -> MultiPoly {
        let mut r = MultiPoly::zero(&self.ctx, self.vars.clone());
        for (m, &c) in &self.terms {
            r.add_term(m.clone(), self.ctx.mul(c, a));
        }
        r
    }

    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        self.check_compat(o);
        let mut r = MultiPoly::zero(&self.ctx, self.vars.clone());
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &o.terms {
                let e: Vec<u16> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                r.add_term(Mono(e), self.ctx.mul(c1, c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(&self.ctx, self.vars.clone(), FieldElement::ONE);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `v`.
    pub fn partial(&self, v: usize) -> MultiPoly {
        let mut r = MultiPoly::zero(&self.ctx, self.vars.clone());
        for (m, &c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut n = m.0.clone();
            n[v] -= 1;
            r.add_term(Mono(n), self.ctx.mul(c, FieldElement::from_int(e as i64)));
        }
        r
    }

    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        let ctx = &self.ctx;
        let mut acc = FieldElement::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = ctx.mul(t, ctx.pow(point[i], e as u64));
                }
            }
            acc = ctx.add(acc, t);
        }
        acc
    }

    /// Re-expresses the polynomial over a larger variable list containing
    /// all current variables.
    pub fn with_vars(&self, vars: &[String]) -> MultiPoly {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("variable missing from target list"))
            .collect();
        let mut r = MultiPoly::zero(&self.ctx, vars.to_vec());
        for (m, &c) in &self.terms {
            let mut e = vec![0u16; vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            r.add_term(Mono(e), c);
        }
        r
    }

    /// Drops variables that do not occur, keeping the order of the rest.
    pub fn trim_vars(&self, keep: &[String]) -> MultiPoly {
        let idx: Vec<usize> = keep.iter().map(|k| self.var_index(k).expect("unknown variable")).collect();
        let mut r = MultiPoly::zero(&self.ctx, keep.to_vec());
        for (m, &c) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                assert!(e == 0 || idx.contains(&i), "dropping a variable that occurs");
            }
            r.add_term(Mono(idx.iter().map(|&i| m.0[i]).collect()), c);
        }
        r
    }

    /// Substitutes polynomials for variables. A bound variable occurring in
    /// one of the targets is rejected; use [`MultiPoly::substitute_simultaneous`]
    /// for simultaneous substitution.
    pub fn substitute(&self, bindings: &[(&str, MultiPoly)]) -> Result<MultiPoly, PolyError> {
        for (name, target) in bindings {
            for (other, _) in bindings {
                if let Some(i) = target.var_index(other) {
                    if target.degree_in(i) > 0 {
                        return Err(PolyError::VariableClash(format!("{other} occurs in the image of {name}")));
                    }
                }
            }
        }
        Ok(self.substitute_simultaneous(bindings))
    }

    pub fn substitute_simultaneous(&self, bindings: &[(&str, MultiPoly)]) -> MultiPoly {
        let mut vars = self.vars.clone();
        for (_, t) in bindings {
            for v in t.vars() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let images: Vec<Option<MultiPoly>> = self
            .vars
            .iter()
            .map(|v| bindings.iter().find(|(n, _)| n == v).map(|(_, t)| t.with_vars(&vars)))
            .collect();
        let one = MultiPoly::constant(&self.ctx, vars.clone(), FieldElement::ONE);
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|_| vec![one.clone()]).collect();
        let mut out = MultiPoly::zero(&self.ctx, vars.clone());
        for (m, &c) in &self.terms {
            let mut term = MultiPoly::zero(&self.ctx, vars.clone());
            let mut e = vec![0u16; vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if images[i].is_none() {
                    e[vars.iter().position(|w| *w == self.vars[i]).unwrap()] += x;
                }
            }
            term.add_term(Mono(e), c);
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(img) = &images[i] {
                    while powers[i].len() <= x as usize {
                        let next = powers[i].last().unwrap().mul(img);
                        powers[i].push(next);
                    }
                    term = term.mul(&powers[i][x as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Coefficients with respect to variable `v`: entry i is the
    /// coefficient of v^i, a polynomial over the same variable list not
    /// involving v.
    pub fn coefficients_in(&self, v: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(&self.ctx, self.vars.clone()); d + 1];
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            let k = e[v] as usize;
            e[v] = 0;
            out[k].add_term(Mono(e), c);
        }
        out
    }

    /// Univariate view: requires all other variables to be absent.
    pub fn to_upoly(&self, v: usize) -> UPoly {
        let d = self.degree_in(v) as usize;
        let mut c = vec![FieldElement::ZERO; d + 1];
        for (m, &x) in &self.terms {
            assert!(m.0.iter().enumerate().all(|(i, &e)| i == v || e == 0), "not univariate");
            c[m.0[v] as usize] = x;
        }
        UPoly::from_coeffs(c)
    }

    pub fn from_upoly(ctx: &FieldCtx, vars: Vec<String>, v: usize, p: &UPoly) -> MultiPoly {
        let n = vars.len();
        MultiPoly::from_terms(
            ctx,
            vars,
            p.coeffs().iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0; n];
                e[v] = i as u16;
                (e, c)
            }),
        )
    }

    pub fn map_field(&self, emb: &Embedding) -> MultiPoly {
        let mut r = MultiPoly::zero(emb.target(), self.vars.clone());
        for (m, &c) in &self.terms {
            r.add_term(m.clone(), emb.map(c));
        }
        r
    }

    /// Pulls the coefficients back along an embedding; None if some
    /// coefficient lies outside the image.
    pub fn pull_back(&self, emb: &Embedding) -> Option<MultiPoly> {
        let mut r = MultiPoly::zero(emb.source(), self.vars.clone());
        for (m, &c) in &self.terms {
            r.add_term(m.clone(), emb.preimage(c)?);
        }
        Some(r)
    }

    /// Applies a field automorphism (or any additive map) coefficientwise.
    pub fn map_coeffs(&self, f: impl Fn(FieldElement) -> FieldElement) -> MultiPoly {
        let mut r = MultiPoly::zero(&self.ctx, self.vars.clone());
        for (m, &c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    /// Divides by the leading coefficient (largest monomial).
    pub fn normalized(&self) -> MultiPoly {
        match self.terms.iter().next_back() {
            None => self.clone(),
            Some((_, &c)) => self.scale(self.ctx.inv(c).expect("nonzero")),
        }
    }

    /// True if the two polynomials differ by a nonzero scalar.
    pub fn proportional(&self, o: &MultiPoly) -> bool {
        self.normalized() == o.normalized()
    }

    /// Exact division by another polynomial (leading-term reduction);
    /// None if it does not divide.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        self.check_compat(d);
        let (lm, &lc) = d.terms.iter().next_back()?;
        let inv = self.ctx.inv(lc).ok()?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.ctx, self.vars.clone());
        while let Some((m, &c)) = rem.terms.iter().next_back() {
            if m.0.iter().zip(&lm.0).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u16> = m.0.iter().zip(&lm.0).map(|(a, b)| a - b).collect();
            let f = self.ctx.mul(c, inv);
            let mut t = MultiPoly::zero(&self.ctx, self.vars.clone());
            t.add_term(Mono(e), f);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        Some(quot)
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion over
/// column subsets (memoized by bitmask).
pub fn symbolic_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    assert!(n > 0 && n <= 20);
    let zero = MultiPoly::zero(m[0][0].ctx(), m[0][0].vars().to_vec());
    let one = MultiPoly::constant(m[0][0].ctx(), m[0][0].vars().to_vec(), FieldElement::ONE);
    // dp over the first r rows: map from used-column mask to partial sum.
    let mut dp: BTreeMap<u32, MultiPoly> = BTreeMap::new();
    dp.insert(0, one);
    for row in m.iter() {
        let mut next: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (&mask, val) in &dp {
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) != 0 || entry.is_zero() {
                    continue;
                }
                // sign: number of used columns after j
                let inversions = (mask >> (j + 1)).count_ones();
                let mut t = val.mul(entry);
                if inversions % 2 == 1 {
                    t = t.neg();
                }
                let slot = next.entry(mask | (1 << j)).or_insert_with(|| zero.clone());
                *slot = slot.add(&t);
            }
        }
        dp = next;
    }
    dp.remove(&((1u32 << n) - 1)).unwrap_or(zero)
}

/// Resultant with respect to variable `v`: determinant of the Sylvester
/// matrix with the rows of `p` on top.
pub fn resultant_in(p: &MultiPoly, q: &MultiPoly, v: usize) -> Result<MultiPoly, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let pc = p.coefficients_in(v);
    let qc = q.coefficients_in(v);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    if m == 0 || n == 0 {
        return Err(PolyError::NotPositiveDegree);
    }
    let zero = MultiPoly::zero(p.ctx(), p.vars().to_vec());
    let size = m + n;
    let mut mat = vec![vec![zero.clone(); size]; size];
    for i in 0..n {
        for (j, c) in pc.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in qc.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    Ok(symbolic_det(&mat))
}

fn fmt_coeff(ctx: &FieldCtx, c: FieldElement) -> String {
    let s = ctx.format(c);
    if s.contains('+') {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if c != FieldElement::ONE || m.degree() == 0 {
                parts.push(fmt_coeff(&self.ctx, c));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(self.vars[i].clone()),
                    _ => parts.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;

    fn xs() -> Vec<String> {
        var_names(&["x0", "x1", "x2", "x3"])
    }

    #[test]
    fn partial_derivatives_in_char_three() {
        let f = make_field(1).unwrap();
        let x1 = MultiPoly::var(&f, xs(), 1);
        let x2 = MultiPoly::var(&f, xs(), 2);
        assert!(x1.pow(3).partial(1).is_zero());
        let p = x1.pow(2).mul(&x2).partial(1);
        assert_eq!(p, x1.mul(&x2).scale(f.from_int(2)));
    }

    #[test]
    fn euler_relation_for_quartics() {
        let f = make_field(2).unwrap();
        let v = xs();
        let q = MultiPoly::from_terms(
            &f,
            v.clone(),
            vec![
                (vec![4, 0, 0, 0], f.one()),
                (vec![1, 1, 1, 1], f.generator()),
                (vec![0, 2, 0, 2], f.from_int(2)),
                (vec![0, 0, 3, 1], f.one()),
            ],
        );
        let mut sum = MultiPoly::zero(&f, v.clone());
        for i in 0..4 {
            sum = sum.add(&MultiPoly::var(&f, v.clone(), i).mul(&q.partial(i)));
        }
        assert_eq!(sum, q);
    }

    #[test]
    fn substitution_of_pencil() {
        let f = make_field(1).unwrap();
        let v = xs();
        let x0 = MultiPoly::var(&f, v.clone(), 0);
        let mut w = v.clone();
        w.push("t".into());
        let tx1 = MultiPoly::var(&f, w.clone(), 4).mul(&MultiPoly::var(&f, w.clone(), 1));
        let r = x0.pow(4).substitute(&[("x0", tx1.clone())]).unwrap();
        assert_eq!(r, tx1.pow(4));
        assert!(r.is_homogeneous());
        let clash = x0.substitute(&[("x0", MultiPoly::var(&f, v.clone(), 0))]);
        assert!(matches!(clash, Err(PolyError::VariableClash(_))));
        let sq = MultiPoly::var(&f, w.clone(), 2).pow(2);
        let r2 = x0.add(&MultiPoly::var(&f, v, 1)).substitute(&[("x0", sq)]).unwrap();
        assert!(!r2.is_homogeneous());
    }

    #[test]
    fn symbolic_resultant_matches_shared_root() {
        let f = make_field(2).unwrap();
        let v = var_names(&["t"]);
        let t = MultiPoly::var(&f, v.clone(), 0);
        let one = MultiPoly::constant(&f, v.clone(), f.one());
        let p = t.pow(2).add(&one);
        let q = t.sub(&MultiPoly::constant(&f, v, f.generator()));
        assert!(resultant_in(&p, &q, 0).unwrap().is_zero());
    }

    #[test]
    fn exact_division() {
        let f = make_field(1).unwrap();
        let v = xs();
        let a = MultiPoly::var(&f, v.clone(), 0).add(&MultiPoly::var(&f, v.clone(), 2));
        let b = MultiPoly::var(&f, v.clone(), 1).sub(&MultiPoly::var(&f, v.clone(), 3));
        let p = a.mul(&b).mul(&a);
        assert_eq!(p.div_exact(&a).unwrap(), a.mul(&b));
        assert!(p.div_exact(&MultiPoly::var(&f, v, 3)).is_none());
    }
}
