//! Exact arithmetic in the finite fields GF(3^k), 1 <= k <= 8.
//!
//! Elements are packed base-3 digit vectors, two bits per digit: digit `i`
//! (the coefficient of `g^i`, where `g` is the class of the indeterminate
//! modulo the table polynomial) occupies bits `2i..2i+2`. Because the packing
//! is monotone in every digit, the integer order of the packed word is the
//! lexicographic order on `(c_{k-1}, ..., c_0)`; this is the canonical
//! enumeration order of a field.
//!
//! Addition and negation work digit-wise through two small global byte
//! tables; multiplication goes through per-context discrete log tables.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported extension degree {0} (expected 1..=8)")]
    UnsupportedDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("GF(3^{src}) is not a subfield of GF(3^{dst})")]
    NotASubfield { src: u32, dst: u32 },
    #[error("cannot parse field literal `{0}`")]
    Parse(String),
}

/// Monic moduli, lowest coefficient first. Degree 2 uses g^2 + 1 so that
/// the generator is a square root of -1; the others are the Conway
/// polynomials for p = 3.
const MODULI: [&[u8]; 8] = [
    &[0, 1],
    &[1, 0, 1],
    &[1, 2, 0, 1],
    &[2, 0, 0, 2, 1],
    &[1, 2, 0, 0, 0, 1],
    &[2, 2, 1, 0, 2, 0, 1],
    &[1, 0, 2, 0, 0, 0, 0, 1],
    &[2, 2, 2, 0, 1, 2, 0, 0, 1],
];

/// An element of some GF(3^k). It carries no reference to its field; all
/// arithmetic goes through a [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Raw packed representation.
    pub fn packed(self) -> u16 {
        self.0
    }

    /// Coefficient of `g^i`.
    pub fn digit(self, i: usize) -> u8 {
        ((self.0 >> (2 * i)) & 3) as u8
    }

    /// Element with the given base-3 digits (lowest first). Digits are
    /// reduced mod 3.
    pub fn from_digits(digits: &[u8]) -> FieldElement {
        let mut w = 0u16;
        for (i, &d) in digits.iter().enumerate() {
            w |= ((d % 3) as u16) << (2 * i);
        }
        FieldElement(w)
    }

    /// Element of the prime field.
    pub fn from_int(n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(3) as u16)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FE({})", format_digits(*self))
    }
}

struct ByteTables {
    add: Vec<u8>,
    neg: [u8; 256],
}

fn byte_tables() -> &'static ByteTables {
    static TABLES: OnceLock<ByteTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let digit = |b: usize, i: usize| (b >> (2 * i)) & 3;
        let mut add = vec![0u8; 1 << 16];
        let mut neg = [0u8; 256];
        for a in 0..256usize {
            if (0..4).any(|i| digit(a, i) == 3) {
                continue;
            }
            let mut n = 0usize;
            for i in 0..4 {
                n |= ((3 - digit(a, i)) % 3) << (2 * i);
            }
            neg[a] = n as u8;
            for b in 0..256usize {
                if (0..4).any(|i| digit(b, i) == 3) {
                    continue;
                }
                let mut s = 0usize;
                for i in 0..4 {
                    s |= ((digit(a, i) + digit(b, i)) % 3) << (2 * i);
                }
                add[(a << 8) | b] = s as u8;
            }
        }
        ByteTables { add, neg }
    })
}

#[inline]
fn packed_add(a: u16, b: u16) -> u16 {
    let t = &byte_tables().add;
    let lo = t[(((a & 0xff) << 8) | (b & 0xff)) as usize] as u16;
    let hi = t[((a & 0xff00) | (b >> 8)) as usize] as u16;
    lo | (hi << 8)
}

#[inline]
fn packed_neg(a: u16) -> u16 {
    let t = &byte_tables().neg;
    (t[(a & 0xff) as usize] as u16) | ((t[(a >> 8) as usize] as u16) << 8)
}

struct Inner {
    k: u32,
    q: u32,
    modulus: Vec<u8>,
    /// Elements in canonical order.
    elems: Vec<FieldElement>,
    /// packed -> ordinal.
    ordinal: Vec<u16>,
    /// packed -> discrete log base `primitive`; unused for zero.
    log: Vec<u16>,
    /// exp[i] = primitive^i for 0 <= i < 2(q-1).
    exp: Vec<FieldElement>,
    primitive: FieldElement,
}

/// A finite field GF(3^k) with a fixed modulus. Cheap to clone; contexts of
/// the same degree built through [`make_field`] share their tables.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(3^{})", self.0.k)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.k == other.0.k
    }
}
impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.degree().hash(state);
    }
}

/// Returns the context for GF(3^k).
pub fn make_field(k: u32) -> Result<FieldCtx, FieldError> {
    static CACHE: OnceLock<Vec<FieldCtx>> = OnceLock::new();
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(FieldError::UnsupportedDegree(k));
    }
    let all = CACHE.get_or_init(|| (1..=MAX_DEGREE).map(build_ctx).collect());
    Ok(all[(k - 1) as usize].clone())
}

/// The largest supported field containing GF(3^k): GF(3^m) with m the
/// largest multiple of k not exceeding the maximal degree.
pub fn work_field(k: u32) -> Result<FieldCtx, FieldError> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(FieldError::UnsupportedDegree(k));
    }
    make_field(MAX_DEGREE / k * k)
}

fn slow_mul(a: FieldElement, b: FieldElement, modulus: &[u8]) -> FieldElement {
    let k = modulus.len() - 1;
    let mut prod = vec![0u8; 2 * k];
    for i in 0..k {
        let ai = a.digit(i);
        if ai == 0 {
            continue;
        }
        for j in 0..k {
            prod[i + j] = (prod[i + j] + ai * b.digit(j)) % 3;
        }
    }
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            prod[d - k + i] = (prod[d - k + i] + 3 * 3 - c * m) % 3;
        }
    }
    FieldElement::from_digits(&prod[..k])
}

/// Trial factorization of a monic polynomial over GF(3) (coefficients
/// lowest first) by all monic polynomials of degree <= deg/2.
pub fn is_irreducible_gf3(poly: &[u8]) -> bool {
    let n = poly.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        for code in 0..3usize.pow(d as u32) {
            let mut div = vec![0u8; d + 1];
            let mut c = code;
            for digit in div.iter_mut().take(d) {
                *digit = (c % 3) as u8;
                c /= 3;
            }
            div[d] = 1;
            let mut r = poly.to_vec();
            for top in (d..=n).rev() {
                let lead = r[top] % 3;
                if lead == 0 {
                    continue;
                }
                for i in 0..=d {
                    r[top - d + i] = (r[top - d + i] + 3 * 3 - lead * div[i]) % 3;
                }
            }
            if r.iter().all(|&x| x % 3 == 0) {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn build_ctx(k: u32) -> FieldCtx {
    let modulus = MODULI[(k - 1) as usize].to_vec();
    assert!(is_irreducible_gf3(&modulus), "table modulus of degree {k} is reducible");
    let q = 3u32.pow(k);
    let elems: Vec<FieldElement> = (0..q)
        .map(|mut n| {
            let mut digits = Vec::with_capacity(k as usize);
            for _ in 0..k {
                digits.push((n % 3) as u8);
                n /= 3;
            }
            FieldElement::from_digits(&digits)
        })
        .collect();
    let mut ordinal = vec![u16::MAX; 1 << 16];
    for (i, e) in elems.iter().enumerate() {
        ordinal[e.0 as usize] = i as u16;
    }
    let order = q - 1;
    let slow_pow = |a: FieldElement, mut e: u32| {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(acc, base, &modulus);
            }
            base = slow_mul(base, base, &modulus);
            e >>= 1;
        }
        acc
    };
    let factors = prime_factors(order);
    let primitive = if k == 1 {
        FieldElement::from_int(2)
    } else {
        *elems[1..]
            .iter()
            .find(|&&a| factors.iter().all(|&p| slow_pow(a, order / p) != FieldElement::ONE))
            .expect("multiplicative group is cyclic")
    };
    let mut exp = Vec::with_capacity(2 * order as usize);
    let mut log = vec![0u16; 1 << 16];
    let mut x = FieldElement::ONE;
    for i in 0..order {
        exp.push(x);
        log[x.0 as usize] = i as u16;
        x = slow_mul(x, primitive, &modulus);
    }
    for i in 0..order as usize {
        exp.push(exp[i]);
    }
    FieldCtx(Arc::new(Inner {
        k,
        q,
        modulus,
        elems,
        ordinal,
        log,
        exp,
        primitive,
    }))
}

impl FieldCtx {
    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Cardinality 3^k.
    pub fn size(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, lowest first (monic).
    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The class of the indeterminate, `g`. For k = 1 this is 0.
    pub fn generator(&self) -> FieldElement {
        if self.0.k == 1 {
            FieldElement::ZERO
        } else {
            FieldElement(1 << 2)
        }
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> FieldElement {
        self.0.primitive
    }

    /// All elements in canonical (lexicographic) order.
    pub fn elements(&self) -> &[FieldElement] {
        &self.0.elems
    }

    pub fn element(&self, ordinal: usize) -> FieldElement {
        self.0.elems[ordinal]
    }

    pub fn ordinal(&self, a: FieldElement) -> usize {
        self.0.ordinal[a.0 as usize] as usize
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        self.0.ordinal[a.0 as usize] != u16::MAX
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(packed_add(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(packed_neg(a.0))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(packed_add(a.0, packed_neg(b.0)))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let l = &self.0.log;
        self.0.exp[l[a.0 as usize] as usize + l[b.0 as usize] as usize]
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let order = (self.0.q - 1) as usize;
        let l = self.0.log[a.0 as usize] as usize;
        Ok(self.0.exp[(order - l) % order])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e for e >= 0; 0^0 = 1.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        self.0.exp[((l * (e % order)) % order) as usize]
    }

    /// a^(3^r).
    pub fn frobenius(&self, a: FieldElement, r: u32) -> FieldElement {
        let r = r % self.0.k;
        self.pow(a, 3u64.pow(r))
    }

    /// Degree d of the smallest subfield GF(3^d) containing `a`.
    pub fn element_degree(&self, a: FieldElement) -> u32 {
        (1..=self.0.k)
            .find(|&d| self.0.k % d == 0 && self.frobenius(a, d) == a)
            .unwrap_or(self.0.k)
    }

    /// Square roots of `a` (empty if `a` is a non-square).
    pub fn sqrt(&self, a: FieldElement) -> Vec<FieldElement> {
        if a.is_zero() {
            return vec![FieldElement::ZERO];
        }
        let l = self.0.log[a.0 as usize] as u32;
        if l % 2 == 1 {
            return vec![];
        }
        let r = self.0.exp[(l / 2) as usize];
        vec![r, self.neg(r)]
    }

    /// Parses a literal such as `2*g^2+g+1`, `-g`, or `2`.
    pub fn parse(&self, s: &str) -> Result<FieldElement, FieldError> {
        parse_literal(self, s)
    }

    pub fn format(&self, a: FieldElement) -> String {
        format_digits(a)
    }
}

fn format_digits(a: FieldElement) -> String {
    let mut terms = Vec::new();
    for i in (0..8).rev() {
        let d = a.digit(i);
        if d == 0 {
            continue;
        }
        let term = match (i, d) {
            (0, d) => d.to_string(),
            (1, 1) => "g".to_string(),
            (1, d) => format!("{d}*g"),
            (i, 1) => format!("g^{i}"),
            (i, d) => format!("{d}*g^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

fn parse_literal(ctx: &FieldCtx, s: &str) -> Result<FieldElement, FieldError> {
    let err = || FieldError::Parse(s.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err());
    }
    let compact = compact.trim_start_matches('(').trim_end_matches(')').to_string();
    let mut acc = FieldElement::ZERO;
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (negative, body) = match rest.as_bytes()[0] {
            b'+' => (false, &rest[1..]),
            b'-' => (true, &rest[1..]),
            _ => (false, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        if term.is_empty() {
            return Err(err());
        }
        let (coef, power) = match term.find('g') {
            None => (term.parse::<i64>().map_err(|_| err())?, 0u32),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| err())? };
                let tail = &term[pos + 1..];
                let e = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^').ok_or_else(err)?.parse::<u32>().map_err(|_| err())?
                };
                (c, e)
            }
        };
        let base = if power == 0 {
            FieldElement::ONE
        } else if ctx.degree() == 1 {
            return Err(err());
        } else {
            ctx.pow(ctx.generator(), power as u64)
        };
        let mut term_val = ctx.mul(FieldElement::from_int(coef), base);
        if negative {
            term_val = ctx.neg(term_val);
        }
        acc = ctx.add(acc, term_val);
    }
    Ok(acc)
}

/// Parses a field literal `3^k` (or `GF(3^k)`, or a bare cardinality).
pub fn parse_field(s: &str) -> Result<FieldCtx, FieldError> {
    let t = s.trim().trim_start_matches("GF(").trim_end_matches(')');
    let k = if let Some(exp) = t.strip_prefix("3^") {
        exp.parse::<u32>().map_err(|_| FieldError::Parse(s.to_string()))?
    } else {
        let n: u32 = t.parse().map_err(|_| FieldError::Parse(s.to_string()))?;
        (1..=MAX_DEGREE)
            .find(|&k| 3u32.pow(k) == n)
            .ok_or_else(|| FieldError::Parse(s.to_string()))?
    };
    make_field(k)
}

/// The ring morphism GF(3^k) -> GF(3^m) sending the source generator to the
/// smallest root (in canonical order) of the source modulus in the target.
#[derive(Clone)]
pub struct Embedding {
    src: FieldCtx,
    dst: FieldCtx,
    image: Vec<FieldElement>,
    preimage: std::collections::HashMap<u16, FieldElement>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.src, self.dst)
    }
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Embedding, FieldError> {
        let (k, m) = (src.degree(), dst.degree());
        if m % k != 0 {
            return Err(FieldError::NotASubfield { src: k, dst: m });
        }
        let modulus = src.modulus();
        let eval = |x: FieldElement| {
            modulus.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
                dst.add(dst.mul(acc, x), FieldElement::from_int(c as i64))
            })
        };
        let root = if k == 1 {
            FieldElement::ZERO
        } else {
            *dst.elements().iter().find(|&&x| eval(x).is_zero()).expect("subfield root exists")
        };
        let image: Vec<FieldElement> = src
            .elements()
            .iter()
            .map(|&a| {
                (0..k as usize).rev().fold(FieldElement::ZERO, |acc, i| {
                    dst.add(dst.mul(acc, root), FieldElement::from_int(a.digit(i) as i64))
                })
            })
            .collect();
        let preimage = src
            .elements()
            .iter()
            .zip(&image)
            .map(|(&a, &b)| (b.0, a))
            .collect();
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            image,
            preimage,
        })
    }

    pub fn source(&self) -> &FieldCtx {
        &self.src
    }

    pub fn target(&self) -> &FieldCtx {
        &self.dst
    }

    pub fn map(&self, a: FieldElement) -> FieldElement {
        self.image[self.src.ordinal(a)]
    }

    /// Inverse image of `b`, if `b` lies in the embedded subfield.
    pub fn preimage(&self, b: FieldElement) -> Option<FieldElement> {
        self.preimage.get(&b.0).copied()
    }
}

/// One-shot embedding of a single element.
pub fn embed(src: &FieldCtx, dst: &FieldCtx, a: FieldElement) -> Result<FieldElement, FieldError> {
    Ok(Embedding::new(src, dst)?.map(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_examples() {
        let f3 = make_field(1).unwrap();
        assert_eq!(f3.size(), 3);
        assert_eq!(f3.modulus(), &[0, 1]);
        let f9 = make_field(2).unwrap();
        assert_eq!(f9.size(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(make_field(9).unwrap_err(), FieldError::UnsupportedDegree(9));
        assert_eq!(make_field(0).unwrap_err(), FieldError::UnsupportedDegree(0));
    }

    #[test]
    fn gf9_arithmetic() {
        let f = make_field(2).unwrap();
        let g = f.generator();
        assert_eq!(f.mul(g, g), f.from_int(2));
        let two_g = f.mul(f.from_int(2), g);
        assert_eq!(f.inv(g).unwrap(), two_g);
        assert_eq!(f.pow(g, 8), f.one());
        assert_eq!(f.frobenius(g, 1), f.neg(g));
        assert_eq!(f.inv(f.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn literals_round_trip() {
        let f = make_field(4).unwrap();
        for &a in f.elements() {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
        }
        let f9 = make_field(2).unwrap();
        assert_eq!(f9.parse("-g").unwrap(), f9.mul(f9.from_int(2), f9.generator()));
        assert_eq!(f9.parse("2*g+1").unwrap(), FieldElement::from_digits(&[1, 2]));
        assert!(f9.parse("g^").is_err());
        assert_eq!(parse_field("3^4").unwrap().size(), 81);
        assert_eq!(parse_field("9").unwrap().degree(), 2);
    }

    #[test]
    fn frobenius_fixes_exactly_prime_field() {
        for k in 1..=4 {
            let f = make_field(k).unwrap();
            let fixed: Vec<_> = f.elements().iter().filter(|&&a| f.frobenius(a, 1) == a).collect();
            assert_eq!(fixed.len(), 3);
            for &a in f.elements() {
                assert_eq!(f.frobenius(a, k), a);
            }
        }
    }

    #[test]
    fn embedding_degree_check_and_prime_field() {
        let f3 = make_field(1).unwrap();
        let f9 = make_field(2).unwrap();
        let f27 = make_field(3).unwrap();
        assert_eq!(embed(&f3, &f9, f3.from_int(2)).unwrap(), f9.from_int(2));
        assert_eq!(
            Embedding::new(&f9, &f27).unwrap_err(),
            FieldError::NotASubfield { src: 2, dst: 3 }
        );
    }

    #[test]
    fn tower_embedding_is_transitive() {
        let f3 = make_field(1).unwrap();
        let f9 = make_field(2).unwrap();
        let f81 = make_field(4).unwrap();
        let a = Embedding::new(&f3, &f9).unwrap();
        let b = Embedding::new(&f9, &f81).unwrap();
        let c = Embedding::new(&f3, &f81).unwrap();
        for &x in f3.elements() {
            assert_eq!(b.map(a.map(x)), c.map(x));
        }
    }
}
