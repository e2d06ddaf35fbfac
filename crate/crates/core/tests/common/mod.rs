//! Checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use k3lines::gf3::{make_field, Embedding, FieldCtx, FieldElement};
use k3lines::poly::cubic::{recombine, split_ternary_cubic};
use k3lines::poly::multi::MultiPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Field axioms, Frobenius laws and the embedding GF(3^k) -> GF(3^2k) on
/// elements given by ordinals.
pub fn field_laws(k: u32, ia: usize, ib: usize, ic: usize) -> Result<(), String> {
    let f = make_field(k).map_err(|e| e.to_string())?;
    let n = f.size() as usize;
    let (a, b, c) = (f.element(ia % n), f.element(ib % n), f.element(ic % n));
    let (zero, one) = (FieldElement::ZERO, FieldElement::ONE);
    let at = || format!("k={k} a={} b={} c={}", f.format(a), f.format(b), f.format(c));
    ensure(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), || format!("commutativity {}", at()))?;
    ensure(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), || format!("additive associativity {}", at()))?;
    ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || format!("multiplicative associativity {}", at()))?;
    ensure(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), || format!("distributivity {}", at()))?;
    ensure(f.add(a, zero) == a && f.mul(a, one) == a && f.mul(a, zero) == zero, || format!("identities {}", at()))?;
    ensure(f.add(a, f.neg(a)) == zero && f.sub(a, b) == f.add(a, f.neg(b)), || format!("negation {}", at()))?;
    ensure(f.add(f.add(a, a), a) == zero, || format!("characteristic {}", at()))?;
    if !a.is_zero() {
        let inv = f.inv(a).map_err(|e| e.to_string())?;
        ensure(f.mul(a, inv) == one, || format!("inverse {}", at()))?;
    }
    let fr = |x| f.frobenius(x, 1);
    ensure(fr(f.add(a, b)) == f.add(fr(a), fr(b)), || format!("Frobenius additive {}", at()))?;
    ensure(fr(f.mul(a, b)) == f.mul(fr(a), fr(b)), || format!("Frobenius multiplicative {}", at()))?;
    ensure(fr(a) == f.pow(a, 3), || format!("Frobenius is cubing {}", at()))?;
    ensure(f.frobenius(a, k) == a, || format!("Frobenius order divides k {}", at()))?;
    let big = make_field(2 * k).map_err(|e| e.to_string())?;
    let emb = Embedding::new(&f, &big).map_err(|e| e.to_string())?;
    let m = |x| emb.map(x);
    ensure(m(f.add(a, b)) == big.add(m(a), m(b)), || format!("embedding additive {}", at()))?;
    ensure(m(f.mul(a, b)) == big.mul(m(a), m(b)), || format!("embedding multiplicative {}", at()))?;
    ensure(m(one) == one && emb.preimage(m(a)) == Some(a), || format!("embedding injective {}", at()))?;
    ensure(big.frobenius(m(a), 1) == m(fr(a)), || format!("embedding commutes with Frobenius {}", at()))?;
    Ok(())
}

fn cubic_vars() -> Vec<String> {
    ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect()
}

fn random_form(ctx: &FieldCtx, deg: u16, rng: &mut ChaCha8Rng) -> MultiPoly {
    let n = ctx.size() as usize;
    loop {
        let mut terms = Vec::new();
        for i in 0..=deg {
            for j in 0..=deg - i {
                terms.push((vec![i, j, deg - i - j], ctx.element(rng.gen_range(0..n))));
            }
        }
        let p = MultiPoly::from_terms(ctx, cubic_vars(), terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A ternary cubic over GF(3^k) drawn from a mix of shapes: products of
/// linear forms, line times conic, powers of lines, general cubics.
pub fn random_cubic(k: u32, seed: u64) -> MultiPoly {
    let ctx = make_field(k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lin = |rng: &mut ChaCha8Rng| random_form(&ctx, 1, rng);
    loop {
        let c = shaped_cubic(&ctx, &mut rng, lin);
        if !c.is_zero() {
            return c;
        }
    }
}

fn shaped_cubic(ctx: &FieldCtx, rng: &mut ChaCha8Rng, lin: impl Fn(&mut ChaCha8Rng) -> MultiPoly) -> MultiPoly {
    match rng.gen_range(0..6) {
        0 => lin(rng).mul(&lin(rng)).mul(&lin(rng)),
        1 => lin(rng).mul(&random_form(ctx, 2, rng)),
        2 => lin(rng).pow(2).mul(&lin(rng)),
        3 => lin(rng).pow(3),
        4 => {
            // three concurrent lines through a common point
            let a = lin(rng);
            let b = lin(rng);
            let s = ctx.element(rng.gen_range(0..ctx.size() as usize));
            a.mul(&b).mul(&a.add(&b.scale(s)))
        }
        _ => random_form(ctx, 3, rng),
    }
}

/// The product of the reported components equals the cubic up to a scalar,
/// and the multiplicities account for degree 3.
pub fn cubic_reconstructs(c: &MultiPoly) -> Result<(), String> {
    let s = split_ternary_cubic(c).map_err(|e| e.to_string())?;
    if s.unresolved > 0 || !s.tag.is_reducible() {
        return Ok(());
    }
    let deg: u32 = s.components.iter().map(|(f, m)| f.total_degree().unwrap_or(0) * *m as u32).sum();
    ensure(deg == 3, || format!("component degrees sum to {deg} for {c}"))?;
    let w = s.components[0].0.ctx().clone();
    let emb = Embedding::new(c.ctx(), &w).map_err(|e| e.to_string())?;
    let prod = recombine(&s).ok_or("no components")?;
    ensure(prod.proportional(&c.map_field(&emb)), || format!("{:?} components do not multiply back to {c}", s.tag))?;
    ensure(s.tag.line_count() == s.components.iter().filter(|(f, _)| f.total_degree() == Some(1)).map(|(_, m)| m).sum::<usize>(), || {
        format!("{:?} has the wrong number of line components for {c}", s.tag)
    })
}
