//! Text grammar for polynomials: sums of products of integers, field
//! literals in `g`, variables and parenthesized subexpressions, with `^`
//! for non-negative integer powers. An optional `lhs = rhs` is read as
//! `lhs - rhs`.

use crate::gf3::{FieldCtx, FieldElement};
use crate::poly::multi::MultiPoly;
use crate::poly::PolyError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize, usize)>, PolyError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let mut n: i64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i] as i64 - '0' as i64))
                    .ok_or_else(|| PolyError::Parse { line, col, msg: "integer overflow".into() })?;
                i += 1;
                col += 1;
            }
            out.push((Tok::Num(n), start.0, start.1));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut id = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                id.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(id), start.0, start.1));
        } else if "+-*^()=".contains(c) {
            out.push((Tok::Sym(c), start.0, start.1));
            i += 1;
            col += 1;
        } else {
            return Err(PolyError::Parse {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    ctx: &'a FieldCtx,
    vars: Vec<String>,
    end: (usize, usize),
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        let (line, col) = self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2));
        PolyError::Parse { line, col, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn constant(&self, c: FieldElement) -> MultiPoly {
        MultiPoly::constant(self.ctx, self.vars.clone(), c)
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n <= 64 => {
                    self.pos += 1;
                    Ok(base.pow(n as u32))
                }
                _ => Err(self.err("expected a small non-negative exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.constant(FieldElement::from_int(n)))
            }
            Some(Tok::Ident(id)) => {
                if let Some(i) = self.vars.iter().position(|v| *v == id) {
                    self.pos += 1;
                    Ok(MultiPoly::var(self.ctx, self.vars.clone(), i))
                } else if id == "g" {
                    if self.ctx.degree() == 1 {
                        return Err(self.err("`g` is not available over GF(3)"));
                    }
                    self.pos += 1;
                    Ok(self.constant(self.ctx.generator()))
                } else {
                    Err(self.err(&format!("unknown identifier `{id}`")))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}

/// Parses `s` as a polynomial in the given variables over `ctx`.
pub fn parse_poly(ctx: &FieldCtx, s: &str, vars: &[&str]) -> Result<MultiPoly, PolyError> {
    let toks = lex(s)?;
    let end = s.lines().enumerate().last().map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        vars: vars.iter().map(|v| v.to_string()).collect(),
        end,
    };
    let lhs = p.expr()?;
    let out = if p.eat('=') { lhs.sub(&p.expr()?) } else { lhs };
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses a field element expression (no variables).
pub fn parse_element(ctx: &FieldCtx, s: &str) -> Result<FieldElement, PolyError> {
    let p = parse_poly(ctx, s, &[])?;
    Ok(p.coeff(&[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;

    const X: [&str; 4] = ["x0", "x1", "x2", "x3"];

    #[test]
    fn parses_equations() {
        let f = make_field(1).unwrap();
        let p = parse_poly(&f, "x1^3*x2 - x1*x2^3 + x0^3*x3 - x0*x3^3 = x0^2*x1*x2", &X).unwrap();
        assert_eq!(p.coeff(&[2, 1, 1, 0]), f.from_int(2));
        assert_eq!(p.coeff(&[0, 1, 3, 0]), f.from_int(2));
        assert!(p.is_homogeneous());
        assert_eq!(p.num_terms(), 5);
    }

    #[test]
    fn field_literal_coefficients() {
        let f = make_field(2).unwrap();
        let p = parse_poly(&f, "(2*g+1)*x0^4 + g*x3^4", &X).unwrap();
        assert_eq!(p.coeff(&[4, 0, 0, 0]), f.parse("2*g+1").unwrap());
        assert_eq!(parse_element(&f, "g^2").unwrap(), f.from_int(2));
        let round = parse_poly(&f, &p.to_string(), &X).unwrap();
        assert_eq!(round, p);
    }

    #[test]
    fn reports_positions() {
        let f = make_field(1).unwrap();
        match parse_poly(&f, "x0^4 + y^2", &X) {
            Err(PolyError::Parse { line, col, .. }) => assert_eq!((line, col), (1, 8)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly(&f, "x0^4 + g", &X).is_err());
        assert!(parse_poly(&f, "(x0", &X).is_err());
    }
}
