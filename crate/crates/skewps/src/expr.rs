//! Expression front end: a small precedence-climbing parser over ring
//! literals, `z`-powers (negative exponents go through the Laurent
//! localization), and `inv(...)`, evaluated into a Laurent element.
//!
//! Precedence: `^` binds tighter than unary `-`, which binds tighter than
//! `*`, which binds tighter than binary `+`/`-`.

use crate::laurent::SkewLaurentSeries;
use crate::ring::{Elem, Ring, RingRef, SeriesExt};
use crate::series::SkewSeries;
use crate::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Ident(String),
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Inv(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer, Error> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, &mut col),
            '+' => {
                toks.push((Tok::Plus, tline, tcol));
                advance(&mut i, &mut col);
            }
            '-' => {
                toks.push((Tok::Minus, tline, tcol));
                advance(&mut i, &mut col);
            }
            '*' => {
                toks.push((Tok::Star, tline, tcol));
                advance(&mut i, &mut col);
            }
            '^' => {
                toks.push((Tok::Caret, tline, tcol));
                advance(&mut i, &mut col);
            }
            '(' => {
                toks.push((Tok::LParen, tline, tcol));
                advance(&mut i, &mut col);
            }
            ')' => {
                toks.push((Tok::RParen, tline, tcol));
                advance(&mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    num.push(chars[i]);
                    advance(&mut i, &mut col);
                }
                let numer: BigInt = num.parse().unwrap();
                // fraction literal p/q
                let mut value = BigRational::from_integer(numer.clone());
                if i < chars.len() && chars[i] == '/' {
                    advance(&mut i, &mut col);
                    let mut den = String::new();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        den.push(chars[i]);
                        advance(&mut i, &mut col);
                    }
                    if den.is_empty() {
                        return Err(Error::Parse {
                            line,
                            col,
                            msg: "expected denominator digits".into(),
                        });
                    }
                    let denom: BigInt = den.parse().unwrap();
                    if denom.is_zero() {
                        return Err(Error::Parse {
                            line: tline,
                            col: tcol,
                            msg: "zero denominator".into(),
                        });
                    }
                    value = BigRational::new(numer, denom);
                }
                toks.push((Tok::Num(value), tline, tcol));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    name.push(chars[i]);
                    advance(&mut i, &mut col);
                }
                toks.push((Tok::Ident(name), tline, tcol));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character '{other}'"),
                });
            }
        }
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        let (line, col) = self.here();
        Error::Parse {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Error> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, Error> {
    let mut lx = lex(text)?;
    let e = parse_sum(&mut lx)?;
    if lx.peek().is_some() {
        return Err(lx.error("unexpected trailing input"));
    }
    Ok(e)
}

fn parse_sum(lx: &mut Lexer) -> Result<Expr, Error> {
    let mut acc = parse_product(lx)?;
    loop {
        match lx.peek() {
            Some(Tok::Plus) => {
                lx.next();
                acc = Expr::Add(Box::new(acc), Box::new(parse_product(lx)?));
            }
            Some(Tok::Minus) => {
                lx.next();
                acc = Expr::Sub(Box::new(acc), Box::new(parse_product(lx)?));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_product(lx: &mut Lexer) -> Result<Expr, Error> {
    let mut acc = parse_factor(lx)?;
    while lx.peek() == Some(&Tok::Star) {
        lx.next();
        acc = Expr::Mul(Box::new(acc), Box::new(parse_factor(lx)?));
    }
    Ok(acc)
}

fn parse_factor(lx: &mut Lexer) -> Result<Expr, Error> {
    if lx.peek() == Some(&Tok::Minus) {
        lx.next();
        return Ok(Expr::Neg(Box::new(parse_factor(lx)?)));
    }
    parse_power(lx)
}

fn parse_power(lx: &mut Lexer) -> Result<Expr, Error> {
    let base = parse_atom(lx)?;
    if lx.peek() == Some(&Tok::Caret) {
        lx.next();
        let negative = if lx.peek() == Some(&Tok::Minus) {
            lx.next();
            true
        } else {
            false
        };
        let Some(Tok::Num(n)) = lx.peek().cloned() else {
            return Err(lx.error("expected integer exponent"));
        };
        lx.next();
        if !n.is_integer() {
            return Err(lx.error("exponent must be an integer"));
        }
        let mag: i64 = n
            .to_integer()
            .try_into()
            .map_err(|_| lx.error("exponent out of range"))?;
        let k = if negative { -mag } else { mag };
        return Ok(Expr::Pow(Box::new(base), k));
    }
    Ok(base)
}

fn parse_atom(lx: &mut Lexer) -> Result<Expr, Error> {
    match lx.peek().cloned() {
        Some(Tok::Num(n)) => {
            lx.next();
            Ok(Expr::Num(n))
        }
        Some(Tok::Ident(name)) => {
            lx.next();
            match name.as_str() {
                "z" => Ok(Expr::Z),
                "inv" => {
                    lx.expect(Tok::LParen, "'(' after inv")?;
                    let inner = parse_sum(lx)?;
                    lx.expect(Tok::RParen, "closing ')'")?;
                    Ok(Expr::Inv(Box::new(inner)))
                }
                _ => Ok(Expr::Ident(name)),
            }
        }
        Some(Tok::LParen) => {
            lx.next();
            let inner = parse_sum(lx)?;
            lx.expect(Tok::RParen, "closing ')'")?;
            Ok(inner)
        }
        _ => Err(lx.error("expected a value")),
    }
}

/// Evaluate over the Laurent localization of the given coefficient ring.
pub fn eval(expr: &Expr, coeff: &RingRef, precision: usize) -> Result<Elem, Error> {
    let l = Ring::laurent(coeff.clone(), SeriesExt::Trivial, precision);
    eval_in(expr, coeff, &l, precision)
}

fn eval_in(
    expr: &Expr,
    coeff: &RingRef,
    l: &RingRef,
    precision: usize,
) -> Result<Elem, Error> {
    match expr {
        Expr::Num(r) => Ok(l.from_rational(r)),
        Expr::Ident(name) => {
            let lit = coeff
                .literal(name)
                .ok_or_else(|| Error::Invalid(format!("unknown literal '{name}'")))?;
            Ok(Elem::Laurent(Box::new(SkewLaurentSeries::from_body(
                0,
                SkewSeries::constant(coeff.clone(), lit, precision),
            ))))
        }
        Expr::Z => Ok(Elem::Laurent(Box::new(SkewLaurentSeries::from_body(
            0,
            SkewSeries::z(coeff.clone(), precision),
        )))),
        Expr::Neg(e) => Ok(l.neg(&eval_in(e, coeff, l, precision)?)),
        Expr::Add(a, b) => Ok(l.add(
            &eval_in(a, coeff, l, precision)?,
            &eval_in(b, coeff, l, precision)?,
        )),
        Expr::Sub(a, b) => Ok(l.sub(
            &eval_in(a, coeff, l, precision)?,
            &eval_in(b, coeff, l, precision)?,
        )),
        Expr::Mul(a, b) => Ok(l.mul(
            &eval_in(a, coeff, l, precision)?,
            &eval_in(b, coeff, l, precision)?,
        )),
        Expr::Pow(base, k) => {
            let b = eval_in(base, coeff, l, precision)?;
            let b = if *k < 0 { invert_elem(l, &b)? } else { b };
            let mut acc = l.one();
            for _ in 0..k.unsigned_abs() {
                acc = l.mul(&acc, &b);
            }
            Ok(acc)
        }
        Expr::Inv(e) => {
            let v = eval_in(e, coeff, l, precision)?;
            invert_elem(l, &v)
        }
    }
}

fn invert_elem(_l: &RingRef, e: &Elem) -> Result<Elem, Error> {
    let Elem::Laurent(x) = e else { unreachable!() };
    Ok(Elem::Laurent(Box::new(x.invert()?)))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(e: &Expr) -> bool {
            matches!(e, Expr::Num(_) | Expr::Ident(_) | Expr::Z | Expr::Inv(_))
        }
        fn factor_like(e: &Expr) -> bool {
            atomic(e) || matches!(e, Expr::Pow(_, _) | Expr::Neg(_))
        }
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, keep: bool) -> fmt::Result {
            if keep {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        }
        match self {
            Expr::Num(r) => write!(f, "{}", crate::field::format_rational(r)),
            Expr::Ident(name) => write!(f, "{name}"),
            Expr::Z => write!(f, "z"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, factor_like(e))
            }
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                wrap(f, b, factor_like(b) | matches!(&**b, Expr::Mul(_, _)))
            }
            Expr::Mul(a, b) => {
                wrap(f, a, factor_like(a) | matches!(&**a, Expr::Mul(_, _)))?;
                write!(f, "*")?;
                wrap(f, b, factor_like(b))
            }
            Expr::Pow(base, k) => {
                wrap(f, base, atomic(base))?;
                write!(f, "^{k}")
            }
            Expr::Inv(e) => write!(f, "inv({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::PolyDeriv;

    fn parse(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn precedence() {
        // ^ over unary -, unary - over *, * over +
        assert_eq!(
            parse("-2^2"),
            Expr::Neg(Box::new(Expr::Pow(
                Box::new(Expr::Num(BigRational::from_integer(2.into()))),
                2
            )))
        );
        assert_eq!(
            parse("t*z + z^2"),
            Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::Ident("t".into())),
                    Box::new(Expr::Z)
                )),
                Box::new(Expr::Pow(Box::new(Expr::Z), 2))
            )
        );
        assert_eq!(
            parse("inv(1 + z*t)"),
            Expr::Inv(Box::new(Expr::Add(
                Box::new(Expr::Num(BigRational::from_integer(1.into()))),
                Box::new(Expr::Mul(Box::new(Expr::Z), Box::new(Expr::Ident("t".into()))))
            )))
        );
        assert!(matches!(parse("z^-1 * t"), Expr::Mul(_, _)));
    }

    #[test]
    fn errors_carry_positions() {
        let Err(Error::Parse { line, col, .. }) = parse_expr("t + ?") else {
            panic!("expected parse error");
        };
        assert_eq!((line, col), (1, 5));
        assert!(parse_expr("t *").is_err());
        assert!(parse_expr("(t").is_err());
        assert!(parse_expr("1/0").is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in [
            "t*z + z^2",
            "inv(1 + z*t)",
            "z^-1*t",
            "-(t + z)*z",
            "1/2*t - (z + t)",
            "t^3*z^2",
        ] {
            let e = parse(s);
            let printed = e.to_string();
            assert_eq!(parse(&printed), e, "roundtrip failed for {s} -> {printed}");
        }
    }

    #[test]
    fn eval_matches_direct_arithmetic() {
        let coeff = Ring::poly(PolyDeriv::Dt);
        let e = parse("t*z + z^2");
        let v = eval(&e, &coeff, 6).unwrap();
        let Elem::Laurent(v) = v else { panic!() };
        // t z = z t + z^2, so the total is z t + 2 z^2
        assert_eq!(
            v.coeff_at(1),
            Elem::Poly(vec![BigRational::zero(), BigRational::from_integer(1.into())])
        );
        assert_eq!(
            v.coeff_at(2),
            Elem::Poly(vec![BigRational::from_integer(2.into())])
        );
    }

    #[test]
    fn eval_laurent_and_inverse() {
        let coeff = Ring::poly(PolyDeriv::Dt);
        let l = Ring::laurent(coeff.clone(), SeriesExt::Trivial, 6);
        let z = eval(&parse("z"), &coeff, 6).unwrap();
        let zi = eval(&parse("z^-1"), &coeff, 6).unwrap();
        assert!(l.eq(&l.mul(&z, &zi), &l.one()));
        let f = eval(&parse("inv(1 + z)"), &coeff, 6).unwrap();
        let g = eval(&parse("1 + z"), &coeff, 6).unwrap();
        assert!(l.eq(&l.mul(&f, &g), &l.one()));
        // inverting a non-unit reports the error
        assert!(matches!(
            eval(&parse("inv(t)"), &coeff, 6),
            Err(Error::NotUnit(_))
        ));
    }
}
