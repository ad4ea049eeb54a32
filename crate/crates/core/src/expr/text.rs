//! Plain-text prefix serialization.
//!
//! ```text
//! expr     := number | symbol | "(" op expr+ ")"
//! op       := "+" | "*" | "exp" | "ln"
//!           | "^" expr exponent          ; exactly two operands
//! number   := "-"? digits ("/" digits)?  ; exact rational, lowest terms
//! exponent := number | real              ; real contains "." or "e"
//! symbol   := letter (letter | digit | "_")*
//! ```
//!
//! Examples: `(* 4/3 (^ u 1/3))`, `(+ (* 2 t) (* -3 (ln x)))`.
//! Symbols are resolved through a [`JetContext`]: `t x y` are base
//! variables, `u_xx` or `psi_t` are derivative coordinates, unknown names
//! are parameters. Parsing re-runs the normalizing constructors, so
//! `parse(e.to_string()) == e` for every normalized `e`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Exponent, Expr, ExprError, JetContext, Node, Q};

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Q) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_rational(f, c),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Add(cs) | Node::Mul(cs) => {
                let op = if matches!(self.node(), Node::Add(_)) { "+" } else { "*" };
                write!(f, "({op}")?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
            Node::Pow(b, Exponent::Rational(r)) => {
                write!(f, "(^ {b} ")?;
                write_rational(f, r)?;
                write!(f, ")")
            }
            Node::Pow(b, Exponent::Real(r)) => write!(f, "(^ {b} {r:?})"),
            Node::Exp(a) => write!(f, "(exp {a})"),
            Node::Ln(a) => write!(f, "(ln {a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<Token>| {
        if !cur.is_empty() {
            out.push(Token::Atom(std::mem::take(cur)));
        }
    };
    for ch in s.chars() {
        match ch {
            '(' => {
                flush(&mut cur, &mut out);
                out.push(Token::Open);
            }
            ')' => {
                flush(&mut cur, &mut out);
                out.push(Token::Close);
            }
            c if c.is_whitespace() => flush(&mut cur, &mut out),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut out);
    out
}

fn parse_rational(s: &str) -> Option<Q> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Q::new(n, d))
}

fn is_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn parse_exponent(s: &str) -> Result<Exponent, ExprError> {
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        let r: f64 = s.parse().map_err(|_| ExprError::Parse(format!("bad real exponent `{s}`")))?;
        return Ok(Exponent::Real(r));
    }
    parse_rational(s)
        .map(Exponent::Rational)
        .ok_or_else(|| ExprError::Parse(format!("bad exponent `{s}`")))
}

/// Parse the prefix text form.
pub fn parse(s: &str, ctx: &JetContext) -> Result<Expr, ExprError> {
    let tokens = tokenize(s);
    let mut pos = 0;
    let e = parse_expr(&tokens, &mut pos, ctx)?;
    if pos != tokens.len() {
        return Err(ExprError::Parse(format!("trailing input after position {pos}")));
    }
    Ok(e)
}

fn parse_expr(tokens: &[Token], pos: &mut usize, ctx: &JetContext) -> Result<Expr, ExprError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| ExprError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok {
        Token::Close => Err(ExprError::Parse("unexpected `)`".into())),
        Token::Atom(a) => {
            if is_numeric(a) {
                parse_rational(a)
                    .map(Expr::constant)
                    .ok_or_else(|| ExprError::Parse(format!("bad number `{a}`")))
            } else {
                Ok(Expr::symbol(&ctx.resolve(a)?))
            }
        }
        Token::Open => {
            let op = match tokens.get(*pos) {
                Some(Token::Atom(op)) => op.clone(),
                _ => return Err(ExprError::Parse("expected operator after `(`".into())),
            };
            *pos += 1;
            let out = if op == "^" {
                let base = parse_expr(tokens, pos, ctx)?;
                let e = match tokens.get(*pos) {
                    Some(Token::Atom(a)) => parse_exponent(a)?,
                    _ => return Err(ExprError::Parse("expected literal exponent".into())),
                };
                *pos += 1;
                Expr::pow_exponent(base, e)
            } else {
                let mut args = Vec::new();
                while !matches!(tokens.get(*pos), Some(Token::Close) | None) {
                    args.push(parse_expr(tokens, pos, ctx)?);
                }
                if args.is_empty() {
                    return Err(ExprError::Parse(format!("`{op}` needs operands")));
                }
                match op.as_str() {
                    "+" => Expr::sum(args),
                    "*" => Expr::product(args),
                    "exp" | "ln" if args.len() == 1 => {
                        let a = args.pop().unwrap();
                        if op == "exp" {
                            Expr::exp(a)
                        } else {
                            Expr::ln(a)
                        }
                    }
                    _ => return Err(ExprError::Parse(format!("unknown operator `{op}`/{}", args.len()))),
                }
            };
            match tokens.get(*pos) {
                Some(Token::Close) => {
                    *pos += 1;
                    Ok(out)
                }
                _ => Err(ExprError::Parse(format!("missing `)` after `{op}`"))),
            }
        }
    }
}

/// Serde adapter writing an exact rational as its `p/q` literal.
pub mod rational_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Q};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        if q.denom() == &num_bigint::BigInt::from(1) {
            s.serialize_str(&q.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", q.numer(), q.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{q, sym};
    use super::*;

    #[test]
    fn prints_prefix_form() {
        let u: Expr = sym::u().into();
        let e = Expr::rational(4, 3) * Expr::pow(u, q(1, 3));
        assert_eq!(e.to_string(), "(* 4/3 (^ u 1/3))");
    }

    #[test]
    fn parses_and_resolves_symbols() {
        let ctx = JetContext::standard();
        let e = parse("(+ (* 2 x u_x) (* (^ x 2) u_xx))", &ctx).unwrap();
        let x: Expr = sym::x().into();
        assert_eq!(e, Expr::int(2) * &x * Expr::symbol(&sym::u_x()) + Expr::powi(x, 2) * Expr::symbol(&sym::u_xx()));
        let p = parse("(^ psi_xt 3/2)", &ctx).unwrap();
        assert!(p.free_symbols().iter().any(|s| s.name() == "psi_tx"));
    }

    #[test]
    fn rejects_malformed_input() {
        let ctx = JetContext::standard();
        for bad in ["(+ x", "(^ x)", "(foo x)", ")", "(exp x y)", "(^ x 1/0)", "x y", "u_xxxx"] {
            assert!(parse(bad, &ctx).is_err(), "{bad}");
        }
    }

    #[test]
    fn real_exponents_round_trip() {
        let ctx = JetContext::standard();
        let e = Expr::powf(sym::u().into(), 1.25);
        assert_eq!(parse(&e.to_string(), &ctx).unwrap(), e);
    }
}
