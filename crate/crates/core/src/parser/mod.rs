//! Text grammar for expressions and vector fields, and the matching printer.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
//! associative). Juxtaposition is not multiplication. `ln(e)` always denotes
//! `ln|e|`. Opaque functions are identifiers starting with an upper-case
//! letter; derivatives are written `G'(w)`, `G''(w)` for one argument and
//! `G_w(w, v)`, `G_wv(w, v)` for two.

mod lexer;
mod print;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, Func, Rational, Symbol};
use crate::liealg::VectorField;
use lexer::{tokenize, Tok, Token};

pub use print::{print_expr, print_vectorfield};

/// Location of a token in the source text. Offsets are bytes; line and
/// column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {msg}")]
    Syntax { msg: String, span: SourceSpan },
    #[error("arity error at {span}: `{name}` expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        span: SourceSpan,
    },
    #[error("unknown direction `{name}` at {span}; expected d_t, d_x or d_u")]
    UnknownDirection { name: String, span: SourceSpan },
    #[error("not a vector field: {msg}")]
    NotVectorField { msg: String, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::Arity { span, .. }
            | ParseError::UnknownDirection { span, .. }
            | ParseError::NotVectorField { span, .. } => *span,
        }
    }
}

/// Declared arities for opaque functions; names not listed take the arity of
/// their first use.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub opaque_arity: HashMap<String, usize>,
}

impl ParseOptions {
    pub fn with_arity(name: &str, arity: usize) -> ParseOptions {
        let mut o = ParseOptions::default();
        o.opaque_arity.insert(name.to_string(), arity);
        o
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with(text, &ParseOptions::default())
}

pub fn parse_expr_with(text: &str, opts: &ParseOptions) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, opts, false)?;
    let e = p.expr(0)?;
    p.expect_eof()?;
    Ok(e)
}

pub const DIR_T: &str = "d_t";
pub const DIR_X: &str = "d_x";
pub const DIR_U: &str = "d_u";

/// Parses `xi1*d_t + xi2*d_x + eta*d_u` (any arrangement that is linear in the
/// direction symbols).
pub fn parse_vectorfield(text: &str) -> Result<VectorField, ParseError> {
    parse_vectorfield_with(text, &ParseOptions::default())
}

pub fn parse_vectorfield_with(text: &str, opts: &ParseOptions) -> Result<VectorField, ParseError> {
    let mut p = Parser::new(text, opts, true)?;
    let e = p.expr(0)?;
    p.expect_eof()?;
    let whole = SourceSpan {
        start: 0,
        end: text.len(),
        line: 1,
        column: 1,
    };
    let dirs = [DIR_T, DIR_X, DIR_U].map(Symbol::param);
    let e = crate::simplify::normalize(&e);
    let coeffs: Vec<Expr> = dirs.iter().map(|d| e.diff(d)).collect();
    for c in &coeffs {
        if dirs.iter().any(|d| c.contains_symbol(d)) {
            return Err(ParseError::NotVectorField {
                msg: "coefficients must not depend on direction symbols".into(),
                span: whole,
            });
        }
    }
    let rebuilt = Expr::add(
        coeffs
            .iter()
            .zip(&dirs)
            .map(|(c, d)| c * &Expr::sym(d.clone())),
    );
    if !crate::simplify::normalize(&(&e - &rebuilt)).is_zero() {
        return Err(ParseError::NotVectorField {
            msg: "term without a direction symbol".into(),
            span: whole,
        });
    }
    let [xi1, xi2, eta]: [Expr; 3] = coeffs.try_into().unwrap();
    Ok(VectorField::new(xi1, xi2, eta))
}

// Binding powers.
const BP_ADD: u8 = 10;
const BP_MUL: u8 = 20;
const BP_NEG: u8 = 30;
const BP_POW_L: u8 = 41;
const BP_POW_R: u8 = 40;

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    opts: &'a ParseOptions,
    seen_arity: HashMap<String, usize>,
    vector_mode: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, opts: &'a ParseOptions, vector_mode: bool) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            opts,
            seen_arity: HashMap::new(),
            vector_mode,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>, span: SourceSpan) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            msg: msg.into(),
            span,
        })
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        let t = self.peek();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            self.syntax(format!("unexpected trailing input {:?}", t.tok), t.span)
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            self.syntax(format!("expected {what}"), t.span)
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let t = self.bump();
        let mut lhs = match t.tok {
            Tok::Num(r) => Expr::num(r),
            Tok::Minus => -self.expr(BP_NEG)?,
            Tok::Plus => self.expr(BP_NEG)?,
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                e
            }
            Tok::Ident(name) => self.ident(name, t.span)?,
            Tok::Eof => return self.syntax("unexpected end of input", t.span),
            other => return self.syntax(format!("unexpected token {other:?}"), t.span),
        };
        loop {
            let (l_bp, r_bp) = match self.peek().tok {
                Tok::Plus | Tok::Minus => (BP_ADD, BP_ADD + 1),
                Tok::Star | Tok::Slash => (BP_MUL, BP_MUL + 1),
                Tok::Caret => (BP_POW_L, BP_POW_R),
                Tok::RParen | Tok::Comma | Tok::Eof => break,
                ref other => {
                    let span = self.peek().span;
                    return self.syntax(
                        format!("expected an operator, found {other:?} (juxtaposition is not multiplication)"),
                        span,
                    );
                }
            };
            if l_bp < min_bp {
                break;
            }
            let op = self.bump().tok;
            let rhs = self.expr(r_bp)?;
            lhs = match op {
                Tok::Plus => lhs + rhs,
                Tok::Minus => lhs - rhs,
                Tok::Star => lhs * rhs,
                Tok::Slash => lhs / rhs,
                Tok::Caret => Expr::pow(lhs, rhs),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expr(0)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.expr(0)?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn ident(&mut self, name: String, span: SourceSpan) -> Result<Expr, ParseError> {
        let is_call = self.peek().tok == Tok::LParen;
        let first_upper = name.starts_with(|c: char| c.is_ascii_uppercase());
        if is_call && first_upper {
            return self.opaque_call(&name, span);
        }
        if name.contains('\'') {
            return self.syntax(format!("primes are only allowed on opaque functions: `{name}`"), span);
        }
        if is_call {
            let args = self.args()?;
            if args.len() != 1 {
                return Err(ParseError::Arity {
                    name,
                    expected: 1,
                    found: args.len(),
                    span,
                });
            }
            let a = args.into_iter().next().unwrap();
            if name == "sqrt" {
                return Ok(Expr::pow(a, Expr::frac(1, 2)));
            }
            return match Func::from_name(&name) {
                Some(f) => Ok(Expr::func(f, a)),
                None => self.syntax(format!("unknown function `{name}`"), span),
            };
        }
        if let Some(dir) = name.strip_prefix("d_") {
            if !self.vector_mode {
                return self.syntax(format!("direction `{name}` is only valid in a vector field"), span);
            }
            if !matches!(dir, "t" | "x" | "u") {
                return Err(ParseError::UnknownDirection { name, span });
            }
            return Ok(Expr::param(&name));
        }
        if Func::from_name(&name).is_some() || name == "sqrt" {
            return self.syntax(format!("function `{name}` needs an argument list"), span);
        }
        if first_upper {
            return self.syntax(format!("opaque function `{name}` needs an argument list"), span);
        }
        Ok(Expr::sym(Symbol::new(&name)))
    }

    fn opaque_call(&mut self, raw: &str, span: SourceSpan) -> Result<Expr, ParseError> {
        let primes = raw.chars().rev().take_while(|&c| c == '\'').count();
        let stem = &raw[..raw.len() - primes];
        let (base, suffix) = match stem.split_once('_') {
            Some((b, s)) => (b, Some(s)),
            None => (stem, None),
        };
        if primes > 0 && suffix.is_some() {
            return self.syntax(format!("mixed derivative notation in `{raw}`"), span);
        }
        if base.is_empty() || !base.chars().all(|c| c.is_ascii_alphanumeric()) {
            return self.syntax(format!("malformed opaque function name `{raw}`"), span);
        }
        let args = self.args()?;
        let arity = args.len();
        if arity > 2 {
            return Err(ParseError::Arity {
                name: base.to_string(),
                expected: 2,
                found: arity,
                span,
            });
        }
        let expected = self
            .opts
            .opaque_arity
            .get(base)
            .or_else(|| self.seen_arity.get(base))
            .copied();
        if let Some(exp) = expected {
            if exp != arity {
                return Err(ParseError::Arity {
                    name: base.to_string(),
                    expected: exp,
                    found: arity,
                    span,
                });
            }
        }
        self.seen_arity.insert(base.to_string(), arity);
        let index = if primes > 0 {
            if arity != 1 {
                return Err(ParseError::Arity {
                    name: base.to_string(),
                    expected: 1,
                    found: arity,
                    span,
                });
            }
            vec![primes as u32]
        } else if let Some(s) = suffix {
            if arity != 2 {
                return Err(ParseError::Arity {
                    name: base.to_string(),
                    expected: 2,
                    found: arity,
                    span,
                });
            }
            if s.is_empty() || !s.chars().all(|c| c == 'w' || c == 'v') {
                return self.syntax(format!("derivative suffix must use w and v: `{raw}`"), span);
            }
            vec![
                s.chars().filter(|&c| c == 'w').count() as u32,
                s.chars().filter(|&c| c == 'v').count() as u32,
            ]
        } else {
            vec![0; arity]
        };
        Ok(Expr::opaque(base, args, index))
    }
}

/// Exact rational from a decimal or fraction literal such as `3/4` or `-0.5`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let e = parse_expr(text)?;
    e.as_num().cloned().ok_or_else(|| ParseError::Syntax {
        msg: format!("`{text}` is not a rational constant"),
        span: SourceSpan {
            start: 0,
            end: text.len(),
            line: 1,
            column: 1,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(arg: Expr) -> Expr {
        Expr::opaque("G", vec![arg], vec![0])
    }

    #[test]
    fn transcribed_rhs() {
        let e = parse_expr("-u^(-1)*ux^2 + u*G(x - beta*t)").unwrap();
        let beta = Expr::param("beta");
        let want = -(Expr::u().recip() * Expr::ux().powi(2)) + Expr::u() * g(Expr::x() - beta * Expr::t());
        assert_eq!(e, want);
    }

    #[test]
    fn zero_literal() {
        assert!(parse_expr("0").unwrap().is_zero());
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(parse_expr("2^3^2").unwrap(), Expr::int(512));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse_expr("-x^2").unwrap(), -Expr::x().powi(2));
        assert_eq!(parse_expr("x^-2*u").unwrap(), Expr::x().powi(-2) * Expr::u());
    }

    #[test]
    fn juxtaposition_rejected() {
        let err = parse_expr("2 x").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert_eq!(err.span().start, 2);
    }

    #[test]
    fn opaque_arity_checked() {
        let opts = ParseOptions::with_arity("G", 1);
        let err = parse_expr_with("G(x, u)", &opts).unwrap_err();
        assert!(matches!(err, ParseError::Arity { expected: 1, found: 2, .. }));
        let err = parse_expr("G(x) + G(x, u)").unwrap_err();
        assert!(matches!(err, ParseError::Arity { .. }));
    }

    #[test]
    fn derivative_notation() {
        let e = parse_expr("G''(u)").unwrap();
        assert_eq!(e, Expr::opaque("G", vec![Expr::u()], vec![2]));
        let e = parse_expr("G_wvv(t, x)").unwrap();
        assert_eq!(e, Expr::opaque("G", vec![Expr::t(), Expr::x()], vec![1, 2]));
    }

    #[test]
    fn sqrt_is_plain_half_power() {
        assert_eq!(parse_expr("sqrt(t)").unwrap(), Expr::pow(Expr::t(), Expr::frac(1, 2)));
    }

    #[test]
    fn vectorfield_components() {
        let v = parse_vectorfield("d_t + beta*d_x").unwrap();
        assert!(v.xi1.is_one());
        assert_eq!(v.xi2, Expr::param("beta"));
        assert!(v.eta.is_zero());
        let v = parse_vectorfield("u*d_u").unwrap();
        assert!(v.xi1.is_zero() && v.xi2.is_zero());
        assert_eq!(v.eta, Expr::u());
        let v = parse_vectorfield("d_u").unwrap();
        assert!(v.eta.is_one());
        let v = parse_vectorfield("2*(t*d_t + x*d_x) + (u + t)*d_u").unwrap();
        assert_eq!(v.xi1, Expr::int(2) * Expr::t());
        assert_eq!(v.eta, Expr::u() + Expr::t());
    }

    #[test]
    fn vectorfield_errors() {
        assert!(matches!(parse_vectorfield("d_y"), Err(ParseError::UnknownDirection { .. })));
        assert!(matches!(parse_vectorfield("d_t + 1"), Err(ParseError::NotVectorField { .. })));
        assert!(matches!(parse_vectorfield("d_t*d_x"), Err(ParseError::NotVectorField { .. })));
        assert!(matches!(parse_expr("d_t"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn error_spans_inside_input() {
        for src in ["x +", "(x", "x $ y", "foo(x)", "G'(x, y)", "x )"] {
            let err = parse_expr(src).unwrap_err();
            let sp = err.span();
            assert!(sp.start <= sp.end && sp.end <= src.len(), "{src}: {sp:?}");
        }
    }
}
