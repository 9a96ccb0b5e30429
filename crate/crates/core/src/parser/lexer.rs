use num_bigint::BigInt;
use num_traits::Zero;

use super::{ParseError, SourceSpan};
use crate::expr::Rational;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn span_at(src: &str, start: usize, end: usize) -> SourceSpan {
    let before = &src[..start];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(start, |i| start - i - 1) + 1;
    SourceSpan {
        start,
        end,
        line,
        column,
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                span: span_at(src, start, i),
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_end = i;
            let mut frac_digits = "";
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let fs = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                frac_digits = &src[fs..i];
            }
            let int_digits = &src[start..int_end];
            if int_digits.is_empty() && frac_digits.is_empty() {
                return Err(ParseError::Syntax {
                    msg: "malformed number".into(),
                    span: span_at(src, start, i),
                });
            }
            let mut value = Rational::zero();
            if !int_digits.is_empty() {
                value = Rational::from_integer(int_digits.parse::<BigInt>().unwrap());
            }
            if !frac_digits.is_empty() {
                let num: BigInt = frac_digits.parse().unwrap();
                let den = num_traits::pow(BigInt::from(10), frac_digits.len());
                value += Rational::new(num, den);
            }
            out.push(Token {
                tok: Tok::Num(value),
                span: span_at(src, start, i),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            while i < bytes.len() && bytes[i] == b'\'' {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: span_at(src, start, i),
            });
            continue;
        }
        let ch = src[i..].chars().next().unwrap();
        return Err(ParseError::Syntax {
            msg: format!("unexpected character {ch:?}"),
            span: span_at(src, start, start + ch.len_utf8()),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span_at(src, src.len(), src.len()),
    });
    Ok(out)
}
