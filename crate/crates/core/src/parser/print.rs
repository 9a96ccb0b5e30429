use num_traits::{One, Signed};

use crate::expr::{Expr, Node, Opaque};
use crate::liealg::VectorField;

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_NEG: u8 = 3;
const P_POW: u8 = 4;
const P_ATOM: u8 = 5;

/// Deterministic single-line rendering that parses back to the same
/// canonical expression.
pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write(e, 0, &mut s);
    s
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(r) => {
            if !r.is_integer() {
                P_MUL
            } else if r.is_negative() {
                P_NEG
            } else {
                P_ATOM
            }
        }
        Node::Sym(_) | Node::Func(..) | Node::Opaque(_) => P_ATOM,
        Node::Add(_) => P_ADD,
        Node::Mul(fs) => {
            if fs[0].as_num().is_some_and(|c| c.is_negative()) {
                P_NEG.min(P_MUL)
            } else {
                P_MUL
            }
        }
        Node::Pow(..) => P_POW,
    }
}

fn write(e: &Expr, min_prec: u8, out: &mut String) {
    if prec(e) < min_prec {
        out.push('(');
        write(e, 0, out);
        out.push(')');
        return;
    }
    match e.node() {
        Node::Num(r) => out.push_str(&r.to_string()),
        Node::Sym(s) => out.push_str(s.name()),
        Node::Add(xs) => {
            for (i, t) in xs.iter().enumerate() {
                if i == 0 {
                    write(t, P_ADD, out);
                } else if t.has_negative_coeff() {
                    out.push_str(" - ");
                    write(&-t, P_MUL, out);
                } else {
                    out.push_str(" + ");
                    write(t, P_ADD, out);
                }
            }
        }
        Node::Mul(fs) => {
            let mut rest: &[Expr] = fs;
            if let Some(c) = fs[0].as_num() {
                rest = &fs[1..];
                if c.is_one() {
                } else if (-c).is_one() {
                    out.push('-');
                } else {
                    out.push_str(&c.to_string());
                    out.push('*');
                }
            }
            for (i, f) in rest.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write(f, P_NEG, out);
            }
        }
        Node::Pow(b, x) => {
            write(b, P_ATOM, out);
            out.push('^');
            let bare = match x.node() {
                Node::Num(r) => r.is_integer() && !r.is_negative(),
                Node::Sym(_) => true,
                _ => false,
            };
            if bare {
                write(x, 0, out);
            } else {
                out.push('(');
                write(x, 0, out);
                out.push(')');
            }
        }
        Node::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write(a, 0, out);
            out.push(')');
        }
        Node::Opaque(o) => write_opaque(o, out),
    }
}

fn write_opaque(o: &Opaque, out: &mut String) {
    out.push_str(&o.name);
    if o.args.len() == 1 {
        for _ in 0..o.index[0] {
            out.push('\'');
        }
    } else if o.index.iter().any(|&k| k > 0) {
        out.push('_');
        for _ in 0..o.index[0] {
            out.push('w');
        }
        for _ in 0..o.index[1] {
            out.push('v');
        }
    }
    out.push('(');
    for (i, a) in o.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write(a, 0, out);
    }
    out.push(')');
}

/// Renders `xi1*d_t + xi2*d_x + eta*d_u`, omitting zero components.
pub fn print_vectorfield(v: &VectorField) -> String {
    let mut out = String::new();
    for (c, d) in [(&v.xi1, "d_t"), (&v.xi2, "d_x"), (&v.eta, "d_u")] {
        if c.is_zero() {
            continue;
        }
        let (neg, mag) = if c.has_negative_coeff() { (true, -c) } else { (false, c.clone()) };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            let mut s = String::new();
            write(&mag, P_NEG, &mut s);
            out.push_str(&s);
            out.push('*');
        }
        out.push_str(d);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_vectorfield};

    #[test]
    fn fixed_point() {
        assert_eq!(print_expr(&parse_expr("x - beta*t").unwrap()), "x - beta*t");
    }

    #[test]
    fn absorbed_zero_product() {
        let e = Expr::int(0) * Expr::x() + Expr::u();
        assert_eq!(print_expr(&e), "u");
    }

    #[test]
    fn derivative_printing() {
        let w = Expr::ux() * Expr::t().powi(2);
        let g1 = Expr::opaque("G", vec![w], vec![1]);
        assert_eq!(print_expr(&g1), "G'(t^2*ux)");
        let g2 = Expr::opaque("G", vec![Expr::t(), Expr::x()], vec![1, 0]);
        assert_eq!(print_expr(&g2), "G_w(t, x)");
    }

    #[test]
    fn awkward_shapes_round_trip() {
        for src in [
            "-(x + u)*t",
            "(3/4)^x",
            "2^(1/2)*x",
            "-3/4*x^(-1/2)",
            "x - (t + u)",
            "(-2)^(1/2)",
            "abs(t)^(1/2)*ln(t)",
            "exp(-k*t/x)*(ux + k*t*u*x^(-2))",
            "((x + 1)^2)^(1/2)",
            "x^(y^2)",
            "-sin(t)",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = print_expr(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn vectorfield_round_trip() {
        for src in ["d_t + beta*d_x", "-t*d_t - x*d_x + u*d_u", "d_u", "(u + t)*d_u", "-2*d_x"] {
            let v = parse_vectorfield(src).unwrap();
            let again = parse_vectorfield(&print_vectorfield(&v)).unwrap();
            assert_eq!(v, again, "{src}");
        }
        assert_eq!(print_vectorfield(&parse_vectorfield("d_t + beta*d_x").unwrap()), "d_t + beta*d_x");
    }
}
