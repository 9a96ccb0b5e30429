use std::collections::BTreeMap;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::order::{base_exp, cmp_factors, cmp_terms, coeff_rest};
use super::{Expr, Func, Node, Opaque, Rational};

const MAX_POW_BITS: u64 = 4096;

impl Expr {
    /// Canonical sum.
    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut push = |t: &Expr, constant: &mut Rational| {
            let (c, rest) = coeff_rest(t);
            if rest.is_one() {
                *constant += c;
            } else {
                *collected.entry(rest).or_insert_with(Rational::zero) += c;
            }
        };
        for t in terms {
            match t.node() {
                Node::Add(xs) => xs.iter().for_each(|x| push(x, &mut constant)),
                _ => push(&t, &mut constant),
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(scale_monomial(c, rest));
        }
        out.sort_by(cmp_terms);
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    /// Canonical product.
    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        mul_depth(factors.into_iter().collect(), 0)
    }

    /// Canonical power.
    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        if base.is_one() {
            return Expr::one();
        }
        if let (Some(b), Some(e)) = (base.as_num(), exp.as_num()) {
            if let Some(r) = rational_pow(b, e) {
                return Expr::num(r);
            }
            return Expr::from_node(Node::Pow(base, exp));
        }
        match base.node() {
            Node::Num(b) if b.is_zero() => {
                if exp.as_num().is_some_and(|e| e.is_positive()) {
                    return Expr::zero();
                }
            }
            Node::Pow(b, e) => {
                if exp.is_integer() || is_positive(b) {
                    return Expr::pow(b.clone(), Expr::mul([e.clone(), exp]));
                }
            }
            Node::Mul(fs) if exp.is_integer() => {
                return Expr::mul(fs.iter().map(|f| Expr::pow(f.clone(), exp.clone())));
            }
            Node::Func(Func::Exp, a) => {
                return Expr::func(Func::Exp, Expr::mul([a.clone(), exp]));
            }
            Node::Func(Func::Abs, a) => {
                if let Some(e) = exp.as_num() {
                    if e.is_integer() && (e.to_integer() % BigInt::from(2)).is_zero() {
                        return Expr::pow(a.clone(), exp);
                    }
                }
            }
            _ => {}
        }
        Expr::from_node(Node::Pow(base, exp))
    }

    /// Elementary function application with light canonicalization.
    pub fn func(f: Func, arg: Expr) -> Expr {
        match f {
            Func::LnAbs => {
                if let Some(r) = arg.as_num() {
                    if r.abs().is_one() {
                        return Expr::zero();
                    }
                    if r.is_negative() {
                        return Expr::func(Func::LnAbs, Expr::num(-r.clone()));
                    }
                }
                match arg.node() {
                    Node::Func(Func::Abs, a) => return Expr::func(Func::LnAbs, a.clone()),
                    Node::Mul(fs) if fs[0].as_num().is_some_and(|c| c.is_negative()) => {
                        return Expr::func(Func::LnAbs, -&arg);
                    }
                    _ => {}
                }
            }
            Func::Exp => {
                if arg.is_zero() {
                    return Expr::one();
                }
            }
            Func::Sin => {
                if arg.is_zero() {
                    return Expr::zero();
                }
                if arg.has_negative_coeff() {
                    return -Expr::func(Func::Sin, -&arg);
                }
            }
            Func::Cos => {
                if arg.is_zero() {
                    return Expr::one();
                }
                if arg.has_negative_coeff() {
                    return Expr::func(Func::Cos, -&arg);
                }
            }
            Func::Abs => match arg.node() {
                Node::Num(r) => return Expr::num(r.abs()),
                Node::Func(Func::Abs | Func::Exp, _) => return arg,
                Node::Mul(fs) if fs[0].as_num().is_some() => {
                    let c = fs[0].as_num().unwrap().abs();
                    let rest = Expr::mul(fs[1..].iter().cloned());
                    return Expr::mul([Expr::num(c), Expr::func(Func::Abs, rest)]);
                }
                Node::Pow(b, e) => {
                    if let Some(n) = e.as_num() {
                        if n.is_integer() && (n.to_integer() % BigInt::from(2)).is_zero() {
                            return arg;
                        }
                        if n.is_integer() {
                            return Expr::pow(Expr::func(Func::Abs, b.clone()), e.clone());
                        }
                    }
                }
                _ => {}
            },
            Func::Sign => match arg.node() {
                Node::Num(r) => return Expr::num(r.signum()),
                Node::Func(Func::Exp, _) => return Expr::one(),
                _ => {}
            },
        }
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn ln_abs(arg: Expr) -> Expr {
        Expr::func(Func::LnAbs, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }

    pub fn abs(arg: Expr) -> Expr {
        Expr::func(Func::Abs, arg)
    }

    /// Application of an opaque function with derivative multi-index.
    ///
    /// # Panics
    /// If `args` is empty or `index` does not have one entry per argument.
    pub fn opaque(name: &str, args: Vec<Expr>, index: Vec<u32>) -> Expr {
        assert!(!args.is_empty(), "opaque function needs an argument");
        assert_eq!(args.len(), index.len(), "derivative index length must equal arity");
        Expr::from_node(Node::Opaque(Opaque {
            name: Arc::from(name),
            args,
            index,
        }))
    }

    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self.clone(), Expr::int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }
}

fn is_positive(e: &Expr) -> bool {
    match e.node() {
        Node::Num(r) => r.is_positive(),
        Node::Func(Func::Abs | Func::Exp, _) => true,
        _ => false,
    }
}

fn scale_monomial(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    let mut fs = vec![Expr::num(c)];
    match rest.node() {
        Node::Mul(xs) => fs.extend(xs.iter().cloned()),
        _ => fs.push(rest),
    }
    Expr::from_node(Node::Mul(fs))
}

fn mul_depth(factors: Vec<Expr>, depth: usize) -> Expr {
    let mut coeff = Rational::one();
    let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();
    let mut push = |f: &Expr, coeff: &mut Rational| match f.node() {
        Node::Num(r) => *coeff *= r,
        Node::Func(Func::Exp, a) => exp_args.push(a.clone()),
        _ => {
            let (b, e) = base_exp(f);
            groups.entry(b).or_default().push(e);
        }
    };
    for f in &factors {
        match f.node() {
            Node::Mul(xs) => xs.iter().for_each(|x| push(x, &mut coeff)),
            _ => push(f, &mut coeff),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    let mut out: Vec<Expr> = Vec::with_capacity(groups.len() + 1);
    for (base, exps) in groups {
        let p = if exps.len() == 1 {
            // Already canonical when it came in as a single factor.
            let e = exps.into_iter().next().unwrap();
            if e.is_one() {
                base
            } else {
                Expr::pow(base, e)
            }
        } else {
            Expr::pow(base, Expr::add(exps))
        };
        out.push(p);
    }
    if !exp_args.is_empty() {
        out.push(Expr::exp(Expr::add(exp_args)));
    }
    // A merge may have produced a constant or a product (e.g. 2^(1/2)*2^(1/2));
    // fold those once more.
    if depth < 8
        && out
            .iter()
            .any(|f| matches!(f.node(), Node::Num(_) | Node::Mul(_)) || f.is_one())
    {
        out.push(Expr::num(coeff));
        return mul_depth(out, depth + 1);
    }
    out.retain(|f| !f.is_one());
    out.sort_by(cmp_factors);
    if !coeff.is_one() {
        out.insert(0, Expr::num(coeff));
    }
    match out.len() {
        0 => Expr::one(),
        1 => out.pop().unwrap(),
        _ => Expr::from_node(Node::Mul(out)),
    }
}

/// Exact power of rationals when the result is rational.
fn rational_pow(b: &Rational, e: &Rational) -> Option<Rational> {
    if b.is_zero() {
        return if e.is_positive() { Some(Rational::zero()) } else { None };
    }
    let n = e.numer().to_i64()?;
    let d = e.denom().to_u32()?;
    let bits = b.numer().bits().max(b.denom().bits()).max(1);
    if (n.unsigned_abs()).saturating_mul(bits) / d as u64 > MAX_POW_BITS {
        return None;
    }
    let root = if d == 1 {
        b.clone()
    } else {
        if b.is_negative() {
            return None;
        }
        let rn = b.numer().nth_root(d);
        let rd = b.denom().nth_root(d);
        if num_traits::pow(rn.clone(), d as usize) != *b.numer()
            || num_traits::pow(rd.clone(), d as usize) != *b.denom()
        {
            return None;
        }
        Rational::new(rn, rd)
    };
    let n32 = i32::try_from(n).ok()?;
    Some(root.pow(n32))
}

fn sum2(a: Expr, b: Expr) -> Expr {
    Expr::add([a, b])
}

fn diff2(a: Expr, b: Expr) -> Expr {
    Expr::add([a, -b])
}

fn prod2(a: Expr, b: Expr) -> Expr {
    Expr::mul([a, b])
}

fn quot2(a: Expr, b: Expr) -> Expr {
    Expr::mul([a, b.recip()])
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self.clone(), rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self.clone(), rhs.clone())
            }
        }
    };
}

binop!(Add, add, sum2);
binop!(Sub, sub, diff2);
binop!(Mul, mul, prod2);
binop!(Div, div, quot2);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self.clone()])
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::audit;

    #[test]
    fn like_terms_collect() {
        let u = Expr::u();
        assert_eq!(&u + &u, Expr::int(2) * u.clone());
        let xu = Expr::x() * Expr::u();
        let ux = Expr::u() * Expr::x();
        assert!((xu - ux).is_zero());
    }

    #[test]
    fn constants_absorbed() {
        let e = Expr::int(0) * Expr::x() + Expr::u();
        assert_eq!(e, Expr::u());
        assert_eq!(Expr::int(1) * Expr::x(), Expr::x());
        assert_eq!(Expr::x() + Expr::zero(), Expr::x());
    }

    #[test]
    fn powers_merge() {
        let t = Expr::t();
        let e = t.powi(-4) * t.clone();
        assert_eq!(e, t.powi(-3));
        assert_eq!(t.powi(2) * t.powi(-2), Expr::one());
    }

    #[test]
    fn nested_power_rules() {
        let x = Expr::x();
        // (x^2)^(1/2) must not collapse to x.
        let e = Expr::pow(x.powi(2), Expr::frac(1, 2));
        assert!(matches!(e.node(), Node::Pow(..)));
        let a = Expr::pow(Expr::abs(x.clone()), Expr::frac(1, 2));
        let sq = Expr::pow(a, Expr::int(2));
        assert_eq!(sq, Expr::abs(x));
    }

    #[test]
    fn exponentials_combine() {
        let kt = Expr::param("k") * Expr::t();
        let e = Expr::exp(kt.clone()) * Expr::exp(-kt);
        assert!(e.is_one());
    }

    #[test]
    fn rational_powers_fold() {
        assert_eq!(Expr::pow(Expr::int(2), Expr::pow(Expr::int(3), Expr::int(2))), Expr::int(512));
        assert_eq!(Expr::pow(Expr::int(4), Expr::frac(1, 2)), Expr::int(2));
        assert_eq!(Expr::pow(Expr::frac(1, 4), Expr::frac(-1, 2)), Expr::int(2));
        let r2 = Expr::pow(Expr::int(2), Expr::frac(1, 2));
        assert!(matches!(r2.node(), Node::Pow(..)));
        assert_eq!(&r2 * &r2, Expr::int(2));
    }

    #[test]
    fn odd_functions_pull_sign() {
        let t = Expr::t();
        assert_eq!(Expr::sin(-&t), -Expr::sin(t.clone()));
        assert_eq!(Expr::cos(-&t), Expr::cos(t));
    }

    #[test]
    fn constructed_values_pass_audit() {
        let x = Expr::x();
        let b = Expr::param("beta");
        let e = (&x - &(&b * &Expr::t())) * Expr::u() + Expr::exp(x.clone()) * Expr::int(3);
        audit(&e).unwrap();
    }
}
