use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Expr, Func, Node, Opaque, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no value bound for symbol `{0}`")]
    MissingBinding(String),
    #[error("no value available for opaque function `{0}`")]
    MissingOpaque(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// How opaque functions are given numeric values.
#[derive(Debug, Clone, Default)]
pub enum OpaqueModel {
    /// Opaque applications are not evaluable.
    #[default]
    Absent,
    /// A fixed value per (name, derivative index), independent of arguments.
    Table(HashMap<(String, Vec<u32>), f64>),
    /// A smooth closed-form test function per name, with exact derivatives:
    /// `sin(a.w + c) + exp(b.w)/2`, coefficients derived from the name and seed.
    Analytic { seed: u64 },
}

/// Values for every symbol of an expression, plus a model for opaque
/// functions.
#[derive(Debug, Clone, Default)]
pub struct JetPoint {
    pub values: HashMap<Symbol, f64>,
    pub opaque: OpaqueModel,
}

impl JetPoint {
    pub fn new() -> JetPoint {
        JetPoint::default()
    }

    pub fn with(mut self, s: Symbol, v: f64) -> JetPoint {
        self.values.insert(s, v);
        self
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.values.insert(s, v);
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }
}

pub(crate) fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn analytic_opaque(o: &Opaque, args: &[f64], seed: u64) -> f64 {
    let mut a = Vec::with_capacity(args.len());
    let mut b = Vec::with_capacity(args.len());
    for i in 0..args.len() {
        let h = fnv1a(format!("{}#{i}", o.name).as_bytes(), seed);
        a.push(0.5 + 0.7 * unit(h));
        b.push(0.2 + 0.3 * unit(h.rotate_left(29)));
    }
    let c = unit(fnv1a(o.name.as_bytes(), seed ^ 0x9e37_79b9));
    let aw: f64 = a.iter().zip(args).map(|(ai, wi)| ai * wi).sum();
    let bw: f64 = b.iter().zip(args).map(|(bi, wi)| bi * wi).sum();
    let order: u32 = o.index.iter().sum();
    let mut pa = 1.0;
    let mut pb = 1.0;
    for (i, &k) in o.index.iter().enumerate() {
        pa *= a[i].powi(k as i32);
        pb *= b[i].powi(k as i32);
    }
    pa * (aw + c + order as f64 * FRAC_PI_2).sin() + 0.5 * pb * bw.exp()
}

fn check(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain(format!("non-finite value in {what}")))
    }
}

impl Expr {
    /// Numeric value at a jet point.
    pub fn eval(&self, p: &JetPoint) -> Result<f64, EvalError> {
        match self.node() {
            Node::Num(r) => r
                .to_f64()
                .ok_or_else(|| EvalError::Domain(format!("constant {r} not representable"))),
            Node::Sym(s) => p
                .get(s)
                .ok_or_else(|| EvalError::MissingBinding(s.name().to_string())),
            Node::Add(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += x.eval(p)?;
                }
                check(acc, "sum")
            }
            Node::Mul(xs) => {
                let mut acc = 1.0;
                for x in xs {
                    acc *= x.eval(p)?;
                }
                check(acc, "product")
            }
            Node::Pow(b, e) => {
                let bv = b.eval(p)?;
                let ev = e.eval(p)?;
                pow_f64(bv, ev)
            }
            Node::Func(f, a) => {
                let v = a.eval(p)?;
                let out = match f {
                    Func::LnAbs => {
                        if v == 0.0 {
                            return Err(EvalError::Domain("ln|0|".into()));
                        }
                        v.abs().ln()
                    }
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Abs => v.abs(),
                    Func::Sign => {
                        if v > 0.0 {
                            1.0
                        } else if v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                };
                check(out, f.name())
            }
            Node::Opaque(o) => {
                let args = o.args.iter().map(|a| a.eval(p)).collect::<Result<Vec<_>, _>>()?;
                match &p.opaque {
                    OpaqueModel::Absent => Err(EvalError::MissingOpaque(o.name.to_string())),
                    OpaqueModel::Table(t) => t
                        .get(&(o.name.to_string(), o.index.clone()))
                        .copied()
                        .ok_or_else(|| EvalError::MissingOpaque(o.name.to_string())),
                    OpaqueModel::Analytic { seed } => check(analytic_opaque(o, &args, *seed), &o.name),
                }
            }
        }
    }
}

fn pow_f64(b: f64, e: f64) -> Result<f64, EvalError> {
    if b == 0.0 && e < 0.0 {
        return Err(EvalError::Domain("division by zero".into()));
    }
    let v = if e.fract() == 0.0 && e.abs() < 1024.0 {
        b.powi(e as i32)
    } else {
        if b < 0.0 {
            return Err(EvalError::Domain(format!("negative base {b} to non-integer power {e}")));
        }
        b.powf(e)
    };
    check(v, "power")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_evaluates_to_zero() {
        assert_eq!(Expr::zero().eval(&JetPoint::new()).unwrap(), 0.0);
    }

    #[test]
    fn linear_invariant() {
        let beta = Symbol::param("beta");
        let e = Expr::x() - Expr::sym(beta.clone()) * Expr::t();
        let p = JetPoint::new().with(Symbol::X, 2.0).with(Symbol::T, 1.0).with(beta, 1.0);
        assert_eq!(e.eval(&p).unwrap(), 1.0);
    }

    #[test]
    fn log_of_absolute_value() {
        let e = Expr::ln_abs(Expr::x());
        let p = JetPoint::new().with(Symbol::X, -std::f64::consts::E);
        assert!((e.eval(&p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = JetPoint::new().with(Symbol::X, 0.0);
        assert!(matches!(Expr::ln_abs(Expr::x()).eval(&p), Err(EvalError::Domain(_))));
        assert!(matches!(Expr::x().recip().eval(&p), Err(EvalError::Domain(_))));
        let q = JetPoint::new().with(Symbol::X, -1.0);
        let sqrt = Expr::pow(Expr::x(), Expr::frac(1, 2));
        assert!(matches!(sqrt.eval(&q), Err(EvalError::Domain(_))));
        assert!(matches!(Expr::u().eval(&q), Err(EvalError::MissingBinding(_))));
    }

    #[test]
    fn analytic_opaque_derivative_is_consistent() {
        let g0 = Expr::opaque("G", vec![Expr::x()], vec![0]);
        let g1 = Expr::opaque("G", vec![Expr::x()], vec![1]);
        let h = 1e-5;
        let at = |v: f64| JetPoint {
            values: [(Symbol::X, v)].into_iter().collect(),
            opaque: OpaqueModel::Analytic { seed: 7 },
        };
        let fd = (g0.eval(&at(0.8 + h)).unwrap() - g0.eval(&at(0.8 - h)).unwrap()) / (2.0 * h);
        assert!((fd - g1.eval(&at(0.8)).unwrap()).abs() < 1e-8);
    }
}
