use thiserror::Error;

use super::{Expr, Func, JetVar, Node, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("total derivative of an expression of jet order {0}; at most first order is supported")]
    OrderOverflow(u8),
    #[error("total derivative with respect to `{0}`; only t and x are base variables")]
    NotBaseVariable(String),
}

impl Expr {
    /// Partial derivative with respect to `s`, all other symbols held fixed.
    pub fn diff(&self, s: &Symbol) -> Expr {
        if !self.contains_symbol(s) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(y) => {
                if y == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(xs) => Expr::add(xs.iter().map(|x| x.diff(s))),
            Node::Mul(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for (i, f) in xs.iter().enumerate() {
                    let df = f.diff(s);
                    if df.is_zero() {
                        continue;
                    }
                    let mut fs: Vec<Expr> = Vec::with_capacity(xs.len());
                    fs.extend(xs[..i].iter().cloned());
                    fs.push(df);
                    fs.extend(xs[i + 1..].iter().cloned());
                    terms.push(Expr::mul(fs));
                }
                Expr::add(terms)
            }
            Node::Pow(b, e) => {
                let db = b.diff(s);
                if !e.contains_symbol(s) {
                    // d(b^e) = e * b^(e-1) * b'
                    Expr::mul([e.clone(), Expr::pow(b.clone(), e - &Expr::one()), db])
                } else {
                    let de = e.diff(s);
                    let inner = Expr::add([
                        Expr::mul([de, Expr::ln_abs(b.clone())]),
                        Expr::mul([e.clone(), db, b.recip()]),
                    ]);
                    Expr::mul([self.clone(), inner])
                }
            }
            Node::Func(f, a) => {
                let da = a.diff(s);
                let outer = match f {
                    Func::LnAbs => a.recip(),
                    Func::Exp => self.clone(),
                    Func::Sin => Expr::cos(a.clone()),
                    Func::Cos => -Expr::sin(a.clone()),
                    Func::Abs => Expr::func(Func::Sign, a.clone()),
                    Func::Sign => Expr::zero(),
                };
                Expr::mul([outer, da])
            }
            Node::Opaque(o) => {
                let mut terms = Vec::with_capacity(o.args.len());
                for (i, a) in o.args.iter().enumerate() {
                    let da = a.diff(s);
                    if da.is_zero() {
                        continue;
                    }
                    let mut idx = o.index.clone();
                    idx[i] += 1;
                    terms.push(Expr::mul([Expr::opaque(&o.name, o.args.clone(), idx), da]));
                }
                Expr::add(terms)
            }
        }
    }

    pub fn diff_jet(&self, v: JetVar) -> Expr {
        self.diff(&Symbol::Jet(v))
    }

    /// Repeated partial derivative along the listed symbols, left to right.
    pub fn diff_many(&self, syms: &[Symbol]) -> Expr {
        syms.iter().fold(self.clone(), |acc, s| acc.diff(s))
    }
}

/// Total derivative with respect to a base variable on the second-order jet
/// space. The input must be of jet order at most one.
pub fn total_diff(e: &Expr, var: JetVar) -> Result<Expr, DiffError> {
    let order = e.jet_order();
    if order >= 2 {
        return Err(DiffError::OrderOverflow(order));
    }
    let (first, second_ut, second_ux) = match var {
        JetVar::T => (JetVar::Ut, JetVar::Utt, JetVar::Utx),
        JetVar::X => (JetVar::Ux, JetVar::Utx, JetVar::Uxx),
        other => return Err(DiffError::NotBaseVariable(other.name().to_string())),
    };
    Ok(Expr::add([
        e.diff_jet(var),
        Expr::mul([Expr::jet(first), e.diff_jet(JetVar::U)]),
        Expr::mul([Expr::jet(second_ut), e.diff_jet(JetVar::Ut)]),
        Expr::mul([Expr::jet(second_ux), e.diff_jet(JetVar::Ux)]),
    ]))
}
