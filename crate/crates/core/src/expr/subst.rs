use std::collections::BTreeMap;

use super::{Expr, Node, Symbol};

pub type Bindings = BTreeMap<Symbol, Expr>;

impl Expr {
    /// Simultaneous (non-iterated) replacement of symbols; the result is
    /// rebuilt through the canonical constructors.
    pub fn substitute(&self, bindings: &Bindings) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        self.subst_rec(bindings)
    }

    pub fn substitute_one(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut b = Bindings::new();
        b.insert(s.clone(), value.clone());
        self.substitute(&b)
    }

    fn subst_rec(&self, b: &Bindings) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => b.get(s).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(xs) => Expr::add(xs.iter().map(|x| x.subst_rec(b))),
            Node::Mul(xs) => Expr::mul(xs.iter().map(|x| x.subst_rec(b))),
            Node::Pow(base, e) => Expr::pow(base.subst_rec(b), e.subst_rec(b)),
            Node::Func(f, a) => Expr::func(*f, a.subst_rec(b)),
            Node::Opaque(o) => Expr::opaque(
                &o.name,
                o.args.iter().map(|a| a.subst_rec(b)).collect(),
                o.index.clone(),
            ),
        }
    }

    /// Rebuilds the tree bottom-up through the constructors.
    pub fn rebuild(&self) -> Expr {
        self.subst_rec(&Bindings::new())
    }
}
