//! Immutable symbolic expressions over jet coordinates, parameters, elementary
//! functions and opaque arbitrary functions.
//!
//! Every constructor returns an expression in automatic-simplified form:
//! sums and products are flattened, rational constants are folded, like terms
//! and equal-base powers are merged, and operands are kept in a canonical
//! order. Structural equality is therefore a (conservative) test of syntactic
//! equivalence. Distribution of products over sums is left to
//! [`crate::simplify::normalize`].

mod build;
mod diff;
pub(crate) mod eval;
mod order;
mod subst;
mod symbol;

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use diff::{total_diff, DiffError};
pub use eval::{EvalError, JetPoint, OpaqueModel};
pub use subst::Bindings;
pub use symbol::{JetVar, Symbol};

pub type Rational = BigRational;

/// Elementary functions of one argument. Logarithms are always of the
/// absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    LnAbs,
    Exp,
    Sin,
    Cos,
    Abs,
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::LnAbs => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "ln" => Func::LnAbs,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

/// Application of an arbitrary (opaque) function, possibly differentiated.
///
/// `index[i]` counts derivatives taken with respect to the i-th argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Opaque {
    pub name: Arc<str>,
    pub args: Vec<Expr>,
    pub index: Vec<u32>,
}

impl Opaque {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn order(&self) -> u32 {
        self.index.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Func(Func, Expr),
    Opaque(Opaque),
}

/// Shared handle to an immutable expression node.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

static ZERO: LazyLock<Expr> = LazyLock::new(|| Expr::from_node(Node::Num(Rational::zero())));
static ONE: LazyLock<Expr> = LazyLock::new(|| Expr::from_node(Node::Num(Rational::one())));

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn zero() -> Expr {
        ZERO.clone()
    }

    pub fn one() -> Expr {
        ONE.clone()
    }

    pub fn num(r: Rational) -> Expr {
        if r.is_zero() {
            Expr::zero()
        } else if r.is_one() {
            Expr::one()
        } else {
            Expr::from_node(Node::Num(r))
        }
    }

    pub fn int(i: i64) -> Expr {
        Expr::num(Rational::from_integer(BigInt::from(i)))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::from_node(Node::Sym(s))
    }

    pub fn jet(v: JetVar) -> Expr {
        Expr::sym(Symbol::Jet(v))
    }

    pub fn param(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    pub fn t() -> Expr {
        Expr::jet(JetVar::T)
    }

    pub fn x() -> Expr {
        Expr::jet(JetVar::X)
    }

    pub fn u() -> Expr {
        Expr::jet(JetVar::U)
    }

    pub fn ux() -> Expr {
        Expr::jet(JetVar::Ux)
    }

    pub fn ut() -> Expr {
        Expr::jet(JetVar::Ut)
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_integer())
    }

    /// True for a rational constant with negative value or a product whose
    /// numeric coefficient is negative.
    pub fn has_negative_coeff(&self) -> bool {
        match self.node() {
            Node::Num(r) => r.is_negative(),
            Node::Mul(fs) => matches!(fs[0].node(), Node::Num(r) if r.is_negative()),
            _ => false,
        }
    }

    /// Immediate operands of this node, in stored order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => Vec::new(),
            Node::Add(xs) | Node::Mul(xs) => xs.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Func(_, a) => vec![a],
            Node::Opaque(o) => o.args.iter().collect(),
        }
    }

    /// Visits every node in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Node::Sym(s) = e.node() {
                out.insert(s.clone());
            }
        });
        out
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.any(&|e| e.as_sym() == Some(s))
    }

    pub fn contains_opaque(&self) -> bool {
        self.any(&|e| matches!(e.node(), Node::Opaque(_)))
    }

    /// Highest jet order among the symbols present (0 when none).
    pub fn jet_order(&self) -> u8 {
        self.free_symbols()
            .iter()
            .filter_map(|s| s.jet())
            .map(JetVar::order)
            .max()
            .unwrap_or(0)
    }

    /// Number of nodes in the tree (shared subtrees counted each time).
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", crate::parser::print_expr(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_expr(self))
    }
}

/// Well-formedness audit: checks the structural invariants every constructor
/// is supposed to establish. Returns a description of the first violation.
pub fn audit(e: &Expr) -> Result<(), String> {
    let mut err = None;
    e.walk(&mut |n| {
        if err.is_some() {
            return;
        }
        match n.node() {
            Node::Num(r) => {
                // BigRational is always reduced; guard the sign convention.
                if r.denom().is_negative() {
                    err = Some(format!("unnormalized rational {r}"));
                }
            }
            Node::Add(xs) => {
                if xs.len() < 2 {
                    err = Some("sum with fewer than two operands".into());
                } else if xs.iter().any(|x| matches!(x.node(), Node::Add(_))) {
                    err = Some("nested sum".into());
                } else if xs.iter().any(Expr::is_zero) {
                    err = Some("zero term in sum".into());
                } else if xs.iter().filter(|x| x.as_num().is_some()).count() > 1 {
                    err = Some("more than one constant term".into());
                }
            }
            Node::Mul(xs) => {
                let consts = xs.iter().filter(|x| x.as_num().is_some()).count();
                if xs.len() < 2 {
                    err = Some("product with fewer than two operands".into());
                } else if xs.iter().any(|x| matches!(x.node(), Node::Mul(_))) {
                    err = Some("nested product".into());
                } else if consts > 1 {
                    err = Some("more than one constant factor".into());
                } else if xs.iter().any(|x| x.is_zero() || x.is_one()) {
                    err = Some("unabsorbed 0 or 1 factor".into());
                } else if consts == 1 && xs[0].as_num().is_none() {
                    err = Some("constant factor not leading".into());
                }
            }
            Node::Pow(_, e) => {
                if e.is_zero() || e.is_one() {
                    err = Some("trivial exponent".into());
                }
            }
            Node::Opaque(o) => {
                if o.args.is_empty() || o.args.len() != o.index.len() {
                    err = Some(format!("opaque {} arity/index mismatch", o.name));
                }
            }
            Node::Sym(_) | Node::Func(..) => {}
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
