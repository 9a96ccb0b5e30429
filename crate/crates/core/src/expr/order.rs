use std::cmp::Ordering;

use super::{Expr, Node};

fn rank(n: &Node) -> u8 {
    match n {
        Node::Num(_) => 0,
        Node::Sym(_) => 1,
        Node::Pow(..) => 2,
        Node::Mul(_) => 3,
        Node::Add(_) => 4,
        Node::Func(..) => 5,
        Node::Opaque(_) => 6,
    }
}

fn cmp_slices(a: &[Expr], b: &[Expr]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let c = x.cmp(y);
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    })
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        let (a, b) = (self.node(), other.node());
        rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
            (Node::Num(x), Node::Num(y)) => x.cmp(y),
            (Node::Sym(x), Node::Sym(y)) => x.cmp(y),
            (Node::Pow(b1, e1), Node::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Node::Mul(x), Node::Mul(y)) | (Node::Add(x), Node::Add(y)) => cmp_slices(x, y),
            (Node::Func(f1, a1), Node::Func(f2, a2)) => f1.cmp(f2).then_with(|| a1.cmp(a2)),
            (Node::Opaque(o1), Node::Opaque(o2)) => o1
                .name
                .cmp(&o2.name)
                .then_with(|| o1.index.cmp(&o2.index))
                .then_with(|| cmp_slices(&o1.args, &o2.args)),
            _ => unreachable!("equal ranks imply equal node kinds"),
        })
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Splits a factor into (base, exponent) for ordering and power merging.
pub(crate) fn base_exp(f: &Expr) -> (Expr, Expr) {
    match f.node() {
        Node::Pow(b, e) => (b.clone(), e.clone()),
        _ => (f.clone(), Expr::one()),
    }
}

/// Order of factors inside a canonical product: constant first, then by base,
/// then by exponent.
pub(crate) fn cmp_factors(a: &Expr, b: &Expr) -> Ordering {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => return x.cmp(y),
        (Some(_), None) => return Ordering::Less,
        (None, Some(_)) => return Ordering::Greater,
        _ => {}
    }
    let (ba, ea) = base_exp(a);
    let (bb, eb) = base_exp(b);
    ba.cmp(&bb).then_with(|| ea.cmp(&eb))
}

/// Splits a term into its rational coefficient and the remaining monomial.
/// A bare constant has rest `1`.
pub(crate) fn coeff_rest(t: &Expr) -> (super::Rational, Expr) {
    use num_traits::One;
    match t.node() {
        Node::Num(r) => (r.clone(), Expr::one()),
        Node::Mul(fs) => match fs[0].node() {
            Node::Num(r) => {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::from_node(Node::Mul(fs[1..].to_vec()))
                };
                (r.clone(), rest)
            }
            _ => (super::Rational::one(), t.clone()),
        },
        _ => (super::Rational::one(), t.clone()),
    }
}

fn degree(rest: &Expr) -> usize {
    match rest.node() {
        Node::Num(_) => 0,
        Node::Mul(fs) => fs.len(),
        _ => 1,
    }
}

/// Order of terms inside a canonical sum: graded by number of factors, then
/// by monomial, then by coefficient.
pub(crate) fn cmp_terms(a: &Expr, b: &Expr) -> Ordering {
    let (ca, ra) = coeff_rest(a);
    let (cb, rb) = coeff_rest(b);
    degree(&ra)
        .cmp(&degree(&rb))
        .then_with(|| ra.cmp(&rb))
        .then_with(|| ca.cmp(&cb))
}
