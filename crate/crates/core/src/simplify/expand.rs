use std::cell::RefCell;
use std::collections::VecDeque;
use num_traits::{Signed, ToPrimitive};

use crate::expr::{Expr, Node};

const MAX_EXPAND_POWER: u32 = 8;
const MAX_ITERATIONS: usize = 4;

/// Canonical normal form: the constructor canonicalization plus full
/// distribution of products over sums and expansion of small positive
/// integer powers of sums. Iterated to a fixed point.
pub fn normalize(e: &Expr) -> Expr {
    if let Some(hit) = RECENT.with(|r| r.borrow().iter().find(|x| x.ptr_eq(e)).cloned()) {
        return hit;
    }
    let mut cur = expand(e);
    for _ in 0..MAX_ITERATIONS {
        let next = expand(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    RECENT.with(|r| {
        let mut r = r.borrow_mut();
        if r.len() == RECENT_CAPACITY {
            r.pop_front();
        }
        r.push_back(cur.clone());
    });
    cur
}

const RECENT_CAPACITY: usize = 16;

thread_local! {
    /// Recent results. Normal forms are often normalized again by the next
    /// stage; the entries are kept alive so pointer identity is reliable.
    static RECENT: RefCell<VecDeque<Expr>> = const { RefCell::new(VecDeque::new()) };
}

fn expand(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(xs) => Expr::add(xs.iter().map(expand)),
        Node::Mul(xs) => distribute(xs.iter().map(expand).collect()),
        Node::Pow(b, x) => expand_pow(expand(b), expand(x)),
        Node::Func(f, a) => Expr::func(*f, expand(a)),
        Node::Opaque(o) => Expr::opaque(&o.name, o.args.iter().map(expand).collect(), o.index.clone()),
    }
}

fn small_positive(x: &Expr) -> Option<u32> {
    let r = x.as_num()?;
    if r.is_integer() && r.is_positive() {
        r.to_integer().to_u32().filter(|&n| n <= MAX_EXPAND_POWER)
    } else {
        None
    }
}

fn expand_pow(b: Expr, x: Expr) -> Expr {
    if let (Node::Add(_), Some(n)) = (b.node(), small_positive(&x)) {
        return distribute(vec![b; n as usize]);
    }
    let r = Expr::pow(b, x);
    match r.node() {
        Node::Pow(b2, x2) if matches!(b2.node(), Node::Add(_)) && small_positive(x2).is_some() => {
            distribute(vec![b2.clone(); small_positive(x2).unwrap() as usize])
        }
        Node::Mul(fs) => distribute(fs.clone()),
        _ => r,
    }
}

fn distribute(factors: Vec<Expr>) -> Expr {
    let mut acc: Vec<Expr> = vec![Expr::one()];
    for f in factors {
        let f = match f.node() {
            Node::Pow(b, x) if matches!(b.node(), Node::Add(_)) && small_positive(x).is_some() => {
                expand_pow(b.clone(), x.clone())
            }
            _ => f,
        };
        match f.node() {
            Node::Add(xs) => {
                let mut next = Vec::with_capacity(acc.len() * xs.len());
                for a in &acc {
                    for x in xs {
                        next.push(a * x);
                    }
                }
                acc = next;
            }
            _ => {
                for a in acc.iter_mut() {
                    *a = &*a * &f;
                }
            }
        }
    }
    Expr::add(acc)
}
