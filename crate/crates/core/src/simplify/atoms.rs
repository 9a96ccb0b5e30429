use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::normalize;
use crate::expr::{Expr, Node};

/// A basis element for splitting a residual: the constant atom `1` or one
/// opaque application (including its derivative index).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    One,
    Opaque(Expr),
}

impl Atom {
    pub fn expr(&self) -> Expr {
        match self {
            Atom::One => Expr::one(),
            Atom::Opaque(e) => e.clone(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::One => f.write_str("1"),
            Atom::Opaque(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("expression is not affine-linear in its opaque atoms: {0}")]
    NonlinearInAtoms(String),
}

/// Coefficients of an expression over its opaque atoms. Coefficients are
/// opaque-free and normalized; atoms with a zero coefficient are omitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomBasis {
    pub coeffs: BTreeMap<Atom, Expr>,
}

impl AtomBasis {
    pub fn coefficient(&self, a: &Atom) -> Expr {
        self.coeffs.get(a).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.coeffs.keys()
    }

    /// `sum coeff * atom`.
    pub fn reconstruct(&self) -> Expr {
        Expr::add(self.coeffs.iter().map(|(a, c)| c * &a.expr()))
    }
}

/// Splits `e` as `sum coeff(atom) * atom` with opaque-free coefficients.
pub fn collect_atoms(e: &Expr) -> Result<AtomBasis, AtomError> {
    let n = normalize(e);
    let terms: Vec<Expr> = match n.node() {
        Node::Add(xs) => xs.clone(),
        _ if n.is_zero() => Vec::new(),
        _ => vec![n.clone()],
    };
    let mut parts: BTreeMap<Atom, Vec<Expr>> = BTreeMap::new();
    for term in terms {
        let (atom, coeff) = split_term(&term)?;
        parts.entry(atom).or_default().push(coeff);
    }
    let mut coeffs = BTreeMap::new();
    for (atom, cs) in parts {
        let c = Expr::add(cs);
        if !c.is_zero() {
            coeffs.insert(atom, c);
        }
    }
    Ok(AtomBasis { coeffs })
}

fn split_term(term: &Expr) -> Result<(Atom, Expr), AtomError> {
    let nonlinear = || AtomError::NonlinearInAtoms(term.to_string());
    match term.node() {
        Node::Opaque(_) => Ok((Atom::Opaque(term.clone()), Expr::one())),
        Node::Mul(fs) => {
            let mut atom = None;
            let mut rest = Vec::with_capacity(fs.len());
            for f in fs {
                if matches!(f.node(), Node::Opaque(_)) {
                    if atom.is_some() {
                        return Err(nonlinear());
                    }
                    atom = Some(f.clone());
                } else if f.contains_opaque() {
                    return Err(nonlinear());
                } else {
                    rest.push(f.clone());
                }
            }
            Ok(match atom {
                Some(a) => (Atom::Opaque(a), Expr::mul(rest)),
                None => (Atom::One, term.clone()),
            })
        }
        _ if term.contains_opaque() => Err(nonlinear()),
        _ => Ok((Atom::One, term.clone())),
    }
}
