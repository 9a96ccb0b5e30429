use std::fmt;

use super::{CatalogEntry, Expected};
use crate::expr::{Expr, Node, Symbol};
use crate::liealg::VectorField;
use crate::simplify::normalize;

/// A single deliberate change to an entry. Term indices refer to the terms
/// of `F` that do not involve `G`.
#[derive(Debug, Clone, PartialEq)]
pub enum Mutation {
    FlipSign(usize),
    /// Raises the power of the first coordinate found in the term by one.
    BumpExponent(usize),
    DropTerm(usize),
    AddTerm(Expr),
    /// Replaces the first argument of `G` by `omega + shift`.
    ShiftInvariant(Expr),
    /// Multiplies the `d_u` coefficient of a generator by `x`.
    BumpGenerator(usize),
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::FlipSign(i) => write!(f, "flip-sign:{i}"),
            Mutation::BumpExponent(i) => write!(f, "bump-exponent:{i}"),
            Mutation::DropTerm(i) => write!(f, "drop-term:{i}"),
            Mutation::AddTerm(e) => write!(f, "add:{e}"),
            Mutation::ShiftInvariant(e) => write!(f, "shift-invariant:{e}"),
            Mutation::BumpGenerator(j) => write!(f, "bump-gen{}", j + 1),
        }
    }
}

fn terms(f: &Expr) -> Vec<Expr> {
    match f.node() {
        Node::Add(xs) => xs.clone(),
        _ => vec![f.clone()],
    }
}

fn free_terms(f: &Expr) -> Vec<usize> {
    terms(f)
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.contains_opaque())
        .map(|(i, _)| i)
        .collect()
}

fn first_coordinate(e: &Expr) -> Option<Symbol> {
    [Symbol::UX, Symbol::U, Symbol::X, Symbol::T]
        .into_iter()
        .find(|s| e.contains_symbol(s))
}

/// Mutations that make sense for this entry.
pub fn mutation_menu(e: &CatalogEntry) -> Vec<Mutation> {
    let free = free_terms(&e.f);
    let mut out = Vec::new();
    for k in 0..free.len() {
        out.push(Mutation::FlipSign(k));
        out.push(Mutation::BumpExponent(k));
        out.push(Mutation::DropTerm(k));
    }
    out.push(Mutation::AddTerm(Expr::x()));
    out.push(Mutation::AddTerm(Expr::t() * Expr::u()));
    for s in [Symbol::X, Symbol::U, Symbol::T, Symbol::UX] {
        out.push(Mutation::ShiftInvariant(Expr::sym(s)));
    }
    for j in 0..e.generators.len() {
        out.push(Mutation::BumpGenerator(j));
    }
    out.retain(|m| mutate_entry(e, m).is_some());
    out
}

/// Applies `m`; `None` when it does not apply to this entry. The mutated
/// entry is expected to pass, so a failure is reported as unexpected.
pub fn mutate_entry(e: &CatalogEntry, m: &Mutation) -> Option<CatalogEntry> {
    let mut out = e.clone();
    let ts = terms(&e.f);
    let free = free_terms(&e.f);
    let rebuild = |ts: Vec<Expr>| normalize(&Expr::add(ts));
    match m {
        Mutation::FlipSign(k) => {
            let i = *free.get(*k)?;
            let mut ts = ts;
            ts[i] = -ts[i].clone();
            out.f = rebuild(ts);
        }
        Mutation::BumpExponent(k) => {
            let i = *free.get(*k)?;
            let s = first_coordinate(&ts[i]).unwrap_or(Symbol::X);
            let mut ts = ts;
            ts[i] = &ts[i] * &Expr::sym(s);
            out.f = rebuild(ts);
        }
        Mutation::DropTerm(k) => {
            let i = *free.get(*k)?;
            let mut ts = ts;
            ts.remove(i);
            out.f = rebuild(ts);
        }
        Mutation::AddTerm(extra) => out.f = normalize(&(&e.f + extra)),
        Mutation::ShiftInvariant(shift) => {
            // The shifted argument is still a function of the invariants when
            // the shift is one of them, or when they depend on it alone.
            let invariants: Vec<&Expr> = std::iter::once(&e.omega).chain(e.v.as_ref()).collect();
            if invariants.iter().any(|w| normalize(w) == normalize(shift)) {
                return None;
            }
            if let Node::Sym(s) = shift.node() {
                let alone = invariants
                    .iter()
                    .flat_map(|w| w.free_symbols())
                    .filter(|v| v.jet().is_some())
                    .all(|v| &v == s);
                if alone {
                    return None;
                }
            }
            let shifted = shift_first_arg(&e.f, shift);
            if shifted == e.f {
                return None;
            }
            out.f = shifted;
        }
        Mutation::BumpGenerator(j) => {
            let g = e.generators.get(*j)?;
            if g.eta.is_zero() {
                return None;
            }
            out.generators[*j] = VectorField::new(g.xi1.clone(), g.xi2.clone(), normalize(&(&g.eta * &Expr::x())));
        }
    }
    if out.f == e.f && out.generators == e.generators {
        return None;
    }
    out.id = format!("{}~{m}", e.id);
    out.expected = Expected::Pass;
    out.source.f = out.f.to_string();
    Some(out)
}

fn shift_first_arg(e: &Expr, shift: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(xs) => Expr::add(xs.iter().map(|x| shift_first_arg(x, shift))),
        Node::Mul(xs) => Expr::mul(xs.iter().map(|x| shift_first_arg(x, shift))),
        Node::Pow(b, p) => Expr::pow(shift_first_arg(b, shift), shift_first_arg(p, shift)),
        Node::Func(f, a) => Expr::func(*f, shift_first_arg(a, shift)),
        Node::Opaque(o) => {
            let mut args = o.args.clone();
            args[0] = &args[0] + shift;
            Expr::opaque(&o.name, args, o.index.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_catalog;
    use crate::parser::parse_expr;

    fn entry() -> CatalogEntry {
        let text = "[entry E]\nalgebra = A3.3\ngen1 = u*d_u\ngen2 = d_x\ngen3 = x*u*d_u\nF = -u^(-1)*ux^2 + u*G(omega)\nomega = t\nexpected = pass\n";
        parse_catalog(text).unwrap().entries.remove(0)
    }

    #[test]
    fn term_mutations() {
        let e = entry();
        let f = |m| mutate_entry(&e, &m).unwrap().f;
        assert_eq!(f(Mutation::FlipSign(0)), parse_expr("u^(-1)*ux^2 + u*G(t)").unwrap());
        assert_eq!(f(Mutation::BumpExponent(0)), parse_expr("-u^(-1)*ux^3 + u*G(t)").unwrap());
        assert_eq!(f(Mutation::DropTerm(0)), parse_expr("u*G(t)").unwrap());
        assert_eq!(f(Mutation::ShiftInvariant(Expr::x())), parse_expr("-u^(-1)*ux^2 + u*G(t + x)").unwrap());
        assert!(mutate_entry(&e, &Mutation::FlipSign(1)).is_none());
        assert!(mutate_entry(&e, &Mutation::ShiftInvariant(Expr::t())).is_none());
        let g = mutate_entry(&e, &Mutation::BumpGenerator(0)).unwrap();
        assert_eq!(g.generators[0].eta, parse_expr("x*u").unwrap());
        assert!(g.id.starts_with("E~"));
    }

    #[test]
    fn menu_lists_applicable() {
        let e = entry();
        for m in mutation_menu(&e) {
            assert!(mutate_entry(&e, &m).is_some(), "{m}");
        }
    }
}
