use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use super::{binding_subst, CatalogError};
use crate::expr::{Expr, Rational};
use crate::simplify::mix_seed;

/// Values of an entry's parameters for one verification run.
pub type Binding = BTreeMap<String, Rational>;

pub const BINDINGS_PER_ENTRY: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Positive,
    /// Sampled from the positive values; zero is a boundary case that
    /// several entries cannot be evaluated at.
    NonNegative,
    Real,
    /// `0 < |p| < 1`
    AbsInOpenUnit,
    /// Values (possibly depending on earlier parameters) that are excluded.
    Excluded(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub constraints: Vec<Constraint>,
}

/// Minimal distance kept from every excluded value.
const EXCLUSION_GAP: f64 = 0.1;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn pool(spec: &ParamSpec) -> Vec<Rational> {
    let positive = spec
        .constraints
        .iter()
        .any(|c| matches!(c, Constraint::Positive | Constraint::NonNegative));
    let unit = spec.constraints.contains(&Constraint::AbsInOpenUnit);
    match (positive, unit) {
        (true, true) => vec![r(1, 2), r(3, 4), r(1, 4), r(2, 3), r(1, 3)],
        (true, false) => vec![r(1, 2), r(3, 2), r(1, 1), r(3, 4), r(5, 4), r(1, 3), r(4, 3)],
        (false, true) => vec![r(1, 2), r(-1, 3), r(3, 4), r(-2, 3), r(1, 4), r(-3, 4)],
        (false, false) => vec![r(1, 2), r(-1, 3), r(3, 2), r(-3, 2), r(5, 2), r(-5, 4), r(3, 4), r(7, 3)],
    }
}

fn admissible(spec: &ParamSpec, value: &Rational, earlier: &Binding) -> bool {
    let subst = binding_subst(earlier);
    spec.constraints.iter().all(|c| match c {
        Constraint::Positive | Constraint::NonNegative => value.is_positive(),
        Constraint::Real => true,
        Constraint::AbsInOpenUnit => !value.is_zero() && value.abs() < Rational::from_integer(1.into()),
        Constraint::Excluded(vals) => vals.iter().all(|e| match e.substitute(&subst).as_num() {
            Some(x) => (value - x).abs().to_f64().unwrap_or(0.0) >= EXCLUSION_GAP,
            None => false,
        }),
    })
}

/// `count` deterministic bindings for the given parameters. Values come
/// from fixed lists of small rationals; the seed only rotates the lists.
/// Parameters are bound in declaration order, so exclusions may refer to
/// parameters declared earlier.
pub fn instantiate_params(id: &str, params: &[ParamSpec], seed: u64, count: usize) -> Result<Vec<Binding>, CatalogError> {
    let mut out = vec![Binding::new(); count];
    for spec in params {
        for (i, b) in out.iter_mut().enumerate() {
            let choices: Vec<Rational> = pool(spec).into_iter().filter(|v| admissible(spec, v, b)).collect();
            if choices.len() < count {
                return Err(CatalogError::UnsatisfiableConstraint {
                    id: id.to_string(),
                    param: spec.name.clone(),
                });
            }
            let offset = (mix_seed(seed, &spec.name) % choices.len() as u64) as usize;
            b.insert(spec.name.clone(), choices[(i + offset) % choices.len()].clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn spec(name: &str, cs: Vec<Constraint>) -> ParamSpec {
        ParamSpec {
            name: name.into(),
            constraints: cs,
        }
    }

    #[test]
    fn respects_constraints() {
        let q = spec("q", vec![Constraint::AbsInOpenUnit]);
        let m = spec(
            "m",
            vec![Constraint::Excluded(vec![parse_expr("q").unwrap(), parse_expr("q + 1").unwrap()])],
        );
        for seed in 0..50 {
            let bs = instantiate_params("e", &[q.clone(), m.clone()], seed, 3).unwrap();
            assert_eq!(bs.len(), 3);
            for b in &bs {
                let (qv, mv) = (b["q"].to_f64().unwrap(), b["m"].to_f64().unwrap());
                assert!(qv != 0.0 && qv.abs() < 1.0);
                assert!((mv - qv).abs() >= 0.1 && (mv - qv - 1.0).abs() >= 0.1);
            }
            assert!(bs[0] != bs[1] && bs[1] != bs[2] && bs[0] != bs[2]);
        }
    }

    #[test]
    fn empty_and_unsatisfiable() {
        let bs = instantiate_params("e", &[], 1, 3).unwrap();
        assert_eq!(bs, vec![Binding::new(); 3]);
        let bad = spec(
            "k",
            vec![Constraint::Positive, Constraint::Excluded(vec![parse_expr("1/2").unwrap(), parse_expr("1").unwrap(), parse_expr("3/2").unwrap(), parse_expr("5/4").unwrap(), parse_expr("1/3").unwrap()])],
        );
        assert!(matches!(
            instantiate_params("e", &[bad], 1, 3),
            Err(CatalogError::UnsatisfiableConstraint { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let k = spec("k", vec![Constraint::Positive]);
        assert_eq!(
            instantiate_params("e", std::slice::from_ref(&k), 9, 3).unwrap(),
            instantiate_params("e", &[k], 9, 3).unwrap()
        );
    }
}
