use std::fmt;
use std::ops::{Add, Sub};

use crate::expr::{Bindings, Expr, Symbol};
use crate::simplify::normalize;

/// A point vector field `xi1*d_t + xi2*d_x + eta*d_u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub xi1: Expr,
    pub xi2: Expr,
    pub eta: Expr,
}

impl VectorField {
    pub fn new(xi1: Expr, xi2: Expr, eta: Expr) -> VectorField {
        VectorField { xi1, xi2, eta }
    }

    pub fn zero() -> VectorField {
        VectorField::new(Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn d_t() -> VectorField {
        VectorField::new(Expr::one(), Expr::zero(), Expr::zero())
    }

    pub fn d_x() -> VectorField {
        VectorField::new(Expr::zero(), Expr::one(), Expr::zero())
    }

    pub fn d_u() -> VectorField {
        VectorField::new(Expr::zero(), Expr::zero(), Expr::one())
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi1, &self.xi2, &self.eta]
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> VectorField {
        VectorField::new(f(&self.xi1), f(&self.xi2), f(&self.eta))
    }

    pub fn normalize(&self) -> VectorField {
        self.map(normalize)
    }

    /// Structural test after normalization.
    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| normalize(c).is_zero())
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        self.map(|e| c * e)
    }

    pub fn substitute(&self, b: &Bindings) -> VectorField {
        self.map(|e| e.substitute(b))
    }

    /// `X(f) = xi1*f_t + xi2*f_x + eta*f_u`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add([
            &self.xi1 * &f.diff(&Symbol::T),
            &self.xi2 * &f.diff(&Symbol::X),
            &self.eta * &f.diff(&Symbol::U),
        ])
    }

    /// Point fields may not depend on derivatives of `u`.
    pub fn check_point(&self) -> Result<(), String> {
        for c in self.components() {
            if c.jet_order() > 0 {
                return Err(format!("coefficient `{c}` depends on derivatives of u"));
            }
        }
        Ok(())
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.xi1 + &o.xi1, &self.xi2 + &o.xi2, &self.eta + &o.eta)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.xi1 - &o.xi1, &self.xi2 - &o.xi2, &self.eta - &o.eta)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_vectorfield(self))
    }
}

/// `[X, Y] = X(Y) - Y(X)` componentwise, normalized.
pub fn commutator(x: &VectorField, y: &VectorField) -> VectorField {
    let c = |xc: &Expr, yc: &Expr| normalize(&(x.apply(yc) - y.apply(xc)));
    VectorField::new(c(&x.xi1, &y.xi1), c(&x.xi2, &y.xi2), c(&x.eta, &y.eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_vectorfield;

    fn vf(s: &str) -> VectorField {
        parse_vectorfield(s).unwrap()
    }

    #[test]
    fn self_bracket_vanishes() {
        let x = vf("(t + x^2)*d_t + u*d_u");
        assert!(commutator(&x, &x).is_zero());
    }

    #[test]
    fn heisenberg_bracket() {
        let c = commutator(&vf("d_t + beta*d_x"), &vf("beta^(-1)*x*u*d_u"));
        assert_eq!(c, vf("u*d_u"));
    }

    #[test]
    fn dilation_bracket() {
        assert_eq!(commutator(&vf("d_t"), &vf("t*d_t + x*d_x")), vf("d_t"));
    }

    #[test]
    fn jet_dependence_is_flagged() {
        let v = VectorField::new(Expr::ux(), Expr::zero(), Expr::zero());
        assert!(v.check_point().is_err());
        assert!(vf("t*d_t + u*d_u").check_point().is_ok());
    }
}
