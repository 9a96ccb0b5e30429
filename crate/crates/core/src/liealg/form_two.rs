use std::fmt;

use thiserror::Error;

use super::VectorField;
use crate::expr::{Expr, Symbol};
use crate::simplify::{is_zero, normalize, SamplingDomain};

/// `(lambda*t + lambda1)*d_t + (lambda*x + lambda2)*d_x + (h(x)*u + r(t, x))*d_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormTwoOperator {
    pub lambda: Expr,
    pub lambda1: Expr,
    pub lambda2: Expr,
    pub h: Expr,
    pub r: Expr,
}

impl FormTwoOperator {
    pub fn to_field(&self) -> VectorField {
        VectorField::new(
            &self.lambda * &Expr::t() + self.lambda1.clone(),
            &self.lambda * &Expr::x() + self.lambda2.clone(),
            &self.h * &Expr::u() + self.r.clone(),
        )
        .normalize()
    }
}

impl fmt::Display for FormTwoOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda = {}, lambda1 = {}, lambda2 = {}, h = {}, r = {}",
            self.lambda, self.lambda1, self.lambda2, self.h, self.r
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("operator is not of the admissible form: {condition}")]
pub struct NotInFormTwo {
    pub condition: String,
}

const DECOMPOSE_SEED: u64 = 0x5eed;

fn vanishes(e: &Expr) -> bool {
    let n = normalize(e);
    n.is_zero() || is_zero(&n, &SamplingDomain::new(), DECOMPOSE_SEED).is_ok_and(|v| v.is_zero())
}

fn require(ok: bool, condition: &str) -> Result<(), NotInFormTwo> {
    if ok {
        Ok(())
    } else {
        Err(NotInFormTwo {
            condition: condition.to_string(),
        })
    }
}

pub fn decompose_operator(v: &VectorField) -> Result<FormTwoOperator, NotInFormTwo> {
    let (t, x, u) = (Symbol::T, Symbol::X, Symbol::U);
    v.check_point().map_err(|condition| NotInFormTwo { condition })?;

    require(vanishes(&v.xi1.diff(&x)), "xi1 depends on x")?;
    require(vanishes(&v.xi1.diff(&u)), "xi1 depends on u")?;
    let lambda = normalize(&v.xi1.diff(&t));
    require(vanishes(&lambda.diff(&t)), "xi1 is not affine in t")?;
    let lambda1 = normalize(&(&v.xi1 - &(&lambda * &Expr::t())));

    require(vanishes(&v.xi2.diff(&t)), "xi2 depends on t")?;
    require(vanishes(&v.xi2.diff(&u)), "xi2 depends on u")?;
    require(vanishes(&(v.xi2.diff(&x) - lambda.clone())), "xi2 does not scale x with the same lambda as t")?;
    let lambda2 = normalize(&(&v.xi2 - &(&lambda * &Expr::x())));

    let h = normalize(&v.eta.diff(&u));
    require(vanishes(&h.diff(&u)), "eta is not linear in u")?;
    require(vanishes(&h.diff(&t)), "coefficient of u in eta depends on t")?;
    let r = normalize(&(&v.eta - &(&h * &Expr::u())));

    Ok(FormTwoOperator {
        lambda,
        lambda1,
        lambda2,
        h,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_vectorfield};

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn translation() {
        let d = decompose_operator(&parse_vectorfield("d_t + beta*d_x").unwrap()).unwrap();
        assert!(d.lambda.is_zero());
        assert!(d.lambda1.is_one());
        assert_eq!(d.lambda2, p("beta"));
        assert!(d.h.is_zero() && d.r.is_zero());
    }

    #[test]
    fn dilation_with_u_scaling() {
        let d = decompose_operator(&parse_vectorfield("t*d_t + x*d_x + m*u*d_u").unwrap()).unwrap();
        assert!(d.lambda.is_one());
        assert!(d.lambda1.is_zero() && d.lambda2.is_zero());
        assert_eq!(d.h, p("m"));
        assert!(d.r.is_zero());
    }

    #[test]
    fn rejects_mixed_dependence() {
        let e = decompose_operator(&parse_vectorfield("x*d_t").unwrap()).unwrap_err();
        assert!(e.condition.contains("xi1 depends on x"));
        assert!(decompose_operator(&parse_vectorfield("u^2*d_u").unwrap()).is_err());
        assert!(decompose_operator(&parse_vectorfield("t*u*d_u").unwrap()).is_err());
        assert!(decompose_operator(&parse_vectorfield("t*d_t + 2*x*d_x").unwrap()).is_err());
    }

    #[test]
    fn round_trip() {
        for s in ["exp(m*t)*d_u", "-t*d_t - x*d_x + u*d_u", "cos(ln(x))*u*d_u", "d_t + k*x^(-1)*u*d_u"] {
            let v = parse_vectorfield(s).unwrap();
            let d = decompose_operator(&v).unwrap();
            assert_eq!(d.to_field(), v.normalize(), "{s}");
        }
    }
}
