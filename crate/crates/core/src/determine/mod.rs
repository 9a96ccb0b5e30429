//! Determining equations for `u_tt = u_xx + F(t, x, u, u_x)`.
//!
//! Two independent routes to the same answer: the closed-form residual for
//! admissible operators, and the second prolongation applied directly to
//! `u_tt - u_xx - F` on solutions.

use thiserror::Error;

use crate::expr::{total_diff, Bindings, DiffError, Expr, JetVar, Symbol};
use crate::liealg::{decompose_operator, FormTwoOperator, NotInFormTwo, VectorField};
use crate::simplify::{is_zero_with, mix_seed, normalize, SamplingDomain, ZeroTestConfig, ZeroTestError, ZeroVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Closed,
    Prolongation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub expr: Expr,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetermineError {
    #[error("F may depend on t, x, u, ux and parameters only; found `{0}`")]
    BadF(String),
    #[error("operator coefficients depend on derivatives of u")]
    NotPoint,
    #[error("differentiation failed: {0}")]
    Diff(#[from] DiffError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

fn check_f(f: &Expr) -> Result<(), DetermineError> {
    for s in f.free_symbols() {
        if matches!(s.jet(), Some(JetVar::Ut | JetVar::Utt | JetVar::Utx | JetVar::Uxx)) {
            return Err(DetermineError::BadF(s.name().to_string()));
        }
    }
    Ok(())
}

/// Closed-form determining equation for an admissible operator:
///
/// ```text
/// r_tt - h''u - r_xx + (h - 2l)F - (l t + l1)F_t - (l x + l2)F_x - (h u + r)F_u
///   - 2 u_x h' - u_x (h - l)F_ux - h' u F_ux - r_x F_ux
/// ```
pub fn closed_form_residual(op: &FormTwoOperator, f: &Expr) -> Result<Residual, DetermineError> {
    check_f(f)?;
    let (t, x, u, ux) = (Symbol::T, Symbol::X, Symbol::U, Symbol::UX);
    let FormTwoOperator {
        lambda: l,
        lambda1: l1,
        lambda2: l2,
        h,
        r,
    } = op;
    let hp = h.diff(&x);
    let hpp = hp.diff(&x);
    let f_t = f.diff(&t);
    let f_x = f.diff(&x);
    let f_u = f.diff(&u);
    let f_ux = f.diff(&ux);
    let (te, xe, ue, uxe) = (Expr::t(), Expr::x(), Expr::u(), Expr::ux());
    let e = Expr::add([
        r.diff_many(&[t.clone(), t.clone()]),
        -(&hpp * &ue),
        -r.diff_many(&[x.clone(), x.clone()]),
        &(h - &(Expr::int(2) * l)) * f,
        -(&(&(l * &te) + l1) * &f_t),
        -(&(&(l * &xe) + l2) * &f_x),
        -(&(&(h * &ue) + r) * &f_u),
        -(Expr::int(2) * &uxe * &hp),
        -(&uxe * &(h - l) * &f_ux),
        -(&hp * &ue * &f_ux),
        -(&r.diff(&x) * &f_ux),
    ]);
    Ok(Residual {
        expr: normalize(&e),
        origin: Origin::Closed,
    })
}

/// First and second extended coefficients of a point field.
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    pub eta_t: Expr,
    pub eta_x: Expr,
    pub eta_tt: Expr,
    pub eta_xx: Expr,
}

/// Second prolongation. First-order coefficients come from the
/// characteristic `Q = eta - xi1 u_t - xi2 u_x`; second-order ones from the
/// recursion `eta^tt = D_t eta^t - u_tt D_t xi1 - u_tx D_t xi2`.
pub fn prolong2(v: &VectorField) -> Result<Prolongation, DetermineError> {
    v.check_point().map_err(|_| DetermineError::NotPoint)?;
    let q = &v.eta - &(&v.xi1 * &Expr::ut()) - &v.xi2 * &Expr::ux();
    let first = |d: JetVar, ut_d: JetVar, ux_d: JetVar| -> Result<Expr, DetermineError> {
        let e = total_diff(&q, d)? + &v.xi1 * &Expr::jet(ut_d) + &v.xi2 * &Expr::jet(ux_d);
        Ok(normalize(&e))
    };
    let eta_t = first(JetVar::T, JetVar::Utt, JetVar::Utx)?;
    let eta_x = first(JetVar::X, JetVar::Utx, JetVar::Uxx)?;
    let dt_xi1 = total_diff(&v.xi1, JetVar::T)?;
    let dt_xi2 = total_diff(&v.xi2, JetVar::T)?;
    let dx_xi1 = total_diff(&v.xi1, JetVar::X)?;
    let dx_xi2 = total_diff(&v.xi2, JetVar::X)?;
    let utt = Expr::jet(JetVar::Utt);
    let utx = Expr::jet(JetVar::Utx);
    let uxx = Expr::jet(JetVar::Uxx);
    let eta_tt = normalize(&(total_diff(&eta_t, JetVar::T)? - &utt * &dt_xi1 - &utx * &dt_xi2));
    let eta_xx = normalize(&(total_diff(&eta_x, JetVar::X)? - &utx * &dx_xi1 - &uxx * &dx_xi2));
    Ok(Prolongation {
        eta_t,
        eta_x,
        eta_tt,
        eta_xx,
    })
}

/// `pr X (u_tt - u_xx - F)` restricted to solutions (`u_tt -> u_xx + F`).
pub fn prolongation_residual(v: &VectorField, f: &Expr) -> Result<Residual, DetermineError> {
    check_f(f)?;
    let p = prolong2(v)?;
    let xf = Expr::add([
        &v.xi1 * &f.diff(&Symbol::T),
        &v.xi2 * &f.diff(&Symbol::X),
        &v.eta * &f.diff(&Symbol::U),
        &p.eta_x * &f.diff(&Symbol::UX),
    ]);
    let raw = p.eta_tt - p.eta_xx - xf;
    let mut on_solutions = Bindings::new();
    on_solutions.insert(Symbol::UTT, Expr::jet(JetVar::Uxx) + f.clone());
    Ok(Residual {
        expr: normalize(&raw.substitute(&on_solutions)),
        origin: Origin::Prolongation,
    })
}

/// Both oracles on one (generator, F) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    /// `Err` when the generator is not of the admissible form.
    pub closed: Result<ZeroVerdict, NotInFormTwo>,
    pub prolong: ZeroVerdict,
}

impl PairVerdict {
    /// `None` when the closed-form route does not apply.
    pub fn agree(&self) -> Option<bool> {
        self.closed.as_ref().ok().map(|c| c.is_zero() == self.prolong.is_zero())
    }

    pub fn passes(&self) -> bool {
        self.prolong.is_zero() && self.closed.as_ref().is_ok_and(ZeroVerdict::is_zero)
    }
}

pub fn verify_pair(
    v: &VectorField,
    f: &Expr,
    domain: &SamplingDomain,
    seed: u64,
    cfg: &ZeroTestConfig,
) -> Result<PairVerdict, DetermineError> {
    let closed = match decompose_operator(v) {
        Ok(op) => {
            let r = closed_form_residual(&op, f)?;
            Ok(is_zero_with(&r.expr, domain, mix_seed(seed, "closed"), cfg)?)
        }
        Err(e) => Err(e),
    };
    let r = prolongation_residual(v, f)?;
    let prolong = is_zero_with(&r.expr, domain, mix_seed(seed, "prolong"), cfg)?;
    Ok(PairVerdict { closed, prolong })
}
