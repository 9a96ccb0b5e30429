//! Point transformations `t' = g t + g1`, `x' = e g x + g2`,
//! `v = rho(x) u + theta(t, x)` that map the class of equations to itself.
//!
//! Transformed objects are written in the same symbols `t, x, u, ux`, now
//! read as the new coordinates.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Bindings, Expr, Rational, Symbol};
use crate::liealg::VectorField;
use crate::simplify::{normalize, SamplingDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceTransform {
    pub gamma: Rational,
    pub gamma1: Rational,
    pub gamma2: Rational,
    /// `+1` or `-1`.
    pub epsilon: i8,
    /// Function of `x` only, nonvanishing.
    pub rho: Expr,
    /// Function of `t` and `x` only.
    pub theta: Expr,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl EquivalenceTransform {
    pub fn identity() -> EquivalenceTransform {
        EquivalenceTransform {
            gamma: Rational::one(),
            gamma1: Rational::zero(),
            gamma2: Rational::zero(),
            epsilon: 1,
            rho: Expr::one(),
            theta: Expr::zero(),
        }
    }

    /// Panics if `gamma` is zero or `epsilon` is not a sign.
    pub fn new(
        gamma: Rational,
        gamma1: Rational,
        gamma2: Rational,
        epsilon: i8,
        rho: Expr,
        theta: Expr,
    ) -> EquivalenceTransform {
        assert!(!gamma.is_zero(), "gamma must be nonzero");
        assert!(epsilon == 1 || epsilon == -1, "epsilon must be +1 or -1");
        assert!(!rho.is_zero(), "rho must be nonzero");
        EquivalenceTransform {
            gamma,
            gamma1,
            gamma2,
            epsilon,
            rho,
            theta,
        }
    }

    pub fn scaling(gamma: Rational) -> EquivalenceTransform {
        EquivalenceTransform {
            gamma,
            ..EquivalenceTransform::identity()
        }
    }

    fn eps(&self) -> Expr {
        Expr::int(self.epsilon as i64)
    }

    fn g(&self) -> Expr {
        Expr::num(self.gamma.clone())
    }

    /// New `t`, `x` as expressions in old ones.
    pub fn forward_tx(&self) -> (Expr, Expr) {
        let t = &self.g() * &Expr::t() + Expr::num(self.gamma1.clone());
        let x = &self.eps() * &self.g() * Expr::x() + Expr::num(self.gamma2.clone());
        (t, x)
    }

    /// Old `t`, `x` as expressions in new ones.
    pub fn inverse_tx(&self) -> (Expr, Expr) {
        let ginv = Expr::num(self.gamma.recip());
        let t = &ginv * &(Expr::t() - Expr::num(self.gamma1.clone()));
        let x = &self.eps() * &ginv * (Expr::x() - Expr::num(self.gamma2.clone()));
        (t, x)
    }

    /// Old `t, x, u, ux` in terms of new `t, x, u, ux`.
    pub fn inverse_bindings(&self) -> Bindings {
        let (t_old, x_old) = self.inverse_tx();
        let mut tx = Bindings::new();
        tx.insert(Symbol::T, t_old.clone());
        tx.insert(Symbol::X, x_old.clone());
        let rho = self.rho.substitute(&tx);
        let rho_x = self.rho.diff(&Symbol::X).substitute(&tx);
        let theta = self.theta.substitute(&tx);
        let theta_x = self.theta.diff(&Symbol::X).substitute(&tx);
        let u_old = (Expr::u() - theta) / rho.clone();
        let ux_old = (&self.eps() * &self.g() * Expr::ux() - theta_x - &rho_x * &u_old) / rho;
        let mut b = tx;
        b.insert(Symbol::U, u_old);
        b.insert(Symbol::UX, ux_old);
        b
    }

    /// New `t, x, u, ux` in terms of old `t, x, u, ux`.
    pub fn forward_bindings(&self) -> Bindings {
        let (t, x) = self.forward_tx();
        let u = &self.rho * &Expr::u() + self.theta.clone();
        let ux = (self.rho.diff(&Symbol::X) * Expr::u() + &self.rho * &Expr::ux() + self.theta.diff(&Symbol::X))
            / (&self.eps() * &self.g());
        let mut b = Bindings::new();
        b.insert(Symbol::T, t);
        b.insert(Symbol::X, x);
        b.insert(Symbol::U, u);
        b.insert(Symbol::UX, ux);
        b
    }

    /// Sampling domain for objects in the new coordinates: the old
    /// coordinates are drawn from `d` and pushed forward.
    pub fn pushforward_domain(&self, d: &SamplingDomain) -> SamplingDomain {
        let mut out = d.clone();
        let mut rename = Bindings::new();
        for s in [Symbol::T, Symbol::X, Symbol::U, Symbol::UX] {
            let old = Symbol::param(&format!("old_{}", s.name()));
            let parts = out.take_range(&s);
            out.set_union(old.clone(), parts);
            rename.insert(s, Expr::sym(old));
        }
        let fwd = self.forward_bindings();
        for s in [Symbol::T, Symbol::X, Symbol::U, Symbol::UX] {
            out.derive(s.clone(), fwd[&s].substitute(&rename));
        }
        out
    }
}

/// `F'(t, x, u, ux) = g^-2 [rho F + theta_tt - theta_xx - rho'' u - 2 rho' ux]`
/// with the old coordinates substituted from the inverse map.
pub fn transform_f(tr: &EquivalenceTransform, f: &Expr) -> Expr {
    let (t, x) = (Symbol::T, Symbol::X);
    let rho_x = tr.rho.diff(&x);
    let rho_xx = rho_x.diff(&x);
    let bracket = Expr::add([
        &tr.rho * f,
        tr.theta.diff_many(&[t.clone(), t]),
        -tr.theta.diff_many(&[x.clone(), x]),
        -(rho_xx * Expr::u()),
        -(Expr::int(2) * rho_x * Expr::ux()),
    ]);
    let scaled = Expr::num((&tr.gamma * &tr.gamma).recip()) * bracket;
    normalize(&scaled.substitute(&tr.inverse_bindings()))
}

/// The image of a point field, written in the new coordinates.
pub fn pushforward_field(tr: &EquivalenceTransform, v: &VectorField) -> VectorField {
    let x = Symbol::X;
    let xi1 = tr.g() * &v.xi1;
    let xi2 = tr.eps() * tr.g() * &v.xi2;
    let eta = Expr::add([
        tr.rho.diff(&x) * Expr::u() * &v.xi2,
        tr.theta.diff(&Symbol::T) * &v.xi1,
        tr.theta.diff(&x) * &v.xi2,
        &tr.rho * &v.eta,
    ]);
    let back = tr.inverse_bindings();
    VectorField::new(xi1, xi2, eta).map(|c| normalize(&c.substitute(&back)))
}

/// `a` after `b`.
pub fn compose(a: &EquivalenceTransform, b: &EquivalenceTransform) -> EquivalenceTransform {
    let (bt, bx) = b.forward_tx();
    let mut at_b = Bindings::new();
    at_b.insert(Symbol::T, bt);
    at_b.insert(Symbol::X, bx.clone());
    let mut ax_b = Bindings::new();
    ax_b.insert(Symbol::X, bx);
    let rho_a = a.rho.substitute(&ax_b);
    EquivalenceTransform {
        gamma: &a.gamma * &b.gamma,
        gamma1: &a.gamma * &b.gamma1 + &a.gamma1,
        gamma2: Rational::from_integer((a.epsilon as i64).into()) * &a.gamma * &b.gamma2 + &a.gamma2,
        epsilon: a.epsilon * b.epsilon,
        rho: normalize(&(&rho_a * &b.rho)),
        theta: normalize(&(&rho_a * &b.theta + a.theta.substitute(&at_b))),
    }
}

pub fn invert(tr: &EquivalenceTransform) -> EquivalenceTransform {
    let (t_old, x_old) = tr.inverse_tx();
    let mut tx = Bindings::new();
    tx.insert(Symbol::T, t_old);
    tx.insert(Symbol::X, x_old.clone());
    let mut xb = Bindings::new();
    xb.insert(Symbol::X, x_old);
    let rho = tr.rho.substitute(&xb);
    let ginv = tr.gamma.recip();
    let eps = Rational::from_integer((tr.epsilon as i64).into());
    EquivalenceTransform {
        gamma1: -(&tr.gamma1 * &ginv),
        gamma2: -(&eps * &tr.gamma2 * &ginv),
        gamma: ginv,
        epsilon: tr.epsilon,
        rho: normalize(&rho.recip()),
        theta: normalize(&(-(tr.theta.substitute(&tx)) / rho)),
    }
}

/// A random transform from the test family: small rational `g, g1, g2`,
/// `rho` a positive constant or `c (1 + a x^2)`, `theta` a low-degree
/// polynomial in `t, x`.
pub fn random_transform(seed: u64) -> EquivalenceTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut small = |lo: i64, hi: i64, den: i64| q(rng.random_range(lo..=hi), den);
    let mut gamma = small(-6, 6, 4);
    while gamma.is_zero() || gamma.abs() < q(1, 2) {
        gamma = small(-6, 6, 4);
    }
    let gamma1 = small(-4, 4, 2);
    let gamma2 = small(-4, 4, 2);
    let c = small(1, 8, 4);
    let a = small(0, 4, 4);
    let (th_t, th_x2, th_tx) = (small(-3, 3, 2), small(-2, 2, 4), small(-2, 2, 4));
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let epsilon = if rng2.random_bool(0.5) { 1 } else { -1 };
    let rho = Expr::num(c) * (Expr::one() + Expr::num(a) * Expr::x().powi(2));
    let theta = Expr::add([
        Expr::num(th_t) * Expr::t(),
        Expr::num(th_x2) * Expr::x().powi(2),
        Expr::num(th_tx) * Expr::t() * Expr::x(),
    ]);
    EquivalenceTransform::new(gamma, gamma1, gamma2, epsilon, normalize(&rho), normalize(&theta))
}
