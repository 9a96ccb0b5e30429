#![allow(dead_code)]

use lieverify::expr::{Expr, JetPoint, OpaqueModel, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn positive_leaf<R: Rng>(rng: &mut R) -> Expr {
    match rng.random_range(0..3) {
        0 => Expr::t(),
        1 => Expr::x(),
        _ => Expr::u(),
    }
}

fn leaf<R: Rng>(rng: &mut R) -> Expr {
    match rng.random_range(0..6) {
        0..=2 => positive_leaf(rng),
        3 => Expr::ux(),
        _ => Expr::frac(rng.random_range(-5..=5), rng.random_range(1..=4)),
    }
}

/// A random expression in `t, x, u, ux` that is smooth where `t, x, u > 0`.
/// With `opaque` set it may contain `G(w)` and `H(w1, w2)`.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, opaque: bool) -> Expr {
    if depth == 0 {
        return leaf(rng);
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1, opaque);
    match rng.random_range(0..11) {
        0 | 1 => Expr::add([sub(rng), sub(rng)]),
        2 => sub(rng) - sub(rng),
        3 | 4 => Expr::mul([sub(rng), sub(rng)]),
        5 => sub(rng).powi(rng.random_range(2..=3)),
        6 => Expr::pow(positive_leaf(rng), Expr::frac(rng.random_range(-3..=3), rng.random_range(1..=2))),
        7 => match rng.random_range(0..3) {
            0 => Expr::sin(sub(rng)),
            1 => Expr::cos(sub(rng)),
            _ => Expr::exp(Expr::frac(1, 3) * sub(rng)),
        },
        8 => Expr::ln_abs(positive_leaf(rng)),
        9 => sub(rng) / (Expr::int(2) + Expr::sin(sub(rng))),
        _ if opaque => {
            if rng.random_bool(0.5) {
                Expr::opaque("G", vec![sub(rng)], vec![0])
            } else {
                Expr::opaque("H", vec![sub(rng), sub(rng)], vec![0, 0])
            }
        }
        _ => leaf(rng),
    }
}

/// A point with `t, x, u` in `[0.3, 1.7]` and `ux` in `[-1.7, 1.7]`.
pub fn random_point<R: Rng>(rng: &mut R, opaque_seed: u64) -> JetPoint {
    let mut p = JetPoint::new();
    for s in [Symbol::T, Symbol::X, Symbol::U] {
        p.set(s, rng.random_range(0.3..1.7));
    }
    p.set(Symbol::UX, rng.random_range(-1.7..1.7));
    p.opaque = OpaqueModel::Analytic { seed: opaque_seed };
    p
}
