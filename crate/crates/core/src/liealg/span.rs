use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::VectorField;
use crate::expr::{EvalError, Expr, Rational, Symbol};
use crate::simplify::{is_zero, mix_seed, SamplingDomain, ZeroTestError, ZeroVerdict};

/// Denominator bound for recovered coefficients.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

const SPAN_POINTS: usize = 8;
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpanError {
    #[error("basis is degenerate (singular value ratio {0:e})")]
    DegenerateBasis(f64),
    #[error("not in the span of the basis: {0}")]
    NotInSpan(String),
    #[error("coefficient {0} has no rational form with denominator at most 10^6")]
    Irrational(f64),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Best continued-fraction approximation with denominator at most
/// `max_den`, accepted only if it agrees with `x` to about 1e-10.
pub fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-10 * x.abs().max(1.0) {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn sample_rows(
    fields: &[&VectorField],
    domain: &SamplingDomain,
    seed: u64,
) -> Result<Vec<Vec<[f64; 3]>>, SpanError> {
    let needed: BTreeSet<Symbol> = fields
        .iter()
        .flat_map(|f| f.components().into_iter().flat_map(Expr::free_symbols))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(SPAN_POINTS);
    for _ in 0..SPAN_POINTS {
        let mut attempts = 0;
        loop {
            attempts += 1;
            let row = domain.sample(&needed, &mut rng).and_then(|p| {
                fields
                    .iter()
                    .map(|f| Ok([f.xi1.eval(&p)?, f.xi2.eval(&p)?, f.eta.eval(&p)?]))
                    .collect::<Result<Vec<_>, EvalError>>()
            });
            match row {
                Ok(r) => {
                    points.push(r);
                    break;
                }
                Err(EvalError::Domain(_)) if attempts < 100 => {}
                Err(e) => return Err(SpanError::ZeroTest(e.into())),
            }
        }
    }
    Ok(points)
}

/// Finds constants `c` with `z = sum c_i * basis_i`. Coefficients of all
/// fields must already have their parameters bound (or fixed in `domain`).
pub fn express_in_basis(
    z: &VectorField,
    basis: &[VectorField],
    domain: &SamplingDomain,
    seed: u64,
) -> Result<Vec<Rational>, SpanError> {
    let n = basis.len();
    let mut fields: Vec<&VectorField> = basis.iter().collect();
    fields.push(z);
    let rows = sample_rows(&fields, domain, seed)?;
    let m = 3 * rows.len();
    let a = DMatrix::from_fn(m, n, |r, c| rows[r / 3][c][r % 3]);
    let b = DVector::from_fn(m, |r, _| rows[r / 3][n][r % 3]);

    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if n > 0 && (hi == 0.0 || lo / hi < RANK_TOL) {
        return Err(SpanError::DegenerateBasis(if hi == 0.0 { 0.0 } else { lo / hi }));
    }
    if z.is_zero() {
        return Ok(vec![Rational::from_integer(0.into()); n]);
    }
    let sol = svd.solve(&b, 1e-14).map_err(|e| SpanError::NotInSpan(e.to_string()))?;

    let mut coeffs = Vec::with_capacity(n);
    for &v in sol.iter() {
        coeffs.push(rationalize(v, MAX_DENOMINATOR).ok_or(SpanError::Irrational(v))?);
    }

    let combo = basis
        .iter()
        .zip(&coeffs)
        .fold(VectorField::zero(), |acc, (e, c)| &acc + &e.scale(&Expr::num(c.clone())));
    let residual = z - &combo;
    for (name, comp) in ["d_t", "d_x", "d_u"].iter().zip(residual.components()) {
        if let ZeroVerdict::NonZero(w) = is_zero(comp, domain, mix_seed(seed, name))? {
            return Err(SpanError::NotInSpan(format!(
                "{name} component of the remainder is {} at {:?}",
                w.value, w.point
            )));
        }
    }
    Ok(coeffs)
}
