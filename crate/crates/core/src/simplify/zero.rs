use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{collect_atoms, normalize, Atom, SamplingDomain};
use crate::expr::{EvalError, Expr, JetPoint, Node, OpaqueModel, Symbol};

/// Parameters of the numeric tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTestConfig {
    pub points: usize,
    /// Below this relative size every coefficient counts as zero.
    pub zero_tol: f64,
    /// At or above this relative size a coefficient is a witness of nonzero.
    pub nonzero_tol: f64,
    /// Resampling budget per point when evaluation hits a domain error.
    pub max_attempts: usize,
}

impl Default for ZeroTestConfig {
    fn default() -> ZeroTestConfig {
        ZeroTestConfig {
            points: 32,
            zero_tol: 1e-9,
            nonzero_tol: 1e-6,
            max_attempts: 100,
        }
    }
}

impl ZeroTestConfig {
    pub fn with_points(points: usize) -> ZeroTestConfig {
        ZeroTestConfig {
            points,
            ..ZeroTestConfig::default()
        }
    }
}

/// A sample point at which one coefficient is clearly nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub atom: String,
    pub coefficient: Expr,
    pub point: BTreeMap<String, f64>,
    pub value: f64,
    pub scale: f64,
    pub seed: u64,
    /// Seed of the analytic stand-in for opaque functions, when the
    /// expression could not be split over its atoms.
    pub opaque_seed: Option<u64>,
}

impl Witness {
    /// Evaluates the offending coefficient again at the recorded point.
    pub fn reevaluate(&self) -> Result<f64, EvalError> {
        let mut p = JetPoint::new();
        for (k, v) in &self.point {
            p.set(Symbol::new(k), *v);
        }
        if let Some(seed) = self.opaque_seed {
            p.opaque = OpaqueModel::Analytic { seed };
        }
        self.coefficient.eval(&p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    ProvedZero,
    NumericallyZero {
        points: usize,
        max_abs: f64,
        /// Some value fell between the two tolerances and a second round
        /// of points was drawn.
        ambiguous: bool,
    },
    NonZero(Box<Witness>),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::ProvedZero => "proved_zero",
            ZeroVerdict::NumericallyZero { .. } => "numerically_zero",
            ZeroVerdict::NonZero(_) => "nonzero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("could not find a valid sample point after {attempts} attempts: {last}")]
    DomainExhausted { attempts: usize, last: EvalError },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Mixes a context label into a seed so that independent checks draw
/// independent points.
pub fn mix_seed(seed: u64, context: &str) -> u64 {
    crate::expr::eval::fnv1a(context.as_bytes(), seed)
}

pub fn is_zero(e: &Expr, domain: &SamplingDomain, seed: u64) -> Result<ZeroVerdict, ZeroTestError> {
    is_zero_with(e, domain, seed, &ZeroTestConfig::default())
}

/// Two-tier zero test. Tier 1 normalizes and splits over opaque atoms; if
/// nothing survives the expression is proved zero. Tier 2 evaluates every
/// surviving coefficient at seeded random points.
pub fn is_zero_with(e: &Expr, domain: &SamplingDomain, seed: u64, cfg: &ZeroTestConfig) -> Result<ZeroVerdict, ZeroTestError> {
    let n = normalize(e);
    if n.is_zero() {
        return Ok(ZeroVerdict::ProvedZero);
    }
    let (coeffs, opaque_seed) = match collect_atoms(&n) {
        Ok(basis) => {
            if basis.coeffs.is_empty() {
                return Ok(ZeroVerdict::ProvedZero);
            }
            let cs = merge_equal_atoms(basis.coeffs, domain, seed, cfg);
            if cs.is_empty() {
                return Ok(ZeroVerdict::NumericallyZero {
                    points: cfg.points,
                    max_abs: 0.0,
                    ambiguous: false,
                });
            }
            let cs = cs.into_iter().map(|(a, c)| (a.to_string(), c)).collect::<Vec<_>>();
            (cs, None)
        }
        Err(_) => (vec![("<whole>".to_string(), n)], Some(mix_seed(seed, "opaque"))),
    };
    let mut domain = domain.clone();
    if let Some(s) = opaque_seed {
        domain.opaque = OpaqueModel::Analytic { seed: s };
    }
    let first = run_round(&coeffs, &domain, seed, cfg, opaque_seed)?;
    if let Some(w) = first.witness {
        return Ok(ZeroVerdict::NonZero(Box::new(w)));
    }
    if first.max_ratio < cfg.zero_tol {
        return Ok(ZeroVerdict::NumericallyZero {
            points: cfg.points,
            max_abs: first.max_abs,
            ambiguous: false,
        });
    }
    let retry_seed = mix_seed(seed, "retry");
    let second = run_round(&coeffs, &domain, retry_seed, cfg, opaque_seed)?;
    if let Some(w) = second.witness {
        return Ok(ZeroVerdict::NonZero(Box::new(w)));
    }
    Ok(ZeroVerdict::NumericallyZero {
        points: 2 * cfg.points,
        max_abs: first.max_abs.max(second.max_abs),
        ambiguous: true,
    })
}

fn same_application(a: &Atom, b: &Atom, domain: &SamplingDomain, seed: u64, cfg: &ZeroTestConfig) -> bool {
    let (Atom::Opaque(a), Atom::Opaque(b)) = (a, b) else {
        return false;
    };
    let (Node::Opaque(x), Node::Opaque(y)) = (a.node(), b.node()) else {
        return false;
    };
    if x.name != y.name || x.index != y.index || x.args.len() != y.args.len() {
        return false;
    }
    x.args.iter().zip(&y.args).enumerate().all(|(i, (p, q))| {
        let d = p - q;
        is_zero_with(&d, domain, mix_seed(seed, &format!("argument {i}")), cfg).is_ok_and(|v| v.is_zero())
    })
}

/// Opaque applications whose arguments agree numerically are the same
/// value; their coefficients are added so that differently written
/// arguments can cancel.
fn merge_equal_atoms(
    coeffs: BTreeMap<Atom, Expr>,
    domain: &SamplingDomain,
    seed: u64,
    cfg: &ZeroTestConfig,
) -> Vec<(Atom, Expr)> {
    let mut merged: Vec<(Atom, Expr)> = Vec::new();
    for (atom, c) in coeffs {
        let seed = mix_seed(seed, "atoms");
        match merged.iter_mut().find(|(rep, _)| same_application(rep, &atom, domain, seed, cfg)) {
            Some((_, rc)) => *rc = normalize(&(&*rc + &c)),
            None => merged.push((atom, c)),
        }
    }
    merged.retain(|(_, c)| !c.is_zero());
    merged
}

struct Round {
    max_abs: f64,
    max_ratio: f64,
    witness: Option<Witness>,
}

fn eval_scaled(c: &Expr, p: &JetPoint) -> Result<(f64, f64), EvalError> {
    match c.node() {
        Node::Add(xs) => {
            let mut v = 0.0;
            let mut s = 0.0;
            for x in xs {
                let xv = x.eval(p)?;
                v += xv;
                s += xv.abs();
            }
            Ok((v, s))
        }
        _ => {
            let v = c.eval(p)?;
            Ok((v, v.abs()))
        }
    }
}

fn run_round(
    coeffs: &[(String, Expr)],
    domain: &SamplingDomain,
    seed: u64,
    cfg: &ZeroTestConfig,
    opaque_seed: Option<u64>,
) -> Result<Round, ZeroTestError> {
    let needed: BTreeSet<Symbol> = coeffs.iter().flat_map(|(_, c)| c.free_symbols()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round = Round {
        max_abs: 0.0,
        max_ratio: 0.0,
        witness: None,
    };
    for _ in 0..cfg.points {
        let mut attempts = 0;
        let (point, values) = loop {
            attempts += 1;
            let result = domain.sample(&needed, &mut rng).and_then(|p| {
                let vals = coeffs.iter().map(|(_, c)| eval_scaled(c, &p)).collect::<Result<Vec<_>, _>>()?;
                Ok((p, vals))
            });
            match result {
                Ok(ok) => break ok,
                Err(EvalError::Domain(msg)) => {
                    if attempts >= cfg.max_attempts {
                        return Err(ZeroTestError::DomainExhausted {
                            attempts,
                            last: EvalError::Domain(msg),
                        });
                    }
                }
                Err(other) => return Err(other.into()),
            }
        };
        for ((atom, c), (v, s)) in coeffs.iter().zip(values) {
            let ratio = v.abs() / (1.0 + s);
            round.max_abs = round.max_abs.max(v.abs());
            round.max_ratio = round.max_ratio.max(ratio);
            if ratio >= cfg.nonzero_tol {
                let mut pt: BTreeMap<String, f64> =
                    point.values.iter().map(|(k, v)| (k.name().to_string(), *v)).collect();
                pt.retain(|k, _| c.free_symbols().iter().any(|s| s.name() == k));
                round.witness = Some(Witness {
                    atom: atom.clone(),
                    coefficient: c.clone(),
                    point: pt,
                    value: v,
                    scale: s,
                    seed,
                    opaque_seed,
                });
                return Ok(round);
            }
        }
    }
    Ok(round)
}
