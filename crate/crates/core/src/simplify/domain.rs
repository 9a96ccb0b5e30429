use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::expr::{EvalError, Expr, JetPoint, JetVar, OpaqueModel, Symbol};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

const DEFAULT_LO: f64 = 0.3;
const DEFAULT_HI: f64 = 1.7;

/// Where sample points for the numeric zero test are drawn from.
///
/// Unlisted base coordinates and parameters default to `[0.3, 1.7]`;
/// derivative variables default to `[-1.7, -0.3] U [0.3, 1.7]`. Symbols may
/// be pinned, or derived from other sampled symbols (used when a residual
/// is expressed in transformed coordinates).
#[derive(Debug, Clone, Default)]
pub struct SamplingDomain {
    ranges: BTreeMap<Symbol, Vec<Interval>>,
    fixed: BTreeMap<Symbol, f64>,
    derived: Vec<(Symbol, Expr)>,
    pub opaque: OpaqueModel,
}

impl SamplingDomain {
    pub fn new() -> SamplingDomain {
        SamplingDomain::default()
    }

    pub fn with_range(mut self, s: Symbol, lo: f64, hi: f64) -> SamplingDomain {
        self.set_range(s, lo, hi);
        self
    }

    pub fn set_range(&mut self, s: Symbol, lo: f64, hi: f64) {
        self.ranges.insert(s, vec![Interval::new(lo, hi)]);
    }

    pub fn set_union(&mut self, s: Symbol, parts: Vec<Interval>) {
        assert!(!parts.is_empty());
        self.ranges.insert(s, parts);
    }

    /// Removes an explicit range for `s`, returning what `s` was sampled from.
    pub fn take_range(&mut self, s: &Symbol) -> Vec<Interval> {
        let r = self.ranges_for(s);
        self.ranges.remove(s);
        r
    }

    pub fn fix(&mut self, s: Symbol, v: f64) {
        self.fixed.insert(s, v);
    }

    pub fn fixed(&self) -> &BTreeMap<Symbol, f64> {
        &self.fixed
    }

    /// `s` is computed as `e` evaluated on the other sampled values. Derived
    /// symbols are evaluated in insertion order.
    pub fn derive(&mut self, s: Symbol, e: Expr) {
        self.derived.retain(|(d, _)| d != &s);
        self.derived.push((s, e));
    }

    pub fn ranges_for(&self, s: &Symbol) -> Vec<Interval> {
        if let Some(r) = self.ranges.get(s) {
            return r.clone();
        }
        match s.jet() {
            Some(JetVar::T | JetVar::X | JetVar::U) | None => vec![Interval::new(DEFAULT_LO, DEFAULT_HI)],
            Some(_) => vec![Interval::new(-DEFAULT_HI, -DEFAULT_LO), Interval::new(DEFAULT_LO, DEFAULT_HI)],
        }
    }

    /// Symbols that have to be drawn at random to give values to `needed`.
    pub fn sampled_symbols(&self, needed: &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = BTreeSet::new();
        let derived: BTreeSet<&Symbol> = self.derived.iter().map(|(s, _)| s).collect();
        let mut pending: Vec<Symbol> = needed.iter().cloned().collect();
        let mut seen = BTreeSet::new();
        while let Some(s) = pending.pop() {
            if !seen.insert(s.clone()) || self.fixed.contains_key(&s) {
                continue;
            }
            if derived.contains(&s) {
                let (_, e) = self.derived.iter().find(|(d, _)| d == &s).unwrap();
                pending.extend(e.free_symbols());
            } else {
                out.insert(s);
            }
        }
        out
    }

    /// Draws one point covering `needed`.
    pub fn sample<R: Rng + ?Sized>(&self, needed: &BTreeSet<Symbol>, rng: &mut R) -> Result<JetPoint, EvalError> {
        let mut p = JetPoint {
            values: Default::default(),
            opaque: self.opaque.clone(),
        };
        for (s, v) in &self.fixed {
            p.set(s.clone(), *v);
        }
        for s in self.sampled_symbols(needed) {
            let v = draw(&self.ranges_for(&s), rng);
            p.set(s, v);
        }
        for (s, e) in &self.derived {
            if self.fixed.contains_key(s) {
                continue;
            }
            if e.free_symbols().iter().all(|d| p.get(d).is_some()) {
                let v = e.eval(&p)?;
                p.set(s.clone(), v);
            }
        }
        Ok(p)
    }
}

fn draw<R: Rng + ?Sized>(parts: &[Interval], rng: &mut R) -> f64 {
    let total: f64 = parts.iter().map(Interval::len).sum();
    let mut pick = rng.random_range(0.0..total);
    for iv in parts {
        if pick < iv.len() {
            return iv.lo + pick;
        }
        pick -= iv.len();
    }
    let last = parts.last().unwrap();
    last.hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defaults_respect_bounds() {
        let d = SamplingDomain::new();
        let needed: BTreeSet<Symbol> = [Symbol::T, Symbol::UX, Symbol::new("k")].into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = d.sample(&needed, &mut rng).unwrap();
            let t = p.get(&Symbol::T).unwrap();
            assert!((0.3..=1.7).contains(&t));
            let ux = p.get(&Symbol::UX).unwrap().abs();
            assert!((0.3..=1.7).contains(&ux));
            assert!(p.get(&Symbol::new("k")).unwrap() > 0.0);
        }
    }

    #[test]
    fn derived_symbols_follow_sources() {
        let mut d = SamplingDomain::new();
        d.fix(Symbol::new("g"), 2.0);
        d.derive(Symbol::T, Expr::param("g") * Expr::param("t0"));
        let needed: BTreeSet<Symbol> = [Symbol::T].into_iter().collect();
        assert_eq!(d.sampled_symbols(&needed), [Symbol::new("t0")].into_iter().collect());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = d.sample(&needed, &mut rng).unwrap();
        let t0 = p.get(&Symbol::new("t0")).unwrap();
        assert_eq!(p.get(&Symbol::T).unwrap(), 2.0 * t0);
    }
}
