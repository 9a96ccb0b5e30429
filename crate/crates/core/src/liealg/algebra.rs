use std::fmt;
use std::sync::LazyLock;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{commutator, express_in_basis, SpanError, VectorField};
use crate::expr::Rational;
use crate::simplify::{mix_seed, SamplingDomain};

/// `c^k_{ij}` for an `n`-dimensional algebra, `[e_i, e_j] = sum_k c^k_{ij} e_k`.
/// Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("[e{}, e{}] is not in the span of the generators: {reason}", .i + 1, .j + 1)]
    NotClosed { i: usize, j: usize, reason: SpanError },
    #[error("computed constants violate the Jacobi identity")]
    Jacobi,
}

impl StructureConstants {
    pub fn zero(n: usize) -> StructureConstants {
        StructureConstants {
            n,
            c: vec![Rational::zero(); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[self.idx(i, j, k)]
    }

    /// Sets `[e_i, e_j]` and, by antisymmetry, `[e_j, e_i]`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: &[Rational]) {
        for (k, val) in v.iter().enumerate() {
            let a = self.idx(i, j, k);
            let b = self.idx(j, i, k);
            self.c[a] = val.clone();
            self.c[b] = -val.clone();
        }
    }

    pub fn bracket(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.n).map(|k| self.get(i, j, k).clone()).collect()
    }

    /// `[ei, ej]` as a combination of basis elements, `0` when it vanishes.
    pub fn bracket_string(&self, i: usize, j: usize) -> String {
        let s = combination(&self.bracket(i, j));
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| (0..self.n).all(|k| *self.get(i, j, k) == -self.get(j, i, k).clone())))
    }

    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += self.get(i, j, m) * self.get(m, k, l);
                            s += self.get(j, k, m) * self.get(m, i, l);
                            s += self.get(k, i, m) * self.get(m, j, l);
                        }
                        if !s.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `K_ij = tr(ad e_i ad e_j)`.
    pub fn killing_form(&self) -> Vec<Vec<Rational>> {
        let n = self.n;
        let mut k = vec![vec![Rational::zero(); n]; n];
        for (i, row) in k.iter_mut().enumerate() {
            for (j, kij) in row.iter_mut().enumerate() {
                for a in 0..n {
                    for b in 0..n {
                        // (ad e_i)^b_a = c^b_{ia}
                        *kij += self.get(i, a, b) * self.get(j, b, a);
                    }
                }
            }
        }
        k
    }

    /// Nondegenerate Killing form (Cartan's criterion).
    pub fn is_semisimple(&self) -> bool {
        !determinant(self.killing_form()).is_zero()
    }
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        #[allow(clippy::needless_range_loop)]
        for r in col + 1..n {
            let f = &m[r][col] / &pivot;
            for c in col..n {
                let d = &f * &m[col][c];
                m[r][c] -= d;
            }
        }
    }
    det
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let b = self.bracket(i, j);
                if b.iter().all(Zero::is_zero) {
                    continue;
                }
                if any {
                    f.write_str(", ")?;
                }
                any = true;
                write!(f, "[e{}, e{}] = {}", i + 1, j + 1, combination(&b))?;
            }
        }
        if !any {
            f.write_str("abelian")?;
        }
        Ok(())
    }
}

fn combination(v: &[Rational]) -> String {
    let mut s = String::new();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&format!("e{}", k + 1));
    }
    s
}

/// Structure constants of the span of `gens`. Parameters in the generators
/// must already be bound.
pub fn structure_constants(
    gens: &[VectorField],
    domain: &SamplingDomain,
    seed: u64,
) -> Result<StructureConstants, AlgebraError> {
    let n = gens.len();
    let mut sc = StructureConstants::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            let z = commutator(&gens[i], &gens[j]);
            let s = mix_seed(seed, &format!("bracket {i} {j}"));
            let v = express_in_basis(&z, gens, domain, s).map_err(|reason| AlgebraError::NotClosed { i, j, reason })?;
            sc.set_bracket(i, j, &v);
        }
    }
    if !sc.satisfies_jacobi() {
        return Err(AlgebraError::Jacobi);
    }
    Ok(sc)
}

/// `c0 + cq*q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub c0: Rational,
    pub cq: Rational,
}

impl Affine {
    fn at(&self, q: Option<&Rational>) -> Option<Rational> {
        if self.cq.is_zero() {
            Some(self.c0.clone())
        } else {
            q.map(|q| &self.c0 + &self.cq * q)
        }
    }
}

fn num(i: i64) -> Affine {
    Affine {
        c0: Rational::from_integer(i.into()),
        cq: Rational::zero(),
    }
}

fn num_q(i: i64, j: i64) -> Affine {
    Affine {
        c0: Rational::from_integer(i.into()),
        cq: Rational::from_integer(j.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QConstraint {
    None,
    /// `0 < |q| < 1`
    AbsInOpenUnit,
    /// `q > 0`
    Positive,
}

impl QConstraint {
    pub fn admits(self, q: Option<&Rational>) -> bool {
        match (self, q) {
            (QConstraint::None, _) => true,
            (_, None) => false,
            (QConstraint::AbsInOpenUnit, Some(q)) => !q.is_zero() && q.abs() < Rational::one(),
            (QConstraint::Positive, Some(q)) => q.is_positive(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Printed,
    /// Brackets were not printed with the classification and are read off
    /// the listed realizations.
    DerivedFromRealization,
}

/// A named three-dimensional Lie algebra in a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractAlgebra {
    pub name: &'static str,
    /// Nonzero brackets `[e_i, e_j]` with `i < j`.
    pub brackets: Vec<(usize, usize, [Affine; 3])>,
    pub q: QConstraint,
    pub provenance: Provenance,
}

impl AbstractAlgebra {
    pub fn is_parametric(&self) -> bool {
        self.brackets.iter().any(|(_, _, v)| v.iter().any(|a| !a.cq.is_zero()))
    }

    /// The table at a given `q`, or `None` when a needed `q` is missing.
    pub fn table(&self, q: Option<&Rational>) -> Option<StructureConstants> {
        let mut sc = StructureConstants::zero(3);
        for (i, j, v) in &self.brackets {
            let vals = v.iter().map(|a| a.at(q)).collect::<Option<Vec<_>>>()?;
            sc.set_bracket(*i, *j, &vals);
        }
        Some(sc)
    }

    pub fn matches(&self, c: &StructureConstants, q: Option<&Rational>) -> bool {
        let q = if self.is_parametric() { q } else { None };
        if self.is_parametric() && !self.q.admits(q) {
            return false;
        }
        self.table(q).is_some_and(|t| &t == c)
    }
}

/// The three-dimensional solvable algebras used by the catalog.
pub static ABSTRACT_ALGEBRAS: LazyLock<Vec<AbstractAlgebra>> = LazyLock::new(|| {
    use Provenance::*;
    let z = || num(0);
    let alg = |name, brackets, q, provenance| AbstractAlgebra {
        name,
        brackets,
        q,
        provenance,
    };
    vec![
        alg("A3.1", vec![], QConstraint::None, Printed),
        alg("A3.2", vec![(0, 1, [z(), num(1), z()])], QConstraint::None, Printed),
        alg("A3.3", vec![(1, 2, [num(1), z(), z()])], QConstraint::None, Printed),
        alg(
            "A3.4",
            vec![(0, 2, [num(1), z(), z()]), (1, 2, [num(1), num(1), z()])],
            QConstraint::None,
            Printed,
        ),
        alg(
            "A3.5",
            vec![(0, 2, [num(1), z(), z()]), (1, 2, [z(), num(1), z()])],
            QConstraint::None,
            Printed,
        ),
        alg(
            "A3.6",
            vec![(0, 2, [num(1), z(), z()]), (1, 2, [z(), num(-1), z()])],
            QConstraint::None,
            Printed,
        ),
        alg(
            "A3.7",
            vec![(0, 2, [num(1), z(), z()]), (1, 2, [z(), num_q(0, 1), z()])],
            QConstraint::AbsInOpenUnit,
            Printed,
        ),
        alg(
            "A3.8",
            vec![(0, 2, [z(), num(1), z()]), (1, 2, [num(-1), z(), z()])],
            QConstraint::None,
            DerivedFromRealization,
        ),
        alg(
            "A3.9",
            vec![(0, 2, [num_q(0, 1), num(-1), z()]), (1, 2, [num(1), num_q(0, 1), z()])],
            QConstraint::Positive,
            DerivedFromRealization,
        ),
    ]
});

pub fn lookup_algebra(name: &str) -> Option<&'static AbstractAlgebra> {
    ABSTRACT_ALGEBRAS.iter().find(|a| a.name == name)
}

/// `so(3)`: `[e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2`.
pub fn so3() -> StructureConstants {
    let mut sc = StructureConstants::zero(3);
    let e = |k: usize| (0..3).map(|i| Rational::from_integer(((i == k) as i64).into())).collect::<Vec<_>>();
    sc.set_bracket(0, 1, &e(2));
    sc.set_bracket(1, 2, &e(0));
    sc.set_bracket(2, 0, &e(1));
    sc
}

/// `sl(2, R)`: `[e1, e2] = 2 e2, [e1, e3] = -2 e3, [e2, e3] = e1`.
pub fn sl2r() -> StructureConstants {
    let mut sc = StructureConstants::zero(3);
    let r = |v: [i64; 3]| v.map(|i| Rational::from_integer(i.into())).to_vec();
    sc.set_bracket(0, 1, &r([0, 2, 0]));
    sc.set_bracket(0, 2, &r([0, 0, -2]));
    sc.set_bracket(1, 2, &r([1, 0, 0]));
    sc
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMatch {
    pub name: Option<&'static str>,
    pub semisimple: bool,
    pub matches_so3: bool,
    pub matches_sl2: bool,
}

/// Compares `c` against the abstract catalog in the given basis order.
pub fn match_algebra(c: &StructureConstants, q: Option<&Rational>) -> AlgebraMatch {
    let name = if c.dim() == 3 {
        ABSTRACT_ALGEBRAS.iter().find(|a| a.matches(c, q)).map(|a| a.name)
    } else {
        None
    };
    AlgebraMatch {
        name,
        semisimple: c.is_semisimple(),
        matches_so3: *c == so3(),
        matches_sl2: *c == sl2r(),
    }
}
