use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Coordinates of the second-order jet space over (t, x; u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetVar {
    T,
    X,
    U,
    Ut,
    Ux,
    Utt,
    Utx,
    Uxx,
}

impl JetVar {
    pub const ALL: [JetVar; 8] = [
        JetVar::T,
        JetVar::X,
        JetVar::U,
        JetVar::Ut,
        JetVar::Ux,
        JetVar::Utt,
        JetVar::Utx,
        JetVar::Uxx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JetVar::T => "t",
            JetVar::X => "x",
            JetVar::U => "u",
            JetVar::Ut => "ut",
            JetVar::Ux => "ux",
            JetVar::Utt => "utt",
            JetVar::Utx => "utx",
            JetVar::Uxx => "uxx",
        }
    }

    pub fn from_name(name: &str) -> Option<JetVar> {
        JetVar::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Differential order of the coordinate: 0 for t, x, u.
    pub fn order(self) -> u8 {
        match self {
            JetVar::T | JetVar::X | JetVar::U => 0,
            JetVar::Ut | JetVar::Ux => 1,
            JetVar::Utt | JetVar::Utx | JetVar::Uxx => 2,
        }
    }
}

/// A named symbol: either a jet coordinate or a free parameter (beta, k, m, q, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    Jet(JetVar),
    Param(Arc<str>),
}

impl Symbol {
    pub const T: Symbol = Symbol::Jet(JetVar::T);
    pub const X: Symbol = Symbol::Jet(JetVar::X);
    pub const U: Symbol = Symbol::Jet(JetVar::U);
    pub const UT: Symbol = Symbol::Jet(JetVar::Ut);
    pub const UX: Symbol = Symbol::Jet(JetVar::Ux);
    pub const UTT: Symbol = Symbol::Jet(JetVar::Utt);
    pub const UTX: Symbol = Symbol::Jet(JetVar::Utx);
    pub const UXX: Symbol = Symbol::Jet(JetVar::Uxx);

    /// Resolves a name to a jet coordinate when it is one, otherwise a parameter.
    pub fn new(name: &str) -> Symbol {
        match JetVar::from_name(name) {
            Some(v) => Symbol::Jet(v),
            None => Symbol::Param(Arc::from(name)),
        }
    }

    pub fn param(name: &str) -> Symbol {
        Symbol::Param(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Jet(v) => v.name(),
            Symbol::Param(p) => p,
        }
    }

    pub fn jet(&self) -> Option<JetVar> {
        match self {
            Symbol::Jet(v) => Some(*v),
            Symbol::Param(_) => None,
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(_))
    }
}

// Parameters sort before jet coordinates so that products print as `beta*t`.
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Symbol::Param(a), Symbol::Param(b)) => a.cmp(b),
            (Symbol::Param(_), Symbol::Jet(_)) => Ordering::Less,
            (Symbol::Jet(_), Symbol::Param(_)) => Ordering::Greater,
            (Symbol::Jet(a), Symbol::Jet(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<JetVar> for Symbol {
    fn from(v: JetVar) -> Self {
        Symbol::Jet(v)
    }
}
