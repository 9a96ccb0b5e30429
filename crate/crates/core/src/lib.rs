//! Symbolic verification of symmetry realizations for `u_tt = u_xx + F(t, x, u, u_x)`.

pub mod catalog;
pub mod determine;
pub mod equivtrans;
pub mod expr;
pub mod liealg;
pub mod parser;
pub mod simplify;

pub use expr::{Expr, JetVar, Rational, Symbol};
pub use liealg::VectorField;
pub use parser::{parse_expr, parse_vectorfield, ParseError};
pub use simplify::{is_zero, normalize, SamplingDomain, ZeroVerdict};
