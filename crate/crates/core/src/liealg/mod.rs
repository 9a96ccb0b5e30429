//! Point vector fields in `(t, x, u)`, their brackets, the admissible
//! operator form, and structure constants of three-dimensional realizations.

mod algebra;
mod field;
mod form_two;
mod span;

pub use algebra::{
    lookup_algebra, match_algebra, sl2r, so3, structure_constants, AbstractAlgebra, Affine, AlgebraError,
    AlgebraMatch, Provenance, QConstraint, StructureConstants, ABSTRACT_ALGEBRAS,
};
pub use field::{commutator, VectorField};
pub use form_two::{decompose_operator, FormTwoOperator, NotInFormTwo};
pub use span::{express_in_basis, rationalize, SpanError, MAX_DENOMINATOR};
