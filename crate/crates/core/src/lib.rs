//! Exact-arithmetic models of the gap-p Virasoro algebras and their
//! non-weight modules: Whittaker modules with their irreducibility
//! criteria, free-field (Fock) realizations, rank-one `U(CL_0)`-free
//! modules, and tensor products of these, all over exact Gaussian
//! rationals with brute-force finite-window checks for every identity.

pub mod algebra;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod omega;
pub mod parse;
pub mod scalar;
pub mod subalgebra;
pub mod suite;
pub mod tensor;
pub mod twisted;
pub mod verdict;
pub mod whittaker;

pub use algebra::{BasisSymbol, GapParameter, GradedDegree, LieElement};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use subalgebra::{is_member, IndexSet, SubalgebraSpec};
pub use verdict::Verdict;
