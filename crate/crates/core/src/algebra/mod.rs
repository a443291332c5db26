//! Normal-ordered multi-site boson algebra and the symbolic equation
//! generator.

pub mod heisenberg;
pub mod monomial;
pub mod poly;

pub use heisenberg::{heisenberg_rhs, Generator};
pub use monomial::{enumerate_basis, NormalMonomial, TruncationRule};
pub use poly::{normal_order, OperatorPolynomial};
