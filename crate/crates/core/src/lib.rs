//! Exact computations on algebraic branching programs (ABPs): evaluation in the
//! trace and single-(source,sink) models, flattening-rank width minimization,
//! monotone ε-debordering, the parity family `f₀`, conciseness, tangent-space
//! dimensions and flow-space certificates.

pub mod abp;
pub mod concise;
pub mod deborder;
pub mod dot;
pub mod error;
pub mod family;
pub mod flow;
pub mod json;
pub mod laurent;
pub mod matrix;
pub mod nisan;
pub mod random;
pub mod scalar;
pub mod tangent;
pub mod tensor;

pub use abp::{Abp, Diagnostic, EdgeId, Format, LinearLabel, Model};
pub use error::{Error, Result};
pub use laurent::LaurentEps;
pub use matrix::SparseMatrix;
pub use scalar::{Rational, Scalar};
pub use tensor::{EpsTensor, LayeredTensor, Monomial, RationalTensor};
