//! Exact construction of exceptional Hermite polynomials and numerical
//! verification of the weighted log-energy at their zeros.

pub mod dnu;
pub mod energy;
pub mod error;
pub mod fit;
pub mod gersgorin;
pub mod hermite;
pub mod linalg;
pub mod optimality;
pub mod partition;
pub mod poly;
pub mod scalar;
pub mod zeros;

pub use error::{Error, Result};
pub use partition::Partition;
pub use poly::Poly;
pub use scalar::{BigFloat, Complex, Mp, Real};

/// Integer-coefficient polynomial.
pub type ExactPoly = Poly<num_bigint::BigInt>;

pub type Mp128 = Mp<128>;
pub type Mp192 = Mp<192>;
pub type Mp256 = Mp<256>;
pub type Mp384 = Mp<384>;
pub type Mp512 = Mp<512>;
