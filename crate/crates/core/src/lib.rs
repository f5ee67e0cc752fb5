//! Exact equivariant DT4 counts of `C^4` and of local curves.
//!
//! Every quantity is computed with exact rationals or exact rational
//! functions of `s1`. Floating point is never used.

pub mod character;
pub mod context;
pub mod error;
pub mod field;
pub mod formulas;
pub mod partitions;
pub mod poly;
pub mod qseries;
pub mod rat;
pub mod ratfn;
pub mod verify;
pub mod vertex;

pub use character::{Character, Weight};
pub use context::{Evaluator, LinearForm, NumericContext, ParamContext};
pub use error::{Error, Result};
pub use field::Field;
pub use partitions::{PlanePartition, SolidPartition};
pub use poly::UniPoly;
pub use qseries::QSeries;
pub use rat::Rat;
pub use ratfn::RatFn;
