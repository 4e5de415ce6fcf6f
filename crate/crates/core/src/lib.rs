//! Numerical free probability around Cauchy-Stieltjes kernel families.

pub mod conv;
pub mod csk;
pub mod error;
pub mod limits;
pub mod measure;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{parse_measure_spec, Atomic, Measure, MomentSeq, NamedDensity};
pub use series::TruncatedSeries;
