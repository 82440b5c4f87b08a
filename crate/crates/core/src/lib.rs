//! Local epsilon factors, Gauss sums and Jacobi sums for finite-order characters of `Q_p`,
//! computed exactly in cyclotomic fields, together with a harness that checks the standard
//! identities between them and a three-case twisting formula.

pub mod characters;
pub mod cli;
pub mod cyclo;
pub mod epsilon;
pub mod error;
pub mod padic;
pub mod suites;
pub mod sums;
pub mod twist;

pub use characters::{AddChar, MultChar};
pub use cyclo::{Cyclo, HalfScaled, RootOfUnity};
pub use error::{Error, Result};
pub use padic::{Prime, UnitGroupStructure, ValUnit};
