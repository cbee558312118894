//! Exact-arithmetic operads over differential graded modules: symmetric and
//! non-symmetric operads given by structure tables, free operads built by
//! stages, and the comparison between the two flavors.

pub mod dg;
pub mod error;
pub mod free;
pub mod linalg;
pub mod operad;
pub mod par;
pub mod perm;
pub mod relations;
pub mod report;
pub mod scalar;
pub mod smodule;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use operad::{Operad, OperadMorphism, TableOperad};
pub use par::Execution;
pub use perm::Permutation;
pub use report::{Failure, ValidationReport};
pub use scalar::{Field, Scalar};
pub use smodule::{Flavor, NModule, SModMorphism, SModule};
