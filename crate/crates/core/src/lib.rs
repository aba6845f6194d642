//! Combinatorial decision procedures for right-angled simple handlebodies:
//! flagness and belt detection, the orbifold fundamental group and its word
//! problem, homology of manifold doubles and universal covers, curvature
//! verdicts, and a brute-force oracle that rebuilds the double explicitly.

pub mod complex;
pub mod covers;
pub mod error;
pub mod handlebody;
pub mod instances;
pub mod linalg;
pub mod oracle;
pub mod words;

pub use complex::{Coefficients, HomologyResult, SimplicialComplex};
pub use error::{Error, Result};
pub use handlebody::{CuttingBelt, SimpleHandlebody, SimplePolytope};
pub use linalg::AbelianGroup;
