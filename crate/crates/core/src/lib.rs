//! Symbolic engine for the two-colored dg operads A∞, Mor(As)∞ and
//! Ho(As)∞: planar tree terms, their differentials with exact signs,
//! operad cohomology by exact linear algebra, boundary strata of the
//! associated compactified configuration spaces, and A∞ relation checkers
//! built on tensor-coalgebra lifts.

pub mod coalgebra;
pub mod diff;
pub mod enumerate;
pub mod error;
pub mod evaluate;
pub mod graded;
pub mod grammar;
pub mod homology;
pub mod linalg;
pub mod relations;
pub mod strata;
pub mod structure;
pub mod sum;
pub mod tree;

pub use diff::{Differential, SignTable};
pub use enumerate::TreeQuery;
pub use error::{Error, Result};
pub use grammar::{encode, parse};
pub use linalg::{Rational, SparseMatrix};
pub use structure::Structure;
pub use sum::FormalSum;
pub use tree::{Color, Corolla, Family, Sign, Tree};
