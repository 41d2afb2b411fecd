//! Exact field arithmetic and the linear-algebra kernel everything else is
//! built on.

mod echelon;
mod matrix;
mod scalar;
mod sparse;

pub use echelon::{left_kernel, rank_of, solve_left, transpose, Echelon, Rref};
pub use matrix::{kernel_basis, rref, solve, Matrix};
pub use scalar::{FieldSpec, Scalar};
pub use sparse::{Accumulator, SparseVec};
