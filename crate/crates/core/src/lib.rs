//! Exact computations for graded connected algebras `A = T(V)/I`: minimal
//! resolutions of the trivial module, the Tor coalgebra, and Ore extensions.

mod error;

pub mod algebra;
pub mod fixture;
pub mod fuzz;
pub mod linalg;
pub mod module;
pub mod ore;
pub mod presentation;
pub mod resolution;
pub mod tor;

pub use algebra::{Element, GradedModel};
pub use error::{Error, Result};
pub use fixture::{ChainMapFixture, LoadedFixture, MatrixSpec};
pub use linalg::{FieldSpec, Matrix, Scalar, SparseVec};
pub use module::{FreeMap, FreeModule};
pub use ore::{
    build_ore_model, build_p_q, construct_chain_map, extend_presentation, mapping_cone, minimality_report,
    validate_ore, verify_chain_map, ChainMap, CheckedOre, OreComplexes, OreModel,
};
pub use presentation::{parse_ore, parse_polynomial, parse_presentation, NCPoly, OreSpec, Presentation, Word};
pub use resolution::{koszul_verdict, minimal_resolution, BettiTable, Resolution, Verdict};
pub use tor::{k2_verdict, tor_dims, tor_induced_map, TorClass, TorCoalgebra};
