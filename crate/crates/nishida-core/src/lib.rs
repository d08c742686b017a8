//! Exact mod-2 computer algebra for unstable operations on homology and
//! bordism: dual Steenrod and Faa di Bruno Hopf algebras, total square
//! operations and their formal-group-law twists, Nishida-style commuting
//! squares, Thom reduction, and characteristic-number evaluation for real
//! projective spaces. Everything is degree-truncated but exact below the
//! cap; there is no floating point anywhere.

pub mod dring;
pub mod error;
pub mod f2series;
pub mod hopf;
pub mod fgl;
pub mod linalg;
pub mod nishida;
pub mod qring;
pub mod report;

pub use error::{Error, Result};
pub use f2series::{
    express_in_invariant, FVar, GradedAlphabet, GradedPolynomial, InvariantExpansion, Monomial,
    PolyHom, PowerSeries, VarId, VarInfo,
};
