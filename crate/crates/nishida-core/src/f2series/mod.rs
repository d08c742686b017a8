//! Exact arithmetic over F2: graded Laurent polynomials and capped
//! formal power series with composition, inversion, and invariant
//! expansion.

pub mod alphabet;
pub mod poly;
pub mod series;
pub mod solve;

pub use alphabet::{GradedAlphabet, VarId, VarInfo};
pub use poly::{GradedPolynomial, Monomial, PolyHom};
pub use series::{FVar, PowerSeries};
pub use solve::{express_in_invariant, InvariantExpansion};
