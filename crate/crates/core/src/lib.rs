//! Angle finding for quantum signal processing.
//!
//! A real parity target `F` is completed to a unitary element of the Low
//! algebra, which is then split into degree-one primitive factors by recursive
//! halving. Each factor contributes one rotation angle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bench;
pub mod completion;
pub mod decomposition;
pub mod hamsim;
pub mod io;
pub mod laurent;
pub mod pipeline;
pub mod verify;

pub use algebra::{primitive_factor, AngleSequence, HaahElement, LowElement};
pub use decomposition::Mode;
pub use laurent::{Degree, LaurentPoly, Parity};
