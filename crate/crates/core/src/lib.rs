//! Projective dynamics of `SL_n` over local fields.
//!
//! Scalars are ℝ, ℂ (over `f32` or `f64`) or ℚ_p at fixed precision. The
//! crate computes Cartan decompositions, contraction and proximality
//! certificates, separating sets, and builds ping-pong tuples whose freeness
//! is certified by the ping-pong lemma.

// `!(x < bound)` is deliberate: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod contraction;
pub mod error;
pub mod field;
pub mod io;
pub mod lie;
pub mod matrix;
pub mod pingpong;
pub mod projective;
pub mod sampling;
pub mod separation;
pub mod words;

pub use cartan::{bilip_constant, cartan_decompose, exterior_power, CartanField, CartanTriple};
pub use error::{Error, Result};
pub use field::{FieldKind, FieldSpec, LocalField, Padic, PadicField, Tolerance};
pub use matrix::Matrix;
pub use projective::{dist_to_hyperplane, proj_dist, ProjHyperplane, ProjPoint};

pub type C64 = num_complex::Complex64;

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<C64>;
pub type PadicMatrix = Matrix<Padic>;
