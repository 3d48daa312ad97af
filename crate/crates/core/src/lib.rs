//! Exact symbolic workbench for Schubert calculus on Grassmannians,
//! correspondences between them, and formal motivic decomposition rules
//! for twisted flag varieties.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`] partitions, boxes and the generating polynomials
//!   (Gaussian binomials, `φ_n`, `ψ_n`).
//! * [`chow_ring`] the Chow ring of a split Grassmannian in the Schubert
//!   basis, with Pieri and Littlewood–Richardson multiplication.
//! * [`correspondence`] classes on products `X×Y`, composition, transpose,
//!   modular reduction and projector predicates.
//! * [`rationality`] witness trees certifying that a product class is built
//!   from rational generators.
//! * [`motive`] guarded rewrite rules producing twisted sums of motives.
//! * [`sb2`] the end-to-end verification of the decomposition of the
//!   motive of `SB₂(A)` for a division algebra of degree 5.

pub mod chow_ring;
pub mod combinatorics;
pub mod correspondence;
mod error;
pub mod motive;
pub mod rationality;
pub mod ring;
pub mod sb2;
pub mod symmetric;

pub use chow_ring::{ChowClass, GrassmannSpace};
pub use combinatorics::{IntPolynomial, Partition};
pub use correspondence::{ProductClass, TwistFrame};
pub use error::{Error, Result};
pub use ring::{Coeff, CoefficientRing};
