//! Calculus over two- and three-dimensional commutative unital algebras.
//!
//! A vector field `F: Ω ⊂ ℝⁿ → ℝⁿ` is *algebrizable* with respect to an
//! algebra `𝔸` when its Jacobian lies in the image of the first fundamental
//! representation `R` of `𝔸` at every point. For such fields this crate
//! provides
//!
//! * algebrizability checks and algebra inference ([`algebrize`]),
//! * line integrals relative to `𝔸`, the rectifying antiderivative
//!   `H = ∫ e/F dξ`, conservative dual fields and first integrals
//!   ([`calculus`]),
//! * the pullback metric under which `F` is geodesible, geodesic distance and
//!   geodesics ([`geometry`]),
//! * RK4 flows and first-integral drift ([`dynamics`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod algebrize;
pub mod calculus;
pub mod dynamics;
mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod quadrature;

pub use algebra::{AlgebraSpec, Element, Family, Roles};
pub use error::{Error, Result};
pub use field::{FieldDef, VectorField};
pub use linalg::{Matrix, Vector};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;
