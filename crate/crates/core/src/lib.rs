//! Multivariate Gaussian Gabor frames on symplectically deformed lattices.
//!
//! A window `φ_{X,Y}` is fixed by real symmetric `X > 0` and `Y`. Its
//! covariance `G` is positive definite and symplectic, and the system
//! `G(φ_{X,Y}, G^{-1/2}Λ_{αβ})` is unitarily equivalent to the standard
//! Gaussian on the rectangular lattice `Λ_{αβ}`. The modules follow that
//! chain: [`symplectic`] builds `S`, `G` and `G^{-1/2}`, [`gaussian`] and
//! [`transforms`] evaluate windows and their phase-space transforms,
//! [`lattice`] enumerates `MΛ_{αβ}`, and [`frame`] estimates frame bounds.
//!
//! The guide in `book/` walks through each step with tested examples.

pub mod error;
pub mod frame;
pub mod format;
pub mod gaussian;
pub mod grid;
pub mod lattice;
pub mod linalg;
pub mod random;
pub mod symplectic;
pub mod tolerances;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/symplectic.md")]
    mod symplectic {}
    #[doc = include_str!("../../../book/src/wigner.md")]
    mod wigner {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
