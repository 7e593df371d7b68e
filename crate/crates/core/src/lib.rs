//! Coherent spaces, their finite quantum realizations and coherent
//! quantization.
//!
//! A coherent space is a set with a positive-definite kernel. This crate
//! evaluates the builtin kernels ([`space`]), factors Gram matrices of finite
//! samples into quantum spans ([`realization`]), quantizes coherent maps on
//! orbit-closed samples ([`maps`]), implements the oscillator semigroup
//! ([`oscillator`]) and its realization on truncated Fock space ([`fock`]),
//! and runs JSON-configured verification suites ([`suite`]).
//!
//! The guide in `book/` is compiled as doc-tests of this crate.

pub mod error;
pub mod families;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod oscillator;
pub mod quadrature;
pub mod realization;
pub mod space;
pub mod suite;
pub mod maps;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/realization.md")]
    mod realization {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/oscillator.md")]
    mod oscillator {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/suites.md")]
    mod suites {}
}
