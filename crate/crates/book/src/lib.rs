//! Every chapter of `book/` compiled as a doctest, so `cargo test` keeps the
//! guide's listings working.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/transport.md")]
pub mod transport {}
#[doc = include_str!("../../../book/src/schur.md")]
pub mod schur {}
#[doc = include_str!("../../../book/src/diffusion.md")]
pub mod diffusion {}
#[doc = include_str!("../../../book/src/heterogeneous.md")]
pub mod heterogeneous {}
#[doc = include_str!("../../../book/src/amg.md")]
pub mod amg {}
#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}
#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
