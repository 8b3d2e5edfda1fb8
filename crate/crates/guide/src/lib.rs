//! The mdbook chapters under `book/src`, compiled as doctests so every
//! snippet in the guide keeps building against the current API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}
#[doc = include_str!("../../../book/src/elliptic.md")]
pub mod elliptic {}
#[doc = include_str!("../../../book/src/norms.md")]
pub mod norms {}
#[doc = include_str!("../../../book/src/mollify.md")]
pub mod mollify {}
#[doc = include_str!("../../../book/src/pressure.md")]
pub mod pressure {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
