//! Runs the guide's code listings as documentation tests, so the book in
//! `book/` and the library cannot drift apart. One module per chapter
//! keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/group.md")]
pub mod group {}

#[doc = include_str!("../../../book/src/spherical-functions.md")]
pub mod spherical_functions {}

#[doc = include_str!("../../../book/src/transforms.md")]
pub mod transforms {}

#[doc = include_str!("../../../book/src/convolutions.md")]
pub mod convolutions {}

#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
