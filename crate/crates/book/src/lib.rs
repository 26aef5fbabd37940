//! Runs the code listings in `book/` as doctests. Each chapter gets its own
//! module so a failure points at the chapter it came from.

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/normalization.md")]
pub mod normalization {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/curation.md")]
pub mod curation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/noise.md")]
pub mod noise {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/long-form.md")]
pub mod long_form {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/transducer.md")]
pub mod transducer {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
