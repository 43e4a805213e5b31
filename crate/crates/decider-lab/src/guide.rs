//! The book's chapters, included here so every code block in the guide is
//! compiled and run as a doc-test by `cargo test --doc`.

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/parentheses.md")]
pub mod parentheses {}

#[doc = include_str!("../../../book/src/instrumentation.md")]
pub mod instrumentation {}

#[doc = include_str!("../../../book/src/termination.md")]
pub mod termination {}

#[doc = include_str!("../../../book/src/powers_of_two.md")]
pub mod powers_of_two {}

#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}

#[doc = include_str!("../../../book/src/combinators.md")]
pub mod combinators {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
