//! Surface and core language.
//!
//! The surface language has finite loops, vectors/matrices, and
//! `cipher_init`/`plain_init` input declarations. Lowering unrolls every
//! loop, resolves all indexing, and produces a loop-free core command over
//! scalar variables plus a list of declared inputs. The core language is
//! the four-command imperative fragment the type checker and the two
//! interpreters operate on.

mod ast;
mod lower;
mod parse;
mod pretty;
mod ssa;

pub use ast::*;
pub use lower::{lower, LowerError, LoweredProgram};
pub use parse::{parse, ParseError};
pub use pretty::{pretty_core, pretty_lowered, pretty_surface, surface_eq_modulo_pos};
pub use ssa::{to_ssa, ssa_to_cmd, SsaDef, SsaError, SsaProgram};
