//! Core library for the ILA circuit checker.
//!
//! Everything here is pure computation over owned data: the surface/core
//! language ASTs, the scheme-agnostic model abstraction with its validity
//! axiom checkers, the bounds-tracking type checker, the dual (native and
//! message-level) big-step interpreters, the toy RLWE reference scheme used
//! as a ground-truth noise oracle, and the modulus-switch inference pass.
//!
//! The crate is `no_std` (with `alloc`); file IO, JSON, CLI, and timing live
//! in the companion `ila-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ir;
pub mod model;
pub mod msinfer;
pub mod rational;
pub mod refscheme;
pub mod schemes;
pub mod semantics;
pub mod typecheck;

pub use model::{Bound, BoundOrdering, SchemeModel, Sort, Value};
pub use typecheck::{Diagnosis, Type, TypingContext};
