//! Executable semantics and desk-scale invariant checking for a layered
//! process algebra of wireless network protocols.
//!
//! The crate is organized bottom-up:
//!
//! - [`syntax`]: terms, the expression language, parsing and printing;
//! - [`control`]: well-formedness and control-term analysis;
//! - [`semantics`]: the standard layered transition rules (sequential
//!   process, local parallel with a message queue, node, partial network,
//!   closed network);
//! - [`open`]: the global-state variant of the semantics and the
//!   environment regimes for reasoning about it;
//! - [`verify`]: exploration, invariant checking, per-location verification
//!   conditions, and the lifting/simulation/transfer checks;
//! - [`toy`]: the built-in flooding protocol used as the test corpus.

pub mod control;
pub mod open;
pub mod semantics;
pub mod syntax;
pub mod toy;
pub mod verify;
