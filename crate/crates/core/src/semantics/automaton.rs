//! The interface every semantic layer exposes to the explorer.
//!
//! An automaton is a set of initial states plus a step function producing
//! labelled successors. Step functions are total on type-correct models;
//! a dynamic evaluation failure (reading a field of a cleared message,
//! casting a non-message value) is surfaced as a [`StepError`] and aborts
//! the run — transitions are never silently dropped.

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::syntax::EvalError;

use super::action::Action;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("evaluation failed at {context}: {source}")]
    Eval {
        context: String,
        source: EvalError,
    },
    #[error("cast of non-message value {0}")]
    NotAMessage(String),
}

pub type StepResult<S> = Result<Vec<(Action, S)>, StepError>;

pub trait Automaton: Sync {
    type State: Clone + Eq + Ord + Hash + Send + Sync + Debug;

    /// Initial states, in canonical order.
    fn init(&self) -> Vec<Self::State>;

    /// All transitions enabled in `s`. Order is not significant; the
    /// explorer sorts successors before use.
    fn step(&self, s: &Self::State) -> StepResult<Self::State>;

    /// Canonical human-readable rendering; also the digest input, so it must
    /// be stable across runs and distinguish states up to behaviour.
    fn render_state(&self, s: &Self::State) -> String;

    /// True when a message queue in `s` is at its configured bound, i.e. the
    /// state may be missing receive transitions the unbounded semantics has.
    fn is_saturated(&self, _s: &Self::State) -> bool {
        false
    }

    /// The control location label(s) of `s`, for layers that have a single
    /// sequential process to point into. Used to annotate trace steps.
    fn state_label(&self, _s: &Self::State) -> Option<String> {
        None
    }
}
