//! Invariant checking by exhaustive reachability: explore, then test the
//! predicate on every reachable state (or every recorded transition), and
//! turn the first violation into a replayable trace.

use crate::semantics::{Automaton, StepError};

use super::explore::{explore, Bounds, ExploreResult};
use super::predicate::{ActionFilter, StatePredicate, StepPredicate};
use super::trace::Trace;

/// Verdict of a check. A bound hit is reported as such, never as a pass.
#[derive(Debug)]
pub enum Outcome {
    Holds {
        states: usize,
        transitions: usize,
        saturated: usize,
    },
    Counterexample(Trace),
    BoundExceeded {
        bound: String,
        explored: usize,
    },
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds { .. })
    }

    pub fn counterexample(&self) -> Option<&Trace> {
        match self {
            Outcome::Counterexample(t) => Some(t),
            _ => None,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Holds {
                states,
                transitions,
                saturated,
            } => write!(
                f,
                "holds on {states} states / {transitions} transitions ({saturated} saturated)"
            ),
            Outcome::Counterexample(t) => write!(f, "counterexample:\n{}", t.render()),
            Outcome::BoundExceeded { bound, explored } => {
                write!(f, "undecided: {bound} after {explored} states")
            }
        }
    }
}

/// Does `pred` hold in every reachable state?
pub fn check_invariant<A: Automaton>(
    auto: &A,
    pred: &StatePredicate<A::State>,
    filter: &ActionFilter,
    bounds: &Bounds,
) -> Result<Outcome, StepError> {
    let result = explore(auto, filter, bounds)?;
    let ex = result.explored();
    // scan in discovery order so the reported counterexample is a shortest one
    for (idx, s) in ex.states.iter().enumerate() {
        if !pred.holds(s) {
            return Ok(Outcome::Counterexample(ex.trace_to(auto, idx, None)));
        }
    }
    Ok(match result {
        ExploreResult::Complete(ex) => Outcome::Holds {
            states: ex.states.len(),
            transitions: ex.transitions.len(),
            saturated: ex.saturated,
        },
        ExploreResult::BoundExceeded { partial, bound } => Outcome::BoundExceeded {
            bound,
            explored: partial.states.len(),
        },
    })
}

/// Does `pred` hold across every reachable transition?
pub fn check_step_invariant<A: Automaton>(
    auto: &A,
    pred: &StepPredicate<A::State>,
    filter: &ActionFilter,
    bounds: &Bounds,
) -> Result<Outcome, StepError> {
    let result = explore(auto, filter, bounds)?;
    let ex = result.explored();
    for (src, a, tgt) in &ex.transitions {
        if !pred.holds(&ex.states[*src], a, &ex.states[*tgt]) {
            let extra = Some((a.clone(), &ex.states[*tgt]));
            return Ok(Outcome::Counterexample(ex.trace_to(auto, *src, extra)));
        }
    }
    Ok(match result {
        ExploreResult::Complete(ex) => Outcome::Holds {
            states: ex.states.len(),
            transitions: ex.transitions.len(),
            saturated: ex.saturated,
        },
        ExploreResult::BoundExceeded { partial, bound } => Outcome::BoundExceeded {
            bound,
            explored: partial.states.len(),
        },
    })
}
