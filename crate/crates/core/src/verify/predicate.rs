//! Named predicates over states, steps, and open states.
//!
//! A predicate owns its evaluator as a boxed closure so suites can be built
//! programmatically against a model (looking up variables once, at build
//! time). Names appear in verdicts and reports; evaluation must be total on
//! type-correct states.

use crate::open::GlobalState;
use crate::semantics::Action;

type StateFn<S> = Box<dyn Fn(&S) -> bool + Send + Sync>;
type StepFn<S> = Box<dyn Fn(&S, &Action, &S) -> bool + Send + Sync>;
type OpenFn<L> = Box<dyn Fn(&GlobalState, &L) -> bool + Send + Sync>;
type ActionFn = Box<dyn Fn(&Action) -> bool + Send + Sync>;

/// A predicate on single states.
pub struct StatePredicate<S> {
    pub name: String,
    eval: StateFn<S>,
}

impl<S> StatePredicate<S> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&S) -> bool + Send + Sync + 'static) -> Self {
        StatePredicate {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    pub fn holds(&self, s: &S) -> bool {
        (self.eval)(s)
    }
}

/// A predicate on transitions (s, a, s′).
pub struct StepPredicate<S> {
    pub name: String,
    eval: StepFn<S>,
}

impl<S> StepPredicate<S> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&S, &Action, &S) -> bool + Send + Sync + 'static,
    ) -> Self {
        StepPredicate {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    pub fn holds(&self, s: &S, a: &Action, t: &S) -> bool {
        (self.eval)(s, a, t)
    }
}

/// A predicate on open states (σ plus the local component).
pub struct OpenPredicate<L> {
    pub name: String,
    eval: OpenFn<L>,
}

impl<L> OpenPredicate<L> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&GlobalState, &L) -> bool + Send + Sync + 'static,
    ) -> Self {
        OpenPredicate {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    pub fn holds(&self, sigma: &GlobalState, local: &L) -> bool {
        (self.eval)(sigma, local)
    }
}

/// The reachability filter: which actions count as steps.
pub struct ActionFilter {
    pub name: String,
    eval: ActionFn,
}

impl ActionFilter {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Action) -> bool + Send + Sync + 'static) -> Self {
        ActionFilter {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    /// Every action counts.
    pub fn all() -> Self {
        ActionFilter::new("all", |_| true)
    }

    pub fn admits(&self, a: &Action) -> bool {
        (self.eval)(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_select_by_action() {
        let no_tau = ActionFilter::new("no-tau", |a| *a != Action::Tau);
        assert!(!no_tau.admits(&Action::Tau));
        assert!(no_tau.admits(&Action::Deliver(1)));
        assert!(ActionFilter::all().admits(&Action::Tau));
    }

    #[test]
    fn predicates_carry_their_names_into_reports() {
        let p: StatePredicate<u32> = StatePredicate::new("small", |n| *n < 3);
        assert_eq!(p.name, "small");
        assert!(p.holds(&2));
        assert!(!p.holds(&3));
    }
}
