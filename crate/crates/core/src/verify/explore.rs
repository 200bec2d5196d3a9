//! Breadth-first reachability: the least set containing the initial states
//! and closed under admitted transitions.
//!
//! Exploration is level-synchronous: each frontier is stepped in parallel,
//! then merged in frontier order with successors sorted canonically, so the
//! discovery order — and everything derived from it, like counterexample
//! choice — is independent of the worker count. `AWN_WORKERS` limits the
//! thread pool.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::semantics::{Action, Automaton, StepError};

use super::predicate::ActionFilter;
use super::trace::{fnv1a, Trace, TraceStep};

/// Exploration limits. Exceeding either aborts with a bound report rather
/// than silently truncating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 1_000_000,
            max_depth: 100_000,
        }
    }
}

/// The reachable fragment, in discovery order.
pub struct Explored<S> {
    pub states: Vec<S>,
    pub renders: Vec<String>,
    pub digests: Vec<u64>,
    /// BFS tree link: predecessor index and the action taken to get here.
    pub parent: Vec<Option<(usize, Action)>>,
    pub depth: Vec<usize>,
    /// Every admitted transition, as (source, action, target) indices.
    pub transitions: Vec<(usize, Action, usize)>,
    pub init_count: usize,
    pub saturated: usize,
}

impl<S> Explored<S> {
    /// The witness path from an initial state to `target`, with an optional
    /// extra step appended (for step-predicate violations).
    pub fn trace_to<A>(&self, auto: &A, target: usize, extra: Option<(Action, &S)>) -> Trace
    where
        A: Automaton<State = S>,
    {
        let mut chain = Vec::new();
        let mut at = target;
        while let Some((prev, a)) = &self.parent[at] {
            chain.push((a.clone(), at));
            at = *prev;
        }
        chain.reverse();
        let mut steps: Vec<TraceStep> = chain
            .into_iter()
            .map(|(a, idx)| TraceStep {
                action: a.to_string(),
                label: auto.state_label(&self.states[idx]),
                digest: self.digests[idx],
                state: self.renders[idx].clone(),
            })
            .collect();
        if let Some((a, s)) = extra {
            let render = auto.render_state(s);
            steps.push(TraceStep {
                action: a.to_string(),
                label: auto.state_label(s),
                digest: fnv1a(render.as_bytes()),
                state: render,
            });
        }
        Trace {
            initial: self.renders[at].clone(),
            initial_digest: self.digests[at],
            steps,
        }
    }
}

/// A finished exploration, or the partial one that hit a bound.
pub enum ExploreResult<S> {
    Complete(Explored<S>),
    BoundExceeded { partial: Explored<S>, bound: String },
}

impl<S> ExploreResult<S> {
    pub fn explored(&self) -> &Explored<S> {
        match self {
            ExploreResult::Complete(e) => e,
            ExploreResult::BoundExceeded { partial, .. } => partial,
        }
    }

    pub fn bound(&self) -> Option<&str> {
        match self {
            ExploreResult::Complete(_) => None,
            ExploreResult::BoundExceeded { bound, .. } => Some(bound),
        }
    }
}

/// The worker-count override, read from `AWN_WORKERS`.
pub fn worker_count() -> Option<usize> {
    std::env::var("AWN_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|n| *n > 0)
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match worker_count() {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .expect("worker pool construction"),
    }
}

/// Admitted successors of one state, sorted canonically.
pub fn successors<A: Automaton>(
    auto: &A,
    filter: &ActionFilter,
    s: &A::State,
) -> Result<Vec<(Action, A::State)>, StepError> {
    let mut succs: Vec<(Action, A::State)> = auto
        .step(s)?
        .into_iter()
        .filter(|(a, _)| filter.admits(a))
        .collect();
    succs.sort();
    succs.dedup();
    Ok(succs)
}

/// Breadth-first least fixpoint of the two reachability rules: initial
/// states are in; admitted successors of members are in.
pub fn explore<A: Automaton>(
    auto: &A,
    filter: &ActionFilter,
    bounds: &Bounds,
) -> Result<ExploreResult<A::State>, StepError> {
    with_pool(|| explore_serial_merge(auto, filter, bounds))
}

fn explore_serial_merge<A: Automaton>(
    auto: &A,
    filter: &ActionFilter,
    bounds: &Bounds,
) -> Result<ExploreResult<A::State>, StepError> {
    let mut ex = Explored {
        states: Vec::new(),
        renders: Vec::new(),
        digests: Vec::new(),
        parent: Vec::new(),
        depth: Vec::new(),
        transitions: Vec::new(),
        init_count: 0,
        saturated: 0,
    };
    let mut index: HashMap<A::State, usize> = HashMap::new();

    let mut init = auto.init();
    init.sort();
    init.dedup();
    let mut frontier: Vec<usize> = Vec::new();
    for s in init {
        if index.contains_key(&s) {
            continue;
        }
        let idx = ex.states.len();
        let render = auto.render_state(&s);
        ex.digests.push(fnv1a(render.as_bytes()));
        ex.renders.push(render);
        ex.parent.push(None);
        ex.depth.push(0);
        if auto.is_saturated(&s) {
            ex.saturated += 1;
        }
        index.insert(s.clone(), idx);
        ex.states.push(s);
        frontier.push(idx);
    }
    ex.init_count = ex.states.len();

    let mut depth = 0usize;
    while !frontier.is_empty() {
        if ex.states.len() > bounds.max_states {
            return Ok(ExploreResult::BoundExceeded {
                partial: ex,
                bound: format!("max-states {} exceeded", bounds.max_states),
            });
        }
        if depth >= bounds.max_depth {
            return Ok(ExploreResult::BoundExceeded {
                partial: ex,
                bound: format!("max-depth {} exceeded", bounds.max_depth),
            });
        }
        depth += 1;

        let stepped: Vec<Result<Vec<(Action, A::State)>, StepError>> = frontier
            .par_iter()
            .map(|&idx| successors(auto, filter, &ex.states[idx]))
            .collect();

        let mut next_frontier = Vec::new();
        for (&src, succs) in frontier.iter().zip(stepped) {
            for (a, s) in succs? {
                let tgt = match index.get(&s) {
                    Some(&tgt) => tgt,
                    None => {
                        let tgt = ex.states.len();
                        let render = auto.render_state(&s);
                        ex.digests.push(fnv1a(render.as_bytes()));
                        ex.renders.push(render);
                        ex.parent.push(Some((src, a.clone())));
                        ex.depth.push(ex.depth[src] + 1);
                        if auto.is_saturated(&s) {
                            ex.saturated += 1;
                        }
                        index.insert(s.clone(), tgt);
                        ex.states.push(s);
                        next_frontier.push(tgt);
                        tgt
                    }
                };
                ex.transitions.push((src, a, tgt));
            }
        }
        frontier = next_frontier;
    }

    Ok(ExploreResult::Complete(ex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{Model, SeqAutomaton};
    use crate::syntax::Addr;

    const TOGGLE: &str = "\
vars msg: msg, num: nat, sip: addr, x: nat
process P: [[x := 1 + x]] . deliver(x) . call(P)
";

    fn model() -> Model {
        Model::build(TOGGLE, "net = 1 : {}\nnat_max = 2\ndata_max = 0\n").unwrap()
    }

    #[test]
    fn two_state_chain_is_fully_explored() {
        let m = model();
        let auto = SeqAutomaton::new(&m, Addr(1));
        let r = explore(&auto, &ActionFilter::all(), &Bounds::default()).unwrap();
        let ex = r.explored();
        assert!(r.bound().is_none());
        // x saturates at 2: states are (x, ctl) pairs cycling through
        // assign/deliver points
        assert_eq!(ex.init_count, 1);
        assert!(ex.states.len() >= 4);
        assert_eq!(ex.states.len(), ex.renders.len());
        assert_eq!(ex.states.len(), ex.digests.len());
    }

    #[test]
    fn action_filter_cuts_the_step_rule() {
        let m = model();
        let auto = SeqAutomaton::new(&m, Addr(1));
        let no_tau = ActionFilter::new("no-tau", |a| *a != Action::Tau);
        let r = explore(&auto, &no_tau, &Bounds::default()).unwrap();
        // the first move is an assignment τ, so nothing beyond init is in
        assert_eq!(r.explored().states.len(), 1);
        assert!(r.explored().transitions.is_empty());
    }

    #[test]
    fn state_bound_reports_instead_of_truncating() {
        let m = model();
        let auto = SeqAutomaton::new(&m, Addr(1));
        let r = explore(
            &auto,
            &ActionFilter::all(),
            &Bounds {
                max_states: 2,
                max_depth: 100,
            },
        )
        .unwrap();
        match r {
            ExploreResult::BoundExceeded { bound, .. } => {
                assert!(bound.contains("max-states"));
            }
            ExploreResult::Complete(_) => panic!("bound should have tripped"),
        }
    }

    #[test]
    fn depth_bound_reports_instead_of_truncating() {
        let m = model();
        let auto = SeqAutomaton::new(&m, Addr(1));
        let r = explore(
            &auto,
            &ActionFilter::all(),
            &Bounds {
                max_states: 1000,
                max_depth: 1,
            },
        )
        .unwrap();
        assert!(r.bound().unwrap().contains("max-depth"));
    }

    #[test]
    fn discovery_order_is_worker_invariant() {
        let m = model();
        let auto = SeqAutomaton::new(&m, Addr(1));
        let baseline = explore(&auto, &ActionFilter::all(), &Bounds::default()).unwrap();
        std::env::set_var("AWN_WORKERS", "1");
        let single = explore(&auto, &ActionFilter::all(), &Bounds::default()).unwrap();
        std::env::remove_var("AWN_WORKERS");
        assert_eq!(baseline.explored().renders, single.explored().renders);
        assert_eq!(
            baseline.explored().transitions,
            single.explored().transitions
        );
    }
}
