//! Simulation between a standard automaton and its open counterpart: every
//! concrete behaviour must be reproducible as an open transition, so
//! verdicts obtained on the open side cover the standard side.
//!
//! A splitter maps a standard state onto (global state, local state) — the
//! view the open automaton works with. Matching is exact: the same action,
//! the same local successor, and owned-entry updates that reproduce the
//! concrete data change. Checking runs over the explored standard graph, so
//! a pass certifies the simulation on the whole reachable fragment, not on
//! a sampled one.

use crate::open::{GlobalState, OpenAutomaton, OpenClosedLocal, OpenLocal, OpenNet};
use crate::open::{global_view, lift_net};
use crate::semantics::{Automaton, ClosedState, LocalState, Model, NetState, SeqState, StepError};
use crate::syntax::{Addr, TermId};

use super::explore::{explore, Bounds, ExploreResult};
use super::predicate::ActionFilter;

/// Maps a standard state to the open view it corresponds to.
pub struct Splitter<'m, S, L> {
    pub name: String,
    f: Box<dyn Fn(&S) -> (GlobalState, L) + Send + Sync + 'm>,
}

impl<'m, S, L> Splitter<'m, S, L> {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&S) -> (GlobalState, L) + Send + Sync + 'm,
    ) -> Self {
        Splitter {
            name: name.into(),
            f: Box::new(f),
        }
    }

    pub fn split(&self, s: &S) -> (GlobalState, L) {
        (self.f)(s)
    }
}

/// Bare protocol states split into (total global state, control term).
pub fn seq_splitter(model: &Model, addr: Addr) -> Splitter<'_, SeqState, TermId> {
    Splitter::new(format!("seq at {addr}"), move |s: &SeqState| {
        let sigma = GlobalState::total(model, std::iter::once((addr, s.xi.clone())).collect());
        (sigma, s.ctl)
    })
}

/// Queue composites split into (total global state, control + queue).
pub fn local_splitter(model: &Model, addr: Addr) -> Splitter<'_, LocalState, OpenLocal> {
    Splitter::new(format!("local at {addr}"), move |s: &LocalState| {
        let sigma = GlobalState::total(model, std::iter::once((addr, s.seq.xi.clone())).collect());
        (
            sigma,
            OpenLocal {
                ctl: s.seq.ctl,
                queue: s.queue.clone(),
            },
        )
    })
}

/// Partial networks split into (valuation view, valuation-free tree).
pub fn net_splitter(model: &Model) -> Splitter<'_, NetState, OpenNet> {
    Splitter::new("net", move |s: &NetState| {
        (global_view(model, s), lift_net(s))
    })
}

/// Closed networks: like the net splitter, carrying the budget along.
pub fn closed_splitter(model: &Model) -> Splitter<'_, ClosedState, OpenClosedLocal> {
    Splitter::new("closed", move |s: &ClosedState| {
        (
            global_view(model, &s.net),
            OpenClosedLocal {
                net: lift_net(&s.net),
                budget: s.budget.clone(),
            },
        )
    })
}

/// The result of a simulation check.
#[derive(Debug)]
pub enum SimulationVerdict {
    Holds {
        checked: usize,
    },
    /// A standard initial state has no open counterpart.
    InitMissing {
        state: String,
    },
    /// A standard transition no open transition reproduces.
    Unmatched {
        from: String,
        action: String,
        to: String,
    },
    /// The standard side could not be fully explored.
    BoundExceeded {
        bound: String,
    },
}

impl SimulationVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SimulationVerdict::Holds { .. })
    }
}

/// Check that `onp` simulates `np` through `sr` over the whole reachable
/// fragment of `np`.
pub fn check_simulation<'m, A, O>(
    np: &A,
    onp: &O,
    sr: &Splitter<'m, A::State, O::Local>,
    bounds: &Bounds,
) -> Result<SimulationVerdict, StepError>
where
    A: Automaton,
    O: OpenAutomaton,
{
    // initial states must split into open initial states
    let open_inits = onp.init();
    for s in np.init() {
        let split = sr.split(&s);
        if !open_inits.contains(&split) {
            return Ok(SimulationVerdict::InitMissing {
                state: np.render_state(&s),
            });
        }
    }

    let result = explore(np, &ActionFilter::all(), bounds)?;
    let ex = result.explored();
    let mut checked = 0usize;
    for (src, a, tgt) in &ex.transitions {
        let (sigma, local) = sr.split(&ex.states[*src]);
        let (sigma_next, local_next) = sr.split(&ex.states[*tgt]);
        let matched = onp.step(&sigma, &local)?.into_iter().any(|t| {
            t.action == *a && t.local == local_next && sigma.updated(&t.owned) == sigma_next
        });
        if !matched {
            return Ok(SimulationVerdict::Unmatched {
                from: ex.renders[*src].clone(),
                action: a.to_string(),
                to: ex.renders[*tgt].clone(),
            });
        }
        checked += 1;
    }

    if let ExploreResult::BoundExceeded { bound, .. } = result {
        return Ok(SimulationVerdict::BoundExceeded { bound });
    }
    Ok(SimulationVerdict::Holds { checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open::{OpenSeqAutomaton, OpenTransition};
    use crate::semantics::{Action, SeqAutomaton};
    use std::collections::BTreeSet;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . ( < is_pkt > . broadcast(pkt(num, sip)) . call(P)
                        (+) < is_newpkt > . call(P) )
";

    fn model() -> Model {
        Model::build(ECHO, "net = 1 : {}\ndata_max = 1\nprocess = seq\n").unwrap()
    }

    #[test]
    fn the_open_protocol_simulates_the_bare_one() {
        let m = model();
        let np = SeqAutomaton::new(&m, Addr(1));
        let onp = OpenSeqAutomaton::new(&m, Addr(1));
        let sr = seq_splitter(&m, Addr(1));
        let v = check_simulation(&np, &onp, &sr, &Bounds::default()).unwrap();
        assert!(v.holds(), "{v:?}");
        match v {
            SimulationVerdict::Holds { checked } => assert!(checked > 0),
            _ => unreachable!(),
        }
    }

    /// An open automaton with its broadcasts deleted: too poor to simulate.
    struct Muted<'m> {
        inner: OpenSeqAutomaton<'m>,
    }

    impl<'m> OpenAutomaton for Muted<'m> {
        type Local = TermId;

        fn owned(&self) -> BTreeSet<Addr> {
            self.inner.owned()
        }

        fn init(&self) -> Vec<(GlobalState, TermId)> {
            self.inner.init()
        }

        fn step(
            &self,
            sigma: &GlobalState,
            local: &TermId,
        ) -> Result<Vec<OpenTransition<TermId>>, StepError> {
            Ok(self
                .inner
                .step(sigma, local)?
                .into_iter()
                .filter(|t| !matches!(t.action, Action::Broadcast(_)))
                .collect())
        }

        fn render_local(&self, local: &TermId) -> String {
            self.inner.render_local(local)
        }

        fn render_global(&self, sigma: &GlobalState) -> String {
            self.inner.render_global(sigma)
        }
    }

    #[test]
    fn dropping_an_action_class_breaks_the_simulation() {
        let m = model();
        let np = SeqAutomaton::new(&m, Addr(1));
        let onp = Muted {
            inner: OpenSeqAutomaton::new(&m, Addr(1)),
        };
        let sr = seq_splitter(&m, Addr(1));
        let v = check_simulation(&np, &onp, &sr, &Bounds::default()).unwrap();
        match v {
            SimulationVerdict::Unmatched { action, .. } => {
                assert!(action.contains("broadcast"), "{action}");
            }
            other => panic!("expected an unmatched transition, got {other:?}"),
        }
    }

    #[test]
    fn a_bound_on_the_standard_side_is_reported() {
        let m = model();
        let np = SeqAutomaton::new(&m, Addr(1));
        let onp = OpenSeqAutomaton::new(&m, Addr(1));
        let sr = seq_splitter(&m, Addr(1));
        let v = check_simulation(
            &np,
            &onp,
            &sr,
            &Bounds {
                max_states: 1,
                max_depth: 5,
            },
        )
        .unwrap();
        assert!(matches!(v, SimulationVerdict::BoundExceeded { .. }));
    }
}
