//! Open-system reachability: interleave an open automaton with an explicit
//! environment.
//!
//! Two successor rules generate the graph. The sync rule fires an automaton
//! transition whose action the assumption admits, while the unowned entries
//! take any generator update the sync relation allows. The interleave rule
//! moves only the unowned entries, under the interleave relation, and leaves
//! the local state alone. Together they explore every behaviour of
//! "automaton composed with an environment obeying the assumption", up to
//! the generator's candidate coverage.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::open::{EnvAssumption, EnvGenerator, GlobalState, OAction, OpenAutomaton};
use crate::semantics::StepError;

use super::explore::Bounds;
use super::invariant::Outcome;
use super::predicate::OpenPredicate;
use super::trace::{fnv1a, ReplayError, Trace, TraceStep};

/// The reachable open fragment, in discovery order.
pub struct OExplored<L> {
    pub states: Vec<(GlobalState, L)>,
    pub renders: Vec<String>,
    pub digests: Vec<u64>,
    pub parent: Vec<Option<(usize, OAction)>>,
    pub depth: Vec<usize>,
    pub transitions: Vec<(usize, OAction, usize)>,
    pub init_count: usize,
    pub saturated: usize,
}

/// A finished open exploration, or the partial one that hit a bound.
pub enum OExploreResult<L> {
    Complete(OExplored<L>),
    BoundExceeded { partial: OExplored<L>, bound: String },
}

impl<L> OExploreResult<L> {
    pub fn explored(&self) -> &OExplored<L> {
        match self {
            OExploreResult::Complete(e) => e,
            OExploreResult::BoundExceeded { partial, .. } => partial,
        }
    }

    pub fn bound(&self) -> Option<&str> {
        match self {
            OExploreResult::Complete(_) => None,
            OExploreResult::BoundExceeded { bound, .. } => Some(bound),
        }
    }
}

fn render_open<A: OpenAutomaton>(auto: &A, sigma: &GlobalState, local: &A::Local) -> String {
    format!("{} / {}", auto.render_global(sigma), auto.render_local(local))
}

/// Successors of one open state under both rules, sorted canonically.
pub fn osuccessors<A: OpenAutomaton>(
    auto: &A,
    env: &EnvAssumption,
    gen: &EnvGenerator,
    sigma: &GlobalState,
    local: &A::Local,
) -> Result<Vec<(OAction, (GlobalState, A::Local))>, StepError> {
    let owned = auto.owned();
    debug_assert_eq!(env.sync.owned, owned, "assumption owns a different set");
    debug_assert_eq!(env.inter.owned, owned, "assumption owns a different set");

    let mut succs = Vec::new();

    // interleave rule: only the environment moves
    for combo in gen.updates(sigma, &owned, &env.inter.rel) {
        let next = sigma.updated(&combo);
        if next == *sigma {
            continue;
        }
        debug_assert!(env.inter.holds(sigma, &next));
        succs.push((OAction::Env, (next, local.clone())));
    }

    // sync rule: the automaton moves, the environment moves alongside
    for t in auto.step(sigma, local)? {
        if !env.sync.act.holds(sigma, &t.action) {
            continue;
        }
        for combo in gen.updates(sigma, &owned, &env.sync.rel) {
            let next = sigma.updated(&combo).updated(&t.owned);
            debug_assert!(env.sync.holds(sigma, &next, &t.action));
            succs.push((OAction::Act(t.action.clone()), (next, t.local.clone())));
        }
    }

    succs.sort();
    succs.dedup();
    Ok(succs)
}

/// Breadth-first least fixpoint of the open reachability rules.
pub fn oexplore<A: OpenAutomaton>(
    auto: &A,
    env: &EnvAssumption,
    gen: &EnvGenerator,
    bounds: &Bounds,
) -> Result<OExploreResult<A::Local>, StepError> {
    let mut ex = OExplored {
        states: Vec::new(),
        renders: Vec::new(),
        digests: Vec::new(),
        parent: Vec::new(),
        depth: Vec::new(),
        transitions: Vec::new(),
        init_count: 0,
        saturated: 0,
    };
    let mut index: HashMap<(GlobalState, A::Local), usize> = HashMap::new();

    let mut init = auto.init();
    init.sort();
    init.dedup();
    let mut frontier: Vec<usize> = Vec::new();
    for s in init {
        if index.contains_key(&s) {
            continue;
        }
        let idx = ex.states.len();
        let render = render_open(auto, &s.0, &s.1);
        ex.digests.push(fnv1a(render.as_bytes()));
        ex.renders.push(render);
        ex.parent.push(None);
        ex.depth.push(0);
        if auto.is_saturated(&s.1) {
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
            return Ok(OExploreResult::BoundExceeded {
                partial: ex,
                bound: format!("max-states {} exceeded", bounds.max_states),
            });
        }
        if depth >= bounds.max_depth {
            return Ok(OExploreResult::BoundExceeded {
                partial: ex,
                bound: format!("max-depth {} exceeded", bounds.max_depth),
            });
        }
        depth += 1;

        let stepped: Vec<Result<Vec<(OAction, (GlobalState, A::Local))>, StepError>> = frontier
            .par_iter()
            .map(|&idx| {
                let (sigma, local) = &ex.states[idx];
                osuccessors(auto, env, gen, sigma, local)
            })
            .collect();

        let mut next_frontier = Vec::new();
        for (&src, succs) in frontier.iter().zip(stepped) {
            for (a, s) in succs? {
                let tgt = match index.get(&s) {
                    Some(&tgt) => tgt,
                    None => {
                        let tgt = ex.states.len();
                        let render = render_open(auto, &s.0, &s.1);
                        ex.digests.push(fnv1a(render.as_bytes()));
                        ex.renders.push(render);
                        ex.parent.push(Some((src, a.clone())));
                        ex.depth.push(ex.depth[src] + 1);
                        if auto.is_saturated(&s.1) {
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

    Ok(OExploreResult::Complete(ex))
}

/// The witness path from an initial open state to `target`.
pub fn otrace_to<A: OpenAutomaton>(auto: &A, ex: &OExplored<A::Local>, target: usize) -> Trace {
    let mut chain = Vec::new();
    let mut at = target;
    while let Some((prev, a)) = &ex.parent[at] {
        chain.push((a.clone(), at));
        at = *prev;
    }
    chain.reverse();
    let steps = chain
        .into_iter()
        .map(|(a, idx)| TraceStep {
            action: a.to_string(),
            label: auto.local_label(&ex.states[idx].1),
            digest: ex.digests[idx],
            state: ex.renders[idx].clone(),
        })
        .collect();
    Trace {
        initial: ex.renders[at].clone(),
        initial_digest: ex.digests[at],
        steps,
    }
}

/// Scan an exploration result against a predicate and wrap the verdict.
pub fn outcome_of<A: OpenAutomaton>(
    auto: &A,
    result: &OExploreResult<A::Local>,
    pred: &OpenPredicate<A::Local>,
) -> Outcome {
    let ex = result.explored();
    for (idx, (sigma, local)) in ex.states.iter().enumerate() {
        if !pred.holds(sigma, local) {
            return Outcome::Counterexample(otrace_to(auto, ex, idx));
        }
    }
    match result {
        OExploreResult::Complete(ex) => Outcome::Holds {
            states: ex.states.len(),
            transitions: ex.transitions.len(),
            saturated: ex.saturated,
        },
        OExploreResult::BoundExceeded { partial, bound } => Outcome::BoundExceeded {
            bound: bound.clone(),
            explored: partial.states.len(),
        },
    }
}

/// Does `pred` hold in every open-reachable state under the assumption?
pub fn check_open_invariant<A: OpenAutomaton>(
    auto: &A,
    env: &EnvAssumption,
    gen: &EnvGenerator,
    pred: &OpenPredicate<A::Local>,
    bounds: &Bounds,
) -> Result<Outcome, StepError> {
    let result = oexplore(auto, env, gen, bounds)?;
    Ok(outcome_of(auto, &result, pred))
}

/// Re-run an open trace against the same automaton and assumption. Every
/// step must match an actual successor by action text and state digest.
pub fn oreplay<A: OpenAutomaton>(
    auto: &A,
    env: &EnvAssumption,
    gen: &EnvGenerator,
    trace: &Trace,
) -> Result<(), ReplayError> {
    let mut at = auto
        .init()
        .into_iter()
        .find(|(sigma, local)| fnv1a(render_open(auto, sigma, local).as_bytes()) == trace.initial_digest)
        .ok_or(ReplayError::NoInitial(trace.initial_digest))?;
    for (index, step) in trace.steps.iter().enumerate() {
        let succs = osuccessors(auto, env, gen, &at.0, &at.1)
            .map_err(|e| ReplayError::Step(e.to_string()))?;
        at = succs
            .into_iter()
            .find(|(a, (sigma, local))| {
                a.to_string() == step.action
                    && fnv1a(render_open(auto, sigma, local).as_bytes()) == step.digest
            })
            .map(|(_, s)| s)
            .ok_or(ReplayError::NoSuccessor {
                index,
                action: step.action.clone(),
                digest: step.digest,
            })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open::{ActionPred, InterleaveAssumption, OpenSeqAutomaton, StateRel, SyncAssumption};
    use crate::semantics::Model;
    use crate::syntax::{Addr, Value};

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . ( < is_pkt > . broadcast(pkt(num, sip)) . call(P)
                        (+) < is_newpkt > . call(P) )
";

    fn model() -> Model {
        Model::build(ECHO, "net = 1 : {}\ndata_max = 1\nprocess = seq\n").unwrap()
    }

    fn nat_candidates(m: &Model, addrs: &[Addr]) -> EnvGenerator {
        // every default-shaped state with num varied over the nat domain
        let num = m.spec.vars.lookup("num").unwrap();
        let mut gen = EnvGenerator::empty();
        for &a in addrs {
            let base = m.default_state(a);
            gen.candidates.insert(
                a,
                (0..=m.dom.data_max)
                    .map(|k| base.with(num, Value::Nat(k)))
                    .collect(),
            );
        }
        gen
    }

    #[test]
    fn frozen_environment_never_takes_an_env_step() {
        let m = model();
        let auto = OpenSeqAutomaton::new(&m, Addr(1));
        let env = EnvAssumption::frozen(auto.owned());
        let r = oexplore(&auto, &env, &EnvGenerator::empty(), &Bounds::default()).unwrap();
        assert!(r.bound().is_none());
        for (_, a, _) in &r.explored().transitions {
            assert_ne!(*a, OAction::Env);
        }
    }

    #[test]
    fn generator_candidates_become_env_transitions() {
        let m = model();
        let auto = OpenSeqAutomaton::new(&m, Addr(1));
        let env = EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
                act: ActionPred::True,
            },
            inter: InterleaveAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
            },
        };
        // the address universe here is {1}, all owned: no unowned entry can
        // move, so even a permissive generator adds nothing...
        let gen = nat_candidates(&m, &[Addr(1)]);
        let r = oexplore(&auto, &env, &gen, &Bounds::default()).unwrap();
        assert!(r
            .explored()
            .transitions
            .iter()
            .all(|(_, a, _)| *a != OAction::Env));
    }

    #[test]
    fn unowned_entries_move_under_the_interleave_rule() {
        let m = Model::build(
            ECHO,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\n",
        )
        .unwrap();
        // automaton owns address 1 only; address 2 is environment
        let auto = OpenSeqAutomaton::new(&m, Addr(1));
        let env = EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
                act: ActionPred::True,
            },
            inter: InterleaveAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
            },
        };
        let gen = nat_candidates(&m, &[Addr(2)]);
        let r = oexplore(&auto, &env, &gen, &Bounds::default()).unwrap();
        let ex = r.explored();
        let env_steps: Vec<_> = ex
            .transitions
            .iter()
            .filter(|(_, a, _)| *a == OAction::Env)
            .collect();
        assert!(!env_steps.is_empty());
        // env steps leave the owned entry and the local state alone
        for (src, _, tgt) in &env_steps {
            let (s_sigma, s_local) = &ex.states[*src];
            let (t_sigma, t_local) = &ex.states[*tgt];
            assert_eq!(s_local, t_local);
            assert_eq!(s_sigma.get(Addr(1)), t_sigma.get(Addr(1)));
            assert_ne!(s_sigma.get(Addr(2)), t_sigma.get(Addr(2)));
        }
    }

    #[test]
    fn sync_action_predicate_prunes_automaton_moves() {
        let m = model();
        let auto = OpenSeqAutomaton::new(&m, Addr(1));
        let none_admitted = EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::Eq,
                owned: auto.owned(),
                act: ActionPred::RecvMsg(crate::open::MsgPred::DataAtMostSenderNat(
                    m.spec.vars.lookup("num").unwrap(),
                )),
            },
            inter: InterleaveAssumption {
                rel: StateRel::Eq,
                owned: auto.owned(),
            },
        };
        let permissive = EnvAssumption::frozen(auto.owned());
        let restricted = oexplore(&auto, &none_admitted, &EnvGenerator::empty(), &Bounds::default())
            .unwrap();
        let free = oexplore(&auto, &permissive, &EnvGenerator::empty(), &Bounds::default()).unwrap();
        // num defaults to 0 everywhere, so only pkt(0, _) receives pass the
        // data-at-most-sender predicate; the restricted graph is smaller
        assert!(restricted.explored().states.len() < free.explored().states.len());
        assert!(restricted.explored().states.len() > 1);
    }

    #[test]
    fn open_counterexamples_replay_on_the_same_assumption() {
        let m = Model::build(
            ECHO,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\n",
        )
        .unwrap();
        let auto = OpenSeqAutomaton::new(&m, Addr(1));
        let env = EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
                act: ActionPred::True,
            },
            inter: InterleaveAssumption {
                rel: StateRel::True,
                owned: auto.owned(),
            },
        };
        let gen = nat_candidates(&m, &[Addr(2)]);
        let num = m.spec.vars.lookup("num").unwrap();
        // falsified by any env move raising num at the unowned address
        let pred = OpenPredicate::new("peer num stays 0", move |sigma: &GlobalState, _: &_| {
            *sigma.get(Addr(2)).get(num) == Value::Nat(0)
        });
        let out = check_open_invariant(&auto, &env, &gen, &pred, &Bounds::default()).unwrap();
        let trace = out.counterexample().expect("the generator raises num");
        oreplay(&auto, &env, &gen, trace).unwrap();
    }
}
