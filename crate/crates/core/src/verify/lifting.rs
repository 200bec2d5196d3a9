//! Compositional lifting: reuse an invariant proved for the bare protocol
//! at each richer layer — behind a message queue, inside a node, in a
//! partial network, and finally in the closed network — by checking the
//! premises that justify the reuse instead of redoing the proof.
//!
//! The assumption triple is (E, F, R): E bounds what the environment does
//! to unowned entries while we act, F while we stand still, and R is the
//! predicate every message crossing the boundary satisfies. The premises
//! per layer are the ones the composition actually consumes; notably, a
//! message parked in the queue must keep satisfying R while the
//! environment interleaves, or the queue hands the protocol a message it
//! was never promised.

use std::collections::BTreeSet;

use crate::open::{
    ActionPred, EnvAssumption, EnvGenerator, GlobalState, InterleaveAssumption, MsgPred, OAction,
    OpenAutomaton, OpenClosedAutomaton, OpenClosedLocal, OpenLocal, OpenLocalAutomaton, OpenNet,
    OpenNode, OpenNodeAutomaton, OpenPnetAutomaton, StateRel, SyncAssumption,
};
use crate::semantics::{Action, Model, StepError};
use crate::syntax::{Addr, DataState};

use super::explore::Bounds;
use super::invariant::Outcome;
use super::oexplore::{oexplore, outcome_of, OExplored};
use super::predicate::OpenPredicate;

/// The shared ingredients of a lifting run.
pub struct LiftingInputs<'m> {
    pub model: &'m Model,
    /// E: environment behaviour admitted while the automaton acts.
    pub sync_rel: StateRel,
    /// F: environment behaviour admitted while the automaton stands still.
    pub inter_rel: StateRel,
    /// R: what every message crossing the boundary satisfies.
    pub msg_pred: MsgPred,
    pub gen: EnvGenerator,
    pub bounds: Bounds,
}

/// One checked premise.
#[derive(Debug)]
pub struct Premise {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl Premise {
    fn pass(name: &str) -> Premise {
        Premise {
            name: name.to_string(),
            pass: true,
            witness: None,
        }
    }

    fn fail(name: &str, witness: String) -> Premise {
        Premise {
            name: name.to_string(),
            pass: false,
            witness: Some(witness),
        }
    }
}

/// The composition stages above the bare protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Qmsg,
    Node,
    Pnet,
    Closed,
}

/// The outcome of lifting one layer: its premises, the invariant at that
/// layer, and (for the queue layer) the queue-contents conclusion.
#[derive(Debug)]
pub struct LiftingReport {
    pub layer: Layer,
    pub premises: Vec<Premise>,
    pub invariant: Outcome,
    pub queue_conclusion: Option<Premise>,
}

impl LiftingReport {
    pub fn premises_pass(&self) -> bool {
        self.premises.iter().all(|p| p.pass)
    }

    pub fn pass(&self) -> bool {
        self.premises_pass()
            && self.invariant.holds()
            && self.queue_conclusion.as_ref().map_or(true, |p| p.pass)
    }
}

impl std::fmt::Display for LiftingReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "layer {:?}:", self.layer)?;
        for p in &self.premises {
            writeln!(
                f,
                "  premise {}: {}{}",
                p.name,
                if p.pass { "pass" } else { "FAIL" },
                p.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
            )?;
        }
        writeln!(f, "  invariant: {}", self.invariant)?;
        if let Some(q) = &self.queue_conclusion {
            writeln!(
                f,
                "  queued messages: {}{}",
                if q.pass { "pass" } else { "FAIL" },
                q.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// Data states the relation premises are sampled over: every default state
/// plus every generator candidate.
fn sample_states(inputs: &LiftingInputs) -> Vec<DataState> {
    let mut out: Vec<DataState> = inputs
        .model
        .dom
        .address_domain()
        .iter()
        .map(|&a| inputs.model.default_state(a))
        .collect();
    for cands in inputs.gen.candidates.values() {
        out.extend(cands.iter().cloned());
    }
    out.sort();
    out.dedup();
    out
}

/// E ⇒ F: anything the environment may do alongside our action it may
/// also do while we stand still (otherwise interleaving loses behaviour).
fn sync_implies_inter(inputs: &LiftingInputs) -> Premise {
    let name = "sync relation implies interleave relation";
    let states = sample_states(inputs);
    for a in &states {
        for b in &states {
            if inputs.sync_rel.holds(a, b) && !inputs.inter_rel.holds(a, b) {
                return Premise::fail(
                    name,
                    format!(
                        "{} admits {} -> {} but {} refuses it",
                        inputs.sync_rel.name(),
                        a.render(inputs.model.vars()),
                        b.render(inputs.model.vars()),
                        inputs.inter_rel.name()
                    ),
                );
            }
        }
    }
    Premise::pass(name)
}

/// F reflexive: standing still is always an admitted environment move.
fn inter_reflexive(inputs: &LiftingInputs) -> Premise {
    let name = "interleave relation is reflexive";
    let states = sample_states(inputs);
    if inputs.inter_rel.reflexive_on(&states) {
        Premise::pass(name)
    } else {
        Premise::fail(
            name,
            format!("{} rejects some identity step", inputs.inter_rel.name()),
        )
    }
}

/// R survives F: a message satisfying R keeps satisfying it while the
/// environment interleaves, so parked messages stay legitimate.
fn msg_preserved(
    inputs: &LiftingInputs,
    owned: &BTreeSet<Addr>,
    sigmas: &[&GlobalState],
) -> Premise {
    let name = "message predicate preserved by interleaved environment steps";
    let msgs = inputs.model.dom.messages();
    for sigma in sigmas {
        for combo in inputs.gen.updates(sigma, owned, &inputs.inter_rel) {
            let next = sigma.updated(&combo);
            for m in &msgs {
                if inputs.msg_pred.holds(sigma, m) && !inputs.msg_pred.holds(&next, m) {
                    return Premise::fail(
                        name,
                        format!(
                            "{m} satisfies {} in {} but not after an admitted env step",
                            inputs.msg_pred.name(),
                            sigma.render(inputs.model)
                        ),
                    );
                }
            }
        }
    }
    Premise::pass(name)
}

/// The sync assumption admits exactly the receives R blesses.
fn recv_coherent(inputs: &LiftingInputs, act: &ActionPred, sigmas: &[&GlobalState]) -> Premise {
    let name = "assumption admits exactly the receives the message predicate blesses";
    let msgs = inputs.model.dom.messages();
    for sigma in sigmas {
        for m in &msgs {
            let admitted = act.holds(sigma, &Action::Receive(m.clone()));
            let blessed = inputs.msg_pred.holds(sigma, m);
            if admitted != blessed {
                return Premise::fail(
                    name,
                    format!(
                        "receive of {m} is {} but {} says {}",
                        if admitted { "admitted" } else { "refused" },
                        inputs.msg_pred.name(),
                        blessed
                    ),
                );
            }
        }
    }
    Premise::pass(name)
}

/// The sync assumption admits exactly the genuine arrivals R blesses.
fn arrive_coherent(inputs: &LiftingInputs, act: &ActionPred, sigmas: &[&GlobalState]) -> Premise {
    let name = "assumption admits exactly the arrivals the message predicate blesses";
    let msgs = inputs.model.dom.messages();
    let addrs = inputs.model.dom.address_domain();
    for sigma in sigmas {
        for m in &msgs {
            for &a in &addrs {
                let arrive = Action::Arrive(
                    BTreeSet::from([a]),
                    BTreeSet::new(),
                    m.clone(),
                );
                let admitted = act.holds(sigma, &arrive);
                let blessed = inputs.msg_pred.holds(sigma, m);
                if admitted != blessed {
                    return Premise::fail(
                        name,
                        format!(
                            "arrival of {m} at {a} is {} but {} says {}",
                            if admitted { "admitted" } else { "refused" },
                            inputs.msg_pred.name(),
                            blessed
                        ),
                    );
                }
            }
        }
    }
    Premise::pass(name)
}

/// Closing eliminated external input: nothing arrives from outside.
fn no_arrivals<L>(ex: &OExplored<L>) -> Premise {
    let name = "closed network takes no external arrivals";
    for (_, a, _) in &ex.transitions {
        if let OAction::Act(Action::Arrive(..)) = a {
            return Premise::fail(name, format!("explored an {a} transition"));
        }
    }
    Premise::pass(name)
}

/// Every queued message satisfies R against the current global state.
fn queued_satisfy(inputs: &LiftingInputs, ex: &OExplored<OpenLocal>) -> Premise {
    let name = "all queued messages satisfy the message predicate";
    for (sigma, local) in &ex.states {
        if let Some(q) = &local.queue {
            for m in q {
                if !inputs.msg_pred.holds(sigma, m) {
                    return Premise::fail(
                        name,
                        format!(
                            "queued {m} violates {} in {}",
                            inputs.msg_pred.name(),
                            sigma.render(inputs.model)
                        ),
                    );
                }
            }
        }
    }
    Premise::pass(name)
}

fn assumption(
    inputs: &LiftingInputs,
    owned: BTreeSet<Addr>,
    act: ActionPred,
) -> EnvAssumption {
    EnvAssumption {
        sync: SyncAssumption {
            rel: inputs.sync_rel.clone(),
            owned: owned.clone(),
            act,
        },
        inter: InterleaveAssumption {
            rel: inputs.inter_rel.clone(),
            owned,
        },
    }
}

/// The base proof this module lifts: the open invariant for the bare
/// protocol under receive-constrained input.
pub fn base_assumption(inputs: &LiftingInputs, owned: BTreeSet<Addr>) -> EnvAssumption {
    assumption(inputs, owned, ActionPred::RecvMsg(inputs.msg_pred.clone()))
}

fn sigmas_of<L>(ex: &OExplored<L>) -> Vec<&GlobalState> {
    ex.states.iter().map(|(s, _)| s).collect()
}

/// Lift to the queue composition: protocol ⟨⟨ message queue.
pub fn lift_qmsg(
    inputs: &LiftingInputs,
    addr: Addr,
    pred: &OpenPredicate<OpenLocal>,
) -> Result<LiftingReport, StepError> {
    let auto = OpenLocalAutomaton::new(inputs.model, addr);
    let owned = auto.owned();
    let env = assumption(inputs, owned.clone(), ActionPred::RecvMsg(inputs.msg_pred.clone()));
    let result = oexplore(&auto, &env, &inputs.gen, &inputs.bounds)?;
    let ex = result.explored();
    let sigmas = sigmas_of(ex);
    let premises = vec![
        sync_implies_inter(inputs),
        inter_reflexive(inputs),
        msg_preserved(inputs, &owned, &sigmas),
        recv_coherent(inputs, &env.sync.act, &sigmas),
    ];
    let queue_conclusion = Some(queued_satisfy(inputs, ex));
    let invariant = outcome_of(&auto, &result, pred);
    Ok(LiftingReport {
        layer: Layer::Qmsg,
        premises,
        invariant,
        queue_conclusion,
    })
}

/// Lift to the node: casts resolve against the connectivity range and
/// input becomes genuine arrival.
pub fn lift_node(
    inputs: &LiftingInputs,
    pred: &OpenPredicate<OpenNode>,
) -> Result<LiftingReport, StepError> {
    let auto = OpenNodeAutomaton::new(inputs.model);
    let owned = auto.owned();
    let env = assumption(inputs, owned.clone(), ActionPred::ArriveMsg(inputs.msg_pred.clone()));
    let result = oexplore(&auto, &env, &inputs.gen, &inputs.bounds)?;
    let ex = result.explored();
    let sigmas = sigmas_of(ex);
    let premises = vec![
        sync_implies_inter(inputs),
        inter_reflexive(inputs),
        msg_preserved(inputs, &owned, &sigmas),
        arrive_coherent(inputs, &env.sync.act, &sigmas),
    ];
    let invariant = outcome_of(&auto, &result, pred);
    Ok(LiftingReport {
        layer: Layer::Node,
        premises,
        invariant,
        queue_conclusion: None,
    })
}

/// Lift to the partial network: all nodes of the scenario composed, the
/// environment reduced to the rest of the world.
pub fn lift_pnet(
    inputs: &LiftingInputs,
    pred: &OpenPredicate<OpenNet>,
) -> Result<LiftingReport, StepError> {
    let auto = OpenPnetAutomaton::new(inputs.model);
    let owned = auto.owned();
    let env = assumption(inputs, owned.clone(), ActionPred::ArriveMsg(inputs.msg_pred.clone()));
    let result = oexplore(&auto, &env, &inputs.gen, &inputs.bounds)?;
    let ex = result.explored();
    let sigmas = sigmas_of(ex);
    let premises = vec![
        inter_reflexive(inputs),
        msg_preserved(inputs, &owned, &sigmas),
        arrive_coherent(inputs, &env.sync.act, &sigmas),
    ];
    let invariant = outcome_of(&auto, &result, pred);
    Ok(LiftingReport {
        layer: Layer::Pnet,
        premises,
        invariant,
        queue_conclusion: None,
    })
}

/// Lift to the closed network: external input is gone, so the sync side of
/// the assumption is discharged once and for all.
pub fn lift_closed(
    inputs: &LiftingInputs,
    pred: &OpenPredicate<OpenClosedLocal>,
) -> Result<LiftingReport, StepError> {
    let auto = OpenClosedAutomaton::new(inputs.model);
    let owned = auto.owned();
    let env = assumption(inputs, owned, ActionPred::True);
    let result = oexplore(&auto, &env, &inputs.gen, &inputs.bounds)?;
    let ex = result.explored();
    let premises = vec![inter_reflexive(inputs), no_arrivals(ex)];
    let invariant = outcome_of(&auto, &result, pred);
    Ok(LiftingReport {
        layer: Layer::Closed,
        premises,
        invariant,
        queue_conclusion: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Value, VarId};

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . ( < is_pkt > . broadcast(pkt(num, sip)) . call(P)
                        (+) < is_newpkt > . call(P) )
";

    // unlike ECHO, the designated nat n only ever grows under the protocol
    // itself, not just under the assumed environment
    const RELAY: &str = "\
vars msg: msg, num: nat, sip: addr, n: nat
process P:
    receive(msg) .
    ( < is_pkt > . [[n := max(n, num)]] . broadcast(pkt(n, sip)) . call(P)
    (+) < is_newpkt > . call(P) )
";

    fn inputs(m: &Model, sync: StateRel, inter: StateRel, num: VarId) -> LiftingInputs<'_> {
        let mut gen = EnvGenerator::empty();
        for &a in &m.dom.address_domain() {
            if a == Addr(1) {
                continue;
            }
            let base = m.default_state(a);
            gen.candidates.insert(
                a,
                (0..=m.dom.data_max)
                    .map(|k| base.with(num, Value::Nat(k)))
                    .collect(),
            );
        }
        LiftingInputs {
            model: m,
            sync_rel: sync,
            inter_rel: inter,
            msg_pred: MsgPred::DataAtMostSenderNat(num),
            gen,
            bounds: Bounds::default(),
        }
    }

    #[test]
    fn queue_layer_premises_hold_for_a_monotone_protocol() {
        let m = Model::build(RELAY, "net = (1 : {2}) || (2 : {1})\ndata_max = 1\n").unwrap();
        let n = m.spec.vars.lookup("n").unwrap();
        let ins = inputs(
            &m,
            StateRel::NatNonDecreasing(n),
            StateRel::NatNonDecreasing(n),
            n,
        );
        let trivial = OpenPredicate::new("true", |_, _: &OpenLocal| true);
        let report = lift_qmsg(&ins, Addr(1), &trivial).unwrap();
        assert!(report.pass(), "{report}");
        assert!(report.queue_conclusion.as_ref().unwrap().pass);
    }

    #[test]
    fn a_protocol_that_lowers_its_own_nat_breaks_the_queue_conclusion() {
        // ECHO rebinds num on every received packet, downwards included, so
        // a queued packet claiming the owned address as sender can be
        // invalidated by the node's own move — something no environment
        // premise rules out
        let m = Model::build(ECHO, "net = (1 : {2}) || (2 : {1})\ndata_max = 1\n").unwrap();
        let num = m.spec.vars.lookup("num").unwrap();
        let ins = inputs(
            &m,
            StateRel::NatNonDecreasing(num),
            StateRel::NatNonDecreasing(num),
            num,
        );
        let trivial = OpenPredicate::new("true", |_, _: &OpenLocal| true);
        let report = lift_qmsg(&ins, Addr(1), &trivial).unwrap();
        assert!(report.premises_pass(), "{report}");
        assert!(!report.queue_conclusion.as_ref().unwrap().pass);
    }

    #[test]
    fn a_lawless_environment_breaks_message_preservation() {
        let m = Model::build(ECHO, "net = (1 : {2}) || (2 : {1})\ndata_max = 1\n").unwrap();
        let num = m.spec.vars.lookup("num").unwrap();
        // F = anything: the sender's nat may drop below a parked payload
        let ins = inputs(&m, StateRel::NatNonDecreasing(num), StateRel::True, num);
        let trivial = OpenPredicate::new("true", |_, _: &OpenLocal| true);
        let report = lift_qmsg(&ins, Addr(1), &trivial).unwrap();
        let broken = report
            .premises
            .iter()
            .find(|p| p.name.contains("preserved"))
            .unwrap();
        assert!(!broken.pass);
        assert!(broken.witness.is_some());
    }

    #[test]
    fn sync_stronger_than_interleave_is_caught_the_other_way_round() {
        let m = Model::build(ECHO, "net = (1 : {2}) || (2 : {1})\ndata_max = 1\n").unwrap();
        let num = m.spec.vars.lookup("num").unwrap();
        // E = anything but F = frozen: acting would see env moves that
        // interleaving forbids
        let ins = inputs(&m, StateRel::True, StateRel::Eq, num);
        let trivial = OpenPredicate::new("true", |_, _: &OpenLocal| true);
        let report = lift_qmsg(&ins, Addr(1), &trivial).unwrap();
        let implies = report
            .premises
            .iter()
            .find(|p| p.name.contains("implies"))
            .unwrap();
        assert!(!implies.pass);
    }

    #[test]
    fn closed_layer_confirms_no_external_arrivals() {
        let m = Model::build(ECHO, "net = (1 : {2}) || (2 : {1})\ndata_max = 1\n").unwrap();
        let num = m.spec.vars.lookup("num").unwrap();
        let ins = inputs(
            &m,
            StateRel::NatNonDecreasing(num),
            StateRel::NatNonDecreasing(num),
            num,
        );
        let trivial = OpenPredicate::new("true", |_, _: &OpenClosedLocal| true);
        let report = lift_closed(&ins, &trivial).unwrap();
        assert!(report.pass(), "{report}");
        assert!(report
            .premises
            .iter()
            .any(|p| p.name.contains("no external arrivals") && p.pass));
    }
}
