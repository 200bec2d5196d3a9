//! The bundled toy protocol and its invariant suite.
//!
//! The corpus ships a small flooding protocol: each node remembers the
//! largest payload it has heard of (`no`), floods increases to its
//! neighbours, and records which neighbour told it (`nhip`). Three broken
//! variants are shipped alongside, each falsifying one of the invariants
//! the honest model satisfies, plus three scenarios (one node, a pair, a
//! three-node line with injected fresh packets).
//!
//! [`ToySuite`] resolves the protocol's variables once and hands out the
//! named predicates for every semantic layer, the labelled predicates the
//! proof-obligation route consumes, and the environment assumption the
//! open layers are checked under: neighbours never lower their `no`, and
//! every packet crossing the boundary carries at most its sender's `no`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::open::{
    ActionPred, EnvAssumption, EnvGenerator, GlobalState, InterleaveAssumption, MsgPred, StateRel,
    SyncAssumption,
};
use crate::semantics::{
    net_nodes, ClosedState, LocalState, Model, NetState, NodeState, SeqState,
};
use crate::syntax::{
    Addr, DataState, Label, Message, ProcId, Value, VarId, VarType,
};
use crate::verify::{
    Bounds, LabelledPredicate, LiftingInputs, OpenPredicate, StatePredicate, StepPredicate,
};

pub const TOY: &str = include_str!("../corpus/toy.awn");
pub const TOY_NO_NHIP_RESET: &str = include_str!("../corpus/toy_no_nhip_reset.awn");
pub const TOY_OVERWRITE_NO: &str = include_str!("../corpus/toy_overwrite_no.awn");
pub const TOY_STALE_SENDER: &str = include_str!("../corpus/toy_stale_sender.awn");

pub const SINGLE: &str = include_str!("../corpus/single.scn");
pub const LINE2: &str = include_str!("../corpus/line2.scn");
pub const NET3: &str = include_str!("../corpus/net3.scn");

/// Expected outcomes for model/scenario/predicate combinations, one line
/// each; kept as data so reruns stay honest.
pub const EXPECTED_VERDICTS: &str = include_str!("../corpus/expected_verdicts.txt");

/// Bundled model text by short name.
pub fn model_source(name: &str) -> Option<&'static str> {
    match name {
        "toy" => Some(TOY),
        "no_nhip_reset" => Some(TOY_NO_NHIP_RESET),
        "overwrite_no" => Some(TOY_OVERWRITE_NO),
        "stale_sender" => Some(TOY_STALE_SENDER),
        _ => None,
    }
}

/// Bundled scenario text by short name.
pub fn scenario_source(name: &str) -> Option<&'static str> {
    match name {
        "single" => Some(SINGLE),
        "line2" => Some(LINE2),
        "net3" => Some(NET3),
        _ => None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToyError {
    #[error("model needs a variable `{name}` of type {ty}")]
    MissingVar { name: &'static str, ty: VarType },
}

/// The protocol's variables, resolved against a concrete model.
#[derive(Debug, Clone, Copy)]
pub struct ToyVars {
    pub msg: VarId,
    pub num: VarId,
    pub sip: VarId,
    pub ip: VarId,
    pub no: VarId,
    pub nhip: VarId,
}

impl ToyVars {
    pub fn resolve(model: &Model) -> Result<ToyVars, ToyError> {
        let want = |name: &'static str, ty: VarType| -> Result<VarId, ToyError> {
            match model.vars().lookup(name) {
                Some(id) if model.vars().ty(id) == ty => Ok(id),
                _ => Err(ToyError::MissingVar { name, ty }),
            }
        };
        Ok(ToyVars {
            msg: want("msg", VarType::Msg)?,
            num: want("num", VarType::Nat)?,
            sip: want("sip", VarType::Addr)?,
            ip: want("ip", VarType::Addr)?,
            no: want("no", VarType::Nat)?,
            nhip: want("nhip", VarType::Addr)?,
        })
    }
}

fn nat(v: &Value) -> u64 {
    match v {
        Value::Nat(n) => *n,
        _ => 0,
    }
}

fn addr(v: &Value) -> Option<Addr> {
    match v {
        Value::Addr(a) => Some(*a),
        _ => None,
    }
}

/// The invariant suite for one model: variables plus the label window the
/// next-hop invariant talks about.
#[derive(Debug)]
pub struct ToySuite {
    pub vars: ToyVars,
    entry: ProcId,
    /// Terms whose next label sits between the receive and the flood.
    window: BTreeSet<u32>,
    /// Labels per term, for running a labelled predicate outside the
    /// obligation generator.
    labels: BTreeMap<u32, Vec<Label>>,
}

fn in_window(entry: ProcId, l: &Label) -> bool {
    l.proc == entry && (2..=8).contains(&l.index)
}

impl ToySuite {
    pub fn new(model: &Model) -> Result<ToySuite, ToyError> {
        let vars = ToyVars::resolve(model)?;
        let entry = model.entry;
        let mut window = BTreeSet::new();
        let mut labels = BTreeMap::new();
        for t in model.spec.subterms() {
            let ls = model.labels_at(t);
            if ls.iter().any(|l| in_window(entry, l)) {
                window.insert(t.0);
            }
            labels.insert(t.0, ls.to_vec());
        }
        Ok(ToySuite {
            vars,
            entry,
            window,
            labels,
        })
    }

    fn nhip_eq_ip_xi(&self, in_win: bool, xi: &DataState) -> bool {
        !in_win || xi.get(self.vars.nhip) == xi.get(self.vars.ip)
    }

    fn nhip_eq_ip_seq_state(&self, s: &SeqState) -> bool {
        self.nhip_eq_ip_xi(self.window.contains(&s.ctl.0), &s.xi)
    }

    /// Between taking a message and flooding it on, the next-hop register
    /// still points at the node itself.
    pub fn nhip_eq_ip_seq(&self) -> StatePredicate<SeqState> {
        let me = self.clone_parts();
        StatePredicate::new("nhip_eq_ip", move |s: &SeqState| me.nhip_eq_ip_seq_state(s))
    }

    pub fn nhip_eq_ip_local(&self) -> StatePredicate<LocalState> {
        let me = self.clone_parts();
        StatePredicate::new("nhip_eq_ip", move |s: &LocalState| {
            me.nhip_eq_ip_seq_state(&s.seq)
        })
    }

    pub fn nhip_eq_ip_node(&self) -> StatePredicate<NodeState> {
        let me = self.clone_parts();
        StatePredicate::new("nhip_eq_ip", move |s: &NodeState| {
            me.nhip_eq_ip_seq_state(&s.local.seq)
        })
    }

    pub fn nhip_eq_ip_net(&self) -> StatePredicate<NetState> {
        let me = self.clone_parts();
        StatePredicate::new("nhip_eq_ip", move |s: &NetState| {
            let mut nodes = Vec::new();
            net_nodes(s, &mut nodes);
            nodes.iter().all(|n| me.nhip_eq_ip_seq_state(&n.local.seq))
        })
    }

    pub fn nhip_eq_ip_closed(&self) -> StatePredicate<ClosedState> {
        let inner = self.nhip_eq_ip_net();
        StatePredicate::new("nhip_eq_ip", move |s: &ClosedState| inner.holds(&s.net))
    }

    /// `no` never decreases across a step.
    pub fn nos_increase_local(&self) -> StepPredicate<LocalState> {
        let no = self.vars.no;
        StepPredicate::new("nos_increase", move |s: &LocalState, _, t: &LocalState| {
            nat(s.seq.xi.get(no)) <= nat(t.seq.xi.get(no))
        })
    }

    pub fn nos_increase_closed(&self) -> StepPredicate<ClosedState> {
        let no = self.vars.no;
        StepPredicate::new("nos_increase", move |s: &ClosedState, _, t: &ClosedState| {
            let before = nos_by_addr(no, &s.net);
            let after = nos_by_addr(no, &t.net);
            before
                .iter()
                .all(|(a, n)| after.get(a).is_none_or(|m| n <= m))
        })
    }

    /// A node's own address is never written.
    pub fn ip_constant_local(&self) -> StepPredicate<LocalState> {
        let ip = self.vars.ip;
        StepPredicate::new("ip_constant", move |s: &LocalState, _, t: &LocalState| {
            s.seq.xi.get(ip) == t.seq.xi.get(ip)
        })
    }

    pub fn ip_constant_closed(&self) -> StepPredicate<ClosedState> {
        let ip = self.vars.ip;
        StepPredicate::new("ip_constant", move |s: &ClosedState, _, t: &ClosedState| {
            let mut before = Vec::new();
            net_nodes(&s.net, &mut before);
            let mut after = Vec::new();
            net_nodes(&t.net, &mut after);
            before.iter().zip(after.iter()).all(|(b, a)| {
                b.addr == a.addr && b.local.seq.xi.get(ip) == a.local.seq.xi.get(ip)
            })
        })
    }

    /// Type-level sanity: the designated counter is a nat. Trivially true;
    /// kept as the degenerate member of the suite.
    pub fn no_nonneg_local(&self) -> StatePredicate<LocalState> {
        let no = self.vars.no;
        StatePredicate::new("no_nonneg", move |s: &LocalState| {
            matches!(s.seq.xi.get(no), Value::Nat(_))
        })
    }

    pub fn no_nonneg_seq(&self) -> StatePredicate<SeqState> {
        let no = self.vars.no;
        StatePredicate::new("no_nonneg", move |s: &SeqState| {
            matches!(s.xi.get(no), Value::Nat(_))
        })
    }

    /// Every queued packet is covered by its claimed sender: the payload is
    /// at most the `no` the sender holds right now. Fresh packets are
    /// exempt.
    pub fn msg_num_ok_net(&self) -> StatePredicate<NetState> {
        let v = self.vars;
        StatePredicate::new("msg_num_ok", move |s: &NetState| {
            let nos = nos_by_addr(v.no, s);
            let mut nodes = Vec::new();
            net_nodes(s, &mut nodes);
            nodes
                .iter()
                .flat_map(|n| n.local.queue.iter().flatten())
                .all(|m| match m {
                    Message::Pkt { data, src } => *data <= nos.get(src).copied().unwrap_or(0),
                    Message::NewPkt { .. } => true,
                })
        })
    }

    pub fn msg_num_ok_closed(&self) -> StatePredicate<ClosedState> {
        let inner = self.msg_num_ok_net();
        StatePredicate::new("msg_num_ok", move |s: &ClosedState| inner.holds(&s.net))
    }

    /// The recorded next hop is never behind: a node's `no` is at most the
    /// `no` of the neighbour it points at. Addresses hosting no node count
    /// as holding the quiescent zero.
    pub fn bigger_than_next_net(&self) -> StatePredicate<NetState> {
        let v = self.vars;
        StatePredicate::new("bigger_than_next", move |s: &NetState| {
            let nos = nos_by_addr(v.no, s);
            let mut nodes = Vec::new();
            net_nodes(s, &mut nodes);
            nodes.iter().all(|n| {
                let xi = &n.local.seq.xi;
                match addr(xi.get(v.nhip)) {
                    Some(nh) => nat(xi.get(v.no)) <= nos.get(&nh).copied().unwrap_or(0),
                    None => false,
                }
            })
        })
    }

    pub fn bigger_than_next_closed(&self) -> StatePredicate<ClosedState> {
        let inner = self.bigger_than_next_net();
        StatePredicate::new("bigger_than_next", move |s: &ClosedState| inner.holds(&s.net))
    }

    /// The open-model reading of the next-hop invariant: checked against
    /// the global view, for the listed addresses, at any layer.
    pub fn bigger_than_next_open<L>(&self, addrs: &BTreeSet<Addr>) -> OpenPredicate<L> {
        let v = self.vars;
        let addrs = addrs.clone();
        OpenPredicate::new("bigger_than_next", move |sigma: &GlobalState, _: &L| {
            addrs.iter().all(|&i| {
                let xi = sigma.get(i);
                match addr(xi.get(v.nhip)) {
                    Some(nh) => nat(xi.get(v.no)) <= nat(sigma.get(nh).get(v.no)),
                    None => false,
                }
            })
        })
    }

    /// State predicates by name, sequential layer.
    pub fn seq_state(&self, name: &str) -> Option<StatePredicate<SeqState>> {
        match name {
            "nhip_eq_ip" => Some(self.nhip_eq_ip_seq()),
            "no_nonneg" => Some(self.no_nonneg_seq()),
            _ => None,
        }
    }

    pub fn local_state(&self, name: &str) -> Option<StatePredicate<LocalState>> {
        match name {
            "nhip_eq_ip" => Some(self.nhip_eq_ip_local()),
            "no_nonneg" => Some(self.no_nonneg_local()),
            _ => None,
        }
    }

    pub fn local_step(&self, name: &str) -> Option<StepPredicate<LocalState>> {
        match name {
            "nos_increase" => Some(self.nos_increase_local()),
            "ip_constant" => Some(self.ip_constant_local()),
            _ => None,
        }
    }

    pub fn node_state(&self, name: &str) -> Option<StatePredicate<NodeState>> {
        match name {
            "nhip_eq_ip" => Some(self.nhip_eq_ip_node()),
            _ => None,
        }
    }

    pub fn net_state(&self, name: &str) -> Option<StatePredicate<NetState>> {
        match name {
            "nhip_eq_ip" => Some(self.nhip_eq_ip_net()),
            "msg_num_ok" => Some(self.msg_num_ok_net()),
            "bigger_than_next" => Some(self.bigger_than_next_net()),
            _ => None,
        }
    }

    pub fn closed_state(&self, name: &str) -> Option<StatePredicate<ClosedState>> {
        match name {
            "nhip_eq_ip" => Some(self.nhip_eq_ip_closed()),
            "msg_num_ok" => Some(self.msg_num_ok_closed()),
            "bigger_than_next" => Some(self.bigger_than_next_closed()),
            "no_nonneg" => {
                let no = self.vars.no;
                Some(StatePredicate::new("no_nonneg", move |s: &ClosedState| {
                    let mut nodes = Vec::new();
                    net_nodes(&s.net, &mut nodes);
                    nodes
                        .iter()
                        .all(|n| matches!(n.local.seq.xi.get(no), Value::Nat(_)))
                }))
            }
            _ => None,
        }
    }

    pub fn closed_step(&self, name: &str) -> Option<StepPredicate<ClosedState>> {
        match name {
            "nos_increase" => Some(self.nos_increase_closed()),
            "ip_constant" => Some(self.ip_constant_closed()),
            _ => None,
        }
    }

    /// The pair of readings of one predicate: labelled for the obligation
    /// route, plain for the explorer, built from a single definition so the
    /// two routes cannot drift apart.
    pub fn dual(
        &self,
        name: &str,
        f: impl Fn(ToyVars, &DataState, &[Label]) -> bool + Clone + Send + Sync + 'static,
    ) -> DualPredicate {
        let vars = self.vars;
        let g = f.clone();
        let labelled = LabelledPredicate::new(name, move |xi, ls| g(vars, xi, ls));
        let labels = self.labels.clone();
        let state = StatePredicate::new(name, move |s: &SeqState| {
            let ls = labels.get(&s.ctl.0).map(|v| &v[..]).unwrap_or(&[]);
            f(vars, &s.xi, ls)
        });
        DualPredicate { labelled, state }
    }

    pub fn vc_nhip_eq_ip(&self) -> DualPredicate {
        let entry = self.entry;
        self.dual("nhip_eq_ip", move |v, xi, ls| {
            !ls.iter().any(|l| in_window(entry, l)) || xi.get(v.nhip) == xi.get(v.ip)
        })
    }

    /// At the flood of a fresh payload the counter has caught up with it.
    pub fn vc_no_ge_num_at_send(&self) -> DualPredicate {
        let entry = self.entry;
        self.dual("no_ge_num_at_send", move |v, xi, ls| {
            !ls.iter().any(|l| l.proc == entry && l.index == 4)
                || nat(xi.get(v.num)) <= nat(xi.get(v.no))
        })
    }

    /// Deliberately false: the counter stays below two.
    pub fn vc_no_at_most_one(&self) -> DualPredicate {
        self.dual("no_at_most_one", move |v, xi, _| nat(xi.get(v.no)) <= 1)
    }

    pub fn vc_trio(&self) -> Vec<DualPredicate> {
        vec![
            self.vc_nhip_eq_ip(),
            self.vc_no_ge_num_at_send(),
            self.vc_no_at_most_one(),
        ]
    }

    /// S/U for the queue and sequential layers: neighbours never lower
    /// their `no`, and received messages respect the sender bound.
    pub fn env_recv(&self, owned: BTreeSet<Addr>) -> EnvAssumption {
        self.env_with(owned, ActionPred::RecvMsg(MsgPred::DataAtMostSenderNat(self.vars.no)))
    }

    /// S/U for the node and network layers: the bound is read off genuine
    /// arrivals instead of receives.
    pub fn env_arrive(&self, owned: BTreeSet<Addr>) -> EnvAssumption {
        self.env_with(owned, ActionPred::ArriveMsg(MsgPred::DataAtMostSenderNat(self.vars.no)))
    }

    fn env_with(&self, owned: BTreeSet<Addr>, act: ActionPred) -> EnvAssumption {
        EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::NatNonDecreasing(self.vars.no),
                owned: owned.clone(),
                act,
            },
            inter: InterleaveAssumption {
                rel: StateRel::NatNonDecreasing(self.vars.no),
                owned,
            },
        }
    }

    /// Candidate environment states: every address may raise its `no` up
    /// to the data bound, starting from quiescence.
    pub fn generator(&self, model: &Model) -> EnvGenerator {
        let mut candidates = BTreeMap::new();
        for a in model.dom.address_domain() {
            let base = model.default_state(a);
            let opts: Vec<DataState> = (1..=model.dom.data_max)
                .map(|k| base.with(self.vars.no, Value::Nat(k)))
                .collect();
            candidates.insert(a, opts);
        }
        EnvGenerator { candidates }
    }

    /// Everything the layer-by-layer lifting needs, in one place.
    pub fn lifting_inputs<'m>(&self, model: &'m Model, bounds: Bounds) -> LiftingInputs<'m> {
        LiftingInputs {
            model,
            sync_rel: StateRel::NatNonDecreasing(self.vars.no),
            inter_rel: StateRel::NatNonDecreasing(self.vars.no),
            msg_pred: MsgPred::DataAtMostSenderNat(self.vars.no),
            gen: self.generator(model),
            bounds,
        }
    }

    fn clone_parts(&self) -> ToySuite {
        ToySuite {
            vars: self.vars,
            entry: self.entry,
            window: self.window.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// One predicate, two readings; see [`ToySuite::dual`].
pub struct DualPredicate {
    pub labelled: LabelledPredicate,
    pub state: StatePredicate<SeqState>,
}

fn nos_by_addr(no: VarId, s: &NetState) -> BTreeMap<Addr, u64> {
    let mut nodes = Vec::new();
    net_nodes(s, &mut nodes);
    nodes
        .iter()
        .map(|n| (n.addr, nat(n.local.seq.xi.get(no))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Control;
    use crate::semantics::Model;

    #[test]
    fn every_bundled_model_builds_against_the_single_scenario() {
        for name in ["toy", "no_nhip_reset", "overwrite_no", "stale_sender"] {
            let src = model_source(name).unwrap();
            let model = Model::build(src, SINGLE).unwrap();
            ToySuite::new(&model).unwrap();
        }
    }

    #[test]
    fn the_honest_model_builds_against_every_scenario() {
        for scn in ["single", "line2", "net3"] {
            Model::build(TOY, scenario_source(scn).unwrap()).unwrap();
        }
    }

    #[test]
    fn label_layout_is_the_documented_one() {
        // [DERIVED] hand walk of the process text: labels 0..=11 with 2 and
        // 6 each naming both branches of a choice, fourteen control terms.
        let model = Model::build(TOY, SINGLE).unwrap();
        let control = Control::new(&model.spec).unwrap();
        let cterms = control.cterms();
        assert_eq!(cterms.len(), 14);
        assert!(control.check_simple_labels());

        let mut by_index: BTreeMap<u32, usize> = BTreeMap::new();
        for t in &cterms {
            for l in control.labels_of(*t) {
                *by_index.entry(l.index).or_insert(0) += 1;
            }
        }
        let expect: BTreeMap<u32, usize> = [
            (0, 1),
            (1, 1),
            (2, 2),
            (3, 1),
            (4, 1),
            (5, 1),
            (6, 2),
            (7, 1),
            (8, 1),
            (9, 1),
            (10, 1),
            (11, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(by_index, expect);
        assert_eq!(
            model.spec.render_label(Label {
                proc: model.entry,
                index: 4
            }),
            "PToy-:4"
        );
    }

    #[test]
    fn a_model_without_the_counter_is_rejected() {
        let src = "\
vars msg: msg, num: nat, sip: addr, ip: addr, nhip: addr
process P: receive(msg) . call(P)
";
        let model = Model::build(src, "net = 1 : {}\n").unwrap();
        let err = ToySuite::new(&model).unwrap_err();
        assert_eq!(
            err,
            ToyError::MissingVar {
                name: "no",
                ty: VarType::Nat
            }
        );
    }

    #[test]
    fn the_generator_offers_each_address_a_raised_counter() {
        let model = Model::build(TOY, NET3).unwrap();
        let suite = ToySuite::new(&model).unwrap();
        let gen = suite.generator(&model);
        // Address 0 comes from the clearing literal, 1..=3 host nodes.
        assert_eq!(gen.candidates.len(), 4);
        for (a, cands) in &gen.candidates {
            assert_eq!(cands.len() as u64, model.dom.data_max);
            for c in cands {
                assert_eq!(*c.get(suite.vars.ip), Value::Addr(*a));
                assert!(matches!(c.get(suite.vars.no), Value::Nat(n) if *n >= 1));
            }
        }
    }

    #[test]
    fn window_predicates_follow_the_labels() {
        let model = Model::build(TOY, SINGLE).unwrap();
        let suite = ToySuite::new(&model).unwrap();
        let pred = suite.nhip_eq_ip_seq();
        let entry = model.entry_body();
        // At the entry the window is closed, so a skewed next hop passes.
        let skew = model
            .default_state(Addr(1))
            .with(suite.vars.nhip, Value::Addr(Addr(7)));
        assert!(pred.holds(&SeqState {
            xi: skew,
            ctl: entry
        }));
    }
}
