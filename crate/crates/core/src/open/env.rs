//! Environment assumptions for the open model.
//!
//! Open exploration quantifies over what the rest of the network may do.
//! That quantification is split into a synchronising regime S — applied
//! when the local automaton itself moves — and an interleaving regime U —
//! applied when only the environment moves:
//!
//! ```text
//! otherwith(E, N, I)(σ, σ′, a) ⟺ (∀j ∉ N. E(σ j, σ′ j)) ∧ I(σ, a)
//! other(F, N)(σ, σ′)          ⟺ (∀i ∈ N. σ′ i = σ i) ∧ (∀j ∉ N. F(σ j, σ′ j))
//! ```
//!
//! Candidate environment states come from a scenario-supplied finite
//! generator; a verdict is always relative to the declared generator and
//! the E/F/I filters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::open::global::GlobalState;
use crate::semantics::Action;
use crate::syntax::{Addr, DataState, Message, Value, VarId};

/// A binary relation between a data state and its replacement at one
/// address.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateRel {
    /// Anything goes.
    True,
    /// The entry must not change.
    Eq,
    /// A designated nat variable must not decrease; the rest is free.
    NatNonDecreasing(VarId),
}

impl StateRel {
    pub fn holds(&self, from: &DataState, to: &DataState) -> bool {
        match self {
            StateRel::True => true,
            StateRel::Eq => from == to,
            StateRel::NatNonDecreasing(v) => match (from.get(*v), to.get(*v)) {
                (Value::Nat(a), Value::Nat(b)) => a <= b,
                _ => false,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateRel::True => "true",
            StateRel::Eq => "eq",
            StateRel::NatNonDecreasing(_) => "nat-nondecreasing",
        }
    }

    pub fn reflexive_on(&self, states: &[DataState]) -> bool {
        states.iter().all(|d| self.holds(d, d))
    }
}

/// A predicate on messages in the context of a global state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MsgPred {
    True,
    /// A packet's payload is bounded by the designated nat variable of its
    /// sender's entry; fresh packets are unconstrained.
    DataAtMostSenderNat(VarId),
}

impl MsgPred {
    pub fn holds(&self, sigma: &GlobalState, m: &Message) -> bool {
        match self {
            MsgPred::True => true,
            MsgPred::DataAtMostSenderNat(v) => match m {
                Message::Pkt { data, src } => match sigma.get(*src).get(*v) {
                    Value::Nat(n) => data <= n,
                    _ => false,
                },
                Message::NewPkt { .. } => true,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MsgPred::True => "true",
            MsgPred::DataAtMostSenderNat(_) => "data-at-most-sender-nat",
        }
    }
}

/// The I component of a synchronising assumption: which (state, action)
/// pairs the environment is trusted to produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionPred {
    True,
    /// Constrains received messages.
    RecvMsg(MsgPred),
    /// Constrains messages genuinely arriving somewhere.
    ArriveMsg(MsgPred),
}

impl ActionPred {
    pub fn holds(&self, sigma: &GlobalState, a: &Action) -> bool {
        match self {
            ActionPred::True => true,
            ActionPred::RecvMsg(p) => match a {
                Action::Receive(m) => p.holds(sigma, m),
                _ => true,
            },
            ActionPred::ArriveMsg(p) => match a {
                Action::Arrive(h, _, m) if !h.is_empty() => p.holds(sigma, m),
                _ => true,
            },
        }
    }

    pub fn render(&self) -> String {
        match self {
            ActionPred::True => "true".into(),
            ActionPred::RecvMsg(p) => format!("recvmsg({})", p.name()),
            ActionPred::ArriveMsg(p) => format!("arrivemsg({})", p.name()),
        }
    }
}

/// otherwith(E, N, I): the synchronising regime S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncAssumption {
    pub rel: StateRel,
    pub owned: BTreeSet<Addr>,
    pub act: ActionPred,
}

impl SyncAssumption {
    pub fn holds(&self, sigma: &GlobalState, next: &GlobalState, a: &Action) -> bool {
        self.act.holds(sigma, a)
            && sigma
                .addrs()
                .filter(|j| !self.owned.contains(j))
                .all(|j| self.rel.holds(sigma.get(j), next.get(j)))
    }
}

/// other(F, N): the interleaving regime U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaveAssumption {
    pub rel: StateRel,
    pub owned: BTreeSet<Addr>,
}

impl InterleaveAssumption {
    pub fn holds(&self, sigma: &GlobalState, next: &GlobalState) -> bool {
        sigma.addrs().all(|j| {
            if self.owned.contains(&j) {
                sigma.get(j) == next.get(j)
            } else {
                self.rel.holds(sigma.get(j), next.get(j))
            }
        })
    }
}

/// The S/U pair an open verdict is relative to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvAssumption {
    pub sync: SyncAssumption,
    pub inter: InterleaveAssumption,
}

impl EnvAssumption {
    /// The assumption under which existing standard invariants transfer:
    /// the environment never changes at all.
    pub fn frozen(owned: BTreeSet<Addr>) -> EnvAssumption {
        EnvAssumption {
            sync: SyncAssumption {
                rel: StateRel::Eq,
                owned: owned.clone(),
                act: ActionPred::True,
            },
            inter: InterleaveAssumption {
                rel: StateRel::Eq,
                owned,
            },
        }
    }

    pub fn render(&self) -> String {
        format!(
            "S = otherwith({}, N, {}); U = other({}, N)",
            self.sync.rel.name(),
            self.sync.act.render(),
            self.inter.rel.name()
        )
    }
}

/// Finite candidate environment states, per address.
#[derive(Debug, Clone, Default)]
pub struct EnvGenerator {
    pub candidates: BTreeMap<Addr, Vec<DataState>>,
}

impl EnvGenerator {
    pub fn empty() -> EnvGenerator {
        EnvGenerator::default()
    }

    /// All joint updates of the unowned addresses that the relation admits
    /// against `sigma`. Leaving an entry unchanged is always one of the
    /// options; the identity-everywhere combination is included.
    pub fn updates(
        &self,
        sigma: &GlobalState,
        owned: &BTreeSet<Addr>,
        rel: &StateRel,
    ) -> Vec<BTreeMap<Addr, DataState>> {
        let mut combos: Vec<BTreeMap<Addr, DataState>> = vec![BTreeMap::new()];
        for j in sigma.addrs().filter(|j| !owned.contains(j)) {
            let current = sigma.get(j);
            let mut options: Vec<DataState> = vec![current.clone()];
            if let Some(cands) = self.candidates.get(&j) {
                for c in cands {
                    if c != current && rel.holds(current, c) {
                        options.push(c.clone());
                    }
                }
            }
            let mut next = Vec::with_capacity(combos.len() * options.len());
            for combo in &combos {
                for o in &options {
                    let mut c = combo.clone();
                    c.insert(j, o.clone());
                    next.push(c);
                }
            }
            combos = next;
        }
        combos
    }

    pub fn render(&self) -> String {
        if self.candidates.is_empty() {
            return "empty".into();
        }
        let parts: Vec<String> = self
            .candidates
            .iter()
            .map(|(a, cs)| format!("{a}: {} candidates", cs.len()))
            .collect();
        parts.join(", ")
    }
}

/// An open exploration step: either the automaton moved (with an action)
/// or only the environment did.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OAction {
    Act(Action),
    Env,
}

impl fmt::Display for OAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OAction::Act(a) => write!(f, "{a}"),
            OAction::Env => write!(f, "env"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Model;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . < is_pkt > . broadcast(pkt(num, sip)) . call(P)
";

    fn model() -> Model {
        Model::build(ECHO, "net = 1 : {2}\n").unwrap()
    }

    #[test]
    fn frozen_assumption_rejects_any_environment_change() {
        let m = model();
        let env = EnvAssumption::frozen(BTreeSet::from([Addr(1)]));
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let num = m.vars().lookup("num").unwrap();
        let moved = sigma.with(Addr(2), m.default_state(Addr(2)).with(num, Value::Nat(1)));
        assert!(env.sync.holds(&sigma, &sigma, &Action::Tau));
        assert!(!env.sync.holds(&sigma, &moved, &Action::Tau));
        assert!(!env.inter.holds(&sigma, &moved));
    }

    #[test]
    fn interleaving_freezes_owned_entries_regardless_of_relation() {
        let m = model();
        let u = InterleaveAssumption {
            rel: StateRel::True,
            owned: BTreeSet::from([Addr(1)]),
        };
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let num = m.vars().lookup("num").unwrap();
        let own_moved = sigma.with(Addr(1), m.default_state(Addr(1)).with(num, Value::Nat(1)));
        let env_moved = sigma.with(Addr(2), m.default_state(Addr(2)).with(num, Value::Nat(1)));
        assert!(!u.holds(&sigma, &own_moved));
        assert!(u.holds(&sigma, &env_moved));
    }

    #[test]
    fn nat_nondecreasing_orders_replacements() {
        let m = model();
        let num = m.vars().lookup("num").unwrap();
        let rel = StateRel::NatNonDecreasing(num);
        let low = m.default_state(Addr(2));
        let high = low.with(num, Value::Nat(3));
        assert!(rel.holds(&low, &high));
        assert!(!rel.holds(&high, &low));
        assert!(rel.reflexive_on(&[low, high]));
    }

    #[test]
    fn generator_updates_always_include_the_identity() {
        let m = model();
        let gen = EnvGenerator::empty();
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let ups = gen.updates(&sigma, &BTreeSet::from([Addr(1)]), &StateRel::Eq);
        // one combination: every unowned entry stays
        assert_eq!(ups.len(), 1);
        assert_eq!(sigma.updated(&ups[0]), sigma);
    }

    #[test]
    fn generator_candidates_are_filtered_by_the_relation() {
        let m = model();
        let num = m.vars().lookup("num").unwrap();
        let base = m.default_state(Addr(2));
        let mut gen = EnvGenerator::empty();
        gen.candidates.insert(
            Addr(2),
            vec![base.with(num, Value::Nat(1)), base.with(num, Value::Nat(2))],
        );
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let owned = BTreeSet::from([Addr(1)]);
        assert_eq!(
            gen.updates(&sigma, &owned, &StateRel::NatNonDecreasing(num)).len(),
            3
        );
        assert_eq!(gen.updates(&sigma, &owned, &StateRel::Eq).len(), 1);
        // From a raised entry, the lower candidate is no longer admitted.
        let raised = sigma.with(Addr(2), base.with(num, Value::Nat(2)));
        assert_eq!(
            gen.updates(&raised, &owned, &StateRel::NatNonDecreasing(num)).len(),
            1
        );
    }

    #[test]
    fn arrive_predicate_ignores_bypassing_messages() {
        let m = model();
        let num = m.vars().lookup("num").unwrap();
        let p = ActionPred::ArriveMsg(MsgPred::DataAtMostSenderNat(num));
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let big = Message::Pkt {
            data: 2,
            src: Addr(2),
        };
        let arriving = Action::Arrive(
            BTreeSet::from([Addr(1)]),
            BTreeSet::new(),
            big,
        );
        let bypassing = Action::Arrive(
            BTreeSet::new(),
            BTreeSet::from([Addr(1)]),
            big,
        );
        // default num at address 2 is 0 < 2: a genuinely arriving packet is
        // rejected, a bypassing one is not constrained
        assert!(!p.holds(&sigma, &arriving));
        assert!(p.holds(&sigma, &bypassing));
    }
}
