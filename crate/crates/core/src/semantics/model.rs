//! A checked model: labelled process text paired with a scenario.
//!
//! Building a [`Model`] performs every static stage — parse, label, type
//! check, control-well-formedness — and derives the finite domains from the
//! scenario plus the address literals of the text. Everything downstream
//! (step generators, explorers, proof-obligation generation) works from a
//! `Model` and can assume those checks passed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::control::{Control, ControlError};
use crate::syntax::{
    check_spec, label_spec, parse_spec, Addr, DataState, DomainConfig, Label, LabelError, Message,
    ParseError, ProcId, Specification, TermId, TypeError, Value, VarId, VarTable, VarType,
};

use super::scenario::{parse_scenario, Scenario, ScenarioError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model: {0}")]
    Parse(#[from] ParseError),
    #[error("model: {0}")]
    Label(#[from] LabelError),
    #[error("model: {0}")]
    Type(#[from] TypeError),
    #[error("model: {0}")]
    Control(#[from] ControlError),
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("scenario names entry process `{0}` but the model has none")]
    UnknownEntry(String),
    #[error("scenario marks `{0}` arbitrary but the model declares no such variable")]
    UnknownArbitraryVar(String),
}

#[derive(Debug, Clone)]
pub struct Model {
    pub spec: Specification,
    pub dom: DomainConfig,
    pub scenario: Scenario,
    pub entry: ProcId,
    arbitrary_ids: Vec<(VarId, VarType)>,
    labels_by_term: Vec<Vec<Label>>,
}

impl Model {
    /// Parse, label and check model text against a scenario.
    pub fn build(model_src: &str, scn_src: &str) -> Result<Model, ModelError> {
        let spec = label_spec(&parse_spec(model_src)?)?;
        let scenario = parse_scenario(scn_src)?;
        Model::from_parts(spec, scenario)
    }

    /// Assemble from an already-labelled specification.
    pub fn from_parts(spec: Specification, scenario: Scenario) -> Result<Model, ModelError> {
        check_spec(&spec)?;

        let entry = match &scenario.entry {
            Some(name) => spec
                .proc_id(name)
                .ok_or_else(|| ModelError::UnknownEntry(name.clone()))?,
            None => ProcId(0),
        };

        let mut arbitrary_ids = Vec::new();
        for name in &scenario.arbitrary_vars {
            let id = spec
                .vars
                .lookup(name)
                .ok_or_else(|| ModelError::UnknownArbitraryVar(name.clone()))?;
            arbitrary_ids.push((id, spec.vars.ty(id)));
        }

        let mut extra = spec.addr_literals();
        for (_, _, dst) in &scenario.inject {
            if !scenario.universe.contains(dst) {
                extra.insert(*dst);
            }
        }
        // Arbitrary initial values may name addresses outside the universe;
        // those join the address domain like literals do.
        for (_, ty) in &arbitrary_ids {
            for &k in &scenario.arbitrary {
                match ty {
                    VarType::Addr => {
                        extra.insert(Addr(k));
                    }
                    VarType::Msg if k > 0 => {
                        extra.insert(Addr(k - 1));
                    }
                    _ => {}
                }
            }
        }
        extra.retain(|a| !scenario.universe.contains(a));

        let dom = DomainConfig {
            nat_max: scenario.nat_max,
            data_max: scenario.data_max,
            universe: scenario.universe.clone(),
            extra_addrs: extra,
        };

        let labels_by_term = {
            let control = Control::new(&spec)?;
            (0..spec.arena.len())
                .map(|k| {
                    let mut ls: Vec<Label> =
                        control.labels_of(TermId(k as u32)).into_iter().collect();
                    ls.sort_unstable();
                    ls.dedup();
                    ls
                })
                .collect()
        };

        Ok(Model {
            spec,
            dom,
            scenario,
            entry,
            arbitrary_ids,
            labels_by_term,
        })
    }

    pub fn vars(&self) -> &VarTable {
        &self.spec.vars
    }

    /// The labels a control term can fire next (labels of its start terms).
    pub fn labels_at(&self, t: TermId) -> &[Label] {
        &self.labels_by_term[t.0 as usize]
    }

    pub fn render_labels(&self, t: TermId) -> String {
        let parts: Vec<String> = self
            .labels_at(t)
            .iter()
            .map(|l| self.spec.render_label(*l))
            .collect();
        parts.join("/")
    }

    /// The body of the entry process.
    pub fn entry_body(&self) -> TermId {
        self.spec.proc_body(self.entry)
    }

    /// The quiescent data state of a node at `a`: nats 0, addresses `a`
    /// itself, messages cleared, sets empty. Also the state assumed for
    /// addresses that host no node.
    pub fn default_state(&self, a: Addr) -> DataState {
        let values = self
            .vars()
            .iter()
            .map(|(_, _, ty)| match ty {
                VarType::Nat => Value::Nat(0),
                VarType::Addr => Value::Addr(a),
                VarType::Msg => Value::None,
                VarType::Set => Value::Set(Default::default()),
            })
            .collect();
        DataState::new(values)
    }

    /// One initial value per arbitrary variable and seed. Seed 0 is the
    /// cleared value of each type; seed k > 0 names the k-th non-trivial
    /// value (nat k, address k, a packet stamped k-1).
    fn arbitrary_value(&self, ty: VarType, k: u64) -> Value {
        match ty {
            VarType::Nat => Value::Nat(k.min(self.dom.nat_max)),
            VarType::Addr => Value::Addr(Addr(k)),
            VarType::Msg => {
                if k == 0 {
                    Value::None
                } else {
                    Value::Msg(Message::Pkt {
                        data: (k - 1).min(self.dom.data_max),
                        src: Addr(k - 1),
                    })
                }
            }
            VarType::Set => {
                if k == 0 {
                    Value::Set(Default::default())
                } else {
                    Value::Set(self.dom.address_domain().into_iter().collect())
                }
            }
        }
    }

    /// Initial data states of the node at `a`: the default state with each
    /// arbitrary variable ranging independently over its seeded values.
    pub fn init_states(&self, a: Addr) -> Vec<DataState> {
        let mut states = vec![self.default_state(a)];
        for (id, ty) in &self.arbitrary_ids {
            let mut candidates: Vec<Value> = self
                .scenario
                .arbitrary
                .iter()
                .map(|&k| self.arbitrary_value(*ty, k))
                .collect();
            candidates.dedup();
            let mut next = Vec::with_capacity(states.len() * candidates.len());
            for st in &states {
                for v in &candidates {
                    next.push(st.with(*id, v.clone()));
                }
            }
            states = next;
        }
        states.sort();
        states.dedup();
        states
    }

    /// The injection budget as a multiset.
    pub fn budget(&self) -> BTreeMap<(Addr, u64, Addr), u32> {
        let mut out = BTreeMap::new();
        for &(src, data, dst) in &self.scenario.inject {
            *out.entry((src, data, dst)).or_insert(0) += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PING: &str = "\
vars msg: msg, num: nat, sip: addr, best: nat
process P: receive(msg) . [[best := max(best, num)]] . call(P)
";

    fn build(scn: &str) -> Model {
        Model::build(PING, scn).unwrap()
    }

    #[test]
    fn build_runs_every_static_stage() {
        let m = build("net = 1 : {}\n");
        assert!(m.spec.labelled);
        assert_eq!(m.entry, ProcId(0));
        assert_eq!(m.dom.data_max, 2);
    }

    #[test]
    fn default_state_is_cleared_and_self_addressed() {
        let m = build("net = 1 : {}\n");
        let sip = m.vars().lookup("sip").unwrap();
        let best = m.vars().lookup("best").unwrap();
        let d = m.default_state(Addr(4));
        assert_eq!(d.get(sip), &Value::Addr(Addr(4)));
        assert_eq!(d.get(best), &Value::Nat(0));
    }

    #[test]
    fn no_arbitrary_vars_means_a_single_initial_state() {
        let m = build("net = 1 : {}\n");
        assert_eq!(m.init_states(Addr(1)).len(), 1);
    }

    #[test]
    fn singleton_arbitrary_domain_still_collapses_init() {
        let m = build("net = 1 : {}\narbitrary_vars = msg, num, sip\narbitrary = 0\n");
        let init = m.init_states(Addr(1));
        assert_eq!(init.len(), 1);
        let sip = m.vars().lookup("sip").unwrap();
        let msg = m.vars().lookup("msg").unwrap();
        assert_eq!(init[0].get(sip), &Value::Addr(Addr(0)));
        assert_eq!(init[0].get(msg), &Value::None);
    }

    #[test]
    fn two_seeds_range_each_arbitrary_variable_independently() {
        let m = build("net = 1 : {}\narbitrary_vars = num, sip\narbitrary = 0, 1\n");
        // num in {0, 1} x sip in {addr 0, addr 1}
        assert_eq!(m.init_states(Addr(1)).len(), 4);
    }

    #[test]
    fn arbitrary_addresses_join_the_address_domain() {
        let m = build("net = 1 : {}\narbitrary_vars = sip\narbitrary = 0\n");
        assert!(m.dom.address_domain().contains(&Addr(0)));
    }

    #[test]
    fn unknown_arbitrary_variable_is_rejected() {
        let e = Model::build(PING, "net = 1 : {}\narbitrary_vars = bogus\n").unwrap_err();
        assert_eq!(e, ModelError::UnknownArbitraryVar("bogus".into()));
    }

    #[test]
    fn injection_budget_counts_duplicates() {
        let m = build("net = (1 : {2}) || (2 : {1})\ninject = [(1, 2, 2), (1, 2, 2), (2, 0, 1)]\n");
        let b = m.budget();
        assert_eq!(b.get(&(Addr(1), 2, Addr(2))), Some(&2));
        assert_eq!(b.get(&(Addr(2), 0, Addr(1))), Some(&1));
    }

    #[test]
    fn out_of_net_injection_target_joins_the_domain() {
        let m = build("net = 1 : {}\ninject = [(1, 0, 9)]\n");
        assert!(m.dom.address_domain().contains(&Addr(9)));
    }
}
