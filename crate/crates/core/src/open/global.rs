//! Global states: one data valuation per address.
//!
//! The open model replaces each process's private valuation with a total
//! map over the scenario's address domain, so that assumptions about other
//! nodes can be stated pointwise. Addresses that host no node carry the
//! model's default (quiescent) state.

use std::collections::BTreeMap;

use crate::semantics::{net_nodes, Model, NetState};
use crate::syntax::{Addr, DataState};

/// A total map from the address domain to data states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalState(BTreeMap<Addr, DataState>);

impl GlobalState {
    /// Build from explicit entries, filling every other domain address with
    /// the model default.
    pub fn total(model: &Model, entries: BTreeMap<Addr, DataState>) -> GlobalState {
        let mut map = BTreeMap::new();
        for a in model.dom.address_domain() {
            let d = entries
                .get(&a)
                .cloned()
                .unwrap_or_else(|| model.default_state(a));
            map.insert(a, d);
        }
        GlobalState(map)
    }

    pub fn get(&self, a: Addr) -> &DataState {
        self.0
            .get(&a)
            .unwrap_or_else(|| panic!("address {a} outside the global state"))
    }

    pub fn with(&self, a: Addr, d: DataState) -> GlobalState {
        let mut next = self.clone();
        next.0.insert(a, d);
        next
    }

    /// Apply a batch of per-address updates.
    pub fn updated(&self, updates: &BTreeMap<Addr, DataState>) -> GlobalState {
        let mut next = self.clone();
        for (a, d) in updates {
            debug_assert!(next.0.contains_key(a), "update outside the domain");
            next.0.insert(*a, d.clone());
        }
        next
    }

    pub fn addrs(&self) -> impl Iterator<Item = Addr> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Addr, &DataState)> {
        self.0.iter().map(|(a, d)| (*a, d))
    }

    pub fn render(&self, model: &Model) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(a, d)| format!("{a} -> {}", d.render(model.vars())))
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

/// The global view of a standard network state: each leaf contributes its
/// protocol valuation (queue and control elided), everything else defaults.
pub fn global_view(model: &Model, ns: &NetState) -> GlobalState {
    let mut nodes = Vec::new();
    net_nodes(ns, &mut nodes);
    let entries: BTreeMap<Addr, DataState> = nodes
        .iter()
        .map(|n| (n.addr, n.local.seq.xi.clone()))
        .collect();
    GlobalState::total(model, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::initial_net_states;
    use crate::syntax::Value;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . < is_pkt > . broadcast(pkt(num, sip)) . call(P)
";

    #[test]
    fn leaves_contribute_their_valuations_and_the_rest_defaults() {
        let m = Model::build(
            ECHO,
            "net = (1 : {2}) || (2 : {1})\naddresses = 1, 2, 9\n",
        )
        .unwrap();
        let init = &initial_net_states(&m, &m.scenario.net)[0];
        let sigma = global_view(&m, init);
        let sip = m.vars().lookup("sip").unwrap();
        assert_eq!(sigma.get(Addr(1)).get(sip), &Value::Addr(Addr(1)));
        assert_eq!(sigma.get(Addr(2)).get(sip), &Value::Addr(Addr(2)));
        // Address 9 hosts no node: default state, self-addressed.
        assert_eq!(sigma.get(Addr(9)), &m.default_state(Addr(9)));
    }

    #[test]
    fn updates_replace_entries_pointwise() {
        let m = Model::build(ECHO, "net = 1 : {}\n").unwrap();
        let sigma = GlobalState::total(&m, BTreeMap::new());
        let num = m.vars().lookup("num").unwrap();
        let changed = m.default_state(Addr(1)).with(num, Value::Nat(2));
        let next = sigma.updated(&BTreeMap::from([(Addr(1), changed.clone())]));
        assert_eq!(next.get(Addr(1)), &changed);
        assert_ne!(next, sigma);
    }
}
