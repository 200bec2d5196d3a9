//! Node semantics: one local process given an address and a transmission
//! range.
//!
//! Casts become starcasts bounded by the current range (a unicast to an
//! out-of-range destination silently fails, its failure branch running as
//! τ), receives become arrivals, delivers are stamped with the address. A
//! node also always offers, for every domain message, the arrival that
//! passes it by — composition picks the variant consistent with the
//! caster's range — and, under a dynamic topology, a connect/disconnect
//! action for every ordered address pair, adjusting its own range when it
//! is an endpoint.

use std::collections::BTreeSet;

use crate::syntax::Addr;

use super::action::Action;
use super::automaton::{Automaton, StepResult};
use super::local::{local_step, LocalAutomaton, LocalState};
use super::model::Model;
use super::scenario::{NetTree, Topology};

/// A node: address, running local process, and current transmission range.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeState {
    pub addr: Addr,
    pub local: LocalState,
    pub range: BTreeSet<Addr>,
}

/// All transitions of a single node.
pub fn node_step(model: &Model, s: &NodeState) -> StepResult<NodeState> {
    let i = s.addr;
    let mut out = Vec::new();

    for (a, local) in local_step(model, &s.local)? {
        let wrap = |local: LocalState| NodeState {
            addr: i,
            local,
            range: s.range.clone(),
        };
        match a {
            Action::Broadcast(m) => {
                out.push((Action::StarCast(s.range.clone(), m), wrap(local)));
            }
            Action::Groupcast(dests, m) => {
                let r: BTreeSet<Addr> = s.range.intersection(&dests).copied().collect();
                out.push((Action::StarCast(r, m), wrap(local)));
            }
            Action::Unicast(d, m) => {
                if s.range.contains(&d) {
                    out.push((Action::StarCast(BTreeSet::from([d]), m), wrap(local)));
                }
            }
            Action::NotUnicast(d) => {
                if !s.range.contains(&d) {
                    out.push((Action::Tau, wrap(local)));
                }
            }
            Action::Receive(m) => {
                out.push((
                    Action::arrive(BTreeSet::from([i]), BTreeSet::new(), m),
                    wrap(local),
                ));
            }
            Action::Deliver(d) => {
                out.push((Action::NodeDeliver(i, d), wrap(local)));
            }
            Action::Tau => {
                out.push((Action::Tau, wrap(local)));
            }
            // A bare send has no meaning outside a local composition; the
            // node offers nothing for it.
            Action::Send(_) => {}
            other => unreachable!("local level emitted network action {other}"),
        }
    }

    // The message passes this node by. Always offered; composition with a
    // caster selects it exactly for out-of-range nodes.
    for m in model.dom.messages() {
        out.push((
            Action::arrive(BTreeSet::new(), BTreeSet::from([i]), m),
            s.clone(),
        ));
    }

    if model.scenario.topology == Topology::Dynamic {
        let universe: Vec<Addr> = model.scenario.universe.iter().copied().collect();
        for &j in &universe {
            for &jp in &universe {
                if j == jp {
                    continue;
                }
                let mut grown = s.range.clone();
                if i == j {
                    grown.insert(jp);
                } else if i == jp {
                    grown.insert(j);
                }
                out.push((
                    Action::Connect(j, jp),
                    NodeState {
                        addr: i,
                        local: s.local.clone(),
                        range: grown,
                    },
                ));

                let mut shrunk = s.range.clone();
                if i == j {
                    shrunk.remove(&jp);
                } else if i == jp {
                    shrunk.remove(&j);
                }
                out.push((
                    Action::Disconnect(j, jp),
                    NodeState {
                        addr: i,
                        local: s.local.clone(),
                        range: shrunk,
                    },
                ));
            }
        }
    }

    Ok(out)
}

pub fn initial_node_states(model: &Model, addr: Addr, range: &BTreeSet<Addr>) -> Vec<NodeState> {
    LocalAutomaton::initial_local_states(model, addr)
        .into_iter()
        .map(|local| NodeState {
            addr,
            local,
            range: range.clone(),
        })
        .collect()
}

pub fn render_node(model: &Model, s: &NodeState) -> String {
    let rs: Vec<String> = s.range.iter().map(|a| a.to_string()).collect();
    format!(
        "{} : [{}] : {{{}}}",
        s.addr,
        LocalAutomaton::render_local(model, &s.local),
        rs.join(", ")
    )
}

/// The leftmost node of the scenario's net, checked in isolation.
pub struct NodeAutomaton<'m> {
    pub model: &'m Model,
    addr: Addr,
    range: BTreeSet<Addr>,
}

impl<'m> NodeAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut tree = &model.scenario.net;
        let (addr, range) = loop {
            match tree {
                NetTree::Leaf { addr, range } => break (*addr, range.clone()),
                NetTree::Par(l, _) => tree = l,
            }
        };
        NodeAutomaton { model, addr, range }
    }
}

impl Automaton for NodeAutomaton<'_> {
    type State = NodeState;

    fn init(&self) -> Vec<NodeState> {
        initial_node_states(self.model, self.addr, &self.range)
    }

    fn step(&self, s: &NodeState) -> StepResult<NodeState> {
        node_step(self.model, s)
    }

    fn render_state(&self, s: &NodeState) -> String {
        render_node(self.model, s)
    }

    fn is_saturated(&self, s: &NodeState) -> bool {
        s.local.queue_len() >= self.model.scenario.queue_bound
    }
}
