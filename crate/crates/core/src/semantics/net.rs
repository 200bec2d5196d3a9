//! Partial networks: parallel composition of node expressions.
//!
//! A cast on one side pairs with an arrival on the other side carrying the
//! same message, provided every arriving address is in the caster's range
//! and no bypassed address is — which forces the arrival partition to be
//! exactly (range ∩ other side, rest). Two arrivals of the same message
//! merge by uniting their partitions, so a composed network offers one
//! arrival per way its nodes can jointly accept or ignore a message. τ and
//! delivers interleave; topology actions synchronize across all nodes.

use std::collections::BTreeSet;

use crate::syntax::Addr;

use super::action::Action;
use super::automaton::{Automaton, StepResult};
use super::model::Model;
use super::node::{initial_node_states, node_step, render_node, NodeState};
use super::scenario::NetTree;

/// A network state mirroring the scenario's tree shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetState {
    Leaf(NodeState),
    Par(Box<NetState>, Box<NetState>),
}

impl NetState {
    pub fn par(l: NetState, r: NetState) -> NetState {
        NetState::Par(Box::new(l), Box::new(r))
    }

    /// Node addresses, left to right.
    pub fn addrs(&self) -> Vec<Addr> {
        let mut nodes = Vec::new();
        net_nodes(self, &mut nodes);
        nodes.iter().map(|n| n.addr).collect()
    }
}

/// All transitions of a partial network.
pub fn pnet_step(model: &Model, s: &NetState) -> StepResult<NetState> {
    match s {
        NetState::Leaf(n) => Ok(node_step(model, n)?
            .into_iter()
            .map(|(a, n)| (a, NetState::Leaf(n)))
            .collect()),
        NetState::Par(l, r) => {
            let ls = pnet_step(model, l)?;
            let rs = pnet_step(model, r)?;
            let mut out = Vec::new();

            for (la, ln) in &ls {
                match la {
                    Action::StarCast(range, m) => {
                        for (ra, rn) in &rs {
                            if let Action::Arrive(h, k, rm) = ra {
                                if rm == m && h.is_subset(range) && k.is_disjoint(range) {
                                    out.push((
                                        la.clone(),
                                        NetState::par(ln.clone(), rn.clone()),
                                    ));
                                }
                            }
                        }
                    }
                    Action::Arrive(lh, lk, m) => {
                        for (ra, rn) in &rs {
                            match ra {
                                Action::Arrive(rh, rk, rm) if rm == m => {
                                    let h: BTreeSet<Addr> =
                                        lh.union(rh).copied().collect();
                                    let k: BTreeSet<Addr> =
                                        lk.union(rk).copied().collect();
                                    out.push((
                                        Action::arrive(h, k, *m),
                                        NetState::par(ln.clone(), rn.clone()),
                                    ));
                                }
                                Action::StarCast(range, rm)
                                    if rm == m
                                        && lh.is_subset(range)
                                        && lk.is_disjoint(range) =>
                                {
                                    out.push((
                                        ra.clone(),
                                        NetState::par(ln.clone(), rn.clone()),
                                    ));
                                }
                                _ => {}
                            }
                        }
                    }
                    Action::Tau | Action::NodeDeliver(_, _) => {
                        out.push((la.clone(), NetState::par(ln.clone(), (**r).clone())));
                    }
                    Action::Connect(_, _) | Action::Disconnect(_, _) => {
                        for (ra, rn) in &rs {
                            if ra == la {
                                out.push((
                                    la.clone(),
                                    NetState::par(ln.clone(), rn.clone()),
                                ));
                            }
                        }
                    }
                    other => unreachable!("node level emitted {other}"),
                }
            }

            for (ra, rn) in &rs {
                if matches!(ra, Action::Tau | Action::NodeDeliver(_, _)) {
                    out.push((ra.clone(), NetState::par((**l).clone(), rn.clone())));
                }
            }

            Ok(out)
        }
    }
}

/// Initial network states: the tree instantiated with every combination of
/// initial node states.
pub fn initial_net_states(model: &Model, tree: &NetTree) -> Vec<NetState> {
    match tree {
        NetTree::Leaf { addr, range } => initial_node_states(model, *addr, range)
            .into_iter()
            .map(NetState::Leaf)
            .collect(),
        NetTree::Par(l, r) => {
            let ls = initial_net_states(model, l);
            let rs = initial_net_states(model, r);
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for ln in &ls {
                for rn in &rs {
                    out.push(NetState::par(ln.clone(), rn.clone()));
                }
            }
            out
        }
    }
}

pub fn render_net(model: &Model, s: &NetState) -> String {
    match s {
        NetState::Leaf(n) => render_node(model, n),
        NetState::Par(l, r) => format!(
            "({} || {})",
            render_net(model, l),
            render_net(model, r)
        ),
    }
}

/// The scenario's network, left open: casts and arrivals remain visible.
pub struct PnetAutomaton<'m> {
    pub model: &'m Model,
}

impl<'m> PnetAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        PnetAutomaton { model }
    }
}

impl Automaton for PnetAutomaton<'_> {
    type State = NetState;

    fn init(&self) -> Vec<NetState> {
        initial_net_states(self.model, &self.model.scenario.net)
    }

    fn step(&self, s: &NetState) -> StepResult<NetState> {
        pnet_step(self.model, s)
    }

    fn render_state(&self, s: &NetState) -> String {
        render_net(self.model, s)
    }

    fn is_saturated(&self, s: &NetState) -> bool {
        net_saturated(self.model, s)
    }
}

pub fn net_saturated(model: &Model, s: &NetState) -> bool {
    match s {
        NetState::Leaf(n) => n.local.queue_len() >= model.scenario.queue_bound,
        NetState::Par(l, r) => net_saturated(model, l) || net_saturated(model, r),
    }
}

pub fn net_nodes<'a>(s: &'a NetState, out: &mut Vec<&'a NodeState>) {
    match s {
        NetState::Leaf(n) => out.push(n),
        NetState::Par(l, r) => {
            net_nodes(l, out);
            net_nodes(r, out);
        }
    }
}
