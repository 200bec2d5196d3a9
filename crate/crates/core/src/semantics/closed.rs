//! Closed networks: the scenario's net with its environment sealed off.
//!
//! Casts become internal. Arrivals from outside are cut, with one
//! exception: a budgeted injection hands a fresh packet to a single node —
//! the composite performs a new-packet action exactly when the inner net
//! offers the arrival in which that node alone accepts the packet and every
//! other node is bypassed, and each budget entry pays for one such step.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Addr, Message};

use super::action::Action;
use super::automaton::{Automaton, StepResult};
use super::model::Model;
use super::net::{
    initial_net_states, net_saturated, pnet_step, render_net, NetState,
};

pub type Budget = BTreeMap<(Addr, u64, Addr), u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClosedState {
    pub net: NetState,
    pub budget: Budget,
}

/// All transitions of the closed network.
pub fn cnet_step(model: &Model, s: &ClosedState) -> StepResult<ClosedState> {
    let all: BTreeSet<Addr> = s.net.addrs().into_iter().collect();
    let mut out = Vec::new();
    for (a, net) in pnet_step(model, &s.net)? {
        match a {
            Action::StarCast(_, _) => {
                out.push((
                    Action::Tau,
                    ClosedState {
                        net,
                        budget: s.budget.clone(),
                    },
                ));
            }
            Action::Arrive(h, k, Message::NewPkt { data, dst }) => {
                if h.len() == 1 {
                    let i = *h.iter().next().expect("singleton");
                    let rest: BTreeSet<Addr> = all.iter().copied().filter(|a| *a != i).collect();
                    if k == rest && s.budget.get(&(i, data, dst)).copied().unwrap_or(0) > 0 {
                        let mut budget = s.budget.clone();
                        let slot = budget.get_mut(&(i, data, dst)).expect("checked");
                        *slot -= 1;
                        if *slot == 0 {
                            budget.remove(&(i, data, dst));
                        }
                        out.push((
                            Action::NewPkt { src: i, data, dst },
                            ClosedState { net, budget },
                        ));
                    }
                }
            }
            Action::Arrive(_, _, _) => {}
            Action::Tau
            | Action::NodeDeliver(_, _)
            | Action::Connect(_, _)
            | Action::Disconnect(_, _) => {
                out.push((
                    a,
                    ClosedState {
                        net,
                        budget: s.budget.clone(),
                    },
                ));
            }
            other => unreachable!("network level emitted {other}"),
        }
    }
    Ok(out)
}

/// The scenario's net, closed, with its injection budget.
pub struct ClosedAutomaton<'m> {
    pub model: &'m Model,
}

impl<'m> ClosedAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        ClosedAutomaton { model }
    }
}

impl Automaton for ClosedAutomaton<'_> {
    type State = ClosedState;

    fn init(&self) -> Vec<ClosedState> {
        let budget = self.model.budget();
        initial_net_states(self.model, &self.model.scenario.net)
            .into_iter()
            .map(|net| ClosedState {
                net,
                budget: budget.clone(),
            })
            .collect()
    }

    fn step(&self, s: &ClosedState) -> StepResult<ClosedState> {
        cnet_step(self.model, s)
    }

    fn render_state(&self, s: &ClosedState) -> String {
        let mut pending: Vec<String> = Vec::new();
        for ((i, d, t), n) in &s.budget {
            for _ in 0..*n {
                pending.push(format!("({i}, {d}, {t})"));
            }
        }
        format!(
            "{} ! [{}]",
            render_net(self.model, &s.net),
            pending.join(", ")
        )
    }

    fn is_saturated(&self, s: &ClosedState) -> bool {
        net_saturated(self.model, &s.net)
    }
}
