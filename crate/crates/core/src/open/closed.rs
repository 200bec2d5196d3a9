//! Open closed networks: casts turn silent, external arrivals are cut off,
//! and the remaining openness is the data environment plus the injection
//! budget.

use std::collections::BTreeSet;

use crate::semantics::{Action, Budget, Model, StepError};
use crate::syntax::{Addr, Message};

use super::global::GlobalState;
use super::net::{
    initial_open_net, open_net_saturated, open_pnet_step, render_open_net, OpenNet,
};
use super::step::{initial_globals, OpenAutomaton, OpenTransition};

/// Net locals plus the remaining injection budget.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenClosedLocal {
    pub net: OpenNet,
    pub budget: Budget,
}

pub fn render_open_closed(model: &Model, s: &OpenClosedLocal) -> String {
    let mut pending: Vec<String> = Vec::new();
    for ((src, data, dst), n) in &s.budget {
        for _ in 0..*n {
            pending.push(format!("newpkt({src}, {data}, {dst})"));
        }
    }
    format!(
        "{} ! [{}]",
        render_open_net(model, &s.net),
        pending.join(", ")
    )
}

/// All open transitions of the closed network.
pub fn open_cnet_step(
    model: &Model,
    sigma: &GlobalState,
    s: &OpenClosedLocal,
) -> Result<Vec<OpenTransition<OpenClosedLocal>>, StepError> {
    let all: BTreeSet<Addr> = s.net.addrs().into_iter().collect();
    let mut out = Vec::new();
    for t in open_pnet_step(model, sigma, &s.net)? {
        match t.action {
            Action::StarCast(_, _) => {
                out.push(OpenTransition {
                    action: Action::Tau,
                    owned: t.owned,
                    local: OpenClosedLocal {
                        net: t.local,
                        budget: s.budget.clone(),
                    },
                });
            }
            Action::Arrive(h, k, Message::NewPkt { data, dst }) => {
                if h.len() == 1 {
                    let i = *h.iter().next().expect("singleton");
                    let rest: BTreeSet<Addr> =
                        all.iter().copied().filter(|a| *a != i).collect();
                    if k == rest && s.budget.get(&(i, data, dst)).copied().unwrap_or(0) > 0 {
                        let mut budget = s.budget.clone();
                        let slot = budget.get_mut(&(i, data, dst)).expect("checked");
                        *slot -= 1;
                        if *slot == 0 {
                            budget.remove(&(i, data, dst));
                        }
                        out.push(OpenTransition {
                            action: Action::NewPkt { src: i, data, dst },
                            owned: t.owned,
                            local: OpenClosedLocal {
                                net: t.local,
                                budget,
                            },
                        });
                    }
                }
            }
            Action::Arrive(_, _, _) => {}
            Action::Tau
            | Action::NodeDeliver(_, _)
            | Action::Connect(_, _)
            | Action::Disconnect(_, _) => {
                out.push(OpenTransition {
                    action: t.action,
                    owned: t.owned,
                    local: OpenClosedLocal {
                        net: t.local,
                        budget: s.budget.clone(),
                    },
                });
            }
            other => unreachable!("open network level emitted {other}"),
        }
    }
    Ok(out)
}

/// The scenario's net, closed over an open data environment.
pub struct OpenClosedAutomaton<'m> {
    pub model: &'m Model,
}

impl<'m> OpenClosedAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        OpenClosedAutomaton { model }
    }
}

impl OpenAutomaton for OpenClosedAutomaton<'_> {
    type Local = OpenClosedLocal;

    fn owned(&self) -> BTreeSet<Addr> {
        self.model.scenario.net.mentioned()
    }

    fn init(&self) -> Vec<(GlobalState, OpenClosedLocal)> {
        let local = OpenClosedLocal {
            net: initial_open_net(self.model, &self.model.scenario.net),
            budget: self.model.budget(),
        };
        initial_globals(self.model, &self.owned())
            .into_iter()
            .map(|s| (s, local.clone()))
            .collect()
    }

    fn step(
        &self,
        sigma: &GlobalState,
        local: &OpenClosedLocal,
    ) -> Result<Vec<OpenTransition<OpenClosedLocal>>, StepError> {
        open_cnet_step(self.model, sigma, local)
    }

    fn render_local(&self, local: &OpenClosedLocal) -> String {
        render_open_closed(self.model, local)
    }

    fn render_global(&self, sigma: &GlobalState) -> String {
        sigma.render(self.model)
    }

    fn is_saturated(&self, local: &OpenClosedLocal) -> bool {
        open_net_saturated(self.model, &local.net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FORWARD: &str = "\
vars msg: msg, num: nat, sip: addr
process P:
    receive(msg) .
    ( < is_newpkt > . broadcast(pkt(num, sip)) . call(P)
    (+) < is_pkt > . call(P) )
";

    fn model() -> Model {
        Model::build(
            FORWARD,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\ninject = [(1, 0, 2)]\n",
        )
        .unwrap()
    }

    #[test]
    fn injections_survive_closing_with_their_receive_update() {
        let m = model();
        let msg = m.vars().lookup("msg").unwrap();
        let auto = OpenClosedAutomaton::new(&m);
        let (sigma, local) = auto.init().remove(0);
        let injections: Vec<_> = auto
            .step(&sigma, &local)
            .unwrap()
            .into_iter()
            .filter(|t| matches!(t.action, Action::NewPkt { .. }))
            .collect();
        assert_eq!(injections.len(), 1);
        let t = &injections[0];
        assert_eq!(
            t.action,
            Action::NewPkt {
                src: Addr(1),
                data: 0,
                dst: Addr(2)
            }
        );
        assert!(t.local.budget.is_empty());
        assert_eq!(
            t.owned[&Addr(1)].get(msg),
            &crate::syntax::Value::Msg(Message::NewPkt {
                data: 0,
                dst: Addr(2)
            })
        );
        // the bystander's entry is recorded unchanged
        assert_eq!(t.owned[&Addr(2)], *sigma.get(Addr(2)));
    }

    #[test]
    fn no_external_arrivals_survive_closing() {
        let m = model();
        let auto = OpenClosedAutomaton::new(&m);
        let (sigma, local) = auto.init().remove(0);
        let steps = auto.step(&sigma, &local).unwrap();
        assert!(!steps.iter().any(|t| matches!(t.action, Action::Arrive(_, _, _))));
        assert!(!steps.iter().any(|t| matches!(t.action, Action::StarCast(_, _))));
    }

    #[test]
    fn exhausted_budget_silences_injection() {
        let m = model();
        let auto = OpenClosedAutomaton::new(&m);
        let (sigma, local) = auto.init().remove(0);
        let spent = OpenClosedLocal {
            net: local.net.clone(),
            budget: Budget::new(),
        };
        let steps = auto.step(&sigma, &spent).unwrap();
        assert!(steps.is_empty());
    }
}
