//! Open node semantics: address/range wrapping of the open local composite.
//!
//! Action mapping matches the standard node layer. Transitions the node
//! merely witnesses — messages passing it by, connectivity changes — are
//! stutters: the local component may track the new range, but the owned
//! global entry is recorded unchanged.

use std::collections::BTreeSet;

use crate::semantics::{Action, Model, StepError, Topology};
use crate::syntax::Addr;

use super::global::GlobalState;
use super::local::{
    initial_open_local, open_local_step, render_open_local, OpenLocal, OpenLocalAutomaton,
};
use super::step::{identity_updates, initial_globals, OpenAutomaton, OpenTransition};

/// A node: its address, open local state and transmission range.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenNode {
    pub addr: Addr,
    pub local: OpenLocal,
    pub range: BTreeSet<Addr>,
}

pub fn render_open_node(model: &Model, n: &OpenNode) -> String {
    let range: Vec<String> = n.range.iter().map(|a| a.to_string()).collect();
    format!(
        "{} : [{}] : {{{}}}",
        n.addr,
        render_open_local(model, &n.local),
        range.join(", ")
    )
}

/// All open transitions of a single node.
pub fn open_node_step(
    model: &Model,
    sigma: &GlobalState,
    n: &OpenNode,
) -> Result<Vec<OpenTransition<OpenNode>>, StepError> {
    let i = n.addr;
    let mut out = Vec::new();

    for t in open_local_step(model, i, sigma, &n.local)? {
        let wrap = |local: OpenLocal| OpenNode {
            addr: i,
            local,
            range: n.range.clone(),
        };
        match t.action {
            Action::Broadcast(m) => {
                out.push(OpenTransition {
                    action: Action::StarCast(n.range.clone(), m),
                    owned: t.owned,
                    local: wrap(t.local),
                });
            }
            Action::Groupcast(dests, m) => {
                let r: BTreeSet<Addr> = n.range.intersection(&dests).copied().collect();
                out.push(OpenTransition {
                    action: Action::StarCast(r, m),
                    owned: t.owned,
                    local: wrap(t.local),
                });
            }
            Action::Unicast(d, m) => {
                if n.range.contains(&d) {
                    out.push(OpenTransition {
                        action: Action::StarCast(BTreeSet::from([d]), m),
                        owned: t.owned,
                        local: wrap(t.local),
                    });
                }
            }
            Action::NotUnicast(d) => {
                if !n.range.contains(&d) {
                    out.push(OpenTransition {
                        action: Action::Tau,
                        owned: t.owned,
                        local: wrap(t.local),
                    });
                }
            }
            Action::Receive(m) => {
                out.push(OpenTransition {
                    action: Action::arrive(BTreeSet::from([i]), BTreeSet::new(), m),
                    owned: t.owned,
                    local: wrap(t.local),
                });
            }
            Action::Deliver(d) => {
                out.push(OpenTransition {
                    action: Action::NodeDeliver(i, d),
                    owned: t.owned,
                    local: wrap(t.local),
                });
            }
            Action::Tau => {
                out.push(OpenTransition {
                    action: Action::Tau,
                    owned: t.owned,
                    local: wrap(t.local),
                });
            }
            Action::Send(_) => {}
            other => unreachable!("open local level emitted network action {other}"),
        }
    }

    // The message passes this node by: a stutter on the owned entry.
    let keep = identity_updates(sigma, &BTreeSet::from([i]));
    for m in model.dom.messages() {
        out.push(OpenTransition {
            action: Action::arrive(BTreeSet::new(), BTreeSet::from([i]), m),
            owned: keep.clone(),
            local: n.clone(),
        });
    }

    if model.scenario.topology == Topology::Dynamic {
        let universe: Vec<Addr> = model.scenario.universe.iter().copied().collect();
        for &j in &universe {
            for &jp in &universe {
                if j == jp {
                    continue;
                }
                let mut grown = n.range.clone();
                if i == j {
                    grown.insert(jp);
                } else if i == jp {
                    grown.insert(j);
                }
                out.push(OpenTransition {
                    action: Action::Connect(j, jp),
                    owned: keep.clone(),
                    local: OpenNode {
                        addr: i,
                        local: n.local.clone(),
                        range: grown,
                    },
                });

                let mut shrunk = n.range.clone();
                if i == j {
                    shrunk.remove(&jp);
                } else if i == jp {
                    shrunk.remove(&j);
                }
                out.push(OpenTransition {
                    action: Action::Disconnect(j, jp),
                    owned: keep.clone(),
                    local: OpenNode {
                        addr: i,
                        local: n.local.clone(),
                        range: shrunk,
                    },
                });
            }
        }
    }

    Ok(out)
}

/// One open node; defaults to the leftmost leaf of the scenario's net.
pub struct OpenNodeAutomaton<'m> {
    pub model: &'m Model,
    pub addr: Addr,
    pub range: BTreeSet<Addr>,
}

impl<'m> OpenNodeAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut tree = &model.scenario.net;
        loop {
            match tree {
                crate::semantics::NetTree::Leaf { addr, range } => {
                    return OpenNodeAutomaton {
                        model,
                        addr: *addr,
                        range: range.clone(),
                    };
                }
                crate::semantics::NetTree::Par(l, _) => tree = l,
            }
        }
    }
}

impl OpenAutomaton for OpenNodeAutomaton<'_> {
    type Local = OpenNode;

    fn owned(&self) -> BTreeSet<Addr> {
        BTreeSet::from([self.addr])
    }

    fn init(&self) -> Vec<(GlobalState, OpenNode)> {
        let node = OpenNode {
            addr: self.addr,
            local: initial_open_local(self.model),
            range: self.range.clone(),
        };
        initial_globals(self.model, &self.owned())
            .into_iter()
            .map(|s| (s, node.clone()))
            .collect()
    }

    fn step(
        &self,
        sigma: &GlobalState,
        local: &OpenNode,
    ) -> Result<Vec<OpenTransition<OpenNode>>, StepError> {
        open_node_step(self.model, sigma, local)
    }

    fn render_local(&self, local: &OpenNode) -> String {
        render_open_node(self.model, local)
    }

    fn render_global(&self, sigma: &GlobalState) -> String {
        sigma.render(self.model)
    }

    fn is_saturated(&self, local: &OpenNode) -> bool {
        OpenLocalAutomaton::new(self.model, self.addr).is_saturated(&local.local)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Message;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . < is_pkt > . broadcast(pkt(num, sip)) . call(P)
";

    fn model(scn: &str) -> Model {
        Model::build(ECHO, scn).unwrap()
    }

    #[test]
    fn bypassing_messages_stutter_on_the_owned_entry() {
        let m = model("net = 1 : {2}\ndata_max = 1\n");
        let auto = OpenNodeAutomaton::new(&m);
        let (sigma, node) = auto.init().remove(0);
        let bypass: Vec<_> = auto
            .step(&sigma, &node)
            .unwrap()
            .into_iter()
            .filter(|t| matches!(&t.action, Action::Arrive(h, _, _) if h.is_empty()))
            .collect();
        assert_eq!(bypass.len(), m.dom.messages().len());
        for t in &bypass {
            assert_eq!(t.owned, identity_updates(&sigma, &auto.owned()));
            assert_eq!(t.local, node);
        }
    }

    #[test]
    fn connectivity_changes_touch_the_range_but_not_the_owned_entry() {
        let m = model("net = 1 : {2}\ndata_max = 1\ntopology = dynamic\n");
        let auto = OpenNodeAutomaton::new(&m);
        let (sigma, node) = auto.init().remove(0);
        let t = auto
            .step(&sigma, &node)
            .unwrap()
            .into_iter()
            .find(|t| t.action == Action::Disconnect(Addr(1), Addr(2)))
            .unwrap();
        assert_eq!(t.owned, identity_updates(&sigma, &auto.owned()));
        assert!(t.local.range.is_empty());
    }

    #[test]
    fn broadcast_casts_to_the_range_with_the_protocol_update() {
        let m = model("net = 1 : {2}\ndata_max = 1\nprocess = seq\n");
        let auto = OpenNodeAutomaton::new(&m);
        let (sigma, node) = auto.init().remove(0);
        // receive a pkt (node-level arrive), then pass the guard
        let t1 = auto
            .step(&sigma, &node)
            .unwrap()
            .into_iter()
            .find(|t| {
                matches!(
                    &t.action,
                    Action::Arrive(h, _, Message::Pkt { data: 1, .. }) if !h.is_empty()
                )
            })
            .unwrap();
        let sigma = sigma.updated(&t1.owned);
        let t2 = auto
            .step(&sigma, &t1.local)
            .unwrap()
            .into_iter()
            .find(|t| t.action == Action::Tau)
            .unwrap();
        let sigma = sigma.updated(&t2.owned);
        let casts: Vec<_> = auto
            .step(&sigma, &t2.local)
            .unwrap()
            .into_iter()
            .filter(|t| matches!(t.action, Action::StarCast(_, _)))
            .collect();
        assert_eq!(casts.len(), 1);
        let Action::StarCast(r, Message::Pkt { data: 1, .. }) = &casts[0].action else {
            panic!("expected the received payload to be re-cast")
        };
        assert_eq!(r, &BTreeSet::from([Addr(2)]));
        assert_eq!(casts[0].owned, identity_updates(&sigma, &auto.owned()));
    }
}
