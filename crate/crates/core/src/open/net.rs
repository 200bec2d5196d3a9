//! Open partial networks: parallel composition over disjoint owned sets.
//!
//! Synchronising pairs (cast/arrive, arrive/arrive, connect/disconnect)
//! unite the owned updates of both sides; when one side moves alone the
//! other contributes identity entries, so every composite transition still
//! updates exactly the union of the owned sets.

use std::collections::BTreeSet;

use crate::semantics::{Action, Model, NetState, NetTree, StepError};
use crate::syntax::Addr;

use super::global::GlobalState;
use super::local::{initial_open_local, OpenLocal};
use super::node::{open_node_step, render_open_node, OpenNode};
use super::step::{
    identity_updates, initial_globals, union_updates, OpenAutomaton, OpenTransition,
};

/// The local component of an open network: node locals in tree shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpenNet {
    Leaf(OpenNode),
    Par(Box<OpenNet>, Box<OpenNet>),
}

impl OpenNet {
    pub fn par(l: OpenNet, r: OpenNet) -> OpenNet {
        OpenNet::Par(Box::new(l), Box::new(r))
    }

    pub fn addrs(&self) -> Vec<Addr> {
        match self {
            OpenNet::Leaf(n) => vec![n.addr],
            OpenNet::Par(l, r) => {
                let mut a = l.addrs();
                a.extend(r.addrs());
                a
            }
        }
    }

    pub fn owned(&self) -> BTreeSet<Addr> {
        self.addrs().into_iter().collect()
    }
}

/// The scenario's net tree with every node in its initial local shape.
pub fn initial_open_net(model: &Model, tree: &NetTree) -> OpenNet {
    match tree {
        NetTree::Leaf { addr, range } => OpenNet::Leaf(OpenNode {
            addr: *addr,
            local: initial_open_local(model),
            range: range.clone(),
        }),
        NetTree::Par(l, r) => OpenNet::par(
            initial_open_net(model, l),
            initial_open_net(model, r),
        ),
    }
}

/// Forget the valuations of a standard network state, keeping control,
/// queues and ranges. Together with the global view this splits a standard
/// state into its open (σ, local) form.
pub fn lift_net(ns: &NetState) -> OpenNet {
    match ns {
        NetState::Leaf(n) => OpenNet::Leaf(OpenNode {
            addr: n.addr,
            local: OpenLocal {
                ctl: n.local.seq.ctl,
                queue: n.local.queue.clone(),
            },
            range: n.range.clone(),
        }),
        NetState::Par(l, r) => OpenNet::par(lift_net(l), lift_net(r)),
    }
}

pub fn render_open_net(model: &Model, t: &OpenNet) -> String {
    match t {
        OpenNet::Leaf(n) => render_open_node(model, n),
        OpenNet::Par(l, r) => format!(
            "({}) || ({})",
            render_open_net(model, l),
            render_open_net(model, r)
        ),
    }
}

pub fn open_net_saturated(model: &Model, t: &OpenNet) -> bool {
    match t {
        OpenNet::Leaf(n) => n.local.queue_len() >= model.scenario.queue_bound,
        OpenNet::Par(l, r) => open_net_saturated(model, l) || open_net_saturated(model, r),
    }
}

/// All open transitions of a partial network.
pub fn open_pnet_step(
    model: &Model,
    sigma: &GlobalState,
    t: &OpenNet,
) -> Result<Vec<OpenTransition<OpenNet>>, StepError> {
    match t {
        OpenNet::Leaf(n) => Ok(open_node_step(model, sigma, n)?
            .into_iter()
            .map(|t| OpenTransition {
                action: t.action,
                owned: t.owned,
                local: OpenNet::Leaf(t.local),
            })
            .collect()),
        OpenNet::Par(l, r) => {
            let ls = open_pnet_step(model, sigma, l)?;
            let rs = open_pnet_step(model, sigma, r)?;
            let l_keep = identity_updates(sigma, &l.owned());
            let r_keep = identity_updates(sigma, &r.owned());
            let mut out = Vec::new();

            for lt in &ls {
                match &lt.action {
                    Action::StarCast(range, m) => {
                        for rt in &rs {
                            if let Action::Arrive(h, k, rm) = &rt.action {
                                if rm == m && h.is_subset(range) && k.is_disjoint(range) {
                                    out.push(OpenTransition {
                                        action: lt.action.clone(),
                                        owned: union_updates(&lt.owned, &rt.owned),
                                        local: OpenNet::par(
                                            lt.local.clone(),
                                            rt.local.clone(),
                                        ),
                                    });
                                }
                            }
                        }
                    }
                    Action::Arrive(lh, lk, m) => {
                        for rt in &rs {
                            match &rt.action {
                                Action::Arrive(rh, rk, rm) if rm == m => {
                                    let h: BTreeSet<Addr> = lh.union(rh).copied().collect();
                                    let k: BTreeSet<Addr> = lk.union(rk).copied().collect();
                                    out.push(OpenTransition {
                                        action: Action::arrive(h, k, *m),
                                        owned: union_updates(&lt.owned, &rt.owned),
                                        local: OpenNet::par(
                                            lt.local.clone(),
                                            rt.local.clone(),
                                        ),
                                    });
                                }
                                Action::StarCast(range, rm)
                                    if rm == m
                                        && lh.is_subset(range)
                                        && lk.is_disjoint(range) =>
                                {
                                    out.push(OpenTransition {
                                        action: rt.action.clone(),
                                        owned: union_updates(&lt.owned, &rt.owned),
                                        local: OpenNet::par(
                                            lt.local.clone(),
                                            rt.local.clone(),
                                        ),
                                    });
                                }
                                _ => {}
                            }
                        }
                    }
                    Action::Tau | Action::NodeDeliver(_, _) => {
                        out.push(OpenTransition {
                            action: lt.action.clone(),
                            owned: union_updates(&lt.owned, &r_keep),
                            local: OpenNet::par(lt.local.clone(), (**r).clone()),
                        });
                    }
                    Action::Connect(_, _) | Action::Disconnect(_, _) => {
                        for rt in &rs {
                            if rt.action == lt.action {
                                out.push(OpenTransition {
                                    action: lt.action.clone(),
                                    owned: union_updates(&lt.owned, &rt.owned),
                                    local: OpenNet::par(lt.local.clone(), rt.local.clone()),
                                });
                            }
                        }
                    }
                    other => unreachable!("open node level emitted {other}"),
                }
            }

            for rt in &rs {
                if matches!(rt.action, Action::Tau | Action::NodeDeliver(_, _)) {
                    out.push(OpenTransition {
                        action: rt.action.clone(),
                        owned: union_updates(&l_keep, &rt.owned),
                        local: OpenNet::par((**l).clone(), rt.local.clone()),
                    });
                }
            }

            Ok(out)
        }
    }
}

/// The scenario's whole net as one open automaton.
pub struct OpenPnetAutomaton<'m> {
    pub model: &'m Model,
}

impl<'m> OpenPnetAutomaton<'m> {
    pub fn new(model: &'m Model) -> Self {
        OpenPnetAutomaton { model }
    }
}

impl OpenAutomaton for OpenPnetAutomaton<'_> {
    type Local = OpenNet;

    fn owned(&self) -> BTreeSet<Addr> {
        self.model.scenario.net.mentioned()
    }

    fn init(&self) -> Vec<(GlobalState, OpenNet)> {
        let local = initial_open_net(self.model, &self.model.scenario.net);
        let owned = local.owned();
        initial_globals(self.model, &owned)
            .into_iter()
            .map(|s| (s, local.clone()))
            .collect()
    }

    fn step(
        &self,
        sigma: &GlobalState,
        local: &OpenNet,
    ) -> Result<Vec<OpenTransition<OpenNet>>, StepError> {
        open_pnet_step(self.model, sigma, local)
    }

    fn render_local(&self, local: &OpenNet) -> String {
        render_open_net(self.model, local)
    }

    fn render_global(&self, sigma: &GlobalState) -> String {
        sigma.render(self.model)
    }

    fn is_saturated(&self, local: &OpenNet) -> bool {
        open_net_saturated(self.model, local)
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

    fn model() -> Model {
        Model::build(
            ECHO,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\n",
        )
        .unwrap()
    }

    #[test]
    fn composite_transitions_update_the_whole_owned_set() {
        let m = model();
        let auto = OpenPnetAutomaton::new(&m);
        let (sigma, net) = auto.init().remove(0);
        assert_eq!(auto.owned(), BTreeSet::from([Addr(1), Addr(2)]));
        for t in auto.step(&sigma, &net).unwrap() {
            assert_eq!(
                t.owned.keys().copied().collect::<BTreeSet<_>>(),
                auto.owned()
            );
        }
    }

    #[test]
    fn a_cast_updates_caster_and_receiver_entries_together() {
        let m = model();
        let msg = m.vars().lookup("msg").unwrap();
        let auto = OpenPnetAutomaton::new(&m);
        let (sigma, net) = auto.init().remove(0);
        // drive node 1 to its broadcast: receive pkt(1,2) then pass the guard
        let wanted = Message::Pkt {
            data: 1,
            src: Addr(2),
        };
        let t1 = auto
            .step(&sigma, &net)
            .unwrap()
            .into_iter()
            .find(|t| {
                matches!(&t.action, Action::Arrive(h, _, m)
                    if h == &BTreeSet::from([Addr(1)]) && *m == wanted)
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
        // caster entry is identity; the receiver entry got the re-cast
        // payload pkt(num, sip) = pkt(1, 2)
        assert_eq!(casts[0].owned[&Addr(1)], *sigma.get(Addr(1)));
        assert_eq!(
            casts[0].owned[&Addr(2)],
            sigma.get(Addr(2)).with(msg, crate::syntax::Value::Msg(wanted))
        );
    }

    #[test]
    fn lifting_a_standard_state_keeps_control_and_drops_valuations() {
        let m = model();
        let standard = crate::semantics::initial_net_states(&m, &m.scenario.net).remove(0);
        let lifted = lift_net(&standard);
        assert_eq!(lifted, initial_open_net(&m, &m.scenario.net));
        assert_eq!(lifted.addrs(), standard.addrs());
    }

    #[test]
    fn interleaved_taus_keep_the_other_side_identical() {
        let m = model();
        let auto = OpenPnetAutomaton::new(&m);
        let (sigma, net) = auto.init().remove(0);
        let t1 = auto
            .step(&sigma, &net)
            .unwrap()
            .into_iter()
            .find(|t| {
                matches!(&t.action, Action::Arrive(h, _, Message::Pkt { data: 1, .. })
                    if h == &BTreeSet::from([Addr(2)]))
            })
            .unwrap();
        let sigma2 = sigma.updated(&t1.owned);
        let taus: Vec<_> = auto
            .step(&sigma2, &t1.local)
            .unwrap()
            .into_iter()
            .filter(|t| t.action == Action::Tau)
            .collect();
        // only node 2 has a guard to pass
        assert_eq!(taus.len(), 1);
        assert_eq!(taus[0].owned[&Addr(1)], *sigma2.get(Addr(1)));
        let OpenNet::Par(l, _) = &taus[0].local else {
            panic!("expected a parallel composition")
        };
        let OpenNet::Par(l0, _) = &net else {
            panic!("expected a parallel composition")
        };
        assert_eq!(l, l0);
    }
}
