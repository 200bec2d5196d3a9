//! The layered action alphabet.
//!
//! Process-level actions (broadcast through τ) are produced by sequential
//! and local-parallel steps; node wrapping turns them into network-level
//! actions (starcast/arrive/deliver plus topology changes); closing a
//! network turns starcasts into τ and arrivals into budgeted injections.
//!
//! The variant order below is the canonical total order used everywhere a
//! tie must be broken deterministically (successor sorting, counterexample
//! selection), so it is semantically meaningful and must not be reshuffled.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Addr, Message};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Tau,
    Receive(Message),
    Send(Message),
    Deliver(u64),
    Broadcast(Message),
    Groupcast(BTreeSet<Addr>, Message),
    Unicast(Addr, Message),
    NotUnicast(Addr),
    StarCast(BTreeSet<Addr>, Message),
    Arrive(BTreeSet<Addr>, BTreeSet<Addr>, Message),
    NodeDeliver(Addr, u64),
    Connect(Addr, Addr),
    Disconnect(Addr, Addr),
    NewPkt { src: Addr, data: u64, dst: Addr },
}

impl Action {
    /// Arrive with the H/K disjointness invariant enforced.
    pub fn arrive(h: BTreeSet<Addr>, k: BTreeSet<Addr>, m: Message) -> Action {
        debug_assert!(h.is_disjoint(&k), "arrive sets must be disjoint");
        Action::Arrive(h, k, m)
    }

    /// True for the actions a node's environment cannot observe.
    pub fn is_internal(&self) -> bool {
        matches!(self, Action::Tau)
    }
}

fn render_set(s: &BTreeSet<Addr>) -> String {
    let parts: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => write!(f, "tau"),
            Action::Receive(m) => write!(f, "receive({m})"),
            Action::Send(m) => write!(f, "send({m})"),
            Action::Deliver(d) => write!(f, "deliver({d})"),
            Action::Broadcast(m) => write!(f, "broadcast({m})"),
            Action::Groupcast(d, m) => write!(f, "groupcast({}, {m})", render_set(d)),
            Action::Unicast(a, m) => write!(f, "unicast({a}, {m})"),
            Action::NotUnicast(a) => write!(f, "notunicast({a})"),
            Action::StarCast(r, m) => write!(f, "starcast({}, {m})", render_set(r)),
            Action::Arrive(h, k, m) => {
                write!(f, "arrive({}, {}, {m})", render_set(h), render_set(k))
            }
            Action::NodeDeliver(i, d) => write!(f, "deliver({i}, {d})"),
            Action::Connect(i, j) => write!(f, "connect({i}, {j})"),
            Action::Disconnect(i, j) => write!(f, "disconnect({i}, {j})"),
            Action::NewPkt { src, data, dst } => write!(f, "newpkt({src}, {data}, {dst})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_sorts_before_every_other_action() {
        let m = Message::Pkt {
            data: 0,
            src: Addr(1),
        };
        let others = [
            Action::Receive(m.clone()),
            Action::Send(m.clone()),
            Action::Deliver(0),
            Action::Broadcast(m.clone()),
            Action::StarCast(BTreeSet::new(), m.clone()),
            Action::Connect(Addr(1), Addr(2)),
        ];
        for a in others {
            assert!(Action::Tau < a);
        }
    }

    #[test]
    fn arrive_renders_both_address_sets() {
        let a = Action::arrive(
            BTreeSet::from([Addr(1)]),
            BTreeSet::from([Addr(2), Addr(3)]),
            Message::NewPkt {
                data: 2,
                dst: Addr(1),
            },
        );
        assert_eq!(a.to_string(), "arrive({1}, {2, 3}, newpkt(2, 1))");
    }
}
