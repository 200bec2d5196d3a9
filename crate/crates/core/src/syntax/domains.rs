//! Finite value domains.
//!
//! Every check in this crate is relative to a scenario-configured finite
//! domain: naturals saturate at `nat_max`, packet payloads range over
//! `0..=data_max`, and addresses range over the configured universe extended
//! with any address literals written in the model. The message domain is the
//! product of payloads and addresses over both packet constructors.

use std::collections::BTreeSet;

use super::value::{Addr, Message, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainConfig {
    /// Saturation cap for natural arithmetic.
    pub nat_max: u64,
    /// Packet payloads range over `0..=data_max`.
    pub data_max: u64,
    /// Addresses that may host a node.
    pub universe: BTreeSet<Addr>,
    /// Address literals from the model text; part of the address domain but
    /// never host a node.
    pub extra_addrs: BTreeSet<Addr>,
}

impl DomainConfig {
    pub fn new(nat_max: u64, data_max: u64, universe: BTreeSet<Addr>) -> Self {
        DomainConfig {
            nat_max,
            data_max,
            universe,
            extra_addrs: BTreeSet::new(),
        }
    }

    /// Universe plus model literals, sorted.
    pub fn address_domain(&self) -> Vec<Addr> {
        let mut all: BTreeSet<Addr> = self.universe.clone();
        all.extend(self.extra_addrs.iter().copied());
        all.into_iter().collect()
    }

    /// Saturating addition.
    pub fn sat(&self, n: u64) -> u64 {
        n.min(self.nat_max)
    }

    pub fn nats(&self) -> impl Iterator<Item = u64> {
        0..=self.data_max
    }

    /// Every message over the configured domains, in canonical order.
    pub fn messages(&self) -> Vec<Message> {
        let addrs = self.address_domain();
        let mut out = Vec::new();
        for d in 0..=self.data_max {
            for a in &addrs {
                out.push(Message::Pkt { data: d, src: *a });
            }
        }
        for d in 0..=self.data_max {
            for a in &addrs {
                out.push(Message::NewPkt { data: d, dst: *a });
            }
        }
        out
    }

    /// Candidate values for a variable of the given type, used when
    /// enumerating data states (proof obligations, arbitrary initial values).
    pub fn values_of_type(&self, ty: super::state::VarType) -> Vec<Value> {
        match ty {
            super::state::VarType::Nat => (0..=self.nat_max).map(Value::Nat).collect(),
            super::state::VarType::Addr => {
                self.address_domain().into_iter().map(Value::Addr).collect()
            }
            super::state::VarType::Msg => {
                let mut out = vec![Value::None];
                out.extend(self.messages().into_iter().map(Value::Msg));
                out
            }
            super::state::VarType::Set => {
                // Sets are enumerated only as the empty and full set; models
                // that need richer set-valued state should bind them from
                // literals instead.
                vec![
                    Value::Set(BTreeSet::new()),
                    Value::Set(self.address_domain().into_iter().collect()),
                ]
            }
        }
    }
}
