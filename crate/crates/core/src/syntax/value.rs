//! Runtime values: addresses, messages, naturals and address sets.

use std::collections::BTreeSet;
use std::fmt;

/// A node address. Addresses are drawn from a finite domain fixed by the
/// scenario (the configured universe plus any address literals appearing in
/// the model text).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Addr(pub u64);

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Messages exchanged by protocol instances: data packets stamped with the
/// address of their sender, and fresh packets handed in by a client.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Message {
    Pkt { data: u64, src: Addr },
    NewPkt { data: u64, dst: Addr },
}

impl Message {
    pub fn data(&self) -> u64 {
        match *self {
            Message::Pkt { data, .. } | Message::NewPkt { data, .. } => data,
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Pkt { data, src } => write!(f, "pkt({data}, {src})"),
            Message::NewPkt { data, dst } => write!(f, "newpkt({data}, {dst})"),
        }
    }
}

/// A runtime value. `None` is the cleared state of a message-typed variable;
/// reading a field of it is an evaluation error, not a silent default.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Nat(u64),
    Addr(Addr),
    Msg(Message),
    Set(BTreeSet<Addr>),
    None,
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Nat(_) => "nat",
            Value::Addr(_) => "addr",
            Value::Msg(_) => "msg",
            Value::Set(_) => "set",
            Value::None => "none",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Addr(a) => write!(f, "addr({a})"),
            Value::Msg(m) => write!(f, "{m}"),
            Value::Set(s) => {
                write!(f, "{{")?;
                for (k, a) in s.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
            Value::None => write!(f, "none"),
        }
    }
}
