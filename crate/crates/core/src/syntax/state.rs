//! Variable tables and data states.
//!
//! A specification declares a fixed set of typed variables; a data state
//! assigns a value to each of them. States are stored as flat vectors
//! parallel to the declaration order, which keeps cloning and comparison
//! cheap during exploration.

use std::fmt;

use super::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarType {
    Nat,
    Addr,
    Msg,
    Set,
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VarType::Nat => "nat",
            VarType::Addr => "addr",
            VarType::Msg => "msg",
            VarType::Set => "set",
        };
        write!(f, "{s}")
    }
}

/// Index of a variable in the owning [`VarTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// Declared variables of a specification, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VarTable {
    entries: Vec<(String, VarType)>,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable::default()
    }

    /// Add a declaration; returns `None` when the name is already taken.
    pub fn declare(&mut self, name: &str, ty: VarType) -> Option<VarId> {
        if self.lookup(name).is_some() {
            return None;
        }
        self.entries.push((name.to_string(), ty));
        Some(VarId(self.entries.len() as u32 - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.entries
            .iter()
            .position(|(n, _)| n == name)
            .map(|k| VarId(k as u32))
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.entries[v.0 as usize].0
    }

    pub fn ty(&self, v: VarId) -> VarType {
        self.entries[v.0 as usize].1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &str, VarType)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, (n, t))| (VarId(k as u32), n.as_str(), *t))
    }
}

/// A total assignment of values to the declared variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataState {
    values: Vec<Value>,
}

impl DataState {
    pub fn new(values: Vec<Value>) -> Self {
        DataState { values }
    }

    pub fn get(&self, v: VarId) -> &Value {
        &self.values[v.0 as usize]
    }

    pub fn set(&mut self, v: VarId, value: Value) {
        self.values[v.0 as usize] = value;
    }

    /// Functional update, used by assignment application.
    pub fn with(&self, v: VarId, value: Value) -> Self {
        let mut next = self.clone();
        next.set(v, value);
        next
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    /// Canonical rendering `{x: v, y: w}` in declaration order.
    pub fn render(&self, vars: &VarTable) -> String {
        let mut out = String::from("{");
        for (k, value) in self.values.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(vars.name(VarId(k as u32)));
            out.push_str(": ");
            out.push_str(&value.to_string());
        }
        out.push('}');
        out
    }
}
