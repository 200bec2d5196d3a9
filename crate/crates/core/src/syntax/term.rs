//! Process terms and specifications.
//!
//! Terms are hash-consed into an arena owned by the [`Specification`], so a
//! `TermId` identifies a term up to structural equality (labels included).
//! Sets of control terms, microstep graphs and successor states all work on
//! ids, which keeps the analyses and the step generators cheap.

use std::collections::{BTreeSet, HashMap};

use super::expr::{Assignment, BindSource, Expr, Guard};
use super::state::{VarId, VarTable};
use super::value::Addr;

/// Index of a process name in the owning [`Specification`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub u32);

/// A prefix label: the owning process name paired with a line index.
/// Rendered as `PToy-:3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub proc: ProcId,
    pub index: u32,
}

/// Interned term identifier, valid for the arena that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

/// One term constructor. Every prefix form carries at most one label and,
/// before labelling, an optional explicit index written `@k` in the source.
/// Choice and process calls are never labelled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermNode {
    Assign {
        label: Option<Label>,
        hint: Option<u32>,
        update: Assignment,
        next: TermId,
    },
    Guard {
        label: Option<Label>,
        hint: Option<u32>,
        guard: Guard,
        next: TermId,
    },
    Broadcast {
        label: Option<Label>,
        hint: Option<u32>,
        msg: Expr,
        next: TermId,
    },
    Groupcast {
        label: Option<Label>,
        hint: Option<u32>,
        dests: Expr,
        msg: Expr,
        next: TermId,
    },
    Unicast {
        label: Option<Label>,
        hint: Option<u32>,
        dest: Expr,
        msg: Expr,
        succ: TermId,
        fail: TermId,
    },
    Send {
        label: Option<Label>,
        hint: Option<u32>,
        msg: Expr,
        next: TermId,
    },
    Receive {
        label: Option<Label>,
        hint: Option<u32>,
        var: VarId,
        next: TermId,
    },
    Deliver {
        label: Option<Label>,
        hint: Option<u32>,
        data: Expr,
        next: TermId,
    },
    Choice {
        left: TermId,
        right: TermId,
    },
    Call {
        proc: ProcId,
    },
}

impl TermNode {
    pub fn label(&self) -> Option<Label> {
        match self {
            TermNode::Assign { label, .. }
            | TermNode::Guard { label, .. }
            | TermNode::Broadcast { label, .. }
            | TermNode::Groupcast { label, .. }
            | TermNode::Unicast { label, .. }
            | TermNode::Send { label, .. }
            | TermNode::Receive { label, .. }
            | TermNode::Deliver { label, .. } => *label,
            TermNode::Choice { .. } | TermNode::Call { .. } => None,
        }
    }

    pub fn hint(&self) -> Option<u32> {
        match self {
            TermNode::Assign { hint, .. }
            | TermNode::Guard { hint, .. }
            | TermNode::Broadcast { hint, .. }
            | TermNode::Groupcast { hint, .. }
            | TermNode::Unicast { hint, .. }
            | TermNode::Send { hint, .. }
            | TermNode::Receive { hint, .. }
            | TermNode::Deliver { hint, .. } => *hint,
            TermNode::Choice { .. } | TermNode::Call { .. } => None,
        }
    }

    pub fn is_prefix(&self) -> bool {
        !matches!(self, TermNode::Choice { .. } | TermNode::Call { .. })
    }

    pub fn is_call(&self) -> bool {
        matches!(self, TermNode::Call { .. })
    }

    pub fn is_choice(&self) -> bool {
        matches!(self, TermNode::Choice { .. })
    }

    /// Direct subterm continuations (both branches for a choice or unicast).
    pub fn children(&self) -> Vec<TermId> {
        match self {
            TermNode::Assign { next, .. }
            | TermNode::Guard { next, .. }
            | TermNode::Broadcast { next, .. }
            | TermNode::Groupcast { next, .. }
            | TermNode::Send { next, .. }
            | TermNode::Receive { next, .. }
            | TermNode::Deliver { next, .. } => vec![*next],
            TermNode::Unicast { succ, fail, .. } => vec![*succ, *fail],
            TermNode::Choice { left, right } => vec![*left, *right],
            TermNode::Call { .. } => vec![],
        }
    }
}

/// Hash-consing arena: structurally equal nodes share one id.
#[derive(Debug, Clone, Default)]
pub struct TermArena {
    nodes: Vec<TermNode>,
    index: HashMap<TermNode, TermId>,
}

impl TermArena {
    pub fn new() -> Self {
        TermArena::default()
    }

    pub fn intern(&mut self, node: TermNode) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: TermId) -> &TermNode {
        &self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A parsed specification: declared variables and one body per process name.
/// `labelled` records whether prefixes have been numbered yet.
#[derive(Debug, Clone)]
pub struct Specification {
    pub arena: TermArena,
    pub vars: VarTable,
    procs: Vec<(String, TermId)>,
    pub labelled: bool,
}

impl Specification {
    pub fn new(arena: TermArena, vars: VarTable, procs: Vec<(String, TermId)>, labelled: bool) -> Self {
        Specification {
            arena,
            vars,
            procs,
            labelled,
        }
    }

    pub fn processes(&self) -> impl Iterator<Item = (ProcId, &str, TermId)> {
        self.procs
            .iter()
            .enumerate()
            .map(|(k, (n, b))| (ProcId(k as u32), n.as_str(), *b))
    }

    pub fn proc_count(&self) -> usize {
        self.procs.len()
    }

    pub fn proc_name(&self, p: ProcId) -> &str {
        &self.procs[p.0 as usize].0
    }

    pub fn proc_body(&self, p: ProcId) -> TermId {
        self.procs[p.0 as usize].1
    }

    pub fn proc_id(&self, name: &str) -> Option<ProcId> {
        self.procs
            .iter()
            .position(|(n, _)| n == name)
            .map(|k| ProcId(k as u32))
    }

    pub fn node(&self, id: TermId) -> &TermNode {
        self.arena.node(id)
    }

    pub fn render_label(&self, l: Label) -> String {
        format!("{}-:{}", self.proc_name(l.proc), l.index)
    }

    /// All terms reachable from process bodies through direct subterms
    /// (process calls are members but are not followed).
    pub fn subterms(&self) -> BTreeSet<TermId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<TermId> = self.procs.iter().map(|(_, b)| *b).collect();
        while let Some(t) = stack.pop() {
            if seen.insert(t) {
                stack.extend(self.node(t).children());
            }
        }
        seen
    }

    /// Address literals appearing anywhere in the specification. These join
    /// the scenario universe to form the address domain.
    pub fn addr_literals(&self) -> BTreeSet<Addr> {
        let mut out = BTreeSet::new();
        for t in self.subterms() {
            match self.node(t) {
                TermNode::Assign { update, .. } => {
                    for (_, e) in &update.0 {
                        collect_expr_addrs(e, &mut out);
                    }
                }
                TermNode::Guard { guard, .. } => collect_guard_addrs(guard, &mut out),
                TermNode::Broadcast { msg, .. } | TermNode::Send { msg, .. } => {
                    collect_expr_addrs(msg, &mut out)
                }
                TermNode::Groupcast { dests, msg, .. } => {
                    collect_expr_addrs(dests, &mut out);
                    collect_expr_addrs(msg, &mut out);
                }
                TermNode::Unicast { dest, msg, .. } => {
                    collect_expr_addrs(dest, &mut out);
                    collect_expr_addrs(msg, &mut out);
                }
                TermNode::Deliver { data, .. } => collect_expr_addrs(data, &mut out),
                TermNode::Receive { .. } | TermNode::Choice { .. } | TermNode::Call { .. } => {}
            }
        }
        out
    }
}

fn collect_expr_addrs(e: &Expr, out: &mut BTreeSet<Addr>) {
    match e {
        Expr::Addr(a) => {
            out.insert(*a);
        }
        Expr::Var(_) | Expr::Nat(_) | Expr::NoneLit => {}
        Expr::Plus(a, b) | Expr::Max(a, b) => {
            collect_expr_addrs(a, out);
            collect_expr_addrs(b, out);
        }
        Expr::Cond(c, a, b) => {
            collect_expr_addrs(&c.lhs, out);
            collect_expr_addrs(&c.rhs, out);
            collect_expr_addrs(a, out);
            collect_expr_addrs(b, out);
        }
        Expr::Pkt { data, src } => {
            collect_expr_addrs(data, out);
            collect_expr_addrs(src, out);
        }
        Expr::NewPkt { data, dst } => {
            collect_expr_addrs(data, out);
            collect_expr_addrs(dst, out);
        }
        Expr::Proj(m, _) => collect_expr_addrs(m, out),
        Expr::SetLit(es) => {
            for e in es {
                collect_expr_addrs(e, out);
            }
        }
    }
}

fn collect_guard_addrs(g: &Guard, out: &mut BTreeSet<Addr>) {
    match g {
        Guard::Test(c) => {
            collect_expr_addrs(&c.lhs, out);
            collect_expr_addrs(&c.rhs, out);
        }
        Guard::Bind(binds) => {
            for (_, src) in binds {
                if let BindSource::Expr(e) = src {
                    collect_expr_addrs(e, out);
                }
            }
        }
        Guard::IsPkt { .. } | Guard::IsNewPkt { .. } => {}
    }
}
