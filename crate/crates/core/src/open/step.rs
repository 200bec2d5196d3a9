//! Open sequential semantics: one protocol instance stepping over a global
//! state it only partially owns.
//!
//! Instead of relating whole global states (which would branch over every
//! unconstrained entry), a transition carries the action, an explicit update
//! map whose domain is exactly the automaton's owned address set — identity
//! entries record "and this does not change" — and the local successor.
//! What the environment does to the remaining entries is supplied separately
//! by the open exploration engine under its declared assumptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use crate::semantics::{Action, Model, StepError};
use crate::syntax::{apply_assignment, eval_expr, eval_guard};
use crate::syntax::{Addr, DataState, Expr, TermId, TermNode, Value};

use super::global::GlobalState;

/// One open transition: action, owned-entry updates, local successor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenTransition<L> {
    pub action: Action,
    /// Domain is exactly the owned address set; unchanged entries are
    /// present as identities.
    pub owned: BTreeMap<Addr, DataState>,
    pub local: L,
}

/// An automaton over (global state, local state) pairs that owns a fixed
/// set of global entries.
pub trait OpenAutomaton: Sync {
    type Local: Clone + Eq + Ord + Hash + Send + Sync + Debug;

    fn owned(&self) -> BTreeSet<Addr>;
    fn init(&self) -> Vec<(GlobalState, Self::Local)>;
    fn step(
        &self,
        sigma: &GlobalState,
        local: &Self::Local,
    ) -> Result<Vec<OpenTransition<Self::Local>>, StepError>;
    fn render_local(&self, local: &Self::Local) -> String;
    /// Rendering of the global component (needs the model's variable table).
    fn render_global(&self, sigma: &GlobalState) -> String;
    fn is_saturated(&self, _local: &Self::Local) -> bool {
        false
    }
    /// Control location label(s), for single-process layers.
    fn local_label(&self, _local: &Self::Local) -> Option<String> {
        None
    }
}

/// The identity update on a set of owned entries.
pub fn identity_updates(
    sigma: &GlobalState,
    owned: &BTreeSet<Addr>,
) -> BTreeMap<Addr, DataState> {
    owned.iter().map(|&a| (a, sigma.get(a).clone())).collect()
}

/// Union of two update maps over disjoint owned sets.
pub fn union_updates(
    a: &BTreeMap<Addr, DataState>,
    b: &BTreeMap<Addr, DataState>,
) -> BTreeMap<Addr, DataState> {
    let mut u = a.clone();
    for (k, v) in b {
        debug_assert!(!u.contains_key(k), "owned sets overlap at {k}");
        u.insert(*k, v.clone());
    }
    u
}

/// Initial global states: every combination of initial valuations at the
/// owned addresses, the default everywhere else.
pub fn initial_globals(model: &Model, owned: &BTreeSet<Addr>) -> Vec<GlobalState> {
    let mut sigmas = vec![GlobalState::total(model, BTreeMap::new())];
    for &a in owned {
        let options = model.init_states(a);
        let mut next = Vec::with_capacity(sigmas.len() * options.len());
        for s in &sigmas {
            for o in &options {
                next.push(s.with(a, o.clone()));
            }
        }
        sigmas = next;
    }
    sigmas.sort();
    sigmas.dedup();
    sigmas
}

fn eval_context(model: &Model, i: Addr, sigma: &GlobalState, ctl: TermId) -> String {
    format!(
        "{} at {} (address {i})",
        sigma.get(i).render(model.vars()),
        model.render_labels(ctl)
    )
}

fn eval_at(
    model: &Model,
    i: Addr,
    sigma: &GlobalState,
    ctl: TermId,
    e: &Expr,
) -> Result<Value, StepError> {
    eval_expr(&model.dom, sigma.get(i), e).map_err(|source| StepError::Eval {
        context: eval_context(model, i, sigma, ctl),
        source,
    })
}

fn eval_msg_at(
    model: &Model,
    i: Addr,
    sigma: &GlobalState,
    ctl: TermId,
    e: &Expr,
) -> Result<crate::syntax::Message, StepError> {
    match eval_at(model, i, sigma, ctl, e)? {
        Value::Msg(m) => Ok(m),
        other => Err(StepError::NotAMessage(format!(
            "{} (in {})",
            other,
            eval_context(model, i, sigma, ctl)
        ))),
    }
}

/// All open transitions of the sequential process at address `i` with
/// control `ctl`, read against `sigma`.
pub fn open_seq_step(
    model: &Model,
    i: Addr,
    sigma: &GlobalState,
    ctl: TermId,
) -> Result<Vec<OpenTransition<TermId>>, StepError> {
    let mut out = Vec::new();
    ocollect(model, i, sigma, ctl, &mut out)?;
    Ok(out)
}

fn ocollect(
    model: &Model,
    i: Addr,
    sigma: &GlobalState,
    ctl: TermId,
    out: &mut Vec<OpenTransition<TermId>>,
) -> Result<(), StepError> {
    let xi = sigma.get(i);
    let keep = || BTreeMap::from([(i, xi.clone())]);
    match model.spec.node(ctl) {
        TermNode::Assign { update, next, .. } => {
            let nxi = apply_assignment(&model.dom, xi, update).map_err(|source| {
                StepError::Eval {
                    context: eval_context(model, i, sigma, ctl),
                    source,
                }
            })?;
            out.push(OpenTransition {
                action: Action::Tau,
                owned: BTreeMap::from([(i, nxi)]),
                local: *next,
            });
        }
        TermNode::Guard { guard, next, .. } => {
            let extensions =
                eval_guard(&model.dom, xi, guard).map_err(|source| StepError::Eval {
                    context: eval_context(model, i, sigma, ctl),
                    source,
                })?;
            for nxi in extensions {
                out.push(OpenTransition {
                    action: Action::Tau,
                    owned: BTreeMap::from([(i, nxi)]),
                    local: *next,
                });
            }
        }
        TermNode::Broadcast { msg, next, .. } => {
            let m = eval_msg_at(model, i, sigma, ctl, msg)?;
            out.push(OpenTransition {
                action: Action::Broadcast(m),
                owned: keep(),
                local: *next,
            });
        }
        TermNode::Groupcast { dests, msg, next, .. } => {
            let d = match eval_at(model, i, sigma, ctl, dests)? {
                Value::Set(d) => d,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            let m = eval_msg_at(model, i, sigma, ctl, msg)?;
            out.push(OpenTransition {
                action: Action::Groupcast(d, m),
                owned: keep(),
                local: *next,
            });
        }
        TermNode::Unicast {
            dest,
            msg,
            succ,
            fail,
            ..
        } => {
            let d = match eval_at(model, i, sigma, ctl, dest)? {
                Value::Addr(a) => a,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            let m = eval_msg_at(model, i, sigma, ctl, msg)?;
            out.push(OpenTransition {
                action: Action::Unicast(d, m),
                owned: keep(),
                local: *succ,
            });
            out.push(OpenTransition {
                action: Action::NotUnicast(d),
                owned: keep(),
                local: *fail,
            });
        }
        TermNode::Send { msg, next, .. } => {
            let m = eval_msg_at(model, i, sigma, ctl, msg)?;
            out.push(OpenTransition {
                action: Action::Send(m),
                owned: keep(),
                local: *next,
            });
        }
        TermNode::Receive { var, next, .. } => {
            for m in model.dom.messages() {
                out.push(OpenTransition {
                    action: Action::Receive(m),
                    owned: BTreeMap::from([(i, xi.with(*var, Value::Msg(m)))]),
                    local: *next,
                });
            }
        }
        TermNode::Deliver { data, next, .. } => {
            let d = match eval_at(model, i, sigma, ctl, data)? {
                Value::Nat(n) => n,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            out.push(OpenTransition {
                action: Action::Deliver(d),
                owned: keep(),
                local: *next,
            });
        }
        TermNode::Choice { left, right } => {
            ocollect(model, i, sigma, *left, out)?;
            ocollect(model, i, sigma, *right, out)?;
        }
        TermNode::Call { proc } => {
            ocollect(model, i, sigma, model.spec.proc_body(*proc), out)?;
        }
    }
    Ok(())
}

/// One open protocol instance at a fixed address, without a queue.
pub struct OpenSeqAutomaton<'m> {
    pub model: &'m Model,
    pub addr: Addr,
}

impl<'m> OpenSeqAutomaton<'m> {
    pub fn new(model: &'m Model, addr: Addr) -> Self {
        OpenSeqAutomaton { model, addr }
    }
}

impl OpenAutomaton for OpenSeqAutomaton<'_> {
    type Local = TermId;

    fn owned(&self) -> BTreeSet<Addr> {
        BTreeSet::from([self.addr])
    }

    fn init(&self) -> Vec<(GlobalState, TermId)> {
        let body = self.model.entry_body();
        initial_globals(self.model, &self.owned())
            .into_iter()
            .map(|s| (s, body))
            .collect()
    }

    fn step(
        &self,
        sigma: &GlobalState,
        local: &TermId,
    ) -> Result<Vec<OpenTransition<TermId>>, StepError> {
        open_seq_step(self.model, self.addr, sigma, *local)
    }

    fn render_local(&self, local: &TermId) -> String {
        format!("at {}", self.model.render_labels(*local))
    }

    fn render_global(&self, sigma: &GlobalState) -> String {
        sigma.render(self.model)
    }

    fn local_label(&self, local: &TermId) -> Option<String> {
        Some(self.model.render_labels(*local))
    }
}
