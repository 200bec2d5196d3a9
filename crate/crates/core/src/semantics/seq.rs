//! Sequential process semantics: one protocol instance stepping over its
//! data state.
//!
//! A state pairs a data valuation with a control term. Prefixes fire their
//! evident action; guards fire τ once per satisfying extension of the
//! valuation; receive branches over the whole finite message domain; choice
//! offers the union of its branches and a call steps as the named body.
//! Unicast always yields exactly two transitions — the delivered and the
//! failed attempt — whose selection is resolved one level up by the node's
//! connectivity.

use crate::syntax::{Addr, DataState, Message, TermId, TermNode, Value};
use crate::syntax::{apply_assignment, eval_expr, eval_guard};

use super::action::Action;
use super::automaton::{Automaton, StepError, StepResult};
use super::model::Model;

/// A sequential process state: data valuation plus control term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqState {
    pub xi: DataState,
    pub ctl: TermId,
}

fn eval_context(model: &Model, s: &SeqState) -> String {
    format!("{} at {}", s.xi.render(model.vars()), model.render_labels(s.ctl))
}

fn eval_msg(model: &Model, s: &SeqState, e: &crate::syntax::Expr) -> Result<Message, StepError> {
    let v = eval_expr(&model.dom, &s.xi, e).map_err(|source| StepError::Eval {
        context: eval_context(model, s),
        source,
    })?;
    match v {
        Value::Msg(m) => Ok(m),
        other => Err(StepError::NotAMessage(format!(
            "{} (in {})",
            other,
            eval_context(model, s)
        ))),
    }
}

fn eval_in(model: &Model, s: &SeqState, e: &crate::syntax::Expr) -> Result<Value, StepError> {
    eval_expr(&model.dom, &s.xi, e).map_err(|source| StepError::Eval {
        context: eval_context(model, s),
        source,
    })
}

/// All transitions of the sequential process `(xi, ctl)`.
pub fn seq_step(model: &Model, s: &SeqState) -> StepResult<SeqState> {
    let mut out = Vec::new();
    collect(model, s, s.ctl, &mut out)?;
    Ok(out)
}

fn collect(
    model: &Model,
    s: &SeqState,
    ctl: TermId,
    out: &mut Vec<(Action, SeqState)>,
) -> Result<(), StepError> {
    let here = SeqState { xi: s.xi.clone(), ctl };
    match model.spec.node(ctl) {
        TermNode::Assign { update, next, .. } => {
            let xi = apply_assignment(&model.dom, &s.xi, update).map_err(|source| {
                StepError::Eval {
                    context: eval_context(model, &here),
                    source,
                }
            })?;
            out.push((Action::Tau, SeqState { xi, ctl: *next }));
        }
        TermNode::Guard { guard, next, .. } => {
            let extensions =
                eval_guard(&model.dom, &s.xi, guard).map_err(|source| StepError::Eval {
                    context: eval_context(model, &here),
                    source,
                })?;
            for xi in extensions {
                out.push((Action::Tau, SeqState { xi, ctl: *next }));
            }
        }
        TermNode::Broadcast { msg, next, .. } => {
            let m = eval_msg(model, &here, msg)?;
            out.push((
                Action::Broadcast(m),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *next,
                },
            ));
        }
        TermNode::Groupcast { dests, msg, next, .. } => {
            let d = match eval_in(model, &here, dests)? {
                Value::Set(d) => d,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            let m = eval_msg(model, &here, msg)?;
            out.push((
                Action::Groupcast(d, m),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *next,
                },
            ));
        }
        TermNode::Unicast {
            dest,
            msg,
            succ,
            fail,
            ..
        } => {
            let d = match eval_in(model, &here, dest)? {
                Value::Addr(a) => a,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            let m = eval_msg(model, &here, msg)?;
            out.push((
                Action::Unicast(d, m),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *succ,
                },
            ));
            out.push((
                Action::NotUnicast(d),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *fail,
                },
            ));
        }
        TermNode::Send { msg, next, .. } => {
            let m = eval_msg(model, &here, msg)?;
            out.push((
                Action::Send(m),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *next,
                },
            ));
        }
        TermNode::Receive { var, next, .. } => {
            for m in model.dom.messages() {
                out.push((
                    Action::Receive(m),
                    SeqState {
                        xi: s.xi.with(*var, Value::Msg(m)),
                        ctl: *next,
                    },
                ));
            }
        }
        TermNode::Deliver { data, next, .. } => {
            let d = match eval_in(model, &here, data)? {
                Value::Nat(n) => n,
                other => return Err(StepError::NotAMessage(other.to_string())),
            };
            out.push((
                Action::Deliver(d),
                SeqState {
                    xi: s.xi.clone(),
                    ctl: *next,
                },
            ));
        }
        TermNode::Choice { left, right } => {
            collect(model, s, *left, out)?;
            collect(model, s, *right, out)?;
        }
        TermNode::Call { proc } => {
            collect(model, s, model.spec.proc_body(*proc), out)?;
        }
    }
    Ok(())
}

/// One protocol instance at a fixed address, without a queue.
pub struct SeqAutomaton<'m> {
    pub model: &'m Model,
    pub addr: Addr,
}

impl<'m> SeqAutomaton<'m> {
    pub fn new(model: &'m Model, addr: Addr) -> Self {
        SeqAutomaton { model, addr }
    }
}

impl Automaton for SeqAutomaton<'_> {
    type State = SeqState;

    fn init(&self) -> Vec<SeqState> {
        let body = self.model.entry_body();
        self.model
            .init_states(self.addr)
            .into_iter()
            .map(|xi| SeqState { xi, ctl: body })
            .collect()
    }

    fn step(&self, s: &SeqState) -> StepResult<SeqState> {
        seq_step(self.model, s)
    }

    fn render_state(&self, s: &SeqState) -> String {
        format!(
            "{} at {}",
            s.xi.render(self.model.vars()),
            self.model.render_labels(s.ctl)
        )
    }

    fn state_label(&self, s: &SeqState) -> Option<String> {
        Some(self.model.render_labels(s.ctl))
    }
}
