//! Assigning labels to the action prefixes of a specification.
//!
//! Every prefix of a process body gets a label `PN-:k`. Indices are assigned
//! by a left-to-right pre-order walk with a counter starting at 0: an
//! unannotated prefix takes the current counter value and bumps it, a prefix
//! annotated `@k` takes `k` and raises the counter to at least `k + 1`.
//! Annotations let two branches of a choice share a label, which is how a
//! guard and its negation are marked as the same decision point. Sharing
//! cannot happen by accident: unannotated indices are fresh by construction,
//! so two prefixes carry the same label only when at least one of them says
//! so explicitly.
//!
//! Labelling also duplicates shared subterms (abbreviations are expanded by
//! the parser into shared references), so after this pass equal labels on
//! equal structure mean the same program point.

use thiserror::Error;

use super::term::{Label, ProcId, Specification, TermArena, TermId, TermNode};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("specification is already labelled")]
    AlreadyLabelled,
}

struct Labeller<'a> {
    old: &'a TermArena,
    new: TermArena,
    proc: ProcId,
    counter: u32,
}

impl<'a> Labeller<'a> {
    fn pick(&mut self, hint: Option<u32>) -> Option<Label> {
        let index = match hint {
            Some(k) => {
                self.counter = self.counter.max(k + 1);
                k
            }
            None => {
                let k = self.counter;
                self.counter += 1;
                k
            }
        };
        Some(Label {
            proc: self.proc,
            index,
        })
    }

    fn walk(&mut self, t: TermId) -> TermId {
        let node = self.old.node(t).clone();
        let node = match node {
            TermNode::Assign {
                hint, update, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Assign {
                    label,
                    hint,
                    update,
                    next,
                }
            }
            TermNode::Guard {
                hint, guard, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Guard {
                    label,
                    hint,
                    guard,
                    next,
                }
            }
            TermNode::Broadcast {
                hint, msg, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Broadcast {
                    label,
                    hint,
                    msg,
                    next,
                }
            }
            TermNode::Groupcast {
                hint,
                dests,
                msg,
                next,
                ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Groupcast {
                    label,
                    hint,
                    dests,
                    msg,
                    next,
                }
            }
            TermNode::Unicast {
                hint,
                dest,
                msg,
                succ,
                fail,
                ..
            } => {
                let label = self.pick(hint);
                let succ = self.walk(succ);
                let fail = self.walk(fail);
                TermNode::Unicast {
                    label,
                    hint,
                    dest,
                    msg,
                    succ,
                    fail,
                }
            }
            TermNode::Send {
                hint, msg, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Send {
                    label,
                    hint,
                    msg,
                    next,
                }
            }
            TermNode::Receive {
                hint, var, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Receive {
                    label,
                    hint,
                    var,
                    next,
                }
            }
            TermNode::Deliver {
                hint, data, next, ..
            } => {
                let label = self.pick(hint);
                let next = self.walk(next);
                TermNode::Deliver {
                    label,
                    hint,
                    data,
                    next,
                }
            }
            TermNode::Choice { left, right } => {
                let left = self.walk(left);
                let right = self.walk(right);
                TermNode::Choice { left, right }
            }
            TermNode::Call { proc } => TermNode::Call { proc },
        };
        self.new.intern(node)
    }
}

/// Label every prefix of every process body with that process's own name.
/// Consumes the unlabelled output of [`parse_spec`](super::parser::parse_spec).
pub fn label_spec(spec: &Specification) -> Result<Specification, LabelError> {
    if spec.labelled {
        return Err(LabelError::AlreadyLabelled);
    }
    let mut arena = TermArena::new();
    let mut procs = Vec::new();
    for (pid, name, body) in spec.processes() {
        let mut lab = Labeller {
            old: &spec.arena,
            new: std::mem::take(&mut arena),
            proc: pid,
            counter: 0,
        };
        let body = lab.walk(body);
        arena = lab.new;
        procs.push((name.to_string(), body));
    }
    Ok(Specification::new(arena, spec.vars.clone(), procs, true))
}
