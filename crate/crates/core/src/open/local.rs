//! Open local parallel composition: the protocol reads and writes its
//! global entry while the queue's contents stay purely local.
//!
//! Only the protocol component constrains the global state. Queue appends
//! are local bookkeeping and record the identity on the owned entry; the
//! head handoff reuses the protocol's own receive update. Queue contents
//! are deliberately never compared across addresses.

use std::collections::BTreeSet;

use crate::semantics::{Action, Model, ProcessShape, StepError};
use crate::syntax::{Addr, Message, TermId};

use super::global::GlobalState;
use super::step::{
    identity_updates, initial_globals, open_seq_step, OpenAutomaton, OpenTransition,
};

/// Control term plus (for the queued shape) the local FIFO contents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenLocal {
    pub ctl: TermId,
    /// `None` for the bare sequential shape.
    pub queue: Option<Vec<Message>>,
}

impl OpenLocal {
    pub fn queue_len(&self) -> usize {
        self.queue.as_ref().map_or(0, |q| q.len())
    }
}

/// The scenario-shaped initial local component.
pub fn initial_open_local(model: &Model) -> OpenLocal {
    OpenLocal {
        ctl: model.entry_body(),
        queue: match model.scenario.shape {
            ProcessShape::Seq => None,
            ProcessShape::SeqQmsg => Some(Vec::new()),
        },
    }
}

pub fn render_open_local(model: &Model, s: &OpenLocal) -> String {
    let at = format!("at {}", model.render_labels(s.ctl));
    match &s.queue {
        None => at,
        Some(q) => {
            let items: Vec<String> = q.iter().map(|m| m.to_string()).collect();
            format!("{at} | queue [{}]", items.join(", "))
        }
    }
}

/// All open transitions of the local composite at address `i`.
pub fn open_local_step(
    model: &Model,
    i: Addr,
    sigma: &GlobalState,
    s: &OpenLocal,
) -> Result<Vec<OpenTransition<OpenLocal>>, StepError> {
    let Some(queue) = &s.queue else {
        return Ok(open_seq_step(model, i, sigma, s.ctl)?
            .into_iter()
            .map(|t| OpenTransition {
                action: t.action,
                owned: t.owned,
                local: OpenLocal {
                    ctl: t.local,
                    queue: None,
                },
            })
            .collect());
    };

    let left = open_seq_step(model, i, sigma, s.ctl)?;
    let mut out = Vec::new();

    // Protocol alone: everything but its receives.
    for t in &left {
        if !matches!(t.action, Action::Receive(_)) {
            out.push(OpenTransition {
                action: t.action.clone(),
                owned: t.owned.clone(),
                local: OpenLocal {
                    ctl: t.local,
                    queue: Some(queue.clone()),
                },
            });
        }
    }

    // Queue alone: purely local appends, identity on the owned entry.
    if queue.len() < model.scenario.queue_bound {
        let keep = identity_updates(sigma, &BTreeSet::from([i]));
        for m in model.dom.messages() {
            let mut q = queue.clone();
            q.push(m);
            out.push(OpenTransition {
                action: Action::Receive(m),
                owned: keep.clone(),
                local: OpenLocal {
                    ctl: s.ctl,
                    queue: Some(q),
                },
            });
        }
    }

    // Handoff: the protocol's receive of the head, silently.
    if let Some(head) = queue.first() {
        for t in &left {
            if t.action == Action::Receive(*head) {
                out.push(OpenTransition {
                    action: Action::Tau,
                    owned: t.owned.clone(),
                    local: OpenLocal {
                        ctl: t.local,
                        queue: Some(queue[1..].to_vec()),
                    },
                });
            }
        }
    }

    Ok(out)
}

/// One open protocol instance at a fixed address, shaped per the scenario.
pub struct OpenLocalAutomaton<'m> {
    pub model: &'m Model,
    pub addr: Addr,
}

impl<'m> OpenLocalAutomaton<'m> {
    pub fn new(model: &'m Model, addr: Addr) -> Self {
        OpenLocalAutomaton { model, addr }
    }
}

impl OpenAutomaton for OpenLocalAutomaton<'_> {
    type Local = OpenLocal;

    fn owned(&self) -> BTreeSet<Addr> {
        BTreeSet::from([self.addr])
    }

    fn init(&self) -> Vec<(GlobalState, OpenLocal)> {
        let local = initial_open_local(self.model);
        initial_globals(self.model, &self.owned())
            .into_iter()
            .map(|s| (s, local.clone()))
            .collect()
    }

    fn step(
        &self,
        sigma: &GlobalState,
        local: &OpenLocal,
    ) -> Result<Vec<OpenTransition<OpenLocal>>, StepError> {
        open_local_step(self.model, self.addr, sigma, local)
    }

    fn render_local(&self, local: &OpenLocal) -> String {
        render_open_local(self.model, local)
    }

    fn render_global(&self, sigma: &GlobalState) -> String {
        sigma.render(self.model)
    }

    fn is_saturated(&self, local: &OpenLocal) -> bool {
        local.queue_len() >= self.model.scenario.queue_bound
    }

    fn local_label(&self, local: &OpenLocal) -> Option<String> {
        Some(self.model.render_labels(local.ctl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Value;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . < is_pkt > . broadcast(pkt(num, sip)) . call(P)
";

    fn model() -> Model {
        Model::build(
            ECHO,
            "net = 1 : {}\ndata_max = 1\nqueue_bound = 2\nprocess = seq_qmsg\n",
        )
        .unwrap()
    }

    #[test]
    fn queue_appends_are_identity_on_the_owned_entry() {
        let m = model();
        let auto = OpenLocalAutomaton::new(&m, Addr(1));
        let (sigma, local) = auto.init().remove(0);
        let steps = auto.step(&sigma, &local).unwrap();
        assert_eq!(steps.len(), m.dom.messages().len());
        for t in &steps {
            assert!(matches!(t.action, Action::Receive(_)));
            assert_eq!(t.owned[&Addr(1)], *sigma.get(Addr(1)));
            assert_eq!(t.local.queue_len(), 1);
        }
    }

    #[test]
    fn handoff_applies_the_protocol_receive_to_the_owned_entry() {
        let m = model();
        let msg = m.vars().lookup("msg").unwrap();
        let auto = OpenLocalAutomaton::new(&m, Addr(1));
        let (sigma, local) = auto.init().remove(0);
        let head = Message::Pkt {
            data: 1,
            src: Addr(1),
        };
        let queued = auto
            .step(&sigma, &local)
            .unwrap()
            .into_iter()
            .find(|t| t.action == Action::Receive(head))
            .unwrap();
        let sigma = sigma.updated(&queued.owned);
        let taus: Vec<_> = auto
            .step(&sigma, &queued.local)
            .unwrap()
            .into_iter()
            .filter(|t| t.action == Action::Tau)
            .collect();
        assert_eq!(taus.len(), 1);
        assert_eq!(taus[0].owned[&Addr(1)].get(msg), &Value::Msg(head));
        assert_eq!(taus[0].local.queue_len(), 0);
    }

    #[test]
    fn saturated_queue_refuses_further_receives() {
        let m = model();
        let auto = OpenLocalAutomaton::new(&m, Addr(1));
        let (sigma, mut local) = auto.init().remove(0);
        for _ in 0..2 {
            local = auto
                .step(&sigma, &local)
                .unwrap()
                .into_iter()
                .find(|t| matches!(t.action, Action::Receive(_)))
                .unwrap()
                .local;
        }
        assert!(auto.is_saturated(&local));
        let steps = auto.step(&sigma, &local).unwrap();
        assert!(!steps.iter().any(|t| matches!(t.action, Action::Receive(_))));
        assert!(steps.iter().any(|t| t.action == Action::Tau));
    }
}
