//! Local parallel composition: a protocol instance read through a message
//! queue.
//!
//! The queue is a plain bounded FIFO: while below its bound it accepts any
//! domain message (keeping the composite input-enabled even while the
//! protocol is busy), and while nonempty it offers its head to the protocol.
//! The handoff — protocol receive meeting queue send — is a single τ of the
//! composite. At the bound the composite refuses further receives; states in
//! that situation are flagged so explorers can report the saturation rather
//! than silently under-approximate.

use crate::syntax::{Addr, Message};

use super::action::Action;
use super::automaton::{Automaton, StepResult};
use super::model::Model;
use super::scenario::ProcessShape;
use super::seq::{seq_step, SeqState};

/// A protocol state optionally composed with a FIFO queue.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalState {
    pub seq: SeqState,
    /// `None` for the bare sequential shape.
    pub queue: Option<Vec<Message>>,
}

impl LocalState {
    pub fn queue_len(&self) -> usize {
        self.queue.as_ref().map_or(0, |q| q.len())
    }
}

/// All transitions of the local composite.
pub fn local_step(model: &Model, s: &LocalState) -> StepResult<LocalState> {
    let Some(queue) = &s.queue else {
        // Bare sequential process.
        return Ok(seq_step(model, &s.seq)?
            .into_iter()
            .map(|(a, seq)| (a, LocalState { seq, queue: None }))
            .collect());
    };

    let left = seq_step(model, &s.seq)?;
    let mut out = Vec::new();

    // Protocol alone: everything but its receives, which are served by the
    // queue head instead of the environment.
    for (a, seq) in &left {
        if !matches!(a, Action::Receive(_)) {
            out.push((
                a.clone(),
                LocalState {
                    seq: seq.clone(),
                    queue: Some(queue.clone()),
                },
            ));
        }
    }

    // Queue alone: append any domain message while below the bound.
    if queue.len() < model.scenario.queue_bound {
        for m in model.dom.messages() {
            let mut q = queue.clone();
            q.push(m);
            out.push((
                Action::Receive(m),
                LocalState {
                    seq: s.seq.clone(),
                    queue: Some(q),
                },
            ));
        }
    }

    // Handoff: the queue sends its head, the protocol receives it, and the
    // composite moves silently.
    if let Some(head) = queue.first() {
        for (a, seq) in &left {
            if *a == Action::Receive(*head) {
                out.push((
                    Action::Tau,
                    LocalState {
                        seq: seq.clone(),
                        queue: Some(queue[1..].to_vec()),
                    },
                ));
            }
        }
    }

    Ok(out)
}

/// One protocol instance at a fixed address, shaped per the scenario.
pub struct LocalAutomaton<'m> {
    pub model: &'m Model,
    pub addr: Addr,
}

impl<'m> LocalAutomaton<'m> {
    pub fn new(model: &'m Model, addr: Addr) -> Self {
        LocalAutomaton { model, addr }
    }

    pub fn initial_local_states(model: &Model, addr: Addr) -> Vec<LocalState> {
        let body = model.entry_body();
        let queue = match model.scenario.shape {
            ProcessShape::Seq => None,
            ProcessShape::SeqQmsg => Some(Vec::new()),
        };
        model
            .init_states(addr)
            .into_iter()
            .map(|xi| LocalState {
                seq: SeqState { xi, ctl: body },
                queue: queue.clone(),
            })
            .collect()
    }

    pub fn render_local(model: &Model, s: &LocalState) -> String {
        let seq = format!(
            "{} at {}",
            s.seq.xi.render(model.vars()),
            model.render_labels(s.seq.ctl)
        );
        match &s.queue {
            None => seq,
            Some(q) => {
                let items: Vec<String> = q.iter().map(|m| m.to_string()).collect();
                format!("{seq} | queue [{}]", items.join(", "))
            }
        }
    }
}

impl Automaton for LocalAutomaton<'_> {
    type State = LocalState;

    fn init(&self) -> Vec<LocalState> {
        Self::initial_local_states(self.model, self.addr)
    }

    fn step(&self, s: &LocalState) -> StepResult<LocalState> {
        local_step(self.model, s)
    }

    fn render_state(&self, s: &LocalState) -> String {
        Self::render_local(self.model, s)
    }

    fn is_saturated(&self, s: &LocalState) -> bool {
        s.queue_len() >= self.model.scenario.queue_bound
    }

    fn state_label(&self, s: &LocalState) -> Option<String> {
        Some(self.model.render_labels(s.seq.ctl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::model::Model;

    const ECHO: &str = "\
vars msg: msg, num: nat, sip: addr
process P: receive(msg) . < is_pkt > . broadcast(pkt(num, sip)) . call(P)
";

    fn model(shape: &str) -> Model {
        let scn = format!("net = 1 : {{}}\ndata_max = 1\nqueue_bound = 2\nprocess = {shape}\n");
        Model::build(ECHO, &scn).unwrap()
    }

    #[test]
    fn bare_shape_steps_as_the_sequential_process() {
        let m = model("seq");
        let auto = LocalAutomaton::new(&m, Addr(1));
        let init = auto.init();
        assert_eq!(init[0].queue, None);
        let steps = auto.step(&init[0]).unwrap();
        assert!(steps.iter().all(|(a, _)| matches!(a, Action::Receive(_))));
        assert_eq!(steps.len(), m.dom.messages().len());
    }

    #[test]
    fn empty_queue_accepts_any_domain_message() {
        let m = model("seq_qmsg");
        let auto = LocalAutomaton::new(&m, Addr(1));
        let init = auto.init();
        let steps = auto.step(&init[0]).unwrap();
        // Protocol receives are absorbed; only queue appends appear.
        assert_eq!(steps.len(), m.dom.messages().len());
        assert!(steps
            .iter()
            .all(|(a, s)| matches!(a, Action::Receive(_)) && s.queue_len() == 1));
        // The protocol itself has not moved.
        assert!(steps.iter().all(|(_, s)| s.seq == init[0].seq));
    }

    #[test]
    fn handoff_of_the_head_is_a_single_tau() {
        let m = model("seq_qmsg");
        let auto = LocalAutomaton::new(&m, Addr(1));
        let init = &auto.init()[0];
        let head = Message::Pkt {
            data: 1,
            src: Addr(1),
        };
        let (_, with_one) = auto
            .step(init)
            .unwrap()
            .into_iter()
            .find(|(a, _)| *a == Action::Receive(head))
            .unwrap();
        let steps = auto.step(&with_one).unwrap();
        let taus: Vec<_> = steps
            .iter()
            .filter(|(a, _)| matches!(a, Action::Tau))
            .collect();
        assert_eq!(taus.len(), 1);
        let (_, after) = taus[0];
        assert_eq!(after.queue_len(), 0);
        assert_ne!(after.seq.ctl, init.seq.ctl);
    }

    #[test]
    fn receives_are_refused_at_the_bound() {
        let m = model("seq_qmsg");
        let auto = LocalAutomaton::new(&m, Addr(1));
        let mut s = auto.init()[0].clone();
        for _ in 0..2 {
            s = auto
                .step(&s)
                .unwrap()
                .into_iter()
                .find(|(a, _)| matches!(a, Action::Receive(_)))
                .unwrap()
                .1;
        }
        assert!(auto.is_saturated(&s));
        let steps = auto.step(&s).unwrap();
        assert!(!steps.iter().any(|(a, _)| matches!(a, Action::Receive(_))));
        // The head can still be handed to the protocol.
        assert!(steps.iter().any(|(a, _)| matches!(a, Action::Tau)));
    }

    #[test]
    fn protocol_broadcast_leaves_the_queue_alone() {
        let m = model("seq_qmsg");
        let auto = LocalAutomaton::new(&m, Addr(1));
        let init = &auto.init()[0];
        let head = Message::Pkt {
            data: 1,
            src: Addr(1),
        };
        let mut s = auto
            .step(init)
            .unwrap()
            .into_iter()
            .find(|(a, _)| *a == Action::Receive(head))
            .unwrap()
            .1;
        // fill the second slot so the queue is visibly nonempty afterwards
        s = auto
            .step(&s)
            .unwrap()
            .into_iter()
            .find(|(a, _)| matches!(a, Action::Receive(_)))
            .unwrap()
            .1;
        // handoff, then the is_pkt test
        s = auto
            .step(&s)
            .unwrap()
            .into_iter()
            .find(|(a, _)| matches!(a, Action::Tau))
            .unwrap()
            .1;
        s = auto
            .step(&s)
            .unwrap()
            .into_iter()
            .find(|(a, _)| matches!(a, Action::Tau))
            .unwrap()
            .1;
        let steps = auto.step(&s).unwrap();
        let bc: Vec<_> = steps
            .iter()
            .filter(|(a, _)| matches!(a, Action::Broadcast(_)))
            .collect();
        assert_eq!(bc.len(), 1);
        assert_eq!(bc[0].1.queue_len(), 1);
    }
}
