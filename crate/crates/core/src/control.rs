//! Control-term analysis over a labelled specification.
//!
//! Choice and process calls only combine behaviour; the terms that actually
//! act are the prefix-headed subterms reached by unfolding them. This module
//! provides that unfolding (microsteps), the well-formedness check that makes
//! it terminate, the start/derivative-term functions, and the finite set of
//! control terms that over-approximates the reachable control states. The
//! control-term set drives per-location verification conditions; its two
//! independent characterizations (least fixpoint over start/derivative
//! terms, and a direct syntactic collection) are both implemented and are
//! cross-checked in tests.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Label, Specification, TermId, TermNode};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ControlError {
    #[error("unfolding choice or call from {from} can loop forever")]
    NotWellFormed { from: String },
}

/// One unfolding step: a choice offers its branches, a call its body,
/// prefixes offer nothing.
pub fn microsteps(spec: &Specification, t: TermId) -> Vec<TermId> {
    match spec.node(t) {
        TermNode::Choice { left, right } => vec![*left, *right],
        TermNode::Call { proc } => vec![spec.proc_body(*proc)],
        _ => Vec::new(),
    }
}

/// A specification is well formed when no microstep chain is infinite,
/// i.e. the microstep graph reachable from the process bodies is acyclic.
pub fn wellformed(spec: &Specification) -> bool {
    first_cycle(spec).is_none()
}

fn first_cycle(spec: &Specification) -> Option<TermId> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unseen,
        Active,
        Done,
    }
    let mut marks = vec![Mark::Unseen; spec.arena.len()];
    // iterative DFS with an explicit enter/exit stack
    enum Frame {
        Enter(TermId),
        Exit(TermId),
    }
    let mut stack: Vec<Frame> = spec.processes().map(|(_, _, b)| Frame::Enter(b)).collect();
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Enter(t) => match marks[t.0 as usize] {
                Mark::Active => return Some(t),
                Mark::Done => {}
                Mark::Unseen => {
                    marks[t.0 as usize] = Mark::Active;
                    stack.push(Frame::Exit(t));
                    for succ in microsteps(spec, t) {
                        if marks[succ.0 as usize] == Mark::Active {
                            return Some(succ);
                        }
                        stack.push(Frame::Enter(succ));
                    }
                }
            },
            Frame::Exit(t) => marks[t.0 as usize] = Mark::Done,
        }
    }
    None
}

/// Control analysis of one specification; constructing it performs the
/// well-formedness check that every other function here relies on.
pub struct Control<'s> {
    pub spec: &'s Specification,
}

impl<'s> Control<'s> {
    pub fn new(spec: &'s Specification) -> Result<Self, ControlError> {
        if let Some(t) = first_cycle(spec) {
            return Err(ControlError::NotWellFormed {
                from: crate::syntax::render_head(spec, t),
            });
        }
        Ok(Control { spec })
    }

    /// Start terms: the prefix-headed terms that act directly for `t`.
    pub fn sterms(&self, t: TermId) -> BTreeSet<TermId> {
        match self.spec.node(t) {
            TermNode::Choice { left, right } => {
                let mut s = self.sterms(*left);
                s.extend(self.sterms(*right));
                s
            }
            TermNode::Call { proc } => self.sterms(self.spec.proc_body(*proc)),
            _ => BTreeSet::from([t]),
        }
    }

    /// Local start terms: like [`sterms`](Self::sterms) but call terms are
    /// kept instead of unfolded, so no specification lookup is needed.
    pub fn stermsl(&self, t: TermId) -> BTreeSet<TermId> {
        match self.spec.node(t) {
            TermNode::Choice { left, right } => {
                let mut s = self.stermsl(*left);
                s.extend(self.stermsl(*right));
                s
            }
            _ => BTreeSet::from([t]),
        }
    }

    /// Derivative terms: start terms of every continuation of `t`,
    /// over-approximating where a transition from `t` can land.
    pub fn dterms(&self, t: TermId) -> BTreeSet<TermId> {
        match self.spec.node(t) {
            TermNode::Choice { left, right } => {
                let mut s = self.dterms(*left);
                s.extend(self.dterms(*right));
                s
            }
            TermNode::Call { proc } => self.dterms(self.spec.proc_body(*proc)),
            node => {
                let mut s = BTreeSet::new();
                for c in node.children() {
                    s.extend(self.sterms(c));
                }
                s
            }
        }
    }

    /// Control terms as a least fixpoint: start terms of every process body,
    /// closed under derivative terms.
    pub fn cterms(&self) -> BTreeSet<TermId> {
        let mut set: BTreeSet<TermId> = BTreeSet::new();
        for (_, _, body) in self.spec.processes() {
            set.extend(self.sterms(body));
        }
        loop {
            let mut grew = false;
            for p in set.clone() {
                for d in self.dterms(p) {
                    grew |= set.insert(d);
                }
            }
            if !grew {
                return set;
            }
        }
    }

    /// Local control terms of a single term, independent of the
    /// specification: prefixes contribute themselves plus the local control
    /// terms of their continuations, and calls are kept as members.
    pub fn ctermsl(&self, t: TermId) -> BTreeSet<TermId> {
        match self.spec.node(t) {
            TermNode::Choice { left, right } => {
                let mut s = self.ctermsl(*left);
                s.extend(self.ctermsl(*right));
                s
            }
            TermNode::Call { .. } => BTreeSet::from([t]),
            node => {
                let mut s = BTreeSet::from([t]);
                for c in node.children() {
                    s.extend(self.ctermsl(c));
                }
                s
            }
        }
    }

    /// The alternative control-term characterization: local control terms of
    /// every process body, dropping call terms. Computed independently of
    /// [`cterms`](Self::cterms) so the two can serve as mutual oracles.
    pub fn cterms_via_local(&self) -> BTreeSet<TermId> {
        let mut set = BTreeSet::new();
        for (_, _, body) in self.spec.processes() {
            for t in self.ctermsl(body) {
                if !self.spec.node(t).is_call() {
                    set.insert(t);
                }
            }
        }
        set
    }

    /// Labels of the heads of the start terms of `t`.
    pub fn labels_of(&self, t: TermId) -> BTreeSet<Label> {
        self.sterms(t)
            .into_iter()
            .map(|s| {
                self.spec
                    .node(s)
                    .label()
                    .expect("labelled specification required for label extraction")
            })
            .collect()
    }

    /// Every control term, and every choice appearing in a process body,
    /// must carry exactly one label.
    pub fn check_simple_labels(&self) -> bool {
        for p in self.cterms() {
            if self.labels_of(p).len() != 1 {
                return false;
            }
        }
        for t in self.spec.subterms() {
            if self.spec.node(t).is_choice() && self.labels_of(t).len() != 1 {
                return false;
            }
        }
        true
    }

    /// Initial control terms must unfold to start terms that already occur
    /// inside the specification's bodies.
    pub fn check_control_within(&self, init_terms: &[TermId]) -> bool {
        let subterms = self.spec.subterms();
        init_terms
            .iter()
            .all(|t| self.sterms(*t).iter().all(|s| subterms.contains(s)))
    }

    /// The sufficient syntactic well-formedness condition: no call occurs
    /// among the local start terms of any process body.
    pub fn no_direct_calls(&self) -> bool {
        self.spec
            .processes()
            .all(|(_, _, body)| self.stermsl(body).iter().all(|t| !self.spec.node(*t).is_call()))
    }
}

/// Check the syntactic condition without requiring well-formedness first.
pub fn no_direct_calls(spec: &Specification) -> bool {
    fn stermsl(spec: &Specification, t: TermId, out: &mut BTreeSet<TermId>) {
        match spec.node(t) {
            TermNode::Choice { left, right } => {
                stermsl(spec, *left, out);
                stermsl(spec, *right, out);
            }
            _ => {
                out.insert(t);
            }
        }
    }
    spec.processes().all(|(_, _, body)| {
        let mut s = BTreeSet::new();
        stermsl(spec, body, &mut s);
        s.iter().all(|t| !spec.node(*t).is_call())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{label_spec, parse_spec};

    fn build(src: &str) -> Specification {
        label_spec(&parse_spec(src).unwrap()).unwrap()
    }

    #[test]
    fn choice_microsteps_to_both_branches() {
        let spec = build(
            "vars x: nat\n\
             process A: (<x = 0> . call(A)) (+) (<x = 1> . call(A))",
        );
        let body = spec.proc_body(crate::syntax::ProcId(0));
        assert_eq!(microsteps(&spec, body).len(), 2);
    }

    #[test]
    fn call_microsteps_to_the_named_body() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(A)",
        );
        let body = spec.proc_body(crate::syntax::ProcId(0));
        let cont = spec.node(body).children()[0];
        assert_eq!(microsteps(&spec, cont), vec![body]);
    }

    #[test]
    fn self_alternative_call_is_not_wellformed() {
        let spec = build(
            "vars x: nat\n\
             process A: ([[x := 0]] . call(A)) (+) call(A)",
        );
        assert!(!wellformed(&spec));
        assert!(Control::new(&spec).is_err());
    }

    #[test]
    fn prefix_only_body_is_wellformed() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . <x = 0> . call(A)",
        );
        assert!(wellformed(&spec));
    }

    #[test]
    fn sterms_of_a_choice_collects_branch_heads() {
        let spec = build(
            "vars x: nat\n\
             process A: (<x = 0> . call(A)) (+) (<x = 1> . call(A))",
        );
        let ctl = Control::new(&spec).unwrap();
        let body = spec.proc_body(crate::syntax::ProcId(0));
        let heads = ctl.sterms(body);
        assert_eq!(heads.len(), 2);
        assert!(heads.iter().all(|t| spec.node(*t).is_prefix()));
    }

    #[test]
    fn sterms_unfolds_calls_but_stermsl_keeps_them() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(B)\n\
             process B: <x = 0> . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        let a_body = spec.proc_body(crate::syntax::ProcId(0));
        let call_b = spec.node(a_body).children()[0];
        let via_sterms = ctl.sterms(call_b);
        assert_eq!(via_sterms.len(), 1);
        assert!(spec.node(*via_sterms.iter().next().unwrap()).is_prefix());
        let via_local = ctl.stermsl(call_b);
        assert!(spec.node(*via_local.iter().next().unwrap()).is_call());
    }

    #[test]
    fn dterms_of_unicast_includes_both_continuations() {
        let spec = build(
            "vars x: nat, d: addr, m: msg\n\
             process A: unicast(d, m) |> [[x := 1]] . call(A) <| [[x := 2]] . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        let uni = spec.proc_body(crate::syntax::ProcId(0));
        let d = ctl.dterms(uni);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn dterms_follows_a_call_continuation_to_the_process_head() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        let assign = spec.proc_body(crate::syntax::ProcId(0));
        let d = ctl.dterms(assign);
        assert_eq!(d, BTreeSet::from([assign]));
    }

    #[test]
    fn single_assign_loop_has_exactly_one_control_term() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        assert_eq!(ctl.cterms().len(), 1);
    }

    #[test]
    fn fixpoint_and_local_characterizations_agree() {
        let spec = build(
            "vars x: nat, d: addr, m: msg\n\
             process A: receive(m) . ((<x = 0> . unicast(d, m) |> call(A) <| [[x := 1]] . call(B)) \
             (+) (<x >= 1> @1 . call(B)))\n\
             process B: send(m) . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        assert_eq!(ctl.cterms(), ctl.cterms_via_local());
    }

    #[test]
    fn control_terms_are_prefix_headed_subterms() {
        let spec = build(
            "vars x: nat\n\
             process A: ([[x := 0]] . call(A)) (+) ([[x := 1]] @0 . <x = 1> . call(A))",
        );
        let ctl = Control::new(&spec).unwrap();
        let subterms = spec.subterms();
        for t in ctl.cterms() {
            let node = spec.node(t);
            assert!(node.is_prefix());
            assert!(subterms.contains(&t));
        }
    }

    #[test]
    fn labels_of_a_consistently_annotated_choice_is_a_singleton() {
        let spec = build(
            "vars x: nat\n\
             process A: (<x = 0> . call(A)) (+) (<x >= 1> @0 . call(A))",
        );
        let ctl = Control::new(&spec).unwrap();
        let body = spec.proc_body(crate::syntax::ProcId(0));
        assert_eq!(ctl.labels_of(body).len(), 1);
        assert!(ctl.check_simple_labels());
    }

    #[test]
    fn unannotated_choice_fails_the_simple_labels_check() {
        let spec = build(
            "vars x: nat\n\
             process A: (<x = 0> . call(A)) (+) (<x >= 1> . call(A))",
        );
        let ctl = Control::new(&spec).unwrap();
        assert!(!ctl.check_simple_labels());
    }

    #[test]
    fn process_bodies_are_control_within() {
        let spec = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(A)",
        );
        let ctl = Control::new(&spec).unwrap();
        let bodies: Vec<TermId> = spec.processes().map(|(_, _, b)| b).collect();
        assert!(ctl.check_control_within(&bodies));
    }

    #[test]
    fn direct_call_detection_matches_wellformedness_on_offenders() {
        let bad = build(
            "vars x: nat\n\
             process A: ([[x := 0]] . call(A)) (+) call(A)",
        );
        assert!(!no_direct_calls(&bad));
        let good = build(
            "vars x: nat\n\
             process A: [[x := 0]] . call(A)",
        );
        assert!(no_direct_calls(&good));
        assert!(wellformed(&good));
    }
}
