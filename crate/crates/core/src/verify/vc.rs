//! Verification conditions: prove a state predicate invariant by local
//! reasoning over control terms instead of global reachability.
//!
//! A predicate here speaks about a data valuation and the control labels it
//! sits at. It is invariant if it holds initially and is preserved by every
//! transition — and preservation can be discharged one control term at a
//! time: for each control term, over *all* valuations satisfying the
//! predicate there (reachable or not), every step must land in a satisfying
//! valuation again. That per-term check is one proof obligation; unicast
//! terms get two, since the delivered and the failed attempt reach
//! different continuations. All obligations passing is strictly stronger
//! than reachability invariance, which the tests demonstrate.

use crate::control::{Control, ControlError};
use crate::semantics::{seq_step, Action, Model, SeqState, StepError};
use crate::syntax::{enumerate_states, Addr, DataState, Label, TermId, TermNode};

/// A predicate over a data valuation at a set of control labels.
pub struct LabelledPredicate {
    pub name: String,
    eval: Box<dyn Fn(&DataState, &[Label]) -> bool + Send + Sync>,
}

impl LabelledPredicate {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&DataState, &[Label]) -> bool + Send + Sync + 'static,
    ) -> Self {
        LabelledPredicate {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    pub fn holds(&self, xi: &DataState, labels: &[Label]) -> bool {
        (self.eval)(xi, labels)
    }
}

/// Which continuation of a control term an obligation covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchema {
    /// All transitions of the term.
    Plain,
    /// Unicast terms only: the delivered attempt.
    UnicastDelivered,
    /// Unicast terms only: the failed attempt.
    UnicastMissed,
}

impl StepSchema {
    fn admits(&self, a: &Action) -> bool {
        match self {
            StepSchema::Plain => true,
            StepSchema::UnicastDelivered => matches!(a, Action::Unicast(..)),
            StepSchema::UnicastMissed => matches!(a, Action::NotUnicast(..)),
        }
    }
}

/// One proof obligation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obligation {
    /// Every initial valuation satisfies the predicate at the entry labels.
    Init,
    /// Every satisfying valuation at this control term steps (through the
    /// schema's transitions) into a satisfying successor.
    Step { cterm: TermId, schema: StepSchema },
}

/// An obligation together with its check result.
#[derive(Debug)]
pub struct ObligationVerdict {
    pub obligation: Obligation,
    pub description: String,
    pub pass: bool,
    /// A falsifying valuation and step, when the obligation fails.
    pub witness: Option<String>,
}

/// Why verification conditions could not even be generated.
#[derive(Debug, thiserror::Error)]
pub enum VcError {
    #[error("specification fails the control side conditions: {0}")]
    Control(#[from] ControlError),
    #[error("labelling is not simple: some control term or choice carries more than one label")]
    LabelsNotSimple,
    #[error("control escapes the analysed term set from the entry body")]
    ControlEscapes,
    #[error("stepping failed while checking an obligation: {0}")]
    Step(#[from] StepError),
}

/// Every obligation all-pass of which establishes that `pred` is invariant
/// for the process run at `addr`, checked by brute enumeration of the data
/// domain.
pub fn generate_vcs(
    model: &Model,
    addr: Addr,
    pred: &LabelledPredicate,
) -> Result<Vec<ObligationVerdict>, VcError> {
    let control = Control::new(&model.spec)?;
    if !control.check_simple_labels() {
        return Err(VcError::LabelsNotSimple);
    }
    if !control.check_control_within(&[model.entry_body()]) {
        return Err(VcError::ControlEscapes);
    }

    let mut verdicts = Vec::new();
    verdicts.push(check_init(model, addr, pred));
    for cterm in control.cterms() {
        for schema in schemas_for(model, cterm) {
            verdicts.push(check_step(model, pred, cterm, schema)?);
        }
    }
    Ok(verdicts)
}

pub fn all_pass(verdicts: &[ObligationVerdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

fn schemas_for(model: &Model, cterm: TermId) -> Vec<StepSchema> {
    match model.spec.node(cterm) {
        TermNode::Unicast { .. } => vec![StepSchema::UnicastDelivered, StepSchema::UnicastMissed],
        _ => vec![StepSchema::Plain],
    }
}

fn check_init(model: &Model, addr: Addr, pred: &LabelledPredicate) -> ObligationVerdict {
    let entry = model.entry_body();
    let labels = model.labels_at(entry);
    let mut witness = None;
    for xi in model.init_states(addr) {
        if !pred.holds(&xi, labels) {
            witness = Some(format!(
                "initial valuation {} at {}",
                xi.render(model.vars()),
                model.render_labels(entry)
            ));
            break;
        }
    }
    ObligationVerdict {
        obligation: Obligation::Init,
        description: format!("init at {}", model.render_labels(entry)),
        pass: witness.is_none(),
        witness,
    }
}

fn check_step(
    model: &Model,
    pred: &LabelledPredicate,
    cterm: TermId,
    schema: StepSchema,
) -> Result<ObligationVerdict, VcError> {
    let pre_labels = model.labels_at(cterm);
    let mut witness = None;
    'outer: for xi in enumerate_states(&model.dom, model.vars(), &[]) {
        if !pred.holds(&xi, pre_labels) {
            continue;
        }
        let s = SeqState { xi, ctl: cterm };
        for (a, next) in seq_step(model, &s)? {
            if !schema.admits(&a) {
                continue;
            }
            if !pred.holds(&next.xi, model.labels_at(next.ctl)) {
                witness = Some(format!(
                    "{} at {} --{}--> {} at {}",
                    s.xi.render(model.vars()),
                    model.render_labels(cterm),
                    a,
                    next.xi.render(model.vars()),
                    model.render_labels(next.ctl)
                ));
                break 'outer;
            }
        }
    }
    let suffix = match schema {
        StepSchema::Plain => "",
        StepSchema::UnicastDelivered => " (unicast delivered)",
        StepSchema::UnicastMissed => " (unicast missed)",
    };
    Ok(ObligationVerdict {
        obligation: Obligation::Step { cterm, schema },
        description: format!("step at {}{}", model.render_labels(cterm), suffix),
        pass: witness.is_none(),
        witness,
    })
}
