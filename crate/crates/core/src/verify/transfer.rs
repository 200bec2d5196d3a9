//! Transfer of verdicts between the closed standard semantics and its open
//! counterpart: every reachable standard state must appear, through the
//! valuation/tree split, among the open-reachable states, so that an open
//! verdict pulls back to a concrete one.

use std::collections::HashSet;

use crate::open::{
    global_view, lift_net, EnvAssumption, EnvGenerator, OpenClosedAutomaton, OpenClosedLocal,
};
use crate::semantics::{ClosedAutomaton, Model, StepError};

use super::explore::{explore, Bounds};
use super::oexplore::oexplore;
use super::predicate::{ActionFilter, OpenPredicate};

/// What the transfer check found.
#[derive(Debug)]
pub struct TransferReport {
    pub standard_states: usize,
    pub open_states: usize,
    /// A reachable standard state missing on the open side, if any.
    pub inclusion_failure: Option<String>,
    /// A reachable standard state whose open reading fails the predicate.
    pub pullback_failure: Option<String>,
    /// Set when either side could not be fully explored.
    pub bound: Option<String>,
}

impl TransferReport {
    pub fn pass(&self) -> bool {
        self.inclusion_failure.is_none() && self.pullback_failure.is_none() && self.bound.is_none()
    }
}

impl std::fmt::Display for TransferReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} standard states against {} open states: ",
            self.standard_states, self.open_states
        )?;
        match (&self.inclusion_failure, &self.pullback_failure, &self.bound) {
            (None, None, None) => write!(f, "included, predicate pulls back"),
            (Some(w), _, _) => write!(f, "missing on the open side: {w}"),
            (_, Some(w), _) => write!(f, "predicate fails at: {w}"),
            (_, _, Some(b)) => write!(f, "undecided: {b}"),
        }
    }
}

/// Explore both sides, check state inclusion through the split, and pull
/// the open predicate back onto the standard reachable set.
pub fn check_transfer(
    model: &Model,
    env: &EnvAssumption,
    gen: &EnvGenerator,
    pred: &OpenPredicate<OpenClosedLocal>,
    bounds: &Bounds,
) -> Result<TransferReport, StepError> {
    let standard = ClosedAutomaton::new(model);
    let open = OpenClosedAutomaton::new(model);

    let std_result = explore(&standard, &ActionFilter::all(), bounds)?;
    let open_result = oexplore(&open, env, gen, bounds)?;
    let std_ex = std_result.explored();
    let open_ex = open_result.explored();

    let mut report = TransferReport {
        standard_states: std_ex.states.len(),
        open_states: open_ex.states.len(),
        inclusion_failure: None,
        pullback_failure: None,
        bound: std_result
            .bound()
            .map(|b| format!("standard side: {b}"))
            .or_else(|| open_result.bound().map(|b| format!("open side: {b}"))),
    };

    let open_set: HashSet<_> = open_ex.states.iter().collect();
    for (idx, s) in std_ex.states.iter().enumerate() {
        let split = (
            global_view(model, &s.net),
            OpenClosedLocal {
                net: lift_net(&s.net),
                budget: s.budget.clone(),
            },
        );
        if report.inclusion_failure.is_none() && !open_set.contains(&split) {
            report.inclusion_failure = Some(std_ex.renders[idx].clone());
        }
        if report.pullback_failure.is_none() && !pred.holds(&split.0, &split.1) {
            report.pullback_failure = Some(std_ex.renders[idx].clone());
        }
        if report.inclusion_failure.is_some() && report.pullback_failure.is_some() {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open::OpenAutomaton;
    use crate::syntax::Value;

    const FORWARD: &str = "\
vars msg: msg, num: nat, sip: addr
process P:
    receive(msg) .
    ( < is_newpkt > . broadcast(pkt(num, sip)) . call(P)
    (+) < is_pkt > . call(P) )
";

    fn model() -> Model {
        Model::build(
            FORWARD,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\ninject = [(1, 0, 2)]\n",
        )
        .unwrap()
    }

    #[test]
    fn closed_standard_states_all_reappear_on_the_open_side() {
        let m = model();
        let open = OpenClosedAutomaton::new(&m);
        let env = EnvAssumption::frozen(open.owned());
        let trivial = OpenPredicate::new("true", |_, _: &OpenClosedLocal| true);
        let report =
            check_transfer(&m, &env, &EnvGenerator::empty(), &trivial, &Bounds::default()).unwrap();
        assert!(report.pass(), "{report}");
        assert!(report.standard_states > 1);
        // the open side may hold more states than the standard projection,
        // never fewer
        assert!(report.open_states >= report.standard_states);
    }

    fn model_data_one() -> Model {
        Model::build(
            FORWARD,
            "net = (1 : {2}) || (2 : {1})\ndata_max = 1\nprocess = seq\ninject = [(1, 1, 2)]\n",
        )
        .unwrap()
    }

    #[test]
    fn a_failing_open_predicate_names_a_concrete_state() {
        let m = model_data_one();
        let open = OpenClosedAutomaton::new(&m);
        let env = EnvAssumption::frozen(open.owned());
        let num = m.spec.vars.lookup("num").unwrap();
        // fails once the injected packet is consumed and num is bound
        let pred = OpenPredicate::new("num stays 0 at 2", move |sigma: &_, _: &OpenClosedLocal| {
            *sigma.get(crate::syntax::Addr(2)).get(num) == Value::Nat(0)
        });
        let report =
            check_transfer(&m, &env, &EnvGenerator::empty(), &pred, &Bounds::default()).unwrap();
        assert!(!report.pass());
        assert!(report.inclusion_failure.is_none());
        assert!(report.pullback_failure.is_some());
    }

    #[test]
    fn bounds_on_either_side_block_the_verdict() {
        let m = model();
        let open = OpenClosedAutomaton::new(&m);
        let env = EnvAssumption::frozen(open.owned());
        let trivial = OpenPredicate::new("true", |_, _: &OpenClosedLocal| true);
        let report = check_transfer(
            &m,
            &env,
            &EnvGenerator::empty(),
            &trivial,
            &Bounds {
                max_states: 1,
                max_depth: 5,
            },
        )
        .unwrap();
        assert!(!report.pass());
        assert!(report.bound.is_some());
    }
}
