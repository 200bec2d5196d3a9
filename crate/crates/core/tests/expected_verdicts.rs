//! Replays the recorded verdict table against the bundled corpus.
//!
//! Each manifest line names a model, a scenario, an engine, a predicate,
//! and whether the invariant holds. Failing combinations must come with a
//! counterexample that replays step by step on a fresh automaton.

use awn_core::semantics::{ClosedAutomaton, LocalAutomaton, Model};
use awn_core::toy::{model_source, scenario_source, ToySuite, EXPECTED_VERDICTS};
use awn_core::verify::{
    check_invariant, check_step_invariant, replay, ActionFilter, Bounds, Outcome,
};

struct Case {
    model: &'static str,
    scenario: &'static str,
    engine: &'static str,
    predicate: &'static str,
    holds: bool,
}

fn manifest() -> Vec<Case> {
    EXPECTED_VERDICTS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&'static str> = l.split_whitespace().collect();
            assert_eq!(f.len(), 5, "malformed manifest line: {l}");
            Case {
                model: f[0],
                scenario: f[1],
                engine: f[2],
                predicate: f[3],
                holds: match f[4] {
                    "holds" => true,
                    "fails" => false,
                    other => panic!("bad verdict `{other}` in: {l}"),
                },
            }
        })
        .collect()
}

fn run(case: &Case) -> Outcome {
    let model = Model::build(
        model_source(case.model).expect("unknown model in manifest"),
        scenario_source(case.scenario).expect("unknown scenario in manifest"),
    )
    .unwrap();
    let suite = ToySuite::new(&model).unwrap();
    let filter = ActionFilter::all();
    let bounds = Bounds::default();
    match case.engine {
        "local" => {
            let addr = model.scenario.net.addrs()[0];
            let auto = LocalAutomaton::new(&model, addr);
            if let Some(p) = suite.local_state(case.predicate) {
                let outcome = check_invariant(&auto, &p, &filter, &bounds).unwrap();
                if let Some(t) = outcome.counterexample() {
                    replay(&auto, t).unwrap();
                }
                outcome
            } else if let Some(p) = suite.local_step(case.predicate) {
                let outcome = check_step_invariant(&auto, &p, &filter, &bounds).unwrap();
                if let Some(t) = outcome.counterexample() {
                    replay(&auto, t).unwrap();
                }
                outcome
            } else {
                panic!("no local predicate `{}`", case.predicate);
            }
        }
        "closed" => {
            let auto = ClosedAutomaton::new(&model);
            if let Some(p) = suite.closed_state(case.predicate) {
                let outcome = check_invariant(&auto, &p, &filter, &bounds).unwrap();
                if let Some(t) = outcome.counterexample() {
                    replay(&auto, t).unwrap();
                }
                outcome
            } else if let Some(p) = suite.closed_step(case.predicate) {
                let outcome = check_step_invariant(&auto, &p, &filter, &bounds).unwrap();
                if let Some(t) = outcome.counterexample() {
                    replay(&auto, t).unwrap();
                }
                outcome
            } else {
                panic!("no closed predicate `{}`", case.predicate);
            }
        }
        other => panic!("unknown engine `{other}` in manifest"),
    }
}

#[test]
fn every_recorded_verdict_still_comes_out() {
    // [DERIVED] the holds/fails column was fixed from the protocol
    // argument for each predicate (monotone floods for the honest model,
    // the specific break for each variant) before the first run.
    for case in manifest() {
        let outcome = run(&case);
        assert_eq!(
            outcome.holds(),
            case.holds,
            "{} / {} / {} / {}: got {outcome}",
            case.model,
            case.scenario,
            case.engine,
            case.predicate
        );
        if !case.holds {
            assert!(outcome.counterexample().is_some());
        }
    }
}

#[test]
fn the_manifest_covers_every_bundled_model() {
    let cases = manifest();
    for name in ["toy", "no_nhip_reset", "overwrite_no", "stale_sender"] {
        assert!(cases.iter().any(|c| c.model == name), "{name} untested");
    }
    // Each broken variant is caught by at least one failing combination.
    for name in ["no_nhip_reset", "overwrite_no", "stale_sender"] {
        assert!(cases.iter().any(|c| c.model == name && !c.holds));
    }
}
