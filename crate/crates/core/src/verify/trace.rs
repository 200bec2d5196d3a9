//! Counterexample traces: state digests, the witness path, and replay.
//!
//! A trace stores renderings and 64-bit FNV-1a digests of the states along
//! the path. Step functions are deterministic, so replaying the recorded
//! actions from the initial state must reproduce every digest; replay
//! failure means the trace is stale or the semantics changed.

use thiserror::Error;

use crate::semantics::Automaton;

/// 64-bit FNV-1a over a byte string.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One step of a witness path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Rendering of the action taken.
    pub action: String,
    /// Control location after the step, where the layer has one.
    pub label: Option<String>,
    pub digest: u64,
    pub state: String,
}

/// A witness path from an initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: String,
    pub initial_digest: u64,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Multi-line rendering for reports.
    pub fn render(&self) -> String {
        let mut out = format!("initial [{:016x}] {}\n", self.initial_digest, self.initial);
        for s in &self.steps {
            let at = s.label.as_deref().map(|l| format!(" (at {l})")).unwrap_or_default();
            out.push_str(&format!(
                "  --{}--> [{:016x}] {}{}\n",
                s.action, s.digest, s.state, at
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("no initial state with digest {0:016x}")]
    NoInitial(u64),
    #[error("step {index}: no successor via {action} with digest {digest:016x}")]
    NoSuccessor {
        index: usize,
        action: String,
        digest: u64,
    },
    #[error("step failed during replay: {0}")]
    Step(String),
}

/// Re-execute the recorded actions and confirm each digest.
pub fn replay<A: Automaton>(auto: &A, trace: &Trace) -> Result<(), ReplayError> {
    let mut current = auto
        .init()
        .into_iter()
        .find(|s| fnv1a(auto.render_state(s).as_bytes()) == trace.initial_digest)
        .ok_or(ReplayError::NoInitial(trace.initial_digest))?;
    for (index, step) in trace.steps.iter().enumerate() {
        let succs = auto
            .step(&current)
            .map_err(|e| ReplayError::Step(e.to_string()))?;
        current = succs
            .into_iter()
            .find(|(a, s)| {
                a.to_string() == step.action
                    && fnv1a(auto.render_state(s).as_bytes()) == step.digest
            })
            .map(|(_, s)| s)
            .ok_or_else(|| ReplayError::NoSuccessor {
                index,
                action: step.action.clone(),
                digest: step.digest,
            })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_matches_reference_vectors() {
        // [DERIVED] published FNV-1a 64 test vectors
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn rendering_shows_digests_and_labels() {
        let t = Trace {
            initial: "s0".into(),
            initial_digest: 1,
            steps: vec![TraceStep {
                action: "tau".into(),
                label: Some("P-:1".into()),
                digest: 2,
                state: "s1".into(),
            }],
        };
        let r = t.render();
        assert!(r.contains("initial [0000000000000001] s0"));
        assert!(r.contains("--tau--> [0000000000000002] s1 (at P-:1)"));
    }
}
