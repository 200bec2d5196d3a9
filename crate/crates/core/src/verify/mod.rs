//! Checking engines over the semantics: bounded-exhaustive exploration,
//! invariant checking with replayable counterexample traces, verification
//! conditions discharged per control term, open-system exploration under
//! explicit environment assumptions, compositional lifting of open
//! invariants through the layer stack, simulation between the standard and
//! open readings, and verdict transfer from open back to closed.

pub mod explore;
pub mod invariant;
pub mod lifting;
pub mod oexplore;
pub mod predicate;
pub mod simulation;
pub mod trace;
pub mod transfer;
pub mod vc;

pub use explore::{explore, successors, worker_count, Bounds, ExploreResult, Explored};
pub use invariant::{check_invariant, check_step_invariant, Outcome};
pub use lifting::{
    base_assumption, lift_closed, lift_node, lift_pnet, lift_qmsg, Layer, LiftingInputs,
    LiftingReport, Premise,
};
pub use oexplore::{
    check_open_invariant, oexplore, oreplay, osuccessors, otrace_to, outcome_of, OExploreResult,
    OExplored,
};
pub use predicate::{ActionFilter, OpenPredicate, StatePredicate, StepPredicate};
pub use simulation::{
    check_simulation, closed_splitter, local_splitter, net_splitter, seq_splitter,
    SimulationVerdict, Splitter,
};
pub use trace::{fnv1a, replay, ReplayError, Trace, TraceStep};
pub use transfer::{check_transfer, TransferReport};
pub use vc::{
    all_pass, generate_vcs, LabelledPredicate, Obligation, ObligationVerdict, StepSchema, VcError,
};
