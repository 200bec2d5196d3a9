//! Executable standard semantics, layer by layer: sequential processes,
//! the queue-composed local process, addressed nodes, partial networks,
//! and closed networks with budgeted packet injection.

pub mod action;
pub mod automaton;
pub mod closed;
pub mod local;
pub mod model;
pub mod net;
pub mod node;
pub mod scenario;
pub mod seq;

pub use action::Action;
pub use automaton::{Automaton, StepError, StepResult};
pub use closed::{cnet_step, Budget, ClosedAutomaton, ClosedState};
pub use local::{local_step, LocalAutomaton, LocalState};
pub use model::{Model, ModelError};
pub use net::{initial_net_states, net_nodes, pnet_step, NetState, PnetAutomaton};
pub use node::{node_step, NodeAutomaton, NodeState};
pub use scenario::{parse_scenario, NetTree, ProcessShape, Scenario, ScenarioError, Topology};
pub use seq::{seq_step, SeqAutomaton, SeqState};
