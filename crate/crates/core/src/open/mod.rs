//! The open model: the same protocol stack read against a global state it
//! only partially owns, with explicit environment assumptions.
//!
//! A standard state splits into a global valuation map σ plus a purely
//! local remainder (control, queues, ranges, budget). Open transitions
//! update exactly the owned σ entries; what the environment may do to the
//! rest is declared as a synchronising/interleaving assumption pair and
//! applied by the exploration engine, never baked into the step rules.

pub mod closed;
pub mod env;
pub mod global;
pub mod local;
pub mod net;
pub mod node;
pub mod step;

pub use closed::{open_cnet_step, render_open_closed, OpenClosedAutomaton, OpenClosedLocal};
pub use env::{
    ActionPred, EnvAssumption, EnvGenerator, InterleaveAssumption, MsgPred, OAction, StateRel,
    SyncAssumption,
};
pub use global::{global_view, GlobalState};
pub use local::{
    initial_open_local, open_local_step, render_open_local, OpenLocal, OpenLocalAutomaton,
};
pub use net::{
    initial_open_net, lift_net, open_net_saturated, open_pnet_step, render_open_net, OpenNet,
    OpenPnetAutomaton,
};
pub use node::{open_node_step, render_open_node, OpenNode, OpenNodeAutomaton};
pub use step::{
    identity_updates, initial_globals, open_seq_step, union_updates, OpenAutomaton,
    OpenSeqAutomaton, OpenTransition,
};
