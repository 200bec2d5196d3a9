//! Term representation, expression language, and concrete syntax.

pub mod domains;
pub mod eval;
pub mod expr;
pub mod label;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod state;
pub mod term;
pub mod typecheck;
pub mod value;

pub use domains::DomainConfig;
pub use eval::{apply_assignment, enumerate_states, eval_expr, eval_guard, EvalError};
pub use expr::{Assignment, BindSource, Cmp, CmpOp, Expr, Guard, MsgField};
pub use label::{label_spec, LabelError};
pub use parser::{parse_spec, ParseError};
pub use pretty::{render_head, render_spec, render_term};
pub use state::{DataState, VarId, VarTable, VarType};
pub use term::{Label, ProcId, Specification, TermArena, TermId, TermNode};
pub use typecheck::{check_spec, TypeError};
pub use value::{Addr, Message, Value};
