//! Expression, guard and assignment evaluation.
//!
//! Evaluation is total on type-correct states; anything else is an
//! [`EvalError`], which callers surface as a model failure rather than
//! silently pruning a transition.

use thiserror::Error;

use super::domains::DomainConfig;
use super::expr::{Assignment, BindSource, Cmp, CmpOp, Expr, Guard, MsgField};
use super::state::{DataState, VarId, VarTable};
use super::value::{Addr, Message, Value};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        expected: &'static str,
        found: String,
    },
    #[error("projection .{field} applied to {found}")]
    BadProjection { field: &'static str, found: String },
}

pub type EvalResult<T> = Result<T, EvalError>;

fn as_nat(v: Value) -> EvalResult<u64> {
    match v {
        Value::Nat(n) => Ok(n),
        other => Err(EvalError::TypeMismatch {
            expected: "nat",
            found: other.to_string(),
        }),
    }
}

fn as_addr(v: Value) -> EvalResult<Addr> {
    match v {
        Value::Addr(a) => Ok(a),
        other => Err(EvalError::TypeMismatch {
            expected: "addr",
            found: other.to_string(),
        }),
    }
}

pub fn eval_expr(dom: &DomainConfig, xi: &DataState, e: &Expr) -> EvalResult<Value> {
    match e {
        Expr::Var(v) => Ok(xi.get(*v).clone()),
        Expr::Nat(n) => Ok(Value::Nat(dom.sat(*n))),
        Expr::Addr(a) => Ok(Value::Addr(*a)),
        Expr::NoneLit => Ok(Value::None),
        Expr::Plus(a, b) => {
            let x = as_nat(eval_expr(dom, xi, a)?)?;
            let y = as_nat(eval_expr(dom, xi, b)?)?;
            Ok(Value::Nat(dom.sat(x.saturating_add(y))))
        }
        Expr::Max(a, b) => {
            let x = as_nat(eval_expr(dom, xi, a)?)?;
            let y = as_nat(eval_expr(dom, xi, b)?)?;
            Ok(Value::Nat(x.max(y)))
        }
        Expr::Cond(c, a, b) => {
            if eval_cmp(dom, xi, c)? {
                eval_expr(dom, xi, a)
            } else {
                eval_expr(dom, xi, b)
            }
        }
        Expr::Pkt { data, src } => {
            let d = as_nat(eval_expr(dom, xi, data)?)?;
            let s = as_addr(eval_expr(dom, xi, src)?)?;
            Ok(Value::Msg(Message::Pkt { data: d, src: s }))
        }
        Expr::NewPkt { data, dst } => {
            let d = as_nat(eval_expr(dom, xi, data)?)?;
            let a = as_addr(eval_expr(dom, xi, dst)?)?;
            Ok(Value::Msg(Message::NewPkt { data: d, dst: a }))
        }
        Expr::Proj(m, field) => {
            let mv = eval_expr(dom, xi, m)?;
            let msg = match mv {
                Value::Msg(msg) => msg,
                other => {
                    return Err(EvalError::BadProjection {
                        field: field.name(),
                        found: other.to_string(),
                    })
                }
            };
            match (msg, field) {
                (Message::Pkt { data, .. }, MsgField::Data)
                | (Message::NewPkt { data, .. }, MsgField::Data) => Ok(Value::Nat(data)),
                (Message::Pkt { src, .. }, MsgField::Src) => Ok(Value::Addr(src)),
                (Message::NewPkt { dst, .. }, MsgField::Dst) => Ok(Value::Addr(dst)),
                (m, f) => Err(EvalError::BadProjection {
                    field: f.name(),
                    found: m.to_string(),
                }),
            }
        }
        Expr::SetLit(es) => {
            let mut set = std::collections::BTreeSet::new();
            for e in es {
                set.insert(as_addr(eval_expr(dom, xi, e)?)?);
            }
            Ok(Value::Set(set))
        }
    }
}

pub fn eval_cmp(dom: &DomainConfig, xi: &DataState, c: &Cmp) -> EvalResult<bool> {
    let l = eval_expr(dom, xi, &c.lhs)?;
    let r = eval_expr(dom, xi, &c.rhs)?;
    match c.op {
        CmpOp::Eq => match (&l, &r) {
            (Value::Nat(a), Value::Nat(b)) => Ok(a == b),
            (Value::Addr(a), Value::Addr(b)) => Ok(a == b),
            (Value::Msg(a), Value::Msg(b)) => Ok(a == b),
            (Value::Set(a), Value::Set(b)) => Ok(a == b),
            (Value::None, Value::None) => Ok(true),
            // A cleared message variable compares unequal to any message.
            (Value::None, Value::Msg(_)) | (Value::Msg(_), Value::None) => Ok(false),
            _ => Err(EvalError::TypeMismatch {
                expected: "comparable values of one type",
                found: format!("{l} = {r}"),
            }),
        },
        CmpOp::Le | CmpOp::Lt | CmpOp::Ge => {
            let (a, b) = match (&l, &r) {
                (Value::Nat(a), Value::Nat(b)) => (*a, *b),
                (Value::Addr(a), Value::Addr(b)) => (a.0, b.0),
                _ => {
                    return Err(EvalError::TypeMismatch {
                        expected: "two nats or two addrs",
                        found: format!("{} {} {}", l, c.op.symbol(), r),
                    })
                }
            };
            Ok(match c.op {
                CmpOp::Le => a <= b,
                CmpOp::Lt => a < b,
                CmpOp::Ge => a >= b,
                CmpOp::Eq => unreachable!(),
            })
        }
    }
}

/// Evaluate a guard: the resulting set of extended data states, sorted and
/// deduplicated. Its size is bounded by the product of the binder domain
/// sizes (a plain test yields zero or one state).
pub fn eval_guard(dom: &DomainConfig, xi: &DataState, g: &Guard) -> EvalResult<Vec<DataState>> {
    let mut out = match g {
        Guard::Test(c) => {
            if eval_cmp(dom, xi, c)? {
                vec![xi.clone()]
            } else {
                vec![]
            }
        }
        Guard::Bind(binds) => {
            let mut states = vec![xi.clone()];
            for (var, src) in binds {
                let candidates: Vec<Value> = match src {
                    BindSource::NatDomain => dom.nats().map(Value::Nat).collect(),
                    BindSource::AddrDomain => {
                        dom.address_domain().into_iter().map(Value::Addr).collect()
                    }
                    BindSource::Expr(e) => match eval_expr(dom, xi, e)? {
                        Value::Set(s) => s.into_iter().map(Value::Addr).collect(),
                        v => vec![v],
                    },
                };
                let mut next = Vec::with_capacity(states.len() * candidates.len());
                for st in &states {
                    for v in &candidates {
                        next.push(st.with(*var, v.clone()));
                    }
                }
                states = next;
            }
            states
        }
        Guard::IsPkt { msg, num, sip } => match xi.get(*msg) {
            Value::Msg(Message::Pkt { data, src }) => {
                let mut st = xi.clone();
                st.set(*num, Value::Nat(*data));
                st.set(*sip, Value::Addr(*src));
                vec![st]
            }
            _ => vec![],
        },
        Guard::IsNewPkt { msg, num } => match xi.get(*msg) {
            Value::Msg(Message::NewPkt { data, .. }) => {
                vec![xi.with(*num, Value::Nat(*data))]
            }
            _ => vec![],
        },
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// Apply a simultaneous update: all right-hand sides are evaluated in `xi`,
/// then written at once, so `[[x := y, y := x]]` swaps.
pub fn apply_assignment(
    dom: &DomainConfig,
    xi: &DataState,
    u: &Assignment,
) -> EvalResult<DataState> {
    let mut written: Vec<(VarId, Value)> = Vec::with_capacity(u.0.len());
    for (var, e) in &u.0 {
        written.push((*var, eval_expr(dom, xi, e)?));
    }
    let mut next = xi.clone();
    for (var, v) in written {
        next.set(var, v);
    }
    Ok(next)
}

/// Enumerate every data state over the declared variables, optionally fixing
/// some variables to given values. Used by proof-obligation generation.
pub fn enumerate_states(
    dom: &DomainConfig,
    vars: &VarTable,
    fixed: &[(VarId, Value)],
) -> Vec<DataState> {
    let mut states = vec![Vec::with_capacity(vars.len())];
    for (id, _, ty) in vars.iter() {
        let candidates: Vec<Value> = match fixed.iter().find(|(f, _)| *f == id) {
            Some((_, v)) => vec![v.clone()],
            None => dom.values_of_type(ty),
        };
        let mut next = Vec::with_capacity(states.len() * candidates.len());
        for st in &states {
            for v in &candidates {
                let mut s = st.clone();
                s.push(v.clone());
                next.push(s);
            }
        }
        states = next;
    }
    states.into_iter().map(DataState::new).collect()
}
