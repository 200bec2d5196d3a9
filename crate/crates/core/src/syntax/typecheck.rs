//! Static type checking of expressions, guards, and updates.
//!
//! Every expression in a specification is checked once, before any
//! exploration, so that evaluation errors cannot surface mid-run: a model
//! either fails here with a location, or evaluates totally on every
//! type-correct data state. The only value without a dedicated variable
//! type is `none`, which inhabits message variables (a cleared mailbox);
//! projections on it are ruled out dynamically, not here.

use thiserror::Error;

use super::expr::{Assignment, BindSource, Cmp, CmpOp, Expr, Guard, MsgField};
use super::state::{VarTable, VarType};
use super::term::{Specification, TermNode};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("in {context}: expected {expected}, found {found}")]
    Mismatch {
        context: String,
        expected: VarType,
        found: VarType,
    },
    #[error("in {context}: branches of a conditional have types {left} and {right}")]
    BranchMismatch {
        context: String,
        left: VarType,
        right: VarType,
    },
    #[error("in {context}: values of type {found} cannot be ordered")]
    Unordered { context: String, found: VarType },
}

type TcResult<T> = Result<T, TypeError>;

struct Checker<'a> {
    vars: &'a VarTable,
    context: String,
}

impl<'a> Checker<'a> {
    fn mismatch(&self, expected: VarType, found: VarType) -> TypeError {
        TypeError::Mismatch {
            context: self.context.clone(),
            expected,
            found,
        }
    }

    fn infer(&self, e: &Expr) -> TcResult<VarType> {
        match e {
            Expr::Var(v) => Ok(self.vars.ty(*v)),
            Expr::Nat(_) => Ok(VarType::Nat),
            Expr::Addr(_) => Ok(VarType::Addr),
            Expr::NoneLit => Ok(VarType::Msg),
            Expr::Plus(a, b) | Expr::Max(a, b) => {
                self.check(a, VarType::Nat)?;
                self.check(b, VarType::Nat)?;
                Ok(VarType::Nat)
            }
            Expr::Cond(c, a, b) => {
                self.check_cmp(c)?;
                let left = self.infer(a)?;
                let right = self.infer(b)?;
                if left != right {
                    return Err(TypeError::BranchMismatch {
                        context: self.context.clone(),
                        left,
                        right,
                    });
                }
                Ok(left)
            }
            Expr::Pkt { data, src } => {
                self.check(data, VarType::Nat)?;
                self.check(src, VarType::Addr)?;
                Ok(VarType::Msg)
            }
            Expr::NewPkt { data, dst } => {
                self.check(data, VarType::Nat)?;
                self.check(dst, VarType::Addr)?;
                Ok(VarType::Msg)
            }
            Expr::Proj(m, field) => {
                self.check(m, VarType::Msg)?;
                match field {
                    MsgField::Data => Ok(VarType::Nat),
                    MsgField::Src | MsgField::Dst => Ok(VarType::Addr),
                }
            }
            Expr::SetLit(items) => {
                for item in items {
                    self.check(item, VarType::Addr)?;
                }
                Ok(VarType::Set)
            }
        }
    }

    fn check(&self, e: &Expr, expected: VarType) -> TcResult<()> {
        let found = self.infer(e)?;
        if found != expected {
            return Err(self.mismatch(expected, found));
        }
        Ok(())
    }

    fn check_cmp(&self, c: &Cmp) -> TcResult<()> {
        let left = self.infer(&c.lhs)?;
        let right = self.infer(&c.rhs)?;
        if left != right {
            return Err(self.mismatch(left, right));
        }
        match c.op {
            CmpOp::Eq => Ok(()),
            CmpOp::Le | CmpOp::Lt | CmpOp::Ge => match left {
                VarType::Nat | VarType::Addr => Ok(()),
                other => Err(TypeError::Unordered {
                    context: self.context.clone(),
                    found: other,
                }),
            },
        }
    }

    fn check_guard(&self, g: &Guard) -> TcResult<()> {
        match g {
            Guard::Test(c) => self.check_cmp(c),
            Guard::Bind(binds) => {
                for (v, src) in binds {
                    let want = self.vars.ty(*v);
                    match src {
                        BindSource::NatDomain => {
                            if want != VarType::Nat {
                                return Err(self.mismatch(VarType::Nat, want));
                            }
                        }
                        BindSource::AddrDomain => {
                            if want != VarType::Addr {
                                return Err(self.mismatch(VarType::Addr, want));
                            }
                        }
                        BindSource::Expr(e) => {
                            let found = self.infer(e)?;
                            // binding from a set draws addresses from it
                            let produced = if found == VarType::Set {
                                VarType::Addr
                            } else {
                                found
                            };
                            if produced != want {
                                return Err(self.mismatch(want, produced));
                            }
                        }
                    }
                }
                Ok(())
            }
            Guard::IsPkt { msg, num, sip } => {
                self.check_var(*msg, VarType::Msg)?;
                self.check_var(*num, VarType::Nat)?;
                self.check_var(*sip, VarType::Addr)
            }
            Guard::IsNewPkt { msg, num } => {
                self.check_var(*msg, VarType::Msg)?;
                self.check_var(*num, VarType::Nat)
            }
        }
    }

    fn check_var(&self, v: super::state::VarId, expected: VarType) -> TcResult<()> {
        let found = self.vars.ty(v);
        if found != expected {
            return Err(self.mismatch(expected, found));
        }
        Ok(())
    }

    fn check_assignment(&self, u: &Assignment) -> TcResult<()> {
        for (v, e) in &u.0 {
            self.check(e, self.vars.ty(*v))?;
        }
        Ok(())
    }
}

fn subterms_of(spec: &Specification, body: super::term::TermId) -> Vec<super::term::TermId> {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![body];
    while let Some(t) = stack.pop() {
        if seen.insert(t) {
            stack.extend(spec.node(t).children());
        }
    }
    seen.into_iter().collect()
}

/// Check every expression of every process body.
pub fn check_spec(spec: &Specification) -> TcResult<()> {
    for (_, name, body) in spec.processes() {
        for t in subterms_of(spec, body) {
            let mut ck = Checker {
                vars: &spec.vars,
                context: format!("process {}", name),
            };
            match spec.node(t) {
                TermNode::Assign { update, .. } => {
                    ck.context = format!("process {}, an update", name);
                    ck.check_assignment(update)?;
                }
                TermNode::Guard { guard, .. } => {
                    ck.context = format!("process {}, a guard", name);
                    ck.check_guard(guard)?;
                }
                TermNode::Broadcast { msg, .. } => {
                    ck.context = format!("process {}, broadcast", name);
                    ck.check(msg, VarType::Msg)?;
                }
                TermNode::Groupcast { dests, msg, .. } => {
                    ck.context = format!("process {}, groupcast", name);
                    ck.check(dests, VarType::Set)?;
                    ck.check(msg, VarType::Msg)?;
                }
                TermNode::Unicast { dest, msg, .. } => {
                    ck.context = format!("process {}, unicast", name);
                    ck.check(dest, VarType::Addr)?;
                    ck.check(msg, VarType::Msg)?;
                }
                TermNode::Send { msg, .. } => {
                    ck.context = format!("process {}, send", name);
                    ck.check(msg, VarType::Msg)?;
                }
                TermNode::Receive { var, .. } => {
                    ck.context = format!("process {}, receive", name);
                    ck.check_var(*var, VarType::Msg)?;
                }
                TermNode::Deliver { data, .. } => {
                    ck.context = format!("process {}, deliver", name);
                    ck.check(data, VarType::Nat)?;
                }
                TermNode::Choice { .. } | TermNode::Call { .. } => {}
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_spec;
    use super::*;

    #[test]
    fn well_typed_spec_passes() {
        let spec = parse_spec(
            "vars x: nat, d: addr, m: msg, g: set\n\
             process A: receive(m) . <m.data <= x> . groupcast(g, pkt(x, d)) . call(A)",
        )
        .unwrap();
        check_spec(&spec).unwrap();
    }

    #[test]
    fn address_assigned_a_nat_is_rejected() {
        let spec = parse_spec(
            "vars d: addr\n\
             process A: [[d := 3]] . call(A)",
        )
        .unwrap();
        let err = check_spec(&spec).unwrap_err();
        assert!(matches!(err, TypeError::Mismatch { expected: VarType::Addr, found: VarType::Nat, .. }));
    }

    #[test]
    fn none_only_fits_message_variables() {
        let good = parse_spec(
            "vars m: msg\n\
             process A: [[m := none]] . call(A)",
        )
        .unwrap();
        check_spec(&good).unwrap();
        let bad = parse_spec(
            "vars x: nat\n\
             process A: [[x := none]] . call(A)",
        )
        .unwrap();
        assert!(check_spec(&bad).is_err());
    }

    #[test]
    fn messages_cannot_be_ordered() {
        let spec = parse_spec(
            "vars m: msg\n\
             process A: <m <= m> . call(A)",
        )
        .unwrap();
        assert!(matches!(
            check_spec(&spec).unwrap_err(),
            TypeError::Unordered { .. }
        ));
    }

    #[test]
    fn binding_from_a_set_yields_addresses() {
        let spec = parse_spec(
            "vars d: addr, g: set\n\
             process A: <d <- g> . call(A)",
        )
        .unwrap();
        check_spec(&spec).unwrap();
    }

    #[test]
    fn receive_variable_must_be_a_message() {
        let spec = parse_spec(
            "vars x: nat\n\
             process A: receive(x) . call(A)",
        )
        .unwrap();
        assert!(check_spec(&spec).is_err());
    }
}
