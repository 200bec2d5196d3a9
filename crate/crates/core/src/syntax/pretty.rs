//! Canonical rendering of specifications back to DSL text.
//!
//! The printer is the inverse of the parser up to whitespace: printing a
//! parsed specification and parsing the result yields a structurally equal
//! term, and printing is a fixpoint on its own output. Abbreviations are
//! printed in expanded form; explicit `@k` annotations are preserved.

use super::expr::{Assignment, BindSource, Cmp, Expr, Guard, MsgField};
use super::state::VarTable;
use super::term::{Specification, TermId, TermNode};

pub fn render_expr(vars: &VarTable, e: &Expr) -> String {
    match e {
        Expr::Var(v) => vars.name(*v).to_string(),
        Expr::Nat(n) => n.to_string(),
        Expr::Addr(a) => format!("addr({})", a.0),
        Expr::NoneLit => "none".to_string(),
        Expr::Plus(a, b) => format!("{} + {}", render_operand(vars, a), render_operand(vars, b)),
        Expr::Max(a, b) => format!("max({}, {})", render_expr(vars, a), render_expr(vars, b)),
        Expr::Cond(c, a, b) => format!(
            "if {} then {} else {}",
            render_cmp(vars, c),
            render_expr(vars, a),
            render_expr(vars, b)
        ),
        Expr::Pkt { data, src } => format!(
            "pkt({}, {})",
            render_expr(vars, data),
            render_expr(vars, src)
        ),
        Expr::NewPkt { data, dst } => format!(
            "newpkt({}, {})",
            render_expr(vars, data),
            render_expr(vars, dst)
        ),
        Expr::Proj(m, f) => {
            let field = match f {
                MsgField::Data => "data",
                MsgField::Src => "src",
                MsgField::Dst => "dst",
            };
            format!("{}.{}", render_operand(vars, m), field)
        }
        Expr::SetLit(items) => {
            let body: Vec<String> = items.iter().map(|e| render_expr(vars, e)).collect();
            format!("{{{}}}", body.join(", "))
        }
    }
}

// operands of + and . need parentheses unless they are atoms
fn render_operand(vars: &VarTable, e: &Expr) -> String {
    match e {
        Expr::Plus(..) | Expr::Cond(..) => format!("({})", render_expr(vars, e)),
        _ => render_expr(vars, e),
    }
}

pub fn render_cmp(vars: &VarTable, c: &Cmp) -> String {
    format!(
        "{} {} {}",
        render_expr(vars, &c.lhs),
        c.op.symbol(),
        render_expr(vars, &c.rhs)
    )
}

pub fn render_guard(vars: &VarTable, g: &Guard) -> String {
    match g {
        Guard::Test(c) => render_cmp(vars, c),
        Guard::Bind(binds) => {
            let parts: Vec<String> = binds
                .iter()
                .map(|(v, src)| {
                    let s = match src {
                        BindSource::NatDomain => "nat".to_string(),
                        BindSource::AddrDomain => "addr".to_string(),
                        BindSource::Expr(e) => render_expr(vars, e),
                    };
                    format!("{} <- {}", vars.name(*v), s)
                })
                .collect();
            parts.join(", ")
        }
        Guard::IsPkt { .. } => "is_pkt".to_string(),
        Guard::IsNewPkt { .. } => "is_newpkt".to_string(),
    }
}

pub fn render_assignment(vars: &VarTable, u: &Assignment) -> String {
    let parts: Vec<String> = u
        .0
        .iter()
        .map(|(v, e)| format!("{} := {}", vars.name(*v), render_expr(vars, e)))
        .collect();
    parts.join(", ")
}

fn hint_suffix(hint: Option<u32>) -> String {
    match hint {
        Some(k) => format!(" @{}", k),
        None => String::new(),
    }
}

/// Render a term; a Choice gets parentheses when it sits where the grammar
/// expects a sequential term (continuations and unicast branches).
pub fn render_term(spec: &Specification, t: TermId) -> String {
    match spec.node(t) {
        TermNode::Choice { left, right } => format!(
            "{} (+) {}",
            render_term(spec, *left),
            render_seq(spec, *right)
        ),
        _ => render_seq(spec, t),
    }
}

fn render_seq(spec: &Specification, t: TermId) -> String {
    let vars = &spec.vars;
    match spec.node(t) {
        TermNode::Choice { .. } => format!("({})", render_term(spec, t)),
        TermNode::Call { proc } => format!("call({})", spec.proc_name(*proc)),
        TermNode::Assign {
            hint, update, next, ..
        } => format!(
            "[[{}]]{} . {}",
            render_assignment(vars, update),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Guard {
            hint, guard, next, ..
        } => format!(
            "<{}>{} . {}",
            render_guard(vars, guard),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Broadcast {
            hint, msg, next, ..
        } => format!(
            "broadcast({}){} . {}",
            render_expr(vars, msg),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Groupcast {
            hint,
            dests,
            msg,
            next,
            ..
        } => format!(
            "groupcast({}, {}){} . {}",
            render_expr(vars, dests),
            render_expr(vars, msg),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Unicast {
            hint,
            dest,
            msg,
            succ,
            fail,
            ..
        } => format!(
            "unicast({}, {}){} |> {} <| {}",
            render_expr(vars, dest),
            render_expr(vars, msg),
            hint_suffix(*hint),
            render_seq(spec, *succ),
            render_seq(spec, *fail)
        ),
        TermNode::Send {
            hint, msg, next, ..
        } => format!(
            "send({}){} . {}",
            render_expr(vars, msg),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Receive {
            hint, var, next, ..
        } => format!(
            "receive({}){} . {}",
            vars.name(*var),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
        TermNode::Deliver {
            hint, data, next, ..
        } => format!(
            "deliver({}){} . {}",
            render_expr(vars, data),
            hint_suffix(*hint),
            render_seq(spec, *next)
        ),
    }
}

/// Render just the head prefix of a term with a trailing ellipsis for its
/// continuations; used in control-term listings.
pub fn render_head(spec: &Specification, t: TermId) -> String {
    let vars = &spec.vars;
    match spec.node(t) {
        TermNode::Choice { .. } => format!("({})", render_term(spec, t)),
        TermNode::Call { proc } => format!("call({})", spec.proc_name(*proc)),
        TermNode::Assign { update, .. } => format!("[[{}]] ...", render_assignment(vars, update)),
        TermNode::Guard { guard, .. } => format!("<{}> ...", render_guard(vars, guard)),
        TermNode::Broadcast { msg, .. } => format!("broadcast({}) ...", render_expr(vars, msg)),
        TermNode::Groupcast { dests, msg, .. } => format!(
            "groupcast({}, {}) ...",
            render_expr(vars, dests),
            render_expr(vars, msg)
        ),
        TermNode::Unicast { dest, msg, .. } => format!(
            "unicast({}, {}) |> ... <| ...",
            render_expr(vars, dest),
            render_expr(vars, msg)
        ),
        TermNode::Send { msg, .. } => format!("send({}) ...", render_expr(vars, msg)),
        TermNode::Receive { var, .. } => format!("receive({}) ...", vars.name(*var)),
        TermNode::Deliver { data, .. } => format!("deliver({}) ...", render_expr(vars, data)),
    }
}

/// Render a whole specification as parseable DSL text.
pub fn render_spec(spec: &Specification) -> String {
    let mut out = String::new();
    let vars = &spec.vars;
    if vars.len() > 0 {
        let decls: Vec<String> = vars
            .iter()
            .map(|(_, name, ty)| format!("{}: {}", name, ty))
            .collect();
        out.push_str(&format!("vars {}\n", decls.join(", ")));
    }
    for (_, name, body) in spec.processes() {
        out.push_str(&format!("process {}: {}\n", name, render_term(spec, body)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_spec;
    use super::*;

    #[test]
    fn printing_is_a_fixpoint() {
        let src = "vars x: nat, d: addr, m: msg\n\
                    process A: receive(m) . <x <- nat, d <- addr> . \
                    unicast(d, pkt(x + 1, d)) @7 |> [[x := max(x, 2)]] . call(A) \
                    <| deliver(x) . call(A)\n";
        let once = render_spec(&parse_spec(src).unwrap());
        let twice = render_spec(&parse_spec(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn choice_nesting_keeps_association() {
        let src = "vars x: nat\n\
                    process A: (<x = 0> . call(A)) (+) (<x = 1> . call(A)) (+) (<x = 2> . call(A))\n";
        let spec = parse_spec(src).unwrap();
        let printed = render_spec(&spec);
        let reparsed = parse_spec(&printed).unwrap();
        assert_eq!(render_spec(&reparsed), printed);
    }

    #[test]
    fn conditional_operand_of_plus_is_parenthesized() {
        let src = "vars x: nat\n\
                    process A: [[x := (if x <= 1 then 1 else 0) + x]] . call(A)\n";
        let spec = parse_spec(src).unwrap();
        let printed = render_spec(&spec);
        assert!(printed.contains("(if x <= 1 then 1 else 0) + x"));
        assert_eq!(render_spec(&parse_spec(&printed).unwrap()), printed);
    }
}
