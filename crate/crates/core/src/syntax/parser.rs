//! Recursive-descent parser for the process description language.
//!
//! ```text
//! spec      := (vardecl | abbrevdef | procdef)+
//! vardecl   := "vars" NAME ":" type ("," NAME ":" type)*
//! abbrevdef := "abbrev" NAME ":" term
//! procdef   := "process" NAME ":" term
//! term      := seq ( "(+)" seq )*                      -- also "⊕"
//! seq       := "(" term ")"
//!            | "call" "(" NAME ")"
//!            | NAME "(" ")"                            -- abbreviation use
//!            | prefix ["@" NAT] "." seq
//!            | "unicast" "(" expr "," expr ")" ["@" NAT] "|>" seq "<|" seq
//! prefix    := "[[" assigns "]]" | "<" guard ">"
//!            | "broadcast" "(" expr ")" | "groupcast" "(" expr "," expr ")"
//!            | "send" "(" expr ")" | "receive" "(" NAME ")"
//!            | "deliver" "(" expr ")"
//! guard     := "is_pkt" | "is_newpkt" | cmp | NAME "<-" source ("," ...)*
//! ```
//!
//! Abbreviations are expanded at parse time; an abbreviation is ordinary
//! syntax for a term (typically a clearing assignment in front of a call).
//! Explicit `@k` indices override the traversal-order numbering applied by
//! [`label_spec`](super::label::label_spec); two choice branches may share an
//! index only by writing it explicitly.

use std::collections::HashMap;

use thiserror::Error;

use super::expr::{Assignment, BindSource, Cmp, CmpOp, Expr, Guard, MsgField};
use super::lexer::{tokenize, LexError, Span, Tok};
use super::state::{VarId, VarTable, VarType};
use super::term::{ProcId, Specification, TermArena, TermId, TermNode};
use super::value::Addr;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{span}: expected {expected}, found {found}")]
    UnexpectedToken {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEof { expected: String },
    #[error("{span}: unknown variable {name}")]
    UnknownVariable { span: Span, name: String },
    #[error("{span}: variable {name} declared twice")]
    DuplicateVariable { span: Span, name: String },
    #[error("{span}: process {name} defined twice")]
    DuplicateProcess { span: Span, name: String },
    #[error("{span}: abbreviation {name} defined twice")]
    DuplicateAbbrev { span: Span, name: String },
    #[error("{span}: unknown abbreviation {name}")]
    UnknownAbbrev { span: Span, name: String },
    #[error("{span}: call of undefined process {name}")]
    UnresolvedCall { span: Span, name: String },
    #[error("{span}: {name} is a reserved word")]
    ReservedWord { span: Span, name: String },
    #[error("{span}: variable {name} assigned twice in one update")]
    DuplicateAssignTarget { span: Span, name: String },
    #[error("{guard} requires a declared variable named {var}")]
    MissingConventionVar { guard: &'static str, var: &'static str },
    #[error("specification defines no process")]
    NoProcesses,
}

pub type ParseResult<T> = Result<T, ParseError>;

const RESERVED: &[&str] = &[
    "process",
    "abbrev",
    "vars",
    "call",
    "broadcast",
    "groupcast",
    "unicast",
    "send",
    "receive",
    "deliver",
    "is_pkt",
    "is_newpkt",
    "pkt",
    "newpkt",
    "addr",
    "none",
    "max",
    "if",
    "then",
    "else",
];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vars: VarTable,
    arena: TermArena,
    procs: Vec<(String, Option<TermId>)>,
    abbrevs: HashMap<String, TermId>,
}

/// Parse a specification. The result is unlabelled; run
/// [`label_spec`](super::label::label_spec) before any semantic use.
pub fn parse_spec(src: &str) -> ParseResult<Specification> {
    let toks = tokenize(src)?;
    // Pre-scan process names so calls may refer forward.
    let mut procs: Vec<(String, Option<TermId>)> = Vec::new();
    for k in 0..toks.len() {
        if let (Tok::Ident(w), span) = &toks[k] {
            if w == "process" {
                if let Some((Tok::Ident(name), _)) = toks.get(k + 1) {
                    if procs.iter().any(|(n, _)| n == name) {
                        return Err(ParseError::DuplicateProcess {
                            span: *span,
                            name: name.clone(),
                        });
                    }
                    procs.push((name.clone(), None));
                }
            }
        }
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars: VarTable::new(),
        arena: TermArena::new(),
        procs,
        abbrevs: HashMap::new(),
    };
    p.spec()?;
    if p.procs.is_empty() {
        return Err(ParseError::NoProcesses);
    }
    let procs = p
        .procs
        .into_iter()
        .map(|(n, b)| (n, b.expect("pre-scanned process parsed")))
        .collect();
    Ok(Specification::new(p.arena, p.vars, procs, false))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(Span { line: 0, col: 0 })
    }

    fn next(&mut self, expected: &str) -> ParseResult<(Tok, Span)> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(ParseError::UnexpectedEof {
                expected: expected.to_string(),
            }),
        }
    }

    fn expect(&mut self, tok: Tok) -> ParseResult<Span> {
        let (t, span) = self.next(&tok.to_string())?;
        if t == tok {
            Ok(span)
        } else {
            Err(ParseError::UnexpectedToken {
                span,
                expected: tok.to_string(),
                found: t.to_string(),
            })
        }
    }

    fn ident(&mut self, expected: &str) -> ParseResult<(String, Span)> {
        let (t, span) = self.next(expected)?;
        match t {
            Tok::Ident(s) => Ok((s, span)),
            other => Err(ParseError::UnexpectedToken {
                span,
                expected: expected.to_string(),
                found: other.to_string(),
            }),
        }
    }

    fn nat(&mut self, expected: &str) -> ParseResult<u64> {
        let (t, span) = self.next(expected)?;
        match t {
            Tok::Nat(n) => Ok(n),
            other => Err(ParseError::UnexpectedToken {
                span,
                expected: expected.to_string(),
                found: other.to_string(),
            }),
        }
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn fresh_name(&mut self, kind: &str) -> ParseResult<(String, Span)> {
        let (name, span) = self.ident(kind)?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::ReservedWord { span, name });
        }
        Ok((name, span))
    }

    fn var(&mut self) -> ParseResult<VarId> {
        let (name, span) = self.ident("variable")?;
        self.vars
            .lookup(&name)
            .ok_or(ParseError::UnknownVariable { span, name })
    }

    fn spec(&mut self) -> ParseResult<()> {
        while self.peek().is_some() {
            if self.eat_ident("vars") {
                self.vardecl()?;
            } else if self.eat_ident("abbrev") {
                let (name, span) = self.fresh_name("abbreviation name")?;
                if self.abbrevs.contains_key(&name) {
                    return Err(ParseError::DuplicateAbbrev { span, name });
                }
                self.expect(Tok::Colon)?;
                let body = self.term()?;
                self.abbrevs.insert(name, body);
            } else if self.eat_ident("process") {
                let (name, _) = self.fresh_name("process name")?;
                self.expect(Tok::Colon)?;
                let body = self.term()?;
                let slot = self
                    .procs
                    .iter_mut()
                    .find(|(n, _)| *n == name)
                    .expect("pre-scanned");
                slot.1 = Some(body);
            } else {
                let span = self.span();
                let found = self.peek().map(|t| t.to_string()).unwrap_or_default();
                return Err(ParseError::UnexpectedToken {
                    span,
                    expected: "vars, abbrev or process".to_string(),
                    found,
                });
            }
        }
        Ok(())
    }

    fn vardecl(&mut self) -> ParseResult<()> {
        loop {
            let (name, span) = self.fresh_name("variable name")?;
            self.expect(Tok::Colon)?;
            let (tyname, tyspan) = self.ident("type")?;
            let ty = match tyname.as_str() {
                "nat" => VarType::Nat,
                "addr" => VarType::Addr,
                "msg" => VarType::Msg,
                "set" => VarType::Set,
                other => {
                    return Err(ParseError::UnexpectedToken {
                        span: tyspan,
                        expected: "nat, addr, msg or set".to_string(),
                        found: other.to_string(),
                    })
                }
            };
            if self.vars.declare(&name, ty).is_none() {
                return Err(ParseError::DuplicateVariable { span, name });
            }
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(())
    }

    fn term(&mut self) -> ParseResult<TermId> {
        let mut left = self.seq()?;
        while self.peek() == Some(&Tok::ChoiceOp) {
            self.pos += 1;
            let right = self.seq()?;
            left = self.arena.intern(TermNode::Choice { left, right });
        }
        Ok(left)
    }

    fn hint(&mut self) -> ParseResult<Option<u32>> {
        if self.peek() == Some(&Tok::At) {
            self.pos += 1;
            Ok(Some(self.nat("label index")? as u32))
        } else {
            Ok(None)
        }
    }

    fn seq(&mut self) -> ParseResult<TermId> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::DoubleLBracket) => {
                self.pos += 1;
                let update = self.assigns()?;
                self.expect(Tok::DoubleRBracket)?;
                let hint = self.hint()?;
                self.expect(Tok::Dot)?;
                let next = self.seq()?;
                Ok(self.arena.intern(TermNode::Assign {
                    label: None,
                    hint,
                    update,
                    next,
                }))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let guard = self.guard()?;
                self.expect(Tok::Gt)?;
                let hint = self.hint()?;
                self.expect(Tok::Dot)?;
                let next = self.seq()?;
                Ok(self.arena.intern(TermNode::Guard {
                    label: None,
                    hint,
                    guard,
                    next,
                }))
            }
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                match w.as_str() {
                    "call" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let (name, span) = self.ident("process name")?;
                        self.expect(Tok::RParen)?;
                        let proc = self
                            .procs
                            .iter()
                            .position(|(n, _)| *n == name)
                            .map(|k| ProcId(k as u32))
                            .ok_or(ParseError::UnresolvedCall { span, name })?;
                        Ok(self.arena.intern(TermNode::Call { proc }))
                    }
                    "broadcast" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let msg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::Dot)?;
                        let next = self.seq()?;
                        Ok(self.arena.intern(TermNode::Broadcast {
                            label: None,
                            hint,
                            msg,
                            next,
                        }))
                    }
                    "groupcast" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let dests = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let msg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::Dot)?;
                        let next = self.seq()?;
                        Ok(self.arena.intern(TermNode::Groupcast {
                            label: None,
                            hint,
                            dests,
                            msg,
                            next,
                        }))
                    }
                    "unicast" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let dest = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let msg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::SuccArrow)?;
                        let succ = self.seq()?;
                        self.expect(Tok::FailArrow)?;
                        let fail = self.seq()?;
                        Ok(self.arena.intern(TermNode::Unicast {
                            label: None,
                            hint,
                            dest,
                            msg,
                            succ,
                            fail,
                        }))
                    }
                    "send" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let msg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::Dot)?;
                        let next = self.seq()?;
                        Ok(self.arena.intern(TermNode::Send {
                            label: None,
                            hint,
                            msg,
                            next,
                        }))
                    }
                    "receive" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let var = self.var()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::Dot)?;
                        let next = self.seq()?;
                        Ok(self.arena.intern(TermNode::Receive {
                            label: None,
                            hint,
                            var,
                            next,
                        }))
                    }
                    "deliver" => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let data = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let hint = self.hint()?;
                        self.expect(Tok::Dot)?;
                        let next = self.seq()?;
                        Ok(self.arena.intern(TermNode::Deliver {
                            label: None,
                            hint,
                            data,
                            next,
                        }))
                    }
                    _ => {
                        // abbreviation use: NAME ( )
                        let span = self.span();
                        if self.peek2() == Some(&Tok::LParen) {
                            self.pos += 2;
                            self.expect(Tok::RParen)?;
                            match self.abbrevs.get(&w) {
                                Some(&t) => Ok(t),
                                None => Err(ParseError::UnknownAbbrev { span, name: w }),
                            }
                        } else {
                            Err(ParseError::UnexpectedToken {
                                span,
                                expected: "a prefix, call(..) or NAME()".to_string(),
                                found: w,
                            })
                        }
                    }
                }
            }
            _ => {
                let span = self.span();
                let found = self
                    .peek()
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "end of input".to_string());
                Err(ParseError::UnexpectedToken {
                    span,
                    expected: "a term".to_string(),
                    found,
                })
            }
        }
    }

    fn assigns(&mut self) -> ParseResult<Assignment> {
        let mut items: Vec<(VarId, Expr)> = Vec::new();
        if self.peek() == Some(&Tok::DoubleRBracket) {
            return Ok(Assignment(items));
        }
        loop {
            let span = self.span();
            let var = self.var()?;
            if items.iter().any(|(v, _)| *v == var) {
                return Err(ParseError::DuplicateAssignTarget {
                    span,
                    name: self.vars.name(var).to_string(),
                });
            }
            self.expect(Tok::Assign)?;
            let e = self.expr()?;
            items.push((var, e));
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Assignment(items))
    }

    fn guard(&mut self) -> ParseResult<Guard> {
        if self.eat_ident("is_pkt") {
            let msg = self.convention_var("is_pkt", "msg")?;
            let num = self.convention_var("is_pkt", "num")?;
            let sip = self.convention_var("is_pkt", "sip")?;
            return Ok(Guard::IsPkt { msg, num, sip });
        }
        if self.eat_ident("is_newpkt") {
            let msg = self.convention_var("is_newpkt", "msg")?;
            let num = self.convention_var("is_newpkt", "num")?;
            return Ok(Guard::IsNewPkt { msg, num });
        }
        let lhs = self.expr()?;
        if self.peek() == Some(&Tok::BindArrow) {
            let first = match lhs {
                Expr::Var(v) => v,
                _ => {
                    return Err(ParseError::UnexpectedToken {
                        span: self.span(),
                        expected: "a variable to the left of <-".to_string(),
                        found: "expression".to_string(),
                    })
                }
            };
            self.pos += 1;
            let src = self.bind_source()?;
            let mut binds = vec![(first, src)];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                let var = self.var()?;
                self.expect(Tok::BindArrow)?;
                binds.push((var, self.bind_source()?));
            }
            return Ok(Guard::Bind(binds));
        }
        let op = self.cmp_op()?;
        let rhs = self.expr()?;
        Ok(Guard::Test(Cmp { op, lhs, rhs }))
    }

    fn convention_var(&self, guard: &'static str, var: &'static str) -> ParseResult<VarId> {
        self.vars
            .lookup(var)
            .ok_or(ParseError::MissingConventionVar { guard, var })
    }

    fn bind_source(&mut self) -> ParseResult<BindSource> {
        if let Some(Tok::Ident(w)) = self.peek() {
            let delim = matches!(
                self.peek2(),
                Some(Tok::Comma) | Some(Tok::Gt) | None
            );
            if delim && w == "nat" {
                self.pos += 1;
                return Ok(BindSource::NatDomain);
            }
            if delim && w == "addr" {
                self.pos += 1;
                return Ok(BindSource::AddrDomain);
            }
        }
        Ok(BindSource::Expr(self.expr()?))
    }

    fn cmp_op(&mut self) -> ParseResult<CmpOp> {
        let (t, span) = self.next("comparison operator")?;
        match t {
            Tok::Le => Ok(CmpOp::Le),
            Tok::Lt => Ok(CmpOp::Lt),
            Tok::Eq => Ok(CmpOp::Eq),
            Tok::Ge => Ok(CmpOp::Ge),
            other => Err(ParseError::UnexpectedToken {
                span,
                expected: "<=, <, = or >=".to_string(),
                found: other.to_string(),
            }),
        }
    }

    fn cmp(&mut self) -> ParseResult<Cmp> {
        let lhs = self.expr()?;
        let op = self.cmp_op()?;
        let rhs = self.expr()?;
        Ok(Cmp { op, lhs, rhs })
    }

    fn expr(&mut self) -> ParseResult<Expr> {
        let mut left = self.postfix()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let right = self.postfix()?;
            left = Expr::Plus(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> ParseResult<Expr> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::Dot) {
            // inside an expression a dot can only be a field projection
            self.pos += 1;
            let (field, span) = self.ident("data, src or dst")?;
            let f = match field.as_str() {
                "data" => MsgField::Data,
                "src" => MsgField::Src,
                "dst" => MsgField::Dst,
                other => {
                    return Err(ParseError::UnexpectedToken {
                        span,
                        expected: "data, src or dst".to_string(),
                        found: other.to_string(),
                    })
                }
            };
            e = Expr::Proj(Box::new(e), f);
        }
        Ok(e)
    }

    fn atom(&mut self) -> ParseResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::Nat(n)) => {
                self.pos += 1;
                Ok(Expr::Nat(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() != Some(&Tok::RBrace) {
                    loop {
                        items.push(self.expr()?);
                        if self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Expr::SetLit(items))
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "none" => {
                    self.pos += 1;
                    Ok(Expr::NoneLit)
                }
                "addr" => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let n = self.nat("address literal")?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Addr(Addr(n)))
                }
                "max" => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Max(Box::new(a), Box::new(b)))
                }
                "pkt" => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let data = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let src = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Pkt {
                        data: Box::new(data),
                        src: Box::new(src),
                    })
                }
                "newpkt" => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let data = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let dst = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::NewPkt {
                        data: Box::new(data),
                        dst: Box::new(dst),
                    })
                }
                "if" => {
                    self.pos += 1;
                    let c = self.cmp()?;
                    if !self.eat_ident("then") {
                        return Err(ParseError::UnexpectedToken {
                            span: self.span(),
                            expected: "then".to_string(),
                            found: self.peek().map(|t| t.to_string()).unwrap_or_default(),
                        });
                    }
                    let a = self.expr()?;
                    if !self.eat_ident("else") {
                        return Err(ParseError::UnexpectedToken {
                            span: self.span(),
                            expected: "else".to_string(),
                            found: self.peek().map(|t| t.to_string()).unwrap_or_default(),
                        });
                    }
                    let b = self.expr()?;
                    Ok(Expr::Cond(Box::new(c), Box::new(a), Box::new(b)))
                }
                _ => {
                    let v = self.var()?;
                    Ok(Expr::Var(v))
                }
            },
            other => Err(ParseError::UnexpectedToken {
                span: self.span(),
                expected: "an expression".to_string(),
                found: other
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "end of input".to_string()),
            }),
        }
    }
}
