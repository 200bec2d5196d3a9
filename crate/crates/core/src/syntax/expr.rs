//! The closed, first-order expression language used in prefixes.
//!
//! Expressions are deliberately small: variable reads, literals, saturating
//! arithmetic, message constructors and projections, address sets, and
//! comparison-guarded conditionals. Keeping the language closed is what makes
//! guard enumeration and proof-obligation generation finite.

use super::state::VarId;
use super::value::Addr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ge,
}

impl CmpOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MsgField {
    Data,
    Src,
    Dst,
}

impl MsgField {
    pub fn name(&self) -> &'static str {
        match self {
            MsgField::Data => "data",
            MsgField::Src => "src",
            MsgField::Dst => "dst",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(VarId),
    Nat(u64),
    Addr(Addr),
    NoneLit,
    Plus(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    /// `if c then a else b`
    Cond(Box<Cmp>, Box<Expr>, Box<Expr>),
    Pkt { data: Box<Expr>, src: Box<Expr> },
    NewPkt { data: Box<Expr>, dst: Box<Expr> },
    Proj(Box<Expr>, MsgField),
    SetLit(Vec<Expr>),
}

/// A comparison between two expressions; the only boolean form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cmp {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: Expr,
}

/// Where a guard binder draws its candidate values from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BindSource {
    /// The configured data domain `0..=data_max`.
    NatDomain,
    /// The configured address domain.
    AddrDomain,
    /// An expression: a set value contributes its members, any other value
    /// contributes itself.
    Expr(Expr),
}

/// Guards filter and extend the data state: a boolean test keeps or drops it,
/// a binder list extends it with one state per tuple of candidate values, and
/// the message-shape tests match on the `msg` variable and copy its fields
/// into `num` (and `sip`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    Test(Cmp),
    Bind(Vec<(VarId, BindSource)>),
    IsPkt { msg: VarId, num: VarId, sip: VarId },
    IsNewPkt { msg: VarId, num: VarId },
}

/// A simultaneous variable update: all right-hand sides are evaluated in the
/// incoming state before any variable changes.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub Vec<(VarId, Expr)>);
