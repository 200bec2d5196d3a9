//! Tokenizer shared by the model parser and the scenario parser.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    DoubleLBracket,
    DoubleRBracket,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Assign,   // :=
    BindArrow, // <-
    SuccArrow, // |>
    FailArrow, // <|
    ParBar,   // ||
    ChoiceOp, // (+) or ⊕
    Dot,
    Comma,
    Colon,
    At,
    Plus,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Nat(n) => write!(f, "{n}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::DoubleLBracket => write!(f, "[["),
            Tok::DoubleRBracket => write!(f, "]]"),
            Tok::Lt => write!(f, "<"),
            Tok::Gt => write!(f, ">"),
            Tok::Le => write!(f, "<="),
            Tok::Ge => write!(f, ">="),
            Tok::Eq => write!(f, "="),
            Tok::Assign => write!(f, ":="),
            Tok::BindArrow => write!(f, "<-"),
            Tok::SuccArrow => write!(f, "|>"),
            Tok::FailArrow => write!(f, "<|"),
            Tok::ParBar => write!(f, "||"),
            Tok::ChoiceOp => write!(f, "(+)"),
            Tok::Dot => write!(f, "."),
            Tok::Comma => write!(f, ","),
            Tok::Colon => write!(f, ":"),
            Tok::At => write!(f, "@"),
            Tok::Plus => write!(f, "+"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: unexpected character {found:?}")]
pub struct LexError {
    pub span: Span,
    pub found: char,
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, LexError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let span = Span { line, col };
        let c = match chars.peek().copied() {
            Some(c) => c,
            None => break,
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '-' => {
                // only comments start with '-': "-- to end of line"
                bump!();
                if chars.peek() == Some(&'-') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    return Err(LexError { span, found: '-' });
                }
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n.saturating_mul(10).saturating_add(v as u64);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Nat(n), span));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), span));
            }
            '(' => {
                bump!();
                // "(+)" is the ASCII choice operator
                if chars.peek() == Some(&'+') {
                    let mut look = chars.clone();
                    look.next();
                    if look.peek() == Some(&')') {
                        bump!();
                        bump!();
                        out.push((Tok::ChoiceOp, span));
                        continue;
                    }
                }
                out.push((Tok::LParen, span));
            }
            ')' => {
                bump!();
                out.push((Tok::RParen, span));
            }
            '{' => {
                bump!();
                out.push((Tok::LBrace, span));
            }
            '}' => {
                bump!();
                out.push((Tok::RBrace, span));
            }
            '[' => {
                bump!();
                if chars.peek() == Some(&'[') {
                    bump!();
                    out.push((Tok::DoubleLBracket, span));
                } else {
                    out.push((Tok::LBracket, span));
                }
            }
            ']' => {
                bump!();
                if chars.peek() == Some(&']') {
                    bump!();
                    out.push((Tok::DoubleRBracket, span));
                } else {
                    out.push((Tok::RBracket, span));
                }
            }
            '<' => {
                bump!();
                match chars.peek() {
                    Some('=') => {
                        bump!();
                        out.push((Tok::Le, span));
                    }
                    Some('-') => {
                        bump!();
                        out.push((Tok::BindArrow, span));
                    }
                    Some('|') => {
                        bump!();
                        out.push((Tok::FailArrow, span));
                    }
                    _ => out.push((Tok::Lt, span)),
                }
            }
            '>' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Ge, span));
                } else {
                    out.push((Tok::Gt, span));
                }
            }
            '|' => {
                bump!();
                match chars.peek() {
                    Some('>') => {
                        bump!();
                        out.push((Tok::SuccArrow, span));
                    }
                    Some('|') => {
                        bump!();
                        out.push((Tok::ParBar, span));
                    }
                    _ => return Err(LexError { span, found: '|' }),
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Assign, span));
                } else {
                    out.push((Tok::Colon, span));
                }
            }
            '=' => {
                bump!();
                out.push((Tok::Eq, span));
            }
            '.' => {
                bump!();
                out.push((Tok::Dot, span));
            }
            ',' => {
                bump!();
                out.push((Tok::Comma, span));
            }
            '@' => {
                bump!();
                out.push((Tok::At, span));
            }
            '+' => {
                bump!();
                out.push((Tok::Plus, span));
            }
            '⊕' => {
                bump!();
                out.push((Tok::ChoiceOp, span));
            }
            other => return Err(LexError { span, found: other }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_tokenize_with_maximal_munch() {
        let toks: Vec<Tok> = tokenize("<= < <- <| |> || := : = (+) ⊕ [[ ]] [ ]")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Le,
                Tok::Lt,
                Tok::BindArrow,
                Tok::FailArrow,
                Tok::SuccArrow,
                Tok::ParBar,
                Tok::Assign,
                Tok::Colon,
                Tok::Eq,
                Tok::ChoiceOp,
                Tok::ChoiceOp,
                Tok::DoubleLBracket,
                Tok::DoubleRBracket,
                Tok::LBracket,
                Tok::RBracket,
            ]
        );
    }

    #[test]
    fn comments_run_to_end_of_line() {
        let toks = tokenize("a -- comment ⊕ ignored\nb").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].1.line, 2);
    }

    #[test]
    fn stray_pipe_is_rejected() {
        assert!(tokenize("a | b").is_err());
    }
}
