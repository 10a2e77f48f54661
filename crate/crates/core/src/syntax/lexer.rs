use num_bigint::BigInt;

use super::{ParseError, ParseErrorKind};
use crate::exp_poly::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigInt),
    Var(Var),
    Exp,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    And,
    Or,
    Bang,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {}", n),
            Tok::Var(v) => format!("variable {}", v),
            Tok::Exp => "'E'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Eq => "'='".into(),
            Tok::Ne => "'!='".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Which identifier letter denotes `x`-variables: `x` in terms, `c` in
/// constraint schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarStyle {
    X,
    C,
}

/// Tokenize one logical input. `line` and `col0` locate its first character.
pub(crate) fn lex(src: &str, line: usize, col0: usize, style: VarStyle) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |i: usize| col0 + i;
    while i < chars.len() {
        let c = chars[i];
        let col = at(i);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, col });
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            push(&mut out, Tok::Int(digits.parse().expect("ascii digits")));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            push(&mut out, word_token(&word, line, col, style)?);
            continue;
        }
        let two = chars.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            ('!', Some('=')) => (Tok::Ne, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('^', _) => (Tok::Caret, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('&', _) => (Tok::And, 1),
            ('|', _) => (Tok::Or, 1),
            ('!', _) => (Tok::Bang, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            _ => {
                return Err(ParseError { line, col, kind: ParseErrorKind::BadCharacter(c) });
            }
        };
        push(&mut out, tok);
        i += len;
    }
    out.push(Spanned { tok: Tok::End, line, col: at(chars.len()) });
    Ok(out)
}

fn word_token(word: &str, line: usize, col: usize, style: VarStyle) -> Result<Tok, ParseError> {
    let bad = || ParseError { line, col, kind: ParseErrorKind::BadIdentifier(word.to_string()) };
    if word == "E" {
        return Ok(Tok::Exp);
    }
    if word == "y" && style == VarStyle::X {
        return Ok(Tok::Var(Var::Y));
    }
    let prefix = match style {
        VarStyle::X => 'x',
        VarStyle::C => 'c',
    };
    let rest = word.strip_prefix(prefix).ok_or_else(bad)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
        return Err(bad());
    }
    let k: u32 = rest.parse().map_err(|_| bad())?;
    Ok(Tok::Var(Var::X(k)))
}
