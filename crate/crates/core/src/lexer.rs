//! Tokenizer for `.rml` source text.

use std::fmt;

use crate::parser::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Underscore,
    Semi,
    Comma,
    Colon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Ge,
    Assign,
    EqEq,
    Ne,
    Bang,
    Plus,
    Minus,
    Star,
    Slash,
    Question,
    Bar,
    OrOr,
    AndAnd,
    Union,
    Inter,
    Filter,
    Ellipsis,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Number(n) => return write!(f, "number {n}"),
            Tok::Str(s) => return write!(f, "string {s:?}"),
            Tok::Underscore => "`_`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Le => "`<=`",
            Tok::Ge => "`>=`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::Ne => "`!=`",
            Tok::Bang => "`!`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Question => "`?`",
            Tok::Bar => "`|`",
            Tok::OrOr => "`||`",
            Tok::AndAnd => "`&&`",
            Tok::Union => "`\\/`",
            Tok::Inter => "`/\\`",
            Tok::Filter => "`>>`",
            Tok::Ellipsis => "`...`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let peek = |k: usize| chars.get(i + k).copied();
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && peek(1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            })
        };

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            push(
                &mut out,
                if word == "_" {
                    Tok::Underscore
                } else {
                    Tok::Ident(word)
                },
            );
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while i < j {
                        bump!();
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        bump!();
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<f64>().map_err(|_| {
                ParseError::new(tline, tcol, format!("malformed number `{text}`"), vec![])
            })?;
            push(&mut out, Tok::Number(n));
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            bump!();
            let mut s = String::new();
            loop {
                let Some(&ch) = chars.get(i) else {
                    return Err(ParseError::new(
                        tline,
                        tcol,
                        "unterminated string literal",
                        vec![],
                    ));
                };
                if ch == quote {
                    bump!();
                    break;
                }
                if ch == '\\' {
                    bump!();
                    let Some(&esc) = chars.get(i) else { continue };
                    s.push(match esc {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        other => other,
                    });
                    bump!();
                    continue;
                }
                s.push(ch);
                bump!();
            }
            push(&mut out, Tok::Str(s));
            continue;
        }

        let two: String = [Some(c), peek(1)].iter().flatten().collect();
        let (tok, len) = match (c, two.as_str()) {
            (_, "\\/") => (Tok::Union, 2),
            (_, "/\\") => (Tok::Inter, 2),
            (_, "<=") => (Tok::Le, 2),
            (_, ">=") => (Tok::Ge, 2),
            (_, ">>") => (Tok::Filter, 2),
            (_, "==") => (Tok::EqEq, 2),
            (_, "!=") => (Tok::Ne, 2),
            (_, "||") => (Tok::OrOr, 2),
            (_, "&&") => (Tok::AndAnd, 2),
            ('.', _) if peek(1) == Some('.') && peek(2) == Some('.') => (Tok::Ellipsis, 3),
            ('…', _) => (Tok::Ellipsis, 1),
            ('∨', _) => (Tok::Union, 1),
            ('∧', _) => (Tok::Inter, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('=', _) => (Tok::Assign, 1),
            ('!', _) => (Tok::Bang, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('?', _) => (Tok::Question, 1),
            ('|', _) => (Tok::Bar, 1),
            _ => {
                return Err(ParseError::new(
                    tline,
                    tcol,
                    format!("unexpected character `{c}`"),
                    vec![],
                ))
            }
        };
        for _ in 0..len {
            bump!();
        }
        push(&mut out, tok);
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a \\/ b // trailing\n/\\ c ∨ d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Union,
                Tok::Ident("b".into()),
                Tok::Inter,
                Tok::Ident("c".into()),
                Tok::Union,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn numbers_strings_positions() {
        let t = tokenize("x = 1.0;\n  'a\\'b' 2e3").unwrap();
        assert_eq!(t[2].tok, Tok::Number(1.0));
        assert_eq!(t[4].tok, Tok::Str("a'b".into()));
        assert_eq!((t[4].line, t[4].col), (2, 3));
        assert_eq!(t[5].tok, Tok::Number(2000.0));
    }

    #[test]
    fn bad_character() {
        let e = tokenize("a # b").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }
}
