use std::fmt;

use crate::bigfib::Integer;

use super::DslError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int(Integer),
    Ident(String),
    /// The free-form name following `identity`.
    Name(String),
    /// A `#` comment, without the leading `#`.
    Comment(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    EqEq,
    Le,
    Arrow,
    DotDot,
    Ellipsis,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    AndAnd,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Int(v) => return write!(f, "integer `{v}`"),
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Name(s) => return write!(f, "name `{s}`"),
            Tok::Comment(_) => "comment",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::Le => "`<=`",
            Tok::Arrow => "`->`",
            Tok::DotDot => "`..`",
            Tok::Ellipsis => "`...`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Caret => "`^`",
            Tok::AndAnd => "`&&`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '+' | '/' | '.')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut expect_name = false;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok| {
            out.push(Token {
                tok,
                line: start_line,
                col: start_col,
            })
        };

        if c == '#' {
            let start = i + 1;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start + 1;
            push(&mut out, Tok::Comment(text));
            continue;
        }

        if expect_name {
            if !is_name_char(c) {
                return Err(DslError::syntax(line, col, format!("`{c}`"), &["identity name"]));
            }
            let start = i;
            while i < chars.len() && is_name_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            push(&mut out, Tok::Name(chars[start..i].iter().collect()));
            expect_name = false;
            continue;
        }

        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let value: Integer = digits.parse().expect("ascii digits");
            push(&mut out, Tok::Int(value));
            continue;
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            expect_name = word == "identity";
            push(&mut out, Tok::Ident(word));
            continue;
        }

        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('.', Some('.')) if chars.get(i + 2) == Some(&'.') => (Tok::Ellipsis, 3),
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('=', _) => (Tok::Assign, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            _ => {
                return Err(DslError::syntax(line, col, format!("`{c}`"), &["a token"]));
            }
        };
        i += width;
        col += width;
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

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_and_ellipsis() {
        assert_eq!(
            toks("0... 1..n"),
            vec![
                Tok::Int(0.into()),
                Tok::Ellipsis,
                Tok::Int(1.into()),
                Tok::DotDot,
                Tok::Ident("n".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn identity_names_are_free_form() {
        let t = toks("identity T18-2k+1-verbatim {");
        assert_eq!(t[1], Tok::Name("T18-2k+1-verbatim".into()));
        assert_eq!(t[2], Tok::LBrace);
    }

    #[test]
    fn positions() {
        let t = tokenize("# c\n  F(").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
        assert_eq!((t[2].line, t[2].col), (2, 4));
    }

    #[test]
    fn bad_character() {
        assert!(matches!(tokenize("F(1) $"), Err(DslError::Syntax { col: 6, .. })));
    }
}
