use super::ast::Pos;
use super::DslError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `?Name`, stored without the question mark.
    Var(String),
    Str(String),
    /// `<syn>`, `<iface>`, `<lemma>`, `<morpho>`, stored without brackets.
    Dim(String),
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Semi,
    Bar,
    Comma,
    Eq,
    Dot,
    Slash,
    Colon,
    StarEq,
    LArrow,
    Arrow,
    ArrowStar,
    Prec,
    PrecStar,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Var(s) => format!("variable `?{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Dim(s) => format!("`<{s}>`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Bar => "|",
            Tok::Comma => ",",
            Tok::Eq => "=",
            Tok::Dot => ".",
            Tok::Slash => "/",
            Tok::Colon => ":",
            Tok::StarEq => "*=",
            Tok::LArrow => "<-",
            Tok::Arrow => "->",
            Tok::ArrowStar => "->*",
            Tok::Prec => ">>",
            Tok::PrecStar => ">>*",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_var_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = |k: usize| chars.get(i + k).copied();
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        let err = |expected: &str| DslError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.to_string(),
        };
        let (tok, len) = match c {
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ';' => (Tok::Semi, 1),
            '|' => (Tok::Bar, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Eq, 1),
            '.' => (Tok::Dot, 1),
            '/' => (Tok::Slash, 1),
            ':' => (Tok::Colon, 1),
            '*' if peek(1) == Some('=') => (Tok::StarEq, 2),
            '-' if peek(1) == Some('>') && peek(2) == Some('*') => (Tok::ArrowStar, 3),
            '-' if peek(1) == Some('>') => (Tok::Arrow, 2),
            '>' if peek(1) == Some('>') && peek(2) == Some('*') => (Tok::PrecStar, 3),
            '>' if peek(1) == Some('>') => (Tok::Prec, 2),
            '<' if peek(1) == Some('-') => (Tok::LArrow, 2),
            '<' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_alphabetic() {
                    j += 1;
                }
                if j == i + 1 || chars.get(j) != Some(&'>') {
                    return Err(err("a dimension like `<syn>`"));
                }
                let name: String = chars[i + 1..j].iter().collect();
                (Tok::Dim(name), j + 1 - i)
            }
            '?' => {
                let mut j = i + 1;
                while j < chars.len() && is_var_char(chars[j]) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err("a variable name after `?`"));
                }
                (Tok::Var(chars[i + 1..j].iter().collect()), j - i)
            }
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err("closing `\"`")),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                _ => return Err(err("`\\\"` or `\\\\` escape")),
                            }
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                (Tok::Str(s), j + 1 - i)
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() {
                    let ch = chars[j];
                    let dash_arrow = ch == '-' && chars.get(j + 1) == Some(&'>');
                    if is_var_char(ch) || ((ch == '-' || ch == '+') && !dash_arrow) {
                        j += 1;
                    } else {
                        break;
                    }
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            _ => return Err(err("a token")),
        };
        out.push(Token { tok, pos });
        advance!(len);
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
