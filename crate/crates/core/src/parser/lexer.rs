use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Colon,
    Star,
    /// A lexical error; the parser reports it when it reaches the token.
    Error(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Error(_) => f.write_str("invalid token"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

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

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        let tok = match c {
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            ',' => {
                bump!();
                Tok::Comma
            }
            '.' => {
                bump!();
                Tok::Dot
            }
            '*' => {
                bump!();
                Tok::Star
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    Tok::Neck
                } else {
                    Tok::Colon
                }
            }
            '?' => {
                bump!();
                let mut word = String::from("?");
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    bump!();
                }
                let reserved =
                    word.len() > 2 && word.starts_with("?k") && word[2..].chars().all(|c| c.is_ascii_digit());
                if reserved {
                    Tok::Error(format!("reserved token `{word}`"))
                } else {
                    Tok::Error(format!("unexpected character `?` in `{word}`"))
                }
            }
            c if c.is_ascii_digit() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    word.push(c);
                    bump!();
                }
                if chars.peek().is_some_and(|&c| is_word_char(c)) {
                    while let Some(&c) = chars.peek() {
                        if !is_word_char(c) {
                            break;
                        }
                        word.push(c);
                        bump!();
                    }
                    Tok::Error(format!("malformed number `{word}`"))
                } else {
                    Tok::Int(word)
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    bump!();
                }
                if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                }
            }
            other => {
                bump!();
                Tok::Error(format!("unexpected character `{other}`"))
            }
        };
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    out
}
