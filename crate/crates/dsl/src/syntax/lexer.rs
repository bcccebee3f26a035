//! Tokenizer for the assertion and program surface syntax.

use super::parser::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    // Keywords.
    True,
    False,
    Emp,
    Forall,
    Exists,
    If,
    Then,
    Else,
    Fi,
    While,
    Invariant,
    Do,
    Od,
    Dispose,
    Cons,
    Upd,
    Clr,
    // Punctuation and operators.
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Eq,
    Lt,
    Bang,
    BangEq,
    AndAnd,
    Assign,
    WeakArrow,   // ~>
    StrongArrow, // |->
    Arrow,       // ->
    Wand,        // -*
    SlashAnd,    // /\
    SlashOr,     // \/
    IffArrow,    // <->
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Int(n) => return write!(f, "{n}"),
            Tok::Ident(x) => return write!(f, "{x}"),
            Tok::True => "true",
            Tok::False => "false",
            Tok::Emp => "emp",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Fi => "fi",
            Tok::While => "while",
            Tok::Invariant => "invariant",
            Tok::Do => "do",
            Tok::Od => "od",
            Tok::Dispose => "dispose",
            Tok::Cons => "cons",
            Tok::Upd => "upd",
            Tok::Clr => "clr",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Bang => "!",
            Tok::BangEq => "!=",
            Tok::AndAnd => "&&",
            Tok::Assign => ":=",
            Tok::WeakArrow => "~>",
            Tok::StrongArrow => "|->",
            Tok::Arrow => "->",
            Tok::Wand => "-*",
            Tok::SlashAnd => "/\\",
            Tok::SlashOr => "\\/",
            Tok::IffArrow => "<->",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "true" => Tok::True,
        "false" => Tok::False,
        "emp" => Tok::Emp,
        "forall" => Tok::Forall,
        "exists" => Tok::Exists,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "fi" => Tok::Fi,
        "while" => Tok::While,
        "invariant" => Tok::Invariant,
        "do" => Tok::Do,
        "od" => Tok::Od,
        "dispose" => Tok::Dispose,
        "cons" => Tok::Cons,
        "upd" => Tok::Upd,
        "clr" => Tok::Clr,
        _ => return None,
    })
}

/// Tokenizes `text`. `#` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    macro_rules! push {
        ($tok:expr, $n:expr) => {{
            out.push(Spanned {
                tok: $tok,
                line,
                col,
            });
            i += $n;
            col += $n as u32;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '[' => push!(Tok::LBracket, 1),
            ']' => push!(Tok::RBracket, 1),
            ',' => push!(Tok::Comma, 1),
            ';' => push!(Tok::Semi, 1),
            '+' => push!(Tok::Plus, 1),
            '*' => push!(Tok::Star, 1),
            '=' => push!(Tok::Eq, 1),
            '-' => match next {
                Some('*') => push!(Tok::Wand, 2),
                Some('>') => push!(Tok::Arrow, 2),
                _ => push!(Tok::Minus, 1),
            },
            '<' => {
                if next == Some('-') && chars.get(i + 2) == Some(&'>') {
                    push!(Tok::IffArrow, 3)
                } else {
                    push!(Tok::Lt, 1)
                }
            }
            '!' => match next {
                Some('=') => push!(Tok::BangEq, 2),
                _ => push!(Tok::Bang, 1),
            },
            '&' => {
                if next == Some('&') {
                    push!(Tok::AndAnd, 2)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `&&`"));
                }
            }
            '|' => {
                if next == Some('-') && chars.get(i + 2) == Some(&'>') {
                    push!(Tok::StrongArrow, 3)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `|->`"));
                }
            }
            '~' => {
                if next == Some('>') {
                    push!(Tok::WeakArrow, 2)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `~>`"));
                }
            }
            ':' => {
                if next == Some('=') {
                    push!(Tok::Assign, 2)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `:=`"));
                }
            }
            '/' => {
                if next == Some('\\') {
                    push!(Tok::SlashAnd, 2)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `/\\`"));
                }
            }
            '\\' => {
                if next == Some('/') {
                    push!(Tok::SlashOr, 2)
                } else {
                    return Err(SyntaxError::at(line, col, "expected `\\/`"));
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n: i64 = s
                    .parse()
                    .map_err(|_| SyntaxError::at(line, col, "integer literal out of range"))?;
                out.push(Spanned {
                    tok: Tok::Int(n),
                    line,
                    col,
                });
                col += (i - start) as u32;
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let tok = keyword(&s).unwrap_or(Tok::Ident(s));
                out.push(Spanned { tok, line, col });
                col += (i - start) as u32;
            }
            other => {
                return Err(SyntaxError::at(
                    line,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}
