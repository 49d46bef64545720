use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Name(String),
    Int(String),
    Float(String),
    Sym(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name '{}'", n),
            Tok::Int(n) | Tok::Float(n) => format!("number {}", n),
            Tok::Sym(c) => format!("'{}'", c),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &str = "{};:,=()[]+-*/^'";

/// Splits input into tokens; `#` starts a comment running to end of line.
pub fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let take = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            take(&mut i, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                take(&mut i, &mut col);
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                take(&mut i, &mut col);
            }
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            let mut float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                take(&mut i, &mut col);
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                float = true;
                take(&mut i, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    take(&mut i, &mut col);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    float = true;
                    while i < j {
                        take(&mut i, &mut col);
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        take(&mut i, &mut col);
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: if float { Tok::Float(s) } else { Tok::Int(s) },
                line: l0,
                col: c0,
            });
        } else if SYMBOLS.contains(c) {
            take(&mut i, &mut col);
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
        } else {
            return Err(Error::Parse {
                line: l0,
                col: c0,
                expected: format!("a token, found '{}'", c),
            });
        }
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

    #[test]
    fn tokens_and_positions() {
        let t = lex("u[x,x] = 1/3*f''(x) # note\n  tol 1e-9 2.5").unwrap();
        assert_eq!(t[0].tok, Tok::Name("u".into()));
        assert_eq!(t[1].tok, Tok::Sym('['));
        let f = t
            .iter()
            .position(|k| k.tok == Tok::Name("f".into()))
            .unwrap();
        assert_eq!(t[f + 1].tok, Tok::Sym('\''));
        let tol = t.iter().find(|k| k.tok == Tok::Name("tol".into())).unwrap();
        assert_eq!((tol.line, tol.col), (2, 3));
        assert!(t.iter().any(|k| k.tok == Tok::Float("1e-9".into())));
        assert!(t.iter().any(|k| k.tok == Tok::Float("2.5".into())));
    }

    #[test]
    fn bad_character() {
        assert!(matches!(
            lex("x $ y"),
            Err(Error::Parse {
                line: 1,
                col: 3,
                ..
            })
        ));
    }
}
