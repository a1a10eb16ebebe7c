//! Tokenizer shared by the program and contract parsers.

use super::FrontendError;

/// Token kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Dot,
    Bang,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    StarStar,
    AndAnd,
    OrOr,
    Wedge,
    Vee,
    Tilde,
    Underscore,
    Eof,
}

/// A token with its source position (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits source text into tokens; `//` and `/* */` comments are skipped.
pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            advance(&mut i, &mut line, &mut col, 2);
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                advance(&mut i, &mut line, &mut col, 1);
            }
            if i >= chars.len() {
                return Err(FrontendError::syntax(line, col, "unterminated comment"));
            }
            advance(&mut i, &mut line, &mut col, 2);
            continue;
        }
        let (tline, tcol) = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line: tline, col: tcol });
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| FrontendError::syntax(tline, tcol, "integer literal out of range"))?;
            push(&mut out, Tok::Int(n));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            push(&mut out, if text == "_" { Tok::Underscore } else { Tok::Ident(text) });
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(FrontendError::syntax(tline, tcol, "unterminated string literal")),
                    Some('"') => break,
                    Some('\\') => {
                        let esc = chars.get(i + 1).copied();
                        s.push(match esc {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(c) => c,
                            None => return Err(FrontendError::syntax(tline, tcol, "unterminated string literal")),
                        });
                        advance(&mut i, &mut line, &mut col, 2);
                    }
                    Some(&c) => {
                        s.push(c);
                        advance(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            advance(&mut i, &mut line, &mut col, 1);
            push(&mut out, Tok::Str(s));
            continue;
        }
        let two: Option<Tok> = match (c, next) {
            ('=', Some('=')) => Some(Tok::EqEq),
            ('!', Some('=')) => Some(Tok::NotEq),
            ('<', Some('=')) => Some(Tok::Le),
            ('>', Some('=')) => Some(Tok::Ge),
            ('*', Some('*')) => Some(Tok::StarStar),
            ('&', Some('&')) => Some(Tok::AndAnd),
            ('|', Some('|')) => Some(Tok::OrOr),
            ('/', Some('\\')) => Some(Tok::Wedge),
            ('\\', Some('/')) => Some(Tok::Vee),
            _ => None,
        };
        if let Some(t) = two {
            advance(&mut i, &mut line, &mut col, 2);
            push(&mut out, t);
            continue;
        }
        let one = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '=' => Tok::Assign,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '~' => Tok::Tilde,
            _ => return Err(FrontendError::syntax(tline, tcol, &format!("unexpected character {c:?}"))),
        };
        advance(&mut i, &mut line, &mut col, 1);
        push(&mut out, one);
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("x = \"a\";\n  !m() ** ~[open(f)] /\\ y").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("x".into()));
        assert_eq!(toks[2].tok, Tok::Str("a".into()));
        assert_eq!((toks[4].line, toks[4].col), (2, 3));
        assert!(toks.iter().any(|t| t.tok == Tok::StarStar));
        assert!(toks.iter().any(|t| t.tok == Tok::Wedge));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = tokenize("// c\n/* d\n */ skip").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("skip".into()));
        assert_eq!(toks[0].line, 3);
    }

    #[test]
    fn unterminated_string() {
        assert!(tokenize("\"abc").is_err());
    }
}
