use super::diagnostic::Position;
use crate::feature::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    /// `None` when the literal does not fit in an i64.
    Int(Option<i64>),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Invalid(String),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(_) => "integer".to_string(),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Invalid(s) => format!("`{s}`"),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position { line: self.line, column: self.column }
    }

    fn take_while(&mut self, mut pred: impl FnMut(char) -> bool, out: &mut String) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Vec<Token> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut tokens = Vec::new();
    loop {
        let Some(c) = cur.peek() else {
            tokens.push(Token { kind: TokenKind::Eof, pos: cur.pos() });
            return tokens;
        };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let pos = cur.pos();
        let kind = match c {
            '{' | '}' | '[' | ']' | ',' => {
                cur.bump();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    _ => TokenKind::Comma,
                }
            }
            '"' => lex_string(&mut cur),
            '-' | '0'..='9' => {
                let mut s = String::new();
                if c == '-' {
                    s.push('-');
                    cur.bump();
                }
                cur.take_while(|c| c.is_ascii_digit(), &mut s);
                if s == "-" {
                    TokenKind::Invalid(s)
                } else if cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    cur.take_while(|c| c.is_alphanumeric() || c == '_', &mut s);
                    TokenKind::Invalid(s)
                } else {
                    TokenKind::Int(s.parse::<i64>().ok())
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                cur.take_while(|c| c.is_alphanumeric() || c == '_', &mut s);
                if is_identifier(&s) {
                    TokenKind::Ident(s)
                } else {
                    TokenKind::Invalid(s)
                }
            }
            other => {
                cur.bump();
                TokenKind::Invalid(other.to_string())
            }
        };
        tokens.push(Token { kind, pos });
    }
}

fn lex_string(cur: &mut Cursor<'_>) -> TokenKind {
    cur.bump();
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => return TokenKind::Invalid("\"".to_string()),
            Some('"') => return TokenKind::Str(s),
            Some('\\') => match cur.bump() {
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                Some(other) => s.push(other),
                None => return TokenKind::Invalid("\"".to_string()),
            },
            Some(c) => s.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            kinds("leaf fatigue -4 # c\n\"a\\\"b\""),
            vec![
                TokenKind::Ident("leaf".into()),
                TokenKind::Ident("fatigue".into()),
                TokenKind::Int(Some(-4)),
                TokenKind::Str("a\"b".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("demon d {\n  leaf a 3\n}");
        let leaf = &toks[3];
        assert_eq!(leaf.kind, TokenKind::Ident("leaf".into()));
        assert_eq!(leaf.pos, Position { line: 2, column: 3 });
    }

    #[test]
    fn malformed_words_are_invalid() {
        assert!(matches!(kinds("Fatigue")[0], TokenKind::Invalid(_)));
        assert!(matches!(kinds("3abc")[0], TokenKind::Invalid(_)));
        assert!(matches!(kinds("\"open")[0], TokenKind::Invalid(_)));
        assert_eq!(kinds("99999999999999999999")[0], TokenKind::Int(None));
    }
}
