use super::{Code, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// A bare or quoted word; keywords are words too.
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Star,
    Arrow,
    Geq,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Geq => "`>=`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '/' | '\'' | '•')
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }
}

pub fn lex(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        let single = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            ':' => Some(TokenKind::Colon),
            '*' => Some(TokenKind::Star),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            tokens.push(Token { kind, span });
            continue;
        }
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            '-' if cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Arrow,
                    span,
                });
            }
            '>' if cur.peek2() == Some('=') => {
                cur.bump();
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Geq,
                    span,
                });
            }
            '"' => {
                cur.bump();
                let mut word = String::new();
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match cur.bump() {
                            Some(e @ ('"' | '\\')) => word.push(e),
                            Some('n') => word.push('\n'),
                            other => {
                                errors.push(Diagnostic::new(
                                    Code::Lex,
                                    span,
                                    format!(
                                        "unknown escape `\\{}`",
                                        other.map(String::from).unwrap_or_default()
                                    ),
                                ));
                            }
                        },
                        c => word.push(c),
                    }
                }
                if closed {
                    tokens.push(Token {
                        kind: TokenKind::Word(word),
                        span,
                    });
                } else {
                    errors.push(Diagnostic::new(Code::Lex, span, "unterminated string"));
                }
            }
            c if is_word_char(c)
                || (c == '-' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) =>
            {
                let mut word = String::new();
                word.push(c);
                cur.bump();
                while let Some(c) = cur.peek() {
                    let hyphen = c == '-' && cur.peek2().is_some_and(is_word_char);
                    if !is_word_char(c) && !hyphen {
                        break;
                    }
                    word.push(c);
                    cur.bump();
                }
                tokens.push(Token {
                    kind: TokenKind::Word(word),
                    span,
                });
            }
            other => {
                errors.push(Diagnostic::new(
                    Code::Lex,
                    span,
                    format!("unexpected character `{other}`"),
                ));
                cur.bump();
            }
        }
    }
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        lex(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn w(s: &str) -> TokenKind {
        TokenKind::Word(s.into())
    }

    #[test]
    fn arrows_numbers_and_hyphens() {
        assert_eq!(kinds("a->b"), vec![w("a"), TokenKind::Arrow, w("b")]);
        assert_eq!(kinds("-1/2 x-y"), vec![w("-1/2"), w("x-y")]);
        assert_eq!(
            kinds("b2>=b1 # tail"),
            vec![w("b2"), TokenKind::Geq, w("b1")]
        );
        assert_eq!(kinds(r#""a b\"c""#), vec![w("a b\"c")]);
    }

    #[test]
    fn lexical_errors_have_spans() {
        let errs = lex("set A {\n  a $ }").unwrap_err();
        assert_eq!(errs[0].code, Code::Lex);
        assert_eq!(errs[0].span, Span { line: 2, col: 5 });
        assert_eq!(lex("\"open").unwrap_err()[0].code, Code::Lex);
    }
}
