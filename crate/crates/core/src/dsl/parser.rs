use super::ast::*;
use super::lexer::{lex, Token, TokenKind};
use super::{Code, Diagnostic, Span};

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: Span,
}

pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    let tokens = lex(text)?;
    let end = end_span(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };
    let mut doc = Document::default();
    let mut errors = Vec::new();
    while p.pos < p.tokens.len() {
        let start = p.pos;
        match p.block() {
            Ok(b) => doc.blocks.push(b),
            Err(d) => {
                errors.push(d);
                p.recover(start);
            }
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

fn end_span(text: &str) -> Span {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Span { line, col }
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map_or(self.end, |t| t.span)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = self
            .peek()
            .map_or("end of input".to_string(), TokenKind::describe);
        Diagnostic::new(
            Code::Syntax,
            self.span(),
            format!("expected {wanted}, found {found}"),
        )
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    fn word(&mut self, what: &str) -> PResult<Name> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: TokenKind::Word(w),
                span,
            }) => {
                let name = Spanned::new(w.clone(), *span);
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Word(x)) if x == w)
    }

    fn keyword(&mut self, w: &str) -> PResult<Span> {
        let span = self.span();
        if self.at_word(w) {
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    /// Skips the rest of a block that failed to parse.
    fn recover(&mut self, start: usize) {
        let mut depth = 0usize;
        let mut i = start;
        while i < self.tokens.len() {
            match self.tokens[i].kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace if depth <= 1 => {
                    i += 1;
                    break;
                }
                TokenKind::RBrace => depth -= 1,
                _ => {}
            }
            i += 1;
        }
        self.pos = i.max(start + 1);
    }

    fn words_in_braces(&mut self, what: &str) -> PResult<Vec<Name>> {
        self.expect(TokenKind::LBrace)?;
        let mut out = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            out.push(self.word(what)?);
        }
        Ok(out)
    }

    fn block(&mut self) -> PResult<Block> {
        let kw = self.word("a block keyword")?;
        let block = match kw.as_str() {
            "set" => {
                let name = self.word("a set name")?;
                Block::Set(SetDecl {
                    name,
                    elements: self.words_in_braces("an element")?,
                })
            }
            "rel" => self.rel()?,
            "preorder" => {
                let name = self.word("a preorder name")?;
                self.keyword("on")?;
                let carrier = self.word("a set name")?;
                self.expect(TokenKind::LBrace)?;
                let mut edges = Vec::new();
                while !self.eat(&TokenKind::RBrace) {
                    let x = self.word("an element")?;
                    self.expect(TokenKind::Geq)?;
                    edges.push((x, self.word("an element")?));
                }
                Block::Preorder(PreorderDecl {
                    name,
                    carrier,
                    edges,
                })
            }
            "tcc" => self.tcc()?,
            "spin" => self.spin()?,
            "simulator" => {
                let name = self.word("a simulator name")?;
                self.keyword("in")?;
                let tcc = self.word("an instance name")?;
                self.expect(TokenKind::LBrace)?;
                self.keyword("programs")?;
                let programs = self.word("a set name")?;
                self.keyword("compiler")?;
                let compiler = self.rel_source(false)?;
                self.keyword("context")?;
                let context = self.rel_source(true)?;
                self.expect(TokenKind::RBrace)?;
                Block::Simulator(SimDecl {
                    name,
                    tcc,
                    programs,
                    compiler,
                    context,
                })
            }
            "processing" => {
                let name = self.word("a processing name")?;
                self.keyword("in")?;
                let tcc = self.word("an instance name")?;
                self.expect(TokenKind::LBrace)?;
                self.keyword("programs")?;
                let programs = self.word("a set name")?;
                self.keyword("targets")?;
                let targets = self.rel_source(false)?;
                self.keyword("contexts")?;
                let contexts = self.rel_source(false)?;
                self.expect(TokenKind::RBrace)?;
                Block::Processing(ProcDecl {
                    name,
                    tcc,
                    programs,
                    targets,
                    contexts,
                })
            }
            "functor" => {
                let name = self.word("a functor name")?;
                self.expect(TokenKind::Colon)?;
                let source = self.word("an instance name")?;
                self.expect(TokenKind::Arrow)?;
                let target = self.word("an instance name")?;
                self.expect(TokenKind::LBrace)?;
                let mut maps = Vec::new();
                while !self.eat(&TokenKind::RBrace) {
                    self.keyword("map")?;
                    let from = self.word("a set name")?;
                    self.expect(TokenKind::Arrow)?;
                    let to = self.word("a set name")?;
                    maps.push(ObjectMap {
                        from,
                        to,
                        pairs: self.pairs()?,
                    });
                }
                Block::Functor(FunctorDecl {
                    name,
                    source,
                    target,
                    maps,
                })
            }
            "check" => {
                let name = self.word("a check name")?;
                Block::Check(CheckDecl {
                    name,
                    words: self.words_in_braces("a command word")?,
                })
            }
            other => {
                return Err(Diagnostic::new(
                    Code::Syntax,
                    kw.span,
                    format!("unknown block keyword `{other}`"),
                ));
            }
        };
        Ok(block)
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let mut factors = vec![self.word("a set name")?];
        while self.eat(&TokenKind::Star) {
            factors.push(self.word("a set name")?);
        }
        Ok(factors)
    }

    fn rel(&mut self) -> PResult<Block> {
        let name = self.word("a relation name")?;
        self.expect(TokenKind::Colon)?;
        let dom = self.type_expr()?;
        self.expect(TokenKind::Arrow)?;
        let cod = self.type_expr()?;
        let pairs = self.pairs()?;
        Ok(Block::Rel(RelDecl {
            name,
            dom,
            cod,
            pairs,
        }))
    }

    fn elem(&mut self) -> PResult<ElemRef> {
        let span = self.span();
        if self.eat(&TokenKind::LParen) {
            let mut parts = vec![self.word("an element")?];
            while self.eat(&TokenKind::Comma) {
                parts.push(self.word("an element")?);
            }
            self.expect(TokenKind::RParen)?;
            Ok(ElemRef { parts, span })
        } else {
            Ok(ElemRef {
                parts: vec![self.word("an element or `(`")?],
                span,
            })
        }
    }

    fn pairs(&mut self) -> PResult<Vec<Pair>> {
        self.expect(TokenKind::LBrace)?;
        let mut out = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            let from = self.elem()?;
            self.expect(TokenKind::Arrow)?;
            out.push(Pair {
                from,
                to: self.elem()?,
            });
        }
        Ok(out)
    }

    fn rel_source(&mut self, allow_passthrough: bool) -> PResult<RelSource> {
        if self.peek() == Some(&TokenKind::LBrace) {
            return Ok(RelSource::Inline(self.pairs()?));
        }
        let w = self.word("a relation name or `{`")?;
        if allow_passthrough && w.as_str() == "passthrough" {
            Ok(RelSource::Passthrough)
        } else {
            Ok(RelSource::Ref(w))
        }
    }

    fn tcc(&mut self) -> PResult<Block> {
        let name = self.word("an instance name")?;
        self.expect(TokenKind::LBrace)?;
        if self.at_word("spin") {
            self.pos += 1;
            let mut systems = Vec::new();
            while !self.eat(&TokenKind::RBrace) {
                systems.push(self.word("a spin system name")?);
            }
            return Ok(Block::Tcc(TccDecl {
                name,
                body: TccBody::Spin { systems },
            }));
        }
        const FIELDS: [&str; 6] = [
            "targets",
            "contexts",
            "behaviors",
            "eval",
            "order",
            "ambient",
        ];
        let mut values: [Option<Name>; 6] = Default::default();
        while !self.eat(&TokenKind::RBrace) {
            let key = self.word("an instance field")?;
            let Some(i) = FIELDS.iter().position(|f| *f == key.as_str()) else {
                return Err(Diagnostic::new(
                    Code::Syntax,
                    key.span,
                    format!(
                        "unknown instance field `{}`, expected one of {}",
                        key.node,
                        FIELDS.join(", ")
                    ),
                ));
            };
            if values[i].is_some() {
                return Err(Diagnostic::new(
                    Code::Dup,
                    key.span,
                    format!("field `{}` given twice", key.node),
                ));
            }
            values[i] = Some(self.word("a name")?);
        }
        if let Some(i) = values.iter().position(Option::is_none) {
            return Err(Diagnostic::new(
                Code::Syntax,
                name.span,
                format!("instance `{}` lacks field `{}`", name.node, FIELDS[i]),
            ));
        }
        let [targets, contexts, behaviors, eval, order, ambient] = values.map(Option::unwrap);
        Ok(Block::Tcc(TccDecl {
            name,
            body: TccBody::Explicit {
                targets,
                contexts,
                behaviors,
                eval,
                order,
                ambient,
            },
        }))
    }

    fn spin(&mut self) -> PResult<Block> {
        let name = self.word("a spin system name")?;
        self.expect(TokenKind::LBrace)?;
        self.keyword("vertices")?;
        let vertex_set = self.word("a vertex set name")?;
        let vertices = self.words_in_braces("a vertex")?;
        self.keyword("levels")?;
        let levels = self.word("a level count")?;
        let mut facets = Vec::new();
        while self.at_word("facet") {
            self.pos += 1;
            let vs = self.words_in_braces("a vertex")?;
            facets.push(Facet {
                vertices: vs,
                energies: self.words_in_braces("an energy")?,
            });
        }
        self.keyword("delta")?;
        let delta = self.word("a threshold")?;
        self.expect(TokenKind::RBrace)?;
        Ok(Block::Spin(SpinDecl {
            name,
            vertex_set,
            vertices,
            levels,
            facets,
            delta,
        }))
    }
}
