//! Syntax tree. Equality ignores spans, so documents compare by content.

use super::Span;

#[derive(Debug, Clone, Eq)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Spanned { node, span }
    }

    /// A node without a source position, for generated documents.
    pub fn bare(node: T) -> Self {
        Spanned {
            node,
            span: Span::default(),
        }
    }
}

impl Spanned<String> {
    pub fn as_str(&self) -> &str {
        &self.node
    }
}

pub type Name = Spanned<String>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Set(SetDecl),
    Rel(RelDecl),
    Preorder(PreorderDecl),
    Tcc(TccDecl),
    Spin(SpinDecl),
    Simulator(SimDecl),
    Processing(ProcDecl),
    Functor(FunctorDecl),
    Check(CheckDecl),
}

impl Block {
    pub fn keyword(&self) -> &'static str {
        match self {
            Block::Set(_) => "set",
            Block::Rel(_) => "rel",
            Block::Preorder(_) => "preorder",
            Block::Tcc(_) => "tcc",
            Block::Spin(_) => "spin",
            Block::Simulator(_) => "simulator",
            Block::Processing(_) => "processing",
            Block::Functor(_) => "functor",
            Block::Check(_) => "check",
        }
    }

    pub fn name(&self) -> &Name {
        match self {
            Block::Set(d) => &d.name,
            Block::Rel(d) => &d.name,
            Block::Preorder(d) => &d.name,
            Block::Tcc(d) => &d.name,
            Block::Spin(d) => &d.name,
            Block::Simulator(d) => &d.name,
            Block::Processing(d) => &d.name,
            Block::Functor(d) => &d.name,
            Block::Check(d) => &d.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDecl {
    pub name: Name,
    pub elements: Vec<Name>,
}

/// A single label, or a parenthesized tuple for product sets.
#[derive(Debug, Clone, Eq)]
pub struct ElemRef {
    pub parts: Vec<Name>,
    pub span: Span,
}

impl PartialEq for ElemRef {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl ElemRef {
    pub fn single(label: impl Into<String>) -> Self {
        ElemRef {
            parts: vec![Spanned::bare(label.into())],
            span: Span::default(),
        }
    }

    pub fn tuple(labels: impl IntoIterator<Item = String>) -> Self {
        ElemRef {
            parts: labels.into_iter().map(Spanned::bare).collect(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub from: ElemRef,
    pub to: ElemRef,
}

/// Factors of a product type; `I` is the unit.
pub type TypeExpr = Vec<Name>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelDecl {
    pub name: Name,
    pub dom: TypeExpr,
    pub cod: TypeExpr,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreorderDecl {
    pub name: Name,
    pub carrier: Name,
    /// `(x, y)` for `x >= y`.
    pub edges: Vec<(Name, Name)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TccBody {
    Explicit {
        targets: Name,
        contexts: Name,
        behaviors: Name,
        eval: Name,
        order: Name,
        ambient: Name,
    },
    Spin {
        systems: Vec<Name>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TccDecl {
    pub name: Name,
    pub body: TccBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub vertices: Vec<Name>,
    pub energies: Vec<Name>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinDecl {
    pub name: Name,
    pub vertex_set: Name,
    pub vertices: Vec<Name>,
    pub levels: Name,
    pub facets: Vec<Facet>,
    pub delta: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelSource {
    Ref(Name),
    Inline(Vec<Pair>),
    /// `s_C(p, c) = c` wherever the compiler is defined.
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimDecl {
    pub name: Name,
    pub tcc: Name,
    pub programs: Name,
    pub compiler: RelSource,
    pub context: RelSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcDecl {
    pub name: Name,
    pub tcc: Name,
    pub programs: Name,
    pub targets: RelSource,
    pub contexts: RelSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectMap {
    pub from: Name,
    pub to: Name,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub maps: Vec<ObjectMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckDecl {
    pub name: Name,
    pub words: Vec<Name>,
}
