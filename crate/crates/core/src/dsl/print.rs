use std::fmt::Write;

use super::ast::*;
use super::lexer::{lex, TokenKind};

/// A label as it must appear in source: bare when it lexes as one word.
pub fn quote(label: &str) -> String {
    let bare = matches!(lex(label).as_deref(), Ok([t]) if t.kind == TokenKind::Word(label.to_string()))
        && !label.starts_with('"');
    if bare {
        label.to_string()
    } else {
        let mut out = String::with_capacity(label.len() + 2);
        out.push('"');
        for c in label.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
        out
    }
}

fn words(ws: &[Name]) -> String {
    if ws.is_empty() {
        "{ }".to_string()
    } else {
        let inner: Vec<String> = ws.iter().map(|w| quote(w.as_str())).collect();
        format!("{{ {} }}", inner.join(" "))
    }
}

fn elem(e: &ElemRef) -> String {
    let parts: Vec<String> = e.parts.iter().map(|p| quote(p.as_str())).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap_or_default()
    } else {
        format!("({})", parts.join(","))
    }
}

fn pairs(out: &mut String, ps: &[Pair], indent: usize) {
    if ps.is_empty() {
        out.push_str("{ }");
        return;
    }
    out.push_str("{\n");
    let pad = " ".repeat(indent + 2);
    for p in ps {
        let _ = writeln!(out, "{pad}{}->{}", elem(&p.from), elem(&p.to));
    }
    out.push_str(&" ".repeat(indent));
    out.push('}');
}

fn type_expr(t: &TypeExpr) -> String {
    t.iter()
        .map(|f| quote(f.as_str()))
        .collect::<Vec<_>>()
        .join("*")
}

fn source(out: &mut String, s: &RelSource) {
    match s {
        RelSource::Ref(n) => out.push_str(&quote(n.as_str())),
        RelSource::Inline(ps) => pairs(out, ps, 2),
        RelSource::Passthrough => out.push_str("passthrough"),
    }
}

/// Canonical text of a document.
pub fn to_text(doc: &Document) -> String {
    let mut out = String::new();
    for (i, block) in doc.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let q = |n: &Name| quote(n.as_str());
        match block {
            Block::Set(d) => {
                let _ = writeln!(out, "set {} {}", q(&d.name), words(&d.elements));
            }
            Block::Rel(d) => {
                let _ = write!(
                    out,
                    "rel {} : {} -> {} ",
                    q(&d.name),
                    type_expr(&d.dom),
                    type_expr(&d.cod)
                );
                pairs(&mut out, &d.pairs, 0);
                out.push('\n');
            }
            Block::Preorder(d) => {
                let _ = write!(out, "preorder {} on {} ", q(&d.name), q(&d.carrier));
                if d.edges.is_empty() {
                    out.push_str("{ }\n");
                } else {
                    out.push_str("{\n");
                    for (x, y) in &d.edges {
                        let _ = writeln!(out, "  {}>={}", q(x), q(y));
                    }
                    out.push_str("}\n");
                }
            }
            Block::Tcc(d) => match &d.body {
                TccBody::Explicit {
                    targets,
                    contexts,
                    behaviors,
                    eval,
                    order,
                    ambient,
                } => {
                    let _ = writeln!(out, "tcc {} {{", q(&d.name));
                    for (k, v) in [
                        ("targets", targets),
                        ("contexts", contexts),
                        ("behaviors", behaviors),
                        ("eval", eval),
                        ("order", order),
                        ("ambient", ambient),
                    ] {
                        let _ = writeln!(out, "  {k} {}", q(v));
                    }
                    out.push_str("}\n");
                }
                TccBody::Spin { systems } => {
                    let names: Vec<String> = systems.iter().map(q).collect();
                    let _ = writeln!(out, "tcc {} {{ spin {} }}", q(&d.name), names.join(" "));
                }
            },
            Block::Spin(d) => {
                let _ = writeln!(out, "spin {} {{", q(&d.name));
                let _ = writeln!(
                    out,
                    "  vertices {} {}",
                    q(&d.vertex_set),
                    words(&d.vertices)
                );
                let _ = writeln!(out, "  levels {}", q(&d.levels));
                for f in &d.facets {
                    let _ = writeln!(out, "  facet {} {}", words(&f.vertices), words(&f.energies));
                }
                let _ = writeln!(out, "  delta {}", q(&d.delta));
                out.push_str("}\n");
            }
            Block::Simulator(d) => {
                let _ = writeln!(out, "simulator {} in {} {{", q(&d.name), q(&d.tcc));
                let _ = writeln!(out, "  programs {}", q(&d.programs));
                out.push_str("  compiler ");
                source(&mut out, &d.compiler);
                out.push_str("\n  context ");
                source(&mut out, &d.context);
                out.push_str("\n}\n");
            }
            Block::Processing(d) => {
                let _ = writeln!(out, "processing {} in {} {{", q(&d.name), q(&d.tcc));
                let _ = writeln!(out, "  programs {}", q(&d.programs));
                out.push_str("  targets ");
                source(&mut out, &d.targets);
                out.push_str("\n  contexts ");
                source(&mut out, &d.contexts);
                out.push_str("\n}\n");
            }
            Block::Functor(d) => {
                let _ = write!(
                    out,
                    "functor {} : {} -> {} ",
                    q(&d.name),
                    q(&d.source),
                    q(&d.target)
                );
                if d.maps.is_empty() {
                    out.push_str("{ }\n");
                } else {
                    out.push_str("{\n");
                    for m in &d.maps {
                        let _ = write!(out, "  map {} -> {} ", q(&m.from), q(&m.to));
                        pairs(&mut out, &m.pairs, 2);
                        out.push('\n');
                    }
                    out.push_str("}\n");
                }
            }
            Block::Check(d) => {
                let _ = writeln!(out, "check {} {}", q(&d.name), words(&d.words));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn quoting() {
        assert_eq!(quote("t.a.b"), "t.a.b");
        assert_eq!(quote("-1/2"), "-1/2");
        assert_eq!(quote("a b"), "\"a b\"");
        assert_eq!(quote("set"), "set");
        assert_eq!(quote(""), "\"\"");
        assert_eq!(quote("(a,b)"), "\"(a,b)\"");
    }

    #[test]
    fn round_trip_small() {
        let src =
            "set T { t1 \"t 2\" }\nrel f : T*I -> T { (t1,•)->\"t 2\" }\ncheck c { universal s }";
        let doc = parse(src).unwrap();
        let text = to_text(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        assert_eq!(to_text(&parse(&text).unwrap()), text);
    }
}
