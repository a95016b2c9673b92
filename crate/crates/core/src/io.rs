//! Lattice files and DOT output.
//!
//! ```text
//! # the square
//! lattice 4
//! cover 0 1
//! cover 0 2
//! cover 1 3
//! cover 2 3
//! uporder 0: 2 1
//! downorder 3: 2 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::congruence::Congruence;
use crate::lattice::{Elem, Lattice};
use crate::planar::PlanarDiagram;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    NotALattice(String),
    BadDiagram(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {}", describe(.kind))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(m) => format!("syntax error: {m}"),
        ParseErrorKind::NotALattice(m) => format!("not a lattice: {m}"),
        ParseErrorKind::BadDiagram(m) => format!("bad diagram: {m}"),
    }
}

/// A parsed file: the lattice, and its diagram when one is determined.
#[derive(Debug, Clone)]
pub struct LatticeFile {
    pub lattice: Arc<Lattice>,
    pub diagram: Option<PlanarDiagram>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    err(line, column, ParseErrorKind::Syntax(msg.into()))
}

/// Parses a lattice file. A diagram is returned when order lines are given,
/// or when the lattice is a chain.
pub fn parse(text: &str) -> Result<LatticeFile, ParseError> {
    let lines: Vec<&str> = text.split('\n').collect();
    if !text.ends_with('\n') {
        let last = lines.len();
        return Err(syntax(last, lines[last - 1].chars().count() + 1, "missing final newline"));
    }
    let mut n: Option<usize> = None;
    let mut covers: Vec<(Elem, Elem)> = Vec::new();
    let mut cover_line: BTreeMap<(Elem, Elem), usize> = BTreeMap::new();
    let mut up: BTreeMap<Elem, (Vec<Elem>, usize)> = BTreeMap::new();
    let mut down: BTreeMap<Elem, (Vec<Elem>, usize)> = BTreeMap::new();

    for (idx, raw) in lines[..lines.len() - 1].iter().enumerate() {
        let lineno = idx + 1;
        let toks = tokens(raw);
        let Some(first) = toks.first() else { continue };
        if first.text.starts_with('#') {
            continue;
        }
        let number = |t: &Token<'_>, what: &str| -> Result<usize, ParseError> {
            t.text
                .parse::<usize>()
                .map_err(|_| syntax(lineno, t.column, format!("expected {what}, found `{}`", t.text)))
        };
        let element = |t: &Token<'_>, n: usize| -> Result<Elem, ParseError> {
            let x = number(t, "an element")?;
            if x >= n {
                return Err(syntax(lineno, t.column, format!("element {x} out of range 0..{n}")));
            }
            Ok(x)
        };
        if first.text == "lattice" {
            if n.is_some() {
                return Err(syntax(lineno, first.column, "repeated `lattice` header"));
            }
            if toks.len() != 2 {
                return Err(syntax(lineno, first.column, "expected `lattice <n>`"));
            }
            let size = number(&toks[1], "a size")?;
            if size == 0 {
                return Err(err(lineno, toks[1].column, ParseErrorKind::NotALattice("empty".into())));
            }
            n = Some(size);
            continue;
        }
        let Some(size) = n else {
            return Err(syntax(lineno, first.column, "expected `lattice <n>` first"));
        };
        match first.text {
            "cover" => {
                if toks.len() != 3 {
                    return Err(syntax(lineno, first.column, "expected `cover <a> <b>`"));
                }
                let a = element(&toks[1], size)?;
                let b = element(&toks[2], size)?;
                if a == b {
                    return Err(err(
                        lineno,
                        toks[2].column,
                        ParseErrorKind::NotALattice(format!("{a} cannot cover itself")),
                    ));
                }
                if cover_line.insert((a, b), lineno).is_some() {
                    return Err(syntax(lineno, first.column, format!("repeated cover {a} {b}")));
                }
                covers.push((a, b));
            }
            "uporder" | "downorder" => {
                let Some(head) = toks.get(1) else {
                    return Err(syntax(lineno, first.column + first.text.len(), "expected `<x>:`"));
                };
                let Some(x_text) = head.text.strip_suffix(':') else {
                    return Err(syntax(lineno, head.column, "expected `<x>:`"));
                };
                let x = element(&Token { text: x_text, column: head.column }, size)?;
                let list = toks[2..]
                    .iter()
                    .map(|t| element(t, size))
                    .collect::<Result<Vec<_>, _>>()?;
                let map = if first.text == "uporder" { &mut up } else { &mut down };
                if map.insert(x, (list, lineno)).is_some() {
                    return Err(syntax(lineno, first.column, format!("repeated {} for {x}", first.text)));
                }
            }
            other => return Err(syntax(lineno, first.column, format!("unknown directive `{other}`"))),
        }
    }

    let Some(size) = n else {
        return Err(syntax(1, 1, "missing `lattice <n>` header"));
    };
    let lattice = Arc::new(Lattice::from_covers(size, &covers).map_err(|e| {
        let line = match &e {
            crate::lattice::LatticeError::NotHasse(a, b) => cover_line.get(&(*a, *b)).copied().unwrap_or(1),
            _ => 1,
        };
        err(line, 1, ParseErrorKind::NotALattice(e.to_string()))
    })?);

    if up.is_empty() && down.is_empty() {
        let diagram = PlanarDiagram::trivial(lattice.clone());
        return Ok(LatticeFile { lattice, diagram });
    }
    let mut up_orders = Vec::with_capacity(size);
    let mut down_orders = Vec::with_capacity(size);
    for x in lattice.elements() {
        for (map, covers, orders, what) in [
            (&up, lattice.upper_covers(x), &mut up_orders, "uporder"),
            (&down, lattice.lower_covers(x), &mut down_orders, "downorder"),
        ] {
            match map.get(&x) {
                Some((list, _)) => orders.push(list.clone()),
                None if covers.len() <= 1 => orders.push(covers.to_vec()),
                None => {
                    return Err(err(
                        1,
                        1,
                        ParseErrorKind::BadDiagram(format!("missing {what} for {x}")),
                    ))
                }
            }
        }
    }
    let diagram = PlanarDiagram::new(lattice.clone(), up_orders, down_orders).map_err(|e| {
        let line = up.values().chain(down.values()).map(|(_, l)| *l).min().unwrap_or(1);
        err(line, 1, ParseErrorKind::BadDiagram(e.to_string()))
    })?;
    Ok(LatticeFile { lattice, diagram: Some(diagram) })
}

/// Canonical text of a lattice without a diagram.
pub fn emit_lattice(l: &Lattice) -> String {
    let mut s = format!("lattice {}\n", l.len());
    for (a, b) in l.covers() {
        writeln!(s, "cover {a} {b}").unwrap();
    }
    s
}

/// Canonical text: covers in order, then order lines for elements with
/// more than one upper or lower cover.
pub fn emit_lat(d: &PlanarDiagram) -> String {
    let l = d.lattice();
    let mut s = emit_lattice(l);
    let list = |v: &[Elem]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for x in l.elements() {
        if d.up_order(x).len() > 1 {
            writeln!(s, "uporder {x}: {}", list(d.up_order(x))).unwrap();
        }
    }
    for x in l.elements() {
        if d.down_order(x).len() > 1 {
            writeln!(s, "downorder {x}: {}", list(d.down_order(x))).unwrap();
        }
    }
    s
}

/// What to color in [`emit_dot`].
#[derive(Debug, Clone, Copy, Default)]
pub enum Highlight<'a> {
    #[default]
    None,
    Congruence(&'a Congruence),
    Elements(&'a [Elem]),
}

const PALETTE: [&str; 10] = [
    "lightblue", "salmon", "palegreen", "gold", "plum", "lightgray", "orange", "cyan", "pink", "khaki",
];

/// Graphviz text, bottom to top, one rank per height, rank members left to right.
pub fn emit_dot(d: &PlanarDiagram, highlight: Highlight<'_>) -> String {
    let l = d.lattice();
    let heights = l.heights();
    let number = d.canonical_numbering();
    let mut fill = vec!["white"; l.len()];
    match highlight {
        Highlight::None => {}
        Highlight::Congruence(theta) => {
            for (i, block) in theta.blocks().iter().filter(|b| b.len() > 1).enumerate() {
                for &x in block {
                    fill[x] = PALETTE[i % PALETTE.len()];
                }
            }
        }
        Highlight::Elements(xs) => {
            for &x in xs.iter().filter(|&&x| x < l.len()) {
                fill[x] = PALETTE[0];
            }
        }
    }

    let mut s = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=circle, style=filled, width=0.3, fontsize=10];\n  edge [arrowhead=none];\n");
    for x in l.elements() {
        writeln!(s, "  {x} [fillcolor={}];", fill[x]).unwrap();
    }
    let top = heights.iter().copied().max().unwrap_or(0);
    for h in 0..=top {
        let mut rank: Vec<Elem> = l.elements().filter(|&x| heights[x] == h).collect();
        rank.sort_by_key(|&x| number[x]);
        let names = rank.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
        writeln!(s, "  {{ rank=same; {names}; }}").unwrap();
        if rank.len() > 1 {
            let path = rank.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" -> ");
            writeln!(s, "  {path} [style=invis];").unwrap();
        }
    }
    for x in l.elements() {
        for &y in d.up_order(x) {
            writeln!(s, "  {x} -> {y};").unwrap();
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::grid;

    const SQUARE: &str = "lattice 4\ncover 0 1\ncover 0 2\ncover 1 3\ncover 2 3\nuporder 0: 2 1\ndownorder 3: 2 1\n";

    #[test]
    fn parse_small_files() {
        let f = parse("lattice 1\n").unwrap();
        assert_eq!(f.lattice.len(), 1);
        assert!(f.diagram.is_some());
        let f = parse("# a square\nlattice 4\ncover 0 1\ncover 0 2\n\ncover 1 3\ncover 2 3\n").unwrap();
        assert_eq!(f.lattice.num_covers(), 4);
        assert!(f.diagram.is_none());
        let f = parse(SQUARE).unwrap();
        assert!(f.diagram.unwrap().is_isomorphic(&grid(2, 2).unwrap()));
    }

    #[test]
    fn parse_errors() {
        let e = parse("lattice 2\ncover 0 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        assert!(matches!(e.kind, ParseErrorKind::NotALattice(_)));
        let e = parse("lattice 2\ncover 0 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse("lattice 2\ncover 0 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse("lattice 2\ncover 0 5\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse("cover 0 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("lattice 4\ncover 0 1\ncover 0 2\ncover 1 3\ncover 2 3\nuporder 0: 2 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadDiagram(_)));
        let e = parse("lattice 4\ncover 0 1\ncover 0 2\ncover 1 3\ncover 2 3\nuporder 0: 2 1\ndownorder 3: 1 2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadDiagram(_)));
        let e = parse("lattice 3\ncover 0 1\ncover 0 2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NotALattice(_)));
        let e = parse("lattice 2\n  frobnicate\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn emit_round_trip() {
        let g = grid(3, 2).unwrap();
        let text = emit_lat(&g);
        let back = parse(&text).unwrap().diagram.unwrap();
        assert_eq!(back, g);
        assert_eq!(emit_lat(&back), text);
        assert_eq!(emit_lat(&parse(SQUARE).unwrap().diagram.unwrap()), SQUARE);
    }

    #[test]
    fn dot_output() {
        let g = grid(2, 2).unwrap();
        let dot = emit_dot(&g, Highlight::None);
        assert_eq!(dot.matches(" -> ").count(), 4 + 1);
        assert!(dot.contains("{ rank=same; 2; 1; }"));
        assert!(!dot.contains("lightblue"));
        let full = Congruence::full(4);
        let dot = emit_dot(&g, Highlight::Congruence(&full));
        assert_eq!(dot.matches("fillcolor=lightblue").count(), 4);
        assert_eq!(emit_dot(&g, Highlight::None), emit_dot(&g, Highlight::None));
    }
}
