//! Plain-text graph files.
//!
//! ```text
//! # comment
//! n 3
//! e 1 2
//! l 2
//! ```
//!
//! `e u v` is an undirected edge, `d u v` a directed arc and `l u` a loop.
//! A file uses either `e` or `d` lines, never both; a file with neither is
//! undirected.

use structstab::{Digraph, Error, Graph, Result, ZeroPattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFile {
    Undirected(Graph),
    Directed(Digraph),
}

impl GraphFile {
    pub fn n(&self) -> usize {
        match self {
            GraphFile::Undirected(g) => g.n(),
            GraphFile::Directed(d) => d.n(),
        }
    }

    pub fn to_pattern(&self) -> ZeroPattern {
        match self {
            GraphFile::Undirected(g) => ZeroPattern::from(g),
            GraphFile::Directed(d) => d.to_pattern(),
        }
    }

    pub fn to_digraph(&self) -> Digraph {
        match self {
            GraphFile::Undirected(g) => Digraph::from_graph(g),
            GraphFile::Directed(d) => d.clone(),
        }
    }

    /// Canonical text: header, then sorted edge or arc lines, then sorted
    /// loop lines.
    pub fn serialize(&self) -> String {
        match self {
            GraphFile::Undirected(g) => write_graph(g),
            GraphFile::Directed(d) => write_digraph(d),
        }
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("n {}\n", g.n());
    for &(u, v) in g.edges() {
        s.push_str(&format!("e {u} {v}\n"));
    }
    for v in g.loops() {
        s.push_str(&format!("l {v}\n"));
    }
    s
}

pub fn write_digraph(d: &Digraph) -> String {
    let mut s = format!("n {}\n", d.n());
    for &(u, v) in d.arcs().iter().filter(|(u, v)| u != v) {
        s.push_str(&format!("d {u} {v}\n"));
    }
    for &(v, _) in d.arcs().iter().filter(|(u, v)| u == v) {
        s.push_str(&format!("l {v}\n"));
    }
    s
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Edge,
    Arc,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("malformed token '{tok}'")))
}

fn parse_id(tok: &str, n: usize, line: usize) -> Result<usize> {
    let id = parse_num(tok, line)?;
    if id == 0 || id > n {
        return Err(parse_err(line, format!("node id {id} out of range [1, {n}]")));
    }
    Ok(id)
}

fn expect_arity(toks: &[&str], arity: usize, line: usize) -> Result<()> {
    if toks.len() == arity {
        Ok(())
    } else {
        Err(parse_err(line, format!("expected {} field(s) after '{}'", arity - 1, toks[0])))
    }
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let mut n: Option<usize> = None;
    let mut kind: Option<Kind> = None;
    let mut pairs = Vec::new();
    let mut loops = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks[0] == "n" {
            if n.is_some() {
                return Err(parse_err(line, "duplicate header"));
            }
            expect_arity(&toks, 2, line)?;
            let count = parse_num(toks[1], line)?;
            if count == 0 {
                return Err(parse_err(line, "node count must be at least 1"));
            }
            n = Some(count);
            continue;
        }
        let Some(count) = n else {
            return Err(parse_err(line, "missing header 'n <count>'"));
        };
        match toks[0] {
            tag @ ("e" | "d") => {
                let this = if tag == "e" { Kind::Edge } else { Kind::Arc };
                if kind.is_some_and(|k| k != this) {
                    return Err(parse_err(line, "mixed edge kinds"));
                }
                kind = Some(this);
                expect_arity(&toks, 3, line)?;
                let u = parse_id(toks[1], count, line)?;
                let v = parse_id(toks[2], count, line)?;
                if u == v {
                    return Err(parse_err(line, format!("loop on {u} must be written 'l {u}'")));
                }
                pairs.push((u, v));
            }
            "l" => {
                expect_arity(&toks, 2, line)?;
                loops.push(parse_id(toks[1], count, line)?);
            }
            other => return Err(parse_err(line, format!("unknown line kind '{other}'"))),
        }
    }
    let Some(n) = n else {
        return Err(parse_err(last_line.max(1), "missing header 'n <count>'"));
    };
    Ok(match kind {
        Some(Kind::Arc) => {
            pairs.extend(loops.iter().map(|&v| (v, v)));
            GraphFile::Directed(Digraph::new(n, &pairs)?)
        }
        _ => GraphFile::Undirected(Graph::new(n, &pairs, &loops)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_looped_node() {
        let f = parse_graph_file("n 1\nl 1\n").unwrap();
        assert_eq!(f, GraphFile::Undirected(Graph::new(1, &[], &[1]).unwrap()));
    }

    #[test]
    fn nested_digraph() {
        let f = parse_graph_file("n 3\nd 1 2\nd 2 1\nd 3 2\nd 1 3\nl 2\n").unwrap();
        let d = Digraph::new(3, &[(1, 2), (2, 1), (3, 2), (1, 3), (2, 2)]).unwrap();
        assert_eq!(f, GraphFile::Directed(d));
        assert_eq!(f.serialize(), "n 3\nd 1 2\nd 1 3\nd 2 1\nd 3 2\nl 2\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let msg = |t: &str| parse_graph_file(t).unwrap_err().to_string();
        assert_eq!(msg("n 2\ne 1 2\nd 2 1\n"), "mixed edge kinds at line 3");
        assert_eq!(msg("# c\nn 2\nn 2\n"), "duplicate header at line 3");
        assert_eq!(msg("n 2\ne 1 3\n"), "node id 3 out of range [1, 2] at line 2");
        assert_eq!(msg("n 2\ne 1 x\n"), "malformed token 'x' at line 2");
        assert_eq!(msg("e 1 2\nn 2\n"), "missing header 'n <count>' at line 1");
        assert_eq!(msg("n 2\nq 1\n"), "unknown line kind 'q' at line 2");
        assert_eq!(msg("n 2\ne 1 1\n"), "loop on 1 must be written 'l 1' at line 2");
        assert_eq!(msg("n 2\nl\n"), "expected 1 field(s) after 'l' at line 2");
        assert_eq!(msg("n 0\n"), "node count must be at least 1 at line 1");
        assert_eq!(msg(""), "missing header 'n <count>' at line 1");
    }

    #[test]
    fn comments_and_blank_lines() {
        let f = parse_graph_file("# star\n\nn 4\n  e 4 1 \n# x\ne 2 4\ne 3 4\n").unwrap();
        assert_eq!(f.serialize(), "n 4\ne 1 4\ne 2 4\ne 3 4\n");
    }

    #[test]
    fn canonical_round_trip() {
        for text in ["n 3\ne 1 2\ne 2 3\nl 1\nl 3\n", "n 2\nd 2 1\nl 1\n", "n 5\n"] {
            assert_eq!(parse_graph_file(text).unwrap().serialize(), text);
        }
    }
}
