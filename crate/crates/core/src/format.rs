//! Line-oriented text format for graphs with optional rotation systems,
//! plus DOT output.
//!
//! ```text
//! # triangle
//! v 1
//! v 2
//! v 3
//! e a 1 2
//! e b 2 3
//! e c 3 1
//! rot 1: a.1 c.2
//! rot 2: b.1 a.2
//! rot 3: c.1 b.2
//! ```
//!
//! A dart is written `<edge>.<slot>` with slot 1 for the first endpoint of
//! the edge and 2 for the second. Rotations are either given for every
//! vertex or for none.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Dart, GraphBuilder, GraphError, Multigraph, RotationSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Parsed graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Multigraph,
    pub rotation: Option<RotationSystem>,
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut builder = GraphBuilder::new();
    let mut rot_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let (Some(id), None) = (tokens.next(), tokens.next()) else {
                    return Err(syntax(line_no, "expected `v <id>`"));
                };
                builder.add_vertex(id)?;
            }
            Some("e") => {
                let (Some(id), Some(u), Some(v), None) =
                    (tokens.next(), tokens.next(), tokens.next(), tokens.next())
                else {
                    return Err(syntax(line_no, "expected `e <id> <u> <v>`"));
                };
                builder.add_edge(id, u, v)?;
            }
            Some("rot") => {
                let Some(head) = tokens.next() else {
                    return Err(syntax(line_no, "expected `rot <v>: <darts>`"));
                };
                // Accept both `rot v: ...` and `rot v : ...`.
                let vertex = match head.strip_suffix(':') {
                    Some(v) => v.to_string(),
                    None => {
                        if tokens.next() != Some(":") {
                            return Err(syntax(line_no, "missing `:` after rotation vertex"));
                        }
                        head.to_string()
                    }
                };
                rot_lines.push((line_no, vertex, tokens.map(str::to_string).collect()));
            }
            Some(other) => return Err(syntax(line_no, format!("unknown record `{other}`"))),
            None => unreachable!(),
        }
    }
    let graph = builder.finish();
    if rot_lines.is_empty() {
        return Ok(GraphFile { graph, rotation: None });
    }

    let mut rotations: Vec<Option<Vec<Dart>>> = vec![None; graph.vertex_count()];
    for (line_no, vertex, darts) in rot_lines {
        let v = graph
            .vertex_by_name(&vertex)
            .ok_or_else(|| syntax(line_no, format!("unknown vertex `{vertex}`")))?;
        if rotations[v].is_some() {
            return Err(syntax(line_no, format!("second rotation for vertex `{vertex}`")));
        }
        let parsed = darts
            .iter()
            .map(|token| parse_dart(&graph, token).map_err(|m| syntax(line_no, m)))
            .collect::<Result<Vec<_>, _>>()?;
        rotations[v] = Some(parsed);
    }
    if let Some(v) = rotations.iter().position(Option::is_none) {
        // An isolated vertex has an empty rotation and may be omitted.
        if rotations
            .iter()
            .enumerate()
            .any(|(u, r)| r.is_none() && graph.degree(u) > 0)
        {
            return Err(syntax(0, format!("no rotation given for vertex `{}`", graph.vertex_name(v))));
        }
    }
    let rotation = RotationSystem::new(&graph, rotations.into_iter().map(Option::unwrap_or_default).collect())?;
    Ok(GraphFile { graph, rotation: Some(rotation) })
}

fn parse_dart(graph: &Multigraph, token: &str) -> Result<Dart, String> {
    let (edge, slot) = token
        .rsplit_once('.')
        .ok_or_else(|| format!("dart `{token}` is not of the form <edge>.<1|2>"))?;
    let e = graph.edge_by_name(edge).ok_or_else(|| format!("unknown edge `{edge}`"))?;
    match slot {
        "1" => Ok(Dart::new(e, 0)),
        "2" => Ok(Dart::new(e, 1)),
        _ => Err(format!("dart `{token}` has slot other than 1 or 2")),
    }
}

pub fn format_dart(graph: &Multigraph, d: Dart) -> String {
    format!("{}.{}", graph.edge_name(d.edge()), d.side() + 1)
}

/// Serializes a graph; vertex, edge and rotation order are preserved, so
/// parsing the output gives back identical structures.
pub fn write_graph(graph: &Multigraph, rotation: Option<&RotationSystem>) -> String {
    let mut out = String::new();
    for v in graph.vertices() {
        writeln!(out, "v {}", graph.vertex_name(v)).unwrap();
    }
    for e in graph.edges() {
        let [a, b] = graph.ends(e);
        writeln!(out, "e {} {} {}", graph.edge_name(e), graph.vertex_name(a), graph.vertex_name(b)).unwrap();
    }
    if let Some(rot) = rotation {
        for v in graph.vertices() {
            write!(out, "rot {}:", graph.vertex_name(v)).unwrap();
            for &d in rot.at(v) {
                write!(out, " {}", format_dart(graph, d)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Undirected DOT rendering. Edge labels carry edge ids.
pub fn write_dot(graph: &Multigraph, name: &str) -> String {
    let mut out = format!("graph {} {{\n", dot_id(name));
    for v in graph.vertices() {
        writeln!(out, "  {};", dot_id(graph.vertex_name(v))).unwrap();
    }
    for e in graph.edges() {
        let [a, b] = graph.ends(e);
        writeln!(
            out,
            "  {} -- {} [label={}];",
            dot_id(graph.vertex_name(a)),
            dot_id(graph.vertex_name(b)),
            dot_id(graph.edge_name(e))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Quotes a DOT identifier unless it is a plain alphanumeric word.
pub(crate) fn dot_id(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.starts_with(|c: char| c.is_ascii_digit());
    let numeral = !s.is_empty() && s.chars().all(|c| c.is_ascii_digit());
    if plain || numeral {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Faces as one line each: `face <id> <degree>: <dart> ...`.
pub fn write_faces(graph: &Multigraph, faces: &crate::graph::FaceSet) -> String {
    let mut out = String::new();
    for (i, face) in faces.faces().iter().enumerate() {
        write!(out, "face f{i} {}:", face.len()).unwrap();
        for &d in face {
            write!(out, " {}", format_dart(graph, d)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "\
# triangle
v 1
v 2
v 3
e a 1 2
e b 2 3
e c 3 1   # closing edge
rot 1: a.1 c.2
rot 2: b.1 a.2
rot 3: c.1 b.2
";

    #[test]
    fn parse_triangle() {
        let file = parse_graph(TRIANGLE).unwrap();
        assert_eq!(file.graph.vertex_count(), 3);
        assert_eq!(file.graph.edge_count(), 3);
        let rot = file.rotation.unwrap();
        assert_eq!(rot.at(0), &[Dart::new(0, 0), Dart::new(2, 1)]);
    }

    #[test]
    fn round_trip_is_exact() {
        let file = parse_graph(TRIANGLE).unwrap();
        let text = write_graph(&file.graph, file.rotation.as_ref());
        let again = parse_graph(&text).unwrap();
        assert_eq!(file, again);
        assert_eq!(text, write_graph(&again.graph, again.rotation.as_ref()));
    }

    #[test]
    fn dotted_edge_names() {
        let text = "v x\ne a.b x x\nrot x: a.b.2 a.b.1\n";
        let file = parse_graph(text).unwrap();
        assert_eq!(file.rotation.unwrap().at(0), &[Dart(1), Dart(0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_graph("v 1\nx 2\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(parse_graph("e a 1 2\n"), Err(ParseError::Graph(_))));
        assert!(parse_graph("v 1\nv 2\ne a 1 2\nrot 1: a.1\n").is_err());
        assert!(parse_graph("v 1\nv 2\ne a 1 2\nrot 1: a.3\nrot 2: a.2\n").is_err());
        assert!(parse_graph("v 1\nv 2\ne a 1 2\nrot 1: a.2\nrot 2: a.1\n").is_err());
    }

    #[test]
    fn dot_quotes_when_needed() {
        assert_eq!(dot_id("abc"), "abc");
        assert_eq!(dot_id("12"), "12");
        assert_eq!(dot_id("f*"), "\"f*\"");
        let g = crate::graph::named::cycle(2);
        let dot = write_dot(&g, "g");
        assert!(dot.starts_with("graph g {\n"));
        assert_eq!(dot.matches(" -- ").count(), 2);
    }
}
