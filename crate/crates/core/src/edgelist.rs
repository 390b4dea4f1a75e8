//! Plain-text edge lists.
//!
//! ```text
//! # 3-cycle
//! n 3
//! 1 2 2
//! 2 3 3/2
//! 3 1 0.25
//! ```
//!
//! `#` starts a comment. The first remaining line is `n <count>`; each later
//! line is `i j w` with `w` an integer, a fraction `p/q` or a finite decimal.

use thiserror::Error;

use crate::graph::{GraphError, WeightedDigraph};
use crate::linalg::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input has no `n <count>` header")]
    MissingHeader,
    #[error("line {line}: expected `n <count>`, found `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: expected `i j w`, found `{text}`")]
    BadEdge { line: usize, text: String },
    #[error("line {line}: cannot read weight `{text}`")]
    BadWeight { line: usize, text: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_edge_list(input: &str) -> Result<WeightedDigraph, ParseError> {
    let mut lines = input.lines().enumerate().filter_map(|(k, raw)| {
        let text = raw.split('#').next().unwrap_or("").trim();
        (!text.is_empty()).then_some((k + 1, text))
    });

    let (line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count.parse::<usize>().ok(),
        _ => None,
    }
    .ok_or_else(|| ParseError::BadHeader {
        line,
        text: header.to_string(),
    })?;

    let mut edges = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [i, j, w] = fields.as_slice() else {
            return Err(ParseError::BadEdge {
                line,
                text: text.to_string(),
            });
        };
        let (Ok(i), Ok(j)) = (i.parse::<usize>(), j.parse::<usize>()) else {
            return Err(ParseError::BadEdge {
                line,
                text: text.to_string(),
            });
        };
        let w = parse_rational(w).ok_or_else(|| ParseError::BadWeight {
            line,
            text: w.to_string(),
        })?;
        edges.push((i, j, w));
    }
    Ok(WeightedDigraph::new(n, edges)?)
}

/// Renders a graph in the format [`parse_edge_list`] reads.
pub fn write_edge_list(g: &WeightedDigraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (i, j, w) in g.edges() {
        out.push_str(&format!("{i} {j} {w}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;

    #[test]
    fn parses_all_weight_forms() {
        let g = parse_edge_list(
            "# demo\n\nn 3   # three vertices\n1 2 -3\n2 3 7/2\n3 1 0.25\n",
        )
        .unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(1, 2), Rational::from_integer((-3).into()));
        assert_eq!(g.weight(2, 3), Rational::new(7.into(), 2.into()));
        assert_eq!(g.weight(3, 1), Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn reports_errors_with_line_numbers() {
        assert_eq!(parse_edge_list("# only comments\n"), Err(ParseError::MissingHeader));
        assert!(matches!(
            parse_edge_list("nodes 3\n"),
            Err(ParseError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("n 2\n1 2\n"),
            Err(ParseError::BadEdge { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("n 2\n1 2 x\n"),
            Err(ParseError::BadWeight { line: 2, .. })
        ));
        assert_eq!(
            parse_edge_list("n 2\n1 1 1\n"),
            Err(ParseError::Graph(GraphError::SelfLoop(1)))
        );
        assert_eq!(
            parse_edge_list("n 0\n"),
            Err(ParseError::Graph(GraphError::NoVertices))
        );
    }

    #[test]
    fn write_then_parse() {
        let g = parse_edge_list("n 3\n1 2 -3\n2 3 7/2\n3 1 0.25\n").unwrap();
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}
