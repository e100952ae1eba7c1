//! Interchange formats: the canonical JSON graph schema, graph6 for small
//! graph corpora (n <= 62), DOT export with the blue-solid / red-dashed
//! convention for 2-colored unions, and the JSON shapes for product
//! digraphs and factorization certificates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, SimpleGraph, MAX_VERTICES};
use crate::matrix::{
    verify_factorization, Factorization, FailureReport, Provenance, WeightedDigraph,
};
use crate::union::ColoredUnion;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph6 supports 1..=62 vertices, got {n}")]
    Graph6Range { n: usize },
    #[error("graph6 string malformed: {reason}")]
    Graph6Malformed { reason: String },
    #[error("unknown provenance {0:?}")]
    Provenance(String),
    #[error("certificate failed re-verification: {0}")]
    BadCertificate(#[from] FailureReport),
}

/// Canonical JSON interchange: `{"n": int, "edges": [[u,v],...], "labels": [...]?}`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn graph_to_json(g: &SimpleGraph) -> String {
    let doc = GraphJson {
        n: g.vertex_count(),
        edges: g.edges(),
        labels: g.labels().map(<[String]>::to_vec),
    };
    serde_json::to_string(&doc).expect("graph serializes")
}

pub fn graph_from_json(s: &str) -> Result<SimpleGraph, IoError> {
    let doc: GraphJson = serde_json::from_str(s)?;
    if doc.n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { n: doc.n }.into());
    }
    let mut g = SimpleGraph::from_edges(doc.n, &doc.edges)?;
    if let Some(labels) = doc.labels {
        g.set_labels(labels)?;
    }
    Ok(g)
}

/// Product digraph as `{"n": int, "arcs": [[i,j,mult],...]}`, arcs sorted
/// row-major with positive multiplicity only.
#[derive(Serialize, Deserialize)]
struct DigraphJson {
    n: usize,
    arcs: Vec<(usize, usize, u32)>,
}

pub fn digraph_to_json(d: &WeightedDigraph) -> String {
    let doc = DigraphJson {
        n: d.vertex_count(),
        arcs: d.arcs(),
    };
    serde_json::to_string(&doc).expect("digraph serializes")
}

/// Certificate schema `{"h": graph, "k": graph, "provenance": str}`.
#[derive(Serialize, Deserialize)]
struct CertificateJson {
    h: GraphJson,
    k: GraphJson,
    provenance: String,
}

fn graph_json_value(g: &SimpleGraph) -> GraphJson {
    GraphJson {
        n: g.vertex_count(),
        edges: g.edges(),
        labels: g.labels().map(<[String]>::to_vec),
    }
}

pub fn certificate_to_json(f: &Factorization) -> String {
    let doc = CertificateJson {
        h: graph_json_value(f.h()),
        k: graph_json_value(f.k()),
        provenance: f.provenance().to_string(),
    };
    serde_json::to_string(&doc).expect("certificate serializes")
}

pub fn certificates_to_json(fs: &[Factorization]) -> String {
    let docs: Vec<CertificateJson> = fs
        .iter()
        .map(|f| CertificateJson {
            h: graph_json_value(f.h()),
            k: graph_json_value(f.k()),
            provenance: f.provenance().to_string(),
        })
        .collect();
    serde_json::to_string(&docs).expect("certificates serialize")
}

/// Parses a certificate and re-verifies it against `g` before returning.
pub fn certificate_from_json(g: &SimpleGraph, s: &str) -> Result<Factorization, IoError> {
    let doc: CertificateJson = serde_json::from_str(s)?;
    let h = graph_from_parts(doc.h)?;
    let k = graph_from_parts(doc.k)?;
    let provenance: Provenance = doc
        .provenance
        .parse()
        .map_err(|_| IoError::Provenance(doc.provenance))?;
    Ok(verify_factorization(g, &h, &k, provenance)?)
}

fn graph_from_parts(doc: GraphJson) -> Result<SimpleGraph, IoError> {
    if doc.n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { n: doc.n }.into());
    }
    let mut g = SimpleGraph::from_edges(doc.n, &doc.edges)?;
    if let Some(labels) = doc.labels {
        g.set_labels(labels)?;
    }
    Ok(g)
}

/// Standard graph6 encoding for 1 <= n <= 62: byte n+63, then the upper
/// triangle read column by column, packed 6 bits per printable byte.
pub fn to_graph6(g: &SimpleGraph) -> Result<String, IoError> {
    let n = g.vertex_count();
    if n == 0 || n > 62 {
        return Err(IoError::Graph6Range { n });
    }
    let mut out = vec![(n + 63) as u8];
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("printable ASCII"))
}

pub fn from_graph6(s: &str) -> Result<SimpleGraph, IoError> {
    let s = s.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(IoError::Graph6Malformed {
            reason: "empty input".into(),
        });
    }
    let n = bytes[0] as usize;
    if !(63..=125).contains(&n) {
        return Err(IoError::Graph6Malformed {
            reason: format!("bad size byte {}", bytes[0]),
        });
    }
    let n = n - 63;
    if n == 0 {
        return Err(IoError::Graph6Range { n });
    }
    let need_bits = n * (n - 1) / 2;
    let need_bytes = need_bits.div_ceil(6);
    if bytes.len() != 1 + need_bytes {
        return Err(IoError::Graph6Malformed {
            reason: format!(
                "expected {} data bytes for n={}, got {}",
                need_bytes,
                n,
                bytes.len() - 1
            ),
        });
    }
    let mut g = SimpleGraph::new(n);
    let mut bit = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = bytes[1 + bit / 6];
            if !(63..=126).contains(&byte) {
                return Err(IoError::Graph6Malformed {
                    reason: format!("bad data byte {byte}"),
                });
            }
            let val = (byte - 63) >> (5 - bit % 6) & 1;
            if val == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    Ok(g)
}

fn dot_name(g: &SimpleGraph, v: usize) -> String {
    match g.labels() {
        Some(labels) => format!("{:?}", labels[v]),
        None => v.to_string(),
    }
}

/// Plain DOT export of one graph.
pub fn to_dot(g: &SimpleGraph) -> String {
    let mut out = String::from("graph {\n");
    for v in 0..g.vertex_count() {
        out.push_str(&format!("  {};\n", dot_name(g, v)));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {} -- {};\n", dot_name(g, u), dot_name(g, v)));
    }
    out.push_str("}\n");
    out
}

/// DOT export of a 2-colored union: blue solid edges from the first factor,
/// red dashed from the second.
pub fn union_to_dot(cu: &ColoredUnion) -> String {
    let g = cu.blue();
    let mut out = String::from("graph {\n");
    for v in 0..cu.vertex_count() {
        out.push_str(&format!("  {};\n", dot_name(g, v)));
    }
    for (u, v) in cu.blue().edges() {
        out.push_str(&format!(
            "  {} -- {} [color=blue, style=solid];\n",
            dot_name(g, u),
            dot_name(g, v)
        ));
    }
    for (u, v) in cu.red().edges() {
        out.push_str(&format!(
            "  {} -- {} [color=red, style=dashed];\n",
            dot_name(g, u),
            dot_name(g, v)
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_cycle, make_petersen, SimpleGraph};
    use crate::matrix::product;
    use crate::union::build_union;

    #[test]
    fn json_round_trip() {
        let mut g = make_cycle(5).unwrap();
        g.set_labels(vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()])
            .unwrap();
        let s = graph_to_json(&g);
        let back = graph_from_json(&s).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.labels(), g.labels());
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(graph_from_json("{\"n\": 2, \"edges\": [[0,0]]}").is_err());
        assert!(graph_from_json("{\"n\": 2, \"edges\": [[0,5]]}").is_err());
        assert!(graph_from_json("{\"n\": 2, \"edges\": [[0,1],[1,0]]}").is_err());
        assert!(graph_from_json("{\"n\": 2, \"edges\": [], \"labels\": [\"x\",\"x\"]}").is_err());
    }

    #[test]
    fn graph6_known_vector() {
        // 5 vertices, edges {0,2},{0,4},{1,3},{3,4} encodes as "DQc".
        let g = SimpleGraph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(to_graph6(&g).unwrap(), "DQc");
        assert_eq!(from_graph6("DQc").unwrap(), g);
    }

    #[test]
    fn graph6_round_trip_petersen() {
        let p = make_petersen();
        assert_eq!(from_graph6(&to_graph6(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn graph6_rejects_bad_input() {
        assert!(from_graph6("").is_err());
        assert!(from_graph6("D").is_err());
        assert!(to_graph6(&SimpleGraph::new(63)).is_err());
        assert!(to_graph6(&SimpleGraph::new(0)).is_err());
    }

    #[test]
    fn digraph_json_shape() {
        let m = SimpleGraph::from_edges(2, &[(0, 1)]).unwrap();
        let d = product(&m, &m).unwrap();
        assert_eq!(digraph_to_json(&d), r#"{"n":2,"arcs":[[0,0,1],[1,1,1]]}"#);
    }

    #[test]
    fn dot_union_colors() {
        let blue = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let red = SimpleGraph::from_edges(3, &[(1, 2)]).unwrap();
        let cu = build_union(&blue, &red).unwrap();
        let dot = union_to_dot(&cu);
        assert!(dot.contains("0 -- 1 [color=blue, style=solid];"));
        assert!(dot.contains("1 -- 2 [color=red, style=dashed];"));
    }

    #[test]
    fn certificate_round_trip() {
        let k22 = SimpleGraph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let m = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let f = verify_factorization(&k22, &m, &k22, Provenance::External).unwrap();
        let s = certificate_to_json(&f);
        let back = certificate_from_json(&k22, &s).unwrap();
        assert_eq!(back, f);

        // Tampered certificate fails re-verification.
        let bad = s.replace("[2,3]", "[1,3]");
        assert!(certificate_from_json(&k22, &bad).is_err());
    }
}
