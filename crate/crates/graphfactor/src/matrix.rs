//! Exact integer adjacency-matrix arithmetic: the weighted product digraph
//! HK, verification of candidate factorizations A = BC, and the degree laws
//! every genuine factorization obeys.

use std::fmt;

use thiserror::Error;

use crate::graph::SimpleGraph;

/// Weighted digraph HK: arc (i,j) carries the number of length-2 paths
/// whose first edge lies in H and second in K. Loops live on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    arcs: Vec<u32>,
}

impl WeightedDigraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc(&self, i: usize, j: usize) -> u32 {
        self.arcs[i * self.n + j]
    }

    /// Arcs with positive multiplicity as (i, j, mult), row-major order.
    pub fn arcs(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let m = self.arc(i, j);
                if m > 0 {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    /// Reads the matrix back as a simple graph when it is 0/1-valued,
    /// symmetric and has zero diagonal; `None` otherwise.
    pub fn decode_simple(&self) -> Option<SimpleGraph> {
        let mut g = SimpleGraph::new(self.n);
        for i in 0..self.n {
            if self.arc(i, i) != 0 {
                return None;
            }
            for j in i + 1..self.n {
                let (a, b) = (self.arc(i, j), self.arc(j, i));
                if a != b || a > 1 {
                    return None;
                }
                if a == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        Some(g)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("vertex count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

/// The matrix product BC of two adjacency matrices, as arc multiplicities:
/// entry (i,j) counts the walks i -H- w -K- j.
pub fn product(h: &SimpleGraph, k: &SimpleGraph) -> Result<WeightedDigraph, MatrixError> {
    let n = h.vertex_count();
    if n != k.vertex_count() {
        return Err(MatrixError::SizeMismatch {
            left: n,
            right: k.vertex_count(),
        });
    }
    let mut arcs = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            // Entries are bounded by n <= MAX_VERTICES, so u32 never overflows.
            arcs[i * n + j] = h.common_neighbors(i, k, j) as u32;
        }
    }
    Ok(WeightedDigraph { n, arcs })
}

/// How a factorization was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Oracle,
    MatchingSearch,
    Construction,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Oracle => "oracle",
            Provenance::MatchingSearch => "matching-search",
            Provenance::Construction => "construction",
            Provenance::External => "external",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Provenance::Oracle),
            "matching-search" => Ok(Provenance::MatchingSearch),
            "construction" => Ok(Provenance::Construction),
            "external" => Ok(Provenance::External),
            other => Err(format!("unknown provenance {other:?}")),
        }
    }
}

/// A verified triple (G, H, K) with A = BC. Constructed only through
/// [`verify_factorization`], so holding one is proof the identity checks out
/// and the factors are edge-disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    g: SimpleGraph,
    h: SimpleGraph,
    k: SimpleGraph,
    provenance: Provenance,
}

impl Factorization {
    pub fn g(&self) -> &SimpleGraph {
        &self.g
    }

    pub fn h(&self) -> &SimpleGraph {
        &self.h
    }

    pub fn k(&self) -> &SimpleGraph {
        &self.k
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// True when the named factor is a perfect matching (1-regular).
    pub fn factor_is_perfect_matching(&self, first: bool) -> bool {
        let f = if first { &self.h } else { &self.k };
        (0..f.vertex_count()).all(|v| f.degree(v) == 1)
    }

    pub fn has_perfect_matching_factor(&self) -> bool {
        self.factor_is_perfect_matching(true) || self.factor_is_perfect_matching(false)
    }
}

/// Why a candidate triple failed verification. The first violating entry is
/// reported in row-major order; `residual` is filled only by the verbose path.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FailureReport {
    #[error("vertex count mismatch: G has {g}, H has {h}, K has {k}")]
    SizeMismatch { g: usize, h: usize, k: usize },
    #[error("product entry ({i},{j}) is {got}, adjacency requires {want}")]
    EntryMismatch {
        i: usize,
        j: usize,
        got: u32,
        want: u32,
        residual: Option<Vec<(usize, usize, u32, u32)>>,
    },
}

fn check_sizes(g: &SimpleGraph, h: &SimpleGraph, k: &SimpleGraph) -> Result<(), FailureReport> {
    if g.vertex_count() != h.vertex_count() || g.vertex_count() != k.vertex_count() {
        return Err(FailureReport::SizeMismatch {
            g: g.vertex_count(),
            h: h.vertex_count(),
            k: k.vertex_count(),
        });
    }
    Ok(())
}

/// Checks A = BC exactly. On success the returned [`Factorization`] is the
/// verified triple; on failure the first violating entry (i, j, got, want).
pub fn verify_factorization(
    g: &SimpleGraph,
    h: &SimpleGraph,
    k: &SimpleGraph,
    provenance: Provenance,
) -> Result<Factorization, FailureReport> {
    check_sizes(g, h, k)?;
    let n = g.vertex_count();
    for i in 0..n {
        for j in 0..n {
            let got = h.common_neighbors(i, k, j) as u32;
            let want = u32::from(i != j && g.has_edge(i, j));
            if got != want {
                return Err(FailureReport::EntryMismatch {
                    i,
                    j,
                    got,
                    want,
                    residual: None,
                });
            }
        }
    }
    Ok(Factorization {
        g: g.clone(),
        h: h.clone(),
        k: k.clone(),
        provenance,
    })
}

/// Like [`verify_factorization`] but a failure carries every violating entry.
pub fn verify_factorization_verbose(
    g: &SimpleGraph,
    h: &SimpleGraph,
    k: &SimpleGraph,
    provenance: Provenance,
) -> Result<Factorization, FailureReport> {
    check_sizes(g, h, k)?;
    let n = g.vertex_count();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let got = h.common_neighbors(i, k, j) as u32;
            let want = u32::from(i != j && g.has_edge(i, j));
            if got != want {
                bad.push((i, j, got, want));
            }
        }
    }
    match bad.first().copied() {
        None => Ok(Factorization {
            g: g.clone(),
            h: h.clone(),
            k: k.clone(),
            provenance,
        }),
        Some((i, j, got, want)) => Err(FailureReport::EntryMismatch {
            i,
            j,
            got,
            want,
            residual: Some(bad),
        }),
    }
}

/// Outcome of a per-vertex or per-pair law check, with the first witness of
/// failure when the law does not hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawCheck<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> LawCheck<W> {
    fn ok() -> Self {
        LawCheck {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: W) -> Self {
        LawCheck {
            holds: false,
            witness: Some(w),
        }
    }
}

/// Witness for a degree-product violation: deg_G(v) != deg_H(v) * deg_K(v).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeProductWitness {
    pub vertex: usize,
    pub deg_g: usize,
    pub deg_h: usize,
    pub deg_k: usize,
}

/// Checks deg_G(v) = deg_H(v) * deg_K(v) at every vertex.
pub fn degree_product_holds(
    g: &SimpleGraph,
    h: &SimpleGraph,
    k: &SimpleGraph,
) -> Result<LawCheck<DegreeProductWitness>, MatrixError> {
    if g.vertex_count() != h.vertex_count() || g.vertex_count() != k.vertex_count() {
        return Err(MatrixError::SizeMismatch {
            left: g.vertex_count(),
            right: h.vertex_count().max(k.vertex_count()),
        });
    }
    for v in 0..g.vertex_count() {
        let (dg, dh, dk) = (g.degree(v), h.degree(v), k.degree(v));
        if dg != dh * dk {
            return Ok(LawCheck::fail(DegreeProductWitness {
                vertex: v,
                deg_g: dg,
                deg_h: dh,
                deg_k: dk,
            }));
        }
    }
    Ok(LawCheck::ok())
}

/// Witness for a degree-constancy violation: an edge of one factor whose
/// endpoints have different degrees in the other factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstancyWitness {
    pub u: usize,
    pub v: usize,
    /// True when {u,v} is an H-edge with deg_K(u) != deg_K(v); false for the
    /// mirrored direction.
    pub edge_in_h: bool,
}

/// Checks that deg_K is constant on H-components and deg_H on K-components.
/// Constancy on a connected component fails exactly when some edge of it has
/// endpoints of unequal degree, so edges are the witnesses.
pub fn k_component_degree_constancy(
    h: &SimpleGraph,
    k: &SimpleGraph,
) -> Result<LawCheck<ConstancyWitness>, MatrixError> {
    if h.vertex_count() != k.vertex_count() {
        return Err(MatrixError::SizeMismatch {
            left: h.vertex_count(),
            right: k.vertex_count(),
        });
    }
    for (u, v) in h.edges() {
        if k.degree(u) != k.degree(v) {
            return Ok(LawCheck::fail(ConstancyWitness {
                u,
                v,
                edge_in_h: true,
            }));
        }
    }
    for (u, v) in k.edges() {
        if h.degree(u) != h.degree(v) {
            return Ok(LawCheck::fail(ConstancyWitness {
                u,
                v,
                edge_in_h: false,
            }));
        }
    }
    Ok(LawCheck::ok())
}
