//! The 2-edge-colored union H (+) K: blue edges from H, red edges from K,
//! shared edges tracked with multiplicity 2. Hosts the diamond condition,
//! matched pairs, the pendant-neighbor map phi, and alone sets.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::SimpleGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnionError {
    #[error("vertex count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("union is not simple: edge {{{u},{v}}} occurs in both factors")]
    NotSimple { u: usize, v: usize },
    #[error("vertex {vertex} has {side} degree {degree}, expected exactly 1; the union does not come from a factorization")]
    PendantDegree {
        vertex: usize,
        degree: usize,
        side: Side,
    },
    #[error("({u},{v}) is not a matched pair on the {side} side")]
    NotAMatchedPair { u: usize, v: usize, side: Side },
}

/// Which factor an edge or pendant condition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Blue,
    Red,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Blue => "blue",
            Side::Red => "red",
        })
    }
}

/// H (+) K as a 2-edge-colored multigraph on a shared vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredUnion {
    blue: SimpleGraph,
    red: SimpleGraph,
}

/// Builds the union; edges present in both factors get multiplicity 2.
pub fn build_union(h: &SimpleGraph, k: &SimpleGraph) -> Result<ColoredUnion, UnionError> {
    if h.vertex_count() != k.vertex_count() {
        return Err(UnionError::SizeMismatch {
            left: h.vertex_count(),
            right: k.vertex_count(),
        });
    }
    Ok(ColoredUnion {
        blue: h.clone(),
        red: k.clone(),
    })
}

impl ColoredUnion {
    pub fn vertex_count(&self) -> usize {
        self.blue.vertex_count()
    }

    pub fn blue(&self) -> &SimpleGraph {
        &self.blue
    }

    pub fn red(&self) -> &SimpleGraph {
        &self.red
    }

    pub fn side(&self, side: Side) -> &SimpleGraph {
        match side {
            Side::Blue => &self.blue,
            Side::Red => &self.red,
        }
    }

    /// Edge multiplicity in the multiset union: 0, 1, or 2.
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        u32::from(self.blue.has_edge(u, v)) + u32::from(self.red.has_edge(u, v))
    }

    /// Total colored edge count, shared edges counted twice.
    pub fn colored_edge_count(&self) -> usize {
        self.blue.edge_count() + self.red.edge_count()
    }

    /// Edges occurring in both factors.
    pub fn shared_edges(&self) -> Vec<(usize, usize)> {
        self.blue
            .edges()
            .into_iter()
            .filter(|&(u, v)| self.red.has_edge(u, v))
            .collect()
    }

    /// Simple iff the factors are edge-disjoint.
    pub fn is_simple(&self) -> bool {
        self.shared_edges().is_empty()
    }

    /// Degree in the multiset union (shared edges counted twice).
    pub fn union_degree(&self, v: usize) -> usize {
        self.blue.degree(v) + self.red.degree(v)
    }

    pub fn has_union_edge(&self, u: usize, v: usize) -> bool {
        self.blue.has_edge(u, v) || self.red.has_edge(u, v)
    }
}

/// One offending ordered pair (u,v) of the diamond condition, with the
/// middle vertices of the blue-then-red and red-then-blue length-2 paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondViolation {
    pub u: usize,
    pub v: usize,
    pub blue_red_middles: Vec<usize>,
    pub red_blue_middles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondReport {
    pub holds: bool,
    pub violations: Vec<DiamondViolation>,
}

/// The diamond condition on a simple union: for every ordered pair (u,v),
/// the blue-then-red and red-then-blue length-2 path counts must agree,
/// stay below 2 for u != v, and vanish for u = v. Checked by enumerating
/// paths so each violation names its middle vertices; this is the
/// combinatorial mirror of 0/1-symmetric-zero-diagonal on BC and must agree
/// with the matrix route.
pub fn diamond_condition(cu: &ColoredUnion) -> Result<DiamondReport, UnionError> {
    if let Some(&(u, v)) = cu.shared_edges().first() {
        return Err(UnionError::NotSimple { u, v });
    }
    let mut paths: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for u in 0..cu.vertex_count() {
        for w in cu.blue.neighbors(u) {
            for v in cu.red.neighbors(w) {
                paths.entry((u, v)).or_default().0.push(w);
            }
        }
        for w in cu.red.neighbors(u) {
            for v in cu.blue.neighbors(w) {
                paths.entry((u, v)).or_default().1.push(w);
            }
        }
    }
    let mut violations = Vec::new();
    for ((u, v), (br, rb)) in paths {
        let bad = if u == v {
            !br.is_empty() || !rb.is_empty()
        } else {
            br.len() != rb.len() || br.len() > 1
        };
        if bad {
            violations.push(DiamondViolation {
                u,
                v,
                blue_red_middles: br,
                red_blue_middles: rb,
            });
        }
    }
    Ok(DiamondReport {
        holds: violations.is_empty(),
        violations,
    })
}

/// A matched pair: adjacent vertices that are both pendant (degree 1)
/// within the same factor. Canonically u < v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchedPair {
    pub u: usize,
    pub v: usize,
    pub side: Side,
}

/// All matched pairs, blue side first, each side in (u,v) lexicographic
/// order with u < v.
pub fn find_matched_pairs(cu: &ColoredUnion) -> Vec<MatchedPair> {
    let mut out = Vec::new();
    for side in [Side::Blue, Side::Red] {
        let g = cu.side(side);
        for (u, v) in g.edges() {
            if g.degree(u) == 1 && g.degree(v) == 1 {
                out.push(MatchedPair { u, v, side });
            }
        }
    }
    out
}

/// Report on the pendant-neighbor map phi for a matched pair: phi sends each
/// vertex of the two opposite-side components to its unique same-side
/// neighbor. For unions arising from genuine factorizations phi is an
/// involution, preserves opposite-side adjacency, and exchanges the two
/// components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiReport {
    /// (x, phi(x)) for every x in the domain, ascending in x.
    pub map: Vec<(usize, usize)>,
    /// Vertices of the opposite-side component of u, sorted.
    pub component_u: Vec<usize>,
    /// Vertices of the opposite-side component of v, sorted.
    pub component_v: Vec<usize>,
    pub involution_ok: bool,
    /// Every opposite-side edge inside the domain maps to an opposite-side edge.
    pub homomorphism_ok: bool,
    /// phi maps the component of u onto the component of v and back.
    pub swaps_components: bool,
    pub violations: Vec<String>,
}

impl PhiReport {
    pub fn all_ok(&self) -> bool {
        self.involution_ok && self.homomorphism_ok && self.swaps_components
    }

    pub fn phi(&self, x: usize) -> Option<usize> {
        self.map
            .binary_search_by_key(&x, |&(a, _)| a)
            .ok()
            .map(|i| self.map[i].1)
    }
}

fn component_of(g: &SimpleGraph, v: usize) -> Vec<usize> {
    g.components()
        .into_iter()
        .find(|c| c.contains(&v))
        .expect("vertex in some component")
}

/// Builds phi for a matched pair. The domain is the union of the two
/// opposite-side components of u and v; every domain vertex must have
/// same-side degree exactly 1, otherwise the union cannot come from a
/// factorization containing this matched pair and a structured error is
/// returned.
pub fn phi_homomorphism(cu: &ColoredUnion, pair: &MatchedPair) -> Result<PhiReport, UnionError> {
    let pendant = cu.side(pair.side);
    if pendant.degree(pair.u) != 1
        || pendant.degree(pair.v) != 1
        || !pendant.has_edge(pair.u, pair.v)
    {
        return Err(UnionError::NotAMatchedPair {
            u: pair.u,
            v: pair.v,
            side: pair.side,
        });
    }
    let other = cu.side(opposite(pair.side));
    let component_u = component_of(other, pair.u);
    let component_v = component_of(other, pair.v);
    let mut domain: Vec<usize> = component_u.iter().chain(&component_v).copied().collect();
    domain.sort_unstable();
    domain.dedup();

    let mut map = Vec::with_capacity(domain.len());
    for &x in &domain {
        let mut nbrs = pendant.neighbors(x);
        let image = nbrs.next();
        if image.is_none() || nbrs.next().is_some() {
            return Err(UnionError::PendantDegree {
                vertex: x,
                degree: pendant.degree(x),
                side: pair.side,
            });
        }
        map.push((x, image.unwrap()));
    }

    let mut violations = Vec::new();
    let lookup = |x: usize| -> Option<usize> {
        map.binary_search_by_key(&x, |&(a, _)| a)
            .ok()
            .map(|i| map[i].1)
    };

    let mut involution_ok = true;
    for &(x, y) in &map {
        match lookup(y) {
            Some(z) if z == x => {}
            Some(z) => {
                involution_ok = false;
                violations.push(format!("phi(phi({x})) = {z} != {x}"));
            }
            None => {
                involution_ok = false;
                violations.push(format!("phi({x}) = {y} escapes the domain"));
            }
        }
    }

    let mut homomorphism_ok = true;
    for &x in &domain {
        for y in other.neighbors(x) {
            if y < x || !domain.contains(&y) {
                continue;
            }
            let (px, py) = (lookup(x), lookup(y));
            match (px, py) {
                (Some(px), Some(py)) if other.has_edge(px, py) => {}
                _ => {
                    homomorphism_ok = false;
                    violations.push(format!(
                        "edge {{{x},{y}}} maps to a non-edge {{{:?},{:?}}}",
                        px, py
                    ));
                }
            }
        }
    }

    let image_u: Vec<usize> = {
        let mut v: Vec<usize> = component_u.iter().filter_map(|&x| lookup(x)).collect();
        v.sort_unstable();
        v
    };
    let image_v: Vec<usize> = {
        let mut v: Vec<usize> = component_v.iter().filter_map(|&x| lookup(x)).collect();
        v.sort_unstable();
        v
    };
    let swaps_components = image_u == component_v && image_v == component_u;
    if !swaps_components {
        violations.push("phi does not exchange the two components".to_string());
    }

    Ok(PhiReport {
        map,
        component_u,
        component_v,
        involution_ok,
        homomorphism_ok,
        swaps_components,
        violations,
    })
}

fn opposite(side: Side) -> Side {
    match side {
        Side::Blue => Side::Red,
        Side::Red => Side::Blue,
    }
}

/// True when no vertex outside `vertex_set` has a neighbor inside it, in
/// either `g` or the union.
pub fn is_alone(
    cu: &ColoredUnion,
    g: &SimpleGraph,
    vertex_set: &[usize],
) -> Result<bool, UnionError> {
    if g.vertex_count() != cu.vertex_count() {
        return Err(UnionError::SizeMismatch {
            left: g.vertex_count(),
            right: cu.vertex_count(),
        });
    }
    let mut inside = vec![false; g.vertex_count()];
    for &v in vertex_set {
        inside[v] = true;
    }
    for u in 0..g.vertex_count() {
        if inside[u] {
            continue;
        }
        for w in 0..g.vertex_count() {
            if inside[w] && (g.has_edge(u, w) || cu.has_union_edge(u, w)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{disjoint_union, make_path, SimpleGraph};
    use crate::matrix::{product, verify_factorization, Provenance};

    #[test]
    fn multiplicity_tracking() {
        let k2 = SimpleGraph::from_edges(2, &[(0, 1)]).unwrap();
        let cu = build_union(&k2, &k2).unwrap();
        assert_eq!(cu.multiplicity(0, 1), 2);
        assert!(!cu.is_simple());
        assert_eq!(cu.shared_edges(), vec![(0, 1)]);

        let h = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let k = SimpleGraph::from_edges(3, &[(1, 2)]).unwrap();
        let cu = build_union(&h, &k).unwrap();
        assert!(cu.is_simple());
        assert_eq!(cu.colored_edge_count(), 2);
    }

    #[test]
    fn diamond_rejects_non_simple() {
        let k2 = SimpleGraph::from_edges(2, &[(0, 1)]).unwrap();
        let cu = build_union(&k2, &k2).unwrap();
        assert_eq!(
            diamond_condition(&cu).unwrap_err(),
            UnionError::NotSimple { u: 0, v: 1 }
        );
    }

    #[test]
    fn diamond_on_the_four_vertex_diamond() {
        // blue a-c and b-d, red a-b and c-d, on a=0, b=1, c=2, d=3.
        let blue = SimpleGraph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        let red = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let cu = build_union(&blue, &red).unwrap();
        let report = diamond_condition(&cu).unwrap();
        assert!(report.holds, "violations: {:?}", report.violations);

        // The matrix route agrees: BC decodes to the graph {a-d, b-c}.
        let g = product(&blue, &red).unwrap().decode_simple().unwrap();
        assert_eq!(g.edges(), vec![(0, 3), (1, 2)]);
        assert!(verify_factorization(&g, &blue, &red, Provenance::External).is_ok());
    }

    #[test]
    fn diamond_violation_names_middles() {
        // Blue path 0-1, red path 1-2: a blue-red path 0->2 with no red-blue mate.
        let blue = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let red = SimpleGraph::from_edges(3, &[(1, 2)]).unwrap();
        let cu = build_union(&blue, &red).unwrap();
        let report = diamond_condition(&cu).unwrap();
        assert!(!report.holds);
        let v = report
            .violations
            .iter()
            .find(|v| (v.u, v.v) == (0, 2))
            .unwrap();
        assert_eq!(v.blue_red_middles, vec![1]);
        assert!(v.red_blue_middles.is_empty());
    }

    #[test]
    fn matched_pairs_enumeration() {
        // Blue perfect matching: every blue edge is a matched pair.
        let blue = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let red = SimpleGraph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        let cu = build_union(&blue, &red).unwrap();
        let pairs = find_matched_pairs(&cu);
        assert_eq!(
            pairs,
            vec![
                MatchedPair { u: 0, v: 1, side: Side::Blue },
                MatchedPair { u: 2, v: 3, side: Side::Blue },
                MatchedPair { u: 0, v: 2, side: Side::Red },
                MatchedPair { u: 1, v: 3, side: Side::Red },
            ]
        );

        // P3 on the blue side: pendants 0 and 2 are not adjacent, no pair.
        let blue = make_path(3).unwrap();
        let red = SimpleGraph::new(3);
        let cu = build_union(&blue, &red).unwrap();
        assert!(find_matched_pairs(&cu)
            .iter()
            .all(|p| p.side != Side::Blue));
    }

    #[test]
    fn phi_swaps_doubled_path_components() {
        // P8 (+) P8 factored: H joins vertex i to i+8; K is the doubled path
        // with rows relabeled through the matching, K(u,v) = A(u+8 mod 16, v).
        let p8 = make_path(8).unwrap();
        let g = disjoint_union(&p8, &p8);
        let mut h = SimpleGraph::new(16);
        for i in 0..8 {
            h.add_edge(i, i + 8);
        }
        let mut k = SimpleGraph::new(16);
        for u in 0..16 {
            for v in u + 1..16 {
                if g.has_edge((u + 8) % 16, v) {
                    k.add_edge(u, v);
                }
            }
        }
        let fact = verify_factorization(&g, &h, &k, Provenance::External).unwrap();
        let cu = build_union(fact.h(), fact.k()).unwrap();
        let pair = find_matched_pairs(&cu)
            .into_iter()
            .find(|p| p.side == Side::Blue)
            .unwrap();
        assert_eq!((pair.u, pair.v), (0, 8));
        let report = phi_homomorphism(&cu, &pair).unwrap();
        assert!(report.all_ok(), "violations: {:?}", report.violations);
        assert_eq!(report.phi(0), Some(8));
        assert_eq!(report.component_u.len(), 8);
        // phi exchanges the two K-components, which partition the vertex set.
        let mut domain: Vec<usize> = report
            .component_u
            .iter()
            .chain(&report.component_v)
            .copied()
            .collect();
        domain.sort_unstable();
        assert_eq!(domain, (0..16).collect::<Vec<_>>());
        assert!(is_alone(&cu, fact.g(), &domain).unwrap());
    }

    #[test]
    fn phi_rejects_non_factorization_unions() {
        let blue = SimpleGraph::from_edges(4, &[(0, 1)]).unwrap();
        let red = SimpleGraph::from_edges(4, &[(0, 2)]).unwrap();
        let cu = build_union(&blue, &red).unwrap();

        // 2-3 is not a blue edge at all.
        let err = phi_homomorphism(
            &cu,
            &MatchedPair { u: 2, v: 3, side: Side::Blue },
        )
        .unwrap_err();
        assert!(matches!(err, UnionError::NotAMatchedPair { .. }));

        // (0,1) is a blue matched pair, but vertex 2 sits in the red
        // component of 0 with blue degree 0, so no factorization fits.
        let err = phi_homomorphism(
            &cu,
            &MatchedPair { u: 0, v: 1, side: Side::Blue },
        )
        .unwrap_err();
        assert_eq!(
            err,
            UnionError::PendantDegree { vertex: 2, degree: 0, side: Side::Blue }
        );
    }

    #[test]
    fn alone_sets() {
        let g = make_path(3).unwrap();
        let cu = build_union(&SimpleGraph::new(3), &SimpleGraph::new(3)).unwrap();
        // Full vertex set is always alone.
        assert!(is_alone(&cu, &g, &[0, 1, 2]).unwrap());
        // A single endpoint of an edge is not.
        assert!(!is_alone(&cu, &g, &[0]).unwrap());
    }
}
