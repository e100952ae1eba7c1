//! Automorphism enumeration by pruned backtracking, matching involutions
//! (the perfect-matching factor candidates of a graph), eccentricity-based
//! centers, unique shortest paths, and the obstructions they impose on
//! fixed-edge-free involutions.

use thiserror::Error;

use crate::graph::{recognize_grid, SimpleGraph};
use crate::matrix::{verify_factorization, Factorization, FailureReport, Provenance};
use crate::par;
use crate::perm::{MatchingInvolution, Permutation};

/// Default exhaustive-search bound for automorphism enumeration.
pub const DEFAULT_AUT_BOUND: usize = 12;

/// Default bound for unique-shortest-path enumeration (output is quadratic).
pub const DEFAULT_PATH_BOUND: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomorphismError {
    #[error("graph has {n} vertices, above the enumeration bound {bound}; refusing to sample")]
    TooLarge { n: usize, bound: usize },
    #[error("graph is disconnected; eccentricities are infinite")]
    Disconnected,
}

/// Why a candidate permutation is not a valid perfect-matching factor for a
/// graph. Ordered the way diagnostics report them: automorphism and order
/// first, then fixed edges before fixed vertices.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingRejection {
    #[error("permutation acts on {perm} vertices but the graph has {graph}")]
    SizeMismatch { perm: usize, graph: usize },
    #[error("not an automorphism: edge {{{u},{v}}} maps to a non-edge")]
    NotAutomorphism { u: usize, v: usize },
    #[error("not an involution: applying twice moves vertex {v}")]
    NotInvolution { v: usize },
    #[error("fixes edge {{{u},{v}}}")]
    FixedEdge { u: usize, v: usize },
    #[error("fixes vertex {v}")]
    FixedVertex { v: usize },
}

/// Per-vertex invariant used for pruning: (degree, sorted neighbor degrees).
fn vertex_invariants(g: &SimpleGraph) -> Vec<(usize, Vec<usize>)> {
    (0..g.vertex_count())
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).map(|w| g.degree(w)).collect();
            nd.sort_unstable();
            (g.degree(v), nd)
        })
        .collect()
}

fn extend(
    g: &SimpleGraph,
    inv: &[(usize, Vec<usize>)],
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    let v = images.len();
    let n = g.vertex_count();
    if v == n {
        out.push(Permutation::from_images(images.clone()).expect("bijection by construction"));
        return;
    }
    'candidates: for w in 0..n {
        if used[w] || inv[v] != inv[w] {
            continue;
        }
        for (u, &img) in images.iter().enumerate() {
            if g.has_edge(u, v) != g.has_edge(img, w) {
                continue 'candidates;
            }
        }
        images.push(w);
        used[w] = true;
        extend(g, inv, images, used, out);
        images.pop();
        used[w] = false;
    }
}

/// The full automorphism group by pruned backtracking, in lexicographic
/// image order. Search subtrees split across workers on the image of
/// vertex 0; the merged list is re-sorted so output never depends on
/// scheduling. Refuses graphs above `bound`.
pub fn automorphisms_with_bound(
    g: &SimpleGraph,
    bound: usize,
) -> Result<Vec<Permutation>, AutomorphismError> {
    let n = g.vertex_count();
    if n > bound {
        return Err(AutomorphismError::TooLarge { n, bound });
    }
    if n == 0 {
        return Ok(vec![Permutation::identity(0)]);
    }
    let inv = vertex_invariants(g);
    let first: Vec<usize> = (0..n).filter(|&w| inv[w] == inv[0]).collect();
    let branches = par::map_collect(first, |w| {
        let mut images = vec![w];
        let mut used = vec![false; n];
        used[w] = true;
        let mut out = Vec::new();
        extend(g, &inv, &mut images, &mut used, &mut out);
        out
    });
    let mut all: Vec<Permutation> = branches.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

pub fn automorphisms(g: &SimpleGraph) -> Result<Vec<Permutation>, AutomorphismError> {
    automorphisms_with_bound(g, DEFAULT_AUT_BOUND)
}

/// Checks that `perm` is an automorphism of `g`, an involution, fixes no
/// edge of `g`, and fixes no vertex - exactly the conditions for the
/// induced perfect matching to be a factor of `g`.
pub fn validate_matching_involution(
    g: &SimpleGraph,
    perm: &Permutation,
) -> Result<MatchingInvolution, MatchingRejection> {
    if perm.len() != g.vertex_count() {
        return Err(MatchingRejection::SizeMismatch {
            perm: perm.len(),
            graph: g.vertex_count(),
        });
    }
    for (u, v) in g.edges() {
        if !g.has_edge(perm.apply(u), perm.apply(v)) {
            return Err(MatchingRejection::NotAutomorphism { u, v });
        }
    }
    for v in 0..perm.len() {
        if perm.apply(perm.apply(v)) != v {
            return Err(MatchingRejection::NotInvolution { v });
        }
    }
    for (u, v) in g.edges() {
        if perm.apply(u) == v {
            return Err(MatchingRejection::FixedEdge { u, v });
        }
    }
    for v in 0..perm.len() {
        if perm.apply(v) == v {
            return Err(MatchingRejection::FixedVertex { v });
        }
    }
    Ok(MatchingInvolution::new(perm.clone()).expect("checked involution without fixed points"))
}

/// The antipodal map (i,j) -> (n+1-i, m+1-j) of an n x m grid, which in
/// row-major indexing is plain index reversal.
pub fn grid_antipodal_map(n: usize, m: usize) -> Permutation {
    let total = n * m;
    Permutation::from_images((0..total).map(|v| total - 1 - v).collect())
        .expect("reversal is a bijection")
}

/// All fixed-edge-free, fixed-vertex-free involutive automorphisms: the
/// candidate perfect-matching factors. Exhaustive for graphs within the
/// enumeration bound. Above the bound, even x even grids take the analytic
/// shortcut: the antipodal map is their only candidate, so the answer stays
/// complete without group enumeration; grids with an odd side have none
/// (single-edge center or odd order). Anything else above the bound is
/// refused.
pub fn matching_involutions(
    g: &SimpleGraph,
) -> Result<Vec<MatchingInvolution>, AutomorphismError> {
    matching_involutions_with_bound(g, DEFAULT_AUT_BOUND)
}

pub fn matching_involutions_with_bound(
    g: &SimpleGraph,
    bound: usize,
) -> Result<Vec<MatchingInvolution>, AutomorphismError> {
    let n = g.vertex_count();
    if n > bound {
        if let Some((rows, cols)) = recognize_grid(g) {
            if rows % 2 == 0 && cols % 2 == 0 {
                let antipodal = grid_antipodal_map(rows, cols);
                let m = validate_matching_involution(g, &antipodal)
                    .expect("antipodal map of an even grid is a matching automorphism");
                return Ok(vec![m]);
            }
            return Ok(Vec::new());
        }
        return Err(AutomorphismError::TooLarge { n, bound });
    }
    let auts = automorphisms_with_bound(g, bound)?;
    Ok(auts
        .into_iter()
        .filter_map(|p| validate_matching_involution(g, &p).ok())
        .collect())
}

/// Factors `g` through a matching involution: H is the perfect matching of
/// the involution and K is read off from BA, i.e. K(u,v) = A(sigma(u), v).
/// The returned factorization has been re-verified.
pub fn factor_by_matching(
    g: &SimpleGraph,
    m: &MatchingInvolution,
) -> Result<Factorization, MatchingRejection> {
    validate_matching_involution(g, m.perm())?;
    let h = m.matching_graph();
    let n = g.vertex_count();
    let mut k = SimpleGraph::new(n);
    for u in 0..n {
        let su = m.partner(u);
        for v in u + 1..n {
            if g.has_edge(su, v) {
                k.add_edge(u, v);
            }
        }
    }
    match verify_factorization(g, &h, &k, Provenance::MatchingSearch) {
        Ok(f) => Ok(f),
        // B an automorphism of G without fixed edge makes A = B(BA) an
        // identity, so this cannot fail; surface it loudly if it ever does.
        Err(FailureReport::EntryMismatch { i, j, .. }) => {
            unreachable!("matching factorization failed verification at ({i},{j})")
        }
        Err(FailureReport::SizeMismatch { .. }) => unreachable!("sizes checked above"),
    }
}

/// Eccentricities, radius, and center of a connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterReport {
    pub eccentricities: Vec<usize>,
    pub radius: usize,
    pub center: Vec<usize>,
}

pub fn center(g: &SimpleGraph) -> Result<CenterReport, AutomorphismError> {
    let n = g.vertex_count();
    if n == 0 || !g.is_connected() {
        return Err(AutomorphismError::Disconnected);
    }
    let eccentricities: Vec<usize> = (0..n)
        .map(|v| {
            g.bfs_distances(v)
                .into_iter()
                .max()
                .expect("nonempty graph")
        })
        .collect();
    let radius = *eccentricities.iter().min().expect("nonempty");
    let center = (0..n).filter(|&v| eccentricities[v] == radius).collect();
    Ok(CenterReport {
        eccentricities,
        radius,
        center,
    })
}

/// All unordered pairs (u,v) joined by a unique shortest path, together
/// with that path. Path counts saturate, so only uniqueness is decided.
pub fn unique_shortest_path_pairs(
    g: &SimpleGraph,
) -> Result<Vec<(usize, usize, Vec<usize>)>, AutomorphismError> {
    unique_shortest_path_pairs_with_bound(g, DEFAULT_PATH_BOUND)
}

pub fn unique_shortest_path_pairs_with_bound(
    g: &SimpleGraph,
    bound: usize,
) -> Result<Vec<(usize, usize, Vec<usize>)>, AutomorphismError> {
    let n = g.vertex_count();
    if n > bound {
        return Err(AutomorphismError::TooLarge { n, bound });
    }
    if !g.is_connected() || n == 0 {
        return Err(AutomorphismError::Disconnected);
    }
    let mut out = Vec::new();
    for u in 0..n {
        let dist = g.bfs_distances(u);
        let mut counts = vec![0u64; n];
        counts[u] = 1;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| dist[v]);
        for &v in &order {
            if v == u {
                continue;
            }
            let c: u64 = g
                .neighbors(v)
                .filter(|&w| dist[w] + 1 == dist[v])
                .map(|w| counts[w])
                .fold(0, u64::saturating_add);
            counts[v] = c;
        }
        for v in u + 1..n {
            if counts[v] != 1 {
                continue;
            }
            // Unique path: walk back through the unique predecessor chain.
            let mut path = vec![v];
            let mut cur = v;
            while cur != u {
                let pred = g
                    .neighbors(cur)
                    .find(|&w| dist[w] + 1 == dist[cur] && counts[w] > 0)
                    .expect("predecessor on a shortest path");
                path.push(pred);
                cur = pred;
            }
            path.reverse();
            out.push((u, v, path));
        }
    }
    Ok(out)
}

/// Structural reasons no fixed-edge-free, fixed-vertex-free involution can
/// exist: a center every automorphism must fix, or odd order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObstructionReason {
    /// The center is a single vertex, which every automorphism fixes.
    SingleVertexCenter { vertex: usize },
    /// The center is a single edge: an automorphism either fixes its two
    /// vertices or swaps them, fixing the edge.
    CenterEdge { u: usize, v: usize },
    /// Fixed-point-free involutions need an even number of vertices.
    OddOrder { n: usize },
}

impl std::fmt::Display for ObstructionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObstructionReason::SingleVertexCenter { vertex } => {
                write!(f, "center is the single vertex {vertex}, fixed by every automorphism")
            }
            ObstructionReason::CenterEdge { u, v } => write!(
                f,
                "center is the single edge {{{u},{v}}}, fixed setwise by every automorphism"
            ),
            ObstructionReason::OddOrder { n } => {
                write!(f, "odd vertex count {n} admits no fixed-point-free involution")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObstructionVerdict {
    NoInvolutionPossible(ObstructionReason),
    Inconclusive,
}

/// Cheap structural test for connected graphs: center of size one or a
/// 2-vertex adjacent center rules out every matching involution, as does an
/// odd vertex count. `Inconclusive` otherwise.
pub fn involution_obstruction(
    g: &SimpleGraph,
) -> Result<ObstructionVerdict, AutomorphismError> {
    let report = center(g)?;
    match report.center.as_slice() {
        [v] => {
            return Ok(ObstructionVerdict::NoInvolutionPossible(
                ObstructionReason::SingleVertexCenter { vertex: *v },
            ))
        }
        [u, v] if g.has_edge(*u, *v) => {
            return Ok(ObstructionVerdict::NoInvolutionPossible(
                ObstructionReason::CenterEdge { u: *u, v: *v },
            ))
        }
        _ => {}
    }
    if g.vertex_count() % 2 == 1 {
        return Ok(ObstructionVerdict::NoInvolutionPossible(
            ObstructionReason::OddOrder {
                n: g.vertex_count(),
            },
        ));
    }
    Ok(ObstructionVerdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        make_cycle, make_grid, make_path, make_petersen, SimpleGraph,
    };

    /// Brute-force automorphism oracle over all n! permutations.
    fn brute_automorphisms(g: &SimpleGraph) -> Vec<Permutation> {
        fn heap(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(arr.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, arr, out);
                if k % 2 == 0 {
                    arr.swap(i, k - 1);
                } else {
                    arr.swap(0, k - 1);
                }
            }
        }
        let mut arr: Vec<usize> = (0..g.vertex_count()).collect();
        let mut all = Vec::new();
        heap(arr.len(), &mut arr, &mut all);
        let mut found: Vec<Permutation> = all
            .into_iter()
            .filter_map(|images| {
                let p = Permutation::from_images(images).unwrap();
                p.is_automorphism_of(g).then_some(p)
            })
            .collect();
        found.sort();
        found
    }

    #[test]
    fn backtracking_matches_brute_force() {
        let graphs = vec![
            make_cycle(4).unwrap(),
            make_cycle(5).unwrap(),
            make_path(5).unwrap(),
            make_grid(2, 3).unwrap(),
            SimpleGraph::new(3),
            SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])
                .unwrap(),
        ];
        for g in graphs {
            let got = automorphisms(&g).unwrap();
            let want = brute_automorphisms(&g);
            assert_eq!(got, want, "graph {g:?}");
        }
    }

    #[test]
    fn c4_dihedral_group() {
        let auts = automorphisms(&make_cycle(4).unwrap()).unwrap();
        assert_eq!(auts.len(), 8);
        // Group axioms on the returned list.
        for a in &auts {
            assert!(auts.contains(&a.inverse()));
            for b in &auts {
                assert!(auts.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn edgeless_graph_has_full_symmetric_group() {
        assert_eq!(automorphisms(&SimpleGraph::new(3)).unwrap().len(), 6);
    }

    #[test]
    fn petersen_group_order_120_no_involutions() {
        let p = make_petersen();
        assert_eq!(automorphisms(&p).unwrap().len(), 120);
        assert!(matching_involutions(&p).unwrap().is_empty());
    }

    #[test]
    fn refusal_above_bound() {
        let g = SimpleGraph::new(13);
        assert_eq!(
            automorphisms(&g).unwrap_err(),
            AutomorphismError::TooLarge { n: 13, bound: 12 }
        );
    }

    #[test]
    fn grid_involutions_via_fast_path_and_enumeration() {
        // Within the bound: P2 x P4 has exactly the antipodal involution.
        let g = make_grid(2, 4).unwrap();
        let ms = matching_involutions(&g).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].perm(), &grid_antipodal_map(2, 4));

        // Above the bound: P4 x P4 through the analytic shortcut.
        let g = make_grid(4, 4).unwrap();
        let ms = matching_involutions(&g).unwrap();
        assert_eq!(ms.len(), 1);
        let expected: Vec<usize> = (0..16).rev().collect();
        assert_eq!(ms[0].perm().images(), expected.as_slice());

        // Odd-sided grid above the bound: none.
        assert!(matching_involutions(&make_grid(3, 5).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn trees_have_no_matching_involutions() {
        for k in 2..=7 {
            assert!(matching_involutions(&make_path(k).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn factor_by_matching_on_k22() {
        let k22 = SimpleGraph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let m = MatchingInvolution::new(Permutation::from_images(vec![1, 0, 3, 2]).unwrap())
            .unwrap();
        let f = factor_by_matching(&k22, &m).unwrap();
        assert_eq!(f.h().edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(f.k(), &k22);
    }

    #[test]
    fn factor_by_matching_rejects_with_reason() {
        let c4 = make_cycle(4).unwrap();
        // (0 1)(2 3) maps the edge {1,2} to {0,3}, an edge, {0,1} to itself:
        // automorphism and involution, but it fixes edges {0,1} and {2,3}.
        let m = MatchingInvolution::new(Permutation::from_images(vec![1, 0, 3, 2]).unwrap())
            .unwrap();
        assert_eq!(
            factor_by_matching(&c4, &m).unwrap_err(),
            MatchingRejection::FixedEdge { u: 0, v: 1 }
        );
    }

    #[test]
    fn centers_of_grids() {
        let r = center(&make_path(3).unwrap()).unwrap();
        assert_eq!((r.radius, r.center), (1, vec![1]));

        // One even side: exactly two adjacent center vertices.
        let g = make_grid(4, 3).unwrap();
        let r = center(&g).unwrap();
        assert_eq!(r.center.len(), 2);
        assert!(g.has_edge(r.center[0], r.center[1]));

        // Both sides even: exactly four center vertices.
        let g = make_grid(4, 4).unwrap();
        assert_eq!(center(&g).unwrap().center.len(), 4);

        assert!(center(&SimpleGraph::new(2)).is_err());
    }

    #[test]
    fn unique_shortest_paths() {
        // Trees: every pair has a unique path.
        let p4 = make_path(4).unwrap();
        assert_eq!(unique_shortest_path_pairs(&p4).unwrap().len(), 6);

        // C4: antipodal pairs have two shortest paths.
        let pairs = unique_shortest_path_pairs(&make_cycle(4).unwrap()).unwrap();
        let listed: Vec<(usize, usize)> = pairs.iter().map(|&(u, v, _)| (u, v)).collect();
        assert_eq!(listed, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);

        // Grid corners along one side.
        let g = make_grid(3, 4).unwrap();
        let pairs = unique_shortest_path_pairs(&g).unwrap();
        let corner = pairs.iter().find(|&&(u, v, _)| (u, v) == (0, 3)).unwrap();
        assert_eq!(corner.2, vec![0, 1, 2, 3]);
    }

    #[test]
    fn obstructions() {
        // 4 x 3 grid: two-vertex center edge.
        match involution_obstruction(&make_grid(4, 3).unwrap()).unwrap() {
            ObstructionVerdict::NoInvolutionPossible(ObstructionReason::CenterEdge { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // C5: odd order (its center is all five vertices).
        match involution_obstruction(&make_cycle(5).unwrap()).unwrap() {
            ObstructionVerdict::NoInvolutionPossible(ObstructionReason::OddOrder { n: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // P4 x P4: inconclusive, and indeed factorable.
        assert_eq!(
            involution_obstruction(&make_grid(4, 4).unwrap()).unwrap(),
            ObstructionVerdict::Inconclusive
        );
        // P3: single-vertex center.
        match involution_obstruction(&make_path(3).unwrap()).unwrap() {
            ObstructionVerdict::NoInvolutionPossible(
                ObstructionReason::SingleVertexCenter { vertex: 1 },
            ) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
