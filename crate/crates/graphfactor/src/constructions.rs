//! Closed-form factorizations: even x even grids via the antipodal
//! matching, every torus (translation matching when a side is even, a
//! Cayley pair when both are odd), and doubled forests via component
//! pairing. No construction is trusted: each output is re-verified and
//! diamond-checked before it is returned.

use thiserror::Error;

use crate::automorphism::{
    factor_by_matching, grid_antipodal_map, validate_matching_involution, MatchingRejection,
    ObstructionReason,
};
use crate::graph::{cayley_z2, make_grid, make_torus, GraphError, SimpleGraph, TorusCoord};
use crate::matrix::{verify_factorization, Factorization, Provenance};
use crate::perm::{MatchingInvolution, Permutation};
use crate::search::{pair_up_components, SearchError};
use crate::union::{build_union, diamond_condition};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("grid {n} x {m} is not factorable: both sides must be even ({obstruction})")]
    OddGrid {
        n: usize,
        m: usize,
        obstruction: ObstructionReason,
    },
    #[error("grid sides must be at least 2, got {n} x {m}")]
    GridTooSmall { n: usize, m: usize },
    #[error("torus sides must be at least 3, got {n} x {m}")]
    TorusTooSmall { n: usize, m: usize },
    #[error("both {n} and {m} are odd; use the odd-odd Cayley construction")]
    BothOdd { n: usize, m: usize },
    #[error("{n} x {m} has an even side; use the even translation construction")]
    NotBothOdd { n: usize, m: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Forest(#[from] SearchError),
    #[error("forest components cannot be paired into isomorphic twins")]
    UnpairableForest,
    #[error("construction produced an invalid matching: {0}")]
    BadMatching(#[from] MatchingRejection),
}

/// Every construction runs the full audit: exact product identity, factor
/// edge-disjointness, and the diamond condition.
fn checked(
    g: &SimpleGraph,
    h: &SimpleGraph,
    k: &SimpleGraph,
) -> Factorization {
    let fact = verify_factorization(g, h, k, Provenance::Construction)
        .expect("construction must verify");
    let cu = build_union(h, k).expect("same vertex set");
    assert!(cu.is_simple(), "construction factors share an edge");
    let report = diamond_condition(&cu).expect("simple union");
    assert!(
        report.holds,
        "construction violates the diamond condition: {:?}",
        report.violations
    );
    fact
}

/// Grid factorization: the antipodal matching (i,j) -> (n+1-i, m+1-j) and
/// its complementary factor.
#[derive(Debug, Clone)]
pub struct GridFactorization {
    pub n: usize,
    pub m: usize,
    pub matching: MatchingInvolution,
    pub factorization: Factorization,
}

/// Factors P_n [] P_m for even n, m >= 2. Odd sides are rejected with the
/// structural obstruction (single-edge center, or odd order when both are
/// odd) that rules every matching automorphism out.
pub fn factor_grid(n: usize, m: usize) -> Result<GridFactorization, ConstructionError> {
    if n < 2 || m < 2 {
        return Err(ConstructionError::GridTooSmall { n, m });
    }
    let g = make_grid(n, m)?;
    if n % 2 != 0 || m % 2 != 0 {
        let obstruction = if (n * m) % 2 == 1 {
            ObstructionReason::OddOrder { n: n * m }
        } else {
            let report = crate::automorphism::center(&g).expect("grid is connected");
            ObstructionReason::CenterEdge {
                u: report.center[0],
                v: report.center[1],
            }
        };
        return Err(ConstructionError::OddGrid { n, m, obstruction });
    }
    let antipodal = grid_antipodal_map(n, m);
    let matching = validate_matching_involution(&g, &antipodal)?;
    let fact = factor_by_matching(&g, &matching)?;
    let fact = checked(&g, fact.h(), fact.k());
    Ok(GridFactorization {
        n,
        m,
        matching,
        factorization: fact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusMode {
    EvenMatching,
    OddCayley,
}

#[derive(Debug, Clone)]
pub struct TorusFactorization {
    pub n: usize,
    pub m: usize,
    pub mode: TorusMode,
    pub factorization: Factorization,
}

/// Factors C_n [] C_m when at least one side is even, by translating half
/// way around an even cycle: H joins (i,j) to (i + n/2, j). The translation
/// is validated as a fixed-edge-free matching automorphism rather than
/// trusted.
pub fn factor_torus_even(n: usize, m: usize) -> Result<TorusFactorization, ConstructionError> {
    if n < 3 || m < 3 {
        return Err(ConstructionError::TorusTooSmall { n, m });
    }
    if n % 2 != 0 && m % 2 != 0 {
        return Err(ConstructionError::BothOdd { n, m });
    }
    let g = make_torus(n, m)?;
    // Translate along whichever coordinate is even.
    let images: Vec<usize> = (0..n * m)
        .map(|v| {
            let c = TorusCoord::from_index(v, n, m);
            if n % 2 == 0 {
                c.translate(n / 2, 0).to_index()
            } else {
                c.translate(0, m / 2).to_index()
            }
        })
        .collect();
    let perm = Permutation::from_images(images).expect("translation is a bijection");
    let matching = validate_matching_involution(&g, &perm)?;
    let fact = factor_by_matching(&g, &matching)?;
    let fact = checked(&g, fact.h(), fact.k());
    Ok(TorusFactorization {
        n,
        m,
        mode: TorusMode::EvenMatching,
        factorization: fact,
    })
}

/// Factors C_n [] C_m for odd n, m >= 3 with an explicit Cayley pair over
/// Z_n x Z_m. The generator lists are symmetrized (each generator together
/// with its negation) so the connection sets satisfy the Cayley symmetry
/// requirement; coinciding elements collapse, which keeps both factors
/// 2-regular.
pub fn factor_torus_odd(n: usize, m: usize) -> Result<TorusFactorization, ConstructionError> {
    if n < 3 || m < 3 {
        return Err(ConstructionError::TorusTooSmall { n, m });
    }
    if n % 2 == 0 || m % 2 == 0 {
        return Err(ConstructionError::NotBothOdd { n, m });
    }
    let g = make_torus(n, m)?;
    let neg = |(a, b): (usize, usize)| ((n - a) % n, (m - b) % m);
    let h_gens = [
        ((n + 1) / 2, (m - 1) / 2),
        ((n - 1) / 2, (m + 1) / 2),
    ];
    let k_gens = [
        ((n - 1) / 2, (m - 1) / 2),
        ((n + 1) / 2, (m + 1) / 2),
    ];
    let symmetrize = |gens: [(usize, usize); 2]| -> Vec<(usize, usize)> {
        let mut set: Vec<(usize, usize)> = gens
            .iter()
            .flat_map(|&s| [s, neg(s)])
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    };
    let h = cayley_z2(n, m, &symmetrize(h_gens))?;
    let k = cayley_z2(n, m, &symmetrize(k_gens))?;
    let fact = checked(&g, &h, &k);
    Ok(TorusFactorization {
        n,
        m,
        mode: TorusMode::OddCayley,
        factorization: fact,
    })
}

/// Factors any torus, dispatching on side parity.
pub fn factor_torus(n: usize, m: usize) -> Result<TorusFactorization, ConstructionError> {
    if n % 2 == 0 || m % 2 == 0 {
        factor_torus_even(n, m)
    } else {
        factor_torus_odd(n, m)
    }
}

/// Factors a forest whose components pair up into isomorphic twins: H joins
/// each vertex to its image under the pairing isomorphisms, and K is the
/// complementary factor (a relabeled copy of the forest itself).
pub fn factor_doubled_forest(f: &SimpleGraph) -> Result<Factorization, ConstructionError> {
    let pairing = pair_up_components(f)?.ok_or(ConstructionError::UnpairableForest)?;
    let mut images: Vec<usize> = (0..f.vertex_count()).collect();
    for pair in &pairing {
        for &(a, b) in &pair.bijection {
            images[a] = b;
            images[b] = a;
        }
    }
    let perm = Permutation::from_images(images).expect("pairing swap is a bijection");
    let matching = validate_matching_involution(f, &perm)?;
    let fact = factor_by_matching(f, &matching)?;
    Ok(checked(f, fact.h(), fact.k()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{disjoint_union, make_path};
    use crate::search::forest_isomorphism;

    #[test]
    fn grid_2x2_diagonal_matching() {
        let gf = factor_grid(2, 2).unwrap();
        assert_eq!(
            gf.factorization.h().edges(),
            vec![(0, 3), (1, 2)],
            "antipodal matching on C4 pairs opposite corners"
        );
    }

    #[test]
    fn grid_2x4_is_the_even_grid_instance() {
        let gf = factor_grid(2, 4).unwrap();
        assert_eq!(gf.factorization.h().edge_count(), 4);
        assert!(gf.factorization.factor_is_perfect_matching(true));
    }

    #[test]
    fn grid_4x6_matching_size() {
        let gf = factor_grid(4, 6).unwrap();
        assert_eq!(gf.factorization.h().edge_count(), 12);
    }

    #[test]
    fn grid_rejections_carry_obstructions() {
        match factor_grid(4, 3).unwrap_err() {
            ConstructionError::OddGrid {
                obstruction: ObstructionReason::CenterEdge { .. },
                ..
            } => {}
            other => panic!("unexpected {other:?}"),
        }
        match factor_grid(3, 3).unwrap_err() {
            ConstructionError::OddGrid {
                obstruction: ObstructionReason::OddOrder { n: 9 },
                ..
            } => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            factor_grid(1, 2).unwrap_err(),
            ConstructionError::GridTooSmall { .. }
        ));
    }

    #[test]
    fn torus_even_translation() {
        for (n, m) in [(4, 3), (6, 6), (4, 4), (3, 4)] {
            let tf = factor_torus_even(n, m).unwrap();
            assert_eq!(tf.mode, TorusMode::EvenMatching);
            assert!(tf.factorization.factor_is_perfect_matching(true));
            assert_eq!(tf.factorization.h().edge_count(), n * m / 2);
        }
        assert!(matches!(
            factor_torus_even(3, 5).unwrap_err(),
            ConstructionError::BothOdd { .. }
        ));
    }

    #[test]
    fn torus_odd_cayley_pair_is_2_regular() {
        for (n, m) in [(3, 3), (3, 5), (7, 9)] {
            let tf = factor_torus_odd(n, m).unwrap();
            assert_eq!(tf.mode, TorusMode::OddCayley);
            let h = tf.factorization.h();
            let k = tf.factorization.k();
            assert!(h.degree_sequence().iter().all(|&d| d == 2), "{n}x{m} H");
            assert!(k.degree_sequence().iter().all(|&d| d == 2), "{n}x{m} K");
        }
        assert!(matches!(
            factor_torus_odd(4, 3).unwrap_err(),
            ConstructionError::NotBothOdd { .. }
        ));
    }

    #[test]
    fn doubled_paths_factor() {
        let p8 = make_path(8).unwrap();
        let g = disjoint_union(&p8, &p8);
        let fact = factor_doubled_forest(&g).unwrap();
        assert!(fact.factor_is_perfect_matching(true));
        // K is a relabeled copy of the doubled path: two P8 components.
        let comps = fact.k().components();
        assert_eq!(comps.len(), 2);
        for comp in comps {
            let sub = fact.k().induced_subgraph(&comp);
            assert!(forest_isomorphism(&sub, &p8).unwrap().is_some());
        }
    }

    #[test]
    fn doubled_single_edges() {
        let k2 = make_path(2).unwrap();
        let g = disjoint_union(&k2, &k2);
        let fact = factor_doubled_forest(&g).unwrap();
        assert_eq!(fact.h().edges(), vec![(0, 2), (1, 3)]);
        // K(u,v) = A(sigma(u), v): the doubled edge re-crossed.
        assert_eq!(fact.k().edges(), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn unpairable_forest_rejected() {
        let p3 = make_path(3).unwrap();
        let p5 = make_path(5).unwrap();
        let g = disjoint_union(&disjoint_union(&p3, &p3), &p5);
        assert!(matches!(
            factor_doubled_forest(&g).unwrap_err(),
            ConstructionError::UnpairableForest
        ));
    }
}
