//! Vertex permutations and the fixed-point-free involutions that encode
//! perfect-matching factors.

use std::fmt;

use thiserror::Error;

use crate::graph::SimpleGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("images do not form a bijection on 0..{n}")]
    NotABijection { n: usize },
    #[error("permutation is not an involution: applying it twice moves {v}")]
    NotAnInvolution { v: usize },
    #[error("involution fixes vertex {v}, so it is not a perfect matching")]
    FixedVertex { v: usize },
}

/// A permutation of 0..n stored by its image array.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(PermError::NotABijection { n });
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// self after other: (self * other)(v) = self(other(v)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&v| self.images[v]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (i == v).then_some(i))
            .collect()
    }

    /// Disjoint cycles of length >= 2, each starting at its minimum element,
    /// ordered by that minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut v = self.images[start];
            while v != start {
                seen[v] = true;
                cycle.push(v);
                v = self.images[v];
            }
            out.push(cycle);
        }
        out
    }

    /// True when this permutation maps edges of `g` to edges of `g`.
    pub fn is_automorphism_of(&self, g: &SimpleGraph) -> bool {
        self.len() == g.vertex_count()
            && g.edges()
                .iter()
                .all(|&(u, v)| g.has_edge(self.apply(u), self.apply(v)))
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation; the identity prints as "()".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A fixed-point-free involution: the permutation form of a perfect
/// matching. Each 2-cycle {v, perm(v)} is a matching edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingInvolution {
    perm: Permutation,
}

impl MatchingInvolution {
    pub fn new(perm: Permutation) -> Result<Self, PermError> {
        for v in 0..perm.len() {
            if perm.apply(v) == v {
                return Err(PermError::FixedVertex { v });
            }
        }
        for v in 0..perm.len() {
            if perm.apply(perm.apply(v)) != v {
                return Err(PermError::NotAnInvolution { v });
            }
        }
        Ok(MatchingInvolution { perm })
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn partner(&self, v: usize) -> usize {
        self.perm.apply(v)
    }

    /// The perfect matching as a graph: edges {v, partner(v)}.
    pub fn matching_graph(&self) -> SimpleGraph {
        let mut g = SimpleGraph::new(self.len());
        for v in 0..self.len() {
            let w = self.partner(v);
            if v < w {
                g.add_edge(v, w);
            }
        }
        g
    }

    /// Edges of `g` mapped to themselves (u -> v, v -> u with {u,v} in E).
    pub fn fixed_edges_in(&self, g: &SimpleGraph) -> Vec<(usize, usize)> {
        g.edges()
            .into_iter()
            .filter(|&(u, v)| self.partner(u) == v)
            .collect()
    }
}

impl fmt::Display for MatchingInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_cycle;

    #[test]
    fn bijection_validation() {
        assert!(Permutation::from_images(vec![1, 1, 0]).is_err());
        assert!(Permutation::from_images(vec![3, 0, 1]).is_err());
        let p = Permutation::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inverse().images(), &[1, 2, 0]);
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn cycle_notation() {
        let p = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(p.to_string(), "(0 1)(2 3)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        let r = Permutation::from_images(vec![1, 2, 3, 0]).unwrap();
        assert_eq!(r.to_string(), "(0 1 2 3)");
    }

    #[test]
    fn matching_involution_validation() {
        let swap = Permutation::from_images(vec![1, 0, 3, 2]).unwrap();
        let m = MatchingInvolution::new(swap).unwrap();
        assert_eq!(m.matching_graph().edges(), vec![(0, 1), (2, 3)]);

        let fixes = Permutation::from_images(vec![0, 2, 1]).unwrap();
        assert_eq!(
            MatchingInvolution::new(fixes).unwrap_err(),
            PermError::FixedVertex { v: 0 }
        );

        let order4 = Permutation::from_images(vec![1, 2, 3, 0]).unwrap();
        assert!(matches!(
            MatchingInvolution::new(order4).unwrap_err(),
            PermError::NotAnInvolution { .. }
        ));
    }

    #[test]
    fn fixed_edges() {
        let c4 = make_cycle(4).unwrap();
        let rot2 = MatchingInvolution::new(Permutation::from_images(vec![2, 3, 0, 1]).unwrap())
            .unwrap();
        assert!(rot2.fixed_edges_in(&c4).is_empty());
        let reflect = MatchingInvolution::new(Permutation::from_images(vec![1, 0, 3, 2]).unwrap())
            .unwrap();
        assert_eq!(reflect.fixed_edges_in(&c4), vec![(0, 1), (2, 3)]);
    }
}
