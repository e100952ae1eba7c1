//! Undirected simple graphs as bit-packed symmetric adjacency matrices,
//! plus the named families used throughout the crate (paths, cycles, grids,
//! tori, Cayley graphs over Z_n x Z_m, the Petersen graph).

use std::fmt;

use thiserror::Error;

/// Hard cap on vertex counts. Keeps every product entry <= n so exact
/// integer arithmetic in [`crate::matrix`] can never overflow.
pub const MAX_VERTICES: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {n} vertices, exceeding the supported maximum {MAX_VERTICES}")]
    TooManyVertices { n: usize },
    #[error("vertex {v} out of range for graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("loop edge {{{v},{v}}} not allowed in a simple graph")]
    LoopEdge { v: usize },
    #[error("duplicate edge {{{u},{v}}}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("labels must have length {n}, got {got}")]
    LabelCountMismatch { n: usize, got: usize },
    #[error("duplicate vertex label {label:?}")]
    DuplicateLabel { label: String },
    #[error("path needs at least 1 vertex")]
    EmptyPath,
    #[error("cycle needs at least 3 vertices, got {k}")]
    ShortCycle { k: usize },
    #[error("Cayley connection set contains the identity (0,0)")]
    CayleyIdentity,
    #[error("Cayley connection set is not symmetric: ({a},{b}) present but its negation is not")]
    CayleyNotSymmetric { a: usize, b: usize },
    #[error("Cayley generator ({a},{b}) out of range for Z_{n} x Z_{m}")]
    CayleyGeneratorRange { a: usize, b: usize, n: usize, m: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// Undirected simple graph: symmetric 0/1 adjacency, zero diagonal, with
/// optional pairwise-distinct vertex labels.
///
/// Rows are bit-packed in `u64` words so degree and common-neighbor counts
/// are popcounts. Equality compares vertex count and adjacency only; labels
/// are carried along but never affect `==` (the factorization identity
/// A = BC is sensitive to vertex order, not names).
#[derive(Clone)]
pub struct SimpleGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl SimpleGraph {
    /// Edgeless graph on `n` vertices. Panics above [`MAX_VERTICES`].
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "graph too large: {n} > {MAX_VERTICES}");
        let words = n.div_ceil(64);
        SimpleGraph {
            n,
            words,
            bits: vec![0; n * words],
            labels: None,
        }
    }

    /// Build from an edge list, rejecting loops, duplicates and range errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n });
        }
        let mut g = SimpleGraph::new(n);
        for &(u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_edgeless(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        debug_assert!(u < self.n && v < self.n);
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds the edge {u,v}. Panics on loops or out-of-range vertices;
    /// adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert!(u != v, "loop edge not allowed");
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn try_add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::LoopEdge { v });
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge {
                u: u.min(v),
                v: u.max(v),
            });
        }
        self.add_edge(u, v);
        Ok(())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Bit-packed adjacency row of `v` (`self.words` words).
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(v);
        row.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Edges as (u, v) pairs with u < v, lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Number of common neighbors |N(u) in self  ∩  N(v) in other|.
    /// Both graphs must share the vertex count.
    pub fn common_neighbors(&self, u: usize, other: &SimpleGraph, v: usize) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.row(u)
            .iter()
            .zip(other.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<(), GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LabelCountMismatch {
                n: self.n,
                got: labels.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(GraphError::DuplicateLabel { label: l.clone() });
            }
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn clear_labels(&mut self) {
        self.labels = None;
    }

    /// Relabels vertices: vertex `u` of `self` becomes `perm[u]`.
    /// `perm` must be a bijection on 0..n.
    pub fn apply_permutation(&self, perm: &[usize]) -> SimpleGraph {
        assert_eq!(perm.len(), self.n);
        let mut g = SimpleGraph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        if let Some(labels) = &self.labels {
            let mut new_labels = vec![String::new(); self.n];
            for (u, l) in labels.iter().enumerate() {
                new_labels[perm[u]] = l.clone();
            }
            g.labels = Some(new_labels);
        }
        g
    }

    /// Connected components as vertex sets, each sorted ascending, ordered
    /// by minimum vertex index. Their union is V and no edge crosses sets.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    /// True when the graph has no cycle (every component is a tree).
    pub fn is_forest(&self) -> bool {
        // |E| = n - #components characterizes forests.
        self.edge_count() + self.components().len() == self.n || self.n == 0
    }

    /// Induced subgraph on `vertices` (ascending order expected); vertex i of
    /// the result corresponds to `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> SimpleGraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = SimpleGraph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v) {
                if w > v && index[w] != usize::MAX {
                    g.add_edge(i, index[w]);
                }
            }
        }
        g
    }

    /// BFS distances from `start`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

impl PartialEq for SimpleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bits == other.bits
    }
}

impl Eq for SimpleGraph {}

impl std::hash::Hash for SimpleGraph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.bits.hash(state);
    }
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleGraph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Path P_k on vertices 0..k with edges {i, i+1}.
pub fn make_path(k: usize) -> Result<SimpleGraph, GraphError> {
    if k == 0 {
        return Err(GraphError::EmptyPath);
    }
    let mut g = SimpleGraph::new(k);
    for i in 0..k - 1 {
        g.add_edge(i, i + 1);
    }
    Ok(g)
}

/// Cycle C_k on vertices 0..k with edges {i, (i+1) mod k}; k >= 3.
pub fn make_cycle(k: usize) -> Result<SimpleGraph, GraphError> {
    if k < 3 {
        return Err(GraphError::ShortCycle { k });
    }
    let mut g = SimpleGraph::new(k);
    for i in 0..k {
        g.add_edge(i, (i + 1) % k);
    }
    Ok(g)
}

/// Complete graph K_k.
pub fn make_complete(k: usize) -> SimpleGraph {
    let mut g = SimpleGraph::new(k);
    for u in 0..k {
        for v in u + 1..k {
            g.add_edge(u, v);
        }
    }
    g
}

/// Cartesian product: (a,x) adjacent to (b,y) iff (a=b and x~y in h) or
/// (x=y and a~b in g). Vertex (a,x) gets flat index a*|V(h)| + x.
pub fn cartesian_product(g: &SimpleGraph, h: &SimpleGraph) -> SimpleGraph {
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let mut p = SimpleGraph::new(ng * nh);
    for a in 0..ng {
        for (x, y) in h.edges() {
            p.add_edge(a * nh + x, a * nh + y);
        }
    }
    for (a, b) in g.edges() {
        for x in 0..nh {
            p.add_edge(a * nh + x, b * nh + x);
        }
    }
    p
}

/// Grid P_n [] P_m. Vertex (i,j), 1-based, sits at flat index (i-1)*m + (j-1).
pub fn make_grid(n: usize, m: usize) -> Result<SimpleGraph, GraphError> {
    Ok(cartesian_product(&make_path(n)?, &make_path(m)?))
}

/// Torus C_n [] C_m; n, m >= 3. Vertex (i,j), 0-based residues, flat i*m + j.
pub fn make_torus(n: usize, m: usize) -> Result<SimpleGraph, GraphError> {
    Ok(cartesian_product(&make_cycle(n)?, &make_cycle(m)?))
}

/// Cayley graph over Z_n x Z_m: (a,b) ~ (c,d) iff (c-a, d-b) mod (n,m) lies
/// in the connection set. The set must exclude (0,0) and be closed under
/// negation. Vertex (a,b) sits at flat index a*m + b.
pub fn cayley_z2(
    n: usize,
    m: usize,
    connection: &[(usize, usize)],
) -> Result<SimpleGraph, GraphError> {
    if n == 0 || m == 0 {
        return Err(GraphError::ZeroModulus);
    }
    let mut set = std::collections::BTreeSet::new();
    for &(a, b) in connection {
        if a >= n || b >= m {
            return Err(GraphError::CayleyGeneratorRange { a, b, n, m });
        }
        if (a, b) == (0, 0) {
            return Err(GraphError::CayleyIdentity);
        }
        set.insert((a, b));
    }
    for &(a, b) in &set {
        let neg = ((n - a) % n, (m - b) % m);
        if !set.contains(&neg) {
            return Err(GraphError::CayleyNotSymmetric { a, b });
        }
    }
    let mut g = SimpleGraph::new(n * m);
    for a in 0..n {
        for b in 0..m {
            for &(s, t) in &set {
                let (c, d) = ((a + s) % n, (b + t) % m);
                let (u, v) = (a * m + b, c * m + d);
                if u < v {
                    g.add_edge(u, v);
                }
            }
        }
    }
    Ok(g)
}

/// The Petersen graph in its Kneser form: vertices are the 2-subsets of
/// {1..5} in lexicographic order, adjacent iff disjoint.
pub fn make_petersen() -> SimpleGraph {
    let mut subsets = Vec::new();
    for a in 1..=5u8 {
        for b in a + 1..=5 {
            subsets.push((a, b));
        }
    }
    let mut g = SimpleGraph::new(10);
    for i in 0..10 {
        for j in i + 1..10 {
            let (a, b) = subsets[i];
            let (c, d) = subsets[j];
            if a != c && a != d && b != c && b != d {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Vertex-disjoint union with g's vertices first (block-diagonal adjacency).
pub fn disjoint_union(g: &SimpleGraph, h: &SimpleGraph) -> SimpleGraph {
    let ng = g.vertex_count();
    let mut u = SimpleGraph::new(ng + h.vertex_count());
    for (a, b) in g.edges() {
        u.add_edge(a, b);
    }
    for (a, b) in h.edges() {
        u.add_edge(ng + a, ng + b);
    }
    u
}

/// 1-based grid coordinate (i,j) in P_n [] P_m with its row-major flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCoord {
    pub i: usize,
    pub j: usize,
    pub n: usize,
    pub m: usize,
}

impl GridCoord {
    pub fn new(i: usize, j: usize, n: usize, m: usize) -> Self {
        assert!((1..=n).contains(&i) && (1..=m).contains(&j));
        GridCoord { i, j, n, m }
    }

    pub fn to_index(self) -> usize {
        (self.i - 1) * self.m + (self.j - 1)
    }

    pub fn from_index(v: usize, n: usize, m: usize) -> Self {
        assert!(v < n * m);
        GridCoord {
            i: v / m + 1,
            j: v % m + 1,
            n,
            m,
        }
    }
}

/// 0-based torus coordinate (i,j) in C_n [] C_m, componentwise modular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusCoord {
    pub i: usize,
    pub j: usize,
    pub n: usize,
    pub m: usize,
}

impl TorusCoord {
    pub fn new(i: usize, j: usize, n: usize, m: usize) -> Self {
        TorusCoord {
            i: i % n,
            j: j % m,
            n,
            m,
        }
    }

    pub fn to_index(self) -> usize {
        self.i * self.m + self.j
    }

    pub fn from_index(v: usize, n: usize, m: usize) -> Self {
        assert!(v < n * m);
        TorusCoord {
            i: v / m,
            j: v % m,
            n,
            m,
        }
    }

    pub fn translate(self, di: usize, dj: usize) -> Self {
        TorusCoord::new(self.i + di, self.j + dj, self.n, self.m)
    }
}

/// Exact-labeled recognition of grids: all ordered (n,m) with n*m = |V|
/// such that the graph equals `make_grid(n, m)` under the identity ordering.
pub fn recognize_grid(g: &SimpleGraph) -> Option<(usize, usize)> {
    let total = g.vertex_count();
    if total == 0 {
        return None;
    }
    for n in 1..=total {
        if total % n != 0 {
            continue;
        }
        let m = total / n;
        if make_grid(n, m).ok().as_ref() == Some(g) {
            return Some((n, m));
        }
    }
    None
}

/// Exact-labeled recognition of tori C_n [] C_m with n, m >= 3.
pub fn recognize_torus(g: &SimpleGraph) -> Option<(usize, usize)> {
    let total = g.vertex_count();
    for n in 3..=total / 3 {
        if total % n != 0 {
            continue;
        }
        let m = total / n;
        if m < 3 {
            continue;
        }
        if make_torus(n, m).ok().as_ref() == Some(g) {
            return Some((n, m));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_family() {
        assert_eq!(make_path(1).unwrap().edge_count(), 0);
        let p2 = make_path(2).unwrap();
        assert_eq!(p2.edges(), vec![(0, 1)]);
        let p8 = make_path(8).unwrap();
        assert_eq!(p8.edge_count(), 7);
        assert_eq!(p8.degree_sequence(), vec![1, 2, 2, 2, 2, 2, 2, 1]);
        assert_eq!(make_path(0).unwrap_err(), GraphError::EmptyPath);
    }

    #[test]
    fn cycle_family() {
        let c3 = make_cycle(3).unwrap();
        assert!(c3.degree_sequence().iter().all(|&d| d == 2));
        assert_eq!(make_cycle(2).unwrap_err(), GraphError::ShortCycle { k: 2 });

        // C4 is K_{2,2} after swapping vertices 1 and 2.
        let c4 = make_cycle(4).unwrap();
        let k22 = SimpleGraph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(c4.apply_permutation(&[0, 2, 1, 3]), k22);

        let c6 = make_cycle(6).unwrap();
        assert_eq!(c6.edge_count(), 6);
        // 2-colorable: alternate along the cycle.
        for (u, v) in c6.edges() {
            assert_ne!(u % 2, v % 2);
        }
    }

    #[test]
    fn cartesian_product_counts() {
        let p2 = make_path(2).unwrap();
        let p4 = make_path(4).unwrap();
        let g = cartesian_product(&p2, &p2);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = cartesian_product(&p2, &p4);
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 10));
        let c3 = make_cycle(3).unwrap();
        let t = cartesian_product(&c3, &c3);
        assert_eq!(t.vertex_count(), 9);
        assert!(t.degree_sequence().iter().all(|&d| d == 4));
    }

    #[test]
    fn cayley_torus_and_collapse() {
        let t = cayley_z2(3, 3, &[(1, 0), (2, 0), (0, 1), (0, 2)]).unwrap();
        assert_eq!(t, make_torus(3, 3).unwrap());

        let c5 = cayley_z2(5, 1, &[(1, 0), (4, 0)]).unwrap();
        assert_eq!(c5, make_cycle(5).unwrap());

        let g = cayley_z2(3, 3, &[(2, 1), (1, 2)]).unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 2));
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn cayley_rejects_bad_sets() {
        assert_eq!(
            cayley_z2(3, 3, &[(0, 0)]).unwrap_err(),
            GraphError::CayleyIdentity
        );
        assert_eq!(
            cayley_z2(3, 3, &[(1, 0)]).unwrap_err(),
            GraphError::CayleyNotSymmetric { a: 1, b: 0 }
        );
    }

    #[test]
    fn cayley_is_translation_invariant() {
        let s = [(1, 0), (6, 0), (0, 1), (0, 4), (2, 3), (5, 2)];
        let g = cayley_z2(7, 5, &s).unwrap();
        for shift_a in 0..7 {
            for shift_b in 0..5 {
                for u in 0..35 {
                    for v in 0..35 {
                        let (a, b) = (u / 5, u % 5);
                        let (c, d) = (v / 5, v % 5);
                        let tu = (a + shift_a) % 7 * 5 + (b + shift_b) % 5;
                        let tv = (c + shift_a) % 7 * 5 + (d + shift_b) % 5;
                        if u != v {
                            assert_eq!(g.has_edge(u, v), g.has_edge(tu, tv));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn petersen_shape() {
        let p = make_petersen();
        assert_eq!((p.vertex_count(), p.edge_count()), (10, 15));
        assert!(p.degree_sequence().iter().all(|&d| d == 3));
        // Girth 5: no C3 and no C4 means no pair of adjacent vertices with a
        // common neighbor and no pair with two common neighbors.
        for u in 0..10 {
            for v in u + 1..10 {
                let common = p.common_neighbors(u, &p, v);
                if p.has_edge(u, v) {
                    assert_eq!(common, 0);
                } else {
                    assert!(common <= 1);
                }
            }
        }
    }

    #[test]
    fn union_and_components() {
        let p8 = make_path(8).unwrap();
        let g = disjoint_union(&p8, &p8);
        assert_eq!((g.vertex_count(), g.edge_count()), (16, 14));
        let comps = g.components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 8));

        let empty = SimpleGraph::new(0);
        assert_eq!(disjoint_union(&empty, &p8), p8);

        let edgeless = SimpleGraph::new(3);
        assert_eq!(edgeless.components().len(), 3);
        assert!(make_path(5).unwrap().is_connected());
    }

    #[test]
    fn grid_coord_round_trip() {
        for v in 0..12 {
            let c = GridCoord::from_index(v, 3, 4);
            assert_eq!(c.to_index(), v);
        }
        assert_eq!(GridCoord::new(2, 3, 3, 4).to_index(), 1 * 4 + 2);
        for v in 0..12 {
            let c = TorusCoord::from_index(v, 3, 4);
            assert_eq!(c.to_index(), v);
        }
        assert_eq!(TorusCoord::new(2, 3, 3, 4).translate(2, 2).to_index(), 1 * 4 + 1);
    }

    #[test]
    fn recognizers() {
        assert_eq!(recognize_grid(&make_grid(2, 4).unwrap()), Some((2, 4)));
        assert_eq!(recognize_grid(&make_path(5).unwrap()), Some((1, 5)));
        assert_eq!(recognize_grid(&make_cycle(4).unwrap()), None);
        assert_eq!(recognize_torus(&make_torus(3, 4).unwrap()), Some((3, 4)));
        assert_eq!(recognize_torus(&make_grid(3, 4).unwrap()), None);
    }

    #[test]
    fn labels_validate() {
        let mut g = SimpleGraph::new(2);
        assert!(g
            .set_labels(vec!["a".into(), "a".into()])
            .is_err());
        g.set_labels(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(g.labels().unwrap()[1], "b");
    }

    #[test]
    fn forest_detection() {
        assert!(make_path(6).unwrap().is_forest());
        assert!(!make_cycle(4).unwrap().is_forest());
        let f = disjoint_union(&make_path(3).unwrap(), &make_path(4).unwrap());
        assert!(f.is_forest());
    }
}
