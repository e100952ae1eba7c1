//! Factorization search: an exhaustive backtracking oracle over factor
//! pairs, a zero-pruning reference search it is validated against, tree
//! isomorphism support for forests, and the strategy dispatcher that
//! combines constructions, primality and the oracle.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automorphism::{
    factor_by_matching, matching_involutions_with_bound, AutomorphismError, ObstructionReason,
    DEFAULT_AUT_BOUND,
};
use crate::classify::{structural_prime_rule, PrimeRule};
use crate::constructions;
use crate::graph::{recognize_grid, recognize_torus, SimpleGraph};
use crate::matrix::{verify_factorization, Factorization, Provenance};
use crate::par;

/// The oracle stores adjacency rows as u32 masks.
const ORACLE_VERTEX_CAP: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("input is not a tree (must be connected and acyclic)")]
    NotATree,
    #[error("input is not a forest")]
    NotAForest,
    #[error("forest has an isolated vertex {v}; strip isolated vertices first")]
    IsolatedVertex { v: usize },
    #[error("reference search is capped at {cap} vertices, got {n}")]
    ReferenceTooLarge { n: usize, cap: usize },
}

/// Limits for the backtracking oracle. Exceeding any of them produces an
/// explicit `Exhausted` verdict, never a silent negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_vertices: usize,
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_vertices: 7,
            node_limit: 100_000_000,
            time_limit: Duration::from_secs(600),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Factorable,
    NotFactorable,
    Exhausted,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Factorable => "factorable",
            Verdict::NotFactorable => "not-factorable",
            Verdict::Exhausted => "exhausted",
        })
    }
}

/// The complete method that settled a verdict. A `NotFactorable` outcome
/// always names one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionMethod {
    /// Edgeless graphs: the zero matrix is the product of two zero matrices.
    ZeroMatrix,
    /// Grid recognized; factorable iff both sides even. The obstruction
    /// explains odd-side refusals.
    GridTheorem {
        n: usize,
        m: usize,
        obstruction: Option<ObstructionReason>,
    },
    /// Torus recognized; every torus is factorable.
    TorusTheorem { n: usize, m: usize },
    /// Forest handled by component pairing (complete in both directions).
    ForestPairing { paired: bool },
    /// Graph proved prime, then decided by the matching-involution search.
    PrimeMatching { rule: PrimeRule, involutions: usize },
    /// Exhaustive oracle run to completion.
    OracleExhaustive,
}

#[derive(Debug, Clone)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: Duration,
    pub trail: Vec<String>,
    pub decided_by: Option<DecisionMethod>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub certificates: Vec<Factorization>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    fn new(verdict: Verdict, certificates: Vec<Factorization>, stats: SearchStats) -> Self {
        debug_assert!(verdict != Verdict::Factorable || !certificates.is_empty());
        SearchOutcome {
            verdict,
            certificates,
            stats,
        }
    }
}

/// Divisor splittings (deg_H, deg_K) of a vertex degree, ascending in
/// deg_H so matching-factor candidates come first. Degree 0 allows one
/// factor to carry edges as long as the other stays empty there.
fn degree_options(deg: usize, n: usize) -> Vec<(usize, usize)> {
    if deg == 0 {
        let mut opts = vec![(0, 0)];
        opts.extend((1..n).map(|b| (0, b)));
        opts.extend((1..n).map(|a| (a, 0)));
        return opts;
    }
    (1..=deg)
        .filter(|a| deg % a == 0)
        .map(|a| (a, deg / a))
        .collect()
}

struct OracleShared {
    nodes: AtomicU64,
    over_budget: AtomicBool,
    node_limit: u64,
    deadline: Instant,
}

impl OracleShared {
    /// Counts one search node; false once any limit is exceeded.
    fn tick(&self) -> bool {
        if self.over_budget.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.node_limit || (n % 1024 == 0 && Instant::now() > self.deadline) {
            self.over_budget.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

struct OracleTask<'a> {
    g: &'a SimpleGraph,
    n: usize,
    adj: Vec<u32>,
    pairs: Vec<(usize, usize)>,
    shared: &'a OracleShared,
    find_all: bool,
}

struct OracleState {
    t_h: Vec<usize>,
    t_k: Vec<usize>,
    d_h: Vec<usize>,
    d_k: Vec<usize>,
    rows_h: Vec<u32>,
    rows_k: Vec<u32>,
    /// Partial product counts: paths i -H- w -K- j over placed edges.
    prod: Vec<u8>,
    /// Undecided pairs still involving each vertex.
    remaining: Vec<usize>,
    found: Vec<Factorization>,
}

impl<'a> OracleTask<'a> {
    fn a(&self, i: usize, j: usize) -> u8 {
        self.adj[i * self.n + j] as u8
    }

    /// Both factor degrees of `v` must still be reachable from the pairs
    /// left undecided at `v`: each pair contributes to at most one factor.
    fn feasible(&self, st: &OracleState, v: usize) -> bool {
        st.t_h[v] - st.d_h[v] + st.t_k[v] - st.d_k[v] <= st.remaining[v]
    }

    /// Places an H-edge, updating partial products; undone by the caller on
    /// backtrack. Returns false (without mutating) when a product entry
    /// would exceed the adjacency target.
    fn place_h(&self, st: &mut OracleState, u: usize, v: usize) -> bool {
        let mut kv = st.rows_k[v];
        while kv != 0 {
            let x = kv.trailing_zeros() as usize;
            kv &= kv - 1;
            if st.prod[u * self.n + x] + 1 > self.a(u, x) {
                return false;
            }
        }
        let mut ku = st.rows_k[u];
        while ku != 0 {
            let x = ku.trailing_zeros() as usize;
            ku &= ku - 1;
            if st.prod[v * self.n + x] + 1 > self.a(v, x) {
                return false;
            }
        }
        let mut kv = st.rows_k[v];
        while kv != 0 {
            let x = kv.trailing_zeros() as usize;
            kv &= kv - 1;
            st.prod[u * self.n + x] += 1;
        }
        let mut ku = st.rows_k[u];
        while ku != 0 {
            let x = ku.trailing_zeros() as usize;
            ku &= ku - 1;
            st.prod[v * self.n + x] += 1;
        }
        st.rows_h[u] |= 1 << v;
        st.rows_h[v] |= 1 << u;
        st.d_h[u] += 1;
        st.d_h[v] += 1;
        true
    }

    fn unplace_h(&self, st: &mut OracleState, u: usize, v: usize) {
        st.rows_h[u] &= !(1 << v);
        st.rows_h[v] &= !(1 << u);
        st.d_h[u] -= 1;
        st.d_h[v] -= 1;
        let mut kv = st.rows_k[v];
        while kv != 0 {
            let x = kv.trailing_zeros() as usize;
            kv &= kv - 1;
            st.prod[u * self.n + x] -= 1;
        }
        let mut ku = st.rows_k[u];
        while ku != 0 {
            let x = ku.trailing_zeros() as usize;
            ku &= ku - 1;
            st.prod[v * self.n + x] -= 1;
        }
    }

    fn place_k(&self, st: &mut OracleState, u: usize, v: usize) -> bool {
        let mut hu = st.rows_h[u];
        while hu != 0 {
            let i = hu.trailing_zeros() as usize;
            hu &= hu - 1;
            if st.prod[i * self.n + v] + 1 > self.a(i, v) {
                return false;
            }
        }
        let mut hv = st.rows_h[v];
        while hv != 0 {
            let i = hv.trailing_zeros() as usize;
            hv &= hv - 1;
            if st.prod[i * self.n + u] + 1 > self.a(i, u) {
                return false;
            }
        }
        let mut hu = st.rows_h[u];
        while hu != 0 {
            let i = hu.trailing_zeros() as usize;
            hu &= hu - 1;
            st.prod[i * self.n + v] += 1;
        }
        let mut hv = st.rows_h[v];
        while hv != 0 {
            let i = hv.trailing_zeros() as usize;
            hv &= hv - 1;
            st.prod[i * self.n + u] += 1;
        }
        st.rows_k[u] |= 1 << v;
        st.rows_k[v] |= 1 << u;
        st.d_k[u] += 1;
        st.d_k[v] += 1;
        true
    }

    fn unplace_k(&self, st: &mut OracleState, u: usize, v: usize) {
        st.rows_k[u] &= !(1 << v);
        st.rows_k[v] &= !(1 << u);
        st.d_k[u] -= 1;
        st.d_k[v] -= 1;
        let mut hu = st.rows_h[u];
        while hu != 0 {
            let i = hu.trailing_zeros() as usize;
            hu &= hu - 1;
            st.prod[i * self.n + v] -= 1;
        }
        let mut hv = st.rows_h[v];
        while hv != 0 {
            let i = hv.trailing_zeros() as usize;
            hv &= hv - 1;
            st.prod[i * self.n + u] -= 1;
        }
    }

    fn at_leaf(&self, st: &mut OracleState) {
        for v in 0..self.n {
            if st.d_h[v] != st.t_h[v] || st.d_k[v] != st.t_k[v] {
                return;
            }
        }
        // Partial products never exceed the adjacency; the leaf requires
        // exact equality everywhere.
        for i in 0..self.n {
            for j in 0..self.n {
                if st.prod[i * self.n + j] != self.a(i, j) {
                    return;
                }
            }
        }
        let mut h = SimpleGraph::new(self.n);
        let mut k = SimpleGraph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if st.rows_h[u] >> v & 1 == 1 {
                    h.add_edge(u, v);
                }
                if st.rows_k[u] >> v & 1 == 1 {
                    k.add_edge(u, v);
                }
            }
        }
        let fact = verify_factorization(self.g, &h, &k, Provenance::Oracle)
            .expect("oracle leaf must verify");
        st.found.push(fact);
    }

    /// Decide pair `idx` as an H-edge, a K-edge, or absent. True while the
    /// search should continue (budget intact, and no early exit requested).
    fn decide(&self, st: &mut OracleState, idx: usize) -> bool {
        if !self.shared.tick() {
            return false;
        }
        if idx == self.pairs.len() {
            self.at_leaf(st);
            return self.find_all || st.found.is_empty();
        }
        let (u, v) = self.pairs[idx];
        st.remaining[u] -= 1;
        st.remaining[v] -= 1;

        // Lemma: an H-edge forces equal K-degrees at its endpoints (and
        // symmetrically), so mismatched targets prune the branch outright.
        if st.d_h[u] < st.t_h[u] && st.d_h[v] < st.t_h[v] && st.t_k[u] == st.t_k[v] {
            if self.place_h(st, u, v) {
                let go = if self.feasible(st, u) && self.feasible(st, v) {
                    self.decide(st, idx + 1)
                } else {
                    true
                };
                self.unplace_h(st, u, v);
                if !go {
                    st.remaining[u] += 1;
                    st.remaining[v] += 1;
                    return false;
                }
            }
        }
        if st.d_k[u] < st.t_k[u] && st.d_k[v] < st.t_k[v] && st.t_h[u] == st.t_h[v] {
            if self.place_k(st, u, v) {
                let go = if self.feasible(st, u) && self.feasible(st, v) {
                    self.decide(st, idx + 1)
                } else {
                    true
                };
                self.unplace_k(st, u, v);
                if !go {
                    st.remaining[u] += 1;
                    st.remaining[v] += 1;
                    return false;
                }
            }
        }
        let go = if self.feasible(st, u) && self.feasible(st, v) {
            self.decide(st, idx + 1)
        } else {
            true
        };
        st.remaining[u] += 1;
        st.remaining[v] += 1;
        go
    }

    /// Runs the edge-decision search under one complete degree assignment.
    fn run_assignment(&self, t_h: Vec<usize>, t_k: Vec<usize>) -> Vec<Factorization> {
        let n = self.n;
        let mut st = OracleState {
            t_h,
            t_k,
            d_h: vec![0; n],
            d_k: vec![0; n],
            rows_h: vec![0; n],
            rows_k: vec![0; n],
            prod: vec![0; n * n],
            remaining: vec![n.saturating_sub(1); n],
            found: Vec::new(),
        };
        let feasible_start = (0..n).all(|v| self.feasible(&st, v));
        if feasible_start {
            self.decide(&mut st, 0);
        }
        st.found
    }
}

/// Enumerates complete degree assignments in lexicographic option order,
/// pruning on handshake parity at the leaves.
fn degree_assignments(options: &[Vec<(usize, usize)>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = options.len();
    let mut out = Vec::new();
    let mut t_h = vec![0usize; n];
    let mut t_k = vec![0usize; n];
    fn rec(
        options: &[Vec<(usize, usize)>],
        v: usize,
        t_h: &mut Vec<usize>,
        t_k: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if v == options.len() {
            let sh: usize = t_h.iter().sum();
            let sk: usize = t_k.iter().sum();
            if sh % 2 == 0 && sk % 2 == 0 {
                out.push((t_h.clone(), t_k.clone()));
            }
            return;
        }
        for &(a, b) in &options[v] {
            t_h[v] = a;
            t_k[v] = b;
            rec(options, v + 1, t_h, t_k, out);
        }
    }
    rec(options, 0, &mut t_h, &mut t_k, &mut out);
    out
}

/// Exhaustive search for factor pairs (H, K) with A = BC, by definitional
/// backtracking: vertices first receive (deg_H, deg_K) divisor splittings
/// of their degree, then every vertex pair is decided as H-edge, K-edge or
/// absent, pruning on degree-constancy across placed edges and on partial
/// product entries. Branches run in parallel over degree assignments with a
/// shared atomic node budget; certificate order is the sequential
/// enumeration order either way.
///
/// With `find_all` every leaf certificate is kept (including H/K swaps);
/// otherwise the first certificate in enumeration order is returned.
pub fn oracle_factorizations(
    g: &SimpleGraph,
    budget: &SearchBudget,
    find_all: bool,
) -> SearchOutcome {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut trail = Vec::new();
    if n > budget.max_vertices || n > ORACLE_VERTEX_CAP {
        trail.push(format!(
            "oracle refused: {n} vertices exceeds the budget bound {}",
            budget.max_vertices.min(ORACLE_VERTEX_CAP)
        ));
        return SearchOutcome::new(
            Verdict::Exhausted,
            Vec::new(),
            SearchStats {
                nodes: 0,
                elapsed: start.elapsed(),
                trail,
                decided_by: None,
            },
        );
    }

    let options: Vec<Vec<(usize, usize)>> =
        (0..n).map(|v| degree_options(g.degree(v), n)).collect();
    let assignments = degree_assignments(&options);
    trail.push(format!(
        "oracle: {} degree assignments over {} vertices",
        assignments.len(),
        n
    ));

    let shared = OracleShared {
        nodes: AtomicU64::new(0),
        over_budget: AtomicBool::new(false),
        node_limit: budget.node_limit,
        deadline: start + budget.time_limit,
    };
    let mut adj = vec![0u32; n * n];
    for (u, v) in g.edges() {
        adj[u * n + v] = 1;
        adj[v * n + u] = 1;
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    let task = OracleTask {
        g,
        n,
        adj,
        pairs,
        shared: &shared,
        find_all,
    };

    let certificates: Vec<Factorization> = if find_all {
        par::map_collect(assignments, |(t_h, t_k)| task.run_assignment(t_h, t_k))
            .into_iter()
            .flatten()
            .collect()
    } else {
        par::find_map_first(assignments, |(t_h, t_k)| {
            task.run_assignment(t_h, t_k).into_iter().next()
        })
        .into_iter()
        .collect()
    };

    let nodes = shared.nodes.load(Ordering::Relaxed);
    let exhausted = shared.over_budget.load(Ordering::Relaxed);
    let (verdict, decided_by) = if !certificates.is_empty() {
        if exhausted {
            trail.push("budget exhausted mid-search; certificate list may be incomplete".into());
            (Verdict::Factorable, None)
        } else {
            (Verdict::Factorable, Some(DecisionMethod::OracleExhaustive))
        }
    } else if exhausted {
        trail.push("budget exhausted before the search completed".into());
        (Verdict::Exhausted, None)
    } else {
        trail.push("exhaustive search completed with no factorization".into());
        (Verdict::NotFactorable, Some(DecisionMethod::OracleExhaustive))
    };
    SearchOutcome::new(
        verdict,
        certificates,
        SearchStats {
            nodes,
            elapsed: start.elapsed(),
            trail,
            decided_by,
        },
    )
}

/// Zero-pruning reference: enumerate every pair of symmetric 0/1
/// zero-diagonal matrices and test the product directly. Deliberately
/// independent of the pruned oracle; capped at 5 vertices.
pub fn reference_factorable(g: &SimpleGraph) -> Result<bool, SearchError> {
    let n = g.vertex_count();
    if n > 5 {
        return Err(SearchError::ReferenceTooLarge { n, cap: 5 });
    }
    let mut pair_index = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pair_index.push((u, v));
        }
    }
    let count = 1usize << pair_index.len();
    let rows_of = |mask: usize| -> Vec<u8> {
        let mut rows = vec![0u8; n];
        for (bit, &(u, v)) in pair_index.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                rows[u] |= 1 << v;
                rows[v] |= 1 << u;
            }
        }
        rows
    };
    let mut a = vec![0u8; n * n];
    for (u, v) in g.edges() {
        a[u * n + v] = 1;
        a[v * n + u] = 1;
    }
    let all_rows: Vec<Vec<u8>> = (0..count).map(rows_of).collect();
    for rows_b in &all_rows {
        'next_c: for rows_c in &all_rows {
            for i in 0..n {
                for j in 0..n {
                    if (rows_b[i] & rows_c[j]).count_ones() as u8 != a[i * n + j] {
                        continue 'next_c;
                    }
                }
            }
            return Ok(true);
        }
    }
    Ok(false)
}

fn tree_validate(g: &SimpleGraph) -> Result<(), SearchError> {
    if g.vertex_count() == 0 || !g.is_connected() || !g.is_forest() {
        return Err(SearchError::NotATree);
    }
    Ok(())
}

/// Centers of a tree by leaf stripping: one vertex, or two adjacent ones.
fn tree_centers(g: &SimpleGraph) -> Vec<usize> {
    let n = g.vertex_count();
    if n == 1 {
        return vec![0];
    }
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut alive = n;
    while alive > 2 {
        let mut next = Vec::new();
        alive -= layer.len();
        for &v in &layer {
            degree[v] = 0;
            for w in g.neighbors(v) {
                if degree[w] > 0 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// AHU code of the tree rooted at `root`: children codes sorted and
/// bracketed, so equal codes mean isomorphic rooted trees.
fn rooted_code(g: &SimpleGraph, root: usize) -> String {
    fn rec(g: &SimpleGraph, v: usize, parent: Option<usize>) -> String {
        let mut child_codes: Vec<String> = g
            .neighbors(v)
            .filter(|&w| Some(w) != parent)
            .map(|w| rec(g, w, Some(v)))
            .collect();
        child_codes.sort();
        format!("({})", child_codes.concat())
    }
    rec(g, root, None)
}

/// Canonical (root, code) of a tree: the lexicographically least rooted
/// code over its one or two centers.
fn canonical_rooting(g: &SimpleGraph) -> (usize, String) {
    tree_centers(g)
        .into_iter()
        .map(|c| (rooted_code(g, c), c))
        .min()
        .map(|(code, root)| (root, code))
        .expect("tree has a center")
}

/// Canonical form of a tree up to isomorphism.
pub fn tree_canonical_code(g: &SimpleGraph) -> Result<String, SearchError> {
    tree_validate(g)?;
    Ok(canonical_rooting(g).1)
}

/// Explicit isomorphism between two trees via canonical rooted forms, or
/// `None` when they differ. The returned map sends vertex v of `t1` to
/// `map[v]` in `t2` and is re-checked edge by edge before returning.
pub fn forest_isomorphism(
    t1: &SimpleGraph,
    t2: &SimpleGraph,
) -> Result<Option<Vec<usize>>, SearchError> {
    tree_validate(t1)?;
    tree_validate(t2)?;
    if t1.vertex_count() != t2.vertex_count() {
        return Ok(None);
    }
    let (r1, c1) = canonical_rooting(t1);
    let (r2, c2) = canonical_rooting(t2);
    if c1 != c2 {
        return Ok(None);
    }

    // Pair children with equal codes in sorted order, recursively.
    fn build(
        t1: &SimpleGraph,
        t2: &SimpleGraph,
        v1: usize,
        v2: usize,
        p1: Option<usize>,
        p2: Option<usize>,
        map: &mut Vec<usize>,
    ) {
        map[v1] = v2;
        let mut kids1: Vec<(String, usize)> = t1
            .neighbors(v1)
            .filter(|&w| Some(w) != p1)
            .map(|w| (subtree_code(t1, w, v1), w))
            .collect();
        let mut kids2: Vec<(String, usize)> = t2
            .neighbors(v2)
            .filter(|&w| Some(w) != p2)
            .map(|w| (subtree_code(t2, w, v2), w))
            .collect();
        kids1.sort();
        kids2.sort();
        for ((code1, w1), (code2, w2)) in kids1.into_iter().zip(kids2) {
            debug_assert_eq!(code1, code2);
            build(t1, t2, w1, w2, Some(v1), Some(v2), map);
        }
    }
    fn subtree_code(g: &SimpleGraph, v: usize, parent: usize) -> String {
        let mut child_codes: Vec<String> = g
            .neighbors(v)
            .filter(|&w| w != parent)
            .map(|w| subtree_code(g, w, v))
            .collect();
        child_codes.sort();
        format!("({})", child_codes.concat())
    }

    let mut map = vec![usize::MAX; t1.vertex_count()];
    build(t1, t2, r1, r2, None, None, &mut map);
    for (u, v) in t1.edges() {
        if !t2.has_edge(map[u], map[v]) {
            return Ok(None);
        }
    }
    Ok(Some(map))
}

/// One matched pair of isomorphic components, with a vertex bijection in
/// the original indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedComponents {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub bijection: Vec<(usize, usize)>,
}

/// Partitions the components of a forest (without isolated vertices) into
/// isomorphic pairs, or `None` when some isomorphism class has odd size.
/// Components are grouped by canonical code; within a class, components
/// sorted by minimum vertex pair up consecutively, which is the
/// lexicographically least pairing.
pub fn pair_up_components(
    forest: &SimpleGraph,
) -> Result<Option<Vec<PairedComponents>>, SearchError> {
    if !forest.is_forest() {
        return Err(SearchError::NotAForest);
    }
    if let Some(v) = (0..forest.vertex_count()).find(|&v| forest.degree(v) == 0) {
        return Err(SearchError::IsolatedVertex { v });
    }
    let mut keyed: Vec<(String, Vec<usize>)> = Vec::new();
    for comp in forest.components() {
        let sub = forest.induced_subgraph(&comp);
        let code = tree_canonical_code(&sub).expect("forest component is a tree");
        keyed.push((code, comp));
    }
    keyed.sort();
    let mut pairs = Vec::new();
    let mut iter = keyed.into_iter().peekable();
    while let Some((code, left)) = iter.next() {
        match iter.peek() {
            Some((next_code, _)) if *next_code == code => {
                let (_, right) = iter.next().expect("peeked");
                let sub_l = forest.induced_subgraph(&left);
                let sub_r = forest.induced_subgraph(&right);
                let iso = forest_isomorphism(&sub_l, &sub_r)
                    .expect("components are trees")
                    .expect("equal canonical codes");
                let bijection = iso
                    .into_iter()
                    .enumerate()
                    .map(|(i, j)| (left[i], right[j]))
                    .collect();
                pairs.push(PairedComponents {
                    left,
                    right,
                    bijection,
                });
            }
            _ => return Ok(None),
        }
    }
    Ok(Some(pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMethod {
    Auto,
    Oracle,
    Matching,
}

/// Strategy dispatcher: recognize constructive families first, then the
/// prime route (structural rule + matching involutions, complete for prime
/// graphs), then the oracle. `NotFactorable` is only ever produced by a
/// complete method, recorded in `stats.decided_by`.
pub fn factor(g: &SimpleGraph, budget: &SearchBudget) -> SearchOutcome {
    factor_with(g, budget, FactorMethod::Auto, false)
}

pub fn factor_with(
    g: &SimpleGraph,
    budget: &SearchBudget,
    method: FactorMethod,
    find_all: bool,
) -> SearchOutcome {
    match method {
        FactorMethod::Auto => factor_auto(g, budget, find_all),
        FactorMethod::Oracle => oracle_factorizations(g, budget, find_all),
        FactorMethod::Matching => factor_matching_only(g, find_all),
    }
}

fn stats_with(trail: Vec<String>, decided_by: Option<DecisionMethod>, start: Instant) -> SearchStats {
    SearchStats {
        nodes: 0,
        elapsed: start.elapsed(),
        trail,
        decided_by,
    }
}

fn factor_auto(g: &SimpleGraph, budget: &SearchBudget, find_all: bool) -> SearchOutcome {
    let start = Instant::now();
    let mut trail = Vec::new();

    if g.is_edgeless() {
        trail.push("edgeless graph: zero matrix factors as zero times zero".into());
        let z = SimpleGraph::new(g.vertex_count());
        let cert = verify_factorization(g, &z, &z, Provenance::Construction)
            .expect("zero product is zero");
        return SearchOutcome::new(
            Verdict::Factorable,
            vec![cert],
            stats_with(trail, Some(DecisionMethod::ZeroMatrix), start),
        );
    }

    if let Some((n, m)) = recognize_grid(g) {
        trail.push(format!("recognized grid {n} x {m}"));
        if n % 2 == 0 && m % 2 == 0 {
            let gf = constructions::factor_grid(n, m).expect("even grid factors");
            trail.push("both sides even: antipodal matching construction".into());
            return SearchOutcome::new(
                Verdict::Factorable,
                vec![gf.factorization],
                stats_with(
                    trail,
                    Some(DecisionMethod::GridTheorem {
                        n,
                        m,
                        obstruction: None,
                    }),
                    start,
                ),
            );
        }
        let obstruction = grid_obstruction(g, n, m);
        trail.push(format!("odd side: {obstruction}"));
        return SearchOutcome::new(
            Verdict::NotFactorable,
            Vec::new(),
            stats_with(
                trail,
                Some(DecisionMethod::GridTheorem {
                    n,
                    m,
                    obstruction: Some(obstruction),
                }),
                start,
            ),
        );
    }

    if let Some((n, m)) = recognize_torus(g) {
        trail.push(format!("recognized torus {n} x {m}: every torus factors"));
        let tf = constructions::factor_torus(n, m).expect("torus factors");
        return SearchOutcome::new(
            Verdict::Factorable,
            vec![tf.factorization],
            stats_with(trail, Some(DecisionMethod::TorusTheorem { n, m }), start),
        );
    }

    if g.is_forest() {
        let kept: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
        let isolated = g.vertex_count() - kept.len();
        if isolated > 0 {
            trail.push(format!(
                "forest with {isolated} isolated vertices: factorable iff the stripped forest is"
            ));
        }
        let stripped = g.induced_subgraph(&kept);
        match pair_up_components(&stripped).expect("stripped forest") {
            Some(_) => {
                let sub_fact =
                    constructions::factor_doubled_forest(&stripped).expect("paired forest factors");
                let (h, k) = embed_factors(g.vertex_count(), &kept, sub_fact.h(), sub_fact.k());
                let cert = verify_factorization(g, &h, &k, Provenance::Construction)
                    .expect("embedded forest certificate verifies");
                trail.push("components pair up into isomorphic twins".into());
                return SearchOutcome::new(
                    Verdict::Factorable,
                    vec![cert],
                    stats_with(
                        trail,
                        Some(DecisionMethod::ForestPairing { paired: true }),
                        start,
                    ),
                );
            }
            None => {
                trail.push(
                    "some component has no isomorphic twin: forests only factor in pairs".into(),
                );
                return SearchOutcome::new(
                    Verdict::NotFactorable,
                    Vec::new(),
                    stats_with(
                        trail,
                        Some(DecisionMethod::ForestPairing { paired: false }),
                        start,
                    ),
                );
            }
        }
    }

    if let Some(rule) = structural_prime_rule(g) {
        trail.push(format!("prime by {rule}"));
        match matching_involutions_with_bound(g, DEFAULT_AUT_BOUND) {
            Ok(involutions) => {
                let count = involutions.len();
                trail.push(format!("{count} matching involutions"));
                if count == 0 {
                    return SearchOutcome::new(
                        Verdict::NotFactorable,
                        Vec::new(),
                        stats_with(
                            trail,
                            Some(DecisionMethod::PrimeMatching {
                                rule,
                                involutions: 0,
                            }),
                            start,
                        ),
                    );
                }
                let take = if find_all { count } else { 1 };
                let certs: Vec<Factorization> = involutions
                    .iter()
                    .take(take)
                    .map(|m| factor_by_matching(g, m).expect("validated involution factors"))
                    .collect();
                return SearchOutcome::new(
                    Verdict::Factorable,
                    certs,
                    stats_with(
                        trail,
                        Some(DecisionMethod::PrimeMatching {
                            rule,
                            involutions: count,
                        }),
                        start,
                    ),
                );
            }
            Err(AutomorphismError::TooLarge { n, bound }) => {
                trail.push(format!(
                    "involution enumeration refused ({n} > bound {bound}); falling back to oracle"
                ));
            }
            Err(e) => trail.push(format!("involution search failed: {e}")),
        }
    }

    let mut outcome = oracle_factorizations(g, budget, find_all);
    trail.append(&mut outcome.stats.trail);
    outcome.stats.trail = trail;
    outcome.stats.elapsed = start.elapsed();
    outcome
}

fn grid_obstruction(g: &SimpleGraph, n: usize, m: usize) -> ObstructionReason {
    if (n * m) % 2 == 1 {
        return ObstructionReason::OddOrder { n: n * m };
    }
    // Exactly one side even: the center is a single edge every automorphism
    // fixes setwise.
    let report = crate::automorphism::center(g).expect("grids are connected");
    debug_assert_eq!(report.center.len(), 2);
    ObstructionReason::CenterEdge {
        u: report.center[0],
        v: report.center[1],
    }
}

fn factor_matching_only(g: &SimpleGraph, find_all: bool) -> SearchOutcome {
    let start = Instant::now();
    let mut trail = vec!["method: matching involutions".into()];
    match matching_involutions_with_bound(g, DEFAULT_AUT_BOUND) {
        Ok(involutions) if !involutions.is_empty() => {
            let count = involutions.len();
            let take = if find_all { count } else { 1 };
            let certs: Vec<Factorization> = involutions
                .iter()
                .take(take)
                .map(|m| factor_by_matching(g, m).expect("validated involution factors"))
                .collect();
            trail.push(format!("{count} matching involutions"));
            SearchOutcome::new(
                Verdict::Factorable,
                certs,
                stats_with(trail, None, start),
            )
        }
        Ok(_) => match structural_prime_rule(g) {
            Some(rule) => {
                trail.push(format!(
                    "no matching involution and the graph is prime by {rule}: complete refusal"
                ));
                SearchOutcome::new(
                    Verdict::NotFactorable,
                    Vec::new(),
                    stats_with(
                        trail,
                        Some(DecisionMethod::PrimeMatching {
                            rule,
                            involutions: 0,
                        }),
                        start,
                    ),
                )
            }
            None => {
                trail.push(
                    "no matching involution, but the graph is not known prime; \
                     a non-matching factorization may exist"
                        .into(),
                );
                SearchOutcome::new(Verdict::Exhausted, Vec::new(), stats_with(trail, None, start))
            }
        },
        Err(e) => {
            trail.push(format!("involution search unavailable: {e}"));
            SearchOutcome::new(Verdict::Exhausted, Vec::new(), stats_with(trail, None, start))
        }
    }
}

/// Lifts factor graphs from an induced-subgraph search back to the full
/// vertex set; vertices outside `kept` stay isolated in both factors.
fn embed_factors(
    full_n: usize,
    kept: &[usize],
    h: &SimpleGraph,
    k: &SimpleGraph,
) -> (SimpleGraph, SimpleGraph) {
    let mut full_h = SimpleGraph::new(full_n);
    let mut full_k = SimpleGraph::new(full_n);
    for (u, v) in h.edges() {
        full_h.add_edge(kept[u], kept[v]);
    }
    for (u, v) in k.edges() {
        full_k.add_edge(kept[u], kept[v]);
    }
    (full_h, full_k)
}
