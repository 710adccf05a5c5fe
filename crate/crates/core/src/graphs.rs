//! Finite graphs, infinite graph families, and forbidden-subgraph bounds.
//!
//! A family describes a countably infinite homogeneous graph through the
//! finite graphs that must not appear as induced subgraphs (its bounds).
//! Everything downstream reduces realizability questions to embedding
//! checks against these bounds.

use std::fmt;

/// Simple undirected irreflexive graph on vertices `0..order`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteGraph {
    order: usize,
    adj: Vec<bool>,
}

impl FiniteGraph {
    /// Graph with `order` vertices and no edges.
    pub fn null(order: usize) -> Self {
        FiniteGraph { order, adj: vec![false; order * order] }
    }

    /// Complete graph on `order` vertices.
    pub fn complete(order: usize) -> Self {
        let mut g = FiniteGraph::null(order);
        for i in 0..order {
            for j in 0..order {
                if i != j {
                    g.adj[i * order + j] = true;
                }
            }
        }
        g
    }

    /// Path on `order` vertices: edges between consecutive vertices only.
    pub fn path(order: usize) -> Self {
        let mut g = FiniteGraph::null(order);
        for i in 1..order {
            g.set_edge(i - 1, i, true);
        }
        g
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = FiniteGraph::null(order);
        for &(i, j) in edges {
            g.set_edge(i, j, true);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.order + j]
    }

    pub fn set_edge(&mut self, i: usize, j: usize, value: bool) {
        assert!(i != j, "graphs are irreflexive");
        self.adj[i * self.order + j] = value;
        self.adj[j * self.order + i] = value;
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.order).filter(|&u| self.edge(v, u)).count()
    }

    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                if self.edge(i, j) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Edge-complement on the same vertex set.
    pub fn complement(&self) -> Self {
        let mut g = FiniteGraph::null(self.order);
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                g.set_edge(i, j, !self.edge(i, j));
            }
        }
        g
    }

    /// Minimal upper-triangle bit code over all vertex permutations.
    ///
    /// Two graphs are isomorphic iff their codes agree. Exact only for
    /// orders up to 8, which covers every bound graph handled here.
    pub fn canonical_code(&self) -> Result<u64, GraphError> {
        if self.order > 8 {
            return Err(GraphError::OrderTooLarge(self.order));
        }
        let mut best = u64::MAX;
        let mut perm: Vec<usize> = (0..self.order).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut code: u64 = 0;
            let mut bit = 0;
            for i in 0..self.order {
                for j in (i + 1)..self.order {
                    if self.edge(p[i], p[j]) {
                        code |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            if code < best {
                best = code;
            }
        });
        Ok(best)
    }
}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut edges = Vec::new();
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                if self.edge(i, j) {
                    edges.push((i, j));
                }
            }
        }
        write!(f, "FiniteGraph(order={}, edges={:?})", self.order, edges)
    }
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Decides whether `pattern` embeds into `host` as an induced subgraph
/// via an injective map. Prunes on degree sequences before searching.
pub fn embeds(pattern: &FiniteGraph, host: &FiniteGraph) -> bool {
    if pattern.order > host.order {
        return false;
    }
    if pattern.order == 0 {
        return true;
    }
    let mut pd: Vec<usize> = (0..pattern.order).map(|v| pattern.degree(v)).collect();
    let mut hd: Vec<usize> = (0..host.order).map(|v| host.degree(v)).collect();
    pd.sort_unstable_by(|a, b| b.cmp(a));
    hd.sort_unstable_by(|a, b| b.cmp(a));
    if pd.iter().zip(hd.iter()).any(|(p, h)| p > h) {
        return false;
    }

    // Map pattern vertices in descending-degree order.
    let mut vertex_order: Vec<usize> = (0..pattern.order).collect();
    vertex_order.sort_unstable_by_key(|&v| usize::MAX - pattern.degree(v));
    let mut assignment = vec![usize::MAX; pattern.order];
    let mut used = vec![false; host.order];
    search(pattern, host, &vertex_order, 0, &mut assignment, &mut used)
}

fn search(
    pattern: &FiniteGraph,
    host: &FiniteGraph,
    order: &[usize],
    depth: usize,
    assignment: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let vdeg = pattern.degree(v);
    'candidates: for c in 0..host.order {
        if used[c] || host.degree(c) < vdeg {
            continue;
        }
        for &w in &order[..depth] {
            if pattern.edge(v, w) != host.edge(c, assignment[w]) {
                continue 'candidates;
            }
        }
        assignment[v] = c;
        used[c] = true;
        if search(pattern, host, order, depth + 1, assignment, used) {
            return true;
        }
        assignment[v] = usize::MAX;
        used[c] = false;
    }
    false
}

/// A cardinality parameter of a clique family: finite or countably infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Size {
    Finite(u32),
    Omega,
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Finite(n) => write!(f, "{n}"),
            Size::Omega => write!(f, "omega"),
        }
    }
}

/// One of the countably infinite homogeneous graphs handled by the toolkit.
///
/// `Random` is the graph with no bounds, `Henson(k)` forbids the complete
/// graph on `k` vertices, `Cliques` is the disjoint union of `count` cliques
/// of `size` vertices each (at least one parameter infinite), and
/// `Complement` wraps one of the former two (nesting depth exactly one).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GraphFamily {
    Random,
    Henson(u32),
    Cliques { size: Size, count: Size },
    Complement(Box<GraphFamily>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    InvalidFamily(String),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::InvalidFamily(msg) => write!(f, "invalid graph family: {msg}"),
        }
    }
}

impl std::error::Error for FamilyError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    OrderTooLarge(usize),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::OrderTooLarge(n) => {
                write!(f, "canonical form supports order <= 8, got {n}")
            }
        }
    }
}

impl std::error::Error for GraphError {}

impl GraphFamily {
    pub fn validate(&self) -> Result<(), FamilyError> {
        match self {
            GraphFamily::Random => Ok(()),
            GraphFamily::Henson(k) => {
                if *k < 3 {
                    Err(FamilyError::InvalidFamily(format!(
                        "henson parameter must be at least 3, got {k}"
                    )))
                } else {
                    Ok(())
                }
            }
            GraphFamily::Cliques { size, count } => {
                if let (Size::Finite(s), Size::Finite(n)) = (size, count) {
                    return Err(FamilyError::InvalidFamily(format!(
                        "clique family needs an infinite parameter, got size {s} and count {n}"
                    )));
                }
                for (name, p) in [("size", size), ("count", count)] {
                    if let Size::Finite(v) = p {
                        if *v < 1 {
                            return Err(FamilyError::InvalidFamily(format!(
                                "clique {name} must be at least 1"
                            )));
                        }
                    }
                }
                Ok(())
            }
            GraphFamily::Complement(inner) => match inner.as_ref() {
                GraphFamily::Henson(_) | GraphFamily::Cliques { .. } => inner.validate(),
                other => Err(FamilyError::InvalidFamily(format!(
                    "complement applies to henson or clique families only, got {other}"
                ))),
            },
        }
    }

    /// The finite graphs forbidden as induced subgraphs.
    pub fn bounds(&self) -> Vec<FiniteGraph> {
        match self {
            GraphFamily::Random => Vec::new(),
            GraphFamily::Henson(k) => vec![FiniteGraph::complete(*k as usize)],
            GraphFamily::Cliques { size, count } => {
                let mut out = vec![FiniteGraph::path(3)];
                if let Size::Finite(n) = count {
                    out.push(FiniteGraph::null(*n as usize + 1));
                }
                if let Size::Finite(s) = size {
                    out.push(FiniteGraph::complete(*s as usize + 1));
                }
                out
            }
            GraphFamily::Complement(inner) => {
                inner.bounds().iter().map(FiniteGraph::complement).collect()
            }
        }
    }

    /// Consistency radius: 3 or the largest bound order, whichever is bigger.
    pub fn l_value(&self) -> usize {
        self.bounds()
            .iter()
            .map(FiniteGraph::order)
            .max()
            .unwrap_or(0)
            .max(3)
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Random => write!(f, "random"),
            GraphFamily::Henson(k) => write!(f, "henson({k})"),
            GraphFamily::Cliques { size, count } => write!(f, "cliques({size},{count})"),
            GraphFamily::Complement(inner) => write!(f, "complement({inner})"),
        }
    }
}

/// True when no bound of the family embeds into `g`.
///
/// Bounds larger than `g` are skipped: they cannot embed.
pub fn realizable(family: &GraphFamily, g: &FiniteGraph) -> bool {
    family
        .bounds()
        .iter()
        .all(|b| b.order() > g.order() || !embeds(b, g))
}
