//! Quantifier-free types of tuples and finite relations made of them.
//!
//! A type records, for a tuple of positions, which positions coincide and
//! whether distinct positions are adjacent. It is stored canonically as a
//! partition of positions (classes numbered by first occurrence) plus an
//! edge or non-edge label for every class pair. A relation is a finite
//! duplicate-free set of types of one arity.

use crate::graphs::{realizable, FiniteGraph, GraphFamily};
use std::collections::BTreeSet;
use std::fmt;

/// Largest tuple arity the enumeration and construction routines accept.
pub const MAX_TYPE_ARITY: usize = 8;

/// Relation between two tuple positions: equal, adjacent, or non-adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitLabel {
    Eq,
    E,
    N,
}

impl OrbitLabel {
    pub const ALL: [OrbitLabel; 3] = [OrbitLabel::Eq, OrbitLabel::E, OrbitLabel::N];

    pub fn token(self) -> &'static str {
        match self {
            OrbitLabel::Eq => "=",
            OrbitLabel::E => "E",
            OrbitLabel::N => "N",
        }
    }

    pub fn parse(token: &str) -> Result<Self, TypeError> {
        match token {
            "=" => Ok(OrbitLabel::Eq),
            "E" => Ok(OrbitLabel::E),
            "N" => Ok(OrbitLabel::N),
            other => Err(TypeError::BadLabel(other.to_string())),
        }
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeError {
    BadLabel(String),
    BadLength(usize),
    ZeroArity,
    Inconsistent,
    Unrealizable,
    ArityMismatch { expected: usize, got: usize },
    ArityTooLarge(usize),
    PositionOutOfRange { position: usize, arity: usize },
    EmptyPositions,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeError::BadLabel(t) => write!(f, "unknown pair label {t:?}"),
            TypeError::BadLength(n) => {
                write!(f, "{n} labels do not form a triangular pair list")
            }
            TypeError::ZeroArity => write!(f, "types have at least one position"),
            TypeError::Inconsistent => {
                write!(f, "pair labels are inconsistent with equality")
            }
            TypeError::Unrealizable => {
                write!(f, "quotient graph embeds a forbidden bound")
            }
            TypeError::ArityMismatch { expected, got } => {
                write!(f, "expected arity {expected}, got {got}")
            }
            TypeError::ArityTooLarge(r) => {
                write!(f, "arity {r} exceeds the cap of {MAX_TYPE_ARITY}")
            }
            TypeError::PositionOutOfRange { position, arity } => {
                write!(f, "position {position} out of range for arity {arity}")
            }
            TypeError::EmptyPositions => write!(f, "position list is empty"),
        }
    }
}

impl std::error::Error for TypeError {}

/// Canonical quantifier-free type of an `arity`-tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType {
    arity: usize,
    /// Position to class, classes numbered by first occurrence.
    class_of: Vec<usize>,
    /// Labels for class pairs `(c1, c2)` with `c1 < c2`, row-major; only
    /// `E` or `N` appear here.
    labels: Vec<OrbitLabel>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl QfType {
    /// Builds a type from labels for position pairs in row-major order:
    /// `(0,1), (0,2), ..., (0,r-1), (1,2), ...`. Positions labeled `=`
    /// are identified transitively; the result must be consistent and its
    /// quotient realizable in the family.
    pub fn from_labels(
        arity: usize,
        labels: &[OrbitLabel],
        family: &GraphFamily,
    ) -> Result<Self, TypeError> {
        let t = Self::assemble(arity, labels)?;
        if !realizable(family, &t.quotient_graph()) {
            return Err(TypeError::Unrealizable);
        }
        Ok(t)
    }

    /// Consistency part of `from_labels`, without the realizability check.
    fn assemble(arity: usize, labels: &[OrbitLabel]) -> Result<Self, TypeError> {
        if arity == 0 {
            return Err(TypeError::ZeroArity);
        }
        if arity > MAX_TYPE_ARITY {
            return Err(TypeError::ArityTooLarge(arity));
        }
        if labels.len() != arity * (arity - 1) / 2 {
            return Err(TypeError::BadLength(labels.len()));
        }
        // Union positions along equality labels.
        let mut parent: Vec<usize> = (0..arity).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..arity {
            for j in (i + 1)..arity {
                if labels[pair_index(arity, i, j)] == OrbitLabel::Eq {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        // Number classes by first occurrence.
        let mut class_of = vec![usize::MAX; arity];
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..arity {
            let r = find(&mut parent, i);
            let id = match roots.iter().position(|&x| x == r) {
                Some(id) => id,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
            class_of[i] = id;
        }
        let classes = roots.len();
        // Collect a single label per class pair and reject conflicts.
        let mut class_labels: Vec<Option<OrbitLabel>> = vec![None; classes * (classes - 1) / 2];
        for i in 0..arity {
            for j in (i + 1)..arity {
                let label = labels[pair_index(arity, i, j)];
                let (ci, cj) = (class_of[i], class_of[j]);
                if ci == cj {
                    if label != OrbitLabel::Eq {
                        return Err(TypeError::Inconsistent);
                    }
                    continue;
                }
                if label == OrbitLabel::Eq {
                    unreachable!("equal-labeled positions share a class");
                }
                let idx = pair_index(classes, ci.min(cj), ci.max(cj));
                match class_labels[idx] {
                    None => class_labels[idx] = Some(label),
                    Some(existing) if existing == label => {}
                    Some(_) => return Err(TypeError::Inconsistent),
                }
            }
        }
        let labels = class_labels
            .into_iter()
            .map(|l| l.expect("every class pair has a labeled position pair"))
            .collect();
        Ok(QfType { arity, class_of, labels })
    }

    /// Parses the comma-separated pair label encoding; the empty string is
    /// the unique type of arity 1.
    pub fn parse(text: &str, family: &GraphFamily) -> Result<Self, TypeError> {
        let text = text.trim();
        if text.is_empty() {
            return Self::from_labels(1, &[], family);
        }
        let labels = text
            .split(',')
            .map(|tok| OrbitLabel::parse(tok.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        let len = labels.len();
        let mut arity = 2;
        while arity * (arity - 1) / 2 < len {
            arity += 1;
        }
        if arity * (arity - 1) / 2 != len {
            return Err(TypeError::BadLength(len));
        }
        Self::from_labels(arity, &labels, family)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_classes(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn class_of(&self, position: usize) -> usize {
        self.class_of[position]
    }

    /// Positions grouped by class, classes in canonical order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (pos, &c) in self.class_of.iter().enumerate() {
            out[c].push(pos);
        }
        out
    }

    /// Label between two positions; `Eq` when they share a class.
    pub fn label(&self, i: usize, j: usize) -> OrbitLabel {
        let (ci, cj) = (self.class_of[i], self.class_of[j]);
        if ci == cj {
            return OrbitLabel::Eq;
        }
        let n = self.num_classes();
        self.labels[pair_index(n, ci.min(cj), ci.max(cj))]
    }

    /// Label between two classes; `Eq` when they coincide.
    pub fn class_label(&self, c1: usize, c2: usize) -> OrbitLabel {
        if c1 == c2 {
            return OrbitLabel::Eq;
        }
        let n = self.num_classes();
        self.labels[pair_index(n, c1.min(c2), c1.max(c2))]
    }

    /// Graph on the classes with edges where the label is `E`.
    pub fn quotient_graph(&self) -> FiniteGraph {
        let n = self.num_classes();
        let mut g = FiniteGraph::null(n);
        for c1 in 0..n {
            for c2 in (c1 + 1)..n {
                if self.class_label(c1, c2) == OrbitLabel::E {
                    g.set_edge(c1, c2, true);
                }
            }
        }
        g
    }

    /// Type of the subtuple at `positions`. Duplicates are permitted and
    /// become equal positions. Projections of realizable types stay
    /// realizable, so no family is needed.
    pub fn project(&self, positions: &[usize]) -> Result<QfType, TypeError> {
        if positions.is_empty() {
            return Err(TypeError::EmptyPositions);
        }
        for &p in positions {
            if p >= self.arity {
                return Err(TypeError::PositionOutOfRange { position: p, arity: self.arity });
            }
        }
        let r = positions.len();
        if r > MAX_TYPE_ARITY {
            return Err(TypeError::ArityTooLarge(r));
        }
        let mut labels = Vec::with_capacity(r * (r - 1) / 2);
        for a in 0..r {
            for b in (a + 1)..r {
                labels.push(self.label(positions[a], positions[b]));
            }
        }
        Self::assemble(r, &labels)
    }

    /// The orbit string: pair labels joined by commas in row-major order.
    pub fn encode(&self) -> String {
        let mut parts = Vec::with_capacity(self.arity * (self.arity - 1) / 2);
        for i in 0..self.arity {
            for j in (i + 1)..self.arity {
                parts.push(self.label(i, j).token());
            }
        }
        parts.join(",")
    }
}

impl fmt::Display for QfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for QfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QfType({})", self.encode())
    }
}

/// Finite duplicate-free set of types sharing one arity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitRelation {
    arity: usize,
    orbits: BTreeSet<QfType>,
}

impl OrbitRelation {
    pub fn new(arity: usize) -> Self {
        OrbitRelation { arity, orbits: BTreeSet::new() }
    }

    pub fn from_orbits(
        arity: usize,
        orbits: impl IntoIterator<Item = QfType>,
    ) -> Result<Self, TypeError> {
        let mut rel = OrbitRelation::new(arity);
        for t in orbits {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    /// All types of the given arity over the family.
    pub fn full(family: &GraphFamily, arity: usize) -> Result<Self, TypeError> {
        Ok(OrbitRelation {
            arity,
            orbits: enumerate_types(family, arity)?.into_iter().collect(),
        })
    }

    pub fn insert(&mut self, t: QfType) -> Result<bool, TypeError> {
        if t.arity() != self.arity {
            return Err(TypeError::ArityMismatch { expected: self.arity, got: t.arity() });
        }
        Ok(self.orbits.insert(t))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn contains(&self, t: &QfType) -> bool {
        self.orbits.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &QfType> {
        self.orbits.iter()
    }

    pub fn remove(&mut self, t: &QfType) -> bool {
        self.orbits.remove(t)
    }

    /// Pointwise projection; duplicates collapse, so the result may be
    /// smaller than the input.
    pub fn project(&self, positions: &[usize]) -> Result<OrbitRelation, TypeError> {
        let mut out = OrbitRelation::new(positions.len());
        for t in &self.orbits {
            out.insert(t.project(positions)?)?;
        }
        Ok(out)
    }
}

/// Every realizable type of the given arity, in canonical sorted order.
///
/// Enumerates set partitions as restricted growth strings and, per
/// partition, every edge labeling of the class pairs, keeping those whose
/// quotient avoids all bounds.
pub fn enumerate_types(family: &GraphFamily, arity: usize) -> Result<Vec<QfType>, TypeError> {
    if arity == 0 {
        return Err(TypeError::ZeroArity);
    }
    if arity > MAX_TYPE_ARITY {
        return Err(TypeError::ArityTooLarge(arity));
    }
    let bounds = family.bounds();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; arity];
    loop {
        let classes = rgs.iter().max().unwrap() + 1;
        let pairs = classes * (classes - 1) / 2;
        let mut labels = vec![OrbitLabel::E; pairs];
        let mut labels_done = false;
        while !labels_done {
            let candidate = QfType { arity, class_of: rgs.clone(), labels: labels.clone() };
            let quotient = candidate.quotient_graph();
            if bounds
                .iter()
                .all(|b| b.order() > quotient.order() || !crate::graphs::embeds(b, &quotient))
            {
                out.push(candidate);
            }
            // Advance labels lexicographically with E before N; stop on wrap.
            labels_done = true;
            for pos in (0..pairs).rev() {
                if labels[pos] == OrbitLabel::E {
                    labels[pos] = OrbitLabel::N;
                    for l in labels.iter_mut().skip(pos + 1) {
                        *l = OrbitLabel::E;
                    }
                    labels_done = false;
                    break;
                }
            }
        }
        // Advance the restricted growth string.
        let mut i = arity;
        let mut advanced = false;
        while i > 1 {
            i -= 1;
            let prefix_max = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(out)
}
