//! Establishing and verifying (k,l)-minimality.
//!
//! An instance is (k,l)-minimal when every set of at most l variables is
//! contained in some constraint scope, and any two constraints agree on
//! their projections to every shared set of at most k variables.
//! Establishment first repairs the covering condition by adding universal
//! constraints, then deletes orbits until all projections agree. Deletion
//! never removes a satisfying assignment, so the result has the same
//! solutions as the input.

use crate::entailment::OrbitalSet;
use crate::graphs::{realizable, FiniteGraph, GraphFamily};
use crate::instance::Instance;
use crate::orbits::{enumerate_types, OrbitLabel, OrbitRelation, QfType, TypeError, MAX_TYPE_ARITY};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinimalityError {
    /// k and l must satisfy 1 <= k <= l.
    BadParameters { k: usize, l: usize },
    /// Universal constraints would exceed the type enumeration cap.
    ArityTooLarge(usize),
    /// A constraint given to `from_parts` is malformed.
    BadConstraint { index: usize, message: String },
    NotSimple,
    NotMinimal,
    /// Narrowing failed: every label of the pair trivializes the instance.
    Stuck { pair: (usize, usize), attempted: Vec<OrbitLabel> },
}

impl fmt::Display for MinimalityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinimalityError::BadParameters { k, l } => {
                write!(f, "need 1 <= k <= l, got k={k}, l={l}")
            }
            MinimalityError::ArityTooLarge(e) => {
                write!(f, "universal constraints of arity {e} exceed the cap {MAX_TYPE_ARITY}")
            }
            MinimalityError::BadConstraint { index, message } => {
                write!(f, "constraint {index}: {message}")
            }
            MinimalityError::NotSimple => write!(f, "instance is not simple"),
            MinimalityError::NotMinimal => write!(f, "instance is not minimal"),
            MinimalityError::Stuck { pair, attempted } => {
                let tried: Vec<&str> = attempted.iter().map(|l| l.token()).collect();
                write!(
                    f,
                    "pair ({}, {}) cannot be narrowed: {} all trivialize",
                    pair.0,
                    pair.1,
                    tried.join(", ")
                )
            }
        }
    }
}

impl std::error::Error for MinimalityError {}

/// First failure of one of the two minimality conditions. Variable sets
/// are ascending variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A subset of min(l, |V|) variables lies in no constraint scope.
    Uncovered { subset: Vec<usize> },
    /// Two constraints project differently onto a shared subset.
    Disagreement { first: usize, second: usize, subset: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncovered { subset } => {
                write!(f, "variables {subset:?} lie in no constraint scope")
            }
            Violation::Disagreement { first, second, subset } => {
                write!(
                    f,
                    "constraints {first} and {second} disagree on variables {subset:?}"
                )
            }
        }
    }
}

/// A constraint with its relation inlined, so establishment can delete
/// orbits without touching the source instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalConstraint {
    pub scope: Vec<usize>,
    pub relation: OrbitRelation,
}

impl MinimalConstraint {
    /// Distinct scope variables, ascending.
    pub fn scope_set(&self) -> Vec<usize> {
        let mut s = self.scope.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// First scope position of each variable in `w`; `w` must consist of
    /// scope variables.
    fn positions(&self, w: &[usize]) -> Vec<usize> {
        w.iter()
            .map(|v| self.scope.iter().position(|x| x == v).expect("variable is in scope"))
            .collect()
    }

    /// Projection of the relation onto the variables `w` (ascending,
    /// within the scope).
    pub fn projection(&self, w: &[usize]) -> OrbitRelation {
        self.relation
            .project(&self.positions(w))
            .expect("scope positions are in range")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalInstance {
    family: GraphFamily,
    variables: Vec<String>,
    constraints: Vec<MinimalConstraint>,
    k: usize,
    l: usize,
}

/// All ascending `size`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        // Advance the rightmost index that can still move.
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - size {
                break;
            }
        }
        current[i] += 1;
        for j in (i + 1)..size {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Ascending `size`-subsets of an ascending item list.
pub(crate) fn subsets_of(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    subsets(items.len(), size)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| items[i]).collect())
        .collect()
}

/// Two-pointer inclusion test for ascending lists.
pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Per-round projection pools: the intersection over covering constraints
/// of their projections onto each subset of at most k variables. Singleton
/// pools degenerate to non-emptiness, pair pools to orbital sets.
struct Pools {
    singleton: BTreeMap<usize, bool>,
    pair: BTreeMap<(usize, usize), OrbitalSet>,
    higher: BTreeMap<Vec<usize>, BTreeSet<QfType>>,
}

impl MinimalInstance {
    pub fn from_instance(inst: &Instance, k: usize, l: usize) -> Result<Self, MinimalityError> {
        if k < 1 || k > l {
            return Err(MinimalityError::BadParameters { k, l });
        }
        let constraints = inst
            .constraints()
            .iter()
            .map(|c| MinimalConstraint {
                scope: c.scope.clone(),
                relation: inst.constraint_relation(c).clone(),
            })
            .collect();
        Ok(MinimalInstance {
            family: inst.family().clone(),
            variables: inst.variables().to_vec(),
            constraints,
            k,
            l,
        })
    }

    /// Assembles a candidate state directly, for checkers and tests.
    pub fn from_parts(
        family: GraphFamily,
        variables: Vec<String>,
        constraints: Vec<MinimalConstraint>,
        k: usize,
        l: usize,
    ) -> Result<Self, MinimalityError> {
        if k < 1 || k > l {
            return Err(MinimalityError::BadParameters { k, l });
        }
        for (index, c) in constraints.iter().enumerate() {
            if c.scope.is_empty() {
                return Err(MinimalityError::BadConstraint {
                    index,
                    message: "empty scope".into(),
                });
            }
            if c.scope.len() != c.relation.arity() {
                return Err(MinimalityError::BadConstraint {
                    index,
                    message: format!(
                        "scope has {} variables, relation arity is {}",
                        c.scope.len(),
                        c.relation.arity()
                    ),
                });
            }
            if let Some(&v) = c.scope.iter().find(|&&v| v >= variables.len()) {
                return Err(MinimalityError::BadConstraint {
                    index,
                    message: format!("variable index {v} out of range"),
                });
            }
        }
        Ok(MinimalInstance { family, variables, constraints, k, l })
    }

    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[MinimalConstraint] {
        &self.constraints
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn is_trivial(&self) -> bool {
        self.constraints.iter().any(|c| c.relation.is_empty())
    }

    /// Adds a universal constraint (all realizable types) over every
    /// min(l, |V|)-subset of variables not inside an existing scope.
    /// Smaller subsets are then covered through these.
    pub fn add_universal_constraints(&mut self) -> Result<(), MinimalityError> {
        let e = self.l.min(self.variables.len());
        if e == 0 {
            return Ok(());
        }
        if e > MAX_TYPE_ARITY {
            return Err(MinimalityError::ArityTooLarge(e));
        }
        let types = enumerate_types(&self.family, e).expect("arity is within the cap");
        let universal =
            OrbitRelation::from_orbits(e, types).expect("enumerated types share one arity");
        let wide_scopes: Vec<Vec<usize>> = self
            .constraints
            .iter()
            .map(|c| c.scope_set())
            .filter(|s| s.len() >= e)
            .collect();
        for subset in subsets(self.variables.len(), e) {
            if !wide_scopes.iter().any(|s| is_subset(&subset, s)) {
                self.constraints
                    .push(MinimalConstraint { scope: subset, relation: universal.clone() });
            }
        }
        Ok(())
    }

    fn build_pools(&self) -> Pools {
        let mut pools = Pools {
            singleton: BTreeMap::new(),
            pair: BTreeMap::new(),
            higher: BTreeMap::new(),
        };
        for c in &self.constraints {
            let ss = c.scope_set();
            for &v in &ss {
                let alive = !c.relation.is_empty();
                pools
                    .singleton
                    .entry(v)
                    .and_modify(|a| *a &= alive)
                    .or_insert(alive);
            }
            if self.k < 2 {
                continue;
            }
            for pair in subsets_of(&ss, 2) {
                let pos = c.positions(&pair);
                let mut set = OrbitalSet::EMPTY;
                for t in c.relation.iter() {
                    set.insert(t.label(pos[0], pos[1]));
                }
                let key = (pair[0], pair[1]);
                pools
                    .pair
                    .entry(key)
                    .and_modify(|s| *s = s.intersect(set))
                    .or_insert(set);
            }
            for size in 3..=self.k.min(ss.len()) {
                for w in subsets_of(&ss, size) {
                    let proj: BTreeSet<QfType> = c.projection(&w).iter().cloned().collect();
                    pools
                        .higher
                        .entry(w)
                        .and_modify(|s| *s = s.intersection(&proj).cloned().collect())
                        .or_insert(proj);
                }
            }
        }
        pools
    }

    /// Deletes orbits until every projection onto a shared subset of at
    /// most k variables agrees across constraints. Also removes orbits
    /// that repeat a scope variable without identifying its positions.
    /// Returns whether anything changed. Deterministic and idempotent.
    pub fn propagate(&mut self) -> bool {
        let mut changed_any = false;
        for c in &mut self.constraints {
            let ss = c.scope_set();
            if ss.len() == c.scope.len() {
                continue;
            }
            let kept: Vec<QfType> = c
                .relation
                .iter()
                .filter(|t| {
                    (0..c.scope.len()).all(|p| {
                        (p + 1..c.scope.len()).all(|q| {
                            c.scope[p] != c.scope[q] || t.label(p, q) == OrbitLabel::Eq
                        })
                    })
                })
                .cloned()
                .collect();
            if kept.len() != c.relation.len() {
                c.relation = OrbitRelation::from_orbits(c.relation.arity(), kept)
                    .expect("filtering preserves arity");
                changed_any = true;
            }
        }
        loop {
            let pools = self.build_pools();
            let mut changed = false;
            for c in &mut self.constraints {
                let ss = c.scope_set();
                if ss.iter().any(|v| !pools.singleton[v]) {
                    if !c.relation.is_empty() {
                        c.relation = OrbitRelation::new(c.relation.arity());
                        changed = true;
                    }
                    continue;
                }
                let pairs: Vec<(usize, usize, OrbitalSet)> = if self.k >= 2 {
                    subsets_of(&ss, 2)
                        .into_iter()
                        .map(|p| {
                            let pos = c.positions(&p);
                            (pos[0], pos[1], pools.pair[&(p[0], p[1])])
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                let higher: Vec<(Vec<usize>, &BTreeSet<QfType>)> = (3..=self.k.min(ss.len()))
                    .flat_map(|size| subsets_of(&ss, size))
                    .map(|w| {
                        let pos = c.positions(&w);
                        (pos, &pools.higher[&w])
                    })
                    .collect();
                let kept: Vec<QfType> = c
                    .relation
                    .iter()
                    .filter(|t| {
                        pairs.iter().all(|&(p, q, set)| set.contains(t.label(p, q)))
                            && higher.iter().all(|(pos, pool)| {
                                pool.contains(&t.project(pos).expect("positions are in range"))
                            })
                    })
                    .cloned()
                    .collect();
                if kept.len() != c.relation.len() {
                    c.relation = OrbitRelation::from_orbits(c.relation.arity(), kept)
                        .expect("filtering preserves arity");
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            changed_any = true;
        }
        changed_any
    }

    /// Union of the projections onto the pair over all covering
    /// constraints; after establishment the union equals each one.
    /// None when no constraint covers the pair.
    pub fn pair_projection(&self, i: usize, j: usize) -> Option<OrbitalSet> {
        let w = [i.min(j), i.max(j)];
        if w[0] == w[1] {
            return None;
        }
        let mut found = false;
        let mut set = OrbitalSet::EMPTY;
        for c in &self.constraints {
            let ss = c.scope_set();
            if !is_subset(&w, &ss) {
                continue;
            }
            found = true;
            let pos = c.positions(&w);
            for t in c.relation.iter() {
                set.insert(t.label(pos[0], pos[1]));
            }
        }
        found.then_some(set)
    }

    /// Every covered pair of distinct variables is pinned to one orbital.
    /// Uncovered pairs count as not simple.
    pub fn is_simple(&self) -> bool {
        let n = self.variables.len();
        for i in 0..n {
            for j in (i + 1)..n {
                match self.pair_projection(i, j) {
                    Some(set) if set.len() == 1 => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Lexicographically first pair whose projection is not yet a single
    /// orbital.
    pub fn first_multivalued_pair(&self) -> Option<(usize, usize, OrbitalSet)> {
        let n = self.variables.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if let Some(set) = self.pair_projection(i, j) {
                    if set.len() > 1 {
                        return Some((i, j, set));
                    }
                }
            }
        }
        None
    }

    /// Copy with the pair (i, j) constrained to one orbital, re-propagated.
    /// A label the family cannot realize yields an empty pin, hence a
    /// trivial result.
    pub fn pinned(&self, i: usize, j: usize, label: OrbitLabel) -> MinimalInstance {
        let mut rel = OrbitRelation::new(2);
        if let Ok(t) = QfType::from_labels(2, &[label], &self.family) {
            rel.insert(t).expect("binary type");
        }
        let mut out = self.clone();
        out.constraints.push(MinimalConstraint { scope: vec![i, j], relation: rel });
        out.propagate();
        out
    }

    /// Repeatedly pins the first multi-valued pair to the first priority
    /// label present until the instance is simple. Fails with `Stuck` when
    /// every available label trivializes, and `NotMinimal` when the input
    /// is trivial or not actually (k,l)-minimal.
    pub fn shrink_to_simple(
        &self,
        priority: &[OrbitLabel],
    ) -> Result<MinimalInstance, MinimalityError> {
        if self.is_trivial() || verify_minimality(self).is_some() {
            return Err(MinimalityError::NotMinimal);
        }
        let mut current = self.clone();
        loop {
            let Some((i, j, set)) = current.first_multivalued_pair() else {
                return Ok(current);
            };
            let mut attempted = Vec::new();
            let mut advanced = false;
            for &label in priority {
                if !set.contains(label) {
                    continue;
                }
                attempted.push(label);
                let candidate = current.pinned(i, j, label);
                if !candidate.is_trivial() {
                    current = candidate;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Err(MinimalityError::Stuck { pair: (i, j), attempted });
            }
        }
    }

    /// Rebuilds a named-relation instance (relation of constraint i is
    /// called "m i") with identical solutions, for independent re-solving.
    pub fn to_instance(&self) -> Instance {
        let mut inst = Instance::new(self.family.clone()).expect("family was validated");
        for v in &self.variables {
            inst.add_variable(v).expect("variable names stay unique");
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let name = format!("m{i}");
            inst.insert_relation(&name, c.relation.clone()).expect("fresh name");
            inst.add_constraint_by_index(c.scope.clone(), &name).expect("scope was validated");
        }
        inst
    }

    /// Reads off the global type of a simple instance and checks it is
    /// consistent and realizable. The certificate is present when the
    /// variable count fits the type arity cap.
    pub fn quotient_and_check(&self) -> Result<CheckOutcome, MinimalityError> {
        if self.k < 2 {
            return Err(MinimalityError::NotMinimal);
        }
        if self.is_trivial() {
            return Ok(CheckOutcome::Unsat);
        }
        let n = self.variables.len();
        if n == 0 {
            return Ok(CheckOutcome::Sat { certificate: None });
        }
        let mut labels = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let set = self.pair_projection(i, j).ok_or(MinimalityError::NotMinimal)?;
                labels.push(set.singleton().ok_or(MinimalityError::NotSimple)?);
            }
        }
        if n <= MAX_TYPE_ARITY {
            return match QfType::from_labels(n, &labels, &self.family) {
                Ok(t) => Ok(CheckOutcome::Sat { certificate: Some(t) }),
                Err(TypeError::Inconsistent) | Err(TypeError::Unrealizable) => {
                    Ok(CheckOutcome::Unsat)
                }
                Err(e) => unreachable!("label vector is well-formed: {e}"),
            };
        }
        // Above the cap: run the same consistency and realizability checks
        // without building a type.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let at = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
        for i in 0..n {
            for j in (i + 1)..n {
                if labels[at(i, j)] == OrbitLabel::Eq {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            let r = find(&mut parent, i);
            if class_of[r] == usize::MAX {
                class_of[r] = next;
                next += 1;
            }
            class_of[i] = class_of[r];
        }
        let mut cross: BTreeMap<(usize, usize), OrbitLabel> = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let label = labels[at(i, j)];
                let (ci, cj) = (class_of[i], class_of[j]);
                if ci == cj {
                    if label != OrbitLabel::Eq {
                        return Ok(CheckOutcome::Unsat);
                    }
                    continue;
                }
                let key = (ci.min(cj), ci.max(cj));
                match cross.get(&key) {
                    None => {
                        cross.insert(key, label);
                    }
                    Some(&existing) if existing == label => {}
                    Some(_) => return Ok(CheckOutcome::Unsat),
                }
            }
        }
        let mut quotient = FiniteGraph::null(next);
        for (&(a, b), &label) in &cross {
            if label == OrbitLabel::E {
                quotient.set_edge(a, b, true);
            }
        }
        if realizable(&self.family, &quotient) {
            Ok(CheckOutcome::Sat { certificate: None })
        } else {
            Ok(CheckOutcome::Unsat)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Sat { certificate: Option<QfType> },
    Unsat,
}

/// Covering repair followed by projection agreement, to fixpoint.
pub fn establish_minimality(
    inst: &Instance,
    k: usize,
    l: usize,
) -> Result<MinimalInstance, MinimalityError> {
    let mut m = MinimalInstance::from_instance(inst, k, l)?;
    m.add_universal_constraints()?;
    m.propagate();
    Ok(m)
}

/// Checks both minimality conditions literally and reports the first
/// failure: covering violations in subset order, then projection
/// disagreements by constraint pair and subset. Exact and exponential in
/// k and l; meant for desk-scale candidates.
pub fn verify_minimality(m: &MinimalInstance) -> Option<Violation> {
    let n = m.variables().len();
    let e = m.l().min(n);
    if e > 0 {
        let scope_sets: Vec<Vec<usize>> = m
            .constraints()
            .iter()
            .map(|c| c.scope_set())
            .filter(|s| s.len() >= e)
            .collect();
        for subset in subsets(n, e) {
            if !scope_sets.iter().any(|s| is_subset(&subset, s)) {
                return Some(Violation::Uncovered { subset });
            }
        }
    }
    let cs = m.constraints();
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            let (si, sj) = (cs[i].scope_set(), cs[j].scope_set());
            let shared: Vec<usize> = si.iter().copied().filter(|v| sj.contains(v)).collect();
            for size in 1..=m.k().min(shared.len()) {
                for w in subsets_of(&shared, size) {
                    if cs[i].projection(&w) != cs[j].projection(&w) {
                        return Some(Violation::Disagreement { first: i, second: j, subset: w });
                    }
                }
            }
        }
    }
    None
}

/// Convenience wrapper: inline the instance and verify directly, without
/// establishment.
pub fn verify_instance_minimality(
    inst: &Instance,
    k: usize,
    l: usize,
) -> Result<Option<Violation>, MinimalityError> {
    let m = MinimalInstance::from_instance(inst, k, l)?;
    Ok(verify_minimality(&m))
}
