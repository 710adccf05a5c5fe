//! Compilation to a finite domain of m-types.
//!
//! The finite structure over a family has the realizable m-types as
//! elements, a unary relation per (source relation, index map) holding
//! the types whose reindexed restriction lands in the source relation,
//! and compatibility relations pairing types that agree under two
//! indexings. An instance with enough variables translates to a
//! finite-domain instance over variables indexed by increasing m-subsets
//! of the source variables; the translation is satisfiable exactly when
//! the source is. A refinement step tightens the translation using a
//! minimality-established source so the result is (2,3)-minimal whenever
//! the source is non-trivial.

use crate::graphs::GraphFamily;
use crate::instance::{
    family_from_value, family_to_value, DocumentError, Instance, ParseError, SchemaError,
};
use crate::minimality::{
    is_subset, subsets, subsets_of, verify_minimality, MinimalConstraint, MinimalInstance,
};
use crate::orbits::{enumerate_types, OrbitRelation, QfType, MAX_TYPE_ARITY};
use crate::solver::Status;
use serde_json::{Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeStructureError {
    /// m must be at least the largest relation arity.
    MTooSmall { relation: String, arity: usize, m: usize },
    /// m must stay within the type enumeration cap.
    MTooLarge(usize),
    TooFewVariables { variables: usize, m: usize },
    /// The source passed to refinement is not an established (2m,3m)
    /// state matching the translation.
    MinimalityMismatch(String),
    /// The finite search space is beyond the solver's cap.
    TooLarge(String),
}

impl fmt::Display for TypeStructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeStructureError::MTooSmall { relation, arity, m } => {
                write!(f, "relation {relation:?} has arity {arity}, needs m >= {arity}, got {m}")
            }
            TypeStructureError::MTooLarge(m) => {
                write!(f, "m = {m} exceeds the type enumeration cap {MAX_TYPE_ARITY}")
            }
            TypeStructureError::TooFewVariables { variables, m } => {
                write!(f, "{variables} variables cannot host m = {m} position lists")
            }
            TypeStructureError::MinimalityMismatch(msg) => write!(f, "{msg}"),
            TypeStructureError::TooLarge(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for TypeStructureError {}

/// The finite structure: m-types with membership and compatibility
/// relations over one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeStructure {
    family: GraphFamily,
    m: usize,
    elements: Vec<QfType>,
    element_index: BTreeMap<QfType, usize>,
    /// Keyed by source relation name and index map [r] -> [m].
    unary: BTreeMap<(String, Vec<usize>), BTreeSet<usize>>,
}

/// All maps [r] -> [m] as index vectors, in odometer order.
fn index_maps(r: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; r];
    loop {
        out.push(current.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < m {
                break;
            }
            current[i] = 0;
        }
    }
}

/// Builds the structure for a named relation set.
pub fn build_type_structure(
    relations: &BTreeMap<String, OrbitRelation>,
    family: &GraphFamily,
    m: usize,
) -> Result<TypeStructure, TypeStructureError> {
    if m == 0 || m > MAX_TYPE_ARITY {
        return Err(TypeStructureError::MTooLarge(m));
    }
    for (name, rel) in relations {
        if rel.arity() > m {
            return Err(TypeStructureError::MTooSmall {
                relation: name.clone(),
                arity: rel.arity(),
                m,
            });
        }
    }
    let elements = enumerate_types(family, m).expect("m is within the cap");
    let element_index: BTreeMap<QfType, usize> =
        elements.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let mut unary = BTreeMap::new();
    for (name, rel) in relations {
        for imap in index_maps(rel.arity(), m) {
            let members: BTreeSet<usize> = elements
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    let restricted = p.project(&imap).expect("map lands within arity m");
                    rel.contains(&restricted)
                })
                .map(|(i, _)| i)
                .collect();
            unary.insert((name.clone(), imap), members);
        }
    }
    Ok(TypeStructure { family: family.clone(), m, elements, element_index, unary })
}

impl TypeStructure {
    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn elements(&self) -> &[QfType] {
        &self.elements
    }

    pub fn element_index(&self, t: &QfType) -> Option<usize> {
        self.element_index.get(t).copied()
    }

    /// Members of the unary relation for a source relation under an index
    /// map.
    pub fn unary(&self, relation: &str, imap: &[usize]) -> Option<&BTreeSet<usize>> {
        self.unary.get(&(relation.to_string(), imap.to_vec()))
    }

    /// Pairs of types whose restrictions along `i` and `j` coincide.
    pub fn comp(&self, i: &[usize], j: &[usize]) -> BTreeSet<(usize, usize)> {
        assert_eq!(i.len(), j.len(), "compatibility needs equal-length indexings");
        let left: Vec<QfType> = self
            .elements
            .iter()
            .map(|p| p.project(i).expect("map lands within arity m"))
            .collect();
        let right: Vec<QfType> = self
            .elements
            .iter()
            .map(|q| q.project(j).expect("map lands within arity m"))
            .collect();
        let mut out = BTreeSet::new();
        for (pi, pt) in left.iter().enumerate() {
            for (qi, qt) in right.iter().enumerate() {
                if pt == qt {
                    out.insert((pi, qi));
                }
            }
        }
        out
    }
}

/// Relation over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRelation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteConstraint {
    pub scope: Vec<usize>,
    pub relation: String,
}

/// A finite-domain instance over the m-types, optionally carrying the
/// translation data (source variables and per-variable position lists)
/// needed for refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInstance {
    source_family: GraphFamily,
    m: usize,
    elements: Vec<QfType>,
    variables: Vec<String>,
    relations: BTreeMap<String, FiniteRelation>,
    constraints: Vec<FiniteConstraint>,
    source_variables: Vec<String>,
    /// Ascending source variable indices per translated variable; empty
    /// when the document carries no translation data.
    images: Vec<Vec<usize>>,
}

impl FiniteInstance {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn source_family(&self) -> &GraphFamily {
        &self.source_family
    }

    pub fn elements(&self) -> &[QfType] {
        &self.elements
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn relations(&self) -> &BTreeMap<String, FiniteRelation> {
        &self.relations
    }

    pub fn constraints(&self) -> &[FiniteConstraint] {
        &self.constraints
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn source_variables(&self) -> &[String] {
        &self.source_variables
    }

    pub fn is_trivial(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| self.relations[&c.relation].tuples.is_empty())
    }
}

/// The default compilation parameter: large enough for every relation,
/// at least 3, and at least the family's consistency level.
pub fn default_m(inst: &Instance) -> usize {
    let max_arity = inst.relations().values().map(|r| r.arity()).max().unwrap_or(2);
    (max_arity + 1).max(3).max(inst.family().l_value())
}

fn translated_name(source_names: &[String], image: &[usize]) -> String {
    let parts: Vec<&str> = image.iter().map(|&v| source_names[v].as_str()).collect();
    format!("z({})", parts.join(","))
}

/// Compiles an instance to the finite domain: one variable per increasing
/// m-subset of source variables, a membership constraint per source
/// constraint fitting inside a subset, and a compatibility constraint per
/// overlapping subset pair.
pub fn translate_instance(
    inst: &Instance,
    m: usize,
) -> Result<FiniteInstance, TypeStructureError> {
    let n = inst.variables().len();
    if n < m {
        return Err(TypeStructureError::TooFewVariables { variables: n, m });
    }
    let ts = build_type_structure(inst.relations(), inst.family(), m)?;
    let images = subsets(n, m);
    let variables: Vec<String> =
        images.iter().map(|im| translated_name(inst.variables(), im)).collect();

    let mut relations: BTreeMap<String, FiniteRelation> = BTreeMap::new();
    let mut constraints = Vec::new();

    for (v, image) in images.iter().enumerate() {
        for c in inst.constraints() {
            let mut scope_set = c.scope.clone();
            scope_set.sort_unstable();
            scope_set.dedup();
            if !is_subset(&scope_set, image) {
                continue;
            }
            // Position of each scope entry inside the image list.
            let imap: Vec<usize> = c
                .scope
                .iter()
                .map(|x| image.iter().position(|y| y == x).expect("scope is inside the image"))
                .collect();
            let members = ts.unary(&c.relation, &imap).expect("map was enumerated").clone();
            let name = format!(
                "mem:{}:{}",
                c.relation,
                imap.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
            );
            relations
                .entry(name.clone())
                .or_insert_with(|| FiniteRelation {
                    arity: 1,
                    tuples: members.iter().map(|&e| vec![e]).collect(),
                });
            constraints.push(FiniteConstraint { scope: vec![v], relation: name });
        }
    }

    for v in 0..images.len() {
        for s in (v + 1)..images.len() {
            let shared: Vec<usize> = images[v]
                .iter()
                .copied()
                .filter(|x| images[s].contains(x))
                .collect();
            if shared.is_empty() {
                continue;
            }
            let i: Vec<usize> = shared
                .iter()
                .map(|x| images[v].iter().position(|y| y == x).unwrap())
                .collect();
            let j: Vec<usize> = shared
                .iter()
                .map(|x| images[s].iter().position(|y| y == x).unwrap())
                .collect();
            let pairs = ts.comp(&i, &j);
            let name = format!(
                "comp:{}:{}",
                i.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
                j.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
            );
            relations.entry(name.clone()).or_insert_with(|| FiniteRelation {
                arity: 2,
                tuples: pairs.iter().map(|&(p, q)| vec![p, q]).collect(),
            });
            constraints.push(FiniteConstraint { scope: vec![v, s], relation: name });
        }
    }

    Ok(FiniteInstance {
        source_family: inst.family().clone(),
        m,
        elements: ts.elements().to_vec(),
        variables,
        relations,
        constraints,
        source_variables: inst.variables().to_vec(),
        images,
    })
}

/// Element index of each orbit's restriction to one translated image,
/// in the relation's iteration order.
fn projection_vector(
    c: &MinimalConstraint,
    image: &[usize],
    index: &BTreeMap<QfType, usize>,
) -> Vec<usize> {
    let positions: Vec<usize> = image
        .iter()
        .map(|x| c.scope.iter().position(|y| y == x).expect("image is inside the scope"))
        .collect();
    c.relation
        .iter()
        .map(|t| {
            let projected = t.project(&positions).expect("positions are in range");
            *index.get(&projected).expect("projections of realizable types are realizable")
        })
        .collect()
}

/// Tightens a translation against an established (2m,3m)-minimal source:
/// one membership constraint per translated variable (the common
/// projection-type set of all covering source constraints, intersected
/// with the original membership constraints), one binary constraint per
/// variable pair (likewise, intersected with compatibility), and one
/// ternary constraint per variable triple and covering source constraint.
/// The result is (2,3)-minimal whenever the source is non-trivial.
pub fn refine_translation(
    source: &MinimalInstance,
    translated: &FiniteInstance,
) -> Result<FiniteInstance, TypeStructureError> {
    let m = translated.m;
    if translated.images.is_empty() || translated.images.len() != translated.variables.len() {
        return Err(TypeStructureError::MinimalityMismatch(
            "translation data is missing from the finite instance".into(),
        ));
    }
    if source.variables() != translated.source_variables.as_slice() {
        return Err(TypeStructureError::MinimalityMismatch(
            "source variables do not match the translation".into(),
        ));
    }
    if source.k() != 2 * m || source.l() != 3 * m {
        return Err(TypeStructureError::MinimalityMismatch(format!(
            "source is at ({},{}) but refinement of an m = {m} translation needs ({},{})",
            source.k(),
            source.l(),
            2 * m,
            3 * m
        )));
    }
    if let Some(v) = verify_minimality(source) {
        return Err(TypeStructureError::MinimalityMismatch(format!(
            "source is not ({},{})-minimal: {v}",
            source.k(),
            source.l()
        )));
    }
    let index: BTreeMap<QfType, usize> = translated
        .elements
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let scope_sets: Vec<_> = source.constraints().iter().map(|c| c.scope_set()).collect();
    let mut proj: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ci, c) in source.constraints().iter().enumerate() {
        for (v, image) in translated.images.iter().enumerate() {
            if is_subset(image, &scope_sets[ci]) {
                proj.insert((ci, v), projection_vector(c, image, &index));
            }
        }
    }
    let covering = |union: &[usize]| -> Vec<usize> {
        (0..scope_sets.len()).filter(|&ci| is_subset(union, &scope_sets[ci])).collect()
    };
    let types_for = |ci: usize, vars: &[usize]| -> BTreeSet<Vec<usize>> {
        let columns: Vec<&Vec<usize>> = vars.iter().map(|v| &proj[&(ci, *v)]).collect();
        let rows = columns.first().map_or(0, |col| col.len());
        (0..rows).map(|r| columns.iter().map(|col| col[r]).collect()).collect()
    };
    let intersect_types = |vars: &[usize], union: &[usize]| -> Option<BTreeSet<Vec<usize>>> {
        let mut acc: Option<BTreeSet<Vec<usize>>> = None;
        for ci in covering(union) {
            let types = types_for(ci, vars);
            acc = Some(match acc {
                None => types,
                Some(prev) => prev.intersection(&types).cloned().collect(),
            });
        }
        acc
    };
    let union_of = |parts: &[&Vec<usize>]| -> Vec<usize> {
        let mut u: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        u.sort_unstable();
        u.dedup();
        u
    };

    // Original constraints grouped by scope for the intersection steps.
    let mut original_unary: BTreeMap<usize, Vec<&FiniteConstraint>> = BTreeMap::new();
    let mut original_binary: BTreeMap<(usize, usize), Vec<&FiniteConstraint>> = BTreeMap::new();
    for c in &translated.constraints {
        match c.scope.as_slice() {
            [v] => original_unary.entry(*v).or_default().push(c),
            [v, s] => original_binary.entry((*v, *s)).or_default().push(c),
            _ => {
                return Err(TypeStructureError::MinimalityMismatch(
                    "translations carry only membership and compatibility constraints".into(),
                ))
            }
        }
    }

    let mut relations: BTreeMap<String, FiniteRelation> = BTreeMap::new();
    let mut constraints = Vec::new();
    let nv = translated.variables.len();

    for v in 0..nv {
        let image = &translated.images[v];
        let mut set = intersect_types(&[v], image).ok_or_else(|| {
            TypeStructureError::MinimalityMismatch(format!(
                "no source constraint covers {}; the source lacks universal constraints",
                translated.variables[v]
            ))
        })?;
        for c in original_unary.get(&v).into_iter().flatten() {
            let rel = &translated.relations[&c.relation];
            set.retain(|t| rel.tuples.contains(t));
        }
        let name = format!("u:{v}");
        relations.insert(name.clone(), FiniteRelation { arity: 1, tuples: set });
        constraints.push(FiniteConstraint { scope: vec![v], relation: name });
    }

    for v in 0..nv {
        for s in (v + 1)..nv {
            let (iv, is) = (&translated.images[v], &translated.images[s]);
            let union = union_of(&[iv, is]);
            let mut set = intersect_types(&[v, s], &union).ok_or_else(|| {
                TypeStructureError::MinimalityMismatch(format!(
                    "no source constraint covers the pair ({}, {})",
                    translated.variables[v], translated.variables[s]
                ))
            })?;
            for c in original_binary.get(&(v, s)).into_iter().flatten() {
                let rel = &translated.relations[&c.relation];
                set.retain(|t| rel.tuples.contains(t));
            }
            let name = format!("b:{v}:{s}");
            relations.insert(name.clone(), FiniteRelation { arity: 2, tuples: set });
            constraints.push(FiniteConstraint { scope: vec![v, s], relation: name });
        }
    }

    for v in 0..nv {
        for s in (v + 1)..nv {
            for w in (s + 1)..nv {
                let (iv, is, iw) =
                    (&translated.images[v], &translated.images[s], &translated.images[w]);
                let union = union_of(&[iv, is, iw]);
                let covers = covering(&union);
                if covers.is_empty() {
                    return Err(TypeStructureError::MinimalityMismatch(format!(
                        "no source constraint covers the triple ({}, {}, {})",
                        translated.variables[v], translated.variables[s], translated.variables[w]
                    )));
                }
                for (pos, ci) in covers.iter().enumerate() {
                    let set = types_for(*ci, &[v, s, w]);
                    let name = format!("t:{v}:{s}:{w}:{pos}");
                    relations.insert(name.clone(), FiniteRelation { arity: 3, tuples: set });
                    constraints.push(FiniteConstraint { scope: vec![v, s, w], relation: name });
                }
            }
        }
    }

    Ok(FiniteInstance {
        source_family: translated.source_family.clone(),
        m,
        elements: translated.elements.clone(),
        variables: translated.variables.clone(),
        relations,
        constraints,
        source_variables: translated.source_variables.clone(),
        images: translated.images.clone(),
    })
}

/// First minimality violation of a finite-domain instance, mirroring the
/// orbit-world checker on explicit tuple sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteViolation {
    Uncovered { subset: Vec<usize> },
    Disagreement { first: usize, second: usize, subset: Vec<usize> },
}

fn finite_projection(
    rel: &FiniteRelation,
    scope: &[usize],
    w: &[usize],
) -> BTreeSet<Vec<usize>> {
    let positions: Vec<usize> = w
        .iter()
        .map(|x| scope.iter().position(|y| y == x).expect("w is inside the scope"))
        .collect();
    rel.tuples
        .iter()
        .map(|t| positions.iter().map(|&p| t[p]).collect())
        .collect()
}

pub fn finite_verify_minimality(
    fi: &FiniteInstance,
    k: usize,
    l: usize,
) -> Option<FiniteViolation> {
    let n = fi.variables.len();
    let e = l.min(n);
    let scope_sets: Vec<Vec<usize>> = fi
        .constraints
        .iter()
        .map(|c| {
            let mut s = c.scope.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    if e > 0 {
        let wide: Vec<&Vec<usize>> = scope_sets.iter().filter(|s| s.len() >= e).collect();
        for subset in subsets(n, e) {
            if !wide.iter().any(|s| is_subset(&subset, s)) {
                return Some(FiniteViolation::Uncovered { subset });
            }
        }
    }
    // Projections are interned once per constraint and subset so the pair
    // scan below compares small ids instead of tuple sets.
    let mut interner: BTreeMap<BTreeSet<Vec<usize>>, usize> = BTreeMap::new();
    let mut ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    for (i, c) in fi.constraints.iter().enumerate() {
        for size in 1..=k.min(scope_sets[i].len()) {
            for w in subsets_of(&scope_sets[i], size) {
                let p = finite_projection(&fi.relations[&c.relation], &c.scope, &w);
                let next = interner.len();
                let id = *interner.entry(p).or_insert(next);
                ids.insert((i, w), id);
            }
        }
    }
    for i in 0..fi.constraints.len() {
        for j in (i + 1)..fi.constraints.len() {
            let shared: Vec<usize> = scope_sets[i]
                .iter()
                .copied()
                .filter(|v| scope_sets[j].contains(v))
                .collect();
            for size in 1..=k.min(shared.len()) {
                for w in subsets_of(&shared, size) {
                    if ids[&(i, w.clone())] != ids[&(j, w.clone())] {
                        return Some(FiniteViolation::Disagreement { first: i, second: j, subset: w });
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteVerdict {
    pub status: Status,
    /// Element index per variable, for the lexicographically least
    /// solution.
    pub assignment: Option<Vec<usize>>,
}

const FINITE_VARIABLE_CAP: usize = 1000;

/// Exact finite-domain decision: support-based domain filtering to a
/// fixpoint, then backtracking in variable order with ascending values.
pub fn finite_solve(fi: &FiniteInstance) -> Result<FiniteVerdict, TypeStructureError> {
    if fi.variables.len() > FINITE_VARIABLE_CAP {
        return Err(TypeStructureError::TooLarge(format!(
            "{} variables exceed the finite solver cap {FINITE_VARIABLE_CAP}",
            fi.variables.len()
        )));
    }
    let n = fi.variables.len();
    let ne = fi.elements.len();
    let mut domains: Vec<BTreeSet<usize>> = vec![(0..ne).collect(); n];

    // Filter each variable's domain to values with a supporting tuple
    // whose other entries are still in their variables' domains.
    loop {
        let mut changed = false;
        for c in &fi.constraints {
            let rel = &fi.relations[&c.relation];
            for (p, &v) in c.scope.iter().enumerate() {
                let supported: BTreeSet<usize> = rel
                    .tuples
                    .iter()
                    .filter(|t| {
                        t.iter().enumerate().all(|(q, &val)| domains[c.scope[q]].contains(&val))
                    })
                    .map(|t| t[p])
                    .collect();
                let narrowed: BTreeSet<usize> =
                    domains[v].intersection(&supported).copied().collect();
                if narrowed.len() != domains[v].len() {
                    domains[v] = narrowed;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(FiniteVerdict { status: Status::Unsat, assignment: None });
    }

    fn consistent(fi: &FiniteInstance, partial: &[usize]) -> bool {
        fi.constraints.iter().all(|c| {
            if c.scope.iter().any(|&v| v >= partial.len()) {
                return true;
            }
            let tuple: Vec<usize> = c.scope.iter().map(|&v| partial[v]).collect();
            fi.relations[&c.relation].tuples.contains(&tuple)
        })
    }

    fn extend(fi: &FiniteInstance, domains: &[BTreeSet<usize>], partial: &mut Vec<usize>) -> bool {
        if partial.len() == domains.len() {
            return true;
        }
        for &value in &domains[partial.len()] {
            partial.push(value);
            if consistent(fi, partial) && extend(fi, domains, partial) {
                return true;
            }
            partial.pop();
        }
        false
    }

    let mut assignment = Vec::with_capacity(n);
    if extend(fi, &domains, &mut assignment) {
        Ok(FiniteVerdict { status: Status::Sat, assignment: Some(assignment) })
    } else {
        Ok(FiniteVerdict { status: Status::Unsat, assignment: None })
    }
}

impl FiniteInstance {
    /// Canonical document text in the shared format, with the finite
    /// domain spelled out: source family, m, and the element order.
    pub fn serialize(&self) -> String {
        let mut root = Map::new();
        let mut domain = Map::new();
        domain.insert("family".into(), Value::String("finite-types".into()));
        domain.insert("m".into(), Value::from(self.m as u64));
        domain.insert("of".into(), family_to_value(&self.source_family));
        domain.insert(
            "elements".into(),
            Value::Array(self.elements.iter().map(|t| Value::String(t.encode())).collect()),
        );
        root.insert("domain".into(), Value::Object(domain));
        let mut rels = Map::new();
        for (name, rel) in &self.relations {
            let mut entry = Map::new();
            entry.insert("arity".into(), Value::from(rel.arity as u64));
            entry.insert(
                "tuples".into(),
                Value::Array(
                    rel.tuples
                        .iter()
                        .map(|t| {
                            Value::Array(t.iter().map(|&e| Value::from(e as u64)).collect())
                        })
                        .collect(),
                ),
            );
            rels.insert(name.clone(), Value::Object(entry));
        }
        root.insert("relations".into(), Value::Object(rels));
        root.insert(
            "variables".into(),
            Value::Array(self.variables.iter().map(|v| Value::String(v.clone())).collect()),
        );
        root.insert(
            "constraints".into(),
            Value::Array(
                self.constraints
                    .iter()
                    .map(|c| {
                        let mut entry = Map::new();
                        entry.insert(
                            "scope".into(),
                            Value::Array(
                                c.scope
                                    .iter()
                                    .map(|&v| Value::String(self.variables[v].clone()))
                                    .collect(),
                            ),
                        );
                        entry.insert("relation".into(), Value::String(c.relation.clone()));
                        Value::Object(entry)
                    })
                    .collect(),
            ),
        );
        if !self.images.is_empty() {
            let mut tr = Map::new();
            tr.insert(
                "source_variables".into(),
                Value::Array(
                    self.source_variables.iter().map(|v| Value::String(v.clone())).collect(),
                ),
            );
            tr.insert(
                "images".into(),
                Value::Array(
                    self.images
                        .iter()
                        .map(|im| {
                            Value::Array(im.iter().map(|&v| Value::from(v as u64)).collect())
                        })
                        .collect(),
                ),
            );
            root.insert("translation".into(), Value::Object(tr));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("maps with string keys always serialize");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Result<FiniteInstance, DocumentError> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            DocumentError::Parse(ParseError {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })
        })?;
        Ok(finite_from_value(&value)?)
    }
}

fn schema(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError { path: path.to_string(), message: message.into() }
}

fn finite_from_value(value: &Value) -> Result<FiniteInstance, SchemaError> {
    let root = value.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    for key in root.keys() {
        if !["domain", "relations", "variables", "constraints", "translation"]
            .contains(&key.as_str())
        {
            return Err(schema("$", format!("unknown key {key:?}")));
        }
    }
    let domain = root
        .get("domain")
        .and_then(Value::as_object)
        .ok_or_else(|| schema("domain", "expected an object"))?;
    match domain.get("family").and_then(Value::as_str) {
        Some("finite-types") => {}
        _ => return Err(schema("domain.family", "expected \"finite-types\"")),
    }
    let m = domain
        .get("m")
        .and_then(Value::as_u64)
        .ok_or_else(|| schema("domain.m", "expected an integer"))? as usize;
    if m == 0 || m > MAX_TYPE_ARITY {
        return Err(schema("domain.m", format!("m must lie in 1..={MAX_TYPE_ARITY}")));
    }
    let of = domain.get("of").ok_or_else(|| schema("domain", "missing key \"of\""))?;
    let source_family = family_from_value(of, "domain.of")?;
    let element_values = domain
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("domain.elements", "expected an array"))?;
    let mut elements = Vec::with_capacity(element_values.len());
    for (i, e) in element_values.iter().enumerate() {
        let path = format!("domain.elements[{i}]");
        let text = e.as_str().ok_or_else(|| schema(&path, "expected a string"))?;
        let t = QfType::parse(text, &source_family)
            .map_err(|err| schema(&path, format!("orbit {text:?}: {err}")))?;
        if t.arity() != m {
            return Err(schema(&path, format!("element arity {} is not m = {m}", t.arity())));
        }
        if elements.contains(&t) {
            return Err(schema(&path, format!("duplicate element {text:?}")));
        }
        elements.push(t);
    }

    let variable_values = root
        .get("variables")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("variables", "expected an array"))?;
    let mut variables = Vec::with_capacity(variable_values.len());
    for (i, v) in variable_values.iter().enumerate() {
        let path = format!("variables[{i}]");
        let name = v.as_str().ok_or_else(|| schema(&path, "expected a string"))?;
        if variables.iter().any(|x: &String| x == name) {
            return Err(schema(&path, format!("duplicate variable {name:?}")));
        }
        variables.push(name.to_string());
    }

    let mut relations = BTreeMap::new();
    if let Some(rels) = root.get("relations") {
        let rels = rels.as_object().ok_or_else(|| schema("relations", "expected an object"))?;
        for (name, spec) in rels {
            let path = format!("relations.{name}");
            let spec = spec.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
            let arity = spec
                .get("arity")
                .and_then(Value::as_u64)
                .ok_or_else(|| schema(&format!("{path}.arity"), "expected an integer"))?
                as usize;
            if arity == 0 {
                return Err(schema(&format!("{path}.arity"), "arity must be positive"));
            }
            let tuple_values = spec
                .get("tuples")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(&format!("{path}.tuples"), "expected an array"))?;
            let mut tuples = BTreeSet::new();
            for (i, tv) in tuple_values.iter().enumerate() {
                let tpath = format!("{path}.tuples[{i}]");
                let entries = tv.as_array().ok_or_else(|| schema(&tpath, "expected an array"))?;
                if entries.len() != arity {
                    return Err(schema(&tpath, format!("expected {arity} entries")));
                }
                let mut tuple = Vec::with_capacity(arity);
                for e in entries {
                    let idx = e
                        .as_u64()
                        .ok_or_else(|| schema(&tpath, "expected element indices"))?
                        as usize;
                    if idx >= elements.len() {
                        return Err(schema(&tpath, format!("element index {idx} out of range")));
                    }
                    tuple.push(idx);
                }
                tuples.insert(tuple);
            }
            relations.insert(name.clone(), FiniteRelation { arity, tuples });
        }
    }

    let mut constraints = Vec::new();
    if let Some(cs) = root.get("constraints") {
        let cs = cs.as_array().ok_or_else(|| schema("constraints", "expected an array"))?;
        for (i, c) in cs.iter().enumerate() {
            let path = format!("constraints[{i}]");
            let c = c.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
            let relation = c
                .get("relation")
                .and_then(Value::as_str)
                .ok_or_else(|| schema(&format!("{path}.relation"), "expected a string"))?;
            let rel = relations
                .get(relation)
                .ok_or_else(|| schema(&path, format!("unknown relation {relation:?}")))?;
            let scope_values = c
                .get("scope")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(&format!("{path}.scope"), "expected an array"))?;
            if scope_values.len() != rel.arity {
                return Err(schema(
                    &path,
                    format!("scope has {} variables, relation arity is {}", scope_values.len(), rel.arity),
                ));
            }
            let mut scope = Vec::with_capacity(scope_values.len());
            for (j, sv) in scope_values.iter().enumerate() {
                let vpath = format!("{path}.scope[{j}]");
                let name = sv.as_str().ok_or_else(|| schema(&vpath, "expected a string"))?;
                let idx = variables
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| schema(&vpath, format!("unknown variable {name:?}")))?;
                scope.push(idx);
            }
            constraints.push(FiniteConstraint { scope, relation: relation.to_string() });
        }
    }

    let mut source_variables = Vec::new();
    let mut images = Vec::new();
    if let Some(tr) = root.get("translation") {
        let tr = tr.as_object().ok_or_else(|| schema("translation", "expected an object"))?;
        let sv = tr
            .get("source_variables")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("translation.source_variables", "expected an array"))?;
        for (i, v) in sv.iter().enumerate() {
            let name = v.as_str().ok_or_else(|| {
                schema(&format!("translation.source_variables[{i}]"), "expected a string")
            })?;
            source_variables.push(name.to_string());
        }
        let ims = tr
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("translation.images", "expected an array"))?;
        if ims.len() != variables.len() {
            return Err(schema(
                "translation.images",
                "expected one image per translated variable",
            ));
        }
        for (i, im) in ims.iter().enumerate() {
            let path = format!("translation.images[{i}]");
            let entries = im.as_array().ok_or_else(|| schema(&path, "expected an array"))?;
            let mut image = Vec::with_capacity(entries.len());
            for e in entries {
                let idx = e
                    .as_u64()
                    .ok_or_else(|| schema(&path, "expected source variable indices"))?
                    as usize;
                if idx >= source_variables.len() {
                    return Err(schema(&path, format!("source index {idx} out of range")));
                }
                image.push(idx);
            }
            if image.len() != m || image.windows(2).any(|w| w[0] >= w[1]) {
                return Err(schema(&path, format!("images must be strictly increasing m = {m} lists")));
            }
            images.push(image);
        }
    }

    Ok(FiniteInstance {
        source_family,
        m,
        elements,
        variables,
        relations,
        constraints,
        source_variables,
        images,
    })
}
