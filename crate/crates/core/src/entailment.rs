//! Entailment shapes of quaternary relations.
//!
//! A relation efficiently entails an implication between its first and
//! second coordinate pairs when the implication holds across all orbits
//! and both a forward and a backward witness orbit exist. Together with
//! universally quantified side conditions this classifies the relation
//! shapes whose presence obstructs solvability by local consistency.

use crate::orbits::{OrbitLabel, OrbitRelation, QfType, TypeError};
use std::fmt;

/// Subset of the three pair labels, used as a letter in implications and
/// side conditions.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitalSet(u8);

impl OrbitalSet {
    pub const EMPTY: OrbitalSet = OrbitalSet(0);
    pub const EQ: OrbitalSet = OrbitalSet(1);
    pub const E: OrbitalSet = OrbitalSet(2);
    pub const N: OrbitalSet = OrbitalSet(4);
    /// Edge or equality.
    pub const UUE: OrbitalSet = OrbitalSet(3);
    /// Non-edge or equality.
    pub const UUN: OrbitalSet = OrbitalSet(5);
    /// Distinctness.
    pub const NEQ: OrbitalSet = OrbitalSet(6);
    pub const ALL: OrbitalSet = OrbitalSet(7);

    fn bit(label: OrbitLabel) -> u8 {
        match label {
            OrbitLabel::Eq => 1,
            OrbitLabel::E => 2,
            OrbitLabel::N => 4,
        }
    }

    pub fn from_label(label: OrbitLabel) -> OrbitalSet {
        OrbitalSet(Self::bit(label))
    }

    pub fn contains(self, label: OrbitLabel) -> bool {
        self.0 & Self::bit(label) != 0
    }

    pub fn insert(&mut self, label: OrbitLabel) {
        self.0 |= Self::bit(label);
    }

    pub fn union(self, other: OrbitalSet) -> OrbitalSet {
        OrbitalSet(self.0 | other.0)
    }

    pub fn intersect(self, other: OrbitalSet) -> OrbitalSet {
        OrbitalSet(self.0 & other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The sole member, when there is exactly one.
    pub fn singleton(self) -> Option<OrbitLabel> {
        match self {
            Self::EQ => Some(OrbitLabel::Eq),
            Self::E => Some(OrbitLabel::E),
            Self::N => Some(OrbitLabel::N),
            _ => None,
        }
    }

    pub fn labels(self) -> Vec<OrbitLabel> {
        OrbitLabel::ALL
            .iter()
            .copied()
            .filter(|&l| self.contains(l))
            .collect()
    }

    /// Parses the builtin letter names: `E`, `N`, `=`, `NEQ`, `uuE`, `uuN`.
    pub fn parse(name: &str) -> Result<OrbitalSet, EntailError> {
        match name {
            "E" => Ok(Self::E),
            "N" => Ok(Self::N),
            "=" => Ok(Self::EQ),
            "NEQ" => Ok(Self::NEQ),
            "uuE" => Ok(Self::UUE),
            "uuN" => Ok(Self::UUN),
            other => Err(EntailError::UnknownSet(other.to_string())),
        }
    }
}

impl fmt::Display for OrbitalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::EQ => write!(f, "="),
            Self::E => write!(f, "E"),
            Self::N => write!(f, "N"),
            Self::UUE => write!(f, "uuE"),
            Self::UUN => write!(f, "uuN"),
            Self::NEQ => write!(f, "NEQ"),
            other => {
                let tokens: Vec<&str> = other.labels().iter().map(|l| l.token()).collect();
                write!(f, "{{{}}}", tokens.join(","))
            }
        }
    }
}

impl fmt::Debug for OrbitalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrbitalSet({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntailError {
    UnknownSet(String),
    ArityMismatch { expected: usize, got: usize },
    BadPosition(usize),
}

impl fmt::Display for EntailError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntailError::UnknownSet(s) => write!(f, "unknown orbital set {s:?}"),
            EntailError::ArityMismatch { expected, got } => {
                write!(f, "entailment queries need arity {expected}, got {got}")
            }
            EntailError::BadPosition(p) => write!(f, "position {p} out of range"),
        }
    }
}

impl std::error::Error for EntailError {}

/// Universally quantified restriction on one coordinate pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideCondition {
    /// Zero-based coordinate pair.
    pub positions: (usize, usize),
    pub set: OrbitalSet,
}

/// Implication from the label of coordinates (1,2) to the label of
/// coordinates (3,4), together with side conditions every orbit must meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentQuery {
    pub s1: OrbitalSet,
    pub s2: OrbitalSet,
    pub side: Vec<SideCondition>,
}

impl EntailmentQuery {
    pub fn implication(s1: OrbitalSet, s2: OrbitalSet) -> Self {
        EntailmentQuery { s1, s2, side: Vec::new() }
    }

    pub fn with_side(mut self, positions: (usize, usize), set: OrbitalSet) -> Self {
        self.side.push(SideCondition { positions, set });
        self
    }
}

fn atom(set: OrbitalSet, i: usize, j: usize) -> String {
    if set == OrbitalSet::EQ {
        format!("x{}=x{}", i + 1, j + 1)
    } else {
        format!("{}(x{},x{})", set, i + 1, j + 1)
    }
}

impl fmt::Display for EntailmentQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({} -> {})", atom(self.s1, 0, 1), atom(self.s2, 2, 3))?;
        if !self.side.is_empty() {
            let conds: Vec<String> = self
                .side
                .iter()
                .map(|c| atom(c.set, c.positions.0, c.positions.1))
                .collect();
            write!(f, ", ({})", conds.join(" & "))?;
        }
        write!(f, "]")
    }
}

/// Full outcome of testing one relation against one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    /// The implication holds for every orbit.
    pub entails: bool,
    /// Every orbit satisfies every side condition.
    pub side_conditions_hold: bool,
    /// Orbit whose (1,2) label is in `s1` and (3,4) label in `s2`.
    pub witness_forward: Option<QfType>,
    /// Orbit whose (1,2) label avoids `s1` and (3,4) label avoids `s2`.
    pub witness_backward: Option<QfType>,
    /// Entails with both witnesses present.
    pub efficient: bool,
}

impl ClassReport {
    /// The relation is of the queried shape: the implication is
    /// efficiently entailed and the side conditions hold.
    pub fn instantiates(&self) -> bool {
        self.efficient && self.side_conditions_hold
    }
}

fn check_query(rel: &OrbitRelation, query: &EntailmentQuery) -> Result<ClassReport, EntailError> {
    if rel.arity() != 4 {
        return Err(EntailError::ArityMismatch { expected: 4, got: rel.arity() });
    }
    for c in &query.side {
        for p in [c.positions.0, c.positions.1] {
            if p >= 4 {
                return Err(EntailError::BadPosition(p));
            }
        }
    }
    let mut report = ClassReport {
        entails: true,
        side_conditions_hold: true,
        witness_forward: None,
        witness_backward: None,
        efficient: false,
    };
    for t in rel.iter() {
        let premise = query.s1.contains(t.label(0, 1));
        let conclusion = query.s2.contains(t.label(2, 3));
        if premise && !conclusion {
            report.entails = false;
        }
        if premise && conclusion && report.witness_forward.is_none() {
            report.witness_forward = Some(t.clone());
        }
        if !premise && !conclusion && report.witness_backward.is_none() {
            report.witness_backward = Some(t.clone());
        }
        for c in &query.side {
            if !c.set.contains(t.label(c.positions.0, c.positions.1)) {
                report.side_conditions_hold = false;
            }
        }
    }
    report.efficient =
        report.entails && report.witness_forward.is_some() && report.witness_backward.is_some();
    Ok(report)
}

/// True when every orbit satisfies the implication and all side conditions.
pub fn entails(rel: &OrbitRelation, query: &EntailmentQuery) -> Result<bool, EntailError> {
    let report = check_query(rel, query)?;
    Ok(report.entails && report.side_conditions_hold)
}

/// Detailed report with entailment, witnesses, and side condition status.
pub fn efficiently_entails(
    rel: &OrbitRelation,
    query: &EntailmentQuery,
) -> Result<ClassReport, EntailError> {
    check_query(rel, query)
}

/// A named query in a catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub name: String,
    pub query: EntailmentQuery,
}

impl Shape {
    pub fn new(query: EntailmentQuery) -> Self {
        Shape { name: query.to_string(), query }
    }
}

/// The obstruction shapes whose absence the solvability lemmas require,
/// instantiated in both letter orientations.
pub fn default_catalog() -> Vec<Shape> {
    use OrbitalSet as S;
    let mut shapes = vec![
        EntailmentQuery::implication(S::E, S::UUN),
        EntailmentQuery::implication(S::N, S::UUE),
        EntailmentQuery::implication(S::E, S::EQ),
        EntailmentQuery::implication(S::N, S::EQ),
        EntailmentQuery::implication(S::N, S::EQ)
            .with_side((0, 1), S::UUN)
            .with_side((2, 3), S::UUN),
        EntailmentQuery::implication(S::E, S::EQ)
            .with_side((0, 1), S::UUE)
            .with_side((2, 3), S::UUE),
        EntailmentQuery::implication(S::N, S::E).with_side((2, 3), S::UUE),
        EntailmentQuery::implication(S::E, S::EQ)
            .with_side((0, 1), S::UUE)
            .with_side((1, 2), S::N)
            .with_side((2, 3), S::UUE),
        EntailmentQuery::implication(S::EQ, S::E)
            .with_side((0, 1), S::UUE)
            .with_side((1, 2), S::N)
            .with_side((2, 3), S::UUE),
    ];
    shapes.drain(..).map(Shape::new).collect()
}

/// Tests the relation against every catalog shape.
pub fn classify(
    rel: &OrbitRelation,
    catalog: &[Shape],
) -> Result<Vec<(Shape, ClassReport)>, EntailError> {
    catalog
        .iter()
        .map(|s| Ok((s.clone(), check_query(rel, &s.query)?)))
        .collect()
}

/// Relation with coordinates rearranged by a bijection: position `i` of
/// the result reads position `perm[i]` of the input.
pub fn permute_relation(
    rel: &OrbitRelation,
    perm: &[usize],
) -> Result<OrbitRelation, TypeError> {
    if perm.len() != rel.arity() {
        return Err(TypeError::ArityMismatch { expected: rel.arity(), got: perm.len() });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(TypeError::PositionOutOfRange { position: p, arity: rel.arity() });
        }
        seen[p] = true;
    }
    rel.project(perm)
}
