//! Decision procedures: brute-force oracle, width-based verdicts, and
//! complete search.
//!
//! Satisfiability over these domains reduces to the existence of a
//! realizable global type whose projections land in every constraint
//! relation. The oracle enumerates candidate types outright. Width mode
//! trusts local consistency: after establishing (k,l)-minimality,
//! non-triviality is read as satisfiable, which is correct exactly for
//! languages of relational width (k,l) and is flagged as assumed
//! otherwise. Search mode branches on pair projections and is complete
//! regardless of width.

use crate::graphs::{realizable, FiniteGraph, GraphFamily};
use crate::instance::Instance;
use crate::minimality::{
    establish_minimality, CheckOutcome, MinimalInstance, MinimalityError,
};
use crate::orbits::{enumerate_types, OrbitLabel, QfType, TypeError, MAX_TYPE_ARITY};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

pub const ORACLE_VARIABLE_CAP: usize = MAX_TYPE_ARITY;

/// Branching order over pair labels; tests may mirror a language's
/// dominant orbital by overriding it.
pub const DEFAULT_PRIORITY: [OrbitLabel; 3] = [OrbitLabel::E, OrbitLabel::N, OrbitLabel::Eq];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Sat => write!(f, "sat"),
            Status::Unsat => write!(f, "unsat"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Width { k: usize, l: usize },
    Search,
    Oracle,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Width { k, l } => write!(f, "width({k},{l})"),
            Mode::Search => write!(f, "search"),
            Mode::Oracle => write!(f, "oracle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Global type over all variables; present for Sat in oracle and
    /// search modes whenever the variable count fits the type arity cap.
    pub certificate: Option<QfType>,
    pub mode: Mode,
    /// Set on width-mode Sat verdicts: correctness rests on the language
    /// actually having relational width (k,l).
    pub assumed_width: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    TooManyVariables(usize),
    Minimality(MinimalityError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::TooManyVariables(n) => {
                write!(f, "{n} variables exceed the enumeration cap {ORACLE_VARIABLE_CAP}")
            }
            SolverError::Minimality(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<MinimalityError> for SolverError {
    fn from(e: MinimalityError) -> Self {
        SolverError::Minimality(e)
    }
}

thread_local! {
    static TYPE_CACHE: RefCell<BTreeMap<(String, usize), Rc<Vec<QfType>>>> =
        RefCell::new(BTreeMap::new());
}

/// Realizable types of the given arity, memoized per family.
pub(crate) fn realizable_types(family: &GraphFamily, arity: usize) -> Rc<Vec<QfType>> {
    let key = (family.to_string(), arity);
    TYPE_CACHE.with(|cache| {
        if let Some(types) = cache.borrow().get(&key) {
            return types.clone();
        }
        let types =
            Rc::new(enumerate_types(family, arity).expect("arity was checked against the cap"));
        cache.borrow_mut().insert(key, types.clone());
        types
    })
}

/// Exhaustive decision: walks every realizable global type in canonical
/// order and returns the first that satisfies all constraints.
pub fn oracle(inst: &Instance) -> Result<Verdict, SolverError> {
    let n = inst.variables().len();
    if n > ORACLE_VARIABLE_CAP {
        return Err(SolverError::TooManyVariables(n));
    }
    if n == 0 {
        return Ok(Verdict {
            status: Status::Sat,
            certificate: None,
            mode: Mode::Oracle,
            assumed_width: false,
        });
    }
    let types = realizable_types(inst.family(), n);
    'candidates: for t in types.iter() {
        for c in inst.constraints() {
            let proj = t.project(&c.scope).expect("scopes are within the variable count");
            if !inst.constraint_relation(c).contains(&proj) {
                continue 'candidates;
            }
        }
        return Ok(Verdict {
            status: Status::Sat,
            certificate: Some(t.clone()),
            mode: Mode::Oracle,
            assumed_width: false,
        });
    }
    Ok(Verdict { status: Status::Unsat, certificate: None, mode: Mode::Oracle, assumed_width: false })
}

/// The parameters the width theorem uses for this family: k = 2 and
/// l = max(3, largest bound order).
pub fn default_width_parameters(family: &GraphFamily) -> (usize, usize) {
    (2, family.l_value())
}

/// Establishes (k,l)-minimality and reads triviality as Unsat. The Unsat
/// direction is always sound; Sat is an assumption recorded on the
/// verdict.
pub fn decide_width(inst: &Instance, k: usize, l: usize) -> Result<Verdict, SolverError> {
    let m = establish_minimality(inst, k, l)?;
    if m.is_trivial() {
        Ok(Verdict {
            status: Status::Unsat,
            certificate: None,
            mode: Mode::Width { k, l },
            assumed_width: false,
        })
    } else {
        Ok(Verdict {
            status: Status::Sat,
            certificate: None,
            mode: Mode::Width { k, l },
            assumed_width: true,
        })
    }
}

/// Complete search: establish (2, l)-minimality, then branch on the first
/// multi-valued pair projection in priority order, re-propagating under
/// each pin. Verdicts match the oracle on every instance within caps.
pub fn solve_search(inst: &Instance) -> Result<Verdict, SolverError> {
    solve_search_with_priority(inst, &DEFAULT_PRIORITY)
}

pub fn solve_search_with_priority(
    inst: &Instance,
    priority: &[OrbitLabel],
) -> Result<Verdict, SolverError> {
    let (k, l) = default_width_parameters(inst.family());
    let m = establish_minimality(inst, k, l)?;
    Ok(match search(&m, priority) {
        Some(certificate) => Verdict {
            status: Status::Sat,
            certificate,
            mode: Mode::Search,
            assumed_width: false,
        },
        None => Verdict {
            status: Status::Unsat,
            certificate: None,
            mode: Mode::Search,
            assumed_width: false,
        },
    })
}

/// Some(certificate) iff satisfiable. The input must be propagated.
fn search(m: &MinimalInstance, priority: &[OrbitLabel]) -> Option<Option<QfType>> {
    if m.is_trivial() {
        return None;
    }
    match m.first_multivalued_pair() {
        None => match m.quotient_and_check().expect("non-trivial with pinned pairs") {
            CheckOutcome::Sat { certificate } => Some(certificate),
            CheckOutcome::Unsat => None,
        },
        Some((i, j, set)) => {
            for &label in priority {
                if !set.contains(label) {
                    continue;
                }
                let child = m.pinned(i, j, label);
                if let Some(cert) = search(&child, priority) {
                    return Some(cert);
                }
            }
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateError {
    WrongArity { expected: usize, got: usize },
    Unrealizable,
    ConstraintViolated { index: usize },
    Projection(TypeError),
}

impl fmt::Display for CertificateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateError::WrongArity { expected, got } => {
                write!(f, "certificate arity {got} does not match {expected} variables")
            }
            CertificateError::Unrealizable => {
                write!(f, "certificate quotient embeds a forbidden bound")
            }
            CertificateError::ConstraintViolated { index } => {
                write!(f, "certificate projection violates constraint {index}")
            }
            CertificateError::Projection(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CertificateError {}

/// Independent certificate check: arity, realizability, and membership of
/// every constraint projection. Shares no state with the producers.
pub fn verify_certificate(inst: &Instance, cert: &QfType) -> Result<(), CertificateError> {
    if cert.arity() != inst.variables().len() {
        return Err(CertificateError::WrongArity {
            expected: inst.variables().len(),
            got: cert.arity(),
        });
    }
    if !realizable(inst.family(), &cert.quotient_graph()) {
        return Err(CertificateError::Unrealizable);
    }
    for (index, c) in inst.constraints().iter().enumerate() {
        let proj = cert.project(&c.scope).map_err(CertificateError::Projection)?;
        if !inst.constraint_relation(c).contains(&proj) {
            return Err(CertificateError::ConstraintViolated { index });
        }
    }
    Ok(())
}

/// A certificate rendered as a concrete graph: one vertex per equality
/// class, edges from the E labels, and each variable mapped to its class
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub graph: FiniteGraph,
    /// Variable name to vertex, in variable order.
    pub assignment: Vec<(String, usize)>,
}

pub fn realize_certificate(
    cert: &QfType,
    variables: &[String],
    family: &GraphFamily,
) -> Result<Realization, CertificateError> {
    if cert.arity() != variables.len() {
        return Err(CertificateError::WrongArity {
            expected: variables.len(),
            got: cert.arity(),
        });
    }
    let graph = cert.quotient_graph();
    if !realizable(family, &graph) {
        return Err(CertificateError::Unrealizable);
    }
    let assignment = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), cert.class_of(i)))
        .collect();
    Ok(Realization { graph, assignment })
}
