//! Behavior tables of canonical functions on pair labels.
//!
//! A binary or ternary canonical injection acts on types pointwise per
//! position pair; its behavior is the finite table mapping argument label
//! combinations to the image label. Tables are assembled from a shape
//! (the action on distinct arguments) and a flavor (the action when some
//! argument pair is equality), applied to relations, and closed over.

use crate::graphs::GraphFamily;
use crate::orbits::{OrbitLabel, OrbitRelation, QfType, TypeError};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BehaviorError {
    IncoherentSpec(String),
    UnknownSpec(String),
    WrongArgumentCount { expected: usize, got: usize },
    MixedTupleArity,
}

impl fmt::Display for BehaviorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BehaviorError::IncoherentSpec(msg) => write!(f, "incoherent behavior spec: {msg}"),
            BehaviorError::UnknownSpec(s) => write!(f, "unknown behavior spec {s:?}"),
            BehaviorError::WrongArgumentCount { expected, got } => {
                write!(f, "behavior takes {expected} arguments, got {got}")
            }
            BehaviorError::MixedTupleArity => {
                write!(f, "behavior arguments must share one tuple arity")
            }
        }
    }
}

impl std::error::Error for BehaviorError {}

/// Action of a binary behavior on two distinct (edge or non-edge) labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryShape {
    Min,
    Max,
    Projection(u8),
    Xor,
    Xnor,
    EConstant,
    NConstant,
}

/// Action of a binary behavior when exactly one argument label is equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Balanced,
    EDominated,
    NDominated,
}

fn idx(label: OrbitLabel) -> usize {
    match label {
        OrbitLabel::Eq => 0,
        OrbitLabel::E => 1,
        OrbitLabel::N => 2,
    }
}

/// Full label table of a binary canonical function.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryBehavior {
    spec: String,
    table: [[OrbitLabel; 3]; 3],
}

impl BinaryBehavior {
    pub fn apply(&self, a: OrbitLabel, b: OrbitLabel) -> OrbitLabel {
        self.table[idx(a)][idx(b)]
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// Output is equality exactly when both inputs are.
    pub fn eq_law_holds(&self) -> bool {
        OrbitLabel::ALL.iter().all(|&a| {
            OrbitLabel::ALL.iter().all(|&b| {
                (self.apply(a, b) == OrbitLabel::Eq)
                    == (a == OrbitLabel::Eq && b == OrbitLabel::Eq)
            })
        })
    }
}

impl fmt::Debug for BinaryBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryBehavior({})", self.spec)
    }
}

/// Full label table of a ternary canonical function.
#[derive(Clone, PartialEq, Eq)]
pub struct TernaryBehavior {
    spec: String,
    table: [[[OrbitLabel; 3]; 3]; 3],
}

impl TernaryBehavior {
    pub fn apply(&self, a: OrbitLabel, b: OrbitLabel, c: OrbitLabel) -> OrbitLabel {
        self.table[idx(a)][idx(b)][idx(c)]
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn eq_law_holds(&self) -> bool {
        OrbitLabel::ALL.iter().all(|&a| {
            OrbitLabel::ALL.iter().all(|&b| {
                OrbitLabel::ALL.iter().all(|&c| {
                    (self.apply(a, b, c) == OrbitLabel::Eq)
                        == (a == OrbitLabel::Eq && b == OrbitLabel::Eq && c == OrbitLabel::Eq)
                })
            })
        })
    }
}

impl fmt::Debug for TernaryBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryBehavior({})", self.spec)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum Behavior {
    Binary(BinaryBehavior),
    Ternary(TernaryBehavior),
}

impl Behavior {
    pub fn arity(&self) -> usize {
        match self {
            Behavior::Binary(_) => 2,
            Behavior::Ternary(_) => 3,
        }
    }

    pub fn spec(&self) -> &str {
        match self {
            Behavior::Binary(b) => b.spec(),
            Behavior::Ternary(t) => t.spec(),
        }
    }

    pub fn apply_labels(&self, labels: &[OrbitLabel]) -> OrbitLabel {
        match self {
            Behavior::Binary(b) => b.apply(labels[0], labels[1]),
            Behavior::Ternary(t) => t.apply(labels[0], labels[1], labels[2]),
        }
    }

    pub fn eq_law_holds(&self) -> bool {
        match self {
            Behavior::Binary(b) => b.eq_law_holds(),
            Behavior::Ternary(t) => t.eq_law_holds(),
        }
    }
}

impl fmt::Debug for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Behavior({})", self.spec())
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.spec())
    }
}

fn shape_token(shape: BinaryShape) -> String {
    match shape {
        BinaryShape::Min => "min".into(),
        BinaryShape::Max => "max".into(),
        BinaryShape::Projection(i) => format!("projection{i}"),
        BinaryShape::Xor => "xor".into(),
        BinaryShape::Xnor => "xnor".into(),
        BinaryShape::EConstant => "e_constant".into(),
        BinaryShape::NConstant => "n_constant".into(),
    }
}

fn flavor_token(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Balanced => "balanced",
        Flavor::EDominated => "e_dominated",
        Flavor::NDominated => "n_dominated",
    }
}

/// Builds the binary table from a shape and, for non-constant shapes, a
/// flavor. Constant shapes reject a flavor and non-constant shapes require
/// one; a pair of equal labels always maps to equality.
pub fn make_binary(
    shape: BinaryShape,
    flavor: Option<Flavor>,
) -> Result<BinaryBehavior, BehaviorError> {
    let constant = matches!(shape, BinaryShape::EConstant | BinaryShape::NConstant);
    if constant && flavor.is_some() {
        return Err(BehaviorError::IncoherentSpec(format!(
            "{} is already determined on mixed labels and takes no flavor",
            shape_token(shape)
        )));
    }
    if !constant && flavor.is_none() {
        return Err(BehaviorError::IncoherentSpec(format!(
            "{} needs a flavor for mixed labels",
            shape_token(shape)
        )));
    }
    if let BinaryShape::Projection(i) = shape {
        if i != 1 && i != 2 {
            return Err(BehaviorError::IncoherentSpec(format!(
                "projection argument must be 1 or 2, got {i}"
            )));
        }
    }

    use OrbitLabel::{Eq, E, N};
    let distinct = |a: OrbitLabel, b: OrbitLabel| match shape {
        BinaryShape::Min => {
            if a == E && b == E {
                E
            } else {
                N
            }
        }
        BinaryShape::Max => {
            if a == N && b == N {
                N
            } else {
                E
            }
        }
        BinaryShape::Projection(1) => a,
        BinaryShape::Projection(_) => b,
        BinaryShape::Xor => {
            if a != b {
                E
            } else {
                N
            }
        }
        BinaryShape::Xnor => {
            if a == b {
                E
            } else {
                N
            }
        }
        BinaryShape::EConstant => E,
        BinaryShape::NConstant => N,
    };
    let mixed = |x: OrbitLabel| match shape {
        BinaryShape::EConstant => E,
        BinaryShape::NConstant => N,
        _ => match flavor.unwrap() {
            Flavor::Balanced => x,
            Flavor::EDominated => E,
            Flavor::NDominated => N,
        },
    };

    let mut table = [[Eq; 3]; 3];
    for a in OrbitLabel::ALL {
        for b in OrbitLabel::ALL {
            table[idx(a)][idx(b)] = match (a, b) {
                (Eq, Eq) => Eq,
                (Eq, x) | (x, Eq) => mixed(x),
                (x, y) => distinct(x, y),
            };
        }
    }
    let spec = match flavor {
        Some(f) => format!("{}:{}", shape_token(shape), flavor_token(f)),
        None => shape_token(shape),
    };
    Ok(BinaryBehavior { spec, table })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TernaryShape {
    Majority,
    Minority,
    HC2Omega,
}

/// Builds the ternary table. Majority and minority act on all-distinct
/// labels by their vote rule and defer to the hyperplane behavior once any
/// argument label is equality; the near-unanimity table for the two-clique
/// family is fixed and ignores the hyperplane.
pub fn make_ternary(
    shape: TernaryShape,
    hyperplane: Option<&BinaryBehavior>,
) -> Result<TernaryBehavior, BehaviorError> {
    use OrbitLabel::{Eq, E, N};
    if matches!(shape, TernaryShape::Majority | TernaryShape::Minority) && hyperplane.is_none() {
        return Err(BehaviorError::IncoherentSpec(
            "majority and minority need a hyperplane behavior".into(),
        ));
    }
    let mut table = [[[Eq; 3]; 3]; 3];
    for a in OrbitLabel::ALL {
        for b in OrbitLabel::ALL {
            for c in OrbitLabel::ALL {
                let labels = [a, b, c];
                let out = match shape {
                    TernaryShape::HC2Omega => {
                        if labels.contains(&N) {
                            N
                        } else if labels.iter().filter(|&&l| l == E).count() % 2 == 1 {
                            E
                        } else {
                            Eq
                        }
                    }
                    _ => {
                        let hyper = hyperplane.unwrap();
                        let eqs = labels.iter().filter(|&&l| l == Eq).count();
                        match eqs {
                            0 => {
                                let ns = labels.iter().filter(|&&l| l == N).count();
                                match shape {
                                    TernaryShape::Majority => {
                                        if ns >= 2 {
                                            N
                                        } else {
                                            E
                                        }
                                    }
                                    TernaryShape::Minority => {
                                        if ns % 2 == 1 {
                                            N
                                        } else {
                                            E
                                        }
                                    }
                                    TernaryShape::HC2Omega => unreachable!(),
                                }
                            }
                            1 => {
                                let rest: Vec<OrbitLabel> =
                                    labels.iter().copied().filter(|&l| l != Eq).collect();
                                hyper.apply(rest[0], rest[1])
                            }
                            2 => {
                                let x = labels.iter().copied().find(|&l| l != Eq).unwrap();
                                hyper.apply(x, Eq)
                            }
                            _ => Eq,
                        }
                    }
                };
                table[idx(a)][idx(b)][idx(c)] = out;
            }
        }
    }
    let spec = match (shape, hyperplane) {
        (TernaryShape::HC2Omega, _) => "h_c2omega".to_string(),
        (TernaryShape::Majority, Some(h)) => format!("majority:{}", h.spec()),
        (TernaryShape::Minority, Some(h)) => format!("minority:{}", h.spec()),
        _ => unreachable!(),
    };
    Ok(TernaryBehavior { spec, table })
}

/// Parses a behavior spec string such as `max:balanced`, `e_constant`,
/// `majority:projection1:balanced`, `minority:xnor:balanced`, or
/// `h_c2omega`.
pub fn parse_spec(spec: &str) -> Result<Behavior, BehaviorError> {
    let tokens: Vec<&str> = spec.split(':').map(str::trim).collect();
    match tokens.as_slice() {
        ["h_c2omega"] => Ok(Behavior::Ternary(make_ternary(TernaryShape::HC2Omega, None)?)),
        ["majority", rest @ ..] | ["minority", rest @ ..] if !rest.is_empty() => {
            let shape = if tokens[0] == "majority" {
                TernaryShape::Majority
            } else {
                TernaryShape::Minority
            };
            let hyper = match parse_spec(&rest.join(":"))? {
                Behavior::Binary(b) => b,
                Behavior::Ternary(_) => {
                    return Err(BehaviorError::IncoherentSpec(
                        "hyperplane behavior must be binary".into(),
                    ))
                }
            };
            Ok(Behavior::Ternary(make_ternary(shape, Some(&hyper))?))
        }
        _ => {
            let shape = match tokens[0] {
                "min" => BinaryShape::Min,
                "max" => BinaryShape::Max,
                "projection1" => BinaryShape::Projection(1),
                "projection2" => BinaryShape::Projection(2),
                "xor" => BinaryShape::Xor,
                "xnor" => BinaryShape::Xnor,
                "e_constant" => BinaryShape::EConstant,
                "n_constant" => BinaryShape::NConstant,
                _ => return Err(BehaviorError::UnknownSpec(spec.to_string())),
            };
            let flavor = match tokens.len() {
                1 => None,
                2 => Some(match tokens[1] {
                    "balanced" => Flavor::Balanced,
                    "e_dominated" => Flavor::EDominated,
                    "n_dominated" => Flavor::NDominated,
                    _ => return Err(BehaviorError::UnknownSpec(spec.to_string())),
                }),
                _ => return Err(BehaviorError::UnknownSpec(spec.to_string())),
            };
            Ok(Behavior::Binary(make_binary(shape, flavor)?))
        }
    }
}

/// Image type under the behavior, applied pointwise on pair labels.
///
/// `Ok(None)` means the labels assemble into no realizable type: either the
/// output equalities conflict with the remaining labels, or the quotient
/// embeds a bound.
pub fn apply_behavior(
    behavior: &Behavior,
    args: &[&QfType],
    family: &GraphFamily,
) -> Result<Option<QfType>, BehaviorError> {
    if args.len() != behavior.arity() {
        return Err(BehaviorError::WrongArgumentCount {
            expected: behavior.arity(),
            got: args.len(),
        });
    }
    let r = args[0].arity();
    if args.iter().any(|t| t.arity() != r) {
        return Err(BehaviorError::MixedTupleArity);
    }
    let mut labels = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in (i + 1)..r {
            let arg_labels: Vec<OrbitLabel> = args.iter().map(|t| t.label(i, j)).collect();
            labels.push(behavior.apply_labels(&arg_labels));
        }
    }
    match QfType::from_labels(r, &labels, family) {
        Ok(t) => Ok(Some(t)),
        Err(TypeError::Inconsistent) | Err(TypeError::Unrealizable) => Ok(None),
        Err(e) => unreachable!("label assembly cannot fail structurally: {e}"),
    }
}

/// Outcome of checking a relation against a behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreservationReport {
    Preserved,
    /// Some argument tuple has a realizable image outside the relation.
    Violated { arguments: Vec<QfType>, image: QfType },
    /// Some argument tuple has no realizable image at all.
    Incompatible { arguments: Vec<QfType> },
}

/// Checks whether every image of tuples from the relation stays in the
/// relation. The first offending argument tuple in canonical order is
/// reported.
pub fn preserves(
    behavior: &Behavior,
    rel: &OrbitRelation,
    family: &GraphFamily,
) -> Result<PreservationReport, BehaviorError> {
    let orbits: Vec<&QfType> = rel.iter().collect();
    let k = behavior.arity();
    if orbits.is_empty() {
        return Ok(PreservationReport::Preserved);
    }
    let mut pick = vec![0usize; k];
    loop {
        let args: Vec<&QfType> = pick.iter().map(|&i| orbits[i]).collect();
        match apply_behavior(behavior, &args, family)? {
            None => {
                return Ok(PreservationReport::Incompatible {
                    arguments: args.into_iter().cloned().collect(),
                })
            }
            Some(image) => {
                if !rel.contains(&image) {
                    return Ok(PreservationReport::Violated {
                        arguments: args.into_iter().cloned().collect(),
                        image,
                    });
                }
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(PreservationReport::Preserved);
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < orbits.len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

/// Least superset of the relation closed under realizable images of all
/// behaviors. Unrealizable images are skipped, so closure never fails on
/// incompatibility.
pub fn closure(
    behaviors: &[Behavior],
    rel: &OrbitRelation,
    family: &GraphFamily,
) -> Result<OrbitRelation, BehaviorError> {
    let mut current = rel.clone();
    loop {
        let orbits: Vec<QfType> = current.iter().cloned().collect();
        let mut fresh: Vec<QfType> = Vec::new();
        for behavior in behaviors {
            let k = behavior.arity();
            if orbits.is_empty() {
                continue;
            }
            let mut pick = vec![0usize; k];
            'tuples: loop {
                let args: Vec<&QfType> = pick.iter().map(|&i| &orbits[i]).collect();
                if let Some(image) = apply_behavior(behavior, &args, family)? {
                    if !current.contains(&image) && !fresh.contains(&image) {
                        fresh.push(image);
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    pick[pos] += 1;
                    if pick[pos] < orbits.len() {
                        break;
                    }
                    pick[pos] = 0;
                }
            }
        }
        if fresh.is_empty() {
            return Ok(current);
        }
        for t in fresh {
            current.insert(t).expect("image arity matches relation arity");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::GraphFamily;
    use OrbitLabel::{Eq, E, N};

    #[test]
    fn named_tables_are_frozen() {
        let b1 = make_binary(BinaryShape::Max, Some(Flavor::Balanced)).unwrap();
        let expect1 = [
            ((Eq, Eq), Eq),
            ((Eq, E), E),
            ((Eq, N), N),
            ((E, Eq), E),
            ((E, E), E),
            ((E, N), E),
            ((N, Eq), N),
            ((N, E), E),
            ((N, N), N),
        ];
        for ((a, b), out) in expect1 {
            assert_eq!(b1.apply(a, b), out, "max:balanced at ({a},{b})");
        }

        let b2 = make_binary(BinaryShape::EConstant, None).unwrap();
        for a in OrbitLabel::ALL {
            for b in OrbitLabel::ALL {
                let expected = if a == Eq && b == Eq { Eq } else { E };
                assert_eq!(b2.apply(a, b), expected, "e_constant at ({a},{b})");
            }
        }

        let b3 = make_binary(BinaryShape::Min, Some(Flavor::NDominated)).unwrap();
        let expect3 = [
            ((Eq, Eq), Eq),
            ((Eq, E), N),
            ((Eq, N), N),
            ((E, Eq), N),
            ((E, E), E),
            ((E, N), N),
            ((N, Eq), N),
            ((N, E), N),
            ((N, N), N),
        ];
        for ((a, b), out) in expect3 {
            assert_eq!(b3.apply(a, b), out, "min:n_dominated at ({a},{b})");
        }
    }

    #[test]
    fn constant_flavor_combinations_are_rejected() {
        assert!(matches!(
            make_binary(BinaryShape::EConstant, Some(Flavor::Balanced)),
            Err(BehaviorError::IncoherentSpec(_))
        ));
        assert!(matches!(
            make_binary(BinaryShape::Min, None),
            Err(BehaviorError::IncoherentSpec(_))
        ));
        assert!(matches!(
            make_ternary(TernaryShape::Majority, None),
            Err(BehaviorError::IncoherentSpec(_))
        ));
    }

    #[test]
    fn near_unanimity_table_for_two_cliques() {
        let h = make_ternary(TernaryShape::HC2Omega, None).unwrap();
        assert_eq!(h.apply(E, E, E), E);
        assert_eq!(h.apply(E, Eq, Eq), E);
        assert_eq!(h.apply(Eq, E, Eq), E);
        assert_eq!(h.apply(Eq, Eq, E), E);
        assert_eq!(h.apply(Eq, Eq, Eq), Eq);
        assert_eq!(h.apply(Eq, E, E), Eq);
        assert_eq!(h.apply(E, Eq, E), Eq);
        assert_eq!(h.apply(E, E, Eq), Eq);
        for a in OrbitLabel::ALL {
            for b in OrbitLabel::ALL {
                assert_eq!(h.apply(a, b, N), N);
                assert_eq!(h.apply(a, N, b), N);
                assert_eq!(h.apply(N, a, b), N);
            }
        }
        assert!(!h.eq_law_holds());
    }

    #[test]
    fn injective_behaviors_satisfy_eq_law() {
        let mut specs = vec!["e_constant".to_string(), "n_constant".to_string()];
        for shape in ["min", "max", "projection1", "projection2", "xor", "xnor"] {
            for flavor in ["balanced", "e_dominated", "n_dominated"] {
                specs.push(format!("{shape}:{flavor}"));
            }
        }
        for spec in &specs {
            let b = parse_spec(spec).unwrap();
            assert!(b.eq_law_holds(), "{spec}");
            assert_eq!(b.spec(), spec);
        }
        for shape in ["majority", "minority"] {
            let spec = format!("{shape}:projection1:balanced");
            let b = parse_spec(&spec).unwrap();
            assert!(b.eq_law_holds(), "{spec}");
            assert_eq!(b.spec(), spec);
        }
        assert!(parse_spec("frobnicate").is_err());
        assert!(parse_spec("majority").is_err());
    }

    #[test]
    fn preservation_and_closure() {
        let family = GraphFamily::Random;
        let max = parse_spec("max:balanced").unwrap();
        let xor = parse_spec("xor:balanced").unwrap();
        let edge = OrbitRelation::from_orbits(
            2,
            [QfType::parse("E", &family).unwrap()],
        )
        .unwrap();
        assert_eq!(preserves(&max, &edge, &family).unwrap(), PreservationReport::Preserved);
        match preserves(&xor, &edge, &family).unwrap() {
            PreservationReport::Violated { image, .. } => {
                assert_eq!(image.encode(), "N");
            }
            other => panic!("expected violation, got {other:?}"),
        }

        let ta = QfType::parse("E,N,N,N,N,=", &family).unwrap();
        let tb = QfType::parse("N,N,N,N,N,E", &family).unwrap();
        let rel = OrbitRelation::from_orbits(4, [ta, tb]).unwrap();
        let closed = closure(std::slice::from_ref(&max), &rel, &family).unwrap();
        let combined = QfType::parse("E,N,N,N,N,E", &family).unwrap();
        assert!(closed.contains(&combined));
        // Closure is extensive and idempotent.
        for t in rel.iter() {
            assert!(closed.contains(t));
        }
        let again = closure(std::slice::from_ref(&max), &closed, &family).unwrap();
        assert_eq!(again, closed);
    }
}
