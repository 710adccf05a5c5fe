//! Problem instances and their document format.
//!
//! An instance is a graph family, named orbit relations, an ordered list
//! of variables, and constraints pairing a variable scope with a relation
//! name. The wire format is a JSON document; parsing and serialization
//! round-trip, and all semantic checks (arities, realizability, name
//! resolution) happen at construction time.

use crate::graphs::{GraphFamily, Size};
use crate::orbits::{OrbitRelation, QfType, MAX_TYPE_ARITY};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Relation names that are always in scope, each binary: equality, edge,
/// non-edge, distinctness, edge-or-equal, non-edge-or-equal. Orbits that
/// the family forbids are silently dropped, so a builtin may be empty.
pub const BUILTIN_NAMES: [&str; 6] = ["=", "E", "N", "NEQ", "uuE", "uuN"];

const BUILTIN_ORBITS: [(&str, &[&str]); 6] = [
    ("=", &["="]),
    ("E", &["E"]),
    ("N", &["N"]),
    ("NEQ", &["E", "N"]),
    ("uuE", &["=", "E"]),
    ("uuN", &["=", "N"]),
];

/// Textual malformation, with the position the underlying reader stopped at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {} column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Well-formed text that does not describe a valid instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    /// Dotted path to the offending element, empty for programmatic use.
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError { path: path.into(), message: message.into() }
    }

    fn at(mut self, path: impl Into<String>) -> Self {
        self.path = path.into();
        self
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "schema error: {}", self.message)
        } else {
            write!(f, "schema error at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentError {
    Parse(ParseError),
    Schema(SchemaError),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Parse(e) => e.fmt(f),
            DocumentError::Schema(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for DocumentError {}

impl From<SchemaError> for DocumentError {
    fn from(e: SchemaError) -> Self {
        DocumentError::Schema(e)
    }
}

/// One constraint: variable indices into the instance order, and the name
/// of the relation they must satisfy. Repeated variables are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    family: GraphFamily,
    variables: Vec<String>,
    /// User relations plus the builtins, keyed by name.
    relations: BTreeMap<String, OrbitRelation>,
    constraints: Vec<Constraint>,
}

/// The six builtin relations, restricted to orbits the family realizes.
pub fn builtin_relations(family: &GraphFamily) -> BTreeMap<String, OrbitRelation> {
    let mut out = BTreeMap::new();
    for (name, orbits) in BUILTIN_ORBITS {
        let types = orbits.iter().filter_map(|s| QfType::parse(s, family).ok());
        let rel = OrbitRelation::from_orbits(2, types).expect("builtin orbits are binary");
        out.insert(name.to_string(), rel);
    }
    out
}

impl Instance {
    pub fn new(family: GraphFamily) -> Result<Self, SchemaError> {
        family
            .validate()
            .map_err(|e| SchemaError::new("domain", e.to_string()))?;
        let relations = builtin_relations(&family);
        Ok(Instance { family, variables: Vec::new(), relations, constraints: Vec::new() })
    }

    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn add_variable(&mut self, name: &str) -> Result<usize, SchemaError> {
        if name.is_empty() {
            return Err(SchemaError::new("", "variable names must be nonempty"));
        }
        if self.variable_index(name).is_some() {
            return Err(SchemaError::new("", format!("duplicate variable {name:?}")));
        }
        self.variables.push(name.to_string());
        Ok(self.variables.len() - 1)
    }

    pub fn is_builtin(name: &str) -> bool {
        BUILTIN_NAMES.contains(&name)
    }

    /// Defines a relation from orbit strings.
    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
        orbits: &[&str],
    ) -> Result<(), SchemaError> {
        let mut rel = OrbitRelation::new(arity);
        for s in orbits {
            let t = QfType::parse(s, &self.family).map_err(|e| {
                SchemaError::new("", format!("orbit {s:?}: {e}"))
            })?;
            if t.arity() != arity {
                return Err(SchemaError::new(
                    "",
                    format!("orbit {s:?} has arity {}, relation {name:?} expects {arity}", t.arity()),
                ));
            }
            rel.insert(t).expect("arity was checked");
        }
        self.insert_relation(name, rel)
    }

    /// Defines a relation from an already-built orbit set.
    pub fn insert_relation(&mut self, name: &str, relation: OrbitRelation) -> Result<(), SchemaError> {
        if name.is_empty() {
            return Err(SchemaError::new("", "relation names must be nonempty"));
        }
        if Self::is_builtin(name) {
            return Err(SchemaError::new("", format!("relation {name:?} shadows a builtin")));
        }
        if self.relations.contains_key(name) {
            return Err(SchemaError::new("", format!("duplicate relation {name:?}")));
        }
        if relation.arity() == 0 || relation.arity() > MAX_TYPE_ARITY {
            return Err(SchemaError::new(
                "",
                format!("relation arity must lie in 1..={MAX_TYPE_ARITY}"),
            ));
        }
        self.relations.insert(name.to_string(), relation);
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<&OrbitRelation> {
        self.relations.get(name)
    }

    /// Every relation in scope, builtins included.
    pub fn relations(&self) -> &BTreeMap<String, OrbitRelation> {
        &self.relations
    }

    pub fn add_constraint(&mut self, scope: &[&str], relation: &str) -> Result<(), SchemaError> {
        let indices = scope
            .iter()
            .map(|name| {
                self.variable_index(name)
                    .ok_or_else(|| SchemaError::new("", format!("unknown variable {name:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.add_constraint_by_index(indices, relation)
    }

    pub fn add_constraint_by_index(
        &mut self,
        scope: Vec<usize>,
        relation: &str,
    ) -> Result<(), SchemaError> {
        let rel = self
            .relations
            .get(relation)
            .ok_or_else(|| SchemaError::new("", format!("unknown relation {relation:?}")))?;
        if scope.len() != rel.arity() {
            return Err(SchemaError::new(
                "",
                format!(
                    "scope has {} variables, relation {relation:?} has arity {}",
                    scope.len(),
                    rel.arity()
                ),
            ));
        }
        for &v in &scope {
            if v >= self.variables.len() {
                return Err(SchemaError::new("", format!("variable index {v} out of range")));
            }
        }
        self.constraints.push(Constraint { scope, relation: relation.to_string() });
        Ok(())
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// The relation a constraint refers to. Valid for constraints of this
    /// instance, which always resolve.
    pub fn constraint_relation(&self, c: &Constraint) -> &OrbitRelation {
        &self.relations[&c.relation]
    }

    pub fn parse(text: &str) -> Result<Instance, DocumentError> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            DocumentError::Parse(ParseError {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })
        })?;
        Ok(instance_from_value(&value)?)
    }

    /// Canonical document text: sorted keys, two-space indent, trailing
    /// newline. Builtin relations are implied and not emitted.
    pub fn serialize(&self) -> String {
        let mut root = Map::new();
        root.insert("domain".into(), family_to_value(&self.family));
        let mut rels = Map::new();
        for (name, rel) in &self.relations {
            if Self::is_builtin(name) {
                continue;
            }
            let orbits: Vec<Value> =
                rel.iter().map(|t| Value::String(t.encode())).collect();
            let mut entry = Map::new();
            entry.insert("arity".into(), Value::from(rel.arity() as u64));
            entry.insert("orbits".into(), Value::Array(orbits));
            rels.insert(name.clone(), Value::Object(entry));
        }
        root.insert("relations".into(), Value::Object(rels));
        root.insert(
            "variables".into(),
            Value::Array(self.variables.iter().map(|v| Value::String(v.clone())).collect()),
        );
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| {
                let scope: Vec<Value> = c
                    .scope
                    .iter()
                    .map(|&v| Value::String(self.variables[v].clone()))
                    .collect();
                let mut entry = Map::new();
                entry.insert("scope".into(), Value::Array(scope));
                entry.insert("relation".into(), Value::String(c.relation.clone()));
                Value::Object(entry)
            })
            .collect();
        root.insert("constraints".into(), Value::Array(constraints));
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("maps with string keys always serialize");
        text.push('\n');
        text
    }
}

pub fn family_to_value(family: &GraphFamily) -> Value {
    fn size_to_value(s: Size) -> Value {
        match s {
            Size::Omega => Value::String("omega".into()),
            Size::Finite(n) => Value::from(n as u64),
        }
    }
    let mut map = Map::new();
    match family {
        GraphFamily::Random => {
            map.insert("family".into(), Value::String("random".into()));
        }
        GraphFamily::Henson(k) => {
            map.insert("family".into(), Value::String("henson".into()));
            map.insert("k".into(), Value::from(*k as u64));
        }
        GraphFamily::Cliques { size, count } => {
            map.insert("family".into(), Value::String("cliques".into()));
            map.insert("size".into(), size_to_value(*size));
            map.insert("count".into(), size_to_value(*count));
        }
        GraphFamily::Complement(inner) => {
            map.insert("family".into(), Value::String("complement".into()));
            map.insert("of".into(), family_to_value(inner));
        }
    }
    Value::Object(map)
}

fn expect_object<'v>(value: &'v Value, path: &str) -> Result<&'v Map<String, Value>, SchemaError> {
    value
        .as_object()
        .ok_or_else(|| SchemaError::new(path, "expected an object"))
}

fn expect_string<'v>(value: &'v Value, path: &str) -> Result<&'v str, SchemaError> {
    value
        .as_str()
        .ok_or_else(|| SchemaError::new(path, "expected a string"))
}

fn expect_array<'v>(value: &'v Value, path: &str) -> Result<&'v [Value], SchemaError> {
    value
        .as_array()
        .map(|a| a.as_slice())
        .ok_or_else(|| SchemaError::new(path, "expected an array"))
}

fn expect_u64(value: &Value, path: &str) -> Result<u64, SchemaError> {
    value
        .as_u64()
        .ok_or_else(|| SchemaError::new(path, "expected a non-negative integer"))
}

fn get<'v>(map: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value, SchemaError> {
    map.get(key)
        .ok_or_else(|| SchemaError::new(path, format!("missing key {key:?}")))
}

fn reject_unknown_keys(
    map: &Map<String, Value>,
    allowed: &[&str],
    path: &str,
) -> Result<(), SchemaError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(SchemaError::new(path, format!("unknown key {key:?}")));
        }
    }
    Ok(())
}

fn size_from_value(value: &Value, path: &str) -> Result<Size, SchemaError> {
    match value {
        Value::String(s) if s == "omega" => Ok(Size::Omega),
        Value::Number(_) => {
            let n = expect_u64(value, path)?;
            let n = u32::try_from(n)
                .map_err(|_| SchemaError::new(path, "size out of range"))?;
            Ok(Size::Finite(n))
        }
        _ => Err(SchemaError::new(path, "expected \"omega\" or an integer")),
    }
}

pub fn family_from_value(value: &Value, path: &str) -> Result<GraphFamily, SchemaError> {
    let map = expect_object(value, path)?;
    let kind = expect_string(get(map, "family", path)?, &format!("{path}.family"))?;
    let family = match kind {
        "random" => {
            reject_unknown_keys(map, &["family"], path)?;
            GraphFamily::Random
        }
        "henson" => {
            reject_unknown_keys(map, &["family", "k"], path)?;
            let k = expect_u64(get(map, "k", path)?, &format!("{path}.k"))?;
            let k = u32::try_from(k).map_err(|_| SchemaError::new(path, "k out of range"))?;
            GraphFamily::Henson(k)
        }
        "cliques" => {
            reject_unknown_keys(map, &["family", "size", "count"], path)?;
            let size = size_from_value(get(map, "size", path)?, &format!("{path}.size"))?;
            let count = size_from_value(get(map, "count", path)?, &format!("{path}.count"))?;
            GraphFamily::Cliques { size, count }
        }
        "complement" => {
            reject_unknown_keys(map, &["family", "of"], path)?;
            let inner = family_from_value(get(map, "of", path)?, &format!("{path}.of"))?;
            GraphFamily::Complement(Box::new(inner))
        }
        "finite-types" => {
            return Err(SchemaError::new(
                path,
                "finite-types documents describe translated instances, not graph instances",
            ));
        }
        other => return Err(SchemaError::new(path, format!("unknown family {other:?}"))),
    };
    family
        .validate()
        .map_err(|e| SchemaError::new(path, e.to_string()))?;
    Ok(family)
}

fn instance_from_value(value: &Value) -> Result<Instance, SchemaError> {
    let root = expect_object(value, "$")?;
    reject_unknown_keys(root, &["domain", "relations", "variables", "constraints"], "$")?;
    let family = family_from_value(get(root, "domain", "$")?, "domain")?;
    let mut inst = Instance::new(family)?;

    let variables = expect_array(get(root, "variables", "$")?, "variables")?;
    for (i, v) in variables.iter().enumerate() {
        let path = format!("variables[{i}]");
        let name = expect_string(v, &path)?;
        inst.add_variable(name).map_err(|e| e.at(path))?;
    }

    if let Some(rels) = root.get("relations") {
        let rels = expect_object(rels, "relations")?;
        for (name, spec) in rels {
            let path = format!("relations.{name}");
            let spec = expect_object(spec, &path)?;
            reject_unknown_keys(spec, &["arity", "orbits"], &path)?;
            let arity = expect_u64(get(spec, "arity", &path)?, &format!("{path}.arity"))?;
            let arity = usize::try_from(arity)
                .map_err(|_| SchemaError::new(format!("{path}.arity"), "arity out of range"))?;
            let orbits =
                expect_array(get(spec, "orbits", &path)?, &format!("{path}.orbits"))?;
            let mut strings = Vec::with_capacity(orbits.len());
            for (i, o) in orbits.iter().enumerate() {
                strings.push(expect_string(o, &format!("{path}.orbits[{i}]"))?);
            }
            // Report the offending orbit, not just the relation.
            let mut rel = OrbitRelation::new(arity);
            for (i, s) in strings.iter().enumerate() {
                let orbit_path = format!("{path}.orbits[{i}]");
                let t = QfType::parse(s, inst.family())
                    .map_err(|e| SchemaError::new(&orbit_path, format!("orbit {s:?}: {e}")))?;
                if t.arity() != arity {
                    return Err(SchemaError::new(
                        orbit_path,
                        format!("orbit {s:?} has arity {}, expected {arity}", t.arity()),
                    ));
                }
                rel.insert(t).expect("arity was checked");
            }
            inst.insert_relation(name, rel).map_err(|e| e.at(path))?;
        }
    }

    if let Some(constraints) = root.get("constraints") {
        let constraints = expect_array(constraints, "constraints")?;
        for (i, c) in constraints.iter().enumerate() {
            let path = format!("constraints[{i}]");
            let c = expect_object(c, &path)?;
            reject_unknown_keys(c, &["scope", "relation"], &path)?;
            let relation =
                expect_string(get(c, "relation", &path)?, &format!("{path}.relation"))?;
            let scope_values = expect_array(get(c, "scope", &path)?, &format!("{path}.scope"))?;
            let mut scope = Vec::with_capacity(scope_values.len());
            for (j, s) in scope_values.iter().enumerate() {
                let vpath = format!("{path}.scope[{j}]");
                let name = expect_string(s, &vpath)?;
                let index = inst
                    .variable_index(name)
                    .ok_or_else(|| SchemaError::new(&vpath, format!("unknown variable {name:?}")))?;
                scope.push(index);
            }
            inst.add_constraint_by_index(scope, relation).map_err(|e| e.at(path))?;
        }
    }

    Ok(inst)
}
