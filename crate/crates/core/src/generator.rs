//! Seeded random instances for cross-checks and benchmarks.
//!
//! Everything here is deterministic in the seed: the same seed, family,
//! and shape produce byte-identical instances across runs and platforms.

use crate::graphs::GraphFamily;
use crate::instance::Instance;
use crate::orbits::OrbitRelation;
use crate::solver::realizable_types;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonempty random orbit relation: up to `max_orbits` distinct
/// realizable types of the given arity.
pub fn random_relation(
    rng: &mut impl Rng,
    family: &GraphFamily,
    arity: usize,
    max_orbits: usize,
) -> OrbitRelation {
    let types = realizable_types(family, arity);
    let count = rng.gen_range(1..=max_orbits.min(types.len()));
    let picks = sample(rng, types.len(), count);
    let mut rel = OrbitRelation::new(arity);
    for i in picks {
        rel.insert(types[i].clone()).expect("enumerated types match the arity");
    }
    rel
}

/// Named relations Q1..Qcount for one family.
pub fn random_relation_pool(
    rng: &mut impl Rng,
    family: &GraphFamily,
    arity: usize,
    count: usize,
    max_orbits: usize,
) -> Vec<(String, OrbitRelation)> {
    (1..=count)
        .map(|i| (format!("Q{i}"), random_relation(rng, family, arity, max_orbits)))
        .collect()
}

/// The constraint language a generated instance draws from.
pub struct Language {
    builtin_names: Vec<&'static str>,
    extra: Vec<(String, OrbitRelation)>,
}

impl Language {
    /// All six builtin binary relations.
    pub fn builtins() -> Language {
        Language { builtin_names: vec!["=", "E", "N", "NEQ", "uuE", "uuN"], extra: Vec::new() }
    }

    /// The builtins whose orbits never force equality.
    pub fn equality_free() -> Language {
        Language { builtin_names: vec!["E", "N", "NEQ"], extra: Vec::new() }
    }

    pub fn with_pool(mut self, pool: Vec<(String, OrbitRelation)>) -> Language {
        self.extra = pool;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub min_variables: usize,
    pub max_variables: usize,
    pub min_constraints: usize,
    pub max_constraints: usize,
}

/// One random instance: variable count and constraint count drawn from
/// the shape, each constraint a uniformly chosen relation applied to a
/// uniformly chosen scope (repeats allowed).
pub fn random_instance(
    rng: &mut impl Rng,
    family: &GraphFamily,
    language: &Language,
    shape: &InstanceShape,
) -> Instance {
    let mut inst = Instance::new(family.clone()).expect("generated families are valid");
    let n = rng.gen_range(shape.min_variables..=shape.max_variables);
    for i in 1..=n {
        inst.add_variable(&format!("v{i}")).expect("fresh names");
    }
    for (name, rel) in &language.extra {
        inst.insert_relation(name, rel.clone()).expect("pool names are fresh");
    }
    let mut names: Vec<String> =
        language.builtin_names.iter().map(|s| s.to_string()).collect();
    names.extend(language.extra.iter().map(|(n, _)| n.clone()));
    let c = rng.gen_range(shape.min_constraints..=shape.max_constraints);
    for _ in 0..c {
        let name = &names[rng.gen_range(0..names.len())];
        let arity = inst.relation(name).expect("name came from the language").arity();
        let scope: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..n)).collect();
        inst.add_constraint_by_index(scope, name).expect("scope indices are in range");
    }
    inst
}

/// Two variables carrying both an edge and a non-edge: unsatisfiable,
/// yet (1, l)-minimal for every l because singleton projections agree.
pub fn contradictory_pair(family: &GraphFamily) -> Instance {
    let mut inst = Instance::new(family.clone()).expect("fixture families are valid");
    inst.add_variable("x").expect("fresh name");
    inst.add_variable("y").expect("fresh name");
    inst.add_constraint(&["x", "y"], "E").expect("builtin");
    inst.add_constraint(&["x", "y"], "N").expect("builtin");
    inst
}

/// An equality chain closed by an edge: x = y, y = z, E(x, z).
/// Unsatisfiable, yet (2,2)-minimal because no binary constraint sees
/// all three variables at once.
pub fn equality_chain(family: &GraphFamily) -> Instance {
    let mut inst = Instance::new(family.clone()).expect("fixture families are valid");
    for v in ["x", "y", "z"] {
        inst.add_variable(v).expect("fresh name");
    }
    inst.add_constraint(&["x", "y"], "=").expect("builtin");
    inst.add_constraint(&["y", "z"], "=").expect("builtin");
    inst.add_constraint(&["x", "z"], "E").expect("builtin");
    inst
}

/// The complete graph on k variables as an instance: an edge constraint
/// on every pair.
pub fn clique_instance(family: &GraphFamily, k: usize) -> Instance {
    let mut inst = Instance::new(family.clone()).expect("fixture families are valid");
    let names: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    for name in &names {
        inst.add_variable(name).expect("fresh names");
    }
    for i in 0..k {
        for j in (i + 1)..k {
            inst.add_constraint(&[&names[i], &names[j]], "E").expect("builtin");
        }
    }
    inst
}

/// The standard cross-check corpus: a seeded pool of `pool_size`
/// relations of `pool_arity`, then `count` instances over builtins plus
/// the pool.
pub fn corpus(
    family: &GraphFamily,
    seed: u64,
    count: usize,
    pool_size: usize,
    pool_arity: usize,
    shape: &InstanceShape,
) -> Vec<Instance> {
    let mut rng = seeded_rng(seed);
    let pool = random_relation_pool(&mut rng, family, pool_arity, pool_size, 4);
    let language = Language::builtins().with_pool(pool);
    (0..count).map(|_| random_instance(&mut rng, family, &language, shape)).collect()
}
