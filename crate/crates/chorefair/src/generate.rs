//! Seeded random instances.
//!
//! Every agent draws from its own ChaCha8 stream: the generator is seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and agent `i` uses stream `i + 1`. The same family, size,
//! seed and parameters therefore give the same instance on every platform, and adding an agent
//! leaves the others unchanged.

use std::fmt;
use std::str::FromStr;

use chorefair_core::{Cost, CostFunction, FunctionClass, Instance, ItemSet, Metadata};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest `m` accepted for random tables.
pub const MAX_TABLE_ITEMS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    BinaryAdditive,
    CappedAdditive,
    Cardinality,
    PartitionMatroid,
    Threshold,
    Table,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::BinaryAdditive,
        Family::CappedAdditive,
        Family::Cardinality,
        Family::PartitionMatroid,
        Family::Threshold,
        Family::Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::BinaryAdditive => "binary_additive",
            Family::CappedAdditive => "capped_additive",
            Family::Cardinality => "cardinality",
            Family::PartitionMatroid => "partition_matroid",
            Family::Threshold => "threshold",
            Family::Table => "table",
        }
    }

    /// Strongest class every instance of the family is guaranteed to have.
    pub fn class(self) -> FunctionClass {
        match self {
            Family::BinaryAdditive => FunctionClass::Additive,
            Family::CappedAdditive | Family::Cardinality => FunctionClass::Cancelable,
            Family::PartitionMatroid => FunctionClass::Submodular,
            Family::Threshold | Family::Table => FunctionClass::General,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.replace('-', "_"))
            .ok_or_else(|| format!("unknown family {s:?}; expected one of binary_additive, capped_additive, cardinality, partition_matroid, threshold, table"))
    }
}

/// Family parameters. Unset values are drawn per agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    /// Probability that an item costs one (additive families).
    pub p_one: f64,
    /// Cap for `capped_additive` and `cardinality`.
    pub cap: Option<Cost>,
    /// Offset for `threshold`.
    pub k: Option<Cost>,
    /// Number of groups for `partition_matroid`.
    pub groups: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { p_one: 0.5, cap: None, k: None, groups: 3 }
    }
}

fn agent_rng(seed: u64, agent: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent as u64 + 1);
    rng
}

fn bernoulli_costs(rng: &mut ChaCha8Rng, m: usize, p: f64) -> Vec<Cost> {
    (0..m).map(|_| Cost::from(rng.random_bool(p))).collect()
}

fn up_to(rng: &mut ChaCha8Rng, max: usize) -> Cost {
    rng.random_range(0..=max as u32)
}

/// A monotone table with binary marginals: each value lies between the largest value of a
/// one-smaller subset and one more than the smallest, and is drawn uniformly when both are
/// possible.
pub fn random_table(rng: &mut impl Rng, m: usize) -> Vec<Cost> {
    let mut values = vec![0; 1 << m];
    for s in 1..values.len() {
        let set = ItemSet::from_bits(s as u64);
        let (mut lo, mut hi) = (0, Cost::MAX);
        for e in set.iter() {
            let below = values[set.without(e).bits() as usize];
            lo = lo.max(below);
            hi = hi.min(below + 1);
        }
        values[s] = if lo < hi && rng.random_bool(0.5) { hi } else { lo };
    }
    values
}

fn generate_agent(family: Family, m: usize, rng: &mut ChaCha8Rng, p: &Params) -> Result<CostFunction> {
    let f = match family {
        Family::BinaryAdditive => CostFunction::additive(&bernoulli_costs(rng, m, p.p_one))?,
        Family::CappedAdditive => {
            let costs = bernoulli_costs(rng, m, p.p_one);
            let cap = p.cap.unwrap_or_else(|| up_to(rng, m));
            CostFunction::capped_additive(&costs, cap)?
        }
        Family::Cardinality => CostFunction::cardinality(m, p.cap.unwrap_or_else(|| up_to(rng, m)))?,
        Family::PartitionMatroid => {
            let label: Vec<usize> = (0..m).map(|_| rng.random_range(0..p.groups as u32) as usize).collect();
            let groups: Vec<Vec<usize>> = (0..p.groups).map(|g| (0..m).filter(|&e| label[e] == g).collect()).collect();
            let capacities: Vec<Cost> = groups.iter().map(|g| up_to(rng, g.len())).collect();
            CostFunction::partition_matroid(m, &groups, &capacities)?
        }
        Family::Threshold => CostFunction::threshold(m, p.k.unwrap_or_else(|| up_to(rng, m)))?,
        Family::Table => CostFunction::table(m, random_table(rng, m))?,
    };
    Ok(f)
}

/// A random instance of `family` with `n` agents and `m` items, declared in the family's class.
pub fn generate(family: Family, n: usize, m: usize, seed: u64, params: &Params) -> Result<Instance> {
    let bad = |msg: String| Error::Core(chorefair_core::Error::InvalidInput(msg));
    if n == 0 {
        return Err(bad("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&params.p_one) {
        return Err(bad(format!("p_one = {} is not a probability", params.p_one)));
    }
    if family == Family::PartitionMatroid && params.groups == 0 {
        return Err(bad("partition_matroid needs at least one group".into()));
    }
    if family == Family::Table && m > MAX_TABLE_ITEMS {
        return Err(bad(format!("random tables are limited to m <= {MAX_TABLE_ITEMS}")));
    }
    let agents =
        (0..n).map(|i| generate_agent(family, m, &mut agent_rng(seed, i), params)).collect::<Result<Vec<_>>>()?;
    let inst = Instance::new(m, agents, family.class())?;
    Ok(inst.with_metadata(Metadata { name: Some(family.name().to_string()), seed: Some(seed), item_labels: None }))
}
