//! JSON files for instances and allocations.
//!
//! ```json
//! {"n": 2, "m": 3, "declared_class": "additive",
//!  "agents": [{"type": "additive", "costs": [1, 1, 0]}, {"type": "cardinality", "cap": 2}],
//!  "metadata": {"name": "example", "seed": 42}}
//! ```
//!
//! Descriptor kinds: `additive {costs}`, `capped_additive {costs, cap}`, `cardinality {cap}`,
//! `partition_matroid {groups, capacities}`, `threshold {k}` and `table {m, values}`, where
//! `values[s]` is the cost of the subset with bitmask `s`. A table holding marginals above one
//! must say `"binary_marginal": false` and can only appear in a `general` instance.

use std::fs;
use std::path::Path;

use chorefair_core::{Allocation, Cost, CostFunction, Descriptor, FunctionClass, Instance, ItemSet, Metadata};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    m: usize,
    declared_class: FunctionClass,
    agents: Vec<DescriptorFile>,
    #[serde(default, skip_serializing_if = "MetadataFile::is_empty")]
    metadata: MetadataFile,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    item_labels: Option<Vec<String>>,
}

impl MetadataFile {
    fn is_empty(&self) -> bool {
        self.name.is_none() && self.seed.is_none() && self.item_labels.is_none()
    }
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum DescriptorFile {
    Additive {
        costs: Vec<Cost>,
    },
    CappedAdditive {
        costs: Vec<Cost>,
        cap: Cost,
    },
    Cardinality {
        cap: Cost,
    },
    #[serde(alias = "partition_matroid_rank")]
    PartitionMatroid {
        groups: Vec<Vec<usize>>,
        capacities: Vec<Cost>,
    },
    Threshold {
        k: Cost,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        values: Vec<Cost>,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        binary_marginal: bool,
    },
}

fn ones_to_costs(ones: ItemSet, m: usize) -> Vec<Cost> {
    (0..m).map(|e| Cost::from(ones.contains(e))).collect()
}

impl DescriptorFile {
    fn from_function(f: &CostFunction) -> Self {
        let m = f.m();
        match f.descriptor() {
            Descriptor::Additive { ones } => DescriptorFile::Additive { costs: ones_to_costs(*ones, m) },
            Descriptor::CappedAdditive { ones, cap } => {
                DescriptorFile::CappedAdditive { costs: ones_to_costs(*ones, m), cap: *cap }
            }
            Descriptor::Cardinality { cap } => DescriptorFile::Cardinality { cap: *cap },
            Descriptor::PartitionMatroid { groups, capacities } => DescriptorFile::PartitionMatroid {
                groups: groups.iter().map(|g| g.iter().collect()).collect(),
                capacities: capacities.clone(),
            },
            Descriptor::Threshold { k } => DescriptorFile::Threshold { k: *k },
            Descriptor::Table { values, binary_marginal } => {
                DescriptorFile::Table { m: Some(m), values: values.clone(), binary_marginal: *binary_marginal }
            }
        }
    }

    fn into_function(self, m: usize) -> chorefair_core::Result<CostFunction> {
        let check_len = |costs: &[Cost]| {
            if costs.len() == m {
                Ok(())
            } else {
                Err(chorefair_core::Error::InvalidInput(format!("{} costs listed for m = {m} items", costs.len())))
            }
        };
        match self {
            DescriptorFile::Additive { costs } => {
                check_len(&costs)?;
                CostFunction::additive(&costs)
            }
            DescriptorFile::CappedAdditive { costs, cap } => {
                check_len(&costs)?;
                CostFunction::capped_additive(&costs, cap)
            }
            DescriptorFile::Cardinality { cap } => CostFunction::cardinality(m, cap),
            DescriptorFile::PartitionMatroid { groups, capacities } => {
                CostFunction::partition_matroid(m, &groups, &capacities)
            }
            DescriptorFile::Threshold { k } => CostFunction::threshold(m, k),
            DescriptorFile::Table { m: Some(tm), .. } if tm != m => {
                Err(chorefair_core::Error::InvalidInput(format!("table declares m = {tm}, instance has m = {m}")))
            }
            DescriptorFile::Table { values, binary_marginal: true, .. } => CostFunction::table(m, values),
            DescriptorFile::Table { values, binary_marginal: false, .. } => CostFunction::monotone_table(m, values),
        }
    }
}

fn json_location(e: &serde_json::Error) -> String {
    format!("line {}, column {}", e.line(), e.column())
}

/// Parses and validates an instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_slice(bytes).map_err(|e| Error::parse(json_location(&e), e))?;
    if file.agents.len() != file.n {
        return Err(Error::parse("n", format!("n = {} but {} agents are listed", file.n, file.agents.len())));
    }
    let m = file.m;
    let agents = file
        .agents
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.into_function(m).map_err(|e| Error::parse(format!("agents[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(labels) = &file.metadata.item_labels {
        if labels.len() != m {
            return Err(Error::parse("metadata.item_labels", format!("{} labels for {m} items", labels.len())));
        }
    }
    let inst = Instance::new(m, agents, file.declared_class).map_err(|e| Error::parse("declared_class", e))?;
    Ok(inst.with_metadata(Metadata {
        name: file.metadata.name,
        seed: file.metadata.seed,
        item_labels: file.metadata.item_labels,
    }))
}

/// Pretty-printed JSON; identical instances give identical bytes.
pub fn instance_to_json(inst: &Instance) -> String {
    let meta = inst.metadata();
    let file = InstanceFile {
        n: inst.n(),
        m: inst.m(),
        declared_class: inst.declared_class(),
        agents: inst.agents().iter().map(DescriptorFile::from_function).collect(),
        metadata: MetadataFile { name: meta.name.clone(), seed: meta.seed, item_labels: meta.item_labels.clone() },
    };
    let mut out = serde_json::to_string_pretty(&file).expect("instance files always serialize");
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocationFile {
    bundles: Vec<Vec<usize>>,
    #[serde(default)]
    unallocated: Option<Vec<usize>>,
}

/// Parses an allocation for `inst`. Items missing from every bundle are unallocated; if the file
/// lists `unallocated`, it must name exactly those.
pub fn parse_allocation(bytes: &[u8], inst: &Instance) -> Result<Allocation> {
    let file: AllocationFile = serde_json::from_slice(bytes).map_err(|e| Error::parse(json_location(&e), e))?;
    if file.bundles.len() != inst.n() {
        return Err(Error::parse("bundles", format!("{} bundles for {} agents", file.bundles.len(), inst.n())));
    }
    let to_set = |items: &[usize], at: String| -> Result<ItemSet> {
        let mut s = ItemSet::EMPTY;
        for &e in items {
            if e >= inst.m() {
                return Err(Error::parse(at, format!("item {e} out of range for m = {}", inst.m())));
            }
            if s.contains(e) {
                return Err(Error::parse(at, format!("item {e} listed twice")));
            }
            s.insert(e);
        }
        Ok(s)
    };
    let bundles =
        file.bundles.iter().enumerate().map(|(i, b)| to_set(b, format!("bundles[{i}]"))).collect::<Result<Vec<_>>>()?;
    let result = match &file.unallocated {
        Some(u) => Allocation::with_unallocated(inst.m(), bundles, to_set(u, "unallocated".into())?),
        None => Allocation::new(inst.m(), bundles),
    };
    result.map_err(|e| Error::parse("bundles", e))
}

pub fn allocation_to_json(x: &Allocation) -> String {
    let mut out = serde_json::to_string(x).expect("allocations always serialize");
    out.push('\n');
    out
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_file(path)?).map_err(|e| match e {
        Error::Parse { location, message } => {
            Error::Parse { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}
