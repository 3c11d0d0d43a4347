use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{CostFunction, Descriptor, FunctionClass, SetFunction};
use crate::error::{invalid, Result};
use crate::itemset::ItemSet;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub name: Option<String>,
    pub seed: Option<u64>,
    /// Optional human-readable item labels; never used by the algorithms.
    pub item_labels: Option<Vec<String>>,
}

/// `n` agents, `m` items, one cost function per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    agents: Vec<CostFunction>,
    declared_class: FunctionClass,
    metadata: Metadata,
}

impl Instance {
    /// Checks that every agent is defined on `m` items and that `declared_class` does not
    /// promise more than the descriptor kinds can deliver. Tables may be declared in any
    /// class; solvers verify them before use.
    pub fn new(m: usize, agents: Vec<CostFunction>, declared_class: FunctionClass) -> Result<Self> {
        if agents.is_empty() {
            return Err(invalid!("an instance needs at least one agent"));
        }
        for (i, a) in agents.iter().enumerate() {
            if a.m() != m {
                return Err(invalid!("agent {i} is defined on {} items, instance has {m}", a.m()));
            }
            match (a.descriptor(), a.guaranteed_class()) {
                (_, None) if declared_class != FunctionClass::General => {
                    return Err(invalid!(
                        "agent {i} does not have binary marginals; only class \"general\" may hold it"
                    ));
                }
                (Descriptor::Table { .. }, _) | (_, None) => {}
                (_, Some(kind)) if kind < declared_class => {
                    return Err(invalid!(
                        "agent {i} is {}, which is only guaranteed {}; declared class is {}",
                        a.kind_name(),
                        kind.name(),
                        declared_class.name()
                    ));
                }
                _ => {}
            }
        }
        Ok(Instance { m, agents, declared_class, metadata: Metadata::default() })
    }

    #[must_use]
    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn items(&self) -> ItemSet {
        ItemSet::full(self.m)
    }

    pub fn agents(&self) -> &[CostFunction] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &CostFunction {
        &self.agents[i]
    }

    pub fn declared_class(&self) -> FunctionClass {
        self.declared_class
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    /// Cost of `s` to agent `i`, unchecked.
    #[inline]
    pub fn cost(&self, i: usize, s: ItemSet) -> crate::Cost {
        self.agents[i].cost(s)
    }
}
