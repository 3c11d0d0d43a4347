//! Small named instances that pin down the known counterexamples.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{Cost, CostFunction, FunctionClass};
use crate::error::{invalid, Result};
use crate::instance::{Instance, Metadata};
use crate::itemset::ItemSet;

pub const NAMES: [&str; 4] =
    ["ternary-no-efxpo", "cancelable-cap5-n2", "appendixA-submodular-4", "appendixA-cap5-function"];

pub fn builtin(name: &str) -> Result<Instance> {
    let inst = match name {
        "ternary-no-efxpo" => ternary_no_efx_po(),
        "cancelable-cap5-n2" => cap5_instance(2),
        "appendixA-submodular-4" => single_agent(submodular_not_cancelable(), FunctionClass::Submodular),
        "appendixA-cap5-function" => single_agent(cap5_function(8), FunctionClass::Cancelable),
        _ => return Err(invalid!("unknown builtin {name:?}; expected one of {NAMES:?}")),
    };
    Ok(inst.with_metadata(Metadata { name: Some(name.to_string()), ..Metadata::default() }))
}

fn single_agent(f: CostFunction, class: FunctionClass) -> Instance {
    Instance::new(f.m(), vec![f], class).expect("builtin instance is well formed")
}

/// Two agents, three items, additive costs in {0, 1, 2}:
///
/// | agent | e1 | e2 | e3 |
/// |-------|----|----|----|
/// | 1     | 2  | 1  | 0  |
/// | 2     | 2  | 0  | 1  |
///
/// No allocation is both EFX and Pareto-optimal.
pub fn ternary_no_efx_po() -> Instance {
    let rows: [[Cost; 3]; 2] = [[2, 1, 0], [2, 0, 1]];
    let agents = rows
        .iter()
        .map(|row| {
            let values = (0..8u64).map(|bits| ItemSet::from_bits(bits).iter().map(|e| row[e]).sum()).collect();
            CostFunction::monotone_table(3, values).expect("monotone")
        })
        .collect();
    Instance::new(3, agents, FunctionClass::General).expect("well formed")
}

/// `min(|S|, 5)` over `m` items: cancelable with binary marginals, not additive.
pub fn cap5_function(m: usize) -> CostFunction {
    CostFunction::cardinality(m, 5).expect("m within limits")
}

/// `n` agents sharing the capped function over `5n` items. Every EFX allocation hands each
/// agent exactly five items and is Pareto-dominated by giving everything to one agent.
pub fn cap5_instance(n: usize) -> Instance {
    let m = 5 * n;
    let agents: Vec<_> = (0..n).map(|_| cap5_function(m)).collect();
    Instance::new(m, agents, FunctionClass::Cancelable).expect("well formed")
}

/// On items `a, b, c, d = 0, 1, 2, 3`: `|X| - 1` if `{a, b, c} ⊆ X`, else `|X|`.
/// Submodular with binary marginals but not cancelable.
pub fn submodular_not_cancelable() -> CostFunction {
    let abc = ItemSet::from([0, 1, 2]);
    CostFunction::tabulate(4, |x| x.len() as Cost - abc.is_subset(x) as Cost).expect("valid table")
}
