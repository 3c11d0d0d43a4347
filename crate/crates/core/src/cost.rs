//! Cost functions with binary marginals.
//!
//! Every agent's cost function is a [`CostFunction`]: a ground-set size `m` plus one
//! [`Descriptor`] from a small closed catalog. Anything that can be evaluated on item
//! sets implements [`SetFunction`], which is what the checkers and solvers are written
//! against, so residual views compose with the same code paths.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::itemset::{ItemSet, MAX_ITEMS};

/// Bundle cost. All quantities in this crate are integral.
pub type Cost = u32;

/// Largest ground set a [`Descriptor::Table`] may cover.
pub const MAX_TABLE_ITEMS: usize = 20;

/// A monotone set function over items `0..num_items()`.
pub trait SetFunction {
    fn num_items(&self) -> usize;

    /// Items the function may be queried on.
    fn domain(&self) -> ItemSet {
        ItemSet::full(self.num_items())
    }

    /// Unchecked evaluation; `s` must be a subset of [`domain`](Self::domain).
    fn cost(&self, s: ItemSet) -> Cost;

    /// `cost(s + e) - cost(s)`, unchecked.
    #[inline]
    fn marginal_cost(&self, e: usize, s: ItemSet) -> Cost {
        self.cost(s.with(e)).saturating_sub(self.cost(s))
    }

    fn evaluate(&self, s: ItemSet) -> Result<Cost> {
        let outside = s.difference(self.domain());
        if let Some(e) = outside.first() {
            return Err(invalid!("item {e} is outside the function's domain"));
        }
        Ok(self.cost(s))
    }

    fn marginal(&self, e: usize, s: ItemSet) -> Result<Cost> {
        if s.contains(e) {
            return Err(invalid!("marginal of item {e} requested on a set that already holds it"));
        }
        if !self.domain().contains(e) {
            return Err(invalid!("item {e} is outside the function's domain"));
        }
        self.evaluate(s)?;
        Ok(self.marginal_cost(e, s))
    }
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn num_items(&self) -> usize {
        (**self).num_items()
    }
    fn domain(&self) -> ItemSet {
        (**self).domain()
    }
    #[inline]
    fn cost(&self, s: ItemSet) -> Cost {
        (**self).cost(s)
    }
}

/// Function classes, ordered from weakest to strongest guarantee.
///
/// Every class above [`General`](FunctionClass::General) implies binary marginals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FunctionClass {
    General,
    Submodular,
    Cancelable,
    Additive,
}

impl FunctionClass {
    pub const fn name(self) -> &'static str {
        match self {
            FunctionClass::General => "general",
            FunctionClass::Submodular => "submodular",
            FunctionClass::Cancelable => "cancelable",
            FunctionClass::Additive => "additive",
        }
    }
}

impl core::str::FromStr for FunctionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(FunctionClass::General),
            "submodular" => Ok(FunctionClass::Submodular),
            "cancelable" => Ok(FunctionClass::Cancelable),
            "additive" => Ok(FunctionClass::Additive),
            _ => Err(invalid!("unknown function class {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    /// `c(S) = |S ∩ ones|`.
    Additive { ones: ItemSet },
    /// `c(S) = min(|S ∩ ones|, cap)`.
    CappedAdditive { ones: ItemSet, cap: Cost },
    /// `c(S) = min(|S|, cap)`.
    Cardinality { cap: Cost },
    /// `c(S) = Σ_g min(|S ∩ group_g|, capacity_g)`.
    PartitionMatroid { groups: Vec<ItemSet>, capacities: Vec<Cost> },
    /// `c(S) = max(0, |S| - k)`.
    Threshold { k: Cost },
    /// Explicit values indexed by subset bitmask. `binary_marginal` is false only for
    /// monotone tables whose marginals exceed one (kept for counterexamples).
    Table { values: Vec<Cost>, binary_marginal: bool },
}

/// One agent's cost function over items `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFunction {
    m: usize,
    descriptor: Descriptor,
}

fn check_m(m: usize) -> Result<()> {
    if m > MAX_ITEMS {
        return Err(Error::UnsupportedSize { what: "item count", size: m as u128, limit: MAX_ITEMS as u128 });
    }
    Ok(())
}

fn ones_from_costs(costs: &[Cost]) -> Result<ItemSet> {
    check_m(costs.len())?;
    let mut ones = ItemSet::EMPTY;
    for (e, &c) in costs.iter().enumerate() {
        match c {
            0 => {}
            1 => ones.insert(e),
            _ => return Err(invalid!("item {e} has cost {c}; binary costs must be 0 or 1")),
        }
    }
    Ok(ones)
}

impl CostFunction {
    pub fn additive(costs: &[Cost]) -> Result<Self> {
        let ones = ones_from_costs(costs)?;
        Ok(CostFunction { m: costs.len(), descriptor: Descriptor::Additive { ones } })
    }

    pub fn capped_additive(costs: &[Cost], cap: Cost) -> Result<Self> {
        let ones = ones_from_costs(costs)?;
        Ok(CostFunction { m: costs.len(), descriptor: Descriptor::CappedAdditive { ones, cap } })
    }

    pub fn cardinality(m: usize, cap: Cost) -> Result<Self> {
        check_m(m)?;
        Ok(CostFunction { m, descriptor: Descriptor::Cardinality { cap } })
    }

    pub fn threshold(m: usize, k: Cost) -> Result<Self> {
        check_m(m)?;
        Ok(CostFunction { m, descriptor: Descriptor::Threshold { k } })
    }

    /// Groups must be disjoint and cover `0..m`; one capacity per group.
    pub fn partition_matroid(m: usize, groups: &[Vec<usize>], capacities: &[Cost]) -> Result<Self> {
        check_m(m)?;
        if groups.len() != capacities.len() {
            return Err(invalid!("{} groups but {} capacities", groups.len(), capacities.len()));
        }
        let mut seen = ItemSet::EMPTY;
        let mut sets = Vec::with_capacity(groups.len());
        for (g, group) in groups.iter().enumerate() {
            let mut set = ItemSet::EMPTY;
            for &e in group {
                if e >= m {
                    return Err(invalid!("group {g} holds item {e}, but m = {m}"));
                }
                if seen.contains(e) {
                    return Err(invalid!("item {e} appears in more than one group"));
                }
                seen.insert(e);
                set.insert(e);
            }
            sets.push(set);
        }
        if seen != ItemSet::full(m) {
            let missing = ItemSet::full(m).difference(seen).first().unwrap_or_default();
            return Err(invalid!("item {missing} is not covered by any group"));
        }
        Ok(CostFunction {
            m,
            descriptor: Descriptor::PartitionMatroid { groups: sets, capacities: capacities.to_vec() },
        })
    }

    /// A tabulated function with binary marginals.
    pub fn table(m: usize, values: Vec<Cost>) -> Result<Self> {
        Self::build_table(m, values, true)
    }

    /// A tabulated monotone function whose marginals may exceed one.
    pub fn monotone_table(m: usize, values: Vec<Cost>) -> Result<Self> {
        Self::build_table(m, values, false)
    }

    /// Tabulates `f` over all subsets of `0..m` and validates it as a binary-marginal table.
    pub fn tabulate(m: usize, f: impl Fn(ItemSet) -> Cost) -> Result<Self> {
        if m > MAX_TABLE_ITEMS {
            return Err(table_too_large(m));
        }
        let values = (0..1u64 << m).map(|bits| f(ItemSet::from_bits(bits))).collect();
        Self::table(m, values)
    }

    fn build_table(m: usize, values: Vec<Cost>, require_binary: bool) -> Result<Self> {
        if m > MAX_TABLE_ITEMS {
            return Err(table_too_large(m));
        }
        if values.len() != 1 << m {
            return Err(invalid!("table over {m} items needs {} values, got {}", 1u64 << m, values.len()));
        }
        if values[0] != 0 {
            return Err(invalid!("table value of the empty set is {}, must be 0", values[0]));
        }
        let mut binary = true;
        for bits in 0..values.len() {
            for e in 0..m {
                if bits >> e & 1 == 1 {
                    continue;
                }
                let (lo, hi) = (values[bits], values[bits | 1 << e]);
                if hi < lo {
                    return Err(invalid!(
                        "table is not monotone: value({:?}) = {lo} > value({:?}) = {hi}",
                        ItemSet::from_bits(bits as u64),
                        ItemSet::from_bits((bits | 1 << e) as u64)
                    ));
                }
                if hi - lo > 1 {
                    if require_binary {
                        return Err(invalid!(
                            "table marginal of item {e} on {:?} is {}, must be 0 or 1",
                            ItemSet::from_bits(bits as u64),
                            hi - lo
                        ));
                    }
                    binary = false;
                }
            }
        }
        Ok(CostFunction { m, descriptor: Descriptor::Table { values, binary_marginal: binary } })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// Strongest class the descriptor kind guarantees without inspecting values.
    /// `None` means not even binary marginals are guaranteed.
    pub fn guaranteed_class(&self) -> Option<FunctionClass> {
        match &self.descriptor {
            Descriptor::Additive { .. } => Some(FunctionClass::Additive),
            Descriptor::CappedAdditive { .. } | Descriptor::Cardinality { .. } => Some(FunctionClass::Cancelable),
            Descriptor::PartitionMatroid { .. } => Some(FunctionClass::Submodular),
            Descriptor::Threshold { .. } => Some(FunctionClass::General),
            Descriptor::Table { binary_marginal, .. } => binary_marginal.then_some(FunctionClass::General),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.descriptor {
            Descriptor::Additive { .. } => "additive",
            Descriptor::CappedAdditive { .. } => "capped_additive",
            Descriptor::Cardinality { .. } => "cardinality",
            Descriptor::PartitionMatroid { .. } => "partition_matroid",
            Descriptor::Threshold { .. } => "threshold",
            Descriptor::Table { .. } => "table",
        }
    }
}

fn table_too_large(m: usize) -> Error {
    Error::UnsupportedSize { what: "table item count", size: m as u128, limit: MAX_TABLE_ITEMS as u128 }
}

#[inline]
fn min_len(s: ItemSet, cap: Cost) -> Cost {
    (s.len() as Cost).min(cap)
}

impl SetFunction for CostFunction {
    fn num_items(&self) -> usize {
        self.m
    }

    #[inline]
    fn cost(&self, s: ItemSet) -> Cost {
        debug_assert!(s.is_subset(ItemSet::full(self.m)));
        match &self.descriptor {
            Descriptor::Additive { ones } => s.intersection(*ones).len() as Cost,
            Descriptor::CappedAdditive { ones, cap } => min_len(s.intersection(*ones), *cap),
            Descriptor::Cardinality { cap } => min_len(s, *cap),
            Descriptor::PartitionMatroid { groups, capacities } => {
                groups.iter().zip(capacities).map(|(g, &cap)| min_len(s.intersection(*g), cap)).sum()
            }
            Descriptor::Threshold { k } => (s.len() as Cost).saturating_sub(*k),
            Descriptor::Table { values, .. } => values[s.bits() as usize],
        }
    }
}

/// `d(S) = c(S ∪ A) - c(A)` on items outside the anchor set `A`.
#[derive(Clone, Debug)]
pub struct Residual<F> {
    base: F,
    anchor: ItemSet,
    anchor_cost: Cost,
}

impl<F: SetFunction> Residual<F> {
    pub fn new(base: F, anchor: ItemSet) -> Self {
        let anchor_cost = base.cost(anchor.intersection(base.domain()));
        Residual { base, anchor, anchor_cost }
    }

    pub fn anchor(&self) -> ItemSet {
        self.anchor
    }

    pub fn base(&self) -> &F {
        &self.base
    }
}

/// Residual view of `f` after its holder already owns `anchor`.
pub fn residual<F: SetFunction>(f: F, anchor: ItemSet) -> Result<Residual<F>> {
    if let Some(e) = anchor.difference(f.domain()).first() {
        return Err(invalid!("anchor item {e} is outside the function's domain"));
    }
    Ok(Residual::new(f, anchor))
}

impl<F: SetFunction> SetFunction for Residual<F> {
    fn num_items(&self) -> usize {
        self.base.num_items()
    }

    fn domain(&self) -> ItemSet {
        self.base.domain().difference(self.anchor)
    }

    #[inline]
    fn cost(&self, s: ItemSet) -> Cost {
        self.base.cost(s.union(self.anchor)) - self.anchor_cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn closed_forms() {
        let card = CostFunction::cardinality(8, 5).unwrap();
        assert_eq!(card.evaluate(ItemSet::full(7)).unwrap(), 5);
        assert_eq!(card.evaluate(ItemSet::EMPTY).unwrap(), 0);
        assert_eq!(card.marginal(5, ItemSet::full(5)).unwrap(), 0);

        let thr = CostFunction::threshold(3, 1).unwrap();
        assert_eq!(thr.marginal(2, ItemSet::from([0])).unwrap(), 1);
        assert_eq!(thr.evaluate(ItemSet::from([0])).unwrap(), 0);

        let add = CostFunction::additive(&[1, 0, 1]).unwrap();
        for e in 0..3 {
            assert_eq!(add.marginal(e, ItemSet::EMPTY).unwrap(), [1, 0, 1][e]);
        }

        let pm = CostFunction::partition_matroid(4, &[vec![0, 2], vec![1, 3]], &[1, 2]).unwrap();
        assert_eq!(pm.cost(ItemSet::full(4)), 3);
        assert_eq!(pm.cost(ItemSet::from([0, 2])), 1);
    }

    #[test]
    fn range_and_membership_errors() {
        let card = CostFunction::cardinality(4, 2).unwrap();
        assert!(matches!(card.evaluate(ItemSet::from([4])), Err(Error::InvalidInput(_))));
        assert!(matches!(card.marginal(1, ItemSet::from([1])), Err(Error::InvalidInput(_))));
        assert!(CostFunction::additive(&[0, 2]).is_err());
        assert!(CostFunction::partition_matroid(3, &[vec![0, 1], vec![1, 2]], &[1, 1]).is_err());
        assert!(CostFunction::partition_matroid(3, &[vec![0, 1]], &[1]).is_err());
        assert!(CostFunction::cardinality(64, 1).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(CostFunction::table(1, vec![1, 1]).is_err());
        assert!(CostFunction::table(2, vec![0, 1, 1]).is_err());
        assert!(CostFunction::table(1, vec![0, 2]).is_err());
        let t = CostFunction::monotone_table(1, vec![0, 2]).unwrap();
        assert_eq!(t.guaranteed_class(), None);
        assert!(CostFunction::table(2, vec![0, 1, 1, 0]).is_err());
        assert!(CostFunction::table(21, vec![]).is_err());
    }

    #[test]
    fn residual_of_cardinality() {
        let card = CostFunction::cardinality(10, 5).unwrap();
        let anchor = ItemSet::from([0, 1, 2, 3]);
        let d = residual(&card, anchor).unwrap();
        assert_eq!(d.evaluate(ItemSet::from([4])).unwrap(), 1);
        assert_eq!(d.evaluate(ItemSet::from([4, 5])).unwrap(), 1);
        assert!(d.evaluate(ItemSet::from([3, 4])).is_err());
        assert_eq!(d.domain(), ItemSet::full(10).difference(anchor));

        let d0 = residual(&card, ItemSet::EMPTY).unwrap();
        for s in ItemSet::full(10).subsets() {
            assert_eq!(d0.cost(s), card.cost(s));
        }
    }
}
