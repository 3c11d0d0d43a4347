use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::instance::Instance;
use crate::itemset::ItemSet;

/// `n` pairwise disjoint bundles plus the pool of items nobody holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    m: usize,
    bundles: Vec<ItemSet>,
    unallocated: ItemSet,
}

impl Allocation {
    /// `n` empty bundles; every item is unallocated.
    pub fn empty(n: usize, m: usize) -> Self {
        Allocation { m, bundles: vec![ItemSet::EMPTY; n], unallocated: ItemSet::full(m) }
    }

    /// Items not in any bundle become unallocated.
    pub fn new(m: usize, bundles: Vec<ItemSet>) -> Result<Self> {
        let all = ItemSet::full(m);
        let mut seen = ItemSet::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if let Some(e) = b.difference(all).first() {
                return Err(invalid!("bundle {i} holds item {e}, but m = {m}"));
            }
            if let Some(e) = b.intersection(seen).first() {
                return Err(invalid!("item {e} appears in more than one bundle"));
            }
            seen = seen.union(*b);
        }
        Ok(Allocation { m, bundles, unallocated: all.difference(seen) })
    }

    /// Like [`new`](Self::new), but the caller also names the unallocated pool, which must
    /// account for exactly the items outside the bundles.
    pub fn with_unallocated(m: usize, bundles: Vec<ItemSet>, unallocated: ItemSet) -> Result<Self> {
        let a = Self::new(m, bundles)?;
        if a.unallocated != unallocated {
            return Err(invalid!(
                "unallocated pool {unallocated:?} does not match the items outside all bundles {:?}",
                a.unallocated
            ));
        }
        Ok(a)
    }

    /// `assignment[e]` is the agent receiving item `e`.
    pub fn from_assignment(n: usize, assignment: &[usize]) -> Result<Self> {
        let mut bundles = vec![ItemSet::EMPTY; n];
        for (e, &i) in assignment.iter().enumerate() {
            if i >= n {
                return Err(invalid!("item {e} assigned to agent {i}, but n = {n}"));
            }
            bundles[i].insert(e);
        }
        Self::new(assignment.len(), bundles)
    }

    pub(crate) fn from_parts(m: usize, bundles: Vec<ItemSet>, unallocated: ItemSet) -> Self {
        debug_assert!(Self::with_unallocated(m, bundles.clone(), unallocated).is_ok());
        Allocation { m, bundles, unallocated }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    pub fn bundle(&self, i: usize) -> ItemSet {
        self.bundles[i]
    }

    pub fn unallocated(&self) -> ItemSet {
        self.unallocated
    }

    pub fn is_complete(&self) -> bool {
        self.unallocated.is_empty()
    }

    /// Agent holding each item, or `None` if some item is unallocated.
    pub fn to_assignment(&self) -> Option<Vec<usize>> {
        if !self.is_complete() {
            return None;
        }
        let mut out = vec![0; self.m];
        for (i, b) in self.bundles.iter().enumerate() {
            for e in b.iter() {
                out[e] = i;
            }
        }
        Some(out)
    }

    /// Ensures the allocation has the instance's agent and item counts.
    pub fn check_against(&self, inst: &Instance) -> Result<()> {
        if self.n() != inst.n() || self.m != inst.m() {
            return Err(invalid!(
                "allocation has {} bundles over {} items; instance has {} agents and {} items",
                self.n(),
                self.m,
                inst.n(),
                inst.m()
            ));
        }
        Ok(())
    }
}
