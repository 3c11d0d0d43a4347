//! Exhaustive search over complete allocations of small instances.
//!
//! Allocations are visited in lexicographic order of the assignment vector, item 0 being the
//! most significant position. Work can be split by fixing a prefix of that vector; partial
//! reports from consecutive prefixes merge into the same result a single pass would give.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::allocation::Allocation;
use crate::cost::{Cost, SetFunction};
use crate::error::{invalid, Error, Result};
use crate::fairness::{allocation_count, is_efx_wrt, PO_ENUMERATION_LIMIT};
use crate::instance::Instance;
use crate::itemset::ItemSet;

/// Default bound on `n^m`.
pub const ENUMERATION_LIMIT: u128 = PO_ENUMERATION_LIMIT;
/// No configured limit may exceed this.
pub const ENUMERATION_HARD_CAP: u128 = 100_000_000;
/// Default number of allocations kept per listed category.
pub const DEFAULT_LIST_LIMIT: usize = 10_000;

fn check_size(n: usize, m: usize, limit: u128) -> Result<u128> {
    if limit > ENUMERATION_HARD_CAP {
        return Err(invalid!("enumeration limit {limit} exceeds the hard cap {ENUMERATION_HARD_CAP}"));
    }
    let total = allocation_count(n, m);
    if total > limit {
        return Err(Error::UnsupportedSize { what: "allocation count n^m", size: total, limit });
    }
    Ok(total)
}

fn check_prefix(n: usize, m: usize, prefix: &[usize]) -> Result<()> {
    if prefix.len() > m {
        return Err(invalid!("prefix of length {} is longer than m = {m}", prefix.len()));
    }
    if let Some(&a) = prefix.iter().find(|&&a| a >= n) {
        return Err(invalid!("prefix names agent {a}, but n = {n}"));
    }
    Ok(())
}

/// Calls `visit` with the bundles of every complete allocation, in lexicographic order, until
/// it breaks. Returns the number of allocations visited.
pub fn enumerate_allocations(
    inst: &Instance,
    limit: u128,
    visit: impl FnMut(&[ItemSet]) -> ControlFlow<()>,
) -> Result<u128> {
    enumerate_with_prefix(inst, &[], limit, visit)
}

/// As [`enumerate_allocations`], restricted to assignments starting with `prefix`.
pub fn enumerate_with_prefix(
    inst: &Instance,
    prefix: &[usize],
    limit: u128,
    mut visit: impl FnMut(&[ItemSet]) -> ControlFlow<()>,
) -> Result<u128> {
    let (n, m) = (inst.n(), inst.m());
    check_size(n, m, limit)?;
    check_prefix(n, m, prefix)?;
    let mut bundles = vec![ItemSet::EMPTY; n];
    for (e, &a) in prefix.iter().enumerate() {
        bundles[a].insert(e);
    }
    let mut count = 0;
    let _ = walk(n, m, prefix.len(), &mut bundles, &mut count, &mut visit);
    Ok(count)
}

fn walk(
    n: usize,
    m: usize,
    item: usize,
    bundles: &mut [ItemSet],
    count: &mut u128,
    visit: &mut impl FnMut(&[ItemSet]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if item == m {
        *count += 1;
        return visit(bundles);
    }
    for a in 0..n {
        bundles[a].insert(item);
        let flow = walk(n, m, item + 1, bundles, count, visit);
        bundles[a].remove(item);
        flow?;
    }
    ControlFlow::Continue(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Bound on `n^m`.
    pub limit: u128,
    /// Most allocations kept in the EFX list and per frontier cost vector.
    pub list_limit: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { limit: ENUMERATION_LIMIT, list_limit: DEFAULT_LIST_LIMIT }
    }
}

/// A cost vector on the Pareto frontier.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FrontierPoint {
    pub costs: Vec<Cost>,
    /// Allocations attaining it.
    pub count: u64,
    /// Whether one of them is EFX.
    pub any_efx: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnumerationReport {
    pub n: usize,
    pub m: usize,
    pub total_allocations: u128,
    pub min_social_cost: Cost,
    pub efx_count: u64,
    /// The first `list_limit` EFX allocations in enumeration order.
    pub efx_allocations: Vec<Allocation>,
    /// Pareto-optimal allocations in enumeration order, at most `list_limit` per cost vector.
    pub pareto_frontier: Vec<Allocation>,
    /// Distinct non-dominated cost vectors, sorted.
    pub frontier_costs: Vec<FrontierPoint>,
    pub efx_and_po_exists: bool,
    /// Some list was cut at `list_limit`.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
struct Entry {
    costs: Vec<Cost>,
    count: u64,
    any_efx: bool,
    members: Vec<Vec<ItemSet>>,
}

/// Result of enumerating one prefix. Merge partial reports of consecutive prefixes in order.
#[derive(Clone, Debug)]
pub struct PartialReport {
    n: usize,
    m: usize,
    list_limit: usize,
    visited: u128,
    min_social_cost: Option<Cost>,
    efx_count: u64,
    efx: Vec<Vec<ItemSet>>,
    frontier: Vec<Entry>,
    truncated: bool,
}

fn dominates(a: &[Cost], b: &[Cost]) -> bool {
    a != b && a.iter().zip(b).all(|(x, y)| x <= y)
}

impl PartialReport {
    fn empty(n: usize, m: usize, list_limit: usize) -> Self {
        PartialReport {
            n,
            m,
            list_limit,
            visited: 0,
            min_social_cost: None,
            efx_count: 0,
            efx: Vec::new(),
            frontier: Vec::new(),
            truncated: false,
        }
    }

    fn offer(&mut self, entry: Entry) {
        if let Some(same) = self.frontier.iter_mut().find(|f| f.costs == entry.costs) {
            same.count += entry.count;
            same.any_efx |= entry.any_efx;
            let room = self.list_limit.saturating_sub(same.members.len());
            if entry.members.len() > room {
                self.truncated = true;
            }
            same.members.extend(entry.members.into_iter().take(room));
            return;
        }
        if self.frontier.iter().any(|f| dominates(&f.costs, &entry.costs)) {
            return;
        }
        self.frontier.retain(|f| !dominates(&entry.costs, &f.costs));
        self.frontier.push(entry);
    }

    /// Appends the results of the next prefix.
    pub fn merge(&mut self, other: PartialReport) {
        self.visited += other.visited;
        self.min_social_cost = match (self.min_social_cost, other.min_social_cost) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.efx_count += other.efx_count;
        let room = self.list_limit.saturating_sub(self.efx.len());
        if other.efx.len() > room {
            self.truncated = true;
        }
        self.efx.extend(other.efx.into_iter().take(room));
        self.truncated |= other.truncated;
        for entry in other.frontier {
            self.offer(entry);
        }
    }

    pub fn visited(&self) -> u128 {
        self.visited
    }

    pub fn finish(mut self) -> EnumerationReport {
        let m = self.m;
        let build = |b: Vec<ItemSet>| Allocation::from_parts(m, b, ItemSet::EMPTY);
        self.frontier.sort_by(|a, b| a.costs.cmp(&b.costs));
        let efx_and_po_exists = self.frontier.iter().any(|f| f.any_efx);
        let frontier_costs = self
            .frontier
            .iter()
            .map(|f| FrontierPoint { costs: f.costs.clone(), count: f.count, any_efx: f.any_efx })
            .collect();
        let mut members: Vec<(Vec<usize>, Vec<ItemSet>)> =
            self.frontier.into_iter().flat_map(|f| f.members).map(|b| (assignment_key(&b, m), b)).collect();
        members.sort();
        EnumerationReport {
            n: self.n,
            m,
            total_allocations: self.visited,
            min_social_cost: self.min_social_cost.unwrap_or(0),
            efx_count: self.efx_count,
            efx_allocations: self.efx.into_iter().map(build).collect(),
            pareto_frontier: members.into_iter().map(|(_, b)| build(b)).collect(),
            frontier_costs,
            efx_and_po_exists,
            truncated: self.truncated,
        }
    }
}

fn assignment_key(bundles: &[ItemSet], m: usize) -> Vec<usize> {
    (0..m).map(|e| bundles.iter().position(|b| b.contains(e)).unwrap_or(usize::MAX)).collect()
}

/// Enumerates the allocations starting with `prefix`.
pub fn analyze_prefix(inst: &Instance, prefix: &[usize], opts: &AnalyzeOptions) -> Result<PartialReport> {
    let (n, m) = (inst.n(), inst.m());
    let fns = inst.agents();
    let mut report = PartialReport::empty(n, m, opts.list_limit);
    let mut costs = vec![0; n];
    report.visited = enumerate_with_prefix(inst, prefix, opts.limit, |bundles| {
        for (i, f) in fns.iter().enumerate() {
            costs[i] = f.cost(bundles[i]);
        }
        let sc: Cost = costs.iter().sum();
        report.min_social_cost = Some(report.min_social_cost.map_or(sc, |c| c.min(sc)));
        let efx = is_efx_wrt(fns, bundles);
        if efx {
            report.efx_count += 1;
            if report.efx.len() < report.list_limit {
                report.efx.push(bundles.to_vec());
            } else {
                report.truncated = true;
            }
        }
        if !report.frontier.iter().any(|f| dominates(&f.costs, &costs)) {
            let members = if report.list_limit > 0 { vec![bundles.to_vec()] } else { Vec::new() };
            report.offer(Entry { costs: costs.clone(), count: 1, any_efx: efx, members });
        }
        ControlFlow::Continue(())
    })?;
    Ok(report)
}

/// Full enumeration report.
pub fn analyze(inst: &Instance, opts: &AnalyzeOptions) -> Result<EnumerationReport> {
    Ok(analyze_prefix(inst, &[], opts)?.finish())
}

/// The lexicographically first complete EFX allocation, if any.
pub fn efx_exists_search(inst: &Instance, limit: u128) -> Result<Option<Allocation>> {
    let mut found = None;
    enumerate_allocations(inst, limit, |bundles| {
        if is_efx_wrt(inst.agents(), bundles) {
            found = Some(bundles.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found.map(|b| Allocation::from_parts(inst.m(), b, ItemSet::EMPTY)))
}
