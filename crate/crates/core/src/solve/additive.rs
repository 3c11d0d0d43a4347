//! EFX and Pareto-optimal allocation for binary additive costs.
//!
//! Phase 1 hands every item that is free for somebody to such an agent, so the partial
//! allocation has social cost zero. Phase 2 places the items that cost one to everybody,
//! each time to a currently cheapest agent; if that breaks EFX towards some `j`, the item goes
//! to `j` instead and `j` hands over everything the first agent considers free.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use super::{finish, verify_class, Algorithm, Counted, GuaranteeTag, Recorder, SolveOptions, SolveReport, TraceEvent};
use crate::allocation::Allocation;
use crate::cost::{FunctionClass, SetFunction};
use crate::error::{invariant, Result};
#[cfg(debug_assertions)]
use crate::fairness::is_efx_wrt;
use crate::instance::Instance;
use crate::itemset::ItemSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ItemPartition {
    /// Items some agent values at zero.
    pub m_zero: ItemSet,
    /// Items every agent values at one.
    pub m_plus: ItemSet,
}

/// Splits items into those free for some agent and those costly for everyone.
pub fn partition_items(inst: &Instance) -> Result<ItemPartition> {
    verify_class(inst, FunctionClass::Additive)?;
    Ok(partition_of(inst.agents(), inst.m()))
}

fn partition_of<F: SetFunction>(fns: &[F], m: usize) -> ItemPartition {
    let m_plus: ItemSet = (0..m).filter(|&e| fns.iter().all(|f| f.cost(ItemSet::singleton(e)) == 1)).collect();
    ItemPartition { m_zero: ItemSet::full(m).difference(m_plus), m_plus }
}

pub fn solve_additive(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    verify_class(inst, FunctionClass::Additive)?;
    let (n, m) = (inst.n(), inst.m());
    let evals = Cell::new(0);
    let c = Counted::wrap(inst.agents(), &evals);
    let mut rec = Recorder::new(opts);

    let part = partition_of(&c, m);
    let mut x = vec![ItemSet::EMPTY; n];

    for e in part.m_zero.iter() {
        let i = (0..n).find(|&i| c[i].cost(ItemSet::singleton(e)) == 0).expect("items outside M+ are free for someone");
        x[i].insert(e);
        rec.counters.item_moves += 1;
        rec.event(|| TraceEvent::ZeroCostAssign { agent: i, item: e });
    }

    let mut pool = part.m_plus;
    let mut round = 0;
    while let Some(e) = pool.first() {
        round += 1;
        let own: Vec<_> = (0..n).map(|i| c[i].cost(x[i])).collect();
        let star = (0..n).min_by_key(|&i| (own[i], i)).expect("n >= 1");
        x[star].insert(e);
        pool.remove(e);
        rec.counters.item_moves += 1;

        let worst = x[star].iter().map(|f| c[star].cost(x[star].without(f))).max().unwrap_or(0);
        let envied = (0..n).find(|&j| j != star && worst > c[star].cost(x[j]));
        match envied {
            None => rec.event(|| TraceEvent::Assign { round, agent: star, item: e }),
            Some(j) => {
                invariant!(
                    own[star] == c[j].cost(x[j]),
                    "reassignment in round {round}: agent {star} has cost {} but agent {j} has {}",
                    own[star],
                    c[j].cost(x[j])
                );
                x[star].remove(e);
                x[j].insert(e);
                let moved: ItemSet = x[j].iter().filter(|&f| c[star].cost(ItemSet::singleton(f)) == 0).collect();
                x[star] = x[star].union(moved);
                x[j] = x[j].difference(moved);
                rec.counters.item_moves += 1 + moved.len() as u64;
                rec.counters.reassignments += 1;
                invariant!(
                    x[j].iter().all(|f| inst.cost(star, ItemSet::singleton(f)) == 1),
                    "after reassignment in round {round}, agent {j} still holds an item free for agent {star}"
                );
                rec.event(|| TraceEvent::Reassign {
                    round,
                    agent: star,
                    to: j,
                    item: e,
                    moved: moved.iter().collect(),
                });
            }
        }
        #[cfg(debug_assertions)]
        invariant!(is_efx_wrt(inst.agents(), &x), "partial allocation is not EFX after round {round}");
    }
    rec.counters.iterations = round;
    rec.counters.cost_evaluations = evals.get();

    let allocation = Allocation::new(m, x)?;
    let sc: crate::Cost = (0..n).map(|i| inst.cost(i, allocation.bundle(i))).sum();
    invariant!(sc as usize == part.m_plus.len(), "social cost {sc} differs from |M+| = {}", part.m_plus.len());
    finish(inst, Algorithm::Additive, allocation, GuaranteeTag::EfxAndPo, None, rec)
}
