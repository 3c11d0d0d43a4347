//! Complete allocation for submodular binary-marginal costs.
//!
//! With fewer than `n` items that cost one to everybody, the cancelable phase-2 routine runs on
//! the costs directly and the result is EFX. Otherwise every agent is seeded with one such item,
//! the general loop runs, and the few leftovers go one per agent; the result is 2-EF.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use super::cancelable::run_phase2;
use super::general::general_loop;
use super::{finish, verify_class, Algorithm, Counted, GuaranteeTag, Recorder, SolveOptions, SolveReport, TraceEvent};
use crate::allocation::Allocation;
use crate::cost::{FunctionClass, SetFunction};
use crate::error::{invariant, Result};
use crate::instance::Instance;
use crate::itemset::ItemSet;

/// Items whose singleton costs one to every agent.
pub fn compute_m1(inst: &Instance) -> ItemSet {
    m1_of(inst.agents(), inst.m())
}

fn m1_of<F: SetFunction>(fns: &[F], m: usize) -> ItemSet {
    (0..m).filter(|&e| fns.iter().all(|f| f.cost(ItemSet::singleton(e)) == 1)).collect()
}

pub fn solve_submodular(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    verify_class(inst, FunctionClass::Submodular)?;
    let (n, m) = (inst.n(), inst.m());
    let evals = Cell::new(0);
    let c = Counted::wrap(inst.agents(), &evals);
    let mut rec = Recorder::new(opts);
    let m1 = m1_of(&c, m);

    if m1.len() < n {
        let bundles = run_phase2(&c, ItemSet::full(m), &mut rec)?;
        rec.counters.iterations = rec.counters.phase2_iterations;
        rec.counters.cost_evaluations = evals.get();
        let allocation = Allocation::new(m, bundles)?;
        return finish(inst, Algorithm::Submodular, allocation, GuaranteeTag::Efx, Some(1), rec);
    }

    let mut bundles = vec![ItemSet::EMPTY; n];
    let mut pool = ItemSet::full(m);
    for (i, e) in m1.iter().take(n).enumerate() {
        bundles[i].insert(e);
        pool.remove(e);
        rec.event(|| TraceEvent::Seed { agent: i, item: e });
    }
    rec.counters.item_moves += n as u64;
    general_loop(&c, &mut bundles, &mut pool, &mut rec, opts.incremental_graph)?;

    let leftovers: Vec<usize> = pool.iter().collect();
    invariant!(leftovers.len() < n, "{} leftovers for {n} agents", leftovers.len());
    for (i, &e) in leftovers.iter().enumerate() {
        bundles[i].insert(e);
        rec.event(|| TraceEvent::Leftover { agent: i, item: e });
    }
    rec.counters.item_moves += leftovers.len() as u64;

    for i in 0..n {
        let own = c[i].cost(bundles[i]);
        for (j, b) in bundles.iter().enumerate() {
            let other = c[i].cost(*b);
            invariant!(other >= 1, "agent {i} values agent {j}'s final bundle at zero");
            invariant!(
                own <= other || own == other + 1,
                "agent {i} envies agent {j} by {} (costs {own} vs {other})",
                own - other
            );
        }
    }
    rec.counters.cost_evaluations = evals.get();
    let allocation = Allocation::new(m, bundles)?;
    finish(inst, Algorithm::Submodular, allocation, GuaranteeTag::TwoEf, Some(2), rec)
}
