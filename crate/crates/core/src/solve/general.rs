//! Partial envy-free allocation for arbitrary binary-marginal costs.
//!
//! Each iteration applies the first rule that fires: give an agent an item it finds free;
//! rotate bundles along a cycle of the equality graph so that some agent can take an item for
//! free; or hand one item to every agent of a tail component. When none applies, at most
//! `n - 1` items are left over.

use alloc::vec::Vec;
use core::cell::Cell;

use super::{finish, verify_class, Algorithm, Counted, GuaranteeTag, Recorder, SolveOptions, SolveReport, TraceEvent};
use crate::allocation::Allocation;
use crate::cost::{FunctionClass, SetFunction};
use crate::envy_graph::{find_cycle_through_edge, tail_scc, EnvyGraph};
use crate::error::{invariant, Result};
use crate::fairness::{ef_violations, Ratio};
use crate::instance::Instance;
use crate::itemset::ItemSet;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneralOutcome {
    pub iterations: u64,
    pub trace: Vec<TraceEvent>,
}

/// Runs the allocation loop from an arbitrary EF starting point, moving items out of
/// `unallocated` into `bundles`.
pub fn run_general_loop<F: SetFunction>(
    fns: &[F],
    bundles: &mut [ItemSet],
    unallocated: &mut ItemSet,
    opts: &SolveOptions,
) -> Result<GeneralOutcome> {
    let mut rec = Recorder::new(opts);
    general_loop(fns, bundles, unallocated, &mut rec, opts.incremental_graph)?;
    Ok(GeneralOutcome { iterations: rec.counters.iterations, trace: rec.trace })
}

enum Step {
    Placed(Vec<usize>),
    Stopped,
}

pub(crate) fn general_loop<F: SetFunction>(
    fns: &[F],
    bundles: &mut [ItemSet],
    pool: &mut ItemSet,
    rec: &mut Recorder,
    incremental: bool,
) -> Result<()> {
    let n = fns.len();
    let start = pool.len() as u64;
    invariant!(ef_violations(fns, bundles, Ratio::ONE).is_empty(), "general loop started from a non-EF allocation");
    let mut graph = EnvyGraph::compute(fns, bundles);
    let mut iteration: u64 = 0;
    loop {
        iteration += 1;
        invariant!(iteration <= start + 1, "general loop exceeded {} iterations", start + 1);
        if !incremental {
            graph = EnvyGraph::compute(fns, bundles);
        }
        let step = general_step(fns, bundles, pool, &graph, iteration, rec)?;
        match step {
            Step::Stopped => break,
            Step::Placed(changed) => {
                if incremental {
                    graph.refresh(fns, bundles, &changed);
                    #[cfg(debug_assertions)]
                    invariant!(
                        graph == EnvyGraph::compute(fns, bundles),
                        "incremental envy graph diverged in iteration {iteration}"
                    );
                }
            }
        }
        let found = ef_violations(fns, bundles, Ratio::ONE);
        invariant!(found.is_empty(), "EF broken in general-loop iteration {iteration}: {found:?}");
    }
    rec.counters.iterations += iteration;
    invariant!(pool.len() < n.max(1), "general loop stopped with {} items left for {n} agents", pool.len());
    Ok(())
}

fn general_step<F: SetFunction>(
    fns: &[F],
    bundles: &mut [ItemSet],
    pool: &mut ItemSet,
    graph: &EnvyGraph,
    iteration: u64,
    rec: &mut Recorder,
) -> Result<Step> {
    let n = fns.len();
    for i in 0..n {
        if let Some(e) = pool.iter().find(|&e| fns[i].marginal_cost(e, bundles[i]) == 0) {
            bundles[i].insert(e);
            pool.remove(e);
            rec.counters.item_moves += 1;
            rec.event(|| TraceEvent::ZeroMarginal { iteration, agent: i, item: e });
            return Ok(Step::Placed(alloc::vec![i]));
        }
    }

    for (i, j) in graph.edges() {
        let Some(e) = pool.iter().find(|&e| fns[i].marginal_cost(e, bundles[j]) == 0) else { continue };
        let Some(cycle) = find_cycle_through_edge(graph, i, j)? else { continue };
        let old: Vec<ItemSet> = cycle.iter().map(|&u| bundles[u]).collect();
        for (k, &u) in cycle.iter().enumerate() {
            bundles[u] = old[(k + 1) % old.len()];
        }
        bundles[i].insert(e);
        pool.remove(e);
        rec.counters.item_moves += 1 + old.iter().map(|b| b.len() as u64).sum::<u64>();
        rec.counters.reassignments += 1;
        let changed = cycle.clone();
        rec.event(|| TraceEvent::Rotate { iteration, cycle, item: e });
        return Ok(Step::Placed(changed));
    }

    let scc = tail_scc(graph);
    for &i in &scc {
        for &j in &scc {
            if i == j || !graph.has_edge(i, j) {
                continue;
            }
            for e in pool.iter() {
                invariant!(
                    fns[i].marginal_cost(e, bundles[i]) == 1 && fns[i].marginal_cost(e, bundles[j]) == 1,
                    "tail component {scc:?}: item {e} is free for agent {i} on its own or agent {j}'s bundle"
                );
            }
        }
    }
    if pool.len() < scc.len() {
        let remaining: Vec<usize> = pool.iter().collect();
        rec.event(|| TraceEvent::Stop { iteration, scc, remaining });
        return Ok(Step::Stopped);
    }
    let items: Vec<usize> = pool.iter().take(scc.len()).collect();
    for (&i, &e) in scc.iter().zip(&items) {
        bundles[i].insert(e);
        pool.remove(e);
    }
    rec.counters.item_moves += items.len() as u64;
    let changed = scc.clone();
    rec.event(|| TraceEvent::TailBatch { iteration, scc, items });
    Ok(Step::Placed(changed))
}

pub fn solve_general(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    verify_class(inst, FunctionClass::General)?;
    let evals = Cell::new(0);
    let c = Counted::wrap(inst.agents(), &evals);
    let mut rec = Recorder::new(opts);
    let mut bundles = alloc::vec![ItemSet::EMPTY; inst.n()];
    let mut pool = ItemSet::full(inst.m());
    general_loop(&c, &mut bundles, &mut pool, &mut rec, opts.incremental_graph)?;
    rec.counters.cost_evaluations = evals.get();
    let allocation = Allocation::with_unallocated(inst.m(), bundles, pool)?;
    finish(inst, Algorithm::General, allocation, GuaranteeTag::PartialEf, None, rec)
}
