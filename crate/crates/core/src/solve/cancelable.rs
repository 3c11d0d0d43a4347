//! EFX allocation for cancelable costs with binary marginals.
//!
//! Phase 1 repeatedly hands out `n` items that every agent finds costly on top of what it
//! already holds, one per agent; afterwards every agent values every phase-1 bundle at `w`.
//! Phase 2 allocates the rest against residual costs `d_i(S) = c_i(S | A_i)`, keeping the
//! phase-2 bundles EFX with respect to `d` and each agent's own residual cost at most one.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use super::{
    finish, verify_class, Algorithm, Counted, GuaranteeTag, Phase2Branch, Recorder, SolveOptions, SolveReport,
    TraceEvent,
};
use crate::allocation::Allocation;
use crate::cost::{FunctionClass, Residual, SetFunction};
use crate::error::{invariant, Result};
use crate::fairness::{efx_violations, is_efx_wrt, Ratio};
use crate::instance::Instance;
use crate::itemset::ItemSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase1Result {
    pub base_bundles: Vec<ItemSet>,
    /// Common size of every base bundle.
    pub w: usize,
    pub remaining: ItemSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase2Outcome {
    pub bundles: Vec<ItemSet>,
    pub iterations: u64,
    pub trace: Vec<TraceEvent>,
}

/// Phase 1 on its own. Items are scanned in index order and the k-th qualifying item goes to
/// agent k. Fails if some agent does not value every base bundle at exactly `w`, which can
/// only happen when the instance is not cancelable.
pub fn phase1(inst: &Instance) -> Result<Phase1Result> {
    let mut rec = Recorder::new(&SolveOptions::default());
    run_phase1(inst.agents(), inst.m(), &mut rec)
}

fn run_phase1<F: SetFunction>(fns: &[F], m: usize, rec: &mut Recorder) -> Result<Phase1Result> {
    let n = fns.len();
    let mut base = vec![ItemSet::EMPTY; n];
    let mut remaining = ItemSet::full(m);
    let mut round = 0;
    loop {
        let picked: Vec<usize> =
            remaining.iter().filter(|&e| (0..n).all(|i| fns[i].marginal_cost(e, base[i]) == 1)).take(n).collect();
        if picked.len() < n {
            break;
        }
        round += 1;
        for (i, &e) in picked.iter().enumerate() {
            base[i].insert(e);
            remaining.remove(e);
        }
        rec.counters.item_moves += n as u64;
        rec.event(|| TraceEvent::Phase1Round { round, items: picked });
    }
    let w = round as usize;
    for (i, f) in fns.iter().enumerate() {
        for (j, b) in base.iter().enumerate() {
            let v = f.cost(*b);
            invariant!(
                v as usize == w,
                "after phase 1 agent {i} values agent {j}'s bundle at {v}, expected {w}; instance is not cancelable"
            );
        }
    }
    Ok(Phase1Result { base_bundles: base, w, remaining })
}

/// Phase 2 on its own: allocates `remaining` against the cost views `d`.
///
/// Needs fewer than `n` items of `remaining` that every `d_i` prices at one. The output keeps
/// `d_i(B_i) <= 1` for every agent and is EFX with respect to `d`; the loop runs at most
/// `2 |remaining|` times. `d` only has to be submodular, so it also runs directly on costs.
pub fn phase2<F: SetFunction>(d: &[F], remaining: ItemSet, opts: &SolveOptions) -> Result<Phase2Outcome> {
    let mut rec = Recorder::new(opts);
    let bundles = run_phase2(d, remaining, &mut rec)?;
    Ok(Phase2Outcome { bundles, iterations: rec.counters.phase2_iterations, trace: rec.trace })
}

pub(crate) fn run_phase2<F: SetFunction>(d: &[F], remaining: ItemSet, rec: &mut Recorder) -> Result<Vec<ItemSet>> {
    let n = d.len();
    let m1: ItemSet = remaining.iter().filter(|&e| d.iter().all(|f| f.cost(ItemSet::singleton(e)) == 1)).collect();
    invariant!(m1.len() < n, "{} items cost one to every agent at the start of phase 2, need fewer than {n}", m1.len());
    let mut b = vec![ItemSet::EMPTY; n];
    for (i, e) in m1.iter().enumerate() {
        b[i].insert(e);
        rec.event(|| TraceEvent::Seed { agent: i, item: e });
    }
    rec.counters.item_moves += m1.len() as u64;

    let mut pool = remaining.difference(m1);
    let mut iteration: u64 = 0;
    while let Some(e) = pool.first() {
        iteration += 1;
        let Some((branch, agent, other, item)) = phase2_step(d, &mut b, e) else {
            return Err(crate::Error::InvariantViolation(alloc::format!(
                "phase-2 iteration {iteration}: no agent can take item {e} and no bundle is free for anyone else"
            )));
        };
        if item.is_some() {
            pool.remove(e);
        }
        rec.counters.item_moves += match branch {
            Phase2Branch::Merge => 1 + b[agent].len() as u64,
            Phase2Branch::Swap => 0,
            _ => 1,
        };
        rec.event(|| TraceEvent::Phase2Step { iteration, branch, agent, other, item });

        if let Some(i) = (0..n).find(|&i| d[i].cost(b[i]) > 1) {
            return Err(crate::Error::InvariantViolation(alloc::format!(
                "phase-2 iteration {iteration}: agent {i} has residual cost {} > 1",
                d[i].cost(b[i])
            )));
        }
        invariant!(is_efx_wrt(d, &b), "phase-2 iteration {iteration}: bundles are not EFX under residual costs");
        invariant!(iteration <= 2 * remaining.len() as u64, "phase 2 exceeded {} iterations", 2 * remaining.len());
    }
    rec.counters.phase2_iterations += iteration;
    Ok(b)
}

type Step = (Phase2Branch, usize, Option<usize>, Option<usize>);

/// One loop iteration; returns the branch taken, the acting agent, the partner agent and the
/// item allocated (if any).
fn phase2_step<F: SetFunction>(d: &[F], b: &mut [ItemSet], e: usize) -> Option<Step> {
    let n = d.len();
    for i in 0..n {
        if d[i].marginal_cost(e, b[i]) != 0 {
            continue;
        }
        b[i].insert(e);
        if is_efx_wrt(d, b) {
            return Some((Phase2Branch::Add, i, None, Some(e)));
        }
        b[i].remove(e);
    }
    if let Some(i) = (0..n).find(|&i| d[i].cost(b[i]) == 0) {
        return Some(match (0..n).find(|&j| j != i && d[i].cost(b[j]) == 0) {
            Some(j) => {
                b[i] = b[i].union(b[j]);
                b[j] = ItemSet::singleton(e);
                (Phase2Branch::Merge, i, Some(j), Some(e))
            }
            None => {
                b[i].insert(e);
                (Phase2Branch::Take, i, None, Some(e))
            }
        });
    }
    let (i, j) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && d[i].cost(b[j]) == 0)?;
    b.swap(i, j);
    Some((Phase2Branch::Swap, i, Some(j), None))
}

pub fn solve_cancelable(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    verify_class(inst, FunctionClass::Cancelable)?;
    let evals = Cell::new(0);
    let c = Counted::wrap(inst.agents(), &evals);
    let mut rec = Recorder::new(opts);

    let p1 = run_phase1(&c, inst.m(), &mut rec)?;
    let d: Vec<_> = c.iter().zip(&p1.base_bundles).map(|(f, &a)| Residual::new(f, a)).collect();
    let b = run_phase2(&d, p1.remaining, &mut rec)?;
    rec.counters.iterations = p1.w as u64 + rec.counters.phase2_iterations;
    rec.counters.cost_evaluations = evals.get();

    let bundles: Vec<ItemSet> = p1.base_bundles.iter().zip(&b).map(|(a, b)| a.union(*b)).collect();
    let found = efx_violations(inst.agents(), &bundles, Ratio::ONE);
    invariant!(found.is_empty(), "combined allocation is not EFX: {found:?}");
    let allocation = Allocation::new(inst.m(), bundles)?;
    finish(inst, Algorithm::Cancelable, allocation, GuaranteeTag::Efx, None, rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::cost::CostFunction;
    use crate::error::Error;
    use proptest::prelude::*;

    fn traced() -> SolveOptions {
        SolveOptions { trace: true, ..Default::default() }
    }

    #[test]
    fn small_additive_instance() {
        let f = CostFunction::additive(&[1, 1, 0, 0]).unwrap();
        let inst = Instance::new(4, vec![f.clone(), f], FunctionClass::Cancelable).unwrap();
        let p1 = phase1(&inst).unwrap();
        assert_eq!(p1.base_bundles, [ItemSet::from([0]), ItemSet::from([1])]);
        assert_eq!((p1.w, p1.remaining), (1, ItemSet::from([2, 3])));

        let d: Vec<_> = inst.agents().iter().zip(&p1.base_bundles).map(|(f, &a)| Residual::new(f, a)).collect();
        let p2 = phase2(&d, p1.remaining, &SolveOptions::default()).unwrap();
        assert_eq!(p2.bundles, [ItemSet::from([2, 3]), ItemSet::EMPTY]);
        assert_eq!(p2.iterations, 2);

        let r = solve_cancelable(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(r.allocation.bundles(), [ItemSet::from([0, 2, 3]), ItemSet::from([1])]);
        assert_eq!(r.guarantee, GuaranteeTag::Efx);
    }

    #[test]
    fn zero_costs_skip_phase_one() {
        let f = CostFunction::additive(&[0; 5]).unwrap();
        let inst = Instance::new(5, vec![f.clone(), f.clone(), f], FunctionClass::Cancelable).unwrap();
        let p1 = phase1(&inst).unwrap();
        assert_eq!((p1.w, p1.remaining), (0, ItemSet::full(5)));
        assert!(solve_cancelable(&inst, &SolveOptions::default()).unwrap().allocation.is_complete());
    }

    #[test]
    fn cap5_phase_one_splits_evenly() {
        let inst = builtin::cap5_instance(2);
        let p1 = phase1(&inst).unwrap();
        assert_eq!(p1.w, 5);
        assert_eq!(p1.base_bundles, [ItemSet::from([0, 2, 4, 6, 8]), ItemSet::from([1, 3, 5, 7, 9])]);
        assert!(p1.remaining.is_empty());
        let r = solve_cancelable(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(r.allocation.bundles(), p1.base_bundles.as_slice());
    }

    #[test]
    fn swap_branch_regression() {
        let agents = vec![
            CostFunction::capped_additive(&[1, 1, 1, 1], 2).unwrap(),
            CostFunction::capped_additive(&[1, 1, 0, 0], 3).unwrap(),
            CostFunction::capped_additive(&[1, 1, 1, 1], 4).unwrap(),
        ];
        let inst = Instance::new(4, agents, FunctionClass::Cancelable).unwrap();
        let r = solve_cancelable(&inst, &traced()).unwrap();
        let step =
            |iteration, branch, agent, other, item| TraceEvent::Phase2Step { iteration, branch, agent, other, item };
        assert_eq!(
            r.trace,
            [
                TraceEvent::Seed { agent: 0, item: 0 },
                TraceEvent::Seed { agent: 1, item: 1 },
                step(1, Phase2Branch::Take, 2, None, Some(2)),
                step(2, Phase2Branch::Swap, 1, Some(2), None),
                step(3, Phase2Branch::Add, 1, None, Some(3)),
            ]
        );
        assert_eq!(r.allocation.bundles(), [ItemSet::from([0]), ItemSet::from([2, 3]), ItemSet::from([1])]);
    }

    #[test]
    fn phase2_refuses_too_many_common_items() {
        let f = CostFunction::cardinality(3, 3).unwrap();
        let err = phase2(&[&f, &f], ItemSet::full(3), &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
    }

    #[test]
    fn rejects_non_cancelable_kinds() {
        let f = CostFunction::threshold(3, 1).unwrap();
        let inst = Instance::new(3, vec![f.clone(), f], FunctionClass::General).unwrap();
        assert!(matches!(solve_cancelable(&inst, &SolveOptions::default()), Err(Error::WrongClass(_))));
        let appendix = builtin::builtin("appendixA-submodular-4").unwrap();
        assert!(matches!(solve_cancelable(&appendix, &SolveOptions::default()), Err(Error::WrongClass(_))));
    }

    fn capped_instance() -> impl Strategy<Value = Instance> {
        (2usize..=4, 0usize..=10).prop_flat_map(|(n, m)| {
            proptest::collection::vec((proptest::collection::vec(0u32..=1, m), 0u32..=6), n).prop_map(move |rows| {
                let agents =
                    rows.iter().map(|(ones, cap)| CostFunction::capped_additive(ones, *cap).unwrap()).collect();
                Instance::new(m, agents, FunctionClass::Cancelable).unwrap()
            })
        })
    }

    fn matroid_instance() -> impl Strategy<Value = Instance> {
        (2usize..=4, 1usize..=9).prop_flat_map(|(n, m)| {
            let agent = (proptest::collection::vec(0usize..3, m), proptest::collection::vec(0u32..=3, 3));
            proptest::collection::vec(agent, n).prop_map(move |rows| {
                let agents = rows
                    .iter()
                    .map(|(label, caps)| {
                        let groups: Vec<Vec<usize>> =
                            (0..3).map(|g| (0..m).filter(|&e| label[e] == g).collect()).collect();
                        CostFunction::partition_matroid(m, &groups, caps).unwrap()
                    })
                    .collect();
                Instance::new(m, agents, FunctionClass::Submodular).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cancelable_outputs_are_complete_and_efx(inst in capped_instance()) {
            let r = solve_cancelable(&inst, &SolveOptions::default()).unwrap();
            prop_assert!(r.allocation.is_complete());
            prop_assert!(efx_violations(inst.agents(), r.allocation.bundles(), Ratio::ONE).is_empty());
            let p1 = phase1(&inst).unwrap();
            prop_assert!(r.counters.phase2_iterations <= 2 * p1.remaining.len() as u64);
            for (i, f) in inst.agents().iter().enumerate() {
                for a in &p1.base_bundles {
                    prop_assert_eq!(f.cost(*a) as usize, p1.w, "agent {}", i);
                }
            }
        }

        #[test]
        fn phase2_runs_on_submodular_costs(inst in matroid_instance()) {
            let n = inst.n();
            let m1 = (0..inst.m()).filter(|&e| inst.agents().iter().all(|f| f.cost(ItemSet::singleton(e)) == 1)).count();
            prop_assume!(m1 < n);
            let out = phase2(inst.agents(), ItemSet::full(inst.m()), &SolveOptions::default()).unwrap();
            prop_assert!(out.iterations <= 2 * inst.m() as u64);
            prop_assert!(efx_violations(inst.agents(), &out.bundles, Ratio::ONE).is_empty());
            let covered = out.bundles.iter().fold(ItemSet::EMPTY, |acc, b| acc.union(*b));
            prop_assert_eq!(covered, ItemSet::full(inst.m()));
            for (f, b) in inst.agents().iter().zip(&out.bundles) {
                prop_assert!(f.cost(*b) <= 1);
            }
        }
    }
}
