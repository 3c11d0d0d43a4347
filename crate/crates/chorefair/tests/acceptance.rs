//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits non-zero if any
//! fails.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use chorefair::bench::bench;
use chorefair::generate::{generate, random_table, Family, Params};
use chorefair_core::builtin;
use chorefair_core::class::{check_class, ClassProperty};
use chorefair_core::fairness::{allocation_count, is_alpha_ef, is_alpha_efx, is_po_bruteforce};
use chorefair_core::oracle::{analyze, enumerate_allocations, AnalyzeOptions};
use chorefair_core::solve::{phase1, solve_additive, solve_cancelable, solve_general, solve_submodular, SolveOptions};
use chorefair_core::{Algorithm, Cost, CostFunction, FunctionClass, Instance, ItemSet, Ratio, SetFunction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn naive_ef(inst: &Instance, x: &[ItemSet], num: Cost, den: Cost) -> bool {
    (0..inst.n()).all(|i| (0..inst.n()).all(|j| i == j || inst.cost(i, x[i]) * den <= num * inst.cost(i, x[j])))
}

fn naive_efx(inst: &Instance, x: &[ItemSet], num: Cost, den: Cost) -> bool {
    (0..inst.n()).all(|i| {
        (0..inst.n())
            .all(|j| i == j || x[i].iter().all(|e| inst.cost(i, x[i].without(e)) * den <= num * inst.cost(i, x[j])))
    })
}

fn items_costly_to_all(inst: &Instance) -> usize {
    (0..inst.m()).filter(|&e| (0..inst.n()).all(|i| inst.cost(i, ItemSet::singleton(e)) == 1)).count()
}

fn min_social_cost(inst: &Instance) -> Cost {
    let mut best = Cost::MAX;
    enumerate_allocations(inst, 1_000_000, |b| {
        best = best.min((0..inst.n()).map(|i| inst.cost(i, b[i])).sum());
        ControlFlow::Continue(())
    })
    .expect("size checked by caller");
    best
}

/// `(n, m)` drawn uniformly from the given ranges, one stream per criterion.
fn sizes(stream: u64, count: usize, n: (usize, usize), m: (usize, usize)) -> Vec<(usize, usize, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    rng.set_stream(stream);
    (0..count).map(|k| (rng.random_range(n.0..=n.1), rng.random_range(m.0..=m.1), 1000 * stream + k as u64)).collect()
}

fn additive_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    sizes(1, 500, (2, 5), (1, 12))
        .into_iter()
        .map(|(n, m, seed)| {
            let p_one = [0.3, 0.5, 0.7, 0.9][rng.random_range(0..4)];
            generate(Family::BinaryAdditive, n, m, seed, &Params { p_one, ..Params::default() }).unwrap()
        })
        .collect()
}

fn criterion_1(instances: &[Instance]) -> Outcome {
    let start = Instant::now();
    let (mut efx, mut po, mut po_checked) = (0, 0, 0);
    for (k, inst) in instances.iter().enumerate() {
        let r = solve_additive(inst, &SolveOptions::default()).map_err(|e| format!("instance {k}: {e}"))?;
        let x = &r.allocation;
        let lib = is_alpha_efx(inst, x, Ratio::ONE).unwrap().holds;
        ensure(lib == naive_efx(inst, x.bundles(), 1, 1), || format!("instance {k}: checkers disagree"))?;
        if x.is_complete() && lib {
            efx += 1;
        }
        if allocation_count(inst.n(), inst.m()) <= 1_000_000 {
            po_checked += 1;
            if is_po_bruteforce(inst, x).unwrap().pareto_optimal {
                po += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(efx == 500 && po == po_checked && elapsed < Duration::from_secs(60), || {
        format!("complete EFX {efx}/500, PO {po}/{po_checked}, {elapsed:.1?}")
    })?;
    Ok(format!("complete EFX {efx}/500, PO {po}/{po_checked} (n^m <= 1e6); tolerance 0 failures, {elapsed:.1?} < 60 s"))
}

fn criterion_2(instances: &[Instance]) -> Outcome {
    let (mut exact, mut oracle_runs) = (0, 0);
    for (k, inst) in instances.iter().enumerate() {
        let r = solve_additive(inst, &SolveOptions::default()).unwrap();
        let sc: Cost = (0..inst.n()).map(|i| inst.cost(i, r.allocation.bundle(i))).sum();
        let floor = items_costly_to_all(inst) as Cost;
        ensure(sc == floor, || format!("instance {k}: social cost {sc}, expected {floor}"))?;
        exact += 1;
        if allocation_count(inst.n(), inst.m()) <= 1_000_000 {
            oracle_runs += 1;
            let best = min_social_cost(inst);
            ensure(best == sc, || format!("instance {k}: oracle minimum {best}, solver {sc}"))?;
        }
    }
    Ok(format!("social cost = |M+| on {exact}/500, = oracle minimum on {oracle_runs}/{oracle_runs}; tolerance 0"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut passed = 0;
    for (k, (n, m, seed)) in sizes(3, 500, (2, 4), (1, 12)).into_iter().enumerate() {
        let family = if k % 2 == 0 { Family::CappedAdditive } else { Family::Cardinality };
        let inst = generate(family, n, m, seed, &Params::default()).unwrap();
        let p1 = phase1(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        for i in 0..n {
            for a in &p1.base_bundles {
                ensure(inst.cost(i, *a) as usize == p1.w, || format!("instance {k}: agent {i} sees {a:?} != w"))?;
            }
        }
        let r = solve_cancelable(&inst, &SolveOptions::default()).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(r.counters.phase2_iterations <= 2 * m as u64, || format!("instance {k}: phase-2 iterations"))?;
        let x = &r.allocation;
        let ok =
            x.is_complete() && is_alpha_efx(&inst, x, Ratio::ONE).unwrap().holds && naive_efx(&inst, x.bundles(), 1, 1);
        ensure(ok, || format!("instance {k}: output not complete EFX"))?;
        passed += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "complete EFX {passed}/500, phase-1 bundles uniform and phase-2 iterations <= 2m on all; tolerance 0, {elapsed:.1?}"
    ))
}

fn criterion_4() -> Outcome {
    let mut passed = 0;
    let mut partial = 0;
    let mut coin = ChaCha8Rng::seed_from_u64(4);
    for (k, (n, m, seed)) in sizes(4, 500, (2, 4), (1, 12)).into_iter().enumerate() {
        let thresholds = generate(Family::Threshold, n, m, seed, &Params::default()).unwrap();
        let tables = generate(Family::Table, n, m, seed, &Params::default()).unwrap();
        let agents: Vec<CostFunction> = (0..n)
            .map(|i| if coin.random_bool(0.5) { thresholds.agent(i).clone() } else { tables.agent(i).clone() })
            .collect();
        let inst = Instance::new(m, agents, FunctionClass::General).unwrap();
        let r = solve_general(&inst, &SolveOptions::default()).map_err(|e| format!("instance {k}: {e}"))?;
        let x = &r.allocation;
        let ok = is_alpha_ef(&inst, x, Ratio::ONE).unwrap().holds
            && naive_ef(&inst, x.bundles(), 1, 1)
            && x.unallocated().len() < n;
        ensure(ok, || format!("instance {k}: EF or leftover bound fails"))?;
        passed += 1;
        partial += usize::from(!x.is_complete());
    }
    Ok(format!("EF with |unallocated| <= n-1 on {passed}/500 ({partial} partial); tolerance 0"))
}

fn criterion_5() -> Outcome {
    let (mut passed, mut case1, mut case2) = (0, 0, 0);
    for (k, (n, m, seed)) in sizes(5, 300, (2, 4), (1, 12)).into_iter().enumerate() {
        let inst = generate(Family::PartitionMatroid, n, m, seed, &Params::default()).unwrap();
        let r = solve_submodular(&inst, &SolveOptions::default()).map_err(|e| format!("instance {k}: {e}"))?;
        let x = &r.allocation;
        let b = x.bundles();
        ensure(x.is_complete() && naive_efx(&inst, b, 2, 1), || format!("instance {k}: not complete 2-EFX"))?;
        ensure(is_alpha_efx(&inst, x, Ratio::TWO).unwrap().holds, || format!("instance {k}: checker disagrees"))?;
        match r.case {
            Some(1) => {
                ensure(naive_efx(&inst, b, 1, 1), || format!("instance {k}: case 1 not EFX"))?;
                case1 += 1;
            }
            Some(2) => {
                ensure(naive_ef(&inst, b, 2, 1), || format!("instance {k}: case 2 not 2-EF"))?;
                case2 += 1;
            }
            other => return Err(format!("instance {k}: case {other:?}")),
        }
        passed += 1;
    }
    Ok(format!("complete 2-EFX {passed}/300 (case 1 EFX: {case1}, case 2 2-EF: {case2}); tolerance 0"))
}

fn bundles_of(x: &chorefair_core::Allocation) -> Vec<Vec<usize>> {
    x.bundles().iter().map(|b| b.iter().collect()).collect()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let inst = builtin::builtin("ternary-no-efxpo").unwrap();
    let r = analyze(&inst, &AnalyzeOptions::default()).unwrap();
    let frontier: Vec<Vec<Vec<usize>>> = r.pareto_frontier.iter().map(bundles_of).collect();
    let expected = vec![vec![vec![0, 2], vec![1]], vec![vec![2], vec![0, 1]]];
    let elapsed = start.elapsed();
    ensure(
        r.total_allocations == 8 && !r.efx_and_po_exists && frontier == expected && elapsed < Duration::from_secs(1),
        || format!("total {}, efx_and_po {}, frontier {frontier:?}", r.total_allocations, r.efx_and_po_exists),
    )?;
    Ok(format!("8 allocations, frontier {{e1e3|e2, e3|e1e2}}, no EFX+PO; exact, {elapsed:.1?} < 1 s"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let inst = builtin::builtin("cancelable-cap5-n2").unwrap();
    let r = analyze(&inst, &AnalyzeOptions::default()).unwrap();
    ensure(r.total_allocations == 1024 && r.efx_count == 252 && !r.truncated, || {
        format!("total {}, efx {}", r.total_allocations, r.efx_count)
    })?;
    for x in &r.efx_allocations {
        ensure(x.bundle(0).len() == 5 && x.bundle(1).len() == 5, || format!("uneven EFX split {x:?}"))?;
        ensure(!is_po_bruteforce(&inst, x).unwrap().pareto_optimal, || format!("EFX allocation {x:?} is PO"))?;
    }
    ensure(!r.efx_and_po_exists, || "oracle reports an EFX and PO allocation".into())?;
    let out = solve_cancelable(&inst, &SolveOptions::default()).unwrap();
    ensure(is_alpha_efx(&inst, &out.allocation, Ratio::ONE).unwrap().holds, || "solver output not EFX".into())?;
    ensure(!is_po_bruteforce(&inst, &out.allocation).unwrap().pareto_optimal, || "solver output is PO".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:.1?}"))?;
    Ok(format!("1024 allocations, 252 EFX all 5/5 and none PO; solver output EFX, not PO; exact, {elapsed:.1?} < 5 s"))
}

/// Definition-level class flags for small domains.
fn naive_classes<F: SetFunction>(f: &F) -> (bool, bool, bool) {
    let all = f.domain();
    let subsets: Vec<ItemSet> = all.subsets().collect();
    let additive = subsets.iter().all(|&s| f.cost(s) == s.iter().map(|e| f.cost(ItemSet::singleton(e))).sum::<Cost>());
    let mut cancelable = true;
    let mut submodular = true;
    for e in all.iter() {
        for &s in &subsets {
            if s.contains(e) {
                continue;
            }
            for &t in &subsets {
                if t.contains(e) {
                    continue;
                }
                if f.cost(s.with(e)) > f.cost(t.with(e)) && f.cost(s) <= f.cost(t) {
                    cancelable = false;
                }
                if s.is_subset(t) && f.cost(s.with(e)) - f.cost(s) < f.cost(t.with(e)) - f.cost(t) {
                    submodular = false;
                }
            }
        }
    }
    (additive, cancelable, submodular)
}

fn criterion_8() -> Outcome {
    let eq2 = check_class(&builtin::cap5_function(8)).unwrap();
    ensure(eq2.cancelable && !eq2.additive && eq2.submodular, || format!("cap-5 function: {eq2:?}"))?;

    let f = builtin::submodular_not_cancelable();
    let r = check_class(&f).unwrap();
    ensure(r.submodular && !r.cancelable, || format!("4-element function: {r:?}"))?;
    let w = r.witness(ClassProperty::Cancelable).ok_or("no cancelability witness")?;
    let e = w.e.ok_or("witness without item")?;
    ensure(w.s == ItemSet::from([2, 3]) && w.t == ItemSet::from([1, 2]) && e == 0, || format!("witness {w:?}"))?;
    ensure(f.cost(w.s.with(e)) > f.cost(w.t.with(e)) && f.cost(w.s) <= f.cost(w.t), || {
        "witness does not refute".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut counts = [0usize; 3];
    for k in 0..1000 {
        let m = rng.random_range(0..=8usize);
        let f = match k % 4 {
            0 => CostFunction::table(m, random_table(&mut rng, m)).unwrap(),
            1 => {
                let ones: Vec<Cost> = (0..m).map(|_| Cost::from(rng.random_bool(0.6))).collect();
                let cap = rng.random_range(0..=m as Cost);
                let g = CostFunction::capped_additive(&ones, cap).unwrap();
                CostFunction::tabulate(m, |s| g.cost(s)).unwrap()
            }
            2 => {
                let label: Vec<usize> = (0..m).map(|_| rng.random_range(0..3)).collect();
                let groups: Vec<Vec<usize>> = (0..3).map(|g| (0..m).filter(|&e| label[e] == g).collect()).collect();
                let caps: Vec<Cost> = groups.iter().map(|g| rng.random_range(0..=g.len() as Cost)).collect();
                let g = CostFunction::partition_matroid(m, &groups, &caps).unwrap();
                CostFunction::tabulate(m, |s| g.cost(s)).unwrap()
            }
            _ => {
                let ones: Vec<Cost> = (0..m).map(|_| Cost::from(rng.random_bool(0.5))).collect();
                let g = CostFunction::additive(&ones).unwrap();
                CostFunction::tabulate(m, |s| g.cost(s)).unwrap()
            }
        };
        let r = check_class(&f).unwrap();
        ensure(r.binary_marginal && r.containments_hold(), || format!("table {k}: {r:?}"))?;
        ensure(!r.additive || r.cancelable, || format!("table {k}: additive but not cancelable"))?;
        ensure(!r.cancelable || r.submodular, || format!("table {k}: cancelable but not submodular"))?;
        if m <= 6 {
            let naive = naive_classes(&f);
            ensure(naive == (r.additive, r.cancelable, r.submodular), || format!("table {k}: flags differ"))?;
        }
        counts[0] += usize::from(r.additive);
        counts[1] += usize::from(r.cancelable);
        counts[2] += usize::from(r.submodular);
    }
    Ok(format!(
        "cap-5: cancelable, not additive; 4-element: submodular, not cancelable, witness S={{c,d}} T={{b,c}} e=a; \
         1000 tables ({} additive, {} cancelable, {} submodular), 0 containment violations",
        counts[0], counts[1], counts[2]
    ))
}

/// For every `U`, `φ(S) = φ(T)` implies `φ(S ∪ U) = φ(T ∪ U)` over `S, T` disjoint from `U`.
fn exchange_holds<F: SetFunction>(f: &F) -> bool {
    let all = f.domain();
    all.subsets().all(|u| {
        let mut image: Vec<Option<Cost>> = vec![None; all.len() + 1];
        all.difference(u).subsets().all(|s| {
            let slot = &mut image[f.cost(s) as usize];
            let v = f.cost(s.union(u));
            *slot.get_or_insert(v) == v
        })
    })
}

fn subadditive<F: SetFunction>(f: &F) -> bool {
    let subsets: Vec<ItemSet> = f.domain().subsets().collect();
    subsets
        .iter()
        .all(|&s| subsets.iter().all(|&t| f.cost(s) + f.cost(t) >= f.cost(s.union(t)) + f.cost(s.intersection(t))))
}

fn unit_decomposable<F: SetFunction>(f: &F) -> bool {
    f.domain()
        .subsets()
        .filter(|s| f.cost(*s) == 1 && s.len() >= 2)
        .all(|s| s.iter().any(|e| f.cost(s.without(e)) == 1))
}

fn criterion_9() -> Outcome {
    let mut functions: Vec<(String, CostFunction)> = Vec::new();
    for name in builtin::NAMES {
        for (i, f) in builtin::builtin(name).unwrap().agents().iter().enumerate() {
            functions.push((format!("{name}/{i}"), f.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..200 {
        let m = rng.random_range(1..=10usize);
        let f = match k % 4 {
            0 => {
                let ones: Vec<Cost> = (0..m).map(|_| Cost::from(rng.random_bool(0.6))).collect();
                CostFunction::capped_additive(&ones, rng.random_range(0..=m as Cost)).unwrap()
            }
            1 => CostFunction::cardinality(m, rng.random_range(0..=m as Cost)).unwrap(),
            _ => {
                let label: Vec<usize> = (0..m).map(|_| rng.random_range(0..3)).collect();
                let groups: Vec<Vec<usize>> = (0..3).map(|g| (0..m).filter(|&e| label[e] == g).collect()).collect();
                let caps: Vec<Cost> = groups.iter().map(|g| rng.random_range(0..=g.len() as Cost)).collect();
                CostFunction::partition_matroid(m, &groups, &caps).unwrap()
            }
        };
        functions.push((format!("random {k}"), f));
    }
    let (mut exchange, mut submod) = (0, 0);
    for (name, f) in &functions {
        let Ok(r) = check_class(f) else { continue };
        if !r.binary_marginal {
            continue;
        }
        if r.cancelable {
            ensure(exchange_holds(f), || format!("{name}: exchange property fails"))?;
            exchange += 1;
        }
        if r.submodular {
            ensure(subadditive(f), || format!("{name}: subadditivity fails"))?;
            ensure(unit_decomposable(f), || format!("{name}: unit decomposition fails"))?;
            submod += 1;
        }
    }
    ensure(exchange >= 100 && submod >= 200, || format!("only {exchange} cancelable / {submod} submodular checked"))?;
    Ok(format!(
        "exchange property on {exchange} cancelable functions, subadditivity and unit decomposition on {submod} submodular; 0 violations"
    ))
}

fn criterion_10() -> Outcome {
    let sizes: Vec<(usize, usize)> = (2..=6).flat_map(|n| [8, 16, 24].map(|m| (n, m))).collect();
    let params = Params { p_one: 0.9, ..Params::default() };
    let r = bench(Family::BinaryAdditive, Algorithm::Additive, &sizes, 10, &params).map_err(|e| e.to_string())?;
    ensure(r.within_bound, || format!("operations exceed {:.3} n m^2", r.fitted_c))?;
    ensure(r.max_micros < 100_000, || format!("slowest instance took {} us", r.max_micros))?;
    Ok(format!(
        "{} sizes, operations <= C n m^2 with C = {:.3} fitted at m = 8; slowest {} us < 100 ms",
        r.rows.len(),
        r.fitted_c,
        r.max_micros
    ))
}

fn main() {
    let additive = additive_instances();
    let criteria: Vec<Criterion> = vec![
        ("additive solver: EFX and PO", Box::new(|| criterion_1(&additive))),
        ("additive solver: minimum social cost", Box::new(|| criterion_2(&additive))),
        ("cancelable solver: EFX", Box::new(criterion_3)),
        ("general solver: partial EF", Box::new(criterion_4)),
        ("submodular solver: 2-EFX", Box::new(criterion_5)),
        ("ternary costs: no EFX and PO allocation", Box::new(criterion_6)),
        ("cap-5 costs: EFX excludes PO", Box::new(criterion_7)),
        ("function classes and containments", Box::new(criterion_8)),
        ("exchange and submodularity properties", Box::new(criterion_9)),
        ("additive solver operation counts", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
