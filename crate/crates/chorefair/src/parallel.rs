//! Oracle enumeration split across threads by assignment prefix.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use chorefair_core::oracle::{analyze_prefix, AnalyzeOptions, EnumerationReport, PartialReport};
use chorefair_core::Instance;

use crate::error::Result;

/// All prefixes of the shortest length giving at least `4 * jobs` pieces, in lexicographic order.
fn prefixes(n: usize, m: usize, jobs: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    while out.len() < 4 * jobs && out[0].len() < m && n > 1 {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Same report as [`chorefair_core::oracle::analyze`] for any `jobs >= 1`.
pub fn analyze_parallel(inst: &Instance, opts: &AnalyzeOptions, jobs: usize) -> Result<EnumerationReport> {
    let jobs = jobs.max(1);
    if jobs == 1 {
        return Ok(chorefair_core::oracle::analyze(inst, opts)?);
    }
    let pieces = prefixes(inst.n(), inst.m(), jobs);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<chorefair_core::Result<PartialReport>>>> =
        Mutex::new((0..pieces.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(prefix) = pieces.get(k) else { break };
                let part = analyze_prefix(inst, prefix, opts);
                slots.lock().expect("no worker panics while holding the lock")[k] = Some(part);
            });
        }
    });
    let mut merged: Option<PartialReport> = None;
    for part in slots.into_inner().expect("workers finished") {
        let part = part.expect("every prefix was processed")?;
        match merged.as_mut() {
            Some(acc) => acc.merge(part),
            None => merged = Some(part),
        }
    }
    Ok(merged.expect("at least one prefix").finish())
}
