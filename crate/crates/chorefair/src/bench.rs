//! Operation counts and wall-clock times of the solvers on generated families.

use std::time::Instant;

use chorefair_core::solve::{solve, Algorithm, SolveOptions};
use serde::Serialize;

use crate::error::Result;
use crate::generate::{generate, Family, Params};

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub iterations: u64,
    pub basic_operations: u64,
    /// `basic_operations / (n m^2)`.
    pub ratio: f64,
    pub micros: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub family: String,
    pub algorithm: String,
    pub rows: Vec<BenchRow>,
    /// Largest ratio over the rows with the smallest `m`.
    pub fitted_c: f64,
    /// Whether every row satisfies `basic_operations <= fitted_c * n * m^2`.
    pub within_bound: bool,
    pub max_micros: u128,
}

/// Parses `2x4..6x24` (every `n` from 2 to 6 and `m` from 4 to 24 in steps of `m_step`) or a
/// comma-separated list such as `2x8,3x16`.
pub fn parse_sizes(text: &str, m_step: usize) -> Result<Vec<(usize, usize)>, String> {
    let pair = |s: &str| -> Result<(usize, usize), String> {
        let (n, m) = s.trim().split_once('x').ok_or_else(|| format!("expected NxM, got {s:?}"))?;
        let n = n.parse().map_err(|_| format!("bad agent count in {s:?}"))?;
        let m = m.parse().map_err(|_| format!("bad item count in {s:?}"))?;
        Ok((n, m))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let ((n0, m0), (n1, m1)) = (pair(lo)?, pair(hi)?);
        if n0 > n1 || m0 > m1 || m_step == 0 {
            return Err(format!("empty size range {text:?}"));
        }
        let ms: Vec<usize> = (m0..=m1).step_by(m_step).collect();
        return Ok((n0..=n1).flat_map(|n| ms.iter().map(move |&m| (n, m))).collect());
    }
    text.split(',').map(pair).collect()
}

pub fn bench(
    family: Family,
    algorithm: Algorithm,
    sizes: &[(usize, usize)],
    seed: u64,
    params: &Params,
) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &(n, m)) in sizes.iter().enumerate() {
        let inst_seed = seed.wrapping_add(k as u64);
        let inst = generate(family, n, m, inst_seed, params)?;
        let start = Instant::now();
        let report = solve(&inst, algorithm, &SolveOptions::default())?;
        let micros = start.elapsed().as_micros();
        let ops = report.counters.basic_operations();
        let scale = (n * m * m).max(1) as f64;
        rows.push(BenchRow {
            n,
            m,
            seed: inst_seed,
            iterations: report.counters.iterations,
            basic_operations: ops,
            ratio: ops as f64 / scale,
            micros,
        });
    }
    let smallest = rows.iter().map(|r| r.m).min().unwrap_or(0);
    let fitted_c = rows.iter().filter(|r| r.m == smallest).map(|r| r.ratio).fold(0.0, f64::max);
    let within_bound = rows.iter().all(|r| r.basic_operations as f64 <= fitted_c * (r.n * r.m * r.m) as f64);
    let max_micros = rows.iter().map(|r| r.micros).max().unwrap_or(0);
    Ok(BenchReport {
        family: family.name().to_string(),
        algorithm: algorithm.name().to_string(),
        rows,
        fitted_c,
        within_bound,
        max_micros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("2x4..3x12", 4).unwrap(), [(2, 4), (2, 8), (2, 12), (3, 4), (3, 8), (3, 12)]);
        assert_eq!(parse_sizes("2x8, 3x16", 4).unwrap(), [(2, 8), (3, 16)]);
        assert!(parse_sizes("2x8..1x4", 4).is_err());
        assert!(parse_sizes("2y8", 4).is_err());
    }

    #[test]
    fn small_bench_runs() {
        let r = bench(Family::BinaryAdditive, Algorithm::Auto, &[(2, 4), (3, 8)], 0, &Params::default()).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.fitted_c > 0.0);
    }
}
