//! Envy-freeness, EFX, their α-relaxations, Pareto-optimality and social cost.
//!
//! All comparisons are exact: `α = p/q` is applied by cross-multiplication.
//! EF and EFX are evaluated over held bundles, so they apply to partial allocations too.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::allocation::Allocation;
use crate::cost::{Cost, SetFunction};
use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::itemset::ItemSet;

/// Largest `n^m` the brute-force Pareto check will enumerate.
pub const PO_ENUMERATION_LIMIT: u128 = 10_000_000;

/// An approximation factor `num / den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };
    pub const TWO: Ratio = Ratio { num: 2, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(invalid!("ratio {num}/{den} has a zero denominator"));
        }
        if num < den {
            return Err(invalid!("approximation factor {num}/{den} is below 1"));
        }
        Ok(Ratio { num, den })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// `lhs <= self * rhs`
    #[inline]
    pub fn allows(self, lhs: Cost, rhs: Cost) -> bool {
        lhs as u128 * self.den as u128 <= rhs as u128 * self.num as u128
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    /// `"p/q"` or `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| invalid!("bad ratio {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => Ratio::new(parse(p)?, parse(q)?),
            None => Ratio::new(parse(s)?, 1),
        }
    }
}

/// Agent `i` envies `j` (EF) or still envies after dropping `item` from its own bundle (EFX).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub item: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyCheck {
    pub holds: bool,
    pub violations: Vec<Violation>,
}

impl EnvyCheck {
    fn from_violations(violations: Vec<Violation>) -> Self {
        EnvyCheck { holds: violations.is_empty(), violations }
    }
}

fn check_consistent(inst: &Instance, x: &Allocation) -> Result<()> {
    x.check_against(inst)
}

pub fn social_cost(inst: &Instance, x: &Allocation) -> Result<Cost> {
    check_consistent(inst, x)?;
    Ok(social_cost_of(inst.agents(), x.bundles()))
}

pub fn social_cost_of<F: SetFunction>(fns: &[F], bundles: &[ItemSet]) -> Cost {
    fns.iter().zip(bundles).map(|(f, &b)| f.cost(b)).sum()
}

/// Every ordered pair `(i, j)` with `c_i(X_i) > α · c_i(X_j)`.
pub fn ef_violations<F: SetFunction>(fns: &[F], bundles: &[ItemSet], alpha: Ratio) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        let own = f.cost(bundles[i]);
        for (j, &other) in bundles.iter().enumerate() {
            if i != j && !alpha.allows(own, f.cost(other)) {
                out.push(Violation { i, j, item: None });
            }
        }
    }
    out
}

/// For every ordered pair `(i, j)` where EFX fails, the lowest item `e ∈ X_i` with
/// `c_i(X_i - e) > α · c_i(X_j)`.
pub fn efx_violations<F: SetFunction>(fns: &[F], bundles: &[ItemSet], alpha: Ratio) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        let own = bundles[i];
        if own.is_empty() {
            continue;
        }
        let reduced: Vec<(usize, Cost)> = own.iter().map(|e| (e, f.cost(own.without(e)))).collect();
        for (j, &other) in bundles.iter().enumerate() {
            if i == j {
                continue;
            }
            let theirs = f.cost(other);
            if let Some(&(e, _)) = reduced.iter().find(|&&(_, c)| !alpha.allows(c, theirs)) {
                out.push(Violation { i, j, item: Some(e) });
            }
        }
    }
    out
}

/// EFX with respect to `fns`, with early exit.
pub fn is_efx_wrt<F: SetFunction>(fns: &[F], bundles: &[ItemSet]) -> bool {
    fns.iter().enumerate().all(|(i, f)| {
        let own = bundles[i];
        if own.is_empty() {
            return true;
        }
        let worst = own.iter().map(|e| f.cost(own.without(e))).max().unwrap_or(0);
        bundles.iter().enumerate().all(|(j, &other)| i == j || worst <= f.cost(other))
    })
}

fn check_alpha(alpha: Ratio) -> Result<()> {
    // `Ratio` can only be built with num >= den; this guards hand-rolled values in tests.
    if alpha.num < alpha.den {
        return Err(invalid!("approximation factor {alpha} is below 1"));
    }
    Ok(())
}

/// `c_i(X_i) <= α · c_i(X_j)` for all `i ≠ j`. `α = 1` is envy-freeness.
pub fn is_alpha_ef(inst: &Instance, x: &Allocation, alpha: Ratio) -> Result<EnvyCheck> {
    check_consistent(inst, x)?;
    check_alpha(alpha)?;
    Ok(EnvyCheck::from_violations(ef_violations(inst.agents(), x.bundles(), alpha)))
}

/// `X_i = ∅` or `c_i(X_i - e) <= α · c_i(X_j)` for all `i ≠ j`, `e ∈ X_i`. Unallocated items
/// are ignored. `α = 1` is EFX.
pub fn is_alpha_efx(inst: &Instance, x: &Allocation, alpha: Ratio) -> Result<EnvyCheck> {
    check_consistent(inst, x)?;
    check_alpha(alpha)?;
    Ok(EnvyCheck::from_violations(efx_violations(inst.agents(), x.bundles(), alpha)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoCheck {
    pub pareto_optimal: bool,
    /// Lexicographically first complete allocation that Pareto-dominates the input.
    pub dominated_by: Option<Allocation>,
}

/// `n^m`, saturating.
pub fn allocation_count(n: usize, m: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..m {
        total = total.saturating_mul(n as u128);
    }
    total
}

pub(crate) fn check_enumeration_size(inst: &Instance, limit: u128) -> Result<u128> {
    let total = allocation_count(inst.n(), inst.m());
    if total > limit {
        return Err(Error::UnsupportedSize { what: "allocation count n^m", size: total, limit });
    }
    Ok(total)
}

/// Brute-force Pareto-optimality of a complete allocation.
///
/// Searches assignments depth-first in lexicographic order (item 0 first, agents in index
/// order). Because costs are monotone, a branch is cut as soon as some agent's partial bundle
/// already costs more than its bundle in `x`.
pub fn is_po_bruteforce(inst: &Instance, x: &Allocation) -> Result<PoCheck> {
    is_po_bruteforce_with_limit(inst, x, PO_ENUMERATION_LIMIT)
}

pub fn is_po_bruteforce_with_limit(inst: &Instance, x: &Allocation, limit: u128) -> Result<PoCheck> {
    check_consistent(inst, x)?;
    if !x.is_complete() {
        return Err(invalid!("Pareto-optimality is only defined for complete allocations"));
    }
    check_enumeration_size(inst, limit)?;
    let targets: Vec<Cost> = (0..inst.n()).map(|i| inst.cost(i, x.bundle(i))).collect();
    let mut bundles = vec![ItemSet::EMPTY; inst.n()];
    let found = dominate_search(inst, &targets, &mut bundles, 0);
    Ok(PoCheck {
        pareto_optimal: found.is_none(),
        dominated_by: found.map(|b| Allocation::from_parts(inst.m(), b, ItemSet::EMPTY)),
    })
}

fn dominate_search(inst: &Instance, targets: &[Cost], bundles: &mut Vec<ItemSet>, item: usize) -> Option<Vec<ItemSet>> {
    if item == inst.m() {
        let strict = (0..inst.n()).any(|i| inst.cost(i, bundles[i]) < targets[i]);
        return strict.then(|| bundles.clone());
    }
    for i in 0..inst.n() {
        let grown = bundles[i].with(item);
        if inst.cost(i, grown) > targets[i] {
            continue;
        }
        let prev = core::mem::replace(&mut bundles[i], grown);
        if let Some(found) = dominate_search(inst, targets, bundles, item + 1) {
            return Some(found);
        }
        bundles[i] = prev;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Criterion {
    Ef,
    Efx,
    AlphaEf,
    AlphaEfx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportedViolation {
    pub criterion: Criterion,
    pub i: usize,
    pub j: usize,
    pub item: Option<usize>,
}

/// Every fairness verdict for one allocation, with witnesses for each failed criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub ef: bool,
    pub efx: bool,
    pub alpha: Ratio,
    pub alpha_ef: bool,
    pub alpha_efx: bool,
    /// Present only when the brute-force Pareto check ran.
    pub po: Option<bool>,
    pub dominated_by: Option<Allocation>,
    pub social_cost: Cost,
    pub complete: bool,
    pub violations: Vec<ReportedViolation>,
}

pub fn fairness_report(inst: &Instance, x: &Allocation, alpha: Ratio, check_po: bool) -> Result<FairnessReport> {
    check_consistent(inst, x)?;
    check_alpha(alpha)?;
    let (fns, bundles) = (inst.agents(), x.bundles());
    let mut violations = Vec::new();
    let mut run = |criterion, found: Vec<Violation>| {
        let holds = found.is_empty();
        violations.extend(found.into_iter().map(|v| ReportedViolation { criterion, i: v.i, j: v.j, item: v.item }));
        holds
    };
    let ef = run(Criterion::Ef, ef_violations(fns, bundles, Ratio::ONE));
    let efx = run(Criterion::Efx, efx_violations(fns, bundles, Ratio::ONE));
    let alpha_ef = run(Criterion::AlphaEf, ef_violations(fns, bundles, alpha));
    let alpha_efx = run(Criterion::AlphaEfx, efx_violations(fns, bundles, alpha));
    let (po, dominated_by) = if check_po {
        let check = is_po_bruteforce(inst, x)?;
        (Some(check.pareto_optimal), check.dominated_by)
    } else {
        (None, None)
    };
    Ok(FairnessReport {
        ef,
        efx,
        alpha,
        alpha_ef,
        alpha_efx,
        po,
        dominated_by,
        social_cost: social_cost_of(fns, bundles),
        complete: x.is_complete(),
        violations,
    })
}

#[cfg(feature = "serde")]
impl serde::Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Allocation", 2)?;
        st.serialize_field("bundles", self.bundles())?;
        st.serialize_field("unallocated", &self.unallocated())?;
        st.end()
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for FairnessReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        use alloc::string::ToString;
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("FairnessReport", 10)?;
        st.serialize_field("ef", &self.ef)?;
        st.serialize_field("efx", &self.efx)?;
        st.serialize_field("alpha", &self.alpha.to_string())?;
        st.serialize_field("alpha_ef", &self.alpha_ef)?;
        st.serialize_field("alpha_efx", &self.alpha_efx)?;
        st.serialize_field("po", &self.po)?;
        st.serialize_field("dominated_by", &self.dominated_by)?;
        st.serialize_field("social_cost", &self.social_cost)?;
        st.serialize_field("complete", &self.complete)?;
        st.serialize_field("violations", &self.violations)?;
        st.end()
    }
}
