//! Exhaustive and sampled membership tests for the function classes.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::cost::{Cost, SetFunction};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// Largest domain [`check_class`] enumerates.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Trials used by [`sample_class`] when the caller has no preference.
pub const DEFAULT_SAMPLE_TRIALS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassProperty {
    BinaryMarginal,
    Monotone,
    Additive,
    Cancelable,
    Submodular,
}

/// A falsifying triple for one property.
///
/// * binary marginal / monotone: `c(s + e) - c(s)` is out of range; `t == s`.
/// * additive: `c(s)` differs from the sum of singleton costs; `t` empty, no `e`.
/// * cancelable: `c(s + e) > c(t + e)` but `c(s) <= c(t)`.
/// * submodular: `s ⊆ t` and `c(e | s) < c(e | t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassWitness {
    pub property: ClassProperty,
    pub s: ItemSet,
    pub t: ItemSet,
    pub e: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionClassReport {
    pub binary_marginal: bool,
    pub monotone: bool,
    pub additive: bool,
    pub cancelable: bool,
    pub submodular: bool,
    /// At most one witness per failed property.
    pub witnesses: Vec<ClassWitness>,
    /// `false` when the flags only mean "no counterexample found by sampling".
    pub exhaustive: bool,
}

impl FunctionClassReport {
    pub fn witness(&self, property: ClassProperty) -> Option<&ClassWitness> {
        self.witnesses.iter().find(|w| w.property == property)
    }

    /// The class containments that must hold on every report.
    pub fn containments_hold(&self) -> bool {
        (!self.additive || self.cancelable) && (!(self.cancelable && self.binary_marginal) || self.submodular)
    }
}

/// Decides every class property by enumeration over the function's domain.
///
/// Cost is `O(k² 2^k)` for a domain of `k` items. Cancelability uses the fact that for a
/// fixed `e` a violation exists iff some `S` with `c(S) = a` has a larger `c(S + e)` than
/// some `T` with `c(T) >= a`, which a prefix maximum over cost levels finds in one pass.
/// Submodularity is checked through its local form `c(e | S) >= c(e | S + f)`.
pub fn check_class<F: SetFunction>(f: &F) -> Result<FunctionClassReport> {
    let domain = f.domain();
    let k = domain.len();
    if k > EXHAUSTIVE_LIMIT {
        return Err(Error::UnsupportedSize {
            what: "exhaustive class check domain",
            size: k as u128,
            limit: EXHAUSTIVE_LIMIT as u128,
        });
    }
    let items: Vec<usize> = domain.iter().collect();
    let mut witnesses = Vec::new();

    let mut binary_marginal = true;
    let mut monotone = true;
    'outer: for s in domain.subsets() {
        let cs = f.cost(s);
        for &e in &items {
            if s.contains(e) {
                continue;
            }
            let ce = f.cost(s.with(e));
            if ce < cs && monotone {
                monotone = false;
                witnesses.push(ClassWitness { property: ClassProperty::Monotone, s, t: s, e: Some(e) });
            }
            if binary_marginal && !(ce == cs || ce == cs + 1) {
                binary_marginal = false;
                witnesses.push(ClassWitness { property: ClassProperty::BinaryMarginal, s, t: s, e: Some(e) });
            }
            if !monotone && !binary_marginal {
                break 'outer;
            }
        }
    }

    let singles: Vec<Cost> =
        (0..f.num_items()).map(|e| if domain.contains(e) { f.cost(ItemSet::singleton(e)) } else { 0 }).collect();
    let additive = match domain.subsets().find(|&s| f.cost(s) != s.iter().map(|e| singles[e]).sum::<Cost>()) {
        Some(s) => {
            witnesses.push(ClassWitness { property: ClassProperty::Additive, s, t: ItemSet::EMPTY, e: None });
            false
        }
        None => true,
    };

    let cancelable = match cancelable_witness(f, domain, &items) {
        Some(w) => {
            witnesses.push(w);
            false
        }
        None => true,
    };

    let submodular = match submodular_witness(f, domain, &items) {
        Some(w) => {
            witnesses.push(w);
            false
        }
        None => true,
    };

    Ok(FunctionClassReport { binary_marginal, monotone, additive, cancelable, submodular, witnesses, exhaustive: true })
}

fn cancelable_witness<F: SetFunction>(f: &F, domain: ItemSet, items: &[usize]) -> Option<ClassWitness> {
    let top = domain.subsets().map(|s| f.cost(s)).max().unwrap_or(0) as usize;
    // Per cost level a: the set with the largest c(S + e), and the set with the smallest.
    let mut hi: Vec<Option<(Cost, ItemSet)>> = vec![None; top + 1];
    let mut lo: Vec<Option<(Cost, ItemSet)>> = vec![None; top + 1];
    for &e in items {
        hi.iter_mut().for_each(|x| *x = None);
        lo.iter_mut().for_each(|x| *x = None);
        for s in domain.without(e).subsets() {
            let a = f.cost(s) as usize;
            let b = f.cost(s.with(e));
            if hi[a].is_none_or(|(v, _)| b >= v) {
                hi[a] = Some((b, s));
            }
            if lo[a].is_none_or(|(v, _)| b < v) {
                lo[a] = Some((b, s));
            }
        }
        let mut best: Option<(Cost, ItemSet)> = None;
        for a in 0..=top {
            if let Some((v, s)) = hi[a] {
                if best.is_none_or(|(bv, _)| v >= bv) {
                    best = Some((v, s));
                }
            }
            if let (Some((bv, s)), Some((lv, t))) = (best, lo[a]) {
                if bv > lv {
                    return Some(ClassWitness { property: ClassProperty::Cancelable, s, t, e: Some(e) });
                }
            }
        }
    }
    None
}

fn submodular_witness<F: SetFunction>(f: &F, domain: ItemSet, items: &[usize]) -> Option<ClassWitness> {
    for s in domain.subsets() {
        let cs = f.cost(s);
        for &e in items {
            if s.contains(e) {
                continue;
            }
            let gain = f.cost(s.with(e)) as i64 - cs as i64;
            for &g in items {
                if g == e || s.contains(g) {
                    continue;
                }
                let t = s.with(g);
                let later = f.cost(t.with(e)) as i64 - f.cost(t) as i64;
                if gain < later {
                    return Some(ClassWitness { property: ClassProperty::Submodular, s, t, e: Some(e) });
                }
            }
        }
    }
    None
}

/// Randomized class test for domains too large to enumerate.
///
/// Each trial draws `S`, `T` uniformly from the subsets of the domain and `e` uniformly from
/// its items, then tests every property on that triple. A `true` flag means no trial found a
/// counterexample; `exhaustive` is `false` in the returned report.
pub fn sample_class<F: SetFunction, R: RngCore>(f: &F, rng: &mut R, trials: usize) -> FunctionClassReport {
    let domain = f.domain();
    let items: Vec<usize> = domain.iter().collect();
    let mut report = FunctionClassReport {
        binary_marginal: true,
        monotone: true,
        additive: true,
        cancelable: true,
        submodular: true,
        witnesses: Vec::new(),
        exhaustive: false,
    };
    if items.is_empty() {
        return report;
    }
    let fail = |report: &mut FunctionClassReport, w: ClassWitness| {
        let flag = match w.property {
            ClassProperty::BinaryMarginal => &mut report.binary_marginal,
            ClassProperty::Monotone => &mut report.monotone,
            ClassProperty::Additive => &mut report.additive,
            ClassProperty::Cancelable => &mut report.cancelable,
            ClassProperty::Submodular => &mut report.submodular,
        };
        if *flag {
            *flag = false;
            report.witnesses.push(w);
        }
    };
    for _ in 0..trials {
        let s0 = ItemSet::from_bits(rng.next_u64() & domain.bits());
        let t0 = ItemSet::from_bits(rng.next_u64() & domain.bits());
        let e = items[(rng.next_u64() % items.len() as u64) as usize];
        let (s, t) = (s0.without(e), t0.without(e));
        let (cs, ct, cse, cte) = (f.cost(s), f.cost(t), f.cost(s.with(e)), f.cost(t.with(e)));

        if cse < cs {
            fail(&mut report, ClassWitness { property: ClassProperty::Monotone, s, t: s, e: Some(e) });
        }
        if !(cse == cs || cse == cs + 1) {
            fail(&mut report, ClassWitness { property: ClassProperty::BinaryMarginal, s, t: s, e: Some(e) });
        }
        let sum: Cost = s0.iter().map(|x| f.cost(ItemSet::singleton(x))).sum();
        if f.cost(s0) != sum {
            fail(&mut report, ClassWitness { property: ClassProperty::Additive, s: s0, t: ItemSet::EMPTY, e: None });
        }
        if cse > cte && cs <= ct {
            fail(&mut report, ClassWitness { property: ClassProperty::Cancelable, s, t, e: Some(e) });
        }
        let inner = s.intersection(t);
        let ci = f.cost(inner);
        if (f.cost(inner.with(e)) as i64 - ci as i64) < (cte as i64 - ct as i64) {
            fail(&mut report, ClassWitness { property: ClassProperty::Submodular, s: inner, t, e: Some(e) });
        }
    }
    report
}
