//! The four allocation algorithms and the reporting they share.

mod additive;
mod cancelable;
mod general;
mod submodular;

pub use additive::{partition_items, solve_additive, ItemPartition};
pub use cancelable::{phase1, phase2, solve_cancelable, Phase1Result, Phase2Outcome};
pub use general::{run_general_loop, solve_general, GeneralOutcome};
pub use submodular::{compute_m1, solve_submodular};

use alloc::format;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt;
use core::str::FromStr;

use crate::allocation::Allocation;
use crate::class::check_class;
use crate::cost::{Cost, CostFunction, Descriptor, FunctionClass, SetFunction};
use crate::error::{invalid, Error, Result};
use crate::fairness::{fairness_report, FairnessReport, Ratio};
use crate::instance::Instance;
use crate::itemset::ItemSet;

/// Tables over at most this many items are checked exhaustively before a solver trusts them.
pub const VERIFY_CLASS_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    Auto,
    Additive,
    Cancelable,
    General,
    Submodular,
}

impl Algorithm {
    /// The strongest algorithm the declared class supports.
    pub fn for_class(class: FunctionClass) -> Algorithm {
        match class {
            FunctionClass::Additive => Algorithm::Additive,
            FunctionClass::Cancelable => Algorithm::Cancelable,
            FunctionClass::Submodular => Algorithm::Submodular,
            FunctionClass::General => Algorithm::General,
        }
    }

    /// Weakest class the algorithm accepts.
    pub fn required_class(self) -> FunctionClass {
        match self {
            Algorithm::Additive => FunctionClass::Additive,
            Algorithm::Cancelable => FunctionClass::Cancelable,
            Algorithm::Submodular => FunctionClass::Submodular,
            Algorithm::General | Algorithm::Auto => FunctionClass::General,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Additive => "additive",
            Algorithm::Cancelable => "cancelable",
            Algorithm::General => "general",
            Algorithm::Submodular => "submodular",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "additive" => Ok(Algorithm::Additive),
            "cancelable" => Ok(Algorithm::Cancelable),
            "general" => Ok(Algorithm::General),
            "submodular" => Ok(Algorithm::Submodular),
            _ => Err(invalid!("unknown algorithm {s:?}")),
        }
    }
}

/// What a solver promises about its output. Always confirmed by a checker before a
/// report is returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum GuaranteeTag {
    EfxAndPo,
    Efx,
    PartialEf,
    TwoEf,
    TwoEfx,
}

impl fmt::Display for GuaranteeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuaranteeTag::EfxAndPo => "EFX_AND_PO",
            GuaranteeTag::Efx => "EFX",
            GuaranteeTag::PartialEf => "PARTIAL_EF",
            GuaranteeTag::TwoEf => "TWO_EF",
            GuaranteeTag::TwoEfx => "TWO_EFX",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counters {
    /// Main-loop iterations (rounds for the additive algorithm).
    pub iterations: u64,
    /// Phase-2 loop iterations of the cancelable algorithm.
    pub phase2_iterations: u64,
    /// Reassignment branches taken by the additive algorithm.
    pub reassignments: u64,
    /// Cost-function evaluations made by the solver itself, excluding final verification.
    pub cost_evaluations: u64,
    /// Single-item placements and moves between bundles.
    pub item_moves: u64,
}

impl Counters {
    /// Cost evaluations plus item moves.
    pub fn basic_operations(&self) -> u64 {
        self.cost_evaluations + self.item_moves
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Phase2Branch {
    /// Zero-marginal item added while keeping EFX.
    Add,
    /// Two zero-cost bundles merged; the freed agent takes the item alone.
    Merge,
    /// Zero-cost agent takes the item.
    Take,
    /// Bundles exchanged; nothing allocated.
    Swap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "event", rename_all = "snake_case"))]
pub enum TraceEvent {
    ZeroCostAssign { agent: usize, item: usize },
    Assign { round: u64, agent: usize, item: usize },
    Reassign { round: u64, agent: usize, to: usize, item: usize, moved: Vec<usize> },
    Phase1Round { round: u64, items: Vec<usize> },
    Seed { agent: usize, item: usize },
    Phase2Step { iteration: u64, branch: Phase2Branch, agent: usize, other: Option<usize>, item: Option<usize> },
    ZeroMarginal { iteration: u64, agent: usize, item: usize },
    Rotate { iteration: u64, cycle: Vec<usize>, item: usize },
    TailBatch { iteration: u64, scc: Vec<usize>, items: Vec<usize> },
    Stop { iteration: u64, scc: Vec<usize>, remaining: Vec<usize> },
    Leftover { agent: usize, item: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Record a [`TraceEvent`] for every step.
    pub trace: bool,
    /// Maintain the envy graph incrementally instead of rebuilding it each iteration.
    pub incremental_graph: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub allocation: Allocation,
    pub guarantee: GuaranteeTag,
    /// Which branch of the submodular dispatcher ran (1 or 2).
    pub case: Option<u8>,
    pub counters: Counters,
    pub trace: Vec<TraceEvent>,
    /// Checker verdicts on the output, at α = 1 or α = 2 depending on the guarantee.
    pub verification: FairnessReport,
}

/// Runs the algorithm named by `algorithm`, resolving `Auto` from the declared class.
pub fn solve(inst: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<SolveReport> {
    match algorithm {
        Algorithm::Auto => solve(inst, Algorithm::for_class(inst.declared_class()), opts),
        Algorithm::Additive => solve_additive(inst, opts),
        Algorithm::Cancelable => solve_cancelable(inst, opts),
        Algorithm::General => solve_general(inst, opts),
        Algorithm::Submodular => solve_submodular(inst, opts),
    }
}

/// Confirms that every agent belongs to `required`.
///
/// The declared class must be at least `required`. Agents whose descriptor kind guarantees
/// the class pass immediately; tables are checked exhaustively when `m <= 12` and trusted
/// (on the strength of the declaration) above that.
pub fn verify_class(inst: &Instance, required: FunctionClass) -> Result<()> {
    if inst.declared_class() < required {
        return Err(Error::WrongClass(format!(
            "instance is declared {}, algorithm needs {}",
            inst.declared_class().name(),
            required.name()
        )));
    }
    for (i, f) in inst.agents().iter().enumerate() {
        verify_agent(i, f, required)?;
    }
    Ok(())
}

fn verify_agent(i: usize, f: &CostFunction, required: FunctionClass) -> Result<()> {
    match f.guaranteed_class() {
        None => Err(Error::WrongClass(format!("agent {i} does not have binary marginals"))),
        Some(kind) if kind >= required => Ok(()),
        Some(_) if matches!(f.descriptor(), Descriptor::Table { .. }) => {
            if f.m() > VERIFY_CLASS_LIMIT {
                return Ok(());
            }
            let r = check_class(f)?;
            let ok = r.binary_marginal
                && match required {
                    FunctionClass::General => true,
                    FunctionClass::Submodular => r.submodular,
                    FunctionClass::Cancelable => r.cancelable,
                    FunctionClass::Additive => r.additive,
                };
            if ok {
                Ok(())
            } else {
                Err(Error::WrongClass(format!("agent {i}'s table is not {}", required.name())))
            }
        }
        Some(kind) => {
            Err(Error::WrongClass(format!("agent {i} is {}, only guaranteed {}", f.kind_name(), kind.name())))
        }
    }
}

/// Counts every evaluation made through it.
pub(crate) struct Counted<'a, F> {
    f: &'a F,
    count: &'a Cell<u64>,
}

impl<'a, F> Counted<'a, F> {
    pub(crate) fn wrap(fns: &'a [F], count: &'a Cell<u64>) -> Vec<Counted<'a, F>> {
        fns.iter().map(|f| Counted { f, count }).collect()
    }
}

impl<F: SetFunction> SetFunction for Counted<'_, F> {
    fn num_items(&self) -> usize {
        self.f.num_items()
    }
    fn domain(&self) -> ItemSet {
        self.f.domain()
    }
    #[inline]
    fn cost(&self, s: ItemSet) -> Cost {
        self.count.set(self.count.get() + 1);
        self.f.cost(s)
    }
}

pub(crate) struct Recorder {
    trace_on: bool,
    pub(crate) trace: Vec<TraceEvent>,
    pub(crate) counters: Counters,
}

impl Recorder {
    pub(crate) fn new(opts: &SolveOptions) -> Self {
        Recorder { trace_on: opts.trace, trace: Vec::new(), counters: Counters::default() }
    }

    #[inline]
    pub(crate) fn event(&mut self, make: impl FnOnce() -> TraceEvent) {
        if self.trace_on {
            self.trace.push(make());
        }
    }
}

pub(crate) fn finish(
    inst: &Instance,
    algorithm: Algorithm,
    allocation: Allocation,
    guarantee: GuaranteeTag,
    case: Option<u8>,
    rec: Recorder,
) -> Result<SolveReport> {
    let alpha = match guarantee {
        GuaranteeTag::TwoEf | GuaranteeTag::TwoEfx => Ratio::TWO,
        _ => Ratio::ONE,
    };
    let verification = fairness_report(inst, &allocation, alpha, false)?;
    let confirmed = match guarantee {
        GuaranteeTag::EfxAndPo | GuaranteeTag::Efx => verification.complete && verification.efx,
        GuaranteeTag::PartialEf => verification.ef,
        GuaranteeTag::TwoEf => verification.complete && verification.alpha_ef && verification.alpha_efx,
        GuaranteeTag::TwoEfx => verification.complete && verification.alpha_efx,
    };
    if !confirmed {
        return Err(Error::InvariantViolation(format!(
            "{} output failed its {guarantee} check: {:?}",
            algorithm.name(),
            verification.violations
        )));
    }
    Ok(SolveReport { algorithm, allocation, guarantee, case, counters: rec.counters, trace: rec.trace, verification })
}
