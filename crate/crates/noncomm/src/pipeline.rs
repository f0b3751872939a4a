//! The end-to-end verification run: order, center, perfectness, `t`,
//! classes, witnesses and both checks, stopping at the first failing stage.

use std::time::Instant;

use noncomm_core::backtrack::SearchError;
use noncomm_core::classes::{ClassError, ClassInventory, ClassOptions, ClassProgress};
use noncomm_core::groupops::{self, GroupOpsError};
use noncomm_core::machale::{self, MachaleError, WitnessList, WitnessOptions};
use noncomm_core::{PermGroup, StabilizerChain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clock::{budget, BudgetSpec};
use crate::parallel;
use crate::report::{FailureKind, Stage, StageFailure, VerificationReport};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    /// `None` runs the embedded 44-point group.
    pub group: Option<PermGroup>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub budget: BudgetSpec,
    pub classes: ClassOptions,
    pub witnesses: WitnessOptions,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub report: VerificationReport,
    pub chain: StabilizerChain,
    pub inventory: Option<ClassInventory>,
    pub witnesses: Option<WitnessList>,
}

/// Whether an error chain bottoms out in an exhausted search budget.
pub trait BudgetAware {
    fn is_budget(&self) -> bool;
}

impl BudgetAware for SearchError {
    fn is_budget(&self) -> bool {
        matches!(self, SearchError::BudgetExhausted { .. })
    }
}

impl BudgetAware for GroupOpsError {
    fn is_budget(&self) -> bool {
        matches!(self, GroupOpsError::Search(e) if e.is_budget())
    }
}

impl BudgetAware for ClassError {
    fn is_budget(&self) -> bool {
        matches!(self, ClassError::Search(e) if e.is_budget())
    }
}

impl BudgetAware for MachaleError {
    fn is_budget(&self) -> bool {
        match self {
            MachaleError::Search(e) => e.is_budget(),
            MachaleError::GroupOps(e) => e.is_budget(),
            MachaleError::Class(e) => e.is_budget(),
            _ => false,
        }
    }
}

fn failure<E: BudgetAware + std::fmt::Display>(stage: Stage, e: E) -> StageFailure {
    let kind = if e.is_budget() { FailureKind::Budget } else { FailureKind::Failed };
    StageFailure { stage, kind, message: e.to_string() }
}

fn failed(stage: Stage, message: impl Into<String>) -> StageFailure {
    StageFailure { stage, kind: FailureKind::Failed, message: message.into() }
}

struct Timer {
    start: Instant,
}

impl Timer {
    fn lap(&mut self, report: &mut VerificationReport, stage: Stage) {
        report.timings.push((stage, self.start.elapsed().as_secs_f64()));
        self.start = Instant::now();
    }
}

pub fn run_pipeline(config: &PipelineConfig, progress: &mut (dyn ClassProgress + Send)) -> PipelineRun {
    parallel::with_threads(config.threads, || run_stages(config, progress))
}

fn run_stages(config: &PipelineConfig, progress: &mut (dyn ClassProgress + Send)) -> PipelineRun {
    let mut timer = Timer { start: Instant::now() };
    let group = config.group.clone().unwrap_or_else(machale::build_machale_group);
    let mut report = VerificationReport {
        seed: config.seed,
        degree: group.degree(),
        generators: group.generators().len(),
        ..Default::default()
    };
    let chain = group.chain(0);
    timer.lap(&mut report, Stage::Build);
    let mut run = PipelineRun { report, chain, inventory: None, witnesses: None };
    if let Err(f) = stages(config, &mut run, &mut timer, progress) {
        run.report.failure = Some(f);
    }
    run
}

fn stages(
    config: &PipelineConfig,
    run: &mut PipelineRun,
    timer: &mut Timer,
    progress: &mut dyn ClassProgress,
) -> Result<(), StageFailure> {
    let clock = config.budget.start();
    let budget = budget(&config.budget, clock.as_ref());
    let chain = run.chain.clone();
    let report = &mut run.report;

    report.order = Some(chain.order());
    timer.lap(report, Stage::Order);

    let center = groupops::center(&chain, budget).map_err(|e| failure(Stage::Center, e))?;
    report.center_order = Some(center.order());
    timer.lap(report, Stage::Center);

    let derived = groupops::derived_subgroup(&chain).map_err(|e| failure(Stage::Perfectness, e))?;
    let perfect = derived.order() == chain.order();
    report.perfect = Some(perfect);
    timer.lap(report, Stage::Perfectness);
    if !perfect {
        return Err(failed(Stage::Perfectness, format!("derived subgroup has order {}", derived.order())));
    }

    let t = machale::locate_t(&chain, budget).map_err(|e| failure(Stage::T, e))?;
    report.t = Some(t.clone());
    timer.lap(report, Stage::T);

    let central: Vec<_> = (0..center.order_u64().unwrap_or(0)).map(|i| center.element_at(i)).collect();
    let inventory = parallel::enumerate_classes(&chain, &central, config.seed, &config.classes, budget, progress)
        .map_err(|e| failure(Stage::Classes, e))?;
    report.class_count = Some(inventory.len());
    timer.lap(report, Stage::Classes);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let outcome = machale::generate_witnesses(&chain, &inventory, Some(&t), &mut rng, &config.witnesses, budget)
        .map_err(|e| failure(Stage::Witnesses, e))?;
    report.witnessed = Some(outcome.witnesses.len());
    report.commutator_free = Some(outcome.commutator_free.len());
    timer.lap(report, Stage::Witnesses);
    run.witnesses = Some(outcome.witnesses.clone());
    run.inventory = Some(inventory);
    let inventory = run.inventory.as_ref().unwrap();
    let report = &mut run.report;
    if let Some(&first) = outcome.commutator_free.first() {
        let how = if outcome.definitive { "has no commutator" } else { "appears commutator-free under budget" };
        return Err(failed(
            Stage::Witnesses,
            format!("{} classes without witness; class {first} {how}", outcome.commutator_free.len()),
        ));
    }

    let check = machale::check_commutators(&chain, inventory, &outcome.witnesses, Some(&t), budget)
        .map_err(|e| failure(Stage::Checks, e))?;
    report.witnesses_check = Some(check.passed());
    let pairing =
        machale::check_central_noncommutator(&chain, inventory, &t, budget).map_err(|e| failure(Stage::Checks, e))?;
    report.t_noncommutator = Some(pairing.t_is_noncommutator());
    timer.lap(report, Stage::Checks);
    if !check.passed() {
        return Err(failed(Stage::Checks, format!("witnesses cover {} of {} classes", check.covered, check.expected)));
    }
    if let Some(&c) = pairing.fixed.first() {
        return Err(failed(Stage::Checks, format!("t fixes class {c}, so t is a commutator")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use noncomm_core::classes::Silent;
    use noncomm_core::Perm;

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect()).unwrap()
    }

    fn run(g: PermGroup) -> PipelineRun {
        let config = PipelineConfig { group: Some(g), seed: 3, ..Default::default() };
        run_pipeline(&config, &mut Silent)
    }

    #[test]
    fn s4_fails_at_perfectness() {
        let r = run(group(4, &["(1,2)", "(1,2,3,4)"])).report;
        assert_eq!(r.perfect, Some(false));
        assert_eq!(r.failure.as_ref().unwrap().stage, Stage::Perfectness);
        assert!(r.t.is_none());
        assert!(!r.theorem_reproduced());
    }

    #[test]
    fn a5_fails_at_t() {
        let r = run(group(5, &["(1,2,3)", "(1,2,3,4,5)"])).report;
        assert_eq!(r.perfect, Some(true));
        assert_eq!(r.center_order, Some(1u64.into()));
        assert_eq!(r.failure.as_ref().unwrap().stage, Stage::T);
    }

    #[test]
    fn sl2_5_fails_at_checks() {
        // SL(2,5) on the 24 nonzero vectors of F_5^2: perfect, center of order 2,
        // and its central involution is a commutator.
        let g = sl2_5();
        let r = run(g);
        assert_eq!(r.report.order, Some(120u64.into()));
        assert_eq!(r.report.center_order, Some(2u64.into()));
        assert_eq!(r.report.perfect, Some(true));
        assert_eq!(r.report.class_count, Some(9));
        assert_eq!(r.report.witnessed, Some(8));
        assert_eq!(r.report.t_noncommutator, Some(false));
        assert_eq!(r.report.failure.as_ref().unwrap().stage, Stage::Checks);
    }

    /// SL(2,5) acting on nonzero vectors of F_5^2.
    pub(crate) fn sl2_5() -> PermGroup {
        let vectors: Vec<(u8, u8)> =
            (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).filter(|&v| v != (0, 0)).collect();
        let index = |v: (u8, u8)| vectors.iter().position(|&w| w == v).unwrap();
        let act = |m: [u8; 4]| {
            let images: Vec<usize> =
                vectors.iter().map(|&(x, y)| index(((m[0] * x + m[1] * y) % 5, (m[2] * x + m[3] * y) % 5))).collect();
            Perm::from_images(&images).unwrap()
        };
        PermGroup::new(24, vec![act([1, 1, 0, 1]), act([0, 4, 1, 0])]).unwrap()
    }

    #[test]
    fn budget_failure_is_marked() {
        let config = PipelineConfig {
            group: Some(group(5, &["(1,2,3)", "(1,2,3,4,5)"])),
            budget: BudgetSpec { nodes: Some(0), seconds: None },
            ..Default::default()
        };
        let r = run_pipeline(&config, &mut Silent).report;
        let f = r.failure.unwrap();
        assert_eq!(f.stage, Stage::Center);
        assert_eq!(f.kind, FailureKind::Budget);
    }
}
