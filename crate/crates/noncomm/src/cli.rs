//! Command-line front end. Every subcommand is a thin adapter over library
//! calls; [`run`] takes explicit output streams so it can be tested
//! in-process.
//!
//! Exit codes: 0 success, 1 other error (I/O, bad input combination),
//! 2 parse error, 3 search budget exhausted, 4 verification failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use noncomm_core::backtrack::SearchBudget;
use noncomm_core::classes::{ClassFingerprint, ClassInventory, ClassOptions, ClassProgress, ConjugacyClass};
use noncomm_core::groupops::{self, block_systems_through_first_point, wreath_imprimitive};
use noncomm_core::machale::{self, WitnessOptions};
use noncomm_core::oracle::{self, DEFAULT_CAP};
use noncomm_core::{same_group, GroupOrder, Perm, PermGroup, StabilizerChain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clock::{budget, BudgetSpec, WallClock};
use crate::formats::{self, FormatError, GroupFile, WitnessFile};
use crate::parallel;
use crate::pipeline::{self, BudgetAware, PipelineConfig, DEFAULT_SEED};
use crate::report::FailureKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

/// Default report path of `verify`.
pub const DEFAULT_REPORT: &str = "noncomm-verify.report";

#[derive(Parser, Debug)]
#[command(name = "noncomm", version, about = "Permutation-group engine and one-noncommutator verifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group file (`degree <n>` then one generator per line); defaults to the
    /// embedded 44-point group.
    #[arg(long, global = true, value_name = "FILE")]
    pub group: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for class enumeration (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Use brute-force enumeration (small groups only).
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Node limit for each backtrack search.
    #[arg(long, global = true, value_name = "N")]
    pub budget_nodes: Option<u64>,
    /// Wall-clock limit for backtrack searches, in seconds.
    #[arg(long, global = true, value_name = "S")]
    pub budget_secs: Option<f64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Print the group order.
    Order,
    /// Print the center order and its nonidentity elements (if few).
    Center,
    /// Print the order of the derived subgroup.
    Derived,
    /// Print whether the group is perfect.
    Perfect,
    /// Minimal block systems, block actions, and the wreath-product check.
    Blocks,
    /// Enumerate conjugacy classes; `--out` receives the inventory.
    Classes,
    /// Generate commutator witnesses; `--out` receives the witness list.
    Witnesses {
        /// Inventory file from `classes` (recomputed when absent).
        #[arg(long, value_name = "FILE")]
        inventory: Option<PathBuf>,
    },
    /// Check a witness list against the classes.
    Check {
        #[arg(long, value_name = "FILE")]
        inventory: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        witnesses: PathBuf,
    },
    /// Run the whole verification and write the report files.
    Verify,
    /// The central-quotient construction, checked exhaustively on small groups.
    QuotientDemo,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] FormatError),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Other(_) => EXIT_ERROR,
        }
    }
}

fn lib_err<E: BudgetAware + std::fmt::Display>(e: E) -> CliError {
    if e.is_budget() {
        CliError::Budget(e.to_string())
    } else {
        CliError::Other(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Other(format!("{}: {e}", path.display()))
}

/// Stall diagnostics of the random class route, streamed to stderr.
struct StallReporter<'a> {
    err: &'a mut (dyn Write + Send),
}

impl ClassProgress for StallReporter<'_> {
    fn stalled(&mut self, draws: u64, residual: &GroupOrder, census: &[(ClassFingerprint, usize)]) {
        let _ =
            writeln!(self.err, "stall after {draws} draws: residual mass {residual}, {} fingerprints", census.len());
        for (f, n) in census {
            let _ = writeln!(self.err, "  {n} x {f}");
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub struct Context {
    pub file: GroupFile,
    pub group: PermGroup,
    pub chain: StabilizerChain,
    pub budget: BudgetSpec,
    pub clock: Option<WallClock>,
}

impl Context {
    pub fn load(common: &Common) -> Result<Context, CliError> {
        let file = match &common.group {
            Some(path) => GroupFile::read(path)?,
            None => GroupFile::embedded(),
        };
        let group = file.to_group();
        let chain = group.chain(0);
        let budget = BudgetSpec { nodes: common.budget_nodes, seconds: common.budget_secs };
        let clock = budget.start();
        Ok(Context { file, group, chain, budget, clock })
    }

    pub fn budget(&self) -> SearchBudget<'_> {
        budget(&self.budget, self.clock.as_ref())
    }

    fn table(&self) -> Result<oracle::ElementTable, CliError> {
        oracle::enumerate_elements(&self.group, DEFAULT_CAP).map_err(|e| CliError::Other(e.to_string()))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn execute(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let common = &cli.common;
    let w = |out: &mut (dyn Write + Send), text: String| -> Result<(), CliError> {
        out.write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string()))
    };
    match &cli.command {
        Command::Order => {
            let ctx = Context::load(common)?;
            let order = if common.oracle { GroupOrder::from(ctx.table()?.len() as u64) } else { ctx.chain.order() };
            w(out, format!("{order}\n"))?;
        }
        Command::Center => {
            let ctx = Context::load(common)?;
            let elements: Vec<Perm> = if common.oracle {
                oracle::brute_center(&ctx.table()?)
            } else {
                let z = groupops::center(&ctx.chain, ctx.budget()).map_err(lib_err)?;
                if z.order_u64().is_some_and(|n| n <= 64) {
                    (0..z.order_u64().unwrap()).map(|i| z.element_at(i)).collect()
                } else {
                    w(out, format!("{}\n", z.order()))?;
                    for g in z.strong_generators() {
                        w(out, format!("generator {}\n", g.to_cycle_string()))?;
                    }
                    return Ok(EXIT_OK);
                }
            };
            w(out, format!("{}\n", elements.len()))?;
            let mut nontrivial: Vec<&Perm> = elements.iter().filter(|z| !z.is_identity()).collect();
            nontrivial.sort();
            for z in nontrivial {
                let label = if elements.len() == 2 { "t" } else { "element" };
                w(out, format!("{label} {}\n", z.to_cycle_string()))?;
            }
        }
        Command::Derived => {
            let ctx = Context::load(common)?;
            let order = if common.oracle {
                GroupOrder::from(oracle::brute_derived(&ctx.table()?).len() as u64)
            } else {
                groupops::derived_subgroup(&ctx.chain).map_err(lib_err)?.order()
            };
            w(out, format!("{order}\n"))?;
        }
        Command::Perfect => {
            let ctx = Context::load(common)?;
            let perfect = if common.oracle {
                let table = ctx.table()?;
                oracle::brute_derived(&table).len() == table.len()
            } else {
                groupops::is_perfect(&ctx.chain).map_err(lib_err)?
            };
            w(out, format!("{perfect}\n"))?;
        }
        Command::Blocks => {
            let ctx = Context::load(common)?;
            let systems = block_systems_through_first_point(&ctx.group);
            w(out, format!("block_systems {}\n", systems.len()))?;
            for bs in &systems {
                let q = groupops::block_action(&ctx.group, bs).map_err(lib_err)?;
                let qc = q.chain(0);
                let stabilizer = &qc.order() / &GroupOrder::from(bs.len() as u64);
                let kernel = &ctx.chain.order() / &qc.order();
                let first: Vec<String> = bs.blocks()[0].iter().map(|p| (p + 1).to_string()).collect();
                w(
                    out,
                    format!(
                        "blocks {} size {} first {{{}}} action_order {} point_stabilizer_order {} kernel_order {}\n",
                        bs.len(),
                        bs.block_size(),
                        first.join(","),
                        qc.order(),
                        stabilizer,
                        kernel
                    ),
                )?;
                if bs.block_size() == 2 {
                    let (h, _) = wreath_imprimitive(2, &q).map_err(lib_err)?;
                    let hc = h.chain(0);
                    let d = groupops::derived_subgroup(&hc).map_err(lib_err)?;
                    let same = same_group(&d, &ctx.chain).map_err(|e| CliError::Other(e.to_string()))?;
                    w(
                        out,
                        format!(
                            "wreath_order {} wreath_derived_order {} wreath_derived_equals_group {}\n",
                            hc.order(),
                            d.order(),
                            same
                        ),
                    )?;
                }
            }
        }
        Command::Classes => {
            let ctx = Context::load(common)?;
            let inventory = if common.oracle { oracle_inventory(&ctx)? } else { compute_classes(&ctx, common, err)? };
            if let Some(path) = &common.out {
                write_file(path, &formats::write_inventory(&inventory, ctx.file.degree))?;
            }
            w(out, format!("{}\n", inventory.len()))?;
        }
        Command::Witnesses { inventory } => {
            let ctx = Context::load(common)?;
            let inv = load_or_compute_inventory(&ctx, common, inventory.as_deref(), err)?;
            let t = locate_t_if_any(&ctx)?;
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let outcome = machale::generate_witnesses(
                &ctx.chain,
                &inv,
                t.as_ref(),
                &mut rng,
                &WitnessOptions::default(),
                ctx.budget(),
            )
            .map_err(lib_err)?;
            let file = WitnessFile { degree: ctx.file.degree, seed: common.seed, witnesses: outcome.witnesses.clone() };
            if let Some(path) = &common.out {
                write_file(path, &formats::write_witnesses(&file))?;
            }
            w(out, format!("{}\n", outcome.witnesses.len()))?;
            for &c in &outcome.commutator_free {
                let how =
                    if outcome.definitive { "contains no commutator" } else { "appears commutator-free under budget" };
                w(out, format!("class {c} {how}: {}\n", inv.classes()[c].representative().to_cycle_string()))?;
            }
        }
        Command::Check { inventory, witnesses } => {
            let ctx = Context::load(common)?;
            let inv = load_or_compute_inventory(&ctx, common, inventory.as_deref(), err)?;
            let file = formats::parse_witnesses(&formats::read_text(witnesses)?)?;
            if file.degree != ctx.file.degree {
                return Err(CliError::Other(format!(
                    "witness file has degree {}, group has degree {}",
                    file.degree, ctx.file.degree
                )));
            }
            let t = locate_t_if_any(&ctx)?;
            let check = machale::check_commutators(&ctx.chain, &inv, &file.witnesses, t.as_ref(), ctx.budget())
                .map_err(lib_err)?;
            w(out, format!("classes {}\n", inv.len()))?;
            w(out, format!("witnesses {}\n", file.witnesses.len()))?;
            w(out, format!("covered {} of {}\n", check.covered, check.expected))?;
            w(out, format!("duplicates {}\n", check.duplicates.len()))?;
            for (a, b) in &check.duplicates {
                w(out, format!("duplicate class {}: witnesses {} and {}\n", check.classes[*b], a + 1, b + 1))?;
            }
            w(out, format!("t_class_hits {}\n", check.t_hits.len()))?;
            w(out, format!("missing {}\n", check.missing.len()))?;
            if let Some(&first) = check.missing.first() {
                let rep = inv.classes()[first].representative().to_cycle_string();
                w(out, format!("first missing class {first}: {rep}\n"))?;
            }
            if check.passed() {
                w(out, "PASS\n".into())?;
            } else {
                w(out, "FAIL\n".into())?;
                return Ok(EXIT_VERIFICATION);
            }
        }
        Command::Verify => return verify(common, out, err),
        Command::QuotientDemo => return quotient_demo(common, out),
    }
    Ok(EXIT_OK)
}

fn compute_classes(ctx: &Context, common: &Common, err: &mut (dyn Write + Send)) -> Result<ClassInventory, CliError> {
    let z = groupops::center(&ctx.chain, ctx.budget()).map_err(lib_err)?;
    let central: Vec<Perm> = match z.order_u64() {
        Some(n) if n <= 1 << 12 => (0..n).map(|i| z.element_at(i)).collect(),
        _ => Vec::new(),
    };
    let mut progress = StallReporter { err };
    parallel::with_threads(common.threads, || {
        let budget = ctx.budget();
        parallel::enumerate_classes(&ctx.chain, &central, common.seed, &ClassOptions::default(), budget, &mut progress)
    })
    .map_err(lib_err)
}

fn oracle_inventory(ctx: &Context) -> Result<ClassInventory, CliError> {
    let table = ctx.table()?;
    let order = GroupOrder::from(table.len() as u64);
    let mut parts = oracle::brute_classes(&table);
    parts.sort();
    let classes = parts
        .iter()
        .map(|part| {
            let size = GroupOrder::from(part.len() as u64);
            let centralizer = &order / &size;
            ConjugacyClass::new(table.elements()[part[0]].clone(), centralizer, size, &order)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Other(e.to_string()))?;
    ClassInventory::from_classes(order, classes).map_err(|e| CliError::Other(e.to_string()))
}

/// Stored inventories get lookup tables attached when the group allows it;
/// the tables are recomputed, then matched class by class.
fn load_or_compute_inventory(
    ctx: &Context,
    common: &Common,
    path: Option<&Path>,
    err: &mut (dyn Write + Send),
) -> Result<ClassInventory, CliError> {
    let fresh = compute_classes(ctx, common, err)?;
    let Some(path) = path else { return Ok(fresh) };
    let file = formats::parse_inventory(&formats::read_text(path)?)?;
    if file.degree != ctx.file.degree {
        return Err(CliError::Other(format!(
            "inventory has degree {}, group has degree {}",
            file.degree, ctx.file.degree
        )));
    }
    let mut inv = file.inventory;
    if inv.group_order() != &ctx.chain.order() {
        return Err(CliError::Verification(format!(
            "inventory is for a group of order {}, not {}",
            inv.group_order(),
            ctx.chain.order()
        )));
    }
    if fresh.has_tables() {
        inv.attach_tables(&ctx.chain, fresh).map_err(|e| CliError::Verification(e.to_string()))?;
    }
    Ok(inv)
}

fn locate_t_if_any(ctx: &Context) -> Result<Option<Perm>, CliError> {
    let z = groupops::center(&ctx.chain, ctx.budget()).map_err(lib_err)?;
    if z.order() != 2 {
        return Ok(None);
    }
    Ok(Some(machale::locate_t(&ctx.chain, ctx.budget()).map_err(lib_err)?))
}

fn verify(common: &Common, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let group = match &common.group {
        Some(path) => Some(GroupFile::read(path)?.to_group()),
        None => None,
    };
    let config = PipelineConfig {
        group,
        seed: common.seed,
        threads: common.threads,
        budget: BudgetSpec { nodes: common.budget_nodes, seconds: common.budget_secs },
        ..Default::default()
    };
    let mut progress = StallReporter { err };
    let run = pipeline::run_pipeline(&config, &mut progress);
    let path = common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
    let report = &run.report;
    write_file(&path, &report.to_text())?;
    write_file(&with_suffix(&path, ".timings"), &report.timings_text())?;
    if let Some(inv) = &run.inventory {
        write_file(&with_suffix(&path, ".inventory"), &formats::write_inventory(inv, report.degree))?;
    }
    if let Some(list) = &run.witnesses {
        let file = WitnessFile { degree: report.degree, seed: common.seed, witnesses: list.clone() };
        write_file(&with_suffix(&path, ".witnesses"), &formats::write_witnesses(&file))?;
    }
    let wr = |out: &mut (dyn Write + Send), s: String| {
        out.write_all(s.as_bytes()).map_err(|e| CliError::Other(e.to_string()))
    };
    wr(out, report.to_text())?;
    wr(out, report.timings_text())?;
    wr(out, format!("{}\n", report.summary()))?;
    Ok(match &report.failure {
        _ if report.theorem_reproduced() => EXIT_OK,
        Some(f) if f.kind == FailureKind::Budget => EXIT_BUDGET,
        _ => EXIT_VERIFICATION,
    })
}

fn quotient_demo(common: &Common, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let ctx = Context::load(common)?;
    let t = machale::locate_t(&ctx.chain, ctx.budget()).map_err(lib_err)?;
    let step = machale::corollary_step(&ctx.chain, &t).map_err(lib_err)?;
    let wr = |out: &mut (dyn Write + Send), s: String| {
        out.write_all(s.as_bytes()).map_err(|e| CliError::Other(e.to_string()))
    };
    wr(out, format!("group_order {}\n", ctx.chain.order()))?;
    wr(out, format!("t {}\n", t.to_cycle_string()))?;
    wr(out, format!("quotient_order {}\n", step.order()))?;
    let d = &step.designated;
    wr(out, format!("designated ({}, {})\n", d.first().to_cycle_string(), d.second().to_cycle_string()))?;
    if ctx.chain.order_u64().is_none_or(|n| n > machale::QUOTIENT_CHECK_LIMIT) {
        wr(out, "set_identity not checked (group too large for exhaustive search)\n".into())?;
        return Ok(EXIT_OK);
    }
    let check = machale::check_quotient_commutators(&ctx.chain, &t).map_err(lib_err)?;
    wr(out, format!("quotient_commutators {}\n", check.quotient_commutators))?;
    wr(out, format!("pairwise_image {}\n", check.pairwise_image))?;
    wr(out, format!("set_identity {}\n", check.identity_holds))?;
    wr(out, format!("designated_is_commutator {}\n", check.designated_is_commutator))?;
    wr(out, format!("g_noncommutators {}\n", check.g_noncommutators))?;
    wr(out, format!("quotient_noncommutators {}\n", check.quotient_noncommutators))?;
    Ok(if check.identity_holds { EXIT_OK } else { EXIT_VERIFICATION })
}
