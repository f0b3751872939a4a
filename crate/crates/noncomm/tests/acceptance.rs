//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion
//! and exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use noncomm::cli;
use noncomm::pipeline::{run_pipeline, PipelineConfig, PipelineRun};
use noncomm_core::backtrack::{conjugating_element, SearchBudget};
use noncomm_core::classes::{enumerate_classes, ClassOptions, ClassStrategy, Silent};
use noncomm_core::groupops::{block_action, center, central_quotient, derived_subgroup, wreath_imprimitive};
use noncomm_core::machale::{
    self, build_machale_group, check_commutators, check_quotient_commutators, generate_witnesses, machale_blocks,
    WitnessOptions,
};
use noncomm_core::oracle::{self, ElementTable};
use noncomm_core::{same_group, GroupOrder, Perm, PermGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNLIMITED: SearchBudget<'static> = SearchBudget::UNLIMITED;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn group(degree: usize, gens: &[&str]) -> PermGroup {
    PermGroup::new(degree, gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect()).unwrap()
}

fn order_reproduction() -> Outcome {
    let start = Instant::now();
    let chain = build_machale_group().chain(0);
    let order = chain.order();
    let elapsed = start.elapsed();
    outcome(
        order == machale::ORDER && within(elapsed, Duration::from_secs(10)),
        format!("order {order} in {elapsed:.2?}"),
    )
}

fn center_reproduction(run: &PipelineRun) -> Outcome {
    let start = Instant::now();
    let z = center(&run.chain, UNLIMITED).unwrap();
    let t = machale::locate_t(&run.chain, UNLIMITED).unwrap();
    let elapsed = start.elapsed();
    let involution = !t.is_identity() && (&t * &t).is_identity();
    let agrees = run.report.center_order.as_ref() == Some(&z.order()) && run.report.t.as_ref() == Some(&t);
    outcome(
        z.order() == 2 && involution && agrees && within(elapsed, Duration::from_secs(60)),
        format!("center order {}, t^2 = 1: {involution}, in {elapsed:.2?}", z.order()),
    )
}

fn perfectness(run: &PipelineRun) -> Outcome {
    let start = Instant::now();
    let d = derived_subgroup(&run.chain).unwrap();
    let same = same_group(&d, &run.chain).unwrap();
    let elapsed = start.elapsed();
    outcome(
        same && run.report.perfect == Some(true) && within(elapsed, Duration::from_secs(300)),
        format!("derived order {}, equal to G: {same}, in {elapsed:.2?}", d.order()),
    )
}

fn wreath_consistency(run: &PipelineRun) -> Outcome {
    let start = Instant::now();
    let q = block_action(&run.chain.group(), &machale_blocks()).unwrap();
    let (h, _) = wreath_imprimitive(2, &q).unwrap();
    let hc = h.chain(0);
    let d = derived_subgroup(&hc).unwrap();
    let same = same_group(&d, &run.chain).unwrap();
    let elapsed = start.elapsed();
    let expected = GroupOrder::from(33_218_887_680u64);
    outcome(
        hc.order() == expected && same && within(elapsed, Duration::from_secs(600)),
        format!("|H| = {}, derived(H) equal to G: {same}, in {elapsed:.2?}", hc.order()),
    )
}

fn stage_seconds(run: &PipelineRun, stage: noncomm::report::Stage) -> f64 {
    run.report.timings.iter().filter(|(s, _)| *s == stage).map(|(_, t)| t).sum()
}

fn class_count(run: &PipelineRun) -> Outcome {
    let Some(inv) = &run.inventory else { return outcome(false, "no inventory") };
    let mass = inv.classes().iter().fold(GroupOrder::from(0u64), |acc, c| &acc + c.size());
    let secs = stage_seconds(run, noncomm::report::Stage::Classes);
    outcome(
        inv.len() == machale::CLASS_COUNT && mass == machale::ORDER && secs <= 7200.0,
        format!("{} classes, size sum {mass}, in {secs:.1}s", inv.len()),
    )
}

fn witness_coverage(run: &PipelineRun) -> Outcome {
    let (Some(inv), Some(list), Some(t)) = (&run.inventory, &run.witnesses, &run.report.t) else {
        return outcome(false, "pipeline stopped before witnesses");
    };
    let check = check_commutators(&run.chain, inv, list, Some(t), UNLIMITED).unwrap();
    let secs = stage_seconds(run, noncomm::report::Stage::Witnesses);
    outcome(
        list.len() == machale::CLASS_COUNT - 1
            && check.passed()
            && inv.distinctness_certified()
            && run.report.witnesses_check == Some(true)
            && secs <= 7200.0,
        format!(
            "{} pairs, {} classes covered, {} duplicates, {} in t's class, in {secs:.1}s",
            list.len(),
            check.covered,
            check.duplicates.len(),
            check.t_hits.len()
        ),
    )
}

fn noncommutator_certificate(run: &PipelineRun) -> Outcome {
    let (Some(inv), Some(t)) = (&run.inventory, &run.report.t) else {
        return outcome(false, "pipeline stopped before checks");
    };
    let pairing = machale::check_central_noncommutator(&run.chain, inv, t, UNLIMITED).unwrap();
    outcome(
        pairing.t_is_noncommutator() && run.report.theorem_reproduced(),
        format!("{} fixed classes; summary: {}", pairing.fixed.len(), run.report.summary()),
    )
}

/// Engine against brute force on one group; `Err` names the first mismatch.
fn compare_with_oracle(
    g: &PermGroup,
    table: &ElementTable,
    rng: &mut ChaCha8Rng,
    random_classes: bool,
) -> Result<(), String> {
    let chain = g.chain(rng.gen());
    let n = table.len();
    if chain.order_u64() != Some(n as u64) {
        return Err(format!("order {} vs {n}", chain.order()));
    }
    for e in table.elements() {
        if !chain.contains(e).unwrap() {
            return Err(format!("element {} not recognised", e.to_cycle_string()));
        }
    }
    for _ in 0..20 {
        let mut images: Vec<usize> = (0..g.degree()).collect();
        for i in (1..images.len()).rev() {
            images.swap(i, rng.gen_range(0..=i));
        }
        let p = Perm::from_images(&images).unwrap();
        if chain.contains(&p).unwrap() != table.contains(&p) {
            return Err(format!("membership of {}", p.to_cycle_string()));
        }
    }

    let z = center(&chain, UNLIMITED).unwrap();
    let bz = oracle::brute_center(table);
    if z.order_u64() != Some(bz.len() as u64) || !bz.iter().all(|e| z.contains(e).unwrap()) {
        return Err(format!("center {} vs {}", z.order(), bz.len()));
    }

    let d = derived_subgroup(&chain).unwrap();
    let bd = oracle::brute_derived(table);
    if d.order_u64() != Some(bd.len() as u64) || !bd.elements().iter().all(|e| d.contains(e).unwrap()) {
        return Err(format!("derived {} vs {}", d.order(), bd.len()));
    }

    let mut options = ClassOptions::default();
    if random_classes {
        options.strategy = ClassStrategy::Random;
    }
    let inv = enumerate_classes(&chain, &bz, rng, &options, UNLIMITED, &mut Silent).map_err(|e| e.to_string())?;
    let parts = oracle::brute_classes(table);
    if inv.len() != parts.len() {
        return Err(format!("{} classes vs {}", inv.len(), parts.len()));
    }
    let mut class_of = vec![0usize; n];
    let mut seen = BTreeMap::new();
    for (bi, part) in parts.iter().enumerate() {
        for &e in part {
            class_of[e] = bi;
            let ci = inv.assign_class(&chain, &table.elements()[e]).unwrap().ok_or("element without class")?;
            if *seen.entry(ci).or_insert(bi) != bi {
                return Err("class partition differs".into());
            }
        }
    }

    for _ in 0..30 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (&table.elements()[i], &table.elements()[j]);
        match conjugating_element(&chain, a, b, UNLIMITED).unwrap() {
            Some(x) if a.conjugate_by(&x) == *b && class_of[i] == class_of[j] => {}
            None if class_of[i] != class_of[j] => {}
            _ => return Err(format!("conjugacy of {} and {}", a.to_cycle_string(), b.to_cycle_string())),
        }
    }

    let out = generate_witnesses(&chain, &inv, None, rng, &WitnessOptions::default(), UNLIMITED)
        .map_err(|e| e.to_string())?;
    if !out.definitive {
        return Err("witness search not definitive".into());
    }
    let covered: BTreeSet<usize> = out.classes.iter().copied().collect();
    let mask = oracle::brute_commutator_mask(table);
    for (e, &is_comm) in table.elements().iter().zip(&mask) {
        let c = inv.assign_class(&chain, e).unwrap().unwrap();
        if covered.contains(&c) != is_comm {
            return Err(format!("commutator membership of {}", e.to_cycle_string()));
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut largest = 0;
    for k in 0..200 {
        let g = oracle::sample_group(&mut rng, 10, 5000);
        let table = oracle::enumerate_elements(&g, 5000).unwrap();
        largest = largest.max(table.len());
        if let Err(e) = compare_with_oracle(&g, &table, &mut rng, k % 2 == 1) {
            let gens: Vec<String> = g.generators().iter().map(Perm::to_cycle_string).collect();
            return outcome(false, format!("group {k} <{}> of degree {}: {e}", gens.join(", "), g.degree()));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        within(elapsed, Duration::from_secs(600)),
        format!("200 groups (largest order {largest}) match, in {elapsed:.2?}"),
    )
}

/// Right regular representation of the generalized quaternion group of order 16.
fn q16() -> PermGroup {
    let index = |i: usize, j: usize| i % 8 + 8 * j;
    let mul = |(i, j): (usize, usize), (k, l): (usize, usize)| {
        let e = if j == 0 { i + k } else { i + 8 - k };
        if j + l == 2 {
            (e + 4, 0)
        } else {
            (e, j + l)
        }
    };
    let act = |g: (usize, usize)| {
        let images: Vec<usize> = (0..16)
            .map(|p| {
                let (i, j) = mul((p % 8, p / 8), g);
                index(i, j)
            })
            .collect();
        Perm::from_images(&images).unwrap()
    };
    PermGroup::new(16, vec![act((1, 0)), act((0, 1))]).unwrap()
}

fn quotient_mechanics() -> Outcome {
    let start = Instant::now();
    let groups: Vec<(&str, PermGroup)> = vec![
        ("C2", group(2, &["(1,2)"])),
        ("C4", group(4, &["(1,2,3,4)"])),
        ("D8", group(4, &["(1,2,3,4)", "(1,3)"])),
        ("Q8", group(8, &["(1,2,3,4)(5,6,7,8)", "(1,5,3,7)(2,8,4,6)"])),
        ("D16", group(8, &["(1,2,3,4,5,6,7,8)", "(1,8)(2,7)(3,6)(4,5)"])),
        ("Q16", q16()),
        ("C2xD8", group(6, &["(1,2)", "(3,4,5,6)", "(3,5)"])),
    ];
    let mut lines = Vec::new();
    for (name, g) in &groups {
        let chain = g.chain(0);
        let z = center(&chain, UNLIMITED).unwrap();
        let t =
            (0..z.order_u64().unwrap()).map(|i| z.element_at(i)).find(|x| !x.is_identity() && (x * x).is_identity());
        let Some(t) = t else { return outcome(false, format!("{name} has no central involution")) };
        let k = central_quotient(&chain, &t).unwrap();
        let n = chain.order();
        let expected = &(&n * &n) / &GroupOrder::from(2u64);
        let check = check_quotient_commutators(&chain, &t).unwrap();
        if k.order() != expected || check.quotient_order as u64 != expected.to_u64().unwrap() || !check.identity_holds {
            return outcome(false, format!("{name}: |K| = {}, set identity {}", k.order(), check.identity_holds));
        }
        lines.push(format!("{name} |K|={}", k.order()));
    }
    let elapsed = start.elapsed();
    outcome(within(elapsed, Duration::from_secs(60)), format!("{} in {elapsed:.2?}", lines.join(", ")))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let path = dir.path().join(format!("{name}.report"));
        let args = ["noncomm", "verify", "--seed", "1", "--out", path.to_str().unwrap()];
        let code = cli::run(args, &mut std::io::sink(), &mut std::io::sink());
        if code != cli::EXIT_OK {
            return outcome(false, format!("verify exited with {code}"));
        }
        let report = std::fs::read(&path).unwrap();
        let witnesses = std::fs::read(dir.path().join(format!("{name}.report.witnesses"))).unwrap();
        files.push((report, witnesses));
    }
    let same_report = files[0].0 == files[1].0;
    let same_witnesses = files[0].1 == files[1].1;
    outcome(
        same_report && same_witnesses,
        format!("report identical: {same_report}, witness file identical: {same_witnesses}"),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("criterion {n:>2} {}: {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "order reproduction", order_reproduction());
    let config = PipelineConfig { seed: 1, ..Default::default() };
    let run = run_pipeline(&config, &mut Silent);
    report(2, "center reproduction", center_reproduction(&run));
    report(3, "perfectness", perfectness(&run));
    report(4, "wreath consistency", wreath_consistency(&run));
    report(5, "class count", class_count(&run));
    report(6, "witness coverage", witness_coverage(&run));
    report(7, "noncommutator certificate", noncommutator_certificate(&run));
    report(8, "oracle equivalence", oracle_equivalence());
    report(9, "central quotient mechanics", quotient_mechanics());
    report(10, "determinism", determinism());

    let failed: Vec<u32> = results.iter().filter(|(_, _, o)| !o.passed).map(|(n, _, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria PASS", results.len());
    } else {
        println!("acceptance: FAIL on criteria {failed:?}");
        std::process::exit(1);
    }
}
