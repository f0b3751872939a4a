//! The one-noncommutator group on 44 points and its verification steps:
//! locating the central involution `t`, producing commutator witnesses for
//! every other class, checking them, and the class-pairing test showing that
//! `t` itself is not a commutator.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use thiserror::Error;

use crate::backtrack::{SearchBudget, SearchError};
use crate::chain::{GroupOrder, PermGroup, StabilizerChain};
use crate::classes::{ClassError, ClassInventory};
use crate::groupops::{center, central_quotient, BlockSystem, CentralQuotientGroup, GroupOpsError, QuotientElement};
use crate::perm::{Perm, PermError};

pub const DEGREE: usize = 44;

/// Generators in 1-based cycle notation.
pub const GENERATORS: [&str; 4] = [
    "(1,2)(43,44)",
    "(1,2)(21,22)",
    "(1,39,13,43,25)(2,40,14,44,26)(3,37,15,41,27)(4,38,16,42,28)\
     (5,35,23,17,31)(6,36,24,18,32)(7,33,21,19,29)(8,34,22,20,30)",
    "(1,23,27,11,41)(2,24,28,12,42)(3,22,26,10,44,4,21,25,9,43)\
     (5,16,20,40,32,6,15,19,39,31)(7,13,17,37,29)(8,14,18,38,30)",
];

pub const ORDER: u64 = 16_609_443_840;
pub const CLASS_COUNT: usize = 1280;
/// Order of the wreath product `C2 wr M11` containing the group with index 2.
pub const WREATH_ORDER: u64 = 33_218_887_680;
pub const BLOCK_ACTION_ORDER: u64 = 7920;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachaleError {
    #[error("center has order {order}, expected 2")]
    CenterOrder { order: GroupOrder },
    #[error("group of order {order} is too large for an exhaustive quotient check")]
    TooLargeForCheck { order: GroupOrder },
    #[error("class inventory is incomplete")]
    IncompleteInventory,
    #[error("witness {index} is malformed: {reason}")]
    MalformedWitness { index: usize, reason: &'static str },
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    GroupOps(#[from] GroupOpsError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

pub fn build_machale_group() -> PermGroup {
    let gens = GENERATORS.iter().map(|g| Perm::parse_cycles(g, DEGREE).expect("embedded generator parses")).collect();
    PermGroup::new(DEGREE, gens).expect("embedded generators share a degree")
}

/// The pairs `{2i-1, 2i}` (1-based) permuted by the group.
pub fn machale_blocks() -> BlockSystem {
    BlockSystem::consecutive(DEGREE, 2).expect("2 divides 44")
}

/// The nonidentity element of a center of order 2.
pub fn locate_t(chain: &StabilizerChain, budget: SearchBudget<'_>) -> Result<Perm, MachaleError> {
    let z = center(chain, budget)?;
    if z.order() != 2 {
        return Err(MachaleError::CenterOrder { order: z.order() });
    }
    let t = z.strong_generators().iter().find(|g| !g.is_identity()).expect("nontrivial center").clone();
    assert!((&t * &t).is_identity(), "central element of a group of order 2 is an involution");
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    pub a: Perm,
    pub b: Perm,
}

impl WitnessPair {
    pub fn commutator(&self) -> Result<Perm, PermError> {
        self.a.commutator(&self.b)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessList(pub Vec<WitnessPair>);

impl WitnessList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[WitnessPair] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessOptions {
    /// Random commutators drawn in the first phase, per class.
    pub random_pairs_per_class: u64,
    /// Random `a` tried per uncovered class in the targeted phase.
    pub targeted_tries: u64,
    /// Groups up to this order get an exhaustive final phase, which turns
    /// "no witness found" into a proof that the class has no commutator.
    pub exhaustive_limit: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { random_pairs_per_class: 20, targeted_tries: 20_000, exhaustive_limit: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessOutcome {
    /// One pair per covered class, in class order.
    pub witnesses: WitnessList,
    /// Class index witnessed by each pair.
    pub classes: Vec<usize>,
    /// Classes for which no witness was found (the class of `t` excluded).
    pub commutator_free: Vec<usize>,
    /// Whether `commutator_free` was settled by exhausting the group.
    pub definitive: bool,
    /// Pairs found per phase: random, targeted, exhaustive.
    pub found_by_phase: [usize; 3],
}

/// Produces a commutator witness for every class except that of `t`.
///
/// Phase one draws random pairs and keeps the first hit per class. Phase two
/// targets each remaining class `x^G`: `x = [a, b]` exactly when `a x` is
/// conjugate to `a`, and conjugators from the class tables then give `b`.
/// Phase three repeats the targeted test for every `a` in small groups.
pub fn generate_witnesses<R: RngCore + ?Sized>(
    chain: &StabilizerChain,
    inventory: &ClassInventory,
    t: Option<&Perm>,
    rng: &mut R,
    options: &WitnessOptions,
    budget: SearchBudget<'_>,
) -> Result<WitnessOutcome, MachaleError> {
    if !inventory.is_complete() {
        return Err(MachaleError::IncompleteInventory);
    }
    let n = inventory.len();
    let degree = chain.degree();
    let locate = |x: &Perm| -> Result<(usize, Perm), MachaleError> {
        Ok(inventory.locate(chain, x, budget)?.ok_or(ClassError::Mismatch("element outside every class"))?)
    };
    let t_class = match t {
        Some(t) => Some(locate(t)?.0),
        None => None,
    };
    let mut found: Vec<Option<(WitnessPair, usize)>> = vec![None; n];
    let identity = Perm::identity(degree);
    let id_class = locate(&identity)?.0;
    if Some(id_class) != t_class {
        found[id_class] = Some((WitnessPair { a: identity.clone(), b: identity.clone() }, 3));
    }
    let is_open = |found: &[Option<(WitnessPair, usize)>], i: usize| found[i].is_none() && Some(i) != t_class;
    let mut open = (0..n).filter(|&i| is_open(&found, i)).count();

    for _ in 0..options.random_pairs_per_class.saturating_mul(n as u64) {
        if open == 0 {
            break;
        }
        let a = chain.random_element(rng);
        let b = chain.random_element(rng);
        let (i, _) = locate(&a.commutator(&b)?)?;
        if is_open(&found, i) {
            found[i] = Some((WitnessPair { a, b }, 0));
            open -= 1;
        }
    }

    // x = [a, b]  <=>  b^-1 a b = a x
    let targeted = |a: &Perm, x: &Perm| -> Result<Option<WitnessPair>, MachaleError> {
        let ax = a * x;
        let (ca, ya) = locate(a)?;
        let (cx, yx) = locate(&ax)?;
        if ca != cx {
            return Ok(None);
        }
        let b = &ya.inverse() * &yx;
        debug_assert_eq!(&a.commutator(&b)?, x);
        Ok(Some(WitnessPair { a: a.clone(), b }))
    };
    for i in 0..n {
        if !is_open(&found, i) {
            continue;
        }
        let x = inventory.classes()[i].representative().clone();
        for _ in 0..options.targeted_tries {
            let a = chain.random_element(rng);
            if let Some(pair) = targeted(&a, &x)? {
                found[i] = Some((pair, 1));
                open -= 1;
                break;
            }
        }
    }

    let mut definitive = open == 0;
    if open > 0 {
        if let Some(order) = chain.order_u64().filter(|&o| o <= options.exhaustive_limit) {
            for idx in 0..order {
                let a = chain.element_at(idx);
                for i in 0..n {
                    if is_open(&found, i) {
                        let x = inventory.classes()[i].representative();
                        if let Some(pair) = targeted(&a, x)? {
                            found[i] = Some((pair, 2));
                            open -= 1;
                        }
                    }
                }
                if open == 0 {
                    break;
                }
            }
            definitive = true;
        }
    }

    let mut witnesses = Vec::new();
    let mut classes = Vec::new();
    let mut commutator_free = Vec::new();
    let mut found_by_phase = [0usize; 3];
    for (i, slot) in found.into_iter().enumerate() {
        match slot {
            Some((pair, phase)) => {
                if phase < 3 {
                    found_by_phase[phase] += 1;
                }
                witnesses.push(pair);
                classes.push(i);
            }
            None if Some(i) != t_class => commutator_free.push(i),
            None => {}
        }
    }
    Ok(WitnessOutcome { witnesses: WitnessList(witnesses), classes, commutator_free, definitive, found_by_phase })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorCheck {
    /// Class of each witness commutator.
    pub classes: Vec<usize>,
    /// Number of distinct classes covered.
    pub covered: usize,
    /// Classes a complete list must cover: all but one.
    pub expected: usize,
    /// `(earlier, later)` witness indices landing in the same class.
    pub duplicates: Vec<(usize, usize)>,
    /// Witness indices whose commutator lies in the class of `t`.
    pub t_hits: Vec<usize>,
    /// Classes, other than that of `t`, with no witness.
    pub missing: Vec<usize>,
}

impl CommutatorCheck {
    pub fn passed(&self) -> bool {
        self.covered == self.expected && self.duplicates.is_empty() && self.t_hits.is_empty()
    }
}

/// Recomputes every witness commutator and checks that they cover all
/// classes but one, pairwise distinct, avoiding the class of `t`.
pub fn check_commutators(
    chain: &StabilizerChain,
    inventory: &ClassInventory,
    witnesses: &WitnessList,
    t: Option<&Perm>,
    budget: SearchBudget<'_>,
) -> Result<CommutatorCheck, MachaleError> {
    if !inventory.is_complete() {
        return Err(MachaleError::IncompleteInventory);
    }
    let n = inventory.len();
    let t_class = match t {
        Some(t) => Some(inventory.locate(chain, t, budget)?.ok_or(MachaleError::Class(ClassError::NotInGroup))?.0),
        None => None,
    };
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut check = CommutatorCheck {
        classes: Vec::with_capacity(witnesses.len()),
        covered: 0,
        expected: n.saturating_sub(1),
        duplicates: Vec::new(),
        t_hits: Vec::new(),
        missing: Vec::new(),
    };
    for (index, pair) in witnesses.pairs().iter().enumerate() {
        for p in [&pair.a, &pair.b] {
            if p.degree() != chain.degree() {
                return Err(MachaleError::MalformedWitness { index, reason: "wrong degree" });
            }
            if !chain.contains(p)? {
                return Err(MachaleError::MalformedWitness { index, reason: "element not in the group" });
            }
        }
        let c = pair.commutator()?;
        let (class, y) =
            inventory.locate(chain, &c, budget)?.ok_or(ClassError::Mismatch("commutator outside every class"))?;
        if inventory.classes()[class].representative().conjugate_by(&y) != c {
            return Err(ClassError::Mismatch("class conjugator failed verification").into());
        }
        check.classes.push(class);
        if Some(class) == t_class {
            check.t_hits.push(index);
        }
        match owner[class] {
            Some(first) => check.duplicates.push((first, index)),
            None => {
                owner[class] = Some(index);
                check.covered += 1;
            }
        }
    }
    check.missing = (0..n).filter(|&i| owner[i].is_none() && Some(i) != t_class).collect();
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoncommutatorCheck {
    /// `pairing[i]` is the class of `t * rep(i)`.
    pub pairing: Vec<usize>,
    /// Classes with `t C = C`; `t` is a commutator exactly when one exists.
    pub fixed: Vec<usize>,
}

impl NoncommutatorCheck {
    pub fn t_is_noncommutator(&self) -> bool {
        self.fixed.is_empty()
    }
}

/// `t = [x, g]` for some `x` iff `t g` is conjugate to `g`, i.e. iff left
/// multiplication by `t` fixes the class of `g`.
pub fn check_central_noncommutator(
    chain: &StabilizerChain,
    inventory: &ClassInventory,
    t: &Perm,
    budget: SearchBudget<'_>,
) -> Result<NoncommutatorCheck, MachaleError> {
    if !inventory.is_complete() {
        return Err(MachaleError::IncompleteInventory);
    }
    if t.is_identity() || !(t * t).is_identity() {
        return Err(GroupOpsError::NotInvolution.into());
    }
    let pairing = inventory.class_multiplication_by_central(chain, t, budget)?;
    let fixed = pairing.iter().enumerate().filter(|(i, j)| i == *j).map(|(i, _)| i).collect();
    Ok(NoncommutatorCheck { pairing, fixed })
}

#[derive(Clone, Debug)]
pub struct CorollaryStep {
    pub quotient: CentralQuotientGroup,
    /// `(t, 1) T`, the element shown not to be a commutator.
    pub designated: QuotientElement,
}

impl CorollaryStep {
    pub fn order(&self) -> GroupOrder {
        self.quotient.order()
    }
}

/// `K = (G x G) / <(t, t)>` with its designated noncommutator.
pub fn corollary_step(chain: &StabilizerChain, t: &Perm) -> Result<CorollaryStep, MachaleError> {
    let quotient = central_quotient(chain, t)?;
    let designated = quotient.designated_noncommutator();
    Ok(CorollaryStep { quotient, designated })
}

/// Largest `|G|` for which [`check_quotient_commutators`] runs.
pub const QUOTIENT_CHECK_LIMIT: u64 = 64;

/// Exhaustive comparison of the commutator set of `K = (G x G) / <(t, t)>`
/// with the image of `C(G) x C(G)`, where `C(G)` is the commutator set of `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientCommutatorCheck {
    pub quotient_order: usize,
    /// Distinct commutators of `K`, found by running over all pairs.
    pub quotient_commutators: usize,
    /// Distinct classes `(c, d) T` with `c, d` commutators of `G`.
    pub pairwise_image: usize,
    pub identity_holds: bool,
    pub designated_is_commutator: bool,
    pub g_noncommutators: usize,
    pub quotient_noncommutators: usize,
}

pub fn check_quotient_commutators(chain: &StabilizerChain, t: &Perm) -> Result<QuotientCommutatorCheck, MachaleError> {
    let n = match chain.order_u64() {
        Some(n) if n <= QUOTIENT_CHECK_LIMIT => n,
        _ => return Err(MachaleError::TooLargeForCheck { order: chain.order() }),
    };
    let k = central_quotient(chain, t)?;
    let g: Vec<Perm> = (0..n).map(|i| chain.element_at(i)).collect();
    let mut g_comms = BTreeSet::new();
    for a in &g {
        for b in &g {
            g_comms.insert(a.commutator(b)?);
        }
    }
    let elements = k.elements();
    let mut k_comms = BTreeSet::new();
    for a in &elements {
        for b in &elements {
            k_comms.insert(k.commutator(a, b));
        }
    }
    let mut image = BTreeSet::new();
    for c in &g_comms {
        for d in &g_comms {
            image.insert(k.element(c.clone(), d.clone()));
        }
    }
    Ok(QuotientCommutatorCheck {
        quotient_order: elements.len(),
        quotient_commutators: k_comms.len(),
        pairwise_image: image.len(),
        identity_holds: k_comms == image,
        designated_is_commutator: k_comms.contains(&k.designated_noncommutator()),
        g_noncommutators: g.len() - g_comms.len(),
        quotient_noncommutators: elements.len() - k_comms.len(),
    })
}
