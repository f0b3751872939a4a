//! Conjugacy classes.
//!
//! Three routes build a [`ClassInventory`]:
//!
//! * **Direct**: for small groups, the conjugation action on element indices
//!   is explored exhaustively, one breadth-first orbit per class.
//! * **Lifted**: for a homomorphism `phi: G -> Q` given by a quotient action
//!   (blocks or an orbit), with kernel `K`. The classes of `G` mapping to the
//!   class of `s` in `Q` are the orbits of `C = phi^-1(C_Q(s))` on the coset
//!   `g0 K` (`phi(g0) = s`), where `c` sends `g0 k` to `g0 (m_c c^-1 k c)`
//!   with `m_c = g0^-1 c^-1 g0 c` in `K`. Each coset is explored exhaustively
//!   through kernel indices. Every Q-class is an independent job.
//! * **Random**: uniform sampling with backtrack conjugacy tests inside
//!   fingerprint buckets, closed under multiplication by central elements and
//!   under power maps.
//!
//! The first two routes keep their orbit forests, so locating the class of any
//! element (with a conjugator) costs a few sifts.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::backtrack::{centralizer, conjugating_element, SearchBudget, SearchError};
use crate::chain::{orbit_ids, GroupOrder, PermGroup, StabilizerChain};
use crate::groupops::{block_systems_through_first_point, BlockSystem};
use crate::perm::{CycleType, Perm, PermError};

/// Largest group handled by the direct route.
pub const DIRECT_LIMIT: u64 = 1 << 20;
/// Largest quotient accepted by the lifted route.
pub const QUOTIENT_LIMIT: u64 = 1 << 17;
/// Largest kernel accepted by the lifted route (orbit forests pack indices
/// into 24 bits).
pub const KERNEL_LIMIT: u64 = (1 << 24) - 1;

const ROOT_TAG: u32 = 0xFF;
const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("group of order {order} is too large for this class route")]
    TooLarge { order: GroupOrder },
    #[error("the quotient action is not defined on the whole group")]
    BadAction,
    #[error("random class search stalled after {draws} draws; residual mass {residual}")]
    Stalled { draws: u64, residual: GroupOrder },
    #[error("element is not in the group")]
    NotInGroup,
    #[error("inventory does not match the group: {0}")]
    Mismatch(&'static str),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Conjugation invariants used to bucket classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassFingerprint {
    pub order: u128,
    pub cycle_type: CycleType,
    pub square: CycleType,
    pub cube: CycleType,
}

impl ClassFingerprint {
    pub fn of(p: &Perm) -> ClassFingerprint {
        let square = p * p;
        let cube = &square * p;
        ClassFingerprint {
            order: p.order(),
            cycle_type: p.cycle_type(),
            square: square.cycle_type(),
            cube: cube.cycle_type(),
        }
    }
}

impl fmt::Display for ClassFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {} type {} square {} cube {}", self.order, self.cycle_type, self.square, self.cube)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    representative: Perm,
    centralizer_order: GroupOrder,
    size: GroupOrder,
    fingerprint: ClassFingerprint,
}

impl ConjugacyClass {
    /// Fails unless `size * centralizer_order == group_order`.
    pub fn new(
        representative: Perm,
        centralizer_order: GroupOrder,
        size: GroupOrder,
        group_order: &GroupOrder,
    ) -> Result<ConjugacyClass, ClassError> {
        if &(&size * &centralizer_order) != group_order {
            return Err(ClassError::Mismatch("class size times centralizer order is not the group order"));
        }
        let fingerprint = ClassFingerprint::of(&representative);
        Ok(ConjugacyClass { representative, centralizer_order, size, fingerprint })
    }

    fn from_centralizer(representative: Perm, centralizer_order: GroupOrder, group_order: &GroupOrder) -> Self {
        let size = group_order.checked_div(&centralizer_order).expect("centralizer order divides the group order");
        let fingerprint = ClassFingerprint::of(&representative);
        ConjugacyClass { representative, centralizer_order, size, fingerprint }
    }

    pub fn representative(&self) -> &Perm {
        &self.representative
    }

    pub fn centralizer_order(&self) -> &GroupOrder {
        &self.centralizer_order
    }

    pub fn size(&self) -> &GroupOrder {
        &self.size
    }

    pub fn fingerprint(&self) -> &ClassFingerprint {
        &self.fingerprint
    }
}

/// Homomorphism onto a smaller permutation group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientAction {
    /// Induced action on a block system.
    Blocks(BlockSystem),
    /// Restriction to an invariant set of points, renumbered in list order.
    Orbit(Vec<usize>),
}

impl QuotientAction {
    /// Image of `p`, or `None` when `p` does not preserve the structure.
    pub fn apply(&self, p: &Perm) -> Option<Perm> {
        match self {
            QuotientAction::Blocks(blocks) => blocks.induced(p),
            QuotientAction::Orbit(points) => {
                let mut position = vec![usize::MAX; p.degree()];
                for (i, &q) in points.iter().enumerate() {
                    position[q] = i;
                }
                let images: Option<Vec<usize>> =
                    points.iter().map(|&q| Some(position[p.image(q)]).filter(|&i| i != usize::MAX)).collect();
                Perm::from_images(&images?).ok()
            }
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            QuotientAction::Blocks(blocks) => blocks.len(),
            QuotientAction::Orbit(points) => points.len(),
        }
    }
}

/// How [`enumerate_classes`] proceeds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ClassStrategy {
    /// Direct for small groups, else lifted through the best available
    /// quotient action, else random.
    #[default]
    Auto,
    Direct,
    Lifted(QuotientAction),
    Random,
}

#[derive(Clone, Debug, Default)]
pub struct ClassOptions {
    pub strategy: ClassStrategy,
    /// Consecutive fruitless random draws before a stall is reported
    /// (default `10^6 / degree`).
    pub stall_draws: Option<u64>,
    /// Hard limit on random draws; `None` runs until complete.
    pub max_draws: Option<u64>,
}

/// Receives progress from the random route.
pub trait ClassProgress {
    fn class_found(&mut self, _count: usize, _covered: &GroupOrder) {}
    fn stalled(&mut self, _draws: u64, _residual: &GroupOrder, _census: &[(ClassFingerprint, usize)]) {}
}

/// Progress sink that ignores everything.
pub struct Silent;

impl ClassProgress for Silent {}

/// Writes the image table of the element with chain index `index`.
struct Indexer<'a> {
    chain: &'a StabilizerChain,
    radix: Vec<u64>,
}

impl<'a> Indexer<'a> {
    fn new(chain: &'a StabilizerChain) -> Self {
        let mut radix = Vec::with_capacity(chain.levels().len());
        let mut r = 1u64;
        for level in chain.levels() {
            radix.push(r);
            r = r.saturating_mul(level.orbit().len() as u64);
        }
        Indexer { chain, radix }
    }

    fn images_at(&self, index: u64, out: &mut [u16]) {
        for (p, o) in out.iter_mut().enumerate() {
            *o = p as u16;
        }
        for (l, level) in self.chain.levels().iter().enumerate().rev() {
            let d = ((index / self.radix[l]) % level.orbit().len() as u64) as usize;
            if d != 0 {
                let u = level.representative_at(d).images();
                for o in out.iter_mut() {
                    *o = u[*o as usize];
                }
            }
        }
    }
}

/// Orbits of a group of "movers" on the elements `g0 * n` of a coset of a
/// chain `N`, indexed by the chain index of `n`. Each non-root entry packs the
/// mover index (top 8 bits) and the parent index; roots carry the orbit number.
#[derive(Clone, Debug)]
pub struct OrbitForest {
    degree: usize,
    entries: Vec<u32>,
    roots: Vec<u32>,
    sizes: Vec<u64>,
    movers: Vec<Perm>,
}

impl OrbitForest {
    /// Explores the orbits of `<movers>` acting by conjugation on `g0 N`.
    /// Every mover must normalize the coset.
    fn build(chain: &StabilizerChain, g0: &Perm, movers: Vec<Perm>) -> OrbitForest {
        let degree = chain.degree();
        let size =
            chain.order_u64().filter(|&n| n <= KERNEL_LIMIT).expect("coset too large for an orbit forest") as usize;
        assert!(movers.len() < ROOT_TAG as usize, "too many movers");
        let base = chain.base();
        let g0_inv = g0.inverse();
        let actions: Vec<(Vec<usize>, &[u16])> = movers
            .iter()
            .map(|c| {
                let c_inv = c.inverse();
                let m = &(&(&g0_inv * &c_inv) * g0) * c;
                let pre = base.iter().map(|&b| c_inv.image(m.image(b))).collect();
                (pre, c.images())
            })
            .collect();
        let indexer = Indexer::new(chain);
        let mut entries = vec![UNSEEN; size];
        let mut roots = Vec::new();
        let mut sizes = Vec::new();
        let mut buf = vec![0u16; degree];
        let mut imgs = vec![0u16; base.len()];
        let mut queue: Vec<u32> = Vec::new();
        for start in 0..size {
            if entries[start] != UNSEEN {
                continue;
            }
            entries[start] = (ROOT_TAG << 24) | roots.len() as u32;
            roots.push(start as u32);
            queue.clear();
            queue.push(start as u32);
            let mut head = 0;
            while head < queue.len() {
                let i = queue[head];
                head += 1;
                indexer.images_at(i as u64, &mut buf);
                for (g, (pre, post)) in actions.iter().enumerate() {
                    for (slot, &p) in imgs.iter_mut().zip(pre) {
                        *slot = post[buf[p] as usize];
                    }
                    let j = chain.index_of_base_images(&mut imgs).expect("movers normalize the coset") as usize;
                    if entries[j] == UNSEEN {
                        entries[j] = ((g as u32) << 24) | i;
                        queue.push(j as u32);
                    }
                }
            }
            sizes.push(queue.len() as u64);
        }
        OrbitForest { degree, entries, roots, sizes, movers }
    }

    pub fn orbit_count(&self) -> usize {
        self.roots.len()
    }

    /// Orbit number of `index` and the mover indices on the path from the
    /// orbit's root, root side first.
    fn trace(&self, mut index: u32) -> (usize, Vec<u8>) {
        let mut steps = Vec::new();
        loop {
            let e = self.entries[index as usize];
            if e >> 24 == ROOT_TAG {
                steps.reverse();
                return ((e & 0x00FF_FFFF) as usize, steps);
            }
            steps.push((e >> 24) as u8);
            index = e & 0x00FF_FFFF;
        }
    }

    fn word(&self, steps: &[u8]) -> Perm {
        word(self.degree, &self.movers, steps)
    }
}

fn word(degree: usize, gens: &[Perm], steps: &[u8]) -> Perm {
    let mut w = Perm::identity(degree);
    for &s in steps {
        w = &w * &gens[s as usize];
    }
    w
}

/// Exhaustive class tables of a small group.
#[derive(Clone, Debug)]
struct DirectTables {
    chain: StabilizerChain,
    forest: OrbitForest,
}

impl DirectTables {
    fn build(chain: &StabilizerChain, gens: Vec<Perm>) -> DirectTables {
        let forest = OrbitForest::build(chain, &Perm::identity(chain.degree()), gens);
        DirectTables { chain: chain.clone(), forest }
    }

    /// `(class, y)` with `rep^y = x`.
    fn locate(&self, x: &Perm) -> Option<(usize, Perm)> {
        let i = self.chain.index_of(x)?;
        let (class, steps) = self.forest.trace(i as u32);
        Some((class, self.forest.word(&steps)))
    }

    fn representative(&self, class: usize) -> Perm {
        self.chain.element_at(self.forest.roots[class] as u64)
    }
}

#[derive(Clone, Debug)]
struct LiftedTables {
    action: QuotientAction,
    generators: Vec<Perm>,
    quotient: DirectTables,
    kernel: StabilizerChain,
    cosets: Vec<Perm>,
    forests: Vec<OrbitForest>,
    offsets: Vec<usize>,
}

impl LiftedTables {
    fn locate(&self, x: &Perm) -> Option<(usize, Perm)> {
        let q = self.action.apply(x)?;
        let qi = self.quotient.chain.index_of(&q)?;
        let (j, steps) = self.quotient.forest.trace(qi as u32);
        let t = word(x.degree(), &self.generators, &steps);
        let t_inv = t.inverse();
        let moved = &(&t * x) * &t_inv;
        let k = &self.cosets[j].inverse() * &moved;
        let ki = self.kernel.index_of(&k)?;
        let (local, steps) = self.forests[j].trace(ki as u32);
        let w = self.forests[j].word(&steps);
        Some((self.offsets[j] + local, &w * &t))
    }
}

#[derive(Clone, Debug)]
enum Locator {
    Search,
    Direct(Box<DirectTables>),
    Lifted(Box<LiftedTables>),
}

/// Prepared lifted enumeration. Jobs are independent and deterministic, so
/// callers may run them in any order or in parallel and pass the results to
/// [`LiftingPlan::finish`] in job order.
pub struct LiftingPlan {
    group_order: GroupOrder,
    action: QuotientAction,
    generators: Vec<Perm>,
    quotient: DirectTables,
    lifts: Vec<Perm>,
    kernel: StabilizerChain,
}

/// Result of one lifting job.
#[derive(Clone, Debug)]
pub struct LiftingJob {
    coset: Perm,
    forest: OrbitForest,
}

impl LiftingJob {
    pub fn class_count(&self) -> usize {
        self.forest.orbit_count()
    }
}

impl LiftingPlan {
    pub fn new(chain: &StabilizerChain, action: QuotientAction) -> Result<LiftingPlan, ClassError> {
        let degree = chain.degree();
        let generators: Vec<Perm> = chain.generators().iter().filter(|g| !g.is_identity()).cloned().collect();
        if generators.len() >= ROOT_TAG as usize {
            return Err(ClassError::Mismatch("too many generators for the lifted route"));
        }
        let qgens: Vec<Perm> =
            generators.iter().map(|g| action.apply(g)).collect::<Option<_>>().ok_or(ClassError::BadAction)?;
        let qgroup = PermGroup::new(action.degree(), qgens.clone()).map_err(|_| ClassError::BadAction)?;
        let qchain = qgroup.chain(0);
        let q_order = qchain
            .order_u64()
            .filter(|&n| n <= QUOTIENT_LIMIT)
            .ok_or(ClassError::TooLarge { order: qchain.order() })?;
        let group_order = chain.order();
        let kernel_order = group_order.checked_div(&qchain.order()).ok_or(ClassError::BadAction)?;
        if kernel_order.to_u64().is_none_or(|k| k > KERNEL_LIMIT) {
            return Err(ClassError::TooLarge { order: kernel_order });
        }

        // Cayley tree of Q: lifts of every element, and Schreier generators
        // of the kernel from the non-tree edges.
        let indexer = Indexer::new(&qchain);
        let mut lifts: Vec<Option<Perm>> = vec![None; q_order as usize];
        lifts[0] = Some(Perm::identity(degree));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut kernel = StabilizerChain::from_generators(degree, &[], &mut rng);
        let mut queue = vec![0u32];
        let mut head = 0;
        let mut buf = vec![0u16; qchain.degree()];
        let mut imgs = vec![0u16; qchain.base().len()];
        while head < queue.len() {
            let i = queue[head] as usize;
            head += 1;
            indexer.images_at(i as u64, &mut buf);
            for (g, s) in qgens.iter().enumerate() {
                for (slot, &b) in imgs.iter_mut().zip(qchain.base()) {
                    *slot = s.images()[buf[b] as usize];
                }
                let j = qchain.index_of_base_images(&mut imgs).expect("closed under generators") as usize;
                let lift = lifts[i].as_ref().unwrap() * &generators[g];
                match &lifts[j] {
                    None => {
                        lifts[j] = Some(lift);
                        queue.push(j as u32);
                    }
                    Some(existing) => {
                        if kernel.order() != kernel_order {
                            let schreier = &lift * &existing.inverse();
                            if action.apply(&schreier).is_none_or(|q| !q.is_identity()) {
                                return Err(ClassError::BadAction);
                            }
                            kernel.add_generator(schreier)?;
                        }
                    }
                }
            }
        }
        if kernel.order() != kernel_order {
            return Err(ClassError::BadAction);
        }
        let lifts: Vec<Perm> = lifts.into_iter().map(|l| l.expect("Cayley tree spans the quotient")).collect();
        let quotient = DirectTables::build(&qchain, qgens);
        Ok(LiftingPlan { group_order, action, generators, quotient, lifts, kernel })
    }

    pub fn quotient_order(&self) -> GroupOrder {
        self.quotient.chain.order()
    }

    pub fn kernel_order(&self) -> GroupOrder {
        self.kernel.order()
    }

    /// One job per conjugacy class of the quotient.
    pub fn job_count(&self) -> usize {
        self.quotient.forest.orbit_count()
    }

    pub fn run_job(&self, job: usize) -> Result<LiftingJob, ClassError> {
        let qchain = &self.quotient.chain;
        let sigma_index = self.quotient.forest.roots[job];
        let sigma = qchain.element_at(sigma_index as u64);
        let coset = self.lifts[sigma_index as usize].clone();
        let cq = centralizer(qchain, &sigma, SearchBudget::UNLIMITED)?;
        let target = &cq.order() * &self.kernel.order();
        let degree = coset.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(job as u64);
        let mut c = StabilizerChain::from_generators(degree, &[], &mut rng);
        let mut movers = Vec::new();
        while c.order() != target {
            let q = cq.random_element(&mut rng);
            let qi = qchain.index_of(&q).expect("centralizer lies in the quotient");
            let x = &self.lifts[qi as usize] * &self.kernel.random_element(&mut rng);
            if c.add_generator(x.clone())? {
                movers.push(x);
            }
        }
        let forest = OrbitForest::build(&self.kernel, &coset, movers);
        Ok(LiftingJob { coset, forest })
    }

    pub fn finish(self, jobs: Vec<LiftingJob>) -> ClassInventory {
        assert_eq!(jobs.len(), self.job_count(), "one result per job");
        let mut classes = Vec::new();
        let mut offsets = Vec::with_capacity(jobs.len());
        for (j, job) in jobs.iter().enumerate() {
            offsets.push(classes.len());
            let q_class_size = self.quotient.forest.sizes[j];
            for (root, &orbit) in job.forest.roots.iter().zip(&job.forest.sizes) {
                let rep = &job.coset * &self.kernel.element_at(*root as u64);
                let size = GroupOrder::from(q_class_size * orbit);
                let centralizer_order = &self.group_order / &size;
                classes.push(ConjugacyClass::from_centralizer(rep, centralizer_order, &self.group_order));
            }
        }
        let (cosets, forests) = jobs.into_iter().map(|j| (j.coset, j.forest)).unzip();
        let tables = LiftedTables {
            action: self.action,
            generators: self.generators,
            quotient: self.quotient,
            kernel: self.kernel,
            cosets,
            forests,
            offsets,
        };
        ClassInventory::with_locator(self.group_order, classes, Locator::Lifted(Box::new(tables)))
    }
}

/// The conjugacy classes found so far, indexed by fingerprint.
#[derive(Clone, Debug)]
pub struct ClassInventory {
    group_order: GroupOrder,
    classes: Vec<ConjugacyClass>,
    covered: GroupOrder,
    buckets: HashMap<ClassFingerprint, Vec<usize>>,
    /// Pairs of same-fingerprint classes proved non-conjugate by backtrack.
    certificates: Vec<(usize, usize)>,
    locator: Locator,
    /// Locator class number to inventory index, with `u` such that the
    /// stored representative is the locator's representative conjugated by
    /// `u^-1`. Only present after [`ClassInventory::attach_tables`].
    remap: Option<Vec<(usize, Perm)>>,
}

impl ClassInventory {
    fn with_locator(group_order: GroupOrder, classes: Vec<ConjugacyClass>, locator: Locator) -> ClassInventory {
        let mut inv = ClassInventory {
            covered: GroupOrder::from(0),
            group_order,
            classes: Vec::new(),
            buckets: HashMap::new(),
            certificates: Vec::new(),
            locator,
            remap: None,
        };
        for class in classes {
            inv.push(class);
        }
        inv
    }

    /// Inventory from stored classes (for example a parsed file). Class
    /// lookups use backtrack until [`ClassInventory::attach_tables`] is called.
    pub fn from_classes(group_order: GroupOrder, classes: Vec<ConjugacyClass>) -> Result<ClassInventory, ClassError> {
        for class in &classes {
            if (&class.size * &class.centralizer_order) != group_order {
                return Err(ClassError::Mismatch("class size times centralizer order is not the group order"));
            }
        }
        Ok(ClassInventory::with_locator(group_order, classes, Locator::Search))
    }

    fn push(&mut self, class: ConjugacyClass) -> usize {
        let index = self.classes.len();
        self.covered = &self.covered + &class.size;
        self.buckets.entry(class.fingerprint.clone()).or_default().push(index);
        self.classes.push(class);
        index
    }

    pub fn group_order(&self) -> &GroupOrder {
        &self.group_order
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Sum of the class sizes.
    pub fn covered_mass(&self) -> &GroupOrder {
        &self.covered
    }

    pub fn is_complete(&self) -> bool {
        self.covered == self.group_order
    }

    /// Whether class lookups use exhaustive tables rather than backtrack.
    pub fn has_tables(&self) -> bool {
        !matches!(self.locator, Locator::Search)
    }

    /// Number of classes per fingerprint, sorted by fingerprint.
    pub fn fingerprint_census(&self) -> Vec<(ClassFingerprint, usize)> {
        let mut census: Vec<_> = self.buckets.iter().map(|(f, v)| (f.clone(), v.len())).collect();
        census.sort();
        census
    }

    /// Backtrack non-conjugacy certificates recorded by the random route.
    pub fn certificates(&self) -> &[(usize, usize)] {
        &self.certificates
    }

    /// True when every pair of classes sharing a fingerprint is known to be
    /// distinct: by exhaustive orbit tables, or by a recorded certificate.
    pub fn distinctness_certified(&self) -> bool {
        if self.has_tables() {
            return true;
        }
        self.buckets.values().all(|members| {
            members.iter().enumerate().all(|(i, &a)| {
                members[i + 1..]
                    .iter()
                    .all(|&b| self.certificates.contains(&(a, b)) || self.certificates.contains(&(b, a)))
            })
        })
    }

    /// Class of `x` with a conjugator `y` satisfying `rep^y = x`, or `None`
    /// when no known class contains `x`.
    pub fn locate(
        &self,
        chain: &StabilizerChain,
        x: &Perm,
        budget: SearchBudget<'_>,
    ) -> Result<Option<(usize, Perm)>, ClassError> {
        if x.degree() != chain.degree() {
            return Err(PermError::DegreeMismatch { left: chain.degree(), right: x.degree() }.into());
        }
        let found = match &self.locator {
            Locator::Direct(tables) => tables.locate(x),
            Locator::Lifted(tables) => tables.locate(x),
            Locator::Search => return self.search(chain, x, budget).map(|r| r.0),
        };
        Ok(found.map(|(class, y)| {
            let (class, y) = match &self.remap {
                Some(m) => (m[class].0, &m[class].1 * &y),
                None => (class, y),
            };
            debug_assert_eq!(&self.classes[class].representative.conjugate_by(&y), x);
            (class, y)
        }))
    }

    /// Backtrack lookup inside the fingerprint bucket. Also returns the
    /// bucket members proved non-conjugate.
    #[allow(clippy::type_complexity)]
    fn search(
        &self,
        chain: &StabilizerChain,
        x: &Perm,
        budget: SearchBudget<'_>,
    ) -> Result<(Option<(usize, Perm)>, Vec<usize>), ClassError> {
        let mut refuted = Vec::new();
        if let Some(members) = self.buckets.get(&ClassFingerprint::of(x)) {
            for &i in members {
                match conjugating_element(chain, &self.classes[i].representative, x, budget)? {
                    Some(y) => return Ok((Some((i, y)), refuted)),
                    None => refuted.push(i),
                }
            }
        }
        Ok((None, refuted))
    }

    /// Index of the class containing `p`, or `None` ("new").
    pub fn assign_class(&self, chain: &StabilizerChain, p: &Perm) -> Result<Option<usize>, ClassError> {
        Ok(self.locate(chain, p, SearchBudget::UNLIMITED)?.map(|(i, _)| i))
    }

    /// The permutation of class indices induced by `C -> z C` for a central
    /// element `z`.
    pub fn class_multiplication_by_central(
        &self,
        chain: &StabilizerChain,
        z: &Perm,
        budget: SearchBudget<'_>,
    ) -> Result<Vec<usize>, ClassError> {
        if !chain.generators().iter().all(|g| g.commutes_with(z)) {
            return Err(ClassError::Mismatch("multiplier is not central"));
        }
        let mut pairing = Vec::with_capacity(self.classes.len());
        for class in &self.classes {
            let moved = z * &class.representative;
            match self.locate(chain, &moved, budget)? {
                Some((j, _)) => pairing.push(j),
                None => return Err(ClassError::Mismatch("inventory is missing a class")),
            }
        }
        Ok(pairing)
    }

    /// Replaces backtrack lookups by the tables of `fresh`, an inventory of
    /// the same group built by a table route. Fails unless the two
    /// inventories have matching classes.
    pub fn attach_tables(&mut self, chain: &StabilizerChain, fresh: ClassInventory) -> Result<(), ClassError> {
        if !fresh.has_tables() {
            return Err(ClassError::Mismatch("replacement inventory has no tables"));
        }
        if fresh.group_order != self.group_order || fresh.len() != self.len() {
            return Err(ClassError::Mismatch("class count or group order differs"));
        }
        let mut remap: Vec<Option<(usize, Perm)>> = vec![None; fresh.len()];
        for (i, class) in self.classes.iter().enumerate() {
            let (j, u) =
                fresh.locate(chain, &class.representative, SearchBudget::UNLIMITED)?.ok_or(ClassError::NotInGroup)?;
            if remap[j].is_some() {
                return Err(ClassError::Mismatch("two stored classes are conjugate"));
            }
            if fresh.classes[j].size != class.size {
                return Err(ClassError::Mismatch("class size differs"));
            }
            remap[j] = Some((i, u.inverse()));
        }
        self.locator = fresh.locator;
        self.remap = Some(remap.into_iter().map(|m| m.expect("bijective by counting")).collect());
        Ok(())
    }
}

/// Picks the lifting action with the smallest kernel among the nontrivial
/// orbits (intransitive groups) or the minimal block systems (transitive
/// groups), within the size limits.
pub fn choose_quotient_action(chain: &StabilizerChain) -> Option<QuotientAction> {
    let degree = chain.degree();
    let group = chain.group();
    let ids = orbit_ids(degree, group.generators().iter());
    let mut candidates = Vec::new();
    let mut roots: Vec<u16> = ids.clone();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() > 1 {
        for r in roots {
            let points: Vec<usize> = (0..degree).filter(|&p| ids[p] == r).collect();
            if points.len() > 1 {
                candidates.push(QuotientAction::Orbit(points));
            }
        }
    } else {
        candidates.extend(block_systems_through_first_point(&group).into_iter().map(QuotientAction::Blocks));
    }
    let order = chain.order();
    let mut best: Option<(u64, QuotientAction)> = None;
    for action in candidates {
        let Some(gens) = group.generators().iter().map(|g| action.apply(g)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let Ok(q) = PermGroup::new(action.degree(), gens) else { continue };
        let q_order = q.chain(0).order();
        if q_order.to_u64().is_none_or(|n| n > QUOTIENT_LIMIT) {
            continue;
        }
        let Some(k) = order.checked_div(&q_order).and_then(|k| k.to_u64()) else { continue };
        if k > KERNEL_LIMIT {
            continue;
        }
        if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
            best = Some((k, action));
        }
    }
    best.map(|(_, a)| a)
}

/// Exhaustive class tables for a group of order at most [`DIRECT_LIMIT`].
pub fn enumerate_classes_direct(chain: &StabilizerChain) -> Result<ClassInventory, ClassError> {
    let order = chain.order();
    if order.to_u64().is_none_or(|n| n > DIRECT_LIMIT) {
        return Err(ClassError::TooLarge { order });
    }
    let gens: Vec<Perm> = chain.generators().iter().filter(|g| !g.is_identity()).cloned().collect();
    let tables = DirectTables::build(chain, gens);
    let classes = (0..tables.forest.orbit_count())
        .map(|c| {
            let size = GroupOrder::from(tables.forest.sizes[c]);
            ConjugacyClass::from_centralizer(tables.representative(c), &order / &size, &order)
        })
        .collect();
    Ok(ClassInventory::with_locator(order, classes, Locator::Direct(Box::new(tables))))
}

/// Lifted enumeration run sequentially.
pub fn enumerate_classes_lifted(chain: &StabilizerChain, action: QuotientAction) -> Result<ClassInventory, ClassError> {
    let plan = LiftingPlan::new(chain, action)?;
    let jobs = (0..plan.job_count()).map(|j| plan.run_job(j)).collect::<Result<Vec<_>, _>>()?;
    Ok(plan.finish(jobs))
}

/// Random search seeded with the identity and the central elements, closed
/// under central multiples and power maps, until the class sizes sum to the
/// group order.
pub fn enumerate_classes_random<R: RngCore + ?Sized>(
    chain: &StabilizerChain,
    central: &[Perm],
    rng: &mut R,
    options: &ClassOptions,
    budget: SearchBudget<'_>,
    progress: &mut dyn ClassProgress,
) -> Result<ClassInventory, ClassError> {
    let order = chain.order();
    let degree = chain.degree();
    let mut inv = ClassInventory::with_locator(order.clone(), Vec::new(), Locator::Search);
    let mut pending: Vec<Perm> = Vec::new();
    let mut seeds = vec![Perm::identity(degree)];
    seeds.extend(central.iter().cloned());
    for z in &seeds {
        if !chain.contains(z)? {
            return Err(ClassError::NotInGroup);
        }
        insert_candidate(&mut inv, chain, z, central, &mut pending, budget, progress)?;
    }
    let stall_draws = options.stall_draws.unwrap_or((1_000_000 / degree as u64).max(1));
    let mut draws = 0u64;
    let mut fruitless = 0u64;
    let mut boosted: Vec<bool> = Vec::new();
    while !inv.is_complete() {
        let (candidate, is_draw) = match pending.pop() {
            Some(p) => (p, false),
            None => {
                if options.max_draws.is_some_and(|m| draws >= m) {
                    let residual = &order - &inv.covered;
                    return Err(ClassError::Stalled { draws, residual });
                }
                draws += 1;
                (chain.random_element(rng), true)
            }
        };
        let added = insert_candidate(&mut inv, chain, &candidate, central, &mut pending, budget, progress)?;
        if added {
            fruitless = 0;
        } else if is_draw {
            fruitless += 1;
            if fruitless >= stall_draws {
                fruitless = 0;
                let residual = &order - &inv.covered;
                progress.stalled(draws, &residual, &inv.fingerprint_census());
                boosted.resize(inv.len(), false);
                for (i, done) in boosted.iter_mut().enumerate() {
                    if !*done {
                        *done = true;
                        let rep = &inv.classes[i].representative;
                        let o = rep.order();
                        for k in 2..o.min(1 << 12) {
                            pending.push(rep.pow(k as i128));
                        }
                    }
                }
            }
        }
    }
    Ok(inv)
}

fn insert_candidate(
    inv: &mut ClassInventory,
    chain: &StabilizerChain,
    x: &Perm,
    central: &[Perm],
    pending: &mut Vec<Perm>,
    budget: SearchBudget<'_>,
    progress: &mut dyn ClassProgress,
) -> Result<bool, ClassError> {
    let (found, refuted) = inv.search(chain, x, budget)?;
    if found.is_some() {
        return Ok(false);
    }
    let c = centralizer(chain, x, budget)?;
    let index = inv.push(ConjugacyClass::from_centralizer(x.clone(), c.order(), &inv.group_order.clone()));
    inv.certificates.extend(refuted.into_iter().map(|j| (j, index)));
    progress.class_found(inv.len(), &inv.covered);
    for z in central {
        pending.push(z * x);
    }
    let o = x.order();
    let mut k = 2u128;
    while k * k <= o {
        if o.is_multiple_of(k) {
            pending.push(x.pow(k as i128));
            if k * k != o {
                pending.push(x.pow((o / k) as i128));
            }
        }
        k += 1;
    }
    Ok(true)
}

/// Complete class inventory by the chosen strategy. `central` lists the
/// central elements (used by the random route only).
pub fn enumerate_classes<R: RngCore + ?Sized>(
    chain: &StabilizerChain,
    central: &[Perm],
    rng: &mut R,
    options: &ClassOptions,
    budget: SearchBudget<'_>,
    progress: &mut dyn ClassProgress,
) -> Result<ClassInventory, ClassError> {
    match &options.strategy {
        ClassStrategy::Direct => enumerate_classes_direct(chain),
        ClassStrategy::Lifted(action) => enumerate_classes_lifted(chain, action.clone()),
        ClassStrategy::Random => enumerate_classes_random(chain, central, rng, options, budget, progress),
        ClassStrategy::Auto => {
            if chain.order_u64().is_some_and(|n| n <= DIRECT_LIMIT) {
                return enumerate_classes_direct(chain);
            }
            match choose_quotient_action(chain) {
                Some(action) => enumerate_classes_lifted(chain, action),
                None => enumerate_classes_random(chain, central, rng, options, budget, progress),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupops::wreath_imprimitive;
    use crate::oracle::{self, ElementTable};
    use alloc::collections::BTreeSet;

    fn p(text: &str, degree: usize) -> Perm {
        Perm::parse_cycles(text, degree).unwrap()
    }

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|g| p(g, degree)).collect()).unwrap()
    }

    fn random(chain: &StabilizerChain, central: &[Perm]) -> ClassInventory {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let options = ClassOptions { strategy: ClassStrategy::Random, ..Default::default() };
        enumerate_classes(chain, central, &mut rng, &options, SearchBudget::UNLIMITED, &mut Silent).unwrap()
    }

    /// The inventory's partition, as sets of element indices, must equal the
    /// brute-force partition.
    fn assert_matches_oracle(inv: &ClassInventory, chain: &StabilizerChain, table: &ElementTable) {
        assert!(inv.is_complete());
        assert!(inv.distinctness_certified());
        let brute: BTreeSet<Vec<usize>> = oracle::brute_classes(table).into_iter().collect();
        let mut engine: Vec<Vec<usize>> = vec![Vec::new(); inv.len()];
        for (i, x) in table.elements().iter().enumerate() {
            let (c, y) = inv.locate(chain, x, SearchBudget::UNLIMITED).unwrap().unwrap();
            assert_eq!(&inv.classes()[c].representative().conjugate_by(&y), x);
            engine[c].push(i);
        }
        for (c, members) in engine.iter().enumerate() {
            assert_eq!(inv.classes()[c].size(), &GroupOrder::from(members.len() as u64));
        }
        assert_eq!(engine.into_iter().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn trivial_group_has_one_class() {
        let chain = PermGroup::trivial(3).chain(0);
        let inv = enumerate_classes_direct(&chain).unwrap();
        assert_eq!(inv.len(), 1);
        assert!(random(&chain, &[]).len() == 1);
    }

    #[test]
    fn s4_classes() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]);
        let chain = s4.chain(0);
        let table = oracle::enumerate_elements(&s4, 100).unwrap();
        for inv in [enumerate_classes_direct(&chain).unwrap(), random(&chain, &[])] {
            assert_eq!(inv.len(), 5);
            let mut sizes: Vec<u64> = inv.classes().iter().map(|c| c.size().to_u64().unwrap()).collect();
            sizes.sort();
            assert_eq!(sizes, [1, 3, 6, 6, 8]);
            assert_matches_oracle(&inv, &chain, &table);
            for class in inv.classes() {
                assert_eq!(&(class.size() * class.centralizer_order()), &GroupOrder::from(24));
            }
        }
    }

    #[test]
    fn lifted_route_agrees_with_oracle() {
        for top in
            [group(3, &["(1,2,3)", "(1,2)"]), group(4, &["(1,2,3,4)", "(1,3)"]), group(4, &["(1,2)", "(1,2,3,4)"])]
        {
            let (h, blocks) = wreath_imprimitive(2, &top).unwrap();
            let chain = h.chain(0);
            let table = oracle::enumerate_elements(&h, 1000).unwrap();
            let inv = enumerate_classes_lifted(&chain, QuotientAction::Blocks(blocks)).unwrap();
            assert_matches_oracle(&inv, &chain, &table);
            assert_eq!(inv.len(), oracle::brute_classes(&table).len());
        }
    }

    #[test]
    fn orbit_action_route() {
        // S3 x C4 on 7 points, lifted through the S3 orbit
        let g = group(7, &["(1,2)", "(1,2,3)", "(4,5,6,7)"]);
        let chain = g.chain(0);
        let table = oracle::enumerate_elements(&g, 100).unwrap();
        let inv = enumerate_classes_lifted(&chain, QuotientAction::Orbit(vec![0, 1, 2])).unwrap();
        assert_eq!(inv.len(), 12);
        assert_matches_oracle(&inv, &chain, &table);
        assert!(matches!(choose_quotient_action(&chain), Some(QuotientAction::Orbit(_))));
    }

    #[test]
    fn bad_action_is_rejected() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        let blocks = BlockSystem::consecutive(4, 2).unwrap();
        assert_eq!(enumerate_classes_lifted(&s4, QuotientAction::Blocks(blocks)).unwrap_err(), ClassError::BadAction);
    }

    #[test]
    fn random_route_with_center() {
        // D8 with its central rotation squared
        let d8 = group(4, &["(1,2,3,4)", "(1,3)"]);
        let chain = d8.chain(0);
        let z = p("(1,3)(2,4)", 4);
        let inv = random(&chain, std::slice::from_ref(&z));
        assert_eq!(inv.len(), 5);
        let table = oracle::enumerate_elements(&d8, 100).unwrap();
        assert_matches_oracle(&inv, &chain, &table);
        let pairing = inv.class_multiplication_by_central(&chain, &z, SearchBudget::UNLIMITED).unwrap();
        assert_eq!(pairing[0], inv.assign_class(&chain, &z).unwrap().unwrap());
        for (i, &j) in pairing.iter().enumerate() {
            assert_eq!(pairing[j], i);
        }
    }

    #[test]
    fn assign_class_contract() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        let inv = random(&s4, &[]);
        assert_eq!(inv.assign_class(&s4, &Perm::identity(4)).unwrap(), Some(0));
        let rep = inv.classes()[3].representative().clone();
        let x = p("(1,4,2)", 4);
        assert_eq!(inv.assign_class(&s4, &rep.conjugate_by(&x)).unwrap(), Some(3));
        let partial = ClassInventory::from_classes(GroupOrder::from(24), inv.classes()[..1].to_vec()).unwrap();
        // no class shares the fingerprint of a 4-cycle: "new" without search
        assert_eq!(partial.assign_class(&s4, &p("(1,2,3,4)", 4)).unwrap(), None);
    }

    #[test]
    fn stall_is_reported() {
        struct Count(u32);
        impl ClassProgress for Count {
            fn stalled(&mut self, _: u64, _: &GroupOrder, _: &[(ClassFingerprint, usize)]) {
                self.0 += 1;
            }
        }
        let a5 = group(5, &["(1,2,3)", "(1,2,3,4,5)"]).chain(0);
        let options = ClassOptions { strategy: ClassStrategy::Random, stall_draws: Some(1), max_draws: None };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut count = Count(0);
        let inv = enumerate_classes(&a5, &[], &mut rng, &options, SearchBudget::UNLIMITED, &mut count).unwrap();
        assert_eq!(inv.len(), 5);
        assert!(count.0 > 0);
        let options = ClassOptions { strategy: ClassStrategy::Random, stall_draws: None, max_draws: Some(0) };
        let err = enumerate_classes(&a5, &[], &mut rng, &options, SearchBudget::UNLIMITED, &mut Silent).unwrap_err();
        assert!(matches!(err, ClassError::Stalled { .. }));
    }

    #[test]
    fn attach_tables_maps_classes() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        let mut stored = random(&s4, &[]);
        let fresh = enumerate_classes_direct(&s4).unwrap();
        stored.attach_tables(&s4, fresh).unwrap();
        assert!(stored.has_tables());
        for (i, class) in stored.classes().to_vec().iter().enumerate() {
            let x = class.representative().conjugate_by(&p("(2,3,4)", 4));
            assert_eq!(stored.assign_class(&s4, &x).unwrap(), Some(i));
        }
    }

    #[test]
    fn fingerprint_is_a_class_invariant() {
        let x = p("(1,2,3,4)(5,6)", 8);
        let y = p("(1,8)(2,7,3)", 8);
        assert_eq!(ClassFingerprint::of(&x), ClassFingerprint::of(&x.conjugate_by(&y)));
        assert_eq!(ClassFingerprint::of(&x).to_string(), "order 4 type 4^1.2^1.1^2 square 2^2.1^4 cube 4^1.2^1.1^2");
    }
}
