//! Brute-force reference engine for small groups.
//!
//! Everything here applies the definitions literally over an explicit list of
//! elements and uses nothing from the chain, backtrack or class machinery
//! (apart from the up-front size guard). Tests use it as ground truth.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::chain::{PermGroup, StabilizerChain};
use crate::perm::Perm;

/// Default element cap for brute-force computations.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: usize },
}

/// Every element of a group, with lookup by image table.
#[derive(Clone, Debug)]
pub struct ElementTable {
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, u32>,
}

impl ElementTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<ElementTable, OracleError> {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let x = &elements[i] * g;
                if !index.contains_key(&x) {
                    if elements.len() >= cap {
                        return Err(OracleError::CapExceeded { cap });
                    }
                    index.insert(x.clone(), elements.len() as u32);
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        Ok(ElementTable { degree, elements, index })
    }
}

/// Breadth-first closure of the generators. Fails if the group has more than
/// `cap` elements.
pub fn enumerate_elements(g: &PermGroup, cap: usize) -> Result<ElementTable, OracleError> {
    let chain = StabilizerChain::build(g, 0);
    if chain.order_u64().is_none_or(|n| n > cap as u64) {
        return Err(OracleError::CapExceeded { cap });
    }
    ElementTable::closure(g.degree(), g.generators(), cap)
}

/// `{ a^-1 b^-1 a b : a, b in G }` as a membership mask over the table.
pub fn brute_commutator_mask(table: &ElementTable) -> Vec<bool> {
    let mut mask = vec![false; table.len()];
    let inverses: Vec<Perm> = table.elements.iter().map(Perm::inverse).collect();
    let mut left = Perm::identity(table.degree);
    let mut right = Perm::identity(table.degree);
    let mut c = Perm::identity(table.degree);
    for (a, ai) in table.elements.iter().zip(&inverses) {
        for (b, bi) in table.elements.iter().zip(&inverses) {
            ai.compose_into(bi, &mut left);
            a.compose_into(b, &mut right);
            left.compose_into(&right, &mut c);
            let k = table.index_of(&c).expect("group is closed under commutators");
            mask[k] = true;
        }
    }
    mask
}

/// The set of commutators, in table order.
pub fn brute_commutator_set(table: &ElementTable) -> Vec<Perm> {
    let mask = brute_commutator_mask(table);
    table.elements.iter().zip(mask).filter(|(_, m)| *m).map(|(p, _)| p.clone()).collect()
}

/// Elements that are not commutators.
pub fn brute_noncommutators(table: &ElementTable) -> Vec<Perm> {
    let mask = brute_commutator_mask(table);
    table.elements.iter().zip(mask).filter(|(_, m)| !*m).map(|(p, _)| p.clone()).collect()
}

/// Conjugacy classes `{x^-1 g x : x in G}` as sorted lists of table indices,
/// ordered by smallest index.
pub fn brute_classes(table: &ElementTable) -> Vec<Vec<usize>> {
    let mut class_of = vec![usize::MAX; table.len()];
    let mut classes = Vec::new();
    for i in 0..table.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        let g = &table.elements[i];
        for x in &table.elements {
            let k = table.index_of(&g.conjugate_by(x)).expect("closed under conjugation");
            if class_of[k] == usize::MAX {
                class_of[k] = id;
                members.push(k);
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

/// Elements commuting with every element.
pub fn brute_center(table: &ElementTable) -> Vec<Perm> {
    table.elements.iter().filter(|z| table.elements.iter().all(|x| z.commutes_with(x))).cloned().collect()
}

/// Elements commuting with `g`.
pub fn brute_centralizer(table: &ElementTable, g: &Perm) -> Vec<Perm> {
    table.elements.iter().filter(|x| x.commutes_with(g)).cloned().collect()
}

/// Some `x` with `x^-1 g x = h`, by exhaustion.
pub fn brute_conjugator(table: &ElementTable, g: &Perm, h: &Perm) -> Option<Perm> {
    table.elements.iter().find(|x| &g.conjugate_by(x) == h).cloned()
}

/// Subgroup generated by all commutators.
pub fn brute_derived(table: &ElementTable) -> ElementTable {
    let mut gens: Vec<Perm> = Vec::new();
    let mut sub = ElementTable::closure(table.degree, &gens, usize::MAX).unwrap();
    for c in brute_commutator_set(table) {
        if !sub.contains(&c) {
            gens.push(c);
            sub = ElementTable::closure(table.degree, &gens, usize::MAX).unwrap();
        }
    }
    sub
}

/// Random permutation group of degree at most `max_degree` and order at most
/// `max_order`, built from a mix of intransitive, imprimitive and random
/// generator shapes. Used to drive engine-versus-oracle comparisons.
pub fn sample_group<R: RngCore>(rng: &mut R, max_degree: usize, max_order: u64) -> PermGroup {
    loop {
        let degree = rng.gen_range(2..=max_degree.max(2));
        let ngens = rng.gen_range(1..=3);
        let shape = rng.gen_range(0..4);
        let gens: Vec<Perm> = (0..ngens).map(|_| random_generator(rng, degree, shape)).collect();
        let g = PermGroup::new(degree, gens).unwrap();
        let order = StabilizerChain::build(&g, rng.gen()).order_u64();
        if order.is_some_and(|n| n <= max_order) {
            return g;
        }
    }
}

fn random_generator<R: RngCore>(rng: &mut R, degree: usize, shape: u32) -> Perm {
    match shape {
        // random permutation on a random subset of the points
        0 => {
            let k = rng.gen_range(2..=degree);
            let support = random_subset(rng, degree, k);
            let mut shuffled = support.clone();
            shuffle(rng, &mut shuffled);
            let mut images: Vec<usize> = (0..degree).collect();
            for (a, b) in support.iter().zip(&shuffled) {
                images[*a] = *b;
            }
            Perm::from_images(&images).unwrap()
        }
        // block-preserving element for blocks of size 2 or 3
        1 => {
            let size = if degree.is_multiple_of(3) && rng.gen::<bool>() { 3 } else { 2 };
            let nblocks = degree / size;
            let mut blocks: Vec<usize> = (0..nblocks).collect();
            shuffle(rng, &mut blocks);
            let mut images: Vec<usize> = (0..degree).collect();
            for (b, &target) in blocks.iter().enumerate() {
                let shift = rng.gen_range(0..size);
                for j in 0..size {
                    images[b * size + j] = target * size + (j + shift) % size;
                }
            }
            Perm::from_images(&images).unwrap()
        }
        // product of a few disjoint short cycles
        2 => {
            let mut points: Vec<usize> = (0..degree).collect();
            shuffle(rng, &mut points);
            let mut cycles = Vec::new();
            let mut rest = &points[..];
            while rest.len() >= 2 && rng.gen_range(0..3) > 0 {
                let len = rng.gen_range(2..=rest.len().min(4));
                cycles.push(rest[..len].to_vec());
                rest = &rest[len..];
            }
            Perm::from_cycles(degree, &cycles).unwrap()
        }
        // element acting on two halves separately
        _ => {
            let half = degree / 2;
            let mut images: Vec<usize> = (0..degree).collect();
            let mut a: Vec<usize> = (0..half).collect();
            let mut b: Vec<usize> = (half..degree).collect();
            shuffle(rng, &mut a);
            shuffle(rng, &mut b);
            for (i, x) in a.into_iter().enumerate() {
                images[i] = x;
            }
            for (i, x) in b.into_iter().enumerate() {
                images[half + i] = x;
            }
            Perm::from_images(&images).unwrap()
        }
    }
}

fn random_subset<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    shuffle(rng, &mut all);
    all.truncate(k);
    all.sort_unstable();
    all
}

fn shuffle<R: RngCore, T>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}
