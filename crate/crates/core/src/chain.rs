//! Permutation groups and their stabilizer chains (base and strong generating
//! set) with explicit transversals.
//!
//! A chain answers order, membership and uniform-sampling queries. Elements
//! of the group are in bijection with tuples of transversal positions, which
//! also gives every element a dense index in `0..order`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Sub};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::perm::{Perm, PermError};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {index} has degree {found}, expected {expected}")]
    GeneratorDegree { index: usize, expected: usize, found: usize },
    #[error("a group needs at least one generator")]
    NoGenerators,
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A permutation group given by generators of a common degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        if degree == 0 || degree > crate::perm::MAX_DEGREE {
            return Err(PermError::InvalidDegree(degree).into());
        }
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(GroupError::GeneratorDegree { index, expected: degree, found: g.degree() });
            }
        }
        Ok(PermGroup { degree, generators })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, generators: vec![Perm::identity(degree)] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn chain(&self, seed: u64) -> StabilizerChain {
        StabilizerChain::build(self, seed)
    }
}

/// Exact group order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupOrder(BigUint);

impl GroupOrder {
    pub fn one() -> GroupOrder {
        GroupOrder(BigUint::one())
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Exact quotient; `None` unless `divisor` divides `self`.
    pub fn checked_div(&self, divisor: &GroupOrder) -> Option<GroupOrder> {
        if divisor.0.is_zero() {
            return None;
        }
        let (q, r) = self.0.div_rem(&divisor.0);
        r.is_zero().then_some(GroupOrder(q))
    }

    pub fn divides(&self, other: &GroupOrder) -> bool {
        other.checked_div(self).is_some()
    }

    pub fn parse(text: &str) -> Option<GroupOrder> {
        BigUint::parse_bytes(text.trim().as_bytes(), 10).map(GroupOrder)
    }
}

impl From<u64> for GroupOrder {
    fn from(v: u64) -> Self {
        GroupOrder(BigUint::from(v))
    }
}

impl From<BigUint> for GroupOrder {
    fn from(v: BigUint) -> Self {
        GroupOrder(v)
    }
}

impl Mul for &GroupOrder {
    type Output = GroupOrder;
    fn mul(self, rhs: &GroupOrder) -> GroupOrder {
        GroupOrder(&self.0 * &rhs.0)
    }
}

impl Add for &GroupOrder {
    type Output = GroupOrder;
    fn add(self, rhs: &GroupOrder) -> GroupOrder {
        GroupOrder(&self.0 + &rhs.0)
    }
}

/// Panics if `rhs > self`.
impl Sub for &GroupOrder {
    type Output = GroupOrder;
    fn sub(self, rhs: &GroupOrder) -> GroupOrder {
        GroupOrder(&self.0 - &rhs.0)
    }
}

/// Integer division; use [`GroupOrder::checked_div`] when exactness matters.
impl Div for &GroupOrder {
    type Output = GroupOrder;
    fn div(self, rhs: &GroupOrder) -> GroupOrder {
        GroupOrder(&self.0 / &rhs.0)
    }
}

impl PartialEq<u64> for GroupOrder {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// One level of a stabilizer chain.
#[derive(Clone, Debug)]
pub struct Level {
    base_point: usize,
    /// Indices into the chain's strong generators that fix all earlier base points.
    generators: Vec<usize>,
    orbit: Vec<usize>,
    position: Vec<u32>,
    /// `transversal[j]` maps the base point to `orbit[j]`.
    transversal: Vec<Perm>,
    inverse: Vec<Perm>,
}

impl Level {
    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains_point(&self, point: usize) -> bool {
        self.position[point] != NONE
    }

    pub fn position(&self, point: usize) -> Option<usize> {
        let p = self.position[point];
        (p != NONE).then_some(p as usize)
    }

    /// Transversal element mapping the base point to `point`.
    pub fn representative(&self, point: usize) -> Option<&Perm> {
        self.position(point).map(|j| &self.transversal[j])
    }

    pub fn representative_at(&self, position: usize) -> &Perm {
        &self.transversal[position]
    }

    pub fn inverse_at(&self, position: usize) -> &Perm {
        &self.inverse[position]
    }
}

/// A verified base and strong generating set with per-level transversals.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    base: Vec<usize>,
    levels: Vec<Level>,
}

/// Product-replacement generator of pseudo-random group elements, used to
/// feed the randomized Schreier-Sims phase.
pub struct ProductReplacement {
    slots: Vec<Perm>,
    accumulator: Perm,
}

impl ProductReplacement {
    pub fn new<R: RngCore>(degree: usize, generators: &[Perm], rng: &mut R) -> ProductReplacement {
        let mut slots: Vec<Perm> = generators.to_vec();
        if slots.is_empty() {
            slots.push(Perm::identity(degree));
        }
        let mut k = 0;
        while slots.len() < 10 {
            slots.push(slots[k].clone());
            k += 1;
        }
        let mut pr = ProductReplacement { slots, accumulator: Perm::identity(degree) };
        for _ in 0..60 {
            pr.next_element(rng);
        }
        pr
    }

    pub fn next_element<R: RngCore>(&mut self, rng: &mut R) -> Perm {
        let n = self.slots.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen::<bool>() { self.slots[j].clone() } else { self.slots[j].inverse() };
        self.slots[i] = if rng.gen::<bool>() { &self.slots[i] * &other } else { &other * &self.slots[i] };
        self.accumulator = &self.accumulator * &self.slots[i];
        self.accumulator.clone()
    }
}

impl StabilizerChain {
    /// Randomized Schreier-Sims followed by a deterministic completion pass in
    /// which every Schreier generator at every level is sifted. The result is
    /// always a correct chain; the seed only affects its shape.
    pub fn build(group: &PermGroup, seed: u64) -> StabilizerChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StabilizerChain::from_generators(group.degree(), group.generators(), &mut rng)
    }

    pub fn from_generators<R: RngCore>(degree: usize, generators: &[Perm], rng: &mut R) -> StabilizerChain {
        let mut chain = StabilizerChain {
            degree,
            generators: generators.to_vec(),
            strong: Vec::new(),
            base: Vec::new(),
            levels: Vec::new(),
        };
        if chain.generators.is_empty() {
            chain.generators.push(Perm::identity(degree));
        }
        let nontrivial: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        if nontrivial.is_empty() {
            return chain;
        }
        // initial base: greedily the first moved point of the generators fixing
        // all base points chosen so far
        loop {
            let next = nontrivial
                .iter()
                .filter(|g| chain.base.iter().all(|&b| g.image(b) == b))
                .filter_map(|g| g.first_moved_point())
                .min();
            match next {
                Some(p) => chain.base.push(p),
                None => break,
            }
        }
        chain.strong = nontrivial.clone();
        chain.rebuild_levels();

        let mut pr = ProductReplacement::new(degree, &nontrivial, rng);
        let mut streak = 0;
        while streak < 24 {
            let r = pr.next_element(rng);
            let (residue, _) = chain.sift_from(&r, 0);
            if residue.is_identity() {
                streak += 1;
            } else {
                chain.add_strong(residue);
                streak = 0;
            }
        }
        chain.complete();
        chain
    }

    /// Adds a generator, keeping the chain verified. Returns `false` when the
    /// element was already in the group.
    pub fn add_generator(&mut self, g: Perm) -> Result<bool, PermError> {
        self.check_degree(&g)?;
        if self.contains_unchecked(&g) {
            return Ok(false);
        }
        if self.generators.len() == 1 && self.generators[0].is_identity() {
            self.generators.clear();
        }
        self.generators.push(g.clone());
        let (residue, _) = self.sift_from(&g, 0);
        self.add_strong(residue);
        self.complete();
        Ok(true)
    }

    fn check_degree(&self, p: &Perm) -> Result<(), PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch { left: self.degree, right: p.degree() });
        }
        Ok(())
    }

    /// Adds a nonidentity residue as a strong generator, extending the base if
    /// it fixes every base point.
    fn add_strong(&mut self, residue: Perm) {
        debug_assert!(!residue.is_identity());
        if self.base.iter().all(|&b| residue.image(b) == b) {
            self.base.push(residue.first_moved_point().unwrap());
        }
        self.strong.push(residue);
        self.rebuild_levels();
    }

    fn rebuild_levels(&mut self) {
        let degree = self.degree;
        let mut levels = Vec::with_capacity(self.base.len());
        let mut active: Vec<usize> = (0..self.strong.len()).collect();
        for &b in &self.base {
            let mut position = vec![NONE; degree];
            let mut orbit = vec![b];
            let mut transversal = vec![Perm::identity(degree)];
            position[b] = 0;
            let mut head = 0;
            while head < orbit.len() {
                let gamma = orbit[head];
                for &s in &active {
                    let img = self.strong[s].image(gamma);
                    if position[img] == NONE {
                        position[img] = orbit.len() as u32;
                        orbit.push(img);
                        let u = &transversal[head] * &self.strong[s];
                        transversal.push(u);
                    }
                }
                head += 1;
            }
            let inverse = transversal.iter().map(Perm::inverse).collect();
            levels.push(Level { base_point: b, generators: active.clone(), orbit, position, transversal, inverse });
            active.retain(|&s| self.strong[s].image(b) == b);
        }
        self.levels = levels;
    }

    /// Deterministic Schreier-Sims completion: sift every Schreier generator,
    /// bottom level first, restarting whenever a new strong generator appears.
    fn complete(&mut self) {
        'restart: loop {
            for i in (0..self.levels.len()).rev() {
                let level = &self.levels[i];
                for j in 0..level.orbit.len() {
                    for &s in &level.generators {
                        let gen = &self.strong[s];
                        let img = gen.image(level.orbit[j]);
                        let k = level.position[img] as usize;
                        let schreier = &(&level.transversal[j] * gen) * &level.inverse[k];
                        if schreier.is_identity() {
                            continue;
                        }
                        let (residue, _) = self.sift_from(&schreier, i + 1);
                        if !residue.is_identity() {
                            self.add_strong(residue);
                            continue 'restart;
                        }
                    }
                }
            }
            break;
        }
    }

    /// Sifts `p` starting at `start`. Returns the residue and the level where
    /// sifting stopped (`levels().len()` when it went through every level).
    pub fn sift_from(&self, p: &Perm, start: usize) -> (Perm, usize) {
        let mut residue = p.clone();
        let mut scratch = Perm::identity(self.degree);
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let gamma = residue.image(level.base_point);
            let pos = level.position[gamma];
            if pos == NONE {
                return (residue, i);
            }
            if pos != 0 {
                residue.compose_into(&level.inverse[pos as usize], &mut scratch);
                core::mem::swap(&mut residue, &mut scratch);
            }
        }
        (residue, self.levels.len())
    }

    pub fn sift(&self, p: &Perm) -> (Perm, usize) {
        self.sift_from(p, 0)
    }

    fn contains_unchecked(&self, p: &Perm) -> bool {
        let (residue, level) = self.sift_from(p, 0);
        level == self.levels.len() && residue.is_identity()
    }

    /// Membership by sifting.
    pub fn contains(&self, p: &Perm) -> Result<bool, PermError> {
        self.check_degree(p)?;
        Ok(self.contains_unchecked(p))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The generating set the chain was built from.
    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn group(&self) -> PermGroup {
        PermGroup { degree: self.degree, generators: self.generators.clone() }
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.is_empty()
    }

    /// Product of the fundamental orbit lengths.
    pub fn order(&self) -> GroupOrder {
        let mut n = BigUint::one();
        for level in &self.levels {
            n *= BigUint::from(level.orbit.len());
        }
        GroupOrder(n)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.levels.iter().try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    /// Element with the given mixed-radix index (level 0 is the least
    /// significant digit). Panics if `index >= order`.
    pub fn element_at(&self, mut index: u64) -> Perm {
        let mut digits = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let n = level.orbit.len() as u64;
            digits.push((index % n) as usize);
            index /= n;
        }
        assert_eq!(index, 0, "element index out of range");
        let mut x = Perm::identity(self.degree);
        let mut scratch = Perm::identity(self.degree);
        for (level, &d) in self.levels.iter().zip(&digits).rev() {
            if d != 0 {
                x.compose_into(&level.transversal[d], &mut scratch);
                core::mem::swap(&mut x, &mut scratch);
            }
        }
        x
    }

    /// Index of `p` in `0..order`, or `None` if `p` is not in the group.
    pub fn index_of(&self, p: &Perm) -> Option<u64> {
        if p.degree() != self.degree {
            return None;
        }
        let mut residue = p.clone();
        let mut scratch = Perm::identity(self.degree);
        let mut index = 0u64;
        let mut radix = 1u64;
        for level in &self.levels {
            let pos = level.position[residue.image(level.base_point)];
            if pos == NONE {
                return None;
            }
            index += pos as u64 * radix;
            radix *= level.orbit.len() as u64;
            residue.compose_into(&level.inverse[pos as usize], &mut scratch);
            core::mem::swap(&mut residue, &mut scratch);
        }
        residue.is_identity().then_some(index)
    }

    /// Index of a known member computed from its base images alone.
    /// `images[i]` must hold the image of the `i`-th base point; the buffer is
    /// consumed. The result is meaningless for non-members.
    pub fn index_of_base_images(&self, images: &mut [u16]) -> Option<u64> {
        let mut index = 0u64;
        let mut radix = 1u64;
        let n = self.levels.len();
        for i in 0..n {
            let level = &self.levels[i];
            let pos = level.position[images[i] as usize];
            if pos == NONE {
                return None;
            }
            index += pos as u64 * radix;
            radix *= level.orbit.len() as u64;
            if pos != 0 {
                let inv = level.inverse[pos as usize].images();
                for img in &mut images[i + 1..n] {
                    *img = inv[*img as usize];
                }
            }
        }
        Some(index)
    }

    /// Exactly uniform random element: one uniformly chosen transversal
    /// element per level.
    pub fn random_element<R: RngCore + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut x = Perm::identity(self.degree);
        let mut scratch = Perm::identity(self.degree);
        for level in self.levels.iter().rev() {
            let d = rng.gen_range(0..level.orbit.len());
            if d != 0 {
                x.compose_into(&level.transversal[d], &mut scratch);
                core::mem::swap(&mut x, &mut scratch);
            }
        }
        x
    }

    /// Orbit partition of all points under the stabilizer of the first
    /// `depth` base points: `ids[p]` is the smallest point of `p`'s orbit.
    pub fn stabilizer_orbit_ids(&self, depth: usize) -> Vec<u16> {
        let gens: &[usize] = if depth < self.levels.len() { &self.levels[depth].generators } else { &[] };
        orbit_ids(self.degree, gens.iter().map(|&s| &self.strong[s]))
    }
}

/// Orbit partition under a set of permutations: each point is labelled by the
/// smallest point of its orbit.
pub fn orbit_ids<'a>(degree: usize, gens: impl Iterator<Item = &'a Perm> + Clone) -> Vec<u16> {
    let mut ids = vec![u16::MAX; degree];
    let mut queue = Vec::new();
    for start in 0..degree {
        if ids[start] != u16::MAX {
            continue;
        }
        ids[start] = start as u16;
        queue.clear();
        queue.push(start);
        while let Some(p) = queue.pop() {
            for g in gens.clone() {
                let q = g.image(p);
                if ids[q] == u16::MAX {
                    ids[q] = start as u16;
                    queue.push(q);
                }
            }
        }
    }
    ids
}

/// Orbit of `point` under `gens`, in discovery order.
pub fn orbit(degree: usize, gens: &[Perm], point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut out = vec![point];
    let mut head = 0;
    while head < out.len() {
        let p = out[head];
        for g in gens {
            let q = g.image(p);
            if !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
        head += 1;
    }
    out
}

/// True iff every generator of `sub` lies in the group of `chain`.
pub fn subgroup_of(sub: &PermGroup, chain: &StabilizerChain) -> Result<bool, PermError> {
    if sub.degree() != chain.degree() {
        return Err(PermError::DegreeMismatch { left: sub.degree(), right: chain.degree() });
    }
    for g in sub.generators() {
        if !chain.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mutual containment plus equal orders.
pub fn same_group(a: &StabilizerChain, b: &StabilizerChain) -> Result<bool, PermError> {
    Ok(a.order() == b.order() && subgroup_of(&a.group(), b)? && subgroup_of(&b.group(), a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn p(text: &str, degree: usize) -> Perm {
        Perm::parse_cycles(text, degree).unwrap()
    }

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|g| p(g, degree)).collect()).unwrap()
    }

    #[test]
    fn s4_order_matches_enumeration() {
        let g = group(4, &["(1,2)", "(1,2,3,4)"]);
        let chain = g.chain(1);
        assert_eq!(chain.order(), 24u64);
        assert_eq!(oracle::enumerate_elements(&g, 1000).unwrap().len(), 24);
    }

    #[test]
    fn trivial_group() {
        let chain = PermGroup::trivial(5).chain(3);
        assert_eq!(chain.order(), 1u64);
        assert!(chain.contains(&Perm::identity(5)).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(chain.random_element(&mut rng).is_identity());
    }

    #[test]
    fn membership_in_a4() {
        let a4 = group(4, &["(1,2,3)", "(2,3,4)"]).chain(7);
        assert_eq!(a4.order(), 12u64);
        assert!(a4.contains(&p("(1,2)(3,4)", 4)).unwrap());
        assert!(a4.contains(&Perm::identity(4)).unwrap());
        assert!(!a4.contains(&p("(1,2)", 4)).unwrap());
        assert!(a4.contains(&p("(1,2)", 5)).is_err());
    }

    #[test]
    fn subgroup_and_same_group() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(1);
        let a4 = group(4, &["(1,2,3)", "(2,3,4)"]).chain(1);
        assert!(subgroup_of(&a4.group(), &s4).unwrap());
        assert!(!subgroup_of(&s4.group(), &a4).unwrap());
        assert!(!same_group(&a4, &s4).unwrap());
        assert!(same_group(&s4, &s4).unwrap());
        let s4b = group(4, &["(1,2)", "(2,3)", "(3,4)"]).chain(9);
        assert!(same_group(&s4, &s4b).unwrap());
    }

    #[test]
    fn index_round_trip() {
        let chain = group(6, &["(1,2,3,4,5,6)", "(1,2)"]).chain(5);
        let n = chain.order_u64().unwrap();
        assert_eq!(n, 720);
        for i in 0..n {
            let x = chain.element_at(i);
            assert_eq!(chain.index_of(&x), Some(i));
            let mut imgs: Vec<u16> = chain.base().iter().map(|&b| x.image(b) as u16).collect();
            assert_eq!(chain.index_of_base_images(&mut imgs), Some(i));
        }
    }

    #[test]
    fn seeds_agree_on_the_group() {
        let g = group(8, &["(1,2,3,4,5,6,7,8)", "(1,3)(2,8)"]);
        let a = g.chain(1);
        let b = g.chain(99);
        assert_eq!(a.order(), b.order());
        assert!(same_group(&a, &b).unwrap());
    }

    #[test]
    fn add_generator_grows_group() {
        let mut chain = group(5, &["(1,2,3,4,5)"]).chain(2);
        assert_eq!(chain.order(), 5u64);
        assert!(!chain.add_generator(p("(1,3,5,2,4)", 5)).unwrap());
        assert!(chain.add_generator(p("(1,2)", 5)).unwrap());
        assert_eq!(chain.order(), 120u64);
    }

    #[test]
    fn schreier_generators_sift() {
        let chain = group(7, &["(1,2,3,4,5,6,7)", "(2,3,5)(4,7,6)"]).chain(11);
        assert_eq!(chain.order(), 21u64);
        for (i, level) in chain.levels().iter().enumerate() {
            for j in 0..level.orbit().len() {
                for &s in level.generator_indices() {
                    let x = &level.representative_at(j).clone() * &chain.strong_generators()[s];
                    let (residue, _) = chain.sift_from(&x, i);
                    assert!(residue.is_identity());
                }
                let u = level.representative_at(j);
                assert_eq!(u.image(level.base_point()), level.orbit()[j]);
            }
        }
    }

    #[test]
    fn c2_uniformity() {
        let chain = group(2, &["(1,2)"]).chain(0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 10_000;
        let hits = (0..draws).filter(|_| chain.random_element(&mut rng).is_identity()).count() as f64;
        // 3 sigma = 3 * sqrt(10^4 / 4) = 150
        assert!((hits - 5000.0).abs() < 150.0, "{hits}");
    }

    #[test]
    fn s3_chi_square() {
        let g = group(3, &["(1,2)", "(1,2,3)"]);
        let table = oracle::enumerate_elements(&g, 100).unwrap();
        let chain = g.chain(4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut counts = [0u32; 6];
        for _ in 0..10_000 {
            counts[table.index_of(&chain.random_element(&mut rng)).unwrap()] += 1;
        }
        let expected = 10_000.0 / 6.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square with 5 dof, p = 0.001 critical value
        assert!(chi2 < 20.515, "chi2 = {chi2}");
    }
}
