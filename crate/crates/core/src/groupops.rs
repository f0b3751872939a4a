//! Group constructions and invariants: wreath and direct products, block
//! actions, normal closures, derived subgroups, centers and central quotients.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::backtrack::{centralizer, SearchBudget, SearchError};
use crate::chain::{orbit, GroupError, GroupOrder, PermGroup, StabilizerChain};
use crate::perm::{Perm, PermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupOpsError {
    #[error("invalid block system: {0}")]
    InvalidBlocks(&'static str),
    #[error("generator {generator} splits block {block}")]
    BlockSplit { generator: usize, block: usize },
    #[error("base group order must be at least 2, got {0}")]
    BaseOrder(usize),
    #[error("element is not in the group")]
    NotInGroup,
    #[error("element is not central")]
    NotCentral,
    #[error("element is not an involution")]
    NotInvolution,
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Partition of the points into equal-size blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    degree: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl BlockSystem {
    pub fn new(degree: usize, blocks: Vec<Vec<usize>>) -> Result<BlockSystem, GroupOpsError> {
        if blocks.is_empty() || blocks[0].is_empty() {
            return Err(GroupOpsError::InvalidBlocks("empty block"));
        }
        let size = blocks[0].len();
        let mut block_of = vec![usize::MAX; degree];
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != size {
                return Err(GroupOpsError::InvalidBlocks("blocks differ in size"));
            }
            for &p in block {
                if p >= degree {
                    return Err(GroupOpsError::InvalidBlocks("point out of range"));
                }
                if block_of[p] != usize::MAX {
                    return Err(GroupOpsError::InvalidBlocks("blocks overlap"));
                }
                block_of[p] = i;
            }
        }
        if block_of.contains(&usize::MAX) {
            return Err(GroupOpsError::InvalidBlocks("blocks do not cover every point"));
        }
        Ok(BlockSystem { degree, blocks, block_of })
    }

    /// Blocks `{k*size .. k*size+size-1}`; for size 2 on 44 points these are
    /// the pairs `{2i-1, 2i}` in 1-based numbering.
    pub fn consecutive(degree: usize, size: usize) -> Result<BlockSystem, GroupOpsError> {
        if size == 0 || !degree.is_multiple_of(size) {
            return Err(GroupOpsError::InvalidBlocks("block size does not divide the degree"));
        }
        BlockSystem::new(degree, (0..degree / size).map(|k| (k * size..(k + 1) * size).collect()).collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn block_of(&self, point: usize) -> usize {
        self.block_of[point]
    }

    /// Induced permutation of the blocks, or `None` if `p` splits a block.
    pub fn induced(&self, p: &Perm) -> Option<Perm> {
        let mut images = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let target = self.block_of[p.image(block[0])];
            if block.iter().any(|&q| self.block_of[p.image(q)] != target) {
                return None;
            }
            images.push(target);
        }
        Perm::from_images(&images).ok()
    }

    pub fn is_preserved_by(&self, g: &PermGroup) -> bool {
        g.generators().iter().all(|s| self.induced(s).is_some())
    }
}

/// Action on the blocks induced by the generators of `g`.
pub fn block_action(g: &PermGroup, blocks: &BlockSystem) -> Result<PermGroup, GroupOpsError> {
    if g.degree() != blocks.degree() {
        return Err(PermError::DegreeMismatch { left: g.degree(), right: blocks.degree() }.into());
    }
    let mut gens = Vec::with_capacity(g.generators().len());
    for (i, s) in g.generators().iter().enumerate() {
        let image = blocks.induced(s).ok_or_else(|| {
            let block = (0..blocks.len())
                .find(|&b| {
                    let blk = &blocks.blocks[b];
                    blk.iter().any(|&q| blocks.block_of(s.image(q)) != blocks.block_of(s.image(blk[0])))
                })
                .unwrap_or(0);
            GroupOpsError::BlockSplit { generator: i, block }
        })?;
        gens.push(image);
    }
    Ok(PermGroup::new(blocks.len(), gens)?)
}

/// Imprimitive wreath product `C_m wr top` on `m * n` points: a base cycle on
/// block 0 plus rigid block-permuting lifts of the top generators.
pub fn wreath_imprimitive(base_order: usize, top: &PermGroup) -> Result<(PermGroup, BlockSystem), GroupOpsError> {
    if base_order < 2 {
        return Err(GroupOpsError::BaseOrder(base_order));
    }
    let n = top.degree();
    let degree = base_order * n;
    let mut gens = Vec::new();
    let mut cycle: Vec<usize> = (0..degree).collect();
    for (j, image) in cycle.iter_mut().take(base_order).enumerate() {
        *image = (j + 1) % base_order;
    }
    gens.push(Perm::from_images(&cycle)?);
    for sigma in top.generators().iter().filter(|s| !s.is_identity()) {
        let images: Vec<usize> =
            (0..degree).map(|p| base_order * sigma.image(p / base_order) + p % base_order).collect();
        gens.push(Perm::from_images(&images)?);
    }
    let blocks = BlockSystem::consecutive(degree, base_order)?;
    Ok((PermGroup::new(degree, gens)?, blocks))
}

/// Smallest normal subgroup containing `seed`.
pub fn normal_closure(g: &StabilizerChain, seed: &[Perm]) -> Result<StabilizerChain, GroupOpsError> {
    let degree = g.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut n = StabilizerChain::from_generators(degree, &[], &mut rng);
    let mut queue: Vec<Perm> = Vec::new();
    for s in seed {
        if n.add_generator(s.clone())? {
            queue.push(s.clone());
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        for s in g.generators() {
            let c = x.conjugate_by(s);
            if n.add_generator(c.clone())? {
                queue.push(c);
            }
        }
        head += 1;
    }
    Ok(n)
}

/// Normal closure of the commutators of all ordered generator pairs.
pub fn derived_subgroup(g: &StabilizerChain) -> Result<StabilizerChain, GroupOpsError> {
    let gens = g.generators();
    let mut seed = Vec::new();
    for a in gens {
        for b in gens {
            let c = a.commutator(b)?;
            if !c.is_identity() {
                seed.push(c);
            }
        }
    }
    normal_closure(g, &seed)
}

pub fn is_perfect(g: &StabilizerChain) -> Result<bool, GroupOpsError> {
    Ok(derived_subgroup(g)?.order() == g.order())
}

/// Intersection of the generator centralizers, computed as a sequence of
/// centralizer-in-subgroup searches starting with the generator that has the
/// fewest fixed points.
pub fn center(g: &StabilizerChain, budget: SearchBudget<'_>) -> Result<StabilizerChain, GroupOpsError> {
    let mut gens: Vec<&Perm> = g.generators().iter().filter(|s| !s.is_identity()).collect();
    gens.sort_by_key(|s| s.fixed_point_count());
    let mut current = g.clone();
    for s in gens {
        if current.generators().iter().all(|z| z.commutes_with(s)) {
            continue;
        }
        current = centralizer(&current, s, budget)?;
    }
    Ok(current)
}

/// Group on the disjoint union of the two point sets.
pub fn direct_product(a: &PermGroup, b: &PermGroup) -> PermGroup {
    let (da, db) = (a.degree(), b.degree());
    let ida = Perm::identity(da);
    let idb = Perm::identity(db);
    let mut gens: Vec<Perm> = a.generators().iter().map(|x| pair_perm(x, &idb)).collect();
    gens.extend(b.generators().iter().map(|y| pair_perm(&ida, y)));
    PermGroup::new(da + db, gens).expect("degrees agree by construction")
}

/// `(x, y)` acting on `0..dx` by `x` and on `dx..dx+dy` by `y`.
pub fn pair_perm(x: &Perm, y: &Perm) -> Perm {
    let dx = x.degree();
    let images: Vec<usize> =
        x.images().iter().map(|&i| i as usize).chain(y.images().iter().map(|&i| dx + i as usize)).collect();
    Perm::from_images(&images).expect("pair of bijections")
}

/// Finest invariant partition with `a` and `b` in the same part. Returns a
/// block system when the parts have equal size and there is more than one.
pub fn minimal_block_system(g: &PermGroup, a: usize, b: usize) -> Option<BlockSystem> {
    let degree = g.degree();
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut queue = vec![(a, b)];
    {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return None;
        }
        parent[ra.max(rb)] = ra.min(rb);
    }
    while let Some((x, y)) = queue.pop() {
        for s in g.generators() {
            let u = find(&mut parent, s.image(x));
            let v = find(&mut parent, s.image(y));
            if u != v {
                parent[u.max(v)] = u.min(v);
                queue.push((u, v));
            }
        }
    }
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; degree];
    for p in 0..degree {
        let r = find(&mut parent, p);
        if index[r] == usize::MAX {
            index[r] = parts.len();
            parts.push(Vec::new());
        }
        parts[index[r]].push(p);
    }
    if parts.len() < 2 {
        return None;
    }
    BlockSystem::new(degree, parts).ok().filter(|bs| bs.is_preserved_by(g))
}

/// All distinct minimal block systems through point 0 of a transitive group.
pub fn block_systems_through_first_point(g: &PermGroup) -> Vec<BlockSystem> {
    let degree = g.degree();
    if orbit(degree, g.generators(), 0).len() != degree {
        return Vec::new();
    }
    let mut out: Vec<BlockSystem> = Vec::new();
    for b in 1..degree {
        if let Some(bs) = minimal_block_system(g, 0, b) {
            if !out.iter().any(|o| o == &bs) {
                out.push(bs);
            }
        }
    }
    out
}

/// `(G x G) / <(t, t)>` for a central involution `t`, with elements stored as
/// canonical pairs.
#[derive(Clone, Debug)]
pub struct CentralQuotientGroup {
    factor: StabilizerChain,
    product: StabilizerChain,
    t: Perm,
}

/// Canonical representative of `{(x, y), (xt, yt)}`: the pair whose first
/// coordinate has the lexicographically smaller image table, ties broken by
/// the second coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientElement {
    x: Perm,
    y: Perm,
}

impl QuotientElement {
    pub fn first(&self) -> &Perm {
        &self.x
    }

    pub fn second(&self) -> &Perm {
        &self.y
    }
}

impl CentralQuotientGroup {
    pub fn factor(&self) -> &StabilizerChain {
        &self.factor
    }

    /// `G x G` as a permutation group of twice the degree.
    pub fn product(&self) -> &StabilizerChain {
        &self.product
    }

    pub fn t(&self) -> &Perm {
        &self.t
    }

    /// `|G|^2 / 2`.
    pub fn order(&self) -> GroupOrder {
        let n = self.factor.order();
        &(&n * &n) / &GroupOrder::from(2)
    }

    pub fn element(&self, x: Perm, y: Perm) -> QuotientElement {
        let xt = &x * &self.t;
        let yt = &y * &self.t;
        if (xt.images(), yt.images()) < (x.images(), y.images()) {
            QuotientElement { x: xt, y: yt }
        } else {
            QuotientElement { x, y }
        }
    }

    pub fn identity(&self) -> QuotientElement {
        let id = Perm::identity(self.factor.degree());
        self.element(id.clone(), id)
    }

    pub fn multiply(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        self.element(&a.x * &b.x, &a.y * &b.y)
    }

    pub fn inverse(&self, a: &QuotientElement) -> QuotientElement {
        self.element(a.x.inverse(), a.y.inverse())
    }

    pub fn commutator(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        self.element(a.x.commutator(&b.x).unwrap(), a.y.commutator(&b.y).unwrap())
    }

    /// `(t, 1) T`.
    pub fn designated_noncommutator(&self) -> QuotientElement {
        self.element(self.t.clone(), Perm::identity(self.factor.degree()))
    }

    pub fn to_product_perm(&self, a: &QuotientElement) -> Perm {
        pair_perm(&a.x, &a.y)
    }

    /// Every element, for factors small enough to enumerate (`|G| <= 2^16`).
    pub fn elements(&self) -> Vec<QuotientElement> {
        let n = self.factor.order_u64().filter(|&n| n <= 1 << 16).expect("factor too large to enumerate");
        let xs: Vec<Perm> = (0..n).map(|i| self.factor.element_at(i)).collect();
        let mut out = Vec::with_capacity((n * n / 2) as usize);
        for x in &xs {
            for y in &xs {
                let e = self.element(x.clone(), y.clone());
                if e.x == *x && e.y == *y {
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Quotient of `G x G` by the diagonal copy of a central involution `t`.
pub fn central_quotient(g: &StabilizerChain, t: &Perm) -> Result<CentralQuotientGroup, GroupOpsError> {
    if !g.contains(t)? {
        return Err(GroupOpsError::NotInGroup);
    }
    if t.is_identity() || !(t * t).is_identity() {
        return Err(GroupOpsError::NotInvolution);
    }
    if !g.generators().iter().all(|s| s.commutes_with(t)) {
        return Err(GroupOpsError::NotCentral);
    }
    let group = g.group();
    let product = StabilizerChain::build(&direct_product(&group, &group), 0);
    Ok(CentralQuotientGroup { factor: g.clone(), product, t: t.clone() })
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

    fn order(g: &PermGroup) -> u64 {
        g.chain(0).order_u64().unwrap()
    }

    #[test]
    fn wreath_examples() {
        let (h, blocks) = wreath_imprimitive(2, &PermGroup::trivial(1)).unwrap();
        assert_eq!(order(&h), 2);
        assert_eq!(blocks.len(), 1);
        let (d8, _) = wreath_imprimitive(2, &group(2, &["(1,2)"])).unwrap();
        assert_eq!(order(&d8), 8);
        assert_eq!(oracle::enumerate_elements(&d8, 100).unwrap().len(), 8);
        assert_eq!(oracle::brute_center(&oracle::enumerate_elements(&d8, 100).unwrap()).len(), 2);
        assert_eq!(wreath_imprimitive(1, &d8).unwrap_err(), GroupOpsError::BaseOrder(1));
    }

    #[test]
    fn wreath_order_law() {
        // transitive tops on n <= 6 points: |C2 wr top| = 2^n |top|
        for (n, gens) in [
            (3, vec!["(1,2,3)"]),
            (4, vec!["(1,2,3,4)", "(1,3)"]),
            (5, vec!["(1,2,3,4,5)"]),
            (6, vec!["(1,2,3,4,5,6)", "(1,6)(2,5)(3,4)"]),
        ] {
            let top = group(n, &gens);
            let (h, _) = wreath_imprimitive(2, &top).unwrap();
            let expected = (1u64 << n) * order(&top);
            assert_eq!(order(&h), expected);
            assert_eq!(oracle::enumerate_elements(&h, 10_000).unwrap().len() as u64, expected);
        }
    }

    #[test]
    fn block_action_and_split() {
        let (h, blocks) = wreath_imprimitive(2, &group(3, &["(1,2,3)", "(1,2)"])).unwrap();
        let q = block_action(&h, &blocks).unwrap();
        assert_eq!(order(&q), 6);
        let bad = group(4, &["(1,3)"]);
        let err = block_action(&bad, &BlockSystem::consecutive(4, 2).unwrap()).unwrap_err();
        assert_eq!(err, GroupOpsError::BlockSplit { generator: 0, block: 0 });
    }

    #[test]
    fn block_action_is_a_homomorphism() {
        let (h, blocks) = wreath_imprimitive(2, &group(4, &["(1,2,3,4)", "(1,3)"])).unwrap();
        let chain = h.chain(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = chain.random_element(&mut rng);
            let b = chain.random_element(&mut rng);
            let ab = blocks.induced(&(&a * &b)).unwrap();
            assert_eq!(ab, &blocks.induced(&a).unwrap() * &blocks.induced(&b).unwrap());
        }
    }

    #[test]
    fn derived_examples() {
        let c6 = group(6, &["(1,2,3,4,5,6)"]).chain(0);
        assert!(derived_subgroup(&c6).unwrap().is_trivial());
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        let d = derived_subgroup(&s4).unwrap();
        assert_eq!(d.order(), 12u64);
        let table = oracle::enumerate_elements(&s4.group(), 100).unwrap();
        let brute = oracle::brute_derived(&table);
        assert!(brute.elements().iter().all(|x| d.contains(x).unwrap()));
        // normality
        for n in d.generators() {
            for s in s4.generators() {
                assert!(d.contains(&n.conjugate_by(s)).unwrap());
            }
        }
    }

    #[test]
    fn normal_closure_examples() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        assert!(normal_closure(&s4, &[Perm::identity(4)]).unwrap().is_trivial());
        assert_eq!(normal_closure(&s4, &[p("(1,2,3)", 4)]).unwrap().order(), 12u64);
        let d8 = group(4, &["(1,2,3,4)", "(1,3)"]).chain(0);
        let z = normal_closure(&d8, &[p("(1,3)(2,4)", 4)]).unwrap();
        assert_eq!(z.order(), 2u64);
    }

    #[test]
    fn center_examples() {
        let c6 = group(6, &["(1,2,3,4,5,6)"]).chain(0);
        assert_eq!(center(&c6, SearchBudget::UNLIMITED).unwrap().order(), 6u64);
        let s3 = group(3, &["(1,2)", "(1,2,3)"]).chain(0);
        assert!(center(&s3, SearchBudget::UNLIMITED).unwrap().is_trivial());
        let d8 = group(4, &["(1,2,3,4)", "(1,3)"]).chain(0);
        let z = center(&d8, SearchBudget::UNLIMITED).unwrap();
        assert_eq!(z.order(), 2u64);
        assert!(z.contains(&p("(1,3)(2,4)", 4)).unwrap());
    }

    #[test]
    fn perfectness() {
        let a5 = group(5, &["(1,2,3)", "(1,2,3,4,5)"]).chain(0);
        assert!(is_perfect(&a5).unwrap());
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]).chain(0);
        assert!(!is_perfect(&s4).unwrap());
        let a5t = oracle::enumerate_elements(&a5.group(), 100).unwrap();
        assert_eq!(oracle::brute_derived(&a5t).len(), 60);
    }

    #[test]
    fn direct_product_examples() {
        let c2 = group(2, &["(1,2)"]);
        assert_eq!(order(&direct_product(&c2, &c2)), 4);
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let s3s3 = direct_product(&s3, &s3);
        assert_eq!(order(&s3s3), 36);
        assert_eq!(oracle::enumerate_elements(&s3s3, 100).unwrap().len(), 36);
        let triv = PermGroup::trivial(1);
        assert_eq!(order(&direct_product(&triv, &s3)), 6);
    }

    #[test]
    fn central_quotient_basics() {
        let c2 = group(2, &["(1,2)"]).chain(0);
        let t = p("(1,2)", 2);
        let k = central_quotient(&c2, &t).unwrap();
        assert_eq!(k.order(), 2u64);
        assert_eq!(k.elements().len(), 2);
        let id = Perm::identity(2);
        assert_eq!(k.element(t.clone(), id.clone()), k.element(id.clone(), t.clone()));
        assert_eq!(k.designated_noncommutator(), k.element(id, t));
    }

    #[test]
    fn central_quotient_rejects_bad_t() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]).chain(0);
        assert_eq!(central_quotient(&s3, &p("(1,2)", 3)).unwrap_err(), GroupOpsError::NotCentral);
        let c4 = group(4, &["(1,2,3,4)"]).chain(0);
        assert_eq!(central_quotient(&c4, &p("(1,2,3,4)", 4)).unwrap_err(), GroupOpsError::NotInvolution);
        assert_eq!(central_quotient(&c4, &p("(1,2)", 4)).unwrap_err(), GroupOpsError::NotInGroup);
    }

    #[test]
    fn central_quotient_arithmetic_is_exhaustively_consistent() {
        // quaternion group of order 8 in its regular representation
        let q8 = group(8, &["(1,2,3,4)(5,6,7,8)", "(1,5,3,7)(2,8,4,6)"]).chain(0);
        assert_eq!(q8.order(), 8u64);
        let k = central_quotient(&q8, &p("(1,3)(2,4)(5,7)(6,8)", 8)).unwrap();
        let elems = k.elements();
        assert_eq!(elems.len(), 32);
        assert_eq!(k.order(), 32u64);
        for a in &elems {
            assert_eq!(&k.element(a.first().clone(), a.second().clone()), a);
            assert_eq!(k.multiply(a, &k.inverse(a)), k.identity());
            for b in &elems {
                for c in elems.iter().step_by(5) {
                    assert_eq!(k.multiply(&k.multiply(a, b), c), k.multiply(a, &k.multiply(b, c)));
                }
            }
        }
    }

    #[test]
    fn minimal_blocks() {
        let (h, blocks) = wreath_imprimitive(2, &group(3, &["(1,2,3)"])).unwrap();
        let found = block_systems_through_first_point(&h);
        assert!(found.contains(&blocks));
        // S4 is primitive
        assert!(block_systems_through_first_point(&group(4, &["(1,2)", "(1,2,3,4)"])).is_empty());
    }
}
