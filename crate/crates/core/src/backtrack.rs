//! Backtrack search over a stabilizer chain: centralizers and conjugacy tests.
//!
//! Elements are enumerated by their base images. A partial point map is kept
//! alongside: fixing the image of one point of a cycle of `g` fixes the images
//! of the whole cycle (`x(g(i)) = h(x(i))`), and candidate images must lie in
//! `h`-cycles of the same length. Each node also checks that every forced
//! image is still reachable from the current prefix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chain::{orbit, orbit_ids, StabilizerChain};
use crate::perm::{Perm, PermError};
use crate::GroupOrder;

const NONE: u16 = u16::MAX;

/// Wall-clock limit supplied by the caller; the core has no clock of its own.
pub trait Deadline {
    fn expired(&self) -> bool;
}

/// Optional limits on a search. Exceeding one aborts with
/// [`SearchError::BudgetExhausted`], never with a wrong answer.
#[derive(Clone, Copy, Default)]
pub struct SearchBudget<'a> {
    pub max_nodes: Option<u64>,
    pub deadline: Option<&'a dyn Deadline>,
}

impl<'a> SearchBudget<'a> {
    pub const UNLIMITED: SearchBudget<'static> = SearchBudget { max_nodes: None, deadline: None };

    pub fn nodes(max_nodes: u64) -> SearchBudget<'static> {
        SearchBudget { max_nodes: Some(max_nodes), deadline: None }
    }

    pub fn with_deadline(self, deadline: &'a dyn Deadline) -> SearchBudget<'a> {
        SearchBudget { deadline: Some(deadline), ..self }
    }
}

impl fmt::Debug for SearchBudget<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchBudget")
            .field("max_nodes", &self.max_nodes)
            .field("deadline", &self.deadline.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error(transparent)]
    Perm(#[from] PermError),
}

struct Search<'a, 'b> {
    chain: &'a StabilizerChain,
    g: &'a Perm,
    h: &'a Perm,
    g_len: Vec<u16>,
    h_len: Vec<u16>,
    /// Orbit partition under the stabilizer of the first `depth` base points.
    orbit_ids: Vec<Vec<u16>>,
    map: Vec<u16>,
    taken: Vec<bool>,
    trail: Vec<u16>,
    nodes: u64,
    budget: SearchBudget<'b>,
}

impl<'a, 'b> Search<'a, 'b> {
    fn new(chain: &'a StabilizerChain, g: &'a Perm, h: &'a Perm, budget: SearchBudget<'b>) -> Self {
        let degree = chain.degree();
        let orbit_ids = (0..=chain.levels().len()).map(|d| chain.stabilizer_orbit_ids(d)).collect();
        Search {
            chain,
            g,
            h,
            g_len: g.cycle_lengths(),
            h_len: h.cycle_lengths(),
            orbit_ids,
            map: vec![NONE; degree],
            taken: vec![false; degree],
            trail: Vec::with_capacity(degree),
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if self.budget.max_nodes.is_some_and(|m| self.nodes > m) {
            return Err(SearchError::BudgetExhausted { nodes: self.nodes });
        }
        if self.nodes.is_multiple_of(256) && self.budget.deadline.is_some_and(|d| d.expired()) {
            return Err(SearchError::BudgetExhausted { nodes: self.nodes });
        }
        Ok(())
    }

    /// Maps `p` to `q` and propagates along the cycle of `p` under `g`.
    fn assign(&mut self, p: usize, q: usize) -> bool {
        let len = self.g_len[p];
        if len != self.h_len[q] {
            return false;
        }
        let (mut a, mut b) = (p, q);
        for _ in 0..len {
            let cur = self.map[a];
            if cur == NONE {
                if self.taken[b] {
                    return false;
                }
                self.map[a] = b as u16;
                self.taken[b] = true;
                self.trail.push(a as u16);
            } else if cur as usize != b {
                return false;
            }
            a = self.g.image(a);
            b = self.h.image(b);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().unwrap() as usize;
            let q = self.map[p] as usize;
            self.taken[q] = false;
            self.map[p] = NONE;
        }
    }

    fn reset(&mut self) {
        self.undo(0);
    }

    /// Depth-first search below `level`, where `prefix` is the product of the
    /// transversal elements chosen above.
    fn dfs(&mut self, level: usize, prefix: &Perm) -> Result<Option<Perm>, SearchError> {
        self.tick()?;
        let levels = self.chain.levels();
        if level == levels.len() {
            return Ok((&self.g.conjugate_by(prefix) == self.h).then(|| prefix.clone()));
        }
        let pinv = prefix.inverse();
        let ids = &self.orbit_ids[level];
        for &p in &self.trail {
            let q = self.map[p as usize] as usize;
            if ids[p as usize] != ids[pinv.image(q)] {
                return Ok(None);
            }
        }
        let lvl = &levels[level];
        let b = lvl.base_point();
        let forced = self.map[b];
        if forced != NONE {
            let delta = pinv.image(forced as usize);
            let Some(u) = lvl.representative(delta) else {
                return Ok(None);
            };
            let next = u * prefix;
            return self.dfs(level + 1, &next);
        }
        for &delta in lvl.orbit() {
            let gamma = prefix.image(delta);
            if self.taken[gamma] || self.g_len[b] != self.h_len[gamma] {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(b, gamma) {
                let next = lvl.representative(delta).unwrap() * prefix;
                let found = self.dfs(level + 1, &next)?;
                if found.is_some() {
                    self.undo(mark);
                    return Ok(found);
                }
            }
            self.undo(mark);
        }
        Ok(None)
    }

    /// Searches for an element fixing the first `level` base points and
    /// mapping the next one to `delta`.
    fn find_below(&mut self, level: usize, delta: usize) -> Result<Option<Perm>, SearchError> {
        self.reset();
        let levels = self.chain.levels();
        for lvl in &levels[..level] {
            if !self.assign(lvl.base_point(), lvl.base_point()) {
                self.reset();
                return Ok(None);
            }
        }
        let lvl = &levels[level];
        let b = lvl.base_point();
        let ok = if self.map[b] == NONE { self.assign(b, delta) } else { self.map[b] as usize == delta };
        let found = if ok {
            let u = lvl.representative(delta).expect("delta lies in the fundamental orbit").clone();
            self.dfs(level + 1, &u)?
        } else {
            None
        };
        self.reset();
        Ok(found)
    }
}

/// Centralizer of `g` in the group of `chain`; `g` need not lie in the group.
/// Returned with its own verified chain.
pub fn centralizer(
    chain: &StabilizerChain,
    g: &Perm,
    budget: SearchBudget<'_>,
) -> Result<StabilizerChain, SearchError> {
    if g.degree() != chain.degree() {
        return Err(PermError::DegreeMismatch { left: chain.degree(), right: g.degree() }.into());
    }
    let degree = chain.degree();
    let mut search = Search::new(chain, g, g, budget);
    let mut found: Vec<Perm> = Vec::new();
    for (l, lvl) in chain.levels().iter().enumerate().rev() {
        let b = lvl.base_point();
        // found elements so far generate the centralizer inside the stabilizer
        // of the first l+1 base points
        let deeper = orbit_ids(degree, found.iter());
        let mut reached = vec![false; degree];
        for p in orbit(degree, &found, b) {
            reached[p] = true;
        }
        let mut dead = vec![false; degree];
        for &delta in lvl.orbit() {
            if reached[delta] || dead[delta] {
                continue;
            }
            match search.find_below(l, delta)? {
                Some(x) => {
                    debug_assert!(x.commutes_with(g));
                    found.push(x);
                    for p in orbit(degree, &found, b) {
                        reached[p] = true;
                    }
                }
                None => {
                    let id = deeper[delta];
                    for p in 0..degree {
                        if deeper[p] == id {
                            dead[p] = true;
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    Ok(StabilizerChain::from_generators(degree, &found, &mut rng))
}

/// Some `x` in the group with `x^-1 g x = h`, or `None` when none exists.
pub fn conjugating_element(
    chain: &StabilizerChain,
    g: &Perm,
    h: &Perm,
    budget: SearchBudget<'_>,
) -> Result<Option<Perm>, SearchError> {
    conjugating_element_with_hint(chain, g, h, None, budget)
}

/// As [`conjugating_element`]; `centralizer_orders`, when both are known,
/// lets unequal class sizes short-circuit the search.
pub fn conjugating_element_with_hint(
    chain: &StabilizerChain,
    g: &Perm,
    h: &Perm,
    centralizer_orders: Option<(&GroupOrder, &GroupOrder)>,
    budget: SearchBudget<'_>,
) -> Result<Option<Perm>, SearchError> {
    for p in [g, h] {
        if p.degree() != chain.degree() {
            return Err(PermError::DegreeMismatch { left: chain.degree(), right: p.degree() }.into());
        }
    }
    if g.cycle_type() != h.cycle_type() || g.order() != h.order() {
        return Ok(None);
    }
    if let Some((a, b)) = centralizer_orders {
        if a != b {
            return Ok(None);
        }
    }
    let mut search = Search::new(chain, g, h, budget);
    let found = search.dfs(0, &Perm::identity(chain.degree()))?;
    if let Some(x) = &found {
        assert_eq!(&g.conjugate_by(x), h, "conjugator failed verification");
    }
    Ok(found)
}
