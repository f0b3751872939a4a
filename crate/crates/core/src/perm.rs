//! Permutations on `{0..degree-1}` and disjoint-cycle text I/O.
//!
//! Composition is left to right: `p * q` applies `p` first, then `q`, so
//! `(p * q).image(i) == q.image(p.image(i))`. Points are 0-based in memory and
//! 1-based in cycle notation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;
use core::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

/// Largest supported degree (points are stored as `u16`).
pub const MAX_DEGREE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image table is not a bijection of 0..{degree}")]
    NotABijection { degree: usize },
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("point {point} appears more than once")]
    RepeatedPoint { point: usize },
    #[error("point {point} out of range 1..={degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("malformed cycle notation at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: &'static str },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A bijection of `{0..degree-1}` stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u16>,
}

impl Perm {
    /// The identity of the given degree. Panics if `degree` is 0 or exceeds
    /// [`MAX_DEGREE`].
    pub fn identity(degree: usize) -> Perm {
        assert!(degree > 0 && degree <= MAX_DEGREE, "invalid degree {degree}");
        Perm { images: (0..degree).map(|i| i as u16).collect() }
    }

    pub fn from_images(images: &[usize]) -> Result<Perm, PermError> {
        let degree = images.len();
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::InvalidDegree(degree));
        }
        let mut seen = vec![false; degree];
        for &x in images {
            if x >= degree || seen[x] {
                return Err(PermError::NotABijection { degree });
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.iter().map(|&x| x as u16).collect() })
    }

    /// Builds a permutation from 0-based cycles. Points not listed are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Perm, PermError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::InvalidDegree(degree));
        }
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree || seen[p] {
                    return Err(PermError::NotABijection { degree });
                }
                seen[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Perm::from_images(&images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    fn check_degree(&self, other: &Perm) -> Result<(), PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(())
    }

    /// `self` first, then `other`.
    pub fn compose(&self, other: &Perm) -> Result<Perm, PermError> {
        self.check_degree(other)?;
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    fn compose_unchecked(&self, other: &Perm) -> Perm {
        let q = &other.images;
        Perm { images: self.images.iter().map(|&x| q[x as usize]).collect() }
    }

    /// Writes `self * other` into `out`, reusing its allocation.
    pub fn compose_into(&self, other: &Perm, out: &mut Perm) {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        out.images.clear();
        out.images.extend(self.images.iter().map(|&x| other.images[x as usize]));
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm { images: inv }
    }

    /// `a^-1 b^-1 a b` with `a = self`, `b = other`.
    pub fn commutator(&self, other: &Perm) -> Result<Perm, PermError> {
        self.check_degree(other)?;
        Ok(&(&self.inverse() * &other.inverse()) * &(self * other))
    }

    /// `x^-1 self x`.
    pub fn conjugate_by(&self, x: &Perm) -> Perm {
        assert_eq!(self.degree(), x.degree(), "degree mismatch");
        // (x^-1 s x)(x(i)) = x(s(i))
        let mut images = vec![0u16; self.degree()];
        for i in 0..self.degree() {
            images[x.images[i] as usize] = x.images[self.images[i] as usize];
        }
        Perm { images }
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.degree() == other.degree()
            && (0..self.degree())
                .all(|i| other.images[self.images[i] as usize] == self.images[other.images[i] as usize])
    }

    /// `self` raised to a (possibly negative) exponent.
    pub fn pow(&self, exponent: i128) -> Perm {
        let mut images = vec![0u16; self.degree()];
        let mut done = vec![false; self.degree()];
        let mut cycle = Vec::new();
        for start in 0..self.degree() {
            if done[start] {
                continue;
            }
            cycle.clear();
            let mut p = start;
            while !done[p] {
                done[p] = true;
                cycle.push(p);
                p = self.image(p);
            }
            let len = cycle.len() as i128;
            let shift = exponent.rem_euclid(len) as usize;
            for (k, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(k + shift) % cycle.len()] as u16;
            }
        }
        Perm { images }
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &x)| *i != x as usize).map(|(i, _)| i)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &x)| *i == x as usize).count()
    }

    /// Nontrivial cycles, each starting at its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.image(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p);
                p = self.image(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Length of the cycle through each point.
    pub fn cycle_lengths(&self) -> Vec<u16> {
        let mut lens = vec![0u16; self.degree()];
        for start in 0..self.degree() {
            if lens[start] != 0 {
                continue;
            }
            let mut len = 0u16;
            let mut p = start;
            loop {
                len += 1;
                p = self.image(p);
                if p == start {
                    break;
                }
            }
            let mut p = start;
            loop {
                lens[p] = len;
                p = self.image(p);
                if p == start {
                    break;
                }
            }
        }
        lens
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lengths = Vec::new();
        let mut seen = vec![false; self.degree()];
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                len += 1;
                p = self.image(p);
            }
            lengths.push(len);
        }
        CycleType::from_lengths(lengths)
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u128 {
        self.cycle_type().lcm()
    }

    pub fn is_even(&self) -> bool {
        let ct = self.cycle_type();
        ct.lengths().iter().filter(|&&l| l % 2 == 0).count() % 2 == 0
    }

    /// Parses whitespace-tolerant 1-based disjoint-cycle notation such as
    /// `(1,2)(43,44)`. Empty text and `()` give the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm, ParseError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::InvalidDegree(degree).into());
        }
        let tokens = tokenize(text)?;
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = vec![false; degree];
        if tokens.is_empty() {
            return Ok(Perm::identity(degree));
        }
        if tokens.len() == 2 && tokens[0].1 == Token::Open && tokens[1].1 == Token::Close {
            return Ok(Perm::identity(degree));
        }
        let mut pos = 0;
        while pos < tokens.len() {
            let (offset, ref tok) = tokens[pos];
            if *tok != Token::Open {
                return Err(ParseError::Malformed { offset, reason: "expected '('" });
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                let Some(&(offset, ref tok)) = tokens.get(pos) else {
                    return Err(ParseError::Malformed { offset: text.len(), reason: "unterminated cycle" });
                };
                let Token::Int(n) = *tok else {
                    return Err(ParseError::Malformed { offset, reason: "expected a point" });
                };
                if n == 0 || n > degree {
                    return Err(ParseError::OutOfRange { point: n, degree });
                }
                if seen[n - 1] {
                    return Err(ParseError::RepeatedPoint { point: n });
                }
                seen[n - 1] = true;
                cycle.push(n - 1);
                pos += 1;
                match tokens.get(pos) {
                    Some((_, Token::Comma)) => pos += 1,
                    Some((offset, Token::Close)) => {
                        if cycle.len() < 2 {
                            return Err(ParseError::Malformed {
                                offset: *offset,
                                reason: "a cycle needs at least two points",
                            });
                        }
                        pos += 1;
                        break;
                    }
                    Some((offset, _)) => {
                        return Err(ParseError::Malformed { offset: *offset, reason: "expected ',' or ')'" })
                    }
                    None => return Err(ParseError::Malformed { offset: text.len(), reason: "unterminated cycle" }),
                }
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Perm::from_images(&images)?)
    }

    /// Canonical 1-based cycle notation; `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return String::from("()");
        }
        let mut out = String::new();
        for cycle in cycles {
            out.push('(');
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                push_usize(&mut out, p + 1);
            }
            out.push(')');
        }
        out
    }
}

fn push_usize(out: &mut String, n: usize) {
    use core::fmt::Write;
    let _ = write!(out, "{n}");
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Comma,
    Int(usize),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => out.push((i, Token::Open)),
            b')' => out.push((i, Token::Close)),
            b',' => out.push((i, Token::Comma)),
            b'0'..=b'9' => {
                let start = i;
                let mut n: usize = 0;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add((bytes[i] - b'0') as usize))
                        .ok_or(ParseError::Malformed { offset: start, reason: "number too large" })?;
                    i += 1;
                }
                out.push((start, Token::Int(n)));
                continue;
            }
            c if c.is_ascii_whitespace() => {}
            _ => return Err(ParseError::Malformed { offset: i, reason: "unexpected character" }),
        }
        i += 1;
    }
    Ok(out)
}

impl Mul<&Perm> for &Perm {
    type Output = Perm;

    /// Left-to-right product. Panics on degree mismatch; use
    /// [`Perm::compose`] for a fallible version.
    fn mul(self, rhs: &Perm) -> Perm {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        self.compose_unchecked(rhs)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self.to_cycle_string())
    }
}

/// `a^-1 b^-1 a b`.
pub fn commutator(a: &Perm, b: &Perm) -> Result<Perm, PermError> {
    a.commutator(b)
}

/// Multiset of cycle lengths, fixed points included, sorted in decreasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn from_lengths(mut lengths: Vec<usize>) -> CycleType {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(lengths)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn lcm(&self) -> u128 {
        self.0.iter().fold(1u128, |acc, &l| acc.lcm(&(l as u128)))
    }
}

/// Compact form: `10^2.5^4.1^4`.
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let len = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == len {
                j += 1;
            }
            if !first {
                f.write_str(".")?;
            }
            write!(f, "{}^{}", len, j - i)?;
            first = false;
            i = j;
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lengths = Vec::new();
        for (offset, part) in s.split('.').scan(0usize, |off, p| {
            let here = *off;
            *off += p.len() + 1;
            Some((here, p))
        }) {
            let (len, mult) =
                part.split_once('^').ok_or(ParseError::Malformed { offset, reason: "expected length^multiplicity" })?;
            let len: usize =
                len.trim().parse().map_err(|_| ParseError::Malformed { offset, reason: "bad cycle length" })?;
            let mult: usize =
                mult.trim().parse().map_err(|_| ParseError::Malformed { offset, reason: "bad multiplicity" })?;
            if len == 0 {
                return Err(ParseError::Malformed { offset, reason: "zero cycle length" });
            }
            lengths.extend(core::iter::repeat_n(len, mult));
        }
        Ok(CycleType::from_lengths(lengths))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(text: &str, degree: usize) -> Perm {
        Perm::parse_cycles(text, degree).unwrap()
    }

    #[test]
    fn compose_left_to_right() {
        // (1 2) then (1 3): 1->2->2, 2->1->3, 3->3->1
        assert_eq!(&p("(1,2)", 3) * &p("(1,3)", 3), p("(1,2,3)", 3));
        let q = p("(1,4,2)(3,5)", 5);
        assert_eq!(&q * &Perm::identity(5), q);
        assert!((&q * &q.inverse()).is_identity());
    }

    #[test]
    fn compose_degree_mismatch() {
        let err = p("(1,2)", 3).compose(&p("(1,2)", 4)).unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch { left: 3, right: 4 });
        assert!(p("(1,2)", 3).commutator(&p("(1,2)", 4)).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!(Perm::identity(4).inverse().is_identity());
        assert_eq!(p("(1,2,3)", 3).inverse(), p("(1,3,2)", 3));
        let q = p("(1,5,2)(3,4)", 6);
        assert_eq!(q.inverse().inverse(), q);
    }

    #[test]
    fn commutator_examples() {
        let b = p("(1,2,3)", 3);
        assert!(commutator(&Perm::identity(3), &b).unwrap().is_identity());
        assert_eq!(commutator(&p("(1,2)", 3), &p("(1,3)", 3)).unwrap(), p("(1,3,2)", 3));
        assert!(commutator(&b, &b).unwrap().is_identity());
    }

    #[test]
    fn parse_examples() {
        let g = p("(1,2)(43,44)", 44);
        assert_eq!(g.image(0), 1);
        assert_eq!(g.image(1), 0);
        assert_eq!(g.image(42), 43);
        assert_eq!(g.image(43), 42);
        assert_eq!(g.fixed_point_count(), 40);
        assert!(p("()", 5).is_identity());
        assert!(p("", 5).is_identity());
        assert!(p("  ( 1 , 2 )\n( 3,4 ) ", 4) == p("(1,2)(3,4)", 4));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Perm::parse_cycles("(1,2)(2,3)", 3), Err(ParseError::RepeatedPoint { point: 2 }));
        assert_eq!(Perm::parse_cycles("(1,5)", 4), Err(ParseError::OutOfRange { point: 5, degree: 4 }));
        assert_eq!(Perm::parse_cycles("(0,1)", 4), Err(ParseError::OutOfRange { point: 0, degree: 4 }));
        for bad in ["(1,2", "1,2)", "(1,,2)", "(1)", "(1,2)x", "((1,2))", "(1 2)", "()()"] {
            assert!(
                matches!(Perm::parse_cycles(bad, 4), Err(ParseError::Malformed { .. })),
                "{bad} should be malformed"
            );
        }
    }

    #[test]
    fn print_examples() {
        assert_eq!(Perm::identity(3).to_cycle_string(), "()");
        assert_eq!(Perm::from_images(&[1, 0, 2]).unwrap().to_cycle_string(), "(1,2)");
        assert_eq!(p("(5,3,4)(2,1)", 6).to_string(), "(1,2)(3,4,5)");
    }

    #[test]
    fn cycle_type_and_order() {
        let id = Perm::identity(4);
        assert_eq!(id.cycle_type().lengths(), &[1, 1, 1, 1]);
        assert_eq!(id.order(), 1);
        let q = p("(1,2,3)(4,5)", 5);
        assert_eq!(q.cycle_type().lengths(), &[3, 2]);
        assert_eq!(q.order(), 6);
        let mut acc = q.clone();
        for k in 1..6 {
            assert!(!acc.is_identity(), "power {k}");
            acc = &acc * &q;
        }
        assert!(acc.is_identity());
    }

    #[test]
    fn cycle_type_text_round_trip() {
        let ct = p("(1,2,3,4,5,6,7,8,9,10)(11,12,13,14,15)", 18).cycle_type();
        assert_eq!(ct.to_string(), "10^1.5^1.1^3");
        assert_eq!(ct.to_string().parse::<CycleType>().unwrap(), ct);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let q = p("(1,2,3,4)(5,6,7)", 8);
        assert_eq!(q.pow(2), &q * &q);
        assert_eq!(q.pow(-1), q.inverse());
        assert!(q.pow(12).is_identity());
        assert_eq!(q.pow(13), q);
    }

    #[test]
    fn conjugate_by_definition() {
        let g = p("(1,2,3)(4,6)", 6);
        let x = p("(1,4,5)(2,6)", 6);
        assert_eq!(g.conjugate_by(&x), &(&x.inverse() * &g) * &x);
    }
}
