//! Occupation-number states and particle-number sectors.
//!
//! Sites are 1-based on the outside. Internally site `i` of an `L`-site chain
//! lives at bit `L - i`, so site 1 is the most significant bit and ordering
//! states by their integer value in descending order puts the domain wall
//! `1..10..0` first. That order is the canonical ordinal used everywhere.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest chain a [`FockState`] can hold.
pub const MAX_SITES: usize = 64;

/// Default cap on the number of states a sector may hold.
pub const DEFAULT_BASIS_LIMIT: usize = 1 << 27;

/// Occupation configuration of an `L`-site chain of hard-core particles.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockState {
    bits: u64,
    len: u8,
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl FockState {
    /// All-empty chain.
    pub fn empty(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Self { bits: 0, len: len as u8 })
    }

    /// Builds a state from its canonical integer value.
    pub fn from_bits(bits: u64, len: usize) -> Result<Self> {
        check_len(len)?;
        if bits & !low_mask(len) != 0 {
            return Err(Error::Domain(format!("bit pattern {bits:#x} does not fit {len} sites")));
        }
        Ok(Self { bits, len: len as u8 })
    }

    pub(crate) fn from_bits_unchecked(bits: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_SITES && bits & !low_mask(len) == 0);
        Self { bits, len: len as u8 }
    }

    /// State with the listed (1-based) sites occupied.
    pub fn from_sites(len: usize, occupied: &[usize]) -> Result<Self> {
        let mut s = Self::empty(len)?;
        for &i in occupied {
            s.check_site(i)?;
            s.bits |= 1u64 << (len - i);
        }
        Ok(s)
    }

    /// `1^particles 0^(len - particles)`.
    pub fn domain_wall(len: usize, particles: usize) -> Result<Self> {
        check_len(len)?;
        if particles > len {
            return Err(Error::Domain(format!("{particles} particles do not fit {len} sites")));
        }
        let bits = low_mask(particles) << (len - particles);
        Ok(Self { bits, len: len as u8 })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Canonical integer value.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.len() {
            return Err(Error::SiteOutOfRange { site, sites: self.len() });
        }
        Ok(())
    }

    /// Occupation of a 1-based site. Sites outside the chain read as empty.
    #[inline]
    pub fn occupied(&self, site: usize) -> bool {
        site >= 1 && site <= self.len() && (self.bits >> (self.len() - site)) & 1 == 1
    }

    /// Occupation as 0/1, with range checking.
    pub fn occupation(&self, site: usize) -> Result<u8> {
        self.check_site(site)?;
        Ok(u8::from(self.occupied(site)))
    }

    pub fn particle_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Position of the rightmost particle.
    pub fn rightmost(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.len() - self.bits.trailing_zeros() as usize)
    }

    /// Position of the leftmost particle.
    pub fn leftmost(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.len() - (63 - self.bits.leading_zeros() as usize))
    }

    /// Exchanges the occupations of sites `site` and `site + 1`.
    pub fn hopped(&self, site: usize) -> Result<Self> {
        self.check_site(site)?;
        self.check_site(site + 1)?;
        let m = 0b11u64 << (self.len() - site - 1);
        let pair = self.bits & m;
        let bits = if pair == 0 || pair == m { self.bits } else { self.bits ^ m };
        Ok(Self { bits, len: self.len })
    }

    /// Sites `1..=cut` as a state of their own.
    pub fn prefix(&self, cut: usize) -> Result<Self> {
        if cut > self.len() {
            return Err(Error::SiteOutOfRange { site: cut, sites: self.len() });
        }
        Ok(Self { bits: self.bits >> (self.len() - cut), len: cut as u8 })
    }

    /// Sites `cut+1..=L` as a state of their own.
    pub fn suffix(&self, cut: usize) -> Result<Self> {
        if cut > self.len() {
            return Err(Error::SiteOutOfRange { site: cut, sites: self.len() });
        }
        let n = self.len() - cut;
        Ok(Self { bits: self.bits & low_mask(n), len: n as u8 })
    }

    /// Concatenation, `self` on the left.
    pub fn concat(&self, right: &FockState) -> Result<Self> {
        let len = self.len() + right.len();
        check_len(len)?;
        Ok(Self { bits: (self.bits << right.len()) | right.bits, len: len as u8 })
    }

    /// Occupations as a 0/1 vector, site 1 first.
    pub fn occupations(&self) -> Vec<u8> {
        (1..=self.len()).map(|i| u8::from(self.occupied(i))).collect()
    }
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_SITES {
        return Err(Error::Domain(format!("{len} sites exceed the maximum of {MAX_SITES}")));
    }
    Ok(())
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            f.write_str(if self.occupied(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}>")
    }
}

impl FromStr for FockState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('|').trim_end_matches('>');
        check_len(s.len())?;
        let mut bits = 0u64;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '1' => bits |= 1,
                '0' => {}
                other => return Err(Error::Domain(format!("unexpected character {other:?} in state"))),
            }
        }
        Ok(Self { bits, len: s.len() as u8 })
    }
}

/// States sort by canonical ordinal: larger integer value first.
impl Ord for FockState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.cmp(&other.len).then(other.bits.cmp(&self.bits))
    }
}

impl PartialOrd for FockState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Binomial coefficient, exact in `u128` for every chain that fits a word.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// Smallest chain length on which `particles` particles can reach the
/// largest extent allowed by a range-`range` East constraint from the
/// domain wall: `(range + 1) * particles - range`.
pub fn max_extent(range: usize, particles: usize) -> Result<usize> {
    if range == 0 {
        return Err(Error::Domain("constraint range must be at least 1".into()));
    }
    if particles == 0 {
        return Err(Error::Domain("need at least one particle".into()));
    }
    Ok((range + 1) * particles - range)
}

/// An ordered set of states with fixed length and particle number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    particles: usize,
    range: Option<usize>,
    states: Vec<u64>,
}

impl SectorBasis {
    /// Every state with `particles` particles on `sites` sites, optionally
    /// only those with site 1 occupied.
    pub fn enumerate(sites: usize, particles: usize, first_site_occupied: bool) -> Result<Self> {
        Self::enumerate_with_limit(sites, particles, first_site_occupied, DEFAULT_BASIS_LIMIT)
    }

    pub fn enumerate_with_limit(
        sites: usize,
        particles: usize,
        first_site_occupied: bool,
        limit: usize,
    ) -> Result<Self> {
        check_len(sites)?;
        if sites == 0 || particles > sites {
            return Err(Error::Domain(format!("{particles} particles on {sites} sites")));
        }
        if first_site_occupied && particles == 0 {
            return Err(Error::Domain("site 1 cannot be occupied with zero particles".into()));
        }
        let (free, k, top) = if first_site_occupied {
            (sites - 1, particles - 1, 1u64 << (sites - 1))
        } else {
            (sites, particles, 0)
        };
        let count = binomial(free, k);
        if count > limit as u128 {
            return Err(Error::BasisOverflow { requested: count, limit });
        }
        let mut states = Vec::with_capacity(count as usize);
        if k == 0 {
            states.push(top);
        } else {
            // Gosper's hack walks k-subsets of `free` bits in increasing order.
            let end = 1u128 << free;
            let mut x: u64 = low_mask(k);
            loop {
                states.push(top | x);
                let c = x & x.wrapping_neg();
                let r = x as u128 + c as u128;
                if r >= end {
                    break;
                }
                let r = r as u64;
                x = (((r ^ x) >> 2) / c) | r;
            }
        }
        states.reverse();
        Ok(Self { sites, particles, range: None, states })
    }

    /// Builds a basis from arbitrary states; they are sorted canonically and
    /// deduplicated. All states must have `sites` sites and `particles`
    /// particles.
    pub fn from_states<I>(sites: usize, particles: usize, range: Option<usize>, states: I) -> Result<Self>
    where
        I: IntoIterator<Item = FockState>,
    {
        check_len(sites)?;
        let mut out = Vec::new();
        for s in states {
            if s.len() != sites {
                return Err(Error::LengthMismatch { expected: sites, found: s.len() });
            }
            if s.particle_count() != particles {
                return Err(Error::Domain(format!("{s} has {} particles, expected {particles}", s.particle_count())));
            }
            out.push(s.bits);
        }
        Ok(Self::from_sorted_bits(sites, particles, range, out))
    }

    pub(crate) fn from_sorted_bits(sites: usize, particles: usize, range: Option<usize>, mut states: Vec<u64>) -> Self {
        states.sort_unstable_by(|a, b| b.cmp(a));
        states.dedup();
        Self { sites, particles, range, states }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Constraint range of the model that generated this basis, if any.
    pub fn range(&self) -> Option<usize> {
        self.range
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at a canonical ordinal.
    pub fn state(&self, ordinal: usize) -> FockState {
        FockState::from_bits_unchecked(self.states[ordinal], self.sites)
    }

    /// Raw canonical values in ordinal order.
    pub fn bits(&self) -> &[u64] {
        &self.states
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = FockState> + '_ {
        self.states.iter().map(|&b| FockState::from_bits_unchecked(b, self.sites))
    }

    /// Ordinal of a state, `None` if it is not in the basis.
    pub fn index_of(&self, s: &FockState) -> Result<Option<usize>> {
        if s.len() != self.sites {
            return Err(Error::LengthMismatch { expected: self.sites, found: s.len() });
        }
        Ok(self.index_of_bits(s.bits))
    }

    #[inline]
    pub fn index_of_bits(&self, bits: u64) -> Option<usize> {
        self.states.binary_search_by(|p| bits.cmp(p)).ok()
    }

    pub fn contains(&self, s: &FockState) -> bool {
        s.len() == self.sites && self.index_of_bits(s.bits).is_some()
    }

    /// Ordinal of the domain-wall state, when it belongs to the basis.
    pub fn domain_wall_index(&self) -> Option<usize> {
        let dw = FockState::domain_wall(self.sites, self.particles).ok()?;
        self.index_of_bits(dw.bits)
    }

    /// Tab-separated `ordinal<TAB>bitstring` lines, site 1 leftmost.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, s) in self.iter().enumerate() {
            writeln!(w, "{k}\t{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let s: FockState = "1100100".parse().unwrap();
        assert_eq!(s.to_string(), "1100100");
        assert_eq!(s.len(), 7);
        assert!(s.occupied(1) && s.occupied(2) && s.occupied(5));
        assert!(!s.occupied(0) && !s.occupied(8));
        assert_eq!(s.particle_count(), 3);
        assert_eq!(s.rightmost(), Some(5));
        assert_eq!(s.leftmost(), Some(1));
        assert!("10a".parse::<FockState>().is_err());
    }

    #[test]
    fn hop_swaps_neighbours() {
        let s: FockState = "1100".parse().unwrap();
        assert_eq!(s.hopped(2).unwrap().to_string(), "1010");
        assert_eq!(s.hopped(1).unwrap(), s);
        assert!(s.hopped(4).is_err());
    }

    #[test]
    fn prefix_suffix_concat() {
        let s: FockState = "1011001".parse().unwrap();
        let l = s.prefix(3).unwrap();
        let r = s.suffix(3).unwrap();
        assert_eq!(l.to_string(), "101");
        assert_eq!(r.to_string(), "1001");
        assert_eq!(l.concat(&r).unwrap(), s);
    }

    #[test]
    fn enumeration_is_canonical() {
        let b = SectorBasis::enumerate(5, 2, false).unwrap();
        assert_eq!(b.len(), 10);
        assert_eq!(b.state(0).to_string(), "11000");
        assert_eq!(b.state(9).to_string(), "00011");
        assert!(b.bits().windows(2).all(|w| w[0] > w[1]));
        let f = SectorBasis::enumerate(5, 2, true).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|s| s.occupied(1)));
        assert_eq!(f.domain_wall_index(), Some(0));
        for (k, s) in b.iter().enumerate() {
            assert_eq!(b.index_of(&s).unwrap(), Some(k));
        }
    }

    #[test]
    fn limit_is_enforced() {
        let e = SectorBasis::enumerate_with_limit(40, 20, false, 1000).unwrap_err();
        assert!(matches!(e, Error::BasisOverflow { .. }));
    }

    #[test]
    fn extent_values() {
        assert_eq!(max_extent(2, 8).unwrap(), 22);
        assert_eq!(max_extent(3, 10).unwrap(), 37);
        assert_eq!(max_extent(1, 1).unwrap(), 1);
        assert!(max_extent(0, 3).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(5, 7), 0);
    }

    #[test]
    fn dump_format() {
        let b = SectorBasis::enumerate(3, 1, false).unwrap();
        let mut out = Vec::new();
        b.write_dump(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0\t100\n1\t010\n2\t001\n");
    }
}
