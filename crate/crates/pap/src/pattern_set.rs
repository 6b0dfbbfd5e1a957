//! Sets of equal-length patterns, with bitmask encoding for k <= 4 and
//! rank-list storage in general, plus dihedral canonicalization.

use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::perm::{factorial, Perm, PermError, Sym, DIHEDRAL};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternSetError {
    #[error("patterns in a set must share one length")]
    MixedLengths,
    #[error("pattern length {0} unsupported here (need k <= {1})")]
    LengthUnsupported(usize, usize),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A set of length-k patterns, stored as sorted lexicographic ranks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PatternSet {
    k: usize,
    ranks: Vec<u32>,
}

impl PatternSet {
    pub fn empty(k: usize) -> Self {
        assert!(k >= 1 && k <= 8);
        PatternSet { k, ranks: Vec::new() }
    }

    pub fn from_patterns(k: usize, patterns: &[Perm]) -> Result<Self, PatternSetError> {
        let mut set = PatternSet::empty(k);
        for p in patterns {
            if p.len() != k {
                return Err(PatternSetError::MixedLengths);
            }
            set.insert(p);
        }
        Ok(set)
    }

    /// Parses a comma-separated pattern list such as "1234,4321,1324".
    /// An empty string yields the empty set of length-k patterns.
    pub fn parse_list(k: usize, text: &str) -> Result<Self, PatternSetError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(PatternSet::empty(k));
        }
        let patterns: Vec<Perm> = text
            .split(',')
            .map(Perm::from_str)
            .collect::<Result<_, _>>()?;
        PatternSet::from_patterns(k, &patterns)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn insert(&mut self, p: &Perm) {
        debug_assert_eq!(p.len(), self.k);
        self.insert_rank(p.lex_rank() as u32);
    }

    pub fn insert_rank(&mut self, r: u32) {
        if let Err(pos) = self.ranks.binary_search(&r) {
            self.ranks.insert(pos, r);
        }
    }

    pub fn contains_rank(&self, r: u32) -> bool {
        self.ranks.binary_search(&r).is_ok()
    }

    pub fn contains_pattern(&self, p: &Perm) -> bool {
        p.len() == self.k && self.contains_rank(p.lex_rank() as u32)
    }

    pub fn union(&self, other: &PatternSet) -> PatternSet {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for &r in &other.ranks {
            out.insert_rank(r);
        }
        out
    }

    pub fn with_pattern(&self, p: &Perm) -> PatternSet {
        let mut out = self.clone();
        out.insert(p);
        out
    }

    pub fn iter_perms(&self) -> impl Iterator<Item = Perm> + '_ {
        let k = self.k;
        self.ranks.iter().map(move |&r| Perm::from_lex_rank(k, r as u64))
    }

    pub fn is_reverse_closed(&self) -> bool {
        let rev = sym_rank_map(self.k, Sym::REVERSE);
        self.ranks.iter().all(|&r| self.contains_rank(rev[r as usize]))
    }

    pub fn has_monotone(&self) -> bool {
        let (inc, dec) = monotone_ranks(self.k);
        self.contains_rank(inc) || self.contains_rank(dec)
    }

    /// Image under one dihedral symmetry applied to every pattern.
    pub fn apply_sym(&self, sym: Sym) -> PatternSet {
        let map = sym_rank_map(self.k, sym);
        let mut ranks: Vec<u32> = self.ranks.iter().map(|&r| map[r as usize]).collect();
        ranks.sort_unstable();
        PatternSet { k: self.k, ranks }
    }

    /// Lexicographically least image under the 8 dihedral symmetries.
    pub fn canonical(&self) -> PatternSet {
        DIHEDRAL
            .iter()
            .map(|&s| self.apply_sym(s))
            .min()
            .expect("group is nonempty")
    }

    /// Bitmask over lexicographic ranks of S_k; requires k <= 4.
    pub fn mask24(&self) -> Result<u32, PatternSetError> {
        if self.k > 4 {
            return Err(PatternSetError::LengthUnsupported(self.k, 4));
        }
        Ok(self.ranks.iter().fold(0u32, |m, &r| m | (1 << r)))
    }

    pub fn from_mask24(k: usize, mask: u32) -> Result<Self, PatternSetError> {
        if k > 4 {
            return Err(PatternSetError::LengthUnsupported(k, 4));
        }
        let kf = factorial(k) as u32;
        let ranks = (0..kf).filter(|&r| mask & (1 << r) != 0).collect();
        Ok(PatternSet { k, ranks })
    }

    /// Display as a comma-separated list.
    pub fn to_list_string(&self) -> String {
        self.iter_perms()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// (increasing, decreasing) pattern ranks in S_k.
pub fn monotone_ranks(k: usize) -> (u32, u32) {
    (0, factorial(k) as u32 - 1)
}

/// Rank map for one dihedral symmetry on S_k, cached per (k, sym).
pub fn sym_rank_map(k: usize, sym: Sym) -> &'static [u32] {
    assert!(k >= 1 && k <= 8);
    static MAPS: OnceLock<Vec<Vec<Vec<u32>>>> = OnceLock::new();
    let maps = MAPS.get_or_init(|| {
        (0..=8usize)
            .map(|kk| {
                if kk == 0 {
                    return Vec::new();
                }
                DIHEDRAL
                    .iter()
                    .map(|&s| {
                        (0..factorial(kk))
                            .map(|r| Perm::from_lex_rank(kk, r).apply_sym(s).lex_rank() as u32)
                            .collect()
                    })
                    .collect()
            })
            .collect()
    });
    let si = DIHEDRAL
        .iter()
        .position(|&s| s == sym)
        .expect("sym is a dihedral element");
    &maps[k][si]
}

/// Rank of the reverse pattern.
pub fn reverse_rank(k: usize, r: u32) -> u32 {
    sym_rank_map(k, Sym::REVERSE)[r as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_contains() {
        let set = PatternSet::parse_list(4, "1234,4321,1324").unwrap();
        assert_eq!(set.len(), 3);
        assert!(set.contains_pattern(&p("1324")));
        assert!(!set.contains_pattern(&p("2413")));
        assert!(PatternSet::parse_list(4, "123,4321").is_err());
        assert!(PatternSet::parse_list(4, "").unwrap().is_empty());
    }

    #[test]
    fn monotone_and_reverse_closure() {
        assert_eq!(monotone_ranks(4), (0, 23));
        let closed = PatternSet::parse_list(4, "2413,3142").unwrap();
        assert!(closed.is_reverse_closed());
        let open = PatternSet::parse_list(4, "2413").unwrap();
        assert!(!open.is_reverse_closed());
        assert!(PatternSet::parse_list(4, "1234").unwrap().has_monotone());
        assert!(!closed.has_monotone());
    }

    #[test]
    fn mask_roundtrip() {
        let set = PatternSet::parse_list(4, "1234,1324,4321").unwrap();
        let mask = set.mask24().unwrap();
        assert_eq!(PatternSet::from_mask24(4, mask).unwrap(), set);
        assert!(PatternSet::empty(5).mask24().is_err());
    }

    #[test]
    fn canonicalization() {
        let set = PatternSet::parse_list(4, "1243,2134").unwrap();
        let canon = set.canonical();
        assert_eq!(canon.clone().canonical(), canon);
        for &sym in &DIHEDRAL {
            assert_eq!(set.apply_sym(sym).canonical(), canon);
        }
    }

    #[test]
    fn sym_maps_are_bijections() {
        for k in 1..=6 {
            for &sym in &DIHEDRAL {
                let map = sym_rank_map(k, sym);
                let mut seen = vec![false; map.len()];
                for &r in map {
                    assert!(!seen[r as usize]);
                    seen[r as usize] = true;
                }
            }
        }
        assert_eq!(reverse_rank(4, p("2413").lex_rank() as u32),
                   p("3142").lex_rank() as u32);
    }
}
