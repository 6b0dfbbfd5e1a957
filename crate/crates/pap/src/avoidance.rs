//! Enumeration of Av_n(F) by incremental generation, move legality, and the
//! monotone-forcing threshold N_k.
//!
//! Avoiders of length m are produced by inserting the new maximum value into
//! each slot of every avoider of length m-1, testing only pattern occurrences
//! that use the new point. This is sound because pattern classes are closed
//! under deleting an entry.

use rayon::prelude::*;
use thiserror::Error;

use crate::bk::build_bk;
use crate::pattern_set::{PatternSet, PatternSetError};
use crate::perm::Perm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AvoidanceError {
    #[error("pattern length {0} does not match the forbidden set length {1}")]
    LengthMismatch(usize, usize),
    #[error("threshold requires k >= 3, got {0}")]
    BadThresholdK(usize),
    #[error(transparent)]
    PatternSet(#[from] PatternSetError),
}

/// The set Av_n(F) with a stable fingerprint of its sorted members.
#[derive(Clone, Debug)]
pub struct AvoiderSet {
    pub n: usize,
    pub forbidden: PatternSet,
    /// Sorted lexicographically (equivalently, by lexicographic rank).
    pub members: Vec<Perm>,
    pub count: u64,
    pub fingerprint: u64,
}

const PAR_THRESHOLD: usize = 512;

fn extend_frontier(frontier: &[Perm], patterns: &[Perm]) -> Vec<Perm> {
    let expand = |parent: &Perm| -> Vec<Perm> {
        let m = parent.len() + 1;
        let mut out = Vec::new();
        for slot in 0..m {
            let mut vals = parent.values().to_vec();
            vals.insert(slot, (m - 1) as u8);
            let child = Perm::from_zero_based(vals).expect("valid child");
            let ok = patterns
                .iter()
                .all(|p| p.len() > m || !child.contains_using(p, slot));
            if ok {
                out.push(child);
            }
        }
        out
    };
    if frontier.len() >= PAR_THRESHOLD {
        frontier.par_iter().flat_map_iter(expand).collect()
    } else {
        frontier.iter().flat_map(expand).collect()
    }
}

/// Runs `visit` on the frontier at each length 1..=n; `visit` returns false
/// to stop early. Returns the final frontier if the walk completed.
fn walk_levels(
    n: usize,
    forbidden: &PatternSet,
    mut visit: impl FnMut(usize, &[Perm]) -> bool,
) -> Option<Vec<Perm>> {
    let patterns: Vec<Perm> = forbidden.iter_perms().collect();
    let mut frontier = vec![Perm::identity(1)];
    if forbidden.k() == 1 && !forbidden.is_empty() {
        frontier.clear();
    }
    if !visit(1, &frontier) {
        return None;
    }
    for m in 2..=n {
        frontier = extend_frontier(&frontier, &patterns);
        if !visit(m, &frontier) {
            return None;
        }
    }
    Some(frontier)
}

pub fn enumerate_avoiders(n: usize, forbidden: &PatternSet) -> AvoiderSet {
    assert!(n >= 1);
    let mut members = walk_levels(n, forbidden, |_, _| true).expect("walk completed");
    members.sort_unstable();
    let fingerprint = fingerprint_members(n, forbidden, &members);
    AvoiderSet {
        n,
        forbidden: forbidden.clone(),
        count: members.len() as u64,
        members,
        fingerprint,
    }
}

/// |Av_n(F)| without retaining members; only one frontier level is held.
pub fn count_avoiders(n: usize, forbidden: &PatternSet) -> u64 {
    let mut count = 0u64;
    walk_levels(n, forbidden, |m, frontier| {
        if m == n {
            count = frontier.len() as u64;
        }
        true
    });
    count
}

/// True iff some permutation in Av_n(F) contains p.
pub fn is_legal(n: usize, forbidden: &PatternSet, p: &Perm) -> Result<bool, AvoidanceError> {
    if !forbidden.is_empty() && p.len() != forbidden.k() {
        return Err(AvoidanceError::LengthMismatch(p.len(), forbidden.k()));
    }
    if p.len() > n {
        return Ok(false);
    }
    if forbidden.is_empty() {
        // every pattern of length <= n occurs in some permutation of S_n
        return Ok(true);
    }
    if forbidden.contains_pattern(p) {
        return Ok(false);
    }
    let mut found = false;
    walk_levels(n, forbidden, |m, frontier| {
        if m == n {
            let hit = if frontier.len() >= PAR_THRESHOLD {
                frontier.par_iter().any(|q| q.contains(p))
            } else {
                frontier.iter().any(|q| q.contains(p))
            };
            found = hit;
        }
        true
    });
    Ok(found)
}

/// The least N <= n_max such that Av_n(B_k) = {id_n, id_n^r} for all
/// n in [N, n_max]. Uses persistence: once the condition holds at some
/// length m >= k it holds for every larger length.
pub fn threshold(k: usize, n_max: usize) -> Result<Option<usize>, AvoidanceError> {
    if k < 3 {
        return Err(AvoidanceError::BadThresholdK(k));
    }
    let bk = build_bk(k).expect("k >= 3");
    let counts = threshold_scan(k, n_max, &bk.members);
    Ok(counts.threshold)
}

/// Per-length avoider counts together with the detected threshold.
pub struct ThresholdScan {
    /// counts[i] = |Av_{i+1}(F)| for each scanned length.
    pub counts: Vec<u64>,
    pub threshold: Option<usize>,
}

pub fn threshold_scan(k: usize, n_max: usize, forbidden: &PatternSet) -> ThresholdScan {
    let mut condition = Vec::new();
    let mut counts = Vec::new();
    let mut stop_at = None;
    walk_levels(n_max, forbidden, |m, frontier| {
        counts.push(frontier.len() as u64);
        let expected = if m == 1 { 1 } else { 2 };
        let ok = frontier.len() == expected && frontier.iter().all(|p| p.is_monotone());
        condition.push(ok);
        if ok && m >= k {
            stop_at = Some(m);
            return false;
        }
        // an empty class can never become {id, id^r}
        !frontier.is_empty()
    });
    let threshold = stop_at.map(|m| {
        let mut n = m;
        while n > 1 && condition[n - 2] {
            n -= 1;
        }
        n
    });
    ThresholdScan { counts, threshold }
}

fn fingerprint_members(n: usize, forbidden: &PatternSet, members: &[Perm]) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(n as u64);
    h.write_u64(forbidden.k() as u64);
    for &r in forbidden.ranks() {
        h.write_u64(r as u64);
    }
    for m in members {
        h.write_u8(0xff);
        for &v in m.values() {
            h.write_u8(v);
        }
    }
    h.finish()
}

/// FNV-1a, 64-bit.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub fn write_u8(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    pub fn write_u64(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.write_u8(b);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_perms;
    use proptest::prelude::*;

    fn set(k: usize, s: &str) -> PatternSet {
        PatternSet::parse_list(k, s).unwrap()
    }

    #[test]
    fn classic_counts() {
        assert_eq!(count_avoiders(5, &set(3, "123")), 42);
        assert_eq!(count_avoiders(6, &set(3, "132")), 132);
        assert_eq!(count_avoiders(4, &set(3, "123,321")), 4);
        assert_eq!(count_avoiders(5, &set(3, "123,321")), 0);
        assert_eq!(count_avoiders(5, &set(4, "2413,3142")), 90);
        assert_eq!(count_avoiders(6, &set(4, "1234,4321,1324")), 215);
        assert_eq!(count_avoiders(6, &set(6, "")), 720);
        assert_eq!(count_avoiders(3, &set(1, "1")), 0);
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        let forbidden = set(3, "132,213");
        let got = enumerate_avoiders(5, &forbidden);
        let pats: Vec<Perm> = forbidden.iter_perms().collect();
        let want: Vec<Perm> = all_perms(5)
            .into_iter()
            .filter(|w| pats.iter().all(|p| w.avoids(p)))
            .collect();
        assert_eq!(got.members, want);
        assert_eq!(got.count, want.len() as u64);
    }

    #[test]
    fn fingerprints_separate_positions() {
        let a = enumerate_avoiders(5, &set(3, "123"));
        let b = enumerate_avoiders(5, &set(3, "321"));
        let c = enumerate_avoiders(5, &set(3, "123"));
        assert_ne!(a.fingerprint, b.fingerprint);
        assert_eq!(a.fingerprint, c.fingerprint);
    }

    #[test]
    fn legality() {
        let f = set(4, "1234,4321");
        assert!(is_legal(9, &f, &"1324".parse().unwrap()).unwrap());
        assert!(!is_legal(9, &f, &"1234".parse().unwrap()).unwrap());
        assert!(is_legal(4, &set(4, ""), &"2413".parse().unwrap()).unwrap());
        assert!(!is_legal(3, &set(4, ""), &"2413".parse().unwrap()).unwrap());
        assert!(is_legal(4, &f, &"123".parse().unwrap()).is_err());
        // Av_n(132,231,213,312) = {id, id^r}: only monotone patterns survive
        let g = set(3, "132,231,213,312");
        assert!(is_legal(6, &g, &"123".parse().unwrap()).unwrap());
        assert!(!is_legal(6, &g, &"132".parse().unwrap()).unwrap());
    }

    #[test]
    fn thresholds_small_k() {
        assert_eq!(threshold(3, 6).unwrap(), Some(1));
        assert_eq!(threshold(4, 10).unwrap(), Some(7));
        assert!(threshold(2, 5).is_err());
        // not reached within a short horizon
        assert_eq!(threshold(5, 8).unwrap(), None);
    }

    #[test]
    fn threshold_scan_counts_b4() {
        let bk = build_bk(4).unwrap();
        let scan = threshold_scan(4, 10, &bk.members);
        assert_eq!(scan.counts, vec![1, 2, 6, 16, 16, 4, 2]);
        assert_eq!(scan.threshold, Some(7));
    }

    proptest! {
        #[test]
        fn deletion_closure(mask in 0u32..64, n in 2usize..6) {
            // Av_n(F) restricted by deleting any one entry lands in Av_{n-1}(F)
            let mut forbidden = PatternSet::empty(3);
            for r in 0..6 {
                if mask & (1 << r) != 0 {
                    forbidden.insert_rank(r);
                }
            }
            let big = enumerate_avoiders(n, &forbidden);
            let small = enumerate_avoiders(n - 1, &forbidden);
            for w in &big.members {
                for skip in 0..w.len() {
                    let seq: Vec<i64> = w
                        .values()
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v as i64)
                        .collect();
                    let child = Perm::standardize(&seq).unwrap();
                    prop_assert!(small.members.binary_search(&child).is_ok());
                }
            }
        }
    }
}
