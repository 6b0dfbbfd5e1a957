//! Shadow-mask tables: for each permutation in S_n, the bitmask (over
//! lexicographic ranks of S_k) of the k-patterns it contains. The PAP game
//! on S_n depends only on the multiset of these masks.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::perm::factorial;

/// Distinct shadow masks over S_n with their multiplicities.
#[derive(Clone, Debug)]
pub struct MaskTable {
    pub n: usize,
    pub k: usize,
    /// Sorted distinct masks.
    pub masks: Vec<u32>,
    /// counts[i] = number of permutations in S_n with mask masks[i].
    pub counts: Vec<u64>,
}

impl MaskTable {
    pub fn build(n: usize, k: usize) -> MaskTable {
        assert!(n >= 1 && n <= 11, "mask tables are built for n <= 11");
        assert!(k >= 1 && k <= 4);
        let combos = combinations(n, k);
        let merge = |mut acc: HashMap<u32, u64>, m: HashMap<u32, u64>| {
            for (mask, c) in m {
                *acc.entry(mask).or_insert(0) += c;
            }
            acc
        };
        let map: HashMap<u32, u64> = if n <= 7 {
            let mut map = HashMap::new();
            let mut vals: Vec<u8> = (0..n as u8).collect();
            scan(&mut vals, 0, &combos, k, &mut map);
            map
        } else {
            // shard by the first entry
            (0..n as u8)
                .into_par_iter()
                .map(|first| {
                    let mut vals = Vec::with_capacity(n);
                    vals.push(first);
                    vals.extend((0..n as u8).filter(|&v| v != first));
                    let mut map = HashMap::new();
                    scan(&mut vals, 1, &combos, k, &mut map);
                    map
                })
                .reduce(HashMap::new, merge)
        };
        let mut entries: Vec<(u32, u64)> = map.into_iter().collect();
        entries.sort_unstable();
        let (masks, counts) = entries.into_iter().unzip();
        MaskTable { n, k, masks, counts }
    }

    /// Sum of multiplicities of masks disjoint from `forbidden`.
    pub fn avoider_count(&self, forbidden: u32) -> u64 {
        self.masks
            .iter()
            .zip(&self.counts)
            .filter(|(&m, _)| m & forbidden == 0)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Indices of masks disjoint from `forbidden`.
    pub fn survivors(&self, forbidden: u32) -> Vec<u32> {
        self.masks
            .iter()
            .copied()
            .filter(|&m| m & forbidden == 0)
            .collect()
    }
}

/// The shadow mask of one permutation: bit r set iff the rank-r pattern of
/// S_k occurs in it.
pub fn shadow_mask(v: &[u8], k: usize, combos: &[Vec<usize>]) -> u32 {
    let mut mask = 0u32;
    let full = (1u32 << factorial(k)) - 1;
    let mut picked = [0u8; 4];
    for combo in combos {
        for (a, &i) in combo.iter().enumerate() {
            picked[a] = v[i];
        }
        mask |= 1 << rank_of(&picked[..k]);
        if mask == full {
            break;
        }
    }
    mask
}

/// Lexicographic rank of the standardization of `vals` (distinct entries).
pub(crate) fn rank_of(vals: &[u8]) -> u32 {
    let k = vals.len();
    let mut rank = 0u32;
    for a in 0..k {
        let smaller_later = vals[a + 1..].iter().filter(|&&x| x < vals[a]).count() as u32;
        rank += smaller_later * factorial(k - 1 - a) as u32;
    }
    rank
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

fn scan(vals: &mut Vec<u8>, fixed: usize, combos: &[Vec<usize>], k: usize, map: &mut HashMap<u32, u64>) {
    rec_perms(vals, fixed, &mut |v| {
        *map.entry(shadow_mask(v, k, combos)).or_insert(0) += 1;
    });
}

fn rec_perms(vals: &mut Vec<u8>, pos: usize, visit: &mut impl FnMut(&[u8])) {
    let n = vals.len();
    if pos == n {
        visit(vals);
        return;
    }
    for i in pos..n {
        vals.swap(pos, i);
        rec_perms(vals, pos + 1, visit);
        vals.swap(pos, i);
    }
}
