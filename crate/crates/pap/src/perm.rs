//! Core permutation arithmetic: representation, containment, shadows,
//! dihedral symmetries, sum operators, and subsequence statistics.
//!
//! Values are stored 0-based in a fixed-width byte vector; all text I/O is
//! 1-based one-line notation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Engine-wide length cap. Everything in scope fits comfortably below this.
pub const MAX_LEN: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation must be nonempty")]
    Empty,
    #[error("length {0} exceeds the engine cap of {MAX_LEN}")]
    TooLong(usize),
    #[error("entries are not pairwise distinct")]
    DuplicateEntry,
    #[error("values are not a bijection onto 1..=n")]
    NotBijection,
    #[error("index out of range")]
    IndexOutOfRange,
    #[error("malformed permutation text: {0}")]
    Parse(String),
}

/// A permutation in one-line notation, stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    vals: Vec<u8>,
}

impl Perm {
    /// Builds from 0-based values, validating the bijection invariant.
    pub fn from_zero_based(vals: Vec<u8>) -> Result<Self, PermError> {
        let n = vals.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        if n > MAX_LEN {
            return Err(PermError::TooLong(n));
        }
        let mut seen = [false; MAX_LEN];
        for &v in &vals {
            if (v as usize) >= n || seen[v as usize] {
                return Err(PermError::NotBijection);
            }
            seen[v as usize] = true;
        }
        Ok(Perm { vals })
    }

    /// Builds from 1-based values as written in one-line notation.
    pub fn from_one_based(vals: &[u64]) -> Result<Self, PermError> {
        if vals.iter().any(|&v| v == 0) {
            return Err(PermError::NotBijection);
        }
        let zero: Vec<u8> = vals
            .iter()
            .map(|&v| u8::try_from(v - 1).map_err(|_| PermError::NotBijection))
            .collect::<Result<_, _>>()?;
        Perm::from_zero_based(zero)
    }

    /// The unique permutation with the same relative order as `seq`.
    pub fn standardize(seq: &[i64]) -> Result<Self, PermError> {
        let n = seq.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        if n > MAX_LEN {
            return Err(PermError::TooLong(n));
        }
        let mut vals = vec![0u8; n];
        for (i, &x) in seq.iter().enumerate() {
            let mut rank = 0u8;
            for (j, &y) in seq.iter().enumerate() {
                if y == x && j != i {
                    return Err(PermError::DuplicateEntry);
                }
                if y < x {
                    rank += 1;
                }
            }
            vals[i] = rank;
        }
        Ok(Perm { vals })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_LEN);
        Perm {
            vals: (0..n as u8).collect(),
        }
    }

    pub fn reverse_identity(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_LEN);
        Perm {
            vals: (0..n as u8).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based values.
    pub fn values(&self) -> &[u8] {
        &self.vals
    }

    pub fn is_increasing(&self) -> bool {
        self.vals.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_decreasing(&self) -> bool {
        self.vals.windows(2).all(|w| w[0] > w[1])
    }

    pub fn is_monotone(&self) -> bool {
        self.is_increasing() || self.is_decreasing()
    }

    pub fn reverse(&self) -> Self {
        Perm {
            vals: self.vals.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let n = self.vals.len() as u8;
        Perm {
            vals: self.vals.iter().map(|&v| n - 1 - v).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut vals = vec![0u8; self.vals.len()];
        for (i, &v) in self.vals.iter().enumerate() {
            vals[v as usize] = i as u8;
        }
        Perm { vals }
    }

    pub fn apply_sym(&self, sym: Sym) -> Self {
        let mut p = self.clone();
        if sym.inverse {
            p = p.inverse();
        }
        if sym.reverse {
            p = p.reverse();
        }
        if sym.complement {
            p = p.complement();
        }
        p
    }

    /// True iff some subsequence of `self` is order-isomorphic to `patt`.
    pub fn contains(&self, patt: &Perm) -> bool {
        let k = patt.len();
        if k > self.len() {
            return false;
        }
        let mut chosen = Vec::with_capacity(k);
        contains_rec(&self.vals, &patt.vals, 0, &mut chosen, None)
    }

    pub fn avoids(&self, patt: &Perm) -> bool {
        !self.contains(patt)
    }

    /// Containment restricted to occurrences that use the entry at `pos`.
    pub fn contains_using(&self, patt: &Perm, pos: usize) -> bool {
        let k = patt.len();
        if k > self.len() || pos >= self.len() {
            return false;
        }
        let mut chosen = Vec::with_capacity(k);
        contains_rec(&self.vals, &patt.vals, 0, &mut chosen, Some(pos))
    }

    /// The set of `l`-patterns contained in `self`, sorted.
    pub fn shadow(&self, l: usize) -> Result<Vec<Perm>, PermError> {
        let n = self.len();
        if l < 1 || l > n {
            return Err(PermError::IndexOutOfRange);
        }
        let mut out = std::collections::BTreeSet::new();
        let mut idx = Vec::with_capacity(l);
        shadow_rec(&self.vals, l, 0, &mut idx, &mut out);
        Ok(out.into_iter().collect())
    }

    /// Longest increasing subsequence length (patience sorting).
    pub fn lis(&self) -> usize {
        let mut tails: Vec<u8> = Vec::new();
        for &v in &self.vals {
            match tails.binary_search(&v) {
                Ok(_) => unreachable!("distinct values"),
                Err(pos) => {
                    if pos == tails.len() {
                        tails.push(v);
                    } else {
                        tails[pos] = v;
                    }
                }
            }
        }
        tails.len()
    }

    /// Longest decreasing subsequence length.
    pub fn lds(&self) -> usize {
        self.reverse().lis()
    }

    /// Direct sum: `other` shifted above `self`.
    pub fn direct_sum(&self, other: &Perm) -> Result<Perm, PermError> {
        let n = self.len() + other.len();
        if n > MAX_LEN {
            return Err(PermError::TooLong(n));
        }
        let shift = self.len() as u8;
        let mut vals = self.vals.clone();
        vals.extend(other.vals.iter().map(|&v| v + shift));
        Ok(Perm { vals })
    }

    /// Skew sum: `self` shifted above `other`.
    pub fn skew_sum(&self, other: &Perm) -> Result<Perm, PermError> {
        let n = self.len() + other.len();
        if n > MAX_LEN {
            return Err(PermError::TooLong(n));
        }
        let shift = other.len() as u8;
        let mut vals: Vec<u8> = self.vals.iter().map(|&v| v + shift).collect();
        vals.extend_from_slice(&other.vals);
        Ok(Perm { vals })
    }

    /// Lexicographic rank within S_n (Lehmer code). Requires n <= 20 so the
    /// rank fits in a u64.
    pub fn lex_rank(&self) -> u64 {
        let n = self.len();
        assert!(n <= 20, "lex_rank only supports n <= 20");
        let mut rank = 0u64;
        for i in 0..n {
            let smaller_later = self.vals[i + 1..]
                .iter()
                .filter(|&&v| v < self.vals[i])
                .count() as u64;
            rank += smaller_later * factorial(n - 1 - i);
        }
        rank
    }

    /// Inverse of `lex_rank`.
    pub fn from_lex_rank(n: usize, mut rank: u64) -> Self {
        assert!(n >= 1 && n <= 20);
        let mut pool: Vec<u8> = (0..n as u8).collect();
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            let f = factorial(n - 1 - i);
            let d = (rank / f) as usize;
            rank %= f;
            vals.push(pool.remove(d));
        }
        Perm { vals }
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Inserts one point into the increasing `r`-pattern so that exactly `i`
/// points lie to its left and `j` below it.
pub fn insert_into_cell(r: usize, i: usize, j: usize) -> Result<Perm, PermError> {
    if i > r || j > r || r + 1 > MAX_LEN || r == 0 {
        return Err(PermError::IndexOutOfRange);
    }
    let mut vals: Vec<u8> = (0..r as u8)
        .map(|v| if (v as usize) < j { v } else { v + 1 })
        .collect();
    vals.insert(i, j as u8);
    Perm::from_zero_based(vals)
}

/// All permutations of S_n in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    assert!(n >= 1 && n <= 12);
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut vals: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(Perm { vals: vals.clone() });
        if !next_lex(&mut vals) {
            break;
        }
    }
    out
}

fn next_lex(vals: &mut [u8]) -> bool {
    let n = vals.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && vals[i - 1] >= vals[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while vals[j] <= vals[i - 1] {
        j -= 1;
    }
    vals.swap(i - 1, j);
    vals[i..].reverse();
    true
}

fn contains_rec(
    v: &[u8],
    p: &[u8],
    j: usize,
    chosen: &mut Vec<u8>,
    forced: Option<usize>,
) -> bool {
    contains_rec_inner(v, p, j, 0, chosen, forced, forced.is_none())
}

fn contains_rec_inner(
    v: &[u8],
    p: &[u8],
    j: usize,
    start: usize,
    chosen: &mut Vec<u8>,
    forced: Option<usize>,
    used: bool,
) -> bool {
    let k = p.len();
    if j == k {
        return used;
    }
    let max_start = v.len() - (k - j);
    for idx in start..=max_start {
        if !used && idx > forced.unwrap_or(usize::MAX) {
            break;
        }
        let x = v[idx];
        let consistent = (0..j).all(|a| (p[a] < p[j]) == (chosen[a] < x));
        if !consistent {
            continue;
        }
        chosen.push(x);
        let now_used = used || forced == Some(idx);
        let hit = contains_rec_inner(v, p, j + 1, idx + 1, chosen, forced, now_used);
        chosen.pop();
        if hit {
            return true;
        }
    }
    false
}

fn shadow_rec(
    v: &[u8],
    l: usize,
    start: usize,
    idx: &mut Vec<usize>,
    out: &mut std::collections::BTreeSet<Perm>,
) {
    if idx.len() == l {
        let seq: Vec<i64> = idx.iter().map(|&i| v[i] as i64).collect();
        out.insert(Perm::standardize(&seq).expect("distinct values"));
        return;
    }
    let need = l - idx.len();
    for i in start..=v.len() - need {
        idx.push(i);
        shadow_rec(v, l, i + 1, idx, out);
        idx.pop();
    }
}

/// One of the eight dihedral symmetries generated by reverse, complement,
/// and inverse. Inverse is applied first, then reverse, then complement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Sym {
    pub inverse: bool,
    pub reverse: bool,
    pub complement: bool,
}

impl Sym {
    pub const IDENTITY: Sym = Sym {
        inverse: false,
        reverse: false,
        complement: false,
    };
    pub const REVERSE: Sym = Sym {
        inverse: false,
        reverse: true,
        complement: false,
    };
    pub const COMPLEMENT: Sym = Sym {
        inverse: false,
        reverse: false,
        complement: true,
    };
}

/// The full dihedral group of order 8.
pub const DIHEDRAL: [Sym; 8] = {
    let mut syms = [Sym::IDENTITY; 8];
    let mut i = 0;
    while i < 8 {
        syms[i] = Sym {
            inverse: i & 1 != 0,
            reverse: i & 2 != 0,
            complement: i & 4 != 0,
        };
        i += 1;
    }
    syms
};

/// The reverse/complement subgroup: the four symmetries that preserve
/// reverse-closedness of a pattern set.
pub const REV_COMP_GROUP: [Sym; 4] = [
    Sym {
        inverse: false,
        reverse: false,
        complement: false,
    },
    Sym {
        inverse: false,
        reverse: true,
        complement: false,
    },
    Sym {
        inverse: false,
        reverse: false,
        complement: true,
    },
    Sym {
        inverse: false,
        reverse: true,
        complement: true,
    },
];

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for &v in &self.vals {
                write!(f, "{}", v + 1)?;
            }
        } else {
            for (i, &v) in self.vals.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", v as u16 + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl FromStr for Perm {
    type Err = PermError;

    /// For n <= 9 a contiguous digit string ("2413"); for n > 9
    /// comma-separated 1-based values.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PermError::Parse("empty string".into()));
        }
        let vals: Vec<u64> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| PermError::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(u64::from)
                        .ok_or_else(|| PermError::Parse(format!("bad digit {c:?}")))
                })
                .collect::<Result<_, _>>()?
        };
        Perm::from_one_based(&vals)
    }
}
