//! One-entry inflation families I_t(beta, i, eps) and their stable
//! non-monotone shadows.

use thiserror::Error;

use crate::pattern_set::{PatternSet, reverse_rank};
use crate::perm::{Perm, MAX_LEN};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InflationError {
    #[error("entry index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("inflated length {0} exceeds the engine cap of {MAX_LEN}")]
    TooLong(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// (beta, i, eps): the i-th entry of beta (1-based) inflated into a
/// monotone block with direction eps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InflationTriple {
    pub base: Perm,
    /// 1-based entry index.
    pub index: usize,
    pub sign: Sign,
}

impl InflationTriple {
    pub fn new(base: Perm, index: usize, sign: Sign) -> Result<Self, InflationError> {
        if index < 1 || index > base.len() {
            return Err(InflationError::IndexOutOfRange(index, base.len()));
        }
        Ok(InflationTriple { base, index, sign })
    }

    /// I_t(beta, i, eps): the inflated permutation of length |beta| + t - 1.
    pub fn inflate(&self, t: usize) -> Result<Perm, InflationError> {
        assert!(t >= 1);
        let m = self.base.len();
        let out_len = m + t - 1;
        if out_len > MAX_LEN {
            return Err(InflationError::TooLong(out_len));
        }
        let pivot = self.base.values()[self.index - 1];
        let mut vals = Vec::with_capacity(out_len);
        for (pos, &v) in self.base.values().iter().enumerate() {
            if pos == self.index - 1 {
                match self.sign {
                    Sign::Plus => vals.extend(pivot..pivot + t as u8),
                    Sign::Minus => vals.extend((pivot..pivot + t as u8).rev()),
                }
            } else if v < pivot {
                vals.push(v);
            } else {
                vals.push(v + t as u8 - 1);
            }
        }
        Ok(Perm::from_zero_based(vals).expect("valid inflation"))
    }

    /// The triple whose inflations are the reverses of this one's, for
    /// every block size t.
    pub fn reverse_triple(&self) -> InflationTriple {
        InflationTriple {
            base: self.base.reverse(),
            index: self.base.len() + 1 - self.index,
            sign: self.sign.flip(),
        }
    }

    /// The stable non-monotone k-shadow: the union over t = 1..=k of
    /// Sh_k(I_t) minus the two monotone patterns. For block sizes t >= k
    /// the non-monotone shadow no longer changes.
    pub fn stable_shadow(&self, k: usize) -> Result<StableShadow, InflationError> {
        assert!(k >= 3);
        let mut patterns = PatternSet::empty(k);
        for t in 1..=k {
            let inflated = self.inflate(t)?;
            if inflated.len() < k {
                continue;
            }
            for p in inflated.shadow(k).expect("k within range") {
                if !p.is_monotone() {
                    patterns.insert(&p);
                }
            }
        }
        Ok(StableShadow::from_patterns(patterns))
    }
}

/// The set Sigma(beta, i, eps) of non-monotone k-patterns, recorded both as
/// a pattern set and as its quotient by the reverse map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StableShadow {
    pub k: usize,
    pub patterns: PatternSet,
    /// Unordered reverse pairs {r, r^r} as (min rank, max rank), sorted.
    pub pairs: Vec<(u32, u32)>,
}

impl StableShadow {
    pub fn from_patterns(patterns: PatternSet) -> Self {
        let k = patterns.k();
        let mut pairs: Vec<(u32, u32)> = patterns
            .ranks()
            .iter()
            .map(|&r| {
                let rr = reverse_rank(k, r);
                (r.min(rr), r.max(rr))
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        StableShadow { k, patterns, pairs }
    }
}
