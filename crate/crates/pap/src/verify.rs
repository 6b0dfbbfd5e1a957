//! The finite exhaustive verifications behind the k = 3 and k = 4 reverse
//! strategy proofs and the k = 5 full-space survey. Each report renders the
//! published summary line for diffing.

use std::collections::HashSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::avoidance::enumerate_avoiders;
use crate::bk::{build_bk, extended_pairs};
use crate::game::masks::{combinations, rank_of, MaskTable};
use crate::game::Solver;
use crate::inflation::{InflationTriple, Sign};
use crate::pattern_set::{monotone_ranks, sym_rank_map, PatternSet};
use crate::perm::{all_perms, factorial, Perm, Sym, DIHEDRAL};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("forbidden set is not reverse-closed")]
    NotReverseClosed,
    #[error("forbidden set contains a monotone pattern")]
    ContainsMonotone,
    #[error("{0} is not in the hard pair")]
    NotHardPattern(Perm),
    #[error("endgame witness requires n >= 10, got {0}")]
    NTooSmall(usize),
    #[error("{0} is not legal from this state")]
    NotLegal(Perm),
    #[error("no support disjoint from the state (contradicts the hard-pair classification)")]
    NoSupport,
}

/// A reverse-closed monotone-free forbidden set, viewed as a set of
/// unordered non-monotone reverse pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ReversePairState {
    patterns: PatternSet,
}

impl ReversePairState {
    pub fn new(patterns: PatternSet) -> Result<Self, VerifyError> {
        if !patterns.is_reverse_closed() {
            return Err(VerifyError::NotReverseClosed);
        }
        if patterns.has_monotone() {
            return Err(VerifyError::ContainsMonotone);
        }
        Ok(ReversePairState { patterns })
    }

    pub fn from_pairs(k: usize, pairs: &[(u32, u32)]) -> Self {
        let mut patterns = PatternSet::empty(k);
        for &(a, b) in pairs {
            patterns.insert_rank(a);
            patterns.insert_rank(b);
        }
        ReversePairState { patterns }
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    /// The unordered reverse pairs as (min rank, max rank), sorted.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let k = self.patterns.k();
        let mut out: Vec<(u32, u32)> = self
            .patterns
            .ranks()
            .iter()
            .map(|&r| {
                let rr = crate::pattern_set::reverse_rank(k, r);
                (r.min(rr), r.max(rr))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Least dihedral image of the state, pattern-wise.
pub fn canonical_state(state: &ReversePairState) -> ReversePairState {
    ReversePairState {
        patterns: state.patterns.canonical(),
    }
}

/// Sets of reverse-pair supports for one hard pattern, plus the witnessing
/// triple per support.
#[derive(Clone, Debug)]
pub struct SupportCollection {
    pub target: Perm,
    /// Each support is a bitmask over the 10 non-hard pair indices.
    pub supports: Vec<u16>,
}

// ---------------------------------------------------------------------------
// shared k = 4 machinery

const HARD_A: &str = "2413";
const HARD_B: &str = "3142";

fn rank4(s: &str) -> u32 {
    s.parse::<Perm>().unwrap().lex_rank() as u32
}

/// The 11 non-monotone reverse pairs of S_4, sorted by min rank.
pub fn nonmonotone_pairs(k: usize) -> Vec<(u32, u32)> {
    let rev = sym_rank_map(k, Sym::REVERSE);
    let (inc, dec) = monotone_ranks(k);
    let mut out = Vec::new();
    for r in 0..factorial(k) as u32 {
        if r == inc || r == dec {
            continue;
        }
        let rr = rev[r as usize];
        if r < rr {
            out.push((r, rr));
        }
    }
    out
}

struct K4Context {
    table7: MaskTable,
    /// (triple, stable non-monotone shadow as a 24-bit mask)
    sigmas: Vec<(InflationTriple, u32)>,
    rev_map: &'static [u32],
    pairs: Vec<(u32, u32)>,
    /// Non-hard pairs in order; index into this is the support bit.
    nonhard: Vec<(u32, u32)>,
}

impl K4Context {
    fn pattern_mask_of_pairbits(&self, bits: u16) -> u32 {
        let mut mask = 0u32;
        for (i, &(a, b)) in self.nonhard.iter().enumerate() {
            if bits & (1 << i) != 0 {
                mask |= (1 << a) | (1 << b);
            }
        }
        mask
    }

    fn pairbits_of_pattern_mask(&self, mask: u32) -> u16 {
        let mut bits = 0u16;
        for (i, &(a, b)) in self.nonhard.iter().enumerate() {
            if mask & ((1 << a) | (1 << b)) != 0 {
                bits |= 1 << i;
            }
        }
        bits
    }

    fn rev_mask(&self, mask: u32) -> u32 {
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let r = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1 << self.rev_map[r];
        }
        out
    }
}

fn k4_context() -> &'static K4Context {
    static CTX: OnceLock<K4Context> = OnceLock::new();
    CTX.get_or_init(|| {
        let table7 = MaskTable::build(7, 4);
        let sigmas: Vec<(InflationTriple, u32)> = all_perms(6)
            .into_par_iter()
            .flat_map_iter(|beta| {
                let mut out = Vec::with_capacity(12);
                for i in 1..=6 {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let triple =
                            InflationTriple::new(beta.clone(), i, sign).expect("index in range");
                        let shadow = triple.stable_shadow(4).expect("short inflations");
                        let mask = shadow.patterns.mask24().expect("k = 4");
                        out.push((triple, mask));
                    }
                }
                out
            })
            .collect();
        let pairs = nonmonotone_pairs(4);
        let (ha, hb) = (rank4(HARD_A), rank4(HARD_B));
        let hard = (ha.min(hb), ha.max(hb));
        let nonhard = pairs
            .iter()
            .copied()
            .filter(|&p| p != hard)
            .collect();
        K4Context {
            table7,
            sigmas,
            rev_map: sym_rank_map(4, Sym::REVERSE),
            pairs,
            nonhard,
        }
    })
}

// ---------------------------------------------------------------------------
// verify_k3

#[derive(Clone, Debug)]
pub struct K3Report {
    /// One entry per displayed identity, per n in 4..=8.
    pub identities_ok: bool,
    /// (n, holds) for the k = 3 reverse strategy sweep.
    pub reverse_holds: Vec<(usize, bool)>,
}

impl K3Report {
    pub fn pass(&self) -> bool {
        self.identities_ok && self.reverse_holds.iter().all(|&(_, h)| h)
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "k3 identities {}",
            if self.identities_ok { "ok" } else { "mismatch" }
        )];
        for &(n, h) in &self.reverse_holds {
            out.push(format!(
                "k3 reverse n={n} {}",
                if h { "holds" } else { "fails" }
            ));
        }
        out
    }
}

pub fn verify_k3() -> K3Report {
    let sets = [
        PatternSet::parse_list(3, "123,321,132,231").unwrap(),
        PatternSet::parse_list(3, "123,321,213,312").unwrap(),
        PatternSet::parse_list(3, "132,231,213,312").unwrap(),
    ];
    let mut identities_ok = true;
    for n in 4..=8 {
        let empty0 = enumerate_avoiders(n, &sets[0]).count == 0;
        let empty1 = enumerate_avoiders(n, &sets[1]).count == 0;
        let third = enumerate_avoiders(n, &sets[2]);
        let id2 = third.count == 2
            && third.members.contains(&Perm::identity(n))
            && third.members.contains(&Perm::reverse_identity(n));
        identities_ok &= empty0 && empty1 && id2;
    }
    let reverse_holds = (3..=8)
        .map(|n| {
            let mut solver = Solver::new(n, 3).expect("k = 3");
            (n, solver.reverse_strategy_check().holds)
        })
        .collect();
    K3Report {
        identities_ok,
        reverse_holds,
    }
}

// ---------------------------------------------------------------------------
// gap_cases_k4

#[derive(Clone, Debug)]
pub struct GapCasesReport {
    pub checks: usize,
    pub symmetry_classes: usize,
    pub all_resolved: bool,
    /// (F pattern mask, p rank, resolving triple) per case.
    pub witness_map: Vec<(u32, u32, InflationTriple)>,
}

impl GapCasesReport {
    pub fn pass(&self) -> bool {
        self.checks == 1156 && self.symmetry_classes == 297 && self.all_resolved
    }

    pub fn summary_line(&self) -> String {
        if self.pass() {
            "gap_cases ok checks=1156".into()
        } else {
            format!(
                "gap_cases mismatch checks={} symmetry_classes={} all_resolved={}",
                self.checks, self.symmetry_classes, self.all_resolved
            )
        }
    }
}

/// Companion map for the 12 non-hard non-B4 targets: p rank -> companion
/// ranks from the extended witness table.
fn companions_k4() -> Vec<(u32, Vec<u32>)> {
    let mut map: Vec<(u32, Vec<u32>)> = Vec::new();
    for (p, q) in extended_pairs() {
        let pr = p.lex_rank() as u32;
        let qr = q.lex_rank() as u32;
        match map.iter_mut().find(|(r, _)| *r == pr) {
            Some((_, qs)) => qs.push(qr),
            None => map.push((pr, vec![qr])),
        }
    }
    map
}

pub fn gap_cases_k4() -> GapCasesReport {
    let ctx = k4_context();
    let companions = companions_k4();
    let n_pairs = ctx.pairs.len();
    let mut cases: Vec<(u32, u32)> = Vec::new();
    for fbits in 0u32..(1 << n_pairs) {
        let mut fmask = 0u32;
        for (i, &(a, b)) in ctx.pairs.iter().enumerate() {
            if fbits & (1 << i) != 0 {
                fmask |= (1 << a) | (1 << b);
            }
        }
        let legal = legal_moves_mask(&ctx.table7, fmask);
        for (p, qs) in &companions {
            if qs.iter().any(|&q| fmask & (1 << q) == 0) {
                continue; // some companion pair is still free
            }
            if legal & (1 << p) != 0 {
                cases.push((fmask, *p));
            }
        }
    }
    let checks = cases.len();

    let maps: Vec<&[u32]> = DIHEDRAL.iter().map(|&s| sym_rank_map(4, s)).collect();
    let canon: HashSet<(u32, u32)> = cases
        .iter()
        .map(|&(fmask, p)| {
            maps.iter()
                .map(|map| {
                    let mut fm = 0u32;
                    let mut m = fmask;
                    while m != 0 {
                        let r = m.trailing_zeros() as usize;
                        m &= m - 1;
                        fm |= 1 << map[r];
                    }
                    (fm, map[p as usize])
                })
                .min()
                .unwrap()
        })
        .collect();
    let symmetry_classes = canon.len();

    let witness_map: Vec<(u32, u32, Option<InflationTriple>)> = cases
        .par_iter()
        .map(|&(fmask, p)| {
            let pr = ctx.rev_map[p as usize];
            let found = ctx.sigmas.iter().find_map(|(triple, sigma)| {
                if sigma & (1 << pr) == 0 || sigma & (1 << p) != 0 {
                    return None;
                }
                let others = sigma & !(1u32 << pr);
                let closed = others | ctx.rev_mask(others);
                if closed & fmask == 0 {
                    Some(triple.clone())
                } else {
                    None
                }
            });
            (fmask, p, found)
        })
        .collect();
    let all_resolved = witness_map.iter().all(|(_, _, t)| t.is_some());
    GapCasesReport {
        checks,
        symmetry_classes,
        all_resolved,
        witness_map: witness_map
            .into_iter()
            .filter_map(|(f, p, t)| t.map(|t| (f, p, t)))
            .collect(),
    }
}

fn legal_moves_mask(table: &MaskTable, fmask: u32) -> u32 {
    let mut or = 0u32;
    for &m in &table.masks {
        if m & fmask == 0 {
            or |= m;
        }
    }
    or & !fmask
}

// ---------------------------------------------------------------------------
// hard_pair_supports

#[derive(Clone, Debug)]
pub struct HardPairReport {
    pub supports: usize,
    pub legal_states: usize,
    pub covered: bool,
    pub collections_equal: bool,
    pub e_2413: SupportCollection,
    pub e_3142: SupportCollection,
}

impl HardPairReport {
    pub fn pass(&self) -> bool {
        self.supports == 138 && self.legal_states == 543 && self.covered && self.collections_equal
    }

    pub fn summary_line(&self) -> String {
        if self.pass() {
            "hard_pair ok supports=138 legal_states=543".into()
        } else {
            format!(
                "hard_pair mismatch supports={} legal_states={} covered={} collections_equal={}",
                self.supports, self.legal_states, self.covered, self.collections_equal
            )
        }
    }
}

fn supports_for(ctx: &K4Context, p: u32, pr: u32) -> Vec<u16> {
    let mut set: Vec<u16> = ctx
        .sigmas
        .iter()
        .filter(|(_, sigma)| sigma & (1 << p) != 0 && sigma & (1 << pr) == 0)
        .map(|(_, sigma)| ctx.pairbits_of_pattern_mask(*sigma))
        .collect();
    set.sort_unstable();
    set.dedup();
    set
}

pub fn hard_pair_supports() -> HardPairReport {
    let ctx = k4_context();
    let (ha, hb) = (rank4(HARD_A), rank4(HARD_B));
    let s_2413 = supports_for(ctx, ha, hb);
    let s_3142 = supports_for(ctx, hb, ha);
    let collections_equal = s_2413 == s_3142;
    let n_nonhard = ctx.nonhard.len();
    let mut legal_states = 0usize;
    let mut covered = true;
    for fbits in 0u16..(1 << n_nonhard) {
        let fmask = ctx.pattern_mask_of_pairbits(fbits);
        if legal_moves_mask(&ctx.table7, fmask) & (1 << ha) == 0 {
            continue;
        }
        legal_states += 1;
        covered &= s_2413.iter().any(|&sp| sp & fbits == 0);
    }
    HardPairReport {
        supports: s_2413.len(),
        legal_states,
        covered,
        collections_equal,
        e_2413: SupportCollection {
            target: HARD_A.parse().unwrap(),
            supports: s_2413,
        },
        e_3142: SupportCollection {
            target: HARD_B.parse().unwrap(),
            supports: s_3142,
        },
    }
}

// ---------------------------------------------------------------------------
// k4_endgame_witness

/// A length-n inflation in Av_n(F ∪ {p}) containing p^r, for p in the hard
/// pair and F a legal non-hard reverse-pair state.
pub fn k4_endgame_witness(
    n: usize,
    state: &ReversePairState,
    p: &Perm,
) -> Result<Perm, VerifyError> {
    let ctx = k4_context();
    let (ha, hb) = (rank4(HARD_A), rank4(HARD_B));
    let p_rank = p.lex_rank() as u32;
    if p_rank != ha && p_rank != hb {
        return Err(VerifyError::NotHardPattern(p.clone()));
    }
    if n < 10 {
        return Err(VerifyError::NTooSmall(n));
    }
    let fmask = state.patterns.mask24().expect("k = 4");
    if legal_moves_mask(&ctx.table7, fmask) & (1 << p_rank) == 0 {
        return Err(VerifyError::NotLegal(p.clone()));
    }
    let fbits = ctx.pairbits_of_pattern_mask(fmask);
    let pr_rank = if p_rank == ha { hb } else { ha };
    for (triple, sigma) in &ctx.sigmas {
        if sigma & (1 << pr_rank) == 0 || sigma & (1 << p_rank) != 0 {
            continue;
        }
        let hard_bits = (1u32 << ha) | (1u32 << hb);
        if ctx.pairbits_of_pattern_mask(sigma & !hard_bits) & fbits != 0 {
            continue;
        }
        let witness = triple.inflate(n - 5).expect("within cap");
        debug_assert!(witness.contains(&p.reverse()));
        debug_assert!(witness.avoids(p));
        return Ok(witness);
    }
    Err(VerifyError::NoSupport)
}

// ---------------------------------------------------------------------------
// k5_fullspace

#[derive(Clone, Debug)]
pub struct K5Report {
    pub one_companion_targets: usize,
    pub total_nonb5_nonmonotone: usize,
    pub separable_pairs: usize,
    pub total_pairs: usize,
    /// Base permutation length used in the one-companion sweep.
    pub base_len: usize,
}

impl K5Report {
    pub fn pass(&self) -> bool {
        self.one_companion_targets == 28
            && self.total_nonb5_nonmonotone == 110
            && self.separable_pairs == 59
            && self.total_pairs == 59
    }

    pub fn summary_lines(&self) -> Vec<String> {
        vec![
            format!(
                "one_companion_targets={} total_nonB5_nonmonotone={}",
                self.one_companion_targets, self.total_nonb5_nonmonotone
            ),
            format!(
                "full_space_separable_pairs={} total_nonmonotone_pairs={}",
                self.separable_pairs, self.total_pairs
            ),
        ]
    }
}

pub fn k5_fullspace() -> K5Report {
    k5_fullspace_with_base(7)
}

pub fn k5_fullspace_with_base(base_len: usize) -> K5Report {
    let b5 = build_bk(5).expect("k = 5");
    let b5_mask: u128 = b5
        .members
        .ranks()
        .iter()
        .fold(0u128, |m, &r| m | (1u128 << r));
    let (inc, dec) = monotone_ranks(5);
    let mono_mask: u128 = (1u128 << inc) | (1u128 << dec);
    let nonb5_nonmono: u128 = ((1u128 << 120) - 1) & !b5_mask & !mono_mask;
    let total_nonb5_nonmonotone = nonb5_nonmono.count_ones() as usize;

    // separability of every non-monotone reverse pair inside S_8
    let shadow_masks: Vec<u128> = {
        let combos = combinations(8, 5);
        let mut set: Vec<u128> = (0..8u8)
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut masks = HashSet::new();
                let mut vals = Vec::with_capacity(8);
                vals.push(first);
                vals.extend((0..8u8).filter(|&v| v != first));
                rec_perms(&mut vals, 1, &mut |v: &[u8]| {
                    masks.insert(shadow_mask_128(v, 5, &combos));
                });
                masks.into_iter().collect::<Vec<_>>()
            })
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    };
    let pairs5 = nonmonotone_pairs(5);
    let total_pairs = pairs5.len();
    let separable_pairs = pairs5
        .iter()
        .filter(|&&(a, b)| {
            shadow_masks
                .iter()
                .any(|&m| m & (1u128 << a) != 0 && m & (1u128 << b) == 0)
        })
        .count();

    // one-companion sweep over inflation triples with base in S_{base_len}
    let targets: HashSet<u32> = all_perms(base_len)
        .into_par_iter()
        .map(|beta| {
            let mut local = HashSet::new();
            for i in 1..=base_len {
                for sign in [Sign::Plus, Sign::Minus] {
                    let triple =
                        InflationTriple::new(beta.clone(), i, sign).expect("index in range");
                    let mut sigma = 0u128;
                    for t in 1..=5usize {
                        let inflated = triple.inflate(t).expect("within cap");
                        if inflated.len() < 5 {
                            continue;
                        }
                        let combos = combinations(inflated.len(), 5);
                        sigma |= shadow_mask_128(inflated.values(), 5, &combos);
                    }
                    sigma &= !mono_mask;
                    if sigma.count_ones() != 2 {
                        continue;
                    }
                    let a = sigma.trailing_zeros();
                    let b = 127 - sigma.leading_zeros();
                    let (p, q) = if nonb5_nonmono & (1u128 << a) != 0 {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    if nonb5_nonmono & (1u128 << p) != 0 && b5_mask & (1u128 << q) != 0 {
                        local.insert(p);
                    }
                }
            }
            local
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });

    K5Report {
        one_companion_targets: targets.len(),
        total_nonb5_nonmonotone,
        separable_pairs,
        total_pairs,
        base_len,
    }
}

// ---------------------------------------------------------------------------
// structural checks surfaced through the CLI

/// Recursive characterization of B_k for a range of k.
pub fn verify_recursive_bk_range(k_lo: usize, k_hi: usize) -> Vec<(usize, bool)> {
    (k_lo..=k_hi)
        .map(|k| (k, crate::bk::verify_recursive_bk(k).unwrap_or(false)))
        .collect()
}

/// Witness-family shadow identities: Sh_k of the singleton witnesses is
/// {q, monotone}, and the extended k = 4 families have non-monotone shadow
/// exactly {p, q}.
pub fn verify_witnesses(n_max: usize) -> bool {
    for k in [4usize, 5] {
        let bk = build_bk(k).expect("k >= 3");
        for q in bk.members.iter_perms() {
            let family = crate::bk::witness_for(&q).expect("member of B_k");
            for n in k + 1..=n_max {
                let w = crate::bk::witness(family, n).expect("n >= 2");
                let shadow = w.shadow(k).expect("k <= n");
                let ok = shadow.len() == 2
                    && shadow.contains(&q)
                    && shadow.iter().any(|s| s.is_monotone());
                if !ok {
                    return false;
                }
            }
        }
    }
    for (p, q) in extended_pairs() {
        for n in 7..=n_max {
            let e = crate::bk::extended_witness(&p, &q, n).expect("known pair");
            let mut nonmono: Vec<Perm> = e
                .shadow(4)
                .expect("n >= 4")
                .into_iter()
                .filter(|s| !s.is_monotone())
                .collect();
            nonmono.sort();
            let mut expected = vec![p.clone(), q.clone()];
            expected.sort();
            if nonmono != expected {
                return false;
            }
        }
    }
    true
}

/// Quadratic-bound structure: the staircase and double-layered permutations
/// avoid B_k, and every non-monotone avoider obeys the LIS/LDS bounds.
/// Checks Av_n(B_4) for n <= n4 and Av_n(B_5) for n <= n5 exhaustively.
pub fn verify_bounds(n4: usize, n5: usize) -> bool {
    for k in 4..=7 {
        let bk = build_bk(k).expect("k >= 3");
        let pats: Vec<Perm> = bk.members.iter_perms().collect();
        let e = crate::bk::staircase(k).expect("k >= 4");
        let h = crate::bk::layered(k).expect("k >= 4");
        if pats.iter().any(|p| e.contains(p) || h.contains(p)) {
            return false;
        }
    }
    for (k, n_hi) in [(4usize, n4), (5usize, n5)] {
        let bk = build_bk(k).expect("k >= 3");
        let cap = 3 * k - 8;
        let mid = 2 * k - 4;
        let low = k - 2;
        for n in 1..=n_hi {
            let avoiders = enumerate_avoiders(n, &bk.members);
            for m in &avoiders.members {
                if m.is_monotone() {
                    continue;
                }
                let (lis, lds) = (m.lis(), m.lds());
                if lis > cap || lds > cap {
                    return false;
                }
                if (lis >= mid && lds > low) || (lds >= mid && lis > low) {
                    return false;
                }
            }
        }
    }
    true
}

fn shadow_mask_128(v: &[u8], k: usize, combos: &[Vec<usize>]) -> u128 {
    let mut mask = 0u128;
    let mut picked = [0u8; 5];
    for combo in combos {
        for (a, &i) in combo.iter().enumerate() {
            picked[a] = v[i];
        }
        mask |= 1 << rank_of(&picked[..k]);
    }
    mask
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
