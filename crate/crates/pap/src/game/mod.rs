//! The PAP game engine: positions, followers, memoized Sprague-Grundy
//! evaluation with dihedral symmetry reduction, reverse-strategy checking,
//! and optimal-play statistics.
//!
//! A position (n, k, F) is identified with the set of shadow masks of its
//! surviving permutations. Two forbidden sets with the same surviving mask
//! set have the same followers and therefore the same game value, so the
//! solver memoizes both by canonical forbidden mask and by a fingerprint of
//! the surviving mask set.

pub mod cache;
pub mod masks;

use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use thiserror::Error;

use crate::avoidance::Fnv;
use crate::pattern_set::{sym_rank_map, PatternSet, PatternSetError};
use crate::perm::{Perm, Sym, DIHEDRAL};
use masks::MaskTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("pattern {0} is not a legal move from this position")]
    IllegalMove(Perm),
    #[error("solver supports k <= 4, got {0}")]
    KTooLarge(usize),
    #[error(transparent)]
    PatternSet(#[from] PatternSetError),
}

/// Minimal excludant of a set of Grundy values.
pub fn mex(values: &[u8]) -> u8 {
    let mut seen = 0u64;
    for &v in values {
        if v < 64 {
            seen |= 1 << v;
        }
    }
    seen.trailing_ones() as u8
}

/// A PAP game state: board length n, pattern length k, forbidden set F.
/// Avoider data is derived by the solver, never stored here.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Position {
    pub n: usize,
    pub k: usize,
    pub forbidden: PatternSet,
}

impl Position {
    pub fn start(n: usize, k: usize) -> Position {
        Position {
            n,
            k,
            forbidden: PatternSet::empty(k),
        }
    }

    pub fn with_forbidden(n: usize, forbidden: PatternSet) -> Position {
        Position {
            n,
            k: forbidden.k(),
            forbidden,
        }
    }
}

pub struct ReverseCheckOutcome {
    pub holds: bool,
    /// A shortest Player-I move sequence on which the reverse strategy
    /// breaks down, when it does.
    pub counterexample: Option<Vec<Perm>>,
}

/// Memoizing Grundy solver for PAP on S_n with pattern length k <= 4.
pub struct Solver {
    n: usize,
    k: usize,
    table: MaskTable,
    sym_maps: Vec<&'static [u32]>,
    sg_cache: HashMap<u32, u8>,
    fp_cache: HashMap<u64, u8>,
    dist_cache: HashMap<u32, Rc<Vec<u128>>>,
    dist_fp_cache: HashMap<u64, Rc<Vec<u128>>>,
    computed: u64,
}

impl Solver {
    pub fn new(n: usize, k: usize) -> Result<Solver, GameError> {
        if k > 4 {
            return Err(GameError::KTooLarge(k));
        }
        let table = MaskTable::build(n, k);
        let sym_maps = DIHEDRAL.iter().map(|&s| sym_rank_map(k, s)).collect();
        Ok(Solver {
            n,
            k,
            table,
            sym_maps,
            sg_cache: HashMap::new(),
            fp_cache: HashMap::new(),
            dist_cache: HashMap::new(),
            dist_fp_cache: HashMap::new(),
            computed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &MaskTable {
        &self.table
    }

    /// Number of Grundy values computed (not served from a cache).
    pub fn computed_count(&self) -> u64 {
        self.computed
    }

    pub fn preload(&mut self, values: &HashMap<u32, u8>) {
        self.sg_cache.extend(values);
    }

    pub fn export(&self) -> &HashMap<u32, u8> {
        &self.sg_cache
    }

    fn transform_mask(&self, mask: u32, sym_idx: usize) -> u32 {
        let map = self.sym_maps[sym_idx];
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let r = m.trailing_zeros();
            out |= 1 << map[r as usize];
            m &= m - 1;
        }
        out
    }

    /// Lexicographically least image of the forbidden mask under the
    /// dihedral group.
    pub fn canonical_mask(&self, f: u32) -> u32 {
        (0..8).map(|i| self.transform_mask(f, i)).min().unwrap()
    }

    fn forbidden_mask(&self, forbidden: &PatternSet) -> u32 {
        assert_eq!(forbidden.k(), self.k);
        forbidden.mask24().expect("k <= 4")
    }

    pub fn avoider_count(&self, forbidden: &PatternSet) -> u64 {
        self.table.avoider_count(self.forbidden_mask(forbidden))
    }

    /// Bitmask of legal moves: unforbidden patterns contained in at least
    /// one surviving permutation.
    pub fn legal_moves_mask(&self, f: u32) -> u32 {
        let mut or = 0u32;
        for &m in &self.table.masks {
            if m & f == 0 {
                or |= m;
            }
        }
        or & !f
    }

    pub fn legal_moves(&self, pos: &Position) -> PatternSet {
        let mask = self.legal_moves_mask(self.forbidden_mask(&pos.forbidden));
        PatternSet::from_mask24(self.k, mask).expect("k <= 4")
    }

    pub fn apply_move(&self, pos: &Position, p: &Perm) -> Result<Position, GameError> {
        let f = self.forbidden_mask(&pos.forbidden);
        let bit = 1u32 << p.lex_rank();
        if p.len() != self.k || self.legal_moves_mask(f) & bit == 0 {
            return Err(GameError::IllegalMove(p.clone()));
        }
        Ok(Position::with_forbidden(self.n, pos.forbidden.with_pattern(p)))
    }

    pub fn grundy(&mut self, pos: &Position) -> u8 {
        self.grundy_mask(self.forbidden_mask(&pos.forbidden))
    }

    pub fn grundy_mask(&mut self, f: u32) -> u8 {
        let survivors = self.table.survivors(f);
        self.sg(f, &survivors)
    }

    fn sg(&mut self, f: u32, survivors: &[u32]) -> u8 {
        let canon = self.canonical_mask(f);
        if let Some(&v) = self.sg_cache.get(&canon) {
            return v;
        }
        let fp = fingerprint_masks(self.n, self.k, survivors);
        if let Some(&v) = self.fp_cache.get(&fp) {
            self.sg_cache.insert(canon, v);
            return v;
        }
        let legal = survivors.iter().fold(0u32, |a, &m| a | m) & !f;
        let mut child_values = Vec::new();
        let mut moves = legal;
        while moves != 0 {
            let p = moves.trailing_zeros();
            moves &= moves - 1;
            let bit = 1u32 << p;
            let child: Vec<u32> = survivors.iter().copied().filter(|&m| m & bit == 0).collect();
            child_values.push(self.sg(f | bit, &child));
        }
        let v = mex(&child_values);
        self.computed += 1;
        self.sg_cache.insert(canon, v);
        self.fp_cache.insert(fp, v);
        v
    }

    /// Multiset of follower Grundy values, sorted.
    pub fn follower_profile(&mut self, pos: &Position) -> Vec<u8> {
        let f = self.forbidden_mask(&pos.forbidden);
        let mut out = Vec::new();
        let mut moves = self.legal_moves_mask(f);
        while moves != 0 {
            let p = moves.trailing_zeros();
            moves &= moves - 1;
            out.push(self.grundy_mask(f | (1 << p)));
        }
        out.sort_unstable();
        out
    }

    /// Legal moves leading to a Grundy-0 follower.
    pub fn winning_replies(&mut self, pos: &Position) -> PatternSet {
        let f = self.forbidden_mask(&pos.forbidden);
        let mut mask = 0u32;
        let mut moves = self.legal_moves_mask(f);
        while moves != 0 {
            let p = moves.trailing_zeros();
            moves &= moves - 1;
            if self.grundy_mask(f | (1 << p)) == 0 {
                mask |= 1 << p;
            }
        }
        PatternSet::from_mask24(self.k, mask).expect("k <= 4")
    }

    /// Counts of complete optimal play lines from S_n by length. From a
    /// position with sg != 0 the mover plays only to sg = 0 followers; from
    /// a sg = 0 position every legal move is counted.
    pub fn optimal_play_distribution(&mut self) -> Vec<(usize, u128)> {
        let survivors = self.table.survivors(0);
        let dist = self.dist(0, &survivors);
        dist.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(len, &c)| (len, c))
            .collect()
    }

    fn dist(&mut self, f: u32, survivors: &[u32]) -> Rc<Vec<u128>> {
        let canon = self.canonical_mask(f);
        if let Some(d) = self.dist_cache.get(&canon) {
            return Rc::clone(d);
        }
        let fp = fingerprint_masks(self.n, self.k, survivors);
        if let Some(d) = self.dist_fp_cache.get(&fp) {
            let d = Rc::clone(d);
            self.dist_cache.insert(canon, Rc::clone(&d));
            return d;
        }
        let legal = survivors.iter().fold(0u32, |a, &m| a | m) & !f;
        let sg_here = self.sg(f, survivors);
        let mut counts = vec![0u128; 1];
        let mut moves = legal;
        if legal == 0 {
            counts[0] = 1; // one empty line ends here
        }
        while moves != 0 {
            let p = moves.trailing_zeros();
            moves &= moves - 1;
            let bit = 1u32 << p;
            let child: Vec<u32> = survivors.iter().copied().filter(|&m| m & bit == 0).collect();
            if sg_here != 0 && self.sg(f | bit, &child) != 0 {
                continue; // the winner only plays to P-positions
            }
            let sub = self.dist(f | bit, &child);
            if counts.len() < sub.len() + 1 {
                counts.resize(sub.len() + 1, 0);
            }
            for (len, &c) in sub.iter().enumerate() {
                counts[len + 1] += c;
            }
        }
        let rc = Rc::new(counts);
        self.dist_cache.insert(canon, Rc::clone(&rc));
        self.dist_fp_cache.insert(fp, Rc::clone(&rc));
        rc
    }

    /// Exhaustive check of the move-by-move reverse strategy for Player II,
    /// by BFS over Player-I move sequences. Fails when Player I ever makes
    /// the final move or when the reverse reply is not legal.
    pub fn reverse_strategy_check(&mut self) -> ReverseCheckOutcome {
        let rev = sym_rank_map(self.k, Sym::REVERSE);
        let mut visited: HashSet<u32> = HashSet::new();
        let mut queue: VecDeque<(u32, Vec<u32>)> = VecDeque::new();
        visited.insert(0);
        queue.push_back((0, Vec::new()));
        while let Some((f, line)) = queue.pop_front() {
            let legal = self.legal_moves_mask(f);
            let mut moves = legal;
            while moves != 0 {
                let p = moves.trailing_zeros();
                moves &= moves - 1;
                let f1 = f | (1u32 << p);
                let legal1 = self.legal_moves_mask(f1);
                let pr = rev[p as usize];
                let failed = legal1 == 0 || pr == p || legal1 & (1u32 << pr) == 0;
                if failed {
                    let mut cex = line.clone();
                    cex.push(p);
                    return ReverseCheckOutcome {
                        holds: false,
                        counterexample: Some(
                            cex.into_iter()
                                .map(|r| Perm::from_lex_rank(self.k, r as u64))
                                .collect(),
                        ),
                    };
                }
                let f2 = f1 | (1u32 << pr);
                if visited.insert(f2) {
                    let mut line2 = line.clone();
                    line2.push(p);
                    line2.push(pr);
                    queue.push_back((f2, line2));
                }
            }
        }
        ReverseCheckOutcome {
            holds: true,
            counterexample: None,
        }
    }

    /// Recomputes the Grundy value of `f` from its followers and compares
    /// with the cached value; used to audit cache integrity.
    pub fn audit_mask(&mut self, f: u32) -> bool {
        let cached = self.grundy_mask(f);
        let mut child_values = Vec::new();
        let mut moves = self.legal_moves_mask(f);
        while moves != 0 {
            let p = moves.trailing_zeros();
            moves &= moves - 1;
            child_values.push(self.grundy_mask(f | (1 << p)));
        }
        mex(&child_values) == cached
    }
}

/// The full grid of sg(S_n, k) for n = 1..=n_max, k = 1..=k_max.
/// Returns rows indexed by n, columns by k.
pub fn sg_table(n_max: usize, k_max: usize) -> Vec<Vec<u8>> {
    sg_table_with_store(n_max, k_max, &mut cache::GrundyStore::new())
}

pub fn sg_table_with_store(
    n_max: usize,
    k_max: usize,
    store: &mut cache::GrundyStore,
) -> Vec<Vec<u8>> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mut row = Vec::new();
        for k in 1..=k_max {
            let mut solver = Solver::new(n, k).expect("k <= 4");
            if let Some(map) = store.table(n, k) {
                solver.preload(map);
            }
            row.push(solver.grundy_mask(0));
            store.merge_in(n, k, solver.export());
        }
        rows.push(row);
    }
    rows
}

fn fingerprint_masks(n: usize, k: usize, masks: &[u32]) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(n as u64);
    h.write_u64(k as u64);
    for &m in masks {
        h.write_u64(m as u64);
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::DIHEDRAL;

    fn set(s: &str) -> PatternSet {
        PatternSet::parse_list(4, s).unwrap()
    }

    #[test]
    fn mex_basics() {
        assert_eq!(mex(&[]), 0);
        assert_eq!(mex(&[1, 2]), 0);
        assert_eq!(mex(&[0, 1, 3]), 2);
        assert_eq!(mex(&[0, 0, 1, 2, 2]), 3);
    }

    #[test]
    fn small_table() {
        let rows = sg_table(6, 4);
        assert_eq!(rows[5], vec![1, 0, 0, 2]); // n = 6
        for n in 0..5 {
            assert_eq!(rows[n], vec![1, 0, 0, 0]);
        }
    }

    #[test]
    fn moves_and_counts() {
        let solver = Solver::new(4, 4).unwrap();
        let start = Position::start(4, 4);
        assert_eq!(solver.avoider_count(&start.forbidden), 24);
        assert_eq!(solver.legal_moves(&start).len(), 24);
        let after = solver
            .apply_move(&start, &"2413".parse().unwrap())
            .unwrap();
        assert_eq!(solver.avoider_count(&after.forbidden), 23);
        assert!(solver.apply_move(&after, &"2413".parse().unwrap()).is_err());
        assert!(Solver::new(5, 5).is_err());
    }

    #[test]
    fn example_position_n9() {
        let mut solver = Solver::new(9, 4).unwrap();
        let pos = Position::with_forbidden(9, set("1234,4321,1324"));
        assert_eq!(solver.avoider_count(&pos.forbidden), 334);
        let replies = solver.winning_replies(&pos);
        assert_eq!(replies, set("3412,3421,4312"));
        let deeper = Position::with_forbidden(9, set("1234,4321,1324,4231"));
        assert_eq!(solver.avoider_count(&deeper.forbidden), 2);
        assert_eq!(solver.grundy(&deeper), 2);
    }

    #[test]
    fn follower_profile_s6() {
        let mut solver = Solver::new(6, 4).unwrap();
        let profile = solver.follower_profile(&Position::start(6, 4));
        let mut want = vec![0u8; 12];
        want.extend([1, 1]);
        want.extend([3; 10]);
        assert_eq!(profile, want);
    }

    #[test]
    fn grundy_dihedral_invariance() {
        let mut solver = Solver::new(6, 4).unwrap();
        for f in [set("1243,2134"), set("2413,3142,1324"), set("1342")] {
            let base = solver.grundy(&Position::with_forbidden(6, f.clone()));
            for &sym in &DIHEDRAL {
                let image = Position::with_forbidden(6, f.apply_sym(sym));
                assert_eq!(solver.grundy(&image), base);
            }
        }
    }

    #[test]
    fn cache_audit_and_preload() {
        let mut solver = Solver::new(5, 4).unwrap();
        solver.grundy_mask(0);
        for f in [0u32, 1, 1 << 23, (1 << 5) | (1 << 9)] {
            assert!(solver.audit_mask(f));
        }
        let computed = solver.computed_count();
        assert!(computed > 0);
        let exported = solver.export().clone();
        let mut fresh = Solver::new(5, 4).unwrap();
        fresh.preload(&exported);
        fresh.grundy_mask(0);
        assert_eq!(fresh.computed_count(), 0);
    }

    #[test]
    fn store_roundtrip() {
        let mut solver = Solver::new(4, 4).unwrap();
        solver.grundy_mask(0);
        let mut store = cache::GrundyStore::new();
        store.merge_in(4, 4, solver.export());
        let dir = std::env::temp_dir().join("pap_store_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.ndjson");
        store.save(&path).unwrap();
        let loaded = cache::GrundyStore::load(&path).unwrap();
        assert_eq!(loaded.len(), store.len());
        assert_eq!(loaded.table(4, 4), store.table(4, 4));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn store_rejects_garbage() {
        let dir = std::env::temp_dir().join("pap_store_test_bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.ndjson");
        std::fs::write(&path, "{\"something\":2}\n").unwrap();
        assert!(cache::GrundyStore::load(&path).is_err());
        std::fs::write(
            &path,
            "{\"pap_cache\":1}\n{\"n\":4,\"k\":3,\"f\":\"ffffff\",\"sg\":0}\n",
        )
        .unwrap();
        assert!(matches!(
            cache::GrundyStore::load(&path),
            Err(cache::CacheError::MaskOverflow { .. })
        ));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn reverse_check_small() {
        for (n, want) in [(4, true), (5, false), (6, false)] {
            let mut solver = Solver::new(n, 4).unwrap();
            let out = solver.reverse_strategy_check();
            assert_eq!(out.holds, want);
            assert_eq!(out.holds, out.counterexample.is_none());
            if let Some(line) = out.counterexample {
                assert!(!line.is_empty());
                assert!(line.len() % 2 == 1); // Player I makes the last tested move
            }
        }
        for n in 3..=6 {
            assert!(Solver::new(n, 3).unwrap().reverse_strategy_check().holds);
        }
    }

    #[test]
    fn optimal_dist_small() {
        let mut solver = Solver::new(5, 4).unwrap();
        let dist = solver.optimal_play_distribution();
        // S_5 is a P-position: only even lengths 10..24 occur
        assert!(dist.iter().all(|&(len, _)| len % 2 == 0 && (10..=24).contains(&len)));
        assert_eq!(dist.first(), Some(&(10, 296960)));
    }
}
