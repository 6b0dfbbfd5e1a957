//! The monotone-forcing pattern sets B_k, their witness families, the
//! extended witness families for k = 4, and the quadratic lower-bound
//! permutations (staircase and double-layered).

use thiserror::Error;

use crate::pattern_set::PatternSet;
use crate::perm::{factorial, Perm, DIHEDRAL};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BkError {
    #[error("B_k requires k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("construction requires k >= 4, got {0}")]
    KTooSmallForConstruction(usize),
    #[error("witness families require n >= 2, got {0}")]
    NTooSmall(usize),
    #[error("extended witnesses require n >= 7, got {0}")]
    ExtendedNTooSmall(usize),
    #[error("no extended witness family for the pair ({0}, {1})")]
    UnknownPair(Perm, Perm),
}

/// B_k with its four generators p_k, q_k, r_k, s_k.
#[derive(Clone, Debug)]
pub struct BkSet {
    pub k: usize,
    /// [p_k, q_k, r_k, s_k]
    pub generators: [Perm; 4],
    /// The generators together with their complements (8 patterns for
    /// k >= 4, 4 distinct ones for k = 3).
    pub members: PatternSet,
}

pub fn build_bk(k: usize) -> Result<BkSet, BkError> {
    if k < 3 {
        return Err(BkError::KTooSmall(k));
    }
    let p = witness_raw(Family::Pi, k);
    let q = witness_raw(Family::Rho, k);
    let r = witness_raw(Family::Sigma, k);
    let s = witness_raw(Family::Tau, k);
    let mut patterns = vec![p.clone(), q.clone(), r.clone(), s.clone()];
    patterns.extend([p.complement(), q.complement(), r.complement(), s.complement()]);
    let members = PatternSet::from_patterns(k, &patterns).expect("equal lengths");
    Ok(BkSet {
        k,
        generators: [p, q, r, s],
        members,
    })
}

/// The four witness families of the minimality proof and their complements.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// pi_n = 12...(n-2) n (n-1); pi_k = p_k
    Pi,
    /// rho_n = 1 n (n-1) ... 2; rho_k = q_k
    Rho,
    /// sigma_n = 21 3 4 ... n; sigma_k = r_k
    Sigma,
    /// tau_n = 23 ... n 1; tau_k = s_k
    Tau,
    PiC,
    RhoC,
    SigmaC,
    TauC,
}

pub const FAMILIES: [Family; 8] = [
    Family::Pi,
    Family::Rho,
    Family::Sigma,
    Family::Tau,
    Family::PiC,
    Family::RhoC,
    Family::SigmaC,
    Family::TauC,
];

fn witness_raw(f: Family, n: usize) -> Perm {
    let n8 = n as u8;
    let vals: Vec<u8> = match f {
        Family::Pi => (0..n8 - 2).chain([n8 - 1, n8 - 2]).collect(),
        Family::Rho => [0].into_iter().chain((1..n8).rev()).collect(),
        Family::Sigma => [1, 0].into_iter().chain(2..n8).collect(),
        Family::Tau => (1..n8).chain([0]).collect(),
        _ => unreachable!(),
    };
    Perm::from_zero_based(vals).expect("valid witness")
}

/// The witness permutation of length n for one of the eight families.
pub fn witness(f: Family, n: usize) -> Result<Perm, BkError> {
    if n < 2 {
        return Err(BkError::NTooSmall(n));
    }
    Ok(match f {
        Family::Pi | Family::Rho | Family::Sigma | Family::Tau => witness_raw(f, n),
        Family::PiC => witness_raw(Family::Pi, n).complement(),
        Family::RhoC => witness_raw(Family::Rho, n).complement(),
        Family::SigmaC => witness_raw(Family::Sigma, n).complement(),
        Family::TauC => witness_raw(Family::Tau, n).complement(),
    })
}

/// The witness family whose k-shadow is {q, monotone} for a given q in B_k.
pub fn witness_for(q: &Perm) -> Option<Family> {
    let k = q.len();
    let bk = build_bk(k).ok()?;
    let [p, qq, r, s] = &bk.generators;
    if q == p {
        Some(Family::Pi)
    } else if q == qq {
        Some(Family::Rho)
    } else if q == r {
        Some(Family::Sigma)
    } else if q == s {
        Some(Family::Tau)
    } else if *q == p.complement() {
        Some(Family::PiC)
    } else if *q == qq.complement() {
        Some(Family::RhoC)
    } else if *q == r.complement() {
        Some(Family::SigmaC)
    } else if *q == s.complement() {
        Some(Family::TauC)
    } else {
        None
    }
}

/// The four base rows of the extended-witness table: (p, q, builder).
/// Every other ordered pair is a dihedral image of one of these.
fn base_extended_rows() -> Vec<(Perm, Perm, fn(usize) -> Perm)> {
    fn row1(n: usize) -> Perm {
        // 1, 2, ..., n-3, n-1, n-2, n
        let n = n as u8;
        Perm::from_zero_based((0..n - 3).chain([n - 2, n - 3, n - 1]).collect()).unwrap()
    }
    fn row2(n: usize) -> Perm {
        // 1, 2, ..., n-3, n-1, n, n-2
        let n = n as u8;
        Perm::from_zero_based((0..n - 3).chain([n - 2, n - 1, n - 3]).collect()).unwrap()
    }
    fn row3(n: usize) -> Perm {
        // 1, 3, 4, ..., n, 2
        let n = n as u8;
        Perm::from_zero_based([0].into_iter().chain(2..n).chain([1]).collect()).unwrap()
    }
    fn row4(n: usize) -> Perm {
        // 2, 1, n, n-1, ..., 3
        let n = n as u8;
        Perm::from_zero_based([1, 0].into_iter().chain((2..n).rev()).collect()).unwrap()
    }
    vec![
        ("1324".parse().unwrap(), "1243".parse().unwrap(), row1 as fn(usize) -> Perm),
        ("1342".parse().unwrap(), "1243".parse().unwrap(), row2),
        ("1342".parse().unwrap(), "2341".parse().unwrap(), row3),
        ("2143".parse().unwrap(), "1432".parse().unwrap(), row4),
    ]
}

/// All 24 ordered extended-witness pairs (p, q), generated by closing the
/// four stored rows under the dihedral symmetries applied jointly.
pub fn extended_pairs() -> Vec<(Perm, Perm)> {
    let mut out: Vec<(Perm, Perm)> = Vec::new();
    for (p, q, _) in base_extended_rows() {
        for &sym in &DIHEDRAL {
            let pair = (p.apply_sym(sym), q.apply_sym(sym));
            if !out.contains(&pair) {
                out.push(pair);
            }
        }
    }
    out.sort();
    out
}

/// E_n(p, q): shadow(., 4) minus monotones equals exactly {p, q}.
pub fn extended_witness(p: &Perm, q: &Perm, n: usize) -> Result<Perm, BkError> {
    if n < 7 {
        return Err(BkError::ExtendedNTooSmall(n));
    }
    for (bp, bq, build) in base_extended_rows() {
        for &sym in &DIHEDRAL {
            if (bp.apply_sym(sym), bq.apply_sym(sym)) == (p.clone(), q.clone()) {
                return Ok(build(n).apply_sym(sym));
            }
        }
    }
    Err(BkError::UnknownPair(p.clone(), q.clone()))
}

/// The staircase permutation E_k = G(k-3; k-2,...,k-2; k-3) of length
/// k^2 - 2k - 2. It avoids B_k.
pub fn staircase(k: usize) -> Result<Perm, BkError> {
    if k < 4 {
        return Err(BkError::KTooSmallForConstruction(k));
    }
    let core = skew_tower(&vec![k - 2; k - 2]);
    let left = Perm::identity(k - 3);
    let right = Perm::identity(k - 3);
    Ok(left
        .direct_sum(&core)
        .and_then(|x| x.direct_sum(&right))
        .expect("within length cap"))
}

/// The double-layered permutation H_k = L_k (+) L_k of length 2(k-2)(k-3),
/// where L_k is the skew sum of k-2 increasing runs of length k-3.
pub fn layered(k: usize) -> Result<Perm, BkError> {
    if k < 4 {
        return Err(BkError::KTooSmallForConstruction(k));
    }
    let l = skew_tower(&vec![k - 3; k - 2]);
    Ok(l.direct_sum(&l).expect("within length cap"))
}

/// id_{c_1} (-) id_{c_2} (-) ... (-) id_{c_m}
fn skew_tower(blocks: &[usize]) -> Perm {
    let mut it = blocks.iter().map(|&c| Perm::identity(c));
    let first = it.next().expect("nonempty tower");
    it.fold(first, |acc, b| acc.skew_sum(&b).expect("within length cap"))
}

/// Exhaustively checks the recursive characterization of B_k: pi is in B_k
/// iff its (k-1)-shadow is exactly one monotone pattern plus one element of
/// B_{k-1}. Recomputes B_{k-1} internally so the check is self-contained.
pub fn verify_recursive_bk(k: usize) -> Result<bool, BkError> {
    if k < 4 {
        return Err(BkError::KTooSmallForConstruction(k));
    }
    let bk = build_bk(k)?;
    let bk_prev = build_bk(k - 1)?;
    for rank in 0..factorial(k) {
        let pi = Perm::from_lex_rank(k, rank);
        let shadow = pi.shadow(k - 1).expect("valid l");
        let characterized = shadow.len() == 2 && {
            let (a, b) = (&shadow[0], &shadow[1]);
            let split = |m: &Perm, u: &Perm| m.is_monotone() && bk_prev.members.contains_pattern(u);
            split(a, b) || split(b, a)
        };
        if characterized != bk.members.contains_pattern(&pi) {
            return Ok(false);
        }
    }
    Ok(true)
}
