//! End-to-end acceptance checks for the engine: the published Grundy table,
//! the worked n=9 example, the reverse-strategy data, thresholds, the
//! exhaustive verification counts, the optimal-play distributions, and the
//! structural property suites. Each test prints a single pass line; a panic
//! marks the corresponding check as failed.

use std::collections::HashSet;

use pap::avoidance::{enumerate_avoiders, threshold};
use pap::bk::build_bk;
use pap::game::{sg_table, Position, Solver};
use pap::inflation::{InflationTriple, Sign};
use pap::pattern_set::{sym_rank_map, PatternSet};
use pap::perm::{all_perms, Perm, DIHEDRAL};
use pap::verify::{
    gap_cases_k4, hard_pair_supports, k5_fullspace, verify_bounds, verify_recursive_bk_range,
    verify_witnesses,
};

fn p(s: &str) -> Perm {
    s.parse().unwrap()
}

#[test]
fn grundy_table() {
    let expected: [[u8; 4]; 10] = [
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 2],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
    ];
    let table = sg_table(10, 4);
    assert_eq!(table.len(), 10);
    for (n, row) in table.iter().enumerate() {
        assert_eq!(row.as_slice(), &expected[n], "sg row for n={}", n + 1);
    }
    println!("grundy table n=1..10, k=1..4: pass");
}

#[test]
fn follower_profile_s6() {
    let mut solver = Solver::new(6, 4).unwrap();
    let profile = solver.follower_profile(&Position::start(6, 4));
    let mut expected = vec![0u8; 12];
    expected.extend([1, 1]);
    expected.extend([3u8; 10]);
    assert_eq!(profile, expected);
    println!("follower profile of S_6 at k=4: pass");
}

#[test]
fn example_position_n9() {
    let mut solver = Solver::new(9, 4).unwrap();
    let f3 = PatternSet::parse_list(4, "1234,4321,1324").unwrap();
    assert_eq!(solver.avoider_count(&f3), 334);
    let f4 = f3.with_pattern(&p("4231"));
    assert_eq!(solver.avoider_count(&f4), 2);
    assert_eq!(solver.grundy(&Position::with_forbidden(9, f4)), 2);
    let replies = solver.winning_replies(&Position::with_forbidden(9, f3));
    let expected = PatternSet::parse_list(4, "3412,3421,4312").unwrap();
    assert_eq!(replies, expected);
    println!("n=9 example position: pass");
}

#[test]
fn reverse_strategy_by_n() {
    for n in 4..=10 {
        let mut solver = Solver::new(n, 4).unwrap();
        let outcome = solver.reverse_strategy_check();
        let should_hold = n == 4 || n == 10;
        assert_eq!(outcome.holds, should_hold, "reverse strategy at n={n}");
        if !should_hold {
            let line = outcome.counterexample.expect("counterexample line");
            assert!(line.len() % 2 == 1, "counterexample ends on Player I's move");
        }
    }
    println!("reverse strategy holds at n=4,10 and fails at n=5..9: pass");
}

#[test]
fn bk_thresholds() {
    assert_eq!(threshold(3, 6).unwrap(), Some(1));
    assert_eq!(threshold(4, 10).unwrap(), Some(7));
    assert_eq!(threshold(5, 16).unwrap(), Some(14));
    println!("thresholds N_3=1, N_4=7, N_5=14: pass");
}

#[test]
fn verification_counts() {
    let gap = gap_cases_k4();
    assert_eq!(gap.checks, 1156);
    assert_eq!(gap.symmetry_classes, 297);
    assert!(gap.all_resolved);
    assert_eq!(gap.summary_line(), "gap_cases ok checks=1156");

    let hard = hard_pair_supports();
    assert_eq!(hard.supports, 138);
    assert_eq!(hard.legal_states, 543);
    assert!(hard.covered);
    assert!(hard.collections_equal);
    assert_eq!(hard.summary_line(), "hard_pair ok supports=138 legal_states=543");

    let k5 = k5_fullspace();
    assert_eq!(k5.one_companion_targets, 28);
    assert_eq!(k5.total_nonb5_nonmonotone, 110);
    assert_eq!(k5.separable_pairs, 59);
    assert_eq!(k5.total_pairs, 59);
    assert_eq!(
        k5.summary_lines(),
        vec![
            "one_companion_targets=28 total_nonB5_nonmonotone=110".to_string(),
            "full_space_separable_pairs=59 total_nonmonotone_pairs=59".to_string(),
        ]
    );
    println!("verification counts (gap cases, hard pair, k=5 sweep): pass");
}

#[test]
fn optimal_play_distributions() {
    // Frozen log10 bar heights (three decimals) per game length, with the
    // published support ranges and parities.
    let cases: [(usize, usize, usize, &[f64]); 6] = [
        (5, 10, 24, &[5.473, 9.055, 12.027, 14.168, 15.783, 16.680, 16.574, 16.162]),
        (6, 7, 23, &[3.932, 7.396, 9.861, 11.755, 13.271, 14.416, 15.072, 15.303, 13.961]),
        (
            7,
            4,
            24,
            &[1.204, 4.893, 7.681, 10.043, 12.042, 13.709, 15.077, 16.205, 17.110, 17.840, 18.051],
        ),
        (
            8,
            4,
            24,
            &[1.944, 5.132, 7.817, 9.976, 11.763, 13.342, 14.784, 16.037, 17.017, 17.755, 17.960],
        ),
        (
            9,
            4,
            24,
            &[2.265, 4.740, 7.078, 9.170, 10.997, 12.626, 14.081, 15.332, 16.314, 17.059, 17.269],
        ),
        (
            10,
            2,
            24,
            &[
                0.301, 2.966, 5.545, 7.980, 10.109, 11.972, 13.633, 15.114, 16.392, 17.390,
                18.145, 18.359,
            ],
        ),
    ];
    for (n, lo, hi, heights) in cases {
        let mut solver = Solver::new(n, 4).unwrap();
        let dist = solver.optimal_play_distribution();
        let lengths: Vec<usize> = dist.iter().map(|&(len, _)| len).collect();
        let expected_lengths: Vec<usize> = (lo..=hi).step_by(2).collect();
        assert_eq!(lengths, expected_lengths, "support at n={n}");
        for (&(len, count), &height) in dist.iter().zip(heights) {
            assert!(count > 0);
            let log = (count as f64).log10();
            assert!(
                (log - height).abs() <= 0.0005,
                "n={n} length {len}: log10({count}) = {log:.4}, expected {height:.3}"
            );
        }
    }
    // Spot-check one exact value: the two monotone-only lines of play at n=10.
    let mut solver = Solver::new(10, 4).unwrap();
    assert_eq!(solver.optimal_play_distribution()[0], (2, 2));
    println!("optimal-play distributions for n=5..10: pass");
}

#[test]
fn structural_properties() {
    // Containment is dihedral-equivariant.
    let patterns = all_perms(3);
    for pi in all_perms(5).iter().step_by(7) {
        for q in &patterns {
            for &sym in &DIHEDRAL {
                assert_eq!(
                    pi.apply_sym(sym).contains(&q.apply_sym(sym)),
                    pi.contains(q)
                );
            }
        }
    }

    // Grundy values are invariant under the dihedral action on pattern sets.
    let mut solver = Solver::new(6, 4).unwrap();
    for f in [0u32, 0x000009, 0x800001, 0x24a104, 0xfff00f, 0x1248ab] {
        let base = solver.grundy_mask(f);
        for &sym in &DIHEDRAL {
            let map = sym_rank_map(4, sym);
            let mut g = 0u32;
            for r in 0..24 {
                if f & (1 << r) != 0 {
                    g |= 1 << map[r];
                }
            }
            assert_eq!(solver.grundy_mask(g), base);
        }
    }

    // Shadows commute with reversal.
    for pi in all_perms(5).iter().step_by(11) {
        let direct: HashSet<Perm> = pi.reverse().shadow(3).unwrap().into_iter().collect();
        let mapped: HashSet<Perm> =
            pi.shadow(3).unwrap().into_iter().map(|q| q.reverse()).collect();
        assert_eq!(direct, mapped);
    }

    // Avoider sets are closed under deleting an entry.
    for text in ["132", "123,321", "231,312"] {
        let forbidden = PatternSet::parse_list(3, text).unwrap();
        for pi in &enumerate_avoiders(6, &forbidden).members {
            for i in 0..pi.len() {
                let mut vals: Vec<i64> =
                    pi.values().iter().map(|&v| v as i64).collect();
                vals.remove(i);
                let child = Perm::standardize(&vals).unwrap();
                for q in forbidden.iter_perms() {
                    assert!(child.avoids(&q));
                }
            }
        }
    }

    // Inflation shadows are stable for block size t >= k: all bases in S_6
    // for k=4, a strided sample of S_7 for k=5.
    let nonmono_shadow = |w: &Perm, k: usize| -> HashSet<Perm> {
        w.shadow(k)
            .unwrap()
            .into_iter()
            .filter(|q| !q.is_monotone())
            .collect()
    };
    for beta in all_perms(6) {
        for i in 1..=6 {
            for sign in [Sign::Plus, Sign::Minus] {
                let triple = InflationTriple::new(beta.clone(), i, sign).unwrap();
                let stable: HashSet<Perm> =
                    triple.stable_shadow(4).unwrap().patterns.iter_perms().collect();
                assert_eq!(nonmono_shadow(&triple.inflate(4).unwrap(), 4), stable);
                assert_eq!(nonmono_shadow(&triple.inflate(5).unwrap(), 4), stable);
            }
        }
    }
    for beta in all_perms(7).iter().step_by(97) {
        for i in [1, 4, 7] {
            for sign in [Sign::Plus, Sign::Minus] {
                let triple = InflationTriple::new(beta.clone(), i, sign).unwrap();
                let stable: HashSet<Perm> =
                    triple.stable_shadow(5).unwrap().patterns.iter_perms().collect();
                assert_eq!(nonmono_shadow(&triple.inflate(5).unwrap(), 5), stable);
                assert_eq!(nonmono_shadow(&triple.inflate(6).unwrap(), 5), stable);
            }
        }
    }

    // Witness families, the recursive B_k characterization, the quadratic
    // constructions, and the LIS/LDS bounds on the enumerated avoiders.
    assert!(verify_witnesses(12));
    assert!(verify_recursive_bk_range(4, 7).iter().all(|&(_, ok)| ok));
    assert!(verify_bounds(6, 13));
    for k in 4..=7 {
        let bk = build_bk(k).unwrap();
        assert_eq!(bk.members.len(), 8);
    }
    println!("structural property suites: pass");
}
