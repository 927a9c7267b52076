//! Level-k truncation harness: restricts the spectral family to the
//! banded charts T^(k) and measures independence, Poisson rank, and
//! Casimir identification there.
//!
//! The level-k behaviour is conjectural territory: this module reports
//! findings (consistent or inconsistent with the expected counts) and
//! never hard-asserts them outside of the reproduced reference cases.

use num_traits::Zero;
use serde::Serialize;

use crate::bracket::{bracket_pair, hamiltonian_vector_field, poisson_matrix, structure_constants};
use crate::error::{Error, Result};
use crate::lax::{family_jacobian, family_values_at_point, flat_extract, InvariantFamily, RepMats};
use crate::mat::Mat;
use crate::phasespace::{CoordId, PhaseSpace};
use crate::rankcheck::exact_rank;
use crate::rep::ChevalleyRep;
use crate::rootsys::RootSystem;
use crate::sample::{random_point, seeded_rng};
use crate::scalar::{qi, Q};

/// The level-k subfamily: restrictions of F_{j,i} to T^(k).
///
/// The strict index set follows the floor rule
/// 1 ≤ j ≤ ⌊k(m_i + 1)/(m_ℓ + 1)⌋; the augmented set adds j = 0 for
/// every i, which is what the action-variable counting uses.
#[derive(Debug, Clone, Serialize)]
pub struct TkFamily {
    pub k: usize,
    /// Strict indices (i, j), i ascending then j.
    pub strict: Vec<(usize, usize)>,
    /// Strict plus the j = 0 member of every generator.
    pub augmented: Vec<(usize, usize)>,
}

/// Builds the level-k index sets.
pub fn tk_family(rs: &RootSystem, k: usize) -> Result<TkFamily> {
    let m_top = rs.m_top();
    if k < 1 || k > m_top {
        return Err(Error::LevelOutOfRange { k, max: m_top });
    }
    let fam = InvariantFamily::build(rs)?;
    let mut strict = Vec::new();
    let mut augmented = Vec::new();
    for mem in fam.members() {
        let bound = k * (mem.m + 1) / (m_top + 1);
        augmented.push((mem.index, 0));
        for j in 1..=bound {
            strict.push((mem.index, j));
            augmented.push((mem.index, j));
        }
    }
    Ok(TkFamily {
        k,
        strict,
        augmented,
    })
}

impl TkFamily {
    /// Values of the strict members at a T^(k) point.
    pub fn strict_values(
        &self,
        rs: &RootSystem,
        rm: &RepMats<Q>,
        fam: &InvariantFamily,
        band: &PhaseSpace,
        point: &[Q],
    ) -> Result<Vec<Q>> {
        let values = family_values_at_point(rs, rm, fam, band, point)?;
        let flat = flat_extract(fam, &values);
        self.strict
            .iter()
            .map(|&(i, j)| {
                fam.flat_row(i, j)
                    .map(|r| flat[r].clone())
                    .ok_or_else(|| Error::Internal(format!("missing family member F[{j},{i}]")))
            })
            .collect()
    }
}

/// Findings for one (algebra, k) case.
#[derive(Debug, Clone, Serialize)]
pub struct TkReport {
    pub algebra: String,
    pub k: usize,
    pub trials: usize,
    /// Dimension of the T^(k) chart.
    pub dim_tk: usize,
    pub strict_size: usize,
    pub augmented_size: usize,
    pub strict_labels: Vec<String>,
    /// Generic Jacobian rank of the strict subfamily on T^(k).
    pub independence_rank_strict: usize,
    /// Generic Jacobian rank with the j = 0 members included.
    pub independence_rank_augmented: usize,
    /// Ranks at the height-pattern special point.
    pub special_rank_strict: usize,
    pub special_rank_augmented: usize,
    /// Generic rank of the induced Poisson matrix on T^(k).
    pub poisson_rank: usize,
    /// Members of the augmented family whose Hamiltonian field vanished
    /// at every sampled point.
    pub casimirs: Vec<String>,
    /// The same members with the two subscripts swapped in the label.
    pub casimirs_index_flipped: Vec<String>,
    /// Members whose Jacobian row was zero at every sampled point: their
    /// restriction to T^(k) is a constant, so they cannot contribute to
    /// any independence count.
    pub constant_members: Vec<String>,
    /// Strict members left after removing constant ones are independent.
    pub live_independent_strict: bool,
    /// Same for the augmented family.
    pub live_independent_augmented: bool,
    /// augmented_size == dim_tk − poisson_rank/2.
    pub liouville_pass: bool,
    /// Liouville counting with constant members excluded.
    pub liouville_live: bool,
    /// Full-chart brackets of T^(k) coordinates agree with the induced
    /// ones at embedded points.
    pub submanifold_pass: bool,
    /// Every independence and counting finding matched the expectation.
    pub consistent: bool,
}

/// The height-pattern test point: lowering coordinates of height exactly
/// k and raising coordinates of height exactly m_ℓ + 1 − k get distinct
/// small primes; everything else is zero.
pub fn tk_special_point(rs: &RootSystem, band: &PhaseSpace, k: usize) -> Vec<Q> {
    let mut point = vec![Q::zero(); band.dim()];
    let mut next = primes_iter();
    for (g, root) in rs.positives().iter().enumerate() {
        if root.height() == k as i64 {
            if let Some(idx) = band.index_of(CoordId::lower(g)) {
                point[idx] = qi(next.next().unwrap());
            }
        }
    }
    let co_height = (rs.m_top() + 1 - k) as i64;
    for (g, root) in rs.positives().iter().enumerate() {
        if root.height() == co_height {
            if let Some(idx) = band.index_of(CoordId::upper(g)) {
                point[idx] = qi(next.next().unwrap());
            }
        }
    }
    point
}

fn primes_iter() -> impl Iterator<Item = i64> {
    (2i64..).filter(|n| {
        let mut d = 2;
        while d * d <= *n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    })
}

/// Runs the full level-k measurement at `trials` random points of T^(k)
/// plus the special point, and assembles the findings.
pub fn tk_check(rs: &RootSystem, k: usize, trials: usize, seed: u64) -> Result<TkReport> {
    let tkf = tk_family(rs, k)?;
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let sc = structure_constants(rs)?;
    let fam = InvariantFamily::build(rs)?;
    let band = PhaseSpace::make(rs, k)?;
    let full = PhaseSpace::full(rs);
    let mut rng = seeded_rng(seed);

    let rows_of = |list: &[(usize, usize)]| -> Result<Vec<usize>> {
        list.iter()
            .map(|&(i, j)| {
                fam.flat_row(i, j)
                    .ok_or_else(|| Error::Internal(format!("missing family member F[{j},{i}]")))
            })
            .collect()
    };
    let strict_rows = rows_of(&tkf.strict)?;
    let aug_rows = rows_of(&tkf.augmented)?;

    let sub_rank = |jac: &Mat<Q>, rows: &[usize]| -> usize {
        if rows.is_empty() {
            return 0;
        }
        let sub = Mat::from_fn(rows.len(), jac.cols(), |r, c| jac[(rows[r], c)].clone());
        exact_rank(&sub)
    };

    let mut rank_strict = 0usize;
    let mut rank_aug = 0usize;
    let mut poisson_rank = 0usize;
    // Casimir candidates: intersected over points, so start with all.
    let mut casimir_mask: Vec<bool> = vec![true; aug_rows.len()];
    // Constant candidates likewise: a member stays here only if its
    // Jacobian row is zero at every sampled point.
    let mut constant_mask: Vec<bool> = vec![true; aug_rows.len()];
    let mut submanifold_pass = true;

    let trials = trials.max(1);
    for trial in 0..trials {
        let point = random_point(band.dim(), &mut rng);
        let jac = family_jacobian(rs, &rm, &fam, &band, &point)?;
        rank_strict = rank_strict.max(sub_rank(&jac, &strict_rows));
        rank_aug = rank_aug.max(sub_rank(&jac, &aug_rows));
        let pm = poisson_matrix(rs, &sc, &band, &point)?;
        poisson_rank = poisson_rank.max(exact_rank(&pm.mat));
        for (pos, &row) in aug_rows.iter().enumerate() {
            if constant_mask[pos] && (0..band.dim()).any(|c| !jac[(row, c)].is_zero()) {
                constant_mask[pos] = false;
            }
            if !casimir_mask[pos] {
                continue;
            }
            let grad: Vec<Q> = (0..band.dim()).map(|c| jac[(row, c)].clone()).collect();
            let field = hamiltonian_vector_field(rs, &sc, &band, &point, &grad)?;
            if field.iter().any(|v| !v.is_zero()) {
                casimir_mask[pos] = false;
            }
        }
        // Poisson-submanifold property: the induced bracket of two band
        // coordinates agrees with the ambient bracket at embedded points.
        if trial == 0 {
            let embedded = band.embed_into(&full, &point)?;
            'pairs: for a in 0..band.dim() {
                for b in (a + 1)..band.dim() {
                    let ca = band.coords()[a];
                    let cb = band.coords()[b];
                    let induced = bracket_pair(rs, &sc, &band, ca, cb, &point)?;
                    let ambient = bracket_pair(rs, &sc, &full, ca, cb, &embedded)?;
                    if induced != ambient {
                        submanifold_pass = false;
                        break 'pairs;
                    }
                }
            }
        }
    }

    let special = tk_special_point(rs, &band, k);
    let sjac = family_jacobian(rs, &rm, &fam, &band, &special)?;
    let special_rank_strict = sub_rank(&sjac, &strict_rows);
    let special_rank_aug = sub_rank(&sjac, &aug_rows);

    let casimirs: Vec<String> = tkf
        .augmented
        .iter()
        .zip(casimir_mask.iter())
        .filter(|(_, &keep)| keep)
        .map(|(&(i, j), _)| InvariantFamily::label(i, j))
        .collect();
    let casimirs_flipped: Vec<String> = tkf
        .augmented
        .iter()
        .zip(casimir_mask.iter())
        .filter(|(_, &keep)| keep)
        .map(|(&(i, j), _)| format!("F[{i},{j}]"))
        .collect();
    let constant_members: Vec<String> = tkf
        .augmented
        .iter()
        .zip(constant_mask.iter())
        .filter(|(_, &keep)| keep)
        .map(|(&(i, j), _)| InvariantFamily::label(i, j))
        .collect();

    // Constant members contribute zero Jacobian rows, so the measured
    // ranks already equal the live-family ranks; only the head counts
    // change when constants are excluded.
    let strict_set: std::collections::HashSet<(usize, usize)> =
        tkf.strict.iter().copied().collect();
    let n_const_strict = tkf
        .augmented
        .iter()
        .zip(constant_mask.iter())
        .filter(|(idx, &keep)| keep && strict_set.contains(idx))
        .count();
    let n_const_aug = constant_mask.iter().filter(|&&keep| keep).count();
    let live_independent_strict = rank_strict == tkf.strict.len() - n_const_strict;
    let live_independent_augmented = rank_aug == tkf.augmented.len() - n_const_aug;

    let liouville_pass = poisson_rank.is_multiple_of(2)
        && tkf.augmented.len() == band.dim().saturating_sub(poisson_rank / 2);
    let liouville_live = poisson_rank.is_multiple_of(2)
        && tkf.augmented.len() - n_const_aug == band.dim().saturating_sub(poisson_rank / 2);
    let consistent = rank_strict == tkf.strict.len()
        && rank_aug == tkf.augmented.len()
        && liouville_pass
        && submanifold_pass;

    Ok(TkReport {
        algebra: rs.algebra().to_string(),
        k,
        trials,
        dim_tk: band.dim(),
        strict_size: tkf.strict.len(),
        augmented_size: tkf.augmented.len(),
        strict_labels: tkf
            .strict
            .iter()
            .map(|&(i, j)| InvariantFamily::label(i, j))
            .collect(),
        independence_rank_strict: rank_strict,
        independence_rank_augmented: rank_aug,
        special_rank_strict,
        special_rank_augmented: special_rank_aug,
        poisson_rank,
        casimirs,
        casimirs_index_flipped: casimirs_flipped,
        constant_members,
        live_independent_strict,
        live_independent_augmented,
        liouville_pass,
        liouville_live,
        submanifold_pass,
        consistent,
    })
}
