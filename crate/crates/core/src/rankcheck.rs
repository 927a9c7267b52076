//! Rank certificates at the special point L_0(λ).
//!
//! The certificate mirrors the classical computer-algebra verification:
//! assign nonzero constants b_1..b_ℓ, build Λ_0 = diag(b)·C and the
//! height-transition blocks Λ_k (entry (i,j) = b_p when the height-(k+1)
//! root γ^{(k+1)}_j minus the height-k root γ^{(k)}_i is the simple root
//! α_p), and certify rank(Λ_0) = ℓ, rank(Λ_k) = d_{k+1}, and that the
//! assembled antisymmetric matrix M has rank dim g − ℓ. All ranks are
//! exact over the rationals.
//!
//! Entries are sign-free: the certificate is insensitive to the signs of
//! the structure constants because full column rank is certified per
//! block. A randomized ±1 sign assignment is available as a robustness
//! option, and the bracket module provides the honestly-signed Poisson
//! matrix for classical types as an independent route.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rootsys::RootSystem;
use crate::scalar::{qi, Q};

/// The generic constants b_1..b_ℓ of L_0(λ).
#[derive(Debug, Clone)]
pub struct GenericParams {
    b: Vec<Q>,
}

impl GenericParams {
    pub fn new(b: Vec<Q>) -> Result<GenericParams> {
        if b.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidInput(
                "generic parameters b must all be nonzero".to_string(),
            ));
        }
        Ok(GenericParams { b })
    }

    /// First ℓ primes: the default generic assignment.
    pub fn primes(l: usize) -> GenericParams {
        GenericParams {
            b: first_primes(2 * l)[..l].iter().map(|&p| qi(p)).collect(),
        }
    }

    /// Primes ℓ+1 .. 2ℓ: the cross-check assignment guarding against a
    /// coincidental cancellation under the first one.
    pub fn shifted_primes(l: usize) -> GenericParams {
        GenericParams {
            b: first_primes(2 * l)[l..].iter().map(|&p| qi(p)).collect(),
        }
    }

    pub fn b(&self) -> &[Q] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

pub fn first_primes(n: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    let mut c: i64 = 2;
    while out.len() < n {
        if out.iter().all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Λ_0 = diag(b) · C.
pub fn lambda0(rs: &RootSystem, b: &GenericParams) -> Mat<Q> {
    let l = rs.rank();
    assert_eq!(b.len(), l, "b must have one entry per simple root");
    Mat::from_fn(l, l, |i, j| b.b()[i].clone() * qi(rs.cartan()[i][j]))
}

/// The d_k × d_{k+1} height-transition block.
#[derive(Debug, Clone)]
pub struct LambdaBlock {
    pub k: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub mat: Mat<Q>,
}

/// Builds Λ_k: rows over height-k roots, columns over height-(k+1) roots,
/// entry (i,j) = b_p exactly when col_j − row_i = α_p.
pub fn lambda_block(rs: &RootSystem, k: usize, b: &GenericParams) -> Result<LambdaBlock> {
    let max = rs.m_top().saturating_sub(1);
    if k < 1 || k > max {
        return Err(Error::LevelOutOfRange { k, max });
    }
    let rows = rs.roots_of_height(k);
    let cols = rs.roots_of_height(k + 1);
    let l = rs.rank();
    let mat = Mat::from_fn(rows.len(), cols.len(), |i, j| {
        let gi = &rs.positives()[rows[i]];
        let bj = &rs.positives()[cols[j]];
        let mut simple: Option<usize> = None;
        for p in 0..l {
            let is_alpha_p = (0..l).all(|t| bj.coeffs[t] - gi.coeffs[t] == i64::from(t == p));
            if is_alpha_p {
                simple = Some(p);
                break;
            }
        }
        match simple {
            Some(p) => b.b()[p].clone(),
            None => Q::zero(),
        }
    });
    // Every height-(k+1) root splits off a simple root, so no zero column.
    for j in 0..cols.len() {
        if (0..rows.len()).all(|i| mat[(i, j)].is_zero()) {
            return Err(Error::Internal(format!(
                "Lambda_{k} has a zero column at height-{} root index {}",
                k + 1,
                cols[j]
            )));
        }
    }
    Ok(LambdaBlock { k, rows, cols, mat })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockRankEntry {
    pub k: usize,
    pub d_k: usize,
    pub d_k1: usize,
    pub rank: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockRankReport {
    pub algebra: String,
    pub lambda0_rank: usize,
    pub lambda0_pass: bool,
    pub blocks: Vec<BlockRankEntry>,
    pub pass: bool,
}

/// Certifies rank(Λ_0) = ℓ and rank(Λ_k) = d_{k+1} for k = 1..m_ℓ−1.
pub fn verify_block_ranks(rs: &RootSystem, b: &GenericParams) -> Result<BlockRankReport> {
    let l = rs.rank();
    let r0 = exact_rank(&lambda0(rs, b));
    let lambda0_pass = r0 == l;
    let mut blocks = Vec::new();
    let mut pass = lambda0_pass;
    for k in 1..rs.m_top() {
        let blk = lambda_block(rs, k, b)?;
        let rank = exact_rank(&blk.mat);
        let entry = BlockRankEntry {
            k,
            d_k: rs.d(k),
            d_k1: rs.d(k + 1),
            rank,
            pass: rank == rs.d(k + 1),
        };
        pass &= entry.pass;
        blocks.push(entry);
    }
    Ok(BlockRankReport {
        algebra: rs.algebra().to_string(),
        lambda0_rank: r0,
        lambda0_pass,
        blocks,
        pass,
    })
}

/// Assembles the rectangular Λ of the block certificate:
/// blockdiag(Λ_0, Λ_1ᵀ, …, Λ_{m−1}ᵀ) padded with one zero column, of shape
/// (dim g − ℓ)/2 × (dim g + ℓ)/2.
pub fn assemble_lambda(rs: &RootSystem, b: &GenericParams) -> Result<Mat<Q>> {
    let l = rs.rank();
    let n = rs.n_positive();
    let mut lam: Mat<Q> = Mat::zeros(n, n + l);
    lam.set_block(0, 0, &lambda0(rs, b));
    let mut r0 = l;
    let mut c0 = l;
    for k in 1..rs.m_top() {
        let blk = lambda_block(rs, k, b)?;
        let t = blk.mat.transpose();
        lam.set_block(r0, c0, &t);
        r0 += t.rows();
        c0 += t.cols();
    }
    debug_assert_eq!(r0, n);
    debug_assert_eq!(c0, n + l - 1);
    Ok(lam)
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonRankResult {
    pub rank: usize,
    pub expected: usize,
    pub pass: bool,
}

/// Exact rank of M = [[0, −Λᵀ], [Λ, 0]] at L_0; pass ⇔ rank = dim g − ℓ.
pub fn poisson_rank_at_l0(rs: &RootSystem, b: &GenericParams) -> Result<PoissonRankResult> {
    let lam = assemble_lambda(rs, b)?;
    let (n, m) = (lam.rows(), lam.cols());
    let mut big: Mat<Q> = Mat::zeros(n + m, n + m);
    big.set_block(0, m, &lam.transpose().neg());
    big.set_block(m, 0, &lam);
    let rank = exact_rank(&big);
    let expected = rs.dim() - rs.rank();
    Ok(PoissonRankResult {
        rank,
        expected,
        pass: rank == expected,
    })
}

/// Robustness variant: multiplies every nonzero block entry by an
/// independent random ±1 before ranking. The certificate is monomial-based
/// so the ranks must be unchanged.
pub fn verify_block_ranks_signed(
    rs: &RootSystem,
    b: &GenericParams,
    rng: &mut impl Rng,
) -> Result<BlockRankReport> {
    let mut flip = |m: &Mat<Q>| -> Mat<Q> {
        Mat::from_fn(m.rows(), m.cols(), |i, j| {
            let v = m[(i, j)].clone();
            if v.is_zero() {
                v
            } else if rng.random::<bool>() {
                -v
            } else {
                v
            }
        })
    };
    let l = rs.rank();
    let r0 = exact_rank(&flip(&lambda0(rs, b)));
    let lambda0_pass = r0 == l;
    let mut blocks = Vec::new();
    let mut pass = lambda0_pass;
    for k in 1..rs.m_top() {
        let blk = lambda_block(rs, k, b)?;
        let rank = exact_rank(&flip(&blk.mat));
        let entry = BlockRankEntry {
            k,
            d_k: rs.d(k),
            d_k1: rs.d(k + 1),
            rank,
            pass: rank == rs.d(k + 1),
        };
        pass &= entry.pass;
        blocks.push(entry);
    }
    Ok(BlockRankReport {
        algebra: rs.algebra().to_string(),
        lambda0_rank: r0,
        lambda0_pass,
        blocks,
        pass,
    })
}

/// Exact rank over the rationals.
///
/// Rows are cleared to big integers, then eliminated fraction-free: the
/// update is the cross-multiplication a_rc·a_ij − a_ic·a_rj with each
/// produced row divided by its gcd. Only rows with a nonzero entry in the
/// pivot column are touched, which keeps block-sparse inputs (the L_0
/// matrices) near-linear instead of cubic.
pub fn exact_rank(m: &Mat<Q>) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let mut lcm = BigInt::one();
            for c in 0..cols {
                lcm = lcm.lcm(m[(r, c)].denom());
            }
            (0..cols)
                .map(|c| {
                    let v = &m[(r, c)];
                    v.numer() * (&lcm / v.denom())
                })
                .collect()
        })
        .collect();

    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            let mut g = BigInt::zero();
            for j in 0..cols {
                row[j] = &pivot * &row[j] - &factor * &pivot_row[j];
                if !row[j].is_zero() {
                    g = g.gcd(&row[j]);
                }
            }
            if !g.is_zero() && !g.is_one() {
                for v in row.iter_mut() {
                    *v = &*v / &g;
                }
            }
            debug_assert!(row[c].is_zero());
        }
        rank += 1;
        r += 1;
    }
    rank
}

/// Rank of a square or rectangular rational matrix modulo the prime p.
///
/// A full-rank result is a certificate for the rational rank (a nonzero
/// minor mod p is nonzero over Q); a deficient result is only a hint and
/// callers escalate to `exact_rank`.
pub fn rank_mod_p(m: &Mat<Q>, p: u64) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let red = |x: &Q| -> u64 {
        let num = x.numer().mod_floor(&BigInt::from(p));
        let den = x.denom().mod_floor(&BigInt::from(p));
        let num: u64 = num.try_into().expect("reduced numerator fits u64");
        let den: u64 = den.try_into().expect("reduced denominator fits u64");
        assert!(den != 0, "denominator divisible by p; pick another prime");
        mulmod(num, powmod(den, p - 2, p), p)
    };
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|r| (0..cols).map(|c| red(&m[(r, c)])).collect())
        .collect();
    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = powmod(a[r][c], p - 2, p);
        for i in (r + 1)..rows {
            if a[i][c] == 0 {
                continue;
            }
            let f = mulmod(a[i][c], inv, p);
            // Reads row r while writing row i; split borrows would
            // obscure the elimination step.
            #[allow(clippy::needless_range_loop)]
            for j in c..cols {
                let sub = mulmod(f, a[r][j], p);
                a[i][j] = (a[i][j] + p - sub) % p;
            }
        }
        rank += 1;
        r += 1;
    }
    rank
}

pub const RANK_WITNESS_PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}
