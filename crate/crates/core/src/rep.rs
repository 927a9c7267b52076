//! Defining matrix representations of the classical simple Lie algebras
//! with a Chevalley-normalized root-vector basis.
//!
//! Simple generators are the standard ones: elementary matrices for
//! sl(ℓ+1), and the anti-diagonal-form realizations of so(2ℓ+1), sp(2ℓ)
//! and so(2ℓ) keyed by i ↦ i' = n+1−i. Root vectors for non-simple
//! heights are produced by the extraspecial-pair recursion
//! e_γ = [e_p, e_δ]/(q+1), which forces N_{α_p,δ} = +(q+1) and makes all
//! remaining structure constants ±(string length + 1). Negative vectors
//! are normalized against the coroot: [e_γ, f_γ] = h_γ with γ(h_γ) = 2.
//!
//! The trace form tr(XY) is the invariant pairing throughout. The
//! per-root pairing s_γ = tr(e_γ f_γ) is recorded so coordinate
//! functionals can be normalized to ⟨e_γ, e_{−γ}⟩ = 1 without disturbing
//! the Chevalley basis itself.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rootsys::{Family, RootSystem};
use crate::scalar::{qi, Q};

/// A classical algebra realized by explicit matrices.
#[derive(Debug, Clone)]
pub struct ChevalleyRep {
    n: usize,
    h: Vec<Mat<Q>>,
    hhat: Vec<Mat<Q>>,
    e: Vec<Mat<Q>>,
    f: Vec<Mat<Q>>,
    pairing: Vec<Q>,
    form: Option<Mat<Q>>,
}

fn elem(n: usize, i: usize, j: usize) -> Mat<Q> {
    // 1-based indices, matching the classical conventions.
    let mut m = Mat::zeros(n, n);
    m[(i - 1, j - 1)] = qi(1);
    m
}

/// Matrix size, raising generators, and preserved bilinear form (None
/// for sl) of the defining representation.
type DefiningGenerators = (usize, Vec<Mat<Q>>, Option<Mat<Q>>);

/// Positive-root generators of the defining representation, plus the
/// bilinear form they preserve (None for sl).
fn simple_generators(rs: &RootSystem) -> Result<DefiningGenerators> {
    let l = rs.rank();
    match rs.algebra().family() {
        Family::A => {
            let n = l + 1;
            let e = (1..=l).map(|i| elem(n, i, i + 1)).collect();
            Ok((n, e, None))
        }
        Family::B => {
            let n = 2 * l + 1;
            let mut e: Vec<Mat<Q>> = (1..l)
                .map(|i| elem(n, i, i + 1).sub(&elem(n, n - i, n + 1 - i)))
                .collect();
            e.push(elem(n, l, l + 1).sub(&elem(n, l + 1, l + 2)));
            let s = Mat::from_fn(n, n, |r, c| if r + c == n - 1 { qi(1) } else { qi(0) });
            Ok((n, e, Some(s)))
        }
        Family::C => {
            let n = 2 * l;
            let mut e: Vec<Mat<Q>> = (1..l)
                .map(|i| elem(n, i, i + 1).sub(&elem(n, n - i, n + 1 - i)))
                .collect();
            e.push(elem(n, l, l + 1));
            let j = Mat::from_fn(n, n, |r, c| {
                if r + c == n - 1 {
                    if r < l {
                        qi(1)
                    } else {
                        qi(-1)
                    }
                } else {
                    qi(0)
                }
            });
            Ok((n, e, Some(j)))
        }
        Family::D => {
            let n = 2 * l;
            let mut e: Vec<Mat<Q>> = (1..l)
                .map(|i| elem(n, i, i + 1).sub(&elem(n, n - i, n + 1 - i)))
                .collect();
            e.push(elem(n, l - 1, l + 1).sub(&elem(n, l, l + 2)));
            let s = Mat::from_fn(n, n, |r, c| if r + c == n - 1 { qi(1) } else { qi(0) });
            Ok((n, e, Some(s)))
        }
        _ => Err(Error::UnsupportedType {
            what: format!("matrix realization of {}", rs.algebra()),
        }),
    }
}

/// Given e spanning g_γ and a nonzero w spanning g_{−γ}, rescales w so
/// that h := [e, w] satisfies [h, e] = 2e, returning (f, h).
fn normalize_against_coroot(e: &Mat<Q>, w: &Mat<Q>) -> Result<(Mat<Q>, Mat<Q>)> {
    let h = e.commutator(w);
    let he = h.commutator(e);
    // he = γ(h)·e; read the ratio off any nonzero entry of e.
    let mut ratio: Option<Q> = None;
    'outer: for r in 0..e.rows() {
        for c in 0..e.cols() {
            if !e[(r, c)].is_zero() {
                ratio = Some(he[(r, c)].clone() / e[(r, c)].clone());
                break 'outer;
            }
        }
    }
    let s = ratio.ok_or_else(|| Error::Internal("zero root vector".to_string()))?;
    if s.is_zero() {
        return Err(Error::Internal(
            "degenerate pairing while normalizing a coroot".to_string(),
        ));
    }
    if he != e.scale(&s) {
        return Err(Error::Internal(
            "[ [e,w], e ] is not proportional to e".to_string(),
        ));
    }
    let f = w.scale(&(qi(2) / s));
    let h = e.commutator(&f);
    Ok((f, h))
}

impl ChevalleyRep {
    pub fn build(rs: &RootSystem) -> Result<ChevalleyRep> {
        let l = rs.rank();
        let np = rs.n_positive();
        let (n, simple_e, form) = simple_generators(rs)?;

        let mut e: Vec<Option<Mat<Q>>> = vec![None; np];
        let mut f: Vec<Option<Mat<Q>>> = vec![None; np];
        let mut h: Vec<Mat<Q>> = Vec::with_capacity(l);
        for (i, ei) in simple_e.into_iter().enumerate() {
            let w = ei.transpose();
            let (fi, hi) = normalize_against_coroot(&ei, &w)?;
            e[i] = Some(ei);
            f[i] = Some(fi);
            h.push(hi);
        }

        // Non-simple roots by increasing height via extraspecial pairs.
        for idx in l..np {
            let gamma = &rs.positives()[idx];
            let (p, delta_idx) = extraspecial_pair(rs, idx)?;
            let q = chain_down(rs, delta_idx, p);
            let scale = qi(1) / qi(i64::try_from(q + 1).unwrap());
            let ep = e[p].as_ref().unwrap();
            let ed = e[delta_idx].as_ref().unwrap();
            let eg = ep.commutator(ed).scale(&scale);
            if eg.is_zero_matrix() {
                return Err(Error::Internal(format!(
                    "vanishing commutator for root {:?}",
                    gamma.coeffs
                )));
            }
            let fp = f[p].as_ref().unwrap();
            let fd = f[delta_idx].as_ref().unwrap();
            let w = fp.commutator(fd);
            let (fg, _hg) = normalize_against_coroot(&eg, &w)?;
            e[idx] = Some(eg);
            f[idx] = Some(fg);
        }

        let e: Vec<Mat<Q>> = e.into_iter().map(Option::unwrap).collect();
        let f: Vec<Mat<Q>> = f.into_iter().map(Option::unwrap).collect();
        let pairing: Vec<Q> = e
            .iter()
            .zip(&f)
            .map(|(eg, fg)| eg.matmul(fg).trace())
            .collect();
        if pairing.iter().any(|s| s.is_zero()) {
            return Err(Error::Internal("trace pairing degenerated".to_string()));
        }

        let gram = Mat::from_fn(l, l, |i, j| h[i].matmul(&h[j]).trace());
        let ginv = gram
            .inverse()
            .ok_or_else(|| Error::Internal("Cartan Gram matrix singular".to_string()))?;
        let hhat: Vec<Mat<Q>> = (0..l)
            .map(|i| {
                let mut acc: Mat<Q> = Mat::zeros(n, n);
                for j in 0..l {
                    acc = acc.add(&h[j].scale(&ginv[(i, j)]));
                }
                acc
            })
            .collect();

        Ok(ChevalleyRep {
            n,
            h,
            hhat,
            e,
            f,
            pairing,
            form,
        })
    }

    /// Size of the defining representation.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coroot matrix h_i.
    pub fn h(&self, i: usize) -> &Mat<Q> {
        &self.h[i]
    }

    /// Trace-dual basis of the coroots: tr(ĥ_i h_j) = δ_ij.
    pub fn hhat(&self, i: usize) -> &Mat<Q> {
        &self.hhat[i]
    }

    /// Root vector e_γ for the positive root with global index idx.
    pub fn e(&self, idx: usize) -> &Mat<Q> {
        &self.e[idx]
    }

    /// Negative vector f_γ normalized by [e_γ, f_γ] = h_γ.
    pub fn f(&self, idx: usize) -> &Mat<Q> {
        &self.f[idx]
    }

    /// Trace pairing s_γ = tr(e_γ f_γ).
    pub fn pairing(&self, idx: usize) -> &Q {
        &self.pairing[idx]
    }

    /// Pairing-normalized negative vector f_γ / s_γ, the direction dual
    /// to the coordinate functional ⟨e_γ, ·⟩.
    pub fn f_unit(&self, idx: usize) -> Mat<Q> {
        self.f[idx].scale(&(qi(1) / self.pairing[idx].clone()))
    }

    /// The invariant bilinear form (None for sl, where g = sl itself).
    pub fn form(&self) -> Option<&Mat<Q>> {
        self.form.as_ref()
    }
}

/// The extraspecial decomposition γ = α_p + δ with p minimal.
fn extraspecial_pair(rs: &RootSystem, idx: usize) -> Result<(usize, usize)> {
    let gamma = &rs.positives()[idx];
    for p in 0..rs.rank() {
        let mut rest = gamma.coeffs.clone();
        rest[p] -= 1;
        if let Some(d) = rs.position_of(&rest) {
            return Ok((p, d));
        }
    }
    Err(Error::Internal(format!(
        "no simple summand for root {:?}",
        gamma.coeffs
    )))
}

/// Length q of the α_p-chain below δ: max{n ≥ 0 : δ − n·α_p ∈ Φ}.
fn chain_down(rs: &RootSystem, delta_idx: usize, p: usize) -> usize {
    let delta = &rs.positives()[delta_idx];
    let mut q = 0;
    loop {
        let mut v = delta.coeffs.clone();
        v[p] -= (q + 1) as i64;
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        if rs.position_of(&v).is_some() || rs.position_of(&neg).is_some() {
            q += 1;
        } else {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::AlgebraType;

    fn rep_of(f: Family, l: usize) -> (RootSystem, ChevalleyRep) {
        let rs = RootSystem::build(AlgebraType::new(f, l).unwrap()).unwrap();
        let rep = ChevalleyRep::build(&rs).unwrap();
        (rs, rep)
    }

    const CASES: [(Family, usize); 9] = [
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 4),
        (Family::B, 2),
        (Family::B, 3),
        (Family::C, 2),
        (Family::C, 3),
        (Family::D, 3),
        (Family::D, 4),
    ];

    #[test]
    fn exceptional_types_rejected() {
        let rs = RootSystem::build(AlgebraType::new(Family::G, 2).unwrap()).unwrap();
        assert!(matches!(
            ChevalleyRep::build(&rs),
            Err(Error::UnsupportedType { .. })
        ));
    }

    #[test]
    fn simple_triples() {
        for (fam, l) in CASES {
            let (rs, rep) = rep_of(fam, l);
            for i in 0..l {
                for j in 0..l {
                    let b = rep.e(i).commutator(rep.f(j));
                    if i == j {
                        assert_eq!(&b, rep.h(i), "{fam:?}{l} [e_{i},f_{i}]");
                    } else {
                        assert!(b.is_zero_matrix(), "{fam:?}{l} [e_{i},f_{j}]");
                    }
                    // [h_i, e_j] = α_j(h_i) e_j with α_j(h_i) = c_{ji}.
                    let he = rep.h(i).commutator(rep.e(j));
                    let c = qi(rs.cartan()[j][i]);
                    assert_eq!(he, rep.e(j).scale(&c), "{fam:?}{l} [h_{i},e_{j}]");
                    let hf = rep.h(i).commutator(rep.f(j));
                    assert_eq!(hf, rep.f(j).scale(&(-c)), "{fam:?}{l} [h_{i},f_{j}]");
                }
            }
        }
    }

    #[test]
    fn root_vectors_have_correct_weights() {
        for (fam, l) in CASES {
            let (rs, rep) = rep_of(fam, l);
            for idx in 0..rs.n_positive() {
                let gamma = &rs.positives()[idx];
                for i in 0..l {
                    let w = qi(rs.pairing(&gamma.coeffs, i));
                    assert_eq!(
                        rep.h(i).commutator(rep.e(idx)),
                        rep.e(idx).scale(&w),
                        "{fam:?}{l} weight of e at {:?}",
                        gamma.coeffs
                    );
                    assert_eq!(
                        rep.h(i).commutator(rep.f(idx)),
                        rep.f(idx).scale(&(-w)),
                        "{fam:?}{l} weight of f at {:?}",
                        gamma.coeffs
                    );
                }
            }
        }
    }

    #[test]
    fn coroot_normalization_holds_for_every_root() {
        for (fam, l) in CASES {
            let (rs, rep) = rep_of(fam, l);
            for idx in 0..rs.n_positive() {
                let hg = rep.e(idx).commutator(rep.f(idx));
                let back = hg.commutator(rep.e(idx));
                assert_eq!(
                    back,
                    rep.e(idx).scale(&qi(2)),
                    "{fam:?}{l} γ(h_γ) ≠ 2 at root {idx}"
                );
            }
        }
    }

    #[test]
    fn bilinear_form_is_preserved() {
        for (fam, l) in CASES {
            let (rs, rep) = rep_of(fam, l);
            let Some(s) = rep.form() else {
                assert_eq!(fam, Family::A);
                continue;
            };
            let mut basis: Vec<&Mat<Q>> = Vec::new();
            for i in 0..l {
                basis.push(rep.h(i));
            }
            for idx in 0..rs.n_positive() {
                basis.push(rep.e(idx));
                basis.push(rep.f(idx));
            }
            for x in basis {
                let lhs = x.transpose().matmul(s).add(&s.matmul(x));
                assert!(lhs.is_zero_matrix(), "{fam:?}{l} X^T S + S X ≠ 0");
            }
        }
    }

    #[test]
    fn trace_orthogonality() {
        for (fam, l) in CASES {
            let (rs, rep) = rep_of(fam, l);
            for i in 0..l {
                for j in 0..l {
                    let d = rep.hhat(i).matmul(rep.h(j)).trace();
                    assert_eq!(d, qi(i64::from(i == j)), "{fam:?}{l} dual basis");
                }
                for idx in 0..rs.n_positive() {
                    assert!(rep.h(i).matmul(rep.e(idx)).trace().is_zero());
                    assert!(rep.h(i).matmul(rep.f(idx)).trace().is_zero());
                }
            }
            for a in 0..rs.n_positive() {
                for b in 0..rs.n_positive() {
                    assert!(rep.e(a).matmul(rep.e(b)).trace().is_zero());
                    assert!(rep.f(a).matmul(rep.f(b)).trace().is_zero());
                    if a != b {
                        assert!(rep.e(a).matmul(rep.f(b)).trace().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn pairing_values_by_family() {
        // sl: all 1. so(2ℓ+1): 2 long / 4 short. sp(2ℓ): 2 short / 1 long.
        // so(2ℓ): 2 everywhere.
        let (rs, rep) = rep_of(Family::A, 3);
        for idx in 0..rs.n_positive() {
            assert_eq!(rep.pairing(idx), &qi(1));
        }
        let (rs, rep) = rep_of(Family::B, 3);
        for idx in 0..rs.n_positive() {
            let gamma = &rs.positives()[idx];
            // Short roots of B_ℓ are the ε_i: coefficient of α_ℓ is 1 and
            // the root has the form α_i + … + α_ℓ.
            let short = gamma.coeffs[2] == 1 && gamma.coeffs.iter().all(|&c| c <= 1);
            let expect = if short { qi(4) } else { qi(2) };
            assert_eq!(rep.pairing(idx), &expect, "root {:?}", gamma.coeffs);
        }
        let (rs, rep) = rep_of(Family::C, 3);
        for idx in 0..rs.n_positive() {
            let gamma = &rs.positives()[idx];
            let long = is_long_c_root(&gamma.coeffs);
            let expect = if long { qi(1) } else { qi(2) };
            assert_eq!(rep.pairing(idx), &expect, "root {:?}", gamma.coeffs);
        }
        let (rs, rep) = rep_of(Family::D, 4);
        for idx in 0..rs.n_positive() {
            assert_eq!(rep.pairing(idx), &qi(2));
        }
    }

    fn is_long_c_root(coeffs: &[i64]) -> bool {
        // Long roots of C_ℓ are 2ε_i = 2α_i + … + 2α_{ℓ−1} + α_ℓ.
        let l = coeffs.len();
        let mut v = vec![0i64; l];
        for i in 0..l {
            v[i..l - 1].fill(2);
            v[l - 1] = 1;
            if v == coeffs {
                return true;
            }
            v.iter_mut().for_each(|x| *x = 0);
        }
        false
    }

    #[test]
    fn sl3_explicit_matrices() {
        let (rs, rep) = rep_of(Family::A, 2);
        assert_eq!(rep.e(0), &elem(3, 1, 2));
        assert_eq!(rep.e(1), &elem(3, 2, 3));
        let beta = rs.position_of(&[1, 1]).unwrap();
        assert_eq!(rep.e(beta), &elem(3, 1, 3));
        assert_eq!(rep.f(beta), &elem(3, 3, 1));
        assert_eq!(rep.pairing(beta), &qi(1));
    }

    #[test]
    fn dimensions_of_reps() {
        for ((fam, l), n) in CASES.iter().zip([2, 3, 5, 5, 7, 4, 6, 6, 8]) {
            let (_, rep) = rep_of(*fam, *l);
            assert_eq!(rep.n(), n, "{fam:?}{l}");
        }
    }
}
