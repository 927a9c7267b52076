//! Lax matrix assembly, spectral invariants, and their structural checks.
//!
//! The phase-space point is realized as a matrix with Laurent-polynomial
//! entries in the loop parameter λ, using the defining representation of
//! the classical algebra. Characteristic-polynomial coefficients restrict
//! to a λ-Laurent window per invariant; extracting λ-coefficients yields
//! the commuting family. Everything algebraic runs over exact rationals;
//! only time integration runs over f64.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bracket::{hamiltonian_vector_field, structure_constants};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::mat::Mat;
use crate::phasespace::{CoordId, CoordKind, PhaseSpace};
use crate::rankcheck::{exact_rank, rank_mod_p, RANK_WITNESS_PRIME};
use crate::rep::ChevalleyRep;
use crate::rootsys::{AlgebraType, Family, RootSystem};
use crate::sample::{random_point, seeded_rng};
use crate::scalar::{qi, Scalar, Q};

/// Relative tolerance for float-path consistency residuals. Exact paths
/// demand literal zeros; RK4 roundoff stays orders of magnitude below
/// this at any magnitude short of the blow-up guard.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-9;

/// Coordinate-norm bound past which a trajectory is declared blown up.
pub const BLOWUP_NORM: f64 = 1e12;

/// Square matrix with Laurent-polynomial entries in λ.
pub type LaurentMat<S> = Mat<Laurent<S>>;

/// Representation matrices converted to a target scalar once, so the same
/// assembly and invariant code runs exactly (rationals) or fast (floats).
#[derive(Debug, Clone)]
pub struct RepMats<S> {
    n: usize,
    beta: usize,
    h: Vec<Mat<S>>,
    hhat: Vec<Mat<S>>,
    e: Vec<Mat<S>>,
    f_unit: Vec<Mat<S>>,
    form: Option<Mat<S>>,
}

impl RepMats<Q> {
    pub fn from_rep(rs: &RootSystem, rep: &ChevalleyRep) -> RepMats<Q> {
        let l = rs.rank();
        let np = rs.n_positive();
        let beta = rs
            .position_of(&rs.longest().coeffs)
            .expect("highest root is a positive root");
        RepMats {
            n: rep.n(),
            beta,
            h: (0..l).map(|i| rep.h(i).clone()).collect(),
            hhat: (0..l).map(|i| rep.hhat(i).clone()).collect(),
            e: (0..np).map(|g| rep.e(g).clone()).collect(),
            f_unit: (0..np).map(|g| rep.f_unit(g)).collect(),
            form: rep.form().cloned(),
        }
    }

    pub fn to_f64(&self) -> RepMats<f64> {
        let conv = |m: &Mat<Q>| m.map(|c| c.to_approx());
        RepMats {
            n: self.n,
            beta: self.beta,
            h: self.h.iter().map(conv).collect(),
            hhat: self.hhat.iter().map(conv).collect(),
            e: self.e.iter().map(conv).collect(),
            f_unit: self.f_unit.iter().map(conv).collect(),
            form: self.form.as_ref().map(conv),
        }
    }
}

impl<S: Scalar> RepMats<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the highest root among the positive roots.
    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn form(&self) -> Option<&Mat<S>> {
        self.form.as_ref()
    }

    /// ∂L/∂z for a chart coordinate: the direction matrix and its λ-power.
    fn direction(&self, c: CoordId) -> (&Mat<S>, i64) {
        match c.kind {
            CoordKind::CartanX => (&self.hhat[c.index], 0),
            CoordKind::LowerX => (&self.f_unit[c.index], 0),
            CoordKind::UpperY => (&self.e[c.index], -1),
        }
    }
}

/// Lifts a constant matrix into Laurent entries at λ-power k.
pub fn lift_const<S: Scalar>(m: &Mat<S>, k: i64) -> LaurentMat<S> {
    m.map(|c| Laurent::monomial(k, c.clone()))
}

/// λ^k coefficient of every entry.
pub fn coeff_matrix<S: Scalar>(m: &LaurentMat<S>, k: i64) -> Mat<S> {
    m.map(|p| p.coeff(k))
}

/// tr(A·B) without forming the product.
fn trace_prod<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> S {
    let mut acc = S::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)].eq_zero() || b[(j, i)].eq_zero() {
                continue;
            }
            acc = acc + a[(i, j)].clone() * b[(j, i)].clone();
        }
    }
    acc
}

/// tr(M·B)·λ^k for a Laurent matrix M and a constant sparse B.
fn trace_prod_shifted<S: Scalar>(m: &LaurentMat<S>, b: &Mat<S>, k: i64) -> Laurent<S> {
    let mut acc: Laurent<S> = Laurent::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let w = &b[(j, i)];
            if w.eq_zero() {
                continue;
            }
            acc = acc + m[(i, j)].scale(w);
        }
    }
    acc.shift(k)
}

/// Largest |coefficient| over all entries, as f64.
fn laurent_mat_max_abs<S: Scalar>(m: &LaurentMat<S>) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if let Some((lo, hi)) = m[(i, j)].support() {
                for k in lo..=hi {
                    best = best.max(m[(i, j)].coeff(k).to_approx().abs());
                }
            }
        }
    }
    best
}

/// Builds L(λ) at a chart point: fixed part Σ e_i + λ e_{−β} plus the
/// coordinate part (Cartan and lowering directions at λ^0, raising
/// directions at λ^{−1}).
pub fn assemble_l<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    space: &PhaseSpace,
    point: &[S],
) -> Result<LaurentMat<S>> {
    if point.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: point.len(),
        });
    }
    let n = rm.n;
    let mut c0 = Mat::<S>::zeros(n, n);
    let mut cm1 = Mat::<S>::zeros(n, n);
    for i in 0..rs.rank() {
        c0 = c0.add(&rm.e[i]);
    }
    let c1 = rm.f_unit[rm.beta].clone();
    for (idx, &cid) in space.coords().iter().enumerate() {
        let v = &point[idx];
        if v.eq_zero() {
            continue;
        }
        match cid.kind {
            CoordKind::CartanX => c0 = c0.add(&rm.hhat[cid.index].scale(v)),
            CoordKind::LowerX => c0 = c0.add(&rm.f_unit[cid.index].scale(v)),
            CoordKind::UpperY => cm1 = cm1.add(&rm.e[cid.index].scale(v)),
        }
    }
    Ok(Mat::from_fn(n, n, |i, j| {
        Laurent::monomial(-1, cm1[(i, j)].clone())
            + Laurent::monomial(0, c0[(i, j)].clone())
            + Laurent::monomial(1, c1[(i, j)].clone())
    }))
}

/// The projection L_− used by the Lax equation: the lowering part at λ^0
/// plus every λ^{−1} term. The fixed part contributes nothing.
pub fn l_minus<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    space: &PhaseSpace,
    point: &[S],
) -> Result<LaurentMat<S>> {
    if point.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: point.len(),
        });
    }
    let _ = rs;
    let n = rm.n;
    let mut c0 = Mat::<S>::zeros(n, n);
    let mut cm1 = Mat::<S>::zeros(n, n);
    for (idx, &cid) in space.coords().iter().enumerate() {
        let v = &point[idx];
        if v.eq_zero() {
            continue;
        }
        match cid.kind {
            CoordKind::CartanX => {}
            CoordKind::LowerX => c0 = c0.add(&rm.f_unit[cid.index].scale(v)),
            CoordKind::UpperY => cm1 = cm1.add(&rm.e[cid.index].scale(v)),
        }
    }
    Ok(Mat::from_fn(n, n, |i, j| {
        Laurent::monomial(-1, cm1[(i, j)].clone()) + Laurent::monomial(0, c0[(i, j)].clone())
    }))
}

/// [L, L_−] as a Laurent matrix.
pub fn lax_k<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    space: &PhaseSpace,
    point: &[S],
) -> Result<LaurentMat<S>> {
    let l = assemble_l(rs, rm, space, point)?;
    let lm = l_minus(rs, rm, space, point)?;
    Ok(l.commutator(&lm))
}

/// Reads the model coordinates of a tangent matrix: Cartan and lowering
/// components from the λ^0 part, raising components from the λ^{−1} part.
fn read_full_coords<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    k0: &Mat<S>,
    km1: &Mat<S>,
) -> Vec<(CoordId, S)> {
    let mut out = Vec::with_capacity(rs.dim());
    for i in 0..rs.rank() {
        out.push((CoordId::cartan(i), trace_prod(&rm.h[i], k0)));
    }
    for g in 0..rs.n_positive() {
        out.push((CoordId::lower(g), trace_prod(&rm.e[g], k0)));
    }
    for g in 0..rs.n_positive() {
        out.push((CoordId::upper(g), trace_prod(&rm.f_unit[g], km1)));
    }
    out
}

/// Reassembles a tangent matrix from coordinate values (no fixed part).
fn assemble_tangent<S: Scalar>(rm: &RepMats<S>, vals: &[(CoordId, S)]) -> LaurentMat<S> {
    let n = rm.n;
    let mut c0 = Mat::<S>::zeros(n, n);
    let mut cm1 = Mat::<S>::zeros(n, n);
    for (cid, v) in vals {
        if v.eq_zero() {
            continue;
        }
        match cid.kind {
            CoordKind::CartanX => c0 = c0.add(&rm.hhat[cid.index].scale(v)),
            CoordKind::LowerX => c0 = c0.add(&rm.f_unit[cid.index].scale(v)),
            CoordKind::UpperY => cm1 = cm1.add(&rm.e[cid.index].scale(v)),
        }
    }
    Mat::from_fn(n, n, |i, j| {
        Laurent::monomial(-1, cm1[(i, j)].clone()) + Laurent::monomial(0, c0[(i, j)].clone())
    })
}

/// Time derivative of every chart coordinate under the Lax equation
/// L̇ = [L, L_−]. The commutator is read back through the coordinate
/// functionals and the readback is required to reproduce the commutator
/// identically; any residual outside the model, or any leakage onto
/// coordinates frozen by the chart, is an internal-consistency error.
pub fn lax_rhs<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    space: &PhaseSpace,
    point: &[S],
) -> Result<Vec<S>> {
    let k = lax_k(rs, rm, space, point)?;
    let k0 = coeff_matrix(&k, 0);
    let km1 = coeff_matrix(&k, -1);
    let vals = read_full_coords(rs, rm, &k0, &km1);
    let reassembled = assemble_tangent(rm, &vals);
    let scale = 1.0 + laurent_mat_max_abs(&k);
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            let d = k[(i, j)].clone() - reassembled[(i, j)].clone();
            let ok = if S::IS_EXACT {
                d.is_zero()
            } else {
                d.support().is_none_or(|(lo, hi)| {
                    (lo..=hi).all(|p| d.coeff(p).to_approx().abs() / scale <= FLOAT_RESIDUAL_TOL)
                })
            };
            if !ok {
                return Err(Error::Internal(format!(
                    "Lax commutator has a residual outside the phase-space model at entry ({i},{j})"
                )));
            }
        }
    }
    let mut out = vec![S::zero(); space.dim()];
    for (cid, v) in vals {
        match space.index_of(cid) {
            Some(idx) => out[idx] = v,
            None => {
                let ok = if S::IS_EXACT {
                    v.eq_zero()
                } else {
                    v.to_approx().abs() / scale <= FLOAT_RESIDUAL_TOL
                };
                if !ok {
                    return Err(Error::Internal(format!(
                        "Lax flow leaks onto a coordinate frozen by the level-{} chart: {:?}",
                        space.level(),
                        cid
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Characteristic-polynomial data of a Laurent matrix A:
/// det(μI − A) = μ^n + c_1 μ^{n−1} + … + c_n, with auxiliary matrices
/// M_1..M_n satisfying ∂_B c_j = −tr(M_j B) and adj(A) = (−1)^{n+1} M_n.
pub struct CharPolyData<S> {
    pub coeffs: Vec<Laurent<S>>,
    pub tableaux: Vec<LaurentMat<S>>,
}

/// Faddeev–LeVerrier recursion over the Laurent-coefficient ring.
pub fn char_poly_data<S: Scalar>(a: &LaurentMat<S>, with_tableaux: bool) -> CharPolyData<S> {
    let n = a.rows();
    debug_assert!(a.is_square());
    let mut m: LaurentMat<S> = Mat::identity_scaled(n, Laurent::one());
    let mut coeffs = Vec::with_capacity(n);
    let mut tableaux = Vec::new();
    for k in 1..=n {
        if with_tableaux {
            tableaux.push(m.clone());
        }
        let am = a.matmul(&m);
        let ck = -am.trace().scale_div(&S::from_i64(k as i64));
        m = am.add(&Mat::identity_scaled(n, ck.clone()));
        coeffs.push(ck);
    }
    CharPolyData { coeffs, tableaux }
}

/// Pfaffian of an antisymmetric Laurent matrix, by memoized expansion
/// along the first remaining row. Exact scalars get an antisymmetry check.
pub fn pfaffian<S: Scalar>(m: &LaurentMat<S>) -> Result<Laurent<S>> {
    let n = m.rows();
    if !m.is_square() || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "Pfaffian needs an even square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if n > 30 {
        return Err(Error::InvalidInput(format!(
            "Pfaffian expansion not supported for order {n}"
        )));
    }
    if S::IS_EXACT && !m.add(&m.transpose()).is_zero_matrix() {
        return Err(Error::Internal(
            "Pfaffian input is not antisymmetric".into(),
        ));
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut memo: HashMap<u32, Laurent<S>> = HashMap::new();
    Ok(pfaffian_rec(m, full, &mut memo))
}

fn pfaffian_rec<S: Scalar>(
    m: &LaurentMat<S>,
    mask: u32,
    memo: &mut HashMap<u32, Laurent<S>>,
) -> Laurent<S> {
    if mask == 0 {
        return Laurent::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let mut acc: Laurent<S> = Laurent::zero();
    let mut sign_plus = true;
    for j in (i + 1)..32 {
        if mask & (1u32 << j) == 0 {
            continue;
        }
        if !m[(i, j)].is_zero() {
            let sub = mask & !(1u32 << i) & !(1u32 << j);
            let term = m[(i, j)].clone() * pfaffian_rec(m, sub, memo);
            acc = if sign_plus { acc + term } else { acc - term };
        }
        sign_plus = !sign_plus;
    }
    memo.insert(mask, acc.clone());
    acc
}

/// Entrywise derivative of the Pfaffian: entry (i, j) with i < j is
/// ∂Pf/∂A_ij = (−1)^{i+j+1} · Pf(A with rows and columns i, j removed),
/// so dPf(A)[B] = Σ_{i<j} B_ij · sens_ij for antisymmetric B. Total in
/// A: no division, valid even where the Pfaffian itself vanishes.
pub fn pfaffian_sensitivities<S: Scalar>(m: &LaurentMat<S>) -> Result<Mat<Laurent<S>>> {
    let n = m.rows();
    if !m.is_square() || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "Pfaffian needs an even square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if n > 30 {
        return Err(Error::InvalidInput(format!(
            "Pfaffian expansion not supported for order {n}"
        )));
    }
    let full: u32 = (1u32 << n) - 1;
    let mut memo: HashMap<u32, Laurent<S>> = HashMap::new();
    let mut sens = Mat::from_fn(n, n, |_, _| Laurent::zero());
    for i in 0..n {
        for j in (i + 1)..n {
            let sub = full & !(1u32 << i) & !(1u32 << j);
            let p = pfaffian_rec(m, sub, &mut memo);
            // 0-based indices: (−1)^{(i+1)+(j+1)+1} = (−1)^{i+j+1}.
            let signed = if (i + j) % 2 == 0 { -p } else { p };
            sens[(j, i)] = -signed.clone();
            sens[(i, j)] = signed;
        }
    }
    Ok(sens)
}

/// Which characteristic data generates one member of the commuting family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Generator {
    /// Coefficient c_k of μ^{n−k} in det(μI − L).
    CharCoeff(usize),
    /// Pfaffian of (form · L), for the even orthogonal family.
    Pfaffian,
}

/// One generating invariant P̃_i together with its λ-window exponent m_i.
#[derive(Debug, Clone, Serialize)]
pub struct Member {
    /// 1-based position i; the top member i = ℓ carries the λ^{+1} term.
    pub index: usize,
    /// Window exponent: the λ-support of P̃_i lies in [−m_i, +1].
    pub m: usize,
    pub generator: Generator,
}

/// The generating invariants of the spectral family, ordered so that the
/// window exponents match the algebra's exponent list ascending.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantFamily {
    algebra: AlgebraType,
    members: Vec<Member>,
    /// Flattened extraction labels (i, j): F_{j,i} is the λ^{−j}
    /// coefficient of P̃_i, for j = 0..m_i.
    flat: Vec<(usize, usize)>,
    m_top: usize,
}

impl InvariantFamily {
    pub fn build(rs: &RootSystem) -> Result<InvariantFamily> {
        let l = rs.rank();
        let at = rs.algebra();
        let mut raw: Vec<(usize, Generator)> = match at.family() {
            Family::A => (1..=l).map(|i| (i, Generator::CharCoeff(i + 1))).collect(),
            Family::B | Family::C => (1..=l)
                .map(|i| (2 * i - 1, Generator::CharCoeff(2 * i)))
                .collect(),
            Family::D => {
                let mut v: Vec<(usize, Generator)> = (1..l)
                    .map(|i| (2 * i - 1, Generator::CharCoeff(2 * i)))
                    .collect();
                v.push((l - 1, Generator::Pfaffian));
                v
            }
            _ => {
                return Err(Error::UnsupportedType {
                    what: format!(
                        "spectral invariant family for {at} needs a defining representation; \
                         only the classical families are realized"
                    ),
                })
            }
        };
        raw.sort_by_key(|(m, _)| *m);
        let ms: Vec<usize> = raw.iter().map(|(m, _)| *m).collect();
        if ms != rs.exponents() {
            return Err(Error::Internal(format!(
                "family window exponents {ms:?} disagree with the algebra exponents {:?}",
                rs.exponents()
            )));
        }
        let members: Vec<Member> = raw
            .into_iter()
            .enumerate()
            .map(|(pos, (m, generator))| Member {
                index: pos + 1,
                m,
                generator,
            })
            .collect();
        let flat: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|mem| (0..=mem.m).map(move |j| (mem.index, j)))
            .collect();
        Ok(InvariantFamily {
            algebra: at,
            members,
            flat,
            m_top: rs.m_top(),
        })
    }

    pub fn algebra(&self) -> AlgebraType {
        self.algebra
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// Flattened (i, j) labels of every F_{j,i}, i ascending then j.
    pub fn flat(&self) -> &[(usize, usize)] {
        &self.flat
    }

    pub fn size(&self) -> usize {
        self.flat.len()
    }

    pub fn m_top(&self) -> usize {
        self.m_top
    }

    /// Display label of F_{j,i}.
    pub fn label(i: usize, j: usize) -> String {
        format!("F[{j},{i}]")
    }

    /// Positions in the flat list of the ℓ top extractions F_{m_i,i}.
    pub fn casimir_rows(&self) -> Vec<usize> {
        self.flat
            .iter()
            .enumerate()
            .filter(|(_, (i, j))| self.members[i - 1].m == *j)
            .map(|(row, _)| row)
            .collect()
    }

    /// Position in the flat list of F_{j,i}.
    pub fn flat_row(&self, i: usize, j: usize) -> Option<usize> {
        self.flat.iter().position(|&(a, b)| a == i && b == j)
    }
}

/// Evaluates every generating invariant on an arbitrary Laurent matrix.
pub fn family_values_of_matrix<S: Scalar>(
    fam: &InvariantFamily,
    form: Option<&Mat<S>>,
    l: &LaurentMat<S>,
) -> Result<Vec<Laurent<S>>> {
    let cpd = char_poly_data(l, false);
    let needs_pf = fam
        .members
        .iter()
        .any(|m| m.generator == Generator::Pfaffian);
    let pf = if needs_pf {
        let s = form.ok_or_else(|| {
            Error::Internal("Pfaffian member requires the invariant bilinear form".into())
        })?;
        Some(pfaffian(&lift_const(s, 0).matmul(l))?)
    } else {
        None
    };
    fam.members
        .iter()
        .map(|mem| match &mem.generator {
            Generator::CharCoeff(k) => Ok(cpd.coeffs[k - 1].clone()),
            Generator::Pfaffian => Ok(pf.clone().unwrap()),
        })
        .collect()
}

/// Evaluates every generating invariant at a chart point.
pub fn family_values_at_point<S: Scalar>(
    rs: &RootSystem,
    rm: &RepMats<S>,
    fam: &InvariantFamily,
    space: &PhaseSpace,
    point: &[S],
) -> Result<Vec<Laurent<S>>> {
    let l = assemble_l(rs, rm, space, point)?;
    family_values_of_matrix(fam, rm.form(), &l)
}

/// Extracts the flat list of F_{j,i} values from the generating Laurents.
pub fn flat_extract<S: Scalar>(fam: &InvariantFamily, values: &[Laurent<S>]) -> Vec<S> {
    fam.flat
        .iter()
        .map(|&(i, j)| values[i - 1].coeff(-(j as i64)))
        .collect()
}

/// Jacobian of the flattened family at a chart point: rows follow
/// `InvariantFamily::flat`, columns follow the chart coordinates.
/// Characteristic coefficients differentiate through the recursion
/// tableaux; the Pfaffian differentiates through its entrywise
/// sensitivities, which stay valid where the Pfaffian vanishes.
pub fn family_jacobian(
    rs: &RootSystem,
    rm: &RepMats<Q>,
    fam: &InvariantFamily,
    space: &PhaseSpace,
    point: &[Q],
) -> Result<Mat<Q>> {
    let l = assemble_l(rs, rm, space, point)?;
    let cpd = char_poly_data(&l, true);
    let needs_pf = fam
        .members
        .iter()
        .any(|m| m.generator == Generator::Pfaffian);
    let pf_ctx = if needs_pf {
        let s = rm.form().ok_or_else(|| {
            Error::Internal("Pfaffian member requires the invariant bilinear form".into())
        })?;
        let msl = lift_const(s, 0).matmul(&l);
        Some((pfaffian_sensitivities(&msl)?, s.clone()))
    } else {
        None
    };
    let mut jac = Mat::zeros(fam.size(), space.dim());
    for (col, &cid) in space.coords().iter().enumerate() {
        let (bmat, pow) = rm.direction(cid);
        let mut grads: Vec<Laurent<Q>> = Vec::with_capacity(fam.members.len());
        for mem in &fam.members {
            match &mem.generator {
                Generator::CharCoeff(k) => {
                    grads.push(-trace_prod_shifted(&cpd.tableaux[k - 1], bmat, pow));
                }
                Generator::Pfaffian => {
                    let (sens, s) = pf_ctx.as_ref().unwrap();
                    let sb = s.matmul(bmat);
                    let mut acc: Laurent<Q> = Laurent::zero();
                    for i in 0..rm.n {
                        for j in (i + 1)..rm.n {
                            let b = &sb[(i, j)];
                            if !b.is_zero() {
                                acc = acc + sens[(i, j)].scale(b);
                            }
                        }
                    }
                    grads.push(acc.shift(pow));
                }
            }
        }
        for (row, &(i, j)) in fam.flat.iter().enumerate() {
            jac[(row, col)] = grads[i - 1].coeff(-(j as i64));
        }
    }
    Ok(jac)
}

/// Rank with a fast modular witness: full expected rank mod p certifies
/// the rational rank; anything less escalates to exact elimination.
fn certified_rank(m: &Mat<Q>) -> usize {
    let cap = m.rows().min(m.cols());
    let w = rank_mod_p(m, RANK_WITNESS_PRIME);
    if w == cap {
        w
    } else {
        exact_rank(m)
    }
}

/// Outcome of the λ-window restriction check.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictionReport {
    pub algebra: String,
    pub trials: usize,
    pub family_size: usize,
    pub expected_size: usize,
    /// (index i, window exponent m_i) per member.
    pub member_windows: Vec<(usize, usize)>,
    /// The constant λ^{+1} coefficient of the top member.
    pub lambda_top_value: f64,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Checks, on random rational points of the full chart, that each P̃_i has
/// λ-support inside [−m_i, +1], that only the top member carries a λ^{+1}
/// term, and that this term is a nonzero constant across points.
pub fn check_restriction_structure(
    rs: &RootSystem,
    trials: usize,
    seed: u64,
) -> Result<RestrictionReport> {
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    let mut rng = seeded_rng(seed);
    let expected = (rs.dim() + rs.rank()) / 2;
    let mut violations: Vec<String> = Vec::new();
    if fam.size() != expected {
        violations.push(format!(
            "family size {} differs from (dim g + rank)/2 = {expected}",
            fam.size()
        ));
    }
    let mut top_const: Option<Q> = None;
    for trial in 0..trials.max(1) {
        let point = random_point(space.dim(), &mut rng);
        let values = family_values_at_point(rs, &rm, &fam, &space, &point)?;
        for (mem, val) in fam.members.iter().zip(values.iter()) {
            if let Some((lo, hi)) = val.support() {
                if lo < -(mem.m as i64) || hi > 1 {
                    violations.push(format!(
                        "trial {trial}: member {} has λ-support [{lo}, {hi}] outside [{}, 1]",
                        mem.index,
                        -(mem.m as i64)
                    ));
                }
            }
            let top = val.coeff(1);
            if mem.m == fam.m_top {
                if top.is_zero() {
                    violations.push(format!(
                        "trial {trial}: member {} lost its λ^1 term",
                        mem.index
                    ));
                } else {
                    match &top_const {
                        None => top_const = Some(top),
                        Some(prev) if *prev != top => violations.push(format!(
                            "trial {trial}: λ^1 coefficient of member {} is not constant",
                            mem.index
                        )),
                        _ => {}
                    }
                }
            } else if !top.is_zero() {
                violations.push(format!(
                    "trial {trial}: member {} has an unexpected λ^1 term",
                    mem.index
                ));
            }
        }
    }
    let pass = violations.is_empty();
    Ok(RestrictionReport {
        algebra: rs.algebra().to_string(),
        trials: trials.max(1),
        family_size: fam.size(),
        expected_size: expected,
        member_windows: fam.members.iter().map(|m| (m.index, m.m)).collect(),
        lambda_top_value: top_const.map_or(0.0, |q| q.to_approx()),
        violations,
        pass,
    })
}

/// Outcome of the pairwise Poisson-commutation check.
#[derive(Debug, Clone, Serialize)]
pub struct InvolutionReport {
    pub algebra: String,
    pub trials: usize,
    pub pairs: usize,
    /// Largest |{F, G}| seen, exactly zero when the check passes.
    pub max_violation: f64,
    pub pass: bool,
}

/// Verifies {F_{j,i}, F_{j',i'}} = 0 exactly for every pair of family
/// members at random rational points of the full chart.
pub fn check_involution(rs: &RootSystem, trials: usize, seed: u64) -> Result<InvolutionReport> {
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let sc = structure_constants(rs)?;
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    let mut rng = seeded_rng(seed);
    let mut max_violation = 0.0f64;
    let mut pass = true;
    for _ in 0..trials.max(1) {
        let point = random_point(space.dim(), &mut rng);
        let jac = family_jacobian(rs, &rm, &fam, &space, &point)?;
        let pm = crate::bracket::poisson_matrix(rs, &sc, &space, &point)?;
        let gram = jac.matmul(&pm.mat).matmul(&jac.transpose());
        if !gram.is_zero_matrix() {
            pass = false;
            for i in 0..gram.rows() {
                for j in 0..gram.cols() {
                    max_violation = max_violation.max(gram[(i, j)].to_approx().abs());
                }
            }
        }
    }
    let f = fam.size();
    Ok(InvolutionReport {
        algebra: rs.algebra().to_string(),
        trials: trials.max(1),
        pairs: f * (f - 1) / 2,
        max_violation,
        pass,
    })
}

/// Outcome of the Casimir check.
#[derive(Debug, Clone, Serialize)]
pub struct CasimirReport {
    pub algebra: String,
    pub trials: usize,
    pub casimir_labels: Vec<String>,
    /// Largest |component| of any Casimir Hamiltonian field seen.
    pub field_max_violation: f64,
    /// Smallest Jacobian rank of the Casimir rows over the sampled points.
    pub jacobian_rank: usize,
    pub expected_rank: usize,
    pub resamples: usize,
    pub pass: bool,
}

/// Verifies that the top extractions F_{m_i,i} have identically zero
/// Hamiltonian fields and stay functionally independent (Jacobian rank ℓ)
/// at random points. A degenerate sample is resampled once.
pub fn check_casimirs(rs: &RootSystem, trials: usize, seed: u64) -> Result<CasimirReport> {
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let sc = structure_constants(rs)?;
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    let mut rng = seeded_rng(seed);
    let l = rs.rank();
    let rows = fam.casimir_rows();
    let labels: Vec<String> = fam
        .flat
        .iter()
        .enumerate()
        .filter(|(r, _)| rows.contains(r))
        .map(|(_, &(i, j))| InvariantFamily::label(i, j))
        .collect();
    let mut field_max = 0.0f64;
    let mut min_rank = usize::MAX;
    let mut resamples = 0usize;
    let mut pass = true;
    for _ in 0..trials.max(1) {
        let mut point = random_point(space.dim(), &mut rng);
        let mut rank = casimir_rank_at(rs, &rm, &fam, &space, &rows, &point)?;
        if rank < l {
            resamples += 1;
            point = random_point(space.dim(), &mut rng);
            rank = casimir_rank_at(rs, &rm, &fam, &space, &rows, &point)?;
        }
        min_rank = min_rank.min(rank);
        if rank < l {
            pass = false;
        }
        let jac = family_jacobian(rs, &rm, &fam, &space, &point)?;
        for &r in &rows {
            let grad: Vec<Q> = (0..space.dim()).map(|c| jac[(r, c)].clone()).collect();
            let field = hamiltonian_vector_field(rs, &sc, &space, &point, &grad)?;
            for v in &field {
                if !v.is_zero() {
                    pass = false;
                    field_max = field_max.max(v.to_approx().abs());
                }
            }
        }
    }
    Ok(CasimirReport {
        algebra: rs.algebra().to_string(),
        trials: trials.max(1),
        casimir_labels: labels,
        field_max_violation: field_max,
        jacobian_rank: min_rank,
        expected_rank: l,
        resamples,
        pass,
    })
}

fn casimir_rank_at(
    rs: &RootSystem,
    rm: &RepMats<Q>,
    fam: &InvariantFamily,
    space: &PhaseSpace,
    rows: &[usize],
    point: &[Q],
) -> Result<usize> {
    let jac = family_jacobian(rs, rm, fam, space, point)?;
    let sub = Mat::from_fn(rows.len(), space.dim(), |r, c| jac[(rows[r], c)].clone());
    Ok(certified_rank(&sub))
}

/// Outcome of the functional-independence check.
#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub algebra: String,
    pub expected_rank: usize,
    pub rank_at_marker: usize,
    pub random_ranks: Vec<usize>,
    pub resamples: usize,
    pub pass: bool,
}

/// The marker point: h + Σ e_i + λ^{−1} Σ e_i (+ fixed part), with h the
/// Cartan element on which every simple root takes the value 2. The
/// spectral family reaches its full rank there.
pub fn independence_point(rs: &RootSystem, rep: &ChevalleyRep) -> Result<Vec<Q>> {
    let l = rs.rank();
    let c = Mat::from_fn(l, l, |i, j| qi(rs.cartan()[i][j]));
    let cinv = c
        .inverse()
        .ok_or_else(|| Error::Internal("Cartan matrix is singular".into()))?;
    let t: Vec<Q> = (0..l)
        .map(|i| {
            let mut acc = Q::zero();
            for j in 0..l {
                acc += cinv[(i, j)].clone() * qi(2);
            }
            acc
        })
        .collect();
    let n = rep.n();
    let mut hmat = Mat::<Q>::zeros(n, n);
    for (j, tj) in t.iter().enumerate() {
        hmat = hmat.add(&rep.h(j).scale(tj));
    }
    let space = PhaseSpace::full(rs);
    let mut point = vec![Q::zero(); space.dim()];
    for i in 0..l {
        let idx = space
            .index_of(CoordId::cartan(i))
            .ok_or_else(|| Error::Internal("full chart misses a Cartan coordinate".into()))?;
        point[idx] = trace_prod(rep.h(i), &hmat);
    }
    for (g, root) in rs.positives().iter().enumerate() {
        if root.height() == 1 {
            let idx = space
                .index_of(CoordId::upper(g))
                .ok_or_else(|| Error::Internal("full chart misses a raising coordinate".into()))?;
            point[idx] = Q::one();
        }
    }
    Ok(point)
}

/// Verifies that the flattened family has Jacobian rank (dim g + ℓ)/2 at
/// the marker point and at ten random points. A degenerate random sample
/// is resampled once.
pub fn check_independence(rs: &RootSystem, seed: u64) -> Result<IndependenceReport> {
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    let expected = fam.size();
    let marker = independence_point(rs, &rep)?;
    let jac = family_jacobian(rs, &rm, &fam, &space, &marker)?;
    let rank_at_marker = certified_rank(&jac);
    let mut rng = seeded_rng(seed);
    let mut random_ranks = Vec::with_capacity(10);
    let mut resamples = 0usize;
    for _ in 0..10 {
        let mut point = random_point(space.dim(), &mut rng);
        let mut rank = certified_rank(&family_jacobian(rs, &rm, &fam, &space, &point)?);
        if rank < expected {
            resamples += 1;
            point = random_point(space.dim(), &mut rng);
            rank = certified_rank(&family_jacobian(rs, &rm, &fam, &space, &point)?);
        }
        random_ranks.push(rank);
    }
    let pass = rank_at_marker == expected && random_ranks.iter().all(|&r| r == expected);
    Ok(IndependenceReport {
        algebra: rs.algebra().to_string(),
        expected_rank: expected,
        rank_at_marker,
        random_ranks,
        resamples,
        pass,
    })
}

/// One recorded instant of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub coords: Vec<f64>,
    pub invariants: Vec<f64>,
    /// max_i |F_i(t) − F_i(0)| / (1 + |F_i(0)|) at this instant.
    pub drift: f64,
}

/// Outcome of a Lax-flow integration.
#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub algebra: String,
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub aborted: bool,
    pub abort_reason: Option<String>,
    pub abort_time: Option<f64>,
    /// Largest invariant drift over the whole trajectory.
    pub max_drift: f64,
    pub samples: Vec<FlowSample>,
}

/// Integrates the Lax flow with classical RK4 over f64 on the full chart,
/// monitoring every flattened invariant for drift. Trajectories whose
/// coordinate norm passes the blow-up guard abort with a partial report.
/// Samples are recorded every `record_every` steps (0 records only the
/// endpoints).
pub fn integrate_flow(
    rs: &RootSystem,
    point0: &[f64],
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<FlowReport> {
    if !dt.is_finite() || dt <= 0.0 || !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidInput(
            "flow integration needs positive finite t_end and dt".into(),
        ));
    }
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep).to_f64();
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    if point0.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: point0.len(),
        });
    }
    let invariants = |y: &[f64]| -> Result<Vec<f64>> {
        let vals = family_values_at_point(rs, &rm, &fam, &space, y)?;
        Ok(flat_extract(&fam, &vals))
    };
    let f0 = invariants(point0)?;
    let drift_of = |fi: &[f64]| -> f64 {
        fi.iter()
            .zip(f0.iter())
            .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
            .fold(0.0f64, f64::max)
    };
    let steps = (t_end / dt).round().max(1.0) as usize;
    let mut y = point0.to_vec();
    let mut samples = vec![FlowSample {
        t: 0.0,
        coords: y.clone(),
        invariants: f0.clone(),
        drift: 0.0,
    }];
    let mut max_drift = 0.0f64;
    let mut aborted = false;
    let mut abort_reason = None;
    let mut abort_time = None;
    let mut t = 0.0f64;
    let mut done = 0usize;
    for step in 0..steps {
        match rk4_step(rs, &rm, &space, &y, dt) {
            Ok(next) => y = next,
            Err(e) => {
                aborted = true;
                abort_reason = Some(format!("Lax evaluation failed mid-step: {e}"));
                abort_time = Some(t);
                break;
            }
        }
        t += dt;
        done = step + 1;
        if y.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_NORM) {
            aborted = true;
            abort_reason = Some(format!(
                "coordinate norm passed the blow-up guard {BLOWUP_NORM:e}"
            ));
            abort_time = Some(t);
            break;
        }
        let fi = invariants(&y)?;
        let d = drift_of(&fi);
        max_drift = max_drift.max(d);
        let record = record_every > 0 && (step + 1) % record_every == 0;
        if record || step + 1 == steps {
            samples.push(FlowSample {
                t,
                coords: y.clone(),
                invariants: fi,
                drift: d,
            });
        }
    }
    Ok(FlowReport {
        algebra: rs.algebra().to_string(),
        t_end,
        dt,
        steps: done,
        aborted,
        abort_reason,
        abort_time,
        max_drift,
        samples,
    })
}

fn rk4_step(
    rs: &RootSystem,
    rm: &RepMats<f64>,
    space: &PhaseSpace,
    y: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let n = y.len();
    let shifted = |base: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        (0..n).map(|i| base[i] + s * k[i]).collect()
    };
    let k1 = lax_rhs(rs, rm, space, y)?;
    let k2 = lax_rhs(rs, rm, space, &shifted(y, &k1, dt / 2.0))?;
    let k3 = lax_rhs(rs, rm, space, &shifted(y, &k2, dt / 2.0))?;
    let k4 = lax_rhs(rs, rm, space, &shifted(y, &k3, dt))?;
    Ok((0..n)
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}
