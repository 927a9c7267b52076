//! The coordinate Poisson bracket on the phase space charts.
//!
//! The bracket of two coordinate functions is always a constant multiple
//! of a single coordinate (or zero):
//!
//!   {x_i, x_j} = 0                    {y_α, y_γ} = 0
//!   {x_i, x_{−α}} = α(h_i)·x_{−α}     {x_i, y_α} = −α(h_i)·y_α
//!   {x_{−α}, x_{−γ}} = η_{α+γ} N_{α,γ} x_{−α−γ}
//!   {x_{−α}, y_γ}    = η_{γ−α} N_{α,−γ} y_{γ−α}
//!
//! with η_δ = 1 iff δ ∈ Φ_+. The constants are extracted from the
//! defining representation: positive-pair N from the Chevalley basis,
//! mixed-pair N from the pairing-normalized functionals, so that the
//! bracket agrees exactly with the loop-algebra computation
//! {⟨X,·⟩, ⟨Y,·⟩}(L) = ⟨[X,Y], L⟩ without any calibration factor.
//!
//! Coordinates frozen to zero by a level-k chart contribute nothing: the
//! bands are Poisson subspaces, so the same formulas evaluate the induced
//! bracket there.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::phasespace::{CoordId, CoordKind, PhaseSpace};
use crate::rep::ChevalleyRep;
use crate::rootsys::RootSystem;
use crate::scalar::{qi, Q};

/// Structure constants of a fixed matrix realization.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    realization: String,
    /// (α, γ) → N_{α,γ} for positive roots with α + γ ∈ Φ_+.
    pos: HashMap<(usize, usize), Q>,
    /// (α, γ) → N_{α,−γ} for positive roots with γ − α ∈ Φ_+.
    mixed: HashMap<(usize, usize), Q>,
}

impl StructureConstants {
    /// Extracts the constants from an already-built representation.
    pub fn from_rep(rs: &RootSystem, rep: &ChevalleyRep) -> Result<StructureConstants> {
        let np = rs.n_positive();
        let mut pos = HashMap::new();
        let mut mixed = HashMap::new();
        for a in 0..np {
            let alpha = &rs.positives()[a];
            for g in 0..np {
                if a == g {
                    continue;
                }
                let gamma = &rs.positives()[g];
                let sum: Vec<i64> = alpha
                    .coeffs
                    .iter()
                    .zip(&gamma.coeffs)
                    .map(|(x, y)| x + y)
                    .collect();
                if let Some(s_idx) = rs.position_of(&sum) {
                    let br = rep.e(a).commutator(rep.e(g));
                    let n = br.matmul(rep.f(s_idx)).trace() / rep.pairing(s_idx).clone();
                    if n.is_zero() {
                        return Err(Error::Internal(format!(
                            "vanishing Chevalley constant at roots {a},{g}"
                        )));
                    }
                    pos.insert((a, g), n);
                }
                let diff: Vec<i64> = gamma
                    .coeffs
                    .iter()
                    .zip(&alpha.coeffs)
                    .map(|(y, x)| y - x)
                    .collect();
                if let Some(d_idx) = rs.position_of(&diff) {
                    let br = rep.e(a).commutator(rep.f(g));
                    let n = br.matmul(rep.e(d_idx)).trace() / rep.pairing(g).clone();
                    if n.is_zero() {
                        return Err(Error::Internal(format!(
                            "vanishing mixed constant at roots {a},{g}"
                        )));
                    }
                    mixed.insert((a, g), n);
                }
            }
        }
        Ok(StructureConstants {
            realization: format!("defining representation, {}", rs.algebra()),
            pos,
            mixed,
        })
    }

    pub fn realization(&self) -> &str {
        &self.realization
    }

    /// N_{α,γ} for positive roots, present iff α + γ ∈ Φ_+.
    pub fn n_pos(&self, a: usize, g: usize) -> Option<&Q> {
        self.pos.get(&(a, g))
    }

    /// N_{α,−γ} for positive roots, present iff γ − α ∈ Φ_+.
    pub fn n_mixed(&self, a: usize, g: usize) -> Option<&Q> {
        self.mixed.get(&(a, g))
    }
}

/// Builds the representation internally; classical types only.
pub fn structure_constants(rs: &RootSystem) -> Result<StructureConstants> {
    let rep = ChevalleyRep::build(rs)?;
    StructureConstants::from_rep(rs, &rep)
}

/// The bracket of two coordinates as a sparse linear form Σ c·z over the
/// chart, with chart-frozen targets dropped.
pub fn bracket_form(
    rs: &RootSystem,
    sc: &StructureConstants,
    space: &PhaseSpace,
    a: CoordId,
    b: CoordId,
) -> Vec<(CoordId, Q)> {
    use CoordKind::*;
    let term = |id: CoordId, c: Q| -> Vec<(CoordId, Q)> {
        if space.index_of(id).is_some() && !c.is_zero() {
            vec![(id, c)]
        } else {
            Vec::new()
        }
    };
    match (a.kind, b.kind) {
        (CartanX, CartanX) | (UpperY, UpperY) => Vec::new(),
        (CartanX, LowerX) => {
            let w = qi(rs.pairing(&rs.positives()[b.index].coeffs, a.index));
            term(b, w)
        }
        (LowerX, CartanX) => negate(bracket_form(rs, sc, space, b, a)),
        (CartanX, UpperY) => {
            let w = qi(rs.pairing(&rs.positives()[b.index].coeffs, a.index));
            term(b, -w)
        }
        (UpperY, CartanX) => negate(bracket_form(rs, sc, space, b, a)),
        (LowerX, LowerX) => {
            let sum: Vec<i64> = rs.positives()[a.index]
                .coeffs
                .iter()
                .zip(&rs.positives()[b.index].coeffs)
                .map(|(x, y)| x + y)
                .collect();
            match (rs.position_of(&sum), sc.n_pos(a.index, b.index)) {
                (Some(t), Some(n)) => term(CoordId::lower(t), n.clone()),
                _ => Vec::new(),
            }
        }
        (LowerX, UpperY) => {
            let diff: Vec<i64> = rs.positives()[b.index]
                .coeffs
                .iter()
                .zip(&rs.positives()[a.index].coeffs)
                .map(|(y, x)| y - x)
                .collect();
            match (rs.position_of(&diff), sc.n_mixed(a.index, b.index)) {
                (Some(t), Some(n)) => term(CoordId::upper(t), n.clone()),
                _ => Vec::new(),
            }
        }
        (UpperY, LowerX) => negate(bracket_form(rs, sc, space, b, a)),
    }
}

fn negate(mut form: Vec<(CoordId, Q)>) -> Vec<(CoordId, Q)> {
    for (_, c) in form.iter_mut() {
        *c = -c.clone();
    }
    form
}

/// {z_a, z_b} evaluated at a chart point.
pub fn bracket_pair(
    rs: &RootSystem,
    sc: &StructureConstants,
    space: &PhaseSpace,
    a: CoordId,
    b: CoordId,
    point: &[Q],
) -> Result<Q> {
    if point.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: point.len(),
        });
    }
    let mut v = Q::zero();
    for (id, c) in bracket_form(rs, sc, space, a, b) {
        let idx = space.index_of(id).expect("bracket_form stays in chart");
        v += c * point[idx].clone();
    }
    Ok(v)
}

/// The full antisymmetric matrix {z_a, z_b} in chart z-order.
#[derive(Debug, Clone)]
pub struct PoissonMatrix {
    pub point: Vec<Q>,
    pub mat: Mat<Q>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonSummary {
    pub algebra: String,
    pub level: usize,
    pub dim: usize,
    pub rank: usize,
}

pub fn poisson_matrix(
    rs: &RootSystem,
    sc: &StructureConstants,
    space: &PhaseSpace,
    point: &[Q],
) -> Result<PoissonMatrix> {
    if point.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: point.len(),
        });
    }
    let n = space.dim();
    let mut mat: Mat<Q> = Mat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = bracket_pair(rs, sc, space, space.coords()[i], space.coords()[j], point)?;
            mat[(j, i)] = -v.clone();
            mat[(i, j)] = v;
        }
    }
    Ok(PoissonMatrix {
        point: point.to_vec(),
        mat,
    })
}

/// X_F = Π · ∇F in chart coordinates.
pub fn hamiltonian_vector_field(
    rs: &RootSystem,
    sc: &StructureConstants,
    space: &PhaseSpace,
    point: &[Q],
    gradient: &[Q],
) -> Result<Vec<Q>> {
    if gradient.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: gradient.len(),
        });
    }
    let pm = poisson_matrix(rs, sc, space, point)?;
    let n = space.dim();
    Ok((0..n)
        .map(|i| {
            let mut v = Q::zero();
            for (j, g) in gradient.iter().enumerate() {
                if pm.mat[(i, j)].is_zero() || g.is_zero() {
                    continue;
                }
                v += pm.mat[(i, j)].clone() * g.clone();
            }
            v
        })
        .collect())
}
