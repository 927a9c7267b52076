//! Phase spaces of the hierarchy: the full space T_λ and the intermediate
//! spaces T_λ^(k) inside the graded loop algebra.
//!
//! A point is a coordinate vector over the canonical z-order
//! x_1..x_ℓ, x_{−γ} (heights ascending), y_γ (same root order); the affine
//! part f = Σ e_i + λ e_{−β} is implied metadata, never a coordinate. The
//! loop grading deg(λ^k e_α) = |α| + (|β|+1)k drives which coordinates
//! exist at level k.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootsys::{AlgebraType, RootSystem};
use crate::scalar::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoordKind {
    /// x_i, a Cartan coordinate (index 0..ℓ).
    CartanX,
    /// x_{−α}, coefficient of e_{−α} (index into the positive roots).
    LowerX,
    /// y_α, coefficient of λ^{−1} e_α (index into the positive roots).
    UpperY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CoordId {
    pub kind: CoordKind,
    pub index: usize,
}

impl CoordId {
    pub fn cartan(i: usize) -> CoordId {
        CoordId {
            kind: CoordKind::CartanX,
            index: i,
        }
    }

    pub fn lower(root: usize) -> CoordId {
        CoordId {
            kind: CoordKind::LowerX,
            index: root,
        }
    }

    pub fn upper(root: usize) -> CoordId {
        CoordId {
            kind: CoordKind::UpperY,
            index: root,
        }
    }
}

/// Coordinate chart for T_λ^(k); k = m_ℓ gives the full T_λ.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseSpace {
    algebra: AlgebraType,
    level: usize,
    m_top: usize,
    coords: Vec<CoordId>,
    #[serde(skip)]
    pos: HashMap<CoordId, usize>,
}

impl PhaseSpace {
    /// Coordinates of level k: all x_i; x_{−γ} for height(γ) ≤ k; y_γ for
    /// height(γ) ≥ m_ℓ + 1 − k. The fixed part Σ e_i + λ e_{−β} is present
    /// at every level.
    pub fn make(rs: &RootSystem, level: usize) -> Result<PhaseSpace> {
        let m_top = rs.m_top();
        if level < 1 || level > m_top {
            return Err(Error::LevelOutOfRange {
                k: level,
                max: m_top,
            });
        }
        let l = rs.rank();
        let mut coords = Vec::new();
        for i in 0..l {
            coords.push(CoordId::cartan(i));
        }
        for (idx, r) in rs.positives().iter().enumerate() {
            if r.height() as usize <= level {
                coords.push(CoordId::lower(idx));
            }
        }
        for (idx, r) in rs.positives().iter().enumerate() {
            if r.height() as usize >= m_top + 1 - level {
                coords.push(CoordId::upper(idx));
            }
        }
        let pos = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Ok(PhaseSpace {
            algebra: rs.algebra(),
            level,
            m_top,
            coords,
            pos,
        })
    }

    pub fn full(rs: &RootSystem) -> PhaseSpace {
        PhaseSpace::make(rs, rs.m_top()).expect("m_top is always a valid level")
    }

    pub fn algebra(&self) -> AlgebraType {
        self.algebra
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_full(&self) -> bool {
        self.level == self.m_top
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CoordId] {
        &self.coords
    }

    pub fn index_of(&self, c: CoordId) -> Option<usize> {
        self.pos.get(&c).copied()
    }

    /// Embeds a point of this chart into the full chart of the same
    /// algebra, zero-filling the missing coordinates.
    pub fn embed_into(&self, full: &PhaseSpace, point: &[Q]) -> Result<Vec<Q>> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        let mut out = vec![Q::from_integer(0.into()); full.dim()];
        for (i, &c) in self.coords.iter().enumerate() {
            let j = full.index_of(c).ok_or_else(|| {
                Error::Internal(format!("coordinate {c:?} missing from full chart"))
            })?;
            out[j] = point[i].clone();
        }
        Ok(out)
    }

    /// The special point L_0: every coordinate zero except y over the
    /// simple roots, where y_{α_i} = b_i. Full chart only.
    pub fn point_l0(&self, rs: &RootSystem, b: &[Q]) -> Result<Vec<Q>> {
        if b.len() != rs.rank() {
            return Err(Error::DimensionMismatch {
                expected: rs.rank(),
                got: b.len(),
            });
        }
        let mut p = vec![Q::from_integer(0.into()); self.dim()];
        for (idx, r) in rs.positives().iter().enumerate() {
            if r.height() == 1 {
                let simple = r
                    .coeffs
                    .iter()
                    .position(|&a| a == 1)
                    .expect("height-1 root is simple");
                let at = self.index_of(CoordId::upper(idx)).ok_or_else(|| {
                    Error::Internal("L0 needs the simple-root y coordinates".to_string())
                })?;
                p[at] = b[simple].clone();
            }
        }
        Ok(p)
    }
}

/// Loop-algebra grade of λ^k e_α (or a Cartan element with height 0):
/// |α| + (|β|+1)·k.
pub fn grade_of(m_top: usize, lambda_pow: i64, root_height: i64) -> i64 {
    root_height + (m_top as i64 + 1) * lambda_pow
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{AlgebraType, Family};
    use crate::scalar::qi;
    use num_traits::Zero;

    fn rs(f: Family, l: usize) -> RootSystem {
        RootSystem::build(AlgebraType::new(f, l).unwrap()).unwrap()
    }

    #[test]
    fn full_space_has_dim_g_coordinates() {
        for (f, l) in [
            (Family::A, 2),
            (Family::B, 3),
            (Family::C, 3),
            (Family::D, 4),
            (Family::G, 2),
        ] {
            let sys = rs(f, l);
            let ps = PhaseSpace::full(&sys);
            assert_eq!(ps.dim(), sys.dim(), "{f:?}{l}");
        }
    }

    #[test]
    fn a2_levels() {
        let sys = rs(Family::A, 2);
        let full = PhaseSpace::make(&sys, 2).unwrap();
        assert_eq!(full.dim(), 8);
        // Level 1: x_1, x_2, x_{−α1}, x_{−α2}, y_β.
        let t1 = PhaseSpace::make(&sys, 1).unwrap();
        assert_eq!(t1.dim(), 5);
        let beta = sys.position_of(&[1, 1]).unwrap();
        assert!(t1.index_of(CoordId::upper(beta)).is_some());
        let a1 = sys.position_of(&[1, 0]).unwrap();
        assert!(t1.index_of(CoordId::upper(a1)).is_none());
        assert!(t1.index_of(CoordId::lower(a1)).is_some());
    }

    /// For sl_n the level-k chart must match the band matrix with k free
    /// subdiagonals: n−1 diagonal coordinates, Σ_{r≤k}(n−r) subdiagonal,
    /// and k(k+1)/2 top-corner λ^{-1} entries, i.e. (n−1) + k·n in total.
    #[test]
    fn sl_n_band_matrix_count() {
        for n in 2..=7usize {
            let sys = rs(Family::A, n - 1);
            for k in 1..=sys.m_top() {
                let ps = PhaseSpace::make(&sys, k).unwrap();
                assert_eq!(ps.dim(), (n - 1) + k * n, "sl_{n} level {k}");
            }
        }
    }

    #[test]
    fn g2_full_is_14() {
        let sys = rs(Family::G, 2);
        let ps = PhaseSpace::make(&sys, 5).unwrap();
        assert_eq!(ps.dim(), 14);
    }

    #[test]
    fn charts_are_nested() {
        let sys = rs(Family::B, 3);
        let mut prev: Option<PhaseSpace> = None;
        for k in 1..=sys.m_top() {
            let ps = PhaseSpace::make(&sys, k).unwrap();
            if let Some(p) = &prev {
                for c in p.coords() {
                    assert!(ps.index_of(*c).is_some(), "level {k} lost {c:?}");
                }
            }
            prev = Some(ps);
        }
    }

    #[test]
    fn grade_examples() {
        // f = Σ e_i + λ e_{−β} sits in grade 1.
        let m = 5;
        assert_eq!(grade_of(m, 1, -(m as i64)), 1);
        assert_eq!(grade_of(m, 0, 1), 1);
        assert_eq!(grade_of(m, 0, 0), 0);
        assert_eq!(grade_of(m, -1, m as i64), -1);
    }

    #[test]
    fn z_order_is_cartan_lower_upper_with_heights_ascending() {
        let sys = rs(Family::A, 3);
        let ps = PhaseSpace::full(&sys);
        let l = sys.rank();
        let n = sys.n_positive();
        for i in 0..l {
            assert_eq!(ps.coords()[i], CoordId::cartan(i));
        }
        let mut last_height = 0;
        for t in 0..n {
            let c = ps.coords()[l + t];
            assert_eq!(c.kind, CoordKind::LowerX);
            let h = sys.positives()[c.index].height();
            assert!(h >= last_height);
            last_height = h;
            // y block mirrors the same root order.
            let y = ps.coords()[l + n + t];
            assert_eq!(y.kind, CoordKind::UpperY);
            assert_eq!(y.index, c.index);
        }
    }

    #[test]
    fn l0_point_has_b_on_simple_y() {
        let sys = rs(Family::A, 2);
        let ps = PhaseSpace::full(&sys);
        let p = ps.point_l0(&sys, &[qi(2), qi(3)]).unwrap();
        let a1 = sys.position_of(&[1, 0]).unwrap();
        let a2 = sys.position_of(&[0, 1]).unwrap();
        let beta = sys.position_of(&[1, 1]).unwrap();
        assert_eq!(p[ps.index_of(CoordId::upper(a1)).unwrap()], qi(2));
        assert_eq!(p[ps.index_of(CoordId::upper(a2)).unwrap()], qi(3));
        assert_eq!(p[ps.index_of(CoordId::upper(beta)).unwrap()], qi(0));
        for (v, c) in p.iter().zip(ps.coords()) {
            if c.kind != CoordKind::UpperY {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn level_bounds_enforced() {
        let sys = rs(Family::A, 2);
        assert!(PhaseSpace::make(&sys, 0).is_err());
        assert!(PhaseSpace::make(&sys, 3).is_err());
    }

    #[test]
    fn embed_zero_fills() {
        let sys = rs(Family::A, 2);
        let t1 = PhaseSpace::make(&sys, 1).unwrap();
        let full = PhaseSpace::full(&sys);
        let p: Vec<_> = (0..t1.dim()).map(|i| qi(i as i64 + 1)).collect();
        let e = t1.embed_into(&full, &p).unwrap();
        assert_eq!(e.len(), full.dim());
        for (i, &c) in t1.coords().iter().enumerate() {
            assert_eq!(e[full.index_of(c).unwrap()], p[i]);
        }
        let beta = sys.position_of(&[1, 1]).unwrap();
        assert!(e[full.index_of(CoordId::lower(beta)).unwrap()].is_zero());
    }
}
