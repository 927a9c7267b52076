//! Laurent polynomials in the loop parameter λ.
//!
//! Coefficients live in any `Scalar`; the degree window is dynamic, so
//! arithmetic widens as needed and can never overflow silently. The zero
//! polynomial is the empty window.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<T> {
    /// λ-degree of coeffs[0]; meaningless when coeffs is empty.
    min: i64,
    /// Trimmed: first and last entries are nonzero unless empty.
    coeffs: Vec<T>,
}

impl<T: Scalar> Laurent<T> {
    pub fn zero() -> Laurent<T> {
        Laurent {
            min: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: T) -> Laurent<T> {
        Laurent::monomial(0, c)
    }

    /// c · λ^k
    pub fn monomial(k: i64, c: T) -> Laurent<T> {
        if c.is_zero() {
            Laurent::zero()
        } else {
            Laurent {
                min: k,
                coeffs: vec![c],
            }
        }
    }

    fn trim(mut self) -> Laurent<T> {
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min = 0;
        }
        self
    }

    /// Coefficient of λ^k.
    pub fn coeff(&self, k: i64) -> T {
        if self.coeffs.is_empty() || k < self.min {
            return T::zero();
        }
        let idx = (k - self.min) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_else(T::zero)
    }

    /// (min degree, max degree) of the nonzero support.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some((self.min, self.min + self.coeffs.len() as i64 - 1))
        }
    }

    /// Degrees with nonzero coefficient, ascending.
    pub fn support_degrees(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.min + i as i64)
            .collect()
    }

    pub fn shift(&self, k: i64) -> Laurent<T> {
        if self.coeffs.is_empty() {
            return Laurent::zero();
        }
        Laurent {
            min: self.min + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, s: &T) -> Laurent<T> {
        Laurent {
            min: self.min,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
        .trim()
    }

    pub fn scale_div(&self, s: &T) -> Laurent<T> {
        Laurent {
            min: self.min,
            coeffs: self.coeffs.iter().map(|c| c.clone() / s.clone()).collect(),
        }
        .trim()
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Laurent<U> {
        Laurent {
            min: self.min,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
        .trim()
    }

    /// Exact quotient self / d, or None when d is zero or does not divide
    /// self without remainder. Long division from the top degree down.
    pub fn div_exact(&self, d: &Laurent<T>) -> Option<Laurent<T>> {
        if d.coeffs.is_empty() {
            return None;
        }
        if self.coeffs.is_empty() {
            return Some(Laurent::zero());
        }
        let (smin, smax) = self.support().unwrap();
        let (dmin, dmax) = d.support().unwrap();
        let qmin = smin - dmin;
        let qmax = smax - dmax;
        if qmax < qmin {
            return None;
        }
        let lead = d.coeff(dmax);
        let mut rem = self.clone();
        let mut qcoeffs = vec![T::zero(); (qmax - qmin + 1) as usize];
        for k in (qmin..=qmax).rev() {
            let c = rem.coeff(k + dmax) / lead.clone();
            if !c.eq_zero() {
                rem = rem - d.scale(&c).shift(k);
                qcoeffs[(k - qmin) as usize] = c;
            }
        }
        if rem.is_zero() {
            Some(
                Laurent {
                    min: qmin,
                    coeffs: qcoeffs,
                }
                .trim(),
            )
        } else {
            None
        }
    }
}

impl<T: Scalar> Zero for Laurent<T> {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> One for Laurent<T> {
    fn one() -> Self {
        Laurent::constant(T::one())
    }
}

impl<T: Scalar> Add for Laurent<T> {
    type Output = Laurent<T>;
    fn add(self, rhs: Laurent<T>) -> Laurent<T> {
        if self.coeffs.is_empty() {
            return rhs;
        }
        if rhs.coeffs.is_empty() {
            return self;
        }
        let (amin, amax) = self.support().unwrap();
        let (bmin, bmax) = rhs.support().unwrap();
        let min = amin.min(bmin);
        let max = amax.max(bmax);
        let mut coeffs = Vec::with_capacity((max - min + 1) as usize);
        for k in min..=max {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Laurent { min, coeffs }.trim()
    }
}

impl<T: Scalar> Sub for Laurent<T> {
    type Output = Laurent<T>;
    fn sub(self, rhs: Laurent<T>) -> Laurent<T> {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for Laurent<T> {
    type Output = Laurent<T>;
    fn neg(self) -> Laurent<T> {
        Laurent {
            min: self.min,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Scalar> Mul for Laurent<T> {
    type Output = Laurent<T>;
    fn mul(self, rhs: Laurent<T>) -> Laurent<T> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Laurent::zero();
        }
        let min = self.min + rhs.min;
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut coeffs = vec![T::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Laurent { min, coeffs }.trim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Q};

    fn lam(k: i64) -> Laurent<Q> {
        Laurent::monomial(k, qi(1))
    }

    #[test]
    fn arithmetic_and_support() {
        // (λ + λ^{-1})(λ - λ^{-1}) = λ² - λ^{-2}
        let p = lam(1) + lam(-1);
        let q = lam(1) - lam(-1);
        let prod = p.clone() * q;
        assert_eq!(prod.coeff(2), qi(1));
        assert_eq!(prod.coeff(-2), qi(-1));
        assert_eq!(prod.coeff(0), qi(0));
        assert_eq!(prod.support(), Some((-2, 2)));
        assert_eq!(prod.support_degrees(), vec![-2, 2]);
    }

    #[test]
    fn cancellation_trims() {
        let p = lam(3) + lam(0);
        let q = Laurent::monomial(3, qi(-1)) + lam(0);
        let s = p + q;
        assert_eq!(s.support(), Some((0, 0)));
        assert_eq!(s.coeff(0), qi(2));
        let z = s.clone() - s;
        assert!(z.is_zero());
        assert_eq!(z.support(), None);
    }

    #[test]
    fn shift_and_scale() {
        let p = lam(0) + lam(2);
        let sh = p.shift(-2);
        assert_eq!(sh.support(), Some((-2, 0)));
        let sc = sh.scale(&qi(3));
        assert_eq!(sc.coeff(-2), qi(3));
        let dv = sc.scale_div(&qi(3));
        assert_eq!(dv, sh);
        assert!(sh.scale(&qi(0)).is_zero());
    }

    #[test]
    fn exact_division() {
        // (λ² - λ^{-2}) / (λ - λ^{-1}) = λ + λ^{-1}
        let num = lam(2) - lam(-2);
        let den = lam(1) - lam(-1);
        let quo = num.div_exact(&den).unwrap();
        assert_eq!(quo, lam(1) + lam(-1));
        // Round trip with a rational-coefficient divisor.
        let d = Laurent::monomial(-1, q(2, 3)) + lam(1);
        let q0 = lam(-2) + Laurent::monomial(0, q(5, 7)) + lam(3);
        let n = q0.clone() * d.clone();
        assert_eq!(n.div_exact(&d).unwrap(), q0);
        // Non-divisible pair and zero divisor both return None.
        assert!(lam(1).div_exact(&(lam(1) + lam(0))).is_none());
        assert!(lam(0).div_exact(&Laurent::zero()).is_none());
        // Zero numerator divides cleanly.
        assert!(Laurent::<Q>::zero().div_exact(&d).unwrap().is_zero());
    }
}
