//! Polynomials truncated in `eps`-degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{Poly, Universe};
use super::rational::Rational;

/// A polynomial modulo `eps^(eps_cap + 1)`: no stored monomial has
/// `eps`-degree above `eps_cap`.
#[derive(Clone, PartialEq, Eq)]
pub struct EpsExpansion {
    body: Poly,
    eps_cap: u32,
}

impl EpsExpansion {
    pub fn new(body: Poly, eps_cap: u32) -> Self {
        let eps = body.universe().eps();
        EpsExpansion {
            body: body.truncate_degree(eps, eps_cap),
            eps_cap,
        }
    }

    pub fn zero(universe: Universe, eps_cap: u32) -> Self {
        EpsExpansion {
            body: Poly::zero(universe),
            eps_cap,
        }
    }

    pub fn body(&self) -> &Poly {
        &self.body
    }

    pub fn eps_cap(&self) -> u32 {
        self.eps_cap
    }

    pub fn universe(&self) -> Universe {
        self.body.universe()
    }

    /// Coefficient of `eps^power`, a polynomial free of `eps`.
    pub fn coefficient(&self, power: u32) -> Poly {
        let eps = self.universe().eps();
        self.body.coefficient_of(&[(eps, power)])
    }

    /// True when the coefficients of `eps^0 .. eps^(order-1)` all vanish.
    pub fn vanishes_below(&self, order: u32) -> bool {
        (0..order).all(|j| self.coefficient(j).is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        EpsExpansion {
            body: self.body.scale(c),
            eps_cap: self.eps_cap,
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::new(&self.body * p, self.eps_cap)
    }
}

impl fmt::Display for EpsExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(eps^{})", self.body, self.eps_cap + 1)
    }
}

impl fmt::Debug for EpsExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpsExpansion({self})")
    }
}

impl Add<&EpsExpansion> for &EpsExpansion {
    type Output = EpsExpansion;
    fn add(self, rhs: &EpsExpansion) -> EpsExpansion {
        EpsExpansion::new(&self.body + &rhs.body, self.eps_cap.min(rhs.eps_cap))
    }
}

impl Sub<&EpsExpansion> for &EpsExpansion {
    type Output = EpsExpansion;
    fn sub(self, rhs: &EpsExpansion) -> EpsExpansion {
        EpsExpansion::new(&self.body - &rhs.body, self.eps_cap.min(rhs.eps_cap))
    }
}

impl Mul<&EpsExpansion> for &EpsExpansion {
    type Output = EpsExpansion;
    fn mul(self, rhs: &EpsExpansion) -> EpsExpansion {
        let cap = self.eps_cap.min(rhs.eps_cap);
        let eps = self.universe().eps();
        // truncate factors first so the product never grows past the cap
        let a = self.body.truncate_degree(eps, cap);
        let b = rhs.body.truncate_degree(eps, cap);
        EpsExpansion::new(&a * &b, cap)
    }
}

impl Neg for &EpsExpansion {
    type Output = EpsExpansion;
    fn neg(self) -> EpsExpansion {
        EpsExpansion {
            body: -&self.body,
            eps_cap: self.eps_cap,
        }
    }
}
