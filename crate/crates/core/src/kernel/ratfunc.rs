//! Univariate rational functions in `z` and their Laurent residues.

use std::fmt;

use num_traits::Zero;

use super::poly::Poly;
use super::rational::{format_rational, Rational};
use super::univariate::{series_quotient, UniPoly};
use crate::error::{Error, Result};

/// A point of the Riemann sphere at which a residue is taken.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pole {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pole::Finite(c) => write!(f, "{}", format_rational(c)),
            Pole::Infinity => write!(f, "infinity"),
        }
    }
}

/// `numerator / denominator`, coprime, with a monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction1V {
    numerator: UniPoly,
    denominator: UniPoly,
}

impl RationalFunction1V {
    pub fn new(numerator: UniPoly, denominator: UniPoly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if numerator.is_zero() {
            return Ok(Self::zero());
        }
        let g = UniPoly::gcd(&numerator, &denominator);
        let num = numerator.div_rem(&g).0;
        let den = denominator.div_rem(&g).0;
        let lead = den.leading().recip();
        Ok(RationalFunction1V {
            numerator: num.scale(&lead),
            denominator: den.scale(&lead),
        })
    }

    /// Builds from two polynomials that depend on `z` only.
    pub fn from_polys(numerator: &Poly, denominator: &Poly) -> Result<Self> {
        Self::new(to_univariate_z(numerator)?, to_univariate_z(denominator)?)
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RationalFunction1V {
            numerator: p,
            denominator: UniPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator);
        let den = &self.denominator * &other.denominator;
        Self::new(num, den).expect("product of nonzero denominators")
    }

    /// Poles in the finite plane with their orders, ascending.
    pub fn poles(&self) -> Result<Vec<(Rational, u32)>> {
        let roots = self.denominator.rational_roots()?;
        Ok(roots
            .into_iter()
            .map(|r| {
                let m = self.denominator.root_multiplicity(&r);
                (r, m)
            })
            .collect())
    }

    /// Whether the differential `f dz` is singular at infinity.
    pub fn has_pole_at_infinity(&self) -> bool {
        match (self.numerator.degree(), self.denominator.degree()) {
            (Some(p), Some(q)) => p + 1 >= q,
            _ => false,
        }
    }

    /// Coefficient of `(z - pole)^-1` in `f dz`. At infinity this is the
    /// residue of `-f(1/w) / w^2 dw` at `w = 0`.
    pub fn laurent_residue(&self, pole: &Pole) -> Result<Rational> {
        match pole {
            Pole::Finite(c) => self.residue_at(c),
            Pole::Infinity => Ok(self.residue_at_infinity()),
        }
    }

    fn residue_at(&self, c: &Rational) -> Result<Rational> {
        if !self.denominator.eval(c).is_zero() {
            return Err(Error::NotAPole(format_rational(c)));
        }
        // f(c + t) = N(c+t) / (t^m E(t)) with E(0) != 0
        let num = self.numerator.taylor_shift(c);
        let den = self.denominator.taylor_shift(c);
        let m = den.coeffs().iter().take_while(|x| x.is_zero()).count();
        let unit = UniPoly::from_coeffs(den.coeffs()[m..].to_vec());
        let series = series_quotient(&num, &unit, m - 1);
        Ok(series[m - 1].clone())
    }

    fn residue_at_infinity(&self) -> Rational {
        let (Some(p), Some(q)) = (self.numerator.degree(), self.denominator.degree()) else {
            return Rational::zero();
        };
        // -f(1/w)/w^2 = -w^(q-p-2) N*(w) / D*(w)
        if p + 1 < q {
            return Rational::zero();
        }
        let order = p + 1 - q;
        let num_rev = self.numerator.reversed(p);
        let den_rev = self.denominator.reversed(q);
        let series = series_quotient(&num_rev, &den_rev, order);
        -series[order].clone()
    }

    /// Residues at every finite pole followed by infinity.
    pub fn all_residues(&self) -> Result<Vec<(Pole, Rational)>> {
        let mut out = Vec::new();
        for (c, _) in self.poles()? {
            let r = self.residue_at(&c)?;
            out.push((Pole::Finite(c), r));
        }
        out.push((Pole::Infinity, self.residue_at_infinity()));
        Ok(out)
    }

    /// Like [`Self::all_residues`] but with the finite poles drawn from
    /// `candidates`; fails unless the candidates exhaust the denominator.
    pub fn residues_at_candidates(&self, candidates: &[Rational]) -> Result<Vec<(Pole, Rational)>> {
        let mut rest = self.denominator.clone();
        let mut out = Vec::new();
        let mut seen: Vec<&Rational> = Vec::new();
        for c in candidates {
            if seen.contains(&c) || !rest.eval(c).is_zero() {
                continue;
            }
            seen.push(c);
            let m = rest.root_multiplicity(c);
            rest = rest.div_rem(&UniPoly::linear_root(c).pow(m)).0;
            out.push((Pole::Finite(c.clone()), self.residue_at(c)?));
        }
        if rest.degree() != Some(0) {
            return Err(Error::CrossCheckFailed(format!(
                "denominator factor {rest} has roots outside the candidate poles"
            )));
        }
        out.sort();
        out.push((Pole::Infinity, self.residue_at_infinity()));
        Ok(out)
    }

    /// Sum of all residues on the sphere; zero for every rational function.
    pub fn residue_sum(&self) -> Result<Rational> {
        Ok(self
            .all_residues()?
            .into_iter()
            .fold(Rational::zero(), |acc, (_, r)| acc + r))
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.denominator.eval(x);
        (!d.is_zero()).then(|| self.numerator.eval(x) / d)
    }
}

impl fmt::Display for RationalFunction1V {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == UniPoly::one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

impl fmt::Debug for RationalFunction1V {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction1V({self})")
    }
}

/// Reads a polynomial in `z` alone as a dense univariate polynomial.
pub fn to_univariate_z(p: &Poly) -> Result<UniPoly> {
    let universe = p.universe();
    let z = universe.z();
    if let Some(v) = p.support().into_iter().find(|&v| v != z) {
        return Err(Error::NotUnivariate(universe.name(v)));
    }
    let deg = p.degree_in(z) as usize;
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for (e, c) in p.terms() {
        coeffs[e[z.index()] as usize] = c.clone();
    }
    Ok(UniPoly::from_coeffs(coeffs))
}

pub fn from_univariate_z(universe: super::poly::Universe, p: &UniPoly) -> Poly {
    let z = universe.z();
    let mut out = Poly::zero(universe);
    for (i, c) in p.coeffs().iter().enumerate() {
        out += &Poly::monomial(universe, &[(z, i as u32)], c.clone());
    }
    out
}
