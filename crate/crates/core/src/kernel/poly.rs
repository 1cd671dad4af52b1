//! Sparse multivariate polynomials over `Rational`.
//!
//! Every polynomial lives in a fixed symbol universe
//! `{u_1, .., u_n, eps, theta, mu, z}` chosen once per run. Exponent vectors
//! are dense over that universe and terms are stored in a `BTreeMap`, so the
//! term order (lexicographic, `u_1` most significant) is canonical and
//! iteration is deterministic. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::rational::{factorial, format_rational, Rational};

/// Index of a symbol inside a [`Universe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The symbol universe `{u_1..u_n, eps, theta, mu, z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    n: usize,
}

impl Universe {
    pub fn new(n: usize) -> Self {
        Universe { n }
    }

    /// Number of chart coordinates `u_i`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 4
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate `u_i`, one-based.
    pub fn u(&self, i: usize) -> Var {
        assert!(i >= 1 && i <= self.n, "u_{i} outside u_1..u_{}", self.n);
        Var(i - 1)
    }

    pub fn eps(&self) -> Var {
        Var(self.n)
    }

    pub fn theta(&self) -> Var {
        Var(self.n + 1)
    }

    pub fn mu(&self) -> Var {
        Var(self.n + 2)
    }

    pub fn z(&self) -> Var {
        Var(self.n + 3)
    }

    pub fn u_vars(&self) -> impl Iterator<Item = Var> {
        (0..self.n).map(Var)
    }

    pub fn is_u(&self, v: Var) -> bool {
        v.0 < self.n
    }

    pub fn name(&self, v: Var) -> String {
        let i = v.0;
        if i < self.n {
            format!("u_{}", i + 1)
        } else {
            match i - self.n {
                0 => "eps".into(),
                1 => "theta".into(),
                2 => "mu".into(),
                3 => "z".into(),
                _ => panic!("variable index {i} outside universe"),
            }
        }
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        match name {
            "eps" => Some(self.eps()),
            "theta" => Some(self.theta()),
            "mu" => Some(self.mu()),
            "z" => Some(self.z()),
            _ => {
                let i: usize = name.strip_prefix("u_")?.parse().ok()?;
                (i >= 1 && i <= self.n).then(|| self.u(i))
            }
        }
    }
}

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    universe: Universe,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(universe: Universe) -> Self {
        Poly {
            universe,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(universe: Universe) -> Self {
        Self::constant(universe, Rational::one())
    }

    pub fn constant(universe: Universe, c: Rational) -> Self {
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms.insert(vec![0; universe.len()], c);
        }
        p
    }

    pub fn var(universe: Universe, v: Var) -> Self {
        Self::monomial(universe, &[(v, 1)], Rational::one())
    }

    /// `c * prod v^e` over the listed factors.
    pub fn monomial(universe: Universe, factors: &[(Var, u32)], c: Rational) -> Self {
        let mut exps = vec![0; universe.len()];
        for &(v, e) in factors {
            exps[v.0] += e;
        }
        Self::from_terms(universe, [(exps, c)])
    }

    pub fn from_terms(
        universe: Universe,
        terms: impl IntoIterator<Item = (Exponents, Rational)>,
    ) -> Self {
        let mut p = Self::zero(universe);
        for (exps, c) in terms {
            assert_eq!(exps.len(), universe.len(), "exponent vector length");
            p.add_term(exps, c);
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.universe.len()])
    }

    /// The value if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.0]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v.0] > 0)
    }

    /// Symbols with a positive exponent somewhere in the polynomial.
    pub fn support(&self) -> Vec<Var> {
        (0..self.universe.len())
            .map(Var)
            .filter(|&v| self.depends_on(v))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Self::zero(self.universe);
        }
        Poly {
            universe: self.universe,
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Self::one(self.universe);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Iterated partial derivative `d^order / dv^order`.
    pub fn diff(&self, v: Var, order: u32) -> Poly {
        if order == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.universe);
        for (e, c) in &self.terms {
            let d = e[v.0];
            if d < order {
                continue;
            }
            // falling factorial d (d-1) .. (d-order+1)
            let ff = factorial(d as u64) / factorial((d - order) as u64);
            let mut ne = e.clone();
            ne[v.0] -= order;
            out.add_term(ne, c * Rational::from_integer(ff));
        }
        out
    }

    /// Substitutes 0 for every listed symbol.
    pub fn eval_at_zero(&self, vars: &[Var]) -> Poly {
        Poly {
            universe: self.universe,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| vars.iter().all(|v| e[v.0] == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes 0 for all chart coordinates `u_1..u_n`.
    pub fn eval_u_at_zero(&self) -> Poly {
        let vars: Vec<Var> = self.universe.u_vars().collect();
        self.eval_at_zero(&vars)
    }

    /// Substitutes the rational `value` for `v`.
    pub fn eval_var(&self, v: Var, value: &Rational) -> Poly {
        let mut out = Self::zero(self.universe);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let d = ne[v.0];
            ne[v.0] = 0;
            out.add_term(ne, c * num_traits::pow(value.clone(), d as usize));
        }
        out
    }

    /// Coefficient with respect to the listed symbols: the terms whose
    /// exponents in those symbols are exactly as given, with those symbols
    /// removed.
    pub fn coefficient_of(&self, factors: &[(Var, u32)]) -> Poly {
        let mut out = Self::zero(self.universe);
        for (e, c) in &self.terms {
            if factors.iter().all(|&(v, k)| e[v.0] == k) {
                let mut ne = e.clone();
                for &(v, _) in factors {
                    ne[v.0] = 0;
                }
                out.add_term(ne, c.clone());
            }
        }
        out
    }

    /// Drops every term whose degree in `v` exceeds `max_degree`.
    pub fn truncate_degree(&self, v: Var, max_degree: u32) -> Poly {
        Poly {
            universe: self.universe,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[v.0] <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient by `v^k`, or `None` when some term has degree below `k`.
    pub fn div_var_power(&self, v: Var, k: u32) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[v.0] < k {
                return None;
            }
            let mut ne = e.clone();
            ne[v.0] -= k;
            terms.insert(ne, c.clone());
        }
        Some(Poly {
            universe: self.universe,
            terms,
        })
    }

    pub fn is_divisible_by_var_power(&self, v: Var, k: u32) -> bool {
        self.terms.keys().all(|e| e[v.0] >= k)
    }

    /// Ring homomorphism sending each listed symbol to a polynomial; other
    /// symbols are fixed.
    pub fn substitute(&self, images: &[(Var, Poly)]) -> Poly {
        let mut out = Self::zero(self.universe);
        // cache powers of each image
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|_| vec![Self::one(self.universe)])
            .collect();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let mut term = Self::one(self.universe);
            for (slot, (v, img)) in images.iter().enumerate() {
                let d = e[v.0] as usize;
                ne[v.0] = 0;
                while powers[slot].len() <= d {
                    let next = powers[slot].last().unwrap() * img;
                    powers[slot].push(next);
                }
                term = &term * &powers[slot][d];
            }
            let rest = Poly::from_terms(self.universe, [(ne, c.clone())]);
            out += &(&term * &rest);
        }
        out
    }

    /// Monomial text such as `eps^2*theta`; `"1"` for the empty monomial.
    pub fn monomial_name(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = self.universe.name(Var(i));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Monomial text to coefficient text, the external JSON form.
    pub fn coefficient_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(e, c)| (self.monomial_name(e), format_rational(c)))
            .collect()
    }

    fn check_universe(&self, other: &Poly) {
        assert_eq!(
            self.universe, other.universe,
            "polynomials from different symbol universes"
        );
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.coefficient_map(), s)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mono = self.monomial_name(e);
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            if mono == "1" {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.check_universe(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        self.check_universe(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_universe(rhs);
        let mut out = Poly::zero(self.universe);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            universe: self.universe,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Symbolic constructors bound to one universe, for terse expression code.
#[derive(Clone, Copy, Debug)]
pub struct Sym {
    pub universe: Universe,
}

impl Sym {
    pub fn new(universe: Universe) -> Self {
        Sym { universe }
    }

    pub fn u(&self, i: usize) -> Poly {
        Poly::var(self.universe, self.universe.u(i))
    }

    pub fn eps(&self) -> Poly {
        Poly::var(self.universe, self.universe.eps())
    }

    pub fn theta(&self) -> Poly {
        Poly::var(self.universe, self.universe.theta())
    }

    pub fn mu(&self) -> Poly {
        Poly::var(self.universe, self.universe.mu())
    }

    pub fn z(&self) -> Poly {
        Poly::var(self.universe, self.universe.z())
    }

    pub fn c(&self, value: Rational) -> Poly {
        Poly::constant(self.universe, value)
    }

    pub fn int(&self, value: i64) -> Poly {
        Poly::constant(self.universe, super::rational::rat(value))
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.universe)
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.universe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::{rat, ratio};

    fn sym() -> Sym {
        Sym::new(Universe::new(3))
    }

    #[test]
    fn difference_of_squares() {
        let s = sym();
        let p = (s.u(2) + s.one()) * (s.u(2) - s.one());
        assert_eq!(p, s.u(2).pow(2) - s.one());
    }

    #[test]
    fn zeroth_power_is_one() {
        let s = sym();
        assert_eq!((s.theta() - s.eps()).pow(0), s.one());
    }

    #[test]
    fn binomial_square() {
        let s = sym();
        let expected = s.theta().pow(2) - s.int(2) * s.theta() * s.eps() + s.eps().pow(2);
        assert_eq!((s.theta() - s.eps()).pow(2), expected);
    }

    #[test]
    fn power_rule_derivatives() {
        let s = sym();
        let u2 = s.universe.u(2);
        assert_eq!(s.u(2).pow(3).diff(u2, 2), s.int(6) * s.u(2));
        assert_eq!((s.theta() * s.u(2)).diff(u2, 1), s.theta());
        assert!(s.u(2).pow(2).diff(u2, 3).is_zero());
    }

    #[test]
    fn evaluation_at_zero() {
        let s = sym();
        let uni = s.universe;
        assert_eq!((s.u(2) + s.theta()).eval_at_zero(&[uni.u(2)]), s.theta());
        assert!((s.u(2) * s.u(3)).eval_at_zero(&[uni.u(3)]).is_zero());
        let c = s.c(ratio(5, 3));
        assert_eq!(c.eval_at_zero(&[uni.u(2)]), c);
    }

    #[test]
    fn no_zero_coefficients_are_stored() {
        let s = sym();
        let p = s.u(1) + s.u(2) - s.u(1);
        assert_eq!(p.num_terms(), 1);
        assert!((s.u(3) - s.u(3)).is_zero());
    }

    #[test]
    fn substitution_and_division() {
        let s = sym();
        let uni = s.universe;
        // z_1 = u_1, z_2 = u_1 u_2
        let p = s.u(2).pow(2) + s.u(1) * s.u(2);
        let q = p.substitute(&[(uni.u(2), s.u(1) * s.u(2))]);
        assert_eq!(q, s.u(1).pow(2) * (s.u(2).pow(2) + s.u(2)));
        assert_eq!(
            q.div_var_power(uni.u(1), 2).unwrap(),
            s.u(2).pow(2) + s.u(2)
        );
        assert!(q.div_var_power(uni.u(1), 3).is_none());
    }

    #[test]
    fn coefficient_extraction() {
        let s = sym();
        let uni = s.universe;
        let p = s.u(3).pow(2) * (s.int(3) + s.u(2)) + s.u(3) * s.theta();
        assert_eq!(
            p.coefficient_of(&[(uni.u(3), 2)]),
            s.int(3) + s.u(2)
        );
        assert_eq!(p.coefficient_of(&[(uni.u(3), 1)]), s.theta());
    }

    #[test]
    fn display_form() {
        let s = sym();
        let p = s.int(2) * s.theta() * s.eps() - s.c(ratio(4, 3)) * s.mu() * s.eps().pow(3);
        assert_eq!(p.to_string(), "2*eps*theta - 4/3*eps^3*mu");
        assert_eq!(s.zero().to_string(), "0");
        assert_eq!((s.one() - s.u(1)).to_string(), "1 - u_1");
        let map = p.coefficient_map();
        assert_eq!(map.get("eps*theta").unwrap(), "2");
        assert_eq!(rat(0), s.zero().constant_term());
    }
}
