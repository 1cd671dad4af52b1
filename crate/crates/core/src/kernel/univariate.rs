//! Dense univariate polynomials over `Rational`, with exact rational root
//! extraction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Coefficients in ascending degree; empty for zero, last entry nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `x - root`.
    pub fn linear_root(root: &Rational) -> Self {
        Self::from_coeffs(vec![-root.clone(), Rational::one()])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `p(c + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, c: &Rational) -> Self {
        let step = Self::from_coeffs(vec![c.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, coef| &(&acc * &step) + &Self::constant(coef.clone()))
    }

    /// `w^d p(1/w)` for `d >= deg p`.
    pub fn reversed(&self, d: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c.clone();
        }
        Self::from_coeffs(coeffs)
    }

    /// Exact quotient and remainder.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let q = &rem[i + dd] * &lead_inv;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * dc;
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Distinct-root part `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return Self::one();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Largest `m` with `(x - root)^m | p`.
    pub fn root_multiplicity(&self, root: &Rational) -> u32 {
        let lin = Self::linear_root(root);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() && p.eval(root).is_zero() {
            p = p.div_rem(&lin).0;
            m += 1;
        }
        m
    }

    /// All distinct roots, in increasing order.
    ///
    /// Fails with [`Error::IrrationalPole`] when some complex root of `p` is
    /// not rational.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let sqf = self.squarefree_part();
        let Some(degree) = sqf.degree().filter(|&d| d > 0) else {
            return Ok(Vec::new());
        };
        // Denominators of rational roots divide the leading coefficient of
        // the primitive integer multiple.
        let lead_bound = primitive_leading(&sqf);
        let gap = Rational::new(BigInt::one(), &lead_bound * &lead_bound);
        let bound = cauchy_bound(&sqf);

        let mut roots: Vec<Rational> = Vec::new();
        let mut current = sqf.clone();
        'restart: loop {
            if current.degree().unwrap_or(0) == 0 {
                break;
            }
            let sturm = sturm_sequence(&current);
            let lo = -bound.clone();
            let hi = bound.clone();
            let total = sign_variations(&sturm, &lo) - sign_variations(&sturm, &hi);
            if total != current.degree().unwrap() {
                return Err(Error::IrrationalPole);
            }
            let mut stack = vec![(lo, hi, total)];
            let mut found = Vec::new();
            while let Some((lo, hi, count)) = stack.pop() {
                if count == 0 {
                    continue;
                }
                if count == 1 && &hi - &lo < gap {
                    let cand = simplest_between(&lo, &hi);
                    if !current.eval(&cand).is_zero() {
                        return Err(Error::IrrationalPole);
                    }
                    found.push(cand);
                    continue;
                }
                let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
                if current.eval(&mid).is_zero() {
                    // deflate and start over so Sturm endpoints stay root-free
                    roots.push(mid.clone());
                    current = current.div_rem(&UniPoly::linear_root(&mid)).0;
                    continue 'restart;
                }
                let vm = sign_variations(&sturm, &mid);
                let left = sign_variations(&sturm, &lo) - vm;
                stack.push((lo, mid.clone(), left));
                stack.push((mid, hi, count - left));
            }
            roots.extend(found);
            break;
        }
        roots.sort();
        roots.dedup();
        debug_assert_eq!(roots.len(), degree);
        Ok(roots)
    }
}

fn cauchy_bound(p: &UniPoly) -> Rational {
    let lead = p.leading();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| (c / &lead).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::one() + max
}

fn primitive_leading(p: &UniPoly) -> BigInt {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    (ints.last().unwrap() / content).abs()
}

fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn sign_variations(seq: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// The rational with least denominator in the closed interval `[lo, hi]`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Power series coefficients `0..=order` of `num / den`; needs `den(0) != 0`.
pub fn series_quotient(num: &UniPoly, den: &UniPoly, order: usize) -> Vec<Rational> {
    let d0 = den.coeff(0);
    assert!(!d0.is_zero(), "series quotient needs a unit constant term");
    let d0_inv = d0.recip();
    let mut out: Vec<Rational> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = num.coeff(k);
        for j in 1..=k.min(den.degree().unwrap_or(0)) {
            acc -= den.coeff(j) * &out[k - j];
        }
        out.push(acc * &d0_inv);
    }
    out
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("{}*z", format_rational(c)),
                _ => format!("{}*z^{i}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}
