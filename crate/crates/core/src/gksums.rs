//! The eigenvalue sums `G_k`, `G'_k`, `G''_k`, `G'''_k` that collect the
//! exceptional-divisor residues, their closed forms, and the residue
//! computation on the Riemann sphere that proves them.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::weak_compositions;
use crate::error::{Error, Result};
use crate::jordan::JordanData;
use crate::kernel::rational::{binomial, binomial_rat, pow_signed, rat, sign_power, Rational};
use crate::kernel::{Pole, RationalFunction1V, UniPoly};

/// `sum_{j=0}^{l} (-1)^j C(l, j) (l - 2j)^k`.
pub fn combinatorial_identity(l: u32, k: u32) -> BigInt {
    (0..=l as i64)
        .map(|j| {
            let term = binomial(l as i64, j) * num_traits::pow(BigInt::from(l as i64 - 2 * j), k as usize);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// Values the identity is known to take: `0` for `k < l` or `k = l + 1`,
/// `2^l l!` for `k = l`; `None` otherwise.
pub fn combinatorial_identity_expected(l: u32, k: u32) -> Option<BigInt> {
    if k < l || k == l + 1 {
        Some(BigInt::zero())
    } else if k == l {
        Some(num_traits::pow(BigInt::from(2), l as usize) * crate::kernel::rational::factorial(l as u64))
    } else {
        None
    }
}

/// `sum_{mu} (-1)^{n_j + mu_j} / a_j^{mu_j + offset} prod_{l != j}
/// C(n_l + mu_l - 1, mu_l) / (a_l - a_j)^{n_l + mu_l}` over ordered
/// compositions `mu` of `target` into `m` parts; zero for negative targets.
fn inner_sum(data: &JordanData, j: usize, target: i64, offset: i64) -> Rational {
    let m = data.num_blocks();
    let aj = data.eigenvalue(j);
    let nj = data.size(j) as i64;
    let mut acc = Rational::zero();
    for mu in weak_compositions(target, m) {
        let mut term = sign_power(nj + mu[j] as i64) / pow_signed(aj, mu[j] as i64 + offset);
        for l in (0..m).filter(|&l| l != j) {
            let (nl, ml) = (data.size(l) as i64, mu[l] as i64);
            term *= binomial_rat(nl + ml - 1, ml) / pow_signed(&(data.eigenvalue(l) - aj), nl + ml);
        }
        acc += term;
    }
    acc
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::IndexOutOfRange { k, max });
    }
    Ok(())
}

/// The triple sum defining `G_k`, evaluated term by term.
pub fn gk_bruteforce(data: &JordanData, k: usize) -> Result<Rational> {
    let n = data.dim();
    check_k(k, n + 1)?;
    let (n, k) = (n as i64, k as i64);
    let mut total = Rational::zero();
    for j in 0..data.num_blocks() {
        let nj = data.size(j) as i64;
        for i in 0..=n + 1 - k {
            total += binomial_rat(n + 1 - k, i) * inner_sum(data, j, nj - i - 1, i + k - n);
        }
    }
    Ok(total)
}

/// `-1/det A` for `k = n + 1`, `0` for `1 < k < n + 1`, `(-1)^n` for `k = 1`.
pub fn gk_closed_form(data: &JordanData, k: usize) -> Result<Rational> {
    let n = data.dim();
    check_k(k, n + 1)?;
    Ok(if k == n + 1 {
        -data.det().recip()
    } else if k == 1 {
        sign_power(n as i64)
    } else {
        Rational::zero()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTable {
    /// `brute[k - 1]` is `G_k` for `k = 1..=n+1`.
    pub brute: Vec<Rational>,
    pub closed: Vec<Rational>,
}

impl GTable {
    pub fn agree(&self) -> Vec<bool> {
        self.brute.iter().zip(&self.closed).map(|(a, b)| a == b).collect()
    }

    pub fn all_agree(&self) -> bool {
        self.brute == self.closed
    }
}

pub fn gk_table(data: &JordanData) -> Result<GTable> {
    let top = data.dim() + 1;
    Ok(GTable {
        brute: (1..=top).map(|k| gk_bruteforce(data, k)).collect::<Result<_>>()?,
        closed: (1..=top).map(|k| gk_closed_form(data, k)).collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPrimes {
    pub gp: Rational,
    pub gpp: Rational,
    pub gppp: Rational,
    /// `G'_k = Tr(A) G_{k+1}`
    pub trace_identity: bool,
    /// `G''_k + G'''_k = -(n - 1) G_k`
    pub pascal_identity: bool,
}

/// The three sums making up the `I`-residue coefficients, for `1 <= k <= n`.
pub fn g_primes(data: &JordanData, k: usize) -> Result<GPrimes> {
    let n = data.dim();
    check_k(k, n)?;
    let tr = data.trace();
    let (ni, ki) = (n as i64, k as i64);
    let mut gp = Rational::zero();
    let mut gpp = Rational::zero();
    let mut gppp = Rational::zero();
    for j in 0..data.num_blocks() {
        let nj = data.size(j) as i64;
        for i in 0..=ni - ki {
            let c = binomial_rat(ni - ki, i);
            gp += &c * inner_sum(data, j, nj - i - 1, i + ki - ni + 1);
            gpp += &c * inner_sum(data, j, nj - i - 1, i + ki - ni);
        }
        for i in 1..=ni - ki + 1 {
            gppp += binomial_rat(ni - ki, i - 1) * inner_sum(data, j, nj - i - 1, i + ki - ni);
        }
    }
    let scale = rat(1 - ni);
    gp *= tr.clone();
    gpp *= scale.clone();
    gppp *= scale.clone();
    let trace_identity = gp == tr * gk_bruteforce(data, k + 1)?;
    let pascal_identity = &gpp + &gppp == scale * gk_bruteforce(data, k)?;
    Ok(GPrimes {
        gp,
        gpp,
        gppp,
        trace_identity,
        pascal_identity,
    })
}

/// Which differential of the proof to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiFamily {
    KEqNPlus1,
    MidK(usize),
    KEq1,
}

impl PsiFamily {
    pub fn k(&self, n: usize) -> usize {
        match *self {
            PsiFamily::KEqNPlus1 => n + 1,
            PsiFamily::MidK(k) => k,
            PsiFamily::KEq1 => 1,
        }
    }
}

/// Accumulates `c z^e / (z - a_j) prod_{l != j} (a_l - z)^{-p_l}` over a
/// fixed common denominator `z^{z0} (z - a_j) prod_{l != j} (z - a_l)^{cap_l}`.
struct PsiBuilder {
    z0: i64,
    caps: Vec<i64>,
    roots: Vec<Rational>,
    j: usize,
    numerator: UniPoly,
}

impl PsiBuilder {
    fn new(data: &JordanData, j: usize, z0: i64, extra: i64) -> Self {
        let caps = (0..data.num_blocks())
            .map(|l| if l == j { 0 } else { data.size(l) as i64 + extra })
            .collect();
        PsiBuilder {
            z0,
            caps,
            roots: data.eigenvalues(),
            j,
            numerator: UniPoly::zero(),
        }
    }

    fn add(&mut self, c: Rational, e: i64, powers: &[i64]) {
        let mut num = UniPoly::monomial(c, (e + self.z0) as usize);
        let mut sign = 0;
        for (l, root) in self.roots.iter().enumerate() {
            if l == self.j {
                continue;
            }
            // (a_l - z)^{-p} = (-1)^p (z - a_l)^{-p}
            sign += powers[l];
            num = &num * &UniPoly::linear_root(root).pow((self.caps[l] - powers[l]) as u32);
        }
        self.numerator = &self.numerator + &num.scale(&sign_power(sign));
    }

    fn finish(self) -> RationalFunction1V {
        let mut den = UniPoly::monomial(Rational::one(), self.z0 as usize);
        den = &den * &UniPoly::linear_root(&self.roots[self.j]);
        for (l, root) in self.roots.iter().enumerate() {
            if l != self.j {
                den = &den * &UniPoly::linear_root(root).pow(self.caps[l] as u32);
            }
        }
        RationalFunction1V::new(self.numerator, den).expect("nonzero denominator")
    }
}

/// The differential `psi_j` (or `psi_{j,k}`), as a rational function of `z`.
pub fn build_psi(data: &JordanData, family: PsiFamily, j: usize) -> Result<RationalFunction1V> {
    let n = data.dim() as i64;
    let m = data.num_blocks();
    data.focused(j)?;
    let nj = data.size(j) as i64;
    let aj = data.eigenvalue(j).clone();
    if let PsiFamily::MidK(k) = family {
        if k <= 1 || k as i64 >= n + 1 {
            return Err(Error::IndexOutOfRange {
                k,
                max: data.dim(),
            });
        }
    }
    let binom_weight = |l: usize, ml: i64| -> Rational {
        binomial_rat(data.size(l) as i64 + ml - 1, ml)
    };
    let powers_of = |mu: &[u32]| -> Vec<i64> {
        (0..m)
            .map(|l| if l == j { 0 } else { data.size(l) as i64 + mu[l] as i64 })
            .collect()
    };
    let coeff_of = |mu: &[u32]| -> Rational {
        (0..m)
            .filter(|&l| l != j)
            .fold(sign_power(nj + mu[j] as i64), |acc, l| acc * binom_weight(l, mu[l] as i64))
    };
    let others = |mu: &[u32]| -> i64 {
        (0..m).filter(|&l| l != j).map(|l| mu[l] as i64).sum()
    };
    let psi = match family {
        PsiFamily::KEqNPlus1 => {
            let mut b = PsiBuilder::new(data, j, 1, nj - 1);
            for mu in weak_compositions(nj - 1, m) {
                let s = others(&mu);
                let c = coeff_of(&mu) / pow_signed(&aj, mu[j] as i64 + s);
                b.add(c, s - 1, &powers_of(&mu));
            }
            b.finish()
        }
        PsiFamily::MidK(k) => {
            let k = k as i64;
            let mut b = PsiBuilder::new(data, j, 0, nj - 1);
            for i in 0..=n + 1 - k {
                for mu in weak_compositions(nj - i - 1, m) {
                    let s = others(&mu);
                    let c = binomial_rat(n + 1 - k, i) * coeff_of(&mu)
                        / pow_signed(&aj, mu[j] as i64 + i + k - n + s);
                    b.add(c, s, &powers_of(&mu));
                }
            }
            b.finish()
        }
        PsiFamily::KEq1 => {
            let mut b = PsiBuilder::new(data, j, 0, nj - 1);
            for i in 0..=n {
                for mu in weak_compositions(nj - i - 1, m) {
                    let c = binomial_rat(n, i) * coeff_of(&mu);
                    b.add(c, n - 1 - i - mu[j] as i64, &powers_of(&mu));
                }
            }
            b.finish()
        }
    };
    Ok(psi)
}

/// Residue at a finite point, zero when the point is not a pole.
fn residue_or_zero(f: &RationalFunction1V, c: &Rational) -> Result<Rational> {
    if f.denominator().eval(c).is_zero() {
        f.laurent_residue(&Pole::Finite(c.clone()))
    } else {
        Ok(Rational::zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiBlockReport {
    pub block: usize,
    pub psi: RationalFunction1V,
    pub residues: Vec<(Pole, Rational)>,
    /// `res_at_eigenvalues[l]` is the residue at `a_l`.
    pub res_at_eigenvalues: Vec<Rational>,
    pub residue_sum: Rational,
    pub pole_at_zero: bool,
    pub pole_at_infinity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiReport {
    pub family: PsiFamily,
    pub k: usize,
    pub blocks: Vec<PsiBlockReport>,
    /// `sum_j Res_{a_j} psi_j`
    pub recovered_gk: Rational,
    pub closed_gk: Rational,
    pub brute_gk: Rational,
    pub checks: Vec<PsiCheck>,
}

impl PsiReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&PsiCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

pub fn psi_oracle(data: &JordanData, family: PsiFamily) -> Result<PsiReport> {
    let n = data.dim();
    let k = family.k(n);
    let m = data.num_blocks();
    let zero = Rational::zero();
    let mut blocks = Vec::with_capacity(m);
    let mut candidates = data.eigenvalues();
    candidates.push(zero.clone());
    for j in 0..m {
        let psi = build_psi(data, family, j)?;
        let residues = psi.residues_at_candidates(&candidates)?;
        let res_at_eigenvalues = data
            .eigenvalues()
            .iter()
            .map(|a| residue_or_zero(&psi, a))
            .collect::<Result<Vec<_>>>()?;
        let residue_sum = residues.iter().map(|(_, r)| r).sum();
        blocks.push(PsiBlockReport {
            block: j,
            pole_at_zero: psi.denominator().eval(&zero).is_zero(),
            pole_at_infinity: psi.has_pole_at_infinity(),
            psi,
            residues,
            res_at_eigenvalues,
            residue_sum,
        });
    }

    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(PsiCheck {
            name: name.to_string(),
            pass,
            detail,
        })
    };
    for b in &blocks {
        push(
            "residue_sum_zero",
            b.residue_sum.is_zero(),
            format!("psi_{}: total residue {}", b.block + 1, b.residue_sum),
        );
    }
    match family {
        PsiFamily::KEqNPlus1 => {
            let target = data.det().recip();
            for b in &blocks {
                let r0 = residue_or_zero(&b.psi, &zero)?;
                push(
                    "res_zero_is_inverse_det",
                    r0 == target,
                    format!("psi_{}: Res_0 = {r0}, expected {target}", b.block + 1),
                );
                push(
                    "no_pole_at_infinity",
                    !b.pole_at_infinity,
                    format!("psi_{}", b.block + 1),
                );
            }
        }
        PsiFamily::MidK(_) => {
            for b in &blocks {
                push(
                    "no_pole_at_zero_or_infinity",
                    !b.pole_at_zero && !b.pole_at_infinity,
                    format!(
                        "psi_{}: pole at 0 {}, at infinity {}",
                        b.block + 1,
                        b.pole_at_zero,
                        b.pole_at_infinity
                    ),
                );
            }
        }
        PsiFamily::KEq1 => {
            let target = sign_power(n as i64 + 1);
            for b in &blocks {
                let r = b.psi.laurent_residue(&Pole::Infinity)?;
                push(
                    "res_infinity",
                    r == target,
                    format!("psi_{}: Res_inf = {r}, expected {target}", b.block + 1),
                );
            }
        }
    }
    for j in 0..m {
        for l in (0..m).filter(|&l| l != j) {
            let (own, other) = (&blocks[j].res_at_eigenvalues[j], &blocks[l].res_at_eigenvalues[j]);
            push(
                "cross_equality",
                own == other,
                format!(
                    "Res_a{0} psi_{1} = {other}, Res_a{0} psi_{0} = {own}",
                    j + 1,
                    l + 1
                ),
            );
        }
    }
    let recovered_gk: Rational = (0..m).map(|j| blocks[j].res_at_eigenvalues[j].clone()).sum();
    let closed_gk = gk_closed_form(data, k)?;
    let brute_gk = gk_bruteforce(data, k)?;
    push(
        "recovered_gk",
        recovered_gk == closed_gk && recovered_gk == brute_gk,
        format!("recovered {recovered_gk}, closed {closed_gk}, brute {brute_gk}"),
    );
    Ok(PsiReport {
        family,
        k,
        blocks,
        recovered_gk,
        closed_gk,
        brute_gk,
        checks,
    })
}

/// `z^{n-k} / det(A - z)`, one differential for all blocks: its residue at
/// `a_j` is the `j`-th summand of `G_k`, because the Taylor expansion of
/// `z^{n-k}` at `a_j` reproduces the alternating binomial sum over `i`.
pub fn characteristic_psi(data: &JordanData, k: usize) -> Result<RationalFunction1V> {
    let n = data.dim();
    check_k(k, n + 1)?;
    let mut den = UniPoly::constant(sign_power(n as i64));
    for b in data.blocks() {
        den = &den * &UniPoly::linear_root(&b.eigenvalue).pow(b.size as u32);
    }
    let e = n as i64 - k as i64;
    let (num, den) = if e >= 0 {
        (UniPoly::monomial(Rational::one(), e as usize), den)
    } else {
        (UniPoly::one(), &den * &UniPoly::monomial(Rational::one(), (-e) as usize))
    };
    RationalFunction1V::new(num, den)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicReport {
    pub k: usize,
    pub residues: Vec<(Pole, Rational)>,
    /// `sum_j Res_{a_j}`
    pub recovered_gk: Rational,
    pub brute_gk: Rational,
    pub residue_sum: Rational,
}

impl CharacteristicReport {
    pub fn pass(&self) -> bool {
        self.residue_sum.is_zero() && self.recovered_gk == self.brute_gk
    }
}

pub fn characteristic_oracle(data: &JordanData, k: usize) -> Result<CharacteristicReport> {
    let psi = characteristic_psi(data, k)?;
    let recovered_gk = data
        .eigenvalues()
        .iter()
        .map(|a| residue_or_zero(&psi, a))
        .sum::<Result<Rational>>()?;
    let mut candidates = data.eigenvalues();
    candidates.push(Rational::zero());
    let residues = psi.residues_at_candidates(&candidates)?;
    Ok(CharacteristicReport {
        k,
        residue_sum: residues.iter().map(|(_, r)| r).sum(),
        residues,
        recovered_gk,
        brute_gk: gk_bruteforce(data, k)?,
    })
}
