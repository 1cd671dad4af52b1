//! Residue contributions of zeros of the lifted field: the nondegenerate
//! quotient, the reduced one-block and multi-block sums, and a brute-force
//! evaluation on an explicit certificate matrix.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bmatrix::{build_bmatrix, choose_k, BMatrix};
use crate::combinat::weak_compositions;
use crate::error::{Error, Result};
use crate::jordan::{build_lifted_field, potential_jet, JordanData, LiftedField};
use crate::kernel::rational::{binomial_rat, factorial_rat, pow_signed, sign_power, Rational};
use crate::kernel::{Poly, Sym};

/// A scalar integrand at one zero `q` on the exceptional divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueInput {
    phi: Poly,
    data: JordanData,
    focus: usize,
}

impl ResidueInput {
    /// `phi` may involve `u_2` and the constants `eps, theta, mu` only.
    pub fn new(phi: Poly, data: JordanData, focus: usize) -> Result<Self> {
        data.focused(focus)?;
        let uni = data.universe();
        if phi.universe() != uni {
            return Err(Error::IntegrandNotReduced(format!(
                "integrand lives in dimension {}, data in {}",
                phi.universe().n(),
                uni.n()
            )));
        }
        if let Some(v) = phi
            .support()
            .into_iter()
            .find(|&v| v == uni.z() || (uni.is_u(v) && v != uni.u(2)))
        {
            return Err(Error::IntegrandNotReduced(uni.name(v)));
        }
        Ok(ResidueInput { phi, data, focus })
    }

    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    pub fn data(&self) -> &JordanData {
        &self.data
    }

    pub fn focus(&self) -> usize {
        self.focus
    }

    /// `(d/du_2)^i phi` at `u_2 = 0`.
    fn phi_derivative(&self, i: usize) -> Poly {
        let u2 = self.phi.universe().u(2);
        self.phi.diff(u2, i as u32).eval_at_zero(&[u2])
    }
}

/// `phi(q) / det DX~(q)` at a nondegenerate zero.
pub fn nondegenerate_residue(phi_value: &Poly, jacobian_det: &Rational) -> Result<Poly> {
    if jacobian_det.is_zero() {
        return Err(Error::ZeroJacobian);
    }
    Ok(phi_value.scale(&jacobian_det.recip()))
}

/// `sum_{i<n} (-1)^i / (i! a^{n-i}) phi^{(i)}(0)` for one `n x n` block.
pub fn single_block_residue(input: &ResidueInput) -> Result<Poly> {
    let data = &input.data;
    if data.num_blocks() != 1 {
        return Err(Error::InvalidJordanData(format!(
            "one block expected, found {}",
            data.num_blocks()
        )));
    }
    let n = data.dim();
    let a = data.eigenvalue(0);
    let mut out = Poly::zero(data.universe());
    for i in 0..n {
        let c = sign_power(i as i64) / factorial_rat(i as u64) / pow_signed(a, (n - i) as i64);
        out += &input.phi_derivative(i).scale(&c);
    }
    Ok(out)
}

/// `a_1 prod_{j>=2} (a_j - a_1)^{n_j}`, the Jacobian determinant at `q`
/// when the focus block has size one.
pub fn exceptional_jacobian(data: &JordanData, focus: usize) -> Result<Rational> {
    let focused = data.focused(focus)?;
    let a1 = focused.eigenvalue(0).clone();
    let mut det = a1.clone();
    for b in 1..focused.num_blocks() {
        det *= pow_signed(&(focused.eigenvalue(b) - &a1), focused.size(b) as i64);
    }
    Ok(det)
}

/// Reduced residue at the zero of the focus block, summing over ordered
/// compositions `mu` of `n_1 - i - 1` into `m` parts.
pub fn multi_block_residue(input: &ResidueInput) -> Result<Poly> {
    let focused = input.data.focused(input.focus)?;
    let n1 = focused.size(0);
    if n1 == 1 {
        let value = input.phi_derivative(0);
        return nondegenerate_residue(&value, &exceptional_jacobian(&input.data, input.focus)?);
    }
    let m = focused.num_blocks();
    let a1 = focused.eigenvalue(0).clone();
    let diffs: Vec<Rational> = (1..m).map(|b| focused.eigenvalue(b) - &a1).collect();
    let mut out = Poly::zero(focused.universe());
    for i in 0..n1 {
        let mut weight = Rational::zero();
        for mu in weak_compositions((n1 - i - 1) as i64, m) {
            let mut term = sign_power((n1 + mu[0] as usize - 1) as i64)
                / pow_signed(&a1, mu[0] as i64 + 1);
            for b in 1..m {
                let (nj, mj) = (focused.size(b) as i64, mu[b] as i64);
                term *= binomial_rat(nj + mj - 1, mj) / pow_signed(&diffs[b - 1], nj + mj);
            }
            weight += term;
        }
        if !weight.is_zero() {
            weight /= factorial_rat(i as u64);
            out += &input.phi_derivative(i).scale(&weight);
        }
    }
    Ok(out)
}

/// `(1 / prod orders!) d^{orders} (phi det B)` at the chart origin.
pub fn brute_force_residue(
    field: &LiftedField,
    b: &BMatrix,
    phi: &Poly,
    orders: &[u32],
) -> Result<Poly> {
    let uni = field.universe();
    if orders.len() != uni.n() || b.dim() != uni.n() {
        return Err(Error::InvalidJordanData(format!(
            "order vector of length {} for dimension {}",
            orders.len(),
            uni.n()
        )));
    }
    let mut f = phi * &b.determinant();
    let mut norm = Rational::one();
    for (j, &o) in orders.iter().enumerate() {
        f = f.diff(uni.u(j + 1), o);
        norm *= factorial_rat(o as u64);
    }
    Ok(f.eval_u_at_zero().scale(&norm.recip()))
}

/// Derivative orders fed to the brute-force residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderConvention {
    /// `alpha_j - 1` in every coordinate: `(0, n_1 - 1, 2^{k+1} - 1, ..)`.
    AlphaMinusOne,
    /// `(0, n_1 - 1, 2^k, ..)` in the focus block.
    DisplayedPowers,
}

/// Order vector for the data focused on `focus`; zero outside the focus
/// block and in `u_1`.
pub fn order_vector(data: &JordanData, focus: usize, convention: OrderConvention) -> Result<Vec<u32>> {
    let focused = data.focused(focus)?;
    let n1 = focused.size(0);
    let k = choose_k(n1);
    let mut orders = vec![0u32; focused.dim()];
    if n1 >= 2 {
        orders[1] = n1 as u32 - 1;
        let e = match convention {
            OrderConvention::AlphaMinusOne => (1u32 << (k + 1)) - 1,
            OrderConvention::DisplayedPowers => 1u32 << k,
        };
        for o in orders.iter_mut().take(n1).skip(2) {
            *o = e;
        }
    }
    Ok(orders)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionResult {
    pub convention: OrderConvention,
    pub orders: Vec<u32>,
    pub value: Poly,
    pub matches_reduced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionComparison {
    pub reduced: Poly,
    pub results: Vec<ConventionResult>,
}

/// Evaluates `phi` by brute force under both order conventions and compares
/// each with the reduced multi-block residue.
pub fn compare_order_conventions(input: &ResidueInput) -> Result<ConventionComparison> {
    let field = build_lifted_field(&input.data, input.focus)?;
    let b = build_bmatrix(&field, &input.data)?;
    let reduced = multi_block_residue(input)?;
    let mut results = Vec::new();
    for convention in [OrderConvention::AlphaMinusOne, OrderConvention::DisplayedPowers] {
        let orders = order_vector(&input.data, input.focus, convention)?;
        let value = brute_force_residue(&field, &b, &input.phi, &orders)?;
        results.push(ConventionResult {
            convention,
            matches_reduced: value == reduced,
            orders,
            value,
        });
    }
    Ok(ConventionComparison { reduced, results })
}

/// Integrands evaluated by the `residue` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSelector {
    One,
    /// `theta_X~^N`
    ThetaPower(u32),
    /// `Delta theta_X~ * theta_X~^N`
    LaplacianTimesThetaPower(u32),
}

impl PhiSelector {
    pub fn build(&self, data: &JordanData, focus: usize) -> Result<Poly> {
        let jet = potential_jet(data, focus)?;
        Ok(match *self {
            PhiSelector::One => Sym::new(data.universe()).one(),
            PhiSelector::ThetaPower(p) => jet.effective.pow(p),
            PhiSelector::LaplacianTimesThetaPower(p) => &jet.laplacian * &jet.effective.pow(p),
        })
    }
}
