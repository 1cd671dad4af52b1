//! Jordan data of the linearization at the blown-up point, the lifted vector
//! field on the first blowup chart, and the potential jet at its zero.
//!
//! Coordinates: the chart has `u_1 = z_1` and `u_j = z_j / z_1` for `j >= 2`.
//! Polynomials in the base coordinates `z_1..z_n` reuse the `u_1..u_n` slots
//! of the symbol universe and are mapped into the chart by
//! `z_1 -> u_1, z_j -> u_1 u_j`.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::weak_compositions;
use crate::error::{Error, Result};
use crate::kernel::rational::{self, rat, Rational};
use crate::kernel::{Poly, Sym, Universe};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanBlock {
    #[serde(with = "rational::serde_str")]
    pub eigenvalue: Rational,
    pub size: usize,
}

impl JordanBlock {
    pub fn new(eigenvalue: Rational, size: usize) -> Self {
        JordanBlock { eigenvalue, size }
    }
}

#[derive(Deserialize)]
struct RawJordanData {
    blocks: Vec<JordanBlock>,
}

/// Block list `[(a_j, n_j)]` of the linearization `DX_p`.
///
/// Validated on construction: every eigenvalue is nonzero, eigenvalues are
/// pairwise distinct across blocks, sizes are positive, and `n >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawJordanData")]
pub struct JordanData {
    blocks: Vec<JordanBlock>,
}

impl TryFrom<RawJordanData> for JordanData {
    type Error = Error;
    fn try_from(raw: RawJordanData) -> Result<Self> {
        JordanData::new(raw.blocks)
    }
}

impl JordanData {
    pub fn new(blocks: Vec<JordanBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidJordanData("no blocks".into()));
        }
        let mut seen = BTreeSet::new();
        for (j, b) in blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(Error::InvalidJordanData(format!("block {j} has size 0")));
            }
            if b.eigenvalue.is_zero() {
                return Err(Error::InvalidJordanData(format!(
                    "block {j} has eigenvalue 0; the zero must be nondegenerate"
                )));
            }
            if !seen.insert(b.eigenvalue.clone()) {
                return Err(Error::InvalidJordanData(format!(
                    "eigenvalue {} appears in more than one Jordan block",
                    b.eigenvalue
                )));
            }
        }
        let n: usize = blocks.iter().map(|b| b.size).sum();
        if n < 2 {
            return Err(Error::InvalidJordanData(format!(
                "dimension {n} is below 2"
            )));
        }
        Ok(JordanData { blocks })
    }

    pub fn from_pairs(pairs: &[(Rational, usize)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|(a, s)| JordanBlock::new(a.clone(), *s))
                .collect(),
        )
    }

    /// A single `n x n` Jordan block with eigenvalue `a`.
    pub fn single_block(a: Rational, n: usize) -> Result<Self> {
        Self::from_pairs(&[(a, n)])
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn eigenvalue(&self, j: usize) -> &Rational {
        &self.blocks[j].eigenvalue
    }

    pub fn size(&self, j: usize) -> usize {
        self.blocks[j].size
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn eigenvalues(&self) -> Vec<Rational> {
        self.blocks.iter().map(|b| b.eigenvalue.clone()).collect()
    }

    /// `s_0 = 0, s_j = n_1 + .. + n_j`.
    pub fn prefix_sums(&self) -> Vec<usize> {
        let mut out = vec![0];
        for b in &self.blocks {
            out.push(out.last().unwrap() + b.size);
        }
        out
    }

    pub fn trace(&self) -> Rational {
        self.blocks
            .iter()
            .map(|b| &b.eigenvalue * rat(b.size as i64))
            .sum()
    }

    pub fn det(&self) -> Rational {
        self.blocks
            .iter()
            .map(|b| num_traits::pow(b.eigenvalue.clone(), b.size))
            .fold(Rational::one(), |acc, x| acc * x)
    }

    /// Diagonal of `DX_p`, each eigenvalue repeated by its block size.
    pub fn eigenvalues_with_multiplicity(&self) -> Vec<Rational> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(b.eigenvalue.clone()).take(b.size))
            .collect()
    }

    pub fn universe(&self) -> Universe {
        Universe::new(self.dim())
    }

    fn check_block(&self, j: usize) -> Result<()> {
        if j >= self.blocks.len() {
            return Err(Error::FocusOutOfRange {
                index: j,
                blocks: self.blocks.len(),
            });
        }
        Ok(())
    }

    /// Block order after moving block `j` to the front, others kept stable.
    pub fn focus_order(&self, j: usize) -> Result<Vec<usize>> {
        self.check_block(j)?;
        let mut order = vec![j];
        order.extend((0..self.blocks.len()).filter(|&l| l != j));
        Ok(order)
    }

    /// The same data with block `j` relabeled as the first block.
    pub fn focused(&self, j: usize) -> Result<JordanData> {
        let order = self.focus_order(j)?;
        Ok(JordanData {
            blocks: order.iter().map(|&l| self.blocks[l].clone()).collect(),
        })
    }

    /// Inverse of [`JordanData::focused`]: given data focused on original
    /// block `j`, restores the original block order.
    pub fn unfocused(&self, j: usize) -> Result<JordanData> {
        self.check_block(j)?;
        let mut blocks = self.blocks[1..].to_vec();
        blocks.insert(j, self.blocks[0].clone());
        Ok(JordanData { blocks })
    }

    /// For each original coordinate (0-based), its position after focusing
    /// block `j`.
    pub fn focus_coordinate_map(&self, j: usize) -> Result<Vec<usize>> {
        let order = self.focus_order(j)?;
        let starts = self.prefix_sums();
        let mut map = vec![0; self.dim()];
        let mut next = 0;
        for &l in &order {
            for i in starts[l]..starts[l + 1] {
                map[i] = next;
                next += 1;
            }
        }
        Ok(map)
    }

    /// Components of the linear field in base coordinates (`u`-slots read as
    /// `z`): `X_i = a z_i + z_{i+1}` inside a block and `a z_i` at a block end.
    ///
    /// When the first block has size one, `X_1` also carries `z_2`. That
    /// matrix is conjugate to the Jordan matrix because `a_1 != a_2`, and its
    /// lift has the uniform chart form `X~_1 = u_1 (a_1 + u_2)`.
    pub fn linear_field(&self) -> Vec<Poly> {
        let uni = self.universe();
        let s = Sym::new(uni);
        let starts = self.prefix_sums();
        let mut comps = Vec::with_capacity(self.dim());
        for (j, b) in self.blocks.iter().enumerate() {
            for i in starts[j] + 1..=starts[j + 1] {
                let mut x = s.c(b.eigenvalue.clone()) * s.u(i);
                if i < starts[j + 1] {
                    x = x + s.u(i + 1);
                }
                comps.push(x);
            }
        }
        if self.blocks[0].size == 1 {
            comps[0] = &comps[0] + &s.u(2);
        }
        comps
    }
}

/// `X~` on the first chart, for the data focused on `focus_block`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedField {
    pub components: Vec<Poly>,
    pub focus_block: usize,
}

impl LiftedField {
    pub fn universe(&self) -> Universe {
        self.components[0].universe()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// Lifts a field given in base coordinates to the chart `u_1 = z_1`:
/// `X~_1 = X_1`, `X~_j = (X_j - u_j X_1) / u_1`.
pub fn lift_to_chart(components: &[Poly]) -> Result<Vec<Poly>> {
    let uni = components[0].universe();
    let s = Sym::new(uni);
    let images: Vec<_> = (1..=uni.n())
        .map(|i| {
            let img = if i == 1 { s.u(1) } else { s.u(1) * s.u(i) };
            (uni.u(i), img)
        })
        .collect();
    let pulled: Vec<Poly> = components.iter().map(|c| c.substitute(&images)).collect();
    let first = pulled[0].clone();
    let mut out = vec![first.clone()];
    for (idx, p) in pulled.iter().enumerate().skip(1) {
        let numer = p - &(s.u(idx + 1) * &first);
        let q = numer
            .div_var_power(uni.u(1), 1)
            .ok_or_else(|| Error::NotDivisible(format!("component {} by u_1", idx + 1)))?;
        out.push(q);
    }
    Ok(out)
}

/// Closed-form lift after relabeling `focus_block` to the front:
/// `X~_1 = u_1 (a_1 + u_2)`, `X~_i = u_{i+1} - u_i (u_2 + a_1 - a_j)` inside
/// block `j`, and `X~_{s_j} = -u_{s_j} (u_2 + a_1 - a_j)` at its end.
pub fn build_lifted_field(data: &JordanData, focus_block: usize) -> Result<LiftedField> {
    let focused = data.focused(focus_block)?;
    let uni = focused.universe();
    let s = Sym::new(uni);
    let a1 = focused.eigenvalue(0).clone();
    let starts = focused.prefix_sums();
    let mut components = vec![s.u(1) * (s.c(a1.clone()) + s.u(2))];
    for j in 0..focused.num_blocks() {
        let shift = s.u(2) + s.c(&a1 - focused.eigenvalue(j));
        for i in (starts[j] + 1).max(2)..=starts[j + 1] {
            let mut x = -(s.u(i) * &shift);
            if i < starts[j + 1] {
                x = x + s.u(i + 1);
            }
            components.push(x);
        }
    }
    Ok(LiftedField {
        components,
        focus_block,
    })
}

/// Holomorphic divergence `sum_i dX~_i / du_i`.
pub fn divergence(field: &LiftedField) -> Poly {
    divergence_of(&field.components)
}

pub fn divergence_of(components: &[Poly]) -> Poly {
    let uni = components[0].universe();
    components
        .iter()
        .enumerate()
        .fold(Poly::zero(uni), |acc, (i, c)| acc + c.diff(uni.u(i + 1), 1))
}

/// Jet of the holomorphy potential at the zero `q` of the focused block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialJet {
    /// `theta - a_1 eps`
    pub value_at_q: Poly,
    /// `d/du_2` at `q`: `-eps`
    pub u2_gradient: Poly,
    /// `Tr(A) - (n - 1)(u_2 + a_1)`
    pub laplacian: Poly,
    /// `theta - eps (a_1 + u_2)`, the potential as seen by every residue
    pub effective: Poly,
}

pub fn potential_jet(data: &JordanData, focus_block: usize) -> Result<PotentialJet> {
    let focused = data.focused(focus_block)?;
    let s = Sym::new(focused.universe());
    let a1 = s.c(focused.eigenvalue(0).clone());
    let n = focused.dim() as i64;
    let effective = s.theta() - s.eps() * (a1.clone() + s.u(2));
    Ok(PotentialJet {
        value_at_q: s.theta() - &a1 * s.eps(),
        u2_gradient: -s.eps(),
        laplacian: s.c(focused.trace()) - s.int(n - 1) * (s.u(2) + a1),
        effective,
    })
}

/// A resonance relation `lambda_target = sum_i multipliers[i] lambda_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResonanceWitness {
    pub target: usize,
    pub multipliers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareReport {
    pub poincare_domain: bool,
    pub resonant: bool,
    pub witness: Option<ResonanceWitness>,
}

/// Poincaré-domain and bounded resonance test for rational eigenvalues.
///
/// The convex hull of real values excludes 0 exactly when all share a sign.
/// Resonances are searched with `2 <= sum m_i <= m_cap`, smallest total first.
pub fn poincare_resonance_check(eigenvalues: &[Rational], m_cap: u32) -> PoincareReport {
    let poincare_domain = !eigenvalues.is_empty()
        && (eigenvalues.iter().all(|x| x.is_positive())
            || eigenvalues.iter().all(|x| x.is_negative()));

    // group equal eigenvalues under their first index
    let mut distinct: Vec<(usize, Rational)> = Vec::new();
    for (i, v) in eigenvalues.iter().enumerate() {
        if !distinct.iter().any(|(_, w)| w == v) {
            distinct.push((i, v.clone()));
        }
    }
    let mut witness = None;
    'search: for total in 2..=m_cap as i64 {
        for weights in weak_compositions(total, distinct.len()) {
            let value: Rational = weights
                .iter()
                .zip(&distinct)
                .map(|(&w, (_, v))| v * rat(w as i64))
                .sum();
            if let Some(target) = eigenvalues.iter().position(|x| x == &value) {
                let mut multipliers = vec![0; eigenvalues.len()];
                for (&w, (i, _)) in weights.iter().zip(&distinct) {
                    multipliers[*i] = w;
                }
                witness = Some(ResonanceWitness {
                    target,
                    multipliers,
                });
                break 'search;
            }
        }
    }
    PoincareReport {
        poincare_domain,
        resonant: witness.is_some(),
        witness,
    }
}

/// Outcome of the three `O(u_1)` comparisons between the lifts of a field and
/// of its linearization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbationReport {
    /// `Y~_1 - X~_1` divisible by `u_1^2`
    pub first_component_u1_squared: bool,
    /// `Y~_i - X~_i` divisible by `u_1`, for `i = 2..n`
    pub other_components_u1: Vec<bool>,
    /// `div Y~ - div X~` divisible by `u_1`
    pub divergence_u1: bool,
    pub failures: Vec<String>,
    pub all_pass: bool,
}

/// Lifts `Y = X + quadratic_terms` (base coordinates, one polynomial per
/// component, no constant or linear part) and compares with the lift of the
/// linear field `X` of `data`.
pub fn perturbation_order_check(
    data: &JordanData,
    quadratic_terms: &[Poly],
) -> Result<PerturbationReport> {
    let uni = data.universe();
    let n = data.dim();
    if quadratic_terms.len() != n {
        return Err(Error::InvalidPerturbation(format!(
            "expected {n} components, got {}",
            quadratic_terms.len()
        )));
    }
    for (i, p) in quadratic_terms.iter().enumerate() {
        if p.universe() != uni {
            return Err(Error::InvalidPerturbation(format!(
                "component {} uses a different symbol universe",
                i + 1
            )));
        }
        if let Some(v) = p.support().into_iter().find(|&v| !uni.is_u(v)) {
            return Err(Error::InvalidPerturbation(format!(
                "component {} depends on {}",
                i + 1,
                uni.name(v)
            )));
        }
        if p.terms().any(|(e, _)| e.iter().sum::<u32>() < 2) {
            return Err(Error::InvalidPerturbation(format!(
                "component {} has a constant or linear term",
                i + 1
            )));
        }
    }
    let linear = data.linear_field();
    let perturbed: Vec<Poly> = linear
        .iter()
        .zip(quadratic_terms)
        .map(|(x, p)| x + p)
        .collect();
    let x_lift = lift_to_chart(&linear)?;
    let y_lift = lift_to_chart(&perturbed)?;
    let u1 = uni.u(1);

    let mut failures = Vec::new();
    let first = (&y_lift[0] - &x_lift[0]).is_divisible_by_var_power(u1, 2);
    if !first {
        failures.push("Y~_1 - X~_1 is not O(u_1^2)".to_string());
    }
    let others: Vec<bool> = (1..n)
        .map(|i| (&y_lift[i] - &x_lift[i]).is_divisible_by_var_power(u1, 1))
        .collect();
    for (i, ok) in others.iter().enumerate() {
        if !ok {
            failures.push(format!("Y~_{0} - X~_{0} is not O(u_1)", i + 2));
        }
    }
    let div = (divergence_of(&y_lift) - divergence_of(&x_lift)).is_divisible_by_var_power(u1, 1);
    if !div {
        failures.push("div Y~ - div X~ is not O(u_1)".to_string());
    }
    Ok(PerturbationReport {
        first_component_u1_squared: first,
        other_components_u1: others,
        divergence_u1: div,
        all_pass: failures.is_empty(),
        failures,
    })
}
