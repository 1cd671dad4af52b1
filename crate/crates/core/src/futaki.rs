//! Localized `I`, `J` and `Fut` contributions and the order-by-order check
//! of the blowup defect series.
//!
//! The symbol `mu` stands for `mu + delta`, the only combination that enters.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan::{potential_jet, JordanData};
use crate::kernel::rational::{factorial_rat, format_rational, pow_signed, rat, ratio};
use crate::kernel::{EpsExpansion, Poly, Sym};
use crate::residues::{multi_block_residue, ResidueInput};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointLabel {
    Block(usize),
    P,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FutakiLocalData {
    pub label: PointLabel,
    pub i: EpsExpansion,
    pub j: EpsExpansion,
    pub fut: EpsExpansion,
}

/// `I - n mu / (n + 1) J`.
pub fn fut_combination(n: usize, i: &EpsExpansion, j: &EpsExpansion) -> EpsExpansion {
    let mu = Sym::new(i.universe()).mu();
    i - &j.mul_poly(&mu).scale(&ratio(n as i64, n as i64 + 1))
}

fn check_cap(data: &JordanData, cap: u32) -> Result<()> {
    let min = data.dim() as u32;
    if cap < min {
        return Err(Error::TruncationTooLow { cap, min });
    }
    Ok(())
}

/// `J` integrand `theta_X~^{n+1}` at the zero of block `focus`.
pub fn j_integrand(data: &JordanData, focus: usize) -> Result<Poly> {
    Ok(potential_jet(data, focus)?.effective.pow(data.dim() as u32 + 1))
}

/// `I` integrand `(Delta theta_X~) theta_X~^n`.
pub fn i_integrand(data: &JordanData, focus: usize) -> Result<Poly> {
    let jet = potential_jet(data, focus)?;
    Ok(&jet.laplacian * &jet.effective.pow(data.dim() as u32))
}

/// `sum_{i<n} (n+1)! (theta - a eps)^{n+1-i} eps^i / (i! a^{n-i} (n+1-i)!)`.
pub fn jq_single_block_display(data: &JordanData) -> Poly {
    let s = Sym::new(data.universe());
    let n = data.dim() as i64;
    let a = data.eigenvalue(0).clone();
    let base = s.theta() - s.c(a.clone()) * s.eps();
    (0..n).fold(s.zero(), |acc, i| {
        let c = factorial_rat((n + 1) as u64)
            / (factorial_rat(i as u64) * pow_signed(&a, n - i) * factorial_rat((n + 1 - i) as u64));
        acc + (base.pow((n + 1 - i) as u32) * s.eps().pow(i as u32)).scale(&c)
    })
}

/// `sum_{i<n} n! eps^{i-1} / (i! a^{n-i} (n-i)!) [(n-1) i (theta - a eps)^{n+1-i}
/// / (n-i+1) + a (theta - a eps)^{n-i} eps]`.
pub fn iq_single_block_display(data: &JordanData) -> Poly {
    let s = Sym::new(data.universe());
    let n = data.dim() as i64;
    let a = data.eigenvalue(0).clone();
    let base = s.theta() - s.c(a.clone()) * s.eps();
    let mut out = s.zero();
    for i in 0..n {
        let c = factorial_rat(n as u64)
            / (factorial_rat(i as u64) * pow_signed(&a, n - i) * factorial_rat((n - i) as u64));
        // the first bracket term carries the factor i, which absorbs eps^{-1} at i = 0
        let mut bracket = (base.pow((n - i) as u32) * s.eps().pow(i as u32)).scale(&a);
        if i > 0 {
            let w = rat((n - 1) * i) / rat(n - i + 1);
            bracket += &(base.pow((n + 1 - i) as u32) * s.eps().pow(i as u32 - 1)).scale(&w);
        }
        out += &bracket.scale(&c);
    }
    out
}

pub fn compute_jq(data: &JordanData, focus: usize, cap: u32) -> Result<EpsExpansion> {
    check_cap(data, cap)?;
    let input = ResidueInput::new(j_integrand(data, focus)?, data.clone(), focus)?;
    let value = multi_block_residue(&input)?;
    if data.num_blocks() == 1 && value != jq_single_block_display(data) {
        return Err(Error::CrossCheckFailed(format!(
            "J_q residue {value} differs from the single-block summation"
        )));
    }
    Ok(EpsExpansion::new(value, cap))
}

pub fn compute_iq(data: &JordanData, focus: usize, cap: u32) -> Result<EpsExpansion> {
    check_cap(data, cap)?;
    let input = ResidueInput::new(i_integrand(data, focus)?, data.clone(), focus)?;
    let value = multi_block_residue(&input)?;
    if data.num_blocks() == 1 && value != iq_single_block_display(data) {
        return Err(Error::CrossCheckFailed(format!(
            "I_q residue {value} differs from the single-block summation"
        )));
    }
    Ok(EpsExpansion::new(value, cap))
}

pub fn futaki_exceptional(data: &JordanData, focus: usize, cap: u32) -> Result<FutakiLocalData> {
    let i = compute_iq(data, focus, cap)?;
    let j = compute_jq(data, focus, cap)?;
    let fut = fut_combination(data.dim(), &i, &j);
    Ok(FutakiLocalData {
        label: PointLabel::Block(focus),
        i,
        j,
        fut,
    })
}

/// `I = Tr(A) theta^n / det A`, `J = theta^{n+1} / det A` at the blown-up point.
pub fn futaki_point_p(data: &JordanData, cap: u32) -> FutakiLocalData {
    let s = Sym::new(data.universe());
    let n = data.dim() as u32;
    let inv_det = data.det().recip();
    let i = EpsExpansion::new(s.theta().pow(n).scale(&(data.trace() * &inv_det)), cap);
    let j = EpsExpansion::new(s.theta().pow(n + 1).scale(&inv_det), cap);
    let fut = fut_combination(data.dim(), &i, &j);
    FutakiLocalData {
        label: PointLabel::P,
        i,
        j,
        fut,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalSums {
    pub sum_i: EpsExpansion,
    pub sum_j: EpsExpansion,
    pub sum_fut: EpsExpansion,
    /// `sum_j - theta^{n+1} / det A` vanishes through `eps^{n-1}`
    pub j_closed_form: bool,
    /// `sum_i - Tr(A) theta^n / det A + n(n-1) theta eps^{n-1}` vanishes
    /// through `eps^{n-1}`
    pub i_closed_form: bool,
}

pub fn sum_exceptional_contributions(data: &JordanData, cap: u32) -> Result<ExceptionalSums> {
    check_cap(data, cap)?;
    let uni = data.universe();
    let s = Sym::new(uni);
    let mut sum_i = EpsExpansion::zero(uni, cap);
    let mut sum_j = EpsExpansion::zero(uni, cap);
    let mut sum_fut = EpsExpansion::zero(uni, cap);
    for focus in 0..data.num_blocks() {
        let local = futaki_exceptional(data, focus, cap)?;
        sum_i = &sum_i + &local.i;
        sum_j = &sum_j + &local.j;
        sum_fut = &sum_fut + &local.fut;
    }
    let n = data.dim() as u32;
    let p = futaki_point_p(data, cap);
    let j_gap = &sum_j - &p.j;
    let nn1 = rat(n as i64 * (n as i64 - 1));
    let i_gap = &(&sum_i - &p.i) + &EpsExpansion::new(s.theta() * s.eps().pow(n - 1).scale(&nn1), cap);
    Ok(ExceptionalSums {
        j_closed_form: j_gap.vanishes_below(n),
        i_closed_form: i_gap.vanishes_below(n),
        sum_i,
        sum_j,
        sum_fut,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCheck {
    pub power: u32,
    pub coefficient: Poly,
    pub expected: Poly,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub data: JordanData,
    pub defect: EpsExpansion,
    pub per_order: Vec<OrderCheck>,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl Serialize for OrderCheck {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OrderCheck", 4)?;
        st.serialize_field("power", &self.power)?;
        st.serialize_field("coefficient", &self.coefficient.to_string())?;
        st.serialize_field("expected", &self.expected.to_string())?;
        st.serialize_field("pass", &self.pass)?;
        st.end()
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VerificationReport", 5)?;
        st.serialize_field("data", &self.data)?;
        st.serialize_field("defect", self.defect.body())?;
        st.serialize_field("per_order", &self.per_order)?;
        st.serialize_field("overall", &self.overall)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

/// Defect `Fut_p - sum_j Fut_{q_j}` with coefficient checks: zero at
/// `eps^0 .. eps^{n-2}` and `n(n-1) theta` at `eps^{n-1}`.
pub fn verify_main_identity(data: &JordanData, cap: u32) -> Result<VerificationReport> {
    let n = data.dim() as u32;
    if cap < n + 1 {
        return Err(Error::TruncationTooLow { cap, min: n + 1 });
    }
    let s = Sym::new(data.universe());
    let sums = sum_exceptional_contributions(data, cap)?;
    let p = futaki_point_p(data, cap);
    let defect = &p.fut - &sums.sum_fut;
    let nn1 = rat(n as i64 * (n as i64 - 1));
    let per_order: Vec<OrderCheck> = (0..n)
        .map(|power| {
            let coefficient = defect.coefficient(power);
            let expected = if power + 1 == n {
                s.theta().scale(&nn1)
            } else {
                s.zero()
            };
            OrderCheck {
                power,
                pass: coefficient == expected,
                coefficient,
                expected,
            }
        })
        .collect();
    let overall = per_order.iter().all(|c| c.pass);
    let mu = data.universe().mu();
    let mu_free = (0..n).all(|k| !defect.coefficient(k).depends_on(mu));
    let i_top = sums.sum_i.coefficient(n - 1).coefficient_of(&[(data.universe().theta(), 1)]);
    let mut notes = vec![
        "mu denotes mu + delta".to_string(),
        "I integrand is (+Delta theta) theta^n".to_string(),
        format!("defect coefficients below eps^{n} are mu-free: {mu_free}"),
        format!(
            "sum of I_q at theta*eps^{}: {} (expected -n(n-1) = {})",
            n - 1,
            i_top,
            format_rational(&-&nn1)
        ),
        format!("sum of J_q matches theta^(n+1)/det A below eps^{n}: {}", sums.j_closed_form),
    ];
    if cap > n {
        let higher: Vec<String> = (n..=cap)
            .filter(|&k| !defect.coefficient(k).is_zero())
            .map(|k| format!("eps^{k}: {}", defect.coefficient(k)))
            .collect();
        if !higher.is_empty() {
            notes.push(format!("unasserted higher orders: {}", higher.join("; ")));
        }
    }
    Ok(VerificationReport {
        data: data.clone(),
        defect,
        per_order,
        overall,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::Rational;

    fn data(pairs: &[(Rational, usize)]) -> JordanData {
        JordanData::from_pairs(pairs).unwrap()
    }

    #[test]
    fn two_by_two_contributions() {
        let d = data(&[(rat(1), 2)]);
        let s = Sym::new(d.universe());
        let j = compute_jq(&d, 0, 3).unwrap();
        assert_eq!(
            j.body(),
            &(s.theta().pow(3) - s.int(3) * s.theta() * s.eps().pow(2) + s.int(2) * s.eps().pow(3))
        );
        let i = compute_iq(&d, 0, 3).unwrap();
        assert_eq!(i.body(), &(s.int(2) * s.theta().pow(2) - s.int(2) * s.theta() * s.eps()));
    }

    #[test]
    fn single_block_leading_orders() {
        for n in 2..=5 {
            for a in [rat(1), rat(-3), ratio(5, 2)] {
                let d = data(&[(a.clone(), n)]);
                let s = Sym::new(d.universe());
                let i = compute_iq(&d, 0, n as u32 + 1).unwrap();
                let top = s.theta().pow(n as u32).scale(&(rat(n as i64) / pow_signed(&a, n as i64 - 1)));
                assert_eq!(i.coefficient(0), top);
                assert_eq!(i.coefficient(n as u32 - 1), s.theta().scale(&rat(-(n as i64) * (n as i64 - 1))));
                let j = compute_jq(&d, 0, n as u32 + 1).unwrap();
                let gap = &j - &EpsExpansion::new(s.theta().pow(n as u32 + 1).scale(&pow_signed(&a, -(n as i64))), n as u32 + 1);
                assert!(gap.vanishes_below(n as u32));
            }
        }
    }

    #[test]
    fn point_p_values() {
        let d = data(&[(rat(1), 2)]);
        let s = Sym::new(d.universe());
        let p = futaki_point_p(&d, 3);
        assert_eq!(p.i.body(), &(s.int(2) * s.theta().pow(2)));
        assert_eq!(p.fut.body(), &(s.int(2) * s.theta().pow(2) - (s.mu() * s.theta().pow(3)).scale(&ratio(2, 3))));
        let d = data(&[(rat(2), 3)]);
        let s = Sym::new(d.universe());
        assert_eq!(futaki_point_p(&d, 4).i.body(), &s.theta().pow(3).scale(&ratio(6, 8)));
    }

    #[test]
    fn two_simple_blocks_sums() {
        let d = data(&[(rat(1), 1), (rat(2), 1)]);
        let s = Sym::new(d.universe());
        let sums = sum_exceptional_contributions(&d, 3).unwrap();
        assert_eq!(sums.sum_j.coefficient(0), s.theta().pow(3).scale(&ratio(1, 2)));
        assert_eq!(sums.sum_i.coefficient(1), s.theta().scale(&rat(-2)));
        assert!(sums.i_closed_form && sums.j_closed_form);
    }

    #[test]
    fn defect_two_by_two() {
        let d = data(&[(rat(1), 2)]);
        let s = Sym::new(d.universe());
        let r = verify_main_identity(&d, 3).unwrap();
        assert!(r.overall);
        let expected = s.int(2) * s.theta() * s.eps() - s.int(2) * s.mu() * s.theta() * s.eps().pow(2)
            + (s.mu() * s.eps().pow(3)).scale(&ratio(4, 3));
        assert_eq!(r.defect.body(), &expected);
    }

    #[test]
    fn defect_examples() {
        for pairs in [
            vec![(rat(1), 1), (rat(2), 1)],
            vec![(rat(1), 2), (ratio(-3, 2), 1)],
            vec![(rat(2), 1), (rat(-1), 2), (rat(3), 1)],
        ] {
            let r = verify_main_identity(&data(&pairs), 5).unwrap();
            assert!(r.overall, "{pairs:?}");
            assert!(r.defect.coefficient(0).is_zero());
        }
        assert!(matches!(
            verify_main_identity(&data(&[(rat(1), 3)]), 3),
            Err(Error::TruncationTooLow { cap: 3, min: 4 })
        ));
    }
}
