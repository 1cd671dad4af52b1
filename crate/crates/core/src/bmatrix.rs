//! Certificate matrices `u_j^{alpha_j} = sum_i b_ij X~_i` for the zero of the
//! lifted field at the chart origin, and their determinants.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::jordan::{JordanData, LiftedField};
use crate::kernel::rational::{factorial_rat, pow_signed, sign_power, Rational};
use crate::kernel::{Poly, Sym, Universe};

/// The unique `k` with `2^k < n_1 <= 2^{k+1}`; `0` when `n_1 = 1`.
pub fn choose_k(n1: usize) -> u32 {
    let mut k = 0;
    while (1usize << (k + 1)) < n1 {
        k += 1;
    }
    k
}

/// `prod_{i=0}^{k} (x^{2^i} + y^{2^i})`, so that `(x - y)` times it is
/// `x^{2^{k+1}} - y^{2^{k+1}}`.
fn dyadic_product(x: &Poly, y: &Poly, k: u32) -> Poly {
    (0..=k).fold(Poly::one(x.universe()), |acc, i| {
        let e = 1u32 << i;
        acc * (x.pow(e) + y.pow(e))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatrix {
    /// `entries[j][i]` is the coefficient of `X~_{i+1}` in `u_{j+1}^{alpha_{j+1}}`.
    pub entries: Vec<Vec<Poly>>,
    pub alpha: Vec<u32>,
    pub k: u32,
}

impl BMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn determinant(&self) -> Poly {
        symbolic_determinant(&self.entries)
    }

    /// Checks every row identity against `field` exactly.
    pub fn check_certificate(&self, field: &LiftedField) -> Result<()> {
        let uni = field.universe();
        for (j, row) in self.entries.iter().enumerate() {
            let lhs = Poly::var(uni, uni.u(j + 1)).pow(self.alpha[j]);
            let rhs = row
                .iter()
                .zip(&field.components)
                .fold(Poly::zero(uni), |acc, (b, x)| acc + b * x);
            if lhs != rhs {
                return Err(Error::CertificateFailed {
                    row: j + 1,
                    alpha: self.alpha[j],
                });
            }
        }
        Ok(())
    }
}

/// Row of coefficients expressing `u_2^e` for `e >= n_1` through the
/// focus-block components: `u_2^e = -sum_{i=2}^{n_1} u_2^{e-i} X~_i`.
fn u2_power_row(s: &Sym, n: usize, n1: usize, e: u32) -> Vec<Poly> {
    let mut row = vec![s.zero(); n];
    for i in 2..=n1 {
        row[i - 1] = -s.u(2).pow(e - i as u32);
    }
    row
}

/// Builds `B` for the data focused on `field.focus_block` and verifies the
/// certificate identity against `field`.
pub fn build_bmatrix(field: &LiftedField, data: &JordanData) -> Result<BMatrix> {
    let focused = data.focused(field.focus_block)?;
    let n1 = focused.size(0);
    if n1 < 2 {
        return Err(Error::NondegenerateFocus);
    }
    let n = focused.dim();
    if field.dim() != n {
        return Err(Error::InvalidJordanData(format!(
            "field has {} components, data has dimension {n}",
            field.dim()
        )));
    }
    let uni = focused.universe();
    let s = Sym::new(uni);
    let k = choose_k(n1);
    let big = 1u32 << (k + 1);
    let a = focused.eigenvalue(0).clone();
    let c = |i: usize| pow_signed(&(-a.recip()), i as i64);

    let mut entries = vec![vec![s.zero(); n]; n];
    let mut alpha = vec![1u32; n];

    let mut b11 = s.c(a.recip());
    for i in 2..=n1 {
        b11 -= &(s.c(c(i)) * s.u(i));
        entries[0][i - 1] = -(s.u(1) * s.c(c(i)));
    }
    entries[0][0] = b11;

    alpha[1] = n1 as u32;
    entries[1] = u2_power_row(&s, n, n1, n1 as u32);

    // u_{l+1}^K = u_2^K u_l^K + P_l X~_l, iterated down to u_2
    for j in 3..=n1 {
        alpha[j - 1] = big;
        let mut row = u2_power_row(&s, n, n1, (j as u32 - 1) * big);
        for l in 2..j {
            let p = dyadic_product(&s.u(l + 1), &(s.u(2) * s.u(l)), k);
            row[l - 1] += &(s.u(2).pow((j - l - 1) as u32 * big) * p);
        }
        entries[j - 1] = row;
    }

    let starts = focused.prefix_sums();
    let u2k = u2_power_row(&s, n, n1, big);
    for b in 1..focused.num_blocks() {
        let d = focused.eigenvalue(b) - &a;
        let dk_inv = pow_signed(&d, big as i64).recip();
        let diag = dyadic_product(&s.c(d.clone()), &s.u(2), k).scale(&dk_inv);
        let mut next: Option<Vec<Poly>> = None;
        for i in (starts[b] + 1..=starts[b + 1]).rev() {
            let factor = s.u(i).scale(&dk_inv);
            let mut row: Vec<Poly> = u2k.iter().map(|x| x * &factor).collect();
            row[i - 1] += &diag;
            if let Some(prev) = &next {
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= &(&diag * p);
                }
            }
            entries[i - 1] = row.clone();
            next = Some(row);
        }
    }

    let bm = BMatrix { entries, alpha, k };
    bm.check_certificate(field)?;
    Ok(bm)
}

/// Determinant by Laplace expansion along rows, memoized on the set of
/// columns already used. Division-free, so exact over the polynomial ring.
pub fn symbolic_determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    assert!(n > 0 && n < 64, "determinant size out of range");
    let uni = m[0][0].universe();
    let mut memo: HashMap<u64, Poly> = HashMap::new();
    minor(m, 0, uni, &mut memo)
}

fn minor(m: &[Vec<Poly>], used: u64, uni: Universe, memo: &mut HashMap<u64, Poly>) -> Poly {
    let n = m.len();
    let row = used.count_ones() as usize;
    if row == n {
        return Poly::one(uni);
    }
    if let Some(p) = memo.get(&used) {
        return p.clone();
    }
    let mut acc = Poly::zero(uni);
    let mut position = 0;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let entry = &m[row][col];
        if !entry.is_zero() {
            let sub = minor(m, used | (1 << col), uni, memo);
            let term = entry * &sub;
            if position % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        position += 1;
    }
    memo.insert(used, acc.clone());
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetBClosedForm {
    pub k: u32,
    /// Determinant of the focus-block part of `B`.
    pub det_b1: Poly,
    /// One factor per non-focus block, in focused order.
    pub det_bj: Vec<Poly>,
    /// For each non-focus block, `i`-th `u_2`-derivative of `det_bj` at 0,
    /// for `i < 2^{k+1}`, where the truncated series agrees with
    /// `(a_j - a_1 - u_2)^{-n_j}`.
    pub derivative_tables: Vec<Vec<Rational>>,
}

impl DetBClosedForm {
    pub fn product(&self) -> Poly {
        self.det_bj
            .iter()
            .fold(self.det_b1.clone(), |acc, p| acc * p)
    }
}

/// `(n_j + i - 1)! / ((n_j - 1)! d^{n_j + i})`.
pub fn derivative_table_entry(n_j: usize, d: &Rational, i: usize) -> Rational {
    factorial_rat((n_j + i - 1) as u64) / factorial_rat((n_j - 1) as u64)
        / pow_signed(d, (n_j + i) as i64)
}

fn det_b1_closed(s: &Sym, a: &Rational, n1: usize, k: u32) -> Poly {
    let mut bracket = s.c(a.recip());
    for i in 2..=n1 {
        bracket -= &(s.c(pow_signed(&(-a.recip()), i as i64)) * s.u(i));
    }
    let mut out = s.c(sign_power(n1 as i64 - 1)) * bracket;
    for j in 3..=n1 {
        out = out * dyadic_product(&s.u(j), &(s.u(2) * s.u(j - 1)), k);
    }
    out
}

pub fn detb_closed_form(data: &JordanData, focus: usize) -> Result<DetBClosedForm> {
    let focused = data.focused(focus)?;
    let s = Sym::new(focused.universe());
    let n1 = focused.size(0);
    let k = choose_k(n1);
    let big = 1usize << (k + 1);
    let a = focused.eigenvalue(0).clone();
    let det_b1 = det_b1_closed(&s, &a, n1, k);
    let mut det_bj = Vec::new();
    let mut derivative_tables = Vec::new();
    for b in 1..focused.num_blocks() {
        let d = focused.eigenvalue(b) - &a;
        let nj = focused.size(b);
        let factor = dyadic_product(&s.c(d.clone()), &s.u(2), k)
            .scale(&pow_signed(&d, big as i64).recip());
        det_bj.push(factor.pow(nj as u32));
        derivative_tables.push((0..big).map(|i| derivative_table_entry(nj, &d, i)).collect());
    }
    Ok(DetBClosedForm {
        k,
        det_b1,
        det_bj,
        derivative_tables,
    })
}

/// Coefficient of `prod_{j=3}^{n_1} u_j^{exponent}` in `det_b1`, a polynomial
/// in `u_2`.
pub fn extract_u2_coefficient(det_b1: &Poly, n1: usize, exponent: u32) -> Poly {
    let uni = det_b1.universe();
    let factors: Vec<_> = (3..=n1).map(|j| (uni.u(j), exponent)).collect();
    det_b1.coefficient_of(&factors)
}

/// `(-1)^{n_1-1} sum_{i<n_1} (-u_2)^i / a_1^{i+1}`.
///
/// For `n_1 <= 5` this is cross-checked against the coefficient of
/// `prod_{j>=3} u_j^{2^{k+1}-1}` in the expanded closed-form `det_b1`.
pub fn detb_u2_coefficient(data: &JordanData, focus: usize) -> Result<Poly> {
    let focused = data.focused(focus)?;
    let n1 = focused.size(0);
    if n1 < 2 {
        return Err(Error::NondegenerateFocus);
    }
    let s = Sym::new(focused.universe());
    let a = focused.eigenvalue(0).clone();
    let mut out = s.zero();
    for i in 0..n1 {
        out += &((-s.u(2)).pow(i as u32).scale(&pow_signed(&a, -(i as i64) - 1)));
    }
    out = out.scale(&sign_power(n1 as i64 - 1));
    if n1 <= 5 {
        let k = choose_k(n1);
        let det_b1 = det_b1_closed(&s, &a, n1, k);
        let extracted = extract_u2_coefficient(&det_b1, n1, (1 << (k + 1)) - 1);
        if extracted != out {
            return Err(Error::CrossCheckFailed(format!(
                "u_2 coefficient {out} differs from extracted {extracted}"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::build_lifted_field;
    use crate::kernel::rational::{rat, ratio};

    fn data(pairs: &[(Rational, usize)]) -> JordanData {
        JordanData::from_pairs(pairs).unwrap()
    }

    #[test]
    fn dyadic_index() {
        assert_eq!(choose_k(2), 0);
        assert_eq!(choose_k(3), 1);
        assert_eq!(choose_k(4), 1);
        assert_eq!(choose_k(5), 2);
        assert_eq!(choose_k(8), 2);
        assert_eq!(choose_k(9), 3);
    }

    #[test]
    fn two_dimensional_matrix() {
        let a = ratio(3, 2);
        let d = data(&[(a.clone(), 2)]);
        let s = Sym::new(d.universe());
        let f = build_lifted_field(&d, 0).unwrap();
        let b = build_bmatrix(&f, &d).unwrap();
        let a2 = &a * &a;
        assert_eq!(b.alpha, vec![1, 2]);
        assert_eq!(b.entries[0][0], s.c(a.recip()) - s.u(2).scale(&a2.recip()));
        assert_eq!(b.entries[0][1], -s.u(1).scale(&a2.recip()));
        assert_eq!(b.entries[1], vec![s.zero(), -s.one()]);
        assert_eq!(
            b.determinant(),
            -(s.c(a.recip()) - s.u(2).scale(&a2.recip()))
        );
    }

    #[test]
    fn certificates_and_determinants() {
        let cases = vec![
            vec![(rat(1), 3)],
            vec![(ratio(-2, 3), 4)],
            vec![(rat(2), 5)],
            vec![(rat(1), 2), (rat(3), 1)],
            vec![(rat(1), 2), (rat(-1), 2)],
            vec![(rat(1), 1), (rat(2), 2)],
            vec![(ratio(1, 2), 3), (rat(2), 2)],
            vec![(rat(1), 2), (rat(2), 1), (rat(-3), 2)],
        ];
        for pairs in cases {
            let d = data(&pairs);
            for j in 0..d.num_blocks() {
                if d.focused(j).unwrap().size(0) < 2 {
                    continue;
                }
                let f = build_lifted_field(&d, j).unwrap();
                let b = build_bmatrix(&f, &d).unwrap();
                let closed = detb_closed_form(&d, j).unwrap();
                assert_eq!(b.determinant(), closed.product(), "{pairs:?} focus {j}");
            }
        }
    }

    #[test]
    fn nondegenerate_focus_has_no_matrix() {
        let d = data(&[(rat(1), 1), (rat(2), 1)]);
        let f = build_lifted_field(&d, 0).unwrap();
        assert_eq!(build_bmatrix(&f, &d), Err(Error::NondegenerateFocus));
    }

    #[test]
    fn wrong_field_fails_certificate() {
        let d = data(&[(rat(1), 3)]);
        let mut f = build_lifted_field(&d, 0).unwrap();
        let s = Sym::new(d.universe());
        f.components[2] = &f.components[2] + &s.u(3).pow(3);
        assert!(matches!(
            build_bmatrix(&f, &d),
            Err(Error::CertificateFailed { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let d = data(&[(rat(1), 2)]);
        let s = Sym::new(d.universe());
        let c = detb_closed_form(&d, 0).unwrap();
        assert_eq!(c.det_b1, -(s.one() - s.u(2)));

        let d = data(&[(rat(1), 2), (rat(2), 1)]);
        let c = detb_closed_form(&d, 0).unwrap();
        assert_eq!(c.derivative_tables[0][0], rat(1));
        assert_eq!(c.derivative_tables[0][1], rat(1));
        assert_eq!(derivative_table_entry(1, &rat(1), 2), rat(2));
        assert_eq!(derivative_table_entry(2, &rat(-1), 0), rat(1));
    }

    #[test]
    fn derivative_table_matches_series() {
        for pairs in [
            vec![(rat(1), 2), (rat(3), 2)],
            vec![(rat(2), 5), (ratio(-1, 2), 3)],
        ] {
            let d = data(&pairs);
            let c = detb_closed_form(&d, 0).unwrap();
            let u2 = d.universe().u(2);
            for (table, det) in c.derivative_tables.iter().zip(&c.det_bj) {
                for (i, value) in table.iter().enumerate() {
                    let deriv = det.diff(u2, i as u32).eval_u_at_zero();
                    assert_eq!(deriv.as_constant().unwrap(), *value, "i = {i}");
                }
            }
        }
    }

    #[test]
    fn u2_coefficient_examples() {
        let s2 = |n| Sym::new(Universe::new(n));
        let s = s2(2);
        assert_eq!(
            detb_u2_coefficient(&data(&[(rat(1), 2)]), 0).unwrap(),
            s.u(2) - s.one()
        );
        assert_eq!(
            detb_u2_coefficient(&data(&[(rat(2), 2)]), 0).unwrap(),
            -(s.c(ratio(1, 2)) - s.u(2).scale(&ratio(1, 4)))
        );
        let s = s2(3);
        assert_eq!(
            detb_u2_coefficient(&data(&[(rat(1), 3)]), 0).unwrap(),
            s.one() - s.u(2) + s.u(2).pow(2)
        );
        for n1 in 2..=5 {
            assert!(detb_u2_coefficient(&data(&[(ratio(-3, 2), n1)]), 0).is_ok());
        }
    }

    #[test]
    fn lower_extraction_exponent_shifts_by_u2_power() {
        let d = data(&[(rat(1), 3)]);
        let s = Sym::new(d.universe());
        let c = detb_closed_form(&d, 0).unwrap();
        let low = extract_u2_coefficient(&c.det_b1, 3, 2);
        assert_eq!(low, s.u(2).pow(2) * (s.one() - s.u(2) + s.u(2).pow(2)));
    }
}
