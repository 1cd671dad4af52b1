//! Seeded random inputs: eigenvalue tuples, integrands, perturbations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jordan::{JordanBlock, JordanData};
use crate::kernel::rational::{ratio, Rational};
use crate::kernel::{Poly, Universe};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero rational `p/q` with `|p| <= 50`, `1 <= q <= 50`.
pub fn random_rational(rng: &mut SampleRng) -> Rational {
    loop {
        let p: i64 = rng.gen_range(-50..=50);
        if p != 0 {
            return ratio(p, rng.gen_range(1..=50));
        }
    }
}

/// `count` pairwise-distinct nonzero rationals avoiding `forbidden`.
pub fn sample_eigenvalues(rng: &mut SampleRng, count: usize, forbidden: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_rational(rng);
        if !out.contains(&x) && !forbidden.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Seeded form of [`sample_eigenvalues`]: the list depends only on
/// `(count, seed, forbidden)`.
pub fn sample_eigenvalues_seeded(count: usize, seed: u64, forbidden: &[Rational]) -> Vec<Rational> {
    sample_eigenvalues(&mut rng_from_seed(seed), count, forbidden)
}

/// Same block sizes as `data`, fresh eigenvalues.
pub fn resample(data: &JordanData, rng: &mut SampleRng) -> JordanData {
    let values = sample_eigenvalues(rng, data.num_blocks(), &[]);
    JordanData::new(
        data.sizes()
            .into_iter()
            .zip(values)
            .map(|(s, a)| JordanBlock::new(a, s))
            .collect(),
    )
    .expect("sampled eigenvalues are distinct and nonzero")
}

pub fn random_data(sizes: &[usize], rng: &mut SampleRng) -> JordanData {
    let values = sample_eigenvalues(rng, sizes.len(), &[]);
    JordanData::new(
        sizes
            .iter()
            .zip(values)
            .map(|(&s, a)| JordanBlock::new(a, s))
            .collect(),
    )
    .expect("sampled eigenvalues are distinct and nonzero")
}

fn small_coefficient(rng: &mut SampleRng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// Random polynomial in `u_2, theta, eps` of total degree at most `degree`.
pub fn random_phi(universe: Universe, degree: u32, rng: &mut SampleRng) -> Poly {
    let vars = [universe.u(2), universe.theta(), universe.eps()];
    let mut out = Poly::zero(universe);
    for d0 in 0..=degree {
        for d1 in 0..=degree - d0 {
            for d2 in 0..=degree - d0 - d1 {
                if rng.gen_bool(0.5) {
                    let factors = [(vars[0], d0), (vars[1], d1), (vars[2], d2)];
                    out += &Poly::monomial(universe, &factors, small_coefficient(rng));
                }
            }
        }
    }
    out
}

/// One polynomial per component in the base coordinates (`u`-slots), with
/// monomials of degree 2 and 3 only.
pub fn random_quadratic_perturbation(universe: Universe, rng: &mut SampleRng) -> Vec<Poly> {
    let n = universe.n();
    let mut monomials: Vec<Vec<u32>> = Vec::new();
    for total in 2..=3u32 {
        for e in crate::combinat::weak_compositions(total as i64, n) {
            monomials.push(e);
        }
    }
    (0..n)
        .map(|_| {
            let mut p = Poly::zero(universe);
            let count = rng.gen_range(1..=4);
            for e in monomials.choose_multiple(rng, count) {
                let factors: Vec<_> = e
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| (universe.u(i + 1), k))
                    .collect();
                p += &Poly::monomial(universe, &factors, small_coefficient(rng));
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let a = sample_eigenvalues(&mut rng_from_seed(7), 5, &[]);
        let b = sample_eigenvalues(&mut rng_from_seed(7), 5, &[]);
        assert_eq!(a, b);
        for (i, x) in a.iter().enumerate() {
            assert!(!num_traits::Zero::is_zero(x));
            assert!(!a[..i].contains(x));
        }
    }

    #[test]
    fn seeded_lists_avoid_forbidden_values() {
        let forbidden = sample_eigenvalues_seeded(4, 3, &[]);
        let a = sample_eigenvalues_seeded(6, 3, &forbidden);
        assert_eq!(a, sample_eigenvalues_seeded(6, 3, &forbidden));
        assert!(a.iter().all(|x| !forbidden.contains(x)));
        assert_eq!(sample_eigenvalues_seeded(1, 99, &[]).len(), 1);
    }

    #[test]
    fn perturbations_have_no_linear_part() {
        let uni = Universe::new(3);
        let p = random_quadratic_perturbation(uni, &mut rng_from_seed(1));
        assert_eq!(p.len(), 3);
        for c in &p {
            assert!(c.terms().all(|(e, _)| e.iter().sum::<u32>() >= 2));
        }
    }
}
