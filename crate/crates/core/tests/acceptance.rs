//! Acceptance run: one line per criterion, exact equality throughout.

use std::process::ExitCode;
use std::time::Instant;

use futaki_core::bmatrix::{build_bmatrix, detb_closed_form, detb_u2_coefficient};
use futaki_core::combinat::positive_compositions;
use futaki_core::futaki::{sum_exceptional_contributions, verify_main_identity};
use futaki_core::gksums::{
    characteristic_oracle, combinatorial_identity, combinatorial_identity_expected, g_primes, gk_table,
    psi_oracle, PsiFamily,
};
use futaki_core::jordan::{build_lifted_field, perturbation_order_check, JordanData};
use futaki_core::kernel::rational::{rat, ratio, Rational};
use futaki_core::kernel::Sym;
use futaki_core::residues::{
    brute_force_residue, compare_order_conventions, order_vector, single_block_residue, OrderConvention,
    ResidueInput,
};
use futaki_core::sampling::{random_data, random_phi, random_quadratic_perturbation, rng_from_seed};

const SEED: u64 = 20_140_301;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Seeded sample set: every composition of `2..=max_n` into at most
/// `max_m` blocks, `samples` eigenvalue tuples each.
fn sample_set(max_n: usize, max_m: usize, samples: usize, salt: u64) -> Vec<JordanData> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for sizes in positive_compositions(n, max_m) {
            let mut rng = rng_from_seed(SEED ^ salt ^ ((n as u64) << 32) ^ hash_sizes(&sizes));
            for _ in 0..samples {
                out.push(random_data(&sizes, &mut rng));
            }
        }
    }
    out
}

fn hash_sizes(sizes: &[usize]) -> u64 {
    sizes.iter().fold(17u64, |h, &s| h.wrapping_mul(31).wrapping_add(s as u64))
}

fn describe(d: &JordanData) -> String {
    let parts: Vec<String> = d
        .blocks()
        .iter()
        .map(|b| format!("{}x{}", b.eigenvalue, b.size))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn criterion_1() -> Outcome {
    let values = [rat(1), rat(-1), rat(2), rat(-3), ratio(5, 2), ratio(-7, 3)];
    let mut runs = 0;
    for n in 2..=6 {
        for a in &values {
            let d = JordanData::single_block(a.clone(), n).unwrap();
            let r = verify_main_identity(&d, n as u32 + 1).unwrap();
            if !r.overall {
                return outcome(false, format!("defect check fails for {}", describe(&d)));
            }
            runs += 1;
        }
    }
    outcome(true, format!("{runs} single-block configurations"))
}

fn criterion_2() -> Outcome {
    let set = sample_set(6, 3, 10, 2);
    for d in &set {
        let r = verify_main_identity(d, d.dim() as u32 + 1).unwrap();
        if !r.overall {
            return outcome(false, format!("defect check fails for {}", describe(d)));
        }
    }
    outcome(true, format!("{} sampled configurations, n <= 6, m <= 3", set.len()))
}

fn criterion_3(set: &[JordanData]) -> Outcome {
    for d in set {
        let t = gk_table(d).unwrap();
        if !t.all_agree() {
            return outcome(false, format!("G_k mismatch for {}", describe(d)));
        }
    }
    outcome(true, format!("{} sampled configurations, n <= 8, m <= 4", set.len()))
}

fn criterion_4() -> Outcome {
    let set = sample_set(6, 4, 20, 3);
    let mut psi_runs = 0;
    let mut failures: Vec<String> = Vec::new();
    let mut failing_names = std::collections::BTreeMap::<String, usize>::new();
    let mut characteristic_ok = true;
    for d in &set {
        let n = d.dim();
        let mut families = vec![PsiFamily::KEqNPlus1, PsiFamily::KEq1];
        families.extend((2..=n).map(PsiFamily::MidK));
        for f in families {
            let r = psi_oracle(d, f).unwrap();
            psi_runs += 1;
            if let Some(c) = r.first_failure() {
                let key = format!("{:?}/{}", family_name(f), c.name);
                *failing_names.entry(key).or_default() += 1;
                if failures.len() < 1 {
                    failures.push(format!("{} {:?}: {} ({})", describe(d), f, c.name, c.detail));
                }
            }
        }
        for k in 1..=n + 1 {
            characteristic_ok &= characteristic_oracle(d, k).unwrap().pass();
        }
    }
    let summary: Vec<String> = failing_names.iter().map(|(k, v)| format!("{k} x{v}")).collect();
    let tail = format!(
        "z^(n-k)/det(A - z) recovers every G_k from its residues: {}",
        if characteristic_ok { "yes" } else { "no" }
    );
    if failures.is_empty() {
        outcome(true, format!("{psi_runs} differentials over {} configurations; {tail}", set.len()))
    } else {
        outcome(
            false,
            format!(
                "{psi_runs} differentials over {} configurations; failing: {}; first: {}; {tail}",
                set.len(),
                summary.join(", "),
                failures[0]
            ),
        )
    }
}

fn family_name(f: PsiFamily) -> &'static str {
    match f {
        PsiFamily::KEqNPlus1 => "k=n+1",
        PsiFamily::MidK(_) => "1<k<n+1",
        PsiFamily::KEq1 => "k=1",
    }
}

fn criterion_5() -> Outcome {
    for l in 0..=12 {
        for k in 0..=l + 1 {
            if Some(combinatorial_identity(l, k)) != combinatorial_identity_expected(l, k) {
                return outcome(false, format!("l = {l}, k = {k}"));
            }
        }
    }
    outcome(true, "l <= 12, 0 <= k <= l + 1")
}

fn criterion_6() -> Outcome {
    let set = sample_set(5, 3, 2, 6);
    let mut matrices = 0;
    for d in &set {
        for focus in 0..d.num_blocks() {
            let n1 = d.size(focus);
            if n1 < 2 {
                continue;
            }
            let field = build_lifted_field(d, focus).unwrap();
            let b = match build_bmatrix(&field, d) {
                Ok(b) => b,
                Err(e) => return outcome(false, format!("{} focus {focus}: {e}", describe(d))),
            };
            let closed = detb_closed_form(d, focus).unwrap();
            if b.determinant() != closed.product() {
                return outcome(false, format!("det B mismatch for {} focus {focus}", describe(d)));
            }
            if let Err(e) = detb_u2_coefficient(d, focus) {
                return outcome(false, format!("{} focus {focus}: {e}", describe(d)));
            }
            matrices += 1;
        }
    }
    outcome(
        true,
        format!("{matrices} certificate matrices, n <= 5, m <= 3; u_2 coefficient taken at u_j^(2^(k+1)-1)"),
    )
}

fn criterion_7(set: &[JordanData]) -> Outcome {
    let mut checks = 0;
    for d in set {
        for k in 1..=d.dim() {
            let g = g_primes(d, k).unwrap();
            if !(g.trace_identity && g.pascal_identity) {
                return outcome(false, format!("{} k = {k}", describe(d)));
            }
            checks += 1;
        }
    }
    outcome(true, format!("{checks} (configuration, k) pairs"))
}

fn criterion_8() -> Outcome {
    let mut set = sample_set(6, 3, 3, 8);
    for n in 2..=6 {
        set.push(JordanData::single_block(ratio(-7, 3), n).unwrap());
    }
    for d in &set {
        let s = sum_exceptional_contributions(d, d.dim() as u32 + 1).unwrap();
        if !(s.i_closed_form && s.j_closed_form) {
            return outcome(false, format!("closed forms fail for {}", describe(d)));
        }
    }
    outcome(
        true,
        format!(
            "{} configurations; sum of I_q carries -n(n-1) theta eps^(n-1), not -n(n+1)",
            set.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 9);
    let values = [rat(1), rat(-1), rat(2), ratio(5, 2), ratio(-7, 3)];
    for a in &values {
        let d = JordanData::single_block(a.clone(), 2).unwrap();
        let uni = d.universe();
        let s = Sym::new(uni);
        for _ in 0..5 {
            let phi = random_phi(uni, 5, &mut rng);
            let r = single_block_residue(&ResidueInput::new(phi.clone(), d.clone(), 0).unwrap()).unwrap();
            let u2 = uni.u(2);
            let expected = phi.eval_at_zero(&[u2]).scale(&(a * a).recip())
                - phi.diff(u2, 1).eval_at_zero(&[u2]).scale(&a.recip());
            if r != expected {
                return outcome(false, format!("residue operator differs at a = {a}"));
            }
        }
        let rep = verify_main_identity(&d, 3).unwrap();
        if rep.defect.coefficient(1) != s.int(2) * s.theta() {
            return outcome(false, format!("eps coefficient {} at a = {a}", rep.defect.coefficient(1)));
        }
    }
    outcome(true, "Res phi = phi(0)/a^2 - phi'(0)/a and eps-coefficient 2 theta at n = 2")
}

fn criterion_10() -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 10);
    let a: Rational = ratio(-5, 3);
    let d = JordanData::single_block(a, 2).unwrap();
    let field = build_lifted_field(&d, 0).unwrap();
    let b = build_bmatrix(&field, &d).unwrap();
    let orders = order_vector(&d, 0, OrderConvention::AlphaMinusOne).unwrap();
    for _ in 0..25 {
        let phi = random_phi(d.universe(), 5, &mut rng);
        let brute = brute_force_residue(&field, &b, &phi, &orders).unwrap();
        let reduced = single_block_residue(&ResidueInput::new(phi, d.clone(), 0).unwrap()).unwrap();
        if brute != reduced {
            return outcome(false, "n = 2 brute-force residue differs from the reduced formula");
        }
    }
    let d3 = JordanData::single_block(ratio(3, 2), 3).unwrap();
    let mut matches = [0usize; 2];
    let trials = 5;
    for _ in 0..trials {
        let phi = random_phi(d3.universe(), 5, &mut rng);
        let cmp = compare_order_conventions(&ResidueInput::new(phi, d3.clone(), 0).unwrap()).unwrap();
        for (slot, r) in cmp.results.iter().enumerate() {
            matches[slot] += r.matches_reduced as usize;
        }
    }
    outcome(
        true,
        format!(
            "n = 2: 25/25 agree; n = 3 with random phi: orders (0,2,3) match {}/{trials}, orders (0,2,2) match {}/{trials}",
            matches[0], matches[1]
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 11);
    let mut runs = 0;
    for n in 2..=3 {
        for sizes in positive_compositions(n, n) {
            let d = random_data(&sizes, &mut rng);
            for _ in 0..5 {
                let p = random_quadratic_perturbation(d.universe(), &mut rng);
                let r = perturbation_order_check(&d, &p).unwrap();
                if !r.all_pass {
                    return outcome(false, format!("{}: {}", describe(&d), r.failures.join("; ")));
                }
                runs += 1;
            }
        }
    }
    outcome(true, format!("{runs} perturbed fields, n in {{2, 3}}"))
}

/// Criteria whose claim is false as stated; their FAIL lines are expected.
const KNOWN_FAILURES: &[usize] = &[4];

fn main() -> ExitCode {
    let shared = sample_set(8, 4, 20, 3);
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(|| criterion_3(&shared))),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(|| criterion_7(&shared))),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
        (11, Box::new(criterion_11)),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in &criteria {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status} ({secs:.1}s) {}", o.detail);
        if !o.pass && !KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
