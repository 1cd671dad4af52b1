//! `futaki`: JSON front end for the verification engine.
//!
//! Every run writes exactly one JSON document. Exit status is 0 when all
//! checks pass, 1 when a check fails, and 2 on invalid input; in the last
//! case the document is `{"error": {"kind": ..., "message": ...}}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use futaki_core::bmatrix::{build_bmatrix, detb_closed_form, detb_u2_coefficient};
use futaki_core::futaki::{verify_main_identity, VerificationReport};
use futaki_core::gksums::{
    characteristic_oracle, combinatorial_identity, combinatorial_identity_expected, gk_table,
    psi_oracle, CharacteristicReport, PsiFamily, PsiReport,
};
use futaki_core::jordan::{
    build_lifted_field, perturbation_order_check, poincare_resonance_check, JordanBlock, JordanData,
};
use futaki_core::kernel::rational::format_rational;
use futaki_core::kernel::{parse_rational, Pole, Rational};
use futaki_core::residues::{multi_block_residue, PhiSelector, ResidueInput};
use futaki_core::sampling::{random_quadratic_perturbation, resample, rng_from_seed};
use futaki_core::Error;

#[derive(Parser, Debug)]
#[command(name = "futaki", version, about = "Exact localization checks for blowup Futaki invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file: blocks, truncation_order, samples, seed and
    /// command options (focus, phi, family, l, m_cap).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Inline Jordan data, e.g. '{"blocks":[{"eigenvalue":"1","size":2}]}'.
    /// Replaces the blocks of the config file.
    #[arg(long, global = true)]
    data: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Highest eps power kept (verify); defaults to n + 1.
    #[arg(long, global = true)]
    truncation: Option<u32>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Blowup defect series and its order-by-order check.
    Verify,
    /// Local residue of an integrand at an exceptional fixed point.
    Residue {
        /// one | theta_power:N | laplacian_times_theta_power:N
        #[arg(long)]
        phi: Option<String>,
        /// Block index, starting at 1.
        #[arg(long)]
        focus: Option<usize>,
    },
    /// G_k sums, brute force against closed form.
    Gk,
    /// Residues of the auxiliary differentials behind the G_k values.
    Psi {
        /// top (k = n + 1) | one (k = 1) | mid:K; all when omitted.
        #[arg(long)]
        family: Option<String>,
    },
    /// Closed-form det B factors and, for n <= 5, the symbolic comparison.
    Detb {
        #[arg(long)]
        focus: Option<usize>,
    },
    /// Alternating binomial sum for one l and every k = 0..=l+1.
    Comb {
        #[arg(long)]
        l: Option<u32>,
    },
    /// O(u_1) comparisons for seeded random quadratic perturbations.
    Perturb,
    /// Poincaré-domain and resonance diagnostics of the eigenvalues.
    Poincare {
        #[arg(long)]
        m_cap: Option<u32>,
    },
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    blocks: Option<Vec<RawBlock>>,
    truncation_order: Option<u32>,
    samples: Option<usize>,
    seed: Option<u64>,
    focus: Option<usize>,
    phi: Option<String>,
    family: Option<String>,
    l: Option<u32>,
    m_cap: Option<u32>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    eigenvalue: String,
    size: usize,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawData {
    blocks: Vec<RawBlock>,
}

/// Fully resolved run parameters; flags win over the config file.
#[derive(Debug)]
struct RunConfig {
    data: Option<JordanData>,
    truncation_order: Option<u32>,
    samples: usize,
    seed: u64,
    focus: usize,
    phi: Option<String>,
    family: Option<String>,
    l: Option<u32>,
    m_cap: Option<u32>,
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            code: 2,
        }
    }

    fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::ParseRational(_) => "invalid_rational",
            Error::InvalidJordanData(_) => "invalid_jordan_data",
            Error::FocusOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::TruncationTooLow { .. }
            | Error::NondegenerateFocus
            | Error::IntegrandNotReduced(_)
            | Error::InvalidPerturbation(_) => "invalid_argument",
            _ => "computation",
        };
        let code = if kind == "computation" { 1 } else { 2 };
        CliError {
            kind,
            message: e.to_string(),
            code,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Outcome {
    doc: Value,
    pass: bool,
}

fn jordan_from_raw(blocks: Vec<RawBlock>) -> CliResult<JordanData> {
    let blocks = blocks
        .into_iter()
        .map(|b| Ok(JordanBlock::new(parse_rational(&b.eigenvalue)?, b.size)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(JordanData::new(blocks)?)
}

fn resolve(cli: &Cli, focus_flag: Option<usize>) -> CliResult<RunConfig> {
    let file: ConfigFile = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input("io", format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::input("malformed_config", e.to_string()))?
        }
        None => ConfigFile::default(),
    };
    let data = match &cli.data {
        Some(text) => {
            let raw: RawData =
                serde_json::from_str(text).map_err(|e| CliError::input("malformed_config", e.to_string()))?;
            Some(jordan_from_raw(raw.blocks)?)
        }
        None => file.blocks.map(jordan_from_raw).transpose()?,
    };
    let samples = cli.samples.or(file.samples).unwrap_or(1);
    if samples == 0 {
        return Err(CliError::input("invalid_argument", "samples must be at least 1"));
    }
    let focus = focus_flag.or(file.focus).unwrap_or(1);
    if focus == 0 {
        return Err(CliError::input("invalid_argument", "focus is a block index starting at 1"));
    }
    Ok(RunConfig {
        data,
        truncation_order: cli.truncation.or(file.truncation_order),
        samples,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        focus: focus - 1,
        phi: file.phi,
        family: file.family,
        l: file.l,
        m_cap: file.m_cap,
    })
}

fn need_data(cfg: &RunConfig) -> CliResult<&JordanData> {
    cfg.data
        .as_ref()
        .ok_or_else(|| CliError::input("malformed_config", "no Jordan data: pass --data or a config with blocks"))
}

fn rat_str(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run_verify(cfg: &RunConfig) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let cap = cfg.truncation_order.unwrap_or(data.dim() as u32 + 1);
    let given = verify_main_identity(data, cap)?;
    let mut rng = rng_from_seed(cfg.seed);
    let extra: Vec<VerificationReport> = (1..cfg.samples)
        .map(|_| verify_main_identity(&resample(data, &mut rng), cap))
        .collect::<Result<_, Error>>()?;
    let overall = given.overall && extra.iter().all(|r| r.overall);
    let mut doc = to_value(&given);
    doc["overall"] = json!(overall);
    doc["truncation_order"] = json!(cap);
    doc["seed"] = json!(cfg.seed);
    doc["samples"] = Value::Array(extra.iter().map(to_value).collect());
    Ok(Outcome { doc, pass: overall })
}

fn parse_phi(text: &str) -> CliResult<PhiSelector> {
    let bad = || CliError::input("invalid_argument", format!("unknown phi selector {text:?}"));
    let power = |p: &str| p.parse::<u32>().map_err(|_| bad());
    match text.split_once(':') {
        None if text == "one" => Ok(PhiSelector::One),
        Some(("theta_power", p)) => Ok(PhiSelector::ThetaPower(power(p)?)),
        Some(("laplacian_times_theta_power", p)) => Ok(PhiSelector::LaplacianTimesThetaPower(power(p)?)),
        _ => Err(bad()),
    }
}

fn run_residue(cfg: &RunConfig, phi_flag: Option<String>) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let text = phi_flag.or_else(|| cfg.phi.clone()).unwrap_or_else(|| "one".into());
    let selector = parse_phi(&text)?;
    let phi = selector.build(data, cfg.focus)?;
    let input = ResidueInput::new(phi.clone(), data.clone(), cfg.focus)?;
    let residue = multi_block_residue(&input)?;
    Ok(Outcome {
        doc: json!({
            "data": data,
            "focus": cfg.focus + 1,
            "phi": text,
            "integrand": phi,
            "residue": residue,
        }),
        pass: true,
    })
}

fn run_gk(cfg: &RunConfig) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let table = gk_table(data)?;
    let keyed = |xs: &[Rational]| -> Map<String, Value> {
        xs.iter().enumerate().map(|(i, x)| ((i + 1).to_string(), rat_str(x))).collect()
    };
    let agree: Map<String, Value> = table
        .agree()
        .into_iter()
        .enumerate()
        .map(|(i, b)| ((i + 1).to_string(), json!(b)))
        .collect();
    let pass = table.all_agree();
    Ok(Outcome {
        doc: json!({
            "data": data,
            "values": keyed(&table.brute),
            "closed": keyed(&table.closed),
            "agree": agree,
            "all_agree": pass,
        }),
        pass,
    })
}

fn parse_family(text: &str, n: usize) -> CliResult<PsiFamily> {
    let family = match text {
        "top" => PsiFamily::KEqNPlus1,
        "one" => PsiFamily::KEq1,
        _ => match text.strip_prefix("mid:").map(str::parse::<usize>) {
            Some(Ok(k)) => PsiFamily::MidK(k),
            _ => return Err(CliError::input("invalid_argument", format!("unknown psi family {text:?}"))),
        },
    };
    if let PsiFamily::MidK(k) = family {
        if k <= 1 || k >= n + 1 {
            return Err(CliError::input(
                "invalid_argument",
                format!("mid:K needs 1 < K < n + 1 = {}", n + 1),
            ));
        }
    }
    Ok(family)
}

fn family_name(f: PsiFamily) -> String {
    match f {
        PsiFamily::KEqNPlus1 => "top".into(),
        PsiFamily::KEq1 => "one".into(),
        PsiFamily::MidK(k) => format!("mid:{k}"),
    }
}

fn residue_list(rs: &[(Pole, Rational)]) -> Value {
    Value::Array(
        rs.iter()
            .map(|(p, r)| json!({ "pole": p.to_string(), "residue": format_rational(r) }))
            .collect(),
    )
}

fn psi_json(r: &PsiReport) -> Value {
    let blocks: Vec<Value> = r
        .blocks
        .iter()
        .map(|b| {
            json!({
                "block": b.block + 1,
                "psi": b.psi.to_string(),
                "residues": residue_list(&b.residues),
                "residue_sum": rat_str(&b.residue_sum),
                "pole_at_zero": b.pole_at_zero,
                "pole_at_infinity": b.pole_at_infinity,
            })
        })
        .collect();
    json!({
        "family": family_name(r.family),
        "k": r.k,
        "blocks": blocks,
        "recovered_gk": rat_str(&r.recovered_gk),
        "closed_gk": rat_str(&r.closed_gk),
        "brute_gk": rat_str(&r.brute_gk),
        "checks": r.checks,
        "all_pass": r.all_pass(),
    })
}

fn characteristic_json(r: &CharacteristicReport) -> Value {
    json!({
        "k": r.k,
        "residues": residue_list(&r.residues),
        "recovered_gk": rat_str(&r.recovered_gk),
        "brute_gk": rat_str(&r.brute_gk),
        "residue_sum": rat_str(&r.residue_sum),
        "pass": r.pass(),
    })
}

fn run_psi(cfg: &RunConfig, family_flag: Option<String>) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let n = data.dim();
    let families = match family_flag.or_else(|| cfg.family.clone()) {
        Some(text) => vec![parse_family(&text, n)?],
        None => {
            let mut all = vec![PsiFamily::KEqNPlus1];
            all.extend((2..=n).map(PsiFamily::MidK));
            all.push(PsiFamily::KEq1);
            all
        }
    };
    let reports = families
        .iter()
        .map(|&f| psi_oracle(data, f))
        .collect::<Result<Vec<_>, Error>>()?;
    let characteristic = families
        .iter()
        .map(|f| characteristic_oracle(data, f.k(n)))
        .collect::<Result<Vec<_>, Error>>()?;
    let pass = reports.iter().all(|r| r.all_pass()) && characteristic.iter().all(|r| r.pass());
    Ok(Outcome {
        doc: json!({
            "data": data,
            "families": reports.iter().map(psi_json).collect::<Vec<_>>(),
            "characteristic": characteristic.iter().map(characteristic_json).collect::<Vec<_>>(),
            "all_pass": pass,
        }),
        pass,
    })
}

fn run_detb(cfg: &RunConfig) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let closed = detb_closed_form(data, cfg.focus)?;
    let n1 = data.focused(cfg.focus)?.size(0);
    let tables: Vec<Vec<Value>> = closed
        .derivative_tables
        .iter()
        .map(|t| t.iter().map(rat_str).collect())
        .collect();
    let mut doc = json!({
        "data": data,
        "focus": cfg.focus + 1,
        "k": closed.k,
        "det_b1": closed.det_b1,
        "det_bj": closed.det_bj,
        "derivative_tables": tables,
    });
    let mut pass = true;
    if n1 < 2 {
        doc["note"] = json!("focus block has size 1: nondegenerate point, no certificate matrix");
        return Ok(Outcome { doc, pass });
    }
    match detb_u2_coefficient(data, cfg.focus) {
        Ok(c) => doc["u2_coefficient"] = to_value(&c),
        Err(Error::CrossCheckFailed(msg)) => {
            pass = false;
            doc["u2_coefficient_error"] = json!(msg);
        }
        Err(e) => return Err(e.into()),
    }
    if data.dim() <= 5 {
        let field = build_lifted_field(data, cfg.focus)?;
        let symbolic = match build_bmatrix(&field, data) {
            Ok(b) => {
                let matches = b.determinant() == closed.product();
                pass &= matches;
                json!({ "alpha": b.alpha, "certificate": true, "determinant_matches": matches })
            }
            Err(e @ Error::CertificateFailed { .. }) => {
                pass = false;
                json!({ "certificate": false, "message": e.to_string() })
            }
            Err(e) => return Err(e.into()),
        };
        doc["symbolic"] = symbolic;
    }
    Ok(Outcome { doc, pass })
}

fn run_comb(cfg: &RunConfig, l_flag: Option<u32>) -> CliResult<Outcome> {
    let l = l_flag
        .or(cfg.l)
        .ok_or_else(|| CliError::input("invalid_argument", "comb needs --l"))?;
    let mut values = Vec::new();
    let mut expected = Vec::new();
    let mut pass = true;
    for k in 0..=l + 1 {
        let v = combinatorial_identity(l, k);
        let e = combinatorial_identity_expected(l, k);
        if let Some(e) = &e {
            pass &= e == &v;
        }
        values.push(json!(v.to_string()));
        expected.push(e.map_or(Value::Null, |e| json!(e.to_string())));
    }
    Ok(Outcome {
        doc: json!({ "l": l, "values": values, "expected": expected, "pass": pass }),
        pass,
    })
}

fn run_perturb(cfg: &RunConfig) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut runs = Vec::new();
    let mut pass = true;
    for _ in 0..cfg.samples {
        let terms = random_quadratic_perturbation(data.universe(), &mut rng);
        let report = perturbation_order_check(data, &terms)?;
        pass &= report.all_pass;
        let mut v = to_value(&report);
        v["perturbation"] = to_value(&terms);
        runs.push(v);
    }
    Ok(Outcome {
        doc: json!({ "data": data, "seed": cfg.seed, "runs": runs, "all_pass": pass }),
        pass,
    })
}

fn run_poincare(cfg: &RunConfig, m_cap_flag: Option<u32>) -> CliResult<Outcome> {
    let data = need_data(cfg)?;
    let m_cap = m_cap_flag.or(cfg.m_cap).unwrap_or(8);
    let eigenvalues = data.eigenvalues_with_multiplicity();
    let report = poincare_resonance_check(&eigenvalues, m_cap);
    let mut doc = to_value(&report);
    doc["data"] = to_value(data);
    doc["eigenvalues"] = Value::Array(eigenvalues.iter().map(rat_str).collect());
    doc["m_cap"] = json!(m_cap);
    Ok(Outcome { doc, pass: true })
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let focus_flag = match &cli.command {
        Command::Residue { focus, .. } | Command::Detb { focus } => *focus,
        _ => None,
    };
    let cfg = resolve(&cli, focus_flag)?;
    match cli.command {
        Command::Verify => run_verify(&cfg),
        Command::Residue { phi, .. } => run_residue(&cfg, phi),
        Command::Gk => run_gk(&cfg),
        Command::Psi { family } => run_psi(&cfg, family),
        Command::Detb { .. } => run_detb(&cfg),
        Command::Comb { l } => run_comb(&cfg, l),
        Command::Perturb => run_perturb(&cfg),
        Command::Poincare { m_cap } => run_poincare(&cfg, m_cap),
    }
}

fn emit(doc: &Value, pretty: bool, output: Option<&Path>) -> std::io::Result<()> {
    let mut text = if pretty {
        serde_json::to_string_pretty(doc)
    } else {
        serde_json::to_string(doc)
    }
    .expect("json values serialize");
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    let output = cli.output.clone();
    let (code, doc) = match run(cli) {
        Ok(o) => (u8::from(!o.pass), o.doc),
        Err(e) => (e.code, e.to_json()),
    };
    if let Err(e) = emit(&doc, pretty, output.as_deref()) {
        eprintln!("futaki: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
