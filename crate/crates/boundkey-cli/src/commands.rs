//! Argument types and implementations for the six subcommands.

use std::env;
use std::path::PathBuf;

use boundkey::analysis::{
    coherent_information_erasure, dw_rate_ccq, entropy_class_c, entropy_max_spider_y,
    entropy_supremum_rho_u, noise_threshold_dw, ErasureFamily,
};
use boundkey::criteria::{
    all_hold, general_key_condition, key_condition_class_c, ppt_analytic_class_c, ppt_numeric,
    separability_conditions, tolerable_noise_recurrence, Verdict,
};
use boundkey::linops::{hermitian_eigenvalues, validate_density, von_neumann_entropy};
use boundkey::states::{
    add_white_noise, class_c_state, fourier_unitary, hadamard, ppt_boundary_params, qubit_unitary,
    rho_h_flag_form, spider_y, ClassParams, UnitaryAngles, XYPair,
};
use boundkey::Operator;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::gridspec::{boundary_bounds, Axis, Grid};
use crate::statefile::StateFile;
use crate::CliError;

const PPT_TOL: f64 = 1e-9;
const DEFAULT_D_CAP: usize = 40;
const NOISE_GRID_STEP: f64 = 0.005;
const NOISE_GRID_POINTS: usize = 41;

#[derive(Parser)]
#[command(
    name = "boundkey",
    version,
    about = "Construct and analyze bound-entangled key-distillable states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a state and write it to a JSON state file.
    Construct(ConstructArgs),
    /// Evaluate verdicts (ppt, key, separability) on a state file.
    Check(CheckArgs),
    /// Sweep class parameters and write one CSV row per grid point.
    Scan(ScanArgs),
    /// White-noise response of the boundary state: rate curve and thresholds.
    Noise(NoiseArgs),
    /// Erasure coherent information across a range of shield dimensions.
    Erasure(ErasureArgs),
    /// Maximize the class-state entropy over a one-parameter family.
    EntropyMax(EntropyMaxArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassId {
    /// Full class state at explicit (p, alpha, beta).
    #[value(name = "rho_U")]
    RhoU,
    /// PPT boundary state: alpha = beta = 1, p = 1/(1 + |X^G|).
    Tilde,
    /// Interpolated-generator family member at its key-region corner.
    #[value(name = "spider_y")]
    SpiderY,
    /// d = 2 state assembled as a flagged Bell mixture.
    #[value(name = "flag_form")]
    FlagForm,
}

impl ClassId {
    fn name(self) -> &'static str {
        match self {
            ClassId::RhoU => "rho_U",
            ClassId::Tilde => "tilde",
            ClassId::SpiderY => "spider_y",
            ClassId::FlagForm => "flag_form",
        }
    }
}

#[derive(Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub class: ClassId,
    /// Generator: hadamard, fourier, identity, or angles:a,b,g,d (radians).
    #[arg(long, default_value = "hadamard")]
    pub unitary: String,
    /// Shield dimension (the key part is always 2 x 2).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Even-sector weight in [0, 1] (rho_U, flag_form).
    #[arg(long)]
    pub p: Option<f64>,
    /// Even-sector asymmetry in [-1, 1] (rho_U, flag_form).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Odd-sector asymmetry in [-1, 1] (rho_U, flag_form).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Generator interpolation weight in [0, 1] (spider_y).
    #[arg(long)]
    pub q: Option<f64>,
    /// Mix in white noise: (1 - eps) rho + eps I/(4 d^2).
    #[arg(long)]
    pub noise: Option<f64>,
    /// Output state file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Input state file (JSON).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Evaluate the partial-transpose conditions.
    #[arg(long)]
    pub ppt: bool,
    /// Evaluate the key-distillability conditions.
    #[arg(long)]
    pub key: bool,
    /// Evaluate the separability conditions (needs class metadata, d = 2).
    #[arg(long)]
    pub sep: bool,
    /// Emit the verdicts as one JSON object instead of text lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct ScanArgs {
    /// Only rho_U can be swept.
    #[arg(long, value_enum)]
    pub class: ClassId,
    /// Generator: hadamard, fourier, identity, or angles:a,b,g,d (radians).
    #[arg(long, default_value = "hadamard")]
    pub unitary: String,
    /// Shield dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// p=<axis>,alpha=<axis>,beta=<axis>; axis = v | a:b:n | boundary.
    #[arg(long)]
    pub grid: String,
    /// Fill the dw_rate column (one eigensolve per row).
    #[arg(long)]
    pub dw: bool,
    /// Fill the icoh column (erasure coherent information per row).
    #[arg(long)]
    pub icoh: bool,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct NoiseArgs {
    /// Only the tilde boundary state is supported.
    #[arg(long, value_enum)]
    pub class: ClassId,
    /// Only the hadamard generator is supported.
    #[arg(long, default_value = "hadamard")]
    pub unitary: String,
    /// Output CSV (noise grid with rates and key verdicts).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ErasureConfig {
    /// Boundary family: alpha = beta = 1 at p = sqrt(d)/(sqrt(d) + 1).
    #[value(name = "tilde_unimodular")]
    TildeUnimodular,
    /// Same p, alpha = 1 but beta = 0.
    #[value(name = "beta0")]
    Beta0,
}

#[derive(Args)]
pub struct ErasureArgs {
    #[arg(long, value_enum)]
    pub config: ErasureConfig,
    /// Inclusive shield range a:b with 2 <= a <= b <= cap.
    #[arg(long)]
    pub d_range: String,
    /// Output CSV (one row per shield dimension).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EntropyFamily {
    /// Sweep p along alpha = sqrt((1-p)/p), beta = 0 with a Fourier generator.
    #[value(name = "rho_U")]
    RhoU,
    /// Sweep the generator interpolation weight q.
    #[value(name = "spider_y")]
    SpiderY,
    /// The boundary state itself (single point, no sweep).
    Tilde,
}

#[derive(Args)]
pub struct EntropyMaxArgs {
    #[arg(long, value_enum)]
    pub family: EntropyFamily,
    /// Shield dimension (rho_U and tilde; spider_y is d = 2 only).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
}

fn parse_unitary(spec: &str, d: usize) -> Result<(Operator, String), CliError> {
    let need_qubit = |what: &str| -> Result<(), CliError> {
        if d == 2 {
            Ok(())
        } else {
            Err(CliError::Usage(format!("the {what} generator needs --d 2, got {d}")))
        }
    };
    match spec {
        "hadamard" => {
            need_qubit("hadamard")?;
            Ok((hadamard(), "hadamard".to_string()))
        }
        "fourier" => Ok((fourier_unitary(d)?, "fourier".to_string())),
        "identity" => Ok((Operator::identity(vec![d])?, "identity".to_string())),
        s if s.starts_with("angles:") => {
            need_qubit("angles")?;
            let a = parse_angles(s)?;
            Ok((qubit_unitary(&a), s.to_string()))
        }
        other => Err(CliError::Usage(format!(
            "unknown generator {other:?} (expected hadamard, fourier, identity, or angles:a,b,g,d)"
        ))),
    }
}

fn parse_angles(spec: &str) -> Result<UnitaryAngles, CliError> {
    let body = spec.strip_prefix("angles:").unwrap_or(spec);
    let vals: Vec<f64> = body
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad angle list {body:?}")))?;
    if vals.len() != 4 || vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!(
            "expected 4 finite angles a,b,g,d, got {body:?}"
        )));
    }
    Ok(UnitaryAngles { alpha: vals[0], beta: vals[1], gamma: vals[2], delta: vals[3] })
}

fn qubit_angles(spec: &str) -> Result<UnitaryAngles, CliError> {
    match spec {
        "hadamard" => Ok(UnitaryAngles::HADAMARD),
        "identity" => Ok(UnitaryAngles { alpha: 0.0, beta: 0.0, gamma: 0.0, delta: 0.0 }),
        s if s.starts_with("angles:") => parse_angles(s),
        other => Err(CliError::Usage(format!(
            "generator {other:?} has no qubit angle form (use hadamard, identity, or angles:...)"
        ))),
    }
}

fn require(value: Option<f64>, flag: &str, class: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("class {class} requires {flag}")))
}

fn reject(value: Option<f64>, flag: &str, class: &str, why: &str) -> Result<(), CliError> {
    if value.is_some() {
        return Err(CliError::Usage(format!("class {class} does not take {flag}: {why}")));
    }
    Ok(())
}

fn class_metadata(
    class: ClassId,
    params: &ClassParams,
    unitary: &str,
    norm_x_gamma: f64,
) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("class".into(), class.name().into());
    meta.insert("d".into(), (params.d() as u64).into());
    meta.insert("p".into(), params.p().into());
    meta.insert("alpha".into(), params.alpha().into());
    meta.insert("beta".into(), params.beta().into());
    meta.insert("unitary".into(), unitary.into());
    meta.insert("norm_x_gamma".into(), norm_x_gamma.into());
    meta
}

fn build_state(args: &ConstructArgs) -> Result<(Operator, Map<String, Value>), CliError> {
    let class = args.class.name();
    match args.class {
        ClassId::RhoU => {
            reject(args.q, "--q", class, "it has no generator interpolation")?;
            let p = require(args.p, "--p", class)?;
            let alpha = require(args.alpha, "--alpha", class)?;
            let beta = require(args.beta, "--beta", class)?;
            let (u, uid) = parse_unitary(&args.unitary, args.d)?;
            let xy = XYPair::from_unitary(&u)?;
            let params = ClassParams::new(args.d, p, alpha, beta)?;
            let rho = class_c_state(&params, &xy)?;
            let meta = class_metadata(args.class, &params, &uid, xy.norm_x_gamma());
            Ok((rho, meta))
        }
        ClassId::Tilde => {
            let why = "the boundary point fixes it";
            reject(args.p, "--p", class, why)?;
            reject(args.alpha, "--alpha", class, why)?;
            reject(args.beta, "--beta", class, why)?;
            reject(args.q, "--q", class, "it has no generator interpolation")?;
            let (u, uid) = parse_unitary(&args.unitary, args.d)?;
            let xy = XYPair::from_unitary(&u)?;
            let params = ppt_boundary_params(&xy)?;
            let rho = class_c_state(&params, &xy)?;
            let meta = class_metadata(args.class, &params, &uid, xy.norm_x_gamma());
            Ok((rho, meta))
        }
        ClassId::SpiderY => {
            let why = "the key-region corner fixes it";
            reject(args.p, "--p", class, why)?;
            reject(args.alpha, "--alpha", class, why)?;
            reject(args.beta, "--beta", class, why)?;
            if args.d != 2 {
                return Err(CliError::Usage(format!(
                    "class {class} is defined for --d 2, got {}",
                    args.d
                )));
            }
            let q = require(args.q, "--q", class)?;
            let angles = qubit_angles(&args.unitary)?;
            let xy = spider_y(&angles, &angles, q)?;
            let nxg = xy.norm_x_gamma();
            let params = ClassParams::new(2, 1.0 / (1.0 + nxg * nxg), nxg, 0.0)?;
            let rho = class_c_state(&params, &xy)?;
            let mut meta = class_metadata(args.class, &params, &args.unitary, nxg);
            meta.insert("q".into(), q.into());
            Ok((rho, meta))
        }
        ClassId::FlagForm => {
            reject(args.q, "--q", class, "it has no generator interpolation")?;
            if args.unitary != "hadamard" {
                return Err(CliError::Usage(format!(
                    "class {class} is generated by hadamard only, got {:?}",
                    args.unitary
                )));
            }
            if args.d != 2 {
                return Err(CliError::Usage(format!(
                    "class {class} is defined for --d 2, got {}",
                    args.d
                )));
            }
            let p = require(args.p, "--p", class)?;
            let alpha = require(args.alpha, "--alpha", class)?;
            let beta = require(args.beta, "--beta", class)?;
            let params = ClassParams::new(2, p, alpha, beta)?;
            let rho = rho_h_flag_form(&params)?;
            let xy = XYPair::from_unitary(&hadamard())?;
            let meta = class_metadata(args.class, &params, "hadamard", xy.norm_x_gamma());
            Ok((rho, meta))
        }
    }
}

pub fn run_construct(args: &ConstructArgs) -> Result<(), CliError> {
    let (mut rho, mut meta) = build_state(args)?;
    if let Some(eps) = args.noise {
        rho = add_white_noise(&rho, eps)?;
        if eps > 0.0 {
            meta.insert("noise".into(), eps.into());
        }
    }
    validate_density(&rho)?;
    let eigenvalues = hermitian_eigenvalues(&rho)?;
    let psd_margin = eigenvalues.last().copied().unwrap_or(0.0);
    let entropy = von_neumann_entropy(&rho)?;
    meta.insert("entropy".into(), entropy.into());

    let file = StateFile::from_operator(&rho, meta.clone());
    file.write(&args.out)?;

    println!("class: {}", args.class.name());
    println!("dims: {:?}", rho.dims());
    println!("trace: {}", rho.trace().re);
    println!("psd margin: {psd_margin}");
    println!("entropy: {entropy}");
    for key in ["p", "alpha", "beta", "q", "noise", "unitary", "norm_x_gamma"] {
        match meta.get(key) {
            Some(Value::String(s)) => println!("{key}: {s}"),
            Some(v) => println!("{key}: {v}"),
            None => {}
        }
    }
    println!("wrote: {}", args.out.display());
    Ok(())
}

/// Class parameters recovered from file metadata, usable for analytic
/// verdicts. Absent for noised states: their analytic forms no longer apply.
fn params_from_metadata(meta: &Map<String, Value>) -> Option<(ClassParams, f64)> {
    if meta.get("noise").and_then(Value::as_f64).unwrap_or(0.0) > 0.0 {
        return None;
    }
    let num = |k: &str| meta.get(k).and_then(Value::as_f64);
    let d = meta.get("d").and_then(Value::as_u64)? as usize;
    let params = ClassParams::new(d, num("p")?, num("alpha")?, num("beta")?).ok()?;
    Some((params, num("norm_x_gamma")?))
}

pub fn run_check(args: &CheckArgs) -> Result<(), CliError> {
    let file = StateFile::read(&args.input)?;
    let rho = file.to_operator()?;
    validate_density(&rho)?;
    let meta_params = params_from_metadata(&file.metadata);

    let all = !(args.ppt || args.key || args.sep);
    let mut verdicts: Vec<Verdict> = Vec::new();
    if args.ppt || all {
        verdicts.push(ppt_numeric(&rho, PPT_TOL)?);
        if let Some((params, nxg)) = &meta_params {
            verdicts.extend(ppt_analytic_class_c(params, *nxg)?);
        }
    }
    if args.key || all {
        verdicts.push(general_key_condition(&rho)?);
        if let Some((params, _)) = &meta_params {
            verdicts.push(key_condition_class_c(params));
        }
    }
    let sep_applicable = matches!(&meta_params, Some((p, _)) if p.d() == 2);
    if args.sep || (all && sep_applicable) {
        let Some((params, nxg)) = &meta_params else {
            return Err(CliError::Usage(
                "separability verdicts need class metadata (p, alpha, beta, d, norm_x_gamma)"
                    .into(),
            ));
        };
        verdicts.extend(separability_conditions(params, *nxg)?);
    }

    if args.json {
        let items: Vec<Value> = verdicts
            .iter()
            .map(|v| {
                json!({
                    "condition": v.condition,
                    "holds": v.holds,
                    "margin": v.margin,
                    "inputs": v.inputs,
                })
            })
            .collect();
        let report = json!({
            "file": args.input.display().to_string(),
            "verdicts": items,
        });
        println!(
            "{}",
            serde_json::to_string(&report)
                .map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?
        );
    } else {
        for v in &verdicts {
            let status = if v.holds { "HOLDS" } else { "FAILS" };
            if v.inputs.is_empty() {
                println!("{}: {status} margin={}", v.condition, v.margin);
            } else {
                println!("{}: {status} margin={} [{}]", v.condition, v.margin, v.inputs);
            }
        }
    }
    Ok(())
}

const SCAN_HEADER: [&str; 13] = [
    "p",
    "alpha",
    "beta",
    "d",
    "unitary",
    "ppt_analytic",
    "ppt_numeric",
    "key",
    "separable",
    "entropy",
    "tolerable_noise",
    "dw_rate",
    "icoh",
];

fn scan_row(
    params: &ClassParams,
    xy: &XYPair,
    unitary: &str,
    with_dw: bool,
    with_icoh: bool,
    cap: usize,
) -> Result<Vec<String>, CliError> {
    let nxg = xy.norm_x_gamma();
    let ppt_a = all_hold(&ppt_analytic_class_c(params, nxg)?);
    let rho = class_c_state(params, xy)?;
    let ppt_n = ppt_numeric(&rho, PPT_TOL)?.holds;
    let key = key_condition_class_c(params).holds;
    let separable = if params.d() == 2 {
        all_hold(&separability_conditions(params, nxg)?).to_string()
    } else {
        String::new()
    };
    let entropy = entropy_class_c(params, xy)?.total;
    let tolerable = if params.p() > 0.5 {
        tolerable_noise_recurrence(params)?.to_string()
    } else {
        String::new()
    };
    let dw = if with_dw { dw_rate_ccq(&rho)?.to_string() } else { String::new() };
    let icoh = if with_icoh {
        coherent_information_erasure(params, xy, cap)?.i_coh.to_string()
    } else {
        String::new()
    };
    Ok(vec![
        params.p().to_string(),
        params.alpha().to_string(),
        params.beta().to_string(),
        params.d().to_string(),
        unitary.to_string(),
        ppt_a.to_string(),
        ppt_n.to_string(),
        key.to_string(),
        separable,
        entropy.to_string(),
        tolerable,
        dw,
        icoh,
    ])
}

pub fn run_scan(args: &ScanArgs) -> Result<(), CliError> {
    if args.class != ClassId::RhoU {
        return Err(CliError::Usage(format!(
            "scan sweeps the rho_U family; class {} has no free (p, alpha, beta)",
            args.class.name()
        )));
    }
    let (u, uid) = parse_unitary(&args.unitary, args.d)?;
    let xy = XYPair::from_unitary(&u)?;
    let nxg = xy.norm_x_gamma();
    let grid = Grid::parse(&args.grid)?;
    let cap = erasure_cap()?;

    let mut writer = csv_writer(&args.out)?;
    write_record(&mut writer, &args.out, SCAN_HEADER.iter().map(|s| s.to_string()))?;
    let mut rows = 0usize;
    for p in grid.p.points()? {
        let (alpha_b, beta_b) = boundary_bounds(p, nxg);
        let alphas = match grid.alpha {
            Axis::Boundary => vec![alpha_b],
            ax => ax.points()?,
        };
        let betas = match grid.beta {
            Axis::Boundary => vec![beta_b],
            ax => ax.points()?,
        };
        for &alpha in &alphas {
            for &beta in &betas {
                let params = ClassParams::new(args.d, p, alpha, beta)?;
                let row = scan_row(&params, &xy, &uid, args.dw, args.icoh, cap)?;
                write_record(&mut writer, &args.out, row)?;
                rows += 1;
            }
        }
    }
    flush(&mut writer, &args.out)?;
    println!("wrote: {} ({rows} rows)", args.out.display());
    Ok(())
}

pub fn run_noise(args: &NoiseArgs) -> Result<(), CliError> {
    if args.class != ClassId::Tilde {
        return Err(CliError::Usage(format!(
            "noise analysis covers the tilde boundary state, not {}",
            args.class.name()
        )));
    }
    if args.unitary != "hadamard" {
        return Err(CliError::Usage(format!(
            "noise analysis covers the hadamard generator, not {:?}",
            args.unitary
        )));
    }
    let xy = XYPair::from_unitary(&hadamard())?;
    let params = ppt_boundary_params(&xy)?;
    let rho = class_c_state(&params, &xy)?;
    let recurrence = tolerable_noise_recurrence(&params)?;
    let dw_zero = noise_threshold_dw(&rho, 0.05)?;

    let mut writer = csv_writer(&args.out)?;
    write_record(
        &mut writer,
        &args.out,
        ["eps", "dw_rate", "key_condition_holds"].iter().map(|s| s.to_string()),
    )?;
    for k in 0..NOISE_GRID_POINTS {
        let eps = k as f64 * NOISE_GRID_STEP;
        let noised = add_white_noise(&rho, eps)?;
        let rate = dw_rate_ccq(&noised)?;
        let key = general_key_condition(&noised)?.holds;
        write_record(
            &mut writer,
            &args.out,
            [eps.to_string(), rate.to_string(), key.to_string()],
        )?;
    }
    flush(&mut writer, &args.out)?;
    println!(
        "summary: recurrence_threshold={recurrence} dw_threshold={dw_zero} ratio={}",
        recurrence / dw_zero
    );
    println!("wrote: {}", args.out.display());
    Ok(())
}

fn parse_d_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad d range {text:?}: {why}"));
    let (a, b) = text.split_once(':').ok_or_else(|| bad("expected a:b"))?;
    let a: usize = a.parse().map_err(|_| bad("start is not an integer"))?;
    let b: usize = b.parse().map_err(|_| bad("end is not an integer"))?;
    if a < 2 {
        return Err(bad("shield dimensions start at 2"));
    }
    if a > b {
        return Err(bad("start exceeds end"));
    }
    Ok((a, b))
}

fn erasure_cap() -> Result<usize, CliError> {
    match env::var("BOUNDKEY_DMAX") {
        Ok(s) => s.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!("BOUNDKEY_DMAX={s:?} is not a non-negative integer"))
        }),
        Err(env::VarError::NotPresent) => Ok(DEFAULT_D_CAP),
        Err(e) => Err(CliError::Usage(format!("cannot read BOUNDKEY_DMAX: {e}"))),
    }
}

pub fn run_erasure(args: &ErasureArgs) -> Result<(), CliError> {
    let (lo, hi) = parse_d_range(&args.d_range)?;
    let cap = erasure_cap()?;
    if hi > cap {
        return Err(CliError::Usage(format!(
            "d range end {hi} exceeds the cap {cap}; set BOUNDKEY_DMAX to raise it"
        )));
    }
    let family = match args.config {
        ErasureConfig::TildeUnimodular => ErasureFamily::PptBoundary,
        ErasureConfig::Beta0 => ErasureFamily::PptBoundaryBeta0,
    };

    let mut writer = csv_writer(&args.out)?;
    write_record(
        &mut writer,
        &args.out,
        ["d", "i_coh", "s_total", "s_apbbp", "s_bbp", "s_abbp"].iter().map(|s| s.to_string()),
    )?;
    let mut threshold = None;
    for d in lo..=hi {
        let (params, xy) = family.params_for(d)?;
        let r = coherent_information_erasure(&params, &xy, cap)?;
        if threshold.is_none() && r.i_coh > 0.0 {
            threshold = Some(d);
        }
        write_record(
            &mut writer,
            &args.out,
            [
                d.to_string(),
                r.i_coh.to_string(),
                r.s_total.to_string(),
                r.s_apbbp.to_string(),
                r.s_bbp.to_string(),
                r.s_abbp.to_string(),
            ],
        )?;
    }
    flush(&mut writer, &args.out)?;
    match threshold {
        Some(d) => println!("threshold={d}"),
        None => println!("threshold=none"),
    }
    println!("wrote: {}", args.out.display());
    Ok(())
}

fn print_breakdown(bd: &boundkey::analysis::EntropyBreakdown) {
    println!(
        "breakdown: h_p={} h_alpha={} s_x={} h_beta={} s_y={}",
        bd.h_p, bd.h_alpha, bd.s_x, bd.h_beta, bd.s_y
    );
}

pub fn run_entropy_max(args: &EntropyMaxArgs) -> Result<(), CliError> {
    match args.family {
        EntropyFamily::RhoU => {
            let best = entropy_supremum_rho_u(args.d)?;
            let alpha = ((1.0 - best.argmax) / best.argmax).sqrt();
            let xy = XYPair::from_unitary(&fourier_unitary(args.d)?)?;
            let params = ClassParams::new(args.d, best.argmax, alpha, 0.0)?;
            let bd = entropy_class_c(&params, &xy)?;
            println!("family: rho_U");
            println!("maximum: {}", best.value);
            println!("argmax p: {}", best.argmax);
            print_breakdown(&bd);
        }
        EntropyFamily::SpiderY => {
            if args.d != 2 {
                return Err(CliError::Usage(format!(
                    "family spider_y is defined for --d 2, got {}",
                    args.d
                )));
            }
            let h = UnitaryAngles::HADAMARD;
            let best = entropy_max_spider_y(&h, &h)?;
            let xy = spider_y(&h, &h, best.argmax)?;
            let nxg = xy.norm_x_gamma();
            let params = ClassParams::new(2, 1.0 / (1.0 + nxg * nxg), nxg, 0.0)?;
            let bd = entropy_class_c(&params, &xy)?;
            println!("family: spider_y");
            println!("maximum: {}", best.value);
            println!("argmax q: {}", best.argmax);
            print_breakdown(&bd);
        }
        EntropyFamily::Tilde => {
            let u = if args.d == 2 { hadamard() } else { fourier_unitary(args.d)? };
            let xy = XYPair::from_unitary(&u)?;
            let params = ppt_boundary_params(&xy)?;
            let bd = entropy_class_c(&params, &xy)?;
            println!("family: tilde");
            println!("maximum: {}", bd.total);
            println!("argmax p: {}", params.p());
            print_breakdown(&bd);
        }
    }
    Ok(())
}

fn csv_writer(path: &std::path::Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_record<I, S>(
    writer: &mut csv::Writer<std::fs::File>,
    path: &std::path::Path,
    row: I,
) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    writer
        .write_record(row)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn flush(writer: &mut csv::Writer<std::fs::File>, path: &std::path::Path) -> Result<(), CliError> {
    writer
        .flush()
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}
