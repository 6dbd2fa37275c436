//! `entsub` command line: every subcommand prints one JSON document holding
//! the format version, the full configuration and the result. Errors go to
//! stderr as JSON with a nonzero exit status.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::applications::{
    build_robust_state, build_witness, product_positivity_check, witness_perturbation_probe,
};
use crate::certify::{
    self, choose_params, parse_big, reproduce_table, search_min_n, verify_certificate, Mode,
};
use crate::construction::{
    build_kernel_subspace, build_uc, equivalence_check, ConstraintSystem, ConstructionTag,
    SubspaceBasis,
};
use crate::entanglement::{
    canonical_tensor_state, geometric_measure, hmin_lower_bound, hmin_tensor_upper_bound,
    min_output_entropy, multipartite_overlap_bound_check, OptimizerOptions,
};
use crate::error::{Error, Result};
use crate::matrix_json::MatrixJson;
use crate::tensor::{schmidt, Bipartition, ResourceCap, TensorShape};

pub const FORMAT_VERSION: &str = "entsub/1";
/// Overrides the default resource cap (number of scalars).
pub const CAP_ENV: &str = "ENTSUB_MAX_ELEMENTS";

#[derive(Debug, Parser)]
#[command(
    name = "entsub",
    version,
    about = "Explicit highly entangled subspaces"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a subspace and write its basis.
    Construct(ConstructArgs),
    /// Estimate geometric measure and minimum output entropies.
    Measure(MeasureArgs),
    /// Verify a strict sub-additivity certificate.
    Certify(CertifyArgs),
    /// Build the entanglement witness 1 - mu Pi_U.
    Witness(WitnessArgs),
    /// Build the robust mixed state Pi_U / dim U and its radius.
    RobustState(RobustStateArgs),
    /// Sample the lower bound on symmetrized products.
    BeauzamyTest(BeauzamyArgs),
    /// Run the full set of checks and the parameter table.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coefficients {
    Ones,
    Binomial,
    KernelCoordinates,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    /// Kernel of the symmetric projector.
    #[arg(long, conflicts_with = "uc", required_unless_present = "uc")]
    pub kernel: bool,
    /// Coefficient-constrained subspace.
    #[arg(long)]
    pub uc: bool,
    #[arg(long)]
    pub a: Option<usize>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<u32>,
    /// Comma-separated local dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value = "binomial")]
    pub coeffs: Coefficients,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[arg(long)]
    pub subspace: PathBuf,
    /// Comma-separated Rényi orders.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Comma-separated factors on the left of the entropy cut.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub cut: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CliMode {
    Direct,
    Sufficient,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long, required_unless_present = "table")]
    pub p: Option<f64>,
    /// Integer, `AeB` or `A^B`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum, default_value = "direct")]
    pub mode: CliMode,
    /// Certify every published table row.
    #[arg(long)]
    pub table: bool,
    /// Scan n = 2..=N for the smallest passing value at the chosen d.
    #[arg(long)]
    pub search_max_n: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub subspace: PathBuf,
    /// Entanglement lower bound; defaults to the construction's certified one.
    #[arg(long)]
    pub e_lb: Option<f64>,
    /// Random product states for the positivity check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RobustStateArgs {
    #[arg(long)]
    pub subspace: PathBuf,
    #[arg(long)]
    pub e_lb: Option<f64>,
    /// Random perturbations at the radius; 0 skips the probe.
    #[arg(long, default_value_t = 0)]
    pub probe_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BeauzamyArgs {
    #[arg(long, default_value_t = 2)]
    pub a: usize,
    /// Comma-separated degrees, one per factor.
    #[arg(long, value_delimiter = ',', default_value = "3,3")]
    pub d: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    /// Fewer trials and samples.
    #[arg(long)]
    pub quick: bool,
    /// Sufficient-mode sweep `start:step:end`.
    #[arg(long)]
    pub p_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Outcome of a subcommand: its result document and whether every check
/// it ran passed.
pub struct Outcome {
    pub result: Value,
    pub pass: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn resource_cap() -> Result<ResourceCap> {
    match std::env::var(CAP_ENV) {
        Ok(s) => {
            s.trim().parse::<u128>().map(ResourceCap::new).map_err(|_| {
                Error::InvalidParameter(format!("{CAP_ENV} must be an integer, got {s}"))
            })
        }
        Err(_) => Ok(ResourceCap::default()),
    }
}

/// On-disk form of a subspace.
#[derive(Debug, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub ambient: Vec<usize>,
    pub dim: usize,
    pub tag: ConstructionTag,
    pub certified_entanglement_lower: Option<f64>,
    pub basis: MatrixJson,
}

impl SubspaceDoc {
    pub fn from_subspace(u: &SubspaceBasis) -> Self {
        SubspaceDoc {
            ambient: u.ambient().dims().to_vec(),
            dim: u.dim(),
            tag: u.tag().clone(),
            certified_entanglement_lower: u.certified_entanglement_lower(),
            basis: MatrixJson::from_matrix(u.basis()),
        }
    }

    pub fn into_subspace(self) -> Result<SubspaceBasis> {
        let basis = self.basis.to_matrix()?;
        if basis.ncols() != self.dim {
            return Err(Error::Format(format!(
                "dim {} does not match {} basis columns",
                self.dim,
                basis.ncols()
            )));
        }
        SubspaceBasis::new(TensorShape::new(self.ambient)?, basis, self.tag)
    }
}

/// Reads a subspace from a `construct` document or a bare subspace object.
pub fn load_subspace(path: &std::path::Path) -> Result<SubspaceBasis> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("result") {
        value = inner.take();
    }
    let doc: SubspaceDoc = serde_json::from_value(value)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    doc.into_subspace()
}

pub fn cmd_construct(args: &ConstructArgs, cap: &ResourceCap) -> Result<Outcome> {
    let u = if args.kernel {
        let a = args
            .a
            .ok_or_else(|| Error::InvalidParameter("--kernel needs --a".into()))?;
        build_kernel_subspace(a, &args.d, &args.n, cap)?
    } else {
        let total: u128 = args.n.iter().map(|&x| x as u128).product();
        cap.check_square("constraint system", total)?;
        let system = match args.coeffs {
            Coefficients::Ones => ConstraintSystem::ones(&args.n)?,
            Coefficients::Binomial => ConstraintSystem::binomial(&args.n)?,
            Coefficients::KernelCoordinates => {
                let a = args.a.ok_or_else(|| {
                    Error::InvalidParameter("kernel-coordinates needs --a and --d".into())
                })?;
                ConstraintSystem::kernel_coordinates(a, &args.d, &args.n)?
            }
        };
        build_uc(&system)?
    };
    Ok(Outcome {
        result: to_value(&SubspaceDoc::from_subspace(&u)),
        pass: true,
    })
}

pub fn cmd_measure(args: &MeasureArgs, _cap: &ResourceCap) -> Result<Outcome> {
    let u = load_subspace(&args.subspace)?;
    let opts = OptimizerOptions {
        trials: args.trials,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
    };
    let est = geometric_measure(&u, &opts)?;
    let m = u.ambient().factors();
    let right: Vec<usize> = (0..m).filter(|f| !args.cut.contains(f)).collect();
    let cut = Bipartition::new(args.cut.clone(), right);
    let mut entropies = Vec::new();
    for &p in &args.p {
        let h = min_output_entropy(&u, p, &cut, &opts, est.certified_lower)?;
        entropies.push(json!({
            "p": p,
            "value_upper": h.value_upper,
            "bound_lower": h.bound_lower,
            "converged_trials": h.converged_trials,
        }));
    }
    let factors: Vec<MatrixJson> = est
        .best_product_state
        .factors
        .iter()
        .map(MatrixJson::from_vector)
        .collect();
    Ok(Outcome {
        result: json!({
            "E": {
                "certified_lower": est.certified_lower,
                "numerical_upper": est.numerical_upper,
            },
            "entropies": entropies,
            "cut": cut,
            "diagnostics": {
                "dim": u.dim(),
                "ambient": u.ambient().dims(),
                "trials": est.trials,
                "converged_trials": est.converged_trials,
                "best_trial": est.best_trial,
                "monotonicity_violations": est.monotonicity_violations,
                "best_product_state": factors,
            },
        }),
        pass: true,
    })
}

fn mode_of(m: CliMode) -> Mode {
    match m {
        CliMode::Direct => Mode::Direct,
        CliMode::Sufficient => Mode::Sufficient,
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<Outcome> {
    if args.table {
        let rows = reproduce_table()?;
        let pass = rows.iter().all(|r| r.report.pass);
        return Ok(Outcome {
            result: json!({ "rows": to_value(&rows), "all_pass": pass }),
            pass,
        });
    }
    let p = args
        .p
        .ok_or_else(|| Error::InvalidParameter("--p is required".into()))?;
    let (d0, n0) = choose_params(p)?;
    let d = args.d.unwrap_or(d0);
    if let Some(max_n) = args.search_max_n {
        let found = search_min_n(p, d, max_n)?;
        let pass = found.is_some();
        return Ok(Outcome {
            result: json!({ "search_max_n": max_n, "d": d, "found": to_value(&found) }),
            pass,
        });
    }
    let n = match &args.n {
        Some(s) => parse_big(s)?,
        None if args.d.is_some() => {
            return Err(Error::InvalidParameter("--d needs --n".into()));
        }
        None => n0,
    };
    let report = verify_certificate(p, &n, d, mode_of(args.mode))?;
    let pass = report.pass;
    Ok(Outcome {
        result: to_value(&report),
        pass,
    })
}

fn resolve_e(u: &SubspaceBasis, e_lb: Option<f64>) -> Result<f64> {
    e_lb.or_else(|| u.certified_entanglement_lower())
        .ok_or_else(|| {
            Error::InvalidParameter("subspace has no certified bound; pass --e-lb".into())
        })
}

pub fn cmd_witness(args: &WitnessArgs, cap: &ResourceCap) -> Result<Outcome> {
    let u = load_subspace(&args.subspace)?;
    let e = resolve_e(&u, args.e_lb)?;
    let (w, report) = build_witness(&u, e, cap)?;
    let products = product_positivity_check(&u, &w, args.samples, args.seed)?;
    let pass = products.violations == 0;
    Ok(Outcome {
        result: json!({
            "report": to_value(&report),
            "product_check": to_value(&products),
            "witness": MatrixJson::from_matrix(&w),
        }),
        pass,
    })
}

pub fn cmd_robust_state(args: &RobustStateArgs, cap: &ResourceCap) -> Result<Outcome> {
    let u = load_subspace(&args.subspace)?;
    let e = resolve_e(&u, args.e_lb)?;
    let state = build_robust_state(&u, e, cap)?;
    for w in &state.warnings {
        eprintln!("warning: {w}");
    }
    let probe = if args.probe_samples > 0 && state.radius_trace_norm.is_some() {
        let (w, _) = build_witness(&u, e, cap)?;
        Some(witness_perturbation_probe(
            &state,
            &w,
            args.probe_samples,
            args.seed,
        )?)
    } else {
        None
    };
    Ok(Outcome {
        result: json!({
            "rank": state.rank,
            "e_lb": state.e_lb,
            "radius_trace_norm": state.radius_trace_norm,
            "radius_case": state.radius_case,
            "candidates": state.candidates,
            "warnings": state.warnings,
            "probe": probe,
            "rho": MatrixJson::from_matrix(&state.rho),
        }),
        pass: true,
    })
}

pub fn cmd_beauzamy(args: &BeauzamyArgs, cap: &ResourceCap) -> Result<Outcome> {
    let report = multipartite_overlap_bound_check(args.a, &args.d, args.samples, args.seed, cap)?;
    let pass = report.violations == 0;
    Ok(Outcome {
        result: to_value(&report),
        pass,
    })
}

/// Parses `start:step:end` into an inclusive grid rounded to 12 decimals.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Format(format!("expected start:step:end, got {s}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, step, end] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || end < start {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(Error::InvalidParameter(format!("grid has {count} points")));
    }
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn check(name: &str, pass: bool, detail: Value) -> Value {
    json!({ "name": name, "pass": pass, "detail": detail })
}

pub fn cmd_reproduce(args: &ReproduceArgs, cap: &ResourceCap) -> Result<Outcome> {
    let (trials, samples) = if args.quick { (16, 1000) } else { (64, 10_000) };
    let mut checks = Vec::new();

    let table = reproduce_table()?;
    checks.push(check(
        "table_rows",
        table.iter().all(|r| r.report.pass),
        json!(table
            .iter()
            .map(|r| json!({
                "p": r.p, "n": r.n, "d": r.d,
                "dim": r.report.dim_exact,
                "published_dim": r.published_dim,
                "dim_agreement": r.dim_agreement,
                "margin_bits": r.report.margin_bits,
                "pass": r.report.pass,
            }))
            .collect::<Vec<_>>()),
    ));

    let grid = match &args.p_grid {
        Some(g) => parse_grid(g)?,
        None => vec![1.1, 1.25, 1.5, 1.75, 2.0, 3.0, 10.0],
    };
    let mut sweep = Vec::new();
    for &p in &grid {
        let (d, n) = choose_params(p)?;
        let rep = verify_certificate(p, &n, d, Mode::Sufficient)?;
        sweep.push(json!({ "p": p, "d": d, "margin_bits": rep.margin_bits, "pass": rep.pass }));
    }
    let sweep_pass = sweep.iter().all(|r| r["pass"] == json!(true));
    checks.push(check("sufficient_sweep", sweep_pass, json!(sweep)));

    let mut dims = Vec::new();
    let mut dims_pass = true;
    for m in [2usize, 3] {
        for n in [2usize, 3, 4] {
            let nvec = vec![n; m];
            let expect = n.pow(m as u32) - m * (n - 1) - 1;
            let uc = build_uc(&ConstraintSystem::binomial(&nvec)?)?.dim();
            let dvec = vec![(n - 1) as u32; m];
            let kernel = build_kernel_subspace(2, &dvec, &nvec, cap)?.dim();
            let ok = uc == expect && kernel == expect;
            dims_pass &= ok;
            dims.push(json!({ "n": n, "m": m, "expected": expect, "uc": uc, "kernel": kernel }));
        }
    }
    checks.push(check("dimension_formulas", dims_pass, json!(dims)));

    let mut eq = Vec::new();
    let mut eq_pass = true;
    for (a, dvec, nvec) in [
        (2usize, vec![2u32, 2], vec![3usize, 3]),
        (2, vec![1, 1, 1], vec![2, 2, 2]),
        (3, vec![1, 1], vec![3, 3]),
    ] {
        let uc = build_uc(&ConstraintSystem::kernel_coordinates(a, &dvec, &nvec)?)?;
        let kernel = build_kernel_subspace(a, &dvec, &nvec, cap)?;
        let res = equivalence_check(&uc, &kernel, 1e-10)?;
        eq_pass &= res.equivalent;
        eq.push(json!({ "a": a, "d": dvec, "distance": res.distance }));
    }
    checks.push(check("coordinate_kernel_equivalence", eq_pass, json!(eq)));

    let b2 = multipartite_overlap_bound_check(2, &[3, 3], samples, args.seed, cap)?;
    let b3 = multipartite_overlap_bound_check(2, &[1, 1, 1], samples, args.seed, cap)?;
    checks.push(check(
        "product_bounds",
        b2.violations == 0 && b3.violations == 0,
        json!([b2, b3]),
    ));

    let u22 = build_kernel_subspace(2, &[2, 2], &[3, 3], cap)?;
    let opts = OptimizerOptions {
        trials,
        seed: args.seed,
        ..OptimizerOptions::default()
    };
    let est = geometric_measure(&u22, &opts)?;
    let cut = Bipartition::new(vec![0], vec![1]);
    let h2 = min_output_entropy(&u22, 2.0, &cut, &opts, est.certified_lower)?;
    let h2_lb = hmin_lower_bound(1.0 / 6.0, 2.0)?;
    checks.push(check(
        "entanglement_sandwich",
        est.numerical_upper >= 1.0 / 6.0 - 1e-9 && h2.value_upper >= h2_lb - 1e-6,
        json!({
            "certified_lower": est.certified_lower,
            "numerical_upper": est.numerical_upper,
            "entropy_p2_upper": h2.value_upper,
            "entropy_p2_lower": h2_lb,
        }),
    ));

    let singlet = build_uc(&ConstraintSystem::ones(&[2, 2])?)?;
    let mut canon = Vec::new();
    let mut canon_pass = true;
    for (name, u) in [("singlet", &singlet), ("u_2_22", &u22)] {
        let st = canonical_tensor_state(u, cap)?;
        let sp = schmidt(&st.vector, &st.shape, &st.cut)?;
        let dims = u.ambient().dims();
        for p in [1.5, 2.0, 3.0] {
            let h = sp.renyi(p)?;
            let bound = hmin_tensor_upper_bound(u.dim() as u64, dims[0] as u64, dims[1] as u64, p)?;
            canon_pass &= h <= bound + 1e-9;
            canon.push(json!({ "subspace": name, "p": p, "entropy": h, "bound": bound }));
        }
    }
    checks.push(check("canonical_state_bound", canon_pass, json!(canon)));

    let (w, wrep) = build_witness(&u22, 1.0 / 6.0, cap)?;
    let prod = product_positivity_check(&u22, &w, samples, args.seed)?;
    checks.push(check(
        "witness_spectrum",
        wrep.negative_count == 4 && prod.violations == 0,
        json!({ "report": wrep, "product_check": prod }),
    ));

    let mut extras = vec![];
    for (m, alpha) in [(2usize, 1.0), (3, 1.5)] {
        extras.push(to_value(&certify::tradeoff_f(m, alpha)?));
    }
    let gap = certify::hastings_gap_check(3, 4, 1.0 / 6.0)?;
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    Ok(Outcome {
        result: json!({
            "checks": checks,
            "tradeoff": extras,
            "gap_inequality": gap,
            "all_pass": pass,
        }),
        pass,
    })
}

fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "command": command,
        "config": config,
        "result": result,
    })
}

fn dispatch(cli: &Cli, cap: &ResourceCap) -> Result<(Value, bool)> {
    let (name, config, outcome) = match &cli.command {
        Command::Construct(a) => ("construct", to_value(a), cmd_construct(a, cap)?),
        Command::Measure(a) => ("measure", to_value(a), cmd_measure(a, cap)?),
        Command::Certify(a) => ("certify", to_value(a), cmd_certify(a)?),
        Command::Witness(a) => ("witness", to_value(a), cmd_witness(a, cap)?),
        Command::RobustState(a) => ("robust-state", to_value(a), cmd_robust_state(a, cap)?),
        Command::BeauzamyTest(a) => ("beauzamy-test", to_value(a), cmd_beauzamy(a, cap)?),
        Command::Reproduce(a) => ("reproduce", to_value(a), cmd_reproduce(a, cap)?),
    };
    let mut config = config;
    config["max_elements"] = json!(cap.max_elements.to_string());
    Ok((envelope(name, config, outcome.result), outcome.pass))
}

/// Runs the parsed command; returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let result = resource_cap().and_then(|cap| {
        let go = || dispatch(&cli, &cap);
        match cli.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
                .install(go),
            None => go(),
        }
    });
    match result {
        Ok((doc, pass)) => {
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Error::Format(format!("{}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) if pass => 0,
                Ok(()) => 1,
                Err(e) => report_error(&e),
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "error": { "kind": e.kind(), "message": e.to_string() },
    });
    eprintln!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("serializable")
    );
    2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("1.1:0.1:2").unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 1.1);
        assert_eq!(g[9], 2.0);
        assert_eq!(g[1], 1.2);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn cli_parses_construct_forms() {
        let cli = Cli::try_parse_from([
            "entsub",
            "construct",
            "--kernel",
            "--a",
            "2",
            "--d",
            "2,2",
            "--n",
            "3,3",
        ])
        .unwrap();
        match cli.command {
            Command::Construct(a) => {
                assert!(a.kernel);
                assert_eq!(a.d, vec![2, 2]);
            }
            _ => panic!(),
        }
        assert!(Cli::try_parse_from(["entsub", "construct", "--n", "3,3"]).is_err());
        assert!(Cli::try_parse_from([
            "entsub",
            "construct",
            "--uc",
            "--n",
            "3,3",
            "--coeffs",
            "ones"
        ])
        .is_ok());
    }

    #[test]
    fn subspace_doc_round_trip() {
        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &ResourceCap::default()).unwrap();
        let text = serde_json::to_string(&SubspaceDoc::from_subspace(&u)).unwrap();
        let back: SubspaceDoc = serde_json::from_str(&text).unwrap();
        let v = back.into_subspace().unwrap();
        assert_eq!(v.tag(), u.tag());
        assert_eq!(v.basis(), u.basis());
    }
}
