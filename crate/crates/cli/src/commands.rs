use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use thiserror::Error;

use slidematch::eval::{evaluate, EvalError};
use slidematch::instances::{
    gen_adversarial_suite, gen_hard_instance, gen_random, HardInstanceSpec, InstanceError,
    RandomStreamSpec, WeightDist,
};
use slidematch::lookahead::{all_splits, refined_lookahead_audit, AuditError, AuditParams};
use slidematch::oracle::OracleError;
use slidematch::ps::{self, PsError, TRACE_HEADER};
use slidematch::report::{eval_csv, run_csv, NumberFormat};
use slidematch::streamfile::StreamFileError;
use slidematch::window::WindowError;
use slidematch::{
    concat, exact_mwm, Exec, OracleLimits, StreamFile, Weight, WindowEngine, WindowParams,
};

use crate::{AuditArgs, EvalArgs, GenArgs, OracleArgs, RunConfig, SourceArgs, VerifyHardArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag} must be a rational p/q or an integer, got `{value}`")]
    Rational { flag: &'static str, value: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Stream(#[from] StreamFileError),
    #[error(transparent)]
    Ps(#[from] PsError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Violation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Window(e) => CliError::Window(e),
            EvalError::Oracle(e) => CliError::Oracle(e),
        }
    }
}

impl CliError {
    pub const VIOLATION: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const ORACLE_LIMIT: u8 = 4;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) | CliError::Instance(InstanceError::Constraint { .. }) => {
                Self::VIOLATION
            }
            CliError::Instance(InstanceError::MissingSlice(_)) => Self::VIOLATION,
            CliError::Oracle(OracleError::LimitExceeded { .. })
            | CliError::Audit(AuditError::Oracle(OracleError::LimitExceeded { .. })) => {
                Self::ORACLE_LIMIT
            }
            CliError::Stream(StreamFileError::Io(_)) | CliError::Io(_) => 1,
            _ => Self::PARSE,
        }
    }
}

/// Parses `p/q` or an integer; decimals are rejected.
fn rational(flag: &'static str, value: &str) -> Result<Weight, CliError> {
    let bad = || CliError::Rational {
        flag,
        value: value.to_string(),
    };
    if value.contains('.') {
        return Err(bad());
    }
    value.trim().parse::<Weight>().map_err(|_| bad())
}

fn number_format(decimal: Option<usize>) -> NumberFormat {
    decimal.map_or(NumberFormat::Exact, NumberFormat::Decimal)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn random_spec(src: &SourceArgs) -> Result<RandomStreamSpec, CliError> {
    if src.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&src.dup_rate) {
        return Err(CliError::Usage("--dup-rate must lie in [0, 1]".into()));
    }
    let weights = match src.power_law {
        Some(buckets) => WeightDist::PowerLaw { buckets },
        None => WeightDist::Uniform {
            lo: src.wmin,
            hi: src.wmax,
            denom: src.denom,
        },
    };
    Ok(RandomStreamSpec {
        n: src.n,
        m: src.m,
        weights,
        seed: src.seed,
        duplicate_rate: src.dup_rate,
    })
}

fn load(src: &SourceArgs, epsilon: &Weight) -> Result<StreamFile, CliError> {
    if let Some(path) = &src.input {
        Ok(StreamFile::read(path)?)
    } else if src.hard {
        Ok(gen_hard_instance(epsilon)?.to_stream_file())
    } else if src.random {
        Ok(StreamFile::new(src.n, gen_random(&random_spec(src)?)))
    } else {
        Err(CliError::Usage("give --input, --hard or --random".into()))
    }
}

fn window_params(cfg: &RunConfig, n: usize) -> Result<WindowParams, CliError> {
    let eps = rational("--epsilon", &cfg.epsilon)?;
    let mut params = WindowParams::new(cfg.window, eps, n)?.with_strict_paper(cfg.strict_paper);
    if let Some(beta) = &cfg.beta {
        params = params.with_beta(rational("--beta", beta)?)?;
    }
    Ok(params)
}

fn limits(o: &OracleArgs) -> OracleLimits {
    OracleLimits {
        max_edges: o.oracle_max_edges,
        max_vertices: o.oracle_max_vertices,
    }
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let eps = rational("--epsilon", &args.epsilon)?;
    ps::PsParams::new(eps.clone(), 2)?;
    if let Some(suite) = &args.suite {
        if suite != "adversarial" {
            return Err(CliError::Usage(format!("unknown suite `{suite}`")));
        }
        let dir = args
            .out_dir
            .as_ref()
            .ok_or_else(|| CliError::Usage("--suite needs --out-dir".into()))?;
        fs::create_dir_all(dir)?;
        for named in gen_adversarial_suite(&eps) {
            let file = StreamFile::new(named.n, named.stream);
            let header = format!("{} (epsilon {eps})", named.name);
            fs::write(
                dir.join(format!("{}.stream", named.name)),
                file.render(&[&header]),
            )?;
        }
        return Ok(());
    }
    let (file, comment) = if args.source.hard {
        (
            gen_hard_instance(&eps)?.to_stream_file(),
            format!("hard instance, epsilon {eps}"),
        )
    } else if args.source.random {
        let s = &args.source;
        let comment = format!("random n={} m={} seed={}", s.n, s.m, s.seed);
        (StreamFile::new(s.n, gen_random(&random_spec(s)?)), comment)
    } else {
        return Err(CliError::Usage("give --hard, --random or --suite".into()));
    };
    emit(args.output.as_deref(), &file.render(&[&comment]))
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let eps = rational("--epsilon", &cfg.epsilon)?;
    let file = load(&cfg.source, &eps)?;
    let params = window_params(cfg, file.n)?;
    let mut engine = WindowEngine::new(params.clone());
    let reports = file
        .stream
        .events
        .iter()
        .map(|e| engine.on_edge(e))
        .collect::<Result<Vec<_>, _>>()?;
    emit(
        cfg.output.as_deref(),
        &run_csv(&reports, number_format(cfg.decimal)),
    )?;
    if let Some(path) = &cfg.trace {
        write_trace(path, &params, &file)?;
    }
    Ok(())
}

fn write_trace(path: &Path, params: &WindowParams, file: &StreamFile) -> Result<(), CliError> {
    let (_, trace) = ps::run_traced(params.ps(), &file.stream)?;
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for rec in trace {
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let cfg = &args.run;
    let eps = rational("--epsilon", &cfg.epsilon)?;
    let file = load(&cfg.source, &eps)?;
    let params = window_params(cfg, file.n)?;
    let fmt = number_format(cfg.decimal);
    let ev = evaluate(
        &file.stream,
        &params,
        &limits(&args.oracle),
        Exec::default(),
    )?;
    emit(cfg.output.as_deref(), &eval_csv(&ev.rows, fmt))?;
    if let Some(path) = &cfg.trace {
        write_trace(path, &params, &file)?;
    }

    let s = &ev.summary;
    let max_ratio = s
        .max_ratio
        .as_ref()
        .map_or("none".to_string(), |r| fmt.render(r));
    eprintln!(
        "windows {} audited {} max_ratio {} bound {} max_buckets {}",
        s.windows,
        s.audited_windows,
        max_ratio,
        fmt.render(&params.alpha2()),
        s.max_bucket_count
    );
    eprintln!(
        "violations: ratio {} bucket_bound {} invariants {} infeasible {}",
        s.ratio_violations, s.bound_violations, s.invariant_violations, s.infeasible_reports
    );
    if s.violations() > 0 {
        return Err(CliError::Violation(format!(
            "{} violations",
            s.violations()
        )));
    }
    Ok(())
}

pub fn audit(args: &AuditArgs) -> Result<(), CliError> {
    let eps = rational("--epsilon", &args.epsilon)?;
    let file = load(&args.source, &eps)?;
    let mut wp = WindowParams::new(1, eps, file.n)?;
    if let Some(beta) = &args.beta {
        wp = wp.with_beta(rational("--beta", beta)?)?;
    }
    let params = if args.standard {
        AuditParams::standard(&wp, rational("--alpha", &args.alpha)?)
    } else {
        AuditParams::refined(&wp)
    };
    let splits = all_splits(file.stream.len());
    let report = refined_lookahead_audit(
        &file.stream,
        &splits,
        &params,
        &limits(&args.oracle),
        Exec::default(),
    )?;

    println!("optimum {} w_prime {}", report.optimum, report.w_prime);
    if let Some(ok) = report.first_output_bound {
        println!(
            "first output bound (alpha1 {}): {}",
            params.alpha1,
            if ok { "ok" } else { "violated" }
        );
    }
    println!(
        "splits {} conditioned {} violations {} (alpha2 {})",
        report.splits.len(),
        report.conditioned().count(),
        report.violations(),
        params.alpha2
    );
    if let Some(r) = report.max_conditioned_ratio() {
        println!("max conditioned ratio {r} ({})", r.to_decimal(6));
    }
    for s in report.conditioned().filter(|s| !s.guarantee_holds) {
        let ratio = s
            .ratio
            .as_ref()
            .map_or("inf".to_string(), |r| r.to_string());
        println!(
            "violation: a={} b={} second(BC)={} ratio={ratio}",
            s.a, s.b, s.second_bc
        );
    }
    if report.violations() > 0 {
        return Err(CliError::Violation(format!(
            "{} audit violations",
            report.violations()
        )));
    }
    Ok(())
}

pub fn verify_hard(args: &VerifyHardArgs) -> Result<(), CliError> {
    let eps = rational("--epsilon", &args.epsilon)?;
    let spec = match &args.input {
        Some(path) => HardInstanceSpec::from_labelled(&eps, &StreamFile::read(path)?)?,
        None => gen_hard_instance(&eps)?,
    };
    let checks = spec.verify()?;
    for c in &checks {
        println!("{c}");
    }

    let params = ps::PsParams::new(eps.clone(), spec.n)?;
    let bc = concat(&[spec.b.clone(), spec.c.clone()]);
    let greedy = ps::run(&params, &bc)?.extract_matching().total;
    let optimum = exact_mwm(&spec.abc().events, &OracleLimits::default())?.total;
    let fmt = number_format(args.decimal);
    let expected = spec.expected.ratio();
    if greedy > Weight::integer(0) {
        let ratio = optimum / greedy;
        println!(
            "ratio MWM(ABC)/M(BC): measured {} expected {}",
            fmt.render(&ratio),
            fmt.render(&expected)
        );
    } else {
        println!("ratio MWM(ABC)/M(BC): undefined, M(BC) is empty");
    }

    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("({}) {}", c.id, c.name))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Violation(format!(
            "constraints failed: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}
