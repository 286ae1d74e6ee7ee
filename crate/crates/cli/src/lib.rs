//! Batch front end: `compute`, `verify`, `sweep`, `mellin` and `weights`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fracmap::{
    apply, holder_loss_probe, identity_suite, interpolation_consistency_probe, mellin_probe, power_law_oracle_suite,
    sample, sobolev_mapping_probe, weight_probe, Exponent, FamilyKind, FracParams, OperatorKind, OutsideBehavior,
    ReportRow, SampledFunction, TailPolicy, TestFunctionFamily, UniformGrid, VerificationReport, WeightFunction,
    MELLIN_PROBE_XS,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fracmap",
    version,
    about = "Fractional operators on the half line: compute and verify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply one operator to a tabulated function or a test family.
    Compute(CommonArgs),
    /// Operator identities and monomial oracles.
    Verify(CommonArgs),
    /// Mapping-ratio and interpolation probes over p and the weight.
    Sweep(CommonArgs),
    /// Mellin kernel check and left-extension roundtrip.
    Mellin(CommonArgs),
    /// Weight-class margins.
    Weights(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    /// Integrability exponent, a number >= 1 or `inf`.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// `a,b,n`.
    #[arg(long)]
    pub grid: Option<String>,
    /// `analytic` or `truncate:L`.
    #[arg(long)]
    pub tail: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` lines; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Operator for `compute`.
    #[arg(long)]
    pub op: Option<String>,
    /// Tabulated input for `compute`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `trig:SEED:DEGREE[:BAND]`, `bump:BETA` or `monomial:MU`.
    #[arg(long)]
    pub family: Option<String>,
    /// Outside behavior attached to the input: zero, hold, mirror, unspecified.
    #[arg(long)]
    pub outside: Option<String>,
    /// Number of seeded trig families in `sweep`.
    #[arg(long)]
    pub count: Option<String>,
    /// Truncation radius for `weights`.
    #[arg(long)]
    pub radius: Option<String>,
    /// Whitespace table of the report.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

const KEYS: [&str; 17] = [
    "alpha", "s", "p", "beta", "gamma", "grid", "tail", "seed", "out", "op", "input", "family", "outside", "count",
    "radius", "table", "config",
];

/// Error shown to the user with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{key}: {msg}"))
}

/// Parses `key = value` lines with `#` comments.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected 'key = value'", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) || k == "config" {
            return Err(ConfigError(format!("unknown config key '{k}'")));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Flag values layered over the config file.
#[derive(Debug, Default)]
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn from_args(args: &CommonArgs) -> Result<Self, ConfigError> {
        let mut map = match &args.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.to_string_lossy().into_owned());
        let flags = [
            ("alpha", args.alpha.clone()),
            ("s", args.s.clone()),
            ("p", args.p.clone()),
            ("beta", args.beta.clone()),
            ("gamma", args.gamma.clone()),
            ("grid", args.grid.clone()),
            ("tail", args.tail.clone()),
            ("seed", args.seed.clone()),
            ("out", path_str(&args.out)),
            ("op", args.op.clone()),
            ("input", path_str(&args.input)),
            ("family", args.family.clone()),
            ("outside", args.outside.clone()),
            ("count", args.count.clone()),
            ("radius", args.radius.clone()),
            ("table", path_str(&args.table)),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
        Ok(Settings(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            Some(v) => v
                .parse()
                .map_err(|e| config_err(key, format!("cannot parse '{v}': {e}"))),
            None => Ok(default),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: FracParams,
    pub gamma: Option<f64>,
    pub grid: UniformGrid,
    pub tail: TailPolicy,
    pub seed: u64,
    pub family: TestFunctionFamily,
    pub op: OperatorKind,
    pub outside: Option<OutsideBehavior>,
    pub count: usize,
    pub radius: f64,
    pub p_given: bool,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

fn check_unit_interval(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(config_err(key, format!("{v} must lie in (0, 1)")))
    }
}

impl RunConfig {
    fn from_settings(cmd: &str, st: &Settings) -> Result<Self, ConfigError> {
        let alpha = check_unit_interval("alpha", st.parsed("alpha", 0.5)?)?;
        let default_s = if cmd == "sweep" { 0.6 } else { 1.0 };
        let s: f64 = st.parsed("s", default_s)?;
        let p: Exponent = st.parsed("p", Exponent::Finite(2.0))?;
        let beta: f64 = st.parsed("beta", 1.0)?;
        let params = FracParams::new(alpha, s, p, beta).map_err(|e| config_err("params", e))?;
        let gamma = match st.raw("gamma") {
            Some(_) => Some(check_unit_interval("gamma", st.parsed("gamma", 0.0)?)?),
            None => None,
        };
        let grid = match st.raw("grid") {
            Some(g) => {
                let parts: Vec<&str> = g.split(',').map(str::trim).collect();
                let bad = || config_err("grid", format!("expected 'a,b,n', got '{g}'"));
                if parts.len() != 3 {
                    return Err(bad());
                }
                let a: f64 = parts[0].parse().map_err(|_| bad())?;
                let b: f64 = parts[1].parse().map_err(|_| bad())?;
                let n: usize = parts[2].parse().map_err(|_| bad())?;
                UniformGrid::new(a, b, n).map_err(|e| config_err("grid", e))?
            }
            None => UniformGrid::new(0.0, 1.0, 1024).expect("default grid is valid"),
        };
        let tail: TailPolicy = st.parsed("tail", TailPolicy::AnalyticConstantTail)?;
        let seed: u64 = st.parsed("seed", 7)?;
        let family = match st.raw("family") {
            Some(f) => f.parse::<TestFunctionFamily>().map_err(|e| config_err("family", e))?,
            None => TestFunctionFamily::trig(seed, 8, 1).expect("default family is valid"),
        };
        let family = if grid.a() == 0.0 {
            TestFunctionFamily::new(family.kind, grid.b()).map_err(|e| config_err("family", e))?
        } else {
            family
        };
        let op: OperatorKind = st.parsed("op", OperatorKind::RLDerivative)?;
        let outside = match st.raw("outside") {
            Some(_) => Some(st.parsed("outside", OutsideBehavior::Unspecified)?),
            None => None,
        };
        let count: usize = st.parsed("count", 20)?;
        if count == 0 {
            return Err(config_err("count", "must be positive"));
        }
        let radius: f64 = st.parsed("radius", 1000.0)?;
        Ok(RunConfig {
            params,
            gamma,
            grid,
            tail,
            seed,
            family,
            op,
            outside,
            count,
            radius,
            p_given: st.raw("p").is_some(),
            input: st.path("input"),
            out: st.path("out"),
            table: st.path("table"),
        })
    }

    fn half_line(&self) -> Result<(), ConfigError> {
        if self.grid.a() != 0.0 {
            return Err(config_err("grid", "this subcommand needs a grid starting at 0"));
        }
        Ok(())
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn rows_or_fail(probe: &str, res: fracmap::Result<Vec<ReportRow>>) -> Vec<ReportRow> {
    match res {
        Ok(rows) => rows,
        Err(e) => vec![ReportRow::check(format!("{probe}: {e}"), f64::INFINITY, 0.0)],
    }
}

fn verify_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>, ConfigError> {
    cfg.half_line()?;
    let n = cfg.grid.intervals();
    if !n.is_multiple_of(4) || n < 16 {
        return Err(config_err(
            "grid",
            format!("verify needs n divisible by 4 and at least 16, got {n}"),
        ));
    }
    let alpha = cfg.params.alpha;
    let mut rows = rows_or_fail(
        "identity_suite",
        identity_suite(&cfg.params, &cfg.family, &[n / 4, n / 2, n]),
    );
    rows.extend(rows_or_fail(
        "power_law",
        power_law_oracle_suite(alpha, &[0.5, 1.0, 1.5], n),
    ));
    Ok(rows)
}

fn sweep_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>, ConfigError> {
    cfg.half_line()?;
    let n = cfg.grid.intervals();
    if !n.is_multiple_of(2) || n < 16 {
        return Err(config_err(
            "grid",
            format!("sweep needs an even n of at least 16, got {n}"),
        ));
    }
    let FracParams { alpha, s, beta, .. } = cfg.params;
    if s >= 1.0 {
        return Err(config_err("s", format!("{s} must lie in (alpha, 1)")));
    }
    cfg.params.require_mapping().map_err(|e| config_err("s", e))?;
    let t = cfg.grid.b();
    let families = (0..cfg.count as u64)
        .map(|k| {
            TestFunctionFamily::new(
                FamilyKind::TrigPolynomial {
                    seed: cfg.seed + k,
                    degree: 8,
                    band: 1,
                },
                t,
            )
        })
        .collect::<fracmap::Result<Vec<_>>>()
        .map_err(|e| config_err("family", e))?;
    let ps = if cfg.p_given {
        vec![cfg.params.p]
    } else {
        vec![Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity]
    };
    let weights = [
        WeightFunction::Unit,
        WeightFunction::InversePower(cfg.gamma.unwrap_or(0.2)),
    ];
    let mut rows = Vec::new();
    for &p in &ps {
        let params = FracParams::new(alpha, s, p, beta).map_err(|e| config_err("p", e))?;
        for w in weights {
            rows.extend(rows_or_fail(
                "mapping",
                sobolev_mapping_probe(&params, w, &families, &[n / 2, n]),
            ));
        }
    }
    if !cfg.p_given {
        let p_list = [
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
            Exponent::Finite(4.0),
            Exponent::Infinity,
        ];
        rows.extend(rows_or_fail(
            "interpolation",
            interpolation_consistency_probe(alpha, s, &families, &p_list, n),
        ));
    }
    if beta > alpha && beta < 1.0 {
        let bump = TestFunctionFamily::new(FamilyKind::PowerBump(beta), t).map_err(|e| config_err("beta", e))?;
        rows.extend(rows_or_fail("holder", holder_loss_probe(alpha, beta, &bump, n)));
    }
    Ok(rows)
}

fn compute(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    let f = match &cfg.input {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| config_err("input", format!("{}: {e}", path.display())))?;
            SampledFunction::read_table(BufReader::new(file)).map_err(|e| config_err("input", e))?
        }
        None => {
            cfg.half_line()?;
            let fam = cfg.family.clone();
            sample(|x| fam.eval(x), cfg.grid)
                .map_err(|e| config_err("family", e))?
                .with_outside(fam.natural_outside())
        }
    };
    let f = match cfg.outside {
        Some(o) => f.with_outside(o),
        None => f,
    };
    let result = match apply(cfg.op, &f, &cfg.params, cfg.tail) {
        Ok(r) => r,
        Err(e) => {
            writeln!(stderr, "{}: {e}", cfg.op.as_str()).ok();
            return Ok(EXIT_FAIL);
        }
    };
    let mut buf = Vec::new();
    result.write_table(&mut buf).map_err(|e| config_err("out", e))?;
    match &cfg.out {
        Some(path) => write_atomic(path, &buf).map_err(|e| config_err("out", format!("{}: {e}", path.display())))?,
        None => stdout.write_all(&buf).map_err(|e| config_err("out", e))?,
    }
    Ok(EXIT_PASS)
}

fn emit_report(
    cfg: &RunConfig,
    mut report: VerificationReport,
    started: Instant,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, ConfigError> {
    report.sort();
    let csv = report.to_csv_string().map_err(|e| config_err("out", e))?;
    let summary = report.summary(started.elapsed().as_secs_f64());
    match &cfg.out {
        Some(path) => {
            write_atomic(path, csv.as_bytes()).map_err(|e| config_err("out", format!("{}: {e}", path.display())))?;
            let json = path.with_extension("json");
            write_atomic(&json, summary.to_json().as_bytes())
                .map_err(|e| config_err("out", format!("{}: {e}", json.display())))?;
        }
        None => stdout.write_all(csv.as_bytes()).map_err(|e| config_err("out", e))?,
    }
    if let Some(path) = &cfg.table {
        let mut buf = Vec::new();
        report.write_table(&mut buf).map_err(|e| config_err("table", e))?;
        write_atomic(path, &buf).map_err(|e| config_err("table", format!("{}: {e}", path.display())))?;
    }
    for r in report.failed() {
        writeln!(
            stderr,
            "FAIL {} (n = {:?}): {} > {}",
            r.probe, r.n, r.discrepancy, r.tolerance
        )
        .ok();
    }
    writeln!(
        stderr,
        "{} rows, {} passed, {} failed",
        summary.total, summary.passed, summary.failed
    )
    .ok();
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    let (name, args) = match command {
        Command::Compute(a) => ("compute", a),
        Command::Verify(a) => ("verify", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Mellin(a) => ("mellin", a),
        Command::Weights(a) => ("weights", a),
    };
    let settings = Settings::from_args(args)?;
    let cfg = RunConfig::from_settings(name, &settings)?;
    let started = Instant::now();
    let rows = match command {
        Command::Compute(_) => return compute(&cfg, stdout, stderr),
        Command::Verify(_) => verify_rows(&cfg)?,
        Command::Sweep(_) => sweep_rows(&cfg)?,
        Command::Mellin(_) => rows_or_fail("mellin", mellin_probe(cfg.params.alpha, &MELLIN_PROBE_XS)),
        Command::Weights(_) => {
            let gammas = match cfg.gamma {
                Some(g) => vec![g],
                None => vec![0.3, 0.7],
            };
            if cfg.radius.is_nan() || cfg.radius < 10.0 {
                return Err(config_err("radius", format!("{} must be at least 10", cfg.radius)));
            }
            rows_or_fail("weights", weight_probe(cfg.params.alpha, &gammas, cfg.radius))
        }
    };
    let mut report = VerificationReport::new();
    report.extend(rows);
    emit_report(&cfg, report, started, stdout, stderr)
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                stderr.write_all(text.as_bytes()).ok();
            } else {
                stdout.write_all(text.as_bytes()).ok();
            }
            return code;
        }
    };
    match dispatch(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            writeln!(stderr, "error: {e}").ok();
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let m = parse_config_file("# comment\nalpha = 0.3 # trailing\n\ngrid=0,1,64\n").unwrap();
        assert_eq!(m["alpha"], "0.3");
        assert_eq!(m["grid"], "0,1,64");
        let e = parse_config_file("alhpa = 0.3").unwrap_err();
        assert!(e.0.contains("alhpa"));
        assert!(parse_config_file("alpha 0.3").is_err());
    }

    #[test]
    fn settings_defaults() {
        let st = Settings::default();
        let cfg = RunConfig::from_settings("verify", &st).unwrap();
        assert_eq!(cfg.params.alpha, 0.5);
        assert_eq!(cfg.grid.intervals(), 1024);
        assert_eq!(cfg.family.to_string(), "trig:7:8:1");
        let mut st = Settings::default();
        st.0.insert("alpha".into(), "1.5".into());
        let e = RunConfig::from_settings("verify", &st).unwrap_err();
        assert!(e.0.starts_with("alpha") && e.0.contains("(0, 1)"));
    }
}
