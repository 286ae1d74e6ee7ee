//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::{Command, Stdio};
use std::time::Instant;

use fracmap::*;

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

fn from_rows(rows: &[ReportRow]) -> Outcome {
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} n={:?} d={:.3e} tol={:.3e}",
                r.probe, r.n, r.discrepancy, r.tolerance
            )
        })
        .collect();
    if rows.is_empty() {
        return outcome(false, "no rows");
    }
    if failed.is_empty() {
        outcome(true, format!("{} rows", rows.len()))
    } else {
        outcome(false, failed.join("; "))
    }
}

fn special_functions() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let x = 0.1 + 9.9 * (k as f64 + 0.5) / 100.0;
        let g = gamma(x).unwrap();
        worst = worst.max(((gamma(x + 1.0).unwrap() - x * g) / (x * g)).abs());
        let refl = PI / (PI * x).sin();
        worst = worst.max(((g * gamma(1.0 - x).unwrap() - refl) / refl).abs());
    }
    let b = (beta(2.0, 3.0).unwrap() - 1.0 / 12.0).abs();
    outcome(
        worst <= 1e-10 && b <= 1e-12,
        format!("identity error {worst:.2e}, |B(2,3) - 1/12| = {b:.2e}"),
    )
}

fn monomials() -> Outcome {
    let mut rows = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        rows.extend(power_law_oracle_suite(alpha, &[0.5, 1.0, 1.5], 2048).unwrap());
    }
    let worst = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    let mut o = from_rows(&rows);
    o.detail = format!("{}; worst relative error {worst:.2e}", o.detail);
    o
}

fn identity_rows() -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let families = ["monomial:1", "trig:7:8:1", "bump:0.8"];
    for alpha in [0.25, 0.5, 0.75] {
        let params = FracParams::with_alpha(alpha).unwrap();
        for fam in families {
            let fam: TestFunctionFamily = fam.parse().unwrap();
            rows.extend(identity_suite(&params, &fam, &[256, 512, 1024]).unwrap());
        }
    }
    rows
}

fn extension_identities(rows: &[ReportRow]) -> Outcome {
    let picked: Vec<ReportRow> = rows
        .iter()
        .filter(|r| r.probe.starts_with("identity_killing_rl") || r.probe.starts_with("identity_sticky_caputo"))
        .cloned()
        .collect();
    from_rows(&picked)
}

fn algebraic_relations(rows: &[ReportRow]) -> Outcome {
    let picked: Vec<ReportRow> = rows
        .iter()
        .filter(|r| {
            r.probe.starts_with("identity_caputo_rl_relation") || r.probe.starts_with("identity_censored_two_forms")
        })
        .cloned()
        .collect();
    from_rows(&picked)
}

fn cos_error(l: f64) -> f64 {
    let t = 1.0;
    let h = 1.0 / 256.0;
    let n = ((l + t) / h).round() as usize;
    let f = sample(f64::cos, UniformGrid::new(-l, t, n).unwrap()).unwrap();
    let d = marchaud_plus(&f, 0.5, TailPolicy::TruncateAt(l)).unwrap();
    d.grid()
        .nodes()
        .zip(d.values())
        .map(|(x, v)| (v - (x + PI / 4.0).cos()).abs())
        .fold(0.0, f64::max)
}

fn fourier_symbol() -> Outcome {
    let ls = [50.0, 200.0, 800.0];
    let errs: Vec<f64> = ls.iter().map(|&l| cos_error(l)).collect();
    let improving = errs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        errs[1] <= 1e-2 && improving,
        format!(
            "max error at L = 50, 200, 800: {:.2e}, {:.2e}, {:.2e}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn gagliardo() -> Outcome {
    let f = sample(|x| x, UniformGrid::new(0.0, 1.0, 512).unwrap()).unwrap();
    let a = gagliardo_seminorm(&f, 2.0, 0.5).unwrap();
    let b = gagliardo_seminorm(&f, 1.0, 0.5).unwrap();
    let ea = (a - 1.0).abs();
    let eb = (b - 8.0 / 3.0).abs() / (8.0 / 3.0);
    outcome(ea <= 1e-2 && eb <= 1e-2, format!("p=2: {a:.6}, p=1: {b:.6}"))
}

fn mellin_rows() -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        rows.extend(mellin_probe(alpha, &MELLIN_PROBE_XS).unwrap());
    }
    rows
}

fn holder_loss() -> Outcome {
    let mut rows = Vec::new();
    let mut measured = Vec::new();
    for (alpha, beta) in [(0.2, 0.7), (0.4, 0.9), (0.25, 0.5)] {
        let bump = TestFunctionFamily::new(FamilyKind::PowerBump(beta), 1.0).unwrap();
        let r = holder_loss_probe(alpha, beta, &bump, 32768).unwrap();
        measured.push(format!("({alpha},{beta}) -> {:.3}", r[0].ratio.unwrap_or(f64::NAN)));
        rows.extend(r);
    }
    let mut o = from_rows(&rows);
    o.detail = format!("{}; {}", o.detail, measured.join(", "));
    o
}

fn mapping_stability() -> Outcome {
    let families: Vec<_> = (1..=20).map(|s| TestFunctionFamily::trig(s, 8, 1).unwrap()).collect();
    let mut rows = Vec::new();
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        let params = FracParams::new(0.25, 0.6, p, 1.0).unwrap();
        for w in [WeightFunction::Unit, WeightFunction::inverse_power(0.2).unwrap()] {
            rows.extend(sobolev_mapping_probe(&params, w, &families, &[1024, 2048]).unwrap());
        }
    }
    let worst = rows
        .iter()
        .filter(|r| r.probe.contains("_stability"))
        .map(|r| r.discrepancy)
        .fold(0.0, f64::max);
    let spread = rows
        .iter()
        .filter(|r| r.probe.ends_with("_spread"))
        .map(|r| r.discrepancy)
        .fold(0.0, f64::max);
    let mut o = from_rows(&rows);
    o.detail = format!(
        "{}; largest change {worst:.3}, largest max/median {spread:.2}",
        o.detail
    );
    o
}

fn weight_class() -> Outcome {
    from_rows(&weight_probe(0.5, &[0.3], 1000.0).unwrap())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["first.csv", "second.csv"] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_fracmap"))
            .args(["verify", "--alpha", "0.5", "--grid", "0,1,1024", "--out"])
            .arg(&path)
            .stderr(Stdio::null())
            .status()
            .unwrap();
        outputs.push((status.code(), std::fs::read(&path).unwrap_or_default()));
    }
    let same = !outputs[0].1.is_empty() && outputs[0].1 == outputs[1].1;
    outcome(
        same,
        format!(
            "exit codes {:?}, {:?}, {} bytes",
            outputs[0].0,
            outputs[1].0,
            outputs[0].1.len()
        ),
    )
}

fn main() {
    let started = Instant::now();
    let identities = identity_rows();
    let mellin = mellin_rows();
    let pick =
        |prefix: &str| -> Vec<ReportRow> { mellin.iter().filter(|r| r.probe.starts_with(prefix)).cloned().collect() };
    let mut mellin_roundtrip = pick("mellin_inverse_gamma");
    mellin_roundtrip.extend(pick("mellin_roundtrip"));
    mellin_roundtrip.extend(pick("mellin_censoring_residual"));

    let results: Vec<(&str, Outcome)> = vec![
        ("special functions", special_functions()),
        ("monomial oracles", monomials()),
        ("extension identities", extension_identities(&identities)),
        ("algebraic relations", algebraic_relations(&identities)),
        ("Fourier symbol", fourier_symbol()),
        ("Gagliardo oracles", gagliardo()),
        ("Mellin kernel", from_rows(&pick("mellin_kernel"))),
        ("Mellin roundtrip", from_rows(&mellin_roundtrip)),
        ("Hölder loss", holder_loss()),
        ("mapping stability", mapping_stability()),
        ("weight class", weight_class()),
        ("determinism", determinism()),
    ];
    let mut failures = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failures += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failures,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
