//! Numerical probes: operator identities, monomial oracles, regularity loss,
//! mapping stability, interpolation consistency and the weight class.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_alpha, Error, Result};
use crate::fracops::{caputo, censored, even_ext_derivative, marchaud_plus, rl_derivative, rl_integral, TailPolicy};
use crate::grid::{restrict, sample, Exponent, FracParams, OutsideBehavior, SampledFunction, UniformGrid};
use crate::mellin::{
    censor_kernel, censoring_residual, inverse_mellin, kernel_mellin_closed_form, mellin_transform,
    reconstruct_left_extension_adaptive, synthesize_u_from_v, MellinLine, MellinSamples,
};
use crate::norms::{sobolev_norm_with_order, weight_class_margin, WeightFunction};
use crate::report::ReportRow;
use crate::specialfn::{gamma, gamma_complex};

/// Discrepancies below this multiple of the scale are rounding noise.
const ROUNDING_FLOOR: f64 = 1e-12;

/// The shapes a test function can take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// `Σ_{k=1}^{degree} c_k sin(band k π x / T) / k²`, `c_k ~ U(-1, 1)` from `seed`.
    TrigPolynomial { seed: u64, degree: usize, band: u32 },
    /// `x^β χ(x)`, `χ` smooth, `1` on `[0, T/2]` and `0` on `[0.9 T, T]`.
    PowerBump(f64),
    /// `x^μ`.
    MonomialOnInterval(f64),
}

/// A deterministic test function on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionFamily {
    pub kind: FamilyKind,
    pub t: f64,
    coefficients: Vec<f64>,
}

impl TestFunctionFamily {
    pub fn new(kind: FamilyKind, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: t,
                reason: "window length must be positive",
            });
        }
        let coefficients = match kind {
            FamilyKind::TrigPolynomial { seed, degree, band } => {
                if band == 0 {
                    return Err(Error::InvalidParameter {
                        name: "band",
                        value: 0.0,
                        reason: "band must be at least 1",
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
            FamilyKind::PowerBump(b) => {
                if !(b > 0.0 && b <= 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "beta",
                        value: b,
                        reason: "bump exponent must lie in (0, 1]",
                    });
                }
                Vec::new()
            }
            FamilyKind::MonomialOnInterval(mu) => {
                if !(mu >= 0.0 && mu.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "mu",
                        value: mu,
                        reason: "monomial exponent must be nonnegative",
                    });
                }
                Vec::new()
            }
        };
        Ok(Self { kind, t, coefficients })
    }

    pub fn trig(seed: u64, degree: usize, band: u32) -> Result<Self> {
        Self::new(FamilyKind::TrigPolynomial { seed, degree, band }, 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.t;
        match self.kind {
            FamilyKind::TrigPolynomial { band, .. } => {
                let w = band as f64 * std::f64::consts::PI * x / t;
                self.coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let k = (k + 1) as f64;
                        c * (k * w).sin() / (k * k)
                    })
                    .sum()
            }
            FamilyKind::PowerBump(b) => x.powf(b) * cutoff(x / t),
            FamilyKind::MonomialOnInterval(mu) => {
                if mu == 0.0 {
                    1.0
                } else {
                    x.powf(mu)
                }
            }
        }
    }

    /// The outside behavior the family carries naturally: killing, except for
    /// the constant monomial, which is held.
    pub fn natural_outside(&self) -> OutsideBehavior {
        match self.kind {
            FamilyKind::MonomialOnInterval(0.0) => OutsideBehavior::HoldLeftValue,
            _ => OutsideBehavior::Zero,
        }
    }

    /// Samples on `[0, T]` with `n` intervals, tagged with the natural outside.
    pub fn sample(&self, n: usize) -> Result<SampledFunction> {
        let grid = UniformGrid::new(0.0, self.t, n)?;
        Ok(sample(|x| self.eval(x), grid)?.with_outside(self.natural_outside()))
    }

    pub fn is_identically_zero(&self) -> bool {
        matches!(self.kind, FamilyKind::TrigPolynomial { .. }) && self.coefficients.iter().all(|c| *c == 0.0)
    }
}

impl fmt::Display for TestFunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::TrigPolynomial { seed, degree, band } => write!(f, "trig:{seed}:{degree}:{band}"),
            FamilyKind::PowerBump(b) => write!(f, "bump:{b}"),
            FamilyKind::MonomialOnInterval(mu) => write!(f, "monomial:{mu}"),
        }
    }
}

impl FromStr for TestFunctionFamily {
    type Err = Error;

    /// `trig:SEED:DEGREE[:BAND]`, `bump:BETA` or `monomial:MU`, on `[0, 1]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Parse(format!("bad family '{s}'"));
        let kind = match parts.as_slice() {
            ["trig", seed, degree] | ["trig", seed, degree, "1"] => FamilyKind::TrigPolynomial {
                seed: seed.parse().map_err(|_| bad())?,
                degree: degree.parse().map_err(|_| bad())?,
                band: 1,
            },
            ["trig", seed, degree, band] => FamilyKind::TrigPolynomial {
                seed: seed.parse().map_err(|_| bad())?,
                degree: degree.parse().map_err(|_| bad())?,
                band: band.parse().map_err(|_| bad())?,
            },
            ["bump", b] => FamilyKind::PowerBump(b.parse().map_err(|_| bad())?),
            ["monomial", mu] => FamilyKind::MonomialOnInterval(mu.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Self::new(kind, 1.0)
    }
}

/// Smooth step: `1` for `r ≤ 1/2`, `0` for `r ≥ 0.9`.
fn cutoff(r: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let t = (0.9 - r) / 0.4;
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

fn max_abs_diff_on(a: &[f64], b: &[f64], from: usize) -> f64 {
    a.iter()
        .zip(b)
        .skip(from)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_abs(v: &[f64], from: usize) -> f64 {
    v.iter().skip(from).map(|x| x.abs()).fold(0.0, f64::max)
}

/// `‖f‖_∞` plus its discrete Lipschitz constant.
fn seminorm_scale(f: &SampledFunction) -> f64 {
    let v = f.values();
    let h = f.grid().h();
    let lip = v.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    max_abs(v, 0) + lip
}

/// The five operator identities at each resolution, as two kinds of rows:
///
/// * `identity_*_discrete`: left and right sides at the same resolution,
///   which agree up to rounding because they share their quadrature;
/// * `identity_*`: the left side at `n` against the right side at four times
///   the finest resolution, on the coarse nodes of `[h, T]`, with tolerance
///   `5 h^{1-α} · (‖f‖_∞ + Lip f)`. A closing `*_refinement` row requires the
///   sequence to decrease strictly, unless every entry is rounding noise.
pub fn identity_suite(
    params: &FracParams,
    family: &TestFunctionFamily,
    resolutions: &[usize],
) -> Result<Vec<ReportRow>> {
    let alpha = params.alpha;
    check_alpha(alpha)?;
    let mut ns = resolutions.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let n_max = *ns.last().ok_or_else(|| Error::Precondition("no resolutions".into()))?;
    let n_ref = 4 * n_max;
    if let Some(bad) = ns.iter().find(|n| n_ref % **n != 0) {
        return Err(Error::Incommensurate(format!(
            "resolution {bad} does not divide {n_ref}"
        )));
    }
    let g1 = gamma(1.0 - alpha)?;
    let fam = family.to_string();
    let tail = TailPolicy::AnalyticConstantTail;

    struct Sides {
        killing: Vec<f64>,
        rl: Vec<f64>,
        sticky: Vec<f64>,
        caputo: Vec<f64>,
        even: Vec<f64>,
        mirror: Vec<f64>,
    }
    let compute = |f: &SampledFunction| -> Result<Sides> {
        Ok(Sides {
            killing: marchaud_plus(&f.clone().with_outside(OutsideBehavior::Zero), alpha, tail)?
                .values()
                .to_vec(),
            rl: rl_derivative(f, alpha)?.values().to_vec(),
            sticky: marchaud_plus(&f.clone().with_outside(OutsideBehavior::HoldLeftValue), alpha, tail)?
                .values()
                .to_vec(),
            caputo: caputo(f, alpha)?.values().to_vec(),
            even: even_ext_derivative(f, alpha)?.values().to_vec(),
            mirror: marchaud_plus(&f.clone().with_outside(OutsideBehavior::MirrorEven), alpha, tail)?
                .values()
                .to_vec(),
        })
    };

    let reference_f = family.sample(n_ref)?;
    let scale = seminorm_scale(&reference_f);
    let reference = compute(&reference_f)?;
    let mut rows = Vec::new();
    let mut seqs: [Vec<f64>; 3] = Default::default();
    let row = |name: &str, d: f64, tol: f64, n: usize| {
        ReportRow::check(format!("identity_{name}[{fam}]"), d, tol)
            .alpha(alpha)
            .n(n)
    };
    for &n in &ns {
        let f = family.sample(n)?;
        let sides = compute(&f)?;
        let h = f.grid().h();
        let v = f.values();
        let stride = n_ref / n;
        let coarse = |r: &[f64]| -> Vec<f64> { (0..=n).map(|j| r[j * stride]).collect() };

        // Same-resolution relations.
        let mag = |r: &[f64]| max_abs(r, 1).max(1.0);
        let cen = censored(&f, alpha)?;
        let cen_alt: Vec<f64> = sides
            .rl
            .iter()
            .zip(v)
            .zip(f.grid().nodes())
            .map(|((r, fx), x)| r - fx / (g1 * x.powf(alpha)))
            .collect();
        let cap_alt: Vec<f64> = sides
            .rl
            .iter()
            .zip(f.grid().nodes())
            .map(|(r, x)| r - v[0] / (g1 * x.powf(alpha)))
            .collect();
        let discrete = [
            ("killing_rl_discrete", &sides.killing, &sides.rl),
            ("sticky_caputo_discrete", &sides.sticky, &sides.caputo),
            ("even_mirror_discrete", &sides.even, &sides.mirror),
            ("censored_two_forms", &cen.values().to_vec(), &cen_alt),
            ("caputo_rl_relation", &sides.caputo, &cap_alt),
        ];
        for (name, a, b) in discrete {
            let d = max_abs_diff_on(a, b, 1);
            rows.push(row(name, d, ROUNDING_FLOOR * mag(b), n));
        }

        // Against the reference resolution.
        let tol = 5.0 * h.powf(1.0 - alpha) * scale;
        let refined = [
            ("killing_rl", &sides.killing, coarse(&reference.rl)),
            ("sticky_caputo", &sides.sticky, coarse(&reference.caputo)),
            ("even_mirror", &sides.even, coarse(&reference.mirror)),
        ];
        for (k, (name, lhs, rhs)) in refined.into_iter().enumerate() {
            let d = max_abs_diff_on(lhs, &rhs, 1);
            seqs[k].push(d);
            rows.push(row(name, d, tol, n));
        }
    }
    for (k, name) in ["killing_rl", "sticky_caputo", "even_mirror"].iter().enumerate() {
        let seq = &seqs[k];
        let worst = seq.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        let exact = seq.iter().all(|d| *d <= ROUNDING_FLOOR * scale);
        let decreasing = seq.windows(2).all(|w| w[1] < w[0]);
        rows.push(
            row(
                &format!("{name}_refinement"),
                if exact { 0.0 } else { worst },
                1.0,
                n_max,
            )
            .ratio(worst)
            .pass(exact || decreasing),
        );
    }
    Ok(rows)
}

/// Monomial oracles `I^α x^μ = Γ(μ+1)/Γ(μ+α+1) x^{μ+α}` and
/// `D^α x^μ = Γ(μ+1)/Γ(μ+1-α) x^{μ-α}` on `[0, 1]`: the maximal relative
/// error over `x ≥ 0.1` at `n` must be at most `1e-3`, and halving `n` must
/// raise it by at least `1.5×` (unless both are rounding noise).
pub fn power_law_oracle_suite(alpha: f64, mus: &[f64], n: usize) -> Result<Vec<ReportRow>> {
    check_alpha(alpha)?;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "power-law suite needs an even n >= 4, got {n}"
        )));
    }
    let mut rows = Vec::new();
    for &mu in mus {
        let family = TestFunctionFamily::new(FamilyKind::MonomialOnInterval(mu), 1.0)?;
        let ci = gamma(mu + 1.0)? / gamma(mu + alpha + 1.0)?;
        let cd = gamma(mu + 1.0)? / gamma(mu + 1.0 - alpha)?;
        type Op = fn(&SampledFunction, f64) -> Result<SampledFunction>;
        let ops: [(&str, Op, f64, f64); 2] = [
            ("rl_integral", rl_integral, ci, mu + alpha),
            ("rl_derivative", rl_derivative, cd, mu - alpha),
        ];
        for (name, op, c, e) in ops {
            let err_at = |m: usize| -> Result<f64> {
                let f = family.sample(m)?;
                let out = op(&f, alpha)?;
                Ok(out
                    .grid()
                    .nodes()
                    .zip(out.values())
                    .filter(|(x, _)| *x >= 0.1 - 1e-12)
                    .map(|(x, v)| {
                        let exact = c * x.powf(e);
                        ((v - exact) / exact).abs()
                    })
                    .fold(0.0, f64::max))
            };
            let fine = err_at(n)?;
            let coarse = err_at(n / 2)?;
            let gain = coarse / fine;
            let exact = coarse <= ROUNDING_FLOOR && fine <= ROUNDING_FLOOR;
            rows.push(
                ReportRow::check(format!("power_law_{name}[mu={mu}]"), fine, 1e-3)
                    .alpha(alpha)
                    .n(n)
                    .ratio(gain)
                    .pass(fine <= 1e-3 && (exact || gain >= 1.5)),
            );
        }
    }
    Ok(rows)
}

/// Least-squares slope of `log ω(δ)` against `log δ` for the modulus of
/// continuity over separations `h, 2h, 4h, …, T/8`.
pub fn holder_exponent(f: &SampledFunction) -> Result<Option<f64>> {
    let n = f.grid().intervals();
    let h = f.grid().h();
    let v = f.values();
    let mut pts = Vec::new();
    let mut m = 1;
    while m * 8 <= n {
        let omega = (0..=n - m).map(|i| (v[i + m] - v[i]).abs()).fold(0.0, f64::max);
        pts.push(((m as f64 * h).ln(), omega));
        m *= 2;
    }
    if pts.len() < 3 {
        return Err(Error::Regression(format!(
            "only {} dyadic separations at n = {n}",
            pts.len()
        )));
    }
    if pts.iter().all(|p| p.1 == 0.0) {
        return Ok(None);
    }
    if pts.iter().any(|p| p.1 == 0.0 || !p.1.is_finite()) {
        return Err(Error::Regression(
            "modulus of continuity vanishes at some separations only".into(),
        ));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(Some(sxy / sxx))
}

/// Hölder exponent of `𝐃^α_+ f` for the killing extension of `f`, against
/// `β - α`, plus stability of `[𝐃^α_+ f]_{C^{β-α}}` from `n/2` to `n`.
///
/// The regression sees the smooth part of the bump as a linear term in `δ`,
/// so the estimate approaches `β - α` from above as `n` grows.
pub fn holder_loss_probe(alpha: f64, beta: f64, family: &TestFunctionFamily, n: usize) -> Result<Vec<ReportRow>> {
    check_alpha(alpha)?;
    if !(beta > alpha && beta <= 1.0) {
        return Err(Error::Precondition(format!(
            "need alpha < beta <= 1, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let target = beta - alpha;
    let derivative = |m: usize| -> Result<SampledFunction> {
        let f = family.sample(m)?;
        marchaud_plus(&f, alpha, TailPolicy::AnalyticConstantTail)
    };
    if n < 16 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "holder probe needs an even n >= 16, got {n}"
        )));
    }
    let d = derivative(n)?;
    let d_half = derivative(n / 2)?;
    let fam = family.to_string();
    let mut rows = Vec::new();
    let tag = |name: &str| format!("holder_{name}[{fam}]");
    match holder_exponent(&d)? {
        Some(e) => rows.push(
            ReportRow::check(tag("exponent"), (e - target).abs(), 0.1)
                .alpha(alpha)
                .beta(beta)
                .n(n)
                .ratio(e),
        ),
        None => rows.push(
            ReportRow::check(tag("exponent_skipped"), 0.0, 0.1)
                .alpha(alpha)
                .beta(beta)
                .n(n)
                .ratio(0.0),
        ),
    }
    let s1 = crate::norms::holder_seminorm(&d_half, target)?;
    let s2 = crate::norms::holder_seminorm(&d, target)?;
    let (change, ratio) = if s1 == 0.0 && s2 == 0.0 {
        (0.0, 1.0)
    } else {
        ((s2 / s1 - 1.0).abs(), s2 / s1)
    };
    rows.push(
        ReportRow::check(tag("seminorm_stability"), change, 0.2)
            .alpha(alpha)
            .beta(beta)
            .n(n)
            .ratio(ratio)
            .pass(change <= 0.2 && s2.is_finite()),
    );
    Ok(rows)
}

/// Which extension feeds the Marchaud derivative in a mapping probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingRoute {
    Killing,
    Even,
}

impl MappingRoute {
    fn as_str(&self) -> &'static str {
        match self {
            MappingRoute::Killing => "killing",
            MappingRoute::Even => "even",
        }
    }
}

/// Operator output and input for one family at one resolution; the killing
/// output lives on `[h, T]`, the even output on `[0, T]`.
struct MappingSample {
    input: SampledFunction,
    output: SampledFunction,
}

fn mapping_sample(family: &TestFunctionFamily, alpha: f64, n: usize, route: MappingRoute) -> Result<MappingSample> {
    let f = family.sample(n)?;
    let tail = TailPolicy::AnalyticConstantTail;
    let output = match route {
        MappingRoute::Killing => {
            let d = marchaud_plus(&f.clone().with_outside(OutsideBehavior::Zero), alpha, tail)?;
            let g = d.grid();
            restrict(&d, UniformGrid::new(g.node(1), g.b(), n - 1)?)?
        }
        MappingRoute::Even => marchaud_plus(&f.clone().with_outside(OutsideBehavior::MirrorEven), alpha, tail)?,
    };
    Ok(MappingSample { input: f, output })
}

fn mapping_ratio(s: &MappingSample, p: Exponent, order: f64, alpha: f64, w: WeightFunction) -> Result<f64> {
    let num = sobolev_norm_with_order(&s.output, p, order - alpha, w)?.total;
    let den = sobolev_norm_with_order(&s.input, p, order, w)?.total;
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// Ratios `‖𝐃^α_+ f‖_{W^{p,s-α}(w)} / ‖f‖_{W^{p,s}(w)}` along the killing route
/// (and the even route when `p s ≥ 1`). One row per family, route and
/// resolution, a stability row per family and route comparing the two finest
/// resolutions, and a spread row per route bounding the largest ratio by ten
/// times the median.
pub fn sobolev_mapping_probe(
    params: &FracParams,
    w: WeightFunction,
    families: &[TestFunctionFamily],
    resolutions: &[usize],
) -> Result<Vec<ReportRow>> {
    params.require_mapping()?;
    let (alpha, s, p) = (params.alpha, params.s, params.p);
    if s >= 1.0 {
        return Err(Error::Precondition("mapping probes need s < 1".into()));
    }
    let mut ns = resolutions.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::Precondition(
            "mapping probes need at least two resolutions".into(),
        ));
    }
    let mut routes = vec![MappingRoute::Killing];
    if p.value() * s >= 1.0 {
        routes.push(MappingRoute::Even);
    }
    let gamma_tag = match w {
        WeightFunction::Unit => None,
        WeightFunction::InversePower(g) => Some(g),
    };
    let decorate = |r: ReportRow| {
        let r = r.alpha(alpha).s(s).p(p);
        match gamma_tag {
            Some(g) => r.gamma(g),
            None => r,
        }
    };
    let mut rows = Vec::new();
    for route in routes {
        let mut finest = Vec::new();
        for fam in families {
            let mut ratios = Vec::new();
            for &n in &ns {
                let sample = mapping_sample(fam, alpha, n, route)?;
                let r = mapping_ratio(&sample, p, s, alpha, w)?;
                let ok = r.is_finite();
                rows.push(decorate(
                    ReportRow::check(
                        format!("mapping_{}[{fam}]", route.as_str()),
                        if ok { 0.0 } else { f64::INFINITY },
                        0.0,
                    )
                    .n(n)
                    .ratio(r),
                ));
                ratios.push(r);
                if route == MappingRoute::Killing && n == *ns.last().expect("non-empty") {
                    // The killing route and the Riemann-Liouville derivative are the same map.
                    let direct = rl_derivative(&sample.input, alpha)?;
                    let g = direct.grid();
                    let direct = restrict(&direct, UniformGrid::new(g.node(1), g.b(), n - 1)?)?;
                    let alt = MappingSample {
                        input: sample.input.clone(),
                        output: direct,
                    };
                    let r2 = mapping_ratio(&alt, p, s, alpha, w)?;
                    let d = if r == 0.0 && r2 == 0.0 {
                        0.0
                    } else {
                        (r - r2).abs() / r.abs().max(r2.abs())
                    };
                    rows.push(decorate(
                        ReportRow::check(format!("mapping_killing_vs_rl[{fam}]"), d, 1e-10)
                            .n(n)
                            .ratio(r2),
                    ));
                }
            }
            let (a, b) = (ratios[ratios.len() - 2], ratios[ratios.len() - 1]);
            let change = if a == 0.0 && b == 0.0 {
                0.0
            } else {
                (b - a).abs() / a.abs().max(b.abs())
            };
            rows.push(decorate(
                ReportRow::check(format!("mapping_{}_stability[{fam}]", route.as_str()), change, 0.2)
                    .n(*ns.last().expect("non-empty"))
                    .ratio(b),
            ));
            finest.push(b);
        }
        let mut sorted = finest.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if sorted.is_empty() {
            0.0
        } else if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        let worst = sorted.last().copied().unwrap_or(0.0);
        let spread = if median > 0.0 {
            worst / median
        } else if worst == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        rows.push(decorate(
            ReportRow::check(format!("mapping_{}_spread", route.as_str()), spread, 10.0)
                .n(*ns.last().expect("non-empty"))
                .ratio(median),
        ));
    }
    Ok(rows)
}

/// Empirical bounds `M(p) = max_f ‖𝐃^α_+ f‖_{W^{p,s-α}} / ‖f‖_{W^{p,s}}` for
/// each `p`, checked against the interpolation envelope
/// `log M(p) ≤ (1/p) log M(1) + (1 - 1/p) log M(∞) + 0.5`.
pub fn interpolation_consistency_probe(
    alpha: f64,
    s: f64,
    families: &[TestFunctionFamily],
    p_list: &[Exponent],
    n: usize,
) -> Result<Vec<ReportRow>> {
    let slack = 0.5;
    let mut bounds = Vec::new();
    for &p in p_list {
        let params = FracParams::new(alpha, s, p, 1.0)?;
        params.require_mapping()?;
        let mut m: f64 = 0.0;
        for fam in families {
            let sample = mapping_sample(fam, alpha, n, MappingRoute::Killing)?;
            m = m.max(mapping_ratio(&sample, p, s, alpha, WeightFunction::Unit)?);
        }
        bounds.push((p, m));
    }
    let endpoint = |target: Exponent| {
        bounds
            .iter()
            .find(|(p, _)| *p == target)
            .map(|b| b.1)
            .ok_or_else(|| Error::Precondition(format!("interpolation probe needs p = {target}")))
    };
    let m1 = endpoint(Exponent::Finite(1.0))?;
    let minf = endpoint(Exponent::Infinity)?;
    let mut rows = Vec::new();
    for (p, m) in bounds {
        let inv = match p {
            Exponent::Finite(v) => 1.0 / v,
            Exponent::Infinity => 0.0,
        };
        let envelope = if m1 > 0.0 && minf > 0.0 {
            inv * m1.ln() + (1.0 - inv) * minf.ln() + slack
        } else {
            f64::NEG_INFINITY
        };
        let lhs = if m > 0.0 { m.ln() } else { f64::NEG_INFINITY };
        let pass = m == 0.0 || lhs <= envelope;
        let excess = if m == 0.0 { 0.0 } else { lhs - (envelope - slack) };
        rows.push(
            ReportRow::check("interpolation_envelope", excess, slack)
                .alpha(alpha)
                .s(s)
                .p(p)
                .n(n)
                .ratio(m)
                .pass(pass),
        );
    }
    Ok(rows)
}

/// Default probe points for the weight functional.
pub const WEIGHT_PROBE_XS: [f64; 9] = [-100.0, -10.0, -1.0, -0.5, 0.0, 0.5, 1.0, 10.0, 100.0];

/// W(α) membership diagnostics: the unit weight's margin equals `1/α`; for
/// `γ < α` the margin settles under `L` doubling; for `γ ≥ α` the divergence
/// trend is reported as an informational row.
pub fn weight_probe(alpha: f64, gammas: &[f64], l: f64) -> Result<Vec<ReportRow>> {
    check_alpha(alpha)?;
    let mut rows = Vec::new();
    let unit = weight_class_margin(WeightFunction::Unit, alpha, &WEIGHT_PROBE_XS, l)?;
    rows.push(
        ReportRow::check("weight_unit", (unit.value - 1.0 / alpha).abs(), 1e-12 / alpha)
            .alpha(alpha)
            .ratio(unit.value),
    );
    for &g in gammas {
        if !(g > 0.0 && g < 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: g,
                reason: "weight exponents must lie in (0, 1)",
            });
        }
        let w = WeightFunction::inverse_power(g)?;
        let m = weight_class_margin(w, alpha, &WEIGHT_PROBE_XS, l)?;
        if g < alpha {
            let m2 = weight_class_margin(w, alpha, &WEIGHT_PROBE_XS, 2.0 * l)?;
            let drift = (m2.value - m.value).abs() / m.value;
            rows.push(
                ReportRow::check("weight_margin_converges", drift, 1e-3)
                    .alpha(alpha)
                    .gamma(g)
                    .ratio(m.value)
                    .pass(m.converges && m.trend < 1.0 && drift <= 1e-3),
            );
        } else {
            rows.push(
                ReportRow::check("weight_margin_divergence_trend", m.trend, 1.0)
                    .alpha(alpha)
                    .gamma(g)
                    .ratio(m.truncated)
                    .pass(true),
            );
        }
    }
    Ok(rows)
}

/// Points on the positive axis where the Mellin probe checks reconstruction.
pub const MELLIN_PROBE_XS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

fn failed_row(probe: String, err: &Error) -> ReportRow {
    ReportRow::check(format!("{probe}: {err}"), f64::INFINITY, 0.0)
}

/// Mellin-side checks for one order:
///
/// * the transform of `g(r) = r^α (1+r)^{-α-1}` on `Re z = 1/2` against
///   `B(1 - z, α + z)` for `t ∈ {0, ±1, ±5}`;
/// * the inverse transform of `Γ` on `Re z = 1/2` against `e^{-x}`;
/// * `v = e^{-y}` pushed through the censoring convolution and recovered by
///   the adaptive contour, relative error at each of `xs`;
/// * the censoring residual of that pair, relative to `u(x) x^{-α}/α`.
///
/// Numerical breakdowns become failing rows rather than errors.
pub fn mellin_probe(alpha: f64, xs: &[f64]) -> Result<Vec<ReportRow>> {
    check_alpha(alpha)?;
    let mut rows = Vec::new();
    let cut = (1e-40, 1e40);
    for t in [0.0, 1.0, -1.0, 5.0, -5.0] {
        let z = num_complex::Complex64::new(0.5, t);
        let name = format!("mellin_kernel[t={t}]");
        let res = mellin_transform(|r| censor_kernel(r, alpha).unwrap_or(f64::NAN), z, cut)
            .and_then(|m| Ok((m.value - kernel_mellin_closed_form(z, alpha)?).norm()));
        rows.push(
            match res {
                Ok(d) => ReportRow::check(name, d, 1e-6),
                Err(e) => failed_row(name, &e),
            }
            .alpha(alpha),
        );
    }

    let line = MellinLine::new(0.5, 30.0, 1201)?;
    let gam = MellinSamples::sample(line, gamma_complex, 0.0)?;
    for x in [1.0f64, 2.0] {
        let name = format!("mellin_inverse_gamma[x={x}]");
        rows.push(match inverse_mellin(&gam, x) {
            Ok(r) => ReportRow::check(name, (r.value - (-x).exp()).abs(), 1e-6),
            Err(e) => failed_row(name, &e),
        });
    }

    let v = |y: f64| (-y).exp();
    let u = |x: f64| Ok(synthesize_u_from_v(v, alpha, &[x])?[0]);
    match reconstruct_left_extension_adaptive(u, alpha, 0.05, xs) {
        Ok(rec) => {
            for (x, got) in xs.iter().zip(&rec.values) {
                let exact = v(*x);
                rows.push(
                    ReportRow::check(format!("mellin_roundtrip[x={x}]"), (got - exact).abs() / exact, 1e-2)
                        .alpha(alpha)
                        .ratio(rec.quotient.line.t_max),
                );
            }
        }
        Err(e) => rows.push(failed_row("mellin_roundtrip".into(), &e).alpha(alpha)),
    }
    for &x in xs {
        let name = format!("mellin_censoring_residual[x={x}]");
        let res = u(x).and_then(|ux| {
            let r = censoring_residual(ux, v, alpha, x)?;
            Ok(r.abs() / (ux * x.powf(-alpha) / alpha))
        });
        rows.push(
            match res {
                Ok(d) => ReportRow::check(name, d, 1e-4),
                Err(e) => failed_row(name, &e),
            }
            .alpha(alpha),
        );
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic_and_vanish_at_ends() {
        let a = TestFunctionFamily::trig(7, 8, 1).unwrap();
        let b = TestFunctionFamily::trig(7, 8, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.eval(0.0).abs() < 1e-15 && a.eval(1.0).abs() < 1e-14);
        assert_ne!(a, TestFunctionFamily::trig(8, 8, 1).unwrap());
        let bump = TestFunctionFamily::new(FamilyKind::PowerBump(0.7), 2.0).unwrap();
        assert_eq!(bump.eval(0.8), 0.8f64.powf(0.7));
        assert_eq!(bump.eval(1.9), 0.0);
        assert_eq!(bump.eval(0.0), 0.0);
        let c = TestFunctionFamily::new(FamilyKind::MonomialOnInterval(0.0), 1.0).unwrap();
        assert_eq!(c.natural_outside(), OutsideBehavior::HoldLeftValue);
    }

    #[test]
    fn family_parse_round_trip() {
        for s in ["trig:7:8:1", "bump:0.8", "monomial:1.5"] {
            assert_eq!(s.parse::<TestFunctionFamily>().unwrap().to_string(), s);
        }
        assert!("wave:1".parse::<TestFunctionFamily>().is_err());
        assert!("bump:1.5".parse::<TestFunctionFamily>().is_err());
    }

    #[test]
    fn identity_suite_on_constants_is_exact() {
        let params = FracParams::with_alpha(0.5).unwrap();
        let c = TestFunctionFamily::new(FamilyKind::MonomialOnInterval(0.0), 1.0).unwrap();
        let rows = identity_suite(&params, &c, &[16, 32]).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
        assert!(rows.iter().all(|r| r.discrepancy < 1e-12));
    }

    #[test]
    fn identity_suite_on_bump() {
        let params = FracParams::with_alpha(0.3).unwrap();
        let f = TestFunctionFamily::new(FamilyKind::PowerBump(0.8), 1.0).unwrap();
        let rows = identity_suite(&params, &f, &[64, 128, 256]).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn power_law_small() {
        let rows = power_law_oracle_suite(0.5, &[0.0, 0.5, 1.0], 512).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn holder_probe_on_constant_skips() {
        let c = TestFunctionFamily::new(FamilyKind::MonomialOnInterval(0.0), 1.0).unwrap();
        let rows = holder_loss_probe(0.3, 0.8, &c, 256).unwrap();
        assert!(rows[0].probe.contains("skipped"));
        assert!(rows.iter().all(|r| r.pass));
    }

    #[test]
    fn weight_probe_rows() {
        let rows = weight_probe(0.5, &[0.3, 0.7], 1000.0).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn mellin_probe_passes_at_half() {
        let rows = mellin_probe(0.5, &[1.0, 2.0]).unwrap();
        assert_eq!(rows.len(), 5 + 2 + 2 + 2);
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }
}
