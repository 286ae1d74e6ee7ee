//! Weighted L^p norms, Gagliardo and Hölder seminorms, and the weight-class functional.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{check_alpha, Error, Result};
use crate::grid::{Exponent, FracParams, OutsideBehavior, SampledFunction};
use crate::quad::{adaptive, unit_gauss_legendre_20};

/// A bounded positive weight on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFunction {
    Unit,
    /// `1 / (1 + |x|^γ)`.
    InversePower(f64),
}

impl WeightFunction {
    pub fn inverse_power(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "weight exponent must be positive",
            });
        }
        Ok(WeightFunction::InversePower(gamma))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightFunction::Unit => 1.0,
            WeightFunction::InversePower(g) => 1.0 / (1.0 + x.abs().powf(*g)),
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Unit => f.write_str("unit"),
            WeightFunction::InversePower(g) => write!(f, "inverse_power:{g}"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "unit" {
            return Ok(WeightFunction::Unit);
        }
        if let Some(g) = t.strip_prefix("inverse_power:") {
            let g: f64 = g
                .parse()
                .map_err(|_| Error::Parse(format!("bad weight exponent '{g}'")))?;
            return WeightFunction::inverse_power(g);
        }
        Err(Error::Parse(format!(
            "weight must be 'unit' or 'inverse_power:G', got '{s}'"
        )))
    }
}

/// The two parts of a `W^{p,β}(Ω, w)` norm and their combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub lp_part: f64,
    pub seminorm_part: f64,
    pub total: f64,
    pub p: Exponent,
    pub order: f64,
}

fn require_finite_values(f: &SampledFunction) -> Result<()> {
    if f.has_origin_sentinel() {
        return Err(Error::SingularAtOrigin);
    }
    Ok(())
}

/// `(∫ |f|^p w)^{1/p}` by the composite trapezoid rule; `max |f| w` at `p = ∞`.
pub fn lp_norm(f: &SampledFunction, p: Exponent, w: WeightFunction) -> Result<f64> {
    require_finite_values(f)?;
    let g = f.grid();
    let weighted = g.nodes().zip(f.values()).map(|(x, v)| (v.abs(), w.eval(x)));
    match p {
        Exponent::Infinity => Ok(weighted.map(|(a, wx)| a * wx).fold(0.0, f64::max)),
        Exponent::Finite(p) => {
            Exponent::new(p)?;
            let last = g.intervals();
            let s: f64 = weighted
                .enumerate()
                .map(|(i, (a, wx))| {
                    let t = if i == 0 || i == last { 0.5 } else { 1.0 };
                    t * a.powf(p) * wx
                })
                .sum();
            Ok((s * g.h()).powf(1.0 / p))
        }
    }
}

/// `∬ |x - y|^q` over two unit cells `k` cells apart.
fn cell_kernel(k: usize, q: f64) -> f64 {
    let kf = k as f64;
    if k < 32 {
        let e = q + 2.0;
        let lo = if k == 0 { 1.0 } else { (kf - 1.0).powf(e) };
        ((kf + 1.0).powf(e) - 2.0 * kf.powf(e) + lo) / ((q + 1.0) * (q + 2.0))
    } else {
        let (u, w) = unit_gauss_legendre_20();
        u.iter()
            .zip(w)
            .map(|(u, w)| w * (1.0 - u) * ((kf + u).powf(q) + (kf - u).powf(q)))
            .sum()
    }
}

fn check_order(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "Gagliardo order must lie in (0, 1)",
        })
    }
}

/// Gagliardo seminorm `(∬ |f(x) - f(y)|^p / |x - y|^{pβ+1})^{1/p}` over the window.
///
/// The difference on each pair of cells is replaced by a secant slope times
/// `x - y` and the kernel moment over the cell pair is taken in closed form,
/// so the estimate is exact for affine `f`. Diagonal cells use the cell's own
/// slope.
pub fn gagliardo_seminorm(f: &SampledFunction, p: f64, beta: f64) -> Result<f64> {
    Ok(gagliardo_pth_power(f, p, beta)?.powf(1.0 / p))
}

fn gagliardo_pth_power(f: &SampledFunction, p: f64, beta: f64) -> Result<f64> {
    require_finite_values(f)?;
    check_order(beta)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "Gagliardo seminorm needs finite p >= 1; use holder_seminorm for p = inf",
        });
    }
    let g = f.grid();
    let n = g.intervals();
    let h = g.h();
    let q = p * (1.0 - beta) - 1.0;
    let kernel: Vec<f64> = (0..n).map(|k| cell_kernel(k, q)).collect();
    let v = f.values();
    let mid: Vec<f64> = (0..n).map(|i| 0.5 * (v[i] + v[i + 1])).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = ((v[i + 1] - v[i]) / h).abs();
            let mut s = own.powf(p) * kernel[0];
            for j in i + 1..n {
                let k = j - i;
                let slope = ((mid[j] - mid[i]) / (k as f64 * h)).abs();
                s += 2.0 * slope.powf(p) * kernel[k];
            }
            s
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * h.powf(q + 2.0))
}

/// Gagliardo seminorm over the whole line of a function that vanishes outside
/// its window on both sides.
pub fn gagliardo_seminorm_on_line(f: &SampledFunction, p: f64, beta: f64) -> Result<f64> {
    if f.outside() != OutsideBehavior::Zero {
        return Err(Error::Precondition("on-line seminorm needs a zero outside".into()));
    }
    let v = f.values();
    if v[0] != 0.0 || *v.last().expect("non-empty") != 0.0 {
        return Err(Error::Precondition(
            "on-line seminorm needs the function to vanish at both window ends".into(),
        ));
    }
    let inner = gagliardo_pth_power(f, p, beta)?;
    let g = f.grid();
    let (a, b) = (g.a(), g.b());
    let pb = p * beta;
    // Pairs with one point outside: 2 ∫ |f(x)|^p ∫_{y∉[a,b]} |x-y|^{-pβ-1} dy dx.
    let exterior: f64 = g
        .nodes()
        .zip(v)
        .skip(1)
        .take(g.intervals() - 1)
        .map(|(x, f)| f.abs().powf(p) * ((x - a).powf(-pb) + (b - x).powf(-pb)) / pb)
        .sum::<f64>()
        * g.h();
    Ok((inner + 2.0 * exterior).powf(1.0 / p))
}

/// `max_{i≠j} |f_i - f_j| / |x_i - x_j|^β` over all node pairs.
pub fn holder_seminorm(f: &SampledFunction, beta: f64) -> Result<f64> {
    require_finite_values(f)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "Hölder exponent must lie in (0, 1]",
        });
    }
    let g = f.grid();
    let n = g.intervals();
    let dist: Vec<f64> = (0..=n).map(|k| (k as f64 * g.h()).powf(beta)).collect();
    let v = f.values();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..=n)
                .map(|j| (v[j] - v[i]).abs() / dist[j - i])
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

/// `W^{p,order}(Ω, w)` norm. The weight enters only the L^p part; at `p = ∞`
/// the norm is `‖f w‖_∞ + [f]_{C^order}`.
pub fn sobolev_norm_with_order(f: &SampledFunction, p: Exponent, order: f64, w: WeightFunction) -> Result<NormReport> {
    let lp_part = lp_norm(f, p, w)?;
    let (seminorm_part, total) = match p {
        Exponent::Infinity => {
            let s = holder_seminorm(f, order)?;
            (s, lp_part + s)
        }
        Exponent::Finite(pv) => {
            let s = gagliardo_seminorm(f, pv, order)?;
            (s, (lp_part.powf(pv) + s.powf(pv)).powf(1.0 / pv))
        }
    };
    Ok(NormReport {
        lp_part,
        seminorm_part,
        total,
        p,
        order,
    })
}

/// [`sobolev_norm_with_order`] with the order `s` and exponent `p` of `params`.
pub fn sobolev_norm(f: &SampledFunction, params: &FracParams, w: WeightFunction) -> Result<NormReport> {
    sobolev_norm_with_order(f, params.p, params.s, w)
}

/// Result of [`weight_class_margin`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightMargin {
    /// `sup_x` of the tail integral, including the closed-form remainder
    /// beyond `L` when that remainder is finite, else the truncated value.
    pub value: f64,
    /// `sup_x ∫₁^L`.
    pub truncated: f64,
    /// `I(L) - I(L/2)` at the maximising probe.
    pub growth: f64,
    /// `(I(2L) - I(L)) / (I(L) - I(L/2))`; below 1 when the integral settles.
    pub trend: f64,
    /// Whether the analytic remainder beyond `L` is finite (`γ < α`).
    pub converges: bool,
}

fn ratio_integral(w: WeightFunction, alpha: f64, x: f64, l: f64) -> f64 {
    let wx = w.eval(x);
    let f = |y: f64| wx / (y.powf(1.0 + alpha) * w.eval(x - y));
    // Split at powers of two (and the kink at y = x) so every panel is tame.
    let mut cuts = vec![1.0];
    let mut c = 2.0;
    while c < l {
        cuts.push(c);
        c *= 2.0;
    }
    cuts.push(l);
    if x > 1.0 && x < l {
        cuts.push(x);
        cuts.sort_by(f64::total_cmp);
    }
    cuts.windows(2)
        .map(|ab| adaptive(f, ab[0], ab[1], 1e-14, 1e-12, 200).value)
        .sum()
}

fn tail_beyond(w: WeightFunction, alpha: f64, x: f64, l: f64) -> Option<f64> {
    match w {
        WeightFunction::Unit => Some(l.powf(-alpha) / alpha),
        WeightFunction::InversePower(g) if g < alpha => {
            let wx = w.eval(x);
            Some(wx * (l.powf(-alpha) / alpha + l.powf(g - alpha) / (alpha - g)))
        }
        WeightFunction::InversePower(_) => None,
    }
}

/// The W(α) functional `sup_x |∫₁^∞ w(x) / (y^{1+α} w(x - y)) dy|` over
/// `probe_xs`, computed on `[1, L]` by adaptive quadrature with an L-doubling
/// trend diagnostic.
pub fn weight_class_margin(w: WeightFunction, alpha: f64, probe_xs: &[f64], l: f64) -> Result<WeightMargin> {
    check_alpha(alpha)?;
    if !(l >= 10.0 && l.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "L",
            value: l,
            reason: "truncation must be at least 10",
        });
    }
    if probe_xs.is_empty() {
        return Err(Error::Precondition("no probe points".into()));
    }
    for &x in probe_xs {
        let wx = w.eval(x);
        if !(wx > 0.0 && wx.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "w",
                value: wx,
                reason: "weight must be positive",
            });
        }
    }
    let mut best: Option<(f64, f64)> = None;
    for &x in probe_xs {
        let v = ratio_integral(w, alpha, x, l);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((x, v));
        }
    }
    let (x, truncated) = best.expect("non-empty");
    let half = ratio_integral(w, alpha, x, 0.5 * l);
    let double = ratio_integral(w, alpha, x, 2.0 * l);
    let growth = truncated - half;
    let trend = (double - truncated) / growth;
    let mut value = f64::NEG_INFINITY;
    let mut converges = true;
    for &px in probe_xs {
        let t = ratio_integral(w, alpha, px, l);
        match tail_beyond(w, alpha, px, l) {
            Some(r) => value = value.max(t + r),
            None => {
                converges = false;
                value = value.max(t);
            }
        }
    }
    Ok(WeightMargin {
        value,
        truncated,
        growth,
        trend,
        converges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, UniformGrid};

    fn unit(n: usize) -> UniformGrid {
        UniformGrid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn lp_examples() {
        let two = Exponent::Finite(2.0);
        let zero = sample(|_| 0.0, unit(8)).unwrap();
        assert_eq!(lp_norm(&zero, two, WeightFunction::Unit).unwrap(), 0.0);
        let one = sample(|_| 1.0, unit(8)).unwrap();
        assert!((lp_norm(&one, two, WeightFunction::Unit).unwrap() - 1.0).abs() < 1e-15);
        let x = sample(|x| x, unit(8)).unwrap();
        assert!((lp_norm(&x, Exponent::Finite(1.0), WeightFunction::Unit).unwrap() - 0.5).abs() < 1e-15);
        let w = WeightFunction::inverse_power(1.0).unwrap();
        assert_eq!(lp_norm(&x, Exponent::Infinity, w).unwrap(), 0.5);
    }

    #[test]
    fn gagliardo_examples() {
        let c = sample(|_| 4.0, unit(64)).unwrap();
        assert_eq!(gagliardo_seminorm(&c, 2.0, 0.5).unwrap(), 0.0);
        let x = sample(|x| x, unit(64)).unwrap();
        assert!((gagliardo_seminorm(&x, 2.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((gagliardo_seminorm(&x, 1.0, 0.5).unwrap() - 8.0 / 3.0).abs() < 1e-12);
        assert!(gagliardo_seminorm(&x, f64::INFINITY, 0.5).is_err());
        assert!(gagliardo_seminorm(&x, 2.0, 1.0).is_err());
    }

    #[test]
    fn gagliardo_against_brute_force() {
        // Oracle: midpoint double sum on a fine grid with the singular diagonal
        // band removed, plus the band's exact contribution for x².
        let f = sample(|x| x * x, unit(256)).unwrap();
        let (p, beta) = (2.0, 0.3);
        let est = gagliardo_seminorm(&f, p, beta).unwrap().powf(p);
        let m = 2000;
        let h = 1.0 / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            for j in 0..m {
                if i != j {
                    let y = (j as f64 + 0.5) * h;
                    s += ((x * x - y * y).abs()).powf(p) / (x - y).abs().powf(p * beta + 1.0) * h * h;
                }
            }
        }
        // Diagonal cells: |x+y|² |x-y|^{2-0.6-1} with x ≈ y, ∫∫_cell |x-y|^{0.4} = 2h^{2.4}/(1.4·2.4).
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            s += 4.0 * x * x * 2.0 * h.powf(2.4) / (1.4 * 2.4);
        }
        assert!((est - s).abs() < 2e-3 * s, "{est} vs {s}");
    }

    #[test]
    fn holder_examples() {
        let c = sample(|_| 1.0, unit(32)).unwrap();
        assert_eq!(holder_seminorm(&c, 0.5).unwrap(), 0.0);
        let x = sample(|x| x, unit(32)).unwrap();
        assert!((holder_seminorm(&x, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let r = sample(f64::sqrt, unit(32)).unwrap();
        assert!((holder_seminorm(&r, 0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_examples() {
        let params = FracParams::new(0.25, 0.5, Exponent::Finite(2.0), 0.5).unwrap();
        let zero = sample(|_| 0.0, unit(32)).unwrap();
        assert_eq!(sobolev_norm(&zero, &params, WeightFunction::Unit).unwrap().total, 0.0);
        let x = sample(|x| x, unit(1024)).unwrap();
        let r = sobolev_norm(&x, &params, WeightFunction::Unit).unwrap();
        assert!((r.total - (1.0f64 / 3.0 + 1.0).sqrt()).abs() < 1e-6);
        let one = sample(|_| 1.0, unit(32)).unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let r = sobolev_norm_with_order(&one, p, 0.7, WeightFunction::Unit).unwrap();
            assert!((r.total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_margin_examples() {
        let xs = [-10.0, -1.0, 0.0, 1.0, 10.0];
        for alpha in [0.25, 0.5, 0.75] {
            let m = weight_class_margin(WeightFunction::Unit, alpha, &xs, 100.0).unwrap();
            assert!((m.value - 1.0 / alpha).abs() < 1e-10);
            assert!(m.converges);
        }
        let w = WeightFunction::inverse_power(0.3).unwrap();
        let m = weight_class_margin(w, 0.5, &xs, 1000.0).unwrap();
        assert!(m.converges && m.trend < 1.0 && m.value.is_finite());
        let w = WeightFunction::inverse_power(0.7).unwrap();
        let m = weight_class_margin(w, 0.5, &xs, 1000.0).unwrap();
        assert!(!m.converges && m.trend > 1.0);
        assert!(weight_class_margin(WeightFunction::Unit, 0.5, &xs, 5.0).is_err());
    }
}
