//! Discrete fractional operators by product quadrature.
//!
//! Every operator replaces the smooth factor of its integrand (the function
//! itself, or the increment `f(x) - f(x - s)`) by the piecewise-linear
//! interpolant on the grid and integrates it exactly against the power
//! kernel. With `s = (m + u) h` on interval `m` the only kernel data needed
//! are the moments
//!
//! ```text
//! near_m = ∫₀¹ (1 - u) (m + u)^e du,    far_m = ∫₀¹ u (m + u)^e du
//! ```
//!
//! for `e = α - 1` (integral) or `e = -1 - α` (hypersingular derivatives).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{check_alpha, Error, Result};
use crate::grid::{extend, FracParams, OutsideBehavior, SampledFunction, UniformGrid};
use crate::quad::unit_gauss_legendre_20;
use crate::specialfn::gamma;

/// The operators of the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    RLIntegral,
    RLDerivative,
    Caputo,
    Censored,
    MarchaudPlus,
    EvenExtDerivative,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::RLIntegral,
        OperatorKind::RLDerivative,
        OperatorKind::Caputo,
        OperatorKind::Censored,
        OperatorKind::MarchaudPlus,
        OperatorKind::EvenExtDerivative,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorKind::RLIntegral => "rl_integral",
            OperatorKind::RLDerivative => "rl_derivative",
            OperatorKind::Caputo => "caputo",
            OperatorKind::Censored => "censored",
            OperatorKind::MarchaudPlus => "marchaud_plus",
            OperatorKind::EvenExtDerivative => "even_ext_derivative",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase().replace('-', "_");
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == t)
            .or(match t.as_str() {
                "rl" | "integral" => Some(OperatorKind::RLIntegral),
                "marchaud" => Some(OperatorKind::MarchaudPlus),
                "even" => Some(OperatorKind::EvenExtDerivative),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("unknown operator '{s}'")))
    }
}

/// How the Marchaud integral over `t ∈ (0, ∞)` is closed beyond the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// The function is the declared constant left of the window and the
    /// remaining integral is done in closed form.
    AnalyticConstantTail,
    /// Shifts beyond `L` contribute only through `f(x)`: the integral of
    /// `f(x) t^{-1-α}` over `(L, ∞)` is kept, `f(x - t)` there is dropped.
    TruncateAt(f64),
}

impl fmt::Display for TailPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailPolicy::AnalyticConstantTail => f.write_str("analytic"),
            TailPolicy::TruncateAt(l) => write!(f, "truncate:{l}"),
        }
    }
}

impl FromStr for TailPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("analytic") {
            return Ok(TailPolicy::AnalyticConstantTail);
        }
        if let Some(rest) = t.strip_prefix("truncate:") {
            let l: f64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad truncation length '{rest}'")))?;
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "tail",
                    value: l,
                    reason: "truncation length must be positive",
                });
            }
            return Ok(TailPolicy::TruncateAt(l));
        }
        Err(Error::Parse(format!(
            "tail must be 'analytic' or 'truncate:L', got '{s}'"
        )))
    }
}

/// Upper bound on the part of the Marchaud integral that `TruncateAt(L)` drops,
/// for a function bounded by `sup_abs`.
pub fn truncation_bound(sup_abs: f64, alpha: f64, l: f64) -> f64 {
    sup_abs * l.powf(-alpha) / gamma(1.0 - alpha).unwrap_or(f64::NAN)
}

/// Interval moments of `(m + u)^e` against the two linear hat pieces.
#[derive(Debug, Clone)]
pub struct PowerMoments {
    pub near: Vec<f64>,
    pub far: Vec<f64>,
}

impl PowerMoments {
    /// Moments for `m = 0 .. count`. Interval 0 uses closed forms; `near_0`
    /// is left as `NaN` when it diverges (`e <= -1`), which is harmless
    /// because the increment it multiplies vanishes.
    pub fn new(exponent: f64, count: usize) -> Self {
        let (u, w) = unit_gauss_legendre_20();
        let mut near = Vec::with_capacity(count);
        let mut far = Vec::with_capacity(count);
        for m in 0..count {
            if m == 0 {
                let e = exponent;
                near.push(if e > -1.0 {
                    1.0 / (e + 1.0) - 1.0 / (e + 2.0)
                } else {
                    f64::NAN
                });
                far.push(1.0 / (e + 2.0));
                continue;
            }
            let mf = m as f64;
            let (mut a, mut b) = (0.0, 0.0);
            for (ui, wi) in u.iter().zip(w) {
                let k = wi * (mf + ui).powf(exponent);
                a += (1.0 - ui) * k;
                b += ui * k;
            }
            near.push(a);
            far.push(b);
        }
        Self { near, far }
    }
}

fn require_half_line(f: &SampledFunction) -> Result<()> {
    if f.grid().a() != 0.0 {
        return Err(Error::NotHalfLine(f.grid().a()));
    }
    if f.has_origin_sentinel() {
        return Err(Error::SingularAtOrigin);
    }
    Ok(())
}

/// `Σ_{m<count} near_m (v_J - v_{J-m}) + far_m (v_J - v_{J-m-1})`.
fn increment_sum(v: &[f64], j: usize, count: usize, mom: &PowerMoments) -> f64 {
    let vj = v[j];
    let mut s = 0.0;
    for m in 0..count {
        if m > 0 {
            s += mom.near[m] * (vj - v[j - m]);
        }
        s += mom.far[m] * (vj - v[j - m - 1]);
    }
    s
}

/// `∫₀^{x_j} (f(x_j) - f(x_j - s)) s^{-1-α} ds` at every node, by product quadrature.
fn censored_integrals(f: &SampledFunction, alpha: f64) -> Vec<f64> {
    let n = f.grid().intervals();
    let h = f.grid().h();
    let mom = PowerMoments::new(-1.0 - alpha, n);
    let v = f.values();
    let scale = h.powf(-alpha);
    (0..=n)
        .into_par_iter()
        .map(|j| scale * increment_sum(v, j, j, &mom))
        .collect()
}

/// Riemann-Liouville integral `∫₀ˣ f(t) (x - t)^{α-1} dt / Γ(α)`.
pub fn rl_integral(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    require_half_line(f)?;
    let grid = *f.grid();
    let n = grid.intervals();
    let mom = PowerMoments::new(alpha - 1.0, n);
    let v = f.values();
    let c = grid.h().powf(alpha) / gamma(alpha)?;
    let out: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let mut s = 0.0;
            for m in 0..j {
                s += mom.near[m] * v[j - m] + mom.far[m] * v[j - m - 1];
            }
            c * s
        })
        .collect();
    SampledFunction::new(grid, out, OutsideBehavior::Zero)
}

/// Riemann-Liouville derivative in its increment form
/// `(α/Γ(1-α)) ∫₀ˣ (f(x) - f(x-s)) s^{-1-α} ds + f(x) / (Γ(1-α) x^α)`.
/// Node 0 holds the `NaN` sentinel.
pub fn rl_derivative(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    require_half_line(f)?;
    let g1 = gamma(1.0 - alpha)?;
    let grid = *f.grid();
    let cen = censored_integrals(f, alpha);
    let mut out: Vec<f64> = cen
        .iter()
        .zip(f.values())
        .zip(grid.nodes())
        .map(|((c, v), x)| alpha / g1 * c + v / (g1 * x.powf(alpha)))
        .collect();
    out[0] = f64::NAN;
    SampledFunction::new(grid, out, OutsideBehavior::Unspecified)
}

/// Caputo derivative, `rl_derivative(f) - f(0) x^{-α} / Γ(1-α)`.
pub fn caputo(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    let rl = rl_derivative(f, alpha)?;
    let g1 = gamma(1.0 - alpha)?;
    let f0 = f.values()[0];
    let out: Vec<f64> = rl
        .values()
        .iter()
        .zip(f.grid().nodes())
        .map(|(r, x)| r - f0 / (g1 * x.powf(alpha)))
        .collect();
    let mut out = out;
    out[0] = f64::NAN;
    SampledFunction::new(*f.grid(), out, OutsideBehavior::Unspecified)
}

/// Censored derivative `(α/Γ(1-α)) ∫₀ˣ (f(x) - f(x-s)) s^{-1-α} ds`.
pub fn censored(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    require_half_line(f)?;
    let c = alpha / gamma(1.0 - alpha)?;
    let mut out: Vec<f64> = censored_integrals(f, alpha).iter().map(|v| c * v).collect();
    out[0] = f64::NAN;
    SampledFunction::new(*f.grid(), out, OutsideBehavior::Unspecified)
}

/// Marchaud derivative `(α/Γ(1-α)) ∫_{0+}^∞ (f(x) - f(x-t)) t^{-1-α} dt` at the
/// nodes of `[0, T]`.
///
/// `f` lives on `[-L, T]` with `0` a node. A `[0, T]` window declared
/// `MirrorEven` is first mirrored onto `[-T, T]`. Shifts that leave the window
/// use the declared constant outside value (`0` or the leftmost stored value).
pub fn marchaud_plus(f: &SampledFunction, alpha: f64, tail: TailPolicy) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    if f.has_origin_sentinel() {
        return Err(Error::SingularAtOrigin);
    }
    let g = *f.grid();
    if g.a() > 0.0 {
        return Err(Error::NotHalfLine(g.a()));
    }
    if g.a() == 0.0 && f.outside() == OutsideBehavior::MirrorEven {
        let window = UniformGrid::new(-g.b(), g.b(), 2 * g.intervals())?;
        return marchaud_plus(&extend(f, OutsideBehavior::MirrorEven, window)?, alpha, tail);
    }
    let k0 = g
        .index_of(0.0)
        .ok_or_else(|| Error::Misaligned(format!("0 is not a node of [{}, {}]", g.a(), g.b())))?;
    let n_total = g.intervals();
    let h = g.h();
    let v = f.values();
    // Left-of-window constant, if the declared behavior provides one.
    let outside_value = match f.outside() {
        OutsideBehavior::Zero => Some(0.0),
        OutsideBehavior::HoldLeftValue => Some(v[0]),
        OutsideBehavior::MirrorEven if k0 == n_total - k0 => Some(v[0]),
        _ => None,
    };
    let (m_cut, l_eff) = match tail {
        TailPolicy::AnalyticConstantTail => {
            if outside_value.is_none() {
                return Err(Error::UnspecifiedOutside);
            }
            (usize::MAX, f64::INFINITY)
        }
        TailPolicy::TruncateAt(l) => {
            if !(l.is_finite() && l > g.b()) {
                return Err(Error::InvalidParameter {
                    name: "tail",
                    value: l,
                    reason: "truncation length must exceed the output window length",
                });
            }
            let m = (l / h * (1.0 + 1e-12)).floor() as usize;
            (m, m as f64 * h)
        }
    };
    if outside_value.is_none() && m_cut > k0 {
        return Err(Error::WindowTooShort(format!(
            "window reaches {} but shifts up to {} are needed and the outside is unspecified",
            g.a(),
            l_eff
        )));
    }
    let c = alpha / gamma(1.0 - alpha)?;
    let mom = PowerMoments::new(-1.0 - alpha, n_total.min(m_cut));
    let scale = h.powf(-alpha);
    let out: Vec<f64> = (k0..=n_total)
        .into_par_iter()
        .map(|j| {
            let vj = v[j];
            let in_window = j.min(m_cut);
            let mut s = scale * increment_sum(v, j, in_window, &mom);
            let reach = j as f64 * h;
            if in_window == j {
                // (reach, l_eff): outside constant; (l_eff, ∞): f(x) alone.
                let cst = outside_value.unwrap_or(0.0);
                if j == 0 {
                    if vj != cst {
                        return f64::NAN;
                    }
                } else {
                    s += (vj - cst) * (reach.powf(-alpha) - l_eff.powf(-alpha)) / alpha;
                }
            }
            if l_eff.is_finite() {
                s += vj * l_eff.powf(-alpha) / alpha;
            }
            c * s
        })
        .collect();
    let out_grid = UniformGrid::new(0.0, g.b(), n_total - k0)?;
    SampledFunction::new(out_grid, out, OutsideBehavior::Unspecified)
}

/// Marchaud derivative of the even extension, from the split form
/// `∫₀ˣ (f(x) - f(x-s)) s^{-1-α} ds + ∫ₓ^∞ (f(x) - f(s-x)) s^{-1-α} ds`,
/// with `f(T)` continuing the function beyond `T`.
pub fn even_ext_derivative(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    require_half_line(f)?;
    let grid = *f.grid();
    let n = grid.intervals();
    let h = grid.h();
    let v = f.values();
    let mom = PowerMoments::new(-1.0 - alpha, 2 * n);
    let scale = h.powf(-alpha);
    let c = alpha / gamma(1.0 - alpha)?;
    let out: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let vj = v[j];
            let mut s = increment_sum(v, j, j, &mom);
            for k in 0..n {
                let m = j + k;
                if m > 0 {
                    s += mom.near[m] * (vj - v[k]);
                }
                s += mom.far[m] * (vj - v[k + 1]);
            }
            s *= scale;
            s += (vj - v[n]) * ((j + n) as f64 * h).powf(-alpha) / alpha;
            c * s
        })
        .collect();
    SampledFunction::new(grid, out, OutsideBehavior::Unspecified)
}

/// Uniform dispatch over [`OperatorKind`].
pub fn apply(
    kind: OperatorKind,
    f: &SampledFunction,
    params: &FracParams,
    tail: TailPolicy,
) -> Result<SampledFunction> {
    let a = params.alpha;
    match kind {
        OperatorKind::RLIntegral => rl_integral(f, a),
        OperatorKind::RLDerivative => rl_derivative(f, a),
        OperatorKind::Caputo => caputo(f, a),
        OperatorKind::Censored => censored(f, a),
        OperatorKind::MarchaudPlus => marchaud_plus(f, a, tail),
        OperatorKind::EvenExtDerivative => even_ext_derivative(f, a),
    }
}
