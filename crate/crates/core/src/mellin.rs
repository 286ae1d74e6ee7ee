//! Mellin transforms on vertical lines and the censoring kernel
//! `g(r) = r^α (1 + r)^{-α-1}`.
//!
//! The kernel links a half-line function `v` to
//! `u(x) = α ∫₀^∞ v(y) g(x/y) dy/y`, and its transform is `B(1 - z, α + z)`,
//! so `v` is recovered from `u` by dividing transforms on a contour inside
//! the strip `-α < Re z < 1`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{check_alpha, Error, Result};
use crate::quad::adaptive;
use crate::specialfn::{beta_complex, ComplexValue};

/// Endpoint integrand magnitude, relative to the integral, above which a
/// positive-axis quadrature is declared divergent.
const ENDPOINT_TOL: f64 = 1e-6;
/// Relative size of `|F(c ± i t_max)|` above which a line is not decayed.
const LINE_DECAY_TOL: f64 = 1e-4;

/// The contour `Re z = c` sampled at `n_t` equispaced `t ∈ [-t_max, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinLine {
    pub c: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl MellinLine {
    pub fn new(c: f64, t_max: f64, n_t: usize) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                reason: "abscissa must be finite",
            });
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                value: t_max,
                reason: "must be positive",
            });
        }
        if n_t < 3 || n_t.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "n_t",
                value: n_t as f64,
                reason: "node count must be odd and at least 3",
            });
        }
        Ok(Self { c, t_max, n_t })
    }

    /// Line at the default abscissa for order `alpha` with spacing close to `dt`.
    pub fn for_alpha(alpha: f64, t_max: f64, dt: f64) -> Result<Self> {
        let half = (t_max / dt).ceil().max(1.0) as usize;
        Self::new(default_abscissa(alpha), t_max, 2 * half + 1)
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.t_max / (self.n_t - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        let half = (self.n_t - 1) / 2;
        self.t_max * (i as f64 - half as f64) / half as f64
    }

    pub fn z(&self, i: usize) -> ComplexValue {
        Complex64::new(self.c, self.t(i))
    }

    /// Errors unless `-α < c < 1`.
    pub fn check_strip(&self, alpha: f64) -> Result<()> {
        check_strip(self.c, alpha)
    }
}

/// Midpoint-of-strip contour abscissa `0.5 (1 - α) + 0.25`, kept away from the strip ends.
pub fn default_abscissa(alpha: f64) -> f64 {
    (0.5 * (1.0 - alpha) + 0.25).clamp(-alpha + 0.05, 0.95)
}

fn check_strip(re: f64, alpha: f64) -> Result<()> {
    if re > -alpha && re < 1.0 {
        Ok(())
    } else {
        Err(Error::StripViolation {
            re,
            lo: -alpha,
            hi: 1.0,
        })
    }
}

/// Values of a transform along a [`MellinLine`].
#[derive(Debug, Clone, PartialEq)]
pub struct MellinSamples {
    pub line: MellinLine,
    pub values: Vec<ComplexValue>,
    /// Order the samples belong to; `0` when unrelated to an order.
    pub alpha: f64,
}

impl MellinSamples {
    pub fn new(line: MellinLine, values: Vec<ComplexValue>, alpha: f64) -> Result<Self> {
        if values.len() != line.n_t {
            return Err(Error::InvalidParameter {
                name: "n_t",
                value: values.len() as f64,
                reason: "sample count does not match the line",
            });
        }
        Ok(Self { line, values, alpha })
    }

    pub fn sample<F: Fn(ComplexValue) -> Result<ComplexValue>>(line: MellinLine, f: F, alpha: f64) -> Result<Self> {
        let values = (0..line.n_t).map(|i| f(line.z(i))).collect::<Result<Vec<_>>>()?;
        Self::new(line, values, alpha)
    }

    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# {} {} {} {}",
            self.line.c, self.line.t_max, self.line.n_t, self.alpha
        )?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{} {} {}", self.line.t(i), v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty samples file".into()))??;
        let fields: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("header must start with '#'".into()))?
            .split_whitespace()
            .collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "header needs 'c t_max n_t alpha', got '{header}'"
            )));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
        let n_t: usize = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad node count '{}'", fields[2])))?;
        let line = MellinLine::new(num(fields[0])?, num(fields[1])?, n_t)?;
        let alpha = num(fields[3])?;
        let mut values = Vec::with_capacity(n_t);
        for l in lines {
            let l = l?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.is_empty() {
                continue;
            }
            if parts.len() != 3 {
                return Err(Error::Parse(format!("expected 't re im', got '{l}'")));
            }
            let i = values.len();
            if i >= n_t {
                return Err(Error::Parse(format!("more than {n_t} sample lines")));
            }
            let t = num(parts[0])?;
            if (t - line.t(i)).abs() > 1e-9 * line.t_max {
                return Err(Error::Parse(format!("sample {i} has t = {t}, expected {}", line.t(i))));
            }
            values.push(Complex64::new(num(parts[1])?, num(parts[2])?));
        }
        Self::new(line, values, alpha)
    }

    /// Inverse transform at `x`; see [`inverse_mellin`].
    pub fn inverse_at(&self, x: f64) -> Result<InverseValue> {
        inverse_mellin(self, x)
    }
}

/// A forward transform value with its error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub value: ComplexValue,
    /// Adaptive quadrature error estimate.
    pub error: f64,
    /// Size of the integrand at the two cut points, a proxy for the mass lost
    /// by clipping the positive axis to `[eps, R]`.
    pub truncation: f64,
}

/// `∫₀^∞ x^{z-1} f(x) dx`, computed as `∫ e^{τz} f(e^τ) dτ` over `[ln eps, ln R]`.
pub fn mellin_transform<F: Fn(f64) -> f64>(f: F, z: ComplexValue, domain_cut: (f64, f64)) -> Result<MellinValue> {
    let (eps, r) = domain_cut;
    if !(eps > 0.0 && r > eps && r.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "domain_cut",
            value: eps,
            reason: "need 0 < eps < R < inf",
        });
    }
    let g = |tau: f64| (z * tau).exp() * f(tau.exp());
    let (lo, hi) = (eps.ln(), r.ln());
    let res = adaptive(g, lo, hi, 1e-14, 1e-12, 5000);
    let truncation = g(lo).norm() + g(hi).norm();
    // Oscillation can make the transform far smaller than the mass of its
    // integrand, so decay is judged against ∫|integrand|.
    let mass = adaptive(|tau: f64| g(tau).norm(), lo, hi, 1e-300, 1e-6, 2000).value;
    if truncation > ENDPOINT_TOL * mass && truncation > 1e-300 {
        return Err(Error::Divergence(format!(
            "integrand at the cuts is {truncation:e} against an integrand mass of {mass:e}"
        )));
    }
    Ok(MellinValue {
        value: res.value,
        error: res.error,
        truncation,
    })
}

/// `g(r) = r^α (1 + r)^{-α-1}`.
pub fn censor_kernel(r: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "kernel argument must be positive",
        });
    }
    Ok(r.powf(alpha) * (1.0 + r).powf(-alpha - 1.0))
}

/// `𝓜g(z) = B(1 - z, α + z)` on the strip `-α < Re z < 1`.
pub fn kernel_mellin_closed_form(z: ComplexValue, alpha: f64) -> Result<ComplexValue> {
    check_alpha(alpha)?;
    check_strip(z.re, alpha)?;
    beta_complex(Complex64::new(1.0, 0.0) - z, z + alpha)
}

/// `∫₀^∞ v(y) (x + y)^{-1-α} dy` in the variable `s = ln y`, split at `s = ln x`.
fn convolution_integral<V: Fn(f64) -> f64>(v: &V, alpha: f64, x: f64) -> Result<f64> {
    let lx = x.ln();
    let g = |s: f64| {
        let y = s.exp();
        let val = v(y);
        if val == 0.0 {
            0.0
        } else {
            val * y * (x + y).powf(-1.0 - alpha)
        }
    };
    Ok(one_sided(&g, lx, -1.0)? + one_sided(&g, lx, 1.0)?)
}

fn one_sided<F: Fn(f64) -> f64>(g: &F, from: f64, dir: f64) -> Result<f64> {
    let step = 20.0;
    let mut total: f64 = 0.0;
    let mut a = from;
    for _ in 0..36 {
        let b = a + dir * step;
        // Tolerances are relative: these integrals can be tiny in absolute terms.
        let piece = adaptive(g, a.min(b), a.max(b), 1e-15 * total.abs(), 1e-13, 4000).value;
        total += piece;
        a = b;
        let end = g(a).abs();
        // A zero end value only means the integrand has underflowed locally;
        // the mass may still lie further out.
        if total != 0.0 && end <= 1e-13 * total.abs() {
            return Ok(total);
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Err(Error::Divergence(format!("integrand has not decayed by s = {a:.0}")))
}

/// `u(x) = α ∫₀^∞ v(y) g(x/y) dy/y = α x^α ∫₀^∞ v(y) (x + y)^{-1-α} dy` at each `x`.
pub fn synthesize_u_from_v<V: Fn(f64) -> f64>(v: V, alpha: f64, xs: &[f64]) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    xs.iter()
        .map(|&x| {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "x",
                    value: x,
                    reason: "must be positive",
                });
            }
            Ok(alpha * x.powf(alpha) * convolution_integral(&v, alpha, x)?)
        })
        .collect()
}

/// `∫ₓ^∞ (u(x) - v(t - x)) t^{-1-α} dt`, given the value `u_x = u(x)`.
///
/// The `v` part is integrated in `t = x e^σ`, a different parametrisation
/// from the one [`synthesize_u_from_v`] uses.
pub fn censoring_residual<V: Fn(f64) -> f64>(u_x: f64, v: V, alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must be positive",
        });
    }
    // ∫ₓ^∞ v(t - x) t^{-1-α} dt = x^{-α} ∫₀^∞ v(x (e^σ - 1)) e^{-ασ} dσ
    let g = |sigma: f64| {
        let val = v(x * sigma.exp_m1());
        if val == 0.0 {
            0.0
        } else {
            val * (-alpha * sigma).exp()
        }
    };
    Ok(u_x * x.powf(-alpha) / alpha - x.powf(-alpha) * one_sided(&g, 0.0, 1.0)?)
}

/// An inverse transform value with its imaginary-part diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseValue {
    pub value: f64,
    /// Imaginary part of the contour sum; zero for a real function.
    pub imag: f64,
}

/// `(1/2π) ∫ x^{-c-it} F(c + it) dt` by the trapezoid rule over the sampled line.
pub fn inverse_mellin(f: &MellinSamples, x: f64) -> Result<InverseValue> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must be positive",
        });
    }
    let line = f.line;
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ends = f.values[0].norm().max(f.values[line.n_t - 1].norm());
    if ends > LINE_DECAY_TOL * peak {
        return Err(Error::InsufficientDecay(format!(
            "|F| at t = ±{} is {ends:e} against a peak of {peak:e}",
            line.t_max
        )));
    }
    let lx = x.ln();
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in f.values.iter().enumerate() {
        let w = if i == 0 || i == line.n_t - 1 { 0.5 } else { 1.0 };
        let z = line.z(i);
        s += (-z * lx).exp() * v * w;
    }
    s *= line.dt() / (2.0 * PI);
    Ok(InverseValue {
        value: s.re,
        imag: s.im,
    })
}

/// Fixed log-grid used for `𝓜u` during reconstruction.
const TAU_RANGE: f64 = 70.0;
const TAU_STEP: f64 = 0.1;

struct LogSamples {
    taus: Vec<f64>,
    /// `e^{cτ} u(e^τ)` at the grid.
    weighted: Vec<f64>,
}

fn log_samples<U: Fn(f64) -> Result<f64>>(u: &U, c: f64) -> Result<LogSamples> {
    let n = (2.0 * TAU_RANGE / TAU_STEP).round() as usize;
    let taus: Vec<f64> = (0..=n)
        .map(|i| -TAU_RANGE + 2.0 * TAU_RANGE * i as f64 / n as f64)
        .collect();
    let weighted = taus
        .iter()
        .map(|&tau| Ok((c * tau).exp() * u(tau.exp())?))
        .collect::<Result<Vec<f64>>>()?;
    let peak = weighted.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let ends = weighted[0].abs().max(weighted[n].abs());
    if ends > ENDPOINT_TOL * peak {
        return Err(Error::Divergence(format!(
            "x^c u(x) has not decayed at x = e^±{TAU_RANGE}: {ends:e} against {peak:e}"
        )));
    }
    Ok(LogSamples { taus, weighted })
}

impl LogSamples {
    /// `𝓜u(c + it)` by the trapezoid rule in `τ`.
    fn transform(&self, t: f64) -> Complex64 {
        let n = self.taus.len() - 1;
        let mut s = Complex64::new(0.0, 0.0);
        for (i, (tau, w)) in self.taus.iter().zip(&self.weighted).enumerate() {
            let e = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += Complex64::from_polar(1.0, t * tau) * (w * e);
        }
        s * TAU_STEP
    }

    /// Absolute noise level of [`Self::transform`] when `u` carries relative
    /// errors around `1e-13`.
    fn noise(&self) -> f64 {
        1e-12 * self.weighted.iter().map(|v| v.abs()).sum::<f64>() * TAU_STEP
    }
}

/// Output of [`reconstruct_left_extension`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest imaginary part seen across `xs`.
    pub max_imag: f64,
    /// `𝓜u / (α B)` on the line used; invert it anywhere with [`inverse_mellin`].
    pub quotient: MellinSamples,
}

/// `v = 𝓜^{-1}[𝓜u / (α B(1 - z, α + z))]` on a fixed line.
///
/// The map is linear in `u`. Errors when the quotient has not decayed at the
/// line's ends, the numerical face of the integrability hypothesis.
pub fn reconstruct_left_extension<U: Fn(f64) -> Result<f64>>(
    u: U,
    alpha: f64,
    line: MellinLine,
    xs: &[f64],
) -> Result<Reconstruction> {
    check_alpha(alpha)?;
    line.check_strip(alpha)?;
    let samples = log_samples(&u, line.c)?;
    let values = (0..line.n_t)
        .map(|i| {
            let z = line.z(i);
            Ok(samples.transform(z.im) / (kernel_mellin_closed_form(z, alpha)? * alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_reconstruction(MellinSamples::new(line, values, alpha)?, xs)
}

fn finish_reconstruction(quotient: MellinSamples, xs: &[f64]) -> Result<Reconstruction> {
    let mut values = Vec::with_capacity(xs.len());
    let mut max_imag: f64 = 0.0;
    for &x in xs {
        let r = inverse_mellin(&quotient, x)?;
        values.push(r.value);
        max_imag = max_imag.max(r.imag.abs());
    }
    Ok(Reconstruction {
        xs: xs.to_vec(),
        values,
        max_imag,
        quotient,
    })
}

/// [`reconstruct_left_extension`] with `t_max` chosen by doubling from 2.
///
/// Doubling stops once the last octave adds less than `1e-8` of the
/// accumulated `∫|Q| dt`, or once dividing by the exponentially small `αB`
/// would amplify the quadrature noise of `𝓜u` past a tenth of the quotient;
/// `t_max` is then cut back to the last clean node.
pub fn reconstruct_left_extension_adaptive<U: Fn(f64) -> Result<f64>>(
    u: U,
    alpha: f64,
    dt: f64,
    xs: &[f64],
) -> Result<Reconstruction> {
    check_alpha(alpha)?;
    if !(dt > 0.0 && dt < 1.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "contour spacing must lie in (0, 1)",
        });
    }
    let c = default_abscissa(alpha);
    let samples = log_samples(&u, c)?;
    let noise = samples.noise();
    let quotient_at = |t: f64| -> Result<(Complex64, f64)> {
        let z = Complex64::new(c, t);
        let d = kernel_mellin_closed_form(z, alpha)? * alpha;
        Ok((samples.transform(t) / d, noise / d.norm()))
    };
    // Walk t ≥ 0 (the quotient of a real u is conjugate-symmetric).
    let mut acc = 0.0;
    let mut t_max = 2.0;
    let mut t = 0.0;
    let mut last_clean = 0.0;
    loop {
        let mut octave = 0.0;
        let mut noisy = false;
        while t < t_max - 1e-12 {
            t += dt;
            let (q, err) = quotient_at(t)?;
            if err >= 0.1 * q.norm() {
                noisy = true;
                break;
            }
            last_clean = t;
            octave += q.norm() * dt;
        }
        acc += octave;
        if noisy || octave < 1e-8 * acc || t_max >= 64.0 {
            break;
        }
        t_max *= 2.0;
    }
    let half = (last_clean / dt).round().max(1.0) as usize;
    let line = MellinLine::new(c, half as f64 * dt, 2 * half + 1)?;
    let values = (0..line.n_t)
        .map(|i| Ok(quotient_at(line.t(i))?.0))
        .collect::<Result<Vec<_>>>()?;
    let quotient = MellinSamples::new(line, values, alpha)?;
    // The noise cut, not the decay test, bounds t_max here; record the end
    // values but do not reject on them.
    let mut values = Vec::with_capacity(xs.len());
    let mut max_imag: f64 = 0.0;
    for &x in xs {
        let r = contour_sum(&quotient, x);
        values.push(r.value);
        max_imag = max_imag.max(r.imag.abs());
    }
    Ok(Reconstruction {
        xs: xs.to_vec(),
        values,
        max_imag,
        quotient,
    })
}

fn contour_sum(f: &MellinSamples, x: f64) -> InverseValue {
    let line = f.line;
    let lx = x.ln();
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in f.values.iter().enumerate() {
        let w = if i == 0 || i == line.n_t - 1 { 0.5 } else { 1.0 };
        s += (-line.z(i) * lx).exp() * v * w;
    }
    s *= line.dt() / (2.0 * PI);
    InverseValue {
        value: s.re,
        imag: s.im,
    }
}
