//! Real and complex Gamma / Beta functions.
//!
//! Lanczos approximation (g = 7, nine terms) with the reflection formula for
//! `Re z < 1/2`. Poles are rejected instead of being mapped to infinities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex number; the Mellin variable lives here.
pub type ComplexValue = Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || is_nonpositive_integer(x) {
        return Err(Error::GammaPole { re: x, im: 0.0 });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // Split the power so that t^(x+1/2) does not overflow before e^-t damps it.
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

/// Principal-branch-agnostic `ln Γ(z)`; only `exp` of the result is meaningful
/// up to multiples of `2πi`.
pub fn log_gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() || (z.im == 0.0 && is_nonpositive_integer(z.re)) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - log_gamma_unchecked(one - z);
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// `ln sin(πz)`, evaluated without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = Complex64::new(0.0, 1.0);
    if z.im > 20.0 {
        // sin w = -e^{-iw} (1 - e^{2iw}) / (2i)
        -i * w + Complex64::new(0.5f64.ln(), 0.5 * PI) + (1.0 - (2.0 * i * w).exp()).ln()
    } else if z.im < -20.0 {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + Complex64::new(0.5f64.ln(), -0.5 * PI) + (1.0 - (-2.0 * i * w).exp()).ln()
    } else {
        w.sin().ln()
    }
}

/// Γ(z) for complex `z`.
pub fn gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    Ok(log_gamma_complex(z)?.exp())
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_complex(a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
    let la = log_gamma_complex(a)?;
    let lb = log_gamma_complex(b)?;
    let lab = log_gamma_complex(a + b)?;
    Ok((la + lb - lab).exp())
}

/// Real Beta function on positive arguments.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok(beta_complex(Complex64::new(a, 0.0), Complex64::new(b, 0.0))?.re)
}
