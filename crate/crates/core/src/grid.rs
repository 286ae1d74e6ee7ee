//! Uniform grids, tabulated functions and the three half-line extensions.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative tolerance used when matching node positions of two grids.
const ALIGN_TOL: f64 = 1e-9;

/// `n` equal intervals on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    a: f64,
    b: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidGrid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 intervals, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Node `i`. Computed as `a + (b - a) i / n` so that node `i` of a grid and
    /// node `k i` of its `k`-fold refinement coincide bit for bit when `k` is a
    /// power of two.
    pub fn node(&self, i: usize) -> f64 {
        self.a + (self.b - self.a) * i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    /// Index of the node at `x`, if `x` is (up to rounding) a node.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = (x - self.a) / self.h();
        let k = r.round();
        if (r - k).abs() <= ALIGN_TOL * r.abs().max(1.0) && k >= 0.0 && k <= self.n as f64 {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Refinement by an integer factor.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            a: self.a,
            b: self.b,
            n: self.n * factor,
        }
    }

    fn same_spacing(&self, other: &Self) -> bool {
        (self.h() - other.h()).abs() <= ALIGN_TOL * self.h()
    }

    /// Offset, in nodes, of `inner`'s first node inside `self`.
    fn offset_of(&self, inner: &Self) -> Option<usize> {
        if !self.same_spacing(inner) {
            return None;
        }
        let r = (inner.a - self.a) / self.h();
        let k = r.round();
        if (r - k).abs() > ALIGN_TOL * r.abs().max(1.0) || k < 0.0 {
            return None;
        }
        let k = k as usize;
        (k + inner.n <= self.n).then_some(k)
    }
}

/// How a tabulated function continues to the left of its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutsideBehavior {
    /// Zero to the left (killing extension).
    Zero,
    /// Constant equal to the leftmost stored value (sticky extension).
    HoldLeftValue,
    /// Mirror image `f(-x)` of a function stored on `[0, T]`.
    MirrorEven,
    Unspecified,
}

impl OutsideBehavior {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutsideBehavior::Zero => "zero",
            OutsideBehavior::HoldLeftValue => "hold",
            OutsideBehavior::MirrorEven => "mirror",
            OutsideBehavior::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for OutsideBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutsideBehavior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "killing" => Ok(OutsideBehavior::Zero),
            "hold" | "holdleftvalue" | "sticky" => Ok(OutsideBehavior::HoldLeftValue),
            "mirror" | "mirroreven" | "even" => Ok(OutsideBehavior::MirrorEven),
            "unspecified" => Ok(OutsideBehavior::Unspecified),
            other => Err(Error::Parse(format!("unknown outside behavior '{other}'"))),
        }
    }
}

/// A real function tabulated on a uniform grid.
///
/// Stored values are finite, except that node 0 may hold `NaN`: operators
/// that are singular at the origin put that sentinel there.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<f64>,
    outside: OutsideBehavior,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>, outside: OutsideBehavior) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            let sentinel = i == 0 && v.is_nan();
            if !v.is_finite() && !sentinel {
                return Err(Error::NonFinite {
                    x: grid.node(i),
                    value: *v,
                });
            }
        }
        Ok(Self { grid, values, outside })
    }

    pub(crate) fn from_parts(grid: UniformGrid, values: Vec<f64>, outside: OutsideBehavior) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, outside }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outside(&self) -> OutsideBehavior {
        self.outside
    }

    pub fn with_outside(mut self, outside: OutsideBehavior) -> Self {
        self.outside = outside;
        self
    }

    /// Whether node 0 carries the singular-origin sentinel.
    pub fn has_origin_sentinel(&self) -> bool {
        self.values[0].is_nan()
    }

    /// `a f + b g` on a shared grid.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self> {
        if f.grid != g.grid {
            return Err(Error::Incommensurate("linear combination of different grids".into()));
        }
        let values = f.values.iter().zip(&g.values).map(|(x, y)| a * x + b * y).collect();
        Self::new(f.grid, values, f.outside)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|v| c * v).collect(), self.outside)
    }

    /// Writes the tabulated-function text format: a `# a b n outside` header
    /// followed by one `x value` line per node.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {} {} {} {}", self.grid.a, self.grid.b, self.grid.n, self.outside)?;
        for (x, v) in self.grid.nodes().zip(&self.values) {
            writeln!(w, "{x} {v}")?;
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty table".into()))??;
        let fields: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("header must start with '#'".into()))?
            .split_whitespace()
            .collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "header needs 'a b n outside_kind', got '{header}'"
            )));
        }
        let a: f64 = parse_num(fields[0], "a")?;
        let b: f64 = parse_num(fields[1], "b")?;
        let n: usize = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad interval count '{}'", fields[2])))?;
        let outside: OutsideBehavior = fields[3].parse()?;
        let grid = UniformGrid::new(a, b, n)?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(xs), Some(vs), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("expected 'x value', got '{line}'")));
            };
            let x: f64 = parse_num(xs, "x")?;
            let v: f64 = parse_num(vs, "value")?;
            let i = values.len();
            if i > n {
                return Err(Error::Parse(format!("more than {} data lines", n + 1)));
            }
            let expect = grid.node(i);
            if (x - expect).abs() > ALIGN_TOL * expect.abs().max(grid.h()) {
                return Err(Error::Parse(format!(
                    "line {} has x = {x}, expected node {expect}",
                    i + 2
                )));
            }
            values.push(v);
        }
        Self::new(grid, values, outside)
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

/// Tabulates `f` at the grid nodes.
pub fn sample<F: Fn(f64) -> f64>(f: F, grid: UniformGrid) -> Result<SampledFunction> {
    let values: Vec<f64> = grid.nodes().map(&f).collect();
    for (x, v) in grid.nodes().zip(&values) {
        if !v.is_finite() {
            return Err(Error::NonFinite { x, value: *v });
        }
    }
    Ok(SampledFunction::from_parts(grid, values, OutsideBehavior::Unspecified))
}

/// Extends `f`, stored on `[0, T]`, to the window `[-L, T]`.
///
/// The window must share `f`'s spacing and right endpoint. For `MirrorEven`
/// the window may reach at most to `-T` so that mirror nodes are stored nodes.
/// The result declares how it continues beyond `-L`: zero, the held value
/// `f(0)`, or (for a mirror window reaching `-T`) the constant `f(T)`.
pub fn extend(f: &SampledFunction, kind: OutsideBehavior, window: UniformGrid) -> Result<SampledFunction> {
    let g = f.grid();
    if g.a != 0.0 {
        return Err(Error::NotHalfLine(g.a));
    }
    if (window.b - g.b).abs() > ALIGN_TOL * g.b.abs().max(g.h()) || window.a > 0.0 {
        return Err(Error::Incommensurate(format!(
            "window [{}, {}] does not end at T = {} and contain [0, T]",
            window.a, window.b, g.b
        )));
    }
    let k0 = window.offset_of(g).ok_or_else(|| {
        Error::Incommensurate(format!(
            "window spacing {} / origin offset incompatible with spacing {}",
            window.h(),
            g.h()
        ))
    })?;
    if k0 + g.n != window.n {
        return Err(Error::Incommensurate("window does not end at T".into()));
    }
    if f.has_origin_sentinel() {
        return Err(Error::SingularAtOrigin);
    }
    let vals = f.values();
    let (left, outside): (Vec<f64>, OutsideBehavior) = match kind {
        OutsideBehavior::Zero => (vec![0.0; k0], OutsideBehavior::Zero),
        OutsideBehavior::HoldLeftValue => (vec![vals[0]; k0], OutsideBehavior::HoldLeftValue),
        OutsideBehavior::MirrorEven => {
            if k0 > g.n {
                return Err(Error::Precondition(format!(
                    "mirror window reaches {} beyond -T = {}",
                    window.a, -g.b
                )));
            }
            let outside = if k0 == 0 {
                OutsideBehavior::MirrorEven
            } else if k0 == g.n {
                OutsideBehavior::HoldLeftValue
            } else {
                OutsideBehavior::Unspecified
            };
            ((0..k0).map(|i| vals[k0 - i]).collect(), outside)
        }
        OutsideBehavior::Unspecified => {
            return Err(Error::Precondition("cannot extend with an unspecified behavior".into()))
        }
    };
    let mut values = left;
    values.extend_from_slice(vals);
    Ok(SampledFunction::from_parts(window, values, outside))
}

/// Copies the values of `f` on the aligned sub-window `sub`.
pub fn restrict(f: &SampledFunction, sub: UniformGrid) -> Result<SampledFunction> {
    let k0 = f.grid().offset_of(&sub).ok_or_else(|| {
        Error::Misaligned(format!(
            "[{}, {}] with n = {} inside [{}, {}] with n = {}",
            sub.a,
            sub.b,
            sub.n,
            f.grid().a,
            f.grid().b,
            f.grid().n
        ))
    })?;
    let values = f.values()[k0..=k0 + sub.n].to_vec();
    let outside = if k0 == 0 {
        f.outside()
    } else {
        OutsideBehavior::Unspecified
    };
    Ok(SampledFunction::from_parts(sub, values, outside))
}

/// Integrability exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in [1, inf]",
            })
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::Parse(format!("bad exponent '{s}'")))?;
        Exponent::new(p)
    }
}

/// Order `alpha` together with the regularity / integrability triple `(s, p, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub alpha: f64,
    pub s: f64,
    pub p: Exponent,
    pub beta: f64,
}

impl FracParams {
    pub fn new(alpha: f64, s: f64, p: Exponent, beta: f64) -> Result<Self> {
        crate::error::check_alpha(alpha)?;
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                reason: "must lie in (0, 1]",
            });
        }
        if let Exponent::Finite(pv) = p {
            Exponent::new(pv)?;
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(Self { alpha, s, p, beta })
    }

    /// Parameters with only the order set; `s = beta = 1`, `p = 2`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, Exponent::Finite(2.0), 1.0)
    }

    /// Mapping probes need `alpha < s`.
    pub fn require_mapping(&self) -> Result<()> {
        if self.alpha < self.s {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "mapping probes need alpha < s, got alpha = {}, s = {}",
                self.alpha, self.s
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> UniformGrid {
        UniformGrid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(UniformGrid::new(1.0, 0.0, 4).is_err());
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid::new(0.0, f64::NAN, 4).is_err());
        let g = unit(4);
        assert_eq!(g.len(), 5);
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.node(3), 0.75);
    }

    #[test]
    fn refinement_nodes_coincide() {
        let g = UniformGrid::new(-0.3, 1.7, 96).unwrap();
        let r = g.refined(4);
        for i in 0..=g.intervals() {
            assert_eq!(g.node(i), r.node(4 * i));
        }
    }

    #[test]
    fn sample_examples() {
        let f = sample(|_| 1.0, unit(4)).unwrap();
        assert_eq!(f.values(), &[1.0; 5]);
        let f = sample(|x| x, unit(2)).unwrap();
        assert_eq!(f.values(), &[0.0, 0.5, 1.0]);
        let f = sample(|x| x * x, UniformGrid::new(0.0, 2.0, 2).unwrap()).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 4.0]);
        assert!(matches!(sample(|x| 1.0 / x, unit(2)), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn extension_examples() {
        let f = sample(|x| x, unit(4)).unwrap();
        let window = UniformGrid::new(-1.0, 1.0, 8).unwrap();

        let z = extend(&f, OutsideBehavior::Zero, window).unwrap();
        assert_eq!(&z.values()[..4], &[0.0; 4]);
        assert_eq!(&z.values()[4..], f.values());

        let s = extend(&f, OutsideBehavior::HoldLeftValue, window).unwrap();
        assert_eq!(s.values(), z.values());

        let e = extend(&f, OutsideBehavior::MirrorEven, window).unwrap();
        for (x, v) in window.nodes().zip(e.values()) {
            assert_eq!(*v, x.abs());
        }
        assert_eq!(e.outside(), OutsideBehavior::HoldLeftValue);
    }

    #[test]
    fn extension_errors() {
        let f = sample(|x| x, unit(4)).unwrap();
        let off = UniformGrid::new(-0.9, 1.0, 8).unwrap();
        assert!(matches!(
            extend(&f, OutsideBehavior::Zero, off),
            Err(Error::Incommensurate(_))
        ));
        let wide = UniformGrid::new(-2.0, 1.0, 12).unwrap();
        assert!(extend(&f, OutsideBehavior::MirrorEven, wide).is_err());
        assert!(extend(&f, OutsideBehavior::Zero, wide).is_ok());
        let shifted = sample(|x| x, UniformGrid::new(0.5, 1.0, 4).unwrap()).unwrap();
        assert!(matches!(
            extend(&shifted, OutsideBehavior::Zero, unit(8)),
            Err(Error::NotHalfLine(_))
        ));
    }

    #[test]
    fn restrict_examples() {
        let f = sample(|x| x, unit(4)).unwrap();
        let window = UniformGrid::new(-1.0, 1.0, 8).unwrap();
        for kind in [OutsideBehavior::Zero, OutsideBehavior::MirrorEven] {
            let back = restrict(&extend(&f, kind, window).unwrap(), unit(4)).unwrap();
            assert_eq!(back.values(), f.values());
        }
        let one = sample(|_| 1.0, window).unwrap();
        let sub = UniformGrid::new(-0.5, 0.25, 3).unwrap();
        assert_eq!(restrict(&one, sub).unwrap().values(), &[1.0; 4]);
        let bad = UniformGrid::new(-0.4, 0.25, 3).unwrap();
        assert!(matches!(restrict(&one, bad), Err(Error::Misaligned(_))));
    }

    #[test]
    fn table_round_trip() {
        let f = sample(|x| (3.0 * x).sin() / 7.0, UniformGrid::new(-0.5, 2.0, 10).unwrap())
            .unwrap()
            .with_outside(OutsideBehavior::Zero);
        let mut buf = Vec::new();
        f.write_table(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# -0.5 2 10 zero\n"));
        let g = SampledFunction::read_table(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn table_rejects_garbage() {
        assert!(SampledFunction::read_table("0 1 2 zero\n".as_bytes()).is_err());
        assert!(SampledFunction::read_table("# 0 1 2 zero\n0 1\n0.5 1\n".as_bytes()).is_err());
        assert!(SampledFunction::read_table("# 0 1 2 zero\n0 1\n0.7 1\n1 1\n".as_bytes()).is_err());
        assert!(SampledFunction::read_table("# 0 1 2 sideways\n0 1\n0.5 1\n1 1\n".as_bytes()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(FracParams::new(0.5, 0.6, Exponent::Finite(2.0), 0.5).is_ok());
        assert!(matches!(FracParams::with_alpha(1.5), Err(Error::AlphaOutOfRange(_))));
        assert!(FracParams::new(0.5, 0.0, Exponent::Finite(2.0), 0.5).is_err());
        assert!(FracParams::new(0.5, 0.6, Exponent::Finite(0.5), 0.5).is_err());
        let p = FracParams::new(0.7, 0.6, Exponent::Infinity, 1.0).unwrap();
        assert!(p.require_mapping().is_err());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
    }
}
