//! Finitely supported complex-valued functions on the integers, seeded
//! generators for structured and random test signals, the dilation/embedding
//! map used by the rescaling pipeline, and CSV/JSON persistence.
//!
//! A [`Series`] stores values on a contiguous window and is semantically zero
//! outside it.  Series are immutable after construction and freely shareable
//! across threads.

use crate::numeric::{e, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use thiserror::Error;

/// Slack allowed on `|value| ≤ 1` for series declared 1-bounded, absorbing
/// rounding from transcendental evaluation.
pub const BOUNDEDNESS_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series window is empty")]
    EmptyWindow,
    #[error("series value at n = {n} has modulus {modulus:.6}, above the 1-bounded limit")]
    ValueOutOfBounds { n: i64, modulus: f64 },
    #[error("series value at n = {n} is not finite")]
    NonFinite { n: i64 },
    #[error("dilation scalar / progression step must be nonzero")]
    ZeroDilation,
    #[error("dilation requires 0 < |a_i| ≤ a, got a_i = {a_i}, a = {a}")]
    DilationOutOfRange { a_i: i64, a: i64 },
    #[error("series has support at n = {n}, outside the required window [{lo}, {hi}]")]
    SupportOutOfRange { n: i64, lo: i64, hi: i64 },
    #[error("window bound {n} overflows the representable index range")]
    WindowOverflow { n: i64 },
    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("row {line} has n = {n}, not increasing over previous {prev}")]
    NonIncreasingIndex { line: usize, n: i64, prev: i64 },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

/// A finitely supported function `Z → C`: values on a contiguous window,
/// zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    support_start: i64,
    values: Vec<Complex64>,
    label: String,
    bounded: bool,
}

impl Series {
    /// A series from explicit values; no boundedness is claimed.
    pub fn new(
        support_start: i64,
        values: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::EmptyWindow);
        }
        let end = support_start
            .checked_add(values.len() as i64 - 1)
            .ok_or(SeriesError::WindowOverflow { n: support_start })?;
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(SeriesError::NonFinite {
                    n: support_start + i as i64,
                });
            }
        }
        let _ = end;
        Ok(Self {
            support_start,
            values,
            label: label.into(),
            bounded: false,
        })
    }

    /// A series declared 1-bounded; every value must satisfy
    /// `|value| ≤ 1 + BOUNDEDNESS_SLACK`.
    pub fn new_bounded(
        support_start: i64,
        values: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        let mut series = Series::new(support_start, values, label)?;
        series.declare_bounded()?;
        Ok(series)
    }

    /// Marks the series 1-bounded after validating its values.
    pub fn declare_bounded(&mut self) -> Result<(), SeriesError> {
        for (n, v) in self.support_points() {
            let modulus = v.norm();
            if modulus > 1.0 + BOUNDEDNESS_SLACK {
                return Err(SeriesError::ValueOutOfBounds { n, modulus });
            }
        }
        self.bounded = true;
        Ok(())
    }

    /// Whether the series was validated as 1-bounded.
    pub fn is_declared_bounded(&self) -> bool {
        self.bounded
    }

    /// The stored window `[start, end]`, inclusive.
    pub fn window(&self) -> (i64, i64) {
        (
            self.support_start,
            self.support_start + self.values.len() as i64 - 1,
        )
    }

    /// Number of stored points.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructors reject empty windows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The value at `n`, zero outside the stored window.
    pub fn value(&self, n: i64) -> Complex64 {
        let (lo, hi) = self.window();
        if n < lo || n > hi {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(n - lo) as usize]
        }
    }

    /// Raw window values in index order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(n, value)` pairs over the stored window.
    pub fn support_points(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let start = self.support_start;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (start + i as i64, v))
    }

    /// The smallest window containing all nonzero values, or `None` for the
    /// zero series.
    pub fn nonzero_hull(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| v.norm_sqr() != 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() != 0.0)?;
        Some((
            self.support_start + first as i64,
            self.support_start + last as i64,
        ))
    }

    /// A copy trimmed to its nonzero hull (the zero series trims to a single
    /// zero at the window start, keeping the no-empty-window invariant).
    pub fn trimmed(&self) -> Series {
        match self.nonzero_hull() {
            None => Series {
                support_start: self.support_start,
                values: vec![Complex64::new(0.0, 0.0)],
                label: self.label.clone(),
                bounded: self.bounded,
            },
            Some((lo, hi)) => Series {
                support_start: lo,
                values: ((lo - self.support_start) as usize..=(hi - self.support_start) as usize)
                    .map(|i| self.values[i])
                    .collect(),
                label: self.label.clone(),
                bounded: self.bounded,
            },
        }
    }

    /// `n ↦ e(θn)·f(n)` on the same window.  Preserves declared boundedness
    /// (the modulation has unit modulus).
    pub fn modulate(&self, theta: f64) -> Series {
        let values = self
            .support_points()
            .map(|(n, v)| e(theta * n as f64) * v)
            .collect();
        Series {
            support_start: self.support_start,
            values,
            label: format!("modulate({}, {})", self.label, theta),
            bounded: self.bounded,
        }
    }

    /// Pointwise product with the indicator of `[lo, hi]`.
    pub fn restricted(&self, lo: i64, hi: i64) -> Result<Series, SeriesError> {
        if lo > hi {
            return Err(SeriesError::EmptyWindow);
        }
        let values = (lo..=hi).map(|n| self.value(n)).collect();
        Ok(Series {
            support_start: lo,
            values,
            label: format!("{}|[{},{}]", self.label, lo, hi),
            bounded: self.bounded,
        })
    }
}

/// An arithmetic progression `{start + k·step : 0 ≤ k < len}` of integers.
///
/// The step may be negative (images of linear forms with negative leading
/// coefficient); `points` enumerates in progression order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: i64,
    pub step: i64,
    pub len: u64,
}

impl Progression {
    pub fn new(start: i64, step: i64, len: u64) -> Self {
        Self { start, step, len }
    }

    pub fn points(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        (0..self.len as i64).map(move |k| self.start + k * self.step)
    }

    pub fn contains(&self, n: i64) -> bool {
        if self.step == 0 {
            return n == self.start && self.len > 0;
        }
        let offset = n - self.start;
        offset % self.step == 0 && {
            let k = offset / self.step;
            k >= 0 && (k as u64) < self.len
        }
    }

    /// The same point set with a positive step.
    pub fn ascending(&self) -> Progression {
        if self.step >= 0 || self.len == 0 {
            *self
        } else {
            Progression {
                start: self.start + (self.len as i64 - 1) * self.step,
                step: -self.step,
                len: self.len,
            }
        }
    }
}

/// Kind-specific parameters of a seeded test-signal generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Constant value (default `1`), e.g. the indicator of the window.
    Constant {
        #[serde(default = "default_constant")]
        value: (f64, f64),
    },
    /// Independent uniform points on the unit circle.
    RandomUnimodular,
    /// Independent uniform signs `±1`.
    RandomPm1,
    /// `n ↦ e(c_1 n + c_2 n² + … + c_d n^d)` for the given coefficients.
    PolynomialPhase { coeffs: Vec<f64> },
    /// `n ↦ e(α·n·⌊β·n⌋)`, a bracket (generalized) phase.
    BracketPhase { alpha: f64, beta: f64 },
    /// Indicator of an arithmetic progression intersected with the window.
    Indicator { start: i64, step: i64 },
}

fn default_constant() -> (f64, f64) {
    (1.0, 0.0)
}

/// A deterministic recipe for a test series: kind plus seed.  Equal specs
/// generate bitwise-identical series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// Short provenance label, e.g. `random_pm1(seed=7)`.
    pub fn label(&self) -> String {
        match &self.kind {
            GeneratorKind::Constant { value } => format!("constant({},{})", value.0, value.1),
            GeneratorKind::RandomUnimodular => format!("random_unimodular(seed={})", self.seed),
            GeneratorKind::RandomPm1 => format!("random_pm1(seed={})", self.seed),
            GeneratorKind::PolynomialPhase { coeffs } => format!("polynomial_phase({coeffs:?})"),
            GeneratorKind::BracketPhase { alpha, beta } => {
                format!("bracket_phase({alpha},{beta})")
            }
            GeneratorKind::Indicator { start, step } => {
                format!("indicator(start={start},step={step})")
            }
        }
    }
}

/// Generates the series described by `spec` on the inclusive window
/// `[lo, hi]`.
///
/// Randomness comes from a ChaCha12 stream seeded with `spec.seed`
/// (`ChaCha12Rng::seed_from_u64`); for each window point in ascending order
/// the generator draws exactly one value (`random::<f64>()` mapped to the
/// unit circle for `random_unimodular`, `random::<bool>()` mapped to `±1`
/// for `random_pm1`).  Deterministic kinds consume no randomness.  All kinds
/// produce 1-bounded output except `constant` with `|value| > 1`.
pub fn generate(spec: &GeneratorSpec, lo: i64, hi: i64) -> Result<Series, SeriesError> {
    if lo > hi {
        return Err(SeriesError::EmptyWindow);
    }
    let len = usize::try_from(hi - lo + 1).map_err(|_| SeriesError::WindowOverflow { n: hi })?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let values: Vec<Complex64> = match &spec.kind {
        GeneratorKind::Constant { value } => {
            vec![Complex64::new(value.0, value.1); len]
        }
        GeneratorKind::RandomUnimodular => (0..len).map(|_| e(rng.random::<f64>())).collect(),
        GeneratorKind::RandomPm1 => (0..len)
            .map(|_| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(sign, 0.0)
            })
            .collect(),
        GeneratorKind::PolynomialPhase { coeffs } => (lo..=hi)
            .map(|n| {
                let x = n as f64;
                let mut phase = 0.0;
                let mut power = x;
                for &c in coeffs {
                    // Reduce each term mod 1 before accumulating: only the
                    // fractional part matters to e(·), and n^d at large n
                    // would otherwise burn all of f64's precision on the
                    // integer part.
                    phase += (c * power).fract();
                    power *= x;
                }
                e(phase)
            })
            .collect(),
        GeneratorKind::BracketPhase { alpha, beta } => (lo..=hi)
            .map(|n| {
                let x = n as f64;
                e((alpha * x * (beta * x).floor()).fract())
            })
            .collect(),
        GeneratorKind::Indicator { start, step } => {
            if *step == 0 {
                return Err(SeriesError::ZeroDilation);
            }
            (lo..=hi)
                .map(|n| {
                    let hit = (n - start).rem_euclid(*step) == 0;
                    Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0)
                })
                .collect()
        }
    };
    let mut series = Series::new(lo, values, spec.label())?;
    if series.declare_bounded().is_err() {
        // Only reachable for constant values beyond the unit disc: the
        // series is still valid, just not declared 1-bounded.
        series.bounded = false;
    }
    Ok(series)
}

/// The rescaling embedding: from `f` on `[-N, N]` to
/// `f̃(x) = f((x - aN)/a_i)` on the window `[min(1, aN - |a_i|N), 2aN]`.
///
/// `f̃` is supported on the progression `a_i·[-N, N] + aN` and satisfies
/// `f̃(a_i m + aN) = f(m)` for every `m ∈ [-N, N]`; it vanishes at window
/// points off that progression.  The window lower end drops to
/// `aN - |a_i|N ≤ 0` exactly when `|a_i| = a`, so that the extreme image
/// point is kept and the value multiset is preserved.  Declared boundedness
/// is inherited.
pub fn dilate_embed(f: &Series, a_i: i64, a: i64, n: i64) -> Result<Series, SeriesError> {
    if a_i == 0 {
        return Err(SeriesError::ZeroDilation);
    }
    if a < a_i.abs() {
        return Err(SeriesError::DilationOutOfRange { a_i, a });
    }
    if n < 1 {
        return Err(SeriesError::EmptyWindow);
    }
    if let Some((lo, hi)) = f.nonzero_hull() {
        if lo < -n || hi > n {
            let bad = if lo < -n { lo } else { hi };
            return Err(SeriesError::SupportOutOfRange {
                n: bad,
                lo: -n,
                hi: n,
            });
        }
    }
    let center = a
        .checked_mul(n)
        .ok_or(SeriesError::WindowOverflow { n: a })?;
    let start = 1.min(center - a_i.abs() * n);
    let end = 2 * center;
    let values: Vec<Complex64> = (start..=end)
        .map(|x| {
            let offset = x - center;
            if offset.rem_euclid(a_i) == 0 {
                let m = offset / a_i;
                if (-n..=n).contains(&m) {
                    return f.value(m);
                }
            }
            Complex64::new(0.0, 0.0)
        })
        .collect();
    Ok(Series {
        support_start: start,
        values,
        label: format!("dilate({}, a_i={}, a={}, N={})", f.label, a_i, a, n),
        bounded: f.bounded,
    })
}

/// The image progression `a_i·[-N, N] + aN` of the dilation map, in
/// evaluation order (`m = -N … N`).
pub fn dilation_image(a_i: i64, a: i64, n: i64) -> Progression {
    Progression::new(a * n - a_i * n, a_i, 2 * n as u64 + 1)
}

/// On-disk formats for series data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    /// Rows `n,re,im` with a header line; indices strictly increasing, gaps
    /// are implicit zeros.
    Csv,
    /// `{"support_start": …, "values": [[re, im], …], "label": …}`.
    Json,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    support_start: i64,
    values: Vec<(f64, f64)>,
    #[serde(default)]
    label: String,
}

/// Writes `f` in the given format.  Floats are written with Rust's shortest
/// round-trip formatting, so write → read is value-exact.
pub fn write_series<W: Write>(
    f: &Series,
    format: SeriesFormat,
    writer: &mut W,
) -> Result<(), SeriesError> {
    match format {
        SeriesFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(["n", "re", "im"])
                .map_err(csv_io_error)?;
            for (n, v) in f.support_points() {
                w.write_record([n.to_string(), v.re.to_string(), v.im.to_string()])
                    .map_err(csv_io_error)?;
            }
            w.flush()?;
        }
        SeriesFormat::Json => {
            let payload = SeriesJson {
                support_start: f.support_start,
                values: f.values.iter().map(|v| (v.re, v.im)).collect(),
                label: f.label.clone(),
            };
            serde_json::to_writer_pretty(writer, &payload)?;
        }
    }
    Ok(())
}

fn csv_io_error(err: csv::Error) -> SeriesError {
    SeriesError::Io(std::io::Error::other(err))
}

/// Reads a series.  `declare_bounded` additionally enforces the 1-bounded
/// policy and marks the result accordingly.
pub fn read_series<R: Read>(
    format: SeriesFormat,
    reader: R,
    declare_bounded: bool,
) -> Result<Series, SeriesError> {
    let mut series = match format {
        SeriesFormat::Csv => read_csv(reader)?,
        SeriesFormat::Json => {
            let payload: SeriesJson = serde_json::from_reader(reader)?;
            let label = if payload.label.is_empty() {
                "json".to_string()
            } else {
                payload.label
            };
            Series::new(
                payload.support_start,
                payload
                    .values
                    .iter()
                    .map(|&(re, im)| Complex64::new(re, im))
                    .collect(),
                label,
            )?
        }
    };
    if declare_bounded {
        series.declare_bounded()?;
    }
    Ok(series)
}

fn read_csv<R: Read>(reader: R) -> Result<Series, SeriesError> {
    let buffered = BufReader::new(reader);
    let mut points: Vec<(i64, Complex64)> = Vec::new();
    for (index, line) in buffered.lines().enumerate() {
        let line = line?;
        let row = line.trim();
        if row.is_empty() {
            continue;
        }
        if index == 0 && row.starts_with('n') {
            continue; // header
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(SeriesError::MalformedRow {
                line: index + 1,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let n: i64 = fields[0].parse().map_err(|_| SeriesError::MalformedRow {
            line: index + 1,
            reason: format!("bad index {:?}", fields[0]),
        })?;
        let re: f64 = fields[1].parse().map_err(|_| SeriesError::MalformedRow {
            line: index + 1,
            reason: format!("bad real part {:?}", fields[1]),
        })?;
        let im: f64 = fields[2].parse().map_err(|_| SeriesError::MalformedRow {
            line: index + 1,
            reason: format!("bad imaginary part {:?}", fields[2]),
        })?;
        if !re.is_finite() || !im.is_finite() {
            return Err(SeriesError::NonFinite { n });
        }
        if let Some(&(prev, _)) = points.last() {
            if n <= prev {
                return Err(SeriesError::NonIncreasingIndex {
                    line: index + 1,
                    n,
                    prev,
                });
            }
        }
        points.push((n, Complex64::new(re, im)));
    }
    let Some(&(first, _)) = points.first() else {
        return Err(SeriesError::EmptyWindow);
    };
    let last = points.last().expect("nonempty").0;
    let mut values = vec![Complex64::new(0.0, 0.0); (last - first + 1) as usize];
    for (n, v) in points {
        values[(n - first) as usize] = v;
    }
    Series::new(first, values, "csv")
}

/// Convenience wrappers over [`write_series`]/[`read_series`] for paths.
pub fn write_series_file(
    f: &Series,
    format: SeriesFormat,
    path: impl AsRef<Path>,
) -> Result<(), SeriesError> {
    let mut file = std::fs::File::create(path)?;
    write_series(f, format, &mut file)
}

pub fn read_series_file(
    format: SeriesFormat,
    path: impl AsRef<Path>,
    declare_bounded: bool,
) -> Result<Series, SeriesError> {
    let file = std::fs::File::open(path)?;
    read_series(format, file, declare_bounded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::close_c;

    fn pm1(seed: u64, lo: i64, hi: i64) -> Series {
        generate(
            &GeneratorSpec::new(GeneratorKind::RandomPm1, seed),
            lo,
            hi,
        )
        .unwrap()
    }

    #[test]
    fn generators_are_deterministic_and_bounded() {
        for kind in [
            GeneratorKind::Constant { value: (1.0, 0.0) },
            GeneratorKind::RandomUnimodular,
            GeneratorKind::RandomPm1,
            GeneratorKind::PolynomialPhase {
                coeffs: vec![0.0, std::f64::consts::SQRT_2],
            },
            GeneratorKind::BracketPhase {
                alpha: 0.37,
                beta: std::f64::consts::E.fract(),
            },
            GeneratorKind::Indicator { start: 1, step: 3 },
        ] {
            let spec = GeneratorSpec::new(kind, 7);
            let a = generate(&spec, -20, 20).unwrap();
            let b = generate(&spec, -20, 20).unwrap();
            assert_eq!(a.values(), b.values(), "{}", spec.label());
            assert!(a.is_declared_bounded());
            for (_, v) in a.support_points() {
                assert!(v.norm() <= 1.0 + BOUNDEDNESS_SLACK);
            }
        }
    }

    #[test]
    fn polynomial_phase_example() {
        // e(n²/2) at n = 1 is e(1/2) = -1.
        let spec = GeneratorSpec::new(
            GeneratorKind::PolynomialPhase {
                coeffs: vec![0.0, 0.5],
            },
            0,
        );
        let f = generate(&spec, 1, 4).unwrap();
        assert!(close_c(f.value(1), Complex64::new(-1.0, 0.0), 1e-12));
        assert!(close_c(f.value(2), Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn constant_on_positive_window_is_interval_indicator() {
        let f = generate(
            &GeneratorSpec::new(GeneratorKind::Constant { value: (1.0, 0.0) }, 0),
            1,
            10,
        )
        .unwrap();
        assert_eq!(f.window(), (1, 10));
        assert_eq!(f.value(0), Complex64::new(0.0, 0.0));
        assert_eq!(f.value(5), Complex64::new(1.0, 0.0));
        assert_eq!(f.value(11), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn modulate_flips_signs_at_half() {
        let f = pm1(3, 0, 7);
        let g = f.modulate(0.5);
        for (n, v) in f.support_points() {
            let expect = if n.rem_euclid(2) == 0 { v } else { -v };
            assert!(close_c(g.value(n), expect, 1e-12));
        }
        let h = f.modulate(0.0);
        assert_eq!(h.values(), f.values());
    }

    #[test]
    fn dilate_embed_shift_case() {
        // a_i = a = 1 is the pure shift x = m + N.
        let n = 8;
        let f = pm1(11, -n, n);
        let g = dilate_embed(&f, 1, 1, n).unwrap();
        assert_eq!(g.window(), (0, 2 * n));
        for m in -n..=n {
            assert_eq!(g.value(m + n), f.value(m));
        }
    }

    #[test]
    fn dilate_embed_even_indicator_case() {
        // f = 1 on [-N, N], a_i = a = 2: the embedding hits the even points
        // of [0, 4N].
        let n = 8;
        let f = generate(
            &GeneratorSpec::new(GeneratorKind::Constant { value: (1.0, 0.0) }, 0),
            -n,
            n,
        )
        .unwrap();
        let g = dilate_embed(&f, 2, 2, n).unwrap();
        assert_eq!(g.window(), (0, 4 * n));
        for x in 0..=4 * n {
            let expect = if x % 2 == 0 { 1.0 } else { 0.0 };
            assert_eq!(g.value(x).re, expect, "x = {x}");
        }
    }

    #[test]
    fn dilate_embed_pointwise_identity_and_value_multiset() {
        let n = 6;
        let f = generate(
            &GeneratorSpec::new(GeneratorKind::RandomUnimodular, 5),
            -n,
            n,
        )
        .unwrap();
        for (a_i, a) in [(1, 3), (2, 3), (3, 3), (-2, 3), (-3, 3)] {
            let g = dilate_embed(&f, a_i, a, n).unwrap();
            for m in -n..=n {
                assert_eq!(g.value(a_i * m + a * n), f.value(m), "a_i={a_i} m={m}");
            }
            // Off-progression points vanish.
            let image = dilation_image(a_i, a, n);
            for (x, v) in g.support_points() {
                if !image.contains(x) {
                    assert_eq!(v, Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn dilate_embed_rejects_bad_inputs() {
        let f = pm1(1, -4, 4);
        assert!(matches!(
            dilate_embed(&f, 0, 1, 4),
            Err(SeriesError::ZeroDilation)
        ));
        assert!(matches!(
            dilate_embed(&f, 3, 2, 4),
            Err(SeriesError::DilationOutOfRange { .. })
        ));
        assert!(matches!(
            dilate_embed(&f, 1, 1, 3),
            Err(SeriesError::SupportOutOfRange { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let f = generate(
            &GeneratorSpec::new(GeneratorKind::RandomUnimodular, 42),
            -5,
            9,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_series(&f, SeriesFormat::Csv, &mut buf).unwrap();
        let g = read_series(SeriesFormat::Csv, &buf[..], true).unwrap();
        assert_eq!(f.window(), g.window());
        assert_eq!(f.values(), g.values());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let f = pm1(9, 1, 32);
        let mut buf = Vec::new();
        write_series(&f, SeriesFormat::Json, &mut buf).unwrap();
        let g = read_series(SeriesFormat::Json, &buf[..], true).unwrap();
        assert_eq!(f.window(), g.window());
        assert_eq!(f.values(), g.values());
        assert_eq!(g.label(), f.label());
    }

    #[test]
    fn csv_reader_rejects_malformed_input() {
        let err = read_series(SeriesFormat::Csv, "n,re,im\n1,0.5\n".as_bytes(), false);
        assert!(matches!(err, Err(SeriesError::MalformedRow { line: 2, .. })));
        let err = read_series(SeriesFormat::Csv, "n,re,im\n2,1,0\n1,1,0\n".as_bytes(), false);
        assert!(matches!(err, Err(SeriesError::NonIncreasingIndex { .. })));
        let err = read_series(SeriesFormat::Csv, "n,re,im\n1,nan,0\n".as_bytes(), false);
        assert!(matches!(err, Err(SeriesError::NonFinite { n: 1 })));
        let err = read_series(SeriesFormat::Csv, "".as_bytes(), false);
        assert!(matches!(err, Err(SeriesError::EmptyWindow)));
    }

    #[test]
    fn csv_gaps_become_zeros_and_bounded_policy_enforced() {
        let f = read_series(
            SeriesFormat::Csv,
            "n,re,im\n-1,1,0\n2,0,-1\n".as_bytes(),
            true,
        )
        .unwrap();
        assert_eq!(f.window(), (-1, 2));
        assert_eq!(f.value(0), Complex64::new(0.0, 0.0));
        assert_eq!(f.value(2), Complex64::new(0.0, -1.0));

        let err = read_series(SeriesFormat::Csv, "n,re,im\n1,2.5,0\n".as_bytes(), true);
        assert!(matches!(err, Err(SeriesError::ValueOutOfBounds { n: 1, .. })));
        // Same file without the bounded policy parses fine.
        let f = read_series(SeriesFormat::Csv, "n,re,im\n1,2.5,0\n".as_bytes(), false).unwrap();
        assert!(!f.is_declared_bounded());
    }

    #[test]
    fn trimmed_hull_and_restriction() {
        let mut values = vec![Complex64::new(0.0, 0.0); 9];
        values[3] = Complex64::new(1.0, 0.0);
        values[5] = Complex64::new(0.0, 1.0);
        let f = Series::new(-4, values, "sparse").unwrap();
        assert_eq!(f.nonzero_hull(), Some((-1, 1)));
        let t = f.trimmed();
        assert_eq!(t.window(), (-1, 1));
        assert_eq!(t.value(-1), Complex64::new(1.0, 0.0));
        let r = f.restricted(0, 6).unwrap();
        assert_eq!(r.window(), (0, 6));
        assert_eq!(r.value(1), Complex64::new(0.0, 1.0));
        assert_eq!(r.value(-1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn progression_membership_and_ascending() {
        let p = Progression::new(10, -3, 4); // 10, 7, 4, 1
        assert!(p.contains(10) && p.contains(7) && p.contains(1));
        assert!(!p.contains(13) && !p.contains(-2) && !p.contains(8));
        let a = p.ascending();
        assert_eq!(a, Progression::new(1, 3, 4));
        assert_eq!(
            a.points().collect::<Vec<_>>(),
            p.points().rev().collect::<Vec<_>>()
        );
    }

    #[test]
    fn generator_spec_json_shape() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"kind": "random_pm1", "seed": 7}"#).unwrap();
        assert_eq!(spec.kind, GeneratorKind::RandomPm1);
        assert_eq!(spec.seed, 7);
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"kind": "mystery"}"#).is_err());
        let phase: GeneratorSpec =
            serde_json::from_str(r#"{"kind": "polynomial_phase", "coeffs": [0.0, 0.5]}"#).unwrap();
        assert_eq!(phase.seed, 0);
        let round = serde_json::to_string(&phase).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&round).unwrap();
        assert_eq!(back, phase);
    }
}
