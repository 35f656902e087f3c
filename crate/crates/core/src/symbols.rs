//! Continuous functions on the unit circle, sampled on a uniform power-of-two grid.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::Moebius;
use crate::scalar::Scalar;

pub const MIN_GRID_LOG2: u32 = 8;
pub const MAX_GRID_LOG2: u32 = 24;
pub const DEFAULT_GRID_LOG2: u32 = 12;
const ANALYTIC_TOL: f64 = 1e-16;

/// Samples `psi(e^{i theta_k})`, `theta_k = 2 pi k / 2^m`, with their discrete Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSymbol<T> {
    grid_log2: u32,
    samples: Vec<Complex<T>>,
    // Raw DFT divided by the grid size, in FFT order.
    spectrum: Vec<Complex<T>>,
    analytic: bool,
}

fn check_grid(grid_log2: u32) -> Result<usize> {
    if !(MIN_GRID_LOG2..=MAX_GRID_LOG2).contains(&grid_log2) {
        return Err(Error::InvalidParameter(format!(
            "grid_log2 must lie in {MIN_GRID_LOG2}..={MAX_GRID_LOG2}, got {grid_log2}"
        )));
    }
    Ok(1usize << grid_log2)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl<T: Scalar> CircleSymbol<T> {
    pub fn from_samples(grid_log2: u32, samples: Vec<Complex<T>>) -> Result<Self> {
        let n = check_grid(grid_log2)?;
        if samples.len() != n {
            return Err(Error::InvalidParameter(format!("expected {n} samples, got {}", samples.len())));
        }
        if let Some(k) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        let mut spectrum = samples.clone();
        FftPlanner::<T>::new().plan_fft_forward(n).process(&mut spectrum);
        let scale = T::one() / T::lit(n as f64);
        for c in &mut spectrum {
            *c = *c * scale;
        }
        let mut sym = Self { grid_log2, samples, spectrum, analytic: false };
        let neg: T = (1..=sym.coeff_radius() as i64).map(|j| sym.coeff(-j).norm_sqr()).fold(T::zero(), |a, b| a + b);
        sym.analytic = neg < T::tol(ANALYTIC_TOL);
        Ok(sym)
    }

    /// Samples `f` at the grid points `e^{i theta_k}`.
    pub fn from_function(f: impl Fn(Complex<T>) -> Complex<T>, grid_log2: u32) -> Result<Self> {
        Self::from_angle_fn(|t| f(Complex::new(t.cos(), t.sin())), grid_log2)
    }

    /// Samples `f` at the grid angles `theta_k`.
    pub fn from_angle_fn(f: impl Fn(T) -> Complex<T>, grid_log2: u32) -> Result<Self> {
        let n = check_grid(grid_log2)?;
        let step = T::TAU() / T::lit(n as f64);
        Self::from_samples(grid_log2, (0..n).map(|k| f(step * T::lit(k as f64))).collect())
    }

    pub fn constant(value: Complex<T>, grid_log2: u32) -> Result<Self> {
        Self::from_samples(grid_log2, vec![value; check_grid(grid_log2)?])
    }

    pub fn from_spec(spec: &CurveSpec, grid_log2: u32) -> Result<Self> {
        match spec {
            CurveSpec::Circle => Self::power(1, grid_log2),
            CurveSpec::Power { q } => Self::power(*q, grid_log2),
            CurveSpec::CirclePlusSegments { p, q } => Self::circle_plus_segments(*p, *q, grid_log2),
            CurveSpec::Laurent { lowest, coeffs } => {
                let coeffs: Vec<Complex<T>> = coeffs.iter().map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im))).collect();
                Self::from_function(
                    |z| {
                        coeffs
                            .iter()
                            .enumerate()
                            .fold(Complex::new(T::zero(), T::zero()), |acc, (k, c)| acc + *c * z.powi(*lowest + k as i32))
                    },
                    grid_log2,
                )
            }
        }
    }

    /// `z^q` (negative `q` gives powers of the conjugate).
    pub fn power(q: i32, grid_log2: u32) -> Result<Self> {
        let n = check_grid(grid_log2)?;
        let step = T::TAU() / T::lit(n as f64);
        // Reduce the angle index first so equal values are bitwise equal.
        let qm = q.rem_euclid(n as i32) as usize;
        Self::from_samples(
            grid_log2,
            (0..n)
                .map(|k| {
                    let t = step * T::lit(((k * qm) % n) as f64);
                    Complex::new(t.cos(), t.sin())
                })
                .collect(),
        )
    }

    /// Unit circle with `q` radial slits `e^{2 pi i n/q} [1/2, 1]`, traversed at constant speed.
    ///
    /// Piece `n` first runs in and out along the slit at angle `2 pi n / q` and
    /// then along the arc to the next slit. The slit set is the orbit of
    /// `[1/2, 1)` under the rotation by `2 pi p / q`, which needs `gcd(p, q) = 1`.
    pub fn circle_plus_segments(p: u32, q: u32, grid_log2: u32) -> Result<Self> {
        if q == 0 || p == 0 || gcd(p, q) != 1 {
            return Err(Error::InvalidParameter(format!("need p, q >= 1 coprime, got p={p}, q={q}")));
        }
        let half = T::lit(0.5);
        let arc = T::TAU() / T::lit(q as f64);
        let s = T::one() / (T::one() + arc);
        let qt = T::lit(q as f64);
        Self::from_angle_fn(
            |theta| {
                let x = theta / T::TAU() * qt;
                let piece = x.floor();
                let u = x - piece;
                let base = arc * piece;
                if u < s {
                    let v = u / s;
                    let r = half + (v - half).abs();
                    Complex::from_polar(r, base)
                } else {
                    Complex::from_polar(T::one(), base + (u - s) / (T::one() - s) * arc)
                }
            },
            grid_log2,
        )
    }

    pub fn grid_log2(&self) -> u32 {
        self.grid_log2
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn grid_step(&self) -> T {
        T::TAU() / T::lit(self.len() as f64)
    }

    pub fn angle(&self, k: usize) -> T {
        self.grid_step() * T::lit(k as f64)
    }

    /// Largest index `j` with `c(j)` and `c(-j)` both resolved by the grid.
    pub fn coeff_radius(&self) -> usize {
        self.len() / 2 - 1
    }

    /// Fourier coefficient `c(j)`; zero beyond the coefficient radius.
    pub fn coeff(&self, j: i64) -> Complex<T> {
        if j.unsigned_abs() as usize > self.coeff_radius() {
            return Complex::new(T::zero(), T::zero());
        }
        self.spectrum[j.rem_euclid(self.len() as i64) as usize]
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn is_real_valued(&self) -> bool {
        self.samples.iter().all(|z| z.im.abs() <= T::tol(1e-14) * (T::one() + z.re.abs()))
    }

    /// Fourier series evaluated at the angle `theta`.
    pub fn eval_angle(&self, theta: T) -> Complex<T> {
        let r = self.coeff_radius() as i64;
        let w = Complex::new(theta.cos(), theta.sin());
        let wi = w.conj();
        let mut pos = Complex::new(T::zero(), T::zero());
        let mut neg = Complex::new(T::zero(), T::zero());
        // Horner in w and in conj(w).
        for j in (1..=r).rev() {
            pos = (pos + self.coeff(j)) * w;
            neg = (neg + self.coeff(-j)) * wi;
        }
        pos + neg + self.coeff(0)
    }

    /// Largest deviation between the samples and the truncated Fourier series.
    pub fn reconstruction_error(&self) -> T {
        let n = self.len();
        let mut buf: Vec<Complex<T>> = (0..n)
            .map(|k| {
                let j = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                self.coeff(j)
            })
            .collect();
        FftPlanner::<T>::new().plan_fft_inverse(n).process(&mut buf);
        buf.iter().zip(&self.samples).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    }

    /// `f o phi` for a map sending the circle to itself, via the Fourier series of `f`.
    pub fn compose_map(&self, phi: &Moebius<T>) -> Result<Self> {
        let step = self.grid_step();
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let w = phi.apply(Complex::new((step * T::lit(k as f64)).cos(), (step * T::lit(k as f64)).sin()));
            if (w.norm() - T::one()).abs() > T::tol(1e-9) {
                return Err(Error::NotAutomorphism);
            }
            out.push(self.eval_angle(w.arg()));
        }
        Self::from_samples(self.grid_log2, out)
    }

    pub fn map_values(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Result<Self> {
        Self::from_samples(self.grid_log2, self.samples.iter().map(|z| f(*z)).collect())
    }

    pub fn conj(&self) -> Self {
        self.map_values(|z| z.conj()).expect("conjugation keeps samples finite")
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.grid_log2 != other.grid_log2 {
            return Err(Error::InvalidParameter("symbols live on different grids".into()));
        }
        Self::from_samples(self.grid_log2, self.samples.iter().zip(&other.samples).map(|(a, b)| f(*a, *b)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Largest distance between consecutive samples (cyclically).
    pub fn max_sample_gap(&self) -> T {
        let n = self.len();
        (0..n).map(|k| (self.samples[(k + 1) % n] - self.samples[k]).norm()).fold(T::zero(), T::max)
    }

    pub fn distance_to_curve(&self, z: Complex<T>) -> T {
        self.samples.iter().map(|s| (*s - z).norm()).fold(T::infinity(), T::min)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes `theta,re,im` rows, one per sample.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["theta", "re", "im"]).map_err(|e| Error::Format(e.to_string()))?;
        for (k, z) in self.samples.iter().enumerate() {
            wr.write_record([self.angle(k).to_string(), z.re.to_string(), z.im.to_string()])
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads `theta,re,im` rows; a leading header row is skipped, angles must sit on the grid.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            if rec.len() != 3 {
                return Err(Error::Format(format!("row {i}: expected 3 fields, got {}", rec.len())));
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => rows.push(v),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Format(format!("row {i}: {e}"))),
            }
        }
        let n = rows.len();
        if !n.is_power_of_two() {
            return Err(Error::Format(format!("sample count {n} is not a power of two")));
        }
        let grid_log2 = n.trailing_zeros();
        check_grid(grid_log2)?;
        let step = std::f64::consts::TAU / n as f64;
        for (k, row) in rows.iter().enumerate() {
            if (row[0] - step * k as f64).abs() > 1e-6 * step.max(1.0) {
                return Err(Error::Format(format!("row {k}: angle {} is off the uniform grid", row[0])));
            }
        }
        Self::from_samples(grid_log2, rows.iter().map(|r| Complex::new(T::lit(r[1]), T::lit(r[2]))).collect())
    }

    /// Partition of the grid by the transitive closure of `|psi(x) - psi(y)| <= tol`.
    pub fn quotient_classes(&self, tol: T) -> Result<QuotientPartition> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| self.samples[i].re.partial_cmp(&self.samples[j].re).unwrap().then(i.cmp(&j)));
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[pos + 1..] {
                if self.samples[j].re - self.samples[i].re > tol {
                    break;
                }
                if (self.samples[j] - self.samples[i]).norm() <= tol {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut label_of_root = vec![usize::MAX; n];
        let mut class_of = vec![0; n];
        let mut representatives = Vec::new();
        for k in 0..n {
            let r = find(&mut parent, k);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = representatives.len();
                representatives.push(k);
            }
            class_of[k] = label_of_root[r];
        }
        Ok(QuotientPartition { grid_log2: self.grid_log2, class_of, representatives, tol: tol.to_f64().unwrap() })
    }

    /// Winding number of the sampled curve around `lambda`.
    pub fn winding_number(&self, lambda: Complex<T>) -> Result<i64> {
        let dist = self.distance_to_curve(lambda);
        let required = T::lit(10.0) * self.max_sample_gap();
        if !(dist > required) {
            return Err(Error::TooCloseToCurve { distance: dist.to_f64().unwrap(), required: required.to_f64().unwrap() });
        }
        let n = self.len();
        let mut total = T::zero();
        for k in 0..n {
            let a = self.samples[k] - lambda;
            let b = self.samples[(k + 1) % n] - lambda;
            total = total + (b / a).arg();
        }
        let w = total / T::TAU();
        let rounded = w.round();
        if (w - rounded).abs() >= T::lit(0.1) {
            return Err(Error::TooCloseToCurve { distance: dist.to_f64().unwrap(), required: required.to_f64().unwrap() });
        }
        Ok(rounded.to_i64().unwrap())
    }

    /// Sampled form of the sufficient condition for irreducibility of `T_psi`
    /// attached to a set `S` of open arcs.
    ///
    /// Clause (b) ignores pairs joined inside `S` by a stretch of curve of
    /// length at most `2 tol`, since those are close by continuity alone.
    pub fn nordgren_check(&self, arcs: &[OpenArc<T>], tol: T) -> Result<NordgrenVerdict> {
        let n = self.len();
        let total: T = arcs.iter().map(|a| a.length()).fold(T::zero(), |x, y| x + y);
        if arcs.is_empty() || !(total > T::zero()) {
            return Err(Error::InvalidParameter("arcs must have positive total length".into()));
        }
        if arcs.iter().any(|a| !(a.length() > T::zero()) || a.length() > T::TAU()) {
            return Err(Error::InvalidParameter("each arc needs length in (0, 2 pi]".into()));
        }
        let owner: Vec<Option<usize>> = (0..n)
            .map(|k| {
                let t = self.angle(k);
                let hits: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].contains(t)).collect();
                hits.first().copied().map(|i| if hits.len() > 1 { usize::MAX } else { i })
            })
            .collect();
        if owner.contains(&Some(usize::MAX)) {
            return Err(Error::InvalidParameter("arcs must be disjoint".into()));
        }
        if !self.analytic {
            return Ok(NordgrenVerdict::Inconclusive("(a) symbol is not analytic".into()));
        }
        let inside: Vec<usize> = (0..n).filter(|&k| owner[k].is_some()).collect();
        let outside: Vec<usize> = (0..n).filter(|&k| owner[k].is_none()).collect();
        if inside.is_empty() {
            return Ok(NordgrenVerdict::Inconclusive("(b) no grid point lies in the arcs".into()));
        }

        // Arclength position of each inside sample along its run of consecutive inside samples.
        let mut run = vec![usize::MAX; n];
        let mut pos = vec![T::zero(); n];
        let cyclic = outside.is_empty();
        let start = if cyclic { 0 } else { (outside[0] + 1) % n };
        let mut run_id = 0;
        let mut acc = T::zero();
        let mut prev: Option<usize> = None;
        for off in 0..n {
            let k = (start + off) % n;
            if owner[k].is_none() {
                if prev.is_some() {
                    run_id += 1;
                }
                prev = None;
                continue;
            }
            if let Some(p) = prev {
                acc = acc + (self.samples[k] - self.samples[p]).norm();
            } else {
                acc = T::zero();
            }
            run[k] = run_id;
            pos[k] = acc;
            prev = Some(k);
        }
        let loop_len = if cyclic { acc + (self.samples[start] - self.samples[(start + n - 1) % n]).norm() } else { T::zero() };
        let two_tol = tol + tol;
        for (a, &j) in inside.iter().enumerate() {
            for &k in &inside[a + 1..] {
                let d = (self.samples[j] - self.samples[k]).norm();
                if d > tol {
                    continue;
                }
                if run[j] == run[k] {
                    let mut along = (pos[k] - pos[j]).abs();
                    if cyclic {
                        along = along.min(loop_len - along);
                    }
                    if along <= two_tol && d > T::zero() {
                        continue;
                    }
                }
                return Ok(NordgrenVerdict::Inconclusive(format!(
                    "(b) symbol not injective on the arcs: samples {j} and {k} are {:.3e} apart",
                    d.to_f64().unwrap()
                )));
            }
        }
        let mut gap = T::infinity();
        for &j in &inside {
            for &k in &outside {
                gap = gap.min((self.samples[j] - self.samples[k]).norm());
            }
        }
        if gap <= tol {
            return Ok(NordgrenVerdict::Inconclusive(format!(
                "(c) images of the arcs and of their complement are {:.3e} apart, tolerance {:.3e}",
                gap.to_f64().unwrap(),
                tol.to_f64().unwrap()
            )));
        }
        Ok(NordgrenVerdict::SufficientForIrreducibility)
    }

    /// Symmetric Hausdorff distance between `phi(curve)` and the curve.
    pub fn curve_invariance(&self, phi: &Moebius<T>, tol: T) -> Result<CurveInvariance<T>> {
        if let Some(pole) = phi.pole() {
            let d = self.distance_to_curve(pole);
            if d <= tol {
                return Err(Error::PoleOnCurve { distance: d.to_f64().unwrap() });
            }
        }
        let image: Vec<Complex<T>> = self.samples.iter().map(|z| phi.apply(*z)).collect();
        if let Some(k) = image.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        let distance = hausdorff(&image, &self.samples);
        Ok(CurveInvariance { invariant: distance < tol, distance })
    }
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let directed = |x: &[Complex<T>], y: &[Complex<T>]| {
        x.iter()
            .map(|p| y.iter().map(|q| (*p - *q).norm_sqr()).fold(T::infinity(), T::min))
            .fold(T::zero(), T::max)
            .sqrt()
    };
    directed(a, b).max(directed(b, a))
}

/// `z -> z^q / |z|^{q-1}`: raises the argument to the `q`-th power and keeps the modulus.
pub fn orbit_space_map<T: Scalar>(samples: &[Complex<T>], q: u32) -> Result<Vec<Complex<T>>> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    samples
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let r = z.norm();
            if r == T::zero() {
                return Err(Error::ZeroSample(k));
            }
            let zq = z.powu(q);
            if (r - T::one()).abs() <= T::tol(1e-9) {
                Ok(zq)
            } else {
                Ok(zq / r.powi(q as i32 - 1))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveInvariance<T> {
    pub invariant: bool,
    pub distance: T,
}

/// Open arc of angles `(start, end)` traversed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenArc<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> OpenArc<T> {
    pub fn new(start: T, end: T) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> T {
        self.end - self.start
    }

    pub fn contains(&self, theta: T) -> bool {
        let tau = T::TAU();
        let d = theta - self.start;
        let rel = d - (d / tau).floor() * tau;
        rel > T::zero() && rel < self.length()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NordgrenVerdict {
    SufficientForIrreducibility,
    Inconclusive(String),
}

/// Grid partition induced by the values of a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientPartition {
    pub grid_log2: u32,
    /// Class label of each grid index; labels follow the smallest index of each class.
    pub class_of: Vec<usize>,
    /// Smallest grid index of each class.
    pub representatives: Vec<usize>,
    pub tol: f64,
}

impl QuotientPartition {
    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count()];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, label: usize) -> Vec<usize> {
        (0..self.class_of.len()).filter(|&k| self.class_of[k] == label).collect()
    }

    /// Label of the grid point nearest to the unimodular point `gamma`.
    pub fn class_of_point(&self, gamma: Complex<f64>) -> Result<usize> {
        let n = self.class_of.len();
        let step = std::f64::consts::TAU / n as f64;
        let k = ((gamma.arg() / step).round() as i64).rem_euclid(n as i64) as usize;
        let grid_point = Complex::from_polar(1.0, step * k as f64);
        let half_chord = 2.0 * (step / 4.0).sin();
        if (gamma - grid_point).norm() > half_chord * (1.0 + 1e-9) {
            return Err(Error::OffGrid);
        }
        Ok(self.class_of[k])
    }

    /// Whether the partition has only singleton classes.
    pub fn is_trivial(&self) -> bool {
        self.class_count() == self.class_of.len()
    }
}

/// Named parametric curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle,
    Power { q: i32 },
    CirclePlusSegments { p: u32, q: u32 },
    /// `sum_k coeffs[k] z^(lowest + k)`, coefficients as `[re, im]`.
    Laurent { lowest: i32, coeffs: Vec<[f64; 2]> },
}

impl FromStr for CurveSpec {
    type Err = Error;

    /// Parses `circle`, `power q`, `circle_plus_segments p q` or `laurent lowest c0 c1 ...` (real coefficients).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidParameter(format!("unrecognized curve '{s}'"));
        let int = |x: &str| x.parse::<i64>().map_err(|_| bad());
        match parts.as_slice() {
            ["circle"] => Ok(CurveSpec::Circle),
            ["power", q] => Ok(CurveSpec::Power { q: int(q)? as i32 }),
            ["circle_plus_segments", p, q] => Ok(CurveSpec::CirclePlusSegments { p: int(p)? as u32, q: int(q)? as u32 }),
            ["laurent", lowest, rest @ ..] if !rest.is_empty() => {
                let coeffs = rest
                    .iter()
                    .map(|c| c.parse::<f64>().map(|x| [x, 0.0]).map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CurveSpec::Laurent { lowest: int(lowest)? as i32, coeffs })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::Circle => write!(f, "circle"),
            CurveSpec::Power { q } => write!(f, "power {q}"),
            CurveSpec::CirclePlusSegments { p, q } => write!(f, "circle_plus_segments {p} {q}"),
            CurveSpec::Laurent { lowest, coeffs } => {
                write!(f, "laurent {lowest}")?;
                for [re, im] in coeffs {
                    if *im == 0.0 {
                        write!(f, " {re}")?;
                    } else {
                        write!(f, " {re}{im:+}i")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolFile<T> {
    grid_log2: u32,
    samples: Vec<[T; 2]>,
}

impl<T: Scalar> Serialize for CircleSymbol<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolFile { grid_log2: self.grid_log2, samples: self.samples.iter().map(|z| [z.re, z.im]).collect() }.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for CircleSymbol<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SymbolFile::<T>::deserialize(d)?;
        CircleSymbol::from_samples(file.grid_log2, file.samples.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
            .map_err(serde::de::Error::custom)
    }
}
