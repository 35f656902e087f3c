//! Linear-fractional self-maps of the unit disk.
//!
//! A map `z -> (a z + b) / (c z + d)` is stored as its coefficient array,
//! normalized so the largest-modulus coefficient equals one. Composition is
//! the matrix product of coefficient arrays.

use std::fmt;
use std::ops::RangeInclusive;

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance of the boundary tests.
pub const BOUNDARY_TOL: f64 = 1e-9;
const DET_TOL: f64 = 1e-14;
const DOUBLE_ROOT_TOL: f64 = 1e-13;
const PARABOLIC_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius<T> {
    coeffs: [Complex<T>; 4],
}

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedPoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Scalar> ExtendedPoint<T> {
    pub fn finite(self) -> Option<Complex<T>> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint<T> {
    pub point: ExtendedPoint<T>,
    pub multiplicity: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiskMapKind {
    Identity,
    EllipticAutomorphism,
    ParabolicAutomorphism,
    HyperbolicAutomorphism,
    ParabolicNonAutomorphism,
    NonAutomorphismBoundaryFixed,
    BoundaryToBoundary,
    StrictlyInterior,
    NotSelfMap,
}

impl DiskMapKind {
    pub fn is_automorphism(self) -> bool {
        matches!(
            self,
            DiskMapKind::Identity
                | DiskMapKind::EllipticAutomorphism
                | DiskMapKind::ParabolicAutomorphism
                | DiskMapKind::HyperbolicAutomorphism
        )
    }

    pub fn is_self_map(self) -> bool {
        self != DiskMapKind::NotSelfMap
    }

    /// Non-automorphism with a fixed point on the circle (parabolic or not).
    pub fn fixes_boundary_point(self) -> bool {
        matches!(
            self,
            DiskMapKind::ParabolicNonAutomorphism | DiskMapKind::NonAutomorphismBoundaryFixed
        )
    }
}

/// Boundary contact data: `gamma` is the boundary fixed point (or the source
/// point of a boundary-to-boundary map), `eta = phi(gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData<T> {
    pub gamma: Complex<T>,
    pub eta: Complex<T>,
    pub derivative: Complex<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskMapClass<T> {
    pub kind: DiskMapKind,
    pub boundary: Option<BoundaryData<T>>,
    pub interior_fixed_point: Option<Complex<T>>,
    /// Supremum of `|phi|` over the circle.
    pub boundary_sup: T,
}

/// Outcome of the bounded search for integer relations among logarithms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogIndependence {
    DependentWithRelation(Vec<i64>),
    IndependentUpToBound(u32),
}

fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

fn unit<T: Scalar>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

fn det2<T: Scalar>(m: &[Complex<T>; 4]) -> Complex<T> {
    m[0] * m[3] - m[1] * m[2]
}

fn matmul2<T: Scalar>(x: &[Complex<T>; 4], y: &[Complex<T>; 4]) -> [Complex<T>; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// Index of the coefficient used for normalization: the first whose modulus is
/// within a relative 1e-9 of the largest, so near-ties resolve stably.
fn pivot_index<T: Scalar>(m: &[Complex<T>; 4]) -> usize {
    let max = m.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let cut = max * (T::one() - T::tol(1e-9));
    m.iter().position(|z| z.norm() >= cut).unwrap_or(0)
}

fn unimodular<T: Scalar>(z: Complex<T>, tol: f64) -> bool {
    (z.norm() - T::one()).abs() <= T::tol(tol)
}

impl<T: Scalar> Moebius<T> {
    /// Builds `z -> (a z + b)/(c z + d)` in canonical form.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        Self::from_array([a, b, c, d])
    }

    pub fn from_array(raw: [Complex<T>; 4]) -> Result<Self> {
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let p = raw[pivot_index(&raw)];
        if p.norm() == T::zero() {
            return Err(Error::SingularMap);
        }
        let coeffs = raw.map(|z| z / p);
        if det2(&coeffs).norm() < T::tol(DET_TOL) {
            return Err(Error::SingularMap);
        }
        Ok(Self { coeffs })
    }

    pub fn identity() -> Self {
        Self {
            coeffs: [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())],
        }
    }

    /// `z -> omega z`.
    pub fn rotation(omega: Complex<T>) -> Result<Self> {
        if !unimodular(omega, 1e-12) {
            return Err(Error::InvalidParameter("rotation factor must be unimodular".into()));
        }
        Self::new(omega, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    /// `z -> r z`, compact for `|r| < 1`.
    pub fn scaling(r: Complex<T>) -> Result<Self> {
        Self::new(r, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    /// Disk automorphism `z -> omega (s - z)/(1 - conj(s) z)`, so that `s = phi^{-1}(0)`.
    pub fn disk_automorphism(omega: Complex<T>, s: Complex<T>) -> Result<Self> {
        if !unimodular(omega, 1e-12) {
            return Err(Error::InvalidParameter("omega must be unimodular".into()));
        }
        if s.norm() >= T::one() {
            return Err(Error::InvalidParameter("s must lie in the open disk".into()));
        }
        Self::new(-omega, omega * s, -s.conj(), c(1.0, 0.0))
    }

    /// The Cayley-type map `z -> (gamma + z)/(gamma - z)` of the disk onto the right half-plane.
    pub fn half_plane_chart(gamma: Complex<T>) -> Result<Self> {
        if !unimodular(gamma, 1e-12) {
            return Err(Error::InvalidParameter("gamma must be unimodular".into()));
        }
        Self::new(c(1.0, 0.0), gamma, c(-1.0, 0.0), gamma)
    }

    /// Parabolic map fixing `gamma`, conjugate to `w -> w + a` on the right half-plane.
    pub fn parabolic(gamma: Complex<T>, a: Complex<T>) -> Result<Self> {
        if !unimodular(gamma, 1e-12) {
            return Err(Error::InvalidParameter("gamma must be unimodular".into()));
        }
        if a.re < T::zero() {
            return Err(Error::InvalidParameter("translation must have Re a >= 0".into()));
        }
        let chart = Self::half_plane_chart(gamma)?;
        let shift = Self::new(c(1.0, 0.0), a, c(0.0, 0.0), c(1.0, 0.0))?;
        chart.inverse()?.compose(&shift.compose(&chart)?)
    }

    /// Automorphism fixing `gamma` and `-gamma` with derivative `t` at `gamma`.
    ///
    /// `z -> ((t+1) z + (1-t) gamma) / ((1-t) conj(gamma) z + (1+t))`; for
    /// `gamma = 1` this is the usual dilation family.
    pub fn psi(gamma: Complex<T>, t: T) -> Result<Self> {
        if !unimodular(gamma, 1e-12) {
            return Err(Error::InvalidParameter("gamma must be unimodular".into()));
        }
        if !(t > T::zero()) || !t.is_finite() {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        let one = T::one();
        let tc = |x: T| Complex::new(x, T::zero());
        Self::new(tc(t + one), gamma * tc(one - t), gamma.conj() * tc(one - t), tc(one + t))
    }

    /// Coefficients `(a, b, c, d)` in canonical form.
    pub fn coefficients(&self) -> [Complex<T>; 4] {
        self.coeffs
    }

    pub fn determinant(&self) -> Complex<T> {
        det2(&self.coeffs)
    }

    /// Evaluates the map; at the pole the result has infinite components.
    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let [a, b, c, d] = self.coeffs;
        let den = c * z + d;
        if den.norm() == T::zero() {
            return Complex::new(T::infinity(), T::infinity());
        }
        (a * z + b) / den
    }

    /// `(ad - bc)/(cz + d)^2`.
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let [_, _, c, d] = self.coeffs;
        let den = c * z + d;
        self.determinant() / (den * den)
    }

    pub fn pole(&self) -> Option<Complex<T>> {
        let [_, _, c, d] = self.coeffs;
        if c.norm() <= T::tol(1e-15) {
            None
        } else {
            Some(-d / c)
        }
    }

    /// `self o inner`, i.e. `z -> self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        Self::from_array(matmul2(&self.coeffs, &inner.coeffs))
    }

    pub fn inverse(&self) -> Result<Self> {
        let [a, b, c, d] = self.coeffs;
        Self::from_array([d, -b, -c, a])
    }

    /// n-th iterate; negative `n` iterates the inverse.
    pub fn iterate(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { *self };
        let mut out = Self::identity();
        for _ in 0..n.unsigned_abs() {
            out = base.compose(&out)?;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Self::identity(), T::tol(1e-12))
    }

    /// Projective equality: coefficient arrays proportional within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let k = pivot_index(&self.coeffs);
        let scale = other.coeffs[k];
        if scale.norm() <= T::tol(1e-12) {
            return false;
        }
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .all(|(x, y)| (*x - *y / scale).norm() <= tol)
    }

    /// Largest coefficient deviation from `other` after projective alignment.
    pub fn distance(&self, other: &Self) -> T {
        let k = pivot_index(&self.coeffs);
        let scale = other.coeffs[k];
        if scale.norm() == T::zero() {
            return T::infinity();
        }
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(x, y)| (*x - *y / scale).norm())
            .fold(T::zero(), T::max)
    }

    /// Roots of `c z^2 + (d - a) z - b = 0` on the Riemann sphere.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint<T>>> {
        if self.is_identity() {
            return Err(Error::IdentityMap);
        }
        let [a, b, c, d] = self.coeffs;
        let zero = T::zero();
        let small = T::tol(1e-14);
        let p = d - a;
        if c.norm() <= small {
            // The point at infinity is fixed.
            if p.norm() <= small {
                return Ok(vec![FixedPoint { point: ExtendedPoint::Infinity, multiplicity: 2 }]);
            }
            return Ok(vec![
                FixedPoint { point: ExtendedPoint::Finite(b / p), multiplicity: 1 },
                FixedPoint { point: ExtendedPoint::Infinity, multiplicity: 1 },
            ]);
        }
        let four = Complex::new(T::lit(4.0), zero);
        let disc = p * p + four * b * c;
        if disc.norm() <= T::tol(DOUBLE_ROOT_TOL) {
            let two = Complex::new(T::lit(2.0), zero);
            return Ok(vec![FixedPoint { point: ExtendedPoint::Finite(-p / (two * c)), multiplicity: 2 }]);
        }
        let mut s = disc.sqrt();
        if (p + s).norm() < (p - s).norm() {
            s = -s;
        }
        let q = -(p + s) * Complex::new(T::lit(0.5), zero);
        let z1 = q / c;
        let z2 = if q.norm() > zero { -b / q } else { (-p - q) / c };
        let mut out = vec![
            FixedPoint { point: ExtendedPoint::Finite(z1), multiplicity: 1 },
            FixedPoint { point: ExtendedPoint::Finite(z2), multiplicity: 1 },
        ];
        // Deterministic order: by modulus, then argument.
        out.sort_by(|x, y| {
            let (zx, zy) = (x.point.finite().unwrap(), y.point.finite().unwrap());
            zx.norm()
                .partial_cmp(&zy.norm())
                .unwrap()
                .then(zx.arg().partial_cmp(&zy.arg()).unwrap())
        });
        Ok(out)
    }

    /// `(sup, max | |phi| - 1 |)` over the circle, from the image circle with
    /// center `(b conj(d) - a conj(c)) / (|d|^2 - |c|^2)` and radius
    /// `|ad - bc| / | |d|^2 - |c|^2 |`.
    fn boundary_scan(&self) -> (T, T) {
        let [a, b, c, d] = self.coeffs;
        let den = d.norm_sqr() - c.norm_sqr();
        if den.abs() <= T::tol(1e-15) * (d.norm_sqr() + c.norm_sqr()) {
            return (T::infinity(), T::infinity());
        }
        let center = (b * d.conj() - a * c.conj()) / den;
        let radius = det2(&self.coeffs).norm() / den.abs();
        let sup = center.norm() + radius;
        let inf = (center.norm() - radius).abs();
        let one = T::one();
        (sup, (sup - one).abs().max((inf - one).abs()))
    }

    /// Whether the map sends the disk into itself (pole outside the closed disk
    /// and boundary supremum at most `1 + 1e-9`).
    pub fn is_self_map(&self) -> bool {
        if let Some(p) = self.pole() {
            if p.norm() <= T::one() + T::tol(1e-12) {
                return false;
            }
        }
        self.boundary_scan().0 <= T::one() + T::tol(BOUNDARY_TOL)
    }

    pub fn is_automorphism(&self) -> bool {
        self.classify().kind.is_automorphism()
    }

    pub fn classify(&self) -> DiskMapClass<T> {
        let tol = T::tol(BOUNDARY_TOL);
        let one = T::one();
        let mut class = DiskMapClass {
            kind: DiskMapKind::NotSelfMap,
            boundary: None,
            interior_fixed_point: None,
            boundary_sup: T::zero(),
        };
        if self.is_identity() {
            class.kind = DiskMapKind::Identity;
            class.boundary_sup = one;
            return class;
        }
        if let Some(p) = self.pole() {
            if p.norm() <= one + T::tol(1e-12) {
                class.boundary_sup = T::infinity();
                return class;
            }
        }
        let (sup, dev) = self.boundary_scan();
        class.boundary_sup = sup;
        if sup > one + tol {
            return class;
        }
        let fixed = self.fixed_points().unwrap_or_default();
        let boundary_fixed: Vec<FixedPoint<T>> = fixed
            .iter()
            .copied()
            .filter(|f| f.point.finite().is_some_and(|z| unimodular(z, BOUNDARY_TOL)))
            .collect();
        class.interior_fixed_point = fixed
            .iter()
            .filter_map(|f| f.point.finite())
            .find(|z| z.norm() < one - tol);

        if dev < tol {
            if class.interior_fixed_point.is_some() {
                class.kind = DiskMapKind::EllipticAutomorphism;
                return class;
            }
            match boundary_fixed.as_slice() {
                [f] if f.multiplicity == 2 => {
                    let g = f.point.finite().unwrap();
                    class.kind = DiskMapKind::ParabolicAutomorphism;
                    class.boundary = Some(BoundaryData { gamma: g, eta: g, derivative: self.derivative(g) });
                }
                [f1, f2] => {
                    // Report the fixed point where the derivative exceeds one.
                    let (g1, g2) = (f1.point.finite().unwrap(), f2.point.finite().unwrap());
                    let (d1, d2) = (self.derivative(g1), self.derivative(g2));
                    let (g, d) = if d1.re >= d2.re { (g1, d1) } else { (g2, d2) };
                    class.kind = DiskMapKind::HyperbolicAutomorphism;
                    class.boundary = Some(BoundaryData { gamma: g, eta: g, derivative: d });
                }
                _ => class.kind = DiskMapKind::EllipticAutomorphism,
            }
            return class;
        }

        if sup < one - tol {
            class.kind = DiskMapKind::StrictlyInterior;
            return class;
        }
        if let Some(f) = boundary_fixed.first() {
            let g = f.point.finite().unwrap();
            let d = self.derivative(g);
            class.kind = if (d - Complex::new(one, T::zero())).norm() < T::tol(PARABOLIC_TOL) {
                DiskMapKind::ParabolicNonAutomorphism
            } else {
                DiskMapKind::NonAutomorphismBoundaryFixed
            };
            class.boundary = Some(BoundaryData { gamma: g, eta: g, derivative: d });
            return class;
        }
        if let Some((gamma, eta)) = self.boundary_contact() {
            class.kind = DiskMapKind::BoundaryToBoundary;
            class.boundary = Some(BoundaryData { gamma, eta, derivative: self.derivative(gamma) });
        } else {
            class.kind = DiskMapKind::StrictlyInterior;
        }
        class
    }

    /// For a non-automorphism touching the circle: the image circle of the
    /// boundary is internally tangent at `eta`; returns `(phi^{-1}(eta), eta)`.
    fn boundary_contact(&self) -> Option<(Complex<T>, Complex<T>)> {
        let third = T::TAU() / T::lit(3.0);
        let p: Vec<Complex<T>> = (0..3).map(|k| self.apply(unit(third * T::lit(k as f64)))).collect();
        let center = circumcenter(p[0], p[1], p[2])?;
        if center.norm() <= T::tol(1e-12) {
            return None;
        }
        let eta = center / center.norm();
        let gamma = self.inverse().ok()?.apply(eta);
        Some((gamma / gamma.norm(), eta))
    }

    /// `phi^n(z0)` for `n` in `range`. Negative powers need an automorphism.
    pub fn orbit(&self, z0: Complex<T>, range: RangeInclusive<i64>) -> Result<Vec<Complex<T>>> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo > hi {
            return Ok(Vec::new());
        }
        let inverse = if lo < 0 {
            if !self.is_automorphism() {
                return Err(Error::NotAutomorphism);
            }
            Some(self.inverse()?)
        } else {
            None
        };
        let mut forward = vec![z0];
        for _ in 0..hi.max(0) {
            forward.push(self.apply(*forward.last().unwrap()));
        }
        let mut backward = vec![z0];
        if let Some(inv) = inverse {
            for _ in 0..(-lo) {
                backward.push(inv.apply(*backward.last().unwrap()));
            }
        }
        Ok((lo..=hi)
            .map(|n| if n >= 0 { forward[n as usize] } else { backward[(-n) as usize] })
            .collect())
    }
}

fn circumcenter<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Option<Complex<T>> {
    let two = T::lit(2.0);
    let d = two * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() <= T::tol(1e-15) {
        return None;
    }
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    Some(Complex::new(ux, uy))
}

/// First pair `(i, j)`, `i < j`, of points linearly independent over the reals.
pub fn r_independent_pair<T: Scalar>(points: &[Complex<T>]) -> Option<(usize, usize)> {
    let tol = T::tol(1e-10);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if (points[i].conj() * points[j]).im.abs() > tol {
                return Some((i, j));
            }
        }
    }
    None
}

/// Bounded search for a nonzero integer vector `m` with `|sum m_i ln t_i| < tol`.
///
/// Vectors are visited in lexicographic order with each component running
/// from `-bound` to `bound`; only vectors whose first nonzero entry is
/// positive are tested, so the reported relation has that sign convention.
pub fn z_log_independence<T: Scalar>(derivatives: &[T], bound: u32, tol: T) -> Result<LogIndependence> {
    if bound == 0 {
        return Err(Error::InvalidParameter("bound must be at least 1".into()));
    }
    if derivatives.is_empty() {
        return Err(Error::InvalidParameter("no derivatives given".into()));
    }
    for &t in derivatives {
        if !(t > T::zero()) || (t - T::one()).abs() <= T::tol(1e-12) {
            return Err(Error::InvalidParameter(format!("derivative {t} must be positive and differ from 1")));
        }
    }
    let logs: Vec<T> = derivatives.iter().map(|t| t.ln()).collect();
    let b = bound as i64;
    let n = logs.len();
    let mut m = vec![-b; n];
    loop {
        if let Some(first) = m.iter().find(|&&x| x != 0) {
            if *first > 0 {
                let s = m.iter().zip(&logs).fold(T::zero(), |acc, (&k, &l)| acc + T::lit(k as f64) * l);
                if s.abs() < tol {
                    return Ok(LogIndependence::DependentWithRelation(m));
                }
            }
        }
        // Odometer increment, last component fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(LogIndependence::IndependentUpToBound(bound));
            }
            i -= 1;
            if m[i] < b {
                m[i] += 1;
                break;
            }
            m[i] = -b;
        }
    }
}

impl<T: Scalar> Default for Moebius<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> fmt::Display for Moebius<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coeffs;
        write!(f, "z -> ({a} z + {b}) / ({c} z + {d})")
    }
}

impl<T: Scalar> Serialize for Moebius<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let arr: [[T; 2]; 4] = self.coeffs.map(|z| [z.re, z.im]);
        arr.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Moebius<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let arr = <[[T; 2]; 4]>::deserialize(d)?;
        Moebius::from_array(arr.map(|[re, im]| Complex::new(re, im))).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Moebius<f64>;
    type C = Complex<f64>;

    fn cx(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn psi_group_law_example() {
        let one = cx(1.0, 0.0);
        let lhs = M::psi(one, 2.0).unwrap().compose(&M::psi(one, 3.0).unwrap()).unwrap();
        assert!(lhs.approx_eq(&M::psi(one, 6.0).unwrap(), 1e-12));
    }

    #[test]
    fn parabolic_semigroup_example() {
        let one = cx(1.0, 0.0);
        let lhs = M::parabolic(one, cx(1.0, 1.0)).unwrap().compose(&M::parabolic(one, cx(2.0, 0.0)).unwrap()).unwrap();
        assert!(lhs.approx_eq(&M::parabolic(one, cx(3.0, 1.0)).unwrap(), 1e-12));
    }

    #[test]
    fn compose_with_identity() {
        let m = M::psi(cx(0.0, 1.0), 3.0).unwrap();
        assert!(M::identity().compose(&m).unwrap().approx_eq(&m, 1e-14));
        assert!(m.compose(&M::identity()).unwrap().approx_eq(&m, 1e-14));
    }

    #[test]
    fn compose_matches_pointwise() {
        let f = M::psi(cx(0.6, 0.8), 1.7).unwrap();
        let g = M::parabolic(cx(0.0, -1.0), cx(0.5, 0.2)).unwrap();
        let h = f.compose(&g).unwrap();
        for k in 0..64 {
            let z = cx(0.9, 0.0) * C::from_polar(1.0, k as f64 * 0.1);
            assert!((h.apply(z) - f.apply(g.apply(z))).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_coefficients_rejected() {
        assert_eq!(M::new(cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0), cx(4.0, 0.0)), Err(Error::SingularMap));
    }

    #[test]
    fn inverses() {
        assert!(M::identity().inverse().unwrap().is_identity());
        let w = C::from_polar(1.0, 0.7);
        let r = M::rotation(w).unwrap().inverse().unwrap();
        assert!(r.approx_eq(&M::rotation(w.conj()).unwrap(), 1e-14));
        let psi = M::psi(cx(1.0, 0.0), 2.0).unwrap();
        let inv = psi.inverse().unwrap();
        assert!(inv.approx_eq(&M::psi(cx(1.0, 0.0), 0.5).unwrap(), 1e-12));
        assert!(psi.compose(&inv).unwrap().is_identity());
    }

    #[test]
    fn parabolic_closed_form() {
        // Conjugating w -> w + a by the half-plane chart gives
        // z -> ((2 - a) z + gamma a) / (-conj(gamma) a z + 2 + a).
        let gamma = C::from_polar(1.0, 0.3);
        let a = cx(2.0, 0.0);
        let m = M::parabolic(gamma, a).unwrap();
        let closed = M::new(cx(2.0, 0.0) - a, gamma * a, -gamma.conj() * a, cx(2.0, 0.0) + a).unwrap();
        assert!(m.approx_eq(&closed, 1e-13));
        let at_one = M::parabolic(cx(1.0, 0.0), cx(2.0, 0.0)).unwrap();
        for k in 0..100 {
            let z = C::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 100.0);
            assert!((at_one.apply(z) - 1.0 / (2.0 - z)).norm() < 1e-12);
        }
    }

    #[test]
    fn parabolic_zero_is_identity_and_fixes_gamma() {
        assert!(M::parabolic(cx(1.0, 0.0), cx(0.0, 0.0)).unwrap().is_identity());
        let rho = M::parabolic(cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        assert!((rho.apply(cx(1.0, 0.0)) - cx(1.0, 0.0)).norm() < 1e-14);
        assert!((rho.derivative(cx(1.0, 0.0)) - cx(1.0, 0.0)).norm() < 1e-14);
        assert!(M::parabolic(cx(2.0, 0.0), cx(1.0, 0.0)).is_err());
        assert!(M::parabolic(cx(1.0, 0.0), cx(-1.0, 0.0)).is_err());
    }

    #[test]
    fn psi_examples() {
        assert!(M::psi(cx(1.0, 0.0), 1.0).unwrap().is_identity());
        let psi = M::psi(cx(1.0, 0.0), 2.0).unwrap();
        let fp = psi.fixed_points().unwrap();
        assert_eq!(fp.len(), 2);
        assert!((fp[0].point.finite().unwrap() - cx(-1.0, 0.0)).norm() < 1e-14 || (fp[1].point.finite().unwrap() - cx(-1.0, 0.0)).norm() < 1e-14);
        assert!((psi.derivative(cx(1.0, 0.0)) - cx(2.0, 0.0)).norm() < 1e-12);
        // Finite-difference derivative at gamma = i for t = 3.
        let g = cx(0.0, 1.0);
        let m = M::psi(g, 3.0).unwrap();
        let h = 1e-6;
        let fd = (m.apply(g * (1.0 + h)) - m.apply(g * (1.0 - h))) / (g * 2.0 * h);
        assert!((fd - cx(3.0, 0.0)).norm() < 1e-6);
        assert!((m.derivative(g) - cx(3.0, 0.0)).norm() < 1e-12);
        assert!(M::psi(cx(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let rho = M::parabolic(cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        let fp = rho.fixed_points().unwrap();
        assert_eq!(fp.len(), 1);
        assert_eq!(fp[0].multiplicity, 2);
        assert!((fp[0].point.finite().unwrap() - cx(1.0, 0.0)).norm() < 1e-7);
        let rot = M::rotation(C::from_polar(1.0, 1.0)).unwrap();
        let fp = rot.fixed_points().unwrap();
        assert_eq!(fp, vec![
            FixedPoint { point: ExtendedPoint::Finite(cx(0.0, 0.0)), multiplicity: 1 },
            FixedPoint { point: ExtendedPoint::Infinity, multiplicity: 1 },
        ]);
        assert_eq!(M::identity().fixed_points(), Err(Error::IdentityMap));
    }

    #[test]
    fn classification_examples() {
        let one = cx(1.0, 0.0);
        let rho = M::parabolic(one, one).unwrap().classify();
        assert_eq!(rho.kind, DiskMapKind::ParabolicNonAutomorphism);
        assert!((rho.boundary.unwrap().gamma - one).norm() < 1e-7);

        let half = M::scaling(cx(0.5, 0.0)).unwrap().classify();
        assert_eq!(half.kind, DiskMapKind::StrictlyInterior);

        let psi = M::psi(one, 2.0).unwrap().classify();
        assert_eq!(psi.kind, DiskMapKind::HyperbolicAutomorphism);
        let b = psi.boundary.unwrap();
        assert!((b.gamma - one).norm() < 1e-12);
        assert!((b.derivative - cx(2.0, 0.0)).norm() < 1e-12);

        assert_eq!(M::parabolic(one, cx(0.0, 1.0)).unwrap().classify().kind, DiskMapKind::ParabolicAutomorphism);
        assert_eq!(M::rotation(cx(0.0, 1.0)).unwrap().classify().kind, DiskMapKind::EllipticAutomorphism);
        assert_eq!(M::disk_automorphism(cx(0.0, 1.0), cx(0.5, 0.0)).unwrap().classify().kind, DiskMapKind::EllipticAutomorphism);
        assert_eq!(M::scaling(cx(2.0, 0.0)).unwrap().classify().kind, DiskMapKind::NotSelfMap);
        assert_eq!(M::new(cx(0.0, 0.0), one, one, cx(0.0, 0.0)).unwrap().classify().kind, DiskMapKind::NotSelfMap);
        assert_eq!(M::identity().classify().kind, DiskMapKind::Identity);
    }

    #[test]
    fn boundary_fixed_with_derivative_two() {
        // w -> w/2 + 1 on the half-plane: fixes gamma = 1 with derivative 2.
        let one = cx(1.0, 0.0);
        let chart = M::half_plane_chart(one).unwrap();
        let w = M::new(cx(0.5, 0.0), one, cx(0.0, 0.0), one).unwrap();
        let phi = chart.inverse().unwrap().compose(&w.compose(&chart).unwrap()).unwrap();
        let cls = phi.classify();
        assert_eq!(cls.kind, DiskMapKind::NonAutomorphismBoundaryFixed);
        assert!((cls.boundary.unwrap().derivative - cx(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn boundary_to_boundary_contact() {
        // -rho_{1,1} sends 1 to -1 and fixes no boundary point.
        let rho = M::parabolic(cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        let phi = M::rotation(cx(-1.0, 0.0)).unwrap().compose(&rho).unwrap();
        let cls = phi.classify();
        assert_eq!(cls.kind, DiskMapKind::BoundaryToBoundary);
        let b = cls.boundary.unwrap();
        assert!((b.gamma - cx(1.0, 0.0)).norm() < 1e-9);
        assert!((b.eta - cx(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn orbit_examples() {
        let w = C::from_polar(1.0, 0.4);
        let rot = M::rotation(w).unwrap();
        assert!(rot.orbit(cx(0.0, 0.0), -3..=3).unwrap().iter().all(|z| z.norm() == 0.0));

        let (omega, s) = (cx(0.0, 1.0), cx(0.5, 0.0));
        let phi = M::disk_automorphism(omega, s).unwrap();
        let orb = phi.orbit(cx(0.0, 0.0), 1..=2).unwrap();
        let expected2 = omega * s * (cx(1.0, 0.0) - omega) / (cx(1.0, 0.0) - omega * s.norm_sqr());
        assert!((orb[0] - omega * s).norm() < 1e-14);
        assert!((orb[1] - expected2).norm() < 1e-14);

        // 1 repels under psi_{1,2}, so the orbit of 0 runs down towards -1;
        // the inverse map pushes it up towards 1.
        let psi = M::psi(cx(1.0, 0.0), 2.0).unwrap();
        let orb = psi.orbit(cx(0.0, 0.0), 1..=4).unwrap();
        assert!((orb[0] - cx(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        for w in orb.windows(2) {
            assert!(w[0].im.abs() < 1e-15 && w[1].re < w[0].re && w[1].re > -1.0);
        }
        let orb = psi.orbit(cx(0.0, 0.0), -4..=-1).unwrap();
        for w in orb.windows(2) {
            assert!(w[0].im.abs() < 1e-15 && w[0].re > 0.0 && w[0].re > w[1].re && w[0].re < 1.0);
        }

        let rho = M::parabolic(cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        assert_eq!(rho.orbit(cx(0.0, 0.0), -1..=1), Err(Error::NotAutomorphism));
    }

    #[test]
    fn independent_pairs() {
        assert_eq!(r_independent_pair(&[cx(0.3, 0.0), cx(0.0, 0.4)]), Some((0, 1)));
        assert_eq!(r_independent_pair(&[cx(0.1, 0.0), cx(0.5, 0.0), cx(-0.3, 0.0)]), None);
        let phi = M::disk_automorphism(cx(0.0, 1.0), cx(0.5, 0.0)).unwrap();
        let orb = phi.orbit(cx(0.0, 0.0), 1..=2).unwrap();
        assert_eq!(r_independent_pair(&orb), Some((0, 1)));
    }

    #[test]
    fn log_independence_examples() {
        assert_eq!(z_log_independence(&[2.0, 4.0], 12, 1e-9).unwrap(), LogIndependence::DependentWithRelation(vec![2, -1]));
        let e = std::f64::consts::E;
        assert_eq!(z_log_independence(&[e, e * e], 12, 1e-9).unwrap(), LogIndependence::DependentWithRelation(vec![2, -1]));
        assert!(z_log_independence(&[2.0, 1.0], 3, 1e-9).is_err());
        assert!(z_log_independence(&[-2.0], 3, 1e-9).is_err());
    }

    #[test]
    fn log_independence_two_three_matches_search_oracle() {
        // Oracle: scan every (p, q) pair directly for |p ln2 + q ln3| < tol.
        let (l2, l3) = (2f64.ln(), 3f64.ln());
        let any = (-12i64..=12).any(|p| (-12i64..=12).any(|q| (p, q) != (0, 0) && (p as f64 * l2 + q as f64 * l3).abs() < 1e-9));
        assert!(!any);
        assert_eq!(z_log_independence(&[2.0, 3.0], 12, 1e-9).unwrap(), LogIndependence::IndependentUpToBound(12));
    }

    #[test]
    fn json_round_trip_and_f32() {
        let m = M::psi(cx(0.0, 1.0), 2.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: M = serde_json::from_str(&s).unwrap();
        assert!(m.approx_eq(&back, 1e-15));
        assert!(serde_json::from_str::<M>("[[1,0],[2,0],[2,0],[4,0]]").is_err());

        let m32 = Moebius::<f32>::psi(Complex::new(1.0, 0.0), 2.0).unwrap();
        assert!((m32.derivative(Complex::new(1.0, 0.0)) - Complex::new(2.0, 0.0)).norm() < 1e-5);
        assert_eq!(m32.classify().kind, DiskMapKind::HyperbolicAutomorphism);
    }
}
