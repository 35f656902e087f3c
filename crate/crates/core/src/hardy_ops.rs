//! Operators on the Hardy space as truncated matrices in the monomial basis `1, z, z^2, ...`.
//!
//! Expressions are evaluated at a working size `M` and compressed to the
//! leading `N x N` block, which keeps the truncation artefacts of products in
//! the discarded band.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use faer::{Mat, MatRef, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::DiskMapKind;
use crate::{CircleSymbol, MoebiusMap, C64};

pub mod io;

pub type Matrix = Mat<C64>;

pub const DEFAULT_WORKING_FACTOR: usize = 4;
pub const DEFAULT_POLE_MARGIN: f64 = 1e-6;
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Largest working size accepted by `evaluate`.
pub const MAX_WORKING_SIZE: usize = 8192;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Toeplitz matrix `(j, k) -> c(j - k)` of a circle symbol.
pub fn toeplitz_matrix(sym: &CircleSymbol, size: usize) -> Result<Matrix> {
    let available = sym.coeff_radius();
    if size > available {
        return Err(Error::InsufficientCoefficients { needed: size, available });
    }
    Ok(Mat::from_fn(size, size, |j, k| sym.coeff(j as i64 - k as i64)))
}

pub fn composition_matrix(m: &MoebiusMap, size: usize) -> Result<Matrix> {
    composition_matrix_with_margin(m, size, DEFAULT_POLE_MARGIN)
}

/// Matrix of `f -> f o phi`: column `n` holds the leading Taylor coefficients of `phi^n`.
///
/// Multiplying `phi^n = phi^{n-1} (a z + b)/(c z + d)` out by `c z + d` gives
/// `d p_k = b q_k + a q_{k-1} - c p_{k-1}` for the coefficients `p` of
/// `phi^n` and `q` of `phi^{n-1}`. This reproduces the truncated Cauchy
/// product of `phi^{n-1}` with the geometric expansion of `phi` term by term.
pub fn composition_matrix_with_margin(m: &MoebiusMap, size: usize, margin: f64) -> Result<Matrix> {
    if !m.classify().kind.is_self_map() {
        return Err(Error::NotSelfMap);
    }
    let [a, b, c, d] = m.coefficients();
    if let Some(pole) = m.pole() {
        if pole.norm() <= 1.0 + margin {
            return Err(Error::PoleTooClose { modulus: pole.norm() });
        }
    }
    let mut out = Mat::<C64>::zeros(size, size);
    if size == 0 {
        return Ok(out);
    }
    out[(0, 0)] = ONE;
    let mut prev = vec![ZERO; size];
    prev[0] = ONE;
    let mut cur = vec![ZERO; size];
    for n in 1..size {
        for k in 0..size {
            let mut v = b * prev[k];
            if k > 0 {
                v += a * prev[k - 1] - c * cur[k - 1];
            }
            cur[k] = v / d;
        }
        for k in 0..size {
            out[(k, n)] = cur[k];
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(out)
}

/// Expression tree over Hardy-space operators.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpr {
    Identity,
    Scalar(C64),
    Toeplitz(Arc<CircleSymbol>),
    Composition(MoebiusMap),
    Adjoint(Box<OperatorExpr>),
    Product(Vec<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    /// Unitary factor `C (C* C)^{-1/2}` of the composition operator.
    PolarUnitary(MoebiusMap),
    InverseSqrt(Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn toeplitz(sym: CircleSymbol) -> Self {
        OperatorExpr::Toeplitz(Arc::new(sym))
    }

    pub fn composition(m: MoebiusMap) -> Self {
        OperatorExpr::Composition(m)
    }

    pub fn polar_unitary(m: MoebiusMap) -> Self {
        OperatorExpr::PolarUnitary(m)
    }

    pub fn scalar(c: C64) -> Self {
        OperatorExpr::Scalar(c)
    }

    pub fn adjoint(self) -> Self {
        OperatorExpr::Adjoint(Box::new(self))
    }

    pub fn inverse_sqrt(self) -> Self {
        OperatorExpr::InverseSqrt(Box::new(self))
    }

    /// `self * rhs`, flattening nested products.
    pub fn mul(self, rhs: Self) -> Self {
        let mut args = match self {
            OperatorExpr::Product(v) => v,
            e => vec![e],
        };
        match rhs {
            OperatorExpr::Product(v) => args.extend(v),
            e => args.push(e),
        }
        OperatorExpr::Product(args)
    }

    /// `self + rhs`, flattening nested sums.
    pub fn add(self, rhs: Self) -> Self {
        let mut args = match self {
            OperatorExpr::Sum(v) => v,
            e => vec![e],
        };
        match rhs {
            OperatorExpr::Sum(v) => args.extend(v),
            e => args.push(e),
        }
        OperatorExpr::Sum(args)
    }

    pub fn scale(self, c: C64) -> Self {
        OperatorExpr::Scalar(c).mul(self)
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.add(rhs.scale(-ONE))
    }

    /// Checks node arities.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorExpr::Product(v) | OperatorExpr::Sum(v) => {
                if v.len() < 2 {
                    return Err(Error::InvalidParameter("products and sums need at least two operands".into()));
                }
                v.iter().try_for_each(|e| e.validate())
            }
            OperatorExpr::Adjoint(e) | OperatorExpr::InverseSqrt(e) => e.validate(),
            _ => Ok(()),
        }
    }

    /// Evaluates at working size `factor * size` and keeps the leading `size x size` block.
    pub fn evaluate(&self, size: usize, factor: usize) -> Result<TruncatedOperator> {
        evaluate(self, size, factor)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, v: &[OperatorExpr], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        };
        match self {
            OperatorExpr::Identity => write!(f, "I"),
            OperatorExpr::Scalar(c) => write!(f, "{c}"),
            OperatorExpr::Toeplitz(s) => write!(f, "T[grid 2^{}]", s.grid_log2()),
            OperatorExpr::Composition(m) => write!(f, "C[{m}]"),
            OperatorExpr::Adjoint(e) => write!(f, "{e}*"),
            OperatorExpr::Product(v) => join(f, v, " . "),
            OperatorExpr::Sum(v) => join(f, v, " + "),
            OperatorExpr::PolarUnitary(m) => write!(f, "U[{m}]"),
            OperatorExpr::InverseSqrt(e) => write!(f, "({e})^(-1/2)"),
        }
    }
}

/// Leading block of an evaluated expression.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub matrix: Matrix,
    pub basis_size: usize,
    pub working_size: usize,
    /// Frobenius norm of the stored block, an upper bound for its spectral norm.
    pub norm_bound: f64,
    pub provenance: OperatorExpr,
}

impl TruncatedOperator {
    /// Spectral norm of the leading `keep x keep` block.
    pub fn interior_norm(&self, keep: usize) -> Result<f64> {
        interior_norm(self, keep)
    }
}

pub fn interior_norm(t: &TruncatedOperator, keep: usize) -> Result<f64> {
    if keep > t.basis_size {
        return Err(Error::InvalidParameter(format!("keep {keep} exceeds basis size {}", t.basis_size)));
    }
    spectral_norm(t.matrix.as_ref().submatrix(0, 0, keep, keep))
}

/// Largest singular value (zero for an empty matrix).
pub fn spectral_norm(m: MatRef<'_, C64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let s = m.singular_values().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: MatRef<'_, C64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let s = m.singular_values().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(s.last().copied().unwrap_or(0.0))
}

/// Largest entrywise deviation of `m` from its adjoint.
pub fn hermitian_deviation(m: MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            dev = dev.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    dev
}

/// `A^{-1/2}` for Hermitian positive semidefinite `A`, eigenvalues clamped at the floor.
pub fn inverse_sqrt(a: MatRef<'_, C64>) -> Result<Matrix> {
    let deviation = hermitian_deviation(a);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = a.nrows();
    let w: Vec<f64> = (0..n).map(|i| 1.0 / s[i].re.max(EIGENVALUE_FLOOR).sqrt()).collect();
    let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * w[j]);
    Ok(&scaled * u.adjoint())
}

/// Unitary polar factor `W V*` of `A = W S V*`.
///
/// Equals `A (A* A)^{-1/2}` whenever `A` is invertible, but never squares the
/// singular values, so it stays accurate when `A` has singular values far
/// below the square root of machine precision.
pub fn polar_factor(a: MatRef<'_, C64>) -> Result<Matrix> {
    let svd = a.svd().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(svd.U() * svd.V().adjoint())
}

/// Gram matrix `<phi^n, phi^m>` of an automorphism. Since `|phi| = 1` on the
/// circle the entries are `phi(0)^(n-m)` above the diagonal.
pub fn automorphism_gram(phi: &MoebiusMap, size: usize) -> Matrix {
    let a = phi.apply(ZERO);
    let pows: Vec<C64> = std::iter::successors(Some(C64::new(1.0, 0.0)), |p| Some(p * a)).take(size).collect();
    Mat::from_fn(size, size, |m, n| if n >= m { pows[n - m] } else { pows[m - n].conj() })
}

fn scale_in_place(m: &mut Matrix, c: C64) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= c;
        }
    }
}

/// Dense value produced while evaluating; scalar multiples of the identity stay symbolic.
enum Value {
    ScalarId(C64),
    Dense(Matrix),
}

impl Value {
    fn into_dense(self, m: usize) -> Matrix {
        match self {
            Value::ScalarId(c) => Mat::from_fn(m, m, |i, j| if i == j { c } else { ZERO }),
            Value::Dense(d) => d,
        }
    }
}

fn map_key(m: &MoebiusMap) -> [u64; 8] {
    let c = m.coefficients();
    [
        c[0].re.to_bits(),
        c[0].im.to_bits(),
        c[1].re.to_bits(),
        c[1].im.to_bits(),
        c[2].re.to_bits(),
        c[2].im.to_bits(),
        c[3].re.to_bits(),
        c[3].im.to_bits(),
    ]
}

struct Evaluator {
    size: usize,
    polar_cache: Mutex<HashMap<[u64; 8], Arc<Matrix>>>,
}

impl Evaluator {
    fn eval(&self, e: &OperatorExpr) -> Result<Value> {
        let m = self.size;
        Ok(match e {
            OperatorExpr::Identity => Value::ScalarId(ONE),
            OperatorExpr::Scalar(c) => Value::ScalarId(*c),
            OperatorExpr::Toeplitz(s) => Value::Dense(toeplitz_matrix(s, m)?),
            OperatorExpr::Composition(phi) => Value::Dense(composition_matrix(phi, m)?),
            OperatorExpr::Adjoint(inner) => match self.eval(inner)? {
                Value::ScalarId(c) => Value::ScalarId(c.conj()),
                Value::Dense(d) => Value::Dense(d.adjoint().to_owned()),
            },
            OperatorExpr::PolarUnitary(phi) => Value::Dense((*self.polar(phi)?).clone()),
            OperatorExpr::InverseSqrt(inner) => {
                let a = self.eval(inner)?.into_dense(m);
                Value::Dense(inverse_sqrt(a.as_ref())?)
            }
            OperatorExpr::Sum(args) => {
                let vals = self.eval_all(args)?;
                let mut diag = ZERO;
                let mut acc: Option<Matrix> = None;
                for v in vals {
                    match v {
                        Value::ScalarId(c) => diag += c,
                        Value::Dense(d) => {
                            acc = Some(match acc {
                                None => d,
                                Some(a) => &a + &d,
                            })
                        }
                    }
                }
                match acc {
                    None => Value::ScalarId(diag),
                    Some(mut a) => {
                        for i in 0..m {
                            a[(i, i)] += diag;
                        }
                        Value::Dense(a)
                    }
                }
            }
            OperatorExpr::Product(args) => {
                let vals = self.eval_all(args)?;
                let mut coef = ONE;
                let mut acc: Option<Matrix> = None;
                for v in vals {
                    match v {
                        Value::ScalarId(c) => coef *= c,
                        Value::Dense(d) => {
                            acc = Some(match acc {
                                None => d,
                                Some(a) => &a * &d,
                            })
                        }
                    }
                }
                match acc {
                    None => Value::ScalarId(coef),
                    Some(mut a) => {
                        if coef != ONE {
                            scale_in_place(&mut a, coef);
                        }
                        Value::Dense(a)
                    }
                }
            }
        })
    }

    // Operands are independent, so they may be computed concurrently; they are
    // combined afterwards in their written order.
    fn eval_all(&self, args: &[OperatorExpr]) -> Result<Vec<Value>> {
        args.par_iter().map(|a| self.eval(a)).collect()
    }

    fn polar(&self, phi: &MoebiusMap) -> Result<Arc<Matrix>> {
        let key = map_key(phi);
        if let Some(u) = self.polar_cache.lock().unwrap().get(&key) {
            return Ok(u.clone());
        }
        if phi.classify().kind == DiskMapKind::StrictlyInterior {
            return Err(Error::InvalidParameter(
                "the polar factor of a composition operator with a strictly interior symbol is not unitary".into(),
            ));
        }
        let c = composition_matrix(phi, self.size)?;
        let u = if phi.is_automorphism() {
            let g = automorphism_gram(phi, self.size);
            &c * inverse_sqrt(g.as_ref())?
        } else {
            polar_factor(c.as_ref())?
        };
        let u = Arc::new(u);
        self.polar_cache.lock().unwrap().insert(key, u.clone());
        Ok(u)
    }
}

pub fn evaluate(expr: &OperatorExpr, size: usize, factor: usize) -> Result<TruncatedOperator> {
    expr.validate()?;
    if factor < 2 {
        return Err(Error::InvalidParameter("working factor must be at least 2".into()));
    }
    let working = size.checked_mul(factor).filter(|&w| w <= MAX_WORKING_SIZE).ok_or(Error::TooLarge(size))?;
    let ev = Evaluator { size: working, polar_cache: Mutex::new(HashMap::new()) };
    let full = ev.eval(expr)?.into_dense(working);
    let matrix = full.as_ref().submatrix(0, 0, size, size).to_owned();
    if let Some(k) = (0..size * size).find(|&k| !matrix[(k / size, k % size)].re.is_finite() || !matrix[(k / size, k % size)].im.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let norm_bound = matrix.norm_l2();
    Ok(TruncatedOperator { matrix, basis_size: size, working_size: working, norm_bound, provenance: expr.clone() })
}

/// `U = C (C* C)^{-1/2}` for the composition operator of `m`, at the default working factor.
pub fn polar_unitary(m: &MoebiusMap, size: usize) -> Result<TruncatedOperator> {
    evaluate(&OperatorExpr::PolarUnitary(*m), size, DEFAULT_WORKING_FACTOR)
}

/// Leaf tables of an expression file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprFile {
    #[serde(default)]
    pub symbols: std::collections::BTreeMap<String, SymbolSource>,
    #[serde(default)]
    pub maps: std::collections::BTreeMap<String, MoebiusMap>,
    pub root: ExprNode,
}

/// A symbol given either by its samples or by a named curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSource {
    Named { curve: String, grid_log2: Option<u32> },
    Sampled(CircleSymbol),
}

impl SymbolSource {
    pub fn resolve(&self) -> Result<CircleSymbol> {
        match self {
            SymbolSource::Named { curve, grid_log2 } => CircleSymbol::from_spec(
                &curve.parse()?,
                grid_log2.unwrap_or(crate::symbols::DEFAULT_GRID_LOG2),
            ),
            SymbolSource::Sampled(s) => Ok(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprNode {
    Identity,
    Scalar { value: [f64; 2] },
    Toeplitz { symbol: String },
    Composition { map: String },
    Adjoint { arg: Box<ExprNode> },
    Product { args: Vec<ExprNode> },
    Sum { args: Vec<ExprNode> },
    PolarUnitary { map: String },
    InverseSqrt { arg: Box<ExprNode> },
}

impl OperatorExpr {
    /// JSON form with leaves stored once under generated names (`s0, s1, ...`, `m0, m1, ...`).
    pub fn to_file(&self) -> ExprFile {
        fn go(e: &OperatorExpr, file: &mut ExprFile, syms: &mut Vec<Arc<CircleSymbol>>, maps: &mut Vec<MoebiusMap>) -> ExprNode {
            let mut map_name = |m: &MoebiusMap, file: &mut ExprFile| {
                let i = maps.iter().position(|x| x == m).unwrap_or_else(|| {
                    maps.push(*m);
                    file.maps.insert(format!("m{}", maps.len() - 1), *m);
                    maps.len() - 1
                });
                format!("m{i}")
            };
            match e {
                OperatorExpr::Identity => ExprNode::Identity,
                OperatorExpr::Scalar(c) => ExprNode::Scalar { value: [c.re, c.im] },
                OperatorExpr::Toeplitz(s) => {
                    let i = syms.iter().position(|x| Arc::ptr_eq(x, s) || **x == **s).unwrap_or_else(|| {
                        syms.push(s.clone());
                        file.symbols.insert(format!("s{}", syms.len() - 1), SymbolSource::Sampled((**s).clone()));
                        syms.len() - 1
                    });
                    ExprNode::Toeplitz { symbol: format!("s{i}") }
                }
                OperatorExpr::Composition(m) => ExprNode::Composition { map: map_name(m, file) },
                OperatorExpr::PolarUnitary(m) => ExprNode::PolarUnitary { map: map_name(m, file) },
                OperatorExpr::Adjoint(a) => ExprNode::Adjoint { arg: Box::new(go(a, file, syms, maps)) },
                OperatorExpr::InverseSqrt(a) => ExprNode::InverseSqrt { arg: Box::new(go(a, file, syms, maps)) },
                OperatorExpr::Product(v) => ExprNode::Product { args: v.iter().map(|a| go(a, file, syms, maps)).collect() },
                OperatorExpr::Sum(v) => ExprNode::Sum { args: v.iter().map(|a| go(a, file, syms, maps)).collect() },
            }
        }
        let mut file = ExprFile { symbols: Default::default(), maps: Default::default(), root: ExprNode::Identity };
        let root = go(self, &mut file, &mut Vec::new(), &mut Vec::new());
        file.root = root;
        file
    }

    pub fn from_file(file: &ExprFile) -> Result<Self> {
        let mut syms = HashMap::new();
        for (name, src) in &file.symbols {
            syms.insert(name.clone(), Arc::new(src.resolve()?));
        }
        fn go(n: &ExprNode, file: &ExprFile, syms: &HashMap<String, Arc<CircleSymbol>>) -> Result<OperatorExpr> {
            let map = |name: &str| file.maps.get(name).copied().ok_or_else(|| Error::Format(format!("unknown map '{name}'")));
            Ok(match n {
                ExprNode::Identity => OperatorExpr::Identity,
                ExprNode::Scalar { value } => OperatorExpr::Scalar(C64::new(value[0], value[1])),
                ExprNode::Toeplitz { symbol } => OperatorExpr::Toeplitz(
                    syms.get(symbol).cloned().ok_or_else(|| Error::Format(format!("unknown symbol '{symbol}'")))?,
                ),
                ExprNode::Composition { map: m } => OperatorExpr::Composition(map(m)?),
                ExprNode::PolarUnitary { map: m } => OperatorExpr::PolarUnitary(map(m)?),
                ExprNode::Adjoint { arg } => OperatorExpr::Adjoint(Box::new(go(arg, file, syms)?)),
                ExprNode::InverseSqrt { arg } => OperatorExpr::InverseSqrt(Box::new(go(arg, file, syms)?)),
                ExprNode::Product { args } => OperatorExpr::Product(args.iter().map(|a| go(a, file, syms)).collect::<Result<_>>()?),
                ExprNode::Sum { args } => OperatorExpr::Sum(args.iter().map(|a| go(a, file, syms)).collect::<Result<_>>()?),
            })
        }
        let e = go(&file.root, file, &syms)?;
        e.validate()?;
        Ok(e)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}
