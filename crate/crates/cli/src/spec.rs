//! Text forms for maps and operators, used on the command line and in configs.
//!
//! Maps: `rho(gamma, a)`, `psi(gamma, t)`, `auto(omega, s)`, `rotation(omega)`,
//! `scale(r)`, `mobius(a, b, c, d)`. Arguments are complex numbers such as
//! `1`, `0.5i` or `-0.2+0.4i`.
//!
//! Operators: `T[curve]`, `C[map]`, `U[map]` or `@file.json` (an expression file).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hardy_core::hardy_ops::{OperatorExpr, ExprFile};
use hardy_core::moebius::Moebius;
use hardy_core::symbols::{CurveSpec, DEFAULT_GRID_LOG2, MAX_GRID_LOG2};
use hardy_core::{CircleSymbol, MoebiusMap, C64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn bad(input: &str, reason: impl Into<String>) -> Error {
    Error::Spec { input: input.to_string(), reason: reason.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MapSpec {
    name: String,
    args: Vec<String>,
    values: Vec<C64>,
}

impl MapSpec {
    pub fn build(&self) -> Result<MoebiusMap> {
        let v = &self.values;
        let real = |z: C64| {
            if z.im != 0.0 {
                return Err(bad(&self.to_string(), "t must be real"));
            }
            Ok(z.re)
        };
        let m = match self.name.as_str() {
            "rho" => Moebius::parabolic(v[0], v[1])?,
            "psi" => Moebius::psi(v[0], real(v[1])?)?,
            "auto" => Moebius::disk_automorphism(v[0], v[1])?,
            "rotation" => Moebius::rotation(v[0])?,
            "scale" => Moebius::scaling(v[0])?,
            "mobius" => Moebius::new(v[0], v[1], v[2], v[3])?,
            _ => unreachable!("arity table and constructors disagree"),
        };
        Ok(m)
    }
}

fn arity(name: &str) -> Option<usize> {
    Some(match name {
        "rho" | "psi" | "auto" => 2,
        "rotation" | "scale" => 1,
        "mobius" => 4,
        _ => return None,
    })
}

impl FromStr for MapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (name, rest) = t.split_once('(').ok_or_else(|| bad(s, "expected name(args)"))?;
        let inner = rest.strip_suffix(')').ok_or_else(|| bad(s, "missing ')'"))?;
        let name = name.trim();
        let want = arity(name).ok_or_else(|| bad(s, format!("unknown map constructor '{name}'")))?;
        let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
        if args.len() != want {
            return Err(bad(s, format!("{name} takes {want} argument(s)")));
        }
        let values = args
            .iter()
            .map(|a| a.parse::<C64>().map_err(|_| bad(s, format!("'{a}' is not a complex number"))))
            .collect::<Result<_>>()?;
        Ok(MapSpec { name: name.to_string(), args, values })
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(","))
    }
}

impl TryFrom<String> for MapSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MapSpec> for String {
    fn from(m: MapSpec) -> String {
        m.to_string()
    }
}

/// Named curve plus an optional grid size; the grid defaults to one large enough
/// for the working size it is evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SymbolSpec {
    curve: CurveSpec,
}

impl SymbolSpec {
    pub fn build(&self, grid_log2: u32) -> Result<CircleSymbol> {
        Ok(CircleSymbol::from_spec(&self.curve, grid_log2)?)
    }

    /// Symbol sampled finely enough to supply `working` Fourier coefficients per side.
    pub fn build_for(&self, working: usize) -> Result<CircleSymbol> {
        self.build(grid_for(working))
    }
}

/// Smallest grid exponent (at least the default) with `working` coefficients per side.
pub fn grid_for(working: usize) -> u32 {
    let mut g = DEFAULT_GRID_LOG2;
    while g < MAX_GRID_LOG2 && (1usize << (g - 1)) <= working {
        g += 1;
    }
    g
}

impl FromStr for SymbolSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(SymbolSpec { curve: s.parse().map_err(|e: hardy_core::Error| bad(s, e.to_string()))? })
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.curve)
    }
}

impl TryFrom<String> for SymbolSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SymbolSpec> for String {
    fn from(s: SymbolSpec) -> String {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OpSpec {
    Toeplitz(SymbolSpec),
    Composition(MapSpec),
    PolarUnitary(MapSpec),
    File(PathBuf),
}

impl OpSpec {
    /// Expression ready for evaluation at `working` basis functions.
    pub fn build(&self, working: usize) -> Result<OperatorExpr> {
        Ok(match self {
            OpSpec::Toeplitz(s) => OperatorExpr::toeplitz(s.build_for(working)?),
            OpSpec::Composition(m) => OperatorExpr::composition(m.build()?),
            OpSpec::PolarUnitary(m) => OperatorExpr::polar_unitary(m.build()?),
            OpSpec::File(p) => {
                let text = std::fs::read_to_string(p).map_err(Error::io(p))?;
                let file: ExprFile = serde_json::from_str(&text).map_err(Error::json(p))?;
                OperatorExpr::from_file(&file)?
            }
        })
    }
}

impl FromStr for OpSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(path) = t.strip_prefix('@') {
            return Ok(OpSpec::File(PathBuf::from(path)));
        }
        let inner = |prefix: &str| t.strip_prefix(prefix).and_then(|r| r.strip_suffix(']'));
        if let Some(c) = inner("T[") {
            Ok(OpSpec::Toeplitz(c.parse()?))
        } else if let Some(m) = inner("C[") {
            Ok(OpSpec::Composition(m.parse()?))
        } else if let Some(m) = inner("U[") {
            Ok(OpSpec::PolarUnitary(m.parse()?))
        } else {
            Err(bad(s, "expected T[curve], C[map], U[map] or @file.json"))
        }
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpSpec::Toeplitz(s) => write!(f, "T[{s}]"),
            OpSpec::Composition(m) => write!(f, "C[{m}]"),
            OpSpec::PolarUnitary(m) => write!(f, "U[{m}]"),
            OpSpec::File(p) => write!(f, "@{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_round_trip() {
        for s in ["rho(1,1)", "psi(1,2)", "auto(1,-0.2+0.4i)", "scale(0.5)", "mobius(1,0,0,1)"] {
            let m: MapSpec = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
            m.build().unwrap();
        }
    }

    #[test]
    fn map_matches_constructor() {
        let m: MapSpec = "rho(i, 1+1i)".parse().unwrap();
        let want = Moebius::parabolic(C64::new(0.0, 1.0), C64::new(1.0, 1.0)).unwrap();
        assert!(m.build().unwrap().approx_eq(&want, 0.0));
    }

    #[test]
    fn rejects_bad_maps() {
        for s in ["rho(1)", "foo(1)", "rho(1,x)", "psi 1 2", "psi(1,2i)"] {
            assert!(s.parse::<MapSpec>().and_then(|m| m.build()).is_err(), "{s}");
        }
    }

    #[test]
    fn operator_forms() {
        assert_eq!("T[power 1]".parse::<OpSpec>().unwrap().to_string(), "T[power 1]");
        assert!(matches!("C[scale(0.5)]".parse::<OpSpec>().unwrap(), OpSpec::Composition(_)));
        assert!(matches!("@x.json".parse::<OpSpec>().unwrap(), OpSpec::File(_)));
        assert!("X[power 1]".parse::<OpSpec>().is_err());
        assert!("T[spiral]".parse::<OpSpec>().is_err());
    }

    #[test]
    fn grid_covers_working_size() {
        assert_eq!(grid_for(16), DEFAULT_GRID_LOG2);
        let g = grid_for(2048);
        assert!((1usize << (g - 1)) > 2048);
        let sym = SymbolSpec::from_str("power 1").unwrap().build_for(2048).unwrap();
        assert!(sym.coeff_radius() >= 2048);
    }
}
