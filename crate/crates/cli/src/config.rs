//! Suite configuration. Every field is optional in the JSON file; the effective
//! values, defaults included, are written into each report.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hardy_core::calkin_probe::{LadderOptions, DEFAULT_DELTA};
use hardy_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::{MapSpec, SymbolSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Jury,
    Semigroup,
    Thm22,
    Covariance,
    ParabolicSpectrum,
    Coburn,
    Prop52,
    Irreducibility,
    EssentialNormality,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Jury,
        Suite::Semigroup,
        Suite::Thm22,
        Suite::Covariance,
        Suite::ParabolicSpectrum,
        Suite::Coburn,
        Suite::Prop52,
        Suite::Irreducibility,
        Suite::EssentialNormality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jury => "jury",
            Suite::Semigroup => "semigroup",
            Suite::Thm22 => "thm22",
            Suite::Covariance => "covariance",
            Suite::ParabolicSpectrum => "parabolic-spectrum",
            Suite::Coburn => "coburn",
            Suite::Prop52 => "prop52",
            Suite::Irreducibility => "irreducibility",
            Suite::EssentialNormality => "essential-normality",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

fn c(re: f64, im: f64) -> [f64; 2] {
    [re, im]
}

pub(crate) fn cx(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn map(s: &str) -> MapSpec {
    s.parse().expect("built-in map spec")
}

fn symbol(s: &str) -> SymbolSpec {
    s.parse().expect("built-in curve spec")
}

/// Tail-ladder settings shared by the compactness suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub eval_size: usize,
    pub cuts: Vec<usize>,
    pub tol_c: f64,
    pub ratio_c: f64,
    pub working_factor: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        let o = LadderOptions::default();
        Self { eval_size: 1024, cuts: vec![32, 64, 128, 256], tol_c: o.tol_c, ratio_c: o.ratio_c, working_factor: o.working_factor }
    }
}

impl LadderConfig {
    pub fn options(&self) -> LadderOptions {
        LadderOptions { tol_c: self.tol_c, ratio_c: self.ratio_c, working_factor: self.working_factor }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JuryConfig {
    /// Points `a = phi^{-1}(0)`.
    pub points: Vec<[f64; 2]>,
    pub size: usize,
    pub working_factor: usize,
    pub interior: usize,
    pub tol: f64,
}

impl Default for JuryConfig {
    fn default() -> Self {
        Self { points: vec![c(0.3, 0.0), c(0.0, 0.5), c(-0.2, 0.4)], size: 256, working_factor: 4, interior: 128, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupConfig {
    pub draws: usize,
    pub seed: u64,
    pub map_tol: f64,
    /// Parameter pairs `(a, b)` for the operator-level check.
    pub operator_pairs: Vec<[[f64; 2]; 2]>,
    pub size: usize,
    pub working_factor: usize,
    pub interior: usize,
    pub operator_tol: f64,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        Self {
            draws: 50,
            seed: 3,
            map_tol: 1e-12,
            operator_pairs: vec![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.5, 1.0), c(1.0, -0.5)]],
            size: 256,
            working_factor: 4,
            interior: 128,
            operator_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    pub symbol: SymbolSpec,
    pub map: MapSpec,
    /// Boundary point where the symbol is evaluated.
    pub gamma: [f64; 2],
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self { symbol: symbol("power 1"), map: map("rho(1,1)"), gamma: c(1.0, 0.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceConfig {
    pub symbol: SymbolSpec,
    pub first: MapSpec,
    pub second: MapSpec,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self { symbol: symbol("power 1"), first: map("psi(1,2)"), second: map("psi(1,3)") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParabolicConfig {
    pub gamma: [f64; 2],
    pub a_values: Vec<[f64; 2]>,
    pub t_points: usize,
    pub far_points: Vec<[f64; 2]>,
    pub size: usize,
}

impl Default for ParabolicConfig {
    fn default() -> Self {
        Self {
            gamma: c(1.0, 0.0),
            a_values: vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)],
            t_points: 21,
            far_points: vec![c(2.0, 0.0), c(-1.0, 2.0), c(0.0, 3.0)],
            size: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoburnConfig {
    pub symbols: Vec<SymbolSpec>,
    pub grid_log2: u32,
    pub lo: f64,
    pub hi: f64,
    pub points_per_side: usize,
    pub sizes: Vec<usize>,
    pub delta: f64,
}

impl Default for CoburnConfig {
    fn default() -> Self {
        Self {
            symbols: ["power 1", "power 2", "laurent -1 1 0 1", "laurent 0 0 1 0.5"].map(symbol).to_vec(),
            grid_log2: 12,
            lo: -2.0,
            hi: 2.0,
            points_per_side: 10,
            sizes: vec![128, 256],
            delta: DEFAULT_DELTA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    pub first: MapSpec,
    pub second: MapSpec,
    pub sizes: Vec<usize>,
    pub tol: f64,
    /// Errors below this are roundoff; they need not decrease further.
    pub roundoff: f64,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self { first: map("auto(1,0.3)"), second: map("auto(1,0.4i)"), sizes: vec![256, 512], tol: 1e-6, roundoff: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrreducibilityConfig {
    pub symbol: SymbolSpec,
    pub size: usize,
}

impl Default for IrreducibilityConfig {
    fn default() -> Self {
        Self { symbol: symbol("power 1"), size: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalityConfig {
    pub map: MapSpec,
    /// The first ladder value must exceed this.
    pub min_first: f64,
}

impl Default for NormalityConfig {
    fn default() -> Self {
        Self { map: map("rho(1,1)"), min_first: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// When present it must name the suite being run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub ladder: LadderConfig,
    pub jury: JuryConfig,
    pub semigroup: SemigroupConfig,
    pub thm22: ResidualConfig,
    pub covariance: CovarianceConfig,
    pub parabolic_spectrum: ParabolicConfig,
    pub coburn: CoburnConfig,
    pub prop52: ReconstructConfig,
    pub irreducibility: IrreducibilityConfig,
    pub essential_normality: NormalityConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: None,
            out: PathBuf::from("reports"),
            formats: vec![Format::Json, Format::Csv],
            ladder: LadderConfig::default(),
            jury: JuryConfig::default(),
            semigroup: SemigroupConfig::default(),
            thm22: ResidualConfig::default(),
            covariance: CovarianceConfig::default(),
            parabolic_spectrum: ParabolicConfig::default(),
            coburn: CoburnConfig::default(),
            prop52: ReconstructConfig::default(),
            irreducibility: IrreducibilityConfig::default(),
            essential_normality: NormalityConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        serde_json::from_str(&text).map_err(Error::json(path))
    }

    /// Applies `--size`: the main matrix size of each suite.
    pub fn set_size(&mut self, n: usize) {
        self.ladder.eval_size = n;
        self.jury.size = n;
        self.jury.interior = n / 2;
        self.semigroup.size = n;
        self.semigroup.interior = n / 2;
        self.parabolic_spectrum.size = n;
        self.coburn.sizes = vec![n / 2, n];
        self.prop52.sizes = vec![n, 2 * n];
        self.irreducibility.size = n;
    }

    /// Applies `--tol`: the main pass threshold of each suite.
    pub fn set_tol(&mut self, tol: f64) {
        self.ladder.tol_c = tol;
        self.jury.tol = tol;
        self.semigroup.operator_tol = tol;
        self.coburn.delta = tol;
        self.prop52.tol = tol;
    }

    pub fn check(&self, suite: Suite) -> Result<()> {
        if let Some(s) = self.suite {
            if s != suite {
                return Err(Error::Config(format!("config is for suite '{}', not '{}'", s.name(), suite.name())));
            }
        }
        let increasing = |v: &[usize]| !v.is_empty() && v[0] > 0 && v.windows(2).all(|w| w[0] < w[1]);
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.formats.is_empty() {
            return fail("formats must not be empty");
        }
        if !increasing(&self.ladder.cuts) || *self.ladder.cuts.last().unwrap() > self.ladder.eval_size / 2 {
            return fail("ladder.cuts must increase and stay within eval_size / 2");
        }
        if self.jury.interior == 0 || self.jury.interior > self.jury.size {
            return fail("jury.interior must lie in 1..=jury.size");
        }
        if self.semigroup.interior == 0 || self.semigroup.interior > self.semigroup.size {
            return fail("semigroup.interior must lie in 1..=semigroup.size");
        }
        if self.parabolic_spectrum.t_points < 2 {
            return fail("parabolic_spectrum.t_points must be at least 2");
        }
        if !increasing(&self.coburn.sizes) {
            return fail("coburn.sizes must increase");
        }
        if !increasing(&self.prop52.sizes) {
            return fail("prop52.sizes must increase");
        }
        let positive = [
            ("ladder.tol_c", self.ladder.tol_c),
            ("ladder.ratio_c", self.ladder.ratio_c),
            ("jury.tol", self.jury.tol),
            ("semigroup.map_tol", self.semigroup.map_tol),
            ("semigroup.operator_tol", self.semigroup.operator_tol),
            ("coburn.delta", self.coburn.delta),
            ("prop52.tol", self.prop52.tol),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        Ok(())
    }
}
