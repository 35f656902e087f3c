use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hardy_core::calkin_probe::{ProbeReport, Verdict};
use serde::{Deserialize, Serialize};

use crate::config::{Format, Suite, SuiteConfig};
use crate::error::{Error, Result};

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// One verdict inside a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeReport>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            detail: detail.into(),
            values: BTreeMap::new(),
            probe: None,
        }
    }

    pub fn with_value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn from_probe(name: impl Into<String>, probe: ProbeReport, detail: impl Into<String>) -> Self {
        Check { name: name.into(), verdict: probe.verdict, detail: detail.into(), values: BTreeMap::new(), probe: Some(probe) }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tool: String,
    pub suite: Suite,
    pub verdict: Verdict,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: Suite, config: &SuiteConfig, checks: Vec<Check>) -> Self {
        let verdict = if !checks.is_empty() && checks.iter().all(Check::passed) { Verdict::Pass } else { Verdict::Fail };
        SuiteReport { tool: TOOL.to_string(), suite, verdict, config: config.clone(), checks }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Long format: one row per ladder point, spectral point or named value.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}; suite {}\ncheck,verdict,key,size,value\n", self.tool, self.suite.name());
        for c in &self.checks {
            let v = format!("{:?}", c.verdict);
            let name = c.name.replace(',', ";");
            for (k, x) in &c.values {
                let _ = writeln!(out, "{name},{v},{k},,{x:e}");
            }
            if let Some(p) = &c.probe {
                for l in &p.ladder {
                    let _ = writeln!(out, "{name},{v},ladder,{},{:e}", l.size, l.value);
                }
                // Spectral points carry no sizes; the key holds the size index and the point.
                for pt in &p.points {
                    for (j, s) in pt.sigma_min.iter().enumerate() {
                        let key = format!("sigma_min[{j}] at {}{:+}i", pt.lambda[0], pt.lambda[1]);
                        let _ = writeln!(out, "{name},{v},{key},,{s:e}");
                    }
                }
            }
        }
        out
    }

    /// Writes the requested formats into `dir` and returns the paths.
    pub fn write(&self, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
        let mut paths = Vec::new();
        for f in formats {
            let (ext, body) = match f {
                Format::Json => ("json", self.to_json()),
                Format::Csv => ("csv", self.to_csv()),
            };
            let p = dir.join(format!("{}.{ext}", self.suite.name()));
            std::fs::write(&p, body).map_err(Error::io(&p))?;
            paths.push(p);
        }
        Ok(paths)
    }
}
