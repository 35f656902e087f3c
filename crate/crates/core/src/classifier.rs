//! Structure of `C*(T_psi, C_phi1, ..., C_phin)` modulo the compacts.
//!
//! [`classify_quotient`] dispatches on the boundary behaviour of the maps and
//! returns an [`AlgebraDescription`] together with a [`Certificate`] holding
//! one piece of evidence per side condition the description relies on.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calkin_probe::commutant_dimension;
use crate::error::{Error, Result};
use crate::hardy_ops::{evaluate, toeplitz_matrix, Matrix, OperatorExpr, SymbolSource};
use crate::moebius::{r_independent_pair, z_log_independence, DiskMapClass, DiskMapKind, LogIndependence};
use crate::symbols::{NordgrenVerdict, OpenArc};
use crate::{CircleSymbol, MoebiusMap, C64};

/// Largest order tested when looking for a periodic rotation.
pub const MAX_ROTATION_ORDER: u32 = 64;
pub const ROTATION_ORDER_TOL: f64 = 1e-10;
const COORDINATE_TOL: f64 = 1e-9;
const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    /// The unit circle, reached when the symbol is the coordinate `z`.
    Circle,
    /// The circle modulo the fibres of the symbol.
    QuotientCircle { grid_log2: u32, class_count: usize },
    /// The sampled image curve of the symbol.
    SampledCurve { grid_log2: u32 },
}

/// A point of a [`Space`]; `label` is the grid class for quotient spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClass {
    pub point: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum GroupAction {
    /// `Z^n` acting through `f(x) -> f(x^(t_i))`.
    Dilation { exponents: Vec<f64> },
    /// `Z` acting through a disk automorphism, coefficients as `[re, im]`.
    Automorphism { map: [[f64; 2]; 4] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum AlgebraDescription {
    ContinuousOn { space: Space },
    VanishingIdeal { space: Space, point: PointClass },
    CZeroUnitInterval,
    MinimalUnitization { child: Box<AlgebraDescription> },
    DirectSum { children: Vec<AlgebraDescription> },
    CrossedProduct { child: Box<AlgebraDescription>, rank: usize, action: GroupAction },
    MatrixBundleD { space: Space, gamma: PointClass, eta: PointClass },
    ExtensionByCompacts { quotient: Box<AlgebraDescription> },
    /// Algebra generated by maps whose derivatives admit an integer log relation.
    UnresolvedGeneratedAlgebra { derivatives: Vec<f64> },
}

impl AlgebraDescription {
    /// Structural invariants of the tree.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match self {
            AlgebraDescription::CrossedProduct { child, rank, action } => {
                match action {
                    GroupAction::Dilation { exponents } => {
                        if exponents.len() != *rank {
                            return bad("crossed product rank differs from the number of exponents");
                        }
                        if exponents.iter().any(|&t| !(t > 0.0) || (t - 1.0).abs() < FIXED_POINT_TOL) {
                            return bad("exponents must be positive and differ from 1");
                        }
                    }
                    GroupAction::Automorphism { .. } => {
                        if *rank != 1 {
                            return bad("an automorphism action has rank 1");
                        }
                    }
                }
                child.check()
            }
            AlgebraDescription::MatrixBundleD { gamma, eta, .. } => {
                let same = match (gamma.label, eta.label) {
                    (Some(a), Some(b)) => a == b,
                    _ => C64::new(gamma.point[0] - eta.point[0], gamma.point[1] - eta.point[1]).norm() < FIXED_POINT_TOL,
                };
                if same {
                    return bad("gamma and eta must lie in different classes");
                }
                Ok(())
            }
            AlgebraDescription::MinimalUnitization { child } => child.check(),
            AlgebraDescription::ExtensionByCompacts { quotient } => quotient.check(),
            AlgebraDescription::DirectSum { children } => children.iter().try_for_each(|c| c.check()),
            _ => Ok(()),
        }
    }

    /// Side conditions that any certificate for this tree must cover.
    pub fn side_conditions(&self) -> BTreeSet<SideCondition> {
        let mut out = BTreeSet::new();
        self.collect_conditions(false, &mut out);
        out
    }

    fn collect_conditions(&self, under_crossed: bool, out: &mut BTreeSet<SideCondition>) {
        use SideCondition::*;
        let space = |s: &Space, out: &mut BTreeSet<SideCondition>| match s {
            Space::Circle => {
                out.insert(CoordinateSymbol);
            }
            Space::QuotientCircle { .. } => {
                out.insert(QuotientPartition);
                out.insert(IrreducibleSymbol);
            }
            Space::SampledCurve { .. } => {
                out.insert(IrreducibleSymbol);
            }
        };
        match self {
            AlgebraDescription::ContinuousOn { space: s } | AlgebraDescription::VanishingIdeal { space: s, .. } => space(s, out),
            AlgebraDescription::CZeroUnitInterval => {
                if !under_crossed {
                    out.insert(ParabolicDerivatives);
                }
            }
            AlgebraDescription::MinimalUnitization { child } => {
                out.insert(NonAutomorphisms);
                out.insert(CommonBoundaryFixedPoint);
                child.collect_conditions(under_crossed, out);
            }
            AlgebraDescription::DirectSum { children } => {
                for c in children {
                    c.collect_conditions(under_crossed, out);
                }
            }
            AlgebraDescription::CrossedProduct { child, action, .. } => {
                match action {
                    GroupAction::Dilation { .. } => {
                        out.insert(DerivativeValues);
                        out.insert(LogIndependence);
                    }
                    GroupAction::Automorphism { .. } => {
                        if matches!(**child, AlgebraDescription::ContinuousOn { space: Space::SampledCurve { .. } }) {
                            out.insert(RotationInvariantCurve);
                        } else {
                            out.insert(TopologicallyFree);
                        }
                    }
                }
                child.collect_conditions(true, out);
            }
            AlgebraDescription::MatrixBundleD { space: s, .. } => {
                out.insert(NonAutomorphisms);
                out.insert(BoundaryToBoundary);
                out.insert(DistinctClasses);
                space(s, out);
            }
            AlgebraDescription::ExtensionByCompacts { quotient } => {
                out.insert(SingleAutomorphism);
                quotient.collect_conditions(under_crossed, out);
            }
            AlgebraDescription::UnresolvedGeneratedAlgebra { .. } => {
                out.insert(DerivativeValues);
                out.insert(LogDependence);
            }
        }
    }
}

fn space_name(s: &Space) -> &'static str {
    match s {
        Space::Circle => "T",
        Space::QuotientCircle { .. } => "[T]",
        Space::SampledCurve { .. } => "curve",
    }
}

fn point_name(s: &Space, base: &str) -> String {
    match s {
        Space::QuotientCircle { .. } => format!("[{base}]"),
        _ => base.to_string(),
    }
}

fn number(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn exponent_list(ts: &[f64]) -> String {
    ts.iter().map(|t| number(*t)).collect::<Vec<_>>().join(",")
}

fn group_name(rank: usize) -> String {
    if rank == 1 {
        "Z".into()
    } else {
        format!("Z^{rank}")
    }
}

impl AlgebraDescription {
    fn render(&self, nested: bool) -> String {
        match self {
            AlgebraDescription::ContinuousOn { space } => format!("C({})", space_name(space)),
            AlgebraDescription::VanishingIdeal { space, .. } => {
                format!("C_{}({})", point_name(space, "γ"), space_name(space))
            }
            AlgebraDescription::CZeroUnitInterval => "C0[0,1]".into(),
            AlgebraDescription::MinimalUnitization { child } => format!("MinUnit( {} )", child.render(false)),
            AlgebraDescription::DirectSum { children } => {
                let body = children.iter().map(|c| c.render(true)).collect::<Vec<_>>().join(" ⊕ ");
                if nested {
                    format!("({body})")
                } else {
                    body
                }
            }
            AlgebraDescription::CrossedProduct { child, rank, action } => {
                let body = match action {
                    GroupAction::Dilation { exponents } => {
                        format!("{} ⋊ {} {{{}}}", child.render(true), group_name(*rank), exponent_list(exponents))
                    }
                    GroupAction::Automorphism { .. } => format!("{} ⋊ {}", child.render(true), group_name(*rank)),
                };
                if nested {
                    format!("({body})")
                } else {
                    body
                }
            }
            AlgebraDescription::MatrixBundleD { space, .. } => format!(
                "D( C({}); {}; {} )",
                space_name(space),
                point_name(space, "γ"),
                point_name(space, "η")
            ),
            AlgebraDescription::ExtensionByCompacts { quotient } => format!("Ext_K( {} )", quotient.render(false)),
            AlgebraDescription::UnresolvedGeneratedAlgebra { derivatives } => {
                format!("Unresolved{{{}}}", exponent_list(derivatives))
            }
        }
    }
}

/// Canonical string of a description.
pub fn describe(d: &AlgebraDescription) -> String {
    d.render(false)
}

impl fmt::Display for AlgebraDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&describe(self))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideCondition {
    CoordinateSymbol,
    IrreducibleSymbol,
    QuotientPartition,
    NonAutomorphisms,
    CommonBoundaryFixedPoint,
    ParabolicDerivatives,
    DerivativeValues,
    LogIndependence,
    LogDependence,
    BoundaryToBoundary,
    DistinctClasses,
    SingleAutomorphism,
    TopologicallyFree,
    RotationInvariantCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attestation {
    Nordgren,
    User,
    Commutant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    Symbol { max_deviation_from_z: f64 },
    Irreducibility { source: Attestation, detail: String },
    Quotient { grid_log2: u32, class_count: usize, tol: f64, labels: Vec<(String, usize)> },
    MapClasses { classes: Vec<DiskMapClass<f64>> },
    FixedPoint { gamma: [f64; 2], spread: f64 },
    Derivatives { values: Vec<f64> },
    Independence { verdict: LogIndependence, tol: f64 },
    BoundaryPair { gamma: [f64; 2], eta: [f64; 2] },
    Labels { gamma: usize, eta: usize },
    Aperiodic { checked_up_to: u32, min_distance_to_identity: f64 },
    Invariance { distance: f64, tol: f64, finite_order: Option<u32> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub condition: SideCondition,
    pub claim: String,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub entries: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    fn push(&mut self, condition: SideCondition, claim: impl Into<String>, evidence: Evidence) {
        self.entries.push(CertificateEntry { condition, claim: claim.into(), evidence });
    }

    pub fn entry(&self, c: SideCondition) -> Option<&CertificateEntry> {
        self.entries.iter().find(|e| e.condition == c)
    }

    /// Every side condition of `d` must have exactly one entry, and no entry
    /// may certify a condition `d` does not use.
    pub fn validate(&self, d: &AlgebraDescription) -> Result<()> {
        d.check()?;
        let needed = d.side_conditions();
        for c in &needed {
            let n = self.entries.iter().filter(|e| e.condition == *c).count();
            if n != 1 {
                return Err(Error::InvalidParameter(format!("side condition {c:?} has {n} certificate entries")));
            }
        }
        if let Some(e) = self.entries.iter().find(|e| !needed.contains(&e.condition)) {
            return Err(Error::InvalidParameter(format!("certificate entry for unused condition {:?}", e.condition)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyOptions {
    pub log_bound: u32,
    pub log_tol: f64,
    pub quotient_tol: f64,
    pub nordgren_tol: f64,
    /// Arcs for the Nordgren test; empty skips it.
    pub nordgren_arcs: Vec<OpenArc<f64>>,
    /// The caller vouches that `T_psi` is irreducible.
    pub attest_irreducible: bool,
    /// Truncation size for commutant evidence; `None` skips it.
    pub commutant_size: Option<usize>,
    /// Powers `phi^n`, `1 <= n <= orbit_bound`, checked against the identity.
    pub orbit_bound: u32,
    /// Curve invariance tolerance in multiples of the largest sample gap.
    pub invariance_gaps: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            log_bound: 12,
            log_tol: 1e-9,
            quotient_tol: 1e-9,
            nordgren_tol: 1e-3,
            nordgren_arcs: Vec::new(),
            attest_irreducible: false,
            commutant_size: None,
            orbit_bound: 8,
            invariance_gaps: 2.0,
        }
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn coordinate_deviation(sym: &CircleSymbol) -> f64 {
    (0..sym.len())
        .map(|k| (sym.samples()[k] - C64::from_polar(1.0, sym.angle(k))).norm())
        .fold(0.0, f64::max)
}

fn attest_irreducibility(sym: &CircleSymbol, opts: &ClassifyOptions, cert: &mut Certificate) -> Result<()> {
    let mut found: Option<(Attestation, String)> = None;
    if !opts.nordgren_arcs.is_empty() {
        match sym.nordgren_check(&opts.nordgren_arcs, opts.nordgren_tol)? {
            NordgrenVerdict::SufficientForIrreducibility => {
                found = Some((Attestation::Nordgren, format!("Nordgren test passed at tol {:e}", opts.nordgren_tol)));
            }
            NordgrenVerdict::Inconclusive(why) => cert.notes.push(format!("Nordgren test inconclusive: {why}")),
        }
    }
    if opts.attest_irreducible {
        let detail = "irreducibility attested by the caller".to_string();
        match found {
            None => found = Some((Attestation::User, detail)),
            Some(_) => cert.notes.push(detail),
        }
    }
    if let Some(n) = opts.commutant_size {
        let t = toeplitz_matrix(sym, n)?;
        let dim = commutant_dimension(t.as_ref())?;
        let detail = format!("commutant of the {n}x{n} truncation has dimension {dim}");
        match (&found, dim) {
            (None, 1) => found = Some((Attestation::Commutant, detail)),
            _ => cert.notes.push(detail),
        }
    }
    let (source, detail) = found.ok_or(Error::IrreducibilityNotAttested)?;
    cert.push(SideCondition::IrreducibleSymbol, "T_psi is irreducible", Evidence::Irreducibility { source, detail });
    Ok(())
}

/// Space of the symbol's quotient and, for quotient circles, the partition.
struct SymbolSpace {
    space: Space,
    partition: Option<crate::symbols::QuotientPartition>,
}

impl SymbolSpace {
    fn point(&self, z: C64) -> Result<PointClass> {
        let label = match &self.partition {
            Some(p) => Some(p.class_of_point(z)?),
            None => None,
        };
        Ok(PointClass { point: pair(z), label })
    }
}

fn symbol_space(sym: &CircleSymbol, opts: &ClassifyOptions, cert: &mut Certificate) -> Result<SymbolSpace> {
    let dev = coordinate_deviation(sym);
    if dev < COORDINATE_TOL {
        cert.push(SideCondition::CoordinateSymbol, "psi = z", Evidence::Symbol { max_deviation_from_z: dev });
        return Ok(SymbolSpace { space: Space::Circle, partition: None });
    }
    attest_irreducibility(sym, opts, cert)?;
    let p = sym.quotient_classes(opts.quotient_tol)?;
    let space = Space::QuotientCircle { grid_log2: p.grid_log2, class_count: p.class_count() };
    Ok(SymbolSpace { space, partition: Some(p) })
}

fn record_quotient(ss: &SymbolSpace, points: &[(&str, C64)], opts: &ClassifyOptions, cert: &mut Certificate) -> Result<()> {
    if let Some(p) = &ss.partition {
        let labels = points.iter().map(|(n, z)| Ok((n.to_string(), p.class_of_point(*z)?))).collect::<Result<Vec<_>>>()?;
        cert.push(
            SideCondition::QuotientPartition,
            format!("psi identifies the circle into {} classes", p.class_count()),
            Evidence::Quotient { grid_log2: p.grid_log2, class_count: p.class_count(), tol: opts.quotient_tol, labels },
        );
    }
    Ok(())
}

fn validate_inputs(sym: &CircleSymbol, maps: &[MoebiusMap]) -> Result<Vec<DiskMapClass<f64>>> {
    let s0 = sym.samples()[0];
    if sym.samples().iter().all(|z| (*z - s0).norm() < COORDINATE_TOL) {
        return Err(Error::InvalidParameter("symbol is constant".into()));
    }
    if maps.is_empty() {
        return Err(Error::InvalidParameter("no maps given".into()));
    }
    let classes: Vec<_> = maps.iter().map(|m| m.classify()).collect();
    if classes.iter().any(|c| !c.kind.is_self_map()) {
        return Err(Error::NotSelfMap);
    }
    Ok(classes)
}

/// Finite order of a rotation `z -> omega z`, if any, up to [`MAX_ROTATION_ORDER`].
pub fn rotation_order(omega: C64) -> Option<u32> {
    (1..=MAX_ROTATION_ORDER).find(|&q| (omega.powu(q) - 1.0).norm() < ROTATION_ORDER_TOL)
}

fn as_rotation(m: &MoebiusMap) -> Option<C64> {
    let [a, b, c, d] = m.coefficients();
    let scale = a.norm().max(d.norm());
    (b.norm() < 1e-12 * scale && c.norm() < 1e-12 * scale).then(|| a / d)
}

/// Structure of the quotient of `C*(T_psi, C_phi1, ..., C_phin)` by the compacts.
pub fn classify_quotient(
    sym: &CircleSymbol,
    maps: &[MoebiusMap],
    opts: &ClassifyOptions,
) -> Result<(AlgebraDescription, Certificate)> {
    let classes = validate_inputs(sym, maps)?;
    let mut cert = Certificate::default();
    let autos = classes.iter().filter(|c| c.kind.is_automorphism()).count();
    let desc = if autos > 0 {
        if maps.len() > 1 {
            return Err(Error::UnsupportedConfiguration("only a single automorphism is dispatched".into()));
        }
        classify_automorphism(sym, &maps[0], &classes[0], opts, &mut cert)?
    } else {
        classify_non_automorphisms(sym, maps, &classes, opts, &mut cert)?
    };
    cert.validate(&desc)?;
    Ok((desc, cert))
}

fn classify_automorphism(
    sym: &CircleSymbol,
    phi: &MoebiusMap,
    class: &DiskMapClass<f64>,
    opts: &ClassifyOptions,
    cert: &mut Certificate,
) -> Result<AlgebraDescription> {
    if class.kind == DiskMapKind::Identity {
        return Err(Error::UnsupportedConfiguration("the identity map adds nothing to C*(T_psi)".into()));
    }
    let c = phi.coefficients();
    let action = GroupAction::Automorphism { map: c.map(pair) };
    cert.push(
        SideCondition::SingleAutomorphism,
        "a single disk automorphism",
        Evidence::MapClasses { classes: vec![*class] },
    );
    let dev = coordinate_deviation(sym);
    if dev < COORDINATE_TOL {
        cert.push(SideCondition::CoordinateSymbol, "psi = z", Evidence::Symbol { max_deviation_from_z: dev });
        let mut min_dist = f64::INFINITY;
        for n in 1..=opts.orbit_bound.max(1) {
            let p = phi.iterate(n as i64)?;
            min_dist = min_dist.min(p.distance(&MoebiusMap::identity()));
            if p.is_identity() {
                return Err(Error::UnsupportedConfiguration(format!("phi^{n} is the identity; the action is not free")));
            }
        }
        cert.push(
            SideCondition::TopologicallyFree,
            format!("phi^n is not the identity for 1 <= n <= {}", opts.orbit_bound.max(1)),
            Evidence::Aperiodic { checked_up_to: opts.orbit_bound.max(1), min_distance_to_identity: min_dist },
        );
        let child = AlgebraDescription::ContinuousOn { space: Space::Circle };
        return Ok(AlgebraDescription::ExtensionByCompacts {
            quotient: Box::new(AlgebraDescription::CrossedProduct { child: Box::new(child), rank: 1, action }),
        });
    }
    let omega = as_rotation(phi)
        .ok_or_else(|| Error::UnsupportedConfiguration("automorphisms other than rotations need psi = z".into()))?;
    attest_irreducibility(sym, opts, cert)?;
    let tol = opts.invariance_gaps * sym.max_sample_gap();
    let inv = sym.curve_invariance(phi, tol)?;
    if !inv.invariant {
        return Err(Error::UnsupportedConfiguration(format!(
            "the rotation moves the curve by {:.3e} (tolerance {tol:.3e})",
            inv.distance
        )));
    }
    let finite_order = rotation_order(omega);
    if let Some(q) = finite_order {
        cert.notes.push(format!(
            "rotation of order {q}: the orbit space of the curve is homeomorphic to its image under z^{q}/|z|^{}",
            q - 1
        ));
    }
    cert.push(
        SideCondition::RotationInvariantCurve,
        "the rotation maps the image curve onto itself",
        Evidence::Invariance { distance: inv.distance, tol, finite_order },
    );
    let child = AlgebraDescription::ContinuousOn { space: Space::SampledCurve { grid_log2: sym.grid_log2() } };
    Ok(AlgebraDescription::ExtensionByCompacts {
        quotient: Box::new(AlgebraDescription::CrossedProduct { child: Box::new(child), rank: 1, action }),
    })
}

fn classify_non_automorphisms(
    sym: &CircleSymbol,
    maps: &[MoebiusMap],
    classes: &[DiskMapClass<f64>],
    opts: &ClassifyOptions,
    cert: &mut Certificate,
) -> Result<AlgebraDescription> {
    if classes.iter().any(|c| c.kind == DiskMapKind::StrictlyInterior) {
        return Err(Error::UnsupportedConfiguration("a map without boundary contact gives a compact C_phi".into()));
    }
    let b2b = classes.iter().filter(|c| c.kind == DiskMapKind::BoundaryToBoundary).count();
    if b2b > 0 {
        if maps.len() > 1 {
            return Err(Error::UnsupportedConfiguration(
                "a boundary-to-boundary map is only dispatched on its own".into(),
            ));
        }
        let bd = classes[0].boundary.expect("boundary-to-boundary maps carry boundary data");
        cert.push(
            SideCondition::NonAutomorphisms,
            "the map is not an automorphism",
            Evidence::MapClasses { classes: classes.to_vec() },
        );
        cert.push(
            SideCondition::BoundaryToBoundary,
            "phi fixes no point of T and maps gamma to eta != gamma",
            Evidence::BoundaryPair { gamma: pair(bd.gamma), eta: pair(bd.eta) },
        );
        let ss = symbol_space(sym, opts, cert)?;
        let gamma = ss.point(bd.gamma)?;
        let eta = ss.point(bd.eta)?;
        record_quotient(&ss, &[("gamma", bd.gamma), ("eta", bd.eta)], opts, cert)?;
        let distinct = match (gamma.label, eta.label) {
            (Some(g), Some(e)) => {
                if g == e {
                    return Err(Error::UnsupportedConfiguration("gamma and eta fall in the same class".into()));
                }
                Evidence::Labels { gamma: g, eta: e }
            }
            _ => Evidence::BoundaryPair { gamma: pair(bd.gamma), eta: pair(bd.eta) },
        };
        cert.push(SideCondition::DistinctClasses, "[gamma] != [eta]", distinct);
        return Ok(AlgebraDescription::MatrixBundleD { space: ss.space.clone(), gamma, eta });
    }
    // Every remaining map fixes a boundary point.
    let gammas: Vec<C64> = classes.iter().map(|c| c.boundary.expect("boundary data").gamma).collect();
    let spread = gammas.iter().map(|g| (g - gammas[0]).norm()).fold(0.0, f64::max);
    if spread > FIXED_POINT_TOL {
        return Err(Error::UnsupportedConfiguration("the maps have different boundary fixed points".into()));
    }
    let gamma = gammas[0];
    cert.push(
        SideCondition::NonAutomorphisms,
        "no map is an automorphism",
        Evidence::MapClasses { classes: classes.to_vec() },
    );
    cert.push(
        SideCondition::CommonBoundaryFixedPoint,
        "all maps fix the same gamma in T",
        Evidence::FixedPoint { gamma: pair(gamma), spread },
    );
    let ss = symbol_space(sym, opts, cert)?;
    record_quotient(&ss, &[("gamma", gamma)], opts, cert)?;
    let ideal = AlgebraDescription::VanishingIdeal { space: ss.space.clone(), point: ss.point(gamma)? };

    let derivs: Vec<f64> = classes.iter().map(|c| c.boundary.unwrap().derivative.re).collect();
    let parabolic: Vec<bool> = derivs.iter().map(|t| (t - 1.0).abs() < FIXED_POINT_TOL).collect();
    let mut sorted = derivs.clone();
    sorted.sort_by(f64::total_cmp);
    let second = if parabolic.iter().all(|&p| p) {
        cert.push(
            SideCondition::ParabolicDerivatives,
            "phi'(gamma) = 1 for every map",
            Evidence::Derivatives { values: derivs.clone() },
        );
        AlgebraDescription::CZeroUnitInterval
    } else {
        cert.push(
            SideCondition::DerivativeValues,
            "angular derivatives at gamma",
            Evidence::Derivatives { values: derivs.clone() },
        );
        let verdict = if parabolic.iter().any(|&p| p) {
            // ln 1 = 0 is a relation on its own.
            let k = parabolic.iter().position(|&p| p).unwrap();
            LogIndependence::DependentWithRelation((0..derivs.len()).map(|i| i64::from(i == k)).collect())
        } else {
            z_log_independence(&sorted, opts.log_bound, opts.log_tol)?
        };
        match verdict {
            LogIndependence::IndependentUpToBound(_) => {
                cert.push(
                    SideCondition::LogIndependence,
                    "ln phi_i'(gamma) are independent over Z",
                    Evidence::Independence { verdict, tol: opts.log_tol },
                );
                AlgebraDescription::CrossedProduct {
                    child: Box::new(AlgebraDescription::CZeroUnitInterval),
                    rank: sorted.len(),
                    action: GroupAction::Dilation { exponents: sorted },
                }
            }
            LogIndependence::DependentWithRelation(_) => {
                cert.push(
                    SideCondition::LogDependence,
                    "ln phi_i'(gamma) satisfy an integer relation",
                    Evidence::Independence { verdict, tol: opts.log_tol },
                );
                AlgebraDescription::UnresolvedGeneratedAlgebra { derivatives: sorted }
            }
        }
    };
    Ok(AlgebraDescription::MinimalUnitization {
        child: Box::new(AlgebraDescription::DirectSum { children: vec![ideal, second] }),
    })
}

/// JSON input of a classification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyInput {
    pub symbol: SymbolSource,
    pub maps: Vec<MoebiusMap>,
    #[serde(default)]
    pub options: ClassifyOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub canonical: String,
    pub description: AlgebraDescription,
    pub certificate: Certificate,
}

impl ClassifyInput {
    pub fn run(&self) -> Result<ClassifyOutput> {
        let sym = self.symbol.resolve()?;
        let (description, certificate) = classify_quotient(&sym, &self.maps, &self.options)?;
        Ok(ClassifyOutput { canonical: describe(&description), description, certificate })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ShiftVerdict {
    /// `phi^n(0)` and `phi^m(0)` are independent over the reals.
    GeneratesShift { n: i64, m: i64, values: [[f64; 2]; 2] },
    NoWitnessUpToBound(u32),
}

/// Looks for exponents `n, m` with `phi^n(0), phi^m(0)` independent over the
/// reals, trying `1..=bound` and then `-1..=-bound`.
pub fn shift_generation_test(m: &MoebiusMap, bound: u32) -> Result<ShiftVerdict> {
    if !m.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let b = bound as i64;
    let exps: Vec<i64> = (1..=b).chain((1..=b).map(|k| -k)).collect();
    let fwd = m.orbit(C64::new(0.0, 0.0), 1..=b)?;
    let back = m.inverse()?.orbit(C64::new(0.0, 0.0), 1..=b)?;
    let pts: Vec<C64> = fwd.into_iter().chain(back).collect();
    Ok(match r_independent_pair(&pts) {
        Some((i, j)) => ShiftVerdict::GeneratesShift { n: exps[i], m: exps[j], values: [pair(pts[i]), pair(pts[j])] },
        None => ShiftVerdict::NoWitnessUpToBound(bound),
    })
}

/// Shift recovered from `A = T* + t T T*`: `(A A* - conj(t) A - I) / t`, or `A*` when `t = 0`.
pub fn recover_shift(a: OperatorExpr, t: C64) -> OperatorExpr {
    if t == C64::new(0.0, 0.0) {
        return a.adjoint();
    }
    a.clone()
        .mul(a.clone().adjoint())
        .sub(a.scale(t.conj()))
        .sub(OperatorExpr::Identity)
        .scale(1.0 / t)
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub matrix: Matrix,
    /// Spectral norm distance to the shift on the leading `size / 2` block.
    pub error: f64,
    pub x: C64,
    pub y: C64,
    pub t: C64,
}

/// Rebuilds `T_z` from `C_phi1` and `C_phi2` for automorphisms whose values at 0
/// are independent over the reals.
pub fn prop52_reconstruct(phi1: &MoebiusMap, phi2: &MoebiusMap, size: usize) -> Result<Reconstruction> {
    if !phi1.is_automorphism() || !phi2.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let zero = C64::new(0.0, 0.0);
    let (a1, a2) = (phi1.apply(zero), phi2.apply(zero));
    if r_independent_pair(&[a1, a2]).is_none() {
        return Err(Error::DependentOrbitPoints);
    }
    // a1 x + a2 y = 1, conj(a1) x + conj(a2) y = 0.
    let det = a1 * a2.conj() - a2 * a1.conj();
    let x = a2.conj() / det;
    let y = -a1.conj() / det;
    let t = -(x * a1.norm_sqr() + y * a2.norm_sqr());
    // s_i = I - (1 - |a_i|^2) C_{phi_i^-1} C_{phi_i^-1}* = conj(a) T + a T* - |a|^2 T T*.
    let s = |phi: &MoebiusMap, a: C64| -> Result<OperatorExpr> {
        let c = OperatorExpr::composition(phi.inverse()?);
        Ok(OperatorExpr::Identity.sub(c.clone().mul(c.adjoint()).scale(C64::new(1.0 - a.norm_sqr(), 0.0))))
    };
    let a = s(phi1, a1)?.scale(x).add(s(phi2, a2)?.scale(y));
    let shift = recover_shift(a, t);
    let op = evaluate(&shift, size, 4)?;
    let keep = size / 2;
    let error = shift_distance(&op.matrix, keep)?;
    Ok(Reconstruction { matrix: op.matrix, error, x, y, t })
}

/// Spectral norm of the leading `keep` block of `m` minus the shift.
pub fn shift_distance(m: &Matrix, keep: usize) -> Result<f64> {
    let d = faer::Mat::from_fn(keep, keep, |i, j| m[(i, j)] - if i == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    crate::hardy_ops::spectral_norm(d.as_ref())
}
