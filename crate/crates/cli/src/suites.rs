//! The verification suites. Each returns its checks; `run` wraps them in a report.

use std::f64::consts::TAU;

use faer::Mat;
use hardy_core::calkin_probe::{
    commutant_dimension, composition_covariance_probe_with, covariance_probe_with, fredholm_grid, irreducibility_evidence,
    parabolic_spectrum_check, square_grid, tail_norm_ladder_with, ProbeReport,
};
use hardy_core::classifier::prop52_reconstruct;
use hardy_core::hardy_ops::{evaluate, toeplitz_matrix, Matrix, OperatorExpr};
use hardy_core::moebius::Moebius;
use hardy_core::{CircleSymbol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{cx, Suite, SuiteConfig};
use crate::error::{Error, Result};
use crate::report::{Check, SuiteReport};
use crate::spec::grid_for;

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_ladder(p: &ProbeReport) -> String {
    let v: Vec<String> = p.ladder.iter().map(|l| format!("{:.3e}", l.value)).collect();
    format!("ladder [{}], ratio {:.3}", v.join(", "), p.decay_ratio())
}

fn z_symbol(working: usize) -> Result<CircleSymbol> {
    Ok(CircleSymbol::power(1, grid_for(working))?)
}

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.check(suite)?;
    let checks = match suite {
        Suite::Jury => jury(cfg)?,
        Suite::Semigroup => semigroup(cfg)?,
        Suite::Thm22 => residual(cfg)?,
        Suite::Covariance => covariance(cfg)?,
        Suite::ParabolicSpectrum => parabolic(cfg)?,
        Suite::Coburn => coburn(cfg)?,
        Suite::Prop52 => reconstruct(cfg)?,
        Suite::Irreducibility => irreducibility(cfg)?,
        Suite::EssentialNormality => normality(cfg)?,
        Suite::All => return Err(Error::Config("'all' is not a single suite".into())),
    };
    Ok(SuiteReport::new(suite, cfg, checks))
}

/// `(1 - |a|^2) C C* = (I - conj(a) T_z)(I - conj(a) T_z)*` for the automorphism taking `a` to 0.
fn jury(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let j = &cfg.jury;
    let tz = OperatorExpr::toeplitz(z_symbol(j.size * j.working_factor)?);
    let mut checks = Vec::new();
    for &p in &j.points {
        let a = cx(p);
        let phi = Moebius::disk_automorphism(C64::new(1.0, 0.0), a)?;
        let cp = OperatorExpr::composition(phi);
        let f = OperatorExpr::Identity.sub(tz.clone().scale(a.conj()));
        let e = cp.clone().mul(cp.adjoint()).scale(C64::new(1.0 - a.norm_sqr(), 0.0)).sub(f.clone().mul(f.adjoint()));
        let v = evaluate(&e, j.size, j.working_factor)?.interior_norm(j.interior)?;
        checks.push(
            Check::new(format!("a = {}", fmt_c(a)), v < j.tol, format!("interior norm {v:.3e} (tol {:e})", j.tol)).with_value("interior_norm", v),
        );
    }
    Ok(checks)
}

/// Map-level laws over random draws, the derivative values at gamma and the operator-level law.
fn semigroup(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let s = &cfg.semigroup;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (mut rho_err, mut psi_err, mut deriv_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..s.draws {
        let g = C64::from_polar(1.0, rng.random_range(0.0..TAU));
        let a = C64::new(rng.random_range(0.0..4.0), rng.random_range(-4.0..4.0));
        let b = C64::new(rng.random_range(0.0..4.0), rng.random_range(-4.0..4.0));
        let lhs = Moebius::parabolic(g, a)?.compose(&Moebius::parabolic(g, b)?)?;
        rho_err = rho_err.max(lhs.distance(&Moebius::parabolic(g, a + b)?));
        let (t1, t2) = (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        let lhs = Moebius::psi(g, t1)?.compose(&Moebius::psi(g, t2)?)?;
        psi_err = psi_err.max(lhs.distance(&Moebius::psi(g, t1 * t2)?));
        deriv_err = deriv_err.max((Moebius::psi(g, t1)?.derivative(g) - t1).norm());
        deriv_err = deriv_err.max((Moebius::parabolic(g, a)?.derivative(g) - 1.0).norm());
    }
    let tol = s.map_tol;
    let mut checks = vec![
        Check::new("rho_a o rho_b = rho_(a+b)", rho_err < tol, format!("max distance {rho_err:.3e} over {} draws", s.draws)).with_value("max_distance", rho_err),
        Check::new("psi_s o psi_t = psi_st", psi_err < tol, format!("max distance {psi_err:.3e} over {} draws", s.draws)).with_value("max_distance", psi_err),
        Check::new("derivatives at gamma", deriv_err < tol, format!("max deviation {deriv_err:.3e}")).with_value("max_deviation", deriv_err),
    ];
    let one = C64::new(1.0, 0.0);
    for &[a, b] in &s.operator_pairs {
        let (a, b) = (cx(a), cx(b));
        let c = |x| -> Result<OperatorExpr> { Ok(OperatorExpr::composition(Moebius::parabolic(one, x)?)) };
        let e = c(a)?.mul(c(b)?).sub(c(a + b)?);
        let v = evaluate(&e, s.size, s.working_factor)?.interior_norm(s.interior)?;
        let name = format!("C[rho_{}] C[rho_{}] = C[rho_{}]", fmt_c(a), fmt_c(b), fmt_c(a + b));
        checks.push(Check::new(name, v < s.operator_tol, format!("interior norm {v:.3e}")).with_value("interior_norm", v));
    }
    Ok(checks)
}

/// `T_f C_phi - f(gamma) C_phi` is compact when phi fixes gamma.
fn residual(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (r, l) = (&cfg.thm22, &cfg.ladder);
    let phi = r.map.build()?;
    let gamma = cx(r.gamma);
    if (phi.apply(gamma) - gamma).norm() > 1e-9 {
        return Err(Error::Config(format!("{} does not fix gamma = {}", r.map, fmt_c(gamma))));
    }
    let sym = r.symbol.build_for(l.eval_size / 2 * l.working_factor)?;
    let fg = sym.eval_angle(gamma.arg());
    let c = OperatorExpr::composition(phi);
    let e = OperatorExpr::toeplitz(sym).mul(c.clone()).sub(c.scale(fg));
    let p = tail_norm_ladder_with(&e, &l.cuts, l.eval_size, &l.options())?;
    let detail = fmt_ladder(&p);
    Ok(vec![Check::from_probe(format!("T[{}] C[{}] - f(gamma) C", r.symbol, r.map), p, detail)])
}

fn covariance(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (c, l) = (&cfg.covariance, &cfg.ladder);
    let (p1, p2) = (c.first.build()?, c.second.build()?);
    let sym = c.symbol.build_for(l.eval_size / 2 * l.working_factor)?;
    let a = covariance_probe_with(&p1, &sym, &l.cuts, l.eval_size, &l.options())?;
    let b = composition_covariance_probe_with(&p1, &p2, &l.cuts, l.eval_size, &l.options())?;
    let (da, db) = (fmt_ladder(&a), fmt_ladder(&b));
    Ok(vec![
        Check::from_probe(format!("U T[{}] U* - T[f o phi], phi = {}", c.symbol, c.first), a, da),
        Check::from_probe(format!("U[{}] U[{}] - U[composite]", c.first, c.second), b, db),
    ])
}

fn parabolic(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = &cfg.parabolic_spectrum;
    let n = p.t_points;
    let t_grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let far: Vec<C64> = p.far_points.iter().map(|&z| cx(z)).collect();
    let mut checks = Vec::new();
    for &a in &p.a_values {
        let a = cx(a);
        let r = parabolic_spectrum_check(cx(p.gamma), a, &t_grid, &far, p.size)?;
        let detail = format!(
            "on-curve fraction {:.3}, far min sigma {:.3e}",
            r.metrics.get("on_curve_fraction").copied().unwrap_or(f64::NAN),
            r.metrics.get("far_points_min_sigma").copied().unwrap_or(f64::NAN)
        );
        checks.push(Check::from_probe(format!("a = {}", fmt_c(a)), r, detail));
    }
    Ok(checks)
}

fn coburn(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = &cfg.coburn;
    let lambdas = square_grid(c.lo, c.hi, c.points_per_side);
    let grid = c.grid_log2.max(grid_for(*c.sizes.last().unwrap()));
    let mut checks = Vec::new();
    for s in &c.symbols {
        let r = fredholm_grid(&s.build(grid)?, &lambdas, &c.sizes, c.delta)?;
        let m = |k: &str| r.metrics.get(k).copied().unwrap_or(0.0);
        let detail = format!("{}/{} off-curve points consistent", m("consistent_points"), m("off_curve_points"));
        checks.push(Check::from_probe(format!("T[{s}]"), r, detail));
    }
    Ok(checks)
}

fn reconstruct(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let r = &cfg.prop52;
    let (p1, p2) = (r.first.build()?, r.second.build()?);
    let errors = r.sizes.iter().map(|&n| Ok((n, prop52_reconstruct(&p1, &p2, n)?.error))).collect::<Result<Vec<_>>>()?;
    let first = errors[0].1;
    let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
    let at_roundoff = errors.iter().all(|e| e.1 < r.roundoff);
    let listing: Vec<String> = errors.iter().map(|(n, e)| format!("{e:.3e} at {n}")).collect();
    let mut accuracy = Check::new("error at smallest size", first < r.tol, format!("{first:.3e} (tol {:e})", r.tol));
    let mut trend = Check::new(
        "error decreases with size",
        decreasing || at_roundoff,
        format!("{}{}", listing.join(", "), if at_roundoff && !decreasing { " (all at roundoff)" } else { "" }),
    );
    for (n, e) in &errors {
        accuracy = accuracy.with_value(&format!("error_{n}"), *e);
    }
    trend = trend.with_value("strictly_decreasing", f64::from(u8::from(decreasing)));
    Ok(vec![accuracy, trend])
}

fn irreducibility(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let i = &cfg.irreducibility;
    let n = i.size;
    let t = toeplitz_matrix(&i.symbol.build_for(n)?, n)?;
    let r = irreducibility_evidence(t.as_ref(), &format!("T[{}] at size {n}", i.symbol))?;
    let dim = r.ladder[0].value;
    let diag: Matrix = Mat::from_fn(n, n, |a, b| if a == b { C64::new((a + 1) as f64, 0.0) } else { C64::new(0.0, 0.0) });
    let dd = commutant_dimension(diag.as_ref())?;
    Ok(vec![
        Check::from_probe(format!("T[{}] commutant", i.symbol), r, format!("dimension {dim} (want 1)")),
        Check::new(format!("diag(1..{n}) commutant"), dd == n, format!("dimension {dd} (want {n})")).with_value("dimension", dd as f64),
    ])
}

fn normality(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (e, l) = (&cfg.essential_normality, &cfg.ladder);
    let c = OperatorExpr::composition(e.map.build()?);
    let expr = c.clone().adjoint().mul(c.clone()).sub(c.clone().mul(c.adjoint()));
    let p = tail_norm_ladder_with(&expr, &l.cuts, l.eval_size, &l.options())?;
    let first = p.ladder[0].value;
    let detail = fmt_ladder(&p);
    Ok(vec![
        Check::from_probe(format!("C*C - CC* for C[{}]", e.map), p, detail),
        Check::new("nonzero at first cut", first > e.min_first, format!("{first:.3e} (min {:e})", e.min_first)).with_value("first", first),
    ])
}
