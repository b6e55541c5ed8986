//! Verification suites. Each produces rows comparing two independently
//! computed quantities against a tolerance.

use std::f64::consts::PI;
use std::str::FromStr;

use harmonic_core::convolution::{
    convolve_direct_hn, convolve_spectral, direct_profile, kunze_stein_check, lp_norm, multiply, phi_it_norm,
    random_families,
};
use harmonic_core::density::{DensityModel, ModelKind};
use harmonic_core::eigen::{c_by_limit, jost_radius, solve_phi};
use harmonic_core::geometry::{c_via_boundary, phi_via_boundary};
use harmonic_core::transform::{RadialFunction, SpectralContext};
use harmonic_core::{Error, Result};
use num_complex::Complex64;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Roundtrip,
    Plancherel,
    Boundary,
    Convolution,
    KunzeStein,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "roundtrip" => Suite::Roundtrip,
            "plancherel" => Suite::Plancherel,
            "boundary" => Suite::Boundary,
            "convolution" => Suite::Convolution,
            "kunze-stein" => Suite::KunzeStein,
            "all" => Suite::All,
            other => return Err(format!("unknown suite {other:?}")),
        })
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Roundtrip => "roundtrip",
            Suite::Plancherel => "plancherel",
            Suite::Boundary => "boundary",
            Suite::Convolution => "convolution",
            Suite::KunzeStein => "kunze-stein",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Options of the multiplier suite.
#[derive(Debug, Clone, PartialEq)]
pub struct KunzeSteinOptions {
    pub exponents: Vec<f64>,
    pub families: usize,
}

impl Default for KunzeSteinOptions {
    fn default() -> Self {
        KunzeSteinOptions { exponents: vec![1.0, 1.5, 1.9], families: 20 }
    }
}

struct Rows<'a> {
    cfg: &'a RunConfig,
    rows: Vec<VerifyRow>,
}

impl Rows<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.cfg.verify_tol.map_or(default, |v| v.min(default))
    }

    /// |lhs - rhs| / scale ≤ tol.
    fn eq(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, scale: f64, tol: f64) {
        let tol = self.tol(tol);
        let abs_err = (lhs - rhs).abs();
        let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
        self.rows.push(VerifyRow { name: name.into(), lhs, rhs, abs_err, rel_err, tol, pass: rel_err <= tol });
    }

    /// lhs ≤ rhs up to a relative slack.
    fn le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        let tol = self.tol(tol);
        let abs_err = (lhs - rhs).max(0.0);
        let rel_err = abs_err / rhs.abs().max(f64::MIN_POSITIVE);
        self.rows.push(VerifyRow { name: name.into(), lhs, rhs, abs_err, rel_err, tol, pass: rel_err <= tol });
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// The constant C₀ known from the Jacobi-function literature, for cross-checks.
pub fn reference_c0(model: &DensityModel) -> Option<f64> {
    match *model.kind() {
        ModelKind::Hyperbolic { n } => Some(2f64.powi(n as i32 - 2) / PI),
        ModelKind::DamekRicci { q, .. } => Some(2f64.powi(q as i32 - 1) / PI),
        ModelKind::ExpPolynomial { .. } => None,
    }
}

fn calibration_bumps() -> Result<Vec<RadialFunction>> {
    Ok(vec![
        RadialFunction::smooth_gaussian(6.0)?,
        RadialFunction::smooth_gaussian(10.0)?,
        RadialFunction::gaussian_shell(10.0, 0.4)?,
    ])
}

fn roundtrip(model: &DensityModel, out: &mut Rows) -> Result<()> {
    let bumps = calibration_bumps()?;
    let ctx = SpectralContext::adaptive(model, &bumps, out.cfg.tol)?;
    let cal = ctx.calibrate_c0(&bumps)?;
    out.eq("c0_dispersion", cal.dispersion, 0.0, 1.0, 1e-6);
    if let Some(c0) = reference_c0(model) {
        out.eq("c0_vs_jacobi_literature", cal.c0, c0, c0, 1e-6);
    }
    for b in &bumps {
        let ft = ctx.transform(b)?;
        let rs = linspace(0.0, b.support_radius(), 41);
        let inv = ctx.invert(&ft, cal.c0, &rs)?;
        let sup = rs.iter().map(|&r| b.eval(r).abs()).fold(0.0, f64::max);
        let (mut worst, mut at) = (0.0, 0.0);
        for (r, v) in rs.iter().zip(&inv.values) {
            let e = (v - b.eval(*r)).abs();
            if e > worst {
                worst = e;
                at = *r;
            }
        }
        out.eq(format!("roundtrip[{}] at r={at:.3}", b.label()), b.eval(at) + worst, b.eval(at), sup, 1e-6);
        let outside = linspace(b.support_radius(), b.support_radius() + 1.0, 11);
        let inv = ctx.invert(&ft, cal.c0, &outside)?;
        let leak = inv.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        out.eq(format!("support_recovery[{}]", b.label()), leak, 0.0, sup, 1e-6);
    }
    Ok(())
}

fn plancherel(model: &DensityModel, out: &mut Rows) -> Result<()> {
    let f = RadialFunction::smooth_gaussian(8.0)?;
    let g = RadialFunction::gaussian_shell(10.0, 0.5)?;
    let h = RadialFunction::smooth_gaussian(14.0)?;
    let near = RadialFunction::smooth_gaussian(40.0)?;
    let far = RadialFunction::gaussian_shell(40.0, 2.7)?;
    let all = vec![f.clone(), g.clone(), h.clone(), near.clone(), far.clone()];
    let ctx = SpectralContext::adaptive(model, &all, out.cfg.tol)?;
    let c0 = ctx.calibrate_c0(&[f.clone(), h.clone()])?.c0;
    for (a, b) in [(&f, &f), (&g, &g), (&f, &g), (&g, &h), (&h, &h)] {
        let rep = ctx.plancherel_check(a, b, c0)?;
        out.eq(format!("plancherel[{},{}]", a.label(), b.label()), rep.lhs, rep.rhs, rep.norm_f * rep.norm_g, 1e-6);
    }
    let rep = ctx.plancherel_check(&near, &far, c0)?;
    out.eq("plancherel_disjoint_supports", rep.lhs, rep.rhs, rep.norm_f * rep.norm_g, 1e-8);
    Ok(())
}

fn hyperbolic_dim(model: &DensityModel, suite: &str) -> Result<u32> {
    match *model.kind() {
        ModelKind::Hyperbolic { n } => Ok(n),
        _ => Err(Error::Capability(format!("suite {suite} needs a hyperbolic model"))),
    }
}

fn boundary(model: &DensityModel, out: &mut Rows) -> Result<()> {
    let n = hyperbolic_dim(model, "boundary")? as usize;
    let rs = linspace(0.0, 5.0, 11);
    for &l in &linspace(0.0, 5.0, 6) {
        let lam = Complex64::new(l, 0.0);
        let table = solve_phi(model, lam, &rs, out.cfg.tol)?;
        let (mut worst, mut pair) = (0.0, (0.0, 0.0));
        for (r, p) in rs.iter().zip(&table.phi) {
            let b = phi_via_boundary(n, lam, *r, out.cfg.quad_order)?;
            let e = (b - p).norm();
            if e >= worst {
                worst = e;
                pair = (b.re, p.re);
            }
        }
        out.eq(format!("phi_via_boundary[lambda={l}]"), pair.0, pair.1, 1.0, 1e-6);
    }
    for &re in &linspace(0.0, 2.0, 5) {
        for &im in &linspace(-1.5, -0.1, 5) {
            let lam = Complex64::new(re, im);
            let a = c_via_boundary(n, lam, out.cfg.quad_order)?;
            let b = c_by_limit(model, lam, None)?;
            out.eq(format!("c_via_boundary[{re}{im:+}i]"), a.norm(), b.norm(), b.norm(), 1e-5);
            out.eq(format!("c_via_boundary_arg[{re}{im:+}i]"), (a / b).arg(), 0.0, 1.0, 1e-5);
        }
    }
    Ok(())
}

fn convolution(model: &DensityModel, out: &mut Rows) -> Result<()> {
    let n = hyperbolic_dim(model, "convolution")?;
    let f = RadialFunction::gaussian_shell(12.0, 0.3)?;
    let g = RadialFunction::smooth_gaussian(20.0)?;
    let ctx = SpectralContext::adaptive(model, &[f.clone(), g.clone()], out.cfg.tol)?;
    let c0 = ctx.calibrate_c0(&[f.clone(), g.clone()])?.c0;
    let rs = linspace(0.0, 3.0, 13);
    let direct = convolve_direct_hn(n, &f, &g, &rs)?;
    let reverse = convolve_direct_hn(n, &g, &f, &rs)?;
    let spectral = convolve_spectral(&ctx, &f, &g, c0, &rs)?;
    let sup = direct.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap = direct.iter().zip(&spectral).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.eq("spectral_vs_direct", sup + gap, sup, sup, 1e-6);
    let l1f = lp_norm(model, &|r| f.eval(r), f.support_radius(), 1.0);
    let l1g = lp_norm(model, &|r| g.eval(r), g.support_radius(), 1.0);
    let comm = direct.iter().zip(&reverse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.eq("commutativity", comm, 0.0, l1f * g.eval(0.0), 1e-8);
    let support = f.support_radius() + g.support_radius();
    let prof = direct_profile(n, &f, &g)?;
    let l1 = lp_norm(model, &prof, support, 1.0);
    let tol = out.tol(1e-8);
    out.rows.push(VerifyRow {
        name: "young_l1_bound".into(),
        lhs: l1,
        rhs: l1f * l1g,
        abs_err: (l1 - l1f * l1g).max(0.0),
        rel_err: (l1 - l1f * l1g).max(0.0),
        tol,
        pass: l1 <= l1f * l1g + tol,
    });
    let big = SpectralContext::new(model, support, ctx.grid().lambda_max, out.cfg.tol)?;
    let conv_hat = big.transform_profile(&prof, support)?;
    let prod = multiply(&big.transform(&f)?, &big.transform(&g)?)?;
    let top = prod.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let gap = conv_hat.values.iter().zip(&prod.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    out.eq("convolution_transform_identity", top + gap, top, top, 1e-6);
    Ok(())
}

fn kunze_stein(model: &DensityModel, opts: &KunzeSteinOptions, out: &mut Rows) -> Result<()> {
    let families = random_families(out.cfg.seed, opts.families)?;
    let mut funcs: Vec<RadialFunction> = families.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let bumps = vec![RadialFunction::smooth_gaussian(10.0)?, RadialFunction::smooth_gaussian(14.0)?];
    funcs.extend(bumps.iter().cloned());
    let ctx = SpectralContext::adaptive(model, &funcs, out.cfg.tol)?;
    let c0 = ctx.calibrate_c0(&bumps)?.c0;
    let r_max = jost_radius(model);
    for &p in &opts.exponents {
        let rep = kunze_stein_check(&ctx, p, &families, c0)?;
        for (&t, &v) in rep.t_grid.iter().zip(&rep.grid_norm_phi_it) {
            let far = phi_it_norm(model, t, rep.q, Some(2.0 * r_max))?.value;
            out.eq(format!("phi_it_norm_rmax_stable[p={p},t={t:.4}]"), v, far, far, 1e-8);
        }
        for (k, row) in rep.families.iter().enumerate() {
            out.le(format!("ratio_bound[p={p},family={k}]"), row.ratio, row.g_hat_sup / row.g_p, 1e-8);
            out.le(format!("hausdorff_young[p={p},family={k}]"), row.g_hat_sup, rep.c_p * row.g_p, 1e-8);
            out.eq(format!("chain[p={p},family={k}]"), row.chain_violation, 0.0, 1.0, 1e-8);
        }
    }
    Ok(())
}

fn applicable(model: &DensityModel, suite: Suite) -> bool {
    match suite {
        Suite::Boundary => matches!(model.kind(), ModelKind::Hyperbolic { .. }),
        Suite::Convolution => matches!(model.kind(), ModelKind::Hyperbolic { n } if *n <= 4),
        _ => true,
    }
}

/// Runs a suite; `All` runs every suite that applies to the model.
pub fn run(cfg: &RunConfig, model: &DensityModel, suite: Suite, ks: &KunzeSteinOptions) -> Result<Vec<VerifyRow>> {
    let mut out = Rows { cfg, rows: Vec::new() };
    let list: Vec<Suite> = if suite == Suite::All {
        [Suite::Roundtrip, Suite::Plancherel, Suite::Boundary, Suite::Convolution, Suite::KunzeStein]
            .into_iter()
            .filter(|s| applicable(model, *s))
            .collect()
    } else {
        vec![suite]
    };
    for s in list {
        match s {
            Suite::Roundtrip => roundtrip(model, &mut out)?,
            Suite::Plancherel => plancherel(model, &mut out)?,
            Suite::Boundary => boundary(model, &mut out)?,
            Suite::Convolution => convolution(model, &mut out)?,
            Suite::KunzeStein => kunze_stein(model, ks, &mut out)?,
            Suite::All => unreachable!(),
        }
    }
    Ok(out.rows)
}
