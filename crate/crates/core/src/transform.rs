//! Spherical Fourier transform, its inversion and the Plancherel identity,
//! plus the full Fourier transform on H².
//!
//! Conventions: f̂(λ) = ∫₀^∞ u(r) φ_λ(r) A(r) dr and
//! u(r) = C₀ ∫₀^∞ f̂(λ) φ_λ(r) |c(λ)|⁻² dλ, with C₀ calibrated numerically.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::density::{DensityModel, ModelKind};
use crate::eigen::{compute_c, jost_radius, phi_values};
use crate::error::{Error, Result};
use crate::geometry::{busemann, BoundaryDirection, HyperboloidPoint};
use crate::numerics::quad::{gauss_legendre, Rule};

/// Gaussian factors below e^{-37} are treated as zero when placing cutoffs.
const NEGLIGIBLE_EXPONENT: f64 = 37.0;
const PANEL_ORDER: usize = 16;
/// Width of the coarse r-panels; the fine rule halves it.
const R_PANEL: f64 = 0.125;
/// Phase budget per λ-panel in units of the oscillation rate.
const LAMBDA_PHASE: f64 = 8.0;
const TAIL_REL: f64 = 1e-12;
const MAX_LAMBDA: f64 = 400.0;
const DISPERSION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Compactly supported and C^∞ (with smooth even extension).
    Smooth,
    /// Only continuous; inversion claims do not apply.
    Continuous,
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial profile u with u(r) = 0 for r ≥ support.
#[derive(Clone)]
pub struct RadialFunction {
    profile: Profile,
    support: f64,
    smoothness: Smoothness,
    label: String,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

/// C^∞ step: 1 for t ≤ 0, 0 for t ≥ 1.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - t)).exp();
    let b = (-1.0 / t).exp();
    a / (a + b)
}

fn cutoff_width(support: f64) -> f64 {
    (0.25 * support).min(0.5)
}

impl RadialFunction {
    pub fn new(
        label: impl Into<String>,
        support: f64,
        smoothness: Smoothness,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(Error::Domain(format!("support radius must be positive and finite, got {support}")));
        }
        Ok(RadialFunction {
            profile: Arc::new(profile),
            support,
            smoothness,
            label: label.into(),
        })
    }

    pub fn zero(support: f64) -> Result<Self> {
        Self::new("zero", support, Smoothness::Smooth, |_| 0.0)
    }

    /// e^{-ar²} times a C^∞ cutoff that falls from 1 to 0 on the last
    /// min(R/4, 1/2) of [0, R].
    pub fn gaussian(a: f64, support: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("Gaussian rate must be positive, got {a}")));
        }
        let w = cutoff_width(support);
        let start = support - w;
        Self::new(format!("gaussian(a={a},R={support})"), support, Smoothness::Smooth, move |r| {
            (-a * r * r).exp() * smooth_step((r - start) / w)
        })
    }

    /// Gaussian whose support is placed where e^{-ar²} is already negligible,
    /// so the cutoff does not affect the decay of f̂ above roundoff.
    pub fn smooth_gaussian(a: f64) -> Result<Self> {
        Self::gaussian(a, (NEGLIGIBLE_EXPONENT / a).sqrt() + 0.5)
    }

    /// e^{-a(r-c)²} + e^{-a(r+c)²}, cut off smoothly where negligible on both
    /// sides. When c is large enough the profile vanishes near r = 0.
    pub fn gaussian_shell(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("invalid shell parameters a={a}, c={c}")));
        }
        let d = (NEGLIGIBLE_EXPONENT / a).sqrt();
        let w = 0.25;
        let outer_start = c + d;
        let support = outer_start + w;
        let inner_end = c - d;
        let inner = inner_end - w > 0.0;
        Self::new(format!("shell(a={a},c={c})"), support, Smoothness::Smooth, move |r| {
            let mut v = (-a * (r - c) * (r - c)).exp() + (-a * (r + c) * (r + c)).exp();
            v *= smooth_step((r - outer_start) / w);
            if inner {
                v *= 1.0 - smooth_step((r - (inner_end - w)) / w);
            }
            v
        })
    }

    pub fn scaled(&self, k: f64) -> Self {
        let p = self.profile.clone();
        RadialFunction {
            profile: Arc::new(move |r| k * p(r)),
            support: self.support,
            smoothness: self.smoothness,
            label: format!("{k}*{}", self.label),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.support {
            0.0
        } else {
            (self.profile)(r.abs())
        }
    }

    /// Smallest r ≥ 0 with u ≠ 0 on a fine scan; used to detect disjoint supports.
    pub fn inner_radius(&self) -> f64 {
        let steps = 4096;
        (0..steps)
            .map(|k| self.support * k as f64 / steps as f64)
            .find(|&r| self.eval(r) != 0.0)
            .unwrap_or(self.support)
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone)]
pub struct SphericalTransform {
    pub model: String,
    pub lambda_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// max |f̂| difference between the r-rule and the rule with halved panels.
    pub error_estimate: f64,
    pub support_radius: f64,
}

/// Composite Gauss quadrature in λ on (0, Λmax) weighted by |c(λ)|⁻².
#[derive(Debug, Clone)]
pub struct PlancherelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// |c(λ)|⁻² at the nodes.
    pub density: Vec<f64>,
    /// Largest relative error bound of c over the nodes.
    pub c_error: f64,
    pub panel_width: f64,
    pub lambda_max: f64,
}

/// λ-panel width for functions supported in [0, R]: inversion at r ≤ R
/// multiplies oscillations of rate ≤ R from f̂ and from φ_λ(r).
fn lambda_panel_width(support: f64) -> f64 {
    (LAMBDA_PHASE / (2.0 * support + 1.0)).min(2.0)
}

/// Nodes of the two r-rules merged into one increasing list.
struct RadialRules {
    coarse: Rule,
    fine: Rule,
    merged: Vec<f64>,
    coarse_idx: Vec<usize>,
    fine_idx: Vec<usize>,
}

impl RadialRules {
    fn new(support: f64) -> Self {
        let panels = (support / R_PANEL).ceil().max(1.0) as usize;
        let coarse = Rule::composite(0.0, support, panels, PANEL_ORDER);
        let fine = Rule::composite(0.0, support, 2 * panels, PANEL_ORDER);
        let mut merged: Vec<f64> = coarse.nodes.iter().chain(&fine.nodes).copied().collect();
        merged.sort_by(f64::total_cmp);
        merged.dedup();
        let find = |x: &f64| merged.binary_search_by(|m| m.total_cmp(x)).unwrap();
        let coarse_idx = coarse.nodes.iter().map(find).collect();
        let fine_idx = fine.nodes.iter().map(find).collect();
        RadialRules { coarse, fine, merged, coarse_idx, fine_idx }
    }
}

/// φ_λ on both r-rules at one λ node.
struct NodeData {
    lambda: f64,
    weight: f64,
    density: f64,
    c_rel_err: f64,
    phi_coarse: Vec<f64>,
    phi_fine: Vec<f64>,
}

/// Shared machinery for transforms of functions supported in [0, R]:
/// the Plancherel grid and φ_λ tabulated on two radial rules.
pub struct SpectralContext {
    model: DensityModel,
    support: f64,
    tol: f64,
    rules: RadialRules,
    coarse_weight: Vec<f64>,
    fine_weight: Vec<f64>,
    nodes: Vec<NodeData>,
    grid: PlancherelGrid,
}

impl fmt::Debug for SpectralContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralContext")
            .field("model", &self.model.label())
            .field("support", &self.support)
            .field("lambda_max", &self.grid.lambda_max)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 1e-14 && tol < 1e-2) {
        return Err(Error::Precondition(format!("tolerance must lie in [1e-14, 1e-2), got {tol}")));
    }
    Ok(())
}

impl SpectralContext {
    /// Fixed grid reaching at least `lambda_max`.
    pub fn new(model: &DensityModel, support: f64, lambda_max: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(lambda_max > 0.0 && lambda_max <= MAX_LAMBDA) {
            return Err(Error::Domain(format!("lambda_max must lie in (0, {MAX_LAMBDA}], got {lambda_max}")));
        }
        let mut ctx = Self::empty(model, support, tol)?;
        let h = ctx.grid.panel_width;
        let panels = (lambda_max / h).ceil() as usize;
        for k in 0..panels {
            ctx.push_panel(k as f64 * h, (k + 1) as f64 * h)?;
        }
        Ok(ctx)
    }

    /// Grows Λmax panel by panel until, for every function, the last two
    /// panels of ∫ f̂ |c|⁻² dλ are below 1e-12 of the running integral or
    /// below the roundoff floor of f̂.
    pub fn adaptive(model: &DensityModel, funcs: &[RadialFunction], tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if funcs.is_empty() {
            return Err(Error::Precondition("adaptive grid needs at least one function".into()));
        }
        let support = funcs.iter().map(|f| f.support).fold(0.0, f64::max);
        let mut ctx = Self::empty(model, support, tol)?;
        let h = ctx.grid.panel_width;
        let samples: Vec<Vec<f64>> = funcs.iter().map(|f| ctx.fine_samples(f)).collect();
        let l1: Vec<f64> = samples.iter().map(|s| s.iter().map(|v| v.abs()).sum::<f64>()).collect();
        let mut totals = vec![0.0; funcs.len()];
        let mut quiet = vec![0usize; funcs.len()];
        let mut k = 0usize;
        loop {
            let lo = k as f64 * h;
            if lo >= MAX_LAMBDA {
                return Err(Error::numeric("spectral tail resolution", f64::NAN, TAIL_REL));
            }
            let first = ctx.nodes.len();
            ctx.push_panel(lo, lo + h)?;
            for (i, s) in samples.iter().enumerate() {
                let mut part = 0.0;
                let mut floor = 0.0;
                for nd in &ctx.nodes[first..] {
                    let fh: f64 = nd.phi_fine.iter().zip(s).map(|(p, v)| p * v).sum();
                    part += nd.weight * nd.density * fh;
                    floor += nd.weight * nd.density * 1e-15 * l1[i];
                }
                totals[i] += part;
                let small = part.abs() <= TAIL_REL * totals[i].abs() || part.abs() <= floor;
                quiet[i] = if small { quiet[i] + 1 } else { 0 };
            }
            k += 1;
            if quiet.iter().all(|&q| q >= 2) {
                break;
            }
        }
        Ok(ctx)
    }

    fn empty(model: &DensityModel, support: f64, tol: f64) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(Error::Domain(format!("support radius must be positive and finite, got {support}")));
        }
        let rules = RadialRules::new(support);
        let weight = |rule: &Rule| -> Vec<f64> {
            rule.nodes.iter().zip(&rule.weights).map(|(&r, &w)| w * model.a(r)).collect()
        };
        let coarse_weight = weight(&rules.coarse);
        let fine_weight = weight(&rules.fine);
        Ok(SpectralContext {
            model: model.clone(),
            support,
            tol,
            rules,
            coarse_weight,
            fine_weight,
            nodes: Vec::new(),
            grid: PlancherelGrid {
                nodes: Vec::new(),
                weights: Vec::new(),
                density: Vec::new(),
                c_error: 0.0,
                panel_width: lambda_panel_width(support),
                lambda_max: 0.0,
            },
        })
    }

    fn push_panel(&mut self, lo: f64, hi: f64) -> Result<()> {
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let r_jost = jost_radius(&self.model);
        let model = &self.model;
        let rules = &self.rules;
        let tol = self.tol.min(1e-12);
        let new: Vec<NodeData> = gx
            .par_iter()
            .zip(gw.par_iter())
            .map(|(x, w)| {
                let lambda = mid + half * x;
                let lam = Complex64::new(lambda, 0.0);
                let c = compute_c(model, lam, Some(r_jost), tol)?;
                let phi = phi_values(model, lam, &rules.merged, tol)?;
                Ok(NodeData {
                    lambda,
                    weight: half * w,
                    density: c.value.norm_sqr().recip(),
                    c_rel_err: c.error_bound / c.value.norm(),
                    phi_coarse: rules.coarse_idx.iter().map(|&j| phi[j].re).collect(),
                    phi_fine: rules.fine_idx.iter().map(|&j| phi[j].re).collect(),
                })
            })
            .collect::<Result<_>>()?;
        for nd in &new {
            self.grid.nodes.push(nd.lambda);
            self.grid.weights.push(nd.weight);
            self.grid.density.push(nd.density);
            self.grid.c_error = self.grid.c_error.max(2.0 * nd.c_rel_err);
        }
        self.grid.lambda_max = hi;
        self.nodes.extend(new);
        Ok(())
    }

    pub fn model(&self) -> &DensityModel {
        &self.model
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn grid(&self) -> &PlancherelGrid {
        &self.grid
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Nodes of the fine radial rule on [0, R].
    pub fn radial_nodes(&self) -> &[f64] {
        &self.rules.fine.nodes
    }

    fn fine_samples(&self, f: &RadialFunction) -> Vec<f64> {
        self.rules.fine.nodes.iter().zip(&self.fine_weight).map(|(&r, w)| w * f.eval(r)).collect()
    }

    fn check_support(&self, support: f64) -> Result<()> {
        if support > self.support * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "function support {support} exceeds the context radius {}",
                self.support
            )));
        }
        Ok(())
    }

    /// Spherical transform of f on the Plancherel grid.
    pub fn transform(&self, f: &RadialFunction) -> Result<SphericalTransform> {
        self.check_support(f.support)?;
        self.transform_profile(&|r| f.eval(r), f.support)
    }

    /// Spherical transform of a profile given as a closure, assumed to vanish
    /// beyond `support`.
    pub fn transform_profile(&self, u: &(dyn Fn(f64) -> f64 + Sync), support: f64) -> Result<SphericalTransform> {
        self.check_support(support)?;
        let coarse: Vec<f64> = self
            .rules
            .coarse
            .nodes
            .iter()
            .zip(&self.coarse_weight)
            .map(|(&r, w)| w * u(r))
            .collect();
        let fine: Vec<f64> = self.rules.fine.nodes.iter().zip(&self.fine_weight).map(|(&r, w)| w * u(r)).collect();
        let mut values = Vec::with_capacity(self.nodes.len());
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for nd in &self.nodes {
            let a: f64 = nd.phi_coarse.iter().zip(&coarse).map(|(p, v)| p * v).sum();
            let b: f64 = nd.phi_fine.iter().zip(&fine).map(|(p, v)| p * v).sum();
            err = err.max((a - b).abs());
            scale = scale.max(b.abs());
            values.push(Complex64::new(b, 0.0));
        }
        if err > self.tol * scale.max(1.0) {
            return Err(Error::numeric("spherical transform quadrature", err, self.tol));
        }
        Ok(SphericalTransform {
            model: self.model.label(),
            lambda_grid: self.grid.nodes.clone(),
            values,
            error_estimate: err,
            support_radius: support,
        })
    }

    fn check_grid(&self, ft: &SphericalTransform) -> Result<()> {
        if ft.lambda_grid.len() != self.grid.nodes.len()
            || ft.lambda_grid.iter().zip(&self.grid.nodes).any(|(a, b)| a != b)
        {
            return Err(Error::Precondition("transform was not sampled on this context's grid".into()));
        }
        Ok(())
    }

    /// C₀ ∫ f̂ |c|⁻² dλ (the inversion at r = 0) per unit C₀.
    fn inversion_at_origin(&self, ft: &SphericalTransform) -> f64 {
        ft.values
            .iter()
            .zip(&self.nodes)
            .map(|(v, nd)| nd.weight * nd.density * v.re)
            .sum()
    }

    pub fn calibrate_c0(&self, bumps: &[RadialFunction]) -> Result<C0Calibration> {
        if bumps.len() < 2 {
            return Err(Error::Precondition("C0 calibration needs at least two bumps".into()));
        }
        let mut per_bump = Vec::with_capacity(bumps.len());
        for (k, b) in bumps.iter().enumerate() {
            if b.smoothness != Smoothness::Smooth {
                return Err(Error::Precondition(format!("bump {} is not smooth", b.label)));
            }
            if bumps[..k].iter().any(|o| o.label == b.label) {
                return Err(Error::Precondition(format!("duplicate bump {}", b.label)));
            }
            let u0 = b.eval(0.0);
            if u0 == 0.0 {
                return Err(Error::Precondition(format!("bump {} vanishes at the origin", b.label)));
            }
            let ft = self.transform(b)?;
            per_bump.push(u0 / self.inversion_at_origin(&ft));
        }
        let mean = per_bump.iter().sum::<f64>() / per_bump.len() as f64;
        let max = per_bump.iter().copied().fold(f64::MIN, f64::max);
        let min = per_bump.iter().copied().fold(f64::MAX, f64::min);
        let dispersion = (max - min) / mean.abs();
        if !(dispersion < DISPERSION_LIMIT) || !(mean > 0.0) {
            return Err(Error::numeric("C0 calibration dispersion", dispersion, DISPERSION_LIMIT));
        }
        Ok(C0Calibration {
            c0: mean,
            per_bump,
            dispersion,
            lambda_max: self.grid.lambda_max,
        })
    }

    /// u(r) = C₀ Σ w f̂ φ_λ(r) |c|⁻² at arbitrary radii ≥ 0.
    pub fn invert(&self, ft: &SphericalTransform, c0: f64, r_grid: &[f64]) -> Result<Inversion> {
        self.check_grid(ft)?;
        if r_grid.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(Error::Domain("evaluation radii must be finite and non-negative".into()));
        }
        let mut order: Vec<usize> = (0..r_grid.len()).collect();
        order.sort_by(|&a, &b| r_grid[a].total_cmp(&r_grid[b]));
        let mut sorted: Vec<f64> = order.iter().map(|&i| r_grid[i]).collect();
        sorted.dedup();
        let tol = self.tol.min(1e-12);
        let coeffs: Vec<(f64, f64)> = ft
            .values
            .iter()
            .zip(&self.nodes)
            .map(|(v, nd)| (nd.lambda, c0 * nd.weight * nd.density * v.re))
            .collect();
        let active: Vec<(f64, f64)> = coeffs.iter().copied().filter(|c| c.1 != 0.0).collect();
        let partials: Vec<Vec<f64>> = active
            .par_iter()
            .map(|&(l, k)| {
                let phi = phi_values(&self.model, Complex64::new(l, 0.0), &sorted, tol)?;
                Ok(phi.iter().map(|p| k * p.re).collect())
            })
            .collect::<Result<_>>()?;
        let mut acc = vec![0.0; sorted.len()];
        for p in &partials {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        let values = r_grid
            .iter()
            .map(|r| acc[sorted.binary_search_by(|s| s.total_cmp(r)).unwrap()])
            .collect();
        let last_panel: f64 = coeffs.iter().rev().take(PANEL_ORDER).map(|c| c.1.abs()).sum();
        let total: f64 = coeffs.iter().map(|c| c.1).sum::<f64>().abs();
        let tail_bound = last_panel;
        if tail_bound > 1e-8 * total.max(f64::MIN_POSITIVE) && total != 0.0 {
            return Err(Error::numeric("spectral tail", tail_bound / total, 1e-8));
        }
        Ok(Inversion {
            r_grid: r_grid.to_vec(),
            values,
            tail_bound,
        })
    }

    /// ∫ f g A dr against C₀ ∫ f̂ ĝ |c|⁻² dλ.
    pub fn plancherel_check(&self, f: &RadialFunction, g: &RadialFunction, c0: f64) -> Result<PlancherelReport> {
        let fh = self.transform(f)?;
        let gh = self.transform(g)?;
        let fs: Vec<f64> = self.rules.fine.nodes.iter().map(|&r| f.eval(r)).collect();
        let gs: Vec<f64> = self.rules.fine.nodes.iter().map(|&r| g.eval(r)).collect();
        let w = &self.fine_weight;
        let lhs: f64 = (0..w.len()).map(|j| w[j] * fs[j] * gs[j]).sum();
        let norm_f = (0..w.len()).map(|j| w[j] * fs[j] * fs[j]).sum::<f64>().sqrt();
        let norm_g = (0..w.len()).map(|j| w[j] * gs[j] * gs[j]).sum::<f64>().sqrt();
        let rhs: f64 = c0
            * self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, nd)| nd.weight * nd.density * (fh.values[i] * gh.values[i].conj()).re)
                .sum::<f64>();
        let abs_err = (lhs - rhs).abs();
        let scale = norm_f * norm_g;
        Ok(PlancherelReport {
            lhs,
            rhs,
            abs_err,
            rel_err: if scale > 0.0 { abs_err / scale } else { abs_err },
            norm_f,
            norm_g,
        })
    }

    /// ‖f‖₂ in space, by the fine radial rule.
    pub fn l2_norm(&self, u: &dyn Fn(f64) -> f64) -> f64 {
        self.rules
            .fine
            .nodes
            .iter()
            .zip(&self.fine_weight)
            .map(|(&r, w)| w * u(r) * u(r))
            .sum::<f64>()
            .sqrt()
    }

    /// (C₀ ∫ |ĥ|² |c|⁻² dλ)^{1/2} for values on this grid.
    pub fn spectral_l2_norm(&self, values: &[Complex64], c0: f64) -> f64 {
        (c0 * values
            .iter()
            .zip(&self.nodes)
            .map(|(v, nd)| nd.weight * nd.density * v.norm_sqr())
            .sum::<f64>())
        .sqrt()
    }

    fn require_h2(&self) -> Result<()> {
        match self.model.kind() {
            ModelKind::Hyperbolic { n: 2 } => Ok(()),
            _ => Err(Error::Capability("the full Fourier transform is implemented on H² only".into())),
        }
    }

    /// f̃(λ, ξ) = ∫ f(y) e^{(-iλ-ρ)B_{ξ,o}(y)} dvol(y) on the Plancherel grid
    /// and `angles` equally spaced boundary points. The angular sum at each
    /// radius is a circular convolution and is done by FFT.
    pub fn full_ft_h2(
        &self,
        f: &(dyn Fn(&HyperboloidPoint) -> f64 + Sync),
        support: f64,
        angles: usize,
    ) -> Result<FullTransform> {
        self.require_h2()?;
        self.check_support(support)?;
        if angles < 8 || !angles.is_power_of_two() {
            return Err(Error::Precondition(format!("angle count must be a power of two >= 8, got {angles}")));
        }
        let n = angles;
        let theta: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let rule = &self.rules.fine;
        // angular spectra of f at each radius, with weights w_j A(r_j)/N² folded in
        let mut spectra: Vec<(usize, Vec<Complex64>)> = Vec::new();
        let mut sup = 0.0f64;
        for (j, &r) in rule.nodes.iter().enumerate() {
            let mut buf: Vec<Complex64> = theta
                .iter()
                .map(|&t| Complex64::new(f(&HyperboloidPoint::plane(r, t)), 0.0))
                .collect();
            let m = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
            sup = sup.max(m);
            if m == 0.0 {
                continue;
            }
            fwd.process(&mut buf);
            let k = self.fine_weight[j] / (n as f64 * n as f64);
            buf.iter_mut().for_each(|z| *z *= k);
            spectra.push((j, buf));
        }
        // boundary check: f must vanish on the outermost radius scan
        let edge = support.min(self.support);
        let spill = theta
            .iter()
            .map(|&t| f(&HyperboloidPoint::plane(edge * (1.0 + 1e-9) + 1e-9, t)).abs())
            .fold(0.0, f64::max);
        if spill > 1e-14 * sup.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain("function does not vanish at the declared support radius".into()));
        }
        let rho = self.model.rho();
        let values: Vec<Vec<Complex64>> = self
            .nodes
            .par_iter()
            .map(|nd| {
                let mut planner = FftPlanner::<f64>::new();
                let fwd = planner.plan_fft_forward(n);
                let inv = planner.plan_fft_inverse(n);
                let e = Complex64::new(-rho, -nd.lambda);
                let mut acc = vec![Complex64::new(0.0, 0.0); n];
                let mut kernel = vec![Complex64::new(0.0, 0.0); n];
                for (j, spec) in &spectra {
                    let r = rule.nodes[*j];
                    let (em, ep) = ((-r).exp(), r.exp());
                    for (k, &t) in theta.iter().enumerate() {
                        let (s, c) = (0.5 * t).sin_cos();
                        // B_{ξ,o}(y) for the angle t between y and ξ
                        let b = (em * c * c + ep * s * s).ln();
                        kernel[k] = (e * b).exp();
                    }
                    fwd.process(&mut kernel);
                    for ((a, s), k) in acc.iter_mut().zip(spec).zip(&kernel) {
                        *a += s * k;
                    }
                }
                inv.process(&mut acc);
                acc
            })
            .collect();
        Ok(FullTransform {
            lambda_grid: self.grid.nodes.clone(),
            angles: theta,
            values,
            basepoint: HyperboloidPoint::origin(2),
        })
    }

    /// f(x) = C₀ Σ_λ w |c|⁻² (1/N) Σ_ξ f̃(λ, ξ) e^{(iλ-ρ)B_{ξ,o}(x)}.
    pub fn full_inverse_h2(&self, ft: &FullTransform, c0: f64, points: &[HyperboloidPoint]) -> Result<Vec<Complex64>> {
        self.require_h2()?;
        if ft.lambda_grid.len() != self.nodes.len() {
            return Err(Error::Precondition("full transform was not sampled on this context's grid".into()));
        }
        if points.iter().any(|p| p.dim() != 2) {
            return Err(Error::Domain("evaluation points must lie in H²".into()));
        }
        let o = HyperboloidPoint::origin(2);
        let dirs: Vec<BoundaryDirection> = ft.angles.iter().map(|&t| BoundaryDirection::angle(t)).collect();
        let rho = self.model.rho();
        let n = ft.angles.len() as f64;
        let out = points
            .par_iter()
            .map(|x| {
                let b: Vec<f64> = dirs.iter().map(|d| busemann(d, &o, x)).collect();
                let mut total = Complex64::new(0.0, 0.0);
                for (i, nd) in self.nodes.iter().enumerate() {
                    let e = Complex64::new(-rho, nd.lambda);
                    let s: Complex64 = ft.values[i].iter().zip(&b).map(|(v, &bb)| v * (e * bb).exp()).sum();
                    total += s * (nd.weight * nd.density / n);
                }
                total * c0
            })
            .collect();
        Ok(out)
    }

    /// ∫|f|² dvol against C₀ ∫∫ |f̃|² dλ_o |c|⁻² dλ.
    pub fn full_plancherel_h2(
        &self,
        f: &(dyn Fn(&HyperboloidPoint) -> f64 + Sync),
        ft: &FullTransform,
        c0: f64,
    ) -> Result<(f64, f64)> {
        self.require_h2()?;
        let n = ft.angles.len();
        let rule = &self.rules.fine;
        let lhs: f64 = rule
            .nodes
            .iter()
            .zip(&self.fine_weight)
            .map(|(&r, w)| {
                let s: f64 = ft.angles.iter().map(|&t| f(&HyperboloidPoint::plane(r, t)).powi(2)).sum();
                w * s / n as f64
            })
            .sum();
        let rhs: f64 = c0
            * self
                .nodes
                .iter()
                .zip(&ft.values)
                .map(|(nd, row)| nd.weight * nd.density * row.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64)
                .sum::<f64>();
        Ok((lhs, rhs))
    }
}

/// f̃^x(λ, ξ) = ∫ f(y) e^{(-iλ-ρ)B_{ξ,x}(y)} dvol(y) by direct summation over a
/// polar grid about x covering B(x, support).
pub fn full_ft_h2_at(
    f: &dyn Fn(&HyperboloidPoint) -> f64,
    support: f64,
    lambda: f64,
    xi: &BoundaryDirection,
    basepoint: &HyperboloidPoint,
    angles: usize,
) -> Result<Complex64> {
    if basepoint.dim() != 2 || xi.dim() != 2 {
        return Err(Error::Capability("the full Fourier transform is implemented on H² only".into()));
    }
    if angles < 8 {
        return Err(Error::Precondition("need at least 8 angles".into()));
    }
    let panels = (support / R_PANEL).ceil().max(1.0) as usize;
    let rule = Rule::composite(0.0, support, 2 * panels, PANEL_ORDER);
    let e = Complex64::new(-0.5, -lambda);
    let mut total = Complex64::new(0.0, 0.0);
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..angles {
            let t = 2.0 * PI * k as f64 / angles as f64;
            let y = HyperboloidPoint::plane(r, t).boosted_by(basepoint);
            let v = f(&y);
            if v != 0.0 {
                s += v * (e * busemann(xi, basepoint, &y)).exp();
            }
        }
        total += s * (w * r.sinh() / angles as f64);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct C0Calibration {
    pub c0: f64,
    pub per_bump: Vec<f64>,
    /// (max - min)/mean over the bumps.
    pub dispersion: f64,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Σ over the last λ-panel of C₀ w |f̂| |c|⁻², a bound on the truncated tail.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    /// |lhs - rhs| / (‖f‖₂‖g‖₂).
    pub rel_err: f64,
    pub norm_f: f64,
    pub norm_g: f64,
}

#[derive(Debug, Clone)]
pub struct FullTransform {
    pub lambda_grid: Vec<f64>,
    pub angles: Vec<f64>,
    /// values[i][k] = f̃(λ_i, ξ_k).
    pub values: Vec<Vec<Complex64>>,
    pub basepoint: HyperboloidPoint,
}

/// f̂ at arbitrary λ ≥ 0, refining the r-rule until two successive rules
/// agree within tol·max(1, |f̂|).
pub fn spherical_ft(model: &DensityModel, f: &RadialFunction, lambda_grid: &[f64], tol: f64) -> Result<SphericalTransform> {
    check_tol(tol)?;
    if lambda_grid.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::Domain("lambda grid must be finite and non-negative".into()));
    }
    let lmax = lambda_grid.iter().copied().fold(0.0, f64::max);
    let base = (f.support / R_PANEL).max(f.support * lmax / LAMBDA_PHASE).ceil().max(1.0) as usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut prev: Option<Vec<f64>> = None;
    let mut panels = base;
    for _ in 0..5 {
        let rule = Rule::composite(0.0, f.support, panels, PANEL_ORDER);
        let weighted: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&r, w)| w * model.a(r) * f.eval(r)).collect();
        let mut nodes = vec![0.0];
        nodes.extend(&rule.nodes);
        let vals: Vec<f64> = lambda_grid
            .par_iter()
            .map(|&l| {
                let phi = phi_values(model, Complex64::new(l, 0.0), &nodes, tol.min(1e-12))?;
                Ok(phi[1..].iter().zip(&weighted).map(|(p, w)| p.re * w).sum())
            })
            .collect::<Result<_>>()?;
        if let Some(p) = &prev {
            let err = p.iter().zip(&vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
            if err <= tol * scale {
                best = Some((vals, err));
                break;
            }
            best = Some((vals.clone(), err));
        }
        prev = Some(vals);
        panels *= 2;
    }
    let (vals, err) = best.expect("at least two refinements ran");
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if err > tol * scale {
        return Err(Error::numeric("spherical transform quadrature", err, tol));
    }
    Ok(SphericalTransform {
        model: model.label(),
        lambda_grid: lambda_grid.to_vec(),
        values: vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        error_estimate: err,
        support_radius: f.support,
    })
}

/// C₀ from an adaptive context built over the bumps themselves.
pub fn calibrate_c0(model: &DensityModel, bumps: &[RadialFunction], tol: f64) -> Result<C0Calibration> {
    SpectralContext::adaptive(model, bumps, tol)?.calibrate_c0(bumps)
}

pub fn inverse_spherical_ft(ctx: &SpectralContext, ft: &SphericalTransform, c0: f64, r_grid: &[f64]) -> Result<Inversion> {
    ctx.invert(ft, c0, r_grid)
}

pub fn plancherel_check(ctx: &SpectralContext, f: &RadialFunction, g: &RadialFunction, c0: f64) -> Result<PlancherelReport> {
    ctx.plancherel_check(f, g, c0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bumps() -> Vec<RadialFunction> {
        vec![
            RadialFunction::smooth_gaussian(6.0).unwrap(),
            RadialFunction::smooth_gaussian(10.0).unwrap(),
            RadialFunction::gaussian_shell(10.0, 0.4).unwrap(),
        ]
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 1.0);
        assert_eq!(smooth_step(2.0), 0.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let f = RadialFunction::gaussian(4.0, 3.0).unwrap();
        assert_eq!(f.eval(3.0), 0.0);
        assert_eq!(f.eval(0.0), 1.0);
        let s = RadialFunction::gaussian_shell(40.0, 2.7).unwrap();
        assert!(s.inner_radius() > 1.2);
    }

    #[test]
    fn zero_transforms_to_zero() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let z = RadialFunction::zero(1.0).unwrap();
        let ft = spherical_ft(&m, &z, &[0.0, 1.0, 5.0], 1e-10).unwrap();
        assert!(ft.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn spherical_ft_matches_trapezoid_oracle() {
        // φ_λ on H² is a Legendre function; the oracle uses the Mehler-type
        // integral φ_λ(r) = (1/π)∫₀^π (cosh r - sinh r cos t)^{-1/2 - iλ} dt
        // and a 10⁶-point trapezoid in r.
        let m = DensityModel::hyperbolic(2).unwrap();
        let f = RadialFunction::gaussian(4.0, 3.0).unwrap();
        let lambdas = [0.5, 2.0, 7.0];
        let ft = spherical_ft(&m, &f, &lambdas, 1e-11).unwrap();
        let phi = |l: f64, r: f64| -> f64 {
            let k = 100;
            let (gx, gw) = gauss_legendre(32);
            let mut s = 0.0;
            for p in 0..k {
                let a = PI * p as f64 / k as f64;
                let h = PI / k as f64;
                for (x, w) in gx.iter().zip(&gw) {
                    let t = a + 0.5 * h * (x + 1.0);
                    let (sn, cs) = (0.5 * t).sin_cos();
                    let b = ((-r).exp() * cs * cs + r.exp() * sn * sn).ln();
                    s += 0.5 * h * w * (Complex64::new(-0.5, -l) * b).exp().re;
                }
            }
            s / PI
        };
        for (i, &l) in lambdas.iter().enumerate() {
            // phi is smooth in r, so sample it on a coarse grid and
            // interpolate the product trapezoid-wise on 10⁶ points
            let n = 1_000_000usize;
            let h = 3.0 / n as f64;
            let coarse = 6000usize;
            let ph: Vec<f64> = (0..=coarse).map(|k| phi(l, 3.0 * k as f64 / coarse as f64)).collect();
            let mut s = 0.0;
            for k in 1..n {
                let r = k as f64 * h;
                let x = r / 3.0 * coarse as f64;
                let j = (x as usize).min(coarse - 3).max(1);
                let t = x - j as f64;
                // cubic Lagrange on j-1..j+2
                let p = [ph[j - 1], ph[j], ph[j + 1], ph[j + 2]];
                let v = -t * (t - 1.0) * (t - 2.0) / 6.0 * p[0] + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * p[1]
                    - (t + 1.0) * t * (t - 2.0) / 2.0 * p[2]
                    + (t + 1.0) * t * (t - 1.0) / 6.0 * p[3];
                s += f.eval(r) * v * r.sinh();
            }
            let oracle = s * h;
            let got = ft.values[i].re;
            assert!((got - oracle).abs() < 1e-9, "λ={l}: {got} vs {oracle}");
        }
    }

    #[test]
    fn spherical_ft_self_convergence() {
        let m = DensityModel::damek_ricci(2, 1).unwrap();
        let f = RadialFunction::smooth_gaussian(8.0).unwrap();
        let a = spherical_ft(&m, &f, &[0.3, 4.0, 12.0], 1e-10).unwrap();
        assert!(a.error_estimate <= 2e-10);
    }

    #[test]
    fn round_trip_and_calibration_h2() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let bs = bumps();
        let ctx = SpectralContext::adaptive(&m, &bs, 1e-10).unwrap();
        let cal = ctx.calibrate_c0(&bs).unwrap();
        assert!(cal.dispersion < 1e-6, "{cal:?}");
        // Jacobi-literature value for H² with A = sinh r
        assert!((cal.c0 - 1.0 / PI).abs() < 1e-7 / PI, "{}", cal.c0);
        let f = &bs[2];
        let ft = ctx.transform(f).unwrap();
        let rs: Vec<f64> = (0..=40).map(|k| 0.05 * k as f64).collect();
        let inv = ctx.invert(&ft, cal.c0, &rs).unwrap();
        let sup = rs.iter().map(|&r| f.eval(r).abs()).fold(0.0, f64::max);
        for (r, v) in rs.iter().zip(&inv.values) {
            assert!((v - f.eval(*r)).abs() <= 1e-6 * sup, "r={r}: {v} vs {}", f.eval(*r));
        }
    }

    #[test]
    fn h3_closed_form_density() {
        let m = DensityModel::hyperbolic(3).unwrap();
        let bs = bumps();
        let ctx = SpectralContext::adaptive(&m, &bs[..2], 1e-10).unwrap();
        for (l, d) in ctx.grid().nodes.iter().zip(&ctx.grid().density) {
            assert!((d / (l * l) - 1.0).abs() < 1e-9);
        }
        let cal = ctx.calibrate_c0(&bs[..2]).unwrap();
        assert!((cal.c0 - 2.0 / PI).abs() < 1e-7, "{}", cal.c0);
    }

    #[test]
    fn plancherel_properties() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let f = RadialFunction::smooth_gaussian(40.0).unwrap();
        let g = RadialFunction::gaussian_shell(40.0, 2.7).unwrap();
        assert!(g.inner_radius() >= f.support_radius());
        let ctx = SpectralContext::adaptive(&m, &[f.clone(), g.clone()], 1e-10).unwrap();
        let c0 = 1.0 / PI;
        let same = ctx.plancherel_check(&f, &f, c0).unwrap();
        assert!(same.lhs > 0.0 && same.rhs > 0.0 && same.rel_err < 1e-6, "{same:?}");
        let disjoint = ctx.plancherel_check(&f, &g, c0).unwrap();
        assert_eq!(disjoint.lhs, 0.0);
        assert!(disjoint.rhs.abs() <= 1e-8 * disjoint.norm_f * disjoint.norm_g, "{disjoint:?}");
        let doubled = ctx.plancherel_check(&f.scaled(2.0), &f, c0).unwrap();
        assert!((doubled.lhs - 2.0 * same.lhs).abs() <= 1e-15 * same.lhs);
        assert!((doubled.rhs - 2.0 * same.rhs).abs() <= 1e-14 * same.rhs);
    }

    #[test]
    fn transform_diagonalizes_radial_laplacian() {
        // u = e^{-ar²}: L u = u'' + coth(r) u' on H²
        let m = DensityModel::hyperbolic(2).unwrap();
        let a = 6.0;
        let supp = (NEGLIGIBLE_EXPONENT / a).sqrt();
        let u = RadialFunction::new("g", supp, Smoothness::Smooth, move |r| (-a * r * r).exp()).unwrap();
        let lu = RadialFunction::new("Lg", supp, Smoothness::Smooth, move |r| {
            let e = (-a * r * r).exp();
            let d2 = (4.0 * a * a * r * r - 2.0 * a) * e;
            // coth(r)·u' = -2a r coth r e, finite at 0
            let rc = if r < 1e-8 { 1.0 } else { r / r.tanh() };
            d2 - 2.0 * a * rc * e
        })
        .unwrap();
        let ls = [0.5, 2.0, 5.0];
        let fu = spherical_ft(&m, &u, &ls, 1e-11).unwrap();
        let fl = spherical_ft(&m, &lu, &ls, 1e-11).unwrap();
        for (i, l) in ls.iter().enumerate() {
            let want = -(l * l + 0.25) * fu.values[i].re;
            assert!((fl.values[i].re - want).abs() < 1e-8, "λ={l}");
        }
    }

    #[test]
    fn transform_decay() {
        let m = DensityModel::hyperbolic(4).unwrap();
        let f = RadialFunction::smooth_gaussian(10.0).unwrap();
        let ctx = SpectralContext::adaptive(&m, &[f.clone()], 1e-10).unwrap();
        let ft = ctx.transform(&f).unwrap();
        let f0 = ft.values[0].norm();
        for (l, v) in ft.lambda_grid.iter().zip(&ft.values) {
            assert!(v.norm() * (1.0 + l).powi(6) < 1e8 * f0);
        }
    }

    #[test]
    fn full_transform_radial_and_covariance() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let f = RadialFunction::smooth_gaussian(10.0).unwrap();
        let ctx = SpectralContext::new(&m, f.support_radius(), 4.0, 1e-10).unwrap();
        let o = HyperboloidPoint::origin(2);
        let fr = f.clone();
        let fx = move |y: &HyperboloidPoint| fr.eval(crate::geometry::distance(&o, y));
        let full = ctx.full_ft_h2(&fx, f.support_radius(), 64).unwrap();
        let sph = ctx.transform(&f).unwrap();
        for (row, v) in full.values.iter().zip(&sph.values) {
            for z in row {
                assert!((z - v).norm() < 1e-10, "{z} vs {v}");
            }
        }
        // non-radial bump centred off the origin, shifted basepoint
        let p = HyperboloidPoint::plane(0.3, 0.7);
        let g = RadialFunction::smooth_gaussian(12.0).unwrap();
        let gr = g.clone();
        let pc = p.clone();
        let gx = move |y: &HyperboloidPoint| gr.eval(crate::geometry::distance(&pc, y));
        let x = HyperboloidPoint::plane(0.2, 2.0);
        let xi = BoundaryDirection::angle(1.1);
        let lam = 1.7;
        let o = HyperboloidPoint::origin(2);
        let at_o = full_ft_h2_at(&gx, g.support_radius() + 0.3, lam, &xi, &o, 128).unwrap();
        let at_x = full_ft_h2_at(&gx, g.support_radius() + 0.5, lam, &xi, &x, 128).unwrap();
        let factor = (Complex64::new(0.5, lam) * busemann(&xi, &o, &x)).exp();
        assert!((at_x - factor * at_o).norm() < 1e-10 * at_o.norm().max(1e-3));
    }
}
