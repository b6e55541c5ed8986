//! Convolution with radial functions, the norms ‖φ_{it}‖_q and the
//! Kunze-Stein multiplier bound.
//!
//! (f∗g)(x) = ∫ f(y) g(d(x, y)) dvol(y). On Hⁿ this is computed directly from
//! the law of cosines; on any model it is also available spectrally as the
//! inverse transform of f̂ĝ.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::density::DensityModel;
use crate::eigen::{jost_radius, solve_phi};
use crate::error::{Error, Result};
use crate::geometry::{distance, HyperboloidPoint};
use crate::numerics::quad::{adaptive_gk15_seeded, gauss_legendre, Rule};
use crate::transform::{RadialFunction, SpectralContext, SphericalTransform};

const S_PANEL: f64 = 0.125;
const THETA_PANELS: usize = 8;
const ORDER: usize = 16;
const CHAIN_SLACK: f64 = 1e-8;

/// τ_x f: the radial profile u recentred at x, y ↦ u(d(x, y)).
#[derive(Debug, Clone)]
pub struct TranslatedRadial {
    pub profile: RadialFunction,
    pub center: HyperboloidPoint,
}

impl TranslatedRadial {
    pub fn new(profile: RadialFunction, center: HyperboloidPoint) -> Self {
        TranslatedRadial { profile, center }
    }

    pub fn eval(&self, y: &HyperboloidPoint) -> f64 {
        self.profile.eval(distance(&self.center, y))
    }
}

fn hyperbolic(n: u32) -> Result<DensityModel> {
    if !(2..=4).contains(&n) {
        return Err(Error::Capability(format!("direct convolution supports n in 2..=4, got {n}")));
    }
    DensityModel::hyperbolic(n)
}

/// sin^{n-2}θ normalized to a probability measure on [0, π].
fn angular_weight(n: u32, theta: f64) -> f64 {
    match n {
        2 => 1.0 / std::f64::consts::PI,
        3 => 0.5 * theta.sin(),
        _ => 2.0 / std::f64::consts::PI * theta.sin().powi(2),
    }
}

/// Geometric convolution on Hⁿ at one radius.
fn direct_value(model: &DensityModel, n: u32, f: &RadialFunction, g: &RadialFunction, r: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let rg = g.support_radius();
    let s_lo = (r - rg).max(0.0);
    let s_hi = (r + rg).min(f.support_radius());
    if s_hi <= s_lo {
        return 0.0;
    }
    let panels = ((s_hi - s_lo) / S_PANEL).ceil().max(1.0) as usize;
    let s_rule = Rule::composite(s_lo, s_hi, panels, ORDER);
    let (shr, half_rg) = (r.sinh(), (0.5 * rg).sinh().powi(2));
    let mut total = 0.0;
    for (&s, &ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
        let uf = f.eval(s);
        if uf == 0.0 {
            continue;
        }
        // sinh²(d/2) = sinh²((r-s)/2) + sinh r sinh s sin²(θ/2)
        let base = (0.5 * (r - s)).sinh().powi(2);
        let k = shr * s.sinh();
        let theta_max = if k <= 0.0 {
            std::f64::consts::PI
        } else {
            let x = ((half_rg - base) / k).clamp(0.0, 1.0);
            2.0 * x.sqrt().asin()
        };
        if theta_max <= 0.0 {
            continue;
        }
        let h = theta_max / THETA_PANELS as f64;
        let mut inner = 0.0;
        for p in 0..THETA_PANELS {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in gl.0.iter().zip(&gl.1) {
                let t = mid + 0.5 * h * x;
                let sh = (base + k * (0.5 * t).sin().powi(2)).sqrt();
                let d = 2.0 * sh.asinh();
                inner += 0.5 * h * w * angular_weight(n, t) * g.eval(d);
            }
        }
        total += ws * uf * model.a(s) * inner;
    }
    total
}

/// (f∗g)(r) on Hⁿ for n ∈ {2, 3, 4} by the law of cosines.
pub fn convolve_direct_hn(n: u32, f: &RadialFunction, g: &RadialFunction, r_grid: &[f64]) -> Result<Vec<f64>> {
    let model = hyperbolic(n)?;
    if r_grid.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::Domain("evaluation radii must be finite and non-negative".into()));
    }
    let gl = gauss_legendre(ORDER);
    Ok(r_grid.par_iter().map(|&r| direct_value(&model, n, f, g, r, &gl)).collect())
}

/// The profile of f∗g on Hⁿ as a closure, for feeding into transforms.
pub fn direct_profile(n: u32, f: &RadialFunction, g: &RadialFunction) -> Result<impl Fn(f64) -> f64 + Sync> {
    let model = hyperbolic(n)?;
    let gl = gauss_legendre(ORDER);
    let (f, g) = (f.clone(), g.clone());
    Ok(move |r: f64| direct_value(&model, n, &f, &g, r, &gl))
}

pub fn multiply(a: &SphericalTransform, b: &SphericalTransform) -> Result<SphericalTransform> {
    if a.lambda_grid != b.lambda_grid {
        return Err(Error::Precondition("transforms live on different grids".into()));
    }
    Ok(SphericalTransform {
        model: a.model.clone(),
        lambda_grid: a.lambda_grid.clone(),
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
        error_estimate: a.error_estimate * b.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            + b.error_estimate * a.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        support_radius: a.support_radius + b.support_radius,
    })
}

/// f∗g as the inverse transform of f̂ĝ.
pub fn convolve_spectral(ctx: &SpectralContext, f: &RadialFunction, g: &RadialFunction, c0: f64, r_grid: &[f64]) -> Result<Vec<f64>> {
    let prod = multiply(&ctx.transform(f)?, &ctx.transform(g)?)?;
    Ok(ctx.invert(&prod, c0, r_grid)?.values)
}

/// ∫ |u|^p A dr over a Gauss rule on [0, R].
pub fn lp_norm(model: &DensityModel, u: &dyn Fn(f64) -> f64, support: f64, p: f64) -> f64 {
    let rule = Rule::composite(0.0, support, (support / S_PANEL).ceil().max(1.0) as usize, ORDER);
    rule.integrate(|r| u(r).abs().powf(p) * model.a(r)).powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiNorm {
    pub value: f64,
    /// ∫₀^{r_max} |φ|^q A dr (or the sup over [0, r_max] when q = ∞).
    pub inner: f64,
    /// ∫_{r_max}^∞ |φ|^q A dr from the G = 0 continuation of v = A^{1/2}φ.
    pub tail: f64,
    /// Error estimate of the tail quadrature.
    pub tail_error: f64,
    pub r_max: f64,
}

/// ‖φ_λ‖_q for complex λ with |Im λ| < γ_q ρ, γ_q = 1 - 2/q.
///
/// Beyond r_max the potential is negligible, so v = A^{1/2}φ solves
/// v'' = -λ²v exactly and |φ|^q A = |v|^q A^{1-q/2} is integrated in log form.
pub fn phi_norm(model: &DensityModel, lambda: Complex64, q: f64, r_max: Option<f64>) -> Result<PhiNorm> {
    if !(q > 2.0) {
        return Err(Error::Domain(format!("q must exceed 2, got {q}")));
    }
    let rho = model.rho();
    let gamma = if q.is_infinite() { 1.0 } else { 1.0 - 2.0 / q };
    let t = lambda.im.abs();
    if !(t < gamma * rho) {
        return Err(Error::Precondition(format!(
            "|Im lambda| = {t} must be below gamma_q rho = {}",
            gamma * rho
        )));
    }
    let r_max = r_max.unwrap_or_else(|| jost_radius(model));
    let panels = (r_max / 0.25).ceil() as usize;
    let rule = Rule::composite(0.0, r_max, panels, ORDER);
    let mut grid = vec![0.0];
    grid.extend(&rule.nodes);
    grid.push(r_max);
    let table = solve_phi(model, lambda, &grid, 1e-12)?;
    let phi = &table.phi;
    if q.is_infinite() {
        let sup = phi.iter().map(|p| p.norm()).fold(0.0, f64::max);
        return Ok(PhiNorm { value: sup, inner: sup, tail: 0.0, tail_error: 0.0, r_max });
    }
    let inner: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .zip(&phi[1..phi.len() - 1])
        .map(|((&r, &w), p)| w * p.norm().powf(q) * model.a(r))
        .sum();
    // v and v' at r_max
    let last = phi.len() - 1;
    let (p0, dp0) = (table.phi[last], table.phi_prime[last]);
    let (m, _) = model.m_and_prime(r_max);
    let ln_a0 = model.ln_a(r_max);
    let sa = (0.5 * ln_a0).exp();
    let v0 = p0 * sa;
    let dv0 = (dp0 + p0 * (0.5 * m)) * sa;
    let i = Complex64::new(0.0, 1.0);
    let kappa = (q - 2.0) * rho - q * t;
    // v e^{-τ s} as a sum of non-growing exponentials
    let ln_v = |s: f64| -> f64 {
        if lambda.norm() == 0.0 {
            return (v0 + dv0 * s).norm().ln();
        }
        let a = 0.5 * (v0 + dv0 / (i * lambda));
        let b = 0.5 * (v0 - dv0 / (i * lambda));
        let w = a * (i * lambda * s - t * s).exp() + b * (-i * lambda * s - t * s).exp();
        t * s + w.norm().ln()
    };
    let mut integrand = |s: f64| -> Complex64 {
        let e = q * ln_v(s) + (1.0 - 0.5 * q) * model.ln_a(r_max + s);
        Complex64::new(e.exp(), 0.0)
    };
    let s_end = 60.0 / kappa;
    let mut breaks = vec![0.0];
    let mut b = 0.25f64.min(s_end);
    while b < s_end {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(s_end);
    let (tail, tail_error) = adaptive_gk15_seeded(&mut integrand, &breaks, 0.0, 1e-11, 4000)?;
    let total = inner + tail.re;
    Ok(PhiNorm {
        value: total.powf(1.0 / q),
        inner,
        tail: tail.re,
        tail_error,
        r_max,
    })
}

/// ‖φ_{it}‖_q.
pub fn phi_it_norm(model: &DensityModel, t: f64, q: f64, r_max: Option<f64>) -> Result<PhiNorm> {
    phi_norm(model, Complex64::new(0.0, t), q, r_max)
}

/// Conjugate exponent of p ∈ [1, 2).
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [1, 2), got {p}")));
    }
    Ok(if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) })
}

/// Deterministic random pairs (f, g) of radial bumps: Gaussian shells with
/// rate in [10, 24] and centre in [0, 0.5].
pub fn random_families(seed: u64, count: usize) -> Result<Vec<(RadialFunction, RadialFunction)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| RadialFunction::gaussian_shell(rng.gen_range(10.0..24.0), rng.gen_range(0.0..0.5));
    (0..count).map(|_| Ok((draw(&mut rng)?, draw(&mut rng)?))).collect()
}

/// One (f, g) pair of the multiplier check.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    /// ‖f∗g‖₂ in space, from the spectral convolution.
    pub conv_l2: f64,
    /// ‖f̂ĝ‖₂ on the Plancherel side.
    pub product_l2: f64,
    pub f_l2: f64,
    pub f_hat_l2: f64,
    pub g_hat_sup: f64,
    pub g_p: f64,
    /// ‖f∗g‖₂ / (‖g‖_p ‖f‖₂).
    pub ratio: f64,
    /// Largest relative violation over the chain ‖f∗g‖₂ = ‖f̂ĝ‖₂ ≤ ‖ĝ‖_∞‖f̂‖₂,
    /// ‖f̂‖₂ = ‖f‖₂, ratio ≤ ‖ĝ‖_∞/‖g‖_p and ‖ĝ‖_∞ ≤ C_p ‖g‖_p.
    pub chain_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub p: f64,
    pub q: f64,
    pub gamma_q: f64,
    pub t_grid: Vec<f64>,
    pub grid_norm_phi_it: Vec<f64>,
    /// ‖φ_0‖_q, the constant of |ĝ(λ)| ≤ ‖g‖_p ‖φ_λ‖_q ≤ ‖g‖_p ‖φ_0‖_q.
    pub c_p: f64,
    /// Largest ‖ĝ‖_∞ over the families.
    pub sup_f_hat: f64,
    /// Largest empirical ratio.
    pub ratio: f64,
    /// Largest ‖ĝ‖_∞/‖g‖_p.
    pub bound: f64,
    pub families: Vec<FamilyRow>,
    pub chain_ok: bool,
}

/// sup over λ ≥ 0 of |ĝ|: the grid maximum including λ = 0, refined by a
/// parabolic step through the neighbours of the largest node.
fn sup_transform(ctx: &SpectralContext, g: &RadialFunction, gh: &SphericalTransform) -> Result<f64> {
    let model = ctx.model();
    let mut lams = vec![0.0];
    lams.extend(&gh.lambda_grid);
    let at_zero = crate::transform::spherical_ft(model, g, &[0.0], ctx.tol().max(1e-12))?.values[0].norm();
    let mut vals = vec![at_zero];
    vals.extend(gh.values.iter().map(|v| v.norm()));
    let (k, &best) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    if k == 0 || k + 1 >= vals.len() {
        return Ok(best);
    }
    let (x0, x1, x2) = (lams[k - 1], lams[k], lams[k + 1]);
    let (y0, y1, y2) = (vals[k - 1], vals[k], vals[k + 1]);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Ok(best);
    }
    let xv = x1 - 0.5 * ((x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0)) / den;
    if !(xv > x0 && xv < x2) {
        return Ok(best);
    }
    let refined = crate::transform::spherical_ft(model, g, &[xv], ctx.tol().max(1e-12))?.values[0].norm();
    Ok(best.max(refined))
}

/// Empirical Kunze-Stein constants for one p on the families (f, g).
pub fn kunze_stein_check(
    ctx: &SpectralContext,
    p: f64,
    families: &[(RadialFunction, RadialFunction)],
    c0: f64,
) -> Result<MultiplierReport> {
    let q = conjugate_exponent(p)?;
    let model = ctx.model();
    let rho = model.rho();
    let gamma_q = if q.is_infinite() { 1.0 } else { 1.0 - 2.0 / q };
    let t_grid: Vec<f64> = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9].iter().map(|s| s * gamma_q * rho).collect();
    let grid_norm_phi_it = t_grid
        .iter()
        .map(|&t| Ok(phi_it_norm(model, t, q, None)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let c_p = grid_norm_phi_it[3];
    let mut rows = Vec::with_capacity(families.len());
    for (f, g) in families {
        let fh = ctx.transform(f)?;
        let gh = ctx.transform(g)?;
        let prod = multiply(&fh, &gh)?;
        let support = f.support_radius() + g.support_radius();
        let rule = Rule::composite(0.0, support, (support / 0.25).ceil() as usize, ORDER);
        let conv = ctx.invert(&prod, c0, &rule.nodes)?.values;
        let conv_l2 = conv
            .iter()
            .zip(&rule.nodes)
            .zip(&rule.weights)
            .map(|((v, &r), w)| w * v * v * model.a(r))
            .sum::<f64>()
            .sqrt();
        let product_l2 = ctx.spectral_l2_norm(&prod.values, c0);
        let f_l2 = ctx.l2_norm(&|r| f.eval(r));
        let f_hat_l2 = ctx.spectral_l2_norm(&fh.values, c0);
        let g_hat_sup = sup_transform(ctx, g, &gh)?;
        let g_p = lp_norm(model, &|r| g.eval(r), g.support_radius(), p);
        let ratio = conv_l2 / (g_p * f_l2);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        let over = |lhs: f64, rhs: f64| ((lhs - rhs) / rhs).max(0.0);
        let chain_violation = [
            rel(conv_l2, product_l2),
            over(product_l2, g_hat_sup * f_hat_l2),
            rel(f_hat_l2, f_l2),
            over(ratio, g_hat_sup / g_p),
            over(g_hat_sup, c_p * g_p),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        rows.push(FamilyRow {
            conv_l2,
            product_l2,
            f_l2,
            f_hat_l2,
            g_hat_sup,
            g_p,
            ratio,
            chain_violation,
        });
    }
    let max_of = |f: &dyn Fn(&FamilyRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(MultiplierReport {
        p,
        q,
        gamma_q,
        t_grid,
        grid_norm_phi_it,
        c_p,
        sup_f_hat: max_of(&|r| r.g_hat_sup),
        ratio: max_of(&|r| r.ratio),
        bound: max_of(&|r| r.g_hat_sup / r.g_p),
        chain_ok: rows.iter().all(|r| r.chain_violation <= CHAIN_SLACK),
        families: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryDirection;

    fn pair() -> (RadialFunction, RadialFunction) {
        (
            RadialFunction::gaussian_shell(12.0, 0.3).unwrap(),
            RadialFunction::smooth_gaussian(20.0).unwrap(),
        )
    }

    #[test]
    fn commutative_and_l1_bounded_on_h2_and_h3() {
        let (f, g) = pair();
        let rs: Vec<f64> = (0..12).map(|k| 0.3 * k as f64).collect();
        for n in [2, 3] {
            let m = DensityModel::hyperbolic(n).unwrap();
            let fg = convolve_direct_hn(n, &f, &g, &rs).unwrap();
            let gf = convolve_direct_hn(n, &g, &f, &rs).unwrap();
            let l1f = lp_norm(&m, &|r| f.eval(r), f.support_radius(), 1.0);
            let g_sup = g.eval(0.0);
            for (a, b) in fg.iter().zip(&gf) {
                assert!((a - b).abs() <= 1e-8 * l1f * g_sup, "n={n}: {a} vs {b}");
            }
            let prof = direct_profile(n, &f, &g).unwrap();
            let support = f.support_radius() + g.support_radius();
            let conv_l1 = lp_norm(&m, &prof, support, 1.0);
            let l1g = lp_norm(&m, &|r| g.eval(r), g.support_radius(), 1.0);
            assert!(conv_l1 <= l1f * l1g + 1e-8);
            // positive f, g: equality up to quadrature
            assert!((conv_l1 - l1f * l1g).abs() < 1e-9 * l1f * l1g);
        }
    }

    #[test]
    fn unsupported_dimension() {
        let (f, g) = pair();
        assert!(matches!(convolve_direct_hn(5, &f, &g, &[0.0]), Err(Error::Capability(_))));
    }

    #[test]
    fn approximate_identity() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let f = RadialFunction::gaussian_shell(6.0, 0.5).unwrap();
        let rs: Vec<f64> = (0..10).map(|k| 0.2 * k as f64).collect();
        let mut last = f64::INFINITY;
        for a in [50.0, 200.0, 800.0] {
            let raw = RadialFunction::smooth_gaussian(a).unwrap();
            let l1 = lp_norm(&m, &|r| raw.eval(r), raw.support_radius(), 1.0);
            let g = raw.scaled(1.0 / l1);
            let conv = convolve_direct_hn(2, &f, &g, &rs).unwrap();
            let err = rs.iter().zip(&conv).map(|(r, v)| (v - f.eval(*r)).abs()).fold(0.0, f64::max);
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-2, "{last}");
    }

    #[test]
    fn translation_preserves_l1() {
        let f = RadialFunction::smooth_gaussian(15.0).unwrap();
        let x = HyperboloidPoint::plane(0.8, 0.3);
        let tf = TranslatedRadial::new(f.clone(), x);
        let m = DensityModel::hyperbolic(2).unwrap();
        let rule = Rule::composite(0.0, 0.8 + f.support_radius(), 40, 16);
        let n = 256;
        let l1: f64 = rule.integrate(|r| {
            let s: f64 = (0..n)
                .map(|k| tf.eval(&HyperboloidPoint::plane(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64)))
                .sum();
            s / n as f64 * r.sinh()
        });
        let want = lp_norm(&m, &|r| f.eval(r), f.support_radius(), 1.0);
        assert!((l1 - want).abs() < 1e-10 * want);
        let _ = BoundaryDirection::angle(0.0);
    }

    #[test]
    fn spectral_matches_direct_and_transform_identity() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let (f, g) = pair();
        let support = f.support_radius() + g.support_radius();
        let mut ctx_funcs = vec![f.clone(), g.clone()];
        ctx_funcs.push(RadialFunction::smooth_gaussian(30.0).unwrap());
        let ctx = SpectralContext::adaptive(&m, &ctx_funcs, 1e-10).unwrap();
        let rs: Vec<f64> = (0..16).map(|k| 0.25 * k as f64).collect();
        let spec = convolve_spectral(&ctx, &f, &g, 1.0 / std::f64::consts::PI, &rs).unwrap();
        let direct = convolve_direct_hn(2, &f, &g, &rs).unwrap();
        let sup = direct.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (a, b) in spec.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-6 * sup, "{a} vs {b}");
        }
        let big = SpectralContext::new(&m, support, ctx.grid().lambda_max, 1e-10).unwrap();
        let prof = direct_profile(2, &f, &g).unwrap();
        let conv_hat = big.transform_profile(&prof, support).unwrap();
        let prod = multiply(&big.transform(&f).unwrap(), &big.transform(&g).unwrap()).unwrap();
        let top = prod.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in conv_hat.values.iter().zip(&prod.values) {
            assert!((a - b).norm() <= 1e-6 * top);
        }
    }

    #[test]
    fn phi_it_norms() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let q = 4.0;
        let gamma = 0.5;
        let t = 0.4 * gamma * 0.5;
        let a = phi_it_norm(&m, t, q, None).unwrap();
        let b = phi_it_norm(&m, t, q, Some(2.0 * a.r_max)).unwrap();
        assert!(a.value.is_finite() && (a.value - b.value).abs() < 1e-9 * a.value, "{a:?} {b:?}");
        for s in [0.5, 1.0, 2.5] {
            let d = phi_norm(&m, Complex64::new(s, t), q, None).unwrap();
            assert!(d.value <= a.value * (1.0 + 1e-9), "σ={s}: {} > {}", d.value, a.value);
        }
        assert!(matches!(phi_it_norm(&m, gamma * 0.5, q, None), Err(Error::Precondition(_))));
        // growth towards the edge of the admissible strip
        let vals: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|s| phi_it_norm(&m, s * gamma * 0.5, q, None).unwrap().value)
            .collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
        // q = ∞ gives the sup, attained at r = 0
        let inf = phi_it_norm(&m, 0.3, f64::INFINITY, None).unwrap();
        assert!((inf.value - 1.0).abs() < 1e-12);
    }
}
