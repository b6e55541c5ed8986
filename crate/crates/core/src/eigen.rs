//! Spherical functions, Jost solutions and the c-function of a density model.
//!
//! φ_λ solves u'' + (A'/A)u' = -(λ² + ρ²)u with u(0) = 1. The Jost solutions
//! are found from the reduced equation v'' = (G - λ²)v for v = A^{1/2}u,
//! normalized by Φ_{±λ} = √C A^{-1/2} v so that Φ_{±λ}(r) e^{-(±iλ-ρ)r} → 1,
//! where C is the leading coefficient in A(r) = C e^{2ρr} + ....

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::numerics::ode::{State, Stepper};

/// λ = re + i·im.
pub type SpectralParameter = Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct EigenTable {
    pub model: String,
    pub lambda: SpectralParameter,
    pub r_grid: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub phi_prime: Vec<Complex64>,
    /// Radius where the Frobenius series hands over to the integrator.
    pub series_radius: f64,
    pub tol: f64,
    /// Largest normalized local error accepted by the integrator.
    pub achieved: f64,
}

/// Coefficients a_m of φ_λ(r) = Σ a_m r^{2m} from the Taylor series of B.
fn frobenius_coefficients(model: &DensityModel, big_lambda: Complex64, count: usize) -> Vec<Complex64> {
    let b: Vec<f64> = model.b_coefficients().iter().step_by(2).copied().collect();
    let alpha = model.alpha();
    let count = count.min(b.len());
    let mut a = vec![Complex64::new(1.0, 0.0)];
    for m in 1..count {
        let mf = m as f64;
        let mut s1 = Complex64::new(0.0, 0.0);
        for j in 1..m {
            s1 += a[j] * (j as f64 * b[m - j]);
        }
        let mut s2 = Complex64::new(0.0, 0.0);
        for j in 0..m {
            s2 += a[j] * b[m - 1 - j];
        }
        let num = s1 * (4.0 * (alpha + mf)) + big_lambda * s2;
        a.push(-num / (4.0 * mf * (alpha + mf) * b[0]));
    }
    a
}

/// Series start: returns (r0, coefficients) such that the truncated series
/// is converged to double precision on [0, r0].
fn frobenius_start(model: &DensityModel, big_lambda: Complex64) -> Result<(f64, Vec<Complex64>)> {
    let a = frobenius_coefficients(model, big_lambda, usize::MAX);
    let mut r0 = (2.0 / big_lambda.norm().sqrt()).min(0.5);
    for _ in 0..20 {
        let x = r0 * r0;
        let mut pow = 1.0;
        let mut tail = 0.0f64;
        for (m, am) in a.iter().enumerate() {
            if m + 3 >= a.len() {
                tail = tail.max(am.norm() * pow);
            }
            pow *= x;
        }
        if tail <= 1e-18 {
            return Ok((r0, a));
        }
        r0 *= 0.5;
    }
    Err(Error::numeric("Frobenius series start", f64::NAN, 1e-18))
}

fn eval_series(a: &[Complex64], r: f64) -> (Complex64, Complex64) {
    let x = r * r;
    let mut u = Complex64::new(0.0, 0.0);
    let mut du = Complex64::new(0.0, 0.0);
    for (m, am) in a.iter().enumerate().rev() {
        u = u * x + am;
        if m > 0 {
            du = du * x + am * (2.0 * m as f64);
        }
    }
    // du currently holds Σ 2m a_m x^{m-1}
    (u, du * r)
}

/// (φ, φ') at the increasing abscissae `xs`, all ≥ 0.
fn phi_states(
    model: &DensityModel,
    lambda: SpectralParameter,
    xs: &[f64],
    tol: f64,
) -> Result<(Vec<State>, f64, f64)> {
    let rho = model.rho();
    let big_lambda = lambda * lambda + rho * rho;
    let (r0, a) = frobenius_start(model, big_lambda)?;
    let split = xs.partition_point(|&r| r <= r0);
    let mut out: Vec<State> = xs[..split]
        .iter()
        .map(|&r| {
            let (u, du) = eval_series(&a, r);
            [u, du]
        })
        .collect();
    let mut achieved = 0.0;
    if split < xs.len() {
        let (u0, du0) = eval_series(&a, r0);
        let sys = |r: f64, y: &State| {
            let (m, _) = model.m_and_prime(r);
            [y[1], -y[1] * m - y[0] * big_lambda]
        };
        let stepper = Stepper::new(tol).with_initial_step(r0.min(0.05));
        let (states, worst) = stepper.integrate(&sys, r0, [u0, du0], &xs[split..])?;
        achieved = worst * tol;
        out.extend(states);
    }
    Ok((out, achieved, r0))
}

fn check_grid(r_grid: &[f64], positive: bool) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Precondition("empty radius grid".into()));
    }
    if r_grid.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Domain("radii must be finite and non-negative".into()));
    }
    if positive && r_grid[0] <= 0.0 {
        return Err(Error::Domain("Jost solutions are not defined at r = 0".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("radius grid must be strictly increasing".into()));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Precondition(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    Ok(())
}

/// Spherical function φ_λ and its derivative on `r_grid` (which must start at 0).
pub fn solve_phi(
    model: &DensityModel,
    lambda: SpectralParameter,
    r_grid: &[f64],
    tol: f64,
) -> Result<EigenTable> {
    check_tol(tol)?;
    check_grid(r_grid, false)?;
    if r_grid[0] != 0.0 {
        return Err(Error::Precondition("radius grid must start at 0".into()));
    }
    let (states, achieved, r0) = phi_states(model, lambda, r_grid, tol)?;
    let (phi, phi_prime) = states.iter().map(|s| (s[0], s[1])).unzip();
    Ok(EigenTable {
        model: model.label(),
        lambda,
        r_grid: r_grid.to_vec(),
        phi,
        phi_prime,
        series_radius: r0,
        tol,
        achieved,
    })
}

/// φ_λ at arbitrary increasing radii ≥ 0, without building a table.
pub fn phi_values(model: &DensityModel, lambda: SpectralParameter, radii: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    Ok(phi_states(model, lambda, radii, tol)?.0.into_iter().map(|s| s[0]).collect())
}

/// Smallest radius (at least 10) beyond which |G(r)|·r < 1e-12.
pub fn jost_radius(model: &DensityModel) -> f64 {
    let ok = |r: f64| model.g(r).abs() * r < 1e-12;
    let mut r = 10.0;
    // require the bound to persist, so that zeros of an oscillating G are skipped
    while !(ok(r) && (1..=10).all(|k| ok(r + 0.5 * k as f64))) {
        r += 0.5;
        if r > 1e3 {
            break;
        }
    }
    r
}

/// Reduced solution v with v ~ e^{s·iλr} seeded at `r_max` (s = ±1),
/// returned as (v, v') at the decreasing abscissae `xs`.
fn jost_v(
    model: &DensityModel,
    lambda: SpectralParameter,
    sign: f64,
    r_max: f64,
    xs_desc: &[f64],
    tol: f64,
) -> Result<Vec<State>> {
    let k = I * lambda * sign;
    let seed = (k * r_max).exp();
    let l2 = lambda * lambda;
    let sys = |r: f64, y: &State| [y[1], y[0] * (model.g(r) - l2)];
    let stepper = Stepper::new(tol).with_initial_step(0.05);
    Ok(stepper.integrate(&sys, r_max, [seed, seed * k], xs_desc)?.0)
}

fn check_jost_radius(model: &DensityModel, r_max: f64, tol: f64) -> Result<()> {
    let g = model.g(r_max).abs();
    if !r_max.is_finite() || r_max <= 0.0 || g >= tol {
        return Err(Error::Precondition(format!(
            "r_max = {r_max} too small: |G(r_max)| = {g:.3e} is not below {tol:.1e}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct JostTable {
    pub model: String,
    pub lambda: SpectralParameter,
    pub r_grid: Vec<f64>,
    pub phi_plus: Vec<Complex64>,
    pub phi_minus: Vec<Complex64>,
    pub r_max: f64,
    /// max |W[v_λ, v_{-λ}] + 2iλ| / |2λ| over the grid.
    pub wronskian_drift: f64,
}

/// Jost solutions Φ_{±λ} on `r_grid` (all radii positive and ≤ r_max).
pub fn solve_jost(
    model: &DensityModel,
    lambda: SpectralParameter,
    r_grid: &[f64],
    r_max: Option<f64>,
    tol: f64,
) -> Result<JostTable> {
    check_tol(tol)?;
    if lambda.norm() == 0.0 {
        return Err(Error::Degenerate("Jost solutions coincide at lambda = 0".into()));
    }
    check_grid(r_grid, true)?;
    let r_max = r_max.unwrap_or_else(|| jost_radius(model).max(*r_grid.last().unwrap_or(&0.0)));
    check_jost_radius(model, r_max, tol.max(1e-12))?;
    if r_grid.last().is_some_and(|&r| r > r_max) {
        return Err(Error::Domain("radius grid extends beyond r_max".into()));
    }
    let desc: Vec<f64> = r_grid.iter().rev().copied().collect();
    let plus = jost_v(model, lambda, 1.0, r_max, &desc, tol)?;
    let minus = jost_v(model, lambda, -1.0, r_max, &desc, tol)?;
    let sqrt_c = model.top_coefficient().sqrt();
    let mut phi_plus = Vec::with_capacity(r_grid.len());
    let mut phi_minus = Vec::with_capacity(r_grid.len());
    let mut drift = 0.0f64;
    let target = -2.0 * I * lambda;
    for (idx, &r) in desc.iter().enumerate() {
        let scale = sqrt_c * (-0.5 * model.ln_a(r)).exp();
        let (p, m) = (plus[idx], minus[idx]);
        drift = drift.max((p[0] * m[1] - p[1] * m[0] - target).norm() / target.norm());
        phi_plus.push(p[0] * scale);
        phi_minus.push(m[0] * scale);
    }
    phi_plus.reverse();
    phi_minus.reverse();
    Ok(JostTable {
        model: model.label(),
        lambda,
        r_grid: r_grid.to_vec(),
        phi_plus,
        phi_minus,
        r_max,
        wronskian_drift: drift,
    })
}

/// A c-function value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CEstimate {
    pub value: Complex64,
    /// |difference| between the values matched at r_max/2 and 3r_max/4.
    pub matching_spread: f64,
    /// Spread plus the propagated integration tolerance; grows like 1/|λ|.
    pub error_bound: f64,
}

/// c(λ) from the Wronskian of φ_λ against the Jost solution Φ_{-λ}.
/// Requires λ real and nonzero, or Im λ < 0.
pub fn compute_c(
    model: &DensityModel,
    lambda: SpectralParameter,
    r_max: Option<f64>,
    tol: f64,
) -> Result<CEstimate> {
    check_tol(tol)?;
    if lambda.norm() == 0.0 {
        return Err(Error::Degenerate("c is undefined at lambda = 0".into()));
    }
    if lambda.im > 0.0 {
        return Err(Error::Precondition(format!(
            "compute_c needs Im lambda <= 0, got {lambda}"
        )));
    }
    let r_max = r_max.unwrap_or_else(|| jost_radius(model));
    check_jost_radius(model, r_max, tol.max(1e-12))?;
    let matches = [0.5 * r_max, 0.75 * r_max];
    let (phi, _, _) = phi_states(model, lambda, &matches, tol)?;
    let v = jost_v(model, lambda, -1.0, r_max, &[matches[1], matches[0]], tol)?;
    let denom = -2.0 * I * lambda * model.top_coefficient().sqrt();
    let mut values = [Complex64::new(0.0, 0.0); 2];
    for (k, &r) in matches.iter().enumerate() {
        let half_ln_a = 0.5 * model.ln_a(r);
        let (m, _) = model.m_and_prime(r);
        let sa = half_ln_a.exp();
        let psi = phi[k][0] * sa;
        let dpsi = (phi[k][1] + phi[k][0] * (0.5 * m)) * sa;
        let vk = v[1 - k];
        values[k] = (psi * vk[1] - dpsi * vk[0]) / denom;
    }
    let spread = (values[0] - values[1]).norm();
    Ok(CEstimate {
        value: values[1],
        matching_spread: spread,
        error_bound: spread + 10.0 * tol * (1.0 + values[1].norm()) / lambda.norm().min(1.0),
    })
}

/// c(λ) for Im λ < 0 as the limit of φ_λ(r) e^{-(iλ-ρ)r}, with the
/// c(-λ)e^{-2iλr} correction eliminated between two radii.
pub fn c_by_limit(model: &DensityModel, lambda: SpectralParameter, r_max: Option<f64>) -> Result<Complex64> {
    if !(lambda.im < 0.0) {
        return Err(Error::Precondition(format!("c_by_limit needs Im lambda < 0, got {lambda}")));
    }
    let r2 = r_max.unwrap_or_else(|| jost_radius(model).max(20.0));
    let mut delta = (1.0 / lambda.im.abs()).min(0.5 * r2);
    if lambda.re != 0.0 {
        delta = delta.min(std::f64::consts::FRAC_PI_2 / lambda.re.abs());
    }
    let r1 = r2 - delta;
    let rho = model.rho();
    let (phi, _, _) = phi_states(model, lambda, &[r1, r2], 1e-13)?;
    let f = |k: usize, r: f64| phi[k][0] * (-(I * lambda - rho) * r).exp();
    let e = |r: f64| (-2.0 * I * lambda * r).exp();
    let (f1, f2, e1, e2) = (f(0, r1), f(1, r2), e(r1), e(r2));
    Ok((f1 * e2 - f2 * e1) / (e2 - e1))
}

/// Local log-log slopes of |c(λ)|^{-1} in the two asymptotic regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope_small: f64,
    /// Range of |c|^{-1}/λ over the small-λ window.
    pub constant_small: (f64, f64),
    pub slope_large: f64,
    /// Range of |c|^{-1}/λ^{α+1/2} over the large-λ window.
    pub constant_large: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct CFunctionTable {
    pub model: String,
    pub lambda_grid: Vec<f64>,
    pub c_values: Vec<Complex64>,
    pub c_abs_inv_sq: Vec<f64>,
    /// Largest c error bound over the grid.
    pub error_bound: f64,
    /// Present when the grid has at least two points in λ ≤ 0.1 and in λ ≥ 20.
    pub fit: Option<GrowthFit>,
}

pub fn c_function_table(model: &DensityModel, lambda_grid: &[f64], tol: f64) -> Result<CFunctionTable> {
    if lambda_grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::Domain("c-function grid must contain finite positive lambdas".into()));
    }
    let r_max = jost_radius(model);
    let estimates: Vec<CEstimate> = lambda_grid
        .par_iter()
        .map(|&l| compute_c(model, Complex64::new(l, 0.0), Some(r_max), tol))
        .collect::<Result<_>>()?;
    let c_values: Vec<Complex64> = estimates.iter().map(|e| e.value).collect();
    let c_abs_inv_sq: Vec<f64> = c_values.iter().map(|c| c.norm_sqr().recip()).collect();
    let inv: Vec<f64> = c_values.iter().map(|c| c.norm().recip()).collect();
    let window = |pred: &dyn Fn(f64) -> bool| -> Vec<(f64, f64)> {
        lambda_grid
            .iter()
            .zip(&inv)
            .filter(|(l, _)| pred(**l))
            .map(|(&l, &v)| (l, v))
            .collect()
    };
    let small = window(&|l| l <= 0.1);
    let large = window(&|l| l >= 20.0);
    let fit = (small.len() >= 2 && large.len() >= 2).then(|| {
        let beta = model.alpha() + 0.5;
        GrowthFit {
            slope_small: loglog_slope(&small),
            constant_small: ratio_range(&small, 1.0),
            slope_large: loglog_slope(&large),
            constant_large: ratio_range(&large, beta),
        }
    });
    Ok(CFunctionTable {
        model: model.label(),
        lambda_grid: lambda_grid.to_vec(),
        c_values,
        c_abs_inv_sq,
        error_bound: estimates.iter().map(|e| e.error_bound).fold(0.0, f64::max),
        fit,
    })
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn ratio_range(pts: &[(f64, f64)], power: f64) -> (f64, f64) {
    pts.iter()
        .map(|&(l, v)| v / l.powf(power))
        .fold((f64::INFINITY, 0.0), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{jacobi_c, JacobiParams};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize, hi: f64) -> Vec<f64> {
        (0..=n).map(|k| hi * k as f64 / n as f64).collect()
    }

    #[test]
    fn phi_starts_at_one() {
        let m = DensityModel::damek_ricci(2, 1).unwrap();
        let t = solve_phi(&m, cx(1.7, 0.0), &[0.0, 0.3, 2.0], 1e-12).unwrap();
        assert_eq!(t.phi[0], cx(1.0, 0.0));
        assert_eq!(t.phi_prime[0], cx(0.0, 0.0));
    }

    #[test]
    fn frobenius_leading_coefficient() {
        let m = DensityModel::hyperbolic(4).unwrap();
        let big = cx(2.0, 0.0);
        let a = frobenius_coefficients(&m, big, 3);
        assert!((a[1] - (-big / (4.0 * (m.alpha() + 1.0)))).norm() < 1e-15);
    }

    #[test]
    fn three_dimensional_closed_form() {
        let m = DensityModel::hyperbolic(3).unwrap();
        let t = solve_phi(&m, cx(1.0, 0.0), &[0.0, 1.0], 1e-12).unwrap();
        assert!((t.phi[1].re - 0.716_022_915_360_433_9).abs() < 1e-11);
        assert!(t.phi[1].im.abs() < 1e-15);
    }

    #[test]
    fn matches_jacobi_oracle_on_plane() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let p = JacobiParams::for_model(&m).unwrap();
        let rs = grid(40, 10.0);
        let t = solve_phi(&m, cx(2.5, 0.0), &rs, 1e-12).unwrap();
        for (r, v) in rs.iter().zip(&t.phi) {
            let o = p.phi_at_radius(cx(2.5, 0.0), *r).unwrap();
            assert!((v - o).norm() <= 1e-9 * o.norm(), "r={r}: {v} vs {o}");
        }
    }

    #[test]
    fn even_in_lambda() {
        let m = DensityModel::hyperbolic(5).unwrap();
        let rs = grid(20, 8.0);
        for lam in [cx(0.8, 0.0), cx(3.0, -0.4)] {
            let a = solve_phi(&m, lam, &rs, 1e-12).unwrap();
            let b = solve_phi(&m, -lam, &rs, 1e-12).unwrap();
            for (x, y) in a.phi.iter().zip(&b.phi) {
                assert!((x - y).norm() <= 1e-11 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn positive_below_the_spectrum() {
        // λ = -it with t > ρ
        let m = DensityModel::damek_ricci(2, 1).unwrap();
        let t = solve_phi(&m, cx(0.0, -1.4), &grid(30, 15.0), 1e-12).unwrap();
        for v in &t.phi {
            assert!(v.re > 0.0 && v.im.abs() <= 1e-12 * v.re);
        }
    }

    #[test]
    fn jost_seeding_and_wronskian() {
        let m = DensityModel::hyperbolic(2).unwrap();
        let rs: Vec<f64> = (1..=31).map(|k| 0.5 * k as f64).collect();
        let lam = cx(1.0, 0.0);
        let j = solve_jost(&m, lam, &rs, None, 1e-12).unwrap();
        assert!(j.wronskian_drift < 1e-10, "{}", j.wronskian_drift);
        let r = j.r_max;
        let last = rs.len() - 1;
        assert_eq!(rs[last], r);
        let norm_p = j.phi_plus[last] * (-(I * lam - m.rho()) * r).exp();
        let norm_m = j.phi_minus[last] * (-(-I * lam - m.rho()) * r).exp();
        assert!((norm_p - 1.0).norm() < 1e-12 && (norm_m - 1.0).norm() < 1e-12);
    }

    #[test]
    fn jost_exact_in_three_dimensions() {
        let m = DensityModel::hyperbolic(3).unwrap();
        let rs: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
        let lam = cx(1.0, 0.0);
        let j = solve_jost(&m, lam, &rs, Some(10.0), 1e-12).unwrap();
        for (k, &r) in rs.iter().enumerate() {
            // Φ = (1/2) e^{iλr} / sinh r · 2 = e^{iλr}/(1 - e^{-2r}) · e^{-r}
            let exact = (I * lam * r).exp() * (-r).exp() / (1.0 - (-2.0 * r).exp());
            assert!((j.phi_plus[k] - exact).norm() < 1e-11 * exact.norm(), "r={r}");
        }
    }

    #[test]
    fn jost_errors() {
        let m = DensityModel::hyperbolic(2).unwrap();
        assert!(matches!(solve_jost(&m, cx(0.0, 0.0), &[1.0], None, 1e-10), Err(Error::Degenerate(_))));
        assert!(matches!(
            solve_jost(&m, cx(1.0, 0.0), &[1.0], Some(3.0), 1e-10),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(solve_jost(&m, cx(1.0, 0.0), &[0.0, 1.0], None, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn basis_identity() {
        let m = DensityModel::damek_ricci(2, 1).unwrap();
        let lam = cx(1.3, 0.0);
        let r_max = jost_radius(&m);
        let rs: Vec<f64> = (0..=10).map(|k| r_max / 2.0 + k as f64 * r_max / 20.0).collect();
        let j = solve_jost(&m, lam, &rs, Some(r_max), 1e-12).unwrap();
        let c_plus = compute_c(&m, lam, Some(r_max), 1e-12).unwrap().value;
        let c_minus = compute_c(&m, -lam, Some(r_max), 1e-12).unwrap().value;
        let mut with0 = vec![0.0];
        with0.extend(&rs);
        let phi = solve_phi(&m, lam, &with0, 1e-12).unwrap();
        for k in 0..rs.len() {
            let recon = c_plus * j.phi_plus[k] + c_minus * j.phi_minus[k];
            let scale = j.phi_plus[k].norm() + j.phi_minus[k].norm();
            assert!((phi.phi[k + 1] - recon).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn c_closed_forms_and_symmetry() {
        let h3 = DensityModel::hyperbolic(3).unwrap();
        for lam in [0.3, 2.0, 9.0] {
            let c = compute_c(&h3, cx(lam, 0.0), None, 1e-12).unwrap();
            assert!((c.value - 1.0 / (I * lam)).norm() < 1e-10 / lam);
        }
        let h2 = DensityModel::hyperbolic(2).unwrap();
        let p = JacobiParams::for_model(&h2).unwrap();
        let c1 = compute_c(&h2, cx(1.0, 0.0), None, 1e-12).unwrap();
        let o = jacobi_c(&p, cx(1.0, 0.0)).unwrap();
        assert!((c1.value - o).norm() < 1e-6 * o.norm());
        assert!(c1.matching_spread < 1e-10);
        let cm = compute_c(&h2, cx(-1.0, 0.0), None, 1e-12).unwrap();
        assert!((cm.value - c1.value.conj()).norm() < 1e-10);
        assert!(compute_c(&h2, cx(0.0, 0.0), None, 1e-12).is_err());
    }

    #[test]
    fn limit_form_of_c() {
        let h3 = DensityModel::hyperbolic(3).unwrap();
        let c = c_by_limit(&h3, cx(0.0, -1.0), None).unwrap();
        assert!((c - 1.0).norm() < 1e-10);
        let h2 = DensityModel::hyperbolic(2).unwrap();
        let lam = cx(1.0, -0.3);
        let a = c_by_limit(&h2, lam, None).unwrap();
        let b = compute_c(&h2, lam, None, 1e-12).unwrap().value;
        assert!((a - b).norm() < 1e-6 * b.norm());
        // λ = -iρ gives φ ≡ 1 and c = 1
        let at_rho = c_by_limit(&h2, cx(0.0, -h2.rho()), None).unwrap();
        assert!((at_rho - 1.0).norm() < 1e-12);
        assert!(matches!(c_by_limit(&h2, cx(1.0, 0.0), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn entire_in_lambda() {
        // Cauchy integral over a circle reproduces the value at the centre
        let m = DensityModel::hyperbolic(2).unwrap();
        let center = cx(1.5, 0.2);
        let radius = 0.5;
        let rs = [0.0, 2.0];
        let n = 32;
        let mut acc = cx(0.0, 0.0);
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let lam = center + radius * cx(th.cos(), th.sin());
            acc += solve_phi(&m, lam, &rs, 1e-13).unwrap().phi[1];
        }
        let direct = solve_phi(&m, center, &rs, 1e-13).unwrap().phi[1];
        assert!((acc / n as f64 - direct).norm() < 1e-10);
    }

    #[test]
    fn bloom_xu_regimes() {
        let m = DensityModel::damek_ricci(2, 1).unwrap();
        let grid = [0.01, 0.02, 0.04, 20.0, 30.0, 40.0];
        let t = c_function_table(&m, &grid, 1e-12).unwrap();
        for (c, inv) in t.c_values.iter().zip(&t.c_abs_inv_sq) {
            assert_eq!(*inv, c.norm_sqr().recip());
        }
        let fit = t.fit.unwrap();
        assert!((fit.slope_small - 1.0).abs() < 0.05, "{fit:?}");
        assert!((fit.slope_large - 1.5).abs() < 0.05 * 1.5, "{fit:?}");
    }
}
