//! Closed-form ground truth from Jacobi function theory: complex Gamma, the
//! Gauss hypergeometric function on the negative real axis, Jacobi functions
//! and their c-functions.
//!
//! Nothing here depends on the ODE solver, so agreement with [`crate::eigen`]
//! is a genuine cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::density::{DensityModel, ModelKind};
use crate::error::{Error, Result};
use crate::numerics::dd::Cdd;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_7e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln Γ(z) on some branch; only exp of the result is meaningful. Infinite at
/// the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return c(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return c(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = c(LANCZOS[0], 0.0);
    for (k, &ck) in LANCZOS.iter().enumerate().skip(1) {
        x += ck / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// ln sin(πz) without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = c(0.0, 1.0);
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
        -i * PI * z + (i / 2.0).ln() + (-(2.0 * i * PI * z).exp()).ln_1p()
    } else {
        // sin(πz) = (1/2i) e^{iπz} (1 - e^{-2iπz})
        i * PI * z - (2.0 * i).ln() + (-(-2.0 * i * PI * z).exp()).ln_1p()
    }
}

trait Ln1p {
    fn ln_1p(self) -> Self;
}

impl Ln1p for Complex64 {
    fn ln_1p(self) -> Self {
        if self.norm() < 1e-8 {
            self - self * self / 2.0
        } else {
            (1.0 + self).ln()
        }
    }
}

/// Γ(z); fails at the poles z = 0, -1, -2, ...
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Degenerate(format!("Gamma pole at {z}")));
    }
    Ok(ln_gamma(z).exp())
}

/// Γ(n1)Γ(n2) / (Γ(d1)Γ(d2)); zero when a denominator argument is a pole.
fn gamma_ratio(num: [Complex64; 2], den: [Complex64; 2]) -> Result<Complex64> {
    if let Some(p) = num.iter().find(|z| is_pole(**z)) {
        return Err(Error::Degenerate(format!("Gamma pole at {p} in numerator")));
    }
    if den.iter().any(|z| is_pole(*z)) {
        return Ok(c(0.0, 0.0));
    }
    Ok((ln_gamma(num[0]) + ln_gamma(num[1]) - ln_gamma(den[0]) - ln_gamma(den[1])).exp())
}

const SERIES_MAX_TERMS: usize = 20_000;

/// Σ (a)_k (b)_k / ((c)_k k!) x^k summed in double-double arithmetic.
fn series(a: Complex64, b: Complex64, cc: Complex64, x: f64) -> Result<Complex64> {
    if is_pole(cc) {
        return Err(Error::Degenerate(format!("lower parameter {cc} is a non-positive integer")));
    }
    let (a, b, cc) = (Cdd::new(a), Cdd::new(b), Cdd::new(cc));
    let x = Cdd::new(c(x, 0.0));
    let one = Cdd::new(c(1.0, 0.0));
    let mut term = one;
    let mut sum = one;
    let mut quiet = 0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let num = a.add_real(kf).mul(b.add_real(kf)).mul(x);
        let den = cc.add_real(kf).mul(Cdd::new(c(kf + 1.0, 0.0)));
        term = term.mul(num).div(den);
        sum = sum.add(term);
        let t = term.norm();
        if t == 0.0 {
            return Ok(sum.to_c64());
        }
        if t <= 1e-20 * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum.to_c64());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::numeric("hypergeometric series", f64::NAN, 1e-20))
}

/// The argument z ≤ 0 together with w = z/(z-1), 1 - w = 1/(1-z) and
/// ln(1 - z), each computed without cancellation by the caller.
struct NegArg {
    z: f64,
    w: f64,
    one_minus_w: f64,
    ln_one_minus_z: f64,
}

fn hyp_negative(a: Complex64, b: Complex64, cc: Complex64, arg: &NegArg) -> Result<Complex64> {
    if is_pole(cc) {
        return Err(Error::Degenerate(format!("lower parameter {cc} is a non-positive integer")));
    }
    if arg.z == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    if -arg.z <= 0.5 {
        return series(a, b, cc, arg.z);
    }
    // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; w)
    let prefactor = (-a * arg.ln_one_minus_z).exp();
    let bp = cc - b;
    let s = cc - a - bp;
    let integer_gap = s.im == 0.0 && s.re == s.re.round();
    if arg.w <= 0.7 || (integer_gap && arg.w <= 0.98) {
        return Ok(prefactor * series(a, bp, cc, arg.w)?);
    }
    if integer_gap {
        return Err(Error::Degenerate(format!(
            "connection formula needs c - a - b non-integer, got {s} (w = {})",
            arg.w
        )));
    }
    let y = arg.one_minus_w;
    let ln_y = -arg.ln_one_minus_z;
    let first = gamma_ratio([cc, s], [cc - a, cc - bp])? * series(a, bp, 1.0 - s, y)?;
    let second = if y == 0.0 && s.re > 0.0 {
        c(0.0, 0.0)
    } else {
        (s * ln_y).exp()
            * gamma_ratio([cc, -s], [a, bp])?
            * series(cc - a, cc - bp, s + 1.0, y)?
    };
    Ok(prefactor * (first + second))
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z ≤ 0.
pub fn gauss_2f1(a: Complex64, b: Complex64, cc: Complex64, z: f64) -> Result<Complex64> {
    if !(z <= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("argument must be finite and <= 0, got {z}")));
    }
    let one_minus_z = 1.0 - z;
    let arg = NegArg {
        z,
        w: -z / one_minus_z,
        one_minus_w: 1.0 / one_minus_z,
        ln_one_minus_z: (-z).ln_1p(),
    };
    hyp_negative(a, b, cc, &arg)
}

/// Jacobi-function parameters and the change of variables to a model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha_j: f64,
    pub beta_j: f64,
    pub rho_j: f64,
    /// Model radius r = s·t in terms of the Jacobi variable t.
    pub variable_scale: f64,
    /// Jacobi spectral parameter λ_J = spectral_scale·λ.
    pub spectral_scale: f64,
}

impl JacobiParams {
    pub fn new(alpha_j: f64, beta_j: f64, variable_scale: f64, spectral_scale: f64) -> Result<Self> {
        if !(alpha_j > -1.0) {
            return Err(Error::Domain(format!("alpha_J must exceed -1, got {alpha_j}")));
        }
        Ok(JacobiParams {
            alpha_j,
            beta_j,
            rho_j: alpha_j + beta_j + 1.0,
            variable_scale,
            spectral_scale,
        })
    }

    pub fn for_model(model: &DensityModel) -> Result<Self> {
        match *model.kind() {
            ModelKind::Hyperbolic { n } => Self::new((n as f64 - 2.0) / 2.0, -0.5, 1.0, 1.0),
            ModelKind::DamekRicci { p, q } => {
                Self::new((p + q) as f64 / 2.0 - 0.5, q as f64 / 2.0 - 0.5, 2.0, 2.0)
            }
            ModelKind::ExpPolynomial { .. } => Err(Error::Capability(
                "no Jacobi-function oracle for exponential-polynomial models".into(),
            )),
        }
    }

    /// φ at model radius r.
    pub fn phi_at_radius(&self, lambda: Complex64, r: f64) -> Result<Complex64> {
        jacobi_phi(self, lambda, r / self.variable_scale)
    }
}

/// Jacobi function ₂F₁((ρ_J + iλ_J)/2, (ρ_J - iλ_J)/2; α_J + 1; -sinh²t).
pub fn jacobi_phi(params: &JacobiParams, lambda: Complex64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    let mu = lambda * params.spectral_scale;
    let i = c(0.0, 1.0);
    let a = (params.rho_j + i * mu) / 2.0;
    let b = (params.rho_j - i * mu) / 2.0;
    let cc = c(params.alpha_j + 1.0, 0.0);
    let sinh = t.sinh();
    let ln_cosh = t - std::f64::consts::LN_2 + (-2.0 * t).exp().ln_1p();
    let sech = 1.0 / t.cosh();
    let arg = NegArg {
        z: -sinh * sinh,
        w: t.tanh().powi(2),
        one_minus_w: sech * sech,
        ln_one_minus_z: 2.0 * ln_cosh,
    };
    hyp_negative(a, b, cc, &arg)
}

/// Jacobi c-function, normalized so that φ = c(λ)Φ_λ + c(-λ)Φ_{-λ} with
/// Φ_{±λ}(r) ~ e^{(±iλ-ρ)r} in the model radius.
pub fn jacobi_c(params: &JacobiParams, lambda: Complex64) -> Result<Complex64> {
    if lambda == c(0.0, 0.0) {
        return Err(Error::Degenerate("c-function is undefined at lambda = 0".into()));
    }
    let mu = lambda * params.spectral_scale;
    let imu = c(0.0, 1.0) * mu;
    let (al, be, rho) = (params.alpha_j, params.beta_j, params.rho_j);
    let power = ((rho - imu) * std::f64::consts::LN_2).exp();
    let ratio = gamma_ratio(
        [c(al + 1.0, 0.0), imu],
        [(imu + rho) / 2.0, (imu + al - be + 1.0) / 2.0],
    )?;
    Ok(power * ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma(c(5.0, 0.0)).unwrap().re, 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(c(0.5, 0.0)).unwrap().re, PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            gamma(c(-1.5, 0.0)).unwrap().re,
            4.0 * PI.sqrt() / 3.0,
            max_relative = 1e-14
        );
        // Γ(1+i) from an independent high-precision evaluation
        let g = gamma(c(1.0, 1.0)).unwrap();
        assert!(rel(g, c(0.498_015_668_118_356, -0.154_949_828_301_810_7)) < 1e-14);
        assert!(gamma(c(-3.0, 0.0)).is_err());
    }

    #[test]
    fn gamma_modulus_on_vertical_lines() {
        for &y in &[0.01, 0.3, 1.0, 4.5, 19.0, 40.0] {
            let g0 = ln_gamma(c(0.0, y)).exp().norm_sqr();
            let exact0 = PI / (y * (PI * y).sinh());
            assert_relative_eq!(g0, exact0, max_relative = 1e-12);
            let g1 = ln_gamma(c(0.5, y)).exp().norm_sqr();
            assert_relative_eq!(g1, PI / (PI * y).cosh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn hypergeometric_identities() {
        assert_eq!(gauss_2f1(c(0.3, 1.0), c(2.0, 0.0), c(1.5, 0.0), 0.0).unwrap(), c(1.0, 0.0));
        let one = c(1.0, 0.0);
        for &z in &[-0.2, -0.5, -1.0, -2.9] {
            let got = gauss_2f1(one, one, c(2.0, 0.0), z).unwrap();
            assert_relative_eq!(got.re, -(-z).ln_1p() / z, max_relative = 1e-14);
        }
        assert_relative_eq!(
            gauss_2f1(one, one, c(2.0, 0.0), -1.0).unwrap().re,
            std::f64::consts::LN_2,
            max_relative = 1e-15
        );
        // F(a, b; b; z) = (1 - z)^{-a}, here through the connection formula
        let (a, b) = (c(0.3, 0.0), c(1.7, 0.5));
        for &z in &[-3.0, -1e3, -1e6] {
            let got = gauss_2f1(a, b, b, z).unwrap();
            let exact = (-a * (-z).ln_1p()).exp();
            assert!(rel(got, exact) < 1e-13, "z={z}: {got} vs {exact}");
        }
    }

    #[test]
    fn domain_and_degeneracy_errors() {
        let one = c(1.0, 0.0);
        assert!(matches!(gauss_2f1(one, one, c(-2.0, 0.0), -0.1), Err(Error::Degenerate(_))));
        assert!(matches!(gauss_2f1(one, one, one, 0.5), Err(Error::Domain(_))));
        assert!(matches!(gauss_2f1(one, one, c(2.0, 0.0), -1e6), Err(Error::Degenerate(_))));
    }

    fn h3_phi(lambda: Complex64, t: f64) -> Complex64 {
        if t == 0.0 {
            return c(1.0, 0.0);
        }
        (lambda * t).sin() / (lambda * t.sinh())
    }

    #[test]
    fn jacobi_phi_three_dimensional_closed_form() {
        let p = JacobiParams::for_model(&DensityModel::hyperbolic(3).unwrap()).unwrap();
        assert_relative_eq!(
            jacobi_phi(&p, c(1.0, 0.0), 1.0).unwrap().re,
            0.716_022_915_360_433_9,
            max_relative = 1e-14
        );
        for &lam in &[c(0.1, 0.0), c(1.0, 0.0), c(7.3, 0.0), c(20.0, 0.0), c(1.0, -0.5)] {
            for &t in &[0.0, 0.3, 0.7, 1.0, 1.3, 2.0, 5.0, 10.0, 30.0] {
                let got = jacobi_phi(&p, lam, t).unwrap();
                let exact = h3_phi(lam, t);
                // absolute error on the e^{-ρt} envelope
                let env = ((lam.im.abs() - 1.0) * t).exp() * (1.0 + t);
                assert!((got - exact).norm() <= 1e-13 * env, "λ={lam} t={t}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_c_closed_forms() {
        let h3 = JacobiParams::for_model(&DensityModel::hyperbolic(3).unwrap()).unwrap();
        let h2 = JacobiParams::for_model(&DensityModel::hyperbolic(2).unwrap()).unwrap();
        let i = c(0.0, 1.0);
        for &lam in &[0.05, 0.7, 1.0, 3.3, 20.0] {
            let cc = jacobi_c(&h3, c(lam, 0.0)).unwrap();
            assert!(rel(cc, 1.0 / (i * lam)) < 1e-13);
            let inv = jacobi_c(&h2, c(lam, 0.0)).unwrap().norm_sqr().recip();
            assert_relative_eq!(inv, PI * lam * (PI * lam).tanh(), max_relative = 1e-12);
            let conj = jacobi_c(&h2, c(-lam, 0.0)).unwrap();
            assert!(rel(conj, jacobi_c(&h2, c(lam, 0.0)).unwrap().conj()) < 1e-13);
        }
        assert!(rel(jacobi_c(&h3, c(0.0, -1.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(jacobi_c(&h3, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn damek_ricci_correspondence() {
        let p = JacobiParams::for_model(&DensityModel::damek_ricci(2, 1).unwrap()).unwrap();
        assert_eq!((p.alpha_j, p.beta_j, p.rho_j), (1.0, 0.0, 2.0));
        assert_eq!(p.rho_j, 2.0 * DensityModel::damek_ricci(2, 1).unwrap().rho());
        assert!(JacobiParams::for_model(
            &DensityModel::exp_polynomial(DensityModel::hyperbolic(2).unwrap().expansion_terms(), 2)
                .unwrap()
        )
        .is_err());
    }

    #[test]
    fn jacobi_phi_against_reference_values() {
        // (alpha_J, beta_J, mu, t, Re, Im) from 40-digit evaluations of 2F1
        let cases: [(f64, f64, Complex64, f64, f64, f64); 10] = [
            (0.0, -0.5, c(2.5, 0.0), 0.6, 0.502_211_230_980_206_2, 0.0),
            (0.0, -0.5, c(10.0, 0.0), 10.0, 0.000_576_002_078_507_132_95, 0.0),
            (0.0, -0.5, c(0.1, 0.0), 1.27, 0.904_028_506_141_902_5, 0.0),
            (1.0, -0.5, c(7.0, 0.0), 3.0, 0.002_679_357_736_185_378, 0.0),
            (1.5, -0.5, c(10.0, 0.0), 1.2, -0.011_839_842_843_488_161, 0.0),
            (1.5, -0.5, c(0.1, 0.0), 8.0, 8.659_892_254_228_329e-6, 0.0),
            (1.0, 0.0, c(20.0, 0.0), 5.0, -3.125_354_824_802_506e-6, 0.0),
            (1.0, 0.0, c(0.2, 0.0), 0.9, 0.680_194_733_207_024_1, 0.0),
            (1.0, 0.0, c(13.0, 0.0), 1.31, -0.005_712_943_878_992_464_8, 0.0),
            (0.0, -0.5, c(1.0, -0.3), 4.0, -0.277_928_522_806_351_97, -0.030_381_981_840_837_942),
        ];
        for (aj, bj, mu, t, re, im) in cases {
            let p = JacobiParams::new(aj, bj, 1.0, 1.0).unwrap();
            let got = jacobi_phi(&p, mu, t).unwrap();
            let exact = c(re, im);
            assert!(rel(got, exact) < 1e-12, "{aj} {bj} {mu} {t}: {got} vs {exact}");
        }
    }
}
