//! Hyperboloid model of real hyperbolic space Hⁿ.
//!
//! Points satisfy x₀² - |x⃗|² = 1 with x₀ > 0 and ⟨a, b⟩ = a₀b₀ - a⃗·b⃗.
//! A boundary direction ξ ∈ S^{n-1} corresponds to the null vector (1, ξ).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive_gk15_seeded, tanh_sinh, Rule};
use crate::oracle::ln_gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint {
    coords: Vec<f64>,
}

impl HyperboloidPoint {
    /// Projects onto the upper sheet by recomputing x₀ from the spatial part.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::Domain("need at least 3 coordinates (n >= 2)".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) || coords[0] <= 0.0 {
            return Err(Error::Domain("coordinates must be finite with x0 > 0".into()));
        }
        let spatial: f64 = coords[1..].iter().map(|c| c * c).sum();
        let x0 = (1.0 + spatial).sqrt();
        if (coords[0] - x0).abs() > 1e-6 * x0 {
            return Err(Error::Domain(format!(
                "point is off the hyperboloid: x0 = {}, expected {x0}",
                coords[0]
            )));
        }
        let mut coords = coords;
        coords[0] = x0;
        Ok(HyperboloidPoint { coords })
    }

    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        HyperboloidPoint { coords }
    }

    /// The point at distance r from the origin in direction `dir`.
    pub fn from_polar(r: f64, dir: &BoundaryDirection) -> Self {
        let mut coords = Vec::with_capacity(dir.dim() + 1);
        coords.push(r.cosh());
        coords.extend(dir.as_slice().iter().map(|d| d * r.sinh()));
        HyperboloidPoint { coords }
    }

    /// Point of H² at polar coordinates (r, angle) about the origin.
    pub fn plane(r: f64, angle: f64) -> Self {
        HyperboloidPoint {
            coords: vec![r.cosh(), r.sinh() * angle.cos(), r.sinh() * angle.sin()],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// ⟨x, (1, ξ)⟩ = x₀ - x⃗·ξ.
    fn pair_null(&self, xi: &BoundaryDirection) -> f64 {
        let xs = &self.coords[1..];
        let s = dot(xs, xi.as_slice());
        if s <= 0.0 {
            return self.coords[0] - s;
        }
        // x₀² - s² = 1 + |x⃗ - sξ|², which avoids cancellation for x near ξ
        let perp: f64 = xs.iter().zip(xi.as_slice()).map(|(x, d)| (x - s * d).powi(2)).sum();
        (1.0 + perp) / (self.coords[0] + s)
    }

    /// Image under the boost taking the origin to `x`.
    pub fn boosted_by(&self, x: &HyperboloidPoint) -> HyperboloidPoint {
        HyperboloidPoint { coords: boost(x, &self.coords) }
    }

    /// The point at distance t from self on the ray towards ξ.
    pub fn towards(&self, xi: &BoundaryDirection, t: f64) -> HyperboloidPoint {
        let k = self.pair_null(xi);
        let mut coords = Vec::with_capacity(self.coords.len());
        for (i, &x) in self.coords.iter().enumerate() {
            let l = if i == 0 { 1.0 } else { xi.as_slice()[i - 1] };
            // unit tangent u = ℓ/⟨x,ℓ⟩ - x
            let u = l / k - x;
            coords.push(t.cosh() * x + t.sinh() * u);
        }
        HyperboloidPoint { coords }
    }
}

/// Lorentz boost mapping the origin to x, applied to v.
fn boost(x: &HyperboloidPoint, v: &[f64]) -> Vec<f64> {
    let x0 = x.coords[0];
    let xs = &x.coords[1..];
    let xv = dot(xs, &v[1..]);
    let mut out = Vec::with_capacity(v.len());
    out.push(x0 * v[0] + xv);
    let k = v[0] + xv / (1.0 + x0);
    for (i, &vi) in v[1..].iter().enumerate() {
        out.push(vi + xs[i] * k);
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDirection {
    dir: Vec<f64>,
}

impl BoundaryDirection {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let norm = dot(&v, &v).sqrt();
        if v.len() < 2 || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("boundary direction needs a nonzero finite vector of length >= 2".into()));
        }
        Ok(BoundaryDirection { dir: v.into_iter().map(|c| c / norm).collect() })
    }

    /// Direction on the circle at infinity of H².
    pub fn angle(theta: f64) -> Self {
        BoundaryDirection { dir: vec![theta.cos(), theta.sin()] }
    }

    /// Direction at polar angle θ from the first axis, in the (e₁, e₂)-plane of Hⁿ.
    pub fn polar(n: usize, theta: f64) -> Self {
        let mut dir = vec![0.0; n];
        dir[0] = theta.cos();
        dir[1] = theta.sin();
        BoundaryDirection { dir }
    }

    pub fn dim(&self) -> usize {
        self.dir.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.dir
    }
}

/// Hyperbolic distance.
pub fn distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> f64 {
    // |x - y|² in the Minkowski norm is 2cosh d - 2; 2 asinh(|x-y|/2) avoids
    // the loss of precision of arccosh near d = 0.
    let d0 = x.coords[0] - y.coords[0];
    let ds: f64 = x.coords[1..].iter().zip(&y.coords[1..]).map(|(a, b)| (a - b) * (a - b)).sum();
    let q = (ds - d0 * d0).max(0.0);
    2.0 * (0.5 * q.sqrt()).asinh()
}

/// Busemann function B_{ξ,x}(y), vanishing at y = x.
pub fn busemann(xi: &BoundaryDirection, x: &HyperboloidPoint, y: &HyperboloidPoint) -> f64 {
    (y.pair_null(xi) / x.pair_null(xi)).ln()
}

/// Gromov product (ξ|η)_x, computed as ½(B_{ξ,p}(x) + B_{η,p}(x)) for the point
/// p where the geodesic from ξ to η is closest to the origin.
pub fn gromov_product(xi: &BoundaryDirection, eta: &BoundaryDirection, x: &HyperboloidPoint) -> f64 {
    let cross = 1.0 - dot(xi.as_slice(), eta.as_slice());
    if cross <= 0.0 {
        return f64::INFINITY;
    }
    let scale = (2.0 * cross).sqrt();
    let mut coords = Vec::with_capacity(x.coords.len());
    coords.push(2.0 / scale);
    coords.extend(xi.as_slice().iter().zip(eta.as_slice()).map(|(a, b)| (a + b) / scale));
    let p = HyperboloidPoint { coords };
    0.5 * (busemann(xi, &p, x) + busemann(eta, &p, x))
}

/// ∫₀^π sin^{n-2}θ dθ.
fn sphere_weight_norm(n: usize) -> f64 {
    let k = (n as f64 - 1.0) / 2.0;
    (0.5 * PI.ln() + ln_gamma(Complex64::new(k, 0.0)).re - ln_gamma(Complex64::new(k + 0.5, 0.0)).re).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Gauss rule in the polar angle for integrands symmetric about the first axis.
    Axial,
    /// Uniform trapezoid rule on the circle (n = 2 only).
    Circle,
}

#[derive(Debug, Clone)]
pub struct VisibilityQuadrature {
    pub basepoint: HyperboloidPoint,
    pub nodes: Vec<(BoundaryDirection, f64)>,
    pub scheme: QuadratureScheme,
}

impl VisibilityQuadrature {
    pub fn integrate<F: FnMut(&BoundaryDirection) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().map(|(xi, w)| f(xi) * *w).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.1).sum()
    }
}

/// Quadrature for the visibility measure λ_x: the rule for λ_o reweighted by
/// the Radon-Nikodym factor e^{-h B_{ξ,o}(x)}, h = n - 1.
pub fn build_visibility_quadrature(
    x: &HyperboloidPoint,
    order: usize,
    scheme: QuadratureScheme,
) -> Result<VisibilityQuadrature> {
    if order < 8 {
        return Err(Error::Precondition(format!("quadrature order must be >= 8, got {order}")));
    }
    let n = x.dim();
    let origin = HyperboloidPoint::origin(n);
    let h = n as f64 - 1.0;
    let base: Vec<(BoundaryDirection, f64)> = match scheme {
        QuadratureScheme::Circle => {
            if n != 2 {
                return Err(Error::Capability(format!(
                    "non-axial boundary quadrature is only available for n = 2, got n = {n}"
                )));
            }
            (0..order)
                .map(|k| (BoundaryDirection::angle(2.0 * PI * k as f64 / order as f64), 1.0 / order as f64))
                .collect()
        }
        QuadratureScheme::Axial => {
            if x.coords[2..].iter().any(|c| *c != 0.0) {
                return Err(Error::Capability(
                    "axial quadrature needs a basepoint on the symmetry axis".into(),
                ));
            }
            let rule = Rule::composite(0.0, PI, 1, order);
            let raw: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| w * t.sin().powi(n as i32 - 2))
                .collect();
            let total: f64 = raw.iter().sum();
            rule.nodes
                .iter()
                .zip(raw)
                .map(|(&t, w)| (BoundaryDirection::polar(n, t), w / total))
                .collect()
        }
    };
    let nodes = base
        .into_iter()
        .map(|(xi, w)| {
            let factor = (-h * busemann(&xi, &origin, x)).exp();
            (xi, w * factor)
        })
        .collect();
    Ok(VisibilityQuadrature { basepoint: x.clone(), nodes, scheme })
}

/// (cosh r - sinh r cos θ)^μ evaluated through its half-angle form.
fn horo_power(r: f64, theta: f64, mu: Complex64) -> Complex64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let base = (-r).exp() * c * c + r.exp() * s * s;
    (mu * base.ln()).exp()
}

/// ∫ e^{(iλ-ρ)B_{ξ,o}(y)} dλ_o(ξ) for |y| = r in Hⁿ, by adaptive Gauss-Kronrod
/// starting from a panel count proportional to |λ|r.
pub fn phi_via_boundary(n: usize, lambda: Complex64, r: f64, quad_order: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let rho = (n as f64 - 1.0) / 2.0;
    let mu = Complex64::new(0.0, 1.0) * lambda - rho;
    let norm = sphere_weight_norm(n);
    let panels = quad_order.max((lambda.norm() * r).ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=panels).map(|k| PI * k as f64 / panels as f64).collect();
    let mut f = |t: f64| horo_power(r, t, mu) * t.sin().powi(n as i32 - 2) / norm;
    let (v, _) = adaptive_gk15_seeded(&mut f, &breaks, 1e-15, 1e-13, 20_000)?;
    Ok(v)
}

/// ∫ e^{-2(iλ-ρ)(ξ|η)_o} dλ_o(η) = ∫₀^π sin(θ/2)^{2(iλ-ρ)} w_n(θ) dθ for Im λ < 0.
pub fn c_via_boundary(n: usize, lambda: Complex64, quad_order: usize) -> Result<Complex64> {
    if !(lambda.im < 0.0) {
        return Err(Error::Precondition(format!("c_via_boundary needs Im lambda < 0, got {lambda}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    let rho = (n as f64 - 1.0) / 2.0;
    let mu = Complex64::new(0.0, 1.0) * lambda - rho;
    let norm = sphere_weight_norm(n);
    let tol = 10f64.powi(-(quad_order.clamp(8, 14) as i32));
    let (v, _) = tanh_sinh(
        |theta, dl, dr| {
            // sin(θ/2) and sin θ from the endpoint distances to avoid cancellation
            let half = (0.5 * dl).sin();
            let sin_t = if dl < dr { dl.sin() } else { dr.sin() };
            let _ = theta;
            // log form: the two factors may separately over- and underflow
            let weight = if n == 2 { 0.0 } else { (n as f64 - 2.0) * sin_t.ln() };
            (mu * 2.0 * half.ln() + weight).exp() / norm
        },
        0.0,
        PI,
        tol,
    )?;
    Ok(v)
}

/// Average of f over the sphere S(x, r) ⊂ H² with the normalized measure.
pub fn radialize<F: FnMut(&HyperboloidPoint) -> Complex64>(
    mut f: F,
    x: &HyperboloidPoint,
    r: f64,
    quad_order: usize,
) -> Result<Complex64> {
    if x.dim() != 2 {
        return Err(Error::Capability(format!("radialization is implemented for n = 2, got n = {}", x.dim())));
    }
    if quad_order == 0 {
        return Err(Error::Precondition("quadrature order must be positive".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..quad_order {
        let phi = 2.0 * PI * k as f64 / quad_order as f64;
        acc += f(&HyperboloidPoint::plane(r, phi).boosted_by(x));
    }
    Ok(acc / quad_order as f64)
}

/// λ_o of the shadow ball {η : e^{-(ξ|η)_o} < ε} = {sin(θ/2) < ε}.
pub fn shadow_ball_measure(n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
    }
    if eps >= 1.0 {
        return Ok(1.0);
    }
    let theta = 2.0 * eps.asin();
    let norm = sphere_weight_norm(n);
    let mut f = |t: f64| Complex64::new(t.sin().powi(n as i32 - 2) / norm, 0.0);
    Ok(adaptive_gk15_seeded(&mut f, &[0.0, theta], 1e-300, 1e-13, 1000)?.0.re)
}

/// The bound e^{6δh} ε^h on shadow-ball measures with h = n - 1.
pub fn shadow_ball_bound(n: usize, delta: f64, eps: f64) -> f64 {
    let h = n as f64 - 1.0;
    (6.0 * delta * h).exp() * eps.powf(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn distance_examples() {
        let o = HyperboloidPoint::origin(2);
        assert_eq!(distance(&o, &o), 0.0);
        let y = HyperboloidPoint::new(vec![2f64.cosh(), 2f64.sinh(), 0.0]).unwrap();
        assert_relative_eq!(distance(&o, &y), 2.0, max_relative = 1e-15);
        assert!(HyperboloidPoint::new(vec![1.0, 3.0, 0.0]).is_err());
    }

    #[test]
    fn busemann_examples() {
        let o = HyperboloidPoint::origin(3);
        let xi = BoundaryDirection::new(vec![0.0, 0.6, 0.8]).unwrap();
        let x = HyperboloidPoint::from_polar(0.7, &BoundaryDirection::new(vec![1.0, 1.0, 0.0]).unwrap());
        assert_eq!(busemann(&xi, &x, &x), 0.0);
        for t in [0.5, 3.0, 12.0] {
            let g = o.towards(&xi, t);
            assert_relative_eq!(busemann(&xi, &o, &g), -t, max_relative = 1e-12);
        }
    }

    #[test]
    fn gromov_examples() {
        let o = HyperboloidPoint::origin(2);
        let xi = BoundaryDirection::angle(0.3);
        assert_eq!(gromov_product(&xi, &xi, &o), f64::INFINITY);
        assert!(gromov_product(&xi, &BoundaryDirection::angle(0.3 + PI), &o).abs() < 1e-15);
        assert_relative_eq!(
            gromov_product(&xi, &BoundaryDirection::angle(0.3 + PI / 3.0), &o),
            std::f64::consts::LN_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn towards_stays_on_the_hyperboloid() {
        let x = HyperboloidPoint::plane(1.3, 0.4);
        let xi = BoundaryDirection::angle(2.0);
        let y = x.towards(&xi, 2.5);
        let c = y.coords();
        assert_relative_eq!(c[0] * c[0] - c[1] * c[1] - c[2] * c[2], 1.0, max_relative = 1e-12);
        assert_relative_eq!(distance(&x, &y), 2.5, max_relative = 1e-12);
    }

    #[test]
    fn visibility_masses() {
        let o = HyperboloidPoint::origin(4);
        let q = build_visibility_quadrature(&o, 16, QuadratureScheme::Axial).unwrap();
        assert_relative_eq!(q.total_mass(), 1.0, max_relative = 1e-14);
        let x = HyperboloidPoint::plane(0.9, 2.1);
        let q = build_visibility_quadrature(&x, 256, QuadratureScheme::Circle).unwrap();
        assert_relative_eq!(q.total_mass(), 1.0, max_relative = 1e-12);
        let axis = HyperboloidPoint::from_polar(0.8, &BoundaryDirection::polar(3, 0.0));
        let q = build_visibility_quadrature(&axis, 64, QuadratureScheme::Axial).unwrap();
        assert_relative_eq!(q.total_mass(), 1.0, max_relative = 1e-10);
        assert!(matches!(
            build_visibility_quadrature(&HyperboloidPoint::origin(3), 32, QuadratureScheme::Circle),
            Err(Error::Capability(_))
        ));
        assert!(build_visibility_quadrature(&o, 4, QuadratureScheme::Axial).is_err());
    }

    #[test]
    fn boundary_phi_three_dimensions() {
        let v = phi_via_boundary(3, Complex64::new(1.0, 0.0), 1.0, 8).unwrap();
        assert!((v - 0.716_022_915_360_433_9).norm() < 1e-12);
        assert_eq!(phi_via_boundary(2, Complex64::new(1.0, 0.0), 0.0, 8).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn boundary_c_closed_forms() {
        // 2^{n-2} B(μ+ρ, ρ) / ∫ sin^{n-2}
        let beta_form = |n: usize, lambda: Complex64| {
            let rho = (n as f64 - 1.0) / 2.0;
            let mu = Complex64::new(0.0, 1.0) * lambda - rho;
            let r = Complex64::new(rho, 0.0);
            let lb = ln_gamma(mu + r) + ln_gamma(r) - ln_gamma(mu + 2.0 * rho);
            lb.exp() * 2f64.powi(n as i32 - 2) / sphere_weight_norm(n)
        };
        for n in [2, 3, 4] {
            for lam in [Complex64::new(0.0, -0.1), Complex64::new(1.2, -0.5), Complex64::new(-0.4, -1.5)] {
                let got = c_via_boundary(n, lam, 13).unwrap();
                let exact = beta_form(n, lam);
                assert!((got - exact).norm() < 1e-11 * exact.norm(), "n={n} λ={lam}: {got} vs {exact}");
            }
        }
        let one = c_via_boundary(3, Complex64::new(0.0, -1.0), 12).unwrap();
        assert!((one - 1.0).norm() < 1e-12);
        assert!(c_via_boundary(2, Complex64::new(1.0, 0.0), 12).is_err());
    }

    #[test]
    fn radialize_constant() {
        let x = HyperboloidPoint::plane(0.5, 1.0);
        let v = radialize(|_| Complex64::new(3.5, 0.0), &x, 2.0, 16).unwrap();
        assert!((v - 3.5).norm() < 1e-14);
        assert!(radialize(|_| Complex64::new(1.0, 0.0), &HyperboloidPoint::origin(3), 1.0, 8).is_err());
    }

    #[test]
    fn shadow_ball_measure_closed_form() {
        // n = 3: λ_o(cap of half-angle θ) = (1 - cos θ)/2 = 2 sin²(θ/2)·... = ε²
        for eps in [0.5, 0.1, 0.01] {
            assert_relative_eq!(shadow_ball_measure(3, eps).unwrap(), eps * eps, max_relative = 1e-12);
        }
    }
}
