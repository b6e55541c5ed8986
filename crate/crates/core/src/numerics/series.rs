//! Truncated power series arithmetic (coefficient vectors, lowest order first).

pub fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn powi(a: &[f64], k: u32, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = 1.0;
    for _ in 0..k {
        out = mul(&out, a, len);
    }
    out
}

/// Coefficients of sinh(√x)/√x in powers of x, with x = r² scaled by `s`:
/// returns c_k such that sinh(t)/t = Σ c_k t^{2k}, multiplied by s^k.
pub fn sinhc_even(len: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut fact = 1.0; // (2k+1)!
    let mut sk = 1.0;
    for k in 0..len {
        if k > 0 {
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
            sk *= s;
        }
        out.push(sk / fact);
    }
    out
}

/// cosh(t) = Σ c_k t^{2k}, scaled by s^k.
pub fn cosh_even(len: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut fact = 1.0; // (2k)!
    let mut sk = 1.0;
    for k in 0..len {
        if k > 0 {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            sk *= s;
        }
        out.push(sk / fact);
    }
    out
}

/// Evaluates Σ c_k x^k by Horner's rule.
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_squared_series() {
        // (sinh t / t)^2 at t = 0.7
        let c = powi(&sinhc_even(20, 1.0), 2, 20);
        let t: f64 = 0.7;
        let exact = (t.sinh() / t).powi(2);
        assert!((horner(&c, t * t) - exact).abs() < 1e-15);
    }

    #[test]
    fn cosh_series_scaled() {
        let c = cosh_even(20, 0.25);
        let r: f64 = 1.3;
        assert!((horner(&c, r * r) - (r / 2.0).cosh()).abs() < 1e-15);
    }
}
