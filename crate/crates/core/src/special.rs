//! Gamma, confluent hypergeometric and Whittaker functions, and the incomplete beta integral ψ_k.

use statrs::function::gamma as sg;

use crate::error::{Error, Result};

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Half-integral Whittaker order ν = n + 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfIntOrder {
    pub n: u32,
}

impl HalfIntOrder {
    pub fn new(n: u32) -> Self {
        HalfIntOrder { n }
    }

    /// Order k/2 − 1/2 for even k ≥ 2.
    pub fn for_weight(k: u32) -> Result<Self> {
        if k < 2 || k % 2 == 1 {
            return Err(Error::Domain(format!("weight {k} does not give a half-integral order")));
        }
        Ok(HalfIntOrder { n: k / 2 - 1 })
    }

    pub fn from_f64(nu: f64) -> Result<Self> {
        let n = nu - 0.5;
        if n < 0.0 || n.fract() != 0.0 {
            return Err(Error::Domain(format!("order {nu} is not of the form n + 1/2")));
        }
        Ok(HalfIntOrder { n: n as u32 })
    }

    pub fn nu(self) -> f64 {
        self.n as f64 + 0.5
    }
}

/// ₁F₁(a; b; y) for a, b > 0 and y ≥ 0 by its positive-term series.
pub fn hyp1f1(a: f64, b: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0 && y >= 0.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        term *= (a + n) * y / ((b + n) * (n + 1.0));
        sum += term;
        n += 1.0;
        if term < 1e-17 * sum && n > y {
            break;
        }
        if n > 100_000.0 {
            break;
        }
    }
    sum
}

/// M_{μ,ν}(y) = e^{−y/2} y^{ν+1/2} ₁F₁(ν − μ + 1/2; 1 + 2ν; y), for ν − μ + 1/2 > 0.
pub fn whittaker_m(mu: f64, nu: f64, y: f64) -> f64 {
    let a = nu - mu + 0.5;
    let b = 1.0 + 2.0 * nu;
    (-y / 2.0).exp() * y.powf(nu + 0.5) * hyp1f1(a, b, y)
}

/// Modified spherical Bessel i_n(x) by upward recurrence, accurate for x ≳ n.
fn spherical_i(n: u32, x: f64) -> f64 {
    let i0 = x.sinh() / x;
    if n == 0 {
        return i0;
    }
    let mut prev = i0;
    let mut cur = (x * x.cosh() - x.sinh()) / (x * x);
    for m in 1..n {
        let next = prev - (2 * m + 1) as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    cur
}

/// M_{0,ν}(y) for half-integral ν: Γ(1+ν)·4^ν·√y·I_ν(y/2) in closed form, series at small y.
pub fn whittaker_m0(nu: HalfIntOrder, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("M_0,ν needs y > 0, got {y}")));
    }
    let v = nu.nu();
    let x = y / 2.0;
    if x < 4.0 * (nu.n as f64 + 1.0) {
        return Ok(whittaker_m(0.0, v, y));
    }
    let bessel_i = (2.0 * x / std::f64::consts::PI).sqrt() * spherical_i(nu.n, x);
    let val = gamma(1.0 + v) * 4f64.powf(v) * y.sqrt() * bessel_i;
    if !val.is_finite() {
        return Err(Error::Overflow("M_0,ν"));
    }
    Ok(val)
}

/// W_{0,ν}(y) for half-integral ν = n + 1/2: e^{−y/2} Σ_{j≤n} (n+j)!/(j!(n−j)!) y^{−j}.
pub fn whittaker_w0(nu: HalfIntOrder, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("W_0,ν needs y > 0, got {y}")));
    }
    let n = nu.n as i64;
    let mut coef = 1.0;
    let mut sum = 1.0;
    for j in 1..=n {
        // (n+j)!/(j!(n−j)!) from the previous j.
        coef *= ((n + j) * (n - j + 1)) as f64 / j as f64;
        sum += coef * y.powi(-(j as i32));
    }
    Ok((-y / 2.0).exp() * sum)
}

/// ψ_k(y) = ½ ∫₀^y t^{k−3/2} (1−t)^{−1/2} dt.
pub fn psi(k: u32, y: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("ψ_k needs k ≥ 2, got {k}")));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("ψ_k needs 0 ≤ y ≤ 1, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let a = k as f64 - 1.5;
    if y < 0.5 {
        // Σ (1/2)_n/n! · y^{a+n+1}/(a+n+1).
        let mut coef = 1.0;
        let mut yp = y.powf(a + 1.0);
        let mut sum = 0.0;
        for n in 0..400 {
            let term = coef * yp / (a + n as f64 + 1.0);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            coef *= (n as f64 + 0.5) / (n as f64 + 1.0);
            yp *= y;
        }
        return Ok(sum / 2.0);
    }
    // J_b = ∫₀^y t^b (1−t)^{−1/2}: J_b = (2b J_{b−1} − 2 y^b √(1−y))/(2b+1), from J_{1/2}.
    let phi = y.sqrt().asin();
    let root = (1.0 - y).sqrt();
    let mut j = phi - phi.sin() * phi.cos();
    let mut b = 0.5;
    while b < a - 0.25 {
        b += 1.0;
        j = (2.0 * b * j - 2.0 * y.powf(b) * root) / (2.0 * b + 1.0);
    }
    Ok(j / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauss_quad::legendre::GaussLegendre;
    use std::f64::consts::PI;

    fn gl(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        GaussLegendre::new(n.try_into().unwrap()).integrate(a, b, f)
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(4, 0.0).unwrap(), 0.0);
        assert!((psi(2, 1.0).unwrap() - PI / 4.0).abs() < 1e-14);
        assert!((psi(3, 1.0).unwrap() - 3.0 * PI / 16.0).abs() < 1e-14);
        assert!(psi(3, 1.5).is_err());
    }

    #[test]
    fn psi_matches_quadrature_and_is_monotone() {
        for k in 2..=12u32 {
            let a = k as f64 - 1.5;
            let mut last = 0.0;
            for i in 1..=100 {
                let y = i as f64 / 100.0;
                // t = sin²φ removes the endpoint singularity.
                let oracle = gl(80, 0.0, y.sqrt().asin(), |phi| phi.sin().powf(2.0 * a + 1.0));
                let v = psi(k, y).unwrap();
                assert!((v - oracle).abs() <= 1e-10 * oracle.max(1e-300) + 1e-300, "k={k} y={y}: {v} vs {oracle}");
                assert!(v > last);
                last = v;
            }
        }
    }

    #[test]
    fn m0_examples() {
        for y in [0.01, 0.5, 3.0, 20.0, 60.0] {
            let v = whittaker_m0(HalfIntOrder::new(0), y).unwrap();
            let exact = 2.0 * (y / 2.0).sinh();
            assert!((v - exact).abs() < 1e-13 * exact, "y={y}");
        }
        let y = 1e-4;
        let nu = HalfIntOrder::new(2);
        assert!((whittaker_m0(nu, y).unwrap() / y.powf(3.0) - 1.0).abs() < 1e-3);
        // Thirty-term power series of e^{−y/2}y²·₁F₁(2;4;y) at y = 1.
        let mut s = 0.0;
        let mut t = 1.0;
        for n in 0..30 {
            s += t;
            t *= (2.0 + n as f64) / ((4.0 + n as f64) * (n as f64 + 1.0));
        }
        let series = (-0.5f64).exp() * s;
        assert!((whittaker_m0(HalfIntOrder::new(1), 1.0).unwrap() - series).abs() < 1e-12);
        for n in 0..6 {
            for y in [9.0, 40.0, 100.0] {
                let a = whittaker_m0(HalfIntOrder::new(n), y).unwrap();
                let b = whittaker_m(0.0, n as f64 + 0.5, y);
                assert!((a - b).abs() < 1e-11 * b, "n={n} y={y}");
            }
        }
    }

    #[test]
    fn w0_examples() {
        for y in [0.1, 1.0, 7.0] {
            assert!((whittaker_w0(HalfIntOrder::new(0), y).unwrap() - (-y / 2.0).exp()).abs() < 1e-15);
        }
        let mut last = f64::INFINITY;
        for y in [100.0, 300.0, 600.0] {
            let dev = whittaker_w0(HalfIntOrder::new(3), y).unwrap() * (y / 2.0).exp() - 1.0;
            assert!(dev > 0.0 && dev < 15.0 / y && dev < last);
            last = dev;
        }
        // W_{0,3/2}(2) = √(2/π)·K_{3/2}(1), K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt.
        let k = gl(200, 0.0, 8.0, |t| (-t.cosh()).exp() * (1.5 * t).cosh());
        let oracle = (2.0 / PI).sqrt() * k;
        assert!((whittaker_w0(HalfIntOrder::new(1), 2.0).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn whittaker_ode_residual() {
        // f'' + (−1/4 + μ/y + (1/4 − ν²)/y²) f = 0 with μ = 0.
        for n in 0..4 {
            let nu = HalfIntOrder::new(n);
            let v = nu.nu();
            for y in [0.7, 2.0, 5.0, 11.0] {
                for f in [
                    &(|x: f64| whittaker_m0(nu, x).unwrap()) as &dyn Fn(f64) -> f64,
                    &|x: f64| whittaker_w0(nu, x).unwrap(),
                ] {
                    let d2h = |h: f64| (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
                    let d2 = (4.0 * d2h(1e-3) - d2h(2e-3)) / 3.0;
                    let res = d2 + (-0.25 + (0.25 - v * v) / (y * y)) * f(y);
                    let scale = f(y).abs() + d2.abs();
                    assert!(res.abs() <= 1e-8 * scale, "n={n} y={y} res={res}");
                }
            }
        }
    }

    #[test]
    fn half_integer_orders() {
        assert_eq!(HalfIntOrder::for_weight(6).unwrap().nu(), 2.5);
        assert!(HalfIntOrder::from_f64(1.0).is_err());
        assert_eq!(HalfIntOrder::from_f64(1.5).unwrap().n, 1);
    }
}
