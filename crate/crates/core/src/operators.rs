//! Slash action and finite-difference versions of the weight-k differential operators.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qforms::{GroupElement, QForm};
use crate::series::{eis2_fourier, eis_tilde, EisParams, EvalBudget};
use crate::special::whittaker_m;

/// (f|_k γ)(τ) = (cτ+d)^{−k} f(γτ).
pub fn slash<F: Fn(Complex64) -> Complex64>(f: F, k: i32, g: GroupElement) -> impl Fn(Complex64) -> Complex64 {
    move |tau| g.j(tau).powi(-k) * f(g.apply(tau))
}

/// |f(γτ)(cτ+d)^{−k} − f(τ)| / |f(τ)|.
pub fn modularity_defect<F: Fn(Complex64) -> Result<Complex64>>(f: F, k: i32, tau: Complex64, g: &GroupElement) -> Result<f64> {
    let base = f(tau)?;
    let moved = f(g.apply(tau))? * g.j(tau).powi(-k);
    Ok((moved - base).norm() / base.norm())
}

/// Step size for central differences; each derivative is Richardson-extrapolated from h and h/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stencil {
    pub h: f64,
}

impl Default for Stencil {
    fn default() -> Self {
        Stencil { h: 1e-3 }
    }
}

/// First and second partials in u = Re τ and v = Im τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub f: Complex64,
    pub fu: Complex64,
    pub fv: Complex64,
    pub fuu: Complex64,
    pub fvv: Complex64,
}

impl Stencil {
    pub fn partials<F: Fn(Complex64) -> Complex64>(&self, f: F, tau: Complex64) -> Partials {
        let f0 = f(tau);
        let d1 = |dir: Complex64, h: f64| (f(tau + dir * h) - f(tau - dir * h)) / (2.0 * h);
        let d2 = |dir: Complex64, h: f64| (f(tau + dir * h) - f0 * 2.0 + f(tau - dir * h)) / (h * h);
        let rich = |g: &dyn Fn(f64) -> Complex64| (g(self.h / 2.0) * 4.0 - g(self.h)) / 3.0;
        let (eu, ev) = (Complex64::new(1.0, 0.0), Complex64::i());
        Partials {
            f: f0,
            fu: rich(&|h| d1(eu, h)),
            fv: rich(&|h| d1(ev, h)),
            fuu: rich(&|h| d2(eu, h)),
            fvv: rich(&|h| d2(ev, h)),
        }
    }
}

/// L_k f = −2iv² ∂f/∂τ̄ = −iv²(f_u + i f_v).
pub fn lowering_fd<F: Fn(Complex64) -> Complex64>(f: F, tau: Complex64, st: &Stencil) -> Complex64 {
    let p = st.partials(f, tau);
    -Complex64::i() * tau.im * tau.im * (p.fu + Complex64::i() * p.fv)
}

/// R_k f = 2i ∂f/∂τ + (k/v) f = i(f_u − i f_v) + (k/v) f.
pub fn raising_fd<F: Fn(Complex64) -> Complex64>(f: F, k: i32, tau: Complex64, st: &Stencil) -> Complex64 {
    let p = st.partials(f, tau);
    Complex64::i() * (p.fu - Complex64::i() * p.fv) + p.f * (k as f64 / tau.im)
}

/// ξ_k f = 2i v^k conj(∂f/∂τ̄) = i v^k conj(f_u + i f_v).
pub fn xi_fd<F: Fn(Complex64) -> Complex64>(f: F, k: i32, tau: Complex64, st: &Stencil) -> Complex64 {
    let p = st.partials(f, tau);
    Complex64::i() * tau.im.powi(k) * (p.fu + Complex64::i() * p.fv).conj()
}

/// Δ_k f together with a scale: the sum of the magnitudes of its two parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaplacianValue {
    pub value: Complex64,
    pub scale: f64,
    pub f: Complex64,
}

/// Δ_k = −v²(∂_u² + ∂_v²) + ikv(∂_u + i∂_v).
pub fn laplacian_fd<F: Fn(Complex64) -> Complex64>(f: F, k: i32, tau: Complex64, st: &Stencil) -> LaplacianValue {
    let p = st.partials(f, tau);
    let v = tau.im;
    let second = -(p.fuu + p.fvv) * v * v;
    let first = Complex64::i() * (k as f64 * v) * (p.fu + Complex64::i() * p.fv);
    LaplacianValue { value: second + first, scale: second.norm() + first.norm(), f: p.f }
}

/// Residual of L₀ applied to M_{0,(k−1)/2}(4π|m|y)e^{−2πimx} against k(y/2)·M_{1,(k−1)/2}(4π|m|y)e^{−2πimx},
/// relative to the right side.
pub fn seed_lowering_residual(k: u32, m: i64, tau: Complex64, st: &Stencil) -> f64 {
    let nu = (k as f64 - 1.0) / 2.0;
    let mf = m as f64;
    let phase = |x: f64| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * mf * x);
    let four_pi_m = 4.0 * std::f64::consts::PI * mf.abs();
    let seed = |z: Complex64| phase(z.re) * whittaker_m(0.0, nu, four_pi_m * z.im);
    let lhs = lowering_fd(seed, tau, st);
    let rhs = phase(tau.re) * (k as f64 * tau.im / 2.0) * whittaker_m(1.0, nu, four_pi_m * tau.im);
    (lhs - rhs).norm() / rhs.norm()
}

/// Limits of f toward a point p of S_Q from inside and outside the geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSided {
    pub point: Complex64,
    pub inside: Complex64,
    pub outside: Complex64,
    pub err_estimate: f64,
}

/// Approaches p = center + r e^{iθ} along the radius, at distances ε₀·2^{−j}, and Richardson-extrapolates to ε = 0.
pub fn one_sided_limits<F: Fn(Complex64) -> Result<Complex64>>(f: F, q: &QForm, theta: f64, eps0: f64, levels: usize) -> Result<OneSided> {
    if levels < 2 {
        return Err(Error::Domain("one-sided limits need at least two levels".into()));
    }
    let (c, r) = (q.center(), q.radius());
    let dir = Complex64::from_polar(1.0, theta);
    let point = dir * r + c;
    let limit = |sign: f64| -> Result<(Complex64, f64)> {
        let mut table = (0..levels)
            .map(|j| f(point + dir * (sign * eps0 / 2f64.powi(j as i32))))
            .collect::<Result<Vec<_>>>()?;
        let mut err = 0.0;
        for order in 1..levels {
            let fac = 2f64.powi(order as i32);
            let next: Vec<Complex64> = table.windows(2).map(|w| (w[1] * fac - w[0]) / (fac - 1.0)).collect();
            err = (next[next.len() - 1] - table[table.len() - 1]).norm();
            table = next;
        }
        Ok((table[0], err))
    };
    let (inside, e1) = limit(-1.0)?;
    let (outside, e2) = limit(1.0)?;
    Ok(OneSided { point, inside, outside, err_estimate: e1 + e2 })
}

/// The k = 2 jump/average condition at a point of S_Q.
///
/// Off the net Ê = E − 2Ẽ with E continuous, so Ê_in + 2Ẽ_in and Ê_out + 2Ẽ_out must agree, and the value
/// assigned on the net (Ẽ with the on-net forms at half weight) is then the average of the two sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpAverage {
    pub hat: OneSided,
    pub tilde_inside: Complex64,
    pub tilde_outside: Complex64,
    /// Jump of Ê across S_Q.
    pub jump: Complex64,
    /// −2 × the jump of Ẽ.
    pub expected_jump: Complex64,
    /// Ê_in + 2Ẽ_in − (Ê_out + 2Ẽ_out), relative to |Ê|.
    pub rel_err: f64,
}

pub fn jump_average_k2(disc: i64, d: i64, q: &QForm, theta: f64, budget: &EvalBudget) -> Result<JumpAverage> {
    let hat = one_sided_limits(|t| Ok(eis2_fourier(disc, d, t, budget)?.value), q, theta, 0.1, 4)?;
    let p = EisParams::at_zero(2, disc, d)?;
    // Ẽ is locally constant in its index set, so one small step on each side suffices.
    let tl = one_sided_limits(|t| eis_tilde(&p, t), q, theta, 1e-6, 2)?;
    let jump = hat.outside - hat.inside;
    let expected_jump = -(tl.outside - tl.inside) * 2.0;
    let scale = hat.inside.norm().max(hat.outside.norm());
    Ok(JumpAverage {
        hat,
        tilde_inside: tl.inside,
        tilde_outside: tl.outside,
        jump,
        expected_jump,
        rel_err: (jump - expected_jump).norm() / scale,
    })
}
