//! Lattice sums over forms of a fixed discriminant, Poincaré series, and the Fourier-side
//! evaluators built from cycle integrals.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{fundamental_divisors, Discriminant};
use crate::characters::GenusCharacter;
use crate::classical;
use crate::cycles::{cycle_integral_adaptive, CyclePath};
use crate::error::{Error, Result};
use crate::qforms::{class_representatives, complete_row, enclosing_forms, enumerate_shell, parson_boundary_forms, reduce_point, QForm};
use crate::special::{gamma, hyp1f1, psi, whittaker_m, whittaker_m0, HalfIntOrder};

/// Truncation parameters shared by all evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalBudget {
    /// Shell radius in |Q_τ|.
    pub r: f64,
    /// Bound on |cz + d| for coset sums.
    pub rowmax: f64,
    /// Translate bound for the brute-force translate sums.
    pub nmax: i64,
    /// Fourier order.
    pub m: usize,
    /// Target relative tolerance for adaptive quadrature.
    pub tol: f64,
    /// Initial quadrature node count.
    pub nodes: usize,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { r: 200.0, rowmax: 30.0, nmax: 4000, m: 6, tol: 1e-9, nodes: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub terms: usize,
    pub budget_used: EvalBudget,
}

/// Parameters (k, D, d, s) of the hyperbolic Eisenstein series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EisParams {
    pub k: u32,
    pub disc: i64,
    pub d: i64,
    pub s: Complex64,
}

impl EisParams {
    pub fn new(k: u32, disc: i64, d: i64, s: Complex64) -> Result<Self> {
        if k == 0 || k % 2 == 1 {
            return Err(Error::Domain(format!("weight must be even and positive, got {k}")));
        }
        Discriminant::indefinite(disc)?;
        if !fundamental_divisors(disc)?.contains(&d) {
            return Err(Error::InvalidCharacter(d, disc));
        }
        Ok(EisParams { k, disc, d, s })
    }

    pub fn at_zero(k: u32, disc: i64, d: i64) -> Result<Self> {
        Self::new(k, disc, d, Complex64::new(0.0, 0.0))
    }

    fn check_convergent(&self) -> Result<()> {
        if self.s.re > 1.0 - self.k as f64 / 2.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "direct summation needs Re(s) > 1 − k/2 (k = {}, s = {})",
                self.k, self.s
            )))
        }
    }

    fn chi(&self) -> GenusCharacter {
        GenusCharacter::new(self.d, self.disc).expect("validated on construction")
    }
}

/// Pairwise (tree) summation in the given order.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn chi_weight(chi: &GenusCharacter, q: &QForm) -> Result<f64> {
    if chi.d == 1 {
        Ok(1.0)
    } else {
        Ok(chi.eval(q)? as f64)
    }
}

/// Σ term(Q) over the shell |Q_τ| ≤ r; the error estimate is the contribution of the outer half-shell.
fn shell_sum<F>(disc: i64, tau: Complex64, budget: &EvalBudget, term: F) -> Result<EvalResult>
where
    F: Fn(&QForm) -> Result<Complex64>,
{
    let forms = enumerate_shell(disc, tau, budget.r)?;
    let mut inner = Vec::with_capacity(forms.len());
    let mut all = Vec::with_capacity(forms.len());
    for q in &forms {
        let t = term(q)?;
        if q.qtau(tau).abs() <= budget.r / 2.0 {
            inner.push(t);
        }
        all.push(t);
    }
    let value = pairwise_sum(&all);
    let half = pairwise_sum(&inner);
    Ok(EvalResult { value, err_estimate: (value - half).norm(), terms: forms.len(), budget_used: *budget })
}

/// sgn(Q_τ), with an error on the net.
fn sgn_qtau(q: &QForm, tau: Complex64) -> Result<f64> {
    Ok(q.sign()? as f64 * (1.0 - 2.0 * q.indicator(tau)? as f64))
}

/// v^s / |w|^s via the real logarithm.
fn hecke_factor(s: Complex64, v: f64, w: Complex64) -> Complex64 {
    if s == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    (s * (v / w.norm()).ln()).exp()
}

/// f_{κ,D}(τ) = Σ_Q Q(τ,1)^{−κ}.
pub fn zagier_f(kappa: u32, disc: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if kappa < 3 {
        return Err(Error::Domain(format!("f_κ,D needs κ ≥ 3 for absolute convergence, got {kappa}")));
    }
    shell_sum(disc, tau, budget, |q| Ok(q.value(tau).powi(-(kappa as i32))))
}

/// f_{κ,Q₀}(τ) = Σ_{Q̂∼Q₀} sgn(Q̂) Q̂(τ,1)^{−κ}.
pub fn parson_f(kappa: u32, q0: &QForm, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if kappa < 3 {
        return Err(Error::Domain(format!("f_κ,Q needs κ ≥ 3, got {kappa}")));
    }
    let key = q0.class_key()?;
    shell_sum(q0.disc(), tau, budget, |q| {
        if q.class_key()? == key {
            Ok(q.value(tau).powi(-(kappa as i32)) * q.sign()? as f64)
        } else {
            Ok(Complex64::new(0.0, 0.0))
        }
    })
}

/// F_{κ,Q₀}(τ) = 2 Σ_{Q̂∼Q₀, ac<0} sgn(Q̂) Q̂(τ,1)^{−κ}.
pub fn parson_period(kappa: u32, q0: &QForm, tau: Complex64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for q in parson_boundary_forms(q0)? {
        total += q.value(tau).powi(-(kappa as i32)) * q.sign()? as f64;
    }
    Ok(total * 2.0)
}

/// E_{k,D}(τ,s) with the χ_d twist, by shell summation.
pub fn eis_e(p: &EisParams, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    p.check_convergent()?;
    let chi = p.chi();
    let h = (p.k / 2) as i32;
    shell_sum(p.disc, tau, budget, |q| {
        let w = q.value(tau);
        let sg = (q.sign()? as f64).powi(h);
        Ok(w.powi(-h) * hecke_factor(p.s, tau.im, w) * (chi_weight(&chi, q)? * sg))
    })
}

fn tilde_term(p: &EisParams, chi: &GenusCharacter, q: &QForm, tau: Complex64) -> Result<Complex64> {
    let h = (p.k / 2) as i32;
    let w = q.value(tau);
    let sg = (q.sign()? as f64).powi(h);
    Ok(w.powi(-h) * hecke_factor(p.s, tau.im, w) * (chi_weight(chi, q)? * sg))
}

/// Ẽ_{k,D}(τ,s): the finite sum over forms whose geodesic encloses τ.
pub fn eis_tilde(p: &EisParams, tau: Complex64) -> Result<Complex64> {
    let chi = p.chi();
    let forms = enclosing_forms(p.disc, tau)?;
    let terms = forms.iter().map(|q| tilde_term(p, &chi, q, tau)).collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HatRoute {
    /// Termwise sgn(Q_τ)^{k/2}.
    Direct,
    /// E − 2Ẽ on the same shell.
    Identity,
}

/// Ê_{k,D}(τ,s), the completed series.
pub fn eis_hat(p: &EisParams, tau: Complex64, budget: &EvalBudget, route: HatRoute) -> Result<EvalResult> {
    p.check_convergent()?;
    // Enclosing forms satisfy |Q_τ| ≤ D/(4v); keep them inside the shell so both routes see the same terms.
    let mut b = *budget;
    b.r = b.r.max(1.01 * p.disc as f64 / (4.0 * tau.im));
    let chi = p.chi();
    let h = (p.k / 2) as i32;
    match route {
        HatRoute::Direct => shell_sum(p.disc, tau, &b, |q| {
            let w = q.value(tau);
            let sg = sgn_qtau(q, tau)?.powi(h);
            Ok(w.powi(-h) * hecke_factor(p.s, tau.im, w) * (chi_weight(&chi, q)? * sg))
        }),
        HatRoute::Identity => {
            let e = eis_e(p, tau, &b)?;
            let t = eis_tilde(p, tau)?;
            Ok(EvalResult { value: e.value - t * 2.0, ..e })
        }
    }
}

/// Ê_{k,D}(τ,0) for k = 2 from Hecke-trick sums at s = 0.4, 0.2, 0.1, extrapolated quadratically to s = 0.
pub fn hecke_extrapolated(disc: i64, d: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    let f = |s: f64| -> Result<EvalResult> {
        let p = EisParams::new(2, disc, d, Complex64::new(s, 0.0))?;
        eis_hat(&p, tau, budget, HatRoute::Direct)
    };
    let (f4, f2, f1) = (f(0.4)?, f(0.2)?, f(0.1)?);
    let value = f4.value / 3.0 - f2.value * 2.0 + f1.value * (8.0 / 3.0);
    let linear = f1.value * 2.0 - f2.value;
    Ok(EvalResult {
        value,
        err_estimate: (value - linear).norm() + f1.err_estimate,
        terms: f1.terms,
        budget_used: *budget,
    })
}

fn class_reps_with_chi(disc: i64, d: i64) -> Result<Vec<(QForm, f64)>> {
    let chi = GenusCharacter::new(d, disc)?;
    class_representatives(disc)?
        .into_iter()
        .map(|q| Ok((q, chi_weight(&chi, &q)?)))
        .filter(|r| !matches!(r, Ok((_, w)) if *w == 0.0))
        .collect()
}

/// The k = 2 value (−2/√D) Σ_Q χ_d(Q) C₀(j′(τ)/(j(·) − j(τ)) − E₂*(τ), Q), with adaptive quadrature.
pub fn eis2_fourier(disc: i64, d: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    eis2_fourier_impl(disc, d, tau, budget, true)
}

/// As [`eis2_fourier`] with exactly `budget.nodes` nodes per class, so the result is smooth in τ.
pub fn eis2_fourier_fixed(disc: i64, d: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    eis2_fourier_impl(disc, d, tau, budget, false)
}

fn eis2_fourier_impl(disc: i64, d: i64, tau: Complex64, budget: &EvalBudget, adaptive: bool) -> Result<EvalResult> {
    let ct = classical::classical_at(tau);
    let kernel = |w: Complex64| ct.jprime / (classical::j(w) - ct.j) - ct.e2star;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut nodes = 0;
    for (q, chi) in class_reps_with_chi(disc, d)? {
        if adaptive {
            let r = cycle_integral_adaptive(kernel, 0, &q, budget.nodes, budget.tol)?;
            total += r.value * chi;
            err += r.err_estimate;
            nodes += r.nodes;
        } else {
            total += CyclePath::new(q, budget.nodes)?.integrate(kernel, 0) * chi;
            nodes += budget.nodes;
        }
    }
    let f = -2.0 / (disc as f64).sqrt();
    Ok(EvalResult { value: total * f, err_estimate: err * f.abs(), terms: nodes, budget_used: *budget })
}

/// The truncated generating series (−2/√D) Σ_Q χ_d(Q) [Σ_{m≤M} C₀(j_m, Q) q^m − E₂*(τ) C₀(1, Q)].
pub fn eis2_fourier_series(disc: i64, d: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let e2 = classical::e2star(tau);
    let polys: Vec<Vec<f64>> = (1..=budget.m).map(classical::faber_f64).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (form, chi) in class_reps_with_chi(disc, d)? {
        let path = CyclePath::new(form, budget.nodes)?;
        if path.nodes.iter().any(|(z, _)| reduce_point(*z).0.im >= tau.im) {
            return Err(Error::Domain("the j_m expansion needs Im τ above every reduced cycle node".into()));
        }
        let h = |w: Complex64| {
            let j1 = classical::j(w) - 744.0;
            let mut s = Complex64::new(1.0, 0.0);
            let mut qm = Complex64::new(1.0, 0.0);
            for p in &polys {
                qm *= q;
                s += p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * j1 + c) * qm;
            }
            s - e2
        };
        total += path.integrate(h, 0) * chi;
    }
    let f = -2.0 / (disc as f64).sqrt();
    Ok(EvalResult { value: total * f, err_estimate: f64::NAN, terms: budget.m, budget_used: *budget })
}

/// Partial Fourier sum of E_{k,D}(τ,0) for k ≥ 4 from Niebur cycle integrals:
/// (−1)^{k/2} 2π^{k/2}/(D^{k/4} Γ(k/4)²) Σ_{m≤M} m^{k/2−1} Σ_Q χ_d(Q) C₀(G_{−m}(·,k/2), Q) q^m.
pub fn eisk_fourier(k: u32, disc: i64, d: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Domain(format!("the Niebur expansion needs even k ≥ 4, got {k}")));
    }
    let kf = k as f64;
    let pref = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 } * 2.0 * PI.powf(kf / 2.0)
        / ((disc as f64).powf(kf / 4.0) * gamma(kf / 4.0).powi(2));
    let reps = class_reps_with_chi(disc, d)?;
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut last = 0.0;
    for m in 1..=budget.m {
        let g = |w: Complex64| {
            let (wr, _) = reduce_point(w);
            niebur_g(-(m as i64), wr, kf / 2.0, budget).map(|r| r.value).unwrap_or(Complex64::new(f64::NAN, 0.0))
        };
        let mut coef = Complex64::new(0.0, 0.0);
        for (form, chi) in &reps {
            let r = cycle_integral_adaptive(g, 0, form, budget.nodes, budget.tol)?;
            coef += r.value * *chi;
            err += r.err_estimate * (m as f64).powf(kf / 2.0 - 1.0) * q.norm().powi(m as i32);
        }
        let t = coef * (m as f64).powf(kf / 2.0 - 1.0) * q.powi(m as i32);
        last = t.norm();
        total += t;
    }
    if total.re.is_nan() {
        return Err(Error::Convergence("Niebur series evaluation failed on a cycle node".into()));
    }
    Ok(EvalResult { value: total * pref, err_estimate: (err + last) * pref.abs(), terms: budget.m, budget_used: *budget })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LhmfScope {
    AllForms(i64),
    Class(QForm),
}

/// F_{1−κ,D}(τ) = ((−1)^κ D^{1/2−κ}/(C(2κ−2,κ−1)π)) Σ sgn(Q_τ) Q(τ,1)^{κ−1} ψ_κ(D/(Q_τ² + D)),
/// over all forms or over one class.
pub fn lhmf_f(kappa: u32, scope: LhmfScope, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if kappa < 2 {
        return Err(Error::Domain(format!("F_1−κ needs κ ≥ 2, got {kappa}")));
    }
    let (disc, key) = match scope {
        LhmfScope::AllForms(d) => (d, None),
        LhmfScope::Class(q) => (q.disc(), Some(q.class_key()?)),
    };
    let df = disc as f64;
    let binom: f64 = (1..kappa).map(|i| (kappa - 1 + i) as f64 / i as f64).product();
    let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
    let pref = sign * df.powf(0.5 - kappa as f64) / (binom * PI);
    let r = shell_sum(disc, tau, budget, |q| {
        if let Some(k0) = key {
            if q.class_key()? != k0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        let qt = q.qtau(tau);
        let sg = sgn_qtau(q, tau)?;
        let y = (df / (qt * qt + df)).min(1.0);
        Ok(q.value(tau).powi(kappa as i32 - 1) * (sg * psi(kappa, y)?))
    })?;
    Ok(EvalResult { value: r.value * pref, err_estimate: r.err_estimate * pref.abs(), ..r })
}

// ---------------------------------------------------------------------------
// Coset sums.

/// Bottom rows (c, d) of Γ_∞\Γ modulo ±1 with |cz + d| ≤ x, sorted by |cz + d|.
pub fn coset_rows(z: Complex64, x: f64) -> Vec<(i64, i64, f64)> {
    let mut out = vec![(0, 1, 1.0)];
    let cmax = (x / z.im).floor() as i64 + 1;
    for c in 1..=cmax {
        let cf = c as f64;
        let lo = (-cf * z.re - x).floor() as i64 - 1;
        let hi = (-cf * z.re + x).ceil() as i64 + 1;
        for d in lo..=hi {
            if c.gcd(&d) != 1 {
                continue;
            }
            let n = (z * cf + d as f64).norm();
            if n <= x {
                out.push((c, d, n));
            }
        }
    }
    out.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    out
}

/// Σ over coset rows of term(γ); the error estimate extrapolates the outer half of the sum
/// assuming a tail decaying like x^{−p}.
fn coset_sum<F>(z: Complex64, budget: &EvalBudget, p: f64, term: F) -> Result<EvalResult>
where
    F: Fn(&crate::qforms::GroupElement) -> Result<Complex64>,
{
    if budget.rowmax < 2.0 {
        return Err(Error::Domain("coset sums need rowmax ≥ 2".into()));
    }
    let rows = coset_rows(z, budget.rowmax);
    let mut all = Vec::with_capacity(rows.len());
    let mut inner = Vec::new();
    for &(c, d, n) in &rows {
        let t = term(&complete_row(c, d))?;
        if n <= budget.rowmax / 2.0 {
            inner.push(t);
        }
        all.push(t);
    }
    let value = pairwise_sum(&all);
    let half = pairwise_sum(&inner);
    let err = (value - half).norm() / (2f64.powf(p) - 1.0).max(1e-3);
    Ok(EvalResult { value, err_estimate: err, terms: rows.len(), budget_used: *budget })
}

// ---------------------------------------------------------------------------
// Translate sums Σ_n 1/((x+n−a)(x+n−ā)^{k−1}).

/// Eulerian numbers A(n, j), j = 0..n−1 (A_0 = [1]).
fn eulerian(n: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for m in 1..=n {
        let mut next = vec![0.0; m];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut t = 0.0;
            if j < a.len() {
                t += (j + 1) as f64 * a[j];
            }
            if j >= 1 && j - 1 < a.len() {
                t += (m - j) as f64 * a[j - 1];
            }
            *slot = t;
        }
        a = next;
    }
    a
}

fn expm1c(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * (y / 2.0).sin().powi(2), x.exp() * y.sin())
}

/// Σ_n (w + n)^{−m}, symmetric summation for m = 1; w not an integer.
pub fn lipschitz_sum(w: Complex64, m: u32) -> Complex64 {
    if w.im < 0.0 {
        let s = lipschitz_sum(-w, m);
        return if m % 2 == 0 { s } else { -s };
    }
    let arg = Complex64::i() * 2.0 * PI * w;
    let q = arg.exp();
    let omq = -expm1c(arg);
    if m == 1 {
        return -Complex64::i() * PI * (q + 1.0) / omq;
    }
    let a = eulerian(m as usize - 1);
    let poly = a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * q + c);
    let fact: f64 = (1..m).map(|i| i as f64).product();
    (Complex64::new(0.0, -2.0 * PI)).powi(m as i32) / fact * q * poly / omq.powi(m as i32)
}

pub(crate) fn translate_sum_partial_fractions(x: Complex64, a: Complex64, k: u32) -> Complex64 {
    let b = a.conj();
    let d = a - b;
    let mut tot = (lipschitz_sum(x - a, 1) - lipschitz_sum(x - b, 1)) / d.powi(k as i32 - 1);
    for m in 2..k {
        tot -= lipschitz_sum(x - b, m) / d.powi((k - m) as i32);
    }
    tot
}

/// e^{−β} Σ_{j≥0} β^j/(j+n)!.
fn scaled_tail(n: u32, beta: f64) -> f64 {
    if beta >= n as f64 {
        // β^{−n}(1 − e^{−β} Σ_{j<n} β^j/j!)
        let mut t = 1.0;
        let mut s = 0.0;
        for j in 0..n {
            s += t;
            t *= beta / (j + 1) as f64;
        }
        (1.0 - (-beta).exp() * s) * beta.powi(-(n as i32))
    } else {
        let mut term: f64 = 1.0 / (1..=n).map(|i| i as f64).product::<f64>();
        let mut s = 0.0;
        let mut j = 0;
        while term > 1e-18 * s || j < 2 {
            s += term;
            j += 1;
            term *= beta / (j + n) as f64;
        }
        (-beta).exp() * s
    }
}

/// Fourier form of the translate sum, valid for Im x > Im a.
pub(crate) fn translate_sum_fourier(x: Complex64, a: Complex64, k: u32) -> Complex64 {
    let n = k - 1;
    let mut tot = Complex64::new(0.0, 0.0);
    for r in 1..10_000 {
        let rf = r as f64;
        let beta = 4.0 * PI * rf * a.im;
        let c = Complex64::new(0.0, -2.0 * PI)
            * Complex64::new(0.0, -2.0 * PI * rf).powi(n as i32)
            * (Complex64::i() * 2.0 * PI * rf * (x - a)).exp()
            * scaled_tail(n, beta);
        tot += c;
        if c.norm() < 1e-18 * tot.norm() && r > 2 {
            break;
        }
    }
    tot
}

/// Σ_n 1/((x+n−a)(x+n−ā)^{k−1}) in closed form.
pub fn translate_sum(x: Complex64, a: Complex64, k: u32) -> Complex64 {
    if x.im - a.im > 0.3 {
        translate_sum_fourier(x, a, k)
    } else {
        translate_sum_partial_fractions(x, a, k)
    }
}

/// Truncated translate sum over |n| ≤ nmax, for testing.
pub fn translate_sum_brute(x: Complex64, a: Complex64, k: u32, nmax: i64) -> Complex64 {
    let terms: Vec<Complex64> = (-nmax..=nmax)
        .map(|n| {
            let t = x + n as f64;
            1.0 / ((t - a) * (t - a.conj()).powi(k as i32 - 1))
        })
        .collect();
    pairwise_sum(&terms)
}

// ---------------------------------------------------------------------------
// Poincaré series.

/// Whether ℙ_k sums over all of Γ (±γ counted separately) or over Γ/{±1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PeterssonNorm {
    FullGroup,
    Projective,
}

impl PeterssonNorm {
    fn factor(self) -> f64 {
        match self {
            PeterssonNorm::FullGroup => 2.0,
            PeterssonNorm::Projective => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Presentation {
    /// Pick the faster-converging presentation.
    Auto,
    /// Slash in z₁.
    Z1,
    /// Slash in z₂.
    Z2,
}

const POLE_TOL: f64 = 1e-10;

/// ℙ_k(z₁,z₂) = Im(z₂)^{k−1} Σ_{γ∈Γ} ((z₁−z₂)(z₁−z̄₂)^{k−1})^{−1} |_{k,z₁} γ.
pub fn petersson_p(
    k: u32,
    z1: Complex64,
    z2: Complex64,
    budget: &EvalBudget,
    norm: PeterssonNorm,
    presentation: Presentation,
) -> Result<EvalResult> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Domain(format!("ℙ_k needs even k ≥ 4, got {k}")));
    }
    let use_z2 = match presentation {
        Presentation::Z1 => false,
        Presentation::Z2 => true,
        Presentation::Auto => z1.im >= 1.0 + z2.im && z1.im > 1.0 / z2.im,
    };
    let ki = k as i32;
    let p = k as f64 - 2.0;
    let check_pole = |x: Complex64, a: Complex64| -> Result<()> {
        let off = x - a;
        let dist = (off - off.re.round()).norm();
        if dist < POLE_TOL {
            Err(Error::Domain(format!("ℙ_k evaluated at a pole: z₁ is Γ-equivalent to z₂ ({dist:e})")))
        } else {
            Ok(())
        }
    };
    let r = if use_z2 {
        coset_sum(z2, budget, p, |g| {
            let gz = g.apply(z2);
            check_pole(z1, gz)?;
            Ok(g.j(z2).powi(ki - 2) * gz.im.powi(ki - 1) * translate_sum(z1, gz, k))
        })?
    } else {
        let y = z2.im.powi(ki - 1);
        coset_sum(z1, budget, p, |g| {
            let gz = g.apply(z1);
            check_pole(gz, z2)?;
            Ok(g.j(z1).powi(-ki) * translate_sum(gz, z2, k) * y)
        })?
    };
    let f = norm.factor();
    Ok(EvalResult { value: r.value * f, err_estimate: r.err_estimate * f, ..r })
}

/// Brute-force ℙ_k in the z₁ presentation with translates truncated at `budget.nmax`.
pub fn petersson_p_brute(k: u32, z1: Complex64, z2: Complex64, budget: &EvalBudget, norm: PeterssonNorm) -> Result<Complex64> {
    let ki = k as i32;
    let r = coset_sum(z1, budget, k as f64 - 2.0, |g| {
        Ok(g.j(z1).powi(-ki) * translate_sum_brute(g.apply(z1), z2, k, budget.nmax))
    })?;
    Ok(r.value * z2.im.powi(ki - 1) * norm.factor())
}

fn whittaker_m0_real(s: f64, y: f64) -> Result<f64> {
    let nu = s - 0.5;
    match HalfIntOrder::from_f64(nu) {
        Ok(o) => whittaker_m0(o, y),
        Err(_) => Ok(whittaker_m(0.0, nu, y)),
    }
}

/// Niebur Poincaré series G_m(w,s) = Σ_{Γ_∞\Γ} g_m(γw,s), g_m = (Γ(s)/Γ(2s)) M_{0,s−1/2}(4π|m|y) e^{2πimx}.
pub fn niebur_g(m: i64, w: Complex64, s: f64, budget: &EvalBudget) -> Result<EvalResult> {
    if m == 0 {
        return Err(Error::Domain("G_m needs m ≠ 0".into()));
    }
    if s <= 1.0 {
        return Err(Error::Domain(format!("G_m(·,s) needs s > 1, got {s}")));
    }
    let c = gamma(s) / gamma(2.0 * s);
    let mf = m as f64;
    coset_sum(w, budget, 2.0 * s - 2.0, |g| {
        let z = g.apply(w);
        let mw = whittaker_m0_real(s, 4.0 * PI * mf.abs() * z.im)?;
        Ok(Complex64::from_polar(c * mw, 2.0 * PI * mf * z.re))
    })
}

/// G_m(w,s) summed over a fixed list of bottom rows, so the truncation does not move with w.
pub fn niebur_g_on_rows(m: i64, w: Complex64, s: f64, rows: &[(i64, i64, f64)]) -> Result<Complex64> {
    let c = gamma(s) / gamma(2.0 * s);
    let mf = m as f64;
    let terms = rows
        .iter()
        .map(|&(rc, rd, _)| {
            let z = complete_row(rc, rd).apply(w);
            let mw = whittaker_m0_real(s, 4.0 * PI * mf.abs() * z.im)?;
            Ok(Complex64::from_polar(c * mw, 2.0 * PI * mf * z.re))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Seed φ_{κ,m}(w) = (4π|m|y)^{−κ/2}/Γ(2−κ) · M_{−κ/2,(1−κ)/2}(4π|m|y) e^{2πimx}, for κ ≤ −2 even and m < 0.
pub fn maass_seed(kappa: i32, m: i64, w: Complex64) -> Complex64 {
    let kf = kappa as f64;
    let y = 4.0 * PI * (m as f64).abs() * w.im;
    // M_{−κ/2,(1−κ)/2}(y) = e^{−y/2} y^{1−κ/2} ₁F₁(1; 2−κ; y).
    let mw = (-y / 2.0).exp() * y.powf(1.0 - kf / 2.0) * hyp1f1(1.0, 2.0 - kf, y);
    Complex64::from_polar(y.powf(-kf / 2.0) * mw / gamma(2.0 - kf), 2.0 * PI * m as f64 * w.re)
}

/// Maaß–Poincaré series Φ_{κ,m}(w) = Σ_{Γ_∞\Γ} (φ_{κ,m}|_κ γ)(w) for negative even κ and m < 0.
pub fn maass_poincare_phi(kappa: i32, m: i64, w: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if kappa > -2 || kappa % 2 != 0 {
        return Err(Error::Domain(format!("Φ_κ,m is implemented for even κ ≤ −2, got {kappa}")));
    }
    if m >= 0 {
        return Err(Error::Domain(format!("Φ_κ,m is implemented for m < 0, got {m}")));
    }
    coset_sum(w, budget, -kappa as f64, |g| Ok(g.j(w).powi(-kappa) * maass_seed(kappa, m, g.apply(w))))
}

/// Exponential Poincaré series P_{κ,m}(τ) = Σ_{Γ_∞\Γ} (cτ+d)^{−κ} e^{2πimγτ}.
pub fn exp_poincare_p(kappa: u32, m: i64, tau: Complex64, budget: &EvalBudget) -> Result<EvalResult> {
    if kappa < 4 || kappa % 2 == 1 {
        return Err(Error::Domain(format!("P_κ,m needs even κ ≥ 4, got {kappa}")));
    }
    let ki = kappa as i32;
    coset_sum(tau, budget, kappa as f64 - 2.0, |g| {
        Ok(g.j(tau).powi(-ki) * (Complex64::i() * 2.0 * PI * m as f64 * g.apply(tau)).exp())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BkReport {
    pub k: u32,
    pub tau: Complex64,
    pub w: Complex64,
    pub prefactor: Complex64,
    /// Σ_{m≤M} Φ_{2−k,−m}(w) q^m for M = 1, 2, ….
    pub partial_sums: Vec<Complex64>,
    pub rhs: Complex64,
    /// |partial − rhs|/|rhs| per M.
    pub discrepancy: Vec<f64>,
}

/// Compares Σ_{m≥1} Φ_{2−k,−m}(w) q^m with (i/2π)(2i)^{k−1} ℙ_k(τ,w).
pub fn bk_generating_check(
    k: u32,
    tau: Complex64,
    w: Complex64,
    mmax: usize,
    budget: &EvalBudget,
    norm: PeterssonNorm,
) -> Result<BkReport> {
    if tau.im <= w.im.max(1.0 / w.im) {
        return Err(Error::Domain("the generating identity needs Im τ > max(Im w, 1/Im w)".into()));
    }
    let prefactor = Complex64::i() / (2.0 * PI) * Complex64::new(0.0, 2.0).powi(k as i32 - 1);
    let rhs = prefactor * petersson_p(k, tau, w, budget, norm, Presentation::Auto)?.value;
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let mut partial_sums = Vec::with_capacity(mmax);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=mmax {
        acc += maass_poincare_phi(2 - k as i32, -(m as i64), w, budget)?.value * q.powi(m as i32);
        partial_sums.push(acc);
    }
    let discrepancy = partial_sums.iter().map(|s| (s - rhs).norm() / rhs.norm()).collect();
    Ok(BkReport { k, tau, w, prefactor, partial_sums, rhs, discrepancy })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremConstant {
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
}

/// C₁(k) = Π_{j=0}^{(k−4)/2} (k+2j), C₂(k) = Π_{ℓ odd, −k/2+2 ≤ ℓ ≤ −1} 1/((1+ℓ)(−ℓ) − (k/2)(1−k/2)),
/// and C(k) = (−1)^k Γ(k) C₁ C₂ / (2^{k/2−2} D^{k/4} Γ(k/4)²).
pub fn theorem_constant(k: u32, disc: i64) -> Result<TheoremConstant> {
    if k < 6 || k % 4 != 2 {
        return Err(Error::Domain(format!("the constant is defined for k ≡ 2 (mod 4), k ≥ 6; got {k}")));
    }
    let ki = k as i64;
    let c1: f64 = (0..=(ki - 4) / 2).map(|j| (ki + 2 * j) as f64).product();
    let half = ki / 2;
    let c2: f64 = (-half + 2..=-1)
        .filter(|l| l % 2 != 0)
        .map(|l| 1.0 / ((1 + l) * (-l) - half * (1 - half)) as f64)
        .product();
    let kf = k as f64;
    let c = gamma(kf) * c1 * c2 / (2f64.powf(kf / 2.0 - 2.0) * (disc as f64).powf(kf / 4.0) * gamma(kf / 4.0).powi(2));
    Ok(TheoremConstant { c1, c2, c })
}

/// The constant that makes the k > 2 identity hold with the full-group ℙ_k: C(k)·Γ(k/2)/(2Γ(k)).
pub fn theorem_constant_corrected(k: u32, disc: i64) -> Result<f64> {
    let kf = k as f64;
    Ok(theorem_constant(k, disc)?.c * gamma(kf / 2.0) / (2.0 * gamma(kf)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstantChoice {
    Stated,
    Corrected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub k: u32,
    pub disc: i64,
    pub d: i64,
    pub tau: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub lhs_err_estimate: f64,
    pub rhs_err_estimate: f64,
    pub constant: f64,
    /// Magnitude scale of the right side before cancellation (∫|integrand||dz| for cycle integrals).
    pub rhs_scale: f64,
    pub budget: EvalBudget,
}

/// C_{2−k}(ℙ_k(τ,·), Q) by adaptive quadrature.
pub fn cycle_of_petersson(k: u32, tau: Complex64, q: &QForm, budget: &EvalBudget, norm: PeterssonNorm) -> Result<(Complex64, f64)> {
    let failed = std::cell::Cell::new(None);
    let h = |z: Complex64| match petersson_p(k, tau, z, budget, norm, Presentation::Auto) {
        Ok(r) => r.value,
        Err(e) => {
            failed.set(Some(e.to_string()));
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let r = cycle_integral_adaptive(h, 2 - k as i32, q, budget.nodes, budget.tol)?;
    if let Some(msg) = failed.take() {
        return Err(Error::Domain(msg));
    }
    Ok((r.value, r.err_estimate))
}

/// Both sides of the alternative representation of Ê_{k,D}(τ,0).
///
/// k > 2: Ê vs. C·Σ_Q χ_d(Q) C_{2−k}(ℙ_k(τ,·), Q). k = 2: the extrapolated Hecke sums vs. the cycle-integral value.
pub fn main_identity_check(
    k: u32,
    disc: i64,
    d: i64,
    tau: Complex64,
    budget: &EvalBudget,
    constant: ConstantChoice,
    norm: PeterssonNorm,
) -> Result<IdentityReport> {
    let (lhs, rhs, c) = if k == 2 {
        let l = hecke_extrapolated(disc, d, tau, budget)?;
        let r = eis2_fourier(disc, d, tau, budget)?;
        (l, (r.value, r.err_estimate), -2.0 / (disc as f64).sqrt())
    } else {
        let p = EisParams::at_zero(k, disc, d)?;
        let l = eis_hat(&p, tau, budget, HatRoute::Direct)?;
        let c = match constant {
            ConstantChoice::Stated => theorem_constant(k, disc)?.c,
            ConstantChoice::Corrected => theorem_constant_corrected(k, disc)?,
        };
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (q, chi) in class_reps_with_chi(disc, d)? {
            let (v, e) = cycle_of_petersson(k, tau, &q, budget, norm)?;
            total += v * chi;
            err += e;
        }
        (l, (total * c, err * c.abs()), c)
    };
    let abs_err = (lhs.value - rhs.0).norm();
    Ok(IdentityReport {
        k,
        disc,
        d,
        tau,
        lhs: lhs.value,
        rhs: rhs.0,
        abs_err,
        rel_err: abs_err / lhs.value.norm(),
        lhs_err_estimate: lhs.err_estimate,
        rhs_err_estimate: rhs.1,
        constant: c,
        rhs_scale: rhs.0.norm(),
        budget: *budget,
    })
}

/// Single-class F_{1−k/2,Q₀}(τ) against D^{−k/4}/(2π)·C_k(ℙ_k(·,τ), Q₀).
pub fn lobrich_check(k: u32, q0: &QForm, tau: Complex64, budget: &EvalBudget, norm: PeterssonNorm) -> Result<IdentityReport> {
    let disc = q0.disc();
    let lhs = lhmf_f(k / 2, LhmfScope::Class(*q0), tau, budget)?;
    let failed = std::cell::Cell::new(None);
    let h = |z: Complex64| match petersson_p(k, z, tau, budget, norm, Presentation::Z2) {
        Ok(r) => r.value,
        Err(e) => {
            failed.set(Some(e.to_string()));
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let cyc = cycle_integral_adaptive(h, k as i32, q0, budget.nodes, budget.tol)?;
    if let Some(msg) = failed.take() {
        return Err(Error::Domain(msg));
    }
    let c = (disc as f64).powf(-(k as f64) / 4.0) / (2.0 * PI);
    let rhs = cyc.value * c;
    let path = CyclePath::new(*q0, cyc.nodes)?;
    let e = k as i32 / 2 - 1;
    let abs_int: f64 = path.nodes.iter().map(|&(z, wdz)| h(z).norm() * q0.value(z).powi(e).norm() * wdz.norm()).sum();
    let rhs_scale = abs_int * (disc as f64).powf(0.5 - k as f64 / 4.0) * c;
    let abs_err = (lhs.value - rhs).norm();
    Ok(IdentityReport {
        k,
        disc,
        d: 1,
        tau,
        lhs: lhs.value,
        rhs,
        abs_err,
        rel_err: abs_err / lhs.value.norm().max(rhs.norm()),
        lhs_err_estimate: lhs.err_estimate,
        rhs_err_estimate: cyc.err_estimate * c,
        constant: c,
        rhs_scale,
        budget: *budget,
    })
}

// ---------------------------------------------------------------------------
// Boundary values.

/// Forms of discriminant D whose roots straddle the rational x = p/q, i.e. (2ax+b)² < D.
pub fn straddling_forms(disc: i64, x: &BigRational) -> Result<Vec<QForm>> {
    Discriminant::indefinite(disc)?;
    let p = x.numer().clone();
    let q = x.denom().clone();
    let qi: i64 = q.clone().try_into().map_err(|_| Error::Overflow("denominator"))?;
    let amax = disc.checked_mul(qi * qi).ok_or(Error::Overflow("straddling bound"))? / 4 + 1;
    let sd = (disc as f64).sqrt();
    let xf = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for a in -amax..=amax {
        if a == 0 {
            continue;
        }
        let center = -2.0 * a as f64 * xf;
        let lo = (center - sd).floor() as i64 - 1;
        let hi = (center + sd).ceil() as i64 + 1;
        for b in lo..=hi {
            if (b * b - disc) % (4 * a) != 0 {
                continue;
            }
            // X = 2a·p/q + b, straddle iff X² < D, i.e. (2ap + bq)² < D q².
            let xq = BigInt::from(2 * a) * &p + BigInt::from(b) * &q;
            if &xq * &xq < BigInt::from(disc) * &q * &q {
                out.push(QForm::new(a, b, (b * b - disc) / (4 * a)));
            }
        }
    }
    Ok(out)
}

/// lim_{v↓0} Ẽ_{2κ−2,D}(x+iv, 0) = Σ_{straddling Q} sgn(a)^{κ−1} / Q(x,1)^{κ−1}, exactly.
///
/// For even κ this is −2 Σ_{Q(x,1)>0} Q(x,1)^{1−κ}.
pub fn quantum_limit(kappa: u32, disc: i64, x: &BigRational) -> Result<BigRational> {
    if kappa < 2 {
        return Err(Error::Domain(format!("κ must be at least 2, got {kappa}")));
    }
    let mut total = BigRational::zero();
    for f in straddling_forms(disc, x)? {
        let val = BigRational::from_integer(f.a.into()) * x * x + BigRational::from_integer(f.b.into()) * x
            + BigRational::from_integer(f.c.into());
        let term = val.pow(-(kappa as i32 - 1));
        if f.a < 0 && (kappa - 1) % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    Ok(total)
}

/// Richardson extrapolation of Ẽ_{2κ−2,D}(x + iv, 0) to v = 0 from v = v₀·2^{−j}, j < levels.
pub fn quantum_limit_numeric(kappa: u32, disc: i64, x: f64, v0: f64, levels: usize) -> Result<(Complex64, f64)> {
    let p = EisParams::at_zero(2 * kappa - 2, disc, 1)?;
    let mut table: Vec<Complex64> = (0..levels)
        .map(|j| eis_tilde(&p, Complex64::new(x, v0 / 2f64.powi(j as i32))))
        .collect::<Result<_>>()?;
    let mut err = f64::INFINITY;
    for order in 1..levels {
        let f = 2f64.powi(order as i32);
        let next: Vec<Complex64> = table.windows(2).map(|w| (w[1] * f - w[0]) / (f - 1.0)).collect();
        err = (next[next.len() - 1] - table[table.len() - 1]).norm();
        table = next;
    }
    Ok((table[table.len() - 1], err))
}

/// Exact rational x = p/q.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::GroupElement;
    use num_traits::Signed;

    fn budget() -> EvalBudget {
        EvalBudget::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Naive box enumeration |a|, |b| ≤ bound.
    fn box_forms(disc: i64, bound: i64) -> Vec<QForm> {
        let mut out = Vec::new();
        for a in -bound..=bound {
            if a == 0 {
                continue;
            }
            for b in -bound..=bound {
                if (b * b - disc) % (4 * a) == 0 {
                    out.push(QForm::new(a, b, (b * b - disc) / (4 * a)));
                }
            }
        }
        out
    }

    #[test]
    fn lipschitz_and_translate_sums() {
        for w in [c(0.3, 0.01), c(-0.2, 0.7), c(0.45, -0.3)] {
            for m in [2u32, 3, 5] {
                let terms: Vec<Complex64> = (-200_000..=200_000).map(|n| (w + n as f64).powi(-(m as i32))).collect();
                let b = pairwise_sum(&terms);
                // Truncation tail ≈ 2/N^{m−1} for N = 2·10⁵.
                let tail = 2.0 / 2e5f64.powi(m as i32 - 1);
                assert!((lipschitz_sum(w, m) - b).norm() < 1e-9 * b.norm().max(1.0) + 1.5 * tail, "w={w} m={m}");
            }
        }
        for (x, a) in [(c(0.13, 1.4), c(-0.3, 0.8)), (c(0.4, 0.2), c(0.1, 1.1)), (c(-0.2, 2.5), c(0.3, 0.9))] {
            for k in [4u32, 6, 10] {
                let exact = translate_sum(x, a, k);
                let brute = translate_sum_brute(x, a, k, 100_000);
                let pf = translate_sum_partial_fractions(x, a, k);
                assert!((exact - brute).norm() < 1e-9 * exact.norm().max(1e-6), "x={x} a={a} k={k}: {exact} vs {brute}");
                assert!((pf - exact).norm() < 1e-8 * exact.norm().max(1e-6));
            }
        }
    }

    #[test]
    fn eis_e_matches_box_oracle() {
        let p = EisParams::at_zero(6, 5, 1).unwrap();
        let tau = c(0.0, 2.0);
        let r = eis_e(&p, tau, &EvalBudget { r: 800.0, ..budget() }).unwrap();
        // Box truncations converge onto the shell value.
        let mut last = f64::INFINITY;
        for bound in [400, 1600, 3200] {
            let oracle: Complex64 = box_forms(5, bound).iter().map(|q| q.value(tau).powi(-3) * q.sign().unwrap() as f64).sum();
            let dev = (oracle - r.value).norm();
            assert!(dev < last, "B={bound}: {oracle} vs {}", r.value);
            last = dev;
        }
        assert!(last <= r.err_estimate && last < 1e-5 * r.value.norm());
        // k ≡ 0 mod 4: the sign factor is trivial.
        let p8 = EisParams::at_zero(8, 5, 1).unwrap();
        let unsigned = shell_sum(5, tau, &budget(), |q| Ok(q.value(tau).powi(-4))).unwrap();
        assert!((eis_e(&p8, tau, &budget()).unwrap().value - unsigned.value).norm() < 1e-15);
        // T-invariance.
        let t1 = eis_e(&p, c(0.3, 1.2), &budget()).unwrap().value;
        let t2 = eis_e(&p, c(1.3, 1.2), &budget()).unwrap().value;
        assert!((t1 - t2).norm() < 1e-12 * t1.norm());
        assert!(eis_e(&EisParams::at_zero(2, 5, 1).unwrap(), tau, &budget()).is_err());
    }

    #[test]
    fn zagier_box_oracle_and_decay() {
        let tau = c(0.0, 2.0);
        let r = zagier_f(3, 5, tau, &EvalBudget { r: 800.0, ..budget() }).unwrap();
        let oracle: Complex64 = box_forms(5, 400).iter().map(|q| q.value(tau).powi(-3)).sum();
        assert!((r.value - oracle).norm() < 1e-6 * oracle.norm().max(1e-3));
        assert!(zagier_f(3, 5, c(0.1, 20.0), &budget()).unwrap().value.norm() < 1e-4);
        assert!(zagier_f(2, 5, tau, &budget()).is_err());
    }

    #[test]
    fn eis_tilde_examples() {
        let p = EisParams::at_zero(6, 5, 1).unwrap();
        assert_eq!(eis_tilde(&p, c(0.0, 2.0)).unwrap(), c(0.0, 0.0));
        let tau = c(-0.5, 0.3);
        let forms = enclosing_forms(5, tau).unwrap();
        let q = QForm::new(1, 1, -1);
        assert!(forms.contains(&q) && forms.contains(&q.neg()));
        let direct: Complex64 = forms.iter().map(|f| f.value(tau).powi(-3) * f.sign().unwrap() as f64).sum();
        assert!((eis_tilde(&p, tau).unwrap() - direct).norm() < 1e-14 * direct.norm());
    }

    #[test]
    fn hat_routes_agree_and_match_e_above_net() {
        let p = EisParams::at_zero(6, 5, 1).unwrap();
        let tau = c(0.1, 1.3);
        let a = eis_hat(&p, tau, &budget(), HatRoute::Direct).unwrap().value;
        let b = eis_hat(&p, tau, &budget(), HatRoute::Identity).unwrap().value;
        assert!((a - b).norm() <= 1e-12 * a.norm());
        let e = eis_e(&p, tau, &budget()).unwrap().value;
        assert!((a - e).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn parson_period_identity() {
        let q0 = QForm::new(1, 1, -1);
        let tau = c(0.2, 1.7);
        let b = EvalBudget { r: 400.0, ..budget() };
        let f = parson_f(4, &q0, tau, &b).unwrap();
        let fs = parson_f(4, &q0, -1.0 / tau, &b).unwrap();
        let rhs = f.value - tau.powi(-8) * fs.value;
        let period = parson_period(4, &q0, tau).unwrap();
        let err = f.err_estimate + fs.err_estimate * tau.norm().powi(-8);
        assert!((period - rhs).norm() <= 3.0 * err + 1e-12, "{period} vs {rhs} (err {err})");
        let neg = parson_f(4, &q0.neg(), tau, &b).unwrap().value;
        assert!((neg + f.value).norm() < 1e-14 * f.value.norm().max(1.0));
        for f in parson_boundary_forms(&q0).unwrap() {
            assert!(f.b * f.b < 5);
        }
    }

    #[test]
    fn lhmf_box_oracle_and_reality() {
        let tau = c(0.1, 1.2);
        let r = lhmf_f(3, LhmfScope::AllForms(5), tau, &EvalBudget { r: 400.0, ..budget() }).unwrap();
        let df = 5.0;
        let mut oracle = c(0.0, 0.0);
        for q in box_forms(5, 250) {
            let qt = q.qtau(tau);
            oracle += q.value(tau).powi(2) * qt.signum() * psi(3, df / (qt * qt + df)).unwrap();
        }
        oracle *= -df.powf(-2.5) / (6.0 * PI);
        assert!((r.value - oracle).norm() < 1e-4 * oracle.norm().max(1e-6), "{} vs {oracle}", r.value);
        let im = lhmf_f(3, LhmfScope::AllForms(5), c(0.0, 0.9), &budget()).unwrap().value;
        assert!(im.im.abs() < 1e-10 * im.norm().max(1e-10));
        assert_eq!(psi(3, 1.0).unwrap() > 0.0, true);
    }

    #[test]
    fn petersson_presentations_and_modularity() {
        let b = EvalBudget { rowmax: 40.0, ..budget() };
        let z1 = c(0.13, 1.4);
        let z2 = c(-0.3, 0.8);
        let n = PeterssonNorm::FullGroup;
        let p1 = petersson_p(6, z1, z2, &b, n, Presentation::Z1).unwrap();
        let p2 = petersson_p(6, z1, z2, &b, n, Presentation::Z2).unwrap();
        assert!((p1.value - p2.value).norm() < 1e-6 * p1.value.norm());
        let brute = petersson_p_brute(6, z1, z2, &EvalBudget { nmax: 3000, ..b }, n).unwrap();
        assert!((brute - p1.value).norm() < 1e-6 * p1.value.norm());
        let s = GroupElement::S;
        let in_z1 = petersson_p(6, s.apply(z1), z2, &b, n, Presentation::Z1).unwrap().value * s.j(z1).powi(-6);
        assert!((in_z1 - p1.value).norm() < 1e-6 * p1.value.norm());
        let in_z2 = petersson_p(6, z1, s.apply(z2), &b, n, Presentation::Z1).unwrap();
        let defect = (in_z2.value * s.j(z2).powi(4) - p1.value).norm();
        assert!(defect <= 3.0 * (in_z2.err_estimate + p1.err_estimate) + 1e-9 * p1.value.norm(), "{defect}");
        let proj = petersson_p(6, z1, z2, &b, PeterssonNorm::Projective, Presentation::Z1).unwrap();
        assert!((proj.value * 2.0 - p1.value).norm() < 1e-14 * p1.value.norm());
        // Pole growth.
        let near = petersson_p(6, z2 + c(1e-3, 0.0), z2, &b, n, Presentation::Z1).unwrap().value.norm();
        let nearer = petersson_p(6, z2 + c(5e-4, 0.0), z2, &b, n, Presentation::Z1).unwrap().value.norm();
        assert!((nearer / near - 2.0).abs() < 0.05);
        assert!(petersson_p(6, z2, z2, &b, n, Presentation::Z1).is_err());
    }

    #[test]
    fn niebur_and_exponential_poincare() {
        let b = EvalBudget { rowmax: 60.0, ..budget() };
        let w = c(0.3, 1.1);
        let g = niebur_g(-1, w, 3.0, &b).unwrap();
        let gt = niebur_g(-1, w + 1.0, 3.0, &b).unwrap();
        assert!((g.value - gt.value).norm() < 1e-12 * g.value.norm());
        let gs = niebur_g(-1, -1.0 / w, 3.0, &b).unwrap();
        assert!((g.value - gs.value).norm() < 1e-6 * g.value.norm(), "{} vs {}", g.value, gs.value);
        let p1 = exp_poincare_p(12, 1, c(0.1, 1.0), &b).unwrap().value.norm();
        let p2 = exp_poincare_p(12, 1, c(0.1, 2.0), &b).unwrap().value.norm();
        assert!(p2 < p1 * 1e-2);
    }

    #[test]
    fn theorem_constants() {
        let t = theorem_constant(6, 5).unwrap();
        assert_eq!(t.c1, 48.0);
        assert!((t.c2 - 1.0 / 6.0).abs() < 1e-16);
        assert!((t.c * 5f64.powf(1.5) - 1920.0 / PI).abs() < 1e-10);
        assert!((gamma(1.5).powi(2) - PI / 4.0).abs() < 1e-13);
        let t10 = theorem_constant(10, 5).unwrap();
        assert_eq!(t10.c1, 26880.0);
        assert!((t10.c2 - 1.0 / 280.0).abs() < 1e-18);
        assert!((t.c / theorem_constant_corrected(6, 5).unwrap() - 120.0).abs() < 1e-9);
        assert!(theorem_constant(8, 5).is_err());
        let pref = Complex64::i() / (2.0 * PI) * Complex64::new(0.0, 2.0).powi(5);
        assert!((pref - c(-16.0 / PI, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quantum_limit_exact_properties() {
        let x = rational(1, 2);
        let v = quantum_limit(6, 5, &x).unwrap();
        assert_eq!(v, quantum_limit(6, 5, &rational(3, 2)).unwrap());
        // Each term is q^{2κ−2}/N^{κ−1} with N = ap² + bpq + cq²; here q = 2.
        for f in straddling_forms(5, &x).unwrap() {
            assert!((f.a + f.b).pow(2) < 5 && f.a.abs() <= 5);
        }
        assert!(!v.is_zero());
        // Even κ: −2 Σ_{Q(x,1) > 0} Q(x,1)^{1−κ}.
        let mut alt = BigRational::zero();
        for f in straddling_forms(5, &x).unwrap() {
            let val = BigRational::from_integer(f.a.into()) * &x * &x + BigRational::from_integer(f.b.into()) * &x
                + BigRational::from_integer(f.c.into());
            if val.is_positive() {
                alt -= val.pow(-5) * BigRational::from_integer(2.into());
            }
        }
        assert_eq!(v, alt);
        let (num, err) = quantum_limit_numeric(6, 5, 0.5, 1e-3, 5).unwrap();
        let exact = num_traits::ToPrimitive::to_f64(&v).unwrap();
        assert!((num.re - exact).abs() < 1e-6 * exact.abs() && num.im.abs() < 1e-6 * exact.abs(), "{num} vs {exact} ({err})");
    }
}
