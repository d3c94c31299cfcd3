//! Exact q-expansions of classical modular forms and fast floating-point evaluators.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qforms::reduce_point;

/// Σ c_n qⁿ for lead ≤ n < lead + coeffs.len(), known modulo O(q^{order}).
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    pub lead: i64,
    pub coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QSeries {
    pub fn new(lead: i64, coeffs: Vec<BigRational>) -> Self {
        QSeries { lead, coeffs }
    }

    pub fn from_ints(lead: i64, coeffs: &[i64]) -> Self {
        QSeries::new(lead, coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn constant(c: BigRational, order: i64) -> Self {
        let mut coeffs = vec![BigRational::zero(); order.max(1) as usize];
        coeffs[0] = c;
        QSeries::new(0, coeffs)
    }

    /// First exponent that is not known.
    pub fn order(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn coeff(&self, n: i64) -> BigRational {
        assert!(n < self.order(), "coefficient q^{n} exceeds truncation order {}", self.order());
        if n < self.lead {
            BigRational::zero()
        } else {
            self.coeffs[(n - self.lead) as usize].clone()
        }
    }

    pub fn truncate(&self, order: i64) -> QSeries {
        assert!(order <= self.order());
        let len = (order - self.lead).max(0) as usize;
        QSeries::new(self.lead, self.coeffs[..len].to_vec())
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let lead = self.lead.min(o.lead);
        let order = self.order().min(o.order());
        QSeries::new(lead, (lead..order).map(|n| self.coeff(n) + o.coeff(n)).collect())
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        QSeries::new(self.lead, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let lead = self.lead + o.lead;
        let order = (self.lead + o.order()).min(o.lead + self.order());
        let len = (order - lead).max(0) as usize;
        let mut out = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        QSeries::new(lead, out)
    }

    pub fn pow(&self, n: u32) -> QSeries {
        let mut acc = QSeries::constant(BigRational::one(), self.coeffs.len() as i64);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero leading coefficient.
    pub fn inverse(&self) -> QSeries {
        let c0 = &self.coeffs[0];
        assert!(!c0.is_zero(), "leading coefficient must be nonzero");
        let len = self.coeffs.len();
        let mut out = vec![BigRational::zero(); len];
        out[0] = c0.recip();
        for n in 1..len {
            let mut s = BigRational::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &out[n - k];
            }
            out[n] = -s / c0;
        }
        QSeries::new(-self.lead, out)
    }

    pub fn div(&self, o: &QSeries) -> QSeries {
        self.mul(&o.inverse())
    }

    /// q·d/dq.
    pub fn qderiv(&self) -> QSeries {
        QSeries::new(self.lead, self.coeffs.iter().enumerate().map(|(i, c)| c * rat(self.lead + i as i64)).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Σ c_n qⁿ at τ, with an empirical geometric tail estimate from the last five coefficients.
    pub fn eval(&self, tau: Complex64) -> Result<Evaluated> {
        if tau.im < Q_EVAL_FLOOR {
            return Err(Error::Convergence(format!(
                "Im τ = {} is below the q-series floor {Q_EVAL_FLOOR}",
                tau.im
            )));
        }
        let q = (Complex64::i() * 2.0 * PI * tau).exp();
        let mut value = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            value += q.powi((self.lead + i as i64) as i32) * c.to_f64().unwrap_or(f64::NAN);
        }
        let abs: Vec<f64> = self.coeffs.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).collect();
        let n = abs.len();
        let err = if n >= 6 && abs[n - 1] > 0.0 {
            let ratios: Vec<f64> = (n - 5..n).filter(|&i| abs[i - 1] > 0.0).map(|i| abs[i] / abs[i - 1]).collect();
            let rho = ratios.iter().product::<f64>().powf(1.0 / ratios.len().max(1) as f64);
            let qa = q.norm();
            let x = rho * qa;
            let last = abs[n - 1] * qa.powi(self.order() as i32 - 1);
            if x < 1.0 {
                last * x / (1.0 - x)
            } else {
                f64::INFINITY
            }
        } else {
            0.0
        };
        Ok(Evaluated { value, err_estimate: err })
    }
}

/// Lowest imaginary part accepted by [`QSeries::eval`] at default truncation.
pub const Q_EVAL_FLOOR: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluated {
    pub value: Complex64,
    pub err_estimate: f64,
}

/// Bernoulli numbers B_0..=B_n (B_1 = −1/2).
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::zero(); n + 1];
    b[0] = BigRational::one();
    for m in 1..=n {
        let mut s = BigRational::zero();
        let mut binom = BigInt::one();
        for k in 0..m {
            s += BigRational::from_integer(binom.clone()) * &b[k];
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b[m] = -s / rat(m as i64 + 1);
    }
    b
}

fn sigma(k: u32, n: i64) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

/// E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ, exact up to q^M.
pub fn eisenstein_qexp(k: u32, m: usize) -> Result<QSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Domain(format!("Eisenstein weight must be even and at least 2, got {k}")));
    }
    let bk = bernoulli(k as usize).pop().unwrap();
    let factor = -rat(2 * k as i64) / bk;
    let mut coeffs = vec![BigRational::one()];
    coeffs.extend((1..=m as i64).map(|n| &factor * BigRational::from_integer(sigma(k - 1, n))));
    Ok(QSeries::new(0, coeffs))
}

/// Δ = q Π (1 − qⁿ)²⁴ up to q^M; asserts agreement with (E₄³ − E₆²)/1728.
pub fn delta_qexp(m: usize) -> QSeries {
    let len = m.max(1);
    let mut poly = vec![BigInt::zero(); len];
    poly[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let t = poly[i - n].clone();
                poly[i] -= t;
            }
        }
    }
    let delta = QSeries::new(1, poly.into_iter().map(BigRational::from_integer).collect());
    let e4 = eisenstein_qexp(4, m).unwrap();
    let e6 = eisenstein_qexp(6, m).unwrap();
    let alt = e4.pow(3).sub(&e6.pow(2)).scale(&BigRational::new(1.into(), 1728.into()));
    assert_eq!(delta, alt.truncate(delta.order()).drop_leading_zeros(1), "Δ product and Eisenstein forms disagree");
    delta
}

impl QSeries {
    fn drop_leading_zeros(&self, lead: i64) -> QSeries {
        let skip = (lead - self.lead) as usize;
        assert!(self.coeffs[..skip].iter().all(|c| c.is_zero()));
        QSeries::new(lead, self.coeffs[skip..].to_vec())
    }
}

/// j = E₄³/Δ, exact up to q^M.
pub fn j_qexp(m: usize) -> QSeries {
    let e4 = eisenstein_qexp(4, m + 1).unwrap();
    let delta = delta_qexp(m + 2);
    e4.pow(3).div(&delta).truncate(m as i64 + 1)
}

/// j′ = q dj/dq = −E₄²E₆/Δ, exact up to q^M; asserts both expressions agree.
pub fn jprime_qexp(m: usize) -> QSeries {
    let e4 = eisenstein_qexp(4, m + 1).unwrap();
    let e6 = eisenstein_qexp(6, m + 1).unwrap();
    let delta = delta_qexp(m + 2);
    let jp = e4.pow(2).mul(&e6).div(&delta).scale(&rat(-1)).truncate(m as i64 + 1);
    assert_eq!(jp, j_qexp(m).qderiv(), "j′ two definitions disagree");
    jp
}

/// Coefficients (in powers of j₁ = j − 744, lowest first) of the Faber polynomial with j_m = P_m(j₁).
pub fn faber_polynomial(m: usize) -> Vec<BigRational> {
    let order = 2;
    let j1 = j_qexp(m + order as usize).sub(&QSeries::constant(rat(744), m as i64 + 3));
    let powers: Vec<QSeries> = (0..=m as u32).map(|n| j1.pow(n)).collect();
    let mut poly = vec![BigRational::zero(); m + 1];
    poly[m] = BigRational::one();
    let mut f = powers[m].clone();
    for e in -(m as i64) + 1..=0 {
        let c = f.coeff(e);
        if !c.is_zero() {
            let n = (-e) as usize;
            f = f.sub(&powers[n].scale(&c));
            poly[n] -= &c;
        }
    }
    poly
}

/// j_m = q^{−m} + O(q), exact up to q^M.
pub fn faber_jm(m: usize, order_m: usize) -> QSeries {
    if m == 0 {
        return QSeries::constant(BigRational::one(), order_m as i64 + 1);
    }
    let poly = faber_polynomial(m);
    let j1 = j_qexp(order_m + m + 1).sub(&QSeries::constant(rat(744), (order_m + m + 3) as i64));
    let mut acc = QSeries::constant(poly[0].clone(), (order_m + 2 * m + 2) as i64);
    let mut pw = QSeries::constant(BigRational::one(), (order_m + 2 * m + 2) as i64);
    for c in poly.iter().skip(1) {
        pw = pw.mul(&j1);
        acc = acc.add(&pw.scale(c));
    }
    acc.truncate(order_m as i64 + 1)
}

/// Hecke-operator construction of j_m (test oracle): coefficient of q^N is Σ_{a | (m,N)} (m/a)·c₁(mN/a²).
pub fn hecke_jm(m: i64, order_m: i64) -> QSeries {
    let j1 = j_qexp((m * order_m + 2) as usize).sub(&QSeries::constant(rat(744), m * order_m + 3));
    let gcd = |x: i64, y: i64| num_integer::Integer::gcd(&x, &y);
    let coeffs = (-m..=order_m)
        .map(|n| {
            let g = gcd(m, n);
            (1..=g)
                .filter(|a| g % a == 0)
                .map(|a| {
                    let idx = m * n / (a * a);
                    if idx < -1 {
                        BigRational::zero()
                    } else {
                        rat(m / a) * j1.coeff(idx)
                    }
                })
                .fold(BigRational::zero(), |x, y| x + y)
        })
        .collect();
    QSeries::new(-m, coeffs)
}

// ---------------------------------------------------------------------------
// Floating-point evaluators.

const SIGMA_TABLE: usize = 400;

fn sigma_table() -> &'static [[f64; 3]] {
    static T: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![[0.0; 3]; SIGMA_TABLE + 1];
        for d in 1..=SIGMA_TABLE {
            let df = d as f64;
            for n in (d..=SIGMA_TABLE).step_by(d) {
                t[n][0] += df;
                t[n][1] += df.powi(3);
                t[n][2] += df.powi(5);
            }
        }
        t
    })
}

/// (E₂, E₄, E₆, Δ) by direct q-summation; intended for Im τ ≳ 0.2.
fn qsums(tau: Complex64) -> [Complex64; 4] {
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let qa = q.norm();
    let table = sigma_table();
    let (mut s1, mut s3, mut s5) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut qn = Complex64::new(1.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for (n, row) in table.iter().enumerate().skip(1) {
        qn *= q;
        let mag = qa.powi(n as i32) * (n as f64).powi(6);
        s1 += qn * row[0];
        s3 += qn * row[1];
        s5 += qn * row[2];
        prod *= (Complex64::new(1.0, 0.0) - qn).powi(24);
        if mag < 1e-18 {
            break;
        }
    }
    [
        Complex64::new(1.0, 0.0) - s1 * 24.0,
        Complex64::new(1.0, 0.0) + s3 * 240.0,
        Complex64::new(1.0, 0.0) - s5 * 504.0,
        q * prod,
    ]
}

/// Values of the classical forms at τ, computed at the reduced point and transported back.
#[derive(Clone, Copy, Debug)]
pub struct Classical {
    pub e2star: Complex64,
    pub e4: Complex64,
    pub e6: Complex64,
    pub delta: Complex64,
    pub j: Complex64,
    pub jprime: Complex64,
}

pub fn classical_at(tau: Complex64) -> Classical {
    let (w, g) = reduce_point(tau);
    // g τ = w, so f(τ) = (rτ + s)^{−k} f(w) for weight k.
    let jf = g.j(tau);
    let [e2, e4, e6, delta] = qsums(w);
    let e2s_w = e2 - 3.0 / (PI * w.im);
    let j = e4 * e4 * e4 / delta;
    let jp_w = -e4 * e4 * e6 / delta;
    Classical {
        e2star: e2s_w * jf.powi(-2),
        e4: e4 * jf.powi(-4),
        e6: e6 * jf.powi(-6),
        delta: delta * jf.powi(-12),
        j,
        jprime: jp_w * jf.powi(-2),
    }
}

pub fn j(tau: Complex64) -> Complex64 {
    classical_at(tau).j
}

/// E₂*(τ) = E₂(τ) − 3/(πv), evaluated through the reduced point.
pub fn e2star(tau: Complex64) -> Complex64 {
    classical_at(tau).e2star
}

/// E₂*(τ) straight from the q-series, without reduction (for high τ).
pub fn e2star_direct(tau: Complex64) -> Complex64 {
    qsums(tau)[0] - 3.0 / (PI * tau.im)
}

pub fn e4(tau: Complex64) -> Complex64 {
    classical_at(tau).e4
}

/// j′(τ)/(j(w) − j(τ)).
pub fn akn_kernel(w: Complex64, tau: Complex64) -> Result<Complex64> {
    let ct = classical_at(tau);
    let jw = j(w);
    let den = jw - ct.j;
    if den.norm() <= 1e-12 * (1.0 + jw.norm()) {
        return Err(Error::Domain("j(w) = j(τ): the kernel has a pole".into()));
    }
    Ok(ct.jprime / den)
}

/// Faber polynomials converted to f64, cached up to the largest m requested.
pub fn faber_f64(m: usize) -> Vec<f64> {
    faber_polynomial(m).iter().map(|c| c.to_f64().unwrap()).collect()
}

/// Σ_{m=0}^{M} j_m(w) q^m, the generating series side of the kernel identity.
pub fn akn_series(w: Complex64, tau: Complex64, m_max: usize) -> Complex64 {
    let j1 = j(w) - 744.0;
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let mut total = Complex64::new(1.0, 0.0);
    for m in 1..=m_max {
        let poly = faber_f64(m);
        let val = poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * j1 + c);
        total += val * q.powi(m as i32);
    }
    total
}
