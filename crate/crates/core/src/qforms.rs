//! Integral binary quadratic forms `[a,b,c] = ax² + bxy + cy²`.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd3, pell_fundamental, Discriminant, PellSolution};
use crate::error::{Error, Result};

pub type ExactComplex = Complex<BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 3]", from = "[i64; 3]")]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<QForm> for [i64; 3] {
    fn from(q: QForm) -> Self {
        [q.a, q.b, q.c]
    }
}

impl From<[i64; 3]> for QForm {
    fn from(v: [i64; 3]) -> Self {
        QForm::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for QForm {
    type Err = Error;
    /// Parses `a,b,c` (brackets optional).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<i64> = t
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Domain(format!("cannot parse form '{s}'")))?;
        match parts.as_slice() {
            [a, b, c] => Ok(QForm::new(*a, *b, *c)),
            _ => Err(Error::Domain(format!("a form needs three coefficients, got '{s}'"))),
        }
    }
}

fn narrow(x: i128, what: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(what))
}

impl QForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        let d = (self.b as i128).pow(2) - 4 * self.a as i128 * self.c as i128;
        narrow(d, "discriminant").expect("discriminant exceeds i64")
    }

    pub fn content(&self) -> i64 {
        gcd3(self.a, self.b, self.c)
    }

    pub fn neg(&self) -> QForm {
        QForm::new(-self.a, -self.b, -self.c)
    }

    /// sgn(a), or sgn(c) when a = 0.
    pub fn sign(&self) -> Result<i32> {
        match (self.a.signum(), self.c.signum()) {
            (0, 0) => Err(Error::ZeroForm),
            (0, s) | (s, _) => Ok(s as i32),
        }
    }

    pub fn eval_int(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Q(τ,1) = aτ² + bτ + c.
    pub fn value(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) * tau + self.c as f64
    }

    pub fn value_exact(&self, tau: &ExactPoint) -> ExactComplex {
        let z = tau.as_complex();
        let a = Complex::new(BigRational::from_integer(self.a.into()), BigRational::zero());
        let b = Complex::new(BigRational::from_integer(self.b.into()), BigRational::zero());
        let c = Complex::new(BigRational::from_integer(self.c.into()), BigRational::zero());
        (a * &z + b) * &z + c
    }

    /// Q_τ = (a|τ|² + b·Re τ + c)/Im τ.
    pub fn qtau(&self, tau: Complex64) -> f64 {
        let (u, v) = (tau.re, tau.im);
        (self.a as f64 * (u * u + v * v) + self.b as f64 * u + self.c as f64) / v
    }

    pub fn qtau_exact(&self, tau: &ExactPoint) -> BigRational {
        let big = |x: i64| BigRational::from_integer(x.into());
        let n2 = &tau.u * &tau.u + &tau.v * &tau.v;
        (big(self.a) * n2 + big(self.b) * &tau.u + big(self.c)) / &tau.v
    }

    /// Scale of the summands of Q_τ; the on-net tolerance is relative to it.
    fn qtau_scale(&self, tau: Complex64) -> f64 {
        let (u, v) = (tau.re, tau.im);
        (self.a.abs() as f64 * (u * u + v * v) + self.b.abs() as f64 * u.abs() + self.c.abs() as f64) / v
    }

    /// Roots (w₁ < w₂) of Q(x,1).
    pub fn roots(&self) -> Result<(f64, f64)> {
        let d = self.disc();
        if d <= 0 || arith::is_square(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        let sd = (d as f64).sqrt();
        let a2 = 2.0 * self.a as f64;
        let (r1, r2) = ((-(self.b as f64) - sd) / a2, (-(self.b as f64) + sd) / a2);
        Ok(if r1 < r2 { (r1, r2) } else { (r2, r1) })
    }

    pub fn center(&self) -> f64 {
        -(self.b as f64) / (2.0 * self.a as f64)
    }

    pub fn radius(&self) -> f64 {
        (self.disc() as f64).sqrt() / (2.0 * self.a.abs() as f64)
    }

    /// 1_Q(τ): one iff τ lies strictly inside the semicircle S_Q.
    pub fn indicator(&self, tau: Complex64) -> Result<u8> {
        self.indicator_tol(tau, NET_TOL)
    }

    pub fn indicator_tol(&self, tau: Complex64, tol: f64) -> Result<u8> {
        let qt = self.qtau(tau);
        if qt.abs() <= tol * (1.0 + self.qtau_scale(tau)) {
            return Err(Error::OnNet(qt, self.to_string()));
        }
        Ok(u8::from(self.sign()? as f64 * qt < 0.0))
    }

    pub fn indicator_exact(&self, tau: &ExactPoint) -> Result<u8> {
        let qt = self.qtau_exact(tau);
        if qt.is_zero() {
            return Err(Error::OnNet(0.0, self.to_string()));
        }
        Ok(u8::from((self.sign()? < 0) != qt.is_negative()))
    }

    /// Q∘γ, i.e. (x,y) ↦ Q(px + qy, rx + sy).
    pub fn act(&self, g: &GroupElement) -> Result<QForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (g.p as i128, g.q as i128, g.r as i128, g.s as i128);
        let na = self.eval_int_checked(p, r)?;
        let nc = self.eval_int_checked(q, s)?;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        Ok(QForm::new(narrow(na, "form action")?, narrow(nb, "form action")?, narrow(nc, "form action")?))
    }

    fn eval_int_checked(&self, x: i128, y: i128) -> Result<i128> {
        let f = || -> Option<i128> {
            let t1 = (self.a as i128).checked_mul(x.checked_mul(x)?)?;
            let t2 = (self.b as i128).checked_mul(x.checked_mul(y)?)?;
            let t3 = (self.c as i128).checked_mul(y.checked_mul(y)?)?;
            t1.checked_add(t2)?.checked_add(t3)
        };
        f().ok_or(Error::Overflow("form action"))
    }

    /// Generator of the stabilizer Γ_Q (modulo ±1), built from the fundamental Pell solution.
    pub fn automorph(&self) -> Result<GroupElement> {
        let d = self.disc();
        let disc = Discriminant::indefinite(d)?;
        let g = self.content();
        let prim = QForm::new(self.a / g, self.b / g, self.c / g);
        let pell = pell_fundamental(Discriminant::new(disc.get() / (g * g))?)?;
        automorph_from(&prim, &pell)
    }

    /// Canonical representative of the Γ-class: least (|a|, −a, b, c) on the reduced cycle.
    pub fn class_key(&self) -> Result<QForm> {
        let cycle = reduced_cycle(*self)?;
        Ok(canonical(&cycle))
    }

    pub fn equivalent(&self, other: &QForm) -> Result<bool> {
        Ok(self.disc() == other.disc() && self.class_key()? == other.class_key()?)
    }

    /// The arc Γ_Q\S_Q from the apex over one period of the automorph.
    pub fn geodesic_arc(&self) -> Result<GeodesicArc> {
        let d = self.disc();
        Discriminant::indefinite(d)?;
        let g = self.content();
        let pell = pell_fundamental(Discriminant::new(d / (g * g))?)?;
        let period = 2.0 * pell.log_unit();
        let orientation = self.sign()?;
        let theta_end = 2.0 * (orientation as f64 * period).exp().atan();
        Ok(GeodesicArc {
            center: self.center(),
            radius: self.radius(),
            theta_start: FRAC_PI_2,
            theta_end,
            orientation,
            period,
        })
    }
}

/// Default relative tolerance for on-net detection with floating points.
pub const NET_TOL: f64 = 1e-12;

fn automorph_from(q: &QForm, pell: &PellSolution) -> Result<GroupElement> {
    let (t, r) = (&pell.t, &pell.r);
    let big = |x: i64| BigInt::from(x);
    let to = |x: BigInt| x.to_i64().ok_or(Error::Overflow("automorph"));
    let p = to((t + big(q.b) * r) / 2)?;
    let qq = to(big(q.c) * r)?;
    let rr = to(-big(q.a) * r)?;
    let s = to((t - big(q.b) * r) / 2)?;
    Ok(GroupElement::new(p, qq, rr, s))
}

/// Half-open hyperbolic arc of S_Q, parametrized as center + radius·e^{iθ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeodesicArc {
    pub center: f64,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    /// +1 counterclockwise (sgn Q > 0), −1 clockwise.
    pub orientation: i32,
    /// Hyperbolic length 2·log ε of one period.
    pub period: f64,
}

impl GeodesicArc {
    /// Point at hyperbolic arclength t from the apex, with dz/dt.
    pub fn point(&self, t: f64) -> (Complex64, Complex64) {
        let theta = 2.0 * (self.orientation as f64 * t).exp().atan();
        let e = Complex64::from_polar(1.0, theta);
        let z = e * self.radius + self.center;
        let dz = Complex64::i() * e * (self.radius * theta.sin() * self.orientation as f64);
        (z, dz)
    }
}

/// Element (p q; r s) of SL₂(ℤ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl GroupElement {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Self {
        let g = GroupElement { p, q, r, s };
        assert_eq!(g.det(), 1, "group elements have determinant one");
        g
    }

    pub fn try_new(p: i64, q: i64, r: i64, s: i64) -> Result<Self> {
        let g = GroupElement { p, q, r, s };
        if g.det() == 1 {
            Ok(g)
        } else {
            Err(Error::Domain(format!("matrix ({p} {q}; {r} {s}) does not have determinant 1")))
        }
    }

    fn det(&self) -> i128 {
        self.p as i128 * self.s as i128 - self.q as i128 * self.r as i128
    }

    pub const IDENTITY: GroupElement = GroupElement { p: 1, q: 0, r: 0, s: 1 };
    pub const S: GroupElement = GroupElement { p: 0, q: -1, r: 1, s: 0 };
    pub const T: GroupElement = GroupElement { p: 1, q: 1, r: 0, s: 1 };

    pub fn t_pow(n: i64) -> Self {
        GroupElement { p: 1, q: n, r: 0, s: 1 }
    }

    pub fn mul(&self, o: &GroupElement) -> Result<GroupElement> {
        let m = |x: i64, y: i64, z: i64, w: i64| {
            narrow(x as i128 * y as i128 + z as i128 * w as i128, "matrix product")
        };
        Ok(GroupElement {
            p: m(self.p, o.p, self.q, o.r)?,
            q: m(self.p, o.q, self.q, o.s)?,
            r: m(self.r, o.p, self.s, o.r)?,
            s: m(self.r, o.q, self.s, o.s)?,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { p: self.s, q: -self.q, r: -self.r, s: self.p }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { p: -self.p, q: -self.q, r: -self.r, s: -self.s }
    }

    /// Möbius action γτ.
    pub fn apply(&self, tau: Complex64) -> Complex64 {
        (tau * self.p as f64 + self.q as f64) / (tau * self.r as f64 + self.s as f64)
    }

    /// Automorphy factor rτ + s.
    pub fn j(&self, tau: Complex64) -> Complex64 {
        tau * self.r as f64 + self.s as f64
    }

    pub fn apply_exact(&self, tau: &ExactPoint) -> ExactPoint {
        let big = |x: i64| Complex::new(BigRational::from_integer(x.into()), BigRational::zero());
        let z = tau.as_complex();
        let w = (big(self.p) * &z + big(self.q)) / (big(self.r) * &z + big(self.s));
        ExactPoint { u: w.re, v: w.im }
    }
}

/// A point of the upper half-plane with rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoint {
    pub u: BigRational,
    pub v: BigRational,
}

impl ExactPoint {
    pub fn new(u: BigRational, v: BigRational) -> Result<Self> {
        if !v.is_positive() {
            return Err(Error::Domain("imaginary part must be positive".into()));
        }
        Ok(ExactPoint { u, v })
    }

    pub fn from_ratios(un: i64, ud: i64, vn: i64, vd: i64) -> Result<Self> {
        Self::new(
            BigRational::new(un.into(), ud.into()),
            BigRational::new(vn.into(), vd.into()),
        )
    }

    pub fn as_complex(&self) -> ExactComplex {
        Complex::new(self.u.clone(), self.v.clone())
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(self.u.to_f64().unwrap(), self.v.to_f64().unwrap())
    }
}

fn is_reduced(q: &QForm, d: i64) -> bool {
    // 0 < b < √D and √D − b < 2|a| < √D + b, decided in integers.
    let (a2, b) = (2 * q.a.abs() as i128, q.b as i128);
    let d = d as i128;
    b > 0 && b * b < d && (a2 + b) * (a2 + b) > d && (a2 <= b || (a2 - b) * (a2 - b) < d)
}

/// Right neighbour ρ(Q) = (c, b′, ·) with b′ ≡ −b (mod 2|c|) and √D − 2|c| < b′ < √D.
fn rho(q: &QForm, d: i64, sd: i64) -> Result<QForm> {
    let m = 2 * q.c.abs() as i128;
    let mut bp = -(q.b as i128);
    bp += (sd as i128 - bp).div_euclid(m) * m;
    if bp > sd as i128 {
        bp -= m;
    }
    let num = bp * bp - d as i128;
    let den = 4 * q.c as i128;
    debug_assert_eq!(num % den, 0);
    Ok(QForm::new(q.c, narrow(bp, "reduction")?, narrow(num / den, "reduction")?))
}

/// The ρ-cycle of reduced forms equivalent to `q`, starting at the first reduced form reached.
pub fn reduced_cycle(q: QForm) -> Result<Vec<QForm>> {
    let d = q.disc();
    Discriminant::indefinite(d)?;
    let sd = d.sqrt();
    let mut cur = q;
    let mut steps = 0;
    while !is_reduced(&cur, d) {
        cur = rho(&cur, d, sd)?;
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Domain(format!("reduction of {q} did not terminate")));
        }
    }
    let mut cycle = vec![cur];
    let mut next = rho(&cur, d, sd)?;
    while next != cycle[0] {
        cycle.push(next);
        next = rho(&next, d, sd)?;
        if cycle.len() > 100_000 {
            return Err(Error::Domain(format!("reduced cycle of {q} did not close")));
        }
    }
    Ok(cycle)
}

/// Ordering for canonical representatives: least |a|, then positive a, then b, then c.
fn canonical_order(f: &QForm) -> (i64, i64, i64, i64) {
    (f.a.abs(), -f.a, f.b, f.c)
}

fn canonical(cycle: &[QForm]) -> QForm {
    *cycle
        .iter()
        .min_by_key(|f| canonical_order(f))
        .expect("cycles are non-empty")
}

/// One canonical representative per class of Q(D)/Γ, imprimitive classes included.
pub fn class_representatives(d: i64) -> Result<Vec<QForm>> {
    Discriminant::indefinite(d)?;
    let sd = d.sqrt();
    let mut keys = BTreeSet::new();
    for b in 1..=sd {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for f in [QForm::new(a, b, ac / a), QForm::new(-a, b, -ac / a)] {
                if is_reduced(&f, d) {
                    keys.insert(canonical(&reduced_cycle(f)?));
                }
            }
        }
    }
    let mut reps: Vec<QForm> = keys.into_iter().collect();
    reps.sort_by_key(|f| canonical_order(f));
    Ok(reps)
}

/// All Q of discriminant D with |Q_τ| ≤ R, sorted.
///
/// Uses X² = 4avQ_τ − 4a²v² + D for X = 2au + b, which bounds |a| ≤ (R + √(R²+D))/(2v).
pub fn enumerate_shell(d: i64, tau: Complex64, r: f64) -> Result<Vec<QForm>> {
    Discriminant::indefinite(d)?;
    let (u, v) = (tau.re, tau.im);
    let df = d as f64;
    let amax = ((r + (r * r + df).sqrt()) / (2.0 * v)).floor() as i64 + 1;
    let mut out = Vec::new();
    for a in -amax..=amax {
        if a == 0 {
            continue;
        }
        let af = a as f64;
        let hi2 = df + 4.0 * af.abs() * v * r - 4.0 * af * af * v * v;
        if hi2 < 0.0 {
            continue;
        }
        let xm = hi2.sqrt();
        let bmin = (-xm - 2.0 * af * u).floor() as i64 - 1;
        let bmax = (xm - 2.0 * af * u).ceil() as i64 + 1;
        let m4 = 4 * a as i128;
        let mut b = bmin + (bmin - d).rem_euclid(2);
        while b <= bmax {
            let num = (b as i128) * (b as i128) - d as i128;
            if num % m4 == 0 {
                let q = QForm::new(a, b, narrow(num / m4, "shell enumeration")?);
                if q.qtau(tau).abs() <= r {
                    out.push(q);
                }
            }
            b += 2;
        }
    }
    out.sort();
    Ok(out)
}

fn check_off_net(q: &QForm, tau: Complex64) -> Result<()> {
    q.indicator(tau).map(|_| ())
}

/// The finite set {Q : 1_Q(τ) = 1}; τ inside S_Q forces |a| < √D/(2v).
pub fn enclosing_forms(d: i64, tau: Complex64) -> Result<Vec<QForm>> {
    Discriminant::indefinite(d)?;
    let (u, v) = (tau.re, tau.im);
    let df = d as f64;
    let amax = (df.sqrt() / (2.0 * v)).floor() as i64 + 1;
    let mut out = Vec::new();
    for a in -amax..=amax {
        if a == 0 {
            continue;
        }
        let af = a as f64;
        let hi2 = df - 4.0 * af * af * v * v;
        // Forms within a hair of the boundary are still examined for the on-net check.
        let xm = hi2.max(0.0).sqrt();
        let bmin = (-xm - 2.0 * af * u).floor() as i64 - 1;
        let bmax = (xm - 2.0 * af * u).ceil() as i64 + 1;
        let m4 = 4 * a as i128;
        let mut b = bmin + (bmin - d).rem_euclid(2);
        while b <= bmax {
            let num = (b as i128) * (b as i128) - d as i128;
            if num % m4 == 0 {
                let q = QForm::new(a, b, narrow(num / m4, "enclosing forms")?);
                check_off_net(&q, tau)?;
                if q.indicator(tau)? == 1 {
                    out.push(q);
                }
            }
            b += 2;
        }
    }
    out.sort();
    Ok(out)
}

/// All Q̂ ∼ Q₀ with ac < 0; finite since then b² < D and |ac| ≤ D/4.
pub fn parson_boundary_forms(q0: &QForm) -> Result<Vec<QForm>> {
    let d = q0.disc();
    Discriminant::indefinite(d)?;
    let key = q0.class_key()?;
    let sd = d.sqrt();
    let mut out = Vec::new();
    for b in -sd..=sd {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for f in [QForm::new(a, b, ac / a), QForm::new(-a, b, -ac / a)] {
                if f.class_key()? == key {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Reduces τ into the standard fundamental domain; returns (w, g) with gτ = w.
pub fn reduce_point(tau: Complex64) -> (Complex64, GroupElement) {
    let mut z = tau;
    let mut g = GroupElement::IDENTITY;
    for _ in 0..10_000 {
        let n = (z.re + 0.5).floor();
        z.re -= n;
        g = GroupElement::t_pow(-(n as i64)).mul(&g).expect("reduction word stays small");
        if z.norm_sqr() < 1.0 - 1e-15 {
            z = -1.0 / z;
            g = GroupElement::S.mul(&g).expect("reduction word stays small");
        } else {
            break;
        }
    }
    (z, g)
}

/// A matrix in SL₂(ℤ) with bottom row (c, d), gcd(c, d) = 1, top row normalised by 0 ≤ p < |c|.
pub fn complete_row(c: i64, d: i64) -> GroupElement {
    if c == 0 {
        return if d == 1 { GroupElement::IDENTITY } else { GroupElement::IDENTITY.neg() };
    }
    // p d − q c = 1.
    let (g, x, _) = arith::egcd(d, c);
    debug_assert_eq!(g, 1);
    let m = c.abs();
    let p = x.rem_euclid(m);
    let q = (p as i128 * d as i128 - 1) / c as i128;
    GroupElement::new(p, q as i64, c, d)
}

/// Smallest |Q_τ| over forms of discriminant D in a shell, i.e. a distance-to-net proxy.
pub fn net_clearance(d: i64, tau: Complex64) -> Result<f64> {
    let forms = enumerate_shell(d, tau, 2.0)?;
    Ok(forms.iter().map(|q| q.qtau(tau).abs()).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_examples() {
        let q = QForm::new(1, 1, -1);
        assert_eq!(q.act(&GroupElement::T).unwrap(), QForm::new(1, 3, 1));
        assert_eq!(q.act(&GroupElement::S).unwrap(), QForm::new(-1, -1, 1));
        assert_eq!(q.act(&GroupElement::IDENTITY).unwrap(), q);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(QForm::new(1, 1, -1).sign().unwrap(), 1);
        assert_eq!(QForm::new(-2, 1, 1).sign().unwrap(), -1);
        assert_eq!(QForm::new(0, 3, 2).sign().unwrap(), 1);
        assert!(QForm::new(0, 3, 0).sign().is_err());
    }

    #[test]
    fn value_and_qtau_examples() {
        let i = Complex64::i();
        assert_eq!(QForm::new(1, 1, -1).value(i), Complex64::new(-2.0, 1.0));
        assert_eq!(QForm::new(1, 0, 1).value(i), Complex64::new(0.0, 0.0));
        let tau = Complex64::new(0.3, 0.7);
        assert_eq!(QForm::new(0, 1, 0).value(tau), tau);
        assert_eq!(QForm::new(1, 1, -1).qtau(2.0 * i), 1.5);
        assert_eq!(QForm::new(1, 0, 1).qtau(i), 2.0);
        let q = QForm::new(1, 1, -1);
        let on = Complex64::new(q.center(), 0.0) + Complex64::from_polar(q.radius(), 1.0);
        assert!(q.qtau(on).abs() < 1e-14);
    }

    #[test]
    fn roots_examples() {
        let (w1, w2) = QForm::new(1, 1, -1).roots().unwrap();
        assert!((w1 - (-1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((w2 - (-1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let s2 = 2f64.sqrt();
        for q in [QForm::new(1, 0, -2), QForm::new(-1, 0, 2)] {
            let (w1, w2) = q.roots().unwrap();
            assert!((w1 + s2).abs() < 1e-15 && (w2 - s2).abs() < 1e-15);
        }
        assert!(QForm::new(1, 0, -1).roots().is_err());
    }

    #[test]
    fn indicator_examples() {
        let q = QForm::new(1, 1, -1);
        assert_eq!(q.indicator(Complex64::new(0.0, 2.0)).unwrap(), 0);
        assert_eq!(q.indicator(Complex64::new(-0.5, 0.3)).unwrap(), 1);
        assert_eq!(q.neg().indicator(Complex64::new(-0.5, 0.3)).unwrap(), 1);
        let apex = Complex64::new(-0.5, 5f64.sqrt() / 2.0);
        assert!(matches!(q.indicator(apex), Err(Error::OnNet(..))));
        let exact_on = ExactPoint::from_ratios(-1, 2, 1, 1).unwrap();
        // [1,1,-1] at -1/2 + i: Q_τ = (5/4 - 1/2 - 1)/1 = -1/4, inside.
        assert_eq!(q.indicator_exact(&exact_on).unwrap(), 1);
    }

    #[test]
    fn class_examples() {
        assert_eq!(class_representatives(5).unwrap(), vec![QForm::new(1, 1, -1)]);
        let c20 = class_representatives(20).unwrap();
        assert!(c20.iter().any(|q| q.content() == 2));
        assert!(c20.iter().any(|q| q.content() == 1));
        assert!(class_representatives(9).is_err());
    }

    #[test]
    fn automorph_example_and_stabilizer() {
        let q = QForm::new(1, 1, -1);
        let g = q.automorph().unwrap();
        assert_eq!(g, GroupElement::new(2, -1, -1, 1));
        for d in [5i64, 8, 12, 13, 20, 21, 40, 60, 61] {
            for q in class_representatives(d).unwrap() {
                assert_eq!(q.act(&q.automorph().unwrap()).unwrap(), q);
            }
        }
    }

    #[test]
    fn automorph_conjugates() {
        let q = QForm::new(1, 1, -1);
        let g = GroupElement::new(2, 1, 1, 1);
        let q2 = q.act(&g).unwrap();
        let lhs = q2.automorph().unwrap();
        let rhs = g.inverse().mul(&q.automorph().unwrap()).unwrap().mul(&g).unwrap();
        assert!(lhs == rhs || lhs == rhs.neg() || lhs == rhs.inverse() || lhs == rhs.inverse().neg());
    }

    #[test]
    fn automorph_maps_arc_start_to_end() {
        for d in [5i64, 8, 12, 13, 21] {
            for q in class_representatives(d).unwrap() {
                for f in [q, q.neg(), q.act(&GroupElement::new(2, 1, 1, 1)).unwrap()] {
                    let arc = f.geodesic_arc().unwrap();
                    let (z0, _) = arc.point(0.0);
                    let (z1, _) = arc.point(arc.period);
                    let g = f.automorph().unwrap();
                    let w = g.apply(z0);
                    let w_inv = g.inverse().apply(z0);
                    assert!((w - z1).norm() < 1e-9 || (w_inv - z1).norm() < 1e-9, "{f}");
                }
            }
        }
    }

    fn brute_shell(d: i64, tau: Complex64, r: f64, box_: i64) -> Vec<QForm> {
        let mut out = Vec::new();
        for a in -box_..=box_ {
            for b in -box_..=box_ {
                if a == 0 || (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let q = QForm::new(a, b, (b * b - d) / (4 * a));
                if q.qtau(tau).abs() <= r {
                    out.push(q);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn shell_matches_brute_force() {
        let tau = Complex64::new(0.0, 2.0);
        assert!(enumerate_shell(5, tau, 0.0).unwrap().is_empty());
        assert_eq!(enumerate_shell(5, tau, 3.0).unwrap(), brute_shell(5, tau, 3.0, 50));
        let tau = Complex64::new(0.37, 0.61);
        assert_eq!(enumerate_shell(13, tau, 7.0).unwrap(), brute_shell(13, tau, 7.0, 80));
        let shell = enumerate_shell(12, tau, 5.0).unwrap();
        for q in &shell {
            assert!(shell.binary_search(&q.neg()).is_ok());
        }
    }

    #[test]
    fn enclosing_examples() {
        assert!(enclosing_forms(5, Complex64::new(0.0, 2.0)).unwrap().is_empty());
        let e = enclosing_forms(5, Complex64::new(-0.5, 0.3)).unwrap();
        assert!(e.contains(&QForm::new(1, 1, -1)) && e.contains(&QForm::new(-1, -1, 1)));
        assert_eq!(e.len() % 2, 0);
        let tau = Complex64::new(0.21, 0.17);
        let brute: Vec<QForm> = brute_shell(5, tau, 1e9, 60)
            .into_iter()
            .filter(|q| q.indicator(tau).unwrap() == 1)
            .collect();
        assert_eq!(enclosing_forms(5, tau).unwrap(), brute);
    }

    #[test]
    fn parson_boundary_examples() {
        let q0 = QForm::new(1, 1, -1);
        let forms = parson_boundary_forms(&q0).unwrap();
        assert!(!forms.is_empty());
        for f in &forms {
            assert!(f.b * f.b < 5 && (f.a * f.c).abs() <= 1 && f.a * f.c < 0);
            assert!(f.equivalent(&q0).unwrap());
        }
        let doubled = parson_boundary_forms(&QForm::new(2, 2, -2)).unwrap();
        assert_eq!(doubled, forms.iter().map(|f| QForm::new(2 * f.a, 2 * f.b, 2 * f.c)).collect::<Vec<_>>());
    }
}
