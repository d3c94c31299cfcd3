//! Integer substrate: Kronecker symbols, discriminant predicates, Pell solutions.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Kronecker symbol (d/n), extended to all integers d and n.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut d = d as i128;
    let mut n = n as i128;
    let mut res = 1i32;
    if n < 0 {
        n = -n;
        if d < 0 {
            res = -res;
        }
    }
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            res = -res;
        }
    }
    // n is now odd and positive: Jacobi symbol (d mod n / n).
    d = d.rem_euclid(n);
    while d != 0 {
        while d % 2 == 0 {
            d /= 2;
            if matches!(n % 8, 3 | 5) {
                res = -res;
            }
        }
        std::mem::swap(&mut d, &mut n);
        if d % 4 == 3 && n % 4 == 3 {
            res = -res;
        }
        d %= n;
    }
    if n == 1 {
        res
    } else {
        0
    }
}

pub fn is_discriminant(d: i64) -> bool {
    matches!(d.rem_euclid(4), 0 | 1)
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = n.sqrt();
        r * r == n
    }
}

fn is_squarefree(n: i64) -> bool {
    let n = n.abs();
    let mut p = 2i64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Fundamental discriminants, with 1 counted as fundamental.
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => matches!((d / 4).rem_euclid(4), 2 | 3) && is_squarefree(d / 4),
        _ => false,
    }
}

/// A validated discriminant `D ≡ 0, 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_discriminant(d) {
            Ok(Discriminant(d))
        } else {
            Err(Error::InvalidDiscriminant(d))
        }
    }

    /// Positive non-square discriminant, the setting of every lattice sum here.
    pub fn indefinite(d: i64) -> Result<Self> {
        let disc = Self::new(d)?;
        if d <= 0 || is_square(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(disc)
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn is_square(self) -> bool {
        is_square(self.0)
    }

    pub fn is_fundamental(self) -> bool {
        is_fundamental(self.0)
    }

    pub fn sqrt(self) -> f64 {
        (self.0 as f64).sqrt()
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Minimal positive solution of `t² − D r² = 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub t: BigInt,
    pub r: BigInt,
}

impl PellSolution {
    /// `log((t + r√D)/2)`, the logarithm of the fundamental totally positive unit.
    pub fn log_unit(&self) -> f64 {
        // ε > 1 and ε·ε' = 1, so ε + 1/ε = t gives a cancellation-free route.
        let t = self.t.to_f64().unwrap_or(f64::INFINITY);
        if t.is_finite() && t < 1e150 {
            (t / 2.0 + ((t / 2.0).powi(2) - 1.0).sqrt()).ln()
        } else {
            // ε = t·(1 + √(1 − 4/t²))/2 ≈ t once t is this large.
            let shift = self.t.bits() - 60;
            let top = (&self.t >> shift).to_f64().unwrap();
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// Fundamental solution via the continued fraction of √D.
///
/// For D > 16 every solution has t/r (or (t/2)/(r/2)) among the convergents of √D.
pub fn pell_fundamental(d: Discriminant) -> Result<PellSolution> {
    let dv = d.get();
    if dv <= 0 || d.is_square() {
        return Err(Error::InvalidDiscriminant(dv));
    }
    if dv <= 16 {
        return Ok(pell_brute(dv, 1_000).expect("small discriminants have small units"));
    }
    let big_d = BigInt::from(dv);
    let a0 = dv.sqrt();
    let (mut m, mut den, mut a) = (0i64, 1i64, a0);
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::from(a0));
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let mut best: Option<PellSolution> = None;
    loop {
        let norm = &p * &p - &big_d * &q * &q;
        let cand = if norm == BigInt::from(4) {
            Some(PellSolution { t: p.clone(), r: q.clone() })
        } else if norm.is_one() {
            Some(PellSolution { t: &p * 2, r: &q * 2 })
        } else {
            None
        };
        if let Some(c) = cand {
            if best.as_ref().map_or(true, |b| c.r < b.r) {
                best = Some(c);
            }
        }
        if let Some(b) = &best {
            if q >= b.r {
                return Ok(best.unwrap());
            }
        }
        m = den * a - m;
        den = (dv - m * m) / den;
        a = (a0 + m) / den;
        let p_next = BigInt::from(a) * &p + &p_prev;
        let q_next = BigInt::from(a) * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Brute-force Pell search over r = 1, 2, …, rmax.
pub fn pell_brute(d: i64, rmax: i64) -> Option<PellSolution> {
    (1..=rmax).find_map(|r| {
        let t2 = 4 + d as i128 * (r as i128) * (r as i128);
        let t = t2.sqrt();
        (t * t == t2).then(|| PellSolution { t: BigInt::from(t), r: BigInt::from(r) })
    })
}

/// Positive fundamental discriminants d with d | D and D/d a discriminant.
pub fn fundamental_divisors(d: i64) -> Result<Vec<i64>> {
    if d == 0 {
        return Err(Error::InvalidDiscriminant(0));
    }
    Ok((1..=d.abs())
        .filter(|&x| d % x == 0 && is_fundamental(x) && is_discriminant(d / x))
        .collect())
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

/// Extended gcd: returns (g, x, y) with x·a + y·b = g ≥ 0.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}
