//! Extended genus characters χ_d on forms of discriminant D.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{gcd, gcd3, is_discriminant, is_fundamental, kronecker};
use crate::error::{Error, Result};
use crate::qforms::QForm;

const WITNESS_BOX: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenusCharacter {
    pub d: i64,
    pub disc: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharValue {
    pub value: i32,
    /// The represented integer whose Kronecker symbol was taken; absent when the value is forced to 0.
    pub witness_n: Option<i64>,
}

impl GenusCharacter {
    /// χ_d for discriminant D; d = 0 is allowed only for D = 0.
    pub fn new(d: i64, disc: i64) -> Result<Self> {
        let ok = if disc == 0 {
            d == 0
        } else {
            d != 0 && is_fundamental(d) && disc % d == 0 && is_discriminant(disc / d)
        };
        if ok {
            Ok(GenusCharacter { d, disc })
        } else {
            Err(Error::InvalidCharacter(d, disc))
        }
    }

    pub fn eval(&self, q: &QForm) -> Result<i32> {
        Ok(self.eval_with_witness(q)?.value)
    }

    pub fn eval_with_witness(&self, q: &QForm) -> Result<CharValue> {
        if q.disc() != self.disc {
            return Err(Error::Domain(format!("{q} does not have discriminant {}", self.disc)));
        }
        if self.d == 1 {
            return Ok(CharValue { value: 1, witness_n: None });
        }
        if self.d == 0 {
            return Ok(self.eval_zero(q));
        }
        if gcd(q.content(), self.d) > 1 {
            return Ok(CharValue { value: 0, witness_n: None });
        }
        let n = first_witness(q, |n| gcd(n, self.d) == 1).ok_or(Error::WitnessBudget)?;
        Ok(CharValue { value: kronecker(self.d, n), witness_n: Some(n) })
    }

    fn eval_zero(&self, q: &QForm) -> CharValue {
        if gcd3(q.a, q.b, q.c) != 1 {
            return CharValue { value: 0, witness_n: None };
        }
        match first_witness(q, |n| n.abs() == 1) {
            Some(n) => CharValue { value: kronecker(0, n), witness_n: Some(n) },
            None => CharValue { value: 0, witness_n: None },
        }
    }
}

/// Nonzero values Q(x,y) in order of increasing max(|x|,|y|).
pub fn represented_values(q: &QForm, max_norm: i64) -> impl Iterator<Item = i64> + '_ {
    (1..=max_norm).flat_map(move |r| {
        (-r..=r)
            .flat_map(move |x| (-r..=r).map(move |y| (x, y)))
            .filter(move |&(x, y)| x.abs().max(y.abs()) == r)
            .filter_map(move |(x, y)| {
                let n = q.eval_int(x, y);
                (n != 0).then(|| i64::try_from(n).ok()).flatten()
            })
    })
}

fn first_witness(q: &QForm, accept: impl Fn(i64) -> bool) -> Option<i64> {
    represented_values(q, WITNESS_BOX).find(|&n| accept(n))
}

/// All witnesses n with |x|,|y| ≤ r and gcd(n,d) = 1, for independence checks.
pub fn witnesses(q: &QForm, d: i64, r: i64) -> Vec<i64> {
    represented_values(q, r).filter(|n| n.gcd(&d) == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::{class_representatives, GroupElement};

    #[test]
    fn examples() {
        let chi1 = GenusCharacter::new(1, 5).unwrap();
        assert_eq!(chi1.eval(&QForm::new(1, 1, -1)).unwrap(), 1);
        let chi5 = GenusCharacter::new(5, 5).unwrap();
        let v = chi5.eval_with_witness(&QForm::new(1, 1, -1)).unwrap();
        assert_eq!(v, CharValue { value: 1, witness_n: Some(1) });
        assert_eq!(chi5.eval(&QForm::new(-1, -1, 1)).unwrap(), 1);
        assert!(GenusCharacter::new(3, 12).is_err());
        assert!(GenusCharacter::new(5, 12).is_err());
    }

    #[test]
    fn imprimitive_and_zero_branch() {
        let chi = GenusCharacter::new(5, 20).unwrap();
        // [2,2,−2] represents 2 and (5/2) = −1.
        assert_eq!(chi.eval(&QForm::new(2, 2, -2)).unwrap(), -1);
        let chi0 = GenusCharacter::new(0, 0).unwrap();
        assert_eq!(chi0.eval(&QForm::new(1, 2, 1)).unwrap(), 1);
        assert_eq!(chi0.eval(&QForm::new(2, 4, 2)).unwrap(), 0);
    }

    #[test]
    fn genus_characters_split_classes() {
        // D = 40 has two classes; χ_5 takes both signs on them.
        let chi = GenusCharacter::new(5, 40).unwrap();
        let vals: Vec<i32> = class_representatives(40)
            .unwrap()
            .iter()
            .map(|q| chi.eval(q).unwrap())
            .collect();
        assert!(vals.contains(&1) && vals.contains(&-1), "{vals:?}");
    }

    #[test]
    fn class_invariance_and_witness_independence() {
        let words = [GroupElement::S, GroupElement::T, GroupElement::new(2, 1, 1, 1), GroupElement::new(3, -2, -1, 1)];
        for (d, disc) in [(5, 40), (8, 40), (13, 65), (5, 65), (12, 60), (5, 60)] {
            let chi = GenusCharacter::new(d, disc).unwrap();
            for q in class_representatives(disc).unwrap() {
                let v = chi.eval(&q).unwrap();
                for g in &words {
                    assert_eq!(chi.eval(&q.act(g).unwrap()).unwrap(), v);
                }
                if gcd(q.content(), d) == 1 {
                    for n in witnesses(&q, d, 6) {
                        assert_eq!(kronecker(d, n), v, "{q} witness {n}");
                    }
                }
            }
        }
    }
}
