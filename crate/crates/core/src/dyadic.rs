//! Exact dyadic rationals `m·2^{−e}`, the substrate for fast Cauchy names on
//! the unit interval and for the metric evaluator.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use crate::names::{nat, pair_nat, unpair_nat, Nat};

/// `value = num · 2^{−exp}` in canonical form (odd numerator, or zero with
/// exponent zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn zero() -> Dyadic {
        Dyadic::from_int(0)
    }

    pub fn one() -> Dyadic {
        Dyadic::from_int(1)
    }

    /// `k · 2^{−e}`.
    pub fn ratio(k: i64, e: u32) -> Dyadic {
        Dyadic::new(BigInt::from(k), e)
    }

    /// `2^{−e}`.
    pub fn pow2_neg(e: u32) -> Dyadic {
        Dyadic::new(BigInt::from(1), e)
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && (&self.num % BigInt::from(2)).is_zero() {
            self.num /= BigInt::from(2);
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    fn with_exp(&self, e: u32) -> BigInt {
        debug_assert!(e >= self.exp);
        &self.num << (e - self.exp)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.max(other.exp);
        Dyadic::new(self.with_exp(e) + other.with_exp(e), e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.max(other.exp);
        Dyadic::new(self.with_exp(e) - other.with_exp(e), e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            num: -self.num.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// Midpoint `(self + other) / 2`.
    pub fn mid(&self, other: &Dyadic) -> Dyadic {
        let s = self.add(other);
        Dyadic::new(s.num, s.exp + 1)
    }

    /// Halve.
    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let n: f64 = self.num.to_string().parse().unwrap_or(f64::NAN);
        n / f64::powi(2.0, self.exp as i32)
    }

    /// Encode as a natural: `⟨zigzag(num), exp⟩`.
    pub fn code(&self) -> Nat {
        let zz: BigUint = match self.num.sign() {
            Sign::Minus => {
                let m = (-&self.num).to_biguint().unwrap();
                m * 2u32 - 1u32
            }
            _ => self.num.to_biguint().unwrap() * 2u32,
        };
        pair_nat(&zz, &nat(self.exp as u64))
    }

    pub fn from_code(code: &Nat) -> Option<Dyadic> {
        let (zz, exp) = unpair_nat(code);
        let exp = u32::try_from(crate::names::nat_to_u64(&exp)?).ok()?;
        let num = if (&zz % 2u32).is_zero() {
            BigInt::from_biguint(Sign::Plus, zz / 2u32)
        } else {
            -BigInt::from_biguint(Sign::Plus, (zz + 1u32) / 2u32)
        };
        Some(Dyadic::new(num, exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.with_exp(e).cmp(&other.with_exp(e))
    }
}

/// A closed dyadic interval, used by decoders to report points at finite
/// precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> DyadicInterval {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(d: Dyadic) -> DyadicInterval {
        DyadicInterval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.mid(&self.hi)
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let d = Dyadic::new(BigInt::from(4), 3);
        assert_eq!(d.numerator(), &BigInt::from(1));
        assert_eq!(d.exponent(), 1);
        assert_eq!(Dyadic::new(BigInt::from(0), 7), Dyadic::zero());
    }

    #[test]
    fn arithmetic() {
        let a = Dyadic::ratio(3, 2); // 3/4
        let b = Dyadic::ratio(1, 1); // 1/2
        assert_eq!(a.add(&b), Dyadic::ratio(5, 2));
        assert_eq!(a.sub(&b), Dyadic::ratio(1, 2));
        assert_eq!(a.mid(&b), Dyadic::ratio(5, 3));
        assert!(b < a);
    }

    #[test]
    fn code_roundtrip() {
        for k in -20i64..20 {
            for e in 0u32..6 {
                let d = Dyadic::ratio(k, e);
                assert_eq!(Dyadic::from_code(&d.code()), Some(d));
            }
        }
    }
}
