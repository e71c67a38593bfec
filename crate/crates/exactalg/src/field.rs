//! Field abstraction shared by the exact (ℚ) and modular (𝔽_p) elimination kernels.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rat;

pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; callers never pass zero.
    fn inv(&self) -> Self;
}

impl Field for Rat {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// The Mersenne prime 2^61 − 1.
pub const P61: u64 = (1u64 << 61) - 1;

/// Element of 𝔽_p for p = 2^61 − 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fp(pub u64);

impl Fp {
    pub fn new(x: u64) -> Self {
        Fp(x % P61)
    }

    pub fn from_i64(x: i64) -> Self {
        if x >= 0 {
            Fp::new(x as u64)
        } else {
            Fp::new(x.unsigned_abs()).neg()
        }
    }

    /// Reduce a rational; `None` when p divides the denominator.
    pub fn from_rat(r: &Rat) -> Option<Self> {
        let p = num_bigint::BigInt::from(P61);
        let num = reduce_big(r.numer(), &p);
        let den = reduce_big(r.denom(), &p);
        if den == 0 {
            return None;
        }
        Some(Fp(num).mul(&Fp(den).inv()))
    }

    fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

fn reduce_big(x: &num_bigint::BigInt, p: &num_bigint::BigInt) -> u64 {
    let r = x.mod_floor(p);
    debug_assert!(!r.is_negative());
    r.to_u64().expect("reduced value fits in u64")
}

impl Field for Fp {
    fn nil() -> Self {
        Fp(0)
    }
    fn unit() -> Self {
        Fp(1)
    }
    fn is_nil(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P61 { s - P61 } else { s })
    }
    fn sub(&self, o: &Self) -> Self {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P61 - o.0 })
    }
    fn mul(&self, o: &Self) -> Self {
        let prod = (self.0 as u128) * (o.0 as u128);
        let lo = (prod as u64) & P61;
        let hi = (prod >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= P61 { s - P61 } else { s })
    }
    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P61 - self.0 })
    }
    fn inv(&self) -> Self {
        debug_assert!(self.0 != 0);
        self.pow(P61 - 2)
    }
}
