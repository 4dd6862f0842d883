//! Arithmetic in the prime field GF(p). Entries are `u64` values in `[0, p)`;
//! `p` must fit in 31 bits so products fit in `u64` without overflow.

use crate::error::{Error, Result};

pub const DEFAULT_PRIME: u64 = 32003;
pub const DEFAULT_ORACLE_PRIME: u64 = 65521;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p >= (1 << 31) {
            return Err(Error::Invalid(format!(
                "field characteristic {} out of range [2, 2^31)",
                p
            )));
        }
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{} is not prime", p)));
        }
        Ok(PrimeField { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// Multiplicative inverse by extended Euclid. Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        s0.rem_euclid(self.p as i64) as u64
    }

    /// Reduce a signed integer coefficient into the field.
    #[inline]
    pub fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
