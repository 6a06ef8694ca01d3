use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field ℤ/pℤ for a prime `p < 2³¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    p: u32,
}

impl FieldSpec {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::param(format!("field modulus {p} is not a prime below 2^31")));
        }
        Ok(FieldSpec { p })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; `a` must be non-zero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1u32;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// The image of ±1 in the field.
    #[inline]
    pub fn sign(self, negative: bool) -> u32 {
        if negative {
            self.p - 1
        } else {
            1 % self.p
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec { p: 11 }
    }
}

impl TryFrom<u32> for FieldSpec {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        FieldSpec::new(p)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.p
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
