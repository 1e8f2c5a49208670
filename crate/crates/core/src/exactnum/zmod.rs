use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::ntheory::{inverse_mod, reduce};
use crate::error::{Error, Result};

/// A residue class modulo `modulus`, stored as its least nonnegative representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZMod {
    value: u64,
    modulus: u64,
}

impl ZMod {
    /// Reduces `value` into `[0, modulus)`.
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadModulus(modulus));
        }
        Ok(Self {
            value: reduce(value, modulus),
            modulus,
        })
    }

    /// Like [`ZMod::new`] for a modulus already known to be valid.
    pub(crate) fn wrap(value: i64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2);
        Self {
            value: reduce(value, modulus),
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::wrap(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Self::wrap(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// Signed representative in `(-N/2, N/2]`.
    pub fn signed(self) -> i64 {
        let v = self.value as i64;
        if 2 * self.value > self.modulus {
            v - self.modulus as i64
        } else {
            v
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_unit(self) -> bool {
        inverse_mod(self.value, self.modulus).is_some()
    }

    fn same_modulus(self, other: Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        Ok(Self {
            value: ((self.value as u128 + rhs.value as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.same_modulus(rhs)?;
        Ok(Self {
            value: ((self.value as u128 * rhs.value as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        })
    }

    /// Multiplicative inverse; fails with [`Error::NotAUnit`] when `gcd(value, N) != 1`.
    pub fn inv(self) -> Result<Self> {
        inverse_mod(self.value, self.modulus)
            .map(|v| Self {
                value: v,
                modulus: self.modulus,
            })
            .ok_or(Error::NotAUnit {
                value: self.value,
                modulus: self.modulus,
            })
    }

    /// `self · rhs⁻¹`, the meaning of a fraction `x/y` in modular formulas.
    pub fn div(self, rhs: Self) -> Result<Self> {
        self.checked_mul(rhs.inv()?)
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Integer multiple `k · self`.
    pub fn scale(self, k: i64) -> Self {
        self * Self::wrap(k, self.modulus)
    }
}

/// Modular inverse as a free function.
pub fn mod_inv(a: ZMod) -> Result<ZMod> {
    a.inv()
}

impl fmt::Display for ZMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

// Operator forms panic on a modulus mismatch; the `checked_*` methods report it.
impl Add for ZMod {
    type Output = ZMod;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("ZMod addition across moduli")
    }
}

impl Sub for ZMod {
    type Output = ZMod;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("ZMod subtraction across moduli")
    }
}

impl Mul for ZMod {
    type Output = ZMod;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("ZMod multiplication across moduli")
    }
}

impl Neg for ZMod {
    type Output = ZMod;
    fn neg(self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64, n: u64) -> ZMod {
        ZMod::new(v, n).unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inv(z(3, 8)).unwrap(), z(3, 8));
        assert_eq!(mod_inv(z(5, 8)).unwrap(), z(5, 8));
        assert_eq!(
            mod_inv(z(2, 8)),
            Err(Error::NotAUnit {
                value: 2,
                modulus: 8
            })
        );
        // brute-force oracle
        let brute = (0..7).find(|b| 3 * b % 7 == 1).unwrap();
        assert_eq!(mod_inv(z(3, 7)).unwrap().value(), brute);
        assert_eq!(brute, 5);
    }

    #[test]
    fn mixed_moduli_rejected() {
        assert_eq!(
            z(1, 8).checked_add(z(1, 4)),
            Err(Error::ModulusMismatch { left: 8, right: 4 })
        );
        assert!(z(1, 8).checked_mul(z(1, 4)).is_err());
    }

    #[test]
    fn negative_values_reduce() {
        assert_eq!(z(-1, 8).value(), 7);
        assert_eq!(z(-1, 8).signed(), -1);
        assert_eq!(z(4, 8).signed(), 4);
        assert!(ZMod::new(3, 1).is_err());
    }

    #[test]
    fn pow_and_div() {
        assert_eq!(z(3, 7).pow(6), z(1, 7));
        assert_eq!(z(6, 7).div(z(3, 7)).unwrap(), z(2, 7));
        assert!(z(1, 8).div(z(4, 8)).is_err());
    }
}
