//! Arithmetic in GF(2^m) for `1 <= m <= 16` and dense linear algebra over
//! it.
//!
//! Elements are stored as `u16` bit patterns of polynomials over GF(2).
//! Multiplication goes through log/exp tables built from a primitive element
//! found at construction time, so any irreducible modulus works, primitive
//! or not.

mod matrix;

pub use matrix::FieldMatrix;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Extension degree and modulus of a binary field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub m: u8,
    /// Bitmask of the reduction polynomial, including the `x^m` term.
    pub modulus: u32,
}

impl FieldSpec {
    /// GF(2^8) with the usual Reed-Solomon polynomial `x^8+x^4+x^3+x^2+1`.
    pub const GF256: FieldSpec = FieldSpec { m: 8, modulus: 0x11D };
    pub const GF2: FieldSpec = FieldSpec { m: 1, modulus: 0b11 };
    pub const GF16: FieldSpec = FieldSpec {
        m: 4,
        modulus: 0b1_0011,
    };

    pub fn order(&self) -> usize {
        1usize << self.m
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::GF256
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.m, self.modulus)
    }
}

fn degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of polynomial `a` modulo `b` over GF(2).
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// True when no polynomial of degree `1..=m/2` divides `modulus`.
pub fn is_irreducible(modulus: u32) -> bool {
    let m = degree(modulus);
    if m < 1 {
        return false;
    }
    for deg in 1..=(m / 2) {
        for low in 0..(1u32 << deg) {
            let candidate = (1u32 << deg) | low;
            if poly_rem(modulus, candidate) == 0 {
                return false;
            }
        }
    }
    true
}

/// Carry-less product of `a` and `b` reduced modulo `modulus` (degree `m`).
/// Slow; used to build tables and as an independent reference.
pub fn mul_reduce(a: Symbol, b: Symbol, m: u8, modulus: u32) -> Symbol {
    let mut acc: u32 = 0;
    let mut a = a as u32;
    let mut b = b as u32;
    let top = 1u32 << m;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc as Symbol
}

/// A concrete field with lookup tables. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    exp: Arc<[Symbol]>,
    log: Arc<[u32]>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Field").field(&self.spec).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        if !(1..=16).contains(&spec.m) {
            return Err(Error::input(format!("extension degree {} outside 1..=16", spec.m)));
        }
        if degree(spec.modulus) != spec.m as i32 {
            return Err(Error::input(format!(
                "modulus {:#x} does not have degree {}",
                spec.modulus, spec.m
            )));
        }
        if !is_irreducible(spec.modulus) {
            return Err(Error::input(format!("modulus {:#x} is reducible", spec.modulus)));
        }
        let q = spec.order();
        let group = q - 1;
        let generator = (1..q as u32)
            .map(|g| g as Symbol)
            .find(|&g| multiplicative_order(g, spec) == group)
            .expect("the multiplicative group of a finite field is cyclic");

        let mut exp = vec![0 as Symbol; 2 * group];
        let mut log = vec![0u32; q];
        let mut x: Symbol = 1;
        for (e, slot) in exp.iter_mut().enumerate().take(group) {
            *slot = x;
            log[x as usize] = e as u32;
            x = mul_reduce(x, generator, spec.m, spec.modulus);
        }
        for e in group..2 * group {
            exp[e] = exp[e - group];
        }
        Ok(Field {
            spec,
            exp: exp.into(),
            log: log.into(),
        })
    }

    pub fn gf256() -> Self {
        Field::new(FieldSpec::GF256).expect("0x11D is irreducible")
    }

    pub fn gf2() -> Self {
        Field::new(FieldSpec::GF2).expect("x+1 is irreducible")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.spec.order()
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) < self.order()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a == 0 {
            return Err(Error::DivisionByZero("field inverse"));
        }
        let group = (self.order() - 1) as u32;
        Ok(self.exp[((group - self.log[a as usize]) % group) as usize])
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Symbol, e: u64) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let group = (self.order() - 1) as u64;
        let idx = (self.log[a as usize] as u64 * (e % group)) % group;
        self.exp[idx as usize]
    }

    /// `acc[i] += c * src[i]`
    pub fn axpy(&self, acc: &mut [Symbol], c: Symbol, src: &[Symbol]) {
        if c == 0 {
            return;
        }
        for (a, &s) in acc.iter_mut().zip(src) {
            *a ^= self.mul(c, s);
        }
    }
}

fn multiplicative_order(g: Symbol, spec: FieldSpec) -> usize {
    let mut x = g;
    let mut order = 1;
    while x != 1 {
        x = mul_reduce(x, g, spec.m, spec.modulus);
        order += 1;
        if order > spec.order() {
            return 0;
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gf2_characteristic() {
        let f = Field::gf2();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.inv(1).unwrap(), 1);
    }

    #[test]
    fn brute_force_inverse_table_gf256() {
        let f = Field::gf256();
        for a in 1..=255u16 {
            let brute: Vec<u16> = (1..=255u16).filter(|&b| mul_reduce(a, b, 8, 0x11D) == 1).collect();
            assert_eq!(brute.len(), 1, "a={a}");
            assert_eq!(f.inv(a).unwrap(), brute[0]);
        }
        // the inverse of the generator x under 0x11D
        assert_eq!(f.inv(2).unwrap(), 142);
        assert_eq!(f.mul(2, 142), 1);
        assert_eq!(f.mul(2, 141), 7);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(Field::gf256().inv(0), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn group_order() {
        for spec in [FieldSpec::GF2, FieldSpec::GF16, FieldSpec::GF256] {
            let f = Field::new(spec).unwrap();
            let e = (spec.order() - 1) as u64;
            for a in 1..spec.order() as u16 {
                assert_eq!(f.pow(a, e), 1);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        // x^8 + 1 = (x + 1)^8
        assert!(Field::new(FieldSpec { m: 8, modulus: 0x101 }).is_err());
        assert!(Field::new(FieldSpec { m: 8, modulus: 0x1D }).is_err());
        assert!(Field::new(FieldSpec {
            m: 17,
            modulus: 0x2_0009
        })
        .is_err());
        // AES polynomial: irreducible but x is not primitive
        let aes = Field::new(FieldSpec { m: 8, modulus: 0x11B }).unwrap();
        assert_eq!(aes.mul(0x53, 0xCA), 1);
    }

    #[test]
    fn table_matches_carryless_product() {
        for spec in [FieldSpec::GF16, FieldSpec::GF256, FieldSpec { m: 8, modulus: 0x11B }] {
            let f = Field::new(spec).unwrap();
            for a in 0..spec.order() as u16 {
                for b in 0..spec.order() as u16 {
                    assert_eq!(f.mul(a, b), mul_reduce(a, b, spec.m, spec.modulus));
                }
            }
        }
    }

    #[test]
    fn sixteen_bit_field() {
        let f = Field::new(FieldSpec {
            m: 16,
            modulus: 0x1_100B,
        })
        .unwrap();
        let a = 0xBEEF;
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
        prop_oneof![Just(FieldSpec::GF2), Just(FieldSpec::GF16), Just(FieldSpec::GF256)]
    }

    proptest! {
        #[test]
        fn field_axioms(spec in spec_strategy(), a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
            let f = Field::new(spec).unwrap();
            let mask = (spec.order() - 1) as u16;
            let (a, b, c) = (a & mask, b & mask, c & mask);
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }
}
