//! Exact arithmetic in the Galois field GF(p^k).
//!
//! Elements are encoded as integers in `0..q`: the base-`p` digits of the
//! encoding are the coefficients of the representing polynomial, constant
//! term least significant. That bijection is relied on everywhere downstream
//! (phase-space point labels, basis indices, JSON exports), so it is fixed
//! here once.
//!
//! The reduction modulus is the monic irreducible polynomial of degree `k`
//! with the smallest integer encoding — deterministic and easy to reproduce,
//! with no dependence on external polynomial tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted by [`FiniteField::new`].
pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

/// Orders up to this bound get dense multiplication/inverse tables;
/// larger fields reduce polynomials on demand.
const TABLE_LIMIT: u64 = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field order {q} exceeds the cap {cap}")]
    OrderTooLarge { q: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("value {value} is not an element of a field of order {q}")]
    ValueOutOfRange { value: u32, q: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
}

/// GF(p^k) arithmetic context. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus as a coefficient list, constant term first; length k+1.
    modulus: Vec<u32>,
    /// Dense q*q multiplication table for small orders.
    mul_table: Option<Vec<u16>>,
    /// Multiplicative inverses, index 0 unused.
    inv_table: Option<Vec<u16>>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

/// Serializable description of a field: `{p, k, modulus}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl FiniteField {
    /// Build GF(p^k) with the default order cap.
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::with_cap(p, k, DEFAULT_ORDER_CAP)
    }

    /// Build GF(p^k), rejecting orders above `cap`.
    pub fn with_cap(p: u32, k: u32, cap: u64) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= cap)
            .ok_or(FieldError::OrderTooLarge {
                q: (p as u64).saturating_pow(k),
                cap,
            })?;
        let modulus = smallest_irreducible(p, k);
        let mut field = FiniteField {
            p,
            k,
            q: q as u32,
            modulus,
            mul_table: None,
            inv_table: None,
        };
        if q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    /// Build a field whose order is `q = p^k`, factoring `q` automatically.
    /// Rejects orders that are not prime powers.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, k) = factor_prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first (length `k + 1`, monic).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
        }
    }

    /// Wrap an encoding as an element of this field.
    pub fn element(&self, value: u32) -> Result<FieldElement<'_>, FieldError> {
        if value < self.q {
            Ok(FieldElement { value, field: self })
        } else {
            Err(FieldError::ValueOutOfRange {
                value,
                q: self.q,
            })
        }
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement<'_>> + '_ {
        (0..self.q).map(move |value| FieldElement { value, field: self })
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.q);
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if let Some(table) = &self.mul_table {
            return table[(a as usize) * (self.q as usize) + b as usize] as u32;
        }
        self.mul_slow(a, b)
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(table) = &self.inv_table {
            return Ok(table[a as usize] as u32);
        }
        // a^(q-2) = a^{-1} in the multiplicative group of order q-1.
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to the prime subfield:
    /// `tr(a) = a + a^p + a^{p²} + … + a^{p^{k-1}}`.
    ///
    /// The result encoding is always below `p`.
    pub fn absolute_trace(&self, a: u32) -> u32 {
        let mut acc = a;
        let mut tr = a;
        for _ in 1..self.k {
            acc = self.pow(acc, self.p as u64);
            tr = self.add(tr, acc);
        }
        debug_assert!(tr < self.p, "trace must lie in the prime subfield");
        tr
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let pa = digits(a, self.p, self.k as usize);
        let pb = digits(b, self.p, self.k as usize);
        let mut prod = vec![0u32; 2 * self.k as usize - 1];
        for (i, &ca) in pa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ca * cb) % self.p;
            }
        }
        poly_rem(&mut prod, &self.modulus, self.p);
        encode(&prod, self.p)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u16; q * q];
        for a in 0..self.q {
            for b in a..self.q {
                let m = self.mul_slow(a, b) as u16;
                mul[a as usize * q + b as usize] = m;
                mul[b as usize * q + a as usize] = m;
            }
        }
        let mut inv = vec![0u16; q];
        for a in 1..q {
            if inv[a] != 0 {
                continue;
            }
            let b = (1..q).find(|&b| mul[a * q + b] == 1).expect("unit exists");
            inv[a] = b as u16;
            inv[b] = a as u16;
        }
        self.mul_table = Some(mul);
        self.inv_table = Some(inv);
    }
}

/// An element tied to its field; cross-field operations are rejected.
#[derive(Debug, Clone, Copy)]
pub struct FieldElement<'f> {
    value: u32,
    field: &'f FiniteField,
}

impl<'f> FieldElement<'f> {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &'f FiniteField {
        self.field
    }

    fn same_field(&self, rhs: &Self) -> Result<(), FieldError> {
        if self.field == rhs.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(Self {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn sub(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(Self {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn mul(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(Self {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn div(self, rhs: Self) -> Result<Self, FieldError> {
        self.same_field(&rhs)?;
        Ok(Self {
            value: self.field.div(self.value, rhs.value)?,
            field: self.field,
        })
    }

    /// Absolute trace, returned as an element of the same field (its
    /// encoding lies in the prime subfield).
    pub fn absolute_trace(self) -> Self {
        Self {
            value: self.field.absolute_trace(self.value),
            field: self.field,
        }
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
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

/// Split `q` as `p^k` with `p` prime, if possible.
pub fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            return (rest == 1).then_some((p, k));
        }
        p += 1;
    }
    Some((q, 1)) // q itself is prime
}

fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// In-place remainder of `poly` by the monic `modulus`, coefficients mod `p`.
fn poly_rem(poly: &mut Vec<u32>, modulus: &[u32], p: u32) {
    let deg_m = modulus.len() - 1;
    while poly.len() > deg_m {
        let lead = *poly.last().unwrap();
        let top = poly.len() - 1;
        if lead != 0 {
            for (i, &mc) in modulus.iter().enumerate() {
                let idx = top - deg_m + i;
                poly[idx] = (poly[idx] + p - lead * mc % p) % p;
            }
        }
        poly.pop();
    }
    while poly.len() < deg_m {
        poly.push(0);
    }
}

/// True iff `f` (monic, constant-first coefficients over GF(p)) has no monic
/// divisor of degree between 1 and deg(f)/2. Trial division is plenty at the
/// orders this crate caps at.
fn poly_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for enc in 0..count {
            let mut g = digits_u64(enc, p, d);
            g.push(1); // monic
            let mut rem = f.to_vec();
            poly_rem_general(&mut rem, &g, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits_u64(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = (v % p as u64) as u32;
        v /= p as u64;
    }
    out
}

fn poly_rem_general(poly: &mut Vec<u32>, modulus: &[u32], p: u32) {
    let deg_m = modulus.len() - 1;
    while poly.len() > deg_m {
        let lead = *poly.last().unwrap();
        let top = poly.len() - 1;
        if lead != 0 {
            for (i, &mc) in modulus.iter().enumerate() {
                let idx = top - deg_m + i;
                poly[idx] = (poly[idx] + p - lead * mc % p) % p;
            }
        }
        poly.pop();
    }
}

/// Monic irreducible of degree `k` over GF(p) with the smallest integer
/// encoding of its non-leading coefficients. For `k = 1` this is `x` itself.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(k);
    for enc in 0..count {
        let mut f = digits_u64(enc, p, k as usize);
        f.push(1);
        if poly_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: multiply two elements as polynomials and reduce,
    /// using naive schoolbook arithmetic written separately from the
    /// implementation path.
    fn oracle_mul(p: u32, k: usize, modulus: &[u32], a: u32, b: u32) -> u32 {
        let da = digits(a, p, k);
        let db = digits(b, p, k);
        let mut prod = vec![0u32; 2 * k];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        // long division by the monic modulus
        for top in (k..2 * k).rev() {
            let c = prod[top];
            if c != 0 {
                prod[top] = 0;
                for (i, &mc) in modulus.iter().enumerate().take(k) {
                    let idx = top - k + i;
                    prod[idx] = (prod[idx] + p - c * mc % p) % p;
                }
            }
        }
        prod[..k]
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * p + c)
    }

    #[test]
    fn gf2_modulus_is_x() {
        let f = FiniteField::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn gf4_modulus_is_the_unique_irreducible_quadratic() {
        // Oracle: enumerate all four monic quadratics over GF(2) and test
        // irreducibility by root search; exactly one must survive.
        let mut irreducible = Vec::new();
        for c0 in 0..2u32 {
            for c1 in 0..2u32 {
                let has_root = (0..2u32).any(|x| (c0 + c1 * x + x * x) % 2 == 0);
                if !has_root {
                    irreducible.push(vec![c0, c1, 1]);
                }
            }
        }
        assert_eq!(irreducible, vec![vec![1, 1, 1]]); // x² + x + 1
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn six_is_rejected() {
        assert_eq!(FiniteField::new(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert!(FiniteField::of_order(6).is_err());
    }

    #[test]
    fn order_cap_enforced() {
        let err = FiniteField::new(2, 17).unwrap_err();
        assert!(matches!(err, FieldError::OrderTooLarge { .. }));
        assert!(FiniteField::with_cap(2, 17, 1 << 20).is_ok());
    }

    #[test]
    fn of_order_factors_prime_powers() {
        let f = FiniteField::of_order(27).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (3, 3));
        assert_eq!(factor_prime_power(49), Some((7, 2)));
        assert_eq!(factor_prime_power(12), None);
        assert_eq!(factor_prime_power(1), None);
    }

    #[test]
    fn characteristic_two_addition() {
        let f = FiniteField::new(2, 1).unwrap();
        assert_eq!(f.add(1, 1), 0);
    }

    #[test]
    fn gf3_multiplication() {
        let f = FiniteField::new(3, 1).unwrap();
        assert_eq!(f.mul(2, 2), 1); // 4 mod 3
    }

    #[test]
    fn gf4_x_times_x() {
        // x·x should reduce to x + 1 under x² + x + 1, i.e. 2·2 → 3.
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.mul(2, 2), oracle_mul(2, 2, f.modulus(), 2, 2));
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn trace_examples() {
        let f3 = FiniteField::new(3, 1).unwrap();
        assert_eq!(f3.absolute_trace(2), 2); // k = 1: trace is the identity

        let f4 = FiniteField::new(2, 2).unwrap();
        // Oracle for tr(x) = x + x²: evaluate directly with field ops.
        let x = 2u32;
        let direct = f4.add(x, f4.mul(x, x));
        assert_eq!(direct, 1);
        assert_eq!(f4.absolute_trace(x), 1);
        assert_eq!(f4.absolute_trace(0), 0);
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = FiniteField::of_order(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.mul(a, b), oracle_mul(f.characteristic(), f.degree() as usize, f.modulus(), a, b));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn trace_is_additive_and_nondegenerate() {
        for q in [4u32, 8, 9, 16, 25, 27] {
            let f = FiniteField::of_order(q).unwrap();
            let p = f.characteristic();
            for a in 0..q {
                assert!(f.absolute_trace(a) < p);
                for b in 0..q {
                    assert_eq!(
                        f.absolute_trace(f.add(a, b)),
                        (f.absolute_trace(a) + f.absolute_trace(b)) % p
                    );
                }
            }
            // a ↦ tr(λa) vanishes identically only at λ = 0
            for lambda in 1..q {
                assert!(
                    (0..q).any(|a| f.absolute_trace(f.mul(lambda, a)) != 0),
                    "trace form degenerate at λ = {lambda} in GF({q})"
                );
            }
        }
    }

    #[test]
    fn cross_field_operations_rejected() {
        let f2 = FiniteField::new(2, 1).unwrap();
        let f3 = FiniteField::new(3, 1).unwrap();
        let a = f2.element(1).unwrap();
        let b = f3.element(1).unwrap();
        assert_eq!(a.add(b).unwrap_err(), FieldError::FieldMismatch);
    }

    #[test]
    fn division_by_zero_rejected() {
        let f = FiniteField::new(5, 1).unwrap();
        assert_eq!(f.inv(0).unwrap_err(), FieldError::DivisionByZero);
        let a = f.element(3).unwrap();
        let zero = f.element(0).unwrap();
        assert_eq!(a.div(zero).unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn element_range_checked() {
        let f = FiniteField::new(3, 1).unwrap();
        assert!(f.element(2).is_ok());
        assert!(matches!(
            f.element(3).unwrap_err(),
            FieldError::ValueOutOfRange { value: 3, q: 3 }
        ));
    }

    #[test]
    fn on_demand_reduction_above_table_limit() {
        // GF(2^13) = 8192 > 4096 exercises the slow path.
        let f = FiniteField::new(2, 13).unwrap();
        assert!(f.mul_table.is_none());
        let a = 0b1010110101101u32;
        let b = 0b0110101011011u32;
        assert_eq!(f.mul(a, b), oracle_mul(2, 13, f.modulus(), a, b));
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    #[test]
    fn descriptor_round_trips_as_json() {
        let f = FiniteField::new(3, 2).unwrap();
        let json = serde_json::to_string(&f.descriptor()).unwrap();
        let back: FieldDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f.descriptor());
    }
}
