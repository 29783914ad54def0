//! Exact arithmetic in GF(p^r) and Gaussian elimination over it.
//!
//! Elements are stored as a canonical integer in `[0, q)`. For prime fields
//! this is the residue itself; for extension fields it packs the polynomial
//! coefficients as base-`p` digits, lowest degree first. Multiplication goes
//! through log/antilog tables built from the primitive element at
//! construction time.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// A finite field GF(p^r) with a designated primitive element.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    q: u32,
    poly: Option<Vec<u32>>,
    alpha: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("q", &self.q)
            .field("poly", &self.poly)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.poly == other.poly
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds GF(p^r).
    ///
    /// `reduction_poly` lists coefficients from the constant term up and must
    /// have degree exactly `r`; it is normalized to be monic. When it is absent
    /// and `r > 1` the lexicographically smallest monic irreducible polynomial
    /// of degree `r` is used. The primitive element is the smallest canonical
    /// value whose multiplicative order is `q - 1`.
    pub fn new(p: u32, r: u32, reduction_poly: Option<&[u32]>) -> Result<Arc<Self>> {
        if r < 1 {
            return Err(Error::InvalidDegree(r));
        }
        if !is_prime(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        let q = (p as u64)
            .checked_pow(r)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge { p, r })? as u32;

        let poly = if r == 1 {
            if let Some(given) = reduction_poly {
                // a linear modulus is always irreducible, only the shape is checked
                normalize_poly(given, p, r)?;
            }
            None
        } else {
            let f = match reduction_poly {
                Some(given) => {
                    let f = normalize_poly(given, p, r)?;
                    if !is_irreducible(&f, p) {
                        return Err(Error::ReduciblePolynomial(given.to_vec()));
                    }
                    f
                }
                None => smallest_irreducible(p, r),
            };
            Some(f)
        };

        let naive = NaiveArith { p, r, poly: poly.as_deref() };
        let alpha = naive.find_primitive(q);

        let order = (q - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for k in 0..order {
            exp.push(acc);
            log[acc as usize] = k as u32;
            acc = naive.mul(acc, alpha);
        }
        debug_assert_eq!(acc, 1);

        Ok(Arc::new(FieldSpec { p, r, q, poly, alpha, exp, log }))
    }

    /// Prime field GF(p).
    pub fn prime(p: u32) -> Result<Arc<Self>> {
        Self::new(p, 1, None)
    }

    /// Field of order `q`, which must be a prime power. Uses the default
    /// reduction polynomial.
    pub fn of_order(q: u32) -> Result<Arc<Self>> {
        let (p, r) = prime_power(q).ok_or(Error::CompositeCharacteristic(q))?;
        Self::new(p, r, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic reduction polynomial, constant term first. `None` for prime fields.
    pub fn reduction_poly(&self) -> Option<&[u32]> {
        self.poly.as_deref()
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn element(self: &Arc<Self>, value: u32) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::ValueOutOfRange { value, q: self.q });
        }
        Ok(FieldElement { value, field: Arc::clone(self) })
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { value: 0, field: Arc::clone(self) }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement { value: 1, field: Arc::clone(self) }
    }

    pub fn primitive(self: &Arc<Self>) -> FieldElement {
        FieldElement { value: self.alpha, field: Arc::clone(self) }
    }

    /// All elements in canonical order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement { value, field: Arc::clone(self) })
    }

    // Raw arithmetic on canonical values. Callers guarantee values are < q.

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.r == 1 {
            (a + b) % self.p
        } else {
            self.digitwise(a, b, |x, y| (x + y) % self.p)
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.r == 1 {
            (self.p - a) % self.p
        } else {
            self.digitwise(a, 0, |x, _| (self.p - x) % self.p)
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let order = self.q - 1;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    /// `a^k`; negative exponents go through the inverse. `0^0 = 1`.
    pub fn pow(&self, a: u32, k: i64) -> Option<u32> {
        if a == 0 {
            return match k.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => Some(1),
                std::cmp::Ordering::Greater => Some(0),
            };
        }
        let order = (self.q - 1) as i64;
        let e = (self.log[a as usize] as i64 * k.rem_euclid(order)).rem_euclid(order);
        Some(self.exp[e as usize])
    }

    /// `alpha^k` with `k` reduced mod `q - 1`.
    pub fn alpha_pow(&self, k: u64) -> u32 {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    fn digitwise(&self, a: u32, b: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += op(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    /// Solves the square system `a * x = b` by row reduction, pivoting on the
    /// first nonzero entry at or below the diagonal.
    pub fn solve(&self, mut a: Vec<Vec<u32>>, mut b: Vec<u32>) -> Result<Vec<u32>> {
        let m = b.len();
        if a.len() != m || a.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch);
        }
        for col in 0..m {
            let Some(pivot) = (col..m).find(|&row| a[row][col] != 0) else {
                let rank = self.rank(a.clone());
                return Err(Error::Singular { rank, needed: m });
            };
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = self.inv(a[col][col]).expect("pivot is nonzero");
            for c in col..m {
                a[col][c] = self.mul(a[col][c], inv);
            }
            b[col] = self.mul(b[col], inv);
            for row in 0..m {
                let factor = a[row][col];
                if row == col || factor == 0 {
                    continue;
                }
                for c in col..m {
                    let t = self.mul(factor, a[col][c]);
                    a[row][c] = self.sub(a[row][c], t);
                }
                let t = self.mul(factor, b[col]);
                b[row] = self.sub(b[row], t);
            }
        }
        Ok(b)
    }

    /// Rank of an arbitrary (possibly non-square) matrix.
    pub fn rank(&self, mut rows: Vec<Vec<u32>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = self.inv(rows[rank][col]).expect("pivot is nonzero");
            for row in rank + 1..rows.len() {
                let factor = self.mul(rows[row][col], inv);
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let t = self.mul(factor, rows[rank][c]);
                    rows[row][c] = self.sub(rows[row][c], t);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// An element of a [`FieldSpec`].
#[derive(Clone)]
pub struct FieldElement {
    value: u32,
    field: Arc<FieldSpec>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@GF({})", self.value, self.field.q)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: u32) -> Self {
        FieldElement { value, field: Arc::clone(&self.field) }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        self.field.inv(self.value).map(|v| self.with(v)).ok_or(Error::ZeroInverse)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        self.field.pow(self.value, k).map(|v| self.with(v)).ok_or(Error::ZeroInverse)
    }
}

// Operator forms panic on mixed fields; use the `checked_*` methods when
// operands come from untrusted input.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch in add")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch in sub")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch in mul")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }
}

/// Solves `a * x = b` over the field shared by all entries.
pub fn gaussian_solve(a: &[Vec<FieldElement>], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let Some(field) = b.first().map(|e| Arc::clone(&e.field)) else {
        return if a.is_empty() { Ok(Vec::new()) } else { Err(Error::DimensionMismatch) };
    };
    let mut raw_a = Vec::with_capacity(a.len());
    for row in a {
        let mut raw = Vec::with_capacity(row.len());
        for e in row {
            if !same_field(&field, &e.field) {
                return Err(Error::FieldMismatch);
            }
            raw.push(e.value);
        }
        raw_a.push(raw);
    }
    let mut raw_b = Vec::with_capacity(b.len());
    for e in b {
        if !same_field(&field, &e.field) {
            return Err(Error::FieldMismatch);
        }
        raw_b.push(e.value);
    }
    let x = field.solve(raw_a, raw_b)?;
    Ok(x.into_iter().map(|value| FieldElement { value, field: Arc::clone(&field) }).collect())
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Decomposes `q = p^r` with `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut r) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

fn distinct_prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn normalize_poly(given: &[u32], p: u32, r: u32) -> Result<Vec<u32>> {
    let malformed = || Error::MalformedPolynomial(given.to_vec());
    let mut f: Vec<u32> = given.iter().map(|&c| c % p).collect();
    while f.last() == Some(&0) {
        f.pop();
    }
    if f.len() != r as usize + 1 || given.iter().any(|&c| c >= p) {
        return Err(malformed());
    }
    let lead = f[r as usize];
    if lead != 1 {
        let inv = (1..p).find(|&x| x * lead % p == 1).ok_or_else(malformed)?;
        for c in &mut f {
            *c = *c * inv % p;
        }
    }
    Ok(f)
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients mod `p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut rem = a.to_vec();
    while rem.len() > dm {
        let lead = rem.pop().unwrap();
        if lead != 0 {
            let shift = rem.len() - dm;
            for (k, &c) in m[..dm].iter().enumerate() {
                let idx = shift + k;
                rem[idx] = (rem[idx] + (p - lead) * c % p) % p;
            }
        }
    }
    rem
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let r = f.len() - 1;
    for d in 1..=r / 2 {
        for lower in 0..p.pow(d as u32) {
            let mut g = digits(lower, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    (0..p.pow(r))
        .map(|lower| {
            let mut f = digits(lower, p, r);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn digits(mut v: u32, p: u32, len: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Schoolbook multiply-and-reduce, used only to seed the log tables.
struct NaiveArith<'a> {
    p: u32,
    r: u32,
    poly: Option<&'a [u32]>,
}

impl NaiveArith<'_> {
    fn mul(&self, a: u32, b: u32) -> u32 {
        let Some(poly) = self.poly else {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        };
        let (da, db) = (digits(a, self.p, self.r), digits(b, self.p, self.r));
        let mut prod = vec![0u32; 2 * self.r as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        undigits(&poly_rem(&prod, poly, self.p), self.p)
    }

    fn pow(&self, mut base: u32, mut k: u32) -> u32 {
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn find_primitive(&self, q: u32) -> u32 {
        let order = q - 1;
        let factors = distinct_prime_factors(order);
        (1..q)
            .find(|&g| factors.iter().all(|&f| self.pow(g, order / f) != 1))
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &Arc<FieldSpec>, v: u32) -> FieldElement {
        f.element(v).unwrap()
    }

    #[test]
    fn gf5_primitive_is_two() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(f.order(), 5);
        assert_eq!(f.alpha(), 2);
        let powers: Vec<u32> = (1..=4).map(|k| f.alpha_pow(k)).collect();
        assert_eq!(powers, vec![2, 4, 3, 1]);
    }

    #[test]
    fn gf2_primitive_is_one() {
        let f = FieldSpec::prime(2).unwrap();
        assert_eq!(f.alpha(), 1);
    }

    #[test]
    fn gf8_with_explicit_poly() {
        let f = FieldSpec::new(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        assert_eq!(f.order(), 8);
        assert_eq!(f.mul(0b010, 0b111), 0b101);
    }

    #[test]
    fn default_polys_are_smallest_irreducible() {
        assert_eq!(FieldSpec::of_order(8).unwrap().reduction_poly(), Some(&[1, 1, 0, 1][..]));
        assert_eq!(FieldSpec::of_order(16).unwrap().reduction_poly(), Some(&[1, 1, 0, 0, 1][..]));
        assert_eq!(FieldSpec::of_order(4).unwrap().reduction_poly(), Some(&[1, 1, 1][..]));
        // x^2 + 1 has no roots mod 3
        assert_eq!(FieldSpec::of_order(9).unwrap().reduction_poly(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(4, 1, None).unwrap_err(), Error::CompositeCharacteristic(4));
        assert_eq!(FieldSpec::new(2, 0, None).unwrap_err(), Error::InvalidDegree(0));
        assert!(matches!(
            FieldSpec::new(2, 3, Some(&[1, 0, 0, 1])),
            Err(Error::ReduciblePolynomial(_))
        ));
        assert!(matches!(
            FieldSpec::new(2, 3, Some(&[1, 1, 1])),
            Err(Error::MalformedPolynomial(_))
        ));
        assert!(matches!(FieldSpec::new(2, 17, None), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn non_monic_poly_is_normalized() {
        // 2x^2 + 2x + 2 over GF(3) is 2 * (x^2 + x + 1), which is reducible (root 1)
        assert!(FieldSpec::new(3, 2, Some(&[2, 2, 2])).is_err());
        // 2x^2 + 2 = 2 (x^2 + 1), irreducible over GF(3)
        let f = FieldSpec::new(3, 2, Some(&[2, 0, 2])).unwrap();
        assert_eq!(f.reduction_poly(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn small_arithmetic() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(el(&f5, 2).checked_mul(&el(&f5, 3)).unwrap(), el(&f5, 1));
        assert_eq!(el(&f5, 2).inv().unwrap(), el(&f5, 3));
        assert_eq!(el(&f5, 2).pow(4).unwrap(), el(&f5, 1));
        assert_eq!(el(&f5, 2).pow(-1).unwrap(), el(&f5, 3));
        assert_eq!(el(&f5, 0).inv().unwrap_err(), Error::ZeroInverse);
        assert_eq!(el(&f5, 0).pow(-2).unwrap_err(), Error::ZeroInverse);
        assert_eq!(el(&f5, 0).pow(0).unwrap(), el(&f5, 1));

        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(el(&f7, 3).inv().unwrap(), el(&f7, 5));
    }

    #[test]
    fn mixing_fields_is_rejected() {
        let f5 = FieldSpec::prime(5).unwrap();
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(el(&f5, 1).checked_add(&el(&f7, 1)).unwrap_err(), Error::FieldMismatch);
        assert_eq!(el(&f5, 1).checked_mul(&el(&f7, 1)).unwrap_err(), Error::FieldMismatch);
        // structurally equal fields built separately do mix
        let other5 = FieldSpec::prime(5).unwrap();
        assert!(el(&f5, 1).checked_add(&el(&other5, 1)).is_ok());
    }

    #[test]
    fn element_range_checked() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(f.element(5).unwrap_err(), Error::ValueOutOfRange { value: 5, q: 5 });
    }

    #[test]
    fn solve_examples() {
        let f = FieldSpec::prime(5).unwrap();
        let a = vec![vec![el(&f, 1), el(&f, 1)], vec![el(&f, 1), el(&f, 2)]];
        let b = vec![el(&f, 0), el(&f, 1)];
        let x = gaussian_solve(&a, &b).unwrap();
        assert_eq!(x, vec![el(&f, 4), el(&f, 1)]);

        let singular = vec![vec![el(&f, 1), el(&f, 1)], vec![el(&f, 2), el(&f, 2)]];
        assert_eq!(
            gaussian_solve(&singular, &b).unwrap_err(),
            Error::Singular { rank: 1, needed: 2 }
        );

        let id = vec![vec![el(&f, 1), el(&f, 0)], vec![el(&f, 0), el(&f, 1)]];
        let rhs = vec![el(&f, 3), el(&f, 2)];
        assert_eq!(gaussian_solve(&id, &rhs).unwrap(), rhs);

        assert_eq!(gaussian_solve(&[], &[]).unwrap(), vec![]);
        assert_eq!(
            gaussian_solve(&[vec![el(&f, 1)]], &[el(&f, 1), el(&f, 1)]).unwrap_err(),
            Error::DimensionMismatch
        );
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(11), Some((11, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
