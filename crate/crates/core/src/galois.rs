//! Arithmetic in a prime field `F_q` and its degree-`m` extension `F_{q^m}`.
//!
//! Elements of `F_{q^m}` are stored packed as their index in the polynomial
//! basis enumeration order: the element `c_0 + c_1 z + ... + c_{m-1} z^{m-1}`
//! has index `c_0 + c_1 q + ... + c_{m-1} q^{m-1}`. Base-field constants are
//! therefore exactly the indices below `q`.
//!
//! Products are defined by polynomial multiplication modulo the field's
//! modulus. Fields with at most 2^16 elements additionally build exp/log
//! tables from the primitive element; results are identical either way.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 16;

const TABLE_LIMIT: u64 = 1 << 16;

/// An element of some `F_{q^m}`, packed as its polynomial-basis index.
///
/// A `FieldElement` carries no reference to its field; arithmetic goes
/// through the owning [`ExtField`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// User-facing description of a field, as it appears in scenario configs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub q: u64,
    pub m: usize,
    /// Coefficients `[c_0, ..., c_m]`, lowest degree first, monic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

#[derive(Clone)]
struct LogTables {
    exp: Vec<u64>,
    log: Vec<u32>,
}

/// The tower `F_q ⊂ F_{q^m}` with Frobenius `σ(a) = a^q`.
#[derive(Clone)]
pub struct ExtField {
    q: u64,
    m: usize,
    modulus: Vec<u64>,
    size: u64,
    gamma: FieldElement,
    tables: Option<LogTables>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("q", &self.q)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

/// Pinned moduli for the small fields used throughout the tests.
const MODULUS_TABLE: &[(u64, usize, &[u64])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
];

impl ExtField {
    /// Builds `F_{q^m} = F_q[z]/(modulus)`. The modulus is checked for
    /// irreducibility by trial division.
    pub fn new(q: u64, m: usize, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidField(format!(
                "q = {q} must be prime (prime-power base fields are not supported)"
            )));
        }
        if q >= 1 << 31 {
            return Err(Error::InvalidField(format!("q = {q} is too large")));
        }
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::InvalidField(format!(
                "extension degree m = {m} must lie in [1, {MAX_DEGREE}]"
            )));
        }
        let size = checked_pow(q, m as u32)
            .filter(|&s| s < 1 << 62)
            .ok_or_else(|| Error::InvalidField(format!("q^m = {q}^{m} is too large")))?;
        if modulus.len() != m + 1 {
            return Err(Error::InvalidField(format!(
                "modulus must have m + 1 = {} coefficients, got {}",
                m + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= q) {
            return Err(Error::InvalidField(format!(
                "modulus coefficients must lie in [0, {}]",
                q - 1
            )));
        }
        if modulus[m] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !fp_poly::is_irreducible(&modulus, q) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:?} is reducible over F_{q}"
            )));
        }
        let mut field = ExtField {
            q,
            m,
            modulus,
            size,
            gamma: FieldElement::ONE,
            tables: None,
        };
        field.gamma = field.find_primitive();
        if size <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// Uses the pinned modulus for `(q, m)` when one exists, otherwise the
    /// monic irreducible polynomial of smallest index.
    pub fn with_default_modulus(q: u64, m: usize) -> Result<Self> {
        let modulus = default_modulus(q, m)?;
        Self::new(q, m, modulus)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        match &spec.modulus {
            Some(modulus) => Self::new(spec.q, spec.m, modulus.clone()),
            None => Self::with_default_modulus(spec.q, spec.m),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            q: self.q,
            m: self.m,
            modulus: Some(self.modulus.clone()),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements, `q^m`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// The primitive element: smallest index of multiplicative order `q^m - 1`.
    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    /// The polynomial-basis generator `z` (equal to `1` when `m = 1`).
    pub fn basis_generator(&self) -> FieldElement {
        if self.m == 1 {
            FieldElement::ONE
        } else {
            FieldElement(self.q)
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index < self.size {
            Ok(FieldElement(index))
        } else {
            Err(Error::IndexOutOfRange(format!(
                "element index {index} >= field size {}",
                self.size
            )))
        }
    }

    /// Embeds a base-field value `c mod q`.
    pub fn from_base(&self, c: u64) -> FieldElement {
        FieldElement(c % self.q)
    }

    /// Returns the base-field value if `x ∈ F_q`.
    pub fn base_value(&self, x: FieldElement) -> Option<u64> {
        (x.0 < self.q).then_some(x.0)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement> {
        if coords.len() > self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                got: coords.len(),
            });
        }
        if coords.iter().any(|&c| c >= self.q) {
            return Err(Error::InvalidField(format!(
                "coordinates must lie in [0, {}]",
                self.q - 1
            )));
        }
        let mut c = [0u64; MAX_DEGREE];
        c[..coords.len()].copy_from_slice(coords);
        Ok(self.pack(&c))
    }

    pub fn coords(&self, x: FieldElement) -> Vec<u64> {
        self.unpack(x)[..self.m].to_vec()
    }

    /// Plain-text rendering of the coordinate tuple, e.g. `(3 0 1)`.
    pub fn display(&self, x: FieldElement) -> String {
        let parts: Vec<String> = self.coords(x).iter().map(u64::to_string).collect();
        format!("({})", parts.join(" "))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size).map(FieldElement)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.size))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.size))
    }

    fn unpack(&self, x: FieldElement) -> [u64; MAX_DEGREE] {
        let mut out = [0u64; MAX_DEGREE];
        let mut v = x.0;
        for c in out.iter_mut().take(self.m) {
            *c = v % self.q;
            v /= self.q;
        }
        out
    }

    fn pack(&self, c: &[u64]) -> FieldElement {
        let mut v = 0u64;
        for i in (0..self.m).rev() {
            v = v * self.q + c[i];
        }
        FieldElement(v)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement((a.0 + b.0) % self.q);
        }
        let (x, y) = (self.unpack(a), self.unpack(b));
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.m {
            c[i] = (x[i] + y[i]) % self.q;
        }
        self.pack(&c)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement((self.q - a.0) % self.q);
        }
        let x = self.unpack(a);
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.m {
            c[i] = (self.q - x[i]) % self.q;
        }
        self.pack(&c)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            let idx = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return FieldElement(t.exp[idx]);
        }
        self.mul_poly(a, b)
    }

    /// Product by polynomial multiplication modulo the modulus. This is the
    /// defining semantics; [`ExtField::mul`] may shortcut through tables.
    pub fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let q = self.q;
        let m = self.m;
        if m == 1 {
            return FieldElement(a.0 * b.0 % q);
        }
        let (x, y) = (self.unpack(a), self.unpack(b));
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % q;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for t in 0..m {
                let sub = lead * self.modulus[t] % q;
                prod[d - m + t] = (prod[d - m + t] + q - sub) % q;
            }
        }
        self.pack(&prod)
    }

    pub fn pow(&self, mut base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn try_inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.tables {
            let order = (self.size - 1) as usize;
            let l = t.log[a.0 as usize] as usize;
            return Some(FieldElement(t.exp[(order - l) % order]));
        }
        Some(self.pow(a, self.size - 2))
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics on zero.
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        self.try_inv(a).expect("inverse of zero")
    }

    /// `a / b`; panics when `b` is zero.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b))
    }

    /// `σ^t(x) = x^(q^t)`.
    pub fn frobenius(&self, x: FieldElement, t: usize) -> FieldElement {
        let mut y = x;
        for _ in 0..(t % self.m) {
            y = self.pow(y, self.q);
        }
        y
    }

    /// `N_i(x) = σ^{i-1}(x) ⋯ σ(x) x`, via `N_0 = 1`, `N_{i+1} = σ(N_i) x`.
    pub fn truncated_norm(&self, x: FieldElement, i: usize) -> FieldElement {
        let mut n = FieldElement::ONE;
        for _ in 0..i {
            n = self.mul(self.frobenius(n, 1), x);
        }
        n
    }

    /// `[N_0(x), ..., N_{count-1}(x)]`.
    pub fn truncated_norms(&self, x: FieldElement, count: usize) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(count);
        let mut n = FieldElement::ONE;
        for _ in 0..count {
            out.push(n);
            n = self.mul(self.frobenius(n, 1), x);
        }
        out
    }

    /// Field norm `x^((q^m - 1)/(q - 1))`, an element of `F_q`.
    pub fn field_norm(&self, x: FieldElement) -> FieldElement {
        self.truncated_norm(x, self.m)
    }

    /// Nonzero elements are σ-conjugate iff their norms agree.
    pub fn are_conjugate(&self, a: FieldElement, b: FieldElement) -> bool {
        !a.is_zero() && !b.is_zero() && self.field_norm(a) == self.field_norm(b)
    }

    /// `(γ^0, ..., γ^{g-1})`, one representative from each of `g` distinct
    /// conjugacy classes.
    pub fn conjugacy_representatives(&self, g: usize) -> Result<Vec<FieldElement>> {
        if g == 0 || g as u64 > self.q - 1 {
            return Err(Error::Constraint(format!(
                "1 <= g <= q - 1 violated: g = {g}, q - 1 = {}",
                self.q - 1
            )));
        }
        let reps: Vec<FieldElement> = (0..g as u64).map(|i| self.pow(self.gamma, i)).collect();
        let mut norms: Vec<FieldElement> = reps.iter().map(|&a| self.field_norm(a)).collect();
        norms.sort();
        norms.dedup();
        if norms.len() != g {
            return Err(Error::Invariant(
                "conjugacy representatives share a norm".into(),
            ));
        }
        Ok(reps)
    }

    fn find_primitive(&self) -> FieldElement {
        let order = self.size - 1;
        let factors = prime_factors(order);
        (1..self.size)
            .map(FieldElement)
            .find(|&x| {
                factors
                    .iter()
                    .all(|&p| self.pow_poly(x, order / p) != FieldElement::ONE)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn pow_poly(&self, mut base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            exp >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> LogTables {
        let order = (self.size - 1) as usize;
        let mut exp = vec![0u64; 2 * order.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut x = FieldElement::ONE;
        for (i, slot) in exp.iter_mut().enumerate().take(order) {
            *slot = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, self.gamma);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        LogTables { exp, log }
    }
}

/// Pinned modulus for `(q, m)`, falling back to a deterministic search.
pub fn default_modulus(q: u64, m: usize) -> Result<Vec<u64>> {
    if m == 1 {
        return Ok(vec![0, 1]);
    }
    if let Some((_, _, coeffs)) = MODULUS_TABLE.iter().find(|(tq, tm, _)| *tq == q && *tm == m) {
        return Ok(coeffs.to_vec());
    }
    if !is_prime(q) {
        return Err(Error::InvalidField(format!("q = {q} must be prime")));
    }
    let lower = checked_pow(q, m as u32)
        .ok_or_else(|| Error::InvalidField(format!("q^m = {q}^{m} is too large")))?;
    (0..lower)
        .map(|idx| {
            let mut coeffs = Vec::with_capacity(m + 1);
            let mut v = idx;
            for _ in 0..m {
                coeffs.push(v % q);
                v /= q;
            }
            coeffs.push(1);
            coeffs
        })
        .find(|c| fp_poly::is_irreducible(c, q))
        .ok_or_else(|| Error::InvalidField(format!("no irreducible of degree {m} over F_{q}")))
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

/// Dense polynomials over the prime field, lowest degree first.
mod fp_poly {
    fn trim(p: &mut Vec<u64>) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `d`.
    fn rem_monic(a: &[u64], d: &[u64], q: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dd = d.len() - 1;
        while r.len() > dd {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dd;
            for (t, &dc) in d.iter().enumerate() {
                r[shift + t] = (r[shift + t] + q - lead * dc % q) % q;
            }
            trim(&mut r);
        }
        r
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub(super) fn is_irreducible(p: &[u64], q: u64) -> bool {
        let deg = p.len() - 1;
        if deg <= 1 {
            return deg == 1;
        }
        for d in 1..=deg / 2 {
            let count = q.pow(d as u32);
            for idx in 0..count {
                let mut div = Vec::with_capacity(d + 1);
                let mut v = idx;
                for _ in 0..d {
                    div.push(v % q);
                    v /= q;
                }
                div.push(1);
                if rem_monic(p, &div, q).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> ExtField {
        ExtField::new(2, 2, vec![1, 1, 1]).unwrap()
    }

    fn f25() -> ExtField {
        ExtField::new(5, 2, vec![2, 0, 1]).unwrap()
    }

    #[test]
    fn frobenius_fixes_zero_and_one() {
        let f = f25();
        for t in 0..5 {
            assert_eq!(f.frobenius(f.zero(), t), f.zero());
            assert_eq!(f.frobenius(f.one(), t), f.one());
        }
    }

    #[test]
    fn frobenius_of_z_in_f4() {
        let f = f4();
        let z = f.basis_generator();
        let z_plus_1 = f.from_coords(&[1, 1]).unwrap();
        assert_eq!(f.frobenius(z, 1), z_plus_1);
    }

    #[test]
    fn truncated_norm_small_cases() {
        let f = f4();
        let z = f.basis_generator();
        for x in f.elements() {
            assert_eq!(f.truncated_norm(x, 0), f.one());
            assert_eq!(f.truncated_norm(x, 1), x);
        }
        assert_eq!(f.truncated_norm(z, 2), f.one());
    }

    #[test]
    fn field_norm_of_z_in_f25() {
        let f = f25();
        let z = f.basis_generator();
        // z^2 = -2 = 3, so z^6 = 27 = 2: a base-field element.
        let expected = f.pow(z, 6);
        assert_eq!(f.coords(expected), vec![2, 0]);
        assert_eq!(f.field_norm(z), expected);
        assert_eq!(f.field_norm(f.zero()), f.zero());
        assert_eq!(f.field_norm(f.one()), f.one());
    }

    #[test]
    fn representatives_have_distinct_norms() {
        let f = f25();
        assert_eq!(f.conjugacy_representatives(1).unwrap(), vec![f.one()]);
        let reps = f.conjugacy_representatives(4).unwrap();
        let mut norms: Vec<_> = reps.iter().map(|&a| f.field_norm(a)).collect();
        norms.sort();
        norms.dedup();
        assert_eq!(norms.len(), 4);
        assert!(matches!(
            f.conjugacy_representatives(5),
            Err(Error::Constraint(_))
        ));
        assert!(f.conjugacy_representatives(0).is_err());
    }

    #[test]
    fn rejects_reducible_modulus() {
        // z^2 + 1 = (z + 2)(z + 3) over F_5.
        assert!(matches!(
            ExtField::new(5, 2, vec![1, 0, 1]),
            Err(Error::InvalidField(_))
        ));
        assert!(ExtField::new(4, 2, vec![1, 1, 1]).is_err());
        assert!(ExtField::new(5, 2, vec![2, 0, 2]).is_err());
    }

    #[test]
    fn pinned_moduli_are_irreducible() {
        for &(q, m, coeffs) in MODULUS_TABLE {
            assert!(fp_poly::is_irreducible(coeffs, q), "({q},{m})");
            ExtField::new(q, m, coeffs.to_vec()).unwrap();
        }
    }

    #[test]
    fn default_modulus_search_is_deterministic() {
        let a = default_modulus(17, 4).unwrap();
        let b = default_modulus(17, 4).unwrap();
        assert_eq!(a, b);
        assert!(fp_poly::is_irreducible(&a, 17));
    }

    #[test]
    fn gamma_is_primitive() {
        for (q, m) in [(2, 3), (3, 2), (5, 2), (7, 1), (5, 3)] {
            let f = ExtField::with_default_modulus(q, m).unwrap();
            let order = f.size() - 1;
            let mut x = f.gamma();
            let mut k = 1;
            while x != f.one() {
                x = f.mul(x, f.gamma());
                k += 1;
            }
            assert_eq!(k, order, "q={q} m={m}");
        }
    }

    #[test]
    fn table_and_polynomial_products_agree() {
        let f = ExtField::with_default_modulus(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul_poly(a, b));
            }
        }
    }

    #[test]
    fn base_field_embedding() {
        let f = ExtField::with_default_modulus(7, 2).unwrap();
        assert_eq!(f.base_value(f.from_base(9)), Some(2));
        assert_eq!(f.base_value(f.basis_generator()), None);
        assert_eq!(f.display(f.basis_generator()), "(0 1)");
    }
}
