//! The skew polynomial ring `F_{q^m}[x; σ]` with `x a = σ(a) x`.
//!
//! Evaluation is remainder evaluation, `f(b) = Σ f_i N_i(b)`, so that a
//! coefficient row vector `f` times the σ-Vandermonde matrix of a locator
//! vector is the vector of evaluations.

use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::linalg::Matrix;

/// Degree of a skew polynomial; the zero polynomial has degree `-∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    /// True when the degree is strictly below `bound`.
    pub fn less_than(self, bound: usize) -> bool {
        match self {
            Degree::NegInfinity => true,
            Degree::Finite(d) => d < bound,
        }
    }
}

/// A skew polynomial in the monomial basis, coefficient `i` multiplying `x^i`.
/// Trailing zeros are trimmed; the zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SkewPoly {
    coeffs: Vec<FieldElement>,
}

impl SkewPoly {
    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c x^deg`
    pub fn monomial(c: FieldElement, deg: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::monomial(FieldElement::ONE, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Coefficients padded with zeros to length `len`.
    pub fn padded_coeffs(&self, len: usize) -> Vec<FieldElement> {
        (0..len.max(self.coeffs.len())).map(|i| self.coeff(i)).collect()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, field: &ExtField, other: &SkewPoly) -> SkewPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(
            (0..n)
                .map(|i| field.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, field: &ExtField, other: &SkewPoly) -> SkewPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(
            (0..n)
                .map(|i| field.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    /// Left scalar multiple `c · f`.
    pub fn scale_left(&self, field: &ExtField, c: FieldElement) -> SkewPoly {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(c, a)).collect())
    }

    /// Skew product `self · other`, using `x^i a = σ^i(a) x^i`.
    pub fn mul(&self, field: &ExtField, other: &SkewPoly) -> SkewPoly {
        if self.is_zero() || other.is_zero() {
            return SkewPoly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = field.mul(a, field.frobenius(b, i));
                out[i + j] = field.add(out[i + j], term);
            }
        }
        Self::from_coeffs(out)
    }

    /// Remainder evaluation `Σ f_i N_i(b)`.
    pub fn eval(&self, field: &ExtField, b: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut norm = FieldElement::ONE;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                norm = field.mul(field.frobenius(norm, 1), b);
            }
            acc = field.add(acc, field.mul(c, norm));
        }
        acc
    }

    pub fn eval_many(&self, field: &ExtField, points: &[FieldElement]) -> Vec<FieldElement> {
        points.iter().map(|&b| self.eval(field, b)).collect()
    }

    /// One line of coordinate tuples, lowest degree first.
    pub fn dump(&self, field: &ExtField) -> String {
        let cells: Vec<String> = self.coeffs.iter().map(|&c| field.display(c)).collect();
        cells.join(" ")
    }
}

/// The σ-Vandermonde matrix of a locator vector: entry `(i, j) = N_i(b_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaVandermonde {
    pub entries: Matrix,
    pub locators: Vec<FieldElement>,
}

/// Square σ-Vandermonde matrix `V^σ_n(b)` with `n = |b|`.
pub fn sigma_vandermonde(field: &ExtField, b: &[FieldElement]) -> SigmaVandermonde {
    sigma_vandermonde_rows(field, b, b.len())
}

/// `rows × |b|` σ-Vandermonde matrix (rows `N_0, ..., N_{rows-1}`).
pub fn sigma_vandermonde_rows(field: &ExtField, b: &[FieldElement], rows: usize) -> SigmaVandermonde {
    let mut entries = Matrix::zeros(rows, b.len());
    for (j, &bj) in b.iter().enumerate() {
        for (i, n) in field.truncated_norms(bj, rows).into_iter().enumerate() {
            entries[(i, j)] = n;
        }
    }
    SigmaVandermonde {
        entries,
        locators: b.to_vec(),
    }
}

/// `rk(V^σ_n(b)) = n`.
pub fn is_p_independent(field: &ExtField, b: &[FieldElement]) -> bool {
    sigma_vandermonde(field, b).entries.rank(field) == b.len()
}

/// Newton interpolation: the unique `f` with `deg f < |points|` and
/// `f(b_i) = v_i`. Builds the annihilator of the processed points
/// incrementally via `P ← (x - σ(P(b)) b P(b)^{-1}) · P`.
pub fn newton_interpolate(
    field: &ExtField,
    points: &[(FieldElement, FieldElement)],
) -> Result<SkewPoly> {
    let mut f = SkewPoly::zero();
    let mut annihilator = SkewPoly::one();
    for &(b, v) in points {
        let pb = annihilator.eval(field, b);
        if pb.is_zero() {
            return Err(Error::NotPIndependent);
        }
        let residual = field.sub(v, f.eval(field, b));
        if !residual.is_zero() {
            let c = field.div(residual, pb);
            f = f.add(field, &annihilator.scale_left(field, c));
        }
        let root = field.div(field.mul(field.frobenius(pb, 1), b), pb);
        let linear = SkewPoly::from_coeffs(vec![field.neg(root), FieldElement::ONE]);
        annihilator = linear.mul(field, &annihilator);
    }
    Ok(f)
}

/// Interpolation by solving `f · V^σ(b) = p`; the reference route that
/// [`newton_interpolate`] must agree with.
pub fn interpolate_by_elimination(
    field: &ExtField,
    points: &[(FieldElement, FieldElement)],
) -> Result<SkewPoly> {
    let b: Vec<FieldElement> = points.iter().map(|p| p.0).collect();
    let p: Vec<FieldElement> = points.iter().map(|p| p.1).collect();
    let v = sigma_vandermonde(field, &b);
    Ok(SkewPoly::from_coeffs(v.entries.solve_left(field, &p)?))
}

/// Skew Lagrange basis on `omega`: `ℓ_i(ω_j) = [i = j]`, each of degree `< |omega|`.
pub fn lagrange_basis(field: &ExtField, omega: &[FieldElement]) -> Result<Vec<SkewPoly>> {
    let k = omega.len();
    (0..k)
        .map(|i| {
            let points: Vec<_> = omega
                .iter()
                .enumerate()
                .map(|(j, &a)| (a, if i == j { FieldElement::ONE } else { FieldElement::ZERO }))
                .collect();
            newton_interpolate(field, &points)
        })
        .collect()
}

/// Coefficient matrix of a basis: row `i` holds the coefficients of `ℓ_i`.
pub fn coefficient_matrix(basis: &[SkewPoly], len: usize) -> Result<Matrix> {
    Matrix::from_rows(basis.iter().map(|p| p.padded_coeffs(len)).collect())
}

/// Monomial → evaluation representation: `p = f · V^σ_k(omega)`.
pub fn to_evaluations(
    field: &ExtField,
    f: &SkewPoly,
    omega: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    let k = omega.len();
    if !f.degree().less_than(k) {
        return Err(Error::DegreeOverflow {
            degree: f.coeffs().len() - 1,
            bound: k,
        });
    }
    let v = sigma_vandermonde(field, omega);
    if v.entries.rank(field) < k {
        return Err(Error::NotPIndependent);
    }
    v.entries.left_mul_vec(field, &f.padded_coeffs(k))
}

/// Evaluation → monomial representation: `f = p · V^σ_k(omega)^{-1}`.
pub fn from_evaluations(
    field: &ExtField,
    p: &[FieldElement],
    omega: &[FieldElement],
) -> Result<SkewPoly> {
    if p.len() != omega.len() {
        return Err(Error::LengthMismatch {
            expected: omega.len(),
            got: p.len(),
        });
    }
    let v = sigma_vandermonde(field, omega);
    Ok(SkewPoly::from_coeffs(v.entries.solve_left(field, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> ExtField {
        ExtField::new(2, 2, vec![1, 1, 1]).unwrap()
    }

    #[test]
    fn multiplicative_identity() {
        let f = ExtField::with_default_modulus(3, 2).unwrap();
        let p = SkewPoly::from_coeffs(vec![f.element(4).unwrap(), f.element(7).unwrap()]);
        assert_eq!(p.mul(&f, &SkewPoly::one()), p);
        assert_eq!(SkewPoly::one().mul(&f, &p), p);
    }

    #[test]
    fn commutation_rule() {
        let f = f4();
        let z = f.basis_generator();
        let lhs = SkewPoly::x().mul(&f, &SkewPoly::constant(z));
        let z1 = f.from_coords(&[1, 1]).unwrap();
        assert_eq!(lhs, SkewPoly::monomial(z1, 1));
    }

    #[test]
    fn non_commutativity_witness() {
        let f = f4();
        let z = f.basis_generator();
        let x = SkewPoly::x();
        let x_plus_z = SkewPoly::from_coeffs(vec![z, f.one()]);
        // (x + z) x = x^2 + z x
        let left = x_plus_z.mul(&f, &x);
        assert_eq!(left, SkewPoly::from_coeffs(vec![f.zero(), z, f.one()]));
        // x (x + σ^{-1}(z)) = x^2 + z x as well; σ^{-1} = σ on F_4.
        let sigma_inv_z = f.frobenius(z, 1);
        let right = x.mul(&f, &SkewPoly::from_coeffs(vec![sigma_inv_z, f.one()]));
        assert_eq!(left, right);
        // but x (x + z) differs.
        assert_ne!(x.mul(&f, &x_plus_z), left);
    }

    #[test]
    fn evaluation_basics() {
        let f = f4();
        let z = f.basis_generator();
        let c = f.from_coords(&[1, 1]).unwrap();
        assert_eq!(SkewPoly::constant(c).eval(&f, z), c);
        assert_eq!(SkewPoly::x().eval(&f, c), c);
        assert_eq!(SkewPoly::monomial(f.one(), 2).eval(&f, z), f.one());
    }

    #[test]
    fn degree_convention() {
        assert_eq!(SkewPoly::zero().degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(
            SkewPoly::from_coeffs(vec![FieldElement::ONE, FieldElement::ZERO]).degree(),
            Degree::Finite(0)
        );
    }

    #[test]
    fn vandermonde_row_zero_is_ones() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let v = sigma_vandermonde(&f, &[f.zero()]);
        assert_eq!(v.entries[(0, 0)], f.one());
        let b: Vec<_> = (3..7).map(|i| f.element(i).unwrap()).collect();
        let v = sigma_vandermonde(&f, &b);
        assert!(v.entries.row(0).iter().all(|&e| e == f.one()));
    }

    #[test]
    fn p_independence_trivial_cases() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let b0 = f.element(8).unwrap();
        assert!(!is_p_independent(&f, &[b0, b0]));
        assert!(is_p_independent(&f, &[b0]));
    }

    #[test]
    fn single_point_interpolation_is_constant() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let (b, v) = (f.element(13).unwrap(), f.element(21).unwrap());
        assert_eq!(newton_interpolate(&f, &[(b, v)]).unwrap(), SkewPoly::constant(v));
        let zeros = [(b, f.zero()), (f.element(3).unwrap(), f.zero())];
        assert!(newton_interpolate(&f, &zeros).unwrap().is_zero());
    }

    #[test]
    fn repeated_locator_is_rejected() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let b = f.element(13).unwrap();
        let pts = [(b, f.one()), (b, f.zero())];
        assert_eq!(newton_interpolate(&f, &pts), Err(Error::NotPIndependent));
        assert!(lagrange_basis(&f, &[b, b]).is_err());
    }

    #[test]
    fn lagrange_basis_of_one_point() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let basis = lagrange_basis(&f, &[f.element(9).unwrap()]).unwrap();
        assert_eq!(basis, vec![SkewPoly::one()]);
    }

    #[test]
    fn transform_trivial_cases() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let omega = [f.one(), f.gamma()];
        assert_eq!(
            to_evaluations(&f, &SkewPoly::zero(), &omega).unwrap(),
            vec![f.zero(); 2]
        );
        let c = f.element(17).unwrap();
        assert_eq!(
            to_evaluations(&f, &SkewPoly::constant(c), &omega).unwrap(),
            vec![c, c]
        );
        let too_big = SkewPoly::monomial(f.one(), 2);
        assert!(matches!(
            to_evaluations(&f, &too_big, &omega),
            Err(Error::DegreeOverflow { .. })
        ));
    }
}
