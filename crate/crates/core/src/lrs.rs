//! Linearized Reed–Solomon codes: `c = f(b) ⊙ β` with locators
//! `b_μ = a_i · β_μ^{q-1}` built from conjugacy-class representatives `a_i`
//! and `F_q`-independent multiplier blocks `β_i`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::linalg::base_field_rank;
use crate::skew::{newton_interpolate, SkewPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrsParams {
    field: Arc<ExtField>,
    g: usize,
    r: usize,
    k: usize,
    a: Vec<FieldElement>,
    beta: Vec<FieldElement>,
    b: Vec<FieldElement>,
}

impl LrsParams {
    /// Deterministic setup: `a_i = γ^{i-1}` and `β_i = (1, z, ..., z^{r-1})`
    /// for every group.
    pub fn new(field: Arc<ExtField>, g: usize, r: usize, k: usize) -> Result<Self> {
        check_dimensions(&field, g, r, k)?;
        let z = field.basis_generator();
        let block: Vec<FieldElement> = (0..r).map(|j| field.pow(z, j as u64)).collect();
        let blocks = vec![block; g];
        Self::with_multipliers(field, g, r, k, blocks)
    }

    /// Setup with caller-chosen multiplier blocks, one per group.
    pub fn with_multipliers(
        field: Arc<ExtField>,
        g: usize,
        r: usize,
        k: usize,
        blocks: Vec<Vec<FieldElement>>,
    ) -> Result<Self> {
        check_dimensions(&field, g, r, k)?;
        if blocks.len() != g {
            return Err(Error::LengthMismatch {
                expected: g,
                got: blocks.len(),
            });
        }
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != r {
                return Err(Error::LengthMismatch {
                    expected: r,
                    got: block.len(),
                });
            }
            if base_field_rank(&field, block) != r {
                return Err(Error::Constraint(format!(
                    "multiplier block of group {} is not F_q-linearly independent",
                    i + 1
                )));
            }
        }
        let a = field.conjugacy_representatives(g)?;
        let beta: Vec<FieldElement> = blocks.into_iter().flatten().collect();
        let b = beta
            .iter()
            .enumerate()
            .map(|(mu, &bt)| locator(&field, a[mu / r], bt))
            .collect();
        Ok(LrsParams {
            field,
            g,
            r,
            k,
            a,
            beta,
            b,
        })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.g * self.r
    }

    pub fn a(&self) -> &[FieldElement] {
        &self.a
    }

    pub fn beta(&self) -> &[FieldElement] {
        &self.beta
    }

    pub fn locators(&self) -> &[FieldElement] {
        &self.b
    }

    /// Zero-based group of outer position `μ`.
    pub fn group_of(&self, mu: usize) -> usize {
        mu / self.r
    }

    /// `c_μ = f(b_μ) β_μ`.
    pub fn encode(&self, f: &SkewPoly) -> Result<Vec<FieldElement>> {
        check_degree(f, self.k)?;
        let field = &*self.field;
        Ok(self
            .b
            .iter()
            .zip(&self.beta)
            .map(|(&b, &bt)| field.mul(f.eval(field, b), bt))
            .collect())
    }

    /// Lexicographically smallest selection of `k` known positions with at
    /// most `r` per group.
    pub fn select_positions(&self, known: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = known.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut per_group = vec![0usize; self.g];
        let mut chosen = Vec::with_capacity(self.k);
        for mu in sorted {
            if mu >= self.n() {
                return Err(Error::IndexOutOfRange(format!("outer position {mu}")));
            }
            let i = self.group_of(mu);
            if per_group[i] < self.r && chosen.len() < self.k {
                per_group[i] += 1;
                chosen.push(mu);
            }
        }
        if chosen.len() < self.k {
            return Err(Error::Unrecoverable(format!(
                "only {} usable symbols, need k = {}",
                chosen.len(),
                self.k
            )));
        }
        Ok(chosen)
    }

    /// Recovers `f` from known `(position, value)` pairs.
    pub fn erasure_decode(&self, known: &[(usize, FieldElement)]) -> Result<SkewPoly> {
        let positions: Vec<usize> = known.iter().map(|p| p.0).collect();
        let chosen = self.select_positions(&positions)?;
        let field = &*self.field;
        let value_at = |mu: usize| known.iter().find(|p| p.0 == mu).map(|p| p.1).unwrap();
        let points: Vec<_> = chosen
            .iter()
            .map(|&mu| (self.b[mu], field.div(value_at(mu), self.beta[mu])))
            .collect();
        let f = newton_interpolate(field, &points)?;
        let reencoded = self.encode(&f)?;
        if known.iter().any(|&(mu, v)| reencoded[mu] != v) {
            return Err(Error::Unrecoverable(
                "known symbols are not consistent with a single codeword".into(),
            ));
        }
        Ok(f)
    }
}

/// `a · β^{q-1}`.
pub fn locator(field: &ExtField, a: FieldElement, beta: FieldElement) -> FieldElement {
    field.mul(a, field.pow(beta, field.q() - 1))
}

pub(crate) fn check_degree(f: &SkewPoly, k: usize) -> Result<()> {
    if f.degree().less_than(k) {
        Ok(())
    } else {
        Err(Error::DegreeOverflow {
            degree: f.coeffs().len() - 1,
            bound: k,
        })
    }
}

fn check_dimensions(field: &ExtField, g: usize, r: usize, k: usize) -> Result<()> {
    if g == 0 || g as u64 > field.q() - 1 {
        return Err(Error::Constraint(format!(
            "1 <= g <= q - 1 violated: g = {g}, q = {}",
            field.q()
        )));
    }
    if r == 0 || r > field.m() {
        return Err(Error::Constraint(format!(
            "1 <= r <= m violated: r = {r}, m = {}",
            field.m()
        )));
    }
    if k == 0 || k > r * g {
        return Err(Error::Constraint(format!(
            "1 <= k <= n = r g violated: k = {k}, n = {}",
            r * g
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skew::is_p_independent;

    fn params(q: u64, m: usize, g: usize, r: usize, k: usize) -> LrsParams {
        let f = Arc::new(ExtField::with_default_modulus(q, m).unwrap());
        LrsParams::new(f, g, r, k).unwrap()
    }

    #[test]
    fn small_instance_is_p_independent() {
        let p = params(5, 2, 2, 2, 3);
        assert_eq!(p.locators().len(), 4);
        assert!(is_p_independent(p.field(), p.locators()));
    }

    #[test]
    fn single_locator() {
        let p = params(5, 2, 1, 1, 1);
        let f = p.field();
        assert_eq!(p.locators(), &[locator(f, f.one(), f.one())]);
        assert_eq!(p.locators()[0], f.one());
    }

    #[test]
    fn group_count_bound() {
        let f = Arc::new(ExtField::with_default_modulus(5, 2).unwrap());
        let err = LrsParams::new(f, 5, 2, 3).unwrap_err();
        assert!(err.to_string().contains("g <= q - 1"));
    }

    #[test]
    fn dependent_block_rejected() {
        let f = Arc::new(ExtField::with_default_modulus(5, 2).unwrap());
        let two = f.from_base(2);
        let blocks = vec![vec![f.one(), two]];
        assert!(matches!(
            LrsParams::with_multipliers(f, 1, 2, 2, blocks),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn trivial_encodings() {
        let p = params(5, 3, 3, 3, 7);
        let f = p.field();
        assert_eq!(p.encode(&SkewPoly::zero()).unwrap(), vec![f.zero(); 9]);
        let c = f.element(31).unwrap();
        let expected: Vec<_> = p.beta().iter().map(|&b| f.mul(c, b)).collect();
        assert_eq!(p.encode(&SkewPoly::constant(c)).unwrap(), expected);
        assert!(p.encode(&SkewPoly::monomial(c, 7)).is_err());
    }

    #[test]
    fn too_few_symbols() {
        let p = params(5, 3, 3, 3, 7);
        let f = SkewPoly::from_coeffs((1..=7).map(|i| p.field().element(i).unwrap()).collect());
        let c = p.encode(&f).unwrap();
        let known: Vec<_> = (0..6).map(|mu| (mu, c[mu])).collect();
        assert!(matches!(p.erasure_decode(&known), Err(Error::Unrecoverable(_))));
        let all: Vec<_> = (0..9).map(|mu| (mu, c[mu])).collect();
        assert_eq!(p.erasure_decode(&all).unwrap(), f);
    }
}
