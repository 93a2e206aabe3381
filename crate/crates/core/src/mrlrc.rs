//! Maximally recoverable LRCs: an outer LRS code whose length-`r` blocks are
//! re-encoded by local `(r+δ-1, r)` MDS codes over `F_q`, plus secure
//! encoding with random padding and an exhaustive maximal-recoverability check.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::linalg::Matrix;
use crate::lrs::{locator, LrsParams};
use crate::skew::SkewPoly;

/// A storage node: `group` is 1-based, `node` is 0-based within the group.
/// Nodes `0..r` of each group hold outer symbols verbatim (systematic local codes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodePos {
    pub group: usize,
    pub node: usize,
}

impl NodePos {
    pub fn new(group: usize, node: usize) -> Self {
        NodePos { group, node }
    }
}

impl fmt::Display for NodePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.group, self.node)
    }
}

/// Flat indexing `μ = j + stride·(i-1)` over `g` groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexMap {
    groups: usize,
    stride: usize,
}

impl IndexMap {
    pub fn new(groups: usize, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Constraint("index stride must be positive".into()));
        }
        Ok(IndexMap { groups, stride })
    }

    /// The paper-printed stride `r+δ-2`; bijective for `j < r+δ-2`.
    pub fn printed(g: usize, r: usize, delta: usize) -> Result<Self> {
        Self::new(g, (r + delta).saturating_sub(2))
    }

    /// Stride `r+δ-1`, indexing all `N` nodes of the global code.
    pub fn global(g: usize, r: usize, delta: usize) -> Result<Self> {
        Self::new(g, r + delta - 1)
    }

    /// Stride `r`, indexing the length-`n` outer code.
    pub fn outer(g: usize, r: usize) -> Result<Self> {
        Self::new(g, r)
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.groups * self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || i > self.groups || j >= self.stride {
            return Err(Error::IndexOutOfRange(format!(
                "(i, j) = ({i}, {j}) outside [1, {}] x [0, {}]",
                self.groups,
                self.stride - 1
            )));
        }
        Ok(j + self.stride * (i - 1))
    }

    pub fn phi_inverse(&self, mu: usize) -> Result<(usize, usize)> {
        if mu >= self.len() {
            return Err(Error::IndexOutOfRange(format!("flat index {mu}")));
        }
        Ok((mu / self.stride + 1, mu % self.stride))
    }
}

/// Systematic Reed–Solomon generator `[I_r | P]` over `F_q`, `r × (r+δ-1)`.
/// Entries are base-field elements, valid verbatim inside any `F_{q^m}`.
pub fn local_generator(q: u64, r: usize, delta: usize) -> Result<Matrix> {
    if r == 0 || delta == 0 {
        return Err(Error::Constraint("r >= 1 and delta >= 1 required".into()));
    }
    let width = r + delta - 1;
    if (width as u64) > q {
        return Err(Error::Constraint(format!(
            "q > r + delta - 2 violated: q = {q}, r + delta - 2 = {}",
            width - 1
        )));
    }
    let fq = ExtField::with_default_modulus(q, 1)?;
    let mut vander = Matrix::zeros(r, width);
    for j in 0..width {
        let alpha = fq.from_base(j as u64);
        for i in 0..r {
            vander[(i, j)] = fq.pow(alpha, i as u64);
        }
    }
    let head: Vec<usize> = (0..r).collect();
    let inv = vander
        .select_columns(&head)
        .inverse(&fq)
        .ok_or_else(|| Error::Invariant("RS information set singular".into()))?;
    inv.mul(&fq, &vander)
}

/// True when every `r × r` column minor of `a` is nonsingular.
pub fn is_mds(field: &ExtField, a: &Matrix) -> bool {
    let r = a.rows();
    (0..a.cols())
        .combinations(r)
        .all(|cols| a.select_columns(&cols).rank(field) == r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrLrcParams {
    lrs: LrsParams,
    delta: usize,
    local: Vec<Matrix>,
    index: IndexMap,
    tilde_beta: Vec<FieldElement>,
    tilde_b: Vec<FieldElement>,
}

/// An encoded global state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalCodeword {
    pub u: Vec<FieldElement>,
    pub f: SkewPoly,
    pub c_out: Vec<FieldElement>,
    pub values: Vec<FieldElement>,
}

/// `u = (r_pad, u_s)`: randomness in the low-degree coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureMessage {
    pub u_s: Vec<FieldElement>,
    pub r_pad: Vec<FieldElement>,
    pub u: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrWitness {
    pub punctured: Vec<NodePos>,
    pub columns: Vec<NodePos>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrReport {
    pub patterns: usize,
    pub subsets_per_pattern: usize,
    pub witness: Option<MrWitness>,
}

impl MrReport {
    pub fn is_mr(&self) -> bool {
        self.witness.is_none()
    }
}

/// Upper bound on `patterns × subsets` for the exhaustive MR check.
pub const MR_CHECK_LIMIT: u128 = 50_000_000;

impl MrLrcParams {
    pub fn new(field: Arc<ExtField>, g: usize, r: usize, delta: usize, k: usize) -> Result<Self> {
        let lrs = LrsParams::new(field, g, r, k)?;
        let q = lrs.field().q();
        check_construction(q, g, r, delta)?;
        let a = local_generator(q, r, delta)?;
        Self::with_local_generators(lrs, delta, vec![a; g])
    }

    /// Uses caller-supplied local generators, each verified MDS.
    pub fn with_local_generators(lrs: LrsParams, delta: usize, local: Vec<Matrix>) -> Result<Self> {
        let params = Self::with_local_generators_unchecked(lrs, delta, local)?;
        for (i, a) in params.local.iter().enumerate() {
            if !is_mds(params.field(), a) {
                return Err(Error::Constraint(format!(
                    "local generator of group {} is not MDS",
                    i + 1
                )));
            }
        }
        Ok(params)
    }

    /// Like [`Self::with_local_generators`] without the MDS check; for
    /// negative fixtures.
    pub fn with_local_generators_unchecked(
        lrs: LrsParams,
        delta: usize,
        local: Vec<Matrix>,
    ) -> Result<Self> {
        let (g, r) = (lrs.g(), lrs.r());
        check_construction(lrs.field().q(), g, r, delta)?;
        if local.len() != g {
            return Err(Error::LengthMismatch {
                expected: g,
                got: local.len(),
            });
        }
        let width = r + delta - 1;
        let field = lrs.field();
        let mut tilde_beta = Vec::with_capacity(g * width);
        for (i, a) in local.iter().enumerate() {
            if a.rows() != r || a.cols() != width {
                return Err(Error::LengthMismatch {
                    expected: r * width,
                    got: a.rows() * a.cols(),
                });
            }
            if (0..r).any(|x| (0..width).any(|y| field.base_value(a[(x, y)]).is_none())) {
                return Err(Error::Constraint(format!(
                    "local generator of group {} has entries outside F_q",
                    i + 1
                )));
            }
            tilde_beta.extend(a.left_mul_vec(field, &lrs.beta()[i * r..(i + 1) * r])?);
        }
        let tilde_b = tilde_beta
            .iter()
            .enumerate()
            .map(|(mu, &bt)| locator(field, lrs.a()[mu / width], bt))
            .collect();
        Ok(MrLrcParams {
            index: IndexMap::global(g, r, delta)?,
            lrs,
            delta,
            local,
            tilde_beta,
            tilde_b,
        })
    }

    pub fn lrs(&self) -> &LrsParams {
        &self.lrs
    }

    pub fn field(&self) -> &ExtField {
        self.lrs.field()
    }

    pub fn field_arc(&self) -> &Arc<ExtField> {
        self.lrs.field_arc()
    }

    pub fn g(&self) -> usize {
        self.lrs.g()
    }

    pub fn r(&self) -> usize {
        self.lrs.r()
    }

    pub fn k(&self) -> usize {
        self.lrs.k()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Outer length `n = r g`.
    pub fn n(&self) -> usize {
        self.lrs.n()
    }

    /// Global parities `h = r g - k`.
    pub fn h(&self) -> usize {
        self.n() - self.k()
    }

    /// Nodes per group, `r + δ - 1`.
    pub fn width(&self) -> usize {
        self.r() + self.delta - 1
    }

    /// Total node count `N = g (r + δ - 1)`.
    pub fn total_nodes(&self) -> usize {
        self.g() * self.width()
    }

    pub fn index_map(&self) -> IndexMap {
        self.index
    }

    pub fn local_generator(&self, group: usize) -> &Matrix {
        &self.local[group - 1]
    }

    pub fn flat(&self, pos: NodePos) -> Result<usize> {
        self.index.phi(pos.group, pos.node)
    }

    pub fn pos(&self, mu: usize) -> Result<NodePos> {
        let (group, node) = self.index.phi_inverse(mu)?;
        Ok(NodePos { group, node })
    }

    fn flat_unchecked(&self, pos: NodePos) -> usize {
        self.flat(pos).expect("node position in range")
    }

    pub fn positions(&self) -> Vec<NodePos> {
        (1..=self.g()).flat_map(|i| self.group_positions(i)).collect()
    }

    pub fn group_positions(&self, group: usize) -> Vec<NodePos> {
        (0..self.width()).map(|j| NodePos::new(group, j)).collect()
    }

    pub fn tilde_beta(&self, pos: NodePos) -> FieldElement {
        self.tilde_beta[self.flat_unchecked(pos)]
    }

    pub fn tilde_b(&self, pos: NodePos) -> FieldElement {
        self.tilde_b[self.flat_unchecked(pos)]
    }

    pub fn tilde_betas(&self) -> &[FieldElement] {
        &self.tilde_beta
    }

    pub fn tilde_locators(&self) -> &[FieldElement] {
        &self.tilde_b
    }

    /// Encodes message `u` (monomial coefficients, lowest degree first).
    pub fn encode(&self, u: &[FieldElement]) -> Result<GlobalCodeword> {
        if u.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: u.len(),
            });
        }
        let f = SkewPoly::from_coeffs(u.to_vec());
        let mut cw = self.encode_poly(&f)?;
        cw.u = u.to_vec();
        Ok(cw)
    }

    /// Encodes by both the block-matrix route and the extended-locator
    /// route, failing if they disagree anywhere.
    pub fn encode_poly(&self, f: &SkewPoly) -> Result<GlobalCodeword> {
        let field = self.field();
        let c_out = self.lrs.encode(f)?;
        let r = self.r();
        let mut values = Vec::with_capacity(self.total_nodes());
        for (i, a) in self.local.iter().enumerate() {
            values.extend(a.left_mul_vec(field, &c_out[i * r..(i + 1) * r])?);
        }
        for (mu, (&b, &bt)) in self.tilde_b.iter().zip(&self.tilde_beta).enumerate() {
            let direct = field.mul(f.eval(field, b), bt);
            if direct != values[mu] {
                return Err(Error::Invariant(format!(
                    "encoding paths disagree at node {}",
                    self.pos(mu)?
                )));
            }
        }
        Ok(GlobalCodeword {
            u: f.padded_coeffs(self.k()),
            f: f.clone(),
            c_out,
            values,
        })
    }

    /// Prepends `k_e` seeded uniform symbols to `u_s` and encodes.
    pub fn secure_encode(
        &self,
        u_s: &[FieldElement],
        k_e: usize,
        seed: u64,
    ) -> Result<(SecureMessage, GlobalCodeword)> {
        if k_e >= self.k() {
            return Err(Error::Precondition(format!(
                "k_s = k - k_e must be positive (k = {}, k_e = {k_e})",
                self.k()
            )));
        }
        if u_s.len() != self.k() - k_e {
            return Err(Error::LengthMismatch {
                expected: self.k() - k_e,
                got: u_s.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r_pad: Vec<_> = (0..k_e).map(|_| self.field().random(&mut rng)).collect();
        let u: Vec<_> = r_pad.iter().chain(u_s).copied().collect();
        let cw = self.encode(&u)?;
        Ok((
            SecureMessage {
                u_s: u_s.to_vec(),
                r_pad,
                u,
            },
            cw,
        ))
    }

    /// `k × N` generator with entry `(i, μ) = N_i(b̃_μ) β̃_μ`.
    pub fn generator_matrix(&self) -> Matrix {
        let field = self.field();
        let mut gm = Matrix::zeros(self.k(), self.total_nodes());
        for (mu, (&b, &bt)) in self.tilde_b.iter().zip(&self.tilde_beta).enumerate() {
            for (i, nrm) in field.truncated_norms(b, self.k()).into_iter().enumerate() {
                gm[(i, mu)] = field.mul(nrm, bt);
            }
        }
        gm
    }

    /// Restores a whole group block from any `r` intact in-group symbols.
    pub fn local_decode(&self, group: usize, known: &[(usize, FieldElement)]) -> Result<Vec<FieldElement>> {
        let r = self.r();
        if known.len() < r {
            return Err(Error::Unrecoverable(format!(
                "group {group} has {} intact nodes, local repair needs r = {r}",
                known.len()
            )));
        }
        let field = self.field();
        let a = self.local_generator(group);
        let cols: Vec<usize> = known.iter().take(r).map(|p| p.0).collect();
        let vals: Vec<FieldElement> = known.iter().take(r).map(|p| p.1).collect();
        let c_out = a.select_columns(&cols).solve_left(field, &vals)?;
        a.left_mul_vec(field, &c_out)
    }

    /// Exhaustive maximal-recoverability check: for every way of puncturing
    /// exactly `δ-1` nodes in each group, every `k` of the remaining `n`
    /// columns of the generator must be independent.
    pub fn is_maximally_recoverable(&self) -> Result<MrReport> {
        let g = self.g();
        let width = self.width();
        let per_group: Vec<Vec<usize>> = (0..width).combinations(self.delta - 1).collect();
        let patterns = per_group.len().pow(g as u32);
        let subsets = binomial(self.n(), self.k());
        if patterns as u128 * subsets > MR_CHECK_LIMIT {
            return Err(Error::TooLarge(format!(
                "{patterns} puncture patterns x {subsets} column subsets"
            )));
        }
        let gm = self.generator_matrix();
        let field = self.field();
        let k = self.k();
        let witness = (0..patterns).into_par_iter().find_map_first(|p| {
            let mut code = p;
            let mut punctured = Vec::new();
            let mut kept = Vec::new();
            for i in 0..g {
                let choice = &per_group[code % per_group.len()];
                code /= per_group.len();
                for j in 0..width {
                    let mu = i * width + j;
                    if choice.contains(&j) {
                        punctured.push(mu);
                    } else {
                        kept.push(mu);
                    }
                }
            }
            log::debug!("MR check pattern {p}/{patterns}");
            kept.iter()
                .copied()
                .combinations(k)
                .find(|cols| gm.select_columns(cols).rank(field) < k)
                .map(|cols| (punctured, cols))
        });
        let to_pos = |v: Vec<usize>| -> Vec<NodePos> {
            v.into_iter().map(|mu| self.pos(mu).expect("in range")).collect()
        };
        Ok(MrReport {
            patterns,
            subsets_per_pattern: subsets as usize,
            witness: witness.map(|(p, c)| MrWitness {
                punctured: to_pos(p),
                columns: to_pos(c),
            }),
        })
    }
}

fn check_construction(q: u64, g: usize, r: usize, delta: usize) -> Result<()> {
    if delta == 0 {
        return Err(Error::Constraint("delta >= 1 violated".into()));
    }
    let bound = g.max(r + delta - 2) as u64;
    if q <= bound {
        return Err(Error::Constraint(format!(
            "q > max(g, r + delta - 2) violated: q = {q}, max = {bound}"
        )));
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u64, m: usize, g: usize, r: usize, delta: usize, k: usize) -> MrLrcParams {
        let f = Arc::new(ExtField::with_default_modulus(q, m).unwrap());
        MrLrcParams::new(f, g, r, delta, k).unwrap()
    }

    #[test]
    fn phi_examples() {
        let printed = IndexMap::printed(3, 3, 3).unwrap();
        assert_eq!(printed.phi(1, 0).unwrap(), 0);
        assert_eq!(printed.phi(3, 1).unwrap(), 9);
        for map in [printed, IndexMap::global(3, 3, 3).unwrap(), IndexMap::outer(3, 3).unwrap()] {
            for mu in 0..map.len() {
                let (i, j) = map.phi_inverse(mu).unwrap();
                assert_eq!(map.phi(i, j).unwrap(), mu);
            }
        }
        assert!(printed.phi(0, 0).is_err());
        assert!(printed.phi(1, 4).is_err());
    }

    #[test]
    fn local_generator_shapes() {
        let a = local_generator(5, 3, 1).unwrap();
        assert_eq!(a, Matrix::identity(3));
        let fq = ExtField::with_default_modulus(5, 1).unwrap();
        let a = local_generator(5, 2, 2).unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert!(is_mds(&fq, &a));
        let a = local_generator(5, 3, 3).unwrap();
        assert_eq!((a.rows(), a.cols()), (3, 5));
        assert_eq!((0..5).combinations(3).count(), 10);
        assert!(is_mds(&fq, &a));
        assert!(local_generator(5, 3, 4).is_err());
    }

    #[test]
    fn figure_one_dimensions() {
        let p = params(5, 3, 3, 3, 3, 7);
        assert_eq!((p.h(), p.total_nodes(), p.n()), (2, 15, 9));
        let zero = p.encode(&[FieldElement::ZERO; 7]).unwrap();
        assert!(zero.values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn secure_encode_rules() {
        let p = params(5, 3, 3, 3, 3, 7);
        let f = p.field();
        let u_s: Vec<_> = (0..7).map(|i| f.element(i + 3).unwrap()).collect();
        let (msg, cw) = p.secure_encode(&u_s, 0, 1).unwrap();
        assert_eq!(msg.u, u_s);
        assert_eq!(cw.u, u_s);
        let (a, ca) = p.secure_encode(&u_s[..1], 6, 42).unwrap();
        let (b, cb) = p.secure_encode(&u_s[..1], 6, 42).unwrap();
        assert_eq!((a.clone(), ca), (b, cb));
        assert_eq!(a.u[6], u_s[0]);
        assert!(p.secure_encode(&[], 7, 0).is_err());
    }

    #[test]
    fn generator_matches_encoding() {
        let p = params(5, 2, 2, 2, 2, 3);
        let f = p.field();
        let u: Vec<_> = [4, 17, 9].iter().map(|&i| f.element(i).unwrap()).collect();
        let cw = p.encode(&u).unwrap();
        assert_eq!(p.generator_matrix().left_mul_vec(f, &u).unwrap(), cw.values);
    }

    #[test]
    fn local_decode_restores_block() {
        let p = params(5, 3, 3, 3, 3, 7);
        let f = p.field();
        let u: Vec<_> = (0..7).map(|i| f.element(11 * i + 2).unwrap()).collect();
        let cw = p.encode(&u).unwrap();
        let known: Vec<_> = [1usize, 3, 4].iter().map(|&j| (j, cw.values[5 + j])).collect();
        assert_eq!(p.local_decode(2, &known).unwrap(), cw.values[5..10].to_vec());
    }

    #[test]
    fn outer_code_alone_is_mr() {
        let p = params(5, 2, 2, 2, 1, 4);
        assert!(p.is_maximally_recoverable().unwrap().is_mr());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 7), 36);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(6, 0), 1);
    }
}
