//! The `(l1, l2)`-eavesdropper: observation matrices, rank-based
//! eavesdropped dimension, closed-form secrecy dimensions, and exhaustive
//! information-theoretic oracles for tiny instances.
//!
//! Observation rows live in the `Δ_gl` basis `c_Δ = (c/β̃)|_{Δ_gl}`: a node
//! inside the repair set contributes a unit row and any other locator `b`
//! contributes its Lagrange row `(ℓ_{i,j}(b))_{(i,j)∈Δ_gl}`. Observations from
//! several rounds (each with its own `Δ_gl`) are compared in the monomial
//! coefficient basis instead, where a `Δ_gl` row `v` becomes `V^σ(b̃_Δ) v`.

use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;

use crate::dss::{Scheme, TranscriptRound};
use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::linalg::Matrix;
use crate::mrlrc::{MrLrcParams, NodePos};
use crate::skew::{is_p_independent, lagrange_basis, sigma_vandermonde, sigma_vandermonde_rows};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EavesdropperSpec {
    l1_nodes: BTreeSet<NodePos>,
    l2_groups: BTreeSet<usize>,
}

impl EavesdropperSpec {
    pub fn new(
        params: &MrLrcParams,
        l1_nodes: impl IntoIterator<Item = NodePos>,
        l2_groups: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let l1_nodes: BTreeSet<NodePos> = l1_nodes.into_iter().collect();
        let l2_groups: BTreeSet<usize> = l2_groups.into_iter().collect();
        for &p in &l1_nodes {
            params.flat(p)?;
        }
        if let Some(&i) = l2_groups.iter().find(|&&i| i == 0 || i > params.g()) {
            return Err(Error::IndexOutOfRange(format!("observed group {i}")));
        }
        Ok(EavesdropperSpec {
            l1_nodes,
            l2_groups,
        })
    }

    pub fn l1_nodes(&self) -> &BTreeSet<NodePos> {
        &self.l1_nodes
    }

    pub fn l2_groups(&self) -> &BTreeSet<usize> {
        &self.l2_groups
    }

    pub fn l1(&self) -> usize {
        self.l1_nodes.len()
    }

    pub fn l2(&self) -> usize {
        self.l2_groups.len()
    }

    pub fn observes_group(&self, group: usize) -> bool {
        self.l2_groups.contains(&group)
    }

    /// `ℰ_1 ∪ ℰ_2^st`: every node whose storage is read.
    pub fn observed_nodes(&self, params: &MrLrcParams) -> BTreeSet<NodePos> {
        self.l2_groups
            .iter()
            .flat_map(|&i| params.group_positions(i))
            .chain(self.l1_nodes.iter().copied())
            .collect()
    }

    /// Nodes giving the static rows: the `r` systematic nodes of each
    /// observed group (the rest of the group depends on them) and the
    /// `l1` nodes, deduplicated.
    pub fn static_nodes(&self, params: &MrLrcParams) -> BTreeSet<NodePos> {
        self.l2_groups
            .iter()
            .flat_map(|&i| (0..params.r()).map(move |j| NodePos::new(i, j)))
            .chain(self.l1_nodes.iter().copied())
            .collect()
    }

    /// `e_i = min(r, distinct observed nodes of group i)`.
    pub fn e_vector(&self, params: &MrLrcParams) -> Vec<usize> {
        let observed = self.observed_nodes(params);
        (1..=params.g())
            .map(|i| observed.iter().filter(|p| p.group == i).count().min(params.r()))
            .collect()
    }

    /// The standing assumption `l1 + l2 r < k`.
    pub fn check_standing(&self, params: &MrLrcParams) -> Result<()> {
        let seen = self.l1() + self.l2() * params.r();
        if seen >= params.k() {
            return Err(Error::Hypothesis(format!(
                "l1 + l2 r < k violated: {seen} >= {}",
                params.k()
            )));
        }
        Ok(())
    }
}

/// Lagrange machinery for one repair set.
#[derive(Clone, Debug)]
pub struct LagrangeFrame {
    basis: Vec<NodePos>,
    /// `L = V^σ(b̃_Δ)^{-1}`; row `j` holds the coefficients of `ℓ_j`.
    coeff: Matrix,
    vander: Matrix,
}

impl LagrangeFrame {
    pub fn new(params: &MrLrcParams, basis: &[NodePos]) -> Result<Self> {
        let field = params.field();
        let locators: Vec<_> = basis.iter().map(|&p| params.tilde_b(p)).collect();
        let vander = sigma_vandermonde(field, &locators).entries;
        let coeff = vander.inverse(field).ok_or(Error::NotPIndependent)?;
        Ok(LagrangeFrame {
            basis: basis.to_vec(),
            coeff,
            vander,
        })
    }

    pub fn basis(&self) -> &[NodePos] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `(ℓ_j(b))_j`.
    pub fn row_at(&self, field: &ExtField, b: FieldElement) -> Vec<FieldElement> {
        let norms = field.truncated_norms(b, self.len());
        self.coeff.mul_vec(field, &norms).expect("square frame")
    }

    /// Row expressing the stored symbol of `pos` (up to its multiplier).
    pub fn node_row(&self, params: &MrLrcParams, pos: NodePos) -> Vec<FieldElement> {
        match self.basis.iter().position(|&p| p == pos) {
            Some(j) => unit(self.len(), j),
            None => self.row_at(params.field(), params.tilde_b(pos)),
        }
    }

    /// `ℓ_ν(b)`: the Lagrange row restricted to the columns of `group`.
    pub fn group_row(&self, field: &ExtField, group: usize, b: FieldElement) -> Vec<FieldElement> {
        let mut row = self.row_at(field, b);
        for (j, p) in self.basis.iter().enumerate() {
            if p.group != group {
                row[j] = FieldElement::ZERO;
            }
        }
        row
    }

    /// Maps a `Δ_gl`-basis row to the monomial coefficient basis.
    pub fn to_coefficient_basis(&self, field: &ExtField, row: &[FieldElement]) -> Vec<FieldElement> {
        self.vander.mul_vec(field, row).expect("square frame")
    }
}

fn unit(len: usize, j: usize) -> Vec<FieldElement> {
    let mut v = vec![FieldElement::ZERO; len];
    v[j] = FieldElement::ONE;
    v
}

/// The eavesdropper's knowledge for one round, `e = M c_Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMatrix {
    pub basis: Vec<NodePos>,
    pub m_st: Matrix,
    pub m_dl: Matrix,
    /// Static rows before deduplication (`l2 r + l1`).
    pub raw_static_rows: usize,
}

impl ObservationMatrix {
    pub fn stacked(&self) -> Matrix {
        self.m_st.stack(&self.m_dl).expect("same basis")
    }
}

/// Static rows: one per node in [`EavesdropperSpec::static_nodes`].
pub fn static_view(params: &MrLrcParams, frame: &LagrangeFrame, spec: &EavesdropperSpec) -> Matrix {
    let mut m = Matrix::empty(frame.len());
    for p in spec.static_nodes(params) {
        m.push_row(&frame.node_row(params, p)).expect("frame width");
    }
    m
}

/// Direct repair traffic into observed groups. Each visible message from
/// CPU `i` for locator `b'` gives the row `ℓ_i(b')`. When the repairing
/// group itself is observed, its own contribution (computable from its
/// observed storage) is listed too, so each repaired symbol yields one row
/// per group of `Δ_gl,1`.
pub fn repair_view_direct(
    params: &MrLrcParams,
    frame: &LagrangeFrame,
    spec: &EavesdropperSpec,
    round: &TranscriptRound,
) -> Result<Matrix> {
    let field = params.field();
    let mut m = Matrix::empty(frame.len());
    if !spec.observes_group(round.target) {
        return Ok(m);
    }
    let owns_part = frame.basis().iter().any(|p| p.group == round.target);
    for &p in &round.repaired {
        let b = params.tilde_b(p);
        let mu = params.flat(p)?;
        let mut senders: Vec<usize> = round
            .messages
            .iter()
            .filter(|msg| msg.locator_index == mu && msg.to_cpu == round.target)
            .map(|msg| msg.from_cpu)
            .collect();
        if owns_part {
            senders.push(round.target);
        }
        senders.sort_unstable();
        for i in senders {
            m.push_row(&frame.group_row(field, i, b))?;
        }
    }
    Ok(m)
}

/// Forwarded repair traffic: every message received by an observed group
/// is the sum of the Lagrange rows of all groups upstream of it.
pub fn repair_view_forwarded(
    params: &MrLrcParams,
    frame: &LagrangeFrame,
    spec: &EavesdropperSpec,
    round: &TranscriptRound,
) -> Result<Matrix> {
    let field = params.field();
    let order = round
        .forwarding_list
        .as_ref()
        .ok_or_else(|| Error::ForwardingList("forwarded round without a list".into()))?;
    let mut m = Matrix::empty(frame.len());
    for msg in round.messages.iter().filter(|m| spec.observes_group(m.to_cpu)) {
        let p = params.pos(msg.locator_index)?;
        let b = params.tilde_b(p);
        let stop = order
            .iter()
            .position(|&x| x == msg.from_cpu)
            .ok_or_else(|| Error::ForwardingList(format!("sender {} not listed", msg.from_cpu)))?;
        let mut row = vec![FieldElement::ZERO; frame.len()];
        for &nu in &order[..=stop] {
            for (acc, x) in row.iter_mut().zip(frame.group_row(field, nu, b)) {
                *acc = field.add(*acc, x);
            }
        }
        m.push_row(&row)?;
    }
    Ok(m)
}

/// Naive repair: an observed downloading group sees raw node symbols.
pub fn repair_view_naive(
    params: &MrLrcParams,
    frame: &LagrangeFrame,
    spec: &EavesdropperSpec,
    round: &TranscriptRound,
) -> Result<Matrix> {
    let mut m = Matrix::empty(frame.len());
    for msg in round.messages.iter().filter(|m| spec.observes_group(m.to_cpu)) {
        m.push_row(&frame.node_row(params, params.pos(msg.locator_index)?))?;
    }
    Ok(m)
}

pub fn repair_view(
    params: &MrLrcParams,
    frame: &LagrangeFrame,
    spec: &EavesdropperSpec,
    round: &TranscriptRound,
) -> Result<Matrix> {
    match round.scheme {
        Scheme::Direct => repair_view_direct(params, frame, spec, round),
        Scheme::Forwarded => repair_view_forwarded(params, frame, spec, round),
        Scheme::Naive => repair_view_naive(params, frame, spec, round),
    }
}

/// `M = (M_st; M_dl)` for one round, in that round's `Δ_gl` basis.
pub fn observation_matrix(
    params: &MrLrcParams,
    spec: &EavesdropperSpec,
    round: &TranscriptRound,
) -> Result<ObservationMatrix> {
    let frame = LagrangeFrame::new(params, &round.repair_set)?;
    Ok(ObservationMatrix {
        basis: round.repair_set.clone(),
        m_st: static_view(params, &frame, spec),
        m_dl: repair_view(params, &frame, spec, round)?,
        raw_static_rows: spec.l2() * params.r() + spec.l1(),
    })
}

/// `k_e = rk(M)`.
pub fn eavesdropped_dimension(field: &ExtField, m: &ObservationMatrix) -> usize {
    m.stacked().rank(field)
}

/// Rank of everything observed over several rounds, in the coefficient basis.
pub fn eavesdropped_dimension_rounds(
    params: &MrLrcParams,
    spec: &EavesdropperSpec,
    rounds: &[TranscriptRound],
) -> Result<usize> {
    let field = params.field();
    let k = params.k();
    let mut all = Matrix::empty(k);
    for p in spec.static_nodes(params) {
        all.push_row(&field.truncated_norms(params.tilde_b(p), k))?;
    }
    for round in rounds {
        let frame = LagrangeFrame::new(params, &round.repair_set)?;
        let dl = repair_view(params, &frame, spec, round)?;
        for r in 0..dl.rows() {
            all.push_row(&frame.to_coefficient_basis(field, dl.row(r)))?;
        }
    }
    Ok(all.rank(field))
}

fn check_common(g: usize, r: usize, h: usize, k: usize, l1: usize, l2: usize, e: &[usize]) -> Result<()> {
    if e.len() != g {
        return Err(Error::LengthMismatch {
            expected: g,
            got: e.len(),
        });
    }
    if let Some(&bad) = e.iter().find(|&&x| x > r) {
        return Err(Error::Hypothesis(format!("e_i <= r violated: {bad} > {r}")));
    }
    if h > r {
        return Err(Error::Hypothesis(format!("h <= r violated: h = {h}, r = {r}")));
    }
    if l1 + l2 * r >= k {
        return Err(Error::Hypothesis(format!(
            "l1 + l2 r < k violated: {} >= {k}",
            l1 + l2 * r
        )));
    }
    Ok(())
}

fn floor_secrecy(k: usize, k_e: usize) -> usize {
    if k_e > k {
        log::warn!("eavesdropped dimension {k_e} exceeds k = {k}; secrecy dimension clamped to 0");
    }
    k.saturating_sub(k_e)
}

/// Eavesdropped dimension under direct repair:
/// `l2 r + l1 - h + Σ_i min(h, r - e_i)`, or `l1` when `l2 = 0`.
pub fn eavesdropped_dim_direct(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2: usize,
    e: &[usize],
) -> Result<usize> {
    if l2 == 0 {
        return Ok(l1);
    }
    check_common(g, r, h, k, l1, l2, e)?;
    let sum: usize = e.iter().map(|&ei| h.min(r - ei)).sum();
    Ok(l2 * r + l1 + sum - h)
}

/// `k_s = k - k_e` for direct repair, floored at zero.
pub fn secrecy_dim_direct(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2: usize,
    e: &[usize],
) -> Result<usize> {
    Ok(floor_secrecy(k, eavesdropped_dim_direct(g, r, h, k, l1, l2, e)?))
}

/// `ℱ'_up,i`: the groups upstream of `i` after removing every observed
/// upstream group together with everything upstream of it.
pub fn pruned_upstream(flist: &[usize], l2_groups: &BTreeSet<usize>, group: usize) -> Vec<usize> {
    let upstream: &[usize] = match flist.iter().position(|&x| x == group) {
        Some(p) => &flist[..p],
        None => &[],
    };
    let mut removed: HashSet<usize> = HashSet::new();
    for (t, nu) in upstream.iter().enumerate() {
        if l2_groups.contains(nu) {
            removed.extend(&upstream[..=t]);
        }
    }
    upstream.iter().copied().filter(|x| !removed.contains(x)).collect()
}

fn check_flist(g: usize, flist: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &i in flist {
        if i == 0 || i > g || !seen.insert(i) {
            return Err(Error::ForwardingList(format!("bad or repeated group {i}")));
        }
    }
    Ok(())
}

/// Eavesdropped dimension under forwarded repair:
/// `(l2 r + l1) + Σ_{i∈G_l2} min(h, Σ_{j∈ℱ'_up,i} (r - e_j))`, with the
/// static-only value `l2 r + l1` for `g <= 2` and `l1` for `l2 = 0`. The
/// repairing group (last in the list) adds nothing when it is observed.
#[allow(clippy::too_many_arguments)]
pub fn eavesdropped_dim_forwarded(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2_groups: &BTreeSet<usize>,
    flist: &[usize],
    e: &[usize],
) -> Result<usize> {
    let l2 = l2_groups.len();
    if l2 == 0 {
        return Ok(l1);
    }
    if g <= 2 {
        return Ok(l2 * r + l1);
    }
    check_common(g, r, h, k, l1, l2, e)?;
    check_flist(g, flist)?;
    // An observed target only receives values it already stored.
    let target = flist.last().copied();
    let dynamic: usize = l2_groups
        .iter()
        .filter(|&&i| Some(i) != target)
        .map(|&i| {
            let s: usize = pruned_upstream(flist, l2_groups, i)
                .iter()
                .map(|&j| r - e[j - 1])
                .sum();
            h.min(s)
        })
        .sum();
    Ok(l2 * r + l1 + dynamic)
}

#[allow(clippy::too_many_arguments)]
pub fn secrecy_dim_forwarded(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2_groups: &BTreeSet<usize>,
    flist: &[usize],
    e: &[usize],
) -> Result<usize> {
    Ok(floor_secrecy(
        k,
        eavesdropped_dim_forwarded(g, r, h, k, l1, l2_groups, flist, e)?,
    ))
}

/// Secrecy dimension with outside-hypothesis regimes mapped to zero: when
/// `l1 + l2 r >= k` or `h > r` the eavesdropper already sees everything.
pub fn clamp_hypothesis(result: Result<usize>) -> Result<usize> {
    match result {
        Err(Error::Hypothesis(msg)) => {
            log::warn!("{msg}; secrecy dimension clamped to 0");
            Ok(0)
        }
        other => other,
    }
}

/// Where the eavesdropper sits: observed groups and `l1` counts per group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub l2_groups: BTreeSet<usize>,
    pub l1_per_group: Vec<usize>,
}

impl Placement {
    pub fn e_vector(&self, r: usize) -> Vec<usize> {
        self.l1_per_group
            .iter()
            .enumerate()
            .map(|(i, &c)| if self.l2_groups.contains(&(i + 1)) { r } else { c.min(r) })
            .collect()
    }
}

/// Worst-case placement for the closed-form layer: exhaustive over the
/// observed-group choice when there are at most 10^4 choices (spread along the
/// list otherwise), then `l1` nodes added greedily where they raise the
/// eavesdropped dimension most. Ties go to the lexicographically first choice.
#[allow(clippy::too_many_arguments)]
pub fn worst_case_placement(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2: usize,
    scheme: Scheme,
    flist: &[usize],
) -> Result<Placement> {
    if l2 > g {
        return Err(Error::Hypothesis(format!("l2 = {l2} exceeds g = {g}")));
    }
    let score = |p: &Placement| -> usize {
        let e = p.e_vector(r);
        let l1 = p.l1_per_group.iter().sum();
        let res = match scheme {
            Scheme::Forwarded => eavesdropped_dim_forwarded(g, r, h, k, l1, &p.l2_groups, flist, &e),
            _ => eavesdropped_dim_direct(g, r, h, k, l1, p.l2_groups.len(), &e),
        };
        res.unwrap_or(usize::MAX)
    };
    let candidates: Vec<BTreeSet<usize>> = if crate::mrlrc::binomial(g, l2) <= 10_000 {
        (1..=g).combinations(l2).map(|c| c.into_iter().collect()).collect()
    } else {
        // Skip the repairing group (last in the list); it adds nothing when observed.
        let order: Vec<usize> = if flist.is_empty() {
            (1..g).rev().collect()
        } else {
            flist.iter().rev().skip(1).copied().collect()
        };
        let step = (order.len() / l2.max(1)).max(1);
        vec![(0..l2).map(|t| order[(t * step).min(order.len() - 1)]).collect()]
    };
    let mut best: Option<(usize, Placement)> = None;
    for groups in candidates {
        let mut p = Placement {
            l2_groups: groups,
            l1_per_group: vec![0; g],
        };
        for _ in 0..l1 {
            let mut pick: Option<(usize, usize)> = None;
            for i in 1..=g {
                if p.l2_groups.contains(&i) || p.l1_per_group[i - 1] >= r + h {
                    continue;
                }
                p.l1_per_group[i - 1] += 1;
                let s = score(&p);
                p.l1_per_group[i - 1] -= 1;
                if pick.is_none_or(|(bs, _)| s > bs) {
                    pick = Some((s, i));
                }
            }
            match pick {
                Some((_, i)) => p.l1_per_group[i - 1] += 1,
                None => return Err(Error::Hypothesis("no room left for l1 nodes".into())),
            }
        }
        let s = score(&p);
        if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
            best = Some((s, p));
        }
    }
    best.map(|b| b.1)
        .ok_or_else(|| Error::Hypothesis("no placement candidates".into()))
}

/// Result of enumerating every message through an observation map.
#[derive(Clone, Debug, PartialEq)]
pub struct MiReport {
    pub messages: u64,
    pub support_secret: usize,
    pub support_observation: usize,
    pub support_joint: usize,
    /// Exact independence: `#(u_s, e) · T = #u_s · #e` for every pair.
    pub independent: bool,
    /// `I(U_s; E)` in bits (zero exactly when `independent`).
    pub mutual_information_bits: f64,
    /// `E` is uniform on its support, as a linear image of a uniform message must be.
    pub observation_uniform: bool,
    /// `|supp E| <= |F|^{k_e}`, i.e. `H(E) <= H(R)`.
    pub support_bound_holds: bool,
    /// `H(R | U_s, E) = 0`: each `(u_s, e)` pins down the padding.
    pub padding_determined: bool,
}

impl MiReport {
    pub fn lemma_conditions_hold(&self) -> bool {
        self.support_bound_holds && self.padding_determined
    }
}

/// Largest message space the oracles will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 21;

/// Enumerates every `u = (r_pad, u_s) ∈ F^k` (padding = first `k_e`
/// coordinates), collects `E = observe(u)` and measures the dependence of
/// `E` on `U_s` exactly by counting.
pub fn mi_oracle<F>(field: &ExtField, k: usize, k_e: usize, mut observe: F) -> Result<MiReport>
where
    F: FnMut(&[FieldElement]) -> Result<Vec<FieldElement>>,
{
    if k_e > k {
        return Err(Error::Precondition(format!("k_e = {k_e} exceeds k = {k}")));
    }
    let size = field.size();
    let total = checked_power(size, k)
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("|F|^k = {size}^{k}")))?;
    let mut secret_counts: HashMap<Vec<FieldElement>, u64> = HashMap::new();
    let mut obs_counts: HashMap<Vec<FieldElement>, u64> = HashMap::new();
    let mut joint_counts: HashMap<(Vec<FieldElement>, Vec<FieldElement>), u64> = HashMap::new();
    let mut padding_seen: HashMap<(Vec<FieldElement>, Vec<FieldElement>), Vec<FieldElement>> = HashMap::new();
    let mut padding_determined = true;
    let mut u = vec![FieldElement::ZERO; k];
    for idx in 0..total {
        let mut x = idx;
        for slot in u.iter_mut() {
            *slot = field.element(x % size).expect("in range");
            x /= size;
        }
        let e = observe(&u)?;
        let us = u[k_e..].to_vec();
        let pad = u[..k_e].to_vec();
        *secret_counts.entry(us.clone()).or_default() += 1;
        *obs_counts.entry(e.clone()).or_default() += 1;
        let key = (us, e);
        *joint_counts.entry(key.clone()).or_default() += 1;
        match padding_seen.get(&key) {
            Some(prev) if *prev != pad => padding_determined = false,
            Some(_) => {}
            None => {
                padding_seen.insert(key, pad);
            }
        }
    }
    let t = total as u128;
    let independent = joint_counts.len() == secret_counts.len() * obs_counts.len()
        && joint_counts.iter().all(|((us, e), &c)| {
            c as u128 * t == secret_counts[us] as u128 * obs_counts[e] as u128
        });
    let mi = if independent {
        0.0
    } else {
        joint_counts
            .iter()
            .map(|((us, e), &c)| {
                let p = c as f64 / total as f64;
                let ratio = (c as f64 * total as f64) / (secret_counts[us] as f64 * obs_counts[e] as f64);
                p * ratio.log2()
            })
            .sum()
    };
    let first = obs_counts.values().next().copied().unwrap_or(0);
    let observation_uniform = obs_counts.values().all(|&c| c == first);
    let bound = checked_power(size, k_e).unwrap_or(u64::MAX);
    Ok(MiReport {
        messages: total,
        support_secret: secret_counts.len(),
        support_observation: obs_counts.len(),
        support_joint: joint_counts.len(),
        independent,
        mutual_information_bits: mi,
        observation_uniform,
        support_bound_holds: observation_uniform && obs_counts.len() as u64 <= bound,
        padding_determined,
    })
}

fn checked_power(base: u64, exp: usize) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyRankReport {
    pub rank: usize,
    pub support: u64,
    pub uniform: bool,
    /// `H(X)` in units of `log |F|` when `X` is uniform on `|F|^d` points.
    pub entropy_symbols: Option<usize>,
}

impl EntropyRankReport {
    pub fn holds(&self) -> bool {
        self.entropy_symbols == Some(self.rank)
    }
}

/// Enumerates every input `K` and measures the entropy of `X = M K`.
pub fn entropy_rank_check(field: &ExtField, m: &Matrix) -> Result<EntropyRankReport> {
    let size = field.size();
    let cols = m.cols();
    let total = checked_power(size, cols)
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("|F|^c = {size}^{cols}")))?;
    let mut counts: HashMap<Vec<FieldElement>, u64> = HashMap::new();
    let mut kv = vec![FieldElement::ZERO; cols];
    for idx in 0..total {
        let mut x = idx;
        for slot in kv.iter_mut() {
            *slot = field.element(x % size).expect("in range");
            x /= size;
        }
        *counts.entry(m.mul_vec(field, &kv)?).or_default() += 1;
    }
    let support = counts.len() as u64;
    let first = counts.values().next().copied().unwrap_or(0);
    let uniform = counts.values().all(|&c| c == first);
    let entropy_symbols = if uniform {
        (0..=cols).find(|&d| checked_power(size, d) == Some(support))
    } else {
        None
    };
    Ok(EntropyRankReport {
        rank: m.rank(field),
        support,
        uniform,
        entropy_symbols,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VandermondeProductReport {
    pub matrix: Matrix,
    pub rank: usize,
    /// `(columns, rank, expected)` per contiguous column block.
    pub block_ranks: Vec<(usize, usize, usize)>,
}

impl VandermondeProductReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.matrix.rows().min(self.matrix.cols())
            && self.block_ranks.iter().all(|&(_, got, want)| got == want)
    }
}

/// `M = (ℓ_j^{a_k}(a_d[r]))_{r,j}` built by direct Lagrange evaluation and
/// checked against `(V^σ_k(a_k)^{-1} V^σ_k(a_d))^T`. `blocks` splits the
/// columns of `M` into contiguous groups whose ranks are reported.
pub fn vandermonde_product_rank(
    field: &ExtField,
    a_k: &[FieldElement],
    a_d: &[FieldElement],
    blocks: &[usize],
) -> Result<VandermondeProductReport> {
    let all: Vec<_> = a_k.iter().chain(a_d).copied().collect();
    if !is_p_independent(field, &all) {
        return Err(Error::NotPIndependent);
    }
    let k = a_k.len();
    let basis = lagrange_basis(field, a_k)?;
    let direct = Matrix::from_rows(
        a_d.iter()
            .map(|&b| basis.iter().map(|l| l.eval(field, b)).collect())
            .collect(),
    )?;
    let direct = if a_d.is_empty() { Matrix::empty(k) } else { direct };
    let vk_inv = sigma_vandermonde(field, a_k)
        .entries
        .inverse(field)
        .ok_or(Error::NotPIndependent)?;
    let product = vk_inv
        .mul(field, &sigma_vandermonde_rows(field, a_d, k).entries)?
        .transpose();
    if product != direct {
        return Err(Error::Invariant(
            "Lagrange evaluation and Vandermonde product disagree".into(),
        ));
    }
    if blocks.iter().sum::<usize>() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: blocks.iter().sum(),
        });
    }
    let mut start = 0;
    let mut block_ranks = Vec::new();
    for &w in blocks {
        let cols: Vec<usize> = (start..start + w).collect();
        let rank = direct.select_columns(&cols).rank(field);
        block_ranks.push((w, rank, w.min(a_d.len())));
        start += w;
    }
    Ok(VandermondeProductReport {
        rank: direct.rank(field),
        matrix: direct,
        block_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_formulas() {
        assert_eq!(secrecy_dim_direct(3, 3, 2, 7, 1, 1, &[3, 1, 0]).unwrap(), 1);
        // Observing the repairing group itself adds nothing beyond storage.
        let g: BTreeSet<usize> = [1].into();
        assert_eq!(secrecy_dim_forwarded(3, 3, 2, 7, 1, &g, &[2, 3, 1], &[3, 1, 0]).unwrap(), 3);
        let g3: BTreeSet<usize> = [3].into();
        assert_eq!(secrecy_dim_forwarded(3, 3, 2, 7, 1, &g3, &[2, 3, 1], &[0, 1, 3]).unwrap(), 1);
    }

    #[test]
    fn figure_five_point() {
        let e = [7, 0, 0, 0, 0];
        assert_eq!(secrecy_dim_direct(5, 7, 3, 32, 0, 1, &e).unwrap(), 16);
        let g: BTreeSet<usize> = [3].into();
        let e = [0, 0, 7, 0, 0];
        assert_eq!(secrecy_dim_forwarded(5, 7, 3, 32, 0, &g, &[2, 3, 4, 5, 1], &e).unwrap(), 22);
    }

    #[test]
    fn h_equal_r_gives_zero() {
        // g = 3, r = 3, h = 3: k = 6
        assert_eq!(secrecy_dim_direct(3, 3, 3, 6, 0, 1, &[3, 0, 0]).unwrap(), 0);
        assert_eq!(secrecy_dim_direct(3, 3, 3, 6, 1, 1, &[3, 1, 0]).unwrap(), 0);
    }

    #[test]
    fn bypasses_and_hypotheses() {
        assert_eq!(secrecy_dim_direct(3, 3, 2, 7, 2, 0, &[1, 1, 0]).unwrap(), 5);
        let g: BTreeSet<usize> = [1].into();
        assert_eq!(secrecy_dim_forwarded(2, 3, 2, 4, 0, &g, &[2, 1], &[3, 0]).unwrap(), 1);
        assert!(matches!(
            secrecy_dim_direct(3, 3, 2, 3, 0, 1, &[3, 0, 0]),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            secrecy_dim_direct(3, 3, 4, 7, 0, 1, &[3, 0, 0]),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(clamp_hypothesis(secrecy_dim_direct(3, 3, 2, 3, 0, 1, &[3, 0, 0])).unwrap(), 0);
    }

    #[test]
    fn first_in_list_sees_nothing() {
        let g: BTreeSet<usize> = [2].into();
        assert!(pruned_upstream(&[2, 3, 1], &g, 2).is_empty());
        assert_eq!(
            eavesdropped_dim_forwarded(3, 3, 2, 7, 0, &g, &[2, 3, 1], &[0, 3, 0]).unwrap(),
            3
        );
    }

    #[test]
    fn pruned_upstream_example() {
        let g: BTreeSet<usize> = [3, 5].into();
        let f = [2, 3, 4, 5, 1];
        assert_eq!(pruned_upstream(&f, &g, 5), vec![4]);
        assert_eq!(pruned_upstream(&f, &g, 3), vec![2]);
        assert_eq!(pruned_upstream(&f, &g, 6), Vec::<usize>::new());
    }

    #[test]
    fn entropy_of_trivial_matrices() {
        let f = ExtField::with_default_modulus(3, 1).unwrap();
        let id = Matrix::identity(3);
        let r = entropy_rank_check(&f, &id).unwrap();
        assert_eq!((r.rank, r.entropy_symbols), (3, Some(3)));
        let z = Matrix::zeros(2, 3);
        let r = entropy_rank_check(&f, &z).unwrap();
        assert_eq!((r.rank, r.entropy_symbols), (0, Some(0)));
    }

    #[test]
    fn blind_observer_learns_nothing() {
        let f = ExtField::with_default_modulus(3, 1).unwrap();
        let rep = mi_oracle(&f, 3, 0, |_| Ok(Vec::new())).unwrap();
        assert!(rep.independent);
        assert_eq!(rep.support_observation, 1);
        assert_eq!(rep.mutual_information_bits, 0.0);
    }

    #[test]
    fn empty_far_set() {
        let f = ExtField::with_default_modulus(5, 2).unwrap();
        let a = [f.one(), f.gamma()];
        let rep = vandermonde_product_rank(&f, &a, &[], &[2]).unwrap();
        assert_eq!(rep.rank, 0);
    }
}
