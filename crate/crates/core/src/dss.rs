//! Distributed-storage simulator with one CPU per group.
//!
//! Global repair of a group that lost more than `δ-1` nodes goes through a
//! minimal repair set `Δ_gl` of `k` intact nodes. Every CPU owning part of
//! `Δ_gl` computes its local polynomial `L_i`; the repairing CPU recovers
//! `f(b̃') = Σ_i L_i(b̃')` for each failed locator `b̃'`, either from one
//! message per group (direct) or from a single aggregate passed along a
//! forwarding list (forwarded). The naive baseline downloads raw symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::mrlrc::{GlobalCodeword, MrLrcParams, NodePos};
use crate::skew::{is_p_independent, newton_interpolate, SkewPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Naive,
    Direct,
    Forwarded,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Naive => "naive",
            Scheme::Direct => "direct",
            Scheme::Forwarded => "forwarded",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "naive" => Ok(Scheme::Naive),
            "direct" => Ok(Scheme::Direct),
            "forwarded" => Ok(Scheme::Forwarded),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

/// One CPU-to-CPU symbol. For direct and forwarded repair `locator_index`
/// is the flat index of the node being repaired; for naive repair it is
/// the flat index of the node whose raw symbol is downloaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub round: usize,
    pub scheme: Scheme,
    pub from_cpu: usize,
    pub to_cpu: usize,
    pub locator_index: usize,
    pub payload: FieldElement,
}

/// A minimal global repair set: `k` intact nodes, at most `r` per group,
/// with P-independent extended locators. Positions are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairSet {
    positions: Vec<NodePos>,
}

impl RepairSet {
    pub fn new(params: &MrLrcParams, mut positions: Vec<NodePos>) -> Result<Self> {
        positions.sort();
        positions.dedup();
        if positions.len() != params.k() {
            return Err(Error::Precondition(format!(
                "repair set must hold k = {} distinct nodes, got {}",
                params.k(),
                positions.len()
            )));
        }
        let mut per_group = BTreeMap::new();
        for p in &positions {
            params.flat(*p)?;
            *per_group.entry(p.group).or_insert(0usize) += 1;
        }
        if let Some((g, c)) = per_group.iter().find(|(_, &c)| c > params.r()) {
            return Err(Error::Precondition(format!(
                "repair set holds {c} > r nodes of group {g}"
            )));
        }
        let locators: Vec<_> = positions.iter().map(|&p| params.tilde_b(p)).collect();
        if !is_p_independent(params.field(), &locators) {
            return Err(Error::NotPIndependent);
        }
        Ok(RepairSet { positions })
    }

    pub fn positions(&self) -> &[NodePos] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, pos: NodePos) -> bool {
        self.positions.binary_search(&pos).is_ok()
    }

    /// Column of `pos` in the `Δ_gl` basis.
    pub fn index_of(&self, pos: NodePos) -> Option<usize> {
        self.positions.binary_search(&pos).ok()
    }

    /// `Δ_gl,1`: groups owning at least one position.
    pub fn groups(&self) -> BTreeSet<usize> {
        self.positions.iter().map(|p| p.group).collect()
    }

    pub fn in_group(&self, group: usize) -> Vec<NodePos> {
        self.positions.iter().copied().filter(|p| p.group == group).collect()
    }
}

impl fmt::Display for RepairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_positions(&self.positions))
    }
}

/// Order `ℱ` in which CPUs aggregate and forward; the last entry repairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardingList {
    order: Vec<usize>,
}

impl ForwardingList {
    pub fn new(order: Vec<usize>, g: usize) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::ForwardingList("empty list".into()));
        }
        let mut seen = BTreeSet::new();
        for &i in &order {
            if i == 0 || i > g {
                return Err(Error::ForwardingList(format!("group {i} outside [1, {g}]")));
            }
            if !seen.insert(i) {
                return Err(Error::ForwardingList(format!("group {i} listed twice")));
            }
        }
        Ok(ForwardingList { order })
    }

    /// Contributing groups in ascending order, then the target.
    pub fn default_for(target: usize, repair_set: &RepairSet) -> Self {
        let mut order: Vec<usize> = repair_set
            .groups()
            .into_iter()
            .filter(|&i| i != target)
            .collect();
        order.push(target);
        ForwardingList { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn target(&self) -> usize {
        *self.order.last().expect("non-empty")
    }

    /// `ℱ_up,i`: groups strictly before `i` (empty when `i` is not listed).
    pub fn upstream(&self, group: usize) -> &[usize] {
        match self.order.iter().position(|&x| x == group) {
            Some(p) => &self.order[..p],
            None => &[],
        }
    }

    /// The list repairs `target` and routes through every contributor.
    pub fn validate_for(&self, target: usize, contributors: &BTreeSet<usize>) -> Result<()> {
        if self.target() != target {
            return Err(Error::ForwardingList(format!(
                "list ends at group {}, repairing group is {target}",
                self.target()
            )));
        }
        if let Some(missing) = contributors.iter().find(|i| !self.order.contains(i)) {
            return Err(Error::ForwardingList(format!(
                "contributing group {missing} is not on the list"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ForwardingList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(";"))
    }
}

/// How `Δ_gl` is picked among intact nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum RepairSetPolicy {
    /// Lexicographically smallest valid set.
    #[default]
    Default,
    /// Observed intact nodes first, then lexicographic fill.
    Adversarial { observed: BTreeSet<NodePos> },
    /// The repairing group's own intact nodes first (naive download).
    OwnGroupFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalRepairOutcome {
    NoFailures,
    Repaired(Vec<NodePos>),
    NeedsGlobal,
}

/// Everything one global repair round did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairRound {
    pub round: usize,
    pub scheme: Scheme,
    pub target: usize,
    /// Nodes restored through global repair.
    pub repaired: Vec<NodePos>,
    /// Nodes of any group restored locally as part of this round.
    pub locally_repaired: Vec<NodePos>,
    pub repair_set: RepairSet,
    pub forwarding_list: Option<ForwardingList>,
    pub messages: Vec<Message>,
}

#[derive(Clone, Debug)]
pub struct Dss {
    params: Arc<MrLrcParams>,
    truth: GlobalCodeword,
    stored: Vec<Option<FieldElement>>,
    transcript: Vec<Message>,
    rounds: usize,
}

impl Dss {
    pub fn new(params: Arc<MrLrcParams>, codeword: GlobalCodeword) -> Result<Self> {
        if codeword.values.len() != params.total_nodes() {
            return Err(Error::LengthMismatch {
                expected: params.total_nodes(),
                got: codeword.values.len(),
            });
        }
        let stored = codeword.values.iter().map(|&v| Some(v)).collect();
        Ok(Dss {
            params,
            truth: codeword,
            stored,
            transcript: Vec::new(),
            rounds: 0,
        })
    }

    pub fn params(&self) -> &MrLrcParams {
        &self.params
    }

    pub fn params_arc(&self) -> &Arc<MrLrcParams> {
        &self.params
    }

    pub fn field(&self) -> &ExtField {
        self.params.field()
    }

    /// The ground-truth codeword the simulator was loaded with.
    pub fn codeword(&self) -> &GlobalCodeword {
        &self.truth
    }

    pub fn transcript(&self) -> &[Message] {
        &self.transcript
    }

    /// Stored value, or `None` while the node is failed.
    pub fn value(&self, pos: NodePos) -> Result<Option<FieldElement>> {
        Ok(self.stored[self.params.flat(pos)?])
    }

    pub fn values(&self) -> &[Option<FieldElement>] {
        &self.stored
    }

    pub fn is_failed(&self, pos: NodePos) -> bool {
        self.params
            .flat(pos)
            .map(|mu| self.stored[mu].is_none())
            .unwrap_or(false)
    }

    pub fn failed(&self) -> Vec<NodePos> {
        self.params
            .positions()
            .into_iter()
            .filter(|&p| self.is_failed(p))
            .collect()
    }

    pub fn failed_in_group(&self, group: usize) -> Vec<NodePos> {
        self.params
            .group_positions(group)
            .into_iter()
            .filter(|&p| self.is_failed(p))
            .collect()
    }

    pub fn intact(&self) -> Vec<NodePos> {
        self.params
            .positions()
            .into_iter()
            .filter(|&p| !self.is_failed(p))
            .collect()
    }

    pub fn needs_global(&self, group: usize) -> bool {
        self.failed_in_group(group).len() > self.params.delta() - 1
    }

    pub fn fail_nodes(&mut self, positions: &[NodePos]) -> Result<()> {
        for &p in positions {
            let mu = self.params.flat(p)?;
            self.stored[mu] = None;
        }
        Ok(())
    }

    fn restore(&mut self, pos: NodePos, value: FieldElement) -> Result<()> {
        let mu = self.params.flat(pos)?;
        if self.truth.values[mu] != value {
            return Err(Error::Invariant(format!("node {pos} restored to a wrong value")));
        }
        self.stored[mu] = Some(value);
        Ok(())
    }

    /// Restores up to `δ-1` failures of one group from `r` intact in-group nodes.
    pub fn local_repair(&mut self, group: usize) -> Result<LocalRepairOutcome> {
        if group == 0 || group > self.params.g() {
            return Err(Error::IndexOutOfRange(format!("group {group}")));
        }
        let failed = self.failed_in_group(group);
        if failed.is_empty() {
            return Ok(LocalRepairOutcome::NoFailures);
        }
        if failed.len() > self.params.delta() - 1 {
            return Ok(LocalRepairOutcome::NeedsGlobal);
        }
        let known: Vec<(usize, FieldElement)> = self
            .params
            .group_positions(group)
            .into_iter()
            .filter_map(|p| self.value(p).ok().flatten().map(|v| (p.node, v)))
            .take(self.params.r())
            .collect();
        let block = self.params.local_decode(group, &known)?;
        for &p in &failed {
            self.restore(p, block[p.node])?;
        }
        Ok(LocalRepairOutcome::Repaired(failed))
    }

    fn local_repair_all_except(&mut self, skip: usize) -> Result<Vec<NodePos>> {
        let mut repaired = Vec::new();
        for i in 1..=self.params.g() {
            if i == skip {
                continue;
            }
            if let LocalRepairOutcome::Repaired(v) = self.local_repair(i)? {
                repaired.extend(v);
            }
        }
        Ok(repaired)
    }

    /// Picks `Δ_gl` among intact nodes according to `policy`.
    pub fn choose_repair_set(&self, target: usize, policy: &RepairSetPolicy) -> Result<RepairSet> {
        let intact = self.intact();
        let mut ordered: Vec<NodePos> = Vec::with_capacity(intact.len());
        match policy {
            RepairSetPolicy::Default => {}
            RepairSetPolicy::Adversarial { observed } => {
                ordered.extend(intact.iter().filter(|p| observed.contains(p)));
            }
            RepairSetPolicy::OwnGroupFirst => {
                ordered.extend(intact.iter().filter(|p| p.group == target));
            }
        }
        let mut taken: BTreeSet<NodePos> = BTreeSet::new();
        let mut per_group = vec![0usize; self.params.g() + 1];
        let k = self.params.k();
        for p in ordered.into_iter().chain(intact.iter().copied()) {
            if taken.len() == k {
                break;
            }
            if taken.contains(&p) || per_group[p.group] == self.params.r() {
                continue;
            }
            per_group[p.group] += 1;
            taken.insert(p);
        }
        if taken.len() < k {
            return Err(Error::Unrecoverable(format!(
                "only {} independent intact symbols, need k = {k}",
                taken.len()
            )));
        }
        RepairSet::new(&self.params, taken.into_iter().collect())
    }

    /// `L_i`: `c/β̃` on group `i`'s part of `Δ_gl`, zero on the rest, degree `< k`.
    pub fn local_polynomial(&self, group: usize, repair_set: &RepairSet) -> Result<SkewPoly> {
        if !repair_set.groups().contains(&group) {
            return Err(Error::Precondition(format!(
                "group {group} owns no node of the repair set"
            )));
        }
        let field = self.field();
        let mut points = Vec::with_capacity(repair_set.len());
        for &p in repair_set.positions() {
            let value = if p.group == group {
                let c = self
                    .value(p)?
                    .ok_or_else(|| Error::Precondition(format!("repair-set node {p} is failed")))?;
                field.div(c, self.params.tilde_beta(p))
            } else {
                FieldElement::ZERO
            };
            points.push((self.params.tilde_b(p), value));
        }
        newton_interpolate(field, &points)
            .map_err(|e| Error::Invariant(format!("local polynomial interpolation failed: {e}")))
    }

    /// One global repair round for `target`, followed by local repair of
    /// its remaining `δ-1` failures. When no repair set exists among the
    /// currently intact nodes, other groups are repaired locally first.
    pub fn repair_group(
        &mut self,
        target: usize,
        scheme: Scheme,
        policy: &RepairSetPolicy,
        flist: Option<&ForwardingList>,
    ) -> Result<RepairRound> {
        if !self.needs_global(target) {
            return Err(Error::Precondition(format!(
                "group {target} does not need global repair"
            )));
        }
        let policy = if scheme == Scheme::Naive {
            &RepairSetPolicy::OwnGroupFirst
        } else {
            policy
        };
        let mut locally_repaired = Vec::new();
        let repair_set = match self.choose_repair_set(target, policy) {
            Ok(set) => set,
            Err(Error::Unrecoverable(_)) => {
                locally_repaired = self.local_repair_all_except(target)?;
                self.choose_repair_set(target, policy)?
            }
            Err(e) => return Err(e),
        };
        let failed = self.failed_in_group(target);
        let global_count = failed.len() - (self.params.delta() - 1);
        if global_count > self.params.h() {
            return Err(Error::Unrecoverable(format!(
                "{global_count} global erasures exceed h = {}",
                self.params.h()
            )));
        }
        let to_repair = failed[..global_count].to_vec();
        self.rounds += 1;
        let round = self.rounds;
        let field = self.params.field_arc().clone();
        let field = &*field;
        let contributors = repair_set.groups();

        let mut messages = Vec::new();
        let mut forwarding_list = None;
        let mut restored = Vec::new();

        if scheme == Scheme::Naive {
            let mut points = Vec::with_capacity(repair_set.len());
            for &p in repair_set.positions() {
                let c = self.value(p)?.expect("repair set is intact");
                if p.group != target {
                    messages.push(Message {
                        round,
                        scheme,
                        from_cpu: p.group,
                        to_cpu: target,
                        locator_index: self.params.flat(p)?,
                        payload: c,
                    });
                }
                points.push((self.params.tilde_b(p), field.div(c, self.params.tilde_beta(p))));
            }
            let f = newton_interpolate(field, &points)?;
            for &p in &to_repair {
                let v = field.mul(f.eval(field, self.params.tilde_b(p)), self.params.tilde_beta(p));
                restored.push((p, v));
            }
        } else {
            let polys: BTreeMap<usize, SkewPoly> = contributors
                .iter()
                .map(|&i| Ok((i, self.local_polynomial(i, &repair_set)?)))
                .collect::<Result<_>>()?;
            let sum = polys
                .values()
                .fold(SkewPoly::zero(), |acc, p| acc.add(field, p));
            if sum != self.truth.f {
                return Err(Error::Invariant(
                    "local polynomials do not sum to the encoding polynomial".into(),
                ));
            }
            let list = match (scheme, flist) {
                (Scheme::Forwarded, Some(l)) => {
                    l.validate_for(target, &contributors)?;
                    Some(l.clone())
                }
                (Scheme::Forwarded, None) => Some(ForwardingList::default_for(target, &repair_set)),
                _ => None,
            };
            for &p in &to_repair {
                let b = self.params.tilde_b(p);
                let mu = self.params.flat(p)?;
                let contribution = |i: usize| {
                    polys
                        .get(&i)
                        .map_or(FieldElement::ZERO, |poly| poly.eval(field, b))
                };
                let mut acc = contribution(target);
                match &list {
                    None => {
                        for &i in contributors.iter().filter(|&&i| i != target) {
                            let payload = contribution(i);
                            messages.push(Message {
                                round,
                                scheme,
                                from_cpu: i,
                                to_cpu: target,
                                locator_index: mu,
                                payload,
                            });
                            acc = field.add(acc, payload);
                        }
                    }
                    Some(l) => {
                        let mut s = FieldElement::ZERO;
                        for w in l.order().windows(2) {
                            s = field.add(s, contribution(w[0]));
                            messages.push(Message {
                                round,
                                scheme,
                                from_cpu: w[0],
                                to_cpu: w[1],
                                locator_index: mu,
                                payload: s,
                            });
                        }
                        acc = field.add(acc, s);
                    }
                }
                restored.push((p, field.mul(acc, self.params.tilde_beta(p))));
            }
            forwarding_list = list;
        }

        for (p, v) in restored {
            self.restore(p, v)?;
        }
        if let LocalRepairOutcome::Repaired(v) = self.local_repair(target)? {
            locally_repaired.extend(v);
        }
        self.transcript.extend(messages.iter().cloned());
        Ok(RepairRound {
            round,
            scheme,
            target,
            repaired: to_repair,
            locally_repaired,
            repair_set,
            forwarding_list,
            messages,
        })
    }

    /// Repairs every failure: one global round per group that needs it (in
    /// group order), then local repair everywhere. A forwarding list, when
    /// given, applies to the round whose target it ends at.
    pub fn repair_all(
        &mut self,
        scheme: Scheme,
        policy: &RepairSetPolicy,
        flist: Option<&ForwardingList>,
    ) -> Result<Vec<RepairRound>> {
        let mut rounds = Vec::new();
        for target in 1..=self.params.g() {
            if self.needs_global(target) {
                let list = flist.filter(|l| l.target() == target);
                rounds.push(self.repair_group(target, scheme, policy, list)?);
            }
        }
        let mut tail = self.local_repair_all_except(0)?;
        if let Some(last) = rounds.last_mut() {
            last.locally_repaired.append(&mut tail);
        }
        Ok(rounds)
    }
}

fn join_positions(ps: &[NodePos]) -> String {
    let parts: Vec<String> = ps.iter().map(NodePos::to_string).collect();
    parts.join(";")
}

fn parse_positions(s: &str) -> Result<Vec<NodePos>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| {
            let inner = t
                .trim()
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad node position `{t}`")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad node position `{t}`")))?;
            Ok(NodePos::new(parse_num(a)?, parse_num(b)?))
        })
        .collect()
}

fn parse_num(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
}

/// A round as recovered from a transcript file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptRound {
    pub round: usize,
    pub scheme: Scheme,
    pub target: usize,
    pub repaired: Vec<NodePos>,
    pub repair_set: Vec<NodePos>,
    pub forwarding_list: Option<Vec<usize>>,
    pub messages: Vec<Message>,
}

impl From<&RepairRound> for TranscriptRound {
    fn from(r: &RepairRound) -> Self {
        TranscriptRound {
            round: r.round,
            scheme: r.scheme,
            target: r.target,
            repaired: r.repaired.clone(),
            repair_set: r.repair_set.positions().to_vec(),
            forwarding_list: r.forwarding_list.as_ref().map(|l| l.order().to_vec()),
            messages: r.messages.clone(),
        }
    }
}

/// Line-delimited transcript: a `#` header per round, then one
/// `round,scheme,from_cpu,to_cpu,locator_index,(coords)` record per message.
pub fn export_transcript(field: &ExtField, rounds: &[RepairRound]) -> String {
    let mut out = String::new();
    for r in rounds {
        out.push_str(&format!(
            "# round={} scheme={} target={} repaired={} repair_set={}",
            r.round,
            r.scheme,
            r.target,
            join_positions(&r.repaired),
            r.repair_set
        ));
        if let Some(l) = &r.forwarding_list {
            out.push_str(&format!(" flist={l}"));
        }
        out.push('\n');
        for m in &r.messages {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                m.round,
                m.scheme,
                m.from_cpu,
                m.to_cpu,
                m.locator_index,
                field.display(m.payload)
            ));
        }
    }
    out
}

pub fn parse_transcript(field: &ExtField, text: &str) -> Result<Vec<TranscriptRound>> {
    let mut rounds: Vec<TranscriptRound> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let ctx = |e: Error| Error::Parse(format!("line {}: {e}", lineno + 1));
        if let Some(header) = line.strip_prefix('#') {
            let mut fields = BTreeMap::new();
            for tok in header.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    fields.insert(k, v);
                }
            }
            let get = |k: &str| {
                fields
                    .get(k)
                    .copied()
                    .ok_or_else(|| ctx(Error::Parse(format!("missing `{k}`"))))
            };
            let flist = match fields.get("flist") {
                Some(v) => Some(v.split(';').map(parse_num).collect::<Result<Vec<_>>>().map_err(ctx)?),
                None => None,
            };
            rounds.push(TranscriptRound {
                round: parse_num(get("round")?).map_err(ctx)?,
                scheme: get("scheme")?.parse().map_err(ctx)?,
                target: parse_num(get("target")?).map_err(ctx)?,
                repaired: parse_positions(get("repaired")?).map_err(ctx)?,
                repair_set: parse_positions(get("repair_set")?).map_err(ctx)?,
                forwarding_list: flist,
                messages: Vec::new(),
            });
            continue;
        }
        let parts: Vec<&str> = line.splitn(6, ',').collect();
        if parts.len() != 6 {
            return Err(ctx(Error::Parse("expected 6 comma-separated fields".into())));
        }
        let coords: Vec<u64> = parts[5]
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split_whitespace()
            .map(|c| c.parse().map_err(|_| Error::Parse(format!("bad coordinate `{c}`"))))
            .collect::<Result<_>>()
            .map_err(ctx)?;
        let message = Message {
            round: parse_num(parts[0]).map_err(ctx)?,
            scheme: parts[1].parse().map_err(ctx)?,
            from_cpu: parse_num(parts[2]).map_err(ctx)?,
            to_cpu: parse_num(parts[3]).map_err(ctx)?,
            locator_index: parse_num(parts[4]).map_err(ctx)?,
            payload: field.from_coords(&coords).map_err(ctx)?,
        };
        let current = rounds
            .last_mut()
            .filter(|r| r.round == message.round)
            .ok_or_else(|| ctx(Error::Parse("message without a matching round header".into())))?;
        current.messages.push(message);
    }
    Ok(rounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Dss {
        let field = Arc::new(ExtField::with_default_modulus(5, 3).unwrap());
        let params = Arc::new(MrLrcParams::new(field, 3, 3, 3, 7).unwrap());
        let u: Vec<_> = (0..7).map(|i| params.field().element(7 * i + 3).unwrap()).collect();
        let cw = params.encode(&u).unwrap();
        Dss::new(params, cw).unwrap()
    }

    fn fig1_failures() -> Vec<NodePos> {
        [(1, 0), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (3, 0), (3, 4)]
            .iter()
            .map(|&(i, j)| NodePos::new(i, j))
            .collect()
    }

    #[test]
    fn failing_nothing_changes_nothing() {
        let mut d = fig1();
        d.fail_nodes(&[]).unwrap();
        assert!(d.failed().is_empty());
        assert_eq!(d.local_repair(1).unwrap(), LocalRepairOutcome::NoFailures);
    }

    #[test]
    fn figure_one_needs_global_only_in_group_one() {
        let mut d = fig1();
        d.fail_nodes(&fig1_failures()).unwrap();
        assert!(d.needs_global(1));
        assert!(!d.needs_global(2));
        assert!(!d.needs_global(3));
    }

    #[test]
    fn figure_one_repair_set() {
        let mut d = fig1();
        d.fail_nodes(&fig1_failures()).unwrap();
        let set = d.choose_repair_set(1, &RepairSetPolicy::Default).unwrap();
        assert_eq!(
            set.to_string(),
            "(1,1);(2,0);(2,3);(2,4);(3,1);(3,2);(3,3)"
        );
    }

    #[test]
    fn local_threshold() {
        let mut d = fig1();
        d.fail_nodes(&[NodePos::new(2, 0), NodePos::new(2, 4)]).unwrap();
        assert!(matches!(d.local_repair(2).unwrap(), LocalRepairOutcome::Repaired(_)));
        assert!(d.failed().is_empty());
        d.fail_nodes(&[NodePos::new(3, 0), NodePos::new(3, 1), NodePos::new(3, 2)]).unwrap();
        assert_eq!(d.local_repair(3).unwrap(), LocalRepairOutcome::NeedsGlobal);
    }

    #[test]
    fn direct_and_forwarded_message_counts() {
        for scheme in [Scheme::Direct, Scheme::Forwarded] {
            let mut d = fig1();
            d.fail_nodes(&fig1_failures()).unwrap();
            let rounds = d.repair_all(scheme, &RepairSetPolicy::Default, None).unwrap();
            assert!(d.failed().is_empty());
            assert_eq!(rounds.len(), 1);
            assert_eq!(rounds[0].repaired, vec![NodePos::new(1, 0), NodePos::new(1, 2)]);
            // two contributing groups besides the target, two globally repaired nodes
            assert_eq!(rounds[0].messages.len(), 4);
            if scheme == Scheme::Forwarded {
                assert_eq!(rounds[0].forwarding_list.as_ref().unwrap().order(), &[2, 3, 1]);
                assert!(rounds[0].messages.iter().any(|m| m.from_cpu == 2 && m.to_cpu == 3));
            }
        }
    }

    #[test]
    fn too_many_failures_is_unrecoverable() {
        let mut d = fig1();
        let mut fails = fig1_failures();
        fails.push(NodePos::new(1, 1));
        d.fail_nodes(&fails).unwrap();
        let err = d.repair_all(Scheme::Direct, &RepairSetPolicy::Default, None).unwrap_err();
        assert!(matches!(err, Error::Unrecoverable(_)));
    }

    #[test]
    fn transcript_round_trip() {
        let mut d = fig1();
        d.fail_nodes(&fig1_failures()).unwrap();
        let rounds = d.repair_all(Scheme::Forwarded, &RepairSetPolicy::Default, None).unwrap();
        let text = export_transcript(d.field(), &rounds);
        let parsed = parse_transcript(d.field(), &text).unwrap();
        assert_eq!(parsed, rounds.iter().map(TranscriptRound::from).collect::<Vec<_>>());
    }

    #[test]
    fn forwarding_list_validation() {
        assert!(ForwardingList::new(vec![], 3).is_err());
        assert!(ForwardingList::new(vec![2, 2, 1], 3).is_err());
        assert!(ForwardingList::new(vec![4, 1], 3).is_err());
        let l = ForwardingList::new(vec![2, 3, 1], 3).unwrap();
        assert_eq!(l.upstream(1), &[2, 3]);
        assert_eq!(l.upstream(2), &[] as &[usize]);
        assert!(l.validate_for(2, &BTreeSet::new()).is_err());
    }
}
