//! Scenario files (TOML) and the simulate/analyze drivers.
//!
//! ```toml
//! seed = 7
//! scheme = "direct"            # naive | direct | forwarded
//! forwarding_list = [2, 3, 1]  # optional, forwarded only
//!
//! [field]
//! q = 5
//! m = 3
//!
//! [code]
//! g = 3
//! r = 3
//! delta = 3
//! k = 7
//! k_e = 6                      # padding symbols, default 0
//!
//! [eavesdropper]
//! l1_nodes = [[2, 0]]          # or `l1 = 1` with placement = "worst-case"
//! l2_groups = [1]              # or `l2 = 1` with placement = "worst-case"
//!
//! [failures]
//! positions = [[1, 0], [1, 2], [1, 3], [1, 4], [2, 1], [2, 2], [3, 0], [3, 4]]
//! repair_set_policy = "default" # or "adversarial"
//! ```
//!
//! Node positions are `[group, node]` with 1-based groups and 0-based nodes.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dss::{export_transcript, Dss, ForwardingList, RepairRound, RepairSetPolicy, Scheme, TranscriptRound};
use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldSpec};
use crate::mrlrc::{MrLrcParams, NodePos};
use crate::secrecy::{
    eavesdropped_dim_direct, eavesdropped_dim_forwarded, eavesdropped_dimension_rounds, observation_matrix,
    worst_case_placement, EavesdropperSpec,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub g: usize,
    pub r: usize,
    pub delta: usize,
    pub k: usize,
    #[serde(default)]
    pub k_e: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementKind {
    #[default]
    Explicit,
    WorstCase,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EavesdropperConfig {
    pub l1_nodes: Option<Vec<[usize; 2]>>,
    pub l1: Option<usize>,
    pub l2_groups: Option<Vec<usize>>,
    pub l2: Option<usize>,
    #[serde(default)]
    pub placement: PlacementKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    #[default]
    Default,
    Adversarial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureConfig {
    #[serde(default)]
    pub positions: Vec<[usize; 2]>,
    pub random: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub repair_set_policy: PolicyKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Global parities held fixed while `g` varies; defaults to `r g - k`
    /// of the base code.
    pub h: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub field: FieldSpec,
    pub code: CodeSpec,
    #[serde(default)]
    pub eavesdropper: EavesdropperConfig,
    #[serde(default)]
    pub failures: FailureConfig,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub forwarding_list: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    pub sweep: Option<SweepConfig>,
}

fn default_scheme() -> Scheme {
    Scheme::Direct
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// `(l1, l2)` counts, from explicit lists or bare counts.
    pub fn eavesdropper_counts(&self) -> Result<(usize, usize)> {
        let e = &self.eavesdropper;
        let l1 = match (&e.l1_nodes, e.l1) {
            (Some(v), Some(c)) if v.len() != c => {
                return Err(Error::config("eavesdropper.l1", "disagrees with l1_nodes"))
            }
            (Some(v), _) => v.len(),
            (None, c) => c.unwrap_or(0),
        };
        let l2 = match (&e.l2_groups, e.l2) {
            (Some(v), Some(c)) if v.len() != c => {
                return Err(Error::config("eavesdropper.l2", "disagrees with l2_groups"))
            }
            (Some(v), _) => v.len(),
            (None, c) => c.unwrap_or(0),
        };
        Ok((l1, l2))
    }
}

fn as_config(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    }
}

fn to_pos(field: &str, v: &[usize; 2]) -> Result<NodePos> {
    if v[0] == 0 {
        return Err(Error::config(field, "groups are numbered from 1"));
    }
    Ok(NodePos::new(v[0], v[1]))
}

/// A validated scenario ready to simulate.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub params: Arc<MrLrcParams>,
    pub spec: EavesdropperSpec,
    pub failures: Vec<NodePos>,
    pub policy: RepairSetPolicy,
    pub forwarding_list: Option<ForwardingList>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::new(ScenarioConfig::from_toml_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::new(ScenarioConfig::from_path(path)?)
    }

    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let field = Arc::new(ExtField::from_spec(&config.field).map_err(as_config("field"))?);
        let c = &config.code;
        let params = Arc::new(
            MrLrcParams::new(field, c.g, c.r, c.delta, c.k).map_err(as_config("code"))?,
        );
        if c.k_e >= c.k {
            return Err(Error::config("code.k_e", format!("k_e = {} must be below k = {}", c.k_e, c.k)));
        }

        let failures = Self::resolve_failures(&config, &params)?;
        let forwarding_list = match &config.forwarding_list {
            Some(order) => Some(
                ForwardingList::new(order.clone(), params.g()).map_err(as_config("forwarding_list"))?,
            ),
            None => None,
        };
        let spec = Self::resolve_eavesdropper(&config, &params, &failures, forwarding_list.as_ref())?;
        let policy = match config.failures.repair_set_policy {
            PolicyKind::Default => RepairSetPolicy::Default,
            PolicyKind::Adversarial => RepairSetPolicy::Adversarial {
                observed: spec.observed_nodes(&params),
            },
        };
        Ok(Scenario {
            config,
            params,
            spec,
            failures,
            policy,
            forwarding_list,
        })
    }

    fn resolve_failures(config: &ScenarioConfig, params: &MrLrcParams) -> Result<Vec<NodePos>> {
        let fc = &config.failures;
        let mut out = BTreeSet::new();
        for v in &fc.positions {
            let p = to_pos("failures.positions", v)?;
            params.flat(p).map_err(as_config("failures.positions"))?;
            out.insert(p);
        }
        if let Some(n) = fc.random {
            let mut pool: Vec<NodePos> = params
                .positions()
                .into_iter()
                .filter(|p| !out.contains(p))
                .collect();
            if n > pool.len() {
                return Err(Error::config("failures.random", "more failures than nodes"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(fc.seed.unwrap_or(config.seed));
            pool.shuffle(&mut rng);
            out.extend(pool.into_iter().take(n));
        }
        Ok(out.into_iter().collect())
    }

    fn resolve_eavesdropper(
        config: &ScenarioConfig,
        params: &MrLrcParams,
        failures: &[NodePos],
        flist: Option<&ForwardingList>,
    ) -> Result<EavesdropperSpec> {
        let ec = &config.eavesdropper;
        let (l1, l2) = config.eavesdropper_counts()?;
        match ec.placement {
            PlacementKind::Explicit => {
                if ec.l1_nodes.is_none() && l1 > 0 {
                    return Err(Error::config(
                        "eavesdropper.l1_nodes",
                        "required for explicit placement (or set placement = \"worst-case\")",
                    ));
                }
                if ec.l2_groups.is_none() && l2 > 0 {
                    return Err(Error::config(
                        "eavesdropper.l2_groups",
                        "required for explicit placement (or set placement = \"worst-case\")",
                    ));
                }
                let nodes = ec
                    .l1_nodes
                    .iter()
                    .flatten()
                    .map(|v| to_pos("eavesdropper.l1_nodes", v))
                    .collect::<Result<Vec<_>>>()?;
                let groups = ec.l2_groups.clone().unwrap_or_default();
                EavesdropperSpec::new(params, nodes, groups).map_err(as_config("eavesdropper"))
            }
            PlacementKind::WorstCase => {
                let target = (1..=params.g())
                    .find(|&i| {
                        failures.iter().filter(|p| p.group == i).count() > params.delta() - 1
                    })
                    .unwrap_or(1);
                let order = flist
                    .map(|l| l.order().to_vec())
                    .unwrap_or_else(|| default_order(params.g(), target));
                let placement = worst_case_placement(
                    params.g(),
                    params.r(),
                    params.h(),
                    params.k(),
                    l1,
                    l2,
                    config.scheme,
                    &order,
                )
                .map_err(as_config("eavesdropper"))?;
                let mut nodes = Vec::new();
                for (i, &count) in placement.l1_per_group.iter().enumerate() {
                    let group = i + 1;
                    let mut candidates: Vec<NodePos> = params.group_positions(group);
                    candidates.sort_by_key(|p| (failures.contains(p), p.node));
                    nodes.extend(candidates.into_iter().take(count));
                }
                EavesdropperSpec::new(params, nodes, placement.l2_groups)
                    .map_err(as_config("eavesdropper"))
            }
        }
    }

    /// Runs encode, failure injection, global and local repair, and analysis.
    pub fn simulate(&self) -> Result<Simulation> {
        let field = self.params.field();
        let k_e = self.config.code.k_e;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let u_s: Vec<_> = (0..self.params.k() - k_e).map(|_| field.random(&mut rng)).collect();
        let (_, codeword) = self.params.secure_encode(&u_s, k_e, self.config.seed)?;
        let mut dss = Dss::new(self.params.clone(), codeword)?;
        dss.fail_nodes(&self.failures)?;
        let rounds = dss.repair_all(self.config.scheme, &self.policy, self.forwarding_list.as_ref())?;
        if !dss.failed().is_empty() {
            return Err(Error::Unrecoverable(format!(
                "{} nodes remain failed",
                dss.failed().len()
            )));
        }
        let transcript = export_transcript(field, &rounds);
        let parsed: Vec<TranscriptRound> = rounds.iter().map(TranscriptRound::from).collect();
        let report = self.analyze(&parsed)?;
        Ok(Simulation {
            rounds,
            transcript,
            report,
        })
    }

    /// Formula and oracle side by side for a set of transcript rounds.
    pub fn analyze(&self, rounds: &[TranscriptRound]) -> Result<AnalysisReport> {
        let p = &*self.params;
        let spec = &self.spec;
        let e = spec.e_vector(p);
        let target = rounds.first().map(|r| r.target).unwrap_or(1);
        let order = rounds
            .iter()
            .find_map(|r| r.forwarding_list.clone())
            .or_else(|| self.forwarding_list.as_ref().map(|l| l.order().to_vec()))
            .unwrap_or_else(|| default_order(p.g(), target));
        let direct = eavesdropped_dim_direct(p.g(), p.r(), p.h(), p.k(), spec.l1(), spec.l2(), &e);
        let forwarded = eavesdropped_dim_forwarded(
            p.g(),
            p.r(),
            p.h(),
            p.k(),
            spec.l1(),
            spec.l2_groups(),
            &order,
            &e,
        );
        let mut summaries = Vec::new();
        for r in rounds {
            let om = observation_matrix(p, spec, r)?;
            summaries.push(RoundSummary {
                round: r.round,
                scheme: r.scheme,
                target: r.target,
                repaired: r.repaired.clone(),
                repair_set: r.repair_set.clone(),
                forwarding_list: r.forwarding_list.clone(),
                messages: r.messages.len(),
                static_rows: om.m_st.rows(),
                download_rows: om.m_dl.rows(),
                rank: om.stacked().rank(p.field()),
            });
        }
        let oracle = eavesdropped_dimension_rounds(p, spec, rounds)?;
        let scheme = rounds.first().map(|r| r.scheme).unwrap_or(self.config.scheme);
        let formula_for_scheme = match scheme {
            Scheme::Direct => direct.clone().ok(),
            Scheme::Forwarded => forwarded.clone().ok(),
            Scheme::Naive => None,
        };
        let verdict = match (rounds.is_empty(), formula_for_scheme) {
            (true, _) => "no global repair; static observations only".to_string(),
            (false, None) => "no closed form for this scheme".to_string(),
            (false, Some(f)) if f == oracle => "oracle equals formula".to_string(),
            (false, Some(f)) if oracle < f => "oracle below formula (bound holds)".to_string(),
            (false, Some(_)) => "oracle EXCEEDS formula".to_string(),
        };
        Ok(AnalysisReport {
            scheme,
            g: p.g(),
            r: p.r(),
            delta: p.delta(),
            k: p.k(),
            h: p.h(),
            padding: self.config.code.k_e,
            l1_nodes: spec.l1_nodes().iter().copied().collect(),
            l2_groups: spec.l2_groups().iter().copied().collect(),
            e,
            formula_forwarding_list: order,
            formula_direct: direct.map_err(|e| e.to_string()),
            formula_forwarded: forwarded.map_err(|e| e.to_string()),
            rounds: summaries,
            oracle_k_e: oracle,
            verdict,
        })
    }
}

fn default_order(g: usize, target: usize) -> Vec<usize> {
    (1..=g).filter(|&i| i != target).chain([target]).collect()
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub rounds: Vec<RepairRound>,
    pub transcript: String,
    pub report: AnalysisReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundSummary {
    pub round: usize,
    pub scheme: Scheme,
    pub target: usize,
    pub repaired: Vec<NodePos>,
    pub repair_set: Vec<NodePos>,
    pub forwarding_list: Option<Vec<usize>>,
    pub messages: usize,
    pub static_rows: usize,
    pub download_rows: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub scheme: Scheme,
    pub g: usize,
    pub r: usize,
    pub delta: usize,
    pub k: usize,
    pub h: usize,
    pub padding: usize,
    pub l1_nodes: Vec<NodePos>,
    pub l2_groups: Vec<usize>,
    pub e: Vec<usize>,
    pub formula_forwarding_list: Vec<usize>,
    /// Closed-form eavesdropped dimension, or the violated hypothesis.
    pub formula_direct: std::result::Result<usize, String>,
    pub formula_forwarded: std::result::Result<usize, String>,
    pub rounds: Vec<RoundSummary>,
    pub oracle_k_e: usize,
    pub verdict: String,
}

impl AnalysisReport {
    pub fn oracle_k_s(&self) -> usize {
        self.k.saturating_sub(self.oracle_k_e)
    }
}

fn list<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(T::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn formula_line(k: usize, f: &std::result::Result<usize, String>) -> String {
    match f {
        Ok(k_e) => format!("k_e = {k_e}, k_s = {}", k.saturating_sub(*k_e)),
        Err(e) => format!("n/a ({e})"),
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme: {}", self.scheme)?;
        writeln!(
            f,
            "code: g = {}, r = {}, delta = {}, k = {}, h = {}, padding k_e = {}",
            self.g, self.r, self.delta, self.k, self.h, self.padding
        )?;
        writeln!(
            f,
            "eavesdropper: l1 = {} {}, l2 = {} {}",
            self.l1_nodes.len(),
            list(&self.l1_nodes),
            self.l2_groups.len(),
            list(&self.l2_groups)
        )?;
        writeln!(f, "e: {}", list(&self.e))?;
        for r in &self.rounds {
            write!(
                f,
                "round {}: target {}, repaired {}, repair set {}",
                r.round,
                r.target,
                list(&r.repaired),
                list(&r.repair_set)
            )?;
            if let Some(l) = &r.forwarding_list {
                write!(f, ", forwarding list {}", list(l))?;
            }
            writeln!(
                f,
                ", {} messages, M_st {} rows, M_dl {} rows, rank {}",
                r.messages, r.static_rows, r.download_rows, r.rank
            )?;
        }
        writeln!(f, "formula direct: {}", formula_line(self.k, &self.formula_direct))?;
        writeln!(
            f,
            "formula forwarded (list {}): {}",
            list(&self.formula_forwarding_list),
            formula_line(self.k, &self.formula_forwarded)
        )?;
        writeln!(f, "oracle: k_e = {}, k_s = {}", self.oracle_k_e, self.oracle_k_s())?;
        writeln!(f, "verdict: {}", self.verdict)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
seed = 3
scheme = "direct"
[field]
q = 5
m = 3
[code]
g = 3
r = 3
delta = 3
k = 7
k_e = 6
[eavesdropper]
l1_nodes = [[2, 0]]
l2_groups = [1]
[failures]
positions = [[1, 0], [1, 2], [1, 3], [1, 4], [2, 1], [2, 2], [3, 0], [3, 4]]
"#;

    #[test]
    fn example_config_simulates() {
        let s = Scenario::from_toml_str(EXAMPLE).unwrap();
        let sim = s.simulate().unwrap();
        assert_eq!(sim.report.oracle_k_e, 6);
        assert_eq!(sim.report.formula_direct, Ok(6));
        assert!(sim.report.to_string().contains("k_s = 1"));
    }

    #[test]
    fn unknown_fields_and_bad_values_are_config_errors() {
        let bad = EXAMPLE.replace("delta = 3", "delta = 3\nbogus = 1");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Parse(_))));
        let bad = EXAMPLE.replace("g = 3", "g = 9");
        match Scenario::from_toml_str(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "code"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = EXAMPLE.replace("l2_groups = [1]", "l2 = 1");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Config { .. })));
    }

    #[test]
    fn zero_failures_give_empty_transcript() {
        let cfg = EXAMPLE.replace(
            "positions = [[1, 0], [1, 2], [1, 3], [1, 4], [2, 1], [2, 2], [3, 0], [3, 4]]",
            "positions = []",
        );
        let sim = Scenario::from_toml_str(&cfg).unwrap().simulate().unwrap();
        assert!(sim.transcript.is_empty());
        assert!(sim.rounds.is_empty());
    }

    #[test]
    fn worst_case_placement_resolves() {
        let cfg = EXAMPLE
            .replace("l1_nodes = [[2, 0]]", "l1 = 1")
            .replace("l2_groups = [1]", "l2 = 1\nplacement = \"worst-case\"");
        let s = Scenario::from_toml_str(&cfg).unwrap();
        assert_eq!((s.spec.l1(), s.spec.l2()), (1, 1));
    }
}
