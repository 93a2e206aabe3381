//! Pinned acceptance checks shared by the test suite and `mrlrc selftest`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dss::{Dss, ForwardingList, RepairSet, RepairSetPolicy, Scheme, TranscriptRound};
use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};
use crate::linalg::Matrix;
use crate::lrs::LrsParams;
use crate::mrlrc::{MrLrcParams, NodePos};
use crate::secrecy::{
    eavesdropped_dim_direct, eavesdropped_dim_forwarded, eavesdropped_dimension_rounds, entropy_rank_check,
    mi_oracle, observation_matrix, secrecy_dim_direct, secrecy_dim_forwarded, EavesdropperSpec,
};
use crate::sweep::{sweep, SweepParams};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({:.2}s / {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Runs `check`, which returns `(passed, detail)`, and folds in the budget.
fn run(name: &'static str, budget_secs: u64, check: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > budget {
        passed = false;
        detail.push_str("; over time budget");
    }
    Outcome {
        name,
        passed,
        detail,
        elapsed,
        budget,
    }
}

pub type Criterion = fn() -> Outcome;

pub const CRITERIA: [(&str, Criterion); 9] = [
    ("example-1", example_1),
    ("sweep", sweep_series),
    ("worked-example", worked_example),
    ("local-polynomial-sum", local_polynomial_sum),
    ("maximal-recoverability", maximal_recoverability),
    ("mutual-information", mutual_information),
    ("entropy-rank", entropy_rank),
    ("formula-vs-oracle", formula_vs_oracle),
    ("repair-equivalence", repair_equivalence),
];

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|(_, c)| c()).collect()
}

fn field(q: u64, m: usize) -> Arc<ExtField> {
    Arc::new(ExtField::with_default_modulus(q, m).expect("pinned field"))
}

fn pos(list: &[(usize, usize)]) -> Vec<NodePos> {
    list.iter().map(|&(i, j)| NodePos::new(i, j)).collect()
}

/// The three-group system with `r = 3`, `δ = 3`, `k = 7` over `F_{5^3}`.
pub fn example_params() -> Result<Arc<MrLrcParams>> {
    Ok(Arc::new(MrLrcParams::new(field(5, 3), 3, 3, 3, 7)?))
}

pub const EXAMPLE_FAILURES: [(usize, usize); 8] =
    [(1, 0), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (3, 0), (3, 4)];

fn random_message(field: &ExtField, k: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..k).map(|_| field.random(rng)).collect()
}

/// Fails `failures`, runs every global round with `scheme` and returns them.
fn simulate(
    params: &Arc<MrLrcParams>,
    u: &[FieldElement],
    failures: &[NodePos],
    scheme: Scheme,
    policy: &RepairSetPolicy,
    flist: Option<&ForwardingList>,
) -> Result<(Dss, Vec<TranscriptRound>)> {
    let mut dss = Dss::new(params.clone(), params.encode(u)?)?;
    dss.fail_nodes(failures)?;
    let rounds = dss.repair_all(scheme, policy, flist)?;
    Ok((dss, rounds.iter().map(TranscriptRound::from).collect()))
}

pub fn example_1() -> Outcome {
    run("example-1", 5, || {
        let params = example_params()?;
        let (g, r, h, k) = (params.g(), params.r(), params.h(), params.k());
        let failures = pos(&EXAMPLE_FAILURES);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_message(params.field(), k, &mut rng);

        // Direct: the observed group is the repairing one.
        let direct_spec = EavesdropperSpec::new(&params, pos(&[(2, 0)]), [1])?;
        let e = direct_spec.e_vector(&params);
        let ks_direct = secrecy_dim_direct(g, r, h, k, 1, 1, &e)?;
        let (_, rounds) = simulate(&params, &u, &failures, Scheme::Direct, &RepairSetPolicy::Default, None)?;
        let oracle_direct = eavesdropped_dimension_rounds(&params, &direct_spec, &rounds)?;

        // Forwarded: the observed group sits mid-list.
        let fwd_spec = EavesdropperSpec::new(&params, pos(&[(2, 0)]), [3])?;
        let e = fwd_spec.e_vector(&params);
        let flist = ForwardingList::new(vec![2, 3, 1], g)?;
        let ks_fwd = secrecy_dim_forwarded(g, r, h, k, 1, fwd_spec.l2_groups(), flist.order(), &e)?;
        let (_, rounds) =
            simulate(&params, &u, &failures, Scheme::Forwarded, &RepairSetPolicy::Default, Some(&flist))?;
        let oracle_fwd = eavesdropped_dimension_rounds(&params, &fwd_spec, &rounds)?;

        let passed = ks_direct == 1 && ks_fwd == 1 && oracle_direct == 6 && oracle_fwd == 6;
        Ok((
            passed,
            format!(
                "k_s direct {ks_direct}, forwarded {ks_fwd}; oracle k_e direct {oracle_direct}, forwarded {oracle_fwd}"
            ),
        ))
    })
}

pub fn sweep_series() -> Outcome {
    run("sweep", 10, || {
        let rows = sweep(SweepParams { r: 7, h: 3, l1: 0, l2: 1 }, 1, 15)?;
        let mut mismatches = Vec::new();
        for row in &rows {
            let g = row.g;
            let direct = 4 * (g - 1);
            let forwarded = if g <= 2 { 4 * (g - 1) } else { 7 * g - 13 };
            let baseline = 7 * (g - 1);
            if (row.ks_direct, row.ks_forwarded, row.ks_lrc_no_global) != (direct, forwarded, baseline) {
                mismatches.push(g);
            }
        }
        let passed = rows.len() == 15 && mismatches.is_empty();
        Ok((passed, format!("{} rows, mismatching g: {mismatches:?}", rows.len())))
    })
}

/// Row-reduces `m` against the unit rows among its first `pivot_rows`
/// rows. Returns the reduced matrix, the pivot columns and the residual
/// block on the other rows and columns (zero rows dropped).
pub fn reduce_by_unit_rows(m: &Matrix, pivot_rows: usize) -> (Matrix, Vec<usize>, Matrix) {
    let unit_col = |row: &[FieldElement]| -> Option<usize> {
        let nz: Vec<usize> = (0..row.len()).filter(|&c| !row[c].is_zero()).collect();
        (nz.len() == 1 && row[nz[0]] == FieldElement::ONE).then(|| nz[0])
    };
    let rows = m.row_vecs();
    let units: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .take(pivot_rows)
        .filter_map(|(i, row)| unit_col(row).map(|c| (i, c)))
        .collect();
    let pivots: Vec<usize> = units.iter().map(|&(_, c)| c).collect();
    let mut reduced = rows.clone();
    for (i, row) in reduced.iter_mut().enumerate() {
        if units.iter().any(|&(u, _)| u == i) {
            continue;
        }
        for &c in &pivots {
            row[c] = FieldElement::ZERO;
        }
    }
    let keep: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let residual: Vec<Vec<FieldElement>> = reduced
        .iter()
        .enumerate()
        .filter(|(i, _)| !units.iter().any(|&(u, _)| u == *i))
        .map(|(_, row)| keep.iter().map(|&c| row[c]).collect::<Vec<_>>())
        .filter(|row: &Vec<FieldElement>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let residual = if residual.is_empty() {
        Matrix::empty(keep.len())
    } else {
        Matrix::from_rows(residual).expect("uniform width")
    };
    (Matrix::from_rows(reduced).expect("uniform width"), pivots, residual)
}

pub fn worked_example() -> Outcome {
    run("worked-example", 5, || {
        let params = Arc::new(MrLrcParams::new(field(5, 2), 3, 2, 2, 5)?);
        let f = params.field();
        let spec = EavesdropperSpec::new(&params, pos(&[(2, 0)]), [1])?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_message(f, params.k(), &mut rng);
        let (_, rounds) = simulate(
            &params,
            &u,
            &pos(&[(1, 0), (1, 2)]),
            Scheme::Direct,
            &RepairSetPolicy::Default,
            None,
        )?;
        let [round] = rounds.as_slice() else {
            return Ok((false, format!("expected one round, got {}", rounds.len())));
        };
        let om = observation_matrix(&params, &spec, round)?;
        let m = om.stacked();
        let rank = m.rank(f);

        // The leading static row is implied by the download rows.
        let m1 = m.select_rows(&(1..m.rows()).collect::<Vec<_>>());
        let (m2, pivots, m3) = reduce_by_unit_rows(&m1, om.m_st.rows() - 1);
        log::debug!("M'' =\n{}", m2.dump(f));
        let (r1, r2, r3) = (m1.rank(f), m2.rank(f), m3.rank(f));

        let want_set = pos(&[(1, 1), (2, 0), (2, 1), (3, 0), (3, 1)]);
        let passed = round.repair_set == want_set
            && (m.rows(), m.cols()) == (6, 5)
            && rank == 4
            && r1 == 4
            && r2 == 4
            && pivots.len() == 2
            && (m3.rows(), m3.cols()) == (2, 3)
            && r3 == 2
            && pivots.len() + r3 == rank;
        Ok((
            passed,
            format!(
                "M {}x{} rank {rank}; M' rank {r1}; M'' rank {r2}; M''' {}x{} rank {r3}; {} + {r3}",
                m.rows(),
                m.cols(),
                m3.rows(),
                m3.cols(),
                pivots.len()
            ),
        ))
    })
}

/// A uniformly shuffled greedy repair set (at most `r` per group).
pub fn random_repair_set(params: &MrLrcParams, rng: &mut ChaCha8Rng) -> Result<RepairSet> {
    for _ in 0..100 {
        let mut all = params.positions();
        all.shuffle(rng);
        let mut per_group = vec![0usize; params.g() + 1];
        let mut chosen = Vec::new();
        for p in all {
            if chosen.len() == params.k() {
                break;
            }
            if per_group[p.group] < params.r() {
                per_group[p.group] += 1;
                chosen.push(p);
            }
        }
        if let Ok(set) = RepairSet::new(params, chosen) {
            return Ok(set);
        }
    }
    Err(Error::Invariant("no random repair set found".into()))
}

pub fn local_polynomial_sum() -> Outcome {
    run("local-polynomial-sum", 30, || {
        let params = example_params()?;
        let f = params.field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut bad = 0;
        for _ in 0..200 {
            let u = random_message(f, params.k(), &mut rng);
            let dss = Dss::new(params.clone(), params.encode(&u)?)?;
            let set = random_repair_set(&params, &mut rng)?;
            let mut sum = crate::skew::SkewPoly::zero();
            for group in set.groups() {
                sum = sum.add(f, &dss.local_polynomial(group, &set)?);
            }
            if sum != dss.codeword().f {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("200 instances, {bad} mismatches")))
    })
}

pub fn maximal_recoverability() -> Outcome {
    run("maximal-recoverability", 60, || {
        let small = MrLrcParams::new(field(5, 2), 2, 2, 2, 3)?.is_maximally_recoverable()?;
        let large = MrLrcParams::new(field(7, 3), 3, 3, 2, 7)?.is_maximally_recoverable()?;
        let f = field(5, 2);
        let lrs = LrsParams::new(f.clone(), 2, 2, 3)?;
        let one = FieldElement::ONE;
        let zero = FieldElement::ZERO;
        let corrupt = Matrix::from_rows(vec![vec![one, zero, one], vec![zero, one, zero]])?;
        let negative =
            MrLrcParams::with_local_generators_unchecked(lrs, 2, vec![corrupt.clone(), corrupt])?
                .is_maximally_recoverable()?;
        let passed = small.is_mr() && large.is_mr() && !negative.is_mr();
        Ok((
            passed,
            format!(
                "small {} ({} patterns), large {} ({} patterns), corrupted {}",
                small.is_mr(),
                small.patterns,
                large.is_mr(),
                large.patterns,
                if negative.is_mr() { "passes (wrong)" } else { "rejected" }
            ),
        ))
    })
}

/// Everything the eavesdropper sees for message `u`: stored symbols of
/// observed nodes and the payload of every message into an observed group.
pub fn eavesdropper_view(
    params: &Arc<MrLrcParams>,
    spec: &EavesdropperSpec,
    u: &[FieldElement],
    failures: &[NodePos],
    scheme: Scheme,
    flist: Option<&ForwardingList>,
) -> Result<Vec<FieldElement>> {
    let codeword = params.encode(u)?;
    let mut out: Vec<FieldElement> = spec
        .observed_nodes(params)
        .into_iter()
        .map(|p| params.flat(p).map(|mu| codeword.values[mu]))
        .collect::<Result<_>>()?;
    let mut dss = Dss::new(params.clone(), codeword)?;
    dss.fail_nodes(failures)?;
    dss.repair_all(scheme, &RepairSetPolicy::Default, flist)?;
    out.extend(
        dss.transcript()
            .iter()
            .filter(|m| spec.observes_group(m.to_cpu))
            .map(|m| m.payload),
    );
    Ok(out)
}

pub fn mutual_information() -> Outcome {
    run("mutual-information", 60, || {
        let mut details = Vec::new();
        let mut passed = true;

        // Direct: observed group repairs two of its three nodes.
        let params = Arc::new(MrLrcParams::new(field(3, 2), 2, 2, 2, 3)?);
        let spec = EavesdropperSpec::new(&params, [], [1])?;
        let failures = pos(&[(1, 0), (1, 2)]);
        let e = spec.e_vector(&params);
        let k_e = eavesdropped_dim_direct(2, 2, params.h(), 3, 0, 1, &e)?;
        let view = |u: &[FieldElement]| eavesdropper_view(&params, &spec, u, &failures, Scheme::Direct, None);
        let padded = mi_oracle(params.field(), 3, k_e, view)?;
        let bare = mi_oracle(params.field(), 3, 0, view)?;
        passed &= padded.independent && padded.lemma_conditions_hold() && !bare.independent;
        details.push(format!(
            "direct k_e={k_e}: I={:.0} (padded), I={:.3} bits (no padding)",
            padded.mutual_information_bits, bare.mutual_information_bits
        ));

        // Forwarded: the observed group is upstream of the target.
        let params = Arc::new(MrLrcParams::new(field(5, 2), 4, 1, 2, 3)?);
        let spec = EavesdropperSpec::new(&params, [], [3])?;
        let failures = pos(&[(1, 0), (1, 1)]);
        let flist = ForwardingList::new(vec![2, 3, 4, 1], 4)?;
        let e = spec.e_vector(&params);
        let k_e = eavesdropped_dim_forwarded(4, 1, params.h(), 3, 0, spec.l2_groups(), flist.order(), &e)?;
        let view = |u: &[FieldElement]| {
            eavesdropper_view(&params, &spec, u, &failures, Scheme::Forwarded, Some(&flist))
        };
        let padded = mi_oracle(params.field(), 3, k_e, view)?;
        let bare = mi_oracle(params.field(), 3, 0, view)?;
        passed &= padded.independent && padded.lemma_conditions_hold() && !bare.independent;
        details.push(format!(
            "forwarded k_e={k_e}: I={:.0} (padded), I={:.3} bits (no padding)",
            padded.mutual_information_bits, bare.mutual_information_bits
        ));
        Ok((passed, details.join("; ")))
    })
}

pub fn entropy_rank() -> Outcome {
    run("entropy-rank", 30, || {
        let f = ExtField::with_default_modulus(3, 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut bad = 0;
        for _ in 0..50 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let m = Matrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| f.random(&mut rng)).collect())
                    .collect(),
            )?;
            if !entropy_rank_check(&f, &m)?.holds() {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("50 matrices over F_3, {bad} mismatches")))
    })
}

/// One formula-vs-oracle instance.
#[derive(Clone, Debug)]
pub struct SecrecyCase {
    pub params: Arc<MrLrcParams>,
    pub spec: EavesdropperSpec,
    pub failures: Vec<NodePos>,
    pub scheme: Scheme,
    pub policy: RepairSetPolicy,
    pub flist: Option<ForwardingList>,
}

impl SecrecyCase {
    /// `(formula k_e, oracle k_e)` for the case's first global round.
    pub fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
        let p = &self.params;
        let u = random_message(p.field(), p.k(), rng);
        let (_, rounds) = simulate(p, &u, &self.failures, self.scheme, &self.policy, self.flist.as_ref())?;
        let round = rounds
            .first()
            .ok_or_else(|| Error::Invariant("case triggers no global repair".into()))?;
        let e = self.spec.e_vector(p);
        let (l1, l2) = (self.spec.l1(), self.spec.l2());
        let formula = match self.scheme {
            Scheme::Forwarded => {
                let order = round.forwarding_list.clone().expect("forwarded rounds carry a list");
                eavesdropped_dim_forwarded(p.g(), p.r(), p.h(), p.k(), l1, self.spec.l2_groups(), &order, &e)?
            }
            _ => eavesdropped_dim_direct(p.g(), p.r(), p.h(), p.k(), l1, l2, &e)?,
        };
        let oracle = eavesdropped_dimension_rounds(p, &self.spec, &rounds[..1])?;
        Ok((formula, oracle))
    }
}

fn case_codes() -> Result<Vec<Arc<MrLrcParams>>> {
    Ok(vec![
        example_params()?,
        Arc::new(MrLrcParams::new(field(7, 3), 3, 3, 2, 7)?),
        Arc::new(MrLrcParams::new(field(5, 2), 4, 2, 2, 6)?),
    ])
}

/// Failures that force exactly `extra` global repairs in `target` plus
/// `δ - 1` local ones there.
fn target_failures(params: &MrLrcParams, target: usize, extra: usize, rng: &mut ChaCha8Rng) -> Vec<NodePos> {
    let mut nodes: Vec<usize> = (0..params.width()).collect();
    nodes.shuffle(rng);
    nodes
        .into_iter()
        .take(extra + params.delta() - 1)
        .map(|j| NodePos::new(target, j))
        .collect()
}

/// An admissible scenario with random target, failures, eavesdropper and scheme.
pub fn random_case(rng: &mut ChaCha8Rng) -> Result<SecrecyCase> {
    let codes = case_codes()?;
    loop {
        let params = codes[rng.gen_range(0..codes.len())].clone();
        let (g, r, k) = (params.g(), params.r(), params.k());
        let target = rng.gen_range(1..=g);
        let extra = rng.gen_range(1..=params.h());
        let mut failures = target_failures(&params, target, extra, rng);
        for group in (1..=g).filter(|&i| i != target) {
            let count = rng.gen_range(0..params.delta());
            let mut nodes: Vec<usize> = (0..params.width()).collect();
            nodes.shuffle(rng);
            failures.extend(nodes.into_iter().take(count).map(|j| NodePos::new(group, j)));
        }
        let l2 = rng.gen_range(0..=1usize);
        let l2_groups: Vec<usize> = (1..=g).collect::<Vec<_>>().choose_multiple(rng, l2).copied().collect();
        let l1 = rng.gen_range(0..=2usize);
        let candidates: Vec<NodePos> = params
            .positions()
            .into_iter()
            .filter(|p| !l2_groups.contains(&p.group))
            .collect();
        let l1_nodes: Vec<NodePos> = candidates.choose_multiple(rng, l1).copied().collect();
        if l1 + l2 * r >= k {
            continue;
        }
        let spec = EavesdropperSpec::new(&params, l1_nodes, l2_groups)?;
        let scheme = if rng.gen_bool(0.5) { Scheme::Direct } else { Scheme::Forwarded };
        let policy = if rng.gen_bool(0.5) {
            RepairSetPolicy::Default
        } else {
            RepairSetPolicy::Adversarial {
                observed: spec.observed_nodes(&params),
            }
        };
        return Ok(SecrecyCase {
            params,
            spec,
            failures,
            scheme,
            policy,
            flist: None,
        });
    }
}

/// A scenario meeting the extremal conditions of the closed forms: `h`
/// systematic failures in the target, observed nodes placed inside the
/// repair set, the observed group repairing (direct) or upstream of the
/// target (forwarded).
pub fn adversarial_case(rng: &mut ChaCha8Rng) -> Result<SecrecyCase> {
    let codes = case_codes()?;
    loop {
        let params = codes[rng.gen_range(0..codes.len())].clone();
        let (g, r, k, h) = (params.g(), params.r(), params.k(), params.h());
        let scheme = if rng.gen_bool(0.5) { Scheme::Direct } else { Scheme::Forwarded };
        let target = rng.gen_range(1..=g);
        let mut failures: Vec<NodePos> = (0..h).map(|j| NodePos::new(target, j)).collect();
        let mut spare: Vec<usize> = (h..params.width()).collect();
        spare.shuffle(rng);
        failures.extend(spare.into_iter().take(params.delta() - 1).map(|j| NodePos::new(target, j)));

        let others: Vec<usize> = (1..=g).filter(|&i| i != target).collect();
        let (l2_groups, flist) = match scheme {
            Scheme::Direct => (vec![target], None),
            _ => {
                let mut order = others.clone();
                order.shuffle(rng);
                let observed = order[rng.gen_range(0..order.len())];
                order.push(target);
                (vec![observed], Some(ForwardingList::new(order, g)?))
            }
        };
        let free: Vec<usize> = others.iter().copied().filter(|i| !l2_groups.contains(i)).collect();
        let l1 = rng.gen_range(0..=free.len().min(2));
        let mut l1_nodes = Vec::new();
        for &group in free.choose_multiple(rng, l1) {
            l1_nodes.push(NodePos::new(group, rng.gen_range(0..r)));
        }
        if l1 + l2_groups.len() * r >= k {
            continue;
        }
        let spec = EavesdropperSpec::new(&params, l1_nodes, l2_groups)?;
        let policy = RepairSetPolicy::Adversarial {
            observed: spec.observed_nodes(&params),
        };
        return Ok(SecrecyCase {
            params,
            spec,
            failures,
            scheme,
            policy,
            flist,
        });
    }
}

pub fn formula_vs_oracle() -> Outcome {
    run("formula-vs-oracle", 120, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut above = Vec::new();
        for i in 0..100 {
            let case = random_case(&mut rng)?;
            let (formula, oracle) = case.evaluate(&mut rng)?;
            if oracle > formula {
                above.push(i);
            }
        }
        let mut unequal = Vec::new();
        for i in 0..50 {
            let case = adversarial_case(&mut rng)?;
            let (formula, oracle) = case.evaluate(&mut rng)?;
            if oracle != formula {
                unequal.push((i, formula, oracle));
            }
        }
        let passed = above.is_empty() && unequal.is_empty();
        Ok((
            passed,
            format!(
                "random: {} of 100 exceed the formula; adversarial: {} of 50 differ {:?}",
                above.len(),
                unequal.len(),
                unequal.iter().take(5).collect::<Vec<_>>()
            ),
        ))
    })
}

/// Failures that a maximally recoverable code can always repair: any
/// `δ - 1` per group plus at most `h` more spread over the groups.
pub fn recoverable_failures(params: &MrLrcParams, rng: &mut ChaCha8Rng) -> Vec<NodePos> {
    let mut extra = rng.gen_range(0..=params.h());
    let mut out = BTreeSet::new();
    for group in 1..=params.g() {
        let take_extra = if group == params.g() { extra } else { rng.gen_range(0..=extra) };
        extra -= take_extra;
        let count = (rng.gen_range(0..params.delta()) + take_extra).min(params.width());
        let mut nodes: Vec<usize> = (0..params.width()).collect();
        nodes.shuffle(rng);
        out.extend(nodes.into_iter().take(count).map(|j| NodePos::new(group, j)));
    }
    out.into_iter().collect()
}

pub fn repair_equivalence() -> Outcome {
    run("repair-equivalence", 60, || {
        let codes = case_codes()?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut bad = 0;
        let mut global_rounds = 0;
        for _ in 0..200 {
            let params = codes[rng.gen_range(0..codes.len())].clone();
            let u = random_message(params.field(), params.k(), &mut rng);
            let failures = recoverable_failures(&params, &mut rng);
            let truth = params.encode(&u)?.values;
            let mut restored = Vec::new();
            for scheme in [Scheme::Naive, Scheme::Direct, Scheme::Forwarded] {
                let (dss, rounds) =
                    simulate(&params, &u, &failures, scheme, &RepairSetPolicy::Default, None)?;
                global_rounds += rounds.len();
                restored.push(dss.values().to_vec());
            }
            let want: Vec<Option<FieldElement>> = truth.into_iter().map(Some).collect();
            if restored.iter().any(|v| *v != want) {
                bad += 1;
            }
        }
        Ok((
            bad == 0,
            format!("200 scenarios ({global_rounds} global rounds over 3 schemes), {bad} mismatches"),
        ))
    })
}
