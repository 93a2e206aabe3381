use std::sync::Arc;

use mrlrc::acceptance::{adversarial_case, example_params, random_case, EXAMPLE_FAILURES};
use mrlrc::dss::{parse_transcript, export_transcript, Dss, ForwardingList, RepairSetPolicy, Scheme, TranscriptRound};
use mrlrc::mrlrc::{MrLrcParams, NodePos};
use mrlrc::secrecy::{
    eavesdropped_dim_forwarded, eavesdropped_dimension_rounds, observation_matrix, EavesdropperSpec, LagrangeFrame,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(
    params: &Arc<MrLrcParams>,
    failures: &[NodePos],
    scheme: Scheme,
    flist: Option<&ForwardingList>,
    seed: u64,
) -> Vec<TranscriptRound> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<_> = (0..params.k()).map(|_| params.field().random(&mut rng)).collect();
    let mut dss = Dss::new(params.clone(), params.encode(&u).unwrap()).unwrap();
    dss.fail_nodes(failures).unwrap();
    let rounds = dss.repair_all(scheme, &RepairSetPolicy::Default, flist).unwrap();
    rounds.iter().map(TranscriptRound::from).collect()
}

fn example_failures() -> Vec<NodePos> {
    EXAMPLE_FAILURES.iter().map(|&(i, j)| NodePos::new(i, j)).collect()
}

/// An observed repairing group learns nothing from forwarded repair beyond
/// its own storage, so the formula drops its term.
#[test]
fn observed_target_adds_nothing_under_forwarding() {
    let params = example_params().unwrap();
    let spec = EavesdropperSpec::new(&params, [NodePos::new(2, 0)], [1]).unwrap();
    let flist = ForwardingList::new(vec![2, 3, 1], 3).unwrap();
    let rounds = run(&params, &example_failures(), Scheme::Forwarded, Some(&flist), 1);
    let oracle = eavesdropped_dimension_rounds(&params, &spec, &rounds).unwrap();
    let e = spec.e_vector(&params);
    let formula = eavesdropped_dim_forwarded(3, 3, 2, 7, 1, spec.l2_groups(), flist.order(), &e).unwrap();
    assert_eq!((oracle, formula), (4, 4));
}

/// The symbol an observed group sends downstream is a function of what it
/// received and what it stores.
#[test]
fn outgoing_aggregates_are_redundant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..200 {
        let case = random_case(&mut rng).unwrap();
        if case.scheme != Scheme::Forwarded || case.spec.l2() == 0 {
            continue;
        }
        let p = &case.params;
        let f = p.field();
        let rounds = run(p, &case.failures, Scheme::Forwarded, None, 3);
        let Some(round) = rounds.first() else { continue };
        let order = round.forwarding_list.clone().unwrap();
        let om = observation_matrix(p, &case.spec, round).unwrap();
        let frame = LagrangeFrame::new(p, &round.repair_set).unwrap();
        let mut extended = om.stacked();
        for m in &round.messages {
            if !case.spec.observes_group(m.from_cpu) {
                continue;
            }
            let b = p.tilde_b(p.pos(m.locator_index).unwrap());
            let upto = order.iter().position(|&i| i == m.from_cpu).unwrap();
            let mut row = vec![mrlrc::FieldElement::ZERO; frame.len()];
            for &group in &order[..=upto] {
                for (x, y) in row.iter_mut().zip(frame.group_row(f, group, b)) {
                    *x = f.add(*x, y);
                }
            }
            extended.push_row(&row).unwrap();
            checked += 1;
        }
        assert_eq!(extended.rank(f), om.stacked().rank(f));
    }
    assert!(checked > 0);
}

#[test]
fn adversarial_cases_meet_the_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let case = adversarial_case(&mut rng).unwrap();
        let (formula, oracle) = case.evaluate(&mut rng).unwrap();
        assert_eq!(formula, oracle, "{:?}", case.spec);
    }
}

#[test]
fn transcript_round_trip_preserves_analysis() {
    let params = example_params().unwrap();
    let spec = EavesdropperSpec::new(&params, [NodePos::new(2, 0)], [3]).unwrap();
    let flist = ForwardingList::new(vec![2, 3, 1], 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u: Vec<_> = (0..7).map(|_| params.field().random(&mut rng)).collect();
    let mut dss = Dss::new(params.clone(), params.encode(&u).unwrap()).unwrap();
    dss.fail_nodes(&example_failures()).unwrap();
    let rounds = dss
        .repair_all(Scheme::Forwarded, &RepairSetPolicy::Default, Some(&flist))
        .unwrap();
    let text = export_transcript(params.field(), &rounds);
    let parsed = parse_transcript(params.field(), &text).unwrap();
    let direct: Vec<TranscriptRound> = rounds.iter().map(TranscriptRound::from).collect();
    assert_eq!(parsed, direct);
    assert_eq!(
        eavesdropped_dimension_rounds(&params, &spec, &parsed).unwrap(),
        6
    );
}

#[test]
fn malformed_transcripts_are_rejected() {
    let params = example_params().unwrap();
    assert!(parse_transcript(params.field(), "1,direct,2,1\n").is_err());
    assert!(parse_transcript(params.field(), "# round=x scheme=direct\n").is_err());
}
