use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use hasse_core::arith::has_subset_sum;
use hasse_core::enumeration::{
    brute_force_locally_contains, classes_on, embedding_fields, enumerate_quadratic_profiles,
};
use hasse_core::places::locally_contains;
use hasse_core::selectivity::check_candidate_e;
use hasse_core::*;
use itertools::Itertools;
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// Invariants as multiples of 1/60, so every denominator up to 6 is exact.
const UNIT: i64 = 60;

fn sixtieths(q: &QMod1) -> i64 {
    let d = q.denom().to_i64().unwrap();
    assert_eq!(UNIT % d, 0, "denominator {d} does not divide {UNIT}");
    q.numer().to_i64().unwrap() * (UNIT / d)
}

fn vector(class: &BrauerClass) -> Vec<i64> {
    class.places().iter().map(|p| sixtieths(&class.invariant(p.id()).unwrap())).collect()
}

fn order_of(k: i64) -> i64 {
    UNIT / num_integer::gcd(k.rem_euclid(UNIT), UNIT)
}

fn mixed_places() -> Arc<PlaceSet> {
    Arc::new(
        PlaceSet::new([Place::real("v1"), Place::complex("w"), Place::finite("p1"), Place::finite("p2")]).unwrap(),
    )
}

fn universe() -> Vec<BrauerClass> {
    classes_on(mixed_places(), 6, &[1, 2, 3, 6].into_iter().collect()).collect()
}

fn fixture_places() -> Arc<PlaceSet> {
    Arc::new(
        PlaceSet::new([
            Place::real("v1"),
            Place::real("v2"),
            Place::complex("w"),
            Place::finite("p1"),
            Place::finite("p2"),
            Place::finite("p3"),
        ])
        .unwrap(),
    )
}

fn q(s: &str) -> QMod1 {
    s.parse().unwrap()
}

#[test]
fn enumeration_matches_raw_filter() {
    let places = mixed_places();
    let allowed = [1i64, 2, 3, 6];
    let per_place: Vec<Vec<i64>> = places
        .iter()
        .map(|p| match p.kind() {
            PlaceKind::Complex => vec![0],
            PlaceKind::Real => vec![0, 30],
            PlaceKind::Finite => (0..UNIT).filter(|k| allowed.contains(&order_of(*k))).collect(),
        })
        .collect();
    let raw: BTreeSet<Vec<i64>> = per_place
        .into_iter()
        .multi_cartesian_product()
        .filter(|v| v.iter().sum::<i64>() % UNIT == 0)
        .collect();
    let enumerated: Vec<Vec<i64>> = universe().iter().map(vector).collect();
    let as_set: BTreeSet<Vec<i64>> = enumerated.iter().cloned().collect();
    assert_eq!(as_set.len(), enumerated.len(), "duplicates in enumeration");
    assert_eq!(as_set, raw);
}

#[test]
fn enumeration_is_deterministic() {
    let a: Vec<String> = universe().iter().map(ToString::to_string).collect();
    let b: Vec<String> = universe().iter().map(ToString::to_string).collect();
    assert_eq!(a, b);
    let ps = fixture_places();
    let x: Vec<QuadraticProfile> = enumerate_quadratic_profiles(&ps).collect();
    let y: Vec<QuadraticProfile> = enumerate_quadratic_profiles(&ps).collect();
    assert_eq!(x, y);
    assert_eq!(x.len(), 2 * 2 * 27);
}

fn class_strategy() -> impl Strategy<Value = BrauerClass> {
    let u = universe();
    (0..u.len()).prop_map(move |i| u[i].clone())
}

proptest! {
    #[test]
    fn fraction_addition_matches_integers(a in -500i64..500, b in -500i64..500, d in 1u64..13, e in 1u64..13) {
        let x = QMod1::new(a, d).unwrap();
        let y = QMod1::new(b, e).unwrap();
        let lhs = &x + &y;
        let de = (d * e) as i64;
        let expected = QMod1::new((a * e as i64 + b * d as i64).rem_euclid(de), de as u64).unwrap();
        prop_assert_eq!(lhs.clone(), expected);
        prop_assert_eq!(lhs.to_string().parse::<QMod1>().unwrap(), lhs.clone());
        prop_assert!(num_integer::Integer::gcd(lhs.numer(), lhs.denom()) == 1u32.into() || lhs.is_zero());
    }

    #[test]
    fn canonical_form_is_idempotent(a in -1000i64..1000, d in 1u64..50) {
        let x = QMod1::new(a, d).unwrap();
        let again = QMod1::new(x.numer().to_i64().unwrap(), x.denom().to_u64().unwrap()).unwrap();
        prop_assert_eq!(again, x);
    }

    #[test]
    fn tensor_is_pointwise(a in class_strategy(), b in class_strategy()) {
        let t = a.tensor(&b).unwrap();
        let expected: Vec<i64> = vector(&a).iter().zip(vector(&b)).map(|(x, y)| (x + y) % UNIT).collect();
        prop_assert_eq!(vector(&t), expected);
        prop_assert_eq!(t, b.tensor(&a).unwrap());
    }

    #[test]
    fn order_is_lcm_of_local_indices(a in class_strategy()) {
        let lcm = vector(&a).iter().fold(1i64, |acc, &k| num_integer::lcm(acc, order_of(k)));
        prop_assert_eq!(a.order().to_i64().unwrap(), lcm);
        for p in a.places().iter() {
            let k = sixtieths(&a.invariant(p.id()).unwrap());
            prop_assert_eq!(a.local_index(p.id()).unwrap().to_i64().unwrap(), order_of(k));
        }
        let first_trivial = (1..=UNIT as u64).find(|&m| a.power(m).is_trivial()).unwrap();
        prop_assert_eq!(first_trivial as i64, lcm);
    }

    #[test]
    fn ramification_grows_monotonically_under_power(a in class_strategy(), k in 1u64..7) {
        let before: BTreeSet<String> = a.power(k).ramification_set(None).iter().map(|p| p.id().to_string()).collect();
        let after: BTreeSet<String> = a.ramification_set(None).iter().map(|p| p.id().to_string()).collect();
        prop_assert!(before.is_subset(&after));
    }

    #[test]
    fn local_containment_matches_assignment_search(
        parts in prop::collection::vec(1u64..7, 1..6),
        behavior in prop::sample::select(LocalBehavior::ALL.to_vec()),
    ) {
        let n: u64 = parts.iter().sum();
        prop_assert_eq!(locally_contains(&parts, n, behavior), brute_force_locally_contains(&parts, n, behavior));
    }

    #[test]
    fn split_containment_is_a_balanced_split(parts in prop::collection::vec(1u64..7, 1..6)) {
        let n: u64 = parts.iter().sum();
        let expected = n % 2 == 0 && has_subset_sum(&parts, n / 2);
        prop_assert_eq!(locally_contains(&parts, n, LocalBehavior::Split), expected);
    }

    #[test]
    fn embedding_matches_divisibility_scan(
        a in class_strategy(),
        parts in prop::collection::vec(prop::sample::select(vec![vec![6], vec![3, 3], vec![2, 2, 2], vec![4, 2], vec![1; 6], vec![5, 1]]), 2),
        real in prop::sample::select(vec![vec![2, 2, 2], vec![2, 2, 1, 1], vec![1; 6]]),
    ) {
        let b = AlgebraDescriptor::new(a.clone(), 6).unwrap();
        let l = FieldLocalData::new(6, [("v1", real), ("w", vec![1; 6]), ("p1", parts[0].clone()), ("p2", parts[1].clone())]);
        let scan = ["v1", "w", "p1", "p2"].iter().all(|id| {
            let k = sixtieths(&a.invariant(id).unwrap());
            l.parts_at(id).unwrap().iter().all(|&d| d as i64 % order_of(k) == 0)
        });
        prop_assert_eq!(embeds_as_maximal_subfield(&l, &b).unwrap().embeds(), scan);
    }

    #[test]
    fn verdict_rate_tracks_status(field_index in 0usize..64, profile_index in 0usize..108, finite in prop::sample::select(vec![("1/3", "2/3"), ("2/3", "1/3")])) {
        let ps = fixture_places();
        let class = BrauerClass::validate([("v1", q("1/2")), ("v2", q("1/2")), ("p1", q(finite.0)), ("p3", q(finite.1))], Arc::clone(&ps)).unwrap();
        let b = AlgebraDescriptor::new(class, 6).unwrap();
        let fields = embedding_fields(&b, 4);
        let l = &fields[field_index % fields.len()];
        let profiles: Vec<QuadraticProfile> = enumerate_quadratic_profiles(&ps).collect();
        let e = &profiles[profile_index];
        let verdict = decide_selectivity(&b, l, std::slice::from_ref(e)).unwrap();
        let rate = verdict.rate().map(|r| r.to_string());
        match verdict.status() {
            Status::Selective => prop_assert_eq!(rate.as_deref(), Some("1/2")),
            Status::NotSelective => prop_assert_eq!(rate.as_deref(), Some("1/1")),
            Status::ConditionallySelective => prop_assert!(false, "candidates were supplied"),
        }
        let table = derive_quadratic_constraints(&b, l).unwrap();
        let accepted = check_candidate_e(e, &b, l).unwrap().accepted();
        prop_assert_eq!(table.admits(e), accepted);
        prop_assert_eq!(verdict.status() == Status::Selective, accepted);
    }

    #[test]
    fn problem_files_round_trip(picks in prop::collection::vec(0usize..1000, 0..5), degree_pick in 0usize..3) {
        let u = universe();
        let places = mixed_places();
        let mut algebras = BTreeMap::new();
        for (i, k) in picks.iter().enumerate() {
            let class = u[k % u.len()].clone();
            let order = class.order().to_u64().unwrap();
            let degree = order * [1, 2, 3][degree_pick];
            algebras.insert(format!("A{i}"), AlgebraDescriptor::new(class, degree).unwrap());
        }
        let file = ProblemFile {
            places,
            algebras,
            fields: [("L".to_string(), FieldLocalData::new(2, [("v1", vec![1, 1]), ("p2", vec![2])]))].into(),
            quadratics: [("E".to_string(), QuadraticProfile::new([("p1", LocalBehavior::Inert)]))].into(),
            queries: Vec::new(),
        };
        let text = file.serialize();
        let parsed = parse_problem_file(&text).unwrap();
        prop_assert_eq!(&parsed, &file);
        prop_assert_eq!(parsed.serialize(), text);
    }

    #[test]
    fn parsing_is_total(text in "\\PC{0,80}") {
        let _ = parse_problem_file(&text);
    }

    #[test]
    fn parsing_is_total_on_near_json(
        key in prop::sample::select(vec!["places", "algebras", "fields", "quadratics", "queries", "x"]),
        value in prop::sample::select(vec!["null", "1", "-1", "0.5", "\"a\"", "[]", "{}", "[{}]", "{\"A\": {}}", "{\"A\": {\"degree\": 2}}"]),
    ) {
        let text = format!("{{\"places\": [{{\"id\": \"p1\", \"kind\": \"finite\"}}], \"{key}\": {value}}}");
        let _ = parse_problem_file(&text);
    }
}
