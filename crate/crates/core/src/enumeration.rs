//! Exhaustive small universes of Brauer classes, field data, and quadratic
//! profiles, plus a sweep that replays the selectivity decision over all of
//! them and audits every verdict by independent means.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, partitions_with_parts, valuation};
use crate::brauer::{AlgebraDescriptor, BrauerClass};
use crate::embeddings::embeds_as_maximal_subfield;
use crate::fraction::QMod1;
use crate::places::{FieldLocalData, LocalBehavior, Place, PlaceKind, PlaceSet, QuadraticProfile};
use crate::selectivity::{decide_selectivity, decompose, Decomposition, SelectivityVerdict, Status};

/// Shape of an enumerated universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub real: usize,
    pub complex: usize,
    pub finite: usize,
    pub min_degree: u64,
    pub max_degree: u64,
    /// Allowed invariant denominators; `1` stands for the zero invariant.
    pub denominators: BTreeSet<u64>,
    /// Cap on the number of local partitions tried per place in the sweep.
    pub partitions_per_place: usize,
    /// Cap on the number of selectivity decisions made by the sweep.
    pub budget: u64,
}

impl Default for EnumerationSpec {
    fn default() -> Self {
        Self {
            real: 2,
            complex: 1,
            finite: 3,
            min_degree: 3,
            max_degree: 6,
            denominators: (1..=6).collect(),
            partitions_per_place: 4,
            budget: 5_000_000,
        }
    }
}

impl EnumerationSpec {
    pub fn with_degrees(min_degree: u64, max_degree: u64) -> Self {
        Self {
            min_degree,
            max_degree,
            denominators: (1..=max_degree.max(1)).collect(),
            ..Self::default()
        }
    }

    /// Real places `v1, v2, ..`, complex `w` (or `w1, w2, ..`), finite `p1, p2, ..`.
    pub fn place_set(&self) -> Arc<PlaceSet> {
        let mut places = Vec::new();
        places.extend((1..=self.real).map(|i| Place::real(format!("v{i}"))));
        if self.complex == 1 {
            places.push(Place::complex("w"));
        } else {
            places.extend((1..=self.complex).map(|i| Place::complex(format!("w{i}"))));
        }
        places.extend((1..=self.finite).map(|i| Place::finite(format!("p{i}"))));
        Arc::new(PlaceSet::new(places).expect("generated ids are distinct"))
    }
}

/// Invariant values a place may carry when denominators divide `max_degree`
/// and lie in `allowed`.
pub fn local_values(kind: PlaceKind, max_degree: u64, allowed: &BTreeSet<u64>) -> Vec<QMod1> {
    let mut values = vec![QMod1::zero()];
    match kind {
        PlaceKind::Complex => {}
        PlaceKind::Real => {
            if allowed.contains(&2) && max_degree % 2 == 0 {
                values.push(QMod1::half());
            }
        }
        PlaceKind::Finite => {
            for &d in allowed.iter().filter(|&&d| d > 1 && max_degree % d == 0) {
                for a in 1..d {
                    if num_integer::gcd(a, d) == 1 {
                        values.push(QMod1::new(a, d).expect("positive denominator"));
                    }
                }
            }
        }
    }
    values
}

/// Odometer over the per-place value lists, yielding the valid classes.
pub struct ClassEnumerator {
    places: Arc<PlaceSet>,
    values: Vec<Vec<QMod1>>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for ClassEnumerator {
    type Item = BrauerClass;

    fn next(&mut self) -> Option<BrauerClass> {
        while !self.done {
            let sum = self
                .digits
                .iter()
                .zip(&self.values)
                .fold(QMod1::zero(), |acc, (&d, vals)| &acc + &vals[d]);
            let current = sum.is_zero().then(|| {
                let raw: Vec<(&str, QMod1)> = self
                    .places
                    .iter()
                    .zip(self.digits.iter().zip(&self.values))
                    .map(|(p, (&d, vals))| (p.id(), vals[d].clone()))
                    .collect();
                BrauerClass::validate(raw, Arc::clone(&self.places)).expect("sum-zero local values form a class")
            });
            self.advance();
            if current.is_some() {
                return current;
            }
        }
        None
    }
}

impl ClassEnumerator {
    fn advance(&mut self) {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.values[i].len() {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

/// Every valid class on the place set of `spec` with denominators dividing
/// `max_degree` and drawn from the allowed set, each once, in a fixed order.
pub fn enumerate_classes(spec: &EnumerationSpec) -> ClassEnumerator {
    classes_on(spec.place_set(), spec.max_degree, &spec.denominators)
}

pub fn classes_on(places: Arc<PlaceSet>, max_degree: u64, allowed: &BTreeSet<u64>) -> ClassEnumerator {
    let values: Vec<Vec<QMod1>> = places
        .iter()
        .map(|p| local_values(p.kind(), max_degree, allowed))
        .collect();
    ClassEnumerator {
        digits: vec![0; values.len()],
        values,
        places,
        done: false,
    }
}

/// All split/inert/ramified assignments over the non-complex places.
pub fn enumerate_quadratic_profiles(places: &PlaceSet) -> impl Iterator<Item = QuadraticProfile> + '_ {
    let slots: Vec<(&Place, &'static [LocalBehavior])> = places
        .iter()
        .filter(|p| p.kind() != PlaceKind::Complex)
        .map(|p| (p, LocalBehavior::admissible(p.kind())))
        .collect();
    let total: usize = slots.iter().map(|(_, b)| b.len()).product();
    (0..total).map(move |mut k| {
        let mut entries = Vec::with_capacity(slots.len());
        for (place, options) in slots.iter().rev() {
            entries.push((place.id(), options[k % options.len()]));
            k /= options.len();
        }
        QuadraticProfile::new(entries)
    })
}

/// Partitions of `n` that can occur as local degrees at a place of `kind`,
/// with parts dividing `n` and divisible by `index`.
pub fn local_partitions(kind: PlaceKind, n: u64, index: u64) -> Vec<Vec<u64>> {
    let parts: Vec<u64> = match kind {
        PlaceKind::Complex => vec![1],
        PlaceKind::Real => vec![1, 2],
        PlaceKind::Finite => divisors(n),
    };
    let parts: Vec<u64> = parts.into_iter().filter(|p| p % index == 0).collect();
    partitions_with_parts(n, &parts)
}

/// Evenly spaced sample of at most `cap` items, always keeping both ends.
fn spread<T: Clone>(items: &[T], cap: usize) -> Vec<T> {
    if items.len() <= cap || cap == 0 {
        return items.to_vec();
    }
    if cap == 1 {
        return vec![items[0].clone()];
    }
    let last = items.len() - 1;
    let mut picked: Vec<usize> = (0..cap).map(|i| (i * last + (cap - 1) / 2) / (cap - 1)).collect();
    picked.dedup();
    picked.into_iter().map(|i| items[i].clone()).collect()
}

/// Field data of degree `n` embedding in `algebra`, declared at every place.
pub fn embedding_fields(algebra: &AlgebraDescriptor, cap: usize) -> Vec<FieldLocalData> {
    let n = algebra.degree();
    let places = algebra.places();
    let options: Vec<Vec<Vec<u64>>> = places
        .iter()
        .map(|p| {
            let index = algebra.local_index(p.id()).expect("own place");
            spread(&local_partitions(p.kind(), n, index), cap)
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; options.len()];
    loop {
        out.push(FieldLocalData::new(
            n,
            places
                .iter()
                .zip(&digits)
                .zip(&options)
                .map(|((p, &d), opts)| (p.id(), opts[d].clone())),
        ));
        let mut i = options.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < options[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Brute force: can the places of `L` over `v` (local degrees `parts`) be
/// distributed over the places of `E` above `v` so that each receives
/// relative degree `[L:E] = n/2` with every local degree divisible by that of
/// `E`? Tries every assignment.
pub fn brute_force_locally_contains(parts: &[u64], n: u64, behavior: LocalBehavior) -> bool {
    if n % 2 != 0 {
        return false;
    }
    let (targets, local_degree): (usize, u64) = match behavior {
        LocalBehavior::Split => (2, 1),
        LocalBehavior::Inert | LocalBehavior::Ramified => (1, 2),
    };
    let assignments = targets.pow(parts.len() as u32);
    (0..assignments).any(|mut code| {
        let mut relative = vec![0u64; targets];
        for &part in parts {
            let q = code % targets;
            code /= targets;
            if part % local_degree != 0 {
                return false;
            }
            relative[q] += part / local_degree;
        }
        relative.iter().all(|&r| r == n / 2)
    })
}

/// Re-verifies a selective verdict without going through the engine's own
/// checks. Returns a description of every failed condition.
pub fn audit_selective(
    algebra: &AlgebraDescriptor,
    field: &FieldLocalData,
    decomposition: &Decomposition,
    chosen: &QuadraticProfile,
) -> Vec<String> {
    let mut problems = Vec::new();
    let n = algebra.degree();
    let places = algebra.places();

    if !(n % 2 == 0 && (n / 2) % 2 == 1) {
        problems.push(format!("condition 1: degree {n} is not twice an odd number"));
    }
    for (id, value) in algebra.class().to_raw() {
        let kind = places.get(&id).expect("own place").kind();
        if kind == PlaceKind::Finite && value.denom().to_u64().map_or(true, |e| e % 2 == 0) {
            problems.push(format!("condition 2: even local index at {id}"));
        }
    }
    problems.extend(audit_decomposition(algebra, decomposition));

    let t: BTreeSet<&str> = decomposition.real_ramified.iter().map(String::as_str).collect();
    for place in places.iter() {
        let behavior = match place.kind() {
            PlaceKind::Complex => LocalBehavior::Split,
            _ => match chosen.declared(place.id()) {
                Some(b) => b,
                None if t.contains(place.id()) => {
                    problems.push(format!("condition 4: E undeclared at {}", place.id()));
                    continue;
                }
                None => continue,
            },
        };
        if let Some(parts) = field.parts_at(place.id()) {
            if !brute_force_locally_contains(parts, n, behavior) {
                problems.push(format!("condition 4: E is {behavior} at {} but not inside L there", place.id()));
            }
        }
        let ok = match place.kind() {
            PlaceKind::Finite => behavior != LocalBehavior::Ramified,
            PlaceKind::Real if t.contains(place.id()) => behavior == LocalBehavior::Ramified,
            PlaceKind::Real => behavior == LocalBehavior::Split,
            PlaceKind::Complex => true,
        };
        if !ok {
            problems.push(format!("condition 4: E is {behavior} at {}", place.id()));
        }
    }

    // E embeds in B1, replayed through the general maximal-subfield test.
    let as_field = FieldLocalData::new(
        2,
        places.iter().filter_map(|p| {
            let b = match p.kind() {
                PlaceKind::Complex => LocalBehavior::Split,
                _ => chosen.declared(p.id())?,
            };
            Some((p.id(), if b == LocalBehavior::Split { vec![1, 1] } else { vec![2] }))
        }),
    );
    match embeds_as_maximal_subfield(&as_field, &decomposition.quaternion_part) {
        Ok(d) if d.embeds() => {}
        other => problems.push(format!("condition 4: E does not embed in B1 ({other:?})")),
    }

    let definite = places.of_kind(PlaceKind::Complex).next().is_none()
        && places.of_kind(PlaceKind::Real).all(|p| t.contains(p.id()));
    if definite {
        problems.push("condition 4: B1 is totally definite".into());
    }
    problems
}

/// Checks the decomposition invariants by pointwise arithmetic.
pub fn audit_decomposition(algebra: &AlgebraDescriptor, decomposition: &Decomposition) -> Vec<String> {
    let mut problems = Vec::new();
    let places = algebra.places();
    let b1 = decomposition.quaternion_part.class();
    let b2 = decomposition.odd_part.class();
    for place in places.iter() {
        let id = place.id();
        let lhs = algebra.class().invariant(id).expect("own place");
        let u = b1.invariant(id).expect("own place");
        let v = b2.invariant(id).expect("own place");
        if &u + &v != lhs {
            problems.push(format!("decomposition: {u} + {v} ≠ {lhs} at {id}"));
        }
        let in_t = decomposition.real_ramified.iter().any(|t| t == id);
        let expected = if in_t { QMod1::half() } else { QMod1::zero() };
        if u != expected {
            problems.push(format!("decomposition: B1 has invariant {u} at {id}"));
        }
        if in_t && place.kind() != PlaceKind::Real {
            problems.push(format!("decomposition: {id} in T is not real"));
        }
    }
    if decomposition.real_ramified.len() % 2 != 0 {
        problems.push(format!("decomposition: |T| = {} is odd", decomposition.real_ramified.len()));
    }
    let n = algebra.degree();
    if decomposition.quaternion_part.degree() != 2 {
        problems.push("decomposition: B1 is not quaternion".into());
    }
    if decomposition.odd_part.degree() != n / 2 || decomposition.odd_part.class_order() != n / 2 {
        problems.push(format!(
            "decomposition: B2 has degree {} and order {}, expected {}",
            decomposition.odd_part.degree(),
            decomposition.odd_part.class_order(),
            n / 2
        ));
    }
    problems
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub degrees: Vec<u64>,
    pub places: usize,
    pub descriptors: u64,
    pub field_data: u64,
    pub decisions: u64,
    pub selective: u64,
    pub not_selective: u64,
    pub conditional: u64,
    pub selective_by_degree: BTreeMap<u64, u64>,
    pub audited: u64,
    pub counterexamples: Vec<String>,
    pub complete: bool,
}

impl SweepReport {
    /// Associative, commutative merge of count fields; counterexamples are
    /// concatenated in call order.
    pub fn merge(&mut self, other: SweepReport) {
        self.descriptors += other.descriptors;
        self.field_data += other.field_data;
        self.decisions += other.decisions;
        self.selective += other.selective;
        self.not_selective += other.not_selective;
        self.conditional += other.conditional;
        self.audited += other.audited;
        for (d, c) in other.selective_by_degree {
            *self.selective_by_degree.entry(d).or_default() += c;
        }
        self.counterexamples.extend(other.counterexamples);
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

struct Job {
    algebra: AlgebraDescriptor,
    fields: Vec<FieldLocalData>,
    passes_conditions: bool,
}

impl Job {
    fn cost(&self, profiles: u64) -> u64 {
        let per_field = if self.passes_conditions { 1 + profiles } else { 1 };
        self.fields.len() as u64 * per_field
    }
}

/// Decides every (B, L, E) in the universe and audits the outcome.
///
/// For each division descriptor `B` of degree in `[min_degree, max_degree]`,
/// each sampled `L` embedding in `B`, and each quadratic profile `E`:
/// selective verdicts must pass [`audit_selective`], decompositions must pass
/// [`audit_decomposition`], descriptors failing the degree or finite-parity
/// condition must never be selective, and the derived constraint table must
/// admit exactly the accepted profiles. Any breach is a counterexample.
pub fn theorem_consistency_sweep(spec: &EnumerationSpec) -> SweepReport {
    let places = spec.place_set();
    let profiles: Vec<QuadraticProfile> = enumerate_quadratic_profiles(&places).collect();
    let degrees: Vec<u64> = (spec.min_degree.max(1)..=spec.max_degree).collect();

    let mut jobs = Vec::new();
    for &n in &degrees {
        let allowed: BTreeSet<u64> = spec.denominators.iter().copied().filter(|d| n % d == 0).collect();
        for class in classes_on(Arc::clone(&places), n, &allowed) {
            let Ok(algebra) = AlgebraDescriptor::new(class, n) else { continue };
            if !algebra.is_division() {
                continue;
            }
            let fields = embedding_fields(&algebra, spec.partitions_per_place);
            let passes_conditions = independent_conditions_hold(&algebra);
            jobs.push(Job {
                algebra,
                fields,
                passes_conditions,
            });
        }
    }

    let mut spent = 0u64;
    let mut complete = true;
    let mut admitted = Vec::new();
    for job in jobs {
        let cost = job.cost(profiles.len() as u64);
        if spent + cost > spec.budget {
            complete = false;
            break;
        }
        spent += cost;
        admitted.push(job);
    }

    let partials: Vec<SweepReport> = admitted.par_iter().map(|job| sweep_job(job, &profiles)).collect();
    let mut report = SweepReport {
        degrees,
        places: places.len(),
        complete,
        ..SweepReport::default()
    };
    for partial in partials {
        report.merge(partial);
    }
    report
}

/// Conditions (1) and (2) computed straight from the invariants.
fn independent_conditions_hold(algebra: &AlgebraDescriptor) -> bool {
    let n = algebra.degree();
    let twice_odd = valuation(n, 2) == 1;
    let finite_odd = algebra
        .class()
        .support()
        .all(|(p, v)| p.kind() != PlaceKind::Finite || v.denom().to_u64().is_some_and(|e| e % 2 == 1));
    twice_odd && finite_odd
}

fn sweep_job(job: &Job, profiles: &[QuadraticProfile]) -> SweepReport {
    let algebra = &job.algebra;
    let n = algebra.degree();
    let mut r = SweepReport {
        descriptors: 1,
        ..SweepReport::default()
    };
    let label = |field: &FieldLocalData, extra: &str| {
        format!("B={algebra} L={:?}{extra}", field.splittings())
    };

    if job.passes_conditions {
        match decompose(algebra) {
            Ok(d) => r.counterexamples.extend(
                audit_decomposition(algebra, &d)
                    .into_iter()
                    .map(|p| format!("B={algebra}: {p}")),
            ),
            Err(e) => r.counterexamples.push(format!("B={algebra}: decompose failed: {e}")),
        }
    }

    for field in &job.fields {
        r.field_data += 1;
        r.decisions += 1;
        let base = match decide_selectivity(algebra, field, &[]) {
            Ok(v) => v,
            Err(e) => {
                r.counterexamples.push(label(field, &format!(": engine error {e}")));
                continue;
            }
        };
        match (&base, job.passes_conditions) {
            (SelectivityVerdict::NotSelective { .. }, false) => {
                r.not_selective += 1;
                continue;
            }
            (SelectivityVerdict::ConditionallySelective { .. }, true) => {}
            (v, _) => {
                r.counterexamples.push(label(field, &format!(": unexpected {}", v.status())));
                continue;
            }
        }
        let table = base.constraint_table().expect("conditional verdict carries a table");
        for profile in profiles {
            r.decisions += 1;
            let verdict = match decide_selectivity(algebra, field, std::slice::from_ref(profile)) {
                Ok(v) => v,
                Err(e) => {
                    r.counterexamples.push(label(field, &format!(" E={profile:?}: engine error {e}")));
                    continue;
                }
            };
            let selective = verdict.status() == Status::Selective;
            if selective != table.admits(profile) {
                r.counterexamples.push(label(
                    field,
                    &format!(" E={profile:?}: table admits={} but verdict {}", table.admits(profile), verdict.status()),
                ));
            }
            match &verdict {
                SelectivityVerdict::Selective { decomposition, chosen } => {
                    r.selective += 1;
                    *r.selective_by_degree.entry(n).or_default() += 1;
                    r.audited += 1;
                    let problems = audit_selective(algebra, field, decomposition, &chosen.profile);
                    if verdict.rate().map(|q| q.to_string()) != Some("1/2".into()) {
                        r.counterexamples.push(label(field, " rate is not 1/2"));
                    }
                    r.counterexamples.extend(
                        problems
                            .into_iter()
                            .map(|p| label(field, &format!(" E={profile:?}: {p}"))),
                    );
                }
                SelectivityVerdict::NotSelective { .. } => r.not_selective += 1,
                SelectivityVerdict::ConditionallySelective { .. } => r.conditional += 1,
            }
        }
        r.conditional += 1;
    }
    r
}
