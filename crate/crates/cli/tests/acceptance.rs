//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every check compares the library against an oracle written here
//! with plain integer arithmetic.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hasse_core::enumeration::classes_on;
use hasse_core::selectivity::check_candidate_e;
use hasse_core::*;
use itertools::Itertools;
use num_traits::ToPrimitive;

/// Invariants as multiples of 1/60; every denominator up to 6 divides 60.
const UNIT: i64 = 60;

type Outcome = Result<String, String>;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

fn sixtieths(q: &QMod1) -> i64 {
    let d = q.denom().to_i64().unwrap();
    assert_eq!(UNIT % d, 0);
    q.numer().to_i64().unwrap() * (UNIT / d)
}

fn vector(class: &BrauerClass) -> Vec<i64> {
    class.places().iter().map(|p| sixtieths(&class.invariant(p.id()).unwrap())).collect()
}

fn index_of(k: i64) -> i64 {
    UNIT / gcd(k.rem_euclid(UNIT), UNIT)
}

fn place_set(real: usize, complex: usize, finite: usize) -> Arc<PlaceSet> {
    let mut v = Vec::new();
    v.extend((1..=real).map(|i| Place::real(format!("v{i}"))));
    v.extend((1..=complex).map(|i| Place::complex(format!("w{i}"))));
    v.extend((1..=finite).map(|i| Place::finite(format!("p{i}"))));
    Arc::new(PlaceSet::new(v).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Templates of four places each.
const TEMPLATES: [(usize, usize, usize); 4] = [(0, 0, 4), (1, 0, 3), (2, 0, 2), (2, 1, 1)];

fn universe(t: (usize, usize, usize)) -> Vec<BrauerClass> {
    classes_on(place_set(t.0, t.1, t.2), 6, &[1, 2, 3, 6].into_iter().collect()).collect()
}

fn brauer_laws() -> Outcome {
    let mut total = 0;
    let mut triples = 0u64;
    for t in TEMPLATES {
        let u = universe(t);
        total += u.len();
        let places = Arc::clone(u[0].places());
        let position: HashMap<Vec<i64>, usize> = u.iter().enumerate().map(|(i, c)| (vector(c), i)).collect();
        ensure(position.len() == u.len(), || "duplicate classes".into())?;
        let e = BrauerClass::trivial(Arc::clone(&places));
        let id = position[&vector(&e)];

        let mut table = vec![vec![0usize; u.len()]; u.len()];
        for (i, a) in u.iter().enumerate() {
            ensure(a.tensor(&e).unwrap() == *a, || format!("identity fails for {a}"))?;
            ensure(a.tensor(&a.opposite()).unwrap().is_trivial(), || format!("inverse fails for {a}"))?;
            ensure(vector(a).iter().sum::<i64>() % UNIT == 0, || format!("sum not zero for {a}"))?;
            for (j, b) in u.iter().enumerate() {
                let c = a.tensor(b).unwrap();
                let expected: Vec<i64> = vector(a).iter().zip(vector(b)).map(|(x, y)| (x + y) % UNIT).collect();
                ensure(vector(&c) == expected, || format!("{a} ⊗ {b} = {c} is not pointwise"))?;
                table[i][j] = *position
                    .get(&expected)
                    .ok_or_else(|| format!("{a} ⊗ {b} leaves the universe"))?;
            }
        }
        for i in 0..u.len() {
            for j in 0..u.len() {
                ensure(table[i][j] == table[j][i], || format!("{} ⊗ {} not commutative", u[i], u[j]))?;
                for k in 0..u.len() {
                    triples += 1;
                    ensure(table[table[i][j]][k] == table[i][table[j][k]], || {
                        format!("associativity fails on {}, {}, {}", u[i], u[j], u[k])
                    })?;
                }
            }
            let mut power = i;
            let mut m = 1u64;
            while power != id {
                power = table[power][i];
                m += 1;
            }
            let a = &u[i];
            ensure(a.order().to_u64() == Some(m), || format!("order of {a} is {} not {m}", a.order()))?;
            ensure(a.power(m).is_trivial(), || format!("{a}^{m} is not trivial"))?;
            ensure((1..m).all(|k| !a.power(k).is_trivial()), || format!("{a} dies before {m}"))?;
        }
    }
    Ok(format!("{total} classes over {} templates, {triples} associativity triples", TEMPLATES.len()))
}

fn index_law() -> Outcome {
    let mut n = 0;
    for t in TEMPLATES {
        for a in universe(t) {
            let expected = vector(&a).iter().fold(1, |acc, &k| lcm(acc, index_of(k)));
            ensure(a.order().to_i64() == Some(expected), || format!("order of {a} is not {expected}"))?;
            for p in a.places().iter() {
                let k = sixtieths(&a.invariant(p.id()).unwrap());
                ensure(a.local_index(p.id()).unwrap().to_i64() == Some(index_of(k)), || {
                    format!("local index of {a} at {}", p.id())
                })?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} classes"))
}

/// Every descriptor of degree `n` on the standard six places.
fn descriptors(n: u64) -> Vec<AlgebraDescriptor> {
    let allowed: BTreeSet<u64> = (1..=n).filter(|d| n % d == 0).collect();
    classes_on(place_set(2, 1, 3), n, &allowed)
        .filter_map(|c| AlgebraDescriptor::new(c, n).ok())
        .collect()
}

fn decomposition_soundness() -> Outcome {
    let mut checked = 0;
    for n in 1..=6u64 {
        for b in descriptors(n) {
            let v = vector(b.class());
            let places = b.places();
            let order = v.iter().fold(1, |acc, &k| lcm(acc, index_of(k)));
            let finite_odd = places
                .iter()
                .zip(&v)
                .all(|(p, &k)| p.kind() != PlaceKind::Finite || index_of(k) % 2 == 1);
            if order != n as i64 || n % 2 != 0 || (n / 2) % 2 != 1 || !finite_odd {
                continue;
            }
            checked += 1;
            let d = decompose(&b).map_err(|e| format!("{}: {e}", b.class()))?;
            let (v1, v2) = (vector(d.quaternion_part.class()), vector(d.odd_part.class()));
            let t: Vec<&str> = places
                .iter()
                .zip(&v)
                .filter(|(p, &k)| p.kind() == PlaceKind::Real && k != 0)
                .map(|(p, _)| p.id())
                .collect();
            for (i, p) in places.iter().enumerate() {
                ensure((v1[i] + v2[i]) % UNIT == v[i], || format!("{}: B1 ⊗ B2 ≠ B at {}", b.class(), p.id()))?;
                let expected = if t.contains(&p.id()) { UNIT / 2 } else { 0 };
                ensure(v1[i] == expected, || format!("{}: B1 wrong at {}", b.class(), p.id()))?;
            }
            ensure(d.real_ramified == t, || format!("{}: T = {:?}", b.class(), d.real_ramified))?;
            ensure(t.len() % 2 == 0, || format!("{}: |T| odd", b.class()))?;
            ensure(d.quaternion_part.degree() == 2, || "B1 degree".into())?;
            ensure(d.odd_part.degree() == n / 2 && d.odd_part.class_order() == n / 2, || {
                format!("{}: class_order(B2) = {}", b.class(), d.odd_part.class_order())
            })?;
        }
    }
    ensure(checked > 0, || "no descriptor met the hypotheses".into())?;
    Ok(format!("{checked} descriptors"))
}

/// Partitions of `n` with parts from `allowed`, non-increasing.
fn partitions(n: u64, allowed: &[u64]) -> Vec<Vec<u64>> {
    fn go(rest: u64, max: u64, allowed: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for &a in allowed.iter().filter(|&&a| a <= rest && a <= max) {
            cur.push(a);
            go(rest - a, a, allowed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, allowed, &mut Vec::new(), &mut out);
    out
}

fn abhn_equivalence() -> Outcome {
    let mut pairs = 0u64;
    let mut embedded = 0u64;
    for n in 1..=6u64 {
        let places = place_set(2, 1, 3);
        let options: Vec<Vec<Vec<u64>>> = places
            .iter()
            .map(|p| match p.kind() {
                PlaceKind::Complex => partitions(n, &[1]),
                PlaceKind::Real => partitions(n, &[2, 1]),
                PlaceKind::Finite => partitions(n, &(1..=n).rev().collect::<Vec<_>>()),
            })
            .collect();
        let fields: Vec<(Vec<Vec<u64>>, FieldLocalData)> = options
            .into_iter()
            .multi_cartesian_product()
            .map(|parts| {
                let l = FieldLocalData::new(n, places.iter().map(|p| p.id()).zip(parts.iter().cloned()));
                (parts, l)
            })
            .collect();
        for b in descriptors(n) {
            let v = vector(b.class());
            for (parts, l) in &fields {
                let scan = parts
                    .iter()
                    .zip(&v)
                    .all(|(ps, &k)| ps.iter().all(|&d| d as i64 % index_of(k) == 0));
                let got = embeds_as_maximal_subfield(l, &b).map_err(|e| e.to_string())?.embeds();
                ensure(got == scan, || format!("B={} L={parts:?}: library {got}, scan {scan}", b.class()))?;
                pairs += 1;
                embedded += u64::from(got);
            }
        }
    }
    Ok(format!("{pairs} (L, B) pairs, {embedded} embeddings"))
}

fn necessity_sweep() -> Outcome {
    let mut spec = EnumerationSpec::with_degrees(2, 6);
    spec.real = 2;
    spec.complex = 1;
    spec.finite = 3;
    let start = Instant::now();
    let r = theorem_consistency_sweep(&spec);
    let elapsed = start.elapsed();
    ensure(r.complete, || "sweep hit its budget".into())?;
    ensure(r.passed(), || format!("counterexamples: {:?}", &r.counterexamples[..r.counterexamples.len().min(3)]))?;
    for (&d, &c) in &r.selective_by_degree {
        ensure(c == 0 || (d % 2 == 0 && d % 4 != 0), || format!("{c} selective verdicts in degree {d}"))?;
    }
    ensure(r.selective_by_degree.get(&6).copied().unwrap_or(0) > 0, || "no selective verdict in degree 6".into())?;
    ensure(r.audited == r.selective, || "unaudited selective verdicts".into())?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    for (lo, hi) in [(3, 3), (4, 4), (5, 5)] {
        let r = theorem_consistency_sweep(&EnumerationSpec::with_degrees(lo, hi));
        ensure(r.passed() && r.selective == 0, || format!("degree {lo}: {} selective", r.selective))?;
    }
    Ok(format!(
        "{} descriptors, {} decisions, {} selective (all audited, degrees {:?}), {:.1?}",
        r.descriptors,
        r.decisions,
        r.selective,
        r.selective_by_degree.keys().collect::<Vec<_>>(),
        elapsed
    ))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture() -> ProblemFile {
    let text = std::fs::read_to_string(fixtures_dir().join("fixture.json")).unwrap();
    parse_problem_file(&text).unwrap()
}

/// Can places of `L` with local degrees `parts` be shared out over the
/// places of `E` above `v` (two of degree 1, or one of degree 2) so that each
/// gets total relative degree `n/2`?
fn inside_l(parts: &[u64], n: u64, behavior: LocalBehavior) -> bool {
    let (slots, f) = if behavior == LocalBehavior::Split { (2usize, 1) } else { (1, 2) };
    (0..slots.pow(parts.len() as u32)).any(|mut code| {
        let mut load = vec![0; slots];
        for &p in parts {
            if p % f != 0 {
                return false;
            }
            load[code % slots] += p / f;
            code /= slots;
        }
        load.iter().all(|&x| x * 2 == n)
    })
}

fn sufficiency_fixture() -> Outcome {
    let start = Instant::now();
    let file = fixture();
    let (b, l, e) = (&file.algebras["B6"], &file.fields["L6"], &file.quadratics["E1"]);
    let verdict = decide_selectivity(b, l, std::slice::from_ref(e)).map_err(|e| e.to_string())?;
    ensure(verdict.status() == Status::Selective, || format!("status {}", verdict.status()))?;
    ensure(verdict.rate().map(|r| r.to_string()).as_deref() == Some("1/2"), || "rate is not 1/2".into())?;
    let elapsed = start.elapsed();

    // Auditor.
    let places = b.places();
    let v = vector(b.class());
    let n = b.degree();
    ensure(n % 2 == 0 && (n / 2) % 2 == 1, || "condition 1".into())?;
    for (p, &k) in places.iter().zip(&v) {
        ensure(p.kind() != PlaceKind::Finite || index_of(k) % 2 == 1, || format!("condition 2 at {}", p.id()))?;
    }
    let d = verdict.decomposition().unwrap();
    let (v1, v2) = (vector(d.quaternion_part.class()), vector(d.odd_part.class()));
    let t: Vec<&str> = places
        .iter()
        .zip(&v)
        .filter(|(p, &k)| p.kind() == PlaceKind::Real && k != 0)
        .map(|(p, _)| p.id())
        .collect();
    for i in 0..places.len() {
        ensure((v1[i] + v2[i]) % UNIT == v[i], || "condition 3: B1 ⊗ B2 ≠ B".into())?;
    }
    ensure(d.odd_part.degree() == 3 && d.odd_part.class_order() == 3, || "condition 3: B2".into())?;
    let chosen = &verdict.chosen().unwrap().profile;
    ensure(chosen == e, || "chosen candidate differs".into())?;
    for p in places.iter() {
        let beh = match p.kind() {
            PlaceKind::Complex => LocalBehavior::Split,
            _ => chosen.declared(p.id()).ok_or_else(|| format!("E undeclared at {}", p.id()))?,
        };
        ensure(inside_l(l.parts_at(p.id()).unwrap(), n, beh), || format!("condition 4: E ⊄ L at {}", p.id()))?;
        let ok = match p.kind() {
            PlaceKind::Finite => beh != LocalBehavior::Ramified,
            PlaceKind::Real if t.contains(&p.id()) => beh == LocalBehavior::Ramified,
            _ => beh == LocalBehavior::Split,
        };
        ensure(ok, || format!("condition 4: E is {beh} at {}", p.id()))?;
    }
    ensure(places.of_kind(PlaceKind::Complex).next().is_some(), || "condition 4: B1 totally definite".into())?;
    Ok(format!("Selective, rate 1/2, audited in {elapsed:.1?}"))
}

fn constraint_table_correctness() -> Outcome {
    let file = fixture();
    let (b, l) = (&file.algebras["B6"], &file.fields["L6"]);
    let table = derive_quadratic_constraints(b, l).map_err(|e| e.to_string())?;
    let places = b.places();
    let slots: Vec<(&str, Vec<LocalBehavior>)> = places
        .iter()
        .filter(|p| p.kind() != PlaceKind::Complex)
        .map(|p| (p.id(), LocalBehavior::admissible(p.kind()).to_vec()))
        .collect();
    let mut profiles = 0;
    let mut accepted = Vec::new();
    for choice in slots.iter().map(|(_, b)| b.clone()).multi_cartesian_product() {
        let e = QuadraticProfile::new(slots.iter().map(|(id, _)| *id).zip(choice));
        let ok = check_candidate_e(&e, b, l).map_err(|e| e.to_string())?.accepted();
        ensure(table.admits(&e) == ok, || format!("table and checker disagree on {e:?}"))?;
        profiles += 1;
        if ok {
            accepted.push(e);
        }
    }
    ensure(profiles == 108, || format!("{profiles} profiles"))?;
    ensure(accepted == [file.quadratics["E1"].clone()], || format!("accepted {accepted:?}"))?;
    Ok(format!("{profiles} profiles, {} accepted", accepted.len()))
}

fn cli_round_trip() -> Outcome {
    let dir = fixtures_dir();
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    ensure(!files.is_empty(), || "no fixtures".into())?;
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        let p = parse_problem_file(&text).map_err(|d| format!("{}: {}", path.display(), d[0]))?;
        let s = p.serialize();
        let q = parse_problem_file(&s).map_err(|d| format!("reparse {}: {}", path.display(), d[0]))?;
        ensure(p == q, || format!("{}: parse(serialize(p)) ≠ p", path.display()))?;
        ensure(q.serialize() == s, || format!("{}: serialization is not a fixpoint", path.display()))?;
    }
    let f = dir.join("fixture.json").display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate", &f],
        vec!["analyze", &f],
        vec!["decompose", &f, "--algebra", "B6"],
        vec!["embed", &f, "--field", "Lbad", "--algebra", "B6"],
        vec!["selectivity", &f, "--algebra", "B6", "--field", "L6", "--candidate", "E1"],
        vec!["selectivity", &f, "--algebra", "B6", "--field", "L6"],
        vec!["--json", "selectivity", &f, "--algebra", "B6", "--field", "L6"],
        vec!["enumerate", "--max-degree", "3"],
        vec!["--json", "enumerate", "--min-degree", "6", "--max-degree", "6", "--finite", "2"],
    ];
    for c in &commands {
        let a = hasse_cli::run(c.iter().copied());
        let b = hasse_cli::run(c.iter().copied());
        ensure(a == b, || format!("`{}` differs between runs", c.join(" ")))?;
    }
    Ok(format!("{} fixtures round-trip, {} commands byte-identical", files.len(), commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Brauer laws", brauer_laws),
        ("index law", index_law),
        ("decomposition soundness", decomposition_soundness),
        ("ABHN oracle equivalence", abhn_equivalence),
        ("necessity sweep", necessity_sweep),
        ("sufficiency fixture", sufficiency_fixture),
        ("constraint-table correctness", constraint_table_correctness),
        ("CLI round-trip and determinism", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
