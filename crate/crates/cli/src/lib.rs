//! Command dispatch and report rendering for the `hasse` binary.
//!
//! [`run`] does all the work and returns the text destined for stdout and
//! stderr along with the exit code, so the binary is a thin shell and the
//! behaviour is testable in-process.
//!
//! Exit codes: `0` success, `1` a negative answer to a yes/no question (no
//! embedding, not selective, decomposition impossible, sweep counterexample),
//! `2` bad input or usage.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use hasse_core::enumeration::SweepReport;
use hasse_core::selectivity::{CandidateReport, ConstraintEntry, DivisibilityCertificate, OracleConclusion};
use hasse_core::{
    check_degree_condition, check_finite_odd_condition, decide_selectivity, decompose, divisibility_obstruction_oracle,
    embeds_as_maximal_subfield, parse_problem_file, quadratic_embeds_in_quaternion, theorem_consistency_sweep,
    AlgebraDescriptor, Decomposition, EmbeddingDecision, EngineError, EnumerationSpec, FieldLocalData, PlaceSet,
    ProblemFile, QuadraticEmbedding, QuadraticProfile, QueryCommand, SelectivityVerdict,
};

const MAXIMAL_ORDER_NOTE: &str =
    "the verdict concerns the maximal order of L; for proper suborders only the necessary conditions apply";
const QUATERNION_NOTE: &str = "quaternion case: B1 = B and B2 is trivial, so this is the classical quaternion criterion";

#[derive(Debug, Parser)]
#[command(name = "hasse", version, about = "Brauer classes, embeddings and selectivity from local data")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a problem file.
    Validate(FileArgs),
    /// Order, ramification and primary witnesses of algebras.
    Analyze(QueryArgs),
    /// Split a division algebra as a quaternion algebra tensor an odd-degree one.
    Decompose(QueryArgs),
    /// Test whether a field embeds in an algebra as a maximal subfield.
    Embed(QueryArgs),
    /// Decide whether the maximal order of a field is selective.
    Selectivity(QueryArgs),
    /// Sweep an exhaustive universe of small instances and audit every verdict.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
struct FileArgs {
    file: PathBuf,
}

#[derive(Debug, Args)]
struct QueryArgs {
    file: PathBuf,
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    field: Option<String>,
    /// Quadratic profile to test; repeatable, tried in order.
    #[arg(long = "candidate")]
    candidates: Vec<String>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long, default_value_t = 6)]
    max_degree: u64,
    #[arg(long, default_value_t = 3)]
    min_degree: u64,
    #[arg(long, default_value_t = 2)]
    real: usize,
    #[arg(long, default_value_t = 1)]
    complex: usize,
    #[arg(long, default_value_t = 3)]
    finite: usize,
    /// Maximum number of selectivity decisions.
    #[arg(long, default_value_t = 5_000_000)]
    budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            stdout: String::new(),
            stderr,
            code: 2,
        }
    }
}

/// A rendered report: the same content as text and as JSON.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

/// Runs the command line `args` (without the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("hasse")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::input_error(rendered)
            } else {
                Outcome {
                    stdout: rendered,
                    ..Outcome::default()
                }
            };
        }
    };
    let report = match cli.command {
        Command::Validate(a) => load(&a.file).map(|f| validate(&f)),
        Command::Analyze(q) => with_file(&q, analyze),
        Command::Decompose(q) => with_file(&q, decompose_cmd),
        Command::Embed(q) => with_file(&q, embed),
        Command::Selectivity(q) => with_file(&q, selectivity),
        Command::Enumerate(a) => enumerate(&a),
    };
    match report {
        Ok(r) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&r.json).expect("reports serialize");
                s.push('\n');
                s
            } else {
                r.text
            };
            Outcome {
                stdout,
                stderr: String::new(),
                code: r.code,
            }
        }
        Err(message) => Outcome::input_error(message),
    }
}

fn load(path: &PathBuf) -> Result<ProblemFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem_file(&text).map_err(|diagnostics| {
        diagnostics
            .iter()
            .map(|d| format!("{}: {d}", path.display()))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn with_file(q: &QueryArgs, f: impl FnOnce(&ProblemFile, &QueryArgs) -> Result<Report, String>) -> Result<Report, String> {
    let file = load(&q.file)?;
    f(&file, q)
}

/// Picks a named entry: the flag if given, else the first matching query in
/// the file, else the only entry of the section.
fn pick<'a, T>(
    section: &'a std::collections::BTreeMap<String, T>,
    what: &str,
    flag: Option<&str>,
    from_query: Option<&str>,
) -> Result<(&'a str, &'a T), String> {
    let name = match flag.or(from_query) {
        Some(name) => name,
        None if section.len() == 1 => section.keys().next().expect("one entry").as_str(),
        None if section.is_empty() => return Err(format!("no {what} declared")),
        None => return Err(format!("several {what}s declared; choose one with --{what}")),
    };
    section
        .get_key_value(name)
        .map(|(k, v)| (k.as_str(), v))
        .ok_or_else(|| format!("unknown {what} {name:?}"))
}

fn query_for<'a>(file: &'a ProblemFile, command: QueryCommand) -> Option<&'a hasse_core::Query> {
    file.queries.iter().find(|q| q.command == command)
}

fn profile_text(profile: &QuadraticProfile, places: &PlaceSet) -> String {
    let parts: Vec<String> = places
        .iter()
        .filter_map(|p| profile.declared(p.id()).map(|b| format!("{}:{b}", p.id())))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn profile_json(profile: &QuadraticProfile, places: &PlaceSet) -> Value {
    Value::Object(
        places
            .iter()
            .filter_map(|p| profile.declared(p.id()).map(|b| (p.id().to_string(), Value::from(b.as_str()))))
            .collect(),
    )
}

fn field_text(field: &FieldLocalData, places: &PlaceSet) -> String {
    let parts: Vec<String> = places
        .iter()
        .filter_map(|p| {
            field.parts_at(p.id()).map(|parts| {
                let list: Vec<String> = parts.iter().map(u64::to_string).collect();
                format!("{}:[{}]", p.id(), list.join(","))
            })
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn validate(file: &ProblemFile) -> Report {
    let counts = [
        ("places", file.places.len()),
        ("algebras", file.algebras.len()),
        ("fields", file.fields.len()),
        ("quadratics", file.quadratics.len()),
        ("queries", file.queries.len()),
    ];
    let mut text = String::from("valid problem file\n");
    let mut json = Map::new();
    json.insert("valid".into(), true.into());
    for (name, count) in counts {
        let _ = writeln!(text, "  {name}: {count}");
        json.insert(name.into(), count.into());
    }
    Report {
        text,
        json: Value::Object(json),
        code: 0,
    }
}

fn analyze_algebra(name: &str, a: &AlgebraDescriptor, text: &mut String) -> Value {
    let division = a.is_division();
    let _ = writeln!(
        text,
        "algebra {name}: degree {}, class order {}, {}",
        a.degree(),
        a.class_order(),
        if division {
            "division algebra".to_string()
        } else {
            format!("matrix algebra of size {} over a division algebra", a.matrix_size())
        }
    );
    let _ = writeln!(text, "  invariants: {}", a.class());
    let ramified: Vec<Value> = a
        .class()
        .ramification_set(None)
        .into_iter()
        .map(|p| {
            let index = a.local_index(p.id()).expect("own place");
            json!({"place": p.id(), "kind": p.kind().as_str(), "index": index})
        })
        .collect();
    let listing: Vec<String> = ramified
        .iter()
        .map(|r| format!("{} ({}, index {})", r["place"].as_str().unwrap(), r["kind"].as_str().unwrap(), r["index"]))
        .collect();
    let _ = writeln!(
        text,
        "  ramified at: {}",
        if listing.is_empty() { "nowhere".to_string() } else { listing.join(", ") }
    );
    let mut out = Map::new();
    out.insert("name".into(), name.into());
    out.insert("degree".into(), a.degree().into());
    out.insert("class_order".into(), a.class_order().into());
    out.insert("division".into(), division.into());
    out.insert("invariants".into(), invariants_json(a));
    out.insert("ramified".into(), Value::Array(ramified));
    if division {
        let mut witnesses = Map::new();
        for p in hasse_core::selectivity::degree_primes(a) {
            let w = a.p_primary_witness(p).expect("prime divides the degree of a division algebra");
            let _ = writeln!(text, "  {p}-primary witness: {}", w.id());
            witnesses.insert(p.to_string(), w.id().into());
        }
        out.insert("primary_witnesses".into(), Value::Object(witnesses));
        let c1 = check_degree_condition(a).expect("division algebra");
        let c2 = check_finite_odd_condition(a);
        for (label, key, c) in [("degree condition", "degree_condition", &c1), ("finite-odd condition", "finite_odd_condition", &c2)] {
            match c.obstruction() {
                None => {
                    let _ = writeln!(text, "  {label}: holds");
                    out.insert(key.into(), json!({"holds": true}));
                }
                Some(o) => {
                    let _ = writeln!(text, "  {label}: fails ({})", o.narrative);
                    out.insert(key.into(), json!({"holds": false, "reason": o.narrative}));
                }
            }
        }
    }
    Value::Object(out)
}

fn invariants_json(a: &AlgebraDescriptor) -> Value {
    Value::Object(
        a.class()
            .support()
            .map(|(p, v)| (p.id().to_string(), Value::from(v.to_string())))
            .collect(),
    )
}

fn analyze(file: &ProblemFile, q: &QueryArgs) -> Result<Report, String> {
    let mut text = String::new();
    let mut algebras = Vec::new();
    let chosen: Vec<(&String, &AlgebraDescriptor)> = match &q.algebra {
        Some(name) => vec![file
            .algebras
            .get_key_value(name)
            .ok_or_else(|| format!("unknown algebra {name:?}"))?],
        None => file.algebras.iter().collect(),
    };
    for (name, a) in chosen {
        algebras.push(analyze_algebra(name, a, &mut text));
    }
    let mut json = Map::new();
    json.insert("algebras".into(), Value::Array(algebras));
    if let Some(name) = &q.field {
        let f = file.fields.get(name).ok_or_else(|| format!("unknown field {name:?}"))?;
        let _ = writeln!(text, "field {name}: degree {}, local degrees {}", f.degree(), field_text(f, &file.places));
        json.insert("field".into(), json!({"name": name, "degree": f.degree()}));
    }
    Ok(Report {
        text,
        json: Value::Object(json),
        code: 0,
    })
}

fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "quaternion_part": {"degree": d.quaternion_part.degree(), "invariants": invariants_json(&d.quaternion_part)},
        "odd_part": {"degree": d.odd_part.degree(), "invariants": invariants_json(&d.odd_part)},
        "T": d.real_ramified,
        "quaternion_case": d.is_quaternion_case(),
    })
}

fn decomposition_text(d: &Decomposition, text: &mut String) {
    let _ = writeln!(text, "  B1 = {} (degree 2)", d.quaternion_part.class());
    let _ = writeln!(text, "  B2 = {} (degree {})", d.odd_part.class(), d.odd_part.degree());
    let _ = writeln!(text, "  T = [{}]", d.real_ramified.join(", "));
    if d.is_quaternion_case() {
        let _ = writeln!(text, "  note: {QUATERNION_NOTE}");
    }
}

fn decompose_cmd(file: &ProblemFile, q: &QueryArgs) -> Result<Report, String> {
    let query = query_for(file, QueryCommand::Decompose);
    let (name, a) = pick(&file.algebras, "algebra", q.algebra.as_deref(), query.and_then(|q| q.algebra.as_deref()))?;
    let mut text = format!("decomposition of {name}\n");
    match decompose(a) {
        Ok(d) => {
            decomposition_text(&d, &mut text);
            let mut json = json!({"algebra": name, "decomposes": true});
            json["decomposition"] = decomposition_json(&d);
            Ok(Report { text, json, code: 0 })
        }
        Err(EngineError::ConditionFailed(o)) => {
            let _ = writeln!(text, "  no decomposition: {} failed ({})", o.kind.condition(), o.narrative);
            Ok(Report {
                text,
                json: json!({"algebra": name, "decomposes": false, "obstruction": o.kind.as_str(), "reason": o.narrative}),
                code: 1,
            })
        }
        Err(e) => Err(e.to_string()),
    }
}

fn certificate_json(c: &DivisibilityCertificate) -> Value {
    let conclusion = match c.conclusion {
        OracleConclusion::PrimeExcluded => format!("{} ∤ [F:K]", c.prime),
        OracleConclusion::Inconclusive => "inconclusive".into(),
    };
    json!({
        "prime": c.prime,
        "prime_power": c.prime_power,
        "witness": c.witness,
        "local": c.local.as_ref().map(|l| json!({
            "place": l.place,
            "local_index": l.local_index,
            "inertia_bound": l.inertia_bound,
            "local_degrees": l.local_degrees,
        })),
        "conclusion": conclusion,
    })
}

fn embed(file: &ProblemFile, q: &QueryArgs) -> Result<Report, String> {
    let query = query_for(file, QueryCommand::Embed);
    let (a_name, a) = pick(&file.algebras, "algebra", q.algebra.as_deref(), query.and_then(|q| q.algebra.as_deref()))?;
    if let Some(e_name) = q.candidates.first() {
        let e = file.quadratics.get(e_name).ok_or_else(|| format!("unknown quadratic {e_name:?}"))?;
        let d = quadratic_embeds_in_quaternion(e, a).map_err(|e| e.to_string())?;
        return Ok(match d {
            QuadraticEmbedding::Embeds => Report {
                text: format!("{e_name} embeds in {a_name}\n"),
                json: json!({"quadratic": e_name, "algebra": a_name, "embeds": true}),
                code: 0,
            },
            QuadraticEmbedding::Fails { place, kind } => Report {
                text: format!("{e_name} does not embed in {a_name}\n  witness: {e_name} splits at {place} ({kind}), where {a_name} ramifies\n"),
                json: json!({"quadratic": e_name, "algebra": a_name, "embeds": false, "witness": {"place": place, "kind": kind.as_str()}}),
                code: 1,
            },
        });
    }
    let (f_name, f) = pick(&file.fields, "field", q.field.as_deref(), query.and_then(|q| q.field.as_deref()))?;
    match embeds_as_maximal_subfield(f, a).map_err(|e| e.to_string())? {
        EmbeddingDecision::Embeds => {
            let mut text = format!("{f_name} embeds in {a_name} as a maximal subfield\n");
            let mut certificates = Vec::new();
            if a.is_division() {
                for p in hasse_core::selectivity::degree_primes(a) {
                    let c = divisibility_obstruction_oracle(a, f, p).map_err(|e| e.to_string())?;
                    if let Some(l) = &c.local {
                        let _ = writeln!(
                            text,
                            "  p = {p}: at {} the local index {} divides every local degree {:?}; inertia bound {}; so {p} ∤ [F:K]",
                            l.place, l.local_index, l.local_degrees, l.inertia_bound
                        );
                    }
                    certificates.push(certificate_json(&c));
                }
            }
            Ok(Report {
                text,
                json: json!({"field": f_name, "algebra": a_name, "embeds": true, "certificates": certificates}),
                code: 0,
            })
        }
        EmbeddingDecision::Fails(w) => Ok(Report {
            text: format!(
                "{f_name} does not embed in {a_name}\n  witness: local degree {} at {} is not divisible by the local index {}\n",
                w.part, w.place, w.index
            ),
            json: json!({"field": f_name, "algebra": a_name, "embeds": false,
                         "witness": {"place": w.place, "local_degree": w.part, "local_index": w.index}}),
            code: 1,
        }),
    }
}

fn candidate_text(report: &CandidateReport, text: &mut String) {
    for c in &report.checks {
        let _ = writeln!(text, "      {}: {} ({})", c.check, if c.passed { "ok" } else { "fails" }, c.detail);
    }
}

fn candidate_json(name: &str, report: &CandidateReport) -> Value {
    json!({
        "candidate": name,
        "accepted": report.accepted(),
        "checks": report.checks.iter().map(|c| json!({
            "check": c.check.as_str(),
            "passed": c.passed,
            "witness": c.witness,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

fn entry_json(e: &ConstraintEntry) -> Value {
    json!({
        "place": e.place,
        "kind": e.kind.as_str(),
        "requirement": e.requirement.as_str(),
        "allowed": e.allowed.iter().map(|b| b.as_str()).collect::<Vec<_>>(),
        "provenance": e.provenance,
    })
}

fn selectivity(file: &ProblemFile, q: &QueryArgs) -> Result<Report, String> {
    let query = query_for(file, QueryCommand::Selectivity);
    let (a_name, a) = pick(&file.algebras, "algebra", q.algebra.as_deref(), query.and_then(|q| q.algebra.as_deref()))?;
    let (f_name, f) = pick(&file.fields, "field", q.field.as_deref(), query.and_then(|q| q.field.as_deref()))?;
    let names: Vec<String> = if q.candidates.is_empty() && q.algebra.is_none() && q.field.is_none() {
        query.map(|q| q.candidates.clone()).unwrap_or_default()
    } else {
        q.candidates.clone()
    };
    let mut candidates = Vec::with_capacity(names.len());
    for name in &names {
        candidates.push(file.quadratics.get(name).cloned().ok_or_else(|| format!("unknown quadratic {name:?}"))?);
    }
    let verdict = decide_selectivity(a, f, &candidates).map_err(|e| e.to_string())?;
    let places = &file.places;

    let mut text = format!("selectivity of the maximal order of {f_name} in {a_name}\n");
    let rate = verdict.rate().map(|r| r.to_string());
    match &rate {
        Some(r) => {
            let _ = writeln!(text, "verdict: {}, rate {r}", verdict.status());
        }
        None => {
            let _ = writeln!(text, "verdict: {}, rate undetermined", verdict.status());
        }
    }
    let mut json = Map::new();
    json.insert("algebra".into(), a_name.into());
    json.insert("field".into(), f_name.into());
    json.insert("status".into(), verdict.status().as_str().into());
    json.insert("rate".into(), rate.clone().into());
    json.insert("representation_degree".into(), verdict.representation_degree().into());

    let code = match &verdict {
        SelectivityVerdict::NotSelective {
            obstruction,
            candidate_failures,
            unconditional,
        } => {
            let _ = writeln!(text, "  [F:K] = 1");
            let _ = writeln!(text, "  obstruction: {}: {}", obstruction.kind, obstruction.narrative);
            if let Some(w) = &obstruction.witness {
                let _ = writeln!(text, "  witness: {} ({})", w.place, w.value);
            }
            let mut failures = Vec::new();
            for (name, report) in names.iter().zip(candidate_failures) {
                let _ = writeln!(text, "    candidate {name}:");
                candidate_text(report, &mut text);
                failures.push(candidate_json(name, report));
            }
            json.insert(
                "obstruction".into(),
                json!({
                    "kind": obstruction.kind.as_str(),
                    "witness": obstruction.witness.as_ref().map(|w| json!({"place": w.place, "value": w.value})),
                    "narrative": obstruction.narrative,
                    "unconditional": unconditional,
                }),
            );
            json.insert("candidate_failures".into(), Value::Array(failures));
            1
        }
        SelectivityVerdict::Selective { decomposition, chosen } => {
            let _ = writeln!(text, "  [F:K] = 2");
            decomposition_text(decomposition, &mut text);
            let name = &names[chosen.index];
            let _ = writeln!(text, "  selective quadratic subfield: {name} {}", profile_text(&chosen.profile, places));
            candidate_text(&chosen.report, &mut text);
            json.insert("decomposition".into(), decomposition_json(decomposition));
            let mut c = candidate_json(name, &chosen.report);
            c["profile"] = profile_json(&chosen.profile, places);
            json.insert("chosen".into(), c);
            0
        }
        SelectivityVerdict::ConditionallySelective {
            decomposition,
            constraints,
        } => {
            decomposition_text(decomposition, &mut text);
            let _ = writeln!(text, "  local constraints on a selective quadratic subfield E of {f_name}:");
            for e in &constraints.entries {
                let why = if e.provenance.is_empty() { String::new() } else { format!(" ({})", e.provenance.join("; ")) };
                let _ = writeln!(text, "    {}: {}{why}", e.place, e.requirement);
            }
            for c in &constraints.conflicts {
                let _ = writeln!(text, "    conflict at {}: {} vs {}", c.place, c.first, c.second);
            }
            if !constraints.eichler {
                let _ = writeln!(text, "    B1 is totally definite; the Eichler condition fails");
            }
            let _ = writeln!(
                text,
                "  locally satisfiable: {}",
                if constraints.is_satisfiable() { "yes" } else { "no" }
            );
            let _ = writeln!(
                text,
                "  supply --candidate to decide; local constraints do not show that a global E exists"
            );
            json.insert("decomposition".into(), decomposition_json(decomposition));
            json.insert(
                "constraints".into(),
                json!({
                    "entries": constraints.entries.iter().map(entry_json).collect::<Vec<_>>(),
                    "conflicts": constraints.conflicts.iter().map(|c| json!({"place": c.place, "first": c.first, "second": c.second})).collect::<Vec<_>>(),
                    "eichler": constraints.eichler,
                    "satisfiable": constraints.is_satisfiable(),
                }),
            );
            0
        }
    };
    let _ = writeln!(text, "note: {MAXIMAL_ORDER_NOTE}");
    json.insert("quaternion_case".into(), verdict.is_quaternion_case().into());
    json.insert("note".into(), MAXIMAL_ORDER_NOTE.into());
    Ok(Report {
        text,
        json: Value::Object(json),
        code,
    })
}

fn enumerate(a: &EnumerateArgs) -> Result<Report, String> {
    if a.max_degree == 0 || a.min_degree > a.max_degree {
        return Err(format!("empty degree range {}..={}", a.min_degree, a.max_degree));
    }
    let spec = EnumerationSpec {
        real: a.real,
        complex: a.complex,
        finite: a.finite,
        min_degree: a.min_degree,
        max_degree: a.max_degree,
        denominators: (1..=a.max_degree).collect(),
        budget: a.budget,
        ..EnumerationSpec::default()
    };
    let r: SweepReport = theorem_consistency_sweep(&spec);
    let mut text = format!(
        "sweep over degrees {}..={} on {} places ({} real, {} complex, {} finite)\n",
        a.min_degree, a.max_degree, r.places, a.real, a.complex, a.finite
    );
    let _ = writeln!(text, "  division descriptors: {}", r.descriptors);
    let _ = writeln!(text, "  field data: {}", r.field_data);
    let _ = writeln!(text, "  decisions: {}", r.decisions);
    let _ = writeln!(
        text,
        "  {} selective, {} not selective, {} conditional",
        r.selective, r.not_selective, r.conditional
    );
    for (d, c) in &r.selective_by_degree {
        let _ = writeln!(text, "    degree {d}: {c} selective");
    }
    let _ = writeln!(text, "  audited: {}", r.audited);
    let _ = writeln!(text, "  counterexamples: {}", r.counterexamples.len());
    for c in &r.counterexamples {
        let _ = writeln!(text, "    {c}");
    }
    if !r.complete {
        let _ = writeln!(text, "  incomplete: the decision budget of {} was reached", a.budget);
    }
    let code = if r.passed() { 0 } else { 1 };
    let json = serde_json::to_value(&r).expect("report serializes");
    Ok(Report { text, json, code })
}
