//! JSON problem files.
//!
//! ```json
//! {
//!   "places": [{"id": "v1", "kind": "real"}, {"id": "p1", "kind": "finite"}],
//!   "algebras": {"B": {"degree": 2, "invariants": {"v1": "1/2", "p1": "1/2"}}},
//!   "fields": {"L": {"degree": 2, "splittings": {"v1": [2], "p1": [2]}}},
//!   "quadratics": {"E": {"v1": "ramified", "p1": "inert"}},
//!   "queries": [{"command": "selectivity", "algebra": "B", "field": "L", "candidates": ["E"]}]
//! }
//! ```
//!
//! Invariants are strings `"a/b"`; numeric literals are rejected so nothing
//! passes through floating point. Parsing never panics: every defect becomes
//! a [`Diagnostic`] and all of them are reported together.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::brauer::{AlgebraDescriptor, BrauerClass, BrauerError};
use crate::fraction::{FractionError, QMod1};
use crate::places::{
    validate_field_local_data, validate_quadratic_profile, FieldLocalData, LocalBehavior, Place, PlaceError,
    PlaceKind, PlaceSet, QuadraticProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    Syntax,
    Schema,
    Fraction,
    UnresolvedReference,
    Validation,
    Duplicate,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E001",
            DiagnosticCode::Schema => "E002",
            DiagnosticCode::Fraction => "E003",
            DiagnosticCode::UnresolvedReference => "E004",
            DiagnosticCode::Validation => "E005",
            DiagnosticCode::Duplicate => "E006",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// `line:column` for syntax errors.
    pub position: Option<(usize, usize)>,
    /// Dotted path to the offending field, e.g. `algebras.B.invariants.p9`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]", self.code.as_str())?;
        if let Some((line, col)) = self.position {
            write!(f, " {line}:{col}")?;
        }
        if !self.path.is_empty() {
            write!(f, " {}", self.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryCommand {
    Analyze,
    Decompose,
    Embed,
    Selectivity,
}

impl QueryCommand {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryCommand::Analyze => "analyze",
            QueryCommand::Decompose => "decompose",
            QueryCommand::Embed => "embed",
            QueryCommand::Selectivity => "selectivity",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "analyze" => QueryCommand::Analyze,
            "decompose" => QueryCommand::Decompose,
            "embed" => QueryCommand::Embed,
            "selectivity" => QueryCommand::Selectivity,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub command: QueryCommand,
    pub algebra: Option<String>,
    pub field: Option<String>,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub places: Arc<PlaceSet>,
    pub algebras: BTreeMap<String, AlgebraDescriptor>,
    pub fields: BTreeMap<String, FieldLocalData>,
    pub quadratics: BTreeMap<String, QuadraticProfile>,
    pub queries: Vec<Query>,
}

struct Parser {
    diagnostics: Vec<Diagnostic>,
}

impl Parser {
    fn push(&mut self, code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            code,
            position: None,
            path: path.into(),
            message: message.into(),
        });
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.push(DiagnosticCode::Schema, path, "expected an object");
        }
        o
    }

    fn string<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a str> {
        let s = v.as_str();
        if s.is_none() {
            self.push(DiagnosticCode::Schema, path, "expected a string");
        }
        s
    }

    fn positive_int(&mut self, v: Option<&Value>, path: &str) -> Option<u64> {
        match v {
            None => {
                self.push(DiagnosticCode::Schema, path, "missing field");
                None
            }
            Some(v) => match v.as_u64() {
                Some(0) => {
                    self.push(DiagnosticCode::Validation, path, "must be positive");
                    None
                }
                Some(n) => Some(n),
                None => {
                    self.push(DiagnosticCode::Schema, path, "expected a positive integer");
                    None
                }
            },
        }
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, allowed: &[&str], path: &str) {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.push(DiagnosticCode::Schema, join_path(path, key), "unknown key");
            }
        }
    }

    fn places(&mut self, v: Option<&Value>) -> Option<PlaceSet> {
        let Some(v) = v else {
            self.push(DiagnosticCode::Schema, "places", "missing section");
            return None;
        };
        let Some(items) = v.as_array() else {
            self.push(DiagnosticCode::Schema, "places", "expected a list");
            return None;
        };
        let mut places: Vec<Place> = Vec::new();
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let path = format!("places[{i}]");
            let Some(obj) = self.object(item, &path) else {
                ok = false;
                continue;
            };
            self.unknown_keys(obj, &["id", "kind", "label"], &path);
            let id = obj.get("id").and_then(|v| self.string(v, &format!("{path}.id")));
            let kind = match obj.get("kind").and_then(Value::as_str) {
                Some("finite") => Some(PlaceKind::Finite),
                Some("real") => Some(PlaceKind::Real),
                Some("complex") => Some(PlaceKind::Complex),
                _ => {
                    self.push(
                        DiagnosticCode::Schema,
                        format!("{path}.kind"),
                        "expected \"finite\", \"real\" or \"complex\"",
                    );
                    None
                }
            };
            let label = match obj.get("label") {
                None => None,
                Some(l) => self.string(l, &format!("{path}.label")).map(str::to_string),
            };
            let (Some(id), Some(kind)) = (id, kind) else {
                if obj.get("id").is_none() {
                    self.push(DiagnosticCode::Schema, format!("{path}.id"), "missing field");
                }
                ok = false;
                continue;
            };
            if places.iter().any(|p| p.id() == id) {
                self.push(DiagnosticCode::Duplicate, format!("{path}.id"), format!("duplicate place id {id:?}"));
                ok = false;
                continue;
            }
            let mut place = Place::new(id, kind);
            if let Some(label) = label {
                place = place.with_label(label);
            }
            places.push(place);
        }
        if !ok {
            return None;
        }
        PlaceSet::new(places).ok()
    }

    fn algebra(&mut self, v: &Value, path: &str, places: &Arc<PlaceSet>) -> Option<AlgebraDescriptor> {
        let obj = self.object(v, path)?;
        self.unknown_keys(obj, &["degree", "invariants"], path);
        let degree = self.positive_int(obj.get("degree"), &join_path(path, "degree"));
        let inv_path = join_path(path, "invariants");
        let raw = match obj.get("invariants") {
            None => Some(Vec::new()),
            Some(v) => {
                let inv = self.object(v, &inv_path)?;
                let mut raw = Vec::new();
                let mut ok = true;
                for (id, value) in inv {
                    let p = join_path(&inv_path, id);
                    if places.get(id).is_none() {
                        self.push(DiagnosticCode::UnresolvedReference, &p, format!("unresolved place {id:?}"));
                        ok = false;
                        continue;
                    }
                    let Some(s) = value.as_str() else {
                        self.push(DiagnosticCode::Schema, &p, "invariant must be a string \"a/b\"");
                        ok = false;
                        continue;
                    };
                    match s.parse::<QMod1>() {
                        Ok(q) => raw.push((id.clone(), q)),
                        Err(e @ FractionError::ZeroDenominator) | Err(e @ FractionError::Malformed(_)) => {
                            self.push(DiagnosticCode::Fraction, &p, e.to_string());
                            ok = false;
                        }
                    }
                }
                ok.then_some(raw)
            }
        }?;
        let class = match BrauerClass::validate(raw, Arc::clone(places)) {
            Ok(c) => c,
            Err(BrauerError::Invalid(violations)) => {
                for v in violations {
                    self.push(DiagnosticCode::Validation, &inv_path, v.to_string());
                }
                return None;
            }
            Err(e) => {
                self.push(DiagnosticCode::Validation, &inv_path, e.to_string());
                return None;
            }
        };
        match AlgebraDescriptor::new(class, degree?) {
            Ok(a) => Some(a),
            Err(e) => {
                self.push(DiagnosticCode::Validation, join_path(path, "degree"), e.to_string());
                None
            }
        }
    }

    fn field(&mut self, v: &Value, path: &str, places: &PlaceSet) -> Option<FieldLocalData> {
        let obj = self.object(v, path)?;
        self.unknown_keys(obj, &["degree", "splittings"], path);
        let degree = self.positive_int(obj.get("degree"), &join_path(path, "degree"));
        let sp_path = join_path(path, "splittings");
        let mut splittings = Vec::new();
        let mut ok = true;
        if let Some(sp) = obj.get("splittings") {
            let sp = self.object(sp, &sp_path)?;
            for (id, parts) in sp {
                let p = join_path(&sp_path, id);
                if places.get(id).is_none() {
                    self.push(DiagnosticCode::UnresolvedReference, &p, format!("unresolved place {id:?}"));
                    ok = false;
                    continue;
                }
                let parsed: Option<Vec<u64>> = parts
                    .as_array()
                    .and_then(|a| a.iter().map(Value::as_u64).collect());
                match parsed {
                    Some(v) => splittings.push((id.clone(), v)),
                    None => {
                        self.push(DiagnosticCode::Schema, &p, "expected a list of positive integers");
                        ok = false;
                    }
                }
            }
        }
        let degree = degree?;
        if !ok {
            return None;
        }
        let data = FieldLocalData::new(degree, splittings);
        match validate_field_local_data(&data, places) {
            Ok(v) if v.is_empty() => Some(data),
            Ok(v) => {
                for violation in v {
                    self.push(DiagnosticCode::Validation, &sp_path, violation.to_string());
                }
                None
            }
            Err(PlaceError::UnknownPlace(id)) | Err(PlaceError::DuplicateId(id)) => {
                self.push(DiagnosticCode::UnresolvedReference, &sp_path, format!("unresolved place {id:?}"));
                None
            }
        }
    }

    fn quadratic(&mut self, v: &Value, path: &str, places: &PlaceSet) -> Option<QuadraticProfile> {
        let obj = self.object(v, path)?;
        let mut entries = Vec::new();
        let mut ok = true;
        for (id, b) in obj {
            let p = join_path(path, id);
            if places.get(id).is_none() {
                self.push(DiagnosticCode::UnresolvedReference, &p, format!("unresolved place {id:?}"));
                ok = false;
                continue;
            }
            match b.as_str().map(str::parse::<LocalBehavior>) {
                Some(Ok(b)) => entries.push((id.clone(), b)),
                _ => {
                    self.push(DiagnosticCode::Schema, &p, "expected \"split\", \"inert\" or \"ramified\"");
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        let profile = QuadraticProfile::new(entries);
        match validate_quadratic_profile(&profile, places) {
            Ok(v) if v.is_empty() => Some(profile),
            Ok(v) => {
                for violation in v {
                    self.push(DiagnosticCode::Validation, path, violation.to_string());
                }
                None
            }
            Err(e) => {
                self.push(DiagnosticCode::UnresolvedReference, path, e.to_string());
                None
            }
        }
    }

    fn named<T>(
        &mut self,
        section: &str,
        v: Option<&Value>,
        mut each: impl FnMut(&mut Self, &Value, &str) -> Option<T>,
    ) -> BTreeMap<String, T> {
        let mut out = BTreeMap::new();
        let Some(v) = v else { return out };
        let Some(obj) = self.object(v, section) else { return out };
        for (name, item) in obj {
            if let Some(t) = each(self, item, &join_path(section, name)) {
                out.insert(name.clone(), t);
            }
        }
        out
    }

    fn queries(&mut self, v: Option<&Value>, file: &ProblemFile, declared: &Declared) -> Vec<Query> {
        let Some(v) = v else { return Vec::new() };
        let Some(items) = v.as_array() else {
            self.push(DiagnosticCode::Schema, "queries", "expected a list");
            return Vec::new();
        };
        let _ = file;
        let mut out = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let path = format!("queries[{i}]");
            let Some(obj) = self.object(item, &path) else { continue };
            self.unknown_keys(obj, &["command", "algebra", "field", "candidates"], &path);
            let command = obj.get("command").and_then(Value::as_str).and_then(QueryCommand::parse);
            let Some(command) = command else {
                self.push(
                    DiagnosticCode::Schema,
                    format!("{path}.command"),
                    "expected \"analyze\", \"decompose\", \"embed\" or \"selectivity\"",
                );
                continue;
            };
            let reference = |p: &mut Self, key: &str, names: &[String]| -> Option<String> {
                let v = obj.get(key)?;
                let name = p.string(v, &format!("{path}.{key}"))?;
                if !names.iter().any(|n| n == name) {
                    p.push(
                        DiagnosticCode::UnresolvedReference,
                        format!("{path}.{key}"),
                        format!("unresolved {key} {name:?}"),
                    );
                }
                Some(name.to_string())
            };
            let algebra = reference(self, "algebra", &declared.algebras);
            let field = reference(self, "field", &declared.fields);
            let mut candidates = Vec::new();
            if let Some(c) = obj.get("candidates") {
                match c.as_array() {
                    Some(list) => {
                        for (j, c) in list.iter().enumerate() {
                            let p = format!("{path}.candidates[{j}]");
                            let Some(name) = self.string(c, &p) else { continue };
                            if !declared.quadratics.iter().any(|n| n == name) {
                                self.push(
                                    DiagnosticCode::UnresolvedReference,
                                    p,
                                    format!("unresolved quadratic {name:?}"),
                                );
                            }
                            candidates.push(name.to_string());
                        }
                    }
                    None => self.push(DiagnosticCode::Schema, format!("{path}.candidates"), "expected a list"),
                }
            }
            out.push(Query {
                command,
                algebra,
                field,
                candidates,
            });
        }
        out
    }
}

/// Names declared in each section, valid or not, so a bad entry does not
/// also produce unresolved-reference noise.
struct Declared {
    algebras: Vec<String>,
    fields: Vec<String>,
    quadratics: Vec<String>,
}

fn join_path(base: &str, key: &str) -> String {
    if base.is_empty() {
        key.to_string()
    } else {
        format!("{base}.{key}")
    }
}

fn section_names(v: Option<&Value>) -> Vec<String> {
    v.and_then(Value::as_object)
        .map(|o| o.keys().cloned().collect())
        .unwrap_or_default()
}

pub fn parse_problem_file(text: &str) -> Result<ProblemFile, Vec<Diagnostic>> {
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic {
                code: DiagnosticCode::Syntax,
                position: Some((e.line(), e.column())),
                path: String::new(),
                message: e.to_string(),
            }])
        }
    };
    let mut p = Parser {
        diagnostics: Vec::new(),
    };
    let Some(obj) = p.object(&root, "") else {
        return Err(p.diagnostics);
    };
    p.unknown_keys(obj, &["places", "algebras", "fields", "quadratics", "queries"], "");
    let Some(places) = p.places(obj.get("places")) else {
        return Err(p.diagnostics);
    };
    let places = Arc::new(places);
    let algebras = p.named("algebras", obj.get("algebras"), |p, v, path| p.algebra(v, path, &places));
    let fields = p.named("fields", obj.get("fields"), |p, v, path| p.field(v, path, &places));
    let quadratics = p.named("quadratics", obj.get("quadratics"), |p, v, path| p.quadratic(v, path, &places));
    let declared = Declared {
        algebras: section_names(obj.get("algebras")),
        fields: section_names(obj.get("fields")),
        quadratics: section_names(obj.get("quadratics")),
    };
    let mut file = ProblemFile {
        places,
        algebras,
        fields,
        quadratics,
        queries: Vec::new(),
    };
    file.queries = p.queries(obj.get("queries"), &file, &declared);
    if p.diagnostics.is_empty() {
        Ok(file)
    } else {
        Err(p.diagnostics)
    }
}

impl ProblemFile {
    /// Canonical JSON: places in declaration order, named entries sorted by
    /// name, per-place maps in place order, zero invariants omitted.
    pub fn to_json(&self) -> Value {
        let places: Vec<Value> = self
            .places
            .iter()
            .map(|p| {
                let mut o = Map::new();
                o.insert("id".into(), p.id().into());
                o.insert("kind".into(), p.kind().as_str().into());
                if let Some(l) = p.label() {
                    o.insert("label".into(), l.into());
                }
                Value::Object(o)
            })
            .collect();

        let algebras: Map<String, Value> = self
            .algebras
            .iter()
            .map(|(name, a)| {
                let invariants: Map<String, Value> = a
                    .class()
                    .support()
                    .map(|(p, v)| (p.id().to_string(), Value::from(v.to_string())))
                    .collect();
                let mut o = Map::new();
                o.insert("degree".into(), a.degree().into());
                o.insert("invariants".into(), Value::Object(invariants));
                (name.clone(), Value::Object(o))
            })
            .collect();

        let fields: Map<String, Value> = self
            .fields
            .iter()
            .map(|(name, f)| {
                let splittings: Map<String, Value> = self
                    .places
                    .iter()
                    .filter_map(|p| f.parts_at(p.id()).map(|parts| (p.id().to_string(), Value::from(parts.to_vec()))))
                    .collect();
                let mut o = Map::new();
                o.insert("degree".into(), f.degree().into());
                o.insert("splittings".into(), Value::Object(splittings));
                (name.clone(), Value::Object(o))
            })
            .collect();

        let quadratics: Map<String, Value> = self
            .quadratics
            .iter()
            .map(|(name, q)| {
                let entries: Map<String, Value> = self
                    .places
                    .iter()
                    .filter_map(|p| q.declared(p.id()).map(|b| (p.id().to_string(), Value::from(b.as_str()))))
                    .collect();
                (name.clone(), Value::Object(entries))
            })
            .collect();

        let mut root = Map::new();
        root.insert("places".into(), Value::Array(places));
        root.insert("algebras".into(), Value::Object(algebras));
        root.insert("fields".into(), Value::Object(fields));
        root.insert("quadratics".into(), Value::Object(quadratics));
        if !self.queries.is_empty() {
            let queries: Vec<Value> = self
                .queries
                .iter()
                .map(|q| {
                    let mut o = Map::new();
                    o.insert("command".into(), q.command.as_str().into());
                    if let Some(a) = &q.algebra {
                        o.insert("algebra".into(), a.as_str().into());
                    }
                    if let Some(f) = &q.field {
                        o.insert("field".into(), f.as_str().into());
                    }
                    if !q.candidates.is_empty() {
                        o.insert("candidates".into(), q.candidates.clone().into());
                    }
                    Value::Object(o)
                })
                .collect();
            root.insert("queries".into(), Value::Array(queries));
        }
        Value::Object(root)
    }

    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }
}
