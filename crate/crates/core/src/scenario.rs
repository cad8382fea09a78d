//! Scenario files and the task runner behind the command-line tool.
//!
//! A scenario is an INI-like file with the sections `[field]`, `[ring]`,
//! `[group]`, `[define]`, `[subgroups]` and `[tasks]`; the grammar is given in
//! EBNF in `docs/scenario.md`. Tasks run in file order and may bind names
//! that later tasks use. Every algorithm involved is deterministic, so a
//! report depends only on the scenario and the options.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cmcert::{
    defect_certificate, free_module_check, gorenstein_check, hilbert_series, hsop_check_polyring, present,
    regular_sequence_check, CmError, HilbertSeries, Presentation,
};
use crate::cohomology::{
    annihilates, bar_hn_trivial, cocycle_space, coboundary_witness, frobenius_power_cocycle, nontrivial_all_frobenius,
    restrict, restriction_trivial_classes, Cocycle1, CoefficientModule, FrobeniusCertificate,
};
use crate::expr::is_identifier;
use crate::gf::{FieldCtx, FieldElem};
use crate::group::{FiniteMatrixGroup, Group, Subgroup};
use crate::invariant::{invariant_basis, noether_separating_set};
use crate::linalg::Matrix;
use crate::mpoly::{MonomialOrder, PolyRing, Polynomial, Ring};
use crate::separating::{
    geometric_separating_test, inseparable_closure_test, separates_points, Outcome, SeparatingVerdict,
};

/// A syntax or resolution error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const SECTIONS: [&str; 6] = ["field", "ring", "group", "define", "subgroups", "tasks"];

/// Task kinds accepted in `[tasks]`.
pub const TASK_KINDS: [&str; 24] = [
    "group",
    "orbits",
    "separates-points",
    "check-geometric",
    "inseparable-closure",
    "invariants",
    "noether",
    "bireflection",
    "bireflection-criterion",
    "cocycle-space",
    "coboundary",
    "frobenius",
    "nontrivial-frobenius",
    "restriction-search",
    "restrict",
    "annihilates",
    "certificate",
    "hsop",
    "present",
    "regular-sequence",
    "hilbert-series",
    "free-module",
    "gorenstein",
    "bar-cohomology",
];

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    /// Column of the first character of the value text.
    column: usize,
}

impl Entry {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }
}

fn lex(text: &str) -> Result<Vec<(String, Vec<Entry>)>, ParseError> {
    let mut sections: Vec<(String, Vec<Entry>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let indent = raw.len() - raw.trim_start().len();
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or(ParseError { line, column: indent + 1, message: "expected `]`".into() })?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ParseError { line, column: indent + 2, message: format!("unknown section `[{name}]`") });
            }
            if sections.iter().any(|(s, _)| s == name) {
                return Err(ParseError { line, column: indent + 2, message: format!("duplicate section `[{name}]`") });
            }
            sections.push((name.to_string(), Vec::new()));
            continue;
        }
        let Some((_, entries)) = sections.last_mut() else {
            return Err(ParseError { line, column: indent + 1, message: "entry outside of a section".into() });
        };
        let eq = body.find('=').ok_or(ParseError { line, column: indent + 1, message: "expected `key = value`".into() })?;
        let key = body[..eq].trim();
        let key_ok = !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '\'');
        if !key_ok {
            return Err(ParseError { line, column: indent + 1, message: format!("malformed key `{key}`") });
        }
        let after = &body[eq + 1..];
        let lead = after.len() - after.trim_start().len();
        let value_start = indent + eq + 1 + lead;
        let v = after.trim_start();
        let (value, column, rest) = if let Some(q) = v.strip_prefix('"') {
            let close = q
                .find('"')
                .ok_or(ParseError { line, column: value_start + 1, message: "unterminated string".into() })?;
            (q[..close].to_string(), value_start + 2, &q[close + 1..])
        } else {
            let end = v.find('#').unwrap_or(v.len());
            let token = v[..end].trim_end();
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(ParseError { line, column: value_start + 1, message: "expected a quoted string or a bare word".into() });
            }
            (token.to_string(), value_start + 1, &v[end..])
        };
        let rest = rest.trim_start();
        if !rest.is_empty() && !rest.starts_with('#') {
            return Err(ParseError { line, column: indent + 1 + body.len() - rest.len(), message: "trailing characters".into() });
        }
        entries.push(Entry { key: key.to_string(), value, line, column });
    }
    Ok(sections)
}

/// Splits on `sep` outside brackets and parentheses.
fn split_top(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

/// Trimmed comma-separated items with their offsets; empty input gives none.
fn list_items(s: &str) -> Vec<(usize, &str)> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    split_top(s, ',').into_iter().map(|(o, t)| (o + t.len() - t.trim_start().len(), t.trim())).collect()
}

#[derive(Debug, Clone)]
struct TaskSpec {
    kind: String,
    args: String,
    line: usize,
    column: usize,
    positional: Option<(usize, String)>,
    named: Vec<(String, usize, String)>,
}

impl TaskSpec {
    fn parse(e: &Entry) -> Result<TaskSpec, ParseError> {
        if !TASK_KINDS.contains(&e.key.as_str()) {
            return Err(ParseError { line: e.line, column: 1, message: format!("unknown task `{}`", e.key) });
        }
        let mut positional = None;
        let mut named: Vec<(String, usize, String)> = Vec::new();
        for (i, (offset, seg)) in split_top(&e.value, ';').into_iter().enumerate() {
            let trimmed = seg.trim();
            if trimmed.is_empty() {
                continue;
            }
            let start = offset + seg.len() - seg.trim_start().len();
            let colon = split_top(trimmed, ':');
            let keyed = colon.len() >= 2 && {
                let k = colon[0].1.trim();
                !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
            };
            if keyed {
                let key = colon[0].1.trim().to_string();
                let vstart = colon[1].0;
                let raw = &trimmed[vstart..];
                let value = raw.trim().to_string();
                if named.iter().any(|(k, _, _)| *k == key) {
                    return Err(e.err(format!("duplicate argument `{key}`")));
                }
                named.push((key, start + vstart + raw.len() - raw.trim_start().len(), value));
            } else if i == 0 {
                positional = Some((start, trimmed.to_string()));
            } else {
                return Err(ParseError { line: e.line, column: e.column + start, message: format!("expected `key: value`, found `{trimmed}`") });
            }
        }
        Ok(TaskSpec { kind: e.key.clone(), args: e.value.clone(), line: e.line, column: e.column, positional, named })
    }

    fn at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column + offset, message: message.into() }
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.named.iter().find(|(k, _, _)| k == key).map(|(_, o, v)| (*o, v.as_str()))
    }

    /// The value of `key`, or the positional argument when `key` is absent.
    fn main(&self, key: &str) -> Option<(usize, &str)> {
        self.get(key).or(self.positional.as_ref().map(|(o, v)| (*o, v.as_str())))
    }

    fn require(&self, key: &str) -> Result<(usize, &str), ParseError> {
        self.main(key).ok_or_else(|| self.at(0, format!("task `{}` needs `{key}`", self.kind)))
    }

    fn number(&self, key: &str) -> Result<Option<u64>, ParseError> {
        match self.get(key) {
            None => Ok(None),
            Some((o, v)) => v.parse().map(Some).map_err(|_| self.at(o, format!("`{key}` must be a nonnegative integer"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ParseError> {
        for (k, o, _) in &self.named {
            if !allowed.contains(&k.as_str()) {
                return Err(self.at(*o, format!("task `{}` does not take `{k}`", self.kind)));
            }
        }
        Ok(())
    }
}

/// Polynomials with the names they were bound to, if any.
type NamedPolys = Vec<(Option<String>, Polynomial)>;

#[derive(Clone)]
enum Binding {
    Poly(Polynomial),
    Set(NamedPolys),
    Cocycle(Cocycle1),
}

/// A parsed scenario, ready to run.
pub struct Scenario {
    name: String,
    ring: Ring,
    group: Group,
    bindings: HashMap<String, Binding>,
    subgroups: HashMap<String, Subgroup>,
    tasks: Vec<TaskSpec>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioLoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioLoadError::Io(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map_or_else(|| "scenario".to_string(), |s| s.to_string_lossy().into_owned());
        Ok(Scenario::parse(&name, &text)?)
    }

    pub fn parse(name: &str, text: &str) -> Result<Scenario, ParseError> {
        let sections = lex(text)?;
        let section = |n: &str| sections.iter().find(|(s, _)| s == n).map(|(_, e)| e.as_slice()).unwrap_or(&[]);
        for (s, entries) in &sections {
            if s == "tasks" {
                continue;
            }
            for (i, e) in entries.iter().enumerate() {
                if entries[..i].iter().any(|p| p.key == e.key) {
                    return Err(ParseError { line: e.line, column: 1, message: format!("duplicate key `{}`", e.key) });
                }
            }
        }

        let field = parse_field(section("field"))?;
        let ring = parse_ring(&field, section("ring"))?;
        let group = parse_group(&field, ring.nvars(), section("group"))?;
        let mut scenario = Scenario {
            name: name.to_string(),
            ring,
            group,
            bindings: HashMap::new(),
            subgroups: HashMap::new(),
            tasks: Vec::new(),
        };
        for e in section("define") {
            if !is_identifier(&e.key) || scenario.ring.var_index(&e.key).is_some() || scenario.is_group_name(&e.key) {
                return Err(ParseError { line: e.line, column: 1, message: format!("`{}` cannot be bound", e.key) });
            }
            let b = scenario.parse_binding(e)?;
            scenario.bindings.insert(e.key.clone(), b);
        }
        for e in section("subgroups") {
            let elements = scenario.parse_elements(&e.value).map_err(|(o, m)| ParseError { line: e.line, column: e.column + o, message: m })?;
            scenario.subgroups.insert(e.key.clone(), scenario.group.subgroup(&elements));
        }
        for e in section("tasks") {
            scenario.tasks.push(TaskSpec::parse(e)?);
        }
        Ok(scenario)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    fn is_group_name(&self, name: &str) -> bool {
        self.group.generator_names().iter().any(|n| n == name)
    }

    fn parse_binding(&self, e: &Entry) -> Result<Binding, ParseError> {
        let v = e.value.trim();
        if let Some(rest) = v.strip_prefix("cocycle(") {
            return self.parse_cocycle(rest, e).map(Binding::Cocycle);
        }
        if let Some(inner) = v.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            let items = self.resolve_set(&HashMap::new(), inner).map_err(|(o, m)| e.err_at(o + 1, m))?;
            return Ok(Binding::Set(items));
        }
        self.parse_poly(&self.bindings, v).map(Binding::Poly).map_err(|(o, m)| e.err_at(o, m))
    }

    /// `cocycle(degree: d): s -> expr, ...` or
    /// `cocycle(character: s -> c, ...): s -> c, ...`; unlisted generators map to 0.
    fn parse_cocycle(&self, rest: &str, e: &Entry) -> Result<Cocycle1, ParseError> {
        let base = "cocycle(".len();
        let close = matching_paren(rest).ok_or_else(|| e.err("unbalanced `(` in cocycle"))?;
        let spec = &rest[..close];
        let tail = rest[close + 1..].trim_start();
        let values_text = tail.strip_prefix(':').ok_or_else(|| e.err_at(base + close + 1, "expected `:` after cocycle module"))?;
        let values_offset = base + rest.len() - values_text.len();
        let (kind, arg) = spec.split_once(':').ok_or_else(|| e.err_at(base, "expected `degree:` or `character:`"))?;
        let arg_offset = base + kind.len() + 1;
        let module = match kind.trim() {
            "degree" => {
                let d: u32 = arg.trim().parse().map_err(|_| e.err_at(arg_offset, "degree must be a nonnegative integer"))?;
                CoefficientModule::graded(&self.group, &self.ring, d).map_err(|x| e.err(x.to_string()))?
            }
            "character" => {
                let field = self.group.field();
                let assigned = self.parse_assignments(arg, |t| field.parse_code(t).map_err(|x| x.to_string())).map_err(|(o, m)| e.err_at(arg_offset + o, m))?;
                let values: Vec<FieldElem> = assigned.iter().map(|c| FieldElem::new(field, c.unwrap_or(1))).collect();
                CoefficientModule::character(&self.group, &values).map_err(|x| e.err(x.to_string()))?
            }
            other => return Err(e.err_at(base, format!("unknown coefficient module `{other}`"))),
        };
        let mring = module.ring().clone();
        let values = self
            .parse_assignments(values_text, |t| self.parse_poly_in(&mring, &self.bindings, t).map_err(|(_, m)| m))
            .map_err(|(o, m)| e.err_at(values_offset + o, m))?;
        let values: Vec<Polynomial> = values.into_iter().map(|v| v.unwrap_or_else(|| Polynomial::zero(&mring))).collect();
        Cocycle1::from_generators(&module, &values).map_err(|x| e.err(x.to_string()))
    }

    /// Parses `name -> value` pairs keyed by generator name.
    fn parse_assignments<T>(&self, text: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<Option<T>>, (usize, String)> {
        let names = self.group.generator_names();
        let mut out: Vec<Option<T>> = names.iter().map(|_| None).collect();
        for (o, item) in list_items(text) {
            let (name, value) = item.split_once("->").ok_or((o, format!("expected `generator -> value`, found `{item}`")))?;
            let idx = names.iter().position(|n| n == name.trim()).ok_or((o, format!("unknown generator `{}`", name.trim())))?;
            if out[idx].is_some() {
                return Err((o, format!("generator `{}` assigned twice", name.trim())));
            }
            out[idx] = Some(parse(value.trim()).map_err(|m| (o, m))?);
        }
        Ok(out)
    }

    fn parse_poly(&self, env: &HashMap<String, Binding>, text: &str) -> Result<Polynomial, (usize, String)> {
        self.parse_poly_in(&self.ring, env, text)
    }

    fn parse_poly_in(&self, ring: &Ring, env: &HashMap<String, Binding>, text: &str) -> Result<Polynomial, (usize, String)> {
        let lookup = |name: &str| match env.get(name).or_else(|| self.bindings.get(name)) {
            Some(Binding::Poly(p)) => Some(p.clone()),
            _ => None,
        };
        ring.parse_with_bindings(text, &lookup).map_err(|e| (0, e.to_string()))
    }

    /// Items are set names (spliced in), polynomial names or expressions.
    fn resolve_set(&self, env: &HashMap<String, Binding>, text: &str) -> Result<NamedPolys, (usize, String)> {
        let mut out = Vec::new();
        for (o, item) in list_items(text) {
            match env.get(item).or_else(|| self.bindings.get(item)) {
                Some(Binding::Set(s)) => out.extend(s.iter().cloned()),
                Some(Binding::Poly(p)) => out.push((Some(item.to_string()), p.clone())),
                Some(Binding::Cocycle(_)) => return Err((o, format!("`{item}` is a cocycle, not a polynomial"))),
                None => out.push((None, self.parse_poly(env, item).map_err(|(_, m)| (o, m))?)),
            }
        }
        Ok(out)
    }

    /// Group elements given as words in the generators (`s*t^2`, `1`) or matrices.
    fn parse_elements(&self, text: &str) -> Result<Vec<usize>, (usize, String)> {
        list_items(text).into_iter().map(|(o, item)| self.parse_element(item).map_err(|m| (o, m))).collect()
    }

    fn parse_element(&self, item: &str) -> Result<usize, String> {
        let g = &self.group;
        if item.starts_with('[') {
            let m = Matrix::parse(g.field(), item).map_err(|e| e.to_string())?;
            return g.index_of(&m).ok_or_else(|| format!("matrix {item} is not in the group"));
        }
        let mut acc = g.identity();
        for factor in item.split('*') {
            let factor = factor.trim();
            if factor == "1" {
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<u64>().map_err(|_| format!("bad exponent in `{factor}`"))?),
                None => (factor, 1),
            };
            let idx = g.generator_names().iter().position(|n| n == name).ok_or_else(|| format!("unknown generator `{name}`"))?;
            acc = g.mul(acc, g.power(g.generators()[idx], exp));
        }
        Ok(acc)
    }
}

impl Entry {
    fn err_at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column + offset, message: message.into() }
    }
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

#[derive(Debug, Error)]
pub enum ScenarioLoadError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn lookup<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

fn check_keys(entries: &[Entry], allowed: &[&str], section: &str) -> Result<(), ParseError> {
    match entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        Some(e) => Err(ParseError { line: e.line, column: 1, message: format!("unknown key `{}` in [{section}]", e.key) }),
        None => Ok(()),
    }
}

fn parse_field(entries: &[Entry]) -> Result<crate::gf::Field, ParseError> {
    check_keys(entries, &["p", "deg", "modulus", "generator"], "field")?;
    let p_entry = lookup(entries, "p").ok_or(ParseError { line: 1, column: 1, message: "[field] needs `p`".into() })?;
    let p: u64 = p_entry.value.trim().parse().map_err(|_| p_entry.err("`p` must be a prime"))?;
    let deg: u32 = match lookup(entries, "deg") {
        Some(e) => e.value.trim().parse().map_err(|_| e.err("`deg` must be a positive integer"))?,
        None => 1,
    };
    let generator = lookup(entries, "generator").map_or("w", |e| e.value.as_str());
    match lookup(entries, "modulus") {
        None if deg == 1 => FieldCtx::prime(p).map_err(|e| p_entry.err(e.to_string())),
        None => FieldCtx::with_generator(p, deg, generator).map_err(|e| p_entry.err(e.to_string())),
        Some(m) => {
            let base = FieldCtx::prime(p).map_err(|e| p_entry.err(e.to_string()))?;
            let r = PolyRing::new(&base, &[generator]).map_err(|e| m.err(e.to_string()))?;
            let f = r.parse(&m.value).map_err(|e| m.err(e.to_string()))?;
            let d = f.degree().unwrap_or(0);
            if d != deg {
                return Err(m.err(format!("modulus has degree {d}, expected {deg}")));
            }
            let mut coeffs = vec![0u32; d as usize + 1];
            for (mono, c) in f.terms() {
                coeffs[mono.exp(0) as usize] = *c;
            }
            FieldCtx::with_modulus(p, &coeffs, generator).map_err(|e| m.err(e.to_string()))
        }
    }
}

fn parse_ring(field: &crate::gf::Field, entries: &[Entry]) -> Result<Ring, ParseError> {
    check_keys(entries, &["vars", "weights"], "ring")?;
    let vars_entry = lookup(entries, "vars").ok_or(ParseError { line: 1, column: 1, message: "[ring] needs `vars`".into() })?;
    let vars: Vec<String> = list_items(&vars_entry.value).into_iter().map(|(_, v)| v.to_string()).collect();
    let weights = match lookup(entries, "weights") {
        None => vec![1; vars.len()],
        Some(e) => list_items(&e.value)
            .into_iter()
            .map(|(o, w)| w.parse::<u32>().map_err(|_| e.err_at(o, format!("bad weight `{w}`"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    PolyRing::with_options(field, vars, MonomialOrder::Grevlex, weights).map_err(|e| vars_entry.err(e.to_string()))
}

fn parse_group(field: &crate::gf::Field, dim: usize, entries: &[Entry]) -> Result<Group, ParseError> {
    let mut names = Vec::new();
    let mut mats = Vec::new();
    for e in entries {
        if !is_identifier(&e.key) {
            return Err(ParseError { line: e.line, column: 1, message: format!("bad generator name `{}`", e.key) });
        }
        mats.push(Matrix::parse(field, &e.value).map_err(|x| e.err(x.to_string()))?);
        names.push(e.key.clone());
    }
    FiniteMatrixGroup::enumerate(field, dim, &mats, &names, None).map_err(|x| match entries.first() {
        Some(e) => ParseError { line: e.line, column: 1, message: x.to_string() },
        None => ParseError { line: 1, column: 1, message: x.to_string() },
    })
}

/// Per-task verdict; the exit code is derived from these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Complete,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Complete => "complete",
            Verdict::Error => "error",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TaskReport {
    pub index: usize,
    pub kind: String,
    pub args: String,
    pub verdict: Verdict,
    pub details: Map<String, Value>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: String,
    pub header: Map<String, Value>,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    /// 1 on any error, else 2 on any failure, else 3 on any inconclusive task, else 0.
    pub fn exit_code(&self) -> i32 {
        let has = |v: Verdict| self.tasks.iter().any(|t| t.verdict == v);
        if has(Verdict::Error) {
            1
        } else if has(Verdict::Fail) {
            2
        } else if has(Verdict::Inconclusive) {
            3
        } else {
            0
        }
    }

    fn summary(&self) -> Map<String, Value> {
        let mut m = Map::new();
        for v in [Verdict::Pass, Verdict::Fail, Verdict::Inconclusive, Verdict::Complete, Verdict::Error] {
            m.insert(v.to_string(), json!(self.tasks.iter().filter(|t| t.verdict == v).count()));
        }
        m
    }

    pub fn to_json(&self) -> Value {
        let tasks: Vec<Value> = self
            .tasks
            .iter()
            .map(|t| {
                json!({
                    "index": t.index,
                    "task": t.kind,
                    "args": t.args,
                    "verdict": t.verdict.to_string(),
                    "details": Value::Object(t.details.clone()),
                })
            })
            .collect();
        json!({
            "scenario": self.scenario,
            "setup": Value::Object(self.header.clone()),
            "tasks": tasks,
            "summary": Value::Object(self.summary()),
            "exit_code": self.exit_code(),
        })
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario: {}\n", self.scenario);
        for (k, v) in &self.header {
            render_text(&mut out, k, v, 0);
        }
        for t in &self.tasks {
            let args = if t.args.is_empty() { String::new() } else { format!(" \"{}\"", t.args) };
            out.push_str(&format!("\n[{}] {}{}: {}\n", t.index, t.kind, args, t.verdict.to_string().to_uppercase()));
            for (k, v) in &t.details {
                render_text(&mut out, k, v, 1);
            }
        }
        let summary: Vec<String> = self.summary().iter().map(|(k, v)| format!("{v} {k}")).collect();
        out.push_str(&format!("\nsummary: {}\nexit code: {}\n", summary.join(", "), self.exit_code()));
        out
    }
}

fn render_text(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in m {
                render_text(out, k, x, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, x) in items.iter().enumerate() {
                render_text(out, &format!("[{}]", i + 1), x, depth + 1);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", parts.join(", ")));
        }
        other => out.push_str(&format!("{pad}{key}: {}\n", scalar(other))),
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Run only tasks of this kind; tasks that bind names still run silently.
    pub task: Option<String>,
    pub degree_cap: Option<u32>,
    pub m_max: Option<u32>,
    pub heuristic: bool,
}

type TaskResult = Result<(Verdict, Map<String, Value>), ParseError>;

struct Runner<'a> {
    sc: &'a Scenario,
    opts: &'a RunOptions,
    env: HashMap<String, Binding>,
    algebras: HashMap<String, Presentation>,
}

pub fn run(scenario: &Scenario, opts: &RunOptions) -> Report {
    let mut header = Map::new();
    header.insert("field".into(), json!(scenario.ring.field().describe()));
    header.insert("ring".into(), json!(scenario.ring.describe()));
    let g = &scenario.group;
    header.insert("group order".into(), json!(g.order()));
    header.insert("generators".into(), json!(g.generator_names()));
    let mut runner = Runner { sc: scenario, opts, env: HashMap::new(), algebras: HashMap::new() };
    let mut tasks = Vec::new();
    for (i, spec) in scenario.tasks.iter().enumerate() {
        let selected = opts.task.as_deref().is_none_or(|k| k == spec.kind);
        if !selected && spec.get("name").is_none() {
            continue;
        }
        let (verdict, details) = match runner.task(spec) {
            Ok(r) => r,
            Err(e) => {
                let mut m = Map::new();
                m.insert("error".into(), json!(e.to_string()));
                (Verdict::Error, m)
            }
        };
        if selected {
            tasks.push(TaskReport { index: i + 1, kind: spec.kind.clone(), args: spec.args.clone(), verdict, details });
        }
    }
    Report { scenario: scenario.name.clone(), header, tasks }
}

/// Compares an observed outcome with an optional `expect:` argument.
fn expected(spec: &TaskSpec, observed: &str, natural: Verdict, details: &mut Map<String, Value>) -> TaskResult {
    match spec.get("expect") {
        None => Ok((natural, std::mem::take(details))),
        Some((_, want)) => {
            details.insert("expected".into(), json!(want));
            let v = if want == observed { Verdict::Pass } else { Verdict::Fail };
            Ok((v, std::mem::take(details)))
        }
    }
}

fn poly_list(items: &[(Option<String>, Polynomial)]) -> Value {
    json!(items.iter().map(|(n, p)| match n {
        Some(n) => format!("{n} = {p}"),
        None => p.to_string(),
    }).collect::<Vec<_>>())
}

fn separating_details(v: &SeparatingVerdict) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("outcome".into(), json!(v.outcome.to_string()));
    if let Some(w) = &v.witness {
        m.insert("witness".into(), json!(w.to_string()));
    }
    if let Some(n) = &v.note {
        m.insert("note".into(), json!(n));
    }
    if !v.exponents.is_empty() {
        let e: Vec<Value> = v.exponents.iter().map(|x| x.map_or(Value::Null, |m| json!(m))).collect();
        m.insert("exponents".into(), Value::Array(e));
    }
    m
}

fn outcome_verdict(o: Outcome) -> Verdict {
    match o {
        Outcome::Pass => Verdict::Pass,
        Outcome::Fail => Verdict::Fail,
        Outcome::Inconclusive => Verdict::Inconclusive,
    }
}

fn cocycle_table(g: &Cocycle1) -> Value {
    let mut m = Map::new();
    for (w, v) in g.table() {
        m.insert(w, json!(v));
    }
    Value::Object(m)
}

impl Runner<'_> {
    fn cap(&self) -> Option<u32> {
        self.opts.degree_cap
    }

    fn set(&self, spec: &TaskSpec, key: &str) -> Result<NamedPolys, ParseError> {
        let (o, text) = spec.require(key)?;
        self.sc.resolve_set(&self.env, text).map_err(|(x, m)| spec.at(o + x, m))
    }

    fn polys(&self, spec: &TaskSpec, key: &str) -> Result<Vec<Polynomial>, ParseError> {
        Ok(self.set(spec, key)?.into_iter().map(|(_, p)| p).collect())
    }

    /// The cocycle named by `key`, or by its short alias `g`.
    fn cocycle(&self, spec: &TaskSpec, key: &str) -> Result<Cocycle1, ParseError> {
        let (o, name) = match spec.get("g") {
            Some(v) if spec.get(key).is_none() => v,
            Some((o, _)) => return Err(spec.at(o, format!("give `{key}` or `g`, not both"))),
            None => spec.require(key)?,
        };
        match self.env.get(name).or_else(|| self.sc.bindings.get(name)) {
            Some(Binding::Cocycle(c)) => Ok(c.clone()),
            Some(_) => Err(spec.at(o, format!("`{name}` is not a cocycle"))),
            None => Err(spec.at(o, format!("unknown name `{name}`"))),
        }
    }

    fn subgroup(&self, spec: &TaskSpec, key: &str) -> Result<Subgroup, ParseError> {
        let (o, text) = spec.require(key)?;
        if let Some(h) = self.sc.subgroups.get(text) {
            return Ok(h.clone());
        }
        let elems = self.sc.parse_elements(text).map_err(|(x, m)| spec.at(o + x, m))?;
        Ok(self.sc.group.subgroup(&elems))
    }

    fn bind(&mut self, spec: &TaskSpec, b: Binding) -> Result<Option<String>, ParseError> {
        let Some((o, name)) = spec.get("name") else { return Ok(None) };
        if !is_identifier(name) || self.sc.ring.var_index(name).is_some() {
            return Err(spec.at(o, format!("`{name}` cannot be bound")));
        }
        self.env.insert(name.to_string(), b);
        Ok(Some(name.to_string()))
    }

    /// The presentation of `algebra:` (cached) and its generator names.
    fn algebra(&mut self, spec: &TaskSpec) -> Result<(String, Vec<Option<String>>), ParseError> {
        let items = self.set(spec, "algebra")?;
        let key = items.iter().map(|(_, p)| p.to_string()).collect::<Vec<_>>().join(" | ");
        if !self.algebras.contains_key(&key) {
            let gens: Vec<Polynomial> = items.iter().map(|(_, p)| p.clone()).collect();
            let a = present(&self.sc.ring, &gens, Some(&self.sc.group), self.cap()).map_err(|e| spec.at(0, e.to_string()))?;
            self.algebras.insert(key.clone(), a);
        }
        Ok((key, items.into_iter().map(|(n, _)| n).collect()))
    }

    /// Tag polynomials for `key`, with algebra generator names bound to tags.
    fn tags(&self, spec: &TaskSpec, key: &str, a: &Presentation, names: &[Option<String>]) -> Result<Vec<Polynomial>, ParseError> {
        let (o, text) = spec.require(key)?;
        let tags = a.tag_ring().clone();
        let lookup = |n: &str| names.iter().position(|x| x.as_deref() == Some(n)).map(|i| Polynomial::var(&tags, i));
        list_items(text)
            .into_iter()
            .map(|(x, item)| tags.parse_with_bindings(item, &lookup).map_err(|e| spec.at(o + x, e.to_string())))
            .collect()
    }

    fn task(&mut self, spec: &TaskSpec) -> TaskResult {
        let mut d = Map::new();
        let g = self.sc.group.clone();
        let ring = self.sc.ring.clone();
        let cap = self.cap();
        let err = |e: &dyn fmt::Display| spec.at(0, e.to_string());
        match spec.kind.as_str() {
            "group" => {
                spec.check_keys(&["expect-order"])?;
                d.insert("order".into(), json!(g.order()));
                d.insert("permutation group".into(), json!(g.is_permutation_group()));
                d.insert("invariant subspace codimension".into(), json!(g.invariant_space().codim()));
                match spec.number("expect-order")? {
                    Some(n) => {
                        d.insert("expected order".into(), json!(n));
                        Ok((if n as usize == g.order() { Verdict::Pass } else { Verdict::Fail }, d))
                    }
                    None => Ok((Verdict::Complete, d)),
                }
            }
            "orbits" => {
                spec.check_keys(&["e", "expect"])?;
                let e = spec.number("e")?.unwrap_or(1) as u32;
                let part = g.orbits_of_points(e).map_err(|x| err(&x))?;
                let mut sizes: std::collections::BTreeMap<usize, usize> = Default::default();
                for s in part.orbit_sizes() {
                    *sizes.entry(s).or_default() += 1;
                }
                d.insert("points".into(), json!(part.num_points()));
                d.insert("orbits".into(), json!(part.num_orbits()));
                let hist: Map<String, Value> = sizes.iter().map(|(s, c)| (format!("size {s}"), json!(c))).collect();
                d.insert("orbit sizes".into(), Value::Object(hist));
                expected(spec, &part.num_orbits().to_string(), Verdict::Complete, &mut d)
            }
            "separates-points" => {
                spec.check_keys(&["set", "e", "expect"])?;
                let set = self.set(spec, "set")?;
                let e = spec.number("e")?.unwrap_or(1) as u32;
                let polys: Vec<Polynomial> = set.iter().map(|(_, p)| p.clone()).collect();
                let v = separates_points(&g, &polys, e).map_err(|x| err(&x))?;
                d.insert("set".into(), poly_list(&set));
                d.insert("e".into(), json!(e));
                d.extend(separating_details(&v));
                expected(spec, &v.outcome.to_string(), outcome_verdict(v.outcome), &mut d)
            }
            "check-geometric" => {
                spec.check_keys(&["set", "expect"])?;
                let set = self.set(spec, "set")?;
                let polys: Vec<Polynomial> = set.iter().map(|(_, p)| p.clone()).collect();
                let v = geometric_separating_test(&g, &polys, &ring, cap).map_err(|x| err(&x))?;
                d.insert("set".into(), poly_list(&set));
                d.extend(separating_details(&v));
                expected(spec, &v.outcome.to_string(), outcome_verdict(v.outcome), &mut d)
            }
            "inseparable-closure" => {
                spec.check_keys(&["set", "known", "mmax", "expect"])?;
                let set = self.polys(spec, "set")?;
                let known = match spec.get("known") {
                    Some(_) => self.polys(spec, "known")?,
                    None => Vec::new(),
                };
                let m = spec.number("mmax")?.map(|m| m as u32).or(self.opts.m_max);
                let v = inseparable_closure_test(&g, &set, &known, &ring, m, cap).map_err(|x| err(&x))?;
                d.extend(separating_details(&v));
                expected(spec, &v.outcome.to_string(), outcome_verdict(v.outcome), &mut d)
            }
            "invariants" => {
                spec.check_keys(&["degree", "expect"])?;
                let deg = spec.number("degree")?.ok_or_else(|| spec.at(0, "`invariants` needs `degree`"))? as u32;
                let b = invariant_basis(&g, &ring, deg).map_err(|x| err(&x))?;
                d.insert("degree".into(), json!(deg));
                d.insert("dimension".into(), json!(b.dim()));
                d.insert("basis".into(), json!(b.basis.iter().map(ToString::to_string).collect::<Vec<_>>()));
                expected(spec, &b.dim().to_string(), Verdict::Complete, &mut d)
            }
            "noether" => {
                spec.check_keys(&["name"])?;
                let set = noether_separating_set(&g, &ring).map_err(|x| err(&x))?;
                d.insert("size".into(), json!(set.len()));
                d.insert("set".into(), json!(set.iter().map(ToString::to_string).collect::<Vec<_>>()));
                if let Some(n) = self.bind(spec, Binding::Set(set.into_iter().map(|p| (None, p)).collect()))? {
                    d.insert("bound as".into(), json!(n));
                }
                Ok((Verdict::Complete, d))
            }
            "bireflection" => {
                spec.check_keys(&["expect"])?;
                let r = g.bireflection_analysis();
                let gen_codims: Map<String, Value> = g
                    .generator_names()
                    .iter()
                    .zip(g.generators())
                    .map(|(n, &s)| (n.clone(), json!(r.codims[s])))
                    .collect();
                d.insert("generator codimensions".into(), Value::Object(gen_codims));
                d.insert("reflections".into(), json!(r.reflections.len()));
                d.insert("bireflections".into(), json!(r.bireflections.len()));
                d.insert("generated by reflections".into(), json!(r.generated_by_reflections()));
                d.insert("generated by bireflections".into(), json!(r.generated_by_bireflections()));
                let class = if r.generated_by_reflections() {
                    "reflections"
                } else if r.generated_by_bireflections() {
                    "bireflections"
                } else {
                    "neither"
                };
                d.insert("generated by".into(), json!(class));
                expected(spec, class, Verdict::Complete, &mut d)
            }
            "bireflection-criterion" => {
                spec.check_keys(&["subgroup", "sigma", "expect"])?;
                let n = self.subgroup(spec, "subgroup")?;
                let (o, s) = spec.require("sigma")?;
                let sigma = self.sc.parse_element(s).map_err(|m| spec.at(o, m))?;
                let holds = g.check_bireflection_criterion(&n, sigma).map_err(|x| err(&x))?;
                d.insert("subgroup order".into(), json!(n.order()));
                d.insert("sigma codimension".into(), json!(g.codim(sigma)));
                d.insert("criterion holds".into(), json!(holds));
                let natural = if holds { Verdict::Pass } else { Verdict::Fail };
                expected(spec, if holds { "holds" } else { "fails" }, natural, &mut d)
            }
            "cocycle-space" => {
                spec.check_keys(&["degree", "character", "expect"])?;
                let module = match (spec.get("degree"), spec.get("character")) {
                    (Some(_), None) => {
                        let deg = spec.number("degree")?.unwrap_or(0) as u32;
                        CoefficientModule::graded(&g, &ring, deg).map_err(|x| err(&x))?
                    }
                    (None, Some((o, text))) => {
                        let field = g.field().clone();
                        let vals = self.sc.parse_assignments(text, |t| field.parse_code(t).map_err(|x| x.to_string())).map_err(|(x, m)| spec.at(o + x, m))?;
                        let vals: Vec<FieldElem> = vals.iter().map(|c| FieldElem::new(&field, c.unwrap_or(1))).collect();
                        CoefficientModule::character(&g, &vals).map_err(|x| err(&x))?
                    }
                    _ => return Err(spec.at(0, "give exactly one of `degree` or `character`")),
                };
                let s = cocycle_space(&module).map_err(|x| err(&x))?;
                d.insert("module".into(), json!(module.describe()));
                d.insert("dim Z1".into(), json!(s.dim_z));
                d.insert("dim B1".into(), json!(s.dim_b));
                d.insert("dim H1".into(), json!(s.dim_h()));
                expected(spec, &s.dim_h().to_string(), Verdict::Complete, &mut d)
            }
            "coboundary" => {
                spec.check_keys(&["cocycle", "g", "expect"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let w = coboundary_witness(&c).map_err(|x| err(&x))?;
                d.insert("module".into(), json!(c.module().describe()));
                d.insert("cocycle".into(), cocycle_table(&c));
                d.insert("coboundary".into(), json!(w.is_some()));
                if let Some(b) = &w {
                    d.insert("witness".into(), json!(b.to_string()));
                }
                expected(spec, if w.is_some() { "trivial" } else { "nontrivial" }, Verdict::Complete, &mut d)
            }
            "frobenius" => {
                spec.check_keys(&["cocycle", "g", "m", "name", "expect"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let m = spec.number("m")?.unwrap_or(1) as u32;
                let f = frobenius_power_cocycle(&c, m).map_err(|x| err(&x))?;
                let w = coboundary_witness(&f).map_err(|x| err(&x))?;
                d.insert("m".into(), json!(m));
                d.insert("module".into(), json!(f.module().describe()));
                d.insert("cocycle".into(), cocycle_table(&f));
                d.insert("coboundary".into(), json!(w.is_some()));
                if let Some(n) = self.bind(spec, Binding::Cocycle(f))? {
                    d.insert("bound as".into(), json!(n));
                }
                expected(spec, if w.is_some() { "trivial" } else { "nontrivial" }, Verdict::Complete, &mut d)
            }
            "nontrivial-frobenius" => {
                spec.check_keys(&["cocycle", "g", "mmax", "expect"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let m = spec.number("mmax")?.map(|m| m as u32).or(self.opts.m_max);
                let cert = nontrivial_all_frobenius(&c, m).map_err(|x| err(&x))?;
                d.insert("certificate".into(), json!(cert.to_string()));
                let (label, natural) = match cert {
                    FrobeniusCertificate::Refuted { .. } => ("refuted", Verdict::Fail),
                    FrobeniusCertificate::Checked { .. } => ("checked", Verdict::Inconclusive),
                    _ => ("certified", Verdict::Pass),
                };
                if let FrobeniusCertificate::Refuted { m } = cert {
                    d.insert("vanishes at m".into(), json!(m));
                }
                expected(spec, label, natural, &mut d)
            }
            "restriction-search" => {
                spec.check_keys(&["max-degree", "name"])?;
                let max = spec.number("max-degree")?.map(|m| m as u32);
                let found = restriction_trivial_classes(&g, &ring, max).map_err(|x| err(&x))?;
                match found {
                    None => {
                        d.insert("found".into(), json!(false));
                        Ok((Verdict::Inconclusive, d))
                    }
                    Some(s) => {
                        d.insert("found".into(), json!(true));
                        d.insert("degree".into(), json!(s.degree));
                        d.insert("classes".into(), json!(s.classes.len()));
                        d.insert("cocycle".into(), cocycle_table(&s.classes[0]));
                        if let Some(n) = self.bind(spec, Binding::Cocycle(s.classes[0].clone()))? {
                            d.insert("bound as".into(), json!(n));
                        }
                        Ok((Verdict::Pass, d))
                    }
                }
            }
            "restrict" => {
                spec.check_keys(&["cocycle", "g", "subgroup", "expect"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let h = self.subgroup(spec, "subgroup")?;
                let r = restrict(&c, &h).map_err(|x| err(&x))?;
                let w = coboundary_witness(&r).map_err(|x| err(&x))?;
                d.insert("subgroup order".into(), json!(h.order()));
                d.insert("coboundary".into(), json!(w.is_some()));
                expected(spec, if w.is_some() { "trivial" } else { "nontrivial" }, Verdict::Complete, &mut d)
            }
            "annihilates" => {
                spec.check_keys(&["cocycle", "g", "a"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let set = self.set(spec, "a")?;
                let mut all = true;
                let mut rows = Vec::new();
                for (n, a) in &set {
                    let w = annihilates(a, &c).map_err(|x| err(&x))?;
                    all &= w.is_some();
                    let label = n.clone().unwrap_or_else(|| a.to_string());
                    let mut row = Map::new();
                    row.insert("element".into(), json!(label));
                    row.insert("annihilates".into(), json!(w.is_some()));
                    if let Some(b) = w {
                        row.insert("witness".into(), json!(b.to_string()));
                    }
                    rows.push(Value::Object(row));
                }
                d.insert("elements".into(), Value::Array(rows));
                Ok((if all { Verdict::Pass } else { Verdict::Fail }, d))
            }
            "certificate" => {
                spec.check_keys(&["cocycle", "g", "ann", "expect"])?;
                let c = self.cocycle(spec, "cocycle")?;
                let ann = self.polys(spec, "ann")?;
                let (label, natural) = match defect_certificate(&c, &ann, self.opts.m_max, self.opts.heuristic, cap) {
                    Ok(cert) => {
                        d.insert("nontriviality".into(), json!(cert.nontriviality.to_string()));
                        let pairs: Vec<Value> = cert
                            .elements
                            .iter()
                            .map(|(a, b)| json!({ "a": a.to_string(), "b": b.to_string() }))
                            .collect();
                        d.insert("annihilators".into(), Value::Array(pairs));
                        d.insert("k".into(), json!(cert.k()));
                        d.insert("bound".into(), json!(cert.bound()));
                        d.insert("verdict".into(), json!(cert.verdict()));
                        if cert.conditional {
                            ("conditional", Verdict::Inconclusive)
                        } else {
                            ("certified", Verdict::Pass)
                        }
                    }
                    Err(e @ (CmError::NontrivialityNotCertified(_) | CmError::NotAnnihilating { .. } | CmError::NotPhsop { .. })) => {
                        d.insert("refused".into(), json!(e.to_string()));
                        let inconclusive = matches!(e, CmError::NontrivialityNotCertified(FrobeniusCertificate::Checked { .. }));
                        ("refused", if inconclusive { Verdict::Inconclusive } else { Verdict::Fail })
                    }
                    Err(e) => return Err(err(&e)),
                };
                expected(spec, label, natural, &mut d)
            }
            "hsop" => {
                spec.check_keys(&["set", "expect"])?;
                let set = self.set(spec, "set")?;
                let polys: Vec<Polynomial> = set.iter().map(|(_, p)| p.clone()).collect();
                let ok = hsop_check_polyring(&polys, &ring, cap).map_err(|x| err(&x))?;
                d.insert("set".into(), poly_list(&set));
                d.insert("hsop".into(), json!(ok));
                expected(spec, if ok { "pass" } else { "fail" }, if ok { Verdict::Pass } else { Verdict::Fail }, &mut d)
            }
            "present" => {
                spec.check_keys(&["algebra", "expect"])?;
                let (key, _) = self.algebra(spec)?;
                let a = &self.algebras[&key];
                let rels: Vec<String> = a.relations().basis().map(ToString::to_string).collect();
                let principal = rels.len() <= 1;
                d.insert("tag degrees".into(), json!(a.degrees()));
                d.insert("relations".into(), json!(rels));
                d.insert("dimension".into(), json!(a.dim()));
                d.insert("principal".into(), json!(principal));
                let label = if rels.is_empty() { "free" } else if principal { "hypersurface" } else { "general" };
                expected(spec, label, Verdict::Complete, &mut d)
            }
            "regular-sequence" => {
                spec.check_keys(&["algebra", "seq", "expect"])?;
                let (key, names) = self.algebra(spec)?;
                let a = &self.algebras[&key];
                let seq = self.tags(spec, "seq", a, &names)?;
                let v = regular_sequence_check(a, &seq, cap).map_err(|x| err(&x))?;
                d.insert("regular".into(), json!(v.is_regular()));
                let label = match v.failing_index {
                    Some(i) => {
                        d.insert("fails at".into(), json!(i));
                        format!("fails at {i}")
                    }
                    None => "regular".to_string(),
                };
                expected(spec, &label, if v.is_regular() { Verdict::Pass } else { Verdict::Fail }, &mut d)
            }
            "hilbert-series" => {
                spec.check_keys(&["algebra", "expect"])?;
                let (key, _) = self.algebra(spec)?;
                let h = hilbert_series(&self.algebras[&key]);
                d.insert("series".into(), json!(h.to_string()));
                d.insert("coefficients".into(), json!(h.expand(12)));
                d.insert("pole order".into(), json!(h.pole_order()));
                match spec.get("expect") {
                    None => Ok((Verdict::Complete, d)),
                    Some((o, want)) => {
                        let w = HilbertSeries::parse(want).ok_or_else(|| spec.at(o, format!("cannot parse series `{want}`")))?;
                        d.insert("expected".into(), json!(want));
                        Ok((if w == h { Verdict::Pass } else { Verdict::Fail }, d))
                    }
                }
            }
            "free-module" => {
                spec.check_keys(&["algebra", "hsop", "basis", "expect"])?;
                let (key, names) = self.algebra(spec)?;
                let a = &self.algebras[&key];
                let hsop = self.tags(spec, "hsop", a, &names)?;
                let basis = self.tags(spec, "basis", a, &names)?;
                let v = free_module_check(a, &hsop, &basis, cap).map_err(|x| err(&x))?;
                d.insert("free".into(), json!(v.is_free()));
                d.insert("generated".into(), json!(v.generation_failure.is_none()));
                if let Some((i, j)) = v.generation_failure {
                    d.insert("product outside span".into(), json!(format!("generator {} times basis element {}", i + 1, j + 1)));
                }
                d.insert("hilbert identity".into(), json!(v.hilbert_identity));
                d.insert("series from basis".into(), json!(v.expected_series.to_string()));
                let ok = v.is_free();
                expected(spec, if ok { "free" } else { "not free" }, if ok { Verdict::Pass } else { Verdict::Fail }, &mut d)
            }
            "gorenstein" => {
                spec.check_keys(&["algebra", "expect-a"])?;
                let (key, _) = self.algebra(spec)?;
                let a = &self.algebras[&key];
                let h = hilbert_series(a);
                let v = gorenstein_check(&h, a.dim(), Some(ring.nvars()));
                d.insert("gorenstein".into(), json!(v.is_gorenstein()));
                if let Some(x) = v.a {
                    d.insert("a".into(), json!(x));
                }
                if let Some(s) = v.strongly {
                    d.insert("strongly gorenstein".into(), json!(s));
                }
                match spec.get("expect-a") {
                    None => Ok((if v.is_gorenstein() { Verdict::Pass } else { Verdict::Fail }, d)),
                    Some((o, want)) => {
                        let want: i64 = want.parse().map_err(|_| spec.at(o, "`expect-a` must be an integer"))?;
                        d.insert("expected a".into(), json!(want));
                        Ok((if v.a == Some(want) { Verdict::Pass } else { Verdict::Fail }, d))
                    }
                }
            }
            "bar-cohomology" => {
                spec.check_keys(&["n", "expect"])?;
                let n = spec.number("n")?.unwrap_or(1) as u32;
                let dim = bar_hn_trivial(&g, n).map_err(|x| err(&x))?;
                d.insert("n".into(), json!(n));
                d.insert("dim Hn".into(), json!(dim));
                expected(spec, &dim.to_string(), Verdict::Complete, &mut d)
            }
            other => unreachable!("task kind {other} is validated at parse time"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C4: &str = r#"
# C4 permuting four coordinates
[field]
p = 2

[ring]
vars = "x1, x2, x3, x4"

[group]
sigma = "[[0,0,0,1],[1,0,0,0],[0,1,0,0],[0,0,1,0]]"

[define]
c1 = "x1+x2+x3+x4"
c2 = "x1*x3+x2*x4"
c3 = "x1*x2+x2*x3+x3*x4+x1*x4"
c4 = "x1*x2*x3*x4"
cs = "{c1, c2, c3, c4}"
parity = "cocycle(degree: 0): sigma -> 1"

[tasks]
orbits = "e: 1; expect: 6"
separates-points = "cs"
coboundary = "parity; expect: nontrivial"
annihilates = "cocycle: parity; a: c1, c2, c3"
certificate = "cocycle: parity; ann: c1, c2, c3"
"#;

    #[test]
    fn lexer_positions() {
        let err = Scenario::parse("t", "[field]\np = 2\n[ring]\nvars = \"x\"\n[tasks]\nbogus = \"\"\n").err().unwrap();
        assert_eq!((err.line, err.column), (6, 1));
        let err = Scenario::parse("t", "[field]\np = \"2\n").err().unwrap();
        assert_eq!((err.line, err.column, err.message.as_str()), (2, 5, "unterminated string"));
        let err = Scenario::parse("t", "[fields]\n").err().unwrap();
        assert_eq!(err.line, 1);
        let err = Scenario::parse("t", "[field]\np = 2\n[ring]\nvars = \"x\"\n[define]\nf = \"x + y\"\n").err().unwrap();
        assert_eq!((err.line, err.column), (6, 6));
        assert!(err.message.contains('y'), "{}", err.message);
    }

    #[test]
    fn c4_scenario_runs() {
        let sc = Scenario::parse("c4", C4).unwrap();
        assert_eq!(sc.group().order(), 4);
        let report = run(&sc, &RunOptions::default());
        let verdicts: Vec<Verdict> = report.tasks.iter().map(|t| t.verdict).collect();
        assert_eq!(verdicts, vec![Verdict::Pass; 5], "{}", report.to_text());
        assert_eq!(report.exit_code(), 0);
        let cert = &report.tasks[4].details;
        assert_eq!(cert["bound"], json!(1));
        let ann = &report.tasks[3].details["elements"];
        assert_eq!(ann[0]["witness"], json!("x1 + x3"));
    }

    #[test]
    fn text_and_structured_agree() {
        let sc = Scenario::parse("c4", C4).unwrap();
        let report = run(&sc, &RunOptions::default());
        let text = report.to_text();
        let json = report.to_json();
        for t in json["tasks"].as_array().unwrap() {
            assert!(text.contains(&t["verdict"].as_str().unwrap().to_uppercase()));
            for (_, v) in t["details"].as_object().unwrap() {
                if let Some(s) = v.as_str() {
                    assert!(text.contains(s), "{s}");
                }
            }
        }
        assert_eq!(report.to_structured(), run(&sc, &RunOptions::default()).to_structured());
    }

    #[test]
    fn empty_task_list() {
        let sc = Scenario::parse("empty", "[field]\np = 3\n[ring]\nvars = \"x\"\n").unwrap();
        let report = run(&sc, &RunOptions::default());
        assert!(report.tasks.is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn task_filter_and_errors() {
        let sc = Scenario::parse("c4", C4).unwrap();
        let only = RunOptions { task: Some("orbits".into()), ..Default::default() };
        let report = run(&sc, &only);
        assert_eq!(report.tasks.len(), 1);
        assert_eq!(report.tasks[0].index, 1);

        let bad = C4.replace("coboundary = \"parity; expect: nontrivial\"", "coboundary = \"missing\"");
        let report = run(&Scenario::parse("c4", &bad).unwrap(), &RunOptions::default());
        assert_eq!(report.tasks[2].verdict, Verdict::Error);
        assert!(report.tasks[2].details["error"].as_str().unwrap().contains("unknown name `missing`"));
        assert_eq!(report.exit_code(), 1);

        let failing = C4.replace("expect: 6", "expect: 7");
        assert_eq!(run(&Scenario::parse("c4", &failing).unwrap(), &RunOptions::default()).exit_code(), 2);
    }

    #[test]
    fn g_names_the_cocycle() {
        let short = C4.replace("certificate = \"cocycle: parity;", "certificate = \"g: parity;");
        let report = run(&Scenario::parse("c4", &short).unwrap(), &RunOptions::default());
        assert_eq!(report.tasks[4].verdict, Verdict::Pass);
        assert_eq!(report.tasks[4].details["bound"], 1);

        let both = C4.replace("certificate = \"cocycle: parity;", "certificate = \"g: parity; cocycle: parity;");
        let report = run(&Scenario::parse("c4", &both).unwrap(), &RunOptions::default());
        assert_eq!(report.tasks[4].verdict, Verdict::Error);
    }

    #[test]
    fn extension_fields_and_characters() {
        let text = r#"
[field]
p = 2
deg = 2
modulus = "w^2 + w + 1"

[ring]
vars = "x1, x2, x3, x4"

[group]
chi = "[[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,1,0]]"
tau = "[[0,0,1,0],[1,0,0,0],[0,1,0,0],[0,0,0,1]]"

[define]
g = "cocycle(character: chi -> 1, tau -> w): chi -> w^2"

[tasks]
group = "expect-order: 12"
cocycle-space = "degree: 0; expect: 0"
coboundary = "g; expect: nontrivial"
frobenius = "g; m: 1; name: h; expect: nontrivial"
coboundary = "h; expect: nontrivial"
nontrivial-frobenius = "g; expect: certified"
"#;
        let report = run(&Scenario::parse("a4", text).unwrap(), &RunOptions::default());
        assert_eq!(report.exit_code(), 0, "{}", report.to_text());
        assert!(report.tasks[3].details["module"].as_str().unwrap().contains("[1, w+1]"), "{}", report.to_text());
    }
}
