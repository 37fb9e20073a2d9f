//! Run configuration: a flat `key = value` file with `[command]` sections,
//! overridden by `--key value` flags.
//!
//! Grammar, one item per line:
//!   `# comment`, blank, `[section]`, or `key = value` (value runs to end of
//!   line; a `#` after whitespace starts a trailing comment).
//! Keys before any section apply to every command. The `[sources]` section
//! maps a zero-table identifier to `url [sha256] [base=offset]`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mesozeta::zeros::{SourceEntry, SourceRegistry};
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Text,
    Path,
    /// Comma-separated floats.
    Floats,
    /// Comma-separated positive integers.
    Ints,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    /// None means required.
    pub default: Option<&'static str>,
}

const fn req(name: &'static str, kind: Kind) -> KeySpec {
    KeySpec { name, kind, default: None }
}

const fn opt(name: &'static str, kind: Kind, default: &'static str) -> KeySpec {
    KeySpec { name, kind, default: Some(default) }
}

/// Empty default: the key may be left unset.
const fn maybe(name: &'static str, kind: Kind) -> KeySpec {
    KeySpec { name, kind, default: Some("") }
}

pub const COMMANDS: [&str; 9] = [
    "zeros-compute",
    "zeros-fetch",
    "zeros-verify",
    "clt",
    "explicit",
    "fujii",
    "density-synth",
    "density-windows",
    "cue",
];

/// Keys valid outside sections and as global flags.
pub const GLOBAL_KEYS: [&str; 3] = ["seed", "out", "jobs"];

pub fn keys_for(command: &str) -> &'static [KeySpec] {
    use Kind::*;
    match command {
        "zeros-compute" => {
            const KEYS: &[KeySpec] =
                &[opt("t_min", Float, "0"), req("t_max", Float), opt("abs_tol", Float, "2e-6"), maybe("save", Path)];
            KEYS
        }
        "zeros-fetch" => {
            const KEYS: &[KeySpec] = &[req("source", Text)];
            KEYS
        }
        "zeros-verify" => {
            const KEYS: &[KeySpec] = &[maybe("source", Text), maybe("table", Path)];
            KEYS
        }
        "clt" => {
            const KEYS: &[KeySpec] = &[
                req("T", Float),
                req("n", Float),
                req("eta", Text),
                req("samples", Int),
                maybe("weight", Text),
                maybe("table", Path),
                maybe("samples_csv", Path),
            ];
            KEYS
        }
        "explicit" => {
            const KEYS: &[KeySpec] = &[req("g", Text), opt("V", Float, "1000"), maybe("table", Path)];
            KEYS
        }
        "fujii" => {
            const KEYS: &[KeySpec] = &[
                req("T", Float),
                opt("span_exponent", Float, "0.6"),
                req("h_log", Floats),
                opt("k", Ints, "1"),
                opt("a", Float, "0.1"),
                maybe("table", Path),
            ];
            KEYS
        }
        "density-synth" => {
            const KEYS: &[KeySpec] =
                &[req("T", Float), opt("c", Float, "0.5"), opt("fraction", Float, "1"), maybe("zeros_csv", Path)];
            KEYS
        }
        "density-windows" => {
            const KEYS: &[KeySpec] = &[
                req("T", Float),
                opt("c", Float, "0.5"),
                opt("fraction", Float, "1"),
                opt("mode", Text, "windowed"),
                opt("sigma_offsets", Floats, "2,4,8"),
                opt("windows", Floats, "1,2,4"),
                opt("k", Ints, "1,2"),
                opt("weight", Text, "uniform(0.25,0.75)"),
                opt("f_alpha", Float, "1"),
                maybe("csv", Path),
            ];
            KEYS
        }
        "cue" => {
            const KEYS: &[KeySpec] =
                &[req("N", Int), req("f", Text), req("samples", Int), opt("sampler", Text, "verblunsky")];
            KEYS
        }
        _ => &[],
    }
}

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    /// Section name ("" for top level) → key → (value, line).
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut file = ConfigFile::default();
        let mut section = String::new();
        file.sections.entry(section.clone()).or_default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| CliError::Syntax {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                file.sections.entry(section.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
                path: path.to_path_buf(),
                line: line_no,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Syntax { path: path.to_path_buf(), line: line_no, message: "empty key".into() });
            }
            let entries = file.sections.get_mut(&section).expect("section exists");
            if entries.insert(key.clone(), (value.trim().to_string(), line_no)).is_some() {
                return Err(CliError::Syntax {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(file)
    }

    pub fn section(&self, name: &str) -> impl Iterator<Item = (&str, &str)> {
        self.sections.get(name).into_iter().flat_map(|m| m.iter().map(|(k, (v, _))| (k.as_str(), v.as_str())))
    }

    /// The `[sources]` section on top of the built-in registry.
    pub fn registry(&self) -> Result<SourceRegistry, CliError> {
        let mut reg = SourceRegistry::standard();
        for (id, value) in self.section("sources") {
            let mut parts = value.split_whitespace();
            let url = parts.next().ok_or_else(|| CliError::Type {
                key: format!("sources.{id}"),
                value: value.to_string(),
                expected: "url [sha256] [base=offset]".into(),
            })?;
            let mut entry = SourceEntry { url: url.to_string(), sha256: None, base: 0.0 };
            for p in parts {
                if let Some(b) = p.strip_prefix("base=") {
                    entry.base = b.parse().map_err(|_| CliError::Type {
                        key: format!("sources.{id}"),
                        value: b.to_string(),
                        expected: "a number".into(),
                    })?;
                } else {
                    entry.sha256 = Some(p.to_string());
                }
            }
            reg.insert(id, entry);
        }
        Ok(reg)
    }
}

fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        return "";
    }
    match line.find(" #").or_else(|| line.find("\t#")) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parsed value of one key.
#[derive(Debug, Clone, PartialEq)]
pub enum Setting {
    Float(f64),
    Int(u64),
    Text(String),
    Path(PathBuf),
    Floats(Vec<f64>),
    Ints(Vec<u64>),
    Unset,
}

impl Setting {
    fn parse(key: &str, kind: Kind, raw: &str) -> Result<Self, CliError> {
        let type_error = |expected: &str| CliError::Type {
            key: key.to_string(),
            value: raw.to_string(),
            expected: expected.to_string(),
        };
        let float = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
        let int = |s: &str| s.trim().parse::<u64>().ok();
        Ok(match kind {
            Kind::Float => Setting::Float(float(raw).ok_or_else(|| type_error("a finite number"))?),
            Kind::Int => Setting::Int(int(raw).ok_or_else(|| type_error("a non-negative integer"))?),
            Kind::Text => Setting::Text(raw.trim().to_string()),
            Kind::Path => Setting::Path(PathBuf::from(raw.trim())),
            Kind::Floats => Setting::Floats(
                raw.split(',')
                    .map(float)
                    .collect::<Option<Vec<_>>>()
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| type_error("comma-separated numbers"))?,
            ),
            Kind::Ints => Setting::Ints(
                raw.split(',')
                    .map(int)
                    .collect::<Option<Vec<_>>>()
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| type_error("comma-separated integers"))?,
            ),
        })
    }

    fn to_json(&self) -> Value {
        match self {
            Setting::Float(x) => json!(x),
            Setting::Int(x) => json!(x),
            Setting::Text(s) => json!(s),
            Setting::Path(p) => json!(p.display().to_string()),
            Setting::Floats(v) => json!(v),
            Setting::Ints(v) => json!(v),
            Setting::Unset => Value::Null,
        }
    }
}

/// Fully resolved, typed settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub settings: BTreeMap<&'static str, Setting>,
    pub out: Option<PathBuf>,
    pub master_seed: u64,
    pub jobs: Option<usize>,
    pub registry: SourceRegistry,
}

impl RunConfig {
    /// File values first, then flags; every key must be known to the command.
    pub fn resolve(
        command: &str,
        file: Option<&ConfigFile>,
        flags: &[(String, String)],
        out: Option<PathBuf>,
        seed: Option<u64>,
        jobs: Option<usize>,
    ) -> Result<Self, CliError> {
        let specs = keys_for(command);
        if specs.is_empty() {
            return Err(CliError::UnknownCommand(command.to_string()));
        }
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        let mut global: BTreeMap<String, String> = BTreeMap::new();
        if let Some(f) = file {
            for (k, v) in f.section("") {
                if GLOBAL_KEYS.contains(&k) {
                    global.insert(k.to_string(), v.to_string());
                } else {
                    return Err(CliError::UnknownKey { key: k.to_string(), command: command.to_string() });
                }
            }
            for (k, v) in f.section(command) {
                raw.insert(k.to_string(), v.to_string());
            }
        }
        for (k, v) in flags {
            raw.insert(k.clone(), v.clone());
        }
        for k in raw.keys() {
            if !specs.iter().any(|s| s.name == k) {
                return Err(CliError::UnknownKey { key: k.clone(), command: command.to_string() });
            }
        }
        let mut settings = BTreeMap::new();
        for spec in specs {
            let value = match (raw.get(spec.name), spec.default) {
                (Some(v), _) => Setting::parse(spec.name, spec.kind, v)?,
                (None, Some("")) => Setting::Unset,
                (None, Some(d)) => Setting::parse(spec.name, spec.kind, d)?,
                (None, None) => return Err(CliError::MissingKey(spec.name.to_string())),
            };
            settings.insert(spec.name, value);
        }
        let master_seed = match (seed, global.get("seed")) {
            (Some(s), _) => s,
            (None, Some(s)) => s.parse().map_err(|_| CliError::Type {
                key: "seed".into(),
                value: s.clone(),
                expected: "a 64-bit unsigned integer".into(),
            })?,
            (None, None) => 0,
        };
        let jobs =
            match (jobs, global.get("jobs")) {
                (Some(j), _) => Some(j),
                (None, Some(j)) => Some(j.parse().ok().filter(|&j: &usize| j >= 1).ok_or_else(|| CliError::Range {
                    key: "jobs".into(),
                    message: "need a positive integer".into(),
                })?),
                (None, None) => None,
            };
        if jobs == Some(0) {
            return Err(CliError::Range { key: "jobs".into(), message: "need a positive integer".into() });
        }
        let out = out.or_else(|| global.get("out").map(PathBuf::from));
        let registry = match file {
            Some(f) => f.registry()?,
            None => SourceRegistry::standard(),
        };
        Ok(RunConfig { command: command.to_string(), settings, out, master_seed, jobs, registry })
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.settings.get(key) {
            Some(Setting::Float(x)) => *x,
            other => panic!("`{key}` is not a float setting: {other:?}"),
        }
    }

    pub fn int(&self, key: &str) -> u64 {
        match self.settings.get(key) {
            Some(Setting::Int(x)) => *x,
            other => panic!("`{key}` is not an integer setting: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.settings.get(key) {
            Some(Setting::Text(s)) => Some(s),
            Some(Setting::Unset) => None,
            other => panic!("`{key}` is not a text setting: {other:?}"),
        }
    }

    pub fn path(&self, key: &str) -> Option<&Path> {
        match self.settings.get(key) {
            Some(Setting::Path(p)) => Some(p),
            Some(Setting::Unset) => None,
            other => panic!("`{key}` is not a path setting: {other:?}"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.settings.get(key) {
            Some(Setting::Floats(v)) => v,
            other => panic!("`{key}` is not a list setting: {other:?}"),
        }
    }

    pub fn ints(&self, key: &str) -> &[u64] {
        match self.settings.get(key) {
            Some(Setting::Ints(v)) => v,
            other => panic!("`{key}` is not a list setting: {other:?}"),
        }
    }

    /// The resolved configuration as echoed into every output record.
    pub fn echo(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.settings {
            map.insert(k.to_string(), v.to_json());
        }
        map.insert("seed".into(), json!(self.master_seed));
        Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> ConfigFile {
        ConfigFile::parse(text, Path::new("test.conf")).unwrap()
    }

    #[test]
    fn minimal_clt_config_resolves() {
        let f = file("seed = 7\n[clt]\nT = 1e6  # height\nn = 5\neta = indicator(0,1)\nsamples = 100\n");
        let c = RunConfig::resolve("clt", Some(&f), &[], None, None, None).unwrap();
        assert_eq!(c.float("T"), 1e6);
        assert_eq!(c.int("samples"), 100);
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.text("weight"), None);
    }

    #[test]
    fn flags_override_the_file() {
        let f = file("[cue]\nN = 64\nf = 2*cos(1)\nsamples = 10\n");
        let flags = vec![("N".to_string(), "8".to_string())];
        let c = RunConfig::resolve("cue", Some(&f), &flags, None, Some(3), None).unwrap();
        assert_eq!(c.int("N"), 8);
        assert_eq!(c.master_seed, 3);
    }

    #[test]
    fn unknown_missing_and_mistyped_keys_are_named() {
        let f = file("[cue]\nN = 64\nf = 2*cos(1)\nsamples = 10\nfoo = 1\n");
        match RunConfig::resolve("cue", Some(&f), &[], None, None, None) {
            Err(CliError::UnknownKey { key, .. }) => assert_eq!(key, "foo"),
            other => panic!("{other:?}"),
        }
        let f = file("[cue]\nN = 64\nf = 2*cos(1)\n");
        match RunConfig::resolve("cue", Some(&f), &[], None, None, None) {
            Err(CliError::MissingKey(key)) => assert_eq!(key, "samples"),
            other => panic!("{other:?}"),
        }
        let f = file("[cue]\nN = many\nf = 2*cos(1)\nsamples = 3\n");
        match RunConfig::resolve("cue", Some(&f), &[], None, None, None) {
            Err(CliError::Type { key, .. }) => assert_eq!(key, "N"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_sections_are_ignored_and_sources_register() {
        let f = file("[clt]\nbogus = 1\n[sources]\nlocal = http://example.invalid/z.txt abc123 base=1000\n");
        let c = RunConfig::resolve("zeros-fetch", Some(&f), &[("source".into(), "local".into())], None, None, None)
            .unwrap();
        let entry = c.registry.get("local").unwrap();
        assert_eq!(entry.sha256.as_deref(), Some("abc123"));
        assert_eq!(entry.base, 1000.0);
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        match ConfigFile::parse("[clt]\nT 100\n", Path::new("x")) {
            Err(CliError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
