//! Verification reports: ordered sections of values, proof-trace lines and
//! verdicts, rendered as text or as a versioned line-delimited machine format.
//!
//! Machine format, one record per line, fields separated by TAB:
//!
//! ```text
//! gwsym-report  <schema version>
//! command       <command line>
//! section       <name>
//! value         <key>  <value>
//! trace         <text>
//! verdict       <id>  PASS|FAIL  <claim>  <citation>  <quote>
//! detail        <text>            (belongs to the preceding verdict)
//! end
//! ```
//!
//! Inside fields, `\` `TAB` and newline are written as `\\`, `\t` and `\n`.

use std::fmt::Write as _;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
const MAGIC: &str = "gwsym-report";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub id: String,
    pub passed: bool,
    pub claim: String,
    pub detail: Vec<String>,
    pub citation: String,
    pub quote: String,
}

impl Verdict {
    pub fn new(id: &str, passed: bool, claim: impl Into<String>, citation: &str, quote: &str) -> Self {
        Verdict {
            id: id.to_string(),
            passed,
            claim: claim.into(),
            detail: Vec::new(),
            citation: citation.to_string(),
            quote: quote.to_string(),
        }
    }

    pub fn with_detail(mut self, lines: impl IntoIterator<Item = String>) -> Self {
        self.detail.extend(lines);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Value { key: String, value: String },
    Trace(String),
    Verdict(Verdict),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Section {
            name: name.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push(Entry::Value {
            key: key.into(),
            value: value.to_string(),
        });
    }

    pub fn trace(&mut self, line: impl ToString) {
        self.entries.push(Entry::Trace(line.to_string()));
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.entries.push(Entry::Verdict(v));
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Verdict(v) => Some(v),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unsupported schema version {0}")]
    Version(u32),
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            sections: Vec::new(),
        }
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.sections.iter().flat_map(Section::verdicts)
    }

    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts().find(|v| v.id == id)
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.sections.iter().flat_map(|s| &s.entries).find_map(|e| match e {
            Entry::Value { key: k, value } if k == key => Some(value.as_str()),
            _ => None,
        })
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts().all(|v| v.passed)
    }

    pub fn failing(&self) -> Vec<&Verdict> {
        self.verdicts().filter(|v| !v.passed).collect()
    }

    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        let mut line = |fields: &[&str]| {
            let escaped: Vec<String> = fields.iter().map(|f| escape(f)).collect();
            out.push_str(&escaped.join("\t"));
            out.push('\n');
        };
        line(&[MAGIC, &self.schema_version.to_string()]);
        line(&["command", &self.command]);
        for s in &self.sections {
            line(&["section", &s.name]);
            for e in &s.entries {
                match e {
                    Entry::Value { key, value } => line(&["value", key, value]),
                    Entry::Trace(t) => line(&["trace", t]),
                    Entry::Verdict(v) => {
                        let status = if v.passed { "PASS" } else { "FAIL" };
                        line(&["verdict", &v.id, status, &v.claim, &v.citation, &v.quote]);
                        for d in &v.detail {
                            line(&["detail", d]);
                        }
                    }
                }
            }
        }
        line(&["end"]);
        out
    }

    pub fn from_machine(input: &str) -> Result<Self, ReportError> {
        let bad = |line: usize, reason: &str| ReportError::Malformed {
            line,
            reason: reason.to_string(),
        };
        let mut lines = input.lines().enumerate().map(|(n, l)| (n + 1, l));
        let (n, head) = lines.next().ok_or_else(|| bad(1, "empty report"))?;
        let head = split(head, n)?;
        if head.len() != 2 || head[0] != MAGIC {
            return Err(bad(n, "missing report header"));
        }
        let version: u32 = head[1].parse().map_err(|_| bad(n, "bad schema version"))?;
        if version != SCHEMA_VERSION {
            return Err(ReportError::Version(version));
        }
        let (n, cmd) = lines.next().ok_or_else(|| bad(n + 1, "missing command"))?;
        let cmd = split(cmd, n)?;
        if cmd.len() != 2 || cmd[0] != "command" {
            return Err(bad(n, "expected command record"));
        }
        let mut report = Report {
            schema_version: version,
            command: cmd[1].clone(),
            sections: Vec::new(),
        };
        let mut ended = false;
        for (n, raw) in lines {
            if ended {
                return Err(bad(n, "content after end"));
            }
            let f = split(raw, n)?;
            let arity = |k: usize| {
                if f.len() == k {
                    Ok(())
                } else {
                    Err(bad(n, &format!("{} expects {} fields", f[0], k)))
                }
            };
            match f[0].as_str() {
                "section" => {
                    arity(2)?;
                    report.sections.push(Section::new(&f[1]));
                }
                "end" => {
                    arity(1)?;
                    ended = true;
                }
                kind => {
                    let sec = report
                        .sections
                        .last_mut()
                        .ok_or_else(|| bad(n, "record outside a section"))?;
                    match kind {
                        "value" => {
                            arity(3)?;
                            sec.entries.push(Entry::Value {
                                key: f[1].clone(),
                                value: f[2].clone(),
                            });
                        }
                        "trace" => {
                            arity(2)?;
                            sec.entries.push(Entry::Trace(f[1].clone()));
                        }
                        "verdict" => {
                            arity(6)?;
                            let passed = match f[2].as_str() {
                                "PASS" => true,
                                "FAIL" => false,
                                _ => return Err(bad(n, "status must be PASS or FAIL")),
                            };
                            sec.entries.push(Entry::Verdict(Verdict {
                                id: f[1].clone(),
                                passed,
                                claim: f[3].clone(),
                                detail: Vec::new(),
                                citation: f[4].clone(),
                                quote: f[5].clone(),
                            }));
                        }
                        "detail" => {
                            arity(2)?;
                            match sec.entries.last_mut() {
                                Some(Entry::Verdict(v)) => v.detail.push(f[1].clone()),
                                _ => return Err(bad(n, "detail without a verdict")),
                            }
                        }
                        other => return Err(bad(n, &format!("unknown record {other:?}"))),
                    }
                }
            }
        }
        if !ended {
            return Err(bad(0, "missing end record"));
        }
        Ok(report)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "gwsym report (schema {}): {}", self.schema_version, self.command);
        for s in &self.sections {
            let _ = writeln!(out, "\n== {} ==", s.name);
            for e in &s.entries {
                match e {
                    Entry::Value { key, value } if value.contains('\n') => {
                        let _ = writeln!(out, "  {key}:");
                        for l in value.lines() {
                            let _ = writeln!(out, "    {l}");
                        }
                    }
                    Entry::Value { key, value } => {
                        let _ = writeln!(out, "  {key}: {value}");
                    }
                    Entry::Trace(t) => {
                        let _ = writeln!(out, "  | {t}");
                    }
                    Entry::Verdict(v) => {
                        let status = if v.passed { "PASS" } else { "FAIL" };
                        let _ = writeln!(out, "  [{status}] {}: {}", v.id, v.claim);
                        for d in &v.detail {
                            let _ = writeln!(out, "      {d}");
                        }
                        if v.quote.is_empty() {
                            let _ = writeln!(out, "      source: {}", v.citation);
                        } else {
                            let _ = writeln!(out, "      source: {}: \"{}\"", v.citation, v.quote);
                        }
                    }
                }
            }
        }
        let total = self.verdicts().count();
        let failing = self.failing();
        let _ = writeln!(out, "\n{} of {} verdicts passed", total - failing.len(), total);
        for v in failing {
            let _ = writeln!(out, "  failing: {}", v.id);
        }
        out
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn split(line: &str, n: usize) -> Result<Vec<String>, ReportError> {
    line.split('\t').map(|f| unescape(f, n)).collect()
}

fn unescape(s: &str, n: usize) -> Result<String, ReportError> {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            _ => {
                return Err(ReportError::Malformed {
                    line: n,
                    reason: "bad escape".into(),
                })
            }
        }
    }
    Ok(out)
}
