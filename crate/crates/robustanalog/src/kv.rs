//! Tiny line-oriented config format shared by experiment configs, benchmark
//! definitions, and constants files.
//!
//! Rules: `#` starts a comment line, `[name]` opens a section, `key = value`
//! inside a section is a pair, and any other non-empty line is a bare row of
//! whitespace-separated tokens (used for tabular sections such as a design
//! space). Keys before the first header belong to the unnamed section `""`.
//! Errors carry line numbers so config mistakes point at the offending line.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Document {
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub line: usize,
    pub kind: EntryKind,
}

#[derive(Debug, Clone)]
pub enum EntryKind {
    Pair { key: String, value: String },
    Row(Vec<String>),
}

pub fn parse(text: &str) -> Result<Document> {
    let mut sections: Vec<Section> = vec![Section {
        name: String::new(),
        line: 0,
        entries: Vec::new(),
    }];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {line_no}: unterminated section header")))?
                .trim();
            if name.is_empty() {
                return Err(Error::config(format!("line {line_no}: empty section name")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::config(format!(
                    "line {line_no}: duplicate section [{name}]"
                )));
            }
            sections.push(Section {
                name: name.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let current = sections.last_mut().expect("unnamed section always present");
        let kind = match line.split_once('=') {
            Some((key, value)) => EntryKind::Pair {
                key: key.trim().to_string(),
                value: value.trim().to_string(),
            },
            None => EntryKind::Row(line.split_whitespace().map(str::to_string).collect()),
        };
        current.entries.push(Entry {
            line: line_no,
            kind,
        });
    }
    Ok(Document { sections })
}

pub fn parse_file(path: &std::path::Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config(format!("cannot read {}: {e}", path.display()))
    })?;
    parse(&text)
}

impl Document {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require_section(&self, name: &str) -> Result<&Section> {
        self.section(name)
            .filter(|s| !s.entries.is_empty() || !name.is_empty())
            .ok_or_else(|| Error::config(format!("missing required section [{name}]")))
    }
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find_map(|e| match &e.kind {
            EntryKind::Pair { key: k, value } if k == key => Some(value.as_str()),
            _ => None,
        })
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::config(format!(
                "section [{}] (line {}): missing required key '{key}'",
                self.name, self.line
            ))
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, &str, &str)> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Pair { key, value } => Some((e.line, key.as_str(), value.as_str())),
            _ => None,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[String])> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Row(tokens) => Some((e.line, tokens.as_slice())),
            _ => None,
        })
    }

    /// Reject keys outside `allowed`, naming the offender and its line.
    pub fn check_known_keys(&self, allowed: &[&str]) -> Result<()> {
        for (line, key, _) in self.pairs() {
            if !allowed.contains(&key) {
                return Err(Error::config(format!(
                    "line {line}: unknown key '{key}' in section [{}]",
                    self.name
                )));
            }
        }
        Ok(())
    }

    fn parse_with<T, F>(&self, key: &str, what: &str, f: F) -> Result<T>
    where
        F: Fn(&str) -> Option<T>,
    {
        let raw = self.require(key)?;
        f(raw).ok_or_else(|| {
            Error::config(format!(
                "section [{}], key '{key}': expected {what}, got '{raw}'",
                self.name
            ))
        })
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.parse_with(key, "a real number", |s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.parse_with(key, "a non-negative integer", |s| s.parse::<u64>().ok())
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parse_with(key, "a non-negative integer", |s| s.parse::<usize>().ok())
    }

    /// Whitespace- or comma-separated list of tokens.
    pub fn list(&self, key: &str) -> Result<Vec<String>> {
        Ok(split_list(self.require(key)?))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.list(key)?
            .iter()
            .map(|t| {
                t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::config(format!(
                        "section [{}], key '{key}': '{t}' is not a real number",
                        self.name
                    ))
                })
            })
            .collect()
    }

    pub fn u64_list(&self, key: &str) -> Result<Vec<u64>> {
        self.list(key)?
            .iter()
            .map(|t| {
                t.parse::<u64>().map_err(|_| {
                    Error::config(format!(
                        "section [{}], key '{key}': '{t}' is not an integer",
                        self.name
                    ))
                })
            })
            .collect()
    }
}

pub fn split_list(raw: &str) -> Vec<String> {
    raw.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_pairs_and_rows() {
        let doc = parse(
            "schema = 1\n\n# comment\n[space]\nw1 0.5 50.0 0.5 um\n[run]\nseeds = 1, 2 3\nflag=true\n",
        )
        .unwrap();
        assert_eq!(doc.section("").unwrap().get("schema"), Some("1"));
        let space = doc.section("space").unwrap();
        let rows: Vec<_> = space.rows().collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].1[0], "w1");
        let run = doc.section("run").unwrap();
        assert_eq!(run.u64_list("seeds").unwrap(), vec![1, 2, 3]);
        assert_eq!(run.get("flag"), Some("true"));
    }

    #[test]
    fn unknown_key_is_named() {
        let doc = parse("[run]\nseedz = 1\n").unwrap();
        let err = doc
            .section("run")
            .unwrap()
            .check_known_keys(&["seeds"])
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("seedz") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn duplicate_section_rejected() {
        assert!(parse("[a]\n[a]\n").is_err());
    }
}
