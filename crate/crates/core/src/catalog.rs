//! The shipped identity corpus: `.fib` files of `identity` blocks, each
//! preceded by `# key: value` comment lines.
//!
//! Recognised keys: `group` (sticky for the rest of the file), `source`
//! (required), `status` (`normal` or `suspect`), `twin` (the entry an
//! alias restates) and `corrects` (the suspect entry a `-corrected` twin
//! replaces).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::dsl::{parse_file, DslError, IdentitySpec};

pub const CATALOG_ENV: &str = "FIBSUM_CATALOG";

/// Every group the shipped corpus is expected to populate, in report order.
pub const GROUPS: &[&str] = &[
    "G-L2", "G-L3", "G-L4", "G-L5", "G-L6", "G-P1", "G-P2", "G-P3", "G-Q", "G-C", "G-X", "G-INTRO",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Normal,
    Suspect,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Normal => "normal",
            Status::Suspect => "suspect",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub spec: IdentitySpec,
    pub group: String,
    pub source: String,
    pub status: Status,
    pub twin: Option<String>,
    pub corrects: Option<String>,
    pub file: PathBuf,
    pub line: usize,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.spec.id
    }

    /// `<group>/<id>`, e.g. `G-Q/odd-n-corollary`.
    pub fn qualified_id(&self) -> String {
        format!("{}/{}", self.group, self.spec.id)
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{source}", .path.display())]
    Parse { path: PathBuf, source: DslError },
    #[error("{}:{line}: {message}", .path.display())]
    Pragma {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate id `{id}` in {} and {}", .first.display(), .second.display())]
    Duplicate {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("`{id}` refers to unknown entry `{target}`")]
    DanglingReference { id: String, target: String },
    #[error("unknown id `{id}`{}", suggest(.suggestions))]
    UnknownId { id: String, suggestions: Vec<String> },
}

fn suggest(names: &[String]) -> String {
    if names.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", names.join(", "))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub warnings: Vec<String>,
}

impl Catalog {
    /// Looks up a bare id (`T2F`) or a qualified one (`G-P1/T2F`).
    pub fn entry(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        let found = match name.split_once('/') {
            Some((group, id)) => self.entries.iter().find(|e| e.group == group && e.spec.id == id),
            None => self.entries.iter().find(|e| e.spec.id == name),
        };
        found.ok_or_else(|| CatalogError::UnknownId {
            id: name.to_string(),
            suggestions: self.near_misses(name),
        })
    }

    fn near_misses(&self, name: &str) -> Vec<String> {
        let bare = name.rsplit('/').next().unwrap_or(name).to_lowercase();
        let mut scored: Vec<(usize, String)> = self
            .entries
            .iter()
            .filter_map(|e| {
                let id = e.spec.id.to_lowercase();
                let d = strsim::levenshtein(&bare, &id);
                let close = d <= 2.max(bare.len() / 4) || (bare.len() >= 3 && id.contains(&bare));
                close.then(|| (d, e.qualified_id()))
            })
            .collect();
        scored.sort();
        scored.into_iter().take(5).map(|(_, id)| id).collect()
    }

    pub fn group(&self, group: &str) -> impl Iterator<Item = &CatalogEntry> {
        let group = group.to_string();
        self.entries.iter().filter(move |e| e.group == group)
    }

    pub fn groups(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.entries.iter().map(|e| e.group.as_str()).collect();
        out.dedup();
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn group_rank(group: &str) -> usize {
    GROUPS.iter().position(|g| *g == group).unwrap_or(GROUPS.len())
}

/// The shipped corpus directory: `$FIBSUM_CATALOG` if set, else the
/// `catalog/` directory of the source tree this binary was built from.
pub fn default_catalog_dir() -> PathBuf {
    match std::env::var_os(CATALOG_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../catalog")),
    }
}

/// Parses one `.fib` text. `path` is only used in diagnostics.
pub fn parse_catalog_text(text: &str, path: &Path) -> Result<Vec<CatalogEntry>, CatalogError> {
    let blocks = parse_file(text).map_err(|source| CatalogError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let mut group: Option<String> = None;
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        let pragma_err = |message: String| CatalogError::Pragma {
            path: path.to_path_buf(),
            line: block.line,
            message,
        };
        let (mut source, mut status, mut twin, mut corrects) = (None, Status::Normal, None, None);
        for (key, value) in &block.pragmas {
            match key.as_str() {
                "group" => group = Some(value.clone()),
                "source" => source = Some(value.clone()),
                "status" => {
                    status = match value.as_str() {
                        "normal" => Status::Normal,
                        "suspect" => Status::Suspect,
                        other => return Err(pragma_err(format!("unknown status `{other}`"))),
                    }
                }
                "twin" => twin = Some(value.clone()),
                "corrects" => corrects = Some(value.clone()),
                _ => {}
            }
        }
        let id = &block.spec.id;
        let group = group
            .clone()
            .ok_or_else(|| pragma_err(format!("`{id}` has no `# group:` line")))?;
        let source = source.ok_or_else(|| pragma_err(format!("`{id}` has no `# source:` line")))?;
        out.push(CatalogEntry {
            spec: block.spec,
            group,
            source,
            status,
            twin,
            corrects,
            file: path.to_path_buf(),
            line: block.line,
        });
    }
    Ok(out)
}

/// Loads every `.fib` file directly under `root`. Entries come back sorted
/// by group (in [`GROUPS`] order, unknown groups last) and then by id.
pub fn load_catalog(root: &Path) -> Result<Catalog, CatalogError> {
    let io = |source| CatalogError::Io {
        path: root.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(root)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|d| d.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "fib"))
        .collect();
    files.sort();

    let mut catalog = Catalog::default();
    if files.is_empty() {
        catalog.warnings.push(format!("no .fib files under {}", root.display()));
        return Ok(catalog);
    }

    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in files {
        let text = fs::read_to_string(&path).map_err(|source| CatalogError::Io {
            path: path.clone(),
            source,
        })?;
        for entry in parse_catalog_text(&text, &path)? {
            if let Some(first) = seen.get(entry.id()) {
                return Err(CatalogError::Duplicate {
                    id: entry.id().to_string(),
                    first: first.clone(),
                    second: path.clone(),
                });
            }
            seen.insert(entry.id().to_string(), path.clone());
            catalog.entries.push(entry);
        }
    }

    for e in &catalog.entries {
        for target in e.twin.iter().chain(e.corrects.iter()) {
            if !seen.contains_key(target.as_str()) {
                return Err(CatalogError::DanglingReference {
                    id: e.id().to_string(),
                    target: target.clone(),
                });
            }
        }
    }
    catalog.entries.sort_by(|a, b| {
        (group_rank(&a.group), &a.group, &a.spec.id).cmp(&(group_rank(&b.group), &b.group, &b.spec.id))
    });
    if catalog.entries.is_empty() {
        catalog.warnings.push(format!("no identities in {}", root.display()));
    }
    Ok(catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "\
# group: G-P1
# source: sec. 3, binomial 2k+s sum
identity T2F { params n in 0..., s in int;
  lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s));
  rhs = F(2*n+s) - (-1)^(s)*F(n-s) }

# source: sec. 3, example
# status: suspect
identity T2F-bad { params n in 0...; lhs = F(n); rhs = F(n) }
";

    #[test]
    fn pragmas_attach_to_blocks() {
        let entries = parse_catalog_text(TEXT, Path::new("x.fib")).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].group, "G-P1");
        assert_eq!(entries[1].group, "G-P1");
        assert_eq!(entries[0].status, Status::Normal);
        assert_eq!(entries[1].status, Status::Suspect);
        assert_eq!(entries[0].source, "sec. 3, binomial 2k+s sum");
        assert_eq!(entries[1].line, 9);
        assert_eq!(entries[0].qualified_id(), "G-P1/T2F");
    }

    #[test]
    fn missing_source_is_rejected() {
        let err = parse_catalog_text("# group: G\nidentity a { lhs = 1; rhs = 1 }", Path::new("y.fib"));
        assert!(matches!(err, Err(CatalogError::Pragma { line: 2, .. })));
    }

    #[test]
    fn lookup_and_suggestions() {
        let catalog = Catalog {
            entries: parse_catalog_text(TEXT, Path::new("x.fib")).unwrap(),
            warnings: vec![],
        };
        assert_eq!(catalog.entry("T2F").unwrap().id(), "T2F");
        assert_eq!(catalog.entry("G-P1/T2F-bad").unwrap().id(), "T2F-bad");
        assert!(catalog.entry("G-Q/T2F").is_err());
        match catalog.entry("T2G") {
            Err(CatalogError::UnknownId { suggestions, .. }) => assert!(suggestions.contains(&"G-P1/T2F".to_string())),
            other => panic!("{other:?}"),
        }
        match catalog.entry("nope") {
            Err(e @ CatalogError::UnknownId { .. }) => assert!(e.to_string().starts_with("unknown id `nope`")),
            other => panic!("{other:?}"),
        }
    }
}
