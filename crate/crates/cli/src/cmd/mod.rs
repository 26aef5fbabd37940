pub mod curate;
pub mod evaluate;
pub mod plan;
pub mod ppn;
pub mod rnnt;
pub mod stitch;
pub mod sweep;

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use asrlab::curation::{parse_manifest, ManifestLine, ManifestRecord};

use crate::report::{invalid, read_input};

/// Reads a manifest for scoring; any unreadable line is an input error.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let text = read_input(path)?;
    let mut out = Vec::new();
    for line in parse_manifest(&text) {
        match line {
            ManifestLine::Record(r) => {
                r.validate().map_err(invalid)?;
                out.push(r);
            }
            ManifestLine::Invalid { id, error } => {
                return Err(invalid(format!("manifest {}: record {id}: {error}", path.display())))
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = out.iter().find(|r| !seen.insert(r.id.clone())) {
        return Err(invalid(format!("manifest {}: duplicate id {}", path.display(), dup.id)));
    }
    Ok(out)
}

/// `id<TAB>text` lines. Text may be empty; ids must be unique.
pub fn load_tsv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = read_input(path)?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, body) = line.split_once('\t').unwrap_or((line, ""));
        if map.insert(id.to_string(), body.to_string()).is_some() {
            return Err(invalid(format!("{} line {}: duplicate id {id}", path.display(), i + 1)));
        }
    }
    Ok(map)
}
