use std::collections::HashMap;
use std::path::Path;

use super::{ActorId, IngestError};

/// Exact-match address aliases, keyed by the lowercased raw address.
#[derive(Clone, Debug, Default)]
pub struct AliasMap {
    map: HashMap<String, ActorId>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, raw: &str, canonical: ActorId) {
        self.map.insert(raw.trim().to_lowercase(), canonical);
    }

    pub fn get(&self, lowered: &str) -> Option<&ActorId> {
        self.map.get(lowered)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Loads `raw_address,canonical_address` rows.
    pub fn from_csv(path: &Path) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "raw_address" || &headers[1] != "canonical_address" {
            return Err(IngestError::schema(
                1,
                "header",
                "expected raw_address,canonical_address",
            ));
        }
        let mut aliases = AliasMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec.position().map_or(0, |p| p.line());
            let canonical = canonicalize_actor(&rec[1], &AliasMap::new())
                .map_err(|e| IngestError::schema(row, "canonical_address", e.to_string()))?;
            if rec[0].is_empty() {
                return Err(IngestError::schema(row, "raw_address", "empty"));
            }
            let raw = extract_addr_spec(&rec[0]).unwrap_or(&rec[0]);
            aliases.insert(raw, canonical);
        }
        Ok(aliases)
    }
}

/// Pulls the addr-spec out of `addr-spec` or `"Name" <addr-spec>` forms.
fn extract_addr_spec(raw: &str) -> Option<&str> {
    let raw = raw.trim();
    let spec = match (raw.rfind('<'), raw.rfind('>')) {
        (Some(open), Some(close)) if open < close => &raw[open + 1..close],
        (None, None) => raw,
        _ => return None,
    };
    let spec = spec.trim();
    let spec = spec.strip_prefix("mailto:").unwrap_or(spec);
    (!spec.is_empty()).then_some(spec)
}

/// Strips the display name, lowercases, then applies `aliases`.
pub fn canonicalize_actor(raw: &str, aliases: &AliasMap) -> Result<ActorId, IngestError> {
    let bad = || IngestError::UnparseableAddress(raw.to_string());
    let spec = extract_addr_spec(raw).ok_or_else(bad)?;
    let lowered = spec.to_lowercase();
    if let Some(alias) = aliases.get(&lowered) {
        return Ok(alias.clone());
    }
    ActorId::new(lowered).map_err(|_| bad())
}
