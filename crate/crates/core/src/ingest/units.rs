use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{canonicalize_actor, ActorId, AliasMap, IngestError};

/// Unit that collects every actor missing from the mapping.
pub const EXTERNAL_UNIT: &str = "_external";

/// Actor to organizational-unit assignment.
#[derive(Clone, Debug, Default)]
pub struct UnitMapping {
    assignments: HashMap<ActorId, String>,
}

impl UnitMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `actor` to `unit`. Reassigning to a different unit is an error.
    pub fn assign(&mut self, actor: ActorId, unit: impl Into<String>) -> Result<(), String> {
        let unit = unit.into();
        match self.assignments.get(&actor) {
            Some(existing) if *existing != unit => Err(format!(
                "{actor} already assigned to {existing:?}, cannot reassign to {unit:?}"
            )),
            _ => {
                self.assignments.insert(actor, unit);
                Ok(())
            }
        }
    }

    pub fn unit_of(&self, actor: &ActorId) -> &str {
        self.assignments.get(actor).map_or(EXTERNAL_UNIT, String::as_str)
    }

    pub fn contains(&self, unit: &str, actor: &ActorId) -> bool {
        self.unit_of(actor) == unit
    }

    /// Unit names present in the mapping, sorted.
    pub fn units(&self) -> BTreeSet<&str> {
        self.assignments.values().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Loads `address,unit` rows; addresses go through `aliases` like mail headers do.
    pub fn from_csv(path: &Path, aliases: &AliasMap) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(file, aliases)
    }

    pub fn from_reader<R: std::io::Read>(reader: R, aliases: &AliasMap) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "address" || &headers[1] != "unit" {
            return Err(IngestError::schema(1, "header", "expected address,unit"));
        }
        let mut mapping = UnitMapping::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec.position().map_or(0, |p| p.line());
            if rec.len() != 2 {
                return Err(IngestError::schema(row, "*", "expected 2 fields"));
            }
            let actor =
                canonicalize_actor(&rec[0], aliases).map_err(|e| IngestError::schema(row, "address", e.to_string()))?;
            if rec[1].is_empty() {
                return Err(IngestError::schema(row, "unit", "empty unit name"));
            }
            mapping
                .assign(actor, &rec[1])
                .map_err(|msg| IngestError::schema(row, "unit", msg))?;
        }
        Ok(mapping)
    }
}
