use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    Catalog, CatalogError, Event, FieldDecodeError, FieldValue, InteractionLog, Item, RawField,
    Result, UserHistory,
};
use crate::meta::ArtifactMeta;

#[derive(Serialize, Deserialize)]
struct RawItem {
    id: String,
    title: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    fields: BTreeMap<String, RawField>,
}

#[derive(Serialize, Deserialize)]
struct RawUser {
    user_id: String,
    events: Vec<Event>,
}

/// Accepts either the catalog file itself or a directory holding `catalog.jsonl`.
pub fn resolve_catalog_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("catalog.jsonl")
    } else {
        path.to_path_buf()
    }
}

pub fn resolve_interactions_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("interactions.jsonl")
    } else {
        path.to_path_buf()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a catalog file (or a directory containing `catalog.jsonl`).
///
/// The catalog name comes from the header's `domain` entry when present,
/// otherwise from the file stem.
pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let path = resolve_catalog_path(path);
    let text = read(&path)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "catalog".into());
    parse_catalog(&text, &fallback)
}

pub fn parse_catalog(text: &str, default_name: &str) -> Result<Catalog> {
    let mut name = default_name.to_string();
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(meta) = ArtifactMeta::from_line(line) {
            if let Some(d) = meta.domain {
                name = d;
            }
            continue;
        }
        let raw: RawItem = serde_json::from_str(line).map_err(|e| CatalogError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        let item = decode_item(raw, lineno)?;
        if !seen.insert(item.id.clone()) {
            return Err(CatalogError::DuplicateId(item.id));
        }
        items.push(item);
    }
    if items.is_empty() {
        return Err(CatalogError::EmptyCatalog);
    }
    Catalog::new(name, items)
}

fn decode_item(raw: RawItem, line: usize) -> Result<Item> {
    if raw.id.is_empty() {
        return Err(CatalogError::InvalidItem {
            line,
            message: "empty id".into(),
        });
    }
    if raw.title.trim().is_empty() {
        return Err(CatalogError::InvalidItem {
            line,
            message: format!("item \"{}\" has an empty title", raw.id),
        });
    }
    let mut fields = BTreeMap::new();
    for (name, rf) in raw.fields {
        let key = name.trim().to_lowercase();
        let value = FieldValue::try_from(rf).map_err(|e| match e {
            FieldDecodeError::UnknownTag(tag) => CatalogError::UnknownFieldType {
                line,
                field: key.clone(),
                tag,
            },
            FieldDecodeError::Invalid(message) => CatalogError::InvalidField {
                line,
                field: key.clone(),
                message,
            },
        })?;
        if key.is_empty() || fields.insert(key.clone(), value).is_some() {
            return Err(CatalogError::InvalidItem {
                line,
                message: format!("duplicate or empty field name \"{name}\""),
            });
        }
    }
    Ok(Item {
        id: raw.id,
        title: raw.title,
        description: raw.description,
        fields,
    })
}

fn item_line(item: &Item) -> String {
    let raw = RawItem {
        id: item.id.clone(),
        title: item.title.clone(),
        description: item.description.clone(),
        fields: item
            .fields
            .iter()
            .map(|(k, v)| (k.clone(), RawField::from(v)))
            .collect(),
    };
    serde_json::to_string(&raw).expect("item serializes")
}

/// Serializes a catalog, optionally preceded by a metadata header line.
pub fn catalog_to_jsonl(catalog: &Catalog, meta: Option<&ArtifactMeta>) -> String {
    let mut out = String::new();
    if let Some(m) = meta {
        out.push_str(&m.to_line());
        out.push('\n');
    }
    for item in catalog.items() {
        out.push_str(&item_line(item));
        out.push('\n');
    }
    out
}

pub fn write_catalog(path: &Path, catalog: &Catalog, meta: Option<&ArtifactMeta>) -> std::io::Result<()> {
    std::fs::write(path, catalog_to_jsonl(catalog, meta))
}

pub fn load_interactions(path: &Path, catalog: &Catalog) -> Result<InteractionLog> {
    let path = resolve_interactions_path(path);
    parse_interactions(&read(&path)?, catalog)
}

pub fn parse_interactions(text: &str, catalog: &Catalog) -> Result<InteractionLog> {
    let mut users = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() || ArtifactMeta::from_line(line).is_some() {
            continue;
        }
        let raw: RawUser = serde_json::from_str(line).map_err(|e| CatalogError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        if !seen.insert(raw.user_id.clone()) {
            return Err(CatalogError::DuplicateUser {
                line: lineno,
                user: raw.user_id,
            });
        }
        for e in &raw.events {
            if !catalog.contains(&e.item_id) {
                return Err(CatalogError::UnknownItem {
                    line: lineno,
                    user: raw.user_id.clone(),
                    item: e.item_id.clone(),
                });
            }
        }
        if raw.events.windows(2).any(|w| w[1].ts < w[0].ts) {
            return Err(CatalogError::Unordered {
                line: lineno,
                user: raw.user_id,
            });
        }
        users.push(UserHistory {
            user_id: raw.user_id,
            events: raw.events,
        });
    }
    Ok(InteractionLog { users })
}

pub fn interactions_to_jsonl(log: &InteractionLog, meta: Option<&ArtifactMeta>) -> String {
    let mut out = String::new();
    if let Some(m) = meta {
        out.push_str(&m.to_line());
        out.push('\n');
    }
    for u in &log.users {
        let raw = RawUser {
            user_id: u.user_id.clone(),
            events: u.events.clone(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("user serializes"));
        out.push('\n');
    }
    out
}

pub fn write_interactions(
    path: &Path,
    log: &InteractionLog,
    meta: Option<&ArtifactMeta>,
) -> std::io::Result<()> {
    std::fs::write(path, interactions_to_jsonl(log, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPLITGATE: &str = r#"{"id":"g1","title":"Splitgate","description":"...","fields":{"genre":{"type":"categories","value":["shooter"]},"tags":{"type":"categories","value":["3d","not made for kids"]}}}"#;

    fn two_items() -> Catalog {
        let text = format!(
            "{SPLITGATE}\n{}\n",
            r#"{"id":"g2","title":"Halo","fields":{"price":{"type":"number","value":10,"unit":"USD"},"release date":{"type":"date","value":"2021-03-19"}}}"#
        );
        parse_catalog(&text, "test").unwrap()
    }

    #[test]
    fn loads_single_item_line() {
        let c = parse_catalog(SPLITGATE, "x").unwrap();
        assert_eq!(c.len(), 1);
        let it = c.get("g1").unwrap();
        assert_eq!(it.categories("tags"), ["3d", "not made for kids"]);
    }

    #[test]
    fn empty_file_is_rejected() {
        let err = parse_catalog("", "x").unwrap_err();
        assert_eq!(err.to_string(), "empty catalog");
    }

    #[test]
    fn duplicate_id_names_the_id() {
        let err = parse_catalog(&format!("{SPLITGATE}\n{SPLITGATE}\n"), "x").unwrap_err();
        assert!(matches!(err, CatalogError::DuplicateId(ref id) if id == "g1"));
        assert!(err.to_string().contains("g1"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_catalog(&format!("{SPLITGATE}\n{{not json\n"), "x").unwrap_err();
        assert!(matches!(err, CatalogError::Malformed { line: 2, .. }));
    }

    #[test]
    fn unknown_type_tag() {
        let line = r#"{"id":"g1","title":"T","fields":{"x":{"type":"color","value":"red"}}}"#;
        let err = parse_catalog(line, "x").unwrap_err();
        assert!(matches!(err, CatalogError::UnknownFieldType { ref tag, .. } if tag == "color"));
    }

    #[test]
    fn field_names_are_lowercased() {
        let line = r#"{"id":"g1","title":"T","fields":{"Genre":{"type":"categories","value":["Shooter"]}}}"#;
        let c = parse_catalog(line, "x").unwrap();
        assert_eq!(c.get("g1").unwrap().categories("genre"), ["shooter"]);
    }

    #[test]
    fn catalog_roundtrip_with_header() {
        let c = two_items();
        let meta = ArtifactMeta::new("catalog").with_domain("test");
        let text = catalog_to_jsonl(&c, Some(&meta));
        assert_eq!(parse_catalog(&text, "other").unwrap(), c);
    }

    #[test]
    fn interactions_validation() {
        let c = two_items();
        let log = parse_interactions(r#"{"user_id":"u1","events":[["g1",10],["g2",20]]}"#, &c).unwrap();
        assert_eq!(log.users.len(), 1);
        assert_eq!(log.event_count(), 2);
        assert!(log.sparse_users().is_empty());

        let err = parse_interactions(r#"{"user_id":"u1","events":[["g9",5]]}"#, &c).unwrap_err();
        assert!(matches!(err, CatalogError::UnknownItem { ref item, .. } if item == "g9"));

        let err =
            parse_interactions(r#"{"user_id":"u1","events":[["g1",20],["g2",10]]}"#, &c).unwrap_err();
        assert!(matches!(err, CatalogError::Unordered { ref user, .. } if user == "u1"));

        let log = parse_interactions(r#"{"user_id":"u2","events":[["g1",1]]}"#, &c).unwrap();
        assert_eq!(log.sparse_users(), ["u2"]);
    }
}
