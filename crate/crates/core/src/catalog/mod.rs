//! Item catalogs and user interaction logs.
//!
//! A [`Catalog`] is the fixed item set every query is matched against. It is
//! immutable once built; all downstream modules resolve item ids through it.

mod io;
mod synth;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::PathBuf;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

pub use io::{
    catalog_to_jsonl, interactions_to_jsonl, load_catalog, load_interactions, parse_catalog,
    parse_interactions, resolve_catalog_path, resolve_interactions_path, write_catalog,
    write_interactions,
};
pub use synth::{synth_catalog, synth_catalog_with, SynthOptions};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("empty catalog")]
    EmptyCatalog,
    #[error("duplicate item id \"{0}\"")]
    DuplicateId(String),
    #[error("line {line}: field \"{field}\" has unknown type tag \"{tag}\"")]
    UnknownFieldType {
        line: usize,
        field: String,
        tag: String,
    },
    #[error("line {line}: invalid value for field \"{field}\": {message}")]
    InvalidField {
        line: usize,
        field: String,
        message: String,
    },
    #[error("line {line}: invalid item: {message}")]
    InvalidItem { line: usize, message: String },
    #[error("line {line}: user \"{user}\" references unknown item \"{item}\"")]
    UnknownItem {
        line: usize,
        user: String,
        item: String,
    },
    #[error("line {line}: events for user \"{user}\" are not ordered by timestamp")]
    Unordered { line: usize, user: String },
    #[error("line {line}: duplicate user \"{user}\"")]
    DuplicateUser { line: usize, user: String },
    #[error("invalid synthesis parameters: {0}")]
    BadParameters(String),
}

pub type Result<T, E = CatalogError> = std::result::Result<T, E>;

/// Days since 1970-01-01.
pub type Days = i64;

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
}

/// Parses a strict `YYYY-MM-DD` calendar date.
pub fn parse_date(s: &str) -> Option<Days> {
    let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
    // chrono accepts unpadded components; require the canonical spelling.
    if d.format("%Y-%m-%d").to_string() != s {
        return None;
    }
    Some((d - epoch()).num_days())
}

pub fn format_date(days: Days) -> String {
    date_of(days).format("%Y-%m-%d").to_string()
}

fn date_of(days: Days) -> NaiveDate {
    epoch() + chrono::Duration::days(days)
}

/// Human rendering used in queries, e.g. "march 19, 2021".
pub fn render_date(days: Days) -> String {
    date_of(days).format("%B %-d, %Y").to_string().to_lowercase()
}

pub fn year_of(days: Days) -> i32 {
    date_of(days).year()
}

/// Days value of January 1st of `year`.
pub fn jan_first(year: i32) -> Days {
    (NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year") - epoch()).num_days()
}

/// Renders a number without a trailing ".0" when it is integral.
pub fn render_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.2}")
    }
}

/// A typed attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Text(String),
    Number { value: f64, unit: String },
    Date(Days),
    /// Lowercase, deduplicated, non-empty, in first-seen order.
    Categories(Vec<String>),
}

impl FieldValue {
    pub fn categories<I, S>(values: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for v in values {
            let v = v.as_ref().trim().to_lowercase();
            if !v.is_empty() && !out.contains(&v) {
                out.push(v);
            }
        }
        (!out.is_empty()).then_some(FieldValue::Categories(out))
    }

    pub fn number(value: f64, unit: &str) -> Option<Self> {
        value.is_finite().then(|| FieldValue::Number {
            value,
            unit: unit.to_string(),
        })
    }

    pub fn type_tag(&self) -> &'static str {
        match self {
            FieldValue::Text(_) => "text",
            FieldValue::Number { .. } => "number",
            FieldValue::Date(_) => "date",
            FieldValue::Categories(_) => "categories",
        }
    }

    /// Rendering used in item text and attribute queries.
    pub fn render(&self) -> String {
        match self {
            FieldValue::Text(s) => s.clone(),
            FieldValue::Number { value, .. } => render_number(*value),
            FieldValue::Date(d) => render_date(*d),
            FieldValue::Categories(c) => c.join(", "),
        }
    }
}

/// Wire form of a field: `{"type": ..., "value": ..., "unit": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RawField {
    #[serde(rename = "type")]
    kind: String,
    value: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
}

impl From<&FieldValue> for RawField {
    fn from(v: &FieldValue) -> Self {
        let (value, unit) = match v {
            FieldValue::Text(s) => (serde_json::Value::from(s.clone()), None),
            FieldValue::Number { value, unit } => (
                serde_json::Value::from(*value),
                (!unit.is_empty()).then(|| unit.clone()),
            ),
            FieldValue::Date(d) => (serde_json::Value::from(format_date(*d)), None),
            FieldValue::Categories(c) => (serde_json::Value::from(c.clone()), None),
        };
        RawField {
            kind: v.type_tag().into(),
            value,
            unit,
        }
    }
}

pub(crate) enum FieldDecodeError {
    UnknownTag(String),
    Invalid(String),
}

impl TryFrom<RawField> for FieldValue {
    type Error = FieldDecodeError;

    fn try_from(raw: RawField) -> std::result::Result<Self, Self::Error> {
        use FieldDecodeError::*;
        match raw.kind.as_str() {
            "text" => raw
                .value
                .as_str()
                .map(|s| FieldValue::Text(s.to_string()))
                .ok_or_else(|| Invalid("text value must be a string".into())),
            "number" => {
                let v = raw
                    .value
                    .as_f64()
                    .ok_or_else(|| Invalid("number value must be numeric".into()))?;
                FieldValue::number(v, raw.unit.as_deref().unwrap_or(""))
                    .ok_or_else(|| Invalid("number must be finite".into()))
            }
            "date" => {
                let s = raw
                    .value
                    .as_str()
                    .ok_or_else(|| Invalid("date value must be a string".into()))?;
                parse_date(s)
                    .map(FieldValue::Date)
                    .ok_or_else(|| Invalid(format!("\"{s}\" is not a YYYY-MM-DD date")))
            }
            "categories" => {
                let arr = raw
                    .value
                    .as_array()
                    .ok_or_else(|| Invalid("categories value must be a list".into()))?;
                let strs: Option<Vec<&str>> = arr.iter().map(|v| v.as_str()).collect();
                let strs = strs.ok_or_else(|| Invalid("categories must be strings".into()))?;
                FieldValue::categories(strs).ok_or_else(|| Invalid("categories is empty".into()))
            }
            other => Err(UnknownTag(other.to_string())),
        }
    }
}

/// One catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub id: String,
    pub title: String,
    pub description: String,
    /// Lowercase field name -> value, ordered by name.
    pub fields: BTreeMap<String, FieldValue>,
}

impl Item {
    pub fn field(&self, name: &str) -> Option<&FieldValue> {
        self.fields.get(name)
    }

    pub fn categories(&self, name: &str) -> &[String] {
        match self.fields.get(name) {
            Some(FieldValue::Categories(c)) => c,
            _ => &[],
        }
    }

    /// Text the encoder sees for this item: title, every field, then the description.
    pub fn text(&self) -> String {
        let mut out = String::with_capacity(128);
        out.push_str(&self.title);
        for (name, value) in &self.fields {
            out.push_str(". ");
            out.push_str(name);
            out.push_str(" : ");
            out.push_str(&value.render());
        }
        if !self.description.is_empty() {
            out.push_str(". ");
            out.push_str(&self.description);
        }
        out
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.title, self.id)
    }
}

/// The item set, in input order, with an id lookup table.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub name: String,
    items: Vec<Item>,
    index: HashMap<String, usize>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.items == other.items
    }
}

impl Catalog {
    pub fn new(name: impl Into<String>, items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(CatalogError::EmptyCatalog);
        }
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if item.id.is_empty() {
                return Err(CatalogError::InvalidItem {
                    line: i + 1,
                    message: "empty id".into(),
                });
            }
            if item.title.trim().is_empty() {
                return Err(CatalogError::InvalidItem {
                    line: i + 1,
                    message: format!("item \"{}\" has an empty title", item.id),
                });
            }
            if index.insert(item.id.clone(), i).is_some() {
                return Err(CatalogError::DuplicateId(item.id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            items,
            index,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Item> {
        self.index.get(id).map(|&i| &self.items[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Latest value of a date field across the catalog.
    pub fn max_date(&self, field: &str) -> Option<Days> {
        self.items
            .iter()
            .filter_map(|it| match it.field(field) {
                Some(FieldValue::Date(d)) => Some(*d),
                _ => None,
            })
            .max()
    }

    /// Earliest and latest value of a date field.
    pub fn date_range(&self, field: &str) -> Option<(Days, Days)> {
        let days = self.items.iter().filter_map(|it| match it.field(field) {
            Some(FieldValue::Date(d)) => Some(*d),
            _ => None,
        });
        days.fold(None, |acc, d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        })
    }

    /// Smallest and largest value of a number field.
    pub fn number_range(&self, field: &str) -> Option<(f64, f64)> {
        let values = self.items.iter().filter_map(|it| match it.field(field) {
            Some(FieldValue::Number { value, .. }) => Some(*value),
            _ => None,
        });
        values.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Sorted, distinct values of a categories field.
    pub fn category_vocabulary(&self, field: &str) -> Vec<String> {
        let mut v: Vec<String> = self
            .items
            .iter()
            .flat_map(|it| it.categories(field).iter().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(String, i64)", into = "(String, i64)")]
pub struct Event {
    pub item_id: String,
    pub ts: i64,
}

impl From<(String, i64)> for Event {
    fn from((item_id, ts): (String, i64)) -> Self {
        Event { item_id, ts }
    }
}

impl From<Event> for (String, i64) {
    fn from(e: Event) -> Self {
        (e.item_id, e.ts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserHistory {
    pub user_id: String,
    pub events: Vec<Event>,
}

impl UserHistory {
    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(|e| e.item_id.as_str())
    }
}

/// Chronological per-user interaction histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionLog {
    pub users: Vec<UserHistory>,
}

impl InteractionLog {
    /// Users with fewer than two events; retained but unusable for sequence tasks.
    pub fn sparse_users(&self) -> Vec<&str> {
        self.users
            .iter()
            .filter(|u| u.events.len() < 2)
            .map(|u| u.user_id.as_str())
            .collect()
    }

    pub fn event_count(&self) -> usize {
        self.users.iter().map(|u| u.events.len()).sum()
    }
}
