//! Natural-language surface forms for conditions.
//!
//! The rendered phrase is presentation only; samples store the AST. Vague
//! phrases map to fixed semantics when the generator builds the AST:
//! "after YEAR" is `date >= Jan 1 of YEAR+1`, "before YEAR" is
//! `date < Jan 1 of YEAR`, "under X dollars" is `price < X`, "recent" is
//! `date >= Jan 1` of the third-latest calendar year in the catalog,
//! "older" is `date < Jan 1` fourteen years before the latest one, "cheap"
//! is `price < 20` and "expensive" is `price >= 50`.

use std::collections::BTreeMap;

use rand::Rng as _;

use super::{CmpOp, Condition, ConditionError};
use crate::catalog::{jan_first, render_date, render_number, year_of, Catalog, Days, FieldValue};
use crate::seed::{self, Rng};
use crate::text::join_list;

/// Template lists keyed by node kind, optionally specialised per field
/// (`"has_category.genre"` wins over `"has_category"`).
#[derive(Debug, Clone, Default)]
pub struct SurfacePool {
    templates: BTreeMap<String, Vec<String>>,
    vague: Vec<VagueTerm>,
}

/// A comparison that renders as a word ("cheap", "recent") instead of a
/// number. Date thresholds are stored as days.
#[derive(Debug, Clone, PartialEq)]
pub struct VagueTerm {
    pub name: String,
    pub field: String,
    pub op: CmpOp,
    pub threshold: f64,
}

impl VagueTerm {
    pub fn new(name: &str, field: &str, op: CmpOp, threshold: f64) -> Self {
        Self {
            name: name.into(),
            field: field.into(),
            op,
            threshold,
        }
    }

    /// The condition this term stands for, typed after `value`'s field kind.
    pub fn condition(&self, date: bool) -> Condition {
        if date {
            Condition::date_cmp(&self.field, self.op, self.threshold as Days)
        } else {
            Condition::num_cmp(&self.field, self.op, self.threshold)
        }
    }
}

pub const CHEAP_BELOW: f64 = 20.0;
pub const EXPENSIVE_FROM: f64 = 50.0;

const DEFAULTS: &[(&str, &[&str])] = &[
    ("all", &["{items}"]),
    ("has_category.genre", &["{value} games", "a {value} game", "in the {value} genre", "{value} titles"]),
    ("has_category.tags", &["with {value}", "tagged {value}", "featuring {value}", "that offer {value}"]),
    ("has_category", &["{field} {value}", "with {field} {value}"]),
    ("not_has_category.tags", &["not {value}", "that are not {value}", "that aren't {value}", "that do not have {value}"]),
    ("not_has_category.genre", &["not {value} games", "outside the {value} genre"]),
    ("not_has_category", &["excluding {field} {value}", "not {value}"]),
    ("not", &["not {child}"]),
    ("text_equals.publisher", &["published by {value}", "from {value}"]),
    ("text_equals", &["{field} {value}"]),
    ("num_lt.price", &["price under {value} dollars", "costing less than {value} dollars", "cheaper than {value} dollars", "under {value} bucks"]),
    ("num_le.price", &["price at most {value} dollars", "no more than {value} dollars", "{value} dollars or less", "up to {value} bucks"]),
    ("num_gt.price", &["price over {value} dollars", "costing more than {value} dollars", "pricier than {value} dollars"]),
    ("num_ge.price", &["price at least {value} dollars", "{value} dollars or more", "costing {value} dollars or more", "from {value} bucks up"]),
    ("num_eq.price", &["priced at {value} dollars", "price {value}"]),
    ("num_lt", &["{field} under {value}"]),
    ("num_le", &["{field} at most {value}"]),
    ("num_gt", &["{field} over {value}"]),
    ("num_ge", &["{field} at least {value}"]),
    ("num_eq", &["{field} {value}"]),
    ("date_ge_year", &["released in {year} or later", "came out in {year} or later", "{year} or newer", "from {year} or later"]),
    ("date_le_year", &["released in {year} or earlier", "came out in {year} or earlier", "{year} or older", "from {year} or earlier"]),
    ("date_lt_year", &["released before {year}", "came out before {year}", "older than {year}", "from before {year}"]),
    ("vague_recent", &["recent", "a new release", "new", "recently released"]),
    ("vague_older", &["older", "classic", "old school", "an older title"]),
    ("vague_cheap", &["cheap", "budget", "budget priced", "affordable"]),
    ("vague_expensive", &["expensive", "premium", "premium priced", "pricey"]),
    ("date_ge", &["released on or after {date}"]),
    ("date_gt", &["released after {date}"]),
    ("date_le", &["released on or before {date}"]),
    ("date_lt", &["released before {date}"]),
    ("date_eq", &["released on {date}"]),
    ("fuzzy_title", &["something like {target}", "a game called {target}"]),
];

impl SurfacePool {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with(mut self, kind: &str, templates: &[&str]) -> Self {
        self.templates
            .insert(kind.to_string(), templates.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn with_vague(mut self, term: VagueTerm) -> Self {
        self.vague.retain(|t| t.name != term.name);
        self.vague.push(term);
        self
    }

    pub fn vague_terms(&self) -> &[VagueTerm] {
        &self.vague
    }

    /// Registers the "recent" date term for `field`.
    pub fn with_recent_cutoff(self, field: &str, cutoff: Days) -> Self {
        self.with_vague(VagueTerm::new("recent", field, CmpOp::Ge, cutoff as f64))
    }

    fn vague_name(&self, field: &str, op: CmpOp, threshold: f64) -> Option<&str> {
        self.vague
            .iter()
            .find(|t| t.field == field && t.op == op && t.threshold == threshold)
            .map(|t| t.name.as_str())
    }

    fn pick(&self, keys: &[String], rng: &mut Rng) -> Result<&str, ConditionError> {
        let list = keys
            .iter()
            .find_map(|k| self.templates.get(k).filter(|l| !l.is_empty()))
            .ok_or_else(|| {
                let base = keys.last().cloned().unwrap_or_default();
                ConditionError::MissingTemplate(base)
            })?;
        Ok(&list[rng.random_range(0..list.len())])
    }
}

/// Built-in pool covering every node kind.
pub fn default_pool() -> SurfacePool {
    DEFAULTS
        .iter()
        .fold(SurfacePool::empty(), |p, (k, t)| p.with(k, t))
}

/// "recent" threshold for a catalog whose newest item was released on `max_release`.
pub fn recent_threshold(max_release: Days) -> Days {
    jan_first(year_of(max_release) - 2)
}

/// "older" threshold for a catalog whose newest item was released on `max_release`.
pub fn older_threshold(max_release: Days) -> Days {
    jan_first(year_of(max_release) - 14)
}

/// The standard vague vocabulary for a catalog with a price number field
/// and a release date field.
pub fn with_catalog_terms(pool: SurfacePool, price_field: Option<&str>, date_field: Option<(&str, Days)>) -> SurfacePool {
    let mut pool = pool;
    if let Some(f) = price_field {
        pool = pool
            .with_vague(VagueTerm::new("cheap", f, CmpOp::Lt, CHEAP_BELOW))
            .with_vague(VagueTerm::new("expensive", f, CmpOp::Ge, EXPENSIVE_FROM));
    }
    if let Some((f, max)) = date_field {
        pool = pool
            .with_recent_cutoff(f, recent_threshold(max))
            .with_vague(VagueTerm::new("older", f, CmpOp::Lt, older_threshold(max) as f64));
    }
    pool
}

/// Default pool with the vague terms a catalog supports: price words when
/// items carry a numeric `price`, date words when they carry a `release date`.
pub fn catalog_pool(catalog: &Catalog) -> SurfacePool {
    let price = catalog
        .items()
        .iter()
        .any(|it| matches!(it.field("price"), Some(FieldValue::Number { .. })))
        .then_some("price");
    let release = catalog.max_date("release date").map(|max| ("release date", max));
    with_catalog_terms(default_pool(), price, release)
}

fn keys(kind: &str, field: Option<&str>) -> Vec<String> {
    match field {
        Some(f) => vec![format!("{kind}.{f}"), kind.to_string()],
        None => vec![kind.to_string()],
    }
}

fn fill(template: &str, vars: &[(&str, String)]) -> String {
    vars.iter().fold(template.to_string(), |acc, (k, v)| {
        acc.replace(&format!("{{{k}}}"), v)
    })
}

/// Renders `cond` to a phrase, choosing among templates with a seeded RNG.
pub fn render(cond: &Condition, pool: &SurfacePool, seed: u64) -> Result<String, ConditionError> {
    let mut rng = seed::rng(seed);
    render_node(cond, pool, &mut rng)
}

fn is_jan_first(d: Days) -> bool {
    jan_first(year_of(d)) == d
}

fn render_node(cond: &Condition, pool: &SurfacePool, rng: &mut Rng) -> Result<String, ConditionError> {
    Ok(match cond {
        Condition::HasCategory { field, value } => {
            let t = pool.pick(&keys("has_category", Some(field)), rng)?;
            fill(t, &[("field", field.clone()), ("value", value.clone())])
        }
        Condition::Not { child } => match child.as_ref() {
            Condition::HasCategory { field, value } => {
                let t = pool.pick(&keys("not_has_category", Some(field)), rng)?;
                fill(t, &[("field", field.clone()), ("value", value.clone())])
            }
            other => {
                let t = pool.pick(&keys("not", None), rng)?.to_string();
                let inner = render_node(other, pool, rng)?;
                fill(&t, &[("child", inner)])
            }
        },
        Condition::TextEquals { field, value } => {
            let t = pool.pick(&keys("text_equals", Some(field)), rng)?;
            fill(t, &[("field", field.clone()), ("value", value.clone())])
        }
        Condition::NumCmp { field, op, threshold } => {
            let kind = match pool.vague_name(field, *op, *threshold) {
                Some(name) => format!("vague_{name}"),
                None => format!("num_{}", op.key()),
            };
            let t = pool.pick(&keys(&kind, Some(field)), rng)?;
            fill(t, &[("field", field.clone()), ("value", render_number(*threshold))])
        }
        Condition::DateCmp { field, op, threshold } => {
            let kind = if let Some(name) = pool.vague_name(field, *op, *threshold as f64) {
                format!("vague_{name}")
            } else if matches!(op, CmpOp::Ge | CmpOp::Lt) && is_jan_first(*threshold)
                || *op == CmpOp::Le && is_jan_first(*threshold + 1)
            {
                format!("date_{}_year", op.key())
            } else {
                format!("date_{}", op.key())
            };
            let t = pool.pick(&keys(&kind, Some(field)), rng)?;
            let year = year_of(*threshold);
            fill(
                t,
                &[
                    ("field", field.clone()),
                    ("year_before", (year - 1).to_string()),
                    ("year", year.to_string()),
                    ("date", render_date(*threshold)),
                ],
            )
        }
        Condition::All { children } => {
            let t = pool.pick(&keys("all", None), rng)?.to_string();
            let parts = children
                .iter()
                .map(|c| render_node(c, pool, rng))
                .collect::<Result<Vec<_>, _>>()?;
            fill(&t, &[("items", join_list(&parts))])
        }
        Condition::FuzzyTitle { target, .. } => {
            let t = pool.pick(&keys("fuzzy_title", None), rng)?;
            fill(t, &[("target", target.clone())])
        }
    })
}
