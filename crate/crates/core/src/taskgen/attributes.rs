//! Attribute draws for the full- and sparse-attribute tasks.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use super::{Result, TaskgenError};
use crate::catalog::{FieldValue, Item};
use crate::conditions::{CmpOp, Condition};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrMode {
    /// Every field, multi-valued fields resampled with replacement.
    Full,
    /// One to three fields.
    Sparse,
}

/// One drawn attribute. For category fields `values` holds the sampled
/// values, duplicates included; other fields carry their single value.
#[derive(Debug, Clone, PartialEq)]
pub struct AttrDraw {
    pub field: String,
    pub value: FieldValue,
}

impl AttrDraw {
    pub fn rendered(&self) -> String {
        match &self.value {
            FieldValue::Categories(v) => v.join(", "),
            other => other.render(),
        }
    }
}

fn eligible(item: &Item) -> Vec<(&String, &FieldValue)> {
    item.fields
        .iter()
        .filter(|(k, _)| k.as_str() != "title" && k.as_str() != "description")
        .filter(|(_, v)| !matches!(v, FieldValue::Categories(c) if c.is_empty()))
        .collect()
}

pub fn draw_attributes(item: &Item, mode: AttrMode, seed: u64) -> Result<Vec<AttrDraw>> {
    let fields = eligible(item);
    if fields.is_empty() {
        return Err(TaskgenError::NoAttributes(item.id.clone()));
    }
    let mut rng = seed::rng(seed);
    let chosen: Vec<usize> = match mode {
        AttrMode::Full => (0..fields.len()).collect(),
        AttrMode::Sparse => {
            let k = rng.random_range(1..=fields.len().min(3));
            let mut ix = index::sample(&mut rng, fields.len(), k).into_vec();
            ix.sort_unstable();
            ix
        }
    };
    let mut out: Vec<AttrDraw> = chosen
        .into_iter()
        .map(|i| {
            let (name, value) = fields[i];
            let value = match value {
                FieldValue::Categories(all) => {
                    let n = match mode {
                        AttrMode::Full => all.len(),
                        AttrMode::Sparse => rng.random_range(1..=all.len().min(2)),
                    };
                    FieldValue::Categories((0..n).map(|_| all[rng.random_range(0..all.len())].clone()).collect())
                }
                other => other.clone(),
            };
            AttrDraw {
                field: name.clone(),
                value,
            }
        })
        .collect();
    out.shuffle(&mut rng);
    Ok(out)
}

/// `(field, rendered value)` pairs in query order.
pub fn sample_attributes(item: &Item, mode: AttrMode, seed: u64) -> Result<Vec<(String, String)>> {
    Ok(draw_attributes(item, mode, seed)?
        .iter()
        .map(|d| (d.field.clone(), d.rendered()))
        .collect())
}

/// `"tags : action, pixel art, price : 10"`.
pub fn render_attrs(draws: &[AttrDraw]) -> String {
    draws
        .iter()
        .map(|d| format!("{} : {}", d.field, d.rendered()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Conjunction matching every drawn value; duplicate categories collapse.
pub fn attribute_condition(draws: &[AttrDraw]) -> Condition {
    let mut children = Vec::new();
    for d in draws {
        match &d.value {
            FieldValue::Categories(vals) => {
                let distinct: BTreeSet<&String> = vals.iter().collect();
                children.extend(distinct.into_iter().map(|v| Condition::has_category(&d.field, v)));
            }
            FieldValue::Number { value, .. } => children.push(Condition::num_cmp(&d.field, CmpOp::Eq, *value)),
            FieldValue::Date(day) => children.push(Condition::date_cmp(&d.field, CmpOp::Eq, *day)),
            FieldValue::Text(t) => children.push(Condition::text_equals(&d.field, t)),
        }
    }
    Condition::all(children)
}
