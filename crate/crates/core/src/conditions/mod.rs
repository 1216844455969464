//! Attribute predicates over catalog items.
//!
//! A [`Condition`] records the exact semantics of a query. Coverage@K and
//! true-negative mining are both defined by [`Condition::eval`].

mod negatives;
mod render;

use serde::{Deserialize, Serialize};

use crate::catalog::{Days, FieldValue, Item};
use crate::text::levenshtein_ci;

pub use negatives::mine_negatives;
pub use render::{
    catalog_pool, default_pool, older_threshold, recent_threshold, render, with_catalog_terms, SurfacePool, VagueTerm, CHEAP_BELOW,
    EXPENSIVE_FROM,
};

/// Default bound for [`Condition::FuzzyTitle`].
pub const DEFAULT_FUZZY_DISTANCE: usize = 2;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConditionError {
    #[error("no surface template for node kind \"{0}\"")]
    MissingTemplate(String),
    #[error("insufficient negatives: need {needed}, only {available} eligible")]
    InsufficientNegatives { needed: usize, available: usize },
    #[error("invalid condition: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl CmpOp {
    pub fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
        }
    }

    pub(crate) fn key(self) -> &'static str {
        match self {
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
            CmpOp::Eq => "eq",
        }
    }
}

/// Conjunctive predicate tree with negation.
///
/// Serialized as a tagged node tree; the tag key is `node`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Condition {
    HasCategory { field: String, value: String },
    TextEquals { field: String, value: String },
    NumCmp { field: String, op: CmpOp, threshold: f64 },
    DateCmp { field: String, op: CmpOp, threshold: Days },
    Not { child: Box<Condition> },
    All { children: Vec<Condition> },
    FuzzyTitle { target: String, max_distance: usize },
}

impl Condition {
    pub fn has_category(field: &str, value: &str) -> Self {
        Condition::HasCategory {
            field: field.to_lowercase(),
            value: value.to_lowercase(),
        }
    }

    pub fn text_equals(field: &str, value: &str) -> Self {
        Condition::TextEquals {
            field: field.to_lowercase(),
            value: value.to_string(),
        }
    }

    pub fn num_cmp(field: &str, op: CmpOp, threshold: f64) -> Self {
        Condition::NumCmp {
            field: field.to_lowercase(),
            op,
            threshold,
        }
    }

    pub fn date_cmp(field: &str, op: CmpOp, threshold: Days) -> Self {
        Condition::DateCmp {
            field: field.to_lowercase(),
            op,
            threshold,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Condition) -> Self {
        Condition::Not {
            child: Box::new(child),
        }
    }

    pub fn all(children: Vec<Condition>) -> Self {
        Condition::All { children }
    }

    pub fn fuzzy_title(target: &str, max_distance: usize) -> Self {
        Condition::FuzzyTitle {
            target: target.to_string(),
            max_distance,
        }
    }

    /// Whether `item` satisfies the condition. Missing or mistyped fields
    /// make a leaf false; the function never fails.
    pub fn eval(&self, item: &Item) -> bool {
        match self {
            Condition::HasCategory { field, value } => match item.field(field) {
                Some(FieldValue::Categories(c)) => c.iter().any(|v| v == value),
                _ => false,
            },
            Condition::TextEquals { field, value } => match item.field(field) {
                Some(FieldValue::Text(t)) => t.to_lowercase() == value.to_lowercase(),
                _ => false,
            },
            Condition::NumCmp { field, op, threshold } => match item.field(field) {
                Some(FieldValue::Number { value, .. }) => op.holds(*value, *threshold),
                _ => false,
            },
            Condition::DateCmp { field, op, threshold } => match item.field(field) {
                Some(FieldValue::Date(d)) => op.holds(*d, *threshold),
                _ => false,
            },
            Condition::Not { child } => !child.eval(item),
            Condition::All { children } => children.iter().all(|c| c.eval(item)),
            Condition::FuzzyTitle { target, max_distance } => {
                levenshtein_ci(&item.title, target) <= *max_distance
            }
        }
    }

    /// Structural invariants: non-empty conjunctions, finite thresholds.
    pub fn validate(&self) -> Result<(), ConditionError> {
        match self {
            Condition::NumCmp { threshold, .. } if !threshold.is_finite() => {
                Err(ConditionError::Invalid("non-finite threshold".into()))
            }
            Condition::All { children } if children.is_empty() => {
                Err(ConditionError::Invalid("empty conjunction".into()))
            }
            Condition::All { children } => children.iter().try_for_each(Condition::validate),
            Condition::Not { child } => child.validate(),
            _ => Ok(()),
        }
    }

    /// Number of `Not` nodes in the tree.
    pub fn negation_count(&self) -> usize {
        match self {
            Condition::Not { child } => 1 + child.negation_count(),
            Condition::All { children } => children.iter().map(Condition::negation_count).sum(),
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::catalog::parse_date;

    fn item(fields: Vec<(&str, FieldValue)>) -> Item {
        Item {
            id: "g1".into(),
            title: "Splitgate".into(),
            description: String::new(),
            fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        }
    }

    fn splitgate() -> Item {
        item(vec![
            ("genre", FieldValue::categories(["shooter"]).unwrap()),
            ("tags", FieldValue::categories(["3d", "not made for kids"]).unwrap()),
        ])
    }

    #[test]
    fn splitgate_matches_composite_query() {
        let c = Condition::all(vec![
            Condition::has_category("genre", "shooter"),
            Condition::not(Condition::has_category("tags", "made for kids")),
            Condition::not(Condition::has_category("tags", "2d")),
        ]);
        assert!(c.eval(&splitgate()));
    }

    #[test]
    fn missing_field_is_false() {
        let c = Condition::all(vec![Condition::has_category("publisher", "x")]);
        assert!(!c.eval(&splitgate()));
        assert!(!Condition::num_cmp("price", CmpOp::Lt, 1e9).eval(&splitgate()));
        assert!(!Condition::date_cmp("release date", CmpOp::Ge, 0).eval(&splitgate()));
    }

    #[test]
    fn wrong_type_is_false() {
        let it = item(vec![("price", FieldValue::Text("cheap".into()))]);
        assert!(!Condition::num_cmp("price", CmpOp::Le, 10.0).eval(&it));
        assert!(!Condition::has_category("price", "cheap").eval(&it));
        assert!(Condition::text_equals("price", "CHEAP").eval(&it));
    }

    #[test]
    fn numeric_boundary() {
        let it = item(vec![("price", FieldValue::number(10.0, "USD").unwrap())]);
        assert!(!Condition::num_cmp("price", CmpOp::Lt, 10.0).eval(&it));
        assert!(Condition::num_cmp("price", CmpOp::Le, 10.0).eval(&it));
        assert!(Condition::num_cmp("price", CmpOp::Eq, 10.0).eval(&it));
    }

    #[test]
    fn date_after_year_boundary() {
        let jan1 = parse_date("2021-01-01").unwrap();
        let after_2020 = Condition::date_cmp("release date", CmpOp::Ge, jan1);
        let dec31 = item(vec![("release date", FieldValue::Date(jan1 - 1))]);
        let jan1_item = item(vec![("release date", FieldValue::Date(jan1))]);
        assert!(!after_2020.eval(&dec31));
        assert!(after_2020.eval(&jan1_item));
    }

    #[test]
    fn fuzzy_title_is_case_insensitive() {
        assert!(Condition::fuzzy_title("SPLITGAT", 2).eval(&splitgate()));
        assert!(Condition::fuzzy_title("splitgate", 0).eval(&splitgate()));
        assert!(!Condition::fuzzy_title("Split", 2).eval(&splitgate()));
    }

    #[test]
    fn serialized_node_tags() {
        let c = Condition::all(vec![
            Condition::has_category("genre", "shooter"),
            Condition::text_equals("publisher", "x"),
            Condition::num_cmp("price", CmpOp::Lt, 10.0),
            Condition::date_cmp("release date", CmpOp::Ge, 18628),
            Condition::not(Condition::fuzzy_title("Halo", 2)),
        ]);
        let json = serde_json::to_value(&c).unwrap();
        let mut tags = Vec::new();
        fn collect(v: &serde_json::Value, out: &mut Vec<String>) {
            if let Some(o) = v.as_object() {
                if let Some(t) = o.get("node").and_then(|t| t.as_str()) {
                    out.push(t.to_string());
                }
                o.values().for_each(|x| collect(x, out));
            } else if let Some(a) = v.as_array() {
                a.iter().for_each(|x| collect(x, out));
            }
        }
        collect(&json, &mut tags);
        tags.sort();
        assert_eq!(
            tags,
            ["all", "date_cmp", "fuzzy_title", "has_category", "not", "num_cmp", "text_equals"]
        );
        let back: Condition = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation() {
        assert!(Condition::all(vec![]).validate().is_err());
        assert!(Condition::num_cmp("p", CmpOp::Lt, f64::INFINITY).validate().is_err());
        assert!(Condition::not(Condition::has_category("a", "b")).validate().is_ok());
    }

    fn arb_item() -> impl Strategy<Value = Item> {
        (
            proptest::sample::subsequence(vec!["a", "b", "c", "d"], 1..4),
            0.0f64..50.0,
            0i64..100,
        )
            .prop_map(|(cats, price, date)| {
                item(vec![
                    ("tags", FieldValue::categories(cats).unwrap()),
                    ("price", FieldValue::number(price.round(), "USD").unwrap()),
                    ("release date", FieldValue::Date(date)),
                ])
            })
    }

    fn arb_leaf() -> impl Strategy<Value = Condition> {
        prop_oneof![
            proptest::sample::select(vec!["a", "b", "c", "d", "e"])
                .prop_map(|v| Condition::has_category("tags", v)),
            (0.0f64..50.0).prop_map(|t| Condition::num_cmp("price", CmpOp::Lt, t.round())),
            (0i64..100).prop_map(|t| Condition::date_cmp("release date", CmpOp::Ge, t)),
        ]
    }

    fn arb_condition() -> impl Strategy<Value = Condition> {
        arb_leaf().prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Condition::not),
                proptest::collection::vec(inner, 1..3).prop_map(Condition::all),
            ]
        })
    }

    proptest! {
        #[test]
        fn double_negation_is_identity(it in arb_item(), c in arb_condition()) {
            prop_assert_eq!(Condition::not(Condition::not(c.clone())).eval(&it), c.eval(&it));
        }

        #[test]
        fn de_morgan_over_conjunction(it in arb_item(), a in arb_condition(), b in arb_condition()) {
            let lhs = Condition::not(Condition::all(vec![a.clone(), b.clone()])).eval(&it);
            prop_assert_eq!(lhs, !(a.eval(&it) && b.eval(&it)));
        }
    }
}
