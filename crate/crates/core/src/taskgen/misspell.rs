//! Name corruption for the misspelled-name task.

use rand::Rng as _;

use super::{Result, TaskgenError};
use crate::catalog::Catalog;
use crate::seed;
use crate::text::levenshtein;

const MAX_TRIES: u64 = 16;
const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// A single character edit; positions index chars, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    Insert(usize, char),
    Delete(usize),
    Replace(usize, char),
}

pub fn apply_edit(name: &str, edit: Edit) -> String {
    let mut chars: Vec<char> = name.chars().collect();
    match edit {
        Edit::Insert(i, c) => chars.insert(i.min(chars.len()), c),
        Edit::Delete(i) if i < chars.len() => {
            chars.remove(i);
        }
        Edit::Replace(i, c) if i < chars.len() => chars[i] = c,
        _ => {}
    }
    chars.into_iter().collect()
}

fn random_edit(chars: &[char], rng: &mut seed::Rng) -> Edit {
    let letter = |rng: &mut seed::Rng| ALPHABET[rng.random_range(0..ALPHABET.len())] as char;
    let n = chars.len();
    match rng.random_range(0..3) {
        0 => Edit::Insert(rng.random_range(0..=n), letter(rng)),
        1 if n > 1 => Edit::Delete(rng.random_range(0..n)),
        _ => {
            let i = rng.random_range(0..n);
            let old = chars[i].to_ascii_lowercase();
            let mut c = letter(rng);
            while c == old {
                c = letter(rng);
            }
            Edit::Replace(i, c)
        }
    }
}

/// Corrupts `name` with one random edit, or two when it has at least five
/// characters. The result never equals any catalog title, ignoring case.
pub fn misspell(name: &str, seed: u64, catalog: &Catalog) -> Result<String> {
    let len = name.chars().count();
    if len < 2 {
        return Err(TaskgenError::Misspell {
            name: name.into(),
            message: "name must have at least 2 characters".into(),
        });
    }
    let max_edits = if len >= 5 { 2 } else { 1 };
    let lower = name.to_lowercase();
    for attempt in 0..MAX_TRIES {
        let mut rng = seed::rng(seed::derive(&[seed, attempt]));
        let edits = rng.random_range(1..=max_edits);
        let mut out = name.to_string();
        for _ in 0..edits {
            let chars: Vec<char> = out.chars().collect();
            out = apply_edit(&out, random_edit(&chars, &mut rng));
        }
        let d = levenshtein(&out, name);
        if d == 0 || d > max_edits || out.to_lowercase() == lower || out.trim().is_empty() {
            continue;
        }
        let out_lower = out.to_lowercase();
        if catalog.items().iter().any(|it| it.title.to_lowercase() == out_lower) {
            continue;
        }
        return Ok(out);
    }
    Err(TaskgenError::Misspell {
        name: name.into(),
        message: format!("every one of {MAX_TRIES} attempts collided with a catalog title"),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::catalog::Item;

    fn catalog(titles: &[&str]) -> Catalog {
        let items = titles
            .iter()
            .enumerate()
            .map(|(i, t)| Item {
                id: format!("i{i}"),
                title: t.to_string(),
                description: String::new(),
                fields: BTreeMap::new(),
            })
            .collect();
        Catalog::new("t", items).unwrap()
    }

    #[test]
    fn fortnite_single_deletion() {
        assert_eq!(apply_edit("Fortnite", Edit::Delete(5)), "Fortnte");
        assert_eq!(levenshtein("Fortnte", "Fortnite"), 1);
    }

    #[test]
    fn short_names_get_one_edit() {
        let cat = catalog(&["Go"]);
        for s in 0..200 {
            let m = misspell("Go", s, &cat).unwrap();
            assert_eq!(levenshtein(&m, "Go"), 1, "{m}");
        }
    }

    #[test]
    fn distance_bounds_and_determinism() {
        let cat = catalog(&["Fortnite"]);
        let mut saw_two = false;
        for s in 0..300 {
            let m = misspell("Fortnite", s, &cat).unwrap();
            let d = levenshtein(&m, "Fortnite");
            assert!((1..=2).contains(&d));
            saw_two |= d == 2;
            assert_eq!(m, misspell("Fortnite", s, &cat).unwrap());
        }
        assert!(saw_two);
    }

    #[test]
    fn collisions_are_filtered() {
        // Every single-edit variant of "Halo" over the edit alphabet.
        let base: Vec<char> = "Halo".chars().collect();
        let mut variants = Vec::new();
        for i in 0..=base.len() {
            for &c in ALPHABET {
                variants.push(apply_edit("Halo", Edit::Insert(i, c as char)));
            }
        }
        for i in 0..base.len() {
            variants.push(apply_edit("Halo", Edit::Delete(i)));
            for &c in ALPHABET {
                variants.push(apply_edit("Halo", Edit::Replace(i, c as char)));
            }
        }
        assert!(variants.iter().any(|v| v.eq_ignore_ascii_case("half")));

        let cat = catalog(&["Halo", "Half"]);
        for s in 0..2000 {
            let m = misspell("Halo", s, &cat).unwrap();
            assert!(!m.eq_ignore_ascii_case("halo") && !m.eq_ignore_ascii_case("half"));
            assert!(variants.contains(&m));
        }
    }

    #[test]
    fn pathological_catalog_errors() {
        let mut titles = vec!["ab".to_string()];
        for c in ALPHABET {
            let c = *c as char;
            titles.push(format!("{c}ab"));
            titles.push(format!("a{c}b"));
            titles.push(format!("ab{c}"));
            titles.push(format!("{c}b"));
            titles.push(format!("a{c}"));
        }
        titles.push("a".into());
        titles.push("b".into());
        titles.sort();
        titles.dedup();
        let refs: Vec<&str> = titles.iter().map(String::as_str).collect();
        let cat = catalog(&refs);
        assert!(matches!(misspell("ab", 1, &cat), Err(TaskgenError::Misspell { .. })));
        assert!(misspell("a", 1, &cat).is_err());
    }
}
