//! Rule-based stand-in for a chat model.
//!
//! The first prompt line is a header `COMMAND key=value key=value ...`;
//! values run until the next ` key=` and lists are comma-separated (titles
//! use `|`). Supported commands:
//!
//! | command          | keys                          |
//! |------------------|-------------------------------|
//! | `SUMMARIZE_USER` | `genres`, `tags`, `top_titles` |
//! | `SUMMARIZE_ITEM` | `attrs` (`field:value;...`)   |
//! | `MISSPELL`       | `name`                        |
//! | `PARAPHRASE`     | `text`                        |
//!
//! Anything else echoes the first prompt line.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;

use super::GenRequest;
use crate::text::join_list;

fn key_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|\s)([a-z_]+)=").unwrap())
}

fn parse_header(line: &str) -> (&str, BTreeMap<String, String>) {
    let line = line.trim();
    let (command, rest) = line.split_once(' ').unwrap_or((line, ""));
    let mut out = BTreeMap::new();
    let caps: Vec<_> = key_re().captures_iter(rest).collect();
    for (i, c) in caps.iter().enumerate() {
        let whole = c.get(0).unwrap();
        let value_start = whole.end();
        let value_end = caps
            .get(i + 1)
            .map(|n| n.get(0).unwrap().start())
            .unwrap_or(rest.len());
        out.insert(
            c[1].to_string(),
            rest[value_start..value_end].trim().to_string(),
        );
    }
    (command, out)
}

fn list(v: Option<&String>, sep: char) -> Vec<String> {
    v.map(|s| {
        s.split(sep)
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(String::from)
            .collect()
    })
    .unwrap_or_default()
}

/// Deterministic generation; a pure function of the request.
pub fn fallback_generate(req: &GenRequest) -> String {
    let first = req.prompt.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let (command, args) = parse_header(first);
    match command {
        "SUMMARIZE_USER" => summarize_user(&args),
        "SUMMARIZE_ITEM" => summarize_item(&args, req.seed),
        "MISSPELL" => misspell(args.get("name").map(String::as_str).unwrap_or(""), req.seed),
        "PARAPHRASE" => args.get("text").cloned().unwrap_or_default(),
        _ => first.trim().to_string(),
    }
}

fn summarize_user(args: &BTreeMap<String, String>) -> String {
    let genres = list(args.get("genres"), ',');
    let tags = list(args.get("tags"), ',');
    let titles = list(args.get("top_titles"), '|');
    let mut out = if genres.is_empty() {
        if tags.is_empty() {
            "The user enjoys a variety of games".to_string()
        } else {
            format!("The user enjoys games with {}", join_list(&tags))
        }
    } else {
        format!("The user enjoys {} games", join_list(&genres))
    };
    if !titles.is_empty() {
        out.push_str(" such as ");
        out.push_str(&join_list(&titles));
    }
    out.push('.');
    if let (Some(main), false) = (genres.first(), tags.is_empty()) {
        out.push_str(&format!(" Their favorite {main} games feature {}.", join_list(&tags)));
    }
    out
}

fn item_phrase(field: &str, value: &str) -> String {
    match field {
        "tags" => format!("with {value}"),
        "price" => format!("that costs {value} dollars"),
        "release date" => format!("released on {value}"),
        "publisher" => format!("published by {value}"),
        _ => format!("with {field} {value}"),
    }
}

const LEADS: &[&str] = &["", "Looking for ", "I want ", "Show me "];

fn summarize_item(args: &BTreeMap<String, String>, seed: u64) -> String {
    let attrs: Vec<(String, String)> = args
        .get("attrs")
        .map(|s| {
            s.split(';')
                .filter_map(|kv| kv.split_once(':'))
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .collect()
        })
        .unwrap_or_default();
    let genre = attrs.iter().find(|(k, _)| k == "genre").map(|(_, v)| v.clone());
    let subject = match &genre {
        Some(g) => format!("a {g} game"),
        None => "a game".to_string(),
    };
    let parts: Vec<String> = attrs
        .iter()
        .filter(|(k, _)| k != "genre")
        .map(|(k, v)| item_phrase(k, v))
        .collect();
    let lead = LEADS[(seed % LEADS.len() as u64) as usize];
    let mut s = if lead.is_empty() {
        let mut c = subject.chars();
        let first = c.next().map(|f| f.to_uppercase().collect::<String>()).unwrap_or_default();
        first + c.as_str()
    } else {
        format!("{lead}{subject}")
    };
    if !parts.is_empty() {
        s.push(' ');
        s.push_str(&join_list(&parts));
    }
    s.push('.');
    s
}

fn misspell(name: &str, seed: u64) -> String {
    let chars: Vec<char> = name.chars().collect();
    if chars.len() < 3 {
        return name.to_string();
    }
    // Drop one interior character.
    let pos = 1 + (seed as usize) % (chars.len() - 2);
    chars
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, c)| c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn user_summary_template() {
        let r = GenRequest::new(
            "SUMMARIZE_USER genres=strategy,shooter top_titles=Age of Empires",
            0,
        );
        assert_eq!(
            fallback_generate(&r),
            "The user enjoys strategy and shooter games such as Age of Empires."
        );
        assert_eq!(fallback_generate(&r), fallback_generate(&r));
    }

    #[test]
    fn header_values_may_contain_spaces() {
        let (cmd, args) = parse_header("SUMMARIZE_USER genres=role playing,sports tags=pixel art");
        assert_eq!(cmd, "SUMMARIZE_USER");
        assert_eq!(args["genres"], "role playing,sports");
        assert_eq!(args["tags"], "pixel art");
    }

    #[test]
    fn item_summary_contains_values() {
        let r = GenRequest::new("SUMMARIZE_ITEM attrs=tags:pixel art;price:10", 0);
        assert_eq!(fallback_generate(&r), "A game with pixel art and that costs 10 dollars.");
        let r = GenRequest::new("SUMMARIZE_ITEM attrs=genre:shooter;publisher:glasswing", 1);
        assert_eq!(fallback_generate(&r), "Looking for a shooter game published by glasswing.");
    }

    #[test]
    fn unknown_command_echoes() {
        assert_eq!(fallback_generate(&GenRequest::new("hello world\nmore", 0)), "hello world");
        assert_eq!(
            fallback_generate(&GenRequest::new("PARAPHRASE text=keep me", 0)),
            "keep me"
        );
        assert_eq!(fallback_generate(&GenRequest::new("MISSPELL name=Fortnite", 4)), "Fortnte");
    }
}
