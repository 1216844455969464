//! Synthetic game catalogs with genre-clustered user behaviour.
//!
//! Items get a title, a description and five typed fields (price, release
//! date, genre, tags, publisher). Each user has a favourite genre (and
//! sometimes a second one) and picks items from it with a popularity skew,
//! so item co-occurrence carries real signal for the behaviour tasks.

use std::collections::{BTreeMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use super::{jan_first, Catalog, CatalogError, Event, FieldValue, InteractionLog, Item, Result, UserHistory};
use crate::conditions::{older_threshold, recent_threshold, CHEAP_BELOW, EXPENSIVE_FROM};
use crate::seed::{self, Rng};

const GENRES: &[(&str, &[&str])] = &[
    ("shooter", &["first person", "online multiplayer", "competitive", "violent", "sci-fi"]),
    ("strategy", &["real time", "turn based", "base building", "historical", "tactical"]),
    ("racing", &["arcade", "vehicles", "local multiplayer", "open world", "realistic"]),
    ("sports", &["soccer", "local multiplayer", "competitive", "realistic", "family friendly"]),
    ("puzzle", &["relaxing", "pixel art", "family friendly", "hand drawn", "physics"]),
    ("platformer", &["pixel art", "side scroller", "hand drawn", "difficult", "local co-op"]),
    ("role playing", &["open world", "story rich", "fantasy", "turn based", "character customization"]),
    ("simulation", &["building", "relaxing", "management", "realistic", "sandbox"]),
    ("adventure", &["story rich", "exploration", "atmospheric", "point and click", "local co-op"]),
    ("fighting", &["competitive", "local multiplayer", "arcade", "anime", "violent"]),
    ("horror", &["atmospheric", "violent", "survival", "psychological", "dark"]),
    ("survival", &["crafting", "open world", "sandbox", "online co-op", "survival"]),
];

const COMMON_TAGS: &[&str] = &[
    "singleplayer",
    "online co-op",
    "local co-op",
    "made for kids",
    "high quality soundtrack",
    "controller support",
    "cartoon",
    "retro",
    "short",
    "cyberpunk",
    "multiplayer",
    "casual",
];

const ADJECTIVES: &[&str] = &[
    "Crimson", "Silent", "Iron", "Hollow", "Neon", "Broken", "Golden", "Frozen", "Savage",
    "Lost", "Electric", "Shadow", "Wild", "Ancient", "Rusty", "Lunar", "Burning", "Hidden",
    "Eternal", "Velvet", "Stellar", "Feral", "Quiet", "Radiant", "Crooked", "Distant",
    "Scarlet", "Emerald", "Cobalt", "Ashen", "Tiny", "Grand", "Cosmic", "Mighty", "Sunken",
    "Twisted", "Bright", "Vivid", "Hungry", "Restless",
];

/// Title adjectives for catalogs built with [`SynthOptions::alternate_titles`].
const ALT_ADJECTIVES: &[&str] = &[
    "Amber", "Brave", "Clever", "Dusky", "Fabled", "Gilded", "Humble", "Jagged", "Keen",
    "Lucky", "Mystic", "Noble", "Obsidian", "Pale", "Proud", "Rapid", "Royal", "Sacred",
    "Sly", "Solar", "Stormy", "Swift", "Thorny", "Topaz", "Umbral", "Valiant", "Wandering",
    "Whispering", "Wicked", "Young", "Zealous", "Arctic", "Blazing", "Copper", "Dreamy",
    "Fierce", "Gloomy", "Jolly", "Misty", "Sterling",
];

const NOUNS: &[&str] = &[
    "Harbor", "Empire", "Frontier", "Legion", "Circuit", "Garden", "Citadel", "Voyage",
    "Kingdom", "Outpost", "Tide", "Horizon", "Dungeon", "Arena", "Engine", "Orchard", "Rift",
    "Summit", "Colony", "Labyrinth", "Comet", "Canyon", "Fortress", "Meadow", "Reactor",
    "Signal", "Saga", "Tempest", "Odyssey", "Bastion", "Lantern", "Drift", "Spire", "Hive",
    "Relic", "Cascade", "Paradox", "Beacon", "Wilds", "Forge",
];

const GENRE_NOUNS: &[(&str, &[&str])] = &[
    ("shooter", &["Strike", "Warfare", "Ops", "Bullet", "Trigger", "Squadron", "Recon", "Barrage"]),
    ("strategy", &["Tactics", "Conquest", "Dominion", "Command", "Siege", "Throne", "Realms", "Armies"]),
    ("racing", &["Rally", "Motors", "Speedway", "Turbo", "Grand Prix", "Nitro", "Circuit", "Racer"]),
    ("sports", &["League", "Cup", "Striker", "Champions", "Stadium", "Goal", "Slam", "Pitch"]),
    ("puzzle", &["Puzzle", "Blocks", "Riddle", "Tiles", "Match", "Cubes", "Logic", "Mosaic"]),
    ("platformer", &["Jump", "Leap", "Dash", "Hopper", "Bounce", "Climber", "Runner", "Tumble"]),
    ("role playing", &["Chronicles", "Quest", "Legends", "Saga", "Tales", "Heroes", "Prophecy", "Sorcery"]),
    ("simulation", &["Simulator", "Tycoon", "Farm", "Builder", "Manager", "Village", "Factory", "Town"]),
    ("adventure", &["Journey", "Expedition", "Mystery", "Island", "Secrets", "Voyage", "Odyssey", "Trail"]),
    ("fighting", &["Brawl", "Fists", "Combat", "Knockout", "Duel", "Clash", "Rumble", "Kombat"]),
    ("horror", &["Nightmare", "Haunting", "Dread", "Asylum", "Shadows", "Terror", "Phantom", "Crypt"]),
    ("survival", &["Survivors", "Wilderness", "Outlast", "Stranded", "Shelter", "Exile", "Frostbite", "Scavenger"]),
];

/// Zipf exponent of item popularity.
const POPULARITY_EXPONENT: f64 = 1.6;

/// Extra pick weight per favourite tag an item carries.
const TAG_TASTE: f64 = 3.0;

/// Share of titles whose noun comes from the genre list.
const GENRE_TITLE: f64 = 0.75;

const SUFFIXES: &[&str] = &["", "", "", "", " II", " III", ": Origins", ": Reloaded", " Deluxe", " Remastered"];

const PUBLISHERS: &[&str] = &[
    "prison games",
    "northwind studios",
    "bluefox interactive",
    "ironclad works",
    "pixel harbor",
    "stormcrow games",
    "lumen entertainment",
    "red maple studio",
    "orbit nine",
    "quiet owl games",
    "copperleaf",
    "brightside labs",
    "tundra interactive",
    "glasswing",
    "moonlit forge",
    "vantage point",
];

const PRICES: &[f64] = &[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 70.0];

const MOODS: &[&str] = &[
    "tense", "charming", "sprawling", "fast paced", "thoughtful", "gritty", "colorful",
    "brutal", "cozy", "ambitious",
];

/// Parameters for [`synth_catalog_with`].
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub seed: u64,
    pub n_items: usize,
    pub n_users: usize,
    /// Catalog name, recorded as the artifact's domain.
    pub domain: String,
    /// Prefix for item ids; distinct prefixes give disjoint catalogs.
    pub id_prefix: String,
    /// Draw title adjectives from a second word list.
    pub alternate_titles: bool,
}

impl SynthOptions {
    pub fn new(seed: u64, n_items: usize, n_users: usize) -> Self {
        Self {
            seed,
            n_items,
            n_users,
            domain: "synthetic".into(),
            id_prefix: "g".into(),
            alternate_titles: false,
        }
    }

    pub fn domain(mut self, domain: &str, id_prefix: &str) -> Self {
        self.domain = domain.into();
        self.id_prefix = id_prefix.into();
        self
    }

    pub fn alternate_titles(mut self, on: bool) -> Self {
        self.alternate_titles = on;
        self
    }
}

/// Deterministic synthetic catalog and interaction log.
pub fn synth_catalog(seed: u64, n_items: usize, n_users: usize) -> Result<(Catalog, InteractionLog)> {
    synth_catalog_with(&SynthOptions::new(seed, n_items, n_users))
}

pub fn synth_catalog_with(opts: &SynthOptions) -> Result<(Catalog, InteractionLog)> {
    if opts.n_items < 10 {
        return Err(CatalogError::BadParameters(format!(
            "n_items must be at least 10, got {}",
            opts.n_items
        )));
    }
    if opts.n_users < 1 {
        return Err(CatalogError::BadParameters("n_users must be at least 1".into()));
    }
    let items = synth_items(opts);
    let catalog = Catalog::new(opts.domain.clone(), items)?;
    let log = synth_users(opts, &catalog);
    Ok((catalog, log))
}

fn synth_items(opts: &SynthOptions) -> Vec<Item> {
    let mut rng = seed::rng(seed::derive(&[opts.seed, seed::str_seed("items")]));
    let mut titles = HashSet::new();
    let adjectives = if opts.alternate_titles { ALT_ADJECTIVES } else { ADJECTIVES };
    let width = opts.n_items.to_string().len().max(4);
    let date_lo = jan_first(2005);
    let date_hi = jan_first(2025) - 1;

    let mut items: Vec<Item> = (0..opts.n_items)
        .map(|i| {
            let (genre, affine) = GENRES[rng.random_range(0..GENRES.len())];
            let title = fresh_title(&mut rng, &mut titles, genre, adjectives);
            let mut genres = vec![genre];
            if rng.random_bool(0.3) {
                let (g2, _) = GENRES[rng.random_range(0..GENRES.len())];
                genres.push(g2);
            }

            let mut tags: Vec<&str> = vec![if rng.random_bool(0.35) { "2d" } else { "3d" }];
            let n_tags = rng.random_range(2..=5);
            while tags.len() < n_tags + 1 {
                let t = if rng.random_bool(0.7) {
                    *affine.choose(&mut rng).unwrap()
                } else {
                    *COMMON_TAGS.choose(&mut rng).unwrap()
                };
                if !tags.contains(&t) {
                    tags.push(t);
                }
            }
            // Kid-friendly and violent tags rarely coexist.
            if tags.contains(&"violent") {
                tags.retain(|t| *t != "made for kids");
            }

            let price = *PRICES.choose(&mut rng).unwrap();
            let release = rng.random_range(date_lo..=date_hi);
            let publisher = *PUBLISHERS.choose(&mut rng).unwrap();
            let mood = *MOODS.choose(&mut rng).unwrap();
            let description = format!(
                "A {mood} {genre} game with {} and {}.",
                tags[1],
                tags[tags.len() - 1]
            );

            let mut fields = BTreeMap::new();
            fields.insert("genre".to_string(), FieldValue::categories(&genres).unwrap());
            fields.insert("tags".to_string(), FieldValue::categories(&tags).unwrap());
            fields.insert("price".to_string(), FieldValue::number(price, "USD").unwrap());
            fields.insert("release date".to_string(), FieldValue::Date(release));
            fields.insert("publisher".to_string(), FieldValue::Text(publisher.to_string()));

            Item {
                id: format!("{}{:0width$}", opts.id_prefix, i + 1),
                title,
                description,
                fields,
            }
        })
        .collect();

    // Price and age words, matching the vague query vocabulary.
    let max = items.iter().filter_map(|it| match it.field("release date") {
        Some(FieldValue::Date(d)) => Some(*d),
        _ => None,
    });
    if let Some(max) = max.max() {
        let (recent, older) = (recent_threshold(max), older_threshold(max));
        for it in &mut items {
            let mut extra = Vec::new();
            if let Some(FieldValue::Number { value, .. }) = it.field("price") {
                if *value < CHEAP_BELOW {
                    extra.push("Cheap, affordable and budget priced.");
                } else if *value >= EXPENSIVE_FROM {
                    extra.push("Expensive, pricey and premium priced.");
                }
            }
            if let Some(FieldValue::Date(d)) = it.field("release date") {
                if *d >= recent {
                    extra.push("A recent new release, recently released.");
                } else if *d < older {
                    extra.push("An older old school classic.");
                }
            }
            for e in extra {
                it.description.push(' ');
                it.description.push_str(e);
            }
        }
    }
    items
}

/// Title whose noun usually hints at the genre.
fn fresh_title(rng: &mut Rng, taken: &mut HashSet<String>, genre: &str, adjectives: &[&str]) -> String {
    let hinted = GENRE_NOUNS.iter().find(|(g, _)| *g == genre).map(|(_, n)| *n);
    let noun = |rng: &mut Rng| match hinted {
        Some(n) if rng.random_bool(GENRE_TITLE) => *n.choose(rng).unwrap(),
        _ => *NOUNS.choose(rng).unwrap(),
    };
    for _ in 0..64 {
        let t = format!("{} {}{}", adjectives.choose(rng).unwrap(), noun(rng), SUFFIXES.choose(rng).unwrap());
        if taken.insert(t.to_lowercase()) {
            return t;
        }
    }
    // Vocabulary exhausted; disambiguate with a number.
    let mut n = taken.len();
    loop {
        let t = format!("{} {} {}", adjectives.choose(rng).unwrap(), noun(rng), n);
        if taken.insert(t.to_lowercase()) {
            return t;
        }
        n += 1;
    }
}

fn synth_users(opts: &SynthOptions, catalog: &Catalog) -> InteractionLog {
    let mut rng = seed::rng(seed::derive(&[opts.seed, seed::str_seed("users")]));
    let items = catalog.items();

    // Popularity: a random permutation ranks items, weight decays with rank.
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut rng);
    let mut weight = vec![0.0f64; items.len()];
    for (rank, &i) in order.iter().enumerate() {
        weight[i] = 1.0 / ((rank + 1) as f64).powf(POPULARITY_EXPONENT);
    }

    let by_genre: BTreeMap<&str, Vec<usize>> = GENRES
        .iter()
        .map(|(g, _)| {
            let members = (0..items.len())
                .filter(|&i| items[i].categories("genre").first().map(String::as_str) == Some(*g))
                .collect();
            (*g, members)
        })
        .collect();
    let genres_present: Vec<&str> = by_genre
        .iter()
        .filter(|(_, m)| !m.is_empty())
        .map(|(g, _)| *g)
        .collect();
    let everything: Vec<usize> = (0..items.len()).collect();
    let width = opts.n_users.to_string().len().max(4);

    let users = (0..opts.n_users)
        .map(|u| {
            let first = *genres_present.choose(&mut rng).unwrap();
            let second = if rng.random_bool(0.5) {
                *genres_present.choose(&mut rng).unwrap()
            } else {
                first
            };
            // A couple of favourite tags from the main genre raise an item's odds.
            let affine = GENRES.iter().find(|(g, _)| *g == first).map(|(_, t)| *t).unwrap_or(&[]);
            let n_fav = rng.random_range(1..=2).min(affine.len());
            let favourites: Vec<&str> = affine.choose_multiple(&mut rng, n_fav).copied().collect();
            let taste: Vec<f64> = items
                .iter()
                .zip(&weight)
                .map(|(it, w)| {
                    let shared = it.categories("tags").iter().filter(|t| favourites.contains(&t.as_str())).count();
                    w * (1.0 + TAG_TASTE * shared as f64)
                })
                .collect();
            let n_events = rng.random_range(4..=14).min(items.len());
            let mut chosen: Vec<usize> = Vec::with_capacity(n_events);
            let mut guard = 0;
            while chosen.len() < n_events && guard < 1000 {
                guard += 1;
                let roll: f64 = rng.random();
                let pool = if roll < 0.7 {
                    &by_genre[first]
                } else if roll < 0.9 {
                    &by_genre[second]
                } else {
                    &everything
                };
                if let Some(i) = weighted_pick(&mut rng, pool, &taste, &chosen) {
                    chosen.push(i);
                }
            }
            // Fill from the whole catalog if the genre pools ran dry.
            while chosen.len() < n_events {
                match weighted_pick(&mut rng, &everything, &weight, &chosen) {
                    Some(i) => chosen.push(i),
                    None => break,
                }
            }
            // Play order is independent of pick order.
            chosen.shuffle(&mut rng);
            let mut ts: i64 = rng.random_range(1_600_000_000..1_700_000_000);
            let events = chosen
                .into_iter()
                .map(|i| {
                    ts += rng.random_range(60..86_400);
                    Event {
                        item_id: items[i].id.clone(),
                        ts,
                    }
                })
                .collect();
            UserHistory {
                user_id: format!("u{:0width$}", u + 1),
                events,
            }
        })
        .collect();
    InteractionLog { users }
}

fn weighted_pick(rng: &mut Rng, pool: &[usize], weight: &[f64], exclude: &[usize]) -> Option<usize> {
    let total: f64 = pool
        .iter()
        .filter(|i| !exclude.contains(i))
        .map(|&i| weight[i])
        .sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    let mut last = None;
    for &i in pool.iter().filter(|i| !exclude.contains(i)) {
        last = Some(i);
        x -= weight[i];
        if x <= 0.0 {
            return Some(i);
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_to_jsonl, interactions_to_jsonl};

    #[test]
    fn deterministic_and_sized() {
        let (c1, l1) = synth_catalog(42, 500, 300).unwrap();
        let (c2, l2) = synth_catalog(42, 500, 300).unwrap();
        assert_eq!(c1.len(), 500);
        assert_eq!(catalog_to_jsonl(&c1, None), catalog_to_jsonl(&c2, None));
        assert_eq!(interactions_to_jsonl(&l1, None), interactions_to_jsonl(&l2, None));
    }

    #[test]
    fn minimum_scale() {
        let (c, l) = synth_catalog(42, 10, 1).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(l.users.len(), 1);
        assert!(l.users[0].events.len() >= 2);
    }

    #[test]
    fn preconditions() {
        assert!(synth_catalog(1, 9, 5).is_err());
        assert!(synth_catalog(1, 10, 0).is_err());
    }

    #[test]
    fn every_item_has_the_typed_fields() {
        let (c, l) = synth_catalog(7, 200, 50).unwrap();
        for it in c.items() {
            assert!(!it.title.is_empty() && !it.description.is_empty());
            assert!(it.fields.len() >= 4);
            assert!(matches!(it.field("price"), Some(FieldValue::Number { .. })));
            assert!(matches!(it.field("release date"), Some(FieldValue::Date(_))));
            assert!(matches!(it.field("genre"), Some(FieldValue::Categories(_))));
            assert!(matches!(it.field("tags"), Some(FieldValue::Categories(_))));
            assert!(matches!(it.field("publisher"), Some(FieldValue::Text(_))));
        }
        for u in &l.users {
            assert!(u.events.windows(2).all(|w| w[0].ts <= w[1].ts));
            let distinct: HashSet<_> = u.item_ids().collect();
            assert_eq!(distinct.len(), u.events.len());
            assert!(u.item_ids().all(|id| c.contains(id)));
        }
    }

    #[test]
    fn distinct_prefixes_give_disjoint_ids() {
        let (a, _) = synth_catalog_with(&SynthOptions::new(1, 50, 5).domain("a", "a")).unwrap();
        let (b, _) = synth_catalog_with(&SynthOptions::new(2, 50, 5).domain("b", "b")).unwrap();
        assert!(a.items().iter().all(|it| !b.contains(&it.id)));
        assert_eq!(b.name, "b");
    }
}
