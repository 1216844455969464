//! Single-sample generation for every task.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use super::attributes::{attribute_condition, draw_attributes, render_attrs, AttrDraw, AttrMode};
use super::misspell::misspell;
use super::templates::TemplateSet;
use super::{QuerySample, Result, Split, Task, TaskgenError, MAX_ATTEMPTS, MAX_POSITIVES, NEGATIVES_PER_SAMPLE};
use crate::catalog::{jan_first, year_of, Catalog, FieldValue, InteractionLog, Item};
use crate::conditions::{catalog_pool, mine_negatives, render, CmpOp, Condition, SurfacePool};
use crate::llm::{summarize_item, summarize_user, GenBackend};
use crate::seed::{self, Rng};
use crate::text::join_list;

const MIN_HISTORY: usize = 3;
const MAX_HISTORY: usize = 10;
const MAX_I2I_POSITIVES: usize = 10;
const JACCARD_NEIGHBORS: usize = 5;
const ROUND_STEPS: &[f64] = &[
    5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0, 150.0, 200.0, 300.0, 500.0, 1000.0,
];
const GENRE_IN_VAGUE: f64 = 0.3;
const VAGUE_WORD: f64 = 0.9;
const SECOND_VAGUE: f64 = 0.3;
const EXTRA_POSITIVE_TAG: f64 = 0.15;
const SECOND_NEGATION: f64 = 0.15;
const UNCOMMON_SHARE: f64 = 0.15;
const DIMENSION_TAGS: &[&str] = &["2d", "3d"];

/// Everything sample generation reads, with the derived behaviour tables
/// computed once.
pub struct GenContext<'a> {
    pub catalog: &'a Catalog,
    pub interactions: &'a InteractionLog,
    pub templates: &'a TemplateSet,
    pub backend: &'a GenBackend,
    surface: SurfacePool,
    /// Per user, catalog positions of their events in order.
    sequences: Vec<Vec<usize>>,
    /// Co-occurrence counts over train-visible history (all but each user's last event).
    cooc: Vec<BTreeMap<usize, u32>>,
    i2i_sources: Vec<usize>,
}

impl<'a> GenContext<'a> {
    pub fn new(
        catalog: &'a Catalog,
        interactions: &'a InteractionLog,
        templates: &'a TemplateSet,
        backend: &'a GenBackend,
    ) -> Result<Self> {
        let mut sequences = Vec::with_capacity(interactions.users.len());
        for u in &interactions.users {
            let seq = u
                .events
                .iter()
                .map(|e| {
                    catalog.position(&e.item_id).ok_or_else(|| {
                        TaskgenError::Input(format!(
                            "user \"{}\" references unknown item \"{}\"",
                            u.user_id, e.item_id
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sequences.push(seq);
        }
        let mut cooc = vec![BTreeMap::new(); catalog.len()];
        for seq in &sequences {
            let visible: BTreeSet<usize> = seq[..seq.len().saturating_sub(1)].iter().copied().collect();
            for &a in &visible {
                for &b in &visible {
                    if a != b {
                        *cooc[a].entry(b).or_insert(0u32) += 1;
                    }
                }
            }
        }
        let mut i2i_sources: Vec<usize> = (0..catalog.len()).filter(|&i| !cooc[i].is_empty()).collect();
        if i2i_sources.is_empty() {
            i2i_sources = (0..catalog.len()).collect();
        }
        let surface = catalog_pool(catalog);
        Ok(Self {
            catalog,
            interactions,
            templates,
            backend,
            surface,
            sequences,
            cooc,
            i2i_sources,
        })
    }

    /// Replaces the phrase pool used to render conditions.
    pub fn with_surface(mut self, pool: SurfacePool) -> Self {
        self.surface = pool;
        self
    }

    pub fn surface(&self) -> &SurfacePool {
        &self.surface
    }

    fn item(&self, pos: usize) -> &Item {
        &self.catalog.items()[pos]
    }

    /// Users whose sequences support a history window in `split`.
    fn behaviour_users(&self, split: Split) -> Vec<usize> {
        let min_len = match split {
            Split::Train => MIN_HISTORY + 2,
            Split::Test => MIN_HISTORY + 1,
        };
        (0..self.sequences.len())
            .filter(|&u| self.sequences[u].len() >= min_len)
            .collect()
    }
}

/// Draws a sample; retries with fresh seeds on unsatisfiable draws.
pub fn generate_sample(
    ctx: &GenContext<'_>,
    task: Task,
    split: Split,
    sample_index: usize,
    global_seed: u64,
) -> Result<QuerySample> {
    let sample_seed = seed::derive(&[global_seed, split.code(), task.code(), sample_index as u64]);
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seed::rng(seed::derive(&[sample_seed, attempt]));
        match draw(ctx, task, split, &mut rng) {
            Ok(d) => {
                return Ok(QuerySample {
                    sample_id: format!("{split}-{task}-{sample_index:05}"),
                    task,
                    split,
                    query: d.query,
                    positives: d.positives,
                    negatives: d.negatives,
                    condition: d.condition,
                    template_id: d.template_id,
                    seed: sample_seed,
                })
            }
            Err(e @ (TaskgenError::Pool(_) | TaskgenError::Llm(_) | TaskgenError::Unsatisfiable { .. })) => {
                return Err(e)
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(TaskgenError::Exhausted {
        task,
        index: sample_index,
        attempts: MAX_ATTEMPTS,
        last,
    })
}

struct Draft {
    query: String,
    positives: Vec<String>,
    negatives: Vec<String>,
    condition: Option<Condition>,
    template_id: String,
}

fn draw(ctx: &GenContext<'_>, task: Task, split: Split, rng: &mut Rng) -> Result<Draft> {
    let templates = ctx.templates.get(task, split);
    let template = *templates
        .choose(rng)
        .ok_or_else(|| TaskgenError::Pool(format!("no {split} templates for {task}")))?;
    let sub_seed = rng.random::<u64>();
    let neg_seed = rng.random::<u64>();

    let mut excluded = BTreeSet::new();
    let (query, positives, condition) = match task {
        Task::UH2I | Task::US2I | Task::UQ2I => {
            let (user, history, target) = history_window(ctx, split, task, rng)?;
            excluded.extend(ctx.sequences[user].iter().map(|&p| ctx.item(p).id.clone()));
            let items: Vec<&Item> = history.iter().map(|&p| ctx.item(p)).collect();
            let titles: Vec<&str> = items.iter().map(|it| it.title.as_str()).collect();
            let target_item = ctx.item(target);
            match task {
                Task::UH2I => (
                    template.fill(&[("HISTORY", &join_list(&titles))]),
                    vec![target_item.id.clone()],
                    None,
                ),
                Task::US2I => {
                    let summary = summarize_user(&items, ctx.backend, sub_seed)?;
                    (
                        template.fill(&[("SUMMARY", &summary)]),
                        vec![target_item.id.clone()],
                        None,
                    )
                }
                _ => {
                    let cond = intent_condition(target_item, rng)
                        .ok_or_else(|| TaskgenError::Input(format!("item \"{}\" has no categories", target_item.id)))?;
                    let phrase = render(&cond, &ctx.surface, sub_seed)?;
                    (
                        template.fill(&[("HISTORY", &join_list(&titles)), ("CONDITION", &phrase)]),
                        vec![target_item.id.clone()],
                        Some(cond),
                    )
                }
            }
        }
        Task::I2I => {
            let source = *ctx.i2i_sources.choose(rng).expect("non-empty source list");
            let positives = i2i_positives(ctx, source);
            if positives.is_empty() {
                return Err(TaskgenError::Input(format!(
                    "item \"{}\" has no similar items",
                    ctx.item(source).id
                )));
            }
            excluded.insert(ctx.item(source).id.clone());
            excluded.extend(ctx.cooc[source].keys().map(|&p| ctx.item(p).id.clone()));
            let ids = positives.iter().map(|&p| ctx.item(p).id.clone()).collect();
            (template.fill(&[("ITEM", &ctx.item(source).title)]), ids, None)
        }
        Task::FA2I | Task::SA2I => {
            let source = random_item(ctx, rng);
            let mode = if task == Task::FA2I { AttrMode::Full } else { AttrMode::Sparse };
            let draws = draw_attributes(source, mode, sub_seed)?;
            let cond = attribute_condition(&draws);
            let positives = satisfiers(ctx.catalog, &cond, source);
            (template.fill(&[("ATTRS", &render_attrs(&draws))]), positives, Some(cond))
        }
        Task::AS2I => {
            let source = random_item(ctx, rng);
            let draws = draw_attributes(source, AttrMode::Sparse, sub_seed)?;
            let fields: Vec<String> = draws.iter().map(|d| d.field.clone()).collect();
            let summary = summarize_item(source, &fields, ctx.backend, sub_seed)?;
            // Negatives must differ from the source on the described attributes.
            let full: Vec<AttrDraw> = draws
                .iter()
                .map(|d| AttrDraw {
                    field: d.field.clone(),
                    value: source.fields[&d.field].clone(),
                })
                .collect();
            let cond = attribute_condition(&full);
            let negatives = mine_negatives(ctx.catalog, &BTreeSet::from([source.id.clone()]), Some(&cond), NEGATIVES_PER_SAMPLE, neg_seed)?;
            return Ok(Draft {
                query: template.fill(&[("SUMMARY", &summary)]),
                positives: vec![source.id.clone()],
                negatives,
                condition: None,
                template_id: template.id.clone(),
            });
        }
        Task::NM2I => {
            let source = random_item(ctx, rng);
            let name = misspell(&source.title, sub_seed, ctx.catalog)?;
            excluded.insert(source.id.clone());
            (template.fill(&[("NAME", &name)]), vec![source.id.clone()], None)
        }
        Task::VC2I | Task::NA2I => {
            let source = random_item(ctx, rng);
            let cond = if task == Task::VC2I {
                vague_condition(ctx, source, rng)
            } else {
                negated_condition(ctx, source, rng)
            }
            .ok_or_else(|| TaskgenError::Input(format!("item \"{}\" supports no {task} condition", source.id)))?;
            let phrase = render(&cond, &ctx.surface, sub_seed)?;
            let positives = satisfiers(ctx.catalog, &cond, source);
            (template.fill(&[("CONDITION", &phrase)]), positives, Some(cond))
        }
    };
    excluded.extend(positives.iter().cloned());
    let negatives = mine_negatives(ctx.catalog, &excluded, condition.as_ref(), NEGATIVES_PER_SAMPLE, neg_seed)?;
    Ok(Draft {
        query,
        positives,
        negatives,
        condition,
        template_id: template.id.clone(),
    })
}

fn random_item<'c>(ctx: &'c GenContext<'_>, rng: &mut Rng) -> &'c Item {
    ctx.catalog.items().choose(rng).expect("catalog is never empty")
}

/// `(user, history positions, target position)`. Train windows come from
/// all but the user's last event; test targets are exactly that last event.
fn history_window(ctx: &GenContext<'_>, split: Split, task: Task, rng: &mut Rng) -> Result<(usize, Vec<usize>, usize)> {
    let users = ctx.behaviour_users(split);
    let &user = users.choose(rng).ok_or(TaskgenError::Unsatisfiable {
        task,
        what: format!("users with enough history for the {split} split"),
    })?;
    let seq = &ctx.sequences[user];
    let n = seq.len();
    match split {
        Split::Train => {
            let visible = &seq[..n - 1];
            let h = rng.random_range(MIN_HISTORY..=MAX_HISTORY.min(visible.len() - 1));
            Ok((user, visible[..h].to_vec(), visible[h]))
        }
        Split::Test => {
            let h = rng.random_range(MIN_HISTORY..=MAX_HISTORY.min(n - 1));
            Ok((user, seq[n - 1 - h..n - 1].to_vec(), seq[n - 1]))
        }
    }
}

/// Items co-occurring with `source` in at least two histories, most frequent
/// first; falls back to attribute-Jaccard neighbours.
fn i2i_positives(ctx: &GenContext<'_>, source: usize) -> Vec<usize> {
    let mut ranked: Vec<(usize, u32)> = ctx.cooc[source]
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(&p, &c)| (p, c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| ctx.item(a.0).id.cmp(&ctx.item(b.0).id)));
    if !ranked.is_empty() {
        return ranked.into_iter().take(MAX_I2I_POSITIVES).map(|(p, _)| p).collect();
    }
    let attrs = |it: &Item| -> BTreeSet<(String, String)> {
        it.fields
            .iter()
            .filter_map(|(k, v)| match v {
                FieldValue::Categories(c) => Some(c.iter().map(move |x| (k.clone(), x.clone()))),
                _ => None,
            })
            .flatten()
            .collect()
    };
    let src = attrs(ctx.item(source));
    let mut scored: Vec<(usize, f64)> = (0..ctx.catalog.len())
        .filter(|&p| p != source)
        .filter_map(|p| {
            let other = attrs(ctx.item(p));
            let inter = src.intersection(&other).count();
            let union = src.union(&other).count();
            (inter > 0).then(|| (p, inter as f64 / union as f64))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| ctx.item(a.0).id.cmp(&ctx.item(b.0).id)));
    scored.into_iter().take(JACCARD_NEIGHBORS).map(|(p, _)| p).collect()
}

/// Source first, then other satisfiers in catalog order, capped.
fn satisfiers(catalog: &Catalog, cond: &Condition, source: &Item) -> Vec<String> {
    let mut out = vec![source.id.clone()];
    out.extend(
        catalog
            .items()
            .iter()
            .filter(|it| it.id != source.id && cond.eval(it))
            .take(MAX_POSITIVES - 1)
            .map(|it| it.id.clone()),
    );
    out
}

fn primary_category_field(item: &Item) -> Option<&'static str> {
    ["genre", "tags"].into_iter().find(|f| !item.categories(f).is_empty())
}

/// One or two category predicates the target satisfies.
fn intent_condition(target: &Item, rng: &mut Rng) -> Option<Condition> {
    let mut children = Vec::new();
    if let Some(g) = target.categories("genre").choose(rng) {
        children.push(Condition::has_category("genre", g));
    }
    let tags: Vec<&String> = target
        .categories("tags")
        .iter()
        .filter(|t| !DIMENSION_TAGS.contains(&t.as_str()))
        .collect();
    if children.is_empty() || rng.random_bool(0.5) {
        if let Some(t) = tags.choose(rng) {
            children.push(Condition::has_category("tags", t));
        }
    }
    (!children.is_empty()).then(|| Condition::all(children))
}

fn number_predicate(ctx: &GenContext<'_>, field: &str, value: f64, rng: &mut Rng) -> Option<Condition> {
    let (lo, hi) = ctx.catalog.number_range(field)?;
    // Inclusive thresholds from the value out to the step just past the
    // catalog's extreme, so the stated number itself always qualifies.
    let cap = ROUND_STEPS.iter().copied().find(|&t| t > hi).unwrap_or(f64::INFINITY);
    let floor = ROUND_STEPS.iter().rev().copied().find(|&t| t < lo).unwrap_or(f64::NEG_INFINITY);
    let above: Vec<f64> = ROUND_STEPS.iter().copied().filter(|&t| t >= value && t <= cap).collect();
    let below: Vec<f64> = ROUND_STEPS.iter().copied().filter(|&t| t <= value && t >= floor).collect();
    let under = !above.is_empty() && (below.is_empty() || rng.random_bool(0.7));
    if under {
        Some(Condition::num_cmp(field, CmpOp::Le, *above.choose(rng)?))
    } else {
        Some(Condition::num_cmp(field, CmpOp::Ge, *below.choose(rng)?))
    }
}

fn date_predicate(ctx: &GenContext<'_>, field: &str, day: i64, rng: &mut Rng) -> Condition {
    let year = year_of(day);
    let (first, last) = ctx
        .catalog
        .date_range(field)
        .map(|(a, b)| (year_of(a), year_of(b)))
        .unwrap_or((year - 4, year + 4));
    let after = year > first && (year >= last || rng.random_bool(0.5));
    if after {
        // "from Y or later" with Y in (first, year].
        let y = rng.random_range(first + 1..=year);
        Condition::date_cmp(field, CmpOp::Ge, jan_first(y))
    } else {
        // "from Y or earlier" with Y in [year, last).
        let y = rng.random_range(year..last.max(year + 1));
        Condition::date_cmp(field, CmpOp::Le, jan_first(y + 1) - 1)
    }
}

/// Vague words ("cheap", "recent") the source satisfies for `field`.
fn vague_terms_for(ctx: &GenContext<'_>, source: &Item, field: &str, date: bool) -> Vec<Condition> {
    ctx.surface
        .vague_terms()
        .iter()
        .filter(|t| t.field == field)
        .map(|t| t.condition(date))
        .filter(|c| c.eval(source))
        .collect()
}

/// One or two vague predicates over numbers and dates, sometimes with a
/// genre predicate. Vague words are preferred over explicit thresholds.
fn vague_condition(ctx: &GenContext<'_>, source: &Item, rng: &mut Rng) -> Option<Condition> {
    let mut vague: Vec<(bool, Condition)> = Vec::new();
    for (name, value) in &source.fields {
        let (words, explicit) = match value {
            FieldValue::Number { value, .. } => (vague_terms_for(ctx, source, name, false), number_predicate(ctx, name, *value, rng)),
            FieldValue::Date(d) => (vague_terms_for(ctx, source, name, true), Some(date_predicate(ctx, name, *d, rng))),
            _ => continue,
        };
        if !words.is_empty() && rng.random_bool(VAGUE_WORD) {
            vague.push((true, words.choose(rng)?.clone()));
        } else if let Some(c) = explicit {
            vague.push((false, c));
        }
    }
    if vague.is_empty() {
        return None;
    }
    vague.shuffle(rng);
    vague.sort_by_key(|(word, _)| !*word);
    let n = if vague.len() >= 2 && rng.random_bool(SECOND_VAGUE) { 2 } else { 1 };
    let mut children: Vec<Condition> = vague.into_iter().take(n).map(|(_, c)| c).collect();
    if rng.random_bool(GENRE_IN_VAGUE) {
        if let Some(f) = primary_category_field(source) {
            let v = source.categories(f).choose(rng)?;
            children.push(Condition::has_category(f, v));
        }
    }
    children.shuffle(rng);
    Some(Condition::all(children))
}

/// A positive category predicate plus one or two negated categories the
/// source lacks.
fn negated_condition(ctx: &GenContext<'_>, source: &Item, rng: &mut Rng) -> Option<Condition> {
    let pos_field = primary_category_field(source)?;
    let mut positive = vec![Condition::has_category(pos_field, source.categories(pos_field).choose(rng)?)];
    let neg_field = if source.fields.contains_key("tags") { "tags" } else { pos_field };
    if pos_field != "tags" && rng.random_bool(EXTRA_POSITIVE_TAG) {
        if let Some(t) = source
            .categories("tags")
            .iter()
            .filter(|t| !DIMENSION_TAGS.contains(&t.as_str()))
            .collect::<Vec<_>>()
            .choose(rng)
        {
            positive.push(Condition::has_category("tags", t));
        }
    }
    let own: BTreeSet<&String> = source.categories(neg_field).iter().collect();
    let candidates: Vec<String> = ctx
        .catalog
        .category_vocabulary(neg_field)
        .into_iter()
        .filter(|v| !own.contains(v))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    // Prefer excluding something that is unusual among the items the
    // positive part already selects.
    let base = Condition::all(positive.clone());
    let selected: Vec<&Item> = ctx.catalog.items().iter().filter(|it| base.eval(it)).collect();
    let share = |v: &String| {
        let n = selected.iter().filter(|it| it.categories(neg_field).contains(v)).count();
        n as f64 / selected.len().max(1) as f64
    };
    let uncommon: Vec<String> = candidates.iter().filter(|v| share(v) <= UNCOMMON_SHARE).cloned().collect();
    let candidates = if uncommon.is_empty() { candidates } else { uncommon };
    let n = if candidates.len() >= 2 && rng.random_bool(SECOND_NEGATION) { 2 } else { 1 };
    let negs: Vec<&String> = candidates.choose_multiple(rng, n).collect();
    let mut children = positive;
    children.extend(negs.into_iter().map(|v| Condition::not(Condition::has_category(neg_field, v))));
    Some(Condition::all(children))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::synth_catalog;
    use crate::text::levenshtein_ci;

    fn fixture() -> (Catalog, InteractionLog) {
        synth_catalog(42, 200, 120).unwrap()
    }

    #[test]
    fn every_task_yields_valid_samples() {
        let (cat, log) = fixture();
        let tpl = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&cat, &log, &tpl, &backend).unwrap();
        for task in Task::ALL {
            for split in [Split::Train, Split::Test] {
                for i in 0..15 {
                    let s = generate_sample(&ctx, task, split, i, 9).unwrap();
                    s.check().unwrap_or_else(|e| panic!("{}: {e}", s.sample_id));
                    for id in s.positives.iter().chain(&s.negatives) {
                        assert!(cat.contains(id));
                    }
                    if let Some(c) = &s.condition {
                        for p in &s.positives {
                            assert!(c.eval(cat.get(p).unwrap()));
                        }
                        for n in &s.negatives {
                            assert!(!c.eval(cat.get(n).unwrap()));
                        }
                    }
                    assert_eq!(s, generate_sample(&ctx, task, split, i, 9).unwrap());
                }
            }
        }
    }

    #[test]
    fn negation_task_has_not_and_positive_predicate() {
        let (cat, log) = fixture();
        let tpl = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&cat, &log, &tpl, &backend).unwrap();
        for i in 0..40 {
            let s = generate_sample(&ctx, Task::NA2I, Split::Test, i, 1).unwrap();
            let Some(Condition::All { children }) = &s.condition else { panic!() };
            assert!(children.iter().any(|c| matches!(c, Condition::Not { .. })));
            assert!(children.iter().any(|c| !matches!(c, Condition::Not { .. })));
        }
    }

    #[test]
    fn misspelled_names_stay_close() {
        let (cat, log) = fixture();
        let tpl = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&cat, &log, &tpl, &backend).unwrap();
        for i in 0..40 {
            let s = generate_sample(&ctx, Task::NM2I, Split::Train, i, 3).unwrap();
            let title = &cat.get(&s.positives[0]).unwrap().title;
            let tpl = tpl.templates().iter().find(|t| t.id == s.template_id).unwrap();
            let (pre, post) = tpl.pattern.split_once("{NAME}").unwrap();
            let name = &s.query[pre.len()..s.query.len() - post.len()];
            let d = levenshtein_ci(name, title);
            assert!((1..=2).contains(&d), "{name} / {title}");
        }
    }

    #[test]
    fn test_targets_are_held_out_last_events() {
        let (cat, log) = fixture();
        let tpl = TemplateSet::builtin();
        let backend = GenBackend::DeterministicFallback;
        let ctx = GenContext::new(&cat, &log, &tpl, &backend).unwrap();
        let lasts: BTreeSet<(String, String)> = log
            .users
            .iter()
            .map(|u| (u.user_id.clone(), u.events.last().unwrap().item_id.clone()))
            .collect();
        let last_items: BTreeSet<&String> = lasts.iter().map(|(_, i)| i).collect();
        for i in 0..30 {
            let s = generate_sample(&ctx, Task::UH2I, Split::Test, i, 5).unwrap();
            assert!(last_items.contains(&s.positives[0]));
        }
    }
}
