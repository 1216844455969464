//! Item-retrieval alignment toolkit.
//!
//! The crate covers the whole loop for teaching a text encoder to retrieve
//! items from a fixed catalog:
//!
//! * [`catalog`] loads or synthesizes item catalogs and user interaction logs.
//! * [`conditions`] is the attribute predicate language used as retrieval ground truth.
//! * [`llm`] is the text-generation bridge (remote chat-completion or deterministic fallback).
//! * [`taskgen`] turns a catalog into the ten query task families with mined true negatives.
//! * [`encoder`] is the hashed n-gram text encoder and its InfoNCE trainer.
//! * [`eval`] holds the exact item index, Hit@K / Coverage@K and the evaluation drivers.
//! * [`agent`] replays recommender conversations and scores retrieval from raw dialogue.
//! * [`cli`] wires everything into the `forge` binary.
//!
//! Runnable walkthroughs live in `examples/`; run one with
//! `cargo run --release -p forge --example train_encoder`.

pub mod agent;
pub mod catalog;
pub mod cli;
pub mod conditions;
pub mod encoder;
pub mod eval;
pub mod llm;
pub mod meta;
pub mod seed;
pub mod taskgen;
pub mod text;

pub use catalog::{Catalog, FieldValue, InteractionLog, Item};
pub use conditions::Condition;
pub use encoder::{EncoderModel, TokenizerConfig, TrainConfig};
pub use eval::{EvalReport, ItemIndex};
pub use llm::{GenBackend, GenRequest};
pub use taskgen::{MixConfig, QuerySample, Split, Task, Template};

/// Tool version recorded in every artifact header.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
