//! Every example runs to completion.

#[path = "../examples/synth_catalog.rs"]
mod synth_catalog;
#[path = "../examples/condition_eval.rs"]
mod condition_eval;
#[path = "../examples/generate_tasks.rs"]
mod generate_tasks;
#[path = "../examples/train_encoder.rs"]
mod train_encoder;
#[path = "../examples/evaluate_retrieval.rs"]
mod evaluate_retrieval;
#[path = "../examples/ood_transfer.rs"]
mod ood_transfer;
#[path = "../examples/agent_conversations.rs"]
mod agent_conversations;
#[path = "../examples/remote_llm.rs"]
mod remote_llm;

#[test]
fn synth_catalog_runs() {
    synth_catalog::main().unwrap();
}

#[test]
fn condition_eval_runs() {
    condition_eval::main().unwrap();
}

#[test]
fn generate_tasks_runs() {
    generate_tasks::main().unwrap();
}

#[test]
fn train_encoder_runs() {
    train_encoder::main().unwrap();
}

#[test]
fn evaluate_retrieval_runs() {
    evaluate_retrieval::main().unwrap();
}

#[test]
fn ood_transfer_runs() {
    ood_transfer::main().unwrap();
}

#[test]
fn agent_conversations_runs() {
    agent_conversations::main().unwrap();
}

#[test]
fn remote_llm_runs() {
    remote_llm::main().unwrap();
}
