//! The three cooling phases on bit vectors, and the end-to-end pipeline.

mod phase1;
mod phase2;
mod phase3;
mod pipeline;
mod record;

pub use phase1::{pair_survivors, phase1_apply, phase1_round, phase1_run, Phase1Config};
pub use phase2::{
    choose_k, parity_bin, phase2_apply, phase2_plan, phase2_round, phase2_round_fixed, phase2_run, Phase2Schedule, Phase2Step,
    PHASE2_ENTRY_DELTA,
};
pub use phase3::{phase3_apply, phase3_block_passes, phase3_k, phase3_plan, phase3_round, phase3_run};
pub use pipeline::{
    block_partition, gather, initial_permutation, pipeline, pipeline_on, PipelineConfig, PipelineMode, PipelineReport, Plan,
    Shuffle, StepProfile,
};
pub use record::{empirical_bias, records_to_csv, RoundRecord, CSV_HEADER};
