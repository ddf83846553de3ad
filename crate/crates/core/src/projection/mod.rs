//! Random projection: parameter derivation, projection plans, bucketing of
//! all l-mers by their projected k-mer code, and enriched-bucket selection.

mod hashing;
mod params;

pub use hashing::{
    enriched_buckets, hash_trial, project, sample_plan, Backend, Bucket, BucketGrouping,
    EnrichedBucket, ProjectionPlan, DEFAULT_DENSE_CAP,
};
pub(crate) use params::threshold_for_lmers;
pub use params::{
    binomial_lt, bucket_threshold, num_trials, optimal_k, p_hat, trials_for_tail, TrialParams,
    DEFAULT_THRESHOLD_FLOOR,
};
