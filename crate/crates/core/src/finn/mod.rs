//! Unicycle tracks: iterating the forward map on flat-contact seeds, their
//! oscillation counts, and the equilateral linkage picture of the same motion.

mod linkage;
mod track;

pub use linkage::{
    jet_from_linkage, linkage_from_seed, linkage_from_track, seed_param_after, simulate_linkage, Linkage, TrackLinkage,
    C_MIN, DEFAULT_STEP, TAU_LINK, T_MAX,
};

pub use track::{
    backward_obstruction, count_extrema, count_zeros, iterate_jet, iterate_track, rolle_witness, seed_jet,
    RolleReport, Segment, SegmentMetrics, StopReason, UnicycleTrack, ZeroCount, TAU_JOIN, TAU_ZERO,
};
