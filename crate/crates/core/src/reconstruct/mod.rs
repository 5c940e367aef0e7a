//! Labelling schemes that determine a T-tessellation on known lines, and the
//! algorithms rebuilding it from them.

mod orphans;
mod pipeline;
mod rebuild;
mod scheme1;

pub use orphans::{
    check_requirements, compute_p_u0, scheme2_for, select_initial_orphans, virtual_murders, Scheme2,
};
pub use pipeline::{
    extract_scheme2, refine_orphans, CertifiedScheme2, LabellingCount, ReconstructionDiff,
    Refinement,
};
pub use rebuild::{
    algorithm2, algorithm2_with, cutting, initialize, parent_seek, CutOutcome, MarkChange,
    MarkKind, Rebuild, RebuildOptions, Snapshot, Stage,
};
pub use scheme1::{algorithm1, extract_scheme1, Scheme1};
