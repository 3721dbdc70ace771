//! Numerical certification of greedy approximation guarantees on concrete
//! instances.

pub mod batch;
pub mod checks;
pub mod constants;
pub mod report;
pub mod sweep;
pub mod targets;

pub use batch::{
    check_livschitz, check_tropp_recovery, lemma_decay_batch, prop_iterate_batch, theorem_batch,
    LemmaDecayBatch, PropIterateBatch, TheoremBatch, TheoremBatchReport,
};
pub use checks::{
    certificate_gap, check_claim_sequence, check_instance_optimality, check_lemma_decay,
    check_postprocessing, check_prop_iterate, claim_sigmas, evaluate_theorem_instance,
    lemma_required_order, DecaySchedule, TheoremInstance,
};
pub use constants::{theorem_constants, TheoremConstants};
pub use report::{CheckReport, Violation, SLACK};
pub use sweep::{recovery_phase_sweep, write_sweep_csv, Ensemble, SweepRow, SweepSpec};
