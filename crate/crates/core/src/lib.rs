//! Set constraint problems solved as ternary membership matrices.
//!
//! The pipeline is:
//!
//! 1. [`instance::parse_scp`] reads the constraint DSL into an [`ScpInstance`].
//! 2. [`qimm::build_matrix`] applies the constraints to an elements x sets
//!    matrix over {1, 0, -1}; untouched cells stay uncertain (0).
//! 3. [`quantum::lift`] maps each cell to `|0>`, `|1>` or the equal superposition.
//! 4. [`sampler`] prepares one qubit per cell and measures the whole register
//!    round after round.
//! 5. [`oracle`] enumerates every consistent completion by brute force and
//!    checks sampler output against it.

pub mod assignment;
pub mod cli;
pub mod instance;
pub mod oracle;
pub mod qimm;
pub mod quantum;
pub mod sampler;

pub use assignment::{Assignment, Membership};
pub use instance::{parse_scp, Constraint, ElementId, ParseError, ScpInstance, SetId};
pub use oracle::{distribution_check, enumerate_completions, satisfies, CompletionSet};
pub use qimm::{
    build_matrix, describe_set, enumerate_variants, MatrixError, TernaryMatrix, TernaryValue,
};
pub use quantum::{lift, render_expression, set_expression, CellState, QuantumMatrix};
pub use sampler::{
    complexity_report, measure_all, prepare, sample_rounds, sample_until, QubitRegister,
    SampleReport,
};
