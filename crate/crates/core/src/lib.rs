//! Quantum partial search at desk scale.
//!
//! The dynamics of global and local Grover operators on a database of
//! `N = 2^n` items split into `K` blocks of `b = 2^m` items stay inside a real
//! three-dimensional subspace. This crate builds that representation exactly,
//! searches every operator sequence up to a query budget, evaluates the
//! closed-form bounds and compares parallel search schemes. A brute-force
//! state-vector simulator cross-checks the reduction.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the `f64`
//! aliases below are what most callers want.

pub mod bounds;
pub mod enumeration;
pub mod error;
pub mod parallel;
pub mod roots;
pub mod scalar;
pub mod search_space;
pub mod sequence;
pub mod statevec;
pub mod subspace;

pub use enumeration::{
    enumerate_max_probability, expected_iterations, is_grk_form, min_expected_over_budget,
    render_expected, render_percent, table_sweep, EnumerationResult, TableRow,
};
pub use error::{Error, Result};
pub use scalar::Real;
pub use search_space::{angles, Angles, SearchSpace, MAX_QUBITS};
pub use sequence::{OperatorKind, OperatorSequence, Run};
pub use subspace::{
    apply_sequence, block_success_probability, full_target_probability, global_grover_matrix,
    grover_full_search_probability, grover_only_block_probability, initial_state,
    local_grover_matrix, GrkEvaluator, Matrix3, State3, Subspace,
};

pub type Anglesd = Angles<f64>;
pub type Anglesf = Angles<f32>;
pub type State3d = State3<f64>;
pub type State3f = State3<f32>;
pub type Matrix3d = Matrix3<f64>;
pub type Matrix3f = Matrix3<f32>;
pub type Subspaced = Subspace<f64>;
pub type EnumerationResultd = EnumerationResult<f64>;
pub type TableRowd = TableRow<f64>;
pub type FullStated = statevec::FullState<f64>;
