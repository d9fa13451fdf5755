//! Dense complex linear algebra for multi-qubit density matrices.
//!
//! Qubit `q` is bit `q` of a computational-basis index, so qubit 0 is the
//! rightmost tensor factor.

mod expm;
mod haar;
mod mat2;
mod matrix;
mod pauli;
pub(crate) mod state;

pub use expm::{hermitian_eigen, unitary_from_hermitian_generator, HermitianEigen};
pub use haar::{haar_moment_first, haar_moment_second, sample_haar_su2, HaarRotationParams};
pub use mat2::Mat2;
pub use matrix::{kron, ComplexMatrix};
pub use pauli::{PauliAxis, ProductOperator};
pub use state::{apply_single_qubit_gate, partial_trace, DensityMatrix};

/// Largest register the dense representation accepts (dimension 4096).
pub const MAX_QUBITS: usize = 12;

/// Tolerance used when checking that a matrix is unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Tolerance used when checking that a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
