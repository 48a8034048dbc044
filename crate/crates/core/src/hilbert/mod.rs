//! Dense linear algebra over registers of at most three spin-1/2 qubits.

pub mod density;
pub mod entanglement;
pub mod measure;
pub mod operator;
pub mod state;

pub type C64 = num_complex::Complex64;

pub use density::{hermitian_eigen, hermitian_eigenvalues, partial_trace, von_neumann_entropy, DensityMatrix};
pub use entanglement::{
    binary_entropy, concurrence, entanglement_entropy, entropy_from_concurrence, schmidt_coefficients,
};
pub use measure::{collapse, project, Axis, Outcome};
pub use operator::{CMatrix, SpinOperator};
pub use state::{apply, make_state, tensor, Party, SpinState};
