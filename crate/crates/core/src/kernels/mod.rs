//! Orthogonal polynomials, Christoffel–Darboux kernels and Fredholm
//! determinants (Nyström for continuous kernels, truncation for discrete ones).

mod cd;
mod discrete;
mod fredholm;
mod opbasis;

pub use cd::{cd_kernel, CdKernel};
pub use discrete::{discrete_fredholm_det, DiscreteKernel, IndexSet};
pub use fredholm::{bessel_kernel, nystrom_fredholm_det, sinc, FredholmValue, KernelId, KernelOperator, NYSTROM_CAP};
pub use opbasis::{op_basis, OPBasis};
