//! Shared numerical kernels: quadrature, polynomials, inverse-CDF sampling,
//! counter-based random streams and the normal tail.

pub mod normal;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod sampler;

pub use normal::{normal_pdf, normal_upper_quantile, normal_upper_tail};
pub use poly::Polynomial;
pub use quadrature::{integrate, integrate_between, integrate_pieces, QuadratureSpec};
pub use rng::{derive_seed, derive_stream, RandomStream};
pub use sampler::{build_inverse_cdf_table, SamplerTable, DEFAULT_GRID_POINTS, MAX_TAIL_MASS};
