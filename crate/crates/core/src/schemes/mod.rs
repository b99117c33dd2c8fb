//! Concrete scheme instantiations: BGV (leveled, with modswitch), BFV
//! (single modulus, threshold 1/2), and the simulated TFHE model with its
//! ciphertext-kind discipline. Each is a data value of the abstract model;
//! the type checker and interpreters never special-case a scheme.

mod bounds;
mod build;
mod estimator;
mod msgops;

pub use bounds::{BfvBounds, BgvBounds, TfheBounds};
pub use build::{bfv_fresh_noise, bgv_fresh_noise, build_bfv, build_bgv, build_tfhe, shrink_bound_arg};
pub use estimator::{make_estimator, EstimatorOptions, EstimatorParams, Growth2, GrowthTable, NoiseEstimator};
pub use msgops::{msg_add, msg_mul, msg_scalar, msg_scale};
