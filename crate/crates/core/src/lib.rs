//! Numerical ranges, numerical radii, numerical indices and tensor norms of
//! finite-dimensional normed spaces.

mod atoms;
pub mod config;
pub mod error;
pub mod ideals;
pub mod index;
pub mod linalg;
pub mod lp;
pub mod operator;
pub mod optim;
pub mod polytope;
pub mod range;
pub mod scalar;
pub mod slices;
pub mod space;
pub mod tensor;

pub use config::{Config, DEFAULT_SEED};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use operator::{adjoint, compose, op_norm, operator_space, OpNorm, Operator};
pub use scalar::{Field, Rat, RatVec, C64};
pub use space::{dual_norm, dual_space, eval_norm, extreme_points, norming_functionals, Exponent, Functional, NormKind, NormedSpace};
pub use tensor::{eps_norm, nuclear_norm_operator, pi_norm, tensor_lift, tensor_space, EpsNorm, PiNorm, TensorElement, TensorKind};
pub use ideals::{embed_postcompose, embed_precompose, index_of, verify_suite, Bound, InequalityReport, Verdict};
pub use index::{index_upper_certificate, numerical_index_estimate, numerical_index_exact, IndexCertificate, IndexMethod};
pub use range::{daugavet_defect, numerical_radius, numerical_radius_exact, numerical_range_sample, v_delta, DaugavetReport, DeltaValue, RadiusResult, StatePair};
pub use slices::{contains_in_conv, determining_falsifier, slice, strongly_exposed_check, Containment, DeterminingVerdict, Separation, SliceSpec};
