#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::needless_range_loop)]

//! Numerical and exact tools for ancient solutions of the heat equation:
//! spectral synthesis, complete monotonicity, Laplace inversion of the
//! cumulative spectral function, exact caloric polynomials, parabolic
//! geometry and finite-difference checks.

pub mod ancient_eval;
pub mod caloric_poly;
pub mod error;
pub mod fd_engine;
pub mod field;
pub mod laplace_bernstein;
pub mod parabolic_geometry;
pub mod quadrature;
pub mod spectral_measure;

pub use ancient_eval::{check_cm, heat_residual, li_yau_quantity, AncientSolution, CmReport};
pub use caloric_poly::{caloric_extend, decompose, dim_hq, dim_hq_oracle, CaloricPolynomial, Monomial, MultiPoly};
pub use error::{Error, Result};
pub use fd_engine::{forward_solve, Grid, GridSpec};
pub use field::{FnField, PositiveSolution, SpaceTimeField};
pub use laplace_bernstein::{
    laplace_forward, recover_h, verify_h_identity, CumulativeSpectral, InversionConfig, InversionMethod,
};
pub use parabolic_geometry::{dp, gram, Cube, GramMatrix, Paraboloid, QuadSpec};
pub use spectral_measure::{SpectralAtom, SpectralMeasure, WidderAtom};
