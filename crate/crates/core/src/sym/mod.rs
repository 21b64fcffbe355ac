//! Infinite kappa-symmetric powers of the Bessel Frobenius.

pub mod beta;
pub mod boundary;
pub mod column;
pub mod fredholm;
pub mod kappa;
pub mod lfun;

pub use beta::{beta_matrix, check_classes, commutation_residual, required_t_degree, window, BetaMatrix, ScaleConsts, Window};
pub use boundary::{decompose_lh, eta_coefficient, kernel_dim, partial_kappa, reduce_to_r, KernelReport, SymBlock};
pub use column::alpha_sym_column;
pub use fredholm::{delta_q, det_one_minus};
pub use kappa::{binom_padic, falling_factorial, KappaValue};
pub use lfun::{
    closed_points, determinant_from_beta, determinant_run, div_dilated, identity_report, partial_sum_digits,
    tail_bound_digits, finite_sym_check, l_sym_inf, l_sym_inf_euler, l_unit_euler, l_unit_ratio, unit_power,
    ClosedPoint, DeterminantRun, IdentityReport, LSeriesPadic, LSeriesRecord, SymSetup,
};
