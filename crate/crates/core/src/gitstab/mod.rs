//! Semistability of tensors under products of general linear groups.
//!
//! A point `x = [v_x]` of `ℙ((V⁽¹⁾⊗…⊗V⁽ⁿ⁾)^∨)` is unstable exactly when the
//! functional `Λ_x` takes a negative value. In a fixed basis `Λ_x` is a
//! maximum of linear forms over a Euclidean norm, minimized exactly through
//! the minimum-norm point of the form gradients; the global minimizer is
//! Kempf's destabilizing tuple, unique up to dilation.

mod algvalue;
mod forms;
mod kempf;
mod point;
mod reduce;

pub use algvalue::AlgValue;
pub use kempf::{
    big_lambda, brute_force_minimum, is_semistable, is_semistable_with, kempf_minimize,
    minimize_fixed_basis, mode_candidates, mu_invariant, oracle_applies, same_up_to_dilation,
    satisfies_lower_bound, tensor_lambda, KempfOptions, LineBundle, MinimizationResult, Stability,
};
pub use point::TensorPoint;
pub use reduce::{rr_reduce, rr_reduce_with, Block, ReducedCheck, ReducedInstance};
