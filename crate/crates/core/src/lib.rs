//! Dynamic fast Gaussian transform.
//!
//! Maintains a weighted point set `{(sⱼ, qⱼ)}` in `ℝ^d` under insertions and
//! deletions and answers `G(t) = Σⱼ qⱼ e^{−‖t−sⱼ‖²/δ}` to within an additive
//! `ε`. Sources live in lattice boxes of side `r·√(2δ)` carrying truncated
//! Hermite expansions; query boxes carry Taylor expansions translated from
//! their neighbors and are kept current incrementally.
//!
//! ```
//! use dynfgt::{DynamicFgt64, FgtConfig};
//!
//! let pts = vec![vec![0.1, 0.2], vec![0.4, 0.4]];
//! let mut fgt = DynamicFgt64::init(&pts, &[1.0, -0.5], &FgtConfig::new(2, 0.1, 1e-4)).unwrap();
//! fgt.insert(&[0.3, 0.3], 0.25).unwrap();
//! let g = fgt.kde_query(&[0.3, 0.3]).unwrap();
//! assert!(g.is_finite());
//! ```

pub mod cli;
pub mod coefficients;
pub mod dynamic;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod multiindex;
pub mod oracle;
pub mod scalar;

pub use coefficients::{compute_a, compute_c, delta_a, delta_c, eval_taylor, SourceBoxState, TargetBoxState};
pub use dynamic::{DynamicFgt, FgtConfig, UpdateStats};
pub use error::{FgtError, Result};
pub use grid::{box_center, box_of, choose_params, neighbors, BoxId, GridParams};
pub use hermite::{cramer_bound, hermite_fn_row, hermite_poly_row, multi_hermite, HermiteRow, HermiteVariant};
pub use multiindex::{enumerate_truncated, MultiIndex};
pub use oracle::{
    combined_trunc_bound, exact_gauss_transform, exact_matvec, hermite_trunc_bound, taylor_trunc_bound,
    BoundInputs,
};
pub use scalar::Real;

pub type DynamicFgt64 = DynamicFgt<f64>;
pub type DynamicFgt32 = DynamicFgt<f32>;
pub type GridParams64 = GridParams<f64>;
pub type GridParams32 = GridParams<f32>;
pub type FgtConfig64 = FgtConfig<f64>;
pub type FgtConfig32 = FgtConfig<f32>;
