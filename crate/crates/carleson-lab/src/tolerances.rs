//! Pinned acceptance thresholds. Every decay-slope bound, residual cap and
//! exactness tolerance used by the experiment drivers and the acceptance
//! suite lives here; nothing is deferred to runtime calibration.

/// Closed determinant form against the cofactor-expansion oracle.
pub const DET_IDENTITY_REL: f64 = 1e-9;

/// Lower-bound slack `|Ax| - |det A| ||A||^{1-n} |x|`, relative to
/// `|Ax| + rhs + |x|`.
pub const LOWER_BOUND_SLACK_REL: f64 = 1e-12;

/// Derivative-matrix times coefficient vector against closed derivatives.
pub const GRADIENT_IDENTITY_REL: f64 = 1e-9;

/// `|sum_k psi_k(t) - 1|` on the sampled dyadic range.
pub const PARTITION_TOL: f64 = 1e-12;

/// `| ||f||_2 - (2 pi)^{-1/2} ||F||_2 |` relative to the signal norm.
pub const PLANCHEREL_REL: f64 = 1e-10;

/// Product kernel values outside |s| >= 4.05.
pub const KERNEL_SUPPORT_ABS: f64 = 1e-12;

/// Product-kernel decay in r: fitted log-log slope cap and residual cap.
pub const PRODUCT_SLOPE_MAX: f64 = -0.05;
pub const PRODUCT_RESIDUAL_MAX: f64 = 0.15;

/// Adjoint-composition kernel decay in ell (log2 per unit index).
pub const TTSTAR_SLOPE_MAX: f64 = -0.15;
pub const TTSTAR_RESIDUAL_MAX: f64 = 0.2;

/// Band-piece operator-norm decay and the two-route norm agreement.
pub const SELL_SLOPE_MAX: f64 = -0.05;
pub const SELL_ORACLE_REL: f64 = 1e-6;

/// Dilation, modulation and twist identities, relative to sup norms.
pub const SYMMETRY_REL: f64 = 1e-10;

/// Odd-curve second term against the truncated Carleson maximum.
pub const CARLESON_DOMINATION_SLACK: f64 = 1e-8;

/// Curve average and mollified average on constants.
pub const NORMALIZATION_ABS: f64 = 1e-10;

/// Signed curve measure transform at frequency zero.
pub const SIGMA_ZERO_ABS: f64 = 1e-10;

/// High-frequency tail exponent window around -1/m.
pub const SIGMA_TAIL_TOL: f64 = 0.1;

/// Sharp sublevel constant for the second-derivative lemma at k = 2: the
/// extremal quadratic has measure exactly `4 (rho/sigma)^{1/2}`.
pub const SUBLEVEL_CONSTANT: f64 = 4.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_are_positive_and_slopes_negative() {
        for t in [
            DET_IDENTITY_REL,
            LOWER_BOUND_SLACK_REL,
            GRADIENT_IDENTITY_REL,
            PARTITION_TOL,
            PLANCHEREL_REL,
            KERNEL_SUPPORT_ABS,
            PRODUCT_RESIDUAL_MAX,
            TTSTAR_RESIDUAL_MAX,
            SELL_ORACLE_REL,
            SYMMETRY_REL,
            CARLESON_DOMINATION_SLACK,
            NORMALIZATION_ABS,
            SIGMA_ZERO_ABS,
            SIGMA_TAIL_TOL,
            SUBLEVEL_CONSTANT,
        ] {
            assert!(t > 0.0);
        }
        assert!(PRODUCT_SLOPE_MAX < 0.0);
        assert!(TTSTAR_SLOPE_MAX < 0.0);
        assert!(SELL_SLOPE_MAX < 0.0);
    }
}
