//! Oscillatory convolution kernels and their measured decay.
//!
//! Two families: the product kernels `(Phi^nu_h * ~Phi^mu_1)(s)` of the
//! two-monomial phases with coefficients on the annulus of scale r, and the
//! rescaled adjoint-composition kernels `rho K(rho s)` whose phase mixes a
//! linear part with a fractional monomial of weight ~ 2^ell. Both are
//! evaluated by oscillation-adapted panel quadrature, and profiled against
//! their sweep variable to fit empirical decay slopes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::fit_line;
use crate::phase::PhaseContext;
use crate::quad::{integrate_oscillatory, integrate_oscillatory_piecewise};
use crate::signal::DyadicBump;

/// Transition sharpness of the one-sided bump on [1, 2] used by the scaled
/// kernels. This bump is a separate fixed choice from the dyadic
/// Littlewood-Paley psi; the gentle transition keeps the amplitude landscape
/// of the product kernels nearly flat across their support.
pub const ONE_SIDED_SHARPNESS: f64 = 0.02;

fn one_sided_bump() -> DyadicBump {
    DyadicBump::new(ONE_SIDED_SHARPNESS)
}

/// A single kernel evaluation with its quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct KernelSample {
    pub s: f64,
    pub value: Complex64,
    pub params: PhaseContext,
    pub quadrature_error_estimate: f64,
    /// Error estimate within 1e-8 * max(1, |value|).
    pub reliable: bool,
}

/// A parameter sweep of max-abs kernel values with a fitted decay line.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    /// Name of the sweep variable ("r" or "ell").
    pub sweep_name: &'static str,
    pub sweep: Vec<f64>,
    pub max_abs: Vec<f64>,
    /// Slope of log2(max_abs) against log2(r), resp. against ell.
    pub slope: f64,
    pub constant: f64,
    pub residual: f64,
    pub reliable: bool,
}

fn reliability(value: Complex64, err: f64) -> bool {
    err <= 1e-8 * value.norm().max(1.0)
}

/// `Phi_a^lambda(t) = a^{-1} Phi^lambda(t/a)` with
/// `Phi^lambda(t) = e^{i lambda1 t^alpha + i lambda2 t^beta} psi(t)/t` for
/// t > 0 and zero otherwise; psi is the one-sided bump on [1, 2].
pub fn phi_lambda(t: f64, lam: (f64, f64), alpha: f64, beta: f64, a: f64) -> Result<Complex64> {
    if a <= 0.0 {
        return Err(LabError::Domain(format!("dilation parameter must be positive: {a}")));
    }
    let u = t / a;
    if u <= 0.0 {
        return Ok(Complex64::default());
    }
    let amp = one_sided_bump().one_sided(u);
    if amp == 0.0 {
        return Ok(Complex64::default());
    }
    let phase = lam.0 * u.powf(alpha) + lam.1 * u.powf(beta);
    Ok(Complex64::from_polar(amp / u, phase) / a)
}

/// Support interval in t of `psi(t) psi(h t - s)` with psi supported on [1, 2].
fn product_support(h: f64, s: f64) -> Option<(f64, f64)> {
    let lo = 1.0f64.max((1.0 + s) / h);
    let hi = 2.0f64.min((2.0 + s) / h);
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Evaluate `(Phi^nu_h * ~Phi^mu_1)(s) = int e^{iQ(t,s)} psi(t)/t psi(ht-s)/(ht-s) dt`
/// at s = ctx.s, by oscillation-adapted panel quadrature.
pub fn kernel_product(ctx: &PhaseContext) -> Result<KernelSample> {
    if !(ctx.h > 0.0 && ctx.h <= 1.0) {
        return Err(LabError::Precondition(format!("need 0 < h <= 1, got {}", ctx.h)));
    }
    let bump = one_sided_bump();
    let support = product_support(ctx.h, ctx.s);
    let Some((lo, hi)) = support else {
        return Ok(KernelSample {
            s: ctx.s,
            value: Complex64::default(),
            params: *ctx,
            quadrature_error_estimate: 0.0,
            reliable: true,
        });
    };

    // phase slope bound for panel sizing; the floor keeps at least ~500
    // panels so the gentle bump's boundary layers stay resolved
    let mut slope = 400.0 / (hi - lo);
    for i in 0..128 {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / 128.0;
        if let Ok(d) = crate::phase::phase_q(t, ctx, 1) {
            slope = slope.max(d.abs());
        }
    }

    let integrand = |t: f64| -> Complex64 {
        let u = ctx.h * t - ctx.s;
        let amp = bump.one_sided(t) * bump.one_sided(u);
        if amp == 0.0 {
            return Complex64::default();
        }
        let q = ctx.nu.0 * t.powf(ctx.alpha) + ctx.nu.1 * t.powf(ctx.beta)
            - ctx.mu.0 * u.powf(ctx.alpha)
            - ctx.mu.1 * u.powf(ctx.beta);
        Complex64::from_polar(amp / (t * u), q)
    };
    let r = integrate_oscillatory(integrand, lo, hi, slope);
    Ok(KernelSample {
        s: ctx.s,
        value: r.value,
        params: *ctx,
        quadrature_error_estimate: r.error_estimate,
        reliable: reliability(r.value, r.error_estimate),
    })
}

/// Triangle-inequality majorant of [`kernel_product`]: the same integral with
/// the oscillation removed.
pub fn kernel_product_majorant(ctx: &PhaseContext) -> f64 {
    let bump = one_sided_bump();
    let Some((lo, hi)) = product_support(ctx.h, ctx.s) else {
        return 0.0;
    };
    let r = integrate_oscillatory(
        |t| {
            let u = ctx.h * t - ctx.s;
            Complex64::new(bump.one_sided(t) * bump.one_sided(u) / (t * u), 0.0)
        },
        lo,
        hi,
        1.0,
    );
    r.value.re
}

fn root_m(t: f64, m: u32) -> f64 {
    match m {
        1 => t,
        2 => t.sqrt(),
        3 => t.cbrt(),
        _ => t.powf(1.0 / m as f64),
    }
}

/// Evaluate the rescaled adjoint-composition kernel `rho K_{lambda1,lambda2}(rho s)`
/// at dyadic indices (k0, ell) on the curve exponent m:
///
/// `int e^{i(L1 t - L2 (t-s) + eta (t^{1/m} - (t-s)^{1/m}))}
///      psi0~(t-s)/(t-s) psi0~(t)/t dt`
///
/// with `L_i = lambda_i rho`, `rho = 2^{m(ell-k0)}`, `eta = -xi 2^{ell-k0}`,
/// and `psi0~(t) = psi(t^{1/m})` on t > 0 (the dyadic bump at unit scale).
pub fn kernel_k(ctx: &PhaseContext, k0: i32, ell: i32, m: u32, s: f64) -> Result<KernelSample> {
    if m < 2 {
        return Err(LabError::Precondition(format!("curve exponent must be >= 2, got {m}")));
    }
    if ell < 0 {
        return Err(LabError::Precondition(format!("band index must be >= 0, got {ell}")));
    }
    let e = (ell - k0) as f64;
    let rho = (m as f64 * e).exp2();
    let eta = -ctx.xi * e.exp2();
    let l1 = ctx.lambda1 * rho;
    let l2 = ctx.lambda2 * rho;
    let mut params = *ctx;
    params.eta = eta;
    params.rho = rho;
    params.s = s;

    let bump = DyadicBump::default();
    let sup_lo = (-(m as f64)).exp2();
    let sup_hi = (m as f64).exp2();
    let lo = sup_lo.max(sup_lo + s);
    let hi = sup_hi.min(sup_hi + s);
    if lo >= hi {
        return Ok(KernelSample {
            s,
            value: Complex64::default(),
            params,
            quadrature_error_estimate: 0.0,
            reliable: true,
        });
    }

    let phase = |t: f64| -> f64 {
        let u = t - s;
        l1 * t - l2 * u + eta * (root_m(t, m) - root_m(u, m))
    };
    // exact phase slope; it blows up toward the support's lower edge, which
    // the piecewise panel sizing tracks locally
    let slope = |t: f64| -> f64 {
        let u = t - s;
        if t <= 0.0 || u <= 0.0 {
            return 0.0;
        }
        l1 - l2 + eta / m as f64 * (root_m(t, m) / t - root_m(u, m) / u)
    };

    let integrand = |t: f64| -> Complex64 {
        let u = t - s;
        if t <= 0.0 || u <= 0.0 {
            return Complex64::default();
        }
        let amp = bump.value(root_m(t, m)) * bump.value(root_m(u, m));
        if amp == 0.0 {
            return Complex64::default();
        }
        Complex64::from_polar(amp / (t * u), phase(t))
    };
    let r = integrate_oscillatory_piecewise(integrand, lo, hi, slope, 24);
    Ok(KernelSample {
        s,
        value: r.value,
        params,
        quadrature_error_estimate: r.error_estimate,
        reliable: reliability(r.value, r.error_estimate),
    })
}

/// Direction on the coefficient annulus whose stationary-phase ridge sits
/// inside the non-exceptional |s| window for every swept r: with
/// `nu = (1.2 r, 0)` and `mu = (1.2 sqrt(kappa/(kappa-1)) r, 0)` the phase
/// derivative vanishes along `t = kappa s`, confining the ridge to
/// `s in [1/(kappa-1), 2/kappa]`. kappa = 2.3 places it in [0.77, 0.87],
/// above the moving cutoff r^{-0.1}, so the measured max tracks the clean
/// stationary-phase power law instead of the drifting cutoff.
pub const RIDGE_KAPPA: f64 = 2.3;

/// Annulus directions for the ridge design: (`nu` multiplier, `mu` multiplier).
pub fn ridge_directions() -> ((f64, f64), (f64, f64)) {
    let b1 = 1.2 * (RIDGE_KAPPA / (RIDGE_KAPPA - 1.0)).sqrt();
    ((1.2, 0.0), (b1, 0.0))
}

/// Which kernel family a decay profile sweeps.
#[derive(Debug, Clone)]
pub enum DecayKind {
    /// Product-kernel decay in the coefficient scale r, with annulus
    /// directions `nu = r * nu_dir`, `mu = r * mu_dir`.
    ProductR {
        alpha: f64,
        beta: f64,
        h: f64,
        nu_dir: (f64, f64),
        mu_dir: (f64, f64),
        s_samples: usize,
    },
    /// Adjoint-composition kernel decay in the band index ell, maximized over
    /// `|s| >= 2^{-ell/2}` and a small grid of linear coefficients that
    /// includes phase-stationary placements near the support's lower edge
    /// (the kernel estimate is uniform in those coefficients).
    TtstarEll { m: u32, s_samples: usize },
    /// Non-oscillatory control: all phase coefficients zero.
    Control { s_samples: usize },
}

impl DecayKind {
    /// The ridge-design product sweep used by the acceptance experiments.
    pub fn product_default(h: f64) -> Self {
        let (nu_dir, mu_dir) = ridge_directions();
        DecayKind::ProductR {
            alpha: 1.5,
            beta: 0.5,
            h,
            nu_dir,
            mu_dir,
            s_samples: 500,
        }
    }
}

/// Run a kernel over the sweep, take the max-abs over the non-exceptional
/// s-range, and fit a decay line. For `ProductR` the fit is log2 max against
/// log2 r over `|s| in [r^{-0.1}, 4]`; for `TtstarEll` it is log2 max against
/// ell.
pub fn decay_profile(kind: &DecayKind, sweep: &[f64]) -> Result<DecayProfile> {
    if sweep.len() < 4 {
        return Err(LabError::Precondition(format!(
            "sweep needs at least 4 points, got {}",
            sweep.len()
        )));
    }
    match kind {
        DecayKind::ProductR { alpha, beta, h, nu_dir, mu_dir, s_samples } => {
            let rows: Vec<(f64, bool)> = sweep
                .par_iter()
                .map(|&r| product_r_max(*alpha, *beta, *h, *nu_dir, *mu_dir, r, *s_samples))
                .collect::<Result<Vec<_>>>()?;
            let max_abs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let reliable = rows.iter().all(|r| r.1);
            let xs: Vec<f64> = sweep.iter().map(|r| r.log2()).collect();
            let ys: Vec<f64> = max_abs.iter().map(|v| v.log2()).collect();
            let fit = fit_line(&xs, &ys);
            Ok(DecayProfile {
                sweep_name: "r",
                sweep: sweep.to_vec(),
                max_abs,
                slope: fit.slope,
                constant: fit.intercept.exp2(),
                residual: fit.residual_rms,
                reliable,
            })
        }
        DecayKind::TtstarEll { m, s_samples } => {
            let rows: Vec<(f64, bool)> = sweep
                .par_iter()
                .map(|&ell| ttstar_ell_max(*m, ell as i32, *s_samples))
                .collect::<Result<Vec<_>>>()?;
            let max_abs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let reliable = rows.iter().all(|r| r.1);
            let ys: Vec<f64> = max_abs.iter().map(|v| v.log2()).collect();
            let fit = fit_line(sweep, &ys);
            Ok(DecayProfile {
                sweep_name: "ell",
                sweep: sweep.to_vec(),
                max_abs,
                slope: fit.slope,
                constant: fit.intercept.exp2(),
                residual: fit.residual_rms,
                reliable,
            })
        }
        DecayKind::Control { s_samples } => {
            let rows: Vec<(f64, bool)> = sweep
                .par_iter()
                .map(|&r| {
                    let mut best = 0.0f64;
                    let mut ok = true;
                    for i in 0..*s_samples {
                        let s = -1.0 + 2.0 * (i as f64 + 0.5) / *s_samples as f64;
                        let ctx =
                            PhaseContext::asymmetric(1.5, 0.5, (0.0, 0.0), (0.0, 0.0), 1.0, s, r);
                        let sample = kernel_product(&ctx)?;
                        best = best.max(sample.value.norm());
                        ok &= sample.reliable;
                    }
                    Ok((best, ok))
                })
                .collect::<Result<Vec<_>>>()?;
            let max_abs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let reliable = rows.iter().all(|r| r.1);
            let xs: Vec<f64> = sweep.iter().map(|r| r.log2()).collect();
            let ys: Vec<f64> = max_abs.iter().map(|v| v.log2()).collect();
            let fit = fit_line(&xs, &ys);
            Ok(DecayProfile {
                sweep_name: "r",
                sweep: sweep.to_vec(),
                max_abs,
                slope: fit.slope,
                constant: fit.intercept.exp2(),
                residual: fit.residual_rms,
                reliable,
            })
        }
    }
}

fn product_r_max(
    alpha: f64,
    beta: f64,
    h: f64,
    nu_dir: (f64, f64),
    mu_dir: (f64, f64),
    r: f64,
    s_samples: usize,
) -> Result<(f64, bool)> {
    // The kernel support lies inside |s| <= max(2 - h, 2h - 1); sampling stops
    // just past it. Linear sampling resolves the stationary ridge.
    let s_lo = r.powf(-0.1);
    let s_hi = 4.0f64.min((2.0 - h).max(2.0 * h - 1.0) + 0.02);
    let nu = (nu_dir.0 * r, nu_dir.1 * r);
    let mu = (mu_dir.0 * r, mu_dir.1 * r);
    let values: Vec<(f64, bool)> = (0..=s_samples)
        .into_par_iter()
        .map(|i| {
            let mag = s_lo + (s_hi - s_lo) * i as f64 / s_samples as f64;
            let mut best = 0.0f64;
            let mut ok = true;
            for s in [mag, -mag] {
                let ctx = PhaseContext::asymmetric(alpha, beta, nu, mu, h, s, r);
                let sample = kernel_product(&ctx)?;
                best = best.max(sample.value.norm());
                ok &= sample.reliable;
            }
            Ok((best, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .into_iter()
        .fold((0.0, true), |(b, o), (v, k)| (b.max(v), o & k)))
}

fn ttstar_ell_max(m: u32, ell: i32, s_samples: usize) -> Result<(f64, bool)> {
    // eta = 2^{ell+1} via xi = -2 at k0 = 0 (top of the frequency annulus).
    let k0 = 0;
    let xi = -2.0;
    let eta = 2.0 * (ell as f64).exp2();
    let rho = (m as f64 * ell as f64).exp2();
    let s_lo = (-(ell as f64) / 2.0).exp2();
    let mf = m as f64;
    let sup_lo = (-mf).exp2();
    let s_hi = mf.exp2() - sup_lo;
    let values: Vec<(f64, bool)> = (0..s_samples)
        .into_par_iter()
        .map(|i| {
            // quadratic concentration of samples toward the lower cutoff,
            // where the maximum lives
            let frac = (i as f64 + 0.5) / s_samples as f64;
            let mag = s_lo * (s_hi / s_lo).powf(frac * frac);
            let mut best = 0.0f64;
            let mut ok = true;
            for s in [mag, -mag] {
                // linear coefficients: zero, plus choices that put a
                // stationary point near the lower support edge where the
                // phase curvature is strongest
                for u0_mult in [0.0, 1.3, 1.6, 2.0, 2.6] {
                    let l1 = if u0_mult == 0.0 {
                        0.0
                    } else {
                        let u0 = u0_mult * sup_lo;
                        let (tv, uv) = if s >= 0.0 { (u0 + s, u0) } else { (u0, u0 - s) };
                        -eta / mf * (root_m(tv, m) / tv - root_m(uv, m) / uv)
                    };
                    let ctx = PhaseContext::symmetric(m, k0, ell, l1 / rho, 0.0, xi);
                    let sample = kernel_k(&ctx, k0, ell, m, s)?;
                    best = best.max(sample.value.norm());
                    ok &= sample.reliable;
                }
            }
            Ok((best, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .into_iter()
        .fold((0.0, true), |(b, o), (v, k)| (b.max(v), o & k)))
}
