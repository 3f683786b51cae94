//! Curve averages against mollified averages: the square function that
//! controls the Radon-type maximal operator, the random-sign difference
//! operator, and the Fourier decay of the signed curve measure.
//!
//! The curve average `A_k` acts spectrally: on the periodic grid a signal is
//! a trigonometric polynomial, and multiplying its spectrum by the transform
//! of the curve measure evaluates the average exactly. The mollified average
//! `B_k` is an FFT convolution with the sampled mollifier, rescaled so the
//! two operators agree on constants to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};
use crate::fit::fit_line;
use crate::quad::{integrate_oscillatory, integrate_real};
use crate::rng::SplitMix64;
use crate::signal::{DyadicBump, Grid1D, Signal2D};

fn chi(t: f64) -> f64 {
    DyadicBump::default().eta(t)
}

/// Radial profile of the mollifier before normalization: 1 on rho <= 1/2,
/// 0 past the unit circle.
fn phi_profile(rho: f64) -> f64 {
    DyadicBump::default().eta(2.0 * rho)
}

/// Line mass of chi, computed once at high resolution. Analytically it is
/// exactly 3 for every step sharpness.
pub fn chi_mass() -> f64 {
    integrate_real(chi, -2.0, 2.0, 2000, 16)
}

fn phi_profile_mass() -> f64 {
    2.0 * std::f64::consts::PI * integrate_real(|rho| phi_profile(rho) * rho, 0.0, 1.0, 2000, 16)
}

/// Normalization constant c with `integral of c * phi_profile = chi mass`.
pub fn phi_amplitude() -> f64 {
    chi_mass() / phi_profile_mass()
}

/// Fourier transform of the scale-k curve measure:
/// `int e^{-i(xi t + eta t^m)} chi_k(t) dt` by oscillatory quadrature.
pub fn curve_measure_transform(k: i32, m: u32, xi: f64, eta: f64) -> Complex64 {
    let scale = (k as f64).exp2();
    let reach = 2.0 * scale;
    let slope = xi.abs() + eta.abs() * m as f64 * reach.powi(m as i32 - 1);
    let r = integrate_oscillatory(
        |t| Complex64::from_polar(chi(t / scale) / scale, -(xi * t + eta * t.powi(m as i32))),
        -reach,
        reach,
        slope,
    );
    r.value
}

/// Fourier transform of the radial mollifier at scale k, via the polar
/// representation; the Bessel factor is evaluated by its cosine integral.
pub fn mollifier_transform(k: i32, m: u32, xi: f64, eta: f64) -> Complex64 {
    let a = (k as f64).exp2() * xi;
    let b = (m as f64 * k as f64).exp2() * eta;
    let big_r = (a * a + b * b).sqrt();
    let amp = phi_amplitude();
    let radial = |rho: f64| -> f64 {
        let z = rho * big_r;
        let panels = ((z / 3.0).ceil() as usize).clamp(8, 4000);
        let j0 = integrate_real(
            |theta| (z * theta.sin()).cos(),
            0.0,
            std::f64::consts::PI,
            panels,
            8,
        ) / std::f64::consts::PI;
        amp * phi_profile(rho) * rho * j0
    };
    let v = 2.0 * std::f64::consts::PI * integrate_real(radial, 0.0, 1.0, 200, 8);
    Complex64::new(v, 0.0)
}

/// `d-sigma-hat_k(xi, eta)`: curve transform minus mollifier transform.
pub fn sigma_transform(k: i32, m: u32, xi: f64, eta: f64) -> Complex64 {
    curve_measure_transform(k, m, xi, eta) - mollifier_transform(k, m, xi, eta)
}

fn fft2(values: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    let mut planner = FftPlanner::new();
    let fy = if forward {
        planner.plan_fft_forward(ny)
    } else {
        planner.plan_fft_inverse(ny)
    };
    for ix in 0..nx {
        fy.process(&mut values[ix * ny..(ix + 1) * ny]);
    }
    let fx = if forward {
        planner.plan_fft_forward(nx)
    } else {
        planner.plan_fft_inverse(nx)
    };
    let mut col = vec![Complex64::default(); nx];
    for iy in 0..ny {
        for ix in 0..nx {
            col[ix] = values[ix * ny + iy];
        }
        fx.process(&mut col);
        for ix in 0..nx {
            values[ix * ny + iy] = col[ix];
        }
    }
}

fn signed_freq(raw: usize, n: usize, spacing: f64) -> f64 {
    let k = if raw <= n / 2 { raw as i64 } else { raw as i64 - n as i64 };
    2.0 * std::f64::consts::PI / (n as f64 * spacing) * k as f64
}

/// Precomputed spectral multipliers for `A_k` and convolution kernels for
/// `B_k` over a scale range, on fixed grids.
pub struct AveragingPlan {
    pub grid_x: Grid1D,
    pub grid_y: Grid1D,
    pub m: u32,
    pub ks: Vec<i32>,
    curve_mult: Vec<Vec<Complex64>>,
    mollify_spec: Vec<Vec<Complex64>>,
}

impl AveragingPlan {
    pub fn new(grid_x: Grid1D, grid_y: Grid1D, m: u32, ks: &[i32]) -> Self {
        let nx = grid_x.count;
        let ny = grid_y.count;
        let curve_mult: Vec<Vec<Complex64>> = ks
            .iter()
            .map(|&k| {
                (0..nx * ny)
                    .into_par_iter()
                    .map(|idx| {
                        let xi = signed_freq(idx / ny, nx, grid_x.spacing);
                        let eta = signed_freq(idx % ny, ny, grid_y.spacing);
                        curve_measure_transform(k, m, xi, eta)
                    })
                    .collect()
            })
            .collect();
        // sampled mollifier kernels, mass-matched to the curve multiplier at
        // frequency zero so that A_k and B_k agree exactly on constants
        let cell = grid_x.spacing * grid_y.spacing;
        let mollify_spec: Vec<Vec<Complex64>> = ks
            .iter()
            .zip(&curve_mult)
            .map(|(&k, mult)| {
                let sx = (k as f64).exp2();
                let sy = (m as f64 * k as f64).exp2();
                let amp = phi_amplitude() / (sx * sy);
                let mut kernel = vec![Complex64::default(); nx * ny];
                let mut mass = 0.0;
                for ix in 0..nx {
                    let dx = if ix <= nx / 2 { ix as f64 } else { ix as f64 - nx as f64 }
                        * grid_x.spacing;
                    for iy in 0..ny {
                        let dy = if iy <= ny / 2 { iy as f64 } else { iy as f64 - ny as f64 }
                            * grid_y.spacing;
                        let rho = ((dx / sx) * (dx / sx) + (dy / sy) * (dy / sy)).sqrt();
                        let v = amp * phi_profile(rho);
                        kernel[ix * ny + iy] = Complex64::new(v, 0.0);
                        mass += v * cell;
                    }
                }
                let target = mult[0].re; // both operators applied to f = 1
                let rescale = if mass != 0.0 { target / mass } else { 0.0 };
                for z in kernel.iter_mut() {
                    *z *= rescale * cell;
                }
                fft2(&mut kernel, nx, ny, true);
                kernel
            })
            .collect();
        Self { grid_x, grid_y, m, ks: ks.to_vec(), curve_mult, mollify_spec }
    }

    fn k_slot(&self, k: i32) -> Result<usize> {
        self.ks
            .iter()
            .position(|&kk| kk == k)
            .ok_or_else(|| LabError::Config(format!("scale {k} not in the plan")))
    }

    fn check_grids(&self, f: &Signal2D) -> Result<()> {
        if f.grid_x != self.grid_x || f.grid_y != self.grid_y {
            return Err(LabError::Config("signal grids do not match the plan".into()));
        }
        Ok(())
    }

    fn apply_spectrum(&self, f: &Signal2D, mult: &[Complex64]) -> Signal2D {
        let nx = self.grid_x.count;
        let ny = self.grid_y.count;
        let mut spec = f.values.clone();
        fft2(&mut spec, nx, ny, true);
        for (s, m) in spec.iter_mut().zip(mult) {
            *s *= m;
        }
        fft2(&mut spec, nx, ny, false);
        let scale = 1.0 / (nx * ny) as f64;
        for z in spec.iter_mut() {
            *z *= scale;
        }
        Signal2D::new(self.grid_x, self.grid_y, spec).expect("grids preserved")
    }

    /// `A_k f(x,y) = int f(x-t, y-t^m) chi_k(t) dt`, exact on the grid's
    /// trigonometric polynomials.
    pub fn avg_curve(&self, f: &Signal2D, k: i32) -> Result<Signal2D> {
        self.check_grids(f)?;
        Ok(self.apply_spectrum(f, &self.curve_mult[self.k_slot(k)?]))
    }

    /// `B_k f = f * phi_k` by FFT convolution with the sampled mollifier.
    pub fn avg_mollify(&self, f: &Signal2D, k: i32) -> Result<Signal2D> {
        self.check_grids(f)?;
        Ok(self.apply_spectrum(f, &self.mollify_spec[self.k_slot(k)?]))
    }

    /// `S f = (sum_k |A_k f - B_k f|^2)^{1/2}`.
    pub fn square_function(&self, f: &Signal2D) -> Result<Signal2D> {
        self.check_grids(f)?;
        let mut acc = vec![0.0f64; f.values.len()];
        for &k in &self.ks {
            let a = self.avg_curve(f, k)?;
            let b = self.avg_mollify(f, k)?;
            for (s, (av, bv)) in acc.iter_mut().zip(a.values.iter().zip(&b.values)) {
                *s += (av - bv).norm_sqr();
            }
        }
        let values = acc.into_iter().map(|s| Complex64::new(s.sqrt(), 0.0)).collect();
        Ok(Signal2D::new(self.grid_x, self.grid_y, values).expect("grids preserved"))
    }

    /// `T f = sum_k eps_k (A_k f - B_k f)` for a sign pattern.
    pub fn signed_operator(&self, f: &Signal2D, signs: &SignPattern) -> Result<Signal2D> {
        self.check_grids(f)?;
        if signs.signs.len() != self.ks.len() {
            return Err(LabError::Config(format!(
                "sign pattern length {} != scale count {}",
                signs.signs.len(),
                self.ks.len()
            )));
        }
        let mut out = Signal2D::zeros(self.grid_x, self.grid_y);
        for (&k, &eps) in self.ks.iter().zip(&signs.signs) {
            let a = self.avg_curve(f, k)?;
            let b = self.avg_mollify(f, k)?;
            for (o, (av, bv)) in out.values.iter_mut().zip(a.values.iter().zip(&b.values)) {
                *o += (av - bv) * eps;
            }
        }
        Ok(out)
    }

    /// Verify `M_dyadic f <= sup_k B_k f + S f` pointwise for nonnegative f,
    /// with the maximal operator restricted to the dyadic radii 2^k.
    pub fn check_pointwise_domination(&self, f: &Signal2D) -> Result<DominationCheck> {
        self.check_grids(f)?;
        if f.values.iter().any(|z| z.re < -1e-12 || z.im.abs() > 1e-12) {
            return Err(LabError::Precondition(
                "domination check takes nonnegative real signals".into(),
            ));
        }
        let radii: Vec<f64> = self.ks.iter().map(|&k| (k as f64).exp2()).collect();
        let step = self.grid_x.spacing;
        let maximal = crate::operators::radon_maximal(f, self.m, &radii, step);
        let sf = self.square_function(f)?;
        let mut sup_b = vec![0.0f64; f.values.len()];
        for &k in &self.ks {
            let b = self.avg_mollify(f, k)?;
            for (s, bv) in sup_b.iter_mut().zip(&b.values) {
                *s = s.max(bv.re);
            }
        }
        let mut worst = f64::MAX;
        for i in 0..f.values.len() {
            let slack = sup_b[i] + sf.values[i].re - maximal.values[i].re;
            worst = worst.min(slack);
        }
        Ok(DominationCheck { holds: worst >= -1e-12, worst_slack: worst })
    }
}

/// Outcome of the pointwise domination check.
#[derive(Debug, Clone, Copy)]
pub struct DominationCheck {
    pub holds: bool,
    /// min over grid points of (rhs - lhs); nonnegative when the bound holds.
    pub worst_slack: f64,
}

/// A random sequence of signs, one per scale.
#[derive(Debug, Clone)]
pub struct SignPattern {
    pub signs: Vec<f64>,
    pub seed: u64,
}

impl SignPattern {
    pub fn random(len: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        Self { signs: (0..len).map(|_| rng.sign()).collect(), seed }
    }

    pub fn constant(len: usize, sign: f64) -> Self {
        assert!(sign == 1.0 || sign == -1.0);
        Self { signs: vec![sign; len], seed: 0 }
    }
}

/// Fitted data for the decay envelope
/// `|d-sigma-hat_k| <= C min(rho, rho^{-1/m})` in the dilation-adapted
/// frequency scale `rho = |(2^k xi, 2^{mk} eta)|`. In this scale the
/// constant is k-uniform; against the plain Euclidean norm the
/// low-frequency branch grows like 2^{(m-1)k}.
#[derive(Debug, Clone)]
pub struct SigmaDecayFit {
    pub constant: f64,
    /// Log-log slope of the directional max over the high-frequency tail.
    pub tail_exponent: f64,
    pub radii: Vec<f64>,
    pub max_by_radius: Vec<f64>,
}

/// Sample `d-sigma-hat_k` on rings of the adapted radius and fit the
/// envelope constant and tail exponent.
pub fn sigma_fourier_decay(k: i32, m: u32, radii: &[f64], directions: usize) -> SigmaDecayFit {
    let sx = (k as f64).exp2();
    let sy = (m as f64 * k as f64).exp2();
    let rows: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let mut worst = 0.0f64;
            for j in 0..directions {
                let angle = std::f64::consts::PI * (j as f64 + 0.08) / directions as f64;
                let xi = r * angle.cos() / sx;
                let eta = r * angle.sin() / sy;
                worst = worst.max(sigma_transform(k, m, xi, eta).norm());
            }
            worst
        })
        .collect();
    let mut constant = 0.0f64;
    for (&r, &v) in radii.iter().zip(&rows) {
        let envelope = r.min(r.powf(-1.0 / m as f64));
        constant = constant.max(v / envelope);
    }
    let half = radii.len() / 2;
    let xs: Vec<f64> = radii[half..].iter().map(|r| r.log2()).collect();
    let ys: Vec<f64> = rows[half..].iter().map(|v| v.max(1e-300).log2()).collect();
    let fit = fit_line(&xs, &ys);
    SigmaDecayFit {
        constant,
        tail_exponent: fit.slope,
        radii: radii.to_vec(),
        max_by_radius: rows,
    }
}

/// Nonnegative band-limited test signal: the squared modulus of a random
/// band-limited signal (which is again band-limited, so it coincides with
/// its trigonometric interpolant and stays nonnegative as a function).
pub fn nonneg_band_limited(
    grid_x: Grid1D,
    grid_y: Grid1D,
    frac: f64,
    rng: &mut SplitMix64,
) -> Signal2D {
    let g = crate::signal::random_band_limited_2d(grid_x, grid_y, frac / 2.0, rng);
    Signal2D::new(
        grid_x,
        grid_y,
        g.values.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect(),
    )
    .expect("grids preserved")
}
