//! Uniform-grid sampled signals, Fourier transforms, and the dyadic
//! Littlewood-Paley machinery.
//!
//! Fourier convention: forward is `F(xi) = integral f(x) e^{-i xi x} dx`,
//! inverse carries the `(2 pi)^{-1}` factor, so `||f||_2 = (2pi)^{-1/2} ||F||_2`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};

/// Which axis of a two-dimensional signal an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A uniform one-dimensional grid with a power-of-two point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub origin: f64,
    pub spacing: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(origin: f64, spacing: f64, count: usize) -> Result<Self> {
        if spacing <= 0.0 {
            return Err(LabError::Config(format!("spacing must be positive: {spacing}")));
        }
        if count < 2 || !count.is_power_of_two() {
            return Err(LabError::BadSize(count));
        }
        Ok(Self { origin, spacing, count })
    }

    /// Symmetric grid on [-half_extent, half_extent).
    pub fn symmetric(half_extent: f64, count: usize) -> Result<Self> {
        Self::new(-half_extent, 2.0 * half_extent / count as f64, count)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn extent(&self) -> f64 {
        self.spacing * self.count as f64
    }

    /// Largest representable angular frequency, pi / spacing.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing
    }

    /// The dual frequency grid in fftshift order (lowest frequency first).
    pub fn dual(&self) -> Grid1D {
        let dxi = 2.0 * std::f64::consts::PI / self.extent();
        Grid1D {
            origin: -(self.count as f64 / 2.0) * dxi,
            spacing: dxi,
            count: self.count,
        }
    }

    /// Fractional index of a physical coordinate, wrapped periodically.
    pub fn wrapped_index(&self, x: f64) -> f64 {
        let idx = (x - self.origin) / self.spacing;
        idx.rem_euclid(self.count as f64)
    }
}

/// A complex signal sampled on a [`Grid1D`].
#[derive(Debug, Clone)]
pub struct Signal1D {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    /// Set when a projection touched bands outside the representable range.
    pub band_warning: bool,
}

impl Signal1D {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(LabError::Config(format!(
                "value count {} does not match grid count {}",
                values.len(),
                grid.count
            )));
        }
        Ok(Self { grid, values, band_warning: false })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.count], band_warning: false }
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid1D, mut f: F) -> Self {
        let values = (0..grid.count).map(|i| f(grid.point(i))).collect();
        Self { grid, values, band_warning: false }
    }

    /// Discrete L2 norm including the grid spacing.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Periodic linear interpolation at a physical coordinate.
    pub fn interp(&self, x: f64) -> Complex64 {
        let idx = self.grid.wrapped_index(x);
        let i0 = idx.floor() as usize % self.grid.count;
        let frac = idx - idx.floor();
        if frac == 0.0 {
            return self.values[i0];
        }
        let i1 = (i0 + 1) % self.grid.count;
        self.values[i0] * (1.0 - frac) + self.values[i1] * frac
    }

    /// True when spectral mass above 0.8 of the Nyquist frequency is
    /// negligible, the admission rule for band-limited test inputs.
    pub fn aliasing_safe(&self) -> bool {
        let spec = match fourier_transform(self) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let cutoff = 0.8 * self.grid.nyquist();
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (i, z) in spec.values.iter().enumerate() {
            let xi = spec.grid.point(i);
            if xi.abs() <= cutoff {
                inside += z.norm_sqr();
            } else {
                outside += z.norm_sqr();
            }
        }
        outside <= 1e-12 * (inside + outside).max(1e-300)
    }
}

/// A complex signal on a 2D grid, stored x-major: `values[ix * ny + iy]`.
#[derive(Debug, Clone)]
pub struct Signal2D {
    pub grid_x: Grid1D,
    pub grid_y: Grid1D,
    pub values: Vec<Complex64>,
    pub band_warning: bool,
}

impl Signal2D {
    pub fn new(grid_x: Grid1D, grid_y: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_x.count * grid_y.count {
            return Err(LabError::Config(format!(
                "value count {} does not match {}x{} grid",
                values.len(),
                grid_x.count,
                grid_y.count
            )));
        }
        Ok(Self { grid_x, grid_y, values, band_warning: false })
    }

    pub fn zeros(grid_x: Grid1D, grid_y: Grid1D) -> Self {
        Self {
            grid_x,
            grid_y,
            values: vec![Complex64::default(); grid_x.count * grid_y.count],
            band_warning: false,
        }
    }

    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(grid_x: Grid1D, grid_y: Grid1D, mut f: F) -> Self {
        let mut values = Vec::with_capacity(grid_x.count * grid_y.count);
        for ix in 0..grid_x.count {
            let x = grid_x.point(ix);
            for iy in 0..grid_y.count {
                values.push(f(x, grid_y.point(iy)));
            }
        }
        Self { grid_x, grid_y, values, band_warning: false }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.grid_y.count + iy]
    }

    #[inline]
    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut Complex64 {
        &mut self.values[ix * self.grid_y.count + iy]
    }

    pub fn l2_norm(&self) -> f64 {
        let cell = self.grid_x.spacing * self.grid_y.spacing;
        (cell * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Periodic bilinear interpolation. Exact (weights 1 and 0) whenever the
    /// point falls on a grid node, which the symmetry experiments arrange.
    pub fn interp(&self, x: f64, y: f64) -> Complex64 {
        let nx = self.grid_x.count;
        let ny = self.grid_y.count;
        let fx = self.grid_x.wrapped_index(x);
        let fy = self.grid_y.wrapped_index(y);
        let ix0 = fx.floor() as usize % nx;
        let iy0 = fy.floor() as usize % ny;
        let ax = fx - fx.floor();
        let ay = fy - fy.floor();
        if ax == 0.0 && ay == 0.0 {
            return self.at(ix0, iy0);
        }
        let ix1 = (ix0 + 1) % nx;
        let iy1 = (iy0 + 1) % ny;
        self.at(ix0, iy0) * ((1.0 - ax) * (1.0 - ay))
            + self.at(ix1, iy0) * (ax * (1.0 - ay))
            + self.at(ix0, iy1) * ((1.0 - ax) * ay)
            + self.at(ix1, iy1) * (ax * ay)
    }

    pub fn line_x(&self, iy: usize) -> Vec<Complex64> {
        (0..self.grid_x.count).map(|ix| self.at(ix, iy)).collect()
    }

    pub fn line_y(&self, ix: usize) -> &[Complex64] {
        let ny = self.grid_y.count;
        &self.values[ix * ny..(ix + 1) * ny]
    }
}

fn fft_in_place(values: &mut [Complex64], forward: bool) {
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(values.len())
    } else {
        planner.plan_fft_inverse(values.len())
    };
    fft.process(values);
}

/// Forward transform: `F(xi) = spacing * sum_j f(x_j) e^{-i xi x_j}`, returned
/// on the fftshifted dual grid.
pub fn fourier_transform(f: &Signal1D) -> Result<Signal1D> {
    let n = f.grid.count;
    if !n.is_power_of_two() || n < 2 {
        return Err(LabError::BadSize(n));
    }
    let mut buf = f.values.clone();
    fft_in_place(&mut buf, true);
    let dual = f.grid.dual();
    let mut out = vec![Complex64::default(); n];
    for (q, slot) in out.iter_mut().enumerate() {
        let kf = q as i64 - (n / 2) as i64; // signed frequency index
        let raw = kf.rem_euclid(n as i64) as usize;
        let xi = dual.point(q);
        let phase = Complex64::from_polar(1.0, -xi * f.grid.origin);
        *slot = buf[raw] * phase * f.grid.spacing;
    }
    Signal1D::new(dual, out)
}

/// Inverse transform back onto `spatial`: `f(x) = (2pi)^{-1} * sum_q F(xi_q) e^{i x xi_q} * dxi`.
pub fn inverse_fourier_transform(spectrum: &Signal1D, spatial: &Grid1D) -> Result<Signal1D> {
    let n = spectrum.grid.count;
    if spatial.count != n {
        return Err(LabError::Config(format!(
            "spatial count {} != spectrum count {}",
            spatial.count, n
        )));
    }
    let expected_dxi = 2.0 * std::f64::consts::PI / spatial.extent();
    if (spectrum.grid.spacing - expected_dxi).abs() > 1e-9 * expected_dxi {
        return Err(LabError::Config(
            "spectrum grid is not dual to the requested spatial grid".into(),
        ));
    }
    // Undo the origin phase and the fftshift, then run an inverse DFT.
    let mut buf = vec![Complex64::default(); n];
    for q in 0..n {
        let kf = q as i64 - (n / 2) as i64;
        let raw = kf.rem_euclid(n as i64) as usize;
        let xi = spectrum.grid.point(q);
        let phase = Complex64::from_polar(1.0, xi * spatial.origin);
        buf[raw] = spectrum.values[q] * phase;
    }
    fft_in_place(&mut buf, false);
    let scale = spectrum.grid.spacing / (2.0 * std::f64::consts::PI);
    for z in buf.iter_mut() {
        *z *= scale;
    }
    Signal1D::new(*spatial, buf)
}

/// The fixed smooth dyadic bump psi with `supp psi = {1/2 <= |t| <= 2}`,
/// built from the step `s(x) = theta(x) / (theta(x) + theta(1-x))` with
/// `theta(x) = exp(-sharpness/x)` for positive x. The construction telescopes:
/// `sum_k psi(2^-k t) = 1` for every nonzero t.
///
/// The default sharpness 1/2 is the lab's fixed choice of psi. Support,
/// range and the partition of unity are exact for every sharpness; only
/// measured constants (never decay slopes' signs) depend on it.
#[derive(Debug, Clone, Copy)]
pub struct DyadicBump {
    pub transition_sharpness: f64,
}

impl Default for DyadicBump {
    fn default() -> Self {
        Self { transition_sharpness: 0.5 }
    }
}

impl DyadicBump {
    pub fn new(transition_sharpness: f64) -> Self {
        assert!(transition_sharpness > 0.0);
        Self { transition_sharpness }
    }

    fn theta(&self, x: f64) -> f64 {
        if x > 0.0 {
            (-self.transition_sharpness / x).exp()
        } else {
            0.0
        }
    }

    /// Smooth step: 0 for x <= 0, 1 for x >= 1.
    pub fn smooth_step(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            let a = self.theta(x);
            a / (a + self.theta(1.0 - x))
        }
    }

    /// Plateau cutoff: 1 on |t| <= 1, 0 on |t| >= 2, smooth in between.
    pub fn eta(&self, t: f64) -> f64 {
        self.smooth_step(2.0 - t.abs())
    }

    /// psi(t) = eta(t) - eta(2t).
    pub fn value(&self, t: f64) -> f64 {
        self.eta(t) - self.eta(2.0 * t)
    }

    /// psi_k(t) = psi(2^{-k} t), supported on 2^{k-1} <= |t| <= 2^{k+1}.
    pub fn value_at_scale(&self, t: f64, k: i32) -> f64 {
        self.value((-k as f64).exp2() * t)
    }

    /// One-sided smooth bump supported exactly on [1, 2], peaking at 3/2.
    /// Used by the scaled oscillatory kernels, which want support in [1, 2].
    pub fn one_sided(&self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            0.0
        } else {
            self.smooth_step(2.0 * (t - 1.0)) * self.smooth_step(2.0 * (2.0 - t))
        }
    }
}

/// psi_k(t), with the lab's default bump.
pub fn bump_value(t: f64, k: i32) -> f64 {
    DyadicBump::default().value_at_scale(t, k)
}

fn apply_multiplier_1d(f: &Signal1D, mult: impl Fn(f64) -> f64) -> Result<Signal1D> {
    let spec = fourier_transform(f)?;
    let mut scaled = spec.clone();
    for (q, z) in scaled.values.iter_mut().enumerate() {
        *z *= mult(scaled.grid.point(q));
    }
    inverse_fourier_transform(&scaled, &f.grid)
}

/// Littlewood-Paley projection of a 1D signal onto the dyadic band
/// `2^{k-1} <= |xi| <= 2^{k+1}`.
pub fn lp_project_1d(f: &Signal1D, bump: &DyadicBump, k: i32) -> Result<Signal1D> {
    let mut out = apply_multiplier_1d(f, |xi| bump.value_at_scale(xi, k))?;
    out.band_warning = (k as f64 + 1.0).exp2() > f.grid.nyquist();
    Ok(out)
}

fn fft_axis(f: &mut Signal2D, axis: Axis, forward: bool) {
    let nx = f.grid_x.count;
    let ny = f.grid_y.count;
    let mut planner = FftPlanner::new();
    match axis {
        Axis::Y => {
            let fft = if forward {
                planner.plan_fft_forward(ny)
            } else {
                planner.plan_fft_inverse(ny)
            };
            for ix in 0..nx {
                fft.process(&mut f.values[ix * ny..(ix + 1) * ny]);
            }
        }
        Axis::X => {
            let fft = if forward {
                planner.plan_fft_forward(nx)
            } else {
                planner.plan_fft_inverse(nx)
            };
            let mut col = vec![Complex64::default(); nx];
            for iy in 0..ny {
                for ix in 0..nx {
                    col[ix] = f.values[ix * ny + iy];
                }
                fft.process(&mut col);
                for ix in 0..nx {
                    f.values[ix * ny + iy] = col[ix];
                }
            }
        }
    }
}

/// Apply a frequency multiplier along one axis of a 2D signal.
/// The multiplier sees the signed angular frequency for that axis.
pub fn apply_axis_multiplier(
    f: &Signal2D,
    axis: Axis,
    mult: impl Fn(f64) -> Complex64,
) -> Signal2D {
    let mut work = f.clone();
    fft_axis(&mut work, axis, true);
    let (n, grid) = match axis {
        Axis::X => (f.grid_x.count, f.grid_x),
        Axis::Y => (f.grid_y.count, f.grid_y),
    };
    let dxi = 2.0 * std::f64::consts::PI / grid.extent();
    let factors: Vec<Complex64> = (0..n)
        .map(|raw| {
            let kf = if raw <= n / 2 { raw as i64 } else { raw as i64 - n as i64 };
            mult(kf as f64 * dxi)
        })
        .collect();
    let ny = f.grid_y.count;
    match axis {
        Axis::X => {
            for ix in 0..f.grid_x.count {
                let c = factors[ix];
                for iy in 0..ny {
                    work.values[ix * ny + iy] *= c;
                }
            }
        }
        Axis::Y => {
            for ix in 0..f.grid_x.count {
                for (iy, c) in factors.iter().enumerate() {
                    work.values[ix * ny + iy] *= c;
                }
            }
        }
    }
    fft_axis(&mut work, axis, false);
    let scale = 1.0 / n as f64;
    for z in work.values.iter_mut() {
        *z *= scale;
    }
    work
}

/// Littlewood-Paley projection along the chosen axis of a 2D signal.
pub fn lp_project_2d(f: &Signal2D, bump: &DyadicBump, k: i32, axis: Axis) -> Signal2D {
    let mut out = apply_axis_multiplier(f, axis, |xi| {
        Complex64::new(bump.value_at_scale(xi, k), 0.0)
    });
    let grid = match axis {
        Axis::X => f.grid_x,
        Axis::Y => f.grid_y,
    };
    out.band_warning = (k as f64 + 1.0).exp2() > grid.nyquist();
    out
}

/// Random 1D signal band-limited to |xi| <= frac * nyquist, unit-normalized.
pub fn random_band_limited_1d(grid: Grid1D, frac: f64, rng: &mut crate::rng::SplitMix64) -> Signal1D {
    let dual = grid.dual();
    let cutoff = frac * grid.nyquist();
    let mut spec = Signal1D::zeros(dual);
    for q in 0..dual.count {
        let xi = dual.point(q);
        if xi.abs() <= cutoff && xi.abs() > 0.0 {
            spec.values[q] = Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
    }
    let mut out = inverse_fourier_transform(&spec, &grid).expect("dual grids match");
    let n = out.l2_norm();
    if n > 0.0 {
        for z in out.values.iter_mut() {
            *z /= n;
        }
    }
    out
}

/// Random 2D signal band-limited to |xi| <= frac * nyquist on both axes.
pub fn random_band_limited_2d(
    grid_x: Grid1D,
    grid_y: Grid1D,
    frac: f64,
    rng: &mut crate::rng::SplitMix64,
) -> Signal2D {
    let nx = grid_x.count;
    let ny = grid_y.count;
    let dxi_x = 2.0 * std::f64::consts::PI / grid_x.extent();
    let dxi_y = 2.0 * std::f64::consts::PI / grid_y.extent();
    let kx_max = ((frac * grid_x.nyquist()) / dxi_x).floor() as i64;
    let ky_max = ((frac * grid_y.nyquist()) / dxi_y).floor() as i64;
    let mut spec = Signal2D::zeros(grid_x, grid_y);
    for ix in 0..nx {
        let kx = if ix <= nx / 2 { ix as i64 } else { ix as i64 - nx as i64 };
        for iy in 0..ny {
            let ky = if iy <= ny / 2 { iy as i64 } else { iy as i64 - ny as i64 };
            if kx.abs() <= kx_max && ky.abs() <= ky_max {
                spec.values[ix * ny + iy] =
                    Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            }
        }
    }
    fft_axis(&mut spec, Axis::X, false);
    fft_axis(&mut spec, Axis::Y, false);
    let scale = 1.0 / (nx * ny) as f64;
    for z in spec.values.iter_mut() {
        *z *= scale;
    }
    let n = spec.sup_norm();
    if n > 0.0 {
        for z in spec.values.iter_mut() {
            *z /= n;
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid1D) -> Signal1D {
        Signal1D::from_fn(grid, |x| Complex64::new((-x * x / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_pair_closed_form() {
        // e^{-x^2/2} maps to sqrt(2 pi) e^{-xi^2/2} under this convention.
        let grid = Grid1D::symmetric(20.0, 1 << 12).unwrap();
        let f = gaussian(grid);
        let spec = fourier_transform(&f).unwrap();
        let mut max_err = 0.0f64;
        for q in 0..spec.grid.count {
            let xi = spec.grid.point(q);
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-xi * xi / 2.0).exp();
            max_err = max_err.max((spec.values[q] - exact).norm());
        }
        assert!(max_err <= 1e-8, "max abs error {max_err}");
    }

    #[test]
    fn gaussian_matches_riemann_sum_oracle() {
        // Independent oracle: direct Riemann-sum quadrature of the defining integral.
        let grid = Grid1D::symmetric(20.0, 1 << 12).unwrap();
        let f = gaussian(grid);
        let spec = fourier_transform(&f).unwrap();
        for &xi in &[-3.0f64, -0.7, 0.0, 1.1, 2.9] {
            let mut acc = Complex64::default();
            for i in 0..grid.count {
                let x = grid.point(i);
                acc += f.values[i] * Complex64::from_polar(1.0, -xi * x);
            }
            acc *= grid.spacing;
            // nearest dual grid point
            let q = ((xi - spec.grid.origin) / spec.grid.spacing).round() as usize;
            let xi_q = spec.grid.point(q);
            let mut oracle = Complex64::default();
            for i in 0..grid.count {
                let x = grid.point(i);
                oracle += f.values[i] * Complex64::from_polar(1.0, -xi_q * x);
            }
            oracle *= grid.spacing;
            assert!((spec.values[q] - oracle).norm() < 1e-10);
            let _ = acc;
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let grid = Grid1D::symmetric(5.0, 64).unwrap();
        let z = Signal1D::zeros(grid);
        let spec = fourier_transform(&z).unwrap();
        assert!(spec.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn roundtrip_and_plancherel() {
        let grid = Grid1D::symmetric(10.0, 1 << 10).unwrap();
        let mut rng = crate::rng::SplitMix64::new(99);
        let f = Signal1D::from_fn(grid, |_| {
            Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        });
        let spec = fourier_transform(&f).unwrap();
        let back = inverse_fourier_transform(&spec, &grid).unwrap();
        let mut max_err = 0.0f64;
        for (a, b) in f.values.iter().zip(&back.values) {
            max_err = max_err.max((a - b).norm());
        }
        assert!(max_err < 1e-12, "roundtrip error {max_err}");

        let lhs = f.l2_norm();
        let rhs = spec.l2_norm() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs);
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(Grid1D::new(0.0, 0.1, 100).is_err());
        assert!(Grid1D::new(0.0, 0.1, 1).is_err());
    }

    #[test]
    fn bump_support_and_peak() {
        let b = DyadicBump::default();
        assert_eq!(b.value_at_scale(0.3, 0), 0.0);
        assert_eq!(b.value_at_scale(-0.3, 0), 0.0);
        assert_eq!(b.value_at_scale(2.5, 0), 0.0);
        assert_eq!(b.value_at_scale(1.0, 0), 1.0);
        for t in [0.6, 0.9, 1.3, 1.9] {
            let v = b.value_at_scale(t, 0);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn partition_of_unity_at_a_point() {
        let t = 0.77;
        let total: f64 = (-30..=30).map(|k| bump_value(t, k)).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn one_sided_bump_support() {
        let b = DyadicBump::default();
        assert_eq!(b.one_sided(0.99), 0.0);
        assert_eq!(b.one_sided(2.01), 0.0);
        assert!(b.one_sided(1.5) > 0.99);
        assert!(b.one_sided(1.2) > 0.0);
    }

    #[test]
    fn lp_band_pass_and_reject() {
        let grid = Grid1D::symmetric(40.0, 1 << 12).unwrap();
        let bump = DyadicBump::default();
        // windowed e^{i 1.3 x}: adjacent projections reassemble it. The window
        // width trades boundary decay against spectral concentration; sigma = 6
        // keeps both leakages below 1e-9.
        let f = Signal1D::from_fn(grid, |x| {
            Complex64::from_polar((-x * x / 72.0).exp(), 1.3 * x)
        });
        let mut sum = Signal1D::zeros(grid);
        for k in [-1, 0, 1] {
            let p = lp_project_1d(&f, &bump, k).unwrap();
            for (s, v) in sum.values.iter_mut().zip(&p.values) {
                *s += v;
            }
        }
        let mut max_err = 0.0f64;
        for (a, b) in f.values.iter().zip(&sum.values) {
            max_err = max_err.max((a - b).norm());
        }
        assert!(max_err <= 1e-6 * f.sup_norm(), "reassembly error {max_err}");

        // far-away band content is annihilated
        let g = Signal1D::from_fn(grid, |x| {
            Complex64::from_polar((-x * x / 72.0).exp(), 100.0 * x)
        });
        let p0 = lp_project_1d(&g, &bump, 0).unwrap();
        assert!(p0.sup_norm() <= 1e-8);
    }

    #[test]
    fn lp_projections_telescope() {
        let grid = Grid1D::symmetric(40.0, 1 << 12).unwrap();
        let bump = DyadicBump::default();
        let mut rng = crate::rng::SplitMix64::new(3);
        let f = random_band_limited_1d(grid, 0.5, &mut rng);
        let mut sum = Signal1D::zeros(grid);
        for k in -20..=10 {
            let p = lp_project_1d(&f, &bump, k).unwrap();
            for (s, v) in sum.values.iter_mut().zip(&p.values) {
                *s += v;
            }
        }
        // The k-range covers every occupied band except the DC component,
        // which the band-limited generator leaves empty.
        let mut max_err = 0.0f64;
        for (a, b) in f.values.iter().zip(&sum.values) {
            max_err = max_err.max((a - b).norm());
        }
        assert!(max_err <= 1e-8 * f.l2_norm().max(1.0), "telescope error {max_err}");
    }

    #[test]
    fn distant_projections_compose_to_zero() {
        let grid = Grid1D::symmetric(40.0, 1 << 11).unwrap();
        let bump = DyadicBump::default();
        let mut rng = crate::rng::SplitMix64::new(4);
        let f = random_band_limited_1d(grid, 0.5, &mut rng);
        let p0 = lp_project_1d(&f, &bump, 0).unwrap();
        let p0p3 = lp_project_1d(&p0, &bump, 3).unwrap();
        assert!(p0p3.sup_norm() <= 1e-12);
    }

    #[test]
    fn lp_commutes_with_grid_translation() {
        let grid = Grid1D::symmetric(20.0, 1 << 10).unwrap();
        let bump = DyadicBump::default();
        let mut rng = crate::rng::SplitMix64::new(5);
        let f = random_band_limited_1d(grid, 0.5, &mut rng);
        let shift = 7usize;
        // translate by whole cells (periodic), then project
        let mut tf = Signal1D::zeros(grid);
        for i in 0..grid.count {
            tf.values[i] = f.values[(i + grid.count - shift) % grid.count];
        }
        let ptf = lp_project_1d(&tf, &bump, 1).unwrap();
        let pf = lp_project_1d(&f, &bump, 1).unwrap();
        let mut max_err = 0.0f64;
        for i in 0..grid.count {
            let moved = pf.values[(i + grid.count - shift) % grid.count];
            max_err = max_err.max((ptf.values[i] - moved).norm());
        }
        assert!(max_err < 1e-12);
    }

    #[test]
    fn band_warning_flag() {
        let grid = Grid1D::symmetric(4.0, 64).unwrap();
        let f = Signal1D::from_fn(grid, |x| Complex64::new((-x * x).exp(), 0.0));
        // nyquist = pi/spacing = pi*8 ~ 25; band top 2^{k+1} beyond it warns
        let high = lp_project_1d(&f, &DyadicBump::default(), 6).unwrap();
        assert!(high.band_warning);
        let low = lp_project_1d(&f, &DyadicBump::default(), 2).unwrap();
        assert!(!low.band_warning);
    }
}
