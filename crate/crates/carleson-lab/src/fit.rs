//! Least-squares line fits for decay measurements.

/// Slope/intercept of the least-squares line through (x_i, y_i), plus the
/// root-mean-square residual of the fit.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points to fit a line");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    LineFit {
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
    }
}

/// Fit log2(y) against log2(x). Non-positive values are rejected.
pub fn fit_log2(xs: &[f64], ys: &[f64]) -> LineFit {
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    assert!(
        lx.iter().chain(ly.iter()).all(|v| v.is_finite()),
        "log-log fit needs positive finite data"
    );
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, 2.5, 4.5, 6.5];
        let f = fit_line(&xs, &ys);
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept + 1.5).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (1..=6).map(|k| (1u64 << k) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.25)).collect();
        let f = fit_log2(&xs, &ys);
        assert!((f.slope + 0.25).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }
}
