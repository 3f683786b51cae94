//! Acceptance suite: each criterion runs at its stated size and tolerance,
//! under its stated runtime cap, and prints one pass/fail line. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use carleson_lab::kernels::{decay_profile, kernel_product, DecayKind};
use carleson_lab::linalg::{det4_cofactor, euclid_norm, mat_vec4};
use carleson_lab::operators::{
    maximal_truncated_carleson_2d, measure_sell_decay, sell_norm, sell_norm_dense,
    single_annulus_split, CurveOpConfig, SellConfig, StoppingTime, TruncationNodes,
};
use carleson_lab::phase::{
    det_identity, det_identity_matrix, gradient_coefficients, matrix_lower_bound, matrix_m,
    phase_q, vdc_bound, PhaseContext,
};
use carleson_lab::radon::{nonneg_band_limited, sigma_fourier_decay, sigma_transform, AveragingPlan};
use carleson_lab::rng::SplitMix64;
use carleson_lab::signal::{
    bump_value, fourier_transform, random_band_limited_2d, Axis, Grid1D, Signal1D, Signal2D,
};
use carleson_lab::tolerances as tol;

struct Criterion {
    name: &'static str,
    cap: Duration,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(
    name: &'static str,
    cap_secs: f64,
    body: impl FnOnce() -> (bool, String),
) -> Criterion {
    let start = Instant::now();
    let (pass, detail) = body();
    let elapsed = start.elapsed();
    Criterion {
        name,
        cap: Duration::from_secs_f64(cap_secs),
        pass,
        detail,
        elapsed,
    }
}

fn criterion_01_determinant_identity() -> (bool, String) {
    let mut rng = SplitMix64::new(1001);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut v = [0.0; 10];
        for x in v.iter_mut() {
            *x = rng.uniform(-2.0, 2.0);
        }
        let a = [v[0], v[1], v[2], v[3]];
        let b = [v[4], v[5], v[6], v[7]];
        let closed = det_identity(a, b, v[8], v[9]).value;
        let direct = det4_cofactor(&det_identity_matrix(a, b, v[8], v[9]));
        let scale = closed.abs().max(direct.abs()).max(1.0);
        worst = worst.max((closed - direct).abs() / scale);
    }
    (
        worst <= tol::DET_IDENTITY_REL,
        format!("max rel err {worst:.3e} over 1e4 draws (tol {:.0e})", tol::DET_IDENTITY_REL),
    )
}

fn criterion_02_matrix_lower_bound() -> (bool, String) {
    let mut rng = SplitMix64::new(1002);
    let mut worst = f64::MAX;
    for _ in 0..1000 {
        let a: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect();
        let x: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let check = matrix_lower_bound(&a, &x);
        let scale = (check.lhs + check.rhs + euclid_norm(&x)).max(1e-300);
        worst = worst.min(check.slack / scale);
    }
    (
        worst >= -tol::LOWER_BOUND_SLACK_REL,
        format!("worst normalized slack {worst:.3e} over 1e3 matrices"),
    )
}

fn criterion_03_gradient_identity() -> (bool, String) {
    let mut rng = SplitMix64::new(1003);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let mut ctx = PhaseContext::asymmetric(
            rng.uniform(0.2, 0.9),
            rng.uniform(1.3, 3.4),
            (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)),
            (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)),
            rng.uniform(0.2, 1.0),
            0.0,
            1.0,
        );
        let t = rng.uniform(1.0, 2.0);
        ctx.s = ctx.h * t - rng.uniform(0.3, 1.5);
        if ctx.h * t - ctx.s <= 0.1 {
            continue;
        }
        done += 1;
        let m = matrix_m(t, &ctx).unwrap();
        let v = gradient_coefficients(t, &ctx).unwrap();
        let prod = mat_vec4(&m, &v);
        for (order, p) in prod.iter().enumerate() {
            let q = phase_q(t, &ctx, order as u32 + 1).unwrap();
            worst = worst.max((p - q).abs() / q.abs().max(1e-9));
        }
    }
    (
        worst <= tol::GRADIENT_IDENTITY_REL,
        format!("max rel err {worst:.3e} over 1e3 contexts"),
    )
}

fn criterion_04_partition_and_plancherel() -> (bool, String) {
    let mut worst_part = 0.0f64;
    for i in 0..1000 {
        let frac = i as f64 / 999.0;
        let t = (36.0 * frac - 18.0).exp2();
        let total: f64 = (-30..=30).map(|k| bump_value(t, k)).sum();
        worst_part = worst_part.max((total - 1.0).abs());
    }
    let grid = Grid1D::symmetric(20.0, 1 << 12).unwrap();
    let mut rng = SplitMix64::new(1004);
    let mut worst_pl = 0.0f64;
    for _ in 0..100 {
        let f = Signal1D::from_fn(grid, |_| {
            Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        });
        let spec = fourier_transform(&f).unwrap();
        let lhs = f.l2_norm();
        let rhs = spec.l2_norm() / (2.0 * std::f64::consts::PI).sqrt();
        worst_pl = worst_pl.max((lhs - rhs).abs() / lhs);
    }
    (
        worst_part <= tol::PARTITION_TOL && worst_pl <= tol::PLANCHEREL_REL,
        format!("partition dev {worst_part:.3e}, Plancherel rel {worst_pl:.3e}"),
    )
}

fn criterion_05_van_der_corput() -> (bool, String) {
    let mut rng = SplitMix64::new(1005);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let a = rng.sign() * rng.uniform(1.0, 3.0);
        let b = a.signum() * rng.uniform(0.0, 2.0);
        let lam = 10.0 * (100.0f64).powf(i as f64 / 199.0);
        let check = vdc_bound(|t| a * t + 0.5 * b * t * t, a.abs(), b.abs(), lam, (0.0, 1.0))
            .expect("certified instance");
        worst = worst.max(check.integral.norm() / check.bound);
    }
    (
        worst <= 1.0,
        format!("max |integral|/bound {worst:.4} over 200 instances"),
    )
}

fn criterion_06_kernel_support() -> (bool, String) {
    let mut rng = SplitMix64::new(1006);
    let mut worst = 0.0f64;
    for _ in 0..60 {
        let r = (rng.uniform(4.0, 10.0)).exp2();
        let h = rng.uniform(0.2, 1.0);
        let s = rng.sign() * rng.uniform(4.05, 9.0);
        let ctx = PhaseContext::asymmetric(
            1.5,
            0.5,
            (r * rng.uniform(-1.0, 1.0), r * rng.uniform(-1.0, 1.0)),
            (r * rng.uniform(-1.0, 1.0), r * rng.uniform(-1.0, 1.0)),
            h,
            s,
            r,
        );
        worst = worst.max(kernel_product(&ctx).unwrap().value.norm());
    }
    (
        worst <= tol::KERNEL_SUPPORT_ABS,
        format!("max |kernel| outside support {worst:.3e}"),
    )
}

fn criterion_07_product_kernel_decay() -> (bool, String) {
    let sweep: Vec<f64> = (4..=10).map(|p| (p as f64).exp2()).collect();
    let profile = decay_profile(&DecayKind::product_default(1.0), &sweep).unwrap();
    let pass = profile.slope <= tol::PRODUCT_SLOPE_MAX
        && profile.residual < tol::PRODUCT_RESIDUAL_MAX
        && profile.reliable;
    (
        pass,
        format!(
            "slope {:.4} (cap {}), residual {:.4} (cap {}), reliable {}",
            profile.slope,
            tol::PRODUCT_SLOPE_MAX,
            profile.residual,
            tol::PRODUCT_RESIDUAL_MAX,
            profile.reliable
        ),
    )
}

fn criterion_08_ttstar_kernel_decay() -> (bool, String) {
    let sweep: Vec<f64> = (2..=10).map(|e| e as f64).collect();
    let mut pass = true;
    let mut details = Vec::new();
    for m in [2u32, 3] {
        let profile = decay_profile(&DecayKind::TtstarEll { m, s_samples: 64 }, &sweep).unwrap();
        let ok = profile.slope <= tol::TTSTAR_SLOPE_MAX
            && profile.residual < tol::TTSTAR_RESIDUAL_MAX
            && profile.reliable;
        pass &= ok;
        details.push(format!(
            "m={m}: slope {:.4}, residual {:.4}",
            profile.slope, profile.residual
        ));
    }
    (pass, details.join("; "))
}

fn criterion_09_band_piece_norm_decay() -> (bool, String) {
    let mut pass = true;
    let mut details = Vec::new();
    // slope of the norm decay on 256-point lines
    for (m, d) in [(2u32, 3u32), (3, 2)] {
        for axis in [Axis::Y, Axis::X] {
            let cfg = SellConfig {
                m,
                d,
                axis,
                line_points: 256,
                free_points: 64,
                distinct_values: 2,
                seed: 7,
            };
            let ells: Vec<i32> = (1..=6).collect();
            let decay = measure_sell_decay(&cfg, &ells).unwrap();
            let fit = decay.fit.expect("nondegenerate stopping time");
            let ok = fit.slope <= tol::SELL_SLOPE_MAX;
            pass &= ok;
            details.push(format!(
                "({m},{d},{}) slope {:.3}",
                if axis == Axis::Y { "y" } else { "x" },
                fit.slope
            ));
        }
    }
    // two-route norm agreement on 64-point lines
    for (m, d, axis) in [(2u32, 3u32, Axis::Y), (3, 2, Axis::X)] {
        for ell in [1, 2] {
            let cfg = SellConfig {
                m,
                d,
                axis,
                line_points: 64,
                free_points: 32,
                distinct_values: 2,
                seed: 7,
            };
            let block = sell_norm(&cfg, ell).unwrap();
            let dense = sell_norm_dense(&cfg, ell).unwrap();
            let rel = (block - dense).abs() / dense.max(1e-300);
            let ok = rel <= tol::SELL_ORACLE_REL;
            pass &= ok;
            details.push(format!("oracle ({m},{d}) ell={ell}: rel {rel:.2e}"));
        }
    }
    (pass, details.join("; "))
}

fn criterion_10_symmetry_exactness() -> (bool, String) {
    use carleson_lab::experiments::{dilation_deviation, modulation_deviation, twist_deviation};
    let dil = dilation_deviation(2, 3, 128, 20, 42);
    let mod_d1 = modulation_deviation(3, 1, 128, 20, 43);
    let mod_dm = modulation_deviation(2, 2, 128, 20, 44);
    let twist = twist_deviation(128, 20, 45);
    let worst = dil.max(mod_d1).max(mod_dm).max(twist);
    (
        worst <= tol::SYMMETRY_REL,
        format!(
            "dilation {dil:.2e}, modulation d=1 {mod_d1:.2e}, d=m {mod_dm:.2e}, twist {twist:.2e}"
        ),
    )
}

fn criterion_11_even_m_vanishing() -> (bool, String) {
    let gx = Grid1D::symmetric(4.0, 64).unwrap();
    let gy = Grid1D::symmetric(4.0, 64).unwrap();
    let mut worst = 0.0f64;
    for m in [2u32, 4] {
        let mut rng = SplitMix64::new(1100 + m as u64);
        let op = CurveOpConfig::aligned(m, m, Axis::Y, (0.0, 2.0), &gx).unwrap();
        for _ in 0..20 {
            let f = random_band_limited_2d(gx, gy, 0.4, &mut rng);
            let n_values: Vec<f64> = (0..gy.count).map(|_| rng.uniform(-4.0, 4.0)).collect();
            let st = StoppingTime::new(n_values, m);
            let split = single_annulus_split(&f, 1, &op, &st).unwrap();
            worst = worst.max(split.term_ii.sup_norm());
        }
    }
    (worst == 0.0, format!("max |term II| = {worst:e} (must be exactly 0)"))
}

fn criterion_12_odd_m_carleson_domination() -> (bool, String) {
    let gx = Grid1D::symmetric(4.0, 64).unwrap();
    let gy = Grid1D::symmetric(4.0, 64).unwrap();
    let k0 = 1;
    let mut worst_slack = f64::MAX;
    for m in [3u32, 5] {
        let mut rng = SplitMix64::new(1200 + m as u64);
        let op = CurveOpConfig::new(m, m, Axis::Y, (0.0, 2.0), 0.03125).unwrap();
        let n_choices = [-3.0, -1.0, 0.5, 2.0];
        for _ in 0..20 {
            let f = random_band_limited_2d(gx, gy, 0.4, &mut rng);
            let n_values: Vec<f64> = (0..gy.count)
                .map(|i| n_choices[i % n_choices.len()])
                .collect();
            let st = StoppingTime::new(n_values, m);
            let split = single_annulus_split(&f, k0, &op, &st).unwrap();
            // C* on the image of the same truncation grid, second variable
            let eps = (-(k0 as f64)).exp2().powi(m as i32);
            let cstar = maximal_truncated_carleson_2d(
                &f,
                Axis::Y,
                &n_choices,
                &[eps],
                TruncationNodes::CurveImage { step: op.pv_step, power: m },
            );
            for (t2, cs) in split.term_ii.values.iter().zip(&cstar.values) {
                worst_slack = worst_slack.min(cs.re + tol::CARLESON_DOMINATION_SLACK - t2.re);
            }
        }
    }
    (
        worst_slack >= 0.0,
        format!("worst slack {worst_slack:.3e} (C* + 1e-8 - term II)"),
    )
}

fn criterion_13_appendix_suite() -> (bool, String) {
    let gx = Grid1D::symmetric(8.0, 64).unwrap();
    let gy = Grid1D::symmetric(8.0, 64).unwrap();
    let ks = [-2, -1, 0, 1];
    let plan = AveragingPlan::new(gx, gy, 2, &ks);

    // constants-normalization
    let ones = Signal2D::from_fn(gx, gy, |_, _| Complex64::new(1.0, 0.0));
    let mut worst_norm = 0.0f64;
    for &k in &ks {
        let a = plan.avg_curve(&ones, k).unwrap();
        let b = plan.avg_mollify(&ones, k).unwrap();
        for (av, bv) in a.values.iter().zip(&b.values) {
            worst_norm = worst_norm.max((av - bv).norm());
        }
    }
    let norm_ok = worst_norm <= tol::NORMALIZATION_ABS;

    // pointwise domination over 100 random nonnegative signals
    let mut rng = SplitMix64::new(1300);
    let mut worst_slack = f64::MAX;
    for _ in 0..100 {
        let f = nonneg_band_limited(gx, gy, 0.5, &mut rng);
        let check = plan.check_pointwise_domination(&f).unwrap();
        worst_slack = worst_slack.min(check.worst_slack);
    }
    let dom_ok = worst_slack >= -1e-12;

    // signed measure: zero at zero frequency, curvature tail exponent
    let mut sigma_ok = true;
    let mut tails = Vec::new();
    for m in [2u32, 3] {
        let zero = sigma_transform(0, m, 0.0, 0.0).norm();
        sigma_ok &= zero <= tol::SIGMA_ZERO_ABS;
        let radii: Vec<f64> = (0..=12).map(|p| (p as f64 * 0.75).exp2()).collect();
        let fit = sigma_fourier_decay(0, m, &radii, 12);
        let expected = -1.0 / m as f64;
        sigma_ok &= (fit.tail_exponent - expected).abs() <= tol::SIGMA_TAIL_TOL;
        tails.push(format!("m={m}: {:.3}", fit.tail_exponent));
    }

    (
        norm_ok && dom_ok && sigma_ok,
        format!(
            "normalization {worst_norm:.2e}, domination slack {worst_slack:.3e}, tails [{}]",
            tails.join(", ")
        ),
    )
}

fn criterion_14_csv_determinism() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_lab");
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let dir = tmp.path().join(format!("run{run}"));
        let status = std::process::Command::new(bin)
            .args(["all", "--seed", "7", "--out"])
            .arg(&dir)
            .status()
            .expect("lab binary runs");
        if !status.success() {
            return (false, format!("run {run} exited with {status}"));
        }
        outputs.push(std::fs::read(dir.join("report.csv")).unwrap());
    }
    (
        outputs[0] == outputs[1],
        format!(
            "two `lab all --seed 7` runs, {} bytes each, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria = vec![
        run("01 determinant-identity", 2.0, criterion_01_determinant_identity),
        run("02 matrix-lower-bound", 2.0, criterion_02_matrix_lower_bound),
        run("03 gradient-identity", 2.0, criterion_03_gradient_identity),
        run("04 partition+plancherel", 5.0, criterion_04_partition_and_plancherel),
        run("05 van-der-corput", 10.0, criterion_05_van_der_corput),
        run("06 kernel-support", 10.0, criterion_06_kernel_support),
        run("07 product-kernel-decay", 60.0, criterion_07_product_kernel_decay),
        run("08 ttstar-kernel-decay", 60.0, criterion_08_ttstar_kernel_decay),
        run("09 band-piece-norm-decay", 120.0, criterion_09_band_piece_norm_decay),
        run("10 symmetry-exactness", 30.0, criterion_10_symmetry_exactness),
        run("11 even-m-vanishing", 10.0, criterion_11_even_m_vanishing),
        run("12 odd-m-carleson-domination", 30.0, criterion_12_odd_m_carleson_domination),
        run("13 appendix-suite", 60.0, criterion_13_appendix_suite),
        // determinism criterion carries no runtime cap; the sentinel is a day
        run("14 csv-determinism", 86_400.0, criterion_14_csv_determinism),
    ];

    let mut failures = Vec::new();
    for c in &criteria {
        let in_time = c.elapsed <= c.cap;
        let verdict = if c.pass && in_time { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {} ({:.2?}{}) - {}",
            c.name,
            verdict,
            c.elapsed,
            if in_time { "".to_string() } else { format!(", over cap {:?}", c.cap) },
            c.detail
        );
        if !(c.pass && in_time) {
            failures.push(format!("{}: {}", c.name, c.detail));
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
