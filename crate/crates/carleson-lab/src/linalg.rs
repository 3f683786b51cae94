//! Small dense matrix helpers and power-iteration operator norms.

use num_complex::Complex64;

use crate::rng::SplitMix64;

/// Determinant of a 4x4 matrix by cofactor expansion along the first row.
/// Kept deliberately naive: it serves as the independent oracle for closed
/// determinant forms.
pub fn det4_cofactor(m: &[[f64; 4]; 4]) -> f64 {
    fn det3(m: &[[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    let mut det = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for (i, row) in minor.iter_mut().enumerate() {
            let mut jj = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                row[jj] = m[i + 1][j];
                jj += 1;
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][col] * det3(&minor);
    }
    det
}

pub fn mat_vec4(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest singular value of a real n x n matrix, by power iteration on
/// A^T A. Iterates to relative tolerance 1e-13 (at most 10^4 steps) from a
/// deterministic seeded start, keeping the best of three restarts.
pub fn spectral_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        let av: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect();
        // A^T (A v)
        let mut out = vec![0.0; n];
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out[j] += x * av[i];
            }
        }
        out
    };

    let mut best = 0.0f64;
    let mut rng = SplitMix64::new(0x5eed_5eed);
    for _restart in 0..3 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut nv = euclid_norm(&v);
        if nv == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        let mut prev = 0.0;
        for _ in 0..10_000 {
            let w = apply(&v);
            nv = euclid_norm(&w);
            if nv == 0.0 {
                break;
            }
            v = w.iter().map(|x| x / nv).collect();
            let sigma = nv.sqrt();
            if (sigma - prev).abs() <= 1e-13 * sigma.max(1e-300) {
                prev = sigma;
                break;
            }
            prev = sigma;
        }
        best = best.max(prev);
    }
    best
}

pub fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Top singular values of an abstract complex linear operator given by
/// `apply` and its adjoint, via power iteration on A*A with deflation of
/// converged right-singular vectors.
pub fn singular_values<FA, FB>(
    apply: FA,
    apply_adjoint: FB,
    dim: usize,
    count: usize,
    max_iters: usize,
    seed: u64,
) -> Vec<f64>
where
    FA: Fn(&[Complex64]) -> Vec<Complex64>,
    FB: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = SplitMix64::new(seed);
    let mut found: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for _ in 0..count.min(dim) {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
            .collect();
        // project out already-found directions
        for (_, u) in &found {
            let c = cdot(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let mut nv = cnorm(&v);
        if nv == 0.0 {
            break;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        let mut sigma = 0.0;
        for _ in 0..max_iters {
            let mut w = apply_adjoint(&apply(&v));
            for (_, u) in &found {
                let c = cdot(u, &w);
                for (x, y) in w.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
            nv = cnorm(&w);
            if nv == 0.0 {
                sigma = 0.0;
                break;
            }
            for x in w.iter_mut() {
                *x /= nv;
            }
            v = w;
            let s = nv.sqrt();
            if (s - sigma).abs() <= 1e-11 * s.max(1e-300) {
                sigma = s;
                break;
            }
            sigma = s;
        }
        found.push((sigma, v));
    }
    found.into_iter().map(|(s, _)| s).collect()
}
