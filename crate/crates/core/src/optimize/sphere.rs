//! Exact maximization of a quadratic over the unit sphere in R³.

use nalgebra::{Matrix3, Vector3};

/// Fits `f(n) = nᵀMn + g·n + c` from ten evaluations. Exact whenever `f`
/// is a polynomial of degree at most two.
pub(crate) fn fit_quadratic(mut f: impl FnMut(Vector3<f64>) -> f64) -> (Matrix3<f64>, Vector3<f64>, f64) {
    let e = |i: usize| Vector3::ith(i, 1.0);
    let c = f(Vector3::zeros());
    let plus: Vec<f64> = (0..3).map(|i| f(e(i))).collect();
    let minus: Vec<f64> = (0..3).map(|i| f(-e(i))).collect();
    let mut m = Matrix3::zeros();
    let mut g = Vector3::zeros();
    for i in 0..3 {
        g[i] = (plus[i] - minus[i]) / 2.0;
        m[(i, i)] = (plus[i] + minus[i]) / 2.0 - c;
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let v = f(e(i) + e(j));
            let mij = (v - m[(i, i)] - m[(j, j)] - g[i] - g[j] - c) / 2.0;
            m[(i, j)] = mij;
            m[(j, i)] = mij;
        }
    }
    (m, g, c)
}

/// Global maximizer of `nᵀMn + g·n` subject to `|n| = 1` (`M` symmetric).
///
/// Stationary points satisfy `(μI − M) n = g/2`; the global maximum has
/// `μ ≥ λ_max`, found by bisection on the secular equation `|n(μ)| = 1`.
pub(crate) fn maximize_on_sphere(m: &Matrix3<f64>, g: &Vector3<f64>) -> Vector3<f64> {
    let eig = m.symmetric_eigen();
    let lam = eig.eigenvalues;
    let q = eig.eigenvectors;
    let k = lam.imax();
    let lmax = lam[k];
    let h = q.transpose() * g / 2.0;
    let hn = h.norm();
    let scale = lam.amax().max(hn).max(1.0);
    if hn <= 1e-15 * scale {
        return q.column(k).into_owned();
    }
    let top: Vec<bool> = (0..3).map(|i| lmax - lam[i] <= 1e-12 * scale).collect();
    let top_weight: f64 = (0..3).filter(|&i| top[i]).map(|i| h[i] * h[i]).sum::<f64>().sqrt();
    if top_weight <= 1e-12 * scale {
        // hard case: the rest of the vector may not reach the sphere
        let mut y = Vector3::zeros();
        for i in 0..3 {
            if !top[i] {
                y[i] = h[i] / (lmax - lam[i]);
            }
        }
        let r2 = y.norm_squared();
        if r2 <= 1.0 {
            y[k] = (1.0 - r2).sqrt();
            return q * y;
        }
    }
    let norm2 = |mu: f64| (0..3).map(|i| (h[i] / (mu - lam[i])).powi(2)).sum::<f64>();
    let (mut lo, mut hi) = (lmax, lmax + hn);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm2(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = Vector3::from_fn(|i, _| h[i] / (hi - lam[i]));
    let n = q * y;
    let len = n.norm();
    if len > 0.0 && len.is_finite() {
        n / len
    } else {
        q.column(k).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(m: &Matrix3<f64>, g: &Vector3<f64>, n: &Vector3<f64>) -> f64 {
        (n.transpose() * m * n)[0] + g.dot(n)
    }

    /// Brute-force maximum over a fine latitude/longitude grid.
    fn grid_max(m: &Matrix3<f64>, g: &Vector3<f64>) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let steps = 400;
        for i in 0..=steps {
            let t = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..2 * steps {
                let p = std::f64::consts::PI * j as f64 / steps as f64;
                let n = Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
                best = best.max(value(m, g, &n));
            }
        }
        best
    }

    #[test]
    fn fit_recovers_quadratic() {
        let m = Matrix3::new(1.0, 0.5, -0.2, 0.5, -2.0, 0.3, -0.2, 0.3, 0.7);
        let g = Vector3::new(0.4, -1.0, 2.0);
        let (fm, fg, fc) = fit_quadratic(|n| value(&m, &g, &n) + 3.0);
        assert!((fm - m).norm() < 1e-12 && (fg - g).norm() < 1e-12 && (fc - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_objective_gives_normalized_gradient() {
        let g = Vector3::new(3.0, 0.0, 4.0);
        let n = maximize_on_sphere(&Matrix3::zeros(), &g);
        assert!((n - g / 5.0).norm() < 1e-12);
    }

    #[test]
    fn matches_grid_search() {
        let cases = [
            (Matrix3::new(1.0, 0.5, -0.2, 0.5, -2.0, 0.3, -0.2, 0.3, 0.7), Vector3::new(0.4, -1.0, 2.0)),
            (Matrix3::new(2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0), Vector3::new(0.0, 0.0, 0.5)),
            (Matrix3::new(-1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0), Vector3::new(0.1, 0.0, 0.0)),
            (Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0), Vector3::new(0.0, 0.0, 0.0)),
        ];
        for (m, g) in cases {
            let n = maximize_on_sphere(&m, &g);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            let v = value(&m, &g, &n);
            assert!(v >= grid_max(&m, &g) - 1e-9, "{v} vs {}", grid_max(&m, &g));
        }
    }
}
