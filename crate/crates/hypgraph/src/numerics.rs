//! Small numerical helpers: least-squares lines, Theil-Sen, power iteration.

/// Result of a straight-line fit y = slope*x + intercept.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on (x, y) pairs.
///
/// Panics if fewer than two points are given; callers validate first.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need >= 2 points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        ss_res += r * r;
    }
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (ss_res / dof / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        stderr,
        r_squared,
    }
}

/// Theil-Sen slope: median of pairwise slopes, intercept from medians.
/// Used behind a flag for outlier-resistant box-count fits.
pub fn theil_sen(xs: &[f64], ys: &[f64]) -> LineFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need >= 2 points");
    let mut slopes = Vec::new();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            if xs[j] != xs[i] {
                slopes.push((ys[j] - ys[i]) / (xs[j] - xs[i]));
            }
        }
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let slope = median_sorted(&slopes);
    let mut residual_intercepts: Vec<f64> =
        xs.iter().zip(ys).map(|(&x, &y)| y - slope * x).collect();
    residual_intercepts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let intercept = median_sorted(&residual_intercepts);
    // Reuse the OLS residual machinery for the dispersion diagnostics.
    let ls = least_squares(xs, ys);
    LineFit {
        slope,
        intercept,
        stderr: ls.stderr,
        r_squared: ls.r_squared,
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Spectral radius of a nonnegative primitive matrix by power iteration.
/// `m` is row-major `n x n`. Returns (rho, iteration error estimate).
pub fn spectral_radius(m: &[f64], n: usize) -> (f64, f64) {
    assert_eq!(m.len(), n * n);
    let mut v = vec![1.0f64; n];
    let mut rho = 0.0f64;
    let mut err = f64::INFINITY;
    for _ in 0..20_000 {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            let row = &m[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * v[j];
            }
            w[i] = acc;
        }
        let norm = w.iter().cloned().fold(0.0f64, f64::max);
        if norm == 0.0 {
            return (0.0, 0.0);
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        err = (norm - rho).abs();
        rho = norm;
        v = w;
        if err < 1e-14 * rho.max(1.0) {
            break;
        }
    }
    (rho, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let fit = least_squares(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn theil_sen_ignores_one_outlier() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [2.0, 4.0, 6.0, 8.0, 100.0];
        let fit = theil_sen(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_radius_of_known_matrices() {
        // Full 2-shift adjacency: rho = 2.
        let (rho, _) = spectral_radius(&[1.0, 1.0, 1.0, 1.0], 2);
        assert!((rho - 2.0).abs() < 1e-12);
        // [[1,2],[1,2]] has eigenvalues 0 and 3.
        let (rho, _) = spectral_radius(&[1.0, 2.0, 1.0, 2.0], 2);
        assert!((rho - 3.0).abs() < 1e-12);
    }
}
