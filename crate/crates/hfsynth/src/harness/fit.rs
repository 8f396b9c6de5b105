//! Least-squares fits of measured sizes and depths.

/// `y = a * f1 + b * f2` fitted by least squares, with the largest relative residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub a: f64,
    pub b: f64,
    pub max_rel_residual: f64,
}

impl Fit {
    fn measure(a: f64, b: f64, f1: &[f64], f2: &[f64], ys: &[f64]) -> Fit {
        let max_rel_residual = f1
            .iter()
            .zip(f2)
            .zip(ys)
            .map(|((&u, &v), &y)| ((a * u + b * v - y) / y).abs())
            .fold(0.0, f64::max);
        Fit { a, b, max_rel_residual }
    }
}

/// Fits `y = a * f1 + b * f2` over the given basis values.
pub fn fit_basis(f1: &[f64], f2: &[f64], ys: &[f64]) -> Option<Fit> {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let (s11, s12, s22) = (dot(f1, f1), dot(f1, f2), dot(f2, f2));
    let (t1, t2) = (dot(f1, ys), dot(f2, ys));
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= f64::EPSILON * s11 * s22 {
        return None;
    }
    let a = (t1 * s22 - t2 * s12) / det;
    let b = (s11 * t2 - s12 * t1) / det;
    Some(Fit::measure(a, b, f1, f2, ys))
}

/// Fits `y = a + b * x`.
pub fn fit_affine(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let ones = vec![1.0; xs.len()];
    fit_basis(&ones, xs, ys)
}

/// Fits `y = a + b * log2(n)`.
pub fn fit_log2(ns: &[usize], ys: &[f64]) -> Option<Fit> {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    fit_affine(&xs, ys)
}

/// Consecutive ratios `ys[i + 1] / ys[i]`.
pub fn ratios(ys: &[f64]) -> Vec<f64> {
    ys.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Increments per unit of `x` between consecutive points.
pub fn slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect()
}

/// Largest relative deviation of `vs` from their mean.
pub fn spread(vs: &[f64]) -> f64 {
    let mean = vs.iter().sum::<f64>() / vs.len() as f64;
    vs.iter().map(|v| ((v - mean) / mean).abs()).fold(0.0, f64::max)
}
