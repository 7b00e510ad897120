//! Small least-squares helpers shared by the diagnostic fits.

use serde::Serialize;

/// Weighted straight-line fit `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Weighted RMS of the residuals.
    pub rms: f64,
    pub n: usize,
}

/// Fit a line through `(x, y)` with weights `w` (all ones when `None`).
/// Returns `None` with fewer than two distinct abscissae.
pub fn line_fit(x: &[f64], y: &[f64], w: Option<&[f64]>) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let weight = |i: usize| w.map(|w| w[i]).unwrap_or(1.0);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        sw += weight(i);
        sx += weight(i) * x[i];
        sy += weight(i) * y[i];
    }
    if n < 2 || sw <= 0.0 {
        return None;
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        sxx += weight(i) * (x[i] - mx).powi(2);
        sxy += weight(i) * (x[i] - mx) * (y[i] - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..n)
        .map(|i| weight(i) * (y[i] - slope * x[i] - intercept).powi(2))
        .sum();
    Some(LineFit { slope, intercept, rms: (rss / sw).sqrt(), n })
}

/// Decay rate `k` in `|f| ≈ C e^{k t}`, from a line fit of `ln|f|` against `t`.
/// Zero values are skipped.
pub fn log_linear_rate(t: &[f64], f: &[f64]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(f)
        .filter(|(_, v)| **v != 0.0 && v.is_finite())
        .map(|(t, v)| (*t, v.abs().ln()))
        .unzip();
    line_fit(&xs, &ys, None)
}
