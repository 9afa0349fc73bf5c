//! Post-processing of probe records and phasor lines.

/// Time of the largest `|v|` sample, refined by a parabola through its
/// neighbours. `None` for an all-zero record.
pub fn peak_time(samples: &[f64], dt: f64, t0: f64) -> Option<f64> {
    let (k, &peak) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    if peak == 0.0 {
        return None;
    }
    let mut offset = 0.0;
    if k > 0 && k + 1 < samples.len() {
        let (a, b, c) = (samples[k - 1].abs(), samples[k].abs(), samples[k + 1].abs());
        let den = a - 2.0 * b + c;
        if den != 0.0 {
            offset = 0.5 * (a - c) / den;
        }
    }
    Some(t0 + (k as f64 + offset) * dt)
}

/// Positions where the sampled curve changes sign, by linear interpolation.
pub fn zero_crossings(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..x.len().min(y.len()) {
        let (y0, y1) = (y[k - 1], y[k]);
        if y0 == 0.0 && k == 1 {
            out.push(x[0]);
        }
        if (y0 < 0.0 && y1 >= 0.0) || (y0 > 0.0 && y1 <= 0.0) {
            if y1 == 0.0 {
                out.push(x[k]);
            } else {
                out.push(x[k - 1] + (x[k] - x[k - 1]) * y0 / (y0 - y1));
            }
        }
    }
    out
}

/// Wavelength from the mean spacing of consecutive zero crossings, which are
/// half a wavelength apart. Needs at least `min_half_waves + 1` crossings.
pub fn wavelength_from_crossings(crossings: &[f64], min_half_waves: usize) -> Option<f64> {
    if crossings.len() < min_half_waves + 1 {
        return None;
    }
    let n = crossings.len() - 1;
    Some(2.0 * (crossings[n] - crossings[0]) / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let (dx, dy) = (x[k] - mx, y[k] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept: my - slope * mx, r_squared })
}

/// Exponential fit `a ≈ A·exp(−x/L)` through `ln a`; returns `(L, fit)`.
pub fn exponential_decay_fit(x: &[f64], amplitude: &[f64]) -> Option<(f64, LinearFit)> {
    let logs: Vec<f64> = amplitude.iter().map(|a| a.ln()).collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let fit = linear_fit(x, &logs)?;
    Some((-1.0 / fit.slope, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn crossings_of_a_sine() {
        let x: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|v| (std::f64::consts::PI * v + 0.3).sin()).collect();
        let c = zero_crossings(&x, &y);
        assert_eq!(c.len(), 4);
        let lambda = wavelength_from_crossings(&c, 3).unwrap();
        assert!((lambda - 2.0).abs() < 1e-3);
        assert!(wavelength_from_crossings(&c, 4).is_none());
    }

    #[test]
    fn peak_refinement() {
        let dt = 0.1;
        let s: Vec<f64> = (0..100).map(|k| (-((k as f64 * dt - 4.23) / 0.7).powi(2)).exp()).collect();
        let t = peak_time(&s, dt, 0.0).unwrap();
        assert!((t - 4.23).abs() < 2e-3);
        assert!(peak_time(&[0.0; 5], dt, 0.0).is_none());
    }

    #[test]
    fn exact_exponential() {
        let x: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let a: Vec<f64> = x.iter().map(|v| 3.0 * (-v / 4.0).exp()).collect();
        let (l, fit) = exponential_decay_fit(&x, &a).unwrap();
        assert!((l - 4.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fit_recovers_line(m in -5.0f64..5.0, b in -5.0f64..5.0) {
            let x: Vec<f64> = (0..10).map(|k| k as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| m * v + b).collect();
            let f = linear_fit(&x, &y).unwrap();
            prop_assert!((f.slope - m).abs() < 1e-9);
            prop_assert!((f.intercept - b).abs() < 1e-9);
        }
    }
}
