//! Least-squares power-law fits.

use crate::error::{Error, Result};
use crate::math::ln;

/// Slope and intercept of `log(error)` against `log(eps)`.
pub fn fit_order(eps: &[f64], errors: &[f64]) -> Result<(f64, f64)> {
    if eps.len() != errors.len() {
        return Err(Error::Usage("eps and error lists differ in length"));
    }
    if eps.len() < 3 {
        return Err(Error::Usage("order fit requires at least 3 points"));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Usage("eps values must be positive and strictly decreasing"));
    }
    if errors.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Usage("errors must be positive"));
    }
    let n = eps.len() as f64;
    let xs = eps.iter().map(|&e| ln(e));
    let ys = errors.iter().map(|&e| ln(e));
    let mx = xs.clone().sum::<f64>() / n;
    let my = ys.clone().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_laws() {
        let eps = [0.2, 0.1, 0.05, 0.025];
        let lin: alloc::vec::Vec<f64> = eps.iter().map(|e| 3.0 * e).collect();
        let (s, c) = fit_order(&eps, &lin).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((c - 3.0_f64.ln()).abs() < 1e-12);
        let quad: alloc::vec::Vec<f64> = eps.iter().map(|e| 0.5 * e * e).collect();
        assert!((fit_order(&eps, &quad).unwrap().0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jittered_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eps = [0.2, 0.1, 0.05];
        for p in [0.5, 1.0, 1.5, 2.0] {
            for _ in 0..100 {
                let errs: alloc::vec::Vec<f64> =
                    eps.iter().map(|e: &f64| 2.0 * e.powf(p) * (1.0 + rng.gen_range(-0.05..0.05))).collect();
                let (s, _) = fit_order(&eps, &errs).unwrap();
                assert!((s - p).abs() < 0.1);
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(fit_order(&[0.2, 0.1, 0.05], &[1.0, 0.0, 0.5]).is_err());
        assert!(fit_order(&[0.2, 0.1], &[1.0, 0.5]).is_err());
        assert!(fit_order(&[0.1, 0.2, 0.05], &[1.0, 0.5, 0.2]).is_err());
    }
}
