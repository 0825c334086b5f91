//! Log–log slope regression for the scaling benchmark.

use crate::error::{Error, Result};

/// OLS slope of `log(ys)` on `log(xs)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "loglog_slope needs two same-length series of length >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys.iter()).find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "loglog_slope needs strictly positive data, got {v}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "loglog_slope needs at least two distinct x values".into(),
        ));
    }
    Ok(sxy / sxx)
}
