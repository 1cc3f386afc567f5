use crate::error::{Error, Result};
use crate::mappings::MappingSpec;
use crate::spaces::{DomainSpec, Point};

/// Allowed gap, in log10 units, between the log-space evaluation and the
/// closed form `(n + 1) log10 3 - log10(n (n + 1))`.
pub const LOG_AGREEMENT_TOL: f64 = 1e-9;

/// One row of the tripling counterexample: `x_n = 1 + 1/n`, `T x = 3x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleRow {
    pub n: usize,
    /// `|x_{n+1} - x_n| = 1 / (n (n + 1))`
    pub step_diff: f64,
    /// `log10 |T^{n+1} x_{n+1} - T^{n+1} x_n|`
    pub image_diff_log10: f64,
    /// `(n + 1) log10 3 - log10(n (n + 1))`
    pub closed_form_log10: f64,
    /// `3^{n+1} / (n (n + 1))` in plain `f64`, while it is finite.
    pub image_diff_direct: Option<f64>,
}

/// Successive differences of `x_n = 1 + 1/n` vanish, yet the images under
/// `T^{n+1}` for `T x = 3x` drift apart without bound, so a uniformly
/// continuous map need not carry the first limit to the second.
pub fn counterexample_demo(rows: usize) -> Result<Vec<CounterexampleRow>> {
    if rows == 0 {
        return Err(Error::InvalidInput("need at least one row".into()));
    }
    let triple = MappingSpec::scale(3.0, DomainSpec::real_line())?;
    let log3 = 3f64.log10();
    (1..=rows)
        .map(|n| {
            let nf = n as f64;
            // x_{n+1} - x_n from the fractional parts, which avoids rounding
            // against the leading 1
            let delta = 1.0 / (nf + 1.0) - 1.0 / nf;
            let step_diff = delta.abs();
            // T is linear, so T^{n+1} x_{n+1} - T^{n+1} x_n = T^{n+1} (x_{n+1} - x_n)
            let image = triple.apply_power_log(n + 1, &Point::scalar(delta)?)?[0];
            let closed_form_log10 = (nf + 1.0) * log3 - (nf * (nf + 1.0)).log10();
            if (image.log10 - closed_form_log10).abs() > LOG_AGREEMENT_TOL {
                return Err(Error::NumericRange(format!(
                    "log-space image difference {} disagrees with closed form {closed_form_log10} at n={n}",
                    image.log10
                )));
            }
            let direct = 3f64.powi(n as i32 + 1) / (nf * (nf + 1.0));
            Ok(CounterexampleRow {
                n,
                step_diff,
                image_diff_log10: image.log10,
                closed_form_log10,
                image_diff_direct: direct.is_finite().then_some(direct),
            })
        })
        .collect()
}
