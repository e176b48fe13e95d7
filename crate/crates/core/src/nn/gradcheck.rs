use super::mlp::{Mlp, MlpParams};
use crate::error::Result;

/// A scalar loss over a network's parameters, evaluated without dropout.
pub trait Objective {
    fn loss(&self, net: &Mlp) -> Result<f64>;
    fn loss_and_grad(&self, net: &Mlp) -> Result<(f64, MlpParams)>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Flat parameter index where the maximum occurred.
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
    /// Largest |analytic - numeric| over all parameters.
    pub max_absolute_error: f64,
    /// ||analytic - numeric|| / max(||analytic||, ||numeric||) over the
    /// whole gradient vector (Euclidean norms, same 1e-12 floor).
    pub vector_relative_error: f64,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12)
}

/// Compare analytic gradients with central differences of step `h` over
/// every parameter.
pub fn grad_check<O: Objective + ?Sized>(net: &Mlp, objective: &O, h: f64) -> Result<GradCheckReport> {
    let (_, analytic) = objective.loss_and_grad(net)?;
    let analytic: Vec<f64> = analytic.values().copied().collect();
    let mut probe = net.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
        max_absolute_error: 0.0,
        vector_relative_error: 0.0,
    };
    let (mut diff_sq, mut analytic_sq, mut numeric_sq) = (0.0, 0.0, 0.0);
    for (idx, &a) in analytic.iter().enumerate() {
        let original = *probe.params_mut().get_mut(idx).expect("index in range");
        set_param(&mut probe, idx, original + h);
        let plus = objective.loss(&probe)?;
        set_param(&mut probe, idx, original - h);
        let minus = objective.loss(&probe)?;
        set_param(&mut probe, idx, original);
        let numeric = (plus - minus) / (2.0 * h);
        let err = relative_error(a, numeric);
        report.max_absolute_error = report.max_absolute_error.max((a - numeric).abs());
        diff_sq += (a - numeric) * (a - numeric);
        analytic_sq += a * a;
        numeric_sq += numeric * numeric;
        if err > report.max_relative_error {
            report.max_relative_error = err;
            report.worst_index = idx;
            report.analytic = a;
            report.numeric = numeric;
        }
    }
    report.vector_relative_error = diff_sq.sqrt() / analytic_sq.sqrt().max(numeric_sq.sqrt()).max(1e-12);
    Ok(report)
}

fn set_param(net: &mut Mlp, idx: usize, value: f64) {
    if let Some(p) = net.params_mut().get_mut(idx) {
        *p = value;
    }
}
