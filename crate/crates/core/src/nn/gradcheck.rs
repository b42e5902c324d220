//! Central finite-difference gradient checking over a flat parameter vector.

/// Outcome of comparing an analytic gradient against finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Largest relative error among entries that failed the absolute floor.
    pub max_rel_err: f64,
    pub max_abs_err: f64,
    /// Index of the worst entry, if any entry exceeded both tolerances.
    pub first_failure: Option<usize>,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Central differences `(f(p + h e_i) - f(p - h e_i)) / 2h` for every entry.
pub fn numeric_gradient(params: &[f64], h: f64, mut loss: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = params.to_vec();
    (0..params.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let plus = loss(&probe);
            probe[i] = orig - h;
            let minus = loss(&probe);
            probe[i] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// An entry passes when its relative error is below `rel_tol` or its
/// absolute error is below `abs_tol`.
pub fn compare_gradients(analytic: &[f64], numeric: &[f64], rel_tol: f64, abs_tol: f64) -> GradCheckReport {
    assert_eq!(analytic.len(), numeric.len(), "gradient lengths differ");
    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        max_abs_err: 0.0,
        first_failure: None,
        checked: analytic.len(),
    };
    for (i, (&a, &n)) in analytic.iter().zip(numeric).enumerate() {
        let abs = (a - n).abs();
        let scale = a.abs().max(n.abs());
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        report.max_abs_err = report.max_abs_err.max(abs);
        if abs >= abs_tol {
            report.max_rel_err = report.max_rel_err.max(rel);
            if rel >= rel_tol && report.first_failure.is_none() {
                report.first_failure = Some(i);
            }
        }
    }
    report
}
