use super::{GeneratedMatrix, TestbedError};
use crate::dense::extreme_singular_values;

/// Relative slack granted to the singular-value estimator.
pub const BOUND_SLACK: f64 = 0.05;

const ESTIMATOR_MAX_ITERS: usize = 200_000;
const ESTIMATOR_TOL: f64 = 1e-12;

/// Outcome of checking `cond(A) ≥ cond(B) ≥ σ_{1+(n−b)} / σ_b` for the
/// leading `b`-column panel `B` of a generated matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelBoundReport {
    pub panel_width: usize,
    /// Estimated condition number of the leading panel.
    pub panel_condition: f64,
    /// `σ_1 / σ_n` of the planted spectrum.
    pub upper_bound: f64,
    /// `σ_{1+(n−b)} / σ_b` of the planted spectrum (1-based indices).
    pub lower_bound: f64,
    pub slack: f64,
}

impl PanelBoundReport {
    pub fn upper_holds(&self) -> bool {
        self.upper_bound * (1.0 + self.slack) >= self.panel_condition
    }

    pub fn lower_holds(&self) -> bool {
        self.panel_condition * (1.0 + self.slack) >= self.lower_bound
    }

    pub fn holds(&self) -> bool {
        self.upper_holds() && self.lower_holds()
    }
}

/// Estimates the condition number of the first `b` columns of `gen` and
/// compares it against the interlacing bounds from the planted spectrum.
pub fn panel_bound_check(gen: &GeneratedMatrix, b: usize) -> Result<PanelBoundReport, TestbedError> {
    let n = gen.matrix.cols();
    if b == 0 || b > n {
        return Err(TestbedError::InvalidPanelWidth { width: b, cols: n });
    }
    let sigma = &gen.singular_values;
    let est = extreme_singular_values(gen.matrix.columns(0..b), ESTIMATOR_MAX_ITERS, ESTIMATOR_TOL)?;
    Ok(PanelBoundReport {
        panel_width: b,
        panel_condition: est.condition(),
        upper_bound: sigma[0] / sigma[n - 1],
        lower_bound: sigma[n - b] / sigma[b - 1],
        slack: BOUND_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::generate;

    #[test]
    fn full_width_recovers_kappa() {
        let g = generate(200, 20, 1e3, 4).unwrap();
        let rep = panel_bound_check(&g, 20).unwrap();
        assert!((rep.panel_condition / 1e3 - 1.0).abs() <= BOUND_SLACK);
        assert!(rep.holds());
    }

    #[test]
    fn unit_condition_collapses() {
        let g = generate(100, 10, 1.0, 4).unwrap();
        let rep = panel_bound_check(&g, 5).unwrap();
        assert_eq!(rep.upper_bound, 1.0);
        assert_eq!(rep.lower_bound, 1.0);
        assert!((rep.panel_condition - 1.0).abs() < 1e-8);
        assert!(rep.holds());
    }

    #[test]
    fn half_panel_lower_bound() {
        let kappa: f64 = 1e6;
        let g = generate(300, 30, kappa, 8).unwrap();
        let rep = panel_bound_check(&g, 15).unwrap();
        // σ₁₆/σ₁₅ on the geometric spectrum.
        let expected = kappa.powf(-1.0 / 29.0);
        assert!((rep.lower_bound / expected - 1.0).abs() < 1e-12);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn width_checked() {
        let g = generate(20, 4, 10.0, 1).unwrap();
        assert!(panel_bound_check(&g, 0).is_err());
        assert!(panel_bound_check(&g, 5).is_err());
    }
}
