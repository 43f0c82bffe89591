//! Record-based functional unit root test.
//!
//! Under the I(1) null, `T_n = N_n / sqrt(n)` converges to the `G2` law; under
//! stationarity `T_n -> 0`. The test rejects for small `T_n`.

use crate::asymptotics::{cdf, quantile, LimitLaw};
use crate::depth::DepthKind;
use crate::error::{FrecError, Result};
use crate::grid::FunctionalSample;
use crate::records::{detect_records, RecordAlgorithm, RecordTrajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub n: usize,
    /// `N_n = N^u_n + N^l_n`.
    pub n_total: usize,
    pub n_upper: usize,
    pub n_lower: usize,
    /// `T_n = N_n / sqrt(n)`.
    pub statistic: f64,
    pub alpha: f64,
    pub q_alpha: f64,
    /// Left-tail probability `F2(T_n)`.
    pub p_value: f64,
    pub reject: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(FrecError::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Runs the test on record counts that have already been computed.
pub fn test_from_counts(
    n: usize,
    n_upper: usize,
    n_lower: usize,
    alpha: f64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(FrecError::invalid(format!(
            "the unit root test needs n >= 3, got {n}"
        )));
    }
    let n_total = n_upper + n_lower;
    let statistic = n_total as f64 / (n as f64).sqrt();
    let q_alpha = quantile(LimitLaw::G2, alpha)?;
    let p_value = cdf(LimitLaw::G2, statistic);
    Ok(TestResult {
        n,
        n_total,
        n_upper,
        n_lower,
        statistic,
        alpha,
        q_alpha,
        p_value,
        reject: statistic < q_alpha,
    })
}

pub fn test_from_trajectory(traj: &RecordTrajectory, alpha: f64) -> Result<TestResult> {
    test_from_counts(traj.n(), traj.total_upper(), traj.total_lower(), alpha)
}

/// Detects records of `sample` and tests the I(1) null at level `alpha`.
pub fn rb_unit_root_test(
    sample: &FunctionalSample,
    kind: DepthKind,
    algo: RecordAlgorithm,
    alpha: f64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    if sample.len() < 3 {
        return Err(FrecError::invalid(format!(
            "the unit root test needs n >= 3, got {}",
            sample.len()
        )));
    }
    let traj = detect_records(sample, kind, algo, None)?;
    test_from_trajectory(&traj, alpha)
}
