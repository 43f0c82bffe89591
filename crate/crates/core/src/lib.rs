//! Functional records for functional time series.
//!
//! Curves are ranked center-outward by a functional depth (modified band
//! depth or extremal depth). A new curve is a *record* when it is one of the
//! two least deep curves seen so far. Under a functional unit root the
//! number of records grows like `sqrt(n)`, under stationarity like `log n`;
//! the record-based unit root test uses `T_n = N_n / sqrt(n)`.
//!
//! ```
//! use frec::{detect_records, uniform_grid, DepthKind, FunctionalSample, RecordAlgorithm};
//!
//! let grid = uniform_grid(10).unwrap();
//! let sample = FunctionalSample::constants(&[1.0, 3.0, 2.0, 4.0], &grid).unwrap();
//! let traj = detect_records(&sample, DepthKind::Mbd, RecordAlgorithm::ExactPrefix, None).unwrap();
//! assert_eq!(traj.record_times(), vec![1, 2, 4]);
//! ```

pub mod asymptotics;
pub mod depth;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod records;
pub mod simulate;
pub mod urtest;

pub use asymptotics::{cdf, pdf, quantile, LimitLaw};
pub use depth::{
    depth, depth_order, extremal_depth, mbd, validate_assumption1, DepthKind, DepthOrder,
    DepthVector,
};
pub use error::{FrecError, Result};
pub use grid::{inner_product, time_fraction, uniform_grid, Curve, FunctionalSample, Grid};
pub use harness::{
    run_power_sweep, run_record_law, run_size_power, McCell, McConfig, McResult, RecordLaw,
};
pub use records::{
    classify, counting_process, detect_records, CountRow, RecordAlgorithm, RecordEvent, RecordKind,
    RecordTrajectory,
};
pub use simulate::{
    apply_kernel_operator, gen_model, gen_noise, hs_norm, ModelKind, ModelSpec, NoiseKind,
    NoiseSpec, Seed,
};
pub use urtest::{rb_unit_root_test, TestResult};
