//! Criterion benchmarks for `frec`; see `benches/`.

use frec::{gen_model, uniform_grid, FunctionalSample, ModelKind, ModelSpec, NoiseSpec, Seed};

/// Brownian-motion driven sample of `n` curves on `m` grid points.
pub fn fixture(model: ModelKind, n: usize, m: usize) -> FunctionalSample {
    let grid = uniform_grid(m).expect("m >= 2");
    gen_model(
        &ModelSpec::new(model, n),
        &NoiseSpec::brownian_motion(),
        &grid,
        Seed::new(1),
    )
    .expect("valid model")
}
