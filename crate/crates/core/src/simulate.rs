//! Data-generating processes: functional white noises and the six benchmark
//! models (random walk, unit-eigenvalue FAR(1), i.i.d., stationary FAR(1),
//! mean break, operator break).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FrecError, Result};
use crate::grid::{inner_product_slices, Curve, FunctionalSample, Grid};

/// Discarded initial steps for the stationary recursions.
pub const BURN_IN: usize = 100;

/// Diagonal jitter added to the Gaussian-process covariance before factorization.
const GP_JITTER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    BrownianMotion,
    BrownianBridge,
    GaussianProcess,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::BrownianMotion => "bm",
            NoiseKind::BrownianBridge => "bb",
            NoiseKind::GaussianProcess => "gp",
        }
    }
}

/// Functional white noise. `gp_scale` and `gp_range` parameterize the
/// covariance `scale * exp(-range * |s - t|)` and only matter for
/// [`NoiseKind::GaussianProcess`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub gp_scale: f64,
    pub gp_range: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind) -> Self {
        NoiseSpec {
            kind,
            gp_scale: 0.2,
            gp_range: 0.3,
        }
    }

    pub fn brownian_motion() -> Self {
        Self::new(NoiseKind::BrownianMotion)
    }

    pub fn brownian_bridge() -> Self {
        Self::new(NoiseKind::BrownianBridge)
    }

    pub fn gaussian_process() -> Self {
        Self::new(NoiseKind::GaussianProcess)
    }

    fn validate(&self) -> Result<()> {
        if self.kind == NoiseKind::GaussianProcess && !(self.gp_scale > 0.0 && self.gp_range > 0.0)
        {
            return Err(FrecError::invalid(
                "gaussian process scale and range must be positive",
            ));
        }
        Ok(())
    }
}

impl std::str::FromStr for NoiseSpec {
    type Err = FrecError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bm" => Ok(Self::brownian_motion()),
            "bb" => Ok(Self::brownian_bridge()),
            "gp" => Ok(Self::gaussian_process()),
            other => Err(FrecError::invalid(format!(
                "unknown noise '{other}' (expected bm|bb|gp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `X_i = X_{i-1} + e_i`.
    M1RandomWalk,
    /// FAR(1) whose operator has a unit eigenvalue, driven along one direction.
    M2EigOneFar,
    /// `X_i = e_i`.
    M3Iid,
    /// `X_i = Psi1(X_{i-1}) + e_i`.
    M4Far1,
    /// Mean shift from 0 to 2 after the break on top of an M4 path.
    M5MeanBreak,
    /// Operator switches from `Psi2` to `Psi1` after the break.
    M6OperatorBreak,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::M1RandomWalk => "m1",
            ModelKind::M2EigOneFar => "m2",
            ModelKind::M3Iid => "m3",
            ModelKind::M4Far1 => "m4",
            ModelKind::M5MeanBreak => "m5",
            ModelKind::M6OperatorBreak => "m6",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = FrecError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(ModelKind::M1RandomWalk),
            "m2" => Ok(ModelKind::M2EigOneFar),
            "m3" => Ok(ModelKind::M3Iid),
            "m4" => Ok(ModelKind::M4Far1),
            "m5" => Ok(ModelKind::M5MeanBreak),
            "m6" => Ok(ModelKind::M6OperatorBreak),
            other => Err(FrecError::invalid(format!(
                "unknown model '{other}' (expected m1..m6)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    /// Break time `k`; `None` means `n / 2`.
    pub break_at: Option<usize>,
    pub psi1_norm: f64,
    pub psi2_norm: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n: usize) -> Self {
        ModelSpec {
            kind,
            n,
            break_at: None,
            psi1_norm: 0.5,
            psi2_norm: 0.7,
        }
    }

    pub fn with_psi1_norm(mut self, norm: f64) -> Self {
        self.psi1_norm = norm;
        self
    }

    pub fn break_point(&self) -> usize {
        self.break_at.unwrap_or(self.n / 2)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(FrecError::invalid("model sample size must be positive"));
        }
        let k = self.break_point();
        if matches!(
            self.kind,
            ModelKind::M5MeanBreak | ModelKind::M6OperatorBreak
        ) && !(1..=self.n).contains(&k)
        {
            return Err(FrecError::invalid(format!(
                "break point {k} outside 1..={}",
                self.n
            )));
        }
        if !(self.psi1_norm > 0.0 && self.psi2_norm > 0.0) {
            return Err(FrecError::invalid("operator norms must be positive"));
        }
        Ok(())
    }
}

/// Seed of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub value: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed { value, stream: 0 }
    }

    pub fn with_stream(value: u64, stream: u64) -> Self {
        Seed { value, stream }
    }

    /// Independent ChaCha stream for `(value, stream)`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.value);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws noise curves on a fixed grid; precomputes the Gaussian-process factor.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    kind: NoiseKind,
    points: Vec<f64>,
    /// Standard deviations of the Brownian increments, starting from `s = 0`.
    increment_sd: Vec<f64>,
    /// Variance of `W(1) - W(s_last)` for bridges on grids that stop short of 1.
    tail_sd: f64,
    /// Row-major lower Cholesky factor of the Gaussian-process covariance.
    chol: Vec<f64>,
}

impl NoiseSampler {
    pub fn new(spec: &NoiseSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        let points = grid.points().to_vec();
        let m = points.len();
        let mut prev = 0.0;
        let increment_sd = points
            .iter()
            .map(|&s| {
                let sd = (s - prev).sqrt();
                prev = s;
                sd
            })
            .collect();
        let tail_sd = (1.0 - points[m - 1]).max(0.0).sqrt();
        let chol = if spec.kind == NoiseKind::GaussianProcess {
            let cov = DMatrix::from_fn(m, m, |i, j| {
                let c = spec.gp_scale * (-spec.gp_range * (points[i] - points[j]).abs()).exp();
                if i == j {
                    c + GP_JITTER
                } else {
                    c
                }
            });
            let factor = cov.cholesky().ok_or_else(|| {
                FrecError::Internal("gaussian process covariance is not positive definite".into())
            })?;
            let l = factor.l();
            let mut flat = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    flat[i * m + j] = l[(i, j)];
                }
            }
            flat
        } else {
            Vec::new()
        };
        Ok(NoiseSampler {
            kind: spec.kind,
            points,
            increment_sd,
            tail_sd,
            chol,
        })
    }

    pub fn grid_len(&self) -> usize {
        self.points.len()
    }

    /// Writes one noise curve into `out`.
    pub fn sample_into<R: rand::Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let m = self.points.len();
        debug_assert_eq!(out.len(), m);
        match self.kind {
            NoiseKind::BrownianMotion | NoiseKind::BrownianBridge => {
                let mut w = 0.0;
                for (o, sd) in out.iter_mut().zip(&self.increment_sd) {
                    let z: f64 = StandardNormal.sample(rng);
                    w += sd * z;
                    *o = w;
                }
                if self.kind == NoiseKind::BrownianBridge {
                    let w1 = if self.tail_sd > 0.0 {
                        let z: f64 = StandardNormal.sample(rng);
                        w + self.tail_sd * z
                    } else {
                        w
                    };
                    for (o, s) in out.iter_mut().zip(&self.points) {
                        *o -= s * w1;
                    }
                    if self.points[0] == 0.0 {
                        out[0] = 0.0;
                    }
                    if self.points[m - 1] == 1.0 {
                        out[m - 1] = 0.0;
                    }
                }
            }
            NoiseKind::GaussianProcess => {
                let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &self.chol[i * m..i * m + i + 1];
                    *o = row.iter().zip(&z).map(|(l, z)| l * z).sum();
                }
            }
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Curve {
        let mut out = vec![0.0; self.points.len()];
        self.sample_into(rng, &mut out);
        Curve::new(out).expect("gaussian draws are finite")
    }
}

/// One noise curve from its own seeded stream.
pub fn gen_noise(spec: &NoiseSpec, grid: &Grid, seed: Seed) -> Result<Curve> {
    let sampler = NoiseSampler::new(spec, grid)?;
    Ok(sampler.sample(&mut seed.rng()))
}

/// Hilbert–Schmidt norm `(int int k(u, s)^2 du ds)^(1/2)` by grid quadrature.
pub fn hs_norm(kernel: impl Fn(f64, f64) -> f64, grid: &Grid) -> f64 {
    let p = grid.points();
    let w = grid.weights();
    let mut acc = 0.0;
    for (u, wu) in p.iter().zip(w) {
        for (s, ws) in p.iter().zip(w) {
            let k = kernel(*u, *s);
            acc += wu * ws * k * k;
        }
    }
    acc.sqrt()
}

/// Integral operator `z -> int k(u, .) z(u) du` discretized on a grid.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    m: usize,
    /// `matrix[k * m + j] = w_j * k(s_j, s_k)`.
    matrix: Vec<f64>,
    hs_norm: f64,
}

impl KernelOperator {
    pub fn new(kernel: impl Fn(f64, f64) -> f64, grid: &Grid) -> Self {
        Self::scaled(&kernel, 1.0, grid)
    }

    fn scaled(kernel: &impl Fn(f64, f64) -> f64, c: f64, grid: &Grid) -> Self {
        let p = grid.points();
        let w = grid.weights();
        let m = p.len();
        let mut matrix = vec![0.0; m * m];
        for k in 0..m {
            for j in 0..m {
                matrix[k * m + j] = w[j] * c * kernel(p[j], p[k]);
            }
        }
        let hs = hs_norm(|u, s| c * kernel(u, s), grid);
        KernelOperator {
            m,
            matrix,
            hs_norm: hs,
        }
    }

    /// Scales `kernel` so the discretized operator has Hilbert–Schmidt norm `target`.
    pub fn calibrated(kernel: impl Fn(f64, f64) -> f64, target: f64, grid: &Grid) -> Self {
        let c = target / hs_norm(&kernel, grid);
        Self::scaled(&kernel, c, grid)
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_norm
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[k * self.m..(k + 1) * self.m];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// `y(s_k) = sum_j w_j k(s_j, s_k) x(s_j)`.
pub fn apply_kernel_operator(
    kernel: impl Fn(f64, f64) -> f64,
    x: &Curve,
    grid: &Grid,
) -> Result<Curve> {
    if x.len() != grid.len() {
        return Err(FrecError::invalid("curve does not match the grid"));
    }
    let op = KernelOperator::new(kernel, grid);
    let mut out = vec![0.0; grid.len()];
    op.apply_into(x.values(), &mut out);
    Curve::new(out)
}

/// Kernel of `Psi1`, `exp{(u^2 + s^2) / 2}`.
pub fn psi1_kernel(u: f64, s: f64) -> f64 {
    (0.5 * (u * u + s * s)).exp()
}

/// Kernel of `Psi2`, `exp{-(u^2 + s^2) / 2}`.
pub fn psi2_kernel(u: f64, s: f64) -> f64 {
    (-0.5 * (u * u + s * s)).exp()
}

/// Coefficient `a = (sqrt 5 - 1) / 2` of the unit-eigenvalue model.
pub fn m2_coefficient() -> f64 {
    0.5 * (5.0f64.sqrt() - 1.0)
}

/// Orthonormal pair `e1 = 1`, `e2 ~ sqrt 2 cos(2 pi s)` under the grid inner product.
pub fn m2_basis(grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let w = grid.weights();
    let normalize = |v: &mut Vec<f64>| {
        let nrm = inner_product_slices(v, v, w).sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
    };
    let mut e1 = vec![1.0; grid.len()];
    normalize(&mut e1);
    let mut e2: Vec<f64> = grid
        .points()
        .iter()
        .map(|s| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * s).cos())
        .collect();
    // Two Gram–Schmidt passes for orthogonality to rounding level.
    for _ in 0..2 {
        let proj = inner_product_slices(&e2, &e1, w);
        e2.iter_mut().zip(&e1).for_each(|(x, e)| *x -= proj * e);
    }
    normalize(&mut e2);
    (e1, e2)
}

/// Source of innovations for the model recursions.
pub trait Innovations {
    /// Fills `out` with the next functional innovation.
    fn next_curve(&mut self, out: &mut [f64]);
    /// Next scalar innovation along `e1` for the unit-eigenvalue model.
    fn next_scalar(&mut self, e1: &[f64], w: &[f64]) -> f64;
}

struct SampledInnovations<'a, R> {
    sampler: &'a NoiseSampler,
    rng: R,
}

impl<R: rand::Rng> Innovations for SampledInnovations<'_, R> {
    fn next_curve(&mut self, out: &mut [f64]) {
        self.sampler.sample_into(&mut self.rng, out);
    }

    fn next_scalar(&mut self, _e1: &[f64], _w: &[f64]) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

/// Innovations from a closure, e.g. deterministic noise in tests. The scalar
/// innovation is the projection of the next curve on `e1`.
pub struct FnInnovations<F>(pub F);

impl<F: FnMut(&mut [f64])> Innovations for FnInnovations<F> {
    fn next_curve(&mut self, out: &mut [f64]) {
        (self.0)(out)
    }

    fn next_scalar(&mut self, e1: &[f64], w: &[f64]) -> f64 {
        let mut buf = vec![0.0; e1.len()];
        (self.0)(&mut buf);
        inner_product_slices(&buf, e1, w)
    }
}

/// Reusable operators for one (model, grid) pair.
#[derive(Debug, Clone)]
pub struct ModelGenerator {
    model: ModelSpec,
    grid: Grid,
    psi1: Option<KernelOperator>,
    psi2: Option<KernelOperator>,
}

impl ModelGenerator {
    pub fn new(model: ModelSpec, grid: &Grid) -> Result<Self> {
        model.validate()?;
        let needs_psi1 = matches!(
            model.kind,
            ModelKind::M4Far1 | ModelKind::M5MeanBreak | ModelKind::M6OperatorBreak
        );
        let psi1 =
            needs_psi1.then(|| KernelOperator::calibrated(psi1_kernel, model.psi1_norm, grid));
        let psi2 = (model.kind == ModelKind::M6OperatorBreak)
            .then(|| KernelOperator::calibrated(psi2_kernel, model.psi2_norm, grid));
        Ok(ModelGenerator {
            model,
            grid: grid.clone(),
            psi1,
            psi2,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn psi1(&self) -> Option<&KernelOperator> {
        self.psi1.as_ref()
    }

    pub fn psi2(&self) -> Option<&KernelOperator> {
        self.psi2.as_ref()
    }

    /// Generates the sample as a flat row-major `n * m` buffer.
    pub fn generate_flat(&self, noise: &mut dyn Innovations) -> Vec<f64> {
        let n = self.model.n;
        let m = self.grid.len();
        let mut data = vec![0.0; n * m];
        let mut prev = vec![0.0; m];
        let mut eps = vec![0.0; m];
        let mut next = vec![0.0; m];
        let k = self.model.break_point();
        match self.model.kind {
            ModelKind::M1RandomWalk => {
                for i in 0..n {
                    noise.next_curve(&mut eps);
                    for (p, e) in prev.iter_mut().zip(&eps) {
                        *p += e;
                    }
                    data[i * m..(i + 1) * m].copy_from_slice(&prev);
                }
            }
            ModelKind::M2EigOneFar => {
                let a = m2_coefficient();
                let (e1, e2) = m2_basis(&self.grid);
                let w = self.grid.weights();
                let (mut u, mut v) = (0.0, 0.0);
                for i in 0..n {
                    let xi = noise.next_scalar(&e1, w);
                    let (u_new, v_new) = (a * (u + v) + xi, a * u);
                    u = u_new;
                    v = v_new;
                    for (d, (b1, b2)) in data[i * m..(i + 1) * m].iter_mut().zip(e1.iter().zip(&e2))
                    {
                        *d = u * b1 + v * b2;
                    }
                }
            }
            ModelKind::M3Iid => {
                for i in 0..n {
                    noise.next_curve(&mut data[i * m..(i + 1) * m]);
                }
            }
            ModelKind::M4Far1 | ModelKind::M5MeanBreak => {
                let psi1 = self.psi1.as_ref().expect("built for M4/M5");
                for _ in 0..BURN_IN {
                    far_step(psi1, noise, &mut prev, &mut eps, &mut next);
                }
                for i in 0..n {
                    far_step(psi1, noise, &mut prev, &mut eps, &mut next);
                    let row = &mut data[i * m..(i + 1) * m];
                    row.copy_from_slice(&prev);
                    // 1-based time i + 1 is after the break when i + 1 > k.
                    if self.model.kind == ModelKind::M5MeanBreak && i + 1 > k {
                        row.iter_mut().for_each(|x| *x += 2.0);
                    }
                }
            }
            ModelKind::M6OperatorBreak => {
                let psi1 = self.psi1.as_ref().expect("built for M6");
                let psi2 = self.psi2.as_ref().expect("built for M6");
                for _ in 0..BURN_IN {
                    far_step(psi2, noise, &mut prev, &mut eps, &mut next);
                }
                for i in 0..n {
                    let op = if i < k { psi2 } else { psi1 };
                    far_step(op, noise, &mut prev, &mut eps, &mut next);
                    data[i * m..(i + 1) * m].copy_from_slice(&prev);
                }
            }
        }
        data
    }

    pub fn generate(&self, noise: &mut dyn Innovations) -> Result<FunctionalSample> {
        let m = self.grid.len();
        let flat = self.generate_flat(noise);
        let curves = flat
            .chunks_exact(m)
            .map(|c| Curve::new(c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        FunctionalSample::new(self.grid.clone(), curves)
    }

    /// Flat sample drawn from `noise` with a seeded stream.
    pub fn generate_seeded(&self, sampler: &NoiseSampler, seed: Seed) -> Vec<f64> {
        let mut innov = SampledInnovations {
            sampler,
            rng: seed.rng(),
        };
        self.generate_flat(&mut innov)
    }
}

fn far_step(
    op: &KernelOperator,
    noise: &mut dyn Innovations,
    prev: &mut [f64],
    eps: &mut [f64],
    next: &mut [f64],
) {
    op.apply_into(prev, next);
    noise.next_curve(eps);
    for ((p, x), e) in prev.iter_mut().zip(next.iter()).zip(eps.iter()) {
        *p = x + e;
    }
}

fn check_noise_for(model: &ModelSpec, noise: &NoiseSpec) -> Result<()> {
    if model.kind == ModelKind::M2EigOneFar && noise.kind != NoiseKind::BrownianMotion {
        return Err(FrecError::invalid(
            "model m2 draws its own one-directional noise and only runs with the bm noise setting",
        ));
    }
    Ok(())
}

/// Simulates `model` driven by `noise` on `grid` from one seeded stream.
pub fn gen_model(
    model: &ModelSpec,
    noise: &NoiseSpec,
    grid: &Grid,
    seed: Seed,
) -> Result<FunctionalSample> {
    check_noise_for(model, noise)?;
    let generator = ModelGenerator::new(*model, grid)?;
    let sampler = NoiseSampler::new(noise, grid)?;
    let mut innov = SampledInnovations {
        sampler: &sampler,
        rng: seed.rng(),
    };
    generator.generate(&mut innov)
}

/// Simulates `model` with caller-supplied innovations.
pub fn gen_model_with(
    model: &ModelSpec,
    grid: &Grid,
    noise: impl FnMut(&mut [f64]),
) -> Result<FunctionalSample> {
    let generator = ModelGenerator::new(*model, grid)?;
    generator.generate(&mut FnInnovations(noise))
}

pub(crate) fn validate_pair(model: &ModelSpec, noise: &NoiseSpec) -> Result<()> {
    model.validate()?;
    noise.validate()?;
    check_noise_for(model, noise)
}
