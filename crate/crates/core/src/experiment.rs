//! Numerical experiments: random bordered Jacobi round trips, the shifted
//! Wishart spectrum, and the normal law from finitely many moments.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::io;
use crate::jacobi::{
    lanczos_discrete, moments_to_jacobi, to_bordered, toeplitz_distance, BorderedJacobi,
    DiscretizedMeasure, JacobiParams, MomentSequence,
};
use crate::recover::{continued_fraction_g, discretize_recovered, find_atoms, SuspectedAtom};

/// Kernel width for [`kernel_smooth`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bandwidth {
    /// Silverman's rule `1.06 sigma N^(-1/5)`.
    Auto,
    Fixed(f64),
}

impl Serialize for Bandwidth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bandwidth::Auto => s.serialize_str("auto"),
            Bandwidth::Fixed(h) => s.serialize_f64(*h),
        }
    }
}

impl std::str::FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        match s.parse::<f64>() {
            Ok(h) if h > 0.0 && h.is_finite() => Ok(Bandwidth::Fixed(h)),
            _ => Err(Error::InvalidArgument(format!(
                "bandwidth must be `auto` or a positive number, got `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub mu_shift: f64,
    pub bandwidth: Bandwidth,
    /// Boundary depth `k`; Lanczos runs `k + 1` steps so that entry `k`
    /// becomes the tail.
    pub lanczos_steps: usize,
    pub grid_size: usize,
    pub moment_count: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            m: 400,
            n: 1200,
            mu_shift: 5.0,
            bandwidth: Bandwidth::Auto,
            lanczos_steps: 5,
            grid_size: 2048,
            moment_count: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.m >= 2 && self.n >= self.m) {
            return fail(format!("need n >= m >= 2, got m = {}, n = {}", self.m, self.n));
        }
        if self.lanczos_steps == 0 {
            return fail("lanczos_steps must be at least 1".into());
        }
        if self.grid_size < 16 {
            return fail(format!("grid_size must be at least 16, got {}", self.grid_size));
        }
        if self.moment_count < 2 {
            return fail(format!("moment_count must be at least 2, got {}", self.moment_count));
        }
        if !self.mu_shift.is_finite() {
            return fail("mu_shift must be finite".into());
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return fail(format!("bandwidth must be positive, got {h}"));
            }
        }
        Ok(())
    }
}

/// `m x n` standard normal matrix, filled row by row from a ChaCha8 stream.
pub fn gaussian_matrix(seed: u64, m: usize, n: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_row_slice(m, n, &data)
}

/// Squared singular values of `X / sqrt(m) + mu I` (`I` the `m x n`
/// rectangular identity), ascending.
///
/// These are the eigenvalues of the `m x m` Gram matrix `A A^T`; the extra
/// `n - m` zeros of `A^T A` are not included.
pub fn shifted_wishart_eigs(x: &DMatrix<f64>, mu: f64) -> Vec<f64> {
    let (m, n) = x.shape();
    let mut a = x / (m as f64).sqrt();
    for i in 0..m.min(n) {
        a[(i, i)] += mu;
    }
    let gram = &a * a.transpose();
    let mut eigs: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

pub fn sample_shifted_wishart_eigs(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    Ok(shifted_wishart_eigs(&gaussian_matrix(cfg.seed, cfg.m, cfg.n), cfg.mu_shift))
}

/// Silverman's rule of thumb `1.06 sigma N^(-1/5)` with the unbiased sample
/// standard deviation.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.06 * var.sqrt() * n.powf(-0.2)
}

fn resolve_bandwidth(samples: &[f64], bandwidth: Bandwidth) -> Result<f64> {
    let h = match bandwidth {
        Bandwidth::Auto => silverman_bandwidth(samples),
        Bandwidth::Fixed(h) => h,
    };
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(Error::InvalidArgument(format!(
            "kernel bandwidth {h} is not positive (constant samples?)"
        )))
    }
}

/// Gaussian kernel density estimate on `grid_size` uniform points spanning
/// `[min - 3h, max + 3h]`, as a grid measure.
pub fn kernel_smooth(samples: &[f64], bandwidth: Bandwidth, grid_size: usize) -> Result<DiscretizedMeasure> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("kernel smoothing needs at least two samples".into()));
    }
    if grid_size < 2 {
        return Err(Error::InvalidArgument("kernel smoothing needs at least two grid points".into()));
    }
    let h = resolve_bandwidth(samples, bandwidth)?;
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let points: Vec<f64> = (0..grid_size).map(|i| lo + i as f64 * step).collect();
    let weights = points
        .iter()
        .map(|&x| {
            samples
                .iter()
                .map(|s| (-0.5 * ((x - s) / h).powi(2)).exp())
                .sum::<f64>()
        })
        .collect();
    DiscretizedMeasure::from_unnormalized(points, weights)
}

/// `m_0..m_{count-1}` of the standard normal law.
pub fn normal_moments(count: usize) -> Result<MomentSequence> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("need at least two moments, got {count}")));
    }
    let mut m = vec![0.0; count];
    m[0] = 1.0;
    for n in (2..count).step_by(2) {
        m[n] = m[n - 2] * (n - 1) as f64;
    }
    MomentSequence::new(m)
}

fn standard_normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `-Im g(x) / pi` on the open tail support, zero elsewhere.
fn recovered_density_at(j: &BorderedJacobi, x: f64) -> f64 {
    if !j.tail_support().interior_contains(x) {
        return 0.0;
    }
    match continued_fraction_g(j, x) {
        Ok(g) => (-g.im / PI).max(0.0),
        Err(_) => 0.0,
    }
}

/// Uniform grid `x`, reference and recovered curves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curves {
    pub x: Vec<f64>,
    pub reference: Vec<f64>,
    pub recovered: Vec<f64>,
}

impl Curves {
    fn spacing(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// `sum |reference - recovered| dx` on the uniform grid.
    pub fn l1(&self) -> f64 {
        let h = self.spacing();
        self.reference
            .iter()
            .zip(&self.recovered)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * h
    }

    pub fn linf(&self) -> f64 {
        self.reference
            .iter()
            .zip(&self.recovered)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn sample<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(x: Vec<f64>, reference: F, recovered: G) -> Self {
        Self {
            reference: x.iter().map(|&t| reference(t)).collect(),
            recovered: x.iter().map(|&t| recovered(t)).collect(),
            x,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub figure: u8,
    pub seed: u64,
    pub config: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
    pub jacobi: JacobiParams,
    pub bordered: BorderedJacobi,
    pub suspected_atoms: Vec<SuspectedAtom>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub curves: Curves,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> f64 {
        self.metrics.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn file_stem(&self) -> String {
        format!("figure{}_{}", self.figure, self.seed)
    }

    /// Write `figureN_<seed>.json` and `figureN_<seed>.csv` into `dir`;
    /// returns both paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.file_stem()));
        let csv = dir.join(format!("{}.csv", self.file_stem()));
        io::write_json(&json, self)?;
        let c = &self.curves;
        let rows = (0..c.x.len()).map(|i| vec![c.x[i], c.reference[i], c.recovered[i]]);
        io::write_rows(
            std::io::BufWriter::new(std::fs::File::create(&csv)?),
            &["x", "reference", "recovered"],
            rows,
        )?;
        Ok((json, csv))
    }
}

/// Random bordered matrix with `k` boundary entries: `|alpha_i|` uniform on
/// `[0.1, 1)` with a random sign and `beta_i = |alpha_i| + U[0, 1)`, the
/// tail drawn the same way.
pub fn random_bordered(rng: &mut impl Rng, k: usize) -> BorderedJacobi {
    let mut alphas = Vec::with_capacity(k + 1);
    let mut betas = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        let size: f64 = rng.gen_range(0.1..1.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        alphas.push(sign * size);
        betas.push(size + rng.gen_range(0.0..1.0));
    }
    let (ta, tb) = (alphas[k], betas[k]);
    alphas.truncate(k);
    betas.truncate(k);
    BorderedJacobi::new(alphas, betas, ta, tb).expect("positive betas")
}

/// Points of the recovered-measure discretization used for the round trip.
pub const ROUND_TRIP_POINTS: usize = 20_000;

/// Recover the measure of a random bordered matrix, rerun Lanczos on it and
/// compare with the original parameters.
///
/// When atoms are found the continuous part alone cannot reproduce the
/// parameters; the comparison is still reported but flagged.
pub fn run_figure2(seed: u64, k: usize) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let original = random_bordered(&mut rng, k);
    let atoms = find_atoms(&original);
    let (measure, continuous_mass) = discretize_recovered(&original, ROUND_TRIP_POINTS)?;
    let params = lanczos_discrete(&measure, k + 1)?;
    let param_error = (0..=k)
        .map(|i| {
            (params.alphas[i] - original.alpha(i))
                .abs()
                .max((params.betas[i] - original.beta(i)).abs())
        })
        .fold(0.0, f64::max);
    let round_trip = BorderedJacobi::new(
        params.alphas[..k].to_vec(),
        params.betas[..k].to_vec(),
        params.alphas[k],
        params.betas[k],
    )?;
    let support = original.tail_support();
    let x = uniform_interior(support.lo, support.hi, 2048);
    let curves = Curves::sample(
        x,
        |t| recovered_density_at(&original, t),
        |t| recovered_density_at(&round_trip, t),
    );

    let mut metrics = BTreeMap::new();
    metrics.insert("param_error".into(), param_error);
    metrics.insert("continuous_mass".into(), continuous_mass);
    metrics.insert("atom_mass".into(), atoms.iter().map(|a| a.mass).sum());
    metrics.insert("l1".into(), curves.l1());
    metrics.insert("linf".into(), curves.linf());
    let mut notes = Vec::new();
    if !atoms.is_empty() {
        notes.push(format!(
            "{} atom(s) outside the tail support; round-trip error is not expected to be small",
            atoms.len()
        ));
    }
    Ok(ExperimentReport {
        figure: 2,
        seed,
        config: serde_json::json!({ "seed": seed, "k": k, "points": ROUND_TRIP_POINTS }),
        metrics,
        jacobi: params,
        bordered: original,
        suspected_atoms: atoms,
        notes,
        curves,
    })
}

fn uniform_interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

/// Shifted Wishart spectrum, kernel-smoothed, then recovered from
/// `lanczos_steps + 1` Lanczos steps with a constant tail.
pub fn run_figure3(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let eigs = sample_shifted_wishart_eigs(cfg)?;
    run_figure3_on(cfg, &eigs)
}

/// [`run_figure3`] on a precomputed spectrum.
pub fn run_figure3_on(cfg: &ExperimentConfig, eigs: &[f64]) -> Result<ExperimentReport> {
    cfg.validate()?;
    let h = resolve_bandwidth(eigs, cfg.bandwidth)?;
    let smoothed = kernel_smooth(eigs, Bandwidth::Fixed(h), cfg.grid_size)?;
    let params = lanczos_discrete(&smoothed, cfg.lanczos_steps + 1)?;
    let distance = toeplitz_distance(&params.alphas, &params.betas);
    let j = to_bordered(&params.alphas, &params.betas)?;
    let atoms = find_atoms(&j);

    let x = smoothed.points().to_vec();
    let dx = x[1] - x[0];
    let curves = Curves {
        reference: smoothed.weights().iter().map(|w| w / dx).collect(),
        recovered: x.iter().map(|&t| recovered_density_at(&j, t)).collect(),
        x,
    };
    let mean = eigs.iter().sum::<f64>() / eigs.len() as f64;

    let mut metrics = BTreeMap::new();
    metrics.insert("l1".into(), curves.l1());
    metrics.insert("linf".into(), curves.linf());
    metrics.insert("toeplitz_distance".into(), distance);
    metrics.insert("bandwidth".into(), h);
    metrics.insert("eigenvalue_mean".into(), mean);
    metrics.insert("recovered_mass".into(), curves.recovered.iter().sum::<f64>() * dx);
    let notes = atoms
        .iter()
        .map(|a| format!("atom near {} with mass {}", a.location, a.mass))
        .collect();
    Ok(ExperimentReport {
        figure: 3,
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        metrics,
        jacobi: params,
        bordered: j,
        suspected_atoms: atoms,
        notes,
        curves,
    })
}

/// Evaluation window for the normal-law comparison.
pub const NORMAL_WINDOW: (f64, f64) = (-4.0, 4.0);

/// Recover the standard normal from `m_0..m_{moment_count-1}`, using as many
/// recurrence steps as the moments determine.
pub fn run_figure4(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let moments = normal_moments(cfg.moment_count)?;
    let steps = moments.max_steps();
    if steps == 0 {
        return Err(Error::InvalidArgument(format!(
            "{} moments do not determine a single recurrence step",
            cfg.moment_count
        )));
    }
    let params = moments_to_jacobi(&moments, steps)?;
    let j = to_bordered(&params.alphas, &params.betas)?;
    let atoms = find_atoms(&j);
    let (lo, hi) = NORMAL_WINDOW;
    let curves = Curves::sample(
        uniform_interior(lo, hi, cfg.grid_size),
        standard_normal_density,
        |t| recovered_density_at(&j, t),
    );
    let support = j.tail_support();
    let mass = crate::quadrature::CosineRule::new(support.lo, support.hi, 4096)
        .integrate(|t| recovered_density_at(&j, t));

    let mut metrics = BTreeMap::new();
    metrics.insert("l1".into(), curves.l1());
    metrics.insert("linf".into(), curves.linf());
    metrics.insert("recovered_mass".into(), mass);
    metrics.insert("steps".into(), steps as f64);
    metrics.insert("toeplitz_distance".into(), toeplitz_distance(&params.alphas, &params.betas));
    Ok(ExperimentReport {
        figure: 4,
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        metrics,
        jacobi: params,
        bordered: j,
        suspected_atoms: atoms,
        notes: vec![],
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_moment_examples() {
        assert_eq!(normal_moments(5).unwrap().moments(), &[1.0, 0.0, 1.0, 0.0, 3.0]);
        assert_eq!(normal_moments(7).unwrap().moments()[6], 15.0);
        assert!(normal_moments(1).is_err());
    }

    #[test]
    fn normal_moments_give_hermite_recurrence() {
        let p = moments_to_jacobi(&normal_moments(20).unwrap(), 9).unwrap();
        for n in 0..9 {
            assert!(p.alphas[n].abs() < 1e-8, "alpha_{n} = {}", p.alphas[n]);
            assert!((p.betas[n] - ((n + 1) as f64).sqrt()).abs() < 1e-8, "beta_{n}");
        }
    }

    #[test]
    fn zero_noise_gives_constant_spectrum() {
        let eigs = shifted_wishart_eigs(&DMatrix::zeros(6, 10), 5.0);
        assert_eq!(eigs.len(), 6);
        assert!(eigs.iter().all(|e| (e - 25.0).abs() < 1e-12));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = ExperimentConfig { m: 20, n: 30, ..Default::default() };
        assert_eq!(sample_shifted_wishart_eigs(&cfg).unwrap(), sample_shifted_wishart_eigs(&cfg).unwrap());
        let other = ExperimentConfig { seed: 2, ..cfg.clone() };
        assert_ne!(sample_shifted_wishart_eigs(&cfg).unwrap(), sample_shifted_wishart_eigs(&other).unwrap());
    }

    #[test]
    fn generator_rows_are_standard() {
        let x = gaussian_matrix(7, 4, 4000);
        let tol = 5.0 / (4000f64).sqrt();
        for row in x.row_iter() {
            let mean = row.mean();
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3999.0;
            assert!(mean.abs() < tol && (var - 1.0).abs() < tol, "{mean} {var}");
        }
    }

    #[test]
    fn kernel_smoothing_examples() {
        let mu = kernel_smooth(&[-1.0, 1.0], Bandwidth::Fixed(0.1), 401).unwrap();
        assert!(mu.moment(1).abs() < 1e-12);
        assert!((mu.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(mu.weights().iter().all(|w| *w >= 0.0));
        assert!(kernel_smooth(&[1.0], Bandwidth::Auto, 100).is_err());
        assert!(kernel_smooth(&[1.0, 1.0], Bandwidth::Auto, 100).is_err());
    }

    #[test]
    fn smoothing_matches_gaussian_convolution_moments() {
        let samples: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let h = 0.2;
        let mu = kernel_smooth(&samples, Bandwidth::Fixed(h), 4000).unwrap();
        let raw = |r: i32| samples.iter().map(|s| s.powi(r)).sum::<f64>() / samples.len() as f64;
        let h2 = h * h;
        // moments of sample + N(0, h^2)
        let want = [
            raw(1),
            raw(2) + h2,
            raw(3) + 3.0 * h2 * raw(1),
            raw(4) + 6.0 * h2 * raw(2) + 3.0 * h2 * h2,
        ];
        for (r, w) in want.iter().enumerate() {
            let got = mu.moment(r as u32 + 1);
            // the kernel is cut at 3h, which drops ~0.3% of each edge sample's mass
            assert!((got - w).abs() <= 0.1 * h2 * (1.0 + w.abs()), "m{} {got} vs {w}", r + 1);
        }
    }

    #[test]
    fn bandwidth_parsing() {
        assert_eq!("auto".parse::<Bandwidth>().unwrap(), Bandwidth::Auto);
        assert_eq!("0.5".parse::<Bandwidth>().unwrap(), Bandwidth::Fixed(0.5));
        assert!("-1".parse::<Bandwidth>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        assert!(ExperimentConfig { n: 10, m: 20, ..Default::default() }.validate().is_err());
        assert!(ExperimentConfig { lanczos_steps: 0, ..Default::default() }.validate().is_err());
    }
}
