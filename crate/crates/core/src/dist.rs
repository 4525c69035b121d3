//! Data models: subgaussian isotropic log-concave marginals with planted
//! halfspace labels and agnostic noise.
//!
//! Two marginals are shipped: the standard Gaussian and the uniform cube
//! scaled to unit per-coordinate variance. Noise is either independent label
//! flips at rate rho, or boundary-concentrated flips (`margin_adversarial`)
//! that flip exactly the rho-quantile of points nearest the planted boundary.
//! The adversarial model is one choice among many; nothing canonical forces
//! it, and it exists to stress the agnostic guarantee harder than random
//! flips do.

use serde::{Deserialize, Serialize};

use crate::gauss::{gaussian_cdf, gaussian_quantile};
use crate::num::sign_pm;
use crate::rng::DetRng;
use crate::util::{dot, norm2};
use crate::{Error, Result};

/// Halfspace sign(u . x - tau) with unit direction u.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Halfspace {
    pub direction: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(direction: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm2(&direction);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument {
                op: "Halfspace::new",
                detail: format!("direction norm {n} not within 1e-9 of 1"),
            });
        }
        Ok(Halfspace { direction, offset })
    }

    /// Projection u . x - tau.
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.direction, x) - self.offset
    }

    /// Clean label sign(u . x - tau), with sign(0) = +1.
    pub fn label(&self, x: &[f64]) -> f64 {
        sign_pm(self.margin(x))
    }
}

/// One labeled example.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalKind {
    StandardGaussian,
    /// Uniform on [-sqrt(3), sqrt(3)]^d: unit per-coordinate variance.
    IsotropicCube,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "rate")]
pub enum NoiseModel {
    RandomFlip(f64),
    MarginAdversarial(f64),
}

impl NoiseModel {
    pub fn rate(&self) -> f64 {
        match *self {
            NoiseModel::RandomFlip(r) | NoiseModel::MarginAdversarial(r) => r,
        }
    }
}

/// Full description of a labeled data distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataSpec {
    pub marginal: MarginalKind,
    pub dimension: usize,
    pub halfspace: Halfspace,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl DataSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 1 {
            return Err(Error::InvalidArgument {
                op: "DataSpec",
                detail: "dimension must be >= 1".into(),
            });
        }
        if self.halfspace.direction.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: self.halfspace.direction.len(),
            });
        }
        let rho = self.noise.rate();
        if !(0.0..0.5).contains(&rho) {
            return Err(Error::InvalidArgument {
                op: "DataSpec",
                detail: format!("noise rate {rho} not in [0, 0.5)"),
            });
        }
        Ok(())
    }
}

const SQRT3: f64 = 1.7320508075688772;

/// Draw one marginal point.
fn draw_point(kind: MarginalKind, d: usize, rng: &mut DetRng) -> Vec<f64> {
    match kind {
        MarginalKind::StandardGaussian => rng.gaussian_vec(d),
        MarginalKind::IsotropicCube => (0..d).map(|_| rng.next_range(-SQRT3, SQRT3)).collect(),
    }
}

/// n i.i.d. draws from the marginal of `spec`, using the spec seed's
/// "marginal" substream. Same seed, same list, bit for bit.
pub fn sample_marginal(spec: &DataSpec, n: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySet {
            op: "sample_marginal",
        });
    }
    let mut rng = DetRng::substream(spec.seed, "marginal");
    Ok((0..n)
        .map(|_| draw_point(spec.marginal, spec.dimension, &mut rng))
        .collect())
}

/// Margin threshold for the adversarial noise model: the value c such that
/// Pr[|u.x - tau| < c] is (approximately) the flip rate.
fn adversarial_margin(spec: &DataSpec) -> f64 {
    let rho = spec.noise.rate();
    if rho <= 0.0 {
        return 0.0;
    }
    let tau = spec.halfspace.offset;
    match spec.marginal {
        MarginalKind::StandardGaussian => {
            // u.x ~ N(0,1); solve Phi(tau+c) - Phi(tau-c) = rho by bisection.
            let mass = |c: f64| gaussian_cdf(tau + c) - gaussian_cdf(tau - c);
            let (mut lo, mut hi) = (0.0f64, 50.0f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mass(mid) < rho {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        MarginalKind::IsotropicCube => {
            // No closed form for the projection; calibrate on a fixed-seed
            // sample so the threshold is a deterministic function of the spec.
            let mut rng = DetRng::substream(spec.seed, "margin-calibration");
            let n = 20_000;
            let mut margins: Vec<f64> = (0..n)
                .map(|_| {
                    let x = draw_point(spec.marginal, spec.dimension, &mut rng);
                    spec.halfspace.margin(&x).abs()
                })
                .collect();
            margins.sort_by(|a, b| a.partial_cmp(b).unwrap());
            margins[((rho * n as f64) as usize).min(n - 1)]
        }
    }
}

/// Label sampler: owns the noise RNG state and the calibrated margin.
#[derive(Debug, Clone)]
pub struct Labeler {
    spec: DataSpec,
    margin_threshold: f64,
    noise_rng: DetRng,
}

impl Labeler {
    pub fn new(spec: &DataSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Labeler {
            margin_threshold: adversarial_margin(spec),
            noise_rng: DetRng::substream(spec.seed, "label-noise"),
            spec: spec.clone(),
        })
    }

    /// Adversarial margin threshold (0 for the random-flip model).
    pub fn margin_threshold(&self) -> f64 {
        self.margin_threshold
    }

    /// Label `x` under the spec's noise model, advancing the noise stream.
    pub fn label(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.spec.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.spec.dimension,
                got: x.len(),
            });
        }
        let clean = self.spec.halfspace.label(x);
        Ok(match self.spec.noise {
            NoiseModel::RandomFlip(rho) => {
                // Always consume one variate so labels at different points
                // stay independent of evaluation order.
                let u = self.noise_rng.next_f64();
                if u < rho {
                    -clean
                } else {
                    clean
                }
            }
            NoiseModel::MarginAdversarial(rho) => {
                if rho > 0.0 && self.spec.halfspace.margin(x).abs() < self.margin_threshold {
                    -clean
                } else {
                    clean
                }
            }
        })
    }
}

/// Convenience wrapper: label one point given an explicit noise RNG state.
pub fn label(spec: &DataSpec, x: &[f64], noise_rng: &mut DetRng) -> Result<f64> {
    let mut labeler = Labeler::new(spec)?;
    labeler.noise_rng = noise_rng.clone();
    let y = labeler.label(x)?;
    *noise_rng = labeler.noise_rng;
    Ok(y)
}

/// Anything the pipeline can draw i.i.d. labeled samples from.
pub trait SampleSource {
    fn dimension(&self) -> usize;
    fn draw(&mut self, n: usize) -> Vec<LabeledSample>;
}

/// Stream of labeled samples from a [`DataSpec`].
#[derive(Debug, Clone)]
pub struct PlantedSource {
    spec: DataSpec,
    marginal_rng: DetRng,
    labeler: Labeler,
}

impl PlantedSource {
    pub fn new(spec: &DataSpec) -> Result<Self> {
        Ok(PlantedSource {
            marginal_rng: DetRng::substream(spec.seed, "marginal"),
            labeler: Labeler::new(spec)?,
            spec: spec.clone(),
        })
    }

    pub fn spec(&self) -> &DataSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn draw(&mut self, n: usize) -> Vec<LabeledSample> {
        (0..n)
            .map(|_| {
                let x = draw_point(self.spec.marginal, self.spec.dimension, &mut self.marginal_rng);
                let y = self.labeler.label(&x).expect("dimension fixed by source");
                LabeledSample { x, y }
            })
            .collect()
    }
}

impl SampleSource for PlantedSource {
    fn dimension(&self) -> usize {
        PlantedSource::dimension(self)
    }
    fn draw(&mut self, n: usize) -> Vec<LabeledSample> {
        PlantedSource::draw(self, n)
    }
}

/// Re-exported quantile used when cutting the projection line into intervals.
pub use crate::gauss::{gaussian_cdf as cdf, gaussian_quantile as quantile};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::pairwise_mean;

    fn unit(d: usize) -> Vec<f64> {
        let mut u = vec![0.0; d];
        u[0] = 1.0;
        u
    }

    fn spec(
        marginal: MarginalKind,
        d: usize,
        tau: f64,
        noise: NoiseModel,
        seed: u64,
    ) -> DataSpec {
        DataSpec {
            marginal,
            dimension: d,
            halfspace: Halfspace::new(unit(d), tau).unwrap(),
            noise,
            seed,
        }
    }

    #[test]
    fn gaussian_marginal_moments() {
        let s = spec(
            MarginalKind::StandardGaussian,
            10,
            0.0,
            NoiseModel::RandomFlip(0.0),
            1,
        );
        let pts = sample_marginal(&s, 100_000).unwrap();
        for i in 0..10 {
            let col: Vec<f64> = pts.iter().map(|p| p[i]).collect();
            let mean = pairwise_mean(&col);
            let var = pairwise_mean(&col.iter().map(|x| (x - mean) * (x - mean)).collect::<Vec<_>>());
            assert!(mean.abs() < 0.02, "coord {i} mean {mean}");
            assert!((var - 1.0).abs() < 0.05, "coord {i} var {var}");
        }
    }

    #[test]
    fn cube_marginal_support() {
        let s = spec(
            MarginalKind::IsotropicCube,
            3,
            0.0,
            NoiseModel::RandomFlip(0.0),
            2,
        );
        for p in sample_marginal(&s, 20_000).unwrap() {
            for &c in &p {
                assert!((-SQRT3..=SQRT3).contains(&c));
            }
        }
    }

    #[test]
    fn same_seed_bit_identical() {
        let s = spec(
            MarginalKind::StandardGaussian,
            4,
            0.3,
            NoiseModel::RandomFlip(0.1),
            77,
        );
        let a = sample_marginal(&s, 500).unwrap();
        let b = sample_marginal(&s, 500).unwrap();
        assert_eq!(a, b);
        let mut sa = PlantedSource::new(&s).unwrap();
        let mut sb = PlantedSource::new(&s).unwrap();
        let da = sa.draw(200);
        let db = sb.draw(200);
        assert_eq!(da, db);
    }

    #[test]
    fn marginals_are_isotropic() {
        for kind in [MarginalKind::StandardGaussian, MarginalKind::IsotropicCube] {
            let d = 5;
            let s = spec(kind, d, 0.0, NoiseModel::RandomFlip(0.0), 3);
            let pts = sample_marginal(&s, 100_000).unwrap();
            for i in 0..d {
                for j in i..d {
                    let prods: Vec<f64> = pts.iter().map(|p| p[i] * p[j]).collect();
                    let cov = pairwise_mean(&prods);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (cov - want).abs() < 0.05,
                        "{kind:?} cov[{i}][{j}] = {cov}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_noise_labels_are_clean() {
        let s = spec(
            MarginalKind::StandardGaussian,
            3,
            0.2,
            NoiseModel::RandomFlip(0.0),
            4,
        );
        let mut src = PlantedSource::new(&s).unwrap();
        for sample in src.draw(2_000) {
            assert_eq!(sample.y, s.halfspace.label(&sample.x));
        }
    }

    #[test]
    fn random_flip_rate_concentrates() {
        // Binomial oracle: 1e5 draws at rho = 0.1 deviate by < 0.01 (several
        // sigma, sigma = sqrt(0.1 * 0.9 / 1e5) ~ 0.001).
        let s = spec(
            MarginalKind::StandardGaussian,
            3,
            0.0,
            NoiseModel::RandomFlip(0.1),
            5,
        );
        let mut src = PlantedSource::new(&s).unwrap();
        let data = src.draw(100_000);
        let flips = data
            .iter()
            .filter(|s2| s2.y != s.halfspace.label(&s2.x))
            .count();
        let rate = flips as f64 / data.len() as f64;
        assert!((rate - 0.1).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn margin_adversarial_flips_near_boundary() {
        // Quantile oracle: at tau = 0 the threshold solves 2 Phi(c) - 1 = rho,
        // i.e. c = Phi^{-1}((1 + rho) / 2) = Phi^{-1}(0.525) for rho = 0.05.
        let s = spec(
            MarginalKind::StandardGaussian,
            4,
            0.0,
            NoiseModel::MarginAdversarial(0.05),
            6,
        );
        let want = gaussian_quantile(0.525f64).unwrap();
        let labeler = Labeler::new(&s).unwrap();
        assert!((labeler.margin_threshold() - want).abs() < 1e-9);

        let mut src = PlantedSource::new(&s).unwrap();
        let data = src.draw(100_000);
        let mut flips = 0usize;
        for sample in &data {
            let clean = s.halfspace.label(&sample.x);
            if sample.y != clean {
                flips += 1;
                assert!(
                    sample.x[0].abs() < want + 1e-12,
                    "flipped point outside margin: {}",
                    sample.x[0]
                );
            }
        }
        let rate = flips as f64 / data.len() as f64;
        assert!((rate - 0.05).abs() < 0.01, "flip mass {rate}");
    }

    #[test]
    fn cube_adversarial_mass_calibrated() {
        let s = spec(
            MarginalKind::IsotropicCube,
            6,
            0.1,
            NoiseModel::MarginAdversarial(0.08),
            7,
        );
        let mut src = PlantedSource::new(&s).unwrap();
        let data = src.draw(50_000);
        let flips = data
            .iter()
            .filter(|s2| s2.y != s.halfspace.label(&s2.x))
            .count();
        let rate = flips as f64 / data.len() as f64;
        assert!((rate - 0.08).abs() < 0.012, "flip mass {rate}");
    }

    #[test]
    fn anticoncentration_of_projections() {
        // Pr[<u, x> in J] <= |J| for both marginals, up to Monte Carlo slack.
        let n = 100_000;
        for kind in [MarginalKind::StandardGaussian, MarginalKind::IsotropicCube] {
            let d = 6;
            let s = spec(kind, d, 0.0, NoiseModel::RandomFlip(0.0), 8);
            let pts = sample_marginal(&s, n).unwrap();
            let mut rng = DetRng::new(99);
            for _ in 0..5 {
                let u = rng.unit_vector(d);
                for len in [0.1f64, 0.5] {
                    for center in [0.0, rng.next_range(-1.0, 1.0)] {
                        let (lo, hi) = (center - len / 2.0, center + len / 2.0);
                        let mass = pts
                            .iter()
                            .filter(|p| {
                                let t = dot(&u, p);
                                t > lo && t <= hi
                            })
                            .count() as f64
                            / n as f64;
                        let sigma = (mass.max(1e-4) * (1.0 - mass) / n as f64).sqrt();
                        assert!(
                            mass <= len + 3.0 * sigma,
                            "{kind:?}: interval of length {len} has mass {mass}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(Halfspace::new(vec![0.5, 0.5], 0.0).is_err());
        let s = spec(
            MarginalKind::StandardGaussian,
            2,
            0.0,
            NoiseModel::RandomFlip(0.6),
            0,
        );
        assert!(s.validate().is_err());
    }
}
