//! Random-direction partitioning and final hypothesis assembly.
//!
//! The classifier estimates the mean vectors of the eight indicator sets it
//! must split fairly (per-threshold misclassification and robustness
//! indicators), draws a random unit direction orthogonal to all of them,
//! cuts the projection line into four intervals of Gaussian mass w_1..w_4,
//! and validates the split on a fresh test set before accepting it.

use serde::{Deserialize, Serialize};

use crate::dist::{LabeledSample, SampleSource};
use crate::gauss::{gaussian_cdf, gaussian_quantile};
use crate::poly::Polynomial;
use crate::rng::{self, DetRng};
use crate::rounding::{
    compute_rounding_thresholds, Mixture, RoundingConfig, RoundingDiagnostics,
};
use crate::sensitivity::{profile_points, PerturbationSet, PhiProfile};
use crate::util::{dot, norm2, pairwise_mean};
use crate::{Error, Result};

/// Current serialization version of [`HypothesisData`].
pub const HYPOTHESIS_FORMAT_VERSION: u32 = 1;

/// Direction and interval boundaries of the partition. The implied intervals
/// are right-closed: J_1 = (-inf, c1], J_2 = (c1, c2], J_3 = (c2, c3],
/// J_4 = (c3, inf); a projection exactly on a boundary belongs to the lower
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    pub direction: Vec<f64>,
    pub boundaries: [f64; 3],
}

impl PartitionSpec {
    /// Interval index (0-based) of a projection value.
    pub fn interval_of_projection(&self, proj: f64) -> usize {
        let c = &self.boundaries;
        if proj <= c[0] {
            0
        } else if proj <= c[1] {
            1
        } else if proj <= c[2] {
            2
        } else {
            3
        }
    }

    pub fn interval_of(&self, x: &[f64]) -> usize {
        self.interval_of_projection(dot(&self.direction, x))
    }

    /// Gaussian mass of interval `i`.
    pub fn interval_mass(&self, i: usize) -> f64 {
        let c = &self.boundaries;
        match i {
            0 => gaussian_cdf(c[0]),
            1 => gaussian_cdf(c[1]) - gaussian_cdf(c[0]),
            2 => gaussian_cdf(c[2]) - gaussian_cdf(c[1]),
            _ => 1.0 - gaussian_cdf(c[2]),
        }
    }

    pub fn validate(&self, weights: &[f64; 4]) -> Result<()> {
        let n = norm2(&self.direction);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidHypothesis {
                field: "direction",
                detail: format!("norm {n} not within 1e-9 of 1"),
            });
        }
        if self.boundaries[0] > self.boundaries[1] || self.boundaries[1] > self.boundaries[2] {
            return Err(Error::InvalidHypothesis {
                field: "boundaries",
                detail: "boundaries must be non-decreasing".into(),
            });
        }
        for i in 0..4 {
            let mass = self.interval_mass(i);
            if (mass - weights[i]).abs() > 1e-8 {
                return Err(Error::InvalidHypothesis {
                    field: "boundaries",
                    detail: format!(
                        "interval {i} mass {mass} differs from weight {}",
                        weights[i]
                    ),
                });
            }
        }
        Ok(())
    }
}

/// The serializable hypothesis package: everything needed to recompile and
/// evaluate the trained classifier. The perturbation scale eta = 10 r is
/// implied by `r` and never stored separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisData {
    pub version: u32,
    pub d: usize,
    pub k: usize,
    pub coefficients: Vec<f64>,
    pub thresholds: [f64; 4],
    pub weights: [f64; 4],
    pub direction: Vec<f64>,
    pub boundaries: [f64; 3],
    pub r: f64,
    pub phi_seed: u64,
    pub phi_m: usize,
}

impl HypothesisData {
    pub fn partition(&self) -> PartitionSpec {
        PartitionSpec {
            direction: self.direction.clone(),
            boundaries: self.boundaries,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidHypothesis {
            field: "json",
            detail: e.to_string(),
        })
    }
}

/// Corrected label of the i-th rounded PTF, read off a sensitivity profile.
#[inline]
pub(crate) fn lca_label_from_profile(profile: &PhiProfile<f64>, t: f64) -> f64 {
    let g = profile.label_at_threshold(t);
    if profile.phi_at_threshold(t) > 0.8 {
        -g
    } else {
        g
    }
}

/// Robustness indicator of the i-th rounded PTF from a profile.
#[inline]
pub(crate) fn robust_indicator_from_profile(profile: &PhiProfile<f64>, t: f64) -> bool {
    profile.phi_at_threshold(t) <= 0.1
}

/// Mean vectors of x weighted by the misclassification indicator
/// Ind[y != h_i(x)] and by the robustness indicator Ind[phi-hat <= 0.1],
/// for each of the four thresholds: eight d-vectors.
pub fn estimate_indicator_means(
    p: &Polynomial<f64>,
    mixture: &Mixture,
    samples: &[LabeledSample],
    pset: &PerturbationSet<f64>,
) -> Result<Vec<Vec<f64>>> {
    if samples.is_empty() {
        return Err(Error::EmptySet {
            op: "estimate_indicator_means",
        });
    }
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let profiles = profile_points(p, pset, &xs)?;
    Ok(indicator_means_from_profiles(
        &profiles, samples, mixture,
    ))
}

fn indicator_means_from_profiles(
    profiles: &[PhiProfile<f64>],
    samples: &[LabeledSample],
    mixture: &Mixture,
) -> Vec<Vec<f64>> {
    let d = samples[0].x.len();
    let n = samples.len();
    let mut means = Vec::with_capacity(8);
    for i in 0..4 {
        let t = mixture.thresholds[i];
        let mut acc = vec![0.0f64; d];
        for (profile, s) in profiles.iter().zip(samples) {
            if lca_label_from_profile(profile, t) != s.y {
                for c in 0..d {
                    acc[c] += s.x[c];
                }
            }
        }
        means.push(acc.iter().map(|v| v / n as f64).collect());
    }
    for i in 0..4 {
        let t = mixture.thresholds[i];
        let mut acc = vec![0.0f64; d];
        for (profile, s) in profiles.iter().zip(samples) {
            if robust_indicator_from_profile(profile, t) {
                for c in 0..d {
                    acc[c] += s.x[c];
                }
            }
        }
        means.push(acc.iter().map(|v| v / n as f64).collect());
    }
    means
}

/// Uniformly random unit vector in R^d orthogonal to the span of `means`
/// (a uniform unit vector when `means` is empty).
///
/// The mean vectors are orthonormalized by modified Gram-Schmidt (vectors
/// with residual norm below 1e-10 are dropped), a standard Gaussian vector
/// is projected onto the complement twice, and the result is normalized.
pub fn orthonormal_complement_direction(
    d: usize,
    means: &[Vec<f64>],
    rng: &mut DetRng,
) -> Result<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for m in means {
        if m.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.len(),
            });
        }
        let mut v = m.clone();
        for b in &basis {
            let c = dot(&v, b);
            for i in 0..d {
                v[i] -= c * b[i];
            }
        }
        let n = norm2(&v);
        if n > 1e-10 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    if basis.len() >= d {
        return Err(Error::InvalidArgument {
            op: "orthonormal_complement_direction",
            detail: "mean span leaves no orthogonal complement".into(),
        });
    }
    let mut g = rng.gaussian_vec(d);
    for _ in 0..2 {
        for b in &basis {
            let c = dot(&g, b);
            for i in 0..d {
                g[i] -= c * b[i];
            }
        }
    }
    let n = norm2(&g);
    if n < 1e-8 {
        return Err(Error::InvalidArgument {
            op: "orthonormal_complement_direction",
            detail: "projected direction collapsed".into(),
        });
    }
    Ok(g.into_iter().map(|x| x / n).collect())
}

/// Interval boundaries (c1, c2, c3) whose Gaussian masses realize the given
/// weights. Cumulative sums are clamped into [1e-12, 1 - 1e-12], so a zero
/// weight produces coincident boundaries and an empty interval rather than a
/// special-cased partition.
pub fn boundaries_from_weights(weights: &[f64; 4]) -> Result<[f64; 3]> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument {
            op: "boundaries_from_weights",
            detail: format!("weights {weights:?} (sum {sum})"),
        });
    }
    let mut out = [0.0f64; 3];
    let mut cum = 0.0;
    for i in 0..3 {
        cum += weights[i].max(0.0);
        let q = cum.clamp(1e-12, 1.0 - 1e-12);
        out[i] = gaussian_quantile(q)?;
        if i > 0 && out[i] < out[i - 1] {
            out[i] = out[i - 1];
        }
    }
    Ok(out)
}

/// Check that both indicator families split fairly across the intervals:
/// for every i, mean[ind_i and proj in J_i] must match mean[ind_i] * w_i
/// within the tolerance (eight checks).
pub fn validate_partition(
    direction: &[f64],
    boundaries: &[f64; 3],
    mixture: &Mixture,
    p: &Polynomial<f64>,
    pset: &PerturbationSet<f64>,
    test: &[LabeledSample],
    tolerance: f64,
) -> Result<bool> {
    if test.is_empty() {
        return Err(Error::EmptySet {
            op: "validate_partition",
        });
    }
    let xs: Vec<Vec<f64>> = test.iter().map(|s| s.x.clone()).collect();
    let profiles = profile_points(p, pset, &xs)?;
    Ok(validate_from_profiles(
        direction, boundaries, mixture, &profiles, test, tolerance,
    ))
}

fn validate_from_profiles(
    direction: &[f64],
    boundaries: &[f64; 3],
    mixture: &Mixture,
    profiles: &[PhiProfile<f64>],
    test: &[LabeledSample],
    tolerance: f64,
) -> bool {
    let part = PartitionSpec {
        direction: direction.to_vec(),
        boundaries: *boundaries,
    };
    let n = test.len() as f64;
    for i in 0..4 {
        let t = mixture.thresholds[i];
        let w = mixture.weights[i];
        for err_kind in [true, false] {
            let mut total = 0.0f64;
            let mut joint = 0.0f64;
            for (profile, s) in profiles.iter().zip(test) {
                let ind = if err_kind {
                    lca_label_from_profile(profile, t) != s.y
                } else {
                    robust_indicator_from_profile(profile, t)
                };
                if ind {
                    total += 1.0;
                    if part.interval_of(&s.x) == i {
                        joint += 1.0;
                    }
                }
            }
            if (joint / n - (total / n) * w).abs() > tolerance {
                return false;
            }
        }
    }
    true
}

/// Configuration of the classifier-assembly stage.
#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub rounding: RoundingConfig,
    /// Indicator-mean sample size; `None` means `min(10 d^3, 20000)`.
    pub n_mean: Option<usize>,
    /// Partition-validation test-set size.
    pub n_test: usize,
    /// Validation tolerance constant C' (tolerance is C' * eps).
    pub c_prime: f64,
    /// Attempt budget; `None` means `ceil(log2(1/delta))`.
    pub attempts: Option<usize>,
    /// Size of the shared evaluation perturbation set.
    pub phi_m: usize,
    pub seed: u64,
}

impl ClassifierConfig {
    pub fn n_mean(&self, d: usize) -> usize {
        self.n_mean.unwrap_or_else(|| (10 * d * d * d).min(20_000))
    }

    pub fn attempts(&self) -> usize {
        self.attempts
            .unwrap_or_else(|| crate::regression::rounds_for_delta(self.rounding.delta))
    }
}

/// Diagnostics of the partition stage.
#[derive(Debug, Clone)]
pub struct ClassifierDiagnostics {
    pub rounding: RoundingDiagnostics,
    pub attempts_used: usize,
}

/// Assemble the final hypothesis: mix rounding thresholds once, then try up
/// to the attempt budget of {fresh mean sample, fresh direction, validate}.
/// All randomness derives from named substreams of `cfg.seed`; the shared
/// perturbation set's seed and size are recorded in the output package.
pub fn compute_classifier(
    p: &Polynomial<f64>,
    source: &mut dyn SampleSource,
    cfg: &ClassifierConfig,
) -> Result<(HypothesisData, ClassifierDiagnostics)> {
    let d = source.dimension();
    if p.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dimension(),
        });
    }
    let phi_seed = rng::substream(cfg.seed, "phi");
    let pset = PerturbationSet::for_radius(phi_seed, cfg.phi_m, d, cfg.rounding.radius)?;

    let (mixture, rounding_diag) = compute_rounding_thresholds(p, source, &pset, &cfg.rounding)?;
    let boundaries = boundaries_from_weights(&mixture.weights)?;

    let test = source.draw(cfg.n_test);
    let test_xs: Vec<Vec<f64>> = test.iter().map(|s| s.x.clone()).collect();
    let test_profiles = profile_points(p, &pset, &test_xs)?;

    let attempts = cfg.attempts();
    let tolerance = cfg.c_prime * cfg.rounding.eps;
    for attempt in 0..attempts {
        let mean_sample = source.draw(cfg.n_mean(d));
        let xs: Vec<Vec<f64>> = mean_sample.iter().map(|s| s.x.clone()).collect();
        let profiles = profile_points(p, &pset, &xs)?;
        let means = indicator_means_from_profiles(&profiles, &mean_sample, &mixture);
        let mut dir_rng = DetRng::new(rng::substream(cfg.seed, &format!("direction:{attempt}")));
        let direction = orthonormal_complement_direction(d, &means, &mut dir_rng)?;
        if validate_from_profiles(
            &direction,
            &boundaries,
            &mixture,
            &test_profiles,
            &test,
            tolerance,
        ) {
            let data = HypothesisData {
                version: HYPOTHESIS_FORMAT_VERSION,
                d,
                k: p.basis().degree(),
                coefficients: p.coefficients().to_vec(),
                thresholds: mixture.thresholds,
                weights: mixture.weights,
                direction,
                boundaries,
                r: cfg.rounding.radius,
                phi_seed,
                phi_m: cfg.phi_m,
            };
            return Ok((
                data,
                ClassifierDiagnostics {
                    rounding: rounding_diag,
                    attempts_used: attempt + 1,
                },
            ));
        }
    }
    Err(Error::PartitionFailed { attempts })
}

/// Evaluate the hypothesis described by `data` at `x`: locate the interval
/// of <x, u*>, then return the corrected label of that interval's PTF.
///
/// This compiles the package on every call; use [`crate::verify::compile`]
/// once for batch evaluation (the results are identical by construction).
pub fn hypothesis_eval(data: &HypothesisData, x: &[f64]) -> Result<f64> {
    Ok(crate::verify::compile(data)?.evaluate(x)?)
}
