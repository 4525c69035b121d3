//! Rounding-threshold selection: estimate (err, NS, iso) per random
//! threshold and find a four-threshold mixture whose averaged statistics meet
//! the error, noise-sensitivity, and isolation caps.
//!
//! A convex combination of batch points satisfying the caps exists whenever
//! the batch means do; by Caratheodory, four points then suffice. The search
//! solves one feasibility LP over the whole batch: a basic feasible solution
//! has at most four nonzero weights (the program has four rows), so the LP
//! solve itself produces the Caratheodory support. Exhaustive 4-tuple
//! enumeration is kept alongside for equivalence checks at small batch sizes.

use crate::dist::{LabeledSample, SampleSource};
use crate::lpsolve::{self, LpProblem, LpStatus};
use crate::num::sign_pm;
use crate::poly::Polynomial;
use crate::rng::{self, DetRng};
use crate::sensitivity::{profile_points, PerturbationSet, PhiProfile};
use crate::util::pairwise_mean;
use crate::{Error, Result};

/// Empirical statistics of the PTF sign(p - t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdStats {
    pub t: f64,
    pub err: f64,
    pub ns: f64,
    pub iso: f64,
}

/// Four thresholds with convex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub thresholds: [f64; 4],
    pub weights: [f64; 4],
}

impl Mixture {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument {
                op: "Mixture",
                detail: format!("weights sum to {sum}"),
            });
        }
        if self.weights.iter().any(|&w| w < -1e-12) {
            return Err(Error::InvalidArgument {
                op: "Mixture",
                detail: "negative weight".into(),
            });
        }
        if self.thresholds.iter().any(|t| !(-1.0..=1.0).contains(t)) {
            return Err(Error::InvalidArgument {
                op: "Mixture",
                detail: "threshold outside [-1, 1]".into(),
            });
        }
        Ok(())
    }
}

/// Right-hand sides of the mixing constraints.
#[derive(Debug, Clone, Copy)]
pub struct MixCaps {
    pub err_cap: f64,
    pub ns_cap: f64,
    pub iso_cap: f64,
}

impl MixCaps {
    /// Weighted statistics of a candidate against the caps.
    pub fn admits(&self, stats: &[ThresholdStats], weights: &[f64]) -> bool {
        let dot = |f: fn(&ThresholdStats) -> f64| -> f64 {
            stats
                .iter()
                .zip(weights)
                .map(|(s, w)| w * f(s))
                .sum::<f64>()
        };
        dot(|s| s.err) <= self.err_cap + 1e-9
            && dot(|s| s.ns) <= self.ns_cap + 1e-9
            && dot(|s| s.iso) <= self.iso_cap + 1e-9
    }
}

/// Statistics of sign(p - t) over an evaluation set, from precomputed
/// per-point profiles. The isolation count uses phi-hat >= 0.8, matching the
/// corrector's flip threshold.
pub fn stats_from_profiles(
    profiles: &[PhiProfile<f64>],
    samples: &[LabeledSample],
    t: f64,
) -> ThresholdStats {
    debug_assert_eq!(profiles.len(), samples.len());
    let n = profiles.len();
    let mut errs = Vec::with_capacity(n);
    let mut nss = Vec::with_capacity(n);
    let mut isos = Vec::with_capacity(n);
    for (profile, sample) in profiles.iter().zip(samples) {
        let label = sign_pm(profile.value_at_x - t);
        errs.push(if label != sample.y { 1.0 } else { 0.0 });
        let phi = profile.phi_at_threshold(t);
        nss.push(phi);
        isos.push(if phi >= 0.8 { 1.0 } else { 0.0 });
    }
    ThresholdStats {
        t,
        err: pairwise_mean(&errs),
        ns: pairwise_mean(&nss),
        iso: pairwise_mean(&isos),
    }
}

/// Statistics of the PTF sign(p - t) over labeled `samples`.
pub fn threshold_stats(
    p: &Polynomial<f64>,
    t: f64,
    samples: &[LabeledSample],
    pset: &PerturbationSet<f64>,
) -> Result<ThresholdStats> {
    if samples.is_empty() {
        return Err(Error::EmptySet {
            op: "threshold_stats",
        });
    }
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let profiles = profile_points(p, pset, &xs)?;
    Ok(stats_from_profiles(&profiles, samples, t))
}

fn mixture_from_support(support: &[(f64, f64)]) -> Mixture {
    debug_assert!((1..=4).contains(&support.len()));
    let total: f64 = support.iter().map(|&(_, w)| w).sum();
    let mut thresholds = [support[0].0; 4];
    let mut weights = [0.0; 4];
    for (i, &(t, w)) in support.iter().enumerate() {
        thresholds[i] = t;
        weights[i] = w / total;
    }
    Mixture {
        thresholds,
        weights,
    }
}

/// Find a feasible mixture over the batch via one feasibility LP.
///
/// The LP has four rows (three caps plus the simplex constraint), so a basic
/// feasible solution carries at most four nonzero weights; those are the
/// returned support. Returns `None` exactly when no convex combination of
/// the batch satisfies the caps, which by Caratheodory is equivalent to no
/// 4-tuple satisfying them.
pub fn find_mixture(stats: &[ThresholdStats], caps: &MixCaps) -> Result<Option<Mixture>> {
    if stats.is_empty() {
        return Err(Error::EmptySet { op: "find_mixture" });
    }
    let n = stats.len();
    let mut lp = LpProblem::<f64>::feasibility(n);
    lp.add_eq((0..n).map(|j| (j, 1.0)).collect(), 1.0);
    lp.add_ineq((0..n).map(|j| (j, stats[j].err)).collect(), caps.err_cap);
    lp.add_ineq((0..n).map(|j| (j, stats[j].ns)).collect(), caps.ns_cap);
    lp.add_ineq((0..n).map(|j| (j, stats[j].iso)).collect(), caps.iso_cap);
    let solution = lpsolve::solve_feasibility(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut support: Vec<(f64, f64)> = solution
        .v
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 1e-10)
        .map(|(j, w)| (stats[j].t, *w))
        .collect();
    // Basic solutions of a 4-row program have support <= 4; keep the largest
    // weights if numerics ever disagree.
    if support.len() > 4 {
        support.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        support.truncate(4);
    }
    let mixture = mixture_from_support(&support);
    mixture.validate()?;
    Ok(Some(mixture))
}

/// Feasibility LP over one 4-tuple of statistics points.
pub fn tuple_weights(stats: &[ThresholdStats; 4], caps: &MixCaps) -> Result<Option<[f64; 4]>> {
    let mut lp = LpProblem::<f64>::feasibility(4);
    lp.add_eq((0..4).map(|j| (j, 1.0)).collect(), 1.0);
    lp.add_ineq((0..4).map(|j| (j, stats[j].err)).collect(), caps.err_cap);
    lp.add_ineq((0..4).map(|j| (j, stats[j].ns)).collect(), caps.ns_cap);
    lp.add_ineq((0..4).map(|j| (j, stats[j].iso)).collect(), caps.iso_cap);
    let solution = lpsolve::solve_feasibility(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut w = [0.0; 4];
    for j in 0..4 {
        w[j] = solution.v[j].max(0.0);
    }
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    Ok(Some(w))
}

/// Full C(n, 4) enumeration in lexicographic order; first feasible tuple
/// wins. Used for equivalence testing against [`find_mixture`].
pub fn find_mixture_exhaustive(
    stats: &[ThresholdStats],
    caps: &MixCaps,
) -> Result<Option<Mixture>> {
    let n = stats.len();
    if n < 4 {
        return find_mixture(stats, caps);
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let tuple = [stats[a], stats[b], stats[c], stats[d]];
                    if let Some(w) = tuple_weights(&tuple, caps)? {
                        return Ok(Some(Mixture {
                            thresholds: [stats[a].t, stats[b].t, stats[c].t, stats[d].t],
                            weights: w,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Configuration of the threshold-mixing stage.
#[derive(Debug, Clone)]
pub struct RoundingConfig {
    pub radius: f64,
    pub eps: f64,
    pub delta: f64,
    /// Batch size; `None` means `min(ceil(100 / eps^2), 400)`.
    pub n_thresholds: Option<usize>,
    /// Evaluation-set size |M|.
    pub n_eval: usize,
    /// Attempt budget; `None` means `ceil(log2(1/delta))`.
    pub attempts: Option<usize>,
    /// The caps' slack constant C.
    pub c_slack: f64,
    pub seed: u64,
}

impl RoundingConfig {
    pub fn n_thresholds(&self) -> usize {
        self.n_thresholds
            .unwrap_or_else(|| ((100.0 / (self.eps * self.eps)).ceil() as usize).min(400))
    }

    pub fn attempts(&self) -> usize {
        self.attempts
            .unwrap_or_else(|| crate::regression::rounds_for_delta(self.delta))
    }
}

/// Diagnostics of a mixing run: the successful batch's per-threshold rows
/// plus the chosen mixture.
#[derive(Debug, Clone)]
pub struct RoundingDiagnostics {
    pub attempts_used: usize,
    pub opt_hat: f64,
    pub stats: Vec<ThresholdStats>,
    pub mixture_stats: (f64, f64, f64),
}

/// Sample rounding thresholds, estimate their statistics, and return the
/// first feasible four-threshold mixture. The evaluation set is drawn once;
/// each attempt draws a fresh threshold batch. `opt-hat` is the batch mean
/// of the per-threshold errors.
pub fn compute_rounding_thresholds(
    p: &Polynomial<f64>,
    source: &mut dyn SampleSource,
    pset: &PerturbationSet<f64>,
    cfg: &RoundingConfig,
) -> Result<(Mixture, RoundingDiagnostics)> {
    let samples = source.draw(cfg.n_eval);
    if samples.is_empty() {
        return Err(Error::EmptySet {
            op: "compute_rounding_thresholds",
        });
    }
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let profiles = profile_points(p, pset, &xs)?;

    let attempts = cfg.attempts();
    for attempt in 0..attempts {
        let mut trng = DetRng::new(rng::substream(cfg.seed, &format!("thresholds:{attempt}")));
        let batch: Vec<f64> = (0..cfg.n_thresholds())
            .map(|_| trng.next_range(-1.0, 1.0))
            .collect();
        let stats: Vec<ThresholdStats> = batch
            .iter()
            .map(|&t| stats_from_profiles(&profiles, &samples, t))
            .collect();
        let opt_hat = pairwise_mean(&stats.iter().map(|s| s.err).collect::<Vec<_>>());
        let caps = MixCaps {
            err_cap: opt_hat + cfg.c_slack * cfg.eps,
            ns_cap: 200.0 * cfg.radius + cfg.c_slack * cfg.eps,
            iso_cap: cfg.c_slack * cfg.eps,
        };
        if let Some(mixture) = find_mixture(&stats, &caps)? {
            let lookup = |t: f64| -> ThresholdStats {
                stats
                    .iter()
                    .find(|s| s.t == t)
                    .copied()
                    .unwrap_or_else(|| stats_from_profiles(&profiles, &samples, t))
            };
            let mut agg = (0.0, 0.0, 0.0);
            for i in 0..4 {
                let s = lookup(mixture.thresholds[i]);
                agg.0 += mixture.weights[i] * s.err;
                agg.1 += mixture.weights[i] * s.ns;
                agg.2 += mixture.weights[i] * s.iso;
            }
            return Ok((
                mixture,
                RoundingDiagnostics {
                    attempts_used: attempt + 1,
                    opt_hat,
                    stats,
                    mixture_stats: agg,
                },
            ));
        }
        // The equal-weight mixture over the batch witnesses feasibility
        // whenever the batch means satisfy the caps.
        debug_assert!(
            !(pairwise_mean(&stats.iter().map(|s| s.ns).collect::<Vec<_>>()) <= caps.ns_cap
                && pairwise_mean(&stats.iter().map(|s| s.iso).collect::<Vec<_>>())
                    <= caps.iso_cap),
            "batch means feasible but no mixture found"
        );
    }
    Err(Error::RoundingFailed { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{DataSpec, Halfspace, MarginalKind, NoiseModel, PlantedSource};
    use crate::poly::MonomialBasis;
    use crate::rng::DetRng;

    fn loose_caps() -> MixCaps {
        MixCaps {
            err_cap: 0.6,
            ns_cap: 0.6,
            iso_cap: 0.6,
        }
    }

    #[test]
    fn identical_feasible_stats_mix_immediately() {
        let s = ThresholdStats {
            t: 0.1,
            err: 0.2,
            ns: 0.3,
            iso: 0.1,
        };
        let stats = vec![s; 10];
        let m = find_mixture(&stats, &loose_caps()).unwrap().unwrap();
        m.validate().unwrap();
        let w: f64 = m.weights.iter().sum();
        assert!((w - 1.0).abs() < 1e-9);
        assert!(loose_caps().admits(
            &m.thresholds.map(|_| s),
            &m.weights
        ));
    }

    #[test]
    fn centroid_only_cloud_found_with_quarter_weights() {
        // Four points symmetric about a feasible centroid; each individual
        // point and every sub-tuple mean except the full centroid violates
        // some cap.
        let caps = MixCaps {
            err_cap: 0.3,
            ns_cap: 0.3,
            iso_cap: 0.3,
        };
        let stats = vec![
            ThresholdStats { t: -0.6, err: 0.5, ns: 0.1, iso: 0.3 },
            ThresholdStats { t: -0.2, err: 0.1, ns: 0.5, iso: 0.3 },
            ThresholdStats { t: 0.2, err: 0.5, ns: 0.5, iso: 0.3 },
            ThresholdStats { t: 0.6, err: 0.1, ns: 0.1, iso: 0.3 },
        ];
        let m = find_mixture(&stats, &caps).unwrap().unwrap();
        m.validate().unwrap();
        // Verify the returned combination meets the caps from scratch.
        let mut agg = (0.0, 0.0, 0.0);
        for i in 0..4 {
            let s = stats
                .iter()
                .find(|s| s.t == m.thresholds[i])
                .copied()
                .unwrap_or(stats[0]);
            agg.0 += m.weights[i] * s.err;
            agg.1 += m.weights[i] * s.ns;
            agg.2 += m.weights[i] * s.iso;
        }
        assert!(agg.0 <= caps.err_cap + 1e-7);
        assert!(agg.1 <= caps.ns_cap + 1e-7);
        assert!(agg.2 <= caps.iso_cap + 1e-7);
        // The err/ns structure forces near-equal mixing of all four points.
        for w in m.weights {
            assert!(w > 0.1, "weights {:?}", m.weights);
        }
    }

    #[test]
    fn caratheodory_on_random_clouds() {
        // Random clouds in [0,1]^3 whose centroid satisfies the caps: a
        // feasible 4-tuple always exists and is found.
        let mut rng = DetRng::new(1);
        let mut found = 0;
        let mut tried = 0;
        while tried < 100 {
            let stats: Vec<ThresholdStats> = (0..40)
                .map(|i| ThresholdStats {
                    t: -1.0 + 2.0 * (i as f64 + 0.5) / 40.0,
                    err: rng.next_f64(),
                    ns: rng.next_f64(),
                    iso: rng.next_f64(),
                })
                .collect();
            let centroid = (
                pairwise_mean(&stats.iter().map(|s| s.err).collect::<Vec<_>>()),
                pairwise_mean(&stats.iter().map(|s| s.ns).collect::<Vec<_>>()),
                pairwise_mean(&stats.iter().map(|s| s.iso).collect::<Vec<_>>()),
            );
            let caps = MixCaps {
                err_cap: centroid.0,
                ns_cap: centroid.1,
                iso_cap: centroid.2,
            };
            tried += 1;
            if find_mixture(&stats, &caps).unwrap().is_some() {
                found += 1;
            }
        }
        assert_eq!(found, tried);
    }

    #[test]
    fn lp_search_matches_exhaustive_enumeration() {
        let mut rng = DetRng::new(2);
        for trial in 0..40 {
            let stats: Vec<ThresholdStats> = (0..12)
                .map(|i| ThresholdStats {
                    t: -1.0 + 2.0 * (i as f64 + 0.5) / 12.0,
                    err: rng.next_f64(),
                    ns: rng.next_f64(),
                    iso: rng.next_f64(),
                })
                .collect();
            // Tight caps so that roughly half the trials are infeasible.
            let caps = MixCaps {
                err_cap: rng.next_range(0.2, 0.6),
                ns_cap: rng.next_range(0.2, 0.6),
                iso_cap: rng.next_range(0.2, 0.6),
            };
            let fast = find_mixture(&stats, &caps).unwrap();
            let slow = find_mixture_exhaustive(&stats, &caps).unwrap();
            assert_eq!(
                fast.is_some(),
                slow.is_some(),
                "trial {trial}: LP {fast:?} vs enumeration {slow:?}"
            );
        }
    }

    fn planted_source(seed: u64) -> PlantedSource {
        PlantedSource::new(&DataSpec {
            marginal: MarginalKind::StandardGaussian,
            dimension: 2,
            halfspace: Halfspace::new(vec![1.0, 0.0], 0.0).unwrap(),
            noise: NoiseModel::RandomFlip(0.0),
            seed,
        })
        .unwrap()
    }

    fn linear_poly() -> Polynomial<f64> {
        let b = MonomialBasis::new(2, 1).unwrap();
        let mut coeffs = vec![0.0; b.len()];
        coeffs[b.index_of(&[1, 0]).unwrap()] = 1.0;
        Polynomial::new(b, coeffs).unwrap()
    }

    #[test]
    fn constant_polynomial_stats() {
        // p = 0, t = -0.5: the PTF is identically +1, so err is the fraction
        // of -1 labels, and phi and iso vanish.
        let b = MonomialBasis::new(2, 1).unwrap();
        let p = Polynomial::zero(b);
        let mut src = planted_source(3);
        let samples = src.draw(300);
        let pset = PerturbationSet::for_radius(4, 128, 2, 0.05).unwrap();
        let stats = threshold_stats(&p, -0.5, &samples, &pset).unwrap();
        let neg = samples.iter().filter(|s| s.y == -1.0).count() as f64 / samples.len() as f64;
        assert_eq!(stats.err, neg);
        assert_eq!(stats.ns, 0.0);
        assert_eq!(stats.iso, 0.0);
    }

    #[test]
    fn realizable_stats_match_oracles() {
        // p = x1, t = 0, labels sign(x1): err ~ 0, ns ~ arctan(eta)/pi.
        let p = linear_poly();
        let mut src = planted_source(5);
        let samples = src.draw(2_000);
        let r = 0.05;
        let pset = PerturbationSet::for_radius(6, 4096, 2, r).unwrap();
        let stats = threshold_stats(&p, 0.0, &samples, &pset).unwrap();
        assert_eq!(stats.err, 0.0);
        let want = (10.0 * r).atan() / std::f64::consts::PI;
        assert!((stats.ns - want).abs() < 0.01, "ns {} want {want}", stats.ns);
    }

    #[test]
    fn stats_deterministic_for_fixed_seed() {
        let p = linear_poly();
        let mut src = planted_source(7);
        let samples = src.draw(200);
        let pset = PerturbationSet::for_radius(8, 256, 2, 0.05).unwrap();
        let a = threshold_stats(&p, 0.3, &samples, &pset).unwrap();
        let b = threshold_stats(&p, 0.3, &samples, &pset).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn end_to_end_rounding_on_planted_data() {
        let p = linear_poly();
        let mut src = planted_source(9);
        let pset = PerturbationSet::for_radius(10, 512, 2, 0.05).unwrap();
        let cfg = RoundingConfig {
            radius: 0.05,
            eps: 0.1,
            delta: 0.25,
            n_thresholds: Some(60),
            n_eval: 400,
            attempts: None,
            c_slack: 4.0,
            seed: 11,
        };
        assert_eq!(cfg.attempts(), 2);
        let (mixture, diag) = compute_rounding_thresholds(&p, &mut src, &pset, &cfg).unwrap();
        mixture.validate().unwrap();
        assert_eq!(diag.stats.len(), 60);
        assert!(diag.attempts_used >= 1);
        // Recomputed mixture statistics meet the caps.
        assert!(diag.mixture_stats.0 <= diag.opt_hat + 4.0 * 0.1 + 1e-6);
        assert!(diag.mixture_stats.1 <= 200.0 * 0.05 + 4.0 * 0.1 + 1e-6);
        assert!(diag.mixture_stats.2 <= 4.0 * 0.1 + 1e-6);
    }

    #[test]
    fn threshold_batch_cap_and_attempts_default() {
        let cfg = RoundingConfig {
            radius: 0.05,
            eps: 0.1,
            delta: 0.01,
            n_thresholds: None,
            n_eval: 10,
            attempts: None,
            c_slack: 4.0,
            seed: 0,
        };
        assert_eq!(cfg.n_thresholds(), 400);
        assert_eq!(cfg.attempts(), 7);
    }
}
