//! Constrained L1 polynomial regression as a linear program, with the
//! boost-and-select outer loop.
//!
//! The program minimizes the empirical L1 error of a degree-k polynomial
//! subject to a cap on its empirical noise sensitivity and a hinge-encoded
//! cap on the isolation surrogate psi. The hinge is exact as a function
//! (10 * Ind[a > 0.6] * (a - 0.6) = 10 * max(0, a - 0.6)), but the LP's
//! per-sample hinge variables are only upper bounds away from vertices, so
//! the selected polynomial's constraint values are always recomputed from
//! scratch after the solve.

use std::sync::Arc;
use std::time::Instant;

use crate::dist::SampleSource;
use crate::lpsolve::{self, LpProblem, LpStatus};
use crate::poly::{MonomialBasis, Polynomial};
use crate::rng;
use crate::sensitivity::{phi_hat, psi_term, PerturbationSet};
use crate::util::pairwise_mean;
use crate::{Error, Result};

/// Configuration for the regression stage.
///
/// `n_samples` is drawn per round; at most `lp_sample_cap` of those are
/// encoded into the LP (each encoded sample adds `2 (m + 1) + 1` rows and
/// `m + 2` columns, which is what bounds the dense-simplex cost). Selection
/// across rounds uses the full draw.
#[derive(Debug, Clone)]
pub struct RegressionConfig {
    pub degree: usize,
    pub radius: f64,
    pub eps: f64,
    /// Cap for constraint 1; `None` means `100 r + eps`.
    pub ns_cap: Option<f64>,
    /// Cap for constraint 2; `None` means `eps`.
    pub psi_cap: Option<f64>,
    pub n_samples: usize,
    pub lp_sample_cap: usize,
    /// Size of the LP's perturbation set.
    pub perturbations: usize,
    /// Boosting rounds; use [`rounds_for_delta`] for the log(1/delta) rule.
    pub boost_rounds: usize,
    pub seed: u64,
}

/// ceil(log2(1/delta)) attempt/round budget, at least 1.
pub fn rounds_for_delta(delta: f64) -> usize {
    ((1.0 / delta).log2().ceil() as usize).max(1)
}

impl RegressionConfig {
    pub fn ns_cap(&self) -> f64 {
        self.ns_cap.unwrap_or(100.0 * self.radius + self.eps)
    }

    pub fn psi_cap(&self) -> f64 {
        self.psi_cap.unwrap_or(self.eps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1
            || self.boost_rounds < 1
            || self.n_samples < 1
            || self.perturbations < 1
            || self.lp_sample_cap < 1
        {
            return Err(Error::InvalidArgument {
                op: "RegressionConfig",
                detail: "degree, rounds, sample and perturbation counts must be >= 1".into(),
            });
        }
        if !(self.ns_cap() > 0.0 && self.psi_cap() > 0.0) {
            return Err(Error::InvalidArgument {
                op: "RegressionConfig",
                detail: "caps must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Column layout of the regression LP.
#[derive(Debug, Clone, Copy)]
pub struct RegressionLpLayout {
    pub n_basis: usize,
    pub n_samples: usize,
    pub n_perturbations: usize,
}

impl RegressionLpLayout {
    pub fn coeff(&self, j: usize) -> usize {
        j
    }
    pub fn residual(&self, j: usize) -> usize {
        self.n_basis + j
    }
    pub fn diff(&self, j: usize, l: usize) -> usize {
        self.n_basis + self.n_samples + j * self.n_perturbations + l
    }
    pub fn hinge(&self, j: usize) -> usize {
        self.n_basis + self.n_samples * (1 + self.n_perturbations) + j
    }
    pub fn n_vars(&self) -> usize {
        self.n_basis + self.n_samples * (2 + self.n_perturbations)
    }
}

/// Build the regression LP over `samples`.
///
/// Variables: coefficients v (free), per-sample residual slacks s_j,
/// per-(sample, perturbation) difference slacks u_jl, per-sample hinge
/// slacks h_j. Encoding:
///   minimize sum_j s_j
///   s_j  >= +-(features(x_j).v - y_j)
///   u_jl >= +-(features(x_j).v - features(x_j + eta z_l).v) / 2
///   (1/(|S| m)) sum_jl u_jl <= ns_cap            (constraint 1)
///   h_j >= 0, h_j >= 10 ((1/m) sum_l u_jl - 0.6)
///   (1/|S|) sum_j h_j <= psi_cap                 (constraint 2)
/// Aggregate rows are stored rescaled by their sample counts, which changes
/// nothing mathematically and keeps the tableau well conditioned.
pub fn build_regression_lp(
    samples: &[crate::dist::LabeledSample],
    t: &PerturbationSet<f64>,
    cfg: &RegressionConfig,
) -> Result<(LpProblem<f64>, RegressionLpLayout)> {
    if samples.is_empty() {
        return Err(Error::EmptySet {
            op: "build_regression_lp",
        });
    }
    let d = samples[0].x.len();
    if t.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: t.dimension(),
        });
    }
    let basis = MonomialBasis::new(d, cfg.degree)?;
    let n = basis.len();
    let s_count = samples.len();
    let m = t.len();
    let layout = RegressionLpLayout {
        n_basis: n,
        n_samples: s_count,
        n_perturbations: m,
    };

    let mut objective = vec![0.0f64; layout.n_vars()];
    for j in 0..s_count {
        objective[layout.residual(j)] = 1.0;
    }
    let mut lp = LpProblem::new(objective);
    for c in 0..n {
        lp.set_free(c);
    }

    let sparse = |feat: &[f64], extra: &[(usize, f64)]| -> Vec<(usize, f64)> {
        let mut row: Vec<(usize, f64)> = feat
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(c, v)| (c, *v))
            .collect();
        row.extend_from_slice(extra);
        row
    };
    let negated = |feat: &[f64]| -> Vec<f64> { feat.iter().map(|v| -v).collect() };

    let mut shifted = vec![0.0f64; d];
    let mut feat = vec![0.0f64; n];
    let mut feat_shift = vec![0.0f64; n];
    let mut powers = Vec::new();
    for (j, sample) in samples.iter().enumerate() {
        if sample.x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: sample.x.len(),
            });
        }
        basis.features_into(&sample.x, &mut powers, &mut feat);
        // s_j >= +-(residual)
        lp.add_ineq(
            sparse(&feat, &[(layout.residual(j), -1.0)]),
            sample.y,
        );
        lp.add_ineq(
            sparse(&negated(&feat), &[(layout.residual(j), -1.0)]),
            -sample.y,
        );
        for l in 0..t.len() {
            let z = t.vector(l);
            for i in 0..d {
                shifted[i] = sample.x[i] + t.eta() * z[i];
            }
            basis.features_into(&shifted, &mut powers, &mut feat_shift);
            let diff: Vec<f64> = (0..n).map(|c| 0.5 * (feat[c] - feat_shift[c])).collect();
            lp.add_ineq(sparse(&diff, &[(layout.diff(j, l), -1.0)]), 0.0);
            lp.add_ineq(sparse(&negated(&diff), &[(layout.diff(j, l), -1.0)]), 0.0);
        }
        // Hinge row, scaled by m/10: sum_l u_jl - (m/10) h_j <= 0.6 m.
        let mut hinge_row: Vec<(usize, f64)> =
            (0..m).map(|l| (layout.diff(j, l), 1.0)).collect();
        hinge_row.push((layout.hinge(j), -(m as f64) / 10.0));
        lp.add_ineq(hinge_row, 0.6 * m as f64);
    }
    // Constraint 1, scaled by |S| m: sum_jl u_jl <= ns_cap |S| m.
    let c1: Vec<(usize, f64)> = (0..s_count)
        .flat_map(|j| (0..m).map(move |l| (j, l)))
        .map(|(j, l)| (layout.diff(j, l), 1.0))
        .collect();
    lp.add_ineq(c1, cfg.ns_cap() * (s_count * m) as f64);
    // Constraint 2, scaled by |S|: sum_j h_j <= psi_cap |S|.
    let c2: Vec<(usize, f64)> = (0..s_count).map(|j| (layout.hinge(j), 1.0)).collect();
    lp.add_ineq(c2, cfg.psi_cap() * s_count as f64);

    Ok((lp, layout))
}

/// One boosting round's record.
#[derive(Debug, Clone)]
pub struct RoundDiagnostics {
    pub round: usize,
    /// LP objective: sum of absolute residuals over the LP sample.
    pub lp_objective: f64,
    /// Selection metric: mean halved L1 error over the full round sample.
    pub halved_l1: f64,
    /// Constraint 1 value recomputed from scratch on the LP sample.
    pub constraint1: f64,
    /// Constraint 2 value recomputed from scratch on the LP sample.
    pub constraint2: f64,
    pub lp_pivots: usize,
    pub wall_secs: f64,
}

/// Output of the regression stage.
#[derive(Debug, Clone)]
pub struct RegressionOutcome {
    pub polynomial: Polynomial<f64>,
    pub selected_round: usize,
    pub rounds: Vec<RoundDiagnostics>,
}

/// Constraint values of `p` recomputed from scratch on `(samples, t)`:
/// (mean phi-tilde, mean of the psi hinge).
pub fn constraint_values(
    p: &Polynomial<f64>,
    samples: &[crate::dist::LabeledSample],
    t: &PerturbationSet<f64>,
) -> Result<(f64, f64)> {
    let phis: Vec<f64> = samples
        .iter()
        .map(|s| phi_hat(p, t, &s.x))
        .collect::<Result<_>>()?;
    let hinges: Vec<f64> = phis.iter().map(|&v| psi_term(v)).collect();
    Ok((pairwise_mean(&phis), pairwise_mean(&hinges)))
}

/// Mean halved L1 error of `p` against labeled samples.
pub fn halved_l1_error(p: &Polynomial<f64>, samples: &[crate::dist::LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySet {
            op: "halved_l1_error",
        });
    }
    let vals: Vec<f64> = samples
        .iter()
        .map(|s| p.evaluate(&s.x).map(|v| 0.5 * (v - s.y).abs()))
        .collect::<Result<_>>()?;
    Ok(pairwise_mean(&vals))
}

/// Run the boost-and-select loop: fresh sample and perturbation set per
/// round, one LP solve each, pick the round with the smallest empirical
/// halved L1 error (ties to the smallest round index).
pub fn learn_real_valued<S: SampleSource>(
    source: &mut S,
    cfg: &RegressionConfig,
) -> Result<RegressionOutcome> {
    cfg.validate()?;
    let d = source.dimension();
    let basis = MonomialBasis::new(d, cfg.degree)?;
    let mut rounds = Vec::with_capacity(cfg.boost_rounds);
    let mut best: Option<(usize, f64, Polynomial<f64>)> = None;

    for i in 0..cfg.boost_rounds {
        let start = Instant::now();
        let sample = source.draw(cfg.n_samples);
        if sample.is_empty() {
            return Err(Error::EmptySet {
                op: "learn_real_valued",
            });
        }
        let lp_sample = &sample[..sample.len().min(cfg.lp_sample_cap)];
        let t = PerturbationSet::for_radius(
            rng::substream(cfg.seed, &format!("lp-perturbations:{i}")),
            cfg.perturbations,
            d,
            cfg.radius,
        )?;
        let (lp, layout) = build_regression_lp(lp_sample, &t, cfg)?;
        let solution = lpsolve::solve(&lp)?;
        // The zero polynomial is always feasible, so anything else is a bug.
        if solution.status != LpStatus::Optimal {
            return Err(Error::InvalidArgument {
                op: "learn_real_valued",
                detail: format!("regression LP reported {:?}", solution.status),
            });
        }
        let coeffs = (0..layout.n_basis)
            .map(|c| solution.v[layout.coeff(c)])
            .collect::<Vec<_>>();
        let p = Polynomial::new(Arc::clone(&basis), coeffs)?;
        let metric = halved_l1_error(&p, &sample)?;
        let (c1, c2) = constraint_values(&p, lp_sample, &t)?;
        rounds.push(RoundDiagnostics {
            round: i,
            lp_objective: solution.objective,
            halved_l1: metric,
            constraint1: c1,
            constraint2: c2,
            lp_pivots: solution.pivots,
            wall_secs: start.elapsed().as_secs_f64(),
        });
        let better = match &best {
            None => true,
            Some((_, best_metric, _)) => metric < *best_metric,
        };
        if better {
            best = Some((i, metric, p));
        }
    }

    let (selected_round, _, polynomial) = best.expect("boost_rounds >= 1");
    Ok(RegressionOutcome {
        polynomial,
        selected_round,
        rounds,
    })
}
