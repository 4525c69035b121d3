//! Adversarial-example search inside the L2 ball of radius r.
//!
//! Three documented probes, each candidate re-verified before it is
//! reported: (i) a straight line along the polynomial gradient toward the
//! active rounding threshold, with bisection refinement of the crossing;
//! (ii) steps along the partition direction toward nearby interval
//! boundaries; (iii) random directions on the sphere with bisection. Absence
//! of a finding is a valid result; the search is a lower-bound heuristic by
//! design, certification provides the upper bound.

use crate::rng::DetRng;
use crate::util::{dot, norm2};
use crate::verify::CompiledHypothesis;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct AttackBudget {
    pub restarts: usize,
    /// Bisection iterations per refinement.
    pub steps: usize,
}

impl Default for AttackBudget {
    fn default() -> Self {
        AttackBudget {
            restarts: 8,
            steps: 30,
        }
    }
}

fn offset_point(x: &[f64], dir: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, b)| a + alpha * b).collect()
}

/// Search for x' with ||x' - x||_2 <= r and h(x') != h(x).
pub fn attack(
    h: &CompiledHypothesis,
    x: &[f64],
    r: f64,
    budget: &AttackBudget,
    seed: u64,
) -> Result<Option<Vec<f64>>> {
    let baseline = h.evaluate(x)?;
    let d = x.len();

    let mut accept = |candidate: Vec<f64>| -> Result<Option<Vec<f64>>> {
        let dist = {
            let diff: Vec<f64> = candidate.iter().zip(x).map(|(a, b)| a - b).collect();
            norm2(&diff)
        };
        if dist <= r + 1e-9 && h.evaluate(&candidate)? != baseline {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    };

    // (i) Gradient probe toward the active threshold.
    let data = h.data();
    let interval = h.partition().interval_of(x);
    let poly = &h.ptfs()[interval].poly;
    let grad = poly.gradient_at(x)?;
    let gnorm = norm2(&grad);
    if gnorm > 1e-12 {
        let value = poly.evaluate(x)?;
        let t = data.thresholds[interval];
        let sgn = if value >= t { -1.0 } else { 1.0 };
        let dir: Vec<f64> = grad.iter().map(|g| sgn * g / gnorm).collect();
        // Bisect the crossing of p - t along the segment when it changes
        // sign; otherwise fall back to a few fixed depths.
        let at = |alpha: f64| -> Result<f64> {
            poly.evaluate(&offset_point(x, &dir, alpha))
        };
        let mut candidates: Vec<f64> = vec![r, 0.5 * r, 0.25 * r];
        if (at(r)? - t).signum() != (value - t).signum() {
            let (mut lo, mut hi) = (0.0f64, r);
            for _ in 0..budget.steps {
                let mid = 0.5 * (lo + hi);
                if (at(mid)? - t).signum() == (value - t).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // Just past the crossing, clamped into the ball.
            candidates.insert(0, (hi + (hi - lo)).min(r));
            candidates.insert(1, hi);
        }
        for alpha in candidates {
            if let Some(found) = accept(offset_point(x, &dir, alpha))? {
                return Ok(Some(found));
            }
        }
    }

    // (ii) Partition-boundary probe along +-u*.
    let u = &h.partition().direction;
    let proj = dot(u, x);
    for c in h.partition().boundaries {
        let gap = c - proj;
        if gap.abs() < r {
            let room = r - gap.abs();
            for overshoot in [room * 0.5, room * 0.05, 0.0] {
                let alpha = gap + gap.signum() * overshoot;
                if alpha.abs() <= r {
                    if let Some(found) = accept(offset_point(x, u, alpha))? {
                        return Ok(Some(found));
                    }
                }
            }
        }
    }

    // (iii) Random directions with bisection refinement.
    let mut rng = DetRng::new(seed);
    for _ in 0..budget.restarts {
        let dir = rng.unit_vector(d);
        for depth in [r, 0.75 * r, 0.5 * r, 0.25 * r] {
            let candidate = offset_point(x, &dir, depth);
            if h.evaluate(&candidate)? != baseline {
                // Refine toward the smallest flipping radius, keeping the
                // last flipping point seen.
                let (mut lo, mut hi) = (0.0f64, depth);
                let mut witness = candidate;
                for _ in 0..budget.steps {
                    let mid = 0.5 * (lo + hi);
                    let probe = offset_point(x, &dir, mid);
                    if h.evaluate(&probe)? != baseline {
                        hi = mid;
                        witness = probe;
                    } else {
                        lo = mid;
                    }
                }
                if let Some(found) = accept(witness)? {
                    return Ok(Some(found));
                }
            }
        }
    }

    Ok(None)
}
