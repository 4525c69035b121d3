//! Local smoothing corrector: flips the label at isolated points.
//!
//! The decision thresholds 0.8 (flip) and 0.1 (robustness certificate) are
//! fixed constants of the method, not tunables; the stability argument that
//! a certified point cannot flip within radius r depends on them.

use crate::num::Real;
use crate::sensitivity::{phi_hat, PerturbationSet, RealQuery};
use crate::Result;

/// Corrected label at `x`: query g, estimate the local noise sensitivity
/// against the fixed perturbation set (eta = 10 r), and flip the label when
/// the estimate exceeds 0.8.
pub fn lca_label<F: Real, Q: RealQuery<F> + ?Sized>(
    x: &[F],
    g: &Q,
    r: F,
    t: &PerturbationSet<F>,
) -> Result<F> {
    t.check_radius(r)?;
    let phi = phi_hat(g, t, x)?;
    let gx = g.query(x);
    if phi > crate::num::cast(0.8) {
        Ok(-gx)
    } else {
        Ok(gx)
    }
}

/// Certificate indicator: true iff phi-hat(g, x) <= 0.1 - eps_margin.
///
/// With eps_margin = 0 this is the partition stage's robust indicator; the
/// verifier passes a positive margin to absorb estimator error.
pub fn robust_indicator<F: Real, Q: RealQuery<F> + ?Sized>(
    x: &[F],
    g: &Q,
    r: F,
    t: &PerturbationSet<F>,
    eps_margin: F,
) -> Result<bool> {
    t.check_radius(r)?;
    let phi = phi_hat(g, t, x)?;
    Ok(phi <= crate::num::cast::<F>(0.1) - eps_margin)
}
