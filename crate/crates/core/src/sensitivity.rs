//! Local noise sensitivity estimation against a fixed, seeded perturbation
//! set, and the batch functionals (NS, iso, psi) built on it.
//!
//! One perturbation set is shared by every query a trained model ever makes,
//! so the final hypothesis is a deterministic function: the set's seed and
//! size travel inside the serialized model. Batch reductions use a pairwise
//! tree sum so results do not depend on the number of worker threads.

use rayon::prelude::*;

use crate::num::{cast, Real};
use crate::poly::{EvalScratch, Polynomial, Ptf};
use crate::rng::DetRng;
use crate::util::{pairwise_mean, pairwise_sum};
use crate::{Error, Result};

/// Anything phi-hat can probe: returns a real response at a point.
/// Boolean classifiers return +-1, in which case |f(x) - f(x')|/2 is the
/// flip indicator.
pub trait RealQuery<F: Real>: Sync {
    fn dimension(&self) -> usize;
    fn query(&self, x: &[F]) -> F;
}

impl<F: Real> RealQuery<F> for Polynomial<F> {
    fn dimension(&self) -> usize {
        Polynomial::dimension(self)
    }
    fn query(&self, x: &[F]) -> F {
        let mut scratch = EvalScratch::new(self.basis());
        self.evaluate_with(&mut scratch, x)
    }
}

impl<F: Real> RealQuery<F> for Ptf<F> {
    fn dimension(&self) -> usize {
        self.poly.dimension()
    }
    fn query(&self, x: &[F]) -> F {
        let mut scratch = EvalScratch::new(self.poly.basis());
        self.label_with(&mut scratch, x)
    }
}

impl RealQuery<f64> for crate::dist::Halfspace {
    fn dimension(&self) -> usize {
        self.direction.len()
    }
    fn query(&self, x: &[f64]) -> f64 {
        self.label(x)
    }
}

/// Fixed set of m standard-Gaussian perturbation directions at noise scale
/// eta. Regenerating from (seed, m, d) reproduces the vectors bit-exactly.
#[derive(Debug, Clone)]
pub struct PerturbationSet<F: Real> {
    seed: u64,
    m: usize,
    d: usize,
    eta: F,
    /// Row-major m x d matrix.
    vectors: Vec<F>,
}

impl<F: Real> PerturbationSet<F> {
    pub fn new(seed: u64, m: usize, d: usize, eta: F) -> Result<Self> {
        if m == 0 || d == 0 || !(eta > F::zero()) {
            return Err(Error::InvalidArgument {
                op: "PerturbationSet::new",
                detail: format!("m = {m}, d = {d}, eta = {eta}"),
            });
        }
        let mut rng = DetRng::new(seed);
        let vectors = (0..m * d)
            .map(|_| F::from_f64(rng.next_gaussian()).unwrap())
            .collect();
        Ok(PerturbationSet {
            seed,
            m,
            d,
            eta,
            vectors,
        })
    }

    /// Perturbation set with the global convention eta = 10 r.
    pub fn for_radius(seed: u64, m: usize, d: usize, r: F) -> Result<Self> {
        Self::new(seed, m, d, cast::<F>(10.0) * r)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> F {
        self.eta
    }

    pub fn vector(&self, l: usize) -> &[F] {
        &self.vectors[l * self.d..(l + 1) * self.d]
    }

    /// Enforce the eta = 10 r convention against a caller-provided radius.
    pub fn check_radius(&self, r: F) -> Result<()> {
        let expected = cast::<F>(10.0) * r;
        if (self.eta - expected).abs() > cast::<F>(1e-9) * expected.max(F::one()) {
            return Err(Error::EtaMismatch {
                eta: self.eta.to_f64().unwrap_or(f64::NAN),
                expected: expected.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Empirical local noise sensitivity at `x`:
/// (1/m) sum_z |f(x) - f(x + eta z)| / 2.
///
/// For a +-1-valued f this is the fraction of perturbations that flip the
/// label, in [0, 1]; for a real-valued polynomial it is unbounded above.
pub fn phi_hat<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    x: &[F],
) -> Result<F> {
    if x.len() != t.d || f.dimension() != t.d {
        return Err(Error::DimensionMismatch {
            expected: t.d,
            got: x.len(),
        });
    }
    Ok(phi_hat_trusted(f, t, x))
}

#[inline]
pub(crate) fn phi_hat_trusted<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    x: &[F],
) -> F {
    let fx = f.query(x);
    let mut shifted = vec![F::zero(); t.d];
    let mut acc = F::zero();
    let half = cast::<F>(0.5);
    for l in 0..t.m {
        let z = t.vector(l);
        for i in 0..t.d {
            shifted[i] = x[i] + t.eta * z[i];
        }
        acc += (fx - f.query(&shifted)).abs() * half;
    }
    acc / F::from_usize(t.m).unwrap()
}

fn phi_batch<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    points: &[Vec<F>],
    op: &'static str,
) -> Result<Vec<F>> {
    if points.is_empty() {
        return Err(Error::EmptySet { op });
    }
    for x in points {
        if x.len() != t.d {
            return Err(Error::DimensionMismatch {
                expected: t.d,
                got: x.len(),
            });
        }
    }
    if f.dimension() != t.d {
        return Err(Error::DimensionMismatch {
            expected: t.d,
            got: f.dimension(),
        });
    }
    Ok(points
        .par_iter()
        .map(|x| phi_hat_trusted(f, t, x))
        .collect())
}

/// Empirical noise sensitivity: mean of phi-hat over the point set.
pub fn ns_hat<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    points: &[Vec<F>],
) -> Result<F> {
    Ok(pairwise_mean(&phi_batch(f, t, points, "ns_hat")?))
}

/// Empirical isolation probability: fraction of points with phi-hat strictly
/// above the threshold.
pub fn iso_hat<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    points: &[Vec<F>],
    threshold: F,
) -> Result<F> {
    if !(threshold > F::zero() && threshold < F::one()) {
        return Err(Error::InvalidArgument {
            op: "iso_hat",
            detail: format!("threshold {threshold} not in (0, 1)"),
        });
    }
    let phis = phi_batch(f, t, points, "iso_hat")?;
    let hits: Vec<F> = phis
        .iter()
        .map(|&p| if p > threshold { F::one() } else { F::zero() })
        .collect();
    Ok(pairwise_mean(&hits))
}

/// Hinge value 10 * max(0, phi - 0.6) at a single point.
#[inline]
pub fn psi_term<F: Real>(phi: F) -> F {
    cast::<F>(10.0) * (phi - cast::<F>(0.6)).max(F::zero())
}

/// Empirical psi: mean over the point set of 10 * max(0, phi-hat - 0.6).
/// Upper-bounds iso-hat at threshold 0.7.
pub fn psi_hat<F: Real, Q: RealQuery<F> + ?Sized>(
    f: &Q,
    t: &PerturbationSet<F>,
    points: &[Vec<F>],
) -> Result<F> {
    let phis = phi_batch(f, t, points, "psi_hat")?;
    let terms: Vec<F> = phis.iter().map(|&p| psi_term(p)).collect();
    Ok(pairwise_mean(&terms))
}

/// Per-point sensitivity profile of a polynomial: the polynomial's values at
/// x and at every perturbation of x, with the perturbed values sorted.
///
/// From this, phi-hat of sign(p - t) is an O(log m) lookup for any threshold
/// t, which is what makes threshold sweeps affordable. Results are bit-equal
/// to evaluating [`phi_hat`] on the corresponding PTF.
#[derive(Debug, Clone)]
pub struct PhiProfile<F: Real> {
    pub value_at_x: F,
    sorted_perturbed: Vec<F>,
}

impl<F: Real> PhiProfile<F> {
    pub fn new(p: &Polynomial<F>, t: &PerturbationSet<F>, x: &[F]) -> Result<Self> {
        if x.len() != t.d || p.dimension() != t.d {
            return Err(Error::DimensionMismatch {
                expected: t.d,
                got: x.len(),
            });
        }
        let mut scratch = EvalScratch::new(p.basis());
        let value_at_x = p.evaluate_with(&mut scratch, x);
        let mut shifted = vec![F::zero(); t.d];
        let mut vals = Vec::with_capacity(t.m);
        for l in 0..t.m {
            let z = t.vector(l);
            for i in 0..t.d {
                shifted[i] = x[i] + t.eta * z[i];
            }
            vals.push(p.evaluate_with(&mut scratch, &shifted));
        }
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite polynomial values"));
        Ok(PhiProfile {
            value_at_x,
            sorted_perturbed: vals,
        })
    }

    /// Number of perturbed values strictly below `t`.
    fn count_below(&self, t: F) -> usize {
        self.sorted_perturbed.partition_point(|&v| v < t)
    }

    /// phi-hat of the PTF sign(p - t) at this profile's point.
    ///
    /// sign(v - t) is +1 iff v >= t, so the flip count against sign(x-value)
    /// is the number of perturbed values on the other side of t.
    pub fn phi_at_threshold(&self, t: F) -> F {
        let m = self.sorted_perturbed.len();
        let below = self.count_below(t);
        let flips = if self.value_at_x >= t {
            below
        } else {
            m - below
        };
        F::from_usize(flips).unwrap() / F::from_usize(m).unwrap()
    }

    /// Label sign(p(x) - t) in {-1, +1}.
    pub fn label_at_threshold(&self, t: F) -> F {
        crate::num::sign_pm(self.value_at_x - t)
    }
}

/// Profiles for a batch of points, computed in parallel, index order kept.
pub fn profile_points<F: Real>(
    p: &Polynomial<F>,
    t: &PerturbationSet<F>,
    points: &[Vec<F>],
) -> Result<Vec<PhiProfile<F>>> {
    if points.is_empty() {
        return Err(Error::EmptySet {
            op: "profile_points",
        });
    }
    points
        .par_iter()
        .map(|x| PhiProfile::new(p, t, x))
        .collect()
}

/// Deterministic mean of per-point values (pairwise tree sum).
pub fn mean_of<F: Real>(values: &[F]) -> F {
    pairwise_mean(values)
}

/// Deterministic sum of per-point values (pairwise tree sum).
pub fn sum_of<F: Real>(values: &[F]) -> F {
    pairwise_sum(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Halfspace;
    use crate::gauss::gaussian_cdf;
    use crate::poly::MonomialBasis;
    use std::sync::Arc;

    fn coordinate_halfspace(d: usize, tau: f64) -> Halfspace {
        let mut u = vec![0.0; d];
        u[0] = 1.0;
        Halfspace::new(u, tau).unwrap()
    }

    fn gaussian_points(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
        let mut rng = DetRng::new(seed);
        (0..n).map(|_| rng.gaussian_vec(d)).collect()
    }

    fn linear_ptf(d: usize, tau: f64) -> Ptf<f64> {
        let b = MonomialBasis::new(d, 1).unwrap();
        let mut coeffs = vec![0.0; b.len()];
        let mut e = vec![0u32; d];
        e[0] = 1;
        coeffs[b.index_of(&e).unwrap()] = 1.0;
        coeffs[0] = -tau;
        Ptf::new(Polynomial::new(b, coeffs).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn perturbation_set_regenerates_bit_exactly() {
        let a = PerturbationSet::<f64>::new(9, 128, 5, 0.3).unwrap();
        let b = PerturbationSet::<f64>::new(9, 128, 5, 0.3).unwrap();
        for l in 0..128 {
            assert_eq!(a.vector(l), b.vector(l));
        }
    }

    #[test]
    fn eta_convention_checked() {
        let t = PerturbationSet::<f64>::for_radius(1, 16, 3, 0.05).unwrap();
        assert!((t.eta() - 0.5).abs() < 1e-15);
        assert!(t.check_radius(0.05).is_ok());
        assert!(t.check_radius(0.06).is_err());
    }

    #[test]
    fn constant_function_has_zero_phi() {
        let b = MonomialBasis::new(3, 1).unwrap();
        let f = Ptf::new(Polynomial::constant(Arc::clone(&b), 5.0), 0.0).unwrap();
        let t = PerturbationSet::<f64>::new(2, 256, 3, 0.4).unwrap();
        for x in gaussian_points(3, 20, 3) {
            assert_eq!(phi_hat(&f, &t, &x).unwrap(), 0.0);
        }
        let pts = gaussian_points(4, 50, 3);
        assert_eq!(ns_hat(&f, &t, &pts).unwrap(), 0.0);
        assert_eq!(iso_hat(&f, &t, &pts, 0.5).unwrap(), 0.0);
        assert_eq!(psi_hat(&f, &t, &pts).unwrap(), 0.0);
    }

    #[test]
    fn phi_at_origin_of_coordinate_halfspace() {
        // Half the Gaussian perturbations flip sign(x1) at the origin.
        let f = coordinate_halfspace(4, 0.0);
        let m = 4096;
        let t = PerturbationSet::<f64>::new(5, m, 4, 0.7).unwrap();
        let phi = phi_hat(&f, &t, &vec![0.0; 4]).unwrap();
        assert!((phi - 0.5).abs() <= 3.0 / (m as f64).sqrt(), "phi {phi}");
    }

    #[test]
    fn phi_one_eta_from_boundary_matches_gaussian_cdf() {
        // x1 = tau + eta: flip probability Phi(-1) ~ 0.1587.
        let tau = 0.3;
        let f = coordinate_halfspace(3, tau);
        let m = 65_536;
        let eta = 0.25;
        let t = PerturbationSet::<f64>::new(6, m, 3, eta).unwrap();
        let mut x = vec![0.0; 3];
        x[0] = tau + eta;
        let phi = phi_hat(&f, &t, &x).unwrap();
        let want = gaussian_cdf(-1.0f64);
        assert!((phi - want).abs() < 4.0 / (m as f64).sqrt(), "phi {phi} want {want}");
    }

    #[test]
    fn ns_of_halfspace_matches_arctan_formula() {
        // For sign(x1) under Gaussian data and scale eta, the flip
        // probability over (x, z) is arccos(1/sqrt(1+eta^2))/pi
        // = arctan(eta)/pi.
        let f = coordinate_halfspace(5, 0.0);
        let eta = 0.8;
        let t = PerturbationSet::<f64>::new(7, 8192, 5, eta).unwrap();
        let pts = gaussian_points(8, 12_000, 5);
        let ns = ns_hat(&f, &t, &pts).unwrap();
        let want = eta.atan() / std::f64::consts::PI;
        assert!((ns - want).abs() < 0.01, "ns {ns} want {want}");
    }

    #[test]
    fn halfspace_ns_below_60r_and_psi_zero() {
        for r in [0.01f64, 0.05] {
            let f = coordinate_halfspace(4, 0.2);
            let t = PerturbationSet::<f64>::for_radius(11, 2048, 4, r).unwrap();
            let pts = gaussian_points(12, 4_000, 4);
            let ns = ns_hat(&f, &t, &pts).unwrap();
            assert!(ns <= 60.0 * r, "ns {ns} vs 60r {}", 60.0 * r);
            assert_eq!(psi_hat(&f, &t, &pts).unwrap(), 0.0);
            assert_eq!(iso_hat(&f, &t, &pts, 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn isolated_sign_pocket_detected() {
        // f = sign(0.0001 - (x1 - 3)^2) is +1 only on a sliver around x1 = 3;
        // at (3, 0, ...) with moderate eta nearly all perturbations flip.
        let d = 3;
        let b = MonomialBasis::new(d, 2).unwrap();
        let mut coeffs = vec![0.0; b.len()];
        coeffs[0] = 0.0001 - 9.0;
        let mut e = vec![0u32; d];
        e[0] = 1;
        coeffs[b.index_of(&e).unwrap()] = 6.0;
        e[0] = 2;
        coeffs[b.index_of(&e).unwrap()] = -1.0;
        let f = Ptf::new(Polynomial::new(b, coeffs).unwrap(), 0.0).unwrap();
        let x = vec![3.0, 0.0, 0.0];
        assert_eq!(f.label(&x).unwrap(), 1.0);

        // Monte-Carlo oracle at m = 1e5.
        let t = PerturbationSet::<f64>::new(13, 100_000, d, 0.5).unwrap();
        let phi = phi_hat(&f, &t, &x).unwrap();
        assert!(phi > 0.95, "phi {phi}");

        // A set containing the pocket point contributes to iso at 0.8.
        let mut pts = gaussian_points(14, 63, d);
        pts.push(x);
        let small = PerturbationSet::<f64>::new(13, 2048, d, 0.5).unwrap();
        let iso = iso_hat(&f, &small, &pts, 0.8).unwrap();
        assert!(iso >= 1.0 / 64.0, "iso {iso}");
    }

    #[test]
    fn psi_of_synthetic_constant_phi() {
        // If phi-hat were 0.7 at every point, psi-hat would be 10*(0.7-0.6) = 1.
        let vals: Vec<f64> = vec![psi_term(0.7f64); 10];
        let m = pairwise_mean(&vals);
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_dominates_iso_at_0_7() {
        let mut rng = DetRng::new(15);
        let d = 3;
        let b = MonomialBasis::new(d, 2).unwrap();
        let t = PerturbationSet::<f64>::new(16, 512, d, 0.6).unwrap();
        let pts = gaussian_points(17, 300, d);
        for _ in 0..10 {
            let coeffs: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-1.0, 1.0)).collect();
            let f = Ptf::new(
                Polynomial::new(Arc::clone(&b), coeffs).unwrap(),
                rng.next_range(-1.0, 1.0),
            )
            .unwrap();
            let psi = psi_hat(&f, &t, &pts).unwrap();
            let iso = iso_hat(&f, &t, &pts, 0.7).unwrap();
            assert!(
                psi >= 10.0 * 0.1 * iso - 1e-12,
                "psi {psi} vs iso bound {}",
                iso
            );
        }
    }

    #[test]
    fn phi_convexity_in_the_polynomial() {
        let mut rng = DetRng::new(18);
        let d = 3;
        let b = MonomialBasis::new(d, 2).unwrap();
        let t = PerturbationSet::<f64>::new(19, 256, d, 0.5).unwrap();
        for _ in 0..40 {
            let c1: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-1.0, 1.0)).collect();
            let c2: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-1.0, 1.0)).collect();
            let alpha = rng.next_f64();
            let mix: Vec<f64> = (0..b.len())
                .map(|j| alpha * c1[j] + (1.0 - alpha) * c2[j])
                .collect();
            let p1 = Polynomial::new(Arc::clone(&b), c1).unwrap();
            let p2 = Polynomial::new(Arc::clone(&b), c2).unwrap();
            let pm = Polynomial::new(Arc::clone(&b), mix).unwrap();
            let x = rng.gaussian_vec(d);
            let lhs = phi_hat(&pm, &t, &x).unwrap();
            let rhs = alpha * phi_hat(&p1, &t, &x).unwrap()
                + (1.0 - alpha) * phi_hat(&p2, &t, &x).unwrap();
            assert!(lhs <= rhs + 1e-10, "convexity violated: {lhs} > {rhs}");
            // Same for the psi summand.
            assert!(
                psi_term(lhs) <= alpha * psi_term(phi_hat(&p1, &t, &x).unwrap())
                    + (1.0 - alpha) * psi_term(phi_hat(&p2, &t, &x).unwrap())
                    + 1e-10
            );
        }
    }

    #[test]
    fn rounding_bound_per_point() {
        // Grid-averaging phi-hat of sign(p - t) over t in [-1,1] stays within
        // grid error of phi-hat of the clipped polynomial.
        struct Clipped<'a>(&'a Polynomial<f64>);
        impl<'a> RealQuery<f64> for Clipped<'a> {
            fn dimension(&self) -> usize {
                self.0.dimension()
            }
            fn query(&self, x: &[f64]) -> f64 {
                self.0.query(x).clamp(-1.0, 1.0)
            }
        }
        let mut rng = DetRng::new(20);
        let d = 2;
        let b = MonomialBasis::new(d, 3).unwrap();
        let t = PerturbationSet::<f64>::new(21, 512, d, 0.4).unwrap();
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-0.5, 0.5)).collect();
            let p = Polynomial::new(Arc::clone(&b), coeffs).unwrap();
            let x = rng.gaussian_vec(d);
            let phi_real = phi_hat(&Clipped(&p), &t, &x).unwrap();
            let grid = 201;
            let mut acc = 0.0;
            for g in 0..grid {
                let thr = -1.0 + 2.0 * (g as f64 + 0.5) / grid as f64;
                let f = Ptf::new(p.clone(), thr).unwrap();
                acc += phi_hat(&f, &t, &x).unwrap();
            }
            let avg = acc / grid as f64;
            assert!(
                avg <= phi_real + 0.01,
                "rounding bound violated: {avg} vs {phi_real}"
            );
        }
    }

    #[test]
    fn seed_determinism_of_phi() {
        let d = 4;
        let b = MonomialBasis::new(d, 2).unwrap();
        let mut rng = DetRng::new(22);
        let coeffs: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-1.0, 1.0)).collect();
        let p = Polynomial::new(b, coeffs).unwrap();
        let t1 = PerturbationSet::<f64>::new(23, 512, d, 0.3).unwrap();
        let t2 = PerturbationSet::<f64>::new(23, 512, d, 0.3).unwrap();
        for x in gaussian_points(24, 20, d) {
            let a = phi_hat(&p, &t1, &x).unwrap();
            let b2 = phi_hat(&p, &t2, &x).unwrap();
            assert_eq!(a.to_bits(), b2.to_bits());
        }
    }

    #[test]
    fn monte_carlo_accuracy_against_closed_form() {
        // Halfspace phi has the 1-D closed form Phi(-|x1 - tau| / eta).
        let tau = 0.1;
        let f = coordinate_halfspace(3, tau);
        let eta = 0.5;
        let m = 4096;
        let t = PerturbationSet::<f64>::new(25, m, 3, eta).unwrap();
        let pts = gaussian_points(26, 1000, 3);
        let bound = 4.0 / (m as f64).sqrt();
        let mut bad = 0;
        for x in &pts {
            let phi = phi_hat(&f, &t, x).unwrap();
            let exact = gaussian_cdf(-((x[0] - tau).abs()) / eta);
            if (phi - exact).abs() > bound {
                bad += 1;
            }
        }
        assert!(
            (bad as f64) < 0.01 * pts.len() as f64,
            "{bad} of {} points off by more than {bound}",
            pts.len()
        );
    }

    #[test]
    fn profile_matches_direct_phi_bitwise() {
        let d = 3;
        let b = MonomialBasis::new(d, 2).unwrap();
        let mut rng = DetRng::new(27);
        let coeffs: Vec<f64> = (0..b.len()).map(|_| rng.next_range(-1.0, 1.0)).collect();
        let p = Polynomial::new(b, coeffs).unwrap();
        let t = PerturbationSet::<f64>::new(28, 777, d, 0.45).unwrap();
        for x in gaussian_points(29, 25, d) {
            let profile = PhiProfile::new(&p, &t, &x).unwrap();
            for thr in [-0.9, -0.3, 0.0, 0.2, 0.77] {
                let f = Ptf::new(p.clone(), thr).unwrap();
                let direct = phi_hat(&f, &t, &x).unwrap();
                let via = profile.phi_at_threshold(thr);
                assert_eq!(direct.to_bits(), via.to_bits(), "thr {thr}");
                assert_eq!(profile.label_at_threshold(thr), f.label(&x).unwrap());
            }
        }
    }

    #[test]
    fn empty_set_rejected() {
        let b = MonomialBasis::new(2, 1).unwrap();
        let p = Polynomial::constant(b, 1.0f64);
        let t = PerturbationSet::<f64>::new(1, 8, 2, 0.1).unwrap();
        assert!(ns_hat(&p, &t, &[]).is_err());
    }
}
