//! Hypothesis compilation and the per-point robustness verifier.
//!
//! `compile` turns a [`HypothesisData`] package into the evaluation closure
//! (and the four rounded PTFs) after checking every structural invariant.
//! `Verifier::verify` is the point check: reject unless the package matches
//! the trusted one exactly, the interval's PTF has small estimated local
//! noise sensitivity at x, and x is clear of every interval boundary.
//!
//! Template equality is canonical-package equality: the hypothesis is fully
//! determined by its package, so structural equality is the decidable
//! analogue of circuit equality. Soundness of an accept is conditional on
//! the fixed-seed sensitivity estimator being accurate at the queried
//! points; the estimator's seed and size are part of the package, so the
//! verifier and the hypothesis share every random bit.

use std::sync::Arc;

use crate::partition::{HypothesisData, PartitionSpec, HYPOTHESIS_FORMAT_VERSION};
use crate::poly::{MonomialBasis, Polynomial, Ptf};
use crate::sensitivity::{phi_hat, PerturbationSet};
use crate::util::dot;
use crate::{Error, Result};

/// Executable form of a hypothesis package.
#[derive(Debug, Clone)]
pub struct CompiledHypothesis {
    data: HypothesisData,
    ptfs: Vec<Ptf<f64>>,
    pset: PerturbationSet<f64>,
    partition: PartitionSpec,
}

fn invalid(field: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidHypothesis {
        field,
        detail: detail.into(),
    }
}

/// Validate `data` and build its evaluator plus the four rounded PTFs.
/// Compilation is deterministic: the perturbation set is regenerated from
/// the stored seed and size at scale eta = 10 r.
pub fn compile(data: &HypothesisData) -> Result<CompiledHypothesis> {
    if data.version != HYPOTHESIS_FORMAT_VERSION {
        return Err(invalid(
            "version",
            format!("unsupported version {}", data.version),
        ));
    }
    if data.d < 1 {
        return Err(invalid("d", "dimension must be >= 1"));
    }
    if data.k < 1 {
        return Err(invalid("k", "degree must be >= 1"));
    }
    if !(data.r > 0.0 && data.r < 1.0) {
        return Err(invalid("r", format!("radius {} not in (0, 1)", data.r)));
    }
    if data.phi_m < 1 {
        return Err(invalid("phi_m", "perturbation count must be >= 1"));
    }
    let basis = MonomialBasis::new(data.d, data.k)?;
    if data.coefficients.len() != basis.len() {
        return Err(invalid(
            "coefficients",
            format!(
                "expected {} coefficients for d = {}, k = {}, got {}",
                basis.len(),
                data.d,
                data.k,
                data.coefficients.len()
            ),
        ));
    }
    if data.coefficients.iter().any(|c| !c.is_finite()) {
        return Err(invalid("coefficients", "non-finite coefficient"));
    }
    for t in data.thresholds {
        if !(-1.0..=1.0).contains(&t) {
            return Err(invalid("thresholds", format!("threshold {t} outside [-1, 1]")));
        }
    }
    let wsum: f64 = data.weights.iter().sum();
    if data.weights.iter().any(|&w| w < -1e-12) || (wsum - 1.0).abs() > 1e-9 {
        return Err(invalid("weights", format!("weights {:?}", data.weights)));
    }
    if data.direction.len() != data.d {
        return Err(invalid(
            "direction",
            format!("length {} != d = {}", data.direction.len(), data.d),
        ));
    }
    let partition = data.partition();
    partition.validate(&data.weights).map_err(|e| match e {
        Error::InvalidHypothesis { field, detail } => Error::InvalidHypothesis { field, detail },
        other => other,
    })?;

    let poly = Polynomial::new(Arc::clone(&basis), data.coefficients.clone())?;
    let ptfs = data
        .thresholds
        .iter()
        .map(|&t| Ptf::new(poly.clone(), t))
        .collect::<Result<Vec<_>>>()?;
    let pset = PerturbationSet::for_radius(data.phi_seed, data.phi_m, data.d, data.r)?;
    Ok(CompiledHypothesis {
        data: data.clone(),
        ptfs,
        pset,
        partition,
    })
}

impl CompiledHypothesis {
    pub fn data(&self) -> &HypothesisData {
        &self.data
    }

    pub fn partition(&self) -> &PartitionSpec {
        &self.partition
    }

    pub fn perturbations(&self) -> &PerturbationSet<f64> {
        &self.pset
    }

    /// The four rounded PTFs h_i = sign(p - t_i).
    pub fn ptfs(&self) -> &[Ptf<f64>] {
        &self.ptfs
    }

    pub fn dimension(&self) -> usize {
        self.data.d
    }

    /// Hypothesis label at `x`: the corrected label of the PTF owning x's
    /// interval. A pure function of (package, x).
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.data.d {
            return Err(Error::DimensionMismatch {
                expected: self.data.d,
                got: x.len(),
            });
        }
        let i = self.partition.interval_of(x);
        crate::corrector::lca_label(x, &self.ptfs[i], self.data.r, &self.pset)
    }

    /// Estimated local noise sensitivity of the interval-owning PTF at `x`.
    pub fn phi_at(&self, x: &[f64]) -> Result<f64> {
        let i = self.partition.interval_of(x);
        phi_hat(&self.ptfs[i], &self.pset, x)
    }

    /// Distance from x's projection to the nearest interval boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let proj = dot(&self.partition.direction, x);
        self.partition
            .boundaries
            .iter()
            .map(|c| (proj - c).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// The submitted package differs from the trusted one.
    Template,
    /// The interval PTF's phi-hat exceeds 0.1 - eps at x.
    Sensitivity,
    /// x projects within r of an interval boundary.
    Boundary,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::Template => "template",
            RejectReason::Sensitivity => "sensitivity",
            RejectReason::Boundary => "boundary",
        }
    }
}

/// Outcome of a point verification, carrying the measured quantities for
/// the verdict stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub accept: bool,
    pub reason: Option<RejectReason>,
    pub phi: Option<f64>,
    pub boundary_distance: Option<f64>,
}

impl Verdict {
    fn accept(phi: f64, dist: f64) -> Self {
        Verdict {
            accept: true,
            reason: None,
            phi: Some(phi),
            boundary_distance: Some(dist),
        }
    }

    fn reject(reason: RejectReason, phi: Option<f64>, dist: Option<f64>) -> Self {
        Verdict {
            accept: false,
            reason: Some(reason),
            phi,
            boundary_distance: dist,
        }
    }
}

/// Point verifier bound to a trusted package.
#[derive(Debug, Clone)]
pub struct Verifier {
    compiled: CompiledHypothesis,
    eps: f64,
}

impl Verifier {
    /// `eps` is the sensitivity-estimator accuracy margin subtracted from
    /// the 0.1 certificate threshold (0 gives the partition stage's robust
    /// indicator).
    pub fn new(trusted: &HypothesisData, eps: f64) -> Result<Self> {
        if !(0.0..0.1).contains(&eps) {
            return Err(Error::InvalidArgument {
                op: "Verifier::new",
                detail: format!("eps {eps} not in [0, 0.1)"),
            });
        }
        Ok(Verifier {
            compiled: compile(trusted)?,
            eps,
        })
    }

    pub fn compiled(&self) -> &CompiledHypothesis {
        &self.compiled
    }

    /// Verify one point of a submitted package against the trusted one.
    ///
    /// Accept implies no x' with ||x' - x|| <= r flips the compiled
    /// hypothesis, conditional on the fixed-seed estimator being accurate at
    /// the queried points.
    pub fn verify(&self, submitted: &HypothesisData, x: &[f64]) -> Result<Verdict> {
        if x.len() != self.compiled.data.d {
            return Err(Error::DimensionMismatch {
                expected: self.compiled.data.d,
                got: x.len(),
            });
        }
        if submitted != &self.compiled.data {
            return Ok(Verdict::reject(RejectReason::Template, None, None));
        }
        let phi = self.compiled.phi_at(x)?;
        if phi > 0.1 - self.eps {
            return Ok(Verdict::reject(RejectReason::Sensitivity, Some(phi), None));
        }
        let dist = self.compiled.boundary_distance(x);
        if dist <= self.compiled.data.r {
            return Ok(Verdict::reject(
                RejectReason::Boundary,
                Some(phi),
                Some(dist),
            ));
        }
        Ok(Verdict::accept(phi, dist))
    }
}

/// One-shot verification of a single point.
pub fn verify_point(
    submitted: &HypothesisData,
    trusted: &HypothesisData,
    x: &[f64],
    eps: f64,
) -> Result<Verdict> {
    Verifier::new(trusted, eps)?.verify(submitted, x)
}
