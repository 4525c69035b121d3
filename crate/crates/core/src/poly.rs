//! Multivariate polynomials over a graded-lexicographic monomial basis of
//! bounded total degree.
//!
//! The basis is fully determined by (dimension, degree), so serialized models
//! only carry coefficient vectors; exponents are reconstructed on load.
//! Polynomials and bases are immutable after construction.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::num::{sign_pm, Real};
use crate::{Error, Result};

/// Default cap on basis size (number of monomials).
pub const DEFAULT_BASIS_CAP: u128 = 1_000_000;

/// Monomial basis of all exponent vectors in d variables with total degree
/// <= k, in graded-lexicographic order. Index 0 is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    dimension: usize,
    degree: usize,
    /// Flat row-major exponent table, `len() = size * dimension`.
    exponents: Vec<u32>,
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Graded-lex comparator: by total degree first, then lexicographically with
/// earlier coordinates more significant (so (1,0) precedes (0,1)).
fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

impl MonomialBasis {
    /// Canonical basis for dimension `d` and total degree `k`, capped at the
    /// default basis size.
    pub fn new(d: usize, k: usize) -> Result<Arc<Self>> {
        Self::with_cap(d, k, DEFAULT_BASIS_CAP)
    }

    /// Same as [`MonomialBasis::new`] with an explicit size cap.
    pub fn with_cap(d: usize, k: usize, cap: u128) -> Result<Arc<Self>> {
        if d == 0 || k == 0 {
            return Err(Error::InvalidArgument {
                op: "make_basis",
                detail: format!("d = {d}, k = {k} must both be >= 1"),
            });
        }
        let size = binomial((d + k) as u128, k as u128).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::BasisTooLarge { d, k, size, cap });
        }
        let size = size as usize;
        let mut exponents = Vec::with_capacity(size * d);
        let mut current = vec![0u32; d];
        for total in 0..=k as u32 {
            emit_degree(&mut exponents, &mut current, 0, total);
        }
        debug_assert_eq!(exponents.len(), size * d);
        Ok(Arc::new(MonomialBasis {
            dimension: d,
            degree: k,
            exponents,
        }))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.exponents.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent vector of monomial `j`.
    pub fn exponent(&self, j: usize) -> &[u32] {
        &self.exponents[j * self.dimension..(j + 1) * self.dimension]
    }

    /// Index of an exponent vector in the canonical order, if present.
    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        if exps.len() != self.dimension {
            return None;
        }
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match grlex_cmp(self.exponent(mid), exps) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Evaluate every monomial at `x` into `out` (the feature expansion).
    pub fn features_into<F: Real>(&self, x: &[F], powers: &mut Vec<F>, out: &mut [F]) {
        let d = self.dimension;
        let k = self.degree;
        // powers[i * (k+1) + e] = x_i^e
        powers.clear();
        powers.reserve(d * (k + 1));
        for &xi in x {
            let mut p = F::one();
            powers.push(p);
            for _ in 0..k {
                p = p * xi;
                powers.push(p);
            }
        }
        for j in 0..self.len() {
            let exps = self.exponent(j);
            let mut v = F::one();
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    v = v * powers[i * (k + 1) + e as usize];
                }
            }
            out[j] = v;
        }
    }

    /// Feature expansion of `x`: the vector of monomial values.
    pub fn features<F: Real>(&self, x: &[F]) -> Result<Vec<F>> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        let mut out = vec![F::zero(); self.len()];
        let mut powers = Vec::new();
        self.features_into(x, &mut powers, &mut out);
        Ok(out)
    }
}

fn emit_degree(out: &mut Vec<u32>, current: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.extend_from_slice(current);
        current[pos] = 0;
        return;
    }
    // Lex-descending within a degree block: larger leading exponents first.
    for e in (0..=remaining).rev() {
        current[pos] = e;
        emit_degree(out, current, pos + 1, remaining - e);
        current[pos] = 0;
    }
}

/// Dense polynomial: coefficients against a shared [`MonomialBasis`].
#[derive(Debug, Clone)]
pub struct Polynomial<F: Real> {
    basis: Arc<MonomialBasis>,
    coefficients: Vec<F>,
}

/// Serialization fragment for a polynomial: the basis is reconstructed from
/// (d, k), exponents are never stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialRepr {
    pub d: usize,
    pub k: usize,
    pub coefficients: Vec<f64>,
}

impl<F: Real> Polynomial<F> {
    pub fn new(basis: Arc<MonomialBasis>, coefficients: Vec<F>) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument {
                op: "Polynomial::new",
                detail: "non-finite coefficient".into(),
            });
        }
        Ok(Polynomial {
            basis,
            coefficients,
        })
    }

    /// The zero polynomial.
    pub fn zero(basis: Arc<MonomialBasis>) -> Self {
        let n = basis.len();
        Polynomial {
            basis,
            coefficients: vec![F::zero(); n],
        }
    }

    /// Constant polynomial.
    pub fn constant(basis: Arc<MonomialBasis>, c: F) -> Self {
        let mut p = Self::zero(basis);
        p.coefficients[0] = c;
        p
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[F] {
        &self.coefficients
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Evaluate at `x`: the feature expansion dotted with the coefficients,
    /// summed in canonical index order.
    pub fn evaluate(&self, x: &[F]) -> Result<F> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        let mut scratch = EvalScratch::new(&self.basis);
        Ok(self.evaluate_with(&mut scratch, x))
    }

    /// Evaluation with reusable scratch space for hot loops. `x` must have
    /// the basis dimension.
    #[inline]
    pub fn evaluate_with(&self, scratch: &mut EvalScratch<F>, x: &[F]) -> F {
        debug_assert_eq!(x.len(), self.dimension());
        self.basis
            .features_into(x, &mut scratch.powers, &mut scratch.features);
        let mut acc = F::zero();
        for (j, &c) in self.coefficients.iter().enumerate() {
            acc += c * scratch.features[j];
        }
        acc
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: i,
            });
        }
        let mut coeffs = vec![F::zero(); self.basis.len()];
        let mut scratch = vec![0u32; self.dimension()];
        for j in 0..self.basis.len() {
            let exps = self.basis.exponent(j);
            if exps[i] == 0 {
                continue;
            }
            scratch.copy_from_slice(exps);
            scratch[i] -= 1;
            let target = self
                .basis
                .index_of(&scratch)
                .expect("derivative exponent stays in basis");
            coeffs[target] += self.coefficients[j] * F::from_u32(exps[i]).unwrap();
        }
        Ok(Polynomial {
            basis: Arc::clone(&self.basis),
            coefficients: coeffs,
        })
    }

    /// Gradient at `x`.
    pub fn gradient_at(&self, x: &[F]) -> Result<Vec<F>> {
        let mut g = Vec::with_capacity(self.dimension());
        for i in 0..self.dimension() {
            g.push(self.partial_derivative(i)?.evaluate(x)?);
        }
        Ok(g)
    }
}

impl Polynomial<f64> {
    pub fn to_repr(&self) -> PolynomialRepr {
        PolynomialRepr {
            d: self.dimension(),
            k: self.basis.degree(),
            coefficients: self.coefficients.clone(),
        }
    }

    pub fn from_repr(repr: &PolynomialRepr) -> Result<Self> {
        let basis = MonomialBasis::new(repr.d, repr.k)?;
        Polynomial::new(basis, repr.coefficients.clone())
    }
}

/// Reusable buffers for repeated polynomial evaluation.
pub struct EvalScratch<F: Real> {
    powers: Vec<F>,
    features: Vec<F>,
}

impl<F: Real> EvalScratch<F> {
    pub fn new(basis: &MonomialBasis) -> Self {
        EvalScratch {
            powers: Vec::with_capacity(basis.dimension() * (basis.degree() + 1)),
            features: vec![F::zero(); basis.len()],
        }
    }
}

/// Polynomial threshold function sign(p(x) - t) with t in [-1, 1].
#[derive(Debug, Clone)]
pub struct Ptf<F: Real> {
    pub poly: Polynomial<F>,
    threshold: F,
}

impl<F: Real> Ptf<F> {
    pub fn new(poly: Polynomial<F>, threshold: F) -> Result<Self> {
        if !(threshold >= -F::one() && threshold <= F::one()) {
            return Err(Error::InvalidArgument {
                op: "Ptf::new",
                detail: format!("threshold {threshold} outside [-1, 1]"),
            });
        }
        Ok(Ptf { poly, threshold })
    }

    pub fn threshold(&self) -> F {
        self.threshold
    }

    /// Label in {-1, +1}; sign(0) = +1.
    pub fn label(&self, x: &[F]) -> Result<F> {
        Ok(sign_pm(self.poly.evaluate(x)? - self.threshold))
    }

    #[inline]
    pub fn label_with(&self, scratch: &mut EvalScratch<F>, x: &[F]) -> F {
        sign_pm(self.poly.evaluate_with(scratch, x) - self.threshold)
    }
}
