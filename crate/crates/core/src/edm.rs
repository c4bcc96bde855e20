//! Evidence difference measures and credibility.
//!
//! The pairwise measure is `DismP = (DistP + ConfP) / (1 + DistP * ConfP)`,
//! built from a pignistic distance and a conflict coefficient. Credibility is
//! the normalized inverse of the total difference between one piece of
//! evidence and all the others.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::evidence::{Credibility, MassFunction, PignisticVector};
use crate::scalar::{real, Real};

/// N x N matrix of pairwise evidence differences: symmetric, zero diagonal,
/// entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edmm<S: Real> {
    d: DMatrix<S>,
}

impl<S: Real> Edmm<S> {
    pub fn from_matrix(d: DMatrix<S>) -> Result<Self> {
        if d.nrows() != d.ncols() {
            return Err(Error::LengthMismatch {
                expected: d.nrows(),
                got: d.ncols(),
            });
        }
        let tol = real::<S>(1e-9);
        for i in 0..d.nrows() {
            if d[(i, i)].abs() > tol {
                return Err(Error::Config("difference matrix has a nonzero diagonal".into()));
            }
            for j in 0..d.ncols() {
                let v = d[(i, j)];
                if v < -tol || v > S::one() + tol {
                    return Err(Error::Config("difference entry outside [0, 1]".into()));
                }
                if (v - d[(j, i)]).abs() > tol {
                    return Err(Error::Config("difference matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { d })
    }

    /// All pairwise differences of an evidence cohort.
    pub fn from_evidence(evidence: &[MassFunction<S>]) -> Self {
        let n = evidence.len();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = dismp(&evidence[i], &evidence[j]);
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        Self { d }
    }

    pub fn n_agents(&self) -> usize {
        self.d.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.d[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.d
    }
}

/// Pignistic distance `sqrt(0.5 * sum_k (p_k - q_k)^2)`, in `[0, 1]`.
pub fn distp<S: Real>(p: &PignisticVector<S>, q: &PignisticVector<S>) -> S {
    assert_eq!(p.len(), q.len(), "pignistic vectors must match in length");
    let sum = p
        .probs()
        .iter()
        .zip(q.probs())
        .fold(S::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    (real::<S>(0.5) * sum).sqrt().clamp(S::zero(), S::one())
}

/// `DistP` from the three dot products `<p,p>`, `<q,q>`, `<p,q>` — the form a
/// two-party protocol can evaluate without seeing both vectors.
pub fn distp_from_dots<S: Real>(pp: S, qq: S, pq: S) -> S {
    let two = real::<S>(2.0);
    let sq = (pp + qq - two * pq).max(S::zero());
    (real::<S>(0.5) * sq).sqrt().clamp(S::zero(), S::one())
}

/// Conflict coefficient: zero when both vectors peak on the same class,
/// otherwise the product of the two peak probabilities.
pub fn confp<S: Real>(p: &PignisticVector<S>, q: &PignisticVector<S>) -> S {
    if p.argmax_serial() == q.argmax_serial() {
        S::zero()
    } else {
        p.max_value() * q.max_value()
    }
}

/// Pairwise evidence difference `(DistP + ConfP) / (1 + DistP * ConfP)`.
pub fn dismp<S: Real>(m1: &MassFunction<S>, m2: &MassFunction<S>) -> S {
    assert_eq!(
        m1.frame(),
        m2.frame(),
        "evidence must share a frame of discernment"
    );
    let p = m1.pignistic();
    let q = m2.pignistic();
    let dist = distp(&p, &q);
    let conf = confp(&p, &q);
    ((dist + conf) / (S::one() + dist * conf)).clamp(S::zero(), S::one())
}

/// Credibility of each piece of evidence from a complete difference matrix:
/// `Cred_i = min_j sum_{k != j} d_jk / sum_{k != i} d_ik`.
///
/// When every pairwise difference is zero the evidence is mutually identical
/// and every credibility is 1. A near-zero row inside an otherwise nonzero
/// matrix cannot come from real evidence (zero difference to everyone forces
/// all their mutual differences to zero as well) — it is a completion
/// artifact for an agent whose edges were uninformative. Such rows receive
/// credibility 1 and do not take part in the minimum.
pub fn credibility_from_edmm<S: Real>(d: &Edmm<S>) -> Vec<Credibility<S>> {
    let n = d.n_agents();
    let row_sums: Vec<S> = (0..n)
        .map(|i| (0..n).fold(S::zero(), |acc, k| acc + d.get(i, k)))
        .collect();
    let max_sum = row_sums.iter().copied().fold(S::zero(), S::max);
    let floor = real::<S>(1e-9) * max_sum;
    let min_sum = row_sums
        .iter()
        .copied()
        .filter(|&s| s > floor)
        .fold(S::max_value().unwrap(), S::min);
    row_sums
        .iter()
        .map(|&s| {
            let c = if s <= floor {
                S::one()
            } else {
                (min_sum / s).clamp(S::zero(), S::one())
            };
            Credibility::new(c).expect("ratio of nonnegative row sums is in [0, 1]")
        })
        .collect()
}
