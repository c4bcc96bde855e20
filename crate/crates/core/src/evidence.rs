//! Dempster–Shafer evidence algebra.
//!
//! Subsets of the frame of discernment are encoded as bitmasks over the label
//! order, so a frame with `n` labels has subsets `0..2^n` and a mass function
//! is a dense vector indexed by bitmask. The module provides the pignistic
//! transform, the commonality function and its Möbius inverse, canonical
//! (log-domain) weight assignments, Dempster's rule, and credibility
//! discounting. Combination by Dempster's rule is pointwise multiplication of
//! commonalities and addition of weight assignments, which is what makes
//! average-consensus fusion of evidence possible.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Mass functions are accepted as valid when they satisfy their invariants
/// within this tolerance.
const MASS_TOL: f64 = 1e-12;

/// Minimum mass on the full frame for a weight assignment to exist.
const DOGMATIC_FLOOR: f64 = 1e-12;

/// Normalization mass below this is treated as total conflict.
const CONFLICT_FLOOR: f64 = 1e-15;

/// Finite set of mutually exclusive decision hypotheses.
///
/// Subsets are bitmasks in `[0, 2^n)`, bit `k` standing for the `k`-th label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameOfDiscernment {
    labels: Vec<String>,
}

impl FrameOfDiscernment {
    pub fn new<I, T>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::Config("frame needs at least two labels".into()));
        }
        if labels.len() > 16 {
            return Err(Error::Config(
                "dense subset storage is limited to 16 labels".into(),
            ));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::Config(format!("duplicate label `{a}`")));
            }
        }
        Ok(Arc::new(Self { labels }))
    }

    /// Frame with labels `c1, c2, ..` for quick construction.
    pub fn indexed(n: usize) -> Result<Arc<Self>> {
        Self::new((1..=n).map(|i| format!("c{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of subsets, `2^n`.
    pub fn num_subsets(&self) -> usize {
        1 << self.labels.len()
    }

    /// Bitmask of the full frame.
    pub fn full(&self) -> usize {
        self.num_subsets() - 1
    }

    /// Number of non-trivial subsets `2^n - 2`, the weight-assignment length.
    pub fn num_weights(&self) -> usize {
        self.num_subsets() - 2
    }
}

/// In-place superset zeta transform: `v[A] <- sum_{B ⊇ A} v[B]`.
fn superset_zeta<S: Real>(v: &mut [S]) {
    let m = v.len();
    let mut bit = 1;
    while bit < m {
        for a in 0..m {
            if a & bit == 0 {
                v[a] = v[a] + v[a | bit];
            }
        }
        bit <<= 1;
    }
}

/// In-place superset Möbius transform, the inverse of [`superset_zeta`]:
/// `v[A] <- sum_{B ⊇ A} (-1)^{|B|-|A|} v[B]`.
fn superset_mobius<S: Real>(v: &mut [S]) {
    let m = v.len();
    let mut bit = 1;
    while bit < m {
        for a in 0..m {
            if a & bit == 0 {
                v[a] = v[a] - v[a | bit];
            }
        }
        bit <<= 1;
    }
}

/// Basic belief assignment over the subsets of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction<S: Real> {
    frame: Arc<FrameOfDiscernment>,
    masses: Vec<S>,
}

impl<S: Real> MassFunction<S> {
    /// Validate and wrap a dense mass vector indexed by subset bitmask.
    ///
    /// Requires `masses[0] = 0`, entries in `[0, 1]` and total mass 1, all
    /// within 1e-12; entries in `[-1e-12, 0)` are clipped to zero.
    pub fn new(frame: Arc<FrameOfDiscernment>, mut masses: Vec<S>) -> Result<Self> {
        if masses.len() != frame.num_subsets() {
            return Err(Error::LengthMismatch {
                expected: frame.num_subsets(),
                got: masses.len(),
            });
        }
        let tol = real::<S>(MASS_TOL);
        let mut sum = S::zero();
        for (a, m) in masses.iter_mut().enumerate() {
            if *m < S::zero() {
                if *m < -tol {
                    return Err(Error::NonMass(format!("negative mass on subset {a}")));
                }
                *m = S::zero();
            }
            sum += *m;
        }
        if masses[0] > tol {
            return Err(Error::NonMass("mass on the empty set".into()));
        }
        masses[0] = S::zero();
        if (sum - S::one()).abs() > tol {
            return Err(Error::NonMass("total mass is not 1".into()));
        }
        Ok(Self { frame, masses })
    }

    /// Build from `(subset bitmask, mass)` focal elements.
    pub fn from_focal(frame: Arc<FrameOfDiscernment>, focal: &[(usize, S)]) -> Result<Self> {
        let mut masses = vec![S::zero(); frame.num_subsets()];
        for &(a, m) in focal {
            if a >= frame.num_subsets() {
                return Err(Error::Config(format!("subset {a} outside the frame")));
            }
            masses[a] += m;
        }
        Self::new(frame, masses)
    }

    /// Vacuous evidence: all mass on the full frame.
    pub fn vacuous(frame: Arc<FrameOfDiscernment>) -> Self {
        let mut masses = vec![S::zero(); frame.num_subsets()];
        let full = frame.full();
        masses[full] = S::one();
        Self { frame, masses }
    }

    pub fn frame(&self) -> &Arc<FrameOfDiscernment> {
        &self.frame
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn mass(&self, subset: usize) -> S {
        self.masses[subset]
    }

    /// Mass on the full frame (the "ignorance" mass).
    pub fn omega_mass(&self) -> S {
        self.masses[self.frame.full()]
    }

    fn same_frame(&self, other: &Self) {
        assert_eq!(
            self.frame, other.frame,
            "mass functions must share a frame of discernment"
        );
    }

    /// Pignistic transform: each focal mass is split equally among its
    /// singletons, `BetP(k) = sum_{B ∋ k} m(B) / |B|`.
    pub fn pignistic(&self) -> PignisticVector<S> {
        let n = self.frame.len();
        let mut probs = vec![S::zero(); n];
        for (b, &m) in self.masses.iter().enumerate().skip(1) {
            if m == S::zero() {
                continue;
            }
            let share = m / real::<S>(b.count_ones() as f64);
            for (k, p) in probs.iter_mut().enumerate() {
                if b & (1 << k) != 0 {
                    *p += share;
                }
            }
        }
        PignisticVector { probs }
    }

    /// Commonality function `Q(A) = sum_{B ⊇ A} m(B)`.
    pub fn commonality(&self) -> CommonalityVector<S> {
        let mut q = self.masses.clone();
        superset_zeta(&mut q);
        CommonalityVector { q }
    }

    /// Möbius inversion of a commonality vector back to a mass function.
    ///
    /// Rejects with [`Error::NonMass`] when an entry reconstructs below
    /// `-1e-9` or total mass strays from 1 by more than `1e-9`.
    pub fn from_commonality(
        frame: Arc<FrameOfDiscernment>,
        q: &CommonalityVector<S>,
    ) -> Result<Self> {
        if q.q.len() != frame.num_subsets() {
            return Err(Error::LengthMismatch {
                expected: frame.num_subsets(),
                got: q.q.len(),
            });
        }
        let mut masses = q.q.clone();
        superset_mobius(&mut masses);
        let guard = real::<S>(1e-9);
        let mut sum = S::zero();
        for (a, m) in masses.iter_mut().enumerate().skip(1) {
            if *m < -guard {
                return Err(Error::NonMass(format!(
                    "commonality inverts to negative mass on subset {a}"
                )));
            }
            if *m < S::zero() {
                *m = S::zero();
            }
            sum += *m;
        }
        if (sum - S::one()).abs() > guard {
            return Err(Error::NonMass("commonality inverts off total mass 1".into()));
        }
        masses[0] = S::zero();
        // Exact renormalization absorbs the clipped 1e-9 scale slack.
        for m in masses.iter_mut() {
            *m /= sum;
        }
        Ok(Self { frame, masses })
    }

    /// Canonical log-domain weight assignment,
    /// `w(A) = sum_{B ⊇ A} (-1)^{|B|-|A|} ln Q(B)` for `A ∉ {∅, Ω}`.
    ///
    /// Requires non-dogmatic evidence (`m(Ω) ≥ 1e-12`) so every commonality
    /// is strictly positive.
    pub fn weight_assignment(&self) -> Result<WeightAssignment<S>> {
        if self.omega_mass() < real::<S>(DOGMATIC_FLOOR) {
            return Err(Error::DogmaticEvidence);
        }
        let mut lnq = self.commonality().q;
        for v in lnq.iter_mut().skip(1) {
            *v = v.ln();
        }
        lnq[0] = S::zero();
        superset_mobius(&mut lnq);
        let full = self.frame.full();
        let w = lnq[1..full].to_vec();
        Ok(WeightAssignment {
            frame: self.frame.clone(),
            w,
        })
    }

    /// Credibility discounting: scale every non-`Ω` mass by `c` and move the
    /// remainder onto the full frame.
    pub fn discount(&self, c: Credibility<S>) -> Self {
        let c = c.value();
        let full = self.frame.full();
        let mut masses: Vec<S> = self.masses.iter().map(|&m| c * m).collect();
        let partial: S = masses[..full].iter().fold(S::zero(), |acc, &m| acc + m);
        masses[full] = S::one() - partial;
        Self {
            frame: self.frame.clone(),
            masses,
        }
    }

    /// Largest absolute mass difference over all subsets.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.same_frame(other);
        self.masses
            .iter()
            .zip(&other.masses)
            .fold(S::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Unnormalized conjunctive combination, keeping conflict on the empty-set
/// slot. Valid for generalized (possibly negative) simple mass functions.
fn conjunctive<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len()];
    for (i, &ma) in a.iter().enumerate() {
        if ma == S::zero() {
            continue;
        }
        for (j, &mb) in b.iter().enumerate() {
            if mb == S::zero() {
                continue;
            }
            out[i & j] += ma * mb;
        }
    }
    out
}

/// Dempster's rule for two pieces of evidence on the same frame.
///
/// Returns [`Error::TotalConflict`] when the conflict mass reaches
/// `1 - 1e-15`.
pub fn dempster_pair<S: Real>(m1: &MassFunction<S>, m2: &MassFunction<S>) -> Result<MassFunction<S>> {
    m1.same_frame(m2);
    let mut combined = conjunctive(&m1.masses, &m2.masses);
    // 1 - K computed as the surviving mass itself; summing the nonnegative
    // products directly avoids cancellation under near-total conflict.
    let norm = combined[1..].iter().fold(S::zero(), |acc, &m| acc + m);
    if norm <= real::<S>(CONFLICT_FLOOR) {
        return Err(Error::TotalConflict);
    }
    combined[0] = S::zero();
    for m in combined.iter_mut() {
        *m /= norm;
    }
    Ok(MassFunction {
        frame: m1.frame.clone(),
        masses: combined,
    })
}

/// Pignistic probability vector over the singletons.
#[derive(Debug, Clone, PartialEq)]
pub struct PignisticVector<S: Real> {
    probs: Vec<S>,
}

impl<S: Real> PignisticVector<S> {
    pub fn new(probs: Vec<S>) -> Self {
        Self { probs }
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_dvector(&self) -> DVector<S> {
        DVector::from_column_slice(&self.probs)
    }

    /// 1-based serial index of the largest component, ties broken to the
    /// lowest index. Scaling all components by a positive constant does not
    /// change the result.
    pub fn argmax_serial(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = k;
            }
        }
        best + 1
    }

    /// Value at the argmax component.
    pub fn max_value(&self) -> S {
        self.probs[self.argmax_serial() - 1]
    }

    pub fn sum(&self) -> S {
        self.probs.iter().fold(S::zero(), |acc, &p| acc + p)
    }
}

/// Commonality vector, dense over all subsets with `q[∅] = 1` by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonalityVector<S: Real> {
    q: Vec<S>,
}

impl<S: Real> CommonalityVector<S> {
    /// Wrap a dense commonality vector of length `2^n` indexed by bitmask.
    pub fn from_dense(q: Vec<S>) -> Self {
        Self { q }
    }

    pub fn get(&self, subset: usize) -> S {
        self.q[subset]
    }

    pub fn dense(&self) -> &[S] {
        &self.q
    }
}

/// Log-domain weight assignment over the non-trivial subsets
/// `A ∈ 2^Ω \ {∅, Ω}`, stored at index `A - 1`.
///
/// Dempster combination of non-dogmatic evidence adds these vectors, so they
/// are the representation shared through average consensus.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment<S: Real> {
    frame: Arc<FrameOfDiscernment>,
    w: Vec<S>,
}

impl<S: Real> WeightAssignment<S> {
    pub fn new(frame: Arc<FrameOfDiscernment>, w: Vec<S>) -> Result<Self> {
        if w.len() != frame.num_weights() {
            return Err(Error::LengthMismatch {
                expected: frame.num_weights(),
                got: w.len(),
            });
        }
        Ok(Self { frame, w })
    }

    pub fn zero(frame: Arc<FrameOfDiscernment>) -> Self {
        let w = vec![S::zero(); frame.num_weights()];
        Self { frame, w }
    }

    pub fn frame(&self) -> &Arc<FrameOfDiscernment> {
        &self.frame
    }

    /// Weight for a non-trivial subset bitmask.
    pub fn get(&self, subset: usize) -> S {
        self.w[subset - 1]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.w
    }

    pub fn as_dvector(&self) -> DVector<S> {
        DVector::from_column_slice(&self.w)
    }

    pub fn from_dvector(frame: Arc<FrameOfDiscernment>, v: &DVector<S>) -> Result<Self> {
        Self::new(frame, v.iter().copied().collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.frame, other.frame);
        let w = self.w.iter().zip(&other.w).map(|(&a, &b)| a + b).collect();
        Self {
            frame: self.frame.clone(),
            w,
        }
    }

    pub fn scale(&self, factor: S) -> Self {
        let w = self.w.iter().map(|&a| a * factor).collect();
        Self {
            frame: self.frame.clone(),
            w,
        }
    }

    /// Reconstruct the mass function the weights stand for: the Dempster
    /// combination of the generalized simple mass functions
    /// `m_A(A) = 1 - e^{-w(A)}`, `m_A(Ω) = e^{-w(A)}`.
    ///
    /// Evaluated in the commonality log-domain,
    /// `ln q(A) = sum_{B ⊇ A, B ≠ Ω} w(B)`, inverted and normalized. The
    /// direct fold of the simple functions computes the same object but its
    /// surviving mass underflows once weight sums reach a few hundred, which
    /// the finalization step's `N`-fold scaling produces routinely; the log
    /// route is exact for any magnitude and the fold is kept as a test
    /// oracle.
    pub fn to_mass(&self) -> Result<MassFunction<S>> {
        let size = self.frame.num_subsets();
        let full = self.frame.full();
        let mut lnq = vec![S::zero(); size];
        lnq[1..full].copy_from_slice(&self.w);
        lnq[full] = S::zero();
        // Superset zeta: lnq[A] <- sum_{B ⊇ A} w(B) with w(Ω) = 0.
        let mut bit = 1;
        while bit < size {
            for a in 0..size {
                if a & bit == 0 {
                    lnq[a] = lnq[a] + lnq[a | bit];
                }
            }
            bit <<= 1;
        }
        let peak = lnq[1..]
            .iter()
            .copied()
            .fold(S::min_value().unwrap(), S::max);
        if !peak.is_finite() {
            return Err(Error::TotalConflict);
        }
        // Commonalities up to a positive factor; the factor drops out in the
        // final normalization.
        let mut masses: Vec<S> = lnq.iter().map(|&v| (v - peak).exp()).collect();
        superset_mobius(&mut masses);
        masses[0] = S::zero();
        let guard = real::<S>(1e-9);
        let mut sum = S::zero();
        for m in masses.iter_mut().skip(1) {
            if *m < S::zero() {
                if *m < -guard {
                    return Err(Error::TotalConflict);
                }
                *m = S::zero();
            }
            sum += *m;
        }
        if sum <= real::<S>(CONFLICT_FLOOR) {
            return Err(Error::TotalConflict);
        }
        for m in masses.iter_mut() {
            *m /= sum;
        }
        Ok(MassFunction {
            frame: self.frame.clone(),
            masses,
        })
    }
}

/// Evidence credibility in `[0, 1]`; a cohort's maximum is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Credibility<S: Real>(S);

impl<S: Real> Credibility<S> {
    pub fn new(value: S) -> Result<Self> {
        if value < S::zero() || value > S::one() {
            return Err(Error::Config("credibility outside [0, 1]".into()));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> S {
        self.0
    }

    /// Clamp away from 1 so discounted evidence stays non-dogmatic and its
    /// weight assignment finite.
    pub fn clamped_for_weights(&self) -> Self {
        Self(self.0.min(S::one() - real::<S>(1e-9)))
    }
}
