//! Centralized baselines: the credible-fusion reference pipeline (pairwise
//! differences, credibility, discounting, Dempster folding) and plain
//! Dempster folding of the raw evidence. These are the oracles the
//! distributed pipeline is measured against.

use crate::edm::{credibility_from_edmm, Edmm};
use crate::error::Result;
use crate::evidence::{dempster_pair, Credibility, MassFunction, WeightAssignment};
use crate::fusion::discounted_weights;
use crate::scalar::Real;

/// Output of the centralized credible-fusion pipeline.
#[derive(Debug, Clone)]
pub struct CcefResult<S: Real> {
    pub credibilities: Vec<Credibility<S>>,
    pub fused: MassFunction<S>,
    pub edmm: Edmm<S>,
}

/// Centralized credible evidence fusion: build the full pairwise difference
/// matrix, score credibilities, discount each piece, and fold with
/// Dempster's rule.
pub fn ccef<S: Real>(evidence: &[MassFunction<S>]) -> Result<CcefResult<S>> {
    assert!(evidence.len() >= 2, "credible fusion needs at least two pieces");
    let edmm = Edmm::from_evidence(evidence);
    let credibilities = credibility_from_edmm(&edmm);
    let discounted: Vec<MassFunction<S>> = evidence
        .iter()
        .zip(&credibilities)
        .map(|(m, c)| m.discount(*c))
        .collect();
    let fused = dr_fold(&discounted)?;
    Ok(CcefResult {
        credibilities,
        fused,
        edmm,
    })
}

/// The same fusion through the additive weight-assignment route: discount
/// with credibilities clamped away from 1, sum the weight assignments, and
/// reconstruct. Cross-checks the Dempster-fold path.
pub fn ccef_weight_path<S: Real>(evidence: &[MassFunction<S>]) -> Result<MassFunction<S>> {
    let edmm = Edmm::from_evidence(evidence);
    let credibilities = credibility_from_edmm(&edmm);
    let mut total = WeightAssignment::zero(evidence[0].frame().clone());
    for (m, c) in evidence.iter().zip(&credibilities) {
        total = total.add(&discounted_weights(m, c.value()));
    }
    total.to_mass()
}

/// Left fold of the evidence under Dempster's rule; order-independent.
pub fn dr_fold<S: Real>(evidence: &[MassFunction<S>]) -> Result<MassFunction<S>> {
    assert!(!evidence.is_empty(), "nothing to fold");
    let mut acc = evidence[0].clone();
    for m in &evidence[1..] {
        acc = dempster_pair(&acc, m)?;
    }
    Ok(acc)
}
