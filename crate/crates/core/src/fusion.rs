//! Fusion network consensus: average consensus over weight assignments with
//! a self-canceling differential-privacy term and a credibility-compensation
//! term, finalization into the fused mass function, and the neighborhood
//! inference attack that probes what the scheme actually hides.
//!
//! Each agent's shared state starts at the weight assignment of its
//! credibility-discounted evidence plus noise. The noise terms of one agent
//! sum to zero over its private stop time, so the network average — and with
//! it the fusion limit — is unaffected. While the difference matrix is still
//! being completed, credibility estimates move; the compensation term injects
//! the induced change of the discounted weights so the limit tracks the
//! converged credibilities.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::edm::{credibility_from_edmm, Edmm};
use crate::error::{Error, Result};
use crate::evidence::{CommonalityVector, Credibility, MassFunction, WeightAssignment};
use crate::network::{ConsensusMatrix, NetworkGraph};
use crate::scalar::{real, Real};

/// Gap between agent states below which consensus counts as reached.
const CONSENSUS_GAP: f64 = 1e-8;

/// Self-canceling noise: Gaussian terms with geometrically decaying scale
/// for `t < t_i`, the final term the negated partial sum, zero afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule<S: Real> {
    terms: Vec<DVector<S>>,
    stop_time: usize,
}

impl<S: Real> NoiseSchedule<S> {
    pub fn stop_time(&self) -> usize {
        self.stop_time
    }

    /// Noise injected at round `t` (zero beyond the stop time).
    pub fn term(&self, t: usize) -> Option<&DVector<S>> {
        self.terms.get(t)
    }

    /// Componentwise sum over the whole schedule; zero by construction.
    pub fn total(&self) -> DVector<S> {
        let mut acc = DVector::zeros(self.terms[0].len());
        for t in &self.terms {
            acc += t;
        }
        acc
    }
}

/// Build a noise schedule of `dim`-component terms for rounds `0..=stop_time`.
///
/// `u(t) = sigma0 * rho^t * g(t)` with standard normal `g(t)` for
/// `t < stop_time`; the last term cancels the partial sum exactly. A zero
/// scale is rejected: the schedule must actually perturb the early rounds.
pub fn make_noise_schedule<S: Real>(
    stop_time: usize,
    sigma0: S,
    rho: S,
    dim: usize,
    seed: u64,
) -> Result<NoiseSchedule<S>>
where
    StandardNormal: Distribution<S>,
{
    if sigma0 <= S::zero() {
        return Err(Error::ZeroNoise);
    }
    if stop_time == 0 {
        return Err(Error::Config("noise stop time must be at least 1".into()));
    }
    if rho <= S::zero() || rho >= S::one() {
        return Err(Error::Config("noise decay must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(stop_time + 1);
    let mut partial = DVector::<S>::zeros(dim);
    let mut scale = sigma0;
    for _ in 0..stop_time {
        let term = DVector::from_fn(dim, |_, _| {
            let g: S = StandardNormal.sample(&mut rng);
            scale * g
        });
        partial += &term;
        terms.push(term);
        scale *= rho;
    }
    terms.push(-partial);
    Ok(NoiseSchedule { terms, stop_time })
}

/// Credibility-compensation term: the exact change of the discounted weight
/// assignment when an agent's credibility estimate moves from `cred_prev`
/// to `cred_now`, computed in the commonality log-domain.
pub fn cred_compensation<S: Real>(
    q_self: &CommonalityVector<S>,
    cred_now: S,
    cred_prev: S,
) -> DVector<S> {
    let size = q_self.dense().len();
    let full = size - 1;
    let mut ratios = vec![S::zero(); size];
    for a in 1..=full {
        let q = q_self.get(a);
        let now = S::one() - cred_now * (S::one() - q);
        let before = S::one() - cred_prev * (S::one() - q);
        ratios[a] = (now / before).ln();
    }
    // Superset Möbius transform of the log ratios, read off the non-trivial
    // subsets.
    let mut bit = 1;
    while bit < size {
        for a in 0..size {
            if a & bit == 0 {
                ratios[a] = ratios[a] - ratios[a | bit];
            }
        }
        bit <<= 1;
    }
    DVector::from_fn(full - 1, |i, _| ratios[i + 1])
}

/// Clamp a credibility away from 1 and discount, so the discounted evidence
/// stays non-dogmatic and its weight assignment finite.
pub fn discounted_weights<S: Real>(
    evidence: &MassFunction<S>,
    cred: S,
) -> WeightAssignment<S> {
    let cred = Credibility::new(cred.clamp(S::zero(), S::one()))
        .expect("clamped credibility")
        .clamped_for_weights();
    evidence
        .discount(cred)
        .weight_assignment()
        .expect("discount away from 1 keeps evidence non-dogmatic")
}

/// One agent's fusion state.
#[derive(Debug, Clone)]
pub struct AgentFusionState<S: Real> {
    x: DVector<S>,
    q_self: CommonalityVector<S>,
    cred_history: Vec<S>,
    schedule: Option<NoiseSchedule<S>>,
}

impl<S: Real> AgentFusionState<S> {
    pub fn state(&self) -> &DVector<S> {
        &self.x
    }

    pub fn cred_history(&self) -> &[S] {
        &self.cred_history
    }
}

/// Round-synchronous fusion consensus engine over all agents.
#[derive(Debug, Clone)]
pub struct FusionEngine<S: Real> {
    agents: Vec<AgentFusionState<S>>,
    weights: ConsensusMatrix<S>,
    round: usize,
}

impl<S: Real> FusionEngine<S> {
    /// Initialize round 0: `x_i(0) = w'_i(cred_i(0)) + u^R_i(0)`.
    ///
    /// `schedules[i] = None` runs agent `i` without a privacy term.
    pub fn new(
        evidence: &[MassFunction<S>],
        initial_creds: &[S],
        schedules: Vec<Option<NoiseSchedule<S>>>,
        weights: ConsensusMatrix<S>,
    ) -> Self {
        assert_eq!(evidence.len(), initial_creds.len());
        assert_eq!(evidence.len(), schedules.len());
        assert_eq!(evidence.len(), weights.n_agents());
        let agents = evidence
            .iter()
            .zip(initial_creds)
            .zip(schedules)
            .map(|((m, &cred), schedule)| {
                let mut x = discounted_weights(m, cred).as_dvector();
                if let Some(s) = &schedule {
                    x += s.term(0).expect("schedule covers round 0");
                }
                AgentFusionState {
                    x,
                    q_self: m.commonality(),
                    cred_history: vec![cred],
                    schedule,
                }
            })
            .collect();
        Self {
            agents,
            weights,
            round: 0,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn agents(&self) -> &[AgentFusionState<S>] {
        &self.agents
    }

    pub fn states(&self) -> Vec<DVector<S>> {
        self.agents.iter().map(|a| a.x.clone()).collect()
    }

    /// Advance one round: neighbor averaging plus each agent's noise and
    /// credibility-compensation terms. `creds_now[i]` is agent `i`'s current
    /// credibility estimate (constant in serial mode, per-round in parallel
    /// mode).
    pub fn step(&mut self, creds_now: &[S]) {
        assert_eq!(creds_now.len(), self.agents.len());
        let t_next = self.round + 1;
        let snapshot: Vec<DVector<S>> = self.agents.iter().map(|a| a.x.clone()).collect();
        for (i, agent) in self.agents.iter_mut().enumerate() {
            let mut next = DVector::zeros(agent.x.len());
            for (j, s) in snapshot.iter().enumerate() {
                let w = self.weights.get(i, j);
                if w != S::zero() {
                    next += s * w;
                }
            }
            if let Some(schedule) = &agent.schedule {
                if let Some(term) = schedule.term(t_next) {
                    next += term;
                }
            }
            let cred_prev = *agent.cred_history.last().expect("round 0 recorded");
            if creds_now[i] != cred_prev {
                next += cred_compensation(&agent.q_self, creds_now[i], cred_prev);
            }
            agent.cred_history.push(creds_now[i]);
            agent.x = next;
        }
        self.round = t_next;
    }

    /// Largest pairwise infinity-norm gap between agent states.
    pub fn max_state_gap(&self) -> S {
        let mut gap = S::zero();
        for i in 0..self.agents.len() {
            for j in (i + 1)..self.agents.len() {
                let d = (&self.agents[i].x - &self.agents[j].x).abs().max();
                gap = gap.max(d);
            }
        }
        gap
    }
}

/// Convert one converged state into the fused mass function:
/// `mass_from_weights(N * x)`.
pub fn finalize_state<S: Real>(
    x: &DVector<S>,
    n_agents: usize,
    frame: &std::sync::Arc<crate::evidence::FrameOfDiscernment>,
) -> Result<MassFunction<S>> {
    let scaled = x * real::<S>(n_agents as f64);
    WeightAssignment::from_dvector(frame.clone(), &scaled)?.to_mass()
}

/// Check consensus and finalize the engine's mean state into the fused mass
/// function. Fails with [`Error::NotConverged`] when the largest pairwise
/// state gap exceeds `1e-8`.
pub fn finalize_fusion<S: Real>(
    engine: &FusionEngine<S>,
    frame: &std::sync::Arc<crate::evidence::FrameOfDiscernment>,
) -> Result<MassFunction<S>> {
    let gap = engine.max_state_gap();
    let tol = real::<S>(CONSENSUS_GAP);
    if gap > tol {
        return Err(Error::NotConverged {
            gap: gap.to_subset().unwrap_or(f64::NAN),
            tol: CONSENSUS_GAP,
        });
    }
    let n = engine.agents.len();
    let dim = engine.agents[0].x.len();
    let mut mean = DVector::<S>::zeros(dim);
    for a in &engine.agents {
        mean += &a.x;
    }
    mean /= real::<S>(n as f64);
    finalize_state(&mean, n, frame)
}

/// Everything an eavesdropping neighbor could have recorded: every agent's
/// shared state at every round. Attack code must only read the rows its
/// adversary is entitled to.
#[derive(Debug, Clone)]
pub struct FusionObservations<S: Real> {
    states: Vec<Vec<DVector<S>>>,
}

impl<S: Real> FusionObservations<S> {
    pub fn new() -> Self {
        Self { states: Vec::new() }
    }

    pub fn record(&mut self, round_states: Vec<DVector<S>>) {
        self.states.push(round_states);
    }

    pub fn rounds(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, round: usize, agent: usize) -> &DVector<S> {
        &self.states[round][agent]
    }
}

impl<S: Real> Default for FusionObservations<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Result of the neighborhood inference attack.
#[derive(Debug, Clone)]
pub enum AttackOutcome<S: Real> {
    /// The adversary reconstructed the target's raw evidence.
    Recovered(MassFunction<S>),
    /// The target has a neighbor outside the adversary's view; the unknown
    /// neighbor terms cannot be eliminated.
    Infeasible,
}

/// The attack works exactly when the adversary observes every state feeding
/// the target's updates: `target ∈ N(adversary)` and
/// `N(target) \ {adversary} ⊆ N(adversary)`.
pub fn attack_feasible(g: &NetworkGraph, adversary: usize, target: usize) -> bool {
    if adversary == target || !g.is_edge(adversary, target) {
        return false;
    }
    g.neighbors(target)
        .iter()
        .all(|&l| l == adversary || g.is_edge(adversary, l))
}

/// Neighborhood inference attack on the fusion consensus.
///
/// Accumulating `x_i(t+1) - c_ii x_i(t) - sum_l c_il x_l(t)` over all rounds
/// telescopes away the self-canceling noise and the compensation terms,
/// leaving the converged discounted weight assignment; inverting the
/// discount with the public credibility recovers the raw evidence. The sums
/// only involve states of the target and its neighbors, so they are
/// computable exactly when [`attack_feasible`] holds.
pub fn infer_attack<S: Real>(
    adversary: usize,
    target: usize,
    observations: &FusionObservations<S>,
    g: &NetworkGraph,
    weights: &ConsensusMatrix<S>,
    public_edmm: &Edmm<S>,
    frame: &std::sync::Arc<crate::evidence::FrameOfDiscernment>,
) -> Result<AttackOutcome<S>> {
    if !attack_feasible(g, adversary, target) {
        return Ok(AttackOutcome::Infeasible);
    }
    let visible = |agent: usize| {
        agent == adversary || agent == target || g.is_edge(adversary, agent)
    };
    let rounds = observations.rounds();
    let mut recovered = observations.state(0, target).clone();
    let c_self = weights.get(target, target);
    for t in 0..rounds - 1 {
        let mut increment = observations.state(t + 1, target).clone();
        increment -= observations.state(t, target) * c_self;
        for &l in g.neighbors(target) {
            assert!(visible(l), "attack touched a state outside the adversary view");
            increment -= observations.state(t, l) * weights.get(target, l);
        }
        recovered += increment;
    }

    // recovered = w'_i(converged credibility); undo the discount.
    let cred = credibility_from_edmm(public_edmm)[target]
        .clamped_for_weights()
        .value();
    let discounted = WeightAssignment::from_dvector(frame.clone(), &recovered)?.to_mass()?;
    let full = frame.full();
    let mut masses = vec![S::zero(); frame.num_subsets()];
    let mut partial = S::zero();
    for a in 1..full {
        let m = discounted.mass(a) / cred;
        masses[a] = m;
        partial += m;
    }
    masses[full] = S::one() - partial;
    Ok(AttackOutcome::Recovered(MassFunction::new(
        frame.clone(),
        masses,
    )?))
}
