use cef_core::completion::*;
use cef_core::edm::Edmm;
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let base = ScenarioConfig::default();
    let s = generate_scenario(&base, 0).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let known = PartialEdmm::assemble_global(&d, &s.graph);
    let params = CompletionParams { initial_rank: 3, max_rank: 8, ..CompletionParams::default() };
    let mut state = CompletionState::from_truncated_svd(known.values(), 3).unwrap();
    for t in 0..40 {
        let report = fixed_rank_step(&mut state, &known, &params);
        println!(
            "it {t:2} f {:.6e} backtracks {} exhausted {} conv {} sigma {:?}",
            report.objective, report.backtracks, report.exhausted, report.converged,
            state.singular_values().iter().map(|x| (x*100.0).round()/100.0).collect::<Vec<_>>()
        );
        if report.converged { break; }
    }
}
