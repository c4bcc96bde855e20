use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.completion.initial_rank = 1;
    cfg.completion.stable_window = 200;
    cfg.anomaly_mean_indices = vec![3];
    for seed in [7u64, 15, 18, 19, 0, 4] {
        let s = generate_scenario(&cfg, seed).unwrap();
        let mut sizes = [0usize; 5];
        let mut decided = Vec::new();
        for m in &s.evidence {
            let k = m.pignistic().argmax_serial() - 1;
            sizes[k] += 1;
            decided.push(k);
        }
        // agents whose entire neighborhood shares their template
        let isolated: Vec<usize> = (0..30)
            .filter(|&i| s.graph.neighbors(i).iter().all(|&j| decided[j] == decided[i]))
            .collect();
        let d = Edmm::from_evidence(&s.evidence);
        let known = PartialEdmm::assemble_global(&d, &s.graph);
        let (completed, _) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
        let rh_min = (0..30).map(|i| (0..30).map(|k| completed.get(i,k)).sum::<f64>()).fold(f64::MAX, f64::min);
        println!("seed {seed}: groups {sizes:?} isolated {isolated:?} completed min rowsum {rh_min:.4}");
    }
}
