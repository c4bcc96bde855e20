use cef_core::edm::Edmm;
use cef_core::scenario::*;

fn main() {
    let base = ScenarioConfig::default();
    // True EDMM spectrum at desk scale
    for seed in 0..3u64 {
        let s = generate_scenario(&base, seed).unwrap();
        let d = Edmm::from_evidence(&s.evidence);
        let sv = d.matrix().clone().svd(false, false).singular_values;
        let ratios: Vec<f64> = sv.iter().take(8).map(|x| (x / sv[0] * 1000.0).round() / 1000.0).collect();
        println!("seed {seed}: true EDMM sigma ratios {:?}", ratios);
    }
    for (k0, s_max) in [(3usize, 8usize), (2, 8), (4, 10), (1, 8)] {
        let mut worst: f64 = 0.0;
        let mut worst_pign: f64 = 0.0;
        let mut ranks_seen = Vec::new();
        for seed in 0..10u64 {
            let mut cfg = base.clone();
            cfg.completion.initial_rank = k0;
            cfg.completion.max_rank = s_max;
            let run = run_pcef(&cfg, seed).unwrap();
            worst = worst.max(run.max_cred_error());
            worst_pign = worst_pign.max(run.max_pignistic_error());
            ranks_seen.push(run.rank_trace.last().unwrap().rank);
        }
        println!("k0={k0} s={s_max}: worst cred err {worst:.4}, worst pign err {worst_pign:.4}, final ranks {ranks_seen:?}");
    }
}
