use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    // two-template world: normals gated to {a} only
    for n in [30usize, 100] {
        let cfg = if n == 100 { ScenarioConfig::paper_profile() } else { ScenarioConfig::default() };
        let mut errs = Vec::new();
        let mut ranks = Vec::new();
        for seed in 0..20u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            // override: re-gate normals to {a} only
            let evidence: Vec<_> = (0..n).map(|i| {
                let n_anom = (cfg.anomaly_fraction * n as f64).round() as usize;
                let first_anom = n - n_anom;
                let mu = if i < first_anom { cfg.class_means[0] } else {
                    cfg.class_means[cfg.anomaly_mean_indices[(i - first_anom) % cfg.anomaly_mean_indices.len()]]
                };
                observation_to_bba(mu, &cfg).unwrap()
            }).collect();
            let d = Edmm::from_evidence(&evidence);
            let known = PartialEdmm::assemble_global(&d, &s.graph);
            let (completed, trace) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
            ranks.push(trace.last().unwrap().rank);
            let t = cred_vec(&d);
            let h = cred_vec(&completed);
            errs.push(t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max));
        }
        let u002 = errs.iter().filter(|&&e| e <= 0.02).count();
        let u005 = errs.iter().filter(|&&e| e <= 0.05).count();
        let worst = errs.iter().cloned().fold(0.0f64, f64::max);
        println!("two-template N={n}: <=0.02 {u002}/20 <=0.05 {u005}/20 worst {worst:.2e} ranks {:?}", &ranks[..6]);
    }
}
