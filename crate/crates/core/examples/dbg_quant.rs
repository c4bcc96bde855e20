use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    for quant in [0.0f64, 0.25, 0.5, 1.0] {
        let mut worst: f64 = 0.0;
        for seed in 0..3u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let evidence: Vec<_> = s.observations.iter().map(|&x| {
                let xq = if quant > 0.0 { (x / quant).round() * quant } else { x };
                observation_to_bba(xq, &cfg).unwrap()
            }).collect();
            let d = Edmm::from_evidence(&evidence);
            let sv = d.matrix().clone().svd(false, false).singular_values;
            let r5 = sv[4] / sv[0];
            let known = PartialEdmm::assemble_global(&d, &s.graph);
            let (completed, trace) = complete_edmm(&known, &CompletionParams::default(), |_,_,_,_| {});
            let t = cred_vec(&d);
            let h = cred_vec(&completed);
            let err = t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);
            worst = worst.max(err);
            if seed == 0 {
                println!("quant {quant}: sigma5/sigma1 {r5:.4} final rank {} cred err {err:.4}", trace.last().unwrap().rank);
            } else {
                println!("   seed {seed}: cred err {err:.4} rank {}", trace.last().unwrap().rank);
            }
        }
        println!("   worst over 3 seeds: {worst:.4}");
    }
}
