use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    for (quant, alpha) in [(0.0f64, 0.9f64), (0.5, 0.9), (1.0, 0.9), (0.5, 0.97), (1.0, 0.97), (0.5, 0.99), (1.0, 0.99)] {
        let mut cfg = ScenarioConfig::paper_profile();
        cfg.alpha_mass = alpha;
        let mut errs = Vec::new();
        let mut ratios4 = Vec::new();
        let mut ranks = Vec::new();
        for seed in 0..5u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let evidence: Vec<_> = s.observations.iter().map(|&x| {
                let xq = if quant > 0.0 { (x / quant).round() * quant } else { x };
                observation_to_bba(xq, &cfg).unwrap()
            }).collect();
            let d = Edmm::from_evidence(&evidence);
            let sv = d.matrix().clone().svd(false, false).singular_values;
            ratios4.push(sv[3] / sv[0]);
            let known = PartialEdmm::assemble_global(&d, &s.graph);
            let (completed, trace) = complete_edmm(&known, &CompletionParams::default(), |_,_,_,_| {});
            ranks.push(trace.last().unwrap().rank);
            let t = cred_vec(&d);
            let h = cred_vec(&completed);
            errs.push(t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max));
        }
        let worst = errs.iter().cloned().fold(0.0f64, f64::max);
        println!("quant {quant} alpha {alpha}: errs {:?} worst {worst:.4} | sigma4/sigma1 {:?} ranks {ranks:?}",
            errs.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>(),
            ratios4.iter().map(|e| (e*100.0).round()/100.0).collect::<Vec<_>>());
    }
}
