use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    for alpha in [0.9f64, 0.97] {
        let mut cfg = ScenarioConfig::paper_profile();
        cfg.alpha_mass = alpha;
        let mut errs = Vec::new();
        let mut tails = Vec::new();
        let mut ranks = Vec::new();
        for seed in 0..8u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let evidence: Vec<_> = s.observations.iter().map(|&x| {
                let nearest = cfg.class_means.iter().cloned()
                    .min_by(|a, b| (x - a).abs().partial_cmp(&(x - b).abs()).unwrap()).unwrap();
                observation_to_bba(nearest, &cfg).unwrap()
            }).collect();
            let d = Edmm::from_evidence(&evidence);
            let sv = d.matrix().clone().svd(false, false).singular_values;
            tails.push(sv[4] / sv[0]);
            let known = PartialEdmm::assemble_global(&d, &s.graph);
            let (completed, trace) = complete_edmm(&known, &CompletionParams::default(), |_,_,_,_| {});
            ranks.push(trace.last().unwrap().rank);
            let t = cred_vec(&d);
            let h = cred_vec(&completed);
            errs.push(t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max));
        }
        println!("alpha {alpha}: errs {:?}", errs.iter().map(|e| (e*10000.0).round()/10000.0).collect::<Vec<_>>());
        println!("   sigma5/sigma1 {:?} ranks {ranks:?}", tails.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>());
    }
}
