use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    for (var, template) in [(0.1f64, false), (0.05, false), (0.1, true), (0.25, false)] {
        let mut cfg = ScenarioConfig::default();
        cfg.class_variance = var;
        cfg.completion.initial_rank = 1;
        let mut errs = Vec::new();
        let mut ranks = Vec::new();
        for seed in 0..15u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let evidence: Vec<_> = if template {
                s.evidence.clone()
            } else {
                s.observations.iter().map(|&x| observation_to_bba(x, &cfg).unwrap()).collect()
            };
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
        println!("desk var={var} template={template}: <=0.02 {u002}/15 <=0.05 {u005}/15 ranks {ranks:?}");
        println!("   errs {:?}", errs.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>());
    }
}
