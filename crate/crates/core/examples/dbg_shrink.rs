use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    for n in [100usize, 30] {
        for eta in [0.1f64, 0.2, 0.3, 0.5] {
            let cfg = if n == 100 { ScenarioConfig::paper_profile() } else { ScenarioConfig::default() };
            let mut errs = Vec::new();
            for seed in 0..10u64 {
                let s = generate_scenario(&cfg, seed).unwrap();
                let evidence: Vec<_> = s.observations.iter().map(|&x| {
                    let mu = cfg.class_means[nearest_class(x, &cfg)];
                    observation_to_bba(mu + eta * (x - mu), &cfg).unwrap()
                }).collect();
                let d = Edmm::from_evidence(&evidence);
                let known = PartialEdmm::assemble_global(&d, &s.graph);
                let (completed, _) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
                let t = cred_vec(&d);
                let h = cred_vec(&completed);
                errs.push(t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max));
            }
            let u002 = errs.iter().filter(|&&e| e <= 0.02).count();
            let u005 = errs.iter().filter(|&&e| e <= 0.05).count();
            let worst = errs.iter().cloned().fold(0.0f64, f64::max);
            println!("N={n} eta={eta}: <=0.02 {u002}/10 <=0.05 {u005}/10 worst {worst:.4} errs {:?}",
                errs.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>());
        }
    }
}
