use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    for (n, var, label) in [
        (100usize, 1.0f64, "paper var1"),
        (100, 0.5, "paper var.5"),
        (30, 1.0, "desk var1"),
        (30, 0.5, "desk var.5"),
    ] {
        let mut cfg = if n == 100 { ScenarioConfig::paper_profile() } else { ScenarioConfig::default() };
        cfg.class_variance = var;
        let mut errs = Vec::new();
        for seed in 0..12u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let d = Edmm::from_evidence(&s.evidence);
            let known = PartialEdmm::assemble_global(&d, &s.graph);
            let (completed, _) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
            let t = cred_vec(&d);
            let h = cred_vec(&completed);
            errs.push(t.iter().zip(&h).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max));
        }
        let under_002 = errs.iter().filter(|&&e| e <= 0.02).count();
        let under_005 = errs.iter().filter(|&&e| e <= 0.05).count();
        let worst = errs.iter().cloned().fold(0.0f64, f64::max);
        println!("{label}: <=0.02 {under_002}/12, <=0.05 {under_005}/12, worst {worst:.4}");
        println!("   errs {:?}", errs.iter().map(|e| (e*1000.0).round()/1000.0).collect::<Vec<_>>());
    }
}
