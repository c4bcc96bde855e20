use cef_core::scenario::*;
use cef_core::baseline::ccef;
use cef_core::edm::{credibility_from_edmm, Edmm};

fn main() {
    let cfg = ScenarioConfig::default();
    let run = run_pcef(&cfg, 1).unwrap();
    println!("pcef BetP {:?}", run.fused_pcef.pignistic().probs().iter().map(|x|(x*10000.0).round()/10000.0).collect::<Vec<_>>());
    println!("ccef BetP {:?}", run.fused_ccef.pignistic().probs().iter().map(|x|(x*10000.0).round()/10000.0).collect::<Vec<_>>());
    let s = generate_scenario(&cfg, 1).unwrap();
    let reference = ccef(&s.evidence).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let ct: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
    for i in 0..30 {
        let diff = run.cred_pcef[i] - ct[i];
        if diff.abs() > 0.005 {
            println!("agent {i}: argmax {} cred pcef {:.4} ccef {:.4} diff {:+.4}",
                s.evidence[i].pignistic().argmax_serial(), run.cred_pcef[i], ct[i], diff);
        }
    }
    let _ = reference;
}
