use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.completion.initial_rank = 1;
    cfg.completion.stable_window = 200;
    cfg.anomaly_mean_indices = vec![3];
    let s = generate_scenario(&cfg, 7).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let known = PartialEdmm::assemble_global(&d, &s.graph);
    let (completed, trace) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
    let last = trace.last().unwrap();
    println!("rank {} f {:.3e} iters {}", last.rank, last.objective, last.iter);
    let n = 30;
    let rt: Vec<f64> = (0..n).map(|i| (0..n).map(|k| d.get(i,k)).sum()).collect();
    let rh: Vec<f64> = (0..n).map(|i| (0..n).map(|k| completed.get(i,k)).sum()).collect();
    println!("true rowsums min {:.3} max {:.3}", rt.iter().cloned().fold(f64::MAX, f64::min), rt.iter().cloned().fold(0.0, f64::max));
    println!("comp rowsums min {:.3} max {:.3}", rh.iter().cloned().fold(f64::MAX, f64::min), rh.iter().cloned().fold(0.0, f64::max));
    // group sizes
    let mut sizes = [0usize; 5];
    for m in &s.evidence { sizes[m.pignistic().argmax_serial() - 1] += 1; }
    println!("groups {sizes:?}");
    let ct: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
    let ch: Vec<f64> = credibility_from_edmm(&completed).iter().map(|c| c.value()).collect();
    println!("true cred min {:.3}", ct.iter().cloned().fold(f64::MAX, f64::min));
    println!("comp cred min {:.3}", ch.iter().cloned().fold(f64::MAX, f64::min));
    let worst = ct.iter().zip(&ch).enumerate().max_by(|a, b| ((a.1.0 - a.1.1).abs()).partial_cmp(&(b.1.0 - b.1.1).abs()).unwrap()).unwrap();
    println!("worst agent {} true {:.3} comp {:.3} | true rowsum {:.3} comp {:.3}", worst.0, worst.1.0, worst.1.1, rt[worst.0], rh[worst.0]);
}
