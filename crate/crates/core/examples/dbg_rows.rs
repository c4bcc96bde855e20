use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    let s = generate_scenario(&cfg, 2).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let known = PartialEdmm::assemble_global(&d, &s.graph);
    let (completed, _) = complete_edmm(&known, &CompletionParams::default(), |_,_,_,_| {});
    let ct: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
    let ch: Vec<f64> = credibility_from_edmm(&completed).iter().map(|c| c.value()).collect();
    let n = 100;
    let rowsum = |m: &nalgebra::DMatrix<f64>, i: usize| (0..n).map(|k| m[(i,k)]).sum::<f64>();
    let mut rows: Vec<(usize, f64, f64, f64, f64, usize)> = (0..n).map(|i| {
        let rt = rowsum(d.matrix(), i);
        let rh = rowsum(completed.matrix(), i);
        (i, (ct[i]-ch[i]).abs(), rt, rh, s.observations[i], s.evidence[i].pignistic().argmax_serial())
    }).collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    println!("worst agents by cred err:");
    for (i, err, rt, rh, x, am) in rows.iter().take(10) {
        println!("  agent {i:3}: err {err:.4} rowsum true {rt:.2} completed {rh:.2} obs {x:+.2} argmax {am}");
    }
    let (i_min_t, _) = (0..n).map(|i| (i, rowsum(d.matrix(), i))).min_by(|a,b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    let (i_min_h, _) = (0..n).map(|i| (i, rowsum(completed.matrix(), i))).min_by(|a,b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    println!("min-rowsum agent: true {i_min_t} completed {i_min_h}");
    println!("true min rowsum {:.3} vs completed {:.3}", rowsum(d.matrix(), i_min_t), rowsum(completed.matrix(), i_min_h));
}
