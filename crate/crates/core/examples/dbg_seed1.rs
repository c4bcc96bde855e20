use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, dismp, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::default();
    let s = generate_scenario(&cfg, 1).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let known = PartialEdmm::assemble_global(&d, &s.graph);
    let (completed, _) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
    let n = 30;
    let ct: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
    let ch: Vec<f64> = credibility_from_edmm(&completed).iter().map(|c| c.value()).collect();
    let err = ct.iter().zip(&ch).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);
    println!("direct-EDMM path: cred err {err:.4}");

    // templates decided
    let mut groups = [0usize; 5];
    for m in &s.evidence { groups[m.pignistic().argmax_serial() - 1] += 1; }
    println!("groups {groups:?}");

    // row sums
    let rt: Vec<f64> = (0..n).map(|i| (0..n).map(|k| d.get(i,k)).sum()).collect();
    let rh: Vec<f64> = (0..n).map(|i| (0..n).map(|k| completed.get(i,k)).sum()).collect();
    for i in 0..n {
        if (ct[i]-ch[i]).abs() > 0.05 {
            let obs_nonzero = (0..n).filter(|&j| known.known(i,j) && known.values()[(i,j)] != 0.0).count();
            let deg = s.graph.degree(i);
            println!("agent {i}: cred true {:.3} comp {:.3} rowsum true {:.3} comp {:.3} deg {deg} informative-obs {obs_nonzero} argmax {}",
                ct[i], ch[i], rt[i], rh[i], s.evidence[i].pignistic().argmax_serial());
        }
    }
    let min_t = rt.iter().cloned().fold(f64::MAX, f64::min);
    let min_h = rh.iter().cloned().fold(f64::MAX, f64::min);
    println!("min rowsum true {min_t:.4} comp {min_h:.4}");
    // check dismp between two same-template agents is exactly 0
    println!("d(0,1) = {:.3e}, evidence equal: {}", dismp(&s.evidence[0], &s.evidence[1]), s.evidence[0].max_abs_diff(&s.evidence[1]));
}
