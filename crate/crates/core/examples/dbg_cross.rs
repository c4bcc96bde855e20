use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    let s = generate_scenario(&cfg, 0).unwrap();
    let d = Edmm::from_evidence(&s.evidence);
    let sv = d.matrix().clone().svd(false, false).singular_values;
    println!("true D: sigma {:?}", sv.iter().take(6).map(|x| (x*100.0).round()/100.0).collect::<Vec<_>>());
    println!("frobenius {:.2} max {:.3}", d.matrix().norm(), d.matrix().abs().max());
    let known = PartialEdmm::assemble_global(&d, &s.graph);
    let msv = known.values().clone().svd(false, false).singular_values;
    println!("masked: sigma {:?}", msv.iter().take(8).map(|x| (x*100.0).round()/100.0).collect::<Vec<_>>());
    let (completed, trace) = complete_edmm(&known, &cfg.completion, |_,_,_,_| {});
    for row in trace.iter().take(8) { println!("  it {} rank {} f {:.3e}", row.iter, row.rank, row.objective); }
    let last = trace.last().unwrap();
    println!("final: it {} rank {} f {:.3e}", last.iter, last.rank, last.objective);
    println!("completed frob {:.2} max {:.3}", completed.matrix().norm(), completed.matrix().abs().max());
    let ct: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
    let ch: Vec<f64> = credibility_from_edmm(&completed).iter().map(|c| c.value()).collect();
    println!("true cred [0..5] {:?} [95..100] {:?}", &ct[..5].iter().map(|x|(x*100.0).round()/100.0).collect::<Vec<_>>(), &ct[95..].iter().map(|x|(x*100.0).round()/100.0).collect::<Vec<_>>());
    println!("comp cred [0..5] {:?} [95..100] {:?}", &ch[..5].iter().map(|x|(x*100.0).round()/100.0).collect::<Vec<_>>(), &ch[95..].iter().map(|x|(x*100.0).round()/100.0).collect::<Vec<_>>());
}
