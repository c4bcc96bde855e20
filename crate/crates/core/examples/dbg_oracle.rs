use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::PartialEdmm;
use cef_core::scenario::*;
use nalgebra::DMatrix;

fn best_rank_k(d: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let svd = d.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut out = DMatrix::zeros(d.nrows(), d.ncols());
    for r in 0..k {
        let sv = svd.singular_values[r];
        for i in 0..d.nrows() { for j in 0..d.ncols() {
            out[(i,j)] += sv * u[(i,r)] * vt[(r,j)];
        }}
    }
    out
}

fn cred_err(d: &Edmm<f64>, other: &Edmm<f64>) -> f64 {
    let a: Vec<f64> = credibility_from_edmm(d).iter().map(|c| c.value()).collect();
    let b: Vec<f64> = credibility_from_edmm(other).iter().map(|c| c.value()).collect();
    a.iter().zip(&b).map(|(x,y)| (x-y).abs()).fold(0.0, f64::max)
}

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    for seed in 0..3u64 {
        let s = generate_scenario(&cfg, seed).unwrap();
        let d = Edmm::from_evidence(&s.evidence);
        let sv = d.matrix().clone().svd(false, false).singular_values;
        let ratios: Vec<f64> = sv.iter().take(8).map(|x| (x / sv[0] * 1000.0).round()/1000.0).collect();
        println!("seed {seed}: sigma ratios {ratios:?}");
        for k in [3usize, 4, 5, 6, 8] {
            let oracle = postprocess(&best_rank_k(d.matrix(), k));
            println!("   oracle rank {k}: cred err {:.4}", cred_err(&d, &oracle));
        }
        let known = PartialEdmm::assemble_global(&d, &s.graph);
        for (iters, window) in [(200usize, 20usize), (200, 60), (400, 120)] {
            let params = CompletionParams { max_iters: iters, stable_window: window, ..CompletionParams::default() };
            let (completed, trace) = complete_edmm(&known, &params, |_,_,_,_| {});
            let last = trace.last().unwrap();
            println!("   completion iters={iters} win={window}: rank {} it {} f {:.3e} cred err {:.4}",
                last.rank, last.iter, last.objective, cred_err(&d, &completed));
        }
    }
}
