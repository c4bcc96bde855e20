use cef_core::completion::*;
use cef_core::edm::{credibility_from_edmm, Edmm};
use cef_core::network::{PartialEdmm, collect_edmm, CollectionMode};
use cef_core::scenario::*;
use nalgebra::DMatrix;

fn main() {
    let base = ScenarioConfig::default();
    for seed in 0..3u64 {
        let s = generate_scenario(&base, seed).unwrap();
        let d = Edmm::from_evidence(&s.evidence);
        let known = PartialEdmm::assemble_global(&d, &s.graph);
        let n = s.graph.n_agents();

        // Oracle: best rank-4 approximation of the true D
        let svd = d.matrix().clone().svd(true, true);
        let mut approx = DMatrix::<f64>::zeros(n, n);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        for r in 0..4 {
            let sv = svd.singular_values[r];
            for i in 0..n { for j in 0..n {
                approx[(i,j)] += sv * u[(i,r)] * vt[(r,j)];
            }}
        }
        let oracle = postprocess(&approx);
        let cred_true: Vec<f64> = credibility_from_edmm(&d).iter().map(|c| c.value()).collect();
        let cred_oracle: Vec<f64> = credibility_from_edmm(&oracle).iter().map(|c| c.value()).collect();
        let oracle_err = cred_true.iter().zip(&cred_oracle).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);

        for (k0, s_max, iters, window) in [(3usize, 8usize, 200usize, 20usize), (3, 8, 400, 400)] {
            let params = CompletionParams { initial_rank: k0, max_rank: s_max, max_iters: iters, stable_window: window, ..CompletionParams::default() };
            let (completed, trace) = complete_edmm(&known, &params, |_,_,_,_| {});
            let cred_hat: Vec<f64> = credibility_from_edmm(&completed).iter().map(|c| c.value()).collect();
            let cred_err = cred_true.iter().zip(&cred_hat).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);
            let mut missing_err: f64 = 0.0; let mut known_err: f64 = 0.0;
            for i in 0..n { for j in 0..n {
                if i == j { continue; }
                let e = (completed.get(i,j) - d.get(i,j)).abs();
                if known.known(i,j) { known_err = known_err.max(e); } else { missing_err = missing_err.max(e); }
            }}
            let last = trace.last().unwrap();
            println!("seed {seed} k0={k0} iters={iters} win={window}: rank {} it {} f {:.2e} | cred_err {:.4} (oracle {:.4}) | entry err known {:.3} missing {:.3}",
                last.rank, last.iter, last.objective, cred_err, oracle_err, known_err, missing_err);
        }
    }
}
