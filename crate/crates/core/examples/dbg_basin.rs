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

fn cred_vec(d: &Edmm<f64>) -> Vec<f64> { credibility_from_edmm(d).iter().map(|c| c.value()).collect() }

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    for seed in 0..3u64 {
        let s = generate_scenario(&cfg, seed).unwrap();
        let d = Edmm::from_evidence(&s.evidence);
        let known = PartialEdmm::assemble_global(&d, &s.graph);
        let truth_cred = cred_vec(&d);

        for k in [3usize, 4] {
            let oracle = best_rank_k(d.matrix(), k);
            println!("seed {seed} oracle rank {k}: f = {:.4e}", objective_dense(&oracle, &known, 2.0));
        }

        // density-corrected start: complete from P_A(D)/p
        let p = s.graph.edge_density();
        let rescaled = known.values() / p;
        let rescaled_known = PartialEdmm::new(
            DMatrix::from_fn(100, 100, |i,j| if known.known(i,j) { known.values()[(i,j)] } else { 0.0 }),
            known.mask().clone(), cef_core::network::Owner::Global).unwrap();
        // run solver manually from the rescaled init
        let params = CompletionParams { max_iters: 200, stable_window: 200, ..CompletionParams::default() };
        for (name, init_mat) in [("masked", known.values().clone()), ("descaled", rescaled.clone())] {
            let sv = init_mat.clone().svd(false, false).singular_values;
            let gap_rank = sv.iter().take_while(|&&x| x >= 0.1 * sv[0]).count().max(1);
            let k0 = gap_rank.min(10);
            let mut state = CompletionState::from_truncated_svd(&init_mat, k0).unwrap();
            let mut f_last = 0.0;
            for _ in 0..120 {
                let r = fixed_rank_step(&mut state, &rescaled_known, &params);
                f_last = r.objective;
                if r.converged { break; }
                rank_decrease(&mut state, 0.1);
            }
            let completed = postprocess(&state.to_matrix());
            let ch = cred_vec(&completed);
            let err = truth_cred.iter().zip(&ch).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);
            println!("   init {name} (k0={k0}): final rank {} f {:.4e} cred err {:.4}", state.rank(), f_last, err);
        }
    }
}
