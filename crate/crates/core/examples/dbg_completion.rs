use cef_core::completion::*;
use cef_core::network::{NetworkGraph, Owner, PartialEdmm};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rank2_truth(n: usize, rng: &mut StdRng) -> DMatrix<f64> {
    let half = n / 2;
    let a = DVector::from_fn(n, |i, _| if i < half { rng.random::<f64>() + 0.5 } else { 0.0 });
    let b = DVector::from_fn(n, |i, _| if i >= half { rng.random::<f64>() + 0.5 } else { 0.0 });
    &a * b.transpose() + b * a.transpose()
}

fn main() {
    let mut rng = StdRng::seed_from_u64(47);
    let n = 40;
    for trial in 0..30 {
        let truth = {
            let t = rank2_truth(n, &mut rng);
            let peak = t.abs().max();
            t / peak
        };
        let g = NetworkGraph::random_connected(n, 0.5, &mut rng).unwrap();
        let mask = g.global_mask();
        let values = DMatrix::from_fn(n, n, |i, j| if mask[(i, j)] { truth[(i, j)] } else { 0.0 });
        let known = PartialEdmm::new(values, mask, Owner::Global).unwrap();
        let params = CompletionParams {
            max_iters: 400,
            stable_window: 60,
            initial_rank: 1,
            max_rank: 8,
            ..CompletionParams::default()
        };
        let mut last_sv: Vec<f64> = Vec::new();
        let (completed, trace) = complete_edmm(&known, &params, |_, _, _, dm| {
            let sv = dm.clone().svd(false, false).singular_values;
            last_sv = sv.iter().cloned().collect();
        });
        println!("  sigma: {:?}", last_sv.iter().map(|x| (x*1000.0).round()/1000.0).collect::<Vec<_>>());
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j && !known.known(i, j) {
                    num += (completed.get(i, j) - truth[(i, j)]).powi(2);
                    den += truth[(i, j)].powi(2);
                }
            }
        }
        let rel = (num / den.max(1e-300)).sqrt();
        let last = trace.last().unwrap();
        println!("trial {trial}: rel={rel:.3e} final_rank={} iters={} f={:.3e}", last.rank, last.iter, last.objective);
        let ranks: Vec<usize> = trace.iter().map(|r| r.rank).collect();
        let mut compact = vec![(ranks[0], 1usize)];
        for &r in &ranks[1..] {
            if compact.last().unwrap().0 == r { compact.last_mut().unwrap().1 += 1; } else { compact.push((r,1)); }
        }
        println!("  rank path: {:?}", &compact[..compact.len().min(6)]);
        // block structure of the error
        let half = n / 2;
        let mut ll = 0.0; let mut rr = 0.0; let mut lr = 0.0;
        let mut ll_obs = 0.0; let mut rr_obs = 0.0; let mut lr_obs = 0.0;
        for i in 0..n { for j in 0..n {
            if i == j { continue; }
            let e = (completed.get(i, j) - truth[(i, j)]).powi(2);
            let obs = known.known(i, j);
            if i < half && j < half { ll += e; if obs { ll_obs += e; } }
            else if i >= half && j >= half { rr += e; if obs { rr_obs += e; } }
            else { lr += e; if obs { lr_obs += e; } }
        }}
        println!("  err^2: LL {:.2e} (obs {:.2e})  RR {:.2e} (obs {:.2e})  LR {:.2e} (obs {:.2e})", ll, ll_obs, rr, rr_obs, lr, lr_obs);

    }
}
