use nalgebra::{DMatrix, DVector};
use cef_core::network::NetworkGraph;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = StdRng::seed_from_u64(1);
    for &n in &[40usize, 60, 80, 120, 160, 200] {
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let half = n / 2;
            let a = DVector::from_fn(n, |i, _| if i < half { rng.random::<f64>() + 0.5 } else { 0.0 });
            let b = DVector::from_fn(n, |i, _| if i >= half { rng.random::<f64>() + 0.5 } else { 0.0 });
            let t = &a * b.transpose() + &b * a.transpose();
            let peak = t.abs().max();
            let truth = t / peak;
            let g = NetworkGraph::random_connected(n, 0.5, &mut rng).unwrap();
            let mask = g.global_mask();
            let masked = DMatrix::from_fn(n, n, |i, j| if mask[(i, j)] { truth[(i, j)] } else { 0.0 });
            let sv = masked.svd(false, false).singular_values;
            worst = worst.max(sv[2] / sv[0]);
        }
        println!("n={n}: worst sigma3/sigma1 of masked = {worst:.4}");
    }
}
