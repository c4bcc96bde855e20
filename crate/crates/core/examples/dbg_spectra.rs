use cef_core::edm::Edmm;
use cef_core::scenario::*;

fn main() {
    for (var, anom, label) in [
        (1.0f64, vec![3usize, 4], "var1 anom_de"),
        (0.5, vec![3, 4], "var.5 anom_de"),
        (0.25, vec![3, 4], "var.25 anom_de"),
        (1.0, vec![4], "var1 anom_e"),
        (0.5, vec![4], "var.5 anom_e"),
    ] {
        let mut cfg = ScenarioConfig::paper_profile();
        cfg.class_variance = var;
        cfg.anomaly_mean_indices = anom;
        println!("--- {label}");
        for seed in 0..4u64 {
            let s = generate_scenario(&cfg, seed).unwrap();
            let evidence: Vec<_> = s.observations.iter().map(|&x| {
                let nearest = cfg.class_means.iter().cloned()
                    .min_by(|a, b| (x - a).abs().partial_cmp(&(x - b).abs()).unwrap()).unwrap();
                observation_to_bba(nearest, &cfg).unwrap()
            }).collect();
            // group sizes by decided class
            let mut sizes = [0usize; 5];
            for m in &evidence {
                sizes[m.pignistic().argmax_serial() - 1] += 1;
            }
            let d = Edmm::from_evidence(&evidence);
            let sv = d.matrix().clone().svd(false, false).singular_values;
            let ratios: Vec<f64> = sv.iter().take(7).map(|x| (x / sv[0] * 1000.0).round()/1000.0).collect();
            println!("  seed {seed}: groups {sizes:?} sigma/sigma1 {ratios:?}");
        }
    }
}
