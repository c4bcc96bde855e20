use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::default();
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    for seed in 0..100u64 {
        let run = run_pcef(&cfg, seed).unwrap();
        let e = run.max_pignistic_error();
        if e <= 0.02 { ok += 1; } else { fails.push((seed, (e*1000.0).round()/1000.0)); }
        worst = worst.max(e);
    }
    println!("pign <=0.02 in {ok}/100 trials, worst {worst:.4}");
    println!("failures: {fails:?}");
}
