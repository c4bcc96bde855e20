use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::default();
    for seed in 0..5u64 {
        let t0 = std::time::Instant::now();
        match run_pcef(&cfg, seed) {
            Ok(run) => {
                let ranks: Vec<usize> = run.rank_trace.iter().map(|r| r.rank).collect();
                let mut compact = vec![(ranks[0], 1usize)];
                for &r in &ranks[1..] {
                    if compact.last().unwrap().0 == r { compact.last_mut().unwrap().1 += 1; } else { compact.push((r,1)); }
                }
                println!(
                    "seed {seed}: dec pcef/ccef/dr = {}/{}/{} truth {} | max_cred_err {:.4} max_pign_err {:.4} gap {:.2e} | ranks {:?} | {:.2}s",
                    run.decisions.pcef, run.decisions.ccef, run.decisions.dr, run.truth_class,
                    run.max_cred_error(), run.max_pignistic_error(), run.agreement_gap, compact,
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("seed {seed}: ERROR {e}"),
        }
    }
}
