use cef_core::scenario::*;

fn main() {
    let cfg = ScenarioConfig::paper_profile();
    let mut pass02 = 0;
    for seed in 0..5u64 {
        let t0 = std::time::Instant::now();
        match run_pcef(&cfg, seed) {
            Ok(run) => {
                let ranks: Vec<usize> = run.rank_trace.iter().map(|r| r.rank).collect();
                let mut compact = vec![(ranks[0], 1usize)];
                for &r in &ranks[1..] {
                    if compact.last().unwrap().0 == r { compact.last_mut().unwrap().1 += 1; } else { compact.push((r,1)); }
                }
                if run.max_cred_error() <= 0.02 { pass02 += 1; }
                println!(
                    "seed {seed}: cred_err {:.4} pign_err {:.5} dec {}/{}/{} ranks {:?} {:.1}s",
                    run.max_cred_error(), run.max_pignistic_error(),
                    run.decisions.pcef, run.decisions.ccef, run.decisions.dr, compact,
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("seed {seed}: ERROR {e}"),
        }
    }
    println!("<=0.02 on {pass02}/5");
}
