use nplab::harness::*;
fn main() {
    for m in [1usize, 8] {
        let mut sc = ScenarioConfig::default();
        sc.model.n_outputs = m;
        sc.replications = 1;
        sc.t_max = 100.0;
        sc.record_interval = 10.0;
        let t0 = std::time::Instant::now();
        let tr = run_simulation(&sc).unwrap();
        println!(
            "M={m} 1e5 steps {:?} final {}",
            t0.elapsed(),
            tr.final_eps_g().unwrap()
        );
    }
}
